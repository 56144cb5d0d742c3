use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;
use serde_json::json;

use super::perm::{PermGroup, Permutation};
use crate::error::{Error, Result};
use crate::report::{verdict_from_witnesses, Subject, VerificationReport};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    phi_size: usize,
    distinguished: usize,
    variables: Vec<VariableFile>,
    #[serde(default)]
    subgroups: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    transfer: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    value_groups: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableFile {
    label: String,
    theta: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub label: String,
    pub theta: Vec<i64>,
}

impl Variable {
    /// Distinct values in ascending order.
    pub fn values(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.theta.iter().copied().collect();
        set.into_iter().collect()
    }

    /// `{φ : θ(φ) = u}` for each value `u`, in ascending value order.
    pub fn level_sets(&self) -> Vec<(i64, Vec<usize>)> {
        self.values()
            .into_iter()
            .map(|u| (u, (0..self.theta.len()).filter(|&p| self.theta[p] == u).collect()))
            .collect()
    }
}

/// A finite model: points `Φ = {0, …, n−1}`, variables `θ^a`, their
/// symmetry subgroups `K^a` and the transfer maps `k_ab` with
/// `θ^b(φ) = θ^a(k_ab φ)`. The distinguished variable is stored first.
#[derive(Clone, Debug)]
pub struct FiniteSymmetryModel {
    phi_size: usize,
    variables: Vec<Variable>,
    generators: Vec<Vec<Permutation>>,
    transfers: BTreeMap<(usize, usize), Permutation>,
    value_group: Option<Vec<Permutation>>,
    subgroups: Vec<PermGroup>,
    generated: PermGroup,
    whole: PermGroup,
}

fn model_err(field: impl std::fmt::Display, msg: impl std::fmt::Display) -> Error {
    Error::InvalidModel(format!("{field}: {msg}"))
}

fn perm_field(field: String, images: Vec<usize>, n: usize) -> Result<Permutation> {
    if images.len() != n {
        return Err(model_err(field, format!("has length {}, expected phi_size {n}", images.len())));
    }
    Permutation::new(images).map_err(|e| model_err(field, e))
}

impl FiniteSymmetryModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidModel(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn from_file(file: ModelFile) -> Result<Self> {
        let n = file.phi_size;
        if n == 0 {
            return Err(model_err("phi_size", "must be positive"));
        }
        if file.variables.is_empty() {
            return Err(model_err("variables", "must not be empty"));
        }
        if file.distinguished >= file.variables.len() {
            return Err(model_err(
                "distinguished",
                format!("index {} but only {} variables", file.distinguished, file.variables.len()),
            ));
        }
        for (i, v) in file.variables.iter().enumerate() {
            if v.theta.len() != n {
                return Err(model_err(
                    format!("variables[{i}].theta"),
                    format!("has length {}, expected phi_size {n}", v.theta.len()),
                ));
            }
            if v.label.is_empty() {
                return Err(model_err(format!("variables[{i}].label"), "must not be empty"));
            }
        }

        let mut variables: Vec<Variable> = file
            .variables
            .into_iter()
            .map(|v| Variable { label: v.label, theta: v.theta })
            .collect();
        let distinguished = variables.remove(file.distinguished);
        variables.insert(0, distinguished);

        let mut by_label = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if by_label.insert(v.label.clone(), i).is_some() {
                return Err(model_err("variables", format!("duplicate label {:?}", v.label)));
            }
        }

        let mut generators = vec![Vec::new(); variables.len()];
        for (label, gens) in file.subgroups {
            let &a = by_label
                .get(&label)
                .ok_or_else(|| model_err(format!("subgroups.{label}"), "unknown variable label"))?;
            for (g, images) in gens.into_iter().enumerate() {
                generators[a].push(perm_field(format!("subgroups.{label}[{g}]"), images, n)?);
            }
        }

        let mut transfers = BTreeMap::new();
        for (key, images) in file.transfer {
            let splits: Vec<(usize, usize)> = (1..key.len())
                .filter(|&cut| key.is_char_boundary(cut))
                .filter_map(|cut| Some((*by_label.get(&key[..cut])?, *by_label.get(&key[cut..])?)))
                .collect();
            let pair = match splits.as_slice() {
                [pair] => *pair,
                [] => return Err(model_err(format!("transfer.{key}"), "key is not two concatenated variable labels")),
                _ => return Err(model_err(format!("transfer.{key}"), "key splits into labels in more than one way")),
            };
            transfers.insert(pair, perm_field(format!("transfer.{key}"), images, n)?);
        }
        for a in 1..variables.len() {
            if !transfers.contains_key(&(0, a)) && !transfers.contains_key(&(a, 0)) {
                return Err(model_err(
                    "transfer",
                    format!("missing map between {:?} and {:?}", variables[0].label, variables[a].label),
                ));
            }
        }

        let mut value_group = None;
        for (label, gens) in file.value_groups {
            let &a = by_label
                .get(&label)
                .ok_or_else(|| model_err(format!("value_groups.{label}"), "unknown variable label"))?;
            let d = variables[a].values().len();
            let perms = gens
                .into_iter()
                .enumerate()
                .map(|(g, images)| perm_field(format!("value_groups.{label}[{g}]"), images, d))
                .collect::<Result<Vec<_>>>()?;
            if a == 0 {
                value_group = Some(perms);
            }
        }

        let subgroups = generators
            .iter()
            .map(|g| PermGroup::generate(n, g))
            .collect::<Result<Vec<_>>>()?;
        let all_generators: Vec<Permutation> = generators.iter().flatten().cloned().collect();
        let generated = PermGroup::generate(n, &all_generators)?;

        let mut model = Self {
            phi_size: n,
            variables,
            generators,
            transfers,
            value_group,
            subgroups,
            generated,
            whole: PermGroup::generate(n, &[])?,
        };
        let mut with_transfers = all_generators;
        for a in 0..model.variables.len() {
            with_transfers.push(model.transfer(0, a).expect("checked above"));
            with_transfers.push(model.transfer(a, 0).expect("checked above"));
        }
        with_transfers.extend(model.transfers.values().cloned());
        model.whole = PermGroup::generate(n, &with_transfers)?;
        Ok(model)
    }

    pub fn phi_size(&self) -> usize {
        self.phi_size
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn label(&self, a: usize) -> &str {
        &self.variables[a].label
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.label == label)
    }

    pub fn generators(&self, a: usize) -> &[Permutation] {
        &self.generators[a]
    }

    /// `K^a`
    pub fn subgroup(&self, a: usize) -> &PermGroup {
        &self.subgroups[a]
    }

    /// The group generated by all `K^a`.
    pub fn generated_group(&self) -> &PermGroup {
        &self.generated
    }

    /// The group generated by all `K^a` and all transfer maps.
    pub fn whole_group(&self) -> &PermGroup {
        &self.whole
    }

    /// Generators of the value group acting on the distinguished variable's
    /// value indices; `None` means the full symmetric group.
    pub fn value_group(&self) -> Option<&[Permutation]> {
        self.value_group.as_deref()
    }

    pub fn explicit_transfers(&self) -> &BTreeMap<(usize, usize), Permutation> {
        &self.transfers
    }

    /// `k_ab`: the listed map, else the inverse of `k_ba`, else the identity
    /// when `a = b`.
    pub fn transfer(&self, a: usize, b: usize) -> Option<Permutation> {
        if let Some(p) = self.transfers.get(&(a, b)) {
            return Some(p.clone());
        }
        if let Some(p) = self.transfers.get(&(b, a)) {
            return Some(p.inverse());
        }
        (a == b).then(|| Permutation::identity(self.phi_size))
    }

    /// `k_0a · k · k_a0`
    pub fn conjugate_to_distinguished(&self, a: usize, k: &Permutation) -> Permutation {
        let to = self.transfer(0, a).expect("transfer to distinguished exists");
        let from = self.transfer(a, 0).expect("transfer to distinguished exists");
        to.compose(k).compose(&from)
    }

    pub fn pair_name(&self, a: usize, b: usize) -> String {
        format!("{}{}", self.label(a), self.label(b))
    }
}

/// The value map `ρ` with `ρ(θ^b(φ)) = θ^a(k_ab φ)` when it is well defined.
fn relabeling(m: &FiniteSymmetryModel, a: usize, b: usize, k: &Permutation) -> std::result::Result<BTreeMap<i64, i64>, serde_json::Value> {
    let theta_a = &m.variables()[a].theta;
    let theta_b = &m.variables()[b].theta;
    let mut rho: BTreeMap<i64, (i64, usize)> = BTreeMap::new();
    for phi in 0..m.phi_size() {
        let from = theta_b[phi];
        let to = theta_a[k.apply(phi)];
        match rho.get(&from) {
            Some(&(prev, witness)) if prev != to => {
                return Err(json!({
                    "check": "transfer_relation",
                    "pair": m.pair_name(a, b),
                    "phi": [witness, phi],
                    "theta_b": from,
                    "theta_a_at_transfer": [prev, to],
                }));
            }
            Some(_) => {}
            None => {
                rho.insert(from, (to, phi));
            }
        }
    }
    Ok(rho.into_iter().map(|(u, (v, _))| (u, v)).collect())
}

/// Checks the structural relations of a model and the value alignment
/// `ρ(θ^a(φ)) = θ⁰(k_0a φ)`.
pub fn validate_model(m: &FiniteSymmetryModel) -> VerificationReport {
    let mut b = VerificationReport::builder(Subject::Lemma1);
    let mut pairs: BTreeSet<(usize, usize)> = m.explicit_transfers().keys().copied().collect();
    pairs.extend((1..m.variable_count()).map(|a| (0, a)));

    let mut relabelings = Vec::new();
    let mut relabeled_pairs = 0usize;
    for &(a, bb) in &pairs {
        let k = m.transfer(a, bb).expect("pair comes from the model");
        match relabeling(m, a, bb, &k) {
            Err(w) => {
                b.witness(w);
            }
            Ok(rho) => {
                let mut targets: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
                for (&from, &to) in &rho {
                    targets.entry(to).or_default().push(from);
                }
                let mut bijective = true;
                for (to, froms) in targets.iter().filter(|(_, f)| f.len() > 1) {
                    bijective = false;
                    b.witness(json!({
                        "check": "relabeling_not_injective",
                        "pair": m.pair_name(a, bb),
                        "theta_b_values": froms,
                        "theta_a_value": to,
                        "phi": froms.iter().map(|u| m.variables()[bb].theta.iter().position(|t| t == u)).collect::<Vec<_>>(),
                    }));
                }
                let identity = rho.iter().all(|(u, v)| u == v);
                if !identity {
                    relabeled_pairs += 1;
                }
                if bijective {
                    relabelings.push(json!({
                        "pair": m.pair_name(a, bb),
                        "relabeling": rho.iter().map(|(u, v)| [*u, *v]).collect::<Vec<_>>(),
                        "identity": identity,
                    }));
                }
            }
        }
    }

    let k0 = m.subgroup(0);
    for a in 0..m.variable_count() {
        let theta = &m.variables()[a].theta;
        for (g, k) in m.generators(a).iter().enumerate() {
            let mut image: BTreeMap<i64, (i64, usize)> = BTreeMap::new();
            for phi in 0..m.phi_size() {
                let to = theta[k.apply(phi)];
                match image.get(&theta[phi]) {
                    Some(&(prev, witness)) if prev != to => {
                        b.witness(json!({
                            "check": "level_sets_not_permuted",
                            "variable": m.label(a),
                            "generator": g,
                            "phi": [witness, phi],
                        }));
                        break;
                    }
                    Some(_) => {}
                    None => {
                        image.insert(theta[phi], (to, phi));
                    }
                }
            }
            if a > 0 {
                let conj = m.conjugate_to_distinguished(a, k);
                if !k0.contains(&conj) {
                    b.witness(json!({
                        "check": "conjugate_outside_distinguished_subgroup",
                        "variable": m.label(a),
                        "generator": g,
                        "conjugate": conj,
                    }));
                }
            }
        }
    }

    b.metric("variables", m.variable_count() as f64)
        .metric("transfer_pairs_checked", pairs.len() as f64)
        .metric("relabeled_pairs", relabeled_pairs as f64)
        .details(json!({ "relabelings": relabelings }));
    let verdict = verdict_from_witnesses(&b);
    b.finish(verdict)
}
