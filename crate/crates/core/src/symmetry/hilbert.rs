use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde_json::json;

use super::model::FiniteSymmetryModel;
use super::perm::{PermGroup, Permutation};
use super::words::{detect_multivaluedness, verify_word_homomorphism, Multivaluedness, TransferWords};
use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector, C64};
use crate::report::{verdict_from_witnesses, Subject, Verdict, VerificationReport};

/// Overlap bound for every non-identity element: `|⟨f, U f⟩| ≤ 1 − LEMMA2_MARGIN`.
pub const LEMMA2_MARGIN: f64 = 1e-9;

/// Functions on Φ that factor through the distinguished variable: the
/// normalized level-set indicators, by ascending value.
#[derive(Clone, Debug)]
pub struct HilbertBasis {
    pub values: Vec<i64>,
    pub level_sets: Vec<Vec<usize>>,
    pub functions: Vec<ComplexVector>,
}

impl HilbertBasis {
    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    /// Coordinates `⟨f_i, f⟩` and the norm of the part of `f` outside the span.
    pub fn coordinates(&self, f: &ComplexVector) -> Result<(Vec<C64>, f64)> {
        let coords = self
            .functions
            .iter()
            .map(|fi| linalg::inner(fi, f))
            .collect::<Result<Vec<_>>>()?;
        let mut rest = f.clone();
        for (fi, a) in self.functions.iter().zip(&coords) {
            rest = rest.sub(&fi.scale(*a))?;
        }
        Ok((coords, rest.norm()))
    }

    /// `⟨f_i, U(k) f_j⟩`
    pub fn restricted_matrix(&self, k: &Permutation) -> Result<ComplexMatrix> {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d);
        for j in 0..d {
            let (coords, _) = self.coordinates(&act(k, &self.functions[j]))?;
            for (i, z) in coords.into_iter().enumerate() {
                out[(i, j)] = z;
            }
        }
        Ok(out)
    }
}

pub fn hilbert_subspace(m: &FiniteSymmetryModel) -> Result<HilbertBasis> {
    let sets = m.variables()[0].level_sets();
    if sets.len() < 2 {
        return Err(Error::HilbertDimensionTooSmall(sets.len()));
    }
    let n = m.phi_size();
    let functions = sets
        .iter()
        .map(|(_, set)| {
            let amp = 1.0 / (set.len() as f64).sqrt();
            let mut v = vec![c(0.0, 0.0); n];
            for &p in set {
                v[p] = c(amp, 0.0);
            }
            ComplexVector::new(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HilbertBasis {
        values: sets.iter().map(|(u, _)| *u).collect(),
        level_sets: sets.into_iter().map(|(_, s)| s).collect(),
        functions,
    })
}

/// `(U(k)f)(φ) = f(k⁻¹φ)`
fn act(k: &Permutation, f: &ComplexVector) -> ComplexVector {
    let mut out = vec![c(0.0, 0.0); f.dim()];
    for (phi, z) in f.amplitudes().iter().enumerate() {
        out[k.apply(phi)] = *z;
    }
    ComplexVector::new(out).expect("permuted finite amplitudes")
}

/// The left regular representation, restricted to elements of `group`.
pub fn regular_representation(group: &PermGroup, k: &Permutation, f: &ComplexVector) -> Result<ComplexVector> {
    if f.dim() != group.degree() {
        return Err(Error::DimensionMismatch { expected: group.degree(), found: f.dim() });
    }
    if !group.contains(k) {
        return Err(Error::NotInGroup);
    }
    Ok(act(k, f))
}

/// All `k` in `candidates` with `g(θ^a(φ)) = θ^a(k φ)` for every `φ`.
pub fn induced_transformations_in(
    m: &FiniteSymmetryModel,
    a: usize,
    g: &BTreeMap<i64, i64>,
    candidates: &[Permutation],
) -> Result<Vec<Permutation>> {
    let theta = &m.variables()[a].theta;
    let range: BTreeSet<i64> = theta.iter().copied().collect();
    let domain: BTreeSet<i64> = g.keys().copied().collect();
    let image: BTreeSet<i64> = g.values().copied().collect();
    if domain != range || image != range {
        return Err(Error::InvalidModel(format!(
            "value map must permute the values {:?} of {}",
            range,
            m.label(a)
        )));
    }
    Ok(candidates
        .iter()
        .filter(|k| (0..m.phi_size()).all(|phi| g[&theta[phi]] == theta[k.apply(phi)]))
        .cloned()
        .collect())
}

/// Searches the group generated by all subgroups and transfer maps.
pub fn induced_transformations(m: &FiniteSymmetryModel, a: usize, g: &BTreeMap<i64, i64>) -> Result<Vec<Permutation>> {
    induced_transformations_in(m, a, g, m.whole_group().elements())
}

#[derive(Clone, Debug)]
pub struct QuestionStates {
    pub variable: usize,
    /// `k_a⁰`; the identity for the distinguished variable.
    pub shift: Permutation,
    /// `|a;i⟩` in the coordinates of the Hilbert basis.
    pub states: Vec<ComplexVector>,
    /// Largest norm of a state's component outside the Hilbert subspace.
    pub outside_residual: f64,
}

#[derive(Clone, Debug)]
pub struct QuestionStateSet {
    pub basis: HilbertBasis,
    pub built: Vec<QuestionStates>,
    /// Variables without a multivalued word pair, with their status.
    pub skipped: Vec<(usize, &'static str)>,
}

/// `|0;i⟩ = f_i` and `|a;i⟩ = U((k_a⁰)⁻¹) f_i` with
/// `k_a⁰ = image(first)⁻¹ · image(second)` from the canonical word pair.
pub fn build_question_states(m: &FiniteSymmetryModel, mv: &Multivaluedness) -> Result<QuestionStateSet> {
    let basis = hilbert_subspace(m)?;
    let d = basis.dim();
    let mut built = vec![QuestionStates {
        variable: 0,
        shift: Permutation::identity(m.phi_size()),
        states: (0..d).map(|i| ComplexVector::basis(d, i)).collect(),
        outside_residual: 0.0,
    }];
    let mut skipped = Vec::new();
    for (a, status) in mv.transfers.iter().enumerate().skip(1) {
        let status = status.as_ref().expect("filled for a > 0");
        let TransferWords::Multivalued { first_image, second_image, .. } = status else {
            skipped.push((a, status.status()));
            continue;
        };
        let shift = first_image.inverse().compose(second_image);
        let inv = shift.inverse();
        let mut states = Vec::with_capacity(d);
        let mut outside: f64 = 0.0;
        for f in &basis.functions {
            let (coords, residual) = basis.coordinates(&act(&inv, f))?;
            outside = outside.max(residual);
            states.push(ComplexVector::new(coords)?);
        }
        built.push(QuestionStates { variable: a, shift, states, outside_residual: outside });
    }
    Ok(QuestionStateSet { basis, built, skipped })
}

fn assumption_1(m: &FiniteSymmetryModel) -> VerificationReport {
    // Counting measure is invariant under any bijection; check every
    // generator really is one on the declared point set.
    let mut b = VerificationReport::builder(Subject::Assumption1);
    let mut checked = 0usize;
    for p in m.whole_group().elements() {
        checked += 1;
        let mut seen = vec![false; m.phi_size()];
        for &x in p.images() {
            seen[x] = true;
        }
        if seen.iter().any(|s| !s) {
            b.witness(json!({ "element": p }));
        }
    }
    b.metric("elements_checked", checked as f64).metric("phi_size", m.phi_size() as f64);
    b.note("counting measure on a finite set is invariant under every permutation");
    let verdict = verdict_from_witnesses(&b);
    b.finish(verdict)
}

fn assumption_2(m: &FiniteSymmetryModel) -> VerificationReport {
    let mut b = VerificationReport::builder(Subject::Assumption2);
    let generated = m.generated_group();
    for a in 1..m.variable_count() {
        for (x, y) in [(0, a), (a, 0)] {
            let k = m.transfer(x, y).expect("transfer exists");
            if !generated.contains(&k) {
                b.witness(json!({ "pair": m.pair_name(x, y), "transfer": k }));
            }
        }
    }
    for (&(x, y), k) in m.explicit_transfers() {
        if !generated.contains(k) && x != 0 && y != 0 {
            b.witness(json!({ "pair": m.pair_name(x, y), "transfer": k }));
        }
    }
    b.metric("generated_order", generated.order() as f64)
        .metric("order_with_transfers", m.whole_group().order() as f64);
    let verdict = if generated.same_elements(m.whole_group()) { Verdict::Pass } else { Verdict::Fail };
    if verdict == Verdict::Fail && b.witness_count() == 0 {
        b.witness(json!({ "reason": "closures differ" }));
    }
    b.finish(verdict)
}

/// Generators of the distinct nontrivial cyclic subgroups of `group`.
fn cyclic_subgroup_generators(group: &PermGroup) -> Vec<Permutation> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for k in group.elements().iter().skip(1) {
        let mut members = Vec::new();
        let mut p = k.clone();
        while !p.is_identity() {
            members.push(group.id_of(&p).expect("group is closed"));
            p = p.compose(k);
        }
        members.sort_unstable();
        if seen.insert(members) {
            out.push(k.clone());
        }
    }
    out
}

/// A unit eigenvector of the unitary `u` spans an invariant line.
fn invariant_line(u: &ComplexMatrix) -> Result<Option<(ComplexVector, C64, f64)>> {
    // Distinct eigenvalues e^{iα} of u stay distinct as cos α + t·sin α.
    let t = 1f64.tan();
    let adj = u.adjoint();
    let sym = u.add(&adj)?.scale(c(0.5, 0.0));
    let anti = u.sub(&adj)?.scale(c(0.0, -0.5 * t));
    let eig = linalg::hermitian_eig(&sym.add(&anti)?)?;
    let v = eig.eigenvectors[0].clone();
    let uv = u.mul_vec(&v)?;
    let lambda = linalg::inner(&v, &uv)?;
    let residual = uv.sub(&v.scale(lambda))?.norm();
    Ok((residual <= 1e-10).then_some((v, lambda, residual)))
}

fn assumption_3a(basis: Option<&HilbertBasis>, m: &FiniteSymmetryModel) -> Result<VerificationReport> {
    let mut b = VerificationReport::builder(Subject::Assumption3a);
    let Some(basis) = basis else {
        b.witness(json!({ "check": "dimension_below_two" }));
        return Ok(b.finish(Verdict::Fail));
    };
    let cyclic = cyclic_subgroup_generators(m.subgroup(0));
    let mut reducible = 0usize;
    let mut worst_residual: f64 = 0.0;
    for k in &cyclic {
        let u = basis.restricted_matrix(k)?;
        if let Some((v, lambda, residual)) = invariant_line(&u)? {
            reducible += 1;
            worst_residual = worst_residual.max(residual);
            b.witness(json!({
                "check": "reducible",
                "generator": k,
                "invariant_vector": v.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "eigenvalue": [lambda.re, lambda.im],
            }));
        }
    }
    b.metric("dimension", basis.dim() as f64)
        .metric("cyclic_subgroups", cyclic.len() as f64)
        .metric("reducible_cyclic_subgroups", reducible as f64)
        .metric("max_eigen_residual", worst_residual);
    if cyclic.is_empty() {
        b.note("distinguished subgroup is trivial; holds vacuously");
    }
    let verdict = verdict_from_witnesses(&b);
    Ok(b.finish(verdict))
}

/// Orbits of the value group on value indices.
fn value_orbits(d: usize, gens: Option<&[Permutation]>) -> Vec<usize> {
    let Some(gens) = gens else { return vec![0; d] };
    let mut orbit: Vec<usize> = (0..d).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for g in gens {
            for x in 0..d {
                let (a, b) = (orbit[x], orbit[g.apply(x)]);
                if a != b {
                    let (lo, hi) = (a.min(b), a.max(b));
                    orbit.iter_mut().filter(|o| **o == hi).for_each(|o| *o = lo);
                    changed = true;
                }
            }
        }
    }
    orbit
}

fn assumption_3c(basis: Option<&HilbertBasis>, m: &FiniteSymmetryModel) -> VerificationReport {
    let mut b = VerificationReport::builder(Subject::Assumption3c);
    let Some(basis) = basis else {
        b.witness(json!({ "check": "dimension_below_two" }));
        return b.finish(Verdict::Fail);
    };
    let d = basis.dim();
    let orbit = value_orbits(d, m.value_group());
    // f̃_i(u_k) = δ_ik / √|level set i|
    let weight: Vec<f64> = basis.level_sets.iter().map(|s| 1.0 / (s.len() as f64).sqrt()).collect();
    let f = |i: usize, k: usize| if i == k { weight[i] } else { 0.0 };
    let mut satisfied = 0usize;
    for i in 0..d {
        for j in (0..d).filter(|&j| j != i) {
            let found = (0..d).find(|&t| {
                (0..d)
                    .filter(|&s| orbit[s] == orbit[t])
                    .all(|s| (f(i, s) - f(j, t)).abs() > 1e-12)
            });
            match found {
                Some(_) => satisfied += 1,
                None => {
                    b.witness(json!({ "i": basis.values[i], "j": basis.values[j] }));
                }
            }
        }
    }
    b.metric("pairs", (d * (d - 1)) as f64)
        .metric("pairs_satisfied", satisfied as f64)
        .metric("value_orbits", orbit.iter().collect::<BTreeSet<_>>().len() as f64);
    if m.value_group().is_none() {
        b.note("value group is the full symmetric group on the distinguished values");
    }
    let verdict = verdict_from_witnesses(&b);
    b.finish(verdict)
}

/// `|⟨f_i, U(k)f_i⟩| ≤ 1 − 1e-9` for every `k ≠ e` in `K⁰`.
fn lemma_2(basis: Option<&HilbertBasis>, m: &FiniteSymmetryModel) -> Result<VerificationReport> {
    let mut b = VerificationReport::builder(Subject::Lemma2);
    let Some(basis) = basis else {
        b.witness(json!({ "check": "dimension_below_two" }));
        return Ok(b.finish(Verdict::Fail));
    };
    let mut worst: f64 = 0.0;
    let group = m.subgroup(0);
    for k in group.elements().iter().skip(1) {
        for (i, f) in basis.functions.iter().enumerate() {
            let overlap = linalg::inner(f, &act(k, f))?.norm();
            worst = worst.max(overlap);
            if overlap > 1.0 - LEMMA2_MARGIN {
                b.witness(json!({ "element": k, "value": basis.values[i], "overlap": overlap }));
            }
        }
    }
    b.metric("elements_checked", (group.order() - 1) as f64)
        .metric("max_overlap", worst);
    let verdict = verdict_from_witnesses(&b);
    Ok(b.finish(verdict))
}

/// The assumption checks, the overlap bound and the word-map checks, in that
/// order.
pub fn check_assumptions<R: Rng + ?Sized>(
    m: &FiniteSymmetryModel,
    max_len: usize,
    rng: &mut R,
) -> Result<Vec<VerificationReport>> {
    let basis = hilbert_subspace(m).ok();
    let mv = detect_multivaluedness(m, max_len)?;
    Ok(vec![
        assumption_1(m),
        assumption_2(m),
        assumption_3a(basis.as_ref(), m)?,
        mv.report(m),
        assumption_3c(basis.as_ref(), m),
        lemma_2(basis.as_ref(), m)?,
        verify_word_homomorphism(m, &mv, 200, rng)?,
    ])
}

/// Orthonormality of each family `{|a;i⟩}` and pairwise distinctness of
/// all built states up to phase.
pub fn verify_theorem1(m: &FiniteSymmetryModel, max_len: usize, eps: f64) -> Result<VerificationReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidTolerance(eps));
    }
    let mv = detect_multivaluedness(m, max_len)?;
    let set = build_question_states(m, &mv)?;
    let mut b = VerificationReport::builder(Subject::Theorem1);

    let mut worst_gram: f64 = 0.0;
    let mut worst_outside: f64 = 0.0;
    for family in &set.built {
        let dev = linalg::orthonormality_deviation(&family.states)?;
        worst_gram = worst_gram.max(dev);
        worst_outside = worst_outside.max(family.outside_residual);
        if dev > eps {
            b.witness(json!({ "check": "orthonormality", "variable": m.label(family.variable), "deviation": dev }));
        }
    }

    let mut collisions = 0usize;
    let mut pairs = 0usize;
    for (fa, a) in set.built.iter().enumerate() {
        for b_family in &set.built[fa..] {
            for (i, si) in a.states.iter().enumerate() {
                for (j, sj) in b_family.states.iter().enumerate() {
                    if a.variable == b_family.variable && j <= i {
                        continue;
                    }
                    pairs += 1;
                    if linalg::phase_equal(si, sj, eps)? {
                        collisions += 1;
                        b.witness(json!({
                            "check": "distinctness",
                            "first": [m.label(a.variable), set.basis.values[i]],
                            "second": [m.label(b_family.variable), set.basis.values[j]],
                        }));
                    }
                }
            }
        }
    }

    let shifts: Vec<_> = set
        .built
        .iter()
        .map(|f| json!({ "variable": m.label(f.variable), "shift": f.shift }))
        .collect();
    let skipped: Vec<_> = set
        .skipped
        .iter()
        .map(|(a, s)| json!({ "variable": m.label(*a), "status": s }))
        .collect();
    b.metric("families", set.built.len() as f64)
        .metric("dimension", set.basis.dim() as f64)
        .metric("max_gram_deviation", worst_gram)
        .metric("max_outside_residual", worst_outside)
        .metric("pairs_compared", pairs as f64)
        .metric("collisions", collisions as f64)
        .details(json!({ "shifts": shifts, "skipped": skipped }));

    let verdict = if b.witness_count() > 0 {
        Verdict::Fail
    } else if m.variable_count() > 1 && set.built.len() == 1 {
        b.note("no variable besides the distinguished one has a multivalued word pair");
        Verdict::Undetermined
    } else {
        if m.variable_count() == 1 {
            b.note("single variable; distinctness across variables holds vacuously");
        }
        Verdict::Pass
    };
    Ok(b.finish(verdict))
}
