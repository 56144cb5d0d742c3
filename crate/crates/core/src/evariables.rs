//! Operators for accessible variables: a maximal variable `B = Σ v_j |j⟩⟨j|`
//! and its coarse grainings `A = Σ u_i Π_i`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector};
use crate::report::{Subject, VerificationReport};

const ORTHONORMAL_TOL: f64 = 1e-10;
const DISTINCT_REL: f64 = 1e-9;

/// A maximally accessible variable: distinct values paired with an
/// orthonormal eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct EVariableSpec {
    name: String,
    values: Vec<f64>,
    basis: Vec<ComplexVector>,
}

fn min_gap(sorted: &[f64]) -> f64 {
    sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

impl EVariableSpec {
    pub fn new(name: impl Into<String>, values: Vec<f64>, basis: Vec<ComplexVector>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if basis.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: values.len(), found: basis.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidEVariable("values must be strictly increasing".into()));
        }
        let range = values[values.len() - 1] - values[0];
        if values.len() > 1 && min_gap(&values) <= DISTINCT_REL * range {
            return Err(Error::InvalidEVariable(format!(
                "values closer than {DISTINCT_REL:e} of their range"
            )));
        }
        let dim = values.len();
        if let Some(v) = basis.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
        }
        let deviation = linalg::orthonormality_deviation(&basis)?;
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { name: name.into(), values, basis })
    }

    /// Uses the standard basis.
    pub fn standard(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let basis = (0..values.len()).map(|k| ComplexVector::basis(values.len(), k)).collect();
        Self::new(name, values, basis)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

fn weighted_projector_sum(weights: &[f64], vectors: &[ComplexVector]) -> ComplexMatrix {
    let dim = vectors[0].dim();
    let mut out = ComplexMatrix::zeros(dim);
    for (w, v) in weights.iter().zip(vectors) {
        let term = ComplexMatrix::outer(v, v).expect("same dimension").scale(c(*w, 0.0));
        out = out.add(&term).expect("same dimension");
    }
    out
}

/// `B = Σ v_j |j⟩⟨j|`
pub fn operator_from_maximal(spec: &EVariableSpec) -> ComplexMatrix {
    weighted_projector_sum(&spec.values, &spec.basis)
}

#[derive(Clone, Debug)]
pub struct CoarseGraining {
    pub name: String,
    /// Basis indices of each class, classes ordered by ascending coarse value.
    pub classes: Vec<Vec<usize>>,
    pub values: Vec<f64>,
    pub subspaces: Vec<Vec<ComplexVector>>,
    pub projectors: Vec<ComplexMatrix>,
    /// `Σ_i Σ_{j∈C_i} t(v_j)|j⟩⟨j|`
    pub operator: ComplexMatrix,
}

/// Groups basis indices by `t(v_j)`.
pub fn coarse_grain<F>(spec: &EVariableSpec, t: F) -> Result<CoarseGraining>
where
    F: Fn(f64) -> Option<f64>,
{
    let mut images = Vec::with_capacity(spec.dim());
    for &v in &spec.values {
        let u = t(v).ok_or(Error::MapUndefined(v))?;
        if !u.is_finite() {
            return Err(Error::MapUndefined(v));
        }
        images.push(u);
    }

    let mut coarse: Vec<f64> = images.clone();
    coarse.sort_by(f64::total_cmp);
    coarse.dedup();
    let range = coarse[coarse.len() - 1] - coarse[0];
    if let Some(w) = coarse.windows(2).find(|w| w[1] - w[0] <= DISTINCT_REL * range) {
        return Err(Error::IllPosedCoarseValues(w[0], w[1]));
    }

    let classes: Vec<Vec<usize>> = coarse
        .iter()
        .map(|u| (0..spec.dim()).filter(|&j| images[j] == *u).collect())
        .collect();
    let subspaces: Vec<Vec<ComplexVector>> = classes
        .iter()
        .map(|cls| cls.iter().map(|&j| spec.basis[j].clone()).collect())
        .collect();
    let projectors = subspaces
        .iter()
        .map(|vs| linalg::projector(vs))
        .collect::<Result<Vec<_>>>()?;
    let operator = weighted_projector_sum(&images, &spec.basis);

    Ok(CoarseGraining {
        name: spec.name.clone(),
        classes,
        values: coarse,
        subspaces,
        projectors,
        operator,
    })
}

/// A finite lookup table usable as the map `t`.
pub fn table_map(pairs: &[(f64, f64)]) -> impl Fn(f64) -> Option<f64> + '_ {
    move |v| pairs.iter().find(|(from, _)| *from == v).map(|(_, to)| *to)
}

/// True iff every eigenvalue gap of `a` exceeds `sep·‖a‖`.
pub fn is_maximally_accessible(a: &ComplexMatrix, sep: f64) -> Result<bool> {
    if !(sep > 0.0 && sep.is_finite()) {
        return Err(Error::InvalidTolerance(sep));
    }
    let eig = linalg::hermitian_eig(a)?;
    let threshold = sep * a.op_norm();
    Ok(eig.eigenvalues.windows(2).all(|w| w[1] - w[0] > threshold))
}

#[derive(Clone, Debug, Serialize)]
pub struct QuestionAnswerRecord {
    pub question: String,
    pub answer: f64,
    #[serde(serialize_with = "serialize_vectors")]
    pub subspace: Vec<ComplexVector>,
}

fn serialize_vectors<S: serde::Serializer>(vs: &[ComplexVector], s: S) -> std::result::Result<S::Ok, S::Error> {
    let raw: Vec<Vec<[f64; 2]>> = vs
        .iter()
        .map(|v| v.amplitudes().iter().map(|z| [z.re, z.im]).collect())
        .collect();
    raw.serialize(s)
}

pub fn interpret(cg: &CoarseGraining, i: usize) -> Result<QuestionAnswerRecord> {
    if i >= cg.classes.len() {
        return Err(Error::ClassIndexOutOfRange { index: i, count: cg.classes.len() });
    }
    Ok(QuestionAnswerRecord {
        question: format!("What is the value of {}?", cg.name),
        answer: cg.values[i],
        subspace: cg.subspaces[i].clone(),
    })
}

/// Deviations of a coarse graining from its defining identities.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct CoarseGrainingDeviations {
    pub completeness: f64,
    pub orthogonality: f64,
    pub eigenspace: f64,
    pub spectral_sum: f64,
}

pub fn coarse_graining_deviations(cg: &CoarseGraining) -> Result<CoarseGrainingDeviations> {
    let dim = cg.operator.dim();
    let mut total = ComplexMatrix::zeros(dim);
    let mut spectral = ComplexMatrix::zeros(dim);
    let mut out = CoarseGrainingDeviations::default();
    for (i, (p, u)) in cg.projectors.iter().zip(&cg.values).enumerate() {
        total = total.add(p)?;
        spectral = spectral.add(&p.scale(c(*u, 0.0)))?;
        let eig = cg.operator.mul(p)?.sub(&p.scale(c(*u, 0.0)))?.frobenius_norm();
        out.eigenspace = out.eigenspace.max(eig);
        for q in &cg.projectors[i + 1..] {
            out.orthogonality = out.orthogonality.max(p.mul(q)?.frobenius_norm());
        }
    }
    out.completeness = total.sub(&ComplexMatrix::identity(dim))?.frobenius_norm();
    out.spectral_sum = spectral.sub(&cg.operator)?.frobenius_norm();
    Ok(out)
}

/// Haar-random orthonormal basis from the eigenvectors of a random
/// Hermitian matrix.
pub fn random_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<ComplexVector>> {
    let g: Vec<_> = (0..dim).map(|_| crate::qubit::random_unit_vector(dim, rng)).collect();
    let mut h = ComplexMatrix::zeros(dim);
    for (k, v) in g.iter().enumerate() {
        h = h.add(&ComplexMatrix::outer(v, v)?.scale(c(k as f64 + 1.0, 0.0)))?;
    }
    Ok(linalg::hermitian_eig(&h)?.eigenvectors)
}

fn random_values<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    // Integer grid plus jitter keeps values well separated.
    let mut slots: Vec<i32> = (-20..20).collect();
    slots.shuffle(rng);
    let mut vs: Vec<f64> = slots[..count]
        .iter()
        .map(|&k| k as f64 + rng.random_range(-0.25..0.25))
        .collect();
    vs.sort_by(f64::total_cmp);
    vs
}

/// Random variables of dimension 2..=8 with random maps: each sample tests
/// a non-injective map and an injective relabeling.
pub fn verify_coarse_graining<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> Result<VerificationReport> {
    const SEP: f64 = 1e-6;
    let mut b = VerificationReport::builder(Subject::CoarseGrain);
    let mut worst = CoarseGrainingDeviations::default();
    let mut accessibility_mismatches = 0usize;
    for sample in 0..samples {
        let dim = rng.random_range(2..=8);
        let spec = EVariableSpec::new("theta", random_values(dim, rng), random_basis(dim, rng)?)?;

        let classes = rng.random_range(1..dim);
        let mut labels: Vec<usize> = (0..dim).map(|j| if j < classes { j } else { rng.random_range(0..classes) }).collect();
        labels.shuffle(rng);
        let coarse_values = random_values(classes, rng);
        let lumping: Vec<(f64, f64)> = spec.values().iter().zip(&labels).map(|(v, &l)| (*v, coarse_values[l])).collect();
        let relabel_values = random_values(dim, rng);
        let relabeling: Vec<(f64, f64)> = spec.values().iter().copied().zip(relabel_values).collect();

        for (pairs, injective) in [(&lumping, false), (&relabeling, true)] {
            let cg = coarse_grain(&spec, table_map(pairs))?;
            let dev = coarse_graining_deviations(&cg)?;
            let maximal = is_maximally_accessible(&cg.operator, SEP)?;
            worst.completeness = worst.completeness.max(dev.completeness);
            worst.orthogonality = worst.orthogonality.max(dev.orthogonality);
            worst.eigenspace = worst.eigenspace.max(dev.eigenspace);
            worst.spectral_sum = worst.spectral_sum.max(dev.spectral_sum);
            let ok = dev.completeness <= 1e-11
                && dev.orthogonality <= 1e-11
                && dev.eigenspace <= 1e-10
                && dev.spectral_sum <= 1e-11
                && maximal == injective;
            if maximal != injective {
                accessibility_mismatches += 1;
            }
            if !ok {
                b.witness(json!({
                    "sample": sample,
                    "dim": dim,
                    "injective": injective,
                    "maximally_accessible": maximal,
                    "deviations": dev,
                }));
            }
        }
    }
    b.metric("samples", samples as f64)
        .metric("max_completeness_deviation", worst.completeness)
        .metric("max_orthogonality_deviation", worst.orthogonality)
        .metric("max_eigenspace_deviation", worst.eigenspace)
        .metric("max_spectral_sum_deviation", worst.spectral_sum)
        .metric("accessibility_mismatches", accessibility_mismatches as f64);
    let verdict = crate::report::verdict_from_witnesses(&b);
    Ok(b.finish(verdict))
}
