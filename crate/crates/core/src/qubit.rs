//! Spin-½ geometry: Bloch directions and the SU(2) → SO(3) covering map.
//!
//! Pauli matrices here are `σ = 2J` for `j = ½` in the crate's ascending
//! basis `(|−½⟩, |+½⟩)`, so `σ_z = diag(−1, 1)` and `σ_y = [[0, i], [−i, 0]]`.
//! Using the same triple for the Bloch map and the covering map keeps
//! `bloch(Mv) = R(M)·bloch(v)` exact.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector, C64};
use crate::report::{Subject, Verdict, VerificationReport};
use crate::spin::{self, Direction, HalfInt, SpinSystem};

const UNIT_TOL: f64 = 1e-10;

pub fn pauli() -> [ComplexMatrix; 3] {
    let sys = SpinSystem::new(HalfInt::from_twice(1)).expect("spin one half");
    let ops = spin::angular_momentum_operators(&sys);
    let two = c(2.0, 0.0);
    [ops.jx.scale(two), ops.jy.scale(two), ops.jz.scale(two)]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rotation3([[f64; 3]; 3]);

impl Rotation3 {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = Self(m);
        let ortho = r.transpose().mul(&r).max_deviation(&Self::identity());
        if ortho > 1e-10 {
            return Err(Error::NotRotation(format!("RᵀR deviates from I by {ortho:e}")));
        }
        let det = r.det();
        if (det - 1.0).abs() > 1e-10 {
            return Err(Error::NotRotation(format!("det R = {det}")));
        }
        Ok(r)
    }

    pub fn identity() -> Self {
        Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Right-handed rotation by `angle` about `+z`.
    pub fn about_z(angle: f64) -> Self {
        let (s, co) = angle.sin_cos();
        Self([[co, -s, 0.0], [s, co, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Self(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.0[j][i];
            }
        }
        Self(out)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, x) in out.iter_mut().enumerate() {
            *x = (0..3).map(|k| self.0[i][k] * v[k]).sum();
        }
        out
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }
}

/// A 2×2 unitary with unit determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialUnitary2(ComplexMatrix);

impl SpecialUnitary2 {
    pub fn new(m: [[C64; 2]; 2]) -> Result<Self> {
        let mat = ComplexMatrix::from_rows(&[m[0].to_vec(), m[1].to_vec()])?;
        let unitarity = mat.adjoint().mul(&mat)?.sub(&ComplexMatrix::identity(2))?.max_abs();
        if unitarity > 1e-10 {
            return Err(Error::NotSpecialUnitary(format!("M†M deviates from I by {unitarity:e}")));
        }
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if (det - c(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::NotSpecialUnitary(format!("det M = {det}")));
        }
        Ok(Self(mat))
    }

    pub fn identity() -> Self {
        Self(ComplexMatrix::identity(2))
    }

    /// `q₀I − i(q₁σ_x + q₂σ_y + q₃σ_z)` for a unit quaternion `q`.
    pub fn from_quaternion(q: [f64; 4]) -> Result<Self> {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotSpecialUnitary(format!("quaternion norm {n}")));
        }
        let [sx, sy, sz] = pauli();
        let m = ComplexMatrix::identity(2)
            .scale(c(q[0], 0.0))
            .sub(&sx.scale(c(0.0, q[1])))?
            .sub(&sy.scale(c(0.0, q[2])))?
            .sub(&sz.scale(c(0.0, q[3])))?;
        Self::new([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
    }

    /// Haar-uniform, via a normalized Gaussian quaternion.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-6 {
                let q = q.map(|x| x / n);
                if let Ok(m) = Self::from_quaternion(q) {
                    return m;
                }
            }
        }
    }

    /// The element mapping `(1, 0)` to the unit vector `v`.
    pub fn taking_first_basis_to(v: &ComplexVector) -> Result<Self> {
        if v.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: v.dim() });
        }
        check_unit(v)?;
        let (a, b) = (v[0], v[1]);
        Self::new([[a, -b.conj()], [b, a.conj()]])
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0.mul(&other.0).expect("2x2"))
    }

    pub fn neg(&self) -> Self {
        Self(self.0.scale(c(-1.0, 0.0)))
    }
}

fn check_unit(v: &ComplexVector) -> Result<()> {
    let n = v.norm();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm: n });
    }
    Ok(())
}

/// Direction whose `+½` spin state is the ray of `v`: `a_k = ⟨v|σ_k|v⟩`.
pub fn bloch_direction(v: &ComplexVector) -> Result<Direction> {
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: v.dim() });
    }
    check_unit(v)?;
    let [x, y, z] = pauli().map(|s| {
        let sv = s.mul_vec(v).expect("2x2");
        linalg::inner(v, &sv).expect("same dimension").re
    });
    Direction::normalize_near_unit(x, y, z, 1e-9)
}

/// `R_kl = ½ tr(σ_k M σ_l M†)`
pub fn su2_to_so3(m: &SpecialUnitary2) -> Result<Rotation3> {
    let sigma = pauli();
    let mat = m.matrix();
    let adj = mat.adjoint();
    let mut r = [[0.0; 3]; 3];
    for (k, sk) in sigma.iter().enumerate() {
        for (l, sl) in sigma.iter().enumerate() {
            let t = sk.mul(mat)?.mul(sl)?.mul(&adj)?.trace() * 0.5;
            if t.im.abs() > 1e-12 {
                return Err(Error::NotSpecialUnitary(format!("non-real rotation entry {t}")));
            }
            r[k][l] = t.re;
        }
    }
    Rotation3::new(r)
}

/// Uniform on rays: a normalized vector of independent standard complex
/// Gaussians.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let v = ComplexVector::new(amps).expect("finite samples");
        if v.norm() > 1e-6 {
            return v.normalized().expect("non-zero");
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop2Check {
    pub direction: Direction,
    /// `1 − |⟨a;+½|v⟩|`
    pub overlap_deficit: f64,
    /// `|R(M)·a₀ − a|` with `M(1,0) = v` and `a₀ = bloch((1,0))`.
    pub covering_deviation: f64,
    pub pass: bool,
}

/// Reconstructs `v` as the `+½` state along its Bloch direction, and
/// checks that the covering-map route lands on the same direction.
pub fn check_prop2_vector(v: &ComplexVector, eps: f64) -> Result<Prop2Check> {
    let sys = SpinSystem::new(HalfInt::from_twice(1))?;
    let direction = bloch_direction(v)?;
    let state = spin::eigenstate_recursion(&sys, &direction, HalfInt::from_twice(1))?;
    let overlap = linalg::inner(&state.ket, v)?.norm();
    let pass = linalg::phase_equal(&state.ket, &v.normalized()?, eps)?;

    let reference = bloch_direction(&ComplexVector::basis(2, 0))?;
    let rotation = su2_to_so3(&SpecialUnitary2::taking_first_basis_to(v)?)?;
    let mapped = rotation.apply(reference.components());
    let covering_deviation = mapped
        .iter()
        .zip(direction.components())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    Ok(Prop2Check {
        direction,
        overlap_deficit: (1.0 - overlap).max(0.0),
        covering_deviation,
        pass,
    })
}

/// Samples random unit 2-vectors and checks each one is reproduced by a
/// question-and-answer state.
pub fn verify_prop2<R: Rng + ?Sized>(samples: usize, eps: f64, rng: &mut R) -> Result<VerificationReport> {
    let mut b = VerificationReport::builder(Subject::Prop2);
    let mut passes = 0usize;
    let mut worst_deficit: f64 = 0.0;
    let mut worst_covering: f64 = 0.0;
    for i in 0..samples {
        let v = random_unit_vector(2, rng);
        let check = check_prop2_vector(&v, eps)?;
        worst_deficit = worst_deficit.max(check.overlap_deficit);
        worst_covering = worst_covering.max(check.covering_deviation);
        if check.pass && check.covering_deviation <= 1e-9 {
            passes += 1;
        } else {
            b.witness(json!({
                "sample": i,
                "vector": v.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "direction": check.direction,
                "overlap_deficit": check.overlap_deficit,
                "covering_deviation": check.covering_deviation,
            }));
        }
    }
    b.metric("samples", samples as f64)
        .metric("passes", passes as f64)
        .metric("eps", eps)
        .metric("worst_overlap_deficit", worst_deficit)
        .metric("worst_covering_deviation", worst_covering);
    let verdict = if passes == samples { Verdict::Pass } else { Verdict::Fail };
    Ok(b.finish(verdict))
}

/// `verify_prop2` plus the covering-map checks: homomorphism law on
/// `pairs` random pairs within 1e-10 and `R(±I) = I` within 1e-12.
pub fn verify_prop2_with_covering<R: Rng + ?Sized>(
    samples: usize,
    pairs: usize,
    eps: f64,
    rng: &mut R,
) -> Result<VerificationReport> {
    let mut report = verify_prop2(samples, eps, rng)?;
    let (hom, kernel) = verify_covering_map(pairs, rng)?;
    report.metrics.insert("covering_pairs".into(), pairs as f64);
    report.metrics.insert("max_homomorphism_deviation".into(), hom);
    report.metrics.insert("kernel_deviation".into(), kernel);
    if hom > 1e-10 || kernel > 1e-12 {
        report.verdict = Verdict::Fail;
        report.witnesses.push(json!({ "check": "covering_map", "homomorphism": hom, "kernel": kernel }));
    }
    Ok(report)
}

/// Checks the covering map on random pairs: homomorphism law and the
/// kernel `{±I}`.
pub fn verify_covering_map<R: Rng + ?Sized>(pairs: usize, rng: &mut R) -> Result<(f64, f64)> {
    let mut worst_hom: f64 = 0.0;
    for _ in 0..pairs {
        let m1 = SpecialUnitary2::random(rng);
        let m2 = SpecialUnitary2::random(rng);
        let lhs = su2_to_so3(&m1.mul(&m2))?;
        let rhs = su2_to_so3(&m1)?.mul(&su2_to_so3(&m2)?);
        worst_hom = worst_hom.max(lhs.max_deviation(&rhs));
    }
    let id = SpecialUnitary2::identity();
    let kernel = su2_to_so3(&id)?
        .max_deviation(&Rotation3::identity())
        .max(su2_to_so3(&id.neg())?.max_deviation(&Rotation3::identity()));
    Ok((worst_hom, kernel))
}
