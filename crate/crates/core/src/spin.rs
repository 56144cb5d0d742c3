//! Angular momentum operators and their question-and-answer eigenstates.
//!
//! Basis order is `m` ascending, `|−j⟩` first. `J⁺|m⟩ = A_m|m+1⟩` and
//! `J⁻|m⟩ = B_m|m−1⟩` with the Condon–Shortley coefficients
//!
//! ```text
//! A_m = √((j−m)(j+m+1)),   B_m = √((j+m)(j−m+1))
//! ```
//!
//! Writing `|v⟩ = Σ b_m |m⟩` and `J_a = a₁J_x + a₂J_y + a₃J_z`, the eigenvalue
//! equation `J_a|v⟩ = h|v⟩` is the three-term relation
//!
//! ```text
//! ½(a₁+ia₂) B_{m+1} b_{m+1} = (h − a₃m) b_m − ½(a₁−ia₂) A_{m−1} b_{m−1}
//! ```
//!
//! which [`eigenstate_recursion`] solves upward from `b_{−j} = 1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector, C64};

/// Below this `|a₁ + ia₂|` the direction is treated as a pole of the sphere.
pub const POLE_THRESHOLD: f64 = 1e-8;

/// Required accuracy of `‖J_a v − h v‖` for a constructed state.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Bound on the closing relation at `m = j` after normalization.
pub const CLOSING_RESIDUAL_TOL: f64 = 1e-8;

/// Largest `j` the recursion is offered for.
pub const MAX_TWICE_J: u32 = 50;

/// A half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        let rounded = twice.round();
        if !x.is_finite() || (twice - rounded).abs() > 1e-9 || rounded.abs() > i32::MAX as f64 {
            return Err(Error::InvalidSpin(format!("{x} is not a half-integer")));
        }
        Ok(Self(rounded as i32))
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts decimals (`1.5`) and fractions (`3/2`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpin(s.to_string()))?;
            return match den.trim() {
                "2" => Ok(Self(num)),
                "1" => Ok(Self(2 * num)),
                _ => Err(Error::InvalidSpin(s.to_string())),
            };
        }
        let x: f64 = s.parse().map_err(|_| Error::InvalidSpin(s.to_string()))?;
        Self::from_f64(x)
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let x = f64::deserialize(deserializer)?;
        Self::from_f64(x).map_err(serde::de::Error::custom)
    }
}

/// Spin `j` with its `2j+1`-dimensional Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinSystem {
    j: HalfInt,
}

impl SpinSystem {
    pub fn new(j: HalfInt) -> Result<Self> {
        if j.twice() < 1 {
            return Err(Error::InvalidSpin(format!("j = {j} must be at least 1/2")));
        }
        if j.twice() as u32 > MAX_TWICE_J {
            return Err(Error::InvalidSpin(format!("j = {j} exceeds the supported maximum 25")));
        }
        Ok(Self { j })
    }

    pub fn from_f64(j: f64) -> Result<Self> {
        Self::new(HalfInt::from_f64(j)?)
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.twice() as usize + 1
    }

    /// `−j, −j+1, …, j`
    pub fn m_values(&self) -> impl Iterator<Item = HalfInt> + '_ {
        (0..self.dim() as i32).map(move |k| HalfInt(2 * k - self.j.twice()))
    }

    /// Basis position of `m`.
    pub fn index_of(&self, m: HalfInt) -> Result<usize> {
        let tj = self.j.twice();
        if m.twice() < -tj || m.twice() > tj || (m.twice() - tj) % 2 != 0 {
            return Err(Error::QuantumNumberOutOfRange {
                j: self.j.to_string(),
                value: m.to_string(),
            });
        }
        Ok(((m.twice() + tj) / 2) as usize)
    }

    fn m_at(&self, index: usize) -> f64 {
        index as f64 - self.j.value()
    }
}

/// Unit vector `a` on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Direction([f64; 3]);

impl Direction {
    pub const Z: Direction = Direction([0.0, 0.0, 1.0]);

    /// Requires `|a| = 1` within 1e-12.
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let norm = (a1 * a1 + a2 * a2 + a3 * a3).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self([a1, a2, a3]))
    }

    /// Rescales `(x, y, z)` onto the sphere if its norm is within `tol` of 1.
    pub fn normalize_near_unit(x: f64, y: f64, z: f64, tol: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self([x / norm, y / norm, z / norm]))
    }

    /// Uniform on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm > 1e-6 {
                return Self([v[0] / norm, v[1] / norm, v[2] / norm]);
            }
        }
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn neg(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }

    /// Angle to `other` in radians.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    fn transverse(&self) -> C64 {
        c(self.0[0], self.0[1])
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(deserializer)?;
        Direction::new(x, y, z).map_err(serde::de::Error::custom)
    }
}

/// The ket `|a;h⟩`: the question "what is the spin component along `a`?"
/// answered with `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuestionAnswerState {
    pub system: SpinSystem,
    pub direction: Direction,
    pub answer: HalfInt,
    pub ket: ComplexVector,
}

/// Returns `(A_m, B_m)`.
pub fn ladder_coefficients(sys: &SpinSystem, m: HalfInt) -> Result<(f64, f64)> {
    sys.index_of(m)?;
    let j = sys.j().value();
    let m = m.value();
    let raise = ((j - m) * (j + m + 1.0)).max(0.0).sqrt();
    let lower = ((j + m) * (j - m + 1.0)).max(0.0).sqrt();
    Ok((raise, lower))
}

fn raise_at(sys: &SpinSystem, index: usize) -> f64 {
    let j = sys.j().value();
    let m = sys.m_at(index);
    ((j - m) * (j + m + 1.0)).max(0.0).sqrt()
}

fn lower_at(sys: &SpinSystem, index: usize) -> f64 {
    let j = sys.j().value();
    let m = sys.m_at(index);
    ((j + m) * (j - m + 1.0)).max(0.0).sqrt()
}

#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
}

impl SpinOperators {
    /// `J_x² + J_y² + J_z²`
    pub fn casimir(&self) -> ComplexMatrix {
        let sq = |m: &ComplexMatrix| m.mul(m).expect("same dimension");
        sq(&self.jx)
            .add(&sq(&self.jy))
            .and_then(|s| s.add(&sq(&self.jz)))
            .expect("same dimension")
    }
}

pub fn raising_operator(sys: &SpinSystem) -> ComplexMatrix {
    let d = sys.dim();
    let mut jp = ComplexMatrix::zeros(d);
    for k in 0..d - 1 {
        jp[(k + 1, k)] = c(raise_at(sys, k), 0.0);
    }
    jp
}

pub fn lowering_operator(sys: &SpinSystem) -> ComplexMatrix {
    let d = sys.dim();
    let mut jm = ComplexMatrix::zeros(d);
    for k in 1..d {
        jm[(k - 1, k)] = c(lower_at(sys, k), 0.0);
    }
    jm
}

/// `J_x = (J⁺+J⁻)/2`, `J_y = (J⁺−J⁻)/2i`, `J_z = diag(−j, …, j)`.
pub fn angular_momentum_operators(sys: &SpinSystem) -> SpinOperators {
    let jp = raising_operator(sys);
    let jm = lowering_operator(sys);
    let jx = jp.add(&jm).expect("same dimension").scale(c(0.5, 0.0));
    let jy = jp.sub(&jm).expect("same dimension").scale(c(0.0, -0.5));
    let diag: Vec<f64> = (0..sys.dim()).map(|k| sys.m_at(k)).collect();
    SpinOperators { jx, jy, jz: ComplexMatrix::from_real_diagonal(&diag) }
}

/// `J_a = a₁J_x + a₂J_y + a₃J_z`
pub fn component_operator(sys: &SpinSystem, a: &Direction) -> ComplexMatrix {
    let ops = angular_momentum_operators(sys);
    let [a1, a2, a3] = a.components();
    ops.jx
        .scale(c(a1, 0.0))
        .add(&ops.jy.scale(c(a2, 0.0)))
        .and_then(|s| s.add(&ops.jz.scale(c(a3, 0.0))))
        .expect("same dimension")
}

/// How a recursion state was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `|a₁ + ia₂|` below [`POLE_THRESHOLD`]; the `J_z` eigenbasis is used.
    Pole,
    /// Upward recursion from `b_{−j} = 1`.
    Recursion,
    /// Upward recursion spliced with the same relation run downward from
    /// `b_j = 1`, used when the upward pass alone loses accuracy.
    TwoSided,
}

#[derive(Clone, Copy, Debug)]
pub struct RecursionInfo {
    pub construction: Construction,
    /// `|(h − a₃j) b_j − ½(a₁−ia₂) A_{j−1} b_{j−1}|` of the normalized
    /// upward recursion.
    pub closing_residual: f64,
    /// `‖J_a v − h v‖` of the returned state.
    pub residual: f64,
}

/// Recursion coefficients stored as `b_k = mantissa_k · e^{log_scale_k}`,
/// so passes that grow by many orders of magnitude neither overflow nor
/// flush their small end to zero.
#[derive(Clone, Debug)]
pub struct ScaledCoefficients {
    mantissas: Vec<C64>,
    log_scales: Vec<f64>,
}

impl ScaledCoefficients {
    fn len(&self) -> usize {
        self.mantissas.len()
    }

    fn log_abs(&self, k: usize) -> f64 {
        self.mantissas[k].norm().ln() + self.log_scales[k]
    }

    fn max_log(&self) -> f64 {
        (0..self.len())
            .map(|k| self.log_abs(k))
            .filter(|x| x.is_finite())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Normalized vector, or `None` if every coefficient vanished.
    pub fn to_unit_vector(&self) -> Option<ComplexVector> {
        let top = self.max_log();
        if !top.is_finite() {
            return None;
        }
        let amps = (0..self.len())
            .map(|k| self.mantissas[k] * (self.log_scales[k] - top).exp())
            .collect();
        ComplexVector::new(amps).ok()?.normalized().ok()
    }
}

struct PassScale {
    log_scale: f64,
}

impl PassScale {
    const LIMIT: f64 = 1e100;

    // Shrinks the two working coefficients together when the newest grows large.
    fn settle(&mut self, newest: &mut C64, previous: &mut C64) {
        if newest.norm() > Self::LIMIT {
            *newest /= Self::LIMIT;
            *previous /= Self::LIMIT;
            self.log_scale += Self::LIMIT.ln();
        }
    }
}

/// The upward recursion seeded with `b_{−j} = 1`.
///
/// Returns the coefficients and the closing residual at `m = j` measured on
/// the normalized vector. Requires `|a₁ + ia₂| ≥` [`POLE_THRESHOLD`].
pub fn upward_coefficients(sys: &SpinSystem, a: &Direction, h: HalfInt) -> Result<(ScaledCoefficients, f64)> {
    sys.index_of(h)?;
    let t = a.transverse();
    if t.norm() < POLE_THRESHOLD {
        return Err(Error::InvalidDirection { norm: t.norm() });
    }
    let d = sys.dim();
    let a3 = a.components()[2];
    let h = h.value();
    let half_up = t * 0.5;
    let half_down = t.conj() * 0.5;

    let mut out = ScaledCoefficients { mantissas: vec![c(1.0, 0.0)], log_scales: vec![0.0] };
    let mut scale = PassScale { log_scale: 0.0 };
    let mut prev = C64::default();
    let mut cur = c(1.0, 0.0);
    for k in 0..d - 1 {
        let below = if k == 0 { C64::default() } else { half_down * raise_at(sys, k - 1) * prev };
        let mut next = (cur * (h - a3 * sys.m_at(k)) - below) / (half_up * lower_at(sys, k + 1));
        scale.settle(&mut next, &mut cur);
        out.mantissas.push(next);
        out.log_scales.push(scale.log_scale);
        prev = cur;
        cur = next;
    }
    let top = d - 1;
    let below = if top == 0 { C64::default() } else { half_down * raise_at(sys, top - 1) * prev };
    let closing = (cur * (h - a3 * sys.m_at(top)) - below).norm();

    let max_log = out.max_log();
    let norm = (0..d)
        .map(|k| (2.0 * (out.log_abs(k) - max_log)).exp())
        .sum::<f64>()
        .sqrt();
    let closing = closing * (scale.log_scale - max_log).exp() / norm;
    Ok((out, closing))
}

/// The same relation run downward from `b_j = 1`.
fn downward_coefficients(sys: &SpinSystem, a: &Direction, h: f64) -> ScaledCoefficients {
    let d = sys.dim();
    let t = a.transverse();
    let a3 = a.components()[2];
    let half_up = t * 0.5;
    let half_down = t.conj() * 0.5;

    let mut mantissas = vec![C64::default(); d];
    let mut log_scales = vec![0.0; d];
    mantissas[d - 1] = c(1.0, 0.0);
    let mut scale = PassScale { log_scale: 0.0 };
    let mut prev = C64::default();
    let mut cur = c(1.0, 0.0);
    for k in (1..d).rev() {
        let above = if k == d - 1 { C64::default() } else { half_up * lower_at(sys, k + 1) * prev };
        let mut next = (cur * (h - a3 * sys.m_at(k)) - above) / (half_down * raise_at(sys, k - 1));
        scale.settle(&mut next, &mut cur);
        mantissas[k - 1] = next;
        log_scales[k - 1] = scale.log_scale;
        prev = cur;
        cur = next;
    }
    ScaledCoefficients { mantissas, log_scales }
}

// Each pass is accurate while its coefficients grow, so the splice point
// is the index whose spliced vector best satisfies the eigenvalue equation.
fn splice(op: &ComplexMatrix, h: f64, up: &ScaledCoefficients, down: &ScaledCoefficients) -> Option<ComplexVector> {
    let d = up.len();
    let mut candidates = vec![up.clone(), down.clone()];
    for p in 0..d - 1 {
        if up.mantissas[p].norm() == 0.0 || down.mantissas[p].norm() == 0.0 {
            continue;
        }
        let ratio = up.mantissas[p] / down.mantissas[p];
        let shift = up.log_scales[p] - down.log_scales[p];
        let mut joined = up.clone();
        for k in p + 1..d {
            joined.mantissas[k] = down.mantissas[k] * ratio;
            joined.log_scales[k] = down.log_scales[k] + shift;
        }
        candidates.push(joined);
    }
    candidates
        .iter()
        .filter_map(ScaledCoefficients::to_unit_vector)
        .map(|v| (eigen_residual(op, &v, h), v))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, v)| v)
}

fn eigen_residual(op: &ComplexMatrix, v: &ComplexVector, h: f64) -> f64 {
    op.mul_vec(v)
        .and_then(|w| w.sub(&v.scale(c(h, 0.0))))
        .map(|r| r.norm())
        .unwrap_or(f64::INFINITY)
}

fn pole_state(sys: &SpinSystem, op: &ComplexMatrix, a: &Direction, h: HalfInt) -> Result<ComplexVector> {
    // J_a = ±J_z at the poles, so the eigenvector for h is |±h⟩. Off the
    // exact pole the transverse part is added to first order; the
    // denominators are J_z gaps of size ≈ 1, leaving an O(|a₁+ia₂|²) error.
    let m = if a.components()[2] >= 0.0 { h } else { h.neg() };
    let k = sys.index_of(m)?;
    let diag = |i: usize| op[(i, i)].re;
    let mut amps: Vec<C64> = (0..sys.dim())
        .map(|l| match op[(l, k)] {
            _ if l == k => c(1.0, 0.0),
            z if z == C64::default() => C64::default(),
            z => z / (diag(k) - diag(l)),
        })
        .collect();
    if amps.iter().any(|z| !z.is_finite()) {
        amps = ComplexVector::basis(sys.dim(), k).into_amplitudes();
    }
    ComplexVector::new(amps)?.normalized()
}

/// Builds `|a;h⟩` from the ladder-operator recursion.
pub fn eigenstate_recursion(sys: &SpinSystem, a: &Direction, h: HalfInt) -> Result<QuestionAnswerState> {
    eigenstate_recursion_with_info(sys, a, h).map(|(s, _)| s)
}

pub fn eigenstate_recursion_with_info(
    sys: &SpinSystem,
    a: &Direction,
    h: HalfInt,
) -> Result<(QuestionAnswerState, RecursionInfo)> {
    sys.index_of(h)?;
    let op = component_operator(sys, a);
    let state = |ket: ComplexVector| QuestionAnswerState {
        system: *sys,
        direction: *a,
        answer: h,
        ket,
    };

    if a.transverse().norm() < POLE_THRESHOLD {
        let ket = pole_state(sys, &op, a, h)?.phase_fixed();
        let residual = eigen_residual(&op, &ket, h.value());
        let info = RecursionInfo { construction: Construction::Pole, closing_residual: 0.0, residual };
        return Ok((state(ket), info));
    }

    let (up, closing_residual) = upward_coefficients(sys, a, h)?;
    if let Some(ket) = up.to_unit_vector() {
        let ket = ket.phase_fixed();
        let residual = eigen_residual(&op, &ket, h.value());
        // The upward pass alone is kept when it clears the contract with margin.
        if closing_residual <= CLOSING_RESIDUAL_TOL && residual <= 0.1 * EIGEN_RESIDUAL_TOL {
            let info = RecursionInfo { construction: Construction::Recursion, closing_residual, residual };
            return Ok((state(ket), info));
        }
    }

    let down = downward_coefficients(sys, a, h.value());
    let ket = splice(&op, h.value(), &up, &down)
        .ok_or(Error::RecursionFailed {
            direction: a.components(),
            h: h.to_string(),
            residual: f64::INFINITY,
        })?
        .phase_fixed();
    let residual = eigen_residual(&op, &ket, h.value());
    if residual > EIGEN_RESIDUAL_TOL {
        return Err(Error::RecursionFailed {
            direction: a.components(),
            h: h.to_string(),
            residual,
        });
    }
    let info = RecursionInfo { construction: Construction::TwoSided, closing_residual, residual };
    Ok((state(ket), info))
}

/// Builds `|a;h⟩` by diagonalizing `J_a` directly.
pub fn eigenstate_oracle(sys: &SpinSystem, a: &Direction, h: HalfInt) -> Result<QuestionAnswerState> {
    sys.index_of(h)?;
    let target = h.value();
    let eig = linalg::hermitian_eig(&component_operator(sys, a))?;
    let mut nearest: Option<(usize, f64)> = None;
    let mut matches = 0;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        let gap = (lambda - target).abs();
        if gap <= 1e-8 {
            matches += 1;
        }
        if nearest.is_none_or(|(_, g)| gap < g) {
            nearest = Some((i, gap));
        }
    }
    let (index, gap) = nearest.expect("non-empty spectrum");
    if matches > 1 {
        return Err(Error::AmbiguousEigenvalue(target));
    }
    if gap > 1e-8 {
        return Err(Error::NoMatchingEigenvalue {
            target,
            closest: eig.eigenvalues[index],
        });
    }
    Ok(QuestionAnswerState {
        system: *sys,
        direction: *a,
        answer: h,
        ket: eig.eigenvectors[index].phase_fixed(),
    })
}

/// Every `|a;h⟩` for the given directions, directions outer and `h`
/// ascending inner.
pub fn state_catalog(sys: &SpinSystem, dirs: &[Direction]) -> Result<Vec<QuestionAnswerState>> {
    let mut out = Vec::with_capacity(dirs.len() * sys.dim());
    for a in dirs {
        for h in sys.m_values() {
            out.push(eigenstate_recursion(sys, a, h)?);
        }
    }
    Ok(out)
}

/// `|⟨s|t⟩|²`
pub fn transition_probability(s: &QuestionAnswerState, t: &QuestionAnswerState) -> Result<f64> {
    Ok(linalg::inner(&s.ket, &t.ket)?.norm_sqr().min(1.0))
}
