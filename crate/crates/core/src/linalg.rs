//! Dense complex vectors and matrices for small Hilbert spaces.
//!
//! Matrices are stored row-major. Everything here is sized for the
//! dimensions this crate deals with (a few dozen at most), so the
//! Hermitian eigensolver is a plain cyclic Jacobi iteration.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for structural checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Norm deviation allowed before a vector is treated as non-unit.
pub const UNIT_TOL: f64 = 1e-8;

/// Eigenvalues closer than this (relative to `‖A‖`) form a degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 100;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    amps: Vec<C64>,
}

impl ComplexVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(i) = amps.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// The `k`-th standard basis vector of a `dim`-dimensional space.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amps = vec![C64::default(); dim];
        amps[k] = c(1.0, 0.0);
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        Self { amps: vec![C64::default(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(self.scale(c(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { amps: self.amps.iter().map(|z| z * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect(),
        })
    }

    /// Rotates the global phase so the largest-magnitude amplitude is real
    /// and positive. Magnitude ties (within 1e-12) go to the lowest index.
    pub fn phase_fixed(&self) -> Self {
        let mut best = 0;
        let mut best_mag = self.amps[0].norm();
        for (i, z) in self.amps.iter().enumerate().skip(1) {
            let mag = z.norm();
            if mag > best_mag + 1e-12 {
                best = i;
                best_mag = mag;
            }
        }
        if best_mag == 0.0 {
            return self.clone();
        }
        let rot = self.amps[best].conj() / best_mag;
        let mut amps: Vec<C64> = self.amps.iter().map(|z| z * rot).collect();
        amps[best] = c(best_mag, 0.0);
        Self { amps }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Result<C64> {
    check_dims(u.dim(), v.dim())?;
    Ok(u.amps.iter().zip(&v.amps).map(|(a, b)| a.conj() * b).sum())
}

/// True iff the unit vectors `u` and `v` span the same ray, i.e.
/// `|⟨u|v⟩| ≥ 1 − eps`.
pub fn phase_equal(u: &ComplexVector, v: &ComplexVector, eps: f64) -> Result<bool> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidTolerance(eps));
    }
    for w in [u, v] {
        if !w.is_unit() {
            return Err(Error::NotUnit { norm: w.norm() });
        }
    }
    Ok(inner(u, v)?.norm() >= 1.0 - eps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty);
        }
        if data.len() != dim * dim {
            return Err(Error::NotSquare { dim, len: data.len() });
        }
        if let Some(i) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let data: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        Self { dim, data: vec![C64::default(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_diagonal(&diag.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &ComplexVector, v: &ComplexVector) -> Result<Self> {
        check_dims(u.dim(), v.dim())?;
        let n = u.dim();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector { amps: (0..self.dim).map(|i| self[(i, j)]).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.dim, v.dim())?;
        Ok(ComplexVector {
            amps: (0..self.dim)
                .map(|i| self.row(i).iter().zip(&v.amps).map(|(a, b)| a * b).sum())
                .collect(),
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral norm, the largest singular value.
    pub fn op_norm(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("same dimension");
        // A^H A is Hermitian up to rounding; symmetrize before handing it on.
        let gram = gram
            .add(&gram.adjoint())
            .expect("same dimension")
            .scale(c(0.5, 0.0));
        let eig = jacobi(&gram);
        eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// `‖A − A†‖_F`
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * self.frobenius_norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `AB − BA`
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Orthogonal projector onto the span of orthonormal `vs`.
pub fn projector(vs: &[ComplexVector]) -> Result<ComplexMatrix> {
    let first = vs.first().ok_or(Error::Empty)?;
    let n = first.dim();
    for v in vs {
        check_dims(n, v.dim())?;
    }
    let deviation = orthonormality_deviation(vs)?;
    if deviation > DEFAULT_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    let mut p = ComplexMatrix::zeros(n);
    for v in vs {
        p = p.add(&ComplexMatrix::outer(v, v)?)?;
    }
    Ok(p)
}

/// Largest entry of `|G − I|` where `G` is the Gram matrix of `vs`.
pub fn orthonormality_deviation(vs: &[ComplexVector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, u) in vs.iter().enumerate() {
        for (j, v) in vs.iter().enumerate().skip(i) {
            let g = inner(u, v)?;
            let target = if i == j { c(1.0, 0.0) } else { C64::default() };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

/// Gram matrix `G_ij = ⟨v_i|v_j⟩`.
pub fn gram_matrix(vs: &[ComplexVector]) -> Result<ComplexMatrix> {
    let n = vs.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut g = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = inner(&vs[i], &vs[j])?;
        }
    }
    Ok(g)
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<ComplexVector>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ λᵢ |vᵢ⟩⟨vᵢ|`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let p = ComplexMatrix::outer(v, v).expect("same dimension");
            m = m.add(&p.scale(c(*lambda, 0.0))).expect("same dimension");
        }
        m
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvectors within a degenerate cluster come back as some orthonormal
/// basis of that cluster; no particular choice is guaranteed.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let deviation = a.hermitian_deviation();
    if deviation > DEFAULT_TOL * a.frobenius_norm() {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi(a))
}

// Cyclic Jacobi: each (p, q) rotation is a phase fix making a_pq real,
// followed by the classic real symmetric rotation.
fn jacobi(a: &ComplexMatrix) -> EigenDecomposition {
    let n = a.dim;
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = c(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Entry is negligible relative to both diagonal entries.
                if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    m[(p, q)] = C64::default();
                    m[(q, p)] = C64::default();
                    continue;
                }
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let g00 = c(cs, 0.0);
                let g01 = c(sn, 0.0);
                let g10 = phase.conj() * -sn;
                let g11 = phase.conj() * cs;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * g00 + mkq * g10;
                    m[(k, q)] = mkp * g01 + mkq * g11;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = g00.conj() * mpk + g10.conj() * mqk;
                    m[(q, k)] = g01.conj() * mpk + g11.conj() * mqk;
                }
                m[(p, q)] = C64::default();
                m[(q, p)] = C64::default();
                m[(p, p)] = c(m[(p, p)].re, 0.0);
                m[(q, q)] = c(m[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g00 + vkq * g10;
                    v[(k, q)] = vkp * g01 + vkq * g11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    EigenDecomposition {
        eigenvalues: order.iter().map(|&i| m[(i, i)].re).collect(),
        eigenvectors: order.iter().map(|&i| v.column(i)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).unwrap()
    }

    fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]]).unwrap()
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn inner_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let e1 = ComplexVector::basis(2, 1);
        assert_eq!(inner(&e0, &e1).unwrap(), c(0., 0.));

        let h = ComplexVector::from_real(&[r2(), r2()]).unwrap();
        assert!((inner(&h, &h).unwrap() - c(1., 0.)).norm() < 1e-15);

        let u = ComplexVector::new(vec![c(0., 1.), c(0., 0.)]).unwrap();
        assert_eq!(inner(&u, &e0).unwrap(), c(0., -1.));
    }

    #[test]
    fn inner_rejects_mismatched_dims() {
        let err = inner(&ComplexVector::basis(2, 0), &ComplexVector::basis(3, 0)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn phase_equal_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let i0 = ComplexVector::new(vec![c(0., 1.), c(0., 0.)]).unwrap();
        let e1 = ComplexVector::basis(2, 1);
        let h = ComplexVector::from_real(&[r2(), r2()]).unwrap();
        assert!(phase_equal(&e0, &i0, 1e-9).unwrap());
        assert!(!phase_equal(&e0, &e1, 1e-9).unwrap());
        assert!(!phase_equal(&e0, &h, 1e-9).unwrap());
        assert!((inner(&e0, &h).unwrap().norm() - r2()).abs() < 1e-15);
    }

    #[test]
    fn phase_equal_rejects_non_unit() {
        let v = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            phase_equal(&v, &v, 1e-9),
            Err(Error::NotUnit { .. })
        ));
        let e0 = ComplexVector::basis(2, 0);
        assert!(matches!(phase_equal(&e0, &e0, 0.0), Err(Error::InvalidTolerance(_))));
    }

    #[test]
    fn eig_diagonal() {
        let a = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let eig = hermitian_eig(&a).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert!(phase_equal(&eig.eigenvectors[0], &ComplexVector::basis(3, 1), 1e-12).unwrap());
    }

    #[test]
    fn eig_sigma_x() {
        let eig = hermitian_eig(&sigma_x()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        let minus = ComplexVector::from_real(&[r2(), -r2()]).unwrap();
        let plus = ComplexVector::from_real(&[r2(), r2()]).unwrap();
        assert!(phase_equal(&eig.eigenvectors[0], &minus, 1e-12).unwrap());
        assert!(phase_equal(&eig.eigenvectors[1], &plus, 1e-12).unwrap());
    }

    #[test]
    fn eig_identity() {
        let eig = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0; 4]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(0., 0.), c(0., 0.)]]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_complex_entries() {
        let a = sigma_y();
        let eig = hermitian_eig(&a).unwrap();
        for (lambda, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            let r = a.mul_vec(v).unwrap().sub(&v.scale(c(*lambda, 0.0))).unwrap();
            assert!(r.norm() < 1e-14);
        }
    }

    #[test]
    fn projector_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let e1 = ComplexVector::basis(2, 1);
        assert_eq!(projector(std::slice::from_ref(&e0)).unwrap(), ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
        assert_eq!(projector(&[e0, e1]).unwrap(), ComplexMatrix::identity(2));
        let h = ComplexVector::from_real(&[r2(), r2()]).unwrap();
        let p = projector(&[h]).unwrap();
        for z in p.entries() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn projector_rejects_non_orthonormal() {
        let e0 = ComplexVector::basis(2, 0);
        let h = ComplexVector::from_real(&[r2(), r2()]).unwrap();
        assert!(matches!(projector(&[e0, h]), Err(Error::NotOrthonormal { .. })));
        assert!(matches!(projector(&[]), Err(Error::Empty)));
    }

    #[test]
    fn commutator_examples() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diagonal(&[3.0, 4.0]);
        assert_eq!(commutator(&a, &a).unwrap(), ComplexMatrix::zeros(2));
        assert_eq!(commutator(&a, &b).unwrap(), ComplexMatrix::zeros(2));
        let xy = commutator(&sigma_x(), &sigma_y()).unwrap();
        assert_eq!(xy, sigma_z().scale(c(0.0, 2.0)));
        assert!(commutator(&a, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn phase_fixed_makes_largest_real_positive() {
        let v = ComplexVector::new(vec![c(0.0, 0.6), c(0.0, -0.8)]).unwrap();
        let f = v.phase_fixed();
        assert!((f[1] - c(0.8, 0.0)).norm() < 1e-15);
        assert!((f[0] - c(-0.6, 0.0)).norm() < 1e-15);

        // tie goes to the lowest index
        let t = ComplexVector::new(vec![c(0.0, r2()), c(-r2(), 0.0)]).unwrap().phase_fixed();
        assert_eq!(t[0].im, 0.0);
        assert!(t[0].re > 0.0);
    }

    #[test]
    fn op_norm_of_diagonal() {
        let a = ComplexMatrix::from_real_diagonal(&[-3.0, 1.0, 2.0]);
        assert!((a.op_norm() - 3.0).abs() < 1e-12);
    }
}
