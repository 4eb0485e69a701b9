//! Dense complex linear algebra for the 2-, 4- and 16-dimensional operators
//! used throughout the crate.
//!
//! Storage and the basic arithmetic are delegated to `nalgebra`; the Hermitian
//! eigensolver is a cyclic complex Jacobi iteration, which is unconditionally
//! stable for the tiny matrices seen here.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Vector3};
pub use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used by [`CMatrix::herm_eig`] to accept its input.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

/// Complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector(DVector<C64>);

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        CMatrix(DMatrix::identity(dim, dim))
    }

    /// Builds a `dim x dim` matrix from entries in row-major order.
    ///
    /// Panics if `entries.len() != dim * dim`.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "expected {} entries", dim * dim);
        CMatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.0[(i, i)] = C64::new(*d, 0.0);
        }
        m
    }

    /// Block matrix `[[a, b], [c, d]]` from four equally sized blocks.
    pub fn from_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Self {
        let n = a.dim();
        assert!(b.dim() == n && c.dim() == n && d.dim() == n);
        let mut m = Self::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                m.0[(i, j)] = a.0[(i, j)];
                m.0[(i, j + n)] = b.0[(i, j)];
                m.0[(i + n, j)] = c.0[(i, j)];
                m.0[(i + n, j + n)] = d.0[(i, j)];
            }
        }
        m
    }

    pub fn from_inner(inner: DMatrix<C64>) -> Self {
        assert!(inner.is_square());
        CMatrix(inner)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        self.0.transpose().iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        CMatrix(self.0.map(|z| z * factor))
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        CMatrix(self.0.map(|z| z * factor))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A[i][j] - conj(A[j][i])|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.dim(), v.dim());
        CVector(&self.0 * &v.0)
    }

    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        check_dims(self, rhs)?;
        Ok(CMatrix(&self.0 * &rhs.0))
    }

    /// General inverse via LU with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        self.0
            .clone()
            .try_inverse()
            .map(CMatrix)
            .ok_or(Error::SingularMatrix)
    }

    /// Hermitian eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back in ascending order. Every eigenvector is scaled
    /// so that its first non-negligible component is real and positive.
    pub fn herm_eig(&self) -> Result<HermitianEigen> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITIAN_INPUT_TOL {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(jacobi_eigen(&self.0))
    }
}

fn check_dims(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix(a.0.kronecker(&b.0))
}

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_dims(a, b)?;
    Ok(CMatrix(&a.0 * &b.0 - &b.0 * &a.0))
}

/// `AB + BA`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_dims(a, b)?;
    Ok(CMatrix(&a.0 * &b.0 + &b.0 * &a.0))
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: CMatrix) -> CMatrix {
        CMatrix(self.0 + rhs.0)
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: CMatrix) -> CMatrix {
        CMatrix(self.0 - rhs.0)
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        CMatrix(self.0 * rhs.0)
    }
}

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        CVector(DVector::zeros(dim))
    }

    pub fn from_slice(entries: &[C64]) -> Self {
        CVector(DVector::from_column_slice(entries))
    }

    pub fn from_real(entries: &[f64]) -> Self {
        CVector(DVector::from_iterator(
            entries.len(),
            entries.iter().map(|x| C64::new(*x, 0.0)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> C64 {
        self.0[i]
    }

    pub fn entries(&self) -> Vec<C64> {
        self.0.iter().copied().collect()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        CVector(self.0.map(|z| z * factor))
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        CVector(self.0.map(|z| z * factor))
    }

    /// Unit vector along `self`; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scale(1.0 / n))
    }

    /// Multiplies by the unit phase that makes the first entry with modulus
    /// above `tol` real and positive.
    pub fn with_canonical_phase(&self, tol: f64) -> Self {
        match self.0.iter().find(|z| z.norm() > tol) {
            Some(z) => {
                let norm = z.norm();
                let mut out = self.scale_complex(z.conj() / norm);
                let k = self.0.iter().position(|w| w.norm() > tol).expect("found above");
                out.0[k] = C64::new(norm, 0.0);
                out
            }
            None => self.clone(),
        }
    }

    /// `max_i |self_i - other_i|`.
    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn kron(&self, other: &CVector) -> CVector {
        CVector(self.0.kronecker(&other.0))
    }

    /// Distance between `self` and `other` after removing the relative
    /// global phase. Both vectors are assumed normalized.
    pub fn distance_up_to_phase(&self, other: &CVector) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.scale_complex(phase).max_abs_diff(other)
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        CVector(&self.0 + &rhs.0)
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        CVector(&self.0 - &rhs.0)
    }
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<CVector>,
}

impl HermitianEigen {
    /// Unitary whose columns are the eigenvectors.
    pub fn unitary(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut u = CMatrix::zeros(n);
        for (k, v) in self.eigenvectors.iter().enumerate() {
            for i in 0..n {
                u.0[(i, k)] = v.get(i);
            }
        }
        u
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;
const PHASE_TOL: f64 = 1e-12;

fn off_diagonal_norm2(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi_eigen(input: &DMatrix<C64>) -> HermitianEigen {
    let n = input.nrows();
    // symmetrize so rounding in the input cannot leak into the rotations
    let mut a = DMatrix::from_fn(n, n, |i, j| (input[(i, j)] + input[(j, i)].conj()) * 0.5);
    let mut v = DMatrix::<C64>::identity(n, n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm2(&a) <= scale * f64::EPSILON * f64::EPSILON {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // phase rotation makes a[p][q] real, then a real Jacobi rotation kills it
                let e_neg = (apq / r).conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = e_neg * (-s);
                let g_qq = e_neg * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| CVector(v.column(i).into_owned()).with_canonical_phase(PHASE_TOL))
        .collect();
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Pauli matrices `(σx, σy, σz)`.
pub fn pauli() -> [CMatrix; 3] {
    [
        CMatrix::from_row_major(2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_major(2, &[ZERO, -I, I, ZERO]),
        CMatrix::from_row_major(2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// `Σ_k v_k M_k` for a triple of matrices.
pub fn dot_real(v: &Vector3<f64>, mats: &[CMatrix; 3]) -> CMatrix {
    let mut out = CMatrix::zeros(mats[0].dim());
    for k in 0..3 {
        out = out + mats[k].scale(v[k]);
    }
    out
}

/// `v·σ`.
pub fn sigma_dot(v: &Vector3<f64>) -> CMatrix {
    dot_real(v, &pauli())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.0[(i, i)] = c(rng.gen_range(-2.0..2.0), 0.0);
            for j in (i + 1)..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m.0[(i, j)] = z;
                m.0[(j, i)] = z.conj();
            }
        }
        m
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let entries: Vec<C64> = (0..n * n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        CMatrix::from_row_major(n, &entries)
    }

    #[test]
    fn kron_identities() {
        let [sx, _, sz] = pauli();
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        assert_eq!(
            kron(&sz, &CMatrix::identity(2)),
            CMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0])
        );
        let v = kron(&sx, &sx).apply(&CVector::from_real(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(v, CVector::from_real(&[0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn kron_acts_factorwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 2);
        let b = random_matrix(&mut rng, 4);
        let u = CVector::from_slice(&[c(0.3, -1.0), c(2.0, 0.5)]);
        let w = CVector::from_slice(&[c(1.0, 0.0), c(0.0, 1.0), c(-0.5, 0.2), c(0.1, 0.1)]);
        let lhs = kron(&a, &b).apply(&u.kron(&w));
        let rhs = a.apply(&u).kron(&b.apply(&w));
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        assert_eq!(kron(&a, &b).dim(), 8);
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 2);
        let b = random_matrix(&mut rng, 2);
        let cm = random_matrix(&mut rng, 4);
        assert!(kron(&kron(&a, &b), &cm).max_abs_diff(&kron(&a, &kron(&b, &cm))) < 1e-15);
    }

    #[test]
    fn kron_is_exactly_associative_on_integer_entries() {
        let int = |seed: i32, n: usize| {
            let entries: Vec<C64> = (0..(n * n) as i32)
                .map(|k| C64::new(((k * 7 + seed) % 5 - 2) as f64, ((k * 3 + seed) % 7 - 3) as f64))
                .collect();
            CMatrix::from_row_major(n, &entries)
        };
        let (a, b, cm) = (int(1, 2), int(2, 3), int(3, 2));
        assert_eq!(kron(&kron(&a, &b), &cm), kron(&a, &kron(&b, &cm)));
    }

    #[test]
    fn commutator_pauli_algebra() {
        let [sx, sy, sz] = pauli();
        let lhs = commutator(&sx, &sy).unwrap();
        assert_eq!(lhs, sz.scale_complex(c(0.0, 2.0)));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 4);
        assert_eq!(commutator(&CMatrix::identity(4), &a).unwrap().max_abs(), 0.0);
        let a2 = &a * &a;
        assert!(commutator(&a, &a2).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let err = commutator(&CMatrix::identity(2), &CMatrix::identity(4)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 4 });
    }

    #[test]
    fn eig_pauli() {
        let [sx, _, sz] = pauli();
        let e = sz.herm_eig().unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);

        let e = sx.herm_eig().unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(e.eigenvectors[0].max_abs_diff(&CVector::from_real(&[h, -h])) < 1e-15);
        assert!(e.eigenvectors[1].max_abs_diff(&CVector::from_real(&[h, h])) < 1e-15);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_major(2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(m.herm_eig(), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn eig_residuals_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[2usize, 4, 16] {
            for _ in 0..20 {
                let a = random_hermitian(&mut rng, n);
                let e = a.herm_eig().unwrap();
                for w in e.eigenvalues.windows(2) {
                    assert!(w[0] <= w[1]);
                }
                for (lam, v) in e.eigenvalues.iter().zip(&e.eigenvectors) {
                    let r = a.apply(v).max_abs_diff(&v.scale(*lam));
                    assert!(r < 1e-10, "residual {r}");
                }
                for i in 0..n {
                    for j in 0..n {
                        let ip = e.eigenvectors[i].inner(&e.eigenvectors[j]);
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((ip - c(expect, 0.0)).norm() < 1e-10);
                    }
                }
                let sum: f64 = e.eigenvalues.iter().sum();
                let tr = a.trace().re;
                assert!((sum - tr).abs() <= 1e-10 * tr.abs().max(1.0));
                let u = e.unitary();
                let d = &(&u.adjoint() * &a) * &u;
                let off = &d - &CMatrix::from_real_diagonal(&e.eigenvalues);
                assert!(off.max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eigenvector_phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_hermitian(&mut rng, 4);
        for v in a.herm_eig().unwrap().eigenvectors {
            let first = v.entries().into_iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
    }

    #[test]
    fn inverse_of_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_matrix(&mut rng, 4);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).max_abs_diff(&CMatrix::identity(4)) < 1e-12);
        assert_eq!(CMatrix::zeros(4).inverse().unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn vector_norm_is_euclidean() {
        let v = CVector::from_slice(&[c(3.0, 4.0), c(0.0, 12.0)]);
        assert!((v.norm() - 13.0).abs() < 1e-14);
    }
}
