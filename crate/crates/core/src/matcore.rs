//! Dense complex matrices of small dimension.
//!
//! Storage is row-major. Every entry is checked to be finite when a matrix
//! is built from caller data; results of arithmetic are not re-checked.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Matrix norm selector.
///
/// Frobenius is the working norm (it is submultiplicative); the max-entry
/// norm is for reporting only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormKind {
    #[default]
    Frobenius,
    MaxAbsEntry,
}

/// A `dim x dim` complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let expected = dim * dim;
        if entries.len() != expected {
            return Err(Error::EntryCount { dim, expected, got: entries.len() });
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: pos / dim, col: pos % dim });
        }
        Ok(Matrix { dim, entries })
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a matrix from a slice of rows.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::EntryCount { dim, expected: dim * dim, got: row.len() * dim });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    /// The identity of size `dim`.
    ///
    /// # Panics
    ///
    /// Panics if `dim == 0`.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    /// The zero matrix of size `dim`.
    ///
    /// # Panics
    ///
    /// Panics if `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Matrix { dim, entries: vec![ZERO; dim * dim] }
    }

    /// A `1 x 1` matrix holding `z`.
    pub fn scalar(z: Complex64) -> Result<Self> {
        Self::new(1, vec![z])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks(self.dim)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol)
    }

    fn check_dim(&self, other: &Matrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Matrix { dim: self.dim, entries })
    }

    pub fn checked_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(Matrix { dim: self.dim, entries })
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other)?;
        let mut out = Matrix::zeros(self.dim);
        mul_into(self, other, &mut out.entries);
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Matrix {
        Matrix { dim: self.dim, entries: self.entries.iter().map(|z| c * z).collect() }
    }

    /// `self += c * other`, dimensions assumed equal.
    pub(crate) fn add_scaled_assign(&mut self, c: Complex64, other: &Matrix) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += c * b;
        }
    }

    /// `self = self * (I + c * factor)` using `scratch` for the old row.
    pub(crate) fn right_mul_perturbed_identity(&mut self, c: Complex64, factor: &Matrix, scratch: &mut Vec<Complex64>) {
        let d = self.dim;
        debug_assert_eq!(d, factor.dim);
        scratch.resize(d, ZERO);
        for i in 0..d {
            let row = &mut self.entries[i * d..(i + 1) * d];
            scratch.copy_from_slice(row);
            for j in 0..d {
                let acc: Complex64 = scratch.iter().enumerate().map(|(l, &x)| x * factor.entries[l * d + j]).sum();
                row[j] = scratch[j] + c * acc;
            }
        }
    }

    pub(crate) fn mul_unchecked(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.dim);
        mul_into(self, other, &mut out.entries);
        out
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Frobenius => self.frobenius(),
            NormKind::MaxAbsEntry => self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &Matrix) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Determinant of a 2x2 matrix.
    pub fn det2(&self) -> Result<Complex64> {
        if self.dim != 2 {
            return Err(Error::NotTwoByTwo(self.dim));
        }
        Ok(self.entries[0] * self.entries[3] - self.entries[1] * self.entries[2])
    }

    /// `self^p` by repeated squaring.
    pub fn powi(&self, mut p: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.dim);
        while p > 0 {
            if p & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            p >>= 1;
            if p > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }
}

fn mul_into(a: &Matrix, b: &Matrix, out: &mut [Complex64]) {
    let d = a.dim;
    for i in 0..d {
        for j in 0..d {
            let mut acc = ZERO;
            for l in 0..d {
                acc += a.entries[i * d + l] * b.entries[l * d + j];
            }
            out[i * d + j] = acc;
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.12e}{:+.12e}i", z.re, z.im)).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

const EXP_MAX_TERMS: usize = 30;

/// Matrix exponential by scaling and squaring.
///
/// `X` is scaled by `2^-s` so that its Frobenius norm is at most 1/2, the
/// Taylor series is summed until a term's norm drops below `tol * 2^(-s-2)`
/// (at most 30 terms), and the result is squared `s` times.
pub fn mat_exp(x: &Matrix, tol: f64) -> Result<Matrix> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let norm = x.frobenius();
    let mut squarings = 0i32;
    while norm / 2f64.powi(squarings) > 0.5 {
        squarings += 1;
    }
    let scaled = x.scale(Complex64::new(2f64.powi(-squarings), 0.0));
    let threshold = tol * 2f64.powi(-squarings - 2);

    let mut sum = Matrix::identity(x.dim);
    let mut term = Matrix::identity(x.dim);
    for k in 1..=EXP_MAX_TERMS {
        term = term.mul_unchecked(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum.add_scaled_assign(ONE, &term);
        if term.frobenius() < threshold {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul_unchecked(&sum);
    }
    Ok(sum)
}

/// Plain truncated Taylor sum `sum_{k=0}^{terms} X^k / k!`.
///
/// No scaling, no early exit. Reference values for [`mat_exp`].
pub fn mat_exp_series_oracle(x: &Matrix, terms: usize) -> Matrix {
    let mut sum = Matrix::identity(x.dim);
    let mut term = Matrix::identity(x.dim);
    for k in 1..=terms {
        term = term.mul_unchecked(x).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum.add_scaled_assign(ONE, &term);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn a1() -> Matrix {
        Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    fn a2() -> Matrix {
        Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(Matrix::new(0, vec![]), Err(Error::ZeroDimension));
        assert!(matches!(Matrix::new(2, vec![ONE; 3]), Err(Error::EntryCount { .. })));
        assert_eq!(Matrix::new(2, vec![ONE, ONE, c(f64::NAN, 0.0), ONE]), Err(Error::NonFinite { row: 1, col: 0 }));
        assert!(Matrix::new(1, vec![c(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn identity_is_neutral() {
        let x = Matrix::new(2, vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(4.0, -4.0)]).unwrap();
        assert_eq!(Matrix::identity(2).checked_mul(&x).unwrap(), x);
        assert_eq!(x.checked_mul(&Matrix::identity(2)).unwrap(), x);
    }

    #[test]
    fn generator_products() {
        let p = a1().checked_mul(&a2()).unwrap();
        assert_eq!(p, Matrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap());
        let q = a2().checked_mul(&a1()).unwrap();
        assert_eq!(q, Matrix::from_real(2, &[0.0, 0.0, 0.0, 1.0]).unwrap());
    }

    #[test]
    fn scale_by_zero() {
        let x = Matrix::new(2, vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(4.0, -4.0)]).unwrap();
        assert_eq!(x.scale(ZERO), Matrix::zeros(2));
    }

    #[test]
    fn mismatched_dims() {
        let err = Matrix::identity(2).checked_mul(&Matrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
        assert!(Matrix::identity(2).checked_add(&Matrix::identity(1)).is_err());
        assert!(Matrix::identity(2).distance(&Matrix::identity(4)).is_err());
    }

    #[test]
    fn norms() {
        assert!((Matrix::identity(2).norm(NormKind::Frobenius) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a1().norm(NormKind::Frobenius), 1.0);
        let m = Matrix::new(2, vec![c(3.0, 0.0), c(0.0, -4.0), ZERO, ONE]).unwrap();
        assert_eq!(m.norm(NormKind::MaxAbsEntry), 4.0);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(mat_exp(&Matrix::zeros(2), 1e-14).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn exp_of_diagonal() {
        let e = mat_exp(&Matrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap(), 1e-15).unwrap();
        let want = Matrix::from_real(2, &[std::f64::consts::E, 0.0, 0.0, 1.0]).unwrap();
        assert!(e.distance(&want).unwrap() < 1e-14, "{e:?}");
    }

    #[test]
    fn exp_of_symmetric_generator_mean() {
        let m = Matrix::from_real(2, &[0.0, 0.5, 0.5, 0.0]).unwrap();
        let e = mat_exp(&m, 1e-15).unwrap();
        let (ch, sh) = (0.5f64.cosh(), 0.5f64.sinh());
        let want = Matrix::from_real(2, &[ch, sh, sh, ch]).unwrap();
        assert!(e.distance(&want).unwrap() < 1e-15);
        let oracle = mat_exp_series_oracle(&m, 60);
        assert!(e.distance(&oracle).unwrap() < 1e-13);
    }

    #[test]
    fn exp_rejects_nonpositive_tolerance() {
        assert_eq!(mat_exp(&Matrix::identity(2), 0.0), Err(Error::InvalidTolerance(0.0)));
        assert!(mat_exp(&Matrix::identity(2), -1.0).is_err());
        assert!(mat_exp(&Matrix::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn nilpotent_exponential_is_affine() {
        for t in [-3.0, -0.5, 0.25, 1.0, 7.0] {
            let e = mat_exp(&a1().scale(c(t, 0.0)), 1e-15).unwrap();
            let want = Matrix::from_real(2, &[1.0, t, 0.0, 1.0]).unwrap();
            assert!(e.distance(&want).unwrap() <= 4.0 * f64::EPSILON * t.abs().max(1.0), "t = {t}");
        }
    }

    #[test]
    fn oracle_truncations() {
        assert_eq!(mat_exp_series_oracle(&Matrix::zeros(3), 10), Matrix::identity(3));
        let want = Matrix::identity(2).checked_add(&a1()).unwrap();
        assert_eq!(mat_exp_series_oracle(&a1(), 2), want);
    }

    #[test]
    fn large_norm_exponential_matches_scalar() {
        let x = Matrix::scalar(c(3.0, 4.0)).unwrap();
        let e = mat_exp(&x, 1e-15).unwrap();
        let want = c(3.0, 4.0).exp();
        assert!((e.get(0, 0) - want).norm() / want.norm() < 1e-13);
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let x = Matrix::new(2, vec![c(0.5, 0.1), c(0.2, 0.0), c(-0.3, 0.4), c(0.9, -0.2)]).unwrap();
        let mut slow = Matrix::identity(2);
        for _ in 0..13 {
            slow = slow.checked_mul(&x).unwrap();
        }
        assert!(x.powi(13).distance(&slow).unwrap() < 1e-14);
        assert_eq!(x.powi(0), Matrix::identity(2));
    }

    #[test]
    fn perturbed_identity_update() {
        let mut acc = Matrix::new(2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 0.5)]).unwrap();
        let f = Matrix::new(2, vec![c(0.2, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.5, 0.5)]).unwrap();
        let k = c(0.3, -0.1);
        let want = acc.checked_mul(&Matrix::identity(2).checked_add(&f.scale(k)).unwrap()).unwrap();
        acc.right_mul_perturbed_identity(k, &f, &mut Vec::new());
        assert!(acc.distance(&want).unwrap() < 1e-15);
    }
}
