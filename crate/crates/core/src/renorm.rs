//! Renormalized products `(I + (t/n) A_0) ... (I + (t/n) A_{n-1})` and the
//! quantities their convergence to `exp(tA)` is built from.
//!
//! Products always have exactly `n` factors, indexed `0..n`, multiplied left
//! to right. Expanding a product in powers of `t/n` gives the ordered
//! symmetric sums
//!
//! ```text
//! E_k(n) = sum_{0 <= i_1 < ... < i_k <= n-1} A_{i_1} ... A_{i_k}
//! ```
//!
//! with `E_0 = I`, so that `Pi_n(t) = sum_{k=0}^{n} (t/n)^k E_k(n)` exactly.
//! Normalized by `n^k`, `E_k(n)` tends to `A^k / k!`.

use std::time::Instant;

use itertools::Itertools;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matcore::{mat_exp, Matrix};
use crate::sequences::{MatrixSequence, NormMeanBound};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest number of index tuples [`sym_sum_bruteforce`] will enumerate.
pub const BRUTEFORCE_BUDGET: u128 = 1_000_000;

/// Tolerance used for the exponential of a limit target.
pub const LIMIT_EXP_TOL: f64 = 1e-15;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// One evaluation of a renormalized product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductResult {
    pub n: usize,
    pub t: Complex64,
    /// `Pi_n(t)`.
    pub value: Matrix,
    /// Cesàro mean of `A_0, ..., A_{n-1}`.
    pub cesaro: Matrix,
    /// Empirical norm-mean bound over the same prefix.
    pub alpha_hat: f64,
}

/// Computes `Pi_n(t)` together with the Cesàro mean and the empirical norm
/// bound of the first `n` terms, in a single pass.
pub fn product(seq: &MatrixSequence, n: usize, t: Complex64) -> Result<ProductResult> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let d = seq.dim();
    let step = t / n as f64;
    let mut value = Matrix::identity(d);
    let mut sum = Matrix::zeros(d);
    let mut norms = NormMeanBound::default();
    let mut scratch = Vec::with_capacity(d);
    for a in seq.terms(n)? {
        value.right_mul_perturbed_identity(step, a, &mut scratch);
        sum.add_scaled_assign(ONE, a);
        norms.push(a.frobenius());
    }
    Ok(ProductResult { n, t, value, cesaro: sum.scale(real(1.0 / n as f64)), alpha_hat: norms.bound() })
}

/// Partial products `Pi_0, Pi_1, ..., Pi_n` of the `n`-factor product, each
/// handed to `visit` with its index. `Pi_n` is returned.
pub(crate) fn for_each_partial_product(
    seq: &MatrixSequence,
    n: usize,
    t: Complex64,
    mut visit: impl FnMut(usize, &Matrix),
) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let step = t / n as f64;
    let mut value = Matrix::identity(seq.dim());
    let mut scratch = Vec::with_capacity(seq.dim());
    visit(0, &value);
    for (k, a) in seq.terms(n)?.into_iter().enumerate() {
        value.right_mul_perturbed_identity(step, a, &mut scratch);
        visit(k + 1, &value);
    }
    Ok(value)
}

/// `prod_{k<n} (1 + u_k / n)` for a complex sequence.
pub fn scalar_product(u: impl IntoIterator<Item = Complex64>, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let inv = 1.0 / n as f64;
    let mut acc = ONE;
    let mut taken = 0;
    for uk in u.into_iter().take(n) {
        acc *= ONE + uk * inv;
        taken += 1;
    }
    if taken < n {
        return Err(Error::SequenceExhausted { needed: n, available: taken });
    }
    Ok(acc)
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidOrder { k, n });
    }
    Ok(())
}

/// Unnormalized ordered symmetric sums `E_0(n), ..., E_max_order(n)`.
///
/// Uses the prefix recurrence `E_j(m + 1) = E_j(m) + E_{j-1}(m) A_m`,
/// updating orders from high to low so each step reads the previous prefix.
/// Costs `n * max_order` matrix products.
pub fn ordered_symmetric_sums(seq: &MatrixSequence, n: usize, max_order: usize) -> Result<Vec<Matrix>> {
    let d = seq.dim();
    let mut sums = vec![Matrix::zeros(d); max_order + 1];
    sums[0] = Matrix::identity(d);
    for (m, a) in seq.terms(n)?.into_iter().enumerate() {
        // orders above m + 1 are still zero after m + 1 terms
        let top = max_order.min(m + 1);
        for j in (1..=top).rev() {
            let update = sums[j - 1].mul_unchecked(a);
            sums[j].add_scaled_assign(ONE, &update);
        }
    }
    Ok(sums)
}

/// `(1/n^k) E_k(n)` by dynamic programming.
///
/// Rejects `k > n` (where the sum would be empty) and `k = 0`.
pub fn sym_sum_dp(seq: &MatrixSequence, n: usize, k: usize) -> Result<Matrix> {
    check_order(n, k)?;
    let sums = ordered_symmetric_sums(seq, n, k)?;
    Ok(sums[k].scale(real((n as f64).powi(-(k as i32)))))
}

/// Binomial coefficient, `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(c)
}

/// `(1/n^k) E_k(n)` by enumerating every increasing index tuple.
pub fn sym_sum_bruteforce(seq: &MatrixSequence, n: usize, k: usize) -> Result<Matrix> {
    check_order(n, k)?;
    let count = binomial(n, k).unwrap_or(u128::MAX);
    if count > BRUTEFORCE_BUDGET {
        return Err(Error::BudgetExceeded { count, limit: BRUTEFORCE_BUDGET });
    }
    let terms = seq.terms(n)?;
    let d = seq.dim();
    let mut total = Matrix::zeros(d);
    for tuple in (0..n).combinations(k) {
        let mut prod = terms[tuple[0]].clone();
        for &i in &tuple[1..] {
            prod = prod.mul_unchecked(terms[i]);
        }
        total.add_scaled_assign(ONE, &prod);
    }
    Ok(total.scale(real((n as f64).powi(-(k as i32)))))
}

/// Reassembles `Pi_n(t) = sum_{k=0}^{n} (t/n)^k E_k(n)` from the symmetric
/// sums.
pub fn expand_product(seq: &MatrixSequence, n: usize, t: Complex64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let sums = ordered_symmetric_sums(seq, n, n)?;
    let step = t / n as f64;
    let mut total = Matrix::zeros(seq.dim());
    let mut coeff = ONE;
    for e in &sums {
        total.add_scaled_assign(coeff, e);
        coeff *= step;
    }
    Ok(total)
}

/// Both sides of the domination bound on the `k`-th expansion term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBudget {
    /// `||(t/n)^k E_k(n)||_F`.
    pub lhs: f64,
    /// `|t|^k alpha_hat^k / k!`.
    pub rhs: f64,
}

impl NormBudget {
    /// `lhs <= rhs` up to a relative rounding slack.
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_slack)
    }
}

pub fn norm_budget_check(seq: &MatrixSequence, n: usize, k: usize, t: Complex64) -> Result<NormBudget> {
    let normalized = sym_sum_dp(seq, n, k)?;
    let alpha = crate::sequences::mean_norm_bound(seq, n)?;
    let ki = k as i32;
    let lhs = normalized.frobenius() * t.norm().powi(ki);
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let rhs = (t.norm() * alpha).powi(ki) / factorial;
    Ok(NormBudget { lhs, rhs })
}

/// A `C^1` weight on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    /// `x^k`.
    Monomial(u32),
    /// Samples at the uniform nodes `i / (len - 1)`, interpolated by a cubic
    /// Hermite spline with finite-difference slopes.
    Tabulated(Vec<f64>),
}

impl WeightFunction {
    pub fn tabulated(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidWeight("need at least two samples".into()));
        }
        if samples.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidWeight("samples must be finite".into()));
        }
        Ok(WeightFunction::Tabulated(samples))
    }

    fn slopes(samples: &[f64]) -> Vec<f64> {
        let m = samples.len() - 1;
        let inv_h = m as f64;
        (0..=m)
            .map(|i| match i {
                0 => (samples[1] - samples[0]) * inv_h,
                i if i == m => (samples[m] - samples[m - 1]) * inv_h,
                i => (samples[i + 1] - samples[i - 1]) * inv_h / 2.0,
            })
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WeightFunction::Monomial(k) => x.powi(*k as i32),
            WeightFunction::Tabulated(y) => {
                let m = y.len() - 1;
                let h = 1.0 / m as f64;
                let seg = ((x * m as f64).floor().max(0.0) as usize).min(m - 1);
                let s = (x - seg as f64 * h) / h;
                let slopes = Self::slopes(y);
                let (s2, s3) = (s * s, s * s * s);
                let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                let h10 = s3 - 2.0 * s2 + s;
                let h01 = -2.0 * s3 + 3.0 * s2;
                let h11 = s3 - s2;
                h00 * y[seg] + h10 * h * slopes[seg] + h01 * y[seg + 1] + h11 * h * slopes[seg + 1]
            }
        }
    }

    /// `int_0^1 g(x) dx`.
    pub fn integral(&self) -> f64 {
        match self {
            WeightFunction::Monomial(k) => 1.0 / (*k as f64 + 1.0),
            WeightFunction::Tabulated(y) => {
                let m = y.len() - 1;
                let h = 1.0 / m as f64;
                let slopes = Self::slopes(y);
                (0..m).map(|i| h * (y[i] + y[i + 1]) / 2.0 + h * h * (slopes[i] - slopes[i + 1]) / 12.0).sum()
            }
        }
    }
}

/// `(1/n) sum_{l<n} g(l/n) u_l`.
pub fn weighted_average(u: &MatrixSequence, g: &WeightFunction, n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let mut sum = Matrix::zeros(u.dim());
    for (l, a) in u.terms(n)?.into_iter().enumerate() {
        sum.add_scaled_assign(real(g.eval(l as f64 / n as f64)), a);
    }
    Ok(sum.scale(real(1.0 / n as f64)))
}

/// One row of a convergence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub t: Complex64,
    /// `||Pi_n(t) - exp(tA)||_F`.
    pub err: f64,
    /// `||cesaro_n - A||_F`.
    pub mean_err: f64,
    pub seconds: f64,
}

fn check_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(Error::InvalidGrid("n grid is empty".into()));
    }
    if n_grid[0] == 0 {
        return Err(Error::InvalidGrid("n grid contains 0".into()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("n grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Evaluates `Pi_n(t)` for every `n` in `n_grid` against `exp(t * mean)`.
///
/// Grid points run concurrently; sequential sequences are materialized
/// first.
pub fn convergence_scan(
    seq: &MatrixSequence,
    t: Complex64,
    n_grid: &[usize],
    mean: &Matrix,
) -> Result<Vec<ConvergenceRecord>> {
    check_grid(n_grid)?;
    if mean.dim() != seq.dim() {
        return Err(Error::DimensionMismatch { left: seq.dim(), right: mean.dim() });
    }
    let target = mat_exp(&mean.scale(t), LIMIT_EXP_TOL)?;
    let seq = seq.materialize(*n_grid.last().expect("nonempty grid"))?;
    n_grid
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let res = product(&seq, n, t)?;
            let err = res.value.distance(&target)?;
            let mean_err = res.cesaro.distance(mean)?;
            Ok(ConvergenceRecord { n, t, err, mean_err, seconds: start.elapsed().as_secs_f64() })
        })
        .collect()
}

/// Distance between `(1/n^k) E_k(n)` and `A^k / k!` along `n_grid`.
pub fn k_term_limit_check(
    seq: &MatrixSequence,
    k: usize,
    n_grid: &[usize],
    mean: &Matrix,
) -> Result<Vec<(usize, f64)>> {
    if k == 0 {
        return Err(Error::InvalidOrder { k, n: n_grid.first().copied().unwrap_or(0) });
    }
    check_grid(n_grid)?;
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let limit = mean.powi(k as u64).scale(real(1.0 / factorial));
    let seq = seq.materialize(*n_grid.last().expect("nonempty grid"))?;
    n_grid.par_iter().map(|&n| Ok((n, sym_sum_dp(&seq, n, k)?.distance(&limit)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::SymbolStream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn a1() -> Matrix {
        Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    fn a2() -> Matrix {
        Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]).unwrap()
    }

    fn alternating() -> MatrixSequence {
        MatrixSequence::symbolic(SymbolStream::periodic(vec![1, 2], 2).unwrap(), vec![a1(), a2()]).unwrap()
    }

    fn half_swap() -> Matrix {
        Matrix::from_real(2, &[0.0, 0.5, 0.5, 0.0]).unwrap()
    }

    #[test]
    fn zero_sequence_product_is_identity() {
        let seq = MatrixSequence::constant(Matrix::zeros(3));
        for n in [1, 5, 100] {
            let r = product(&seq, n, c(2.0, -1.0)).unwrap();
            assert_eq!(r.value, Matrix::identity(3));
            assert_eq!(r.alpha_hat, 0.0);
        }
    }

    #[test]
    fn scalar_unit_product() {
        let seq = MatrixSequence::constant(Matrix::scalar(c(1.0, 0.0)).unwrap());
        let r = product(&seq, 100, c(1.0, 0.0)).unwrap();
        assert!((r.value.get(0, 0).re - 2.7048138294215285).abs() < 1e-13);
        assert_eq!(product(&seq, 0, c(1.0, 0.0)), Err(Error::EmptyLength));
    }

    #[test]
    fn product_fills_statistics() {
        let r = product(&alternating(), 10, c(1.0, 0.0)).unwrap();
        assert!(r.cesaro.distance(&half_swap()).unwrap() < 1e-15);
        assert_eq!(r.alpha_hat, 1.0);
        assert_eq!(r.value.dim(), r.cesaro.dim());
    }

    #[test]
    fn scalar_lemma_examples() {
        let ones = std::iter::repeat(c(1.0, 0.0));
        assert!((scalar_product(ones, 100).unwrap().re - 2.7048138294215285).abs() < 1e-13);
        assert_eq!(scalar_product(std::iter::repeat(c(0.0, 0.0)), 50).unwrap(), ONE);
        assert_eq!(scalar_product(vec![ONE; 3], 5), Err(Error::SequenceExhausted { needed: 5, available: 3 }));
    }

    #[test]
    fn symmetric_sum_of_identities_counts_pairs() {
        let seq = MatrixSequence::constant(Matrix::identity(2));
        let s = sym_sum_dp(&seq, 10, 2).unwrap();
        assert!(s.distance(&Matrix::identity(2).scale(c(0.45, 0.0))).unwrap() < 1e-15);
    }

    #[test]
    fn symmetric_sum_alternating_pairs() {
        // 3 A1A2 + A2A1 + A1^2 + A2^2 over the six pairs of (1,2,1,2)
        let want = Matrix::from_real(2, &[3.0, 0.0, 0.0, 1.0]).unwrap().scale(c(1.0 / 16.0, 0.0));
        let dp = sym_sum_dp(&alternating(), 4, 2).unwrap();
        let bf = sym_sum_bruteforce(&alternating(), 4, 2).unwrap();
        assert!(dp.distance(&want).unwrap() < 1e-15);
        assert!(bf.distance(&want).unwrap() < 1e-15);
    }

    #[test]
    fn first_order_sum_is_cesaro_mean() {
        let seq = alternating();
        let s = sym_sum_dp(&seq, 9, 1).unwrap();
        let mean = crate::sequences::cesaro_mean(&seq, 9).unwrap();
        assert!(s.distance(&mean).unwrap() < 1e-15);
    }

    #[test]
    fn order_validation() {
        let seq = alternating();
        assert_eq!(sym_sum_dp(&seq, 3, 4), Err(Error::InvalidOrder { k: 4, n: 3 }));
        assert_eq!(sym_sum_dp(&seq, 3, 0), Err(Error::InvalidOrder { k: 0, n: 3 }));
        assert!(sym_sum_bruteforce(&seq, 3, 4).is_err());
        assert!(matches!(sym_sum_bruteforce(&seq, 100, 5), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn full_order_is_the_single_product() {
        let seq = MatrixSequence::explicit(vec![
            Matrix::from_real(2, &[1.0, 2.0, 3.0, 4.0]).unwrap(),
            Matrix::from_real(2, &[0.0, 1.0, -1.0, 0.5]).unwrap(),
            Matrix::from_real(2, &[2.0, 0.0, 1.0, 1.0]).unwrap(),
        ])
        .unwrap();
        let terms = seq.terms(3).unwrap();
        let want = terms[0].checked_mul(terms[1]).unwrap().checked_mul(terms[2]).unwrap().scale(c(1.0 / 27.0, 0.0));
        assert!(sym_sum_bruteforce(&seq, 3, 3).unwrap().distance(&want).unwrap() < 1e-15);
        assert!(sym_sum_dp(&seq, 3, 3).unwrap().distance(&want).unwrap() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 2), Some(45));
        assert_eq!(binomial(12, 4), Some(495));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(64, 32), Some(1_832_624_140_942_590_534));
    }

    #[test]
    fn budget_examples() {
        let zero = MatrixSequence::constant(Matrix::zeros(2));
        let b = norm_budget_check(&zero, 5, 2, c(1.0, 0.0)).unwrap();
        assert_eq!(b.lhs, 0.0);
        assert!(b.holds(0.0));

        let id = MatrixSequence::constant(Matrix::identity(2));
        for (n, k) in [(5, 2), (10, 3), (12, 4)] {
            let b = norm_budget_check(&id, n, k, c(1.0, 0.0)).unwrap();
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let count = binomial(n, k).unwrap() as f64;
            let sqrt2 = 2f64.sqrt();
            assert!((b.lhs - count / (n as f64).powi(k as i32) * sqrt2).abs() < 1e-13);
            assert!((b.rhs - sqrt2.powi(k as i32) / fact).abs() < 1e-13);
            assert!(b.holds(0.0));
        }

        let b = norm_budget_check(&alternating(), 12, 3, c(2.0, 0.0)).unwrap();
        assert!(b.holds(0.0), "{b:?}");
    }

    #[test]
    fn weighted_average_examples() {
        let one = MatrixSequence::constant(Matrix::scalar(ONE).unwrap());
        let w = weighted_average(&one, &WeightFunction::Monomial(2), 10).unwrap();
        assert!((w.get(0, 0).re - 0.285).abs() < 1e-15);

        let seq = alternating();
        let w0 = weighted_average(&seq, &WeightFunction::Monomial(0), 10).unwrap();
        let mean = crate::sequences::cesaro_mean(&seq, 10).unwrap();
        assert!(w0.distance(&mean).unwrap() < 1e-15);
    }

    #[test]
    fn monomial_integrals() {
        for k in 0..6 {
            assert_eq!(WeightFunction::Monomial(k).integral(), 1.0 / (k as f64 + 1.0));
        }
        assert_eq!(WeightFunction::Monomial(3).eval(0.5), 0.125);
    }

    #[test]
    fn tabulated_weight_reproduces_cubics() {
        // Hermite interpolation with central-difference slopes is exact for
        // quadratics in the interior; check the integral for x^2.
        let m = 400;
        let samples: Vec<f64> = (0..=m).map(|i| (i as f64 / m as f64).powi(2)).collect();
        let g = WeightFunction::tabulated(samples).unwrap();
        assert!((g.integral() - 1.0 / 3.0).abs() < 1e-6);
        assert!((g.eval(0.5) - 0.25).abs() < 1e-12);
        assert!((g.eval(0.3337) - 0.3337f64.powi(2)).abs() < 1e-6);
        assert!(WeightFunction::tabulated(vec![1.0]).is_err());
        assert!(WeightFunction::tabulated(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn tabulated_weight_is_continuously_differentiable() {
        let g = WeightFunction::tabulated(vec![0.0, 1.0, 0.5, 2.0, -1.0]).unwrap();
        for node in [0.25, 0.5, 0.75] {
            let h = 1e-7;
            let left = (g.eval(node) - g.eval(node - h)) / h;
            let right = (g.eval(node + h) - g.eval(node)) / h;
            assert!((left - right).abs() < 1e-4, "slope jump at {node}: {left} vs {right}");
            assert!((g.eval(node - 1e-12) - g.eval(node + 1e-12)).abs() < 1e-9);
        }
    }

    #[test]
    fn scan_of_scalar_ones() {
        let seq = MatrixSequence::constant(Matrix::scalar(ONE).unwrap());
        let mean = Matrix::scalar(ONE).unwrap();
        let recs = convergence_scan(&seq, ONE, &[100], &mean).unwrap();
        assert_eq!(recs.len(), 1);
        assert!((recs[0].err - 0.013467999037516).abs() < 1e-12, "{}", recs[0].err);
        assert_eq!(recs[0].mean_err, 0.0);
    }

    #[test]
    fn scan_of_zero_sequence() {
        let seq = MatrixSequence::constant(Matrix::zeros(2));
        let recs = convergence_scan(&seq, c(3.0, 1.0), &[1, 10, 1000], &Matrix::zeros(2)).unwrap();
        assert!(recs.iter().all(|r| r.err == 0.0 && r.mean_err == 0.0));
    }

    #[test]
    fn scan_grid_validation() {
        let seq = alternating();
        let m = half_swap();
        assert!(matches!(convergence_scan(&seq, ONE, &[], &m), Err(Error::InvalidGrid(_))));
        assert!(convergence_scan(&seq, ONE, &[10, 10], &m).is_err());
        assert!(convergence_scan(&seq, ONE, &[0, 10], &m).is_err());
        assert!(convergence_scan(&seq, ONE, &[10], &Matrix::zeros(3)).is_err());
    }

    #[test]
    fn scan_alternating_decreases() {
        let recs = convergence_scan(&alternating(), ONE, &[100, 1000, 10_000], &half_swap()).unwrap();
        assert!(recs.windows(2).all(|w| w[1].err < w[0].err));
    }

    #[test]
    fn k_term_limit_of_identities() {
        let seq = MatrixSequence::constant(Matrix::identity(1));
        let d = k_term_limit_check(&seq, 2, &[100], &Matrix::identity(1)).unwrap();
        assert!((d[0].1 - 0.005).abs() < 1e-15);
    }

    #[test]
    fn k_term_limit_first_order_is_mean_error() {
        let seq = alternating();
        let grid = [3, 7, 20];
        let d = k_term_limit_check(&seq, 1, &grid, &half_swap()).unwrap();
        for (n, dist) in d {
            let mean = crate::sequences::cesaro_mean(&seq, n).unwrap();
            assert!((dist - mean.distance(&half_swap()).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn k_term_limit_alternating_second_order() {
        let limit_check = k_term_limit_check(&alternating(), 2, &[10_000], &half_swap()).unwrap();
        assert!(limit_check[0].1 <= 1e-3, "{limit_check:?}");
    }

    #[test]
    fn partial_products_end_at_the_product() {
        let seq = alternating();
        let mut count = 0;
        let last = for_each_partial_product(&seq, 50, c(0.7, 0.0), |k, _| {
            assert_eq!(k, count);
            count += 1;
        })
        .unwrap();
        assert_eq!(count, 51);
        assert_eq!(last, product(&seq, 50, c(0.7, 0.0)).unwrap().value);
    }
}
