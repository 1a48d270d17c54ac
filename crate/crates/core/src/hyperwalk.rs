//! The two-horocycle walk.
//!
//! Symbols `1` and `2` select the unipotent generators
//! `A1 = [[0, 1], [0, 0]]` and `A2 = [[0, 0], [1, 0]]`. For a measure with
//! cylinder masses `(mu1, mu2)` the renormalized product tends to
//! `exp(t M)` with `M = [[0, mu1], [mu2, 0]]`. Since `M^2 = mu1 mu2 I`,
//!
//! ```text
//! exp(t M) = cosh(t s) I + (sinh(t s) / s) t M / t,    s = sqrt(mu1 mu2),
//! ```
//!
//! i.e. `[[cosh(ts), sqrt(mu1/mu2) sinh(ts)], [sqrt(mu2/mu1) sinh(ts), cosh(ts)]]`.
//!
//! Products act on the upper half-plane by Möbius maps and are drawn in the
//! Poincaré disc through the Cayley transform.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matcore::Matrix;
use crate::renorm::{for_each_partial_product, product};
use crate::sequences::{MatrixSequence, MeasureParams, SymbolStream};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest number of points kept in a trajectory's partial path.
pub const PATH_POINT_CAP: usize = 2000;

/// Tolerance on imaginary parts for matrices treated as real.
const REAL_TOL: f64 = 1e-12;

/// `A1 = [[0, 1], [0, 0]]`.
pub fn upper_generator() -> Matrix {
    Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).expect("2x2")
}

/// `A2 = [[0, 0], [1, 0]]`.
pub fn lower_generator() -> Matrix {
    Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]).expect("2x2")
}

/// The symbol table `{1 -> A1, 2 -> A2}`.
pub fn generator_table() -> Vec<Matrix> {
    vec![upper_generator(), lower_generator()]
}

/// The limit generator `[[0, mu1], [mu2, 0]]`.
pub fn limit_generator(m: &MeasureParams) -> Matrix {
    Matrix::from_real(2, &[0.0, m.mu1(), m.mu2(), 0.0]).expect("2x2")
}

/// `exp(t [[0, mu1], [mu2, 0]])` in closed form.
///
/// The degenerate measures `mu1 * mu2 = 0` make the generator nilpotent and
/// the exponential is `I + t M` exactly.
pub fn closed_form_limit(m: &MeasureParams, t: f64) -> Result<Matrix> {
    if !t.is_finite() {
        return Err(Error::InvalidWalk(format!("t = {t} is not finite")));
    }
    let (mu1, mu2) = (m.mu1(), m.mu2());
    let s2 = mu1 * mu2;
    if s2 == 0.0 {
        return Matrix::from_real(2, &[1.0, t * mu1, t * mu2, 1.0]);
    }
    let s = s2.sqrt();
    let (ch, sh) = ((t * s).cosh(), (t * s).sinh());
    Matrix::from_real(2, &[ch, (mu1 / mu2).sqrt() * sh, (mu2 / mu1).sqrt() * sh, ch])
}

/// A walk on `{1, 2}^N` with its evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpec {
    measure: MeasureParams,
    stream: SymbolStream,
    t_grid: Vec<f64>,
    n: usize,
    base_point: Complex64,
}

impl WalkSpec {
    pub fn new(
        measure: MeasureParams,
        stream: SymbolStream,
        t_grid: Vec<f64>,
        n: usize,
        base_point: Complex64,
    ) -> Result<Self> {
        if stream.alphabet_size() != 2 {
            return Err(Error::InvalidWalk(format!("alphabet must be {{1, 2}}, got size {}", stream.alphabet_size())));
        }
        if n == 0 {
            return Err(Error::InvalidWalk("n must be at least 1".into()));
        }
        if let Some(t) = t_grid.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidWalk(format!("t grid contains {t}")));
        }
        if !(base_point.im > 0.0) || !base_point.re.is_finite() || !base_point.im.is_finite() {
            return Err(Error::InvalidWalk(format!("base point {base_point} is not in the upper half-plane")));
        }
        Ok(WalkSpec { measure, stream, t_grid, n, base_point })
    }

    pub fn measure(&self) -> &MeasureParams {
        &self.measure
    }

    pub fn stream(&self) -> &SymbolStream {
        &self.stream
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_point(&self) -> Complex64 {
        self.base_point
    }

    fn sequence(&self) -> Result<MatrixSequence> {
        MatrixSequence::symbolic(self.stream.materialize(self.n)?, generator_table())
    }
}

/// `(I + (t/n) A_{x_0}) ... (I + (t/n) A_{x_{n-1}})`.
pub fn walk_product(spec: &WalkSpec, t: f64) -> Result<Matrix> {
    let seq = MatrixSequence::symbolic(spec.stream.clone(), generator_table())?;
    Ok(product(&seq, spec.n, Complex64::new(t, 0.0))?.value)
}

fn real_entries(m: &Matrix) -> Result<[f64; 4]> {
    if m.dim() != 2 {
        return Err(Error::NotTwoByTwo(m.dim()));
    }
    if !m.is_real(REAL_TOL) {
        return Err(Error::NotReal);
    }
    let e = m.entries();
    Ok([e[0].re, e[1].re, e[2].re, e[3].re])
}

fn mobius_real(m: [f64; 4], z: Complex64) -> Result<Complex64> {
    let [a, b, c, d] = m;
    if a * d - b * c == 0.0 {
        return Err(Error::MobiusPole);
    }
    let den = z * c + d;
    if den.norm_sqr() == 0.0 {
        return Err(Error::MobiusPole);
    }
    Ok((z * a + b) / den)
}

/// `(a z + b) / (c z + d)` for a real invertible 2x2 matrix.
pub fn mobius_apply(m: &Matrix, z: Complex64) -> Result<Complex64> {
    mobius_real(real_entries(m)?, z)
}

/// A point of the closed unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint(Complex64);

impl DiscPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.norm() <= 1.0 + 1e-12) {
            return Err(Error::InvalidWalk(format!("{z} lies outside the unit disc")));
        }
        Ok(DiscPoint(z))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }
}

/// Cayley transform `(z - i) / (z + i)` from the closed upper half-plane to
/// the closed unit disc.
pub fn cayley_to_disc(z: Complex64) -> Result<DiscPoint> {
    if z.im < 0.0 {
        return Err(Error::InvalidWalk(format!("{z} is below the real axis")));
    }
    let den = z + I;
    if den.norm_sqr() == 0.0 {
        return Err(Error::CayleyPole);
    }
    DiscPoint::new((z - I) / den)
}

/// One curve of a walk picture.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: f64,
    /// Image of the base point under the full product.
    pub endpoint: DiscPoint,
    /// `(k, image of the base point under Pi_k(t))`, subsampled; always
    /// contains `k = 0` and `k = n`.
    pub path: Vec<(usize, DiscPoint)>,
}

/// Stride that keeps at most [`PATH_POINT_CAP`] samples including both ends.
fn path_stride(n: usize) -> usize {
    n.div_ceil(PATH_POINT_CAP - 2).max(1)
}

/// Evaluates the walk at every `t` of the grid.
///
/// The symbol stream is materialized once and shared by the per-`t`
/// evaluations, which run concurrently.
pub fn trajectory(spec: &WalkSpec) -> Result<Vec<Trajectory>> {
    let seq = spec.sequence()?;
    let n = spec.n;
    let stride = path_stride(n);
    spec.t_grid
        .par_iter()
        .map(|&t| {
            let mut path = Vec::with_capacity(n / stride + 2);
            let mut failure = None;
            let last = for_each_partial_product(&seq, n, Complex64::new(t, 0.0), |k, m| {
                if failure.is_some() || (k % stride != 0 && k != n) {
                    return;
                }
                match mobius_apply(m, spec.base_point).and_then(cayley_to_disc) {
                    Ok(p) => path.push((k, p)),
                    Err(e) => failure = Some(e),
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            let endpoint = cayley_to_disc(mobius_apply(&last, spec.base_point)?)?;
            Ok(Trajectory { t, endpoint, path })
        })
        .collect()
}

/// The disc image of the base point under the closed-form limit.
pub fn limit_disc_point(m: &MeasureParams, t: f64, base: Complex64) -> Result<DiscPoint> {
    cayley_to_disc(mobius_apply(&closed_form_limit(m, t)?, base)?)
}

/// Cylinder masses realized by the first `n` symbols of the walk, i.e. the
/// Cesàro mean `[[0, mu1_hat], [mu2_hat, 0]]` of its generators.
pub fn empirical_measure(spec: &WalkSpec) -> Result<MeasureParams> {
    let symbols = spec.stream.take(spec.n)?;
    let ones = symbols.iter().filter(|&&s| s == 1).count();
    MeasureParams::from_mu1(ones as f64 / spec.n as f64)
}

/// Rotation by `angle`.
pub fn rotation(angle: f64) -> Matrix {
    let (s, c) = angle.sin_cos();
    Matrix::from_real(2, &[c, -s, s, c]).expect("2x2")
}

/// Conjugates `diag(e^{t/2}, e^{-t/2})` by the rotation of angle pi/4 and
/// compares it with `[[cosh(t/2), sinh(t/2)], [sinh(t/2), cosh(t/2)]]`.
///
/// Returns `(conjugated diagonal, hyperbolic matrix, Frobenius distance)`.
pub fn conjugate_check(t: f64) -> (Matrix, Matrix, f64) {
    let r = rotation(FRAC_PI_4);
    let r_inv = rotation(-FRAC_PI_4);
    let diag = Matrix::from_real(2, &[(t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()]).expect("2x2");
    let conj = r.mul_unchecked(&diag).mul_unchecked(&r_inv);
    let (ch, sh) = ((t / 2.0).cosh(), (t / 2.0).sinh());
    let hyp = Matrix::from_real(2, &[ch, sh, sh, ch]).expect("2x2");
    let dist = conj.distance(&hyp).expect("same dims");
    (conj, hyp, dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::mat_exp;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symmetric_limit_is_hyperbolic_rotation() {
        for t in [-2.0, 0.5, 1.0, 3.0] {
            let m = closed_form_limit(&MeasureParams::symmetric(), t).unwrap();
            let (ch, sh) = ((t / 2.0).cosh(), (t / 2.0).sinh());
            let want = Matrix::from_real(2, &[ch, sh, sh, ch]).unwrap();
            assert!(m.distance(&want).unwrap() < 1e-15);
        }
    }

    #[test]
    fn limit_at_zero_time() {
        let m = MeasureParams::new(0.2, 0.8).unwrap();
        assert_eq!(closed_form_limit(&m, 0.0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn nilpotent_limits() {
        let upper = MeasureParams::new(1.0, 0.0).unwrap();
        assert_eq!(closed_form_limit(&upper, 2.5).unwrap(), Matrix::from_real(2, &[1.0, 2.5, 0.0, 1.0]).unwrap());
        let lower = MeasureParams::new(0.0, 1.0).unwrap();
        assert_eq!(closed_form_limit(&lower, -1.0).unwrap(), Matrix::from_real(2, &[1.0, 0.0, -1.0, 1.0]).unwrap());
    }

    #[test]
    fn asymmetric_limit_matches_exponential() {
        let m = MeasureParams::new(0.3, 0.7).unwrap();
        for t in [-2.0, 1.0, 2.0] {
            let closed = closed_form_limit(&m, t).unwrap();
            let series = mat_exp(&limit_generator(&m).scale(c(t, 0.0)), 1e-15).unwrap();
            assert!(closed.distance(&series).unwrap() < 1e-13);
        }
    }

    // The formula as often transcribed uses the hyperbolic argument
    // t / sqrt(mu1 mu2) and the prefactor sqrt(mu2/mu1) on the upper-right
    // entry. Both disagree with the exponential for asymmetric measures.
    #[test]
    fn transcribed_variants_disagree_with_exponential() {
        let m = MeasureParams::new(0.3, 0.7).unwrap();
        let t = 1.0;
        let exp = mat_exp(&limit_generator(&m).scale(c(t, 0.0)), 1e-15).unwrap();
        let s = (m.mu1() * m.mu2()).sqrt();

        let divided_argument = (t / s).cosh();
        assert!((divided_argument - exp.get(0, 0).re).abs() > 0.1);

        let swapped_prefactor = (m.mu2() / m.mu1()).sqrt() * (t * s).sinh();
        assert!((swapped_prefactor - exp.get(0, 1).re).abs() > 0.1);
        assert!((swapped_prefactor - exp.get(1, 0).re).abs() < 1e-14);
    }

    #[test]
    fn walk_of_constant_upper_symbol_is_exact() {
        let spec = WalkSpec::new(
            MeasureParams::new(1.0, 0.0).unwrap(),
            SymbolStream::periodic(vec![1], 2).unwrap(),
            vec![1.5],
            1000,
            I,
        )
        .unwrap();
        let m = walk_product(&spec, 1.5).unwrap();
        let want = Matrix::from_real(2, &[1.0, 1.5, 0.0, 1.0]).unwrap();
        assert!(m.distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn walk_spec_validation() {
        let measure = MeasureParams::symmetric();
        let s = SymbolStream::periodic(vec![1, 2], 2).unwrap();
        assert!(WalkSpec::new(measure, s.clone(), vec![1.0], 0, I).is_err());
        assert!(WalkSpec::new(measure, s.clone(), vec![f64::NAN], 10, I).is_err());
        assert!(WalkSpec::new(measure, s.clone(), vec![1.0], 10, c(0.0, -1.0)).is_err());
        assert!(WalkSpec::new(measure, s, vec![1.0], 10, c(1.0, 0.0)).is_err());
        let s3 = SymbolStream::periodic(vec![1, 2, 3], 3).unwrap();
        assert!(WalkSpec::new(measure, s3, vec![1.0], 10, I).is_err());
    }

    #[test]
    fn mobius_examples() {
        let z = c(0.3, 2.0);
        assert_eq!(mobius_apply(&Matrix::identity(2), z).unwrap(), z);
        let shear = Matrix::from_real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(mobius_apply(&shear, I).unwrap(), c(1.0, 1.0));
        let t: f64 = 1.3;
        let diag = Matrix::from_real(2, &[(t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()]).unwrap();
        assert!((mobius_apply(&diag, I).unwrap() - c(0.0, t.exp())).norm() < 1e-14);
    }

    #[test]
    fn mobius_errors() {
        let pole = Matrix::from_real(2, &[1.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(mobius_apply(&pole, c(-1.0, 0.0)), Err(Error::MobiusPole));
        let singular = Matrix::from_real(2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(mobius_apply(&singular, I), Err(Error::MobiusPole));
        let complex = Matrix::new(2, vec![c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(mobius_apply(&complex, I), Err(Error::NotReal));
        assert_eq!(mobius_apply(&Matrix::identity(3), I), Err(Error::NotTwoByTwo(3)));
    }

    #[test]
    fn cayley_examples() {
        assert!(cayley_to_disc(I).unwrap().z().norm() < 1e-16);
        assert_eq!(cayley_to_disc(c(0.0, 0.0)).unwrap().z(), c(-1.0, 0.0));
        let mut prev = -1.0;
        for t in [0.5, 2.0, 8.0, 20.0] {
            let p = cayley_to_disc(c(0.0, f64::exp(t))).unwrap().z();
            assert!(p.im.abs() < 1e-15);
            assert!(p.re > prev && p.re < 1.0);
            prev = p.re;
        }
        assert!(1.0 - prev < 1e-8);
        assert!(cayley_to_disc(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn trajectory_at_zero_time_is_constant() {
        let spec = WalkSpec::new(
            MeasureParams::symmetric(),
            SymbolStream::bernoulli(vec![0.5, 0.5], 42).unwrap(),
            vec![0.0],
            5000,
            c(0.2, 1.5),
        )
        .unwrap();
        let tr = trajectory(&spec).unwrap();
        let start = cayley_to_disc(c(0.2, 1.5)).unwrap();
        assert_eq!(tr[0].endpoint, start);
        assert!(tr[0].path.iter().all(|(_, p)| *p == start));
    }

    #[test]
    fn path_is_capped_and_keeps_both_ends() {
        for n in [1, 10, 1997, 1998, 1999, 2000, 2001, 12345, 100_000] {
            let spec = WalkSpec::new(
                MeasureParams::symmetric(),
                SymbolStream::periodic(vec![1, 2], 2).unwrap(),
                vec![1.0],
                n,
                I,
            )
            .unwrap();
            let tr = trajectory(&spec).unwrap();
            let path = &tr[0].path;
            assert!(path.len() <= PATH_POINT_CAP, "n = {n}: {} points", path.len());
            assert_eq!(path.first().unwrap().0, 0);
            assert_eq!(path.last().unwrap().0, n);
            assert_eq!(path.last().unwrap().1, tr[0].endpoint);
        }
    }

    #[test]
    fn endpoint_matches_walk_product() {
        let spec = WalkSpec::new(
            MeasureParams::symmetric(),
            SymbolStream::bernoulli(vec![0.5, 0.5], 3).unwrap(),
            vec![-1.0, 2.0],
            777,
            I,
        )
        .unwrap();
        for tr in trajectory(&spec).unwrap() {
            let direct = cayley_to_disc(mobius_apply(&walk_product(&spec, tr.t).unwrap(), I).unwrap()).unwrap();
            assert_eq!(direct, tr.endpoint);
        }
    }

    #[test]
    fn periodic_walk_approaches_symmetric_limit() {
        let spec = WalkSpec::new(
            MeasureParams::symmetric(),
            SymbolStream::periodic(vec![1, 2], 2).unwrap(),
            vec![1.0],
            100_000,
            I,
        )
        .unwrap();
        let m = walk_product(&spec, 1.0).unwrap();
        let want = closed_form_limit(&MeasureParams::symmetric(), 1.0).unwrap();
        assert!(m.distance(&want).unwrap() < 1e-4);
    }

    #[test]
    fn bernoulli_walk_approaches_asymmetric_limit() {
        let measure = MeasureParams::new(0.3, 0.7).unwrap();
        let spec =
            WalkSpec::new(measure, SymbolStream::bernoulli(vec![0.3, 0.7], 11).unwrap(), vec![1.0], 1_000_000, I)
                .unwrap();
        let m = walk_product(&spec, 1.0).unwrap();
        let want = closed_form_limit(&measure, 1.0).unwrap();
        assert!(m.distance(&want).unwrap() < 5e-3);
    }

    #[test]
    fn empirical_measure_counts_the_prefix() {
        let periodic = SymbolStream::periodic(vec![1, 1, 2], 2).unwrap();
        let spec = WalkSpec::new(MeasureParams::symmetric(), periodic, vec![1.0], 4, I).unwrap();
        assert_eq!(empirical_measure(&spec).unwrap().mu1(), 0.75);
        // the seed-42 walk's cylinder masses differ from 1/2 at the 1e-3 scale,
        // which is what separates its endpoint from the symmetric limit
        let bernoulli = SymbolStream::bernoulli(vec![0.5, 0.5], 42).unwrap();
        let spec = WalkSpec::new(MeasureParams::symmetric(), bernoulli, vec![2.0], 100_000, I).unwrap();
        let mu1 = empirical_measure(&spec).unwrap().mu1();
        assert!((mu1 - 0.4981).abs() < 1e-12, "{mu1}");
    }

    #[test]
    fn symmetric_limit_points_lie_on_the_vertical_diameter() {
        // the fixed points of the limit are -1 and 1, whose Cayley images are
        // i and -i
        for t in [0.5, 2.0, 10.0, 30.0] {
            let p = limit_disc_point(&MeasureParams::symmetric(), t, I).unwrap().z();
            assert!(p.re.abs() < 1e-12, "{p}");
        }
        let far = limit_disc_point(&MeasureParams::symmetric(), 30.0, I).unwrap().z();
        assert!((far - c(0.0, -1.0)).norm() < 1e-5);
    }

    #[test]
    fn conjugation_examples() {
        let (a, b, d) = conjugate_check(0.0);
        assert!(a.distance(&Matrix::identity(2)).unwrap() < 1e-15);
        assert_eq!(b, Matrix::identity(2));
        assert!(d < 1e-15);
        assert!(conjugate_check(1.0).2 <= 1e-12);
        assert!(conjugate_check(-2.0).2 <= 1e-12);
    }
}
