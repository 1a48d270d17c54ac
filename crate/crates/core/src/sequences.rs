//! Symbolic sequences, the matrix sequences they drive, and Cesàro statistics.
//!
//! Symbols are 1-based: an alphabet of size `m` is `{1, ..., m}`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::Matrix;
use crate::rng::{pick, CounterRng};

pub type Symbol = u16;

const STOCHASTIC_SUM_TOL: f64 = 1e-12;
const MARKOV_AVERAGING_STEPS: usize = 20_000;

/// How a stream can be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessMode {
    /// The symbol at index `k` is a pure function of the parameters and `k`.
    RandomAccess,
    /// Symbols must be produced in order.
    Sequential,
}

/// The dynamical model generating a stream.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolModel {
    Periodic {
        pattern: Vec<Symbol>,
    },
    Bernoulli {
        probabilities: Vec<f64>,
        seed: u64,
    },
    Markov {
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
        seed: u64,
    },
    /// Coding of the rotation `x -> x + theta` on the circle by the cell
    /// `[0, beta)`: symbol 1 when `frac(k theta) < beta`, else 2.
    Rotation {
        theta: f64,
        beta: f64,
    },
    /// A finite, already materialized buffer.
    Recorded {
        symbols: Arc<[Symbol]>,
    },
}

impl SymbolModel {
    pub fn name(&self) -> &'static str {
        match self {
            SymbolModel::Periodic { .. } => "periodic",
            SymbolModel::Bernoulli { .. } => "bernoulli",
            SymbolModel::Markov { .. } => "markov",
            SymbolModel::Rotation { .. } => "rotation",
            SymbolModel::Recorded { .. } => "recorded",
        }
    }
}

/// A validated symbol stream over `{1, ..., alphabet_size}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    alphabet_size: usize,
    model: SymbolModel,
    rng: Option<CounterRng>,
}

fn check_distribution(what: &str, p: &[f64], m: usize) -> Result<()> {
    if p.len() != m {
        return Err(Error::InvalidModel(format!("{what} has {} entries, alphabet has {m}", p.len())));
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidModel(format!("{what} has a negative or non-finite entry")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_SUM_TOL {
        return Err(Error::InvalidModel(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

fn check_symbols(symbols: &[Symbol], alphabet: usize) -> Result<()> {
    match symbols.iter().find(|&&s| s == 0 || s as usize > alphabet) {
        Some(&symbol) => Err(Error::SymbolOutOfRange { symbol, alphabet }),
        None => Ok(()),
    }
}

fn check_alphabet(m: usize) -> Result<()> {
    if m < 2 || m > Symbol::MAX as usize {
        return Err(Error::InvalidModel(format!("alphabet size {m} is outside 2..={}", Symbol::MAX)));
    }
    Ok(())
}

impl SymbolStream {
    pub fn periodic(pattern: Vec<Symbol>, alphabet_size: usize) -> Result<Self> {
        check_alphabet(alphabet_size)?;
        if pattern.is_empty() {
            return Err(Error::InvalidModel("periodic pattern is empty".into()));
        }
        check_symbols(&pattern, alphabet_size)?;
        Ok(SymbolStream { alphabet_size, model: SymbolModel::Periodic { pattern }, rng: None })
    }

    /// I.i.d. symbols; the alphabet size is `probabilities.len()`.
    pub fn bernoulli(probabilities: Vec<f64>, seed: u64) -> Result<Self> {
        let m = probabilities.len();
        check_alphabet(m)?;
        check_distribution("probabilities", &probabilities, m)?;
        Ok(SymbolStream {
            alphabet_size: m,
            model: SymbolModel::Bernoulli { probabilities, seed },
            rng: Some(CounterRng::new(seed)),
        })
    }

    /// A Markov chain; `transition[i][j]` is the probability of moving from
    /// symbol `i + 1` to symbol `j + 1`.
    pub fn markov(transition: Vec<Vec<f64>>, initial: Vec<f64>, seed: u64) -> Result<Self> {
        let m = transition.len();
        check_alphabet(m)?;
        for (i, row) in transition.iter().enumerate() {
            check_distribution(&format!("transition row {}", i + 1), row, m)?;
        }
        check_distribution("initial distribution", &initial, m)?;
        Ok(SymbolStream {
            alphabet_size: m,
            model: SymbolModel::Markov { transition, initial, seed },
            rng: Some(CounterRng::new(seed)),
        })
    }

    pub fn rotation(theta: f64, beta: f64) -> Result<Self> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(theta) || !open_unit(beta) {
            return Err(Error::InvalidModel(format!(
                "rotation needs theta and beta in (0, 1), got theta = {theta}, beta = {beta}"
            )));
        }
        Ok(SymbolStream { alphabet_size: 2, model: SymbolModel::Rotation { theta, beta }, rng: None })
    }

    pub fn recorded(symbols: impl Into<Arc<[Symbol]>>, alphabet_size: usize) -> Result<Self> {
        check_alphabet(alphabet_size)?;
        let symbols = symbols.into();
        check_symbols(&symbols, alphabet_size)?;
        Ok(SymbolStream { alphabet_size, model: SymbolModel::Recorded { symbols }, rng: None })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn model(&self) -> &SymbolModel {
        &self.model
    }

    pub fn access_mode(&self) -> AccessMode {
        match self.model {
            SymbolModel::Markov { .. } => AccessMode::Sequential,
            _ => AccessMode::RandomAccess,
        }
    }

    /// Number of symbols available, `None` for unbounded streams.
    pub fn bounded_len(&self) -> Option<usize> {
        match &self.model {
            SymbolModel::Recorded { symbols } => Some(symbols.len()),
            _ => None,
        }
    }

    /// The symbol at index `k` of a random-access stream.
    pub fn at(&self, k: usize) -> Result<Symbol> {
        match &self.model {
            SymbolModel::Periodic { pattern } => Ok(pattern[k % pattern.len()]),
            SymbolModel::Bernoulli { probabilities, .. } => {
                let u = self.rng.expect("seeded model").f64_at(k as u64);
                Ok(pick(probabilities, u) as Symbol + 1)
            }
            SymbolModel::Rotation { theta, beta } => {
                let phase = (k as f64 * theta).fract();
                Ok(if phase < *beta { 1 } else { 2 })
            }
            SymbolModel::Recorded { symbols } => {
                symbols.get(k).copied().ok_or(Error::SequenceExhausted { needed: k + 1, available: symbols.len() })
            }
            SymbolModel::Markov { .. } => Err(Error::SequentialAccess(self.model.name())),
        }
    }

    /// The first `n` symbols.
    pub fn take(&self, n: usize) -> Result<Vec<Symbol>> {
        match &self.model {
            SymbolModel::Markov { transition, initial, .. } => {
                let rng = self.rng.expect("seeded model");
                let mut out = Vec::with_capacity(n);
                let mut state = 0usize;
                for k in 0..n {
                    let u = rng.f64_at(k as u64);
                    state = if k == 0 { pick(initial, u) } else { pick(&transition[state], u) };
                    out.push(state as Symbol + 1);
                }
                Ok(out)
            }
            SymbolModel::Recorded { symbols } => {
                if n > symbols.len() {
                    return Err(Error::SequenceExhausted { needed: n, available: symbols.len() });
                }
                Ok(symbols[..n].to_vec())
            }
            _ => (0..n).map(|k| self.at(k)).collect(),
        }
    }

    /// Materializes the first `n` symbols into a shareable random-access
    /// stream.
    pub fn materialize(&self, n: usize) -> Result<SymbolStream> {
        SymbolStream::recorded(self.take(n)?, self.alphabet_size)
    }

    /// Long-run symbol frequencies under the model: cylinder masses for the
    /// invariant measure. Markov chains use the Cesàro-averaged distribution
    /// of the chain started from its initial law; recorded buffers use their
    /// empirical counts.
    pub fn frequencies(&self) -> Vec<f64> {
        let m = self.alphabet_size;
        let counts = |symbols: &[Symbol]| {
            let mut f = vec![0.0; m];
            for &s in symbols {
                f[s as usize - 1] += 1.0;
            }
            let len = symbols.len().max(1) as f64;
            f.iter_mut().for_each(|x| *x /= len);
            f
        };
        match &self.model {
            SymbolModel::Periodic { pattern } => counts(pattern),
            SymbolModel::Recorded { symbols } => counts(symbols),
            SymbolModel::Bernoulli { probabilities, .. } => probabilities.clone(),
            SymbolModel::Rotation { beta, .. } => vec![*beta, 1.0 - beta],
            SymbolModel::Markov { transition, initial, .. } => {
                let mut dist = initial.clone();
                let mut avg = vec![0.0; m];
                for _ in 0..MARKOV_AVERAGING_STEPS {
                    for (a, d) in avg.iter_mut().zip(&dist) {
                        *a += d;
                    }
                    let mut next = vec![0.0; m];
                    for (i, row) in transition.iter().enumerate() {
                        for (j, p) in row.iter().enumerate() {
                            next[j] += dist[i] * p;
                        }
                    }
                    dist = next;
                }
                avg.iter().map(|a| a / MARKOV_AVERAGING_STEPS as f64).collect()
            }
        }
    }
}

/// Cylinder masses `(mu([1]), mu([2]))` of a measure on `{1, 2}^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    mu1: f64,
    mu2: f64,
}

impl MeasureParams {
    pub fn new(mu1: f64, mu2: f64) -> Result<Self> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(mu1) || !unit(mu2) || (mu1 + mu2 - 1.0).abs() > STOCHASTIC_SUM_TOL {
            return Err(Error::InvalidMeasure { mu1, mu2 });
        }
        Ok(MeasureParams { mu1, mu2 })
    }

    /// The measure with `mu([1]) = mu1`.
    pub fn from_mu1(mu1: f64) -> Result<Self> {
        Self::new(mu1, 1.0 - mu1)
    }

    pub fn symmetric() -> Self {
        MeasureParams { mu1: 0.5, mu2: 0.5 }
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MatrixSource {
    Constant(Matrix),
    Explicit(Vec<Matrix>),
    Symbolic { stream: SymbolStream, table: Vec<Matrix> },
}

/// A sequence `A_0, A_1, ...` of `dim x dim` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSequence {
    dim: usize,
    source: MatrixSource,
}

fn common_dim(matrices: &[Matrix]) -> Result<usize> {
    let dim = matrices.first().map(Matrix::dim).ok_or(Error::EmptyLength)?;
    if let Some(m) = matrices.iter().find(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch { left: dim, right: m.dim() });
    }
    Ok(dim)
}

impl MatrixSequence {
    /// `A_k = a` for every `k`.
    pub fn constant(a: Matrix) -> Self {
        MatrixSequence { dim: a.dim(), source: MatrixSource::Constant(a) }
    }

    /// A finite list; reading past its end is an error.
    pub fn explicit(matrices: Vec<Matrix>) -> Result<Self> {
        let dim = common_dim(&matrices)?;
        Ok(MatrixSequence { dim, source: MatrixSource::Explicit(matrices) })
    }

    /// `A_k = table[x_k - 1]` for the symbols `x_k` of `stream`.
    pub fn symbolic(stream: SymbolStream, table: Vec<Matrix>) -> Result<Self> {
        if table.len() != stream.alphabet_size() {
            return Err(Error::InvalidModel(format!(
                "symbol table has {} matrices for an alphabet of {}",
                table.len(),
                stream.alphabet_size()
            )));
        }
        let dim = common_dim(&table)?;
        Ok(MatrixSequence { dim, source: MatrixSource::Symbolic { stream, table } })
    }

    /// Scalar sequence `u_0, u_1, ...` repeating `pattern`, as `1 x 1`
    /// matrices.
    pub fn scalar_periodic(pattern: &[Complex64]) -> Result<Self> {
        match pattern {
            [] => Err(Error::EmptyLength),
            [u] => Ok(Self::constant(Matrix::scalar(*u)?)),
            _ => {
                let len = pattern.len();
                let symbols: Vec<Symbol> = (1..=len as Symbol).collect();
                let table = pattern.iter().map(|&u| Matrix::scalar(u)).collect::<Result<_>>()?;
                Self::symbolic(SymbolStream::periodic(symbols, len)?, table)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stream(&self) -> Option<&SymbolStream> {
        match &self.source {
            MatrixSource::Symbolic { stream, .. } => Some(stream),
            _ => None,
        }
    }

    /// References to `A_0, ..., A_{n-1}`.
    pub fn terms(&self, n: usize) -> Result<Vec<&Matrix>> {
        match &self.source {
            MatrixSource::Constant(a) => Ok(vec![a; n]),
            MatrixSource::Explicit(list) => {
                if n > list.len() {
                    return Err(Error::SequenceExhausted { needed: n, available: list.len() });
                }
                Ok(list[..n].iter().collect())
            }
            MatrixSource::Symbolic { stream, table } => {
                Ok(stream.take(n)?.into_iter().map(|s| &table[s as usize - 1]).collect())
            }
        }
    }

    /// Same sequence with a sequential stream replaced by its first `n`
    /// symbols, safe to share across threads for any length up to `n`.
    pub fn materialize(&self, n: usize) -> Result<MatrixSequence> {
        match &self.source {
            MatrixSource::Symbolic { stream, table } if stream.access_mode() == AccessMode::Sequential => {
                Self::symbolic(stream.materialize(n)?, table.clone())
            }
            _ => Ok(self.clone()),
        }
    }

    /// The mean `A` predicted by the model, if it has one.
    pub fn model_mean(&self) -> Option<Matrix> {
        match &self.source {
            MatrixSource::Constant(a) => Some(a.clone()),
            MatrixSource::Explicit(_) => None,
            MatrixSource::Symbolic { stream, table } => {
                let mut mean = Matrix::zeros(self.dim);
                for (f, m) in stream.frequencies().into_iter().zip(table) {
                    mean.add_scaled_assign(Complex64::new(f, 0.0), m);
                }
                Some(mean)
            }
        }
    }
}

/// `(1/n) sum_{k<n} A_k`.
pub fn cesaro_mean(seq: &MatrixSequence, n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let mut sum = Matrix::zeros(seq.dim());
    for a in seq.terms(n)? {
        sum.add_scaled_assign(Complex64::new(1.0, 0.0), a);
    }
    Ok(sum.scale(Complex64::new(1.0 / n as f64, 0.0)))
}

/// Empirical norm-mean bound `max_{1<=m<=n} (1/m) sum_{k<m} ||A_k||_F`.
pub fn mean_norm_bound(seq: &MatrixSequence, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let mut running = NormMeanBound::default();
    for a in seq.terms(n)? {
        running.push(a.frobenius());
    }
    Ok(running.bound())
}

/// Running maximum of the prefix means of a nonnegative sequence.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NormMeanBound {
    count: usize,
    sum: f64,
    best: f64,
}

impl NormMeanBound {
    pub(crate) fn push(&mut self, norm: f64) {
        self.count += 1;
        self.sum += norm;
        self.best = self.best.max(self.sum / self.count as f64);
    }

    pub(crate) fn bound(&self) -> f64 {
        self.best
    }
}
