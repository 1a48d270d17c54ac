//! Experiment configuration.
//!
//! The file format is a flat list of `key = value` lines. `#` starts a
//! comment, blank lines are ignored, and a key may appear only once. Values
//! are whitespace-separated lists where the key takes several items; complex
//! numbers are written `re,im` (or a bare `re`). Overrides given on the
//! command line replace file values.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use renorm_core::hyperwalk::generator_table;
use renorm_core::sequences::{MatrixSequence, Symbol, SymbolStream};
use renorm_core::{Complex64, Matrix};

use crate::error::CliError;

/// Every key the parser understands.
pub const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "model",
    "pattern",
    "alphabet",
    "probabilities",
    "transition",
    "initial",
    "theta",
    "beta",
    "symbols_file",
    "matrix",
    "mean",
    "t",
    "t_grid",
    "n",
    "n_grid",
    "k",
    "weight_k",
    "u",
    "base",
    "seed",
    "out",
    "check",
    "tol",
    "timing",
];

fn is_known(key: &str) -> bool {
    KNOWN_KEYS.contains(&key) || key.strip_prefix("matrix.").is_some_and(|s| s.parse::<Symbol>().is_ok_and(|s| s > 0))
}

/// Raw `key = value` pairs with the line each came from (0 for overrides).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Syntax {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if !is_known(key) {
                return Err(CliError::field(key, "unknown key"));
            }
            if entries.insert(key.to_owned(), (line_no, value.trim().to_owned())).is_some() {
                return Err(CliError::field(key, format!("duplicate key on line {line_no}")));
            }
        }
        Ok(RawConfig { entries })
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| CliError::Syntax {
            line: 0,
            message: format!("override `{assignment}` is not key=value"),
        })?;
        let key = key.trim();
        if !is_known(key) {
            return Err(CliError::field(key, "unknown key"));
        }
        self.entries.insert(key.to_owned(), (0, value.trim().to_owned()));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn table_keys(&self) -> Vec<(Symbol, &str)> {
        let mut keys: Vec<(Symbol, &str)> = self
            .entries
            .iter()
            .filter_map(|(k, (_, v))| Some((k.strip_prefix("matrix.")?.parse().ok()?, v.as_str())))
            .collect();
        keys.sort_by_key(|(s, _)| *s);
        keys
    }
}

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Exp,
    Product,
    Scan,
    Symsum,
    LemmaScalar,
    LemmaWeighted,
    Hyperwalk,
    Figure,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Exp,
        Experiment::Product,
        Experiment::Scan,
        Experiment::Symsum,
        Experiment::LemmaScalar,
        Experiment::LemmaWeighted,
        Experiment::Hyperwalk,
        Experiment::Figure,
    ];

    /// Name used in config files and artifact file names.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Exp => "exp",
            Experiment::Product => "product",
            Experiment::Scan => "scan",
            Experiment::Symsum => "symsum",
            Experiment::LemmaScalar => "lemma_scalar",
            Experiment::LemmaWeighted => "lemma_weighted",
            Experiment::Hyperwalk => "hyperwalk",
            Experiment::Figure => "figure",
        }
    }

    fn uses_walk_defaults(self) -> bool {
        matches!(self, Experiment::Hyperwalk | Experiment::Figure)
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.trim().replace('-', "_");
        Experiment::ALL.into_iter().find(|e| e.name() == norm).ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// Symbol model selection as written in the config.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Periodic {
        pattern: Vec<Symbol>,
        alphabet: Option<usize>,
    },
    Bernoulli {
        probabilities: Vec<f64>,
    },
    Markov {
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
    },
    Rotation {
        theta: f64,
        beta: f64,
    },
    /// `matrix.1, ..., matrix.N` are `A_0, ..., A_{N-1}`.
    Explicit,
    File {
        path: PathBuf,
        alphabet: Option<usize>,
    },
}

impl ModelConfig {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, ModelConfig::Bernoulli { .. } | ModelConfig::Markov { .. })
    }
}

/// A fully validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: ModelConfig,
    pub table: Vec<Matrix>,
    pub matrix: Option<Matrix>,
    pub mean: Option<Matrix>,
    pub t: Vec<Complex64>,
    pub t_grid: Vec<f64>,
    pub n: usize,
    pub n_grid: Vec<usize>,
    pub k: usize,
    pub weight_k: Vec<u32>,
    pub u: Vec<Complex64>,
    pub base: Complex64,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub check: bool,
    pub tol: Option<f64>,
    pub timing: bool,
}

pub const DEFAULT_SEED_FOR_WALKS: u64 = 42;

fn items(value: &str) -> impl Iterator<Item = &str> {
    value.split_whitespace()
}

fn parse_real(field: &str, s: &str) -> Result<f64, CliError> {
    let x: f64 = s.parse().map_err(|_| CliError::field(field, format!("`{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::field(field, format!("`{s}` is not finite")));
    }
    Ok(x)
}

/// Counts accept plain integers and integral scientific notation (`1e5`).
fn parse_count(field: &str, s: &str) -> Result<usize, CliError> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| CliError::field(field, format!("`{s}` is not a count")))?;
    if x < 0.0 || x.fract() != 0.0 || x > 9.007_199_254_740_992e15 {
        return Err(CliError::field(field, format!("`{s}` is not a nonnegative integer")));
    }
    Ok(x as usize)
}

fn parse_complex(field: &str, s: &str) -> Result<Complex64, CliError> {
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse_real(field, re.trim())?, parse_real(field, im.trim())?)),
        None => Ok(Complex64::new(parse_real(field, s)?, 0.0)),
    }
}

fn parse_list<T>(field: &str, value: &str, f: impl Fn(&str, &str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    let out: Vec<T> = items(value).map(|s| f(field, s)).collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(CliError::field(field, "empty list"));
    }
    Ok(out)
}

fn parse_bool(field: &str, s: &str) -> Result<bool, CliError> {
    match s {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::field(field, format!("`{s}` is not a boolean"))),
    }
}

/// Square matrix from a flat row-major list of complex entries.
/// Square matrices are written row-major as whitespace-separated entries;
/// `;` may separate rows for readability.
pub fn parse_matrix(field: &str, value: &str) -> Result<Matrix, CliError> {
    let entries = parse_list(field, &value.replace(';', " "), parse_complex)?;
    let dim = (entries.len() as f64).sqrt().round() as usize;
    if dim * dim != entries.len() {
        return Err(CliError::field(field, format!("{} entries do not form a square matrix", entries.len())));
    }
    Matrix::new(dim, entries).map_err(|e| CliError::field(field, e.to_string()))
}

fn parse_symbols_list(field: &str, value: &str) -> Result<Vec<Symbol>, CliError> {
    parse_list(field, value, |f, s| {
        let sym: Symbol = s.parse().map_err(|_| CliError::field(f, format!("`{s}` is not a symbol")))?;
        if sym == 0 {
            return Err(CliError::field(f, "symbols are 1-based"));
        }
        Ok(sym)
    })
}

fn optional<T>(
    raw: &RawConfig,
    key: &str,
    f: impl FnOnce(&str, &str) -> Result<T, CliError>,
) -> Result<Option<T>, CliError> {
    raw.get(key).map(|v| f(key, v)).transpose()
}

fn required<T>(raw: &RawConfig, key: &str, f: impl FnOnce(&str, &str) -> Result<T, CliError>) -> Result<T, CliError> {
    optional(raw, key, f)?.ok_or_else(|| CliError::field(key, "required by the selected model"))
}

fn parse_model(raw: &RawConfig, experiment: Experiment) -> Result<ModelConfig, CliError> {
    let alphabet = optional(raw, "alphabet", parse_count)?;
    let name = match raw.get("model") {
        Some(name) => name,
        None if experiment.uses_walk_defaults() => {
            return Ok(ModelConfig::Bernoulli { probabilities: vec![0.5, 0.5] });
        }
        None => return Ok(ModelConfig::Periodic { pattern: vec![1, 2], alphabet }),
    };
    Ok(match name {
        "periodic" => ModelConfig::Periodic {
            pattern: optional(raw, "pattern", parse_symbols_list)?.unwrap_or_else(|| vec![1, 2]),
            alphabet,
        },
        "bernoulli" => ModelConfig::Bernoulli {
            probabilities: required(raw, "probabilities", |f, v| parse_list(f, v, parse_real))?,
        },
        "markov" => ModelConfig::Markov {
            transition: required(raw, "transition", |f, v| {
                v.split(';').map(|row| parse_list(f, row, parse_real)).collect()
            })?,
            initial: required(raw, "initial", |f, v| parse_list(f, v, parse_real))?,
        },
        "rotation" => ModelConfig::Rotation {
            theta: required(raw, "theta", parse_real)?,
            beta: required(raw, "beta", parse_real)?,
        },
        "explicit" => ModelConfig::Explicit,
        "file" => ModelConfig::File { path: required(raw, "symbols_file", |_, v| Ok(PathBuf::from(v)))?, alphabet },
        other => return Err(CliError::field("model", format!("unknown model `{other}`"))),
    })
}

fn parse_table(raw: &RawConfig, model: &ModelConfig) -> Result<Vec<Matrix>, CliError> {
    let keys = raw.table_keys();
    if keys.is_empty() {
        if matches!(model, ModelConfig::Explicit) {
            return Err(CliError::field("matrix.1", "explicit model needs matrix.1, matrix.2, ..."));
        }
        return Ok(generator_table());
    }
    let mut table = Vec::with_capacity(keys.len());
    for (expected, (symbol, value)) in (1..).zip(&keys) {
        let key = format!("matrix.{symbol}");
        if *symbol != expected {
            return Err(CliError::field(&format!("matrix.{expected}"), "symbol table has a gap"));
        }
        table.push(parse_matrix(&key, value)?);
    }
    Ok(table)
}

impl ExperimentConfig {
    pub fn from_raw(experiment: Experiment, raw: &RawConfig) -> Result<Self, CliError> {
        if let Some(name) = raw.get("experiment") {
            let declared: Experiment = name.parse().map_err(|e| CliError::field("experiment", e))?;
            if declared != experiment {
                return Err(CliError::field(
                    "experiment",
                    format!("config is for `{}` but `{}` was requested", declared.name(), experiment.name()),
                ));
            }
        }
        let model = parse_model(raw, experiment)?;
        let table = parse_table(raw, &model)?;
        let walk = experiment.uses_walk_defaults();

        let mut seed = optional(raw, "seed", |f, v| {
            v.parse::<u64>().map_err(|_| CliError::field(f, format!("`{v}` is not a u64 seed")))
        })?;
        if model.is_stochastic() && seed.is_none() {
            if walk && !raw.contains("model") {
                seed = Some(DEFAULT_SEED_FOR_WALKS);
            } else {
                return Err(CliError::field("seed", "a stochastic model needs a seed"));
            }
        }

        let default_t_grid: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
        let cfg = ExperimentConfig {
            experiment,
            table,
            matrix: optional(raw, "matrix", parse_matrix)?,
            mean: optional(raw, "mean", parse_matrix)?,
            t: optional(raw, "t", |f, v| parse_list(f, v, parse_complex))?
                .unwrap_or_else(|| vec![Complex64::new(1.0, 0.0)]),
            t_grid: optional(raw, "t_grid", |f, v| parse_list(f, v, parse_real))?.unwrap_or(default_t_grid),
            n: optional(raw, "n", parse_count)?.unwrap_or(100_000),
            n_grid: optional(raw, "n_grid", |f, v| parse_list(f, v, parse_count))?.unwrap_or_else(|| {
                if experiment == Experiment::Symsum {
                    vec![4, 8, 12]
                } else {
                    vec![100, 1000, 10_000]
                }
            }),
            k: optional(raw, "k", parse_count)?.unwrap_or(2),
            weight_k: optional(raw, "weight_k", |f, v| {
                parse_list(f, v, |f, s| {
                    s.parse::<u32>().map_err(|_| CliError::field(f, format!("`{s}` is not an exponent")))
                })
            })?
            .unwrap_or_else(|| (0..=4).collect()),
            u: optional(raw, "u", |f, v| parse_list(f, v, parse_complex))?
                .unwrap_or_else(|| vec![Complex64::new(1.0, 0.0)]),
            base: optional(raw, "base", parse_complex)?.unwrap_or(Complex64::new(0.0, 1.0)),
            seed,
            out: optional(raw, "out", |_, v| Ok(PathBuf::from(v)))?.unwrap_or_else(|| PathBuf::from("out")),
            check: optional(raw, "check", parse_bool)?.unwrap_or(false),
            tol: optional(raw, "tol", parse_real)?,
            timing: optional(raw, "timing", parse_bool)?.unwrap_or(false),
            model,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(CliError::field("n", "must be at least 1"));
        }
        if self.n_grid.contains(&0) {
            return Err(CliError::field("n_grid", "counts must be at least 1"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::field("n_grid", "must be strictly ascending"));
        }
        if self.k == 0 {
            return Err(CliError::field("k", "order must be at least 1"));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(CliError::field("tol", "must be positive"));
            }
        }
        if !(self.base.im > 0.0) {
            return Err(CliError::field("base", "must lie in the upper half-plane"));
        }
        let dim = self.table[0].dim();
        if self.table.iter().any(|m| m.dim() != dim) {
            return Err(CliError::field("matrix.1", "table matrices have different sizes"));
        }
        if let Some(mean) = &self.mean {
            if mean.dim() != dim {
                return Err(CliError::field("mean", format!("is {0}x{0}, table is {dim}x{dim}", mean.dim())));
            }
        }
        if self.experiment == Experiment::Exp && self.matrix.is_none() {
            return Err(CliError::field("matrix", "required by exp"));
        }
        Ok(())
    }

    /// The symbol stream described by the model, if it is symbolic.
    pub fn stream(&self) -> Result<Option<SymbolStream>, CliError> {
        let seed = self.seed.unwrap_or(0);
        let model_err = |e: renorm_core::Error| CliError::field("model", e.to_string());
        let default_alphabet = |symbols: &[Symbol], given: Option<usize>| {
            given.unwrap_or_else(|| (symbols.iter().copied().max().unwrap_or(1) as usize).max(self.table.len()).max(2))
        };
        let stream = match &self.model {
            ModelConfig::Periodic { pattern, alphabet } => {
                SymbolStream::periodic(pattern.clone(), default_alphabet(pattern, *alphabet)).map_err(model_err)?
            }
            ModelConfig::Bernoulli { probabilities } => {
                SymbolStream::bernoulli(probabilities.clone(), seed).map_err(model_err)?
            }
            ModelConfig::Markov { transition, initial } => {
                SymbolStream::markov(transition.clone(), initial.clone(), seed).map_err(model_err)?
            }
            ModelConfig::Rotation { theta, beta } => SymbolStream::rotation(*theta, *beta).map_err(model_err)?,
            ModelConfig::File { path, alphabet } => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let symbols = renorm_core::formats::parse_symbols(&text)
                    .map_err(|e| CliError::field("symbols_file", format!("{}: {e}", path.display())))?;
                let alphabet = default_alphabet(&symbols, *alphabet);
                SymbolStream::recorded(symbols, alphabet).map_err(model_err)?
            }
            ModelConfig::Explicit => return Ok(None),
        };
        Ok(Some(stream))
    }

    /// The matrix sequence `A_0, A_1, ...`.
    pub fn sequence(&self) -> Result<MatrixSequence, CliError> {
        let table_err = |e: renorm_core::Error| CliError::field("matrix.1", e.to_string());
        match self.stream()? {
            Some(stream) => MatrixSequence::symbolic(stream, self.table.clone()).map_err(table_err),
            None => MatrixSequence::explicit(self.table.clone()).map_err(table_err),
        }
    }

    /// The mean `A` the experiment converges to: `mean` when given, else the
    /// mean predicted by the model.
    pub fn target_mean(&self, seq: &MatrixSequence) -> Result<Matrix, CliError> {
        if let Some(m) = &self.mean {
            return Ok(m.clone());
        }
        seq.model_mean().ok_or_else(|| CliError::field("mean", "required for the explicit model"))
    }
}
