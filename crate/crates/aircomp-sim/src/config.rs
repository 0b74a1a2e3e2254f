//! Experiment configuration shared by the sweep driver and the CLI.

use std::path::PathBuf;
use std::str::FromStr;

use aircomp::field::{smallest_valid_q, PrimeField};
use anyhow::{bail, ensure, Context, Result};

/// Where the parity-check matrix comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSource {
    /// Load a matrix from an alist file.
    Alist(PathBuf),
    /// Construct one pseudo-randomly with the given shape and column
    /// weight, seeded by the experiment seed.
    Random {
        rows: usize,
        cols: usize,
        col_weight: usize,
    },
}

impl FromStr for CodeSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("alist:") {
            ensure!(!path.is_empty(), "alist code source needs a file path");
            return Ok(CodeSource::Alist(PathBuf::from(path)));
        }
        if let Some(dims) = s.strip_prefix("random:") {
            let parts: Vec<&str> = dims.split(',').collect();
            ensure!(
                parts.len() == 3,
                "random code source needs rows,cols,weight, got {dims:?}"
            );
            let parse = |what: &str, text: &str| -> Result<usize> {
                text.trim()
                    .parse::<usize>()
                    .with_context(|| format!("bad {what} in code source: {text:?}"))
            };
            return Ok(CodeSource::Random {
                rows: parse("row count", parts[0])?,
                cols: parse("column count", parts[1])?,
                col_weight: parse("column weight", parts[2])?,
            });
        }
        bail!("code source must be alist:<path> or random:<M>,<N>,<w>, got {s:?}");
    }
}

/// Whether transmitters protect their digits with the shared code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TxMode {
    /// Encode each digit block; the receiver belief-propagation decodes
    /// the superposed codeword sum.
    Coded,
    /// Send the digit block directly; the receiver hard-demaps each
    /// folded observation.
    Uncoded,
}

impl std::fmt::Display for TxMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TxMode::Coded => "coded",
            TxMode::Uncoded => "uncoded",
        })
    }
}

/// Which positions must match for a trial to count as correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Metric {
    /// Every symbol of the decoded sum codeword.
    Full,
    /// Information positions only.
    Info,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Full => "full",
            Metric::Info => "info",
        })
    }
}

/// Everything a sweep needs. Fields mirror the CLI flags.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Digit radix p each transmitter decomposes its values into.
    pub radix: u64,
    /// Field order q, or 0 to derive the smallest prime that keeps
    /// digit sums from wrapping.
    pub field_order: u32,
    /// Number of transmitters K.
    pub num_tx: usize,
    /// Constellation dimension D, 1 or 2.
    pub dim: usize,
    /// Digits packed per transmitted value.
    pub digits_per_value: usize,
    pub code: CodeSource,
    /// One sweep point per (theta, snr) grid pair.
    pub snr_db: Vec<f64>,
    pub theta_max: Vec<f64>,
    pub max_iterations: u32,
    /// Trial budget per sweep point.
    pub trials: u64,
    /// Stop a point early once this many block errors accumulate.
    pub max_block_errors: u64,
    pub mode: TxMode,
    pub metric: Metric,
    pub seed: u64,
}

impl SimConfig {
    /// The field order actually used: the configured one (validated), or
    /// the smallest prime q with K(p-1) <= q-1 when left at 0.
    pub fn resolved_field_order(&self) -> Result<u32> {
        ensure!(self.radix >= 2, "radix must be at least 2, got {}", self.radix);
        ensure!(self.num_tx >= 1, "need at least one transmitter");
        let radix: u32 = self
            .radix
            .try_into()
            .with_context(|| format!("radix {} too large", self.radix))?;
        let num_tx: u32 = self
            .num_tx
            .try_into()
            .with_context(|| format!("transmitter count {} too large", self.num_tx))?;
        if self.field_order == 0 {
            return Ok(smallest_valid_q(num_tx, radix));
        }
        PrimeField::new(self.field_order)
            .with_context(|| format!("field order {}", self.field_order))?;
        let max_sum = (self.num_tx as u64) * (self.radix - 1);
        ensure!(
            max_sum <= (self.field_order - 1) as u64,
            "field order {} cannot hold digit sums up to {} ({} transmitters, radix {})",
            self.field_order,
            max_sum,
            self.num_tx,
            self.radix
        );
        Ok(self.field_order)
    }
}

/// Parses a comma-separated list of floats; "inf" is accepted.
pub fn parse_float_list(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|t| {
            let v: f64 = t
                .trim()
                .parse()
                .with_context(|| format!("bad number {t:?} in list {text:?}"))?;
            ensure!(!v.is_nan(), "NaN is not a usable value in {text:?}");
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    ensure!(!values.is_empty(), "empty list");
    Ok(values)
}
