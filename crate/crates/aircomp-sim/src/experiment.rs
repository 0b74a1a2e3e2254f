//! One end-to-end trial: draw digits, encode, modulate, superpose,
//! demodulate, decode, and compare against the true sum.

use aircomp::channel::{sigma_from_snr, transmit, ChannelParams};
use aircomp::codec::unpack_block;
use aircomp::decoder::DecoderState;
use aircomp::demod::{fold, Demodulator, PriorProfile};
use aircomp::field::PrimeField;
use aircomp::lattice::{segment, LatticeConfig, LatticeSymbol};
use aircomp::ldpc::{Encoder, ParityCheckMatrix};
use anyhow::{ensure, Context, Result};
use rand::Rng;

use crate::config::{CodeSource, Metric, SimConfig, TxMode};

/// What a single trial produced, enough to audit it from the outside.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    /// Recovered positions matched the true sum under the configured
    /// metric.
    pub correct: bool,
    /// Belief-propagation iterations spent (0 in uncoded mode).
    pub iterations: u32,
    /// Recovered symbols: the decoded codeword in coded mode, the
    /// hard-demapped digit sums in uncoded mode.
    pub decoded: Vec<u32>,
    /// True modulo-q sum the receiver should have recovered.
    pub expected: Vec<u32>,
    /// Natural integer sums of the packed per-transmitter values.
    pub value_sums: Vec<u64>,
}

/// A validated configuration with its code, lattice, and prior built.
pub struct Experiment {
    cfg: SimConfig,
    field: PrimeField,
    lattice: LatticeConfig,
    profile: PriorProfile,
    matrix: ParityCheckMatrix,
    encoder: Option<Encoder>,
}

impl Experiment {
    /// Validates the whole configuration and constructs the code; any
    /// violation surfaces here, before a trial loop starts.
    pub fn build(cfg: &SimConfig) -> Result<Self> {
        let q = cfg.resolved_field_order()?;
        let field = PrimeField::new(q)?;
        let matrix = match &cfg.code {
            CodeSource::Alist(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading code from {}", path.display()))?;
                ParityCheckMatrix::from_alist(&text, field)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            CodeSource::Random {
                rows,
                cols,
                col_weight,
            } => ParityCheckMatrix::random(*rows, *cols, *col_weight, field, cfg.seed)
                .context("constructing random code")?,
        };
        let lattice = LatticeConfig::new(cfg.dim, q)?;
        let profile = PriorProfile::new(cfg.num_tx, cfg.radix, q)?;

        let block_len = matrix.info_len();
        let sent_len = match cfg.mode {
            TxMode::Coded => matrix.num_cols(),
            TxMode::Uncoded => block_len,
        };
        ensure!(
            sent_len % cfg.dim == 0,
            "{} transmitted symbols do not fill {}-dimensional points",
            sent_len,
            cfg.dim
        );
        ensure!(
            cfg.digits_per_value > 0 && block_len % cfg.digits_per_value == 0,
            "block of {} digits does not split into values of {} digits",
            block_len,
            cfg.digits_per_value
        );
        ensure!(cfg.trials >= 1, "need at least one trial");
        ensure!(cfg.max_block_errors >= 1, "early-stop threshold must be positive");
        ensure!(!cfg.snr_db.is_empty(), "need at least one SNR point");
        ensure!(!cfg.theta_max.is_empty(), "need at least one phase bound");
        for &theta in &cfg.theta_max {
            ensure!(
                theta.is_finite() && theta >= 0.0,
                "phase bound must be finite and nonnegative, got {theta}"
            );
            ensure!(
                theta == 0.0 || cfg.dim == 2,
                "phase error needs two-dimensional constellation points"
            );
        }
        for &snr in &cfg.snr_db {
            ensure!(!snr.is_nan(), "SNR cannot be NaN");
        }

        let encoder = match cfg.mode {
            TxMode::Coded => Some(Encoder::new(matrix.clone())?),
            TxMode::Uncoded => None,
        };
        Ok(Self {
            cfg: cfg.clone(),
            field,
            lattice,
            profile,
            matrix,
            encoder,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn lattice(&self) -> LatticeConfig {
        self.lattice
    }

    pub fn profile(&self) -> &PriorProfile {
        &self.profile
    }

    pub fn matrix(&self) -> &ParityCheckMatrix {
        &self.matrix
    }

    pub fn encoder(&self) -> Option<&Encoder> {
        self.encoder.as_ref()
    }

    /// Digits per transmitted block (the code's information length).
    pub fn block_len(&self) -> usize {
        self.matrix.info_len()
    }

    /// Channel settings for one sweep point. An infinite SNR collapses to
    /// a noiseless channel.
    pub fn channel_params(&self, snr_db: f64, theta_max: f64) -> Result<ChannelParams> {
        let sigma = sigma_from_snr(snr_db, self.field.order());
        Ok(ChannelParams::new(
            self.cfg.num_tx,
            self.cfg.dim,
            sigma,
            theta_max,
        )?)
    }

    /// Draws each transmitter's digit block, uniform over [0, p-1],
    /// transmitter-major.
    pub fn draw_digits<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<u32>> {
        let block_len = self.block_len();
        (0..self.cfg.num_tx)
            .map(|_| {
                (0..block_len)
                    .map(|_| rng.random_range(0..self.cfg.radix as u32))
                    .collect()
            })
            .collect()
    }

    /// Natural integer sum, across transmitters, of each packed value.
    pub fn sum_values(&self, digits: &[Vec<u32>]) -> Result<Vec<u64>> {
        let count = self.block_len() / self.cfg.digits_per_value;
        let mut sums = vec![0u64; count];
        for block in digits {
            let raw: Vec<u64> = block.iter().map(|&d| d as u64).collect();
            let values = unpack_block(&raw, self.cfg.radix, self.cfg.digits_per_value)?;
            for (sum, value) in sums.iter_mut().zip(values) {
                *sum += value;
            }
        }
        Ok(sums)
    }

    /// Maps a symbol sequence onto constellation points, D symbols per
    /// point.
    pub fn modulate(&self, symbols: &[u32]) -> Result<Vec<LatticeSymbol>> {
        segment(symbols, self.cfg.dim)?
            .iter()
            .map(|group| Ok(self.lattice.map(group)?))
            .collect()
    }

    /// Runs one trial against the given channel settings. The generator
    /// must be dedicated to this trial for sweeps to stay reproducible.
    pub fn run_trial<R: Rng + ?Sized>(
        &self,
        params: &ChannelParams,
        rng: &mut R,
    ) -> Result<TrialOutcome> {
        let digits = self.draw_digits(rng);
        let value_sums = self.sum_values(&digits)?;
        match self.cfg.mode {
            TxMode::Coded => self.run_coded(params, rng, digits, value_sums),
            TxMode::Uncoded => self.run_uncoded(params, rng, digits, value_sums),
        }
    }

    fn run_coded<R: Rng + ?Sized>(
        &self,
        params: &ChannelParams,
        rng: &mut R,
        digits: Vec<Vec<u32>>,
        value_sums: Vec<u64>,
    ) -> Result<TrialOutcome> {
        let encoder = self.encoder.as_ref().expect("coded mode builds an encoder");
        let mut codewords = Vec::with_capacity(digits.len());
        for block in &digits {
            codewords.push(encoder.encode(block)?.into_symbols());
        }
        let mut expected = vec![0u32; self.matrix.num_cols()];
        for codeword in &codewords {
            for (sum, &symbol) in expected.iter_mut().zip(codeword) {
                *sum = self.field.add(*sum, symbol);
            }
        }

        let blocks = codewords
            .iter()
            .map(|cw| self.modulate(cw))
            .collect::<Result<Vec<_>>>()?;
        let received = transmit(&blocks, params, rng)?;

        let demod = Demodulator::new(&self.profile, self.lattice, params.sigma_w())?;
        let beliefs = demod.codeword_llrs(&received, self.block_len())?;
        let mut state = DecoderState::new(&self.matrix, beliefs, self.cfg.max_iterations)?;
        let result = state.decode();

        let correct = match self.cfg.metric {
            Metric::Full => result.codeword == expected,
            Metric::Info => {
                result.codeword[..self.block_len()] == expected[..self.block_len()]
            }
        };
        Ok(TrialOutcome {
            correct,
            iterations: result.iterations,
            decoded: result.codeword,
            expected,
            value_sums,
        })
    }

    fn run_uncoded<R: Rng + ?Sized>(
        &self,
        params: &ChannelParams,
        rng: &mut R,
        digits: Vec<Vec<u32>>,
        value_sums: Vec<u64>,
    ) -> Result<TrialOutcome> {
        // Digit sums never reach the field order, so the natural sum is
        // already the modulo-q sum the fold produces.
        let block_len = self.block_len();
        let mut expected = vec![0u32; block_len];
        for block in &digits {
            for (sum, &digit) in expected.iter_mut().zip(block) {
                *sum += digit;
            }
        }

        let blocks = digits
            .iter()
            .map(|block| self.modulate(block))
            .collect::<Result<Vec<_>>>()?;
        let received = transmit(&blocks, params, rng)?;

        let mut decoded = Vec::with_capacity(block_len);
        for observation in &received {
            decoded.extend(self.lattice.demap_hard(&fold(observation)));
        }
        let correct = decoded == expected;
        Ok(TrialOutcome {
            correct,
            iterations: 0,
            decoded,
            expected,
            value_sums,
        })
    }
}
