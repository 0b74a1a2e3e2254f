//! Posterior demodulation of folded channel observations.
//!
//! The receiver reduces each raw observation into the unit cell with
//! [`fold`] and computes per-position beliefs over Z_q for the modulo-q
//! symbol sum. Folding wraps the Gaussian noise, so the default likelihood
//! kernel sums the densities of the neighboring coarse-lattice replicas
//! (offsets in {-1, 0, 1} per dimension, which is accurate for noise well
//! below the cell size). A strict single-replica kernel is available for
//! comparison.
//!
//! Information positions carry digit sums of independent uniform digits,
//! so their prior over Z_q is the binned count profile [`PriorProfile`]
//! rather than uniform; parity positions are uniform because the parity
//! map mixes positions across the whole field. In two dimensions each
//! belief marginalizes over the companion coordinate of the same
//! subcarrier, weighting companion values by that position's own prior.

use crate::decoder::Llrv;
use crate::lattice::{mod1, LatticeConfig, LatticeSymbol};
use thiserror::Error;

/// Errors from demodulator configuration and use.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum DemodError {
    /// At least one transmitter is required.
    #[error("prior profile needs at least one transmitter")]
    NoTransmitters,
    /// Digits need a radix of at least 2.
    #[error("radix {0} is not a valid digit base")]
    BadRadix(u64),
    /// Digit sums must fit below the field order.
    #[error(
        "digit sums reach {num_tx} * ({radix} - 1) = {max_sum}, beyond field order {order} - 1"
    )]
    FieldTooSmall {
        num_tx: usize,
        radix: u64,
        max_sum: u64,
        order: u32,
    },
    /// Profile and lattice disagree on the field order.
    #[error("prior profile is over Z_{profile} but the lattice has order {lattice}")]
    OrderMismatch { profile: u32, lattice: u32 },
    /// Noise standard deviation must be finite and nonnegative.
    #[error("invalid noise standard deviation {0}")]
    BadSigma(f64),
    /// Likelihoods need strictly positive noise; the noiseless case is
    /// handled by hard demapping in [`Demodulator::codeword_llrs`].
    #[error("symbol likelihoods need sigma_w > 0; use codeword_llrs for noiseless blocks")]
    NoiselessLikelihood,
    /// A point or kind list does not match the lattice dimension.
    #[error("got {got} entries for a {expected}-dimensional lattice")]
    DimensionMismatch { expected: usize, got: usize },
    /// An observation coordinate is not a finite number.
    #[error("non-finite observation coordinate {0}")]
    NonFiniteObservation(f64),
    /// The systematic split point exceeds the block.
    #[error("info length {info_len} exceeds block of {total} positions")]
    InfoLenTooLarge { info_len: usize, total: usize },
}

/// Whether a codeword position carries an information digit sum or a
/// parity symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionKind {
    /// Digit-sum position: prior follows the count profile.
    Information,
    /// Parity position: uniform prior over the field.
    Parity,
}

/// Likelihood kernel for folded observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMode {
    /// Sum the Gaussian density over coarse-lattice replicas in
    /// {-1, 0, 1} per dimension. Correct up to replicas beyond one cell,
    /// which are negligible for sigma well below 1.
    #[default]
    Wrapped,
    /// Single-replica Gaussian, ignoring the fold. Kept for comparison.
    Unwrapped,
}

/// Prior of an information position: the number of ways `num_tx` uniform
/// digits below `radix` sum to each field value.
///
/// The counts live on 0..=num_tx*(radix-1) and must fit below the field
/// order, which is exactly the condition for modulo-q sums to equal
/// natural sums.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorProfile {
    counts: Vec<u64>,
    log_counts: Vec<f64>,
    num_tx: usize,
    radix: u64,
    order: u32,
}

impl PriorProfile {
    /// Builds the digit-sum count profile over Z_q.
    pub fn new(num_tx: usize, radix: u64, field_order: u32) -> Result<Self, DemodError> {
        if num_tx == 0 {
            return Err(DemodError::NoTransmitters);
        }
        if radix < 2 {
            return Err(DemodError::BadRadix(radix));
        }
        let max_sum = num_tx as u64 * (radix - 1);
        if field_order < 2 || max_sum > (field_order - 1) as u64 {
            return Err(DemodError::FieldTooSmall {
                num_tx,
                radix,
                max_sum,
                order: field_order,
            });
        }
        // num_tx-fold convolution of the uniform digit count vector.
        let mut counts = vec![1u64; radix as usize];
        for _ in 1..num_tx {
            let mut next = vec![0u64; counts.len() + radix as usize - 1];
            for (i, &a) in counts.iter().enumerate() {
                for d in 0..radix as usize {
                    next[i + d] += a;
                }
            }
            counts = next;
        }
        counts.resize(field_order as usize, 0);
        let log_counts = counts
            .iter()
            .map(|&c| if c == 0 { f64::NEG_INFINITY } else { (c as f64).ln() })
            .collect();
        Ok(Self {
            counts,
            log_counts,
            num_tx,
            radix,
            order: field_order,
        })
    }

    /// Count of digit tuples summing to each field value, length q.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of transmitters the profile describes.
    pub fn num_tx(&self) -> usize {
        self.num_tx
    }

    /// Digit radix.
    pub fn radix(&self) -> u64 {
        self.radix
    }

    /// Field order q.
    pub fn field_order(&self) -> u32 {
        self.order
    }

    /// Unnormalized log prior weight of `value` at a position of `kind`:
    /// ln(count) for information positions (negative infinity on zero
    /// counts), 0 for parity positions.
    pub fn log_weight(&self, value: u32, kind: PositionKind) -> f64 {
        match kind {
            PositionKind::Information => self.log_counts[value as usize],
            PositionKind::Parity => 0.0,
        }
    }
}

/// Reduces a raw observation into the unit cell, coordinate by coordinate.
/// Coordinates must be finite.
pub fn fold(observation: &[f64]) -> LatticeSymbol {
    LatticeSymbol::from_reduced(observation.iter().map(|&y| mod1(y)).collect())
}

/// Computes per-position beliefs over Z_q from folded observations.
#[derive(Debug, Clone)]
pub struct Demodulator<'a> {
    profile: &'a PriorProfile,
    cfg: LatticeConfig,
    sigma_w: f64,
    kernel: KernelMode,
}

impl<'a> Demodulator<'a> {
    /// Ties a prior profile to a lattice and noise level. `sigma_w` may be
    /// zero, in which case only [`Demodulator::codeword_llrs`] (hard
    /// pinning) is available.
    pub fn new(
        profile: &'a PriorProfile,
        cfg: LatticeConfig,
        sigma_w: f64,
    ) -> Result<Self, DemodError> {
        if profile.order != cfg.field_order() {
            return Err(DemodError::OrderMismatch {
                profile: profile.order,
                lattice: cfg.field_order(),
            });
        }
        if !sigma_w.is_finite() || sigma_w < 0.0 {
            return Err(DemodError::BadSigma(sigma_w));
        }
        Ok(Self {
            profile,
            cfg,
            sigma_w,
            kernel: KernelMode::default(),
        })
    }

    /// Selects the likelihood kernel.
    pub fn with_kernel(mut self, kernel: KernelMode) -> Self {
        self.kernel = kernel;
        self
    }

    /// Log likelihood (up to a constant) of observing folded point `t`
    /// given the constellation point `x`.
    fn log_kernel(&self, t: &[f64], x: &[f64]) -> f64 {
        let inv_two_sigma_sq = 1.0 / (2.0 * self.sigma_w * self.sigma_w);
        match self.kernel {
            KernelMode::Unwrapped => {
                let d2: f64 = t
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum();
                -d2 * inv_two_sigma_sq
            }
            KernelMode::Wrapped => {
                // Sum exp(-|t - x - z|^2 / 2 sigma^2) over replica offsets
                // z in {-1, 0, 1}^D, evaluated as a product of per-dimension
                // sums since the offsets factor.
                t.iter()
                    .zip(x)
                    .map(|(&a, &b)| {
                        let terms = [-1.0f64, 0.0, 1.0].map(|z| {
                            let d = a - b - z;
                            -d * d * inv_two_sigma_sq
                        });
                        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        m + terms.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
                    })
                    .sum()
            }
        }
    }

    /// Posterior belief of each of the D symbols of one folded
    /// observation. `kinds` selects the prior per dimension; in two
    /// dimensions each belief marginalizes over the companion value
    /// weighted by the companion position's own prior.
    pub fn symbol_llrs(
        &self,
        point: &LatticeSymbol,
        kinds: &[PositionKind],
    ) -> Result<Vec<Llrv>, DemodError> {
        let dim = self.cfg.dim();
        let q = self.cfg.field_order();
        if point.dim() != dim {
            return Err(DemodError::DimensionMismatch {
                expected: dim,
                got: point.dim(),
            });
        }
        if kinds.len() != dim {
            return Err(DemodError::DimensionMismatch {
                expected: dim,
                got: kinds.len(),
            });
        }
        if self.sigma_w == 0.0 {
            return Err(DemodError::NoiselessLikelihood);
        }

        // Joint log score of every candidate symbol tuple.
        let num_points = self.cfg.num_points() as usize;
        let mut candidates = vec![0u32; dim];
        let mut scores = Vec::with_capacity(num_points);
        let mut tuples = Vec::with_capacity(num_points);
        for index in 0..num_points {
            let mut rest = index;
            for c in candidates.iter_mut() {
                *c = (rest % q as usize) as u32;
                rest /= q as usize;
            }
            let x = self.cfg.map(&candidates).expect("candidate is in range");
            scores.push(self.log_kernel(point.coords(), x.coords()));
            tuples.push(candidates.clone());
        }

        let mut beliefs = Vec::with_capacity(dim);
        for d in 0..dim {
            // Marginal numerators: for each value of dimension d, logsumexp
            // of kernel plus companion priors over all matching tuples.
            let mut terms: Vec<Vec<f64>> = vec![Vec::new(); q as usize];
            for (tuple, &score) in tuples.iter().zip(&scores) {
                let companion_weight: f64 = (0..dim)
                    .filter(|&e| e != d)
                    .map(|e| self.profile.log_weight(tuple[e], kinds[e]))
                    .sum();
                terms[tuple[d] as usize].push(score + companion_weight);
            }
            let nums: Vec<f64> = terms.iter().map(|t| logsumexp(t)).collect();
            let values = (1..q as usize)
                .map(|alpha| {
                    let own_ratio = self.profile.log_weight(alpha as u32, kinds[d])
                        - self.profile.log_weight(0, kinds[d]);
                    nums[alpha] - nums[0] + own_ratio
                })
                .collect();
            beliefs.push(Llrv::from_log_ratios(values));
        }
        Ok(beliefs)
    }

    /// Beliefs for a whole received block, one [`Llrv`] per codeword
    /// position. Observations are folded here; position i*D + d is
    /// dimension d of subcarrier i (the layout produced by segmenting a
    /// codeword into D-symbol groups). Positions below `info_len` use the
    /// information prior, the rest the parity prior.
    ///
    /// With zero noise the folded points are demapped exactly and each
    /// position is pinned to its demapped value.
    pub fn codeword_llrs(
        &self,
        received: &[Vec<f64>],
        info_len: usize,
    ) -> Result<Vec<Llrv>, DemodError> {
        let dim = self.cfg.dim();
        let q = self.cfg.field_order();
        let total = received.len() * dim;
        if info_len > total {
            return Err(DemodError::InfoLenTooLarge { info_len, total });
        }
        let mut beliefs = Vec::with_capacity(total);
        for (i, observation) in received.iter().enumerate() {
            if observation.len() != dim {
                return Err(DemodError::DimensionMismatch {
                    expected: dim,
                    got: observation.len(),
                });
            }
            for &y in observation {
                if !y.is_finite() {
                    return Err(DemodError::NonFiniteObservation(y));
                }
            }
            let folded = fold(observation);
            if self.sigma_w == 0.0 {
                for value in self.cfg.demap_hard(&folded) {
                    beliefs.push(Llrv::pinned(value, q));
                }
            } else {
                let kinds: Vec<PositionKind> = (0..dim)
                    .map(|d| {
                        if i * dim + d < info_len {
                            PositionKind::Information
                        } else {
                            PositionKind::Parity
                        }
                    })
                    .collect();
                beliefs.extend(self.symbol_llrs(&folded, &kinds)?);
            }
        }
        Ok(beliefs)
    }
}

fn logsumexp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|&t| (t - m).exp()).sum::<f64>().ln()
}
