//! Noisy superposition multiple-access channel.
//!
//! Every transmitter sends one lattice point per subcarrier; the receiver
//! observes the coordinate-wise sum of all transmitted points plus white
//! Gaussian noise. Planar (two-dimensional) symbols can additionally be
//! rotated by a per-transmitter phase error drawn uniformly from
//! [-theta_max, theta_max], modeling imperfect carrier alignment.
//!
//! The noise level is set through a signal-to-noise ratio referenced to
//! the average per-transmitter, per-dimension constellation power
//! ([`symbol_power`]), so SNR values are comparable across field orders.

use crate::lattice::{mod1, LatticeSymbol};
use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use thiserror::Error;

/// Errors from channel configuration and use.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum ChannelError {
    /// At least one transmitter is required.
    #[error("channel needs at least one transmitter")]
    NoTransmitters,
    /// Only scalar and planar symbols are supported.
    #[error("unsupported symbol dimension {0}, expected 1 or 2")]
    BadDimension(usize),
    /// Noise standard deviation must be finite and nonnegative.
    #[error("invalid noise standard deviation {0}")]
    BadSigma(f64),
    /// Phase bound must be finite and nonnegative.
    #[error("invalid phase bound {0}")]
    BadTheta(f64),
    /// Phase rotation is only defined for planar symbols.
    #[error("phase error requires 2-dimensional symbols, got dimension {0}")]
    PhaseNeedsPlanar(usize),
    /// The per-transmitter symbol blocks disagree with the configuration.
    #[error("got {got} transmitter blocks, expected {expected}")]
    WrongTransmitterCount { expected: usize, got: usize },
    /// All transmitters must send the same number of symbols.
    #[error("transmitter {index} sends {got} symbols, expected {expected}")]
    UnequalBlockLengths {
        index: usize,
        expected: usize,
        got: usize,
    },
    /// A symbol has the wrong dimension.
    #[error("symbol of dimension {got}, expected {expected}")]
    WrongSymbolDimension { expected: usize, got: usize },
}

/// How often a fresh phase error is drawn when `theta_max > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMode {
    /// One phase per transmitter, constant over the block.
    #[default]
    PerBlock,
    /// An independent phase per transmitter and symbol.
    PerSymbol,
}

/// Channel configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    num_tx: usize,
    dim: usize,
    sigma_w: f64,
    theta_max: f64,
    phase_mode: PhaseMode,
}

impl ChannelParams {
    /// Validates a configuration. `sigma_w` is the per-dimension noise
    /// standard deviation; `theta_max` bounds the phase error and requires
    /// planar symbols when positive.
    pub fn new(
        num_tx: usize,
        dim: usize,
        sigma_w: f64,
        theta_max: f64,
    ) -> Result<Self, ChannelError> {
        if num_tx == 0 {
            return Err(ChannelError::NoTransmitters);
        }
        if dim != 1 && dim != 2 {
            return Err(ChannelError::BadDimension(dim));
        }
        if !sigma_w.is_finite() || sigma_w < 0.0 {
            return Err(ChannelError::BadSigma(sigma_w));
        }
        if !theta_max.is_finite() || theta_max < 0.0 {
            return Err(ChannelError::BadTheta(theta_max));
        }
        if theta_max > 0.0 && dim != 2 {
            return Err(ChannelError::PhaseNeedsPlanar(dim));
        }
        Ok(Self {
            num_tx,
            dim,
            sigma_w,
            theta_max,
            phase_mode: PhaseMode::default(),
        })
    }

    /// Switches between per-block and per-symbol phase draws.
    pub fn with_phase_mode(mut self, mode: PhaseMode) -> Self {
        self.phase_mode = mode;
        self
    }

    /// Number of transmitters.
    pub fn num_tx(&self) -> usize {
        self.num_tx
    }

    /// Symbol dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per-dimension noise standard deviation.
    pub fn sigma_w(&self) -> f64 {
        self.sigma_w
    }

    /// Phase error bound in radians.
    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// Current phase draw mode.
    pub fn phase_mode(&self) -> PhaseMode {
        self.phase_mode
    }
}

/// Average per-dimension power of the q-point constellation
/// {mod1(u / q) : u in Z_q}.
pub fn symbol_power(field_order: u32) -> f64 {
    let q = field_order as f64;
    (0..field_order)
        .map(|u| {
            let x = mod1(u as f64 / q);
            x * x
        })
        .sum::<f64>()
        / q
}

/// Noise standard deviation that realizes `snr_db` against the
/// per-transmitter, per-dimension constellation power. An infinite SNR
/// yields exactly zero noise.
pub fn sigma_from_snr(snr_db: f64, field_order: u32) -> f64 {
    (symbol_power(field_order) / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// Rotates a planar point by `theta` radians.
pub fn rotate(coords: &[f64], theta: f64) -> Vec<f64> {
    assert_eq!(coords.len(), 2, "rotation is defined for planar points");
    let (sin, cos) = theta.sin_cos();
    vec![
        cos * coords[0] - sin * coords[1],
        sin * coords[0] + cos * coords[1],
    ]
}

/// Transmits one block per transmitter through the channel and returns the
/// raw (unfolded) receiver observations, one `dim`-vector per subcarrier.
///
/// Randomness is drawn in a fixed order so results are reproducible for a
/// given rng state: first the phase errors (all of transmitter k's phases
/// before transmitter k+1's), then the noise, subcarrier-major.
pub fn transmit<R: Rng + ?Sized>(
    blocks: &[Vec<LatticeSymbol>],
    params: &ChannelParams,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, ChannelError> {
    if blocks.len() != params.num_tx {
        return Err(ChannelError::WrongTransmitterCount {
            expected: params.num_tx,
            got: blocks.len(),
        });
    }
    let num_symbols = blocks[0].len();
    for (index, block) in blocks.iter().enumerate() {
        if block.len() != num_symbols {
            return Err(ChannelError::UnequalBlockLengths {
                index,
                expected: num_symbols,
                got: block.len(),
            });
        }
        for symbol in block {
            if symbol.dim() != params.dim {
                return Err(ChannelError::WrongSymbolDimension {
                    expected: params.dim,
                    got: symbol.dim(),
                });
            }
        }
    }

    // Phase errors first, in transmitter order.
    let phases: Vec<Vec<f64>> = if params.theta_max > 0.0 {
        let dist = Uniform::new_inclusive(-params.theta_max, params.theta_max)
            .expect("theta_max is finite and nonnegative");
        (0..params.num_tx)
            .map(|_| match params.phase_mode {
                PhaseMode::PerBlock => vec![dist.sample(rng); num_symbols],
                PhaseMode::PerSymbol => (0..num_symbols).map(|_| dist.sample(rng)).collect(),
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut received = vec![vec![0.0f64; params.dim]; num_symbols];
    for (k, block) in blocks.iter().enumerate() {
        for (i, symbol) in block.iter().enumerate() {
            if params.theta_max > 0.0 {
                let rotated = rotate(symbol.coords(), phases[k][i]);
                for (acc, v) in received[i].iter_mut().zip(&rotated) {
                    *acc += v;
                }
            } else {
                for (acc, v) in received[i].iter_mut().zip(symbol.coords()) {
                    *acc += v;
                }
            }
        }
    }

    // Noise last, subcarrier-major.
    if params.sigma_w > 0.0 {
        let noise = Normal::new(0.0, params.sigma_w).expect("sigma_w is finite and positive");
        for obs in received.iter_mut() {
            for v in obs.iter_mut() {
                *v += noise.sample(rng);
            }
        }
    }
    Ok(received)
}
