//! Digital computation over the air.
//!
//! Several transmitters share a channel that adds their signals. Instead of
//! fighting that interference, each transmitter encodes its integers with
//! the same linear code over a prime field Z_q and maps the code symbols
//! onto a nested cubic lattice. Superposition then does the arithmetic:
//! the folded receiver observation sits on the lattice point of the
//! modulo-q sum of the transmitted symbols, which by linearity is itself a
//! codeword. One belief-propagation decode recovers the digit-wise sum,
//! and because the field is chosen large enough that digit sums never
//! wrap, those digits recompose into the exact integer sums.
//!
//! Modules, in pipeline order:
//!
//! * [`field`]: arithmetic over Z_q and the choice of field order.
//! * [`codec`]: packing integers into fixed-length digit vectors.
//! * [`ldpc`]: sparse parity-check codes and systematic encoding.
//! * [`lattice`]: symbol-to-constellation mapping in the unit cell.
//! * [`channel`]: noisy superposition with optional phase error.
//! * [`demod`]: folding and posterior beliefs for the symbol sum.
//! * [`decoder`]: log-domain belief propagation over Z_q.
//!
//! A noiseless end-to-end pass:
//!
//! ```
//! use aircomp::channel::{transmit, ChannelParams};
//! use aircomp::decoder::DecoderState;
//! use aircomp::demod::{Demodulator, PriorProfile};
//! use aircomp::field::PrimeField;
//! use aircomp::lattice::{segment, LatticeConfig};
//! use aircomp::ldpc::{Encoder, ParityCheckMatrix};
//! use rand::SeedableRng;
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! // Two transmitters send binary digits, encoded over Z_3 so that digit
//! // sums (at most 2) never wrap.
//! let field = PrimeField::new(3)?;
//! let h = ParityCheckMatrix::from_entries(
//!     2,
//!     4,
//!     [(0, 0, 1), (0, 1, 2), (0, 2, 1), (1, 1, 1), (1, 2, 1), (1, 3, 1)],
//!     field,
//! )?;
//! let encoder = Encoder::new(h.clone())?;
//! let cfg = LatticeConfig::new(1, 3)?;
//!
//! // Both transmitters use the same code and constellation.
//! let digit_blocks = [[1u32, 0], [1, 1]];
//! let mut blocks = Vec::new();
//! for digits in &digit_blocks {
//!     let codeword = encoder.encode(digits)?;
//!     let points = segment(codeword.symbols(), cfg.dim())?
//!         .iter()
//!         .map(|group| cfg.map(group))
//!         .collect::<Result<Vec<_>, _>>()?;
//!     blocks.push(points);
//! }
//!
//! // The channel superposes the constellation points.
//! let params = ChannelParams::new(2, 1, 0.0, 0.0)?;
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
//! let received = transmit(&blocks, &params, &mut rng)?;
//!
//! // The receiver decodes the modulo-3 sum of the two codewords directly.
//! let profile = PriorProfile::new(2, 2, 3)?;
//! let demod = Demodulator::new(&profile, cfg, 0.0)?;
//! let beliefs = demod.codeword_llrs(&received, h.info_len())?;
//! let result = DecoderState::new(&h, beliefs, 10)?.decode();
//!
//! assert!(result.converged);
//! // Information positions carry the digit-wise natural sums 1+1 and 0+1.
//! assert_eq!(&result.codeword[..2], &[2, 1]);
//! # Ok(())
//! # }
//! ```

pub mod channel;
pub mod codec;
pub mod decoder;
pub mod demod;
pub mod field;
pub mod lattice;
pub mod ldpc;
