//! Nested cubic lattice modulation.
//!
//! Field symbols are mapped to points of the scaled integer lattice
//! (1/q)Z^D reduced into the unit cell [-1/2, 1/2)^D, which is the Voronoi
//! region of the coarse lattice Z^D. The key property is linearity: adding
//! channel points and reducing modulo the coarse lattice lands on the point
//! of the modulo-q symbol sum, so a receiver observing a superposition can
//! demap the sum directly.
//!
//! All reductions use the half-open convention: 0.5 wraps to -0.5, and the
//! matching integer quantizer rounds half toward positive infinity.

use thiserror::Error;

/// Errors from lattice construction and mapping.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum LatticeError {
    /// Only scalar and planar constellations are supported.
    #[error("unsupported lattice dimension {0}, expected 1 or 2")]
    BadDimension(usize),
    /// The fine lattice needs at least two points per dimension.
    #[error("field order {0} is too small for a lattice constellation")]
    BadOrder(u32),
    /// A symbol group does not match the lattice dimension.
    #[error("got {got} symbols for a {expected}-dimensional lattice point")]
    WrongSymbolCount { expected: usize, got: usize },
    /// A symbol value lies outside [0, q).
    #[error("symbol {value} out of range for field order {order}")]
    SymbolOutOfRange { value: u32, order: u32 },
    /// A coordinate lies outside the unit cell [-1/2, 1/2).
    #[error("coordinate {0} outside [-1/2, 1/2)")]
    CoordOutOfCell(f64),
    /// A codeword cannot be split into whole lattice points.
    #[error("codeword of {len} symbols does not fill {dim}-dimensional points")]
    UnevenSegments { len: usize, dim: usize },
}

/// Splits x into (k, r) with k integer, r in [-1/2, 1/2) and x = k + r
/// as floating-point values.
fn split(x: f64) -> (i64, f64) {
    debug_assert!(x.is_finite());
    let mut k = (x + 0.5).floor();
    let mut r = x - k;
    // floor(x + 0.5) can land one off when x + 0.5 rounds across an
    // integer; one correction step restores the range. The second clause
    // catches x just below a half-integer where x - k rounds to exactly
    // -0.5 even though k is one too high.
    if r < -0.5 || (r == -0.5 && k + r != x) {
        k -= 1.0;
        r = x - k;
    } else if r >= 0.5 {
        k += 1.0;
        r = x - k;
    }
    debug_assert!((-0.5..0.5).contains(&r));
    debug_assert!(k + r == x);
    (k as i64, r)
}

/// Reduces x into [-1/2, 1/2), the Voronoi cell of Z. 0.5 wraps to -0.5.
pub fn mod1(x: f64) -> f64 {
    split(x).1
}

/// Nearest integer to x, rounding half toward positive infinity.
/// Consistent with [`mod1`]: x = quantize(x) + mod1(x).
pub fn quantize(x: f64) -> i64 {
    split(x).0
}

/// A point of the unit cell [-1/2, 1/2)^D.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSymbol {
    coords: Vec<f64>,
}

impl LatticeSymbol {
    /// Wraps coordinates, rejecting any outside the unit cell.
    pub fn new(coords: Vec<f64>) -> Result<Self, LatticeError> {
        for &c in &coords {
            if !(-0.5..0.5).contains(&c) {
                return Err(LatticeError::CoordOutOfCell(c));
            }
        }
        Ok(Self { coords })
    }

    /// For coordinates already reduced by [`mod1`].
    pub(crate) fn from_reduced(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| (-0.5..0.5).contains(c)));
        Self { coords }
    }

    /// The coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of dimensions.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Shape of the constellation: dimension count and points per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeConfig {
    dim: usize,
    field_order: u32,
}

impl LatticeConfig {
    /// A `dim`-dimensional constellation with `field_order` points per
    /// dimension. Dimension must be 1 or 2.
    pub fn new(dim: usize, field_order: u32) -> Result<Self, LatticeError> {
        if dim != 1 && dim != 2 {
            return Err(LatticeError::BadDimension(dim));
        }
        if field_order < 2 {
            return Err(LatticeError::BadOrder(field_order));
        }
        Ok(Self { dim, field_order })
    }

    /// Number of dimensions per lattice point.
    pub fn dim(self) -> usize {
        self.dim
    }

    /// Field order q, the number of constellation points per dimension.
    pub fn field_order(self) -> u32 {
        self.field_order
    }

    /// Total constellation size q^D.
    pub fn num_points(self) -> u64 {
        (self.field_order as u64).pow(self.dim as u32)
    }

    /// Maps a group of D field symbols to its lattice point: each
    /// coordinate is mod1(u / q).
    pub fn map(self, symbols: &[u32]) -> Result<LatticeSymbol, LatticeError> {
        if symbols.len() != self.dim {
            return Err(LatticeError::WrongSymbolCount {
                expected: self.dim,
                got: symbols.len(),
            });
        }
        let q = self.field_order;
        let coords = symbols
            .iter()
            .map(|&u| {
                if u >= q {
                    return Err(LatticeError::SymbolOutOfRange {
                        value: u,
                        order: q,
                    });
                }
                Ok(mod1(u as f64 / q as f64))
            })
            .collect::<Result<_, _>>()?;
        Ok(LatticeSymbol::from_reduced(coords))
    }

    /// Nearest-point demapping: each coordinate goes to round(q * t) mod q.
    /// Inverse of [`LatticeConfig::map`] on exact constellation points.
    pub fn demap_hard(self, point: &LatticeSymbol) -> Vec<u32> {
        let q = self.field_order as i64;
        point
            .coords
            .iter()
            .map(|&t| quantize(self.field_order as f64 * t).rem_euclid(q) as u32)
            .collect()
    }
}

/// Splits a codeword into consecutive groups of `dim` symbols, one lattice
/// point each. The symbol count must divide evenly.
pub fn segment(codeword: &[u32], dim: usize) -> Result<Vec<Vec<u32>>, LatticeError> {
    if dim == 0 || codeword.len() % dim != 0 {
        return Err(LatticeError::UnevenSegments {
            len: codeword.len(),
            dim,
        });
    }
    Ok(codeword.chunks(dim).map(|c| c.to_vec()).collect())
}

/// Concatenates symbol groups back into a flat codeword.
pub fn desegment(groups: &[Vec<u32>]) -> Vec<u32> {
    groups.iter().flatten().copied().collect()
}
