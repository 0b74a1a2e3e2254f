//! Sparse parity-check codes over the prime field Z_q.
//!
//! A code is given by an M x N parity-check matrix H with entries in
//! [1, q-1]; codewords are the words c with H c = 0 (mod q). Encoding is
//! systematic: the first N - M positions carry information symbols and the
//! trailing M parity symbols are solved through a cached inverse of the
//! parity submatrix. Linearity over Z_q is the property everything else
//! rests on: the modulo-q sum of codewords is again a codeword.

mod alist;

pub use alist::AlistError;

use crate::field::PrimeField;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Attempts before giving up on drawing a code with an invertible parity
/// submatrix. Singular draws are rare (roughly 1/q per attempt), so hitting
/// this bound signals a degenerate configuration rather than bad luck.
const MAX_CONSTRUCTION_ATTEMPTS: usize = 200;

/// Errors from code construction and encoding.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LdpcError {
    /// The matrix shape is unusable.
    #[error("invalid parity-check shape {rows}x{cols}: need 0 < rows < cols")]
    BadShape { rows: usize, cols: usize },
    /// An entry lies outside the matrix.
    #[error("entry at ({row}, {col}) outside a {rows}x{cols} matrix")]
    EntryOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    /// Entry values must be nonzero field elements.
    #[error("entry value {value} not in [1, {}] for field order {order}", order - 1)]
    BadValue { value: u32, order: u32 },
    /// The same position was given twice.
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    /// Every check must involve at least one symbol.
    #[error("row {0} has no entries")]
    EmptyRow(usize),
    /// Every symbol must be covered by at least one check.
    #[error("column {0} has no entries")]
    EmptyColumn(usize),
    /// The trailing M columns are not invertible, so systematic encoding
    /// cannot solve for parity symbols.
    #[error("parity submatrix (trailing {0} columns) is singular")]
    SingularParity(usize),
    /// A word has the wrong length for this code.
    #[error("word length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    /// A symbol value lies outside [0, q).
    #[error("symbol {value} out of range for field order {order}")]
    SymbolOutOfRange { value: u32, order: u32 },
    /// Random construction parameters cannot produce a valid code.
    #[error("column weight {weight} invalid: need 2 <= weight <= {rows} check rows")]
    BadColumnWeight { weight: usize, rows: usize },
    /// No invertible draw was found within the attempt budget.
    #[error("no invertible parity submatrix in {0} random draws")]
    ConstructionFailed(usize),
}

/// A sparse M x N parity-check matrix over Z_q.
///
/// Entries are stored twice, by row and by column, each sorted by the other
/// index. Row-major edge numbering is fixed at construction and shared with
/// the belief-propagation decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    field: PrimeField,
    num_rows: usize,
    num_cols: usize,
    /// rows[m] = sorted list of (column, value).
    rows: Vec<Vec<(usize, u32)>>,
    /// cols[n] = sorted list of (row, value).
    cols: Vec<Vec<(usize, u32)>>,
    /// Prefix sums of row degrees; edge (m, k-th entry of row m) has id
    /// row_offsets[m] + k.
    row_offsets: Vec<usize>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from (row, col, value) triples. Values must be
    /// nonzero field elements, positions unique, and no row or column may
    /// end up empty.
    pub fn from_entries(
        num_rows: usize,
        num_cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, u32)>,
        field: PrimeField,
    ) -> Result<Self, LdpcError> {
        if num_rows == 0 || num_cols <= num_rows {
            return Err(LdpcError::BadShape {
                rows: num_rows,
                cols: num_cols,
            });
        }
        let q = field.order();
        let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); num_rows];
        let mut cols: Vec<Vec<(usize, u32)>> = vec![Vec::new(); num_cols];
        for (row, col, value) in entries {
            if row >= num_rows || col >= num_cols {
                return Err(LdpcError::EntryOutOfBounds {
                    row,
                    col,
                    rows: num_rows,
                    cols: num_cols,
                });
            }
            if value == 0 || value >= q {
                return Err(LdpcError::BadValue { value, order: q });
            }
            if rows[row].iter().any(|&(c, _)| c == col) {
                return Err(LdpcError::DuplicateEntry { row, col });
            }
            rows[row].push((col, value));
            cols[col].push((row, value));
        }
        if let Some(m) = rows.iter().position(|r| r.is_empty()) {
            return Err(LdpcError::EmptyRow(m));
        }
        if let Some(n) = cols.iter().position(|c| c.is_empty()) {
            return Err(LdpcError::EmptyColumn(n));
        }
        for r in rows.iter_mut() {
            r.sort_unstable_by_key(|&(c, _)| c);
        }
        for c in cols.iter_mut() {
            c.sort_unstable_by_key(|&(r, _)| r);
        }
        let mut row_offsets = Vec::with_capacity(num_rows + 1);
        let mut acc = 0usize;
        for r in &rows {
            row_offsets.push(acc);
            acc += r.len();
        }
        row_offsets.push(acc);
        Ok(Self {
            field,
            num_rows,
            num_cols,
            rows,
            cols,
            row_offsets,
        })
    }

    /// Draws a random regular-column-weight code: every column gets
    /// `column_weight` distinct rows (filling the least loaded rows first,
    /// which keeps row weights near uniform), values uniform in [1, q-1].
    /// Redraws until the parity submatrix is invertible. Deterministic in
    /// `seed`.
    pub fn random(
        num_rows: usize,
        num_cols: usize,
        column_weight: usize,
        field: PrimeField,
        seed: u64,
    ) -> Result<Self, LdpcError> {
        if num_rows == 0 || num_cols <= num_rows {
            return Err(LdpcError::BadShape {
                rows: num_rows,
                cols: num_cols,
            });
        }
        if column_weight < 2 || column_weight > num_rows {
            return Err(LdpcError::BadColumnWeight {
                weight: column_weight,
                rows: num_rows,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = field.order();
        for _ in 0..MAX_CONSTRUCTION_ATTEMPTS {
            let mut load = vec![0usize; num_rows];
            let mut entries = Vec::with_capacity(num_cols * column_weight);
            for col in 0..num_cols {
                let mut order: Vec<usize> = (0..num_rows).collect();
                order.shuffle(&mut rng);
                order.sort_by_key(|&r| load[r]);
                for &row in order.iter().take(column_weight) {
                    load[row] += 1;
                    let value = rng.random_range(1..q);
                    entries.push((row, col, value));
                }
            }
            let matrix = Self::from_entries(num_rows, num_cols, entries, field)?;
            if matrix.parity_submatrix_inverse().is_some() {
                return Ok(matrix);
            }
        }
        Err(LdpcError::ConstructionFailed(MAX_CONSTRUCTION_ATTEMPTS))
    }

    /// The field the code is defined over.
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Number of parity checks M.
    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    /// Code length N.
    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    /// Number of information positions N - M under systematic encoding.
    pub fn info_len(&self) -> usize {
        self.num_cols - self.num_rows
    }

    /// Number of nonzero entries (graph edges).
    pub fn num_entries(&self) -> usize {
        self.row_offsets[self.num_rows]
    }

    /// Entries of check `row`: (column, value), sorted by column.
    pub fn row(&self, row: usize) -> &[(usize, u32)] {
        &self.rows[row]
    }

    /// Entries of symbol `col`: (row, value), sorted by row.
    pub fn column(&self, col: usize) -> &[(usize, u32)] {
        &self.cols[col]
    }

    /// Row-major edge id of the k-th entry of `row`.
    pub(crate) fn edge_id(&self, row: usize, entry_index: usize) -> usize {
        debug_assert!(entry_index < self.rows[row].len());
        self.row_offsets[row] + entry_index
    }

    /// Edge id of the entry at (row, col), if present.
    pub(crate) fn edge_at(&self, row: usize, col: usize) -> Option<usize> {
        let k = self.rows[row]
            .binary_search_by_key(&col, |&(c, _)| c)
            .ok()?;
        Some(self.edge_id(row, k))
    }

    /// The syndrome H w mod q. Zero exactly on codewords.
    pub fn syndrome(&self, word: &[u32]) -> Result<Vec<u32>, LdpcError> {
        if word.len() != self.num_cols {
            return Err(LdpcError::LengthMismatch {
                expected: self.num_cols,
                got: word.len(),
            });
        }
        let f = self.field;
        for &w in word {
            if w >= f.order() {
                return Err(LdpcError::SymbolOutOfRange {
                    value: w,
                    order: f.order(),
                });
            }
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .fold(0u32, |acc, &(n, v)| f.add(acc, f.mul(v, word[n])))
            })
            .collect())
    }

    /// Dense inverse of the trailing M x M submatrix, row-major, or None
    /// if it is singular.
    fn parity_submatrix_inverse(&self) -> Option<Vec<u32>> {
        let m = self.num_rows;
        let b = self.info_len();
        let f = self.field;
        // Augmented [A | I] rows, reduced in place by Gauss-Jordan.
        let mut a = vec![0u32; m * m];
        let mut inv = vec![0u32; m * m];
        for r in 0..m {
            for &(c, v) in &self.rows[r] {
                if c >= b {
                    a[r * m + (c - b)] = v;
                }
            }
            inv[r * m + r] = 1;
        }
        for col in 0..m {
            let pivot = (col..m).find(|&r| a[r * m + col] != 0)?;
            if pivot != col {
                for j in 0..m {
                    a.swap(col * m + j, pivot * m + j);
                    inv.swap(col * m + j, pivot * m + j);
                }
            }
            let scale = f.inv(a[col * m + col]).expect("pivot is nonzero");
            for j in 0..m {
                a[col * m + j] = f.mul(a[col * m + j], scale);
                inv[col * m + j] = f.mul(inv[col * m + j], scale);
            }
            for r in 0..m {
                if r == col || a[r * m + col] == 0 {
                    continue;
                }
                let factor = a[r * m + col];
                for j in 0..m {
                    a[r * m + j] = f.sub(a[r * m + j], f.mul(factor, a[col * m + j]));
                    inv[r * m + j] = f.sub(inv[r * m + j], f.mul(factor, inv[col * m + j]));
                }
            }
        }
        Some(inv)
    }

    /// Parses the non-binary alist text format. See [`alist`] for the
    /// layout; errors name the offending line.
    pub fn from_alist(text: &str, field: PrimeField) -> Result<Self, AlistError> {
        alist::parse(text, field)
    }

    /// Serializes to the non-binary alist text format. The output is
    /// canonical (single spaces, one trailing newline) so equal matrices
    /// serialize to identical bytes.
    pub fn to_alist(&self) -> String {
        alist::serialize(self)
    }
}

/// A codeword with its systematic split point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    symbols: Vec<u32>,
    info_len: usize,
}

impl Codeword {
    /// All N symbols, information part first.
    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// The leading information symbols.
    pub fn info(&self) -> &[u32] {
        &self.symbols[..self.info_len]
    }

    /// The trailing parity symbols.
    pub fn parity(&self) -> &[u32] {
        &self.symbols[self.info_len..]
    }

    /// Number of information positions.
    pub fn info_len(&self) -> usize {
        self.info_len
    }

    /// Consumes the codeword, returning its symbols.
    pub fn into_symbols(self) -> Vec<u32> {
        self.symbols
    }
}

/// Systematic encoder with a cached inverse of the parity submatrix.
#[derive(Debug, Clone)]
pub struct Encoder {
    matrix: ParityCheckMatrix,
    /// Dense M x M inverse of the trailing columns of H, row-major.
    parity_inverse: Vec<u32>,
}

impl Encoder {
    /// Prepares systematic encoding for `matrix`. Fails if the trailing
    /// M x M submatrix is singular.
    pub fn new(matrix: ParityCheckMatrix) -> Result<Self, LdpcError> {
        let parity_inverse = matrix
            .parity_submatrix_inverse()
            .ok_or(LdpcError::SingularParity(matrix.num_rows))?;
        Ok(Self {
            matrix,
            parity_inverse,
        })
    }

    /// The code's parity-check matrix.
    pub fn matrix(&self) -> &ParityCheckMatrix {
        &self.matrix
    }

    /// Encodes N - M information symbols into a codeword [info, parity]
    /// with zero syndrome.
    pub fn encode(&self, info: &[u32]) -> Result<Codeword, LdpcError> {
        let m = self.matrix.num_rows;
        let b = self.matrix.info_len();
        let f = self.matrix.field;
        if info.len() != b {
            return Err(LdpcError::LengthMismatch {
                expected: b,
                got: info.len(),
            });
        }
        for &s in info {
            if s >= f.order() {
                return Err(LdpcError::SymbolOutOfRange {
                    value: s,
                    order: f.order(),
                });
            }
        }
        // Residual of each check restricted to information columns.
        let mut t = vec![0u32; m];
        for (r, row) in self.matrix.rows.iter().enumerate() {
            for &(n, v) in row {
                if n < b {
                    t[r] = f.add(t[r], f.mul(v, info[n]));
                }
            }
        }
        // Parity solves A g = -t through the cached inverse.
        let mut symbols = Vec::with_capacity(self.matrix.num_cols);
        symbols.extend_from_slice(info);
        for r in 0..m {
            let mut g = 0u32;
            for (j, &tj) in t.iter().enumerate() {
                g = f.add(g, f.mul(self.parity_inverse[r * m + j], f.neg(tj)));
            }
            symbols.push(g);
        }
        debug_assert!(self
            .matrix
            .syndrome(&symbols)
            .is_ok_and(|s| s.iter().all(|&x| x == 0)));
        Ok(Codeword {
            symbols,
            info_len: b,
        })
    }
}
