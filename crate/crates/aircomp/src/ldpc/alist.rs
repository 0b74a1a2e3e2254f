//! Text serialization of parity-check matrices over Z_q.
//!
//! The format extends the classic alist layout with an entry value after
//! each row index, since entries here are field elements rather than bits:
//!
//! ```text
//! line 1:       N M
//! line 2:       max-column-degree max-row-degree
//! line 3:       N column degrees
//! line 4:       M row degrees
//! lines 5..4+N: for each column, its (row, value) pairs, rows 1-indexed
//! ```
//!
//! The writer is canonical (single spaces, ascending indices, one trailing
//! newline), so equal matrices serialize to identical bytes and a parse
//! followed by a serialize reproduces the input exactly.

use super::{LdpcError, ParityCheckMatrix};
use crate::field::PrimeField;
use thiserror::Error;

/// A parse failure, pointing at the 1-indexed offending line.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("alist line {line}: {message}")]
pub struct AlistError {
    /// 1-indexed line the problem was detected on (0 for internal errors).
    pub line: usize,
    /// What went wrong.
    pub message: String,
}

impl AlistError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

fn parse_line(lines: &[&str], index: usize, expect: usize) -> Result<Vec<usize>, AlistError> {
    let line_no = index + 1;
    let line = lines
        .get(index)
        .ok_or_else(|| AlistError::new(line_no, "unexpected end of file"))?;
    let values = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| AlistError::new(line_no, format!("invalid integer '{tok}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != expect {
        return Err(AlistError::new(
            line_no,
            format!("expected {expect} integers, found {}", values.len()),
        ));
    }
    Ok(values)
}

pub(super) fn parse(text: &str, field: PrimeField) -> Result<ParityCheckMatrix, AlistError> {
    let q = field.order() as usize;
    let lines: Vec<&str> = text.lines().collect();

    let header = parse_line(&lines, 0, 2)?;
    let (num_cols, num_rows) = (header[0], header[1]);
    if num_rows == 0 || num_cols == 0 {
        return Err(AlistError::new(1, "matrix dimensions must be positive"));
    }
    if num_rows >= num_cols {
        return Err(AlistError::new(
            1,
            format!("need more columns than checks, got {num_cols} columns, {num_rows} checks"),
        ));
    }

    let maxima = parse_line(&lines, 1, 2)?;
    let (max_col_degree, max_row_degree) = (maxima[0], maxima[1]);

    let col_degrees = parse_line(&lines, 2, num_cols)?;
    for (c, &d) in col_degrees.iter().enumerate() {
        if d == 0 {
            return Err(AlistError::new(3, format!("column {} has no entries", c + 1)));
        }
        if d > max_col_degree {
            return Err(AlistError::new(
                3,
                format!(
                    "column {} degree {d} exceeds declared maximum {max_col_degree}",
                    c + 1
                ),
            ));
        }
    }
    if col_degrees.iter().max() != Some(&max_col_degree) {
        return Err(AlistError::new(
            2,
            format!("declared maximum column degree {max_col_degree} is never reached"),
        ));
    }

    let row_degrees = parse_line(&lines, 3, num_rows)?;
    for (r, &d) in row_degrees.iter().enumerate() {
        if d == 0 {
            return Err(AlistError::new(4, format!("row {} has no entries", r + 1)));
        }
        if d > max_row_degree {
            return Err(AlistError::new(
                4,
                format!(
                    "row {} degree {d} exceeds declared maximum {max_row_degree}",
                    r + 1
                ),
            ));
        }
    }
    if row_degrees.iter().max() != Some(&max_row_degree) {
        return Err(AlistError::new(
            2,
            format!("declared maximum row degree {max_row_degree} is never reached"),
        ));
    }

    let mut entries = Vec::new();
    let mut row_counts = vec![0usize; num_rows];
    for col in 0..num_cols {
        let index = 4 + col;
        let line_no = index + 1;
        let tokens = parse_line(&lines, index, 2 * col_degrees[col]).map_err(|e| {
            if e.line == line_no && e.message.starts_with("expected") {
                AlistError::new(
                    line_no,
                    format!(
                        "column {}: expected {} (row, value) pairs",
                        col + 1,
                        col_degrees[col]
                    ),
                )
            } else {
                e
            }
        })?;
        let mut seen_rows = Vec::with_capacity(col_degrees[col]);
        for pair in tokens.chunks(2) {
            let (row_1idx, value) = (pair[0], pair[1]);
            if row_1idx == 0 || row_1idx > num_rows {
                return Err(AlistError::new(
                    line_no,
                    format!("row index {row_1idx} outside [1, {num_rows}]"),
                ));
            }
            if value == 0 || value >= q {
                return Err(AlistError::new(
                    line_no,
                    format!("entry value {value} not in [1, {}] for field order {q}", q - 1),
                ));
            }
            let row = row_1idx - 1;
            if seen_rows.contains(&row) {
                return Err(AlistError::new(
                    line_no,
                    format!("row {row_1idx} listed twice in column {}", col + 1),
                ));
            }
            seen_rows.push(row);
            row_counts[row] += 1;
            entries.push((row, col, value as u32));
        }
    }

    for (r, (&declared, &actual)) in row_degrees.iter().zip(&row_counts).enumerate() {
        if declared != actual {
            return Err(AlistError::new(
                4,
                format!(
                    "row {} declares {declared} entries but columns list {actual}",
                    r + 1
                ),
            ));
        }
    }

    for (index, line) in lines.iter().enumerate().skip(4 + num_cols) {
        if !line.trim().is_empty() {
            return Err(AlistError::new(index + 1, "unexpected trailing content"));
        }
    }

    ParityCheckMatrix::from_entries(num_rows, num_cols, entries, field).map_err(|e| {
        // Everything from_entries checks was validated above, so reaching
        // this is a parser bug, not a malformed file.
        debug_assert!(matches!(e, LdpcError::BadShape { .. }));
        AlistError::new(0, e.to_string())
    })
}

pub(super) fn serialize(matrix: &ParityCheckMatrix) -> String {
    use std::fmt::Write;

    let num_cols = matrix.num_cols();
    let num_rows = matrix.num_rows();
    let col_degrees: Vec<usize> = (0..num_cols).map(|n| matrix.column(n).len()).collect();
    let row_degrees: Vec<usize> = (0..num_rows).map(|m| matrix.row(m).len()).collect();

    let join = |values: &[usize]| {
        values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut out = String::new();
    writeln!(out, "{num_cols} {num_rows}").unwrap();
    writeln!(
        out,
        "{} {}",
        col_degrees.iter().max().unwrap(),
        row_degrees.iter().max().unwrap()
    )
    .unwrap();
    writeln!(out, "{}", join(&col_degrees)).unwrap();
    writeln!(out, "{}", join(&row_degrees)).unwrap();
    for n in 0..num_cols {
        let pairs: Vec<String> = matrix
            .column(n)
            .iter()
            .map(|&(row, value)| format!("{} {}", row + 1, value))
            .collect();
        writeln!(out, "{}", pairs.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::Encoder;

    const SMALL: &str = "4 2\n2 3\n1 2 2 1\n3 3\n1 1\n1 2 2 1\n1 1 2 1\n2 1\n";

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn parses_small_fixture() {
        let h = ParityCheckMatrix::from_alist(SMALL, f3()).unwrap();
        assert_eq!(h.num_rows(), 2);
        assert_eq!(h.num_cols(), 4);
        assert_eq!(h.row(0), &[(0, 1), (1, 2), (2, 1)]);
        assert_eq!(h.row(1), &[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(h.syndrome(&[1, 1, 0, 2]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn serialize_is_canonical_round_trip() {
        let h = ParityCheckMatrix::from_alist(SMALL, f3()).unwrap();
        assert_eq!(h.to_alist(), SMALL);
        let reparsed = ParityCheckMatrix::from_alist(&h.to_alist(), f3()).unwrap();
        assert_eq!(reparsed, h);
    }

    #[test]
    fn random_matrix_round_trips() {
        let f = PrimeField::new(5).unwrap();
        let h = ParityCheckMatrix::random(12, 30, 3, f, 3).unwrap();
        let text = h.to_alist();
        let back = ParityCheckMatrix::from_alist(&text, f).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_alist(), text);
    }

    #[test]
    fn repo_fixtures_parse_and_encode() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
        for name in ["small-z3.alist", "tree-z3.alist"] {
            let text = std::fs::read_to_string(format!("{dir}/{name}"))
                .unwrap_or_else(|e| panic!("reading {name}: {e}"));
            let h = ParityCheckMatrix::from_alist(&text, f3())
                .unwrap_or_else(|e| panic!("parsing {name}: {e}"));
            assert_eq!(h.to_alist(), text, "{name} is not in canonical form");
            Encoder::new(h).unwrap_or_else(|e| panic!("encoding {name}: {e}"));
        }
    }

    fn err_line(text: &str) -> (usize, String) {
        let e = ParityCheckMatrix::from_alist(text, f3()).unwrap_err();
        (e.line, e.message)
    }

    #[test]
    fn errors_name_the_offending_line() {
        // Value out of range for Z_3 in column 1 (line 5).
        let (line, msg) = err_line("4 2\n2 3\n1 2 2 1\n3 3\n1 3\n1 2 2 1\n1 1 2 1\n2 1\n");
        assert_eq!(line, 5);
        assert!(msg.contains("value 3"), "{msg}");

        // Zero value.
        let (line, msg) = err_line("4 2\n2 3\n1 2 2 1\n3 3\n1 0\n1 2 2 1\n1 1 2 1\n2 1\n");
        assert_eq!(line, 5);
        assert!(msg.contains("value 0"), "{msg}");

        // Column 2 promises 2 pairs but lists 1.
        let (line, msg) = err_line("4 2\n2 3\n1 2 2 1\n3 3\n1 1\n1 2\n1 1 2 1\n2 1\n");
        assert_eq!(line, 6);
        assert!(msg.contains("pairs"), "{msg}");

        // Row index beyond M.
        let (line, msg) = err_line("4 2\n2 3\n1 2 2 1\n3 3\n3 1\n1 2 2 1\n1 1 2 1\n2 1\n");
        assert_eq!(line, 5);
        assert!(msg.contains("row index 3"), "{msg}");

        // Row degree list disagrees with the column pairs.
        let (line, msg) = err_line("4 2\n2 3\n1 2 2 1\n2 3\n1 1\n1 2 2 1\n1 1 2 1\n2 1\n");
        assert_eq!(line, 4);
        assert!(msg.contains("row 1"), "{msg}");

        // Declared maximum column degree never reached.
        let (line, msg) = err_line("4 2\n3 3\n1 2 2 1\n3 3\n1 1\n1 2 2 1\n1 1 2 1\n2 1\n");
        assert_eq!(line, 2);
        assert!(msg.contains("never reached"), "{msg}");

        // Truncated file.
        let (line, msg) = err_line("4 2\n2 3\n1 2 2 1\n3 3\n1 1\n1 2 2 1\n1 1 2 1\n");
        assert_eq!(line, 8);
        assert!(msg.contains("end of file"), "{msg}");

        // Non-integer token.
        let (line, msg) = err_line("4 x\n");
        assert_eq!(line, 1);
        assert!(msg.contains("'x'"), "{msg}");

        // Duplicate row within a column.
        let (line, msg) = err_line("4 2\n2 4\n2 2 2 1\n4 3\n1 1 1 2\n1 2 2 1\n1 1 2 1\n2 1\n");
        assert_eq!(line, 5);
        assert!(msg.contains("twice"), "{msg}");

        // Trailing garbage.
        let (line, msg) =
            err_line("4 2\n2 3\n1 2 2 1\n3 3\n1 1\n1 2 2 1\n1 1 2 1\n2 1\nleftover\n");
        assert_eq!(line, 9);
        assert!(msg.contains("trailing"), "{msg}");
    }
}
