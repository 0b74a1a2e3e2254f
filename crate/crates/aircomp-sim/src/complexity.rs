//! Decoder state-space sizes: decoding the digit sum over Z_q needs q
//! states per received symbol, while enumerating every joint transmitter
//! digit needs p^K.

use std::io::Write;

use aircomp::field::smallest_valid_q;
use anyhow::{ensure, Context, Result};

/// One table row for K transmitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityRow {
    pub num_tx: u32,
    /// Field order of the sum decoder: the smallest prime holding every
    /// digit sum.
    pub proposed_states: u64,
    /// Joint digit tuples a per-symbol exhaustive receiver must weigh.
    pub baseline_states: u64,
}

/// Rows for 1..=max_tx transmitters at the given digit radix.
pub fn complexity_table(radix: u32, max_tx: u32) -> Result<Vec<ComplexityRow>> {
    ensure!(radix >= 2, "radix must be at least 2");
    ensure!(max_tx >= 1, "need at least one transmitter");
    (1..=max_tx)
        .map(|k| {
            let baseline = (radix as u64)
                .checked_pow(k)
                .with_context(|| format!("{radix}^{k} overflows"))?;
            Ok(ComplexityRow {
                num_tx: k,
                proposed_states: smallest_valid_q(k, radix) as u64,
                baseline_states: baseline,
            })
        })
        .collect()
}

pub fn write_complexity_csv<W: Write>(
    radix: u32,
    rows: &[ComplexityRow],
    mut out: W,
) -> Result<()> {
    writeln!(out, "p,K,proposed_states,baseline_states")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            radix, row.num_tx, row.proposed_states, row.baseline_states
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_digit_table() {
        let rows = complexity_table(2, 7).unwrap();
        let proposed: Vec<u64> = rows.iter().map(|r| r.proposed_states).collect();
        let baseline: Vec<u64> = rows.iter().map(|r| r.baseline_states).collect();
        assert_eq!(proposed, vec![2, 3, 5, 5, 7, 7, 11]);
        assert_eq!(baseline, vec![2, 4, 8, 16, 32, 64, 128]);
    }

    #[test]
    fn proposed_growth_is_linear_baseline_geometric() {
        let rows = complexity_table(2, 14).unwrap();
        for k in 1..=7usize {
            let single = rows[k - 1];
            let double = rows[2 * k - 1];
            // Doubling K at most doubles the field (plus the prime gap),
            // but squares the joint space.
            assert!(double.proposed_states <= 2 * single.proposed_states + 3);
            assert_eq!(
                double.baseline_states,
                single.baseline_states * single.baseline_states
            );
        }
    }

    #[test]
    fn csv_layout() {
        let rows = complexity_table(2, 2).unwrap();
        let mut buf = Vec::new();
        write_complexity_csv(2, &rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "p,K,proposed_states,baseline_states\n2,1,2,2\n2,2,3,4\n"
        );
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(complexity_table(1, 3).is_err());
        assert!(complexity_table(2, 0).is_err());
        assert!(complexity_table(3, 64).is_err());
    }
}
