//! Fast invariant checks runnable from the command line. Each check is a
//! trimmed-down version of an acceptance property, sized to finish in
//! seconds.

use aircomp::decoder::{box_plus, Llrv};
use aircomp::field::{smallest_valid_q, PrimeField};
use aircomp::lattice::{mod1, LatticeConfig};
use anyhow::{ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{CodeSource, Metric, SimConfig, TxMode};
use crate::sweep::{csv_string, run_sweep};

/// Runs every check, printing one line per check; fails if any failed.
pub fn run() -> Result<()> {
    let checks: [(&str, fn() -> Result<()>); 6] = [
        ("noiseless coded identity", noiseless_coded_identity),
        ("noiseless uncoded identity", noiseless_uncoded_identity),
        ("lattice sum folding", lattice_sum_folding),
        ("box-plus convolution", box_plus_convolution),
        ("complexity closed forms", complexity_closed_forms),
        ("sweep determinism", sweep_determinism),
    ];
    let mut failures = 0usize;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("ok - {name}"),
            Err(err) => {
                failures += 1;
                println!("FAIL - {name}: {err:#}");
            }
        }
    }
    ensure!(failures == 0, "{failures} selftest check(s) failed");
    println!("selftest passed");
    Ok(())
}

fn small_config(mode: TxMode) -> SimConfig {
    SimConfig {
        radix: 2,
        field_order: 0,
        num_tx: 2,
        dim: 1,
        digits_per_value: 4,
        code: CodeSource::Random {
            rows: 12,
            cols: 24,
            col_weight: 2,
        },
        snr_db: vec![f64::INFINITY],
        theta_max: vec![0.0],
        max_iterations: 20,
        trials: 32,
        max_block_errors: 200,
        mode,
        metric: Metric::Full,
        seed: 9,
    }
}

fn noiseless_coded_identity() -> Result<()> {
    let records = run_sweep(&small_config(TxMode::Coded))?;
    ensure!(
        records[0].block_errors == 0,
        "{} of {} noiseless trials failed",
        records[0].block_errors,
        records[0].trials
    );
    Ok(())
}

fn noiseless_uncoded_identity() -> Result<()> {
    let records = run_sweep(&small_config(TxMode::Uncoded))?;
    ensure!(
        records[0].block_errors == 0,
        "{} of {} noiseless trials failed",
        records[0].block_errors,
        records[0].trials
    );
    Ok(())
}

fn lattice_sum_folding() -> Result<()> {
    let field = PrimeField::new(3)?;
    for num_tx in 1..=3usize {
        for dim in 1..=2usize {
            let lattice = LatticeConfig::new(dim, 3)?;
            let digits = num_tx * dim;
            for combo in 0..3u32.pow(digits as u32) {
                let mut rest = combo;
                let groups: Vec<Vec<u32>> = (0..num_tx)
                    .map(|_| {
                        (0..dim)
                            .map(|_| {
                                let digit = rest % 3;
                                rest /= 3;
                                digit
                            })
                            .collect()
                    })
                    .collect();
                let mut coord_sums = vec![0.0; dim];
                let mut symbol_sums = vec![0u32; dim];
                for group in &groups {
                    let point = lattice.map(group)?;
                    for d in 0..dim {
                        coord_sums[d] += point.coords()[d];
                        symbol_sums[d] = field.add(symbol_sums[d], group[d]);
                    }
                }
                let direct = lattice.map(&symbol_sums)?;
                for d in 0..dim {
                    let folded = mod1(coord_sums[d]);
                    ensure!(
                        (folded - direct.coords()[d]).abs() <= 1e-12,
                        "fold mismatch at K={num_tx} D={dim} combo {combo}"
                    );
                }
            }
        }
    }
    Ok(())
}

fn box_plus_convolution() -> Result<()> {
    let field = PrimeField::new(5)?;
    let q = 5usize;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let draw = |rng: &mut ChaCha8Rng| -> Result<(Llrv, Vec<f64>)> {
            let raw: Vec<f64> = (0..q).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
            Ok((Llrv::from_probs(&probs)?, probs))
        };
        let (la, pa) = draw(&mut rng)?;
        let (lb, pb) = draw(&mut rng)?;
        let ca = rng.random_range(1..5u32);
        let cb = rng.random_range(1..5u32);

        let mut expected = vec![0.0f64; q];
        for va in 0..q as u32 {
            for vb in 0..q as u32 {
                let out = field.add(field.mul(ca, va), field.mul(cb, vb));
                expected[out as usize] += pa[va as usize] * pb[vb as usize];
            }
        }
        let got = box_plus(&la, &lb, ca, cb, field)?.probs();
        for (g, e) in got.iter().zip(&expected) {
            ensure!((g - e).abs() <= 1e-9, "box-plus drifted: {g} vs {e}");
        }
    }
    Ok(())
}

fn complexity_closed_forms() -> Result<()> {
    let is_prime = |n: u32| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0) && n >= 2;
    let rows = crate::complexity::complexity_table(2, 7)?;
    for row in rows {
        let expected_q = (row.num_tx + 1..).find(|&c| is_prime(c)).unwrap();
        ensure!(
            row.proposed_states == expected_q as u64,
            "K={}: proposed {} differs from smallest prime {}",
            row.num_tx,
            row.proposed_states,
            expected_q
        );
        ensure!(
            row.baseline_states == 1u64 << row.num_tx,
            "K={}: baseline {} is not 2^K",
            row.num_tx,
            row.baseline_states
        );
        ensure!(smallest_valid_q(row.num_tx, 2) as u64 == row.proposed_states);
    }
    Ok(())
}

fn sweep_determinism() -> Result<()> {
    let mut cfg = small_config(TxMode::Coded);
    cfg.snr_db = vec![10.0, 14.0];
    let first = csv_string(&run_sweep(&cfg)?)?;
    let second = csv_string(&run_sweep(&cfg)?)?;
    ensure!(first == second, "rerun produced different CSV bytes");
    Ok(())
}
