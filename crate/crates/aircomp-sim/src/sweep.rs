//! Sweep driver: runs the trial grid point by point with a worker pool,
//! stops each point early once enough block errors accumulate, and
//! serializes the results as CSV.

use std::io::Write;
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{SimConfig, TxMode};
use crate::experiment::Experiment;

/// Trials are dispatched in fixed-size chunks and the early-stop check
/// runs between chunks, so the number of trials a point consumes does
/// not depend on how many workers happen to run.
const CHUNK_TRIALS: u64 = 512;

/// Trial generators get stream ids laid out as
/// `top bit | point index | trial index`; the top bit keeps every trial
/// stream apart from the stream that constructed a random code.
const TRIAL_STREAM_BASE: u64 = 1 << 63;
const TRIALS_PER_POINT: u64 = 1 << 40;
const MAX_GRID_POINTS: u64 = 1 << 23;

/// The generator dedicated to one trial of one sweep point. Every trial
/// is an independent stream of the same seeded cipher, so a sweep is
/// reproducible under any parallel schedule.
pub fn trial_rng(seed: u64, point_index: u64, trial_index: u64) -> ChaCha8Rng {
    debug_assert!(point_index < MAX_GRID_POINTS);
    debug_assert!(trial_index < TRIALS_PER_POINT);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TRIAL_STREAM_BASE | (point_index * TRIALS_PER_POINT) | trial_index);
    rng
}

/// Aggregate result of one sweep point.
#[derive(Debug, Clone)]
pub struct BlerRecord {
    pub mode: TxMode,
    pub radix: u64,
    pub field_order: u32,
    pub num_tx: usize,
    pub dim: usize,
    pub theta_max: f64,
    pub snr_db: f64,
    /// Trials actually run (the budget, or fewer after an early stop).
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub mean_iterations: f64,
    pub seed: u64,
    /// Measured, never serialized: reruns must produce identical bytes.
    pub wall_time: Duration,
}

pub const CSV_HEADER: &str =
    "mode,p,q,K,D,theta,snr_db,trials,block_errors,bler,mean_iterations,seed";

/// Writes records in the stable CSV layout. Floats use the shortest
/// round-trip form, so equal runs serialize to equal bytes.
pub fn write_csv<W: Write>(records: &[BlerRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.mode,
            r.radix,
            r.field_order,
            r.num_tx,
            r.dim,
            r.theta_max,
            r.snr_db,
            r.trials,
            r.block_errors,
            r.bler,
            r.mean_iterations,
            r.seed
        )?;
    }
    Ok(())
}

/// Renders the records to an in-memory CSV string.
pub fn csv_string(records: &[BlerRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

/// Runs the full (theta, snr) grid and returns one record per point.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<BlerRecord>> {
    let exp = Experiment::build(cfg)?;
    let grid = cfg.theta_max.len() as u64 * cfg.snr_db.len() as u64;
    ensure!(grid <= MAX_GRID_POINTS, "sweep grid too large");
    ensure!(
        cfg.trials <= TRIALS_PER_POINT,
        "trial budget exceeds {TRIALS_PER_POINT} per point"
    );

    let mut records = Vec::with_capacity(grid as usize);
    let mut point_index = 0u64;
    for &theta_max in &cfg.theta_max {
        for &snr_db in &cfg.snr_db {
            records.push(run_point(cfg, &exp, point_index, theta_max, snr_db)?);
            point_index += 1;
        }
    }
    Ok(records)
}

fn run_point(
    cfg: &SimConfig,
    exp: &Experiment,
    point_index: u64,
    theta_max: f64,
    snr_db: f64,
) -> Result<BlerRecord> {
    let params = exp.channel_params(snr_db, theta_max)?;
    let start = Instant::now();
    let mut trials_run = 0u64;
    let mut block_errors = 0u64;
    let mut iteration_sum = 0u64;
    while trials_run < cfg.trials && block_errors < cfg.max_block_errors {
        let chunk = CHUNK_TRIALS.min(cfg.trials - trials_run);
        let outcomes: Vec<(bool, u32)> = (trials_run..trials_run + chunk)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(cfg.seed, point_index, trial);
                let outcome = exp.run_trial(&params, &mut rng)?;
                Ok((outcome.correct, outcome.iterations))
            })
            .collect::<Result<_>>()?;
        for (correct, iterations) in outcomes {
            if !correct {
                block_errors += 1;
            }
            iteration_sum += iterations as u64;
        }
        trials_run += chunk;
    }
    Ok(BlerRecord {
        mode: cfg.mode,
        radix: cfg.radix,
        field_order: exp.field().order(),
        num_tx: cfg.num_tx,
        dim: cfg.dim,
        theta_max,
        snr_db,
        trials: trials_run,
        block_errors,
        bler: block_errors as f64 / trials_run as f64,
        mean_iterations: iteration_sum as f64 / trials_run as f64,
        seed: cfg.seed,
        wall_time: start.elapsed(),
    })
}
