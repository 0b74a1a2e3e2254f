use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use aircomp_sim::complexity::{complexity_table, write_complexity_csv};
use aircomp_sim::config::{parse_float_list, CodeSource, Metric, SimConfig, TxMode};
use aircomp_sim::selftest;
use aircomp_sim::sweep::{run_sweep, write_csv};

/// Simulates several transmitters computing a sum over a shared noisy
/// channel, with and without channel coding.
#[derive(Parser)]
#[command(name = "aircomp-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a block-error-rate sweep over an SNR and phase-error grid.
    Sweep(SweepArgs),
    /// Print decoder state counts per transmitter count.
    Complexity(ComplexityArgs),
    /// Run the fast invariant checks.
    Selftest,
}

#[derive(Args)]
struct SweepArgs {
    /// Digit radix p.
    #[arg(long)]
    p: u64,
    /// Field order q; omit to use the smallest prime that fits every
    /// digit sum.
    #[arg(long, default_value_t = 0)]
    q: u32,
    /// Number of transmitters K.
    #[arg(long)]
    k: usize,
    /// Constellation dimension (1 or 2).
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Digits packed per transmitted value.
    #[arg(long = "digits-l", default_value_t = 1)]
    digits_l: usize,
    /// Code source: alist:<path> or random:<M>,<N>,<w>.
    #[arg(long)]
    code: CodeSource,
    /// Comma-separated SNR list in dB; "inf" turns noise off.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: String,
    /// Comma-separated phase-error bounds in radians.
    #[arg(long, default_value = "0")]
    theta: String,
    /// Belief-propagation iteration cap.
    #[arg(long, default_value_t = 20)]
    iters: u32,
    /// Trial budget per sweep point.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Stop a point early after this many block errors.
    #[arg(long = "max-block-errors", default_value_t = 200)]
    max_block_errors: u64,
    #[arg(long, value_enum, default_value_t = TxMode::Coded)]
    mode: TxMode,
    /// Which positions must match: the full codeword or only the
    /// information part.
    #[arg(long, value_enum, default_value_t = Metric::Full)]
    metric: Metric,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV output path; omitted means stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Digit radix p.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Largest transmitter count to tabulate.
    #[arg(long = "k-max", default_value_t = 7)]
    k_max: u32,
    /// CSV output path; omitted means stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sweep(args) => sweep(args),
        Command::Complexity(args) => complexity(args),
        Command::Selftest => selftest::run(),
    }
}

fn sweep(args: SweepArgs) -> Result<()> {
    let cfg = SimConfig {
        radix: args.p,
        field_order: args.q,
        num_tx: args.k,
        dim: args.dim,
        digits_per_value: args.digits_l,
        code: args.code,
        snr_db: parse_float_list(&args.snr_db).context("--snr-db")?,
        theta_max: parse_float_list(&args.theta).context("--theta")?,
        max_iterations: args.iters,
        trials: args.trials,
        max_block_errors: args.max_block_errors,
        mode: args.mode,
        metric: args.metric,
        seed: args.seed,
    };
    let records = run_sweep(&cfg)?;
    for r in &records {
        eprintln!(
            "theta={} snr={} dB: bler {} ({}/{} blocks, mean {:.2} iterations, {:.1?})",
            r.theta_max,
            r.snr_db,
            r.bler,
            r.block_errors,
            r.trials,
            r.mean_iterations,
            r.wall_time
        );
    }
    write_output(args.out.as_deref(), |w| write_csv(&records, w))
}

fn complexity(args: ComplexityArgs) -> Result<()> {
    let rows = complexity_table(args.p, args.k_max)?;
    write_output(args.out.as_deref(), |w| {
        write_complexity_csv(args.p, &rows, w)
    })
}

fn write_output(
    path: Option<&std::path::Path>,
    write: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(path) => {
            let mut file = File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}
