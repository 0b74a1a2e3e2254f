//! Acceptance checks for the whole simulator, one test per claim the
//! project makes about itself. Every check that involves randomness runs
//! a frozen seed through the same per-trial stream derivation the sweep
//! driver uses, so each test is deterministic end to end: the measured
//! error counts below never move between runs.
//!
//! Run `cargo test --test acceptance -- --nocapture` to see one summary
//! line per criterion with the measured numbers.

use std::collections::HashSet;
use std::process::Command;

use aircomp::channel::{sigma_from_snr, transmit, ChannelParams};
use aircomp::codec::unpack_block;
use aircomp::decoder::{box_plus, DecoderState, Llrv};
use aircomp::demod::{fold, Demodulator, PriorProfile};
use aircomp::field::PrimeField;
use aircomp::lattice::{segment, LatticeConfig, LatticeSymbol};
use aircomp::ldpc::{Encoder, ParityCheckMatrix};
use aircomp_sim::config::{CodeSource, Metric, SimConfig, TxMode};
use aircomp_sim::experiment::Experiment;
use aircomp_sim::oracle::oracle_decode;
use aircomp_sim::stats::{intervals_overlap, wilson_interval, Z_95};
use aircomp_sim::sweep::{run_sweep, trial_rng, BlerRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TREE_ALIST: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../fixtures/tree-z3.alist"
);

/// A config with every knob the tests share; callers override the rest.
fn base_config(radix: u64, field_order: u32, num_tx: usize, dim: usize, seed: u64) -> SimConfig {
    SimConfig {
        radix,
        field_order,
        num_tx,
        dim,
        digits_per_value: 1,
        code: CodeSource::Random {
            rows: 48,
            cols: 96,
            col_weight: 2,
        },
        snr_db: Vec::new(),
        theta_max: vec![0.0],
        max_iterations: 20,
        trials: 2000,
        max_block_errors: 2000,
        mode: TxMode::Coded,
        metric: Metric::Full,
        seed,
    }
}

fn ci(record: &BlerRecord) -> (f64, f64) {
    wilson_interval(record.block_errors, record.trials, Z_95)
}

/// All length-`len` vectors over 0..order, odometer order.
fn all_blocks(order: u32, len: usize) -> Vec<Vec<u32>> {
    let total = (order as u64).pow(len as u32);
    (0..total)
        .map(|mut index| {
            let mut block = vec![0u32; len];
            for digit in block.iter_mut().rev() {
                *digit = (index % order as u64) as u32;
                index /= order as u64;
            }
            block
        })
        .collect()
}

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn next_prime_at_least(n: u64) -> u64 {
    let mut candidate = n.max(2);
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}

/// The tree-structured fixture code wired to a two-transmitter binary
/// link, shared by the exact-inference checks.
struct TreeLink {
    matrix: ParityCheckMatrix,
    encoder: Encoder,
    lattice: LatticeConfig,
    profile: PriorProfile,
    params: ChannelParams,
    sigma: f64,
}

impl TreeLink {
    fn new(snr_db: f64) -> Self {
        let text = std::fs::read_to_string(TREE_ALIST).expect("reading tree fixture");
        let field = PrimeField::new(3).expect("field");
        let matrix = ParityCheckMatrix::from_alist(&text, field).expect("tree code");
        let encoder = Encoder::new(matrix.clone()).expect("encoder");
        let lattice = LatticeConfig::new(1, 3).expect("lattice");
        let profile = PriorProfile::new(2, 2, 3).expect("prior");
        let sigma = sigma_from_snr(snr_db, 3);
        let params = ChannelParams::new(2, 1, sigma, 0.0).expect("channel");
        Self {
            matrix,
            encoder,
            lattice,
            profile,
            params,
            sigma,
        }
    }

    fn demod(&self) -> Demodulator<'_> {
        Demodulator::new(&self.profile, self.lattice, self.sigma).expect("demodulator")
    }

    /// Draws both transmitters' digits, sends them through the channel,
    /// and returns the raw observations with the true sum codeword.
    fn one_trial(&self, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<u32>) {
        let field = self.matrix.field();
        let mut codewords = Vec::with_capacity(2);
        for _ in 0..2 {
            let digits: Vec<u32> = (0..self.matrix.info_len())
                .map(|_| rng.random_range(0..2u32))
                .collect();
            codewords.push(self.encoder.encode(&digits).expect("encode").into_symbols());
        }
        let mut expected = vec![0u32; self.matrix.num_cols()];
        for codeword in &codewords {
            for (sum, &symbol) in expected.iter_mut().zip(codeword) {
                *sum = field.add(*sum, symbol);
            }
        }
        let blocks: Vec<Vec<LatticeSymbol>> = codewords
            .iter()
            .map(|cw| {
                segment(cw, 1)
                    .expect("segment")
                    .iter()
                    .map(|group| self.lattice.map(group).expect("map"))
                    .collect()
            })
            .collect();
        let received = transmit(&blocks, &self.params, rng).expect("transmit");
        (received, expected)
    }
}

/// Without noise or phase error, every configuration on the small grid
/// must hand back the exact integer sums of the packed values, every
/// trial, for both constellation shapes.
#[test]
fn noiseless_superposition_recovers_exact_sums() {
    let mut checked = 0u64;
    for (index, &(radix, num_tx)) in [(2u64, 2usize), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)]
        .iter()
        .enumerate()
    {
        for dim in [1usize, 2] {
            let digits_per_value = if dim == 1 { 4 } else { 2 };
            let mut cfg = base_config(radix, 0, num_tx, dim, 301);
            cfg.digits_per_value = digits_per_value;
            cfg.snr_db = vec![f64::INFINITY];
            cfg.trials = 100;
            cfg.max_block_errors = 100;
            let exp = Experiment::build(&cfg).expect("valid configuration");
            let params = exp
                .channel_params(f64::INFINITY, 0.0)
                .expect("noiseless channel");
            let point = (index * 2 + dim - 1) as u64;
            for trial in 0..100 {
                let mut rng = trial_rng(301, point, trial);
                let outcome = exp.run_trial(&params, &mut rng).expect("trial");
                assert!(
                    outcome.correct,
                    "noiseless decode failed for p={radix} K={num_tx} D={dim} trial {trial}"
                );
                let info: Vec<u64> = outcome.decoded[..exp.block_len()]
                    .iter()
                    .map(|&d| d as u64)
                    .collect();
                let sums = unpack_block(&info, radix, digits_per_value).expect("unpack");
                assert_eq!(
                    sums, outcome.value_sums,
                    "recovered sums drifted for p={radix} K={num_tx} D={dim} trial {trial}"
                );
                checked += 1;
            }
        }
    }
    println!("PASS - noiseless superposition: {checked} trials recovered exact sums");
}

/// Folding a raw superposition must land exactly on the constellation
/// point of the modular sum, exhaustively over the small grid, and the
/// planar two-transmitter case must produce 25 distinct raw sums that
/// collapse onto the 9 code points.
#[test]
fn folded_sums_land_on_code_points() {
    let field = PrimeField::new(3).expect("field");
    let mut cases = 0u64;
    for dim in [1usize, 2] {
        let lattice = LatticeConfig::new(dim, 3).expect("lattice");
        let groups = all_blocks(3, dim);
        for num_tx in 1..=4usize {
            for combo in all_blocks(groups.len() as u32, num_tx) {
                let mut raw = vec![0.0f64; dim];
                let mut sum_group = vec![0u32; dim];
                for &pick in &combo {
                    let group = &groups[pick as usize];
                    let point = lattice.map(group).expect("map");
                    for (acc, &c) in raw.iter_mut().zip(point.coords()) {
                        *acc += c;
                    }
                    for (acc, &g) in sum_group.iter_mut().zip(group) {
                        *acc = field.add(*acc, g);
                    }
                }
                let folded = fold(&raw);
                let direct = lattice.map(&sum_group).expect("map");
                for (&got, &want) in folded.coords().iter().zip(direct.coords()) {
                    assert!(
                        (got - want).abs() <= 1e-12,
                        "fold mismatch at D={dim} K={num_tx}: {got} vs {want}"
                    );
                }
                cases += 1;
            }
        }
    }

    // Planar census for two transmitters: raw sums live on a 5x5 grid of
    // third-integer points, and folding maps all of them onto the 9-point
    // constellation.
    let lattice = LatticeConfig::new(2, 3).expect("lattice");
    let groups = all_blocks(3, 2);
    let snap = |coords: &[f64]| -> (i64, i64) {
        (
            (coords[0] * 3.0).round() as i64,
            (coords[1] * 3.0).round() as i64,
        )
    };
    let code_points: HashSet<(i64, i64)> = groups
        .iter()
        .map(|g| snap(lattice.map(g).expect("map").coords()))
        .collect();
    assert_eq!(code_points.len(), 9);
    let mut raw_sums = HashSet::new();
    let mut folded_points = HashSet::new();
    for a in &groups {
        for b in &groups {
            let pa = lattice.map(a).expect("map");
            let pb = lattice.map(b).expect("map");
            let raw: Vec<f64> = pa
                .coords()
                .iter()
                .zip(pb.coords())
                .map(|(&x, &y)| x + y)
                .collect();
            raw_sums.insert(snap(&raw));
            folded_points.insert(snap(fold(&raw).coords()));
        }
    }
    assert_eq!(raw_sums.len(), 25, "raw two-transmitter sums");
    assert_eq!(
        folded_points, code_points,
        "folded sums must cover exactly the code points"
    );
    println!(
        "PASS - lattice folding: {cases} exhaustive cases, 25 raw sums onto 9 code points"
    );
}

/// The log-domain check-node combiner must match a direct
/// probability-domain convolution to within 1e-9 relative error.
#[test]
fn box_plus_matches_probability_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(302);
    let mut pairs = 0u64;
    for q in [3u32, 5, 7] {
        let field = PrimeField::new(q).expect("field");
        for _ in 0..1000 {
            let draw = |rng: &mut ChaCha8Rng| {
                Llrv::from_log_ratios(
                    (1..q).map(|_| rng.random_range(-8.0..8.0)).collect(),
                )
            };
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            let coeff_a = rng.random_range(1..q);
            let coeff_b = rng.random_range(1..q);
            let got = box_plus(&a, &b, coeff_a, coeff_b, field).expect("box plus");

            let pa = a.probs();
            let pb = b.probs();
            let mut conv = vec![0.0f64; q as usize];
            for va in 0..q {
                for vb in 0..q {
                    let s = field.add(field.mul(coeff_a, va), field.mul(coeff_b, vb));
                    conv[s as usize] += pa[va as usize] * pb[vb as usize];
                }
            }
            for alpha in 1..q {
                let want = (conv[alpha as usize] / conv[0]).ln();
                let have = got.log_ratio(alpha);
                let tolerance = 1e-9 * want.abs().max(have.abs()).max(1.0);
                assert!(
                    (want - have).abs() <= tolerance,
                    "q={q} coeffs=({coeff_a},{coeff_b}) value {alpha}: {have} vs {want}"
                );
            }
            pairs += 1;
        }
    }
    println!("PASS - box-plus convolution: {pairs} random pairs within 1e-9 relative");
}

/// On a cycle-free code, message passing computes exact posteriors, so
/// its hard decisions must agree with marginals brute-forced over the
/// whole codebook on every noise realization.
#[test]
fn tree_code_bp_matches_exhaustive_marginals() {
    let link = TreeLink::new(8.0);
    let demod = link.demod();
    let q = 3usize;
    let codebook: Vec<Vec<u32>> = all_blocks(3, link.matrix.info_len())
        .iter()
        .map(|info| link.encoder.encode(info).expect("encode").into_symbols())
        .collect();

    let trials = 1000u64;
    for trial in 0..trials {
        let mut rng = trial_rng(303, 0, trial);
        let (received, _expected) = link.one_trial(&mut rng);
        let beliefs = demod
            .codeword_llrs(&received, link.matrix.info_len())
            .expect("beliefs");

        let mut state =
            DecoderState::new(&link.matrix, beliefs.clone(), 10).expect("decoder");
        for _ in 0..10 {
            state.iterate();
        }
        let bp: Vec<u32> = state.posteriors().iter().map(Llrv::hard_decision).collect();

        // Exact marginals: weight every codeword by its total belief and
        // accumulate per-position log masses.
        let positions = link.matrix.num_cols();
        let mut marginals = vec![vec![f64::NEG_INFINITY; q]; positions];
        for codeword in &codebook {
            let weight: f64 = codeword
                .iter()
                .enumerate()
                .map(|(n, &v)| beliefs[n].log_ratio(v))
                .sum();
            for (n, &v) in codeword.iter().enumerate() {
                marginals[n][v as usize] = logaddexp(marginals[n][v as usize], weight);
            }
        }
        let exact: Vec<u32> = marginals
            .iter()
            .map(|m| {
                let mut best = 0u32;
                let mut best_mass = m[0];
                for (v, &mass) in m.iter().enumerate().skip(1) {
                    if mass > best_mass {
                        best_mass = mass;
                        best = v as u32;
                    }
                }
                best
            })
            .collect();
        assert_eq!(bp, exact, "posterior decisions diverged on trial {trial}");
    }
    println!("PASS - tree exactness: {trials}/{trials} realizations agree with brute force");
}

/// At a mid-range operating point the coded link must beat the uncoded
/// one with confidence intervals that do not touch.
#[test]
fn coding_beats_uncoded_at_mid_snr() {
    let mut cfg = base_config(2, 0, 2, 1, 305);
    cfg.snr_db = vec![12.0];
    cfg.trials = 10_000;
    cfg.max_block_errors = 10_000;

    cfg.mode = TxMode::Uncoded;
    let uncoded = &run_sweep(&cfg).expect("uncoded sweep")[0];
    cfg.mode = TxMode::Coded;
    let coded = &run_sweep(&cfg).expect("coded sweep")[0];

    assert!(
        (0.3..=0.9).contains(&uncoded.bler),
        "operating point drifted: uncoded BLER {}",
        uncoded.bler
    );
    let (uncoded_low, _) = ci(uncoded);
    let (_, coded_high) = ci(coded);
    assert!(
        coded_high < uncoded_low,
        "no confident gain: coded upper {coded_high} vs uncoded lower {uncoded_low}"
    );
    println!(
        "PASS - coding gain: coded {}/{} vs uncoded {}/{} at 12 dB",
        coded.block_errors, coded.trials, uncoded.block_errors, uncoded.trials
    );
}

/// Field size trades directly against performance: the smallest field
/// that can hold the digit sums beats an oversized one at the same SNR,
/// while splitting the same field budget between radix and transmitter
/// count leaves performance statistically unchanged.
#[test]
fn field_size_tradeoffs() {
    // Matched everything except the field order.
    let mut snug = base_config(2, 0, 2, 1, 306);
    snug.snr_db = vec![10.0];
    snug.trials = 4000;
    snug.max_block_errors = 4000;
    let mut oversized = snug.clone();
    oversized.field_order = 5;

    let snug_rec = &run_sweep(&snug).expect("q=3 sweep")[0];
    let oversized_rec = &run_sweep(&oversized).expect("q=5 sweep")[0];
    assert_eq!(snug_rec.field_order, 3);
    let (_, snug_high) = ci(snug_rec);
    let (oversized_low, _) = ci(oversized_rec);
    assert!(
        snug_high < oversized_low,
        "q=3 should beat forced q=5: {snug_high} vs {oversized_low}"
    );

    // Same field, different digit radix / transmitter split.
    let mut ternary_pair = base_config(3, 5, 2, 1, 306);
    ternary_pair.snr_db = vec![12.0, 13.0];
    let mut binary_trio = base_config(2, 5, 3, 1, 306);
    binary_trio.snr_db = vec![12.0, 13.0];
    let ternary_recs = run_sweep(&ternary_pair).expect("p=3 K=2 sweep");
    let binary_recs = run_sweep(&binary_trio).expect("p=2 K=3 sweep");
    for (a, b) in ternary_recs.iter().zip(&binary_recs) {
        assert!(
            intervals_overlap(ci(a), ci(b)),
            "radix split diverged at {} dB: {}/{} vs {}/{}",
            a.snr_db,
            a.block_errors,
            a.trials,
            b.block_errors,
            b.trials
        );
    }
    println!(
        "PASS - field-size tradeoffs: q=3 {}/{} beats q=5 {}/{}; radix splits overlap at 12 and 13 dB",
        snug_rec.block_errors,
        snug_rec.trials,
        oversized_rec.block_errors,
        oversized_rec.trials
    );
}

/// Adding a transmitter while staying inside the same field barely moves
/// the error rate: the confidence intervals overlap at every tested SNR.
#[test]
fn extra_transmitters_cost_little_at_same_field() {
    let mut three = base_config(2, 5, 3, 1, 307);
    three.snr_db = vec![13.0, 14.0, 15.0];
    let mut four = base_config(2, 5, 4, 1, 307);
    four.snr_db = three.snr_db.clone();

    let recs3 = run_sweep(&three).expect("K=3 sweep");
    let recs4 = run_sweep(&four).expect("K=4 sweep");
    for (a, b) in recs3.iter().zip(&recs4) {
        assert!(
            intervals_overlap(ci(a), ci(b)),
            "K=3 and K=4 separated at {} dB: {}/{} vs {}/{}",
            a.snr_db,
            a.block_errors,
            a.trials,
            b.block_errors,
            b.trials
        );
    }
    let summary: Vec<String> = recs3
        .iter()
        .zip(&recs4)
        .map(|(a, b)| format!("{} dB {}v{}", a.snr_db, a.block_errors, b.block_errors))
        .collect();
    println!(
        "PASS - transmitter count: K=3 and K=4 overlap at every point ({})",
        summary.join(", ")
    );
}

/// Random per-transmitter phase rotation only hurts: at each SNR the
/// error rate grows with the phase bound, and the higher SNR stays at or
/// below the lower one for every bound.
#[test]
fn phase_spread_degrades_monotonically() {
    let mut cfg = base_config(2, 0, 2, 2, 308);
    cfg.snr_db = vec![11.0, 14.0];
    cfg.theta_max = vec![0.0, 0.1, 0.2, 0.3];
    cfg.trials = 4000;
    cfg.max_block_errors = 4000;
    let records = run_sweep(&cfg).expect("phase sweep");
    let at = |theta: f64, snr: f64| -> &BlerRecord {
        records
            .iter()
            .find(|r| r.theta_max == theta && r.snr_db == snr)
            .expect("grid point")
    };

    for &snr in &cfg.snr_db {
        let mut previous = -1.0f64;
        for &theta in &cfg.theta_max {
            let record = at(theta, snr);
            assert!(
                record.bler >= previous,
                "BLER dropped with more phase error at {snr} dB, theta {theta}"
            );
            previous = record.bler;
        }
    }
    for &theta in &cfg.theta_max {
        assert!(
            at(theta, 14.0).bler <= at(theta, 11.0).bler,
            "higher SNR lost at theta {theta}"
        );
    }
    let row = |snr: f64| -> Vec<u64> {
        cfg.theta_max
            .iter()
            .map(|&t| at(t, snr).block_errors)
            .collect()
    };
    println!(
        "PASS - phase spread: errors at 11 dB {:?}, at 14 dB {:?} over theta {:?}",
        row(11.0),
        row(14.0),
        cfg.theta_max
    );
}

/// The complexity table printed by the CLI must equal the closed forms:
/// the decoder works over the smallest prime at least K+1 states wide,
/// the per-transmitter baseline over 2^K.
#[test]
fn complexity_table_matches_closed_forms() {
    let output = Command::new(env!("CARGO_BIN_EXE_aircomp-sim"))
        .args(["complexity", "--p", "2", "--k-max", "7"])
        .output()
        .expect("running complexity subcommand");
    assert!(
        output.status.success(),
        "complexity subcommand failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8(output.stdout).expect("utf-8 table");
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("p,K,proposed_states,baseline_states"));
    for k in 1..=7u64 {
        let expect = format!("2,{k},{},{}", next_prime_at_least(k + 1), 1u64 << k);
        assert_eq!(lines.next(), Some(expect.as_str()), "row K={k}");
    }
    assert_eq!(lines.next(), None, "trailing rows");
    println!("PASS - complexity table: K=1..7 rows match the closed forms");
}

/// The exhaustive joint decoder is the quality floor: at an operating
/// point where message passing already works well, the oracle must do at
/// least as well, and the two must almost always return the same sum.
#[test]
fn exhaustive_oracle_confirms_bp_decisions() {
    let link = TreeLink::new(9.0);
    let demod = link.demod();
    let trials = 1000u64;
    let mut bp_errors = 0u64;
    let mut oracle_errors = 0u64;
    let mut agreements = 0u64;
    for trial in 0..trials {
        let mut rng = trial_rng(310, 0, trial);
        let (received, expected) = link.one_trial(&mut rng);
        let beliefs = demod
            .codeword_llrs(&received, link.matrix.info_len())
            .expect("beliefs");
        let mut state = DecoderState::new(&link.matrix, beliefs, 20).expect("decoder");
        let bp = state.decode().codeword;
        let oracle = oracle_decode(&received, link.sigma, 2, 2, &link.encoder, link.lattice)
            .expect("oracle decode");
        bp_errors += u64::from(bp != expected);
        oracle_errors += u64::from(oracle != expected);
        agreements += u64::from(bp == oracle);
    }
    let bp_bler = bp_errors as f64 / trials as f64;
    assert!(bp_bler < 0.1, "operating point drifted: BP BLER {bp_bler}");
    assert!(
        oracle_errors <= bp_errors,
        "oracle lost to BP: {oracle_errors} vs {bp_errors} errors"
    );
    assert!(
        agreements * 20 >= trials * 19,
        "decoded sums agree on only {agreements}/{trials} trials"
    );
    println!(
        "PASS - oracle floor: oracle {oracle_errors} <= BP {bp_errors} errors, \
         {agreements}/{trials} identical sums"
    );
}

/// Rerunning a sweep with the same seed must reproduce the output file
/// byte for byte, including across separate processes.
#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().expect("temp dir");
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for path in [&first, &second] {
        let status = Command::new(env!("CARGO_BIN_EXE_aircomp-sim"))
            .args([
                "sweep",
                "--p",
                "2",
                "--k",
                "2",
                "--dim",
                "2",
                "--code",
                "random:24,48,2",
                "--snr-db",
                "8,10",
                "--theta",
                "0,0.2",
                "--trials",
                "512",
                "--max-block-errors",
                "512",
                "--seed",
                "311",
                "--out",
            ])
            .arg(path)
            .status()
            .expect("running sweep subcommand");
        assert!(status.success(), "sweep run failed");
    }
    let first_bytes = std::fs::read(&first).expect("first output");
    let second_bytes = std::fs::read(&second).expect("second output");
    let lines = first_bytes.iter().filter(|&&b| b == b'\n').count();
    assert_eq!(lines, 5, "expected a header and one line per grid point");
    assert_eq!(first_bytes, second_bytes, "reruns must be byte-identical");
    println!("PASS - determinism: two sweep processes wrote identical bytes");
}
