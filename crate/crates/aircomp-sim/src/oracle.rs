//! Exhaustive reference decoder. It enumerates every joint assignment of
//! all transmitters' information digits, so it only runs at desk scale,
//! but within that scale it recovers the exactly most probable digit-sum
//! codeword: the optimal baseline a belief-propagation decode can be
//! compared against.

use std::collections::HashMap;

use aircomp::demod::fold;
use aircomp::lattice::{mod1, segment, LatticeConfig, LatticeSymbol};
use aircomp::ldpc::Encoder;
use anyhow::{bail, ensure, Result};

/// Joint information tuples the oracle is willing to enumerate.
pub const MAX_JOINT_TUPLES: u64 = 1_000_000;

/// Decodes the modulo-q sum codeword by brute force. The folded
/// observation depends on a joint tuple of transmitter digit blocks only
/// through its digit-sum vector, so the posterior mass of a candidate sum
/// is its folded-Gaussian likelihood times the number of joint
/// assignments producing that sum; the decoder enumerates every tuple,
/// tallies those multiplicities, and returns the sum codeword with the
/// largest mass. Ties keep the sum first reached in odometer order (last
/// digit fastest). With `sigma` zero the likelihood degenerates to a bare
/// folded distance with no noise scale against which a multiplicity could
/// be weighed, so the nearest codeword wins outright, matching the
/// small-noise limit.
pub fn oracle_decode(
    received: &[Vec<f64>],
    sigma: f64,
    radix: u64,
    num_tx: usize,
    encoder: &Encoder,
    lattice: LatticeConfig,
) -> Result<Vec<u32>> {
    ensure!(radix >= 2, "radix must be at least 2");
    ensure!(num_tx >= 1, "need at least one transmitter");
    ensure!(
        sigma.is_finite() && sigma >= 0.0,
        "noise level must be finite and nonnegative"
    );
    let matrix = encoder.matrix();
    let block_len = matrix.info_len();
    let joint_digits = num_tx * block_len;
    let tuples = radix
        .checked_pow(u32::try_from(joint_digits).unwrap_or(u32::MAX))
        .filter(|&t| t <= MAX_JOINT_TUPLES);
    if tuples.is_none() {
        bail!(
            "oracle limited to desk scale: {radix}^{joint_digits} joint \
             information tuples exceed {MAX_JOINT_TUPLES}"
        );
    }

    let expected_points = matrix.num_cols() / lattice.dim();
    ensure!(
        received.len() == expected_points,
        "received {} points for a code of {} points",
        received.len(),
        expected_points
    );
    for observation in received {
        ensure!(
            observation.len() == lattice.dim(),
            "observation dimension {} does not match the lattice ({})",
            observation.len(),
            lattice.dim()
        );
        ensure!(
            observation.iter().all(|c| c.is_finite()),
            "received block contains a non-finite coordinate"
        );
    }
    let folded: Vec<LatticeSymbol> = received.iter().map(|obs| fold(obs)).collect();

    // The likelihood of a tuple depends only on its digit-sum vector
    // (the folded observation sees the sum codeword and nothing else),
    // so each distinct sum is scored once while the enumeration counts
    // how many tuples land on it. Entries keep first-seen order so the
    // final argmax breaks ties deterministically.
    let mut slots: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut entries: Vec<(f64, u64, Vec<u32>)> = Vec::new();

    let mut odometer = vec![0u32; joint_digits];
    'tuples: loop {
        let mut sums = vec![0u32; block_len];
        for tx in 0..num_tx {
            for (sum, &digit) in sums.iter_mut().zip(&odometer[tx * block_len..]) {
                *sum += digit;
            }
        }
        match slots.get(&sums) {
            Some(&slot) => entries[slot].1 += 1,
            None => {
                let codeword = encoder.encode(&sums)?.into_symbols();
                let score = folded_log_likelihood(&folded, &codeword, lattice, sigma)?;
                slots.insert(sums, entries.len());
                entries.push((score, 1, codeword));
            }
        }

        let mut pos = joint_digits;
        loop {
            if pos == 0 {
                break 'tuples;
            }
            pos -= 1;
            odometer[pos] += 1;
            if (odometer[pos] as u64) < radix {
                break;
            }
            odometer[pos] = 0;
        }
    }

    let mut best_score = f64::NEG_INFINITY;
    let mut best: Option<&Vec<u32>> = None;
    for (likelihood, count, codeword) in &entries {
        let score = if sigma == 0.0 {
            *likelihood
        } else {
            *likelihood + (*count as f64).ln()
        };
        if score > best_score {
            best_score = score;
            best = Some(codeword);
        }
    }
    Ok(best.cloned().expect("the all-zero tuple is always scored"))
}

fn folded_log_likelihood(
    folded: &[LatticeSymbol],
    codeword: &[u32],
    lattice: LatticeConfig,
    sigma: f64,
) -> Result<f64> {
    let groups = segment(codeword, lattice.dim())?;
    let mut total = 0.0;
    for (observation, group) in folded.iter().zip(&groups) {
        let point = lattice.map(group)?;
        for (&t, &m) in observation.coords().iter().zip(point.coords()) {
            let delta = mod1(t - m);
            total += if sigma == 0.0 {
                -(delta * delta)
            } else {
                wrapped_log_kernel(delta, sigma)
            };
        }
    }
    Ok(total)
}

/// Log density, up to a constant, of a folded Gaussian: the three nearest
/// replicas cover every noise level the oracle sees.
fn wrapped_log_kernel(delta: f64, sigma: f64) -> f64 {
    let scale = 1.0 / (2.0 * sigma * sigma);
    let terms = [-1.0, 0.0, 1.0].map(|z| -(delta - z) * (delta - z) * scale);
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}
