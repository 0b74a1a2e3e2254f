//! Log-domain belief propagation for parity-check codes over Z_q.
//!
//! Symbol beliefs are log-likelihood-ratio vectors ([`Llrv`]) of length
//! q - 1: entry alpha - 1 holds ln(P(v = alpha) / P(v = 0)), so the zero
//! symbol is the implicit reference with ratio 0. Ratios saturate at
//! [`LLR_MAX`] in magnitude, with the floor measured from the most likely
//! value so that the ordering of candidates survives saturation.
//!
//! Check nodes combine neighbor beliefs with [`box_plus`]: the belief of
//! a weighted sum A1 v1 + A2 v2 is the coefficient-permuted circular
//! convolution of the operand beliefs, evaluated exactly in the log domain
//! via logsumexp rather than through a max-term lookup approximation.
//! A check of degree d is processed with forward and backward partial-sum
//! chains, so one update costs O(d q^2) instead of O(d^2 q^2).
//!
//! [`DecoderState::decode`] runs a flooding schedule: a tentative hard
//! decision is tried before any message passing (iteration 0), then each
//! iteration runs every check update, every variable update, and another
//! tentative decision, stopping early on a zero syndrome.

use crate::field::PrimeField;
use crate::ldpc::ParityCheckMatrix;
use thiserror::Error;

/// Dynamic-range bound for all log-likelihood ratios: no value is held
/// more than e^LLR_MAX times less likely than the most likely value.
/// Ratios beyond that carry no information at double precision.
pub const LLR_MAX: f64 = 30.0;

/// Errors from belief construction and decoder setup.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum DecoderError {
    /// A probability vector needs one entry per field value.
    #[error("probability vector has {0} entries, need at least 2")]
    TooFewProbabilities(usize),
    /// Probabilities must be nonnegative.
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    /// Probabilities must sum to one.
    #[error("probabilities sum to {0}, expected 1 within 1e-9")]
    UnnormalizedProbabilities(f64),
    /// Permutation by zero is not a bijection of the field.
    #[error("coefficient must be a nonzero field element")]
    ZeroCoefficient,
    /// Operands belong to different field orders.
    #[error("mismatched field orders {0} and {1}")]
    OrderMismatch(u32, u32),
    /// The channel beliefs do not cover the code.
    #[error("got {got} channel vectors for code length {expected}")]
    ChannelLengthMismatch { expected: usize, got: usize },
}

/// A log-likelihood-ratio vector over Z_q: entry alpha - 1 is
/// ln(P(v = alpha) / P(v = 0)), kept within +/- [`LLR_MAX`] by flooring
/// each value's log-probability at [`LLR_MAX`] below the most likely
/// value's. That saturation keeps every entry finite without ever
/// reordering values: clamping each ratio against value 0 independently
/// would collapse two strong candidates onto the same bound and lose
/// which of them the channel actually favored.
#[derive(Debug, Clone, PartialEq)]
pub struct Llrv {
    values: Vec<f64>,
}

impl Llrv {
    /// The all-zero vector: every field value equally likely.
    pub fn uniform(order: u32) -> Self {
        assert!(order >= 2, "field order must be at least 2");
        Self {
            values: vec![0.0; (order - 1) as usize],
        }
    }

    /// Certainty of `value`: its ratio at +LLR_MAX, all others at -LLR_MAX
    /// (for value 0, every ratio is -LLR_MAX).
    pub fn pinned(value: u32, order: u32) -> Self {
        assert!(order >= 2, "field order must be at least 2");
        assert!(value < order, "pinned value must be a field element");
        let mut values = vec![-LLR_MAX; (order - 1) as usize];
        if value > 0 {
            values[(value - 1) as usize] = LLR_MAX;
        }
        Self { values }
    }

    /// Wraps raw ratios, saturating the dynamic range: every value's
    /// log-probability is floored at [`LLR_MAX`] below the most likely
    /// value's, then ratios are re-expressed against value 0. Entries
    /// land in [-LLR_MAX, LLR_MAX] and the likelihood order of values
    /// above the floor survives. -inf inputs sit on the floor; NaN and
    /// +inf are not allowed.
    pub fn from_log_ratios(values: Vec<f64>) -> Self {
        debug_assert!(values
            .iter()
            .all(|v| !v.is_nan() && *v != f64::INFINITY));
        let mut top = 0.0f64;
        for &v in &values {
            top = top.max(v);
        }
        let floor = top - LLR_MAX;
        let anchor = floor.max(0.0);
        Self {
            values: values.into_iter().map(|v| v.max(floor) - anchor).collect(),
        }
    }

    /// Builds ratios from a full probability vector (entry per field value,
    /// including value 0). Zero probabilities land on the dynamic-range
    /// floor, [`LLR_MAX`] below the most likely value.
    pub fn from_probs(probs: &[f64]) -> Result<Self, DecoderError> {
        if probs.len() < 2 {
            return Err(DecoderError::TooFewProbabilities(probs.len()));
        }
        for &p in probs {
            if p < 0.0 || p.is_nan() {
                return Err(DecoderError::NegativeProbability(p));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DecoderError::UnnormalizedProbabilities(sum));
        }
        // The max log-probability is finite (some entry is at least 1/q),
        // so the floor tames the -inf of any zero probability.
        let logs: Vec<f64> = probs.iter().map(|&p| p.ln()).collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let floor = top - LLR_MAX;
        let anchor = logs[0].max(floor);
        Ok(Self {
            values: logs[1..].iter().map(|&l| l.max(floor) - anchor).collect(),
        })
    }

    /// The field order q this vector describes.
    pub fn order(&self) -> u32 {
        self.values.len() as u32 + 1
    }

    /// The q - 1 ratios for values 1..q.
    pub fn log_ratios(&self) -> &[f64] {
        &self.values
    }

    /// The ratio for one field value; value 0 is the reference with ratio 0.
    pub fn log_ratio(&self, value: u32) -> f64 {
        if value == 0 {
            0.0
        } else {
            self.values[(value - 1) as usize]
        }
    }

    /// The normalized probability vector (softmax over all q values).
    pub fn probs(&self) -> Vec<f64> {
        let mut exps = Vec::with_capacity(self.values.len() + 1);
        exps.push(0.0f64);
        exps.extend_from_slice(&self.values);
        let m = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = exps.iter().map(|&v| (v - m).exp()).collect();
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        probs
    }

    /// Most likely field value, ties broken toward the smallest value.
    pub fn hard_decision(&self) -> u32 {
        let mut best = 0u32;
        let mut best_ratio = 0.0f64;
        for (i, &v) in self.values.iter().enumerate() {
            if v > best_ratio {
                best_ratio = v;
                best = i as u32 + 1;
            }
        }
        best
    }
}

fn check_order(l: &Llrv, field: PrimeField) -> Result<(), DecoderError> {
    if l.order() != field.order() {
        return Err(DecoderError::OrderMismatch(l.order(), field.order()));
    }
    Ok(())
}

/// Belief of the scaled symbol w = coeff * v given the belief of v: entry
/// beta of the result reads the entry of `l` at coeff^-1 * beta.
pub fn permute(l: &Llrv, coeff: u32, field: PrimeField) -> Result<Llrv, DecoderError> {
    check_order(l, field)?;
    if coeff == 0 || coeff >= field.order() {
        return Err(DecoderError::ZeroCoefficient);
    }
    let inv = field.inv(coeff).expect("coeff is nonzero");
    let values = (1..field.order())
        .map(|beta| l.log_ratio(field.mul(inv, beta)))
        .collect();
    Ok(Llrv { values })
}

fn logsumexp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|&t| (t - m).exp()).sum::<f64>().ln()
}

/// Belief of v_a + v_b for independent symbols with beliefs `a` and `b`:
/// a circular convolution of their distributions, done exactly in the log
/// domain.
fn convolve(a: &Llrv, b: &Llrv, field: PrimeField) -> Llrv {
    let q = field.order();
    let mut terms = vec![0.0f64; q as usize];
    let mut nums = Vec::with_capacity(q as usize);
    for gamma in 0..q {
        for alpha in 0..q {
            terms[alpha as usize] = a.log_ratio(alpha) + b.log_ratio(field.sub(gamma, alpha));
        }
        nums.push(logsumexp(&terms));
    }
    Llrv::from_log_ratios((1..q as usize).map(|g| nums[g] - nums[0]).collect())
}

/// Belief of coeff_a * v_a + coeff_b * v_b: permutes both operands by their
/// coefficients, then convolves. Coefficients must be nonzero.
pub fn box_plus(
    a: &Llrv,
    b: &Llrv,
    coeff_a: u32,
    coeff_b: u32,
    field: PrimeField,
) -> Result<Llrv, DecoderError> {
    check_order(a, field)?;
    check_order(b, field)?;
    let wa = permute(a, coeff_a, field)?;
    let wb = permute(b, coeff_b, field)?;
    Ok(convolve(&wa, &wb, field))
}

/// Outcome of a decoding run.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Hard decision per symbol, a codeword when `converged` is true.
    pub codeword: Vec<u32>,
    /// Whether the syndrome reached zero within the iteration budget.
    pub converged: bool,
    /// Iterations actually spent (0 means the channel beliefs alone
    /// already satisfied every check).
    pub iterations: u32,
}

/// Message state of a flooding belief-propagation run over one received
/// block.
#[derive(Debug, Clone)]
pub struct DecoderState<'a> {
    matrix: &'a ParityCheckMatrix,
    channel: Vec<Llrv>,
    /// Variable-to-check beliefs, one per matrix entry in row-major order.
    to_check: Vec<Llrv>,
    /// Check-to-variable beliefs, same indexing.
    to_variable: Vec<Llrv>,
    /// Edge ids of each column's entries, aligned with `matrix.column(n)`.
    col_edges: Vec<Vec<usize>>,
    max_iterations: u32,
}

impl<'a> DecoderState<'a> {
    /// Prepares a decode of `channel` beliefs (one [`Llrv`] per symbol).
    /// Variable-to-check messages start as copies of the channel beliefs,
    /// check-to-variable messages as uniform.
    pub fn new(
        matrix: &'a ParityCheckMatrix,
        channel: Vec<Llrv>,
        max_iterations: u32,
    ) -> Result<Self, DecoderError> {
        if channel.len() != matrix.num_cols() {
            return Err(DecoderError::ChannelLengthMismatch {
                expected: matrix.num_cols(),
                got: channel.len(),
            });
        }
        for l in &channel {
            check_order(l, matrix.field())?;
        }
        let num_edges = matrix.num_entries();
        let q = matrix.field().order();
        let mut to_check = vec![Llrv::uniform(q); num_edges];
        let mut col_edges = vec![Vec::new(); matrix.num_cols()];
        for m in 0..matrix.num_rows() {
            for (k, &(n, _)) in matrix.row(m).iter().enumerate() {
                let e = matrix.edge_id(m, k);
                to_check[e] = channel[n].clone();
                col_edges[n].push(e);
            }
        }
        // Align col_edges[n] with matrix.column(n), which is sorted by row;
        // row-major edge ids of one column are already in row order.
        Ok(Self {
            matrix,
            channel,
            to_check,
            to_variable: vec![Llrv::uniform(q); num_edges],
            col_edges,
            max_iterations,
        })
    }

    /// The check-to-variable belief on edge (row, col), if that entry
    /// exists.
    pub fn message_to_variable(&self, row: usize, col: usize) -> Option<&Llrv> {
        self.matrix.edge_at(row, col).map(|e| &self.to_variable[e])
    }

    /// The variable-to-check belief on edge (row, col), if that entry
    /// exists.
    pub fn message_to_check(&self, row: usize, col: usize) -> Option<&Llrv> {
        self.matrix.edge_at(row, col).map(|e| &self.to_check[e])
    }

    /// Recomputes every check-to-variable message of one check. The
    /// message to neighbor k is the belief of the check's sum excluding k
    /// (deterministic zero for a degree-1 check), mapped back through the
    /// neighbor's negated inverse coefficient.
    pub fn check_node_update(&mut self, row: usize) {
        let entries = self.matrix.row(row);
        let d = entries.len();
        let field = self.matrix.field();
        let q = field.order();

        // Beliefs of the weighted contributions h_k * v_k.
        let contributions: Vec<Llrv> = entries
            .iter()
            .enumerate()
            .map(|(k, &(_, h))| {
                permute(&self.to_check[self.matrix.edge_id(row, k)], h, field)
                    .expect("matrix entries are nonzero and orders match")
            })
            .collect();

        // forward[k] = sum of contributions 0..=k, backward[k] = k..d-1.
        let mut forward = Vec::with_capacity(d);
        for c in &contributions {
            forward.push(match forward.last() {
                Some(prev) => convolve(prev, c, field),
                None => c.clone(),
            });
        }
        let mut backward = vec![Llrv::uniform(q); d];
        for k in (0..d).rev() {
            backward[k] = if k + 1 < d {
                convolve(&contributions[k], &backward[k + 1], field)
            } else {
                contributions[k].clone()
            };
        }

        for (k, &(_, h)) in entries.iter().enumerate() {
            let sum_of_others = match (k > 0, k + 1 < d) {
                (true, true) => convolve(&forward[k - 1], &backward[k + 1], field),
                (true, false) => forward[k - 1].clone(),
                (false, true) => backward[k + 1].clone(),
                // Degree-1 check: the sum over no neighbors is zero.
                (false, false) => Llrv::pinned(0, q),
            };
            // h_k v_k = -sum_of_others, so v_k = (-h_k^-1) sum_of_others.
            let coeff = field.neg(field.inv(h).expect("nonzero entry"));
            self.to_variable[self.matrix.edge_id(row, k)] =
                permute(&sum_of_others, coeff, field).expect("nonzero coefficient");
        }
    }

    /// Recomputes every variable-to-check message of one symbol: channel
    /// belief plus all incoming check beliefs except the destination's.
    pub fn variable_node_update(&mut self, col: usize) {
        let edges = &self.col_edges[col];
        let width = (self.matrix.field().order() - 1) as usize;
        // Unclamped total, then subtract each edge's own contribution.
        let mut total = self.channel[col].values.clone();
        for &e in edges {
            for (t, v) in total.iter_mut().zip(&self.to_variable[e].values) {
                *t += v;
            }
        }
        for &e in edges {
            let values = (0..width)
                .map(|i| total[i] - self.to_variable[e].values[i])
                .collect();
            self.to_check[e] = Llrv::from_log_ratios(values);
        }
    }

    /// Posterior belief of every symbol: channel belief plus all incoming
    /// check beliefs.
    pub fn posteriors(&self) -> Vec<Llrv> {
        (0..self.matrix.num_cols())
            .map(|n| {
                let mut values = self.channel[n].values.clone();
                for &e in &self.col_edges[n] {
                    for (t, v) in values.iter_mut().zip(&self.to_variable[e].values) {
                        *t += v;
                    }
                }
                Llrv::from_log_ratios(values)
            })
            .collect()
    }

    /// One flooding pass: every check update, then every variable update.
    pub fn iterate(&mut self) {
        for m in 0..self.matrix.num_rows() {
            self.check_node_update(m);
        }
        for n in 0..self.matrix.num_cols() {
            self.variable_node_update(n);
        }
    }

    /// Runs the flooding schedule until the hard decision satisfies every
    /// check or the iteration budget is spent. The returned hard decision
    /// is the latest tentative word either way.
    pub fn decode(&mut self) -> DecodeResult {
        let mut estimate: Vec<u32> = Vec::new();
        for iteration in 0..=self.max_iterations {
            estimate = self.posteriors().iter().map(Llrv::hard_decision).collect();
            let syndrome = self
                .matrix
                .syndrome(&estimate)
                .expect("hard decisions are field elements");
            if syndrome.iter().all(|&s| s == 0) {
                return DecodeResult {
                    codeword: estimate,
                    converged: true,
                    iterations: iteration,
                };
            }
            if iteration < self.max_iterations {
                self.iterate();
            }
        }
        DecodeResult {
            codeword: estimate,
            converged: false,
            iterations: self.max_iterations,
        }
    }
}
