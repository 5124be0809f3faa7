//! Probability that uniform order statistics stay above a nondecreasing
//! boundary.
//!
//! For m iid uniforms and thresholds 0 ≤ b_1 ≤ … ≤ b_m ≤ 1 we compute
//! P[U_(k) ≥ b_k for all k]. With N_k = #{i : U_i < b_k} the event is
//! {N_k ≤ k − 1 for all k}. Given N_{k−1} = j the remaining m − j points are
//! uniform on [b_{k−1}, 1], so the increment N_k − N_{k−1} is
//! Binomial(m − j, (b_k − b_{k−1})/(1 − b_{k−1})). A forward pass over
//! (k, j) only ever adds nonnegative terms.

use crate::cones::monotone_member;
use crate::divergence::Weights;
use crate::error::{Error, Result};

/// Nondecreasing thresholds in [0, 1], one per genuine order statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary(Vec<f64>);

impl Boundary {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if let Some(bad) = b.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::input(format!("boundary value {bad} outside [0, 1]")));
        }
        if b.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::input("boundary must be nondecreasing"));
        }
        Ok(Boundary(b))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Number of uniform order statistics m.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Boundary b_k = μ_1 + … + μ_k for k < n. The last condition is vacuous
/// because the n-th slot holds the almost-sure bound, U_(n) = 1.
pub fn boundary_from_weights(mu: &Weights) -> Result<Boundary> {
    if !monotone_member(mu.as_slice(), crate::cones::DEFAULT_TOL)? {
        return Err(Error::input("distortion weights must be nondecreasing"));
    }
    let n = mu.len();
    let mut b = Vec::with_capacity(n.saturating_sub(1));
    let mut acc = 0.0_f64;
    for &m in &mu.as_slice()[..n - 1] {
        acc += m;
        // cumulative sums are monotone; clamp only guards rounding past 1
        b.push(acc.clamp(0.0, 1.0));
    }
    Boundary::new(b)
}

/// Binomial(trials, p) probabilities for 0..=limit (truncated at `trials`),
/// written into `out`. Evaluated from the mode outwards by the ratio
/// recurrence so only one exponential is needed.
fn binomial_prefix(trials: usize, p: f64, limit: usize, ln_fact: &[f64], out: &mut Vec<f64>) {
    out.clear();
    let top = limit.min(trials);
    out.resize(top + 1, 0.0);
    if p <= 0.0 {
        out[0] = 1.0;
        return;
    }
    if p >= 1.0 {
        if trials <= limit {
            out[trials] = 1.0;
        }
        return;
    }
    let q = 1.0 - p;
    let nf = trials as f64;
    let mode = (((nf + 1.0) * p).floor() as usize).min(trials);
    let start = mode.min(top);
    let ln_pmf = ln_fact[trials] - ln_fact[start] - ln_fact[trials - start]
        + start as f64 * p.ln()
        + (trials - start) as f64 * q.ln();
    out[start] = ln_pmf.exp();
    let odds = p / q;
    for i in start..top {
        out[i + 1] = out[i] * (trials - i) as f64 / (i + 1) as f64 * odds;
    }
    for i in (1..=start).rev() {
        out[i - 1] = out[i] * i as f64 / (trials - i + 1) as f64 / odds;
    }
}

/// P[U_(k) ≥ b_k for all k ∈ [m]] for m iid standard uniforms.
pub fn noncrossing_probability(bnd: &Boundary) -> f64 {
    let b = bnd.as_slice();
    let m = b.len();
    if m == 0 {
        return 1.0;
    }
    if b.iter().any(|&v| v >= 1.0) {
        return 0.0;
    }
    let mut ln_fact = vec![0.0; m + 1];
    for i in 1..=m {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }

    // prob[j] = P[N_k = j and no crossing so far]
    let mut prob = vec![1.0];
    let mut next = Vec::with_capacity(m);
    let mut pmf = Vec::with_capacity(m + 1);
    let mut prev_b = 0.0;
    for (k, &bk) in b.iter().enumerate() {
        // after processing threshold k+1 (1-based) at most k points may lie below it
        let cap = k;
        let step = bk - prev_b;
        if step > 0.0 {
            let p = step / (1.0 - prev_b);
            next.clear();
            next.resize(cap + 1, 0.0);
            for (j, &pj) in prob.iter().enumerate() {
                if pj == 0.0 || j > cap {
                    continue;
                }
                binomial_prefix(m - j, p, cap - j, &ln_fact, &mut pmf);
                for (inc, &w) in pmf.iter().enumerate() {
                    next[j + inc] += pj * w;
                }
            }
            std::mem::swap(&mut prob, &mut next);
        } else {
            prob.truncate(cap + 1);
        }
        prob.resize(cap + 1, 0.0);
        prev_b = bk;
    }
    prob.iter().sum::<f64>().clamp(0.0, 1.0)
}
