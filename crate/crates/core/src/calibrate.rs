//! Calibration of ambiguity-set sizes so that the resulting risk bounds the
//! true mean with probability at least 1 − δ.
//!
//! Both calibrations rest on the same fact: the spacings of n − 1 sorted
//! uniforms plus the mass above the largest one are uniform on Δ^n, so a set
//! that contains a uniform simplex point with probability 1 − δ yields a
//! distribution-free upper bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::crossing::{boundary_from_weights, noncrossing_probability};
use crate::divergence::{PhiFamily, Weights};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::pav::ordered_conjugate;
use crate::risk::cvar_bar_layout;
use crate::specfun::{root_find_bracketed, sample_simplex_uniform, smallest_rank, StreamRng};

/// Radius for a φ-divergence set chosen as an order statistic of the ordered
/// conjugate over m simulated simplex points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiCalibration {
    pub alpha_hat: f64,
    pub rank_k: usize,
    pub m: usize,
    pub seed: u64,
    pub family: PhiFamily,
    pub n: usize,
    pub delta: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCalibration {
    pub gamma_hat: f64,
    pub achieved_probability: f64,
    pub n: usize,
    pub delta: f64,
    /// Set when γ = 1/(n−1) already reaches the target, so the returned level
    /// is conservative rather than tight.
    pub at_lower_bound: bool,
    pub warnings: Vec<String>,
}

/// The weight vector μ^(γ) ∈ Δ^n: d−1 zeros, d/(n−1) − γ, then 1/(n−1) up to
/// slot n−1 and γ in the last slot, with d = ⌈(n−1)γ⌉.
pub fn cvar_weights(gamma: f64, n: usize) -> Result<Weights> {
    let (d, boundary, middle) = cvar_bar_layout(gamma, n)?;
    let mut w = vec![0.0; n];
    w[d - 1] = boundary;
    for v in &mut w[d..n - 1] {
        *v = middle;
    }
    w[n - 1] = gamma;
    Weights::new(w)
}

/// P[ν ∈ M(μ^(γ))] for ν uniform on Δ^n.
pub fn cvar_coverage(gamma: f64, n: usize) -> Result<f64> {
    let b = boundary_from_weights(&cvar_weights(gamma, n)?)?;
    Ok(noncrossing_probability(&b))
}

/// Large-n approximation sqrt(ln(1/δ) / (2(n−1))) from the one-sided
/// Kolmogorov–Smirnov tail.
pub fn gamma_asymptotic(n: usize, delta: f64) -> f64 {
    ((1.0 / delta).ln() / (2.0 * (n as f64 - 1.0))).sqrt()
}

/// Smallest γ ∈ [1/(n−1), 1] whose set M(μ^(γ)) has coverage ≥ 1 − δ.
///
/// Coverage is continuous and nondecreasing in γ. A bracket is grown around
/// the asymptotic guess and refined with Brent's method; the feasible end of
/// the final bracket is returned, so the target is always met.
pub fn calibrate_gamma(n: usize, delta: f64, tol: f64) -> Result<GammaCalibration> {
    if n < 2 {
        return Err(Error::input("n must be at least 2"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("δ must lie in (0, 1), got {delta}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::input(format!("tolerance must be positive, got {tol}")));
    }
    let target = 1.0 - delta;
    let lowest = 1.0 / (n as f64 - 1.0);
    let excess = |g: f64| cvar_coverage(g, n).map(|p| p - target);

    let at_lowest = excess(lowest)?;
    if at_lowest >= 0.0 {
        return Ok(GammaCalibration {
            gamma_hat: lowest,
            achieved_probability: at_lowest + target,
            n,
            delta,
            at_lower_bound: true,
            warnings: vec![format!(
                "coverage at the smallest admissible level 1/(n−1) = {lowest} already exceeds 1 − δ; \
                 the returned level is conservative"
            )],
        });
    }

    // grow a bracket [lo, hi] with excess(lo) < 0 ≤ excess(hi) around the guess
    let guess = (gamma_asymptotic(n, delta) - 1.0 / (6.0 * (n as f64 - 1.0))).clamp(lowest, 1.0);
    let (mut lo, mut hi) = (lowest, 1.0);
    let mut step = 0.02 * guess.max(lowest);
    if excess(guess)? >= 0.0 {
        hi = guess;
        loop {
            let probe = (hi - step).max(lowest);
            if probe <= lowest {
                break;
            }
            if excess(probe)? >= 0.0 {
                hi = probe;
                step *= 2.0;
            } else {
                lo = probe;
                break;
            }
        }
    } else {
        lo = guess;
        loop {
            let probe = (lo + step).min(1.0);
            if probe >= 1.0 {
                break;
            }
            if excess(probe)? < 0.0 {
                lo = probe;
                step *= 2.0;
            } else {
                hi = probe;
                break;
            }
        }
    }

    let mut failure = None;
    let root = root_find_bracketed(
        |g| match excess(g) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let root = root?;
    let mut gamma_hat = root.hi;
    let mut achieved = excess(gamma_hat)? + target;
    // Brent keeps a sign change in [lo, hi]; guard against rounding at the ends
    let mut nudge = tol;
    while achieved < target && gamma_hat < 1.0 {
        gamma_hat = (gamma_hat + nudge).min(1.0);
        achieved = excess(gamma_hat)? + target;
        nudge *= 2.0;
    }
    Ok(GammaCalibration {
        gamma_hat,
        achieved_probability: achieved,
        n,
        delta,
        at_lower_bound: false,
        warnings: Vec::new(),
    })
}

/// Ordered-conjugate values of m uniform simplex points. Sample j uses stream
/// j of `seed`, so the result does not depend on the thread count.
pub fn simulate_conjugates(family: PhiFamily, n: usize, m: usize, seed: u64) -> Vec<ExtReal> {
    (0..m as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = StreamRng::derive(seed, j);
            let nu = sample_simplex_uniform(&mut rng, n);
            ordered_conjugate(family, &nu).value
        })
        .collect()
}

/// Radius α̂ = α_(k) where α_j = I◇(ν_j) for m uniform simplex points and k is
/// the smallest rank with P[Bin(m, 1 − δ) ≥ k] ≤ β. With probability at
/// least 1 − β over the simulation, P[I◇(ν) ≤ α̂] ≥ 1 − δ.
///
/// `threads` pins the size of the worker pool; `None` uses the global pool.
pub fn calibrate_phi_radius(
    family: PhiFamily,
    n: usize,
    delta: f64,
    beta: f64,
    m: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<PhiCalibration> {
    if n < 1 {
        return Err(Error::input("n must be positive"));
    }
    let k = smallest_rank(m, delta, beta)?.ok_or_else(|| {
        Error::input(format!(
            "m = {m} samples are too few for δ = {delta}, β = {beta}; increase m"
        ))
    })?;
    let mut values = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::numerical(format!("cannot start worker pool: {e}")))?;
            pool.install(|| simulate_conjugates(family, n, m, seed))
        }
        None => simulate_conjugates(family, n, m, seed),
    };
    values.sort_unstable();
    let alpha_hat = match values[k - 1] {
        ExtReal::Finite(a) => a,
        other => {
            return Err(Error::numerical(format!(
                "order statistic {k} of the simulated conjugates is {other}"
            )))
        }
    };
    Ok(PhiCalibration {
        alpha_hat,
        rank_k: k,
        m,
        seed,
        family,
        n,
        delta,
        beta,
    })
}
