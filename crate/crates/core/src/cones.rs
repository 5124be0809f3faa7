//! Monotone cone, its polar (the majorization cone) and majorization tests.
//!
//! All membership tests use a relative tolerance `tol · max(1, ‖·‖∞)`.

use crate::divergence::Weights;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// A nonempty vector of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector(Vec<f64>);

impl SampleVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(SampleVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Ascending copy of a vector together with the permutation that produced it:
/// `sorted[i] == original[permutation[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedView {
    pub sorted: Vec<f64>,
    pub permutation: Vec<usize>,
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::input("empty vector"));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::input(format!("entry {i} is not finite ({v})")));
    }
    Ok(())
}

fn scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
}

/// Stable ascending sort with a permutation witness.
pub fn sort_ascending(x: &[f64]) -> Result<SortedView> {
    check_finite(x)?;
    let mut permutation: Vec<usize> = (0..x.len()).collect();
    permutation.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let sorted = permutation.iter().map(|&i| x[i]).collect();
    Ok(SortedView {
        sorted,
        permutation,
    })
}

/// Sorted copy of values the caller has already validated.
pub(crate) fn sorted_copy(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Membership in the polar of the monotone cone: every leading partial sum is
/// nonnegative and the total is zero.
pub fn polar_monotone_member(y: &[f64], tol: f64) -> Result<bool> {
    check_finite(y)?;
    let eps = tol * scale(y);
    let mut partial = 0.0;
    for (k, &v) in y.iter().enumerate() {
        partial += v;
        if k + 1 < y.len() && partial < -eps {
            return Ok(false);
        }
    }
    Ok(partial.abs() <= eps)
}

/// Membership in the monotone cone (nondecreasing coordinates).
pub fn monotone_member(x: &[f64], tol: f64) -> Result<bool> {
    check_finite(x)?;
    let eps = tol * scale(x);
    Ok(x.windows(2).all(|w| w[0] <= w[1] + eps))
}

/// Tests `x ≺ y`: ascending partial sums of `x` dominate those of `y` and the
/// totals agree.
pub fn majorizes(y: &[f64], x: &[f64], tol: f64) -> Result<bool> {
    check_finite(x)?;
    check_finite(y)?;
    if x.len() != y.len() {
        return Err(Error::input(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let xs = sorted_copy(x);
    let ys = sorted_copy(y);
    // partial sums accumulate rounding linearly in n
    let eps = tol * scale(x).max(scale(y)) * x.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..xs.len() {
        sx += xs[k];
        sy += ys[k];
        if k + 1 < xs.len() && sx < sy - eps {
            return Ok(false);
        }
    }
    Ok((sx - sy).abs() <= eps)
}

/// Tests `ν ∈ {μ} + polar cone`, i.e. `ν − μ` is in the majorization cone.
pub fn shifted_set_member(nu: &Weights, mu: &Weights, tol: f64) -> Result<bool> {
    if nu.len() != mu.len() {
        return Err(Error::input(format!(
            "length mismatch: {} vs {}",
            nu.len(),
            mu.len()
        )));
    }
    let diff: Vec<f64> = nu
        .as_slice()
        .iter()
        .zip(mu.as_slice())
        .map(|(a, b)| a - b)
        .collect();
    polar_monotone_member(&diff, tol)
}

/// Tests whether `x` lies in the convex hull of all permutations of `y`.
pub fn hull_orbit_member(x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    majorizes(y, x, tol)
}
