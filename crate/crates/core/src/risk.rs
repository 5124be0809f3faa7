//! Worst-case sample averages sup_{μ ∈ A} ⟨μ, x⟩ for the supported
//! permutation-invariant ambiguity sets.
//!
//! Inputs are accepted unsorted; every functional here depends on `x` only
//! through its sorted values.

use serde::{Deserialize, Serialize};

use crate::cones::{check_finite, monotone_member, sorted_copy, DEFAULT_TOL};
use crate::divergence::{PhiFamily, Weights};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::specfun::golden_section_min;

/// Description of a risk functional. Serialized with a `tag` field, e.g.
/// `{"tag":"phi","family":"kl","alpha":0.1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case", try_from = "RawSpec")]
pub enum RiskSpec {
    /// Sample average, A = {1/n}.
    Saa,
    /// Maximum, A = Δ^n.
    Robust,
    /// Σ μ_i x_(i) for nondecreasing simplex weights μ.
    Distortion { mu: Weights },
    /// Anderson-type bound with extra weight γ on the largest entry.
    CvarBar { gamma: f64 },
    /// Conditional value-at-risk at level γ ∈ [0, 1).
    Cvar { gamma: f64 },
    /// Worst case over the φ-divergence ball of radius α around 1/n.
    Phi { family: PhiFamily, alpha: f64 },
}

/// Flat wire form; parsing through it rejects unknown and misplaced fields
/// for every tag, including the parameterless ones.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    tag: String,
    mu: Option<Weights>,
    gamma: Option<f64>,
    family: Option<PhiFamily>,
    alpha: Option<f64>,
}

impl TryFrom<RawSpec> for RiskSpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> std::result::Result<Self, String> {
        let RawSpec {
            tag,
            mu,
            gamma,
            family,
            alpha,
        } = raw;
        let present = [
            ("mu", mu.is_some()),
            ("gamma", gamma.is_some()),
            ("family", family.is_some()),
            ("alpha", alpha.is_some()),
        ];
        let expected: &[&str] = match tag.as_str() {
            "saa" | "robust" => &[],
            "distortion" => &["mu"],
            "cvar_bar" | "cvar" => &["gamma"],
            "phi" => &["family", "alpha"],
            other => return Err(format!("unknown risk tag `{other}`")),
        };
        for (name, is_set) in present {
            if is_set != expected.contains(&name) {
                let verb = if is_set { "does not take" } else { "requires" };
                return Err(format!("risk `{tag}` {verb} field `{name}`"));
            }
        }
        Ok(match tag.as_str() {
            "saa" => RiskSpec::Saa,
            "robust" => RiskSpec::Robust,
            "distortion" => RiskSpec::Distortion { mu: mu.unwrap() },
            "cvar_bar" => RiskSpec::CvarBar { gamma: gamma.unwrap() },
            "cvar" => RiskSpec::Cvar { gamma: gamma.unwrap() },
            _ => RiskSpec::Phi {
                family: family.unwrap(),
                alpha: alpha.unwrap(),
            },
        })
    }
}

impl RiskSpec {
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self {
            RiskSpec::Saa => risk_saa(x),
            RiskSpec::Robust => risk_robust(x),
            RiskSpec::Distortion { mu } => risk_distortion(mu, x),
            RiskSpec::CvarBar { gamma } => risk_cvar_bar(*gamma, x),
            RiskSpec::Cvar { gamma } => risk_cvar(*gamma, x),
            RiskSpec::Phi { family, alpha } => risk_phi(*family, *alpha, x),
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            RiskSpec::Saa => "SAA".to_string(),
            RiskSpec::Robust => "robust".to_string(),
            RiskSpec::Distortion { .. } => "distortion".to_string(),
            RiskSpec::CvarBar { gamma } => format!("CVaR-bar(γ={gamma:.4})"),
            RiskSpec::Cvar { gamma } => format!("CVaR(γ={gamma:.4})"),
            RiskSpec::Phi { family, alpha } => format!("{}(α={alpha:.4})", family.tag().to_uppercase()),
        }
    }
}

pub fn risk_saa(x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    Ok(x.iter().sum::<f64>() / x.len() as f64)
}

pub fn risk_robust(x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    Ok(x.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// ⟨μ, x↑⟩ for nondecreasing simplex weights μ.
pub fn risk_distortion(mu: &Weights, x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    if mu.len() != x.len() {
        return Err(Error::input(format!(
            "weights have length {} but data has length {}",
            mu.len(),
            x.len()
        )));
    }
    if !monotone_member(mu.as_slice(), DEFAULT_TOL)? {
        return Err(Error::input("distortion weights must be nondecreasing"));
    }
    let xs = sorted_copy(x);
    let mut acc = 0.0;
    for (m, v) in mu.as_slice().iter().zip(&xs) {
        acc += m * v;
    }
    Ok(acc)
}

/// CVaR at level γ in its order-statistic form:
/// (1 − γ)·CVaR = (d/n − γ) x_(d) + Σ_{i>d} x_(i)/n with d = ⌈nγ⌉.
pub fn risk_cvar(gamma: f64, x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::input(format!("CVaR level must lie in [0, 1), got {gamma}")));
    }
    let n = x.len();
    let nf = n as f64;
    let xs = sorted_copy(x);
    let d = ((nf * gamma).ceil() as usize).min(n);
    let mut acc = 0.0;
    if d >= 1 {
        acc += (d as f64 / nf - gamma).max(0.0) * xs[d - 1];
    }
    for v in &xs[d..] {
        acc += v / nf;
    }
    Ok(acc / (1.0 - gamma))
}

/// Layout of the CVaR-bar weights for `n` slots: `(d, boundary, middle)` where
/// the weights are d−1 zeros, `boundary`, n−1−d copies of `middle`, then γ.
pub(crate) fn cvar_bar_layout(gamma: f64, n: usize) -> Result<(usize, f64, f64)> {
    if n < 2 {
        return Err(Error::input("CVaR-bar needs at least two slots"));
    }
    let m = (n - 1) as f64;
    let lower = 1.0 / m;
    if !(gamma.is_finite() && gamma >= lower * (1.0 - 1e-12) && gamma <= 1.0) {
        return Err(Error::input(format!(
            "CVaR-bar level must lie in [1/(n−1), 1] = [{lower}, 1], got {gamma}"
        )));
    }
    let d = ((m * gamma).ceil() as usize).clamp(1, n - 1);
    let boundary = (d as f64 / m - gamma).max(0.0);
    Ok((d, boundary, 1.0 / m))
}

/// (d/(n−1) − γ) x_(d) + Σ_{i=d+1}^{n−1} x_(i)/(n−1) + γ x_(n) with
/// d = ⌈(n−1)γ⌉; the largest entry plays the role of the almost-sure bound.
pub fn risk_cvar_bar(gamma: f64, x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    let n = x.len();
    let (d, boundary, middle) = cvar_bar_layout(gamma, n)?;
    let xs = sorted_copy(x);
    // accumulate in slot order so the result matches the explicit weight vector bit for bit
    let mut acc = 0.0;
    acc += boundary * xs[d - 1];
    for v in &xs[d..n - 1] {
        acc += middle * v;
    }
    acc += gamma * xs[n - 1];
    Ok(acc)
}

/// sup ⟨μ, x⟩ over {μ ∈ Δ^n : ‖μ − 1/n‖₁ ≤ α}: move min(α/2, (n−1)/n) of
/// mass from the smallest entries onto the largest.
pub fn risk_tv_exact(alpha: f64, x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::input(format!("radius must be a nonnegative number, got {alpha}")));
    }
    let n = x.len();
    let nf = n as f64;
    let xs = sorted_copy(x);
    let mut mu = vec![1.0 / nf; n];
    let mut remaining = (0.5 * alpha).min((nf - 1.0) / nf);
    mu[n - 1] += remaining;
    for w in mu.iter_mut().take(n - 1) {
        if remaining <= 0.0 {
            break;
        }
        let take = remaining.min(*w);
        *w -= take;
        remaining -= take;
    }
    Ok(mu.iter().zip(&xs).map(|(m, v)| m * v).sum())
}

/// Objective of the two-variable dual λα + μ + (1/n) Σ λ φ*((z_i − μ)/λ).
fn phi_dual_objective(family: PhiFamily, alpha: f64, z: &[f64], lambda: f64, mu: f64) -> f64 {
    let n = z.len() as f64;
    let mut acc = 0.0;
    for &zi in z {
        match family.phi_star((zi - mu) / lambda) {
            ExtReal::Finite(s) => acc += s,
            _ => return f64::INFINITY,
        }
    }
    lambda * alpha + mu + lambda * acc / n
}

/// Largest argument of φ* the inner search needs to reach; keeps every
/// evaluation finite near the top of the μ bracket.
fn star_argument_cap(family: PhiFamily) -> f64 {
    match family.star_domain_sup() {
        ExtReal::Finite(s) => s,
        _ => 700.0,
    }
}

/// min over μ of the dual objective at fixed λ > 0, for data in [0, 1] with max 1.
fn phi_dual_inner(family: PhiFamily, alpha: f64, z: &[f64], lambda: f64) -> f64 {
    let lo = (1.0 - lambda * star_argument_cap(family)).max(0.0);
    let (_, v) = golden_section_min(
        |mu| phi_dual_objective(family, alpha, z, lambda, mu),
        lo,
        1.0,
        1e-13,
    );
    v
}

/// Worst-case mean over the φ-divergence ball of radius α, through the dual
///
/// ```text
/// ρ(x) = min_{λ ≥ 0, μ} λα + μ + (1/n) Σ λ φ*((x_i − μ)/λ)
/// ```
///
/// solved by nested golden-section search (outer λ, inner μ) on data rescaled
/// to [0, 1]. At λ = 0 the perspective term vanishes for μ ≥ max x, so that
/// end contributes max x.
pub fn risk_phi(family: PhiFamily, alpha: f64, x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::input(format!("radius must be a nonnegative number, got {alpha}")));
    }
    let mean = risk_saa(x)?;
    if alpha == 0.0 {
        return Ok(mean);
    }
    let xs = sorted_copy(x);
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let range = hi - lo;
    if range == 0.0 {
        return Ok(hi);
    }
    let z: Vec<f64> = xs.iter().map(|v| (v - lo) / range).collect();

    let g = |lambda: f64| phi_dual_inner(family, alpha, &z, lambda);
    let mut upper = 1.0_f64.max(1.0 / alpha);
    let mut g_upper = g(upper);
    while upper < 1e12 {
        let g_next = g(2.0 * upper);
        if g_next >= g_upper {
            break;
        }
        upper *= 2.0;
        g_upper = g_next;
    }
    let (_, g_min) = golden_section_min(g, 0.0, 2.0 * upper, 1e-12 * upper);
    // λ → 0 limit equals max z = 1
    let scaled = g_min.min(1.0);
    Ok((lo + range * scaled).clamp(mean, hi))
}
