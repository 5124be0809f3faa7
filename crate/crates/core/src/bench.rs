//! Monte-Carlo harnesses: empirical coverage of a risk proxy and the
//! newsvendor case study.

use rand::Rng;
use rand_distr::{Beta, Distribution as _};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrate::{calibrate_gamma, calibrate_phi_radius};
use crate::divergence::PhiFamily;
use crate::error::{Error, Result};
use crate::risk::RiskSpec;
use crate::specfun::{golden_section_min, ln_gamma, reg_inc_beta, StreamRng, DEFAULT_ROOT_TOL, DEFAULT_SEED};

/// A bounded distribution with known mean, used to generate losses or demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    /// scale · Beta(alpha, beta).
    ScaledBeta { alpha: f64, beta: f64, scale: f64 },
    /// `high` with probability `p_high`, otherwise `low`.
    TwoPoint { low: f64, high: f64, p_high: f64 },
    Uniform { low: f64, high: f64 },
    PointMass { value: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::ScaledBeta { alpha, beta, scale } => {
                alpha > 0.0 && beta > 0.0 && scale > 0.0 && alpha.is_finite() && beta.is_finite() && scale.is_finite()
            }
            Distribution::TwoPoint { low, high, p_high } => {
                low.is_finite() && high.is_finite() && low <= high && (0.0..=1.0).contains(&p_high)
            }
            Distribution::Uniform { low, high } => low.is_finite() && high.is_finite() && low < high,
            Distribution::PointMass { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::input(format!("invalid distribution parameters: {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::ScaledBeta { alpha, beta, scale } => scale * alpha / (alpha + beta),
            Distribution::TwoPoint { low, high, p_high } => low + p_high * (high - low),
            Distribution::Uniform { low, high } => 0.5 * (low + high),
            Distribution::PointMass { value } => value,
        }
    }

    /// Almost-sure upper bound.
    pub fn ess_sup(&self) -> f64 {
        match *self {
            Distribution::ScaledBeta { scale, .. } => scale,
            Distribution::TwoPoint { low, high, p_high } => {
                if p_high > 0.0 {
                    high
                } else {
                    low
                }
            }
            Distribution::Uniform { high, .. } => high,
            Distribution::PointMass { value } => value,
        }
    }

    /// P[ξ ≤ x].
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(match *self {
            Distribution::ScaledBeta { alpha, beta, scale } => {
                reg_inc_beta((x / scale).clamp(0.0, 1.0), alpha, beta)?
            }
            Distribution::TwoPoint { low, high, p_high } => {
                if x >= high {
                    1.0
                } else if x >= low {
                    1.0 - p_high
                } else {
                    0.0
                }
            }
            Distribution::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            Distribution::PointMass { value } => f64::from(u8::from(x >= value)),
        })
    }

    /// E[ξ · 1{ξ ≤ x}].
    pub fn partial_mean_below(&self, x: f64) -> Result<f64> {
        Ok(match *self {
            Distribution::ScaledBeta { alpha, beta, scale } => {
                // ξ·Beta(a, b) density is a/(a+b) times the Beta(a+1, b) density
                scale * alpha / (alpha + beta) * reg_inc_beta((x / scale).clamp(0.0, 1.0), alpha + 1.0, beta)?
            }
            Distribution::TwoPoint { low, high, p_high } => {
                let mut acc = 0.0;
                if x >= low {
                    acc += (1.0 - p_high) * low;
                }
                if x >= high {
                    acc += p_high * high;
                }
                acc
            }
            Distribution::Uniform { low, high } => {
                let t = x.clamp(low, high);
                (t * t - low * low) / (2.0 * (high - low))
            }
            Distribution::PointMass { value } => {
                if x >= value {
                    value
                } else {
                    0.0
                }
            }
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::ScaledBeta { alpha, beta, scale } => {
                let d = Beta::new(alpha, beta).expect("validated shape parameters");
                scale * d.sample(rng)
            }
            Distribution::TwoPoint { low, high, p_high } => {
                if rng.random::<f64>() < p_high {
                    high
                } else {
                    low
                }
            }
            Distribution::Uniform { low, high } => rng.random_range(low..high),
            Distribution::PointMass { value } => value,
        }
    }
}

/// What occupies the n-th slot of the loss vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// The almost-sure upper bound of the loss.
    #[default]
    Exact,
    /// One more sample in place of the bound.
    Sample,
    /// No n-th slot: only the n − 1 samples are used.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub coverage: f64,
    pub std_error: f64,
    pub trials: usize,
    pub successes: usize,
    pub true_mean: f64,
}

/// Fraction of trials in which the proxy of n − 1 fresh samples (plus the
/// slot chosen by `bound`) is at least the true mean. Trial t uses stream t
/// of `seed`.
pub fn run_coverage_study(
    spec: &RiskSpec,
    dist: &Distribution,
    n: usize,
    trials: usize,
    seed: u64,
    bound: BoundMode,
) -> Result<CoverageReport> {
    dist.validate()?;
    if n < 2 {
        return Err(Error::input("n must be at least 2"));
    }
    if trials == 0 {
        return Err(Error::input("trials must be positive"));
    }
    let true_mean = dist.mean();
    let hits: Vec<bool> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = StreamRng::derive(seed, t);
            let mut x: Vec<f64> = (0..n - 1).map(|_| dist.sample(&mut rng)).collect();
            match bound {
                BoundMode::Exact => x.push(dist.ess_sup()),
                BoundMode::Sample => x.push(dist.sample(&mut rng)),
                BoundMode::None => {}
            }
            spec.evaluate(&x).map(|v| v >= true_mean)
        })
        .collect::<Result<_>>()?;
    let successes = hits.iter().filter(|&&h| h).count();
    let coverage = successes as f64 / trials as f64;
    Ok(CoverageReport {
        coverage,
        std_error: (coverage * (1.0 - coverage) / trials as f64).sqrt(),
        trials,
        successes,
        true_mean,
    })
}

/// One way of turning a dataset into a decision, as listed in a study config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodConfig {
    /// Plain sample average of the n − 1 samples, without the bound slot.
    Saa,
    /// A fixed risk specification applied with the bound slot.
    Fixed { name: String, spec: RiskSpec },
    /// CVaR-bar with γ calibrated for (n, δ).
    CvarBar,
    /// φ-divergence ball with radius calibrated from `m` simulations.
    Phi {
        family: PhiFamily,
        #[serde(default = "default_phi_m")]
        m: usize,
        #[serde(default = "default_phi_beta")]
        beta: f64,
    },
}

fn default_phi_m() -> usize {
    10_000
}

fn default_phi_beta() -> f64 {
    0.005
}

/// Calibrated method ready to be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyMethod {
    pub name: String,
    pub spec: RiskSpec,
    pub use_bound: bool,
}

impl StudyMethod {
    pub fn saa() -> Self {
        StudyMethod {
            name: "SAA".to_string(),
            spec: RiskSpec::Saa,
            use_bound: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewsvendorConfig {
    pub c: f64,
    pub b: f64,
    pub h: f64,
    pub d_bar: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    /// Samples per dataset including the bound slot.
    pub n: usize,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub bound: BoundMode,
    pub methods: Vec<MethodConfig>,
}

impl Default for NewsvendorConfig {
    fn default() -> Self {
        NewsvendorConfig {
            c: 1.0,
            b: 14.0,
            h: 2.0,
            d_bar: 100.0,
            beta_a: 0.1,
            beta_b: 0.2,
            n: 20,
            delta: 0.2,
            trials: 200,
            seed: DEFAULT_SEED,
            bound: BoundMode::Exact,
            methods: vec![
                MethodConfig::Saa,
                MethodConfig::CvarBar,
                MethodConfig::Phi {
                    family: PhiFamily::TotalVariation,
                    m: default_phi_m(),
                    beta: default_phi_beta(),
                },
                MethodConfig::Phi {
                    family: PhiFamily::KullbackLeibler,
                    m: default_phi_m(),
                    beta: default_phi_beta(),
                },
            ],
        }
    }
}

impl NewsvendorConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.c, self.b, self.h, self.d_bar, self.beta_a, self.beta_b, self.delta]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::input("newsvendor parameters must be finite"));
        }
        if !(self.b > self.c && self.c >= 0.0) {
            return Err(Error::input("need b > c ≥ 0"));
        }
        if self.h < 0.0 {
            return Err(Error::input("need h ≥ 0"));
        }
        if self.d_bar <= 0.0 {
            return Err(Error::input("need D̄ > 0"));
        }
        if self.beta_a <= 0.0 || self.beta_b <= 0.0 {
            return Err(Error::input("Beta shape parameters must be positive"));
        }
        if self.n < 3 {
            return Err(Error::input("need n ≥ 3"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::input("δ must lie in (0, 1)"));
        }
        if self.trials == 0 {
            return Err(Error::input("need at least one trial"));
        }
        Ok(())
    }

    /// Demand distribution D̄ · Beta(a, b).
    pub fn demand(&self) -> Distribution {
        Distribution::ScaledBeta {
            alpha: self.beta_a,
            beta: self.beta_b,
            scale: self.d_bar,
        }
    }

    /// Minimizer b D̄ / (b + h) of the worst-case loss.
    pub fn robust_theta(&self) -> f64 {
        self.b * self.d_bar / (self.b + self.h)
    }
}

/// cθ + b[ξ − θ]₊ + h[θ − ξ]₊.
pub fn newsvendor_loss(theta: f64, xi: f64, cfg: &NewsvendorConfig) -> f64 {
    cfg.c * theta + cfg.b * (xi - theta).max(0.0) + cfg.h * (theta - xi).max(0.0)
}

/// max{(c − b)θ + b D̄, (c + h)θ}, the largest loss over ξ ∈ [0, D̄].
pub fn newsvendor_bound(theta: f64, cfg: &NewsvendorConfig) -> f64 {
    ((cfg.c - cfg.b) * theta + cfg.b * cfg.d_bar).max((cfg.c + cfg.h) * theta)
}

/// E[ℓ(θ, ξ)] in closed form through
/// E[(θ − ξ)₊] = θ F(θ) − E[ξ 1{ξ ≤ θ}] and (ξ − θ)₊ = ξ − θ + (θ − ξ)₊.
pub fn expected_loss(theta: f64, cfg: &NewsvendorConfig, demand: &Distribution) -> Result<f64> {
    let under = theta * demand.cdf(theta)? - demand.partial_mean_below(theta)?;
    let under = under.max(0.0);
    let over = (demand.mean() - theta + under).max(0.0);
    Ok(cfg.c * theta + cfg.b * over + cfg.h * under)
}

/// Composite Simpson rule with `panels` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn beta_quadrature(theta: f64, cfg: &NewsvendorConfig, panels: usize) -> f64 {
    let (a, b) = (cfg.beta_a, cfg.beta_b);
    let ln_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    let loss = |x: f64| newsvendor_loss(theta, cfg.d_bar * x, cfg);
    let t = (theta / cfg.d_bar).clamp(0.0, 1.0);
    let mut cuts = vec![0.0, 0.5, 1.0];
    if t > 0.0 && t < 1.0 && t != 0.5 {
        cuts.push(t);
    }
    cuts.sort_by(f64::total_cmp);
    let per_piece = (panels / (cuts.len() - 1)).max(2) & !1;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (s, e) = (w[0], w[1]);
        if e <= 0.5 {
            // x = u^{1/a} absorbs the x^{a−1} singularity at 0
            let g = |u: f64| {
                let x = u.powf(1.0 / a);
                loss(x) * (1.0 - x).powf(b - 1.0) / a
            };
            total += simpson(g, s.powf(a), e.powf(a), per_piece);
        } else {
            // 1 − x = v^{1/b} absorbs the (1 − x)^{b−1} singularity at 1
            let g = |v: f64| {
                let x = 1.0 - v.powf(1.0 / b);
                loss(x) * x.powf(a - 1.0) / b
            };
            total += simpson(g, (1.0 - e).powf(b), (1.0 - s).powf(b), per_piece);
        }
    }
    total * ln_norm.exp()
}

/// E[ℓ(θ, ξ)] for the scaled Beta demand by quadrature on `grid_size`
/// panels, checked against half the panels. Fails when the two disagree by
/// more than 1e−6 relative.
pub fn newsvendor_true_cost(theta: f64, cfg: &NewsvendorConfig, grid_size: usize) -> Result<f64> {
    if grid_size < 10_000 {
        return Err(Error::input("grid size must be at least 10^4"));
    }
    let fine = beta_quadrature(theta, cfg, grid_size);
    let coarse = beta_quadrature(theta, cfg, grid_size / 2);
    if (fine - coarse).abs() > 1e-6 * fine.abs().max(1.0) {
        return Err(Error::numerical(format!(
            "quadrature did not settle: {fine} vs {coarse} at θ = {theta}"
        )));
    }
    Ok(fine)
}

fn loss_vector(theta: f64, samples: &[f64], cfg: &NewsvendorConfig, with_bound: bool) -> Vec<f64> {
    let mut x: Vec<f64> = samples.iter().map(|&xi| newsvendor_loss(theta, xi, cfg)).collect();
    if with_bound {
        x.push(newsvendor_bound(theta, cfg));
    }
    x
}

/// θ* = argmin over [0, D̄] of the proxy of the loss vector, with the bound
/// ℓ_n(θ) appended when `with_bound`. Golden section to 1e−10·D̄, then the
/// interval ends are compared; ties go to the smaller θ. Returns (θ*, proxy).
pub fn minimize_proxy(
    spec: &RiskSpec,
    samples: &[f64],
    cfg: &NewsvendorConfig,
    with_bound: bool,
) -> Result<(f64, f64)> {
    let proxy = |theta: f64| spec.evaluate(&loss_vector(theta, samples, cfg, with_bound));
    let at_zero = proxy(0.0)?;
    let at_top = proxy(cfg.d_bar)?;
    let (mut theta, mut value) = golden_section_min(
        |t| proxy(t).unwrap_or(f64::INFINITY),
        0.0,
        cfg.d_bar,
        1e-10 * cfg.d_bar,
    );
    if at_top < value {
        theta = cfg.d_bar;
        value = at_top;
    }
    if at_zero <= value {
        theta = 0.0;
        value = at_zero;
    }
    Ok((theta, value))
}

/// Turns method descriptions into concrete risk specifications, running the
/// calibrations for (n, δ).
pub fn resolve_methods(
    cfg: &NewsvendorConfig,
    methods: &[MethodConfig],
    threads: Option<usize>,
) -> Result<Vec<StudyMethod>> {
    let mut out = Vec::with_capacity(methods.len());
    for (i, m) in methods.iter().enumerate() {
        out.push(match m {
            MethodConfig::Saa => StudyMethod::saa(),
            MethodConfig::Fixed { name, spec } => StudyMethod {
                name: name.clone(),
                spec: spec.clone(),
                use_bound: true,
            },
            MethodConfig::CvarBar => {
                let g = calibrate_gamma(cfg.n, cfg.delta, DEFAULT_ROOT_TOL)?;
                StudyMethod {
                    name: "CVaR-bar".to_string(),
                    spec: RiskSpec::CvarBar { gamma: g.gamma_hat },
                    use_bound: true,
                }
            }
            MethodConfig::Phi { family, m, beta } => {
                // each φ method gets its own stream family
                let seed = cfg.seed.wrapping_add(1 + i as u64);
                let c = calibrate_phi_radius(*family, cfg.n, cfg.delta, *beta, *m, seed, threads)?;
                StudyMethod {
                    name: family.tag().to_uppercase(),
                    spec: RiskSpec::Phi {
                        family: *family,
                        alpha: c.alpha_hat,
                    },
                    use_bound: true,
                }
            }
        });
    }
    Ok(out)
}

/// One (method, dataset) outcome; these are the CSV rows of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub method: String,
    pub trial: usize,
    pub theta: f64,
    pub true_cost: f64,
    pub proxy: f64,
    pub robust: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub spec: RiskSpec,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Mean of proxy − true cost.
    pub mean_gap: f64,
    /// Fraction of trials with proxy ≥ true cost.
    pub frac_overestimate: f64,
    /// Trials whose true cost exceeds the robust benchmark by more than 1e−6.
    pub robust_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub trials: usize,
    pub robust_theta: f64,
    pub robust_cost: f64,
    pub methods: Vec<MethodSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub rows: Vec<StudyRow>,
    pub summary: StudySummary,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Runs the newsvendor study with the given demand distribution. Dataset t
/// draws from stream t of `cfg.seed`; rows are ordered by (trial, method).
pub fn run_newsvendor_study_with(
    cfg: &NewsvendorConfig,
    demand: &Distribution,
    methods: &[StudyMethod],
) -> Result<StudyOutput> {
    cfg.validate()?;
    demand.validate()?;
    if methods.is_empty() {
        return Err(Error::input("no methods to compare"));
    }
    let robust_theta = cfg.robust_theta();
    let robust_cost = expected_loss(robust_theta, cfg, demand)?;
    let per_trial: Vec<Vec<StudyRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = StreamRng::derive(cfg.seed, t as u64);
            let count = match cfg.bound {
                BoundMode::Sample => cfg.n,
                _ => cfg.n - 1,
            };
            let samples: Vec<f64> = (0..count).map(|_| demand.sample(&mut rng)).collect();
            methods
                .iter()
                .map(|m| {
                    let (data, with_bound) = if !m.use_bound {
                        (&samples[..cfg.n - 1], false)
                    } else {
                        match cfg.bound {
                            BoundMode::Exact => (&samples[..], true),
                            BoundMode::Sample => (&samples[..], false),
                            BoundMode::None => (&samples[..], false),
                        }
                    };
                    let (theta, proxy) = minimize_proxy(&m.spec, data, cfg, with_bound)?;
                    Ok(StudyRow {
                        method: m.name.clone(),
                        trial: t,
                        theta,
                        true_cost: expected_loss(theta, cfg, demand)?,
                        proxy,
                        robust: robust_cost,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<StudyRow> = per_trial.into_iter().flatten().collect();

    let summaries = methods
        .iter()
        .map(|m| {
            let mine: Vec<&StudyRow> = rows.iter().filter(|r| r.method == m.name).collect();
            let count = mine.len() as f64;
            let mut costs: Vec<f64> = mine.iter().map(|r| r.true_cost).collect();
            costs.sort_by(f64::total_cmp);
            MethodSummary {
                method: m.name.clone(),
                spec: m.spec.clone(),
                mean: costs.iter().sum::<f64>() / count,
                min: costs[0],
                q1: quantile(&costs, 0.25),
                median: quantile(&costs, 0.5),
                q3: quantile(&costs, 0.75),
                max: costs[costs.len() - 1],
                mean_gap: mine.iter().map(|r| r.proxy - r.true_cost).sum::<f64>() / count,
                frac_overestimate: mine.iter().filter(|r| r.proxy >= r.true_cost).count() as f64 / count,
                robust_violations: mine.iter().filter(|r| r.true_cost > r.robust + 1e-6).count(),
            }
        })
        .collect();
    Ok(StudyOutput {
        rows,
        summary: StudySummary {
            trials: cfg.trials,
            robust_theta,
            robust_cost,
            methods: summaries,
        },
    })
}

/// The newsvendor study with the configured scaled-Beta demand.
pub fn run_newsvendor_study(cfg: &NewsvendorConfig, methods: &[StudyMethod]) -> Result<StudyOutput> {
    run_newsvendor_study_with(cfg, &cfg.demand(), methods)
}
