//! Quick invariant checks across all modules, meant to be run from the
//! command line on a fresh build.

use serde::Serialize;

use crate::bench::{newsvendor_bound, newsvendor_loss, NewsvendorConfig};
use crate::calibrate::{calibrate_gamma, cvar_weights};
use crate::cones::{majorizes, shifted_set_member, DEFAULT_TOL};
use crate::crossing::{noncrossing_probability, Boundary};
use crate::divergence::{PhiFamily, Weights};
use crate::ext::ExtReal;
use crate::pav::ordered_conjugate;
use crate::risk::{risk_cvar_bar, risk_distortion, risk_phi, risk_saa, risk_tv_exact, RiskSpec};
use crate::specfun::{reg_inc_beta, sample_simplex_uniform, smallest_rank, StreamRng};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: std::result::Result<(), String>) -> CheckResult {
    match outcome {
        Ok(()) => CheckResult {
            name,
            passed: true,
            detail: String::new(),
        },
        Err(detail) => CheckResult {
            name,
            passed: false,
            detail,
        },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn special_functions() -> std::result::Result<(), String> {
    let e = |r: crate::Result<f64>| r.map_err(|e| e.to_string());
    for x in [0.0, 0.1, 0.37, 0.9, 1.0] {
        let v = e(reg_inc_beta(x, 1.0, 1.0))?;
        ensure((v - x).abs() < 1e-12, || format!("I_{x}(1,1) = {v}"))?;
    }
    let v = e(reg_inc_beta(0.5, 2.0, 1.0))?;
    ensure((v - 0.25).abs() < 1e-12, || format!("I_0.5(2,1) = {v}"))?;
    let a = e(reg_inc_beta(0.3, 2.5, 4.0))?;
    let b = e(reg_inc_beta(0.7, 4.0, 2.5))?;
    ensure((a + b - 1.0).abs() < 1e-12, || format!("reflection: {a} + {b}"))?;
    let r = smallest_rank(1, 0.5, 0.6).map_err(|e| e.to_string())?;
    ensure(r == Some(1), || format!("smallest_rank(1, 0.5, 0.6) = {r:?}"))
}

fn conjugates() -> std::result::Result<(), String> {
    // Fenchel–Young holds with equality at a subgradient: φ*(λ) = λt − φ(t)
    for f in PhiFamily::ALL {
        for i in 1..=40 {
            let t = 0.1 * i as f64;
            let phi = f.phi(t).map_err(|e| e.to_string())?.finite();
            let lambda = f.subgrad(t).map_err(|e| e.to_string())?.hi.finite();
            if let (Some(p), Some(l)) = (phi, lambda) {
                let s = f.phi_star(l).finite();
                ensure(s.is_some_and(|s| (s - (l * t - p)).abs() < 1e-9), || {
                    format!("{f}: Fenchel–Young fails at t={t}")
                })?;
            }
        }
    }
    Ok(())
}

fn pav_and_cones() -> std::result::Result<(), String> {
    let mut rng = StreamRng::new(1);
    for f in PhiFamily::ALL {
        let r = ordered_conjugate(f, &Weights::uniform(6));
        ensure(r.value == ExtReal::ZERO, || format!("{f}: I(1/n) = {}", r.value))?;
        for _ in 0..50 {
            let nu = sample_simplex_uniform(&mut rng, 7);
            let r = ordered_conjugate(f, &nu);
            ensure(r.value >= ExtReal::ZERO, || format!("{f}: negative value"))?;
            ensure(r.lambda.windows(2).all(|p| p[0] <= p[1]), || format!("{f}: λ not monotone"))?;
        }
    }
    let a = [1.0, 2.0, 3.0];
    let b = [0.0, 2.0, 4.0];
    ensure(majorizes(&b, &a, DEFAULT_TOL).unwrap_or(false), || "majorization example".into())?;
    let nu = Weights::new(vec![0.5, 0.3, 0.2]).map_err(|e| e.to_string())?;
    ensure(
        shifted_set_member(&nu, &Weights::uniform(3), DEFAULT_TOL).unwrap_or(false),
        || "shifted-set example".into(),
    )
}

fn crossing_and_calibration() -> std::result::Result<(), String> {
    let p = noncrossing_probability(&Boundary::new(vec![0.3]).map_err(|e| e.to_string())?);
    ensure((p - 0.7).abs() < 1e-15, || format!("P[U ≥ 0.3] = {p}"))?;
    let c = calibrate_gamma(20, 0.2, 1e-10).map_err(|e| e.to_string())?;
    ensure(
        c.achieved_probability >= 0.8 && c.achieved_probability <= 0.801,
        || format!("γ calibration reached {}", c.achieved_probability),
    )
}

fn risk_functionals() -> std::result::Result<(), String> {
    let mut rng = StreamRng::new(2);
    let specs = [
        RiskSpec::Saa,
        RiskSpec::Robust,
        RiskSpec::Cvar { gamma: 0.3 },
        RiskSpec::CvarBar { gamma: 0.3 },
        RiskSpec::Phi {
            family: PhiFamily::KullbackLeibler,
            alpha: 0.2,
        },
    ];
    for _ in 0..20 {
        let x: Vec<f64> = (0..8).map(|_| rand::Rng::random_range(&mut rng, -3.0..3.0)).collect();
        let shifted: Vec<f64> = x.iter().map(|v| v + 1.5).collect();
        let mean = risk_saa(&x).map_err(|e| e.to_string())?;
        for s in &specs {
            let v = s.evaluate(&x).map_err(|e| e.to_string())?;
            let w = s.evaluate(&shifted).map_err(|e| e.to_string())?;
            ensure((w - v - 1.5).abs() < 1e-9, || format!("{s:?}: translation"))?;
            ensure(v >= mean - 1e-9, || format!("{s:?}: below the mean"))?;
        }
        let bar = risk_cvar_bar(0.3, &x).map_err(|e| e.to_string())?;
        let dist = risk_distortion(&cvar_weights(0.3, 8).map_err(|e| e.to_string())?, &x).map_err(|e| e.to_string())?;
        ensure(bar == dist, || format!("CVaR-bar {bar} vs distortion {dist}"))?;
        let dual = risk_phi(PhiFamily::TotalVariation, 0.4, &x).map_err(|e| e.to_string())?;
        let exact = risk_tv_exact(0.4, &x).map_err(|e| e.to_string())?;
        ensure((dual - exact).abs() < 1e-6, || format!("TV dual {dual} vs greedy {exact}"))?;
    }
    Ok(())
}

fn newsvendor() -> std::result::Result<(), String> {
    let cfg = NewsvendorConfig::default();
    let mut rng = StreamRng::new(3);
    for _ in 0..1000 {
        let theta = rand::Rng::random_range(&mut rng, 0.0..=cfg.d_bar);
        let xi = rand::Rng::random_range(&mut rng, 0.0..=cfg.d_bar);
        ensure(
            newsvendor_loss(theta, xi, &cfg) <= newsvendor_bound(theta, &cfg) + 1e-12,
            || format!("bound fails at θ={theta}, ξ={xi}"),
        )?;
    }
    Ok(())
}

/// Runs every check and reports each outcome.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("special functions", special_functions()),
        check("conjugate pairs", conjugates()),
        check("ordered conjugate and cones", pav_and_cones()),
        check("crossing and calibration", crossing_and_calibration()),
        check("risk functionals", risk_functionals()),
        check("newsvendor bound", newsvendor()),
    ]
}
