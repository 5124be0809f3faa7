//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use ordrisk::bench::{
    resolve_methods, run_coverage_study, run_newsvendor_study, BoundMode, Distribution, NewsvendorConfig,
};
use ordrisk::calibrate::{calibrate_gamma, calibrate_phi_radius, cvar_coverage, cvar_weights, gamma_asymptotic};
use ordrisk::crossing::{noncrossing_probability, Boundary};
use ordrisk::divergence::{PhiFamily, Weights};
use ordrisk::pav::ordered_conjugate;
use ordrisk::risk::{risk_cvar, risk_cvar_bar, risk_distortion, risk_phi, risk_robust, risk_saa, risk_tv_exact, RiskSpec};
use ordrisk::specfun::{golden_section_min, reg_inc_beta, sample_simplex_uniform, smallest_rank, StreamRng};
use ordrisk::ExtReal;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.1?}, limit {limit:.0?}"))
}

// ---------------------------------------------------------------------------
// 1. ordered conjugate vs brute force over a monotone grid

fn star(f: PhiFamily, l: f64) -> f64 {
    match f.phi_star(l) {
        ExtReal::Finite(v) => v,
        _ => f64::INFINITY,
    }
}

/// λ = φ'(e^u); monotone in u, so a u-grid is a λ-grid.
fn warp(f: PhiFamily, u: f64) -> f64 {
    let t = u.exp();
    match f {
        PhiFamily::KullbackLeibler => u,
        PhiFamily::Burg => 1.0 - (-u).exp(),
        PhiFamily::Hellinger => 1.0 - (-0.5 * u).exp(),
        PhiFamily::ChiSquare => 1.0 - 1.0 / (t * t),
        PhiFamily::TotalVariation => unreachable!("TV uses a plain grid"),
    }
}

/// Max of Σ ν_i g_i − φ*(g_i)/n over nondecreasing sequences drawn from
/// `grid` (sorted), by dynamic programming. Returns the value and the grid
/// index chosen for each coordinate.
fn grid_max(f: PhiFamily, nu: &[f64], grid: &[f64]) -> (f64, Vec<usize>) {
    let n = nu.len();
    let nf = n as f64;
    let g = grid.len();
    let stars: Vec<f64> = grid.iter().map(|&l| star(f, l)).collect();
    // best[i][j]: best value of the first i+1 terms with λ_{i} = grid[j]
    let mut best = vec![vec![f64::NEG_INFINITY; g]; n];
    let mut arg = vec![vec![0usize; g]; n];
    for i in 0..n {
        let mut run = f64::NEG_INFINITY;
        let mut run_arg = 0;
        for j in 0..g {
            let prev = if i == 0 {
                0.0
            } else {
                if best[i - 1][j] > run {
                    run = best[i - 1][j];
                    run_arg = j;
                }
                run
            };
            best[i][j] = prev + nu[i] * grid[j] - stars[j] / nf;
            arg[i][j] = run_arg;
        }
    }
    let (mut j, mut v) = (0, f64::NEG_INFINITY);
    for (k, &b) in best[n - 1].iter().enumerate() {
        if b > v {
            v = b;
            j = k;
        }
    }
    let mut path = vec![0; n];
    for i in (0..n).rev() {
        path[i] = j;
        j = arg[i][j];
    }
    (v, path)
}

struct Oracle {
    extrapolated: f64,
    polished: f64,
}

fn conjugate_oracle(f: PhiFamily, nu: &[f64]) -> Oracle {
    let n = nu.len() as f64;
    let h = 1e-3;
    if f == PhiFamily::TotalVariation {
        // λ ∈ [−1.5, 1] on multiples of h; the optimum uses only ±1, which lie on the grid
        let coarse: Vec<f64> = (0..=2500).map(|k| (k as f64 - 1500.0) / 1000.0).collect();
        let fine: Vec<f64> = (0..=5000).map(|k| (k as f64 - 3000.0) / 2000.0).collect();
        let (vc, _) = grid_max(f, nu, &coarse);
        let (vf, _) = grid_max(f, nu, &fine);
        let ext = vf + (vf - vc) / 3.0;
        return Oracle {
            extrapolated: ext.max(0.0),
            polished: vf.max(0.0),
        };
    }
    let lo = (n * nu.iter().copied().fold(f64::INFINITY, f64::min)).ln() - 0.5;
    let hi = (n * nu.iter().copied().fold(0.0, f64::max)).ln() + 0.5;
    let make = |step: f64| -> Vec<f64> {
        let k = ((hi - lo) / step).ceil() as usize;
        (0..=k).map(|i| lo + i as f64 * step).collect()
    };
    let (u_coarse, u_fine) = (make(h), make(h / 2.0));
    let lam = |us: &[f64]| us.iter().map(|&u| warp(f, u)).collect::<Vec<_>>();
    let (vc, _) = grid_max(f, nu, &lam(&u_coarse));
    let (vf, path) = grid_max(f, nu, &lam(&u_fine));
    let extrapolated = (vf + (vf - vc) / 3.0).max(0.0);

    // polish: optimize the common value of each run of tied coordinates
    let mut u: Vec<f64> = path.iter().map(|&j| u_fine[j]).collect();
    let mut start = 0;
    while start < u.len() {
        let mut end = start;
        while end + 1 < u.len() && path[end + 1] == path[start] {
            end += 1;
        }
        let block = |x: f64| {
            let l = warp(f, x);
            -(start..=end).map(|i| nu[i] * l - star(f, l) / n).sum::<f64>()
        };
        let (x, _) = golden_section_min(block, u[start] - 4.0 * h, u[start] + 4.0 * h, 1e-12);
        u[start..=end].iter_mut().for_each(|v| *v = x);
        start = end + 1;
    }
    let lambda: Vec<f64> = u.iter().map(|&x| warp(f, x)).collect();
    let polished = if lambda.windows(2).all(|p| p[0] <= p[1]) {
        let v: f64 = lambda.iter().zip(nu).map(|(&l, &m)| m * l - star(f, l) / n).sum();
        v.max(vf).max(0.0)
    } else {
        vf.max(0.0)
    };
    Oracle { extrapolated, polished }
}

fn criterion_pav() -> Outcome {
    let start = Instant::now();
    let cases: Vec<(PhiFamily, usize, u64)> = PhiFamily::ALL
        .iter()
        .flat_map(|&f| [2usize, 3, 4].into_iter().flat_map(move |n| (0..100).map(move |s| (f, n, s))))
        .collect();
    let errors: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(f, n, s)| {
            let mut rng = StreamRng::derive(101, (n as u64) * 1000 + s);
            let nu = sample_simplex_uniform(&mut rng, n);
            let v = ordered_conjugate(f, &nu).value.finite().ok_or_else(|| format!("{f}: infinite value at {nu:?}"))?;
            let o = conjugate_oracle(f, nu.as_slice());
            Ok(((v - o.extrapolated).abs(), (v - o.polished).abs()))
        })
        .collect::<Result<_, String>>()?;
    let worst_grid = errors.iter().map(|e| e.0).fold(0.0, f64::max);
    let worst_polish = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    ensure(worst_grid <= 1e-4, || format!("grid discrepancy {worst_grid:.3e} > 1e-4"))?;
    ensure(worst_polish <= 1e-6, || format!("polished discrepancy {worst_polish:.3e} > 1e-6"))?;
    within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} cases, max |Δ| grid {worst_grid:.1e}, polished {worst_polish:.1e}",
        cases.len()
    ))
}

// ---------------------------------------------------------------------------
// 2. crossing DP vs Monte Carlo

fn criterion_crossing() -> Outcome {
    let start = Instant::now();
    let samples = 1_000_000u64;
    let mut worst: f64 = 0.0;
    for m in [5usize, 20, 50] {
        for rep in 0..10u64 {
            let mut rng = StreamRng::derive(202, m as u64 * 100 + rep);
            let scale = rng.random_range(0.1..0.6);
            let mut b: Vec<f64> = (0..m).map(|_| scale * rng.random::<f64>()).collect();
            b.sort_by(f64::total_cmp);
            let p = noncrossing_probability(&Boundary::new(b.clone()).map_err(|e| e.to_string())?);
            let hits: u64 = (0..samples / 10_000)
                .into_par_iter()
                .map(|chunk| {
                    let mut r = StreamRng::derive(303 + m as u64 * 100 + rep, chunk);
                    let mut u = vec![0.0; m];
                    let mut hits = 0u64;
                    for _ in 0..10_000 {
                        u.iter_mut().for_each(|x| *x = r.random::<f64>());
                        u.sort_unstable_by(f64::total_cmp);
                        if u.iter().zip(&b).all(|(x, t)| x >= t) {
                            hits += 1;
                        }
                    }
                    hits
                })
                .sum();
            let est = hits as f64 / samples as f64;
            let se = (p * (1.0 - p) / samples as f64).sqrt();
            let z = if se > 0.0 { (est - p).abs() / se } else { (est - p).abs() * f64::INFINITY };
            let z = if z.is_nan() { 0.0 } else { z };
            ensure(z <= 3.0, || format!("m={m} rep={rep}: DP {p:.6} vs MC {est:.6} ({z:.2} se)"))?;
            worst = worst.max(z);
        }
    }
    within_time(start, Duration::from_secs(60))?;
    Ok(format!("30 boundaries, worst deviation {worst:.2} se"))
}

// ---------------------------------------------------------------------------
// 3. γ calibration at n = 20, δ = 0.2

fn criterion_gamma() -> Outcome {
    let c = calibrate_gamma(20, 0.2, 1e-10).map_err(|e| e.to_string())?;
    let p = c.achieved_probability;
    ensure((0.8..=0.801).contains(&p), || format!("achieved probability {p}"))?;
    let below = cvar_coverage(c.gamma_hat - 1e-4, 20).map_err(|e| e.to_string())?;
    ensure(below < 0.8, || format!("probability at γ̂ − 1e-4 is {below}"))?;
    Ok(format!("γ̂ = {:.8}, P = {p:.8}, P(γ̂ − 1e-4) = {below:.8}", c.gamma_hat))
}

// ---------------------------------------------------------------------------
// 4. convergence to the asymptotic level

fn criterion_asymptotic() -> Outcome {
    let mut gaps = Vec::new();
    for n in [50usize, 200, 800] {
        let c = calibrate_gamma(n, 0.2, 1e-10).map_err(|e| e.to_string())?;
        gaps.push((n, (c.gamma_hat - gamma_asymptotic(n, 0.2)).abs()));
    }
    ensure(gaps.windows(2).all(|w| w[1].1 < w[0].1), || format!("gaps not decreasing: {gaps:?}"))?;
    Ok(gaps.iter().map(|(n, g)| format!("n={n}: {g:.2e}")).collect::<Vec<_>>().join(", "))
}

// ---------------------------------------------------------------------------
// 5. coverage of calibrated proxies

fn criterion_coverage() -> Outcome {
    let start = Instant::now();
    let (n, delta, trials) = (20usize, 0.2, 5_000usize);
    let gamma = calibrate_gamma(n, delta, 1e-10).map_err(|e| e.to_string())?.gamma_hat;
    let radius = |f: PhiFamily| {
        calibrate_phi_radius(f, n, delta, 0.005, 10_000, 17, None)
            .map(|c| c.alpha_hat)
            .map_err(|e| e.to_string())
    };
    let specs = [
        RiskSpec::CvarBar { gamma },
        RiskSpec::Phi {
            family: PhiFamily::TotalVariation,
            alpha: radius(PhiFamily::TotalVariation)?,
        },
        RiskSpec::Phi {
            family: PhiFamily::KullbackLeibler,
            alpha: radius(PhiFamily::KullbackLeibler)?,
        },
    ];
    let dists = [
        Distribution::ScaledBeta { alpha: 0.1, beta: 0.2, scale: 1.0 },
        Distribution::TwoPoint { low: 0.0, high: 1.0, p_high: 0.3 },
        Distribution::Uniform { low: 0.0, high: 1.0 },
    ];
    let sigma = (delta * (1.0 - delta) / trials as f64).sqrt();
    let floor = 1.0 - delta - 3.0 * sigma;
    let mut lowest: f64 = 1.0;
    for (i, spec) in specs.iter().enumerate() {
        for (j, d) in dists.iter().enumerate() {
            let r = run_coverage_study(spec, d, n, trials, 500 + (10 * i + j) as u64, BoundMode::Exact)
                .map_err(|e| e.to_string())?;
            ensure(r.coverage >= floor, || {
                format!("{} on {d:?}: coverage {} < {floor:.4}", spec.label(), r.coverage)
            })?;
            lowest = lowest.min(r.coverage);
        }
    }
    within_time(start, Duration::from_secs(300))?;
    Ok(format!("9 (spec, distribution) pairs, lowest coverage {lowest:.4} ≥ {floor:.4}"))
}

// ---------------------------------------------------------------------------
// 6. risk axioms and permutation invariance

fn axiom_specs(rng: &mut StreamRng, n: usize) -> Vec<RiskSpec> {
    let mut mu: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    mu.sort_by(f64::total_cmp);
    let total: f64 = mu.iter().sum();
    let mu: Vec<f64> = mu.iter().map(|m| m / total).collect();
    let mut specs = vec![
        RiskSpec::Saa,
        RiskSpec::Robust,
        RiskSpec::Distortion {
            mu: Weights::new(mu).expect("normalized"),
        },
        RiskSpec::CvarBar {
            gamma: rng.random_range(1.0 / (n as f64 - 1.0)..1.0),
        },
        RiskSpec::Cvar {
            gamma: rng.random_range(0.0..0.95),
        },
    ];
    for f in PhiFamily::ALL {
        specs.push(RiskSpec::Phi {
            family: f,
            alpha: rng.random_range(0.01..1.0),
        });
    }
    specs
}

fn criterion_axioms() -> Outcome {
    let start = Instant::now();
    let tol = 1e-9;
    let failures: Vec<String> = (0..1000u64)
        .into_par_iter()
        .flat_map_iter(|case| {
            let mut rng = StreamRng::derive(606, case);
            let n = rng.random_range(3..12usize);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let bump: Vec<f64> = x.iter().map(|v| v + rng.random_range(0.0..0.5)).collect();
            let a = rng.random_range(-2.0..2.0);
            let t = rng.random_range(0.1..3.0);
            let mut perm = x.clone();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let specs = axiom_specs(&mut rng, n);
            specs
                .into_iter()
                .filter_map(|s| {
                    let r = |v: &[f64]| s.evaluate(v).expect("valid spec and data");
                    let rx = r(&x);
                    let shifted: Vec<f64> = x.iter().map(|v| v + a).collect();
                    let scaled: Vec<f64> = x.iter().map(|v| t * v).collect();
                    let sum: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
                    let mut bad = Vec::new();
                    if r(&bump) < rx - tol {
                        bad.push("monotonicity");
                    }
                    if (r(&shifted) - rx - a).abs() > tol {
                        bad.push("translation");
                    }
                    if (r(&scaled) - t * rx).abs() > tol {
                        bad.push("homogeneity");
                    }
                    if r(&sum) > rx + r(&y) + tol {
                        bad.push("subadditivity");
                    }
                    if (r(&perm) - rx).abs() > tol {
                        bad.push("permutation");
                    }
                    (!bad.is_empty()).then(|| format!("case {case} {}: {}", s.label(), bad.join(", ")))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} violations, first: {}", failures.len(), failures[0])
    })?;
    Ok(format!("1000 vectors × 10 specs in {:.1?}", start.elapsed()))
}

// ---------------------------------------------------------------------------
// 7. TV dual against the greedy solution

fn criterion_tv() -> Outcome {
    let worst = (0..500u64)
        .into_par_iter()
        .map(|case| {
            let mut rng = StreamRng::derive(707, case);
            let n = rng.random_range(2..15usize);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let alpha = rng.random_range(0.0..2.0);
            let dual = risk_phi(PhiFamily::TotalVariation, alpha, &x).map_err(|e| e.to_string())?;
            let greedy = risk_tv_exact(alpha, &x).map_err(|e| e.to_string())?;
            let mean = risk_saa(&x).map_err(|e| e.to_string())?;
            ensure(risk_phi(PhiFamily::TotalVariation, 0.0, &x) == Ok(mean), || format!("case {case}: α = 0"))?;
            let full = 2.0 * (n as f64 - 1.0) / n as f64;
            let top = risk_phi(PhiFamily::TotalVariation, full + alpha, &x).map_err(|e| e.to_string())?;
            let max = risk_robust(&x).map_err(|e| e.to_string())?;
            ensure((top - max).abs() <= 1e-9, || format!("case {case}: {top} vs max {max}"))?;
            Ok((dual - greedy).abs())
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst <= 1e-6, || format!("dual vs greedy {worst:.3e}"))?;
    Ok(format!("500 cases, max |Δ| {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 8. CVaR identities

fn criterion_cvar() -> Outcome {
    let mut worst: f64 = 0.0;
    for case in 0..500u64 {
        let mut rng = StreamRng::derive(808, case);
        let n = rng.random_range(2..30usize);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let gamma = rng.random_range(0.0..1.0);
        // τ + E[(X − τ)₊]/(1 − γ) is piecewise linear in τ with kinks at the data
        let oracle = x
            .iter()
            .map(|&tau| tau + x.iter().map(|v| (v - tau).max(0.0)).sum::<f64>() / (n as f64 * (1.0 - gamma)))
            .fold(f64::INFINITY, f64::min);
        let closed = risk_cvar(gamma, &x).map_err(|e| e.to_string())?;
        worst = worst.max((closed - oracle).abs());

        let g = rng.random_range(1.0 / (n as f64 - 1.0)..=1.0);
        let bar = risk_cvar_bar(g, &x).map_err(|e| e.to_string())?;
        let via = risk_distortion(&cvar_weights(g, n).map_err(|e| e.to_string())?, &x).map_err(|e| e.to_string())?;
        ensure(bar.to_bits() == via.to_bits(), || format!("case {case}: {bar} vs {via}"))?;
    }
    ensure(worst <= 1e-8, || format!("closed form vs inf_τ {worst:.3e}"))?;
    Ok(format!("500 cases, max |Δ| {worst:.1e}, CVaR-bar bit-identical"))
}

// ---------------------------------------------------------------------------
// 9. newsvendor study at desk scale

fn iqr(costs: &[f64]) -> f64 {
    let mut v = costs.to_vec();
    v.sort_by(f64::total_cmp);
    ordrisk::bench::quantile(&v, 0.75) - ordrisk::bench::quantile(&v, 0.25)
}

fn criterion_newsvendor() -> Outcome {
    let start = Instant::now();
    let cfg = NewsvendorConfig {
        trials: 50,
        ..NewsvendorConfig::default()
    };
    let methods = resolve_methods(&cfg, &cfg.methods, None).map_err(|e| e.to_string())?;
    let out = run_newsvendor_study(&cfg, &methods).map_err(|e| e.to_string())?;
    ensure(out.summary.robust_theta == 87.5, || format!("robust θ {}", out.summary.robust_theta))?;
    let rows_of = |name: &str| out.rows.iter().filter(|r| r.method == name).collect::<Vec<_>>();
    let saa = rows_of("SAA");
    let saa_costs: Vec<f64> = saa.iter().map(|r| r.true_cost).collect();
    let saa_under = saa.iter().filter(|r| r.proxy < r.true_cost).count() as f64 / saa.len() as f64;
    ensure(saa_under > 0.5, || format!("SAA underestimates in only {saa_under:.2} of trials"))?;
    let trials = cfg.trials as f64;
    let floor = 0.8 - 3.0 * (0.8 * 0.2 / trials).sqrt();
    let mut notes = vec![format!("SAA IQR {:.2}, under {saa_under:.2}", iqr(&saa_costs))];
    let mut problems = Vec::new();
    for m in methods.iter().filter(|m| m.name != "SAA") {
        let rows = rows_of(&m.name);
        let costs: Vec<f64> = rows.iter().map(|r| r.true_cost).collect();
        let within = rows.iter().filter(|r| r.true_cost <= r.robust + 1e-6).count() as f64 / trials;
        let excess = rows.iter().map(|r| r.true_cost - r.robust).fold(0.0, f64::max);
        let over = rows.iter().filter(|r| r.proxy >= r.true_cost).count() as f64 / trials;
        if within < 0.95 {
            problems.push(format!(
                "{}: true cost ≤ robust in {within:.2} of trials (< 0.95), worst excess {excess:.3}",
                m.name
            ));
        }
        if iqr(&saa_costs) <= iqr(&costs) {
            problems.push(format!("{}: IQR {:.3} not below SAA's {:.3}", m.name, iqr(&costs), iqr(&saa_costs)));
        }
        if over < floor {
            problems.push(format!("{}: overestimates in {over:.2} < {floor:.3}", m.name));
        }
        notes.push(format!("{} IQR {:.2}, over {over:.2}, within {within:.2}", m.name, iqr(&costs)));
    }
    ensure(problems.is_empty(), || format!("{}; [{}]", problems.join("; "), notes.join("; ")))?;
    within_time(start, Duration::from_secs(300))?;
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------------------
// 10. special functions

fn criterion_specfun() -> Outcome {
    let e = |r: ordrisk::Result<f64>| r.map_err(|e| e.to_string());
    for i in 0..=20 {
        let x = i as f64 / 20.0;
        let v = e(reg_inc_beta(x, 1.0, 1.0))?;
        ensure((v - x).abs() <= 1e-12, || format!("I_{x}(1,1) = {v}"))?;
    }
    let v = e(reg_inc_beta(0.5, 2.0, 1.0))?;
    ensure((v - 0.25).abs() <= 1e-12, || format!("I_0.5(2,1) = {v}"))?;
    let mut rng = StreamRng::new(1010);
    for _ in 0..200 {
        let x = rng.random::<f64>();
        let a = rng.random_range(0.05..50.0);
        let b = rng.random_range(0.05..50.0);
        let s = e(reg_inc_beta(x, a, b))? + e(reg_inc_beta(1.0 - x, b, a))?;
        ensure((s - 1.0).abs() <= 1e-12, || format!("reflection at ({x}, {a}, {b}): {s}"))?;
    }
    ensure(smallest_rank(1, 0.5, 0.6) == Ok(Some(1)), || "smallest_rank(1, 0.5, 0.6)".into())?;
    ensure(smallest_rank(1, 0.5, 0.4) == Ok(None), || "smallest_rank(1, 0.5, 0.4)".into())?;
    Ok("identities, 200 reflections, smallest_rank examples".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("ordered conjugate matches brute force", criterion_pav),
        ("crossing DP matches Monte Carlo", criterion_crossing),
        ("γ calibration at n = 20, δ = 0.2", criterion_gamma),
        ("γ approaches its asymptotic value", criterion_asymptotic),
        ("calibrated proxies cover the mean", criterion_coverage),
        ("risk axioms and permutation invariance", criterion_axioms),
        ("TV dual equals greedy solution", criterion_tv),
        ("CVaR identities", criterion_cvar),
        ("newsvendor study at desk scale", criterion_newsvendor),
        ("special functions", criterion_specfun),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{t:.1?}]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{t:.1?}]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
