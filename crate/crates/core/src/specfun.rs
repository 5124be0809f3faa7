//! Special functions, seeded random streams and scalar solvers used by the
//! calibration routines.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cones::sorted_copy;
use crate::divergence::Weights;
use crate::error::{Error, Result};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_607;

/// Default argument tolerance of the scalar root finder.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos approximation, reflection below 1/2).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 100_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::numerical(format!(
        "incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})"
    )))
}

/// The regularized incomplete beta function I_x(a, b).
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("I_x(a,b) needs 0 ≤ x ≤ 1, got x={x}")));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "I_x(a,b) needs a, b > 0, got a={a}, b={b}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    let front = ln_front.exp();
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b)? / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a)? / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Smallest k ∈ [1, m] with I_{1−δ}(k, m−k+1) ≤ β, or `None` when even k = m
/// fails (more samples are needed).
///
/// I_{1−δ}(k, m−k+1) = P[Binomial(m, 1−δ) ≥ k] is decreasing in k, so the
/// search is a bisection over ranks.
pub fn smallest_rank(m: usize, delta: f64, beta: f64) -> Result<Option<usize>> {
    if m == 0 {
        return Err(Error::input("m must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("δ must lie in (0, 1), got {delta}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::input(format!("β must lie in (0, 1), got {beta}")));
    }
    // a few ulps of slack so that exact ties such as I_{1/2}(2, 2) = 1/2 count as ≤ β
    let limit = beta * (1.0 + 1e-12);
    let level = |k: usize| reg_inc_beta(1.0 - delta, k as f64, (m - k + 1) as f64);
    if level(m)? > limit {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1usize, m);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if level(mid)? <= limit {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

/// Deterministic random stream. Streams derived from the same seed with
/// different indices are independent, which makes parallel Monte-Carlo
/// results independent of scheduling.
#[derive(Debug, Clone)]
pub struct StreamRng(ChaCha8Rng);

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        StreamRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Stream number `index` of `seed`.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        StreamRng(rng)
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Uniform sample from Δ^n as the spacings of n−1 sorted uniforms.
pub fn sample_simplex_uniform<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Weights {
    assert!(n >= 1, "simplex dimension must be positive");
    let draws: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
    let cuts = sorted_copy(&draws);
    let mut w = Vec::with_capacity(n);
    let mut prev = 0.0;
    for c in cuts {
        w.push(c - prev);
        prev = c;
    }
    w.push(1.0 - prev);
    Weights::new(w).expect("spacings of sorted uniforms lie in the simplex")
}

/// A root located to within the final sign-changing bracket `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Brent's method on a bracketing interval: bisection safeguarded inverse
/// quadratic / secant steps until the bracket is shorter than `tol`.
pub fn root_find_bracketed<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::input(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::numerical("function returned NaN at the bracket ends"));
    }
    if fa == 0.0 {
        return Ok(Root { x: a, lo: a, hi: a });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, lo: b, hi: b });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::input(format!(
            "f({lo}) = {fa} and f({hi}) = {fb} do not bracket a root"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(Root {
                x: b,
                lo: b.min(c),
                hi: b.max(c),
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::numerical(format!("function returned NaN at {b}")));
        }
    }
    Err(Error::numerical("root finder exceeded its iteration budget"))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal function on `[a, b]`.
///
/// Only interior points are evaluated, so `f` may be +∞ at the ends. Ties are
/// resolved towards the smaller argument. Returns the best point seen and
/// its value.
pub fn golden_section_min<F>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(a <= b);
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fd < fc { (d, fd) } else { (c, fc) };
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc <= best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
        if c >= d {
            break;
        }
    }
    best
}
