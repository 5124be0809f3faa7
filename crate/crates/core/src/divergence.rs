//! φ-divergences, their convex conjugates and subgradients.
//!
//! Every family satisfies φ(1) = 0 and is extended to t = 0 by its lower
//! semicontinuous limit. Conjugates are taken over t ≥ 0, so
//! φ*(λ) = sup_{t ≥ 0} {tλ − φ(t)}.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// The supported φ-divergence families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiFamily {
    KullbackLeibler,
    Burg,
    Hellinger,
    ChiSquare,
    TotalVariation,
}

/// A closed interval of extended reals, `lo ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: ExtReal,
    pub hi: ExtReal,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval {
            lo: ExtReal::Finite(x),
            hi: ExtReal::Finite(x),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= ExtReal::Finite(x) && ExtReal::Finite(x) <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

impl PhiFamily {
    pub const ALL: [PhiFamily; 5] = [
        PhiFamily::KullbackLeibler,
        PhiFamily::Burg,
        PhiFamily::Hellinger,
        PhiFamily::ChiSquare,
        PhiFamily::TotalVariation,
    ];

    /// Short lowercase tag used in configuration files and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            PhiFamily::KullbackLeibler => "kl",
            PhiFamily::Burg => "burg",
            PhiFamily::Hellinger => "hellinger",
            PhiFamily::ChiSquare => "chi2",
            PhiFamily::TotalVariation => "tv",
        }
    }

    /// φ(t) for t ≥ 0, with t = 0 mapped to the limit lim_{t↓0} φ(t).
    pub fn phi(self, t: f64) -> Result<ExtReal> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain(format!("φ is defined on t ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(self.phi_at_zero());
        }
        if t.is_infinite() {
            return Ok(ExtReal::PosInf);
        }
        let v = match self {
            PhiFamily::KullbackLeibler => t * t.ln() - t + 1.0,
            PhiFamily::Burg => t - t.ln() - 1.0,
            PhiFamily::Hellinger => {
                let r = t.sqrt() - 1.0;
                r * r
            }
            PhiFamily::ChiSquare => (t - 1.0) * (t - 1.0) / t,
            PhiFamily::TotalVariation => (t - 1.0).abs(),
        };
        Ok(ExtReal::from_f64(v.max(0.0)))
    }

    /// lim_{t↓0} φ(t).
    pub fn phi_at_zero(self) -> ExtReal {
        match self {
            PhiFamily::Burg | PhiFamily::ChiSquare => ExtReal::PosInf,
            PhiFamily::KullbackLeibler | PhiFamily::Hellinger | PhiFamily::TotalVariation => {
                ExtReal::Finite(1.0)
            }
        }
    }

    /// Upper boundary of dom φ*.
    pub fn star_domain_sup(self) -> ExtReal {
        match self {
            PhiFamily::KullbackLeibler => ExtReal::PosInf,
            _ => ExtReal::Finite(1.0),
        }
    }

    /// Whether φ* has a finite limit at `star_domain_sup`, in which case the
    /// boundary point is included in the domain with that limit as its value.
    pub fn star_boundary_closed(self) -> bool {
        matches!(self, PhiFamily::ChiSquare | PhiFamily::TotalVariation)
    }

    /// lim_{λ→−∞} φ*(λ), which equals −φ(0).
    pub fn star_limit_at_neg_inf(self) -> ExtReal {
        self.phi_at_zero().neg()
    }

    /// The convex conjugate φ*(λ); +∞ outside its domain.
    pub fn phi_star(self, lambda: f64) -> ExtReal {
        assert!(!lambda.is_nan(), "φ* evaluated at NaN");
        if lambda == f64::NEG_INFINITY {
            return self.star_limit_at_neg_inf();
        }
        if self != PhiFamily::KullbackLeibler {
            if lambda > 1.0 {
                return ExtReal::PosInf;
            }
            if lambda == 1.0 {
                return match self {
                    PhiFamily::ChiSquare => ExtReal::Finite(2.0),
                    PhiFamily::TotalVariation => ExtReal::Finite(1.0),
                    _ => ExtReal::PosInf,
                };
            }
        }
        let v = match self {
            PhiFamily::KullbackLeibler => lambda.exp_m1(),
            PhiFamily::Burg => -(-lambda).ln_1p(),
            PhiFamily::Hellinger => lambda / (1.0 - lambda),
            PhiFamily::ChiSquare => 2.0 - 2.0 * (1.0 - lambda).sqrt(),
            PhiFamily::TotalVariation => lambda.max(-1.0),
        };
        ExtReal::from_f64(v)
    }

    /// The subdifferential ∂φ(t) as a closed interval of extended reals.
    pub fn subgrad(self, t: f64) -> Result<Interval> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain(format!("∂φ is defined on t ≥ 0, got {t}")));
        }
        if t == 0.0 {
            let hi = match self {
                PhiFamily::TotalVariation => ExtReal::Finite(-1.0),
                _ => ExtReal::NegInf,
            };
            return Ok(Interval {
                lo: ExtReal::NegInf,
                hi,
            });
        }
        let g = match self {
            PhiFamily::KullbackLeibler => t.ln(),
            PhiFamily::Burg => 1.0 - 1.0 / t,
            PhiFamily::Hellinger => 1.0 - 1.0 / t.sqrt(),
            PhiFamily::ChiSquare => 1.0 - 1.0 / (t * t),
            PhiFamily::TotalVariation => {
                if t < 1.0 {
                    -1.0
                } else if t > 1.0 {
                    1.0
                } else {
                    return Ok(Interval {
                        lo: ExtReal::Finite(-1.0),
                        hi: ExtReal::Finite(1.0),
                    });
                }
            }
        };
        Ok(Interval {
            lo: ExtReal::from_f64(g),
            hi: ExtReal::from_f64(g),
        })
    }

    /// I_φ(μ, 1/n) = (1/n) Σ φ(n μ_i).
    pub fn divergence_to_uniform(self, mu: &Weights) -> ExtReal {
        let n = mu.len() as f64;
        let mut total = ExtReal::ZERO;
        for &m in mu.as_slice() {
            let term = self.phi(n * m).expect("weights are nonnegative");
            total = total.add(term);
            if total == ExtReal::PosInf {
                return total;
            }
        }
        total.scale(1.0 / n)
    }
}

impl fmt::Display for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PhiFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kl" => Ok(PhiFamily::KullbackLeibler),
            "burg" => Ok(PhiFamily::Burg),
            "hellinger" => Ok(PhiFamily::Hellinger),
            "chi2" => Ok(PhiFamily::ChiSquare),
            "tv" => Ok(PhiFamily::TotalVariation),
            other => Err(Error::input(format!(
                "unknown divergence family {other:?} (expected kl, burg, hellinger, chi2 or tv)"
            ))),
        }
    }
}

impl Serialize for PhiFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for PhiFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the probability simplex Δ^n.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Weights(Vec<f64>);

impl Weights {
    /// Validates nonnegativity and |Σ − 1| ≤ 1e−12·n.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::input("weights must be nonempty"));
        }
        if let Some(bad) = entries.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::input(format!("weight {bad} is not a nonnegative finite number")));
        }
        let sum: f64 = entries.iter().sum();
        let tol = 1e-12 * entries.len() as f64;
        if (sum - 1.0).abs() > tol {
            return Err(Error::input(format!("weights sum to {sum}, not 1")));
        }
        Ok(Weights(entries))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Weights(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl<'de> Deserialize<'de> for Weights {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(deserializer)?;
        Weights::new(v).map_err(serde::de::Error::custom)
    }
}
