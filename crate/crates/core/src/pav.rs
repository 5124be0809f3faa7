//! Pool-adjacent-violators for the ordered conjugate
//!
//! ```text
//! I◇(ν) = sup_{λ nondecreasing} Σ_i ν_i λ_i − φ*(λ_i)/n
//! ```
//!
//! The objective is separable and concave, so the maximizer is block
//! constant: on a block [p, q] the best common value is a subgradient of φ at
//! n·(ν_p + … + ν_q)/(q − p + 1). Adjacent blocks whose optima are out of
//! order are pooled until the sequence is nondecreasing.

use crate::divergence::{PhiFamily, Weights};
use crate::ext::ExtReal;

/// A maximal run of indices sharing one dual value. Indices are 1-based and
/// inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub p: usize,
    pub q: usize,
    pub mass: f64,
    pub lambda_star: ExtReal,
}

impl Block {
    pub fn width(&self) -> usize {
        self.q - self.p + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderedConjugateResult {
    /// I◇(ν) ≥ 0, possibly +∞.
    pub value: ExtReal,
    /// Block-constant nondecreasing maximizer, one entry per coordinate.
    pub lambda: Vec<ExtReal>,
    pub blocks: Vec<Block>,
}

/// Best common dual value of a block of `width` coordinates carrying `mass`.
///
/// Interval subgradients are resolved by their midpoint (clamped into the
/// closed domain of φ*); a zero-mass block sits at −∞.
pub fn block_optimum(family: PhiFamily, mass: f64, width: usize, n: usize) -> ExtReal {
    debug_assert!(width >= 1 && mass >= 0.0);
    let ratio = n as f64 * mass / width as f64;
    if ratio <= 0.0 {
        return ExtReal::NegInf;
    }
    let g = family.subgrad(ratio).expect("ratio is positive");
    let point = match (g.lo, g.hi) {
        (ExtReal::Finite(lo), ExtReal::Finite(hi)) => ExtReal::Finite(0.5 * (lo + hi)),
        (lo, hi) if lo == hi => lo,
        (ExtReal::NegInf, hi) => hi,
        (lo, _) => lo,
    };
    point.min(family.star_domain_sup())
}

/// Contribution `mass·λ − width·φ*(λ)/n` of one block.
fn block_value(family: PhiFamily, mass: f64, width: usize, n: usize, lambda: ExtReal) -> ExtReal {
    let w = width as f64 / n as f64;
    match lambda {
        // only zero-mass blocks sit at −∞
        ExtReal::NegInf => family.star_limit_at_neg_inf().neg().scale(w),
        ExtReal::Finite(l) => match family.phi_star(l) {
            ExtReal::Finite(s) => ExtReal::Finite(mass * l - w * s),
            ExtReal::PosInf => ExtReal::NegInf,
            ExtReal::NegInf => unreachable!("φ* is finite at finite arguments in its domain"),
        },
        ExtReal::PosInf => unreachable!("block optima are bounded above by the φ* domain"),
    }
}

/// Objective of the ordered conjugate at an arbitrary nondecreasing `lambda`.
pub fn objective(family: PhiFamily, nu: &Weights, lambda: &[ExtReal]) -> ExtReal {
    assert_eq!(nu.len(), lambda.len());
    let n = nu.len();
    let mut total = ExtReal::ZERO;
    for (&m, &l) in nu.as_slice().iter().zip(lambda) {
        let term = match l {
            ExtReal::NegInf if m > 0.0 => ExtReal::NegInf,
            _ => block_value(family, m, 1, n, l),
        };
        if term == ExtReal::NegInf {
            return ExtReal::NegInf;
        }
        total = total.add(term);
    }
    total
}

/// Computes I◇(ν) and its maximizer by pooling adjacent violators.
///
/// Blocks left of the cursor form a nondecreasing stack; each step merges
/// the next singleton into the cursor block while they are out of order and
/// then cascades merges to the left.
pub fn ordered_conjugate(family: PhiFamily, nu: &Weights) -> OrderedConjugateResult {
    let n = nu.len();
    let mut blocks: Vec<Block> = Vec::with_capacity(n);
    for (i, &mass) in nu.as_slice().iter().enumerate() {
        let next = Block {
            p: i + 1,
            q: i + 1,
            mass,
            lambda_star: block_optimum(family, mass, 1, n),
        };
        let Some(cur) = blocks.last_mut() else {
            blocks.push(next);
            continue;
        };
        if cur.lambda_star > next.lambda_star {
            cur.q = next.q;
            cur.mass += next.mass;
            cur.lambda_star = block_optimum(family, cur.mass, cur.width(), n);
            while blocks.len() >= 2
                && blocks[blocks.len() - 2].lambda_star > blocks[blocks.len() - 1].lambda_star
            {
                let right = blocks.pop().expect("two blocks present");
                let left = blocks.last_mut().expect("two blocks present");
                left.q = right.q;
                left.mass += right.mass;
                left.lambda_star = block_optimum(family, left.mass, left.width(), n);
            }
        } else {
            blocks.push(next);
        }
    }

    let mut value = ExtReal::ZERO;
    let mut lambda = Vec::with_capacity(n);
    for b in &blocks {
        value = value.add(block_value(family, b.mass, b.width(), n, b.lambda_star));
        lambda.extend(std::iter::repeat_n(b.lambda_star, b.width()));
    }
    // the constant λ ∈ ∂φ(1) attains 0, so the supremum is never negative
    if let ExtReal::Finite(v) = value {
        value = ExtReal::Finite(v.max(0.0));
    }
    OrderedConjugateResult {
        value,
        lambda,
        blocks,
    }
}
