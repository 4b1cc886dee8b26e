//! Finite type-2 constants of the derived spaces, certified from below by
//! brute force over sign patterns, together with the iterated upper bound
//! coming from the twisted-sum recursion.
//!
//! For a tuple `(x_1, ..., x_n)` of arrays the quantity of interest is
//! `sqrt( Avg_{signs} rho(sum +- x_i)^2 / sum rho(x_i)^2 )`; the type-2
//! constant `a_n` is its supremum over all tuples.  A supremum can only be
//! certified from below at desk scale, so [`Type2Report`] carries a witnessed
//! lower bound next to the analytic-form upper bound and never conflates the
//! two.  The standard witnesses are disjointly supported copies of summing
//! vectors placed in the bottom coordinate; over the length-`(m+1)` arrays
//! they force growth like `log^m n`, while plain `l_2` tuples always give
//! exactly 1 by the parallelogram law.

use rayon::prelude::*;

use crate::rochberg::{rho, RochbergVector};
use crate::seq::FiniteSequence;
use crate::{Error, Result};

/// Hard cap on tuple length: the sign average enumerates `2^n` patterns.
pub const MAX_SIGN_TUPLE: usize = 16;

/// Witnessed lower bound and recursion upper bound for the type-2 constant
/// of the length-`(m+1)` array space.
#[derive(Clone, Debug)]
pub struct Type2Report {
    pub n: usize,
    /// Best sign-average ratio found over the witness family.
    pub lower_bound: f64,
    /// The tuple achieving `lower_bound`.
    pub witness: Vec<RochbergVector>,
    /// Iterated upper bound evaluated with the smallest step constant that
    /// covers the witnessed doubling increments.
    pub recursion_upper: f64,
}

/// `sqrt( Avg over all 2^n sign patterns of rho(sum +- x_i)^2 / sum rho(x_i)^2 )`.
///
/// All tuple members must live in the same array space (equal length and base
/// point).  Enumeration is parallel over patterns with a deterministic
/// sequential reduction.
pub fn avg_sign_ratio(tuple: &[RochbergVector]) -> Result<f64> {
    let n = tuple.len();
    if n < 1 || n > MAX_SIGN_TUPLE {
        return Err(Error::OutOfRange {
            name: "tuple length",
            value: n as f64,
            lo: 1.0,
            hi: MAX_SIGN_TUPLE as f64,
        });
    }
    let len = tuple[0].len();
    let theta = tuple[0].theta();
    for x in &tuple[1..] {
        if x.len() != len {
            return Err(Error::LengthMismatch(len, x.len()));
        }
        if x.theta() != theta {
            return Err(Error::BaseMismatch(
                num_complex::Complex64::new(theta, 0.0),
                num_complex::Complex64::new(x.theta(), 0.0),
            ));
        }
    }
    let denom: f64 = tuple.iter().map(|x| rho(x).powi(2)).sum();
    if denom == 0.0 {
        return Err(Error::DegenerateTuple);
    }
    let squares: Vec<f64> = (0u32..1 << n)
        .into_par_iter()
        .map(|mask| {
            let mut acc = RochbergVector::zero(len, theta).unwrap();
            for (i, x) in tuple.iter().enumerate() {
                acc = if mask >> i & 1 == 1 {
                    acc.add(x).unwrap()
                } else {
                    acc.sub(x).unwrap()
                };
            }
            rho(&acc).powi(2)
        })
        .collect();
    let total: f64 = squares.iter().sum();
    Ok((total / (1u64 << n) as f64 / denom).sqrt())
}

/// The standard witness tuple: `n` arrays of length `m + 1` whose bottom
/// coordinates are summing vectors of size `block` on disjoint index blocks,
/// all other coordinates zero.
pub fn witness_tuple(
    m: usize,
    n: usize,
    block: u32,
    theta: f64,
) -> Result<Vec<RochbergVector>> {
    if n < 1 {
        return Err(Error::LengthMismatch(n, 1));
    }
    if block < 1 {
        return Err(Error::OutOfRange {
            name: "block",
            value: block as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    (0..n)
        .map(|i| {
            let bottom = FiniteSequence::make_sn(block).shift_support(i as u32 * block);
            let mut coords = vec![FiniteSequence::zero(); m];
            coords.push(bottom);
            RochbergVector::new(coords, theta)
        })
        .collect()
}

/// Best sign-average ratio over block sizes `1, 2, 4, ..., <= max_block`.
fn best_witness(m: usize, n: usize, max_block: u32) -> Result<(f64, Vec<RochbergVector>)> {
    let mut best = f64::NEG_INFINITY;
    let mut best_tuple = Vec::new();
    let mut block = 1u32;
    loop {
        let tuple = witness_tuple(m, n, block, 0.5)?;
        let ratio = avg_sign_ratio(&tuple)?;
        if ratio > best {
            best = ratio;
            best_tuple = tuple;
        }
        if block > max_block / 2 {
            break;
        }
        block *= 2;
    }
    Ok((best, best_tuple))
}

/// Sum of `i^(m-1)` over `1 <= i <= k`.
fn power_sum(m: usize, k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).powi(m as i32 - 1)).sum()
}

/// Iterated upper bound `a_2 + (1 + a_2) C (1^(m-1) + ... + K^(m-1))` for the
/// type-2 constant at `n = 2^(K+1)`; for `m = 0` the iteration contributes
/// nothing and the bound is `a_2` itself.
pub fn recursion_upper(m: usize, a2: f64, c: f64, k: usize) -> Result<f64> {
    if !(a2 >= 1.0) {
        return Err(Error::OutOfRange {
            name: "a2",
            value: a2,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    if !(c > 0.0) {
        return Err(Error::OutOfRange {
            name: "C",
            value: c,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if k < 1 {
        return Err(Error::OutOfRange {
            name: "K",
            value: k as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    if m == 0 {
        return Ok(a2);
    }
    Ok(a2 + (1.0 + a2) * c * power_sum(m, k))
}

/// Witnessed lower bound for the type-2 constant of the length-`(m+1)` array
/// space, searching the disjoint summing-vector family with blocks up to `N`.
///
/// The report's `recursion_upper` is the iterated bound evaluated at the
/// witnessed `a_2` with the smallest step constant consistent with the
/// witnessed doubling ladder, so `lower_bound <= recursion_upper` always
/// holds for this family.  Cost: `2^n` quasinorm evaluations per block size.
pub fn an_lower(m: usize, n: usize, big_n: u32) -> Result<Type2Report> {
    if m > 4 {
        return Err(Error::OutOfRange {
            name: "m",
            value: m as f64,
            lo: 0.0,
            hi: 4.0,
        });
    }
    if n < 1 || n > MAX_SIGN_TUPLE {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            lo: 1.0,
            hi: MAX_SIGN_TUPLE as f64,
        });
    }
    if big_n < 1 {
        return Err(Error::OutOfRange {
            name: "N",
            value: big_n as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let (lower_bound, witness) = best_witness(m, n, big_n)?;
    let recursion_upper = if m == 0 || n <= 2 {
        if n <= 2 {
            lower_bound.max(1.0)
        } else {
            best_witness(m, 2, big_n)?.0.max(1.0)
        }
    } else {
        // witnessed doubling ladder 2, 4, ..., 2^(K+1) with 2^(K+1) >= n
        let kk = {
            let mut kk = 1usize;
            while 1usize << (kk + 1) < n {
                kk += 1;
            }
            kk
        };
        let ladder: Vec<f64> = (1..=kk + 1)
            .map(|i| best_witness(m, 1 << i, big_n).map(|(r, _)| r))
            .collect::<Result<_>>()?;
        let a2 = ladder[0].max(1.0);
        let mut c_min = 0.0f64;
        for i in 1..=kk {
            let step = (ladder[i] - ladder[i - 1]) / ((1.0 + a2) * (i as f64).powi(m as i32 - 1));
            c_min = c_min.max(step);
        }
        recursion_upper(m, a2, c_min.max(1e-9), kk)?
    };
    Ok(Type2Report {
        n,
        lower_bound,
        witness,
        recursion_upper,
    })
}
