//! Radial-weight interpolation family on the unit disc with periodic
//! boundary exponents.
//!
//! The weight `omega(z) = 1/2 + r z^k` stays inside the unit strip of
//! exponents for `0 < r < 1/2`, equals `1/2` at the center (so the central
//! space is the square-summable one) and traces the periodic exponent
//! profile `p(theta) = 2/(1 + 2 r cos(k theta))` on the boundary circle.
//! Because the weight's derivative vanishes to order `k - 1` at the center,
//! every coefficient differential of order not divisible by `k` is exactly
//! zero: the first `k` derived spaces of the family degenerate to direct
//! sums, and the order-`k` differential is a multiple of the logarithmic
//! twist that generates the nontrivial twisted sum.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::jet::{self, Jet};
use crate::seq::FiniteSequence;
use crate::{Error, Result};

/// Radial weight `omega(z) = 1/2 + r z^k` on the closed unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaProfile {
    r: f64,
    k: u32,
}

impl OmegaProfile {
    /// Requires `0 < r < 1/2` (keeping the weight inside the exponent
    /// strip) and `k >= 1`.
    pub fn new(r: f64, k: u32) -> Result<Self> {
        if !(r > 0.0 && r < 0.5) {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
                lo: 0.0,
                hi: 0.5,
            });
        }
        if k < 1 {
            return Err(Error::OutOfRange {
                name: "k",
                value: k as f64,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        Ok(OmegaProfile { r, k })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Weight at the center.
    pub fn omega0(&self) -> Complex64 {
        Complex64::new(0.5, 0.0)
    }

    pub fn omega(&self, z: Complex64) -> Complex64 {
        self.omega0() + z.powu(self.k) * self.r
    }

    /// Central exponent `1 / Re omega(0) = 2`.
    pub fn p_center(&self) -> f64 {
        2.0
    }

    /// Boundary exponent `p(theta) = 2 / (1 + 2 r cos(k theta))`, periodic
    /// with period `2 pi / k`.
    pub fn p_profile(&self, theta: f64) -> f64 {
        2.0 / (1.0 + 2.0 * self.r * (self.k as f64 * theta).cos())
    }
}

/// Data for the family's extremals: entrywise non-negative (zero imaginary
/// parts) and of unit central norm.
fn check_data(f: &FiniteSequence) -> Result<()> {
    for (_, v) in f.iter() {
        if v.im != 0.0 || v.re < 0.0 {
            return Err(Error::OutOfRange {
                name: "entry",
                value: if v.im != 0.0 { v.im } else { v.re },
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    let norm = f.lp_norm(2.0)?;
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::OutOfRange {
            name: "central norm",
            value: norm,
            lo: 1.0 - 1e-9,
            hi: 1.0 + 1e-9,
        });
    }
    Ok(())
}

fn extremal_unchecked(prof: &OmegaProfile, f: &FiniteSequence, z: Complex64) -> FiniteSequence {
    // omega(z)/omega(0) = 1 + 2 r z^k; principal powers of positive reals
    let w = Complex64::new(1.0, 0.0) + z.powu(prof.k) * (2.0 * prof.r);
    f.map_support(|_, v| (w * v.re.ln()).exp())
}

/// Entrywise extremal value `f^(omega(z)/omega(0))` for non-negative data
/// `f` of unit central norm, with `0^w := 0`.  On the boundary circle its
/// `p(theta)`-norm is again one.
pub fn extremal_at(prof: &OmegaProfile, f: &FiniteSequence, z: Complex64) -> Result<FiniteSequence> {
    check_data(f)?;
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::OutOfRange {
            name: "|z|",
            value: z.norm(),
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(extremal_unchecked(prof, f, z))
}

/// Degree-`j` coefficient of the extremal through `f` at the center,
/// computed by jet exponentiation of `2 r log(f) z^k` entry by entry.  The
/// result is exactly zero unless `k` divides `j`, in which case it equals
/// `f (2 r log f)^(j/k) / (j/k)!` entrywise.
pub fn differential_tau(prof: &OmegaProfile, f: &FiniteSequence, j: usize) -> Result<FiniteSequence> {
    check_data(f)?;
    if j == 0 {
        return Ok(f.clone());
    }
    let k = prof.k as usize;
    let mut out = FiniteSequence::zero();
    for (idx, v) in f.iter() {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); j + 1];
        if k <= j {
            coeffs[k] = Complex64::new(2.0 * prof.r * v.re.ln(), 0.0);
        }
        let e = jet::exp(&Jet::from_coeffs(Complex64::new(0.0, 0.0), coeffs));
        out.set_entry(idx, v * e.coeff(j));
    }
    Ok(out)
}

/// Degree-1-homogeneous extension of [`differential_tau`] to arbitrary
/// non-negative data: zero on zero, otherwise the differential of the
/// normalized data scaled back by the central norm.
pub fn correction_term(prof: &OmegaProfile, x: &FiniteSequence, j: usize) -> Result<FiniteSequence> {
    if x.is_zero() {
        return Ok(FiniteSequence::zero());
    }
    let norm = x.lp_norm(2.0)?;
    let tau = differential_tau(prof, &x.scale_real(1.0 / norm), j)?;
    Ok(tau.scale_real(norm))
}

/// Recursive quasinorm of a descending coefficient array over the family's
/// central space: peel the bottom coordinate, subtract its correction terms
/// from the remaining degrees, recurse, and add the bottom central norm.
/// For arrays no longer than `k` every correction vanishes and the value
/// collapses to the plain sum of central norms; the first nontrivial
/// correction appears at length `k + 1`.  Bottom coordinates must be
/// non-negative wherever a correction is actually consulted.
pub fn family_rho(prof: &OmegaProfile, v: &[FiniteSequence]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::LengthMismatch(0, 1));
    }
    if v.len() == 1 {
        return v[0].lp_norm(2.0);
    }
    let bottom = &v[v.len() - 1];
    let rest = &v[..v.len() - 1];
    let corrected: Vec<FiniteSequence> = if bottom.is_zero() {
        rest.to_vec()
    } else {
        rest.iter()
            .enumerate()
            .map(|(pos, y)| {
                let degree = v.len() - 1 - pos;
                Ok(y.sub(&correction_term(prof, bottom, degree)?))
            })
            .collect::<Result<_>>()?
    };
    Ok(family_rho(prof, &corrected)? + bottom.lp_norm(2.0)?)
}

/// Largest deviation of the boundary extremal norms from one over equally
/// spaced boundary samples.
pub fn boundary_normalization_residual(
    prof: &OmegaProfile,
    f: &FiniteSequence,
    samples: usize,
) -> Result<f64> {
    check_data(f)?;
    Ok((0..samples)
        .into_par_iter()
        .map(|t| {
            let theta = std::f64::consts::TAU * t as f64 / samples as f64;
            let z = Complex64::from_polar(1.0, theta);
            let boundary_norm = extremal_unchecked(prof, f, z)
                .lp_norm(prof.p_profile(theta))
                .expect("boundary exponent is positive and finite");
            (boundary_norm - 1.0).abs()
        })
        .reduce(|| 0.0, f64::max))
}
