//! Derived-space arrays over the interpolation scale of l-infinity and l-1,
//! their extremal selections, differentials, and the recursive twisted-sum
//! quasinorm.
//!
//! A [`RochbergVector`] of length `n` holds the consecutive normalized
//! derivatives `(x_{n-1}, ..., x_0)` of some admissible analytic function at
//! an interior point `theta` of the unit strip, in descending Taylor degree;
//! the scale's space at `theta` is `l_p` with `p = 1/theta`.
//!
//! The basic extremal selection for a single vector `x` is
//! `f_x(z) = sgn(x) |x|^{p z} ||x||_p^{1 - p z}`, whose Taylor coefficients at
//! `theta` are `(p^j/j!) x log^j(|x| / ||x||_p)`.  Arrays are realized by a
//! greedy correction scheme: realize the bottom coordinate by `f_x`, divide
//! the residual by a fixed conformal jet vanishing simply at `theta` (the
//! strip-to-disc map [`strip_zero_jet`]), and recurse.  All constructions are
//! degree-1 homogeneous and prefix-stable (truncating the requested order
//! never changes lower coefficients).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::jet::{self, Jet};
use crate::seq::FiniteSequence;
use crate::{Error, Result};

/// Array of consecutive normalized derivatives in descending degree, tied to
/// a base point `theta` of the open unit interval.
#[derive(Clone, Debug, PartialEq)]
pub struct RochbergVector {
    coords: Vec<FiniteSequence>,
    theta: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

impl RochbergVector {
    /// Wraps coordinates `(x_{n-1}, ..., x_0)` in descending degree order.
    pub fn new(coords: Vec<FiniteSequence>, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        if coords.is_empty() {
            return Err(Error::LengthMismatch(0, 1));
        }
        Ok(RochbergVector { coords, theta })
    }

    pub fn zero(n: usize, theta: f64) -> Result<Self> {
        Self::new(vec![FiniteSequence::zero(); n], theta)
    }

    pub fn singleton(x: FiniteSequence, theta: f64) -> Result<Self> {
        Self::new(vec![x], theta)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Conjugate exponent of the base point: `p = 1/theta`.
    pub fn p(&self) -> f64 {
        1.0 / self.theta
    }

    /// Coordinates in descending degree order.
    pub fn coords(&self) -> &[FiniteSequence] {
        &self.coords
    }

    /// Coordinate of Taylor degree `d` (`d < len`).
    pub fn by_degree(&self, d: usize) -> &FiniteSequence {
        &self.coords[self.len() - 1 - d]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(FiniteSequence::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, FiniteSequence::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, FiniteSequence::sub)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(&FiniteSequence, &FiniteSequence) -> FiniteSequence,
    ) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(RochbergVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| op(a, b))
                .collect(),
            theta: self.theta,
        })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        RochbergVector {
            coords: self.coords.iter().map(|c| c.scale(k)).collect(),
            theta: self.theta,
        }
    }

    /// Appends `k` zero coordinates at the bottom (low-degree) end: the left
    /// inclusion of a length-`n` array into length `n + k`.
    pub fn pad_below(&self, k: usize) -> Self {
        let mut coords = self.coords.clone();
        coords.extend(std::iter::repeat_with(FiniteSequence::zero).take(k));
        RochbergVector {
            coords,
            theta: self.theta,
        }
    }

    /// Keeps the bottom `k` coordinates (low degrees): the projection of a
    /// length-`n` array onto length `k <= n`.
    pub fn take_bottom(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(Error::LengthMismatch(self.len(), k));
        }
        RochbergVector::new(self.coords[self.len() - k..].to_vec(), self.theta)
    }

    /// Largest entry magnitude across all coordinates.
    pub fn sup_entry_magnitude(&self) -> f64 {
        self.coords
            .iter()
            .map(FiniteSequence::linf_norm)
            .fold(0.0, f64::max)
    }

    /// Largest coordinatewise difference (same length required).
    pub fn sup_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.sub(b).linf_norm())
            .fold(0.0, f64::max)
    }

    /// Random array for experiments: each coordinate supported in
    /// `1..=max_index` with at most `max_entries` slots.
    pub fn random<R: Rng>(
        rng: &mut R,
        n: usize,
        theta: f64,
        max_index: u32,
        max_entries: usize,
    ) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|_| FiniteSequence::random(rng, max_index, max_entries))
                .collect(),
            theta,
        )
    }
}

/// Per-degree terms `(rate^j/j!) x log^j(|x| / ||x||_e)` for `j = 0..=order`,
/// ascending, with the norm exponent `e` and the log multiplier `rate`
/// supplied separately (the dual-scale extremals use `rate = -q`).  Computed
/// incrementally entry by entry so a longer request reproduces the shorter
/// one bitwise on shared degrees.
pub(crate) fn log_power_terms(
    x: &FiniteSequence,
    order: usize,
    norm_exponent: f64,
    rate: f64,
) -> Result<Vec<FiniteSequence>> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let norm = x.lp_norm(norm_exponent)?;
    let mut terms = Vec::with_capacity(order + 1);
    terms.push(x.clone());
    for j in 1..=order {
        let prev = terms.last().unwrap();
        let next = prev.map_support(|idx, v| {
            let ell = (x.get(idx).norm() / norm).ln();
            v * (rate * ell / j as f64)
        });
        terms.push(next);
    }
    Ok(terms)
}

/// Per-degree terms `(p^j/j!) x log^j(|x| / ||x||_p)` of the primal extremal.
fn extremal_terms(x: &FiniteSequence, order: usize, p: f64) -> Result<Vec<FiniteSequence>> {
    log_power_terms(x, order, p, p)
}

/// The differential array `Omega^{1,n}(x) = ((p^j/j!) x log^j(|x|/||x||_p))`
/// for `j = n, ..., 1` in descending order, `p = 1/theta`.
pub fn omega_1n(x: &FiniteSequence, n: usize, theta: f64) -> Result<RochbergVector> {
    check_theta(theta)?;
    if n < 1 {
        return Err(Error::LengthMismatch(n, 1));
    }
    let terms = extremal_terms(x, n, 1.0 / theta)?;
    RochbergVector::new(terms.into_iter().skip(1).rev().collect(), theta)
}

/// Jet at `theta` of the homogeneous extremal selection
/// `f_x(z) = sgn(x) |x|^{p z} ||x||_p^{1 - p z}` through `x`.
pub fn extremal_jet(x: &FiniteSequence, order: usize, theta: f64) -> Result<Jet<FiniteSequence>> {
    check_theta(theta)?;
    let terms = extremal_terms(x, order, 1.0 / theta)?;
    Ok(Jet::from_coeffs(Complex64::new(theta, 0.0), terms))
}

/// Jet at `theta` of the strip-to-disc map vanishing simply there:
/// `phi_theta(z) = (e^{i pi z} - e^{i pi theta}) / (e^{i pi z} - e^{-i pi theta})`.
/// This is the fixed conformal factor used by [`array_extremal`] to push a
/// residual one degree up.
pub fn strip_zero_jet(theta: f64, order: usize) -> Result<Jet<Complex64>> {
    check_theta(theta)?;
    let base = Complex64::new(theta, 0.0);
    let ipi = Complex64::new(0.0, std::f64::consts::PI);
    let w0 = (ipi * base).exp();
    // jet of e^{i pi z} at theta: w0 (i pi)^k / k!
    let mut e_coeffs = Vec::with_capacity(order + 1);
    let mut term = w0;
    e_coeffs.push(term);
    for k in 1..=order {
        term = term * ipi / Complex64::new(k as f64, 0.0);
        e_coeffs.push(term);
    }
    let mut num = e_coeffs.clone();
    num[0] = Complex64::new(0.0, 0.0); // subtract e^{i pi theta} exactly
    let mut den = e_coeffs;
    den[0] -= w0.conj(); // e^{i pi theta} - e^{-i pi theta} = 2 i sin(pi theta)
    let num_jet = Jet::from_coeffs(base, num);
    let den_jet = Jet::from_coeffs(base, den);
    let inv_den = jet::pow(&den_jet, Complex64::new(-1.0, 0.0))?;
    jet::mul(&inv_den, &num_jet)
}

fn zero_jet(theta: f64, order: usize) -> Jet<FiniteSequence> {
    Jet::constant(
        Complex64::new(theta, 0.0),
        FiniteSequence::zero(),
        order,
    )
}

fn build_extremal(
    coords: &[FiniteSequence],
    order: usize,
    theta: f64,
) -> Result<Jet<FiniteSequence>> {
    let k = coords.len();
    let bottom = &coords[k - 1];
    let f_low = if bottom.is_zero() {
        zero_jet(theta, order)
    } else {
        extremal_jet(bottom, order, theta)?
    };
    if k == 1 {
        return Ok(f_low);
    }
    // residual on degrees 1..k-1, exactly zero at degree 0
    let mut residual = vec![FiniteSequence::zero(); k];
    let mut vanishing = true;
    for j in 1..k {
        let r = coords[k - 1 - j].sub(f_low.coeff(j));
        if !r.is_zero() {
            vanishing = false;
        }
        residual[j] = r;
    }
    if vanishing {
        return Ok(f_low);
    }
    let phi = strip_zero_jet(theta, order)?;
    // long-divide the residual by phi to learn the Taylor data the correcting
    // factor must realize, then recurse on that shorter array
    let residual_jet = Jet::from_coeffs(Complex64::new(theta, 0.0), residual);
    let g_target = jet::div_zero(&residual_jet, &phi.truncate(k - 1))?;
    let g_coords: Vec<FiniteSequence> = (0..k - 1).rev().map(|j| g_target.coeff(j).clone()).collect();
    let g = build_extremal(&g_coords, order, theta)?;
    f_low.add(&jet::mul(&phi, &g)?)
}

/// A jet `f` with `tau_{(k,0]} f(theta) = v`, chosen homogeneously by the
/// greedy bottom-first correction scheme.  `order` must be at least
/// `v.len() - 1`; the zero array gives the zero jet.
pub fn array_extremal(v: &RochbergVector, order: usize) -> Result<Jet<FiniteSequence>> {
    if order + 1 < v.len() {
        return Err(Error::InsufficientOrder {
            have: order,
            need: v.len() - 1,
        });
    }
    if v.is_zero() {
        return Ok(zero_jet(v.theta(), order));
    }
    build_extremal(v.coords(), order, v.theta())
}

/// Higher differential `Omega^{k,n}(v) = tau_{(n+k,k]} f_v(theta)` of the
/// greedy extremal through the length-`k` array `v`.
pub fn omega_kn(v: &RochbergVector, n: usize) -> Result<RochbergVector> {
    if n < 1 {
        return Err(Error::LengthMismatch(n, 1));
    }
    let k = v.len();
    let f = array_extremal(v, n + k - 1)?;
    RochbergVector::new(f.tau_extract(n + k, k)?, v.theta())
}

/// Recursive twisted-sum quasinorm:
/// `rho_1(x) = ||x||_p` and
/// `rho_{n+1}(x_n, ..., x_0) = rho_n((x_n, ..., x_1) - Omega^{1,n}(x_0)) + ||x_0||_p`.
pub fn rho(v: &RochbergVector) -> f64 {
    let p = v.p();
    let mut arr = v.coords().to_vec();
    let mut total = 0.0;
    while arr.len() > 1 {
        let bottom = arr.pop().unwrap();
        total += bottom.lp_norm(p).unwrap();
        if !bottom.is_zero() {
            let terms = extremal_terms(&bottom, arr.len(), p).unwrap();
            // subtract (t_n, ..., t_1) from the remaining descending array
            let n = arr.len();
            for (idx, slot) in arr.iter_mut().enumerate() {
                *slot = slot.sub(&terms[n - idx]);
            }
        }
    }
    total + arr[0].lp_norm(p).unwrap()
}

/// Original Kalton-Peck quasinorm on pairs:
/// `||(y, x)|| = || y - x log(||x||_2 / |x|) ||_2 + ||x||_2`.
pub fn kp_quasinorm(y: &FiniteSequence, x: &FiniteSequence) -> f64 {
    // x log(||x||/|x|) = -log_ratio(x), so the twisted part is y + log_ratio(x)
    let twisted = y.add(&x.log_ratio(2.0).unwrap());
    twisted.lp_norm(2.0).unwrap() + x.lp_norm(2.0).unwrap()
}

/// Outcome of the seeded quasilinearity experiment for `Omega^{1,n}`.
#[derive(Clone, Debug)]
pub struct QuasilinReport {
    pub n: usize,
    pub trials: usize,
    /// Per-trial ratio `rho_n(Omega(x+y) - Omega(x) - Omega(y)) / (||x||_p + ||y||_p)`.
    pub ratios: Vec<f64>,
    pub global_max: f64,
}

impl QuasilinReport {
    /// Running maximum after each trial.
    pub fn running_max(&self) -> Vec<f64> {
        let mut acc = 0.0f64;
        self.ratios
            .iter()
            .map(|&r| {
                acc = acc.max(r);
                acc
            })
            .collect()
    }
}

/// Measures the quasilinearity constant of `Omega^{1,n}` on seeded random
/// pairs supported in `1..=max_index`.  Trials are deterministic given
/// `seed` (each trial draws from its own stream) and evaluated in parallel.
pub fn quasilinearity_experiment(
    n: usize,
    trials: usize,
    max_index: u32,
    theta: f64,
    seed: u64,
) -> Result<QuasilinReport> {
    check_theta(theta)?;
    if n < 1 {
        return Err(Error::LengthMismatch(n, 1));
    }
    let p = 1.0 / theta;
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let (x, y, sum) = loop {
                let x = FiniteSequence::random_nonzero(&mut rng, max_index, 12);
                let y = FiniteSequence::random_nonzero(&mut rng, max_index, 12);
                let sum = x.add(&y);
                if !sum.is_zero() {
                    break (x, y, sum);
                }
            };
            let defect = omega_1n(&sum, n, theta)
                .unwrap()
                .sub(&omega_1n(&x, n, theta).unwrap())
                .unwrap()
                .sub(&omega_1n(&y, n, theta).unwrap())
                .unwrap();
            rho(&defect) / (x.lp_norm(p).unwrap() + y.lp_norm(p).unwrap())
        })
        .collect();
    let global_max = ratios.iter().copied().fold(0.0, f64::max);
    Ok(QuasilinReport {
        n,
        trials,
        ratios,
        global_max,
    })
}
