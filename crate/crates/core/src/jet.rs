//! Truncated Taylor expansions ("jets") of analytic functions, with values in
//! the complex numbers or in finitely supported sequences.
//!
//! A [`Jet`] of order `n` at base point `z` stores the normalized derivatives
//! `coeffs[k] = f^(k)(z) / k!` for `k = 0..=n`.  All operations are exact on
//! the stored coefficients up to floating-point roundoff, and every
//! coefficient of a result depends only on coefficients of the operands up to
//! the same degree, so truncating an operand and truncating the result commute
//! (the recursive extremal constructions rely on this).
//!
//! Scalar jets (`Jet<Complex64>`) form an algebra under [`mul`], [`compose`],
//! [`div_zero`], [`exp`], [`log`] and [`pow`]; sequence-valued jets
//! (`Jet<FiniteSequence>`) are a module over the scalar ones, and
//! [`lift_entrywise`] transports any scalar-jet map coordinate by coordinate.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

use crate::seq::FiniteSequence;
use crate::{Error, Result};

/// Relative tolerance under which two base points count as equal.
const BASE_TOL: f64 = 1e-9;

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= BASE_TOL * (1.0 + a.norm() + b.norm())
}

/// Coefficient types a jet can carry: complex scalars or finitely supported
/// sequences.  The operations are those of a vector space over Complex64.
pub trait Coeff: Clone + std::fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn vanishes(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, k: Complex64) -> Self;
    /// Magnitude used for residual checks: |.| for scalars, sup norm for
    /// sequences.
    fn magnitude(&self) -> f64;
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn vanishes(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, k: Complex64) -> Self {
        self * k
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coeff for FiniteSequence {
    fn zero() -> Self {
        FiniteSequence::zero()
    }
    fn vanishes(&self) -> bool {
        FiniteSequence::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        FiniteSequence::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        FiniteSequence::sub(self, other)
    }
    fn scale(&self, k: Complex64) -> Self {
        FiniteSequence::scale(self, k)
    }
    fn magnitude(&self) -> f64 {
        self.linf_norm()
    }
}

/// Truncated Taylor expansion at a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<C: Coeff> {
    base: Complex64,
    coeffs: Vec<C>,
}

impl<C: Coeff> Jet<C> {
    /// Builds a jet from its normalized derivatives; `coeffs` must be
    /// nonempty (`coeffs[k] = f^(k)(base)/k!`).
    pub fn from_coeffs(base: Complex64, coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a jet has at least its value");
        Jet { base, coeffs }
    }

    /// The constant jet of the given order.
    pub fn constant(base: Complex64, value: C, order: usize) -> Self {
        let mut coeffs = vec![C::zero(); order + 1];
        coeffs[0] = value;
        Jet { base, coeffs }
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    /// Truncation order (highest stored degree).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Value at the base point (`coeffs[0]`).
    pub fn value(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Drops coefficients above `order` (which must not exceed the current
    /// order).
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        Jet {
            base: self.base,
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Jet {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect(),
        }
    }

    /// Coefficientwise sum, truncated to the shorter operand.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if !close(self.base, other.base) {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        let n = self.order().min(other.order());
        Ok(Jet {
            base: self.base,
            coeffs: (0..=n)
                .map(|k| self.coeffs[k].add(&other.coeffs[k]))
                .collect(),
        })
    }

    /// Coefficientwise difference, truncated to the shorter operand.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Consecutive coefficients `(coeffs[hi-1], ..., coeffs[lo])` in
    /// descending degree order; requires `lo < hi <= order + 1`.
    pub fn tau_extract(&self, hi: usize, lo: usize) -> Result<Vec<C>> {
        if hi <= lo {
            return Err(Error::LengthMismatch(hi, lo));
        }
        if hi > self.order() + 1 {
            return Err(Error::InsufficientOrder {
                have: self.order(),
                need: hi - 1,
            });
        }
        Ok((lo..hi).rev().map(|k| self.coeffs[k].clone()).collect())
    }

    /// Largest coefficient magnitude (used by relative-tolerance checks).
    pub fn sup_coeff_magnitude(&self) -> f64 {
        self.coeffs.iter().map(Coeff::magnitude).fold(0.0, f64::max)
    }
}

impl Jet<Complex64> {
    /// The jet of the identity function `w` at `base`.
    pub fn identity(base: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = base;
        if order >= 1 {
            coeffs[1] = Complex64::new(1.0, 0.0);
        }
        Jet { base, coeffs }
    }

    /// The jet of `(w - base)^k` at `base`.
    pub fn monomial(base: Complex64, k: usize, order: usize) -> Self {
        assert!(k <= order);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Jet { base, coeffs }
    }

    /// Evaluates the truncated expansion at the point `z` (plain polynomial
    /// evaluation; only meaningful as an approximation for `z` near the base).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let s = z - self.base;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }
}

/// Largest coefficientwise difference between two jets of equal order.
pub fn max_coeff_diff<C: Coeff>(a: &Jet<C>, b: &Jet<C>) -> f64 {
    assert_eq!(a.order(), b.order(), "comparing jets of different orders");
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x.sub(y).magnitude())
        .fold(0.0, f64::max)
}

/// Cauchy product of coefficient slices, truncated to `len` coefficients.
/// The left factor is scalar; the right factor carries any coefficient type.
fn cauchy<C: Coeff>(a: &[Complex64], b: &[C], len: usize) -> Vec<C> {
    let mut out = vec![C::zero(); len];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = C::zero();
        for i in 0..=k {
            if i < a.len() && k - i < b.len() && !a[i].vanishes() && !b[k - i].vanishes() {
                acc = acc.add(&b[k - i].scale(a[i]));
            }
        }
        *slot = acc;
    }
    out
}

/// Product of a scalar jet with a jet of either kind, truncated to the
/// shorter order.  Bases must agree.
pub fn mul<C: Coeff>(a: &Jet<Complex64>, b: &Jet<C>) -> Result<Jet<C>> {
    if !close(a.base, b.base) {
        return Err(Error::BaseMismatch(a.base, b.base));
    }
    let n = a.order().min(b.order());
    Ok(Jet {
        base: a.base,
        coeffs: cauchy(&a.coeffs, &b.coeffs, n + 1),
    })
}

/// Composition `f o psi`: `psi` is a scalar jet whose value must equal the
/// base of `f`; the result is based where `psi` is based and truncated to the
/// shorter of the two orders.  Evaluated by a Horner scheme on jets, so each
/// output coefficient is the finite partition sum of the chain rule.
pub fn compose<C: Coeff>(f: &Jet<C>, psi: &Jet<Complex64>) -> Result<Jet<C>> {
    if !close(*psi.value(), f.base) {
        return Err(Error::BaseMismatch(f.base, *psi.value()));
    }
    let n = f.order().min(psi.order());
    // sigma = psi - psi(base): vanishing constant term, so multiplication by
    // sigma raises the minimal degree and the Horner loop below terminates
    // with exactly the degree-<=n part of sum_k f_k sigma^k.
    let mut sigma = psi.coeffs[..=n].to_vec();
    sigma[0] = Complex64::new(0.0, 0.0);
    let mut h = vec![C::zero(); n + 1];
    h[0] = f.coeffs[n].clone();
    for j in (0..n).rev() {
        let mut next = cauchy(&sigma, &h, n + 1);
        next[0] = next[0].add(&f.coeffs[j]);
        h = next;
    }
    Ok(Jet {
        base: psi.base,
        coeffs: h,
    })
}

/// Divides `f` by a jet `phi` with a simple zero at the common base point;
/// `f` must vanish there too.  Result order is `min(f, phi) - 1`.
pub fn div_zero<C: Coeff>(f: &Jet<C>, phi: &Jet<Complex64>) -> Result<Jet<C>> {
    if !close(f.base, phi.base) {
        return Err(Error::BaseMismatch(f.base, phi.base));
    }
    let n = f.order().min(phi.order());
    if n == 0 {
        return Err(Error::InsufficientOrder { have: 0, need: 1 });
    }
    let phi_scale = phi.sup_coeff_magnitude();
    if phi.coeffs[0].norm() > BASE_TOL * (1.0 + phi_scale) || phi.coeffs[1].vanishes() {
        return Err(Error::NotSimpleZero);
    }
    let f_scale = f.sup_coeff_magnitude();
    if f.coeffs[0].magnitude() > BASE_TOL * (1.0 + f_scale) {
        return Err(Error::NonVanishingDividend);
    }
    // long division: f_{k+1} = sum_{i=1}^{k+1} phi_i g_{k+1-i}
    let inv = Complex64::new(1.0, 0.0) / phi.coeffs[1];
    let mut g: Vec<C> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = f.coeffs[k + 1].clone();
        for i in 2..=(k + 1) {
            if !phi.coeffs[i].vanishes() && !g[k + 1 - i].vanishes() {
                acc = acc.sub(&g[k + 1 - i].scale(phi.coeffs[i]));
            }
        }
        g.push(acc.scale(inv));
    }
    Ok(Jet {
        base: f.base,
        coeffs: g,
    })
}

/// Exponential of a scalar jet.
pub fn exp(f: &Jet<Complex64>) -> Jet<Complex64> {
    let n = f.order();
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    e[0] = f.coeffs[0].exp();
    // (exp f)' = f' (exp f), i.e. (m+1) e_{m+1} = sum_{j=0}^{m} (j+1) f_{j+1} e_{m-j}
    for m in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=m {
            acc += ((j + 1) as f64) * f.coeffs[j + 1] * e[m - j];
        }
        e[m + 1] = acc / ((m + 1) as f64);
    }
    Jet {
        base: f.base,
        coeffs: e,
    }
}

/// Principal logarithm of a scalar jet; errors when the value vanishes.
pub fn log(f: &Jet<Complex64>) -> Result<Jet<Complex64>> {
    if f.coeffs[0].vanishes() {
        return Err(Error::VanishingConstantTerm);
    }
    let n = f.order();
    let mut l = vec![Complex64::new(0.0, 0.0); n + 1];
    l[0] = f.coeffs[0].ln();
    // f l' = f', i.e. m f_0 l_m = m f_m - sum_{j=1}^{m-1} j l_j f_{m-j}
    for m in 1..=n {
        let mut acc = (m as f64) * f.coeffs[m];
        for j in 1..m {
            acc -= (j as f64) * l[j] * f.coeffs[m - j];
        }
        l[m] = acc / ((m as f64) * f.coeffs[0]);
    }
    Ok(Jet {
        base: f.base,
        coeffs: l,
    })
}

/// Principal power `f^alpha = exp(alpha log f)`; errors when the value of `f`
/// vanishes.
pub fn pow(f: &Jet<Complex64>, alpha: Complex64) -> Result<Jet<Complex64>> {
    Ok(exp(&log(f)?.scale(alpha)))
}

/// Transports a scalar-jet operation across a sequence-valued jet coordinate
/// by coordinate (union of the coefficient supports).  The operation must
/// preserve the jet order.
pub fn lift_entrywise<F>(f: &Jet<FiniteSequence>, op: F) -> Result<Jet<FiniteSequence>>
where
    F: Fn(&Jet<Complex64>) -> Result<Jet<Complex64>>,
{
    let support: BTreeSet<u32> = f
        .coeffs
        .iter()
        .flat_map(|c| c.iter().map(|(i, _)| i))
        .collect();
    let n = f.order();
    let mut out = vec![FiniteSequence::zero(); n + 1];
    for idx in support {
        let scalar = Jet::from_coeffs(f.base, f.coeffs.iter().map(|c| c.get(idx)).collect());
        let mapped = op(&scalar)?;
        assert_eq!(
            mapped.order(),
            n,
            "entrywise lift requires an order-preserving operation"
        );
        for k in 0..=n {
            out[k].set_entry(idx, *mapped.coeff(k));
        }
    }
    Ok(Jet {
        base: f.base,
        coeffs: out,
    })
}

/// The alternating sum `sum_{i=0}^{n} (-1)^i / (i! (n-i)!)` in exact rational
/// arithmetic.  It vanishes for every `n >= 1` (it is `(1-1)^n / n!`), which
/// is the coefficient identity behind `exp(-w) exp(w) = 1`.
pub fn alternating_reciprocal_factorial_sum(n: u32) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 0..=n {
        let mut denom = BigRational::one();
        for j in 1..=i {
            denom *= BigRational::from_integer(j.into());
        }
        for j in 1..=(n - i) {
            denom *= BigRational::from_integer(j.into());
        }
        let term = denom.recip();
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Convenience check that [`alternating_reciprocal_factorial_sum`] is exactly
/// zero for all `1 <= n <= max_n`.
pub fn alternating_sum_vanishes_up_to(max_n: u32) -> bool {
    (1..=max_n).all(|n| alternating_reciprocal_factorial_sum(n).is_zero())
}
