//! Coefficient algebras on the disc: rapid-decay seminorms, the positive
//! Wiener norm, Taylor coefficients of Möbius disc automorphisms, and the
//! blow-up table for the derivative of the strip-to-disc map.
//!
//! Möbius coefficients are produced by formal power-series division of the
//! defining linear-fractional expression, never by transcribing a closed
//! form; the closed form serves as a test oracle instead.

use num_complex::Complex64;

use crate::jet::Jet;
use crate::{Error, Result};

/// Disc automorphism `z -> lambda (z - a) / (conj(a) z - 1)` with `|lambda| = 1`
/// and `|a| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    lambda: Complex64,
    a: Complex64,
}

impl MobiusMap {
    pub fn new(lambda: Complex64, a: Complex64) -> Result<Self> {
        if (lambda.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                name: "lambda modulus",
                value: lambda.norm(),
                lo: 1.0,
                hi: 1.0,
            });
        }
        if a.norm() >= 1.0 {
            return Err(Error::OutOfRange {
                name: "a modulus",
                value: a.norm(),
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(MobiusMap { lambda, a })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.lambda * (z - self.a) / (self.a.conj() * z - Complex64::new(1.0, 0.0))
    }
}

/// Taylor coefficients of `(n0 + n1 z) / (d0 + d1 z)` at 0 by long division;
/// requires `d0 != 0`.
fn linear_fractional_coeffs(
    n0: Complex64,
    n1: Complex64,
    d0: Complex64,
    d1: Complex64,
    order: usize,
) -> Result<Vec<Complex64>> {
    if d0.norm() < 1e-300 {
        return Err(Error::VanishingConstantTerm);
    }
    let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
    c[0] = n0 / d0;
    if order >= 1 {
        c[1] = (n1 - d1 * c[0]) / d0;
    }
    for k in 2..=order {
        c[k] = -d1 * c[k - 1] / d0;
    }
    Ok(c)
}

/// Taylor coefficients of the Möbius map at 0, up to `order`, by series
/// division.
pub fn mobius_coeffs(m: &MobiusMap, order: usize) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    // lambda (z - a) / (conj(a) z - 1)
    linear_fractional_coeffs(-m.lambda * m.a, m.lambda, -one, m.a.conj(), order)
        .expect("denominator constant is -1")
}

/// Jet of the Möbius map at an arbitrary base with `|conj(a) base - 1| > 0`.
pub fn mobius_jet(m: &MobiusMap, base: Complex64, order: usize) -> Result<Jet<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let coeffs = linear_fractional_coeffs(
        m.lambda * (base - m.a),
        m.lambda,
        m.a.conj() * base - one,
        m.a.conj(),
        order,
    )?;
    Ok(Jet::from_coeffs(base, coeffs))
}

/// Composition of two disc automorphisms, again a linear-fractional map; its
/// coefficient array at 0 by series division.  Used as the oracle for the
/// jet-composition consistency check.
pub fn composed_mobius_coeffs(m1: &MobiusMap, m2: &MobiusMap, order: usize) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    // m1(m2(z)) = (A z + B) / (C z + D) after clearing the inner denominator
    let (l1, a1, l2, a2) = (m1.lambda, m1.a, m2.lambda, m2.a);
    let a_lin = l1 * l2 - l1 * a1 * a2.conj();
    let b = -l1 * l2 * a2 + l1 * a1;
    let c_lin = a1.conj() * l2 - a2.conj();
    let d = -a1.conj() * l2 * a2 + one;
    linear_fractional_coeffs(b, a_lin, d, c_lin, order)
        .expect("composed denominator does not vanish at 0 for disc automorphisms")
}

/// Rapid-decay seminorm `sup_{n >= 1} |c_n| n^alpha`.  The `n = 0` term is
/// excluded (report `|c_0|` separately when needed); `alpha` must be positive.
pub fn decay_seminorm(c: &[Complex64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidExponent(alpha));
    }
    Ok(c.iter()
        .enumerate()
        .skip(1)
        .map(|(n, v)| v.norm() * (n as f64).powf(alpha))
        .fold(0.0, f64::max))
}

/// Wiener norm `sum_n |c_n|` of a truncated coefficient array.
pub fn wiener_norm(c: &[Complex64]) -> f64 {
    c.iter().map(|v| v.norm()).sum()
}

/// Derivative of the strip-to-disc map `phi(z) = (e^z - 1)/(e^z + 1)`:
/// `phi'(z) = 2 e^z / (e^z + 1)^2`.
pub fn strip_derivative(z: Complex64) -> Complex64 {
    let w = z.exp();
    let one = Complex64::new(1.0, 0.0);
    Complex64::new(2.0, 0.0) * w / ((w + one) * (w + one))
}

/// Samples `|phi'(iy)|` along the upper imaginary axis, starting at `y = 0`
/// (value 1/2) and approaching the pole of the formula geometrically, so the
/// table exhibits the monotone blow-up.  The pole of `2 e^z/(e^z+1)^2` on the
/// imaginary axis sits where `e^{iy} = -1`, i.e. at `y = pi`; the closed form
/// of the sampled modulus is `1/(1 + cos y)`.
pub fn strip_derivative_blowup(samples: usize) -> Vec<(f64, f64)> {
    assert!(samples >= 1);
    let pole = std::f64::consts::PI;
    let mut table = Vec::with_capacity(samples);
    table.push((0.0, strip_derivative(Complex64::new(0.0, 0.0)).norm()));
    for j in 1..samples {
        let y = pole * (1.0 - 0.5_f64.powi(j as i32));
        table.push((y, strip_derivative(Complex64::new(0.0, y)).norm()));
    }
    table
}
