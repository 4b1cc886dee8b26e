//! Pairings between derived-space arrays and their duals: the convolution
//! pairing realizing the dual of an array space over the conjugate scale, the
//! signed self-pairing, extremal selections on the dual couple of l-1 and
//! l-infinity, the scalar jet of a bilinear product of analytic functions,
//! and closed-form lower-bound certificates.
//!
//! Functionals are finitely supported sequences acting through the coordinate
//! bilinear form `<u, x> = sum u_i x_i` (no conjugation).  On finitely
//! supported vectors this is exactly the duality between an array space at
//! `theta` (built over `l_p`, `p = 1/theta`) and the arrays over the
//! conjugate exponent `q = 1/(1 - theta)`.

use num_complex::Complex64;
use rand::Rng;

use crate::jet::Jet;
use crate::rochberg::{log_power_terms, RochbergVector};
use crate::seq::FiniteSequence;
use crate::{Error, Result};

/// Array of functionals `(xi_{n-1}, ..., xi_0)` in descending degree, acting
/// on arrays over the conjugate exponent: `1/p + 1/q = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualVector {
    coords: Vec<FiniteSequence>,
    q: f64,
}

impl DualVector {
    pub fn new(coords: Vec<FiniteSequence>, q: f64) -> Result<Self> {
        if !(q > 1.0) {
            return Err(Error::InvalidExponent(q));
        }
        if coords.is_empty() {
            return Err(Error::LengthMismatch(0, 1));
        }
        Ok(DualVector { coords, q })
    }

    /// Dual array sized to pair with arrays based at `theta`.
    pub fn conjugate_to(coords: Vec<FiniteSequence>, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Self::new(coords, 1.0 / (1.0 - theta))
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn coords(&self) -> &[FiniteSequence] {
        &self.coords
    }

    pub fn by_degree(&self, d: usize) -> &FiniteSequence {
        &self.coords[self.len() - 1 - d]
    }

    /// Appends `k` zero coordinates at the bottom (low-degree) end, the
    /// dual-side inclusion matching the array-side projection.
    pub fn pad_below(&self, k: usize) -> Self {
        let mut coords = self.coords.clone();
        coords.extend(std::iter::repeat_with(FiniteSequence::zero).take(k));
        DualVector { coords, q: self.q }
    }

    /// Keeps the bottom `k` coordinates (low degrees), the dual-side
    /// counterpart of embedding the paired array on the left.
    pub fn take_bottom(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(Error::LengthMismatch(self.len(), k));
        }
        DualVector::new(self.coords[self.len() - k..].to_vec(), self.q)
    }

    pub fn random<R: Rng>(
        rng: &mut R,
        n: usize,
        theta: f64,
        max_index: u32,
        max_entries: usize,
    ) -> Result<Self> {
        Self::conjugate_to(
            (0..n)
                .map(|_| FiniteSequence::random(rng, max_index, max_entries))
                .collect(),
            theta,
        )
    }
}

fn check_conjugate(xi: &DualVector, x: &RochbergVector) -> Result<()> {
    let expected = 1.0 / (1.0 - x.theta());
    if (xi.q() - expected).abs() > 1e-9 * expected {
        return Err(Error::BaseMismatch(
            Complex64::new(xi.q(), 0.0),
            Complex64::new(expected, 0.0),
        ));
    }
    Ok(())
}

/// Convolution pairing `sum_{j=0}^{n-1} <xi_j, x_{n-1-j}>`: degree `j` of the
/// functional meets degree `n-1-j` of the array, total degree `n-1`.
pub fn t_n_pair(xi: &DualVector, x: &RochbergVector) -> Result<Complex64> {
    check_conjugate(xi, x)?;
    if xi.len() != x.len() {
        return Err(Error::LengthMismatch(xi.len(), x.len()));
    }
    let n = x.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        acc += xi.by_degree(j).dot(x.by_degree(n - 1 - j));
    }
    Ok(acc)
}

/// Signed self-pairing `sum_{i+j=n-1} (-1)^i <y_i, x_j>` of two arrays of the
/// same length; for even `n` it vanishes on the diagonal.
pub fn signed_self_pair(y: &RochbergVector, x: &RochbergVector) -> Result<Complex64> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    let n = x.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let term = y.by_degree(i).dot(x.by_degree(n - 1 - i));
        acc += if i % 2 == 0 { term } else { -term };
    }
    Ok(acc)
}

/// Jet at `c` of the extremal through `x` on the conjugate couple of l-1 and
/// l-infinity: coefficient `n` is `((-q)^n/n!) x log^n(|x| / ||x||_q)` with
/// `q = 1/(1-c)`.
pub fn dual_extremal_jet(x: &FiniteSequence, c: f64, order: usize) -> Result<Jet<FiniteSequence>> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let q = 1.0 / (1.0 - c);
    let terms = log_power_terms(x, order, q, -q)?;
    Ok(Jet::from_coeffs(Complex64::new(c, 0.0), terms))
}

/// Scalar jet of `z -> <h(z), g(z)>`: coefficient `k` is the bilinear Cauchy
/// product `sum_{j=0}^{k} <tau_j h, tau_{k-j} g>`, truncated to the shorter
/// operand.
pub fn holo_pair(h: &Jet<FiniteSequence>, g: &Jet<FiniteSequence>) -> Result<Jet<Complex64>> {
    if (h.base() - g.base()).norm() > 1e-9 {
        return Err(Error::BaseMismatch(h.base(), g.base()));
    }
    let order = h.order().min(g.order());
    let coeffs: Vec<Complex64> = (0..=order)
        .map(|k| {
            (0..=k)
                .map(|j| h.coeff(j).dot(g.coeff(k - j)))
                .sum::<Complex64>()
        })
        .collect();
    Ok(Jet::from_coeffs(h.base(), coeffs))
}

/// Closed-form lower bound `min(c, 1-c)^{n-1} N^{1/p} log^{n-1}(N) / (n-1)!`
/// for the quasinorm of the summing vector padded to degree `n - 1`,
/// `p = 1/c`.
pub fn lb_certificate(big_n: u32, n: usize, c: f64) -> Result<f64> {
    if big_n < 1 {
        return Err(Error::OutOfRange {
            name: "N",
            value: big_n as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    if n < 1 {
        return Err(Error::LengthMismatch(n, 1));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let nf = big_n as f64;
    let mut fac = 1.0;
    for i in 1..n {
        fac *= i as f64;
    }
    Ok(c.min(1.0 - c).powi(n as i32 - 1) * nf.powf(c) * nf.ln().powi(n as i32 - 1) / fac)
}

/// Largest sampled boundary norm of the closed-form primal extremal through
/// `v` at `c`: the sup norm on the left line, the sum norm on the right line.
/// Analytically both equal `||v||_p`; sampling cross-checks the formula.
pub fn primal_boundary_sup(v: &FiniteSequence, c: f64, samples: usize) -> Result<f64> {
    boundary_sup(v, 1.0 / c, c, samples, false)
}

/// Largest sampled boundary norm of the closed-form dual extremal through
/// `u` at `c` over the conjugate couple: the sum norm on the left line, the
/// sup norm on the right line.  Analytically both equal `||u||_q`.
pub fn dual_boundary_sup(u: &FiniteSequence, c: f64, samples: usize) -> Result<f64> {
    boundary_sup(u, 1.0 / (1.0 - c), c, samples, true)
}

fn boundary_sup(
    x: &FiniteSequence,
    exponent: f64,
    c: f64,
    samples: usize,
    dual: bool,
) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let norm = x.lp_norm(exponent)?;
    let rate = if dual {
        -(1.0 / (1.0 - c))
    } else {
        1.0 / c
    };
    // entrywise value at z: x_i (|x_i| / ||x||)^{rate (z - c)}
    let entry = |idx: u32, z: Complex64| -> Complex64 {
        let v = x.get(idx);
        let ratio = v.norm() / norm;
        v * Complex64::new(ratio, 0.0).powc(Complex64::new(rate, 0.0) * (z - Complex64::new(c, 0.0)))
    };
    let mut sup: f64 = 0.0;
    for s in 0..samples.max(1) {
        let y = -8.0 + 16.0 * (s as f64) / (samples.max(1) as f64);
        for re in [0.0, 1.0] {
            let z = Complex64::new(re, y);
            // sum norm on the l-1 line, sup norm on the l-infinity line
            let l1_line = if dual { re == 0.0 } else { re == 1.0 };
            let mut acc: f64 = 0.0;
            for (idx, _) in x.iter() {
                let m = entry(idx, z).norm();
                if l1_line {
                    acc += m;
                } else {
                    acc = acc.max(m);
                }
            }
            sup = sup.max(acc);
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rochberg::{extremal_jet, rho};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dual_from(coords: Vec<FiniteSequence>) -> DualVector {
        DualVector::conjugate_to(coords, 0.5).unwrap()
    }

    fn array_from(coords: Vec<FiniteSequence>) -> RochbergVector {
        RochbergVector::new(coords, 0.5).unwrap()
    }

    #[test]
    fn pairing_in_length_one_is_the_coordinate_form() {
        let xi = dual_from(vec![FiniteSequence::from_real_pairs([(1, 2.0), (3, -1.0)])]);
        let x = array_from(vec![FiniteSequence::from_real_pairs([(1, 5.0), (3, 4.0)])]);
        assert_eq!(t_n_pair(&xi, &x).unwrap(), c64(6.0, 0.0));
    }

    #[test]
    fn pairing_in_length_two_crosses_degrees() {
        let xi1 = FiniteSequence::from_real_pairs([(1, 1.0)]);
        let xi0 = FiniteSequence::from_real_pairs([(2, 1.0)]);
        let x1 = FiniteSequence::from_real_pairs([(2, 3.0)]);
        let x0 = FiniteSequence::from_real_pairs([(1, 7.0)]);
        let xi = dual_from(vec![xi1.clone(), xi0.clone()]);
        let x = array_from(vec![x1.clone(), x0.clone()]);
        // <xi_0, x_1> + <xi_1, x_0> = 3 + 7
        assert_eq!(t_n_pair(&xi, &x).unwrap(), c64(10.0, 0.0));
    }

    #[test]
    fn pairing_vanishes_on_disjoint_supports() {
        let xi = dual_from(vec![
            FiniteSequence::make_sn(4),
            FiniteSequence::make_sn(4),
        ]);
        let x = array_from(vec![
            FiniteSequence::make_sn(4).shift_support(10),
            FiniteSequence::make_sn(4).shift_support(10),
        ]);
        assert_eq!(t_n_pair(&xi, &x).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn pairing_rejects_mismatches() {
        let xi = dual_from(vec![FiniteSequence::basis(1)]);
        let x = array_from(vec![FiniteSequence::basis(1), FiniteSequence::basis(2)]);
        assert!(matches!(
            t_n_pair(&xi, &x),
            Err(Error::LengthMismatch(1, 2))
        ));
        let wrong_q = DualVector::new(vec![FiniteSequence::basis(1)], 3.0).unwrap();
        let x1 = array_from(vec![FiniteSequence::basis(1)]);
        assert!(matches!(t_n_pair(&wrong_q, &x1), Err(Error::BaseMismatch(..))));
    }

    #[test]
    fn signed_pairing_examples() {
        let y0 = FiniteSequence::from_real_pairs([(1, 2.0)]);
        let x0 = FiniteSequence::from_real_pairs([(1, 3.0)]);
        let y = array_from(vec![y0.clone()]);
        let x = array_from(vec![x0.clone()]);
        assert_eq!(signed_self_pair(&y, &x).unwrap(), c64(6.0, 0.0));

        let y1 = FiniteSequence::from_real_pairs([(1, 5.0)]);
        let x1 = FiniteSequence::from_real_pairs([(1, 1.0)]);
        let yy = array_from(vec![y1.clone(), y0.clone()]);
        let xx = array_from(vec![x1.clone(), x0.clone()]);
        // <y_0, x_1> - <y_1, x_0> = 2*1 - 5*3
        assert_eq!(signed_self_pair(&yy, &xx).unwrap(), c64(-13.0, 0.0));
    }

    #[test]
    fn signed_pairing_vanishes_on_the_diagonal_in_even_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in [2usize, 4] {
            for _ in 0..20 {
                let v = RochbergVector::random(&mut rng, n, 0.5, 24, 6).unwrap();
                let val = signed_self_pair(&v, &v).unwrap();
                assert!(
                    val.norm() < 1e-12 * (1.0 + v.sup_entry_magnitude().powi(2)),
                    "n={n}: diagonal value {val}"
                );
            }
        }
    }

    #[test]
    fn signed_pairing_matches_double_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let n = 3;
            let y = RochbergVector::random(&mut rng, n, 0.5, 16, 5).unwrap();
            let x = RochbergVector::random(&mut rng, n, 0.5, 16, 5).unwrap();
            let mut oracle = c64(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    if i + j == n - 1 {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        oracle += y.by_degree(i).dot(x.by_degree(j)) * c64(sign, 0.0);
                    }
                }
            }
            let got = signed_self_pair(&y, &x).unwrap();
            assert!((got - oracle).norm() < 1e-13 * (1.0 + oracle.norm()));
        }
    }

    #[test]
    fn dual_jet_coefficients() {
        let s16 = FiniteSequence::make_sn(16);
        let h = dual_extremal_jet(&s16, 0.5, 3).unwrap();
        assert_eq!(h.coeff(0), &s16);
        // q = 2: coefficient 1 is -2 log(16^{-1/2}) s_16 = log(16) s_16
        let expect = s16.scale_real(16.0f64.ln());
        assert!(h.coeff(1).sub(&expect).linf_norm() < 1e-12 * expect.linf_norm());

        let e1 = FiniteSequence::basis(1);
        let he = dual_extremal_jet(&e1, 0.3, 4).unwrap();
        for k in 1..=4 {
            assert!(he.coeff(k).is_zero());
        }

        assert_eq!(
            dual_extremal_jet(&FiniteSequence::zero(), 0.5, 2),
            Err(Error::ZeroVector)
        );
        assert!(dual_extremal_jet(&e1, 1.2, 2).is_err());
    }

    #[test]
    fn holo_pair_low_order_formulas() {
        let h0 = FiniteSequence::from_real_pairs([(1, 2.0), (2, 1.0)]);
        let g0 = FiniteSequence::from_real_pairs([(1, 3.0), (2, -1.0)]);
        let base = c64(0.5, 0.0);
        let hc = Jet::constant(base, h0.clone(), 2);
        let gc = Jet::constant(base, g0.clone(), 2);
        let prod = holo_pair(&hc, &gc).unwrap();
        assert_eq!(prod.coeff(0), &c64(5.0, 0.0));
        assert_eq!(prod.coeff(1), &c64(0.0, 0.0));

        let h1 = FiniteSequence::from_real_pairs([(1, 1.0)]);
        let g1 = FiniteSequence::from_real_pairs([(2, 4.0)]);
        let h = Jet::from_coeffs(base, vec![h0.clone(), h1.clone()]);
        let g = Jet::from_coeffs(base, vec![g0.clone(), g1.clone()]);
        let p = holo_pair(&h, &g).unwrap();
        // <h_1, g_0> + <h_0, g_1>
        let expect = h1.dot(&g0) + h0.dot(&g1);
        assert_eq!(p.coeff(1), &expect);

        let other = Jet::constant(c64(0.25, 0.0), h0, 1);
        assert!(matches!(holo_pair(&other, &g), Err(Error::BaseMismatch(..))));
    }

    #[test]
    fn holo_pair_matches_contour_oracle() {
        // both factors have entrywise closed forms, so the scalar product can
        // be sampled on a small circle and integrated for its coefficients
        let u = FiniteSequence::from_pairs([(1, c64(1.2, 0.4)), (3, c64(-0.7, 0.2))]);
        let v = FiniteSequence::from_pairs([(1, c64(0.5, -0.9)), (3, c64(1.1, 0.3))]);
        let c = 0.4;
        let (p, q) = (1.0 / c, 1.0 / (1.0 - c));
        let h = dual_extremal_jet(&u, c, 4).unwrap();
        let g = extremal_jet(&v, 4, c).unwrap();
        let pair = holo_pair(&h, &g).unwrap();

        let nu = u.lp_norm(q).unwrap();
        let nv = v.lp_norm(p).unwrap();
        let eval = |z: Complex64| -> Complex64 {
            let mut acc = c64(0.0, 0.0);
            for (idx, _) in u.iter() {
                let uu = u.get(idx);
                let vv = v.get(idx);
                if vv == c64(0.0, 0.0) {
                    continue;
                }
                let hu = uu * Complex64::new(uu.norm() / nu, 0.0)
                    .powc(c64(-q, 0.0) * (z - c64(c, 0.0)));
                let gv = vv * Complex64::new(vv.norm() / nv, 0.0)
                    .powc(c64(p, 0.0) * (z - c64(c, 0.0)));
                acc += hu * gv;
            }
            acc
        };
        let m = 128;
        let radius = 0.1;
        for k in 0..=4usize {
            let mut acc = c64(0.0, 0.0);
            for j in 0..m {
                let ang = 2.0 * std::f64::consts::PI * (j as f64) / (m as f64);
                acc += eval(c64(c, 0.0) + Complex64::from_polar(radius, ang))
                    * Complex64::from_polar(1.0, -(k as f64) * ang);
            }
            let oracle = acc / c64(m as f64 * radius.powi(k as i32), 0.0);
            let got = pair.coeff(k);
            assert!(
                (got - oracle).norm() < 1e-6 * (1.0 + oracle.norm()),
                "coefficient {k}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn certificate_examples_and_monotonicity() {
        for &big_n in &[4u32, 9, 25] {
            let base = lb_certificate(big_n, 1, 0.5).unwrap();
            assert_relative_eq!(
                base,
                FiniteSequence::make_sn(big_n).lp_norm(2.0).unwrap(),
                epsilon = 1e-12
            );
        }
        assert_relative_eq!(
            lb_certificate(4, 2, 0.5).unwrap(),
            0.5 * 2.0 * 4.0f64.ln(),
            epsilon = 1e-12
        );
        for n in 1..=4usize {
            let mut prev = lb_certificate(3, n, 0.5).unwrap();
            for big_n in 4..=40u32 {
                let next = lb_certificate(big_n, n, 0.5).unwrap();
                assert!(next > prev, "not increasing at N={big_n}, n={n}");
                prev = next;
            }
        }
        assert!(lb_certificate(0, 1, 0.5).is_err());
        assert!(lb_certificate(4, 0, 0.5).is_err());
        assert!(lb_certificate(4, 1, 0.0).is_err());
    }

    #[test]
    fn certificate_stays_below_the_quasinorm() {
        for n in 1..=4usize {
            for &big_n in &[4u32, 16, 64, 256] {
                let mut coords = vec![FiniteSequence::zero(); n - 1];
                coords.push(FiniteSequence::make_sn(big_n));
                let v = array_from(coords);
                let cert = lb_certificate(big_n, n, 0.5).unwrap();
                let value = rho(&v);
                assert!(
                    cert <= value + 1e-9,
                    "N={big_n}, n={n}: certificate {cert} above quasinorm {value}"
                );
            }
        }
    }

    #[test]
    fn boundary_sups_match_the_norm_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for &c in &[0.3, 0.5, 0.7] {
            for _ in 0..5 {
                let x = FiniteSequence::random_nonzero(&mut rng, 24, 6);
                let p = 1.0 / c;
                let q = 1.0 / (1.0 - c);
                let ps = primal_boundary_sup(&x, c, 64).unwrap();
                assert_relative_eq!(ps, x.lp_norm(p).unwrap(), max_relative = 1e-9);
                let ds = dual_boundary_sup(&x, c, 64).unwrap();
                assert_relative_eq!(ds, x.lp_norm(q).unwrap(), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn pairing_coefficient_obeys_the_strip_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for &c in &[0.3, 0.5, 0.7] {
            for n in 1..=5usize {
                for _ in 0..10 {
                    let u = FiniteSequence::random_nonzero(&mut rng, 24, 6);
                    let v = FiniteSequence::random_nonzero(&mut rng, 24, 6);
                    let h = dual_extremal_jet(&u, c, n - 1).unwrap();
                    let g = extremal_jet(&v, n - 1, c).unwrap();
                    let pair = holo_pair(&h, &g).unwrap();
                    let bound = dual_boundary_sup(&u, c, 256).unwrap()
                        * primal_boundary_sup(&v, c, 256).unwrap()
                        / c.min(1.0 - c).powi(n as i32 - 1);
                    let tau = pair.coeff(n - 1).norm();
                    assert!(
                        tau <= bound,
                        "c={c}, n={n}: coefficient {tau} above strip bound {bound}"
                    );
                }
            }
        }
    }

    #[test]
    fn pairing_diagram_commutes_across_padding() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let n = 2;
            let k = 2;
            let xi = DualVector::random(&mut rng, n + k, 0.5, 16, 5).unwrap();
            let x = RochbergVector::random(&mut rng, n, 0.5, 16, 5).unwrap();
            let lhs = t_n_pair(&xi.take_bottom(n).unwrap(), &x).unwrap();
            let rhs = t_n_pair(&xi, &x.pad_below(k)).unwrap();
            assert!((lhs - rhs).norm() < 1e-13 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn signed_diagram_commutes_with_alternating_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for k in 1..=3usize {
            for _ in 0..20 {
                let n = 2;
                let y = RochbergVector::random(&mut rng, n, 0.5, 16, 5).unwrap();
                let x = RochbergVector::random(&mut rng, n + k, 0.5, 16, 5).unwrap();
                // padding y on the bottom against x equals (-1)^k times the
                // pairing of y against the bottom part of x
                let lhs = signed_self_pair(&y.pad_below(k), &x).unwrap();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let rhs = signed_self_pair(&y, &x.take_bottom(n).unwrap()).unwrap()
                    * c64(sign, 0.0);
                assert!(
                    (lhs - rhs).norm() < 1e-13 * (1.0 + rhs.norm()),
                    "k={k}: {lhs} vs {rhs}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn pairing_is_bilinear(seed in 0u64..1000, are in -2.0..2.0f64, aim in -2.0..2.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 3usize;
            let xi = DualVector::random(&mut rng, n, 0.5, 16, 5).unwrap();
            let x = RochbergVector::random(&mut rng, n, 0.5, 16, 5).unwrap();
            let y = RochbergVector::random(&mut rng, n, 0.5, 16, 5).unwrap();
            let alpha = c64(are, aim);
            let lhs = t_n_pair(&xi, &x.scale(alpha).add(&y).unwrap()).unwrap();
            let rhs = alpha * t_n_pair(&xi, &x).unwrap() + t_n_pair(&xi, &y).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }
    }
}
