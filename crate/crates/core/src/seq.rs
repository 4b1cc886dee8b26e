//! Finitely supported complex sequences and their p-(quasi)norms.
//!
//! A [`FiniteSequence`] is a sparse map `index -> Complex64` holding only the
//! nonzero entries, so the zero sequence is the empty map and equality of
//! canonical representations is structural equality.  Indices follow the
//! 1-based convention of the summing basis: [`FiniteSequence::make_sn`]`(N)`
//! is the indicator of `{1, ..., N}`.
//!
//! Invariants kept by every constructor and operation:
//! * no stored entry is exactly zero;
//! * `lp_norm` is absolutely homogeneous and non-increasing in `p`;
//! * `log_ratio` uses the convention `0 * log 0 = 0` (off-support entries stay
//!   off-support).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::{Error, Result};

/// Sparse finitely supported sequence of complex numbers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiniteSequence {
    entries: BTreeMap<u32, Complex64>,
}

impl FiniteSequence {
    /// The zero sequence.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a sequence from `(index, value)` pairs, dropping zero values and
    /// summing duplicates.
    pub fn from_pairs<I: IntoIterator<Item = (u32, Complex64)>>(pairs: I) -> Self {
        let mut out = Self::zero();
        for (idx, val) in pairs {
            out.add_entry(idx, val);
        }
        out
    }

    /// Builds a sequence from real `(index, value)` pairs.
    pub fn from_real_pairs<I: IntoIterator<Item = (u32, f64)>>(pairs: I) -> Self {
        Self::from_pairs(
            pairs
                .into_iter()
                .map(|(i, v)| (i, Complex64::new(v, 0.0))),
        )
    }

    /// The basis vector `e_k` (1-based).
    pub fn basis(k: u32) -> Self {
        Self::from_pairs([(k, Complex64::new(1.0, 0.0))])
    }

    /// The summing vector `s_N = e_1 + ... + e_N`.
    pub fn make_sn(n: u32) -> Self {
        Self::from_real_pairs((1..=n).map(|i| (i, 1.0)))
    }

    /// Adds `val` into slot `idx`, keeping the no-zero-entries invariant.
    pub fn add_entry(&mut self, idx: u32, val: Complex64) {
        if val == Complex64::new(0.0, 0.0) {
            return;
        }
        let slot = self.entries.entry(idx).or_insert(Complex64::new(0.0, 0.0));
        *slot += val;
        if *slot == Complex64::new(0.0, 0.0) {
            self.entries.remove(&idx);
        }
    }

    /// Overwrites slot `idx` with `val` (removing it when `val == 0`).
    pub fn set_entry(&mut self, idx: u32, val: Complex64) {
        if val == Complex64::new(0.0, 0.0) {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, val);
        }
    }

    /// Value at slot `idx` (zero off the support).
    pub fn get(&self, idx: u32) -> Complex64 {
        self.entries
            .get(&idx)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of nonzero entries.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// Iterates over `(index, value)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.entries.iter().map(|(&i, &v)| (i, v))
    }

    /// Largest support index, if nonzero.
    pub fn max_index(&self) -> Option<u32> {
        self.entries.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (idx, val) in other.iter() {
            out.add_entry(idx, val);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (idx, val) in other.iter() {
            out.add_entry(idx, -val);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        if k == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self {
            entries: self.entries.iter().map(|(&i, &v)| (i, k * v)).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(Complex64::new(k, 0.0))
    }

    /// Applies `f` to every support entry, dropping any zeros it produces.
    pub fn map_support<F: FnMut(u32, Complex64) -> Complex64>(&self, mut f: F) -> Self {
        Self::from_pairs(self.iter().map(|(i, v)| (i, f(i, v))))
    }

    /// Shifts every support index by `offset` (disjoint-copy construction).
    pub fn shift_support(&self, offset: u32) -> Self {
        Self {
            entries: self.entries.iter().map(|(&i, &v)| (i + offset, v)).collect(),
        }
    }

    /// Coordinatewise bilinear pairing `sum_i a_i * b_i` (no conjugation).
    pub fn dot(&self, other: &Self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, val) in self.iter() {
            let w = other.get(idx);
            if w != Complex64::new(0.0, 0.0) {
                acc += val * w;
            }
        }
        acc
    }

    /// Supremum norm `max_i |x_i|`.
    pub fn linf_norm(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// The p-(quasi)norm `(sum |x_i|^p)^(1/p)`; `p = f64::INFINITY` gives the
    /// supremum norm.  For `0 < p < 1` this is the standard p-quasinorm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p <= 0.0 {
            return Err(Error::InvalidExponent(p));
        }
        if p.is_infinite() {
            return Ok(self.linf_norm());
        }
        let sum: f64 = self.entries.values().map(|v| v.norm().powf(p)).sum();
        Ok(sum.powf(1.0 / p))
    }

    /// Entrywise `x_i * log(|x_i| / lp_norm(x))` on the support, with the
    /// convention `0 * log 0 = 0` off the support.  Zero input gives zero.
    pub fn log_ratio(&self, p: f64) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let norm = self.lp_norm(p)?;
        Ok(self.map_support(|_, v| v * (v.norm() / norm).ln()))
    }

    /// Draws a sequence with at most `max_entries` nonzero slots among
    /// `1..=max_index`, entries uniform in the complex unit square.
    pub fn random<R: Rng>(rng: &mut R, max_index: u32, max_entries: usize) -> Self {
        let count = rng.gen_range(0..=max_entries.min(max_index as usize));
        let mut out = Self::zero();
        for _ in 0..count {
            let idx = rng.gen_range(1..=max_index);
            let re = rng.gen_range(-1.0..1.0);
            let im = rng.gen_range(-1.0..1.0);
            out.set_entry(idx, Complex64::new(re, im));
        }
        out
    }

    /// Like [`FiniteSequence::random`] but guaranteed nonzero.
    pub fn random_nonzero<R: Rng>(rng: &mut R, max_index: u32, max_entries: usize) -> Self {
        loop {
            let s = Self::random(rng, max_index, max_entries.max(1));
            if !s.is_zero() {
                return s;
            }
        }
    }
}
