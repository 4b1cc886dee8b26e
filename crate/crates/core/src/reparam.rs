//! Coefficient-transport matrices and binomial grid operators.
//!
//! Reparametrizing the base point of a truncated expansion acts on the
//! descending coefficient array `(tau_{n-1}f, ..., tau_0 f)` by an upper
//! triangular matrix (the Faa di Bruno matrix of the reparametrizing jet);
//! multiplying by a fixed scalar jet acts by an upper triangular Toeplitz
//! matrix.  Both are built here on top of the jet engine, together with the
//! binomial spreading operator that fills an `n x m` grid with weighted
//! repeats of a length `m + n - 1` array, the splitting isomorphism for
//! two-row grids, and sampled commutativity checks for the exact identities
//! connecting all of these with the padding and projection maps.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::duality::{self, DualVector};
use crate::jet::{self, Coeff, Jet};
use crate::rochberg::{self, RochbergVector};
use crate::seq::FiniteSequence;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const TRIAL_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Square complex matrix with zero entries below the diagonal, acting on
/// descending coefficient arrays (row 0 produces the top, highest-degree
/// output coordinate).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularMatrix {
    entries: Vec<Vec<Complex64>>,
}

impl TriangularMatrix {
    /// Wraps a row-major square array; every entry below the diagonal must be
    /// exactly zero.
    pub fn new(entries: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 {
            return Err(Error::LengthMismatch(0, 1));
        }
        for r in 0..dim {
            if entries[r].len() != dim {
                return Err(Error::LengthMismatch(entries[r].len(), dim));
            }
            for c in 0..r {
                if entries[r][c] != ZERO {
                    return Err(Error::NotTriangular(r, c));
                }
            }
        }
        Ok(TriangularMatrix { entries })
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "identity matrix needs a positive dimension");
        let mut entries = vec![vec![ZERO; dim]; dim];
        for (r, row) in entries.iter_mut().enumerate() {
            row[r] = ONE;
        }
        TriangularMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r][c]
    }

    /// Invertible exactly when no diagonal entry vanishes.
    pub fn is_invertible(&self) -> bool {
        (0..self.dim()).all(|i| self.entries[i][i] != ZERO)
    }

    /// Matrix product `self * other` (both upper triangular, same dimension).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let dim = self.dim();
        if other.dim() != dim {
            return Err(Error::LengthMismatch(dim, other.dim()));
        }
        let mut entries = vec![vec![ZERO; dim]; dim];
        for r in 0..dim {
            for c in r..dim {
                let mut acc = ZERO;
                for k in r..=c {
                    acc += self.entries[r][k] * other.entries[k][c];
                }
                entries[r][c] = acc;
            }
        }
        Ok(TriangularMatrix { entries })
    }

    /// Applies the matrix to a descending coefficient array whose entries may
    /// be scalars or sequences.  Exact zero entries are skipped, so padding
    /// zeros pass through without roundoff.
    pub fn apply<C: Coeff>(&self, arr: &[C]) -> Result<Vec<C>> {
        let dim = self.dim();
        if arr.len() != dim {
            return Err(Error::LengthMismatch(arr.len(), dim));
        }
        let mut out = Vec::with_capacity(dim);
        for r in 0..dim {
            let mut acc = C::zero();
            for c in r..dim {
                if self.entries[r][c] != ZERO && !arr[c].vanishes() {
                    acc = acc.add(&arr[c].scale(self.entries[r][c]));
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Inverse by back substitution, one column at a time.
    pub fn inverse(&self) -> Result<Self> {
        let dim = self.dim();
        for r in 0..dim {
            if self.entries[r][r] == ZERO {
                return Err(Error::SingularMatrix(r));
            }
        }
        let mut inv = vec![vec![ZERO; dim]; dim];
        for c in 0..dim {
            inv[c][c] = ONE / self.entries[c][c];
            for r in (0..c).rev() {
                let mut acc = ZERO;
                for k in r + 1..=c {
                    acc += self.entries[r][k] * inv[k][c];
                }
                inv[r][c] = -acc / self.entries[r][r];
            }
        }
        Ok(TriangularMatrix { entries: inv })
    }

    /// The leading `k x k` block (the action induced on the top `k`
    /// coordinates when the bottom ones are padding zeros).
    pub fn top_block(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return Err(Error::LengthMismatch(self.dim(), k));
        }
        Ok(TriangularMatrix {
            entries: self.entries[..k]
                .iter()
                .map(|row| row[..k].to_vec())
                .collect(),
        })
    }

    /// Largest entrywise difference (same dimension required).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "comparing matrices of different sizes");
        let mut worst = 0.0f64;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).norm());
            }
        }
        worst
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }
}

/// The matrix transporting descending coefficient arrays through the
/// reparametrization `psi`: applied to `(tau_{n-1}f, ..., tau_0 f)` at the
/// value of `psi`, it returns the same data for `f o psi` at the base of
/// `psi`.  Column `c` is computed by composing the monomial of degree
/// `n - 1 - c` with `psi`, so every entry is a finite chain-rule partition
/// sum; the diagonal carries the powers of `psi'`.
pub fn fdb_matrix(psi: &Jet<Complex64>, n: usize) -> Result<TriangularMatrix> {
    if n == 0 {
        return Err(Error::LengthMismatch(0, 1));
    }
    if psi.order() < n {
        return Err(Error::InsufficientOrder {
            have: psi.order(),
            need: n,
        });
    }
    let w0 = *psi.value();
    let psi_t = psi.truncate(n - 1);
    let mut entries = vec![vec![ZERO; n]; n];
    for d in 0..n {
        let col = jet::compose(&Jet::monomial(w0, d, n - 1), &psi_t)?;
        for out in d..n {
            entries[n - 1 - out][n - 1 - d] = *col.coeff(out);
        }
    }
    TriangularMatrix::new(entries)
}

/// The upper triangular Toeplitz matrix realizing multiplication by the
/// scalar jet `l` on descending coefficient arrays: entry `(r, c)` is
/// `tau_{c-r}(l)`, so the action reproduces the Cauchy product
/// `tau_k(l f) = sum_{i <= k} tau_{k-i}(l) tau_i(f)`.
pub fn leibniz_matrix(l: &Jet<Complex64>, n: usize) -> Result<TriangularMatrix> {
    if n == 0 {
        return Err(Error::LengthMismatch(0, 1));
    }
    if l.order() + 1 < n {
        return Err(Error::InsufficientOrder {
            have: l.order(),
            need: n - 1,
        });
    }
    let mut entries = vec![vec![ZERO; n]; n];
    for r in 0..n {
        for c in r..n {
            entries[r][c] = *l.coeff(c - r);
        }
    }
    TriangularMatrix::new(entries)
}

/// Compositional inverse of a jet with nonvanishing first coefficient: the
/// returned jet `phi` is based at the value of `psi`, takes the base of
/// `psi` as its value, and satisfies `phi o psi = identity` up to the shared
/// truncation order.  Solved triangularly against the powers of
/// `psi - psi(base)`.
pub fn series_reversion(psi: &Jet<Complex64>) -> Result<Jet<Complex64>> {
    let n = psi.order();
    if n < 1 {
        return Err(Error::InsufficientOrder { have: 0, need: 1 });
    }
    if psi.coeff(1).vanishes() {
        return Err(Error::NotSimpleZero);
    }
    let mut sigma_coeffs = psi.coeffs().to_vec();
    sigma_coeffs[0] = ZERO;
    let sigma = Jet::from_coeffs(psi.base(), sigma_coeffs);
    // pows[k - 1] holds sigma^k truncated to order n
    let mut pows = vec![sigma.clone()];
    for _ in 1..n {
        let next = jet::mul(&sigma, pows.last().unwrap())?;
        pows.push(next);
    }
    let mut b = vec![ZERO; n + 1];
    b[0] = psi.base();
    for m in 1..=n {
        let mut acc = if m == 1 { ONE } else { ZERO };
        for k in 1..m {
            acc -= b[k] * pows[k - 1].coeff(m);
        }
        b[m] = acc / pows[m - 1].coeff(m);
    }
    Ok(Jet::from_coeffs(*psi.value(), b))
}

/// Rectangular grid of sequences in display orientation: row 0 is the top
/// row (highest outer order), column 0 the left column (highest inner
/// order).
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialArray {
    cells: Vec<Vec<FiniteSequence>>,
}

impl BinomialArray {
    /// Wraps a nonempty rectangular grid of cells.
    pub fn new(cells: Vec<Vec<FiniteSequence>>) -> Result<Self> {
        if cells.is_empty() || cells[0].is_empty() {
            return Err(Error::LengthMismatch(0, 1));
        }
        let cols = cells[0].len();
        for row in &cells {
            if row.len() != cols {
                return Err(Error::LengthMismatch(row.len(), cols));
            }
        }
        Ok(BinomialArray { cells })
    }

    pub fn zero(rows: usize, cols: usize) -> Result<Self> {
        Self::new(vec![vec![FiniteSequence::zero(); cols]; rows])
    }

    /// Grid whose row `r` is the given descending array and whose other
    /// cells vanish.
    pub fn with_row(rows: usize, cols: usize, r: usize, entries: &[FiniteSequence]) -> Result<Self> {
        if r >= rows {
            return Err(Error::LengthMismatch(r, rows));
        }
        if entries.len() != cols {
            return Err(Error::LengthMismatch(entries.len(), cols));
        }
        let mut grid = Self::zero(rows, cols)?;
        grid.cells[r] = entries.to_vec();
        Ok(grid)
    }

    /// Grid whose column `c` is the given descending array and whose other
    /// cells vanish.
    pub fn with_col(rows: usize, cols: usize, c: usize, entries: &[FiniteSequence]) -> Result<Self> {
        if c >= cols {
            return Err(Error::LengthMismatch(c, cols));
        }
        if entries.len() != rows {
            return Err(Error::LengthMismatch(entries.len(), rows));
        }
        let mut grid = Self::zero(rows, cols)?;
        for (r, e) in entries.iter().enumerate() {
            grid.cells[r][c] = e.clone();
        }
        Ok(grid)
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells[0].len()
    }

    pub fn cell(&self, r: usize, c: usize) -> &FiniteSequence {
        &self.cells[r][c]
    }

    /// Cell addressed by derivative orders: `i` counts the outer (row)
    /// order from the bottom, `j` the inner (column) order from the right.
    pub fn by_orders(&self, i: usize, j: usize) -> &FiniteSequence {
        self.cell(self.rows() - 1 - i, self.cols() - 1 - j)
    }

    pub fn row(&self, r: usize) -> Vec<FiniteSequence> {
        self.cells[r].clone()
    }

    pub fn col(&self, c: usize) -> Vec<FiniteSequence> {
        self.cells.iter().map(|row| row[c].clone()).collect()
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
        if self.rows() != other.rows() {
            return Err(Error::LengthMismatch(self.rows(), other.rows()));
        }
        if self.cols() != other.cols() {
            return Err(Error::LengthMismatch(self.cols(), other.cols()));
        }
        Ok(BinomialArray {
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| op(x, y)).collect())
                .collect(),
        })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        BinomialArray {
            cells: self
                .cells
                .iter()
                .map(|row| row.iter().map(|c| c.scale(k)).collect())
                .collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(Complex64::new(k, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.cells
            .iter()
            .all(|row| row.iter().all(FiniteSequence::is_zero))
    }

    pub fn sup_entry_magnitude(&self) -> f64 {
        self.cells
            .iter()
            .flatten()
            .map(FiniteSequence::linf_norm)
            .fold(0.0, f64::max)
    }

    /// Largest cellwise difference (same shape required).
    pub fn sup_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rows(), other.rows(), "comparing grids of different shapes");
        assert_eq!(self.cols(), other.cols(), "comparing grids of different shapes");
        self.cells
            .iter()
            .zip(&other.cells)
            .flat_map(|(a, b)| a.iter().zip(b))
            .map(|(x, y)| x.sub(y).linf_norm())
            .fold(0.0, f64::max)
    }
}

/// Exact binomial coefficient as a float (arguments stay far below any
/// precision loss).
fn binomial(a: usize, b: usize) -> f64 {
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for t in 1..=b {
        acc = acc * (a - b + t) as u128 / t as u128;
    }
    acc as f64
}

/// Spreads a descending array of length `m + n - 1` over an `n x m` grid:
/// the cell of orders `(i, j)` holds `C(i+j, i)` times the degree `i + j`
/// coordinate.  Each anti-diagonal repeats one coordinate with binomial
/// weights, so the top-left cell carries the top coordinate `C(m+n-2, n-1)`
/// times and the bottom-right cell is the bottom coordinate itself.
pub fn binomial_embed(x: &RochbergVector, m: usize, n: usize) -> Result<BinomialArray> {
    if m == 0 || n == 0 {
        return Err(Error::LengthMismatch(m.min(n), 1));
    }
    if x.len() != m + n - 1 {
        return Err(Error::LengthMismatch(x.len(), m + n - 1));
    }
    let mut cells = Vec::with_capacity(n);
    for r in 0..n {
        let i = n - 1 - r;
        let mut row = Vec::with_capacity(m);
        for c in 0..m {
            let j = m - 1 - c;
            row.push(x.by_degree(i + j).scale_real(binomial(i + j, i)));
        }
        cells.push(row);
    }
    BinomialArray::new(cells)
}

/// Assembles a two-row grid from a length `m` array `y` (defined up to its
/// top coordinate) and a length `m + 1` array `z`: the top row receives `m`
/// copies of `y`, and the binomial spread of `z` minus the bottom-padded `y`
/// is added on top.  Inverse of [`grid_to_pair`].
pub fn pair_to_grid(y: &RochbergVector, z: &RochbergVector) -> Result<BinomialArray> {
    let m = y.len();
    if z.len() != m + 1 {
        return Err(Error::LengthMismatch(z.len(), m + 1));
    }
    let diff = z.sub(&y.pad_below(1))?;
    let spread = binomial_embed(&diff, m, 2)?;
    BinomialArray::with_row(2, m, 0, y.coords())?
        .scale_real(m as f64)
        .add(&spread)
}

/// Splits a two-row grid back into the pair `(y, z)`: the bottom row fixes
/// `z` below its top coordinate, the top row then determines `y` (choosing
/// the representative whose spread difference has vanishing top
/// coordinate), and the top coordinate of `z` closes the loop.  Exact
/// two-sided inverse of [`pair_to_grid`] on grids; on pairs it recovers `z`
/// completely and `y` except for its top coordinate, which lands on the top
/// coordinate of `z`.
pub fn grid_to_pair(w: &BinomialArray, theta: f64) -> Result<(RochbergVector, RochbergVector)> {
    if w.rows() != 2 {
        return Err(Error::LengthMismatch(w.rows(), 2));
    }
    let m = w.cols();
    let minv = 1.0 / m as f64;
    let mut y_desc = Vec::with_capacity(m);
    for r in 0..m {
        let j = m - 1 - r;
        let u = w.by_orders(1, j);
        let yj = if j == m - 1 {
            u.scale_real(minv)
        } else {
            u.sub(&w.by_orders(0, j + 1).scale_real((j + 1) as f64))
                .scale_real(minv)
        };
        y_desc.push(yj);
    }
    let y = RochbergVector::new(y_desc, theta)?;
    let mut z_desc = Vec::with_capacity(m + 1);
    z_desc.push(y.by_degree(m - 1).clone());
    for t in (1..m).rev() {
        z_desc.push(w.by_orders(0, t).add(y.by_degree(t - 1)));
    }
    z_desc.push(w.by_orders(0, 0).clone());
    let z = RochbergVector::new(z_desc, theta)?;
    Ok((y, z))
}

/// Derivative coefficient array of the extremal expansion through `x`: the
/// degree `d` output is `(d+1)` times the degree `d+1` coefficient, so the
/// bottom `n - 1` coordinates are weighted shifts of `x` itself and only the
/// top one consults the extremal continuation.
pub fn derivative_array(x: &RochbergVector) -> Result<RochbergVector> {
    let n = x.len();
    let continuation = rochberg::omega_kn(x, 1)?;
    let mut coords = Vec::with_capacity(n);
    coords.push(continuation.by_degree(0).scale_real(n as f64));
    for d in (1..n).rev() {
        coords.push(x.by_degree(d).scale_real(d as f64));
    }
    RochbergVector::new(coords, x.theta())
}

/// Families of structural identities exercised by [`diagram_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramKind {
    /// Padding and projection: nested inclusions collapse, nested
    /// projections collapse, the mixed square commutes, and projecting onto
    /// the padded slots gives zero.
    Poz,
    /// Two-row grids: bottom-slot inputs spread to `m` times the top-row
    /// embedding, the bottom row of a spread is the bottom projection, and
    /// the slot embedding one notch above the bottom factors through the
    /// bottom row as the plain bottom-slot inclusion.
    Fm2,
    /// Two-column grids: the transposed analogues of [`DiagramKind::Fm2`],
    /// with the left column carrying the weighted shift.
    F2m,
    /// Reparametrization transport: the transport matrix commutes with
    /// bottom projections, kills padded inputs into the bottom block, and
    /// acts on padded inputs through its leading block.
    FuGz,
    /// Pairing transposes: padding a functional matches projecting the
    /// paired array and vice versa.
    Tn,
}

impl DiagramKind {
    pub fn all() -> [DiagramKind; 5] {
        [
            DiagramKind::Poz,
            DiagramKind::Fm2,
            DiagramKind::F2m,
            DiagramKind::FuGz,
            DiagramKind::Tn,
        ]
    }

    /// Short code used by the command-line runner.
    pub fn code(&self) -> &'static str {
        match self {
            DiagramKind::Poz => "poz",
            DiagramKind::Fm2 => "Fm2",
            DiagramKind::F2m => "F2m",
            DiagramKind::FuGz => "FuGz",
            DiagramKind::Tn => "Tn",
        }
    }

    pub fn parse(code: &str) -> Option<DiagramKind> {
        DiagramKind::all().into_iter().find(|k| k.code() == code)
    }
}

/// Outcome of a sampled commutativity check: the largest residual over all
/// path comparisons on all sampled inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramReport {
    pub which: &'static str,
    pub samples: usize,
    pub checks: usize,
    pub max_residual: f64,
}

fn sample_rng(seed: u64, t: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(TRIAL_MIX))
}

fn random_slope_jet<R: Rng>(
    rng: &mut R,
    base: Complex64,
    value: Complex64,
    order: usize,
) -> Jet<Complex64> {
    let mut coeffs = vec![ZERO; order + 1];
    coeffs[0] = value;
    let arg = rng.gen_range(0.0..std::f64::consts::TAU);
    let rad = rng.gen_range(0.5..1.5);
    coeffs[1] = Complex64::from_polar(rad, arg);
    for c in coeffs.iter_mut().skip(2) {
        *c = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    }
    Jet::from_coeffs(base, coeffs)
}

fn random_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    Complex64::new(
        rng.gen_range(-radius..radius),
        rng.gen_range(-radius..radius),
    )
}

fn poz_residuals(t: usize, seed: u64) -> Vec<f64> {
    // (n, j, k): include a length-j array into length n, then into
    // length m = n + k, project back down to i = m - j and to k
    let shapes = [(2usize, 1usize, 1usize), (3, 1, 1), (3, 2, 1), (2, 1, 2)];
    let (n, j, k) = shapes[t % shapes.len()];
    let m = n + k;
    let i = m - j;
    let theta = 0.5;
    let mut rng = sample_rng(seed, t);
    let w = RochbergVector::random(&mut rng, j, theta, 12, 6).unwrap();
    let x = RochbergVector::random(&mut rng, n, theta, 12, 6).unwrap();
    let v = RochbergVector::random(&mut rng, m, theta, 12, 6).unwrap();
    vec![
        // nested inclusions collapse to one
        w.pad_below(n - j)
            .pad_below(m - n)
            .sup_diff(&w.pad_below(m - j)),
        // nested projections collapse to one
        v.take_bottom(i)
            .unwrap()
            .take_bottom(k)
            .unwrap()
            .sup_diff(&v.take_bottom(k).unwrap()),
        // projecting an included array = including the projected array
        x.pad_below(m - n)
            .take_bottom(i)
            .unwrap()
            .sup_diff(&x.take_bottom(n - j).unwrap().pad_below(m - n)),
        // the projection annihilates exactly the padded slots
        w.pad_below(n - j)
            .take_bottom(n - j)
            .unwrap()
            .sup_entry_magnitude(),
    ]
}

fn fm2_residuals(t: usize, seed: u64) -> Vec<f64> {
    let m = 2 + t % 3;
    let theta = 0.5;
    let mut rng = sample_rng(seed, t);
    let x = FiniteSequence::random(&mut rng, 12, 6);
    let single = RochbergVector::singleton(x.clone(), theta).unwrap();
    let mut out = Vec::new();
    // bottom-slot input: both paths give m*x in the top-left cell
    let through = binomial_embed(&single.pad_below(m), m, 2).unwrap();
    let direct = BinomialArray::with_row(2, m, 0, single.pad_below(m - 1).coords())
        .unwrap()
        .scale_real(m as f64);
    out.push(through.sup_diff(&direct));
    // and its bottom row vanishes
    out.push(
        RochbergVector::new(through.row(1), theta)
            .unwrap()
            .sup_entry_magnitude(),
    );
    // bottom row of a spread = bottom projection
    let v = RochbergVector::random(&mut rng, m + 1, theta, 12, 6).unwrap();
    let grid = binomial_embed(&v, m, 2).unwrap();
    out.push(
        RochbergVector::new(grid.row(1), theta)
            .unwrap()
            .sup_diff(&v.take_bottom(m).unwrap()),
    );
    // slot embedding one notch above the bottom factors through the bottom
    // row as the plain bottom-slot inclusion
    let mut slot = vec![FiniteSequence::zero(); m + 1];
    slot[1] = x;
    let sigma = RochbergVector::new(slot, theta).unwrap();
    out.push(
        RochbergVector::new(binomial_embed(&sigma, m, 2).unwrap().row(1), theta)
            .unwrap()
            .sup_diff(&single.pad_below(m - 1)),
    );
    out
}

fn f2m_residuals(t: usize, seed: u64) -> Vec<f64> {
    let m = 2 + t % 3;
    let theta = 0.5;
    let mut rng = sample_rng(seed, t);
    let x = FiniteSequence::random(&mut rng, 12, 6);
    let single = RochbergVector::singleton(x, theta).unwrap();
    let mut out = Vec::new();
    // bottom-slot input: both paths give m*x in the top-left cell
    let through = binomial_embed(&single.pad_below(m), 2, m).unwrap();
    let direct = BinomialArray::with_col(m, 2, 0, single.pad_below(m - 1).coords())
        .unwrap()
        .scale_real(m as f64);
    out.push(through.sup_diff(&direct));
    // right column of a spread = bottom projection
    let v = RochbergVector::random(&mut rng, m + 1, theta, 12, 6).unwrap();
    let grid = binomial_embed(&v, 2, m).unwrap();
    out.push(
        RochbergVector::new(grid.col(1), theta)
            .unwrap()
            .sup_diff(&v.take_bottom(m).unwrap()),
    );
    // left column carries the weighted shift (i+1) * degree i+1
    let expected: Vec<FiniteSequence> = (0..m)
        .map(|r| {
            let i = m - 1 - r;
            v.by_degree(i + 1).scale_real((i + 1) as f64)
        })
        .collect();
    out.push(
        RochbergVector::new(grid.col(0), theta)
            .unwrap()
            .sup_diff(&RochbergVector::new(expected, theta).unwrap()),
    );
    out
}

fn fugz_residuals(t: usize, seed: u64) -> Vec<f64> {
    let n = 1 + t % 3;
    let k = 1 + (t / 3) % 3;
    let mut rng = sample_rng(seed, t);
    let z0 = random_point(&mut rng, 0.7);
    let w0 = random_point(&mut rng, 0.7);
    let psi = random_slope_jet(&mut rng, z0, w0, n + k);
    let big = fdb_matrix(&psi, n + k).unwrap();
    let small = fdb_matrix(&psi, n).unwrap();
    let coords: Vec<FiniteSequence> = (0..n + k)
        .map(|_| FiniteSequence::random(&mut rng, 10, 5))
        .collect();
    let full = big.apply(&coords).unwrap();
    let bottom = small.apply(&coords[k..]).unwrap();
    let mut out = Vec::new();
    // transporting then projecting = projecting then transporting
    out.push(
        full[k..]
            .iter()
            .zip(&bottom)
            .map(|(a, b)| a.sub(b).linf_norm())
            .fold(0.0, f64::max),
    );
    // padded inputs die in the bottom block ...
    let mut padded: Vec<FiniteSequence> = (0..k)
        .map(|_| FiniteSequence::random(&mut rng, 10, 5))
        .collect();
    let top_data = padded.clone();
    padded.extend(std::iter::repeat_with(FiniteSequence::zero).take(n));
    let lifted = big.apply(&padded).unwrap();
    out.push(
        lifted[k..]
            .iter()
            .map(FiniteSequence::linf_norm)
            .fold(0.0, f64::max),
    );
    // ... and are moved by the leading block alone
    let induced = big.top_block(k).unwrap().apply(&top_data).unwrap();
    out.push(
        lifted[..k]
            .iter()
            .zip(&induced)
            .map(|(a, b)| a.sub(b).linf_norm())
            .fold(0.0, f64::max),
    );
    out
}

fn tn_residuals(t: usize, seed: u64) -> Vec<f64> {
    let n = 1 + t % 3;
    let k = 1 + (t / 3) % 3;
    let theta = [0.3, 0.5, 0.7][t % 3];
    let mut rng = sample_rng(seed, t);
    let xi = DualVector::random(&mut rng, n, theta, 10, 5).unwrap();
    let x = RochbergVector::random(&mut rng, n + k, theta, 10, 5).unwrap();
    let lhs = duality::t_n_pair(&xi.pad_below(k), &x).unwrap();
    let rhs = duality::t_n_pair(&xi, &x.take_bottom(n).unwrap()).unwrap();
    let xi_long = DualVector::random(&mut rng, n + k, theta, 10, 5).unwrap();
    let x_short = RochbergVector::random(&mut rng, k, theta, 10, 5).unwrap();
    let lhs2 = duality::t_n_pair(&xi_long.take_bottom(k).unwrap(), &x_short).unwrap();
    let rhs2 = duality::t_n_pair(&xi_long, &x_short.pad_below(n)).unwrap();
    vec![(lhs - rhs).norm(), (lhs2 - rhs2).norm()]
}

/// Evaluates both path compositions of every square in the chosen family on
/// seeded random inputs and reports the largest residual.  All five families
/// commute exactly, so any residual beyond roundoff indicates a defect.
pub fn diagram_check(which: DiagramKind, samples: usize, seed: u64) -> DiagramReport {
    let residuals: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|t| match which {
            DiagramKind::Poz => poz_residuals(t, seed),
            DiagramKind::Fm2 => fm2_residuals(t, seed),
            DiagramKind::F2m => f2m_residuals(t, seed),
            DiagramKind::FuGz => fugz_residuals(t, seed),
            DiagramKind::Tn => tn_residuals(t, seed),
        })
        .collect();
    let checks = residuals.iter().map(Vec::len).sum();
    let max_residual = residuals
        .iter()
        .flatten()
        .copied()
        .fold(0.0, f64::max);
    DiagramReport {
        which: which.code(),
        samples,
        checks,
        max_residual,
    }
}

/// Max residual of the transport identity `M . tau(f) = tau(f o psi)` over
/// seeded random jet pairs of order up to `max_order`.
pub fn chain_rule_residual(trials: usize, max_order: usize, seed: u64) -> f64 {
    assert!(max_order >= 1);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sample_rng(seed, t);
            let n = 1 + t % max_order;
            let z0 = random_point(&mut rng, 0.7);
            let w0 = random_point(&mut rng, 0.7);
            let psi = random_slope_jet(&mut rng, z0, w0, n);
            let f_coeffs: Vec<Complex64> = (0..n).map(|_| random_point(&mut rng, 1.0)).collect();
            let f = Jet::from_coeffs(w0, f_coeffs);
            let matrix_side = fdb_matrix(&psi, n)
                .unwrap()
                .apply(&f.tau_extract(n, 0).unwrap())
                .unwrap();
            let composed = jet::compose(&f, &psi.truncate(n - 1)).unwrap();
            let direct = composed.tau_extract(n, 0).unwrap();
            matrix_side
                .iter()
                .zip(&direct)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Max difference between the inverse transport matrix and the transport
/// matrix of the reverted jet, over seeded random reparametrizations.
pub fn inverse_residual(trials: usize, max_order: usize, seed: u64) -> f64 {
    assert!(max_order >= 1);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sample_rng(seed, t);
            let n = 1 + t % max_order;
            let z0 = random_point(&mut rng, 0.7);
            let w0 = random_point(&mut rng, 0.7);
            let psi = random_slope_jet(&mut rng, z0, w0, n.max(1));
            let forward = fdb_matrix(&psi, n).unwrap();
            let backward = fdb_matrix(&series_reversion(&psi).unwrap(), n).unwrap();
            forward.inverse().unwrap().max_abs_diff(&backward)
        })
        .reduce(|| 0.0, f64::max)
}

/// Max residual of the Toeplitz action against the jet product, over seeded
/// random factor pairs of order up to `max_order`.
pub fn leibniz_residual(trials: usize, max_order: usize, seed: u64) -> f64 {
    assert!(max_order >= 1);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sample_rng(seed, t);
            let n = 1 + t % max_order;
            let base = random_point(&mut rng, 0.7);
            let l_coeffs: Vec<Complex64> = (0..n).map(|_| random_point(&mut rng, 1.0)).collect();
            let f_coeffs: Vec<Complex64> = (0..n).map(|_| random_point(&mut rng, 1.0)).collect();
            let l = Jet::from_coeffs(base, l_coeffs);
            let f = Jet::from_coeffs(base, f_coeffs);
            let matrix_side = leibniz_matrix(&l, n)
                .unwrap()
                .apply(&f.tau_extract(n, 0).unwrap())
                .unwrap();
            let direct = jet::mul(&l, &f).unwrap().tau_extract(n, 0).unwrap();
            matrix_side
                .iter()
                .zip(&direct)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_psi(order: usize) -> Jet<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        random_slope_jet(&mut rng, c(0.2, -0.1), c(-0.3, 0.4), order)
    }

    #[test]
    fn matrix_validation_rejects_lower_entries() {
        let bad = vec![vec![ONE, ONE], vec![ONE, ONE]];
        assert_eq!(
            TriangularMatrix::new(bad),
            Err(Error::NotTriangular(1, 0))
        );
        let ragged = vec![vec![ONE, ONE], vec![ZERO]];
        assert_eq!(
            TriangularMatrix::new(ragged),
            Err(Error::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn identity_matrix_fixes_arrays() {
        let id = TriangularMatrix::identity(4);
        let arr: Vec<Complex64> = (0..4).map(|k| c(k as f64, -1.0)).collect();
        assert_eq!(id.apply(&arr).unwrap(), arr);
        assert!(id.is_invertible());
    }

    #[test]
    fn first_order_transport_scales_the_top_coordinate() {
        let psi = test_psi(3);
        let m = fdb_matrix(&psi, 2).unwrap();
        assert_eq!(m.entry(0, 0), *psi.coeff(1));
        assert_eq!(m.entry(0, 1), ZERO);
        assert_eq!(m.entry(1, 0), ZERO);
        assert_eq!(m.entry(1, 1), ONE);
    }

    #[test]
    fn identity_reparametrization_gives_identity_matrix() {
        let psi = Jet::identity(c(0.3, 0.2), 5);
        for n in 1..=5 {
            let m = fdb_matrix(&psi, n).unwrap();
            assert_eq!(m, TriangularMatrix::identity(n), "order {n}");
        }
    }

    #[test]
    fn second_order_transport_row() {
        let psi = test_psi(4);
        let p1 = *psi.coeff(1);
        let p2 = *psi.coeff(2);
        let m = fdb_matrix(&psi, 3).unwrap();
        assert_eq!(m.entry(0, 0), p1 * p1);
        assert_eq!(m.entry(0, 1), p2);
        assert_eq!(m.entry(0, 2), ZERO);
        assert_eq!(m.entry(1, 1), p1);
        assert_eq!(m.entry(2, 2), ONE);
    }

    #[test]
    fn transport_requires_enough_order() {
        let psi = test_psi(2);
        assert_eq!(
            fdb_matrix(&psi, 3),
            Err(Error::InsufficientOrder { have: 2, need: 3 })
        );
        assert_eq!(fdb_matrix(&psi, 0), Err(Error::LengthMismatch(0, 1)));
    }

    #[test]
    fn chain_rule_matches_direct_composition() {
        assert!(chain_rule_residual(100, 6, 7) <= 1e-10);
    }

    #[test]
    fn transport_of_nested_reparametrizations_is_the_matrix_product() {
        // f o (psi o chi) transports by M(chi) * M(psi)
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in 1..=5 {
            let z0 = random_point(&mut rng, 0.5);
            let w0 = random_point(&mut rng, 0.5);
            let v0 = random_point(&mut rng, 0.5);
            let chi = random_slope_jet(&mut rng, z0, w0, n);
            let psi = random_slope_jet(&mut rng, w0, v0, n);
            let nested = jet::compose(&psi, &chi).unwrap();
            // nested has order n, which suffices for an n x n matrix
            let lhs = fdb_matrix(&nested, n).unwrap();
            let rhs = fdb_matrix(&chi, n)
                .unwrap()
                .mul(&fdb_matrix(&psi, n).unwrap())
                .unwrap();
            let scale = 1.0 + rhs.max_abs_entry();
            assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale, "order {n}");
        }
    }

    #[test]
    fn reversion_round_trips_through_composition() {
        let psi = test_psi(6);
        let rev = series_reversion(&psi).unwrap();
        let round = jet::compose(&rev, &psi).unwrap();
        let id = Jet::identity(psi.base(), 6);
        assert!(jet::max_coeff_diff(&round, &id) <= 1e-12);
        assert_eq!(rev.base(), *psi.value());
        assert_eq!(*rev.value(), psi.base());
    }

    #[test]
    fn reversion_requires_nonvanishing_slope() {
        let flat = Jet::from_coeffs(c(0.0, 0.0), vec![c(1.0, 0.0), ZERO, ONE]);
        assert_eq!(series_reversion(&flat), Err(Error::NotSimpleZero));
        let constant = Jet::constant(c(0.0, 0.0), c(1.0, 0.0), 0);
        assert_eq!(
            series_reversion(&constant),
            Err(Error::InsufficientOrder { have: 0, need: 1 })
        );
    }

    #[test]
    fn inverse_matrix_agrees_with_reverted_transport() {
        assert!(inverse_residual(50, 5, 3) <= 1e-8);
    }

    #[test]
    fn inverse_is_a_two_sided_inverse() {
        let psi = test_psi(5);
        let m = fdb_matrix(&psi, 5).unwrap();
        let inv = m.inverse().unwrap();
        let id = TriangularMatrix::identity(5);
        assert!(m.mul(&inv).unwrap().max_abs_diff(&id) <= 1e-12);
        assert!(inv.mul(&m).unwrap().max_abs_diff(&id) <= 1e-12);
    }

    #[test]
    fn singular_diagonal_is_reported() {
        let l = Jet::constant(c(0.1, 0.0), ZERO, 3);
        let m = leibniz_matrix(&l, 3).unwrap();
        assert!(!m.is_invertible());
        assert_eq!(m.inverse(), Err(Error::SingularMatrix(0)));
    }

    #[test]
    fn multiplication_by_one_is_the_identity_matrix() {
        let l = Jet::constant(c(0.4, -0.2), ONE, 4);
        assert_eq!(
            leibniz_matrix(&l, 4).unwrap(),
            TriangularMatrix::identity(4)
        );
    }

    #[test]
    fn first_order_product_action() {
        let l = test_psi(3);
        let m = leibniz_matrix(&l, 2).unwrap();
        assert_eq!(m.entry(0, 0), *l.coeff(0));
        assert_eq!(m.entry(0, 1), *l.coeff(1));
        assert_eq!(m.entry(1, 1), *l.coeff(0));
        // action on (tau1 f, tau0 f)
        let f1 = c(2.0, 1.0);
        let f0 = c(-1.0, 3.0);
        let out = m.apply(&[f1, f0]).unwrap();
        assert_eq!(out[0], *l.coeff(0) * f1 + *l.coeff(1) * f0);
        assert_eq!(out[1], *l.coeff(0) * f0);
    }

    #[test]
    fn toeplitz_action_equals_jet_product() {
        assert!(leibniz_residual(100, 6, 11) <= 1e-12);
    }

    #[test]
    fn toeplitz_requires_enough_order() {
        let l = test_psi(2);
        assert_eq!(
            leibniz_matrix(&l, 4),
            Err(Error::InsufficientOrder { have: 2, need: 3 })
        );
    }

    fn labeled_array(len: usize, theta: f64) -> RochbergVector {
        // degree d carries the basis vector with index d + 1, so every cell
        // of a spread is identifiable at a glance
        let coords: Vec<FiniteSequence> = (0..len)
            .rev()
            .map(|d| FiniteSequence::basis(d as u32 + 1))
            .collect();
        RochbergVector::new(coords, theta).unwrap()
    }

    #[test]
    fn two_by_two_spread_display() {
        let x = labeled_array(3, 0.5);
        let grid = binomial_embed(&x, 2, 2).unwrap();
        assert_eq!(grid.cell(0, 0), &x.by_degree(2).scale_real(2.0));
        assert_eq!(grid.cell(0, 1), x.by_degree(1));
        assert_eq!(grid.cell(1, 0), x.by_degree(1));
        assert_eq!(grid.cell(1, 1), x.by_degree(0));
    }

    #[test]
    fn single_cell_and_top_row_spreads() {
        let x = labeled_array(1, 0.5);
        let grid = binomial_embed(&x, 1, 1).unwrap();
        assert_eq!(grid.rows(), 1);
        assert_eq!(grid.cols(), 1);
        assert_eq!(grid.cell(0, 0), x.by_degree(0));

        let y = labeled_array(4, 0.5);
        let top = binomial_embed(&y, 2, 3).unwrap();
        assert_eq!(top.cell(0, 0), &y.by_degree(3).scale_real(3.0));
        assert_eq!(top.cell(0, 1), y.by_degree(2));
    }

    #[test]
    fn spread_length_must_match() {
        let x = labeled_array(3, 0.5);
        assert_eq!(
            binomial_embed(&x, 2, 3),
            Err(Error::LengthMismatch(3, 4))
        );
        assert_eq!(binomial_embed(&x, 0, 4), Err(Error::LengthMismatch(0, 1)));
    }

    #[test]
    fn order_addressing_mirrors_display_addressing() {
        let x = labeled_array(4, 0.5);
        let grid = binomial_embed(&x, 2, 3).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(grid.by_orders(i, j), grid.cell(2 - i, 1 - j));
                assert_eq!(
                    grid.by_orders(i, j),
                    &x.by_degree(i + j).scale_real(binomial(i + j, i))
                );
            }
        }
    }

    /// Row-reduction rank with partial pivoting, for small real matrices.
    fn rank(mut m: Vec<Vec<f64>>) -> usize {
        let rows = m.len();
        let cols = m[0].len();
        let mut rank = 0;
        for col in 0..cols {
            let pivot = (rank..rows).max_by(|&a, &b| {
                m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap()
            });
            let Some(p) = pivot else { break };
            if m[p][col].abs() < 1e-9 {
                continue;
            }
            m.swap(rank, p);
            for r in 0..rows {
                if r != rank && m[r][col].abs() > 0.0 {
                    let f = m[r][col] / m[rank][col];
                    for cc in col..cols {
                        m[r][cc] -= f * m[rank][cc];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn spread_has_full_rank_on_scalarized_inputs() {
        // treating each degree slot as one scalar unknown (entries of the
        // input linearly independent), the spread matrix has full column
        // rank, so the operator is injective on such arrays
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for m in 1..=4usize {
            for n in 1..=4usize {
                let len = m + n - 1;
                let t: Vec<f64> = (0..len)
                    .map(|_| rng.gen_range(0.25..4.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 })
                    .collect();
                let mut rows = Vec::new();
                for i in 0..n {
                    for j in 0..m {
                        let mut row = vec![0.0; len];
                        row[i + j] = binomial(i + j, i) * t[i + j];
                        rows.push(row);
                    }
                }
                assert_eq!(rank(rows), len, "shape {n} x {m}");
            }
        }
    }

    #[test]
    fn grid_assembly_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=4usize {
            let y = RochbergVector::random(&mut rng, m, 0.5, 10, 5).unwrap();
            // z = bottom-padded y: the spread difference vanishes
            let grid = pair_to_grid(&y, &y.pad_below(1)).unwrap();
            let expected = BinomialArray::with_row(2, m, 0, y.coords())
                .unwrap()
                .scale_real(m as f64);
            assert_eq!(grid.sup_diff(&expected), 0.0, "m = {m}");
            // y = 0: the assembly is the plain spread
            let z = RochbergVector::random(&mut rng, m + 1, 0.5, 10, 5).unwrap();
            let zero_y = RochbergVector::zero(m, 0.5).unwrap();
            let grid2 = pair_to_grid(&zero_y, &z).unwrap();
            assert_eq!(grid2.sup_diff(&binomial_embed(&z, m, 2).unwrap()), 0.0);
        }
    }

    #[test]
    fn grid_split_then_assemble_is_the_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for m in 1..=5usize {
            for _ in 0..20 {
                let cells: Vec<Vec<FiniteSequence>> = (0..2)
                    .map(|_| (0..m).map(|_| FiniteSequence::random(&mut rng, 10, 5)).collect())
                    .collect();
                let w = BinomialArray::new(cells).unwrap();
                let (y, z) = grid_to_pair(&w, 0.5).unwrap();
                let back = pair_to_grid(&y, &z).unwrap();
                let scale = 1.0 + w.sup_entry_magnitude();
                assert!(back.sup_diff(&w) <= 1e-13 * scale, "m = {m}");
            }
        }
    }

    #[test]
    fn assemble_then_split_recovers_the_pair_up_to_the_top_slot() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for m in 1..=5usize {
            for _ in 0..20 {
                let y = RochbergVector::random(&mut rng, m, 0.5, 10, 5).unwrap();
                let z = RochbergVector::random(&mut rng, m + 1, 0.5, 10, 5).unwrap();
                let (y2, z2) = grid_to_pair(&pair_to_grid(&y, &z).unwrap(), 0.5).unwrap();
                let scale = 1.0 + y.sup_entry_magnitude() + z.sup_entry_magnitude();
                // z comes back whole
                assert!(z2.sup_diff(&z) <= 1e-13 * scale, "m = {m}");
                // y comes back below its top coordinate, whose information
                // moved into the top coordinate of z
                for d in 0..m.saturating_sub(1) {
                    assert!(
                        y2.by_degree(d).sub(y.by_degree(d)).linf_norm() <= 1e-13 * scale,
                        "m = {m}, degree {d}"
                    );
                }
                assert!(
                    y2.by_degree(m - 1).sub(z.by_degree(m)).linf_norm() <= 1e-13 * scale,
                    "m = {m}"
                );
            }
        }
    }

    #[test]
    fn grid_shape_errors() {
        let w = BinomialArray::zero(3, 2).unwrap();
        assert!(grid_to_pair(&w, 0.5).is_err());
        let y = labeled_array(2, 0.5);
        let z = labeled_array(2, 0.5);
        assert_eq!(pair_to_grid(&y, &z), Err(Error::LengthMismatch(2, 3)));
    }

    #[test]
    fn derivative_array_matches_the_extremal_continuation() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for n in 1..=4usize {
            for &theta in &[0.3, 0.5, 0.7] {
                let x = RochbergVector::random(&mut rng, n, theta, 16, 6).unwrap();
                let f = rochberg::array_extremal(&x, n).unwrap();
                let expected: Vec<FiniteSequence> = (1..=n)
                    .rev()
                    .map(|d| f.coeff(d).scale_real(d as f64))
                    .collect();
                let expected = RochbergVector::new(expected, theta).unwrap();
                let got = derivative_array(&x).unwrap();
                let scale = 1.0 + expected.sup_entry_magnitude();
                assert!(got.sup_diff(&expected) <= 1e-12 * scale, "n = {n}");
            }
        }
    }

    #[test]
    fn all_diagram_families_commute_exactly() {
        for kind in [DiagramKind::Poz, DiagramKind::Fm2, DiagramKind::F2m] {
            let report = diagram_check(kind, 24, 17);
            assert_eq!(report.max_residual, 0.0, "{}", report.which);
            assert!(report.checks >= 3 * report.samples);
        }
        // pairing and transport residuals vanish too: the extra terms on
        // the longer side are exact zeros
        let tn = diagram_check(DiagramKind::Tn, 24, 17);
        assert_eq!(tn.max_residual, 0.0);
        let fugz = diagram_check(DiagramKind::FuGz, 24, 17);
        assert_eq!(fugz.max_residual, 0.0);
    }

    #[test]
    fn diagram_reports_are_deterministic() {
        let a = diagram_check(DiagramKind::Tn, 40, 99);
        let b = diagram_check(DiagramKind::Tn, 40, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn transport_intertwines_the_extremal_continuation() {
        // transporting the full coefficient array of an extremal expansion
        // equals composing the expansion with the reparametrization and
        // reading the coefficients directly
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for &theta in &[0.3, 0.5] {
            for n in 1..=3usize {
                for k in 1..=2usize {
                    let x = RochbergVector::random(&mut rng, n, theta, 12, 5).unwrap();
                    let f = rochberg::array_extremal(&x, n + k - 1).unwrap();
                    let z0 = random_point(&mut rng, 0.4);
                    let psi =
                        random_slope_jet(&mut rng, z0, Complex64::new(theta, 0.0), n + k);
                    let g = jet::compose(&f, &psi.truncate(n + k - 1)).unwrap();
                    let direct = g.tau_extract(n + k, 0).unwrap();
                    let transported = fdb_matrix(&psi, n + k)
                        .unwrap()
                        .apply(&f.tau_extract(n + k, 0).unwrap())
                        .unwrap();
                    let scale = 1.0
                        + direct
                            .iter()
                            .map(FiniteSequence::linf_norm)
                            .fold(0.0, f64::max);
                    let worst = direct
                        .iter()
                        .zip(&transported)
                        .map(|(a, b)| a.sub(b).linf_norm())
                        .fold(0.0, f64::max);
                    assert!(worst <= 1e-10 * scale, "theta {theta}, n {n}, k {k}");
                    // the bottom block transports the original array data
                    let y = fdb_matrix(&psi, n).unwrap().apply(x.coords()).unwrap();
                    let bottom_worst = direct[k..]
                        .iter()
                        .zip(&y)
                        .map(|(a, b)| a.sub(b).linf_norm())
                        .fold(0.0, f64::max);
                    assert!(bottom_worst <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn apply_checks_lengths() {
        let id = TriangularMatrix::identity(3);
        let arr = vec![ONE; 2];
        assert_eq!(id.apply(&arr), Err(Error::LengthMismatch(2, 3)));
        assert_eq!(
            id.top_block(0).unwrap_err(),
            Error::LengthMismatch(3, 0)
        );
        assert_eq!(id.top_block(2).unwrap().dim(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn transport_is_linear_in_the_array(seed in 0u64..1u64 << 48) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 1 + (seed % 4) as usize;
            let z0 = random_point(&mut rng, 0.6);
            let w0 = random_point(&mut rng, 0.6);
            let psi = random_slope_jet(&mut rng, z0, w0, n);
            let m = fdb_matrix(&psi, n).unwrap();
            let a: Vec<Complex64> = (0..n).map(|_| random_point(&mut rng, 1.0)).collect();
            let b: Vec<Complex64> = (0..n).map(|_| random_point(&mut rng, 1.0)).collect();
            let sum: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let lhs = m.apply(&sum).unwrap();
            let ra = m.apply(&a).unwrap();
            let rb = m.apply(&b).unwrap();
            let worst = lhs
                .iter()
                .zip(ra.iter().zip(&rb))
                .map(|(s, (x, y))| (s - (x + y)).norm())
                .fold(0.0, f64::max);
            prop_assert!(worst <= 1e-12 * (1.0 + m.max_abs_entry()));
        }

        #[test]
        fn spread_is_homogeneous(seed in 0u64..1u64 << 48, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = 1 + (seed % 3) as usize;
            let n = 1 + ((seed >> 8) % 3) as usize;
            let x = RochbergVector::random(&mut rng, m + n - 1, 0.5, 10, 5).unwrap();
            let k = Complex64::new(re, im);
            let lhs = binomial_embed(&x.scale(k), m, n).unwrap();
            let rhs = binomial_embed(&x, m, n).unwrap().scale(k);
            let scale = 1.0 + rhs.sup_entry_magnitude();
            prop_assert!(lhs.sup_diff(&rhs) <= 1e-13 * scale);
        }
    }
}
