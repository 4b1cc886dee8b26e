//! Numerical laboratory for the derived spaces of the scale generated by
//! complex interpolation between l-infinity and l-1.
//!
//! The library works with three layers of objects:
//!
//! * finitely supported complex sequences ([`seq::FiniteSequence`]) and their
//!   p-(quasi)norms,
//! * truncated Taylor expansions of analytic functions, scalar- or
//!   sequence-valued ([`jet::Jet`]), together with the algebra needed to
//!   manipulate them (products, composition, division by a simple zero,
//!   exp/log/power),
//! * derived-space arrays ([`rochberg::RochbergVector`]) built from
//!   consecutive Taylor coefficients of extremal selections, with the induced
//!   twisted-sum quasinorms, their differentials, duality pairings, sign-average
//!   type-2 experiments, reparametrization matrices and the radial-weight
//!   counterexample family.
//!
//! Everything is finite-dimensional and exact up to floating-point roundoff;
//! each module's tests pin the computable identities against independent
//! oracles (series division, partition sums, divided differences, brute-force
//! enumeration).

pub mod algebra;
pub mod duality;
pub mod jet;
pub mod reparam;
pub mod rochberg;
pub mod seq;
pub mod type2;
pub mod zomega;

pub use num_complex::Complex64;

/// Errors shared across the laboratory's modules.
///
/// Every fallible operation reports which structural precondition failed;
/// numerical overflow is not treated as an error (IEEE infinities propagate).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An operation that normalizes by a norm received the zero vector.
    #[error("operation undefined on the zero vector")]
    ZeroVector,
    /// A p-norm was requested for an exponent outside (0, infinity].
    #[error("invalid exponent p = {0}; need 0 < p <= infinity")]
    InvalidExponent(f64),
    /// Two jets that must share a base point do not.
    #[error("jet base mismatch: {0} vs {1}")]
    BaseMismatch(Complex64, Complex64),
    /// A jet had lower order than the operation requires.
    #[error("jet order {have} too small, need at least {need}")]
    InsufficientOrder { have: usize, need: usize },
    /// Division [`jet::div_zero`] requires a divisor with a simple zero.
    #[error("divisor must vanish to exactly first order at the base point")]
    NotSimpleZero,
    /// Division [`jet::div_zero`] requires a dividend vanishing at the base.
    #[error("dividend must vanish at the base point")]
    NonVanishingDividend,
    /// Logarithm or fractional power of a jet with vanishing constant term.
    #[error("log/power undefined for a jet with vanishing constant term")]
    VanishingConstantTerm,
    /// Array lengths incompatible with the requested operation.
    #[error("array length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    /// A base-point parameter left its admissible open interval.
    #[error("parameter {name} = {value} outside ({lo}, {hi})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    /// Matrix inversion met a (numerically) vanishing diagonal entry.
    #[error("triangular matrix is singular: diagonal entry {0} vanishes")]
    SingularMatrix(usize),
    /// An upper-triangular matrix was handed a nonzero entry below the
    /// diagonal.
    #[error("matrix entry ({0}, {1}) below the diagonal is nonzero")]
    NotTriangular(usize, usize),
    /// The sign-average experiment received an empty or all-zero tuple.
    #[error("sign-average experiment needs a tuple with a nonzero entry")]
    DegenerateTuple,
}

pub type Result<T> = std::result::Result<T, Error>;
