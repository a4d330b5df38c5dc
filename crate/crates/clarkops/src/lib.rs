//! Clark theory for row contractions on the Drury-Arveson space.
//!
//! The crate models a polynomial Schur multiplier `b` from the unit ball of
//! `C^d` into `n x m` matrices, its de Branges-Rovnyak space `K(b)`, the Herglotz
//! space `L(b)` with its canonical partial isometry `V`, the Gleason solutions
//! attached to `b`, and the classical one-variable Clark picture.
//!
//! Infinite-dimensional objects are handled through finite representations whose
//! limitations are stated next to every operation that uses them.

pub mod classical;
pub mod clark;
pub mod examples;
pub mod gleason;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod series;
pub mod span;

pub use num_complex::Complex64 as C64;

/// Errors raised by the numerical routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not purely contractive at the point: ||b(z)|| = {norm}")]
    NotPurelyContractive { norm: f64 },
    #[error("cross-check failed for {what}: discrepancy {value:e} exceeds {tol:e}")]
    CrossCheck { what: String, value: f64, tol: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not inner: defect {defect:e} exceeds {tol:e}")]
    NotInner { defect: f64, tol: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for a real number as a complex scalar.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
