//! Spectral tools for Hardy-space computations on the unit circle.
//!
//! The crate is organized in four layers:
//!
//! * [`circle_fft`] — sampling on a half-offset boundary grid, FFT-based
//!   Fourier analysis/synthesis, the analytic (Riesz) projection, the
//!   Herglotz transform, and outer-function construction from a boundary
//!   modulus.
//! * [`functions`] — structured inner and outer functions: monomials,
//!   finite Blaschke products, fractional powers of `1 - z`, Cauchy
//!   kernels, model-space bases, and real boundary quotients of inner
//!   functions.
//! * [`toeplitz`] — truncated Toeplitz matrices from boundary symbols,
//!   rank-revealing null spaces, and principal angles between subspaces.
//! * [`pairs_dbr`] — pairs `(b, a)` with `|a|^2 + |b|^2 = 1` on the
//!   boundary, the associated de Branges–Rovnyak space `H(b)`, its inner
//!   product (two independent backends), representers, complements of
//!   `M(a)`, and the shift-adjoint machinery on `H(b)`.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything can be shared freely across threads. Linear
//! algebra is forced onto a sequential code path (see
//! [`deterministic_linalg`]) so that results are bit-reproducible run to
//! run regardless of host parallelism.

pub mod circle_fft;
pub mod functions;
pub mod pairs_dbr;
pub mod toeplitz;

pub use circle_fft::{AnalyticFunction, BoundaryFunction, Grid};
pub use functions::{InnerFn, OuterFn};
pub use pairs_dbr::{HbElement, Pair};
pub use toeplitz::{Subspace, ToeplitzMatrix};

use std::sync::Once;

static LINALG_INIT: Once = Once::new();

/// Force all dense linear algebra onto a sequential code path.
///
/// Floating-point reductions are not associative, so thread-count-dependent
/// work splitting would make singular values and factorizations differ in
/// the last bits between runs. Every solver wrapper in this crate calls
/// this once before doing work; calling it again is a no-op.
pub fn deterministic_linalg() {
    LINALG_INIT.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}
