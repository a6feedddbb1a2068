//! Symbol recovery for truncated Toeplitz-type operators on the Hardy space.
//!
//! The crate is organised bottom-up:
//!
//! - [`circle_fourier`]: band-limited coefficient series and grid transforms.
//! - [`hardy_ops`]: finite sections of operators, Toeplitz constructors and tests.
//! - [`subsymbol`]: sub-symbol numerators `h_f`, ratios `R_f = h_f / f`, and the
//!   uniqueness, analyticity, extension and stabilization probes built on them.
//! - [`berezin`]: reproducing kernels and the Berezin transform.
//! - [`unbounded`]: the factorial and gamma upper-triangular operators, Smirnov
//!   ratio domains, and the shift-invariance probe, with named registries of
//!   coefficient rules and operator families.

pub mod berezin;
pub mod circle_fourier;
pub mod error;
pub mod hardy_ops;
pub mod numeric;
pub mod report;
pub mod subsymbol;
pub mod unbounded;

pub use num_complex::Complex64;

pub use error::{HardyError, Result};
