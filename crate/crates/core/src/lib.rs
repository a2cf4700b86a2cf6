//! Cauchy- and Beurling-type singular integral operators on the plane and on the
//! Poincaré upper half-plane, with a verification harness for their identities.
//!
//! Every operator has two realizations: an FFT multiplier path and a direct
//! moment-corrected quadrature that serves as its oracle.

pub mod calculus;
pub mod error;
pub mod fft;
pub mod grid;
pub mod quad;
pub mod report;
pub mod testfuncs;
pub mod transforms;
pub mod verify;
pub mod whittaker;

pub type C64 = num_complex::Complex64;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec, PlaneKind, WeightKind, Window};
pub use report::{CheckReport, Criterion, Label};
pub use transforms::{KernelId, TransformMethod};
