//! Geodesic time-series augmentation on the Stiefel manifold.
//!
//! A signal is restacked into a page matrix, factored as `U Σ V*`, and the
//! orthonormal factors are pushed along random geodesics of their Stiefel
//! manifolds while `Σ` is held fixed. The same retraction drives forecast
//! ensembles from dynamic mode decomposition ([`dmd`]), functional boxplot
//! summaries ([`fda`]) and robustness studies of one-class novelty
//! detectors ([`novelty`]).

pub mod augment;
pub mod dmd;
pub mod error;
pub mod fda;
pub mod linalg;
pub mod novelty;
pub mod rng;
pub mod signal;
pub mod sphere;
pub mod stiefel;

pub use error::{Error, Result};
pub use linalg::Field;
pub use nalgebra::{Complex, DMatrix, DVector};

/// Complex double used for unitary frames and DMD spectra.
pub type C64 = Complex<f64>;
