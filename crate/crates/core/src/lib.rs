//! Monotone Riemannian metrics on quantum state space, with the
//! Wigner-Yanase metric as the worked example. See `book/` for a guide.

pub mod curvature;
pub mod divergence;
pub mod error;
pub mod geometry;
pub mod monotone;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

// One module per chapter, so a failing snippet points at its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    mod curvature {}
    #[doc = include_str!("../../../book/src/wy-geometry.md")]
    mod wy_geometry {}
    #[doc = include_str!("../../../book/src/divergences.md")]
    mod divergences {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
