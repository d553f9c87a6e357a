//! Exact ancient solutions of curve shortening flow, Gaussian-weighted
//! functionals, drift-Laplacian spectra and numerical checks of the
//! inequalities that govern them.

pub mod error;
pub mod flow;
pub mod gaussian;
pub mod geometry;
pub mod numeric;
pub mod spectral;
pub mod spectrum;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/curves.md")]
    pub struct Curves;
    #[doc = include_str!("../../../book/src/torus.md")]
    pub struct Torus;
    #[doc = include_str!("../../../book/src/gaussian.md")]
    pub struct Gaussian;
    #[doc = include_str!("../../../book/src/spectrum.md")]
    pub struct Spectrum;
    #[doc = include_str!("../../../book/src/flows.md")]
    pub struct Flows;
    #[doc = include_str!("../../../book/src/verification.md")]
    pub struct Verification;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
