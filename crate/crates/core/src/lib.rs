//! Diffraction measures on the line: Dirac combs, their transforms and
//! autocorrelations, and the homometric phase forms that realize a given
//! pure point diffraction.

pub mod autocorr;
pub mod classify;
pub mod comb;
pub mod error;
pub mod exec;
pub mod fit;
pub mod fourier;
pub mod lfamily;
pub mod phase;
pub mod rational;
pub mod testfn;

pub use comb::{
    AbsContMeasure, LatticeComb, Pairing, PointWeighting, SpectralMeasure, TrigPolynomial, Window,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fourier::TemperedObject;
pub use lfamily::{TowerFamily, TowerSide};
pub use rational::Q;
pub use testfn::{GaussianAtom, TestFunction};
