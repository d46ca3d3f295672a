//! Multiprecision mu-spectra of signed Hankel matrices built from Taylor
//! coefficients, with the distribution and trend checks run over them.

pub mod coeffs;
pub mod dist;
pub mod figio;
pub mod harness;
pub mod hankel;
pub mod mpnum;
pub mod spectra;

pub use coeffs::{generate, CoeffCache, CoeffError, CoeffStream, FunctionSpec};
pub use dist::{sup_distance, StepDistribution};
pub use figio::{FigureConfig, Manifest};
pub use hankel::{build_m, HankelSpec, SignedHankel};
pub use harness::{ReferenceConstants, TrendReport, Verdict};
pub use mpnum::{BigReal, RealMatrix};
pub use spectra::{compute_spectrum, log_spectrum, LogSpectrum, SpectrumRecord, SplitPolicy};
