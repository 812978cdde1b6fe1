//! Asymptotic spectra of weighted sample covariance matrices.
//!
//! The weighted sample covariance `B = (1/N) Y W Y*` with `Y = T^{1/2} Z`
//! has, in the large-dimensional limit `n/N -> c`, a nonrandom limiting
//! spectral distribution `F`. Its Cauchy-Stieltjes transform `m` is coupled
//! to an auxiliary transform through a scalar fixed-point equation involving
//! the population spectral law `H` and the weight law `D`.
//!
//! The crate is organized as:
//! - [`laws`]: the probability laws `H` and `D` (atoms, uniform, EWMA),
//!   their means, quantiles and quadratures;
//! - [`solver`]: the damped fixed-point solver for the coupled transforms
//!   at a point of the upper half-plane;
//! - [`density`]: Stieltjes inversion to a real density curve, support and
//!   spectral-gap analysis, cdf and moments;
//! - [`oracle`]: closed-form Marchenko-Pastur quantities used as an
//!   independent cross-check;
//! - [`sim`]: finite-dimensional Monte-Carlo draws of weighted covariance
//!   spectra and goodness-of-fit statistics against the theoretical curve.

pub mod density;
pub mod laws;
pub mod oracle;
pub mod sim;
pub mod solver;

pub use density::{cdf_curve, density_curve, moment, support_report, CdfTable, DensityCurve, SupportReport};
pub use laws::{AtomicMixture, Quadrature, SpectralLaw, WeightLaw};
pub use sim::{EmpiricalSpectrum, NoiseModel, SimConfig};
pub use solver::{solve, EvalPoint, SolverConfig, StieltjesSolution};
