//! Finite-dimensional Monte-Carlo draws of weighted sample covariance
//! spectra and agreement statistics against the theoretical curve.
//!
//! One draw builds `B = (1/N) T^{1/2} Z W Z* T^{1/2}` with a deterministic
//! population diagonal `T` (midpoint quantiles of `H`), a deterministic
//! weight diagonal `W` (midpoint quantiles of `D`, mean-rescaled), and i.i.d.
//! unit-variance noise `Z`. Optionally `W` and/or `T` are conjugated by a
//! Haar-ish unitary from the QR factorization of a Gaussian matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StudentT};
use rayon::prelude::*;
use thiserror::Error;

use crate::density::{cdf_curve, CdfTable, DensityCurve};
use crate::laws::{LawError, SpectralLaw, WeightLaw};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    GaussianReal,
    GaussianComplex,
    /// Student t with `nu > 2` degrees of freedom, scaled by
    /// `sqrt((nu - 2) / nu)` so entries have variance exactly 1.
    StudentT { nu: f64 },
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Matrix dimension `n`.
    pub n: usize,
    /// Target concentration ratio; the sample count is `N = round(n / c)`.
    pub c: f64,
    pub noise: NoiseModel,
    pub seed: u64,
    /// Conjugate the weight diagonal by a random unitary.
    pub rotate_weights: bool,
    /// Conjugate the population diagonal by an independent random unitary.
    pub rotate_population: bool,
}

impl SimConfig {
    pub fn new(n: usize, c: f64, noise: NoiseModel, seed: u64) -> Self {
        Self {
            n,
            c,
            noise,
            seed,
            rotate_weights: false,
            rotate_population: false,
        }
    }

    /// `N = round(n / c)`.
    pub fn samples(&self) -> usize {
        (self.n as f64 / self.c).round() as usize
    }
}

/// Sorted spectrum of one finite-dimensional draw.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSpectrum {
    /// Ascending; exactly `n` values.
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub samples: usize,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    BadConfig(String),
    #[error("eigensolver produced non-finite values (n = {n}, N = {samples})")]
    Eigen { n: usize, samples: usize },
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error(transparent)]
    Law(#[from] LawError),
}

fn validate(cfg: &SimConfig) -> Result<usize, SimError> {
    if cfg.n < 2 {
        return Err(SimError::BadConfig(format!("n must be at least 2, got {}", cfg.n)));
    }
    if !(cfg.c > 0.0) || !cfg.c.is_finite() {
        return Err(SimError::BadConfig(format!("c must be positive, got {}", cfg.c)));
    }
    let samples = cfg.samples();
    if samples < 2 {
        return Err(SimError::BadConfig(format!(
            "N = round(n/c) = {samples} must be at least 2"
        )));
    }
    if let NoiseModel::StudentT { nu } = cfg.noise {
        if !(nu > 2.0) {
            return Err(SimError::BadConfig(format!(
                "Student t requires nu > 2 for unit variance, got {nu}"
            )));
        }
    }
    Ok(samples)
}

/// Draw one weighted sample covariance spectrum.
pub fn sample_spectrum(
    h: &SpectralLaw,
    d: &WeightLaw,
    cfg: &SimConfig,
) -> Result<EmpiricalSpectrum, SimError> {
    let samples = validate(cfg)?;
    let n = cfg.n;

    // Deterministic diagonals: T from midpoint quantiles of H (descending),
    // W from the mean-rescaled quantile staircase of D.
    let mut t_diag: Vec<f64> = (1..=n)
        .map(|i| {
            h.quantile((i as f64 - 0.5) / n as f64)
                .expect("midpoint probability is in (0,1)")
        })
        .collect();
    t_diag.sort_by(|a, b| b.total_cmp(a));
    let w_diag = d.sample_diagonal(samples)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut eigenvalues = match cfg.noise {
        NoiseModel::GaussianComplex => spectrum_complex(&t_diag, &w_diag, cfg, &mut rng),
        _ => spectrum_real(&t_diag, &w_diag, cfg, &mut rng),
    };
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(SimError::Eigen { n, samples });
    }
    eigenvalues.sort_by(|a, b| a.total_cmp(b));
    Ok(EmpiricalSpectrum {
        eigenvalues,
        n,
        samples,
    })
}

fn draw_real(noise: NoiseModel, rng: &mut ChaCha8Rng) -> f64 {
    match noise {
        NoiseModel::GaussianReal => Normal::new(0.0, 1.0).unwrap().sample(rng),
        NoiseModel::StudentT { nu } => {
            let t = StudentT::new(nu).unwrap().sample(rng);
            t * ((nu - 2.0) / nu).sqrt()
        }
        NoiseModel::GaussianComplex => unreachable!("complex noise uses the complex path"),
    }
}

fn spectrum_real(
    t_diag: &[f64],
    w_diag: &[f64],
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = t_diag.len();
    let big_n = w_diag.len();
    let mut a = DMatrix::<f64>::from_fn(n, big_n, |_, _| draw_real(cfg.noise, rng));

    if cfg.rotate_weights || cfg.rotate_population {
        if cfg.rotate_weights {
            // a * Q diag Q^T applied factor by factor: two n x N products
            // instead of an N x N conjugation.
            let q = random_orthogonal(big_n, rng);
            a = &a * &q;
            scale_columns(&mut a, w_diag);
            a = &a * q.transpose();
        } else {
            scale_columns(&mut a, w_diag);
        }
        if cfg.rotate_population {
            let q = random_orthogonal(n, rng);
            a = q.transpose() * &a;
            scale_rows(&mut a, t_diag);
            a = &q * &a;
        } else {
            scale_rows(&mut a, t_diag);
        }
    } else {
        scale_columns(&mut a, w_diag);
        scale_rows(&mut a, t_diag);
    }

    gram_eigenvalues(n, big_n, |small| {
        if small {
            (&a * a.transpose()).symmetric_eigenvalues().iter().copied().collect()
        } else {
            (a.transpose() * &a).symmetric_eigenvalues().iter().copied().collect()
        }
    })
}

fn spectrum_complex(
    t_diag: &[f64],
    w_diag: &[f64],
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = t_diag.len();
    let big_n = w_diag.len();
    let normal = Normal::new(0.0, 1.0).unwrap();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = DMatrix::<Complex64>::from_fn(n, big_n, |_, _| {
        let re: f64 = normal.sample(rng);
        let im: f64 = normal.sample(rng);
        Complex64::new(re * inv_sqrt2, im * inv_sqrt2)
    });

    if cfg.rotate_weights || cfg.rotate_population {
        if cfg.rotate_weights {
            let q = random_unitary(big_n, rng);
            a = &a * &q;
            scale_columns_c(&mut a, w_diag);
            a = &a * q.adjoint();
        } else {
            scale_columns_c(&mut a, w_diag);
        }
        if cfg.rotate_population {
            let q = random_unitary(n, rng);
            a = q.adjoint() * &a;
            scale_rows_c(&mut a, t_diag);
            a = &q * &a;
        } else {
            scale_rows_c(&mut a, t_diag);
        }
    } else {
        scale_columns_c(&mut a, w_diag);
        scale_rows_c(&mut a, t_diag);
    }

    gram_eigenvalues(n, big_n, |small| {
        if small {
            (&a * a.adjoint()).symmetric_eigenvalues().iter().copied().collect()
        } else {
            (a.adjoint() * &a).symmetric_eigenvalues().iter().copied().collect()
        }
    })
}

/// Decompose the smaller Gram form and pad with the `|n - N|` structural
/// zero eigenvalues when the companion matrix was used.
fn gram_eigenvalues(n: usize, big_n: usize, eig: impl FnOnce(bool) -> Vec<f64>) -> Vec<f64> {
    if n <= big_n {
        eig(true)
    } else {
        let mut vals = eig(false);
        vals.resize(n, 0.0);
        vals
    }
}

fn scale_columns(a: &mut DMatrix<f64>, w_diag: &[f64]) {
    let big_n = w_diag.len() as f64;
    for (j, mut col) in a.column_iter_mut().enumerate() {
        col *= (w_diag[j] / big_n).sqrt();
    }
}

fn scale_rows(a: &mut DMatrix<f64>, t_diag: &[f64]) {
    for (i, mut row) in a.row_iter_mut().enumerate() {
        row *= t_diag[i].sqrt();
    }
}

fn scale_columns_c(a: &mut DMatrix<Complex64>, w_diag: &[f64]) {
    let big_n = w_diag.len() as f64;
    for (j, mut col) in a.column_iter_mut().enumerate() {
        col *= Complex64::new((w_diag[j] / big_n).sqrt(), 0.0);
    }
}

fn scale_rows_c(a: &mut DMatrix<Complex64>, t_diag: &[f64]) {
    for (i, mut row) in a.row_iter_mut().enumerate() {
        row *= Complex64::new(t_diag[i].sqrt(), 0.0);
    }
}

fn random_orthogonal(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let g = faer::Mat::<f64>::from_fn(k, k, |_, _| normal.sample(rng));
    let q = g.qr().compute_Q();
    DMatrix::from_fn(k, k, |i, j| q[(i, j)])
}

fn random_unitary(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let g = faer::Mat::<Complex64>::from_fn(k, k, |_, _| {
        Complex64::new(normal.sample(rng), normal.sample(rng))
    });
    let q = g.qr().compute_Q();
    DMatrix::from_fn(k, k, |i, j| q[(i, j)])
}

/// Kolmogorov-Smirnov statistic of the spectrum against a theoretical cdf,
/// checking both one-sided steps of the empirical cdf.
pub fn ks_statistic(spec: &EmpiricalSpectrum, cdf: &CdfTable) -> Result<f64, SimError> {
    if spec.eigenvalues.is_empty() {
        return Err(SimError::EmptySpectrum);
    }
    let n = spec.eigenvalues.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in spec.eigenvalues.iter().enumerate() {
        let f = cdf.eval(x);
        sup = sup.max(((i + 1) as f64 / n - f).abs());
        sup = sup.max((f - i as f64 / n).abs());
    }
    Ok(sup)
}

/// L1 distance between the empirical and theoretical cdfs, by trapezoid on
/// the merged grid of eigenvalues and curve abscissae.
pub fn wasserstein1(spec: &EmpiricalSpectrum, curve: &DensityCurve) -> f64 {
    let cdf = cdf_curve(curve);
    let mut points: Vec<f64> = spec
        .eigenvalues
        .iter()
        .copied()
        .chain(curve.xs.iter().copied())
        .collect();
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup();
    let n = spec.eigenvalues.len() as f64;
    let emp = |x: f64| -> f64 {
        // Fraction of eigenvalues <= x.
        spec.eigenvalues.partition_point(|&v| v <= x) as f64 / n
    };
    let mut acc = 0.0;
    for w in points.windows(2) {
        let g0 = (emp(w[0]) - cdf.eval(w[0])).abs();
        let g1 = (emp(w[1]) - cdf.eval(w[1])).abs();
        acc += 0.5 * (w[1] - w[0]) * (g0 + g1);
    }
    acc
}

/// `(1/n) Tr(B)`, the arithmetic mean of the eigenvalues.
pub fn trace_mean(spec: &EmpiricalSpectrum) -> f64 {
    spec.eigenvalues.iter().sum::<f64>() / spec.eigenvalues.len() as f64
}

/// Independent draws with per-trial generators derived from `(seed, index)`,
/// so parallel and serial schedules produce identical ensembles.
pub fn sample_spectra(
    h: &SpectralLaw,
    d: &WeightLaw,
    base: &SimConfig,
    trials: usize,
) -> Result<Vec<EmpiricalSpectrum>, SimError> {
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let cfg = SimConfig {
                seed: trial_seed(base.seed, k as u64),
                ..base.clone()
            };
            sample_spectrum(h, d, &cfg)
        })
        .collect()
}

/// SplitMix64 finalizer over the (seed, trial) pair.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut x = seed.wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
