//! Stieltjes inversion and support analysis.
//!
//! The limiting density is recovered as `f(x) = Im m(x + i eps) / pi` on a
//! real grid, with the solver warm-started along the grid (continuation).
//! Support intervals are maximal runs of grid points whose density clears a
//! threshold, with edges sharpened by bisection on fresh solver evaluations.

use thiserror::Error;

use crate::laws::{SpectralLaw, WeightLaw};
use crate::solver::{solve, EvalPoint, SolveError, SolverConfig};

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("grid must be nonempty")]
    EmptyGrid,
    #[error("grid must be strictly increasing and nonnegative")]
    BadGrid,
    #[error("inversion offset must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("support threshold must be positive, got {0}")]
    BadThreshold(f64),
    #[error("solver failed at grid point x = {x}: {source}")]
    SolverAt { x: f64, source: SolveError },
    #[error("moment order {0} unsupported, only k in {{1, 2}}")]
    BadMomentOrder(usize),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// A density curve on a real grid, plus the point mass at 0.
#[derive(Debug, Clone)]
pub struct DensityCurve {
    /// Strictly increasing abscissae.
    pub xs: Vec<f64>,
    /// Nonnegative density values, same length as `xs`.
    pub fs: Vec<f64>,
    /// Imaginary offset used for the inversion.
    pub epsilon: f64,
    /// Mass placed at `x = 0`.
    pub zero_atom: f64,
}

/// Disjoint support intervals and the spectral gaps between them.
#[derive(Debug, Clone)]
pub struct SupportReport {
    pub support_intervals: Vec<(f64, f64)>,
    pub gaps: Vec<(f64, f64)>,
    pub threshold: f64,
}

/// Atom mass of the limiting spectrum at 0.
///
/// Dimension deficit contributes `max(0, 1 - 1/c)`; null population
/// directions contribute `H({0}) min(1, 1/c)`.
pub fn zero_atom_mass(h: &SpectralLaw, c: f64) -> f64 {
    (1.0 - 1.0 / c).max(0.0) + h.mass_at_zero() * (1.0 / c).min(1.0)
}

/// A default grid covering the plausible support: `count` uniform points
/// from 0 to `1.2 * max(H) * max(D) * (1 + sqrt(c))^2`.
pub fn default_grid(h: &SpectralLaw, d: &WeightLaw, c: f64, count: usize) -> Vec<f64> {
    let upper = (1.2 * h.max_support() * d.max_support() * (1.0 + c.sqrt()).powi(2)).max(1.0);
    uniform_grid(0.0, upper, count)
}

pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && hi > lo);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Invert `m` to a density curve along `grid`, warm-starting each solve from
/// the previous grid point.
pub fn density_curve(
    h: &SpectralLaw,
    d: &WeightLaw,
    c: f64,
    grid: &[f64],
    epsilon: f64,
    cfg: &SolverConfig,
) -> Result<DensityCurve, DensityError> {
    if grid.is_empty() {
        return Err(DensityError::EmptyGrid);
    }
    if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DensityError::BadGrid);
    }
    if !(epsilon > 0.0) {
        return Err(DensityError::BadEpsilon(epsilon));
    }
    let mut fs = Vec::with_capacity(grid.len());
    let mut warm = cfg.init;
    for &x in grid {
        let z = EvalPoint::from_parts(x, epsilon)?;
        let local = SolverConfig {
            init: warm,
            ..cfg.clone()
        };
        let sol = solve(h, d, c, z, &local)
            .map_err(|source| DensityError::SolverAt { x, source })?;
        warm = Some(sol.tilde_m);
        fs.push((sol.m.im / std::f64::consts::PI).max(0.0));
    }
    Ok(DensityCurve {
        xs: grid.to_vec(),
        fs,
        epsilon,
        zero_atom: zero_atom_mass(h, c),
    })
}

/// Locate support intervals and gaps of `curve`.
///
/// A grid point is in support iff its density is at least `threshold`; runs
/// shorter than 2 points are discarded. Interval edges interior to the grid
/// are refined by bisection on fresh solver evaluations until the bracket
/// width drops below a hundredth of the local grid step.
pub fn support_report(
    h: &SpectralLaw,
    d: &WeightLaw,
    c: f64,
    curve: &DensityCurve,
    threshold: f64,
    cfg: &SolverConfig,
) -> Result<SupportReport, DensityError> {
    if !(threshold > 0.0) {
        return Err(DensityError::BadThreshold(threshold));
    }
    let n = curve.xs.len();
    let in_support: Vec<bool> = curve.fs.iter().map(|&f| f >= threshold).collect();

    let density_at = |x: f64| -> Result<f64, DensityError> {
        let z = EvalPoint::from_parts(x, curve.epsilon)?;
        let sol = solve(h, d, c, z, &SolverConfig { init: None, ..cfg.clone() })
            .map_err(|source| DensityError::SolverAt { x, source })?;
        Ok((sol.m.im / std::f64::consts::PI).max(0.0))
    };

    // Bisect the threshold crossing inside (lo, hi); `lo_in` says which side
    // is in support.
    let refine = |mut lo: f64, mut hi: f64, lo_in: bool, step: f64| -> Result<f64, DensityError> {
        while hi - lo > step / 100.0 {
            let mid = 0.5 * (lo + hi);
            let f = density_at(mid)?;
            if (f >= threshold) == lo_in {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };

    let mut intervals = Vec::new();
    let mut i = 0;
    while i < n {
        if !in_support[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && in_support[i] {
            i += 1;
        }
        let end = i - 1; // inclusive
        if end - start + 1 < 2 {
            continue;
        }
        let left = if start == 0 {
            curve.xs[0]
        } else {
            let step = curve.xs[start] - curve.xs[start - 1];
            refine(curve.xs[start - 1], curve.xs[start], false, step)?
        };
        let right = if end == n - 1 {
            curve.xs[n - 1]
        } else {
            let step = curve.xs[end + 1] - curve.xs[end];
            refine(curve.xs[end], curve.xs[end + 1], true, step)?
        };
        intervals.push((left, right));
    }

    let gaps = intervals
        .windows(2)
        .map(|w| (w[0].1, w[1].0))
        .collect();
    Ok(SupportReport {
        support_intervals: intervals,
        gaps,
        threshold,
    })
}

/// Piecewise-linear cdf table built from a density curve.
#[derive(Debug, Clone)]
pub struct CdfTable {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl CdfTable {
    /// `F(x)`: 0 below the real support, total mass above the grid.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let first = self.xs[0];
        if x <= first {
            return self.values[0];
        }
        let last = *self.xs.last().expect("nonempty table");
        if x >= last {
            return *self.values.last().expect("nonempty table");
        }
        let idx = self.xs.partition_point(|&g| g <= x);
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let (f0, f1) = (self.values[idx - 1], self.values[idx]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    pub fn total_mass(&self) -> f64 {
        *self.values.last().expect("nonempty table")
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.values)
    }
}

/// Cumulative trapezoid of the curve plus the atom at 0.
pub fn cdf_curve(curve: &DensityCurve) -> CdfTable {
    let mut values = Vec::with_capacity(curve.xs.len());
    let mut acc = curve.zero_atom;
    values.push(acc);
    for i in 1..curve.xs.len() {
        let dx = curve.xs[i] - curve.xs[i - 1];
        acc += 0.5 * dx * (curve.fs[i] + curve.fs[i - 1]);
        values.push(acc);
    }
    CdfTable {
        xs: curve.xs.clone(),
        values,
    }
}

/// `\int x^k f(x) dx` by trapezoid, `k` in `{1, 2}`. The atom at 0
/// contributes nothing.
pub fn moment(curve: &DensityCurve, k: usize) -> Result<f64, DensityError> {
    if !(1..=2).contains(&k) {
        return Err(DensityError::BadMomentOrder(k));
    }
    let mut acc = 0.0;
    for i in 1..curve.xs.len() {
        let dx = curve.xs[i] - curve.xs[i - 1];
        let g0 = curve.xs[i - 1].powi(k as i32) * curve.fs[i - 1];
        let g1 = curve.xs[i].powi(k as i32) * curve.fs[i];
        acc += 0.5 * dx * (g0 + g1);
    }
    Ok(acc)
}

/// Trapezoid mass of the continuous part plus the atom at 0.
pub fn total_mass(curve: &DensityCurve) -> f64 {
    let mut acc = curve.zero_atom;
    for i in 1..curve.xs.len() {
        let dx = curve.xs[i] - curve.xs[i - 1];
        acc += 0.5 * dx * (curve.fs[i] + curve.fs[i - 1]);
    }
    acc
}
