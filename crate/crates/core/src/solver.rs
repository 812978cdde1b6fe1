//! Fixed-point solver for the coupled Stieltjes transforms.
//!
//! At a point `z` of the upper half-plane the auxiliary transform
//! `tm = tilde_m(z)` solves
//!
//! ```text
//! tm = G(tm) = \int delta / (1 + delta c Theta(tm)) dD(delta),
//! Theta(tm) = \int tau / (tau tm - z) dH(tau),
//! ```
//!
//! and the Stieltjes transform of the limiting spectrum follows as
//! `m(z) = \int dH(tau) / (tau tm - z)`. The solution is unique in the
//! closed lower half-plane; we find it by damped Picard iteration with an
//! automatic damping schedule.

use num_complex::Complex64;
use thiserror::Error;

use crate::laws::{LawError, Quadrature, SpectralLaw, WeightLaw, DEFAULT_QUAD_NODES};

/// A point of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    z: Complex64,
}

impl EvalPoint {
    pub fn new(z: Complex64) -> Result<Self, SolveError> {
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(SolveError::NotUpperHalfPlane(z));
        }
        Ok(Self { z })
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self, SolveError> {
        Self::new(Complex64::new(re, im))
    }

    pub fn z(self) -> Complex64 {
        self.z
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Residual threshold on `|tm - G(tm)|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial Picard damping in `(0, 1]`.
    pub damping: f64,
    /// Warm start for `tilde_m`; defaults to `mean(D)`.
    pub init: Option<Complex64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100_000,
            damping: 0.5,
            init: None,
        }
    }
}

/// Converged transforms at one evaluation point.
#[derive(Debug, Clone, Copy)]
pub struct StieltjesSolution {
    /// `tilde_m(z)`, in the closed lower half-plane.
    pub tilde_m: Complex64,
    /// `m(z)`, the Stieltjes transform of the limiting spectrum.
    pub m: Complex64,
    /// `Theta(z) = \int tau / (tau tilde_m(z) - z) dH(tau)`.
    pub theta1: Complex64,
    /// Independently re-evaluated `|tilde_m - G(tilde_m)|`.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("evaluation point must have positive imaginary part, got {0}")]
    NotUpperHalfPlane(Complex64),
    #[error("concentration ratio must be positive and finite, got {0}")]
    BadRatio(f64),
    #[error("solver configuration invalid: {0}")]
    BadConfig(String),
    #[error("degenerate weight denominator at delta = {delta}")]
    Degenerate { delta: f64 },
    #[error(
        "fixed-point iteration did not converge: residual {:.3e} after {} iterations",
        best.residual, best.iterations
    )]
    NoConvergence { best: Box<StieltjesSolution> },
    #[error(transparent)]
    Law(#[from] LawError),
}

/// `Theta(z) = \int tau / (tau tilde_m - z) dH(tau)`, exact over the atoms of `H`.
pub fn theta1(h: &SpectralLaw, tilde_m: Complex64, z: EvalPoint) -> Complex64 {
    fold_atoms(h, |tau| {
        if tau == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            tau / (tau * tilde_m - z.z)
        }
    })
}

/// `m(z) = \int dH(tau) / (tau tilde_m - z)`.
pub fn m_from(h: &SpectralLaw, tilde_m: Complex64, z: EvalPoint) -> Complex64 {
    fold_atoms(h, |tau| (tau * tilde_m - z.z).inv())
}

fn fold_atoms(h: &SpectralLaw, f: impl Fn(f64) -> Complex64) -> Complex64 {
    match h {
        SpectralLaw::PointMass(tau) => f(*tau),
        SpectralLaw::Mixture(mix) => mix
            .atoms()
            .iter()
            .map(|&(p, tau)| p * f(tau))
            .sum(),
    }
}

/// One application of the fixed-point map `G`.
pub fn fixed_point_map(
    h: &SpectralLaw,
    d: &WeightLaw,
    c: f64,
    tilde_m: Complex64,
    z: EvalPoint,
) -> Result<Complex64, SolveError> {
    check_ratio(c)?;
    let dq = d.quadrature(DEFAULT_QUAD_NODES)?;
    map_with_quadrature(h, &dq, c, tilde_m, z)
}

fn map_with_quadrature(
    h: &SpectralLaw,
    dq: &Quadrature,
    c: f64,
    tilde_m: Complex64,
    z: EvalPoint,
) -> Result<Complex64, SolveError> {
    let theta = theta1(h, tilde_m, z);
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, delta) in dq.iter() {
        let den = 1.0 + delta * c * theta;
        if den.norm() < 1e-300 {
            return Err(SolveError::Degenerate { delta });
        }
        acc += w * delta / den;
    }
    Ok(acc)
}

/// `G(tilde_m)` together with its complex derivative, used by the Newton
/// correction inside [`solve`].
fn map_and_derivative(
    h: &SpectralLaw,
    dq: &Quadrature,
    c: f64,
    tilde_m: Complex64,
    z: EvalPoint,
) -> Result<(Complex64, Complex64), SolveError> {
    let theta = theta1(h, tilde_m, z);
    // Theta'(w) = -\int tau^2 / (tau w - z)^2 dH(tau).
    let theta_prime = -fold_atoms(h, |tau| {
        if tau == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let den = tau * tilde_m - z.z;
            (tau * tau) / (den * den)
        }
    });
    let mut g = Complex64::new(0.0, 0.0);
    let mut gp = Complex64::new(0.0, 0.0);
    for (w, delta) in dq.iter() {
        let den = 1.0 + delta * c * theta;
        if den.norm() < 1e-300 {
            return Err(SolveError::Degenerate { delta });
        }
        g += w * delta / den;
        gp -= w * delta * delta * c * theta_prime / (den * den);
    }
    Ok((g, gp))
}

/// `underline_m(z) = -(1 - c)/z + c m(z)`, the companion-matrix transform.
pub fn underline_m_from(m: Complex64, c: f64, z: EvalPoint) -> Complex64 {
    -(1.0 - c) / z.z + c * m
}

fn check_ratio(c: f64) -> Result<(), SolveError> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(SolveError::BadRatio(c));
    }
    Ok(())
}

/// Solve the coupled system at `z` by damped Picard iteration.
///
/// Starts from `cfg.init` (default `mean(D)`) and iterates
/// `tm <- (1 - lambda) tm + lambda G(tm)` until the self-consistency
/// residual `|tm - G(tm)|` drops below `cfg.tol`. If the residual fails to
/// improve for 50 consecutive iterations the damping is halved, down to
/// 1/64. On failure the best iterate found is returned inside the error.
pub fn solve(
    h: &SpectralLaw,
    d: &WeightLaw,
    c: f64,
    z: EvalPoint,
    cfg: &SolverConfig,
) -> Result<StieltjesSolution, SolveError> {
    check_ratio(c)?;
    if !(cfg.tol > 0.0) {
        return Err(SolveError::BadConfig(format!("tol must be positive, got {}", cfg.tol)));
    }
    if !(cfg.damping > 0.0 && cfg.damping <= 1.0) {
        return Err(SolveError::BadConfig(format!(
            "damping must lie in (0, 1], got {}",
            cfg.damping
        )));
    }
    let dq = d.quadrature(DEFAULT_QUAD_NODES)?;

    let mut tm = cfg.init.unwrap_or_else(|| Complex64::new(d.mean(), 0.0));
    let lambda = cfg.damping;
    let mut best_tm = tm;
    let mut best_res = f64::INFINITY;
    let mut iterations = 0usize;
    let mut converged = false;

    for it in 1..=cfg.max_iter {
        iterations = it;
        let (g, gp) = map_and_derivative(h, &dq, c, tm, z)?;
        let r = tm - g;
        let res = r.norm();
        if res < best_res {
            best_res = res;
            best_tm = tm;
        }
        if res <= cfg.tol {
            converged = true;
            break;
        }

        // The damped fixed-point step contracts at rate roughly 1 - O(Im z)
        // inside the support, so a Newton correction on R(w) = w - G(w) is
        // applied whenever it actually reduces the residual.  Steps that leave
        // the closed lower half-plane (where the unique solution lives) or
        // fail to improve fall back to the damped map.
        let mut stepped = false;
        let jac = Complex64::new(1.0, 0.0) - gp;
        if jac.norm() > 1e-14 {
            let cand = tm - r / jac;
            if cand.re.is_finite() && cand.im.is_finite() && cand.im <= cfg.tol {
                let g_cand = map_with_quadrature(h, &dq, c, cand, z)?;
                if (cand - g_cand).norm() < res {
                    tm = cand;
                    stepped = true;
                }
            }
        }
        if !stepped {
            tm = (1.0 - lambda) * tm + lambda * g;
        }
        if !tm.re.is_finite() || !tm.im.is_finite() {
            tm = best_tm;
            break;
        }
    }

    let tm = if converged { tm } else { best_tm };
    // Residual re-evaluated outside the iteration loop.
    let residual = (tm - map_with_quadrature(h, &dq, c, tm, z)?).norm();
    let solution = StieltjesSolution {
        tilde_m: tm,
        m: m_from(h, tm, z),
        theta1: theta1(h, tm, z),
        residual,
        iterations,
    };
    if residual <= cfg.tol {
        Ok(solution)
    } else {
        Err(SolveError::NoConvergence {
            best: Box::new(solution),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::AtomicMixture;
    use crate::oracle;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn three_atom() -> SpectralLaw {
        SpectralLaw::Mixture(
            AtomicMixture::new(vec![(0.2, 1.0), (0.4, 3.0), (0.4, 10.0)]).unwrap(),
        )
    }

    fn zp(re: f64, im: f64) -> EvalPoint {
        EvalPoint::from_parts(re, im).unwrap()
    }

    #[test]
    fn eval_point_rejects_lower_half_plane() {
        assert!(EvalPoint::from_parts(1.0, 0.0).is_err());
        assert!(EvalPoint::from_parts(1.0, -1.0).is_err());
        assert!(EvalPoint::from_parts(1.0, f64::NAN).is_err());
    }

    #[test]
    fn theta1_examples() {
        let z = zp(0.0, 2.0);
        assert_eq!(
            theta1(&SpectralLaw::point_mass(0.0).unwrap(), Complex64::new(3.0, -1.0), z),
            Complex64::new(0.0, 0.0)
        );
        let got = theta1(&SpectralLaw::point_mass(1.0).unwrap(), Complex64::new(1.0, 0.0), z);
        assert_abs_diff_eq!(got.re, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(got.im, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn theta1_matches_independent_sum() {
        // Oracle: the same integral written out atom by atom, no shared code.
        let tm = Complex64::new(1.0, -0.5);
        let z = Complex64::new(0.0, 1.0);
        let expected = 0.2 * (1.0 / (1.0 * tm - z))
            + 0.4 * (3.0 / (3.0 * tm - z))
            + 0.4 * (10.0 / (10.0 * tm - z));
        let got = theta1(&three_atom(), tm, zp(0.0, 1.0));
        assert_abs_diff_eq!((got - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn m_from_examples() {
        let z = zp(0.7, 1.3);
        let h0 = SpectralLaw::point_mass(0.0).unwrap();
        let m = m_from(&h0, Complex64::new(2.0, -3.0), z);
        assert_abs_diff_eq!((m - (-z.z().inv())).norm(), 0.0, epsilon = 1e-15);

        // tilde_m = 1 recovers m_H.
        let h = three_atom();
        let m = m_from(&h, Complex64::new(1.0, 0.0), z);
        let m_h = 0.2 / (Complex64::new(1.0, 0.0) - z.z())
            + 0.4 / (Complex64::new(3.0, 0.0) - z.z())
            + 0.4 / (Complex64::new(10.0, 0.0) - z.z());
        assert_abs_diff_eq!((m - m_h).norm(), 0.0, epsilon = 1e-15);

        let m = m_from(&SpectralLaw::point_mass(1.0).unwrap(), Complex64::new(0.5, 0.0), zp(0.0, 1.0));
        assert_abs_diff_eq!(m.re, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(m.im, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn map_degenerate_cases() {
        let z = zp(0.3, 0.8);
        let tm = Complex64::new(0.7, -0.2);
        // D = delta_0 sends everything to 0.
        let g = fixed_point_map(&three_atom(), &WeightLaw::point_mass(0.0).unwrap(), 0.5, tm, z).unwrap();
        assert_eq!(g, Complex64::new(0.0, 0.0));
        // H = delta_0 gives mean(D) regardless of the argument.
        let d = WeightLaw::exp_weighted(1.0).unwrap();
        let g = fixed_point_map(&SpectralLaw::point_mass(0.0).unwrap(), &d, 0.5, tm, z).unwrap();
        assert_abs_diff_eq!(g.re, d.mean(), epsilon = 1e-10);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mp_fixed_point_is_a_fixed_point() {
        // tilde_m from the closed-form MP transform via tm = 1 - c(1 + z m).
        let c = 0.5;
        let z = zp(0.0, 1.0);
        let m = oracle::mp_stieltjes(c, z.z());
        let tm = 1.0 - c * (1.0 + z.z() * m);
        let h = SpectralLaw::point_mass(1.0).unwrap();
        let d = WeightLaw::point_mass(1.0).unwrap();
        let g = fixed_point_map(&h, &d, c, tm, z).unwrap();
        assert!((g - tm).norm() <= 1e-12, "|G(tm) - tm| = {}", (g - tm).norm());
    }

    #[test]
    fn solve_null_population() {
        let h = SpectralLaw::point_mass(0.0).unwrap();
        let d = WeightLaw::exp_weighted(1.0).unwrap();
        let z = zp(0.0, 1.0);
        let sol = solve(&h, &d, 0.1, z, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(sol.tilde_m.re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.tilde_m.im, 0.0, epsilon = 1e-12);
        // m = -1/z = i at z = i.
        assert_abs_diff_eq!((sol.m - Complex64::new(0.0, 1.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn solve_matches_mp_closed_form() {
        let h = SpectralLaw::point_mass(1.0).unwrap();
        let d = WeightLaw::point_mass(1.0).unwrap();
        let z = zp(1.0, 1.0);
        let sol = solve(&h, &d, 0.1, z, &SolverConfig::default()).unwrap();
        let m = oracle::mp_stieltjes(0.1, z.z());
        assert!((sol.m - m).norm() <= 1e-10, "diff {}", (sol.m - m).norm());
    }

    #[test]
    fn unweighted_identity_near_real_axis() {
        let h = three_atom();
        let d = WeightLaw::point_mass(1.0).unwrap();
        let c = 0.25;
        let z = zp(5.0, 1e-6);
        let sol = solve(&h, &d, c, z, &SolverConfig::default()).unwrap();
        let rhs = 1.0 - c * (1.0 + z.z() * sol.m);
        assert!((sol.tilde_m - rhs).norm() <= 1e-8);
    }

    #[test]
    fn underline_m_examples() {
        let z = zp(0.4, 0.9);
        let m = -z.z().inv();
        assert_abs_diff_eq!((underline_m_from(m, 1.0, z) - m).norm(), 0.0, epsilon = 1e-15);

        let z = zp(0.0, 1.0);
        let um = underline_m_from(Complex64::new(0.0, 1.0), 0.5, z);
        assert_abs_diff_eq!((um - Complex64::new(0.0, 1.0)).norm(), 0.0, epsilon = 1e-15);

        // D = delta_1 identity: underline_m = -tilde_m / z.
        let c = 0.25;
        let m = oracle::mp_stieltjes(c, z.z());
        let tm = 1.0 - c * (1.0 + z.z() * m);
        let um = underline_m_from(m, c, z);
        assert!((um - (-tm / z.z())).norm() <= 1e-10);
    }

    pub(crate) fn random_spectral_law(rng: &mut impl Rng) -> SpectralLaw {
        let k = rng.gen_range(1..=4);
        if k == 1 && rng.gen_bool(0.5) {
            SpectralLaw::point_mass(rng.gen_range(0.1..10.0)).unwrap()
        } else {
            let raw: Vec<(f64, f64)> = (0..k)
                .map(|_| (rng.gen_range(0.1..1.0), rng.gen_range(0.1..10.0)))
                .collect();
            let total: f64 = raw.iter().map(|a| a.0).sum();
            SpectralLaw::Mixture(
                AtomicMixture::new(raw.into_iter().map(|(p, x)| (p / total, x)).collect())
                    .unwrap(),
            )
        }
    }

    pub(crate) fn random_weight_law(rng: &mut impl Rng) -> WeightLaw {
        match rng.gen_range(0..4) {
            0 => WeightLaw::point_mass(rng.gen_range(0.1..4.0)).unwrap(),
            1 => {
                let lo = rng.gen_range(0.0..2.0);
                WeightLaw::uniform(lo, lo + rng.gen_range(0.1..3.0)).unwrap()
            }
            2 => WeightLaw::exp_weighted(rng.gen_range(0.1..6.0)).unwrap(),
            _ => {
                let k = rng.gen_range(1..=3);
                let raw: Vec<(f64, f64)> = (0..k)
                    .map(|_| (rng.gen_range(0.1..1.0), rng.gen_range(0.1..4.0)))
                    .collect();
                let total: f64 = raw.iter().map(|a| a.0).sum();
                WeightLaw::Mixture(
                    AtomicMixture::new(raw.into_iter().map(|(p, x)| (p / total, x)).collect())
                        .unwrap(),
                )
            }
        }
    }

    #[test]
    fn herglotz_property_random_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cfg = SolverConfig::default();
        for _ in 0..200 {
            let h = random_spectral_law(&mut rng);
            let d = random_weight_law(&mut rng);
            let c = rng.gen_range(0.05..3.0);
            let z = zp(rng.gen_range(-5.0..30.0), rng.gen_range(1e-3..10.0));
            let sol = solve(&h, &d, c, z, &cfg).unwrap();
            assert!(sol.m.im > 0.0, "Im m = {} for {h:?} {d:?} c={c} z={:?}", sol.m.im, z);
            assert!(sol.tilde_m.im <= 1e-14, "Im tilde_m = {}", sol.tilde_m.im);
            assert!(sol.residual <= cfg.tol);
            let bound = d.mean() * z.z().norm() / z.z().im;
            assert!(sol.tilde_m.norm() <= bound + 1e-9, "a-priori bound violated");
        }
    }

    #[test]
    fn solution_is_unique_across_initializations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = three_atom();
        let d = WeightLaw::exp_weighted(1.0).unwrap();
        let c = 0.25;
        let z = zp(3.0, 0.01);
        let reference = solve(&h, &d, c, z, &SolverConfig::default()).unwrap();
        let radius = d.mean() * z.z().norm() / z.z().im;
        for _ in 0..10 {
            let r = radius * rng.gen_range(0.0..1.0f64).sqrt();
            let phi = rng.gen_range(-std::f64::consts::PI..0.0);
            let init = Complex64::from_polar(r, phi);
            let cfg = SolverConfig {
                init: Some(init),
                ..SolverConfig::default()
            };
            let sol = solve(&h, &d, c, z, &cfg).unwrap();
            assert!(
                (sol.tilde_m - reference.tilde_m).norm() <= 1e-8,
                "init {init} drifted to {}",
                sol.tilde_m
            );
        }
    }

    #[test]
    fn tail_behavior() {
        let h = three_atom();
        let d = WeightLaw::exp_weighted(2.0).unwrap();
        let c = 0.4;
        for y in [1e2, 1e3, 1e4] {
            let z = zp(0.0, y);
            let sol = solve(&h, &d, c, z, &SolverConfig::default()).unwrap();
            let lhs = (Complex64::new(0.0, y) * sol.m + 1.0).norm();
            let bound = d.mean() * h.max_support() / y;
            assert!(lhs <= bound * (1.0 + 1e-6) + 1e-12, "y={y}: {lhs} > {bound}");
        }
    }

    #[test]
    fn scaling_covariance_weights_and_population() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let h = random_spectral_law(&mut rng);
            let d = match random_weight_law(&mut rng) {
                WeightLaw::ExpWeighted { .. } => WeightLaw::point_mass(1.0).unwrap(),
                other => other,
            };
            let c = rng.gen_range(0.1..2.0);
            let s = rng.gen_range(0.3..3.0);
            let z = zp(rng.gen_range(-2.0..15.0), rng.gen_range(0.01..5.0));
            let zs = zp(z.z().re / s, z.z().im / s);
            let cfg = SolverConfig::default();

            let base = solve(&h, &d, c, zs, &cfg).unwrap();
            // Weight scaling: D -> sD gives m_s(z) = m(z/s)/s, tm_s(z) = s tm(z/s).
            let ds = scale_weight_law(&d, s);
            let scaled = solve(&h, &ds, c, z, &cfg).unwrap();
            assert!((scaled.m - base.m / s).norm() <= 1e-9, "weight-scaled m mismatch");
            assert!((scaled.tilde_m - s * base.tilde_m).norm() <= 1e-9);

            // Population scaling: H -> sH gives m_s(z) = m(z/s)/s, tm_s(z) = tm(z/s).
            let hs = scale_spectral_law(&h, s);
            let scaled = solve(&hs, &d, c, z, &cfg).unwrap();
            assert!((scaled.m - base.m / s).norm() <= 1e-9, "population-scaled m mismatch");
            assert!((scaled.tilde_m - base.tilde_m).norm() <= 1e-9);
        }
    }

    pub(crate) fn scale_weight_law(d: &WeightLaw, s: f64) -> WeightLaw {
        match d {
            WeightLaw::PointMass(w) => WeightLaw::point_mass(w * s).unwrap(),
            WeightLaw::Mixture(m) => WeightLaw::Mixture(
                AtomicMixture::new(m.atoms().iter().map(|&(p, x)| (p, x * s)).collect())
                    .unwrap(),
            ),
            WeightLaw::Uniform { lo, hi } => WeightLaw::uniform(lo * s, hi * s).unwrap(),
            WeightLaw::ExpWeighted { .. } => {
                unreachable!("EWMA mean is pinned to 1; scaling leaves the family")
            }
        }
    }

    pub(crate) fn scale_spectral_law(h: &SpectralLaw, s: f64) -> SpectralLaw {
        match h {
            SpectralLaw::PointMass(x) => SpectralLaw::point_mass(x * s).unwrap(),
            SpectralLaw::Mixture(m) => SpectralLaw::Mixture(
                AtomicMixture::new(m.atoms().iter().map(|&(p, x)| (p, x * s)).collect())
                    .unwrap(),
            ),
        }
    }
}
