//! Closed-form Marchenko-Pastur quantities for `H = D = delta_1`.
//!
//! Used as an independent oracle against the fixed-point solver: the scalar
//! self-consistency equation collapses to the quadratic
//! `c z m^2 + (z + c - 1) m + 1 = 0`, whose physical root is the one mapping
//! the upper half-plane into itself.

use num_complex::Complex64;

/// Support interval `[(1 - sqrt(c))^2, (1 + sqrt(c))^2]` of the MP law.
pub fn mp_support(c: f64) -> (f64, f64) {
    assert!(c > 0.0, "concentration ratio must be positive");
    let s = c.sqrt();
    ((1.0 - s).powi(2), (1.0 + s).powi(2))
}

/// Density of the MP law at `x` (continuous part only; the atom at 0 for
/// `c > 1` is not included).
pub fn mp_density(c: f64, x: f64) -> f64 {
    assert!(c > 0.0, "concentration ratio must be positive");
    let (a, b) = mp_support(c);
    if x <= a || x >= b || x <= 0.0 {
        return 0.0;
    }
    ((b - x) * (x - a)).sqrt() / (2.0 * std::f64::consts::PI * c * x)
}

/// Stieltjes transform of the MP law at `z` in the upper half-plane.
///
/// Picks the quadratic root with positive imaginary part (the Nevanlinna
/// branch); for `Im z > 0` exactly one root qualifies.
pub fn mp_stieltjes(c: f64, z: Complex64) -> Complex64 {
    assert!(c > 0.0, "concentration ratio must be positive");
    assert!(z.im > 0.0, "evaluation point must be in the upper half-plane");
    let qa = c * z;
    let qb = z + (c - 1.0);
    let disc = (qb * qb - 4.0 * qa).sqrt();
    let r1 = (-qb + disc) / (2.0 * qa);
    let r2 = (-qb - disc) / (2.0 * qa);
    if r1.im >= r2.im {
        r1
    } else {
        r2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{SpectralLaw, WeightLaw};
    use crate::solver::{solve, EvalPoint, SolverConfig};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn support_examples() {
        let (a, b) = mp_support(0.25);
        assert_abs_diff_eq!(a, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 2.25, epsilon = 1e-15);
        let (a, b) = mp_support(1.0);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 4.0, epsilon = 1e-15);
        let (a, b) = mp_support(0.1);
        assert_abs_diff_eq!(a, (1.0 - 0.1f64.sqrt()).powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(b, (1.0 + 0.1f64.sqrt()).powi(2), epsilon = 1e-12);
        assert!(a > 0.467 && a < 0.468);
        assert!(b > 1.732 && b < 1.733);
    }

    #[test]
    fn density_examples() {
        assert_eq!(mp_density(0.25, 3.0), 0.0);
        assert_eq!(mp_density(0.25, 0.1), 0.0);
        let expect = (1.25f64 * 0.75).sqrt() / (2.0 * std::f64::consts::PI * 0.25);
        assert_abs_diff_eq!(mp_density(0.25, 1.0), expect, epsilon = 1e-12);
        assert!(expect > 0.6164 && expect < 0.6165);
    }

    #[test]
    fn density_integrates_to_one() {
        // Substitution x = (a+b)/2 + (b-a)/2 sin(t) removes the sqrt edge
        // singularity; composite Simpson on the smooth integrand.
        for c in [0.1, 0.25, 0.5] {
            let (a, b) = mp_support(c);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let n = 20_000;
            let h = std::f64::consts::PI / n as f64;
            let g = |t: f64| {
                let x = mid + half * (t - 0.5 * std::f64::consts::PI).sin();
                mp_density(c, x) * half * (t - 0.5 * std::f64::consts::PI).cos()
            };
            let mut total = g(0.0) + g(std::f64::consts::PI);
            for k in 1..n {
                total += if k % 2 == 1 { 4.0 } else { 2.0 } * g(k as f64 * h);
            }
            total *= h / 3.0;
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn stieltjes_tail() {
        for c in [0.1, 0.5, 2.0] {
            for y in [1e2, 1e3, 1e4] {
                let z = Complex64::new(0.0, y);
                let m = mp_stieltjes(c, z);
                let defect = (Complex64::new(0.0, y) * m + 1.0).norm();
                assert!(defect <= 4.0 / y, "c={c} y={y}: {defect}");
            }
        }
    }

    #[test]
    fn stieltjes_is_nevanlinna() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let c = rng.gen_range(0.05..3.0);
            let z = Complex64::new(rng.gen_range(-5.0..10.0), rng.gen_range(1e-4..5.0));
            let m = mp_stieltjes(c, z);
            assert!(m.im > 0.0);
            // Residual of the defining quadratic.
            let res = (c * z * m * m + (z + (c - 1.0)) * m + 1.0).norm();
            assert!(res <= 1e-12, "residual {res}");
        }
    }

    #[test]
    fn stieltjes_matches_solver() {
        let h = SpectralLaw::point_mass(1.0).unwrap();
        let d = WeightLaw::point_mass(1.0).unwrap();
        let cfg = SolverConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let c = rng.gen_range(0.05..2.0);
            let z = Complex64::new(rng.gen_range(-2.0..6.0), rng.gen_range(1e-3..4.0));
            let sol = solve(&h, &d, c, EvalPoint::new(z).unwrap(), &cfg).unwrap();
            let m = mp_stieltjes(c, z);
            assert!((sol.m - m).norm() <= 1e-10, "c={c} z={z}: diff {}", (sol.m - m).norm());
        }
    }

    #[test]
    fn inversion_agrees_with_density() {
        for c in [0.1, 0.25, 0.5] {
            let (a, b) = mp_support(c);
            for k in 1..20 {
                let x = a + (b - a) * k as f64 / 20.0;
                let m = mp_stieltjes(c, Complex64::new(x, 1e-8));
                let inv = m.im / std::f64::consts::PI;
                assert_abs_diff_eq!(inv, mp_density(c, x), epsilon = 1e-4);
            }
        }
    }
}
