//! Population spectral law `H` and weight law `D`.
//!
//! Both are probability measures on `[0, inf)`. `H` is the limiting spectrum
//! of the population covariance and is always atomic here; `D` is the
//! limiting weight distribution and may additionally be uniform or
//! exponentially weighted (the EWMA law, normalized to mean 1).
//!
//! Atomic laws are integrated exactly; continuous laws go through
//! Gauss-Legendre quadrature on their natural parametrization.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Number of quadrature nodes used by default for continuous weight laws.
pub const DEFAULT_QUAD_NODES: usize = 128;

#[derive(Debug, Error)]
pub enum LawError {
    #[error("atom masses must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("atom locations must be nonnegative, got {0}")]
    NegativeLocation(f64),
    #[error("atom masses sum to {0}, expected 1 within 1e-12")]
    MassNotNormalized(f64),
    #[error("mixture needs at least one atom")]
    EmptyMixture,
    #[error("uniform law requires 0 <= lo < hi, got [{0}, {1}]")]
    BadUniformBounds(f64, f64),
    #[error("ewma parameter must be positive and finite, got {0}")]
    BadEwmaAlpha(f64),
    #[error("point mass location must be nonnegative, got {0}")]
    BadPointMass(f64),
    #[error("quadrature needs at least one node")]
    ZeroNodes,
    #[error("quantile probability must lie in (0, 1), got {0}")]
    BadProbability(f64),
    #[error("diagonal length must be at least 1")]
    EmptyDiagonal,
    #[error("cannot parse law spec `{0}`: {1}")]
    Parse(String, String),
}

/// A finite mixture of point masses in canonical form: locations strictly
/// increasing, duplicate locations merged, masses renormalized to sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMixture {
    atoms: Vec<(f64, f64)>, // (mass, location)
}

impl AtomicMixture {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self, LawError> {
        if atoms.is_empty() {
            return Err(LawError::EmptyMixture);
        }
        for &(p, x) in &atoms {
            if !(p > 0.0) || !p.is_finite() {
                return Err(LawError::NonPositiveMass(p));
            }
            if !(x >= 0.0) || !x.is_finite() {
                return Err(LawError::NegativeLocation(x));
            }
        }
        atoms.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (p, x) in atoms {
            match merged.last_mut() {
                Some(last) if last.1 == x => last.0 += p,
                _ => merged.push((p, x)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(LawError::MassNotNormalized(total));
        }
        // Renormalize to a fixed point so that canonicalization is
        // idempotent and formatted specs reparse bit-exactly.
        for _ in 0..10 {
            let total: f64 = merged.iter().map(|a| a.0).sum();
            if total == 1.0 {
                break;
            }
            let mut changed = false;
            for a in &mut merged {
                let next = a.0 / total;
                if next != a.0 {
                    a.0 = next;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(Self { atoms: merged })
    }

    /// Atoms as `(mass, location)` pairs, locations strictly increasing.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(p, x)| p * x).sum()
    }

    fn mass_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|&&(_, loc)| loc == x)
            .map(|&(p, _)| p)
            .sum()
    }

    /// Left-continuous generalized inverse of the cdf staircase.
    fn quantile(&self, p: f64) -> f64 {
        let mut cum = 0.0;
        for &(mass, loc) in &self.atoms {
            cum += mass;
            if cum >= p - 1e-15 {
                return loc;
            }
        }
        self.atoms.last().expect("nonempty mixture").1
    }

    fn max_support(&self) -> f64 {
        self.atoms.last().expect("nonempty mixture").1
    }
}

/// The population spectral law `H`, supported on `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralLaw {
    PointMass(f64),
    Mixture(AtomicMixture),
}

impl SpectralLaw {
    pub fn point_mass(x: f64) -> Result<Self, LawError> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(LawError::BadPointMass(x));
        }
        Ok(Self::PointMass(x))
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::PointMass(x) => *x,
            Self::Mixture(m) => m.mean(),
        }
    }

    /// Mass that the law places exactly at 0.
    pub fn mass_at_zero(&self) -> f64 {
        match self {
            Self::PointMass(x) => {
                if *x == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Mixture(m) => m.mass_at(0.0),
        }
    }

    pub fn max_support(&self) -> f64 {
        match self {
            Self::PointMass(x) => *x,
            Self::Mixture(m) => m.max_support(),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64, LawError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(LawError::BadProbability(p));
        }
        Ok(match self {
            Self::PointMass(x) => *x,
            Self::Mixture(m) => m.quantile(p),
        })
    }

    pub fn quadrature(&self, n_nodes: usize) -> Result<Quadrature, LawError> {
        if n_nodes == 0 {
            return Err(LawError::ZeroNodes);
        }
        Ok(match self {
            Self::PointMass(x) => Quadrature {
                nodes: vec![*x],
                weights: vec![1.0],
            },
            Self::Mixture(m) => Quadrature {
                nodes: m.atoms.iter().map(|a| a.1).collect(),
                weights: m.atoms.iter().map(|a| a.0).collect(),
            },
        })
    }
}

/// The weight law `D`, supported on `[0, inf)`.
///
/// `ExpWeighted(alpha)` is the EWMA law: cdf `D(x) = 1 + log(x/beta)/alpha`
/// on `[beta e^{-alpha}, beta]` with `beta = alpha / (1 - e^{-alpha})`, which
/// pins the mean to exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightLaw {
    PointMass(f64),
    Mixture(AtomicMixture),
    Uniform { lo: f64, hi: f64 },
    ExpWeighted { alpha: f64 },
}

impl WeightLaw {
    pub fn point_mass(w: f64) -> Result<Self, LawError> {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(LawError::BadPointMass(w));
        }
        Ok(Self::PointMass(w))
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, LawError> {
        if !(lo >= 0.0 && hi > lo) || !hi.is_finite() {
            return Err(LawError::BadUniformBounds(lo, hi));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn exp_weighted(alpha: f64) -> Result<Self, LawError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(LawError::BadEwmaAlpha(alpha));
        }
        Ok(Self::ExpWeighted { alpha })
    }

    /// `beta = alpha / (1 - e^{-alpha})`, the upper end of the EWMA support.
    pub fn ewma_beta(alpha: f64) -> f64 {
        alpha / (-(-alpha).exp_m1())
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::PointMass(w) => *w,
            Self::Mixture(m) => m.mean(),
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::ExpWeighted { .. } => 1.0,
        }
    }

    pub fn max_support(&self) -> f64 {
        match self {
            Self::PointMass(w) => *w,
            Self::Mixture(m) => m.max_support(),
            Self::Uniform { hi, .. } => *hi,
            Self::ExpWeighted { alpha } => Self::ewma_beta(*alpha),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64, LawError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(LawError::BadProbability(p));
        }
        Ok(match self {
            Self::PointMass(w) => *w,
            Self::Mixture(m) => m.quantile(p),
            Self::Uniform { lo, hi } => lo + p * (hi - lo),
            Self::ExpWeighted { alpha } => {
                Self::ewma_beta(*alpha) * (-alpha * (1.0 - p)).exp()
            }
        })
    }

    /// Probability quadrature for `\int g dD`.
    ///
    /// Atoms map to themselves (`n_nodes` ignored). `Uniform` uses
    /// Gauss-Legendre on `[lo, hi]`. `ExpWeighted` uses the substitution
    /// `delta = beta e^{-alpha t}` with Gauss-Legendre in `t` over `[0, 1]`,
    /// so `\int g dD = \int_0^1 g(beta e^{-alpha t}) dt`.
    pub fn quadrature(&self, n_nodes: usize) -> Result<Quadrature, LawError> {
        if n_nodes == 0 {
            return Err(LawError::ZeroNodes);
        }
        Ok(match self {
            Self::PointMass(w) => Quadrature {
                nodes: vec![*w],
                weights: vec![1.0],
            },
            Self::Mixture(m) => Quadrature {
                nodes: m.atoms.iter().map(|a| a.1).collect(),
                weights: m.atoms.iter().map(|a| a.0).collect(),
            },
            Self::Uniform { lo, hi } => {
                let (xs, ws) = gauss_legendre(n_nodes);
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                Quadrature {
                    nodes: xs.iter().map(|&x| mid + half * x).collect(),
                    weights: ws.iter().map(|&w| 0.5 * w).collect(),
                }
            }
            Self::ExpWeighted { alpha } => {
                let (xs, ws) = gauss_legendre(n_nodes);
                let beta = Self::ewma_beta(*alpha);
                Quadrature {
                    nodes: xs
                        .iter()
                        .map(|&x| beta * (-alpha * 0.5 * (x + 1.0)).exp())
                        .collect(),
                    weights: ws.iter().map(|&w| 0.5 * w).collect(),
                }
            }
        })
    }

    /// Deterministic weight diagonal of length `n`.
    ///
    /// Entry `i` (1-based) is `quantile((i - 1/2) / n)`, rescaled
    /// multiplicatively so the sample mean equals `mean(self)` exactly,
    /// output sorted descending.
    pub fn sample_diagonal(&self, n: usize) -> Result<Vec<f64>, LawError> {
        if n == 0 {
            return Err(LawError::EmptyDiagonal);
        }
        let mut diag: Vec<f64> = (1..=n)
            .map(|i| {
                let p = (i as f64 - 0.5) / n as f64;
                self.quantile(p).expect("midpoint probability is in (0,1)")
            })
            .collect();
        let sample_mean = diag.iter().sum::<f64>() / n as f64;
        if sample_mean > 0.0 {
            let scale = self.mean() / sample_mean;
            for w in &mut diag {
                *w *= scale;
            }
        }
        diag.sort_by(|a, b| b.total_cmp(a));
        Ok(diag)
    }
}

/// A probability quadrature rule: weights are positive and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.nodes.iter().copied())
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(w, x)| w * g(x)).sum()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (weights sum to 2).
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess for the i-th root of P_n, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

// ---------------------------------------------------------------------------
// Law spec mini-format: dirac:w | mix:p1@x1,p2@x2,... | unif:lo,hi | ewma:a
// ---------------------------------------------------------------------------

fn parse_f64(s: &str, full: &str) -> Result<f64, LawError> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| LawError::Parse(full.to_string(), format!("bad number `{s}`: {e}")))
}

fn parse_mixture(body: &str, full: &str) -> Result<AtomicMixture, LawError> {
    let mut atoms = Vec::new();
    for part in body.split(',') {
        let (p, x) = part
            .split_once('@')
            .ok_or_else(|| LawError::Parse(full.to_string(), format!("expected `mass@loc`, got `{part}`")))?;
        atoms.push((parse_f64(p, full)?, parse_f64(x, full)?));
    }
    AtomicMixture::new(atoms)
        .map_err(|e| LawError::Parse(full.to_string(), e.to_string()))
}

impl FromStr for SpectralLaw {
    type Err = LawError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| LawError::Parse(s.to_string(), "expected `kind:args`".into()))?;
        match kind {
            "dirac" => SpectralLaw::point_mass(parse_f64(body, s)?),
            "mix" => Ok(SpectralLaw::Mixture(parse_mixture(body, s)?)),
            other => Err(LawError::Parse(
                s.to_string(),
                format!("unknown spectral law kind `{other}` (expected dirac or mix)"),
            )),
        }
    }
}

impl fmt::Display for SpectralLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PointMass(x) => write!(f, "dirac:{x}"),
            Self::Mixture(m) => {
                write!(f, "mix:")?;
                for (i, (p, x)) in m.atoms().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}@{x}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for WeightLaw {
    type Err = LawError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| LawError::Parse(s.to_string(), "expected `kind:args`".into()))?;
        match kind {
            "dirac" => WeightLaw::point_mass(parse_f64(body, s)?),
            "mix" => Ok(WeightLaw::Mixture(parse_mixture(body, s)?)),
            "unif" => {
                let (lo, hi) = body
                    .split_once(',')
                    .ok_or_else(|| LawError::Parse(s.to_string(), "expected `unif:lo,hi`".into()))?;
                WeightLaw::uniform(parse_f64(lo, s)?, parse_f64(hi, s)?)
            }
            "ewma" => WeightLaw::exp_weighted(parse_f64(body, s)?),
            other => Err(LawError::Parse(
                s.to_string(),
                format!("unknown weight law kind `{other}`"),
            )),
        }
    }
}

impl fmt::Display for WeightLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PointMass(w) => write!(f, "dirac:{w}"),
            Self::Mixture(m) => {
                write!(f, "mix:")?;
                for (i, (p, x)) in m.atoms().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}@{x}")?;
                }
                Ok(())
            }
            Self::Uniform { lo, hi } => write!(f, "unif:{lo},{hi}"),
            Self::ExpWeighted { alpha } => write!(f, "ewma:{alpha}"),
        }
    }
}
