//! Laplace exponents of subordinators and grid checks of their scaling
//! conditions.
//!
//! All families here have zero drift. Checks that are universally quantified
//! in theory (upper and lower scaling of `φ'`) are certified on geometric
//! sample grids only; a passing certificate is evidence, not a proof.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::log_grid;

/// Built-in subordinator families.
///
/// `alpha` is the stability index in `(0, 2]`; the subordinator itself has
/// index `alpha / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `log(1 + λ^{α/2})`
    GeometricStable { alpha: f64 },
    /// `φ_1 = log(1 + λ^{α/2})`, `φ_{n+1} = φ_1 ∘ φ_n`
    IteratedGeometricStable { alpha: f64, depth: u32 },
    /// `log(1 + (λ + m^{2/α})^{α/2} - m)`
    RelativisticGeometricStable { alpha: f64, mass: f64 },
    /// `λ^{α/2}`
    StablePure { alpha: f64 },
    /// `log(1 + λ)`
    GammaPure,
    /// `λ^{α/2} log(1 + λ)^{1 - α/2}`
    RegVaryingExample { alpha: f64 },
}

impl Family {
    /// Short kebab-case tag, used in file names.
    pub fn tag(&self) -> &'static str {
        match self {
            Family::GeometricStable { .. } => "geometric-stable",
            Family::IteratedGeometricStable { .. } => "iterated-geometric-stable",
            Family::RelativisticGeometricStable { .. } => "relativistic-geometric-stable",
            Family::StablePure { .. } => "stable",
            Family::GammaPure => "gamma",
            Family::RegVaryingExample { .. } => "reg-varying",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Family::GeometricStable { alpha }
            | Family::IteratedGeometricStable { alpha, .. }
            | Family::RelativisticGeometricStable { alpha, .. }
            | Family::StablePure { alpha }
            | Family::RegVaryingExample { alpha } => Some(alpha),
            Family::GammaPure => None,
        }
    }
}

/// Laplace exponent `φ` of a driftless subordinator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct LaplaceExponent {
    family: Family,
}

impl TryFrom<Family> for LaplaceExponent {
    type Error = Error;
    fn try_from(family: Family) -> Result<Self> {
        LaplaceExponent::new(family)
    }
}

impl From<LaplaceExponent> for Family {
    fn from(e: LaplaceExponent) -> Family {
        e.family
    }
}

fn check_alpha(alpha: f64, allow_two: bool) -> Result<()> {
    let ok = alpha > 0.0 && if allow_two { alpha <= 2.0 } else { alpha < 2.0 };
    if ok {
        Ok(())
    } else {
        let range = if allow_two { "(0, 2]" } else { "(0, 2)" };
        Err(Error::InvalidParameter(format!("alpha must lie in {range}, got {alpha}")))
    }
}

impl LaplaceExponent {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::GeometricStable { alpha } => check_alpha(alpha, true)?,
            Family::IteratedGeometricStable { alpha, depth } => {
                check_alpha(alpha, true)?;
                if depth == 0 {
                    return Err(Error::InvalidParameter("iteration depth must be >= 1".into()));
                }
            }
            Family::RelativisticGeometricStable { alpha, mass } => {
                check_alpha(alpha, false)?;
                if !(mass > 0.0 && mass.is_finite()) {
                    return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
                }
            }
            Family::StablePure { alpha } | Family::RegVaryingExample { alpha } => check_alpha(alpha, false)?,
            Family::GammaPure => {}
        }
        Ok(Self { family })
    }

    pub fn geometric_stable(alpha: f64) -> Result<Self> {
        Self::new(Family::GeometricStable { alpha })
    }

    pub fn iterated_geometric_stable(alpha: f64, depth: u32) -> Result<Self> {
        Self::new(Family::IteratedGeometricStable { alpha, depth })
    }

    pub fn relativistic_geometric_stable(alpha: f64, mass: f64) -> Result<Self> {
        Self::new(Family::RelativisticGeometricStable { alpha, mass })
    }

    pub fn stable(alpha: f64) -> Result<Self> {
        Self::new(Family::StablePure { alpha })
    }

    pub fn gamma() -> Self {
        Self { family: Family::GammaPure }
    }

    pub fn reg_varying(alpha: f64) -> Result<Self> {
        Self::new(Family::RegVaryingExample { alpha })
    }

    /// One representative of every built-in family.
    pub fn builtin() -> Vec<LaplaceExponent> {
        vec![
            Self::geometric_stable(1.0).unwrap(),
            Self::iterated_geometric_stable(1.0, 2).unwrap(),
            Self::relativistic_geometric_stable(1.0, 1.0).unwrap(),
            Self::stable(1.0).unwrap(),
            Self::gamma(),
            Self::reg_varying(1.0).unwrap(),
        ]
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Drift coefficient; zero for every family under the standing conditions.
    pub fn drift(&self) -> f64 {
        0.0
    }

    /// Human-readable label including parameters.
    pub fn label(&self) -> String {
        match self.family {
            Family::GeometricStable { alpha } => format!("geometric-stable(alpha={alpha})"),
            Family::IteratedGeometricStable { alpha, depth } => {
                format!("iterated-geometric-stable(alpha={alpha},n={depth})")
            }
            Family::RelativisticGeometricStable { alpha, mass } => {
                format!("relativistic-geometric-stable(alpha={alpha},m={mass})")
            }
            Family::StablePure { alpha } => format!("stable(alpha={alpha})"),
            Family::GammaPure => "gamma".to_string(),
            Family::RegVaryingExample { alpha } => format!("reg-varying(alpha={alpha})"),
        }
    }

    /// `φ(λ)`.
    pub fn phi(&self, lambda: f64) -> Result<f64> {
        check_lambda(lambda)?;
        Ok(self.phi_unchecked(lambda))
    }

    /// `φ'(λ)` from the analytic formula of the family.
    pub fn phi_prime(&self, lambda: f64) -> Result<f64> {
        check_lambda(lambda)?;
        Ok(self.phi_prime_unchecked(lambda))
    }

    pub(crate) fn phi_unchecked(&self, lambda: f64) -> f64 {
        match self.family {
            Family::GeometricStable { alpha } => geometric(alpha / 2.0, lambda),
            Family::IteratedGeometricStable { alpha, depth } => {
                (0..depth).fold(lambda, |v, _| geometric(alpha / 2.0, v))
            }
            Family::RelativisticGeometricStable { alpha, mass } => relativistic_inner(alpha / 2.0, mass, lambda).ln_1p(),
            Family::StablePure { alpha } => lambda.powf(alpha / 2.0),
            Family::GammaPure => lambda.ln_1p(),
            Family::RegVaryingExample { alpha } => {
                let a = alpha / 2.0;
                lambda.powf(a) * lambda.ln_1p().powf(1.0 - a)
            }
        }
    }

    pub(crate) fn phi_prime_unchecked(&self, lambda: f64) -> f64 {
        match self.family {
            Family::GeometricStable { alpha } => geometric_prime(alpha / 2.0, lambda),
            Family::IteratedGeometricStable { alpha, depth } => {
                let a = alpha / 2.0;
                // Materialise the inner values so each factor is evaluated
                // at its own argument.
                let mut v = lambda;
                let mut d = 1.0;
                for _ in 0..depth {
                    d *= geometric_prime(a, v);
                    v = geometric(a, v);
                }
                d
            }
            Family::RelativisticGeometricStable { alpha, mass } => {
                let a = alpha / 2.0;
                let theta = mass.powf(1.0 / a);
                let inner = relativistic_inner(a, mass, lambda);
                a * (lambda + theta).powf(a - 1.0) / (1.0 + inner)
            }
            Family::StablePure { alpha } => {
                let a = alpha / 2.0;
                a * lambda.powf(a - 1.0)
            }
            Family::GammaPure => 1.0 / (1.0 + lambda),
            Family::RegVaryingExample { alpha } => reg_varying_prime(alpha / 2.0, lambda),
        }
    }

    /// Exponential decay rate `c >= 0` of the Lévy density: `φ'` continues
    /// analytically (and real-valued) to `λ > -c`.
    pub fn levy_damping(&self) -> f64 {
        match self.family {
            Family::GammaPure | Family::RegVaryingExample { .. } => 1.0,
            Family::RelativisticGeometricStable { alpha, mass } => {
                let a = alpha / 2.0;
                let theta = mass.powf(1.0 / a);
                if mass > 1.0 {
                    // 1 + (λ+θ)^a - m vanishes at λ = (m-1)^{1/a} - θ.
                    theta - (mass - 1.0).powf(1.0 / a)
                } else {
                    theta
                }
            }
            Family::GeometricStable { .. } | Family::IteratedGeometricStable { .. } | Family::StablePure { .. } => 0.0,
        }
    }

    /// `φ'` continued to `λ > -levy_damping()`.
    pub(crate) fn phi_prime_continued(&self, lambda: f64) -> f64 {
        match self.family {
            Family::GammaPure => 1.0 / (1.0 + lambda),
            Family::RelativisticGeometricStable { alpha, mass } => {
                let a = alpha / 2.0;
                let theta = mass.powf(1.0 / a);
                let inner = relativistic_inner(a, mass, lambda);
                a * (lambda + theta).powf(a - 1.0) / (1.0 + inner)
            }
            Family::RegVaryingExample { alpha } => reg_varying_prime(alpha / 2.0, lambda),
            _ => self.phi_prime_unchecked(lambda),
        }
    }

    /// `λ²φ'(λ)/φ(λ)²`.
    pub fn psi(&self, lambda: f64) -> Result<f64> {
        let p = self.phi(lambda)?;
        Ok(lambda * lambda * self.phi_prime_unchecked(lambda) / (p * p))
    }

    /// Solves `φ(λ) = y` for `λ` by bisection in log scale.
    pub fn phi_inverse(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::Domain(format!("phi_inverse needs y > 0, got {y}")));
        }
        let (mut lo, mut hi) = (-700.0f64, 700.0f64);
        if self.phi_unchecked(hi.exp()) < y {
            return Err(Error::Domain(format!("phi never reaches {y} below e^700")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.phi_unchecked(mid.exp()) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }

    /// Default decay exponent `δ` for the upper scaling certificate.
    ///
    /// Stable-driven families use the exact decay rate `1 - α/2` of `φ'`;
    /// families whose `φ'` decays like `1/λ` use 1. The regularly varying
    /// example carries a slowly growing log factor, so it gets `0.8 (1 - α/2)`.
    pub fn default_delta(&self) -> f64 {
        match self.family {
            Family::StablePure { alpha } => 1.0 - alpha / 2.0,
            Family::RegVaryingExample { alpha } => 0.8 * (1.0 - alpha / 2.0),
            Family::GeometricStable { .. }
            | Family::IteratedGeometricStable { .. }
            | Family::RelativisticGeometricStable { .. }
            | Family::GammaPure => 1.0,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda must be positive and finite, got {lambda}")))
    }
}

/// `φ'` of `λ^a log(1+λ)^{1-a}` through `q = log(1+λ)/λ`, real for `λ > -1`.
fn reg_varying_prime(a: f64, lambda: f64) -> f64 {
    let q = if lambda == 0.0 { 1.0 } else { lambda.ln_1p() / lambda };
    a * q.powf(1.0 - a) + (1.0 - a) * q.powf(-a) / (1.0 + lambda)
}

fn geometric(a: f64, lambda: f64) -> f64 {
    lambda.powf(a).ln_1p()
}

fn geometric_prime(a: f64, lambda: f64) -> f64 {
    let p = lambda.powf(a);
    a * p / (lambda * (1.0 + p))
}

/// `(λ + θ)^a - m` with `θ = m^{1/a}`, written to avoid cancellation at small λ.
fn relativistic_inner(a: f64, mass: f64, lambda: f64) -> f64 {
    let theta = mass.powf(1.0 / a);
    mass * (a * (lambda / theta).ln_1p()).exp_m1()
}

/// Outcome of a grid inequality scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub holds: bool,
    pub checked: usize,
    /// `(λ, x, lhs, rhs)` for every violating grid point.
    pub violations: Vec<(f64, f64, f64, f64)>,
}

/// Subadditivity `φ(λx) <= x φ(λ)` for `x >= 1`, with `1e-12`
/// relative slack.
pub fn check_subadditive_scaling(exponent: &LaplaceExponent, pairs: &[(f64, f64)]) -> Result<InequalityReport> {
    let mut violations = Vec::new();
    for &(lambda, x) in pairs {
        if x < 1.0 {
            return Err(Error::Domain(format!("scaling factor must be >= 1, got {x}")));
        }
        let lhs = exponent.phi(lambda * x)?;
        let rhs = x * exponent.phi(lambda)?;
        if lhs > rhs * (1.0 + 1e-12) {
            violations.push((lambda, x, lhs, rhs));
        }
    }
    Ok(InequalityReport { holds: violations.is_empty(), checked: pairs.len(), violations })
}

/// Product grid of `λ` values and scaling factors `x >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingGrid {
    pub lambdas: Vec<f64>,
    pub xs: Vec<f64>,
}

impl ScalingGrid {
    pub fn new(lambda0: f64, lambda_max: f64, x_max: f64, n_lambda: usize, n_x: usize) -> Result<Self> {
        if x_max < 1.0 {
            return Err(Error::Domain("x_max must be >= 1".into()));
        }
        Ok(Self { lambdas: log_grid(lambda0, lambda_max, n_lambda)?, xs: log_grid(1.0, x_max, n_x)? })
    }

    /// 200 × 200 points, `x ∈ [1, 1e6]`, `λ ∈ [λ0, 1e8]`.
    pub fn default_for(lambda0: f64) -> Result<Self> {
        Self::new(lambda0, 1e8_f64.max(lambda0 * 10.0), 1e6, 200, 200)
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.lambdas.iter().flat_map(|&l| self.xs.iter().map(move |&x| (l, x))).collect()
    }
}

/// Constants of an upper (and optionally lower) scaling condition for `φ'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCertificate {
    pub sigma: f64,
    pub delta: f64,
    pub lambda0: f64,
    pub sigma_prime: Option<f64>,
    pub delta_prime: Option<f64>,
    /// Dimensions `d <= 2` whose lower-scaling window is satisfied.
    pub dimension_window: Vec<u32>,
}

/// Largest multiplicative cap on `σ` before the certificate is refused.
pub const DEFAULT_SIGMA_CAP: f64 = 1e3;

/// Certifies `g(λx)/g(λ) <= σ x^{-δ}` on the grid for an arbitrary positive
/// function `g`; returns `σ̂ = max g(λx) x^δ / g(λ)`.
pub fn certify_upper_scaling_fn<G: Fn(f64) -> f64>(
    g: G,
    lambda0: f64,
    delta: f64,
    grid: &ScalingGrid,
    cap: f64,
) -> Result<ScalingCertificate> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(lambda0 > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda0 must be positive, got {lambda0}")));
    }
    let mut sigma: f64 = 0.0;
    for &lambda in grid.lambdas.iter().filter(|&&l| l >= lambda0) {
        let base = g(lambda);
        for &x in &grid.xs {
            sigma = sigma.max(g(lambda * x) * x.powf(delta) / base);
        }
    }
    if !sigma.is_finite() || sigma > cap {
        return Err(Error::Certification(format!(
            "sigma estimate {sigma:.4e} exceeds cap {cap:e}; delta = {delta} is likely too large"
        )));
    }
    Ok(ScalingCertificate {
        sigma,
        delta,
        lambda0,
        sigma_prime: None,
        delta_prime: None,
        dimension_window: Vec::new(),
    })
}

/// Upper scaling of `φ'` with constants `(σ̂, δ, λ0)`.
pub fn certify_upper_scaling(
    exponent: &LaplaceExponent,
    lambda0: f64,
    delta: f64,
    grid: &ScalingGrid,
) -> Result<ScalingCertificate> {
    certify_upper_scaling_fn(|l| exponent.phi_prime_unchecked(l), lambda0, delta, grid, DEFAULT_SIGMA_CAP)
}

/// Window `(lo, hi)` for `δ'` in dimension `d`, given the upper exponent `δ`.
pub fn lower_window(d: u32, delta: f64) -> (f64, f64) {
    let half_d = d as f64 / 2.0;
    (1.0 - half_d, (1.0 + half_d).min(2.0 * delta + (d as f64 - 2.0) / 2.0))
}

/// Per-dimension verdict of the lower-scaling condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowVerdict {
    pub d: u32,
    pub window: (f64, f64),
    pub delta_prime_in_window: bool,
    pub dimension_condition: bool,
    pub pass: bool,
}

/// Outcome of [`certify_lower_scaling`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerScalingReport {
    pub sigma_prime: f64,
    pub delta_prime: f64,
    pub windows: Vec<WindowVerdict>,
}

impl LowerScalingReport {
    pub fn passes(&self, d: u32) -> bool {
        self.windows.iter().any(|w| w.d == d && w.pass)
    }
}

/// Lower scaling `φ'(λx)/φ'(λ) >= σ' x^{-δ'}` plus the dimension windows for
/// `d ∈ {1, 2}`. Window arithmetic depends only on `(δ, δ')` and is evaluated
/// before the grid scan.
pub fn certify_lower_scaling(
    exponent: &LaplaceExponent,
    upper: &ScalingCertificate,
    delta_prime: f64,
    grid: &ScalingGrid,
) -> Result<LowerScalingReport> {
    let windows: Vec<WindowVerdict> = [1u32, 2]
        .into_iter()
        .map(|d| {
            let window = lower_window(d, upper.delta);
            let inside = delta_prime > window.0 && delta_prime < window.1;
            let dim_ok = d as f64 + 2.0 * upper.delta - 2.0 > 0.0;
            WindowVerdict { d, window, delta_prime_in_window: inside, dimension_condition: dim_ok, pass: inside && dim_ok }
        })
        .collect();

    let mut sigma_prime = f64::INFINITY;
    for &lambda in grid.lambdas.iter().filter(|&&l| l >= upper.lambda0) {
        let base = exponent.phi_prime_unchecked(lambda);
        for &x in &grid.xs {
            sigma_prime = sigma_prime.min(exponent.phi_prime_unchecked(lambda * x) * x.powf(delta_prime) / base);
        }
    }
    if !(sigma_prime > 1e-12) || !sigma_prime.is_finite() {
        return Err(Error::Certification(format!(
            "no lower scaling with delta' = {delta_prime}: sigma' estimate {sigma_prime:e}"
        )));
    }
    Ok(LowerScalingReport { sigma_prime, delta_prime, windows })
}

impl ScalingCertificate {
    pub fn with_lower(mut self, lower: &LowerScalingReport) -> Self {
        self.sigma_prime = Some(lower.sigma_prime);
        self.delta_prime = Some(lower.delta_prime);
        self.dimension_window = lower.windows.iter().filter(|w| w.pass).map(|w| w.d).collect();
        self
    }
}

/// `C(ε) = max φ(λx) / (φ(λ) x^{1-δ+ε})` over the grid.
pub fn growth_constant(exponent: &LaplaceExponent, delta: f64, eps: f64, grid: &ScalingGrid) -> f64 {
    let power = 1.0 - delta + eps;
    let mut c: f64 = 0.0;
    for &lambda in &grid.lambdas {
        let base = exponent.phi_unchecked(lambda);
        for &x in &grid.xs {
            c = c.max(exponent.phi_unchecked(lambda * x) / (base * x.powf(power)));
        }
    }
    c
}

/// Monotonicity of `λ²φ'(λ)` and `λ²φ'(λ)/φ(λ)²` on a log grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiReport {
    pub eta1_nondecreasing: bool,
    pub eta2_nondecreasing: bool,
    /// Grid values where either sequence dropped.
    pub violations: Vec<f64>,
}

impl PsiReport {
    pub fn holds(&self) -> bool {
        self.eta1_nondecreasing && self.eta2_nondecreasing
    }
}

pub fn check_psi_monotone(exponent: &LaplaceExponent, grid: &[f64]) -> Result<PsiReport> {
    let mut eta1_prev = f64::NEG_INFINITY;
    let mut eta2_prev = f64::NEG_INFINITY;
    let mut report = PsiReport { eta1_nondecreasing: true, eta2_nondecreasing: true, violations: Vec::new() };
    for &lambda in grid {
        let phi = exponent.phi(lambda)?;
        let eta1 = lambda * lambda * exponent.phi_prime_unchecked(lambda);
        let eta2 = eta1 / (phi * phi);
        let slack = 1.0 - 1e-12;
        let drop1 = eta1 < eta1_prev * slack;
        let drop2 = eta2 < eta2_prev * slack;
        report.eta1_nondecreasing &= !drop1;
        report.eta2_nondecreasing &= !drop2;
        if drop1 || drop2 {
            report.violations.push(lambda);
        }
        eta1_prev = eta1;
        eta2_prev = eta2;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn phi_examples() {
        let gs = LaplaceExponent::geometric_stable(1.0).unwrap();
        assert!((gs.phi(1.0).unwrap() - LN_2).abs() < 1e-15);

        let rel = LaplaceExponent::relativistic_geometric_stable(1.0, 1.0).unwrap();
        assert!(rel.phi(1e-300).unwrap() < 1e-290);

        let it = LaplaceExponent::iterated_geometric_stable(2.0, 2).unwrap();
        let v = it.phi(std::f64::consts::E - 1.0).unwrap();
        assert!((v - LN_2).abs() < 1e-15);
    }

    #[test]
    fn phi_prime_examples() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        assert!((st.phi_prime(4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((LaplaceExponent::gamma().phi_prime(1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn geometric_stable_derivative_at_large_lambda() {
        let gs = LaplaceExponent::geometric_stable(1.0).unwrap();
        let lambda = 1e6;
        let h = lambda * 1e-6;
        let fd = (gs.phi(lambda + h).unwrap() - gs.phi(lambda - h).unwrap()) / (2.0 * h);
        let exact = gs.phi_prime(lambda).unwrap();
        assert!((exact / fd - 1.0).abs() < 1e-6);
        // frozen from the finite-difference oracle: 0.5e-6 / 1.001
        assert!((exact - 4.995_004_995_004_995e-7).abs() < 1e-18);
    }

    #[test]
    fn relativistic_matches_direct_formula() {
        let (alpha, m) = (1.0, 1.0);
        let e = LaplaceExponent::relativistic_geometric_stable(alpha, m).unwrap();
        for lambda in [0.1, 1.0, 10.0] {
            let direct = (1.0 + (lambda + m * m).powf(alpha / 2.0) - m).ln();
            assert!((e.phi(lambda).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        let gs = LaplaceExponent::geometric_stable(1.0).unwrap();
        assert!(matches!(gs.phi(0.0), Err(Error::Domain(_))));
        assert!(matches!(gs.phi_prime(-1.0), Err(Error::Domain(_))));
        assert!(LaplaceExponent::stable(2.0).is_err());
        assert!(LaplaceExponent::geometric_stable(2.0).is_ok());
        assert!(LaplaceExponent::iterated_geometric_stable(1.0, 0).is_err());
        assert!(LaplaceExponent::relativistic_geometric_stable(1.0, 0.0).is_err());
    }

    #[test]
    fn subadditive_examples() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        assert!(check_subadditive_scaling(&st, &[(1.0, 2.0)]).unwrap().holds);
        let gs2 = LaplaceExponent::geometric_stable(2.0).unwrap();
        let r = check_subadditive_scaling(&gs2, &[(1.0, 10.0)]).unwrap();
        assert!(r.holds);
        assert!(11f64.ln() <= 10.0 * LN_2);
        for e in LaplaceExponent::builtin() {
            assert!(check_subadditive_scaling(&e, &[(0.3, 1.0), (7.0, 1.0)]).unwrap().holds);
        }
        assert!(check_subadditive_scaling(&st, &[(1.0, 0.5)]).is_err());
    }

    #[test]
    fn stable_upper_certificate_is_exact() {
        for alpha in [0.5, 1.0, 1.5] {
            let st = LaplaceExponent::stable(alpha).unwrap();
            let grid = ScalingGrid::new(1.0, 1e8, 1e6, 40, 40).unwrap();
            let c = certify_upper_scaling(&st, 1.0, 1.0 - alpha / 2.0, &grid).unwrap();
            assert!((c.sigma - 1.0).abs() < 1e-10, "alpha={alpha}: {}", c.sigma);
        }
    }

    #[test]
    fn gamma_upper_certificate_below_two() {
        let grid = ScalingGrid::default_for(1.0).unwrap();
        let c = certify_upper_scaling(&LaplaceExponent::gamma(), 1.0, 1.0, &grid).unwrap();
        assert!(c.sigma <= 2.0 && c.sigma > 1.0);
    }

    #[test]
    fn upper_certificate_refuses_oversized_delta() {
        // φ' of the stable family decays like x^{-1/2}; δ = 1 cannot hold.
        let st = LaplaceExponent::stable(1.0).unwrap();
        let grid = ScalingGrid::new(1.0, 1e8, 1e8, 20, 20).unwrap();
        assert!(matches!(certify_upper_scaling(&st, 1.0, 1.0, &grid), Err(Error::Certification(_))));
    }

    #[test]
    fn lower_window_stable_alpha_one() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        let grid = ScalingGrid::new(1.0, 1e6, 1e4, 30, 30).unwrap();
        let up = certify_upper_scaling(&st, 1.0, 0.5, &grid).unwrap();
        let low = certify_lower_scaling(&st, &up, 0.5, &grid).unwrap();
        assert!((low.sigma_prime - 1.0).abs() < 1e-10);
        // d = 1: (1/2, min(3/2, 1/2)) is empty.
        assert!(!low.passes(1));
        assert!(low.passes(2));
    }

    #[test]
    fn lower_window_excludes_small_delta_prime() {
        let st = LaplaceExponent::stable(1.5).unwrap();
        let grid = ScalingGrid::new(1.0, 1e6, 1e4, 30, 30).unwrap();
        let up = certify_upper_scaling(&st, 1.0, 0.25, &grid).unwrap();
        let low = certify_lower_scaling(&st, &up, 0.25, &grid).unwrap();
        let w1 = low.windows.iter().find(|w| w.d == 1).unwrap();
        assert_eq!(w1.window.0, 0.5);
        assert!(!w1.delta_prime_in_window);
        assert!((low.sigma_prime - 1.0).abs() < 1e-10);
    }

    #[test]
    fn psi_examples() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        assert!((st.psi(1.0).unwrap() - 0.5).abs() < 1e-15);
        let st = LaplaceExponent::stable(1.5).unwrap();
        let l: f64 = 9.0;
        assert!((st.psi(l).unwrap() - 0.75 * l.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn phi_inverse_roundtrip() {
        for e in LaplaceExponent::builtin() {
            for lambda in [1e-3, 1.0, 1e4] {
                let y = e.phi(lambda).unwrap();
                let back = e.phi_inverse(y).unwrap();
                assert!((back / lambda - 1.0).abs() < 1e-9, "{}: {lambda} -> {back}", e.label());
            }
        }
    }
}
