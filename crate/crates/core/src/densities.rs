//! Lévy and potential densities of subordinators, recovered by numerical
//! Laplace inversion, and checks of their small-time asymptotics.
//!
//! Both targets share one representation: for `f = φ` (Lévy density `μ`) or
//! `f = 1/φ` (potential density `u`),
//!
//! ```text
//! |f(λ+ε) - f(λ)| = ∫ (e^{-λt} - e^{-(λ+ε)t}) ν(t) dt,
//! ```
//!
//! and differentiating in `ε` at zero gives `|f'(λ)| = ∫ e^{-λt} t ν(t) dt`.
//! So `t ν(t)` is the inverse Laplace transform of `|f'|`.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_li};

use crate::bernstein::{Family, LaplaceExponent, ScalingCertificate};
use crate::error::{Error, Result};
use crate::grid::loglog_interp;
use crate::inversion::{invert_with_estimate, Stehfest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    /// Lévy density `μ`.
    Levy,
    /// Potential density `u`.
    Potential,
}

impl DensityKind {
    pub fn tag(&self) -> &'static str {
        match self {
            DensityKind::Levy => "levy",
            DensityKind::Potential => "potential",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Provenance {
    ClosedForm(String),
    Inverted { method: String, order: usize },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ClosedForm(tag) => write!(f, "closed-form:{tag}"),
            Provenance::Inverted { method, order } => write!(f, "inverted:{method}:{order}"),
        }
    }
}

/// Gridded density values with per-point relative error estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityTable {
    pub kind: DensityKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
    pub err_est: Vec<f64>,
}

impl DensityTable {
    pub fn new(
        kind: DensityKind,
        grid: Vec<f64>,
        values: Vec<f64>,
        provenance: Provenance,
        err_est: Vec<f64>,
    ) -> Result<Self> {
        if grid.len() != values.len() || grid.len() != err_est.len() {
            return Err(Error::InvalidParameter("grid, values and err_est must have equal length".into()));
        }
        if grid.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Domain("density grid must be positive".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("density grid must be strictly increasing".into()));
        }
        Ok(Self { kind, grid, values, provenance, err_est })
    }

    /// Grid points `t_{i+1}` where the value failed to decrease strictly or
    /// was not positive.
    pub fn monotonicity_violations(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.grid.iter().zip(&self.values).filter(|(_, &v)| !(v > 0.0)).map(|(&t, _)| t).collect();
        out.extend(
            self.grid
                .windows(2)
                .zip(self.values.windows(2))
                .filter(|(_, v)| v[1] >= v[0])
                .map(|(t, _)| t[1]),
        );
        out
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.monotonicity_violations().is_empty()
    }

    /// Log-log interpolated value; `None` outside the grid.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        loglog_interp(&self.grid, &self.values, t)
    }

    pub fn max_err_est(&self) -> f64 {
        self.err_est.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with header `t,value,err_est,provenance`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,value,err_est,provenance")?;
        let prov = self.provenance.to_string();
        for ((t, v), e) in self.grid.iter().zip(&self.values).zip(&self.err_est) {
            writeln!(w, "{t:.17e},{v:.17e},{e:.6e},{prov}")?;
        }
        Ok(())
    }

    /// Conventional file name `{family}_{kind}.csv`.
    pub fn file_name(&self, exponent: &LaplaceExponent) -> String {
        format!("{}_{}.csv", exponent.family().tag(), self.kind.tag())
    }
}

/// The function `f` whose increments are represented by the density, via `|f'|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionTarget {
    pub exponent: LaplaceExponent,
    pub kind: DensityKind,
}

impl InversionTarget {
    pub fn new(exponent: LaplaceExponent, kind: DensityKind) -> Self {
        Self { exponent, kind }
    }

    pub fn levy(exponent: LaplaceExponent) -> Self {
        Self::new(exponent, DensityKind::Levy)
    }

    pub fn potential(exponent: LaplaceExponent) -> Self {
        Self::new(exponent, DensityKind::Potential)
    }

    /// `f(λ)`: `φ` or `1/φ`.
    pub fn f(&self, lambda: f64) -> f64 {
        let phi = self.exponent.phi_unchecked(lambda);
        match self.kind {
            DensityKind::Levy => phi,
            DensityKind::Potential => 1.0 / phi,
        }
    }

    /// `|f'(λ)|`: `φ'` or `φ'/φ²`.
    pub fn abs_derivative(&self, lambda: f64) -> f64 {
        let dphi = self.exponent.phi_prime_unchecked(lambda);
        match self.kind {
            DensityKind::Levy => dphi,
            DensityKind::Potential => {
                let phi = self.exponent.phi_unchecked(lambda);
                dphi / (phi * phi)
            }
        }
    }

    /// Grid points where `|f'|` increases (it must be nonincreasing).
    pub fn derivative_monotonicity_violations(&self, grid: &[f64]) -> Vec<f64> {
        grid.windows(2)
            .filter(|w| self.abs_derivative(w[1]) > self.abs_derivative(w[0]) * (1.0 + 1e-12))
            .map(|w| w[1])
            .collect()
    }

    /// Exponential damping `c` with `ν(t) = e^{-ct} ν̃(t)` and `ν̃` inverted
    /// from `|f'|(λ - c)`. Only Lévy densities of families whose `φ'` is
    /// analytic left of the origin are damped; `1/φ` has a pole at 0.
    pub fn damping(&self) -> f64 {
        match self.kind {
            DensityKind::Levy => self.exponent.levy_damping(),
            DensityKind::Potential => 0.0,
        }
    }

    fn shifted_abs_derivative(&self, s: f64, shift: f64) -> f64 {
        if shift == 0.0 {
            self.abs_derivative(s)
        } else {
            self.exponent.phi_prime_continued(s - shift)
        }
    }
}

/// Closed-form densities known for the stable and gamma subordinators.
pub fn closed_form_value(exponent: &LaplaceExponent, kind: DensityKind, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("density argument must be positive, got {t}")));
    }
    match (exponent.family(), kind) {
        (Family::StablePure { alpha }, DensityKind::Levy) => {
            let a = alpha / 2.0;
            Ok(a / gamma(1.0 - a) * t.powf(-1.0 - a))
        }
        (Family::StablePure { alpha }, DensityKind::Potential) => {
            let a = alpha / 2.0;
            Ok(t.powf(a - 1.0) / gamma(a))
        }
        (Family::GammaPure, DensityKind::Levy) => Ok((-t).exp() / t),
        (family, kind) => Err(Error::Unsupported(format!(
            "no closed-form {} density for {}",
            kind.tag(),
            family.tag()
        ))),
    }
}

pub fn has_closed_form(exponent: &LaplaceExponent, kind: DensityKind) -> bool {
    closed_form_value(exponent, kind, 1.0).is_ok()
}

pub fn closed_form_density(exponent: &LaplaceExponent, kind: DensityKind, grid: &[f64]) -> Result<DensityTable> {
    let values = grid.iter().map(|&t| closed_form_value(exponent, kind, t)).collect::<Result<Vec<_>>>()?;
    let tag = format!("{}-{}", exponent.family().tag(), kind.tag());
    DensityTable::new(kind, grid.to_vec(), values, Provenance::ClosedForm(tag), vec![0.0; grid.len()])
}

/// Default inversion order.
pub const DEFAULT_ORDER: usize = 16;
/// Order-halving discrepancy above which inversion is declared unstable.
pub const INSTABILITY_THRESHOLD: f64 = 0.1;

/// Pointwise inverter for one target; holds both Stehfest orders.
#[derive(Debug, Clone)]
pub struct PointInverter {
    target: InversionTarget,
    shift: f64,
    high: Stehfest,
    low: Stehfest,
}

impl PointInverter {
    pub fn new(target: InversionTarget, order: usize) -> Result<Self> {
        if order < 8 || order % 2 != 0 {
            return Err(Error::InvalidParameter(format!("inversion order must be even and >= 8, got {order}")));
        }
        Ok(Self { target, shift: target.damping(), high: Stehfest::new(order)?, low: Stehfest::new(order / 2)? })
    }

    pub fn target(&self) -> &InversionTarget {
        &self.target
    }

    pub fn order(&self) -> usize {
        self.high.order()
    }

    /// `(ν(t), relative discrepancy between order and order/2)`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (v, disc) =
            invert_with_estimate(&self.high, &self.low, |s| self.target.shifted_abs_derivative(s, self.shift), t);
        ((-self.shift * t).exp() * v / t, disc)
    }
}

fn check_order(order: usize) -> Result<()> {
    if order < 8 || order % 2 != 0 {
        return Err(Error::InvalidParameter(format!("inversion order must be even and >= 8, got {order}")));
    }
    Ok(())
}

/// Inverts `t ↦ ν(t)` given pointwise `(value, discrepancy)`; fails on the
/// first point with discrepancy above 10% or a non-positive value.
fn collect_inverted<F: Fn(f64) -> (f64, f64) + Sync>(eval: F, grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("inversion grid must be positive".into()));
    }
    let pts: Vec<(f64, f64)> = grid.par_iter().map(|&t| eval(t)).collect();
    for (&t, &(v, disc)) in grid.iter().zip(&pts) {
        if !(v > 0.0) || !(disc <= INSTABILITY_THRESHOLD) {
            return Err(Error::InversionInstability { t, discrepancy: disc });
        }
    }
    Ok(pts.into_iter().unzip())
}

/// `ν` on `grid` by Gaver-Stehfest inversion of `|f'|`.
pub fn invert_density(target: &InversionTarget, grid: &[f64], order: usize) -> Result<DensityTable> {
    check_order(order)?;
    let inv = PointInverter::new(*target, order)?;
    let (values, err_est) = collect_inverted(|t| inv.eval(t), grid)?;
    DensityTable::new(
        target.kind,
        grid.to_vec(),
        values,
        Provenance::Inverted { method: "gaver-stehfest".into(), order },
        err_est,
    )
}

/// `μ(t) t² / φ'(1/t)` for grid points `t <= t_max`.
pub fn levy_asymptotic_ratio(table: &DensityTable, exponent: &LaplaceExponent, t_max: f64) -> Result<Vec<(f64, f64)>> {
    if table.kind != DensityKind::Levy {
        return Err(Error::InvalidParameter("levy_asymptotic_ratio needs a Lévy density table".into()));
    }
    Ok(table
        .grid
        .iter()
        .zip(&table.values)
        .filter(|(&t, _)| t <= t_max)
        .map(|(&t, &v)| (t, v * t * t / exponent.phi_prime_unchecked(1.0 / t)))
        .collect())
}

/// `u(t) t² φ(1/t)² / φ'(1/t)` for grid points `t <= t_max`.
pub fn potential_asymptotic_ratio(
    table: &DensityTable,
    exponent: &LaplaceExponent,
    t_max: f64,
) -> Result<Vec<(f64, f64)>> {
    if table.kind != DensityKind::Potential {
        return Err(Error::InvalidParameter("potential_asymptotic_ratio needs a potential density table".into()));
    }
    Ok(table
        .grid
        .iter()
        .zip(&table.values)
        .filter(|(&t, _)| t <= t_max)
        .map(|(&t, &v)| {
            let l = 1.0 / t;
            let phi = exponent.phi_unchecked(l);
            (t, v * t * t * phi * phi / exponent.phi_prime_unchecked(l))
        })
        .collect())
}

/// `(1 - 2/e)^{-1}`.
pub fn upper_bound_constant() -> f64 {
    1.0 / (1.0 - 2.0 * (-1.0f64).exp())
}

/// Relative slack on both appendix inequalities to absorb inversion error.
pub const BOUND_SLACK: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub holds: bool,
    /// Extreme of `ν(t) t² / |f'|(1/t)` over the checked points (max for the
    /// upper bound, min for the lower).
    pub extreme_ratio: f64,
    pub checked: usize,
    pub violations: Vec<f64>,
}

/// `ν(t) t² <= (1 - 2/e)^{-1} |f'|(1/t) (1 + 1%)` at every grid point.
pub fn appendix_upper_bound_check(table: &DensityTable, target: &InversionTarget) -> Result<BoundReport> {
    if table.kind != target.kind {
        return Err(Error::InvalidParameter("table and target describe different densities".into()));
    }
    let bound = upper_bound_constant() * (1.0 + BOUND_SLACK);
    let mut extreme: f64 = 0.0;
    let mut violations = Vec::new();
    for (&t, &v) in table.grid.iter().zip(&table.values) {
        let ratio = v * t * t / target.abs_derivative(1.0 / t);
        extreme = extreme.max(ratio);
        if ratio > bound {
            violations.push(t);
        }
    }
    Ok(BoundReport { holds: violations.is_empty(), extreme_ratio: extreme, checked: table.grid.len(), violations })
}

/// Smallest `r0 ∈ (0, 1]` cut-off with `c1/(1-2/e) ∫_0^{r0} e^{-z} z^{δ-1} dz <= 1/2`;
/// returns 1 when the whole unit interval qualifies, otherwise the root.
pub fn solve_r0(c1: f64, delta: f64) -> Result<f64> {
    if !(c1 > 0.0 && c1.is_finite() && delta > 0.0 && delta.is_finite()) {
        return Err(Error::Certification(format!("invalid scaling constants c1={c1}, delta={delta}")));
    }
    let lhs = |r: f64| c1 * upper_bound_constant() * gamma_li(delta, r);
    if lhs(1.0) <= 0.5 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > 0.0 {
        Ok(lo)
    } else {
        Err(Error::Certification(format!("no r0 in (0, 1] for c1={c1}, delta={delta}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub r0: f64,
    pub c2: f64,
    pub report: BoundReport,
}

/// Lower-bound constant `c2` and the check
/// `ν(t) >= (1 - 1%) c2 t^{-2} |f'|(1/t)` for grid `t <= 1/λ0`.
///
/// `ν(1/λ0)` is read from the table, which must cover `1/λ0`.
pub fn appendix_lower_bound_constant(
    table: &DensityTable,
    target: &InversionTarget,
    certificate: &ScalingCertificate,
) -> Result<LowerBoundReport> {
    if table.kind != target.kind {
        return Err(Error::InvalidParameter("table and target describe different densities".into()));
    }
    let r0 = solve_r0(certificate.sigma, certificate.delta)?;
    let lambda0 = certificate.lambda0;
    let t0 = 1.0 / lambda0;
    let nu_t0 = table
        .value_at(t0)
        .ok_or_else(|| Error::Domain(format!("table does not cover t = 1/lambda0 = {t0:e}")))?;
    let c2 = (r0 * r0 * r0.exp() / (2.0 * (r0 + 1.0)))
        .min(nu_t0 * r0 * r0 / (lambda0 * lambda0 * target.abs_derivative(lambda0)));

    let mut extreme = f64::INFINITY;
    let mut violations = Vec::new();
    let mut checked = 0;
    for (&t, &v) in table.grid.iter().zip(&table.values).filter(|(&t, _)| t <= t0) {
        checked += 1;
        let ratio = v * t * t / target.abs_derivative(1.0 / t);
        extreme = extreme.min(ratio);
        if ratio < c2 * (1.0 - BOUND_SLACK) {
            violations.push(t);
        }
    }
    Ok(LowerBoundReport {
        r0,
        c2,
        report: BoundReport { holds: violations.is_empty(), extreme_ratio: extreme, checked, violations },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::{certify_upper_scaling, ScalingGrid};
    use crate::grid::{log_grid, log_grid_per_decade};
    use std::f64::consts::PI;

    #[test]
    fn closed_form_examples() {
        let g = LaplaceExponent::gamma();
        let v = closed_form_value(&g, DensityKind::Levy, 0.5).unwrap();
        assert!((v - 1.213_061_319_425_267).abs() < 1e-12);
        let st = LaplaceExponent::stable(1.0).unwrap();
        let mu = closed_form_value(&st, DensityKind::Levy, 1.0).unwrap();
        assert!((mu - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-14);
        let u = closed_form_value(&st, DensityKind::Potential, 1.0).unwrap();
        assert!((u - 1.0 / PI.sqrt()).abs() < 1e-14);
        assert!(matches!(closed_form_value(&g, DensityKind::Potential, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn inversion_examples() {
        let g = LaplaceExponent::gamma();
        let t = invert_density(&InversionTarget::levy(g), &[0.5], 16).unwrap();
        assert!((t.values[0] / 1.213_061_319_425_267 - 1.0).abs() < 5e-3);

        let st = LaplaceExponent::stable(1.0).unwrap();
        let t = invert_density(&InversionTarget::levy(st), &[1e-3], 16).unwrap();
        let exact = 1.0 / (2.0 * PI.sqrt()) * 10f64.powf(4.5);
        assert!((t.values[0] / exact - 1.0).abs() < 5e-3);

        let t = invert_density(&InversionTarget::potential(st), &[1.0], 16).unwrap();
        assert!((t.values[0] * PI.sqrt() - 1.0).abs() < 5e-3);
    }

    #[test]
    fn inversion_rejects_bad_order() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        assert!(invert_density(&InversionTarget::levy(st), &[1.0], 6).is_err());
        assert!(invert_density(&InversionTarget::levy(st), &[1.0], 15).is_err());
    }

    #[test]
    fn damped_inversion_reaches_exponential_tail() {
        // t μ(t) = e^{-t}: undamped, this is below cancellation noise at t = 100.
        let g = LaplaceExponent::gamma();
        let t = invert_density(&InversionTarget::levy(g), &[1.0, 100.0], 16).unwrap();
        let exact = (-100.0f64).exp() / 100.0;
        assert!((t.values[1] / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn oscillatory_transform_is_flagged_unstable() {
        // L[sin t] = 1 / (1 + s²): real-axis inversion cannot follow oscillations.
        let high = Stehfest::new(16).unwrap();
        let low = Stehfest::new(8).unwrap();
        let eval = |t: f64| invert_with_estimate(&high, &low, |s| 1.0 / (1.0 + s * s), t);
        let err = collect_inverted(eval, &[0.5, 20.0]).unwrap_err();
        assert!(matches!(err, Error::InversionInstability { t, .. } if t == 20.0));
    }

    #[test]
    fn stable_levy_ratio_is_constant() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        let grid = log_grid(1e-6, 1e-2, 20).unwrap();
        let table = closed_form_density(&st, DensityKind::Levy, &grid).unwrap();
        for (_, r) in levy_asymptotic_ratio(&table, &st, 1e-2).unwrap() {
            assert!((r - 1.0 / PI.sqrt()).abs() < 1e-12);
        }
        let table = closed_form_density(&st, DensityKind::Potential, &grid).unwrap();
        for (_, r) in potential_asymptotic_ratio(&table, &st, 1e-2).unwrap() {
            assert!((r - 2.0 / PI.sqrt()).abs() < 1e-12);
        }
        assert!(levy_asymptotic_ratio(&table, &st, 1.0).is_err());
    }

    #[test]
    fn gamma_levy_ratio_tends_to_one() {
        // t² μ(t) / φ'(1/t) = e^{-t} (1 + t) exactly.
        let g = LaplaceExponent::gamma();
        let grid = log_grid(1e-8, 1e-2, 10).unwrap();
        let table = closed_form_density(&g, DensityKind::Levy, &grid).unwrap();
        for (t, r) in levy_asymptotic_ratio(&table, &g, 1.0).unwrap() {
            assert!((r - (-t).exp() * (1.0 + t)).abs() < 1e-12);
        }
    }

    #[test]
    fn r0_closed_form_for_delta_one() {
        let r0 = solve_r0(1.0, 1.0).unwrap();
        let expect = -(1.0 - (1.0 - 2.0 * (-1.0f64).exp()) / 2.0).ln();
        assert!((r0 - expect).abs() < 1e-12, "{r0} vs {expect}");
        assert!((r0 - 0.141_702_466_6).abs() < 1e-9);
    }

    #[test]
    fn r0_is_one_for_tiny_constant() {
        assert_eq!(solve_r0(1e-3, 1.0).unwrap(), 1.0);
        assert!(solve_r0(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn upper_bound_for_stable() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        let grid = log_grid_per_decade(1e-6, 1e2, 10).unwrap();
        let table = closed_form_density(&st, DensityKind::Levy, &grid).unwrap();
        let rep = appendix_upper_bound_check(&table, &InversionTarget::levy(st)).unwrap();
        assert!(rep.holds);
        assert!((rep.extreme_ratio - 1.0 / PI.sqrt()).abs() < 1e-12);
        assert!(rep.extreme_ratio < upper_bound_constant());
    }

    #[test]
    fn lower_bound_for_stable() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        let grid = log_grid_per_decade(1e-6, 1e2, 10).unwrap();
        let table = closed_form_density(&st, DensityKind::Levy, &grid).unwrap();
        let sg = ScalingGrid::new(1.0, 1e8, 1e6, 50, 50).unwrap();
        let cert = certify_upper_scaling(&st, 1.0, 0.5, &sg).unwrap();
        let rep = appendix_lower_bound_constant(&table, &InversionTarget::levy(st), &cert).unwrap();
        assert!(rep.report.holds);
        assert!(rep.c2 <= 1.0 / PI.sqrt());
        // Near t = 1/λ0 the floor branch makes the inequality tight but valid.
        let at_t0 = table.value_at(1.0).unwrap() / InversionTarget::levy(st).abs_derivative(1.0);
        assert!(at_t0 >= rep.c2);
    }

    #[test]
    fn monotonicity_detection() {
        let t = DensityTable::new(
            DensityKind::Levy,
            vec![1.0, 2.0, 3.0],
            vec![3.0, 3.0, 1.0],
            Provenance::ClosedForm("x".into()),
            vec![0.0; 3],
        )
        .unwrap();
        assert_eq!(t.monotonicity_violations(), vec![2.0]);
        assert!(DensityTable::new(DensityKind::Levy, vec![1.0, 1.0], vec![1.0, 1.0], Provenance::ClosedForm("x".into()), vec![0.0; 2]).is_err());
    }

    #[test]
    fn csv_header() {
        let st = LaplaceExponent::stable(1.0).unwrap();
        let table = closed_form_density(&st, DensityKind::Levy, &[1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("t,value,err_est,provenance\n"));
        assert_eq!(s.lines().count(), 3);
        assert_eq!(table.file_name(&st), "stable_levy.csv");
    }
}
