//! Jump kernel `j(r)` and Green kernel `g(r)` of a subordinate Brownian
//! motion via the subordination integral
//!
//! ```text
//! I(r) = ∫_0^∞ (4πt)^{-d/2} exp(-r²/4t) η(t) dt,
//! ```
//!
//! with `η = μ` for `j` and `η = u` for `g`. The integral is split at
//! `t = r²`. The inner piece is mapped to `s = r²/4t ∈ [1/4, ∞)`, where the
//! Gaussian factor becomes `e^{-s}`; the outer piece is integrated in
//! `log t` up to the last trusted abscissa of `η` and closed with a power-law
//! tail.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::bernstein::LaplaceExponent;
use crate::densities::{closed_form_value, has_closed_form, DensityKind, DensityTable, InversionTarget, PointInverter};
use crate::error::{Error, Result};
use crate::grid::log_grid_per_decade;
use crate::quadrature::{integrate, integrate_pieces, Quad};

/// `η(t) ≈ coef · t^exponent`, with the worst log-deviation seen in the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub coef: f64,
    pub exponent: f64,
    pub fit_residual: f64,
}

impl PowerLaw {
    pub fn eval(&self, t: f64) -> f64 {
        self.coef * t.powf(self.exponent)
    }

    /// Least-squares fit in log-log coordinates.
    pub fn fit(points: &[(f64, f64)]) -> Option<PowerLaw> {
        let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|&(t, v)| (t.ln(), v.ln())).collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx == 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        let fit_residual = pts.iter().map(|p| (p.1 - icpt - slope * p.0).abs()).fold(0.0, f64::max);
        Some(PowerLaw { coef: icpt.exp(), exponent: slope, fit_residual })
    }
}

/// A positive decreasing density usable in the subordination integral.
pub trait Eta: Sync {
    fn eval(&self, t: f64) -> f64;
    /// Largest abscissa at which [`Eta::eval`] is trusted.
    fn upper(&self) -> f64;
    /// Behaviour beyond [`Eta::upper`]; `None` when the remainder is negligible.
    fn tail(&self) -> Option<PowerLaw>;
    /// Relative noise floor of [`Eta::eval`]; quadrature tolerances are
    /// clamped to it.
    fn rel_noise(&self) -> f64 {
        0.0
    }
}

/// Closed-form `μ` or `u` of the stable and gamma subordinators.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormEta {
    exponent: LaplaceExponent,
    kind: DensityKind,
    upper: f64,
    tail: Option<PowerLaw>,
}

impl ClosedFormEta {
    pub fn new(exponent: LaplaceExponent, kind: DensityKind) -> Result<Self> {
        closed_form_value(&exponent, kind, 1.0)?;
        let (upper, tail) = match exponent.family() {
            crate::Family::StablePure { .. } => {
                let upper = 1e6;
                let c = closed_form_value(&exponent, kind, 1.0)?;
                let p = (closed_form_value(&exponent, kind, std::f64::consts::E)? / c).ln();
                (upper, Some(PowerLaw { coef: c, exponent: p, fit_residual: 0.0 }))
            }
            // e^{-t}/t underflows past t ≈ 745.
            _ => (745.0, None),
        };
        Ok(Self { exponent, kind, upper, tail })
    }
}

impl Eta for ClosedFormEta {
    fn eval(&self, t: f64) -> f64 {
        closed_form_value(&self.exponent, self.kind, t).unwrap_or(0.0)
    }
    fn upper(&self) -> f64 {
        self.upper
    }
    fn tail(&self) -> Option<PowerLaw> {
        self.tail
    }
}

/// Log-log interpolation of a [`DensityTable`], extended by power laws fitted
/// on the first and last decade of the grid.
#[derive(Debug, Clone)]
pub struct TableEta {
    table: DensityTable,
    head: PowerLaw,
    tail: PowerLaw,
}

fn decade_points(grid: &[f64], values: &[f64], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    grid.iter().zip(values).filter(|(&t, _)| t >= lo && t <= hi).map(|(&t, &v)| (t, v)).collect()
}

impl TableEta {
    pub fn new(table: DensityTable) -> Result<Self> {
        let (first, last) = (table.grid[0], *table.grid.last().expect("non-empty"));
        let head = PowerLaw::fit(&decade_points(&table.grid, &table.values, first, first * 10.0))
            .ok_or_else(|| Error::InvalidParameter("table too short for a head fit".into()))?;
        let tail = PowerLaw::fit(&decade_points(&table.grid, &table.values, last / 10.0, last))
            .ok_or_else(|| Error::InvalidParameter("table too short for a tail fit".into()))?;
        Ok(Self { table, head, tail })
    }
}

impl Eta for TableEta {
    fn eval(&self, t: f64) -> f64 {
        if t < self.table.grid[0] {
            self.head.eval(t)
        } else {
            self.table.value_at(t).unwrap_or_else(|| self.tail.eval(t))
        }
    }
    fn upper(&self) -> f64 {
        *self.table.grid.last().expect("non-empty")
    }
    fn tail(&self) -> Option<PowerLaw> {
        Some(self.tail)
    }
}

/// Pointwise Gaver-Stehfest inversion on the range where it is reliable.
#[derive(Debug, Clone)]
pub struct InvertedEta {
    inverter: PointInverter,
    lower: f64,
    upper: f64,
    head: PowerLaw,
    tail: Option<PowerLaw>,
}

/// Discrepancy above which a scanned abscissa ends the trusted range.
const RELIABLE_DISCREPANCY: f64 = 1e-3;

impl InvertedEta {
    /// Scans `[t_lo, t_hi]` at 10 points per decade and keeps the longest
    /// reliable prefix.
    pub fn new(target: InversionTarget, order: usize, t_lo: f64, t_hi: f64) -> Result<Self> {
        let inverter = PointInverter::new(target, order)?;
        let grid = log_grid_per_decade(t_lo, t_hi, 10)?;
        let mut pts = Vec::with_capacity(grid.len());
        for &t in &grid {
            let (v, disc) = inverter.eval(t);
            if !(v > 0.0) || !(disc < RELIABLE_DISCREPANCY) {
                break;
            }
            pts.push((t, v));
        }
        if pts.len() < 12 {
            return Err(Error::InversionInstability { t: t_lo, discrepancy: f64::NAN });
        }
        let upper = pts.last().expect("non-empty").0;
        let head = PowerLaw::fit(&pts[..11]).expect("enough points");
        let last = pts.last().expect("non-empty").1;
        // A damped density that ran into underflow has no tail worth extrapolating.
        let tail = if target.damping() > 0.0 && last * upper < 1e-200 {
            None
        } else {
            Some(PowerLaw::fit(&pts[pts.len() - 11..]).expect("enough points"))
        };
        Ok(Self { inverter, lower: t_lo, upper, head, tail })
    }
}

impl Eta for InvertedEta {
    fn eval(&self, t: f64) -> f64 {
        if t < self.lower {
            self.head.eval(t)
        } else if t > self.upper {
            self.tail.map_or(0.0, |law| law.eval(t))
        } else {
            self.inverter.eval(t).0
        }
    }
    fn upper(&self) -> f64 {
        self.upper
    }
    fn tail(&self) -> Option<PowerLaw> {
        self.tail
    }
    fn rel_noise(&self) -> f64 {
        INVERSION_NOISE
    }
}

/// Cancellation noise of order-16 Gaver-Stehfest sums in double precision.
const INVERSION_NOISE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Jump,
    Green,
    Generic,
}

impl KernelKind {
    pub fn tag(&self) -> &'static str {
        match self {
            KernelKind::Jump => "j",
            KernelKind::Green => "g",
            KernelKind::Generic => "i",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEvaluation {
    pub kind: KernelKind,
    pub r: f64,
    pub d: u32,
    pub value: f64,
    pub quad_err: f64,
    /// Asymptotic comparison function at `r`, when one is attached.
    pub asymptote: Option<f64>,
}

impl KernelEvaluation {
    /// `value / asymptote`.
    pub fn ratio(&self) -> Option<f64> {
        self.asymptote.map(|a| self.value / a)
    }
}

/// Default relative quadrature tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Largest tolerated tail share when the tail fit is poor.
const TAIL_SHARE_LIMIT: f64 = 1e-3;

/// `∫_U^∞ t^q e^{-b/t} dt` for `q < -1` and `b/U < 1`, by expanding the exponential.
fn tail_moment(q: f64, b: f64, upper: f64) -> f64 {
    // Σ_k (-b)^k / k! · U^{q-k+1} / (k - q - 1) = U^{q+1} Σ_k (-x)^k / k! / (k - q - 1)
    let x = b / upper;
    let mut sum = 0.0;
    let mut c = 1.0;
    for k in 0..60 {
        let term = c / (k as f64 - q - 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        c *= -x / (k as f64 + 1.0);
    }
    upper.powf(q + 1.0) * sum
}

/// `I(r)` for a general `η`, with relative tolerance `tolerance`.
pub fn subordination_integral<E: Eta + ?Sized>(eta: &E, d: u32, r: f64, tolerance: f64) -> Result<KernelEvaluation> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    let tolerance = tolerance.max(eta.rel_noise());
    let half_d = d as f64 / 2.0;
    let r2 = r * r;
    let norm = (4.0 * PI).powf(-half_d);
    let upper = eta.upper();
    // Without a tail law η is negligible past `upper`, so short ranges are fine.
    if upper < 10.0 * r2 && eta.tail().is_some() {
        return Err(Error::Domain(format!("density trusted only up to t = {upper:e}, below 10 r² for r = {r:e}")));
    }

    // Hypothesis ∫_1^∞ t^{-d/2} η(t) dt < ∞ in terms of the tail law.
    let tail_law = eta.tail();
    if let Some(law) = tail_law {
        if law.exponent - half_d >= -1.0 {
            return Err(Error::Divergence(format!(
                "tail exponent {:.4} gives a divergent ∫ t^(-d/2) η(t) dt for d = {d}",
                law.exponent
            )));
        }
    }

    // Inner piece, s = r²/(4t) ∈ [1/4, 745]; dt = r²/(4 s²) ds.
    let inner_f = |s: f64| {
        let t = r2 / (4.0 * s);
        norm * t.powf(-half_d) * (-s).exp() * eta.eval(t) * r2 / (4.0 * s * s)
    };
    let inner = integrate_pieces(inner_f, &[0.25, 1.0, 4.0, 16.0, 64.0, 256.0, 745.0], tolerance, 0.0)?;

    // Outer piece in v = ln t over [r², upper].
    let outer_f = |v: f64| {
        let t = v.exp();
        norm * t.powf(1.0 - half_d) * (-r2 / (4.0 * t)).exp() * eta.eval(t)
    };
    let (v0, v1) = (r2.ln(), upper.ln());
    let n_pieces = ((v1 - v0) / std::f64::consts::LN_10).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=n_pieces).map(|i| v0 + (v1 - v0) * i as f64 / n_pieces as f64).collect();
    let outer = if v1 > v0 { integrate_pieces(outer_f, &breaks, tolerance, 0.0)? } else { Quad::default() };

    let body = inner + outer;
    let tail = match tail_law {
        Some(law) => {
            let q = law.exponent - half_d;
            let value = norm * law.coef * tail_moment(q, r2 / 4.0, upper);
            if law.fit_residual > 1e-2 && value > TAIL_SHARE_LIMIT * body.value {
                return Err(Error::Divergence(format!(
                    "tail carries {:.2e} of the integral but its power-law fit is poor (residual {:.2e})",
                    value / body.value,
                    law.fit_residual
                )));
            }
            Quad { value, abs_err: value * law.fit_residual }
        }
        None => Quad { value: 0.0, abs_err: 0.0 },
    };
    let total = body + tail;
    Ok(KernelEvaluation { kind: KernelKind::Generic, r, d, value: total.value, quad_err: total.abs_err, asymptote: None })
}

/// Small-λ transience verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transience {
    Transient,
    NotTransient,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransienceReport {
    pub verdict: Transience,
    pub d: u32,
    /// Fitted small-λ power of `φ`.
    pub fitted_exponent: f64,
    pub critical_exponent: f64,
    /// `(ε, ∫_ε^R λ^{d/2-1}/φ(λ) dλ)` for decreasing `ε`.
    pub partial_integrals: Vec<(f64, f64)>,
    /// Ratio of the last two per-decade increments of the partial integrals.
    pub increment_ratio: f64,
}

/// Half-width of the band around `d/2` in which the fitted exponent alone
/// cannot decide.
pub const INCONCLUSIVE_BAND: f64 = 0.05;
const DECADES: usize = 40;

/// Integral test `∫_0^R λ^{d/2-1}/φ(λ) dλ < ∞`, evaluated over `DECADES`
/// decades below `R`.
pub fn check_transience(exponent: &LaplaceExponent, d: u32, big_r: f64) -> Result<TransienceReport> {
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if !(big_r > 0.0) {
        return Err(Error::Domain("R must be positive".into()));
    }
    let half_d = d as f64 / 2.0;
    // In v = ln λ the integrand is λ^{d/2} / φ(λ).
    let f = |v: f64| {
        let l = v.exp();
        l.powf(half_d) / exponent.phi_unchecked(l)
    };
    let mut increments = Vec::with_capacity(DECADES);
    let mut partial = Vec::with_capacity(DECADES);
    let mut acc = 0.0;
    let mut hi = big_r.ln();
    for k in 1..=DECADES {
        let lo = big_r.ln() - k as f64 * std::f64::consts::LN_10;
        let q = integrate(f, lo, hi, 1e-10, 0.0)?;
        acc += q.value;
        increments.push(q.value);
        partial.push((lo.exp(), acc));
        hi = lo;
    }
    let eps = big_r * 10f64.powi(-(DECADES as i32));
    let fitted = (exponent.phi_unchecked(eps * 10.0) / exponent.phi_unchecked(eps)).log10();
    let gap = half_d - fitted;
    let n = increments.len();
    let increment_ratio = increments[n - 1] / increments[n - 2];
    let verdict = if gap > INCONCLUSIVE_BAND {
        Transience::Transient
    } else if gap < -INCONCLUSIVE_BAND {
        Transience::NotTransient
    } else if increment_ratio >= 0.999 {
        // Critical exponent with increments that no longer shrink: at least
        // logarithmic divergence.
        Transience::NotTransient
    } else {
        Transience::Inconclusive
    };
    Ok(TransienceReport {
        verdict,
        d,
        fitted_exponent: fitted,
        critical_exponent: half_d,
        partial_integrals: partial,
        increment_ratio,
    })
}

/// `ξ(r) = r^{-2} φ'(r^{-2}) / φ(r^{-2})` for `r ∈ (0, 1)`.
pub fn xi_factor(exponent: &LaplaceExponent, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("xi_factor needs r in (0, 1), got {r}")));
    }
    let l = 1.0 / (r * r);
    Ok(l * exponent.phi_prime_unchecked(l) / exponent.phi_unchecked(l))
}

/// `r^{-d-2} φ'(r^{-2})`.
pub fn jump_asymptote(exponent: &LaplaceExponent, d: u32, r: f64) -> f64 {
    let l = 1.0 / (r * r);
    r.powi(-(d as i32) - 2) * exponent.phi_prime_unchecked(l)
}

/// `r^{-d-2} φ'(r^{-2}) / φ(r^{-2})²`.
pub fn green_asymptote(exponent: &LaplaceExponent, d: u32, r: f64) -> f64 {
    let l = 1.0 / (r * r);
    let phi = exponent.phi_unchecked(l);
    jump_asymptote(exponent, d, r) / (phi * phi)
}

/// Abscissa range scanned when densities have to be inverted.
const INVERSION_RANGE: (f64, f64) = (1e-16, 1e8);

fn make_eta(exponent: &LaplaceExponent, kind: DensityKind) -> Result<Box<dyn Eta + Send>> {
    if has_closed_form(exponent, kind) {
        Ok(Box::new(ClosedFormEta::new(*exponent, kind)?))
    } else {
        let target = InversionTarget::new(*exponent, kind);
        Ok(Box::new(InvertedEta::new(target, crate::densities::DEFAULT_ORDER, INVERSION_RANGE.0, INVERSION_RANGE.1)?))
    }
}

/// Jump and Green kernels of one subordinate Brownian motion in dimension `d`.
///
/// Densities are taken in closed form where known and otherwise inverted
/// pointwise; construction does the reliability scan once.
pub struct SubordinateKernels {
    exponent: LaplaceExponent,
    d: u32,
    tolerance: f64,
    levy: Box<dyn Eta + Send>,
    potential: Option<Box<dyn Eta + Send>>,
    transience: TransienceReport,
}

impl SubordinateKernels {
    pub fn new(exponent: LaplaceExponent, d: u32) -> Result<Self> {
        Self::with_tolerance(exponent, d, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(exponent: LaplaceExponent, d: u32, tolerance: f64) -> Result<Self> {
        let transience = check_transience(&exponent, d, 1.0)?;
        let levy = make_eta(&exponent, DensityKind::Levy)?;
        let potential = if transience.verdict == Transience::Transient {
            Some(make_eta(&exponent, DensityKind::Potential)?)
        } else {
            None
        };
        Ok(Self { exponent, d, tolerance, levy, potential, transience })
    }

    pub fn exponent(&self) -> &LaplaceExponent {
        &self.exponent
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn transience(&self) -> &TransienceReport {
        &self.transience
    }

    pub fn jump(&self, r: f64) -> Result<KernelEvaluation> {
        let mut ev = subordination_integral(self.levy.as_ref(), self.d, r, self.tolerance)?;
        ev.kind = KernelKind::Jump;
        ev.asymptote = Some(jump_asymptote(&self.exponent, self.d, r));
        Ok(ev)
    }

    pub fn green(&self, r: f64) -> Result<KernelEvaluation> {
        let eta = self.potential.as_ref().ok_or_else(|| Error::NotTransient {
            d: self.d,
            verdict: format!("{:?}", self.transience.verdict),
        })?;
        let mut ev = subordination_integral(eta.as_ref(), self.d, r, self.tolerance)?;
        ev.kind = KernelKind::Green;
        ev.asymptote = Some(green_asymptote(&self.exponent, self.d, r));
        Ok(ev)
    }
}

pub fn compute_j(exponent: &LaplaceExponent, d: u32, r: f64) -> Result<KernelEvaluation> {
    SubordinateKernels::new(*exponent, d)?.jump(r)
}

pub fn compute_g(exponent: &LaplaceExponent, d: u32, r: f64) -> Result<KernelEvaluation> {
    SubordinateKernels::new(*exponent, d)?.green(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparabilityReport {
    pub c_prime: f64,
    pub argmax: f64,
    /// `(r, j(r)/j(r+1))`.
    pub ratios: Vec<(f64, f64)>,
}

/// Default upper end of the radius grid for `c'`.
pub const DEFAULT_R_MAX: f64 = 50.0;

/// `c' = max j(r)/j(r+1)` over `r_grid ⊂ (1, R_max)`, checking `j(r+1) <= j(r)`.
pub fn unit_comparability_constant(kernels: &SubordinateKernels, r_grid: &[f64]) -> Result<ComparabilityReport> {
    let mut ratios = Vec::with_capacity(r_grid.len());
    let (mut c_prime, mut argmax) = (0.0f64, f64::NAN);
    for &r in r_grid {
        if r <= 1.0 {
            return Err(Error::Domain(format!("comparability grid must lie in (1, ∞), got {r}")));
        }
        let a = kernels.jump(r)?;
        let b = kernels.jump(r + 1.0)?;
        if b.value > a.value + a.quad_err + b.quad_err {
            return Err(Error::Monotonicity(format!("j({}) = {:e} exceeds j({r}) = {:e}", r + 1.0, b.value, a.value)));
        }
        let ratio = a.value / b.value;
        if ratio > c_prime {
            c_prime = ratio;
            argmax = r;
        }
        ratios.push((r, ratio));
    }
    Ok(ComparabilityReport { c_prime, argmax, ratios })
}

/// CSV `r,value,quad_err,asymptote,ratio`.
pub fn write_kernel_csv<W: Write>(mut w: W, evals: &[KernelEvaluation]) -> std::io::Result<()> {
    writeln!(w, "r,value,quad_err,asymptote,ratio")?;
    for e in evals {
        let a = e.asymptote.unwrap_or(f64::NAN);
        writeln!(w, "{:.17e},{:.17e},{:.6e},{:.17e},{:.17e}", e.r, e.value, e.quad_err, a, e.value / a)?;
    }
    Ok(())
}

/// Conventional file name `{family}_{kind}_d{d}.csv`.
pub fn kernel_file_name(exponent: &LaplaceExponent, kind: KernelKind, d: u32) -> String {
    format!("{}_{}_d{d}.csv", exponent.family().tag(), kind.tag())
}
