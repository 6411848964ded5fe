use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_radii, spread, McConfig, RadiusSimulators};
use crate::bernstein::{Family, LaplaceExponent};
use crate::closed_form::stable_ball_green;
use crate::error::{Error, Result};
use crate::kernels::{check_transience, xi_factor, Transience};
use crate::quadrature::integrate;
use crate::simulate::{Ball, Region};
use crate::stats::Estimate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenSandwichConfig {
    pub radii: Vec<f64>,
    /// Poles `x ∈ {0, b₁ r e₁}`.
    pub b1: f64,
    /// `y` ranges over the annulus `A(0, b₂ r, r)`.
    pub b2: f64,
    /// Radial shells the annulus is cut into.
    pub shells: usize,
    pub mc: McConfig,
}

impl Default for GreenSandwichConfig {
    fn default() -> Self {
        GreenSandwichConfig { radii: vec![0.5, 0.25], b1: 0.125, b2: 0.75, shells: 4, mc: McConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichCell {
    pub r: f64,
    pub x: Vec<f64>,
    pub shell: (f64, f64),
    /// Shell midpoint on the `e₁` axis, where `E_y τ` is estimated.
    pub y: Vec<f64>,
    pub green: Estimate,
    pub exit_time: Estimate,
    pub xi: f64,
    /// `Ĝ_B(x, shell) / (ξ(r) r^{-d} Ê_y τ_B)`.
    pub ratio: f64,
    /// Shell average of the closed-form stable ball Green function.
    pub exact_green: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenSandwichReport {
    pub family: String,
    pub d: u32,
    pub config: GreenSandwichConfig,
    pub cells: Vec<SandwichCell>,
    /// `(r, min ratio, max ratio)`.
    pub per_radius: Vec<(f64, f64, f64)>,
    /// Larger of the spreads of the per-radius minima and maxima.
    pub drift: f64,
    pub warnings: Vec<String>,
}

impl GreenSandwichReport {
    pub fn min_ratio(&self) -> f64 {
        self.per_radius.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    pub fn max_ratio(&self) -> f64 {
        self.per_radius.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,x1,shell_inner,shell_outer,green,green_stderr,exit_time,exit_stderr,xi,ratio,exact_green")?;
        for c in &self.cells {
            let exact = c.exact_green.map_or(String::new(), |v| format!("{v:e}"));
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
                c.r, c.x[0], c.shell.0, c.shell.1, c.green.estimate, c.green.stderr, c.exit_time.estimate,
                c.exit_time.stderr, c.xi, c.ratio, exact
            )?;
        }
        Ok(())
    }
}

/// Average of the stable ball Green function `G(x, ·)` over the shell
/// `a < |y| < b`, with `x = (x₁, 0, ...)`.
fn stable_shell_average(d: u32, alpha: f64, r: f64, x1: f64, a: f64, b: f64) -> Result<f64> {
    let point = |rho: f64, theta: f64| {
        let mut y = vec![0.0; d as usize];
        y[0] = rho * theta.cos();
        if d > 1 {
            y[1] = rho * theta.sin();
        }
        let mut x = vec![0.0; d as usize];
        x[0] = x1;
        stable_ball_green(d, alpha, r, &x, &y).unwrap_or(f64::NAN)
    };
    let pi = std::f64::consts::PI;
    // Angular mean over the sphere of radius rho.
    let sphere = |rho: f64| -> f64 {
        match d {
            1 => 0.5 * (point(rho, 0.0) + point(rho, pi)),
            2 => integrate(|t| point(rho, t), 0.0, pi, 1e-8, 0.0).map_or(f64::NAN, |q| q.value / pi),
            _ => integrate(|t| point(rho, t) * t.sin(), 0.0, pi, 1e-8, 0.0).map_or(f64::NAN, |q| q.value / 2.0),
        }
    };
    let k = d as i32 - 1;
    let num = integrate(|rho| sphere(rho) * rho.powi(k), a, b, 1e-7, 0.0)?.value;
    let den = (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64;
    let v = num / den;
    if !v.is_finite() {
        return Err(Error::Quadrature("shell average of the ball Green function failed".into()));
    }
    Ok(v)
}

/// Compares occupation estimates of `G_{B(0,r)}(x, y)` with
/// `ξ(r) r^{-d} E_y τ_{B(0,r)}` for poles near the centre and `y` in a
/// boundary annulus.
pub fn run_green_sandwich(exponent: LaplaceExponent, d: u32, config: &GreenSandwichConfig) -> Result<GreenSandwichReport> {
    check_radii(&config.radii)?;
    if !(config.b1 > 0.0 && config.b1 < config.b2 && config.b2 < 1.0) {
        return Err(Error::InvalidParameter("need 0 < b1 < b2 < 1".into()));
    }
    if config.shells == 0 {
        return Err(Error::InvalidParameter("need at least one shell".into()));
    }
    let transience = check_transience(&exponent, d, 1.0)?;
    if transience.verdict != Transience::Transient {
        return Err(Error::NotTransient { d, verdict: format!("{:?}", transience.verdict) });
    }
    let sims = RadiusSimulators::new(exponent, d, config.mc)?;
    let n = config.mc.n;
    let stable_alpha = match exponent.family() {
        Family::StablePure { alpha } if alpha < d as f64 => Some(alpha),
        _ => None,
    };
    let mut cells = Vec::new();
    let mut per_radius = Vec::new();
    let mut warnings = Vec::new();
    for (ri, &r) in config.radii.iter().enumerate() {
        let ball = Ball::centered(d, r)?;
        let width = r * (1.0 - config.b2) / config.shells as f64;
        let shells: Vec<(f64, f64)> =
            (0..config.shells).map(|k| (r * config.b2 + k as f64 * width, r * config.b2 + (k + 1) as f64 * width)).collect();
        let regions: Vec<Region> =
            shells.iter().map(|&(a, b)| Region::annulus(vec![0.0; d as usize], a, b)).collect::<Result<_>>()?;
        let mut poles = vec![vec![0.0; d as usize]; 2];
        poles[1][0] = config.b1 * r;
        for x in &poles {
            if shells[0].0 - x[0].abs() < width {
                return Err(Error::Domain(format!("pole {x:?} is within one cell of the annulus")));
            }
        }
        let xi = xi_factor(&exponent, r)?;
        let base = (ri as u64 + 1) * 4096;
        let occupations = poles
            .par_iter()
            .enumerate()
            .map(|(pi, x)| sims.at(r, base + pi as u64)?.estimate_green_occupation(&ball, x, &regions, n))
            .collect::<Result<Vec<_>>>()?;
        let exits: Vec<Estimate> = shells
            .par_iter()
            .enumerate()
            .map(|(si, &(a, b))| {
                let mut y = vec![0.0; d as usize];
                y[0] = (a + b) / 2.0;
                sims.at(r, base + 64 + si as u64)?.estimate_mean_exit_time(&ball, &y, n)
            })
            .collect::<Result<_>>()?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (x, occ) in poles.iter().zip(&occupations) {
            warnings.extend(occ.warnings.iter().map(|w| format!("r = {r}: {w}")));
            for (si, &(a, b)) in shells.iter().enumerate() {
                let green = occ.cells[si];
                let e = exits[si];
                let ratio = green.estimate / (xi * r.powi(-(d as i32)) * e.estimate);
                if !(ratio.is_finite() && ratio > 0.0) {
                    warnings.push(format!("r = {r}: no occupation recorded in shell ({a:.3e}, {b:.3e})"));
                    continue;
                }
                lo = lo.min(ratio);
                hi = hi.max(ratio);
                let exact_green = stable_alpha.map(|al| stable_shell_average(d, al, r, x[0], a, b)).transpose()?;
                let mut y = vec![0.0; d as usize];
                y[0] = (a + b) / 2.0;
                cells.push(SandwichCell {
                    r,
                    x: x.clone(),
                    shell: (a, b),
                    y,
                    green,
                    exit_time: e,
                    xi,
                    ratio,
                    exact_green,
                });
            }
        }
        if !lo.is_finite() {
            return Err(Error::Simulation(format!("no shell at r = {r} recorded any occupation; increase N")));
        }
        per_radius.push((r, lo, hi));
    }
    let mins: Vec<f64> = per_radius.iter().map(|p| p.1).collect();
    let maxs: Vec<f64> = per_radius.iter().map(|p| p.2).collect();
    Ok(GreenSandwichReport {
        family: exponent.label(),
        d,
        config: config.clone(),
        cells,
        drift: spread(&mins).max(spread(&maxs)),
        per_radius,
        warnings,
    })
}
