use rayon::prelude::*;
use serde::Serialize;

use super::{spread, McConfig, RadiusSimulators};
use crate::bernstein::LaplaceExponent;
use crate::error::{Error, Result};
use crate::simulate::Ball;
use crate::stats::Estimate;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitTimeRow {
    pub r: f64,
    pub exit_time: Estimate,
    pub phi: f64,
    /// `Ê_0 τ_{B(0,r)} · φ(r^{-2})`.
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitTimeSandwichReport {
    pub family: String,
    pub d: u32,
    pub mc: McConfig,
    pub rows: Vec<ExitTimeRow>,
    /// Largest over smallest product.
    pub spread: f64,
}

impl ExitTimeSandwichReport {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,estimate,stderr,N,dt,phi,product")?;
        for row in &self.rows {
            let e = &row.exit_time;
            writeln!(w, "{:e},{:e},{:e},{},{:e},{:e},{:e}", row.r, e.estimate, e.stderr, e.n, e.dt, row.phi, row.product)?;
        }
        Ok(())
    }
}

/// `Ê_0 τ_{B(0,r)} · φ(r^{-2})` across radii.
pub fn run_exit_time_sandwich(exponent: LaplaceExponent, d: u32, radii: &[f64], mc: McConfig) -> Result<ExitTimeSandwichReport> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    let sims = RadiusSimulators::new(exponent, d, mc)?;
    let origin = vec![0.0; d as usize];
    let rows: Vec<ExitTimeRow> = radii
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let exit_time = sims.at(r, i as u64 + 1)?.estimate_mean_exit_time(&Ball::centered(d, r)?, &origin, mc.n)?;
            let phi = exponent.phi(r.powi(-2))?;
            Ok(ExitTimeRow { r, exit_time, phi, product: exit_time.estimate * phi })
        })
        .collect::<Result<_>>()?;
    let products: Vec<f64> = rows.iter().map(|r| r.product).collect();
    Ok(ExitTimeSandwichReport { family: exponent.label(), d, mc, spread: spread(&products), rows })
}
