use serde::Serialize;

use super::{proportion_ci, McConfig, RadiusSimulators};
use crate::bernstein::LaplaceExponent;
use crate::error::{Error, Result};
use crate::simulate::{Ball, Region};
use crate::stats::Estimate;

/// Comparison of two adjacent rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairTrend {
    Decreasing,
    /// Confidence intervals overlap.
    Inconclusive,
    Increasing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsRow {
    pub n: u32,
    pub r: f64,
    /// Inner radius of `A_n`; zero for the control row `A_0 = B`.
    pub inner: f64,
    pub volume_fraction: f64,
    pub estimate: Estimate,
    pub ci: (f64, f64),
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsReport {
    pub family: String,
    pub d: u32,
    pub mc: McConfig,
    pub rows: Vec<KsRow>,
    /// Trend from row `n` to `n + 1`, for `n >= 1`.
    pub trends: Vec<PairTrend>,
}

impl KsReport {
    /// No increase and at most one inconclusive pair.
    pub fn decreasing(&self) -> bool {
        !self.trends.contains(&PairTrend::Increasing)
            && self.trends.iter().filter(|t| **t == PairTrend::Inconclusive).count() <= 1
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,r,inner,volume_fraction,estimate,stderr,ci_lo,ci_hi,N,dt")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{:e},{:e},{},{:e},{:e},{:e},{:e},{},{:e}",
                row.n, row.r, row.inner, row.volume_fraction, row.estimate.estimate, row.estimate.stderr, row.ci.0,
                row.ci.1, row.estimate.n, row.estimate.dt
            )?;
        }
        Ok(())
    }
}

/// `P̂_0(T_{A_n} < τ_{B(0, r_n)})` for `r_n = 2^{-n}` and the boundary annuli
/// `A_n = A(0, r_n (3/4)^{1/d}, r_n)` of relative volume `1/4`.
pub fn run_ks_degeneracy(exponent: LaplaceExponent, d: u32, n_max: u32, mc: McConfig) -> Result<KsReport> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let sims = RadiusSimulators::new(exponent, d, mc)?;
    let origin = vec![0.0; d as usize];
    let mut rows = Vec::new();
    for k in 0..=n_max {
        let r = 2f64.powi(-(k as i32));
        let ball = Ball::centered(d, r)?;
        let (target, inner) = if k == 0 {
            (Region::Ball { center: origin.clone(), radius: r }, 0.0)
        } else {
            let inner = r * 0.75f64.powf(1.0 / d as f64);
            (Region::annulus(origin.clone(), inner, r)?, inner)
        };
        let volume_fraction = target.volume(d).unwrap_or(f64::NAN) / ball.volume();
        let hit = sims.at(r, k as u64 + 1)?.estimate_hitting_probability(&ball, &target, &origin, mc.n)?;
        let (lo, hi, _) = proportion_ci(&hit.estimate)?;
        rows.push(KsRow { n: k, r, inner, volume_fraction, estimate: hit.estimate, ci: (lo, hi), warning: hit.warning });
    }
    let trends = rows[1..]
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if b.ci.1 < a.ci.0 {
                PairTrend::Decreasing
            } else if b.ci.0 > a.ci.1 {
                PairTrend::Increasing
            } else {
                PairTrend::Inconclusive
            }
        })
        .collect();
    Ok(KsReport { family: exponent.label(), d, mc, rows, trends })
}
