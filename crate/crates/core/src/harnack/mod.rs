//! Monte Carlo experiments for the scale-invariant estimates: Harnack ratios,
//! Poisson-kernel ratios, the Green-function sandwich, exit-time scaling and
//! the Krylov-Safonov degeneracy.
//!
//! Each radius gets its own time step `Δt = dt_scale / φ(r^{-2})`, so every
//! experiment resolves the exit problem with the same number of grid steps
//! per expected exit time. Cells draw from disjoint RNG streams.

mod green;
mod ks;
mod poisson;
mod sandwich;
mod scan;

use serde::{Deserialize, Serialize};

use crate::bernstein::{certify_upper_scaling, LaplaceExponent, ScalingCertificate, ScalingGrid};
use crate::error::{Error, Result};
use crate::simulate::{scaled_time_step, PathSpec, Simulator, SubordinatorSampler};
use crate::stats::{clopper_pearson, normal_quantile, Estimate};

pub use green::{run_green_sandwich, GreenSandwichConfig, GreenSandwichReport, SandwichCell};
pub use ks::{run_ks_degeneracy, KsReport, KsRow, PairTrend};
pub use poisson::{bgr_exit_mass_1d, run_poisson_ratio, PoissonCell, PoissonRatioConfig, PoissonRatioReport};
pub use sandwich::{run_exit_time_sandwich, ExitTimeRow, ExitTimeSandwichReport};
pub use scan::{
    harmonic_test_family, harnack_points, run_harnack_scan, HarnackCell, HarnackReport, HarnackScanConfig, RadiusSummary,
};

/// Monte Carlo budget shared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Paths per cell.
    pub n: usize,
    /// `Δt · φ(r^{-2})`.
    pub dt_scale: f64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { n: 10_000, dt_scale: crate::simulate::DEFAULT_DT_SCALE, seed: 1 }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 paths per cell, got {}", self.n)));
        }
        if !(self.dt_scale > 0.0 && self.dt_scale < 1.0) {
            return Err(Error::InvalidParameter(format!("dt_scale must lie in (0, 1), got {}", self.dt_scale)));
        }
        Ok(())
    }
}

/// Confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.95;
/// Below this many successes intervals switch to Clopper-Pearson.
pub const EXACT_CI_BELOW: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    Normal,
    ClopperPearson,
}

/// Interval for a binomial proportion.
pub fn proportion_ci(e: &Estimate) -> Result<(f64, f64, CiMethod)> {
    let k = e.successes();
    if k < EXACT_CI_BELOW || e.n - k < EXACT_CI_BELOW {
        let (lo, hi) = clopper_pearson(k, e.n, CONFIDENCE)?;
        Ok((lo, hi, CiMethod::ClopperPearson))
    } else {
        let z = normal_quantile(0.5 + CONFIDENCE / 2.0);
        Ok(((e.estimate - z * e.stderr).max(0.0), (e.estimate + z * e.stderr).min(1.0), CiMethod::Normal))
    }
}

/// Ratio of two independent proportions with a confidence interval: delta
/// method on the log ratio, or the ratio of Clopper-Pearson bounds when
/// either count is small.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioCi {
    pub ratio: f64,
    pub lo: f64,
    pub hi: f64,
    pub method: CiMethod,
    /// Standard error of `ln ratio`; infinite when a count is zero.
    pub log_stderr: f64,
}

pub fn ratio_ci(num: &Estimate, den: &Estimate) -> Result<RatioCi> {
    let (k1, k2) = (num.successes(), den.successes());
    let ratio = num.estimate / den.estimate;
    let log_stderr = if k1 == 0 || k2 == 0 {
        f64::INFINITY
    } else {
        ((1.0 - num.estimate) / k1 as f64 + (1.0 - den.estimate) / k2 as f64).sqrt()
    };
    if k1 < EXACT_CI_BELOW || k2 < EXACT_CI_BELOW {
        let (l1, h1) = clopper_pearson(k1, num.n, CONFIDENCE)?;
        let (l2, h2) = clopper_pearson(k2, den.n, CONFIDENCE)?;
        let hi = if l2 > 0.0 { h1 / l2 } else { f64::INFINITY };
        Ok(RatioCi { ratio, lo: l1 / h2, hi, method: CiMethod::ClopperPearson, log_stderr })
    } else {
        let z = normal_quantile(0.5 + CONFIDENCE / 2.0);
        Ok(RatioCi {
            ratio,
            lo: ratio * (-z * log_stderr).exp(),
            hi: ratio * (z * log_stderr).exp(),
            method: CiMethod::Normal,
            log_stderr,
        })
    }
}

/// Builds one simulator per radius around a shared (possibly tabulated) sampler.
pub(crate) struct RadiusSimulators {
    exponent: LaplaceExponent,
    d: u32,
    mc: McConfig,
    sampler: SubordinatorSampler,
}

impl RadiusSimulators {
    pub(crate) fn new(exponent: LaplaceExponent, d: u32, mc: McConfig) -> Result<Self> {
        mc.validate()?;
        if d == 0 || d > 3 {
            return Err(Error::InvalidParameter(format!("experiments support 1 <= d <= 3, got {d}")));
        }
        Ok(RadiusSimulators { exponent, d, mc, sampler: SubordinatorSampler::new(&exponent)? })
    }

    pub(crate) fn at(&self, r: f64, stream_id: u64) -> Result<Simulator> {
        let dt = scaled_time_step(&self.exponent, r, self.mc.dt_scale)?;
        // Ten expected exit times; longer walks extend the horizon.
        let spec = PathSpec { exponent: self.exponent, d: self.d, time_step: dt, horizon: dt / self.mc.dt_scale * 10.0, seed: self.mc.seed, stream_id };
        Simulator::with_sampler(spec, self.sampler.clone())
    }
}

/// Upper-scaling certificate of `φ'` at `λ0 = 1` with the family's default `δ`.
pub fn certify_family(exponent: &LaplaceExponent) -> Result<ScalingCertificate> {
    certify_upper_scaling(exponent, 1.0, exponent.default_delta(), &ScalingGrid::default_for(1.0)?)
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("need at least one radius".into()));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidParameter("radii must lie in (0, 1)".into()));
    }
    Ok(())
}

/// `2^{-1}, ..., 2^{-k}`.
pub fn dyadic_radii(k: u32) -> Vec<f64> {
    (1..=k as i32).map(|i| 2f64.powi(-i)).collect()
}

/// Ratio of the largest to the smallest entry.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}
