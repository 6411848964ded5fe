use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poisson::bgr_exit_mass_1d;
use super::{certify_family, check_radii, ratio_ci, spread, McConfig, RadiusSimulators, RatioCi};
use crate::bernstein::{Family, LaplaceExponent, ScalingCertificate};
use crate::error::{Error, Result};
use crate::simulate::{exit_fractions, Ball, Region};
use crate::stats::Estimate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnackScanConfig {
    pub radii: Vec<f64>,
    /// Random test points in `B(0, r/2)` besides the centre.
    pub points: usize,
    pub mc: McConfig,
}

impl Default for HarnackScanConfig {
    fn default() -> Self {
        HarnackScanConfig { radii: super::dyadic_radii(4), points: 3, mc: McConfig::default() }
    }
}

/// Exterior annuli `A(0, 2^k r, 2^{k+1} r)`, `k = 0..3`, and the caps
/// `{z_1 > 2r}` and `{z_1 < -4r}`.
pub fn harmonic_test_family(d: u32, r: f64) -> Vec<(String, Region)> {
    let origin = vec![0.0; d as usize];
    let mut out: Vec<(String, Region)> = (0..4)
        .map(|k| {
            let inner = r * 2f64.powi(k);
            (format!("annulus-{k}"), Region::Annulus { center: origin.clone(), inner, outer: 2.0 * inner })
        })
        .collect();
    let mut e1 = vec![0.0; d as usize];
    e1[0] = 1.0;
    out.push(("cap+2r".into(), Region::HalfSpace { normal: e1.clone(), offset: 2.0 * r }));
    out.push(("cap-4r".into(), Region::HalfSpace { normal: e1.iter().map(|v| -v).collect(), offset: 4.0 * r }));
    out
}

/// The centre plus `count` points drawn uniformly from `B(0, r/2)`.
pub fn harnack_points(d: u32, r: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut pts = vec![vec![0.0; d as usize]];
    for _ in 0..count {
        let dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rad = r / 2.0 * rng.random::<f64>().powf(1.0 / d as f64);
        pts.push(dir.iter().map(|v| v / norm * rad).collect());
    }
    pts
}

/// One ordered pair of test points for one target set at one radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackCell {
    pub r: f64,
    pub target: String,
    pub i: usize,
    pub j: usize,
    pub h_i: Estimate,
    pub h_j: Estimate,
    pub ratio: RatioCi,
    /// `min(ĥ_i, ĥ_j) < 10/N`: kept in the report, left out of the maxima.
    pub unstable: bool,
    /// Exact ratio from the Blumenthal-Getoor-Ray kernel (Cauchy-type, `d = 1`).
    pub exact_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusSummary {
    pub r: f64,
    pub dt: f64,
    pub max_ratio: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub argmax: Option<(String, usize, usize)>,
    pub unstable_cells: usize,
    pub max_exact_ratio: Option<f64>,
    /// Exits landing within `1e-9` of the sphere.
    pub sphere_exits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackReport {
    pub family: String,
    pub d: u32,
    pub config: HarnackScanConfig,
    pub certificate: ScalingCertificate,
    pub points: Vec<Vec<Vec<f64>>>,
    pub per_radius: Vec<RadiusSummary>,
    pub cells: Vec<HarnackCell>,
    /// Largest over smallest per-radius maximum.
    pub scale_drift: f64,
}

impl HarnackReport {
    pub fn max_ratio(&self) -> f64 {
        self.per_radius.iter().map(|s| s.max_ratio).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,target,i,j,h_i,stderr_i,h_j,stderr_j,ratio,ci_lo,ci_hi,unstable,exact_ratio")?;
        for c in &self.cells {
            let exact = c.exact_ratio.map_or(String::new(), |v| format!("{v:e}"));
            writeln!(
                w,
                "{:e},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
                c.r, c.target, c.i, c.j, c.h_i.estimate, c.h_i.stderr, c.h_j.estimate, c.h_j.stderr, c.ratio.ratio,
                c.ratio.lo, c.ratio.hi, c.unstable, exact
            )?;
        }
        Ok(())
    }
}

fn cauchy_alpha(exponent: &LaplaceExponent, d: u32) -> Option<f64> {
    match exponent.family() {
        Family::StablePure { alpha } if d == 1 => Some(alpha),
        _ => None,
    }
}

/// Empirical Harnack ratios `ĥ_F(x_i) / ĥ_F(x_j)` for `h_F = P_·(X_τ ∈ F)`
/// over test points in `B(0, r/2)` and the test family of each radius.
pub fn run_harnack_scan(exponent: LaplaceExponent, d: u32, config: &HarnackScanConfig) -> Result<HarnackReport> {
    check_radii(&config.radii)?;
    let certificate = certify_family(&exponent)?;
    let sims = RadiusSimulators::new(exponent, d, config.mc)?;
    let n = config.mc.n;
    let exact_alpha = cauchy_alpha(&exponent, d);
    let mut points = Vec::new();
    let mut per_radius = Vec::new();
    let mut cells = Vec::new();
    for (ri, &r) in config.radii.iter().enumerate() {
        let ball = Ball::centered(d, r)?;
        let pts = harnack_points(d, r, config.points, config.mc.seed.wrapping_add(ri as u64));
        let targets = harmonic_test_family(d, r);
        let bins: Vec<Region> = targets.iter().map(|t| t.1.clone()).collect();
        let dt = sims.at(r, 0)?.spec().time_step;
        // One batch of exits per test point, shared by all target sets.
        let batches: Vec<(Vec<Estimate>, usize)> = pts
            .par_iter()
            .enumerate()
            .map(|(pi, x)| {
                let sim = sims.at(r, (ri * 1024 + pi + 1) as u64)?;
                let samples = sim.exit_samples(&ball, x, n)?;
                let on_sphere = samples
                    .iter()
                    .filter(|s| {
                        let norm = s.exit_position.iter().map(|v| v * v).sum::<f64>().sqrt();
                        (norm - r).abs() < 1e-9
                    })
                    .count();
                Ok((exit_fractions(&samples, &bins, sim.spec().time_step), on_sphere))
            })
            .collect::<Result<_>>()?;
        let exact: Option<Vec<Vec<f64>>> = exact_alpha
            .map(|alpha| {
                pts.iter().map(|x| bins.iter().map(|b| bgr_exit_mass_1d(alpha, r, b, x[0])).collect()).collect::<Result<_>>()
            })
            .transpose()?;

        let mut summary = RadiusSummary {
            r,
            dt,
            max_ratio: f64::NAN,
            ci_lo: f64::NAN,
            ci_hi: f64::NAN,
            argmax: None,
            unstable_cells: 0,
            max_exact_ratio: None,
            sphere_exits: batches.iter().map(|b| b.1).sum(),
        };
        for (ti, (name, _)) in targets.iter().enumerate() {
            for i in 0..pts.len() {
                for j in 0..pts.len() {
                    if i == j {
                        continue;
                    }
                    let (hi, hj) = (batches[i].0[ti], batches[j].0[ti]);
                    let ratio = ratio_ci(&hi, &hj)?;
                    let unstable = hi.estimate.min(hj.estimate) < 10.0 / n as f64;
                    let exact_ratio = exact.as_ref().map(|e| e[i][ti] / e[j][ti]);
                    if unstable {
                        summary.unstable_cells += 1;
                    } else if !(summary.max_ratio >= ratio.ratio) {
                        summary.max_ratio = ratio.ratio;
                        summary.ci_lo = ratio.lo;
                        summary.ci_hi = ratio.hi;
                        summary.argmax = Some((name.clone(), i, j));
                    }
                    if let Some(e) = exact_ratio {
                        summary.max_exact_ratio = Some(summary.max_exact_ratio.map_or(e, |m: f64| m.max(e)));
                    }
                    cells.push(HarnackCell { r, target: name.clone(), i, j, h_i: hi, h_j: hj, ratio, unstable, exact_ratio });
                }
            }
        }
        if summary.argmax.is_none() {
            return Err(Error::Simulation(format!("every Harnack cell at r = {r} is unstable; increase N")));
        }
        points.push(pts);
        per_radius.push(summary);
    }
    let maxima: Vec<f64> = per_radius.iter().map(|s| s.max_ratio).collect();
    Ok(HarnackReport {
        family: exponent.label(),
        d,
        config: config.clone(),
        certificate,
        points,
        scale_drift: spread(&maxima),
        per_radius,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_family_avoids_the_closed_ball() {
        for d in 1..=3 {
            let ball = Ball::centered(d, 0.25).unwrap();
            for (name, f) in harmonic_test_family(d, 0.25) {
                assert!(f.avoids_closed_ball(&ball), "{name}");
            }
        }
    }

    #[test]
    fn test_points_lie_in_half_ball() {
        let pts = harnack_points(2, 0.5, 20, 3);
        assert_eq!(pts.len(), 21);
        assert!(pts.iter().all(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt() < 0.25));
        assert_eq!(pts, harnack_points(2, 0.5, 20, 3));
    }

    #[test]
    fn identical_points_give_unit_ratio_and_swaps_invert() {
        let cfg = HarnackScanConfig {
            radii: vec![0.5],
            points: 1,
            mc: McConfig { n: 2000, dt_scale: 1e-2, seed: 5 },
        };
        let rep = run_harnack_scan(LaplaceExponent::stable(1.0).unwrap(), 1, &cfg).unwrap();
        for c in &rep.cells {
            let swapped = rep.cells.iter().find(|o| o.target == c.target && o.i == c.j && o.j == c.i).unwrap();
            assert!((c.ratio.ratio * swapped.ratio.ratio - 1.0).abs() < 1e-15);
            assert!(c.exact_ratio.is_some());
        }
        assert!(rep.per_radius[0].max_ratio >= 1.0);
        assert_eq!(rep.per_radius[0].sphere_exits, 0);
    }

    #[test]
    fn same_point_twice_has_ratio_one() {
        let a = Estimate::proportion(300, 1000, 0.1);
        assert_eq!(ratio_ci(&a, &a).unwrap().ratio, 1.0);
    }
}
