use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ratio_ci, McConfig, RadiusSimulators, RatioCi, EXACT_CI_BELOW};
use crate::bernstein::{Family, LaplaceExponent};
use crate::error::{Error, Result};
use crate::quadrature::integrate_pieces;
use crate::simulate::{exit_fractions, Ball, Region};
use crate::stats::Estimate;

/// `∫_a^b K(x, z) dz` for `r <= a < b <= ∞` and the Poisson kernel of
/// `(-r, r)`.
fn positive_side_mass(alpha: f64, r: f64, x: f64, a: f64, b: f64) -> Result<f64> {
    // z = r + u^m with m (1 - α/2) = 1 removes the (z - r)^{-α/2} singularity.
    let m = 1.0 / (1.0 - alpha / 2.0);
    let z_far = r * 1e6;
    let top = b.min(z_far);
    if top <= a {
        return Ok(0.0);
    }
    let c = (std::f64::consts::PI * alpha / 2.0).sin() / std::f64::consts::PI;
    let inside = r * r - x * x;
    // z² - r² = w (2r + w) keeps full precision as z approaches r.
    let f = |u: f64| {
        if u == 0.0 {
            return c * (inside / (2.0 * r)).powf(alpha / 2.0) / (r - x) * m;
        }
        let w = u.powf(m);
        let k = c * (inside / (w * (2.0 * r + w))).powf(alpha / 2.0) / (r + w - x);
        k * m * u.powf(m - 1.0)
    };
    let (u0, u1) = ((a - r).powf(1.0 / m), (top - r).powf(1.0 / m));
    let mut breaks = vec![u0];
    for k in -6..=6 {
        let u = (r * 10f64.powi(k)).powf(1.0 / m);
        if u > u0 && u < u1 {
            breaks.push(u);
        }
    }
    breaks.push(u1);
    let body = integrate_pieces(f, &breaks, 1e-10, 0.0)?.value;
    // Beyond z_far the kernel is c (r² - x²)^{α/2} z^{-1-α} to relative O(r / z).
    let tail = if b > z_far {
        c * (r * r - x * x).powf(alpha / 2.0) * z_far.powf(-alpha) / alpha
    } else {
        0.0
    };
    Ok(body + tail)
}

/// `P_x(X_τ ∈ F)` for the symmetric α-stable process on the line exiting
/// `(-r, r)`, by integrating the Blumenthal-Getoor-Ray kernel over `F`.
pub fn bgr_exit_mass_1d(alpha: f64, r: f64, f: &Region, x: f64) -> Result<f64> {
    if x.abs() >= r {
        return Err(Error::Domain("x must lie inside (-r, r)".into()));
    }
    // Each set is a union of intervals (a, b) with a >= r on one side.
    let right = |a: f64, b: f64| positive_side_mass(alpha, r, x, a, b);
    let left = |a: f64, b: f64| positive_side_mass(alpha, r, -x, a, b);
    let outside = || Error::Domain("target set must lie outside [-r, r]".into());
    match f {
        Region::Annulus { center, inner, outer } if center.len() == 1 && center[0] == 0.0 => {
            if *inner < r {
                return Err(outside());
            }
            Ok(right(*inner, *outer)? + left(*inner, *outer)?)
        }
        Region::Exterior { center, radius } if center.len() == 1 && center[0] == 0.0 => {
            if *radius < r {
                return Err(outside());
            }
            Ok(right(*radius, f64::INFINITY)? + left(*radius, f64::INFINITY)?)
        }
        Region::HalfSpace { normal, offset } if normal.len() == 1 => {
            if *offset < r {
                return Err(outside());
            }
            if normal[0] > 0.0 {
                right(*offset, f64::INFINITY)
            } else {
                left(*offset, f64::INFINITY)
            }
        }
        Region::Box { lo, hi } if lo.len() == 1 => {
            if lo[0] >= r {
                right(lo[0], hi[0])
            } else if hi[0] <= -r {
                left(-hi[0], -lo[0])
            } else {
                Err(outside())
            }
        }
        Region::Empty => Ok(0.0),
        _ => Err(Error::Unsupported("exact exit mass needs a one-dimensional set centred at 0".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonRatioConfig {
    pub r: f64,
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
    /// Named exterior bins; `K̂(x, ·)` is the exit fraction per bin.
    pub bins: Vec<(String, Region)>,
    pub mc: McConfig,
}

impl PoissonRatioConfig {
    /// `x = ±0.2 r` on the line with bins between `r, 1.5r, 2r, 3r, 5r, 10r`
    /// on both sides.
    pub fn line_default(r: f64, mc: McConfig) -> PoissonRatioConfig {
        let edges = [1.0, 1.5, 2.0, 3.0, 5.0, 10.0];
        let mut bins = Vec::new();
        for w in edges.windows(2) {
            let (a, b) = (w[0] * r, w[1] * r);
            bins.push((format!("({a},{b})"), Region::Box { lo: vec![a], hi: vec![b] }));
            bins.push((format!("({},{})", -b, -a), Region::Box { lo: vec![-b], hi: vec![-a] }));
        }
        PoissonRatioConfig { r, pairs: vec![(vec![0.2 * r], vec![-0.2 * r])], bins, mc }
    }

    /// `x = ±0.2 r e₁`; on the line the bins of [`Self::line_default`],
    /// otherwise cubes of side `r/2` centred at `±1.5r e₁, ±3r e₁, ±6r e₁`.
    pub fn axis_default(d: u32, r: f64, mc: McConfig) -> PoissonRatioConfig {
        if d == 1 {
            return Self::line_default(r, mc);
        }
        let axis = |s: f64| {
            let mut v = vec![0.0; d as usize];
            v[0] = s * r;
            v
        };
        let bins = [1.5, -1.5, 3.0, -3.0, 6.0, -6.0]
            .iter()
            .map(|&s| (format!("cube({}r)", s), Region::cube(&axis(s), r / 2.0)))
            .collect();
        PoissonRatioConfig { r, pairs: vec![(axis(0.2), axis(-0.2))], bins, mc }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonCell {
    pub pair: usize,
    pub bin: String,
    pub k1: Estimate,
    pub k2: Estimate,
    pub ratio: RatioCi,
    /// Fewer than 25 exits in the bin from either point.
    pub unstable: bool,
    pub exact_ratio: Option<f64>,
    /// `|ln ratio - ln exact| / stderr(ln ratio)`.
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonRatioReport {
    pub family: String,
    pub d: u32,
    pub config: PoissonRatioConfig,
    pub dt: f64,
    pub cells: Vec<PoissonCell>,
    /// Largest ratio over stable cells.
    pub max_ratio: f64,
}

impl PoissonRatioReport {
    /// Largest oracle z-score over stable cells, when an oracle exists.
    pub fn max_z(&self) -> Option<f64> {
        self.cells.iter().filter(|c| !c.unstable).filter_map(|c| c.z).fold(None, |m, z| Some(m.map_or(z, |m: f64| m.max(z))))
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "pair,bin,k1,k2,ratio,ci_lo,ci_hi,unstable,exact_ratio,z")?;
        for c in &self.cells {
            let exact = c.exact_ratio.map_or(String::new(), |v| format!("{v:e}"));
            let z = c.z.map_or(String::new(), |v| format!("{v:e}"));
            writeln!(
                w,
                "{},\"{}\",{:e},{:e},{:e},{:e},{:e},{},{},{}",
                c.pair, c.bin, c.k1.estimate, c.k2.estimate, c.ratio.ratio, c.ratio.lo, c.ratio.hi, c.unstable, exact, z
            )?;
        }
        Ok(())
    }
}

/// Ratios `K̂_B(x_1, z) / K̂_B(x_2, z)` of binned exit distributions.
pub fn run_poisson_ratio(exponent: LaplaceExponent, d: u32, config: &PoissonRatioConfig) -> Result<PoissonRatioReport> {
    let r = config.r;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let ball = Ball::centered(d, r)?;
    for (name, b) in &config.bins {
        if !b.avoids_open_ball(&ball) {
            return Err(Error::Domain(format!("bin {name} meets the ball")));
        }
    }
    let sims = RadiusSimulators::new(exponent, d, config.mc)?;
    let bins: Vec<Region> = config.bins.iter().map(|b| b.1.clone()).collect();
    let points: Vec<&Vec<f64>> = config.pairs.iter().flat_map(|(a, b)| [a, b]).collect();
    let fractions: Vec<Vec<Estimate>> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let sim = sims.at(r, i as u64 + 1)?;
            Ok(exit_fractions(&sim.exit_samples(&ball, x, config.mc.n)?, &bins, sim.spec().time_step))
        })
        .collect::<Result<_>>()?;
    let alpha = match exponent.family() {
        Family::StablePure { alpha } if d == 1 => Some(alpha),
        _ => None,
    };
    let mut cells = Vec::new();
    let mut max_ratio = f64::NEG_INFINITY;
    for (p, (x1, x2)) in config.pairs.iter().enumerate() {
        for (b, (name, region)) in config.bins.iter().enumerate() {
            let (k1, k2) = (fractions[2 * p][b], fractions[2 * p + 1][b]);
            let ratio = ratio_ci(&k1, &k2)?;
            let unstable = k1.successes().min(k2.successes()) < EXACT_CI_BELOW;
            let exact_ratio = alpha
                .map(|a| Ok::<_, Error>(bgr_exit_mass_1d(a, r, region, x1[0])? / bgr_exit_mass_1d(a, r, region, x2[0])?))
                .transpose()?;
            let z = exact_ratio.map(|e| (ratio.ratio.ln() - e.ln()).abs() / ratio.log_stderr);
            if !unstable {
                max_ratio = max_ratio.max(ratio.ratio);
            }
            cells.push(PoissonCell { pair: p, bin: name.clone(), k1, k2, ratio, unstable, exact_ratio, z });
        }
    }
    Ok(PoissonRatioReport {
        family: exponent.label(),
        d,
        config: config.clone(),
        dt: sims.at(r, 0)?.spec().time_step,
        cells,
        max_ratio,
    })
}
