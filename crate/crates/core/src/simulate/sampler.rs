//! Increment samplers for the built-in subordinators.
//!
//! A family is sampled as a chain of elementary subordinators: for
//! `φ = f ∘ g` run the `f`-subordinator for time `dt`, then the
//! `g`-subordinator for the resulting random time. Families without such a
//! representation fall back to a tabulated Lévy measure.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, Poisson, StandardNormal};

use crate::bernstein::{Family, LaplaceExponent};
use crate::densities::{InversionTarget, PointInverter};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// One increment over `dt` of the standard `a`-stable subordinator
/// (`E e^{-λS} = e^{-dt λ^a}`), by Kanter's representation.
pub fn sample_stable_increment<R: Rng + ?Sized>(alpha_half: f64, dt: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha_half > 0.0 && alpha_half < 1.0);
    if dt <= 0.0 {
        return 0.0;
    }
    let a = alpha_half;
    let u = PI * rng.sample::<f64, _>(Open01);
    let e: f64 = rng.sample(Exp1);
    let ka = ((a * u).sin().powf(a) * ((1.0 - a) * u).sin().powf(1.0 - a) / u.sin()).powf(1.0 / (1.0 - a));
    dt.powf(1.0 / a) * (ka / e).powf((1.0 - a) / a)
}

/// One increment over `dt` of the gamma subordinator: `Gamma(shape = dt, rate = 1)`.
pub fn sample_gamma_increment<R: Rng + ?Sized>(dt: f64, rng: &mut R) -> f64 {
    if dt <= 0.0 {
        return 0.0;
    }
    Gamma::new(dt, 1.0).expect("positive shape").sample(rng)
}

/// One increment of the tempered stable subordinator with exponent
/// `(λ + θ)^a - θ^a`, by rejecting stable draws with probability `1 - e^{-θS}`.
/// `dt` is split so each piece is accepted with probability at least `1/e`.
pub fn sample_tempered_stable_increment<R: Rng + ?Sized>(alpha_half: f64, theta: f64, dt: f64, rng: &mut R) -> f64 {
    if dt <= 0.0 {
        return 0.0;
    }
    let cost = dt * theta.powf(alpha_half);
    let pieces = cost.ceil().max(1.0) as usize;
    let piece = dt / pieces as f64;
    let mut total = 0.0;
    for _ in 0..pieces {
        loop {
            let s = stable_draw(alpha_half, piece, rng);
            if rng.random::<f64>() < (-theta * s).exp() {
                total += s;
                break;
            }
        }
    }
    total
}

fn stable_draw<R: Rng + ?Sized>(a: f64, dt: f64, rng: &mut R) -> f64 {
    if a == 0.5 {
        // Lévy distribution: S = dt² / (2 Z²).
        let z: f64 = rng.sample(StandardNormal);
        dt * dt / (2.0 * z * z)
    } else {
        sample_stable_increment(a, dt, rng)
    }
}

/// Compound-Poisson approximation of a subordinator from its inverted Lévy
/// density: jumps above `eps` are sampled exactly from the table, jumps below
/// are replaced by their mean.
#[derive(Debug, Clone)]
pub struct LevyTable {
    eps: f64,
    drift: f64,
    grid: Vec<f64>,
    /// Tail mass `∫_{t_i}^∞ μ`.
    mass: Vec<f64>,
    vals: Vec<f64>,
    /// Log-log slope of `μ` on each segment.
    slopes: Vec<f64>,
}

const TABLE_PER_DECADE: f64 = 100.0;

impl LevyTable {
    pub fn new(exponent: &LaplaceExponent, eps: f64) -> Result<LevyTable> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("truncation level must lie in (0, 1), got {eps}")));
        }
        let inv = PointInverter::new(InversionTarget::levy(*exponent), 16)?;
        let step = 10f64.powf(1.0 / TABLE_PER_DECADE);
        let mut grid = Vec::new();
        let mut vals = Vec::new();
        let mut t = eps;
        while t < 1e8 {
            let (v, disc) = inv.eval(t);
            if !(v > 0.0) || disc > 1e-3 {
                break;
            }
            grid.push(t);
            vals.push(v);
            if v * t < 1e-300 {
                break;
            }
            t *= step;
        }
        if grid.len() < 2 * TABLE_PER_DECADE as usize {
            return Err(Error::Simulation(format!(
                "Lévy density of {} is reliable only up to t = {t:e}",
                exponent.label()
            )));
        }
        let slopes: Vec<f64> =
            grid.windows(2).zip(vals.windows(2)).map(|(g, v)| (v[1] / v[0]).ln() / (g[1] / g[0]).ln()).collect();
        let last = grid.len() - 1;
        let p_last = slopes[last - 1];
        let beyond = if vals[last] * grid[last] < 1e-300 {
            0.0
        } else if p_last < -1.0 {
            vals[last] * grid[last] / (-p_last - 1.0)
        } else {
            return Err(Error::Simulation("Lévy density table ends before its tail becomes integrable".into()));
        };
        let mut mass = vec![0.0; grid.len()];
        mass[last] = beyond;
        for i in (0..last).rev() {
            mass[i] = mass[i + 1] + segment_mass(vals[i + 1], grid[i + 1], slopes[i], grid[i] / grid[i + 1]);
        }

        // Mean of the small jumps, ∫_0^eps t μ(t) dt, in log t with an
        // analytic power-law head below 1e-20 eps.
        let lo = eps * 1e-20;
        let body = integrate(|v: f64| {
            let t = v.exp();
            t * t * inv.eval(t).0
        }, lo.ln(), eps.ln(), 1e-6, 0.0)?;
        let (v0, v1) = (inv.eval(lo).0, inv.eval(lo * 10.0).0);
        let p = (v1 / v0).log10();
        let head = v0 * lo * lo / (p + 2.0);
        Ok(LevyTable { eps, drift: body.value + head, grid, vals, mass, slopes })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Mean of the jumps below the truncation level per unit time.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Rate of jumps above the truncation level.
    pub fn rate(&self) -> f64 {
        self.mass[0]
    }

    fn jump<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let target = self.mass[0] * rng.sample::<f64, _>(Open01);
        let last = self.grid.len() - 1;
        if target <= self.mass[last] {
            // Power-law tail beyond the table: ∫_t^∞ μ = target.
            let p = self.slopes[last - 1];
            let ratio = target * (-p - 1.0) / (self.vals[last] * self.grid[last]);
            return self.grid[last] * ratio.powf(1.0 / (p + 1.0));
        }
        // mass is decreasing: find i with mass[i] >= target > mass[i+1].
        let i = self.mass.partition_point(|&m| m >= target) - 1;
        let (t1, v1, p) = (self.grid[i + 1], self.vals[i + 1], self.slopes[i]);
        // With μ(s) = v1 (s/t1)^p, solve ∫_t^{t1} μ = rest for t.
        let rest = (target - self.mass[i + 1]) / (v1 * t1);
        let t = if (p + 1.0).abs() < 1e-12 {
            t1 * (-rest).exp()
        } else {
            t1 * (1.0 - (p + 1.0) * rest).powf(1.0 / (p + 1.0))
        };
        t.clamp(self.grid[i], t1)
    }

    fn increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        if dt <= 0.0 {
            return 0.0;
        }
        let lambda = self.rate() * dt;
        let count = Poisson::new(lambda).map(|p| p.sample(rng)).unwrap_or(0.0) as usize;
        self.drift * dt + (0..count).map(|_| self.jump(rng)).sum::<f64>()
    }
}

/// `∫_{ρ t1}^{t1} v1 (s/t1)^p ds`.
fn segment_mass(v1: f64, t1: f64, p: f64, rho: f64) -> f64 {
    if (p + 1.0).abs() < 1e-12 {
        -v1 * t1 * rho.ln()
    } else {
        v1 * t1 * (1.0 - rho.powf(p + 1.0)) / (p + 1.0)
    }
}

#[derive(Debug, Clone)]
enum Stage {
    Gamma,
    Stable(f64),
    Identity,
    Tempered { a: f64, theta: f64 },
    Tabulated(Arc<LevyTable>),
}

impl Stage {
    fn stable(a: f64) -> Stage {
        if a >= 1.0 {
            Stage::Identity
        } else {
            Stage::Stable(a)
        }
    }

    fn sample<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        match self {
            Stage::Gamma => sample_gamma_increment(dt, rng),
            Stage::Stable(a) => stable_draw(*a, dt, rng),
            Stage::Identity => dt,
            Stage::Tempered { a, theta } => sample_tempered_stable_increment(*a, *theta, dt, rng),
            Stage::Tabulated(table) => table.increment(dt, rng),
        }
    }
}

/// Default truncation level of the tabulated sampler.
pub const DEFAULT_TRUNCATION: f64 = 1e-3;

/// Increment sampler for a subordinator.
#[derive(Debug, Clone)]
pub struct SubordinatorSampler {
    stages: Vec<Stage>,
}

impl SubordinatorSampler {
    /// Exact composition sampler where available, tabulated otherwise.
    pub fn new(exponent: &LaplaceExponent) -> Result<Self> {
        let stages = match exponent.family() {
            Family::GammaPure => vec![Stage::Gamma],
            Family::StablePure { alpha } => vec![Stage::stable(alpha / 2.0)],
            Family::GeometricStable { alpha } => vec![Stage::Gamma, Stage::stable(alpha / 2.0)],
            Family::IteratedGeometricStable { alpha, depth } => {
                (0..depth).flat_map(|_| [Stage::Gamma, Stage::stable(alpha / 2.0)]).collect()
            }
            Family::RelativisticGeometricStable { alpha, mass } => {
                let a = alpha / 2.0;
                vec![Stage::Gamma, Stage::Tempered { a, theta: mass.powf(1.0 / a) }]
            }
            Family::RegVaryingExample { .. } => return Self::tabulated(exponent, DEFAULT_TRUNCATION),
        };
        Ok(Self { stages })
    }

    /// Compound-Poisson sampler from the inverted Lévy density, for any family.
    pub fn tabulated(exponent: &LaplaceExponent, eps: f64) -> Result<Self> {
        Ok(Self { stages: vec![Stage::Tabulated(Arc::new(LevyTable::new(exponent, eps)?))] })
    }

    /// `false` when increments come from a truncated Lévy measure.
    pub fn is_exact(&self) -> bool {
        !self.stages.iter().any(|s| matches!(s, Stage::Tabulated(_)))
    }

    pub fn describe(&self) -> String {
        let names: Vec<String> = self
            .stages
            .iter()
            .map(|s| match s {
                Stage::Gamma => "gamma".to_string(),
                Stage::Stable(a) => format!("stable({a})"),
                Stage::Identity => "identity".to_string(),
                Stage::Tempered { a, theta } => format!("tempered-stable({a},{theta})"),
                Stage::Tabulated(t) => format!("compound-poisson(eps={:e})", t.eps),
            })
            .collect();
        names.join(" -> ")
    }

    pub fn increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        self.stages.iter().fold(dt, |t, stage| stage.sample(t, rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_pvalue, ks_statistic, ks_two_sample, Estimate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::function::erf::erfc;

    fn laplace_mc(sampler: impl Fn(&mut ChaCha8Rng) -> f64, n: usize, seed: u64) -> Estimate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..n).map(|_| (-sampler(&mut rng)).exp()).collect();
        Estimate::from_samples(&xs, 1.0)
    }

    #[test]
    fn kanter_half_stable_matches_levy_distribution() {
        // S over dt = 1 with exponent λ^{1/2}: P(S <= s) = erfc(1 / (2 sqrt(s))).
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut xs: Vec<f64> = (0..20_000).map(|_| sample_stable_increment(0.5, 1.0, &mut rng)).collect();
        let d = ks_statistic(&mut xs, |s| erfc(1.0 / (2.0 * s.sqrt())));
        assert!(ks_pvalue(d, 20_000.0) > 0.01, "D = {d}");
    }

    #[test]
    fn stable_laplace_transform() {
        for a in [0.25, 0.5, 0.75] {
            let e = laplace_mc(|r| sample_stable_increment(a, 1.0, r), 200_000, 2);
            assert!(e.z_score((-1.0f64).exp()) < 3.0, "a = {a}: {e:?}");
        }
    }

    #[test]
    fn stable_scaling_in_dt() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = 0.75;
        let dt = 0.01;
        let mut small: Vec<f64> = (0..20_000).map(|_| sample_stable_increment(a, dt, &mut rng)).collect();
        let mut unit: Vec<f64> =
            (0..20_000).map(|_| dt.powf(1.0 / a) * sample_stable_increment(a, 1.0, &mut rng)).collect();
        let d = ks_two_sample(&mut small, &mut unit);
        assert!(ks_pvalue(d, 10_000.0) > 0.01, "D = {d}");
    }

    #[test]
    fn gamma_mean_and_laplace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xs: Vec<f64> = (0..200_000).map(|_| sample_gamma_increment(1.0, &mut rng)).collect();
        assert!(Estimate::from_samples(&xs, 1.0).z_score(1.0) < 3.0);
        let e = laplace_mc(|r| sample_gamma_increment(1.0, r), 200_000, 5);
        assert!(e.z_score(0.5) < 3.0);
    }

    #[test]
    fn gamma_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut two: Vec<f64> = (0..20_000).map(|_| sample_gamma_increment(2.0, &mut rng)).collect();
        let mut sum: Vec<f64> =
            (0..20_000).map(|_| sample_gamma_increment(1.0, &mut rng) + sample_gamma_increment(1.0, &mut rng)).collect();
        let d = ks_two_sample(&mut two, &mut sum);
        assert!(ks_pvalue(d, 10_000.0) > 0.01, "D = {d}");
    }

    #[test]
    fn tempered_stable_laplace() {
        // E e^{-λS} = exp(-dt ((λ+θ)^a - θ^a)); use a long dt to exercise splitting.
        let (a, theta, dt) = (0.5, 2.0, 3.0);
        let e = laplace_mc(|r| sample_tempered_stable_increment(a, theta, dt, r), 100_000, 7);
        let exact = (-dt * ((1.0 + theta).powf(a) - theta.powf(a))).exp();
        assert!(e.z_score(exact) < 3.0, "{e:?} vs {exact}");
    }

    #[test]
    fn composition_chains_match_phi() {
        for exponent in LaplaceExponent::builtin() {
            let s = SubordinatorSampler::new(&exponent).unwrap();
            let e = laplace_mc(|r| s.increment(1.0, r), 100_000, 8);
            let exact = (-exponent.phi(1.0).unwrap()).exp();
            assert!(e.z_score(exact) < 3.0, "{}: {e:?} vs {exact}", exponent.label());
        }
    }

    #[test]
    fn tabulated_gamma_matches_closed_form() {
        let g = LaplaceExponent::gamma();
        let s = SubordinatorSampler::tabulated(&g, 1e-3).unwrap();
        assert!(!s.is_exact());
        // Small-jump mean ∫_0^eps e^{-t} dt and rate E_1(eps).
        let Stage::Tabulated(table) = &s.stages[0] else { unreachable!() };
        assert!((table.drift() / (1.0 - (-1e-3f64).exp()) - 1.0).abs() < 1e-4);
        assert!((table.rate() / 6.3315393641 - 1.0).abs() < 1e-4);
        let e = laplace_mc(|r| s.increment(1.0, r), 100_000, 9);
        assert!(e.z_score(0.5) < 3.0, "{e:?}");
    }

    #[test]
    fn increments_are_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for exponent in LaplaceExponent::builtin() {
            let s = SubordinatorSampler::new(&exponent).unwrap();
            for _ in 0..1000 {
                assert!(s.increment(1e-3, &mut rng) >= 0.0);
            }
        }
    }
}
