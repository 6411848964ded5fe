//! Monte Carlo for subordinate Brownian motion `X_t = B(S_t)`.
//!
//! `B` runs at twice the standard speed, so conditionally on the subordinator
//! increment `ΔS` the increment of `X` is `N(0, 2ΔS·I)`. Paths live on a time
//! grid of step `Δt`; exits are detected at grid times only.
//!
//! Every path draws from its own ChaCha8 stream keyed by
//! `(seed, stream_id, path_index)`, and estimators reduce per-path values in
//! index order, so results do not depend on the number of worker threads.

mod region;
mod sampler;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein::LaplaceExponent;
use crate::error::{Error, Result};
use crate::stats::Estimate;

pub use region::{unit_ball_volume, Ball, Region};
pub use sampler::{
    sample_gamma_increment, sample_stable_increment, sample_tempered_stable_increment, LevyTable,
    SubordinatorSampler, DEFAULT_TRUNCATION,
};

/// Model and discretisation of a family of simulated paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub exponent: LaplaceExponent,
    pub d: u32,
    pub time_step: f64,
    pub horizon: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl PathSpec {
    pub fn new(exponent: LaplaceExponent, d: u32, time_step: f64, horizon: f64, seed: u64) -> Result<PathSpec> {
        let spec = PathSpec { exponent, d, time_step, horizon, seed, stream_id: 0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(self.time_step > 0.0 && self.time_step.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {}", self.time_step)));
        }
        if !(self.horizon >= self.time_step && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "horizon {} must be finite and at least the time step {}",
                self.horizon, self.time_step
            )));
        }
        Ok(())
    }

    pub fn with_stream(&self, stream_id: u64) -> PathSpec {
        PathSpec { stream_id, ..self.clone() }
    }

    pub fn with_time_step(&self, time_step: f64) -> PathSpec {
        PathSpec { time_step, horizon: self.horizon.max(time_step), ..self.clone() }
    }

    /// Generator for one path.
    pub fn rng(&self, path_index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream_id.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(path_index);
        rng
    }

    fn steps(&self) -> usize {
        (self.horizon / self.time_step).ceil() as usize
    }
}

/// `Δt = scale / φ(r^{-2})`: a fixed fraction of the expected exit time from `B(0, r)`.
pub fn scaled_time_step(exponent: &LaplaceExponent, r: f64, scale: f64) -> Result<f64> {
    Ok(scale / exponent.phi(r.powi(-2))?)
}

/// Default fraction used by [`scaled_time_step`].
pub const DEFAULT_DT_SCALE: f64 = 1e-4;

/// One simulated first exit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitSample {
    pub path_id: u64,
    pub exit_time: f64,
    pub exit_position: Vec<f64>,
    pub last_interior: Vec<f64>,
    pub jumped: bool,
}

/// How a walk ended.
#[derive(Debug, Clone, PartialEq)]
pub enum WalkEnd {
    Exit(ExitSample),
    /// The observer asked to stop at this grid time while inside the ball.
    Stopped(f64),
}

/// Number of times the horizon may double before a walk is abandoned.
pub const MAX_HORIZON_DOUBLINGS: u32 = 20;

/// A [`PathSpec`] together with its increment sampler.
#[derive(Debug, Clone)]
pub struct Simulator {
    spec: PathSpec,
    sampler: SubordinatorSampler,
    jump_threshold: f64,
    step_scale: f64,
}

/// `3 √(2 d s)` for the typical subordinator increment `s = 1/φ^{-1}(1/Δt)`.
/// Exponents too flat to reach `1/Δt` get the smallest representable scale.
fn jump_threshold(exponent: &LaplaceExponent, d: u32, dt: f64) -> f64 {
    let s = exponent.phi_inverse(1.0 / dt).map_or(f64::MIN_POSITIVE, |l| 1.0 / l);
    3.0 * (2.0 * d as f64 * s).sqrt()
}

impl Simulator {
    pub fn new(spec: PathSpec) -> Result<Simulator> {
        spec.validate()?;
        let sampler = SubordinatorSampler::new(&spec.exponent)?;
        Self::with_sampler(spec, sampler)
    }

    /// Reuses an existing sampler, which may be expensive to tabulate.
    pub fn with_sampler(spec: PathSpec, sampler: SubordinatorSampler) -> Result<Simulator> {
        spec.validate()?;
        let jump_threshold = jump_threshold(&spec.exponent, spec.d, spec.time_step);
        Ok(Simulator { step_scale: jump_threshold / 3.0, spec, sampler, jump_threshold })
    }

    pub fn spec(&self) -> &PathSpec {
        &self.spec
    }

    pub fn sampler(&self) -> &SubordinatorSampler {
        &self.sampler
    }

    /// Same model with a different time step.
    pub fn with_time_step(&self, dt: f64) -> Result<Simulator> {
        Self::with_sampler(self.spec.with_time_step(dt), self.sampler.clone())
    }

    pub fn with_stream(&self, stream_id: u64) -> Simulator {
        Simulator { spec: self.spec.with_stream(stream_id), ..self.clone() }
    }

    /// Typical displacement over one grid step, `√(2 d s)`.
    pub fn step_scale(&self) -> f64 {
        self.step_scale
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.spec.d as usize {
            return Err(Error::InvalidParameter(format!("point has {} coordinates, expected {}", x.len(), self.spec.d)));
        }
        Ok(())
    }

    /// `S(kΔt)` for `k = 0..=⌈T/Δt⌉`.
    pub fn sample_subordinator_path(&self, path_index: u64) -> Vec<f64> {
        let mut rng = self.spec.rng(path_index);
        let mut s = 0.0;
        let mut path = Vec::with_capacity(self.spec.steps() + 1);
        path.push(0.0);
        for _ in 0..self.spec.steps() {
            s += self.sampler.increment(self.spec.time_step, &mut rng);
            path.push(s);
        }
        path
    }

    /// Joint `(S, X)` path from the origin over the horizon, drawn in the
    /// same order as [`Simulator::walk`].
    pub fn sample_sbm_path(&self, path_index: u64) -> SbmPath {
        let d = self.spec.d as usize;
        let mut rng = self.spec.rng(path_index);
        let mut s = vec![0.0];
        let mut x = vec![vec![0.0; d]];
        for _ in 0..self.spec.steps() {
            let ds = self.sampler.increment(self.spec.time_step, &mut rng);
            let sd = (2.0 * ds).sqrt();
            let prev = x.last().expect("non-empty");
            let next: Vec<f64> = prev.iter().map(|p| p + sd * rng.sample::<f64, _>(StandardNormal)).collect();
            s.push(s.last().expect("non-empty") + ds);
            x.push(next);
        }
        SbmPath { s, x }
    }

    /// Walks from `start` until the first grid time outside `ball`, or until
    /// `observe` returns `true` at an interior grid point.
    pub fn walk<F: FnMut(&[f64]) -> bool>(
        &self,
        ball: &Ball,
        start: &[f64],
        path_index: u64,
        mut observe: F,
    ) -> Result<WalkEnd> {
        let d = self.spec.d as usize;
        let dt = self.spec.time_step;
        let mut rng = self.spec.rng(path_index);
        let mut pos = start.to_vec();
        let mut next = vec![0.0; d];
        let mut limit = self.spec.steps() as u64;
        let mut doublings = 0;
        let mut k: u64 = 0;
        loop {
            if observe(&pos) {
                return Ok(WalkEnd::Stopped(k as f64 * dt));
            }
            if k == limit {
                if doublings == MAX_HORIZON_DOUBLINGS {
                    return Err(Error::Simulation(format!(
                        "path {path_index} still inside the ball after {k} steps (t = {:e})",
                        k as f64 * dt
                    )));
                }
                doublings += 1;
                limit *= 2;
            }
            let ds = self.sampler.increment(dt, &mut rng);
            let sd = (2.0 * ds).sqrt();
            for (n, p) in next.iter_mut().zip(&pos) {
                *n = p + sd * rng.sample::<f64, _>(StandardNormal);
            }
            k += 1;
            if !ball.contains(&next) {
                let jump2: f64 = next.iter().zip(&pos).map(|(a, b)| (a - b) * (a - b)).sum();
                return Ok(WalkEnd::Exit(ExitSample {
                    path_id: path_index,
                    exit_time: k as f64 * dt,
                    exit_position: next,
                    last_interior: pos,
                    jumped: jump2.sqrt() > self.jump_threshold,
                }));
            }
            std::mem::swap(&mut pos, &mut next);
        }
    }

    pub fn sample_exit(&self, ball: &Ball, start: &[f64], path_index: u64) -> Result<ExitSample> {
        match self.walk(ball, start, path_index, |_| false)? {
            WalkEnd::Exit(e) => Ok(e),
            WalkEnd::Stopped(_) => unreachable!("observer never stops"),
        }
    }

    fn check_start(&self, ball: &Ball, start: &[f64]) -> Result<()> {
        self.check_point(start)?;
        self.check_point(&ball.center)?;
        if !ball.contains(start) {
            return Err(Error::Domain("start point must lie inside the ball".into()));
        }
        Ok(())
    }

    /// `n` exits from `start`, in path order.
    pub fn exit_samples(&self, ball: &Ball, start: &[f64], n: usize) -> Result<Vec<ExitSample>> {
        self.check_start(ball, start)?;
        (0..n as u64).into_par_iter().map(|i| self.sample_exit(ball, start, i)).collect()
    }

    /// `Ê_x τ_B`.
    pub fn estimate_mean_exit_time(&self, ball: &Ball, start: &[f64], n: usize) -> Result<Estimate> {
        self.check_start(ball, start)?;
        let times: Vec<f64> =
            (0..n as u64).into_par_iter().map(|i| self.sample_exit(ball, start, i).map(|e| e.exit_time)).collect::<Result<_>>()?;
        Ok(Estimate::from_samples(&times, self.spec.time_step))
    }

    /// Fraction of exits landing in each bin.
    pub fn estimate_exit_distribution(
        &self,
        ball: &Ball,
        start: &[f64],
        n: usize,
        bins: &[Region],
    ) -> Result<Vec<Estimate>> {
        let samples = self.exit_samples(ball, start, n)?;
        Ok(exit_fractions(&samples, bins, self.spec.time_step))
    }

    /// `P̂_x(X_{τ_B} ∈ F)`, a harmonic function of `x` in `B`.
    pub fn estimate_harmonic(&self, ball: &Ball, f: &Region, x: &[f64], n: usize) -> Result<Estimate> {
        if !f.avoids_closed_ball(ball) {
            return Err(Error::Domain("target set must not meet the closed ball".into()));
        }
        Ok(self.estimate_exit_distribution(ball, x, n, std::slice::from_ref(f))?.remove(0))
    }

    /// `P̂_x(T_A < τ_B)` with hits detected at grid times.
    pub fn estimate_hitting_probability(
        &self,
        ball: &Ball,
        a: &Region,
        start: &[f64],
        n: usize,
    ) -> Result<HittingEstimate> {
        self.check_start(ball, start)?;
        let hits: Vec<bool> = (0..n as u64)
            .into_par_iter()
            .map(|i| self.walk(ball, start, i, |x| a.contains(x)).map(|end| matches!(end, WalkEnd::Stopped(_))))
            .collect::<Result<_>>()?;
        let k = hits.iter().filter(|&&h| h).count();
        let warning = (a.thickness() < 5.0 * self.step_scale).then(|| {
            format!("target thickness {:.3e} is below 5 step displacements ({:.3e})", a.thickness(), self.step_scale)
        });
        Ok(HittingEstimate { estimate: Estimate::proportion(k, n, self.spec.time_step), warning })
    }

    /// `Ĝ_B(x, cell)`: mean time spent in each cell before exit, per unit volume.
    pub fn estimate_green_occupation(
        &self,
        ball: &Ball,
        x: &[f64],
        cells: &[Region],
        n: usize,
    ) -> Result<GreenOccupation> {
        self.check_start(ball, x)?;
        let d = self.spec.d;
        let mut volumes = Vec::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            let v = c.volume(d).filter(|v| *v > 0.0).ok_or_else(|| {
                Error::InvalidParameter(format!("occupation cell {i} must have finite positive volume"))
            })?;
            volumes.push(v);
            for (j, other) in cells.iter().enumerate().skip(i + 1) {
                match c.disjoint(other) {
                    Some(true) => {}
                    Some(false) => return Err(Error::InvalidParameter(format!("occupation cells {i} and {j} overlap"))),
                    None => {
                        return Err(Error::InvalidParameter(format!(
                            "cannot verify that occupation cells {i} and {j} are disjoint"
                        )))
                    }
                }
            }
        }
        let dt = self.spec.time_step;
        let per_path: Vec<Vec<f64>> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let mut occ = vec![0.0; cells.len()];
                self.walk(ball, x, i, |p| {
                    if let Some(j) = cells.iter().position(|c| c.contains(p)) {
                        occ[j] += dt;
                    }
                    false
                })?;
                Ok(occ)
            })
            .collect::<Result<_>>()?;
        let mut estimates = Vec::with_capacity(cells.len());
        let mut warnings = Vec::new();
        for (j, v) in volumes.iter().enumerate() {
            let xs: Vec<f64> = per_path.iter().map(|occ| occ[j] / v).collect();
            estimates.push(Estimate::from_samples(&xs, dt));
            let diam = cells[j].diameter();
            if diam < 10.0 * self.step_scale {
                warnings.push(format!(
                    "cell {j}: diameter {diam:.3e} is below 10 step displacements ({:.3e}); occupation is biased",
                    self.step_scale
                ));
            }
        }
        Ok(GreenOccupation { cells: estimates, warnings })
    }

    /// Mean exit time at `Δt` and `Δt/2` with a first-order extrapolation.
    pub fn exit_time_richardson(&self, ball: &Ball, start: &[f64], n: usize) -> Result<RichardsonReport> {
        let coarse = self.estimate_mean_exit_time(ball, start, n)?;
        let fine = self.with_time_step(self.spec.time_step / 2.0)?.estimate_mean_exit_time(ball, start, n)?;
        Ok(RichardsonReport {
            coarse,
            fine,
            extrapolated: 2.0 * fine.estimate - coarse.estimate,
            bias_estimate: fine.estimate - coarse.estimate,
        })
    }
}

/// `X` on the grid of `s` (starting at the origin).
pub fn sbm_from_subordinator<R: Rng + ?Sized>(s: &[f64], d: u32, rng: &mut R) -> Vec<Vec<f64>> {
    let mut x = vec![0.0; d as usize];
    let mut out = Vec::with_capacity(s.len());
    out.push(x.clone());
    for w in s.windows(2) {
        let sd = (2.0 * (w[1] - w[0])).sqrt();
        for v in x.iter_mut() {
            *v += sd * rng.sample::<f64, _>(StandardNormal);
        }
        out.push(x.clone());
    }
    out
}

/// Fraction of `samples` exiting into each bin.
pub fn exit_fractions(samples: &[ExitSample], bins: &[Region], dt: f64) -> Vec<Estimate> {
    bins.iter()
        .map(|b| {
            let k = samples.iter().filter(|e| b.contains(&e.exit_position)).count();
            Estimate::proportion(k, samples.len(), dt)
        })
        .collect()
}

/// Subordinator and process on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmPath {
    pub s: Vec<f64>,
    pub x: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingEstimate {
    pub estimate: Estimate,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenOccupation {
    pub cells: Vec<Estimate>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RichardsonReport {
    pub coarse: Estimate,
    pub fine: Estimate,
    pub extrapolated: f64,
    /// `fine - coarse`, the observed first-order grid bias.
    pub bias_estimate: f64,
}

pub fn write_exit_csv<W: Write>(mut w: W, samples: &[ExitSample]) -> std::io::Result<()> {
    let d = samples.first().map_or(1, |s| s.exit_position.len());
    let cols: Vec<String> = (1..=d).map(|i| format!("exit_x{i}")).collect();
    writeln!(w, "path_id,exit_time,{},jumped", cols.join(","))?;
    for s in samples {
        let xs: Vec<String> = s.exit_position.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{},{:e},{},{}", s.path_id, s.exit_time, xs.join(","), s.jumped)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::stable_ball_exit_time;

    fn cauchy(dt: f64) -> Simulator {
        let spec = PathSpec::new(LaplaceExponent::stable(1.0).unwrap(), 1, dt, 10.0, 7).unwrap();
        Simulator::new(spec).unwrap()
    }

    #[test]
    fn spec_validation() {
        let e = LaplaceExponent::gamma();
        assert!(PathSpec::new(e, 1, 0.0, 1.0, 0).is_err());
        assert!(PathSpec::new(e, 1, 0.1, 0.01, 0).is_err());
        assert!(PathSpec::new(e, 0, 0.1, 1.0, 0).is_err());
    }

    #[test]
    fn subordinator_path_is_nondecreasing_from_zero() {
        for e in LaplaceExponent::builtin() {
            let sim = Simulator::new(PathSpec::new(e, 2, 0.01, 1.0, 1).unwrap()).unwrap();
            let s = sim.sample_subordinator_path(3);
            assert_eq!(s[0], 0.0);
            assert_eq!(s.len(), 101);
            assert!(s.windows(2).all(|w| w[1] >= w[0]), "{}", e.label());
        }
    }

    #[test]
    fn sbm_path_follows_walk() {
        let sim = cauchy(1e-2);
        let path = sim.sample_sbm_path(4);
        let ball = Ball::centered(1, 1.0).unwrap();
        let e = sim.sample_exit(&ball, &[0.0], 4).unwrap();
        let k = (e.exit_time / 1e-2).round() as usize;
        if k < path.x.len() {
            assert_eq!(path.x[k], e.exit_position);
        }
        assert_eq!(path.s.len(), path.x.len());
    }

    #[test]
    fn paths_are_reproducible_per_index() {
        let sim = cauchy(1e-2);
        assert_eq!(sim.sample_sbm_path(5), sim.sample_sbm_path(5));
        assert_ne!(sim.sample_sbm_path(5), sim.sample_sbm_path(6));
        assert_ne!(sim.sample_sbm_path(5), sim.with_stream(1).sample_sbm_path(5));
    }

    #[test]
    fn zero_subordinator_increment_gives_zero_displacement() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = sbm_from_subordinator(&[0.0, 0.0, 0.0], 3, &mut rng);
        assert!(x.iter().all(|p| p.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn exit_sample_invariants() {
        let sim = cauchy(1e-3);
        let ball = Ball::centered(1, 1.0).unwrap();
        for e in sim.exit_samples(&ball, &[0.3], 500).unwrap() {
            assert!(e.exit_position[0].abs() >= 1.0);
            assert!(e.last_interior[0].abs() < 1.0);
            assert!(e.exit_time > 0.0);
        }
    }

    #[test]
    fn tiny_ball_exits_immediately() {
        let sim = cauchy(1e-3);
        let ball = Ball::centered(1, 1e-9).unwrap();
        let e = sim.estimate_mean_exit_time(&ball, &[0.0], 200).unwrap();
        assert!((e.estimate - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let sim = cauchy(1e-3);
        let ball = Ball::centered(1, 1.0).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| sim.estimate_mean_exit_time(&ball, &[0.0], 2000).unwrap());
        let b = three.install(|| sim.estimate_mean_exit_time(&ball, &[0.0], 2000).unwrap());
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn cauchy_exit_time_oracle_coarse() {
        let sim = cauchy(1e-3);
        let ball = Ball::centered(1, 1.0).unwrap();
        let e = sim.estimate_mean_exit_time(&ball, &[0.0], 20_000).unwrap();
        let exact = stable_ball_exit_time(1, 1.0, 1.0, &[0.0]).unwrap();
        assert!((e.estimate / exact - 1.0).abs() < 0.05, "{e:?}");
    }

    #[test]
    fn trivial_target_sets() {
        let sim = cauchy(1e-3);
        let ball = Ball::centered(1, 1.0).unwrap();
        let whole = Region::Ball { center: vec![0.0], radius: 1.0 };
        assert_eq!(sim.estimate_hitting_probability(&ball, &whole, &[0.0], 100).unwrap().estimate.estimate, 1.0);
        assert_eq!(sim.estimate_hitting_probability(&ball, &Region::Empty, &[0.0], 100).unwrap().estimate.estimate, 0.0);
        let outside = Region::Exterior { center: vec![0.0], radius: 1.0 };
        assert!((sim.estimate_harmonic(&ball, &outside, &[0.0], 100).unwrap().estimate - 1.0).abs() < 1e-15);
        let touching = Region::half_space(vec![1.0], 0.5).unwrap();
        assert!(sim.estimate_harmonic(&ball, &touching, &[0.0], 10).is_err());
    }

    #[test]
    fn mirrored_targets_agree() {
        let sim = cauchy(1e-3);
        let ball = Ball::centered(1, 1.0).unwrap();
        let right = sim.estimate_harmonic(&ball, &Region::half_space(vec![1.0], 2.0).unwrap(), &[0.0], 20_000).unwrap();
        let left = sim.estimate_harmonic(&ball, &Region::half_space(vec![-1.0], 2.0).unwrap(), &[0.0], 20_000).unwrap();
        let z = (right.estimate - left.estimate).abs() / (right.stderr.powi(2) + left.stderr.powi(2)).sqrt();
        assert!(z < 3.0);
    }

    #[test]
    fn occupation_partition_sums_to_exit_time() {
        let sim = cauchy(1e-3);
        let ball = Ball::centered(1, 1.0).unwrap();
        let cells: Vec<Region> = (0..4).map(|i| Region::Box { lo: vec![-1.0 + 0.5 * i as f64], hi: vec![-0.5 + 0.5 * i as f64] }).collect();
        let occ = sim.estimate_green_occupation(&ball, &[0.0], &cells, 2000).unwrap();
        let total: f64 = occ.cells.iter().map(|e| e.estimate * 0.5).sum();
        let exit = sim.estimate_mean_exit_time(&ball, &[0.0], 2000).unwrap();
        // Same paths: every step before the exit lands in exactly one cell.
        assert!((total - exit.estimate).abs() < 1e-9);
        let outside = [Region::cube(&[3.0], 0.5)];
        let occ = sim.estimate_green_occupation(&ball, &[0.0], &outside, 100).unwrap();
        assert_eq!(occ.cells[0].estimate, 0.0);
    }

    #[test]
    fn overlapping_cells_are_rejected() {
        let sim = cauchy(1e-3);
        let ball = Ball::centered(1, 1.0).unwrap();
        let cells = [Region::cube(&[0.0], 0.5), Region::cube(&[0.2], 0.5)];
        assert!(sim.estimate_green_occupation(&ball, &[0.0], &cells, 10).is_err());
    }

    #[test]
    fn exit_csv_layout() {
        let s = ExitSample { path_id: 3, exit_time: 0.5, exit_position: vec![1.5, 0.0], last_interior: vec![0.5, 0.0], jumped: true };
        let mut buf = Vec::new();
        write_exit_csv(&mut buf, &[s]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "path_id,exit_time,exit_x1,exit_x2,jumped\n3,5e-1,1.5e0,0e0,true\n");
    }
}
