//! End-to-end acceptance checks. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use geoharnack_core::densities::{
    appendix_lower_bound_constant, appendix_upper_bound_check, invert_density, levy_asymptotic_ratio,
};
use geoharnack_core::grid::log_grid_per_decade;
use geoharnack_core::harnack::{
    certify_family, dyadic_radii, run_exit_time_sandwich, run_harnack_scan, run_ks_degeneracy, run_poisson_ratio,
    HarnackScanConfig, McConfig, PoissonRatioConfig,
};
use geoharnack_core::kernels::{check_transience, xi_factor, SubordinateKernels, Transience};
use geoharnack_core::{
    Ball, DensityKind, Estimate, InversionTarget, LaplaceExponent, PathSpec, Region, Result, Simulator,
};
use rayon::prelude::*;

const DT_SCALE: f64 = 1e-3;

/// `(α, 1/Γ(1 − α/2))`.
const STABLE_CONSTANTS: [(f64, f64); 3] =
    [(0.5, 0.816_048_939_098_263), (1.0, 0.564_189_583_547_756), (1.5, 0.275_815_662_830_209)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn spread(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = xs.into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi / lo
}

fn stable_levy_density(alpha: f64, t: f64) -> f64 {
    let c = STABLE_CONSTANTS.iter().find(|p| p.0 == alpha).expect("tabulated alpha").1;
    alpha / 2.0 * c * t.powf(-1.0 - alpha / 2.0)
}

fn inversion_oracle() -> Result<Outcome> {
    let grid = log_grid_per_decade(1e-3, 1.0, 8)?;
    let mut worst: f64 = 0.0;
    type Oracle = Box<dyn Fn(f64) -> f64>;
    let mut cases: Vec<(LaplaceExponent, Oracle)> =
        vec![(LaplaceExponent::gamma(), Box::new(|t: f64| (-t).exp() / t))];
    for (alpha, _) in STABLE_CONSTANTS {
        cases.push((LaplaceExponent::stable(alpha)?, Box::new(move |t| stable_levy_density(alpha, t))));
    }
    for (exponent, exact) in &cases {
        let table = invert_density(&InversionTarget::levy(*exponent), &grid, 16)?;
        for (&t, &v) in table.grid.iter().zip(&table.values) {
            worst = worst.max((v / exact(t) - 1.0).abs());
        }
    }
    outcome(worst <= 5e-3, format!("worst relative error {worst:.2e} (tol 5e-3)"))
}

fn stable_exactness() -> Result<Outcome> {
    let grid = log_grid_per_decade(1e-6, 1e-2, 4)?;
    let mut worst: f64 = 0.0;
    for (alpha, c) in STABLE_CONSTANTS {
        let exponent = LaplaceExponent::stable(alpha)?;
        let table = invert_density(&InversionTarget::levy(exponent), &grid, 16)?;
        for (_, v) in levy_asymptotic_ratio(&table, &exponent, 1e-2)? {
            worst = worst.max((v / c - 1.0).abs());
        }
    }
    outcome(worst <= 0.02, format!("worst deviation from 1/Gamma(1-alpha/2) {worst:.2e} (tol 2%)"))
}

fn density_table(exponent: LaplaceExponent, kind: DensityKind) -> Result<geoharnack_core::DensityTable> {
    let grid = log_grid_per_decade(1e-6, 1.0, 4)?;
    invert_density(&InversionTarget::new(exponent, kind), &grid, 16)
}

fn upper_bound() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for exponent in LaplaceExponent::builtin() {
        for kind in [DensityKind::Levy, DensityKind::Potential] {
            let target = InversionTarget::new(exponent, kind);
            let report = appendix_upper_bound_check(&density_table(exponent, kind)?, &target)?;
            worst = worst.max(report.extreme_ratio);
            if !report.holds {
                failures.push(format!("{} {}", exponent.label(), kind.tag()));
            }
        }
    }
    // (1 − 2/e)^{-1}
    let bound = 3.784_422_382_354_666;
    outcome(
        failures.is_empty() && worst <= 1.01 * bound,
        format!("max nu t^2/|f'|(1/t) = {worst:.4} vs 1.01 x {bound:.4}; failing: {failures:?}"),
    )
}

fn lower_bound() -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for exponent in LaplaceExponent::builtin() {
        let cert = certify_family(&exponent)?;
        for kind in [DensityKind::Levy, DensityKind::Potential] {
            let target = InversionTarget::new(exponent, kind);
            let low = appendix_lower_bound_constant(&density_table(exponent, kind)?, &target, &cert)?;
            if low.report.checked > 0 {
                worst = worst.min(low.report.extreme_ratio / low.c2);
            }
            if !low.report.holds {
                failures.push(format!("{} {}", exponent.label(), kind.tag()));
            }
        }
    }
    outcome(failures.is_empty(), format!("min nu t^2/(c2 |f'|(1/t)) = {worst:.4} (need >= 0.99); failing: {failures:?}"))
}

fn kernel_oracles() -> Result<Outcome> {
    let one_over_pi = std::f64::consts::FRAC_1_PI;
    // 1/(2π²)
    let riesz = 0.050_660_591_821_168_9;
    let cauchy_line = SubordinateKernels::new(LaplaceExponent::stable(1.0)?, 1)?;
    let mut worst_j: f64 = 0.0;
    for r in log_grid_per_decade(1e-3, 1.0, 8)? {
        let j = cauchy_line.jump(r)?.value;
        worst_j = worst_j.max((j * r * r / one_over_pi - 1.0).abs());
    }
    let cauchy_space = SubordinateKernels::new(LaplaceExponent::stable(1.0)?, 3)?;
    let mut worst_g: f64 = 0.0;
    for r in log_grid_per_decade(1e-3, 1e-1, 8)? {
        let g = cauchy_space.green(r)?.value;
        worst_g = worst_g.max((g * r * r / riesz - 1.0).abs());
    }
    outcome(worst_j <= 1e-6 && worst_g <= 1e-4, format!("j rel err {worst_j:.2e} (tol 1e-6), g rel err {worst_g:.2e} (tol 1e-4)"))
}

fn kernel_boundedness() -> Result<Outcome> {
    let grid = log_grid_per_decade(1e-4, 1e-1, 4)?;
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0] {
        let kernels = SubordinateKernels::new(LaplaceExponent::geometric_stable(alpha)?, 2)?;
        let j = grid.iter().map(|&r| Ok(kernels.jump(r)?.ratio().expect("asymptote"))).collect::<Result<Vec<_>>>()?;
        let g = grid.iter().map(|&r| Ok(kernels.green(r)?.ratio().expect("asymptote"))).collect::<Result<Vec<_>>>()?;
        worst = worst.max(spread(j)).max(spread(g));
    }
    outcome(worst < 3.0, format!("largest max/min of value/asymptote {worst:.4} (tol < 3)"))
}

fn xi_limit() -> Result<Outcome> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for alpha in [0.5, 1.0, 1.5] {
        let exponent = LaplaceExponent::geometric_stable(alpha)?;
        for r in log_grid_per_decade(1e-8, 1e-4, 4)? {
            let v = xi_factor(&exponent, r)? * (1.0 / r).ln();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    outcome(lo >= 0.45 && hi <= 0.55, format!("xi(r) log(1/r) in [{lo:.4}, {hi:.4}] (need [0.45, 0.55])"))
}

fn transience_table() -> Result<Outcome> {
    let geo = LaplaceExponent::geometric_stable(1.0)?;
    let cauchy = LaplaceExponent::stable(1.0)?;
    let mut rows = Vec::new();
    let mut pass = true;
    for (exponent, d, accept) in [
        (geo, 1, &[Transience::NotTransient][..]),
        (geo, 2, &[Transience::Transient][..]),
        (geo, 3, &[Transience::Transient][..]),
        (cauchy, 1, &[Transience::NotTransient, Transience::Inconclusive][..]),
        (cauchy, 2, &[Transience::Transient][..]),
        (cauchy, 3, &[Transience::Transient][..]),
    ] {
        let v = check_transience(&exponent, d, 1.0)?.verdict;
        pass &= accept.contains(&v);
        rows.push(format!("{} d={d}: {v:?}", exponent.label()));
    }
    outcome(pass, rows.join("; "))
}

fn simulator_wiring() -> Result<Outcome> {
    const N: u64 = 1_000_000;
    let xi = [0.6, 0.8];
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (k, exponent) in LaplaceExponent::builtin().into_iter().enumerate() {
        let sim = Simulator::new(PathSpec::new(exponent, 2, 1.0, 1.0, 100 + k as u64)?)?;
        let (lap, cf): (Vec<f64>, Vec<f64>) = (0..N)
            .into_par_iter()
            .map(|i| {
                let path = sim.sample_sbm_path(i);
                let x = &path.x[1];
                ((-path.s[1]).exp(), (xi[0] * x[0] + xi[1] * x[1]).cos())
            })
            .unzip();
        let target = (-exponent.phi(1.0)?).exp();
        let z1 = Estimate::from_samples(&lap, 1.0).z_score(target);
        let z2 = Estimate::from_samples(&cf, 1.0).z_score(target);
        worst = worst.max(z1).max(z2);
        rows.push(format!("{} z=({z1:.2}, {z2:.2})", exponent.label()));
    }
    outcome(worst <= 3.0, rows.join("; "))
}

fn exit_oracles() -> Result<Outcome> {
    const N: usize = 100_000;
    let sim = Simulator::new(PathSpec::new(LaplaceExponent::stable(1.0)?, 1, 1e-4, 10.0, 11)?)?;
    let samples = sim.exit_samples(&Ball::centered(1, 1.0)?, &[0.0], N)?;
    let times: Vec<f64> = samples.iter().map(|s| s.exit_time).collect();
    let mean = Estimate::from_samples(&times, 1e-4);
    let far = Region::Exterior { center: vec![0.0], radius: 2.0 };
    let p = Estimate::proportion(samples.iter().filter(|s| far.contains(&s.exit_position)).count(), N, 1e-4);
    let rel = (mean.estimate - 1.0).abs();
    let z = p.z_score(1.0 / 3.0);
    outcome(rel <= 0.05 && z <= 3.0, format!("E tau = {:.4} ({:.2}% off), P(|X|>2) = {:.4}, z = {z:.2}", mean.estimate, rel * 100.0, p.estimate))
}

fn mc(n: usize) -> McConfig {
    McConfig { n, dt_scale: DT_SCALE, seed: 1 }
}

fn exit_time_sandwich() -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut pass = true;
    for exponent in [LaplaceExponent::geometric_stable(1.0)?, LaplaceExponent::stable(1.0)?] {
        let rep = run_exit_time_sandwich(exponent, 2, &dyadic_radii(5), mc(20_000))?;
        pass &= rep.spread < 10.0;
        rows.push(format!("{} spread {:.3}", exponent.label(), rep.spread));
    }
    outcome(pass, format!("{} (tol < 10)", rows.join("; ")))
}

fn harnack_scale_invariance() -> Result<Outcome> {
    let cfg = HarnackScanConfig { radii: dyadic_radii(4), points: 3, mc: mc(100_000) };
    let rep = run_harnack_scan(LaplaceExponent::geometric_stable(1.0)?, 2, &cfg)?;
    let maxima: Vec<String> = rep.per_radius.iter().map(|s| format!("{:.3}", s.max_ratio)).collect();
    outcome(
        rep.max_ratio() < 10.0 && rep.scale_drift < 2.0,
        format!("per-radius max [{}] (tol < 10), drift {:.3} (tol < 2)", maxima.join(", "), rep.scale_drift),
    )
}

fn poisson_ratio() -> Result<Outcome> {
    let cfg = PoissonRatioConfig::line_default(1.0, mc(100_000));
    let rep = run_poisson_ratio(LaplaceExponent::stable(1.0)?, 1, &cfg)?;
    let stable: Vec<_> = rep.cells.iter().filter(|c| !c.unstable).collect();
    let worst = stable.iter().filter_map(|c| c.z).fold(0.0, f64::max);
    let all_scored = stable.iter().all(|c| c.z.is_some());
    outcome(
        !stable.is_empty() && all_scored && worst <= 3.0,
        format!("{} stable bins of {}, worst |z| = {worst:.2} (tol 3)", stable.len(), rep.cells.len()),
    )
}

fn ks_degeneracy() -> Result<Outcome> {
    let rep = run_ks_degeneracy(LaplaceExponent::geometric_stable(1.0)?, 2, 5, mc(100_000))?;
    let estimates: Vec<String> = rep.rows.iter().filter(|r| r.n > 0).map(|r| format!("{:.4}", r.estimate.estimate)).collect();
    outcome(rep.decreasing(), format!("estimates [{}], trends {:?}", estimates.join(", "), rep.trends))
}

fn main() -> ExitCode {
    type Check = fn() -> Result<Outcome>;
    let criteria: [(&str, Check); 14] = [
        ("inversion oracle", inversion_oracle),
        ("stable exactness", stable_exactness),
        ("upper density bound", upper_bound),
        ("lower density bound", lower_bound),
        ("kernel oracles", kernel_oracles),
        ("kernel boundedness", kernel_boundedness),
        ("xi limit", xi_limit),
        ("transience table", transience_table),
        ("simulator wiring", simulator_wiring),
        ("exit oracles", exit_oracles),
        ("exit-time sandwich", exit_time_sandwich),
        ("harnack scale invariance", harnack_scale_invariance),
        ("poisson ratio", poisson_ratio),
        ("ks degeneracy", ks_degeneracy),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {:<26} {} [{:.1}s] {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
