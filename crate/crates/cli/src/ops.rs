use geoharnack_core::bernstein::ScalingCertificate;
use geoharnack_core::closed_form::stable_ball_exit_time;
use geoharnack_core::densities::{
    appendix_lower_bound_constant, appendix_upper_bound_check, closed_form_density, has_closed_form, invert_density,
    levy_asymptotic_ratio, potential_asymptotic_ratio,
};
use geoharnack_core::harnack::{
    bgr_exit_mass_1d, certify_family, run_exit_time_sandwich, run_green_sandwich, run_harnack_scan, run_ks_degeneracy,
    run_poisson_ratio, GreenSandwichConfig, HarnackScanConfig, McConfig, PoissonRatioConfig,
};
use geoharnack_core::kernels::{check_transience, write_kernel_csv, SubordinateKernels, Transience};
use geoharnack_core::simulate::{scaled_time_step, write_exit_csv};
use geoharnack_core::stats::{write_estimates_csv, Estimate};
use geoharnack_core::{
    Ball, DensityKind, DensityTable, Error, Family, InversionTarget, LaplaceExponent, PathSpec, Region, Result, Simulator,
};
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::config::{Operation, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub detail: String,
}

fn verdict(check: &str, ok: bool, detail: String) -> Verdict {
    Verdict { check: check.into(), status: if ok { Status::Pass } else { Status::Fail }, detail }
}

/// One emitted file.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Default)]
pub struct Outcome {
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    fn csv<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(&mut self, name: &str, write: F) {
        let mut bytes = Vec::new();
        write(&mut bytes).expect("writing to memory");
        self.artifacts.push(Artifact { name: name.into(), bytes });
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
        bytes.push(b'\n');
        self.artifacts.push(Artifact { name: name.into(), bytes });
    }

    fn plot(&mut self, csv: &str, x: &str, ys: &[&str], log: (bool, bool)) {
        let stem = csv.trim_end_matches(".csv");
        let script = plot_script(csv, x, ys, log, &format!("{stem}.png"));
        self.artifacts.push(Artifact { name: format!("plot_{stem}.py"), bytes: script.into_bytes() });
    }
}

fn plot_script(csv: &str, x: &str, ys: &[&str], log: (bool, bool), png: &str) -> String {
    let ys = ys.iter().map(|y| format!("{y:?}")).collect::<Vec<_>>().join(", ");
    let py_bool = |b: bool| if b { "True" } else { "False" };
    format!(
        r#"import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
with open(here / {csv:?}) as fh:
    rows = list(csv.DictReader(fh))

fig, ax = plt.subplots(figsize=(6, 4))
for col in [{ys}]:
    pts = [(float(r[{x:?}]), float(r[col])) for r in rows if r[col] not in ("", "NaN", "nan")]
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=3, label=col)
if {lx}:
    ax.set_xscale("log")
if {ly}:
    ax.set_yscale("log")
ax.set_xlabel({x:?})
ax.legend()
fig.tight_layout()
fig.savefig(here / {png:?}, dpi=150)
if "--show" in sys.argv:
    plt.show()
"#,
        lx = py_bool(log.0),
        ly = py_bool(log.1),
    )
}

fn mc(config: &RunConfig) -> McConfig {
    McConfig { n: config.mc.n, dt_scale: config.mc.dt_scale, seed: config.mc.seed }
}

fn spread(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = xs.into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi / lo
}

/// Largest tolerated max/min of a value-to-asymptote ratio.
const RATIO_SPREAD: f64 = 3.0;
/// Small-time end of the asymptotic window.
const ASYMPTOTIC_T_MAX: f64 = 1e-2;

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let exponent = config.family.exponent()?;
    let mut out = Outcome::default();
    match config.operation {
        Operation::Phi => phi(config, &exponent, &mut out)?,
        Operation::Density => {
            let kind = if config.target() == "levy" { DensityKind::Levy } else { DensityKind::Potential };
            let table = density_table(&exponent, kind, config)?;
            let name = table.file_name(&exponent);
            out.csv(&name, |w| table.write_csv(w));
            out.plot(&name, "t", &["value"], (true, true));
            let bad = table.monotonicity_violations();
            out.verdicts.push(verdict("strictly-decreasing", bad.is_empty(), format!("{} violations", bad.len())));
            let upper = appendix_upper_bound_check(&table, &InversionTarget::new(exponent, kind))?;
            out.verdicts.push(verdict(
                "upper-bound",
                upper.holds,
                format!("max nu t^2/|f'|(1/t) = {:.6}", upper.extreme_ratio),
            ));
        }
        Operation::Kernel => kernel(config, &exponent, &mut out)?,
        Operation::Transience => {
            let rep = check_transience(&exponent, config.d, 1.0)?;
            out.csv("transience.csv", |w| {
                use std::io::Write;
                writeln!(w, "epsilon,partial_integral")?;
                rep.partial_integrals.iter().try_for_each(|(e, v)| writeln!(w, "{e:e},{v:e}"))
            });
            out.json("transience.json", &rep);
            let status = match rep.verdict {
                Transience::Inconclusive => {
                    out.warnings.push("transience verdict is inconclusive (critical exponent)".into());
                    Status::Inconclusive
                }
                _ => Status::Pass,
            };
            out.verdicts.push(Verdict {
                check: "transience".into(),
                status,
                detail: format!("{:?}; fitted exponent {:.4} vs d/2 = {}", rep.verdict, rep.fitted_exponent, rep.critical_exponent),
            });
        }
        Operation::Simulate => simulate(config, &exponent, &mut out)?,
        Operation::Harnack => harnack(config, &exponent, &mut out)?,
        Operation::Verify => verify(config, &exponent, &mut out)?,
    }
    Ok(out)
}

fn phi(config: &RunConfig, exponent: &LaplaceExponent, out: &mut Outcome) -> Result<()> {
    let grid = config.lambda_grid.points()?;
    let rows: Vec<(f64, f64, f64)> =
        grid.iter().map(|&l| Ok((l, exponent.phi(l)?, exponent.phi_prime(l)?))).collect::<Result<_>>()?;
    out.csv("phi.csv", |w| {
        use std::io::Write;
        writeln!(w, "lambda,phi,phi_prime")?;
        rows.iter().try_for_each(|(l, p, d)| writeln!(w, "{l:.17e},{p:.17e},{d:.17e}"))
    });
    out.plot("phi.csv", "lambda", &["phi", "phi_prime"], (true, true));
    let shape = rows.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].2 <= w[0].2 * (1.0 + 1e-12) && w[1].2 > 0.0);
    out.verdicts.push(verdict("increasing-concave", shape, format!("{} grid points", rows.len())));
    certify(exponent, out);
    Ok(())
}

fn certify(exponent: &LaplaceExponent, out: &mut Outcome) -> Option<ScalingCertificate> {
    match certify_family(exponent) {
        Ok(c) => {
            out.verdicts.push(verdict(
                "upper-scaling",
                true,
                format!("sigma = {:.6}, delta = {}, lambda0 = {}", c.sigma, c.delta, c.lambda0),
            ));
            Some(c)
        }
        Err(e) => {
            out.verdicts.push(verdict("upper-scaling", false, e.to_string()));
            None
        }
    }
}

fn density_table(exponent: &LaplaceExponent, kind: DensityKind, config: &RunConfig) -> Result<DensityTable> {
    let grid = config.t_grid.points()?;
    if has_closed_form(exponent, kind) {
        closed_form_density(exponent, kind, &grid)
    } else {
        invert_density(&InversionTarget::new(*exponent, kind), &grid, config.order)
    }
}

fn kernel(config: &RunConfig, exponent: &LaplaceExponent, out: &mut Outcome) -> Result<()> {
    let kernels = SubordinateKernels::with_tolerance(*exponent, config.d, config.tolerance)?;
    let grid = config.r_grid.points()?;
    let green = config.target() == "g";
    let evals =
        grid.iter().map(|&r| if green { kernels.green(r) } else { kernels.jump(r) }).collect::<Result<Vec<_>>>()?;
    let name = geoharnack_core::kernels::kernel_file_name(exponent, evals[0].kind, config.d);
    out.csv(&name, |w| write_kernel_csv(w, &evals));
    out.plot(&name, "r", &["ratio"], (true, false));
    let s = spread(evals.iter().filter_map(|e| e.ratio()));
    out.verdicts.push(verdict(
        if green { "green-asymptote-ratio" } else { "jump-asymptote-ratio" },
        s < RATIO_SPREAD,
        format!("max/min = {s:.4}"),
    ));
    Ok(())
}

fn simulate(config: &RunConfig, exponent: &LaplaceExponent, out: &mut Outcome) -> Result<()> {
    let (d, n, seed) = (config.d, config.mc.n, config.mc.seed);
    if config.target() == "subordinator" {
        let spec = PathSpec::new(*exponent, d, config.mc.dt_scale, 1.0, seed)?;
        let sim = Simulator::new(spec)?;
        let s1: Vec<f64> = (0..n as u64).map(|i| *sim.sample_subordinator_path(i).last().expect("non-empty")).collect();
        out.csv("subordinator.csv", |w| {
            use std::io::Write;
            writeln!(w, "path_id,s1")?;
            s1.iter().enumerate().try_for_each(|(i, s)| writeln!(w, "{i},{s:e}"))
        });
        let lap: Vec<f64> = s1.iter().map(|s| (-s).exp()).collect();
        let est = Estimate::from_samples(&lap, config.mc.dt_scale);
        let target = (-exponent.phi(1.0)?).exp();
        let z = est.z_score(target);
        out.verdicts.push(verdict("laplace-transform", z.abs() <= 3.0, format!("E e^(-S1) = {:.6} vs {target:.6}, z = {z:.2}", est.estimate)));
        return Ok(());
    }
    let r = config.ball_radius;
    let dt = scaled_time_step(exponent, r, config.mc.dt_scale)?;
    let spec = PathSpec::new(*exponent, d, dt, dt / config.mc.dt_scale * 10.0, seed)?;
    let sim = Simulator::new(spec)?;
    let ball = Ball::centered(d, r)?;
    let start = config.start.clone().unwrap_or_else(|| vec![0.0; d as usize]);
    let samples = sim.exit_samples(&ball, &start, n)?;
    out.csv("exits.csv", |w| write_exit_csv(w, &samples));
    let times: Vec<f64> = samples.iter().map(|s| s.exit_time).collect();
    let mean = Estimate::from_samples(&times, dt);
    let far = Region::Exterior { center: vec![0.0; d as usize], radius: 2.0 * r };
    let beyond = samples.iter().filter(|s| far.contains(&s.exit_position)).count();
    let p_far = Estimate::proportion(beyond, n, dt);
    out.csv("estimates.csv", |w| write_estimates_csv(w, &[mean, p_far]));
    let on_sphere = samples
        .iter()
        .filter(|s| (s.exit_position.iter().map(|v| v * v).sum::<f64>().sqrt() - r).abs() < 1e-9)
        .count();
    out.verdicts.push(verdict("no-sphere-exits", on_sphere == 0, format!("{on_sphere} exits within 1e-9 of the sphere")));
    if let Family::StablePure { alpha } = exponent.family() {
        let exact = stable_ball_exit_time(d, alpha, r, &start)?;
        let rel = (mean.estimate - exact) / exact;
        out.verdicts.push(verdict(
            "mean-exit-time",
            rel.abs() <= 0.05,
            format!("{:.5} vs closed form {exact:.5} ({:+.2}%)", mean.estimate, rel * 100.0),
        ));
        if d == 1 {
            let p = bgr_exit_mass_1d(alpha, r, &far, start[0])?;
            let z = p_far.z_score(p);
            out.verdicts.push(verdict(
                "exit-beyond-2r",
                z.abs() <= 3.0,
                format!("{:.5} vs kernel mass {p:.5}, z = {z:.2}", p_far.estimate),
            ));
        }
    }
    Ok(())
}

fn harnack(config: &RunConfig, exponent: &LaplaceExponent, out: &mut Outcome) -> Result<()> {
    let (d, mc) = (config.d, mc(config));
    match config.target() {
        "scan" => {
            let cfg = HarnackScanConfig { radii: config.radii.clone(), points: config.points, mc };
            let rep = run_harnack_scan(*exponent, d, &cfg)?;
            out.csv("harnack_cells.csv", |w| rep.write_csv(w));
            out.csv("harnack_radii.csv", |w| {
                use std::io::Write;
                writeln!(w, "r,dt,max_ratio,ci_lo,ci_hi,unstable_cells,sphere_exits")?;
                rep.per_radius.iter().try_for_each(|s| {
                    writeln!(w, "{:e},{:e},{:e},{:e},{:e},{},{}", s.r, s.dt, s.max_ratio, s.ci_lo, s.ci_hi, s.unstable_cells, s.sphere_exits)
                })
            });
            out.plot("harnack_radii.csv", "r", &["max_ratio", "ci_lo", "ci_hi"], (true, false));
            out.json("harnack_report.json", &rep);
            let unstable: usize = rep.per_radius.iter().map(|s| s.unstable_cells).sum();
            if unstable > 0 {
                out.warnings.push(format!("{unstable} Harnack cells flagged unstable (min h < 10/N)"));
            }
            let sphere: usize = rep.per_radius.iter().map(|s| s.sphere_exits).sum();
            out.verdicts.push(verdict("max-ratio-below-10", rep.max_ratio() < 10.0, format!("{:.4}", rep.max_ratio())));
            out.verdicts.push(verdict("scale-drift-below-2", rep.scale_drift < 2.0, format!("{:.4}", rep.scale_drift)));
            out.verdicts.push(verdict("no-sphere-exits", sphere == 0, format!("{sphere}")));
        }
        "poisson" => {
            let cfg = PoissonRatioConfig::axis_default(d, config.ball_radius, mc);
            let rep = run_poisson_ratio(*exponent, d, &cfg)?;
            out.csv("poisson_ratio.csv", |w| rep.write_csv(w));
            out.json("poisson_report.json", &rep);
            let unstable = rep.cells.iter().filter(|c| c.unstable).count();
            if unstable > 0 {
                out.warnings.push(format!("{unstable} bins with fewer than 25 hits"));
            }
            if unstable == rep.cells.len() {
                out.verdicts.push(Verdict {
                    check: "ratio-bounded".into(),
                    status: Status::Inconclusive,
                    detail: "every bin is unstable; increase N".into(),
                });
            } else {
                out.verdicts.push(verdict("ratio-bounded", rep.max_ratio < 10.0, format!("max ratio {:.4}", rep.max_ratio)));
            }
            if let Some(z) = rep.max_z() {
                out.verdicts.push(verdict("kernel-oracle-3-sigma", z <= 3.0, format!("max |z| = {z:.3}")));
            }
        }
        "green" => {
            let cfg = GreenSandwichConfig { radii: config.radii.clone(), mc, ..GreenSandwichConfig::default() };
            match run_green_sandwich(*exponent, d, &cfg) {
                Err(Error::NotTransient { verdict: v, .. }) => {
                    out.warnings.push(format!("green sandwich skipped: not transient in d = {d} ({v})"));
                    out.verdicts.push(Verdict { check: "green-sandwich".into(), status: Status::Inconclusive, detail: "skipped".into() });
                }
                Err(e) => return Err(e),
                Ok(rep) => {
                    out.csv("green_sandwich.csv", |w| rep.write_csv(w));
                    out.json("green_report.json", &rep);
                    out.warnings.extend(rep.warnings.iter().cloned());
                    let width = rep.max_ratio() / rep.min_ratio();
                    out.verdicts.push(verdict("ratio-interval-below-10", width < 10.0, format!("max/min = {width:.4}")));
                    out.verdicts.push(verdict("radius-drift-below-2", rep.drift < 2.0, format!("{:.4}", rep.drift)));
                }
            }
        }
        "exit-time" => {
            let rep = run_exit_time_sandwich(*exponent, d, &config.radii, mc)?;
            out.csv("exit_time_sandwich.csv", |w| rep.write_csv(w));
            out.plot("exit_time_sandwich.csv", "r", &["product"], (true, false));
            out.verdicts.push(verdict("spread-below-10", rep.spread < 10.0, format!("max/min = {:.4}", rep.spread)));
        }
        "ks" => {
            let rep = run_ks_degeneracy(*exponent, d, config.n_max, mc)?;
            out.csv("ks_degeneracy.csv", |w| rep.write_csv(w));
            out.plot("ks_degeneracy.csv", "n", &["estimate", "ci_lo", "ci_hi"], (false, false));
            out.json("ks_report.json", &rep);
            out.warnings.extend(rep.rows.iter().filter_map(|r| r.warning.clone()));
            out.verdicts.push(verdict("decreasing", rep.decreasing(), format!("{:?}", rep.trends)));
        }
        other => unreachable!("validated target {other}"),
    }
    Ok(())
}

fn verify(config: &RunConfig, exponent: &LaplaceExponent, out: &mut Outcome) -> Result<()> {
    let stage = config.target();
    let all = stage == "all";
    let certificate = if all || stage == "certify" || stage == "bounds" { certify(exponent, out) } else { None };
    let transient = check_transience(exponent, config.d, 1.0)?.verdict == Transience::Transient;
    let kinds: &[DensityKind] = if transient { &[DensityKind::Levy, DensityKind::Potential] } else { &[DensityKind::Levy] };

    if all || stage == "asymptotics" || stage == "bounds" {
        for &kind in kinds {
            let table = density_table(exponent, kind, config)?;
            let target = InversionTarget::new(*exponent, kind);
            let name = table.file_name(exponent);
            out.csv(&name, |w| table.write_csv(w));
            if all || stage == "asymptotics" {
                asymptotics(exponent, &table, out)?;
            }
            if all || stage == "bounds" {
                let up = appendix_upper_bound_check(&table, &target)?;
                out.verdicts.push(verdict(
                    &format!("{}-upper-bound", kind.tag()),
                    up.holds,
                    format!("max ratio {:.6}, {} violations", up.extreme_ratio, up.violations.len()),
                ));
                if let Some(cert) = &certificate {
                    let low = appendix_lower_bound_constant(&table, &target, cert)?;
                    out.verdicts.push(verdict(
                        &format!("{}-lower-bound", kind.tag()),
                        low.report.holds,
                        format!("c2 = {:.6}, min ratio {:.6}, r0 = {:.6}", low.c2, low.report.extreme_ratio, low.r0),
                    ));
                }
            }
        }
    }
    if all || stage == "kernels" {
        let kernels = SubordinateKernels::with_tolerance(*exponent, config.d, config.tolerance)?;
        let grid = config.r_grid.points()?;
        let jumps = grid.iter().map(|&r| kernels.jump(r)).collect::<Result<Vec<_>>>()?;
        let name = geoharnack_core::kernels::kernel_file_name(exponent, jumps[0].kind, config.d);
        out.csv(&name, |w| write_kernel_csv(w, &jumps));
        let s = spread(jumps.iter().filter_map(|e| e.ratio()));
        out.verdicts.push(verdict("jump-asymptote-ratio", s < RATIO_SPREAD, format!("max/min = {s:.4}")));
        if transient {
            let greens = grid.iter().map(|&r| kernels.green(r)).collect::<Result<Vec<_>>>()?;
            let name = geoharnack_core::kernels::kernel_file_name(exponent, greens[0].kind, config.d);
            out.csv(&name, |w| write_kernel_csv(w, &greens));
            let s = spread(greens.iter().filter_map(|e| e.ratio()));
            out.verdicts.push(verdict("green-asymptote-ratio", s < RATIO_SPREAD, format!("max/min = {s:.4}")));
        } else {
            out.warnings.push(format!("no Green kernel: not transient in d = {}", config.d));
        }
    }
    Ok(())
}

fn asymptotics(exponent: &LaplaceExponent, table: &DensityTable, out: &mut Outcome) -> Result<()> {
    let kind = table.kind;
    let ratios = match kind {
        DensityKind::Levy => levy_asymptotic_ratio(table, exponent, ASYMPTOTIC_T_MAX)?,
        DensityKind::Potential => potential_asymptotic_ratio(table, exponent, ASYMPTOTIC_T_MAX)?,
    };
    let name = format!("{}_{}_asymptotic_ratio.csv", exponent.family().tag(), kind.tag());
    out.csv(&name, |w| {
        use std::io::Write;
        writeln!(w, "t,ratio")?;
        ratios.iter().try_for_each(|(t, v)| writeln!(w, "{t:.17e},{v:.17e}"))
    });
    out.plot(&name, "t", &["ratio"], (true, false));
    if ratios.is_empty() {
        out.warnings.push(format!("no grid points below t = {ASYMPTOTIC_T_MAX} for the {} asymptotics", kind.tag()));
        return Ok(());
    }
    let check = format!("{}-asymptotic-ratio", kind.tag());
    match (exponent.family(), kind) {
        (Family::StablePure { alpha }, DensityKind::Levy) => {
            let exact = 1.0 / gamma(1.0 - alpha / 2.0);
            let worst = ratios.iter().map(|(_, v)| (v / exact - 1.0).abs()).fold(0.0, f64::max);
            out.verdicts.push(verdict(&check, worst <= 0.02, format!("1/Gamma(1-alpha/2) = {exact:.6}, worst rel. dev. {worst:.2e}")));
        }
        _ => {
            let s = spread(ratios.iter().map(|p| p.1));
            out.verdicts.push(verdict(&check, s < RATIO_SPREAD, format!("max/min = {s:.4}")));
        }
    }
    Ok(())
}
