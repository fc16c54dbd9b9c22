//! Subcommand implementations. Each returns the list of files it wrote.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use super::config::{CompareMode, RunConfig};
use super::CliError;
use crate::export::Num;
use crate::floquet::{effective_fields_with, propagate_effective, BlochTrajectory};
use crate::model::DriveSpec;
use crate::propagator::{evolve_state, uniform_grid, DrivenLadder, PureState};
use crate::protocols::{
    find_optimal_theta, stirap_transfer, tpe_adiabatic_prediction, Scenario, ScenarioDrive,
    ScenarioKind,
};
use crate::sweep::grid_sweep;

type CmdResult = std::result::Result<Vec<PathBuf>, CliError>;

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub out: &'a Path,
    pub workers: usize,
    pub seedless: bool,
}

impl Context<'_> {
    fn path(&self, suffix: &str) -> PathBuf {
        self.out
            .join(format!("{}_{suffix}", self.cfg.output.prefix))
    }

    fn write(
        &self,
        suffix: &str,
        body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> std::result::Result<PathBuf, CliError> {
        let path = self.path(suffix);
        let mut w = BufWriter::new(File::create(&path).map_err(|e| CliError::io(&path, e))?);
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

fn config<T>(r: crate::Result<T>) -> std::result::Result<T, CliError> {
    r.map_err(|e| CliError::Config(e.to_string()))
}

fn propagation<T>(r: crate::Result<T>) -> std::result::Result<T, CliError> {
    r.map_err(CliError::Propagation)
}

pub fn simulate(ctx: &Context) -> CmdResult {
    let cfg = ctx.cfg;
    let sys = config(cfg.system())?;
    let d = config(cfg.drive())?;
    let kind = if d.delta() == 0.0 && d.tau() == 0.0 {
        ScenarioKind::Tpe
    } else {
        ScenarioKind::Ftpe
    };
    let scenario = config(Scenario::new(
        kind,
        sys,
        ScenarioDrive::Dichromatic(d),
        None,
        cfg.numerics.samples,
    ))?;
    let ts = propagation(scenario.run(cfg.numerics.dt_ps))?;
    let [p_bx, p_x, p_0] = ts.final_occupations();
    println!("{kind}: final P_BX = {p_bx:.6}, P_X = {p_x:.6}, P_0 = {p_0:.6}");
    let path = ctx.write("simulate.csv", |w| ts.write_csv(w, cfg.output.amplitudes))?;
    Ok(vec![path])
}

pub fn fields(ctx: &Context) -> CmdResult {
    let cfg = ctx.cfg;
    let sys = config(cfg.system())?;
    let closed = config(crate::model::LadderSystem::new(sys.e_b()))?;
    let d = config(cfg.drive())?;
    let (t0, t1) = d.window();
    let grid = uniform_grid(t0, t1, cfg.numerics.coarse_points.max(2));
    let eff = propagation(effective_fields_with(
        &closed,
        &d,
        &grid,
        cfg.route(),
        cfg.gaps(),
    ))?;
    let ground = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let effective = propagation(propagate_effective(&eff, ground))?;
    let series = propagation(evolve_state(
        &DrivenLadder {
            sys: &closed,
            drive: &d,
        },
        &PureState::ground(),
        &grid,
        cfg.numerics.dt_ps,
    ))?;
    let full = propagation(BlochTrajectory::from_series(&series))?;
    println!(
        "max |B_x| = {:.6e}, max |B_y| = {:.6e}, max |B_z| = {:.6e} rad/ps; final P_BX effective {:.6}, full {:.6}",
        eff.max_bx(),
        eff.max_by(),
        eff.max_bz(),
        effective.final_p_bx(),
        series.final_occupations()[0]
    );
    Ok(vec![
        ctx.write("fields.csv", |w| eff.write_csv(w))?,
        ctx.write("bloch_effective.csv", |w| effective.write_csv(w))?,
        ctx.write("bloch_full.csv", |w| full.write_csv(w))?,
    ])
}

pub fn sweep(ctx: &Context) -> CmdResult {
    let cfg = ctx.cfg;
    let sys = config(cfg.system())?;
    let d = config(cfg.drive())?;
    let (a1, a2) = config(cfg.axes())?;
    if a1.parameter == a2.parameter {
        return Err(CliError::Config(format!(
            "sweep axes both use `{}`",
            a1.parameter
        )));
    }
    let mut result = propagation(grid_sweep(
        &sys,
        &d,
        &a1,
        &a2,
        cfg.sweep.open_system,
        cfg.numerics.dt_ps,
    ))?;
    result.metadata.workers = Some(ctx.workers);
    println!(
        "{}×{} sweep: max P_BX = {:.6}, {} failed cells",
        a1.count,
        a2.count,
        result.max(),
        result.errors.len()
    );
    let mut meta: serde_json::Value =
        serde_json::from_str(&result.metadata_json()).expect("valid json");
    meta["seedless"] = serde_json::Value::Bool(ctx.seedless);
    Ok(vec![
        ctx.write("sweep.csv", |w| result.write_csv(w))?,
        ctx.write("sweep.json", |w| {
            writeln!(
                w,
                "{}",
                serde_json::to_string_pretty(&meta).expect("valid json")
            )
        })?,
        ctx.write("sweep_errors.csv", |w| result.write_errors_csv(w))?,
    ])
}

pub fn compare(ctx: &Context, mode: Option<CompareMode>) -> CmdResult {
    let cfg = ctx.cfg;
    let sys = config(cfg.system())?;
    let closed = config(crate::model::LadderSystem::new(sys.e_b()))?;
    let d = config(cfg.drive())?;
    let c = &cfg.compare;
    let points = c.points.max(2);
    match mode.unwrap_or(c.mode) {
        CompareMode::Tpe => {
            if d.tau() != 0.0 {
                return Err(CliError::Config(
                    "compare mode `tpe` needs drive.tau_ps = 0".into(),
                ));
            }
            let thetas = uniform_grid(0.0, c.theta_max_pi_units, points);
            let rows = thetas
                .iter()
                .map(|&t| {
                    let dt = config(d.with_theta(t * PI))?;
                    let full = propagation(crate::propagator::final_occupations(
                        &closed,
                        &dt,
                        cfg.numerics.dt_ps,
                    ))?[0];
                    let adiabatic = propagation(tpe_adiabatic_prediction(&closed, &dt))?;
                    Ok((t, full, adiabatic))
                })
                .collect::<std::result::Result<Vec<_>, CliError>>()?;
            let worst = rows.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);
            println!("tpe: max |full - adiabatic| = {worst:.6}");
            let path = ctx.write("compare_tpe.csv", |w| {
                writeln!(w, "theta_pi_units,p_bx_full,p_bx_adiabatic,abs_difference")?;
                for (t, f, a) in &rows {
                    writeln!(
                        w,
                        "{},{},{},{}",
                        Num(*t),
                        Num(*f),
                        Num(*a),
                        Num((f - a).abs())
                    )?;
                }
                Ok(())
            })?;
            Ok(vec![path])
        }
        CompareMode::Phase => {
            let n = c.phase_points.max(2);
            let phases: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
            let values = phases
                .iter()
                .map(|&phi| {
                    let dp = config(d.with_phase(phi))?;
                    Ok(propagation(crate::propagator::final_occupations(
                        &closed,
                        &dp,
                        cfg.numerics.dt_ps,
                    ))?[0])
                })
                .collect::<std::result::Result<Vec<f64>, CliError>>()?;
            let reference = values[0];
            let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - values.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("phase: spread of final P_BX = {spread:.3e}");
            let path = ctx.write("compare_phase.csv", |w| {
                writeln!(w, "phase_rad,p_bx,p_bx_phase0,difference")?;
                for (phi, p) in phases.iter().zip(&values) {
                    writeln!(
                        w,
                        "{},{},{},{}",
                        Num(*phi),
                        Num(*p),
                        Num(reference),
                        Num(p - reference)
                    )?;
                }
                Ok(())
            })?;
            Ok(vec![path])
        }
        CompareMode::Stirap => {
            let thetas = uniform_grid(0.0, c.theta_max_pi_units, points);
            let delay = c.stirap_delay_ps.abs();
            let rows = thetas
                .iter()
                .map(|&t| {
                    let counter = config(cfg.stirap(t * PI, -delay))?;
                    let intuitive = config(cfg.stirap(t * PI, delay))?;
                    Ok((
                        t,
                        propagation(stirap_transfer(&counter, cfg.numerics.dt_ps))?,
                        propagation(stirap_transfer(&intuitive, cfg.numerics.dt_ps))?,
                    ))
                })
                .collect::<std::result::Result<Vec<_>, CliError>>()?;
            let last = rows.last().expect("at least two points");
            println!(
                "stirap: at {}π counterintuitive {:.6}, intuitive {:.6}",
                last.0, last.1, last.2
            );
            let path = ctx.write("compare_stirap.csv", |w| {
                writeln!(w, "theta_pi_units,p_bx_counterintuitive,p_bx_intuitive")?;
                for (t, a, b) in &rows {
                    writeln!(w, "{},{},{}", Num(*t), Num(*a), Num(*b))?;
                }
                Ok(())
            })?;
            Ok(vec![path])
        }
    }
}

#[derive(Serialize)]
struct OptimumReport {
    theta_opt_pi_units: f64,
    p_bx: f64,
    delta_mev: f64,
    tau_ps: f64,
    s_ps: f64,
    e_b_mev: f64,
}

pub fn optimize(ctx: &Context) -> CmdResult {
    let cfg = ctx.cfg;
    let sys = config(cfg.system())?;
    let closed = config(crate::model::LadderSystem::new(sys.e_b()))?;
    let d: DriveSpec = config(cfg.drive())?;
    let range = (
        cfg.optimize.theta_min_pi_units * PI,
        cfg.optimize.theta_max_pi_units * PI,
    );
    let (theta, p) = propagation(find_optimal_theta(&closed, &d, range))?;
    println!("Θ_opt = {:.4}π, P_BX = {p:.6}", theta / PI);
    let report = OptimumReport {
        theta_opt_pi_units: theta / PI,
        p_bx: p,
        delta_mev: cfg.drive.delta_mev,
        tau_ps: cfg.drive.tau_ps,
        s_ps: cfg.drive.s_ps,
        e_b_mev: sys.e_b(),
    };
    Ok(vec![ctx.write("optimize.json", |w| {
        writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&report).expect("valid json")
        )
    })?])
}
