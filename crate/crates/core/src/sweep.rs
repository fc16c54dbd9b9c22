//! Two-dimensional parameter sweeps of the final biexciton occupation.
//!
//! Every grid point is an independent full propagation. Points are evaluated
//! in parallel and assembled by index, so the result does not depend on the
//! number of workers or the evaluation order.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::export::Num;
use crate::model::{DriveSpec, LadderSystem};
use crate::propagator::{default_dt, final_occupations, uniform_grid};
use crate::units::{angular_to_mev, mev_to_angular};

pub const MAX_AXIS_POINTS: usize = 2048;

/// Swept drive parameter and the unit its axis values are given in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    /// Total pulse area in units of π.
    Theta,
    /// Detuning in meV.
    Delta,
    /// Pulse delay in ps.
    Tau,
    /// Relative phase in rad.
    Phase,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Theta => "theta",
            SweepParam::Delta => "delta",
            SweepParam::Tau => "tau",
            SweepParam::Phase => "phase",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            SweepParam::Theta => "pi_units",
            SweepParam::Delta => "meV",
            SweepParam::Tau => "ps",
            SweepParam::Phase => "rad",
        }
    }

    /// `d` with this parameter set to `value` (axis units).
    pub fn apply(&self, d: &DriveSpec, value: f64) -> Result<DriveSpec> {
        match self {
            SweepParam::Theta => d.with_theta(value * PI),
            SweepParam::Delta => d.with_delta(mev_to_angular(value)),
            SweepParam::Tau => d.with_tau(value),
            SweepParam::Phase => d.with_phase(value),
        }
    }

    /// Current value of this parameter in `d` (axis units).
    pub fn read(&self, d: &DriveSpec) -> f64 {
        match self {
            SweepParam::Theta => d.theta() / PI,
            SweepParam::Delta => angular_to_mev(d.delta()),
            SweepParam::Tau => d.tau(),
            SweepParam::Phase => d.phase(),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(SweepParam::Theta),
            "delta" => Ok(SweepParam::Delta),
            "tau" => Ok(SweepParam::Tau),
            "phase" => Ok(SweepParam::Phase),
            other => Err(invalid(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

/// Linearly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn new(parameter: SweepParam, min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = SweepAxis {
            parameter,
            min,
            max,
            count,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(invalid(format!(
                "{} axis needs min < max, got [{}, {}]",
                self.parameter, self.min, self.max
            )));
        }
        if !(2..=MAX_AXIS_POINTS).contains(&self.count) {
            return Err(invalid(format!(
                "{} axis count must lie in 2..={MAX_AXIS_POINTS}, got {}",
                self.parameter, self.count
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        uniform_grid(self.min, self.max, self.count)
    }

    pub fn label(&self) -> String {
        format!("{}_{}", self.parameter.name(), self.parameter.unit())
    }
}

/// A grid point whose propagation failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellError {
    pub row: usize,
    pub col: usize,
    pub value1: f64,
    pub value2: f64,
    pub message: String,
}

/// Everything needed to reproduce a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub e_b_mev: f64,
    pub gamma_bx_per_ps: f64,
    pub gamma_x_per_ps: f64,
    pub open_system: bool,
    pub theta_pi_units: f64,
    pub s_ps: f64,
    pub delta_mev: f64,
    pub tau_ps: f64,
    pub phase_rad: f64,
    pub axis1: SweepAxis,
    pub axis2: SweepAxis,
    pub integrator: String,
    pub dt_ps: Option<f64>,
    pub dt_rule: String,
    pub window_sigmas: f64,
    pub workers: Option<usize>,
    pub created_unix_s: u64,
    pub crate_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis1: SweepAxis,
    pub axis2: SweepAxis,
    /// `p_bx[i][j]` at `(axis1[i], axis2[j])`; NaN where propagation failed.
    pub p_bx: Vec<Vec<f64>>,
    pub errors: Vec<CellError>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn max(&self) -> f64 {
        self.p_bx
            .iter()
            .flatten()
            .copied()
            .filter(|p| !p.is_nan())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values along axis 1 at column `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.p_bx.iter().map(|row| row[j]).collect()
    }

    /// Matrix CSV: the first row holds axis-2 values, the first column axis-1
    /// values; the corner cell names both axes.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "{}\\{}", self.axis1.label(), self.axis2.label())?;
        for v in self.axis2.values() {
            write!(w, ",{}", Num(v))?;
        }
        writeln!(w)?;
        for (v, row) in self.axis1.values().iter().zip(&self.p_bx) {
            write!(w, "{}", Num(*v))?;
            for p in row {
                write!(w, ",{}", Num(*p))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Error sidecar: one line per failed cell.
    pub fn write_errors_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "row,col,{},{},error",
            self.axis1.label(),
            self.axis2.label()
        )?;
        for e in &self.errors {
            let msg = e.message.replace(['"', '\n'], " ");
            writeln!(
                w,
                "{},{},{},{},\"{msg}\"",
                e.row,
                e.col,
                Num(e.value1),
                Num(e.value2)
            )?;
        }
        Ok(())
    }

    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&self.metadata).expect("metadata is plain data")
    }
}

/// Final `P_BX` over the grid `axis1 × axis2`, starting from the ground state.
/// With `open_system = false` the decay rates of `sys` are ignored.
pub fn grid_sweep(
    sys: &LadderSystem,
    template: &DriveSpec,
    axis1: &SweepAxis,
    axis2: &SweepAxis,
    open_system: bool,
    dt: Option<f64>,
) -> Result<SweepResult> {
    axis1.validate()?;
    axis2.validate()?;
    if axis1.parameter == axis2.parameter {
        return Err(invalid(format!("both axes sweep `{}`", axis1.parameter)));
    }
    let model = if open_system {
        *sys
    } else {
        LadderSystem::new(sys.e_b())?
    };
    let (v1, v2) = (axis1.values(), axis2.values());
    let cols = v2.len();

    let evaluate = |i: usize, j: usize| -> Result<f64> {
        let d = axis2
            .parameter
            .apply(&axis1.parameter.apply(template, v1[i])?, v2[j])?;
        Ok(final_occupations(&model, &d, dt)?[0])
    };
    let cells: Vec<Result<f64>> = (0..v1.len() * cols)
        .into_par_iter()
        .map(|k| evaluate(k / cols, k % cols))
        .collect();

    let mut p_bx = vec![vec![f64::NAN; cols]; v1.len()];
    let mut errors = Vec::new();
    for (k, cell) in cells.into_iter().enumerate() {
        let (i, j) = (k / cols, k % cols);
        match cell {
            Ok(p) => p_bx[i][j] = p,
            Err(e) => errors.push(CellError {
                row: i,
                col: j,
                value1: v1[i],
                value2: v2[j],
                message: e.to_string(),
            }),
        }
    }
    if !errors.is_empty() {
        log::warn!("{} of {} sweep cells failed", errors.len(), v1.len() * cols);
    }

    let metadata = SweepMetadata {
        e_b_mev: model.e_b(),
        gamma_bx_per_ps: model.gamma_bx(),
        gamma_x_per_ps: model.gamma_x(),
        open_system,
        theta_pi_units: template.theta() / PI,
        s_ps: template.s(),
        delta_mev: angular_to_mev(template.delta()),
        tau_ps: template.tau(),
        phase_rad: template.phase(),
        axis1: *axis1,
        axis2: *axis2,
        integrator: "commutator-free Magnus, 4th order, closed-form ladder exponentials".into(),
        dt_ps: dt,
        dt_rule: match dt {
            Some(_) => "fixed".into(),
            None => format!(
                "min(s/200, (2pi/delta)/80); template value {:.6} ps",
                default_dt(template)
            ),
        },
        window_sigmas: crate::model::WINDOW_SIGMAS,
        workers: None,
        created_unix_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        crate_version: env!("CARGO_PKG_VERSION").into(),
    };
    Ok(SweepResult {
        axis1: *axis1,
        axis2: *axis2,
        p_bx,
        errors,
        metadata,
    })
}

/// [`grid_sweep`] on a dedicated pool of `workers` threads.
pub fn grid_sweep_with_workers(
    sys: &LadderSystem,
    template: &DriveSpec,
    axis1: &SweepAxis,
    axis2: &SweepAxis,
    open_system: bool,
    dt: Option<f64>,
    workers: usize,
) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start {workers} workers: {e}")))?;
    let mut result = pool.install(|| grid_sweep(sys, template, axis1, axis2, open_system, dt))?;
    result.metadata.workers = Some(workers.max(1));
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robustness {
    /// Width in `Θ` of the widest contiguous run at or above the threshold.
    pub plateau_width: f64,
    pub max: f64,
}

/// Plateau width and maximum of a row sampled at `thetas`.
pub fn robustness_metrics(thetas: &[f64], row: &[f64], threshold: f64) -> Robustness {
    assert_eq!(thetas.len(), row.len(), "row and axis lengths differ");
    let mut width = 0.0f64;
    let mut start: Option<usize> = None;
    for k in 0..=row.len() {
        let above = k < row.len() && row[k] >= threshold;
        match (above, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                width = width.max(thetas[k - 1] - thetas[s]);
                start = None;
            }
            _ => {}
        }
    }
    let max = row
        .iter()
        .copied()
        .filter(|p| !p.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    Robustness {
        plateau_width: width,
        max,
    }
}
