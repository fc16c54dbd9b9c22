//! Effective fields of the stroboscopic two-level model and the Bloch
//! trajectories they generate.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::reduction::{fields_of, reduce, GapConvention, PERTURBATIVE_RATIO};
use super::{stroboscopic, FrozenDrive, Route};
use crate::error::{invalid, Error, Result};
use crate::export::Num;
use crate::linalg::{c, expm_hermitian2, Mat2, Vec2c};
use crate::model::{DriveSpec, LadderSystem};
use crate::propagator::{uniform_grid, TimeSeries};

pub const DEFAULT_COARSE_POINTS: usize = 400;

/// Largest rotation angle `Δt·|B|` of a single two-level step.
const MAX_ROTATION: f64 = 0.05;
const MAX_SUBSTEPS: usize = 1 << 20;

/// `B_x(t)`, `B_y(t)`, `B_z(t)` in rad/ps on a coarse grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EffectiveField {
    pub times: Vec<f64>,
    pub bx: Vec<f64>,
    pub by: Vec<f64>,
    pub bz: Vec<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl EffectiveField {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_bx(&self) -> f64 {
        max_abs(&self.bx)
    }
    pub fn max_by(&self) -> f64 {
        max_abs(&self.by)
    }
    pub fn max_bz(&self) -> f64 {
        max_abs(&self.bz)
    }

    /// `max_t |B_z(t) + B_z(-t)|` over pairs mirrored about the grid centre.
    pub fn bz_antisymmetry_error(&self) -> f64 {
        let n = self.bz.len();
        (0..n / 2)
            .map(|k| (self.bz[k] + self.bz[n - 1 - k]).abs())
            .fold(0.0, f64::max)
    }

    /// `t_ps,bx,by,bz`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t_ps,bx,by,bz")?;
        for k in 0..self.times.len() {
            let row = [self.times[k], self.bx[k], self.by[k], self.bz[k]].map(Num);
            writeln!(w, "{},{},{},{}", row[0], row[1], row[2], row[3])?;
        }
        Ok(())
    }
}

/// Default coarse grid: 400 points across the drive window.
pub fn coarse_grid(d: &DriveSpec) -> Vec<f64> {
    let (t0, t1) = d.window();
    uniform_grid(t0, t1, DEFAULT_COARSE_POINTS)
}

/// Effective fields with dressed energy denominators.
pub fn effective_fields(
    sys: &LadderSystem,
    d: &DriveSpec,
    grid: &[f64],
    route: Route,
) -> Result<EffectiveField> {
    effective_fields_with(sys, d, grid, route, GapConvention::Dressed)
}

pub fn effective_fields_with(
    sys: &LadderSystem,
    d: &DriveSpec,
    grid: &[f64],
    route: Route,
    gaps: GapConvention,
) -> Result<EffectiveField> {
    let Some(period) = d.period() else {
        return Err(invalid("effective fields need a nonzero detuning"));
    };
    if period > d.s() / 3.0 {
        log::warn!(
            "carrier period {period:.3} ps exceeds s/3 = {:.3} ps; Floquet separation is degraded",
            d.s() / 3.0
        );
    }
    let samples: Vec<([f64; 3], f64)> = grid
        .par_iter()
        .map(|&t| {
            let fd = FrozenDrive::at(d, t)?;
            let h = stroboscopic(sys, &fd, route).map_err(|e| e.at(t))?;
            let (reduced, ratio) = reduce(&h, sys, gaps).map_err(|e| e.at(t))?;
            Ok((fields_of(&reduced), ratio))
        })
        .collect::<Result<_>>()?;
    let worst = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    if worst > PERTURBATIVE_RATIO {
        log::warn!(
            "exciton coupling reaches {worst:.2} of the gap; elimination is not perturbative"
        );
    }
    Ok(EffectiveField {
        times: grid.to_vec(),
        bx: samples.iter().map(|s| s.0[0]).collect(),
        by: samples.iter().map(|s| s.0[1]).collect(),
        bz: samples.iter().map(|s| s.0[2]).collect(),
    })
}

/// Bloch vector on `{BX, 0}`: north pole `|BX⟩`, south pole `|0⟩`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub sz: Vec<f64>,
}

fn bloch(a: Complex64, b: Complex64) -> [f64; 3] {
    let ab = a.conj() * b;
    [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
}

impl BlochTrajectory {
    fn push(&mut self, t: f64, a: Complex64, b: Complex64) {
        let [x, y, z] = bloch(a, b);
        self.times.push(t);
        self.sx.push(x);
        self.sy.push(y);
        self.sz.push(z);
    }

    /// Projection of a three-level run onto `{BX, 0}`; the vector is shorter
    /// than one while the exciton is populated.
    pub fn from_series(ts: &TimeSeries) -> Result<Self> {
        let amps = ts
            .amplitudes
            .as_ref()
            .ok_or_else(|| invalid("time series has no amplitudes"))?;
        let mut out = BlochTrajectory::default();
        for (t, a) in ts.times.iter().zip(amps) {
            out.push(*t, a[0], a[2]);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `P_BX = (1 + s_z)/2` at the last sample.
    pub fn final_p_bx(&self) -> f64 {
        self.sz.last().map_or(f64::NAN, |z| 0.5 * (1.0 + z))
    }

    /// Largest deviation of `|s|` from one.
    pub fn max_length_error(&self) -> f64 {
        (0..self.len())
            .map(|k| {
                let r2 = self.sx[k].powi(2) + self.sy[k].powi(2) + self.sz[k].powi(2);
                (r2.sqrt() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `t_ps,sx,sy,sz`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t_ps,sx,sy,sz")?;
        for k in 0..self.times.len() {
            let row = [self.times[k], self.sx[k], self.sy[k], self.sz[k]].map(Num);
            writeln!(w, "{},{},{},{}", row[0], row[1], row[2], row[3])?;
        }
        Ok(())
    }
}

fn field_generator(b: [f64; 3]) -> Mat2 {
    Mat2::new(
        c(0.5 * b[2]),
        Complex64::new(0.5 * b[0], -0.5 * b[1]),
        Complex64::new(0.5 * b[0], 0.5 * b[1]),
        c(-0.5 * b[2]),
    )
}

/// Integrates `i d/dt (a, b) = ½(B·σ)(a, b)` with the fields linearly
/// interpolated between samples. Each coarse interval is subdivided so that
/// no step rotates by more than 0.05 rad.
pub fn propagate_effective(eff: &EffectiveField, psi0: [Complex64; 2]) -> Result<BlochTrajectory> {
    if eff.is_empty() {
        return Err(invalid("effective field has no samples"));
    }
    let norm = (psi0[0].norm_sqr() + psi0[1].norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(invalid(format!(
            "initial state must be normalized, |psi| = {norm}"
        )));
    }
    let field = |k: usize| [eff.bx[k], eff.by[k], eff.bz[k]];
    let strength = |b: [f64; 3]| (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();

    let mut psi = Vec2c::new(psi0[0], psi0[1]);
    let mut out = BlochTrajectory::default();
    out.push(eff.times[0], psi[0], psi[1]);
    for k in 1..eff.len() {
        let (t0, t1) = (eff.times[k - 1], eff.times[k]);
        let span = t1 - t0;
        if !(span > 0.0) {
            return Err(invalid("effective-field times must be strictly increasing"));
        }
        let (b0, b1) = (field(k - 1), field(k));
        let peak = strength(b0).max(strength(b1));
        let wanted = (span * peak / MAX_ROTATION).ceil();
        if wanted > MAX_SUBSTEPS as f64 {
            return Err(Error::StepTooLarge {
                dt: span,
                limit: MAX_SUBSTEPS as f64 * MAX_ROTATION / peak,
            });
        }
        let n = (wanted as usize).max(1);
        let h = span / n as f64;
        for j in 0..n {
            let x = (j as f64 + 0.5) / n as f64;
            let b = [0, 1, 2].map(|i| b0[i] + x * (b1[i] - b0[i]));
            psi = expm_hermitian2(&field_generator(b), h) * psi;
        }
        out.push(t1, psi[0], psi[1]);
    }
    Ok(out)
}
