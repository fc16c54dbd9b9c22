//! Excitation protocols and closed-form references: conventional two-photon
//! excitation (TPE), its frequency-modulated variant (FTPE), STIRAP, the
//! optimum-area search, and small arithmetic helpers for the Bell-state
//! fidelity and the ac-Stark tuning of the fine-structure splitting.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::model::{DriveSpec, LadderSystem, StirapDrive};
use crate::propagator::{
    evolve_final_state, evolve_lindblad, evolve_state, final_occupations, uniform_grid,
    DensityMatrix, DrivenLadder, PureState, TimeSeries,
};
use crate::quad::adaptive_simpson;
use crate::units::HBAR;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Tpe,
    Ftpe,
    Stirap,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Tpe => "TPE",
            ScenarioKind::Ftpe => "FTPE",
            ScenarioKind::Stirap => "STIRAP",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioDrive {
    Dichromatic(DriveSpec),
    Stirap(StirapDrive),
}

/// A labelled excitation run: system, drive, window and output resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    kind: ScenarioKind,
    sys: LadderSystem,
    drive: ScenarioDrive,
    window: (f64, f64),
    samples: usize,
}

impl Scenario {
    pub fn new(
        kind: ScenarioKind,
        sys: LadderSystem,
        drive: ScenarioDrive,
        window: Option<(f64, f64)>,
        samples: usize,
    ) -> Result<Self> {
        let default_window = match (&kind, &drive) {
            (ScenarioKind::Tpe, ScenarioDrive::Dichromatic(d)) => {
                if d.delta() != 0.0 || d.tau() != 0.0 {
                    return Err(invalid("a TPE scenario needs zero detuning and zero delay"));
                }
                d.window()
            }
            (ScenarioKind::Ftpe, ScenarioDrive::Dichromatic(d)) => d.window(),
            (ScenarioKind::Stirap, ScenarioDrive::Stirap(s)) => s.window(),
            _ => {
                return Err(invalid(format!(
                    "drive kind does not match scenario {kind}"
                )))
            }
        };
        let window = window.unwrap_or(default_window);
        if !(window.1 > window.0) {
            return Err(invalid("scenario window must have positive length"));
        }
        if samples < 2 {
            return Err(invalid("scenario needs at least two output samples"));
        }
        Ok(Scenario {
            kind,
            sys,
            drive,
            window,
            samples,
        })
    }

    pub fn tpe(sys: LadderSystem, theta: f64, s: f64) -> Result<Self> {
        Self::new(
            ScenarioKind::Tpe,
            sys,
            ScenarioDrive::Dichromatic(DriveSpec::tpe(theta, s)?),
            None,
            1001,
        )
    }

    pub fn ftpe(sys: LadderSystem, d: DriveSpec) -> Result<Self> {
        Self::new(
            ScenarioKind::Ftpe,
            sys,
            ScenarioDrive::Dichromatic(d),
            None,
            1001,
        )
    }

    pub fn stirap(sys: LadderSystem, drive: StirapDrive) -> Result<Self> {
        Self::new(
            ScenarioKind::Stirap,
            sys,
            ScenarioDrive::Stirap(drive),
            None,
            1001,
        )
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }
    pub fn system(&self) -> &LadderSystem {
        &self.sys
    }
    pub fn drive(&self) -> &ScenarioDrive {
        &self.drive
    }
    pub fn window(&self) -> (f64, f64) {
        self.window
    }
    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Occupations on the scenario grid starting from the ground state.
    /// Decay rates of the system apply to the dichromatic scenarios only.
    pub fn run(&self, dt_max: Option<f64>) -> Result<TimeSeries> {
        let grid = uniform_grid(self.window.0, self.window.1, self.samples);
        match &self.drive {
            ScenarioDrive::Dichromatic(d) => {
                let drive = DrivenLadder {
                    sys: &self.sys,
                    drive: d,
                };
                if self.sys.is_closed() {
                    evolve_state(&drive, &PureState::ground(), &grid, dt_max)
                } else {
                    let rho0 = DensityMatrix::from_pure(&PureState::ground());
                    evolve_lindblad(&drive, &self.sys, &rho0, &grid, dt_max)
                }
            }
            ScenarioDrive::Stirap(s) => evolve_state(s, &PureState::ground(), &grid, dt_max),
        }
    }
}

/// Polarization correlations `C_μ` of the emitted photon pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSet {
    pub c_linear: f64,
    pub c_diagonal: f64,
    pub c_circular: f64,
}

impl CorrelationSet {
    pub fn new(c_linear: f64, c_diagonal: f64, c_circular: f64) -> Result<Self> {
        let set = CorrelationSet {
            c_linear,
            c_diagonal,
            c_circular,
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("c_linear", self.c_linear),
            ("c_diagonal", self.c_diagonal),
            ("c_circular", self.c_circular),
        ] {
            if !(value.abs() <= 1.0) {
                return Err(Error::OutOfRange { name, value });
            }
        }
        Ok(())
    }
}

/// Bell-state fidelity `(1 + C_lin + C_diag - C_circ)/4`; never clamped.
pub fn fidelity_from_correlations(c: &CorrelationSet) -> Result<f64> {
    c.validate()?;
    Ok((1.0 + c.c_linear + c.c_diagonal - c.c_circular) / 4.0)
}

/// Fine-structure shift `½(δ_CW - √(δ_CW² + Ω²))` (rad/ps) under a CW
/// dressing laser with detuning `delta_cw` and Rabi frequency `omega`.
pub fn fss_ac_stark(delta_cw: f64, omega: f64) -> f64 {
    let root = delta_cw.hypot(omega);
    if delta_cw > 0.0 {
        // cancellation-free form of the same expression
        -0.5 * omega * omega / (delta_cw + root)
    } else {
        0.5 * (delta_cw - root)
    }
}

/// Adiabatic occupation `sin²(Λ/2)` for simultaneous pulses, with
/// `Λ = (1/4ħ)∫[E_B - √(E_B² + 8ħ²|Ω(t)|²)]dt` and `Ω(t) = 2f(t)cos(δt)`
/// taken from the drive itself.
pub fn tpe_adiabatic_prediction(sys: &LadderSystem, d: &DriveSpec) -> Result<f64> {
    if d.tau().abs() > 1e-12 {
        return Err(invalid(
            "adiabatic TPE prediction assumes simultaneous pulses",
        ));
    }
    let e_b = sys.e_b();
    let (t0, t1) = d.window();
    let integrand = |t: f64| {
        let hw2 = HBAR * HBAR * d.value(t).norm_sqr();
        e_b - (e_b * e_b + 8.0 * hw2).sqrt()
    };
    // several panels per quarter carrier period so the error estimate sees the oscillation
    let panels = match d.period() {
        Some(p) => ((t1 - t0) / p * 8.0).ceil().max(64.0) as usize,
        None => 64,
    };
    let lambda = adaptive_simpson(integrand, t0, t1, panels, 1e-10) / (4.0 * HBAR);
    Ok((0.5 * lambda).sin().powi(2))
}

pub const COARSE_SCAN_POINTS: usize = 41;
const GOLDEN_TOL: f64 = 1e-6;

/// First local maximum of the final `P_BX` versus `Θ` (rad) inside
/// `theta_range`, located by a 41-point scan and golden-section refinement.
/// Returns `(Θ_opt, P_BX(Θ_opt))`; on exact ties the smaller `Θ` wins.
pub fn find_optimal_theta(
    sys: &LadderSystem,
    template: &DriveSpec,
    theta_range: (f64, f64),
) -> Result<(f64, f64)> {
    let (lo, hi) = theta_range;
    if !(hi > lo && lo >= 0.0) {
        return Err(invalid(format!("invalid Θ range [{lo}, {hi}]")));
    }
    let p_bx = |theta: f64| -> Result<f64> {
        Ok(final_occupations(sys, &template.with_theta(theta)?, None)?[0])
    };
    let thetas = uniform_grid(lo, hi, COARSE_SCAN_POINTS);
    let values = thetas
        .iter()
        .map(|&t| p_bx(t))
        .collect::<Result<Vec<_>>>()?;
    let peak = (1..COARSE_SCAN_POINTS - 1)
        .find(|&k| values[k] >= values[k - 1] && values[k] > values[k + 1])
        .ok_or(Error::NoMaximumFound)?;

    // golden-section search on the bracketing cells
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (thetas[peak - 1], thetas[peak + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (p_bx(c)?, p_bx(d)?);
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = p_bx(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = p_bx(d)?;
        }
    }
    let (theta, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    if value >= values[peak] {
        Ok((theta, value))
    } else {
        Ok((thetas[peak], values[peak]))
    }
}

/// STIRAP occupations on `grid` starting in the ground state; the target is
/// the biexciton.
pub fn run_stirap(drive: &StirapDrive, grid: &[f64], dt_max: Option<f64>) -> Result<TimeSeries> {
    evolve_state(drive, &PureState::ground(), grid, dt_max)
}

/// Final biexciton occupation of a STIRAP run over the drive window.
pub fn stirap_transfer(drive: &StirapDrive, dt_max: Option<f64>) -> Result<f64> {
    Ok(evolve_final_state(drive, &PureState::ground(), drive.window(), dt_max)?.occupations()[0])
}
