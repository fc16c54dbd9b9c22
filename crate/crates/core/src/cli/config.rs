//! TOML run configuration. Units are part of every key name; Θ is given in
//! multiples of π. Unknown keys are rejected.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::floquet::{GapConvention, Route};
use crate::model::{DriveSpec, LadderSystem, StirapDrive};
use crate::sweep::{SweepAxis, SweepParam};
use crate::units::mev_to_angular;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub drive: DriveConfig,
    pub numerics: NumericsConfig,
    pub sweep: SweepConfig,
    pub compare: CompareConfig,
    pub optimize: OptimizeConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    #[serde(rename = "e_b_meV")]
    pub e_b_mev: f64,
    pub gamma_bx_per_ps: f64,
    pub gamma_x_per_ps: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        // radiative lifetimes of 250 ps for both cascade steps
        SystemConfig {
            e_b_mev: 2.82,
            gamma_bx_per_ps: 1.0 / 250.0,
            gamma_x_per_ps: 1.0 / 250.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveConfig {
    pub theta_pi_units: f64,
    pub s_ps: f64,
    #[serde(rename = "delta_meV")]
    pub delta_mev: f64,
    pub tau_ps: f64,
    pub phase_rad: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            theta_pi_units: 8.3,
            s_ps: 3.61,
            delta_mev: 3.75,
            tau_ps: -1.5,
            phase_rad: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteName {
    #[default]
    Log,
    Magnus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapName {
    Bare,
    #[default]
    Dressed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Fixed integration step; the default rule is `min(s/200, (2π/δ)/80)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_ps: Option<f64>,
    /// Output samples of time series.
    pub samples: usize,
    /// Coarse points of effective-field grids.
    pub coarse_points: usize,
    pub route: RouteName,
    pub gaps: GapName,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            dt_ps: None,
            samples: 1001,
            coarse_points: crate::floquet::DEFAULT_COARSE_POINTS,
            route: RouteName::Log,
            gaps: GapName::Dressed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub parameter: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub open_system: bool,
    pub axis1: AxisConfig,
    pub axis2: AxisConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            open_system: false,
            axis1: AxisConfig {
                parameter: SweepParam::Theta,
                min: 0.0,
                max: 12.0,
                count: 121,
            },
            axis2: AxisConfig {
                parameter: SweepParam::Delta,
                min: 0.0,
                max: 6.0,
                count: 121,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CompareMode {
    #[default]
    Tpe,
    Stirap,
    Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub mode: CompareMode,
    /// Upper end of the Θ scan for `tpe` and `stirap`.
    pub theta_max_pi_units: f64,
    pub points: usize,
    pub phase_points: usize,
    #[serde(rename = "stirap_delta_mid_meV")]
    pub stirap_delta_mid_mev: f64,
    /// Magnitude of the STIRAP pump delay; both orders are run.
    pub stirap_delay_ps: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            mode: CompareMode::Tpe,
            theta_max_pi_units: 6.0,
            points: 25,
            phase_points: 8,
            stirap_delta_mid_mev: 2.34,
            stirap_delay_ps: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeConfig {
    pub theta_min_pi_units: f64,
    pub theta_max_pi_units: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            theta_min_pi_units: 1.0,
            theta_max_pi_units: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// File-name prefix inside the output directory.
    pub prefix: String,
    /// Add complex amplitudes to closed-system time series.
    pub amplitudes: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            prefix: "ftpe".into(),
            amplitudes: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is plain data")
    }

    pub fn system(&self) -> Result<LadderSystem> {
        LadderSystem::new(self.system.e_b_mev)?
            .with_decay(self.system.gamma_bx_per_ps, self.system.gamma_x_per_ps)
    }

    pub fn drive(&self) -> Result<DriveSpec> {
        let d = &self.drive;
        DriveSpec::ftpe(
            d.theta_pi_units * PI,
            d.s_ps,
            mev_to_angular(d.delta_mev),
            d.tau_ps,
        )?
        .with_phase(d.phase_rad)
    }

    pub fn axes(&self) -> Result<(SweepAxis, SweepAxis)> {
        let make = |a: &AxisConfig| SweepAxis::new(a.parameter, a.min, a.max, a.count);
        Ok((make(&self.sweep.axis1)?, make(&self.sweep.axis2)?))
    }

    pub fn route(&self) -> Route {
        match self.numerics.route {
            RouteName::Log => Route::Log,
            RouteName::Magnus => Route::Magnus,
        }
    }

    pub fn gaps(&self) -> GapConvention {
        match self.numerics.gaps {
            GapName::Bare => GapConvention::Bare,
            GapName::Dressed => GapConvention::Dressed,
        }
    }

    /// STIRAP pair with equal areas `theta` (rad) and pump delay `delay` (ps).
    pub fn stirap(&self, theta: f64, delay: f64) -> Result<StirapDrive> {
        StirapDrive::symmetric(
            theta,
            self.drive.s_ps,
            delay,
            mev_to_angular(self.compare.stirap_delta_mid_mev),
        )
    }
}
