//! Stroboscopic (Floquet) description of the dichromatic drive.
//!
//! With the pulse envelopes frozen at a coarse time `t`, the drive is
//! periodic in `T = 2π/δ`. The one-period propagator defines the
//! stroboscopic Hamiltonian `H̄ = (iħ/T)·log U(T)`, obtained either from the
//! matrix logarithm or from the Magnus series through third order. Eliminating
//! the exciton leaves a two-level model on `{BX, 0}` whose effective field
//! follows the envelopes adiabatically.

mod fields;
mod magnus;
mod reduction;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use fields::{
    coarse_grid, effective_fields, effective_fields_with, propagate_effective, BlochTrajectory,
    EffectiveField, DEFAULT_COARSE_POINTS,
};
pub use magnus::{magnus_sum, magnus_tau0_analytic, magnus_terms};
pub use reduction::{
    fields_of, schrieffer_wolff_reduce, schrieffer_wolff_reduce_with, GapConvention, MIN_GAP,
    PERTURBATIVE_RATIO,
};

use crate::error::{invalid, Result};
use crate::linalg::{c, principal_log_unitary, LadderRates, Mat3};
use crate::model::{DriveSpec, LadderSystem};
use crate::propagator::{evolve_unitary, LadderDrive};
use crate::units::HBAR;

/// Integration steps per period for the one-period propagator.
pub const STEPS_PER_PERIOD: usize = 256;

/// Dichromatic drive with constant envelopes:
/// `Ω(t) = blue·e^{-iδt} + red·e^{i(δt + φ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenDrive {
    /// Envelope of the red-detuned pulse (rad/ps).
    pub red: f64,
    /// Envelope of the blue-detuned pulse (rad/ps).
    pub blue: f64,
    /// Detuning δ (rad/ps).
    pub delta: f64,
    /// Relative phase φ (rad).
    pub phase: f64,
}

impl FrozenDrive {
    pub fn new(red: f64, blue: f64, delta: f64, phase: f64) -> Result<Self> {
        if !(delta != 0.0 && delta.is_finite()) {
            return Err(invalid("frozen drive needs a nonzero detuning"));
        }
        if !(red.is_finite() && blue.is_finite() && phase.is_finite()) {
            return Err(invalid("frozen drive parameters must be finite"));
        }
        Ok(FrozenDrive {
            red,
            blue,
            delta,
            phase,
        })
    }

    /// Envelopes of `d` frozen at time `t`.
    pub fn at(d: &DriveSpec, t: f64) -> Result<Self> {
        Self::new(
            d.red().envelope_value(t),
            d.blue().envelope_value(t),
            d.delta(),
            d.phase(),
        )
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.delta.abs()
    }

    #[inline]
    pub fn field(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.blue, -self.delta * t)
            + Complex64::from_polar(self.red, self.delta * t + self.phase)
    }

    /// Instantaneous Hamiltonian (meV).
    pub fn hamiltonian_at(&self, sys: &LadderSystem, t: f64) -> Mat3 {
        sys.rates(self.field(t)).matrix() * c(HBAR)
    }
}

struct FrozenLadder<'a> {
    sys: &'a LadderSystem,
    fd: &'a FrozenDrive,
}

impl LadderDrive for FrozenLadder<'_> {
    #[inline]
    fn rates_at(&self, t: f64) -> LadderRates {
        self.sys.rates(self.fd.field(t))
    }
    fn carrier(&self) -> f64 {
        self.fd.delta.abs()
    }
    fn envelope_scale(&self) -> f64 {
        f64::INFINITY
    }
}

/// `U(T, 0)` of the frozen drive.
pub fn period_propagator(sys: &LadderSystem, fd: &FrozenDrive) -> Result<Mat3> {
    let t = fd.period();
    evolve_unitary(
        &FrozenLadder { sys, fd },
        0.0,
        t,
        t / STEPS_PER_PERIOD as f64,
    )
}

/// `H̄ = (iħ/T)·log U(T)` (meV) with the principal logarithm.
pub fn stroboscopic_from_log(sys: &LadderSystem, fd: &FrozenDrive) -> Result<Mat3> {
    let u = period_propagator(sys, fd)?;
    let log = principal_log_unitary(&u)?;
    Ok(log.generator() * c(HBAR / fd.period()))
}

/// How the stroboscopic Hamiltonian is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Matrix logarithm of the one-period propagator.
    #[default]
    Log,
    /// Magnus series through third order.
    Magnus,
}

pub fn stroboscopic(sys: &LadderSystem, fd: &FrozenDrive, route: Route) -> Result<Mat3> {
    match route {
        Route::Log => stroboscopic_from_log(sys, fd),
        Route::Magnus => Ok(magnus_sum(sys, fd, 3)),
    }
}

/// Effective pulse area of the second-order two-level model for equal,
/// simultaneous pulses:
/// `Λ = E_B/(8√π·ħδ²s)·(1 - E_B²/(2ħ²δ²))·Θ²`.
pub fn effective_pulse_area(sys: &LadderSystem, d: &DriveSpec) -> Result<f64> {
    if d.tau().abs() > 1e-12 || d.phase().abs() > 1e-12 {
        return Err(invalid(
            "effective pulse area assumes zero delay and zero relative phase",
        ));
    }
    let delta = d.delta();
    if delta <= 0.0 {
        return Err(invalid("effective pulse area needs a nonzero detuning"));
    }
    let e_b = sys.e_b();
    let hd2 = HBAR * delta * delta;
    let ratio = e_b / (HBAR * delta);
    let correction = 1.0 - 0.5 * ratio * ratio;
    Ok(e_b / (8.0 * PI.sqrt() * hd2 * d.s()) * correction * d.theta() * d.theta())
}

/// Biexciton occupation `sin²Λ` predicted by the effective pulse area.
pub fn predicted_occupation(lambda: f64) -> f64 {
    lambda.sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linalg::{expm_hermitian, hermiticity_error, max_abs};
    use crate::propagator::final_occupations;
    use crate::units::mev_to_angular;

    fn sys() -> LadderSystem {
        LadderSystem::new(2.82).unwrap()
    }

    #[test]
    fn drive_off_gives_static_hamiltonian() {
        let fd = FrozenDrive::new(0.0, 0.0, mev_to_angular(3.75), 0.0).unwrap();
        let h = stroboscopic_from_log(&sys(), &fd).unwrap();
        let mut expected = Mat3::zeros();
        expected[(1, 1)] = c(1.41);
        assert!(max_abs(&(h - expected)) < 1e-12);
    }

    #[test]
    fn log_round_trip_and_hermiticity() {
        for (red, blue, phase) in [(1.0, 1.0, 0.0), (2.78, 0.4, 0.0), (0.3, 3.1, 2.0)] {
            let fd = FrozenDrive::new(red, blue, mev_to_angular(3.75), phase).unwrap();
            let h = stroboscopic_from_log(&sys(), &fd).unwrap();
            assert!(hermiticity_error(&h) < 1e-9);
            let u = period_propagator(&sys(), &fd).unwrap();
            let back = expm_hermitian(&h, fd.period() / HBAR);
            assert!(max_abs(&(back - u)) < 1e-8);
        }
    }

    #[test]
    fn branch_ambiguity_is_reported() {
        // exciton phase π·E_b/(ħδ) sits on the branch cut at ħδ = E_b
        let fd = FrozenDrive::new(0.0, 0.0, mev_to_angular(2.82), 0.0).unwrap();
        assert!(matches!(
            stroboscopic_from_log(&sys(), &fd),
            Err(Error::BranchAmbiguity { .. })
        ));
        assert!(FrozenDrive::new(1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn magnus_converges_to_log() {
        let mut last = f64::INFINITY;
        for k in 0..4 {
            let delta = mev_to_angular(3.75 * 2f64.powi(k));
            let fd = FrozenDrive::new(1.0, 1.0, delta, 0.0).unwrap();
            let log = stroboscopic_from_log(&sys(), &fd).unwrap();
            let gap = max_abs(&(log - magnus_sum(&sys(), &fd, 3)));
            assert!(gap < last, "δ = {delta}: {gap} vs {last}");
            last = gap;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn pulse_area_scaling() {
        let d = DriveSpec::ftpe(3.0 * PI, 3.61, mev_to_angular(3.75), 0.0).unwrap();
        let a = effective_pulse_area(&sys(), &d).unwrap();
        let b = effective_pulse_area(&sys(), &d.with_theta(6.0 * PI).unwrap()).unwrap();
        assert_eq!(b, 4.0 * a);
        let zero = effective_pulse_area(&sys(), &d.with_theta(0.0).unwrap()).unwrap();
        assert_eq!(zero, 0.0);
        assert_eq!(predicted_occupation(zero), 0.0);
        assert!(effective_pulse_area(&sys(), &d.with_tau(-1.5).unwrap()).is_err());
    }

    fn max_area_deviation(delta_mev: f64) -> f64 {
        // rising edge of the first oscillation, Λ ≤ π/2
        let base = DriveSpec::ftpe(0.0, 3.61, mev_to_angular(delta_mev), 0.0).unwrap();
        let mut worst = 0.0f64;
        for k in 1.. {
            let d = base.with_theta(0.5 * k as f64 * PI).unwrap();
            let lambda = effective_pulse_area(&sys(), &d).unwrap();
            if lambda > 0.5 * PI {
                break;
            }
            let full = final_occupations(&sys(), &d, None).unwrap()[0];
            worst = worst.max((full - predicted_occupation(lambda)).abs());
        }
        worst
    }

    #[test]
    fn pulse_area_predicts_first_rise_at_large_detuning() {
        let worst = max_area_deviation(7.5);
        assert!(worst < 0.1, "{worst}");
    }

    #[test]
    #[ignore = "second-order pulse area is not accurate at δ = 3.75 meV"]
    fn pulse_area_predicts_first_rise_at_working_detuning() {
        let worst = max_area_deviation(3.75);
        assert!(worst < 0.1, "{worst}");
    }
}
