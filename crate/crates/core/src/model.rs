//! Physical parameters, pulse and drive definitions, and the instantaneous
//! Hamiltonians of the ground–exciton–biexciton ladder and of the STIRAP
//! reference system.
//!
//! Every matrix is written in the basis `{BX, X_V, 0}`. The frame rotates at
//! half the biexciton energy, so the two outer levels sit at zero energy and
//! the exciton at `E_b/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::linalg::{c, LadderRates, Mat3};
use crate::units::HBAR;

/// Gaussian tails are negligible beyond this many standard deviations.
pub const WINDOW_SIGMAS: f64 = 8.0;

/// One Gaussian laser pulse.
///
/// The complex field contributed to `Ω(t)` is
/// `f(t - center)·exp(-i·detuning·t + i·phase)` with
/// `f(t) = Θ/(√(2π)s)·exp(-t²/2s²)`, so a pulse tuned above the two-photon
/// resonance (positive `detuning`) carries `e^{-iδt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    theta: f64,
    s: f64,
    center: f64,
    detuning: f64,
    phase: f64,
}

impl PulseSpec {
    /// `theta` in rad, `s` and `center` in ps, `detuning` in rad/ps, `phase` in rad.
    pub fn new(theta: f64, s: f64, center: f64, detuning: f64, phase: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid(format!("pulse width s must be positive, got {s}")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(invalid(format!(
                "pulse area must be non-negative, got {theta}"
            )));
        }
        if !(center.is_finite() && detuning.is_finite() && phase.is_finite()) {
            return Err(invalid("pulse center, detuning and phase must be finite"));
        }
        Ok(PulseSpec {
            theta,
            s,
            center,
            detuning,
            phase,
        })
    }

    /// Real Gaussian envelope without carrier.
    pub fn envelope(s: f64, theta: f64) -> Self {
        PulseSpec {
            theta,
            s,
            center: 0.0,
            detuning: 0.0,
            phase: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn center(&self) -> f64 {
        self.center
    }
    pub fn detuning(&self) -> f64 {
        self.detuning
    }
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        Self::new(theta, self.s, self.center, self.detuning, self.phase)
    }

    pub fn with_center(self, center: f64) -> Result<Self> {
        Self::new(self.theta, self.s, center, self.detuning, self.phase)
    }

    /// Peak envelope value `Θ/(√(2π)s)` in rad/ps.
    pub fn peak(&self) -> f64 {
        self.theta / ((2.0 * PI).sqrt() * self.s)
    }

    /// Envelope amplitude `f(t - center)` in rad/ps.
    #[inline]
    pub fn envelope_value(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.s;
        self.peak() * (-0.5 * x * x).exp()
    }

    /// Complex field including carrier and phase.
    #[inline]
    pub fn field(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.envelope_value(t), self.phase - self.detuning * t)
    }
}

/// Free-function form of [`PulseSpec::envelope_value`].
pub fn envelope_value(p: &PulseSpec, t: f64) -> f64 {
    p.envelope_value(t)
}

/// Dichromatic drive: a blue pulse detuned by `+δ` and a red pulse detuned
/// by `-δ` from the two-photon resonance, so that `E_blue + E_red = E_BX`.
///
/// With [`DriveSpec::ftpe`] the blue pulse sits at `+τ/2` and the red at
/// `-τ/2`, and the relative phase rides on the red pulse:
///
/// `Ω(t) = f(t - τ/2)·e^{-iδt} + f(t + τ/2)·e^{i(δt + φ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    red: PulseSpec,
    blue: PulseSpec,
}

impl DriveSpec {
    pub fn new(red: PulseSpec, blue: PulseSpec) -> Result<Self> {
        let scale = red.detuning.abs().max(blue.detuning.abs()).max(1.0);
        if (red.detuning + blue.detuning).abs() > 1e-12 * scale {
            return Err(invalid(format!(
                "red and blue detunings must be opposite, got {} and {}",
                red.detuning, blue.detuning
            )));
        }
        if blue.detuning < 0.0 {
            return Err(invalid(
                "the blue pulse must carry the non-negative detuning",
            ));
        }
        Ok(DriveSpec { red, blue })
    }

    /// Symmetric two-colour drive with equal areas and widths.
    ///
    /// `theta` in rad per pulse, `s` and `tau` in ps, `delta` in rad/ps.
    pub fn ftpe(theta: f64, s: f64, delta: f64, tau: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(invalid(format!(
                "detuning magnitude must be non-negative, got {delta}"
            )));
        }
        let blue = PulseSpec::new(theta, s, 0.5 * tau, delta, 0.0)?;
        let red = PulseSpec::new(theta, s, -0.5 * tau, -delta, 0.0)?;
        DriveSpec::new(red, blue)
    }

    /// Degenerate two-photon excitation: `δ = 0`, both halves coincide.
    pub fn tpe(theta: f64, s: f64) -> Result<Self> {
        Self::ftpe(theta, s, 0.0, 0.0)
    }

    pub fn red(&self) -> &PulseSpec {
        &self.red
    }
    pub fn blue(&self) -> &PulseSpec {
        &self.blue
    }

    /// Detuning magnitude δ in rad/ps.
    pub fn delta(&self) -> f64 {
        self.blue.detuning
    }

    /// Delay `τ = blue.center - red.center` in ps.
    pub fn tau(&self) -> f64 {
        self.blue.center - self.red.center
    }

    /// Relative phase φ of the red pulse.
    pub fn phase(&self) -> f64 {
        self.red.phase - self.blue.phase
    }

    /// Area per pulse (the blue pulse's, which equals the red one's unless overridden).
    pub fn theta(&self) -> f64 {
        self.blue.theta
    }

    pub fn s(&self) -> f64 {
        self.blue.s.max(self.red.s)
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        DriveSpec::new(self.red.with_theta(theta)?, self.blue.with_theta(theta)?)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(invalid(format!(
                "detuning magnitude must be non-negative, got {delta}"
            )));
        }
        let red = PulseSpec {
            detuning: -delta,
            ..self.red
        };
        let blue = PulseSpec {
            detuning: delta,
            ..self.blue
        };
        DriveSpec::new(red, blue)
    }

    /// Re-centre both pulses symmetrically about `t = 0` with delay `tau`.
    pub fn with_tau(self, tau: f64) -> Result<Self> {
        DriveSpec::new(
            self.red.with_center(-0.5 * tau)?,
            self.blue.with_center(0.5 * tau)?,
        )
    }

    pub fn with_phase(self, phase: f64) -> Result<Self> {
        let red = PulseSpec::new(
            self.red.theta,
            self.red.s,
            self.red.center,
            self.red.detuning,
            phase + self.blue.phase,
        )?;
        DriveSpec::new(red, self.blue)
    }

    /// Carrier period `2π/δ`, or `None` for degenerate driving.
    pub fn period(&self) -> Option<f64> {
        (self.delta() > 0.0).then(|| 2.0 * PI / self.delta())
    }

    /// Default simulation window `[-8s - |τ|/2, 8s + |τ|/2]` (generalized to
    /// arbitrary pulse centres).
    pub fn window(&self) -> (f64, f64) {
        let lo = (self.red.center - WINDOW_SIGMAS * self.red.s)
            .min(self.blue.center - WINDOW_SIGMAS * self.blue.s);
        let hi = (self.red.center + WINDOW_SIGMAS * self.red.s)
            .max(self.blue.center + WINDOW_SIGMAS * self.blue.s);
        (lo, hi)
    }

    /// `Ω(t)` in rad/ps.
    #[inline]
    pub fn value(&self, t: f64) -> Complex64 {
        self.blue.field(t) + self.red.field(t)
    }
}

/// Free-function form of [`DriveSpec::value`].
pub fn drive_value(d: &DriveSpec, t: f64) -> Complex64 {
    d.value(t)
}

/// Quantum-dot constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderSystem {
    e_b: f64,
    gamma_bx: f64,
    gamma_x: f64,
}

impl LadderSystem {
    /// Closed system with binding energy `e_b` (meV, any sign).
    pub fn new(e_b: f64) -> Result<Self> {
        if !e_b.is_finite() {
            return Err(invalid("binding energy must be finite"));
        }
        Ok(LadderSystem {
            e_b,
            gamma_bx: 0.0,
            gamma_x: 0.0,
        })
    }

    /// Radiative cascade rates in 1/ps.
    pub fn with_decay(self, gamma_bx: f64, gamma_x: f64) -> Result<Self> {
        if !(gamma_bx >= 0.0 && gamma_x >= 0.0 && gamma_bx.is_finite() && gamma_x.is_finite()) {
            return Err(invalid(format!(
                "decay rates must be non-negative, got {gamma_bx} and {gamma_x}"
            )));
        }
        Ok(LadderSystem {
            gamma_bx,
            gamma_x,
            ..self
        })
    }

    pub fn e_b(&self) -> f64 {
        self.e_b
    }
    pub fn gamma_bx(&self) -> f64 {
        self.gamma_bx
    }
    pub fn gamma_x(&self) -> f64 {
        self.gamma_x
    }

    pub fn is_closed(&self) -> bool {
        self.gamma_bx == 0.0 && self.gamma_x == 0.0
    }

    /// Exciton energy in the rotating frame, `E_b/(2ħ)` in rad/ps.
    pub fn exciton_frequency(&self) -> f64 {
        0.5 * self.e_b / HBAR
    }

    /// Ladder generator for a given complex Rabi frequency `Ω` (rad/ps).
    #[inline]
    pub fn rates(&self, omega: Complex64) -> LadderRates {
        LadderRates {
            upper: 0.5 * omega,
            middle: self.exciton_frequency(),
            lower: 0.5 * omega.conj(),
        }
    }
}

/// Instantaneous Hamiltonian (meV) in the basis `{BX, X_V, 0}`:
/// `ħ·[[0, Ω*/2, 0], [Ω/2, E_b/(2ħ), Ω*/2], [0, Ω/2, 0]]`.
pub fn hamiltonian_at(sys: &LadderSystem, d: &DriveSpec, t: f64) -> Mat3 {
    sys.rates(d.value(t)).matrix() * c(HBAR)
}

/// STIRAP Hamiltonian (meV): `ħ·[[0, Ωp/2, 0], [Ωp/2, Δ, Ωs/2], [0, Ωs/2, 0]]`
/// with real envelopes `Ωp`, `Ωs` and middle-level detuning `Δ` in rad/ps.
pub fn stirap_hamiltonian_at(omega_p: f64, omega_s: f64, delta_mid: f64) -> Mat3 {
    stirap_rates(omega_p, omega_s, delta_mid).matrix() * c(HBAR)
}

#[inline]
pub(crate) fn stirap_rates(omega_p: f64, omega_s: f64, delta_mid: f64) -> LadderRates {
    LadderRates {
        upper: c(0.5 * omega_p),
        middle: delta_mid,
        lower: c(0.5 * omega_s),
    }
}

/// Pulse pair of the STIRAP reference: `Ωp` couples `BX ↔ X`, `Ωs` couples
/// `X ↔ 0`. Starting from the ground state, the counterintuitive order has
/// `Ωp` first, i.e. a negative pump delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirapDrive {
    pub pump: PulseSpec,
    pub stokes: PulseSpec,
    /// Middle-level detuning Δ in rad/ps.
    pub delta_mid: f64,
}

impl StirapDrive {
    pub fn new(pump: PulseSpec, stokes: PulseSpec, delta_mid: f64) -> Result<Self> {
        if !delta_mid.is_finite() {
            return Err(invalid("STIRAP detuning must be finite"));
        }
        Ok(StirapDrive {
            pump,
            stokes,
            delta_mid,
        })
    }

    /// Equal Gaussian envelopes centred symmetrically about zero with
    /// `pump.center - stokes.center = pump_delay`.
    pub fn symmetric(theta: f64, s: f64, pump_delay: f64, delta_mid: f64) -> Result<Self> {
        let pump = PulseSpec::new(theta, s, 0.5 * pump_delay, 0.0, 0.0)?;
        let stokes = PulseSpec::new(theta, s, -0.5 * pump_delay, 0.0, 0.0)?;
        Self::new(pump, stokes, delta_mid)
    }

    pub fn pump_delay(&self) -> f64 {
        self.pump.center - self.stokes.center
    }

    pub fn is_counterintuitive(&self) -> bool {
        self.pump_delay() < 0.0
    }

    pub fn window(&self) -> (f64, f64) {
        let lo = (self.pump.center - WINDOW_SIGMAS * self.pump.s)
            .min(self.stokes.center - WINDOW_SIGMAS * self.stokes.s);
        let hi = (self.pump.center + WINDOW_SIGMAS * self.pump.s)
            .max(self.stokes.center + WINDOW_SIGMAS * self.stokes.s);
        (lo, hi)
    }

    pub fn hamiltonian_at(&self, t: f64) -> Mat3 {
        stirap_hamiltonian_at(
            self.pump.envelope_value(t),
            self.stokes.envelope_value(t),
            self.delta_mid,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_error, BX, G, X};
    use crate::quad::adaptive_simpson;
    use crate::units::mev_to_angular;
    use proptest::prelude::*;

    const S: f64 = 3.61;

    #[test]
    fn envelope_examples() {
        let zero = PulseSpec::new(0.0, S, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(zero.envelope_value(1.3), 0.0);

        let unit = PulseSpec::new((2.0 * PI).sqrt() * S, S, 0.7, 0.0, 0.0).unwrap();
        assert!((unit.envelope_value(0.7) - 1.0).abs() < 1e-15);

        // direct Gaussian formula one standard deviation off centre
        let p = PulseSpec::new(PI, S, 0.4, 0.0, 0.0).unwrap();
        let direct = PI / ((2.0 * PI).sqrt() * S) * (-0.5f64).exp();
        assert!((p.envelope_value(0.4 + S) - direct).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_pulses() {
        assert!(PulseSpec::new(1.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(PulseSpec::new(-1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        let red = PulseSpec::new(1.0, 1.0, 0.0, -1.0, 0.0).unwrap();
        let blue = PulseSpec::new(1.0, 1.0, 0.0, 1.5, 0.0).unwrap();
        assert!(DriveSpec::new(red, blue).is_err());
    }

    #[test]
    fn envelope_integral_reproduces_area() {
        let p = PulseSpec::new(7.7 * PI, S, 0.3, 0.0, 0.0).unwrap();
        let area = adaptive_simpson(
            |t| p.envelope_value(t),
            0.3 - 8.0 * S,
            0.3 + 8.0 * S,
            16,
            1e-12,
        );
        assert!(((area - p.theta()) / p.theta()).abs() < 1e-9);
    }

    #[test]
    fn drive_value_examples() {
        let delta = mev_to_angular(3.75);
        let d = DriveSpec::ftpe(5.0, S, delta, 0.0).unwrap();
        let f0 = d.blue().peak();
        assert!((d.value(0.0) - c(2.0 * f0)).norm() < 1e-14);
        let t = 0.5 * PI / delta;
        assert!(d.value(t).norm() < 1e-14);

        // two independently summed terms at finite delay
        let tau = -1.5;
        let d = DriveSpec::ftpe(8.3 * PI, S, delta, tau).unwrap();
        let f = |t: f64| 8.3 * PI / ((2.0 * PI).sqrt() * S) * (-t * t / (2.0 * S * S)).exp();
        let t = 0.0;
        let expected = Complex64::from_polar(f(t - tau / 2.0), -delta * t)
            + Complex64::from_polar(f(t + tau / 2.0), delta * t);
        assert!((d.value(t) - expected).norm() < 1e-14);
        let t = 0.37;
        let expected = Complex64::from_polar(f(t - tau / 2.0), -delta * t)
            + Complex64::from_polar(f(t + tau / 2.0), delta * t);
        assert!((d.value(t) - expected).norm() < 1e-14);
        assert!((d.tau() - tau).abs() < 1e-15);
    }

    #[test]
    fn relative_phase_rides_on_red_pulse() {
        let delta = 2.0;
        let d = DriveSpec::ftpe(3.0, S, delta, 0.8)
            .unwrap()
            .with_phase(0.9)
            .unwrap();
        let t = 0.21;
        let expected = Complex64::from_polar(d.blue().envelope_value(t), -delta * t)
            + Complex64::from_polar(d.red().envelope_value(t), delta * t + 0.9);
        assert!((d.value(t) - expected).norm() < 1e-14);
        assert!((d.phase() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_drive_off_and_entries() {
        let sys = LadderSystem::new(2.82).unwrap();
        let off = DriveSpec::ftpe(0.0, S, 1.0, 0.0).unwrap();
        let h = hamiltonian_at(&sys, &off, 0.3);
        let mut expected = Mat3::zeros();
        expected[(X, X)] = c(1.41);
        assert!(crate::linalg::max_abs(&(h - expected)) < 1e-14);

        let delta = mev_to_angular(3.75);
        let d = DriveSpec::ftpe(7.7 * PI, S, delta, 0.0).unwrap();
        let h = hamiltonian_at(&sys, &d, 0.0);
        let f0 = 7.7 * PI / ((2.0 * PI).sqrt() * S);
        let omega = 2.0 * f0; // cos(0) = 1
        assert!((h[(X, BX)] - c(HBAR * omega / 2.0)).norm() < 1e-13);
        assert!((h[(BX, X)] - c(HBAR * omega / 2.0)).norm() < 1e-13);
        assert!((h[(X, G)] - c(HBAR * omega / 2.0)).norm() < 1e-13);
        assert!((h[(X, X)] - c(1.41)).norm() < 1e-14);
        assert_eq!(h[(BX, G)], c(0.0));
    }

    #[test]
    fn stirap_hamiltonian_examples() {
        let delta = mev_to_angular(2.34);
        let h = stirap_hamiltonian_at(0.0, 0.0, delta);
        assert!((h[(X, X)].re - 2.34).abs() < 1e-14);
        assert!(h.iter().enumerate().all(|(k, z)| k == 4 || z.norm() == 0.0));
        let h = stirap_hamiltonian_at(1.3, -0.4, delta);
        assert!(hermiticity_error(&h) == 0.0);
        assert!((h[(BX, X)].re - HBAR * 0.65).abs() < 1e-15);
        assert!((h[(X, G)].re + HBAR * 0.2).abs() < 1e-15);
    }

    #[test]
    fn window_covers_both_pulses() {
        let d = DriveSpec::ftpe(1.0, S, 1.0, -1.5).unwrap();
        let (lo, hi) = d.window();
        assert!((lo + 8.0 * S + 0.75).abs() < 1e-12);
        assert!((hi - 8.0 * S - 0.75).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(
            theta in 0.0..40.0f64, delta in 0.0..12.0f64, tau in -5.0..5.0f64,
            phase in 0.0..6.3f64, e_b in -4.0..4.0f64, t in -30.0..30.0f64,
        ) {
            let sys = LadderSystem::new(e_b).unwrap();
            let d = DriveSpec::ftpe(theta, S, delta, tau).unwrap().with_phase(phase).unwrap();
            prop_assert!(hermiticity_error(&hamiltonian_at(&sys, &d, t)) <= 1e-13);
        }

        #[test]
        fn zero_delay_drive_is_real(theta in 0.0..40.0f64, delta in 0.0..12.0f64, t in -30.0..30.0f64) {
            let d = DriveSpec::ftpe(theta, S, delta, 0.0).unwrap();
            prop_assert!(d.value(t).im.abs() <= 1e-13);
        }
    }
}
