//! Time-ordered propagation of the driven ladder.
//!
//! Each step of length `h` applies the fourth-order commutator-free
//! exponential product
//!
//! ```text
//! U(t+h, t) ≈ exp(-i h (α₂A₁ + α₁A₂)) · exp(-i h (α₁A₁ + α₂A₂))
//! ```
//!
//! with `A_k` the generator at the Gauss nodes `t + c_k h`. Both factors keep
//! the ladder sparsity, so each is an exact unitary from the closed-form
//! eigendecomposition in [`LadderRates::propagator`].
//!
//! Open-system runs add the radiative cascade `BX → X → 0` by Strang
//! splitting around the same unitary step; the dissipator is applied in
//! closed form and preserves the trace exactly.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::export::Num;
use crate::linalg::{c, LadderRates, Mat3, Vec3c, BX, G, X};
use crate::model::{stirap_rates, DriveSpec, LadderSystem, StirapDrive};

/// Time-dependent ladder generator.
pub trait LadderDrive: Sync {
    /// Generator `H(t)/ħ` in rad/ps.
    fn rates_at(&self, t: f64) -> LadderRates;
    /// Fastest carrier angular frequency that the step must resolve; zero if none.
    fn carrier(&self) -> f64;
    /// Shortest envelope time scale in ps.
    fn envelope_scale(&self) -> f64;
}

/// A ladder system under a dichromatic drive.
#[derive(Debug, Clone, Copy)]
pub struct DrivenLadder<'a> {
    pub sys: &'a LadderSystem,
    pub drive: &'a DriveSpec,
}

impl LadderDrive for DrivenLadder<'_> {
    #[inline]
    fn rates_at(&self, t: f64) -> LadderRates {
        self.sys.rates(self.drive.value(t))
    }
    fn carrier(&self) -> f64 {
        self.drive.delta()
    }
    fn envelope_scale(&self) -> f64 {
        self.drive.red().s().min(self.drive.blue().s())
    }
}

impl LadderDrive for StirapDrive {
    #[inline]
    fn rates_at(&self, t: f64) -> LadderRates {
        stirap_rates(
            self.pump.envelope_value(t),
            self.stokes.envelope_value(t),
            self.delta_mid,
        )
    }
    fn carrier(&self) -> f64 {
        0.0
    }
    fn envelope_scale(&self) -> f64 {
        self.pump.s().min(self.stokes.s())
    }
}

/// Default step: `min(s/200, (2π/δ)/80)`.
pub fn default_dt_for(drive: &impl LadderDrive) -> f64 {
    let by_envelope = drive.envelope_scale() / 200.0;
    match drive.carrier() {
        w if w > 0.0 => by_envelope.min(2.0 * PI / w / 80.0),
        _ => by_envelope,
    }
}

pub fn default_dt(d: &DriveSpec) -> f64 {
    default_dt_for(&DrivenLadder {
        sys: &LadderSystem::new(0.0).unwrap(),
        drive: d,
    })
}

/// Largest admissible step: a fortieth of the carrier period.
pub fn max_dt_for(drive: &impl LadderDrive) -> f64 {
    match drive.carrier() {
        w if w > 0.0 => 2.0 * PI / w / 40.0,
        _ => f64::INFINITY,
    }
}

fn check_dt(drive: &impl LadderDrive, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let limit = max_dt_for(drive);
    if dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    Ok(())
}

fn resolve_dt(drive: &impl LadderDrive, dt_max: Option<f64>) -> Result<f64> {
    let dt = dt_max.unwrap_or_else(|| default_dt_for(drive));
    check_dt(drive, dt)?;
    Ok(dt)
}

fn steps_for(span: f64, dt: f64) -> usize {
    ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

const SQRT3: f64 = 1.732_050_807_568_877_2;
const NODE_1: f64 = 0.5 - SQRT3 / 6.0;
const NODE_2: f64 = 0.5 + SQRT3 / 6.0;
const WEIGHT_1: f64 = 0.25 + SQRT3 / 6.0;
const WEIGHT_2: f64 = 0.25 - SQRT3 / 6.0;

/// One fourth-order commutator-free step `U(t + h, t)`.
#[inline]
pub fn step_propagator(drive: &impl LadderDrive, t: f64, h: f64) -> Mat3 {
    let a1 = drive.rates_at(t + NODE_1 * h);
    let a2 = drive.rates_at(t + NODE_2 * h);
    let first = a1.combine(WEIGHT_1, &a2, WEIGHT_2).propagator(h);
    let second = a1.combine(WEIGHT_2, &a2, WEIGHT_1).propagator(h);
    second * first
}

/// One step applied to a state vector.
#[inline]
pub fn step_state(drive: &impl LadderDrive, t: f64, h: f64, psi: &Vec3c) -> Vec3c {
    let a1 = drive.rates_at(t + NODE_1 * h);
    let a2 = drive.rates_at(t + NODE_2 * h);
    let half = a1.combine(WEIGHT_1, &a2, WEIGHT_2).apply(h, psi);
    a1.combine(WEIGHT_2, &a2, WEIGHT_1).apply(h, &half)
}

/// `U(t1, t0)` for any ladder drive.
pub fn evolve_unitary(drive: &impl LadderDrive, t0: f64, t1: f64, dt_max: f64) -> Result<Mat3> {
    if !(t1 > t0) {
        return Err(invalid(format!(
            "propagation interval must satisfy t1 > t0, got [{t0}, {t1}]"
        )));
    }
    check_dt(drive, dt_max)?;
    let n = steps_for(t1 - t0, dt_max);
    let h = (t1 - t0) / n as f64;
    let mut u = Mat3::identity();
    for k in 0..n {
        u = step_propagator(drive, t0 + k as f64 * h, h) * u;
    }
    Ok(u)
}

/// Time-ordered propagator `U(t1, t0)` of the driven ladder.
pub fn propagate_unitary(
    sys: &LadderSystem,
    d: &DriveSpec,
    t0: f64,
    t1: f64,
    dt_max: f64,
) -> Result<Mat3> {
    evolve_unitary(&DrivenLadder { sys, drive: d }, t0, t1, dt_max)
}

/// Normalized amplitudes in the basis `{BX, X_V, 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState(Vec3c);

impl PureState {
    pub fn new(amplitudes: [Complex64; 3]) -> Result<Self> {
        let v = Vec3c::from(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("state must be normalized, |psi| = {norm}")));
        }
        Ok(PureState(v))
    }

    fn basis(k: usize) -> Self {
        let mut v = Vec3c::zeros();
        v[k] = c(1.0);
        PureState(v)
    }

    pub fn ground() -> Self {
        Self::basis(G)
    }
    pub fn exciton() -> Self {
        Self::basis(X)
    }
    pub fn biexciton() -> Self {
        Self::basis(BX)
    }

    pub fn amplitudes(&self) -> [Complex64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn vector(&self) -> &Vec3c {
        &self.0
    }

    /// `(P_BX, P_X, P_0)`.
    pub fn occupations(&self) -> [f64; 3] {
        [
            self.0[0].norm_sqr(),
            self.0[1].norm_sqr(),
            self.0[2].norm_sqr(),
        ]
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Density matrix in the basis `{BX, X_V, 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat3);

impl DensityMatrix {
    pub fn new(rho: Mat3) -> Result<Self> {
        let dm = DensityMatrix(rho);
        if (dm.trace() - 1.0).abs() > 1e-8 {
            return Err(invalid(format!("density matrix trace is {}", dm.trace())));
        }
        if crate::linalg::hermiticity_error(&rho) > 1e-10 {
            return Err(invalid("density matrix is not Hermitian"));
        }
        if dm.min_eigenvalue() < -1e-8 {
            return Err(invalid("density matrix is not positive semidefinite"));
        }
        Ok(dm)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix(psi.0 * psi.0.adjoint())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn occupations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::eigh(&self.0).0[0]
    }
}

/// Sampled occupations, optionally with raw amplitudes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    /// `(P_BX, P_X, P_0)` per sample.
    pub occupations: Vec<[f64; 3]>,
    pub amplitudes: Option<Vec<[Complex64; 3]>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_occupations(&self) -> [f64; 3] {
        self.occupations.last().copied().unwrap_or([f64::NAN; 3])
    }

    /// Largest deviation of `P_BX + P_X + P_0` from one.
    pub fn max_population_drift(&self) -> f64 {
        self.occupations
            .iter()
            .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `t_ps,p_bx,p_x,p_0[,re_bx,im_bx,re_x,im_x,re_0,im_0]`, LF line endings.
    pub fn write_csv<W: Write>(&self, mut w: W, with_amplitudes: bool) -> io::Result<()> {
        let amps = self.amplitudes.as_ref().filter(|_| with_amplitudes);
        write!(w, "t_ps,p_bx,p_x,p_0")?;
        if amps.is_some() {
            write!(w, ",re_bx,im_bx,re_x,im_x,re_0,im_0")?;
        }
        writeln!(w)?;
        for (k, (t, p)) in self.times.iter().zip(&self.occupations).enumerate() {
            write!(w, "{},{},{},{}", Num(*t), Num(p[0]), Num(p[1]), Num(p[2]))?;
            if let Some(a) = amps {
                let a = &a[k];
                for z in a {
                    write!(w, ",{},{}", Num(z.re), Num(z.im))?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Uniform grid of `n ≥ 2` points covering `[t0, t1]`.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let h = (t1 - t0) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { t1 } else { t0 + k as f64 * h })
        .collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("time grid is empty"));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("time grid must be finite and strictly increasing"));
    }
    Ok(())
}

/// Schrödinger evolution of `psi0` sampled on `grid`; `psi0` is taken to be
/// the state at `grid[0]`.
pub fn evolve_state(
    drive: &impl LadderDrive,
    psi0: &PureState,
    grid: &[f64],
    dt_max: Option<f64>,
) -> Result<TimeSeries> {
    check_grid(grid)?;
    let dt = resolve_dt(drive, dt_max)?;
    let mut psi = psi0.0;
    let mut out = TimeSeries {
        times: grid.to_vec(),
        occupations: Vec::with_capacity(grid.len()),
        amplitudes: Some(Vec::with_capacity(grid.len())),
    };
    let record = |psi: &Vec3c, out: &mut TimeSeries| {
        out.occupations
            .push([psi[0].norm_sqr(), psi[1].norm_sqr(), psi[2].norm_sqr()]);
        if let Some(a) = out.amplitudes.as_mut() {
            a.push([psi[0], psi[1], psi[2]]);
        }
    };
    record(&psi, &mut out);
    for w in grid.windows(2) {
        let n = steps_for(w[1] - w[0], dt);
        let h = (w[1] - w[0]) / n as f64;
        for k in 0..n {
            psi = step_state(drive, w[0] + k as f64 * h, h, &psi);
        }
        record(&psi, &mut out);
    }
    debug_assert!(
        (psi.norm() - psi0.norm()).abs() < 1e-9,
        "norm drift {}",
        psi.norm() - 1.0
    );
    Ok(out)
}

/// Occupations of the driven ladder on `grid`, starting from `psi0` at `grid[0]`.
pub fn propagate_state(
    sys: &LadderSystem,
    d: &DriveSpec,
    psi0: &PureState,
    grid: &[f64],
    dt_max: Option<f64>,
) -> Result<TimeSeries> {
    evolve_state(&DrivenLadder { sys, drive: d }, psi0, grid, dt_max)
}

/// State after the full default window, starting from `psi0` at its start.
pub fn evolve_final_state(
    drive: &impl LadderDrive,
    psi0: &PureState,
    window: (f64, f64),
    dt_max: Option<f64>,
) -> Result<PureState> {
    let dt = resolve_dt(drive, dt_max)?;
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(invalid("empty propagation window"));
    }
    let n = steps_for(t1 - t0, dt);
    let h = (t1 - t0) / n as f64;
    let mut psi = psi0.0;
    for k in 0..n {
        psi = step_state(drive, t0 + k as f64 * h, h, &psi);
    }
    Ok(PureState(psi))
}

/// Final `(P_BX, P_X, P_0)` after the drive's default window, starting in the
/// ground state. Uses the Lindblad cascade when the system has decay rates.
pub fn final_occupations(
    sys: &LadderSystem,
    d: &DriveSpec,
    dt_max: Option<f64>,
) -> Result<[f64; 3]> {
    let drive = DrivenLadder { sys, drive: d };
    let window = d.window();
    if sys.is_closed() {
        Ok(evolve_final_state(&drive, &PureState::ground(), window, dt_max)?.occupations())
    } else {
        let rho0 = DensityMatrix::from_pure(&PureState::ground());
        let ts = evolve_lindblad(&drive, sys, &rho0, &[window.0, window.1], dt_max)?;
        Ok(ts.final_occupations())
    }
}

/// Closed-form evolution under the radiative cascade alone:
/// collapse operators `√γ_bx |X⟩⟨BX|` and `√γ_x |0⟩⟨X|`.
#[derive(Debug, Clone, Copy)]
pub struct CascadeDissipator {
    pub gamma_bx: f64,
    pub gamma_x: f64,
}

impl CascadeDissipator {
    pub fn apply(&self, rho: &Mat3, h: f64) -> Mat3 {
        let (gb, gx) = (self.gamma_bx, self.gamma_x);
        let eb = (-gb * h).exp();
        let ex = (-gx * h).exp();
        let p_bx = rho[(BX, BX)].re;
        let p_x = rho[(X, X)].re;
        let p_0 = rho[(G, G)].re;
        // population fed from BX into X over h
        let feed = if (gx - gb).abs() > 1e-12 * (gx + gb).max(1e-300) {
            gb / (gx - gb) * (eb - ex)
        } else {
            gb * h * eb
        };
        let new_bx = p_bx * eb;
        let new_x = p_x * ex + p_bx * feed;
        let new_0 = p_0 + (p_bx + p_x) - (new_bx + new_x);

        let mut out = *rho;
        out[(BX, BX)] = c(new_bx);
        out[(X, X)] = c(new_x);
        out[(G, G)] = c(new_0);
        let d_bx_x = (-(gb + gx) * h / 2.0).exp();
        let d_bx_0 = (-gb * h / 2.0).exp();
        let d_x_0 = (-gx * h / 2.0).exp();
        for (i, j, f) in [(BX, X, d_bx_x), (BX, G, d_bx_0), (X, G, d_x_0)] {
            out[(i, j)] = rho[(i, j)] * f;
            out[(j, i)] = rho[(j, i)] * f;
        }
        out
    }
}

/// Lindblad evolution with the radiative cascade of `sys`, sampled on `grid`.
pub fn evolve_lindblad(
    drive: &impl LadderDrive,
    sys: &LadderSystem,
    rho0: &DensityMatrix,
    grid: &[f64],
    dt_max: Option<f64>,
) -> Result<TimeSeries> {
    check_grid(grid)?;
    let dt = resolve_dt(drive, dt_max)?;
    let diss = CascadeDissipator {
        gamma_bx: sys.gamma_bx(),
        gamma_x: sys.gamma_x(),
    };
    let closed = sys.is_closed();
    let mut rho = rho0.0;
    let mut out = TimeSeries {
        times: grid.to_vec(),
        occupations: Vec::with_capacity(grid.len()),
        amplitudes: None,
    };
    let occ = |r: &Mat3| [r[(0, 0)].re, r[(1, 1)].re, r[(2, 2)].re];
    out.occupations.push(occ(&rho));
    for w in grid.windows(2) {
        let n = steps_for(w[1] - w[0], dt);
        let h = (w[1] - w[0]) / n as f64;
        for k in 0..n {
            let u = step_propagator(drive, w[0] + k as f64 * h, h);
            if closed {
                rho = u * rho * u.adjoint();
            } else {
                rho = diss.apply(&rho, 0.5 * h);
                rho = u * rho * u.adjoint();
                rho = diss.apply(&rho, 0.5 * h);
            }
        }
        out.occupations.push(occ(&rho));
    }
    debug_assert!((rho.trace().re - rho0.trace()).abs() < 1e-8);
    Ok(out)
}

pub fn propagate_lindblad(
    sys: &LadderSystem,
    d: &DriveSpec,
    rho0: &DensityMatrix,
    grid: &[f64],
    dt_max: Option<f64>,
) -> Result<TimeSeries> {
    evolve_lindblad(&DrivenLadder { sys, drive: d }, sys, rho0, grid, dt_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, unitarity_error};
    use crate::units::{mev_to_angular, HBAR};

    const S: f64 = 3.61;

    fn sys() -> LadderSystem {
        LadderSystem::new(2.82).unwrap()
    }

    fn ftpe(theta_pi: f64, tau: f64) -> DriveSpec {
        DriveSpec::ftpe(theta_pi * PI, S, mev_to_angular(3.75), tau).unwrap()
    }

    #[test]
    fn drive_off_gives_middle_level_phase() {
        let d = DriveSpec::ftpe(0.0, S, mev_to_angular(3.75), 0.0).unwrap();
        let (t0, t1) = (-3.0, 5.0);
        let u = propagate_unitary(&sys(), &d, t0, t1, default_dt(&d)).unwrap();
        let mut expected = Mat3::identity();
        expected[(X, X)] = Complex64::from_polar(1.0, -1.41 / HBAR * (t1 - t0));
        assert!(max_abs(&(u - expected)) < 1e-12);
    }

    #[test]
    fn unitary_and_state_paths_agree() {
        let d = ftpe(7.7, 0.0);
        let (t0, t1) = d.window();
        let dt = default_dt(&d);
        let u = propagate_unitary(&sys(), &d, t0, t1, dt).unwrap();
        assert!(unitarity_error(&u) < 1e-9);
        let ts = propagate_state(&sys(), &d, &PureState::ground(), &[t0, t1], Some(dt)).unwrap();
        let p_bx = ts.final_occupations()[BX];
        assert!((u[(BX, G)].norm_sqr() - p_bx).abs() < 1e-8);
    }

    #[test]
    fn rejects_aliasing_step() {
        let d = ftpe(1.0, 0.0);
        let period = d.period().unwrap();
        let err = propagate_unitary(&sys(), &d, 0.0, 1.0, period / 30.0).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
        assert!(propagate_unitary(&sys(), &d, 0.0, 1.0, period / 40.0).is_ok());
        assert!(propagate_unitary(&sys(), &d, 1.0, 1.0, period / 40.0).is_err());
    }

    #[test]
    fn degenerate_detuning_uses_envelope_step() {
        let d = DriveSpec::tpe(PI, S).unwrap();
        assert_eq!(default_dt(&d), S / 200.0);
        assert!(propagate_unitary(&sys(), &d, -1.0, 1.0, 0.5).is_ok());
    }

    #[test]
    fn drive_off_ground_state_stays() {
        let d = DriveSpec::ftpe(0.0, S, 1.0, 0.0).unwrap();
        let (t0, t1) = d.window();
        let grid = uniform_grid(t0, t1, 50);
        let ts = propagate_state(&sys(), &d, &PureState::ground(), &grid, None).unwrap();
        assert!(ts.occupations.iter().all(|p| (p[G] - 1.0).abs() < 1e-14));
    }

    #[test]
    fn composition_on_step_grid() {
        let d = ftpe(8.3, -1.5);
        let dt = default_dt(&d);
        let t0 = -10.0;
        let t1 = t0 + 700.0 * dt;
        let t2 = t0 + 1500.0 * dt;
        let u20 = propagate_unitary(&sys(), &d, t0, t2, dt).unwrap();
        let u21 = propagate_unitary(&sys(), &d, t1, t2, dt).unwrap();
        let u10 = propagate_unitary(&sys(), &d, t0, t1, dt).unwrap();
        assert!(max_abs(&(u20 - u21 * u10)) < 1e-9);
    }

    #[test]
    fn step_halving_convergence() {
        let s = sys();
        for (theta, tau) in [(7.7, 0.0), (8.3, -1.5), (12.0, -1.5)] {
            let d = ftpe(theta, tau);
            let dt = default_dt(&d);
            let a = final_occupations(&s, &d, Some(dt)).unwrap();
            let b = final_occupations(&s, &d, Some(dt / 2.0)).unwrap();
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() <= 1e-7, "theta {theta}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn lindblad_closed_limit_matches_pure_state() {
        let d = ftpe(8.3, -1.5);
        let (t0, t1) = d.window();
        let grid = uniform_grid(t0, t1, 40);
        let rho0 = DensityMatrix::from_pure(&PureState::ground());
        let open = propagate_lindblad(&sys(), &d, &rho0, &grid, None).unwrap();
        let pure = propagate_state(&sys(), &d, &PureState::ground(), &grid, None).unwrap();
        for (a, b) in open.occupations.iter().zip(&pure.occupations) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn cascade_decay_is_exponential() {
        let s = sys().with_decay(0.05, 0.02).unwrap();
        let d = DriveSpec::ftpe(0.0, S, 1.0, 0.0).unwrap();
        let grid = uniform_grid(0.0, 400.0, 81);
        let rho0 = DensityMatrix::from_pure(&PureState::biexciton());
        let ts = propagate_lindblad(&s, &d, &rho0, &grid, None).unwrap();
        for (t, p) in ts.times.iter().zip(&ts.occupations) {
            assert!((p[BX] - (-0.05 * t).exp()).abs() < 1e-12);
            // analytic cascade for the intermediate level
            let px = 0.05 / (0.02 - 0.05) * ((-0.05 * t).exp() - (-0.02 * t).exp());
            assert!((p[X] - px).abs() < 1e-12);
        }
        assert!(ts.max_population_drift() < 1e-12);
        assert!(ts.final_occupations()[G] > 0.999);
    }

    #[test]
    fn open_system_run_stays_physical() {
        let s = sys().with_decay(1.0 / 250.0, 1.0 / 250.0).unwrap();
        let d = ftpe(8.3, -1.5);
        let (t0, t1) = d.window();
        let grid = uniform_grid(t0, t1, 30);
        let rho0 = DensityMatrix::from_pure(&PureState::ground());
        let open = propagate_lindblad(&s, &d, &rho0, &grid, None).unwrap();
        assert!(open.max_population_drift() < 1e-8);
        let closed = final_occupations(&sys(), &d, None).unwrap();
        let lossy = open.final_occupations();
        assert!(lossy[BX] < closed[BX]);
        assert!(closed[BX] - lossy[BX] < 0.2);

        // self-convergence against a fine-step reference
        let fine = propagate_lindblad(&s, &d, &rho0, &grid, Some(default_dt(&d) / 4.0)).unwrap();
        assert!((fine.final_occupations()[BX] - lossy[BX]).abs() < 1e-6);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(Mat3::identity()).is_err());
        let mut rho = Mat3::zeros();
        rho[(0, 0)] = c(1.5);
        rho[(2, 2)] = c(-0.5);
        assert!(DensityMatrix::new(rho).is_err());
        assert!(
            DensityMatrix::new(*DensityMatrix::from_pure(&PureState::ground()).matrix()).is_ok()
        );
        assert!(PureState::new([c(1.0), c(1.0), c(0.0)]).is_err());
    }

    #[test]
    fn csv_layout() {
        let d = DriveSpec::ftpe(0.0, S, 1.0, 0.0).unwrap();
        let ts = propagate_state(&sys(), &d, &PureState::ground(), &[0.0, 1.0], None).unwrap();
        let mut buf = Vec::new();
        ts.write_csv(&mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.split('\n').collect();
        assert_eq!(lines[0], "t_ps,p_bx,p_x,p_0");
        assert_eq!(lines[1], "0,0,0,1");
        let mut buf = Vec::new();
        ts.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t_ps,p_bx,p_x,p_0,re_bx,im_bx,re_x,im_x,re_0,im_0\n"));
        assert!(!text.contains('\r'));
    }
}
