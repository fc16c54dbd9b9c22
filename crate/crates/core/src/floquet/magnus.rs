//! Magnus series for the stroboscopic Hamiltonian of a frozen drive.
//!
//! The frozen Hamiltonian contains only the harmonics `e^{inδt}`,
//! `n ∈ {-1, 0, 1}`, so each nested-commutator integral factorizes into
//! commutators of the Fourier components times a scalar simplex integral
//!
//! ```text
//! J(n₁..n_k) = ∫_{0<x_k<…<x₁<2π} exp(i Σ n_j x_j) dx
//! ```
//!
//! evaluated once by iterated Gauss-Legendre quadrature (64 nodes per level
//! for the double integral, 32 for the triple, 16 for the quadruple).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::FrozenDrive;
use crate::linalg::{c, commutator, hermitian_part, Mat3, I};
use crate::model::LadderSystem;
use crate::quad::GaussRule;
use crate::units::HBAR;

const HARMONICS: [i32; 3] = [-1, 0, 1];

/// Nodes per level for the simplex integral of dimension `k` (k = 2, 3, 4).
fn nodes_for(k: usize) -> usize {
    match k {
        2 => 64,
        3 => 32,
        _ => 16,
    }
}

/// `J` for all `3^k` harmonic tuples, first harmonic most significant.
fn simplex_integrals(k: usize) -> &'static [Complex64] {
    static CACHE: [OnceLock<Vec<Complex64>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[k - 2].get_or_init(|| {
        let rule = GaussRule::new(nodes_for(k));
        nested(&rule, k, 2.0 * PI)
    })
}

fn nested(rule: &GaussRule, depth: usize, upper: f64) -> Vec<Complex64> {
    if depth == 0 {
        return vec![c(1.0)];
    }
    let inner_len = 3usize.pow(depth as u32 - 1);
    let mut out = vec![Complex64::default(); 3 * inner_len];
    for (x, w) in rule.on(0.0, upper) {
        let inner = nested(rule, depth - 1, x);
        for (slot, &n) in HARMONICS.iter().enumerate() {
            let weight = Complex64::from_polar(w, n as f64 * x);
            for (o, v) in out[slot * inner_len..(slot + 1) * inner_len]
                .iter_mut()
                .zip(&inner)
            {
                *o += weight * v;
            }
        }
    }
    out
}

/// Fourier components `H_n` (meV) of the frozen Hamiltonian, `n = -1, 0, 1`.
fn harmonics(sys: &LadderSystem, fd: &FrozenDrive) -> [Mat3; 3] {
    let period = fd.period();
    let samples: Vec<Mat3> = (0..3)
        .map(|j| fd.hamiltonian_at(sys, j as f64 * period / 3.0))
        .collect();
    HARMONICS.map(|n| {
        let mut h = Mat3::zeros();
        for (j, s) in samples.iter().enumerate() {
            h += s * Complex64::from_polar(1.0 / 3.0, -2.0 * PI * (n * j as i32) as f64 / 3.0);
        }
        h
    })
}

fn tuples(k: usize) -> impl Iterator<Item = (usize, Vec<usize>)> {
    (0..3usize.pow(k as u32)).map(move |idx| {
        let digits = (0..k)
            .map(|j| (idx / 3usize.pow((k - 1 - j) as u32)) % 3)
            .collect();
        (idx, digits)
    })
}

/// Sum over harmonic tuples of `J · kernel(H_{n₁}, …, H_{n_k})`.
fn weighted_sum(h: &[Mat3; 3], k: usize, kernel: impl Fn(&[&Mat3]) -> Mat3) -> Mat3 {
    let j = simplex_integrals(k);
    let mut acc = Mat3::zeros();
    for (idx, digits) in tuples(k) {
        if j[idx].norm() == 0.0 {
            continue;
        }
        let ops: Vec<&Mat3> = digits.iter().map(|&d| &h[d]).collect();
        acc += kernel(&ops) * j[idx];
    }
    acc
}

/// `[H̄⁽⁰⁾, …, H̄⁽order⁾]` in meV for `order ≤ 3`.
pub fn magnus_terms(sys: &LadderSystem, fd: &FrozenDrive, order: usize) -> Vec<Mat3> {
    assert!(order <= 3, "Magnus terms are available through third order");
    let h = harmonics(sys, fd);
    let delta = fd.delta;
    // time simplex of volume T^k maps onto the 2π simplex with Jacobian δ^-k,
    // and the overall 1/T contributes δ/2π
    let scale = |k: i32| 1.0 / (2.0 * PI * delta.powi(k - 1));
    let mut terms = vec![hermitian_part(&h[1])];
    if order >= 1 {
        let sum = weighted_sum(&h, 2, |o| commutator(o[0], o[1]));
        terms.push(hermitian_part(&(sum * (-I / (2.0 * HBAR) * scale(2)))));
    }
    if order >= 2 {
        let sum = weighted_sum(&h, 3, |o| {
            commutator(o[0], &commutator(o[1], o[2])) + commutator(o[2], &commutator(o[1], o[0]))
        });
        terms.push(hermitian_part(&(sum * c(-scale(3) / (6.0 * HBAR * HBAR)))));
    }
    if order >= 3 {
        let sum = weighted_sum(&h, 4, |o| {
            commutator(&commutator(&commutator(o[0], o[1]), o[2]), o[3])
                + commutator(o[0], &commutator(&commutator(o[1], o[2]), o[3]))
                + commutator(o[0], &commutator(o[1], &commutator(o[2], o[3])))
                + commutator(o[1], &commutator(o[2], &commutator(o[3], o[0])))
        });
        terms.push(hermitian_part(
            &(sum * (I * scale(4) / (12.0 * HBAR.powi(3)))),
        ));
    }
    terms
}

/// `Σ_{n≤order} H̄⁽ⁿ⁾`.
pub fn magnus_sum(sys: &LadderSystem, fd: &FrozenDrive, order: usize) -> Mat3 {
    magnus_terms(sys, fd, order).into_iter().sum()
}

/// Closed-form `H̄⁽⁰⁾ + H̄⁽²⁾` for equal envelopes `f` (rad/ps) and zero
/// relative phase:
/// `diag(0, E_B/2, 0) + E_B f/(4ħδ²)·(ħf·M₁ − E_B·M₂)`.
pub fn magnus_tau0_analytic(sys: &LadderSystem, f: f64, delta: f64) -> Mat3 {
    let e_b = sys.e_b();
    let m1 = Mat3::new(
        c(1.0),
        c(0.0),
        c(1.0),
        c(0.0),
        c(-2.0),
        c(0.0),
        c(1.0),
        c(0.0),
        c(1.0),
    );
    let m2 = Mat3::new(
        c(0.0),
        c(1.0),
        c(0.0),
        c(1.0),
        c(0.0),
        c(1.0),
        c(0.0),
        c(1.0),
        c(0.0),
    );
    let mut h0 = Mat3::zeros();
    h0[(1, 1)] = c(0.5 * e_b);
    let pref = e_b * f / (4.0 * HBAR * delta * delta);
    h0 + (m1 * c(HBAR * f) - m2 * c(e_b)) * c(pref)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::units::mev_to_angular;

    fn sys() -> LadderSystem {
        LadderSystem::new(2.82).unwrap()
    }

    /// Iterated Gauss-Legendre quadrature of the time-domain nested commutators.
    fn direct(sys: &LadderSystem, fd: &FrozenDrive, k: usize) -> Mat3 {
        let t = fd.period();
        let rule = GaussRule::new(nodes_for(k));
        let hk = |x: f64| fd.hamiltonian_at(sys, x);
        let mut acc = Mat3::zeros();
        match k {
            2 => {
                for (t1, w1) in rule.on(0.0, t) {
                    for (t2, w2) in rule.on(0.0, t1) {
                        acc += commutator(&hk(t1), &hk(t2)) * c(w1 * w2);
                    }
                }
                acc * (-I / (2.0 * HBAR * t))
            }
            3 => {
                for (t1, w1) in rule.on(0.0, t) {
                    let h1 = hk(t1);
                    for (t2, w2) in rule.on(0.0, t1) {
                        let h2 = hk(t2);
                        for (t3, w3) in rule.on(0.0, t2) {
                            let h3 = hk(t3);
                            acc += (commutator(&h1, &commutator(&h2, &h3))
                                + commutator(&h3, &commutator(&h2, &h1)))
                                * c(w1 * w2 * w3);
                        }
                    }
                }
                acc * c(-1.0 / (6.0 * HBAR * HBAR * t))
            }
            _ => {
                for (t1, w1) in rule.on(0.0, t) {
                    let h1 = hk(t1);
                    for (t2, w2) in rule.on(0.0, t1) {
                        let h2 = hk(t2);
                        for (t3, w3) in rule.on(0.0, t2) {
                            let h3 = hk(t3);
                            for (t4, w4) in rule.on(0.0, t3) {
                                let h4 = hk(t4);
                                let v = commutator(&commutator(&commutator(&h1, &h2), &h3), &h4)
                                    + commutator(&h1, &commutator(&commutator(&h2, &h3), &h4))
                                    + commutator(&h1, &commutator(&h2, &commutator(&h3, &h4)))
                                    + commutator(&h2, &commutator(&h3, &commutator(&h4, &h1)));
                                acc += v * c(w1 * w2 * w3 * w4);
                            }
                        }
                    }
                }
                acc * (I / (12.0 * HBAR.powi(3) * t))
            }
        }
    }

    #[test]
    fn harmonic_route_matches_direct_quadrature() {
        let fd = FrozenDrive::new(1.3, 2.1, mev_to_angular(3.75), 0.7).unwrap();
        let terms = magnus_terms(&sys(), &fd, 3);
        for (k, term) in terms.iter().enumerate().skip(1) {
            let d = direct(&sys(), &fd, k + 1);
            let scale = max_abs(&d).max(1.0);
            assert!(max_abs(&(term - d)) < 1e-10 * scale, "order {k}");
        }
    }

    #[test]
    fn zeroth_order_is_static_part() {
        let fd = FrozenDrive::new(2.0, 0.5, mev_to_angular(3.75), 1.1).unwrap();
        let h0 = &magnus_terms(&sys(), &fd, 0)[0];
        let mut expected = Mat3::zeros();
        expected[(1, 1)] = c(1.41);
        assert!(max_abs(&(h0 - expected)) < 1e-12);
        // time average by plain quadrature
        let t = fd.period();
        let avg =
            GaussRule::new(64).integrate(0.0, t, |x| fd.hamiltonian_at(&sys(), x)[(1, 0)].re) / t;
        assert!(avg.abs() < 1e-12);
    }

    #[test]
    fn first_order_vanishes_for_equal_envelopes() {
        for f in [0.5, 2.0, 4.0] {
            let fd = FrozenDrive::new(f, f, mev_to_angular(3.75), 0.0).unwrap();
            let h1 = &magnus_terms(&sys(), &fd, 1)[1];
            assert!(max_abs(h1) < 1e-9, "f = {f}: {}", max_abs(h1));
        }
        let fd = FrozenDrive::new(1.0, 2.0, mev_to_angular(3.75), 0.0).unwrap();
        assert!(max_abs(&magnus_terms(&sys(), &fd, 1)[1]) > 1e-3);
    }

    #[test]
    fn second_order_matches_closed_form() {
        for (f, delta_mev) in [(1.0, 3.75), (2.78, 3.75), (0.3, 7.5)] {
            let delta = mev_to_angular(delta_mev);
            let fd = FrozenDrive::new(f, f, delta, 0.0).unwrap();
            let terms = magnus_terms(&sys(), &fd, 2);
            let analytic = magnus_tau0_analytic(&sys(), f, delta);
            assert!(max_abs(&(terms[0] + terms[2] - analytic)) < 1e-8);
        }
        let analytic = magnus_tau0_analytic(&sys(), 0.0, 5.0);
        let mut expected = Mat3::zeros();
        expected[(1, 1)] = c(1.41);
        assert!(max_abs(&(analytic - expected)) < 1e-15);
    }

    #[test]
    fn third_order_vanishes_for_equal_envelopes() {
        let fd = FrozenDrive::new(2.0, 2.0, mev_to_angular(3.75), 0.0).unwrap();
        assert!(max_abs(&magnus_terms(&sys(), &fd, 3)[3]) < 1e-9);
    }

    #[test]
    fn effective_rabi_frequency() {
        let (f, delta) = (1.7, mev_to_angular(3.75));
        let h = magnus_tau0_analytic(&sys(), f, delta);
        let rabi = 2.0 * h[(0, 2)].re / HBAR;
        let expected = 2.82 * f * f / (2.0 * HBAR * delta * delta);
        assert!((rabi - expected).abs() < 1e-14);
    }
}
