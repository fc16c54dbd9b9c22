//! Small dense complex matrices used throughout the crate.
//!
//! Three-level matrices are always ordered `{BX, X_V, 0}` (biexciton,
//! V-polarized exciton, ground); two-level matrices are ordered `{BX, 0}`.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat3 = Matrix3<Complex64>;
pub type Mat2 = Matrix2<Complex64>;
pub type Vec3c = Vector3<Complex64>;
pub type Vec2c = Vector2<Complex64>;

/// Basis index of the biexciton.
pub const BX: usize = 0;
/// Basis index of the V-polarized exciton.
pub const X: usize = 1;
/// Basis index of the ground state.
pub const G: usize = 2;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Generator with the ladder sparsity pattern shared by the biexciton
/// cascade and the STIRAP reference system, in angular-frequency units:
///
/// ```text
/// [ 0        conj(u)  0       ]
/// [ u        m        l       ]
/// [ 0        conj(l)  0       ]
/// ```
///
/// The middle level couples to both outer levels, which sit at zero energy.
/// Any real linear combination of such generators keeps the pattern, so the
/// step exponentials of the commutator-free integrator can use the closed
/// form in [`LadderRates::propagator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRates {
    /// `H[X][BX]/ħ`.
    pub upper: Complex64,
    /// `H[X][X]/ħ`.
    pub middle: f64,
    /// `H[X][0]/ħ`.
    pub lower: Complex64,
}

impl LadderRates {
    pub fn matrix(&self) -> Mat3 {
        let z = Complex64::default();
        Mat3::new(
            z,
            self.upper.conj(),
            z,
            self.upper,
            c(self.middle),
            self.lower,
            z,
            self.lower.conj(),
            z,
        )
    }

    /// `a·self + b·other`.
    #[inline]
    pub fn combine(&self, a: f64, other: &LadderRates, b: f64) -> LadderRates {
        LadderRates {
            upper: self.upper * a + other.upper * b,
            middle: self.middle * a + other.middle * b,
            lower: self.lower * a + other.lower * b,
        }
    }

    /// `exp(-i·H·dt)` in closed form.
    ///
    /// The dark combination of the outer levels is an exact zero mode; the
    /// bright combination and the middle level form a real symmetric 2×2
    /// block `[[0, g], [g, m]]` with `g = sqrt(|u|² + |l|²)`.
    pub fn propagator(&self, dt: f64) -> Mat3 {
        let g2 = self.upper.norm_sqr() + self.lower.norm_sqr();
        let g = g2.sqrt();
        let half_m = 0.5 * self.middle;
        let r = (half_m * half_m + g2).sqrt();
        let (sin_rt, cos_rt) = (r * dt).sin_cos();
        // sin(r·dt)/r, finite at r = 0
        let sinc = if r * dt > 1e-300 { sin_rt / r } else { dt };
        let phase = Complex64::from_polar(1.0, -half_m * dt);

        let u_bb = phase * Complex64::new(cos_rt, half_m * sinc);
        let u_bx = phase * Complex64::new(0.0, -g * sinc);
        let u_xx = phase * Complex64::new(cos_rt, -half_m * sinc);

        let mut out = Mat3::zeros();
        out[(BX, BX)] = c(1.0);
        out[(G, G)] = c(1.0);
        out[(X, X)] = u_xx;
        if g > 0.0 {
            // bright state (conj(u), 0, conj(l))/g
            let b = [self.upper.conj() / g, self.lower.conj() / g];
            let outer = [BX, G];
            let shift = u_bb - c(1.0);
            for (bi, &i) in b.iter().zip(outer.iter()) {
                for (bj, &j) in b.iter().zip(outer.iter()) {
                    out[(i, j)] += shift * bi * bj.conj();
                }
                out[(i, X)] = u_bx * bi;
                out[(X, i)] = u_bx * bi.conj();
            }
        }
        out
    }
}

impl LadderRates {
    /// `exp(-i·H·dt)·psi` without forming the matrix.
    #[inline]
    pub fn apply(&self, dt: f64, psi: &Vec3c) -> Vec3c {
        let g2 = self.upper.norm_sqr() + self.lower.norm_sqr();
        let half_m = 0.5 * self.middle;
        let r = (half_m * half_m + g2).sqrt();
        let (sin_rt, cos_rt) = (r * dt).sin_cos();
        let sinc = if r * dt > 1e-300 { sin_rt / r } else { dt };
        let phase = Complex64::from_polar(1.0, -half_m * dt);
        let u_bb = phase * Complex64::new(cos_rt, half_m * sinc);
        let u_xx = phase * Complex64::new(cos_rt, -half_m * sinc);
        let x = psi[X];
        if g2 == 0.0 {
            return Vec3c::new(psi[BX], u_xx * x, psi[G]);
        }
        let g = g2.sqrt();
        let u_bx = phase * Complex64::new(0.0, -g * sinc);
        // amplitude of the bright state (conj(u), 0, conj(l))/g
        let beta = (self.upper * psi[BX] + self.lower * psi[G]) / g;
        let shift = (u_bb - c(1.0)) * beta + u_bx * x;
        Vec3c::new(
            psi[BX] + shift * self.upper.conj() / g,
            u_bx * beta + u_xx * x,
            psi[G] + shift * self.lower.conj() / g,
        )
    }
}

/// Eigendecomposition `H = V·diag(λ)·V†` of a Hermitian 3×3 matrix by cyclic
/// complex Jacobi rotations. Eigenvalues ascend; eigenvectors are the columns
/// of `V`. Only the upper triangle of `h` is read.
///
/// Jacobi keeps full accuracy on nearly degenerate spectra, where the
/// tridiagonal QR of `nalgebra::SymmetricEigen` can return eigenvectors with
/// residuals many orders above rounding.
pub fn eigh(h: &Mat3) -> ([f64; 3], Mat3) {
    let mut a = hermitian_part(h);
    let mut v = Mat3::identity();
    for _sweep in 0..32 {
        let off = (a[(0, 1)].norm_sqr() + a[(0, 2)].norm_sqr() + a[(1, 2)].norm_sqr()).sqrt();
        let diag = (0..3).map(|k| a[(k, k)].re.abs()).fold(0.0, f64::max);
        if off <= f64::EPSILON * 1e-3 * diag || off < f64::MIN_POSITIVE {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            let magnitude = apq.norm();
            if magnitude < f64::MIN_POSITIVE {
                continue;
            }
            let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * magnitude);
            let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
            let cos = 1.0 / t.hypot(1.0);
            let sin = t * cos;
            let phase = apq / magnitude;
            let mut r = Mat3::identity();
            r[(p, p)] = c(cos);
            r[(q, q)] = c(cos);
            r[(p, q)] = phase * sin;
            r[(q, p)] = -phase.conj() * sin;
            a = r.adjoint() * a * r;
            a[(p, q)] = c(0.0);
            a[(q, p)] = c(0.0);
            v *= r;
        }
    }
    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.map(|k| a[(k, k)].re);
    let vectors = Mat3::from_columns(&order.map(|k| v.column(k).into_owned()));
    (values, vectors)
}

/// `exp(-i·H·dt)` for a general Hermitian 3×3 `H` via its eigendecomposition.
pub fn expm_hermitian(h: &Mat3, dt: f64) -> Mat3 {
    let (values, v) = eigh(h);
    let mut d = Mat3::zeros();
    for k in 0..3 {
        d[(k, k)] = Complex64::from_polar(1.0, -values[k] * dt);
    }
    v * d * v.adjoint()
}

/// `exp(-i·H·dt)` for a Hermitian 2×2 `H`, via the Pauli decomposition.
pub fn expm_hermitian2(h: &Mat2, dt: f64) -> Mat2 {
    let mean = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let bz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let off = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    let bx = off.re;
    let by = -off.im;
    let norm = (bx * bx + by * by + bz * bz).sqrt();
    let (s, co) = (norm * dt).sin_cos();
    let sinc = if norm * dt > 1e-300 { s / norm } else { dt };
    let phase = Complex64::from_polar(1.0, -mean * dt);
    // cos - i·sinc·(b·σ)
    Mat2::new(
        Complex64::new(co, -sinc * bz),
        Complex64::new(-sinc * by, -sinc * bx),
        Complex64::new(sinc * by, -sinc * bx),
        Complex64::new(co, sinc * bz),
    ) * phase
}

pub fn hermitian_part(m: &Mat3) -> Mat3 {
    (m + m.adjoint()) * c(0.5)
}

pub fn max_abs<const R: usize, const C: usize>(m: &nalgebra::SMatrix<Complex64, R, C>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |(H - H†)_ij|`.
pub fn hermiticity_error(m: &Mat3) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `max |(U†U - 1)_ij|`.
pub fn unitarity_error(u: &Mat3) -> f64 {
    max_abs(&(u.adjoint() * u - Mat3::identity()))
}

pub fn commutator(a: &Mat3, b: &Mat3) -> Mat3 {
    a * b - b * a
}

/// Margin (rad) below π within which an eigenphase is treated as sitting on
/// the branch cut.
pub const BRANCH_MARGIN: f64 = 1e-6;

/// Spectral form of the principal logarithm of a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryLog {
    /// Orthonormal eigenvectors (columns).
    pub vectors: Mat3,
    /// Eigenphases in `(-π, π)`.
    pub phases: [f64; 3],
}

impl UnitaryLog {
    /// Hermitian `K` with `U = exp(-i·K)`.
    pub fn generator(&self) -> Mat3 {
        let mut d = Mat3::zeros();
        for k in 0..3 {
            d[(k, k)] = c(-self.phases[k]);
        }
        hermitian_part(&(self.vectors * d * self.vectors.adjoint()))
    }
}

/// Principal logarithm of a 3×3 unitary.
///
/// The eigenbasis comes from a rotated Hermitian Cayley transform
/// `C = i(w - U)(w + U)⁻¹` with `|w| = 1`, which shares eigenvectors with `U`.
/// `w` is picked from a few candidates so that `-w` stays far from the
/// spectrum and the inverse is well conditioned. The phases are read back
/// from the Rayleigh quotients `v†Uv`.
pub fn principal_log_unitary(u: &Mat3) -> Result<UnitaryLog> {
    let id = Mat3::identity();
    let (w, inv) = (0..8)
        .map(|k| Complex64::from_polar(1.0, k as f64 * std::f64::consts::FRAC_PI_4))
        .map(|w| {
            let shifted = id * w + u;
            let gap = shifted.singular_values().min();
            (gap, w, shifted)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .and_then(|(_, w, shifted)| shifted.try_inverse().map(|inv| (w, inv)))
        .ok_or(Error::InvalidInput("matrix is not unitary".into()))?;
    let (_, vectors) = eigh(&((id * w - u) * inv * I));
    let mut phases = [0.0; 3];
    for (k, phase) in phases.iter_mut().enumerate() {
        let v = vectors.column(k);
        let q = (v.adjoint() * u * v)[(0, 0)];
        *phase = q.arg();
        if phase.abs() > std::f64::consts::PI - BRANCH_MARGIN {
            return Err(Error::BranchAmbiguity {
                phase: *phase,
                time: None,
            });
        }
    }
    Ok(UnitaryLog { vectors, phases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rates() -> impl Strategy<Value = LadderRates> {
        (
            -3.0..3.0f64,
            -3.0..3.0f64,
            -4.0..4.0f64,
            -3.0..3.0f64,
            -3.0..3.0f64,
        )
            .prop_map(|(a, b, m, d, e)| LadderRates {
                upper: Complex64::new(a, b),
                middle: m,
                lower: Complex64::new(d, e),
            })
    }

    proptest! {
        #[test]
        fn ladder_closed_form_matches_eigendecomposition(r in rates(), dt in 0.0..2.0f64) {
            let closed = r.propagator(dt);
            let generic = expm_hermitian(&r.matrix(), dt);
            prop_assert!(max_abs(&(closed - generic)) < 1e-12);
            prop_assert!(unitarity_error(&closed) < 1e-13);
        }

        #[test]
        fn ladder_apply_matches_matrix(r in rates(), dt in 0.0..2.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
            let psi = Vec3c::new(Complex64::new(a, b), Complex64::new(b, 0.3), Complex64::new(0.2, -a));
            let direct = r.apply(dt, &psi);
            let via_matrix = r.propagator(dt) * psi;
            prop_assert!((direct - via_matrix).norm() < 1e-13);
        }

        #[test]
        fn eigh_residuals(r in rates(), dt in 0.01..2.0f64, gap in -14.0..0.0f64, base in -1.0..1.0f64) {
            // a unitary basis from a ladder propagator and a spectrum with two
            // eigenvalues `10^gap` apart
            let v = r.propagator(dt);
            let mut d = Mat3::zeros();
            d[(0, 0)] = c(base);
            d[(1, 1)] = c(base + 10f64.powf(gap));
            d[(2, 2)] = c(-0.3);
            let h = hermitian_part(&(v * d * v.adjoint()));
            let (values, vectors) = eigh(&h);
            prop_assert!(values[0] <= values[1] && values[1] <= values[2]);
            prop_assert!(unitarity_error(&vectors) < 1e-14);
            for (col, value) in vectors.column_iter().zip(values) {
                prop_assert!((h * col - col * c(value)).norm() < 1e-14);
            }
        }

        #[test]
        fn log_round_trip(r in rates(), dt in 0.01..0.5f64) {
            let u = r.propagator(dt);
            let log = principal_log_unitary(&u).unwrap();
            let back = expm_hermitian(&log.generator(), 1.0);
            prop_assert!(max_abs(&(back - u)) < 1e-12, "err {}", max_abs(&(back - u)));
        }
    }

    #[test]
    fn ladder_drive_off_is_middle_phase() {
        let r = LadderRates {
            upper: c(0.0),
            middle: 2.0,
            lower: c(0.0),
        };
        let u = r.propagator(0.7);
        assert!((u[(X, X)] - Complex64::from_polar(1.0, -1.4)).norm() < 1e-15);
        assert!((u[(BX, BX)] - c(1.0)).norm() < 1e-15);
        assert!((u[(G, G)] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn two_level_exponential() {
        let h = Mat2::new(
            c(0.3),
            Complex64::new(0.2, -0.5),
            Complex64::new(0.2, 0.5),
            c(-1.1),
        );
        let mut h3 = Mat3::zeros();
        for i in 0..2 {
            for j in 0..2 {
                h3[(i, j)] = h[(i, j)];
            }
        }
        let u3 = expm_hermitian(&h3, 0.9);
        let u2 = expm_hermitian2(&h, 0.9);
        for i in 0..2 {
            for j in 0..2 {
                assert!((u3[(i, j)] - u2[(i, j)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn log_of_diagonal_unitary() {
        let phases = [0.3, -2.0, 3.0];
        let mut u = Mat3::zeros();
        for k in 0..3 {
            u[(k, k)] = Complex64::from_polar(1.0, phases[k]);
        }
        let k = principal_log_unitary(&u).unwrap().generator();
        for i in 0..3 {
            assert!((k[(i, i)].re + phases[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn log_handles_degenerate_eigenvalues() {
        let log = principal_log_unitary(&Mat3::identity()).unwrap();
        assert!(max_abs(&log.generator()) < 1e-15);
    }

    #[test]
    fn log_rejects_branch_cut() {
        let mut u = Mat3::identity();
        u[(1, 1)] = c(-1.0);
        assert!(matches!(
            principal_log_unitary(&u),
            Err(Error::BranchAmbiguity { .. })
        ));
        u[(1, 1)] = Complex64::from_polar(1.0, std::f64::consts::PI - 1e-8);
        assert!(matches!(
            principal_log_unitary(&u),
            Err(Error::BranchAmbiguity { .. })
        ));
        u[(1, 1)] = Complex64::from_polar(1.0, std::f64::consts::PI - 1e-4);
        assert!(principal_log_unitary(&u).is_ok());
    }
}
