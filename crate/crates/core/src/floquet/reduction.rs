//! Schrieffer-Wolff elimination of the exciton from a stroboscopic
//! Hamiltonian, leaving the `{BX, 0}` two-level model.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Mat3, BX, G, X};
use crate::model::LadderSystem;
use crate::units::HBAR;

/// Smallest admissible energy denominator in meV.
pub const MIN_GAP: f64 = 1e-9;

/// Coupling-to-gap ratio above which the elimination is flagged as
/// non-perturbative.
pub const PERTURBATIVE_RATIO: f64 = 0.5;

/// Energy denominators used in the elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapConvention {
    /// Bare splitting from the static part, `0 - E_b/2`.
    Bare,
    /// Diagonal of the full stroboscopic Hamiltonian, `H̄_mm - H̄_XX`.
    #[default]
    Dressed,
}

/// Reduction with the bare denominators `H̄⁽⁰⁾_mm - H̄⁽⁰⁾_XX = -E_b/2`.
pub fn schrieffer_wolff_reduce(hbar_matrix: &Mat3, sys: &LadderSystem) -> Result<Mat2> {
    schrieffer_wolff_reduce_with(hbar_matrix, sys, GapConvention::Bare)
}

pub fn schrieffer_wolff_reduce_with(
    hbar_matrix: &Mat3,
    sys: &LadderSystem,
    gaps: GapConvention,
) -> Result<Mat2> {
    let (h, ratio) = reduce(hbar_matrix, sys, gaps)?;
    if ratio > PERTURBATIVE_RATIO {
        log::warn!("exciton coupling is {ratio:.2} of the gap; elimination is not perturbative");
    }
    Ok(h)
}

/// Reduced Hamiltonian and the largest `|H̄_mX| / |gap_m|`.
pub(crate) fn reduce(h: &Mat3, sys: &LadderSystem, gaps: GapConvention) -> Result<(Mat2, f64)> {
    let outer = [BX, G];
    let gap = |m: usize| match gaps {
        GapConvention::Bare => -0.5 * sys.e_b(),
        GapConvention::Dressed => h[(m, m)].re - h[(X, X)].re,
    };
    let gap_values = outer.map(gap);
    for &g in &gap_values {
        if !(g.abs() >= MIN_GAP) {
            return Err(Error::DegenerateDenominator { gap: g, time: None });
        }
    }
    let mut out = Mat2::zeros();
    for (a, &m) in outer.iter().enumerate() {
        for (b, &n) in outer.iter().enumerate() {
            let product = h[(m, X)] * h[(X, n)];
            out[(a, b)] = h[(m, n)] + 0.5 * (product / gap_values[a] + product / gap_values[b]);
        }
    }
    let ratio = outer
        .iter()
        .zip(&gap_values)
        .map(|(&m, g)| h[(m, X)].norm() / g.abs())
        .fold(0.0, f64::max);
    Ok(((out + out.adjoint()) * Complex64::new(0.5, 0.0), ratio))
}

/// `(B_x, B_y, B_z)` in rad/ps of a reduced Hamiltonian (meV):
/// `H = ħ/2·(B_x σ_x + B_y σ_y + B_z σ_z)` up to a multiple of the identity.
pub fn fields_of(h: &Mat2) -> [f64; 3] {
    let off = h[(0, 1)];
    [
        2.0 * off.re / HBAR,
        -2.0 * off.im / HBAR,
        (h[(0, 0)].re - h[(1, 1)].re) / HBAR,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs};

    fn sys() -> LadderSystem {
        LadderSystem::new(2.82).unwrap()
    }

    #[test]
    fn block_diagonal_input_passes_through() {
        let mut h = Mat3::zeros();
        h[(0, 0)] = c(0.3);
        h[(2, 2)] = c(-0.1);
        h[(0, 2)] = Complex64::new(0.2, 0.05);
        h[(2, 0)] = Complex64::new(0.2, -0.05);
        h[(1, 1)] = c(1.41);
        for gaps in [GapConvention::Bare, GapConvention::Dressed] {
            let r = schrieffer_wolff_reduce_with(&h, &sys(), gaps).unwrap();
            assert_eq!(r, Mat2::new(h[(0, 0)], h[(0, 2)], h[(2, 0)], h[(2, 2)]));
        }
    }

    #[test]
    fn second_order_correction() {
        let mut h = Mat3::zeros();
        h[(1, 1)] = c(1.41);
        let v = Complex64::new(0.1, 0.2);
        h[(0, 1)] = v;
        h[(1, 0)] = v.conj();
        h[(1, 2)] = v;
        h[(2, 1)] = v.conj();
        let r = schrieffer_wolff_reduce(&h, &sys()).unwrap();
        // H_{BX,0}: V·V / (-E_b/2)
        assert!((r[(0, 1)] - v * v / -1.41).norm() < 1e-15);
        assert!((r[(0, 0)] - c(v.norm_sqr() / -1.41)).norm() < 1e-15);
        assert!(max_abs(&(r - r.adjoint())) < 1e-15);
    }

    #[test]
    fn degenerate_gap_is_rejected() {
        let h = Mat3::zeros();
        let flat = LadderSystem::new(0.0).unwrap();
        assert!(matches!(
            schrieffer_wolff_reduce(&h, &flat),
            Err(Error::DegenerateDenominator { .. })
        ));
        assert!(matches!(
            schrieffer_wolff_reduce_with(&h, &sys(), GapConvention::Dressed),
            Err(Error::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn field_components() {
        let h = Mat2::new(
            c(0.5),
            Complex64::new(0.2, -0.3),
            Complex64::new(0.2, 0.3),
            c(-0.5),
        );
        let [bx, by, bz] = fields_of(&h);
        assert!((bx - 0.4 / HBAR).abs() < 1e-15);
        assert!((by - 0.6 / HBAR).abs() < 1e-15);
        assert!((bz - 1.0 / HBAR).abs() < 1e-15);
    }
}
