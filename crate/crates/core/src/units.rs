//! Unit system: energies in meV, times in ps, angular frequencies in rad/ps.

/// Reduced Planck constant in meV·ps.
pub const HBAR: f64 = 0.658_211_956_9;

/// Energy (meV) to angular frequency (rad/ps).
#[inline]
pub fn mev_to_angular(energy_mev: f64) -> f64 {
    energy_mev / HBAR
}

/// Angular frequency (rad/ps) to energy (meV).
#[inline]
pub fn angular_to_mev(omega: f64) -> f64 {
    omega * HBAR
}

/// Gaussian standard deviation from the pulse-duration parameter τ₀ using
/// `s = 4·√(2 ln 2)·τ₀`. Offered only as a converter; pulses are always
/// parametrized by `s`.
pub fn s_from_tau0(tau0: f64) -> f64 {
    4.0 * (2.0 * std::f64::consts::LN_2).sqrt() * tau0
}

/// Conventional intensity-envelope FWHM of a Gaussian field with standard deviation `s`.
pub fn fwhm_from_s(s: f64) -> f64 {
    2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * s
}
