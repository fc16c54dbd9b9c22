//! Frequency-modulated two-photon excitation of a quantum-dot biexciton.
//!
//! The crate models the `{BX, X_V, 0}` ladder of a quantum dot driven by a
//! dichromatic pulse pair, propagates it exactly in the rotating frame, and
//! reduces the fast carrier modulation to an effective two-level description
//! on the `{BX, 0}` subspace.

// `!(x > y)` comparisons are written that way to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod export;
pub mod floquet;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod protocols;
pub mod quad;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use model::{DriveSpec, LadderSystem, PulseSpec, StirapDrive};
pub use propagator::{DensityMatrix, PureState, TimeSeries};
