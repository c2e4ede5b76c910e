//! Spectral laboratory for the fifth-order Benjamin–Bona–Mahony equation
//!
//! ```text
//! η_t + η_x − γ1η_xxt + γ2η_xxx + δ1η_xxxxt + δ2η_xxxxx
//!     + ¾(η²)_x + γ(η²)_xxx − 7/48((η_x)²)_x − ⅛(η³)_x = 0
//! ```
//!
//! on a periodic interval: coefficients from the Boussinesq parameter
//! family, Fourier multipliers and their bounds, multiplier-exact time
//! integration, energy diagnostics, high/low frequency splitting and a
//! numerical check of the long-wave derivation.

// `!(x > 0.0)` guards reject NaN on purpose; index loops walk parallel series.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod coefficients;
pub mod derivation;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod io;
pub mod multipliers;
pub mod spectral;
pub mod splitting;

pub use coefficients::{Bbm5Coefficients, ModelParameters};
pub use error::{Error, Result};
pub use evolution::{RhsSpec, StepperConfig};
pub use spectral::{Field, Grid};
