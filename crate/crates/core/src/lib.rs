//! Link-level simulation of OTFS without cyclic prefix in massive MIMO uplinks
//! over linear time-varying channels.
//!
//! The receiver applies time-reversal maximum-ratio combining (TR-MRC) in the
//! delay-time domain and can correct the residual Doppler attenuation left at
//! the combiner output with a Bessel-shaped window. Modules, bottom up:
//!
//! - [`grid`]: delay-Doppler grids and the CP-free OTFS modem
//! - [`qam`]: Gray-labeled square QAM
//! - [`channel`]: power delay profiles, Jakes Doppler draws, time-varying convolution
//! - [`bessel`]: `J0`
//! - [`receiver`]: matched filtering, combining, correction window, demodulation
//! - [`link`]: one frame end to end
//! - [`metrics`]: SINR, BER and convergence diagnostics
//! - [`experiments`]: seeded sweeps, presets and CSV output

pub mod bessel;
pub mod channel;
pub mod checks;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod link;
pub mod metrics;
pub mod qam;
pub mod receiver;

pub use error::{Result, SimError};
pub use num_complex::Complex64;
