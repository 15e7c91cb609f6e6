//! Bright-soliton tunneling through a square barrier.
//!
//! A sech matter-wave packet is propagated with a Strang split-step Fourier
//! integrator of the attractive cubic Schrödinger equation. The tunneling
//! time is the delay between the density maxima at the left and right
//! barrier edges. On top of single runs the crate provides velocity and
//! width sweeps, regime fits, a maximum-time search and SI conversion for
//! ⁷Li and ⁸⁷Rb.

pub mod chronometry;
pub mod error;
pub mod experiments;
pub mod physics;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
