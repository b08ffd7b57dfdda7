//! Simulation and control toolkit for links assisted by a reconfigurable
//! intelligent surface (RIS).
//!
//! The crate is organised bottom-up:
//!
//! - [`dps`]: the digital phase shifter terminated by an open end, its
//!   S-parameter cascade, the binary weighted-sum state model and its
//!   constrained least-squares fit, plus Touchstone ingestion.
//! - [`antenna`]: polarimetric radiation patterns and the rotation algebra
//!   that reads a rotated antenna's response in the global frame.
//! - [`channel`]: line-of-sight, antenna-mode and structural-mode channel
//!   coefficients and their superposition over an array.
//! - [`controller`]: blind greedy control (random-max sampling followed by
//!   greedy searching), tracking, polarization selection, beamforming
//!   baselines and the exhaustive oracle.
//! - [`scenario`]: configuration, scene assembly, experiment runners and
//!   CSV output.
//!
//! Angles are degrees at every public interface. Powers and gains reported
//! as "quality" are `10·log10(|C|² / P_t)` in dB.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod channel;
pub mod controller;
pub mod dps;
mod error;
pub mod math;
pub mod scenario;

pub use error::{Error, Result};
