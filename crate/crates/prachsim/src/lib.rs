//! Link-level simulator for LTE/5G-NR PRACH preamble transmission and
//! matched-filter detection.
//!
//! The crate models one PRACH subframe end to end: Zadoff-Chu signature
//! generation ([`zc`]), format-0 waveform synthesis ([`waveform`]), multipath
//! Rayleigh fading with additive noise ([`channel`]), the frequency-domain
//! matched-filter receiver with per-signature windowed peak detection
//! ([`receiver`]), intra-/inter-cell interference scenarios
//! ([`interference`]) and a reproducible Monte-Carlo harness that sweeps SNR
//! grids and reports correct-detection rates ([`harness`]).
//!
//! Start with the runnable examples (`cargo run --release --example
//! loopback`, `... --example intra_cell_sweep`) or the `prachsim` binary.

pub mod assets;
pub mod channel;
pub mod config;
pub mod dsp;
pub mod error;
pub mod harness;
pub mod interference;
pub mod numerics;
pub mod receiver;
pub mod seeding;
pub mod waveform;
pub mod zc;

pub use dsp::Complex64;
pub use error::{Result, SimError};
