//! Core models for studying how a terrestrial cellular network and a
//! satellite ground receiver can share the same band.
//!
//! The crate is organized around a [`scenario::Scenario`] (base stations,
//! buildings, the protected receiver, band parameters) that the other
//! modules evaluate:
//!
//! - [`antenna`] — planar-array factor, steering codebooks, and the ground
//!   receiver's off-axis gain pattern.
//! - [`propagation`] — LOS/NLOS classification against building footprints,
//!   urban-macro path loss with frozen shadow fading, and rain attenuation.
//! - [`context`] — weather snapshots and the weather-dependent aggregate
//!   interference threshold.
//! - [`link`] — per-sector interference at the receiver, aggregate I/N,
//!   UE SNR, and downlink capacity.
//! - [`control`] — the greedy beam/power controller, an exact brute-force
//!   oracle for tiny instances, and two baseline activation policies.
//!
//! Everything here is `no_std` + `alloc` and deterministic: identical inputs
//! (including seeds) produce bit-identical outputs, which the companion CLI
//! crate relies on for reproducible experiment reports.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod antenna;
pub mod context;
pub mod control;
pub mod link;
pub mod num;
pub mod propagation;
pub mod scenario;

mod geom;
