//! Deterministic federated-learning simulator for street-light fault
//! monitoring.
//!
//! The crate builds a synthetic fleet of camera-equipped lampposts, runs the
//! image preprocessing pipeline, and trains a small binary ON/OFF classifier
//! under five regimes: fully personalised, centralised, federated averaging,
//! clustered federated learning, and partial-layer federated learning.
//! Every run is a pure function of its seeds: reports, checkpoints and round
//! histories are byte-identical across repeats and thread counts.

pub mod experiments;
pub mod fl;
pub mod imaging;
pub mod model;
pub mod rng;
pub mod synth;
