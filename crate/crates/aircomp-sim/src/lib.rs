//! Monte-Carlo harness for the over-the-air computation pipeline: block
//! error rate sweeps over SNR and phase error, an exhaustive joint
//! maximum-likelihood baseline, and decoder state-space accounting.

pub mod complexity;
pub mod config;
pub mod experiment;
pub mod oracle;
pub mod selftest;
pub mod stats;
pub mod sweep;
