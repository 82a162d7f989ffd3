//! Exponential self-similar solutions of `u_t = Δu^m + |x|^σ u^p` with
//! `σ = 2(1-p)/(m-1)`, found by shooting in a two-dimensional phase plane.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod integrator;
pub mod interp;
pub mod params;
pub mod phaseplane;
pub mod profile;
pub mod rk;
pub mod shooting;
pub mod solution;

pub use error::{Error, Result};
pub use params::{ModelParams, Regime, ShootingParam};
