//! Multi-robot craft arena: a synchronous training simulator, an asynchronous
//! deployment simulator, a from-scratch PPO self-play trainer with guided
//! action masking, and out-of-distribution start-state initialization.

pub mod arena;
pub mod deploy;
pub mod eval;
pub mod harness;
pub mod nn;
pub mod oodsi;
pub mod train;
mod error;

pub use error::{Error, Result};
