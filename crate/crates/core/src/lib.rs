//! Deterministic closed-loop simulation toolkit for precision scanning
//! stages under super-twisting sliding mode control.

pub mod controller;
pub mod error;
pub mod frac;
mod hashing;
pub mod metrics;
pub mod plant;
pub mod presets;
pub mod sim;
pub mod surface;
pub mod trajectory;

pub use error::{Error, Result};
