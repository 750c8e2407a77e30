//! Distance functionals, concentration bounds and their verification on
//! finite product probability spaces.

pub mod apps;
pub mod bounds;
pub mod distances;
pub mod error;
pub mod formats;
pub mod numeric;
pub mod rng;
pub mod selftest;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
