//! Coefficient bounds for bi-univalent classes subordinate to the shell-like
//! generator `(1 + τ² z²) / (1 - τ z - τ² z²)`, `τ = (1 - √5)/2`.

pub mod bounds;
pub mod caratheodory;
pub mod classes;
pub mod error;
pub mod search;
pub mod series;
pub mod shell;
pub mod verify;

pub use error::{Error, Result};
pub use series::{TruncatedSeries, C64};
