//! Critical finiteness of polynomial endomorphisms of P^1 and P^2.
//!
//! Exact algebra decides the classification. Floating point is used for
//! periodic points that are not rational and for sampling orbits.

pub mod algebra;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fatou;
pub mod geometry;
pub mod numeric;
pub mod postcritical;
pub mod ramification;

pub use error::{Error, Result};
