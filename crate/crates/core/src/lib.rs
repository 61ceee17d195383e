//! Link-level simulation and rate-optimization toolkit for adaptive coding
//! and modulation over land-mobile-satellite (LMS) channels.

pub mod channel;
pub mod error;
pub mod mathx;

pub use error::{Error, Result};
