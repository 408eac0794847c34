//! Spontaneous-emission rates of mesoscopic quantum dots beyond the dipole
//! approximation, near a planar metal interface and a metal nanowire.

pub mod error;
pub mod halfspace;
pub mod model;
pub mod moments;
pub mod nanowire;
pub mod quadrature;
pub mod quasistatic;
pub mod rates;
pub mod specfun;

pub use error::{Error, Result};
