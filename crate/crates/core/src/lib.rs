//! Hyperkähler linear algebra on quaternionic vector spaces and flat tori.

pub mod cli;
pub mod error;
pub mod exterior_algebra;
pub mod lefschetz_so5;
pub mod linalg;
pub mod quaternion_space;
pub mod scalar;
pub mod su2_action;
pub mod torus_lab;
pub mod wirtinger;

pub use error::{Error, Result};
