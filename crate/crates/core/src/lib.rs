//! Vectorial, non-paraxial model of spontaneous parametric down-conversion
//! in a second-order nonlinear slab between two linear half-spaces.
//!
//! The pipeline runs from layered-media optics ([`optics`], [`greens`]) and
//! the focused pump ([`pump`]) to the two-photon amplitude ([`spdc`]), scans
//! and closed forms ([`analysis`]) and polarization tomography
//! ([`tomography`]). [`config`] and [`cli`] drive it from TOML files.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod greens;
pub mod linalg;
pub mod optics;
pub mod pump;
pub mod series;
pub mod spdc;
pub mod tomography;

pub use error::{Error, Result};
pub use optics::{LayerStack, Medium};
pub use spdc::{Biphoton, JointSetting};
