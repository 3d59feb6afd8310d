//! Static analysis of functionally graded beams.
//!
//! The crate covers the full chain from material grading to recovered
//! stresses:
//!
//! * [`material`]: power-law grading and warping shapes.
//! * [`section`]: through-thickness integrals and the modified stiffness.
//! * [`element`]: mixed and displacement beam elements.
//! * [`solver`]: beam models, assembly and the banded solve.
//! * [`recovery`]: resultant fields and equilibrium-based stresses.
//! * [`q4ref`]: a plane-stress quadrilateral reference model.
//! * [`config`], [`tables`]: scenario files and benchmark sweeps.

pub mod config;
pub mod csv;
pub mod element;
pub mod error;
pub mod linalg;
pub mod material;
pub mod q4ref;
pub mod quadrature;
pub mod recovery;
pub mod section;
pub mod solver;
pub mod tables;

pub use element::ElementKind;
pub use error::{Error, Result};
pub use material::{GradingKind, MaterialLaw, SectionGeometry};
pub use section::SectionModel;
pub use solver::{solve, BeamModel, BoundaryCondition, DeflectionMeasure, Solution};
