//! Dimer algebras of plabic graphs on the disc.
//!
//! The pipeline: a plabic graph ([`plabic`]) determines an ice quiver
//! with potential ([`quiver`]), whose frozen Jacobian algebra carries a
//! weight grading making it thin ([`algebra`]); the bimodule resolution
//! of that algebra can be checked for exactness degree by degree
//! ([`cy`]); the quiver drives a cluster structure ([`cluster`]) whose
//! variables specialize to boundary measurements of the graph
//! ([`positroid`]).

pub mod algebra;
pub mod cluster;
pub mod corpus;
pub mod cy;
pub mod error;
pub mod linalg;
pub mod moves;
pub mod plabic;
pub mod positroid;
pub mod quiver;

pub use error::{Error, Result};
pub use plabic::{parse_plabic, Color, DiagramReport, PlabicGraph, Strand};
pub use quiver::{IceQP, IceQuiver, Potential};
