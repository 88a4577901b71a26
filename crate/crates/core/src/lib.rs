//! Self-similar asymptotics of damped compressible Euler flow with a physical
//! vacuum boundary.
//!
//! The crate builds the Barenblatt reference solution, the affine particular
//! solutions and the boundary correction `h(t)`, evolves the one-dimensional
//! and spherically symmetric vacuum free-boundary problems in Lagrangian
//! coordinates, and measures how the computed flows approach the Barenblatt
//! profile.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod affine;
pub mod barenblatt;
pub mod diagnostics;
mod error;
pub mod num;
pub mod perturbation;
pub mod solver1d;
pub mod solver3d;
pub mod state;

pub use barenblatt::BarenblattProfile;
pub use error::{Error, Result};
pub use perturbation::PerturbationSpec;

/// Spatial dimension of the problem: a line, or radial motion in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Three,
}

impl Dim {
    pub fn n(self) -> f64 {
        match self {
            Dim::One => 1.0,
            Dim::Three => 3.0,
        }
    }

    pub fn from_n(n: u32) -> Option<Self> {
        match n {
            1 => Some(Dim::One),
            3 => Some(Dim::Three),
            _ => None,
        }
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dim::One => f.write_str("1"),
            Dim::Three => f.write_str("3"),
        }
    }
}

// Compile the code listings of the guide as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/barenblatt.md")]
    mod barenblatt {}
    #[doc = include_str!("../../../book/src/affine.md")]
    mod affine {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    mod acceptance {}
}
