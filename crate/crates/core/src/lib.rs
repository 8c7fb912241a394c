//! Resonant modes of closed 3-D cavities filled with anisotropic, possibly
//! lossy media, computed with lowest-order edge elements.
//!
//! The discrete problem is the constrained generalized eigenproblem
//! `A x = lambda M x` subject to `C x = 0`. Three solvers enforce the
//! constraint: a penalty pencil, an augmented (Lagrange multiplier) pencil and
//! a projection onto the null space of `C`.

pub mod error;
pub mod materials;
pub mod assembly;
pub mod eigensolvers;
pub mod mesh;
pub mod modes;
pub mod sparse;

pub use faer::c64;
