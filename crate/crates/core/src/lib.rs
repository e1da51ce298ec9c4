//! Exact verification and classification of 4D-consistent 3D lattice maps
//! of the form `T_k x_ij = x_ij + Σ_{m≥2} A_{ij;k}^{(m)}(x_ij, x_ik, x_jk)`.
//!
//! Modules, bottom up:
//!
//! * [`exactpoly`]: rationals, sparse polynomials, series, linear algebra.
//! * [`lattice`]: face variables, map families, the JSON file format.
//! * [`maps`]: Darboux and star-triangle fixtures.
//! * [`consistency`]: degree-sliced residuals of the six cube conditions.
//! * [`gauge`]: point and scaling transformations, kernel elements,
//!   the canonical gauge slice.
//! * [`classify`]: quadratic coefficient equations, the per-order linear
//!   solve, branch checks, and reconstruction of the Darboux series.

pub mod classify;
pub mod consistency;
pub mod exactpoly;
pub mod gauge;
pub mod lattice;
pub mod maps;

pub use exactpoly::{Monomial, Polynomial, Rational, RationalMatrix, UnivariateSeries, Var};
pub use lattice::{Face, MapFamily, Symmetry};
