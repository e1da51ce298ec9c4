//! Exact arithmetic: rationals, sparse multivariate polynomials with graded
//! truncation, univariate truncated series, and linear algebra over ℚ.

mod matrix;
mod monomial;
mod polynomial;
pub mod rational;
mod univariate;

pub use matrix::{nullspace, solve_particular, Inconsistent, RationalMatrix, Rref};
pub use monomial::{monomials_of_degree, Monomial, Var};
pub use polynomial::{Polynomial, TermRecord};
pub use rational::Rational;
pub use univariate::UnivariateSeries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactPolyError {
    #[error("no assignment for variable {0}")]
    MissingAssignment(Var),
    #[error("unknown variable name `{0}`")]
    UnknownVariable(String),
}

pub fn poly_add(a: &Polynomial, b: &Polynomial) -> Polynomial {
    a + b
}

pub fn poly_mul(a: &Polynomial, b: &Polynomial, max_degree: Option<u32>) -> Polynomial {
    a.mul_truncated(b, max_degree)
}

pub fn poly_diff(a: &Polynomial, v: Var) -> Polynomial {
    a.diff(v)
}

pub fn poly_subst(
    a: &Polynomial,
    assignment: &std::collections::BTreeMap<Var, Polynomial>,
    max_degree: u32,
) -> Result<Polynomial, ExactPolyError> {
    a.subst(assignment, max_degree)
}

pub fn coefficient_of(a: &Polynomial, m: &Monomial) -> Rational {
    a.coefficient_of(m)
}
