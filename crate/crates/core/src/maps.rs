//! Built-in fixtures: the symmetric discrete Darboux system (series and
//! closed form) and the star-triangle map (closed form only).

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::exactpoly::rational::{self, Rational};
use crate::exactpoly::Polynomial;
use crate::lattice::{role, Face, MapFamily, PointState, Symmetry};

pub use crate::exactpoly::UnivariateSeries;

/// Float states closer than this to a singular locus are rejected.
pub const SINGULAR_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("square root of a non-positive argument")]
    OutsideSqrtDomain,
    #[error("square root is not rational")]
    IrrationalRoot,
}

/// Scalars the closed-form evaluators work over: exact rationals or `f64`.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn checked_div(self, den: Self) -> Result<Self, DomainError>;
    /// Principal square root of a positive argument.
    fn checked_sqrt(self) -> Result<Self, DomainError>;
    fn in_sqrt_domain(&self) -> bool;
    fn abs(&self) -> Self;
    fn magnitude(&self) -> f64;
    fn is_exact_zero(&self) -> bool;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn checked_div(self, den: Self) -> Result<Self, DomainError> {
        if den.is_zero() {
            Err(DomainError::ZeroDenominator)
        } else {
            Ok(self / den)
        }
    }
    fn checked_sqrt(self) -> Result<Self, DomainError> {
        if !self.is_positive() {
            return Err(DomainError::OutsideSqrtDomain);
        }
        rational::sqrt_exact(&self).ok_or(DomainError::IrrationalRoot)
    }
    fn in_sqrt_domain(&self) -> bool {
        self.is_positive()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn magnitude(&self) -> f64 {
        rational::to_f64(self).abs()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }
    fn checked_div(self, den: Self) -> Result<Self, DomainError> {
        if den.abs() < SINGULAR_MARGIN {
            Err(DomainError::ZeroDenominator)
        } else {
            Ok(self / den)
        }
    }
    fn checked_sqrt(self) -> Result<Self, DomainError> {
        if self < SINGULAR_MARGIN {
            Err(DomainError::OutsideSqrtDomain)
        } else {
            Ok(self.sqrt())
        }
    }
    fn in_sqrt_domain(&self) -> bool {
        *self >= SINGULAR_MARGIN
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn magnitude(&self) -> f64 {
        f64::abs(*self)
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Darboux,
    StarTriangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClosedFormMap {
    pub kind: MapKind,
}

impl ClosedFormMap {
    pub const DARBOUX: ClosedFormMap = ClosedFormMap {
        kind: MapKind::Darboux,
    };
    pub const STAR_TRIANGLE: ClosedFormMap = ClosedFormMap {
        kind: MapKind::StarTriangle,
    };

    pub fn symmetry(&self) -> Symmetry {
        match self.kind {
            MapKind::Darboux => Symmetry::Symmetric,
            MapKind::StarTriangle => Symmetry::Skew,
        }
    }
}

/// `T_k x_ij` for the closed-form map. In skew mode the index order `(i, j)`
/// matters and `x_ba = -x_ab` is applied when reading the state; the state's
/// own symmetry flag is overridden by the map's convention.
pub fn eval_closed_form<S: Scalar>(
    map: ClosedFormMap,
    i: u8,
    j: u8,
    k: u8,
    state: &PointState<S>,
) -> Result<S, DomainError> {
    let skew = map.symmetry() == Symmetry::Skew;
    let x = |a: u8, b: u8| -> S {
        let v = state.values[&Face::new(a, b)].clone();
        if skew && a > b {
            -v
        } else {
            v
        }
    };
    let (xij, xik, xjk) = (x(i, j), x(i, k), x(j, k));
    match map.kind {
        MapKind::Darboux => {
            let p = S::one() - xik.clone() * xik.clone();
            let q = S::one() - xjk.clone() * xjk.clone();
            // √p·√q = √(pq) once both factors are in the domain
            if !p.in_sqrt_domain() || !q.in_sqrt_domain() {
                return Err(DomainError::OutsideSqrtDomain);
            }
            let den = (p * q).checked_sqrt()?;
            (xij + xik * xjk).checked_div(den)
        }
        MapKind::StarTriangle => {
            let xki = -xik;
            let den = xij.clone() * xjk.clone() + xjk * xki.clone() + xki * xij.clone();
            (-xij).checked_div(den)
        }
    }
}

/// Darboux series `(x + yz)(1-y²)^{-1/2}(1-z²)^{-1/2}` truncated at `order`,
/// placed on every component.
pub fn expand_darboux(order: u32) -> MapFamily {
    let parts = darboux_role_parts(order);
    MapFamily::from_generator(4, order, |m| parts.get(&m).cloned().unwrap_or_default())
        .expect("Darboux parts are homogeneous in the role variables")
}

/// Homogeneous parts (m ≥ 2) of the Darboux shift in role variables.
pub fn darboux_role_parts(order: u32) -> BTreeMap<u32, Polynomial> {
    let (x, y, z) = (
        Polynomial::var(role::IJ),
        Polynomial::var(role::IK),
        Polynomial::var(role::JK),
    );
    let head = &x + &(&y * &z);
    let series = head
        .mul_truncated(&inv_sqrt_one_minus_square(&y, order), Some(order))
        .mul_truncated(&inv_sqrt_one_minus_square(&z, order), Some(order));
    (2..=order)
        .map(|m| (m, series.homogeneous_part(m)))
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

/// `(1 - t²)^{-1/2} = Σ C(2n,n) (t²/4)^n`, truncated at total degree `order`.
fn inv_sqrt_one_minus_square(t: &Polynomial, order: u32) -> Polynomial {
    let t2 = t * t;
    let mut out = Polynomial::zero();
    let mut power = Polynomial::one();
    let mut four_n = <Rational as One>::one();
    for n in 0..=(order / 2) as u64 {
        out += power.scale(&(rational::binomial(2 * n, n) / &four_n));
        power = power.mul_truncated(&t2, Some(order));
        four_n *= Rational::from_integer(4.into());
    }
    out
}

pub fn univariate_compose(f: &UnivariateSeries, g: &UnivariateSeries, order: u32) -> UnivariateSeries {
    f.compose(g, order)
}
