use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::monomial::{Monomial, Var};
use super::polynomial::Polynomial;
use super::rational::Rational;

/// Truncated power series `f(x) = Σ_{n=1..=order} a_n x^n` with no constant
/// term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateSeries {
    order: u32,
    coeffs: BTreeMap<u32, Rational>,
}

impl UnivariateSeries {
    pub fn identity(order: u32) -> Self {
        Self::from_coeffs(order, [(1, Rational::one())])
    }

    /// Terms with degree 0 or above `order` are dropped.
    pub fn from_coeffs<I: IntoIterator<Item = (u32, Rational)>>(order: u32, coeffs: I) -> Self {
        let mut map = BTreeMap::new();
        for (d, c) in coeffs {
            if d >= 1 && d <= order && !c.is_zero() {
                *map.entry(d).or_insert_with(Rational::zero) += c;
            }
        }
        map.retain(|_, c: &mut Rational| !c.is_zero());
        Self { order, coeffs: map }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeff(&self, d: u32) -> Rational {
        self.coeffs.get(&d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.coeffs
    }

    /// `x + O(x²)`.
    pub fn is_tangent_to_identity(&self) -> bool {
        self.coeff(1).is_one()
    }

    pub fn truncate(&self, order: u32) -> Self {
        Self::from_coeffs(order, self.coeffs.iter().map(|(&d, c)| (d, c.clone())))
    }

    pub fn to_polynomial(&self, v: Var) -> Polynomial {
        Polynomial::from_terms(
            self.coeffs
                .iter()
                .map(|(&d, c)| (Monomial::power(v, d), c.clone())),
        )
    }

    /// Reads a polynomial in the single variable `v`; `None` if any other
    /// variable or a constant term is present.
    pub fn from_polynomial(p: &Polynomial, v: Var, order: u32) -> Option<Self> {
        let mut coeffs = Vec::new();
        for (m, c) in p.terms() {
            let d = m.degree();
            if d == 0 || m.exponent(v) != d {
                return None;
            }
            coeffs.push((d, c.clone()));
        }
        Some(Self::from_coeffs(order, coeffs))
    }

    /// `self ∘ inner`, truncated at `order`.
    pub fn compose(&self, inner: &UnivariateSeries, order: u32) -> UnivariateSeries {
        // Horner on truncated dense vectors
        let n = order as usize;
        let g: Vec<Rational> = (0..=n).map(|d| inner.coeff(d as u32)).collect();
        let mut acc = vec![Rational::zero(); n + 1];
        let top = self.coeffs.keys().next_back().copied().unwrap_or(0).min(order);
        for d in (1..=top).rev() {
            acc[0] += self.coeff(d);
            acc = mul_dense(&acc, &g, n);
        }
        Self::from_coeffs(order, acc.into_iter().enumerate().map(|(d, c)| (d as u32, c)))
    }

    /// Compositional inverse, truncated at `order`. `None` when the linear
    /// coefficient vanishes.
    pub fn reversion(&self, order: u32) -> Option<UnivariateSeries> {
        let a1 = self.coeff(1);
        if a1.is_zero() {
            return None;
        }
        let inv_a1 = a1.recip();
        let mut r = UnivariateSeries::from_coeffs(order, [(1, inv_a1.clone())]);
        for n in 2..=order {
            // the coefficient of x^n in self∘r is a1·r_n + (terms from r_{<n})
            let c = self.compose(&r, n).coeff(n);
            let mut next = r.coeffs.clone();
            next.insert(n, -(c * &inv_a1));
            r = UnivariateSeries::from_coeffs(order, next);
        }
        Some(r)
    }
}

fn mul_dense(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}
