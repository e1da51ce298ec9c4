use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Opaque variable token. The algebra layer never looks inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A power product of variables, stored sparsely as `(var, exponent)` pairs
/// sorted by variable with no zero exponents.
///
/// Ordering is graded: total degree first, then lexicographic on the dense
/// exponent vector indexed by ascending variable id (a larger exponent on a
/// smaller id compares greater).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: SmallVec<[(Var, u32); 6]>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: Var) -> Self {
        Self::power(v, 1)
    }

    pub fn power(v: Var, e: u32) -> Self {
        let mut m = Self::one();
        if e > 0 {
            m.factors.push((v, e));
        }
        m
    }

    /// Builds a monomial from arbitrary `(var, exp)` pairs; repeated variables
    /// are merged and zero exponents dropped.
    pub fn from_pairs<I: IntoIterator<Item = (Var, u32)>>(pairs: I) -> Self {
        let mut v: SmallVec<[(Var, u32); 6]> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        v.sort_by_key(|p| p.0);
        let mut out: SmallVec<[(Var, u32); 6]> = SmallVec::new();
        for (var, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => out.push((var, e)),
            }
        }
        Self { factors: out }
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|p| p.1).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        match self.factors.binary_search_by_key(&v, |p| p.0) {
            Ok(i) => self.factors[i].1,
            Err(_) => 0,
        }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.factors.iter().map(|p| p.0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { factors: out }
    }

    /// Lowers the exponent of `v` by one; `None` if `v` is absent.
    /// Returns the old exponent alongside the quotient.
    pub fn divide_var(&self, v: Var) -> Option<(u32, Monomial)> {
        let i = self.factors.binary_search_by_key(&v, |p| p.0).ok()?;
        let e = self.factors[i].1;
        let mut f = self.factors.clone();
        if e == 1 {
            f.remove(i);
        } else {
            f[i].1 -= 1;
        }
        Some((e, Monomial { factors: f }))
    }

    /// Splits into the part over `keep` variables and the rest.
    pub fn split<F: Fn(Var) -> bool>(&self, keep: F) -> (Monomial, Monomial) {
        let mut a = Monomial::one();
        let mut b = Monomial::one();
        for &(v, e) in &self.factors {
            if keep(v) {
                a.factors.push((v, e));
            } else {
                b.factors.push((v, e));
            }
        }
        (a, b)
    }

    pub fn rename<F: Fn(Var) -> Var>(&self, f: F) -> Monomial {
        Monomial::from_pairs(self.factors.iter().map(|&(v, e)| (f(v), e)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (x, y) in self.factors.iter().zip(other.factors.iter()) {
                if x.0 != y.0 {
                    // whoever has the smaller variable carries a positive
                    // exponent where the other has zero
                    return if x.0 < y.0 { Ordering::Greater } else { Ordering::Less };
                }
                if x.1 != y.1 {
                    return x.1.cmp(&y.1);
                }
            }
            self.factors.len().cmp(&other.factors.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree exactly `degree` in the given variables,
/// in ascending monomial order.
pub fn monomials_of_degree(vars: &[Var], degree: u32) -> Vec<Monomial> {
    fn rec(vars: &[Var], left: u32, acc: &mut Vec<(Var, u32)>, out: &mut Vec<Monomial>) {
        match vars.split_first() {
            None => {
                if left == 0 {
                    out.push(Monomial::from_pairs(acc.iter().copied()));
                }
            }
            Some((&v, rest)) => {
                for e in 0..=left {
                    acc.push((v, e));
                    rec(rest, left - e, acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}
