//! Coefficient equations for the quadratic leading terms.
//!
//! Each `A_{ij;k}^{(2)}` is written with six coefficients,
//! `α x_ik x_jk + β⁽ⁱ⁾ x_ij x_ik + β⁽ʲ⁾ x_ij x_jk + λ x_ij² + μ⁽ⁱ⁾ x_ik² + μ⁽ʲ⁾ x_jk²`.
//! Unknown coefficients become extra polynomial variables, so the degree-3
//! consistency condition turns into polynomial equations in them.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{degree_three_residual, Increment};
use crate::consistency::equations;
use crate::exactpoly::rational::Rational;
use crate::exactpoly::{Monomial, Polynomial, TermRecord, Var};
use crate::lattice::{component_keys, var_name, Face, MapFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CoeffKind {
    Alpha,
    /// β⁽ⁱ⁾ with `i` the smaller face index
    BetaLow,
    /// β⁽ʲ⁾ with `j` the larger face index
    BetaHigh,
    Lambda,
    MuLow,
    MuHigh,
}

impl CoeffKind {
    pub const ALL: [CoeffKind; 6] = [
        CoeffKind::Alpha,
        CoeffKind::BetaLow,
        CoeffKind::BetaHigh,
        CoeffKind::Lambda,
        CoeffKind::MuLow,
        CoeffKind::MuHigh,
    ];

    fn index(self) -> u32 {
        Self::ALL.iter().position(|&k| k == self).unwrap() as u32
    }

    /// The quadratic monomial this coefficient multiplies in component
    /// `(face, dir)`.
    pub fn monomial(self, face: Face, dir: u8) -> Monomial {
        let [fij, fik, fjk] = face.roles(dir);
        let (a, b, c) = (fij.var(), fik.var(), fjk.var());
        match self {
            CoeffKind::Alpha => Monomial::from_pairs([(b, 1), (c, 1)]),
            CoeffKind::BetaLow => Monomial::from_pairs([(a, 1), (b, 1)]),
            CoeffKind::BetaHigh => Monomial::from_pairs([(a, 1), (c, 1)]),
            CoeffKind::Lambda => Monomial::power(a, 2),
            CoeffKind::MuLow => Monomial::power(b, 2),
            CoeffKind::MuHigh => Monomial::power(c, 2),
        }
    }
}

const TOKEN_BASE: u32 = 2_000_000;

/// Symbol token for a coefficient of component `(face, dir)` (N = 4).
pub fn token(face: Face, dir: u8, kind: CoeffKind) -> Var {
    let idx = component_keys(4)
        .iter()
        .position(|&key| key == (face, dir))
        .expect("admissible component") as u32;
    Var(TOKEN_BASE + idx * 6 + kind.index())
}

/// Token for `β_{face;dir}^{(upper)}` with `upper` one of the face indices.
pub fn beta(face: Face, dir: u8, upper: u8) -> Var {
    token(face, dir, if upper == face.i() { CoeffKind::BetaLow } else { CoeffKind::BetaHigh })
}

pub fn mu(face: Face, dir: u8, upper: u8) -> Var {
    token(face, dir, if upper == face.i() { CoeffKind::MuLow } else { CoeffKind::MuHigh })
}

pub fn token_info(v: Var) -> Option<(Face, u8, CoeffKind)> {
    let off = v.0.checked_sub(TOKEN_BASE)?;
    let keys = component_keys(4);
    let (face, dir) = *keys.get((off / 6) as usize)?;
    Some((face, dir, CoeffKind::ALL[(off % 6) as usize]))
}

/// Names face variables as `x12` and tokens as e.g. `beta[13;2]^(1)`.
pub fn symbol_name(v: Var) -> String {
    match token_info(v) {
        Some((f, d, kind)) => {
            let base = format!("{}{};{}", f.i(), f.j(), d);
            match kind {
                CoeffKind::Alpha => format!("alpha[{base}]"),
                CoeffKind::Lambda => format!("lambda[{base}]"),
                CoeffKind::BetaLow => format!("beta[{base}]^({})", f.i()),
                CoeffKind::BetaHigh => format!("beta[{base}]^({})", f.j()),
                CoeffKind::MuLow => format!("mu[{base}]^({})", f.i()),
                CoeffKind::MuHigh => format!("mu[{base}]^({})", f.j()),
            }
        }
        None => var_name(v),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coeff {
    Known(Rational),
    Symbol,
}

/// Six coefficients per component, each numeric or symbolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticAnsatz {
    pub coeffs: BTreeMap<(Face, u8), [Coeff; 6]>,
}

impl QuadraticAnsatz {
    pub fn fully_symbolic() -> Self {
        Self {
            coeffs: component_keys(4)
                .into_iter()
                .map(|key| (key, std::array::from_fn(|_| Coeff::Symbol)))
                .collect(),
        }
    }

    /// All components with the given kind fixed to a value.
    pub fn with_all(mut self, kind: CoeffKind, value: Coeff) -> Self {
        for c in self.coeffs.values_mut() {
            c[kind.index() as usize] = value.clone();
        }
        self
    }

    pub fn with(mut self, face: Face, dir: u8, kind: CoeffKind, value: Coeff) -> Self {
        self.coeffs.get_mut(&(face, dir)).expect("admissible component")[kind.index() as usize] = value;
        self
    }

    /// Symbolic ansatz with λ = 0 everywhere.
    pub fn branch_i_symbolic() -> Self {
        Self::fully_symbolic().with_all(CoeffKind::Lambda, Coeff::Known(Rational::zero()))
    }

    /// Symbolic ansatz with α = 0 everywhere.
    pub fn branch_ii_symbolic() -> Self {
        Self::fully_symbolic().with_all(CoeffKind::Alpha, Coeff::Known(Rational::zero()))
    }

    /// α = 1, all other coefficients zero.
    pub fn darboux() -> Self {
        let mut a = Self::fully_symbolic();
        for kind in CoeffKind::ALL {
            let v = if kind == CoeffKind::Alpha { Rational::one() } else { Rational::zero() };
            a = a.with_all(kind, Coeff::Known(v));
        }
        a
    }

    /// Numeric ansatz read off the quadratic parts of an N = 4 family.
    pub fn from_family(fam: &MapFamily) -> Self {
        let mut a = Self::fully_symbolic();
        for (key, slot) in a.coeffs.iter_mut() {
            let p = fam.part(key.0, key.1, 2);
            for kind in CoeffKind::ALL {
                slot[kind.index() as usize] = Coeff::Known(p.coefficient_of(&kind.monomial(key.0, key.1)));
            }
        }
        a
    }

    /// `A_{face;dir}^{(2)}` over face variables and coefficient tokens.
    pub fn polynomial(&self, face: Face, dir: u8) -> Polynomial {
        let mut p = Polynomial::zero();
        for kind in CoeffKind::ALL {
            let mono = kind.monomial(face, dir);
            match &self.coeffs[&(face, dir)][kind.index() as usize] {
                Coeff::Known(c) => p.add_term(mono, c.clone()),
                Coeff::Symbol => p.add_term(mono.mul(&Monomial::var(token(face, dir, kind))), Rational::one()),
            }
        }
        p
    }

    pub fn leading_parts(&self) -> Increment {
        self.coeffs
            .keys()
            .map(|&(f, d)| ((f, d), self.polynomial(f, d)))
            .collect()
    }
}

/// One generated equation `poly = 0`, sourced at the coefficient of
/// `monomial` in the degree-3 condition for `(face, k, ℓ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientEquation {
    pub face: Face,
    pub k: u8,
    pub l: u8,
    pub monomial: Monomial,
    /// normalized to leading coefficient 1
    pub poly: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoefficientEquationSet {
    pub equations: Vec<CoefficientEquation>,
}

impl CoefficientEquationSet {
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// Whether `poly = 0` occurs among the generated equations, up to a
    /// nonzero constant factor.
    pub fn contains(&self, poly: &Polynomial) -> bool {
        let target = poly.monic();
        self.equations.iter().any(|e| e.poly == target)
    }

    /// Same, and sourced at the given monomial.
    pub fn contains_at(&self, poly: &Polynomial, monomial: &Monomial) -> bool {
        let target = poly.monic();
        self.equations
            .iter()
            .any(|e| &e.monomial == monomial && e.poly == target)
    }

    /// Whether every equation vanishes at the given point.
    pub fn vanishes_at(&self, point: &BTreeMap<Var, Rational>) -> bool {
        self.equations
            .iter()
            .all(|e| e.poly.eval_partial(point).is_zero())
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Eq {
            face: String,
            pair: [u8; 2],
            monomial: String,
            equation: String,
            terms: Vec<TermRecord>,
        }
        let list: Vec<Eq> = self
            .equations
            .iter()
            .map(|e| Eq {
                face: e.face.name(),
                pair: [e.k, e.l],
                monomial: Polynomial::term(Rational::one(), e.monomial.clone()).display_with(var_name),
                equation: format!("{} = 0", e.poly.display_with(symbol_name)),
                terms: e.poly.to_records(symbol_name),
            })
            .collect();
        serde_json::to_value(list).expect("equations serialize")
    }
}

pub fn is_face_var(v: Var) -> bool {
    token_info(v).is_none() && Face::from_var(v).is_some()
}

/// Substitutes the ansatz into the degree-3 consistency condition and reads
/// off the coefficient of every face-variable monomial.
pub fn quadratic_equations(ansatz: &QuadraticAnsatz) -> CoefficientEquationSet {
    let leading = ansatz.leading_parts();
    let mut out = CoefficientEquationSet::default();
    for (face, k, l) in equations(4) {
        let r = degree_three_residual(&leading, face, k, l);
        for (monomial, coeff) in r.collect_by(is_face_var) {
            out.equations.push(CoefficientEquation {
                face,
                k,
                l,
                monomial,
                poly: coeff.monic(),
            });
        }
    }
    out
}

/// `α_{ik;ℓ}α_{ij;k} = α_{jℓ;k}α_{ij;ℓ}` for every ordering `(i,j,k,ℓ)` of
/// `{1,2,3,4}`. False if any α is missing or zero.
pub fn check_branch_i(alphas: &BTreeMap<(Face, u8), Rational>) -> bool {
    let a = |x: u8, y: u8, z: u8| alphas.get(&(Face::new(x, y), z));
    if component_keys(4)
        .iter()
        .any(|key| alphas.get(key).is_none_or(Zero::is_zero))
    {
        return false;
    }
    permutations4().into_iter().all(|[i, j, k, l]| {
        let lhs = a(i, k, l).unwrap() * a(i, j, k).unwrap();
        let rhs = a(j, l, k).unwrap() * a(i, j, l).unwrap();
        lhs == rhs
    })
}

pub(crate) fn permutations4() -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for i in 1..=4u8 {
        for j in 1..=4u8 {
            for k in 1..=4u8 {
                for l in 1..=4u8 {
                    let s = [i, j, k, l];
                    if (1..=4u8).all(|d| s.contains(&d)) {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

pub fn alphas_from_scalings(c: &BTreeMap<Face, Rational>) -> BTreeMap<(Face, u8), Rational> {
    component_keys(4)
        .into_iter()
        .map(|(f, k)| {
            let (ik, jk) = (Face::new(f.i(), k), Face::new(f.j(), k));
            ((f, k), &c[&ik] * &c[&jk] / &c[&f])
        })
        .collect()
}

/// How many of the branch conditions appear verbatim among the generated
/// equations, each at its expected source monomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadraticAudit {
    pub equations: usize,
    pub branch_i_equations: usize,
    /// `α_{ij;ℓ} λ_{ij;k} = 0` at `x_ij x_iℓ x_jℓ`, per ordering of `{1,2,3,4}`
    pub alpha_lambda: (usize, usize),
    /// `α_{ij;ℓ}(β_{ij;k}^{(i)} − β_{iℓ;k}^{(i)}) = 0` at `x_iℓ x_jℓ x_ik`, λ = 0
    pub beta_equal: (usize, usize),
    /// `α_{ij;ℓ}(β_{iℓ;k}^{(ℓ)} + β_{jℓ;k}^{(ℓ)}) = 0` at `x_iℓ x_jℓ x_kℓ`, λ = 0
    pub beta_opposite: (usize, usize),
    /// `μ_{ik;ℓ}^{(i)} α_{ij;k} = 0` at `x_iℓ² x_jk`, λ = 0 and β = 0
    pub mu_alpha: (usize, usize),
}

impl QuadraticAudit {
    pub fn complete(&self) -> bool {
        [self.alpha_lambda, self.beta_equal, self.beta_opposite, self.mu_alpha]
            .iter()
            .all(|(found, total)| found == total)
    }
}

pub fn audit() -> QuadraticAudit {
    let t = Polynomial::var;
    let x = |a: u8, b: u8| Face::new(a, b).var();
    let full = quadratic_equations(&QuadraticAnsatz::fully_symbolic());
    let b1 = quadratic_equations(&QuadraticAnsatz::branch_i_symbolic());
    let b1_no_beta = quadratic_equations(
        &QuadraticAnsatz::branch_i_symbolic()
            .with_all(CoeffKind::BetaLow, Coeff::Known(Rational::zero()))
            .with_all(CoeffKind::BetaHigh, Coeff::Known(Rational::zero())),
    );
    let orders = permutations4();
    let count = |f: &dyn Fn([u8; 4]) -> bool| (orders.iter().filter(|&&o| f(o)).count(), orders.len());
    QuadraticAudit {
        equations: full.len(),
        branch_i_equations: b1.len(),
        alpha_lambda: count(&|[i, j, k, l]| {
            let ij = Face::new(i, j);
            let eq = t(token(ij, l, CoeffKind::Alpha)) * t(token(ij, k, CoeffKind::Lambda));
            full.contains_at(&eq, &Monomial::from_pairs([(x(i, j), 1), (x(i, l), 1), (x(j, l), 1)]))
        }),
        beta_equal: count(&|[i, j, k, l]| {
            let (ij, il) = (Face::new(i, j), Face::new(i, l));
            let eq = t(token(ij, l, CoeffKind::Alpha)) * (t(beta(ij, k, i)) - t(beta(il, k, i)));
            b1.contains_at(&eq, &Monomial::from_pairs([(x(i, l), 1), (x(j, l), 1), (x(i, k), 1)]))
        }),
        beta_opposite: count(&|[i, j, k, l]| {
            let (ij, il, jl) = (Face::new(i, j), Face::new(i, l), Face::new(j, l));
            let eq = t(token(ij, l, CoeffKind::Alpha)) * (t(beta(il, k, l)) + t(beta(jl, k, l)));
            b1.contains_at(&eq, &Monomial::from_pairs([(x(i, l), 1), (x(j, l), 1), (x(k, l), 1)]))
        }),
        mu_alpha: count(&|[i, j, k, l]| {
            let eq = t(mu(Face::new(i, k), l, i)) * t(token(Face::new(i, j), k, CoeffKind::Alpha));
            b1_no_beta.contains_at(&eq, &Monomial::from_pairs([(x(i, l), 2), (x(j, k), 1)]))
        }),
    }
}
