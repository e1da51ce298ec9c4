//! Branch II: leading terms `λ_{ij;k} x_ij²`. Consistency forces every
//! component to be a series in `x_ij` alone, and the maps on a face must then
//! commute under composition.

use std::collections::BTreeMap;

use serde::Serialize;

use super::ClassifyError;
use crate::consistency::second_stage_residual;
use crate::exactpoly::{Polynomial, Rational, UnivariateSeries};
use crate::lattice::{var_name, Face, MapFamily};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// degree of the offending part
    pub degree: u32,
    pub face: String,
    pub dir: u8,
    /// the first monomial involving `x_ik` or `x_jk`
    pub monomial: String,
    /// whether the degree-(degree+1) residual of the family cut at `degree`
    /// is nonzero off the `x_ij` axis
    pub residual_nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchIIVerdict {
    /// highest degree through which every component depends on `x_ij` only
    pub univariate_through: u32,
    pub violation: Option<Violation>,
    /// set only for fully univariate families
    pub commuting: Option<bool>,
    pub consistent: bool,
}

/// Whether the face's maps commute: `f_{ij;k} ∘ f_{ij;ℓ} = f_{ij;ℓ} ∘ f_{ij;k}`
/// through `order` for all pairs of directions.
pub fn check_commuting(maps: &BTreeMap<(Face, u8), UnivariateSeries>, order: u32) -> bool {
    first_noncommuting(maps, order).is_none()
}

/// First `(face, k, ℓ, degree)` at which two maps on a face fail to commute.
pub fn first_noncommuting(
    maps: &BTreeMap<(Face, u8), UnivariateSeries>,
    order: u32,
) -> Option<(Face, u8, u8, u32)> {
    for (&(f, k), a) in maps {
        for (&(g, l), b) in maps.range((f, k + 1)..) {
            if g != f {
                break;
            }
            let ab = a.compose(b, order);
            let ba = b.compose(a, order);
            if ab != ba {
                let d = (1..=order).find(|&d| ab.coeff(d) != ba.coeff(d)).unwrap_or(order);
                return Some((f, k, l, d));
            }
        }
    }
    None
}

fn univariate(p: &Polynomial, face: Face) -> bool {
    p.terms().all(|(m, _)| m.exponent(face.var()) == m.degree())
}

/// Classifies a family whose leading terms are `λ x_ij²` with every `λ ≠ 0`.
/// The all-zero family is accepted as trivially consistent.
pub fn check_branch_ii(fam: &MapFamily) -> Result<BranchIIVerdict, ClassifyError> {
    let order = fam.order();
    let identity = fam.components().all(|c| c.parts().values().all(Polynomial::is_zero));
    if !identity {
        for c in fam.components() {
            let p = c.part(2);
            let ok = p.len() == 1 && univariate(&p, c.face) && !p.is_zero();
            if !ok {
                return Err(ClassifyError::BranchMismatch {
                    face: c.face,
                    dir: c.dir,
                    detail: format!("leading part {} is not λ·x_ij² with λ ≠ 0", p.display_with(var_name)),
                });
            }
        }
    }
    for m in 3..=order {
        for c in fam.components() {
            let p = c.part(m);
            let offending = p.terms().map(|(mono, _)| mono.clone()).find(|mono| mono.exponent(c.face.var()) != mono.degree());
            if let Some(mono) = offending {
                let cut = fam.with_order(m).with_order(m + 1);
                let report = second_stage_residual(&cut, m + 1);
                let residual_nonzero = report
                    .entries
                    .iter()
                    .filter(|e| e.face == c.face && (e.k == c.dir || e.l == c.dir))
                    .any(|e| !univariate(&e.slice(m + 1), c.face));
                return Ok(BranchIIVerdict {
                    univariate_through: m - 1,
                    violation: Some(Violation {
                        degree: m,
                        face: c.face.name(),
                        dir: c.dir,
                        monomial: Polynomial::term(Rational::from_integer(1.into()), mono.clone()).display_with(var_name),
                        residual_nonzero,
                    }),
                    commuting: None,
                    consistent: false,
                });
            }
        }
    }
    let maps: BTreeMap<(Face, u8), UnivariateSeries> = fam
        .components()
        .map(|c| {
            let s = UnivariateSeries::from_polynomial(&c.series(order), c.face.var(), order)
                .expect("checked univariate");
            ((c.face, c.dir), s)
        })
        .collect();
    let commuting = check_commuting(&maps, order);
    let consistent = second_stage_residual(fam, order).is_zero();
    debug_assert_eq!(commuting, consistent);
    Ok(BranchIIVerdict {
        univariate_through: order,
        violation: None,
        commuting: Some(commuting),
        consistent,
    })
}
