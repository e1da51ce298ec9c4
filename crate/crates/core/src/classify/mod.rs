//! Classification of consistent families.
//!
//! * [`quadratic`]: the degree-3 condition as polynomial equations in the
//!   coefficients of `A^{(2)}`.
//! * [`order`]: the linear system for `A^{(m+1)}` given all lower orders.
//! * [`branch`]: branch-II (univariate) families and commuting series.

pub mod branch;
pub mod order;
pub mod quadratic;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

pub use branch::{check_branch_ii, check_commuting, first_noncommuting, BranchIIVerdict, Violation};
pub use order::{reconstruct_darboux, solve_homogeneous, solve_order, OrderSolveResult};
pub use quadratic::{
    audit, check_branch_i, quadratic_equations, Coeff, CoeffKind, CoefficientEquation, CoefficientEquationSet,
    QuadraticAnsatz, QuadraticAudit,
};

pub use crate::gauge::Increment;
use crate::consistency::second_stage_residual;
use crate::exactpoly::{rational, Polynomial, Rational};
use crate::gauge::{normal_form, GaugeError, GaugeTransformation};
use crate::lattice::{Face, LatticeError, MapFamily};
use crate::maps::expand_darboux;

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("no solution at order {target}: contradiction in row {row}")]
    Inconsistent { target: u32, row: String },
    #[error("component ({face}, {dir}) does not fit the branch: {detail}")]
    BranchMismatch { face: Face, dir: u8, detail: String },
    #[error("unsupported family: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `Σ_{v ∈ {ij,ik,jk}} ∂P_{ij;k}/∂x_v · Q_{v;ℓ}`.
pub(crate) fn bracket(p: &Increment, q: &Increment, face: Face, k: u8, l: u8) -> Polynomial {
    let zero = Polynomial::zero();
    let pk = p.get(&(face, k)).unwrap_or(&zero);
    if pk.is_zero() {
        return Polynomial::zero();
    }
    let mut out = Polynomial::zero();
    for v in face.roles(k) {
        let qv = q.get(&(v, l)).unwrap_or(&zero);
        if qv.is_zero() {
            continue;
        }
        out += pk.diff(v.var()) * qv.clone();
    }
    out
}

/// Degree-3 part of the condition for `(face, k, ℓ)` with quadratic parts
/// `a2`.
pub fn degree_three_residual(a2: &Increment, face: Face, k: u8, l: u8) -> Polynomial {
    bracket(a2, a2, face, k, l) - bracket(a2, a2, face, l, k)
}

/// What the classifier concluded about a family.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Classification {
    /// All parts vanish.
    Identity { consistent: bool },
    /// `A^{(2)} = x_ik x_jk` everywhere.
    BranchI {
        consistent_up_to: u32,
        consistent: bool,
        /// whether the gauge normal form equals the Darboux expansion
        darboux_equivalent: bool,
        gauge: serde_json::Value,
    },
    /// `A^{(2)} = α x_ik x_jk` with every `α ≠ 0`.
    BranchIScaled { alpha_relations_hold: bool, consistent_up_to: u32 },
    /// `A^{(2)} = λ x_ij²` with every `λ ≠ 0`.
    #[serde(rename = "branch_ii")]
    BranchII(BranchIIVerdict),
}

fn pure_leading(fam: &MapFamily, kind: CoeffKind) -> Option<BTreeMap<(Face, u8), Rational>> {
    let mut out = BTreeMap::new();
    for c in fam.components() {
        let p = c.part(2);
        let mono = kind.monomial(c.face, c.dir);
        let coeff = p.coefficient_of(&mono);
        if coeff.is_zero() || p.len() != 1 {
            return None;
        }
        out.insert((c.face, c.dir), coeff);
    }
    Some(out)
}

/// Dispatches on the leading terms. Only N = 4 families are classified.
pub fn classify_family(fam: &MapFamily) -> Result<Classification, ClassifyError> {
    if fam.n() != 4 {
        return Err(ClassifyError::Unsupported(format!("N = {} (classification needs N = 4)", fam.n())));
    }
    let order = fam.order();
    let report = second_stage_residual(fam, order);
    if fam.components().all(|c| c.parts().values().all(Polynomial::is_zero)) {
        return Ok(Classification::Identity {
            consistent: report.is_zero(),
        });
    }
    if let Some(alphas) = pure_leading(fam, CoeffKind::Alpha) {
        if alphas.values().all(One::is_one) {
            let (nf, g) = normal_form(fam)?;
            return Ok(Classification::BranchI {
                consistent_up_to: report.consistent_up_to(),
                consistent: report.is_zero(),
                darboux_equivalent: nf == expand_darboux(order),
                gauge: serde_json::from_str(&g.to_json()).expect("gauge json"),
            });
        }
        return Ok(Classification::BranchIScaled {
            alpha_relations_hold: check_branch_i(&alphas),
            consistent_up_to: report.consistent_up_to(),
        });
    }
    if pure_leading(fam, CoeffKind::Lambda).is_some() {
        return Ok(Classification::BranchII(check_branch_ii(fam)?));
    }
    Err(ClassifyError::Unsupported(
        "leading terms are neither pure α x_ik x_jk nor pure λ x_ij² (mixed branches are not handled)".into(),
    ))
}

/// Gauge description as JSON, for reports.
pub fn gauge_json(g: &GaugeTransformation) -> serde_json::Value {
    serde_json::from_str(&g.to_json()).expect("gauge json")
}

pub(crate) fn rational_text(r: &Rational) -> String {
    rational::to_text(r)
}
