//! The order-by-order linear problem.
//!
//! With `A^{(2)}, …, A^{(m)}` fixed, the degree-(m+2) part of every
//! condition is affine in the unknown `U = A^{(m+1)}`:
//! `L(U) + F = 0`, where `F` is the degree-(m+2) residual at `U = 0` and
//! `L(U)_{kℓ} = D(A²,U)_{kℓ} + D(U,A²)_{kℓ} − D(A²,U)_{ℓk} − D(U,A²)_{ℓk}`
//! with `D(P,Q)_{ij;k,ℓ} = Σ_v ∂P_{ij;k}/∂x_v · Q_{v;ℓ}`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{bracket, rational_text, ClassifyError, Increment};
use crate::consistency::{equations, second_stage_residual};
use crate::exactpoly::{monomials_of_degree, solve_particular, Monomial, Polynomial, Rational, RationalMatrix};
use crate::gauge::{apply_increment, kernel_element, slice_monomial, GaugeError, KernelParameters};
use crate::lattice::{component_keys, enumerate_faces, var_name, Face, MapFamily};

/// The assembled system for `A^{(target)}` and its exact solution.
#[derive(Debug, Clone)]
pub struct OrderSolveResult {
    pub target: u32,
    /// unknown `j` is the coefficient of `columns[j].2` in component
    /// `(columns[j].0, columns[j].1)`
    pub columns: Vec<(Face, u8, Monomial)>,
    /// row `r` is the coefficient of `rows[r].1` in condition `rows[r].0`
    pub rows: Vec<((Face, u8, u8), Monomial)>,
    pub matrix: RationalMatrix,
    pub rhs: Vec<Rational>,
    pub particular: Increment,
    pub kernel: Vec<Increment>,
}

impl OrderSolveResult {
    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    pub fn column_label(&self, j: usize) -> String {
        let (f, d, m) = &self.columns[j];
        format!("A[{};{}] {}", f.name(), d, mono_text(m))
    }

    pub fn row_label(&self, r: usize) -> String {
        let ((f, k, l), m) = &self.rows[r];
        format!("{} ({},{}) {}", f.name(), k, l, mono_text(m))
    }

    pub fn to_json(&self, with_matrix: bool) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            target: u32,
            unknowns: usize,
            equations: usize,
            kernel_dim: usize,
            particular: BTreeMap<String, String>,
            kernel: Vec<BTreeMap<String, String>>,
            #[serde(skip_serializing_if = "Option::is_none")]
            matrix: Option<MatrixDump>,
        }
        #[derive(Serialize)]
        struct MatrixDump {
            columns: Vec<String>,
            rows: Vec<String>,
            entries: Vec<(usize, usize, String)>,
            rhs: Vec<String>,
        }
        let matrix = with_matrix.then(|| MatrixDump {
            columns: (0..self.columns.len()).map(|j| self.column_label(j)).collect(),
            rows: (0..self.rows.len()).map(|r| self.row_label(r)).collect(),
            entries: (0..self.matrix.rows())
                .flat_map(|r| {
                    self.matrix
                        .row(r)
                        .iter()
                        .map(move |(c, x)| (r, *c, rational_text(x)))
                })
                .collect(),
            rhs: self.rhs.iter().map(rational_text).collect(),
        });
        serde_json::to_value(Out {
            target: self.target,
            unknowns: self.columns.len(),
            equations: self.rows.len(),
            kernel_dim: self.kernel_dim(),
            particular: increment_text(&self.particular),
            kernel: self.kernel.iter().map(increment_text).collect(),
            matrix,
        })
        .expect("order result serializes")
    }
}

fn mono_text(m: &Monomial) -> String {
    Polynomial::term(Rational::from_integer(1.into()), m.clone()).display_with(var_name)
}

fn increment_text(inc: &Increment) -> BTreeMap<String, String> {
    inc.iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|((f, d), p)| (format!("{};{}", f.name(), d), p.display_with(var_name)))
        .collect()
}

/// `L(U)` for a single equation.
pub(crate) fn linear_operator(a2: &Increment, u: &Increment, face: Face, k: u8, l: u8) -> Polynomial {
    bracket(a2, u, face, k, l) + bracket(u, a2, face, k, l) - bracket(a2, u, face, l, k) - bracket(u, a2, face, l, k)
}

fn unknowns(target: u32) -> Vec<(Face, u8, Monomial)> {
    component_keys(4)
        .into_iter()
        .flat_map(|(face, dir)| {
            let mut vars: Vec<_> = face.roles(dir).iter().map(Face::var).collect();
            vars.sort();
            monomials_of_degree(&vars, target)
                .into_iter()
                .map(move |m| (face, dir, m))
        })
        .collect()
}

fn build(fam: &MapFamily, target: u32, homogeneous: bool) -> Result<OrderSolveResult, ClassifyError> {
    if fam.n() != 4 {
        return Err(ClassifyError::Unsupported(format!("N = {} (order solve needs N = 4)", fam.n())));
    }
    assert!(target >= 3, "orders start at 3");
    let m = target - 1;
    let a2: Increment = fam.keys().into_iter().map(|(f, d)| ((f, d), fam.part(f, d, 2))).collect();
    let eqs = equations(4);
    let columns = unknowns(target);

    let images: Vec<Vec<Polynomial>> = columns
        .par_iter()
        .map(|(f, d, mono)| {
            let u: Increment = [((*f, *d), Polynomial::term(Rational::from_integer(1.into()), mono.clone()))]
                .into_iter()
                .collect();
            eqs.iter()
                .map(|&(face, k, l)| linear_operator(&a2, &u, face, k, l))
                .collect()
        })
        .collect();

    let forcing: Vec<Polynomial> = if homogeneous {
        vec![Polynomial::zero(); eqs.len()]
    } else {
        let base = fam.with_order(m).with_order(m + 2);
        let report = second_stage_residual(&base, m + 2);
        eqs.iter()
            .map(|&(face, k, l)| report.entry(face, k, l).expect("equation present").slice(m + 2))
            .collect()
    };

    let mut row_index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for e in 0..eqs.len() {
        let monos = images
            .iter()
            .flat_map(|img| img[e].terms().map(|(mono, _)| mono.clone()))
            .chain(forcing[e].terms().map(|(mono, _)| mono.clone()));
        for mono in monos {
            row_index.entry((e, mono)).or_insert(0);
        }
    }
    for (n, slot) in row_index.values_mut().enumerate() {
        *slot = n;
    }

    let mut data = vec![Vec::new(); row_index.len()];
    for (j, img) in images.iter().enumerate() {
        for (e, p) in img.iter().enumerate() {
            for (mono, c) in p.terms() {
                data[row_index[&(e, mono.clone())]].push((j, c.clone()));
            }
        }
    }
    let matrix = RationalMatrix::from_sparse_rows(columns.len(), data);
    let mut rhs = vec![Rational::zero(); row_index.len()];
    for (e, p) in forcing.iter().enumerate() {
        for (mono, c) in p.terms() {
            rhs[row_index[&(e, mono.clone())]] = -c.clone();
        }
    }
    let rows: Vec<((Face, u8, u8), Monomial)> = row_index.keys().map(|(e, mono)| (eqs[*e], mono.clone())).collect();

    let to_increment = |v: &[Rational]| -> Increment {
        let mut inc: Increment = component_keys(4).into_iter().map(|key| (key, Polynomial::zero())).collect();
        for (j, x) in v.iter().enumerate() {
            if !x.is_zero() {
                let (f, d, mono) = &columns[j];
                inc.get_mut(&(*f, *d)).unwrap().add_term(mono.clone(), x.clone());
            }
        }
        inc
    };

    let particular = match solve_particular(&matrix, &rhs) {
        Ok(x) => to_increment(&x),
        Err(bad) => {
            let ((f, k, l), mono) = &rows[bad.row];
            return Err(ClassifyError::Inconsistent {
                target,
                row: format!("{} ({},{}) {}", f.name(), k, l, mono_text(mono)),
            });
        }
    };
    let kernel = matrix.rref().nullspace().iter().map(|v| to_increment(v)).collect();
    Ok(OrderSolveResult {
        target,
        columns,
        rows,
        matrix,
        rhs,
        particular,
        kernel,
    })
}

/// Solves for `A^{(target)}` given the parts of `fam` below `target`.
/// Parts of `fam` at degree `target` and above are ignored.
pub fn solve_order(fam: &MapFamily, target: u32) -> Result<OrderSolveResult, ClassifyError> {
    build(fam, target, false)
}

/// The homogeneous system `L(U) = 0` at `target`.
pub fn solve_homogeneous(fam: &MapFamily, target: u32) -> Result<OrderSolveResult, ClassifyError> {
    build(fam, target, true)
}

/// Starting from `A^{(2)} = x_ik x_jk`, solves each order in turn and fixes
/// the kernel freedom by the gauge slice.
pub fn reconstruct_darboux(max_order: u32) -> Result<MapFamily, ClassifyError> {
    let mut fam = MapFamily::from_generator(4, max_order, |d| {
        if d == 2 {
            Polynomial::var(crate::lattice::role::IK) * Polynomial::var(crate::lattice::role::JK)
        } else {
            Polynomial::zero()
        }
    })?;
    for target in 3..=max_order {
        let m = target - 1;
        let sol = solve_order(&fam, target)?;
        fam = apply_increment(&fam, target, &sol.particular)?;
        let mm = Rational::from_integer(m.into());
        let mut params = KernelParameters::default();
        for face in enumerate_faces(4) {
            let dir = (1..=4).find(|&k| !face.contains(k)).unwrap();
            let c = fam.part(face, dir, target).coefficient_of(&slice_monomial(face, dir, m));
            params.b.insert(face, -c / &mm);
        }
        fam = apply_increment(&fam, target, &kernel_element(&params, m))?;
        for (face, dir) in fam.keys() {
            if !fam.part(face, dir, target).coefficient_of(&slice_monomial(face, dir, m)).is_zero() {
                return Err(GaugeError::SliceUnreachable { face, degree: target }.into());
            }
        }
    }
    Ok(fam)
}
