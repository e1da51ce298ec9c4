//! The residual engine. Shifts act on the 4D cube as truncated series
//! substitutions, and the six conditions `T_ℓ(T_k x_ij) = T_k(T_ℓ x_ij)` are
//! compared degree by degree.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::exactpoly::{Polynomial, TermRecord, Var};
use crate::lattice::{component_keys, enumerate_faces, var_name, Face, MapFamily, PointState};
use crate::maps::{eval_closed_form, ClosedFormMap, DomainError, Scalar};

/// `T_k x_ij` for every face `{i,j}` not containing `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftImage {
    pub dir: u8,
    pub images: BTreeMap<Face, Polynomial>,
}

/// First-stage images at the family's own order.
pub fn first_stage(fam: &MapFamily) -> BTreeMap<u8, ShiftImage> {
    first_stage_at(fam, fam.order())
}

pub fn first_stage_at(fam: &MapFamily, max_degree: u32) -> BTreeMap<u8, ShiftImage> {
    let mut out: BTreeMap<u8, ShiftImage> = BTreeMap::new();
    for (face, k) in component_keys(fam.n()) {
        out.entry(k)
            .or_insert_with(|| ShiftImage {
                dir: k,
                images: BTreeMap::new(),
            })
            .images
            .insert(face, fam.component(face, k).series(max_degree));
    }
    out
}

/// One consistency condition: face `{i,j}`, directions `k < ℓ`, and the
/// homogeneous parts of `T_ℓ(T_k x_ij) − T_k(T_ℓ x_ij)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualEntry {
    pub face: Face,
    pub k: u8,
    pub l: u8,
    pub by_degree: BTreeMap<u32, Polynomial>,
}

impl ResidualEntry {
    pub fn is_zero(&self) -> bool {
        self.by_degree.values().all(Polynomial::is_zero)
    }

    pub fn first_nonzero_degree(&self) -> Option<u32> {
        self.by_degree
            .iter()
            .find(|(_, p)| !p.is_zero())
            .map(|(&d, _)| d)
    }

    pub fn slice(&self, d: u32) -> Polynomial {
        self.by_degree.get(&d).cloned().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualReport {
    pub n: u8,
    pub max_degree: u32,
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ResidualEntry::is_zero)
    }

    /// Lowest failing degree and the first equation failing there.
    pub fn first_failure(&self) -> Option<(u32, &ResidualEntry)> {
        self.entries
            .iter()
            .filter_map(|e| e.first_nonzero_degree().map(|d| (d, e)))
            .min_by_key(|(d, _)| *d)
    }

    /// Largest `d` such that all residual slices of degree ≤ d vanish.
    pub fn consistent_up_to(&self) -> u32 {
        match self.first_failure() {
            Some((d, _)) => d - 1,
            None => self.max_degree,
        }
    }

    pub fn entry(&self, face: Face, k: u8, l: u8) -> Option<&ResidualEntry> {
        self.entries
            .iter()
            .find(|e| e.face == face && e.k == k && e.l == l)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Slice {
            degree: u32,
            zero: bool,
            terms: Vec<TermRecord>,
        }
        #[derive(Serialize)]
        struct Equation {
            face: String,
            pair: [u8; 2],
            degrees: Vec<Slice>,
        }
        #[derive(Serialize)]
        struct Report {
            verdict: &'static str,
            n: u8,
            max_degree: u32,
            consistent_up_to: u32,
            first_failure: Option<Failure>,
            equations: Vec<Equation>,
        }
        #[derive(Serialize)]
        struct Failure {
            degree: u32,
            face: String,
            pair: [u8; 2],
        }
        let report = Report {
            verdict: if self.is_zero() { "consistent" } else { "inconsistent" },
            n: self.n,
            max_degree: self.max_degree,
            consistent_up_to: self.consistent_up_to(),
            first_failure: self.first_failure().map(|(d, e)| Failure {
                degree: d,
                face: e.face.name(),
                pair: [e.k, e.l],
            }),
            equations: self
                .entries
                .iter()
                .map(|e| Equation {
                    face: e.face.name(),
                    pair: [e.k, e.l],
                    degrees: e
                        .by_degree
                        .iter()
                        .map(|(&d, p)| Slice {
                            degree: d,
                            zero: p.is_zero(),
                            terms: p.to_records(var_name),
                        })
                        .collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    }
}

/// All `(face, k, ℓ)` with `k < ℓ` outside the face. Six for N = 4.
pub fn equations(n: u8) -> Vec<(Face, u8, u8)> {
    let mut out = Vec::new();
    for face in enumerate_faces(n) {
        for k in 1..=n {
            for l in k + 1..=n {
                if !face.contains(k) && !face.contains(l) {
                    out.push((face, k, l));
                }
            }
        }
    }
    out
}

/// `T_b(T_a x_ij)`: substitute the `b`-shift images into `T_a x_ij`.
fn double_shift(
    images: &BTreeMap<u8, ShiftImage>,
    face: Face,
    a: u8,
    b: u8,
    max_degree: u32,
) -> Polynomial {
    let inner = &images[&a].images[&face];
    let outer = &images[&b].images;
    let assignment: BTreeMap<Var, Polynomial> = face
        .roles(a)
        .iter()
        .map(|f| (f.var(), outer[f].clone()))
        .collect();
    inner
        .subst(&assignment, max_degree)
        .expect("shift images cover every role variable")
}

/// Residuals of the consistency conditions up to total degree `max_degree`.
/// Parts of the family above its order are treated as zero; `max_degree` may
/// exceed the family order.
pub fn second_stage_residual(fam: &MapFamily, max_degree: u32) -> ResidualReport {
    let images = first_stage_at(fam, max_degree);
    let entries = equations(fam.n())
        .into_par_iter()
        .map(|(face, k, l)| {
            let lk = double_shift(&images, face, k, l, max_degree);
            let kl = double_shift(&images, face, l, k, max_degree);
            let diff = lk - kl;
            let by_degree = (2..=max_degree)
                .map(|d| (d, diff.homogeneous_part(d)))
                .collect();
            debug_assert!(diff.truncate(1).is_zero());
            ResidualEntry {
                face,
                k,
                l,
                by_degree,
            }
        })
        .collect();
    ResidualReport {
        n: fam.n(),
        max_degree,
        entries,
    }
}

pub fn residual_is_zero(report: &ResidualReport) -> bool {
    report.is_zero()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericResidual<S> {
    pub face: Face,
    pub k: u8,
    pub l: u8,
    /// `|T_ℓ T_k x_ij − T_k T_ℓ x_ij|`
    pub value: S,
    /// `max(1, |T_ℓ T_k x_ij|, |T_k T_ℓ x_ij|)`, for relative comparisons
    pub scale: f64,
}

/// Evaluates both orders of shifts of a closed-form map on the 4D cube at
/// `state` (N = 4) and returns the six absolute differences.
pub fn numeric_residual<S: Scalar>(
    map: ClosedFormMap,
    state: &PointState<S>,
) -> Result<Vec<NumericResidual<S>>, DomainError> {
    let n = 4u8;
    let mut shifted: BTreeMap<u8, PointState<S>> = BTreeMap::new();
    for k in 1..=n {
        let mut values = BTreeMap::new();
        for face in enumerate_faces(n).into_iter().filter(|f| !f.contains(k)) {
            values.insert(face, eval_closed_form(map, face.i(), face.j(), k, state)?);
        }
        shifted.insert(k, PointState::new(map.symmetry(), values));
    }
    let mut out = Vec::new();
    for (face, k, l) in equations(n) {
        let lk = eval_closed_form(map, face.i(), face.j(), l, &shifted[&k])?;
        let kl = eval_closed_form(map, face.i(), face.j(), k, &shifted[&l])?;
        let scale = lk.magnitude().max(kl.magnitude()).max(1.0);
        out.push(NumericResidual {
            face,
            k,
            l,
            value: (lk - kl).abs(),
            scale,
        });
    }
    Ok(out)
}

/// First-stage value table of a closed-form map, `T_k x_ij` keyed by
/// `(face, k)`.
pub fn numeric_first_stage<S: Scalar>(
    map: ClosedFormMap,
    state: &PointState<S>,
) -> Result<BTreeMap<(Face, u8), S>, DomainError> {
    component_keys(4)
        .into_iter()
        .map(|(f, k)| eval_closed_form(map, f.i(), f.j(), k, state).map(|v| ((f, k), v)))
        .collect()
}

/// Exact state helper for tests and the CLI: all six faces from a slice in
/// canonical face order.
pub fn state_from_slice<S: Scalar>(map: ClosedFormMap, vals: &[S]) -> PointState<S> {
    assert_eq!(vals.len(), 6);
    PointState::new(
        map.symmetry(),
        enumerate_faces(4).into_iter().zip(vals.iter().cloned()).collect(),
    )
}
