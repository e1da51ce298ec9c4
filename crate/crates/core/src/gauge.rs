//! Admissible changes of variables and the canonical gauge slice.
//!
//! A [`GaugeTransformation`] is a coordinate-wise substitution
//! `x_ij ↦ h_ij(x_ij) = c_ij·(x_ij + Σ_m b_ij^{(m)} x_ij^m)`. Conjugating a
//! family replaces each map `Φ` by `h⁻¹ ∘ Φ ∘ h`; in particular the point
//! substitution `x_ij ↦ x_ij + b_ij x_ij^m` shifts `A_{ij;k}^{(m+1)}` of a
//! branch-I family by `x_ik x_jk(−m b_ij x_ij^{m−1} + b_ik x_ik^{m−1} + b_jk x_jk^{m−1})`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactpoly::rational::{self, Rational};
use crate::exactpoly::{Monomial, Polynomial, UnivariateSeries, Var};
use crate::lattice::{component_keys, Face, LatticeError, MapFamily};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GaugeTransformation {
    /// `c_ij`; faces not listed have `c_ij = 1`.
    pub scalings: BTreeMap<Face, Rational>,
    /// `b_ij^{(m)}` for `m ≥ 2`.
    pub point: BTreeMap<Face, BTreeMap<u32, Rational>>,
}

#[derive(Debug, thiserror::Error)]
pub enum GaugeError {
    #[error("scaling for face {0} is zero")]
    ZeroScaling(Face),
    #[error("leading term of component ({face}, {dir}) is not x_ik*x_jk")]
    BranchMismatch { face: Face, dir: u8 },
    #[error("gauge slice cannot be reached at degree {degree}: components of face {face} disagree")]
    SliceUnreachable { face: Face, degree: u32 },
    #[error("malformed gauge description: {0}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl GaugeTransformation {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn with_scaling(mut self, face: Face, c: Rational) -> Self {
        self.scalings.insert(face, c);
        self
    }

    pub fn with_point_term(mut self, face: Face, m: u32, b: Rational) -> Self {
        assert!(m >= 2, "point terms start at degree 2");
        if !b.is_zero() {
            self.point.entry(face).or_default().insert(m, b);
        }
        self
    }

    /// `x_ij ↦ x_ij + b_ij x_ij^m` on every face in `b`.
    pub fn point_shift(b: &BTreeMap<Face, Rational>, m: u32) -> Self {
        b.iter()
            .fold(Self::identity(), |g, (&f, c)| g.with_point_term(f, m, c.clone()))
    }

    pub fn scaling(&self, face: Face) -> Rational {
        self.scalings.get(&face).cloned().unwrap_or_else(Rational::one)
    }

    pub fn is_identity(&self) -> bool {
        self.scalings.values().all(One::is_one) && self.point.values().all(BTreeMap::is_empty)
    }

    fn faces(&self) -> std::collections::BTreeSet<Face> {
        self.scalings.keys().chain(self.point.keys()).copied().collect()
    }

    /// The substitution series `h_ij`, truncated at `order`.
    pub fn substitution(&self, face: Face, order: u32) -> UnivariateSeries {
        let c = self.scaling(face);
        let mut coeffs = vec![(1, c.clone())];
        if let Some(p) = self.point.get(&face) {
            coeffs.extend(p.iter().map(|(&m, b)| (m, b * &c)));
        }
        UnivariateSeries::from_coeffs(order, coeffs)
    }

    fn from_substitutions(subs: BTreeMap<Face, UnivariateSeries>) -> Self {
        let mut g = Self::identity();
        for (face, h) in subs {
            let c = h.coeff(1);
            if !c.is_one() {
                g.scalings.insert(face, c.clone());
            }
            for (&m, a) in h.coeffs().range(2..) {
                g = g.with_point_term(face, m, a / &c);
            }
        }
        g
    }

    /// The transformation equal to conjugating by `self` and then by `next`
    /// (substitution series `h_self ∘ h_next`), truncated at `order`.
    pub fn then(&self, next: &GaugeTransformation, order: u32) -> GaugeTransformation {
        let faces: std::collections::BTreeSet<Face> = self.faces().union(&next.faces()).copied().collect();
        let subs = faces
            .into_iter()
            .map(|f| {
                let h = self
                    .substitution(f, order)
                    .compose(&next.substitution(f, order), order);
                (f, h)
            })
            .collect();
        Self::from_substitutions(subs)
    }

    /// Inverse transformation up to `order`.
    pub fn inverse(&self, order: u32) -> Result<GaugeTransformation, GaugeError> {
        self.check()?;
        let subs = self
            .faces()
            .into_iter()
            .map(|f| {
                let r = self
                    .substitution(f, order)
                    .reversion(order)
                    .expect("nonzero scaling");
                (f, r)
            })
            .collect();
        Ok(Self::from_substitutions(subs))
    }

    fn check(&self) -> Result<(), GaugeError> {
        match self.scalings.iter().find(|(_, c)| c.is_zero()) {
            Some((&f, _)) => Err(GaugeError::ZeroScaling(f)),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        let file = GaugeFile {
            scalings: self
                .scalings
                .iter()
                .map(|(f, c)| (face_key(f), rational::to_text(c)))
                .collect(),
            point: self
                .point
                .iter()
                .filter(|(_, p)| !p.is_empty())
                .map(|(f, p)| {
                    (
                        face_key(f),
                        p.iter().map(|(m, b)| (m.to_string(), rational::to_text(b))).collect(),
                    )
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("gauge serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, GaugeError> {
        let file: GaugeFile = serde_json::from_str(text).map_err(|e| GaugeError::Parse(e.to_string()))?;
        let face = |k: &str| Face::parse(k).ok_or_else(|| GaugeError::Parse(format!("bad face `{k}`")));
        let num = |s: &str| rational::parse(s).map_err(|e| GaugeError::Parse(e.to_string()));
        let mut g = Self::identity();
        for (k, c) in &file.scalings {
            g.scalings.insert(face(k)?, num(c)?);
        }
        for (k, terms) in &file.point {
            let f = face(k)?;
            for (m, b) in terms {
                let m: u32 = m
                    .parse()
                    .ok()
                    .filter(|&m| m >= 2)
                    .ok_or_else(|| GaugeError::Parse(format!("bad degree `{m}`")))?;
                g = g.with_point_term(f, m, num(b)?);
            }
        }
        g.check()?;
        Ok(g)
    }
}

fn face_key(f: &Face) -> String {
    format!("{}{}", f.i(), f.j())
}

#[derive(Debug, Serialize, Deserialize)]
struct GaugeFile {
    #[serde(default)]
    scalings: BTreeMap<String, String>,
    #[serde(default)]
    point: BTreeMap<String, BTreeMap<String, String>>,
}

/// `Σ_n r_n p^n`, truncated.
fn apply_series(r: &UnivariateSeries, p: &Polynomial, order: u32) -> Polynomial {
    let v = Var(u32::MAX);
    let assignment = [(v, p.clone())].into_iter().collect();
    r.to_polynomial(v)
        .subst(&assignment, order)
        .expect("single variable assigned")
}

/// The family of `h⁻¹ ∘ Φ ∘ h`, truncated at the family order.
pub fn conjugate(fam: &MapFamily, g: &GaugeTransformation) -> Result<MapFamily, GaugeError> {
    g.check()?;
    let order = fam.order();
    if g.is_identity() {
        return Ok(fam.clone());
    }
    let faces = crate::lattice::enumerate_faces(fam.n());
    let subs: BTreeMap<Var, Polynomial> = faces
        .iter()
        .map(|f| (f.var(), g.substitution(*f, order).to_polynomial(f.var())))
        .collect();
    let inverses: BTreeMap<Face, UnivariateSeries> = faces
        .iter()
        .map(|f| {
            let r = g.substitution(*f, order).reversion(order).expect("checked invertible");
            (*f, r)
        })
        .collect();
    let mut out = MapFamily::identity(fam.n(), order);
    out.set_symmetry(fam.symmetry());
    for c in fam.components() {
        let pulled = c
            .series(order)
            .subst(&subs, order)
            .expect("face variables all assigned");
        let image = apply_series(&inverses[&c.face], &pulled, order);
        debug_assert_eq!(image.truncate(1), Polynomial::var(c.face.var()));
        for m in 2..=order {
            let part = image.homogeneous_part(m);
            if !part.is_zero() {
                out.set_part(c.face, c.dir, m, part)?;
            }
        }
    }
    Ok(out)
}

/// One constant `b_ij` per face.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KernelParameters {
    pub b: BTreeMap<Face, Rational>,
}

impl KernelParameters {
    pub fn get(&self, f: Face) -> Rational {
        self.b.get(&f).cloned().unwrap_or_else(Rational::zero)
    }

    /// Unit vector `b_face = 1`.
    pub fn unit(face: Face) -> Self {
        Self {
            b: [(face, Rational::one())].into_iter().collect(),
        }
    }
}

/// Degree-(m+1) polynomials added to each component, keyed by `(face, dir)`.
pub type Increment = BTreeMap<(Face, u8), Polynomial>;

/// `x_ik x_jk (m b_ij x_ij^{m−1} − b_ik x_ik^{m−1} − b_jk x_jk^{m−1})` on all
/// twelve components.
pub fn kernel_element(params: &KernelParameters, m: u32) -> Increment {
    assert!(m >= 2, "kernel elements start at m = 2");
    let mm = Rational::from_integer(m.into());
    component_keys(4)
        .into_iter()
        .map(|(face, k)| {
            let [fij, fik, fjk] = face.roles(k);
            let (xij, xik, xjk) = (fij.var(), fik.var(), fjk.var());
            let base = Monomial::from_pairs([(xik, 1), (xjk, 1)]);
            let mut p = Polynomial::zero();
            p.add_term(base.mul(&Monomial::power(xij, m - 1)), &mm * params.get(fij));
            p.add_term(base.mul(&Monomial::power(xik, m - 1)), -params.get(fik));
            p.add_term(base.mul(&Monomial::power(xjk, m - 1)), -params.get(fjk));
            ((face, k), p)
        })
        .collect()
}

/// Adds an increment to the degree-`degree` parts of a family.
pub fn apply_increment(fam: &MapFamily, degree: u32, inc: &Increment) -> Result<MapFamily, LatticeError> {
    let mut out = fam.clone();
    for (&(face, dir), p) in inc {
        out.add_to_part(face, dir, degree, p.clone())?;
    }
    Ok(out)
}

/// The monomial `x_ij^{m−1} x_ik x_jk` whose coefficient in `A_{ij;k}^{(m+1)}`
/// the gauge slice sets to zero.
pub fn slice_monomial(face: Face, dir: u8, m: u32) -> Monomial {
    let [fij, fik, fjk] = face.roles(dir);
    Monomial::from_pairs([(fij.var(), m - 1), (fik.var(), 1), (fjk.var(), 1)])
}

/// Whether the leading parts are exactly `x_ik x_jk` everywhere.
pub fn check_branch_i_leading(fam: &MapFamily) -> Result<(), GaugeError> {
    for c in fam.components() {
        let [_, fik, fjk] = c.role_faces();
        let want = Polynomial::var(fik.var()) * Polynomial::var(fjk.var());
        if c.part(2) != want {
            return Err(GaugeError::BranchMismatch {
                face: c.face,
                dir: c.dir,
            });
        }
    }
    Ok(())
}

/// Gauge-equivalent family with zero coefficient on `x_ij^{m−1}x_ik x_jk` in
/// every `A_{ij;k}^{(m+1)}`, plus the transformation that produces it.
/// Eliminates `b_ij^{(m)}` order by order, m = 2, 3, … .
pub fn normal_form(fam: &MapFamily) -> Result<(MapFamily, GaugeTransformation), GaugeError> {
    check_branch_i_leading(fam)?;
    let order = fam.order();
    let mut cur = fam.clone();
    let mut total = GaugeTransformation::identity();
    for m in 2..order {
        let mm = Rational::from_integer(m.into());
        let mut b = BTreeMap::new();
        for face in crate::lattice::enumerate_faces(fam.n()) {
            let dir = (1..=fam.n()).find(|&k| !face.contains(k)).expect("n ≥ 3");
            let c = cur.part(face, dir, m + 1).coefficient_of(&slice_monomial(face, dir, m));
            if !c.is_zero() {
                b.insert(face, c / &mm);
            }
        }
        if !b.is_empty() {
            let g = GaugeTransformation::point_shift(&b, m);
            cur = conjugate(&cur, &g)?;
            total = total.then(&g, order);
        }
        for c in cur.components() {
            if !c.part(m + 1).coefficient_of(&slice_monomial(c.face, c.dir, m)).is_zero() {
                return Err(GaugeError::SliceUnreachable {
                    face: c.face,
                    degree: m + 1,
                });
            }
        }
    }
    Ok((cur, total))
}
