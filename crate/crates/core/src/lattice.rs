//! Face variables of ℤᴺ, the `MapFamily` data model and its JSON file format.
//!
//! A family stores, for every face `{i,j}` and every direction `k ∉ {i,j}`,
//! the homogeneous parts `A_{ij;k}^{(m)}` (m ≥ 2) of
//! `T_k x_ij = x_ij + Σ_m A_{ij;k}^{(m)}(x_ij, x_ik, x_jk)`.
//! Polynomials are kept over the global face variables; the file format
//! writes them by role (`ij`, `ik`, `jk`) so that a component reads the same
//! wherever it sits.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::exactpoly::{Monomial, Polynomial, TermRecord, Var};

/// Unordered pair `{i,j}` of lattice directions, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    i: u8,
    j: u8,
}

impl Face {
    /// Panics on `a == b` or a zero index; use [`Face::try_new`] for input.
    pub fn new(a: u8, b: u8) -> Face {
        Face::try_new(a, b).unwrap_or_else(|| panic!("invalid face {{{a},{b}}}"))
    }

    pub fn try_new(a: u8, b: u8) -> Option<Face> {
        if a == b || a == 0 || b == 0 {
            return None;
        }
        Some(Face {
            i: a.min(b),
            j: a.max(b),
        })
    }

    pub fn i(&self) -> u8 {
        self.i
    }

    pub fn j(&self) -> u8 {
        self.j
    }

    pub fn contains(&self, k: u8) -> bool {
        self.i == k || self.j == k
    }

    /// Variable token of `x_ij`: the colexicographic rank of the pair, which
    /// does not depend on N.
    pub fn var(&self) -> Var {
        let (i, j) = (self.i as u32, self.j as u32);
        Var((j - 1) * (j - 2) / 2 + (i - 1))
    }

    pub fn from_var(v: Var) -> Option<Face> {
        let mut j = 2u32;
        while (j - 1) * j / 2 <= v.0 {
            j += 1;
        }
        let i = v.0 - (j - 1) * (j - 2) / 2 + 1;
        Face::try_new(u8::try_from(i).ok()?, u8::try_from(j).ok()?)
    }

    pub fn name(&self) -> String {
        format!("x{}{}", self.i, self.j)
    }

    /// The three role variables `(x_ij, x_ik, x_jk)` of the component
    /// `(self, k)`.
    pub fn roles(&self, k: u8) -> [Face; 3] {
        [*self, Face::new(self.i, k), Face::new(self.j, k)]
    }

    /// Parses `"x12"`, `"12"` or `"1,2"`.
    pub fn parse(s: &str) -> Option<Face> {
        let t = s.trim().trim_start_matches('x');
        let digits: Vec<u8> = if t.contains(',') {
            t.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?
        } else {
            t.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect::<Option<_>>()?
        };
        match digits.as_slice() {
            [a, b] => Face::try_new(*a, *b),
            _ => None,
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.i, self.j)
    }
}

/// Canonical (lexicographic) list of the C(N,2) faces.
pub fn enumerate_faces(n: u8) -> Vec<Face> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(Face::new(i, j));
        }
    }
    out
}

/// Every admissible `(face, dir)` pair for dimension `n`.
pub fn component_keys(n: u8) -> Vec<(Face, u8)> {
    enumerate_faces(n)
        .into_iter()
        .flat_map(|f| (1..=n).filter(move |&k| !f.contains(k)).map(move |k| (f, k)))
        .collect()
}

/// Report name of a face variable token, e.g. `x13`.
pub fn var_name(v: Var) -> String {
    Face::from_var(v).map_or_else(|| v.to_string(), |f| f.name())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    #[default]
    Symmetric,
    Skew,
}

/// Role-local variables used when a component is written independently of
/// its position.
pub mod role {
    use crate::exactpoly::Var;

    pub const IJ: Var = Var(1_000_000);
    pub const IK: Var = Var(1_000_001);
    pub const JK: Var = Var(1_000_002);
    pub const ALL: [Var; 3] = [IJ, IK, JK];
    pub const NAMES: [&str; 3] = ["ij", "ik", "jk"];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesComponent {
    pub face: Face,
    pub dir: u8,
    terms: BTreeMap<u32, Polynomial>,
}

impl SeriesComponent {
    pub fn new(face: Face, dir: u8) -> Self {
        assert!(!face.contains(dir), "direction {dir} lies in face {face}");
        Self {
            face,
            dir,
            terms: BTreeMap::new(),
        }
    }

    pub fn role_faces(&self) -> [Face; 3] {
        self.face.roles(self.dir)
    }

    pub fn role_vars(&self) -> [Var; 3] {
        self.role_faces().map(|f| f.var())
    }

    /// `A^{(m)}`, zero if absent.
    pub fn part(&self, m: u32) -> Polynomial {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn parts(&self) -> &BTreeMap<u32, Polynomial> {
        &self.terms
    }

    /// Stores `A^{(m)}` without validation; callers inside the crate only.
    pub(crate) fn set_part_unchecked(&mut self, m: u32, p: Polynomial) {
        if p.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, p);
        }
    }

    /// `x_ij + Σ_{2 ≤ m ≤ max_degree} A^{(m)}`.
    pub fn series(&self, max_degree: u32) -> Polynomial {
        let mut s = Polynomial::var(self.face.var());
        for (_, p) in self.terms.range(..=max_degree) {
            s += p.clone();
        }
        s
    }

    /// All parts summed and rewritten in role variables.
    pub fn to_roles(&self) -> Polynomial {
        let [a, b, c] = self.role_vars();
        let mut s = Polynomial::zero();
        for p in self.terms.values() {
            s += p.rename(|v| {
                if v == a {
                    role::IJ
                } else if v == b {
                    role::IK
                } else if v == c {
                    role::JK
                } else {
                    v
                }
            });
        }
        s
    }

    /// Moves a role-variable polynomial onto this component's variables.
    pub fn from_roles_poly(&self, p: &Polynomial) -> Polynomial {
        let [a, b, c] = self.role_vars();
        p.rename(|v| match v {
            role::IJ => a,
            role::IK => b,
            role::JK => c,
            other => other,
        })
    }

    fn check_part(&self, m: u32, p: &Polynomial, order: u32) -> Result<(), LatticeError> {
        let vars = self.role_vars();
        for (mono, _) in p.terms() {
            let bad = |reason: &str| LatticeError::Validation {
                face: self.face.name(),
                dir: self.dir,
                degree: mono.degree(),
                monomial: Polynomial::term(num_traits::One::one(), mono.clone())
                    .display_with(var_name),
                reason: reason.to_string(),
            };
            if mono.degree() != m {
                return Err(bad("not homogeneous of the declared degree"));
            }
            if m < 2 {
                return Err(bad("degree 0 and 1 terms are not allowed"));
            }
            if m > order {
                return Err(bad("degree exceeds the truncation order"));
            }
            if mono.vars().any(|v| !vars.contains(&v)) {
                return Err(bad("variable outside {x_ij, x_ik, x_jk}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapFamily {
    n: u8,
    order: u32,
    symmetry: Symmetry,
    components: BTreeMap<(Face, u8), SeriesComponent>,
}

impl MapFamily {
    /// `T_k x_ij = x_ij` truncated at `order`.
    pub fn identity(n: u8, order: u32) -> Self {
        assert!(n >= 3, "need at least three directions");
        Self {
            n,
            order,
            symmetry: Symmetry::Symmetric,
            components: component_keys(n)
                .into_iter()
                .map(|(f, k)| ((f, k), SeriesComponent::new(f, k)))
                .collect(),
        }
    }

    /// Applies the same role-variable generator to every component;
    /// `generator(m)` gives `A^{(m)}(ij, ik, jk)` in [`role`] variables.
    pub fn from_generator<F>(n: u8, order: u32, generator: F) -> Result<Self, LatticeError>
    where
        F: Fn(u32) -> Polynomial,
    {
        let mut fam = Self::identity(n, order);
        for m in 2..=order {
            let g = generator(m);
            if g.is_zero() {
                continue;
            }
            for key in fam.keys() {
                let c = &fam.components[&key];
                let p = c.from_roles_poly(&g);
                fam.set_part(key.0, key.1, m, p)?;
            }
        }
        Ok(fam)
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn set_symmetry(&mut self, s: Symmetry) {
        self.symmetry = s;
    }

    pub fn keys(&self) -> Vec<(Face, u8)> {
        self.components.keys().copied().collect()
    }

    pub fn components(&self) -> impl Iterator<Item = &SeriesComponent> {
        self.components.values()
    }

    pub fn component(&self, face: Face, dir: u8) -> &SeriesComponent {
        self.components
            .get(&(face, dir))
            .unwrap_or_else(|| panic!("no component ({face}, {dir})"))
    }

    /// `A_{face;dir}^{(m)}`.
    pub fn part(&self, face: Face, dir: u8, m: u32) -> Polynomial {
        self.component(face, dir).part(m)
    }

    /// Validated write of one homogeneous part.
    pub fn set_part(&mut self, face: Face, dir: u8, m: u32, p: Polynomial) -> Result<(), LatticeError> {
        let order = self.order;
        let c = self
            .components
            .get_mut(&(face, dir))
            .ok_or_else(|| LatticeError::Validation {
                face: face.name(),
                dir,
                degree: m,
                monomial: String::new(),
                reason: "not an admissible (face, direction) pair".into(),
            })?;
        c.check_part(m, &p, order)?;
        c.set_part_unchecked(m, p);
        Ok(())
    }

    pub fn add_to_part(&mut self, face: Face, dir: u8, m: u32, p: Polynomial) -> Result<(), LatticeError> {
        let cur = self.part(face, dir, m);
        self.set_part(face, dir, m, cur + p)
    }

    /// Same maps, truncated (or padded with zeros) at a new order.
    pub fn with_order(&self, order: u32) -> Self {
        let mut out = self.clone();
        out.order = order;
        for c in out.components.values_mut() {
            c.terms.retain(|&m, _| m <= order);
        }
        out
    }

    /// Relabels directions by `perm` (a permutation of `1..=n`, given as
    /// `perm[d-1]`).
    pub fn permuted(&self, perm: &[u8]) -> Self {
        assert_eq!(perm.len(), self.n as usize);
        let map_face = |f: Face| Face::new(perm[f.i as usize - 1], perm[f.j as usize - 1]);
        let map_var = |v: Var| Face::from_var(v).map_or(v, |f| map_face(f).var());
        let mut out = Self::identity(self.n, self.order);
        out.symmetry = self.symmetry;
        for c in self.components.values() {
            let key = (map_face(c.face), perm[c.dir as usize - 1]);
            let dst = out.components.get_mut(&key).expect("permutation keeps admissibility");
            for (&m, p) in &c.terms {
                dst.set_part_unchecked(m, p.rename(map_var));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        for key in component_keys(self.n) {
            if !self.components.contains_key(&key) {
                return Err(LatticeError::Validation {
                    face: key.0.name(),
                    dir: key.1,
                    degree: 0,
                    monomial: String::new(),
                    reason: "missing component".into(),
                });
            }
        }
        for c in self.components.values() {
            for (&m, p) in &c.terms {
                c.check_part(m, p, self.order)?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = FamilyFile {
            n: self.n,
            order: self.order,
            symmetry: self.symmetry,
            components: self
                .components
                .values()
                .map(|c| ComponentFile {
                    face: [c.face.i, c.face.j],
                    dir: c.dir,
                    terms: c
                        .to_roles()
                        .to_records(|v| role_name(v).unwrap_or("?").to_string()),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("family serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, LatticeError> {
        let file: FamilyFile =
            serde_json::from_str(text).map_err(|e| LatticeError::Parse(e.to_string()))?;
        if file.n < 3 {
            return Err(LatticeError::Parse(format!("n = {} is too small", file.n)));
        }
        let mut fam = Self::identity(file.n, file.order);
        fam.symmetry = file.symmetry;
        let mut seen = std::collections::BTreeSet::new();
        for cf in &file.components {
            let [a, b] = cf.face;
            let face = Face::try_new(a, b)
                .filter(|f| f.j <= file.n)
                .ok_or_else(|| LatticeError::Parse(format!("bad face [{a},{b}]")))?;
            if cf.dir == 0 || cf.dir > file.n || face.contains(cf.dir) {
                return Err(LatticeError::Parse(format!("bad direction {} for face {face}", cf.dir)));
            }
            if !seen.insert((face, cf.dir)) {
                return Err(LatticeError::Parse(format!("duplicate component ({face}, {})", cf.dir)));
            }
            let comp = &fam.components[&(face, cf.dir)];
            let roles = comp.role_faces();
            let mut poly = Polynomial::zero();
            let mut monos = std::collections::BTreeSet::new();
            for rec in &cf.terms {
                let mut pairs = Vec::new();
                for (key, &e) in &rec.exponents {
                    let v = match role::NAMES.iter().position(|r| r == key) {
                        Some(idx) => roles[idx].var(),
                        None => Face::parse(key)
                            .filter(|f| f.j <= file.n)
                            .ok_or_else(|| LatticeError::Parse(format!("unknown variable `{key}`")))?
                            .var(),
                    };
                    pairs.push((v, e));
                }
                let mono = Monomial::from_pairs(pairs);
                if !monos.insert(mono.clone()) {
                    return Err(LatticeError::Parse(format!(
                        "repeated monomial in component ({face}, {})",
                        cf.dir
                    )));
                }
                poly.add_term(mono, rec.coeff.clone());
            }
            let degrees: std::collections::BTreeSet<u32> = poly.terms().map(|(m, _)| m.degree()).collect();
            for d in degrees {
                fam.set_part(face, cf.dir, d, poly.homogeneous_part(d))?;
            }
        }
        fam.validate()?;
        Ok(fam)
    }
}

fn role_name(v: Var) -> Option<&'static str> {
    role::ALL.iter().position(|&r| r == v).map(|i| role::NAMES[i])
}

#[derive(Debug, Serialize, Deserialize)]
struct FamilyFile {
    n: u8,
    order: u32,
    #[serde(default)]
    symmetry: Symmetry,
    components: Vec<ComponentFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ComponentFile {
    face: [u8; 2],
    dir: u8,
    #[serde(default)]
    terms: Vec<TermRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid component (face {face}, dir {dir}) at degree {degree}, monomial {monomial}: {reason}")]
    Validation {
        face: String,
        dir: u8,
        degree: u32,
        monomial: String,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn load_map_family(path: &Path) -> Result<MapFamily, LatticeError> {
    let text = std::fs::read_to_string(path)?;
    MapFamily::from_json(&text)
}

pub fn save_map_family(fam: &MapFamily, path: &Path) -> Result<(), LatticeError> {
    std::fs::write(path, fam.to_json())?;
    Ok(())
}

/// Values of the face variables at one vertex. In skew mode only `i < j`
/// is stored and `x_ji` reads as `-x_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointState<S> {
    pub symmetry: Symmetry,
    pub values: BTreeMap<Face, S>,
}

impl<S: Clone + std::ops::Neg<Output = S>> PointState<S> {
    pub fn new(symmetry: Symmetry, values: BTreeMap<Face, S>) -> Self {
        Self { symmetry, values }
    }

    /// `x_ab` with the orientation given by the argument order.
    pub fn get(&self, a: u8, b: u8) -> S {
        let v = self.values[&Face::new(a, b)].clone();
        match self.symmetry {
            Symmetry::Skew if a > b => -v,
            _ => v,
        }
    }
}
