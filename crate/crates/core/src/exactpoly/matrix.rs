//! Exact linear algebra over ℚ with sparse row storage.
//!
//! Row reduction is incremental: rows are taken in order, reduced against the
//! pivots found so far, and a surviving row contributes a new pivot at its
//! first nonzero column. The pivot rows are kept fully reduced, so the result
//! is the (unique) reduced row-echelon form.

use num_traits::Zero;

use super::rational::Rational;

type SparseRow = Vec<(usize, Rational)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow>,
}

/// Result of `solve_particular` when the right-hand side is not in the
/// column space. `row` is the first input row that contradicts the rows
/// before it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent linear system (row {row} contradicts earlier rows)")]
pub struct Inconsistent {
    pub row: usize,
}

#[derive(Debug, Clone)]
pub struct Rref {
    /// Pivot rows, each normalized to 1 at its pivot, sorted by pivot column.
    pub rows: Vec<SparseRow>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::from_integer(1.into()));
        }
        m
    }

    pub fn from_dense(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged dense matrix");
            m.data[i] = r
                .into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .collect();
        }
        m
    }

    pub fn from_sparse_rows(cols: usize, data: Vec<SparseRow>) -> Self {
        let mut m = Self::zeros(data.len(), cols);
        for (i, row) in data.into_iter().enumerate() {
            for (j, x) in row {
                m.add_to(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        match self.data[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |e| e.0) {
            Ok(k) if x.is_zero() => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = x,
            Err(_) if x.is_zero() => {}
            Err(k) => row.insert(k, (j, x)),
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, x: Rational) {
        let cur = self.get(i, j);
        self.set(i, j, cur + x);
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Rational::zero(), |acc, (j, x)| acc + x * &v[*j])
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn rref(&self) -> Rref {
        let mut r = Rref {
            rows: Vec::new(),
            pivots: Vec::new(),
            cols: self.cols,
        };
        for row in &self.data {
            r.absorb(row.clone());
        }
        r
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }
}

impl Rref {
    /// Reduces `row` against the current pivots; returns the remainder.
    fn reduce(&self, mut row: SparseRow) -> SparseRow {
        for (p, prow) in self.pivots.iter().zip(&self.rows) {
            if let Ok(k) = row.binary_search_by_key(p, |e| e.0) {
                let f = row[k].1.clone();
                row = axpy(&row, &f, prow);
            }
        }
        row
    }

    /// Adds a row; returns whether it increased the rank.
    fn absorb(&mut self, row: SparseRow) -> bool {
        let rem = self.reduce(row);
        let Some((p, lead)) = rem.first().cloned() else {
            return false;
        };
        let inv = lead.recip();
        let rem: SparseRow = rem.into_iter().map(|(j, x)| (j, x * &inv)).collect();
        for prow in &mut self.rows {
            if let Ok(k) = prow.binary_search_by_key(&p, |e| e.0) {
                let f = prow[k].1.clone();
                *prow = axpy(prow, &f, &rem);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, rem);
        true
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the kernel: one vector per free column, with 1 at that column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::from_integer(1.into());
            for (p, row) in self.pivots.iter().zip(&self.rows) {
                if let Ok(k) = row.binary_search_by_key(&free, |e| e.0) {
                    v[*p] = -row[k].1.clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// `row - f·other`, both sorted sparse rows.
fn axpy(row: &[(usize, Rational)], f: &Rational, other: &[(usize, Rational)]) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < other.len() {
        let take_row = j >= other.len() || (i < row.len() && row[i].0 < other[j].0);
        let take_other = i >= row.len() || (j < other.len() && other[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_other {
            out.push((other[j].0, -(f * &other[j].1)));
            j += 1;
        } else {
            let x = &row[i].1 - f * &other[j].1;
            if !x.is_zero() {
                out.push((row[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Exact kernel basis; `cols - rank` vectors, empty iff the kernel is trivial.
pub fn nullspace(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    m.rref().nullspace()
}

/// Some exact `x` with `m·x = rhs`, free variables set to zero.
pub fn solve_particular(m: &RationalMatrix, rhs: &[Rational]) -> Result<Vec<Rational>, Inconsistent> {
    assert_eq!(rhs.len(), m.rows(), "rhs length must equal row count");
    let n = m.cols();
    // augmented column n carries the right-hand side
    let mut r = Rref {
        rows: Vec::new(),
        pivots: Vec::new(),
        cols: n + 1,
    };
    for (i, (row, b)) in m.data.iter().zip(rhs).enumerate() {
        let mut aug = row.clone();
        if !b.is_zero() {
            aug.push((n, b.clone()));
        }
        r.absorb(aug);
        if r.pivots.last() == Some(&n) {
            return Err(Inconsistent { row: i });
        }
    }
    let mut x = vec![Rational::zero(); n];
    for (p, row) in r.pivots.iter().zip(&r.rows) {
        if let Some((j, b)) = row.last() {
            if *j == n {
                x[*p] = b.clone();
            }
        }
    }
    Ok(x)
}
