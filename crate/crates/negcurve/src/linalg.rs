//! Exact sparse linear algebra over the rationals.
//!
//! Everything downstream (cocycle quotients, section modules, duals) reduces
//! to ranks and nullspaces of sparse matrices with `BigRational` entries.
//! Elimination is plain rational Gaussian elimination with sparse rows; rows
//! are kept sorted by column and never store zeros.

use std::collections::BTreeMap;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Convenience constructor, mostly for tests: `rat(-2, 5)` is `-2/5`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

/// A sparse row: entries sorted by column index, no stored zeros.
pub type SparseRow = Vec<(usize, Rat)>;

/// `dst += c * src`, merging sorted sparse rows.
pub fn row_add_scaled(dst: &SparseRow, src: &SparseRow, c: &Rat) -> SparseRow {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        match (dst.get(i), src.get(j)) {
            (Some((ci, vi)), Some((cj, vj))) if ci == cj => {
                let v = vi + &(c * vj);
                if !v.is_zero() {
                    out.push((*ci, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ci, vi)), Some((cj, _))) if ci < cj => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (Some(_), Some((cj, vj))) => {
                out.push((*cj, c * vj));
                j += 1;
            }
            (Some((ci, vi)), None) => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (None, Some((cj, vj))) => {
                out.push((*cj, c * vj));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn row_scale(row: &mut SparseRow, c: &Rat) {
    for (_, v) in row.iter_mut() {
        *v *= c;
    }
}

/// Incremental row echelon form: rows indexed by their leading column.
///
/// Inserting a vector reduces it against the current rows; if a nonzero
/// residue remains it becomes a new pivot row (normalised to leading 1).
#[derive(Clone, Debug, Default)]
pub struct RowSpan {
    rows: BTreeMap<usize, SparseRow>,
}

impl RowSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the span; the result has no leading entry in any
    /// pivot column.
    pub fn reduce(&self, mut v: SparseRow) -> SparseRow {
        loop {
            let Some((lead, coeff)) = v.first().cloned() else {
                return v;
            };
            match self.rows.get(&lead) {
                Some(pivot) => {
                    let c = -coeff;
                    v = row_add_scaled(&v, pivot, &c);
                }
                None => return v,
            }
        }
    }

    /// Insert `v`; returns `true` if the rank grew.
    pub fn insert(&mut self, v: SparseRow) -> bool {
        let mut v = self.reduce(v);
        let Some((lead, coeff)) = v.first().cloned() else {
            return false;
        };
        let inv = coeff.recip();
        row_scale(&mut v, &inv);
        self.rows.insert(lead, v);
        true
    }

    pub fn contains(&self, v: &SparseRow) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }
}

/// Fully reduced row echelon form of a list of sparse rows.
pub struct Rref {
    /// Echelon rows keyed by pivot column, pivots normalised to 1 and
    /// cleared from all other rows.
    pub rows: BTreeMap<usize, SparseRow>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Compute the fully reduced echelon form.
pub fn rref(input: impl IntoIterator<Item = SparseRow>) -> Rref {
    let mut span = RowSpan::new();
    for row in input {
        span.insert(row);
    }
    // Back-substitute: clear every pivot column from every other row,
    // walking pivots from the right.
    let pivots: Vec<usize> = span.rows.keys().copied().collect();
    for &p in pivots.iter().rev() {
        let pivot_row = span.rows.get(&p).unwrap().clone();
        for &q in pivots.iter() {
            if q >= p {
                break;
            }
            let row = span.rows.get(&q).unwrap();
            if let Some((_, coeff)) = row.iter().find(|(c, _)| *c == p) {
                let c = -coeff.clone();
                let updated = row_add_scaled(row, &pivot_row, &c);
                span.rows.insert(q, updated);
            }
        }
    }
    Rref { rows: span.rows }
}

/// Basis of the right kernel `{ x : A x = 0 }` of the matrix whose rows are
/// `rows`, on `ncols` unknowns.  Returned vectors are sparse and reduced.
pub fn nullspace_of_rows(rows: impl IntoIterator<Item = SparseRow>, ncols: usize) -> Vec<SparseRow> {
    let r = rref(rows);
    let is_pivot = {
        let mut v = vec![false; ncols];
        for &c in r.rows.keys() {
            v[c] = true;
        }
        v
    };
    // One basis vector per free column: x[free] = 1 and each pivot variable
    // solves its own row.  Collect pivot contributions in one sweep.
    let mut contributions: BTreeMap<usize, Vec<(usize, Rat)>> = BTreeMap::new();
    for (&p, row) in &r.rows {
        for (c, coeff) in row {
            if *c != p && !is_pivot[*c] {
                contributions.entry(*c).or_default().push((p, -coeff.clone()));
            }
        }
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free] {
            continue;
        }
        let mut vec_entries = contributions.remove(&free).unwrap_or_default();
        vec_entries.push((free, Rat::one()));
        vec_entries.sort_by_key(|(c, _)| *c);
        basis.push(vec_entries);
    }
    basis
}

/// A sparse matrix over the rationals.  Indices are `(row, col)`; zero
/// entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rat>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Set entry `(i, j)`; storing a zero removes the entry.
    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::new(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrix::new(nrows, ncols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = SparseMatrix::new(self.cols, self.rows);
        for (&(i, j), v) in &self.entries {
            m.set(j, i, v.clone());
        }
        m
    }

    fn sparse_rows(&self) -> Vec<SparseRow> {
        let mut rows: Vec<SparseRow> = vec![Vec::new(); self.rows];
        for (&(i, j), v) in &self.entries {
            rows[i].push((j, v.clone()));
        }
        rows
    }

    /// Rank over the rational field, exact.
    pub fn rank(&self) -> usize {
        let mut span = RowSpan::new();
        for row in self.sparse_rows() {
            span.insert(row);
        }
        span.rank()
    }

    /// Exact basis of the right kernel; its size is `cols - rank`.
    pub fn nullspace_basis(&self) -> Vec<Vec<Rat>> {
        nullspace_of_rows(self.sparse_rows(), self.cols)
            .into_iter()
            .map(|sparse| {
                let mut dense = vec![Rat::zero(); self.cols];
                for (c, v) in sparse {
                    dense[c] = v;
                }
                dense
            })
            .collect()
    }
}

/// `ambient_dim - rank(span of the given vectors)`: the dimension of the
/// quotient of `Q^ambient_dim` by the span.  Errors if any vector has the
/// wrong length.
pub fn quotient_dim(ambient_dim: usize, spanning_vectors: &[Vec<Rat>]) -> Result<usize> {
    let mut span = RowSpan::new();
    for v in spanning_vectors {
        if v.len() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                got: v.len(),
            });
        }
        let row: SparseRow = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(c, x)| (c, x.clone()))
            .collect();
        span.insert(row);
    }
    Ok(ambient_dim - span.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn rank_empty_matrix_is_zero() {
        assert_eq!(SparseMatrix::new(0, 0).rank(), 0);
    }

    #[test]
    fn rank_identity() {
        assert_eq!(SparseMatrix::identity(3).rank(), 3);
    }

    #[test]
    fn rank_proportional_rows() {
        let m = SparseMatrix::from_rows(vec![vec![r(1), r(2)], vec![r(2), r(4)]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn nullspace_identity_empty() {
        assert!(SparseMatrix::identity(2).nullspace_basis().is_empty());
    }

    #[test]
    fn nullspace_zero_matrix_full() {
        let m = SparseMatrix::new(1, 3);
        assert_eq!(m.nullspace_basis().len(), 3);
    }

    #[test]
    fn nullspace_one_relation() {
        let m = SparseMatrix::from_rows(vec![vec![r(1), r(1)]]);
        let basis = m.nullspace_basis();
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        // Proportional to (1, -1).
        assert!(!v[0].is_zero());
        assert_eq!(v[0].clone() + v[1].clone(), Rat::zero());
    }

    #[test]
    fn quotient_dims() {
        assert_eq!(quotient_dim(3, &[]).unwrap(), 3);
        let std_basis = vec![
            vec![r(1), r(0), r(0)],
            vec![r(0), r(1), r(0)],
            vec![r(0), r(0), r(1)],
        ];
        assert_eq!(quotient_dim(3, &std_basis).unwrap(), 0);
        let vs = vec![vec![r(1), r(1)], vec![r(2), r(2)]];
        assert_eq!(quotient_dim(2, &vs).unwrap(), 1);
        assert!(quotient_dim(3, &vs).is_err());
    }

    #[test]
    fn rref_clears_pivot_columns() {
        let rows = vec![
            vec![(0, r(2)), (1, r(4)), (2, r(2))],
            vec![(1, r(1)), (2, r(1))],
        ];
        let r = rref(rows);
        assert_eq!(r.rank(), 2);
        let first = &r.rows[&0];
        // Pivot column 1 must be cleared from the first row.
        assert!(first.iter().all(|(c, _)| *c != 1));
    }

    #[test]
    fn nullspace_dimension_formula() {
        let m = SparseMatrix::from_rows(vec![
            vec![r(1), r(2), r(3), r(4)],
            vec![r(2), r(4), r(6), r(8)],
            vec![r(0), r(1), r(1), r(0)],
        ]);
        assert_eq!(m.rank() + m.nullspace_basis().len(), m.cols());
        assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn quarter_coefficients_stay_exact() {
        let m = SparseMatrix::from_rows(vec![
            vec![rat(1, 3), rat(1, 7)],
            vec![rat(1, 21), rat(1, 49)],
        ]);
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace_basis();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!(
            rat(1, 3) * v[0].clone() + rat(1, 7) * v[1].clone(),
            Rat::zero()
        );
        assert!(Rat::one().is_one());
    }
}
