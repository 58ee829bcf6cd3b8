//! Smith normal form over the integers.
//!
//! Two routes are provided. [`smith_normal_form`] works on a dense matrix and
//! tracks unimodular transforms `U`, `V` with `U * S * V = M`.
//! [`invariant_factors`] works directly on sparse boundary matrices and only
//! returns the diagonal. Both pick as pivot the nonzero entry of least
//! absolute value, breaking ties by lowest row and then lowest column.
//!
//! [`rational_rank`] is an independent rank computation over the rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::SparseMatrix;

pub type DenseMatrix = Vec<Vec<BigInt>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: DenseMatrix,
    pub s: DenseMatrix,
    pub v: DenseMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries of `s`, in order.
    pub fn invariant_factors(&self) -> Vec<BigUint> {
        let k = self.s.len().min(self.s.first().map_or(0, Vec::len));
        (0..k).map(|i| self.s[i][i].magnitude().clone()).filter(|x| !x.is_zero()).collect()
    }
}

pub fn identity(n: usize) -> DenseMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    out[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    out
}

pub fn to_big(m: &[Vec<i64>]) -> DenseMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

struct Dense {
    a: DenseMatrix,
    u: DenseMatrix,
    v: DenseMatrix,
}

impl Dense {
    // row_i += c * row_j, and U <- U * E^{-1}
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        let rj = self.a[j].clone();
        for (x, y) in self.a[i].iter_mut().zip(&rj) {
            *x += c * y;
        }
        for row in self.u.iter_mut() {
            let t = c * &row[i];
            row[j] -= t;
        }
    }

    // col_j += c * col_i, and V <- F^{-1} * V
    fn add_col(&mut self, j: usize, i: usize, c: &BigInt) {
        for row in self.a.iter_mut() {
            let t = c * &row[i];
            row[j] += t;
        }
        let vj = self.v[j].clone();
        for (x, y) in self.v[i].iter_mut().zip(&vj) {
            *x -= c * y;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        for row in self.u.iter_mut() {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        self.v.swap(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.u.iter_mut() {
            row[i] = -&row[i];
        }
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, &BigInt)> = None;
        for (i, row) in self.a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(_, _, b)| x.magnitude() < b.magnitude()) {
                    best = Some((i, j, x));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Dense Smith normal form with transforms, `U * S * V = M`.
pub fn smith_normal_form(m: &DenseMatrix) -> SmithDecomposition {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut st = Dense { a: m.clone(), u: identity(rows), v: identity(cols) };
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = st.min_entry(t) else { break };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);
        loop {
            let p = st.a[t][t].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if st.a[i][t].is_zero() {
                    continue;
                }
                let q = st.a[i][t].div_floor(&p);
                st.add_row(i, t, &-q);
                dirty |= !st.a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if st.a[t][j].is_zero() {
                    continue;
                }
                let q = st.a[t][j].div_floor(&p);
                st.add_col(j, t, &-q);
                dirty |= !st.a[t][j].is_zero();
            }
            if dirty {
                let (pi, pj) = st.min_entry(t).expect("nonzero remainder exists");
                st.swap_rows(t, pi);
                st.swap_cols(t, pj);
                continue;
            }
            // Divisibility: fold a row carrying a non-multiple into row t.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !st.a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    st.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if st.a[t][t].is_negative() {
            st.negate_row(t);
        }
        t += 1;
    }
    SmithDecomposition { u: st.u, s: st.a, v: st.v }
}

/// Invariant factors (nonzero Smith diagonal) of a sparse integer matrix.
pub fn invariant_factors(m: &SparseMatrix) -> Vec<BigUint> {
    let mut w = SparseWork::new(m);
    let mut diag: Vec<BigInt> = Vec::new();
    while let Some((r, c)) = w.pivot() {
        let p = w.get(r, c).clone();
        if p.magnitude().is_one() {
            w.eliminate_unit(r, c);
            diag.push(BigInt::one());
            continue;
        }
        let dirty_col = w.reduce_column(r, c, &p);
        let dirty_row = w.reduce_row(r, c, &p);
        if !dirty_col && !dirty_row {
            w.remove(r, c);
            diag.push(p.abs());
        }
    }
    normalize_diagonal(diag)
}

/// Turns a diagonal into Smith form by repeated (gcd, lcm) exchanges.
fn normalize_diagonal(mut diag: Vec<BigInt>) -> Vec<BigUint> {
    let units = diag.iter().filter(|d| d.is_one()).count();
    diag.retain(|d| !d.is_one());
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            if g != diag[i] {
                let l = diag[i].lcm(&diag[j]);
                diag[i] = g;
                diag[j] = l;
            }
        }
    }
    let mut out: Vec<BigUint> = vec![BigUint::one(); units];
    out.extend(diag.into_iter().map(|d| d.magnitude().clone()));
    out.sort();
    out
}

struct SparseWork {
    rows: BTreeMap<usize, BTreeMap<usize, BigInt>>,
    cols: BTreeMap<usize, BTreeSet<usize>>,
}

impl SparseWork {
    fn new(m: &SparseMatrix) -> Self {
        let mut rows: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
        let mut cols: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (j, c) in m.columns().iter().enumerate() {
            for &(i, v) in c {
                rows.entry(i).or_default().insert(j, BigInt::from(v));
                cols.entry(j).or_default().insert(i);
            }
        }
        SparseWork { rows, cols }
    }

    fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.rows[&r][&c]
    }

    /// Least |entry|; ties broken by lowest row then column. A unit in the
    /// lowest row holding one ends the scan early.
    fn pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, &BigInt)> = None;
        for (&r, row) in &self.rows {
            for (&c, x) in row {
                if best.is_none_or(|(_, _, b)| x.magnitude() < b.magnitude()) {
                    best = Some((r, c, x));
                    if x.magnitude().is_one() {
                        return Some((r, c));
                    }
                }
            }
        }
        best.map(|(r, c, _)| (r, c))
    }

    fn set(&mut self, r: usize, c: usize, v: BigInt) {
        if v.is_zero() {
            if let Some(row) = self.rows.get_mut(&r) {
                row.remove(&c);
                if row.is_empty() {
                    self.rows.remove(&r);
                }
            }
            if let Some(col) = self.cols.get_mut(&c) {
                col.remove(&r);
                if col.is_empty() {
                    self.cols.remove(&c);
                }
            }
        } else {
            self.rows.entry(r).or_default().insert(c, v);
            self.cols.entry(c).or_default().insert(r);
        }
    }

    fn get_or_zero(&self, r: usize, c: usize) -> BigInt {
        self.rows.get(&r).and_then(|row| row.get(&c)).cloned().unwrap_or_default()
    }

    // target_row -= q * source_row
    fn row_axpy(&mut self, target: usize, source: usize, q: &BigInt) {
        let src: Vec<(usize, BigInt)> = self.rows[&source].iter().map(|(&c, v)| (c, v.clone())).collect();
        for (c, v) in src {
            let cur = self.get_or_zero(target, c);
            self.set(target, c, cur - q * v);
        }
    }

    // target_col -= q * source_col
    fn col_axpy(&mut self, target: usize, source: usize, q: &BigInt) {
        let src: Vec<(usize, BigInt)> = self.cols[&source].iter().map(|&r| (r, self.rows[&r][&source].clone())).collect();
        for (r, v) in src {
            let cur = self.get_or_zero(r, target);
            self.set(r, target, cur - q * v);
        }
    }

    fn eliminate_unit(&mut self, r: usize, c: usize) {
        let p = self.get(r, c).clone();
        let others: Vec<usize> = self.cols[&c].iter().copied().filter(|&i| i != r).collect();
        for i in others {
            let q = self.get(i, c) * &p;
            self.row_axpy(i, r, &q);
        }
        self.remove_row(r);
    }

    fn reduce_column(&mut self, r: usize, c: usize, p: &BigInt) -> bool {
        let others: Vec<usize> = self.cols.get(&c).map_or_else(Vec::new, |s| s.iter().copied().filter(|&i| i != r).collect());
        let mut dirty = false;
        for i in others {
            let q = self.get(i, c).div_floor(p);
            self.row_axpy(i, r, &q);
            dirty |= !self.get_or_zero(i, c).is_zero();
        }
        dirty
    }

    fn reduce_row(&mut self, r: usize, c: usize, p: &BigInt) -> bool {
        if self.get_or_zero(r, c) != *p {
            return true;
        }
        let others: Vec<usize> = self.rows[&r].keys().copied().filter(|&j| j != c).collect();
        let mut dirty = false;
        for j in others {
            let q = self.get(r, j).div_floor(p);
            self.col_axpy(j, c, &q);
            dirty |= !self.get_or_zero(r, j).is_zero();
        }
        dirty
    }

    fn remove_row(&mut self, r: usize) {
        if let Some(row) = self.rows.remove(&r) {
            for c in row.keys() {
                if let Some(col) = self.cols.get_mut(c) {
                    col.remove(&r);
                    if col.is_empty() {
                        self.cols.remove(c);
                    }
                }
            }
        }
    }

    fn remove(&mut self, r: usize, c: usize) {
        debug_assert_eq!(self.rows[&r].len(), 1);
        debug_assert_eq!(self.cols[&c].len(), 1);
        self.remove_row(r);
    }
}

/// Rank over the rationals by Gaussian elimination.
pub fn rational_rank(m: &SparseMatrix) -> usize {
    let mut rows: Vec<BTreeMap<usize, BigRational>> = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|(c, v)| (c, BigRational::from_integer(BigInt::from(v)))).collect())
        .filter(|r: &BTreeMap<usize, BigRational>| !r.is_empty())
        .collect();
    // Eliminate by leading column; pivot rows are kept in `basis`.
    let mut basis: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for mut row in rows.drain(..) {
        loop {
            let Some((&lead, _)) = row.iter().next() else { break };
            match basis.get(&lead) {
                Some(b) => {
                    let factor = &row[&lead] / &b[&lead];
                    for (c, v) in b {
                        let cur = row.remove(c).unwrap_or_else(BigRational::zero);
                        let nv = cur - &factor * v;
                        if !nv.is_zero() {
                            row.insert(*c, nv);
                        }
                    }
                }
                None => {
                    basis.insert(lead, row);
                    break;
                }
            }
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(m: &[Vec<i64>]) -> DenseMatrix {
        to_big(m)
    }

    #[test]
    fn snf_of_two() {
        let m = SparseMatrix::from_dense(&[vec![2]]);
        assert_eq!(invariant_factors(&m), vec![BigUint::from(2u32)]);
    }

    #[test]
    fn snf_reconstructs_small_example() {
        let m = big(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let d = smith_normal_form(&m);
        assert_eq!(matmul(&matmul(&d.u, &d.s), &d.v), m);
        let f: Vec<u32> = d.invariant_factors().iter().map(|x| u32::try_from(x).unwrap()).collect();
        assert_eq!(f, vec![2, 6, 12]);
    }

    #[test]
    fn sparse_and_dense_agree_on_example() {
        let rows = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let f = invariant_factors(&SparseMatrix::from_dense(&rows));
        assert_eq!(f, smith_normal_form(&big(&rows)).invariant_factors());
    }

    #[test]
    fn diagonal_normalization_enforces_divisibility() {
        let m = SparseMatrix::from_dense(&[vec![4, 0], vec![0, 6]]);
        assert_eq!(invariant_factors(&m), vec![BigUint::from(2u32), BigUint::from(12u32)]);
    }

    #[test]
    fn rational_rank_ignores_torsion() {
        let m = SparseMatrix::from_dense(&[vec![2, 4], vec![1, 2]]);
        assert_eq!(rational_rank(&m), 1);
        assert_eq!(invariant_factors(&m).len(), 1);
    }

    #[test]
    fn empty_matrices() {
        assert!(invariant_factors(&SparseMatrix::zeros(0, 3)).is_empty());
        let d = smith_normal_form(&vec![vec![BigInt::zero(); 2]; 3]);
        assert!(d.invariant_factors().is_empty());
    }
}
