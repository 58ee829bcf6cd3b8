use serde::{Deserialize, Serialize};

use super::{SimplicialError, SimplicialSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "Q")]
    Rationals,
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Ring::Integers => "Z",
            Ring::Rationals => "Q",
        })
    }
}

/// Column-major sparse integer matrix. Each column holds `(row, value)`
/// pairs sorted by row with no zero values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: (0..n).map(|i| vec![(i, 1)]).collect() }
    }

    /// Builds from unsorted column entries; repeated rows are summed.
    pub fn from_columns(rows: usize, cols: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_unstable_by_key(|e| e.0);
                let mut out: Vec<(usize, i64)> = Vec::with_capacity(c.len());
                for (r, v) in c {
                    assert!(r < rows, "row index {r} out of range {rows}");
                    match out.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => out.push((r, v)),
                    }
                }
                out.retain(|e| e.1 != 0);
                out
            })
            .collect();
        SparseMatrix { rows, cols }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let cols = (0..ncols)
            .map(|j| (0..nrows).filter(|&i| rows[i][j] != 0).map(|i| (i, rows[i][j])).collect())
            .collect();
        SparseMatrix { rows: nrows, cols }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.ncols()]; self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                d[i][j] = v;
            }
        }
        d
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols.len())
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, i64)>] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.rows, "inner dimensions differ");
        let mut acc: Vec<i128> = vec![0; self.rows];
        let mut touched: Vec<usize> = Vec::new();
        let mut cols = Vec::with_capacity(other.ncols());
        for oc in &other.cols {
            for &(k, b) in oc {
                for &(i, a) in &self.cols[k] {
                    if acc[i] == 0 {
                        touched.push(i);
                    }
                    acc[i] += a as i128 * b as i128;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut col = Vec::new();
            for &i in &touched {
                if acc[i] != 0 {
                    col.push((i, i64::try_from(acc[i]).expect("matrix product overflows i64")));
                }
                acc[i] = 0;
            }
            touched.clear();
            cols.push(col);
        }
        SparseMatrix { rows: self.rows, cols }
    }

    pub fn scaled(&self, s: i64) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols.iter().map(|c| c.iter().map(|&(i, v)| (i, v * s)).filter(|e| e.1 != 0).collect()).collect(),
        }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.shape(), other.shape());
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&(i, v)| (i, -v))).collect())
            .collect();
        SparseMatrix::from_columns(self.rows, cols)
    }

    /// Row-major copy: `rows[i]` holds `(col, value)` sorted by column.
    pub fn to_rows(&self) -> Vec<Vec<(usize, i64)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                rows[i].push((j, v));
            }
        }
        rows
    }
}

/// A bounded chain complex of finitely generated free modules.
///
/// Degrees run over `min_degree ..= min_degree + ranks.len() - 1`;
/// `boundaries[k]` is the differential out of degree `min_degree + k`
/// (the lowest one maps to the zero module and has no rows).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    pub ring: Ring,
    pub reduced: bool,
    min_degree: i64,
    ranks: Vec<usize>,
    boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// `boundaries[k]` maps degree `min_degree + k` to the degree below it.
    pub fn new(ring: Ring, min_degree: i64, boundaries: Vec<SparseMatrix>) -> Result<Self, SimplicialError> {
        let ranks: Vec<usize> = boundaries.iter().map(SparseMatrix::ncols).collect();
        for (k, b) in boundaries.iter().enumerate() {
            let expected_rows = if k == 0 { 0 } else { ranks[k - 1] };
            if b.nrows() != expected_rows {
                return Err(SimplicialError::BadShape {
                    degree: min_degree + k as i64,
                    found: b.shape(),
                    expected: (expected_rows, ranks[k]),
                });
            }
        }
        Ok(ChainComplex { ring, reduced: false, min_degree, ranks, boundaries })
    }

    pub fn zero(ring: Ring) -> Self {
        ChainComplex { ring, reduced: false, min_degree: 0, ranks: Vec::new(), boundaries: Vec::new() }
    }

    pub fn with_ring(mut self, ring: Ring) -> Self {
        self.ring = ring;
        self
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.min_degree..=self.max_degree()
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.slot(degree).map_or(0, |k| self.ranks[k])
    }

    fn slot(&self, degree: i64) -> Option<usize> {
        let k = degree - self.min_degree;
        (k >= 0 && (k as usize) < self.ranks.len()).then_some(k as usize)
    }

    /// The differential out of `degree`, as a `rank(degree-1) x rank(degree)` matrix.
    pub fn boundary(&self, degree: i64) -> SparseMatrix {
        match self.slot(degree) {
            Some(k) => self.boundaries[k].clone(),
            None => SparseMatrix::zeros(self.rank(degree - 1), self.rank(degree)),
        }
    }

    pub fn boundary_ref(&self, degree: i64) -> Option<&SparseMatrix> {
        self.slot(degree).map(|k| &self.boundaries[k])
    }

    /// Returns the first degree where the composite of consecutive
    /// differentials is nonzero.
    pub fn check_d_squared(&self) -> Result<(), SimplicialError> {
        for k in 1..self.boundaries.len() {
            if !self.boundaries[k - 1].mul(&self.boundaries[k]).is_zero() {
                return Err(SimplicialError::NotAComplex { degree: self.min_degree + k as i64 });
            }
        }
        Ok(())
    }

    /// Degree shift: the result has `result_n = self_{n - by}`.
    pub fn shifted(&self, by: i64) -> ChainComplex {
        let mut c = self.clone();
        c.min_degree += by;
        c
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|d| if d.rem_euclid(2) == 0 { self.rank(d) as i64 } else { -(self.rank(d) as i64) }).sum()
    }
}

/// Normalized chains of X: one generator per nondegenerate simplex, with
/// degenerate faces sent to zero. The reduced version is augmented by
/// the ground ring in degree -1.
pub fn normalized_chain_complex(x: &SimplicialSet, ring: Ring, reduced: bool) -> ChainComplex {
    let top = x.labels.len();
    let mut boundaries = Vec::with_capacity(top + 1);
    if reduced {
        boundaries.push(SparseMatrix::zeros(0, 1));
    }
    for d in 0..top {
        let n = x.count(d);
        let m = if d == 0 {
            if reduced {
                SparseMatrix::from_columns(1, vec![vec![(0, 1)]; n])
            } else {
                SparseMatrix::zeros(0, n)
            }
        } else {
            let cols = x.faces[d]
                .iter()
                .map(|fs| {
                    fs.iter()
                        .enumerate()
                        .filter(|(_, f)| !f.degenerate)
                        .map(|(i, f)| (f.index, if i % 2 == 0 { 1 } else { -1 }))
                        .collect()
                })
                .collect();
            SparseMatrix::from_columns(x.count(d - 1), cols)
        };
        boundaries.push(m);
    }
    let min_degree = if reduced { -1 } else { 0 };
    let mut c = ChainComplex::new(ring, min_degree, boundaries).expect("shapes follow the face tables");
    c.reduced = reduced;
    c
}

/// A degreewise map of chain complexes; `maps(n)` is `rank_D(n) x rank_C(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    min_degree: i64,
    maps: Vec<SparseMatrix>,
}

impl ChainMap {
    /// `maps[k]` acts in degree `min_degree + k`; degrees outside are zero.
    pub fn new(source: ChainComplex, target: ChainComplex, min_degree: i64, maps: Vec<SparseMatrix>) -> Result<Self, SimplicialError> {
        let f = ChainMap { source, target, min_degree, maps };
        for (k, m) in f.maps.iter().enumerate() {
            let d = min_degree + k as i64;
            let expected = (f.target.rank(d), f.source.rank(d));
            if m.shape() != expected {
                return Err(SimplicialError::BadShape { degree: d, found: m.shape(), expected });
            }
        }
        Ok(f)
    }

    /// The map in `degree`.
    pub fn at(&self, degree: i64) -> SparseMatrix {
        let k = degree - self.min_degree;
        if k >= 0 && (k as usize) < self.maps.len() {
            self.maps[k as usize].clone()
        } else {
            SparseMatrix::zeros(self.target.rank(degree), self.source.rank(degree))
        }
    }

    fn degree_span(&self) -> std::ops::RangeInclusive<i64> {
        let lo = self.source.min_degree().min(self.target.min_degree());
        let hi = self.source.max_degree().max(self.target.max_degree());
        lo..=hi + 1
    }

    /// Checks `f ∘ ∂ = ∂ ∘ f` in every degree.
    pub fn check(&self) -> Result<(), SimplicialError> {
        for d in self.degree_span() {
            let lhs = self.at(d - 1).mul(&self.source.boundary(d));
            let rhs = self.target.boundary(d).mul(&self.at(d));
            if !lhs.sub(&rhs).is_zero() {
                return Err(SimplicialError::NotChainMap { degree: d });
            }
        }
        Ok(())
    }
}

/// Algebraic mapping cone: `Cone_n = C_{n-1} ⊕ D_n` with
/// `∂(c, d) = (-∂c, f(c) + ∂d)`. Basis order puts the `C` part first.
pub fn mapping_cone(f: &ChainMap) -> Result<ChainComplex, SimplicialError> {
    f.check()?;
    let (c, d) = (&f.source, &f.target);
    let lo = (c.min_degree() + 1).min(d.min_degree());
    let hi = (c.max_degree() + 1).max(d.max_degree());
    let mut boundaries = Vec::new();
    for n in lo..=hi {
        let (cn1, dn) = (c.rank(n - 1), d.rank(n));
        let (cn2, dn1) = if n == lo { (0, 0) } else { (c.rank(n - 2), d.rank(n - 1)) };
        let mut cols: Vec<Vec<(usize, i64)>> = Vec::with_capacity(cn1 + dn);
        if n != lo {
            let dc = c.boundary(n - 1);
            let fm = f.at(n - 1);
            for j in 0..cn1 {
                let mut col: Vec<(usize, i64)> = dc.column(j).iter().map(|&(i, v)| (i, -v)).collect();
                col.extend(fm.column(j).iter().map(|&(i, v)| (cn2 + i, v)));
                cols.push(col);
            }
            let dd = d.boundary(n);
            for j in 0..dn {
                cols.push(dd.column(j).iter().map(|&(i, v)| (cn2 + i, v)).collect());
            }
        } else {
            cols.resize(cn1 + dn, Vec::new());
        }
        boundaries.push(SparseMatrix::from_columns(cn2 + dn1, cols));
    }
    ChainComplex::new(d.ring, lo, boundaries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta1_boundary_matrix() {
        let d1 = SimplicialSet::standard_simplex(1);
        let c = normalized_chain_complex(&d1, Ring::Integers, false);
        // d_0(01) = 1, d_1(01) = 0, so ∂(01) = [1] - [0].
        assert_eq!(c.boundary(1).to_dense(), vec![vec![-1], vec![1]]);
        c.check_d_squared().unwrap();
    }

    #[test]
    fn reduced_complex_has_augmentation() {
        let b = SimplicialSet::simplex_boundary(3);
        let c = normalized_chain_complex(&b, Ring::Integers, true);
        assert_eq!(c.min_degree(), -1);
        assert_eq!(c.rank(-1), 1);
        assert_eq!(c.boundary(0).to_dense(), vec![vec![1, 1, 1, 1]]);
        c.check_d_squared().unwrap();
    }

    #[test]
    fn broken_complex_is_detected() {
        let c = ChainComplex::new(
            Ring::Integers,
            0,
            vec![SparseMatrix::zeros(0, 1), SparseMatrix::from_dense(&[vec![1]]), SparseMatrix::from_dense(&[vec![1]])],
        )
        .unwrap();
        assert_eq!(c.check_d_squared(), Err(SimplicialError::NotAComplex { degree: 2 }));
    }

    #[test]
    fn non_chain_map_is_rejected() {
        let d1 = normalized_chain_complex(&SimplicialSet::standard_simplex(1), Ring::Integers, false);
        // Degree 1 piece zero but degree 0 piece nonzero on only one vertex.
        let f = ChainMap::new(d1.clone(), d1, 0, vec![SparseMatrix::from_dense(&[vec![1, 0], vec![0, 0]])]).unwrap();
        assert!(matches!(f.check(), Err(SimplicialError::NotChainMap { .. })));
    }
}
