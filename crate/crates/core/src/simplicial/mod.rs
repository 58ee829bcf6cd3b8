//! Finite simplicial sets stored by their nondegenerate simplices, cones,
//! simplicial maps, normalized integer chains and homology.

mod chain;
mod homology;
pub mod snf;

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chain::{mapping_cone, normalized_chain_complex, ChainComplex, ChainMap, Ring, SparseMatrix};
pub use homology::{homology, mapping_cone_homology, DegreeHomology, HomologyResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("simplex {simplex} in dimension {dim}: d_{i} d_{j} != d_{} d_{i}", .j - 1)]
    IdentityViolation { dim: usize, simplex: usize, i: usize, j: usize },
    #[error("simplex {simplex} in dimension {dim}: face {face} points outside dimension {}", .dim - 1)]
    DanglingFace { dim: usize, simplex: usize, face: usize },
    #[error("simplex {simplex} in dimension {dim} has {found} faces, expected {expected}")]
    FaceCount { dim: usize, simplex: usize, found: usize, expected: usize },
    #[error("label table and face table disagree in dimension {dim}")]
    ShapeMismatch { dim: usize },
    #[error("boundary composite is nonzero in degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("map does not commute with the differential in degree {degree}")]
    NotChainMap { degree: i64 },
    #[error("matrix in degree {degree} has shape {found:?}, expected {expected:?}")]
    BadShape { degree: i64, found: (usize, usize), expected: (usize, usize) },
}

/// The i-th face of a nondegenerate simplex.
///
/// When `degenerate` is set the face is a degeneracy of the simplex `index`
/// in some lower dimension; such faces vanish in normalized chains and are
/// not followed by the simplicial identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub index: usize,
    pub degenerate: bool,
}

impl Face {
    pub fn new(index: usize) -> Self {
        Face { index, degenerate: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialSet {
    labels: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<Face>>>,
}

impl SimplicialSet {
    pub fn empty() -> Self {
        SimplicialSet { labels: Vec::new(), faces: Vec::new() }
    }

    /// Validates face data and builds the set. `faces[d][k]` lists the
    /// `d + 1` faces of the k-th d-simplex; 0-simplices have none.
    pub fn build(labels: Vec<Vec<String>>, faces: Vec<Vec<Vec<Face>>>) -> Result<Self, SimplicialError> {
        if labels.len() != faces.len() {
            return Err(SimplicialError::ShapeMismatch { dim: labels.len().min(faces.len()) });
        }
        for (d, (l, f)) in labels.iter().zip(&faces).enumerate() {
            if l.len() != f.len() {
                return Err(SimplicialError::ShapeMismatch { dim: d });
            }
            let expected = if d == 0 { 0 } else { d + 1 };
            for (k, fs) in f.iter().enumerate() {
                if fs.len() != expected {
                    return Err(SimplicialError::FaceCount { dim: d, simplex: k, found: fs.len(), expected });
                }
                if d > 0 {
                    for (i, face) in fs.iter().enumerate() {
                        if !face.degenerate && face.index >= labels[d - 1].len() {
                            return Err(SimplicialError::DanglingFace { dim: d, simplex: k, face: i });
                        }
                    }
                }
            }
        }
        let mut set = SimplicialSet { labels, faces };
        set.trim();
        set.check_identities()?;
        Ok(set)
    }

    fn trim(&mut self) {
        while self.labels.last().is_some_and(|l| l.is_empty()) {
            self.labels.pop();
            self.faces.pop();
        }
    }

    fn check_identities(&self) -> Result<(), SimplicialError> {
        for d in 2..self.faces.len() {
            for (k, fs) in self.faces[d].iter().enumerate() {
                for j in 1..=d {
                    for i in 0..j {
                        let (fj, fi) = (fs[j], fs[i]);
                        if fj.degenerate || fi.degenerate {
                            continue;
                        }
                        let lhs = self.faces[d - 1][fj.index][i];
                        let rhs = self.faces[d - 1][fi.index][j - 1];
                        if lhs != rhs {
                            return Err(SimplicialError::IdentityViolation { dim: d, simplex: k, i, j });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds the simplicial set whose simplices are the given strictly ordered
    /// vertex lists; the i-th face deletes the i-th vertex. Every face of a
    /// listed simplex must itself be listed.
    pub fn from_flags<K, F>(simplices: &[Vec<K>], label: F) -> Result<Self, SimplicialError>
    where
        K: Clone + Eq + Hash,
        F: Fn(&[K]) -> String,
    {
        let top = simplices.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut by_dim: Vec<Vec<&Vec<K>>> = vec![Vec::new(); top];
        for s in simplices {
            if !s.is_empty() {
                by_dim[s.len() - 1].push(s);
            }
        }
        let mut index: Vec<HashMap<&[K], usize>> = Vec::with_capacity(top);
        for dim in &by_dim {
            let mut m = HashMap::with_capacity(dim.len());
            for (k, s) in dim.iter().enumerate() {
                m.insert(s.as_slice(), k);
            }
            index.push(m);
        }
        let mut labels = Vec::with_capacity(top);
        let mut faces = Vec::with_capacity(top);
        for (d, dim) in by_dim.iter().enumerate() {
            labels.push(dim.iter().map(|s| label(s)).collect::<Vec<_>>());
            let mut fd = Vec::with_capacity(dim.len());
            for (k, s) in dim.iter().enumerate() {
                if d == 0 {
                    fd.push(Vec::new());
                    continue;
                }
                let mut fs = Vec::with_capacity(d + 1);
                for i in 0..=d {
                    let mut face: Vec<K> = Vec::with_capacity(d);
                    face.extend_from_slice(&s[..i]);
                    face.extend_from_slice(&s[i + 1..]);
                    match index[d - 1].get(face.as_slice()) {
                        Some(&t) => fs.push(Face::new(t)),
                        None => return Err(SimplicialError::DanglingFace { dim: d, simplex: k, face: i }),
                    }
                }
                fd.push(fs);
            }
            faces.push(fd);
        }
        SimplicialSet::build(labels, faces)
    }

    /// The standard n-simplex.
    pub fn standard_simplex(n: usize) -> Self {
        let all = subsets_of_range(n + 1, 1, n + 1);
        SimplicialSet::from_flags(&all, vertex_label).expect("standard simplex is closed")
    }

    /// The boundary of the standard n-simplex (n >= 1).
    pub fn simplex_boundary(n: usize) -> Self {
        let all = subsets_of_range(n + 1, 1, n);
        SimplicialSet::from_flags(&all, vertex_label).expect("simplex boundary is closed")
    }

    /// Dimension of the top nonempty level; `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        self.labels.len().checked_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.labels.get(dim).map_or(0, Vec::len)
    }

    /// Nondegenerate simplex counts per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    pub fn label(&self, dim: usize, index: usize) -> &str {
        &self.labels[dim][index]
    }

    pub fn labels(&self, dim: usize) -> &[String] {
        self.labels.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn faces(&self, dim: usize, index: usize) -> &[Face] {
        &self.faces[dim][index]
    }

    pub fn face(&self, dim: usize, index: usize, i: usize) -> Face {
        self.faces[dim][index][i]
    }

    /// Maximal simplices: those that are not a face of any other simplex.
    pub fn maximal_simplices(&self) -> Vec<(usize, usize)> {
        let mut covered: Vec<Vec<bool>> = self.labels.iter().map(|l| vec![false; l.len()]).collect();
        for d in 1..self.faces.len() {
            for fs in &self.faces[d] {
                for f in fs.iter().filter(|f| !f.degenerate) {
                    covered[d - 1][f.index] = true;
                }
            }
        }
        let mut out = Vec::new();
        for (d, c) in covered.iter().enumerate() {
            out.extend(c.iter().enumerate().filter(|(_, &b)| !b).map(|(k, _)| (d, k)));
        }
        out
    }

    /// Replaces the i-th face of one simplex. Used to build corrupted inputs
    /// for fault-injection runs; the result is not revalidated.
    pub fn with_corrupted_face(&self, dim: usize, simplex: usize, i: usize, target: usize) -> (Vec<Vec<String>>, Vec<Vec<Vec<Face>>>) {
        let mut faces = self.faces.clone();
        faces[dim][simplex][i] = Face::new(target);
        (self.labels.clone(), faces)
    }

    /// Raw face tables, as accepted by [`SimplicialSet::build`].
    pub fn into_parts(self) -> (Vec<Vec<String>>, Vec<Vec<Vec<Face>>>) {
        (self.labels, self.faces)
    }
}

fn vertex_label(s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// All subsets of `0..n` with sizes in `lo..=hi`, each sorted ascending.
fn subsets_of_range(n: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size >= lo && size <= hi {
            out.push((0..n).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// X joined with a point. The apex is the last 0-simplex; in dimension n the
/// simplices of X come first, followed by the cones on the (n-1)-simplices.
pub fn cone(x: &SimplicialSet) -> (SimplicialSet, SimplicialMap) {
    let top = x.labels.len();
    let mut labels: Vec<Vec<String>> = Vec::with_capacity(top + 1);
    let mut faces: Vec<Vec<Vec<Face>>> = Vec::with_capacity(top + 1);
    let apex = x.count(0);
    for n in 0..=top {
        let mut l: Vec<String> = x.labels(n).to_vec();
        let mut f: Vec<Vec<Face>> = if n < top { x.faces[n].clone() } else { Vec::new() };
        if n == 0 {
            l.push("*".to_string());
            f.push(Vec::new());
        } else {
            for k in 0..x.count(n - 1) {
                l.push(format!("{}*", x.label(n - 1, k)));
                let mut fs = Vec::with_capacity(n + 1);
                if n == 1 {
                    fs.push(Face::new(apex));
                } else {
                    for face in x.faces(n - 1, k) {
                        let base = x.count(n - 1);
                        debug_assert!(!face.degenerate);
                        fs.push(Face::new(base + face.index));
                    }
                }
                fs.push(Face::new(k));
                f.push(fs);
            }
        }
        labels.push(l);
        faces.push(f);
    }
    let cone = SimplicialSet::build(labels, faces).expect("cone of a valid simplicial set is valid");
    let inclusion = SimplicialMap::identity_prefix(x);
    (cone, inclusion)
}

/// Image of one nondegenerate simplex under a simplicial map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapTarget {
    pub index: usize,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialMap {
    images: Vec<Vec<MapTarget>>,
}

impl SimplicialMap {
    pub fn new(images: Vec<Vec<MapTarget>>) -> Self {
        SimplicialMap { images }
    }

    pub fn from_indices(images: Vec<Vec<usize>>) -> Self {
        SimplicialMap {
            images: images
                .into_iter()
                .map(|d| d.into_iter().map(|index| MapTarget { index, degenerate: false }).collect())
                .collect(),
        }
    }

    pub fn identity(x: &SimplicialSet) -> Self {
        Self::identity_prefix(x)
    }

    fn identity_prefix(x: &SimplicialSet) -> Self {
        Self::from_indices(x.f_vector().iter().map(|&n| (0..n).collect()).collect())
    }

    pub fn image(&self, dim: usize, index: usize) -> Option<MapTarget> {
        self.images.get(dim).and_then(|d| d.get(index)).copied()
    }

    pub fn images(&self) -> &[Vec<MapTarget>] {
        &self.images
    }
}

/// A simplex at which an isomorphism check failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCounterexample {
    pub dim: usize,
    pub simplex: usize,
    pub reason: String,
}

/// Checks that `m` is a dimensionwise bijection on nondegenerate simplices
/// commuting with every face map.
pub fn check_simplicial_iso(x: &SimplicialSet, y: &SimplicialSet, m: &SimplicialMap) -> Result<(), IsoCounterexample> {
    let top = x.labels.len().max(y.labels.len());
    for d in 0..top {
        let (nx, ny) = (x.count(d), y.count(d));
        if nx != ny {
            return Err(IsoCounterexample {
                dim: d,
                simplex: 0,
                reason: format!("dimension {d} has {nx} simplices in the source and {ny} in the target"),
            });
        }
        let mut hit = vec![false; ny];
        for k in 0..nx {
            let img = m.image(d, k).ok_or_else(|| IsoCounterexample {
                dim: d,
                simplex: k,
                reason: "no image assigned".into(),
            })?;
            if img.degenerate || img.index >= ny {
                return Err(IsoCounterexample { dim: d, simplex: k, reason: "image is degenerate or out of range".into() });
            }
            if std::mem::replace(&mut hit[img.index], true) {
                return Err(IsoCounterexample { dim: d, simplex: k, reason: format!("image {} is hit twice", img.index) });
            }
            if d == 0 {
                continue;
            }
            for (i, f) in x.faces(d, k).iter().enumerate() {
                let g = y.face(d, img.index, i);
                let lhs = if f.degenerate { None } else { m.image(d - 1, f.index) };
                let ok = match lhs {
                    Some(t) => !g.degenerate && t.index == g.index,
                    None => f.degenerate && g.degenerate,
                };
                if !ok {
                    return Err(IsoCounterexample {
                        dim: d,
                        simplex: k,
                        reason: format!("face d_{i} of '{}' does not commute with the map", x.label(d, k)),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta1(d0: usize, d1: usize) -> Result<SimplicialSet, SimplicialError> {
        SimplicialSet::build(
            vec![vec!["0".into(), "1".into()], vec!["01".into()]],
            vec![vec![vec![], vec![]], vec![vec![Face::new(d0), Face::new(d1)]]],
        )
    }

    #[test]
    fn standard_one_simplex_and_loop_are_valid() {
        assert!(delta1(1, 0).is_ok());
        assert!(delta1(0, 0).is_ok());
    }

    #[test]
    fn inconsistent_two_simplex_is_rejected() {
        // Δ[2] with d_0 and d_1 swapped on the top simplex.
        let d2 = SimplicialSet::standard_simplex(2);
        let (labels, mut faces) = d2.into_parts();
        faces[2][0].swap(0, 1);
        let err = SimplicialSet::build(labels, faces).unwrap_err();
        assert!(matches!(err, SimplicialError::IdentityViolation { dim: 2, .. }));
    }

    #[test]
    fn dangling_face_is_rejected() {
        assert!(matches!(delta1(5, 0), Err(SimplicialError::DanglingFace { dim: 1, simplex: 0, face: 0 })));
    }

    #[test]
    fn cone_of_empty_is_a_point() {
        let (c, _) = cone(&SimplicialSet::empty());
        assert_eq!(c.f_vector(), vec![1]);
    }

    #[test]
    fn cone_of_two_points() {
        let two = SimplicialSet::from_flags(&[vec![0], vec![1]], |s: &[usize]| s[0].to_string()).unwrap();
        let (c, inc) = cone(&two);
        assert_eq!(c.f_vector(), vec![3, 2]);
        assert_eq!(c.faces(1, 0), &[Face::new(2), Face::new(0)]);
        assert_eq!(inc.image(0, 1).unwrap().index, 1);
    }

    #[test]
    fn cone_satisfies_identities_in_higher_dimensions() {
        let (c, _) = cone(&SimplicialSet::standard_simplex(3));
        assert_eq!(c.f_vector(), vec![5, 10, 10, 5, 1]);
    }

    #[test]
    fn identity_iso_on_delta2() {
        let d2 = SimplicialSet::standard_simplex(2);
        assert!(check_simplicial_iso(&d2, &d2, &SimplicialMap::identity(&d2)).is_ok());
    }

    #[test]
    fn face_breaking_relabelling_is_not_an_iso() {
        // Swap two vertices but keep the edges fixed.
        let b = SimplicialSet::simplex_boundary(2);
        let m = SimplicialMap::from_indices(vec![vec![1, 0, 2], vec![0, 1, 2]]);
        let err = check_simplicial_iso(&b, &b, &m).unwrap_err();
        assert_eq!(err.dim, 1);
    }

    #[test]
    fn maximal_simplices_of_boundary() {
        let b = SimplicialSet::simplex_boundary(2);
        assert_eq!(b.maximal_simplices(), vec![(1, 0), (1, 1), (1, 2)]);
    }
}
