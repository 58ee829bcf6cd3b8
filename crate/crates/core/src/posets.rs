//! Finite posets, monotone maps and presheaves on them.
//!
//! Slices of a monotone map are induced subposets, and the category of
//! simplices of a nerve is modelled by the poset of nondegenerate simplices
//! under the face relation (its barycentric subdivision). Reports produced
//! here carry the tag [`SD_MODEL`] to record that substitution.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::simplicial::{HomologyResult, SimplicialSet};

pub const SD_MODEL: &str = "sd-model";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("relation is not reflexive at '{0}'")]
    NotReflexive(String),
    #[error("relation is not antisymmetric: '{0}' and '{1}'")]
    NotAntisymmetric(String, String),
    #[error("relation is not transitive: '{0}' <= '{1}' <= '{2}'")]
    NotTransitive(String, String, String),
    #[error("element {0} not found")]
    ElementNotFound(String),
    #[error("map is not monotone: '{0}' <= '{1}' but images are not comparable")]
    NotMonotone(String, String),
    #[error("map has {found} images for {expected} source elements")]
    MapShape { found: usize, expected: usize },
    #[error("invalid presheaf: {0}")]
    PresheafInvalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    /// `up[i]` contains `j` iff `i <= j`.
    up: Vec<FixedBitSet>,
}

impl Poset {
    pub fn empty() -> Self {
        Poset { labels: Vec::new(), up: Vec::new() }
    }

    /// Builds from a relation predicate and validates the partial order axioms.
    pub fn from_leq<F: Fn(usize, usize) -> bool>(labels: Vec<String>, leq: F) -> Result<Self, PosetError> {
        let n = labels.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            for j in 0..n {
                if leq(i, j) {
                    row.insert(j);
                }
            }
        }
        let p = Poset { labels, up };
        p.validate()?;
        Ok(p)
    }

    /// Reflexive-transitive closure of the given pairs `(lower, upper)`.
    pub fn from_relations(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, PosetError> {
        let n = labels.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(PosetError::ElementNotFound(a.max(b).to_string()));
            }
            up[a].insert(b);
        }
        // Warshall over bitsets.
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        let p = Poset { labels, up };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), PosetError> {
        let n = self.len();
        for i in 0..n {
            if !self.up[i].contains(i) {
                return Err(PosetError::NotReflexive(self.labels[i].clone()));
            }
        }
        for i in 0..n {
            for j in self.up[i].ones() {
                if j != i && self.up[j].contains(i) {
                    return Err(PosetError::NotAntisymmetric(self.labels[i].clone(), self.labels[j].clone()));
                }
                if !self.up[j].is_subset(&self.up[i]) {
                    let k = self.up[j].difference(&self.up[i]).next().expect("nonempty difference");
                    return Err(PosetError::NotTransitive(
                        self.labels[i].clone(),
                        self.labels[j].clone(),
                        self.labels[k].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].contains(j)
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Subposet on `elements`, in the given order.
    pub fn induced(&self, elements: &[usize]) -> Poset {
        let labels = elements.iter().map(|&i| self.labels[i].clone()).collect();
        let k = elements.len();
        let mut up = vec![FixedBitSet::with_capacity(k); k];
        for (a, row) in up.iter_mut().enumerate() {
            for (b, &j) in elements.iter().enumerate() {
                if self.leq(elements[a], j) {
                    row.insert(b);
                }
            }
        }
        Poset { labels, up }
    }

    pub fn down_set(&self, q: usize) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.leq(p, q)).collect()
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.up[i].count_ones(..) == self.len())
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq(j, i)))
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| (0..self.len()).all(|j| !self.lt(j, i))).collect()
    }

    /// Strict chains `p_0 < ... < p_n`, grouped by length and enumerated
    /// depth-first from the lowest index.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let above: Vec<Vec<usize>> = (0..self.len()).map(|i| self.up[i].ones().filter(|&j| j != i).collect()).collect();
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for start in 0..self.len() {
            stack.push(start);
            extend_chains(&above, &mut stack, &mut out);
            stack.pop();
        }
        out.sort_by_key(Vec::len);
        out
    }

    pub fn order_complex(&self) -> SimplicialSet {
        order_complex(self)
    }
}

fn extend_chains(above: &[Vec<usize>], stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(stack.clone());
    let last = *stack.last().expect("nonempty chain");
    for &j in &above[last] {
        stack.push(j);
        extend_chains(above, stack, out);
        stack.pop();
    }
}

/// Nerve of P: n-simplices are chains `p_0 < ... < p_n`, and the i-th face
/// deletes `p_i`.
pub fn order_complex(p: &Poset) -> SimplicialSet {
    let chains = p.chains();
    SimplicialSet::from_flags(&chains, |c: &[usize]| {
        c.iter().map(|&i| p.labels[i].as_str()).collect::<Vec<_>>().join(" < ")
    })
    .expect("chains of a poset are closed under deletion")
}

/// Poset of nondegenerate simplices of X under the iterated face relation.
pub fn face_poset(x: &SimplicialSet) -> Poset {
    let f = x.f_vector();
    let offsets: Vec<usize> = f.iter().scan(0, |acc, &n| {
        let o = *acc;
        *acc += n;
        Some(o)
    }).collect();
    let total: usize = f.iter().sum();
    let mut down = vec![FixedBitSet::with_capacity(total); total];
    let mut labels = Vec::with_capacity(total);
    for (d, &n) in f.iter().enumerate() {
        for k in 0..n {
            let me = offsets[d] + k;
            labels.push(x.label(d, k).to_string());
            down[me].insert(me);
            if d > 0 {
                for face in x.faces(d, k).iter().filter(|fc| !fc.degenerate) {
                    let below = down[offsets[d - 1] + face.index].clone();
                    down[me].union_with(&below);
                }
            }
        }
    }
    let mut up = vec![FixedBitSet::with_capacity(total); total];
    for (j, row) in down.iter().enumerate() {
        for i in row.ones() {
            up[i].insert(j);
        }
    }
    Poset { labels, up }
}

/// An order-preserving assignment between finite posets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    pub source: Poset,
    pub target: Poset,
    assignment: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: Poset, target: Poset, assignment: Vec<usize>) -> Result<Self, PosetError> {
        if assignment.len() != source.len() {
            return Err(PosetError::MapShape { found: assignment.len(), expected: source.len() });
        }
        if let Some(&bad) = assignment.iter().find(|&&t| t >= target.len()) {
            return Err(PosetError::ElementNotFound(bad.to_string()));
        }
        for x in 0..source.len() {
            for y in source.up[x].ones() {
                if !target.leq(assignment[x], assignment[y]) {
                    return Err(PosetError::NotMonotone(source.label(x).to_string(), source.label(y).to_string()));
                }
            }
        }
        Ok(MonotoneMap { source, target, assignment })
    }

    pub fn identity(p: Poset) -> Self {
        let n = p.len();
        MonotoneMap { source: p.clone(), target: p, assignment: (0..n).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Source elements mapping below `q`, in source order.
    pub fn slice_elements(&self, q: usize) -> Result<Vec<usize>, PosetError> {
        if q >= self.target.len() {
            return Err(PosetError::ElementNotFound(q.to_string()));
        }
        Ok((0..self.source.len()).filter(|&x| self.target.leq(self.assignment[x], q)).collect())
    }
}

/// The induced subposet `{p : f(p) <= q}`.
pub fn slice(f: &MonotoneMap, q: usize) -> Result<Poset, PosetError> {
    Ok(f.source.induced(&f.slice_elements(q)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceResult {
    pub target: String,
    pub size: usize,
    pub homology: HomologyResult,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsequenceCheck {
    pub source: HomologyResult,
    pub target: HomologyResult,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialityReport {
    pub model: String,
    pub pass: bool,
    pub failures: usize,
    pub slices: Vec<SliceResult>,
    /// Present on passing runs: homology of both nerves.
    pub consequence: Option<ConsequenceCheck>,
}

/// Every slice must be nonempty with vanishing reduced integral homology.
pub fn check_homotopy_initial(f: &MonotoneMap) -> InitialityReport {
    let slices: Vec<SliceResult> = (0..f.target.len())
        .into_par_iter()
        .map(|q| {
            let s = slice(f, q).expect("q is in range");
            let homology = order_complex(&s).reduced_homology();
            let pass = !s.is_empty() && homology.is_zero();
            SliceResult { target: f.target.label(q).to_string(), size: s.len(), homology, pass }
        })
        .collect();
    let failures = slices.iter().filter(|s| !s.pass).count();
    let pass = failures == 0;
    let consequence = pass.then(|| {
        let source = order_complex(&f.source).reduced_homology();
        let target = order_complex(&f.target).reduced_homology();
        let equal = source.same_groups(&target);
        ConsequenceCheck { source, target, equal }
    });
    InitialityReport { model: SD_MODEL.to_string(), pass: pass && consequence.as_ref().is_none_or(|c| c.equal), failures, slices, consequence }
}

/// All total orders extending P, as index sequences. At each step the
/// remaining minimal elements are tried in increasing index order.
pub fn linear_extensions(p: &Poset) -> Vec<Vec<usize>> {
    let n = p.len();
    let mut below_count: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| p.lt(i, j)).count()).collect();
    let mut used = vec![false; n];
    let mut current = Vec::with_capacity(n);
    let mut out = Vec::new();
    extend_linear(p, &mut below_count, &mut used, &mut current, &mut out);
    out
}

fn extend_linear(p: &Poset, below: &mut [usize], used: &mut [bool], current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let n = p.len();
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    for i in 0..n {
        if used[i] || below[i] != 0 {
            continue;
        }
        used[i] = true;
        current.push(i);
        for j in p.up[i].ones().filter(|&j| j != i) {
            below[j] -= 1;
        }
        extend_linear(p, below, used, current, out);
        for j in p.up[i].ones().filter(|&j| j != i) {
            below[j] += 1;
        }
        current.pop();
        used[i] = false;
    }
}

/// A set-valued presheaf: `F(p)` is `0..size(p)` and every relation
/// `p <= q` carries a restriction `F(q) -> F(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    sizes: Vec<usize>,
    restrictions: HashMap<(usize, usize), Vec<usize>>,
}

impl Presheaf {
    /// `restrict(p, q, y)` is the restriction of `y ∈ F(q)` along `p <= q`.
    pub fn new<R>(poset: &Poset, sizes: Vec<usize>, restrict: R) -> Result<Self, PosetError>
    where
        R: Fn(usize, usize, usize) -> usize + Sync,
    {
        if sizes.len() != poset.len() {
            return Err(PosetError::PresheafInvalid(format!("{} sizes for {} elements", sizes.len(), poset.len())));
        }
        let pairs: Vec<(usize, usize)> = (0..poset.len()).flat_map(|p| poset.up[p].ones().map(move |q| (p, q))).collect();
        let tables: Vec<((usize, usize), Vec<usize>)> =
            pairs.par_iter().map(|&(p, q)| ((p, q), (0..sizes[q]).map(|y| restrict(p, q, y)).collect())).collect();
        let sheaf = Presheaf { sizes, restrictions: tables.into_iter().collect() };
        sheaf.validate(poset)?;
        Ok(sheaf)
    }

    fn validate(&self, poset: &Poset) -> Result<(), PosetError> {
        for (&(p, q), table) in &self.restrictions {
            if let Some(&bad) = table.iter().find(|&&x| x >= self.sizes[p]) {
                return Err(PosetError::PresheafInvalid(format!("restriction {q}->{p} leaves F({p}) with value {bad}")));
            }
            if p == q && table.iter().enumerate().any(|(i, &x)| i != x) {
                return Err(PosetError::PresheafInvalid(format!("restriction along identity of {} is not the identity", poset.label(p))));
            }
        }
        for p in 0..poset.len() {
            for q in poset.up[p].ones() {
                for r in poset.up[q].ones() {
                    let (rq, qp, rp) = (&self.restrictions[&(q, r)], &self.restrictions[&(p, q)], &self.restrictions[&(p, r)]);
                    if (0..self.sizes[r]).any(|z| qp[rq[z]] != rp[z]) {
                        return Err(PosetError::PresheafInvalid(format!(
                            "restrictions do not compose along {} <= {} <= {}",
                            poset.label(p),
                            poset.label(q),
                            poset.label(r)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The presheaf with a fixed value `0..size` and identity restrictions.
    pub fn constant(poset: &Poset, size: usize) -> Self {
        Presheaf::new(poset, vec![size; poset.len()], |_, _, y| y).expect("constant presheaf is valid")
    }

    pub fn size(&self, p: usize) -> usize {
        self.sizes[p]
    }

    pub fn restrict(&self, p: usize, q: usize, y: usize) -> usize {
        self.restrictions[&(p, q)][y]
    }
}

/// Category of elements of a presheaf, with its projection to the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementsPoset {
    /// Projection from the elements poset (`source`) to the base (`target`).
    pub projection: MonotoneMap,
    /// `(p, x)` for each element, in poset index order.
    pub elements: Vec<(usize, usize)>,
}

impl ElementsPoset {
    pub fn poset(&self) -> &Poset {
        &self.projection.source
    }

    pub fn index_of(&self, p: usize, x: usize) -> Option<usize> {
        self.elements.iter().position(|&e| e == (p, x))
    }
}

/// `(p, x) <= (q, y)` iff `p <= q` and `y` restricts to `x`.
pub fn elements_poset(p: &Poset, f: &Presheaf) -> ElementsPoset {
    elements_poset_labelled(p, f, |q, x| format!("({}, {x})", p.label(q)))
}

pub fn elements_poset_labelled<L: Fn(usize, usize) -> String>(p: &Poset, f: &Presheaf, label: L) -> ElementsPoset {
    let elements: Vec<(usize, usize)> = (0..p.len()).flat_map(|q| (0..f.size(q)).map(move |x| (q, x))).collect();
    let offsets: Vec<usize> = (0..p.len()).scan(0, |acc, q| {
        let o = *acc;
        *acc += f.size(q);
        Some(o)
    }).collect();
    let n = elements.len();
    let mut up = vec![FixedBitSet::with_capacity(n); n];
    for (a, &(pa, x)) in elements.iter().enumerate() {
        for q in p.up[pa].ones() {
            for y in 0..f.size(q) {
                if f.restrict(pa, q, y) == x {
                    up[a].insert(offsets[q] + y);
                }
            }
        }
    }
    let labels = elements.iter().map(|&(q, x)| label(q, x)).collect();
    let poset = Poset { labels, up };
    debug_assert!(poset.validate().is_ok());
    let assignment = elements.iter().map(|e| e.0).collect();
    ElementsPoset { projection: MonotoneMap { source: poset, target: p.clone(), assignment }, elements }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn antichain(n: usize) -> Poset {
        Poset::from_relations(labels(n), &[]).unwrap()
    }

    fn chain(n: usize) -> Poset {
        Poset::from_leq(labels(n), |i, j| i <= j).unwrap()
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(Poset::from_leq(labels(2), |i, j| i < j), Err(PosetError::NotReflexive(_))));
        assert!(matches!(Poset::from_leq(labels(2), |_, _| true), Err(PosetError::NotAntisymmetric(..))));
        // 0 <= 1 <= 2 without 0 <= 2
        let r = Poset::from_leq(labels(3), |i, j| i == j || (i, j) == (0, 1) || (i, j) == (1, 2));
        assert!(matches!(r, Err(PosetError::NotTransitive(..))));
        assert!(matches!(Poset::from_relations(labels(2), &[(0, 1), (1, 0)]), Err(PosetError::NotAntisymmetric(..))));
    }

    #[test]
    fn order_complex_of_antichain_and_chain() {
        assert_eq!(order_complex(&antichain(3)).f_vector(), vec![3]);
        assert_eq!(order_complex(&chain(3)).f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn slices_of_identity_on_chain() {
        let f = MonotoneMap::identity(chain(4));
        assert_eq!(slice(&f, 3).unwrap().len(), 4);
        assert_eq!(slice(&f, 0).unwrap().len(), 1);
        assert!(matches!(slice(&f, 9), Err(PosetError::ElementNotFound(_))));
    }

    #[test]
    fn identity_maps_are_homotopy_initial() {
        let p = Poset::from_relations(labels(4), &[(0, 2), (1, 2), (1, 3)]).unwrap();
        let r = check_homotopy_initial(&MonotoneMap::identity(p));
        assert!(r.pass);
        assert!(r.consequence.unwrap().equal);
    }

    #[test]
    fn antichain_to_point_is_not_initial() {
        let f = MonotoneMap::new(antichain(2), chain(1), vec![0, 0]).unwrap();
        let r = check_homotopy_initial(&f);
        assert!(!r.pass);
        assert_eq!(r.slices[0].homology.betti(0), 1);
        assert!(r.consequence.is_none());
    }

    #[test]
    fn non_monotone_map_is_rejected() {
        assert!(matches!(MonotoneMap::new(chain(2), chain(2), vec![1, 0]), Err(PosetError::NotMonotone(..))));
    }

    #[test]
    fn linear_extension_counts() {
        assert_eq!(linear_extensions(&antichain(2)), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(linear_extensions(&chain(3)).len(), 1);
        // root < v, v < x, v < y
        let p = Poset::from_relations(labels(4), &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(linear_extensions(&p), vec![vec![0, 1, 2, 3], vec![0, 1, 3, 2]]);
    }

    #[test]
    fn constant_singleton_presheaf() {
        let p = Poset::from_relations(labels(3), &[(0, 1)]).unwrap();
        let e = elements_poset(&p, &Presheaf::constant(&p, 1));
        assert_eq!(e.poset().len(), 3);
        assert!(e.poset().leq(0, 1));
        assert!(!e.poset().leq(0, 2));
    }

    #[test]
    fn one_bottom_two_tops() {
        let p = chain(2);
        let f = Presheaf::new(&p, vec![1, 2], |a, b, y| if a == b { y } else { 0 }).unwrap();
        let e = elements_poset(&p, &f);
        let q = e.poset();
        assert_eq!(q.len(), 3);
        assert_eq!(q.minimum(), Some(0));
        assert_eq!(q.maximum(), None);
        assert!(q.leq(0, 1) && q.leq(0, 2) && !q.leq(1, 2));
    }

    #[test]
    fn presheaf_must_compose() {
        let p = chain(3);
        // F = {0,1} everywhere; identity except the 0<=2 restriction swaps.
        let r = Presheaf::new(&p, vec![2, 2, 2], |a, b, y| if (a, b) == (0, 2) { 1 - y } else { y });
        assert!(matches!(r, Err(PosetError::PresheafInvalid(_))));
    }

    #[test]
    fn face_poset_of_triangle() {
        let q = face_poset(&SimplicialSet::standard_simplex(2));
        assert_eq!(q.len(), 7);
        assert_eq!(q.maximum(), Some(6));
        assert_eq!(order_complex(&q).f_vector(), vec![7, 12, 6]);
    }
}
