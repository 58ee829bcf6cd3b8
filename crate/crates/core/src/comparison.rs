//! The comparison map from chains of partitions to trees, layerings, the
//! complexes L(T) and L^v(T), cone witnesses, and the per-tree verification
//! campaign.
//!
//! Chains are handled as index sequences into [`PartitionPoset::partitions`],
//! coarse first; a set of chains closed under taking subsequences is turned
//! into a simplicial set with i-th face deleting the i-th entry.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::partitions::{is_elementary, least, mask_elements, partition_poset, Chain, LeafSet, Mask, Partition, PartitionError, PartitionPoset};
use crate::posets::{check_homotopy_initial, face_poset, linear_extensions, order_complex, slice, InitialityReport, MonotoneMap, SD_MODEL};
use crate::simplicial::{check_simplicial_iso, cone, HomologyResult, IsoCounterexample, SimplicialMap, SimplicialSet};
use crate::trees::{enumerate_trees, Pruned, Tree, TreeError, TreePoset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComparisonError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("the corolla has no layerings")]
    NotInTPlus,
    #[error("{0} is not a leaf vertex")]
    NotLeafVertex(String),
    #[error("cone witness failed for {subset}: {reason}")]
    WitnessFailed { subset: String, reason: String },
}

/// Family of the tree obtained by forgetting layers and unary vertices.
pub fn phi(sigma: &Chain, leaves: &LeafSet) -> Tree {
    let mut family = vec![leaves.full()];
    for p in sigma.parts() {
        family.extend(p.blocks().iter().copied().filter(|b| b.count_ones() >= 2));
    }
    Tree::new(leaves.clone(), family).expect("blocks of a chain are laminar")
}

/// The last partition of the chain.
pub fn zeta(sigma: &Chain) -> Partition {
    sigma.last().clone()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layering {
    pub chain: Chain,
    pub tree: Tree,
    pub elementary: bool,
    /// Members in the order they split, root first.
    pub extension: Option<Vec<Mask>>,
}

impl Layering {
    /// Last member of the extension.
    pub fn top(&self) -> Option<Mask> {
        self.extension.as_ref().and_then(|e| e.last().copied())
    }
}

/// Chain for a root-first ordering `s` of the members: layer `i` has the
/// maximal members among `s[i+1..]` as blocks.
fn layering_partitions(t: &Tree, ext: &[Mask]) -> Vec<Partition> {
    let n = t.leaves().len();
    (0..ext.len() - 1)
        .map(|i| {
            let rest = &ext[i + 1..];
            let maximal: Vec<Mask> = rest.iter().copied().filter(|&m| !rest.iter().any(|&o| o != m && o & m == m)).collect();
            let covered = maximal.iter().fold(0, |a, &m| a | m);
            let mut blocks = maximal;
            blocks.extend(mask_elements(t.leaves().full() & !covered).map(|i| 1 << i));
            Partition::from_blocks(n, &blocks).expect("maximal members are disjoint")
        })
        .collect()
}

pub fn elementary_layerings(t: &Tree) -> Result<Vec<Layering>, ComparisonError> {
    if t.vertex_count() < 2 {
        return Err(ComparisonError::NotInTPlus);
    }
    let family = t.family();
    let out = linear_extensions(&t.vertex_poset())
        .into_iter()
        .map(|ext| {
            let ext: Vec<Mask> = ext.iter().map(|&i| family[i]).collect();
            let chain = Chain::new(layering_partitions(t, &ext)).expect("layering is a strict chain");
            debug_assert_eq!(phi(&chain, t.leaves()), *t);
            let elementary = is_elementary(&chain);
            Layering { chain, tree: t.clone(), elementary, extension: Some(ext) }
        })
        .collect();
    Ok(out)
}

fn sort_chains(chains: &mut [Vec<usize>]) {
    chains.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
}

fn subchains(c: &[usize], into: &mut BTreeSet<Vec<usize>>) {
    for mask in 1u32..(1 << c.len()) {
        into.insert(c.iter().enumerate().filter(|&(i, _)| mask & (1 << i) != 0).map(|(_, &x)| x).collect());
    }
}

/// A simplicial set on a face-closed chain set, with the position of each chain.
#[derive(Debug, Clone)]
pub struct ChainComplexIndex {
    pub set: SimplicialSet,
    pub chains: Vec<Vec<usize>>,
    /// chain -> (dimension, index)
    pub position: HashMap<Vec<usize>, (usize, usize)>,
}

/// Partition poset of one leaf set with the chain-level constructions on it.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub pp: PartitionPoset,
    big_blocks: Vec<Vec<Mask>>,
}

impl Comparison {
    pub fn new(leaves: &LeafSet) -> Result<Self, ComparisonError> {
        let pp = partition_poset(leaves)?;
        let big_blocks = pp.partitions.iter().map(|p| p.blocks().iter().copied().filter(|b| b.count_ones() >= 2).collect()).collect();
        Ok(Comparison { pp, big_blocks })
    }

    pub fn leaves(&self) -> &LeafSet {
        &self.pp.leaves
    }

    pub fn chain(&self, idx: &[usize]) -> Chain {
        Chain::new(idx.iter().map(|&i| self.pp.partitions[i].clone()).collect()).expect("indices form a chain")
    }

    pub fn indices(&self, chain: &Chain) -> Vec<usize> {
        chain.parts().iter().map(|p| self.pp.index_of(p).expect("nontrivial partition")).collect()
    }

    pub fn display_chain(&self, idx: &[usize]) -> String {
        self.chain(idx).display(self.leaves())
    }

    pub fn complex(&self, mut chains: Vec<Vec<usize>>) -> ChainComplexIndex {
        sort_chains(&mut chains);
        let set = SimplicialSet::from_flags(&chains, |c: &[usize]| self.display_chain(c)).expect("chain set is closed under faces");
        let mut position = HashMap::with_capacity(chains.len());
        let mut per_dim: Vec<usize> = Vec::new();
        for c in &chains {
            let d = c.len() - 1;
            if per_dim.len() <= d {
                per_dim.resize(d + 1, 0);
            }
            position.insert(c.clone(), (d, per_dim[d]));
            per_dim[d] += 1;
        }
        ChainComplexIndex { set, chains, position }
    }

    /// Chains whose every non-singleton block is a member of `t`.
    pub fn l_chains(&self, t: &Tree) -> Vec<Vec<usize>> {
        let elems: Vec<usize> = (0..self.pp.partitions.len()).filter(|&p| self.big_blocks[p].iter().all(|&b| t.contains(b))).collect();
        let sub = self.pp.poset.induced(&elems);
        let mut chains: Vec<Vec<usize>> = sub.chains().into_iter().map(|c| c.iter().map(|&i| elems[i]).collect()).collect();
        sort_chains(&mut chains);
        chains
    }

    pub fn elementary_chains(&self, t: &Tree) -> Result<Vec<(Vec<usize>, Mask)>, ComparisonError> {
        Ok(elementary_layerings(t)?.iter().map(|l| (self.indices(&l.chain), l.top().expect("extension present"))).collect())
    }

    /// Faces of elementary layerings whose extension ends with `v`.
    pub fn lv_chains(&self, t: &Tree, v: Mask) -> Result<Vec<Vec<usize>>, ComparisonError> {
        if !t.leaf_vertices().contains(&v) {
            return Err(ComparisonError::NotLeafVertex(format!("{{{}}}", t.format_member(v))));
        }
        let mut set = BTreeSet::new();
        for (c, top) in self.elementary_chains(t)? {
            if top == v {
                subchains(&c, &mut set);
            }
        }
        let mut out: Vec<Vec<usize>> = set.into_iter().collect();
        sort_chains(&mut out);
        Ok(out)
    }

    fn expand(&self, pruned: &Pruned, p: &Partition) -> usize {
        let blocks: Vec<Mask> = p.blocks().iter().map(|&b| pruned.expand(b)).collect();
        let q = Partition::from_blocks(self.leaves().len(), &blocks).expect("expansion is a partition");
        self.pp.index_of(&q).expect("expansion of a nontrivial partition is nontrivial")
    }

    /// Identifies the cone on L(prune(T, W)) with the intersection of the
    /// L^v(T) for v in W. Chains expand markers back to their blocks, and
    /// the apex goes to the partition whose only large blocks are W.
    pub fn cone_witness(&self, t: &Tree, w: &[Mask], fault: Option<u64>) -> Result<ConeWitness, ComparisonError> {
        if t.vertex_count() < 2 {
            return Err(ComparisonError::NotInTPlus);
        }
        let pruned = t.prune(w)?;
        let n = self.leaves().len();
        let pi_w = {
            let covered = w.iter().fold(0, |a, &m| a | m);
            let mut blocks = w.to_vec();
            blocks.extend(mask_elements(self.leaves().full() & !covered).map(|i| 1 << i));
            self.pp.index_of(&Partition::from_blocks(n, &blocks).expect("disjoint members")).expect("nontrivial")
        };
        // L of the pruned tree and the images of its chains.
        let (base, base_images): (SimplicialSet, Vec<Vec<usize>>) = if pruned.tree.vertex_count() < 2 {
            (SimplicialSet::empty(), Vec::new())
        } else {
            let sub = Comparison::new(pruned.tree.leaves())?;
            let idx = sub.complex(sub.l_chains(&pruned.tree));
            let images = idx
                .chains
                .iter()
                .map(|c| c.iter().map(|&i| self.expand(&pruned, &sub.pp.partitions[i])).collect())
                .collect();
            (idx.set, images)
        };
        let (mut source, _) = cone(&base);
        let mut target_set: Option<BTreeSet<Vec<usize>>> = None;
        for &v in w {
            let s: BTreeSet<Vec<usize>> = self.lv_chains(t, v)?.into_iter().collect();
            target_set = Some(match target_set {
                None => s,
                Some(prev) => prev.intersection(&s).cloned().collect(),
            });
        }
        let target = self.complex(target_set.unwrap_or_default().into_iter().collect());

        let f = base.f_vector();
        let by_dim: Vec<Vec<&Vec<usize>>> = (0..f.len()).map(|d| base_images.iter().filter(|c| c.len() == d + 1).collect()).collect();
        let dims = f.len() + 1;
        let mut missing: Option<IsoCounterexample> = None;
        let mut images: Vec<Vec<usize>> = Vec::with_capacity(dims);
        for d in 0..dims {
            let mut row: Vec<Vec<usize>> = by_dim.get(d).map(|v| v.iter().map(|c| (*c).clone()).collect()).unwrap_or_default();
            if d == 0 {
                row.push(vec![pi_w]);
            } else {
                row.extend(by_dim[d - 1].iter().map(|c| {
                    let mut c = (*c).clone();
                    c.push(pi_w);
                    c
                }));
            }
            let mut out = Vec::with_capacity(row.len());
            for (k, c) in row.iter().enumerate() {
                match target.position.get(c) {
                    Some(&(td, ti)) if td == d => out.push(ti),
                    _ => {
                        missing.get_or_insert(IsoCounterexample {
                            dim: d,
                            simplex: k,
                            reason: format!("image {} is not in the intersection", self.display_chain(c)),
                        });
                        out.push(usize::MAX);
                    }
                }
            }
            images.push(out);
        }
        if let Some(seed) = fault {
            if source.count(1) > 0 {
                let s = (seed as usize) % source.count(1);
                let i = (seed as usize / source.count(1)) % 2;
                let old = source.face(1, s, i).index;
                let (labels, faces) = source.with_corrupted_face(1, s, i, (old + 1) % source.count(0));
                match SimplicialSet::build(labels, faces) {
                    Ok(x) => source = x,
                    Err(e) => {
                        missing.get_or_insert(IsoCounterexample { dim: 1, simplex: s, reason: format!("corrupted source: {e}") });
                    }
                }
            }
        }
        let map = SimplicialMap::from_indices(images);
        let counterexample = match missing {
            Some(c) => Some(c),
            None => check_simplicial_iso(&source, &target.set, &map).err(),
        };
        Ok(ConeWitness {
            subset: w.iter().map(|&m| t.format_member(m)).collect(),
            source_f_vector: source.f_vector(),
            target_f_vector: target.set.f_vector(),
            counterexample,
            map,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeWitness {
    pub subset: Vec<String>,
    pub source_f_vector: Vec<usize>,
    pub target_f_vector: Vec<usize>,
    pub counterexample: Option<IsoCounterexample>,
    #[serde(skip_serializing)]
    #[serde(default = "empty_map")]
    pub map: SimplicialMap,
}

fn empty_map() -> SimplicialMap {
    SimplicialMap::from_indices(Vec::new())
}

impl ConeWitness {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn verified(self) -> Result<Self, ComparisonError> {
        match &self.counterexample {
            None => Ok(self),
            Some(c) => Err(ComparisonError::WitnessFailed { subset: self.subset.join(" "), reason: c.reason.clone() }),
        }
    }
}

/// L(T) as a subcomplex of the partition complex. Empty for the corolla.
pub fn layering_complex(t: &Tree) -> Result<SimplicialSet, ComparisonError> {
    if t.vertex_count() < 2 {
        return Ok(SimplicialSet::empty());
    }
    let c = Comparison::new(t.leaves())?;
    Ok(c.complex(c.l_chains(t)).set)
}

pub fn lv_complex(t: &Tree, v: Mask) -> Result<SimplicialSet, ComparisonError> {
    if t.vertex_count() < 2 {
        return Err(ComparisonError::NotInTPlus);
    }
    let c = Comparison::new(t.leaves())?;
    Ok(c.complex(c.lv_chains(t, v)?).set)
}

pub fn cone_witness(t: &Tree, w: &[Mask]) -> Result<ConeWitness, ComparisonError> {
    Comparison::new(t.leaves())?.cone_witness(t, w, None)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Largest leaf-vertex subset given a cone witness; all when `None`.
    pub max_cone_subset: Option<usize>,
    /// Corrupts one face in one cone witness, chosen from the seed.
    pub fault_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    pub tree: Value,
    pub pass: bool,
    pub cover_ok: bool,
    pub cone_ok: Vec<ConeWitness>,
    pub homology: HomologyResult,
    pub slice_match: bool,
    pub f_vector: Vec<usize>,
    pub elementary_layerings: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub leaves: Vec<String>,
    pub model: String,
    pub pass: bool,
    pub vacuous: bool,
    pub tree_count: usize,
    pub failures: usize,
    pub trees: Vec<TreeReport>,
}

/// Everything needed to verify the trees of one leaf set, shared across trees.
pub struct Campaign {
    pub comparison: Comparison,
    pub tplus: TreePoset,
    /// Chains of the partition poset under the face relation, mapped to trees.
    pub phi: MonotoneMap,
    /// Same source, mapped to the last partition.
    pub zeta: MonotoneMap,
    /// Tree indices into `tplus`, sorted by serialization.
    pub order: Vec<usize>,
}

impl Campaign {
    pub fn new(leaves: &LeafSet) -> Result<Self, ComparisonError> {
        let comparison = Comparison::new(leaves)?;
        let tplus = enumerate_trees(leaves, false)?;
        let complex = order_complex(&comparison.pp.poset);
        let chains = comparison.pp.poset.chains();
        let source = face_poset(&complex);
        debug_assert_eq!(source.len(), chains.len());
        let phi_assign: Vec<usize> = chains
            .iter()
            .map(|c| tplus.index_of(&phi(&comparison.chain(c), leaves)).expect("image of a chain lies in T+"))
            .collect();
        let zeta_assign: Vec<usize> = chains.iter().map(|c| *c.last().expect("nonempty")).collect();
        let phi = MonotoneMap::new(source.clone(), tplus.poset.clone(), phi_assign).expect("phi is monotone");
        let zeta = MonotoneMap::new(source, comparison.pp.poset.clone(), zeta_assign).expect("zeta is monotone");
        let keys: Vec<String> = tplus.trees.iter().map(Tree::serialize).collect();
        let mut order: Vec<usize> = (0..tplus.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        Ok(Campaign { comparison, tplus, phi, zeta, order })
    }

    pub fn trees(&self) -> impl Iterator<Item = &Tree> {
        self.order.iter().map(|&i| &self.tplus.trees[i])
    }

    /// Position in report order of the tree a fault seed lands on: the first
    /// tree from `seed mod count` on with at least three vertices.
    pub fn fault_target(&self, seed: u64) -> Option<usize> {
        let n = self.order.len();
        (0..n).map(|k| (seed as usize + k) % n).find(|&k| self.tplus.trees[self.order[k]].vertex_count() >= 3)
    }

    pub fn verify_tree(&self, t: &Tree, opts: &VerifyOptions, fault: Option<u64>) -> Result<TreeReport, ComparisonError> {
        let c = &self.comparison;
        let mut failures = Vec::new();
        let l_chains = c.l_chains(t);
        let l = c.complex(l_chains.clone());
        let l_set: BTreeSet<Vec<usize>> = l_chains.iter().cloned().collect();

        let leaf_vertices = t.leaf_vertices();
        let mut union: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut lv_sets = Vec::with_capacity(leaf_vertices.len());
        for &v in &leaf_vertices {
            let s: BTreeSet<Vec<usize>> = c.lv_chains(t, v)?.into_iter().collect();
            union.extend(s.iter().cloned());
            lv_sets.push(s);
        }
        let maximal_ok = l_chains
            .iter()
            .filter(|s| !l_chains.iter().any(|o| o.len() > s.len() && is_subsequence(s, o)))
            .all(|s| lv_sets.iter().any(|lv| lv.contains(s)));
        let cover_ok = maximal_ok && union == l_set;
        if !cover_ok {
            let extra: Vec<String> = l_set.symmetric_difference(&union).take(3).map(|ch| c.display_chain(ch)).collect();
            failures.push(format!("cover mismatch: {}", extra.join("; ")));
        }

        let elementary = c.elementary_chains(t)?;
        for (ch, _) in &elementary {
            if ch.len() != t.vertex_count() - 1 || !is_elementary(&c.chain(ch)) {
                failures.push(format!("layering {} has the wrong shape", c.display_chain(ch)));
            }
        }

        let cap = opts.max_cone_subset.unwrap_or(leaf_vertices.len());
        let mut witnesses = Vec::new();
        let mut fault = fault;
        for mask in 1u32..(1 << leaf_vertices.len()) {
            if mask.count_ones() as usize > cap {
                continue;
            }
            let w: Vec<Mask> = leaf_vertices.iter().enumerate().filter(|&(i, _)| mask & (1 << i) != 0).map(|(_, &v)| v).collect();
            let here = match fault {
                Some(_) if t.prune(&w)?.tree.vertex_count() >= 2 => fault.take(),
                _ => None,
            };
            let wit = c.cone_witness(t, &w, here)?;
            if let Some(ce) = &wit.counterexample {
                failures.push(format!("cone witness for {{{}}}: {}", wit.subset.join(", "), ce.reason));
            }
            witnesses.push(wit);
        }

        let homology = l.set.reduced_homology();
        if !homology.is_zero() {
            failures.push(format!("L(T) is not acyclic: {homology}"));
        }

        let q = self.tplus.index_of(t).expect("tree lies in T+");
        let sl = slice(&self.phi, q).expect("tree index is in range");
        let slice_homology = order_complex(&sl).reduced_homology();
        let slice_match = slice_homology.same_groups(&homology);
        if !slice_match {
            failures.push(format!("slice homology {slice_homology} differs from {homology}"));
        }

        Ok(TreeReport {
            tree: t.to_json(),
            pass: failures.is_empty(),
            cover_ok,
            cone_ok: witnesses,
            homology,
            slice_match,
            f_vector: l.set.f_vector(),
            elementary_layerings: elementary.len(),
            failures,
        })
    }

    pub fn verify(&self, opts: &VerifyOptions) -> Result<TheoremReport, ComparisonError> {
        let fault_at = opts.fault_seed.and_then(|s| self.fault_target(s));
        let trees: Vec<&Tree> = self.trees().collect();
        let reports = trees
            .par_iter()
            .enumerate()
            .map(|(k, t)| self.verify_tree(t, opts, if Some(k) == fault_at { opts.fault_seed } else { None }))
            .collect::<Result<Vec<_>, _>>()?;
        let failures = reports.iter().filter(|r| !r.pass).count();
        Ok(TheoremReport {
            leaves: self.comparison.leaves().labels().to_vec(),
            model: SD_MODEL.to_string(),
            pass: failures == 0,
            vacuous: reports.is_empty(),
            tree_count: reports.len(),
            failures,
            trees: reports,
        })
    }
}

fn is_subsequence(a: &[usize], b: &[usize]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

/// Runs the per-tree checks for every tree of T+(A).
pub fn verify_theorem(leaves: &LeafSet, opts: &VerifyOptions) -> Result<TheoremReport, ComparisonError> {
    Campaign::new(leaves)?.verify(opts)
}

pub fn verify_single_tree(t: &Tree, opts: &VerifyOptions) -> Result<TreeReport, ComparisonError> {
    if t.vertex_count() < 2 {
        return Err(ComparisonError::NotInTPlus);
    }
    Campaign::new(t.leaves())?.verify_tree(t, opts, opts.fault_seed)
}

pub fn verify_phi(leaves: &LeafSet) -> Result<InitialityReport, ComparisonError> {
    Ok(check_homotopy_initial(&Campaign::new(leaves)?.phi))
}

pub fn verify_zeta(leaves: &LeafSet) -> Result<InitialityReport, ComparisonError> {
    Ok(check_homotopy_initial(&Campaign::new(leaves)?.zeta))
}

/// Sort key placing a leaf vertex list in the order used by reports.
pub fn subset_label(t: &Tree, w: &[Mask]) -> String {
    let mut w = w.to_vec();
    w.sort_by_key(|&m| least(m));
    w.iter().map(|&m| t.format_member(m)).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six() -> LeafSet {
        LeafSet::standard(6).unwrap()
    }

    fn sample_tree() -> Tree {
        Tree::parse(&six(), &["abcde", "ab", "cde"]).unwrap()
    }

    #[test]
    fn phi_examples() {
        let a = six();
        let s = Chain::parse(&a, &["(abcde)(f)", "(ab)(cde)(f)"]).unwrap();
        assert_eq!(phi(&s, &a), sample_tree());
        let abc = LeafSet::standard(3).unwrap();
        let t = phi(&Chain::parse(&abc, &["(ab)(c)"]).unwrap(), &abc);
        assert_eq!(t, Tree::parse(&abc, &["ab"]).unwrap());
        assert_eq!(zeta(&s), Partition::parse(&a, "(ab)(cde)(f)").unwrap());
    }

    #[test]
    fn sample_layerings() {
        let a = six();
        let mut got: Vec<String> = elementary_layerings(&sample_tree()).unwrap().iter().map(|l| l.chain.display(&a)).collect();
        got.sort();
        assert_eq!(
            got,
            vec!["[(abcde)(f), (ab)(cde)(f), (a)(b)(cde)(f)]", "[(abcde)(f), (ab)(cde)(f), (ab)(c)(d)(e)(f)]"]
        );
        assert_eq!(elementary_layerings(&Tree::corolla(a)), Err(ComparisonError::NotInTPlus));
    }

    #[test]
    fn small_layering_complexes() {
        let abc = LeafSet::standard(3).unwrap();
        let t = Tree::parse(&abc, &["ab"]).unwrap();
        assert_eq!(elementary_layerings(&t).unwrap().len(), 1);
        assert_eq!(layering_complex(&t).unwrap().f_vector(), vec![1]);

        let abcd = LeafSet::standard(4).unwrap();
        let t2 = Tree::parse(&abcd, &["ab", "cd"]).unwrap();
        let ls = elementary_layerings(&t2).unwrap();
        assert_eq!(ls.len(), 2);
        assert!(ls.iter().all(|l| l.chain.parts()[0] == Partition::parse(&abcd, "(ab)(cd)").unwrap()));
        let l = layering_complex(&t2).unwrap();
        assert_eq!(l.f_vector(), vec![3, 2]);
        assert!(l.reduced_homology().is_zero());
        let lv = lv_complex(&t2, abcd.parse_mask("ab").unwrap()).unwrap();
        assert_eq!(lv.f_vector(), vec![2, 1]);
        assert_eq!(lv.label(1, 0), "[(ab)(cd), (ab)(c)(d)]");
    }

    #[test]
    fn corolla_has_empty_l() {
        assert!(layering_complex(&Tree::corolla(six())).unwrap().is_empty());
    }

    #[test]
    fn cone_witness_examples() {
        let abcd = LeafSet::standard(4).unwrap();
        let t = Tree::parse(&abcd, &["ab", "cd"]).unwrap();
        let w = cone_witness(&t, &t.leaf_vertices()).unwrap();
        assert!(w.ok());
        assert_eq!(w.source_f_vector, vec![1]);

        let abc = LeafSet::standard(3).unwrap();
        let t = Tree::parse(&abc, &["ab"]).unwrap();
        assert!(cone_witness(&t, &t.leaf_vertices()).unwrap().ok());

        let t = sample_tree();
        let w = cone_witness(&t, &[six().parse_mask("ab").unwrap()]).unwrap().verified().unwrap();
        assert_eq!(w.source_f_vector, w.target_f_vector);
        assert_eq!(w.source_f_vector.len(), 3);
    }

    #[test]
    fn injected_fault_breaks_witness() {
        let t = sample_tree();
        let c = Comparison::new(t.leaves()).unwrap();
        let w = c.cone_witness(&t, &[six().parse_mask("ab").unwrap()], Some(3)).unwrap();
        assert!(!w.ok());
        assert!(w.verified().is_err());
    }

    #[test]
    fn small_campaigns() {
        let r = verify_theorem(&LeafSet::standard(3).unwrap(), &VerifyOptions::default()).unwrap();
        assert!(r.pass && r.tree_count == 3);
        assert!(r.trees.iter().all(|t| t.f_vector == vec![1]));
        let r2 = verify_theorem(&LeafSet::standard(2).unwrap(), &VerifyOptions::default()).unwrap();
        assert!(r2.pass && r2.vacuous);
    }

    #[test]
    fn single_tree_slice_example() {
        let abcd = LeafSet::standard(4).unwrap();
        let t = Tree::parse(&abcd, &["ab"]).unwrap();
        let camp = Campaign::new(&abcd).unwrap();
        let q = camp.tplus.index_of(&t).unwrap();
        let s = slice(&camp.phi, q).unwrap();
        assert_eq!(s.labels(), &["(ab)(c)(d)"]);
        assert!(verify_single_tree(&t, &VerifyOptions::default()).unwrap().pass);
    }

    #[test]
    fn sample_tree_report() {
        let r = verify_single_tree(&sample_tree(), &VerifyOptions::default()).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.cone_ok.len(), 3);
        assert_eq!(r.elementary_layerings, 2);
    }
}
