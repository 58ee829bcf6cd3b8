//! The nerve of an operad as a presheaf of vertex labellings on tree posets,
//! and the labelled partition complex over it.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{reorder, FiniteOperad, Op, OperadError};
use crate::comparison::phi;
use crate::partitions::{least, partition_poset, Chain, LeafSet, Mask};
use crate::posets::{check_homotopy_initial, elements_poset_labelled, face_poset, ElementsPoset, InitialityReport, MonotoneMap, Presheaf};
use crate::simplicial::{Face, HomologyResult, SimplicialSet};
use crate::trees::{children_in, enumerate_trees, Tree, TreePoset};

/// `N O` on `T(A)` or `T⁺(A)`. A labelling of a tree lists one operation per
/// family member, in family order, of arity equal to the member's child count.
#[derive(Debug, Clone)]
pub struct Nerve {
    pub operad: FiniteOperad,
    pub trees: TreePoset,
    pub presheaf: Presheaf,
    labellings: Vec<Vec<Vec<Op>>>,
    index: Vec<HashMap<Vec<Op>, usize>>,
}

fn arities(t: &Tree) -> Vec<usize> {
    t.family().iter().map(|&s| t.arity(s)).collect()
}

/// Every labelling of `t`, lexicographic with the root most significant.
fn all_labellings(op: &FiniteOperad, t: &Tree) -> Result<Vec<Vec<Op>>, OperadError> {
    let ar = arities(t);
    for &a in &ar {
        op.check_arity(a)?;
    }
    let mut out: Vec<Vec<Op>> = vec![Vec::new()];
    for &a in &ar {
        let c = op.count(a) as Op;
        out = out.into_iter().flat_map(|l| (0..c).map(move |x| [l.as_slice(), &[x]].concat())).collect();
    }
    Ok(out)
}

/// Contracts the inner edge above `v`: the label of `v` is composed into
/// its parent at `v`'s position and the result is moved back to the
/// canonical order of the parent's new children.
pub fn contract_edge(op: &FiniteOperad, family: &mut Vec<Mask>, labels: &mut Vec<Op>, v: Mask) -> Result<(), OperadError> {
    let vi = family.iter().position(|&m| m == v).expect("v is a member");
    let p = family.iter().copied().filter(|&m| m != v && m & v == v).min_by_key(|m| m.count_ones()).expect("v is not the root");
    let pi = family.iter().position(|&m| m == p).expect("parent is a member");
    let kids_p = children_in(family, p);
    let kids_v = children_in(family, v);
    let inputs: Vec<(usize, Op)> = kids_p.iter().map(|&c| if c == v { (kids_v.len(), labels[vi]) } else { (1, 0) }).collect();
    let psi = op.compose(kids_p.len(), labels[pi], &inputs)?;
    let given: Vec<Mask> = kids_p.iter().flat_map(|&c| if c == v { kids_v.clone() } else { vec![c] }).collect();
    let mut canonical = given.clone();
    canonical.sort_by_key(|&m| least(m));
    labels[pi] = op.act(given.len(), psi, &reorder(&given, &canonical));
    family.remove(vi);
    labels.remove(vi);
    Ok(())
}

/// Restricts a labelling of `family` to the subfamily `target`, contracting
/// the extra members in the given order.
pub fn restrict_labelling(op: &FiniteOperad, family: &[Mask], labels: &[Op], target: &[Mask], order: &[Mask]) -> Result<Vec<Op>, OperadError> {
    let (mut f, mut l) = (family.to_vec(), labels.to_vec());
    for &v in order {
        contract_edge(op, &mut f, &mut l, v)?;
    }
    debug_assert_eq!(f, target);
    Ok(l)
}

/// Members of `family` missing from `target`, largest first.
fn extra_members(family: &[Mask], target: &[Mask]) -> Vec<Mask> {
    family.iter().copied().filter(|m| !target.contains(m)).collect()
}

pub fn nerve(op: &FiniteOperad, leaves: &LeafSet, include_corolla: bool) -> Result<Nerve, OperadError> {
    let trees = enumerate_trees(leaves, include_corolla)?;
    let labellings: Vec<Vec<Vec<Op>>> = trees.trees.iter().map(|t| all_labellings(op, t)).collect::<Result<_, _>>()?;
    let index: Vec<HashMap<Vec<Op>, usize>> =
        labellings.iter().map(|ls| ls.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect()).collect();
    let sizes = labellings.iter().map(Vec::len).collect();
    let presheaf = Presheaf::new(&trees.poset, sizes, |p, q, y| {
        let (fp, fq) = (trees.trees[p].family(), trees.trees[q].family());
        let order = extra_members(fq, fp);
        let l = restrict_labelling(op, fq, &labellings[q][y], fp, &order).expect("arities stay within those of the smaller tree");
        index[p][&l]
    })
    .map_err(|e| OperadError::AxiomViolation(format!("nerve of {}: {e}", op.name())))?;
    Ok(Nerve { operad: op.clone(), trees, presheaf, labellings, index })
}

impl Nerve {
    pub fn labellings(&self, t: usize) -> &[Vec<Op>] {
        &self.labellings[t]
    }

    pub fn labelling_index(&self, t: usize, labels: &[Op]) -> Option<usize> {
        self.index[t].get(labels).copied()
    }

    /// `{abc, ab}[2:1 2:0]`
    pub fn describe(&self, t: usize, x: usize) -> String {
        let tree = &self.trees.trees[t];
        let ops: Vec<String> = tree.family().iter().zip(&self.labellings[t][x]).map(|(&s, &o)| self.operad.op_name(tree.arity(s), o)).collect();
        format!("{}[{}]", tree.display(), ops.join(" "))
    }

    pub fn total(&self) -> usize {
        self.labellings.iter().map(Vec::len).sum()
    }

    pub fn elements(&self) -> ElementsPoset {
        elements_poset_labelled(&self.trees.poset, &self.presheaf, |t, x| self.describe(t, x))
    }

    /// Restricts along every comparable pair of trees with every order of
    /// single-edge contractions, and reports the first pair on which two
    /// orders disagree.
    pub fn check_contraction_orders(&self) -> Result<(), OperadError> {
        let n = self.trees.len();
        for q in 0..n {
            for p in 0..n {
                if p == q || !self.trees.poset.leq(p, q) {
                    continue;
                }
                let (fp, fq) = (self.trees.trees[p].family(), self.trees.trees[q].family());
                let extra = extra_members(fq, fp);
                for (y, l) in self.labellings[q].iter().enumerate() {
                    let want = &self.labellings[p][self.presheaf.restrict(p, q, y)];
                    for order in orders(&extra) {
                        if &restrict_labelling(&self.operad, fq, l, fp, &order)? != want {
                            return Err(OperadError::AxiomViolation(format!(
                                "contraction order {:?} changes the restriction of {} to {}",
                                order.iter().map(|&m| self.trees.leaves.format_mask(m)).collect::<Vec<_>>(),
                                self.describe(q, y),
                                self.trees.trees[p].display()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn orders(extra: &[Mask]) -> Vec<Vec<Mask>> {
    if extra.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..extra.len() {
        let mut rest = extra.to_vec();
        let first = rest.remove(i);
        for mut o in orders(&rest) {
            o.insert(0, first);
            out.push(o);
        }
    }
    out
}

/// `N P(A)_O` with its comparison to the elements poset of `N O` on `T⁺(A)`.
#[derive(Debug, Clone)]
pub struct LabelledComplex {
    pub set: SimplicialSet,
    /// `(chain of partition indices, tree index, labelling index)` per simplex,
    /// dimension by dimension.
    pub simplices: Vec<(Vec<usize>, usize, usize)>,
    pub nerve: Nerve,
    pub elements: ElementsPoset,
    /// From the face poset of `set` to the elements poset.
    pub comparison: MonotoneMap,
}

pub fn labelled_complex(op: &FiniteOperad, leaves: &LeafSet) -> Result<LabelledComplex, OperadError> {
    let pp = partition_poset(leaves)?;
    let nerve = nerve(op, leaves, false)?;
    let chains = pp.poset.chains();
    let chain_of = |c: &[usize]| Chain::new(c.iter().map(|&i| pp.partitions[i].clone()).collect()).expect("poset chains are strict");
    let tree_of = |c: &[usize]| nerve.trees.index_of(&phi(&chain_of(c), leaves)).expect("image of a chain lies in T+");

    let top = chains.last().map_or(0, Vec::len);
    let mut by_dim: Vec<Vec<(Vec<usize>, usize, usize)>> = vec![Vec::new(); top];
    for c in &chains {
        let t = tree_of(c);
        for x in 0..nerve.presheaf.size(t) {
            by_dim[c.len() - 1].push((c.clone(), t, x));
        }
    }
    let position: Vec<HashMap<(Vec<usize>, usize), usize>> =
        by_dim.iter().map(|d| d.iter().enumerate().map(|(k, (c, _, x))| ((c.clone(), *x), k)).collect()).collect();
    let mut labels = Vec::with_capacity(top);
    let mut faces = Vec::with_capacity(top);
    for (d, simplices) in by_dim.iter().enumerate() {
        labels.push(simplices.iter().map(|(c, t, x)| format!("{} {}", chain_of(c).display(leaves), nerve.describe(*t, *x))).collect::<Vec<_>>());
        let fd: Vec<Vec<Face>> = simplices
            .iter()
            .map(|(c, t, x)| {
                if d == 0 {
                    return Vec::new();
                }
                (0..=d)
                    .map(|i| {
                        let mut f = c.clone();
                        f.remove(i);
                        let tf = tree_of(&f);
                        let y = nerve.presheaf.restrict(tf, *t, *x);
                        Face::new(position[d - 1][&(f, y)])
                    })
                    .collect()
            })
            .collect();
        faces.push(fd);
    }
    let set = SimplicialSet::build(labels, faces).map_err(|e| OperadError::AxiomViolation(format!("labelled complex: {e}")))?;

    let elements = nerve.elements();
    let offsets: Vec<usize> = (0..nerve.trees.len())
        .scan(0, |acc, t| {
            let o = *acc;
            *acc += nerve.presheaf.size(t);
            Some(o)
        })
        .collect();
    let simplices: Vec<(Vec<usize>, usize, usize)> = by_dim.into_iter().flatten().collect();
    let assignment = simplices.iter().map(|(_, t, x)| offsets[*t] + x).collect();
    let comparison = MonotoneMap::new(face_poset(&set), elements.poset().clone(), assignment)
        .map_err(|e| OperadError::AxiomViolation(format!("labelled comparison: {e}")))?;
    Ok(LabelledComplex { set, simplices, nerve, elements, comparison })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledReport {
    pub operad: String,
    pub leaves: Vec<String>,
    pub model: String,
    pub pass: bool,
    pub f_vector: Vec<usize>,
    pub elements: usize,
    /// Reduced homology of the labelled complex.
    pub homology: HomologyResult,
    /// Reduced homology of the order complex of the elements poset.
    pub target_homology: HomologyResult,
    pub homology_equal: bool,
    pub initiality: InitialityReport,
}

pub fn verify_labelled_comparison(op: &FiniteOperad, leaves: &LeafSet) -> Result<LabelledReport, OperadError> {
    let lc = labelled_complex(op, leaves)?;
    let initiality = check_homotopy_initial(&lc.comparison);
    let homology = lc.set.reduced_homology();
    let target_homology = lc.elements.poset().order_complex().reduced_homology();
    let homology_equal = homology.same_groups(&target_homology);
    Ok(LabelledReport {
        operad: op.name().to_string(),
        leaves: leaves.labels().to_vec(),
        model: initiality.model.clone(),
        pass: initiality.pass && homology_equal,
        f_vector: lc.set.f_vector(),
        elements: lc.elements.poset().len(),
        homology,
        target_homology,
        homology_equal,
        initiality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> LeafSet {
        LeafSet::parse("a,b,c").unwrap()
    }

    #[test]
    fn comm_is_singleton() {
        let n = nerve(&FiniteOperad::comm(4), &LeafSet::standard(4).unwrap(), true).unwrap();
        assert!((0..n.trees.len()).all(|t| n.presheaf.size(t) == 1));
    }

    #[test]
    fn assoc_examples() {
        let op = FiniteOperad::assoc(3);
        let n = nerve(&op, &abc(), true).unwrap();
        let corolla = n.trees.index_of(&Tree::corolla(abc())).unwrap();
        assert_eq!(n.presheaf.size(corolla), 6);
        let t = n.trees.index_of(&Tree::parse(&abc(), &["ab"]).unwrap()).unwrap();
        assert_eq!(n.presheaf.size(t), 4);
        let mut images: Vec<Vec<usize>> = (0..4).map(|y| n.labellings(corolla)[n.presheaf.restrict(corolla, t, y)].iter().map(|&w| w as usize).collect()).collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 4);
        // The images are the words in which a and b are adjacent.
        let words: Vec<Vec<usize>> = images.iter().map(|l| op.permutations(3).get(l[0]).to_vec()).collect();
        for w in &words {
            let pa = w.iter().position(|&x| x == 0).unwrap();
            let pb = w.iter().position(|&x| x == 1).unwrap();
            assert_eq!(pa.abs_diff(pb), 1, "{w:?}");
        }
    }

    #[test]
    fn elements_on_tplus_three() {
        let n = nerve(&FiniteOperad::assoc(3), &abc(), false).unwrap();
        assert_eq!(n.elements().poset().len(), 12);
        assert_eq!(n.total(), 12);
    }

    #[test]
    fn contraction_order_is_irrelevant() {
        for k in 2..=4 {
            let leaves = LeafSet::standard(k).unwrap();
            for op in [FiniteOperad::comm(4), FiniteOperad::assoc(4)] {
                nerve(&op, &leaves, true).unwrap().check_contraction_orders().unwrap();
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let r = nerve(&FiniteOperad::assoc(2), &abc(), true);
        assert!(matches!(r, Err(OperadError::ArityOverflow { arity: 3, max: 2 })));
    }

    #[test]
    fn labelled_assoc_three() {
        let lc = labelled_complex(&FiniteOperad::assoc(3), &abc()).unwrap();
        assert_eq!(lc.set.f_vector(), vec![12]);
        let r = verify_labelled_comparison(&FiniteOperad::assoc(3), &abc()).unwrap();
        assert!(r.pass);
        assert_eq!(r.homology.betti(0), 11);
    }

    #[test]
    fn labelled_comm_matches_unlabelled() {
        for k in 3..=4 {
            let leaves = LeafSet::standard(k).unwrap();
            let lc = labelled_complex(&FiniteOperad::comm(k), &leaves).unwrap();
            let np = partition_poset(&leaves).unwrap().poset.order_complex();
            assert_eq!(lc.set.f_vector(), np.f_vector());
            assert_eq!(lc.set.reduced_homology(), np.reduced_homology());
            assert_eq!(lc.elements.poset().len(), enumerate_trees(&leaves, false).unwrap().len());
        }
    }
}
