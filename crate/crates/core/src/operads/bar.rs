//! Two chain models of the bar construction: labelled strict chains through
//! the full partition lattice, and the suspended cofiber of the inclusion of
//! elements posets `T⁺(A)/N O -> T(A)/N O`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{reorder, FiniteOperad, Op, OperadError};
use crate::partitions::{all_partitions, least, LeafSet, Mask, Partition};
use crate::posets::Poset;
use crate::simplicial::{homology, mapping_cone, normalized_chain_complex, ChainComplex, ChainMap, HomologyResult, Ring, SimplicialSet, SparseMatrix};

use super::nerve::nerve;

/// A normalized generator: partition indices `0̂ = c_0 < ... < c_p = 1̂` and,
/// per layer, one label for each block of `c_{i-1}` that splits in `c_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Generator {
    chain: Vec<usize>,
    layers: Vec<Vec<Op>>,
}

struct Lattice {
    parts: Vec<Partition>,
    top: usize,
    bottom: usize,
}

impl Lattice {
    fn new(leaves: &LeafSet) -> Self {
        let parts = all_partitions(leaves, false);
        let bottom = parts.iter().position(Partition::is_indiscrete).expect("indiscrete partition");
        let top = parts.iter().position(Partition::is_discrete).expect("discrete partition");
        Lattice { parts, top, bottom }
    }

    /// Blocks of partition `a` with the blocks of `b` each one splits into.
    fn splits(&self, a: usize, b: usize) -> Vec<(Mask, Vec<Mask>)> {
        self.parts[a].blocks().iter().map(|&bl| (bl, Partition::blocks_inside(&self.parts[b], bl))).collect()
    }

    fn strict_chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![self.bottom];
        self.extend(&mut stack, &mut out);
        out
    }

    fn extend(&self, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *stack.last().expect("nonempty");
        if last == self.top {
            out.push(stack.clone());
            return;
        }
        for j in 0..self.parts.len() {
            if j != last && self.parts[last].refined_by(&self.parts[j]) {
                stack.push(j);
                self.extend(stack, out);
                stack.pop();
            }
        }
    }
}

fn generators(op: &FiniteOperad, lat: &Lattice) -> Result<Vec<Vec<Generator>>, OperadError> {
    let n = lat.parts[lat.top].n();
    let mut by_degree: Vec<Vec<Generator>> = vec![Vec::new(); n];
    for chain in lat.strict_chains() {
        let mut slots: Vec<Vec<usize>> = Vec::new();
        for w in chain.windows(2) {
            let arities: Vec<usize> = lat.splits(w[0], w[1]).into_iter().map(|(_, k)| k.len()).filter(|&a| a >= 2).collect();
            for &a in &arities {
                op.check_arity(a)?;
            }
            slots.push(arities);
        }
        let mut gens = vec![Vec::<Vec<Op>>::new()];
        for layer in &slots {
            let mut choices: Vec<Vec<Op>> = vec![Vec::new()];
            for &a in layer {
                let c = op.count(a) as Op;
                choices = choices.into_iter().flat_map(|l| (0..c).map(move |x| [l.as_slice(), &[x]].concat())).collect();
            }
            gens = gens.into_iter().flat_map(|g| choices.iter().map(move |c| [g.clone(), vec![c.clone()]].concat())).collect();
        }
        let p = chain.len() - 1;
        by_degree[p].extend(gens.into_iter().map(|layers| Generator { chain: chain.clone(), layers }));
    }
    Ok(by_degree)
}

/// Inner face `d_i`: merges layers `i` and `i + 1` by composing each label of
/// layer `i` with the labels below it.
fn inner_face(op: &FiniteOperad, lat: &Lattice, g: &Generator, i: usize) -> Result<Generator, OperadError> {
    let (a, b, c) = (g.chain[i - 1], g.chain[i], g.chain[i + 1]);
    let upper = &g.layers[i - 1];
    let lower = &g.layers[i];
    let mut lower_slot: HashMap<Mask, Op> = HashMap::new();
    let mut k = 0;
    for (bl, kids) in lat.splits(b, c) {
        if kids.len() >= 2 {
            lower_slot.insert(bl, lower[k]);
            k += 1;
        }
    }
    let mut merged = Vec::new();
    let mut u = 0;
    for (_, kids) in lat.splits(a, b) {
        let mu = if kids.len() >= 2 {
            u += 1;
            upper[u - 1]
        } else {
            0
        };
        let grand: Vec<Vec<Mask>> = kids.iter().map(|&kb| Partition::blocks_inside(&lat.parts[c], kb)).collect();
        let total: usize = grand.iter().map(Vec::len).sum();
        if total < 2 {
            continue;
        }
        let inputs: Vec<(usize, Op)> = kids.iter().zip(&grand).map(|(kb, gk)| (gk.len(), lower_slot.get(kb).copied().unwrap_or(0))).collect();
        let psi = op.compose(kids.len(), mu, &inputs)?;
        let given: Vec<Mask> = grand.concat();
        let mut canonical = given.clone();
        canonical.sort_by_key(|&m| least(m));
        merged.push(op.act(total, psi, &reorder(&given, &canonical)));
    }
    let mut chain = g.chain.clone();
    chain.remove(i);
    let mut layers = g.layers.clone();
    layers.splice(i - 1..=i, [merged]);
    Ok(Generator { chain, layers })
}

/// Normalized bar complex in degrees `1..=|A|-1`, differential `Σ (-1)^i d_i`
/// over the inner faces.
pub fn bar_complex(op: &FiniteOperad, leaves: &LeafSet, ring: Ring) -> Result<ChainComplex, OperadError> {
    if leaves.len() < 2 {
        return Err(OperadError::TooSmall(leaves.len()));
    }
    let lat = Lattice::new(leaves);
    let gens = generators(op, &lat)?;
    let index: Vec<HashMap<&Generator, usize>> = gens.iter().map(|d| d.iter().enumerate().map(|(k, g)| (g, k)).collect()).collect();
    let top = leaves.len() - 1;
    let boundaries: Vec<SparseMatrix> = (1..=top)
        .into_par_iter()
        .map(|p| -> Result<SparseMatrix, OperadError> {
            if p == 1 {
                return Ok(SparseMatrix::zeros(0, gens[1].len()));
            }
            let cols = gens[p]
                .iter()
                .map(|g| {
                    let mut col: Vec<(usize, i64)> = Vec::new();
                    for i in 1..p {
                        let f = inner_face(op, &lat, g, i)?;
                        let row = *index[p - 1].get(&f).expect("faces of generators are generators");
                        col.push((row, if i % 2 == 0 { 1 } else { -1 }));
                    }
                    Ok(col)
                })
                .collect::<Result<Vec<_>, OperadError>>()?;
            Ok(SparseMatrix::from_columns(gens[p - 1].len(), cols))
        })
        .collect::<Result<_, _>>()?;
    let c = ChainComplex::new(ring, 1, boundaries)?;
    c.check_d_squared()?;
    Ok(c)
}

/// Position of each chain in the order complex built from `p.chains()`.
fn chain_positions(p: &Poset) -> HashMap<Vec<usize>, (usize, usize)> {
    let mut seen: Vec<usize> = Vec::new();
    let mut out = HashMap::new();
    for c in p.chains() {
        let d = c.len() - 1;
        if seen.len() <= d {
            seen.resize(d + 1, 0);
        }
        out.insert(c, (d, seen[d]));
        seen[d] += 1;
    }
    out
}

/// Suspended mapping cone of the inclusion of the order complex of
/// `T⁺(A)/N O` into that of `T(A)/N O`, with unreduced normalized chains.
pub fn tree_bar_complex(op: &FiniteOperad, leaves: &LeafSet, ring: Ring) -> Result<ChainComplex, OperadError> {
    if leaves.len() < 2 {
        return Err(OperadError::TooSmall(leaves.len()));
    }
    let nv = nerve(op, leaves, true)?;
    let elements = nv.elements();
    let e = elements.poset();
    let plus: Vec<usize> = (0..e.len()).filter(|&i| !nv.trees.trees[elements.elements[i].0].is_corolla()).collect();
    let ep = e.induced(&plus);
    let (x, xp): (SimplicialSet, SimplicialSet) = (e.order_complex(), ep.order_complex());
    let pos = chain_positions(e);
    let c_plus = normalized_chain_complex(&xp, ring, false);
    let c_full = normalized_chain_complex(&x, ring, false);
    let dims = xp.f_vector().len();
    let mut cols: Vec<Vec<Vec<(usize, i64)>>> = (0..dims).map(|d| vec![Vec::new(); xp.count(d)]).collect();
    for (chain, (d, k)) in chain_positions(&ep) {
        let image: Vec<usize> = chain.iter().map(|&i| plus[i]).collect();
        let (d2, row) = pos[&image];
        debug_assert_eq!(d, d2);
        cols[d][k].push((row, 1));
    }
    let maps = cols.into_iter().enumerate().map(|(d, c)| SparseMatrix::from_columns(x.count(d), c)).collect();
    let f = ChainMap::new(c_plus, c_full, 0, maps)?;
    Ok(mapping_cone(&f)?.shifted(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarSide {
    pub ring: Ring,
    pub bar: HomologyResult,
    pub tree: HomologyResult,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarComparison {
    pub operad: String,
    pub leaves: Vec<String>,
    pub pass: bool,
    /// Generator counts of the bar complex, from degree 1.
    pub bar_ranks: Vec<usize>,
    /// Generator counts of the tree side, from its lowest degree.
    pub tree_ranks: Vec<usize>,
    pub tree_min_degree: i64,
    pub sides: Vec<BarSide>,
}

pub fn compare_bars(op: &FiniteOperad, leaves: &LeafSet) -> Result<BarComparison, OperadError> {
    let bar = bar_complex(op, leaves, Ring::Integers)?;
    let tree = tree_bar_complex(op, leaves, Ring::Integers)?;
    let sides = [Ring::Integers, Ring::Rationals]
        .into_iter()
        .map(|ring| -> Result<BarSide, OperadError> {
            let b = homology(&bar.clone().with_ring(ring))?;
            let t = homology(&tree.clone().with_ring(ring))?;
            let equal = b.same_groups(&t);
            Ok(BarSide { ring, bar: b, tree: t, equal })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BarComparison {
        operad: op.name().to_string(),
        leaves: leaves.labels().to_vec(),
        pass: sides.iter().all(|s| s.equal),
        bar_ranks: bar.degrees().map(|d| bar.rank(d)).collect(),
        tree_ranks: tree.degrees().map(|d| tree.rank(d)).collect(),
        tree_min_degree: tree.min_degree(),
        sides,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std(n: usize) -> LeafSet {
        LeafSet::standard(n).unwrap()
    }

    #[test]
    fn comm_three_by_hand() {
        let c = bar_complex(&FiniteOperad::comm(3), &std(3), Ring::Integers).unwrap();
        assert_eq!((c.rank(1), c.rank(2)), (1, 3));
        assert_eq!(c.boundary(2).to_dense(), vec![vec![-1, -1, -1]]);
        let h = homology(&c).unwrap();
        assert_eq!((h.betti(1), h.betti(2)), (0, 2));
    }

    #[test]
    fn two_leaves() {
        for op in [FiniteOperad::comm(2), FiniteOperad::assoc(2)] {
            let b = homology(&bar_complex(&op, &std(2), Ring::Integers).unwrap()).unwrap();
            let t = homology(&tree_bar_complex(&op, &std(2), Ring::Integers).unwrap()).unwrap();
            assert_eq!(b.betti(1), op.count(2));
            assert!(b.same_groups(&t), "{b} vs {t}");
        }
    }

    #[test]
    fn comm_concentrated() {
        for (n, rank) in [(2, 1), (3, 2), (4, 6)] {
            let r = compare_bars(&FiniteOperad::comm(n), &std(n)).unwrap();
            assert!(r.pass, "{r:?}");
            let h = &r.sides[0].bar;
            assert_eq!(h.support(), vec![n as i64 - 1]);
            assert_eq!(h.betti(n as i64 - 1), rank);
        }
    }

    #[test]
    fn assoc_agrees() {
        for n in 3..=4 {
            let r = compare_bars(&FiniteOperad::assoc(n), &std(n)).unwrap();
            assert!(r.pass, "{:?}", r.sides);
        }
        let r = compare_bars(&FiniteOperad::assoc(3), &std(3)).unwrap();
        assert_eq!(r.sides[0].bar.betti(2), 6);
    }
}
