//! Rooted trees with labelled leaves and no unary vertices, stored as
//! laminar families of leaf subsets, and the posets they form.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

use crate::partitions::{full_mask, least, mask_elements, LeafSet, Mask, PartitionError};
use crate::posets::Poset;

pub const DEFAULT_MAX_LEAVES: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("members {0} and {1} overlap without nesting")]
    NotLaminar(String, String),
    #[error("family does not contain the full leaf set")]
    MissingRoot,
    #[error("member {0} has fewer than 2 leaves")]
    SmallBlock(String),
    #[error("member mask {0:#x} is not a subset of the leaf set")]
    OutOfRange(Mask),
    #[error("{0} leaves exceeds the enumeration bound {1}")]
    TooLarge(usize, usize),
    #[error("{0} is not a leaf vertex")]
    NotLeafVertex(String),
    #[error("leaf '{0}' not found")]
    LeafNotFound(String),
    #[error("leaf label '{0}' occurs in both trees")]
    LabelClash(String),
    #[error("the corolla is not in T+")]
    NotInTPlus,
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Canonical member order: larger members first, ties by the sorted leaf
/// index sequence. The root always comes first.
fn member_key(m: Mask) -> (std::cmp::Reverse<u32>, Vec<usize>) {
    (std::cmp::Reverse(m.count_ones()), mask_elements(m).collect())
}

fn sort_members(family: &mut [Mask]) {
    family.sort_by_key(|&m| member_key(m));
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    leaves: LeafSet,
    family: Vec<Mask>,
}

impl Tree {
    pub fn new(leaves: LeafSet, mut family: Vec<Mask>) -> Result<Self, TreeError> {
        let full = leaves.full();
        for &m in &family {
            if m & !full != 0 {
                return Err(TreeError::OutOfRange(m));
            }
            if m.count_ones() < 2 {
                return Err(TreeError::SmallBlock(format!("{{{}}}", leaves.format_mask(m))));
            }
        }
        sort_members(&mut family);
        family.dedup();
        if leaves.len() >= 2 && family.first() != Some(&full) {
            return Err(TreeError::MissingRoot);
        }
        for (i, &a) in family.iter().enumerate() {
            for &b in &family[i + 1..] {
                let meet = a & b;
                if meet != 0 && meet != a && meet != b {
                    return Err(TreeError::NotLaminar(
                        format!("{{{}}}", leaves.format_mask(a)),
                        format!("{{{}}}", leaves.format_mask(b)),
                    ));
                }
            }
        }
        let t = Tree { leaves, family };
        debug_assert!(t.family.iter().all(|&s| t.children(s).len() >= 2));
        Ok(t)
    }

    /// Members written as blocks, e.g. `["abcdef", "ab"]`; the root may be omitted.
    pub fn parse<S: AsRef<str>>(leaves: &LeafSet, members: &[S]) -> Result<Self, TreeError> {
        let mut family = members.iter().map(|m| leaves.parse_mask(m.as_ref())).collect::<Result<Vec<_>, _>>()?;
        if leaves.len() >= 2 && !family.contains(&leaves.full()) {
            family.push(leaves.full());
        }
        Tree::new(leaves.clone(), family)
    }

    pub fn corolla(leaves: LeafSet) -> Self {
        let family = if leaves.len() >= 2 { vec![leaves.full()] } else { Vec::new() };
        Tree { leaves, family }
    }

    pub fn leaves(&self) -> &LeafSet {
        &self.leaves
    }

    /// Members in canonical order, root first.
    pub fn family(&self) -> &[Mask] {
        &self.family
    }

    pub fn contains(&self, m: Mask) -> bool {
        self.family.contains(&m)
    }

    pub fn root(&self) -> Option<Mask> {
        self.family.first().copied()
    }

    pub fn is_unit(&self) -> bool {
        self.family.is_empty()
    }

    pub fn is_corolla(&self) -> bool {
        self.family.len() == 1
    }

    pub fn vertex_count(&self) -> usize {
        self.family.len()
    }

    pub fn inner_edges(&self) -> &[Mask] {
        self.family.get(1..).unwrap_or(&[])
    }

    /// Family inclusion.
    pub fn leq(&self, other: &Tree) -> bool {
        self.family.iter().all(|m| other.family.contains(m))
    }

    /// Maximal members and singletons properly inside `s`, by least leaf.
    pub fn children(&self, s: Mask) -> Vec<Mask> {
        children_in(&self.family, s)
    }

    pub fn arity(&self, s: Mask) -> usize {
        self.children(s).len()
    }

    /// Smallest member properly containing `s`.
    pub fn parent(&self, s: Mask) -> Option<Mask> {
        self.family.iter().copied().filter(|&m| m != s && m & s == s).min_by_key(|m| m.count_ones())
    }

    /// Members containing no other member, in canonical order.
    pub fn leaf_vertices(&self) -> Vec<Mask> {
        self.family.iter().copied().filter(|&m| !self.family.iter().any(|&o| o != m && o & m == o)).collect()
    }

    /// Members ordered by reverse inclusion (root at the bottom), labelled by block.
    pub fn vertex_poset(&self) -> Poset {
        let labels = self.family.iter().map(|&m| self.leaves.format_mask(m)).collect();
        Poset::from_leq(labels, |i, j| self.family[i] & self.family[j] == self.family[j]).expect("reverse inclusion is a partial order")
    }

    pub fn format_member(&self, m: Mask) -> String {
        self.leaves.format_mask(m)
    }

    /// `{abcdef, abcde, ab, cde}`
    pub fn display(&self) -> String {
        format!("{{{}}}", self.family.iter().map(|&m| self.leaves.format_mask(m)).collect::<Vec<_>>().join(", "))
    }

    /// Label-level content, independent of leaf order.
    pub fn canonical_sets(&self) -> (BTreeSet<String>, BTreeSet<BTreeSet<String>>) {
        let leaves = self.leaves.labels().iter().cloned().collect();
        let family = self.family.iter().map(|&m| self.leaves.mask_labels(m).into_iter().map(String::from).collect()).collect();
        (leaves, family)
    }

    /// `{"leaves": [...], "family": [[...], ...]}` with members in canonical order.
    pub fn to_json(&self) -> Value {
        json!({
            "leaves": self.leaves.labels(),
            "family": self.family.iter().map(|&m| self.leaves.mask_labels(m)).collect::<Vec<_>>(),
        })
    }

    pub fn serialize(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(v: &Value) -> Result<Self, TreeError> {
        let bad = |what: &str| TreeError::Parse(format!("tree JSON: {what}"));
        let leaves = v.get("leaves").and_then(Value::as_array).ok_or_else(|| bad("missing 'leaves' list"))?;
        let leaves = LeafSet::new(leaves.iter().map(|l| l.as_str().map(String::from).ok_or_else(|| bad("non-string leaf"))).collect::<Result<Vec<_>, _>>()?)?;
        let family = v.get("family").and_then(Value::as_array).ok_or_else(|| bad("missing 'family' list"))?;
        let mut masks = Vec::with_capacity(family.len());
        for member in family {
            let labels = member.as_array().ok_or_else(|| bad("member is not a list"))?;
            let mut m: Mask = 0;
            for l in labels {
                let bit = 1 << leaves.index_of(l.as_str().ok_or_else(|| bad("non-string label"))?)?;
                if m & bit != 0 {
                    return Err(bad("repeated label in member"));
                }
                m |= bit;
            }
            masks.push(m);
        }
        Tree::new(leaves, masks)
    }

    /// Graphviz drawing with the root at the top.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=TB;\n");
        for &m in &self.family {
            let _ = writeln!(s, "  v{m} [shape=point, xlabel=\"{}\"];", self.leaves.format_mask(m));
        }
        for (i, l) in self.leaves.labels().iter().enumerate() {
            let _ = writeln!(s, "  l{i} [shape=plaintext, label=\"{l}\"];");
        }
        for &m in &self.family {
            for c in self.children(m) {
                if c.count_ones() == 1 {
                    let _ = writeln!(s, "  v{m} -> l{};", least(c));
                } else {
                    let _ = writeln!(s, "  v{m} -> v{c};");
                }
            }
        }
        s.push_str("}\n");
        s
    }

    /// Removes the leaf vertices `w` with their input leaves; each becomes a
    /// fresh leaf `ℓ_<members>` at the position of its least leaf.
    pub fn prune(&self, w: &[Mask]) -> Result<Pruned, TreeError> {
        let leaf_vertices = self.leaf_vertices();
        let mut seen: Mask = 0;
        for &v in w {
            if !leaf_vertices.contains(&v) || seen & v != 0 {
                return Err(TreeError::NotLeafVertex(format!("{{{}}}", self.leaves.format_mask(v))));
            }
            seen |= v;
        }
        if w.is_empty() {
            return Err(TreeError::NotLeafVertex("{}".into()));
        }
        let n = self.leaves.len();
        let mut labels: Vec<String> = Vec::new();
        let mut leaf_map = vec![0usize; n];
        let mut markers = Vec::new();
        for i in 0..n {
            match w.iter().copied().find(|&v| v & (1 << i) != 0) {
                Some(v) if least(v) == i => {
                    leaf_map[i] = labels.len();
                    markers.push((v, labels.len()));
                    labels.push(self.marker_label(v));
                }
                Some(v) => leaf_map[i] = leaf_map[least(v)],
                None => {
                    leaf_map[i] = labels.len();
                    labels.push(self.leaves.label(i).to_string());
                }
            }
        }
        // Keep marker labels unique against the untouched leaves.
        for &(_, idx) in &markers {
            while labels.iter().enumerate().any(|(j, l)| j != idx && *l == labels[idx]) {
                labels[idx].push('\'');
            }
        }
        let leaves = LeafSet::new(labels)?;
        let map = |m: Mask| mask_elements(m).fold(0, |acc, i| acc | (1 << leaf_map[i]));
        let family = self.family.iter().copied().filter(|m| !w.contains(m)).map(map).collect();
        let tree = Tree::new(leaves, family)?;
        Ok(Pruned { tree, leaf_map, markers })
    }

    fn marker_label(&self, v: Mask) -> String {
        let parts = self.leaves.mask_labels(v);
        if parts.iter().all(|p| p.chars().count() == 1) {
            format!("ℓ_{}", parts.concat())
        } else {
            format!("ℓ_{}", parts.join("."))
        }
    }

    /// Replaces leaf `a` by the root of `s`; the leaves of `s` take the
    /// position of `a`.
    pub fn graft(&self, a: &str, s: &Tree) -> Result<Tree, TreeError> {
        let pos = self.leaves.index_of(a).map_err(|_| TreeError::LeafNotFound(a.to_string()))?;
        for l in s.leaves.labels() {
            if l != a && self.leaves.labels().contains(l) {
                return Err(TreeError::LabelClash(l.clone()));
            }
        }
        let nb = s.leaves.len();
        let mut labels: Vec<String> = self.leaves.labels()[..pos].to_vec();
        labels.extend(s.leaves.labels().iter().cloned());
        labels.extend(self.leaves.labels()[pos + 1..].iter().cloned());
        let leaves = LeafSet::new(labels)?;
        let b_block: Mask = full_mask(nb) << pos;
        let outer = |m: Mask| {
            mask_elements(m).fold(0, |acc, i| match i.cmp(&pos) {
                std::cmp::Ordering::Less => acc | 1 << i,
                std::cmp::Ordering::Equal => acc | b_block,
                std::cmp::Ordering::Greater => acc | 1 << (i + nb - 1),
            })
        };
        let mut family: Vec<Mask> = self.family.iter().map(|&m| outer(m)).collect();
        family.extend(s.family.iter().map(|&m| m << pos));
        Tree::new(leaves, family)
    }

    /// Same structure on a renamed leaf set of equal size.
    pub fn relabel(&self, leaves: LeafSet) -> Result<Tree, TreeError> {
        if leaves.len() != self.leaves.len() {
            return Err(TreeError::Parse("relabelling must preserve the leaf count".into()));
        }
        Tree::new(leaves, self.family.clone())
    }
}

/// Maximal members of `family` and singletons properly inside `s`, by least leaf.
pub fn children_in(family: &[Mask], s: Mask) -> Vec<Mask> {
    let inner: Vec<Mask> = family.iter().copied().filter(|&m| m != s && m & s == m).collect();
    let maximal: Vec<Mask> = inner.iter().copied().filter(|&m| !inner.iter().any(|&o| o != m && o & m == m)).collect();
    let covered = maximal.iter().fold(0, |acc, &m| acc | m);
    let mut out: Vec<Mask> = maximal;
    out.extend(mask_elements(s & !covered).map(|i| 1 << i));
    out.sort_by_key(|&m| least(m));
    out
}

/// Result of [`Tree::prune`], remembering where the old leaves went.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pruned {
    pub tree: Tree,
    /// New leaf index of each old leaf (pruned leaves go to their marker).
    pub leaf_map: Vec<usize>,
    /// Pruned member and the index of its marker leaf.
    pub markers: Vec<(Mask, usize)>,
}

impl Pruned {
    /// Old-leaf subset corresponding to a subset of the pruned leaf set.
    pub fn expand(&self, m: Mask) -> Mask {
        self.leaf_map.iter().enumerate().filter(|&(_, &j)| m & (1 << j) != 0).fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

/// T(A) or T+(A) with trees indexed by vertex count, then serialization.
#[derive(Debug, Clone)]
pub struct TreePoset {
    pub leaves: LeafSet,
    pub include_corolla: bool,
    pub trees: Vec<Tree>,
    pub poset: Poset,
    index: HashMap<Vec<Mask>, usize>,
}

impl TreePoset {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn index_of(&self, t: &Tree) -> Option<usize> {
        self.index.get(t.family()).copied()
    }

    pub fn index_of_family(&self, family: &[Mask]) -> Option<usize> {
        let mut f = family.to_vec();
        sort_members(&mut f);
        f.dedup();
        self.index.get(&f).copied()
    }
}

pub fn enumerate_trees(leaves: &LeafSet, include_corolla: bool) -> Result<TreePoset, TreeError> {
    enumerate_trees_bounded(leaves, include_corolla, DEFAULT_MAX_LEAVES)
}

pub fn enumerate_trees_bounded(leaves: &LeafSet, include_corolla: bool, max_leaves: usize) -> Result<TreePoset, TreeError> {
    let n = leaves.len();
    if n > max_leaves {
        return Err(TreeError::TooLarge(n, max_leaves));
    }
    let mut trees: Vec<Tree> = if n == 1 {
        vec![Tree::corolla(leaves.clone())]
    } else {
        families_on(leaves.full())
            .into_iter()
            .map(|f| Tree::new(leaves.clone(), f).expect("generated family is laminar"))
            .filter(|t| include_corolla || !t.is_corolla())
            .collect()
    };
    let keys: Vec<String> = trees.iter().map(Tree::serialize).collect();
    let mut order: Vec<usize> = (0..trees.len()).collect();
    order.sort_by(|&i, &j| (trees[i].vertex_count(), &keys[i]).cmp(&(trees[j].vertex_count(), &keys[j])));
    trees = order.into_iter().map(|i| trees[i].clone()).collect();
    let labels = trees.iter().map(Tree::display).collect();
    let poset = Poset::from_leq(labels, |i, j| trees[i].leq(&trees[j])).expect("family inclusion is a partial order");
    let index = trees.iter().enumerate().map(|(i, t)| (t.family.clone(), i)).collect();
    Ok(TreePoset { leaves: leaves.clone(), include_corolla, trees, poset, index })
}

/// All laminar families with root `s`: split `s` into at least two blocks,
/// then recurse into the blocks of size at least 2.
fn families_on(s: Mask) -> Vec<Vec<Mask>> {
    let elems: Vec<usize> = mask_elements(s).collect();
    let mut out = Vec::new();
    for blocks in set_partitions(&elems) {
        if blocks.len() < 2 {
            continue;
        }
        let mut acc: Vec<Vec<Mask>> = vec![vec![s]];
        for &b in blocks.iter().filter(|b| b.count_ones() >= 2) {
            let subs = families_on(b);
            acc = acc.iter().flat_map(|f| subs.iter().map(move |g| f.iter().chain(g).copied().collect())).collect();
        }
        out.extend(acc);
    }
    out
}

fn set_partitions(elems: &[usize]) -> Vec<Vec<Mask>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Mask> = Vec::new();
    fn go(elems: &[usize], k: usize, blocks: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>) {
        if k == elems.len() {
            out.push(blocks.clone());
            return;
        }
        let bit = 1 << elems[k];
        for i in 0..blocks.len() {
            blocks[i] |= bit;
            go(elems, k + 1, blocks, out);
            blocks[i] &= !bit;
        }
        blocks.push(bit);
        go(elems, k + 1, blocks, out);
        blocks.pop();
    }
    go(elems, 0, &mut blocks, &mut out);
    out
}
