//! Set partitions of a finite leaf set, ordered coarse below fine.
//!
//! Leaves are addressed by their index in the [`LeafSet`] and subsets by
//! `u32` bitmasks, so a leaf set holds at most 32 labels.

use std::collections::HashMap;
use std::fmt;

use serde_json::Value;
use thiserror::Error;

use crate::posets::Poset;

pub type Mask = u32;

pub const MAX_LEAVES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("leaf set is empty")]
    EmptyLeafSet,
    #[error("duplicate leaf label '{0}'")]
    DuplicateLabel(String),
    #[error("invalid leaf label '{0}'")]
    BadLabel(String),
    #[error("at most {MAX_LEAVES} leaves are supported, got {0}")]
    TooManyLeaves(usize),
    #[error("unknown leaf '{0}'")]
    UnknownLabel(String),
    #[error("blocks do not form a partition of the leaf set")]
    NotACover,
    #[error("partitions are over different leaf sets")]
    LeafSetMismatch,
    #[error("need at least 2 leaves, got {0}")]
    TooSmall(usize),
    #[error("chain is not strictly increasing at position {0}")]
    NotStrict(usize),
    #[error("chain position {0} holds a trivial partition")]
    TrivialInChain(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub fn mask_elements(mask: Mask) -> impl Iterator<Item = usize> {
    (0..MAX_LEAVES).filter(move |&i| mask & (1 << i) != 0)
}

pub fn least(mask: Mask) -> usize {
    mask.trailing_zeros() as usize
}

pub fn full_mask(n: usize) -> Mask {
    if n >= 32 {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

/// Ordered leaf labels; the order fixed here is the canonical one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LeafSet {
    labels: Vec<String>,
}

impl LeafSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, PartitionError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(PartitionError::EmptyLeafSet);
        }
        if labels.len() > MAX_LEAVES {
            return Err(PartitionError::TooManyLeaves(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| c.is_whitespace() || "(),[]{}\"".contains(c)) {
                return Err(PartitionError::BadLabel(l.clone()));
            }
            if labels[..i].contains(l) {
                return Err(PartitionError::DuplicateLabel(l.clone()));
            }
        }
        Ok(LeafSet { labels })
    }

    /// `a, b, c, ...`; past 26 leaves the labels continue as `x26, x27, ...`.
    pub fn standard(n: usize) -> Result<Self, PartitionError> {
        LeafSet::new((0..n).map(|i| if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("x{i}") }))
    }

    /// Comma-separated labels, e.g. `a,b,c`.
    pub fn parse(s: &str) -> Result<Self, PartitionError> {
        LeafSet::new(s.split(',').map(|t| t.trim().to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, PartitionError> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| PartitionError::UnknownLabel(label.to_string()))
    }

    pub fn full(&self) -> Mask {
        full_mask(self.len())
    }

    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Mask, PartitionError> {
        let mut m = 0;
        for l in labels {
            m |= 1 << self.index_of(l.as_ref())?;
        }
        Ok(m)
    }

    pub fn mask_labels(&self, mask: Mask) -> Vec<&str> {
        mask_elements(mask).map(|i| self.labels[i].as_str()).collect()
    }

    fn single_chars(&self) -> bool {
        self.labels.iter().all(|l| l.chars().count() == 1)
    }

    /// Block written as concatenated labels, comma-separated when some label
    /// is longer than one character.
    pub fn format_mask(&self, mask: Mask) -> String {
        let parts = self.mask_labels(mask);
        if self.single_chars() {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    /// Parses the body of a block written by [`LeafSet::format_mask`].
    pub fn parse_mask(&self, s: &str) -> Result<Mask, PartitionError> {
        let s = s.trim();
        if s.contains(',') || !self.single_chars() {
            s.split(',').try_fold(0, |m, t| Ok(m | 1 << self.index_of(t.trim())?))
        } else {
            s.chars().try_fold(0, |m, c| Ok(m | 1 << self.index_of(&c.to_string())?))
        }
    }
}

impl fmt::Display for LeafSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels.join(","))
    }
}

/// Blocks are sorted by least element; `rgs[i]` is the block index of leaf `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rgs: Vec<u8>,
    blocks: Vec<Mask>,
}

impl Partition {
    pub fn from_rgs(rgs: Vec<u8>) -> Result<Self, PartitionError> {
        if rgs.is_empty() {
            return Err(PartitionError::EmptyLeafSet);
        }
        if rgs.len() > MAX_LEAVES {
            return Err(PartitionError::TooManyLeaves(rgs.len()));
        }
        let mut blocks: Vec<Mask> = Vec::new();
        for (i, &b) in rgs.iter().enumerate() {
            match (b as usize).cmp(&blocks.len()) {
                std::cmp::Ordering::Less => blocks[b as usize] |= 1 << i,
                std::cmp::Ordering::Equal => blocks.push(1 << i),
                std::cmp::Ordering::Greater => return Err(PartitionError::NotACover),
            }
        }
        Ok(Partition { rgs, blocks })
    }

    pub fn from_blocks(n: usize, blocks: &[Mask]) -> Result<Self, PartitionError> {
        if n == 0 {
            return Err(PartitionError::EmptyLeafSet);
        }
        if n > MAX_LEAVES {
            return Err(PartitionError::TooManyLeaves(n));
        }
        let mut seen: Mask = 0;
        for &b in blocks {
            if b == 0 || b & seen != 0 || b & !full_mask(n) != 0 {
                return Err(PartitionError::NotACover);
            }
            seen |= b;
        }
        if seen != full_mask(n) {
            return Err(PartitionError::NotACover);
        }
        let mut sorted = blocks.to_vec();
        sorted.sort_by_key(|&b| least(b));
        let mut rgs = vec![0u8; n];
        for (k, &b) in sorted.iter().enumerate() {
            for i in mask_elements(b) {
                rgs[i] = k as u8;
            }
        }
        Ok(Partition { rgs, blocks: sorted })
    }

    pub fn indiscrete(n: usize) -> Self {
        Partition::from_rgs(vec![0; n]).expect("n >= 1")
    }

    pub fn discrete(n: usize) -> Self {
        Partition::from_rgs((0..n as u8).collect()).expect("n >= 1")
    }

    pub fn n(&self) -> usize {
        self.rgs.len()
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    pub fn blocks(&self) -> &[Mask] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, leaf: usize) -> Mask {
        self.blocks[self.rgs[leaf] as usize]
    }

    pub fn is_indiscrete(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.n()
    }

    pub fn is_trivial(&self) -> bool {
        self.is_indiscrete() || self.is_discrete()
    }

    /// Every block of `finer` lies in a block of `self`. Same leaf count assumed.
    pub fn refined_by(&self, finer: &Partition) -> bool {
        finer.blocks.iter().all(|&b| self.block_of(least(b)) & b == b)
    }

    /// Blocks of `finer` inside `block`, sorted by least element.
    pub fn blocks_inside(finer: &Partition, block: Mask) -> Vec<Mask> {
        finer.blocks.iter().copied().filter(|&b| b & block == b).collect()
    }

    pub fn display(&self, leaves: &LeafSet) -> String {
        self.blocks.iter().map(|&b| format!("({})", leaves.format_mask(b))).collect()
    }

    /// Parses `(ab)(cde)(f)`; blocks may be given in any order.
    pub fn parse(leaves: &LeafSet, s: &str) -> Result<Self, PartitionError> {
        let s = s.trim();
        let mut blocks = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| PartitionError::Parse(format!("expected '(' in '{s}'")))?;
            let end = body.find(')').ok_or_else(|| PartitionError::Parse(format!("unclosed block in '{s}'")))?;
            blocks.push(leaves.parse_mask(&body[..end])?);
            rest = body[end + 1..].trim_start();
        }
        Partition::from_blocks(leaves.len(), &blocks)
    }

    /// `[["a","b"],["c"]]`
    pub fn to_json(&self, leaves: &LeafSet) -> Value {
        Value::Array(self.blocks.iter().map(|&b| Value::from(leaves.mask_labels(b))).collect())
    }

    pub fn from_json(leaves: &LeafSet, v: &Value) -> Result<Self, PartitionError> {
        let bad = || PartitionError::Parse("partition must be a list of lists of labels".into());
        let arr = v.as_array().ok_or_else(bad)?;
        let mut blocks = Vec::with_capacity(arr.len());
        for b in arr {
            let mut m: Mask = 0;
            for l in b.as_array().ok_or_else(bad)? {
                let bit = 1 << leaves.index_of(l.as_str().ok_or_else(bad)?)?;
                if m & bit != 0 {
                    return Err(PartitionError::NotACover);
                }
                m |= bit;
            }
            blocks.push(m);
        }
        Partition::from_blocks(leaves.len(), &blocks)
    }
}

/// Coarse below fine: every block of `d` lies in a block of `c`.
pub fn leq(c: &Partition, d: &Partition) -> Result<bool, PartitionError> {
    if c.n() != d.n() {
        return Err(PartitionError::LeafSetMismatch);
    }
    Ok(c.refined_by(d))
}

/// All partitions in increasing restricted-growth-string order.
pub fn all_partitions(leaves: &LeafSet, nontrivial_only: bool) -> Vec<Partition> {
    let n = leaves.len();
    let mut out = Vec::new();
    let mut rgs = vec![0u8; n];
    fill_rgs(&mut rgs, 1, 0, &mut out);
    if nontrivial_only {
        out.retain(|p| !p.is_trivial());
    }
    out
}

fn fill_rgs(rgs: &mut Vec<u8>, i: usize, max: u8, out: &mut Vec<Partition>) {
    if i == rgs.len() {
        out.push(Partition::from_rgs(rgs.clone()).expect("valid growth string"));
        return;
    }
    for b in 0..=max + 1 {
        rgs[i] = b;
        fill_rgs(rgs, i + 1, max.max(b), out);
    }
}

/// P(A) with partitions indexed as in [`all_partitions`].
#[derive(Debug, Clone)]
pub struct PartitionPoset {
    pub leaves: LeafSet,
    pub partitions: Vec<Partition>,
    pub poset: Poset,
    index: HashMap<Partition, usize>,
}

impl PartitionPoset {
    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }
}

pub fn partition_poset(leaves: &LeafSet) -> Result<PartitionPoset, PartitionError> {
    if leaves.len() < 2 {
        return Err(PartitionError::TooSmall(leaves.len()));
    }
    let partitions = all_partitions(leaves, true);
    let labels = partitions.iter().map(|p| p.display(leaves)).collect();
    let poset = Poset::from_leq(labels, |i, j| partitions[i].refined_by(&partitions[j])).expect("refinement is a partial order");
    let index = partitions.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    Ok(PartitionPoset { leaves: leaves.clone(), partitions, poset, index })
}

/// A nondegenerate simplex of NP(A): strictly increasing nontrivial partitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    parts: Vec<Partition>,
}

impl Chain {
    pub fn new(parts: Vec<Partition>) -> Result<Self, PartitionError> {
        if parts.is_empty() {
            return Err(PartitionError::Parse("chain must be nonempty".into()));
        }
        for (i, p) in parts.iter().enumerate() {
            if p.n() != parts[0].n() {
                return Err(PartitionError::LeafSetMismatch);
            }
            if p.is_trivial() {
                return Err(PartitionError::TrivialInChain(i));
            }
            if i > 0 && (parts[i - 1] == *p || !parts[i - 1].refined_by(p)) {
                return Err(PartitionError::NotStrict(i));
            }
        }
        Ok(Chain { parts })
    }

    pub fn parse<S: AsRef<str>>(leaves: &LeafSet, parts: &[S]) -> Result<Self, PartitionError> {
        Chain::new(parts.iter().map(|p| Partition::parse(leaves, p.as_ref())).collect::<Result<_, _>>()?)
    }

    pub fn parts(&self) -> &[Partition] {
        &self.parts
    }

    /// Simplex dimension `p` (one less than the number of partitions).
    pub fn dim(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn n(&self) -> usize {
        self.parts[0].n()
    }

    pub fn last(&self) -> &Partition {
        self.parts.last().expect("nonempty chain")
    }

    pub fn is_face_of(&self, other: &Chain) -> bool {
        let mut it = other.parts.iter();
        self.parts.iter().all(|p| it.any(|q| q == p))
    }

    pub fn display(&self, leaves: &LeafSet) -> String {
        format!("[{}]", self.parts.iter().map(|p| p.display(leaves)).collect::<Vec<_>>().join(", "))
    }

    pub fn to_json(&self, leaves: &LeafSet) -> Value {
        Value::Array(self.parts.iter().map(|p| p.to_json(leaves)).collect())
    }

    /// Graphviz drawing of the layered tree: the whole set on top, one row
    /// per partition, then the leaves.
    pub fn to_dot(&self, leaves: &LeafSet, name: &str) -> String {
        let n = self.n();
        let mut layers = vec![Partition::indiscrete(n)];
        layers.extend(self.parts.iter().cloned());
        layers.push(Partition::discrete(n));
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=TB;\n");
        for (i, p) in layers.iter().enumerate() {
            s.push_str("  { rank=same;");
            for &b in p.blocks() {
                s.push_str(&format!(" n{i}_{b};"));
            }
            s.push_str(" }\n");
            for &b in p.blocks() {
                let shape = if i + 1 == layers.len() { "plaintext" } else { "box" };
                s.push_str(&format!("  n{i}_{b} [shape={shape}, label=\"{}\"];\n", leaves.format_mask(b)));
            }
        }
        for (i, w) in layers.windows(2).enumerate() {
            for &b in w[0].blocks() {
                for c in Partition::blocks_inside(&w[1], b) {
                    s.push_str(&format!("  n{i}_{b} -> n{}_{c};\n", i + 1));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Exactly one block splits between consecutive layers, and the last layer
/// has exactly one block of size at least 2.
pub fn is_elementary(sigma: &Chain) -> bool {
    let parts = sigma.parts();
    let one_split = parts.windows(2).all(|w| w[0].blocks().iter().filter(|b| !w[1].blocks().contains(b)).count() == 1);
    one_split && sigma.last().blocks().iter().filter(|b| b.count_ones() >= 2).count() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posets::order_complex;

    fn six() -> LeafSet {
        LeafSet::standard(6).unwrap()
    }

    fn bell_triangle(n: usize) -> u64 {
        let mut row = vec![1u64];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                next.push(next.last().unwrap() + x);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    #[test]
    fn leaf_set_validation() {
        assert_eq!(LeafSet::parse("a, b,c").unwrap().labels(), &["a", "b", "c"]);
        assert!(matches!(LeafSet::parse("a,a"), Err(PartitionError::DuplicateLabel(_))));
        assert!(matches!(LeafSet::parse("a,"), Err(PartitionError::BadLabel(_))));
        assert!(matches!(LeafSet::new(Vec::<String>::new()), Err(PartitionError::EmptyLeafSet)));
    }

    #[test]
    fn small_enumerations() {
        assert!(all_partitions(&LeafSet::standard(2).unwrap(), true).is_empty());
        let abc = LeafSet::standard(3).unwrap();
        let shown: Vec<String> = all_partitions(&abc, true).iter().map(|p| p.display(&abc)).collect();
        assert_eq!(shown, vec!["(ab)(c)", "(ac)(b)", "(a)(bc)"]);
        assert_eq!(all_partitions(&LeafSet::standard(4).unwrap(), true).len(), 13);
    }

    #[test]
    fn counts_match_bell_triangle() {
        for n in 1..=8 {
            assert_eq!(all_partitions(&LeafSet::standard(n).unwrap(), false).len() as u64, bell_triangle(n), "n = {n}");
        }
    }

    #[test]
    fn refinement_convention() {
        let a = six();
        let c = Partition::parse(&a, "(abcde)(f)").unwrap();
        let d = Partition::parse(&a, "(ab)(cde)(f)").unwrap();
        assert!(leq(&c, &d).unwrap());
        assert!(!leq(&d, &c).unwrap());
        let abcd = LeafSet::standard(4).unwrap();
        let x = Partition::parse(&abcd, "(ab)(cd)").unwrap();
        let y = Partition::parse(&abcd, "(ac)(bd)").unwrap();
        assert!(!leq(&x, &y).unwrap() && !leq(&y, &x).unwrap());
        assert_eq!(leq(&x, &c), Err(PartitionError::LeafSetMismatch));
    }

    #[test]
    fn poset_sizes_and_complex() {
        assert!(matches!(partition_poset(&LeafSet::standard(1).unwrap()), Err(PartitionError::TooSmall(1))));
        assert!(partition_poset(&LeafSet::standard(2).unwrap()).unwrap().poset.is_empty());
        let p3 = partition_poset(&LeafSet::standard(3).unwrap()).unwrap();
        assert_eq!(order_complex(&p3.poset).f_vector(), vec![3]);
        assert_eq!(partition_poset(&LeafSet::standard(5).unwrap()).unwrap().poset.len(), 50);
        let p4 = partition_poset(&LeafSet::standard(4).unwrap()).unwrap();
        assert_eq!(order_complex(&p4.poset).f_vector(), vec![13, 18]);
    }

    #[test]
    fn elementary_examples() {
        let a = six();
        let e1 = Chain::parse(&a, &["(abcde)(f)", "(ab)(cde)(f)", "(a)(b)(cde)(f)"]).unwrap();
        let e2 = Chain::parse(&a, &["(abcde)(f)", "(ab)(cde)(f)", "(ab)(c)(d)(e)(f)"]).unwrap();
        let two = Chain::parse(&a, &["(abcde)(f)", "(ab)(cde)(f)"]).unwrap();
        assert!(is_elementary(&e1));
        assert!(is_elementary(&e2));
        assert!(!is_elementary(&two));
        assert!(two.is_face_of(&e1));
    }

    #[test]
    fn chain_validation() {
        let a = LeafSet::standard(4).unwrap();
        assert_eq!(Chain::parse(&a, &["(ab)(c)(d)", "(ab)(cd)"]), Err(PartitionError::NotStrict(1)));
        assert_eq!(Chain::parse(&a, &["(abcd)"]), Err(PartitionError::TrivialInChain(0)));
    }

    #[test]
    fn json_round_trip() {
        let a = six();
        let p = Partition::parse(&a, "(f)(cde)(ab)").unwrap();
        let v = p.to_json(&a);
        assert_eq!(v.to_string(), r#"[["a","b"],["c","d","e"],["f"]]"#);
        assert_eq!(Partition::from_json(&a, &v).unwrap(), p);
        let dup: Value = serde_json::from_str(r#"[["a","a"],["b","c","d","e","f"]]"#).unwrap();
        assert_eq!(Partition::from_json(&a, &dup), Err(PartitionError::NotACover));
    }

    #[test]
    fn max_chain_length() {
        for n in 3..=6 {
            let p = partition_poset(&LeafSet::standard(n).unwrap()).unwrap();
            assert_eq!(order_complex(&p.poset).dim(), Some(n - 3));
        }
    }

    #[test]
    fn every_chain_is_a_face_of_an_elementary_one() {
        for n in 3..=5 {
            let pp = partition_poset(&LeafSet::standard(n).unwrap()).unwrap();
            let chains: Vec<Chain> = pp
                .poset
                .chains()
                .into_iter()
                .map(|c| Chain::new(c.iter().map(|&i| pp.partitions[i].clone()).collect()).unwrap())
                .collect();
            let elementary: Vec<&Chain> = chains.iter().filter(|c| is_elementary(c)).collect();
            for c in &chains {
                assert!(elementary.iter().any(|e| c.is_face_of(e)), "{}", c.display(&pp.leaves));
            }
        }
    }
}
