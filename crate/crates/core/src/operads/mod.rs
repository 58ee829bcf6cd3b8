//! Finite reduced set operads given by explicit tables, their nerves on tree
//! posets, operad-labelled partition complexes and two bar complexes.
//!
//! Operations of arity `n` are the indices `0..count(n)`. Arity 1 holds only
//! the identity and arity 0 is empty. The right action of a permutation is
//! `(θ·σ)(x_0, ..., x_{n-1}) = θ(x_{σ⁻¹(0)}, ..., x_{σ⁻¹(n-1)})`, and
//! composites take their inputs block by block in the order of the inner
//! operations.

mod bar;
mod nerve;
pub mod perm;
mod table;

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::comparison::ComparisonError;
use crate::partitions::PartitionError;
use crate::simplicial::SimplicialError;
use crate::trees::TreeError;

pub use bar::{bar_complex, compare_bars, tree_bar_complex, BarComparison, BarSide};
pub use nerve::{contract_edge, labelled_complex, nerve, restrict_labelling, verify_labelled_comparison, LabelledComplex, LabelledReport, Nerve};
pub use table::parse_table;

use perm::{compose, identity, inverse, Permutations};

/// Arity bound up to which validation runs over every case.
pub const EXHAUSTIVE_ARITY: usize = 4;
const SAMPLES_PER_SHAPE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperadError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("incomplete table: {0}")]
    Incomplete(String),
    #[error("arity {arity} exceeds the operad bound {max}")]
    ArityOverflow { arity: usize, max: usize },
    #[error("operad axiom fails: {0}")]
    AxiomViolation(String),
    #[error("unknown operad '{0}'")]
    UnknownOperad(String),
    #[error("need at least 2 leaves, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Comparison(#[from] ComparisonError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

pub type Op = u32;

/// Key of a composition entry: `[k, θ, k_1, θ_1, ..., k_k, θ_k]`.
type CompKey = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteOperad {
    name: String,
    max_arity: usize,
    counts: Vec<usize>,
    perms: Vec<Permutations>,
    /// action[n][θ][perm index]
    action: Vec<Vec<Vec<Op>>>,
    comp: HashMap<CompKey, Op>,
}

/// Composition entries that are not forced by the unit laws: outer arity at
/// least 2 and some input of arity at least 2.
fn nontrivial_key(k: usize, inputs: &[(usize, Op)]) -> bool {
    k >= 2 && inputs.iter().any(|&(a, _)| a >= 2)
}

fn key(k: usize, theta: Op, inputs: &[(usize, Op)]) -> CompKey {
    let mut v = Vec::with_capacity(2 + 2 * inputs.len());
    v.push(k as u32);
    v.push(theta);
    for &(a, t) in inputs {
        v.push(a as u32);
        v.push(t);
    }
    v
}

/// Compositions of `total` into `parts` positive parts, lexicographic.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl FiniteOperad {
    /// Builds all tables from an action and a composition rule, then validates.
    pub fn from_fns<A, C>(name: &str, max_arity: usize, counts: &[usize], act: A, comp: C) -> Result<Self, OperadError>
    where
        A: Fn(usize, Op, &[usize]) -> Op,
        C: Fn(usize, Op, &[(usize, Op)]) -> Op,
    {
        let mut op = FiniteOperad::skeleton(name, max_arity, counts);
        for n in 2..=max_arity {
            for theta in 0..counts[n] as Op {
                let row: Vec<Op> = op.perms[n].all().iter().map(|s| act(n, theta, s)).collect();
                op.action[n][theta as usize] = row;
            }
        }
        let mut table = HashMap::new();
        for (k, inputs) in op.composition_shapes() {
            for_each_choice(&op, k, &inputs, |theta, ins| {
                table.insert(key(k, theta, ins), comp(k, theta, ins));
            });
        }
        op.comp = table;
        op.validate()?;
        Ok(op)
    }

    fn skeleton(name: &str, max_arity: usize, counts: &[usize]) -> Self {
        let mut c = vec![0usize; max_arity + 1];
        if max_arity >= 1 {
            c[1] = 1;
        }
        for n in 2..=max_arity {
            c[n] = counts.get(n).copied().unwrap_or(0);
        }
        let perms = (0..=max_arity).map(Permutations::new).collect();
        let action = (0..=max_arity).map(|n| vec![Vec::new(); c[n]]).collect();
        FiniteOperad { name: name.to_string(), max_arity, counts: c, perms, action, comp: HashMap::new() }
    }

    /// Commutative operad: one operation in each arity.
    pub fn comm(max_arity: usize) -> Self {
        let counts: Vec<usize> = (0..=max_arity).map(|n| usize::from(n >= 1)).collect();
        FiniteOperad::from_fns("comm", max_arity, &counts, |_, _, _| 0, |_, _, _| 0).expect("comm is an operad")
    }

    /// Associative operad: arity-n operations are the words `x_{w(0)} ... x_{w(n-1)}`
    /// for permutations `w`, indexed lexicographically.
    pub fn assoc(max_arity: usize) -> Self {
        let fact: Vec<usize> = (0..=max_arity).map(|n| (1..=n).product::<usize>()).collect();
        let counts: Vec<usize> = (0..=max_arity).map(|n| if n == 0 { 0 } else { fact[n] }).collect();
        let perms: Vec<Permutations> = (0..=max_arity).map(Permutations::new).collect();
        let act = |n: usize, theta: Op, s: &[usize]| {
            let w = perms[n].get(theta as usize);
            perms[n].index_of(&compose(&inverse(s), w)) as Op
        };
        let comp = |k: usize, theta: Op, inputs: &[(usize, Op)]| {
            let w = perms[k].get(theta as usize);
            let mut offsets = vec![0usize; k];
            for j in 1..k {
                offsets[j] = offsets[j - 1] + inputs[j - 1].0;
            }
            let mut word = Vec::new();
            for &j in w {
                let (a, t) = inputs[j];
                word.extend(perms[a].get(t as usize).iter().map(|&s| offsets[j] + s));
            }
            perms[word.len()].index_of(&word) as Op
        };
        FiniteOperad::from_fns("assoc", max_arity, &counts, act, comp).expect("assoc is an operad")
    }

    /// `comm`, `assoc`, or `file:PATH` holding a table.
    pub fn by_name(spec: &str, max_arity: usize) -> Result<Self, OperadError> {
        match spec {
            "comm" => Ok(FiniteOperad::comm(max_arity)),
            "assoc" => Ok(FiniteOperad::assoc(max_arity)),
            _ => match spec.strip_prefix("file:") {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| OperadError::Parse { line: 0, msg: format!("cannot read {path}: {e}") })?;
                    parse_table(&text)
                }
                None => Err(OperadError::UnknownOperad(spec.to_string())),
            },
        }
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn count(&self, n: usize) -> usize {
        self.counts.get(n).copied().unwrap_or(0)
    }

    pub fn check_arity(&self, n: usize) -> Result<(), OperadError> {
        if n > self.max_arity {
            Err(OperadError::ArityOverflow { arity: n, max: self.max_arity })
        } else {
            Ok(())
        }
    }

    pub fn op_name(&self, n: usize, theta: Op) -> String {
        if n == 1 {
            "id".to_string()
        } else {
            format!("{n}:{theta}")
        }
    }

    pub fn permutations(&self, n: usize) -> &Permutations {
        &self.perms[n]
    }

    /// `θ·σ`.
    pub fn act(&self, n: usize, theta: Op, sigma: &[usize]) -> Op {
        if n <= 1 {
            return theta;
        }
        self.action[n][theta as usize][self.perms[n].index_of(sigma)]
    }

    /// `γ(θ; θ_1, ..., θ_k)` with `inputs[j] = (arity, operation)`.
    pub fn compose(&self, k: usize, theta: Op, inputs: &[(usize, Op)]) -> Result<Op, OperadError> {
        let total: usize = inputs.iter().map(|i| i.0).sum();
        self.check_arity(total)?;
        if k == 1 {
            return Ok(inputs[0].1);
        }
        if inputs.iter().all(|&(a, _)| a == 1) {
            return Ok(theta);
        }
        self.comp.get(&key(k, theta, inputs)).copied().ok_or_else(|| {
            OperadError::Incomplete(format!("no composite for {}", self.describe(k, theta, inputs)))
        })
    }

    fn describe(&self, k: usize, theta: Op, inputs: &[(usize, Op)]) -> String {
        let ins: Vec<String> = inputs.iter().map(|&(a, t)| format!("{a}:{t}")).collect();
        format!("{k}:{theta} ({})", ins.join(", "))
    }

    /// Shapes `(k, [k_1, ..., k_k])` of the nontrivial composition entries.
    fn composition_shapes(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for total in 2..=self.max_arity {
            for k in 2..=total {
                for c in compositions(total, k) {
                    if c.iter().any(|&a| a >= 2) {
                        out.push((k, c));
                    }
                }
            }
        }
        out
    }

    /// Checks the right action, unit, associativity and both equivariance
    /// laws; over every case up to arity [`EXHAUSTIVE_ARITY`], and on a
    /// seeded sample of operation choices per shape above it.
    pub fn validate(&self) -> Result<(), OperadError> {
        let exhaustive = self.max_arity <= EXHAUSTIVE_ARITY;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let fail = |msg: String| Err(OperadError::AxiomViolation(format!("{}: {msg}", self.name)));
        for n in 2..=self.max_arity {
            for theta in 0..self.counts[n] as Op {
                let row = &self.action[n][theta as usize];
                if row.len() != self.perms[n].len() || row.iter().any(|&x| x as usize >= self.counts[n]) {
                    return fail(format!("action table of {} is malformed", self.op_name(n, theta)));
                }
                if self.act(n, theta, &identity(n)) != theta {
                    return fail(format!("identity permutation moves {}", self.op_name(n, theta)));
                }
                let pairs = self.perms[n].len() * self.perms[n].len();
                let cases: Vec<(usize, usize)> = if exhaustive || pairs <= 4 * SAMPLES_PER_SHAPE {
                    (0..self.perms[n].len()).flat_map(|a| (0..self.perms[n].len()).map(move |b| (a, b))).collect()
                } else {
                    (0..SAMPLES_PER_SHAPE).map(|_| (rng.random_range(0..self.perms[n].len()), rng.random_range(0..self.perms[n].len()))).collect()
                };
                for (a, b) in cases {
                    let (s, t) = (self.perms[n].get(a), self.perms[n].get(b));
                    let lhs = self.act(n, self.act(n, theta, s), t);
                    let rhs = self.act(n, theta, &compose(s, t));
                    if lhs != rhs {
                        return fail(format!("({}·σ)·τ ≠ {}·(στ) for σ = {s:?}, τ = {t:?}", self.op_name(n, theta), self.op_name(n, theta)));
                    }
                }
            }
        }
        for (k, arities) in self.composition_shapes() {
            let check = |theta: Op, ins: &[(usize, Op)]| -> Result<(), OperadError> {
                let r = self.compose(k, theta, ins)?;
                let total: usize = arities.iter().sum();
                if r as usize >= self.counts[total] {
                    return fail(format!("composite {} is out of range", self.describe(k, theta, ins)));
                }
                self.check_equivariance(k, theta, ins, r)?;
                self.check_associativity(k, theta, ins, r)
            };
            let mut result = Ok(());
            visit_choices(self, k, &arities, exhaustive, &mut rng, |theta, ins| {
                if result.is_ok() {
                    result = check(theta, ins);
                }
            });
            result?;
        }
        Ok(())
    }

    fn check_equivariance(&self, k: usize, theta: Op, ins: &[(usize, Op)], r: Op) -> Result<(), OperadError> {
        let total: usize = ins.iter().map(|i| i.0).sum();
        let offsets = offsets_of(ins.iter().map(|i| i.0));
        // Inputs acted on one at a time by adjacent transpositions generate
        // the block-diagonal part.
        for (j, &(a, t)) in ins.iter().enumerate() {
            for pos in 0..a.saturating_sub(1) {
                let mut tau = identity(a);
                tau.swap(pos, pos + 1);
                let mut moved = ins.to_vec();
                moved[j] = (a, self.act(a, t, &tau));
                let mut block = identity(total);
                block.swap(offsets[j] + pos, offsets[j] + pos + 1);
                if self.compose(k, theta, &moved)? != self.act(total, r, &block) {
                    return Err(OperadError::AxiomViolation(format!(
                        "{}: acting on input {j} of {} does not commute with composition",
                        self.name,
                        self.describe(k, theta, ins)
                    )));
                }
            }
        }
        // Acting on the outer operation permutes the blocks.
        for pos in 0..k - 1 {
            let mut sigma = identity(k);
            sigma.swap(pos, pos + 1);
            if self.compose(k, self.act(k, theta, &sigma), ins)? != self.act(total, self.compose(k, theta, &permute_inputs(ins, &sigma))?, &block_permutation(ins, &sigma)) {
                return Err(OperadError::AxiomViolation(format!(
                    "{}: acting on the outer operation of {} does not permute the blocks",
                    self.name,
                    self.describe(k, theta, ins)
                )));
            }
        }
        Ok(())
    }

    fn check_associativity(&self, k: usize, theta: Op, ins: &[(usize, Op)], r: Op) -> Result<(), OperadError> {
        let total: usize = ins.iter().map(|i| i.0).sum();
        if total >= self.max_arity {
            return Ok(());
        }
        // Grow one input of the composite by a binary-or-larger operation at
        // every position; this covers every shape of a second layer whose
        // extra arity fits, one splitting leaf at a time.
        for extra in 2..=self.max_arity - total + 1 {
            for e in 0..self.counts[extra] as Op {
                for leaf in 0..total {
                    let mut outer_ins: Vec<(usize, Op)> = vec![(1, 0); total];
                    outer_ins[leaf] = (extra, e);
                    let lhs = self.compose(total, r, &outer_ins)?;
                    // Locate the input block holding `leaf`.
                    let offsets = offsets_of(ins.iter().map(|i| i.0));
                    let j = (0..k).rev().find(|&j| offsets[j] <= leaf).expect("leaf lies in a block");
                    let (a, t) = ins[j];
                    let mut inner_ins: Vec<(usize, Op)> = vec![(1, 0); a];
                    inner_ins[leaf - offsets[j]] = (extra, e);
                    let inner = self.compose(a, t, &inner_ins)?;
                    let mut new_ins = ins.to_vec();
                    new_ins[j] = (a + extra - 1, inner);
                    let rhs = self.compose(k, theta, &new_ins)?;
                    if lhs != rhs {
                        return Err(OperadError::AxiomViolation(format!(
                            "{}: associativity fails for {} grafted with {extra}:{e} at input {leaf}",
                            self.name,
                            self.describe(k, theta, ins)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Serializes to the table format read by [`parse_table`].
    pub fn to_table(&self) -> String {
        let mut s = format!("operad {}\nmax_arity {}\n", self.name, self.max_arity);
        for n in 2..=self.max_arity {
            s.push_str(&format!("arity {n} {}\n", self.counts[n]));
        }
        for n in 2..=self.max_arity {
            for theta in 0..self.counts[n] {
                for (pi, p) in self.perms[n].all().iter().enumerate().skip(1) {
                    let perm: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                    s.push_str(&format!("act {n}:{theta} [{}] = {n}:{}\n", perm.join(" "), self.action[n][theta][pi]));
                }
            }
        }
        let mut entries: Vec<(&CompKey, &Op)> = self.comp.iter().collect();
        entries.sort();
        for (k, r) in entries {
            let ins: Vec<String> = k[2..].chunks(2).map(|c| format!("{}:{}", c[0], c[1])).collect();
            let total: u32 = k[2..].chunks(2).map(|c| c[0]).sum();
            s.push_str(&format!("comp {}:{} ({}) = {total}:{r}\n", k[0], k[1], ins.join(", ")));
        }
        s
    }
}

fn offsets_of(arities: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut acc = 0;
    arities
        .map(|a| {
            let o = acc;
            acc += a;
            o
        })
        .collect()
}

/// Inputs reordered as `θ_{σ⁻¹(0)}, ..., θ_{σ⁻¹(k-1)}`.
pub(crate) fn permute_inputs(ins: &[(usize, Op)], sigma: &[usize]) -> Vec<(usize, Op)> {
    let inv = inverse(sigma);
    inv.iter().map(|&j| ins[j]).collect()
}

/// Moves old block `j` (width `k_j`) to new block position `σ(j)`.
pub(crate) fn block_permutation(ins: &[(usize, Op)], sigma: &[usize]) -> Vec<usize> {
    let old = offsets_of(ins.iter().map(|i| i.0));
    let new = offsets_of(permute_inputs(ins, sigma).iter().map(|i| i.0));
    let total: usize = ins.iter().map(|i| i.0).sum();
    let mut pi = vec![0; total];
    for (j, &(a, _)) in ins.iter().enumerate() {
        for t in 0..a {
            pi[old[j] + t] = new[sigma[j]] + t;
        }
    }
    pi
}

/// The permutation `σ` with `σ(i)` = position in `given` of the i-th entry of
/// `canonical`. An operation with inputs ordered as `given` becomes, after
/// acting by `σ`, the same operation with inputs ordered as `canonical`.
pub fn reorder(given: &[u32], canonical: &[u32]) -> Vec<usize> {
    canonical.iter().map(|c| given.iter().position(|g| g == c).expect("same entries")).collect()
}

fn for_each_choice<F: FnMut(Op, &[(usize, Op)])>(op: &FiniteOperad, k: usize, arities: &[usize], mut f: F) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    visit_choices(op, k, arities, true, &mut rng, |t, i| f(t, i));
}

/// Every choice of outer and input operations for a shape, or a sample of
/// [`SAMPLES_PER_SHAPE`] choices when not exhaustive and there are more.
fn visit_choices<F: FnMut(Op, &[(usize, Op)])>(op: &FiniteOperad, k: usize, arities: &[usize], exhaustive: bool, rng: &mut ChaCha8Rng, mut f: F) {
    let radices: Vec<usize> = std::iter::once(op.counts[k]).chain(arities.iter().map(|&a| op.counts[a])).collect();
    let total: usize = radices.iter().product();
    if total == 0 {
        return;
    }
    let mut run = |mut code: usize| {
        let mut digits = Vec::with_capacity(radices.len());
        for &r in &radices {
            digits.push((code % r) as Op);
            code /= r;
        }
        let ins: Vec<(usize, Op)> = arities.iter().zip(&digits[1..]).map(|(&a, &d)| (a, d)).collect();
        f(digits[0], &ins);
    };
    if exhaustive || total <= SAMPLES_PER_SHAPE {
        (0..total).for_each(&mut run);
    } else {
        for _ in 0..SAMPLES_PER_SHAPE {
            run(rng.random_range(0..total));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_counts() {
        let a = FiniteOperad::assoc(4);
        assert_eq!((1..=4).map(|n| a.count(n)).collect::<Vec<_>>(), vec![1, 2, 6, 24]);
        let c = FiniteOperad::comm(5);
        assert!((1..=5).all(|n| c.count(n) == 1));
        assert_eq!(a.count(0), 0);
    }

    #[test]
    fn assoc_conventions() {
        let a = FiniteOperad::assoc(3);
        let p = a.permutations(3);
        // θ = x0 x1 x2, σ = (0 1 2 -> 1 2 0): θ·σ = σ⁻¹ as a word.
        let sigma = vec![1, 2, 0];
        let got = a.act(3, 0, &sigma);
        assert_eq!(p.get(got as usize), &[2, 0, 1]);
        // γ(x1 x0; x0 x1, id) = x2 x0 x1
        let swap = p_index(&a, 2, &[1, 0]);
        let r = a.compose(2, swap, &[(2, 0), (1, 0)]).unwrap();
        assert_eq!(p.get(r as usize), &[2, 0, 1]);
    }

    fn p_index(a: &FiniteOperad, n: usize, w: &[usize]) -> Op {
        a.permutations(n).index_of(w) as Op
    }

    #[test]
    fn builtins_validate() {
        FiniteOperad::comm(5).validate().unwrap();
        FiniteOperad::assoc(4).validate().unwrap();
        FiniteOperad::assoc(5).validate().unwrap();
    }

    #[test]
    fn broken_action_is_rejected() {
        // Assoc with the left action in place of the right one.
        let perms: Vec<Permutations> = (0..=3).map(Permutations::new).collect();
        let bad = FiniteOperad::from_fns(
            "bad",
            3,
            &[0, 1, 2, 6],
            |n, t, s| perms[n].index_of(&compose(s, perms[n].get(t as usize))) as Op,
            |k, t, ins| FiniteOperad::assoc(3).compose(k, t, ins).unwrap(),
        );
        assert!(matches!(bad, Err(OperadError::AxiomViolation(_))));
    }

    #[test]
    fn arity_overflow() {
        let c = FiniteOperad::comm(2);
        assert_eq!(c.compose(2, 0, &[(2, 0), (1, 0)]), Err(OperadError::ArityOverflow { arity: 3, max: 2 }));
    }

    #[test]
    fn compositions_enumerate() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(compositions(2, 3), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn block_permutation_example() {
        // blocks of widths 2, 1 swapped: old positions 0,1 | 2 -> new 1,2 | 0
        assert_eq!(block_permutation(&[(2, 0), (1, 0)], &[1, 0]), vec![1, 2, 0]);
    }

    #[test]
    fn reorder_example() {
        assert_eq!(reorder(&[4, 1, 2], &[1, 2, 4]), vec![1, 2, 0]);
    }
}
