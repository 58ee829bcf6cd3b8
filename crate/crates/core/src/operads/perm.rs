//! Permutations of `0..n` as image vectors: `σ[i]` is the image of `i`.

use std::collections::HashMap;

pub fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// `(s ∘ t)(i) = s(t(i))`.
pub fn compose(s: &[usize], t: &[usize]) -> Vec<usize> {
    t.iter().map(|&i| s[i]).collect()
}

pub fn inverse(s: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; s.len()];
    for (i, &j) in s.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn is_permutation(s: &[usize]) -> bool {
    let mut seen = vec![false; s.len()];
    s.iter().all(|&j| j < s.len() && !std::mem::replace(&mut seen[j], true))
}

/// All permutations of `0..n` in lexicographic order, identity first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutations {
    all: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        let mut all = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    go(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        go(n, &mut cur, &mut used, &mut all);
        let index = all.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Permutations { all, index }
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn all(&self) -> &[Vec<usize>] {
        &self.all
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.all[i]
    }

    pub fn index_of(&self, p: &[usize]) -> usize {
        self.index[p]
    }

    pub fn try_index_of(&self, p: &[usize]) -> Option<usize> {
        self.index.get(p).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic() {
        let p = Permutations::new(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.get(0), &[0, 1, 2]);
        assert_eq!(p.get(5), &[2, 1, 0]);
        assert_eq!(p.index_of(&[1, 0, 2]), 2);
    }

    #[test]
    fn group_laws() {
        let p = Permutations::new(4);
        for s in p.all() {
            assert_eq!(compose(s, &inverse(s)), identity(4));
            assert!(is_permutation(s));
        }
        assert!(!is_permutation(&[0, 0]));
    }
}
