//! Text tables for user-supplied operads.
//!
//! ```text
//! # comments run to the end of the line
//! operad NAME
//! max_arity 3
//! arity 2 1
//! arity 3 1
//! act 2:0 [1 0] = 2:0
//! comp 2:0 (2:0, 1:0) = 3:0
//! ```
//!
//! Arity sections give operation counts for every arity from 2 to
//! `max_arity`. `act n:i [p] = n:j` states `θ_i·p = θ_j` for each
//! non-identity permutation `p` (as an image list). `comp` lists
//! `γ(θ; θ_1, ..., θ_k)` for every case not forced by the unit laws, that is
//! outer arity at least 2 and some input of arity at least 2. Arity 1 holds
//! only the identity `1:0`.

use std::collections::HashMap;

use super::perm::is_permutation;
use super::{key, nontrivial_key, visit_choices, CompKey, FiniteOperad, Op, OperadError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_TABLE_ARITY: usize = 8;
const MAX_ENTRIES: usize = 1_000_000;

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, OperadError> {
    Err(OperadError::Parse { line, msg: msg.into() })
}

fn parse_usize(line: usize, s: &str) -> Result<usize, OperadError> {
    s.parse().or_else(|_| err(line, format!("expected a number, found '{s}'")))
}

/// `n:i`
fn parse_op(line: usize, s: &str) -> Result<(usize, Op), OperadError> {
    let (a, b) = s.split_once(':').ok_or_else(|| OperadError::Parse { line, msg: format!("expected ARITY:INDEX, found '{s}'") })?;
    let n = parse_usize(line, a)?;
    let i = parse_usize(line, b)?;
    Ok((n, i as Op))
}

pub fn parse_table(text: &str) -> Result<FiniteOperad, OperadError> {
    let mut name: Option<String> = None;
    let mut max_arity: Option<usize> = None;
    let mut counts: HashMap<usize, usize> = HashMap::new();
    let mut actions: HashMap<(usize, Op, Vec<usize>), (Op, usize)> = HashMap::new();
    let mut comps: HashMap<CompKey, (Op, usize)> = HashMap::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (head, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        match head {
            "operad" => {
                if name.is_some() {
                    return err(line, "operad name given twice");
                }
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return err(line, "operad name must be a single word");
                }
                name = Some(rest.to_string());
            }
            "max_arity" => {
                if max_arity.is_some() {
                    return err(line, "max_arity given twice");
                }
                let m = parse_usize(line, rest)?;
                if !(1..=MAX_TABLE_ARITY).contains(&m) {
                    return err(line, format!("max_arity must be between 1 and {MAX_TABLE_ARITY}"));
                }
                max_arity = Some(m);
            }
            "arity" => {
                let m = max_arity.ok_or_else(|| OperadError::Parse { line, msg: "max_arity must come first".into() })?;
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return err(line, "expected 'arity N COUNT'");
                }
                let (n, c) = (parse_usize(line, parts[0])?, parse_usize(line, parts[1])?);
                if n < 2 || n > m {
                    return err(line, format!("arity {n} outside 2..={m}"));
                }
                if counts.insert(n, c).is_some() {
                    return err(line, format!("arity {n} declared twice"));
                }
                let size: usize = counts.iter().map(|(&n, &c)| c.saturating_mul((1..=n).product())).fold(0, usize::saturating_add);
                if size > MAX_ENTRIES {
                    return err(line, "table too large");
                }
            }
            "act" => {
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| OperadError::Parse { line, msg: "expected '='".into() })?;
                let lhs = lhs.trim();
                let (op, perm) = lhs.split_once('[').ok_or_else(|| OperadError::Parse { line, msg: "expected '[' before the permutation".into() })?;
                let perm = perm.trim().strip_suffix(']').ok_or_else(|| OperadError::Parse { line, msg: "expected ']' after the permutation".into() })?;
                let (n, i) = parse_op(line, op.trim())?;
                let p: Vec<usize> = perm.split_whitespace().map(|x| parse_usize(line, x)).collect::<Result<_, _>>()?;
                let (n2, j) = parse_op(line, rhs.trim())?;
                check_op(line, &counts, n, i)?;
                check_op(line, &counts, n2, j)?;
                if n2 != n || p.len() != n || !is_permutation(&p) {
                    return err(line, format!("[{perm}] is not a permutation of an arity-{n} operation"));
                }
                if p.iter().enumerate().all(|(a, &b)| a == b) {
                    if i != j {
                        return err(line, "the identity permutation must fix every operation");
                    }
                    continue;
                }
                if actions.insert((n, i, p), (j, line)).is_some() {
                    return err(line, "action entry given twice");
                }
            }
            "comp" => {
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| OperadError::Parse { line, msg: "expected '='".into() })?;
                let (outer, ins) = lhs.split_once('(').ok_or_else(|| OperadError::Parse { line, msg: "expected '(' before the inputs".into() })?;
                let ins = ins.trim().strip_suffix(')').ok_or_else(|| OperadError::Parse { line, msg: "expected ')' after the inputs".into() })?;
                let (k, theta) = parse_op(line, outer.trim())?;
                check_op(line, &counts, k, theta)?;
                let inputs: Vec<(usize, Op)> = ins.split(',').map(|s| parse_op(line, s.trim())).collect::<Result<_, _>>()?;
                for &(a, t) in &inputs {
                    check_op(line, &counts, a, t)?;
                }
                if inputs.len() != k {
                    return err(line, format!("outer arity {k} needs {k} inputs, found {}", inputs.len()));
                }
                let (m, r) = parse_op(line, rhs.trim())?;
                let total: usize = inputs.iter().map(|i| i.0).sum();
                if m != total {
                    return err(line, format!("composite has arity {total}, not {m}"));
                }
                check_op(line, &counts, m, r)?;
                if !nontrivial_key(k, &inputs) {
                    return err(line, "entry is fixed by the unit laws and must be omitted");
                }
                if comps.insert(key(k, theta, &inputs), (r, line)).is_some() {
                    return err(line, "composition entry given twice");
                }
            }
            other => return err(line, format!("unknown directive '{other}'")),
        }
    }

    let name = name.ok_or_else(|| OperadError::Incomplete("missing 'operad NAME'".into()))?;
    let max_arity = max_arity.ok_or_else(|| OperadError::Incomplete("missing 'max_arity'".into()))?;
    let mut count_vec = vec![0usize; max_arity + 1];
    for n in 2..=max_arity {
        count_vec[n] = *counts.get(&n).ok_or_else(|| OperadError::Incomplete(format!("missing 'arity {n}'")))?;
    }
    let mut op = FiniteOperad::skeleton(&name, max_arity, &count_vec);
    for n in 2..=max_arity {
        for theta in 0..count_vec[n] as Op {
            let mut row = Vec::with_capacity(op.perms[n].len());
            for p in op.perms[n].all() {
                if p.iter().enumerate().all(|(a, &b)| a == b) {
                    row.push(theta);
                    continue;
                }
                match actions.remove(&(n, theta, p.clone())) {
                    Some((j, _)) => row.push(j),
                    None => return Err(OperadError::Incomplete(format!("no action of {p:?} on {n}:{theta}"))),
                }
            }
            op.action[n][theta as usize] = row;
        }
    }
    let shapes: usize = op
        .composition_shapes()
        .iter()
        .map(|(k, c)| c.iter().fold(count_vec[*k], |acc, &a| acc.saturating_mul(count_vec[a])))
        .fold(0, usize::saturating_add);
    if shapes > MAX_ENTRIES {
        return Err(OperadError::Incomplete("composition table too large".into()));
    }
    let mut missing: Option<String> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (k, arities) in op.composition_shapes() {
        let mut found = Vec::new();
        visit_choices(&op, k, &arities, true, &mut rng, |theta, ins| {
            let key = key(k, theta, ins);
            match comps.remove(&key) {
                Some((r, _)) => found.push((key, r)),
                None => {
                    missing.get_or_insert_with(|| op.describe(k, theta, ins));
                }
            }
        });
        op.comp.extend(found);
    }
    if let Some(m) = missing {
        return Err(OperadError::Incomplete(format!("no composite for {m}")));
    }
    debug_assert!(comps.is_empty() && actions.is_empty());
    op.validate()?;
    Ok(op)
}

fn check_op(line: usize, counts: &HashMap<usize, usize>, n: usize, i: Op) -> Result<(), OperadError> {
    let c = if n == 1 { 1 } else { counts.get(&n).copied().unwrap_or(0) };
    if (i as usize) < c {
        Ok(())
    } else {
        err(line, format!("operation {n}:{i} is not declared"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_builtins() {
        for op in [FiniteOperad::comm(4), FiniteOperad::assoc(3)] {
            let parsed = parse_table(&op.to_table()).unwrap();
            assert_eq!(parsed, op);
        }
    }

    #[test]
    fn small_comm_table() {
        let text = "operad c\nmax_arity 3\narity 2 1\narity 3 1\nact 2:0 [1 0] = 2:0\n\
                    act 3:0 [0 2 1] = 3:0\nact 3:0 [1 0 2] = 3:0\nact 3:0 [1 2 0] = 3:0\n\
                    act 3:0 [2 0 1] = 3:0\nact 3:0 [2 1 0] = 3:0\n\
                    comp 2:0 (2:0, 1:0) = 3:0\ncomp 2:0 (1:0, 2:0) = 3:0\n";
        assert_eq!(parse_table(text).unwrap(), FiniteOperad::comm(3).renamed("c"));
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(parse_table("operad x\nmax_arity 2\nfoo"), Err(OperadError::Parse { line: 3, .. })));
        assert!(matches!(parse_table("operad x\nmax_arity 2\narity 2 1\n"), Err(OperadError::Incomplete(_))));
        let dup = "operad x\nmax_arity 2\narity 2 1\nact 2:0 [1 0] = 2:0\nact 2:0 [1 0] = 2:0\n";
        assert!(matches!(parse_table(dup), Err(OperadError::Parse { line: 5, .. })));
        let unit = "operad x\nmax_arity 2\narity 2 1\ncomp 2:0 (1:0, 1:0) = 2:0\n";
        assert!(matches!(parse_table(unit), Err(OperadError::Parse { line: 4, .. })));
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // Two binary operations that swap under composition on the left only.
        let mut t = String::from("operad m\nmax_arity 3\narity 2 2\narity 3 2\n");
        t.push_str("act 2:0 [1 0] = 2:0\nact 2:1 [1 0] = 2:1\n");
        for i in 0..2 {
            for p in ["0 2 1", "1 0 2", "1 2 0", "2 0 1", "2 1 0"] {
                t.push_str(&format!("act 3:{i} [{p}] = 3:{i}\n"));
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                t.push_str(&format!("comp 2:{a} (2:{b}, 1:0) = 3:{a}\n"));
                t.push_str(&format!("comp 2:{a} (1:0, 2:{b}) = 3:{b}\n"));
            }
        }
        assert!(matches!(parse_table(&t), Err(OperadError::AxiomViolation(_))));
    }
}
