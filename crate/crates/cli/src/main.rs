//! `partcx` command-line driver.
//!
//! Exit status is 0 when every check of the run passes, 1 when a
//! verification fails and 2 on usage or configuration errors.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use partcx::comparison::{verify_single_tree, Campaign, TheoremReport, TreeReport, VerifyOptions};
use partcx::operads::{compare_bars, verify_labelled_comparison, FiniteOperad};
use partcx::partitions::{all_partitions, partition_poset, Chain, LeafSet, Partition};
use partcx::posets::{check_homotopy_initial, InitialityReport, SD_MODEL};
use partcx::simplicial::{HomologyResult, Ring};
use partcx::trees::{enumerate_trees, Tree};

const MAX_PARTITIONS_N: usize = 10;
const MAX_TREES_N: usize = 7;
const MAX_HOMOLOGY_N: usize = 6;
const MAX_THEOREM_N: usize = 6;
const MAX_INITIAL_N: usize = 5;
const MAX_LABELLED_N: usize = 4;
const MAX_BAR_N: usize = 5;

#[derive(Parser)]
#[command(name = "partcx", version, about = "Partition complexes, tree posets and operad bar constructions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Leaf set {a, b, ...} of this size.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Explicit comma-separated leaf labels.
    #[arg(long, global = true, conflicts_with = "n")]
    labels: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = RingArg::Z)]
    ring: RingArg,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RingArg {
    Z,
    Q,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Np,
    Tplus,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Tree,
    Partition,
    Chain,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the nontrivial partitions P(A).
    Partitions {
        /// Include the indiscrete and discrete partitions.
        #[arg(long)]
        all: bool,
    },
    /// Enumerate T(A), or T+(A) with --plus.
    Trees {
        #[arg(long)]
        plus: bool,
    },
    /// Reduced homology of NP(A) or of the order complex of T+(A).
    Homology {
        #[arg(value_enum)]
        space: Space,
    },
    /// Per-tree checks for every tree of T+(A).
    VerifyTheorem {
        /// Largest leaf-vertex subset to build cone witnesses for.
        #[arg(long)]
        max_cone_subset: Option<usize>,
        /// Corrupt one face map in one cone witness, chosen by this seed.
        #[arg(long, value_name = "SEED")]
        inject_fault: Option<u64>,
        /// Verify only this tree, given by its non-root members, e.g. "ab cde".
        #[arg(long)]
        tree: Option<String>,
        /// Append one JSON line per finished tree to this file.
        #[arg(long)]
        stream: Option<PathBuf>,
        /// Reuse the trees already recorded in the stream file.
        #[arg(long, requires = "stream")]
        resume: bool,
    },
    /// Homotopy initiality of the map from chains to trees.
    VerifyPhi,
    /// Homotopy initiality of the map from chains to their last partition.
    VerifyZeta,
    /// Labelled partition complex against the elements poset of the nerve.
    VerifyLabelled {
        /// comm, assoc or file:PATH.
        operad: Option<String>,
        #[arg(long = "operad", value_name = "OPERAD")]
        operad_flag: Option<String>,
    },
    /// Homology of the two bar complexes over Z and Q.
    BarCompare {
        /// comm, assoc or file:PATH.
        operad: Option<String>,
        #[arg(long = "operad", value_name = "OPERAD")]
        operad_flag: Option<String>,
    },
    /// Print one tree, partition or chain as JSON, text or DOT.
    Export {
        #[arg(value_enum)]
        kind: Kind,
        /// Tree members "ab cde", partition "(ab)(c)" or chain "(ab)(c)(d) < (a)(b)(c)(d)".
        item: String,
    },
}

/// A finished run: the rendered report and whether every check passed.
struct Outcome {
    body: String,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = configure_threads(cli.common.jobs).and_then(|_| run(&cli));
    match result {
        Ok(outcome) => match emit(&cli.common, &outcome.body) {
            Ok(()) => ExitCode::from(if outcome.pass { 0 } else { 1 }),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads(jobs: Option<usize>) -> Result<()> {
    if let Some(j) = jobs {
        if j == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().context("cannot start the worker pool")?;
    }
    Ok(())
}

fn emit(common: &Common, body: &str) -> Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn leaves(common: &Common) -> Result<LeafSet> {
    match (&common.labels, common.n) {
        (Some(l), _) => Ok(LeafSet::parse(l)?),
        (None, Some(n)) => Ok(LeafSet::standard(n)?),
        (None, None) => bail!("give the leaf set with --n N or --labels a,b,c"),
    }
}

fn bounded(common: &Common, lo: usize, hi: usize) -> Result<LeafSet> {
    let l = leaves(common)?;
    if l.len() < lo || l.len() > hi {
        bail!("this command supports {lo} to {hi} leaves, got {}", l.len());
    }
    Ok(l)
}

fn ring(common: &Common) -> Ring {
    match common.ring {
        RingArg::Z => Ring::Integers,
        RingArg::Q => Ring::Rationals,
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn no_dot(common: &Common) -> Result<()> {
    if common.format == Format::Dot {
        bail!("DOT output is only available for trees and export");
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    match &cli.cmd {
        Cmd::Partitions { all } => partitions(c, *all),
        Cmd::Trees { plus } => trees(c, *plus),
        Cmd::Homology { space } => homology(c, *space),
        Cmd::VerifyTheorem { max_cone_subset, inject_fault, tree, stream, resume } => {
            let opts = VerifyOptions { max_cone_subset: *max_cone_subset, fault_seed: *inject_fault };
            match tree {
                Some(t) => single_tree(c, t, &opts),
                None => theorem(c, &opts, stream.as_deref(), *resume),
            }
        }
        Cmd::VerifyPhi => initial(c, true),
        Cmd::VerifyZeta => initial(c, false),
        Cmd::VerifyLabelled { operad, operad_flag } => labelled(c, &operad_name(operad, operad_flag)?),
        Cmd::BarCompare { operad, operad_flag } => bars(c, &operad_name(operad, operad_flag)?),
        Cmd::Export { kind, item } => export(c, *kind, item),
    }
}

fn operad_name(positional: &Option<String>, flag: &Option<String>) -> Result<String> {
    match (positional, flag) {
        (Some(a), Some(b)) if a != b => bail!("operad given twice: '{a}' and '{b}'"),
        (Some(a), _) | (None, Some(a)) => Ok(a.clone()),
        (None, None) => bail!("name an operad: comm, assoc or file:PATH"),
    }
}

fn partitions(c: &Common, all: bool) -> Result<Outcome> {
    no_dot(c)?;
    let l = bounded(c, 1, MAX_PARTITIONS_N)?;
    let ps = all_partitions(&l, !all);
    let body = match c.format {
        Format::Text => ps.iter().map(|p| p.display(&l) + "\n").collect(),
        _ => to_json(&json!({
            "leaves": l.labels(),
            "count": ps.len(),
            "partitions": ps.iter().map(|p| p.to_json(&l)).collect::<Vec<_>>(),
        }))?,
    };
    Ok(Outcome { body, pass: true })
}

fn trees(c: &Common, plus: bool) -> Result<Outcome> {
    let l = bounded(c, 1, MAX_TREES_N)?;
    let tp = enumerate_trees(&l, !plus)?;
    let body = match c.format {
        Format::Text => tp.trees.iter().map(|t| t.display() + "\n").collect(),
        Format::Dot => tp.trees.iter().enumerate().map(|(i, t)| t.to_dot(&format!("tree{i}"))).collect(),
        Format::Json => to_json(&json!({
            "leaves": l.labels(),
            "include_corolla": !plus,
            "count": tp.len(),
            "trees": tp.trees.iter().map(Tree::to_json).collect::<Vec<_>>(),
        }))?,
    };
    Ok(Outcome { body, pass: true })
}

#[derive(Serialize)]
struct HomologyReport {
    space: &'static str,
    leaves: Vec<String>,
    ring: Ring,
    f_vector: Vec<usize>,
    homology: HomologyResult,
    /// Degree `n - 3` carrying rank `(n - 1)!`, nothing else.
    expected_degree: i64,
    expected_rank: u64,
    pass: bool,
}

fn homology(c: &Common, space: Space) -> Result<Outcome> {
    no_dot(c)?;
    let l = bounded(c, 3, MAX_HOMOLOGY_N)?;
    let n = l.len();
    let (name, complex) = match space {
        Space::Np => ("np", partition_poset(&l)?.poset.order_complex()),
        Space::Tplus => ("tplus", enumerate_trees(&l, false)?.poset.order_complex()),
    };
    let h = complex.homology(ring(c), true);
    let degree = n as i64 - 3;
    let rank: u64 = (1..n as u64).product();
    let pass = h.support() == vec![degree] && h.betti(degree) as u64 == rank && !h.has_torsion();
    let report = HomologyReport { space: name, leaves: l.labels().to_vec(), ring: ring(c), f_vector: complex.f_vector(), homology: h, expected_degree: degree, expected_rank: rank, pass };
    let body = match c.format {
        Format::Text => format!(
            "{name} on {} leaves over {}: f-vector {:?}\n{}\n{}\n",
            n,
            report.ring,
            report.f_vector,
            report.homology,
            verdict(pass)
        ),
        _ => to_json(&report)?,
    };
    Ok(Outcome { body, pass })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn single_tree(c: &Common, members: &str, opts: &VerifyOptions) -> Result<Outcome> {
    no_dot(c)?;
    let l = bounded(c, 3, MAX_THEOREM_N)?;
    let m: Vec<&str> = members.split_whitespace().collect();
    let t = Tree::parse(&l, &m)?;
    let r = verify_single_tree(&t, opts)?;
    let body = match c.format {
        Format::Text => tree_line(&r),
        _ => to_json(&r)?,
    };
    Ok(Outcome { pass: r.pass, body })
}

fn tree_line(r: &TreeReport) -> String {
    let shown = Tree::from_json(&r.tree).map(|t| t.display()).unwrap_or_else(|_| r.tree.to_string());
    let mut s = format!("{} {shown} f={:?} cones={} layerings={}\n", verdict(r.pass), r.f_vector, r.cone_ok.len(), r.elementary_layerings);
    for f in &r.failures {
        s.push_str(&format!("  {f}\n"));
    }
    s
}

/// Reads finished trees from a stream file, keyed by tree serialization.
fn read_stream(path: &Path) -> Result<HashMap<String, TreeReport>> {
    let mut done = HashMap::new();
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e).with_context(|| format!("cannot read {}", path.display())),
    };
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line).with_context(|| format!("{}:{}: not JSON", path.display(), i + 1))?;
        let key = v.get("key").and_then(Value::as_str).ok_or_else(|| anyhow!("{}:{}: missing 'key'", path.display(), i + 1))?;
        let report: TreeReport = serde_json::from_value(v.get("report").cloned().unwrap_or(Value::Null))
            .with_context(|| format!("{}:{}: malformed report", path.display(), i + 1))?;
        done.insert(key.to_string(), report);
    }
    Ok(done)
}

fn theorem(c: &Common, opts: &VerifyOptions, stream: Option<&Path>, resume: bool) -> Result<Outcome> {
    no_dot(c)?;
    let l = bounded(c, 2, MAX_THEOREM_N)?;
    let campaign = Campaign::new(&l)?;
    let trees: Vec<&Tree> = campaign.trees().collect();
    let keys: Vec<String> = trees.iter().map(|t| t.serialize()).collect();
    let fault_at = opts.fault_seed.and_then(|s| campaign.fault_target(s));
    let mut done = match stream {
        Some(p) if resume => read_stream(p)?,
        _ => HashMap::new(),
    };
    let mut sink = match stream {
        Some(p) => Some(
            OpenOptions::new().create(true).write(true).append(resume).truncate(!resume).open(p).with_context(|| format!("cannot open {}", p.display()))?,
        ),
        None => None,
    };
    let todo: Vec<usize> = (0..trees.len()).filter(|&k| !done.contains_key(&keys[k])).collect();
    let chunk = rayon::current_num_threads().max(1) * 4;
    for batch in todo.chunks(chunk) {
        let reports = batch
            .par_iter()
            .map(|&k| campaign.verify_tree(trees[k], opts, if Some(k) == fault_at { opts.fault_seed } else { None }))
            .collect::<Result<Vec<_>, _>>()?;
        for (&k, r) in batch.iter().zip(reports) {
            if let Some(f) = sink.as_mut() {
                writeln!(f, "{}", serde_json::to_string(&json!({ "key": keys[k], "report": r }))?)?;
            }
            done.insert(keys[k].clone(), r);
        }
        if let Some(f) = sink.as_mut() {
            f.flush()?;
        }
    }
    let reports: Vec<TreeReport> = keys.iter().map(|k| done.remove(k).expect("every tree is verified")).collect();
    let failures = reports.iter().filter(|r| !r.pass).count();
    let report = TheoremReport {
        leaves: l.labels().to_vec(),
        model: SD_MODEL.to_string(),
        pass: failures == 0,
        vacuous: reports.is_empty(),
        tree_count: reports.len(),
        failures,
        trees: reports,
    };
    let body = match c.format {
        Format::Text => {
            let mut s: String = report.trees.iter().map(tree_line).collect();
            s.push_str(&format!("{} trees: {}, failures: {}, model: {}\n", verdict(report.pass), report.tree_count, report.failures, report.model));
            s
        }
        _ => to_json(&report)?,
    };
    Ok(Outcome { pass: report.pass, body })
}

fn initiality_text(name: &str, r: &InitialityReport) -> String {
    let mut s = String::new();
    for sl in r.slices.iter().filter(|s| !s.pass) {
        s.push_str(&format!("FAIL slice over {} ({} elements): {}\n", sl.target, sl.size, sl.homology));
    }
    if let Some(cq) = &r.consequence {
        s.push_str(&format!("source {}\ntarget {}\n", cq.source, cq.target));
    }
    s.push_str(&format!("{} {name}: {} slices, {} failures, model: {}\n", verdict(r.pass), r.slices.len(), r.failures, r.model));
    s
}

fn initial(c: &Common, phi: bool) -> Result<Outcome> {
    no_dot(c)?;
    let l = bounded(c, 2, MAX_INITIAL_N)?;
    let campaign = Campaign::new(&l)?;
    let r = check_homotopy_initial(if phi { &campaign.phi } else { &campaign.zeta });
    let body = match c.format {
        Format::Text => initiality_text(if phi { "phi" } else { "zeta" }, &r),
        _ => to_json(&r)?,
    };
    Ok(Outcome { pass: r.pass, body })
}

fn operad_for(name: &str, n: usize) -> Result<FiniteOperad> {
    let op = FiniteOperad::by_name(name, n)?;
    op.check_arity(n)?;
    Ok(op)
}

fn labelled(c: &Common, name: &str) -> Result<Outcome> {
    no_dot(c)?;
    let l = bounded(c, 2, MAX_LABELLED_N)?;
    let op = operad_for(name, l.len())?;
    let r = verify_labelled_comparison(&op, &l)?;
    let body = match c.format {
        Format::Text => format!(
            "{} on {} leaves: f-vector {:?}, {} elements\ncomplex {}\nelements {}\n{}",
            r.operad,
            r.leaves.len(),
            r.f_vector,
            r.elements,
            r.homology,
            r.target_homology,
            initiality_text("labelled comparison", &r.initiality)
        ),
        _ => to_json(&r)?,
    };
    Ok(Outcome { pass: r.pass, body })
}

fn bars(c: &Common, name: &str) -> Result<Outcome> {
    no_dot(c)?;
    let l = bounded(c, 2, MAX_BAR_N)?;
    let op = operad_for(name, l.len())?;
    let r = compare_bars(&op, &l)?;
    let body = match c.format {
        Format::Text => {
            let mut s = format!("{} on {} leaves, bar ranks {:?}, tree ranks {:?} from degree {}\n", r.operad, r.leaves.len(), r.bar_ranks, r.tree_ranks, r.tree_min_degree);
            for side in &r.sides {
                s.push_str(&format!("over {}: bar {} | tree {} | {}\n", side.ring, side.bar, side.tree, if side.equal { "equal" } else { "DIFFERENT" }));
            }
            s.push_str(verdict(r.pass));
            s.push('\n');
            s
        }
        _ => to_json(&r)?,
    };
    Ok(Outcome { pass: r.pass, body })
}

fn export(c: &Common, kind: Kind, item: &str) -> Result<Outcome> {
    let l = leaves(c)?;
    let body = match kind {
        Kind::Tree => {
            let m: Vec<&str> = item.split_whitespace().collect();
            let t = Tree::parse(&l, &m)?;
            match c.format {
                Format::Json => to_json(&t.to_json())?,
                Format::Text => t.display() + "\n",
                Format::Dot => t.to_dot("tree"),
            }
        }
        Kind::Partition => {
            let p = Partition::parse(&l, item)?;
            match c.format {
                Format::Json => to_json(&p.to_json(&l))?,
                Format::Text => p.display(&l) + "\n",
                Format::Dot => bail!("DOT output is not available for partitions"),
            }
        }
        Kind::Chain => {
            let parts: Vec<&str> = item.split('<').map(str::trim).collect();
            let ch = Chain::parse(&l, &parts)?;
            match c.format {
                Format::Json => to_json(&ch.to_json(&l))?,
                Format::Text => ch.display(&l) + "\n",
                Format::Dot => ch.to_dot(&l, "chain"),
            }
        }
    };
    Ok(Outcome { body, pass: true })
}
