//! Command dispatch for the `rankmat` binary.
//!
//! Every command produces [`Report`]s; `--json` prints one per line. Exit
//! status is 2 on parse or validation errors, 1 when a report fails, else 0.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::formats::{
    parse_matrix, parse_oracle, parse_semigroup, parse_structure, parse_tree, write_matrix, write_structure, write_tree,
    SemigroupResolver,
};
use crate::kronecker::{finite_order, kronecker_power, kronecker_product, two_by_two_claim};
use crate::rank::{graph_cut_rank, matrix_ranks, type_matrix, Graph, RankMeasure};
use crate::recovery::{recover_partition, recover_preorder_with, HiddenGuess, OracleKind, Search};
use crate::semigroup::{green, identity_suite, omega, syntactic_class_count, FiniteSemigroup, SyntacticCount};
use crate::structures::{subset_of, Subset};
use crate::suites::{run_suite, suite_names, Report, Status};
use crate::trees::{
    blocks, branching, chosen_leaf, group_orientation, interesting_analysis, min_boolean_combination, rankwidth,
    subforests, ternary_cut_rank, ternary_decode, ternary_encode, verify_orientation, LinearPreorder,
    OrientationOutcome, PartiallyOrderedTree, TreeSearch,
};

#[derive(Parser, Debug)]
#[command(name = "rankmat", version, about = "Cut-rank, laminar trees, semigroups and Kronecker products")]
struct Cli {
    /// One JSON object per line.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SubsetArg {
    /// Comma-separated element ids, e.g. `0,1`; empty for the empty set.
    #[arg(long, default_value = "")]
    subset: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type-matrix ranks of a structure at a subset.
    Rank {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        subset: SubsetArg,
        /// Tuple length.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// GF(2) cut-rank of a graph given as a structure with one symmetric binary relation.
    GraphRank {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        subset: SubsetArg,
    },
    /// Laminar tree operations.
    Tree {
        action: TreeAction,
        /// A `.tree` file, or a `.struct` file for `decode`.
        file: PathBuf,
    },
    /// Z_m leaf colouring with sibling-unique subtree sums.
    Orient {
        #[arg(long)]
        modulus: u32,
        file: PathBuf,
    },
    /// Ternary cut-rank, interesting nodes and subforest cost of a subset.
    TreeRank {
        file: PathBuf,
        #[command(flatten)]
        subset: SubsetArg,
    },
    /// Blocks of a subset against a linear preorder.
    Blocks {
        /// Classes in order, `;`-separated, elements `,`-separated: `0,1;2;3`.
        #[arg(long)]
        classes: String,
        #[command(flatten)]
        subset: SubsetArg,
    },
    /// Exhaustive rank-width over all trees on the universe.
    Rankwidth {
        #[arg(long)]
        structure: PathBuf,
        /// Only trees whose internal nodes have two children.
        #[arg(long)]
        binary: bool,
        /// Distinct rows with this tuple length instead of the default measure.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Finite semigroup queries.
    Sgp {
        action: SgpAction,
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Kronecker products of matrices over a semigroup.
    Kron {
        #[command(subcommand)]
        action: KronAction,
    },
    /// Recover hidden classes from an approximation oracle fixture.
    Recover {
        kind: RecoverKind,
        file: PathBuf,
        /// Approximation degree for preorders; defaults to the oracle's `k`.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Run a verification suite, or `all`.
    Verify { suite: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TreeAction {
    Validate,
    Encode,
    Decode,
    Subforests,
    Branching,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SgpAction {
    Validate,
    Omega,
    Green,
    Identities,
    Syntactic,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RecoverKind {
    Partition,
    Preorder,
}

#[derive(Subcommand, Debug)]
enum KronAction {
    Product { a: PathBuf, b: PathBuf },
    Power {
        a: PathBuf,
        #[arg(long)]
        n: usize,
    },
    Order {
        a: PathBuf,
        #[arg(long, default_value_t = 6)]
        budget: usize,
    },
    /// The matrix `[[1, b], [c, d]]` over a monoid.
    #[command(name = "2x2-claim")]
    Claim {
        semigroup: PathBuf,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 5)]
        order_budget: usize,
        #[arg(long, default_value_t = 6)]
        row_budget: usize,
    },
}

/// Runs one command line (program name first) and returns the exit code.
pub fn run(args: impl IntoIterator<Item = String>, out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(reports) => {
            let failed = reports.iter().any(|r| r.status == Status::Fail);
            let shown = if cli.json { emit_json(&reports, out) } else { emit_text(&reports, out) };
            if shown.is_err() {
                return 2;
            }
            i32::from(failed)
        }
        Err(e) => {
            eprintln!("rankmat: {e}");
            2
        }
    }
}

fn emit_json(reports: &[Report], out: &mut dyn Write) -> std::io::Result<()> {
    for r in reports {
        writeln!(out, "{}", serde_json::to_string(r).expect("reports serialize"))?;
    }
    Ok(())
}

fn emit_text(reports: &[Report], out: &mut dyn Write) -> std::io::Result<()> {
    for r in reports {
        let status = match r.status {
            Status::Pass => "ok",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        };
        writeln!(out, "{} {} [{status}]", r.check, r.instance)?;
        match &r.data {
            Value::Object(map) => {
                for (k, v) in map {
                    match v {
                        Value::String(s) if s.contains('\n') => {
                            writeln!(out, "  {k}:")?;
                            for line in s.lines() {
                                writeln!(out, "    {line}")?;
                            }
                        }
                        Value::String(s) => writeln!(out, "  {k}: {s}")?,
                        other => writeln!(out, "  {k}: {other}")?,
                    }
                }
            }
            other => writeln!(out, "  {other}")?,
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn instance(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned())
}

fn report(check: &str, instance: String, ok: bool, data: Value) -> Report {
    Report {
        check: check.to_string(),
        instance,
        status: if ok { Status::Pass } else { Status::Fail },
        data,
    }
}

pub(crate) fn parse_subset(text: &str, n: usize) -> Result<Subset> {
    let mut items = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let e: usize = part.parse().map_err(|_| Error::Invalid(format!("bad element id `{part}`")))?;
        if e >= n {
            return Err(Error::OutOfRange { element: e, size: n });
        }
        items.push(e);
    }
    Ok(subset_of(&items))
}

fn members(x: Subset) -> Vec<usize> {
    (0..64).filter(|&i| x >> i & 1 == 1).collect()
}

/// Resolves `sgp=` references relative to the referring file.
fn resolver(base: &Path) -> impl Fn(&str) -> Result<FiniteSemigroup> {
    let dir = base.parent().map(Path::to_path_buf).unwrap_or_default();
    move |name: &str| parse_semigroup(&read(&dir.join(name))?)
}

fn load_tree(path: &Path) -> Result<(PartiallyOrderedTree, Vec<String>)> {
    parse_tree(&read(path)?)
}

fn dispatch(cmd: &Command) -> Result<Vec<Report>> {
    match cmd {
        Command::Rank { structure, subset, m } => {
            let s = parse_structure(&read(structure)?)?;
            let x = parse_subset(&subset.subset, s.universe_size())?;
            let r = matrix_ranks(&type_matrix(&s, x, *m)?);
            Ok(vec![report(
                "rank",
                instance(structure),
                true,
                json!({"subset": members(x), "m": m, "distinct_rows": r.distinct_rows, "distinct_cols": r.distinct_cols, "field_rank": r.field_rank, "prime": r.prime}),
            )])
        }
        Command::GraphRank { structure, subset } => {
            let s = parse_structure(&read(structure)?)?;
            let g = Graph::from_structure(&s)?;
            let x = parse_subset(&subset.subset, s.universe_size())?;
            Ok(vec![report(
                "graph-rank",
                instance(structure),
                true,
                json!({"subset": members(x), "cut_rank": graph_cut_rank(&g, x)}),
            )])
        }
        Command::Tree { action, file } => tree_command(*action, file),
        Command::Orient { modulus, file } => {
            let (t, names) = load_tree(file)?;
            let tree = &t.tree;
            let name = |leaf: usize| names.get(leaf).cloned().unwrap_or_else(|| leaf.to_string());
            Ok(vec![match group_orientation(tree, *modulus)? {
                OrientationOutcome::Oriented(o) => {
                    let verified = verify_orientation(tree, &o);
                    let chosen = tree
                        .internal_nodes()
                        .map(|v| {
                            let under: Vec<String> = members(tree.node(v)).into_iter().map(name).collect();
                            Ok(json!({"node": under, "leaf": name(chosen_leaf(tree, &o, v)?)}))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let colours: serde_json::Map<String, Value> =
                        o.colours.iter().enumerate().map(|(l, &c)| (name(l), json!(c))).collect();
                    report(
                        "orient",
                        instance(file),
                        verified,
                        json!({"modulus": modulus, "outcome": "oriented", "verified": verified, "colours": colours, "chosen_leaves": chosen}),
                    )
                }
                OrientationOutcome::Obstruction { node } => report(
                    "orient",
                    instance(file),
                    true,
                    json!({"modulus": modulus, "outcome": "obstruction", "node": node, "leaves": members(tree.node(node)).into_iter().map(name).collect::<Vec<_>>()}),
                ),
            }])
        }
        Command::TreeRank { file, subset } => {
            let (t, _) = load_tree(file)?;
            let tree = &t.tree;
            let x = parse_subset(&subset.subset, tree.leaf_count())?;
            let a = interesting_analysis(tree, x);
            let cost = match min_boolean_combination(tree, x, 4)? {
                crate::trees::BoolCost::Exact(c) => json!(c),
                crate::trees::BoolCost::Exceeded => json!("> 4"),
            };
            Ok(vec![report(
                "tree-rank",
                instance(file),
                true,
                json!({"subset": members(x), "ternary_cut_rank": ternary_cut_rank(tree, x), "interesting_chain": a.chain, "interesting_siblings": a.siblings, "interesting_nodes": a.interesting.len(), "subforest_cost": cost}),
            )])
        }
        Command::Blocks { classes, subset } => {
            let mut parsed = Vec::new();
            let mut n = 0;
            for class in classes.split(';') {
                let ids = class
                    .split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(|p| p.parse::<usize>().map_err(|_| Error::Invalid(format!("bad element id `{p}`"))))
                    .collect::<Result<Vec<_>>>()?;
                n += ids.len();
                if ids.iter().any(|&e| e >= 64) {
                    return invalid("element ids must be below 64");
                }
                parsed.push(subset_of(&ids));
            }
            let p = LinearPreorder::new(n, parsed)?;
            let y = parse_subset(&subset.subset, n)?;
            let bl = blocks(&p, y);
            Ok(vec![report("blocks", classes.clone(), true, json!({"subset": members(y), "count": bl.len(), "blocks": bl}))])
        }
        Command::Rankwidth { structure, binary, m } => {
            let s = parse_structure(&read(structure)?)?;
            let measure = match m {
                Some(m) => RankMeasure::DistinctRows { m: *m },
                None => RankMeasure::default_for(&s),
            };
            let search = if *binary { TreeSearch::Binary } else { TreeSearch::Any };
            let (w, t) = rankwidth(&s, measure, search)?;
            Ok(vec![report(
                "rankwidth",
                instance(structure),
                true,
                json!({"width": w, "measure": measure, "search": search, "tree": write_tree(&PartiallyOrderedTree::unordered(t), None)}),
            )])
        }
        Command::Sgp { action, file, k, cap } => sgp_command(*action, file, *k, *cap),
        Command::Kron { action } => kron_command(action),
        Command::Recover { kind, file, d } => {
            let text = read(file)?;
            let o = parse_oracle(&text, &resolver(file) as &SemigroupResolver)?;
            let hidden = o.hidden_classes().to_vec();
            let name = instance(file);
            match kind {
                RecoverKind::Partition => {
                    if o.kind() != OracleKind::Unordered {
                        return invalid("partition recovery needs an unordered oracle");
                    }
                    let mut got = recover_partition(&o)?;
                    got.sort_unstable();
                    let mut want = hidden;
                    want.sort_unstable();
                    let show: Vec<_> = got.iter().map(|&c| members(c)).collect();
                    Ok(vec![report("recover", name, got == want, json!({"kind": "partition", "classes": show}))])
                }
                RecoverKind::Preorder => {
                    if o.kind() != OracleKind::Ordered {
                        return invalid("preorder recovery needs an ordered oracle");
                    }
                    let d = d.unwrap_or(o.k());
                    let r = recover_preorder_with(&o, d, &HiddenGuess::new(&o), Search::Auto)?;
                    let ok = r.preorder.classes() == hidden.as_slice();
                    let show: Vec<_> = r.preorder.classes().iter().map(|&c| members(c)).collect();
                    Ok(vec![report("recover", name, ok, json!({"kind": "preorder", "d": d, "route": r.route, "classes": show}))])
                }
            }
        }
        Command::Verify { suite } => {
            if suite == "all" {
                let mut out = Vec::new();
                for name in suite_names() {
                    out.extend(run_suite(name)?.reports);
                }
                Ok(out)
            } else {
                Ok(run_suite(suite)?.reports)
            }
        }
    }
}

fn tree_command(action: TreeAction, file: &Path) -> Result<Vec<Report>> {
    let name = instance(file);
    if let TreeAction::Decode = action {
        let t = ternary_decode(&parse_structure(&read(file)?)?)?;
        let text = write_tree(&PartiallyOrderedTree::unordered(t.clone()), None);
        return Ok(vec![report("tree-decode", name, true, json!({"leaves": t.leaf_count(), "tree": text}))]);
    }
    let (t, names) = load_tree(file)?;
    let tree = &t.tree;
    let data = match action {
        TreeAction::Validate => json!({"leaves": tree.leaf_count(), "nodes": tree.node_count(), "tree": write_tree(&t, Some(&names))}),
        TreeAction::Encode => json!({"structure": write_structure(&ternary_encode(tree))}),
        TreeAction::Subforests => {
            let sf = subforests(tree);
            let named: Vec<Vec<&str>> = sf.iter().map(|&x| members(x).into_iter().map(|l| names[l].as_str()).collect()).collect();
            json!({"count": sf.len(), "subforests": named})
        }
        TreeAction::Branching => json!({"branching": branching(tree)}),
        TreeAction::Decode => unreachable!("handled above"),
    };
    let check = match action {
        TreeAction::Validate => "tree-validate",
        TreeAction::Encode => "tree-encode",
        TreeAction::Subforests => "tree-subforests",
        TreeAction::Branching => "tree-branching",
        TreeAction::Decode => unreachable!("handled above"),
    };
    Ok(vec![report(check, name, true, data)])
}

fn sgp_command(action: SgpAction, file: &Path, k: usize, cap: usize) -> Result<Vec<Report>> {
    let s = parse_semigroup(&read(file)?)?;
    let name = instance(file);
    Ok(match action {
        SgpAction::Validate => vec![report(
            "sgp-validate",
            name,
            true,
            json!({"size": s.size(), "commutative": s.is_commutative(), "identity": s.find_identity()}),
        )],
        SgpAction::Omega => vec![report("sgp-omega", name, true, json!({"omega": omega(&s)}))],
        SgpAction::Green => {
            let g = green(&s);
            vec![report(
                "sgp-green",
                name,
                true,
                json!({"r_class": g.r_class, "l_class": g.l_class, "j_class": g.j_class, "h_class": g.h_class}),
            )]
        }
        SgpAction::Identities => identity_suite(&s)
            .identities
            .into_iter()
            .map(|id| {
                report(
                    "sgp-identity",
                    format!("{name}:{}", id.name),
                    id.holds,
                    json!({"identity": id.name, "holds": id.holds, "counterexample": id.counterexample}),
                )
            })
            .collect(),
        SgpAction::Syntactic => {
            let counts = (1..=k)
                .map(|i| {
                    syntactic_class_count(&s, i, cap).map(|c| match c {
                        SyntacticCount::Exact(v) => json!(v),
                        SyntacticCount::Overflow => json!(format!("> {cap}")),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            vec![report("sgp-syntactic", name, true, json!({"k": k, "counts": counts}))]
        }
    })
}

fn kron_command(action: &KronAction) -> Result<Vec<Report>> {
    let load = |p: &PathBuf| parse_matrix(&read(p)?, &resolver(p) as &SemigroupResolver);
    let shape = |m: &crate::kronecker::SemigroupMatrix| {
        json!({"rows": m.row_count(), "cols": m.col_count(), "distinct_rows": m.distinct_rows(), "distinct_cols": m.distinct_cols()})
    };
    Ok(match action {
        KronAction::Product { a, b } => {
            let (ma, mb) = (load(a)?, load(b)?);
            let p = kronecker_product(&ma, &mb)?;
            let ok = p.distinct_rows() <= ma.distinct_rows() * mb.distinct_rows();
            vec![report(
                "kron-product",
                format!("{}*{}", instance(a), instance(b)),
                ok,
                json!({"a": shape(&ma), "b": shape(&mb), "product": shape(&p), "matrix": write_matrix(&p, None)}),
            )]
        }
        KronAction::Power { a, n } => {
            let m = load(a)?;
            let p = kronecker_power(&m, *n)?;
            vec![report("kron-power", instance(a), true, json!({"n": n, "power": shape(&p)}))]
        }
        KronAction::Order { a, budget } => {
            let m = load(a)?;
            let order = finite_order(&m, *budget)?;
            vec![report("kron-order", instance(a), true, json!({"budget": budget, "order": order}))]
        }
        KronAction::Claim { semigroup, b, c, d, order_budget, row_budget } => {
            let s = Arc::new(parse_semigroup(&read(semigroup)?)?);
            for (label, v) in [("b", b), ("c", c), ("d", d)] {
                if *v >= s.size() {
                    return invalid(format!("{label} = {v} is not an element of a semigroup of size {}", s.size()));
                }
            }
            let r = two_by_two_claim(&s, *b, *c, *d, *order_budget, *row_budget)?;
            vec![report("kron-2x2-claim", instance(semigroup), r.consistent, json!(r))]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let argv = std::iter::once("rankmat").chain(args.iter().copied()).map(String::from);
        let code = run(argv, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    fn temp(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("rankmat-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn subsets_parse_and_check_range() {
        assert_eq!(parse_subset("0, 2", 3).unwrap(), 0b101);
        assert_eq!(parse_subset("", 3).unwrap(), 0);
        assert!(matches!(parse_subset("3", 3), Err(Error::OutOfRange { .. })));
        assert!(parse_subset("x", 3).is_err());
    }

    #[test]
    fn rank_on_a_path() {
        let p = temp("p4.struct", &write_structure(&Graph::path(4).to_structure()));
        let (code, out) = run_args(&["--json", "rank", "--structure", p.to_str().unwrap(), "--subset", "0,1", "--m", "2"]);
        assert_eq!(code, 0);
        let r: Report = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert_eq!(r.check, "rank");
        let s = Graph::path(4).to_structure();
        let want = matrix_ranks(&type_matrix(&s, 0b11, 2).unwrap());
        assert_eq!(r.data["distinct_rows"], want.distinct_rows);
        assert_eq!(r.data["field_rank"], want.field_rank);
    }

    #[test]
    fn bad_semigroup_exits_two() {
        let p = temp("bad.sgp", "semigroup 2\n0 0\n1 0\n");
        assert_eq!(run_args(&["sgp", "identities", p.to_str().unwrap()]).0, 2);
        assert_eq!(run_args(&["no-such-command"]).0, 2);
        assert_eq!(run_args(&["verify", "no-such-suite"]).0, 2);
    }

    #[test]
    fn failing_identities_exit_one() {
        let p = temp("lz.sgp", &crate::formats::write_semigroup(&FiniteSemigroup::left_zero(2)));
        let (code, out) = run_args(&["--json", "sgp", "identities", p.to_str().unwrap()]);
        assert_eq!(code, 0, "{out}");
        let p = temp("brandt.sgp", &crate::formats::write_semigroup(&FiniteSemigroup::brandt(2)));
        let (code, _) = run_args(&["sgp", "identities", p.to_str().unwrap()]);
        assert_eq!(code, 1);
    }

    #[test]
    fn verify_prints_one_object_per_line() {
        let (code, out) = run_args(&["--json", "verify", "path-bound"]);
        assert_eq!(code, 0);
        let reports: Vec<Report> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(reports.last().unwrap().instance, "summary");
    }

    #[test]
    fn tree_commands() {
        let p = temp("t.tree", "(u (u a b) c d)\n");
        let (code, out) = run_args(&["--json", "tree", "subforests", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        let r: Report = serde_json::from_str(out.trim()).unwrap();
        assert!(r.data["count"].as_u64().unwrap() >= 5);
        let (code, out) = run_args(&["--json", "orient", "--modulus", "4", p.to_str().unwrap()]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("oriented"));
        let (code, out) = run_args(&["tree-rank", p.to_str().unwrap(), "--subset", "0,2"]);
        assert_eq!(code, 0);
        assert!(out.contains("ternary_cut_rank"));
    }

    #[test]
    fn kron_claim_and_product() {
        let sg = FiniteSemigroup::with_identity(&FiniteSemigroup::null(1));
        let p = temp("m.sgp", &crate::formats::write_semigroup(&sg));
        let (code, out) = run_args(&["--json", "kron", "2x2-claim", p.to_str().unwrap(), "--b", "0", "--c", "0", "--d", "0"]);
        assert!(code <= 1, "{out}");
        let m = temp("a.mat", "matrix 2 2 sgp=m.sgp\n0 1\n1 1\n");
        let (code, out) = run_args(&["--json", "kron", "product", m.to_str().unwrap(), m.to_str().unwrap()]);
        assert_eq!(code, 0, "{out}");
    }
}
