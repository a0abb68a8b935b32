//! Line-oriented text formats. `#` starts a comment; blank lines are ignored.
//!
//! | file      | layout |
//! |-----------|--------|
//! | `.struct` | `structure`, `universe N`, then `rel NAME ARITY` followed by its tuples, `end` |
//! | `.tree`   | s-expression: `(u …)` unordered node, `(o …)` ordered node, bare identifiers are leaves |
//! | `.sgp`    | `semigroup N`, N rows of N ids, optional `unit K` |
//! | `.mat`    | `matrix R C [sgp=<file>]`, R rows of C ids |
//! | `.hyp`    | `hypergraph V A`, then `2^V` colour ids in ascending bitmask order |
//! | `.orc`    | see [`parse_oracle`] |

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kronecker::{Hypergraph, SemigroupMatrix};
use crate::recovery::{ApproximationOracle, OracleKind};
use crate::semigroup::FiniteSemigroup;
use crate::structures::{elements, Structure, Subset, Vocabulary};
use crate::trees::{Nested, PartiallyOrderedTree};

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let body = l.split('#').next().unwrap_or("");
                let toks: Vec<&str> = body.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect::<Vec<_>>();
        let last = items.last().map_or(1, |x| x.0);
        Lines { items, pos: 0, last }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.items.get(self.pos) {
            Some(item) => {
                self.pos += 1;
                Ok(item.clone())
            }
            None => perr(self.last, format!("unexpected end of input, expected {what}")),
        }
    }

    fn keyword(&mut self, word: &str, args: usize) -> Result<(usize, Vec<&'a str>)> {
        let (line, toks) = self.next(word)?;
        if toks[0] != word || toks.len() != args + 1 {
            return perr(line, format!("expected `{word}` with {args} argument(s)"));
        }
        Ok((line, toks))
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Some((line, _)) => perr(*line, "trailing content"),
            None => Ok(()),
        }
    }
}

fn num(line: usize, tok: &str) -> Result<usize> {
    tok.parse().or_else(|_| perr(line, format!("expected a number, got `{tok}`")))
}

fn nums(line: usize, toks: &[&str]) -> Result<Vec<usize>> {
    toks.iter().map(|t| num(line, t)).collect()
}

fn with_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Invalid(msg) => Error::Parse { line, msg },
        other => other,
    })
}

pub fn parse_structure(text: &str) -> Result<Structure> {
    let mut lines = Lines::new(text);
    lines.keyword("structure", 0)?;
    let (line, toks) = lines.keyword("universe", 1)?;
    let n = num(line, toks[1])?;
    let mut rels: Vec<(String, usize)> = Vec::new();
    let mut tuples: Vec<Vec<Vec<usize>>> = Vec::new();
    loop {
        let (line, toks) = lines.next("`rel`, a tuple or `end`")?;
        match toks[0] {
            "end" if toks.len() == 1 => break,
            "rel" => {
                if toks.len() != 3 {
                    return perr(line, "expected `rel NAME ARITY`");
                }
                rels.push((toks[1].to_string(), num(line, toks[2])?));
                tuples.push(Vec::new());
            }
            _ => {
                let Some(&(_, arity)) = rels.last() else {
                    return perr(line, "tuple before any `rel` line");
                };
                let t = if toks == ["()"] { Vec::new() } else { nums(line, &toks)? };
                if t.len() != arity {
                    return perr(line, format!("tuple has {} entries, relation arity is {arity}", t.len()));
                }
                if let Some(&bad) = t.iter().find(|&&e| e >= n) {
                    return perr(line, format!("element {bad} outside universe of size {n}"));
                }
                tuples.last_mut().expect("relation present").push(t);
            }
        }
    }
    lines.finish()?;
    let vocab = with_line(1, Vocabulary::new(rels))?;
    with_line(1, Structure::new(vocab, n, tuples))
}

pub fn write_structure(s: &Structure) -> String {
    let mut out = format!("structure\nuniverse {}\n", s.universe_size());
    for (i, r) in s.vocabulary().relations().iter().enumerate() {
        let _ = writeln!(out, "rel {} {}", r.name, r.arity);
        for t in s.tuples(i) {
            if t.is_empty() {
                out.push_str("()\n");
            } else {
                let row: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out.push_str("end\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open(usize, NodeTag),
    Close(usize),
    Atom(usize, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeTag {
    U,
    O,
}

fn tree_tokens(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let spaced = body.replace('(', " ( ").replace(')', " ) ");
        let mut it = spaced.split_whitespace().peekable();
        while let Some(t) = it.next() {
            match t {
                "(" => {
                    let tag = match it.next() {
                        Some("u") => NodeTag::U,
                        Some("o") => NodeTag::O,
                        other => return perr(line, format!("expected `u` or `o` after `(`, got {other:?}")),
                    };
                    out.push(Tok::Open(line, tag));
                }
                ")" => out.push(Tok::Close(line)),
                atom => out.push(Tok::Atom(line, atom.to_string())),
            }
        }
    }
    Ok(out)
}

enum Raw {
    Leaf(String),
    Node(NodeTag, Vec<Raw>),
}

fn tree_raw(toks: &[Tok], pos: &mut usize) -> Result<Raw> {
    match toks.get(*pos) {
        None => perr(toks.last().map_or(1, tok_line), "unexpected end of tree"),
        Some(Tok::Atom(_, a)) => {
            *pos += 1;
            Ok(Raw::Leaf(a.clone()))
        }
        Some(Tok::Close(line)) => perr(*line, "unexpected `)`"),
        Some(Tok::Open(line, tag)) => {
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(Tok::Close(_)) => {
                        *pos += 1;
                        break;
                    }
                    None => return perr(*line, "unclosed `(`"),
                    _ => children.push(tree_raw(toks, pos)?),
                }
            }
            if children.len() < 2 {
                return perr(*line, "every node needs at least two children");
            }
            Ok(Raw::Node(*tag, children))
        }
    }
}

fn tok_line(t: &Tok) -> usize {
    match t {
        Tok::Open(l, _) | Tok::Close(l) | Tok::Atom(l, _) => *l,
    }
}

/// Parses a tree and returns its leaf names, indexed by leaf id. Leaves
/// named `0..n` keep those ids; otherwise ids follow first appearance.
pub fn parse_tree(text: &str) -> Result<(PartiallyOrderedTree, Vec<String>)> {
    let toks = tree_tokens(text)?;
    let mut pos = 0;
    let raw = tree_raw(&toks, &mut pos)?;
    if let Some(t) = toks.get(pos) {
        return perr(tok_line(t), "trailing content after the tree");
    }
    let mut names: Vec<String> = Vec::new();
    fn collect(r: &Raw, names: &mut Vec<String>) {
        match r {
            Raw::Leaf(a) => names.push(a.clone()),
            Raw::Node(_, ch) => ch.iter().for_each(|c| collect(c, names)),
        }
    }
    collect(&raw, &mut names);
    let n = names.len();
    let mut numeric: Option<Vec<usize>> = names.iter().map(|a| a.parse().ok()).collect();
    if let Some(v) = numeric.as_mut() {
        v.sort_unstable();
    }
    let ids: HashMap<String, usize> = if numeric == Some((0..n).collect()) {
        names.iter().map(|a| (a.clone(), a.parse().expect("numeric"))).collect()
    } else {
        let mut m = HashMap::new();
        for a in &names {
            let next = m.len();
            m.entry(a.clone()).or_insert(next);
        }
        m
    };
    if ids.len() != n {
        return perr(1, "leaf names must be distinct");
    }
    fn build(r: &Raw, ids: &HashMap<String, usize>) -> Nested {
        match r {
            Raw::Leaf(a) => Nested::Leaf(ids[a]),
            Raw::Node(tag, ch) => {
                let ch = ch.iter().map(|c| build(c, ids)).collect();
                match tag {
                    NodeTag::U => Nested::unordered(ch),
                    NodeTag::O => Nested::ordered(ch),
                }
            }
        }
    }
    let tree = with_line(1, PartiallyOrderedTree::from_nested(&build(&raw, &ids)))?;
    let mut by_id = vec![String::new(); n];
    for (a, &i) in &ids {
        by_id[i] = a.clone();
    }
    Ok((tree, by_id))
}

pub fn write_tree(t: &PartiallyOrderedTree, names: Option<&[String]>) -> String {
    format!("{}\n", t.to_sexpr(names))
}

fn semigroup_block(lines: &mut Lines, n: usize) -> Result<Vec<Vec<usize>>> {
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, toks) = lines.next("a table row")?;
        let row = nums(line, &toks)?;
        if row.len() != n {
            return perr(line, format!("row has {} entries, expected {n}", row.len()));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_semigroup(text: &str) -> Result<FiniteSemigroup> {
    let mut lines = Lines::new(text);
    let (line, toks) = lines.keyword("semigroup", 1)?;
    let n = num(line, toks[1])?;
    let rows = semigroup_block(&mut lines, n)?;
    let mut unit = None;
    if let Some((l, t)) = lines.peek().cloned() {
        if t[0] == "unit" && t.len() == 2 {
            unit = Some(num(l, t[1])?);
            lines.pos += 1;
        }
    }
    lines.finish()?;
    with_line(line, FiniteSemigroup::new(rows, unit))
}

fn table_text(s: &FiniteSemigroup) -> String {
    let mut out = String::new();
    for row in s.rows() {
        let r: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", r.join(" "));
    }
    out
}

pub fn write_semigroup(s: &FiniteSemigroup) -> String {
    let mut out = format!("semigroup {}\n{}", s.size(), table_text(s));
    if let Some(u) = s.unit() {
        let _ = writeln!(out, "unit {u}");
    }
    out
}

/// Resolves `sgp=<file>` references.
pub type SemigroupResolver<'a> = dyn Fn(&str) -> Result<FiniteSemigroup> + 'a;

pub fn parse_matrix(text: &str, resolve: &SemigroupResolver) -> Result<SemigroupMatrix> {
    let mut lines = Lines::new(text);
    let (line, toks) = lines.next("`matrix R C`")?;
    if toks[0] != "matrix" || !(3..=4).contains(&toks.len()) {
        return perr(line, "expected `matrix R C [sgp=<file>]`");
    }
    let (r, c) = (num(line, toks[1])?, num(line, toks[2])?);
    let semigroup = match toks.get(3) {
        None => None,
        Some(t) => match t.strip_prefix("sgp=") {
            Some(path) => Some(Arc::new(resolve(path)?)),
            None => return perr(line, format!("unknown matrix option `{t}`")),
        },
    };
    let mut rows = Vec::with_capacity(r);
    for _ in 0..r {
        let (l, toks) = lines.next("a matrix row")?;
        let row = nums(l, &toks)?;
        if row.len() != c {
            return perr(l, format!("row has {} entries, expected {c}", row.len()));
        }
        rows.push(row);
    }
    lines.finish()?;
    match semigroup {
        Some(s) => with_line(line, SemigroupMatrix::over(s, rows)),
        None => with_line(line, SemigroupMatrix::new(rows)),
    }
}

pub fn write_matrix(m: &SemigroupMatrix, sgp_path: Option<&str>) -> String {
    let mut out = format!("matrix {} {}", m.row_count(), m.col_count());
    if let Some(p) = sgp_path {
        let _ = write!(out, " sgp={p}");
    }
    out.push('\n');
    for row in m.to_rows() {
        let r: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", r.join(" "));
    }
    out
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut lines = Lines::new(text);
    let (line, toks) = lines.keyword("hypergraph", 2)?;
    let (v, a) = (num(line, toks[1])?, num(line, toks[2])?);
    if v > 24 {
        return perr(line, "too many vertices");
    }
    let mut edges = Vec::with_capacity(1 << v);
    while let Some((l, t)) = lines.peek().cloned() {
        edges.extend(nums(l, &t)?);
        lines.pos += 1;
    }
    with_line(line, Hypergraph::new(v, a, edges))
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("hypergraph {} {}\n", h.vertex_count(), h.colour_count());
    let colours: Vec<String> = (0..1u32 << h.vertex_count()).map(|s| h.edge(s).to_string()).collect();
    for chunk in colours.chunks(16) {
        let _ = writeln!(out, "{}", chunk.join(" "));
    }
    out
}

/// Oracle fixture:
///
/// ```text
/// oracle unordered|ordered
/// universe N
/// k K
/// period P
/// class 0 1 2        # one line per class, in order
/// semigroup M        # followed by M rows, or `sgp <file>`
/// lambda E F C0 ...  # one line per class: empty, full, cut values
/// accept 0 1 ...     # accepted elements
/// background B       # optional, unordered only
/// end
/// ```
pub fn parse_oracle(text: &str, resolve: &SemigroupResolver) -> Result<ApproximationOracle> {
    let mut lines = Lines::new(text);
    let (line, toks) = lines.keyword("oracle", 1)?;
    let kind = match toks[1] {
        "unordered" => OracleKind::Unordered,
        "ordered" => OracleKind::Ordered,
        other => return perr(line, format!("unknown oracle kind `{other}`")),
    };
    let (l, t) = lines.keyword("universe", 1)?;
    let n = num(l, t[1])?;
    let (l, t) = lines.keyword("k", 1)?;
    let k = num(l, t[1])?;
    let (l, t) = lines.keyword("period", 1)?;
    let period = num(l, t[1])?;
    let mut classes: Vec<Subset> = Vec::new();
    let mut semigroup = None;
    let mut lambda = Vec::new();
    let mut accept_list: Option<Vec<usize>> = None;
    let mut background = None;
    loop {
        let (l, t) = lines.next("an oracle section or `end`")?;
        match t[0] {
            "end" if t.len() == 1 => break,
            "class" => {
                let mut c = 0u64;
                for e in nums(l, &t[1..])? {
                    if e >= n || e >= 64 {
                        return perr(l, format!("element {e} outside universe of size {n}"));
                    }
                    c |= 1 << e;
                }
                classes.push(c);
            }
            "semigroup" if t.len() == 2 => {
                let m = num(l, t[1])?;
                semigroup = Some(with_line(l, FiniteSemigroup::new(semigroup_block(&mut lines, m)?, None))?);
            }
            "sgp" if t.len() == 2 => semigroup = Some(resolve(t[1])?),
            "lambda" => lambda.push(nums(l, &t[1..])?),
            "accept" => accept_list = Some(nums(l, &t[1..])?),
            "background" if t.len() == 2 => background = Some(num(l, t[1])?),
            other => return perr(l, format!("unexpected `{other}`")),
        }
    }
    lines.finish()?;
    let Some(s) = semigroup else {
        return perr(line, "missing semigroup");
    };
    let Some(acc) = accept_list else {
        return perr(line, "missing accept set");
    };
    let mut accept = vec![false; s.size()];
    for a in acc {
        if a >= s.size() {
            return perr(line, format!("accepted element {a} outside semigroup of size {}", s.size()));
        }
        accept[a] = true;
    }
    with_line(
        line,
        ApproximationOracle::new(kind, n, classes, s, period, lambda, accept, k, background),
    )
}

pub fn write_oracle(o: &ApproximationOracle) -> String {
    let kind = match o.kind() {
        OracleKind::Unordered => "unordered",
        OracleKind::Ordered => "ordered",
    };
    let mut out = format!(
        "oracle {kind}\nuniverse {}\nk {}\nperiod {}\n",
        o.universe_size(),
        o.k(),
        o.period()
    );
    for &c in o.hidden_classes() {
        let e: Vec<String> = elements(c).map(|e| e.to_string()).collect();
        let _ = writeln!(out, "class {}", e.join(" "));
    }
    let _ = write!(out, "semigroup {}\n{}", o.semigroup().size(), table_text(o.semigroup()));
    for row in o.lambda() {
        let r: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "lambda {}", r.join(" "));
    }
    let acc: Vec<String> = (0..o.accept().len()).filter(|&a| o.accept()[a]).map(|a| a.to_string()).collect();
    let _ = writeln!(out, "accept {}", acc.join(" "));
    if let Some(b) = o.background() {
        let _ = writeln!(out, "background {b}");
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::Graph;
    use crate::recovery::{synth_oracle, SynthOptions};
    use crate::trees::LaminarTree;

    fn no_files(p: &str) -> Result<FiniteSemigroup> {
        Err(Error::Invalid(format!("no file {p}")))
    }

    #[test]
    fn structures_round_trip() {
        let text = "# path\nstructure\nuniverse 4\nrel E 2\n0 1\n1 0\n1 2 # inline\n2 1\n2 3\n3 2\nend\n";
        let s = parse_structure(text).unwrap();
        assert_eq!(s, Graph::path(4).to_structure());
        assert_eq!(parse_structure(&write_structure(&s)).unwrap(), s);
    }

    #[test]
    fn structure_errors_carry_lines() {
        let bad = "structure\nuniverse 2\nrel E 2\n0 5\nend\n";
        assert!(matches!(parse_structure(bad), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(parse_structure("structure\nuniverse 2\n0 1\nend"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_structure("structure\nuniverse 2\nrel E 2\n").is_err());
    }

    #[test]
    fn trees_round_trip() {
        let (t, names) = parse_tree("(u (u a b) (o c d e))").unwrap();
        assert_eq!(names, ["a", "b", "c", "d", "e"]);
        let again = parse_tree(&write_tree(&t, Some(&names))).unwrap();
        assert_eq!(again.0, t);
        let (t, names) = parse_tree("(u 2 (u 0 1))").unwrap();
        assert_eq!(names, ["0", "1", "2"]);
        assert_eq!(t.tree.leaf_count(), 3);
        assert!(parse_tree("(u a)").is_err());
        assert!(parse_tree("(u a b").is_err());
        assert!(parse_tree("(x a b)").is_err());
        assert!(parse_tree("(u a a)").is_err());
        let star = LaminarTree::star(4);
        let p = PartiallyOrderedTree::unordered(star.clone());
        assert_eq!(parse_tree(&write_tree(&p, None)).unwrap().0.tree, star);
    }

    #[test]
    fn semigroups_round_trip() {
        let s = FiniteSemigroup::with_identity(&FiniteSemigroup::left_zero(2));
        assert_eq!(parse_semigroup(&write_semigroup(&s)).unwrap(), s);
        let bad = "semigroup 2\n0 0\n1 0\n";
        assert!(parse_semigroup(bad).is_err());
        assert!(parse_semigroup("semigroup 2\n0 1\n").is_err());
    }

    #[test]
    fn matrices_resolve_semigroups() {
        let s = FiniteSemigroup::cyclic_group(3);
        let resolve = |p: &str| if p == "z3.sgp" { Ok(s.clone()) } else { no_files(p) };
        let m = parse_matrix("matrix 2 2 sgp=z3.sgp\n0 1\n1 2\n", &resolve).unwrap();
        assert_eq!(m.semigroup().map(|a| a.size()), Some(3));
        let again = parse_matrix(&write_matrix(&m, Some("z3.sgp")), &resolve).unwrap();
        assert_eq!(again.to_rows(), m.to_rows());
        assert!(parse_matrix("matrix 1 1 sgp=z3.sgp\n7\n", &resolve).is_err());
        assert!(parse_matrix("matrix 1 2\n0\n", &no_files).is_err());
    }

    #[test]
    fn hypergraphs_round_trip() {
        let h = Hypergraph::new(2, 3, vec![0, 1, 1, 2]).unwrap();
        assert_eq!(parse_hypergraph(&write_hypergraph(&h)).unwrap(), h);
        assert!(parse_hypergraph("hypergraph 2 2\n0 1 1\n").is_err());
    }

    #[test]
    fn oracles_round_trip() {
        for (kind, k) in [(OracleKind::Unordered, 2), (OracleKind::Ordered, 4)] {
            let o = synth_oracle(kind, 5, vec![0b11, 0b100, 0b11000], k, 3, SynthOptions::default()).unwrap();
            let text = write_oracle(&o);
            assert_eq!(parse_oracle(&text, &no_files).unwrap(), o);
        }
        assert!(parse_oracle("oracle sideways\n", &no_files).is_err());
    }
}
