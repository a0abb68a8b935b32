//! Type matrices and cut-rank.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{check_cap, invalid, Error, Result};
use crate::structures::{
    canonical_ids, elements, full_set, qf_type_unchecked, singleton_lifting, ElementTypes, MonadicStructure, QfType,
    Structure, Subset,
};
use crate::trees::{blocks, LinearPreorder};

/// Rows indexed by `X^m`, columns by `(complement)^m`, cells are type ids.
#[derive(Debug, Clone)]
pub struct TypeMatrix {
    pub x: Subset,
    pub m: usize,
    pub rows: Vec<Vec<usize>>,
    pub cols: Vec<Vec<usize>>,
    /// Row-major cell values, indices into `dictionary`.
    pub values: Vec<u32>,
    /// Distinct types in sorted order.
    pub dictionary: Vec<QfType>,
}

impl TypeMatrix {
    pub fn cell(&self, r: usize, c: usize) -> u32 {
        self.values[r * self.cols.len() + c]
    }
}

/// All `m`-tuples over `set`, lexicographic.
pub(crate) fn tuples_of(set: Subset, m: usize) -> Vec<Vec<usize>> {
    let elems: Vec<usize> = elements(set).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for t in &out {
            for &e in &elems {
                let mut u: Vec<usize> = t.clone();
                u.push(e);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

pub fn type_matrix(s: &Structure, x: Subset, m: usize) -> Result<TypeMatrix> {
    if m == 0 {
        return invalid("type matrices need m >= 1");
    }
    s.check_subset(x)?;
    let n = s.universe_size();
    let inside = x.count_ones() as u128;
    let outside = n as u128 - inside;
    let cells = inside.saturating_pow(m as u32).saturating_mul(outside.saturating_pow(m as u32));
    check_cap("type matrix cells", cells, Caps::get().type_matrix_cells)?;
    let rows = tuples_of(x, m);
    let cols = tuples_of(full_set(n) & !x, m);
    let mut types = Vec::with_capacity(rows.len() * cols.len());
    let mut buf: Vec<Option<usize>> = Vec::with_capacity(2 * m);
    for r in &rows {
        for c in &cols {
            buf.clear();
            buf.extend(r.iter().chain(c).map(|&e| Some(e)));
            types.push(qf_type_unchecked(s, &buf));
        }
    }
    let values = canonical_ids(&types);
    let mut dictionary = types;
    dictionary.sort();
    dictionary.dedup();
    Ok(TypeMatrix {
        x,
        m,
        rows,
        cols,
        values,
        dictionary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranks {
    pub distinct_rows: usize,
    pub distinct_cols: usize,
    pub field_rank: usize,
    /// Characteristic of the field used for `field_rank`.
    pub prime: u64,
}

pub fn matrix_ranks(m: &TypeMatrix) -> Ranks {
    value_matrix_ranks(&m.values, m.rows.len(), m.cols.len(), m.dictionary.len())
}

/// Ranks of a row-major matrix whose values are ids below `value_count`.
pub fn value_matrix_ranks(values: &[u32], rows: usize, cols: usize, value_count: usize) -> Ranks {
    let prime = smallest_prime_at_least(value_count.max(2) as u64);
    Ranks {
        distinct_rows: distinct_rows(values, rows, cols),
        distinct_cols: distinct_cols(values, rows, cols),
        field_rank: field_rank(values, rows, cols, prime),
        prime,
    }
}

pub fn distinct_rows<T: std::hash::Hash + Eq>(values: &[T], rows: usize, cols: usize) -> usize {
    (0..rows)
        .map(|r| &values[r * cols..(r + 1) * cols])
        .collect::<HashSet<_>>()
        .len()
}

pub fn distinct_cols<T: std::hash::Hash + Eq + Clone>(values: &[T], rows: usize, cols: usize) -> usize {
    (0..cols)
        .map(|c| (0..rows).map(|r| values[r * cols + c].clone()).collect::<Vec<_>>())
        .collect::<HashSet<_>>()
        .len()
}

pub(crate) fn smallest_prime_at_least(lo: u64) -> u64 {
    let is_prime = |p: u64| p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0);
    (lo..).find(|&p| is_prime(p)).expect("primes are unbounded")
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Rank over GF(p) with value `v` embedded as the residue `v`.
pub fn field_rank(values: &[u32], rows: usize, cols: usize, p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|r| values[r * cols..(r + 1) * cols].iter().map(|&v| v as u64 % p).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = mod_pow(a[rank][c], p - 2, p);
        for v in a[rank].iter_mut() {
            *v = *v * inv % p;
        }
        let pivot_row = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Simple undirected graph on at most 64 vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > 64 {
            return invalid("graphs are limited to 64 vertices");
        }
        let mut adj = vec![0u64; n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::OutOfRange { element: a.max(b), size: n });
            }
            if a == b {
                return invalid(format!("loop at vertex {a}"));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        Ok(Graph { n, adj })
    }

    /// Reads a structure with one symmetric, loop-free binary relation.
    pub fn from_structure(s: &Structure) -> Result<Self> {
        let v = s.vocabulary();
        if v.len() != 1 || v.relations()[0].arity != 2 {
            return invalid("a graph needs exactly one binary relation");
        }
        let mut edges = Vec::new();
        for t in s.tuples(0) {
            let (a, b) = (t[0], t[1]);
            if a == b {
                return invalid(format!("loop at vertex {a}"));
            }
            if !s.holds(0, &[b, a]) {
                return invalid(format!("edge ({a},{b}) has no reverse; the relation is directed"));
            }
            edges.push((a, b));
        }
        Graph::new(s.universe_size(), edges)
    }

    pub fn to_structure(&self) -> Structure {
        Structure::graph(self.n, self.edges()).expect("graph is valid")
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path")
    }

    pub fn cycle(n: usize) -> Self {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).filter(|(a, b)| a != b)).expect("cycle")
    }

    pub fn clique(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).expect("clique")
    }

    pub fn edgeless(n: usize) -> Self {
        Graph::new(n, []).expect("edgeless")
    }

    /// Grid graph with vertex `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        Graph::new(rows * cols, edges).expect("grid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn neighbours(&self, v: usize) -> Subset {
        self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| elements(self.adj[a]).filter(move |&b| a < b).map(move |b| (a, b)))
            .collect()
    }
}

/// GF(2) rank of the adjacency matrix between `x` and its complement.
pub fn graph_cut_rank(g: &Graph, x: Subset) -> usize {
    let outside = full_set(g.n) & !x;
    let mut basis: Vec<u64> = Vec::new();
    for v in elements(x & full_set(g.n)) {
        let mut row = g.adj[v] & outside;
        for &b in &basis {
            row = row.min(row ^ b);
        }
        if row != 0 {
            basis.push(row);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Which rank function to apply to subsets of a structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankMeasure {
    /// GF(2) cut-rank; the structure must be a graph.
    GraphCut,
    /// Distinct rows of the type matrix with tuples of length `m`.
    DistinctRows { m: usize },
}

impl RankMeasure {
    /// A measure for the structure: graphs use GF(2), everything else distinct rows at max arity.
    pub fn default_for(s: &Structure) -> Self {
        if Graph::from_structure(s).is_ok() {
            RankMeasure::GraphCut
        } else {
            RankMeasure::DistinctRows {
                m: s.vocabulary().max_arity().max(1),
            }
        }
    }

    pub fn prepare<'a>(&self, s: &'a Structure) -> Result<PreparedMeasure<'a>> {
        Ok(match *self {
            RankMeasure::GraphCut => PreparedMeasure::Graph(Graph::from_structure(s)?),
            RankMeasure::DistinctRows { m } => PreparedMeasure::Rows(s, m),
        })
    }
}

pub enum PreparedMeasure<'a> {
    Graph(Graph),
    Rows(&'a Structure, usize),
}

impl PreparedMeasure<'_> {
    pub fn rank(&self, x: Subset) -> Result<usize> {
        match self {
            PreparedMeasure::Graph(g) => Ok(graph_cut_rank(g, x)),
            PreparedMeasure::Rows(s, m) => Ok(matrix_ranks(&type_matrix(s, x, *m)?).distinct_rows),
        }
    }
}

/// Recursive monadic type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonadicDType {
    /// Depth 0: the atomic fact bits.
    Atomic(u128),
    /// Depth d+1: own depth-d type and the depth-d types of all one-set extensions.
    Step(Box<MonadicDType>, BTreeSet<MonadicDType>),
}

impl MonadicDType {
    pub fn depth(&self) -> usize {
        match self {
            MonadicDType::Atomic(_) => 0,
            MonadicDType::Step(own, _) => own.depth() + 1,
        }
    }

    /// The type truncated to depth `d`.
    pub fn truncate(&self, d: usize) -> MonadicDType {
        match self {
            MonadicDType::Step(own, _) if self.depth() > d => own.truncate(d),
            other => other.clone(),
        }
    }
}

/// Atomic basis for monadic types: relation memberships, pairwise inclusion
/// and equality, and optionally cardinality residues modulo each `moduli` entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomicBasis {
    pub moduli: Vec<u32>,
}

fn atomic_facts(ms: &MonadicStructure, basis: &AtomicBasis, sets: &[u32]) -> Result<u128> {
    let k = sets.len();
    let mut bits = 0u128;
    let mut pos = 0u32;
    let mut push = |b: bool, pos: &mut u32| -> Result<()> {
        if *pos >= 128 {
            return Err(Error::CapExceeded {
                what: "monadic atomic facts",
                needed: *pos as u128 + 1,
                cap: 128,
            });
        }
        if b {
            bits |= 1 << *pos;
        }
        *pos += 1;
        Ok(())
    };
    let mut args = Vec::new();
    for r in 0..ms.relation_names().len() {
        let a = ms.arity(r);
        for idx in 0..k.pow(a as u32) {
            args.clear();
            let mut rest = idx;
            for _ in 0..a {
                args.push(sets[rest % k]);
                rest /= k;
            }
            args.reverse();
            push(ms.holds(r, &args), &mut pos)?;
        }
    }
    for i in 0..k {
        for j in 0..k {
            if i != j {
                push(sets[i] & !sets[j] == 0, &mut pos)?;
                push(sets[i] == sets[j], &mut pos)?;
            }
        }
    }
    for &q in &basis.moduli {
        for &s in sets {
            let residue = s.count_ones() % q;
            for bit in 0..(32 - q.leading_zeros()) {
                push(residue >> bit & 1 == 1, &mut pos)?;
            }
        }
    }
    Ok(bits)
}

/// Tables of canonical monadic type ids for all tuples of subsets.
#[derive(Debug, Clone)]
pub struct MonadicTypes {
    n: usize,
    base_len: usize,
    /// `layers[d][len - base_len]`, indexed by the tuple in base `2^n`.
    layers: Vec<Vec<Vec<u32>>>,
}

fn set_tuple_index(n: usize, sets: &[u32]) -> usize {
    sets.iter().fold(0, |acc, &s| (acc << n) | s as usize)
}

impl MonadicTypes {
    /// Tables for tuples of length `len..=len + d - depth` at every depth `0..=d`.
    pub fn new(ms: &MonadicStructure, len: usize, d: usize, basis: &AtomicBasis) -> Result<Self> {
        let n = ms.universe_size();
        let top = ms_table_size(n, len + d);
        check_cap("monadic type table", top, Caps::get().monadic_table)?;
        let mut base = Vec::with_capacity(d + 1);
        for l in len..=len + d {
            let count = 1usize << (n * l);
            let mut facts = Vec::with_capacity(count);
            let mut sets = vec![0u32; l];
            for idx in 0..count {
                for (i, s) in sets.iter_mut().enumerate() {
                    *s = ((idx >> (n * (l - 1 - i))) & ((1 << n) - 1)) as u32;
                }
                facts.push(atomic_facts(ms, basis, &sets)?);
            }
            base.push(canonical_ids(&facts));
        }
        let mut layers = vec![base];
        let subsets = 1usize << n;
        for depth in 1..=d {
            let prev = &layers[depth - 1];
            let mut cur = Vec::new();
            for l in len..=len + d - depth {
                let count = 1usize << (n * l);
                let own = &prev[l - len];
                let ext = &prev[l + 1 - len];
                let mut keys = Vec::with_capacity(count);
                for idx in 0..count {
                    let mut set: Vec<u32> = (0..subsets).map(|z| ext[(idx << n) | z]).collect();
                    set.sort_unstable();
                    set.dedup();
                    keys.push((own[idx], set));
                }
                cur.push(canonical_ids(&keys));
            }
            layers.push(cur);
        }
        Ok(MonadicTypes { n, base_len: len, layers })
    }

    pub fn id(&self, sets: &[u32], d: usize) -> u32 {
        self.layers[d][sets.len() - self.base_len][set_tuple_index(self.n, sets)]
    }
}

fn ms_table_size(n: usize, len: usize) -> u128 {
    1u128.checked_shl((n * len) as u32).unwrap_or(u128::MAX)
}

/// Structural monadic d-type of a tuple of subsets.
pub fn monadic_d_type(ms: &MonadicStructure, sets: &[u32], d: usize) -> Result<MonadicDType> {
    monadic_d_type_with(ms, sets, d, &AtomicBasis::default())
}

pub fn monadic_d_type_with(ms: &MonadicStructure, sets: &[u32], d: usize, basis: &AtomicBasis) -> Result<MonadicDType> {
    let n = ms.universe_size();
    let full = full_set(n) as u32;
    if sets.iter().any(|&s| s & !full != 0) {
        return invalid("subset outside the universe");
    }
    check_cap("monadic type recursion", ms_table_size(n, d), Caps::get().monadic_table)?;
    let mut memo = HashMap::new();
    fn go(
        ms: &MonadicStructure,
        basis: &AtomicBasis,
        sets: &mut Vec<u32>,
        d: usize,
        memo: &mut HashMap<(usize, Vec<u32>), MonadicDType>,
    ) -> Result<MonadicDType> {
        if let Some(t) = memo.get(&(d, sets.clone())) {
            return Ok(t.clone());
        }
        let t = if d == 0 {
            MonadicDType::Atomic(atomic_facts(ms, basis, sets)?)
        } else {
            let own = go(ms, basis, sets, d - 1, memo)?;
            let mut ext = BTreeSet::new();
            for z in 0..(1u32 << ms.universe_size()) {
                sets.push(z);
                ext.insert(go(ms, basis, sets, d - 1, memo)?);
                sets.pop();
            }
            MonadicDType::Step(Box::new(own), ext)
        };
        memo.insert((d, sets.clone()), t.clone());
        Ok(t)
    }
    go(ms, basis, &mut sets.to_vec(), d, &mut memo)
}

#[derive(Debug, Clone)]
pub struct MonadicTypeMatrix {
    pub d: usize,
    pub m: usize,
    pub rows: Vec<Vec<u32>>,
    pub cols: Vec<Vec<u32>>,
    pub values: Vec<u32>,
}

impl MonadicTypeMatrix {
    pub fn distinct_rows(&self) -> usize {
        distinct_rows(&self.values, self.rows.len(), self.cols.len())
    }

    pub fn distinct_cols(&self) -> usize {
        distinct_cols(&self.values, self.rows.len(), self.cols.len())
    }
}

/// All `m`-tuples of subsets of `set`.
fn subset_tuples(set: u32, m: usize) -> Vec<Vec<u32>> {
    let subs: Vec<u32> = subsets_of(set).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                subs.iter().map(move |&s| {
                    let mut u = t.clone();
                    u.push(s);
                    u
                })
            })
            .collect();
    }
    out
}

/// Subsets of `set` in increasing numeric order.
pub(crate) fn subsets_of(set: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set { None } else { Some(((cur | !set).wrapping_add(1)) & set) };
        Some(cur)
    })
}

pub fn monadic_type_matrix(ms: &MonadicStructure, x: u32, d: usize, m: usize) -> Result<MonadicTypeMatrix> {
    let engine = MonadicTypes::new(ms, m, d, &AtomicBasis::default())?;
    monadic_type_matrix_from(&engine, ms.universe_size(), x, d, m)
}

pub fn monadic_type_matrix_from(engine: &MonadicTypes, n: usize, x: u32, d: usize, m: usize) -> Result<MonadicTypeMatrix> {
    let full = full_set(n) as u32;
    if x & !full != 0 {
        return invalid("subset outside the universe");
    }
    let rows = subset_tuples(x, m);
    let cols = subset_tuples(full & !x, m);
    check_cap(
        "monadic matrix cells",
        rows.len() as u128 * cols.len() as u128,
        Caps::get().type_matrix_cells,
    )?;
    let mut values = Vec::with_capacity(rows.len() * cols.len());
    let mut buf = vec![0u32; m];
    for r in &rows {
        for c in &cols {
            for i in 0..m {
                buf[i] = r[i] | c[i];
            }
            values.push(engine.id(&buf, d));
        }
    }
    Ok(MonadicTypeMatrix { d, m, rows, cols, values })
}

/// Distinct-row counts of `M_{d+1,1}` and `M_{d,2}` for one subset.
pub fn ef_bound_rows(engine: &MonadicTypes, n: usize, x: u32, d: usize) -> Result<(usize, usize)> {
    let wide = monadic_type_matrix_from(engine, n, x, d + 1, 1)?.distinct_rows();
    let deep = monadic_type_matrix_from(engine, n, x, d, 2)?.distinct_rows();
    Ok((wide, deep))
}

/// Two element tuples whose first-order and lifted monadic types disagree.
pub type LiftingMismatch = (Vec<usize>, Vec<usize>);

/// Compares equality of first-order element d-types of `k`-tuples with
/// equality of monadic d-types of their singleton liftings.
pub fn lifting_correspondence(s: &Structure, k: usize, d: usize) -> Result<Option<LiftingMismatch>> {
    let ms = singleton_lifting(s)?;
    let fo = ElementTypes::new(s, k, d)?;
    let mso = MonadicTypes::new(&ms, k, d, &AtomicBasis::default())?;
    let tuples = tuples_of(full_set(s.universe_size()), k);
    let lifted: Vec<Vec<u32>> = tuples.iter().map(|t| t.iter().map(|&e| 1u32 << e).collect()).collect();
    for i in 0..tuples.len() {
        for j in i + 1..tuples.len() {
            let a = fo.id(&tuples[i], d) == fo.id(&tuples[j], d);
            let b = mso.id(&lifted[i], d) == mso.id(&lifted[j], d);
            if a != b {
                return Ok(Some((tuples[i].clone(), tuples[j].clone())));
            }
        }
    }
    Ok(None)
}

/// Special classes with closed-form cut-rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceKind {
    LinearOrder,
    Equivalence,
    PreorderBlocks,
    Grid { rows: usize, cols: usize },
}

pub fn reference_rank(kind: ReferenceKind, s: &Structure, x: Subset) -> Result<usize> {
    s.check_subset(x)?;
    let n = s.universe_size();
    let binary = |s: &Structure| -> Result<()> {
        if s.vocabulary().len() != 1 || s.vocabulary().relations()[0].arity != 2 {
            return invalid("expected a single binary relation");
        }
        Ok(())
    };
    match kind {
        ReferenceKind::LinearOrder => {
            binary(s)?;
            let p = linear_preorder_of(s)?;
            if p.classes().iter().any(|c| c.count_ones() > 1) {
                return invalid("relation is a preorder with ties, not a linear order");
            }
            let order: Vec<bool> = p.classes().iter().map(|&c| c & x != 0).collect();
            Ok(order.iter().enumerate().filter(|&(i, &b)| b && (i == 0 || !order[i - 1])).count())
        }
        ReferenceKind::Equivalence => {
            binary(s)?;
            let classes = equivalence_classes(s)?;
            Ok(classes.iter().filter(|&&c| c & x != 0 && c & !x != 0).count())
        }
        ReferenceKind::PreorderBlocks => {
            binary(s)?;
            let p = linear_preorder_of(s)?;
            Ok(blocks(&p, x).len())
        }
        ReferenceKind::Grid { rows, cols } => {
            let g = Graph::from_structure(s)?;
            if g != Graph::grid(rows, cols) {
                return invalid(format!("structure is not the {rows}x{cols} grid"));
            }
            let k = x.count_ones() as usize;
            Ok(k.min(n - k))
        }
    }
}

/// Reads a total preorder (reflexive, transitive, total); strict versions
/// with no loops are also accepted.
fn linear_preorder_of(s: &Structure) -> Result<LinearPreorder> {
    let n = s.universe_size();
    let le = |a: usize, b: usize| a == b || s.holds(0, &[a, b]);
    let loops = (0..n).filter(|&a| s.holds(0, &[a, a])).count();
    if loops != 0 && loops != n {
        return invalid("relation is reflexive on some elements only");
    }
    for a in 0..n {
        for b in 0..n {
            if !le(a, b) && !le(b, a) {
                return invalid(format!("elements {a} and {b} are incomparable"));
            }
            for c in 0..n {
                if le(a, b) && le(b, c) && !le(a, c) {
                    return invalid(format!("transitivity fails on ({a},{b},{c})"));
                }
            }
        }
    }
    // Rank elements by the number of elements strictly below them.
    let below = |a: usize| (0..n).filter(|&b| le(b, a) && !le(a, b)).count();
    let mut groups: BTreeMap<usize, Subset> = BTreeMap::new();
    for a in 0..n {
        *groups.entry(below(a)).or_default() |= 1 << a;
    }
    LinearPreorder::new(n, groups.into_values().collect())
}

fn equivalence_classes(s: &Structure) -> Result<Vec<Subset>> {
    let n = s.universe_size();
    let rel = |a: usize, b: usize| a == b || s.holds(0, &[a, b]);
    let loops = (0..n).filter(|&a| s.holds(0, &[a, a])).count();
    if loops != 0 && loops != n {
        return invalid("relation is reflexive on some elements only");
    }
    let mut classes: Vec<Subset> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rel(a, b) != rel(b, a) {
                return invalid(format!("relation is not symmetric on ({a},{b})"));
            }
            for c in 0..n {
                if rel(a, b) && rel(b, c) && !rel(a, c) {
                    return invalid(format!("transitivity fails on ({a},{b},{c})"));
                }
            }
        }
        if !classes.iter().any(|&c| c >> a & 1 == 1) {
            classes.push((0..n).filter(|&b| rel(a, b)).fold(0, |acc, b| acc | 1 << b));
        }
    }
    Ok(classes)
}

/// For each bound `b <= k`, the largest rank of `X ∪ Y` over all pairs with
/// `max(rank X, rank Y) <= b`. Buckets with no pair are absent.
pub fn union_rank_table(
    structures: impl IntoIterator<Item = Structure>,
    measure: RankMeasure,
    k: usize,
) -> Result<BTreeMap<usize, usize>> {
    let mut exact: BTreeMap<usize, usize> = BTreeMap::new();
    for s in structures {
        let n = s.universe_size();
        let prepared = measure.prepare(&s)?;
        let ranks: Vec<usize> = (0..1u64 << n).map(|x| prepared.rank(x)).collect::<Result<_>>()?;
        for x in 0..1usize << n {
            for y in 0..1usize << n {
                let b = ranks[x].max(ranks[y]);
                if b <= k {
                    let e = exact.entry(b).or_default();
                    *e = (*e).max(ranks[x | y]);
                }
            }
        }
    }
    let mut table = BTreeMap::new();
    let mut best = 0;
    for b in 0..=k {
        if let Some(&v) = exact.get(&b) {
            best = best.max(v);
        }
        if exact.range(..=b).next().is_some() {
            table.insert(b, best);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Structure {
        Structure::graph(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn p3_type_matrix_shape() {
        let m = type_matrix(&p3(), 0b001, 2).unwrap();
        assert_eq!((m.rows.len(), m.cols.len()), (1, 4));
        let empty = type_matrix(&p3(), 0, 2).unwrap();
        assert_eq!(empty.rows.len(), 0);
        assert_eq!(matrix_ranks(&empty).distinct_rows, 0);
        let all = type_matrix(&p3(), 0b111, 2).unwrap();
        assert_eq!(all.cols.len(), 0);
        let r = matrix_ranks(&all);
        assert_eq!((r.distinct_rows, r.distinct_cols), (1, 0));
    }

    #[test]
    fn constant_matrix_ranks() {
        let r = value_matrix_ranks(&[0, 0, 0, 0, 0, 0], 2, 3, 1);
        assert_eq!((r.distinct_rows, r.distinct_cols), (1, 1));
        assert!(r.field_rank <= 1);
        let r = value_matrix_ranks(&[3, 3, 3, 3], 2, 2, 4);
        assert_eq!(r.field_rank, 1);
        assert_eq!(r.prime, 5);
    }

    #[test]
    fn field_rank_of_identity() {
        assert_eq!(field_rank(&[1, 0, 0, 0, 1, 0, 0, 0, 1], 3, 3, 2), 3);
        assert_eq!(field_rank(&[1, 1, 1, 1], 2, 2, 2), 1);
        assert_eq!(field_rank(&[1, 1, 1, 2], 2, 2, 3), 2);
        // 1*1 - 2*2 = -3 = 0 mod 3
        assert_eq!(field_rank(&[1, 2, 2, 1], 2, 2, 3), 1);
    }

    #[test]
    fn cut_ranks_of_small_graphs() {
        let k5 = Graph::clique(5);
        assert!((0..32).all(|x| graph_cut_rank(&k5, x) <= 1));
        let e = Graph::edgeless(5);
        assert!((0..32).all(|x| graph_cut_rank(&e, x) == 0));
        let p = Graph::path(6);
        assert_eq!(graph_cut_rank(&p, 0b010101), 3);
        assert_eq!(graph_cut_rank(&p, 0b000111), 1);
    }

    #[test]
    fn graph_validation() {
        let directed = Structure::binary(2, [(0, 1)]).unwrap();
        assert!(Graph::from_structure(&directed).is_err());
        let looped = Structure::binary(2, [(0, 0)]).unwrap();
        assert!(Graph::from_structure(&looped).is_err());
        assert_eq!(Graph::from_structure(&p3()).unwrap(), Graph::path(3));
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(subsets_of(0b101).collect::<Vec<_>>(), vec![0, 1, 4, 5]);
        assert_eq!(subsets_of(0).collect::<Vec<_>>(), vec![0]);
    }

    fn unary(n: usize, members: &[u32]) -> MonadicStructure {
        MonadicStructure::new(n, vec![("P".into(), 1, members.iter().map(|&m| vec![m]).collect())]).unwrap()
    }

    #[test]
    fn monadic_matrix_shapes() {
        let ms = unary(2, &[0b01]);
        let m = monadic_type_matrix(&ms, 0b01, 0, 1).unwrap();
        assert_eq!((m.rows.len(), m.cols.len()), (2, 2));
        let m = monadic_type_matrix(&ms, 0, 0, 1).unwrap();
        assert_eq!(m.rows.len(), 1);
    }

    #[test]
    fn monadic_types_are_depth_monotone() {
        let ms = unary(3, &[0b001, 0b110]);
        let engine = MonadicTypes::new(&ms, 1, 2, &AtomicBasis::default()).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                if engine.id(&[a], 2) == engine.id(&[b], 2) {
                    assert_eq!(engine.id(&[a], 1), engine.id(&[b], 1));
                }
                let ta = monadic_d_type(&ms, &[a], 2).unwrap();
                let tb = monadic_d_type(&ms, &[b], 2).unwrap();
                assert_eq!(ta == tb, engine.id(&[a], 2) == engine.id(&[b], 2));
                assert_eq!(ta.truncate(1) == tb.truncate(1), engine.id(&[a], 1) == engine.id(&[b], 1));
            }
        }
        assert_eq!(monadic_d_type(&ms, &[1], 2).unwrap().depth(), 2);
    }

    #[test]
    fn counting_mode_separates_by_parity() {
        let ms = unary(2, &[]);
        let plain = AtomicBasis::default();
        let counting = AtomicBasis { moduli: vec![2] };
        assert_eq!(
            monadic_d_type_with(&ms, &[0b01], 0, &plain).unwrap(),
            monadic_d_type_with(&ms, &[0b11], 0, &plain).unwrap()
        );
        assert_ne!(
            monadic_d_type_with(&ms, &[0b01], 0, &counting).unwrap(),
            monadic_d_type_with(&ms, &[0b11], 0, &counting).unwrap()
        );
    }

    #[test]
    fn reference_ranks() {
        // 0 < 1 < 2 < 3 as a non-strict order
        let order = Structure::binary(4, (0..4).flat_map(|a| (a..4).map(move |b| (a, b)))).unwrap();
        assert_eq!(reference_rank(ReferenceKind::LinearOrder, &order, 0b0110).unwrap(), 1);
        assert_eq!(reference_rank(ReferenceKind::LinearOrder, &order, 0b1001).unwrap(), 2);
        let eq = Structure::graph(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(reference_rank(ReferenceKind::Equivalence, &eq, 0b0011).unwrap(), 0);
        assert_eq!(reference_rank(ReferenceKind::Equivalence, &eq, 0b0101).unwrap(), 2);
        assert!(reference_rank(ReferenceKind::Equivalence, &p3(), 1).is_err());
        let grid = Graph::grid(2, 2).to_structure();
        assert_eq!(reference_rank(ReferenceKind::Grid { rows: 2, cols: 2 }, &grid, 0b0111).unwrap(), 1);
        assert!(reference_rank(ReferenceKind::Grid { rows: 1, cols: 4 }, &grid, 1).is_err());
    }

    #[test]
    fn union_table_basics() {
        let table = union_rank_table([Graph::path(4).to_structure()], RankMeasure::GraphCut, 3).unwrap();
        let values: Vec<usize> = table.values().copied().collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(table[&0], 0);
    }
}
