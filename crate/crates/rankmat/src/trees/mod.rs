//! Laminar trees over a set of leaves and the measures defined on them.

mod enumerate;
mod orient;
mod width;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::structures::{elements, full_set, Structure, Subset, Vocabulary};

pub use enumerate::{all_trees, binary_trees, shapes, tree_count};
pub use orient::{chosen_leaf, group_orientation, verify_orientation, Orientation, OrientationOutcome};
pub use width::{decomposition_width, rankwidth, TreeSearch};

/// A laminar family on leaves `0..n` containing every singleton and the full set.
///
/// Nodes are stored by decreasing size, then increasing bitmask, so the root
/// is node 0 and parents precede children. Children are listed by increasing
/// bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaminarTree {
    n: usize,
    nodes: Vec<Subset>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    leaf_node: Vec<usize>,
}

fn node_order(a: &Subset, b: &Subset) -> std::cmp::Ordering {
    b.count_ones().cmp(&a.count_ones()).then(a.cmp(b))
}

/// Validates a family as a tree.
pub fn validate_tree(n: usize, family: &[Subset]) -> Result<LaminarTree> {
    LaminarTree::new(n, family)
}

impl LaminarTree {
    /// Validates `family`; duplicate members are ignored.
    ///
    /// Since every singleton is a member, every non-leaf automatically has at
    /// least two children; unary nodes can only arise in nested descriptions,
    /// which [`PartiallyOrderedTree::from_nested`] rejects.
    pub fn new(n: usize, family: &[Subset]) -> Result<Self> {
        if n == 0 || n > 64 {
            return invalid("trees need between 1 and 64 leaves");
        }
        let full = full_set(n);
        let mut nodes: Vec<Subset> = family.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if let Some(&bad) = nodes.iter().find(|&&s| s == 0 || s & !full != 0) {
            return invalid(format!("node {bad:#b} is empty or outside the leaves"));
        }
        if !nodes.contains(&full) {
            return invalid("the full leaf set is missing");
        }
        for i in 0..n {
            if !nodes.contains(&(1 << i)) {
                return invalid(format!("singleton {{{i}}} is missing"));
            }
        }
        nodes.sort_by(node_order);
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                if a & b != 0 && a & b != a && a & b != b {
                    return invalid(format!("nodes {a:#b} and {b:#b} cross"));
                }
            }
        }
        let mut parent = vec![None; nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        for i in 1..nodes.len() {
            // smallest strict superset: the last earlier node containing it
            let p = (0..i).rev().find(|&j| nodes[j] & nodes[i] == nodes[i] && nodes[j] != nodes[i]).expect("root contains all");
            parent[i] = Some(p);
            children[p].push(i);
        }
        for ch in children.iter_mut() {
            ch.sort_by_key(|&c| nodes[c]);
        }
        let mut leaf_node = vec![0; n];
        for (i, &s) in nodes.iter().enumerate() {
            if s.count_ones() == 1 {
                leaf_node[s.trailing_zeros() as usize] = i;
            }
        }
        Ok(LaminarTree {
            n,
            nodes,
            parent,
            children,
            leaf_node,
        })
    }

    /// Root with all leaves as children.
    pub fn star(n: usize) -> Self {
        let mut family: Vec<Subset> = (0..n).map(|i| 1 << i).collect();
        family.push(full_set(n));
        LaminarTree::new(n, &family).expect("star")
    }

    /// Complete binary tree of the given height on `2^height` leaves.
    pub fn complete_binary(height: usize) -> Self {
        let n = 1usize << height;
        let mut family = Vec::new();
        for level in 0..=height {
            let size = 1usize << level;
            for start in (0..n).step_by(size) {
                family.push(full_set(size) << start);
            }
        }
        LaminarTree::new(n, &family).expect("complete binary tree")
    }

    pub fn from_nested(nested: &Nested) -> Result<Self> {
        Ok(PartiallyOrderedTree::from_nested(nested)?.tree)
    }

    pub fn leaf_count(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Subset] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Subset {
        self.nodes[i]
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.children[i].is_empty()
    }

    /// Node index of the singleton of leaf `leaf`.
    pub fn leaf_node(&self, leaf: usize) -> usize {
        self.leaf_node[leaf]
    }

    pub fn index_of(&self, set: Subset) -> Option<usize> {
        self.nodes.iter().position(|&s| s == set)
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.is_leaf(i))
    }

    /// Node indices with children before parents.
    pub fn post_order(&self) -> Vec<usize> {
        (0..self.nodes.len()).rev().collect()
    }

    /// Least node containing both leaves.
    pub fn lca(&self, a: usize, b: usize) -> usize {
        let both = (1u64 << a) | (1u64 << b);
        let mut v = self.leaf_node[a];
        while self.nodes[v] & both != both {
            v = self.parent[v].expect("root contains every leaf");
        }
        v
    }

    /// `table[a][b]` = bitmask of the least node containing `a` and `b`.
    pub fn lca_masks(&self) -> Vec<Vec<Subset>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.nodes[self.lca(a, b)]).collect())
            .collect()
    }

    /// The child of `v` containing `leaf`.
    fn child_towards(&self, v: usize, leaf: usize) -> usize {
        *self.children[v]
            .iter()
            .find(|&&c| self.nodes[c] >> leaf & 1 == 1)
            .expect("leaf below node")
    }

    /// Bracket notation with leaves as numbers, children in stored order.
    pub fn to_sexpr(&self) -> String {
        PartiallyOrderedTree::unordered(self.clone()).to_sexpr(None)
    }
}

/// Nested description used to build trees, with leaves given by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nested {
    Leaf(usize),
    Node(NodeKind, Vec<Nested>),
}

impl Nested {
    pub fn unordered(children: Vec<Nested>) -> Self {
        Nested::Node(NodeKind::Unordered, children)
    }

    pub fn ordered(children: Vec<Nested>) -> Self {
        Nested::Node(NodeKind::Ordered, children)
    }

    fn leaves(&self, out: &mut Vec<usize>) {
        match self {
            Nested::Leaf(l) => out.push(*l),
            Nested::Node(_, ch) => ch.iter().for_each(|c| c.leaves(out)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Unordered,
    Ordered,
}

/// A laminar tree where some nodes order their children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartiallyOrderedTree {
    pub tree: LaminarTree,
    kinds: Vec<NodeKind>,
    /// Child order per node; for unordered nodes the stored child order.
    order: Vec<Vec<usize>>,
}

impl PartiallyOrderedTree {
    pub fn unordered(tree: LaminarTree) -> Self {
        let kinds = vec![NodeKind::Unordered; tree.node_count()];
        let order = tree.children.clone();
        PartiallyOrderedTree { tree, kinds, order }
    }

    /// `orders[i]` must be a permutation of the children of node `i` when it is ordered.
    pub fn new(tree: LaminarTree, kinds: Vec<NodeKind>, orders: Vec<Vec<usize>>) -> Result<Self> {
        if kinds.len() != tree.node_count() || orders.len() != tree.node_count() {
            return invalid("one kind and one child order per node are required");
        }
        for i in 0..tree.node_count() {
            let mut a = orders[i].clone();
            let mut b = tree.children(i).to_vec();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return invalid(format!("child order of node {:#b} is not a permutation of its children", tree.node(i)));
            }
        }
        Ok(PartiallyOrderedTree {
            tree,
            kinds,
            order: orders,
        })
    }

    /// Builds from a nested description; the leaves must be exactly `0..n`
    /// and every node needs at least two children.
    pub fn from_nested(nested: &Nested) -> Result<Self> {
        fn unary(node: &Nested) -> bool {
            match node {
                Nested::Leaf(_) => false,
                Nested::Node(_, ch) => ch.len() < 2 || ch.iter().any(unary),
            }
        }
        if unary(nested) {
            return invalid("a node with fewer than two children");
        }
        let mut leaves = Vec::new();
        nested.leaves(&mut leaves);
        let n = leaves.len();
        let mut sorted = leaves.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return invalid("leaves must be exactly 0..n, each once");
        }
        let mut family = Vec::new();
        let mut info: Vec<(Subset, NodeKind, Vec<Subset>)> = Vec::new();
        fn walk(node: &Nested, family: &mut Vec<Subset>, info: &mut Vec<(Subset, NodeKind, Vec<Subset>)>) -> Subset {
            match node {
                Nested::Leaf(l) => {
                    family.push(1 << l);
                    1 << l
                }
                Nested::Node(kind, children) => {
                    let sets: Vec<Subset> = children.iter().map(|c| walk(c, family, info)).collect();
                    let all = sets.iter().fold(0, |a, &s| a | s);
                    family.push(all);
                    info.push((all, *kind, sets));
                    all
                }
            }
        }
        walk(nested, &mut family, &mut info);
        let tree = LaminarTree::new(n, &family)?;
        let mut kinds = vec![NodeKind::Unordered; tree.node_count()];
        let mut orders = tree.children.clone();
        for (set, kind, sets) in info {
            let i = tree.index_of(set).expect("node present");
            kinds[i] = kind;
            if kind == NodeKind::Ordered {
                orders[i] = sets.iter().map(|&s| tree.index_of(s).expect("child present")).collect();
            }
        }
        PartiallyOrderedTree::new(tree, kinds, orders)
    }

    pub fn kind(&self, i: usize) -> NodeKind {
        self.kinds[i]
    }

    pub fn child_order(&self, i: usize) -> &[usize] {
        &self.order[i]
    }

    /// Bracket notation; leaves print as `names[id]` or the id.
    pub fn to_sexpr(&self, names: Option<&[String]>) -> String {
        fn go(t: &PartiallyOrderedTree, v: usize, names: Option<&[String]>, out: &mut String) {
            if t.tree.is_leaf(v) {
                let leaf = t.tree.node(v).trailing_zeros() as usize;
                match names {
                    Some(ns) => out.push_str(&ns[leaf]),
                    None => out.push_str(&leaf.to_string()),
                }
                return;
            }
            out.push_str(match t.kinds[v] {
                NodeKind::Unordered => "(u",
                NodeKind::Ordered => "(o",
            });
            for &c in &t.order[v] {
                out.push(' ');
                go(t, c, names, out);
            }
            out.push(')');
        }
        let mut out = String::new();
        go(self, 0, names, &mut out);
        out
    }
}

/// Encodes a tree as the ternary relation T(x,y,z): z lies in the least node containing x and y.
pub fn ternary_encode(t: &LaminarTree) -> Structure {
    let lca = t.lca_masks();
    let n = t.leaf_count();
    let mut tuples = Vec::new();
    for x in 0..n {
        for y in 0..n {
            tuples.extend(elements(lca[x][y]).map(|z| vec![x, y, z]));
        }
    }
    let vocab = Vocabulary::new([("T", 3)]).expect("vocabulary");
    Structure::new(vocab, n, vec![tuples]).expect("encoding is in range")
}

/// Inverse of [`ternary_encode`]; rejects structures that are not encodings.
pub fn ternary_decode(s: &Structure) -> Result<LaminarTree> {
    let v = s.vocabulary();
    if v.len() != 1 || v.relations()[0].arity != 3 {
        return invalid("expected one ternary relation");
    }
    let n = s.universe_size();
    if n == 0 || n > 64 {
        return invalid("encodings need between 1 and 64 elements");
    }
    let mut family = Vec::new();
    for x in 0..n {
        for y in 0..n {
            family.push((0..n).filter(|&z| s.holds(0, &[x, y, z])).fold(0u64, |a, z| a | 1 << z));
        }
    }
    let tree = LaminarTree::new(n, &family)?;
    if ternary_encode(&tree) != *s {
        return invalid("structure is not the ternary encoding of its decoded tree");
    }
    Ok(tree)
}

/// All nonempty unions of children of a common parent, plus the full set, sorted.
pub fn subforests(t: &LaminarTree) -> Vec<Subset> {
    let mut out = BTreeSet::new();
    out.insert(t.node(t.root()));
    for v in t.internal_nodes() {
        let ch = t.children(v);
        for pick in 1u64..(1 << ch.len()) {
            out.insert(elements(pick).fold(0, |a, i| a | t.node(ch[i])));
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterestingAnalysis {
    /// Interesting node bitmasks in node order.
    pub interesting: Vec<Subset>,
    /// Longest chain of nested interesting nodes.
    pub chain: usize,
    /// Largest number of interesting children of one node.
    pub siblings: usize,
}

/// Classifies nodes as dull (leaf, uncut, or some child `Y'` with
/// `X ∩ (Y∖Y')` empty or all of `Y∖Y'`) or interesting.
pub fn interesting_analysis(t: &LaminarTree, x: Subset) -> InterestingAnalysis {
    let nodes = t.node_count();
    let cut = |s: Subset| s & x != 0 && s & !x != 0;
    let flags: Vec<bool> = (0..nodes)
        .map(|v| {
            let y = t.node(v);
            if t.is_leaf(v) || !cut(y) {
                return false;
            }
            !t.children(v).iter().any(|&c| {
                let rest = y & !t.node(c);
                rest & x == 0 || rest & x == rest
            })
        })
        .collect();
    let mut chain = vec![0usize; nodes];
    for v in t.post_order() {
        let below = t.children(v).iter().map(|&c| chain[c]).max().unwrap_or(0);
        chain[v] = below + flags[v] as usize;
    }
    let siblings = (0..nodes)
        .map(|v| t.children(v).iter().filter(|&&c| flags[c]).count())
        .max()
        .unwrap_or(0);
    InterestingAnalysis {
        interesting: (0..nodes).filter(|&v| flags[v]).map(|v| t.node(v)).collect(),
        chain: chain[t.root()],
        siblings,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoolCost {
    Exact(usize),
    Exceeded,
}

/// Least number of subforests whose Boolean combinations include `x`.
pub fn min_boolean_combination(t: &LaminarTree, x: Subset, limit: usize) -> Result<BoolCost> {
    if limit > 4 {
        return invalid("the Boolean combination search supports limit <= 4");
    }
    let full = t.node(t.root());
    let x = x & full;
    if x == 0 || x == full {
        return Ok(BoolCost::Exact(0));
    }
    let forests = subforests(t);
    let inside: Vec<usize> = elements(x).collect();
    let outside: Vec<usize> = elements(full & !x).collect();
    // Every (in, out) pair must be split by some chosen generator.
    fn unseparated(chosen: &[Subset], inside: &[usize], outside: &[usize]) -> Option<(usize, usize)> {
        for &a in inside {
            for &b in outside {
                if !chosen.iter().any(|&f| (f >> a & 1) != (f >> b & 1)) {
                    return Some((a, b));
                }
            }
        }
        None
    }
    fn search(depth: usize, chosen: &mut Vec<Subset>, forests: &[Subset], inside: &[usize], outside: &[usize]) -> bool {
        let Some((a, b)) = unseparated(chosen, inside, outside) else {
            return true;
        };
        if depth == 0 {
            return false;
        }
        for &f in forests {
            if (f >> a & 1) != (f >> b & 1) {
                chosen.push(f);
                let ok = search(depth - 1, chosen, forests, inside, outside);
                chosen.pop();
                if ok {
                    return true;
                }
            }
        }
        false
    }
    for m in 1..=limit {
        if search(m, &mut Vec::new(), &forests, &inside, &outside) {
            return Ok(BoolCost::Exact(m));
        }
    }
    Ok(BoolCost::Exceeded)
}

/// Document preorder: `rel[x][y]` iff `x = y` or the least common ancestor is
/// ordered and the child towards `x` precedes the child towards `y`.
pub fn document_preorder(t: &PartiallyOrderedTree) -> Vec<Vec<bool>> {
    let tree = &t.tree;
    let n = tree.leaf_count();
    let mut rel = vec![vec![false; n]; n];
    for x in 0..n {
        for y in 0..n {
            rel[x][y] = x == y || {
                let v = tree.lca(x, y);
                t.kind(v) == NodeKind::Ordered && {
                    let order = t.child_order(v);
                    let px = order.iter().position(|&c| c == tree.child_towards(v, x));
                    let py = order.iter().position(|&c| c == tree.child_towards(v, y));
                    px < py
                }
            };
        }
    }
    rel
}

/// Largest height of a complete binary tree minor, by the Strahler recursion.
pub fn branching(t: &LaminarTree) -> usize {
    let mut value = vec![0usize; t.node_count()];
    for v in t.post_order() {
        let ch = t.children(v);
        if ch.is_empty() {
            continue;
        }
        let best = ch.iter().map(|&c| value[c]).max().unwrap_or(0);
        let hits = ch.iter().filter(|&&c| value[c] == best).count();
        value[v] = best + (hits >= 2) as usize;
    }
    value[t.root()]
}

/// Largest `k` such that restricting the tree to some `2^k` leaves gives the
/// complete binary tree of height `k`. Exponential; meant for small trees.
pub fn branching_brute_force(t: &LaminarTree) -> Result<usize> {
    let n = t.leaf_count();
    if n > 16 {
        return invalid("brute-force branching is limited to 16 leaves");
    }
    let restrict = |leaves: Subset| -> Vec<Subset> {
        let set: BTreeSet<Subset> = t.nodes().iter().map(|&s| s & leaves).filter(|&s| s != 0).collect();
        set.into_iter().collect()
    };
    fn complete(family: &[Subset], top: Subset, height: usize) -> bool {
        if height == 0 {
            return top.count_ones() == 1;
        }
        // maximal proper members below `top`
        let below: Vec<Subset> = family.iter().copied().filter(|&s| s & top == s && s != top).collect();
        let maximal: Vec<Subset> = below
            .iter()
            .copied()
            .filter(|&s| !below.iter().any(|&o| o != s && o & s == s))
            .collect();
        maximal.len() == 2
            && maximal
                .iter()
                .all(|&c| c.count_ones() == 1 << (height - 1) && complete(family, c, height - 1))
    }
    let mut best = 0;
    let mut k = 1;
    while 1usize << k <= n {
        let size = 1u32 << k;
        let found = (0..1u64 << n)
            .filter(|l| l.count_ones() == size)
            .any(|l| complete(&restrict(l), l, k));
        if !found {
            break;
        }
        best = k;
        k += 1;
    }
    Ok(best)
}

/// Ordered classes partitioning `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearPreorder {
    n: usize,
    classes: Vec<Subset>,
}

impl LinearPreorder {
    pub fn new(n: usize, classes: Vec<Subset>) -> Result<Self> {
        if n > 64 {
            return invalid("preorders are limited to 64 elements");
        }
        let mut seen = 0u64;
        for &c in &classes {
            if c == 0 {
                return invalid("empty class");
            }
            if c & seen != 0 {
                return invalid("classes overlap");
            }
            seen |= c;
        }
        if seen != full_set(n) {
            return invalid("classes do not cover the universe");
        }
        Ok(LinearPreorder { n, classes })
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &[Subset] {
        &self.classes
    }

    /// Class index of every element.
    pub fn index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for (i, &c) in self.classes.iter().enumerate() {
            for e in elements(c) {
                idx[e] = i;
            }
        }
        idx
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        let idx = self.index();
        idx[a] <= idx[b]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    Full,
    Empty,
    Cut,
}

/// A block spanning classes `first..=last`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub first: usize,
    pub last: usize,
}

pub(crate) fn class_state(class: Subset, y: Subset) -> BlockKind {
    if class & y == class {
        BlockKind::Full
    } else if class & y == 0 {
        BlockKind::Empty
    } else {
        BlockKind::Cut
    }
}

/// Maximal full intervals, maximal empty intervals and single cut classes.
pub fn blocks(p: &LinearPreorder, y: Subset) -> Vec<Block> {
    let mut out: Vec<Block> = Vec::new();
    for (i, &c) in p.classes().iter().enumerate() {
        let kind = class_state(c, y);
        match out.last_mut() {
            Some(b) if b.kind == kind && kind != BlockKind::Cut => b.last = i,
            _ => out.push(Block { kind, first: i, last: i }),
        }
    }
    out
}

/// Distinct-rows cut-rank of `x` in the ternary encoding, with tuples of length 3.
///
/// Same value as `matrix_ranks(type_matrix(ternary_encode(t), x, 3)).distinct_rows`,
/// computed directly from the least-common-ancestor table.
pub fn ternary_cut_rank(t: &LaminarTree, x: Subset) -> usize {
    let n = t.leaf_count();
    let full = full_set(n);
    let x = x & full;
    if x == 0 {
        return 0;
    }
    if x == full {
        return 1;
    }
    let lca = t.lca_masks();
    let rows = crate::rank::tuples_of(x, 3);
    let cols = crate::rank::tuples_of(full & !x, 3);
    let mut seen = std::collections::HashSet::new();
    let mut key: Vec<u64> = Vec::with_capacity(cols.len() * 5);
    let mut e = [0usize; 6];
    for r in &rows {
        key.clear();
        e[..3].copy_from_slice(r);
        for c in &cols {
            e[3..].copy_from_slice(c);
            let mut eq = 0u64;
            for i in 0..6 {
                let first = (0..i).find(|&j| e[j] == e[i]).unwrap_or(i);
                eq |= (first as u64) << (3 * i);
            }
            key.push(eq);
            let mut bits = [0u64; 4];
            let mut bit = 0;
            for i in 0..6 {
                for j in 0..6 {
                    let m = lca[e[i]][e[j]];
                    for &z in &e {
                        if m >> z & 1 == 1 {
                            bits[bit / 64] |= 1 << (bit % 64);
                        }
                        bit += 1;
                    }
                }
            }
            key.extend_from_slice(&bits);
        }
        seen.insert(key.clone());
    }
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::{matrix_ranks, type_matrix};

    fn caterpillar() -> LaminarTree {
        // ((0 1) 2)
        LaminarTree::new(3, &[1, 2, 4, 3, 7]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(validate_tree(3, &[1, 2, 4, 7]).is_ok());
        assert!(validate_tree(3, &[1, 2, 4]).is_err());
        assert!(validate_tree(3, &[1, 2, 4, 3, 6, 7]).is_err());
        assert!(validate_tree(3, &[1, 2, 4, 7, 3]).is_ok());
        assert!(LaminarTree::new(2, &[1, 2, 3]).is_ok());
        assert!(LaminarTree::new(1, &[1]).is_ok());
    }

    #[test]
    fn every_node_has_two_children() {
        // all singletons are members, so a node can never have a single child
        let t = LaminarTree::new(4, &[1, 2, 4, 8, 3, 7, 15]).unwrap();
        assert!(t.internal_nodes().all(|v| t.children(v).len() >= 2));
    }

    #[test]
    fn encode_two_leaves() {
        let s = ternary_encode(&LaminarTree::star(2));
        let expected: BTreeSet<Vec<usize>> = [vec![0, 0, 0], vec![1, 1, 1]]
            .into_iter()
            .chain((0..2).flat_map(|z| [vec![0, 1, z], vec![1, 0, z]]))
            .collect();
        assert_eq!(s.tuples(0), &expected);
        assert_eq!(ternary_decode(&s).unwrap(), LaminarTree::star(2));
    }

    #[test]
    fn encode_star() {
        let s = ternary_encode(&LaminarTree::star(3));
        assert!((0..3).all(|z| s.holds(0, &[0, 1, z])));
        assert!(s.holds(0, &[0, 0, 0]) && !s.holds(0, &[0, 0, 1]));
    }

    #[test]
    fn decode_rejects_non_encodings() {
        let bad = Structure::new(Vocabulary::new([("T", 3)]).unwrap(), 2, vec![vec![vec![0, 0, 0]]]).unwrap();
        assert!(ternary_decode(&bad).is_err());
    }

    #[test]
    fn subforests_examples() {
        assert_eq!(subforests(&LaminarTree::star(2)), vec![1, 2, 3]);
        assert_eq!(subforests(&LaminarTree::star(3)), (1..8).collect::<Vec<_>>());
        // ((0 1) 2): {0},{1},{0,1},{2},{0,1,2}; {1,2} and {0,2} are not sibling unions
        assert_eq!(subforests(&caterpillar()), vec![1, 2, 3, 4, 7]);
    }

    #[test]
    fn dull_and_interesting() {
        let t = LaminarTree::star(6);
        assert_eq!(interesting_analysis(&t, 0).chain, 0);
        // root of a star cut by three leaves: removing any child leaves a cut remainder
        let a = interesting_analysis(&t, 0b000111);
        assert_eq!(a.interesting, vec![0b111111]);
        assert_eq!((a.chain, a.siblings), (1, 0));
        // X = one full child of the root of ((0 1) 2): root dull
        let a = interesting_analysis(&caterpillar(), 0b011);
        assert!(a.interesting.is_empty());
    }

    #[test]
    fn boolean_costs() {
        let t = caterpillar();
        assert_eq!(min_boolean_combination(&t, 0, 4).unwrap(), BoolCost::Exact(0));
        assert_eq!(min_boolean_combination(&t, 7, 4).unwrap(), BoolCost::Exact(0));
        assert_eq!(min_boolean_combination(&t, 0b011, 4).unwrap(), BoolCost::Exact(1));
        // {1,2} = complement of {0}
        assert_eq!(min_boolean_combination(&t, 0b110, 4).unwrap(), BoolCost::Exact(1));
        // {0,2}: complement of {1}
        assert_eq!(min_boolean_combination(&t, 0b101, 4).unwrap(), BoolCost::Exact(1));
        assert!(min_boolean_combination(&t, 1, 5).is_err());
    }

    #[test]
    fn symmetric_difference_costs_at_most_two() {
        // ((0 1) (2 3)): {0} xor {0,1,2,3}... use {1} xor {2,3} = {1,2,3}
        let t = LaminarTree::from_nested(&Nested::unordered(vec![
            Nested::unordered(vec![Nested::Leaf(0), Nested::Leaf(1)]),
            Nested::unordered(vec![Nested::Leaf(2), Nested::Leaf(3)]),
        ]))
        .unwrap();
        let x = 0b0010 ^ 0b1100 ^ 0b0100;
        match min_boolean_combination(&t, x, 4).unwrap() {
            BoolCost::Exact(m) => assert!(m <= 2),
            BoolCost::Exceeded => panic!("expected a small cost"),
        }
    }

    #[test]
    fn document_order() {
        let all_unordered = PartiallyOrderedTree::unordered(LaminarTree::star(3));
        let rel = document_preorder(&all_unordered);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(rel[x][y], x == y);
            }
        }
        let ordered = PartiallyOrderedTree::from_nested(&Nested::ordered(vec![Nested::Leaf(1), Nested::Leaf(0)])).unwrap();
        let rel = document_preorder(&ordered);
        assert!(rel[1][0] && !rel[0][1]);
    }

    #[test]
    fn branching_examples() {
        assert_eq!(branching(&LaminarTree::star(1)), 0);
        assert_eq!(branching(&LaminarTree::complete_binary(3)), 3);
        assert_eq!(branching(&LaminarTree::star(5)), 1);
        assert_eq!(branching_brute_force(&LaminarTree::star(5)).unwrap(), 1);
        assert_eq!(branching_brute_force(&LaminarTree::complete_binary(2)).unwrap(), 2);
    }

    #[test]
    fn block_decompositions() {
        let p = LinearPreorder::new(6, vec![0b000011, 0b001100, 0b110000]).unwrap();
        assert_eq!(blocks(&p, 0), vec![Block { kind: BlockKind::Empty, first: 0, last: 2 }]);
        assert_eq!(blocks(&p, 0b111111), vec![Block { kind: BlockKind::Full, first: 0, last: 2 }]);
        let kinds: Vec<BlockKind> = blocks(&p, 0b000111).iter().map(|b| b.kind).collect();
        assert_eq!(kinds, vec![BlockKind::Full, BlockKind::Cut, BlockKind::Empty]);
        assert!(LinearPreorder::new(2, vec![1]).is_err());
    }

    #[test]
    fn fast_ternary_rank_matches_type_matrix() {
        for t in [caterpillar(), LaminarTree::star(4), LaminarTree::complete_binary(2)] {
            let s = ternary_encode(&t);
            for x in 0..1u64 << t.leaf_count() {
                let slow = matrix_ranks(&type_matrix(&s, x, 3).unwrap()).distinct_rows;
                assert_eq!(ternary_cut_rank(&t, x), slow, "tree {} subset {x:#b}", t.to_sexpr());
            }
        }
    }
}
