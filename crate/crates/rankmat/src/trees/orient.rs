use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::LaminarTree;
use crate::error::{invalid, Result};

/// Leaf colouring in `Z_modulus` with a designated left and right child per internal node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub modulus: u32,
    /// Colour of each leaf.
    pub colours: Vec<u32>,
    /// Sum of leaf colours below each node, by node index.
    pub sums: Vec<u32>,
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrientationOutcome {
    Oriented(Orientation),
    /// No colouring of the subtree at `node` gives every internal node two
    /// children with sibling-unique sums.
    Obstruction { node: usize },
}

/// Counts per residue capped at 2, packed base 3, plus the running sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    counts: u32,
    sum: u32,
}

fn count_of(counts: u32, r: u32, pow3: &[u32]) -> u32 {
    counts / pow3[r as usize] % 3
}

fn add(st: State, r: u32, m: u32, pow3: &[u32]) -> State {
    let c = count_of(st.counts, r, pow3);
    State {
        counts: if c < 2 { st.counts + pow3[r as usize] } else { st.counts },
        sum: (st.sum + r) % m,
    }
}

fn unique_residues(counts: u32, m: u32, pow3: &[u32]) -> usize {
    (0..m).filter(|&r| count_of(counts, r, pow3) == 1).count()
}

/// Per-node table of reachable states after each prefix of the children.
struct NodeTable {
    stages: Vec<BTreeSet<State>>,
    achievable: BTreeSet<u32>,
}

/// Finds a colouring in which every internal node has at least two children
/// whose sums are unique among their siblings.
///
/// Achievable subtree sums are computed bottom up; the assignment is then
/// built top down, always taking the least feasible value, so the result is
/// deterministic. Moduli from 3 to 8 are supported.
pub fn group_orientation(t: &LaminarTree, modulus: u32) -> Result<OrientationOutcome> {
    if !(3..=8).contains(&modulus) {
        return invalid("orientation modulus must be between 3 and 8");
    }
    let m = modulus;
    let pow3: Vec<u32> = (0..m).map(|i| 3u32.pow(i)).collect();
    let mut achievable: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); t.node_count()];
    let mut tables: BTreeMap<usize, NodeTable> = BTreeMap::new();
    for v in t.post_order() {
        if t.is_leaf(v) {
            achievable[v] = (0..m).collect();
            continue;
        }
        let mut stages = vec![BTreeSet::from([State { counts: 0, sum: 0 }])];
        for &c in t.children(v) {
            let prev = stages.last().expect("nonempty");
            let mut next = BTreeSet::new();
            for &st in prev {
                for &r in &achievable[c] {
                    next.insert(add(st, r, m, &pow3));
                }
            }
            stages.push(next);
        }
        let sums: BTreeSet<u32> = stages
            .last()
            .expect("nonempty")
            .iter()
            .filter(|st| unique_residues(st.counts, m, &pow3) >= 2)
            .map(|st| st.sum)
            .collect();
        if sums.is_empty() {
            return Ok(OrientationOutcome::Obstruction { node: v });
        }
        achievable[v] = sums.clone();
        tables.insert(v, NodeTable { stages, achievable: sums });
    }

    let mut target = vec![0u32; t.node_count()];
    let root = t.root();
    target[root] = if t.is_leaf(root) {
        0
    } else {
        *tables[&root].achievable.iter().next().expect("nonempty")
    };
    // parents precede children in index order
    for v in 0..t.node_count() {
        if t.is_leaf(v) {
            continue;
        }
        let table = &tables[&v];
        let children = t.children(v);
        let last = table
            .stages
            .last()
            .expect("nonempty")
            .iter()
            .find(|st| st.sum == target[v] && unique_residues(st.counts, m, &pow3) >= 2)
            .copied()
            .expect("target sum is achievable");
        let mut cur = last;
        for i in (0..children.len()).rev() {
            let c = children[i];
            let prev_stage = &table.stages[i];
            let (r, prev) = achievable[c]
                .iter()
                .find_map(|&r| {
                    let count = count_of(cur.counts, r, &pow3);
                    if count == 0 {
                        return None;
                    }
                    let sum = (cur.sum + m - r) % m;
                    let mut options = vec![State {
                        counts: cur.counts - pow3[r as usize],
                        sum,
                    }];
                    if count == 2 {
                        options.push(State { counts: cur.counts, sum });
                    }
                    options.into_iter().find(|p| prev_stage.contains(p)).map(|p| (r, p))
                })
                .expect("backtracking follows a reachable path");
            target[c] = r;
            cur = prev;
        }
    }

    let colours: Vec<u32> = (0..t.leaf_count()).map(|l| target[t.leaf_node(l)]).collect();
    Ok(OrientationOutcome::Oriented(orientation_from_colours(t, m, colours)))
}

fn sums_from_colours(t: &LaminarTree, m: u32, colours: &[u32]) -> Vec<u32> {
    let mut sums = vec![0u32; t.node_count()];
    for v in t.post_order() {
        sums[v] = if t.is_leaf(v) {
            colours[t.node(v).trailing_zeros() as usize] % m
        } else {
            t.children(v).iter().map(|&c| sums[c]).sum::<u32>() % m
        };
    }
    sums
}

/// Children of `v` whose sums occur once among the siblings, ordered by (sum, index).
fn unique_children(t: &LaminarTree, sums: &[u32], v: usize) -> Vec<usize> {
    let ch = t.children(v);
    let mut out: Vec<usize> = ch
        .iter()
        .copied()
        .filter(|&c| ch.iter().filter(|&&d| sums[d] == sums[c]).count() == 1)
        .collect();
    out.sort_by_key(|&c| (sums[c], c));
    out
}

/// Sums and left/right designations induced by a colouring; left/right stay
/// `None` at nodes with fewer than two unique-sum children.
pub(crate) fn orientation_from_colours(t: &LaminarTree, m: u32, colours: Vec<u32>) -> Orientation {
    let sums = sums_from_colours(t, m, &colours);
    let mut left = vec![None; t.node_count()];
    let mut right = vec![None; t.node_count()];
    for v in t.internal_nodes() {
        let u = unique_children(t, &sums, v);
        if u.len() >= 2 {
            left[v] = Some(u[0]);
            right[v] = Some(u[1]);
        }
    }
    Orientation {
        modulus: m,
        colours,
        sums,
        left,
        right,
    }
}

/// Recomputes sums from the colours and checks every designation.
pub fn verify_orientation(t: &LaminarTree, o: &Orientation) -> bool {
    if o.colours.len() != t.leaf_count() || o.sums.len() != t.node_count() || o.modulus == 0 {
        return false;
    }
    if o.colours.iter().any(|&c| c >= o.modulus) {
        return false;
    }
    let sums = sums_from_colours(t, o.modulus, &o.colours);
    if sums != o.sums {
        return false;
    }
    for v in 0..t.node_count() {
        if t.is_leaf(v) {
            if o.left[v].is_some() || o.right[v].is_some() {
                return false;
            }
            continue;
        }
        let u = unique_children(t, &sums, v);
        let (Some(l), Some(r)) = (o.left[v], o.right[v]) else {
            return false;
        };
        if u.len() < 2 || l == r || !u.contains(&l) || !u.contains(&r) {
            return false;
        }
    }
    true
}

/// Starting at the left child of `node`, follows right children down to a leaf.
pub fn chosen_leaf(t: &LaminarTree, o: &Orientation, node: usize) -> Result<usize> {
    if node >= t.node_count() || t.is_leaf(node) {
        return invalid("chosen leaf needs a non-leaf node");
    }
    let mut v = o.left[node].ok_or_else(|| crate::error::Error::Invalid("node has no left child".into()))?;
    while !t.is_leaf(v) {
        v = o.right[v].ok_or_else(|| crate::error::Error::Invalid("node has no right child".into()))?;
    }
    Ok(t.node(v).trailing_zeros() as usize)
}

/// Exhaustive oracle: does any colouring in `Z_m` satisfy the uniqueness condition?
#[cfg(test)]
pub(crate) fn exists_colouring(t: &LaminarTree, m: u32) -> bool {
    let n = t.leaf_count();
    let total = (m as u64).pow(n as u32);
    (0..total).any(|code| {
        let mut c = code;
        let colours: Vec<u32> = (0..n)
            .map(|_| {
                let r = (c % m as u64) as u32;
                c /= m as u64;
                r
            })
            .collect();
        let o = orientation_from_colours(t, m, colours);
        verify_orientation(t, &o)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{all_trees, shapes, Nested};

    fn two_star() -> LaminarTree {
        let star = |a: usize| Nested::unordered((a..a + 3).map(Nested::Leaf).collect());
        LaminarTree::from_nested(&Nested::unordered(vec![star(0), star(3)])).unwrap()
    }

    #[test]
    fn single_leaf() {
        let t = LaminarTree::star(1);
        let OrientationOutcome::Oriented(o) = group_orientation(&t, 3).unwrap() else {
            panic!("single leaf orients");
        };
        assert!(verify_orientation(&t, &o));
    }

    #[test]
    fn two_leaves_get_distinct_colours() {
        let t = LaminarTree::star(2);
        let OrientationOutcome::Oriented(o) = group_orientation(&t, 3).unwrap() else {
            panic!("two leaves orient");
        };
        assert_ne!(o.colours[0], o.colours[1]);
        assert!(verify_orientation(&t, &o));
        assert!(chosen_leaf(&t, &o, 0).is_ok());
    }

    #[test]
    fn two_star_needs_four_colours() {
        let t = two_star();
        assert_eq!(group_orientation(&t, 3).unwrap(), OrientationOutcome::Obstruction { node: 0 });
        assert!(!exists_colouring(&t, 3));
        assert!(matches!(group_orientation(&t, 4).unwrap(), OrientationOutcome::Oriented(_)));
        assert!(exists_colouring(&t, 4));
    }

    #[test]
    fn dp_agrees_with_exhaustive_search() {
        for n in 1..=5 {
            for t in all_trees(n) {
                for m in [3, 4] {
                    let got = group_orientation(&t, m).unwrap();
                    match &got {
                        OrientationOutcome::Oriented(o) => assert!(verify_orientation(&t, o)),
                        OrientationOutcome::Obstruction { .. } => {}
                    }
                    assert_eq!(matches!(got, OrientationOutcome::Oriented(_)), exists_colouring(&t, m));
                }
            }
        }
    }

    #[test]
    fn chosen_leaves_are_injective() {
        for n in 2..=7 {
            for t in shapes(n) {
                let OrientationOutcome::Oriented(o) = group_orientation(&t, 4).unwrap() else {
                    panic!("modulus 4 orients {}", t.to_sexpr());
                };
                let leaves: Vec<usize> = t.internal_nodes().map(|v| chosen_leaf(&t, &o, v).unwrap()).collect();
                let distinct: BTreeSet<_> = leaves.iter().collect();
                assert_eq!(distinct.len(), leaves.len());
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let t = LaminarTree::star(3);
        assert!(group_orientation(&t, 2).is_err());
        let OrientationOutcome::Oriented(o) = group_orientation(&t, 4).unwrap() else {
            panic!()
        };
        assert!(chosen_leaf(&t, &o, t.leaf_node(0)).is_err());
    }
}
