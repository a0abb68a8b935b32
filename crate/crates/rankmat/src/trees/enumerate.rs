use std::collections::HashMap;

use super::LaminarTree;
use crate::structures::{full_set, Subset};

/// Number of labeled trees without unary nodes on `n` leaves.
pub fn tree_count(n: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut binom = vec![vec![0u128; n + 1]; n + 1];
    for i in 0..=n {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
        }
    }
    // t[k]: trees on k leaves; f[k]: forests (set partitions into trees) on k leaves.
    let mut t = vec![0u128; n + 1];
    let mut f = vec![0u128; n + 1];
    f[0] = 1;
    t[1] = 1;
    f[1] = 1;
    for m in 2..=n {
        // forests with at least two trees, grouped by the block of the first leaf
        t[m] = (1..m).map(|k| binom[m - 1][k - 1] * t[k] * f[m - k]).sum();
        f[m] = 2 * t[m];
    }
    t[n]
}

/// Set partitions of `set`, each listed by the block of its lowest element first.
fn set_partitions(set: Subset, max_blocks: usize) -> Vec<Vec<Subset>> {
    if set == 0 {
        return vec![Vec::new()];
    }
    if max_blocks == 0 {
        return Vec::new();
    }
    let low = set & set.wrapping_neg();
    let rest = set & !low;
    let mut out = Vec::new();
    // blocks containing `low`: low | any subset of rest
    let mut sub = rest;
    loop {
        let block = low | sub;
        for mut tail in set_partitions(set & !block, max_blocks - 1) {
            tail.insert(0, block);
            out.push(tail);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    out
}

fn families(set: Subset, binary: bool, memo: &mut HashMap<Subset, Vec<Vec<Subset>>>) -> Vec<Vec<Subset>> {
    if let Some(v) = memo.get(&set) {
        return v.clone();
    }
    let result = if set.count_ones() == 1 {
        vec![vec![set]]
    } else {
        let mut out = Vec::new();
        let max_blocks = if binary { 2 } else { usize::MAX };
        for parts in set_partitions(set, max_blocks) {
            if parts.len() < 2 {
                continue;
            }
            let mut acc: Vec<Vec<Subset>> = vec![vec![set]];
            for &p in &parts {
                let subs = families(p, binary, memo);
                let mut next = Vec::with_capacity(acc.len() * subs.len());
                for a in &acc {
                    for s in &subs {
                        let mut u = a.clone();
                        u.extend_from_slice(s);
                        next.push(u);
                    }
                }
                acc = next;
            }
            out.extend(acc);
        }
        out
    };
    memo.insert(set, result.clone());
    result
}

/// Every labeled tree without unary nodes on leaves `0..n`, in a fixed order.
pub fn all_trees(n: usize) -> Vec<LaminarTree> {
    if n == 0 {
        return Vec::new();
    }
    families(full_set(n), false, &mut HashMap::new())
        .into_iter()
        .map(|f| LaminarTree::new(n, &f).expect("enumerated family is a tree"))
        .collect()
}

/// Every labeled tree on leaves `0..n` whose internal nodes have exactly two children.
pub fn binary_trees(n: usize) -> Vec<LaminarTree> {
    if n == 0 {
        return Vec::new();
    }
    families(full_set(n), true, &mut HashMap::new())
        .into_iter()
        .map(|f| LaminarTree::new(n, &f).expect("enumerated family is a tree"))
        .collect()
}

/// Shapes: children given as indices into the per-size shape lists.
#[derive(Clone)]
struct Shape {
    children: Vec<(usize, usize)>,
}

fn shape_table(n: usize) -> Vec<Vec<Shape>> {
    let mut table: Vec<Vec<Shape>> = vec![Vec::new(); n + 1];
    if n == 0 {
        return table;
    }
    table[1].push(Shape { children: Vec::new() });
    for size in 2..=n {
        let mut out = Vec::new();
        // children in non-increasing (size, index) order
        fn pick(
            table: &[Vec<Shape>],
            remaining: usize,
            bound: (usize, usize),
            cur: &mut Vec<(usize, usize)>,
            out: &mut Vec<Shape>,
        ) {
            if remaining == 0 {
                if cur.len() >= 2 {
                    out.push(Shape { children: cur.clone() });
                }
                return;
            }
            for s in (1..=remaining.min(bound.0)).rev() {
                let top = if s == bound.0 { bound.1 + 1 } else { table[s].len() };
                for i in (0..top.min(table[s].len())).rev() {
                    cur.push((s, i));
                    pick(table, remaining - s, (s, i), cur, out);
                    cur.pop();
                }
            }
        }
        // a single child of full size is excluded by the bound
        pick(&table, size, (size - 1, usize::MAX - 1), &mut Vec::new(), &mut out);
        table[size] = out;
    }
    table
}

/// One tree per isomorphism class of unlabeled trees without unary nodes on
/// `n` leaves, with leaves numbered left to right.
pub fn shapes(n: usize) -> Vec<LaminarTree> {
    let table = shape_table(n);
    if n == 0 {
        return Vec::new();
    }
    fn realize(table: &[Vec<Shape>], size: usize, idx: usize, start: usize, family: &mut Vec<Subset>) {
        family.push(full_set(size) << start);
        let mut offset = start;
        for &(s, i) in &table[size][idx].children {
            realize(table, s, i, offset, family);
            offset += s;
        }
    }
    (0..table[n].len())
        .map(|i| {
            let mut family = Vec::new();
            realize(&table, n, i, 0, &mut family);
            LaminarTree::new(n, &family).expect("shape is a tree")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_counts() {
        let expected = [1u128, 1, 4, 26, 236, 2752, 39208, 660032, 12818912];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(tree_count(i + 1), e);
        }
        for n in 1..=6 {
            assert_eq!(all_trees(n).len() as u128, tree_count(n));
        }
    }

    #[test]
    fn binary_counts() {
        // (2n-3)!!
        let expected = [1usize, 1, 3, 15, 105, 945];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(binary_trees(i + 1).len(), e);
        }
    }

    #[test]
    fn shape_counts() {
        let expected = [1usize, 1, 2, 5, 12, 33, 90, 261, 766];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(shapes(i + 1).len(), e);
        }
    }

    #[test]
    fn enumerations_are_distinct() {
        let trees = all_trees(5);
        let set: std::collections::HashSet<_> = trees.iter().map(|t| t.nodes().to_vec()).collect();
        assert_eq!(set.len(), trees.len());
    }
}
