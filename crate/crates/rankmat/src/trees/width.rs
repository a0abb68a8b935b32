use serde::{Deserialize, Serialize};

use super::{all_trees, binary_trees, LaminarTree};
use crate::caps::Caps;
use crate::error::{check_cap, invalid, Result};
use crate::rank::{Graph, RankMeasure};
use crate::structures::{elements, full_set, Structure};

/// Which trees the width search ranges over.
///
/// `Any` allows nodes of any degree. Since the star is always available
/// there, its width is the largest singleton rank; `Binary` gives the usual
/// rank-width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeSearch {
    Any,
    Binary,
}

/// Minimum over trees on the universe of the largest node rank, with the
/// first optimal tree in enumeration order.
pub fn rankwidth(s: &Structure, measure: RankMeasure, search: TreeSearch) -> Result<(usize, LaminarTree)> {
    let n = s.universe_size();
    if n == 0 {
        return invalid("rankwidth needs a nonempty universe");
    }
    check_cap("rankwidth leaves", n as u128, Caps::get().rankwidth_leaves as u128)?;
    let prepared = measure.prepare(s)?;
    let ranks = (0..=full_set(n)).map(|x| prepared.rank(x)).collect::<Result<Vec<usize>>>()?;
    let trees = match search {
        TreeSearch::Any => all_trees(n),
        TreeSearch::Binary => binary_trees(n),
    };
    let mut best: Option<(usize, LaminarTree)> = None;
    for t in trees {
        let w = t.nodes().iter().map(|&x| ranks[x as usize]).max().unwrap_or(0);
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, t));
        }
    }
    Ok(best.expect("at least one tree"))
}

/// Largest adhesion: over all nodes `X`, the number of vertices outside `X`
/// adjacent to `X`.
pub fn decomposition_width(g: &Graph, t: &LaminarTree) -> Result<usize> {
    if g.vertex_count() != t.leaf_count() {
        return invalid(format!(
            "tree has {} leaves but the graph has {} vertices",
            t.leaf_count(),
            g.vertex_count()
        ));
    }
    Ok(t
        .nodes()
        .iter()
        .map(|&x| {
            let nb = elements(x).fold(0, |acc, v| acc | g.neighbours(v));
            (nb & !x).count_ones() as usize
        })
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_widths() {
        let gc = RankMeasure::GraphCut;
        assert_eq!(rankwidth(&Graph::edgeless(4).to_structure(), gc, TreeSearch::Binary).unwrap().0, 0);
        assert_eq!(rankwidth(&Graph::clique(5).to_structure(), gc, TreeSearch::Binary).unwrap().0, 1);
        assert_eq!(rankwidth(&Graph::path(4).to_structure(), gc, TreeSearch::Binary).unwrap().0, 1);
        assert_eq!(rankwidth(&Graph::cycle(5).to_structure(), gc, TreeSearch::Binary).unwrap().0, 2);
        // the star already achieves the largest singleton rank
        assert_eq!(rankwidth(&Graph::cycle(5).to_structure(), gc, TreeSearch::Any).unwrap().0, 1);
    }

    #[test]
    fn width_cap() {
        assert!(rankwidth(&Graph::path(8).to_structure(), RankMeasure::GraphCut, TreeSearch::Any).is_err());
    }

    #[test]
    fn adhesion() {
        let single = Graph::edgeless(1);
        assert_eq!(decomposition_width(&single, &LaminarTree::star(1)).unwrap(), 0);
        // left comb ((((0 1) 2) 3)
        let comb = LaminarTree::new(4, &[1, 2, 4, 8, 3, 7, 15]).unwrap();
        // leaves count as subtrees, so an inner path vertex already has adhesion 2
        assert_eq!(decomposition_width(&Graph::path(4), &comb).unwrap(), 2);
        assert_eq!(decomposition_width(&Graph::path(2), &LaminarTree::star(2)).unwrap(), 1);
        let k4 = Graph::clique(4);
        assert_eq!(decomposition_width(&k4, &comb).unwrap(), 3);
        assert_eq!(decomposition_width(&k4, &LaminarTree::star(4)).unwrap(), 3);
        assert!(decomposition_width(&k4, &LaminarTree::star(3)).is_err());
    }
}
