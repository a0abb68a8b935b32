//! Exhaustive rank-width of small graphs and structures.
//!
//! cargo run --example rankwidth

use rankmat::formats::write_tree;
use rankmat::rank::{Graph, RankMeasure};
use rankmat::structures::Structure;
use rankmat::trees::{rankwidth, PartiallyOrderedTree, TreeSearch};

fn main() -> rankmat::Result<()> {
    for (name, g) in [("P6", Graph::path(6)), ("C6", Graph::cycle(6)), ("K5", Graph::clique(5)), ("grid2x3", Graph::grid(2, 3))] {
        let s = g.to_structure();
        let (w, t) = rankwidth(&s, RankMeasure::GraphCut, TreeSearch::Binary)?;
        println!("{name}: rank-width {w}, witness {}", write_tree(&PartiallyOrderedTree::unordered(t), None).trim_end());
    }

    // a directed cycle under the distinct-rows measure
    let s = Structure::binary(5, (0..5).map(|i| (i, (i + 1) % 5)))?;
    for m in 1..=2 {
        let (w, _) = rankwidth(&s, RankMeasure::DistinctRows { m }, TreeSearch::Any)?;
        println!("directed C5, m = {m}: width {w}");
    }
    Ok(())
}
