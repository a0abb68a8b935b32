//! Laminar trees: encoding as a ternary structure, subforests, interesting
//! nodes and Z_m orientations.
//!
//! cargo run --example trees

use rankmat::formats::{parse_tree, write_tree};
use rankmat::trees::{
    all_trees, chosen_leaf, group_orientation, interesting_analysis, min_boolean_combination, shapes, subforests,
    ternary_cut_rank, ternary_decode, ternary_encode, OrientationOutcome, PartiallyOrderedTree,
};

fn main() -> rankmat::Result<()> {
    let (t, names) = parse_tree("(u (u a b c) (u d e f))")?;
    let tree = &t.tree;
    println!("tree {}", write_tree(&t, Some(&names)).trim_end());

    let enc = ternary_encode(tree);
    println!("ternary encoding has {} triples; decodes back: {}", enc.tuples(0).len(), ternary_decode(&enc)? == *tree);
    println!("{} subforests", subforests(tree).len());

    for x in [0b000011u64, 0b001001, 0b010101] {
        let a = interesting_analysis(tree, x);
        println!(
            "X = {x:06b}: ternary cut-rank {}, interesting chain {}, subforest cost {:?}",
            ternary_cut_rank(tree, x),
            a.chain,
            min_boolean_combination(tree, x, 4)?
        );
    }

    for m in [3, 4] {
        match group_orientation(tree, m)? {
            OrientationOutcome::Oriented(o) => {
                let chosen: Vec<&str> = tree
                    .internal_nodes()
                    .map(|v| chosen_leaf(tree, &o, v).map(|l| names[l].as_str()))
                    .collect::<rankmat::Result<_>>()?;
                println!("Z_{m}: colours {:?}, chosen leaves {chosen:?}", o.colours);
            }
            OrientationOutcome::Obstruction { node } => {
                println!("Z_{m}: no orientation, blocked at node {node}");
            }
        }
    }

    for n in 1..=7 {
        println!("{n} leaves: {} labelled trees, {} shapes", all_trees(n).len(), shapes(n).len());
    }
    let s = shapes(5).pop().expect("shapes exist");
    println!("one 5-leaf shape: {}", write_tree(&PartiallyOrderedTree::unordered(s), None).trim_end());
    Ok(())
}
