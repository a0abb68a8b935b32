//! Type-matrix ranks and GF(2) cut-rank on a few graphs.
//!
//! cargo run --example cut_rank

use rankmat::rank::{graph_cut_rank, matrix_ranks, type_matrix, Graph};

fn main() -> rankmat::Result<()> {
    let p6 = Graph::path(6);
    let s = p6.to_structure();
    let x = 0b000111;
    for m in 1..=2 {
        let r = matrix_ranks(&type_matrix(&s, x, m)?);
        println!(
            "P6, X = {{0,1,2}}, m = {m}: distinct rows {}, distinct cols {}, rank over GF({}) {}",
            r.distinct_rows, r.distinct_cols, r.prime, r.field_rank
        );
    }

    for (name, g) in [("P8", Graph::path(8)), ("C8", Graph::cycle(8)), ("K8", Graph::clique(8)), ("grid4x4", Graph::grid(4, 4))] {
        let n = g.vertex_count();
        let max = (0..1u64 << n).map(|x| graph_cut_rank(&g, x)).max().unwrap_or(0);
        println!("{name}: largest cut-rank over all subsets = {max}");
    }

    // the grid: cut-rank of a k x k corner against its size
    let g = Graph::grid(4, 4);
    for k in 1..=3 {
        let corner = (0..k).flat_map(|r| (0..k).map(move |c| r * 4 + c)).fold(0u64, |a, v| a | 1 << v);
        println!("grid4x4 corner {k}x{k}: cut-rank {}", graph_cut_rank(&g, corner));
    }
    Ok(())
}
