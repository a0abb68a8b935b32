//! Writes one sample input file per text format into a directory, ready
//! for the `rankmat` binary.
//!
//! cargo run --example fixtures -- /tmp/rankmat-samples

use std::path::PathBuf;

use rankmat::enumerate::random_unordered_oracle;
use rankmat::formats::{write_hypergraph, write_matrix, write_oracle, write_semigroup, write_structure};
use rankmat::kronecker::Hypergraph;
use rankmat::rank::Graph;
use rankmat::semigroup::FiniteSemigroup;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "rankmat-samples".into()));
    std::fs::create_dir_all(&dir)?;
    let brandt = FiniteSemigroup::brandt(2);
    let z2 = std::sync::Arc::new(FiniteSemigroup::cyclic_group(2));
    let m = rankmat::kronecker::SemigroupMatrix::over(z2.clone(), vec![vec![0, 1], vec![1, 0]])?;
    let files = [
        ("p4.struct", write_structure(&Graph::path(4).to_structure())),
        ("grid3x3.struct", write_structure(&Graph::grid(3, 3).to_structure())),
        ("two-star.tree", "(u (u a b c) (u d e f))\n".to_string()),
        ("doc.tree", "(o (u a b) c (o d e))\n".to_string()),
        ("brandt2.sgp", write_semigroup(&brandt)),
        ("z2.sgp", write_semigroup(&z2)),
        ("swap.mat", write_matrix(&m, Some("z2.sgp"))),
        ("parity.hyp", write_hypergraph(&Hypergraph::new(2, 2, vec![0, 1, 1, 0])?)),
        ("sample.orc", write_oracle(&random_unordered_oracle(5)?)),
    ];
    for (name, text) in files {
        std::fs::write(dir.join(name), text)?;
        println!("wrote {}", dir.join(name).display());
    }
    Ok(())
}
