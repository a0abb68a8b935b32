//! One pass/fail line per acceptance criterion.

use rankmat::suites::{run_suite, Status};

const CRITERIA: [(&str, &str); 14] = [
    ("path-bound", "paths up to 12 vertices: connected subsets have cut-rank <= 2"),
    ("clique-edgeless", "cliques up to 8: rank <= 1; edgeless graphs: rank 0"),
    ("grid-sandwich", "3x3 and 4x4 grids, |X| <= n^2/2: ceil(sqrt|X|)-1 <= rank <= |X|"),
    ("rank-variants", "binary structures <= 4 elements: rank sandwiches and transposition duality"),
    ("ef-bound", "monadic structures <= 4 elements: rows(M_{d+1,1}) <= 2^rows(M_{d,2}), d in {0,1}"),
    ("trees", "trees <= 7 leaves: encoding round trip; shapes x subsets: chain bound, subforest cost 1"),
    ("orientation", "shapes <= 9 leaves: Z_4 orientations verified, two-star blocks Z_3"),
    ("semigroups", "semigroup corpus: identities and settling counts iff almost commutative, frozen counts"),
    ("finitary", "A^2 = A: finite order of the generator matrices implies almost commutative"),
    ("two-by-two", "corpus monoids: [[1,b],[c,d]] claim consistent"),
    ("kronecker", "500 seeded products: rows multiply, equivalence is a congruence"),
    ("recovery", "200 unordered and 100 ordered (d = 4) oracles recovered exactly"),
    ("compositionality", "structures <= 4 elements x set partitions: tables compose"),
    ("rank-decreasing", "identity pairs are diagonal; K8 -> P8 raises a rank-1 subset"),
];

fn main() {
    // `cargo test --test acceptance -- trees kronecker` runs a subset
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, text)) in CRITERIA.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| o == name) {
            continue;
        }
        ran += 1;
        let (ok, detail) = match run_suite(name) {
            Ok(outcome) => {
                let summary = outcome.summary().map(|r| r.data.to_string()).unwrap_or_default();
                for r in outcome.reports.iter().filter(|r| r.status == Status::Fail && r.instance != "summary") {
                    println!("      witness {}: {}", r.instance, r.data);
                }
                (outcome.passed(), format!("{:.1}s {summary}", outcome.seconds))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!("{} {:>2} {name}: {text} [{detail}]", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
