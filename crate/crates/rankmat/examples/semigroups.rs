//! Finite semigroups: identities, Green's relations and syntactic class counts.
//!
//! cargo run --example semigroups

use rankmat::semigroup::{
    counts_grow, counts_settle, curated_semigroups, green, identity_suite, is_almost_commutative, omega,
    syntactic_class_count,
};

fn main() -> rankmat::Result<()> {
    for (name, s) in curated_semigroups() {
        let counts = (1..=4)
            .map(|k| syntactic_class_count(&s, k, 100_000))
            .collect::<rankmat::Result<Vec<_>>>()?;
        let shown: Vec<String> = counts.iter().map(|c| c.value().map_or("cap".into(), |v| v.to_string())).collect();
        let ac = is_almost_commutative(&s);
        let trend = if counts_settle(&counts) {
            "settle"
        } else if counts_grow(&counts) {
            "grow"
        } else {
            "neither"
        };
        println!(
            "{name:<18} size {} omega {} almost commutative {:<5} counts k=1..4 [{}] {trend}",
            s.size(),
            omega(&s),
            ac.holds,
            shown.join(", ")
        );
        if !ac.holds {
            let failing: Vec<_> = identity_suite(&s).identities.into_iter().filter(|i| !i.holds).map(|i| i.name).collect();
            if failing.is_empty() {
                println!("{:<18} every identity in the suite still holds", "");
            } else {
                println!("{:<18} failing identities: {}", "", failing.join(", "));
            }
        }
    }

    let (_, b) = curated_semigroups().into_iter().find(|(n, _)| n == "brandt2").expect("curated");
    let g = green(&b);
    println!("brandt2 J-classes {:?}, H-classes {:?}", g.j_class, g.h_class);
    Ok(())
}
