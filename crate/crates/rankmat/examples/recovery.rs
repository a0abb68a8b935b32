//! Recovering a hidden partition and a hidden linear preorder from
//! approximation oracles.
//!
//! cargo run --example recovery

use rankmat::enumerate::{random_ordered_oracle, random_unordered_oracle};
use rankmat::formats::write_oracle;
use rankmat::recovery::{
    maximal_seed, recover_partition, recover_preorder_with, synth_oracle, validate_oracle, HiddenGuess, OracleKind,
    Search, SynthOptions,
};

fn show(classes: &[u64]) -> String {
    let parts: Vec<String> = classes
        .iter()
        .map(|&c| (0..64).filter(|i| c >> i & 1 == 1).map(|i| i.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!("{{{}}}", parts.join("} {"))
}

fn main() -> rankmat::Result<()> {
    let classes = vec![0b0000_0111, 0b0011_1000, 0b1100_0000];
    let o = synth_oracle(OracleKind::Unordered, 8, classes.clone(), 2, 11, SynthOptions::default())?;
    let v = validate_oracle(&o);
    println!("oracle over 8 elements: valid {}, homogeneous {}", v.valid(), v.homogeneous());
    print!("{}", write_oracle(&o));
    let (seed, special) = maximal_seed(&o)?;
    println!("maximal seed {:b} with special classes {special:?}", seed.set);
    println!("hidden    {}", show(&classes));
    println!("recovered {}", show(&recover_partition(&o)?));

    let mut exact = 0;
    for s in 0..50 {
        let o = random_unordered_oracle(s)?;
        let mut got = recover_partition(&o)?;
        let mut want = o.hidden_classes().to_vec();
        got.sort_unstable();
        want.sort_unstable();
        exact += usize::from(got == want);
    }
    println!("random unordered oracles recovered exactly: {exact}/50");

    for s in 0..5 {
        let o = random_ordered_oracle(s)?;
        let r = recover_preorder_with(&o, o.k(), &HiddenGuess::new(&o), Search::Auto)?;
        println!(
            "ordered oracle {s}: {} classes over {} elements via {:?}, exact {}",
            o.hidden_classes().len(),
            o.universe_size(),
            r.route,
            r.preorder.classes() == o.hidden_classes()
        );
    }
    Ok(())
}
