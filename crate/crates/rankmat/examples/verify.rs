//! Runs the verification suites and prints one summary line each.
//!
//! cargo run --release --example verify [suite ...]

use rankmat::suites::{run_suite, suite_names};

fn main() -> rankmat::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<&str> = if args.is_empty() { suite_names() } else { args.iter().map(String::as_str).collect() };
    let mut all_pass = true;
    for name in names {
        let o = run_suite(name)?;
        all_pass &= o.passed();
        let summary = o.summary().map(|r| r.data.to_string()).unwrap_or_default();
        println!("{:<5} {name:<17} {:>6.1}s {summary}", if o.passed() { "pass" } else { "FAIL" }, o.seconds);
    }
    if !all_pass {
        std::process::exit(1);
    }
    Ok(())
}
