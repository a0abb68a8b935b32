//! Verification suites over enumerated small instances.
//!
//! Each suite yields one [`Report`] per failing instance (at most
//! [`FAILURE_LIMIT`] kept, all counted) followed by a summary report whose
//! instance is `summary`.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::enumerate::{
    all_trees, binary_structures, intervals, monadic_from_mask, monadic_orbit_masks, random_ordered_oracle, random_unordered_oracle,
    semigroup_corpus, set_partitions, shapes,
};
use crate::error::{invalid, Result};
use crate::formats::{write_matrix, write_oracle, write_semigroup, write_structure, write_tree};
use crate::kronecker::{equivalent, kronecker_product, two_by_two_claim, SemigroupMatrix};
use crate::rank::{ef_bound_rows, graph_cut_rank, matrix_ranks, type_matrix, AtomicBasis, Graph, MonadicTypes};
use crate::recovery::{rank_decreasing_report, recover_partition, recover_preorder};
use crate::semigroup::{
    counts_grow, counts_settle, finitary_generator_check, identity_suite, is_almost_commutative, premise_checks,
    syntactic_class_count, FiniteSemigroup, SyntacticCount,
};
use crate::structures::{composition_tables, elements, full_set, Subset};
use crate::trees::{
    chosen_leaf, group_orientation, interesting_analysis, min_boolean_combination, subforests, ternary_cut_rank,
    ternary_decode, ternary_encode, verify_orientation, BoolCost, LaminarTree, Nested, OrientationOutcome,
    PartiallyOrderedTree,
};

pub const FAILURE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub instance: String,
    pub status: Status,
    pub data: Value,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub reports: Vec<Report>,
    pub seconds: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.status != Status::Fail)
    }

    pub fn summary(&self) -> Option<&Report> {
        self.reports.iter().find(|r| r.instance == "summary")
    }
}

struct Collector {
    check: &'static str,
    checked: u64,
    failed: u64,
    failures: Vec<Report>,
    notes: serde_json::Map<String, Value>,
}

impl Collector {
    fn new(check: &'static str) -> Self {
        Collector {
            check,
            checked: 0,
            failed: 0,
            failures: Vec::new(),
            notes: serde_json::Map::new(),
        }
    }

    fn check(&mut self, ok: bool, instance: impl FnOnce() -> (String, Value)) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < FAILURE_LIMIT {
                let (instance, data) = instance();
                self.failures.push(Report {
                    check: self.check.to_string(),
                    instance,
                    status: Status::Fail,
                    data,
                });
            }
        }
    }

    fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.notes.insert(key.to_string(), value.into());
    }

    fn finish(mut self) -> Vec<Report> {
        self.failures.sort_by(|a, b| a.instance.cmp(&b.instance));
        self.notes.insert("checked".into(), self.checked.into());
        self.notes.insert("failed".into(), self.failed.into());
        let status = if self.failed == 0 { Status::Pass } else { Status::Fail };
        self.failures.push(Report {
            check: self.check.to_string(),
            instance: "summary".into(),
            status,
            data: Value::Object(self.notes),
        });
        self.failures
    }
}

fn set_list(x: Subset) -> Vec<usize> {
    elements(x).collect()
}

pub fn path_bound() -> Result<Vec<Report>> {
    let mut c = Collector::new("path-bound");
    let mut max = 0;
    for n in 1..=12 {
        let g = Graph::path(n);
        for x in intervals(n) {
            let r = graph_cut_rank(&g, x);
            max = max.max(r);
            // exactly one crossing edge per interior end of the interval
            // a lone vertex has one row however many edges leave it
            let lo = x.trailing_zeros() as usize;
            let hi = 63 - x.leading_zeros() as usize;
            let crossing = (lo > 0) as usize + (hi + 1 < n) as usize;
            let want = if lo == hi { crossing.min(1) } else { crossing };
            c.check(r <= 2 && r == want, || {
                (format!("P{n}"), json!({"n": n, "subset": set_list(x), "rank": r, "expected": want}))
            });
        }
    }
    c.note("max_rank", max);
    Ok(c.finish())
}

pub fn clique_edgeless() -> Result<Vec<Report>> {
    let mut c = Collector::new("clique-edgeless");
    for n in 1..=8 {
        let k = Graph::clique(n);
        let e = Graph::edgeless(n);
        for x in 0..=full_set(n) {
            let proper = x != 0 && x != full_set(n);
            let rk = graph_cut_rank(&k, x);
            c.check(rk <= 1 && rk == proper as usize, || {
                (format!("K{n}"), json!({"subset": set_list(x), "rank": rk}))
            });
            let re = graph_cut_rank(&e, x);
            c.check(re == 0, || (format!("edgeless{n}"), json!({"subset": set_list(x), "rank": re})));
        }
    }
    Ok(c.finish())
}

pub fn grid_sandwich() -> Result<Vec<Report>> {
    let mut c = Collector::new("grid-sandwich");
    let mut tight = BTreeMap::new();
    for side in [3usize, 4] {
        let g = Graph::grid(side, side);
        let n = side * side;
        let mut below_sqrt = 0u64;
        for x in 0..=full_set(n) {
            let size = x.count_ones() as usize;
            if 2 * size > n {
                continue;
            }
            let r = graph_cut_rank(&g, x);
            let root = (size as f64).sqrt().ceil() as usize;
            below_sqrt += (r < root) as u64;
            c.check(root.saturating_sub(1) <= r && r <= size, || {
                (format!("grid{side}x{side}"), json!({"subset": set_list(x), "rank": r}))
            });
        }
        tight.insert(format!("grid{side}x{side}"), below_sqrt);
    }
    // rank below ceil(sqrt|X|) is within the slack; counted, not failed
    c.note("below_ceil_sqrt", json!(tight));
    Ok(c.finish())
}

fn pow_sat(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

pub fn rank_variants() -> Result<Vec<Report>> {
    let mut c = Collector::new("rank-variants");
    for n in 1..=4 {
        for s in binary_structures(n)? {
            for m in 1..=2 {
                let ranks = (0..=full_set(n))
                    .map(|x| type_matrix(&s, x, m).map(|t| (matrix_ranks(&t), t.dictionary.len())))
                    .collect::<Result<Vec<_>>>()?;
                for x in 0..=full_set(n) {
                    let (r, t) = ranks[x as usize];
                    let (dual, _) = ranks[(full_set(n) & !x) as usize];
                    let ok = r.field_rank <= r.distinct_rows
                        && r.distinct_rows as u128 <= pow_sat(r.prime as usize, r.field_rank)
                        && r.distinct_rows as u128 <= pow_sat(t, r.distinct_cols)
                        && r.distinct_cols as u128 <= pow_sat(t, r.distinct_rows)
                        && r.distinct_rows == dual.distinct_cols
                        && r.distinct_cols == dual.distinct_rows;
                    c.check(ok, || {
                        (
                            format!("binary{n}"),
                            json!({"structure": write_structure(&s), "subset": set_list(x), "m": m, "ranks": r, "dual": dual}),
                        )
                    });
                }
            }
        }
    }
    Ok(c.finish())
}

pub fn ef_bound() -> Result<Vec<Report>> {
    let mut c = Collector::new("ef-bound");
    let mut worst = 0i64;
    // one structure per orbit under permuting the universe; the bound is
    // invariant when the subset is permuted along with it
    for n in 1..=4 {
        for idx in monadic_orbit_masks(n)? {
            let ms = monadic_from_mask(n, idx)?;
            let engine = MonadicTypes::new(&ms, 1, 2, &AtomicBasis::default())?;
            for x in 0..=full_set(n) as u32 {
                for d in 0..=1 {
                    let (wide, deep) = ef_bound_rows(&engine, n, x, d)?;
                    worst = worst.max(wide as i64 - deep as i64);
                    c.check((wide as u128) <= 1u128 << deep.min(127), || {
                        (
                            format!("monadic{n}-{idx:#x}"),
                            json!({"n": n, "members_mask": idx, "subset": x, "d": d, "rows_d1_m1": wide, "rows_d_m2": deep}),
                        )
                    });
                }
            }
        }
    }
    c.note("max_excess_over_deep_rows", worst);
    Ok(c.finish())
}

pub fn trees() -> Result<Vec<Report>> {
    let mut c = Collector::new("trees");
    let text = |t: &LaminarTree| write_tree(&PartiallyOrderedTree::unordered(t.clone()), None);
    for n in 1..=7 {
        for t in all_trees(n) {
            let back = ternary_decode(&ternary_encode(&t));
            c.check(back.as_ref() == Ok(&t), || (format!("tree{n}"), json!({"tree": text(&t), "check": "decode"})));
        }
    }
    // the subset checks are invariant under relabelling leaves, so shapes
    // with every subset cover every labelled pair
    let mut deepest = 0;
    for n in 1..=7 {
        for t in shapes(n) {
            let forests = subforests(&t);
            let full = full_set(n);
            for x in 0..=full {
                let chain = interesting_analysis(&t, x).chain;
                deepest = deepest.max(chain);
                let r = ternary_cut_rank(&t, x);
                c.check(r >= chain, || {
                    (format!("shape{n}"), json!({"tree": text(&t), "subset": set_list(x), "rank": r, "chain": chain}))
                });
                let cost = min_boolean_combination(&t, x, 1)?;
                let proper = x != 0 && x != full;
                let generator = proper && (forests.contains(&x) || forests.contains(&(full & !x)));
                c.check((cost == BoolCost::Exact(1)) == generator, || {
                    (format!("shape{n}"), json!({"tree": text(&t), "subset": set_list(x), "cost": format!("{cost:?}")}))
                });
            }
        }
    }
    c.note("max_interesting_chain", deepest);
    Ok(c.finish())
}

pub fn two_star() -> LaminarTree {
    let star = |a: usize| Nested::unordered((a..a + 3).map(Nested::Leaf).collect());
    LaminarTree::from_nested(&Nested::unordered(vec![star(0), star(3)])).expect("valid tree")
}

pub fn orientation() -> Result<Vec<Report>> {
    let mut c = Collector::new("orientation");
    let mut obstructions = 0u64;
    for n in 1..=9 {
        for t in shapes(n) {
            let text = || write_tree(&PartiallyOrderedTree::unordered(t.clone()), None);
            for m in [3u32, 4] {
                match group_orientation(&t, m)? {
                    OrientationOutcome::Oriented(o) => {
                        let leaves = t
                            .internal_nodes()
                            .map(|v| chosen_leaf(&t, &o, v))
                            .collect::<Result<Vec<_>>>()?;
                        let mut sorted = leaves.clone();
                        sorted.sort_unstable();
                        sorted.dedup();
                        let ok = verify_orientation(&t, &o) && sorted.len() == leaves.len();
                        c.check(ok, || (format!("shape{n}"), json!({"tree": text(), "modulus": m})));
                    }
                    OrientationOutcome::Obstruction { node } => {
                        obstructions += 1;
                        c.check(m == 3, || {
                            (format!("shape{n}"), json!({"tree": text(), "modulus": m, "obstruction": node}))
                        });
                    }
                }
            }
        }
    }
    let star = two_star();
    let blocked = matches!(group_orientation(&star, 3)?, OrientationOutcome::Obstruction { .. });
    c.check(blocked, || ("two-star".into(), json!({"modulus": 3})));
    c.note("mod3_obstructions", obstructions);
    Ok(c.finish())
}

/// Syntactic class counts for `k = 1..=4`, frozen from the brute-force count.
pub const SYNTACTIC_FIXTURE: &str = include_str!("../fixtures/syntactic_counts.json");
pub const SYNTACTIC_CAP: usize = 100_000;

fn count_json(c: SyntacticCount) -> Value {
    match c {
        SyntacticCount::Exact(v) => json!(v),
        SyntacticCount::Overflow => json!("cap"),
    }
}

pub fn semigroups() -> Result<Vec<Report>> {
    let mut c = Collector::new("semigroups");
    let fixture: BTreeMap<String, Vec<Value>> = serde_json::from_str(SYNTACTIC_FIXTURE)
        .map_err(|e| crate::Error::Invalid(format!("syntactic fixture: {e}")))?;
    let (mut ac_count, mut other) = (0u64, 0u64);
    for (name, s) in semigroup_corpus() {
        let counts = (1..=4)
            .map(|k| syntactic_class_count(&s, k, SYNTACTIC_CAP))
            .collect::<Result<Vec<_>>>()?;
        let shown: Vec<Value> = counts.iter().map(|&v| count_json(v)).collect();
        let frozen = fixture.get(&name);
        c.check(frozen == Some(&shown), || {
            (name.clone(), json!({"semigroup": write_semigroup(&s), "counts": shown, "fixture": frozen}))
        });
        let ac = is_almost_commutative(&s).holds;
        let ok = if ac {
            ac_count += 1;
            identity_suite(&s).all_hold() && counts_settle(&counts)
        } else {
            other += 1;
            counts_grow(&counts)
        };
        c.check(ok, || {
            (name.clone(), json!({"semigroup": write_semigroup(&s), "almost_commutative": ac, "counts": shown}))
        });
    }
    c.note("almost_commutative", ac_count);
    c.note("not_almost_commutative", other);
    Ok(c.finish())
}

pub fn finitary() -> Result<Vec<Report>> {
    let mut c = Collector::new("finitary");
    let (mut eligible, mut finite) = (0u64, 0u64);
    for (name, s) in semigroup_corpus() {
        let all: Vec<usize> = (0..s.size()).collect();
        if !premise_checks(&s, &all)?.surjective {
            continue;
        }
        eligible += 1;
        let r = finitary_generator_check(&s, &all, 6)?;
        finite += r.finite_detected as u64;
        c.check(!r.finite_detected || r.almost_commutative.holds, || {
            (name.clone(), json!({"semigroup": write_semigroup(&s), "budget": 6, "report": r}))
        });
    }
    c.note("eligible", eligible);
    c.note("finite_order", finite);
    Ok(c.finish())
}

pub fn two_by_two() -> Result<Vec<Report>> {
    let mut c = Collector::new("two-by-two");
    let mut monoids = 0u64;
    let mut finite = 0u64;
    for (name, s) in semigroup_corpus() {
        let Some(m) = s.as_monoid() else { continue };
        monoids += 1;
        let n = m.size();
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let r = two_by_two_claim(&m, b, cc, d, 5, 6)?;
                    finite += r.order.is_finite() as u64;
                    c.check(r.consistent, || {
                        (name.clone(), json!({"semigroup": write_semigroup(&m), "b": b, "c": cc, "d": d, "report": r}))
                    });
                }
            }
        }
    }
    c.note("monoids", monoids);
    c.note("finite_order_triples", finite);
    Ok(c.finish())
}

fn random_matrix(rng: &mut ChaCha8Rng, s: &Arc<FiniteSemigroup>) -> Result<SemigroupMatrix> {
    let r = rng.gen_range(1..=4);
    let cols = rng.gen_range(1..=4);
    let rows = (0..r).map(|_| (0..cols).map(|_| rng.gen_range(0..s.size())).collect()).collect();
    SemigroupMatrix::over(s.clone(), rows)
}

/// Duplicates one row and one column of `m` and shuffles the result.
fn disguise(rng: &mut ChaCha8Rng, m: &SemigroupMatrix) -> Result<SemigroupMatrix> {
    let mut rows = m.to_rows();
    let extra = rows[rng.gen_range(0..rows.len())].clone();
    rows.push(extra);
    let cols = rows[0].len();
    let dup = rng.gen_range(0..cols);
    for row in rows.iter_mut() {
        row.push(row[dup]);
    }
    use rand::seq::SliceRandom;
    rows.shuffle(rng);
    let mut perm: Vec<usize> = (0..cols + 1).collect();
    perm.shuffle(rng);
    let rows = rows.into_iter().map(|row| perm.iter().map(|&j| row[j]).collect()).collect();
    SemigroupMatrix::over(m.semigroup().expect("over a semigroup").clone(), rows)
}

pub fn kronecker() -> Result<Vec<Report>> {
    let mut c = Collector::new("kronecker");
    let pool: Vec<(String, Arc<FiniteSemigroup>)> = semigroup_corpus()
        .into_iter()
        .filter(|(_, s)| s.size() <= 4)
        .map(|(n, s)| (n, Arc::new(s)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b72_6f6e);
    for i in 0..500 {
        let (name, s) = &pool[rng.gen_range(0..pool.len())];
        let a = random_matrix(&mut rng, s)?;
        let b = random_matrix(&mut rng, s)?;
        let p = kronecker_product(&a, &b)?;
        let witness = || {
            json!({"semigroup": name, "a": write_matrix(&a, None), "b": write_matrix(&b, None)})
        };
        c.check(p.distinct_rows() <= a.distinct_rows() * b.distinct_rows(), || (format!("kron-{i}"), witness()));
        if i % 10 == 0 {
            let a2 = disguise(&mut rng, &a)?;
            let ok = equivalent(&a, &a2)
                && equivalent(&kronecker_product(&a2, &b)?, &p)
                && equivalent(&kronecker_product(&b, &a2)?, &kronecker_product(&b, &a)?);
            c.check(ok, || (format!("congruence-{i}"), witness()));
        }
    }
    Ok(c.finish())
}

pub fn recovery() -> Result<Vec<Report>> {
    let mut c = Collector::new("recovery");
    for seed in 0..200 {
        let o = random_unordered_oracle(seed)?;
        let mut want = o.hidden_classes().to_vec();
        want.sort_unstable();
        let got = recover_partition(&o).map(|mut p| {
            p.sort_unstable();
            p
        });
        c.check(got.as_ref() == Ok(&want), || {
            (format!("unordered-{seed}"), json!({"oracle": write_oracle(&o), "result": format!("{got:?}")}))
        });
    }
    for seed in 0..100 {
        let o = random_ordered_oracle(seed)?;
        let got = recover_preorder(&o, o.k());
        let ok = matches!(&got, Ok(p) if p.classes() == o.hidden_classes());
        c.check(ok, || {
            (format!("ordered-{seed}"), json!({"oracle": write_oracle(&o), "result": format!("{got:?}")}))
        });
    }
    Ok(c.finish())
}

pub fn compositionality() -> Result<Vec<Report>> {
    let mut c = Collector::new("compositionality");
    // relabelling carries any partition to consecutive blocks of
    // non-increasing size, and composition is invariant under relabelling
    for n in 1..=4 {
        let partitions: Vec<Vec<Subset>> = set_partitions(n)
            .into_iter()
            .filter(|p| {
                let consecutive = p.iter().all(|&b| b >> b.trailing_zeros() == full_set(b.count_ones() as usize));
                consecutive && p.windows(2).all(|w| w[0].count_ones() >= w[1].count_ones())
            })
            .collect();
        for s in binary_structures(n)? {
            for parts in &partitions {
                let l = parts.len();
                let r = composition_tables(&s, parts, l, 2)?;
                c.check(r.is_ok(), || {
                    (
                        format!("binary{n}"),
                        json!({"structure": write_structure(&s), "parts": parts.iter().map(|&p| set_list(p)).collect::<Vec<_>>(), "l": l, "m": 2}),
                    )
                });
            }
        }
    }
    Ok(c.finish())
}

pub fn rank_decreasing() -> Result<Vec<Report>> {
    let mut c = Collector::new("rank-decreasing");
    let identities = [
        ("P6", Graph::path(6).to_structure()),
        ("C6", Graph::cycle(6).to_structure()),
        ("K5", Graph::clique(5).to_structure()),
        ("grid3x3", Graph::grid(3, 3).to_structure()),
        ("binary3", binary_structures(3)?.nth(300).expect("512 structures")),
    ];
    for (name, s) in identities {
        let r = rank_decreasing_report(&[(s.clone(), s.clone())], 1 << 12, 1, 0)?;
        c.check(r.pairs[0].is_diagonal(), || (format!("identity-{name}"), json!({"structure": write_structure(&s)})));
    }
    let k8 = Graph::clique(8).to_structure();
    let p8 = Graph::path(8).to_structure();
    let r = rank_decreasing_report(&[(k8, p8)], 1 << 12, 1, 0)?;
    let pair = &r.pairs[0];
    let grown = pair.flagged.iter().find(|&&(_, a, b)| a <= 1 && b >= 2);
    c.check(grown.is_some(), || ("K8-to-P8".into(), json!({"table": pair.table})));
    if let Some(&(x, a, b)) = grown {
        c.note("example", json!({"subset": set_list(x), "input_rank": a, "output_rank": b}));
    }
    c.note("k8_p8_table", json!(pair.table));
    c.note("k8_p8_flagged", pair.flagged_total);
    Ok(c.finish())
}

type SuiteFn = fn() -> Result<Vec<Report>>;

/// Suites in acceptance order.
pub const SUITES: [(&str, SuiteFn); 14] = [
    ("path-bound", path_bound),
    ("clique-edgeless", clique_edgeless),
    ("grid-sandwich", grid_sandwich),
    ("rank-variants", rank_variants),
    ("ef-bound", ef_bound),
    ("trees", trees),
    ("orientation", orientation),
    ("semigroups", semigroups),
    ("finitary", finitary),
    ("two-by-two", two_by_two),
    ("kronecker", kronecker),
    ("recovery", recovery),
    ("compositionality", compositionality),
    ("rank-decreasing", rank_decreasing),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

pub fn run_suite(name: &str) -> Result<SuiteOutcome> {
    let Some(&(name, f)) = SUITES.iter().find(|s| s.0 == name) else {
        return invalid(format!("unknown suite `{name}`; known: {}", suite_names().join(", ")));
    };
    let start = Instant::now();
    let reports = f()?;
    Ok(SuiteOutcome {
        name,
        reports,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Counts `k = 1..=4` straight from the definition, in fixture layout.
pub fn brute_force_fixture() -> Result<BTreeMap<String, Vec<Value>>> {
    use crate::semigroup::syntactic_class_count_brute_force;
    let mut out = BTreeMap::new();
    for (name, s) in semigroup_corpus() {
        let counts = (1..=4)
            .map(|k| {
                syntactic_class_count_brute_force(&s, k).map(|v| if v > SYNTACTIC_CAP { json!("cap") } else { json!(v) })
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(name, counts);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut names = suite_names();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), SUITES.len());
        assert!(run_suite("nope").is_err());
    }

    #[test]
    fn quick_suites_pass() {
        for name in ["path-bound", "clique-edgeless", "rank-decreasing"] {
            let o = run_suite(name).unwrap();
            assert!(o.passed(), "{name}: {:?}", o.reports);
            assert_eq!(o.summary().unwrap().status, Status::Pass);
        }
    }

    #[test]
    fn failures_are_capped_but_counted() {
        let mut c = Collector::new("demo");
        for i in 0..30 {
            c.check(i % 2 == 0, || (format!("i{i}"), json!(i)));
        }
        let r = c.finish();
        assert_eq!(r.len(), 16);
        assert_eq!(r.last().unwrap().data["failed"], 15);
        assert_eq!(r.last().unwrap().status, Status::Fail);
    }

    #[test]
    fn two_star_blocks_three_colours() {
        assert!(matches!(group_orientation(&two_star(), 3).unwrap(), OrientationOutcome::Obstruction { .. }));
    }

    /// Rewrites the frozen fixture: `cargo test -p rankmat --release --lib regenerate -- --ignored`.
    #[test]
    #[ignore]
    fn regenerate_syntactic_fixture() {
        let fixture = brute_force_fixture().unwrap();
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/syntactic_counts.json");
        std::fs::write(path, serde_json::to_string_pretty(&fixture).unwrap() + "\n").unwrap();
    }

    #[test]
    fn fixture_covers_the_corpus() {
        let fixture: BTreeMap<String, Vec<Value>> = serde_json::from_str(SYNTACTIC_FIXTURE).unwrap();
        assert_eq!(fixture.len(), semigroup_corpus().len());
        assert!(fixture.values().all(|v| v.len() == 4));
    }

    #[test]
    fn report_json_shape() {
        let r = Report {
            check: "x".into(),
            instance: "y".into(),
            status: Status::Skip,
            data: json!({}),
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"check":"x","instance":"y","status":"skip","data":{}}"#);
        assert_eq!(serde_json::from_str::<Report>(&s).unwrap(), r);
    }
}
