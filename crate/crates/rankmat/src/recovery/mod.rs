//! Twins and informative colourings, the rank-decreasing harness, and
//! recovery of hidden partitions and preorders from approximation oracles.

mod oracle;
mod seeds;

pub use oracle::{
    canonical_semigroup, synth_oracle, validate_oracle, ApproximationOracle, ClassState, OracleKind, OracleValidation,
    SynthOptions,
};
pub use seeds::{
    find_seed, maximal_seed, recover_partition, recover_partition_with, recover_preorder, recover_preorder_with,
    HiddenGuess, OrderRoute, OrderedGuess, PreorderRecovery, Search, Seed,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{check_cap, invalid, Result};
use crate::rank::RankMeasure;
use crate::structures::{elements, full_set, qf_type_unchecked, QfType, Structure, Subset};
use crate::trees::{subforests, LaminarTree};

fn witness_len(s: &Structure) -> usize {
    s.vocabulary().max_arity().max(1) - 1
}

fn all_tuples(pool: &[usize], len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                pool.iter().map(move |&e| {
                    let mut u = t.clone();
                    u.push(e);
                    u
                })
            })
            .collect();
    }
    out
}

fn twin_pair(s: &Structure, a: usize, b: usize, len: usize) -> bool {
    let pool: Vec<usize> = (0..s.universe_size()).filter(|&e| e != a && e != b).collect();
    all_tuples(&pool, len).iter().all(|w| {
        let mut ta: Vec<Option<usize>> = vec![Some(a)];
        let mut tb: Vec<Option<usize>> = vec![Some(b)];
        ta.extend(w.iter().map(|&e| Some(e)));
        tb.extend(w.iter().map(|&e| Some(e)));
        qf_type_unchecked(s, &ta) == qf_type_unchecked(s, &tb)
    })
}

/// Pairs `(a, b)`, `a < b`, that no quantifier-free formula with parameters
/// outside `{a, b}` separates. Witness tuples have length one less than the
/// largest arity.
pub fn twins(s: &Structure) -> Result<BTreeSet<(usize, usize)>> {
    let n = s.universe_size();
    let len = witness_len(s);
    let work = (n * n) as u128 * (n as u128).pow(len as u32);
    check_cap("twin witness tuples", work, Caps::get().search_nodes as u128)?;
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if twin_pair(s, a, b, len) {
                out.insert((a, b));
            }
        }
    }
    Ok(out)
}

/// A largest set of pairwise non-twins; the lexicographically least among
/// those of maximum size.
pub fn max_twin_independent_set(s: &Structure) -> Result<Subset> {
    let n = s.universe_size();
    check_cap("twin graph vertices", n as u128, 40)?;
    let tw = twins(s)?;
    let mut adj = vec![0u64; n];
    for &(a, b) in &tw {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    fn go(cand: Subset, chosen: Subset, adj: &[u64], best: &mut Subset) {
        if cand == 0 {
            if chosen.count_ones() > best.count_ones() {
                *best = chosen;
            }
            return;
        }
        if chosen.count_ones() + cand.count_ones() <= best.count_ones() {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        go(cand & !(1 << v) & !adj[v], chosen | 1 << v, adj, best);
        go(cand & !(1 << v), chosen, adj, best);
    }
    let mut best = 0;
    go(full_set(n), 0, &adj, &mut best);
    Ok(best)
}

/// Whether the type of every non-repeating tuple of length `min(arity, n)`
/// is determined by its colours.
pub fn is_informative(s: &Structure, colouring: &[usize]) -> Result<bool> {
    let n = s.universe_size();
    if colouring.len() != n {
        return invalid("colouring length differs from the universe size");
    }
    let m = s.vocabulary().max_arity().max(1).min(n);
    let work = (n as u128).pow(m as u32);
    check_cap("informative colouring check", work, Caps::get().search_nodes as u128)?;
    let mut seen: HashMap<Vec<usize>, QfType> = HashMap::new();
    let mut ok = true;
    let mut tuple = Vec::with_capacity(m);
    fn rec(
        s: &Structure,
        colouring: &[usize],
        m: usize,
        tuple: &mut Vec<usize>,
        seen: &mut HashMap<Vec<usize>, QfType>,
        ok: &mut bool,
    ) {
        if !*ok {
            return;
        }
        if tuple.len() == m {
            let key: Vec<usize> = tuple.iter().map(|&e| colouring[e]).collect();
            let coords: Vec<Option<usize>> = tuple.iter().map(|&e| Some(e)).collect();
            let ty = qf_type_unchecked(s, &coords);
            match seen.get(&key) {
                Some(prev) if *prev != ty => *ok = false,
                Some(_) => {}
                None => {
                    seen.insert(key, ty);
                }
            }
            return;
        }
        for e in 0..s.universe_size() {
            if !tuple.contains(&e) {
                tuple.push(e);
                rec(s, colouring, m, tuple, seen, ok);
                tuple.pop();
            }
        }
    }
    rec(s, colouring, m, &mut tuple, &mut seen, &mut ok);
    Ok(ok)
}

fn renumber(colouring: &[usize]) -> Vec<usize> {
    let mut ids = HashMap::new();
    colouring
        .iter()
        .map(|&c| {
            let next = ids.len();
            *ids.entry(c).or_insert(next)
        })
        .collect()
}

fn colour_count(colouring: &[usize]) -> usize {
    colouring.iter().collect::<BTreeSet<_>>().len()
}

/// Informative colouring with at most `max_colours` colours.
///
/// Tries classes of mutual twins, then the same classes with every class of
/// size `2..=arity` split into singletons, then an exhaustive search over
/// colourings for universes of at most 8 elements.
pub fn informative_colouring(s: &Structure, max_colours: usize) -> Result<Option<Vec<usize>>> {
    let n = s.universe_size();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let tw = twins(s)?;
    let is_twin = |a: usize, b: usize| tw.contains(&(a.min(b), a.max(b)));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for e in 0..n {
        match classes.iter_mut().find(|c| c.iter().all(|&x| is_twin(x, e))) {
            Some(c) => c.push(e),
            None => classes.push(vec![e]),
        }
    }
    let mut colouring = vec![0; n];
    for (i, c) in classes.iter().enumerate() {
        for &e in c {
            colouring[e] = i;
        }
    }
    if colour_count(&colouring) <= max_colours && is_informative(s, &colouring)? {
        return Ok(Some(colouring));
    }
    let m = s.vocabulary().max_arity().max(1);
    let mut split = Vec::with_capacity(n);
    let mut next = 0;
    let mut assign = vec![0; n];
    for c in &classes {
        if (2..=m).contains(&c.len()) {
            for &e in c {
                assign[e] = next;
                next += 1;
            }
        } else {
            for &e in c {
                assign[e] = next;
            }
            next += 1;
        }
    }
    split.extend(renumber(&assign));
    if colour_count(&split) <= max_colours && is_informative(s, &split)? {
        return Ok(Some(split));
    }
    if n > 8 {
        return Ok(None);
    }
    // restricted growth strings, fewest colours first
    for colours in 1..=max_colours.min(n) {
        let mut rgs = vec![0usize; n];
        loop {
            if colour_count(&rgs) == colours && is_informative(s, &rgs)? {
                return Ok(Some(rgs));
            }
            // next restricted growth string with values < colours
            let mut i = n;
            let advanced = loop {
                if i <= 1 {
                    break false;
                }
                i -= 1;
                let bound = rgs[..i].iter().max().copied().unwrap_or(0) + 1;
                if rgs[i] + 1 <= bound && rgs[i] + 1 < colours {
                    rgs[i] += 1;
                    for r in rgs.iter_mut().skip(i + 1) {
                        *r = 0;
                    }
                    break true;
                }
            };
            if !advanced {
                break;
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    /// Input rank → largest output rank seen with it.
    pub table: BTreeMap<usize, usize>,
    /// Subsets whose output rank exceeds a low input rank, as (subset, input, output).
    pub flagged: Vec<(Subset, usize, usize)>,
    pub flagged_total: usize,
    pub subsets_checked: usize,
    pub exhaustive: bool,
}

impl PairReport {
    pub fn is_diagonal(&self) -> bool {
        self.table.iter().all(|(k, v)| k == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDecreasingReport {
    pub pairs: Vec<PairReport>,
}

const FLAG_LIMIT: usize = 64;

/// Tabulates input rank against output rank over subsets: all of them when
/// `2^n ≤ subset_budget`, otherwise `subset_budget` seeded random ones.
/// Subsets with input rank at most `low` and larger output rank are flagged.
pub fn rank_decreasing_report(
    pairs: &[(Structure, Structure)],
    subset_budget: usize,
    low: usize,
    seed: u64,
) -> Result<RankDecreasingReport> {
    let mut out = Vec::new();
    for (input, output) in pairs {
        let n = input.universe_size();
        if output.universe_size() != n {
            return invalid(format!(
                "input has {} elements, output has {}",
                n,
                output.universe_size()
            ));
        }
        let rin = RankMeasure::default_for(input).prepare(input)?;
        let rout = RankMeasure::default_for(output).prepare(output)?;
        let exhaustive = n < 63 && (1u128 << n) <= subset_budget as u128;
        let subsets: Vec<Subset> = if exhaustive {
            (0..=full_set(n)).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..subset_budget).map(|_| rng.gen::<u64>() & full_set(n)).collect()
        };
        let mut table = BTreeMap::new();
        let mut flagged = Vec::new();
        let mut flagged_total = 0;
        for &x in &subsets {
            let a = rin.rank(x)?;
            let b = rout.rank(x)?;
            let e = table.entry(a).or_insert(0);
            *e = (*e).max(b);
            if a <= low && b > a {
                flagged_total += 1;
                if flagged.len() < FLAG_LIMIT {
                    flagged.push((x, a, b));
                }
            }
        }
        out.push(PairReport {
            table,
            flagged,
            flagged_total,
            subsets_checked: subsets.len(),
            exhaustive,
        });
    }
    Ok(RankDecreasingReport { pairs: out })
}

/// Largest cut-rank in `s` of a subforest of `t`.
pub fn subforest_criterion(t: &LaminarTree, s: &Structure) -> Result<usize> {
    if t.leaf_count() != s.universe_size() {
        return invalid(format!(
            "tree has {} leaves, structure has {} elements",
            t.leaf_count(),
            s.universe_size()
        ));
    }
    let measure = RankMeasure::default_for(s).prepare(s)?;
    let mut best = 0;
    for x in subforests(t) {
        best = best.max(measure.rank(x)?);
    }
    Ok(best)
}

/// Elements of `set`, for messages.
pub(crate) fn describe(set: Subset) -> String {
    let v: Vec<String> = elements(set).map(|e| e.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::Graph;
    use crate::trees::{all_trees, ternary_encode};

    #[test]
    fn twin_examples() {
        let e = Graph::edgeless(4).to_structure();
        assert_eq!(twins(&e).unwrap().len(), 6);
        assert_eq!(max_twin_independent_set(&e).unwrap().count_ones(), 1);
        let k = Graph::clique(4).to_structure();
        assert_eq!(twins(&k).unwrap().len(), 6);
        let p3 = Graph::path(3).to_structure();
        let t = twins(&p3).unwrap();
        assert!(t.contains(&(0, 2)));
        assert!(!t.contains(&(0, 1)) && !t.contains(&(1, 2)));
        assert_eq!(max_twin_independent_set(&p3).unwrap().count_ones(), 2);
    }

    #[test]
    fn twins_agree_in_every_avoiding_context() {
        let p = Graph::path(5).to_structure();
        for (a, b) in twins(&p).unwrap() {
            for c in 0..5 {
                if c != a && c != b {
                    let ta = qf_type_unchecked(&p, &[Some(a), Some(c)]);
                    let tb = qf_type_unchecked(&p, &[Some(b), Some(c)]);
                    assert_eq!(ta, tb);
                }
            }
        }
    }

    #[test]
    fn colourings() {
        let e = Graph::edgeless(5).to_structure();
        assert_eq!(informative_colouring(&e, 3).unwrap(), Some(vec![0; 5]));
        let k = Graph::clique(5).to_structure();
        assert_eq!(informative_colouring(&k, 1).unwrap(), Some(vec![0; 5]));
        let p3 = Graph::path(3).to_structure();
        let c = informative_colouring(&p3, 3).unwrap().unwrap();
        assert_eq!(c, vec![0, 1, 0]);
        assert!(is_informative(&p3, &c).unwrap());
        assert!(!is_informative(&p3, &[0, 0, 0]).unwrap());
        let p5 = Graph::path(5).to_structure();
        assert_eq!(informative_colouring(&p5, 1).unwrap(), None);
        let c = informative_colouring(&p5, 5).unwrap().unwrap();
        assert!(is_informative(&p5, &c).unwrap());
    }

    #[test]
    fn rank_decreasing_examples() {
        let p = Graph::path(6).to_structure();
        let r = rank_decreasing_report(&[(p.clone(), p)], 1 << 10, 1, 0).unwrap();
        assert!(r.pairs[0].is_diagonal());
        assert!(r.pairs[0].flagged.is_empty());
        let k8 = Graph::clique(8).to_structure();
        let p8 = Graph::path(8).to_structure();
        let r = rank_decreasing_report(&[(k8, p8)], 1 << 10, 1, 0).unwrap();
        let pair = &r.pairs[0];
        assert!(pair.exhaustive);
        assert!(pair.table[&1] >= 2);
        assert!(pair.flagged.iter().any(|&(_, a, b)| a == 1 && b == 2));
        let e = Graph::edgeless(6).to_structure();
        let p = Graph::path(6).to_structure();
        let r = rank_decreasing_report(&[(e, p)], 1 << 10, 0, 0).unwrap();
        assert!(r.pairs[0].flagged.iter().all(|&(_, a, b)| a == 0 && b >= 1));
        assert!(r.pairs[0].flagged_total > 0);
        let mismatch = rank_decreasing_report(&[(Graph::path(3).to_structure(), Graph::path(4).to_structure())], 16, 1, 0);
        assert!(mismatch.is_err());
    }

    #[test]
    fn sampled_subsets_are_seeded() {
        let k = Graph::clique(12).to_structure();
        let p = Graph::path(12).to_structure();
        let a = rank_decreasing_report(&[(k.clone(), p.clone())], 100, 1, 5).unwrap();
        let b = rank_decreasing_report(&[(k, p)], 100, 1, 5).unwrap();
        assert!(!a.pairs[0].exhaustive);
        assert_eq!(a, b);
    }

    #[test]
    fn subforest_examples() {
        // maxima over all trees with 2..=5 leaves, by enumeration; 6 leaves gives 14
        for (n, want) in [(2, 1), (3, 4), (4, 10), (5, 13)] {
            let max = all_trees(n).iter().map(|t| subforest_criterion(t, &ternary_encode(t)).unwrap()).max();
            assert_eq!(max, Some(want));
        }
        for t in all_trees(5) {
            assert_eq!(subforest_criterion(&t, &Graph::edgeless(5).to_structure()).unwrap(), 0);
            assert!(subforest_criterion(&t, &Graph::clique(5).to_structure()).unwrap() <= 1);
        }
        assert!(subforest_criterion(&LaminarTree::star(3), &Graph::clique(4).to_structure()).is_err());
    }
}
