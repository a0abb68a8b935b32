use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::oracle::{validate_oracle, ApproximationOracle, ClassState, OracleKind};
use crate::caps::Caps;
use crate::error::{check_cap, invalid, Error, Result};
use crate::structures::{elements, full_set, Subset};
use crate::trees::LinearPreorder;

/// Free elements up to which good seeds are enumerated outright.
const EXHAUSTIVE_FREE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Search {
    /// Exhaustive when at most 16 elements are free, witnesses otherwise.
    #[default]
    Auto,
    Exhaustive,
    Witnesses,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub set: Subset,
    pub satisfies: bool,
    pub full_class: bool,
    pub empty_class: bool,
    pub cut_classes: Vec<usize>,
}

impl Seed {
    pub fn is_seed(&self) -> bool {
        self.satisfies && self.full_class && self.empty_class
    }
}

/// Maximal seed of an ordered oracle together with the classes it pins down.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedGuess {
    pub seed: Seed,
    pub states: Vec<ClassState>,
    /// Full long block on the left, empty on the right.
    pub full_left: bool,
    /// Number of special classes at the front and at the back. Without a
    /// two-long-block seed every class is special.
    pub prefix: usize,
    pub suffix: usize,
    island: Vec<ClassState>,
}

impl OrderedGuess {
    pub fn middle(&self) -> std::ops::Range<usize> {
        self.prefix..self.states.len() - self.suffix
    }
}

/// Resolves the nondeterministic guesses of the recovery procedures from the
/// oracle's hidden classes. Every set it hands out is checked against `φ`
/// by the caller, so a wrong guess surfaces as an error rather than a wrong
/// answer.
#[derive(Debug, Clone, Copy)]
pub struct HiddenGuess<'a> {
    oracle: &'a ApproximationOracle,
    budget: u64,
}

fn kind_of(st: ClassState) -> u8 {
    match st {
        ClassState::Empty => 0,
        ClassState::Full => 1,
        ClassState::Cut(_) => 2,
    }
}

/// Maximal runs `(kind, first, last)`; every cut class is a run by itself.
fn runs(states: &[ClassState]) -> Vec<(u8, usize, usize)> {
    let mut out: Vec<(u8, usize, usize)> = Vec::new();
    for (i, &st) in states.iter().enumerate() {
        let k = kind_of(st);
        match out.last_mut() {
            Some(last) if last.0 == k && k != 2 => last.2 = i,
            _ => out.push((k, i, i)),
        }
    }
    out
}

fn shape(states: &[ClassState], left: u8, right: u8) -> Option<(usize, usize, Vec<ClassState>)> {
    let r = runs(states);
    let long: Vec<usize> = (0..r.len()).filter(|&i| r[i].2 > r[i].1).collect();
    if long.len() != 2 {
        return None;
    }
    let (a, b) = (r[long[0]], r[long[1]]);
    if a.0 != left || b.0 != right || (long[0] + 1..long[1]).any(|i| r[i].0 != 2) {
        return None;
    }
    Some((a.1 + 1, states.len() - b.2, states[a.2 + 1..b.1].to_vec()))
}

impl<'a> HiddenGuess<'a> {
    pub fn new(oracle: &'a ApproximationOracle) -> Self {
        HiddenGuess {
            oracle,
            budget: Caps::get().search_nodes,
        }
    }

    fn classes(&self) -> &[Subset] {
        self.oracle.hidden_classes()
    }

    /// Visits every state vector whose cut count (block count, for ordered
    /// oracles) stays below `k`; the rest are rejected by soundness.
    fn search(&self, visit: &mut dyn FnMut(&[ClassState])) -> Result<()> {
        let mut states = Vec::with_capacity(self.classes().len());
        let mut nodes = 0u64;
        self.dfs(&mut states, 0, 3, &mut nodes, visit)
    }

    fn dfs(
        &self,
        states: &mut Vec<ClassState>,
        metric: usize,
        last: u8,
        nodes: &mut u64,
        visit: &mut dyn FnMut(&[ClassState]),
    ) -> Result<()> {
        *nodes += 1;
        check_cap("search_nodes", *nodes as u128, self.budget as u128)?;
        let o = self.oracle;
        let pos = states.len();
        if pos == self.classes().len() {
            visit(states);
            return Ok(());
        }
        for st in o.realisable(pos) {
            let k = kind_of(st);
            let m = match o.kind() {
                OracleKind::Unordered => metric + (k == 2) as usize,
                OracleKind::Ordered => metric + (k == 2 || k != last) as usize,
            };
            if m >= o.k() {
                continue;
            }
            states.push(st);
            self.dfs(states, m, k, nodes, visit)?;
            states.pop();
        }
        Ok(())
    }

    fn realise(&self, states: &[ClassState], classes: impl Iterator<Item = usize>) -> Subset {
        classes.fold(0, |a, c| {
            a | self.oracle.realise(c, states[c]).expect("state was listed as realisable")
        })
    }

    fn seed_of(&self, states: &[ClassState]) -> Seed {
        let set = self.realise(states, 0..states.len());
        Seed {
            set,
            satisfies: self.oracle.query(set),
            full_class: states.contains(&ClassState::Full),
            empty_class: states.contains(&ClassState::Empty),
            cut_classes: (0..states.len()).filter(|&c| kind_of(states[c]) == 2).collect(),
        }
    }

    fn is_candidate(&self, states: &[ClassState]) -> bool {
        states.contains(&ClassState::Full) && states.contains(&ClassState::Empty) && self.oracle.accepts_states(states)
    }

    fn need_two_classes(&self) -> Result<()> {
        if self.classes().len() < 2 {
            return invalid("seeds need at least two classes");
        }
        Ok(())
    }

    pub fn first_seed(&self) -> Result<Seed> {
        self.need_two_classes()?;
        let mut found: Option<Vec<ClassState>> = None;
        self.search(&mut |st| {
            if found.is_none() && self.is_candidate(st) {
                found = Some(st.to_vec());
            }
        })?;
        let st = found.ok_or_else(|| Error::Invalid("oracle has no seed".into()))?;
        Ok(self.seed_of(&st))
    }

    /// Unordered: a seed cutting as many classes as possible, and its
    /// special classes (the cut ones, the first full and the first empty).
    pub fn unordered_seed(&self) -> Result<(Seed, Vec<usize>)> {
        self.need_two_classes()?;
        let mut best: Option<(usize, Vec<ClassState>)> = None;
        self.search(&mut |st| {
            if self.is_candidate(st) {
                let cuts = st.iter().filter(|s| kind_of(**s) == 2).count();
                if best.as_ref().is_none_or(|b| cuts > b.0) {
                    best = Some((cuts, st.to_vec()));
                }
            }
        })?;
        let (_, st) = best.ok_or_else(|| Error::Invalid("oracle has no seed".into()))?;
        let seed = self.seed_of(&st);
        let mut special = seed.cut_classes.clone();
        special.extend(st.iter().position(|&s| s == ClassState::Full));
        special.extend(st.iter().position(|&s| s == ClassState::Empty));
        special.sort_unstable();
        Ok((seed, special))
    }

    /// Ordered: a seed with as many full and empty blocks as possible,
    /// preferring exactly two long blocks (full then empty, else the mirror
    /// image) separated only by cut classes.
    pub fn ordered_seed(&self) -> Result<OrderedGuess> {
        self.need_two_classes()?;
        let mut best = 0;
        let mut tops: Vec<Vec<ClassState>> = Vec::new();
        self.search(&mut |st| {
            if self.is_candidate(st) {
                let fe = runs(st).iter().filter(|r| r.0 != 2).count();
                if fe > best {
                    best = fe;
                    tops.clear();
                }
                if fe == best {
                    tops.push(st.to_vec());
                }
            }
        })?;
        if tops.is_empty() {
            return invalid("oracle has no seed");
        }
        for (full_left, l, r) in [(true, 1, 0), (false, 0, 1)] {
            if let Some((st, (prefix, suffix, island))) = tops.iter().find_map(|st| shape(st, l, r).map(|s| (st, s))) {
                return Ok(OrderedGuess {
                    seed: self.seed_of(st),
                    states: st.clone(),
                    full_left,
                    prefix,
                    suffix,
                    island,
                });
            }
        }
        let st = tops.swap_remove(0);
        Ok(OrderedGuess {
            seed: self.seed_of(&st),
            prefix: st.len(),
            states: st,
            full_left: true,
            suffix: 0,
            island: Vec::new(),
        })
    }

    pub(crate) fn class_of(&self, x: usize) -> usize {
        self.classes().iter().position(|&c| c >> x & 1 == 1).expect("classes cover the universe")
    }

    /// Groups of classes with identical `λ` rows.
    pub(crate) fn lambda_groups(&self) -> Vec<Vec<usize>> {
        let mut by: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
        for (i, row) in self.oracle.lambda().iter().enumerate() {
            by.entry(row.as_slice()).or_default().push(i);
        }
        let mut groups: Vec<Vec<usize>> = by.into_values().collect();
        groups.sort();
        groups
    }

    /// Unordered witness: the seed's special part plus the class of `x`
    /// or of `r`, whichever separates them.
    pub(crate) fn separating(&self, base: Subset, x: usize, r: usize) -> Vec<Subset> {
        [x, r]
            .into_iter()
            .map(|e| base | self.classes()[self.class_of(e)])
            .filter(|y| (y >> x & 1) != (y >> r & 1))
            .collect()
    }

    /// Ordered witnesses for `G(x, y)`: the seed's special part, its left
    /// kind up to some class, its island, then its right kind.
    pub(crate) fn good_seeds(&self, g: &OrderedGuess, x: usize, y: usize) -> Vec<Subset> {
        let mid = g.middle();
        let n_mid = mid.len();
        if n_mid < g.island.len() {
            return Vec::new();
        }
        let (l, r) = if g.full_left {
            (ClassState::Full, ClassState::Empty)
        } else {
            (ClassState::Empty, ClassState::Full)
        };
        let base = self.realise(&g.states, (0..g.prefix).chain(mid.end..g.states.len()));
        let mut out = Vec::new();
        for t in 0..=n_mid - g.island.len() {
            let mut st = g.states.clone();
            for (j, c) in mid.clone().enumerate() {
                st[c] = if j < t {
                    l
                } else if j < t + g.island.len() {
                    g.island[j - t]
                } else {
                    r
                };
            }
            let set = base | self.realise(&st, mid.clone());
            if set >> x & 1 == 1 && set >> y & 1 == 0 {
                out.push(set);
            }
        }
        out
    }

    /// Colour of `x` modulo `m`: its class position.
    pub(crate) fn colour(&self, x: usize, m: usize) -> usize {
        self.class_of(x) % m
    }
}

pub fn find_seed(o: &ApproximationOracle) -> Result<Seed> {
    HiddenGuess::new(o).first_seed()
}

/// Maximal seed and its special classes.
pub fn maximal_seed(o: &ApproximationOracle) -> Result<(Seed, Vec<usize>)> {
    let g = HiddenGuess::new(o);
    match o.kind() {
        OracleKind::Unordered => g.unordered_seed(),
        OracleKind::Ordered => {
            let og = g.ordered_seed()?;
            let mid = og.middle();
            let special = (0..mid.start).chain(mid.end..og.states.len()).collect();
            Ok((og.seed, special))
        }
    }
}

fn free_enumeration(free: Subset, search: Search) -> Result<bool> {
    let count = free.count_ones() as usize;
    match search {
        Search::Auto => Ok(count <= EXHAUSTIVE_FREE),
        Search::Witnesses => Ok(false),
        Search::Exhaustive => {
            check_cap("exhaustive seed search", 1u128 << count, 1u128 << 20)?;
            Ok(true)
        }
    }
}

fn subsets(set: Subset) -> impl Iterator<Item = Subset> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set { None } else { Some((cur.wrapping_sub(set)) & set) };
        Some(cur)
    })
}

fn sort_classes(mut classes: Vec<Subset>) -> Vec<Subset> {
    classes.sort_by_key(|c| c.trailing_zeros());
    classes
}

fn ensure_valid(o: &ApproximationOracle, kind: OracleKind) -> Result<()> {
    if o.kind() != kind {
        return invalid(format!("expected an {kind:?} oracle"));
    }
    let v = validate_oracle(o);
    if !v.valid() {
        return invalid(format!("oracle violates its invariants: {v:?}"));
    }
    Ok(())
}

pub fn recover_partition(o: &ApproximationOracle) -> Result<Vec<Subset>> {
    recover_partition_with(o, &HiddenGuess::new(o), Search::Auto)
}

/// Classes of a valid unordered oracle, sorted by least element.
pub fn recover_partition_with(o: &ApproximationOracle, guess: &HiddenGuess, search: Search) -> Result<Vec<Subset>> {
    ensure_valid(o, OracleKind::Unordered)?;
    if !validate_oracle(o).homogeneous() {
        let groups = guess.lambda_groups();
        if groups.len() == 1 {
            return invalid("oracle is not homogeneous and cannot be split");
        }
        let mut out = Vec::new();
        for group in groups {
            let (sub, map) = o.restrict(&group)?;
            if !validate_oracle(&sub).homogeneous() {
                return invalid("oracle is not homogeneous on a group of equal images");
            }
            for c in recover_partition_with(&sub, &HiddenGuess::new(&sub), search)? {
                out.push(elements(c).fold(0u64, |a, i| a | 1 << map[i]));
            }
        }
        return finish_partition(o, sort_classes(out));
    }
    let n = o.universe_size();
    let (seed, special) = match guess.unordered_seed() {
        Ok(s) => s,
        Err(Error::Invalid(_)) if o.hidden_classes().len() < 2 => {
            return finish_partition(o, vec![full_set(n)]);
        }
        Err(e) => return Err(e),
    };
    if !seed.is_seed() {
        return invalid("guessed set is not a seed");
    }
    let specials: Vec<Subset> = special.iter().map(|&c| o.hidden_classes()[c]).collect();
    let p = specials.iter().fold(0, |a, c| a | c);
    let base = seed.set & p;
    let free = full_set(n) & !p;
    let mut classes: Vec<Subset> = Vec::new();
    let mut witnesses: Vec<Subset> = Vec::new();
    if free_enumeration(free, search)? {
        let mut parts = if free == 0 { Vec::new() } else { vec![free] };
        for z in subsets(free) {
            if o.query(base | z) {
                parts = parts.into_iter().flat_map(|c| [c & z, c & !z]).filter(|&c| c != 0).collect();
                witnesses.push(z);
            }
        }
        classes = parts;
    } else {
        for x in elements(free) {
            let mut home = None;
            for (i, &c) in classes.iter().enumerate() {
                let r = c.trailing_zeros() as usize;
                let sep: Vec<Subset> = guess.separating(base, x, r).into_iter().filter(|&y| o.query(y)).collect();
                if sep.is_empty() {
                    home = Some(i);
                    break;
                }
                witnesses.extend(sep.into_iter().map(|y| y & free));
            }
            match home {
                Some(i) => classes[i] |= 1 << x,
                None => classes.push(1 << x),
            }
        }
    }
    if let Some(w) = witnesses.iter().find(|&&w| classes.iter().any(|&c| c & w != 0 && c & w != c)) {
        return invalid(format!("witness {} splits a recovered class", super::describe(*w)));
    }
    classes.extend(specials);
    finish_partition(o, sort_classes(classes))
}

fn finish_partition(o: &ApproximationOracle, classes: Vec<Subset>) -> Result<Vec<Subset>> {
    for (i, &a) in classes.iter().enumerate() {
        for &b in &classes[i..] {
            if !o.query(a | b) {
                return invalid(format!("recovered union {} is rejected", super::describe(a | b)));
            }
        }
    }
    Ok(classes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderRoute {
    /// Every class was pinned down by the maximal seed.
    Guessed,
    /// Successor relation assembled from the colour-restricted `d`-fold steps.
    Successor,
    /// Order read off the good-seed relation directly.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreorderRecovery {
    pub preorder: LinearPreorder,
    pub route: OrderRoute,
}

pub fn recover_preorder(o: &ApproximationOracle, d: usize) -> Result<LinearPreorder> {
    Ok(recover_preorder_with(o, d, &HiddenGuess::new(o), Search::Auto)?.preorder)
}

/// Good-seed relation on the middle: `g[x]` holds the `y` such that some
/// good seed contains `x` but not `y`, oriented so that `x` precedes `y`.
fn good_seed_relation(
    o: &ApproximationOracle,
    guess: &HiddenGuess,
    g: &OrderedGuess,
    free: Subset,
    base: Subset,
    search: Search,
) -> Result<Vec<Subset>> {
    let n = o.universe_size();
    let mut rel = vec![0u64; n];
    if free_enumeration(free, search)? {
        for z in subsets(free) {
            if o.query(base | z) {
                for x in elements(z) {
                    rel[x] |= free & !z;
                }
            }
        }
    } else {
        for x in elements(free) {
            for y in elements(free & !(1 << x)) {
                let ok = guess
                    .good_seeds(g, x, y)
                    .into_iter()
                    .any(|s| s & !free == base && o.query(s));
                if ok {
                    rel[x] |= 1 << y;
                }
            }
        }
    }
    if !g.full_left {
        let mut flipped = vec![0u64; n];
        for x in 0..n {
            for y in elements(rel[x]) {
                flipped[y] |= 1 << x;
            }
        }
        rel = flipped;
    }
    Ok(rel)
}

fn less_mod(rel: &[Subset], colour: &[usize], free: Subset, dd: usize) -> Vec<Subset> {
    let m = 2 * dd;
    let mut out = vec![0u64; rel.len()];
    for x in elements(free) {
        for y in elements(rel[x]) {
            if (colour_at(colour, y, m) + m - colour_at(colour, x, m)) % m == dd {
                out[x] |= 1 << y;
            }
        }
    }
    out
}

fn colour_at(colour: &[usize], x: usize, m: usize) -> usize {
    colour[x] % m
}

/// Exactly-`dd` steps: `Less(x, y)` with no `z` two steps past `x` and `Less(z, y)`.
fn steps(less: &[Subset], free: Subset) -> Vec<Subset> {
    let mut out = vec![0u64; less.len()];
    for x in elements(free) {
        let rr = elements(less[x]).fold(0u64, |a, w| a | less[w]);
        let beyond = elements(rr).fold(0u64, |a, z| a | less[z]);
        out[x] = less[x] & !beyond;
    }
    out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

fn successor_route(rel: &[Subset], colour: &[usize], free: Subset, d: usize) -> Option<Vec<Subset>> {
    let n = rel.len();
    let sd = steps(&less_mod(rel, colour, free, d), free);
    let sd1 = steps(&less_mod(rel, colour, free, d + 1), free);
    let mut parent: Vec<usize> = (0..n).collect();
    let unite = |set: Subset, parent: &mut Vec<usize>| {
        if let Some(first) = elements(set).next() {
            for e in elements(set) {
                let (a, b) = (find(parent, first), find(parent, e));
                parent[a] = b;
            }
        }
    };
    let mut touched = 0u64;
    for s in [&sd, &sd1] {
        for x in elements(free) {
            unite(s[x], &mut parent);
            let sources = elements(free).filter(|&w| s[w] >> x & 1 == 1).fold(0, |a, w| a | 1 << w);
            unite(sources, &mut parent);
            if s[x] != 0 {
                touched |= 1 << x | s[x];
            }
        }
    }
    if touched != free {
        return None;
    }
    let mut groups: BTreeMap<usize, Subset> = BTreeMap::new();
    for x in elements(free) {
        *groups.entry(find(&mut parent, x)).or_default() |= 1 << x;
    }
    let classes: Vec<Subset> = groups.into_values().collect();
    let idx = |x: usize| classes.iter().position(|&c| c >> x & 1 == 1).expect("grouped");
    let mut next: Vec<Option<usize>> = vec![None; classes.len()];
    for x in elements(free) {
        for y in elements(free) {
            let a = elements(sd1[x]).any(|z| sd[y] >> z & 1 == 1);
            let b = elements(free).any(|w| sd[w] >> x & 1 == 1 && sd1[w] >> y & 1 == 1);
            if a || b {
                let (i, j) = (idx(x), idx(y));
                if i == j || next[i].is_some_and(|k| k != j) {
                    return None;
                }
                next[i] = Some(j);
            }
        }
    }
    let mut has_pred = vec![false; classes.len()];
    for &j in next.iter().flatten() {
        if has_pred[j] {
            return None;
        }
        has_pred[j] = true;
    }
    let mut cur = has_pred.iter().position(|&p| !p)?;
    let mut chain = vec![classes[cur]];
    while let Some(j) = next[cur] {
        if chain.len() > classes.len() {
            return None;
        }
        chain.push(classes[j]);
        cur = j;
    }
    if chain.len() != classes.len() || !consistent(rel, &chain) {
        return None;
    }
    Some(chain)
}

fn consistent(rel: &[Subset], chain: &[Subset]) -> bool {
    chain.iter().enumerate().all(|(i, &a)| {
        chain.iter().enumerate().all(|(j, &b)| {
            elements(a).all(|x| {
                let later = if i < j { b } else { 0 };
                rel[x] & b == later
            })
        })
    })
}

fn direct_route(rel: &[Subset], free: Subset) -> Result<Vec<Subset>> {
    let mut groups: Vec<Subset> = Vec::new();
    for x in elements(free) {
        match groups
            .iter_mut()
            .find(|g| {
                let r = g.trailing_zeros() as usize;
                rel[x] >> r & 1 == 0 && rel[r] >> x & 1 == 0
            }) {
            Some(g) => *g |= 1 << x,
            None => groups.push(1 << x),
        }
    }
    groups.sort_by_key(|&g| {
        let r = g.trailing_zeros() as usize;
        std::cmp::Reverse(rel[r].count_ones())
    });
    if !consistent(rel, &groups) {
        return invalid("good seeds are not consistent with a linear preorder");
    }
    Ok(groups)
}

/// Ordered classes of a valid ordered oracle.
///
/// `d` sets the step sizes `d` and `d + 1` of the successor route; when
/// the middle part is too short for it the order is read off directly.
pub fn recover_preorder_with(
    o: &ApproximationOracle,
    d: usize,
    guess: &HiddenGuess,
    search: Search,
) -> Result<PreorderRecovery> {
    ensure_valid(o, OracleKind::Ordered)?;
    if d == 0 {
        return invalid("step size d must be positive");
    }
    let n = o.universe_size();
    let hidden = o.hidden_classes();
    let g = match guess.ordered_seed() {
        Ok(g) => g,
        Err(Error::Invalid(_)) if hidden.len() < 2 => {
            return finish_preorder(o, vec![full_set(n)], OrderRoute::Guessed);
        }
        Err(e) => return Err(e),
    };
    if !g.seed.is_seed() {
        return invalid("guessed set is not a seed");
    }
    let mid = g.middle();
    let prefix: Vec<Subset> = hidden[..mid.start].to_vec();
    let suffix: Vec<Subset> = hidden[mid.end..].to_vec();
    if mid.is_empty() {
        return finish_preorder(o, [prefix, suffix].concat(), OrderRoute::Guessed);
    }
    let p = prefix.iter().chain(&suffix).fold(0, |a, c| a | c);
    let free = full_set(n) & !p;
    let base = g.seed.set & p;
    let rel = good_seed_relation(o, guess, &g, free, base, search)?;
    let colour: Vec<usize> = (0..n).map(|x| guess.colour(x, 2 * d * (d + 1))).collect();
    let (middle, route) = match successor_route(&rel, &colour, free, d) {
        Some(chain) => (chain, OrderRoute::Successor),
        None => (direct_route(&rel, free)?, OrderRoute::Direct),
    };
    finish_preorder(o, [prefix, middle, suffix].concat(), route)
}

fn finish_preorder(o: &ApproximationOracle, classes: Vec<Subset>, route: OrderRoute) -> Result<PreorderRecovery> {
    for i in 0..classes.len() {
        let mut interval = 0;
        for &c in &classes[i..] {
            interval |= c;
            if !o.query(interval) {
                return invalid(format!("recovered interval {} is rejected", super::describe(interval)));
            }
        }
    }
    Ok(PreorderRecovery {
        preorder: LinearPreorder::new(o.universe_size(), classes)?,
        route,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::enumerate::random_classes;
    use crate::recovery::{synth_oracle, SynthOptions};

    #[test]
    fn two_classes_seed_is_one_full_class() {
        let o = synth_oracle(OracleKind::Unordered, 4, vec![0b0011, 0b1100], 2, 0, SynthOptions::default()).unwrap();
        let s = find_seed(&o).unwrap();
        assert!(s.is_seed());
        assert_eq!(s.set, 0b1100);
    }

    #[test]
    fn maximal_seeds() {
        let classes = vec![0b11, 0b1100, 0b110000];
        let o = synth_oracle(OracleKind::Unordered, 6, classes.clone(), 2, 0, SynthOptions::default()).unwrap();
        let (s, special) = maximal_seed(&o).unwrap();
        assert!(s.is_seed());
        assert_eq!(s.cut_classes.len(), 1);
        assert!(special.len() <= 2 + 2);
        let four = vec![0b11, 0b1100, 0b110000, 0b11000000];
        let o = synth_oracle(OracleKind::Unordered, 8, four, 2, 3, SynthOptions::default()).unwrap();
        assert!(maximal_seed(&o).unwrap().1.len() <= 2 + 2);
        let one = synth_oracle(OracleKind::Unordered, 2, vec![0b11], 2, 0, SynthOptions::default()).unwrap();
        assert!(find_seed(&one).is_err());
    }

    #[test]
    fn shapes() {
        use ClassState::*;
        let st = [Empty, Full, Full, Empty, Empty, Empty];
        assert_eq!(shape(&st, 1, 0), Some((2, 1, vec![])));
        assert_eq!(shape(&[Full, Full, Cut(0), Empty, Empty], 1, 0), Some((1, 1, vec![Cut(0)])));
        assert_eq!(shape(&[Empty, Empty, Full, Full, Empty, Empty], 1, 0), None);
        assert_eq!(shape(&[Empty, Empty, Full, Full], 0, 1), Some((1, 1, vec![])));
    }

    #[test]
    fn partitions_recover_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..30 {
            let n = rng.gen_range(2..=14);
            let count = rng.gen_range(1..=n.min(6));
            let classes = random_classes(&mut rng, n, count);
            let k = rng.gen_range(1..=2);
            let opts = SynthOptions {
                homogeneous: trial % 3 != 0,
                random_accept: trial % 2 == 0,
            };
            let o = synth_oracle(OracleKind::Unordered, n, classes.clone(), k, trial, opts).unwrap();
            let want = sort_classes(classes);
            let g = HiddenGuess::new(&o);
            for search in [Search::Exhaustive, Search::Witnesses] {
                assert_eq!(recover_partition_with(&o, &g, search).unwrap(), want, "trial {trial} {search:?}");
            }
        }
    }

    #[test]
    fn large_universe_uses_witnesses() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let classes = random_classes(&mut rng, 30, 6);
        let o = synth_oracle(OracleKind::Unordered, 30, classes.clone(), 2, 1, SynthOptions::default()).unwrap();
        assert_eq!(recover_partition(&o).unwrap(), sort_classes(classes.clone()));
        let w = recover_partition_with(&o, &HiddenGuess::new(&o), Search::Witnesses).unwrap();
        assert_eq!(w, sort_classes(classes));
    }

    #[test]
    fn preorders_recover_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..30 {
            let count = rng.gen_range(1..=9);
            let n = rng.gen_range(count..=count + 5).min(14);
            let classes = random_classes(&mut rng, n, count);
            let opts = SynthOptions {
                homogeneous: true,
                random_accept: trial % 2 == 0,
            };
            let o = synth_oracle(OracleKind::Ordered, n, classes.clone(), 4, trial, opts).unwrap();
            let g = HiddenGuess::new(&o);
            for search in [Search::Exhaustive, Search::Witnesses] {
                let r = recover_preorder_with(&o, 4, &g, search).unwrap();
                assert_eq!(r.preorder.classes(), classes.as_slice(), "trial {trial} {search:?}");
            }
        }
    }

    #[test]
    fn long_orders_take_the_successor_route() {
        let classes: Vec<Subset> = (0..14).map(|i| 1u64 << i).collect();
        let o = synth_oracle(OracleKind::Ordered, 14, classes.clone(), 4, 0, SynthOptions::default()).unwrap();
        let r = recover_preorder_with(&o, 4, &HiddenGuess::new(&o), Search::Auto).unwrap();
        assert_eq!(r.route, OrderRoute::Successor);
        assert_eq!(r.preorder.classes(), classes.as_slice());
        let short = synth_oracle(OracleKind::Ordered, 6, classes[..6].to_vec(), 4, 0, SynthOptions::default()).unwrap();
        let r = recover_preorder_with(&short, 4, &HiddenGuess::new(&short), Search::Auto).unwrap();
        assert_ne!(r.route, OrderRoute::Successor);
    }

    #[test]
    fn successor_steps_are_exact() {
        let rel: Vec<Subset> = (0..12).map(|i| full_set(12) & !((1u64 << (i + 1)) - 1)).collect();
        let colour: Vec<usize> = (0..12).collect();
        let s = steps(&less_mod(&rel, &colour, full_set(12), 3), full_set(12));
        for x in 0..12 {
            let want = if x + 3 < 12 { 1u64 << (x + 3) } else { 0 };
            assert_eq!(s[x], want);
        }
    }
}
