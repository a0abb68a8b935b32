//! Finite semigroups given by Cayley tables.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{check_cap, invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteSemigroup {
    n: usize,
    table: Vec<u16>,
    unit: Option<usize>,
}

/// Validates a Cayley table; `unit`, when given, must be a two-sided identity.
pub fn validate(table: Vec<Vec<usize>>, unit: Option<usize>) -> Result<FiniteSemigroup> {
    FiniteSemigroup::new(table, unit)
}

impl FiniteSemigroup {
    pub fn new(table: Vec<Vec<usize>>, unit: Option<usize>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return invalid("a semigroup needs at least one element");
        }
        if n > u16::MAX as usize {
            return invalid("semigroup too large");
        }
        let mut flat = Vec::with_capacity(n * n);
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return invalid(format!("row {a} has {} entries, expected {n}", row.len()));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::OutOfRange { element: v, size: n });
                }
                flat.push(v as u16);
            }
        }
        let s = FiniteSemigroup { n, table: flat, unit };
        if let Some((a, b, c)) = s.associativity_failure() {
            return invalid(format!("not associative: ({a}*{b})*{c} != {a}*({b}*{c})"));
        }
        if let Some(u) = unit {
            if u >= n {
                return Err(Error::OutOfRange { element: u, size: n });
            }
            if let Some(a) = (0..n).find(|&a| s.mul(u, a) != a || s.mul(a, u) != a) {
                return invalid(format!("{u} is not a unit: fails on {a}"));
            }
        }
        Ok(s)
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize, unit: Option<usize>) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect();
        FiniteSemigroup::new(table, unit).expect("construction is a semigroup")
    }

    fn associativity_failure(&self) -> Option<(usize, usize, usize)> {
        for a in 0..self.n {
            for b in 0..self.n {
                let ab = self.mul(a, b);
                for c in 0..self.n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    /// The declared unit.
    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    /// A two-sided identity, declared or not.
    pub fn find_identity(&self) -> Option<usize> {
        self.unit
            .or_else(|| (0..self.n).find(|&u| (0..self.n).all(|a| self.mul(u, a) == a && self.mul(a, u) == a)))
    }

    /// Same table with the identity (if any) declared as unit.
    pub fn as_monoid(&self) -> Option<FiniteSemigroup> {
        self.find_identity().map(|u| FiniteSemigroup { unit: Some(u), ..self.clone() })
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.mul(a, b)).collect()).collect()
    }

    /// Product of a nonempty word; the empty word gives the unit if there is one.
    pub fn product(&self, word: &[usize]) -> Option<usize> {
        let mut it = word.iter().copied();
        match it.next() {
            Some(first) => Some(it.fold(first, |acc, x| self.mul(acc, x))),
            None => self.find_identity(),
        }
    }

    /// `a^k` for `k >= 1`.
    pub fn power(&self, a: usize, k: usize) -> usize {
        assert!(k >= 1, "powers start at 1");
        (1..k).fold(a, |acc, _| self.mul(acc, a))
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        self.mul(a, a) == a
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Multiplies in `S + ε`, with `None` for the empty word.
    fn mul_opt(&self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(a), Some(b)) => Some(self.mul(a, b)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    // Curated constructions.

    pub fn trivial() -> Self {
        Self::from_fn(1, |_, _| 0, Some(0))
    }

    pub fn cyclic_group(n: usize) -> Self {
        Self::from_fn(n, |a, b| (a + b) % n, Some(0))
    }

    pub fn left_zero(n: usize) -> Self {
        Self::from_fn(n, |a, _| a, None)
    }

    pub fn right_zero(n: usize) -> Self {
        Self::from_fn(n, |_, b| b, None)
    }

    /// `I × J` with `(i,j)(k,l) = (i,l)`; element `i*cols + j`.
    pub fn rectangular_band(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows * cols, |a, b| (a / cols) * cols + b % cols, None)
    }

    /// Chain semilattice `0 < 1 < … < n-1` under minimum; `n-1` is the unit.
    pub fn chain(n: usize) -> Self {
        Self::from_fn(n, |a, b| a.min(b), Some(n - 1))
    }

    /// All products equal to 0.
    pub fn null(n: usize) -> Self {
        Self::from_fn(n, |_, _| 0, None)
    }

    /// `⟨a⟩` with `a^(index+period) = a^index`; element `i` is `a^(i+1)`.
    pub fn monogenic(index: usize, period: usize) -> Self {
        assert!(index >= 1 && period >= 1);
        let n = index + period - 1;
        let reduce = |e: usize| if e <= n { e } else { index + (e - index) % period };
        Self::from_fn(n, move |a, b| reduce(a + b + 2) - 1, None)
    }

    pub fn direct_product(a: &FiniteSemigroup, b: &FiniteSemigroup) -> Self {
        let m = b.n;
        let unit = match (a.find_identity(), b.find_identity()) {
            (Some(u), Some(v)) => Some(u * m + v),
            _ => None,
        };
        Self::from_fn(a.n * m, |x, y| a.mul(x / m, y / m) * m + b.mul(x % m, y % m), unit)
    }

    /// `S¹`: a fresh identity appended as the last element.
    pub fn with_identity(s: &FiniteSemigroup) -> Self {
        let n = s.n;
        Self::from_fn(
            n + 1,
            |a, b| {
                if a == n {
                    b
                } else if b == n {
                    a
                } else {
                    s.mul(a, b)
                }
            },
            Some(n),
        )
    }

    /// Brandt semigroup: matrix units `E_ij` (element `i*n+j`) and zero (last).
    pub fn brandt(n: usize) -> Self {
        let z = n * n;
        Self::from_fn(
            z + 1,
            |a, b| {
                if a == z || b == z || a % n != b / n {
                    z
                } else {
                    (a / n) * n + b % n
                }
            },
            None,
        )
    }

    /// Words over `{a, b}` without a repeated letter and of length at most 2,
    /// longer products being 0: elements `1, a, b, ab, ba, 0`.
    pub fn alternating_word_monoid() -> Self {
        let words = ["", "a", "b", "ab", "ba"];
        Self::from_fn(
            6,
            |x, y| {
                if x == 5 || y == 5 {
                    return 5;
                }
                let w = format!("{}{}", words[x], words[y]);
                words.iter().position(|&v| v == w).unwrap_or(5)
            },
            Some(0),
        )
    }

    /// Monoid of words over `letters` letters of length at most `max_len`, longer products 0.
    pub fn nilpotent_word_monoid(letters: usize, max_len: usize) -> Self {
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for l in 0..letters {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        let zero = words.len();
        let index: HashMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Self::from_fn(
            zero + 1,
            |x, y| {
                if x == zero || y == zero {
                    return zero;
                }
                let mut w = words[x].clone();
                w.extend_from_slice(&words[y]);
                index.get(&w).copied().unwrap_or(zero)
            },
            Some(0),
        )
    }
}

/// Least `ω ≥ 1` with `s^ω` idempotent for every element.
pub fn omega(s: &FiniteSemigroup) -> usize {
    (1..)
        .find(|&k| (0..s.size()).all(|a| s.is_idempotent(s.power(a, k))))
        .expect("finite semigroups have an idempotent power")
}

pub fn idempotents(s: &FiniteSemigroup) -> Vec<usize> {
    (0..s.size()).filter(|&a| s.is_idempotent(a)).collect()
}

/// `a^! = a^ω`.
pub fn factorial(s: &FiniteSemigroup, a: usize) -> usize {
    s.power(a, omega(s))
}

/// Green's preorders and classes. `prefix[a][b]` says `a` is a prefix of `b`,
/// i.e. `b ∈ {a} ∪ aS`; suffix and infix likewise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreenData {
    pub prefix: Vec<Vec<bool>>,
    pub suffix: Vec<Vec<bool>>,
    pub infix: Vec<Vec<bool>>,
    pub r_class: Vec<usize>,
    pub l_class: Vec<usize>,
    pub j_class: Vec<usize>,
    pub h_class: Vec<usize>,
}

impl GreenData {
    /// Some element is a prefix of both.
    pub fn common_prefix(&self, a: usize, b: usize) -> bool {
        (0..self.prefix.len()).any(|c| self.prefix[c][a] && self.prefix[c][b])
    }

    pub fn common_suffix(&self, a: usize, b: usize) -> bool {
        (0..self.suffix.len()).any(|c| self.suffix[c][a] && self.suffix[c][b])
    }

    /// Infixes of `e`.
    pub fn down_set(&self, e: usize) -> Vec<usize> {
        (0..self.infix.len()).filter(|&a| self.infix[a][e]).collect()
    }
}

fn classes_of(rel: &[Vec<bool>]) -> Vec<usize> {
    let n = rel.len();
    let mut id = vec![usize::MAX; n];
    let mut next = 0;
    for a in 0..n {
        if id[a] == usize::MAX {
            for b in a..n {
                if rel[a][b] && rel[b][a] {
                    id[b] = next;
                }
            }
            next += 1;
        }
    }
    id
}

pub fn green(s: &FiniteSemigroup) -> GreenData {
    let n = s.size();
    let mut prefix = vec![vec![false; n]; n];
    let mut suffix = vec![vec![false; n]; n];
    let mut infix = vec![vec![false; n]; n];
    for a in 0..n {
        prefix[a][a] = true;
        suffix[a][a] = true;
        infix[a][a] = true;
        for x in 0..n {
            prefix[a][s.mul(a, x)] = true;
            suffix[a][s.mul(x, a)] = true;
            infix[a][s.mul(a, x)] = true;
            infix[a][s.mul(x, a)] = true;
            for y in 0..n {
                infix[a][s.mul(s.mul(x, a), y)] = true;
            }
        }
    }
    let r_class = classes_of(&prefix);
    let l_class = classes_of(&suffix);
    let j_class = classes_of(&infix);
    let pairs: Vec<(usize, usize)> = (0..n).map(|a| (r_class[a], l_class[a])).collect();
    let h_class = {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        pairs
            .iter()
            .map(|p| {
                let k = seen.len();
                *seen.entry(*p).or_insert(k)
            })
            .collect()
    };
    GreenData {
        prefix,
        suffix,
        infix,
        r_class,
        l_class,
        j_class,
        h_class,
    }
}

/// Outcome of checking one identity; the counterexample lists the
/// quantified variables in order and is the lexicographically least.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityOutcome {
    pub name: String,
    pub holds: bool,
    pub counterexample: Option<Vec<usize>>,
}

impl IdentityOutcome {
    fn from_search(name: &str, counterexample: Option<Vec<usize>>) -> Self {
        IdentityOutcome {
            name: name.to_string(),
            holds: counterexample.is_none(),
            counterexample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identities: Vec<IdentityOutcome>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|i| i.holds)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityOutcome> {
        self.identities.iter().find(|i| i.name == name)
    }
}

/// `exyf = eyxf` for idempotents `e, f`; counterexample `(e, x, y, f)`.
pub fn is_almost_commutative(s: &FiniteSemigroup) -> IdentityOutcome {
    let ids = idempotents(s);
    let n = s.size();
    let mut found = None;
    'outer: for &e in &ids {
        for x in 0..n {
            for y in 0..n {
                for &f in &ids {
                    let l = s.mul(s.mul(s.mul(e, x), y), f);
                    let r = s.mul(s.mul(s.mul(e, y), x), f);
                    if l != r {
                        found = Some(vec![e, x, y, f]);
                        break 'outer;
                    }
                }
            }
        }
    }
    IdentityOutcome::from_search("exyf=eyxf", found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyntacticCount {
    Exact(usize),
    Overflow,
}

impl SyntacticCount {
    pub fn value(self) -> Option<usize> {
        match self {
            SyntacticCount::Exact(c) => Some(c),
            SyntacticCount::Overflow => None,
        }
    }
}

/// All tuples over `0..base` of length `len`, lexicographic.
fn all_words(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.checked_pow(len as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut code| {
        let mut w = vec![0; len];
        for slot in w.iter_mut().rev() {
            *slot = code % base;
            code /= base;
        }
        w
    })
}

/// Number of classes of the syntactic congruence on `S^k`, or `Overflow`
/// past `cap`.
///
/// The outer contexts may be empty, so two tuples are equivalent exactly when
/// `a_1 c_1 a_2 … c_{k-1} a_k` agree for every inner context `c_i ∈ S + ε`.
pub fn syntactic_class_count(s: &FiniteSemigroup, k: usize, cap: usize) -> Result<SyntacticCount> {
    if k == 0 {
        return Ok(SyntacticCount::Exact(1));
    }
    let n = s.size();
    let tuples = (n as u128).pow(k as u32);
    let contexts = ((n + 1) as u128).pow(k as u32 - 1);
    check_cap("syntactic congruence work", tuples * contexts, Caps::get().search_nodes as u128)?;
    let ctx: Vec<Vec<Option<usize>>> = all_words(n + 1, k - 1)
        .map(|w| w.into_iter().map(|c| if c == n { None } else { Some(c) }).collect())
        .collect();
    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    for t in all_words(n, k) {
        let key: Vec<u16> = ctx
            .iter()
            .map(|c| {
                let mut acc = t[0];
                for i in 1..k {
                    acc = s.mul_opt(Some(acc), c[i - 1]).expect("nonempty");
                    acc = s.mul(acc, t[i]);
                }
                acc as u16
            })
            .collect();
        seen.insert(key);
        if seen.len() > cap {
            return Ok(SyntacticCount::Overflow);
        }
    }
    Ok(SyntacticCount::Exact(seen.len()))
}

/// The same count straight from the definition, with all `k + 1` contexts.
pub fn syntactic_class_count_brute_force(s: &FiniteSemigroup, k: usize) -> Result<usize> {
    let n = s.size();
    let work = (n as u128).pow(k as u32) * ((n + 1) as u128).pow(k as u32 + 1);
    check_cap("syntactic congruence work", work, Caps::get().search_nodes as u128)?;
    let ctx: Vec<Vec<Option<usize>>> = all_words(n + 1, k + 1)
        .map(|w| w.into_iter().map(|c| if c == n { None } else { Some(c) }).collect())
        .collect();
    let mut seen: HashSet<Vec<Option<usize>>> = HashSet::new();
    for t in all_words(n, k) {
        let key: Vec<Option<usize>> = ctx
            .iter()
            .map(|c| {
                let mut acc = c[0];
                for i in 0..k {
                    acc = s.mul_opt(acc, Some(t[i]));
                    acc = s.mul_opt(acc, c[i + 1]);
                }
                acc
            })
            .collect();
        seen.insert(key);
    }
    Ok(seen.len())
}

/// Checks that words of equal length `≤ max_len` agreeing on the first `k`
/// letters, the last `k` letters and the letter multiset have equal
/// products. Returns the first conflicting pair of words.
pub fn prefix_suffix_multiset_determines(
    s: &FiniteSemigroup,
    k: usize,
    max_len: usize,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let n = s.size();
    let work: u128 = (1..=max_len).map(|l| (n as u128).pow(l as u32)).sum();
    check_cap("word enumeration", work, Caps::get().search_nodes as u128)?;
    for len in 1..=max_len {
        if len <= 2 * k {
            // the prefix and suffix already cover the word
            continue;
        }
        let mut seen: HashMap<(Vec<usize>, Vec<usize>, Vec<usize>), (usize, Vec<usize>)> = HashMap::new();
        for w in all_words(n, len) {
            let mut counts = vec![0usize; n];
            for &x in &w {
                counts[x] += 1;
            }
            let key = (w[..k].to_vec(), w[len - k..].to_vec(), counts);
            let p = s.product(&w).expect("nonempty");
            match seen.get(&key) {
                Some((q, other)) if *q != p => return Ok(Some((other.clone(), w))),
                Some(_) => {}
                None => {
                    seen.insert(key, (p, w));
                }
            }
        }
    }
    Ok(None)
}

/// Subsemigroup generated by `gens`.
pub fn generated(s: &FiniteSemigroup, gens: &[usize]) -> BTreeSet<usize> {
    let mut set: BTreeSet<usize> = gens.iter().copied().collect();
    let mut frontier: Vec<usize> = set.iter().copied().collect();
    while let Some(a) = frontier.pop() {
        let current: Vec<usize> = set.iter().copied().collect();
        for b in current {
            for c in [s.mul(a, b), s.mul(b, a)] {
                if set.insert(c) {
                    frontier.push(c);
                }
            }
        }
    }
    set
}

/// Evaluates the seven identities over all applicable tuples.
pub fn identity_suite(s: &FiniteSemigroup) -> IdentityReport {
    let n = s.size();
    let w = omega(s);
    let ids = idempotents(s);
    let g = green(s);
    let bang = |a: usize| s.power(a, w);
    let m = |a: usize, b: usize| s.mul(a, b);

    let mut out = Vec::new();

    let mut cx = None;
    'a: for &e in &ids {
        for &f in &ids {
            let ef = m(e, f);
            if ef != s.power(ef, w + 1) {
                cx = Some(vec![e, f]);
                break 'a;
            }
        }
    }
    out.push(IdentityOutcome::from_search("ef=(ef)^(w+1)", cx));

    let mut cx = None;
    'b: for &e in &ids {
        for &f in &ids {
            let ef = m(e, f);
            if ef != m(ef, ef) {
                cx = Some(vec![e, f]);
                break 'b;
            }
        }
    }
    out.push(IdentityOutcome::from_search("ef=efef", cx));

    let exf = |name: &str| {
        let mut cx = None;
        'c: for &e in &ids {
            for x in 0..n {
                for &f in &ids {
                    if m(m(e, x), f) != m(m(m(e, x), e), f) {
                        cx = Some(vec![e, x, f]);
                        break 'c;
                    }
                }
            }
        }
        IdentityOutcome::from_search(name, cx)
    };
    out.push(exf("exf=exef"));
    out.push(exf("eaf=eaef"));

    let mut cx = None;
    'd: for a in 0..n {
        for b in 0..n {
            if bang(m(a, b)) != m(bang(a), bang(b)) {
                cx = Some(vec![a, b]);
                break 'd;
            }
        }
    }
    out.push(IdentityOutcome::from_search("(ab)!=a!b!", cx));

    let mut cx = None;
    'e: for &e in &ids {
        for a in 0..n {
            for b in 0..n {
                if m(m(e, m(a, b)), e) != m(m(m(e, a), e), m(m(e, b), e)) {
                    cx = Some(vec![e, a, b]);
                    break 'e;
                }
            }
        }
    }
    out.push(IdentityOutcome::from_search("e(ab)e=(eae)(ebe)", cx));

    let mut cx = None;
    'f: for &e in &ids {
        for &f in &ids {
            let mut gens = g.down_set(e);
            gens.extend(g.down_set(f));
            let sub = generated(s, &gens);
            for &x in &ids {
                if sub.contains(&x) && m(e, f) != m(m(e, x), f) {
                    cx = Some(vec![e, f, x]);
                    break 'f;
                }
            }
        }
    }
    out.push(IdentityOutcome::from_search("ef=egf", cx));

    IdentityReport { identities: out }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremiseFlags {
    /// `A² = A`.
    pub surjective: bool,
    /// `Σ` generates `A`.
    pub generates: bool,
    /// Distinct elements differ in some two-sided context `x · y`.
    pub context_separated: bool,
}

impl PremiseFlags {
    pub fn generator_premises(&self) -> bool {
        self.surjective && self.generates
    }
}

pub fn premise_checks(s: &FiniteSemigroup, sigma: &[usize]) -> Result<PremiseFlags> {
    let n = s.size();
    if let Some(&bad) = sigma.iter().find(|&&x| x >= n) {
        return Err(Error::OutOfRange { element: bad, size: n });
    }
    let mut image = vec![false; n];
    for a in 0..n {
        for b in 0..n {
            image[s.mul(a, b)] = true;
        }
    }
    let separated = (0..n).all(|a| {
        (a + 1..n).all(|b| (0..n).any(|x| (0..n).any(|y| s.mul(s.mul(x, a), y) != s.mul(s.mul(x, b), y))))
    });
    Ok(PremiseFlags {
        surjective: image.iter().all(|&v| v),
        generates: generated(s, sigma).len() == n,
        context_separated: separated,
    })
}

/// Counts that stop growing: some value repeats, and none is larger afterwards.
pub fn counts_settle(counts: &[SyntacticCount]) -> bool {
    let vals: Option<Vec<usize>> = counts.iter().map(|c| c.value()).collect();
    let Some(vals) = vals else { return false };
    match (1..vals.len()).find(|&i| vals[i] == vals[i - 1]) {
        Some(i) => vals[i..].windows(2).all(|w| w[1] <= w[0]),
        None => false,
    }
}

/// Counts that increase strictly as long as they are exact.
pub fn counts_grow(counts: &[SyntacticCount]) -> bool {
    let exact: Vec<usize> = counts.iter().map_while(|c| c.value()).collect();
    exact.windows(2).all(|w| w[1] > w[0])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemicommutativeReport {
    pub equation: IdentityOutcome,
    /// Least `k` for which prefix, suffix and multiset determine products
    /// of words up to `max_len`; `None` if no `k < max_len / 2` works (larger
    /// `k` hold trivially).
    pub prefix_suffix_k: Option<usize>,
    pub max_len: usize,
    /// Class counts for `k = 1..=k_max`.
    pub counts: Vec<SyntacticCount>,
    pub counts_settle: bool,
    pub counts_grow: bool,
    /// The three conditions agree on the computed range.
    pub consistent: bool,
}

pub fn semicommutative_report(
    s: &FiniteSemigroup,
    k_max: usize,
    cap: usize,
    max_len: usize,
) -> Result<SemicommutativeReport> {
    let equation = is_almost_commutative(s);
    let mut prefix_suffix_k = None;
    for k in 0..max_len.div_ceil(2) {
        if prefix_suffix_multiset_determines(s, k, max_len)?.is_none() {
            prefix_suffix_k = Some(k);
            break;
        }
    }
    let counts = (1..=k_max)
        .map(|k| syntactic_class_count(s, k, cap))
        .collect::<Result<Vec<_>>>()?;
    let settle = counts_settle(&counts);
    let grow = counts_grow(&counts);
    let consistent = if equation.holds {
        prefix_suffix_k.is_some() && !grow
    } else {
        !settle
    };
    Ok(SemicommutativeReport {
        equation,
        prefix_suffix_k,
        max_len,
        counts,
        counts_settle: settle,
        counts_grow: grow,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitaryReport {
    pub premises: PremiseFlags,
    /// Rows `A`, columns `Σ`.
    pub order_rows_all: crate::kronecker::OrderStatus,
    /// Rows `Σ`, columns `A`.
    pub order_cols_all: crate::kronecker::OrderStatus,
    pub finite_detected: bool,
    pub almost_commutative: IdentityOutcome,
    /// `e(axb)^!f = e(ayb)^!f` for generators `x, y` inside `e, f`.
    pub generator_swap: IdentityOutcome,
    pub swallow: IdentityOutcome,
    /// Finite order was not detected, or every implied identity holds.
    pub consistent: bool,
}

/// Finite-order status of both multiplication matrices of `Σ` against `A`,
/// with the identities that finite order forces.
pub fn finitary_generator_check(s: &FiniteSemigroup, sigma: &[usize], budget: usize) -> Result<FinitaryReport> {
    use crate::kronecker::{finite_order, multiplication_matrix};
    let premises = premise_checks(s, sigma)?;
    if !premises.generator_premises() {
        return invalid("generator check needs A² = A and Σ generating A");
    }
    let all: Vec<usize> = (0..s.size()).collect();
    let order_rows_all = finite_order(&multiplication_matrix(s, &all, sigma)?, budget)?;
    let order_cols_all = finite_order(&multiplication_matrix(s, sigma, &all)?, budget)?;
    let finite_detected = order_rows_all.is_finite() || order_cols_all.is_finite();

    let n = s.size();
    let w = omega(s);
    let ids = idempotents(s);
    let g = green(s);
    let bang = |a: usize| s.power(a, w);
    let mut cx = None;
    'swap: for &e in &ids {
        for &f in &ids {
            for &x in sigma.iter().filter(|&&x| g.infix[x][e]) {
                for &y in sigma.iter().filter(|&&y| g.infix[y][f]) {
                    for a in 0..=n {
                        for b in 0..=n {
                            let a_ = (a < n).then_some(a);
                            let b_ = (b < n).then_some(b);
                            let lx = s.mul_opt(s.mul_opt(a_, Some(x)), b_).expect("nonempty");
                            let ly = s.mul_opt(s.mul_opt(a_, Some(y)), b_).expect("nonempty");
                            let l = s.mul(s.mul(e, bang(lx)), f);
                            let r = s.mul(s.mul(e, bang(ly)), f);
                            if l != r {
                                cx = Some(vec![e, f, x, y, a, b]);
                                break 'swap;
                            }
                        }
                    }
                }
            }
        }
    }
    let generator_swap = IdentityOutcome::from_search("e(axb)!f=e(ayb)!f", cx);
    let suite = identity_suite(s);
    let swallow = suite.get("ef=egf").expect("suite has swallow").clone();
    let almost_commutative = is_almost_commutative(s);
    let consistent = !finite_detected || (almost_commutative.holds && generator_swap.holds && swallow.holds);
    Ok(FinitaryReport {
        premises,
        order_rows_all,
        order_cols_all,
        finite_detected,
        almost_commutative,
        generator_swap,
        swallow,
        consistent,
    })
}

/// Every associative table on `n` elements, in lexicographic order of the
/// flattened table. Exhaustive for `n ≤ 3`.
pub fn associative_tables(n: usize) -> Result<Vec<FiniteSemigroup>> {
    check_cap("semigroup tables", (n as u128).pow((n * n) as u32), Caps::get().search_nodes as u128)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let cells = n * n;
    let mut out = Vec::new();
    // depth-first with associativity checked on every fully known triple
    let mut table = vec![0u16; cells];
    fn ok_so_far(t: &[u16], n: usize, filled: usize) -> bool {
        let get = |a: usize, b: usize| -> Option<usize> {
            let i = a * n + b;
            (i < filled).then(|| t[i] as usize)
        };
        for a in 0..n {
            for b in 0..n {
                let Some(ab) = get(a, b) else { continue };
                for c in 0..n {
                    let (Some(l), Some(bc)) = (get(ab, c), get(b, c)) else { continue };
                    if let Some(r) = get(a, bc) {
                        if l != r {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
    fn rec(t: &mut Vec<u16>, n: usize, pos: usize, out: &mut Vec<FiniteSemigroup>) {
        if pos == n * n {
            out.push(FiniteSemigroup {
                n,
                table: t.clone(),
                unit: None,
            });
            return;
        }
        for v in 0..n as u16 {
            t[pos] = v;
            if ok_so_far(t, n, pos + 1) {
                rec(t, n, pos + 1, out);
            }
        }
    }
    rec(&mut table, n, 0, &mut out);
    Ok(out)
}

/// Named semigroups beyond the exhaustive range.
pub fn curated_semigroups() -> Vec<(String, FiniteSemigroup)> {
    let s = FiniteSemigroup::direct_product;
    vec![
        ("cyclic4".into(), FiniteSemigroup::cyclic_group(4)),
        ("klein4".into(), s(&FiniteSemigroup::cyclic_group(2), &FiniteSemigroup::cyclic_group(2))),
        ("left-zero4".into(), FiniteSemigroup::left_zero(4)),
        ("right-zero4".into(), FiniteSemigroup::right_zero(4)),
        ("rect-band2x2".into(), FiniteSemigroup::rectangular_band(2, 2)),
        ("chain4".into(), FiniteSemigroup::chain(4)),
        ("null4".into(), FiniteSemigroup::null(4)),
        ("monogenic2-3".into(), FiniteSemigroup::monogenic(2, 3)),
        ("monogenic3-2".into(), FiniteSemigroup::monogenic(3, 2)),
        ("words1-2".into(), FiniteSemigroup::nilpotent_word_monoid(1, 2)),
        ("words2-1".into(), FiniteSemigroup::nilpotent_word_monoid(2, 1)),
        ("z2xchain2".into(), s(&FiniteSemigroup::cyclic_group(2), &FiniteSemigroup::chain(2))),
        ("left-zero2xz2".into(), s(&FiniteSemigroup::left_zero(2), &FiniteSemigroup::cyclic_group(2))),
        ("left-zero3-with-1".into(), FiniteSemigroup::with_identity(&FiniteSemigroup::left_zero(3))),
        ("brandt2".into(), FiniteSemigroup::brandt(2)),
        ("brandt2-with-1".into(), FiniteSemigroup::with_identity(&FiniteSemigroup::brandt(2))),
        ("alternating-words".into(), FiniteSemigroup::alternating_word_monoid()),
    ]
}

/// All associative tables of size 1 to 3 followed by the curated family,
/// with stable names.
pub fn semigroup_corpus() -> Vec<(String, FiniteSemigroup)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for (i, t) in associative_tables(n).expect("small enumeration").into_iter().enumerate() {
            out.push((format!("table{n}-{i:03}"), t));
        }
    }
    out.extend(curated_semigroups());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(validate(FiniteSemigroup::cyclic_group(3).rows(), Some(0)).is_ok());
        // 0*1 = 1, 1*0 = 0, 1*1 = 0, 0*0 = 1: (0*0)*1 = 1*1 = 0 but 0*(0*1) = 0*1 = 1
        let bad = validate(vec![vec![1, 1], vec![0, 0]], None);
        assert!(bad.is_err());
        assert!(validate(FiniteSemigroup::left_zero(3).rows(), None).is_ok());
        assert!(validate(FiniteSemigroup::left_zero(3).rows(), Some(0)).is_err());
        assert!(validate(vec![vec![0, 2], vec![0, 0]], None).is_err());
    }

    #[test]
    fn omega_values() {
        assert_eq!(omega(&FiniteSemigroup::cyclic_group(3)), 3);
        assert_eq!(omega(&FiniteSemigroup::rectangular_band(2, 3)), 1);
        assert_eq!(omega(&FiniteSemigroup::monogenic(2, 2)), 2);
        assert_eq!(omega(&FiniteSemigroup::monogenic(3, 2)), 4);
        for (_, s) in semigroup_corpus() {
            let w = omega(&s);
            assert!((0..s.size()).all(|a| s.is_idempotent(s.power(a, w))));
            if w > 1 {
                assert!((0..s.size()).any(|a| !s.is_idempotent(s.power(a, w - 1))));
            }
        }
    }

    #[test]
    fn idempotents_and_factorial() {
        let m = FiniteSemigroup::alternating_word_monoid();
        assert!(idempotents(&m).contains(&0));
        assert_eq!(idempotents(&FiniteSemigroup::left_zero(3)).len(), 3);
        let z3 = FiniteSemigroup::cyclic_group(3);
        assert_eq!(factorial(&z3, 1), 0);
    }

    #[test]
    fn green_examples() {
        let g = green(&FiniteSemigroup::cyclic_group(4));
        assert!(g.j_class.iter().all(|&c| c == 0));
        assert!(g.h_class.iter().all(|&c| c == 0));
        let lz = green(&FiniteSemigroup::left_zero(3));
        // xy = x: aS = {a}, Sa = S
        assert!(lz.l_class.iter().all(|&c| c == 0));
        assert_eq!(lz.r_class, vec![0, 1, 2]);
        let rb = green(&FiniteSemigroup::rectangular_band(2, 2));
        assert!(rb.j_class.iter().all(|&c| c == 0));
        assert_eq!(rb.h_class, vec![0, 1, 2, 3]);
        assert!(rb.common_prefix(0, 1));
    }

    #[test]
    fn almost_commutativity() {
        assert!(is_almost_commutative(&FiniteSemigroup::cyclic_group(5)).holds);
        assert!(is_almost_commutative(&FiniteSemigroup::left_zero(3)).holds);
        let m = is_almost_commutative(&FiniteSemigroup::alternating_word_monoid());
        assert!(!m.holds);
        assert_eq!(m.counterexample, Some(vec![0, 1, 2, 0]));
    }

    #[test]
    fn fast_count_matches_definition() {
        for (_, s) in semigroup_corpus().into_iter().step_by(7) {
            for k in 0..=3 {
                let fast = syntactic_class_count(&s, k, usize::MAX).unwrap();
                assert_eq!(fast, SyntacticCount::Exact(syntactic_class_count_brute_force(&s, k).unwrap()));
            }
        }
    }

    #[test]
    fn syntactic_counts() {
        for k in 1..=4 {
            assert_eq!(syntactic_class_count(&FiniteSemigroup::trivial(), k, 100).unwrap(), SyntacticCount::Exact(1));
        }
        let c = FiniteSemigroup::chain(3);
        for k in 1..=4 {
            assert!(syntactic_class_count(&c, k, 100).unwrap().value().unwrap() <= 3);
        }
        let m = FiniteSemigroup::alternating_word_monoid();
        let counts: Vec<usize> = (1..=4).map(|k| syntactic_class_count(&m, k, 1 << 20).unwrap().value().unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[1] > w[0]), "{counts:?}");
        assert_eq!(syntactic_class_count(&m, 4, 3).unwrap(), SyntacticCount::Overflow);
    }

    #[test]
    fn prefix_suffix_examples() {
        assert!(prefix_suffix_multiset_determines(&FiniteSemigroup::cyclic_group(3), 0, 6).unwrap().is_none());
        assert!(prefix_suffix_multiset_determines(&FiniteSemigroup::left_zero(3), 1, 6).unwrap().is_none());
        let m = FiniteSemigroup::alternating_word_monoid();
        for k in 0..=2 {
            assert!(prefix_suffix_multiset_determines(&m, k, 8).unwrap().is_some());
        }
        // a 4-letter word 1 a b 1 against 1 b a 1
        let (x, y) = prefix_suffix_multiset_determines(&m, 1, 4).unwrap().unwrap();
        assert_ne!(m.product(&x), m.product(&y));
    }

    #[test]
    fn identity_examples() {
        assert!(identity_suite(&FiniteSemigroup::cyclic_group(3)).all_hold());
        assert!(identity_suite(&FiniteSemigroup::rectangular_band(2, 2)).get("ef=efef").unwrap().holds);
        let r = identity_suite(&FiniteSemigroup::alternating_word_monoid());
        for i in &r.identities {
            if let Some(cx) = &i.counterexample {
                assert!(!i.holds && !cx.is_empty());
            }
        }
    }

    #[test]
    fn premises() {
        let m = FiniteSemigroup::alternating_word_monoid();
        let p = premise_checks(&m, &[0, 1, 2]).unwrap();
        assert!(p.surjective && p.generates);
        let all: Vec<usize> = (0..3).collect();
        let z3 = premise_checks(&FiniteSemigroup::cyclic_group(3), &all).unwrap();
        assert!(z3.context_separated);
        assert!(!premise_checks(&FiniteSemigroup::null(3), &all).unwrap().surjective);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(associative_tables(1).unwrap().len(), 1);
        assert_eq!(associative_tables(2).unwrap().len(), 8);
        assert_eq!(associative_tables(3).unwrap().len(), 113);
    }

    #[test]
    fn constructions_are_semigroups() {
        for (name, s) in curated_semigroups() {
            assert!(FiniteSemigroup::new(s.rows(), s.unit()).is_ok(), "{name}");
        }
        assert_eq!(FiniteSemigroup::brandt(2).size(), 5);
        assert_eq!(FiniteSemigroup::nilpotent_word_monoid(1, 2).size(), 4);
        assert_eq!(FiniteSemigroup::monogenic(2, 3).size(), 4);
    }
}
