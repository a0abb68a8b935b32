//! Finite relational structures and their quantifier-free types.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{check_cap, invalid, Error, Result};

/// Subsets of a universe of at most 64 elements.
pub type Subset = u64;

pub(crate) fn full_set(n: usize) -> Subset {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn elements(set: Subset) -> impl Iterator<Item = usize> {
    let mut rest = set;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

pub(crate) fn subset_of(items: &[usize]) -> Subset {
    items.iter().fold(0, |acc, &i| acc | (1u64 << i))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    relations: Vec<RelationSymbol>,
}

impl Vocabulary {
    pub fn new<S: Into<String>>(relations: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let relations: Vec<RelationSymbol> = relations
            .into_iter()
            .map(|(name, arity)| RelationSymbol {
                name: name.into(),
                arity,
            })
            .collect();
        let mut seen = HashSet::new();
        for r in &relations {
            if r.arity == 0 {
                return invalid(format!("relation `{}` has arity 0", r.name));
            }
            if !seen.insert(r.name.as_str()) {
                return invalid(format!("relation `{}` declared twice", r.name));
            }
        }
        Ok(Vocabulary { relations })
    }

    /// The equality-only vocabulary.
    pub fn empty() -> Self {
        Vocabulary::default()
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Largest arity, 0 for the equality-only vocabulary.
    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|r| r.arity).max().unwrap_or(0)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    /// Number of fact bits in a type of a `k`-tuple.
    fn fact_bits(&self, k: usize) -> usize {
        self.relations.iter().map(|r| k.pow(r.arity as u32)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RelationData {
    tuples: BTreeSet<Vec<usize>>,
    bits: Vec<u64>,
}

/// A finite relational structure on the universe `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    vocabulary: Vocabulary,
    n: usize,
    relations: Vec<RelationData>,
}

impl Structure {
    /// Builds a structure; `interpretations[i]` lists the tuples of relation `i`.
    pub fn new(vocabulary: Vocabulary, n: usize, interpretations: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if interpretations.len() != vocabulary.len() {
            return invalid(format!(
                "{} interpretations for {} relations",
                interpretations.len(),
                vocabulary.len()
            ));
        }
        let caps = Caps::get();
        let mut relations = Vec::with_capacity(vocabulary.len());
        for (sym, tuples) in vocabulary.relations().iter().zip(interpretations) {
            let cells = (n as u128).saturating_pow(sym.arity as u32);
            check_cap("relation table", cells, caps.relation_cells)?;
            let mut data = RelationData {
                tuples: BTreeSet::new(),
                bits: vec![0; (cells as usize).div_ceil(64)],
            };
            for t in tuples {
                if t.len() != sym.arity {
                    return invalid(format!(
                        "tuple {:?} has length {} but `{}` has arity {}",
                        t,
                        t.len(),
                        sym.name,
                        sym.arity
                    ));
                }
                if let Some(&e) = t.iter().find(|&&e| e >= n) {
                    return Err(Error::OutOfRange { element: e, size: n });
                }
                let idx = index_of(n, &t);
                data.bits[idx / 64] |= 1 << (idx % 64);
                data.tuples.insert(t);
            }
            relations.push(data);
        }
        Ok(Structure {
            vocabulary,
            n,
            relations,
        })
    }

    /// A structure over the equality-only vocabulary.
    pub fn bare(n: usize) -> Self {
        Structure {
            vocabulary: Vocabulary::empty(),
            n,
            relations: Vec::new(),
        }
    }

    /// A structure with a single binary relation `E` given by its pairs.
    pub fn binary(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let vocab = Vocabulary::new([("E", 2)])?;
        let tuples = pairs.into_iter().map(|(a, b)| vec![a, b]).collect();
        Structure::new(vocab, n, vec![tuples])
    }

    /// An undirected graph as a symmetric, loop-free binary relation `E`.
    pub fn graph(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (a, b) in edges {
            if a == b {
                return invalid(format!("loop at {a}"));
            }
            pairs.push((a, b));
            pairs.push((b, a));
        }
        Structure::binary(n, pairs)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn tuples(&self, rel: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[rel].tuples
    }

    /// Membership test; the tuple must be in range.
    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        let idx = index_of(self.n, tuple);
        self.relations[rel].bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// The image of the structure under the bijection `perm` (element `i` becomes `perm[i]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Structure> {
        if perm.len() != self.n || perm.iter().collect::<HashSet<_>>().len() != self.n || perm.iter().any(|&p| p >= self.n) {
            return invalid("relabeling is not a permutation of the universe");
        }
        let interp = self
            .relations
            .iter()
            .map(|r| r.tuples.iter().map(|t| t.iter().map(|&e| perm[e]).collect()).collect())
            .collect();
        Structure::new(self.vocabulary.clone(), self.n, interp)
    }

    /// The substructure induced on `set` with elements renumbered in increasing order.
    pub fn induced(&self, set: Subset) -> Result<Structure> {
        if self.n > 64 {
            return invalid("induced substructures need a universe of at most 64 elements");
        }
        let keep: Vec<usize> = elements(set & full_set(self.n)).collect();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &e) in keep.iter().enumerate() {
            pos[e] = i;
        }
        let interp = self
            .relations
            .iter()
            .map(|r| {
                r.tuples
                    .iter()
                    .filter(|t| t.iter().all(|&e| pos[e] != usize::MAX))
                    .map(|t| t.iter().map(|&e| pos[e]).collect())
                    .collect()
            })
            .collect();
        Structure::new(self.vocabulary.clone(), keep.len(), interp)
    }

    pub(crate) fn check_subset(&self, set: Subset) -> Result<()> {
        if self.n > 64 {
            return invalid("subset operations need a universe of at most 64 elements");
        }
        if set & !full_set(self.n) != 0 {
            let e = (set & !full_set(self.n)).trailing_zeros() as usize;
            return Err(Error::OutOfRange { element: e, size: self.n });
        }
        Ok(())
    }
}

fn index_of(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * n + e)
}

/// A tuple whose coordinates are elements or undefined.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialTuple(pub Vec<Option<usize>>);

impl PartialTuple {
    pub fn complete(elements: &[usize]) -> Self {
        PartialTuple(elements.iter().map(|&e| Some(e)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn defined(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().flatten().copied()
    }
}

const UNDEF: u8 = u8::MAX;

/// Canonical quantifier-free type of a partial tuple.
///
/// Facts are stored as one bit per (relation, index tuple) with index tuples
/// enumerated lexicographically, relations in vocabulary order. Bits on
/// index tuples touching an undefined coordinate are always 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QfType {
    mask: u64,
    eq: Vec<u8>,
    facts: Vec<u64>,
}

impl QfType {
    pub fn len(&self) -> usize {
        self.eq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eq.is_empty()
    }

    /// Bit `i` set iff coordinate `i` is defined.
    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Canonical block number per coordinate (numbered by first occurrence), `None` if undefined.
    pub fn partition(&self) -> Vec<Option<usize>> {
        self.eq.iter().map(|&b| (b != UNDEF).then_some(b as usize)).collect()
    }

    pub fn coordinates_equal(&self, i: usize, j: usize) -> bool {
        self.eq[i] != UNDEF && self.eq[i] == self.eq[j]
    }

    /// All facts as (relation index, coordinate indices).
    pub fn facts(&self, vocab: &Vocabulary) -> Vec<(usize, Vec<usize>)> {
        let k = self.len();
        let mut out = Vec::new();
        let mut offset = 0;
        for (r, sym) in vocab.relations().iter().enumerate() {
            let count = k.pow(sym.arity as u32);
            for idx in 0..count {
                let bit = offset + idx;
                if self.facts[bit / 64] >> (bit % 64) & 1 == 1 {
                    out.push((r, digits(idx, k, sym.arity)));
                }
            }
            offset += count;
        }
        out
    }

    /// Whether the fact `rel(coords)` is recorded.
    pub fn holds(&self, vocab: &Vocabulary, rel: usize, coords: &[usize]) -> bool {
        let k = self.len();
        let offset: usize = vocab.relations()[..rel].iter().map(|s| k.pow(s.arity as u32)).sum();
        let bit = offset + coords.iter().fold(0, |acc, &c| acc * k + c);
        self.facts[bit / 64] >> (bit % 64) & 1 == 1
    }

    /// Appends a compact encoding, used for composite keys.
    pub(crate) fn pack_into(&self, out: &mut Vec<u64>) {
        out.push(self.mask);
        let mut word = 0u64;
        for (i, &b) in self.eq.iter().enumerate() {
            word |= (b as u64 & 0xff) << ((i % 8) * 8);
            if i % 8 == 7 {
                out.push(word);
                word = 0;
            }
        }
        out.push(word);
        out.extend_from_slice(&self.facts);
    }
}

fn digits(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

/// Quantifier-free type of a (partial) tuple.
pub fn qf_type(s: &Structure, t: &PartialTuple) -> Result<QfType> {
    if t.len() > 64 {
        return invalid("tuples longer than 64 are not supported");
    }
    if let Some(e) = t.defined().find(|&e| e >= s.n) {
        return Err(Error::OutOfRange { element: e, size: s.n });
    }
    Ok(qf_type_unchecked(s, &t.0))
}

/// Quantifier-free type of a complete tuple.
pub fn qf_type_of(s: &Structure, t: &[usize]) -> Result<QfType> {
    qf_type(s, &PartialTuple::complete(t))
}

pub(crate) fn qf_type_unchecked(s: &Structure, coords: &[Option<usize>]) -> QfType {
    let k = coords.len();
    let mut mask = 0u64;
    let mut eq = vec![UNDEF; k];
    let mut blocks = 0u8;
    for i in 0..k {
        if let Some(e) = coords[i] {
            mask |= 1 << i;
            eq[i] = match (0..i).find(|&j| coords[j] == Some(e)) {
                Some(j) => eq[j],
                None => {
                    blocks += 1;
                    blocks - 1
                }
            };
        }
    }
    let nbits = s.vocabulary.fact_bits(k);
    let mut facts = vec![0u64; nbits.div_ceil(64)];
    let mut offset = 0;
    let mut tuple = Vec::new();
    for (r, sym) in s.vocabulary.relations().iter().enumerate() {
        let a = sym.arity;
        let count = k.pow(a as u32);
        if mask.count_ones() as usize == k && count > 0 {
            // Fast odometer over index tuples.
            let mut idx = vec![0usize; a];
            tuple.clear();
            tuple.extend(idx.iter().map(|&c| coords[c].unwrap()));
            for bit in 0..count {
                if s.holds(r, &tuple) {
                    facts[(offset + bit) / 64] |= 1 << ((offset + bit) % 64);
                }
                let mut p = a;
                while p > 0 {
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < k {
                        tuple[p] = coords[idx[p]].unwrap();
                        break;
                    }
                    idx[p] = 0;
                    tuple[p] = coords[0].unwrap();
                }
            }
        } else {
            for bit in 0..count {
                let d = digits(bit, k, a);
                if d.iter().all(|&c| coords[c].is_some()) {
                    tuple.clear();
                    tuple.extend(d.iter().map(|&c| coords[c].unwrap()));
                    if s.holds(r, &tuple) {
                        facts[(offset + bit) / 64] |= 1 << ((offset + bit) % 64);
                    }
                }
            }
        }
        offset += count;
    }
    QfType { mask, eq, facts }
}

/// Number of syntactically possible types of complete `k`-tuples, as log2.
///
/// Sums, over the equality partitions with `b` blocks, `2^(sum_R b^arity)`.
pub fn log2_possible_types(vocab: &Vocabulary, k: usize) -> f64 {
    // Stirling numbers of the second kind S(k, b) as f64.
    let mut stirling = vec![vec![0f64; k + 1]; k + 1];
    stirling[0][0] = 1.0;
    for i in 1..=k {
        for b in 1..=i {
            stirling[i][b] = b as f64 * stirling[i - 1][b] + stirling[i - 1][b - 1];
        }
    }
    let terms: Vec<f64> = (1..=k)
        .filter(|&b| stirling[k][b] > 0.0)
        .map(|b| {
            let exp: f64 = vocab.relations().iter().map(|r| (b as f64).powi(r.arity as i32)).sum();
            stirling[k][b].log2() + exp
        })
        .collect();
    if terms.is_empty() {
        return 0.0;
    }
    let top = terms.iter().cloned().fold(f64::MIN, f64::max);
    top + terms.iter().map(|t| (t - top).exp2()).sum::<f64>().log2()
}

/// Structure whose relations take tuples of subsets of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonadicStructure {
    n: usize,
    names: Vec<String>,
    arities: Vec<usize>,
    relations: Vec<HashSet<Vec<u32>>>,
}

impl MonadicStructure {
    pub fn new(n: usize, relations: Vec<(String, usize, Vec<Vec<u32>>)>) -> Result<Self> {
        let caps = Caps::get();
        check_cap("monadic universe", n as u128, caps.monadic_universe.min(31) as u128)?;
        let full = full_set(n) as u32;
        let mut names = Vec::new();
        let mut arities = Vec::new();
        let mut rels = Vec::new();
        for (name, arity, tuples) in relations {
            if arity == 0 {
                return invalid(format!("monadic relation `{name}` has arity 0"));
            }
            if names.contains(&name) {
                return invalid(format!("monadic relation `{name}` declared twice"));
            }
            let mut set = HashSet::new();
            for t in tuples {
                if t.len() != arity {
                    return invalid(format!("tuple of length {} for `{}` of arity {}", t.len(), name, arity));
                }
                if t.iter().any(|&m| m & !full != 0) {
                    return invalid(format!("subset outside the universe in `{name}`"));
                }
                set.insert(t);
            }
            names.push(name);
            arities.push(arity);
            rels.push(set);
        }
        Ok(MonadicStructure {
            n,
            names,
            arities,
            relations: rels,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn relation_names(&self) -> &[String] {
        &self.names
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.arities[rel]
    }

    pub fn holds(&self, rel: usize, sets: &[u32]) -> bool {
        self.relations[rel].contains(sets)
    }

    pub fn tuples(&self, rel: usize) -> impl Iterator<Item = &Vec<u32>> {
        self.relations[rel].iter()
    }
}

/// Replaces each relation by the set of singleton tuples of its members.
pub fn singleton_lifting(s: &Structure) -> Result<MonadicStructure> {
    let rels = s
        .vocabulary()
        .relations()
        .iter()
        .enumerate()
        .map(|(r, sym)| {
            let tuples = s.tuples(r).iter().map(|t| t.iter().map(|&e| 1u32 << e).collect()).collect();
            (sym.name.clone(), sym.arity, tuples)
        })
        .collect();
    MonadicStructure::new(s.universe_size(), rels)
}

/// Type of a partial tuple in the induced structure A|X.
///
/// The key is the internal type together with the types of the tuple
/// extended by every tuple of external elements of length `0..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalType {
    key: Vec<u64>,
}

/// Tuples of elements of `set` of every length `0..=m`, shortest first, lexicographic.
pub(crate) fn tuples_upto(set: Subset, m: usize) -> Vec<Vec<usize>> {
    let elems: Vec<usize> = elements(set).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(layer.len() * elems.len());
        for t in &layer {
            for &e in &elems {
                let mut u: Vec<usize> = t.clone();
                u.push(e);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn local_key(s: &Structure, t: &[Option<usize>], externals: &[Vec<usize>]) -> LocalType {
    let mut key = Vec::new();
    let mut buf: Vec<Option<usize>> = Vec::with_capacity(t.len() + 8);
    for ext in externals {
        buf.clear();
        buf.extend_from_slice(t);
        buf.extend(ext.iter().map(|&e| Some(e)));
        qf_type_unchecked(s, &buf).pack_into(&mut key);
    }
    LocalType { key }
}

/// Local type of `t` in A|X, with external tuples up to the maximal arity.
pub fn induced_local_type(s: &Structure, x: Subset, t: &PartialTuple) -> Result<LocalType> {
    induced_local_type_m(s, x, t, s.vocabulary().max_arity())
}

/// Local type of `t` in A|X, with external tuples of length at most `m`.
pub fn induced_local_type_m(s: &Structure, x: Subset, t: &PartialTuple, m: usize) -> Result<LocalType> {
    s.check_subset(x)?;
    for e in t.defined() {
        if e >= s.n || x >> e & 1 == 0 {
            return invalid(format!("coordinate {e} lies outside the subset"));
        }
    }
    let externals = tuples_upto(full_set(s.n) & !x, m);
    Ok(local_key(s, &t.0, &externals))
}

/// Partial tuples of length `m` with coordinates in `set` or undefined, lexicographic
/// with undefined first.
pub(crate) fn partial_tuples(set: Subset, m: usize) -> Vec<Vec<Option<usize>>> {
    let mut choices: Vec<Option<usize>> = vec![None];
    choices.extend(elements(set).map(Some));
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for t in &out {
            for &c in &choices {
                let mut u: Vec<Option<usize>> = t.clone();
                u.push(c);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

fn validate_partition(s: &Structure, parts: &[Subset]) -> Result<()> {
    s.check_subset(parts.iter().fold(0, |a, &p| a | p))?;
    let mut seen = 0u64;
    for &p in parts {
        if p & seen != 0 {
            return invalid("partition parts overlap");
        }
        seen |= p;
    }
    if seen != full_set(s.n) {
        return invalid("partition does not cover the universe");
    }
    Ok(())
}

/// Local type classes of all partial `m`-tuples over one part.
fn part_classes(s: &Structure, part: Subset, m: usize) -> BTreeMap<Vec<Option<usize>>, usize> {
    let externals = tuples_upto(full_set(s.n) & !part, m);
    let tuples = partial_tuples(part, m);
    let keys: Vec<LocalType> = tuples.iter().map(|t| local_key(s, t, &externals)).collect();
    let mut sorted: Vec<&LocalType> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    let ids: HashMap<&LocalType, usize> = sorted.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    tuples.into_iter().zip(keys.iter()).map(|(t, k)| (t, ids[k])).collect()
}

fn project(t: &[Option<usize>], part: Subset) -> Vec<Option<usize>> {
    t.iter().map(|c| c.filter(|&e| part >> e & 1 == 1)).collect()
}

/// The λ/γ tables of the compositionality construction.
#[derive(Debug, Clone)]
pub struct CompositionTables {
    /// Per part, the colour of each partial tuple over that part.
    pub lambda: Vec<BTreeMap<Vec<Option<usize>>, usize>>,
    /// Colour tuples (parts in increasing index order) to the type of the combined tuple.
    pub gamma: BTreeMap<Vec<usize>, QfType>,
    /// Number of colours.
    pub colours: usize,
    /// Number of (part choice, tuple) pairs reconstructed.
    pub checked: usize,
}

/// A tuple whose type is not determined by its projected local types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionConflict {
    pub first: Vec<Option<usize>>,
    pub second: Vec<Option<usize>>,
}

pub(crate) fn combinations(n: usize, l: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, l, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, l, &mut Vec::new(), &mut out);
    out
}

/// Builds λ per part and γ on colour tuples, and checks that γ applied to the
/// colours of the projections reproduces the type of every partial `m`-tuple
/// inside any `l` distinct parts.
pub fn composition_tables(
    s: &Structure,
    parts: &[Subset],
    l: usize,
    m: usize,
) -> Result<std::result::Result<CompositionTables, CompositionConflict>> {
    validate_partition(s, parts)?;
    if l == 0 || l > parts.len() {
        return invalid(format!("need 1 <= l <= {} parts, got {l}", parts.len()));
    }
    let mut lambda = Vec::with_capacity(parts.len());
    let mut offset = 0;
    for &p in parts {
        let mut classes = part_classes(s, p, m);
        let count = classes.values().max().map_or(0, |&c| c + 1);
        for c in classes.values_mut() {
            *c += offset;
        }
        offset += count;
        lambda.push(classes);
    }
    let mut gamma: BTreeMap<Vec<usize>, QfType> = BTreeMap::new();
    let mut witness: HashMap<Vec<usize>, Vec<Option<usize>>> = HashMap::new();
    let mut checked = 0;
    for choice in combinations(parts.len(), l) {
        let union = choice.iter().fold(0, |a, &i| a | parts[i]);
        for t in partial_tuples(union, m) {
            let colours: Vec<usize> = choice.iter().map(|&i| lambda[i][&project(&t, parts[i])]).collect();
            let ty = qf_type_unchecked(s, &t);
            checked += 1;
            match gamma.get(&colours) {
                Some(prev) if *prev != ty => {
                    return Ok(Err(CompositionConflict {
                        first: witness[&colours].clone(),
                        second: t,
                    }))
                }
                Some(_) => {}
                None => {
                    witness.insert(colours.clone(), t);
                    gamma.insert(colours, ty);
                }
            }
        }
    }
    Ok(Ok(CompositionTables {
        lambda,
        gamma,
        colours: offset,
        checked,
    }))
}

/// Checks that the type of every complete `m`-tuple is determined by the local
/// types of its projections onto all parts.
pub fn compositionality_check(s: &Structure, parts: &[Subset], m: usize) -> Result<Option<CompositionConflict>> {
    validate_partition(s, parts)?;
    let classes: Vec<_> = parts.iter().map(|&p| part_classes(s, p, m)).collect();
    let mut seen: HashMap<Vec<usize>, (QfType, Vec<Option<usize>>)> = HashMap::new();
    let all = full_set(s.n);
    for t in partial_tuples(all, m) {
        if t.iter().any(Option::is_none) {
            continue;
        }
        let key: Vec<usize> = parts.iter().zip(&classes).map(|(&p, c)| c[&project(&t, p)]).collect();
        let ty = qf_type_unchecked(s, &t);
        match seen.get(&key) {
            Some((prev, first)) if *prev != ty => {
                return Ok(Some(CompositionConflict {
                    first: first.clone(),
                    second: t,
                }))
            }
            Some(_) => {}
            None => {
                seen.insert(key, (ty, t));
            }
        }
    }
    Ok(None)
}

/// First-order element types: depth 0 is the quantifier-free type, depth
/// `d+1` pairs the depth-`d` type with the set of depth-`d` types of all
/// one-element extensions. Ids are canonical within the structure.
#[derive(Debug, Clone)]
pub struct ElementTypes {
    n: usize,
    /// `layers[d][len]` maps tuples (mixed radix index) to ids.
    layers: Vec<Vec<Vec<u32>>>,
}

impl ElementTypes {
    /// Tables for tuples of length `k` up to depth `d`.
    pub fn new(s: &Structure, k: usize, d: usize) -> Result<Self> {
        let n = s.universe_size();
        let caps = Caps::get();
        check_cap("element type table", (n as u128).saturating_pow((k + d) as u32), caps.monadic_table)?;
        let mut layers: Vec<Vec<Vec<u32>>> = Vec::with_capacity(d + 1);
        // depth 0 for all lengths k..=k+d
        let mut base = vec![Vec::new(); k + d + 1];
        for (len, slot) in base.iter_mut().enumerate().skip(k) {
            let count = n.pow(len as u32);
            let types: Vec<QfType> = (0..count)
                .map(|i| {
                    let t: Vec<Option<usize>> = digits(i, n.max(1), len).into_iter().map(Some).collect();
                    qf_type_unchecked(s, &t)
                })
                .collect();
            *slot = canonical_ids(&types);
        }
        layers.push(base);
        for depth in 1..=d {
            let prev = &layers[depth - 1];
            let mut cur = vec![Vec::new(); k + d + 1];
            for (len, slot) in cur.iter_mut().enumerate().take(k + d - depth + 1).skip(k) {
                let count = n.pow(len as u32);
                let keys: Vec<(u32, Vec<u32>)> = (0..count)
                    .map(|i| {
                        let mut ext: Vec<u32> = (0..n).map(|a| prev[len + 1][i * n + a]).collect();
                        ext.sort_unstable();
                        ext.dedup();
                        (prev[len][i], ext)
                    })
                    .collect();
                *slot = canonical_ids(&keys);
            }
            layers.push(cur);
        }
        Ok(ElementTypes { n, layers })
    }

    pub fn id(&self, tuple: &[usize], d: usize) -> u32 {
        self.layers[d][tuple.len()][index_of(self.n, tuple)]
    }
}

/// Ids by rank among the distinct sorted values.
pub(crate) fn canonical_ids<T: Ord + Clone>(values: &[T]) -> Vec<u32> {
    let mut sorted: Vec<&T> = values.iter().collect();
    sorted.sort();
    sorted.dedup();
    values
        .iter()
        .map(|v| sorted.binary_search(&v).expect("value present") as u32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order2() -> Structure {
        Structure::binary(2, [(0, 0), (1, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn linear_order_pair_type() {
        let s = order2();
        let t = qf_type_of(&s, &[0, 1]).unwrap();
        assert_eq!(t.facts(s.vocabulary()), vec![(0, vec![0, 0]), (0, vec![0, 1]), (0, vec![1, 1])]);
        assert!(!t.coordinates_equal(0, 1));
    }

    #[test]
    fn empty_tuple_has_no_facts() {
        let s = order2();
        let t = qf_type(&s, &PartialTuple(vec![])).unwrap();
        assert!(t.facts(s.vocabulary()).is_empty());
    }

    #[test]
    fn undefined_coordinates_are_excluded() {
        let p4 = Structure::graph(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let t = qf_type(&p4, &PartialTuple(vec![Some(1), None])).unwrap();
        assert_eq!(t.mask(), 0b01);
        assert_eq!(t.partition(), vec![Some(0), None]);
        assert!(t.facts(p4.vocabulary()).iter().all(|(_, c)| c.iter().all(|&i| i == 0)));
    }

    #[test]
    fn out_of_range_is_reported() {
        let s = order2();
        assert!(matches!(qf_type_of(&s, &[0, 5]), Err(Error::OutOfRange { element: 5, .. })));
    }

    #[test]
    fn equality_pattern_is_canonical() {
        let s = order2();
        let a = qf_type_of(&s, &[1, 0, 1]).unwrap();
        assert_eq!(a.partition(), vec![Some(0), Some(1), Some(0)]);
    }

    #[test]
    fn vocabulary_validation() {
        assert!(Vocabulary::new([("R", 0)]).is_err());
        assert!(Vocabulary::new([("R", 1), ("R", 2)]).is_err());
        assert_eq!(Vocabulary::new([("R", 1), ("S", 3)]).unwrap().max_arity(), 3);
        assert_eq!(Vocabulary::empty().max_arity(), 0);
    }

    #[test]
    fn rejects_bad_tuples() {
        let v = Vocabulary::new([("E", 2)]).unwrap();
        assert!(Structure::new(v.clone(), 2, vec![vec![vec![0]]]).is_err());
        assert!(Structure::new(v, 2, vec![vec![vec![0, 2]]]).is_err());
    }

    #[test]
    fn lifting_of_an_edge() {
        let s = Structure::binary(2, [(0, 1)]).unwrap();
        let ms = singleton_lifting(&s).unwrap();
        assert!(ms.holds(0, &[0b01, 0b10]));
        assert_eq!(ms.tuples(0).count(), 1);
        let empty = singleton_lifting(&Structure::binary(2, []).unwrap()).unwrap();
        assert_eq!(empty.tuples(0).count(), 0);
    }

    #[test]
    fn local_types_full_set_match_qf_types() {
        let p4 = Structure::graph(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let all = full_set(4);
        for a in partial_tuples(all, 2) {
            for b in partial_tuples(all, 2) {
                let la = induced_local_type(&p4, all, &PartialTuple(a.clone())).unwrap();
                let lb = induced_local_type(&p4, all, &PartialTuple(b.clone())).unwrap();
                let qa = qf_type_unchecked(&p4, &a);
                let qb = qf_type_unchecked(&p4, &b);
                assert_eq!(la == lb, qa == qb);
            }
        }
    }

    #[test]
    fn local_types_on_a_path_prefix() {
        let p4 = Structure::graph(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let x = 0b0011;
        let a = induced_local_type(&p4, x, &PartialTuple(vec![Some(0)])).unwrap();
        let b = induced_local_type(&p4, x, &PartialTuple(vec![Some(1)])).unwrap();
        assert_ne!(a, b);
        assert!(induced_local_type(&p4, x, &PartialTuple(vec![Some(2)])).is_err());
        let only = partial_tuples(0, 2);
        assert_eq!(only, vec![vec![None, None]]);
    }

    #[test]
    fn composition_on_the_two_element_order() {
        let s = order2();
        let tables = composition_tables(&s, &[0b01, 0b10], 2, 2).unwrap().unwrap();
        // every complete tuple is covered
        for t in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let t: Vec<Option<usize>> = t.iter().map(|&e| Some(e)).collect();
            let colours = vec![tables.lambda[0][&project(&t, 0b01)], tables.lambda[1][&project(&t, 0b10)]];
            assert_eq!(tables.gamma[&colours], qf_type_unchecked(&s, &t));
        }
        let single = composition_tables(&s, &[0b11], 1, 2).unwrap().unwrap();
        assert_eq!(single.checked, 9);
        assert!(compositionality_check(&s, &[0b11], 2).unwrap().is_none());
    }

    #[test]
    fn partition_validation() {
        let s = order2();
        assert!(composition_tables(&s, &[0b01], 1, 2).is_err());
        assert!(composition_tables(&s, &[0b11, 0b01], 1, 2).is_err());
    }

    #[test]
    fn possible_type_counts() {
        let v = Vocabulary::new([("E", 2)]).unwrap();
        // one variable: 2 types; two variables: 2 (equal) + 16 (distinct)
        assert!((log2_possible_types(&v, 1) - 1.0).abs() < 1e-9);
        assert!((log2_possible_types(&v, 2) - 18f64.log2()).abs() < 1e-9);
        assert_eq!(log2_possible_types(&Vocabulary::empty(), 0), 0.0);
    }
}
