use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::semigroup::FiniteSemigroup;
use crate::structures::{elements, full_set, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleKind {
    Unordered,
    Ordered,
}

/// How a subset meets one class. Cut states carry the subset size modulo the period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassState {
    Empty,
    Full,
    Cut(u8),
}

/// `φ(Y)` holds iff the product of `λ(Y ∩ X_i)` over the classes, in class
/// order, lies in the accept set.
///
/// `λ` only sees whether `Y ∩ X_i` is empty, full or cut, and for cut sets
/// the size modulo `period`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximationOracle {
    kind: OracleKind,
    n: usize,
    classes: Vec<Subset>,
    semigroup: FiniteSemigroup,
    period: usize,
    /// Per class: `[empty, full, cut_0, …, cut_{period-1}]`.
    lambda: Vec<Vec<usize>>,
    accept: Vec<bool>,
    k: usize,
    /// Factor multiplied into every product (unordered only).
    background: Option<usize>,
}

impl ApproximationOracle {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: OracleKind,
        n: usize,
        classes: Vec<Subset>,
        semigroup: FiniteSemigroup,
        period: usize,
        lambda: Vec<Vec<usize>>,
        accept: Vec<bool>,
        k: usize,
        background: Option<usize>,
    ) -> Result<Self> {
        if n == 0 || n > 64 {
            return invalid("oracle universes have 1 to 64 elements");
        }
        if classes.is_empty() {
            return invalid("an oracle needs at least one class");
        }
        let mut seen = 0;
        for &c in &classes {
            if c == 0 || c & seen != 0 {
                return invalid("classes must be nonempty and disjoint");
            }
            seen |= c;
        }
        if seen != full_set(n) {
            return invalid("classes do not cover the universe");
        }
        if period == 0 || period > 255 {
            return invalid("cut period must be between 1 and 255");
        }
        if k == 0 {
            return invalid("threshold k must be positive");
        }
        if lambda.len() != classes.len() || lambda.iter().any(|row| row.len() != period + 2) {
            return invalid(format!("each class needs {} lambda values", period + 2));
        }
        let size = semigroup.size();
        if let Some(&bad) = lambda.iter().flatten().chain(background.iter()).find(|&&v| v >= size) {
            return Err(Error::OutOfRange { element: bad, size });
        }
        if accept.len() != size {
            return invalid("accept set must have one flag per semigroup element");
        }
        if kind == OracleKind::Unordered && !semigroup.is_commutative() {
            return invalid("unordered oracles need a commutative semigroup");
        }
        if kind == OracleKind::Ordered && background.is_some() {
            return invalid("ordered oracles take no background factor");
        }
        Ok(ApproximationOracle {
            kind,
            n,
            classes,
            semigroup,
            period,
            lambda,
            accept,
            k,
            background,
        })
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn lambda(&self) -> &[Vec<usize>] {
        &self.lambda
    }

    pub fn accept(&self) -> &[bool] {
        &self.accept
    }

    pub fn background(&self) -> Option<usize> {
        self.background
    }

    /// Ground truth: the classes, in order for ordered oracles. Fixtures
    /// and tests compare recovered structure against this.
    pub fn hidden_classes(&self) -> &[Subset] {
        &self.classes
    }

    pub(crate) fn state(&self, class: usize, y: Subset) -> ClassState {
        let c = self.classes[class];
        let inter = c & y;
        if inter == 0 {
            ClassState::Empty
        } else if inter == c {
            ClassState::Full
        } else {
            ClassState::Cut((inter.count_ones() as usize % self.period) as u8)
        }
    }

    pub(crate) fn value(&self, class: usize, st: ClassState) -> usize {
        let row = &self.lambda[class];
        match st {
            ClassState::Empty => row[0],
            ClassState::Full => row[1],
            ClassState::Cut(r) => row[2 + r as usize],
        }
    }

    pub(crate) fn accepts_states(&self, states: &[ClassState]) -> bool {
        let mut acc = self.background;
        for (i, &st) in states.iter().enumerate() {
            let v = self.value(i, st);
            acc = Some(match acc {
                None => v,
                Some(a) => self.semigroup.mul(a, v),
            });
        }
        self.accept[acc.expect("at least one class")]
    }

    /// `φ(Y)`.
    pub fn query(&self, y: Subset) -> bool {
        let states: Vec<ClassState> = (0..self.classes.len()).map(|i| self.state(i, y)).collect();
        self.accepts_states(&states)
    }

    pub(crate) fn realisable(&self, class: usize) -> Vec<ClassState> {
        let size = self.classes[class].count_ones() as usize;
        let mut out = vec![ClassState::Empty, ClassState::Full];
        let cuts: BTreeSet<u8> = (1..size).map(|t| (t % self.period) as u8).collect();
        out.extend(cuts.into_iter().map(ClassState::Cut));
        out
    }

    /// Least subset of the class in the given state.
    pub(crate) fn realise(&self, class: usize, st: ClassState) -> Option<Subset> {
        let c = self.classes[class];
        let size = c.count_ones() as usize;
        match st {
            ClassState::Empty => Some(0),
            ClassState::Full => Some(c),
            ClassState::Cut(r) => {
                let t = (1..size).find(|t| t % self.period == r as usize)?;
                Some(elements(c).take(t).fold(0, |a, e| a | 1 << e))
            }
        }
    }

    pub(crate) fn image(&self, class: usize) -> BTreeSet<usize> {
        self.realisable(class).into_iter().map(|st| self.value(class, st)).collect()
    }

    /// The same oracle on the classes `keep`, renumbered in element order;
    /// dropped classes contribute their empty value.
    pub(crate) fn restrict(&self, keep: &[usize]) -> Result<(ApproximationOracle, Vec<usize>)> {
        if self.kind != OracleKind::Unordered {
            return invalid("only unordered oracles can be restricted");
        }
        let mask = keep.iter().fold(0, |a, &i| a | self.classes[i]);
        let map: Vec<usize> = elements(mask).collect();
        let index = |e: usize| map.iter().position(|&m| m == e).expect("kept element");
        let classes = keep
            .iter()
            .map(|&i| elements(self.classes[i]).fold(0u64, |a, e| a | 1 << index(e)))
            .collect();
        let mut background = self.background;
        for i in (0..self.classes.len()).filter(|i| !keep.contains(i)) {
            let v = self.lambda[i][0];
            background = Some(background.map_or(v, |b| self.semigroup.mul(b, v)));
        }
        let o = ApproximationOracle::new(
            OracleKind::Unordered,
            map.len(),
            classes,
            self.semigroup.clone(),
            self.period,
            keep.iter().map(|&i| self.lambda[i].clone()).collect(),
            self.accept.clone(),
            self.k,
            background,
        )?;
        Ok((o, map))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleValidation {
    /// Unordered: sets cutting no class are accepted. Ordered: intervals are accepted.
    pub complete: bool,
    /// Sets cutting at least `k` classes (having at least `k` blocks) are rejected.
    pub sound: bool,
    /// Full, empty and cut values are pairwise disjoint.
    pub determines_full_empty: bool,
    pub same_full_empty: bool,
    pub idempotent_full_empty: bool,
    /// Classes with at least two elements have equal images.
    pub images_equal: bool,
    /// The common image `I` satisfies `I·I = I`.
    pub image_idempotent: bool,
}

impl OracleValidation {
    pub fn valid(&self) -> bool {
        self.complete && self.sound && self.determines_full_empty
    }

    /// Singleton classes cannot be cut, so their image is only compared on
    /// the full and empty values.
    pub fn homogeneous(&self) -> bool {
        self.valid() && self.same_full_empty && self.idempotent_full_empty && self.images_equal
    }
}

/// Exact check of every invariant by dynamic programming over class states.
pub fn validate_oracle(o: &ApproximationOracle) -> OracleValidation {
    let s = &o.semigroup;
    let k = o.k;
    let classes = o.classes.len();
    let mul = |a: Option<usize>, b: usize| Some(a.map_or(b, |a| s.mul(a, b)));
    let (mut complete, mut sound) = (true, true);
    match o.kind {
        OracleKind::Unordered => {
            // (product, cut classes capped at k)
            let mut states: HashSet<(Option<usize>, usize)> = HashSet::from([(o.background, 0)]);
            for c in 0..classes {
                let mut next = HashSet::new();
                for &(p, cuts) in &states {
                    for st in o.realisable(c) {
                        let cut = matches!(st, ClassState::Cut(_)) as usize;
                        next.insert((mul(p, o.value(c, st)), (cuts + cut).min(k)));
                    }
                }
                states = next;
            }
            for (p, cuts) in states {
                let acc = o.accept[p.expect("nonempty")];
                complete &= cuts > 0 || acc;
                sound &= cuts < k || !acc;
            }
        }
        OracleKind::Ordered => {
            // (product, last state kind, blocks capped at k, full blocks capped at 2, any cut)
            type St = (Option<usize>, u8, usize, u8, bool);
            let mut states: HashSet<St> = HashSet::from([(None, 3, 0, 0, false)]);
            for c in 0..classes {
                let mut next = HashSet::new();
                for &(p, last, blocks, fulls, cut) in &states {
                    for st in o.realisable(c) {
                        let kind = match st {
                            ClassState::Empty => 0,
                            ClassState::Full => 1,
                            ClassState::Cut(_) => 2,
                        };
                        let new_block = kind == 2 || kind != last;
                        let b = (blocks + new_block as usize).min(k);
                        let f = (fulls + (new_block && kind == 1) as u8).min(2);
                        next.insert((mul(p, o.value(c, st)), kind, b, f, cut || kind == 2));
                    }
                }
                states = next;
            }
            for (p, _, blocks, fulls, cut) in states {
                let acc = o.accept[p.expect("nonempty")];
                complete &= cut || fulls > 1 || acc;
                sound &= blocks < k || !acc;
            }
        }
    }
    let fulls: BTreeSet<usize> = (0..classes).map(|c| o.value(c, ClassState::Full)).collect();
    let empties: BTreeSet<usize> = (0..classes).map(|c| o.value(c, ClassState::Empty)).collect();
    let cuts: BTreeSet<usize> = (0..classes)
        .flat_map(|c| {
            o.realisable(c)
                .into_iter()
                .filter(|st| matches!(st, ClassState::Cut(_)))
                .map(move |st| o.value(c, st))
        })
        .collect();
    let determines_full_empty =
        fulls.is_disjoint(&empties) && fulls.is_disjoint(&cuts) && empties.is_disjoint(&cuts);
    let same_full_empty = fulls.len() == 1 && empties.len() == 1;
    let idempotent_full_empty = fulls.iter().chain(&empties).all(|&v| s.is_idempotent(v));
    let big: Vec<BTreeSet<usize>> = (0..classes)
        .filter(|&c| o.classes[c].count_ones() >= 2)
        .map(|c| o.image(c))
        .collect();
    let images_equal = big.windows(2).all(|w| w[0] == w[1]);
    let common = big.first().cloned().unwrap_or_else(|| o.image(0));
    let square: BTreeSet<usize> = common.iter().flat_map(|&a| common.iter().map(move |&b| s.mul(a, b))).collect();
    OracleValidation {
        complete,
        sound,
        determines_full_empty,
        same_full_empty,
        idempotent_full_empty,
        images_equal,
        image_idempotent: square == common,
    }
}

/// Counter semigroups behind synthesized oracles.
///
/// Unordered: pairs (cut count below `k`, flag in {e, f, ef}) plus an
/// absorbing element for `k` or more cuts; `3k + 1` elements. Ordered:
/// triples (first kind, last kind, blocks below `k`) over the kinds
/// {empty, full, cut}, plus an absorbing element; `9(k - 1) + 1` elements.
pub fn canonical_semigroup(kind: OracleKind, k: usize) -> Result<FiniteSemigroup> {
    match kind {
        OracleKind::Unordered => {
            if k == 0 {
                return invalid("k must be positive");
            }
            let z = 3 * k;
            let flag = |a: usize, b: usize| if a == b { a } else { 2 };
            let table = (0..=z)
                .map(|a| {
                    (0..=z)
                        .map(|b| {
                            if a == z || b == z {
                                return z;
                            }
                            let c = a / 3 + b / 3;
                            if c >= k {
                                z
                            } else {
                                c * 3 + flag(a % 3, b % 3)
                            }
                        })
                        .collect()
                })
                .collect();
            FiniteSemigroup::new(table, None)
        }
        OracleKind::Ordered => {
            if k < 2 {
                return invalid("ordered counters need k >= 2");
            }
            let z = 9 * (k - 1);
            let parts = |a: usize| (a / 9 + 1, a / 3 % 3, a % 3);
            let table = (0..=z)
                .map(|a| {
                    (0..=z)
                        .map(|b| {
                            if a == z || b == z {
                                return z;
                            }
                            let (j1, f1, l1) = parts(a);
                            let (j2, f2, l2) = parts(b);
                            let merge = (l1 == f2 && l1 != 2) as usize;
                            let j = j1 + j2 - merge;
                            if j >= k {
                                z
                            } else {
                                (j - 1) * 9 + f1 * 3 + l2
                            }
                        })
                        .collect()
                })
                .collect();
            FiniteSemigroup::new(table, None)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub homogeneous: bool,
    /// Accept set decided at random wherever completeness and soundness leave a choice.
    pub random_accept: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            homogeneous: true,
            random_accept: false,
        }
    }
}

/// Oracle over the counter semigroup for the given hidden classes, checked
/// by `validate_oracle` before it is returned.
pub fn synth_oracle(
    kind: OracleKind,
    n: usize,
    classes: Vec<Subset>,
    k: usize,
    seed: u64,
    opts: SynthOptions,
) -> Result<ApproximationOracle> {
    let s = canonical_semigroup(kind, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = s.size();
    let z = size - 1;
    let (lambda, accept): (Vec<Vec<usize>>, Vec<bool>) = match kind {
        OracleKind::Unordered => {
            let cut = if k > 1 { 3 + 2 } else { z };
            let other_cut = if k > 1 { 3 + 1 } else { z };
            let lambda = (0..classes.len())
                .map(|i| {
                    let c = if opts.homogeneous || i % 2 == 0 { cut } else { other_cut };
                    vec![0, 1, c]
                })
                .collect();
            let by_count: Vec<bool> = (0..k).map(|c| c == 0 || !opts.random_accept || rng.gen_bool(0.6)).collect();
            let accept = (0..size).map(|a| a != z && by_count[a / 3]).collect();
            (lambda, accept)
        }
        OracleKind::Ordered => {
            if !opts.homogeneous {
                return invalid("synthesized ordered oracles are always homogeneous");
            }
            let id = |j: usize, f: usize, l: usize| (j - 1) * 9 + f * 3 + l;
            let lambda = vec![vec![id(1, 0, 0), id(1, 1, 1), id(1, 2, 2)]; classes.len()];
            // values produced by intervals
            let mut forced = vec![id(1, 0, 0), id(1, 1, 1)];
            if k > 2 {
                forced.extend([id(2, 0, 1), id(2, 1, 0)]);
            }
            if k > 3 {
                forced.push(id(3, 0, 0));
            }
            let accept = (0..size)
                .map(|a| a != z && (forced.contains(&a) || !opts.random_accept || rng.gen_bool(0.6)))
                .collect();
            (lambda, accept)
        }
    };
    let o = ApproximationOracle::new(kind, n, classes, s, 1, lambda, accept, k, None)?;
    let v = validate_oracle(&o);
    if !v.valid() || (opts.homogeneous && !v.homogeneous()) {
        return invalid(format!("synthesized oracle fails validation: {v:?}"));
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::elements;

    fn blocks_of(classes: &[Subset], y: Subset) -> (usize, bool) {
        let mut blocks = 0;
        let mut last = 3;
        let mut fulls = 0;
        let mut cut = false;
        for &c in classes {
            let kind = if c & y == 0 {
                0
            } else if c & y == c {
                1
            } else {
                2
            };
            if kind == 2 || kind != last {
                blocks += 1;
                fulls += (kind == 1) as usize;
            }
            cut |= kind == 2;
            last = kind;
        }
        (blocks, !cut && fulls <= 1)
    }

    #[test]
    fn canonical_semigroups_are_associative() {
        for k in 1..=4 {
            let s = canonical_semigroup(OracleKind::Unordered, k).unwrap();
            assert_eq!(s.size(), 3 * k + 1);
            assert!(s.is_commutative());
        }
        for k in 2..=5 {
            assert_eq!(canonical_semigroup(OracleKind::Ordered, k).unwrap().size(), 9 * (k - 1) + 1);
        }
    }

    #[test]
    fn dp_validation_matches_subset_enumeration() {
        let classes = vec![0b11, 0b1100, 0b10000, 0b1100000];
        for seed in 0..20 {
            let opts = SynthOptions {
                homogeneous: true,
                random_accept: true,
            };
            let u = synth_oracle(OracleKind::Unordered, 7, classes.clone(), 2, seed, opts).unwrap();
            let o = synth_oracle(OracleKind::Ordered, 7, classes.clone(), 4, seed, opts).unwrap();
            for y in 0..1u64 << 7 {
                let cuts = classes.iter().filter(|&&c| c & y != 0 && c & y != c).count();
                if cuts == 0 {
                    assert!(u.query(y));
                }
                if cuts >= 2 {
                    assert!(!u.query(y));
                }
                let (b, interval) = blocks_of(&classes, y);
                if interval {
                    assert!(o.query(y), "{y:b}");
                }
                if b >= 4 {
                    assert!(!o.query(y));
                }
            }
        }
    }

    #[test]
    fn broken_oracles_are_caught() {
        let classes = vec![0b11, 0b1100];
        let good = synth_oracle(OracleKind::Unordered, 4, classes.clone(), 2, 0, SynthOptions::default()).unwrap();
        let mut accept = good.accept().to_vec();
        accept[0] = false;
        let bad = ApproximationOracle::new(
            OracleKind::Unordered,
            4,
            classes.clone(),
            good.semigroup().clone(),
            1,
            good.lambda().to_vec(),
            accept,
            2,
            None,
        )
        .unwrap();
        assert!(!validate_oracle(&bad).complete);
        let mut accept = good.accept().to_vec();
        *accept.last_mut().unwrap() = true;
        let bad = ApproximationOracle::new(
            OracleKind::Unordered,
            4,
            classes.clone(),
            good.semigroup().clone(),
            1,
            good.lambda().to_vec(),
            accept,
            2,
            None,
        )
        .unwrap();
        assert!(!validate_oracle(&bad).sound);
        let mixed = synth_oracle(
            OracleKind::Unordered,
            4,
            classes,
            2,
            0,
            SynthOptions {
                homogeneous: false,
                random_accept: false,
            },
        )
        .unwrap();
        let v = validate_oracle(&mixed);
        assert!(v.valid() && !v.images_equal);
    }

    #[test]
    fn one_class_accepts_uncut_sets() {
        let o = synth_oracle(OracleKind::Unordered, 3, vec![0b111], 1, 0, SynthOptions::default()).unwrap();
        for y in 0..8u64 {
            assert_eq!(o.query(y), y == 0 || y == 0b111);
        }
    }

    #[test]
    fn realised_states() {
        let o = synth_oracle(OracleKind::Ordered, 5, vec![0b111, 0b11000], 4, 0, SynthOptions::default()).unwrap();
        for c in 0..2 {
            for st in o.realisable(c) {
                let y = o.realise(c, st).unwrap();
                assert_eq!(o.state(c, y), st);
                assert_eq!(elements(y).count() <= 3, true);
            }
        }
        assert!(!validate_oracle(&o).image_idempotent);
    }
}
