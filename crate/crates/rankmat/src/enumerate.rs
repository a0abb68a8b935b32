//! Deterministic instance streams for the verification suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{check_cap, Result};
use crate::recovery::{synth_oracle, ApproximationOracle, OracleKind, SynthOptions};
use crate::structures::{full_set, MonadicStructure, Structure, Subset, Vocabulary};

pub use crate::semigroup::{associative_tables, semigroup_corpus};
pub use crate::trees::{all_trees, shapes};

/// Structures on `n` elements over one binary relation `E`, in increasing
/// order of the adjacency bitmask (pair `(a, b)` is bit `a·n + b`).
pub fn binary_structures(n: usize) -> Result<impl Iterator<Item = Structure>> {
    check_cap("relation cells", 1u128 << (n * n), Caps::get().relation_cells)?;
    let vocab = Vocabulary::new([("E", 2)])?;
    Ok((0..1u64 << (n * n)).map(move |mask| {
        let tuples = (0..n * n).filter(|&i| mask >> i & 1 == 1).map(|i| vec![i / n, i % n]).collect();
        Structure::new(vocab.clone(), n, vec![tuples]).expect("tuples within the universe")
    }))
}

/// Binary structures of every size `1..=max`.
pub fn binary_structures_upto(max: usize) -> Result<Vec<Structure>> {
    let mut out = Vec::new();
    for n in 1..=max {
        out.extend(binary_structures(n)?);
    }
    Ok(out)
}

/// Monadic structures on `n` elements with one unary set relation `U`,
/// by increasing membership bitmask over the `2^n` subsets.
pub fn monadic_structures(n: usize) -> Result<impl Iterator<Item = MonadicStructure>> {
    check_cap("relation cells", 1u128 << (1u128 << n), Caps::get().relation_cells)?;
    let subsets = 1u64 << n;
    Ok((0..1u64 << subsets).map(move |mask| {
        let members = (0..subsets as u32).filter(|&s| mask >> s & 1 == 1).map(|s| vec![s]).collect();
        MonadicStructure::new(n, vec![("U".to_string(), 1, members)]).expect("subsets within the universe")
    }))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in out {
            for i in (0..n).filter(|i| !p.contains(i)) {
                let mut q = p.clone();
                q.push(i);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// One membership mask per orbit of [`monadic_structures`] under
/// permutations of the universe: the least mask of each orbit, ascending.
pub fn monadic_orbit_masks(n: usize) -> Result<Vec<u64>> {
    check_cap("relation cells", 1u128 << (1u128 << n), Caps::get().relation_cells)?;
    let subsets = 1usize << n;
    let perms = permutations(n);
    // image of every subset under every permutation
    let images: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            (0..subsets)
                .map(|s| (0..n).filter(|&e| s >> e & 1 == 1).fold(0, |a, e| a | 1 << p[e]))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for mask in 0..1u64 << subsets {
        let least = images.iter().all(|img| {
            let m2 = (0..subsets).filter(|&s| mask >> s & 1 == 1).fold(0u64, |a, s| a | 1 << img[s]);
            m2 >= mask
        });
        if least {
            out.push(mask);
        }
    }
    Ok(out)
}

pub fn monadic_from_mask(n: usize, mask: u64) -> Result<MonadicStructure> {
    let members = (0..1u32 << n).filter(|&s| mask >> s & 1 == 1).map(|s| vec![s]).collect();
    MonadicStructure::new(n, vec![("U".to_string(), 1, members)])
}

/// Set partitions of `0..n`, blocks by least element, in restricted growth order.
pub fn set_partitions(n: usize) -> Vec<Vec<Subset>> {
    fn go(i: usize, n: usize, blocks: &mut Vec<Subset>, out: &mut Vec<Vec<Subset>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            go(i + 1, n, blocks, out);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// Random partition of `0..n` into exactly `count` nonempty classes; for
/// ordered use the class order is the listed order.
pub fn random_classes(rng: &mut impl Rng, n: usize, count: usize) -> Vec<Subset> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut sizes = vec![1usize; count];
    for _ in count..n {
        sizes[rng.gen_range(0..count)] += 1;
    }
    let mut it = perm.into_iter();
    sizes
        .into_iter()
        .map(|s| it.by_ref().take(s).fold(0, |a, e| a | 1 << e))
        .collect()
}

/// Homogeneous unordered oracle: universe at most 30, at most 6 classes,
/// semigroup of at most 7 elements.
pub fn random_unordered_oracle(seed: u64) -> Result<ApproximationOracle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=30);
    let count = rng.gen_range(1..=n.min(6));
    let classes = random_classes(&mut rng, n, count);
    let k = rng.gen_range(1..=2);
    let opts = SynthOptions {
        homogeneous: true,
        random_accept: rng.gen_bool(0.5),
    };
    synth_oracle(OracleKind::Unordered, n, classes, k, rng.gen(), opts)
}

/// Ordered oracle over the block counter with `k = 4`: at most 12 classes,
/// universe at most 16.
pub fn random_ordered_oracle(seed: u64) -> Result<ApproximationOracle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=12);
    let n = rng.gen_range(count..=16);
    let classes = random_classes(&mut rng, n, count);
    let opts = SynthOptions {
        homogeneous: true,
        random_accept: rng.gen_bool(0.5),
    };
    synth_oracle(OracleKind::Ordered, n, classes, 4, rng.gen(), opts)
}

/// Connected subsets (intervals) of the path `0..n`, nonempty.
pub fn intervals(n: usize) -> impl Iterator<Item = Subset> {
    (0..n).flat_map(move |a| (a..n).map(move |b| full_set(b + 1) & !full_set(a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_counts() {
        assert_eq!(binary_structures(2).unwrap().count(), 16);
        assert_eq!(binary_structures_upto(3).unwrap().len(), 2 + 16 + 512);
        assert_eq!(all_trees(3).len(), 4);
        assert_eq!(associative_tables(2).unwrap().len(), 8);
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(monadic_structures(2).unwrap().count(), 16);
        assert_eq!(intervals(4).count(), 10);
    }

    #[test]
    fn orbit_masks() {
        // subsets of {0,1}: ∅, {0}, {1}, {0,1}; swapping 0 and 1 exchanges bits 1 and 2
        assert_eq!(monadic_orbit_masks(2).unwrap().len(), 12);
        let masks = monadic_orbit_masks(3).unwrap();
        assert!(masks.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(masks[0], 0);
    }

    #[test]
    fn streams_are_deterministic() {
        let a = random_unordered_oracle(7).unwrap();
        let b = random_unordered_oracle(7).unwrap();
        assert_eq!(a, b);
        assert!(a.universe_size() <= 30 && a.hidden_classes().len() <= 6 && a.semigroup().size() <= 8);
        let o = random_ordered_oracle(3).unwrap();
        assert!(o.hidden_classes().len() <= 12);
        let p = set_partitions(3);
        assert_eq!(p[0], vec![0b111]);
        assert_eq!(p.last().unwrap(), &vec![1, 2, 4]);
    }
}
