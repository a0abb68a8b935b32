//! Matrices over finite semigroups and their Kronecker products.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{check_cap, invalid, Error, Result};
use crate::semigroup::FiniteSemigroup;

/// Rectangular table of element ids, optionally tied to a semigroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
    semigroup: Option<Arc<FiniteSemigroup>>,
}

impl SemigroupMatrix {
    /// A matrix over plain values.
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return invalid("matrix rows have different lengths");
        }
        let entries = rows.into_iter().flatten().map(|v| v as u32).collect();
        Ok(SemigroupMatrix {
            rows: r,
            cols: c,
            entries,
            semigroup: None,
        })
    }

    /// A matrix whose entries are elements of `s`.
    pub fn over(s: Arc<FiniteSemigroup>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut m = Self::new(rows)?;
        if let Some(&bad) = m.entries.iter().find(|&&v| v as usize >= s.size()) {
            return Err(Error::OutOfRange {
                element: bad as usize,
                size: s.size(),
            });
        }
        m.semigroup = Some(s);
        Ok(m)
    }

    pub fn from_flat(rows: usize, cols: usize, entries: Vec<u32>, semigroup: Option<Arc<FiniteSemigroup>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return invalid("entry count does not match the dimensions");
        }
        Ok(SemigroupMatrix {
            rows,
            cols,
            entries,
            semigroup,
        })
    }

    pub fn constant(rows: usize, cols: usize, value: usize, semigroup: Option<Arc<FiniteSemigroup>>) -> Self {
        SemigroupMatrix {
            rows,
            cols,
            entries: vec![value as u32; rows * cols],
            semigroup,
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> usize {
        self.entries[r * self.cols + c] as usize
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn semigroup(&self) -> Option<&Arc<FiniteSemigroup>> {
        self.semigroup.as_ref()
    }

    /// Number of possible values: the semigroup size, or one past the largest entry.
    pub fn value_bound(&self) -> usize {
        match &self.semigroup {
            Some(s) => s.size(),
            None => self.entries.iter().max().map_or(0, |&m| m as usize + 1),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|&v| v as usize).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.entries[r * self.cols + c]);
            }
        }
        SemigroupMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
            semigroup: self.semigroup.clone(),
        }
    }

    pub fn distinct_rows(&self) -> usize {
        crate::rank::distinct_rows(&self.entries, self.rows, self.cols)
    }

    pub fn distinct_cols(&self) -> usize {
        crate::rank::distinct_cols(&self.entries, self.rows, self.cols)
    }

    fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                entries.push(self.entries[r * self.cols + c]);
            }
        }
        SemigroupMatrix {
            rows: rows.len(),
            cols: cols.len(),
            entries,
            semigroup: self.semigroup.clone(),
        }
    }
}

fn same_semigroup(a: &SemigroupMatrix, b: &SemigroupMatrix) -> Result<Arc<FiniteSemigroup>> {
    match (&a.semigroup, &b.semigroup) {
        (Some(x), Some(y)) if Arc::ptr_eq(x, y) || x == y => Ok(x.clone()),
        _ => invalid("Kronecker product needs both matrices over the same semigroup"),
    }
}

fn check_product_size(a: &SemigroupMatrix, b: &SemigroupMatrix) -> Result<()> {
    let cells = (a.rows * b.rows) as u128 * (a.cols * b.cols) as u128;
    check_cap("matrix cells", cells, Caps::get().matrix_cells)
}

/// Rows `(x1, x2) ↦ x1 * rows(b) + x2`, columns likewise; entries multiplied in the semigroup.
pub fn kronecker_product(a: &SemigroupMatrix, b: &SemigroupMatrix) -> Result<SemigroupMatrix> {
    let s = same_semigroup(a, b)?;
    check_product_size(a, b)?;
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    let mut entries = Vec::with_capacity(rows * cols);
    for x1 in 0..a.rows {
        for x2 in 0..b.rows {
            for y1 in 0..a.cols {
                let v = a.get(x1, y1);
                for y2 in 0..b.cols {
                    entries.push(s.mul(v, b.get(x2, y2)) as u32);
                }
            }
        }
    }
    Ok(SemigroupMatrix {
        rows,
        cols,
        entries,
        semigroup: Some(s),
    })
}

/// `n`-fold Kronecker product, `n ≥ 1`.
pub fn kronecker_power(m: &SemigroupMatrix, n: usize) -> Result<SemigroupMatrix> {
    if n == 0 {
        return invalid("Kronecker powers start at 1");
    }
    let mut acc = m.clone();
    for _ in 1..n {
        acc = kronecker_product(&acc, m)?;
    }
    Ok(acc)
}

/// Product along an aggregation matrix: entry `agg(a(x1,y1), b(x2,y2))`.
pub fn aggregated_product(a: &SemigroupMatrix, b: &SemigroupMatrix, agg: &SemigroupMatrix) -> Result<SemigroupMatrix> {
    if a.value_bound() > agg.rows || b.value_bound() > agg.cols {
        return invalid("aggregation matrix does not cover the factor values");
    }
    check_product_size(a, b)?;
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    let mut entries = Vec::with_capacity(rows * cols);
    for x1 in 0..a.rows {
        for x2 in 0..b.rows {
            for y1 in 0..a.cols {
                let v = a.get(x1, y1);
                for y2 in 0..b.cols {
                    entries.push(agg.get(v, b.get(x2, y2)) as u32);
                }
            }
        }
    }
    Ok(SemigroupMatrix {
        rows,
        cols,
        entries,
        semigroup: agg.semigroup.clone(),
    })
}

pub fn multiplication_matrix(s: &FiniteSemigroup, rows: &[usize], cols: &[usize]) -> Result<SemigroupMatrix> {
    if rows.is_empty() || cols.is_empty() {
        return invalid("multiplication matrices need nonempty row and column sets");
    }
    if let Some(&bad) = rows.iter().chain(cols).find(|&&x| x >= s.size()) {
        return Err(Error::OutOfRange {
            element: bad,
            size: s.size(),
        });
    }
    let table = rows.iter().map(|&b| cols.iter().map(|&c| s.mul(b, c)).collect()).collect();
    SemigroupMatrix::over(Arc::new(s.clone()), table)
}

/// No two equal rows and no two equal columns.
pub fn is_irredundant(m: &SemigroupMatrix) -> bool {
    m.distinct_rows() == m.rows && m.distinct_cols() == m.cols
}

// Stable FNV-1a hashing over explicit little-endian bytes.
fn fnv(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Deduplicated matrix with rows and columns sorted by content, plus a hash
/// that is invariant under row and column permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub matrix: SemigroupMatrix,
    pub hash: u64,
}

fn dedup_rows(m: &SemigroupMatrix) -> Vec<usize> {
    let mut seen = HashSet::new();
    (0..m.rows).filter(|&r| seen.insert(m.row(r))).collect()
}

fn dedup_cols(m: &SemigroupMatrix) -> Vec<usize> {
    let mut seen = HashSet::new();
    (0..m.cols)
        .filter(|&c| seen.insert((0..m.rows).map(|r| m.get(r, c)).collect::<Vec<_>>()))
        .collect()
}

/// Removes duplicate rows and columns until none are left.
pub fn normal_form(m: &SemigroupMatrix) -> NormalForm {
    normal_form_ordered(m, true)
}

pub(crate) fn normal_form_ordered(m: &SemigroupMatrix, rows_first: bool) -> NormalForm {
    let mut cur = m.clone();
    let mut rows_turn = rows_first;
    let mut stable = 0;
    while stable < 2 {
        let before = (cur.rows, cur.cols);
        cur = if rows_turn {
            let keep = dedup_rows(&cur);
            cur.select(&keep, &(0..cur.cols).collect::<Vec<_>>())
        } else {
            let keep = dedup_cols(&cur);
            cur.select(&(0..cur.rows).collect::<Vec<_>>(), &keep)
        };
        stable = if (cur.rows, cur.cols) == before { stable + 1 } else { 0 };
        rows_turn = !rows_turn;
    }
    // columns by content, then rows by content
    let mut cols: Vec<usize> = (0..cur.cols).collect();
    cols.sort_by_key(|&c| (0..cur.rows).map(|r| cur.get(r, c)).collect::<Vec<_>>());
    let tmp = cur.select(&(0..cur.rows).collect::<Vec<_>>(), &cols);
    let mut rows: Vec<usize> = (0..tmp.rows).collect();
    rows.sort_by(|&a, &b| tmp.row(a).cmp(tmp.row(b)));
    let matrix = tmp.select(&rows, &(0..tmp.cols).collect::<Vec<_>>());
    let hash = invariant_hash(&matrix);
    NormalForm { matrix, hash }
}

/// Colour refinement hash; equal for matrices that agree up to row and
/// column permutations.
fn invariant_hash(m: &SemigroupMatrix) -> u64 {
    let mut rh: Vec<u64> = (0..m.rows)
        .map(|r| {
            let mut v: Vec<u64> = m.row(r).iter().map(|&x| x as u64).collect();
            v.sort_unstable();
            fnv(v)
        })
        .collect();
    let mut ch: Vec<u64> = (0..m.cols)
        .map(|c| {
            let mut v: Vec<u64> = (0..m.rows).map(|r| m.get(r, c) as u64).collect();
            v.sort_unstable();
            fnv(v)
        })
        .collect();
    let classes = |h: &[u64]| h.iter().collect::<HashSet<_>>().len();
    let mut count = (classes(&rh), classes(&ch));
    for _ in 0..(m.rows + m.cols).max(1) {
        let nr: Vec<u64> = (0..m.rows)
            .map(|r| {
                let mut v: Vec<u64> = (0..m.cols).map(|c| fnv([m.get(r, c) as u64, ch[c]])).collect();
                v.sort_unstable();
                fnv(std::iter::once(rh[r]).chain(v))
            })
            .collect();
        let nc: Vec<u64> = (0..m.cols)
            .map(|c| {
                let mut v: Vec<u64> = (0..m.rows).map(|r| fnv([m.get(r, c) as u64, rh[r]])).collect();
                v.sort_unstable();
                fnv(std::iter::once(ch[c]).chain(v))
            })
            .collect();
        rh = nr;
        ch = nc;
        let next = (classes(&rh), classes(&ch));
        if next == count {
            break;
        }
        count = next;
    }
    let mut r = rh.clone();
    r.sort_unstable();
    let mut c = ch.clone();
    c.sort_unstable();
    fnv([m.rows as u64, m.cols as u64].into_iter().chain(r).chain(c))
}

/// Joint colour refinement of two matrices with shared colour names.
fn refine(ms: [&SemigroupMatrix; 2], rc: &mut [Vec<u32>; 2], cc: &mut [Vec<u32>; 2]) {
    loop {
        let before: usize = count_colours(rc) + count_colours(cc);
        let mut dict: BTreeMap<(u32, Vec<(u32, u32)>), u32> = BTreeMap::new();
        let mut row_sigs = [Vec::new(), Vec::new()];
        for k in 0..2 {
            let m = ms[k];
            for r in 0..m.rows {
                let mut v: Vec<(u32, u32)> = (0..m.cols).map(|c| (m.get(r, c) as u32, cc[k][c])).collect();
                v.sort_unstable();
                row_sigs[k].push((rc[k][r], v));
            }
        }
        for sigs in &row_sigs {
            for s in sigs {
                let len = dict.len() as u32;
                dict.entry(s.clone()).or_insert(len);
            }
        }
        // ids by sorted signature so both sides agree
        let order: BTreeMap<_, u32> = dict.keys().cloned().enumerate().map(|(i, k)| (k, i as u32)).collect();
        for k in 0..2 {
            rc[k] = row_sigs[k].iter().map(|s| order[s]).collect();
        }
        let mut col_sigs = [Vec::new(), Vec::new()];
        for k in 0..2 {
            let m = ms[k];
            for c in 0..m.cols {
                let mut v: Vec<(u32, u32)> = (0..m.rows).map(|r| (m.get(r, c) as u32, rc[k][r])).collect();
                v.sort_unstable();
                col_sigs[k].push((cc[k][c], v));
            }
        }
        let keys: std::collections::BTreeSet<_> = col_sigs.iter().flatten().cloned().collect();
        let order: BTreeMap<_, u32> = keys.into_iter().enumerate().map(|(i, k)| (k, i as u32)).collect();
        for k in 0..2 {
            cc[k] = col_sigs[k].iter().map(|s| order[s]).collect();
        }
        if count_colours(rc) + count_colours(cc) == before {
            return;
        }
    }
}

fn count_colours(c: &[Vec<u32>; 2]) -> usize {
    c.iter().flatten().collect::<HashSet<_>>().len()
}

fn histogram(c: &[u32]) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for &x in c {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

/// Entry-preserving bijections of rows and columns between two matrices.
pub fn isomorphic(a: &SemigroupMatrix, b: &SemigroupMatrix) -> bool {
    if a.rows != b.rows || a.cols != b.cols {
        return false;
    }
    let mut ea = a.entries.clone();
    let mut eb = b.entries.clone();
    ea.sort_unstable();
    eb.sort_unstable();
    if ea != eb {
        return false;
    }
    let (a, b) = (strip(a), strip(b));
    let mut rc = [vec![0; a.rows], vec![0; b.rows]];
    let mut cc = [vec![0; a.cols], vec![0; b.cols]];
    iso_search(&a, &b, &mut rc, &mut cc)
}

fn strip(m: &SemigroupMatrix) -> SemigroupMatrix {
    SemigroupMatrix {
        semigroup: None,
        ..m.clone()
    }
}

fn iso_search(a: &SemigroupMatrix, b: &SemigroupMatrix, rc: &mut [Vec<u32>; 2], cc: &mut [Vec<u32>; 2]) -> bool {
    refine([a, b], rc, cc);
    if histogram(&rc[0]) != histogram(&rc[1]) || histogram(&cc[0]) != histogram(&cc[1]) {
        return false;
    }
    let hist_a = histogram(&cc[0]);
    let target = hist_a.iter().find(|(_, &n)| n > 1).map(|(&c, _)| c);
    let Some(colour) = target else {
        let row_hist = histogram(&rc[0]);
        if let Some((&colour, _)) = row_hist.iter().find(|(_, &n)| n > 1) {
            return individualise(a, b, rc, cc, colour, true);
        }
        // discrete: colours determine the bijection
        let rmap: HashMap<u32, usize> = rc[1].iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let cmap: HashMap<u32, usize> = cc[1].iter().enumerate().map(|(i, &c)| (c, i)).collect();
        return (0..a.rows).all(|r| (0..a.cols).all(|c| a.get(r, c) == b.get(rmap[&rc[0][r]], cmap[&cc[0][c]])));
    };
    individualise(a, b, rc, cc, colour, false)
}

fn individualise(
    a: &SemigroupMatrix,
    b: &SemigroupMatrix,
    rc: &mut [Vec<u32>; 2],
    cc: &mut [Vec<u32>; 2],
    colour: u32,
    rows: bool,
) -> bool {
    let (ca, cb) = if rows { (&rc[0], &rc[1]) } else { (&cc[0], &cc[1]) };
    let first = ca.iter().position(|&c| c == colour).expect("colour present");
    let fresh = ca.iter().chain(cb.iter()).max().copied().unwrap_or(0) + 1;
    let candidates: Vec<usize> = cb.iter().enumerate().filter(|(_, &c)| c == colour).map(|(i, _)| i).collect();
    for cand in candidates {
        let mut rc2 = rc.clone();
        let mut cc2 = cc.clone();
        {
            let side = if rows { &mut rc2 } else { &mut cc2 };
            side[0][first] = fresh;
            side[1][cand] = fresh;
        }
        if iso_search(a, b, &mut rc2, &mut cc2) {
            return true;
        }
    }
    false
}

/// Normal forms agree up to row and column permutations.
pub fn equivalent(a: &SemigroupMatrix, b: &SemigroupMatrix) -> bool {
    let (na, nb) = (normal_form(a), normal_form(b));
    na.hash == nb.hash && isomorphic(&na.matrix, &nb.matrix)
}

/// Injections of rows and columns of `m` into `n` preserving entries.
pub fn is_submatrix(m: &SemigroupMatrix, n: &SemigroupMatrix) -> Result<bool> {
    if m.rows > n.rows || m.cols > n.cols {
        return Ok(false);
    }
    if m.rows == 0 || m.cols == 0 {
        return Ok(true);
    }
    let budget = Caps::get().search_nodes;
    let mut nodes = 0u64;
    let mut col_map = vec![usize::MAX; m.cols];
    let mut used = vec![false; n.cols];
    // candidate rows of n for each row of m given the columns fixed so far
    let cands: Vec<Vec<usize>> = vec![(0..n.rows).collect(); m.rows];
    fn matchable(cands: &[Vec<usize>], n_rows: usize) -> bool {
        // bipartite matching by augmenting paths
        let mut owner = vec![usize::MAX; n_rows];
        fn augment(r: usize, cands: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
            for &t in &cands[r] {
                if !seen[t] {
                    seen[t] = true;
                    if owner[t] == usize::MAX || augment(owner[t], cands, seen, owner) {
                        owner[t] = r;
                        return true;
                    }
                }
            }
            false
        }
        (0..cands.len()).all(|r| augment(r, cands, &mut vec![false; n_rows], &mut owner))
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        m: &SemigroupMatrix,
        n: &SemigroupMatrix,
        c: usize,
        cands: &[Vec<usize>],
        col_map: &mut [usize],
        used: &mut [bool],
        nodes: &mut u64,
        budget: u64,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::CapExceeded {
                what: "sub-matrix search nodes",
                needed: *nodes as u128,
                cap: budget as u128,
            });
        }
        if !matchable(cands, n.rows) {
            return Ok(false);
        }
        if c == m.cols {
            return Ok(true);
        }
        for t in 0..n.cols {
            if used[t] {
                continue;
            }
            let next: Vec<Vec<usize>> = (0..m.rows)
                .map(|r| cands[r].iter().copied().filter(|&x| n.get(x, t) == m.get(r, c)).collect())
                .collect();
            if next.iter().any(|v| v.is_empty()) {
                continue;
            }
            used[t] = true;
            col_map[c] = t;
            if go(m, n, c + 1, &next, col_map, used, nodes, budget)? {
                return Ok(true);
            }
            used[t] = false;
        }
        Ok(false)
    }
    go(m, n, 0, &cands, &mut col_map, &mut used, &mut nodes, budget)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderStatus {
    /// Normal forms of powers `index` and `index + period` coincide.
    Finite { index: usize, period: usize },
    /// No repeat within the budget; distinct-row counts of the computed powers.
    Unknown { distinct_rows: Vec<usize> },
}

impl OrderStatus {
    pub fn is_finite(&self) -> bool {
        matches!(self, OrderStatus::Finite { .. })
    }
}

/// Looks for a repeat among the normal forms of the first `budget` powers.
///
/// Each power is computed from the normal form of the previous one, which is
/// sound because deduplication commutes with the Kronecker product.
pub fn finite_order(m: &SemigroupMatrix, budget: usize) -> Result<OrderStatus> {
    if budget == 0 {
        return invalid("order budget must be at least 1");
    }
    if m.semigroup.is_none() {
        return invalid("finite order needs a matrix over a semigroup");
    }
    let base = normal_form(m).matrix;
    let mut seen: Vec<NormalForm> = vec![normal_form(m)];
    let mut rows = vec![seen[0].matrix.rows];
    for power in 2..=budget {
        let prev = &seen.last().expect("nonempty").matrix;
        let cells = (prev.rows * base.rows) as u128 * (prev.cols * base.cols) as u128;
        if cells > Caps::get().matrix_cells {
            break;
        }
        let next = normal_form(&kronecker_product(prev, &base)?);
        rows.push(next.matrix.rows);
        if let Some(j) = seen.iter().position(|nf| nf.hash == next.hash && isomorphic(&nf.matrix, &next.matrix)) {
            return Ok(OrderStatus::Finite {
                index: j + 1,
                period: power - (j + 1),
            });
        }
        seen.push(next);
    }
    Ok(OrderStatus::Unknown { distinct_rows: rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoByTwoReport {
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub order: OrderStatus,
    pub d_is_bc: bool,
    pub d_is_cb: bool,
    /// Distinct rows among the `n` rows with a single "down" factor in the
    /// `n`-th power, for `n = 1..=row_budget`; empty when `d = bc = cb`.
    pub singleton_rows: Vec<usize>,
    /// Finite order forces `d = bc = cb`, and otherwise the singleton rows
    /// are pairwise distinct.
    pub consistent: bool,
}

/// The matrix `[[1, b], [c, d]]` over a monoid.
pub fn two_by_two_claim(
    s: &FiniteSemigroup,
    b: usize,
    c: usize,
    d: usize,
    order_budget: usize,
    row_budget: usize,
) -> Result<TwoByTwoReport> {
    let Some(one) = s.find_identity() else {
        return invalid("the 2x2 claim needs a monoid");
    };
    let m = SemigroupMatrix::over(Arc::new(s.clone()), vec![vec![one, b], vec![c, d]])?;
    let order = finite_order(&m, order_budget)?;
    let d_is_bc = d == s.mul(b, c);
    let d_is_cb = d == s.mul(c, b);
    let mut singleton_rows = Vec::new();
    if !(d_is_bc && d_is_cb) {
        for n in 1..=row_budget {
            check_cap("matrix cells", (n as u128) << n, Caps::get().matrix_cells)?;
            let rows: HashSet<Vec<usize>> = (0..n)
                .map(|down| {
                    (0..1usize << n)
                        .map(|col| {
                            (0..n).fold(one, |acc, p| {
                                let r = usize::from(p == down);
                                s.mul(acc, m.get(r, col >> (n - 1 - p) & 1))
                            })
                        })
                        .collect()
                })
                .collect();
            singleton_rows.push(rows.len());
        }
    }
    let consistent = if d_is_bc && d_is_cb {
        true
    } else {
        !order.is_finite() && singleton_rows.iter().enumerate().all(|(i, &r)| r > i)
    };
    Ok(TwoByTwoReport {
        b,
        c,
        d,
        order,
        d_is_bc,
        d_is_cb,
        singleton_rows,
        consistent,
    })
}

/// Edge function `2^V → colours`, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    vertices: usize,
    colours: usize,
    edges: Vec<u32>,
}

impl Hypergraph {
    pub fn new(vertices: usize, colours: usize, edges: Vec<usize>) -> Result<Self> {
        check_cap("hypergraph vertices", vertices as u128, Caps::get().hypergraph_vertices as u128)?;
        if edges.len() != 1 << vertices {
            return invalid(format!("edge table needs {} entries, got {}", 1usize << vertices, edges.len()));
        }
        if let Some(&bad) = edges.iter().find(|&&c| c >= colours) {
            return Err(Error::OutOfRange { element: bad, size: colours });
        }
        Ok(Hypergraph {
            vertices,
            colours,
            edges: edges.into_iter().map(|c| c as u32).collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn colour_count(&self) -> usize {
        self.colours
    }

    pub fn edge(&self, set: u32) -> usize {
        self.edges[set as usize] as usize
    }

    pub fn is_surjective(&self) -> bool {
        let seen: HashSet<u32> = self.edges.iter().copied().collect();
        seen.len() == self.colours
    }
}

/// Vertices of `g` first, then those of `h`; `edge(U) = agg(g(U ∩ V_g), h(U ∩ V_h))`.
pub fn hypergraph_kron(g: &Hypergraph, h: &Hypergraph, agg: &SemigroupMatrix) -> Result<Hypergraph> {
    if agg.row_count() < g.colours || agg.col_count() < h.colours {
        return invalid("aggregation matrix does not cover the colours");
    }
    let v = g.vertices + h.vertices;
    check_cap("hypergraph vertices", v as u128, Caps::get().hypergraph_vertices as u128)?;
    let low = (1u32 << g.vertices) - 1;
    let edges: Vec<usize> = (0..1u32 << v)
        .map(|u| agg.get(g.edge(u & low), h.edge(u >> g.vertices)))
        .collect();
    Hypergraph::new(v, agg.value_bound().max(1), edges)
}

/// Distinct rows of the matrix (subsets of `x`) × (subsets of the rest) → colour of the union.
pub fn hypergraph_rank(g: &Hypergraph, x: u32) -> Result<usize> {
    let full = (1u32 << g.vertices) - 1;
    if x & !full != 0 {
        return invalid("subset outside the vertices");
    }
    let rest = full & !x;
    let rows: HashSet<Vec<u32>> = crate::rank::subsets_of(x)
        .map(|r| crate::rank::subsets_of(rest).map(|c| g.edges[(r | c) as usize]).collect())
        .collect();
    Ok(rows.len())
}

/// `S(n)`: vertices `0..n`, a colouring by elements of `S` is a word, its value the product.
#[derive(Debug, Clone)]
pub struct SemigroupHypergraph {
    semigroup: FiniteSemigroup,
    n: usize,
}

pub fn semigroup_hypergraph(s: &FiniteSemigroup, n: usize) -> Result<SemigroupHypergraph> {
    if n == 0 {
        return invalid("S(n) needs at least one vertex");
    }
    Ok(SemigroupHypergraph {
        semigroup: s.clone(),
        n,
    })
}

impl SemigroupHypergraph {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn value(&self, word: &[usize]) -> Result<usize> {
        if word.len() != self.n {
            return invalid("word length must equal the vertex count");
        }
        if let Some(&bad) = word.iter().find(|&&x| x >= self.semigroup.size()) {
            return Err(Error::OutOfRange {
                element: bad,
                size: self.semigroup.size(),
            });
        }
        Ok(self.semigroup.product(word).expect("nonempty"))
    }

    /// Distinct rows of (colourings of `x`) × (colourings of the rest) → product.
    pub fn rank(&self, x: u32) -> Result<usize> {
        let k = self.semigroup.size();
        let inside: Vec<usize> = (0..self.n).filter(|&i| x >> i & 1 == 1).collect();
        let outside: Vec<usize> = (0..self.n).filter(|&i| x >> i & 1 == 0).collect();
        let rows = (k as u128).pow(inside.len() as u32);
        let cols = (k as u128).pow(outside.len() as u32);
        check_cap("matrix cells", rows * cols, Caps::get().matrix_cells)?;
        let decode = |mut code: usize, pos: &[usize], word: &mut [usize]| {
            for &p in pos {
                word[p] = code % k;
                code /= k;
            }
        };
        let mut word = vec![0; self.n];
        let set: HashSet<Vec<usize>> = (0..rows as usize)
            .map(|r| {
                decode(r, &inside, &mut word);
                (0..cols as usize)
                    .map(|c| {
                        decode(c, &outside, &mut word);
                        self.semigroup.product(&word).expect("nonempty")
                    })
                    .collect()
            })
            .collect();
        Ok(set.len())
    }
}

/// A surjective matrix over `colours` values with `n` distinct rows: an
/// `n × n` diagonal pattern followed by one column per colour.
pub fn growing_factor(n: usize, colours: usize) -> SemigroupMatrix {
    assert!(colours >= 2 && n >= 1);
    let rows = (0..n)
        .map(|i| (0..n).map(|j| usize::from(i == j)).chain(0..colours).collect())
        .collect();
    SemigroupMatrix::new(rows).expect("rectangular")
}

/// For each `n`, `(rows of the growing factor, rows of its product with a
/// fixed surjective factor)` along `agg`, growing on the left and then on
/// the right.
pub fn irredundant_growth(agg: &SemigroupMatrix, sizes: &[usize]) -> Result<Vec<(usize, usize)>> {
    let (a1, a2) = (agg.row_count(), agg.col_count());
    if a1 < 2 || a2 < 2 {
        return invalid("growth families need at least two colours on each side");
    }
    let fixed = |k: usize| SemigroupMatrix::new(vec![(0..k).collect()]).expect("one row");
    let mut out = Vec::new();
    for &n in sizes {
        let left = growing_factor(n, a1);
        let p = aggregated_product(&left, &fixed(a2), agg)?;
        out.push((left.distinct_rows(), p.distinct_rows()));
        let right = growing_factor(n, a2);
        let q = aggregated_product(&fixed(a1), &right, agg)?;
        out.push((right.distinct_rows(), q.distinct_rows()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sg(s: FiniteSemigroup) -> Arc<FiniteSemigroup> {
        Arc::new(s)
    }

    #[test]
    fn products() {
        let z3 = sg(FiniteSemigroup::cyclic_group(3));
        let a = SemigroupMatrix::over(z3.clone(), vec![vec![1]]).unwrap();
        let b = SemigroupMatrix::over(z3.clone(), vec![vec![2]]).unwrap();
        assert_eq!(kronecker_product(&a, &b).unwrap().to_rows(), vec![vec![0]]);
        let x = SemigroupMatrix::over(z3.clone(), vec![vec![0, 1, 2], vec![1, 1, 0]]).unwrap();
        let y = SemigroupMatrix::over(z3.clone(), vec![vec![0, 1], vec![2, 2], vec![1, 0]]).unwrap();
        let p = kronecker_product(&x, &y).unwrap();
        assert_eq!((p.row_count(), p.col_count()), (6, 6));
        let left = kronecker_product(&kronecker_product(&x, &y).unwrap(), &x).unwrap();
        let right = kronecker_product(&x, &kronecker_product(&y, &x).unwrap()).unwrap();
        assert_eq!(left, right);
        assert!(kronecker_power(&x, 0).is_err());
        assert_eq!(kronecker_power(&x, 3).unwrap().row_count(), 8);
    }

    #[test]
    fn normal_forms() {
        let c = SemigroupMatrix::constant(3, 4, 2, None);
        let nf = normal_form(&c);
        assert_eq!((nf.matrix.row_count(), nf.matrix.col_count()), (1, 1));
        let id = SemigroupMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let nf = normal_form(&id);
        assert!(isomorphic(&nf.matrix, &id));
        assert_eq!(normal_form(&nf.matrix), nf);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let m = SemigroupMatrix::new((0..r).map(|_| (0..c).map(|_| rng.gen_range(0..3)).collect()).collect()).unwrap();
            let a = normal_form_ordered(&m, true);
            let b = normal_form_ordered(&m, false);
            assert_eq!(a.matrix, b.matrix);
            assert!(is_irredundant(&a.matrix));
        }
    }

    #[test]
    fn isomorphism_under_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..7), rng.gen_range(1..7));
            let m = SemigroupMatrix::new((0..r).map(|_| (0..c).map(|_| rng.gen_range(0..2)).collect()).collect()).unwrap();
            let mut pr: Vec<usize> = (0..r).collect();
            let mut pc: Vec<usize> = (0..c).collect();
            for i in (1..r).rev() {
                pr.swap(i, rng.gen_range(0..=i));
            }
            for i in (1..c).rev() {
                pc.swap(i, rng.gen_range(0..=i));
            }
            let p = m.select(&pr, &pc);
            assert!(isomorphic(&m, &p));
            assert_eq!(invariant_hash(&m), invariant_hash(&p));
            assert!(equivalent(&m, &p));
            let mut q = p.clone();
            q.entries[0] ^= 1;
            let brute = {
                // compare against exhaustive permutations on tiny sizes
                fn perms(n: usize) -> Vec<Vec<usize>> {
                    if n == 0 {
                        return vec![vec![]];
                    }
                    let mut out = Vec::new();
                    for p in perms(n - 1) {
                        for i in 0..n {
                            let mut v = p.clone();
                            v.insert(i, n - 1);
                            out.push(v);
                        }
                    }
                    out
                }
                if r <= 5 && c <= 5 {
                    Some(perms(r).iter().any(|a| perms(c).iter().any(|b| m.select(a, b) == q)))
                } else {
                    None
                }
            };
            if let Some(b) = brute {
                assert_eq!(isomorphic(&m, &q), b);
            }
        }
    }

    #[test]
    fn submatrices() {
        let m = SemigroupMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(is_submatrix(&m, &m).unwrap());
        let v = SemigroupMatrix::new(vec![vec![1]]).unwrap();
        assert!(is_submatrix(&v, &m).unwrap());
        assert!(!is_submatrix(&m, &SemigroupMatrix::constant(3, 3, 0, None)).unwrap());
        let big = SemigroupMatrix::new(vec![vec![2, 0, 1], vec![0, 0, 0], vec![2, 1, 0]]).unwrap();
        assert!(is_submatrix(&m, &big).unwrap());
    }

    #[test]
    fn orders() {
        let z2 = sg(FiniteSemigroup::cyclic_group(2));
        let c = SemigroupMatrix::constant(2, 2, 0, Some(z2.clone()));
        assert_eq!(finite_order(&c, 3).unwrap(), OrderStatus::Finite { index: 1, period: 1 });
        let g = SemigroupMatrix::over(z2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(finite_order(&g, 4).unwrap().is_finite());
        let m = sg(FiniteSemigroup::alternating_word_monoid());
        let x = SemigroupMatrix::over(m, vec![vec![0, 1], vec![2, 5]]).unwrap();
        match finite_order(&x, 5).unwrap() {
            OrderStatus::Unknown { distinct_rows } => {
                assert!(distinct_rows.windows(2).all(|w| w[1] > w[0]), "{distinct_rows:?}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nf_iteration_matches_direct_powers() {
        let s = sg(FiniteSemigroup::monogenic(2, 2));
        let m = SemigroupMatrix::over(s, vec![vec![0, 1], vec![2, 1]]).unwrap();
        let mut nf = normal_form(&m).matrix;
        for n in 2..=5 {
            nf = normal_form(&kronecker_product(&nf, &m).unwrap()).matrix;
            assert!(equivalent(&nf, &kronecker_power(&m, n).unwrap()));
        }
    }

    #[test]
    fn two_by_two() {
        let z3 = FiniteSemigroup::cyclic_group(3);
        let r = two_by_two_claim(&z3, 0, 0, 0, 5, 6).unwrap();
        assert!(r.order.is_finite() && r.consistent);
        let r = two_by_two_claim(&z3, 1, 2, 0, 5, 6).unwrap();
        assert!(r.d_is_bc && r.d_is_cb && r.consistent);
        let m = FiniteSemigroup::alternating_word_monoid();
        let r = two_by_two_claim(&m, 1, 2, 5, 5, 6).unwrap();
        assert!(!r.d_is_bc);
        assert_eq!(r.singleton_rows, vec![1, 2, 3, 4, 5, 6]);
        assert!(r.consistent);
    }

    #[test]
    fn multiplication_matrices() {
        let t = FiniteSemigroup::trivial();
        assert_eq!(multiplication_matrix(&t, &[0], &[0]).unwrap().distinct_rows(), 1);
        let z2 = FiniteSemigroup::cyclic_group(2);
        assert_eq!(multiplication_matrix(&z2, &[0, 1], &[0, 1]).unwrap().to_rows(), vec![vec![0, 1], vec![1, 0]]);
        let m = FiniteSemigroup::alternating_word_monoid();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(multiplication_matrix(&m, &[0], &all).unwrap().to_rows(), vec![all.clone()]);
        assert!(multiplication_matrix(&m, &[], &all).is_err());
    }

    #[test]
    fn irredundance() {
        assert!(is_irredundant(&SemigroupMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap()));
        assert!(!is_irredundant(&SemigroupMatrix::constant(2, 2, 0, None)));
    }

    #[test]
    fn hypergraphs() {
        let g = Hypergraph::new(1, 2, vec![0, 1]).unwrap();
        let h = Hypergraph::new(1, 2, vec![1, 0]).unwrap();
        let xor = SemigroupMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let k = hypergraph_kron(&g, &h, &xor).unwrap();
        assert_eq!(k.vertex_count(), 2);
        assert_eq!(k.edge(0), xor.get(g.edge(0), h.edge(0)));
        let c = Hypergraph::new(3, 1, vec![0; 8]).unwrap();
        assert_eq!(hypergraph_rank(&c, 0b011).unwrap(), 1);
        assert_eq!(hypergraph_rank(&k, 0).unwrap(), 1);
        assert!(Hypergraph::new(2, 2, vec![0, 1]).is_err());
    }

    #[test]
    fn semigroup_hypergraph_products() {
        let z2 = FiniteSemigroup::cyclic_group(2);
        let h = semigroup_hypergraph(&z2, 3).unwrap();
        for w in 0..8usize {
            let word: Vec<usize> = (0..3).map(|i| w >> i & 1).collect();
            assert_eq!(h.value(&word).unwrap(), word.iter().sum::<usize>() % 2);
        }
        assert_eq!(h.rank(0b001).unwrap(), 2);
        assert_eq!(h.rank(0).unwrap(), 1);
    }

    #[test]
    fn growth() {
        let xor = SemigroupMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        for (factor, product) in irredundant_growth(&xor, &[1, 2, 5, 9]).unwrap() {
            assert!(product >= factor);
        }
    }
}
