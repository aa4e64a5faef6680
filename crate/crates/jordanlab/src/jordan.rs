//! The base-`p` recursion for `c(r, s, p)` and `λ(r, s, p)`.
//!
//! Writing `λ(r, s, p) = (m_1·μ_1, …, m_k·μ_k)` with `μ_1 > … > μ_k > 0`, the
//! composition `c(r, s, p) = (m_1, …, m_k)` of `r` is computed by a six-case
//! recursion on the base-`p` shapes of `r` and `s`. A parallel recursion
//! carries the part values `μ_i` as well, reconstructing the full partition;
//! the two are kept as separate code paths so their agreement is a meaningful
//! consistency check.
//!
//! Every recursive step strictly decreases `s`, and nested evaluations drop to
//! a strictly smaller power of `p`, so evaluation terminates structurally;
//! both functions are memoized per process keyed by `(r, s, p)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::arith::is_prime;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JordanError {
    #[error("r and s must be positive")]
    ZeroSide,
    #[error("p must be prime (got {0})")]
    NonPrime(u64),
    #[error("inputs too large: p^(k+1) for s={s}, p={p} exceeds 64 bits")]
    Overflow { s: u64, p: u64 },
}

/// Validated triple `(r, s, p)`: `p` prime, sides positive, normalized so
/// `r <= s` (the tensor product is symmetric in the two blocks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Query {
    r: u64,
    s: u64,
    p: u64,
}

impl Query {
    pub fn new(r: u64, s: u64, p: u64) -> Result<Self, JordanError> {
        if r == 0 || s == 0 {
            return Err(JordanError::ZeroSide);
        }
        if !is_prime(p) {
            return Err(JordanError::NonPrime(p));
        }
        let (r, s) = if r <= s { (r, s) } else { (s, r) };
        // Every quantity in the recursion is bounded by p^(k+1) or r+s; insist
        // both fit in a machine word up front so the engines never overflow.
        decompose(s, p)?;
        if r.checked_add(s).is_none() {
            return Err(JordanError::Overflow { s, p });
        }
        Ok(Self { r, s, p })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// Ordered list of positive multiplicities. Zero entries are dropped at
/// construction and never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    entries: Vec<u64>,
}

impl Composition {
    pub fn new(entries: Vec<u64>) -> Self {
        Self { entries: entries.into_iter().filter(|&e| e > 0).collect() }
    }

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.entries.iter().sum()
    }

    pub fn first(&self) -> Option<u64> {
        self.entries.first().copied()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Reversal `rev((m_1, …, m_k)) = (m_k, …, m_1)`.
pub fn rev(c: &Composition) -> Composition {
    let mut entries = c.entries.clone();
    entries.reverse();
    Composition { entries }
}

/// Concatenation `u ⊕ v`.
pub fn concat(u: &Composition, v: &Composition) -> Composition {
    let mut entries = u.entries.clone();
    entries.extend_from_slice(&v.entries);
    Composition { entries }
}

/// Partition in run-length form: strictly decreasing values with positive
/// multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunLengthPartition {
    /// `(multiplicity, value)` pairs.
    runs: Vec<(u64, u64)>,
}

impl RunLengthPartition {
    /// Panics unless values are strictly decreasing and positive and every
    /// multiplicity is positive. The recursion never needs to merge adjacent
    /// runs; a violation here is an implementation bug, not bad input.
    pub fn from_runs(runs: Vec<(u64, u64)>) -> Self {
        for pair in runs.windows(2) {
            assert!(pair[0].1 > pair[1].1, "run values must be strictly decreasing");
        }
        for &(m, v) in &runs {
            assert!(m > 0 && v > 0, "runs must have positive multiplicity and value");
        }
        Self { runs }
    }

    pub fn empty() -> Self {
        Self { runs: Vec::new() }
    }

    pub fn runs(&self) -> &[(u64, u64)] {
        &self.runs
    }

    /// Number of parts, counted with multiplicity.
    pub fn part_count(&self) -> u64 {
        self.runs.iter().map(|&(m, _)| m).sum()
    }

    pub fn weight(&self) -> u128 {
        self.runs.iter().map(|&(m, v)| m as u128 * v as u128).sum()
    }

    /// Expanded weakly decreasing parts list. Linear in the part count.
    pub fn parts(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for &(m, v) in &self.runs {
            out.extend(std::iter::repeat(v).take(m as usize));
        }
        out
    }
}

impl fmt::Display for RunLengthPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (m, v)) in self.runs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}\u{b7}{v}")?;
        }
        write!(f, ")")
    }
}

/// Projects out the multiplicity sequence `(m_1, …, m_k)`.
pub fn composition_of(rlp: &RunLengthPartition) -> Composition {
    Composition::new(rlp.runs.iter().map(|&(m, _)| m).collect())
}

/// `s = b·p^k + d` with `p^k <= s < p^(k+1)`, `1 <= b < p`, `0 <= d < p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SDecomposition {
    pub k: u32,
    pub b: u64,
    pub d: u64,
    /// `p^k`, kept alongside since every consumer needs it.
    pub pk: u64,
}

impl SDecomposition {
    /// `r = a·p^k + c` for this decomposition's `k`.
    pub fn split_r(&self, r: u64) -> RDecomposition {
        RDecomposition { a: r / self.pk, c: r % self.pk }
    }
}

/// `r = a·p^k + c` relative to an accompanying [`SDecomposition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RDecomposition {
    pub a: u64,
    pub c: u64,
}

/// Base-`p` shape of `s`. Errors only when `p^(k+1)` would overflow a `u64`.
pub fn decompose(s: u64, p: u64) -> Result<SDecomposition, JordanError> {
    debug_assert!(s >= 1 && p >= 2);
    let mut pk = 1u64;
    let mut k = 0u32;
    while pk <= s / p {
        pk *= p;
        k += 1;
    }
    // pk <= s < pk*p must hold with pk*p representable.
    if pk.checked_mul(p).is_none() {
        return Err(JordanError::Overflow { s, p });
    }
    Ok(SDecomposition { k, b: s / pk, d: s % pk, pk })
}

/// Middle block of the split case: `u = c(c1,d1,p) ⊕ (d1−c1) ⊕ rev(c(c1,d1,p))`
/// with `c1 = min{c,d}`, `d1 = max{c,d}` (zero entries dropped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case3Prefix {
    pub c1: u64,
    pub d1: u64,
    pub u: Composition,
}

impl Case3Prefix {
    pub fn new(c: u64, d: u64, p: u64) -> Self {
        let (c1, d1) = (c.min(d), c.max(d));
        let inner = if c1 == 0 { Composition::empty() } else { eval_composition(c1, d1, p) };
        let mid = Composition::new(vec![d1 - c1]);
        let u = concat(&concat(&inner, &mid), &rev(&inner));
        Self { c1, d1, u }
    }
}

/// One step of the recursion, with everything the two engines need.
///
/// Guards, in order: `Truncate` when `r + s > p^(k+1)`; `Overlap` when
/// `c + d > p^k`; `Split` when `1 <= c + d <= p^k` and `a > 0`; `Rectangle`
/// (terminal) when `a = 0`, `d = 0`; `Reflect` when `a = 0`, `d > 0`; and
/// `PowerBlock` for the remaining `c = d = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CaseStep {
    /// `c = (r+s−p^(k+1)) ⊕ c(p^(k+1)−s, p^(k+1)−r)`; prefix parts have value `p^(k+1)`.
    Truncate { prefix: u64, value: u64, next: (u64, u64) },
    /// `c = (c+d−p^k) ⊕ c((a+b+1)p^k−s, (a+b+1)p^k−r)`; prefix value `(a+b+1)p^k`.
    Overlap { prefix: u64, value: u64, next: (u64, u64) },
    /// `c = u ⊕ c((a+b)p^k−s, (a+b)p^k−r)`; `u`-block values sit at `(a+b)p^k ± ν`.
    Split { c: u64, d: u64, base: u64, next: (u64, u64) },
    /// `r <= p^k`, `s = b·p^k`: `c = (r)`, all parts equal to `s`.
    Rectangle,
    /// `c(r, b·p^k+d) = rev(c(r, b·p^k−d))`; values mirror through `2b·p^k`.
    Reflect { mirror: u64, next: (u64, u64) },
    /// `c = (p^k) ⊕ c((a−1)p^k, (b−1)p^k)`; prefix value `(a+b−1)p^k`.
    PowerBlock { pk: u64, value: u64, next: (u64, u64) },
}

fn classify(r: u64, s: u64, p: u64) -> CaseStep {
    debug_assert!(1 <= r && r <= s);
    let sd = decompose(s, p).expect("overflow excluded at Query construction");
    let (k_pow, b, d) = (sd.pk as u128, sd.b as u128, sd.d as u128);
    let rd = sd.split_r(r);
    let (a, c) = (rd.a as u128, rd.c as u128);
    let (r1, s1) = (r as u128, s as u128);
    let pk1 = k_pow * p as u128;

    if r1 + s1 > pk1 {
        return CaseStep::Truncate {
            prefix: (r1 + s1 - pk1) as u64,
            value: pk1 as u64,
            next: ((pk1 - s1) as u64, (pk1 - r1) as u64),
        };
    }
    if c + d > k_pow {
        // Consequence of the guards, checked rather than assumed.
        assert!(a + b <= p as u128 - 2, "overlap case requires a+b <= p-2");
        let base = (a + b + 1) * k_pow;
        return CaseStep::Overlap {
            prefix: (c + d - k_pow) as u64,
            value: base as u64,
            next: ((base - s1) as u64, (base - r1) as u64),
        };
    }
    if c + d >= 1 && a > 0 {
        let base = (a + b) * k_pow;
        return CaseStep::Split {
            c: c as u64,
            d: d as u64,
            base: base as u64,
            next: ((base - s1) as u64, (base - r1) as u64),
        };
    }
    if a == 0 && d == 0 {
        return CaseStep::Rectangle;
    }
    if a == 0 {
        return CaseStep::Reflect {
            mirror: (2 * b * k_pow) as u64,
            next: (r, (b * k_pow - d) as u64),
        };
    }
    // c = d = 0: r = a·p^k, s = b·p^k with a > 0.
    CaseStep::PowerBlock {
        pk: k_pow as u64,
        value: ((a + b - 1) * k_pow) as u64,
        next: (((a - 1) * k_pow) as u64, ((b - 1) * k_pow) as u64),
    }
}

type Key = (u64, u64, u64);

fn comp_cache() -> &'static Mutex<HashMap<Key, Arc<Vec<u64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<u64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn part_cache() -> &'static Mutex<HashMap<Key, Arc<Vec<(u64, u64)>>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<(u64, u64)>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cache_get<V>(cache: &Mutex<HashMap<Key, Arc<V>>>, key: Key) -> Option<Arc<V>> {
    cache.lock().unwrap().get(&key).cloned()
}

fn cache_put<V>(cache: &Mutex<HashMap<Key, Arc<V>>>, key: Key, value: Arc<V>) {
    cache.lock().unwrap().insert(key, value);
}

/// The multiplicity composition `c(r, s, p)`.
pub fn jordan_composition(q: &Query) -> Composition {
    Composition { entries: eval_composition(q.r, q.s, q.p).entries }
}

enum CompOp {
    Prefix(Vec<u64>),
    Reverse,
}

/// Iterative engine: walk the case chain recording one op per step, then fold
/// back out, caching every intermediate `(r, s)` along the chain.
fn eval_composition(r0: u64, s0: u64, p: u64) -> Composition {
    if r0 == 0 {
        return Composition::empty();
    }
    if let Some(hit) = cache_get(comp_cache(), (r0, s0, p)) {
        return Composition { entries: (*hit).clone() };
    }
    let mut trace: Vec<(Key, CompOp)> = Vec::new();
    let (mut r, mut s) = (r0, s0);
    let inner: Arc<Vec<u64>> = loop {
        if r == 0 {
            break Arc::new(Vec::new());
        }
        if let Some(hit) = cache_get(comp_cache(), (r, s, p)) {
            break hit;
        }
        match classify(r, s, p) {
            CaseStep::Truncate { prefix, next, .. } | CaseStep::Overlap { prefix, next, .. } => {
                trace.push(((r, s, p), CompOp::Prefix(vec![prefix])));
                (r, s) = next;
            }
            CaseStep::Split { c, d, next, .. } => {
                let u = Case3Prefix::new(c, d, p).u;
                trace.push(((r, s, p), CompOp::Prefix(u.entries)));
                (r, s) = next;
            }
            CaseStep::Rectangle => {
                let terminal = Arc::new(vec![r]);
                cache_put(comp_cache(), (r, s, p), terminal.clone());
                break terminal;
            }
            CaseStep::Reflect { next, .. } => {
                trace.push(((r, s, p), CompOp::Reverse));
                (r, s) = next;
            }
            CaseStep::PowerBlock { pk, next, .. } => {
                trace.push(((r, s, p), CompOp::Prefix(vec![pk])));
                (r, s) = next;
            }
        }
    };
    let mut acc = inner;
    for (key, op) in trace.into_iter().rev() {
        let entries = match op {
            CompOp::Prefix(mut pre) => {
                pre.retain(|&e| e > 0);
                pre.extend(acc.iter().copied());
                pre
            }
            CompOp::Reverse => acc.iter().rev().copied().collect(),
        };
        acc = Arc::new(entries);
        cache_put(comp_cache(), key, acc.clone());
    }
    Composition { entries: (*acc).clone() }
}

/// The Jordan partition `λ(r, s, p)` in run-length form.
///
/// Multiplicities read in order equal [`jordan_composition`]; the part count
/// is `min(r, s)` and the weight is `r·s` (both asserted).
pub fn jordan_partition(q: &Query) -> RunLengthPartition {
    let rlp = eval_partition(q.r, q.s, q.p);
    let rlp = RunLengthPartition { runs: (*rlp).clone() };
    debug_assert_eq!(rlp.part_count(), q.r);
    debug_assert_eq!(rlp.weight(), q.r as u128 * q.s as u128);
    rlp
}

enum PartOp {
    Prefix(Vec<(u64, u64)>),
    Mirror(u64),
}

fn eval_partition(r0: u64, s0: u64, p: u64) -> Arc<Vec<(u64, u64)>> {
    if r0 == 0 {
        return Arc::new(Vec::new());
    }
    if let Some(hit) = cache_get(part_cache(), (r0, s0, p)) {
        return hit;
    }
    let mut trace: Vec<(Key, PartOp)> = Vec::new();
    let (mut r, mut s) = (r0, s0);
    let inner: Arc<Vec<(u64, u64)>> = loop {
        if r == 0 {
            break Arc::new(Vec::new());
        }
        if let Some(hit) = cache_get(part_cache(), (r, s, p)) {
            break hit;
        }
        match classify(r, s, p) {
            CaseStep::Truncate { prefix, value, next }
            | CaseStep::Overlap { prefix, value, next } => {
                trace.push(((r, s, p), PartOp::Prefix(vec![(prefix, value)])));
                (r, s) = next;
            }
            CaseStep::Split { c, d, base, next } => {
                // u-block values: base+ν for each distinct part ν of λ(c1,d1),
                // then base itself, then base−ν in reverse order. Strict
                // decrease holds because every ν is positive; from_runs checks.
                let (c1, d1) = (c.min(d), c.max(d));
                let nested = if c1 == 0 { Arc::new(Vec::new()) } else { eval_partition(c1, d1, p) };
                let mut runs: Vec<(u64, u64)> = Vec::with_capacity(2 * nested.len() + 1);
                for &(m, v) in nested.iter() {
                    runs.push((m, base + v));
                }
                if d1 > c1 {
                    runs.push((d1 - c1, base));
                }
                for &(m, v) in nested.iter().rev() {
                    runs.push((m, base - v));
                }
                trace.push(((r, s, p), PartOp::Prefix(runs)));
                (r, s) = next;
            }
            CaseStep::Rectangle => {
                let terminal = Arc::new(vec![(r, s)]);
                cache_put(part_cache(), (r, s, p), terminal.clone());
                break terminal;
            }
            CaseStep::Reflect { mirror, next } => {
                trace.push(((r, s, p), PartOp::Mirror(mirror)));
                (r, s) = next;
            }
            CaseStep::PowerBlock { pk, value, next } => {
                trace.push(((r, s, p), PartOp::Prefix(vec![(pk, value)])));
                (r, s) = next;
            }
        }
    };
    let mut acc = inner;
    for (key, op) in trace.into_iter().rev() {
        let runs: Vec<(u64, u64)> = match op {
            PartOp::Prefix(mut pre) => {
                pre.extend(acc.iter().copied());
                pre
            }
            PartOp::Mirror(m) => acc.iter().rev().map(|&(mult, v)| (mult, m - v)).collect(),
        };
        // Assemble through the validating constructor: adjacent values must
        // stay strictly decreasing, never merged.
        let checked = RunLengthPartition::from_runs(runs);
        acc = Arc::new(checked.runs);
        cache_put(part_cache(), key, acc.clone());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(r: u64, s: u64, p: u64) -> Query {
        Query::new(r, s, p).unwrap()
    }

    fn comp(r: u64, s: u64, p: u64) -> Vec<u64> {
        jordan_composition(&q(r, s, p)).entries().to_vec()
    }

    #[test]
    fn query_validation() {
        assert_eq!(Query::new(0, 5, 3).unwrap_err(), JordanError::ZeroSide);
        assert_eq!(Query::new(5, 0, 3).unwrap_err(), JordanError::ZeroSide);
        assert_eq!(Query::new(2, 3, 6).unwrap_err(), JordanError::NonPrime(6));
        // Normalization swaps the sides.
        let swapped = Query::new(7, 3, 5).unwrap();
        assert_eq!((swapped.r(), swapped.s()), (3, 7));
        // p^(k+1) for s = 2^63, p = 2 needs 2^64: rejected.
        assert_eq!(
            Query::new(1, 1 << 63, 2).unwrap_err(),
            JordanError::Overflow { s: 1 << 63, p: 2 }
        );
    }

    #[test]
    fn rev_and_concat() {
        let c = Composition::new(vec![1, 47, 1, 1]);
        assert_eq!(rev(&c).entries(), &[1, 1, 47, 1]);
        assert_eq!(rev(&rev(&c)), c);
        assert_eq!(rev(&Composition::empty()), Composition::empty());
        assert_eq!(rev(&Composition::new(vec![5])).entries(), &[5]);

        assert_eq!(
            concat(&Composition::new(vec![1]), &Composition::new(vec![1])).entries(),
            &[1, 1]
        );
        assert_eq!(
            concat(&Composition::new(vec![47]), &Composition::new(vec![1])).entries(),
            &[47, 1]
        );
        let u = Composition::new(vec![3, 2]);
        assert_eq!(concat(&u, &Composition::empty()), u);
    }

    #[test]
    fn composition_drops_zeros() {
        assert_eq!(Composition::new(vec![0, 3, 0, 1, 0]).entries(), &[3, 1]);
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(50, 7).unwrap();
        assert_eq!((d.k, d.b, d.d, d.pk), (2, 1, 1, 49));
        let d = decompose(245, 7).unwrap();
        assert_eq!((d.k, d.b, d.d, d.pk), (2, 5, 0, 49));
        let d = decompose(8, 2).unwrap();
        assert_eq!((d.k, d.b, d.d, d.pk), (3, 1, 0, 8));
        assert_eq!(decompose(u64::MAX, 2).unwrap_err(), JordanError::Overflow { s: u64::MAX, p: 2 });
    }

    #[test]
    fn composition_published_values() {
        assert_eq!(comp(50, 50, 7), vec![1, 1, 47, 1]);
        assert_eq!(comp(50, 98, 7), vec![1, 48, 1]);
        assert_eq!(comp(50, 246, 7), vec![1, 1, 47, 1]);
        assert_eq!(comp(50, 295, 7), vec![2, 47, 1]);
        assert_eq!(comp(2, 3, 2), vec![1, 1]);
        assert_eq!(comp(4, 4, 2), vec![4]);
        for (s, p) in [(1u64, 2u64), (9, 3), (100, 7), (343, 7)] {
            assert_eq!(comp(1, s, p), vec![1], "c(1,{s},{p})");
        }
    }

    #[test]
    fn composition_piecewise_row() {
        // One period of c(50, 49i+j, 7) for i = 2.
        for j in 1..=49u64 {
            let got = comp(50, 49 * 2 + j, 7);
            let want: Vec<u64> = match j {
                1 => vec![1, 1, 47, 1],
                48 => vec![1, 47, 1, 1],
                49 => vec![1, 48, 1],
                _ => vec![1, j - 1, 1, 48 - j, 1],
            };
            assert_eq!(got, want, "j={j}");
        }
    }

    #[test]
    fn partition_published_values() {
        assert_eq!(jordan_partition(&q(2, 3, 2)).runs(), &[(1, 4), (1, 2)]);
        assert_eq!(jordan_partition(&q(2, 2, 3)).runs(), &[(1, 3), (1, 1)]);
        assert_eq!(
            jordan_partition(&q(50, 50, 7)).runs(),
            &[(1, 99), (1, 97), (47, 49), (1, 1)]
        );
        // Dimension check for the big case: 99 + 97 + 47·49 + 1 = 2500.
        assert_eq!(jordan_partition(&q(50, 50, 7)).weight(), 2500);
    }

    #[test]
    fn composition_of_projects_multiplicities() {
        let rlp = RunLengthPartition::from_runs(vec![(1, 4), (1, 2)]);
        assert_eq!(composition_of(&rlp).entries(), &[1, 1]);
        let rlp = RunLengthPartition::from_runs(vec![(4, 4)]);
        assert_eq!(composition_of(&rlp).entries(), &[4]);
        let rlp = RunLengthPartition::from_runs(vec![(1, 99), (1, 97), (47, 49), (1, 1)]);
        assert_eq!(composition_of(&rlp).entries(), &[1, 1, 47, 1]);
    }

    #[test]
    fn case3_prefix_examples() {
        // c = d = 1: middle entry is zero and is dropped.
        let pre = Case3Prefix::new(1, 1, 7);
        assert_eq!((pre.c1, pre.d1), (1, 1));
        assert_eq!(pre.u.entries(), &[1, 1]);
        // c1 = 0 collapses to a single entry (d1).
        let pre = Case3Prefix::new(0, 25, 7);
        assert_eq!(pre.u.entries(), &[25]);
        // Sum of u equals c + d.
        let pre = Case3Prefix::new(1, 25, 7);
        assert_eq!(pre.u.entries(), &[1, 24, 1]);
        assert_eq!(pre.u.sum(), 26);
    }

    #[test]
    fn rectangle_closed_form() {
        // r <= p^k, s = b·p^k gives r parts all equal to s.
        for (r, b, k, p) in [(3u64, 2u64, 1u32, 5u64), (7, 4, 1, 5), (49, 3, 2, 7), (1, 1, 0, 3)] {
            let pk = p.pow(k);
            let s = b * pk;
            if r > pk {
                continue;
            }
            let part = jordan_partition(&q(r, s, p));
            assert_eq!(part.runs(), &[(r, s)], "r={r} s={s} p={p}");
        }
    }

    #[test]
    fn characteristic_zero_ladder() {
        // For p >= r+s the parts are r+s-1, r+s-3, …, s-r+1.
        for r in 1..=6u64 {
            for s in r..=8u64 {
                let p = (2..).find(|&x| x >= r + s && is_prime(x)).unwrap();
                let got = jordan_partition(&q(r, s, p)).parts();
                let want: Vec<u64> = (0..r).map(|i| r + s - 1 - 2 * i).collect();
                assert_eq!(got, want, "r={r} s={s} p={p}");
                assert_eq!(comp(r, s, p), vec![1; r as usize]);
            }
        }
    }

    #[test]
    fn swapped_arguments_agree() {
        for (r, s, p) in [(3u64, 7u64, 2u64), (5, 12, 3), (50, 98, 7)] {
            assert_eq!(comp(r, s, p), comp(s, r, p));
            assert_eq!(jordan_partition(&q(r, s, p)), jordan_partition(&q(s, r, p)));
        }
    }

    /// Case-chain walker with a step budget; counts outer steps plus nested
    /// evaluations so runaway recursion would be caught by tests.
    fn chain_steps(r: u64, s: u64, p: u64, fuel: &mut u64) -> bool {
        let (mut r, mut s) = if r <= s { (r, s) } else { (s, r) };
        loop {
            if r == 0 {
                return true;
            }
            if *fuel == 0 {
                return false;
            }
            *fuel -= 1;
            match classify(r, s, p) {
                CaseStep::Truncate { next, .. }
                | CaseStep::Overlap { next, .. }
                | CaseStep::Reflect { next, .. }
                | CaseStep::PowerBlock { next, .. } => (r, s) = next,
                CaseStep::Split { c, d, next, .. } => {
                    let (c1, d1) = (c.min(d), c.max(d));
                    if c1 > 0 && !chain_steps(c1, d1, p, fuel) {
                        return false;
                    }
                    (r, s) = next;
                }
                CaseStep::Rectangle => return true,
            }
        }
    }

    #[test]
    fn termination_within_fuel_across_scales() {
        let primes: Vec<u64> = (2..=97).filter(|&n| is_prime(n)).collect();
        // Deterministic pseudo-random sweep up to 10^6.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut rand = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..500 {
            let s = rand() % 1_000_000 + 1;
            let r = rand() % s + 1;
            let p = primes[(rand() % primes.len() as u64) as usize];
            let mut fuel = 1_000_000u64;
            assert!(chain_steps(r, s, p, &mut fuel), "fuel exhausted at r={r} s={s} p={p}");
        }
    }

    proptest! {
        #[test]
        fn composition_sums_to_r(r in 1u64..200, s in 1u64..2000, p_idx in 0usize..5) {
            let p = [2u64, 3, 5, 7, 11][p_idx];
            let query = Query::new(r, s, p).unwrap();
            let c = jordan_composition(&query);
            prop_assert_eq!(c.sum(), query.r());
        }

        #[test]
        fn partition_consistent_with_composition(r in 1u64..120, s in 1u64..1200, p_idx in 0usize..5) {
            let p = [2u64, 3, 5, 7, 11][p_idx];
            let query = Query::new(r, s, p).unwrap();
            let rlp = jordan_partition(&query);
            prop_assert_eq!(composition_of(&rlp), jordan_composition(&query));
            prop_assert_eq!(rlp.part_count(), query.r());
            prop_assert_eq!(rlp.weight(), query.r() as u128 * query.s() as u128);
        }

        #[test]
        fn rev_is_involution(entries in proptest::collection::vec(1u64..100, 0..12)) {
            let c = Composition::new(entries);
            prop_assert_eq!(rev(&rev(&c)), c);
        }
    }
}
