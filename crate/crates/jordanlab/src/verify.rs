//! Empirical checks of the periodicity, least-period, subperiodicity and
//! reflection behavior of `s ↦ c(r, s, p)`, with counterexample reporting.
//!
//! Every verifier sweeps a finite window that one full period makes
//! sufficient, evaluates compositions through the fast recursion (optionally
//! re-checking each value against the GF(p) oracle), and emits a
//! [`VerificationReport`]. "Not applicable" is a distinct outcome, not a pass:
//! the subperiod family of checks has content only for `p >= 5`.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::gfp::{oracle_jordan_partition_capped, DEFAULT_ORACLE_CAP};
use crate::jordan::{composition_of, jordan_composition, jordan_partition, rev, Composition, Query};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    /// Periodicity: `c(r, s, p) = c(r, s+p^n, p)` for `r <= p^n`.
    Gpx1,
    /// Reflection inside the period: `c(r, p^n+i, p) = rev(c(r, p^n+(p^n−i), p))`.
    Gpx2,
    /// The least period is exactly `p^n` for `p^(n−1) < r <= p^n`.
    T1,
    /// Subperiod `p^(n−1)` up to `(p−⌈r/p^(n−1)⌉)·p^(n−1)`, and its failure just past it.
    T2,
    /// Reflection inside the subperiod.
    T3,
    /// Reflection around `s = p^n` between the subperiodic bound and `p^n`.
    Obs1,
    /// The subperiod appears one step early after adding a full period to `s`.
    Obs2,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Gpx1,
        TheoremId::Gpx2,
        TheoremId::T1,
        TheoremId::T2,
        TheoremId::T3,
        TheoremId::Obs1,
        TheoremId::Obs2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Gpx1 => "gpx1",
            TheoremId::Gpx2 => "gpx2",
            TheoremId::T1 => "t1",
            TheoremId::T2 => "t2",
            TheoremId::T3 => "t3",
            TheoremId::Obs1 => "obs1",
            TheoremId::Obs2 => "obs2",
        }
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown theorem id `{s}`"))
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyStatus {
    Passed,
    Failed,
    NotApplicable,
}

impl VerifyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerifyStatus::Passed => "passed",
            VerifyStatus::Failed => "failed",
            VerifyStatus::NotApplicable => "not_applicable",
        }
    }
}

/// A single failed comparison: at `s`, the identity predicted `expected` but
/// the recursion produced `actual`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub s: u64,
    pub expected: Composition,
    pub actual: Composition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub p: u64,
    pub r: u64,
    pub checked: u64,
    pub status: VerifyStatus,
    pub counterexamples: Vec<Counterexample>,
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == VerifyStatus::Passed
    }

    /// JSON form: `theorem`, `p`, `r`, `checked`, `passed`, `counterexamples`,
    /// plus `status` (three-valued) and `note` when present.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("theorem".into(), json!(self.theorem.as_str()));
        map.insert("p".into(), json!(self.p));
        map.insert("r".into(), json!(self.r));
        map.insert("checked".into(), json!(self.checked));
        map.insert("passed".into(), json!(self.passed()));
        map.insert("status".into(), json!(self.status.as_str()));
        let cx: Vec<Value> = self
            .counterexamples
            .iter()
            .map(|c| {
                json!({
                    "s": c.s,
                    "expected": c.expected.entries(),
                    "actual": c.actual.entries(),
                })
            })
            .collect();
        map.insert("counterexamples".into(), Value::Array(cx));
        if let Some(note) = &self.note {
            map.insert("note".into(), json!(note));
        }
        Value::Object(map)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifierOptions {
    /// Re-check every composition against the GF(p) oracle when `r·s` is
    /// within `oracle_cap`. Mismatches become counterexamples.
    pub with_oracle: bool,
    pub oracle_cap: usize,
}

impl Default for VerifierOptions {
    fn default() -> Self {
        Self { with_oracle: false, oracle_cap: DEFAULT_ORACLE_CAP }
    }
}

/// Window parameters for `p^(n−1) < r <= p^n` (requires `r >= 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileParams {
    pub r: u64,
    pub p: u64,
    pub n: u32,
    /// `p^(n−1)`.
    pub pk_minus: u64,
    /// `p^n`.
    pub pk: u64,
    /// `⌈r / p^(n−1)⌉`.
    pub ceil_ratio: u64,
    /// `(p − ⌈r/p^(n−1)⌉)·p^(n−1)`, where the subperiodic behavior ends.
    pub sub_bound: u64,
}

impl ProfileParams {
    pub fn new(r: u64, p: u64) -> Option<Self> {
        if r < 2 {
            return None;
        }
        let mut pk_minus = 1u64;
        let mut pk = p;
        let mut n = 1u32;
        while pk < r {
            pk_minus = pk;
            pk = pk.checked_mul(p)?;
            n += 1;
        }
        let ceil_ratio = r.div_ceil(pk_minus);
        debug_assert!(ceil_ratio <= p);
        let sub_bound = (p - ceil_ratio) * pk_minus;
        Some(Self { r, p, n, pk_minus, pk, ceil_ratio, sub_bound })
    }

    /// Hypothesis shared by the subperiod, subreflection and the two
    /// observation checks: `r <= ((p−1)/2)·p^(n−1)`. Empty for `p ∈ {2, 3}`.
    pub fn subperiod_applicable(&self) -> bool {
        2 * (self.r as u128) <= (self.p as u128 - 1) * self.pk_minus as u128
    }
}

/// Least `p^n >= r` (so `n = 0` for `r = 1`).
fn least_power_at_least(r: u64, p: u64) -> (u32, u64) {
    let mut pn = 1u64;
    let mut n = 0u32;
    while pn < r {
        pn = pn.checked_mul(p).expect("p^n overflow in verifier window");
        n += 1;
    }
    (n, pn)
}

/// Shared sweep state: composition fetches (with optional oracle re-checks)
/// and counterexample collection.
struct Checker {
    r: u64,
    p: u64,
    opts: VerifierOptions,
    checked: u64,
    counterexamples: Vec<Counterexample>,
    oracle_mismatch: bool,
}

impl Checker {
    fn new(r: u64, p: u64, opts: VerifierOptions) -> Self {
        Self { r, p, opts, checked: 0, counterexamples: Vec::new(), oracle_mismatch: false }
    }

    fn comp(&mut self, s: u64) -> Composition {
        let q = Query::new(self.r, s, self.p).expect("verifier query in range");
        let c = jordan_composition(&q);
        if self.opts.with_oracle
            && self.r as u128 * s as u128 <= self.opts.oracle_cap as u128
        {
            let oracle = oracle_jordan_partition_capped(&q, self.opts.oracle_cap)
                .expect("oracle within cap");
            let from_oracle = multiplicities(oracle.parts());
            let from_recursion = composition_of(&jordan_partition(&q));
            if from_oracle != c || from_recursion != c {
                self.oracle_mismatch = true;
                self.counterexamples.push(Counterexample {
                    s,
                    expected: from_oracle,
                    actual: c.clone(),
                });
            }
        }
        c
    }

    fn require_equal(&mut self, s: u64, expected: Composition, actual: Composition) {
        self.checked += 1;
        if expected != actual {
            self.counterexamples.push(Counterexample { s, expected, actual });
        }
    }

    /// For boundary checks that assert two values differ.
    fn require_unequal(&mut self, s: u64, lhs: Composition, rhs: Composition) -> bool {
        self.checked += 1;
        let distinct = lhs != rhs;
        if !distinct {
            self.counterexamples.push(Counterexample { s, expected: lhs, actual: rhs });
        }
        distinct
    }

    fn finish(mut self, theorem: TheoremId, mut note: Option<String>) -> VerificationReport {
        self.counterexamples.sort_by_key(|c| c.s);
        if self.oracle_mismatch {
            let extra = "oracle cross-check mismatch";
            note = Some(match note {
                Some(n) => format!("{n}; {extra}"),
                None => extra.to_string(),
            });
        }
        let status =
            if self.counterexamples.is_empty() { VerifyStatus::Passed } else { VerifyStatus::Failed };
        VerificationReport {
            theorem,
            p: self.p,
            r: self.r,
            checked: self.checked,
            status,
            counterexamples: self.counterexamples,
            note,
        }
    }
}

/// Multiplicity composition of a weakly decreasing parts list.
fn multiplicities(parts: &[u64]) -> Composition {
    let mut out = Vec::new();
    for &v in parts {
        match out.last_mut() {
            Some((value, mult)) if *value == v => *mult += 1,
            _ => out.push((v, 1u64)),
        }
    }
    Composition::new(out.into_iter().map(|(_, m)| m).collect())
}

fn not_applicable(theorem: TheoremId, r: u64, p: u64, why: &str) -> VerificationReport {
    VerificationReport {
        theorem,
        p,
        r,
        checked: 0,
        status: VerifyStatus::NotApplicable,
        counterexamples: Vec::new(),
        note: Some(why.to_string()),
    }
}

/// Periodicity: `c(r, s, p) = c(r, s+p^n, p)` for every `s ∈ [r, r+p^n]`,
/// `n` least with `r <= p^n`.
pub fn verify_gpx_periodicity(r: u64, p: u64, opts: VerifierOptions) -> VerificationReport {
    let (_, pn) = least_power_at_least(r, p);
    let mut ck = Checker::new(r, p, opts);
    for s in r..=r + pn {
        let base = ck.comp(s);
        let shifted = ck.comp(s + pn);
        ck.require_equal(s, base, shifted);
    }
    ck.finish(TheoremId::Gpx1, None)
}

/// Reflection inside the period: `c(r, p^n+i, p) = rev(c(r, p^n+(p^n−i), p))`
/// for every `i ∈ [0, p^n]`.
pub fn verify_gpx_reflection(r: u64, p: u64, opts: VerifierOptions) -> VerificationReport {
    let (_, pn) = least_power_at_least(r, p);
    let mut ck = Checker::new(r, p, opts);
    for i in 0..=pn {
        let lhs = ck.comp(pn + i);
        let mirrored = rev(&ck.comp(pn + (pn - i)));
        ck.require_equal(pn + i, mirrored, lhs);
    }
    ck.finish(TheoremId::Gpx2, None)
}

/// Least `L` with `c(r, s, p) = c(r, s+L, p)` for all `s ∈ [r, r+2p^n]`.
/// Only divisors of `p^n` can be periods, so only those are tried.
pub fn least_period(r: u64, p: u64) -> u64 {
    let (n, pn) = least_power_at_least(r, p);
    let window_end = r + 2 * pn;
    'candidate: for j in 0..=n {
        let period = p.pow(j);
        for s in r..=window_end {
            let a = jordan_composition(&Query::new(r, s, p).expect("in range"));
            let b = jordan_composition(&Query::new(r, s + period, p).expect("in range"));
            if a != b {
                continue 'candidate;
            }
        }
        return period;
    }
    unreachable!("p^n is always a period");
}

/// Report form of [`least_period`]: passes iff the least period equals the
/// predicted `p^n`. A failure has no pointwise witness, so it is described in
/// the note instead of the counterexample list.
pub fn verify_least_period(r: u64, p: u64, _opts: VerifierOptions) -> VerificationReport {
    let (n, pn) = least_power_at_least(r, p);
    let found = least_period(r, p);
    let passed = found == pn;
    VerificationReport {
        theorem: TheoremId::T1,
        p,
        r,
        checked: 2 * pn + 1,
        status: if passed { VerifyStatus::Passed } else { VerifyStatus::Failed },
        counterexamples: Vec::new(),
        note: if passed {
            None
        } else {
            Some(format!("least period {found} differs from predicted {p}^{n} = {pn}"))
        },
    }
}

/// Subperiod: `c(r, s, p) = c(r, s+p^(n−1), p)` on `s ∈ [r, subBound]`, and
/// the subperiodic behavior genuinely stops: the values at `subBound+1` and
/// `subBound+p^(n−1)+1` differ.
pub fn verify_subperiod(r: u64, p: u64, opts: VerifierOptions) -> VerificationReport {
    let Some(prof) = ProfileParams::new(r, p) else {
        return not_applicable(TheoremId::T2, r, p, "no n with p^(n-1) < r");
    };
    if !prof.subperiod_applicable() {
        return not_applicable(TheoremId::T2, r, p, "hypothesis r <= ((p-1)/2)p^(n-1) fails");
    }
    let mut ck = Checker::new(r, p, opts);
    for s in r..=prof.sub_bound {
        let base = ck.comp(s);
        let shifted = ck.comp(s + prof.pk_minus);
        ck.require_equal(s, base, shifted);
    }
    let boundary = prof.sub_bound + 1;
    let lhs = ck.comp(boundary);
    let rhs = ck.comp(boundary + prof.pk_minus);
    let distinct = ck.require_unequal(boundary, lhs, rhs);
    let note = if distinct {
        None
    } else {
        Some(format!(
            "boundary check expected inequality at s = {boundary} vs s = {}",
            boundary + prof.pk_minus
        ))
    };
    ck.finish(TheoremId::T2, note)
}

/// Reflection inside the subperiod: for `s = b·p^(n−1)+d`, compare against
/// `rev` of the value at `b·p^(n−1)+(p^(n−1)−d)` whenever both points lie in
/// `[r, subBound]`.
pub fn verify_subreflection(r: u64, p: u64, opts: VerifierOptions) -> VerificationReport {
    let Some(prof) = ProfileParams::new(r, p) else {
        return not_applicable(TheoremId::T3, r, p, "no n with p^(n-1) < r");
    };
    if !prof.subperiod_applicable() {
        return not_applicable(TheoremId::T3, r, p, "hypothesis r <= ((p-1)/2)p^(n-1) fails");
    }
    let mut ck = Checker::new(r, p, opts);
    for s in r..=prof.sub_bound {
        let d = s % prof.pk_minus;
        let mirror = s - d + (prof.pk_minus - d);
        if mirror < r || mirror > prof.sub_bound {
            continue;
        }
        let lhs = ck.comp(s);
        let mirrored = rev(&ck.comp(mirror));
        ck.require_equal(s, mirrored, lhs);
    }
    let note = format!(
        "pairs s = b*{pkm}+d vs b*{pkm}+({pkm}-d), both constrained to [{r}, {sb}]",
        pkm = prof.pk_minus,
        sb = prof.sub_bound,
    );
    ck.finish(TheoremId::T3, Some(note))
}

/// Reflection around `s = p^n` on the gap `subBound < s < p^n`:
/// `c(r, s, p) = rev(c(r, 2p^n − s, p))`.
pub fn verify_outer_reflection(r: u64, p: u64, opts: VerifierOptions) -> VerificationReport {
    let Some(prof) = ProfileParams::new(r, p) else {
        return not_applicable(TheoremId::Obs1, r, p, "no n with p^(n-1) < r");
    };
    if !prof.subperiod_applicable() {
        return not_applicable(TheoremId::Obs1, r, p, "hypothesis r <= ((p-1)/2)p^(n-1) fails");
    }
    let mut ck = Checker::new(r, p, opts);
    for s in prof.sub_bound + 1..prof.pk {
        let mirror = 2 * prof.pk - s;
        if mirror < r {
            continue;
        }
        let lhs = ck.comp(s);
        let mirrored = rev(&ck.comp(mirror));
        ck.require_equal(s, mirrored, lhs);
    }
    ck.finish(TheoremId::Obs1, None)
}

/// After adding a full period `p^n` to `s`, the subperiod shows up one step
/// early: with `r = a·p^(n−1)+c`,
/// `c(r, a·p^(n−1)+c₁+p^n, p) = c(r, (a+1)·p^(n−1)+c₁, p)` for `c₁ ∈ [0, c)`
/// when `c > 0`, and for `r = a·p^(n−1)`,
/// `c(r, (a−1)·p^(n−1)+d+p^n, p) = c(r, a·p^(n−1)+d, p)` for `d ∈ [0, p^(n−1))`.
pub fn verify_early_subperiod(r: u64, p: u64, opts: VerifierOptions) -> VerificationReport {
    let Some(prof) = ProfileParams::new(r, p) else {
        return not_applicable(TheoremId::Obs2, r, p, "no n with p^(n-1) < r");
    };
    if !prof.subperiod_applicable() {
        return not_applicable(TheoremId::Obs2, r, p, "hypothesis r <= ((p-1)/2)p^(n-1) fails");
    }
    let a = r / prof.pk_minus;
    let c = r % prof.pk_minus;
    let mut ck = Checker::new(r, p, opts);
    let note;
    if c > 0 {
        for c1 in 0..c {
            let lhs_s = a * prof.pk_minus + c1 + prof.pk;
            let rhs_s = (a + 1) * prof.pk_minus + c1;
            let lhs = ck.comp(lhs_s);
            let rhs = ck.comp(rhs_s);
            ck.require_equal(lhs_s, rhs, lhs);
        }
        note = format!("branch r = a*p^(n-1)+c with c = {c} > 0");
    } else {
        debug_assert!(a >= 2);
        for d in 0..prof.pk_minus {
            let lhs_s = (a - 1) * prof.pk_minus + d + prof.pk;
            let rhs_s = a * prof.pk_minus + d;
            let lhs = ck.comp(lhs_s);
            let rhs = ck.comp(rhs_s);
            ck.require_equal(lhs_s, rhs, lhs);
        }
        note = format!("branch r = a*p^(n-1) with a = {a}");
    }
    ck.finish(TheoremId::Obs2, Some(note))
}

/// Longest composition over one full period `s ∈ [r, r+p^n)`.
pub fn max_composition_length(r: u64, p: u64) -> usize {
    let (_, pn) = least_power_at_least(r, p);
    (r..r + pn)
        .map(|s| jordan_composition(&Query::new(r, s, p).expect("in range")).len())
        .max()
        .unwrap_or(0)
}

/// Number of distinct first entries of `c(r, s, p)` over one full period.
pub fn distinct_m1_count(r: u64, p: u64) -> usize {
    let (_, pn) = least_power_at_least(r, p);
    let mut seen = std::collections::HashSet::new();
    for s in r..r + pn {
        if let Some(first) = jordan_composition(&Query::new(r, s, p).expect("in range")).first() {
            seen.insert(first);
        }
    }
    seen.len()
}

/// Dispatch by theorem id.
pub fn run_verifier(theorem: TheoremId, r: u64, p: u64, opts: VerifierOptions) -> VerificationReport {
    match theorem {
        TheoremId::Gpx1 => verify_gpx_periodicity(r, p, opts),
        TheoremId::Gpx2 => verify_gpx_reflection(r, p, opts),
        TheoremId::T1 => verify_least_period(r, p, opts),
        TheoremId::T2 => verify_subperiod(r, p, opts),
        TheoremId::T3 => verify_subreflection(r, p, opts),
        TheoremId::Obs1 => verify_outer_reflection(r, p, opts),
        TheoremId::Obs2 => verify_early_subperiod(r, p, opts),
    }
}
