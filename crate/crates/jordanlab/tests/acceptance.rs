//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p jordanlab --test acceptance -- --nocapture` to see
//! the per-criterion summary lines.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use jordanlab::jordan::{composition_of, jordan_composition, jordan_partition, Query};
use jordanlab::verify::{
    least_period, max_composition_length, verify_early_subperiod, verify_gpx_periodicity,
    verify_gpx_reflection, verify_outer_reflection, verify_subperiod, verify_subreflection,
    VerifierOptions,
};
use jordanlab::{oracle_jordan_partition, Composition};

fn q(r: u64, s: u64, p: u64) -> Query {
    Query::new(r, s, p).unwrap()
}

fn comp(r: u64, s: u64, p: u64) -> Vec<u64> {
    jordan_composition(&q(r, s, p)).entries().to_vec()
}

fn report(name: &str, detail: String, started: Instant) {
    println!("acceptance {name}: PASS ({detail}, {:.2?})", started.elapsed());
}

#[test]
fn c1_piecewise_table_regression() {
    let started = Instant::now();
    let mut cases = 0u32;
    for i in 1..=5u64 {
        for j in 1..=49u64 {
            let want: Vec<u64> = match j {
                1 => vec![1, 1, 47, 1],
                48 => vec![1, 47, 1, 1],
                49 => vec![1, 48, 1],
                _ => vec![1, j - 1, 1, 48 - j, 1],
            };
            assert_eq!(comp(50, 49 * i + j, 7), want, "i={i} j={j}");
            cases += 1;
        }
    }
    assert_eq!(cases, 245);
    report("C1 piecewise-table-regression", format!("{cases} cases"), started);
}

#[test]
fn c2_subperiod_boundary_inequality() {
    let started = Instant::now();
    let at_246 = comp(50, 246, 7);
    let at_295 = comp(50, 295, 7);
    assert_eq!(at_246, vec![1, 1, 47, 1]);
    assert_eq!(at_295, vec![2, 47, 1]);
    assert_ne!(at_246, at_295);
    report("C2 boundary-inequality", "2 values + inequality".into(), started);
}

#[test]
fn c3_oracle_equivalence() {
    let started = Instant::now();
    let mut cases = 0u64;
    for p in [2u64, 3, 5, 7] {
        for r in 1..=32u64 {
            for s in r..=(1024 / r) {
                let query = q(r, s, p);
                let recursion = jordan_partition(&query).parts();
                let oracle = oracle_jordan_partition(&query).unwrap();
                assert_eq!(
                    recursion,
                    oracle.parts(),
                    "partition mismatch at r={r} s={s} p={p}"
                );
                cases += 1;
            }
        }
    }
    report("C3 oracle-equivalence", format!("{cases} cases, r*s <= 1024"), started);
}

#[test]
fn c4_least_period() {
    let started = Instant::now();
    let mut cases = 0u32;
    for p in [2u64, 3, 5] {
        for r in 2..=27u64 {
            let mut pn = 1u64;
            while pn < r {
                pn *= p;
            }
            assert_eq!(least_period(r, p), pn, "r={r} p={p}");
            cases += 1;
        }
    }
    assert_eq!(least_period(50, 7), 343);
    cases += 1;
    report("C4 least-period", format!("{cases} (r, p) pairs"), started);
}

#[test]
fn c5_period_and_reflection() {
    let started = Instant::now();
    let opts = VerifierOptions::default();
    let mut cases = 0u32;
    for p in [2u64, 3, 5] {
        for r in 1..=25u64 {
            assert!(verify_gpx_periodicity(r, p, opts).passed(), "gpx1 r={r} p={p}");
            assert!(verify_gpx_reflection(r, p, opts).passed(), "gpx2 r={r} p={p}");
            cases += 2;
        }
    }
    assert!(verify_gpx_periodicity(50, 7, opts).passed());
    assert!(verify_gpx_reflection(50, 7, opts).passed());
    cases += 2;
    report("C5 period-and-reflection", format!("{cases} reports"), started);
}

#[test]
fn c6_subperiod_and_subreflection() {
    let started = Instant::now();
    let opts = VerifierOptions::default();
    let mut cases = 0u32;
    for (p, lo, hi) in [(5u64, 6u64, 10u64), (7, 8, 21)] {
        for r in lo..=hi {
            let sub = verify_subperiod(r, p, opts);
            assert!(sub.passed(), "t2 r={r} p={p}: {:?}", sub.status);
            let refl = verify_subreflection(r, p, opts);
            assert!(refl.passed(), "t3 r={r} p={p}: {:?}", refl.status);
            cases += 2;
        }
    }
    report("C6 subperiod-and-subreflection", format!("{cases} reports"), started);
}

#[test]
fn c7_observations() {
    let started = Instant::now();
    let opts = VerifierOptions::default();
    let mut cases = 0u32;
    for (p, lo, hi) in [(5u64, 6u64, 10u64), (7, 8, 21)] {
        for r in lo..=hi {
            let outer = verify_outer_reflection(r, p, opts);
            assert!(outer.passed(), "obs1 r={r} p={p}: {:?}", outer.status);
            let early = verify_early_subperiod(r, p, opts);
            assert!(early.passed(), "obs2 r={r} p={p}: {:?}", early.status);
            cases += 2;
        }
    }
    report("C7 observations", format!("{cases} reports"), started);
}

#[test]
fn c8_composition_length_claims() {
    let started = Instant::now();
    assert_eq!(max_composition_length(50, 7), 5);
    let at_55 = max_composition_length(55, 7);
    assert!(at_55 >= 11, "got {at_55}");
    report("C8 composition-length", format!("max(50,7)=5, max(55,7)={at_55}"), started);
}

#[test]
fn c9_random_property_suite() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x4a6f7264616e);
    let primes = [2u64, 3, 5, 7, 11];
    let mut ladder_hits = 0u32;
    for i in 0..1000u32 {
        let p = primes[rng.gen_range(0..primes.len())];
        // Mostly full-range s; a slice of small s so the characteristic-zero
        // ladder clause is exercised.
        let s = if i % 10 == 0 { rng.gen_range(1..=5u64) } else { rng.gen_range(1..=10_000u64) };
        let r = rng.gen_range(1..=s);
        let query = q(r, s, p);
        let rlp = jordan_partition(&query);

        assert_eq!(rlp.part_count(), query.r(), "part count at r={r} s={s} p={p}");
        assert_eq!(rlp.weight(), r as u128 * s as u128, "weight at r={r} s={s} p={p}");
        assert!(
            rlp.runs().windows(2).all(|w| w[0].1 > w[1].1),
            "values not strictly decreasing at r={r} s={s} p={p}"
        );
        assert_eq!(
            composition_of(&rlp),
            jordan_composition(&query),
            "multiplicities mismatch at r={r} s={s} p={p}"
        );
        if p >= r + s {
            ladder_hits += 1;
            let want: Vec<u64> = (0..query.r()).map(|t| query.r() + query.s() - 1 - 2 * t).collect();
            assert_eq!(rlp.parts(), want, "ladder at r={r} s={s} p={p}");
            assert_eq!(
                jordan_composition(&query),
                Composition::new(vec![1; query.r() as usize]),
                "ladder composition at r={r} s={s} p={p}"
            );
        }
    }
    report(
        "C9 property-suite",
        format!("1000 random triples, {ladder_hits} ladder cases"),
        started,
    );
}
