use modborel::pointclasses::{member_up, split_point_family, wide_battery, UPPoint};
use modborel::prioritysim::{
    approximate_index, k0_estimate, run_corelemma, run_tower, verify_run, CoreLevel, CorePair, Demo, EventKind, Limit,
    SimConfig, SimError, Violation, K0,
};
use modborel::theories::{Card, TheoryHandle};
use rayon::prelude::*;

fn pt(s: &str) -> UPPoint {
    s.parse().unwrap()
}

fn switches(run: &modborel::prioritysim::Run) -> Vec<usize> {
    run.trace.events.iter().filter(|e| e.kind.name() == "switch").map(|e| e.stage).collect()
}

// Direct count of `P` and `¬P` among the first `n` elements.
fn monadic_counts(run: &modborel::prioritysim::Run, n: usize) -> (usize, usize) {
    let s = run.presentation.structure(n);
    let p = s.vocabulary().index_of("P").unwrap();
    let inside = (0..n).filter(|&e| s.holds(p, &[e])).count();
    (inside, n - inside)
}

#[test]
fn level_one_without_a_witness_builds_all_p() {
    let pair = CorePair::shipped(CoreLevel::One);
    let run = run_corelemma(pair, &pt("0;0"), 100).unwrap();
    assert!(switches(&run).is_empty());
    let n = run.presentation.settled();
    assert_eq!(monadic_counts(&run, n), (n, 0));
    let report = run.verify();
    assert!(report.certified);
    assert!(report.is_clean(), "{:?}", report.violations);
    assert_eq!(report.observed.monadic, Some((Card::Inf, Card::Fin(0))));
}

#[test]
fn level_one_switches_when_the_witness_appears() {
    let pair = CorePair::shipped(CoreLevel::One);
    let run = run_corelemma(pair, &pt("001;0"), 100).unwrap();
    assert_eq!(switches(&run), vec![2]);
    // one element per stage: P, P, then ¬P, P, ¬P, ...
    let s = run.presentation.structure(8);
    let p = s.vocabulary().index_of("P").unwrap();
    let got: Vec<bool> = (0..8).map(|e| s.holds(p, &[e])).collect();
    assert_eq!(got, [true, true, false, true, false, true, false, true]);
    let report = run.verify();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert_eq!(report.observed.monadic, Some((Card::Inf, Card::Inf)));
}

#[test]
fn level_two_eventually_zero_leaves_candidates_unmatched() {
    let pair = CorePair::shipped(CoreLevel::Two);
    let run = run_corelemma(pair, &pt("101;0"), 100).unwrap();
    assert_eq!(run.trace.count("injury-repair"), 2);
    let report = run.verify();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert_eq!(report.observed.matching, Some((Card::Inf, Card::Inf)));
    // after the last repair, each stage leaves exactly one more candidate
    let unmatched = |s: usize| {
        let n = run.presentation.elements_after(s);
        let st = run.presentation.structure(n);
        (0..n).filter(|&a| (0..n).all(|b| !st.holds(0, &[a, b]))).count()
    };
    for s in 3..20 {
        assert_eq!(unmatched(s + 1), unmatched(s) + 1, "stage {s}");
    }
}

#[test]
fn level_two_all_ones_repairs_every_candidate() {
    let pair = CorePair::shipped(CoreLevel::Two);
    let run = run_corelemma(pair, &pt(";1"), 100).unwrap();
    assert_eq!(run.trace.count("injury-repair"), 100);
    for e in &run.trace.events {
        if let EventKind::InjuryRepair { repaired } = &e.kind {
            assert!(!repaired.is_empty());
        }
    }
    let report = run.verify();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert_eq!(report.observed.matching, Some((Card::Inf, Card::Fin(0))));
    // every element is matched at the end of every stage
    for s in 1..30 {
        let n = run.presentation.elements_after(s);
        let st = run.presentation.structure(n);
        assert!((0..n).all(|a| (0..n).any(|b| st.holds(0, &[a, b]))));
    }
}

#[test]
fn zero_budget_is_rejected() {
    let pair = CorePair::shipped(CoreLevel::One);
    assert_eq!(run_corelemma(pair, &pt("0;0"), 0).unwrap_err(), SimError::ZeroBudget);
    assert_eq!(run_tower(&SimConfig::tower2(0), &pt("0;0")).unwrap_err(), SimError::ZeroBudget);
}

#[test]
fn incompatible_pairs_are_rejected() {
    let swapped = CorePair::new(CoreLevel::One, TheoryHandle::inf_coinf(), TheoryHandle::all_p());
    assert!(matches!(swapped, Err(SimError::Incompatible(_))));
    let wrong = CorePair::new(CoreLevel::Two, TheoryHandle::all_p(), TheoryHandle::inf_coinf());
    assert!(matches!(wrong, Err(SimError::Incompatible(_))));
}

#[test]
fn malformed_tower_config_is_rejected() {
    let mut cfg = SimConfig::tower2(10);
    cfg.levels = 3;
    assert!(matches!(run_tower(&cfg, &pt("0;0")), Err(SimError::MalformedConfig(_))));
    assert!("core3".parse::<Demo>().is_err());
    assert_eq!("tower2".parse::<Demo>().unwrap(), Demo::Tower2);
}

#[test]
fn approximate_index_examples() {
    let one = CorePair::shipped(CoreLevel::One);
    let p = pt("001;0");
    for s in 0..2 {
        assert_eq!(approximate_index(one, &p, 1, s), one.minus.id);
    }
    for s in 2..20 {
        assert_eq!(approximate_index(one, &p, 1, s), one.plus.id);
    }
    for s in 0..20 {
        assert_eq!(approximate_index(one, &pt("0;0"), 1, s), one.minus.id);
    }
    // below the level both theories share the fragment
    assert_eq!(approximate_index(one, &p, 0, 0), approximate_index(one, &pt("0;0"), 0, 7));

    let two = CorePair::shipped(CoreLevel::Two);
    // on all ones every stage reads fresh evidence against membership
    for s in 0..20 {
        assert_eq!(approximate_index(two, &pt(";1"), 2, s), two.minus.id);
    }
    let p = pt("101;0");
    let got: Vec<bool> = (0..6).map(|s| approximate_index(two, &p, 2, s) == two.plus.id).collect();
    assert_eq!(got, [false, true, false, true, true, true]);
    // above the level the answer is exact
    assert_eq!(approximate_index(two, &p, 3, 0), two.plus.id);
    assert_eq!(approximate_index(two, &pt(";10"), 3, 0), two.minus.id);
}

// k₀ from the family itself: the least level the point falls out of.
fn k0_oracle(p: &UPPoint) -> K0 {
    let fam = split_point_family();
    if !member_up(&fam.level(1), p).unwrap() {
        K0::FailsP1
    } else if !member_up(&fam.level(2), p).unwrap() {
        K0::FailsP2
    } else {
        K0::NoFailure
    }
}

#[test]
fn tower_examples() {
    // even track all zero, odd track all ones
    let p = pt(";01");
    let run = run_tower(&SimConfig::tower2(100), &p).unwrap();
    assert!(run.trace.estimates().iter().all(|&e| e == K0::NoFailure.to_string()));
    let report = run.verify();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert_eq!(
        report.observed,
        Limit { monadic: Some((Card::Inf, Card::Inf)), matching: Some((Card::Inf, Card::Fin(0))) }
    );

    // a 1 at the first even position
    let p = pt("1;0");
    let run = run_tower(&SimConfig::tower2(100), &p).unwrap();
    assert!(run.trace.estimates().iter().all(|&e| e == K0::FailsP1.to_string()));
    assert_eq!(switches(&run), vec![0]);
    let report = run.verify();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert_eq!(report.observed.monadic, Some((Card::Inf, Card::Fin(0))));

    // all zero: in P1, out of P2
    let p = pt("0;0");
    assert_eq!(k0_oracle(&p), K0::FailsP2);
    let run = run_tower(&SimConfig::tower2(100), &p).unwrap();
    assert!(run.trace.estimates().iter().all(|&e| e == K0::FailsP2.to_string()));
    assert!(run.verify().is_clean());
}

#[test]
fn tower_keeps_earlier_negative_pairs() {
    // even-track 1 at stage 3: stages 0 and 2 built ¬P pairs
    let p = UPPoint::interleave(&[pt("0001;0"), pt("0;0")]);
    let run = run_tower(&SimConfig::tower2(120), &p).unwrap();
    let report = run.verify();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert_eq!(report.observed.monadic, Some((Card::Inf, Card::Fin(4))));
    assert_eq!(switches(&run), vec![3]);
}

#[test]
fn committed_bits_are_final_in_every_run() {
    for p in ["0;0", "001;0", "101;0", ";1", ";01", "11;10"] {
        for demo in [Demo::Core1, Demo::Core2, Demo::Tower2] {
            let run = demo.run(&pt(p), 40).unwrap();
            let bits = run.diagram().into_bits();
            let mut seen = 0;
            for e in &run.trace.events {
                if let EventKind::Commit { start, bits: b } = &e.kind {
                    assert_eq!(*start, seen);
                    assert_eq!(&bits[*start..start + b.len()], b.as_slice());
                    seen += b.len();
                }
            }
            assert_eq!(seen, bits.len());
        }
    }
}

#[test]
fn retracted_bit_fixture_is_caught() {
    let run = Demo::Core1.run(&pt("001;0"), 60).unwrap();
    let mut trace = run.trace.clone();
    let commit = trace
        .events
        .iter_mut()
        .find_map(|e| match &mut e.kind {
            EventKind::Commit { bits, .. } if !bits.is_empty() => Some(bits),
            _ => None,
        })
        .unwrap();
    commit[0] = !commit[0];
    let report = verify_run(Demo::Core1, &trace, &run.presentation, &run.point);
    assert!(report.violations.contains(&Violation::Retracted { position: 0 }), "{:?}", report.violations);
}

#[test]
fn two_switches_at_level_one_is_caught() {
    let run = Demo::Core1.run(&pt("001;0"), 60).unwrap();
    let mut trace = run.trace.clone();
    trace.push(9, EventKind::Switch { from: "x".into(), to: "y".into() });
    let report = verify_run(Demo::Core1, &trace, &run.presentation, &run.point);
    assert!(report.violations.contains(&Violation::TooManySwitches { count: 2, bound: 1 }));
}

#[test]
fn extra_injuries_are_caught() {
    let run = Demo::Core2.run(&pt("101;0"), 60).unwrap();
    let mut trace = run.trace.clone();
    trace.push(40, EventKind::InjuryRepair { repaired: vec![1] });
    let report = verify_run(Demo::Core2, &trace, &run.presentation, &run.point);
    assert!(report.violations.contains(&Violation::TooManyInjuries { count: 3, bound: 2 }));
}

#[test]
fn short_runs_are_not_certified() {
    let run = Demo::Core2.run(&pt("0000000000;01"), 10).unwrap();
    let report = run.verify();
    assert!(!report.certified);
    assert!(report.is_clean());
}

#[test]
fn runs_are_deterministic() {
    for p in ["0;0", "0110;101", ";1"] {
        for demo in [Demo::Core1, Demo::Core2, Demo::Tower2] {
            let a = demo.run(&pt(p), 50).unwrap();
            let b = demo.run(&pt(p), 50).unwrap();
            assert_eq!(a.diagram().bits(), b.diagram().bits());
            assert_eq!(a.trace, b.trace);
        }
    }
}

#[test]
fn battery_limits_match_membership() {
    let points = wide_battery(200, 0x5eed);
    assert!(points.len() >= 200);
    let bad: Vec<String> = points
        .par_iter()
        .flat_map_iter(|p| {
            [(Demo::Core1, CoreLevel::One), (Demo::Core2, CoreLevel::Two)].into_iter().filter_map(move |(demo, lvl)| {
                let pair = CorePair::shipped(lvl);
                let run = demo.run(p, 120).unwrap();
                let report = run.verify();
                let inside = member_up(&pair.source, p).unwrap();
                let want = if inside { Card::Inf } else { Card::Fin(0) };
                let got = match lvl {
                    CoreLevel::One => report.observed.monadic.map(|m| m.1),
                    CoreLevel::Two => report.observed.matching.map(|m| m.1),
                };
                (!report.certified || !report.is_clean() || got != Some(want))
                    .then(|| format!("{demo} {p}: {:?} {got:?}", report.violations))
            })
        })
        .collect();
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn tower_battery_matches_the_family() {
    let points = wide_battery(200, 0x7043);
    let bad: Vec<String> = points
        .par_iter()
        .filter_map(|p| {
            let run = Demo::Tower2.run(p, 120).unwrap();
            let report = run.verify();
            let est = run.trace.estimates();
            let want = k0_oracle(p).to_string();
            // k₀ is the largest estimate seen infinitely often
            let tail = &est[est.len() - 12..];
            let last_max = tail.iter().max_by_key(|e| e.chars().nth(3)).unwrap();
            (!report.is_clean() || **last_max != want).then(|| format!("{p}: {:?} {last_max}", report.violations))
        })
        .collect();
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn k0_estimate_reads_tracks() {
    let p = UPPoint::interleave(&[pt("0;0"), pt(";10")]);
    let got: Vec<K0> = (0..4).map(|s| k0_estimate(&p, s)).collect();
    assert_eq!(got, [K0::NoFailure, K0::FailsP2, K0::NoFailure, K0::FailsP2]);
}
