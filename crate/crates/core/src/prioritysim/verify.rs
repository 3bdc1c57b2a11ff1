use std::fmt;

use super::corelemma::{CoreLevel, CorePair};
use super::tower::K0;
use super::trace::{EventKind, InjuryTrace};
use super::{Demo, Run};
use crate::diagrams::Presentation;
use crate::pointclasses::{member_up, Track, UPPoint};
use crate::theories::{CanonicalModel, Card, MatchingModel, MonadicModel};

/// Cardinality classes of a structure over `P` and/or `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Limit {
    /// `(|P|, |¬P|)`.
    pub monadic: Option<(Card, Card)>,
    /// `(matched pairs, unmatched elements)`.
    pub matching: Option<(Card, Card)>,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some((a, b)) = self.monadic {
            parts.push(MonadicModel::new(a, b).map_or_else(|_| format!("monadic P={a} notP={b}"), |m| m.label()));
        }
        if let Some((a, b)) = self.matching {
            parts.push(
                MatchingModel::new(a, b).map_or_else(|_| format!("matching pairs={a} unmatched={b}"), |m| m.label()),
            );
        }
        f.write_str(&parts.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A committed bit differs from the final diagram.
    Retracted {
        position: usize,
    },
    /// Commits do not tile the diagram.
    CommitGap {
        stage: usize,
        expected: usize,
        found: usize,
    },
    TooManySwitches {
        count: usize,
        bound: usize,
    },
    TooManyInjuries {
        count: usize,
        bound: usize,
    },
    LimitMismatch {
        predicted: Limit,
        observed: Limit,
    },
    Unstable {
        detail: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Retracted { position } => write!(f, "committed bit {position} was changed"),
            Violation::CommitGap { stage, expected, found } => {
                write!(f, "stage {stage} commits from {found}, expected {expected}")
            }
            Violation::TooManySwitches { count, bound } => {
                write!(f, "{count} switches, bound {bound}")
            }
            Violation::TooManyInjuries { count, bound } => {
                write!(f, "{count} injuries, bound {bound}")
            }
            Violation::LimitMismatch { predicted, observed } => {
                write!(f, "predicted limit [{predicted}], observed [{observed}]")
            }
            Violation::Unstable { detail } => write!(f, "estimates: {detail}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub predicted: Limit,
    pub observed: Limit,
    /// Whether the run was long enough to certify the limit and the
    /// estimate behaviour; checks (c) and (d) are skipped otherwise.
    pub certified: bool,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Stages after which a UP point's finite behaviour is over, with margin.
pub fn window(p: &UPPoint) -> usize {
    p.prefix().len() + p.period().len() + 2
}

fn first_one(p: &UPPoint) -> Option<usize> {
    (0..p.prefix().len() + p.period().len()).find(|&i| p.bit(i))
}

/// The limit the construction must reach, read off the point's period.
pub fn predict(demo: Demo, p: &UPPoint) -> Limit {
    match demo {
        Demo::Core1 => {
            let pair = CorePair::shipped(CoreLevel::One);
            let inside = member_up(&pair.source, p).expect("decidable");
            Limit { monadic: Some((Card::Inf, if inside { Card::Inf } else { Card::Fin(0) })), matching: None }
        }
        Demo::Core2 => {
            let pair = CorePair::shipped(CoreLevel::Two);
            let inside = member_up(&pair.source, p).expect("decidable");
            Limit { monadic: None, matching: Some((Card::Inf, if inside { Card::Inf } else { Card::Fin(0) })) }
        }
        Demo::Tower2 => {
            let not_p = match first_one(&Track::Even.view(p)) {
                Some(t) => Card::Fin(2 * t.div_ceil(2)),
                None => Card::Inf,
            };
            let unmatched = if Track::Odd.view(p).period_has(true) { Card::Fin(0) } else { Card::Inf };
            Limit { monadic: Some((Card::Inf, not_p)), matching: Some((Card::Inf, unmatched)) }
        }
    }
}

/// The predicted `k₀` for the tower demo.
pub fn predict_k0(p: &UPPoint) -> K0 {
    if Track::Even.view(p).has_anywhere(true) {
        K0::FailsP1
    } else if Track::Odd.view(p).period_has(true) {
        K0::NoFailure
    } else {
        K0::FailsP2
    }
}

#[derive(Clone, Copy, Default)]
struct Counts {
    p: usize,
    not_p: usize,
    matched: usize,
    unmatched: usize,
}

// Properties of the elements created by stage `old`, judged in the
// structure after stage `now`.
fn counts(pres: &Presentation, old: usize, now: usize) -> Counts {
    let vocab = pres.vocabulary();
    let (p_sym, r_sym) = (vocab.index_of("P"), vocab.index_of("R"));
    let n = pres.elements_after(now);
    let aged = pres.elements_after(old);
    let mut in_p = vec![false; n];
    let mut partnered = vec![false; n];
    for (sym, t) in pres.facts_below(n) {
        if Some(sym) == p_sym {
            in_p[t[0] as usize] = true;
        } else if Some(sym) == r_sym {
            partnered[t[0] as usize] = true;
        }
    }
    let mut c = Counts::default();
    for e in 0..aged {
        if in_p[e] {
            c.p += 1;
        } else {
            c.not_p += 1;
        }
        if partnered[e] {
            c.matched += 1;
        } else {
            c.unmatched += 1;
        }
    }
    c
}

/// Classifies each count as finite (its value) or infinite (still growing
/// between the middle and the end of the run), counting only elements at
/// least `lag` stages old.
pub fn observe(pres: &Presentation, lag: usize) -> Limit {
    let end = pres.stages();
    let mid = end / 2;
    let early = counts(pres, mid.saturating_sub(lag), mid);
    let late = counts(pres, end.saturating_sub(lag), end);
    let class = |a: usize, b: usize| if b > a { Card::Inf } else { Card::Fin(b) };
    let vocab = pres.vocabulary();
    let monadic = vocab.index_of("P").map(|_| (class(early.p, late.p), class(early.not_p, late.not_p)));
    let matching = vocab
        .index_of("R")
        .map(|_| (class(early.matched / 2, late.matched / 2), class(early.unmatched, late.unmatched)));
    Limit { monadic, matching }
}

fn check_commits(trace: &InjuryTrace, pres: &Presentation, out: &mut Vec<Violation>) {
    let diagram = pres.diagram(pres.settled());
    let bits = diagram.bits();
    let mut offset = 0;
    for e in &trace.events {
        if let EventKind::Commit { start, bits: committed } = &e.kind {
            if *start != offset {
                out.push(Violation::CommitGap { stage: e.stage, expected: offset, found: *start });
            }
            for (i, &b) in committed.iter().enumerate() {
                if bits.get(start + i) != Some(&b) {
                    out.push(Violation::Retracted { position: start + i });
                }
            }
            offset = start + committed.len();
        }
    }
    if offset != bits.len() {
        out.push(Violation::CommitGap { stage: pres.stages(), expected: bits.len(), found: offset });
    }
}

fn ones_read(p: &UPPoint, track: Track, stages: usize) -> usize {
    (0..stages).filter(|&s| p.bit(track.position(s))).count()
}

// Every run of `width` consecutive stages from `from` on shows `value`.
fn recurs(est: &[&str], from: usize, width: usize, value: &str) -> bool {
    let width = width.max(1);
    (from..est.len().saturating_sub(width)).all(|s| est[s..s + width].contains(&value))
}

fn check_estimates(demo: Demo, p: &UPPoint, est: &[&str], out: &mut Vec<Violation>) {
    let settle = p.prefix().len() + p.period().len();
    let mut fail = |detail: String| out.push(Violation::Unstable { detail });
    match demo {
        Demo::Core1 => {
            let pair = CorePair::shipped(CoreLevel::One);
            let changes = est.windows(2).filter(|w| w[0] != w[1]).count();
            if changes > 1 {
                fail(format!("{changes} changes at level 1"));
            }
            let want = if member_up(&pair.source, p).expect("decidable") { &pair.plus.id } else { &pair.minus.id };
            if est.last().is_some_and(|&e| e != want) {
                fail(format!("final estimate is not {want}"));
            }
        }
        Demo::Core2 => {
            let pair = CorePair::shipped(CoreLevel::Two);
            if member_up(&pair.source, p).expect("decidable") {
                if est.iter().skip(settle).any(|&e| e != pair.plus.id) {
                    fail(format!("not constant {} after stage {settle}", pair.plus.id));
                }
            } else if !recurs(est, settle, p.period().len(), &pair.minus.id) {
                fail(format!("{} does not recur with the period", pair.minus.id));
            }
        }
        Demo::Tower2 => {
            let k0 = predict_k0(p);
            let (one, two, three) = (K0::FailsP1.to_string(), K0::FailsP2.to_string(), K0::NoFailure.to_string());
            let even_settle = {
                let even = Track::Even.view(p);
                even.prefix().len() + even.period().len()
            };
            let odd = Track::Odd.view(p);
            let odd_settle = odd.prefix().len() + odd.period().len();
            match k0 {
                K0::FailsP1 => {
                    if est.iter().skip(even_settle).any(|&e| e != one) {
                        fail(format!("k0 not stable at 1 from stage {even_settle}"));
                    }
                }
                K0::FailsP2 => {
                    if est.iter().skip(odd_settle).any(|&e| e != two) {
                        fail(format!("k0 not stable at 2 from stage {odd_settle}"));
                    }
                }
                K0::NoFailure => {
                    if est.iter().any(|&e| e == one) {
                        fail("k0 estimate 1 on a point in P1".into());
                    }
                    if !recurs(est, odd_settle, odd.period().len(), &three) {
                        fail("k0 estimate 3 does not recur with the odd period".into());
                    }
                    let _ = two;
                }
            }
        }
    }
}

/// Checks a run: (a) commits are never retracted, (b) switch and injury
/// counts respect their bounds, (c) the observed cardinality classes match
/// the prediction from the point's period, (d) estimates settle as they
/// should.
pub fn verify_run(demo: Demo, trace: &InjuryTrace, pres: &Presentation, p: &UPPoint) -> VerifyReport {
    let mut violations = Vec::new();
    check_commits(trace, pres, &mut violations);

    let stages = pres.stages();
    let switches = trace.count("switch");
    let injuries = trace.count("injury-repair");
    let (switch_bound, injury_bound) = match demo {
        Demo::Core1 => (Some(1), Some(0)),
        Demo::Core2 => (None, Some(ones_read(p, Track::Whole, stages))),
        Demo::Tower2 => (Some(1), Some(ones_read(p, Track::Odd, stages))),
    };
    if let Some(bound) = switch_bound.filter(|&b| switches > b) {
        violations.push(Violation::TooManySwitches { count: switches, bound });
    }
    if let Some(bound) = injury_bound.filter(|&b| injuries > b) {
        violations.push(Violation::TooManyInjuries { count: injuries, bound });
    }

    let lag = window(p);
    let certified = stages >= 4 * lag;
    let predicted = predict(demo, p);
    let observed = observe(pres, lag);
    if certified {
        if predicted != observed {
            violations.push(Violation::LimitMismatch { predicted, observed });
        }
        check_estimates(demo, p, &trace.estimates(), &mut violations);
    }
    VerifyReport { predicted, observed, certified, violations }
}

impl Run {
    pub fn verify(&self) -> VerifyReport {
        verify_run(self.demo, &self.trace, &self.presentation, &self.point)
    }
}
