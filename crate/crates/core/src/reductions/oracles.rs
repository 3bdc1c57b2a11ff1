//! Theory oracles on the output of a reduction, and the certificates that
//! pair them with the source sets.
//!
//! On an ultimately periodic input the output of each shipped reduction
//! repeats as well, so "infinitely many" can be read off a finite window:
//! a count grows over one full period past the preperiod iff it grows
//! forever. The oracles decode the output bits and count inside such a
//! window; the window is located from the input's preperiod and period.

use std::sync::Arc;

use super::matching::{matching_elements_after, matching_vocabulary, r_matching};
use super::simple::{monadic_vocabulary, pad, r_infcoinf};
use crate::diagrams::{bits_for_size, DiagramPrefix, Presentation};
use crate::formulas::{FiniteStructure, Vocabulary};
use crate::pointclasses::{
    canonical_set, pair, pi2_infones_on, BorelCode, BorelLevel, MatrixPoint, PointclassKind, Sequence, Track, UPPoint,
};
use crate::transducers::{compose, ReductionCertificate, TargetOracle, TransducerError};

fn decode(vocab: &Vocabulary, bits: Vec<bool>) -> Presentation {
    Presentation::from_prefix(&DiagramPrefix::new(vocab, bits))
}

/// Counts of `P` and `¬P` elements in a window of a monadic structure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MonadicCounts {
    pub p: usize,
    pub not_p: usize,
}

pub fn monadic_counts(s: &FiniteStructure, from: usize, to: usize) -> MonadicCounts {
    let p = (from..to).filter(|&e| s.holds(0, &[e])).count();
    MonadicCounts { p, not_p: to - from - p }
}

/// "`P` is infinite and coinfinite" on an output whose bit `i` is stretched
/// from input bit `i / stretch` (1 for the plain reduction, 2 after
/// padding).
pub struct InfCoinfOracle {
    pub stretch: usize,
}

impl TargetOracle for InfCoinfOracle {
    fn describe(&self) -> String {
        "P infinite and coinfinite".into()
    }

    fn verdict(
        &self,
        p: &UPPoint,
        output: &mut dyn FnMut(usize) -> Result<Vec<bool>, TransducerError>,
    ) -> Result<bool, TransducerError> {
        let from = self.stretch * p.prefix().len();
        let to = from + self.stretch * p.period().len();
        let pres = decode(&monadic_vocabulary(), output(bits_for_size(&monadic_vocabulary(), to))?);
        let c = monadic_counts(&pres.structure(to), from, to);
        Ok(c.p > 0 && c.not_p > 0)
    }
}

/// Partner counts in a structure over `{R/2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingShape {
    /// Whether `R` is irreflexive, symmetric, and every element has at most
    /// one partner.
    pub is_matching: bool,
    pub partners: Vec<usize>,
}

pub fn matching_shape(s: &FiniteStructure) -> MatchingShape {
    let n = s.size();
    let mut ok = true;
    let mut partners = vec![0; n];
    for (a, count) in partners.iter_mut().enumerate() {
        ok &= !s.holds(0, &[a, a]);
        for b in 0..n {
            if s.holds(0, &[a, b]) {
                *count += 1;
                ok &= s.holds(0, &[b, a]);
            }
        }
        ok &= *count <= 1;
    }
    MatchingShape { is_matching: ok, partners }
}

/// The matching theory: a matching with infinitely many matched and
/// infinitely many unmatched elements, judged on the output of the matching
/// reduction.
///
/// With `J'` the first antidiagonal inside the periodic part of the input
/// and `P` its period, columns from `J'` on repeat with period `2P`, and
/// every first 1 of a column below `J' + 2P` is read before stage
/// `⟨J'+2P, J'+2P⟩ + 1`. The oracle decodes the output up to that stage
/// and compares counts over the elements of stages `[J', J'+2P)`.
pub struct MatchingOracle;

impl MatchingOracle {
    /// Element counts after stages `J'`, `J'+2P` and the decoding horizon.
    pub fn window(p: &UPPoint) -> (usize, usize, usize) {
        let j = MatrixPoint(p.clone()).periodic_diagonal();
        let x = j + 2 * p.period().len();
        let horizon = pair(x, x) + 1;
        (matching_elements_after(p, j), matching_elements_after(p, x), matching_elements_after(p, horizon))
    }
}

impl TargetOracle for MatchingOracle {
    fn describe(&self) -> String {
        "matching with infinitely many matched and unmatched elements".into()
    }

    fn verdict(
        &self,
        p: &UPPoint,
        output: &mut dyn FnMut(usize) -> Result<Vec<bool>, TransducerError>,
    ) -> Result<bool, TransducerError> {
        let vocab = matching_vocabulary();
        let (from, to, horizon) = Self::window(p);
        let pres = decode(&vocab, output(bits_for_size(&vocab, horizon))?);
        let shape = matching_shape(&pres.structure(horizon));
        let unmatched = shape.partners[from..to].iter().filter(|&&k| k == 0).count();
        let matched = (to - from) - unmatched;
        Ok(shape.is_matching && unmatched > 0 && matched > 0)
    }
}

/// Points with infinitely many zeros.
pub fn pi2_infzeros() -> BorelCode {
    BorelCode::intersect(
        Sequence::infinite(|m| {
            BorelCode::union(
                Sequence::infinite(move |n| BorelCode::bit(m + n, false)).with_scan_limit(|l| l + 1),
                BorelLevel::sigma(1),
            )
        })
        .with_scan_limit(|l| l + 1),
        BorelLevel::pi(2),
    )
    .with_rule(|p| p.period_has(false))
    .named("Pi2_infzeros")
}

pub fn infcoinf_certificate() -> ReductionCertificate {
    ReductionCertificate {
        transducer: r_infcoinf(),
        source: BorelCode::all_of(vec![pi2_infones_on(Track::Whole), pi2_infzeros()]).named("infinitely many of each"),
        target: Arc::new(InfCoinfOracle { stretch: 1 }),
    }
}

pub fn pad_infcoinf_certificate() -> ReductionCertificate {
    ReductionCertificate {
        transducer: compose(pad(), r_infcoinf()).expect("pad writes raw bits"),
        source: canonical_set(&PointclassKind::Pi2InfOnes),
        target: Arc::new(InfCoinfOracle { stretch: 2 }),
    }
}

pub fn matching_certificate() -> ReductionCertificate {
    ReductionCertificate {
        transducer: r_matching(),
        source: canonical_set(&PointclassKind::Pi3InfEmptyCols),
        target: Arc::new(MatchingOracle),
    }
}
