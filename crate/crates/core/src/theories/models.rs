//! Canonical models standing in for complete theories.
//!
//! Every theory handled here is the theory of one countable structure from a
//! decidable family: monadic structures and matchings (determined by a pair
//! of cardinalities) and a few linear orders with successor. Sentences are
//! decided exactly.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::order::OrderShape;
use super::TheoryError;
use crate::formulas::{Compiled, FiniteStructure, Formula, Vocabulary};

/// A cardinality in `{0, 1, …} ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Card {
    Fin(usize),
    Inf,
}

impl Card {
    /// The count that a sentence with `q` quantifiers cannot tell apart from
    /// `self`: counts at or above `q` all look alike.
    pub fn capped(self, q: usize) -> usize {
        match self {
            Card::Fin(k) => k.min(q),
            Card::Inf => q,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Card::Inf
    }

    /// `0, …, q-1, ∞`: one representative per class told apart by
    /// sentences with at most `q` quantifiers.
    pub fn classes(q: usize) -> Vec<Card> {
        (0..q).map(Card::Fin).chain([Card::Inf]).collect()
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Fin(k) => write!(f, "{k}"),
            Card::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for Card {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "∞" | "infinite" => Ok(Card::Inf),
            _ => s.parse().map(Card::Fin).map_err(|_| TheoryError::Config(format!("bad cardinality `{s}`"))),
        }
    }
}

/// A countable structure whose complete theory can be decided.
pub trait CanonicalModel: Send + Sync + fmt::Debug {
    fn label(&self) -> String;
    fn vocabulary(&self) -> &Vocabulary;
    /// Truth of a sentence over [`vocabulary`](Self::vocabulary).
    fn holds(&self, f: &Formula) -> Result<bool, TheoryError>;
    /// Whether a finite structure embeds into the model, when the model
    /// knows how to answer without a search.
    fn embeds(&self, _s: &FiniteStructure) -> Option<bool> {
        None
    }
}

impl Card {
    fn fits(self, need: usize) -> bool {
        match self {
            Card::Fin(k) => need <= k,
            Card::Inf => true,
        }
    }
}

fn compiled(f: &Formula, vocab: &Vocabulary) -> Result<Compiled, TheoryError> {
    if !f.is_sentence() {
        return Err(TheoryError::NotSentence(f.to_string()));
    }
    Ok(Compiled::new(f, vocab)?)
}

fn universe_check(a: Card, b: Card, what: &str) -> Result<(), TheoryError> {
    if a.is_infinite() || b.is_infinite() {
        Ok(())
    } else {
        Err(TheoryError::Config(format!("{what}: the universe must be infinite")))
    }
}

/// `P` holds on `p` elements and fails on `not_p` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadicModel {
    pub p: Card,
    pub not_p: Card,
    vocab: Vocabulary,
}

impl MonadicModel {
    pub fn new(p: Card, not_p: Card) -> Result<Self, TheoryError> {
        universe_check(p, not_p, "monadic")?;
        Ok(MonadicModel { p, not_p, vocab: Vocabulary::parse("P/1").expect("valid vocabulary") })
    }

    /// The finite structure equivalent to this one for sentences with at
    /// most `q` quantifiers.
    pub fn representative(&self, q: usize) -> FiniteStructure {
        let (a, b) = (self.p.capped(q), self.not_p.capped(q));
        let mut s = FiniteStructure::empty(&self.vocab, (a + b).max(1)).expect("nonempty");
        for e in 0..a {
            s.set(0, &[e], true);
        }
        s
    }
}

impl CanonicalModel for MonadicModel {
    fn label(&self) -> String {
        format!("monadic P={} notP={}", self.p, self.not_p)
    }

    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn holds(&self, f: &Formula) -> Result<bool, TheoryError> {
        let c = compiled(f, &self.vocab)?;
        Ok(c.holds(&self.representative(f.quantifier_count().max(1))))
    }

    fn embeds(&self, s: &FiniteStructure) -> Option<bool> {
        let ps = (0..s.size()).filter(|&e| s.holds(0, &[e])).count();
        Some(self.p.fits(ps) && self.not_p.fits(s.size() - ps))
    }
}

/// A matching (`R` irreflexive, symmetric, at most one partner) with
/// `pairs` matched pairs and `unmatched` isolated elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingModel {
    pub pairs: Card,
    pub unmatched: Card,
    vocab: Vocabulary,
}

impl MatchingModel {
    pub fn new(pairs: Card, unmatched: Card) -> Result<Self, TheoryError> {
        universe_check(pairs, unmatched, "matching")?;
        Ok(MatchingModel { pairs, unmatched, vocab: Vocabulary::parse("R/2").expect("valid vocabulary") })
    }

    pub fn representative(&self, q: usize) -> FiniteStructure {
        let (m, u) = (self.pairs.capped(q), self.unmatched.capped(q));
        let mut s = FiniteStructure::empty(&self.vocab, (2 * m + u).max(1)).expect("nonempty");
        for i in 0..m {
            s.set(0, &[2 * i, 2 * i + 1], true);
            s.set(0, &[2 * i + 1, 2 * i], true);
        }
        s
    }
}

impl CanonicalModel for MatchingModel {
    fn label(&self) -> String {
        format!("matching pairs={} unmatched={}", self.pairs, self.unmatched)
    }

    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn holds(&self, f: &Formula) -> Result<bool, TheoryError> {
        let c = compiled(f, &self.vocab)?;
        Ok(c.holds(&self.representative(f.quantifier_count().max(1))))
    }

    /// Pairs go to pairs; a lone element goes to an unmatched element or to
    /// a matched one whose partner is left out of the image.
    fn embeds(&self, s: &FiniteStructure) -> Option<bool> {
        let n = s.size();
        let mut partners = vec![0usize; n];
        for (a, count) in partners.iter_mut().enumerate() {
            if s.holds(0, &[a, a]) {
                return Some(false);
            }
            for b in 0..n {
                if s.holds(0, &[a, b]) {
                    if !s.holds(0, &[b, a]) {
                        return Some(false);
                    }
                    *count += 1;
                }
            }
        }
        if partners.iter().any(|&k| k > 1) {
            return Some(false);
        }
        let pairs = partners.iter().filter(|&&k| k == 1).count() / 2;
        let lone = n - 2 * pairs;
        let ok = match (self.pairs, self.unmatched) {
            (Card::Inf, _) => true,
            (Card::Fin(m), u) => m >= pairs && u.fits(lone.saturating_sub(2 * (m - pairs))),
        };
        Some(ok)
    }
}

/// A linear order with its successor relation, built from points, copies
/// of `ℚ` and copies of `2·ℚ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderModel {
    pub shape: OrderShape,
    vocab: Vocabulary,
}

impl OrderModel {
    pub fn new(shape: OrderShape) -> Self {
        OrderModel { shape, vocab: crate::reductions::linord_vocabulary() }
    }
}

impl CanonicalModel for OrderModel {
    fn label(&self) -> String {
        format!("linorder {}", self.shape)
    }

    fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn holds(&self, f: &Formula) -> Result<bool, TheoryError> {
        if !f.is_sentence() {
            return Err(TheoryError::NotSentence(f.to_string()));
        }
        f.check(&self.vocab)?;
        Ok(self.shape.holds(f))
    }
}

/// The decidable families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Monadic,
    Matching,
    LinorderS,
}

impl Family {
    pub fn vocabulary(self) -> Vocabulary {
        match self {
            Family::Monadic => Vocabulary::parse("P/1").expect("valid vocabulary"),
            Family::Matching => Vocabulary::parse("R/2").expect("valid vocabulary"),
            Family::LinorderS => crate::reductions::linord_vocabulary(),
        }
    }

    /// Literals per matrix in the default sentence space. Three for `{P/1}`
    /// so that "two distinct `P`-elements" is expressible at rank 2.
    pub fn default_literals(self) -> usize {
        match self {
            Family::Monadic => 3,
            Family::Matching | Family::LinorderS => 2,
        }
    }

    /// One model for each complete theory the family distinguishes with at
    /// most `q` quantifiers (for orders: the shipped shapes).
    pub fn space(self, q: usize) -> ModelSpace {
        let mut models: Vec<Arc<dyn CanonicalModel>> = Vec::new();
        match self {
            Family::Monadic | Family::Matching => {
                for a in Card::classes(q) {
                    for b in Card::classes(q) {
                        if a.is_infinite() || b.is_infinite() {
                            models.push(match self {
                                Family::Monadic => Arc::new(MonadicModel::new(a, b).expect("infinite")),
                                _ => Arc::new(MatchingModel::new(a, b).expect("infinite")),
                            });
                        }
                    }
                }
            }
            Family::LinorderS => {
                for shape in OrderShape::shipped() {
                    models.push(Arc::new(OrderModel::new(shape)));
                }
            }
        }
        ModelSpace { name: self.to_string(), vocab: self.vocabulary(), models }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Monadic => "monadic",
            Family::Matching => "matching",
            Family::LinorderS => "linorder",
        })
    }
}

impl FromStr for Family {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "monadic" => Ok(Family::Monadic),
            "matching" => Ok(Family::Matching),
            "linorder" | "linorderS" => Ok(Family::LinorderS),
            _ => Err(TheoryError::Config(format!("unknown family `{s}`"))),
        }
    }
}

/// A finite list of canonical models that consistency is judged against:
/// a set of sentences is consistent iff some model in the space satisfies
/// all of them.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    pub name: String,
    pub vocab: Vocabulary,
    pub models: Vec<Arc<dyn CanonicalModel>>,
}

impl ModelSpace {
    pub fn labels(&self, mask: u64) -> Vec<String> {
        (0..self.models.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.models[i].label()).collect()
    }

    /// The models satisfying `f`, as a bit mask.
    pub fn mask(&self, f: &Formula) -> Result<u64, TheoryError> {
        assert!(self.models.len() <= 64, "model spaces hold at most 64 models");
        let mut m = 0;
        for (i, model) in self.models.iter().enumerate() {
            if model.holds(f)? {
                m |= 1 << i;
            }
        }
        Ok(m)
    }

    pub fn all(&self) -> u64 {
        if self.models.len() == 64 {
            u64::MAX
        } else {
            (1 << self.models.len()) - 1
        }
    }
}

/// A complete theory: `Th(M)` for a canonical model `M`.
#[derive(Clone, Debug)]
pub struct TheoryHandle {
    pub id: String,
    pub model: Arc<dyn CanonicalModel>,
}

impl TheoryHandle {
    pub fn new(id: &str, model: Arc<dyn CanonicalModel>) -> Self {
        TheoryHandle { id: id.into(), model }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        self.model.vocabulary()
    }

    pub fn decide(&self, f: &Formula) -> Result<bool, TheoryError> {
        self.model.holds(f)
    }

    pub fn monadic(p: Card, not_p: Card) -> Result<Self, TheoryError> {
        let m = MonadicModel::new(p, not_p)?;
        Ok(TheoryHandle::new(&m.label(), Arc::new(m)))
    }

    pub fn matching(pairs: Card, unmatched: Card) -> Result<Self, TheoryError> {
        let m = MatchingModel::new(pairs, unmatched)?;
        Ok(TheoryHandle::new(&m.label(), Arc::new(m)))
    }

    pub fn linorder(shape: OrderShape) -> Self {
        let m = OrderModel::new(shape);
        TheoryHandle::new(&m.label(), Arc::new(m))
    }

    /// `P` on every element.
    pub fn all_p() -> Self {
        Self::monadic(Card::Inf, Card::Fin(0)).expect("infinite")
    }

    /// `P` infinite and coinfinite.
    pub fn inf_coinf() -> Self {
        Self::monadic(Card::Inf, Card::Inf).expect("infinite")
    }

    /// Infinitely many pairs and no unmatched element.
    pub fn perfect_matching() -> Self {
        Self::matching(Card::Inf, Card::Fin(0)).expect("infinite")
    }

    /// Infinitely many matched and infinitely many unmatched elements.
    pub fn inf_inf_matching() -> Self {
        Self::matching(Card::Inf, Card::Inf).expect("infinite")
    }

    pub fn family(&self) -> Option<Family> {
        let label = self.model.label();
        label.split_whitespace().next().and_then(|w| w.parse().ok())
    }
}

impl FromStr for TheoryHandle {
    type Err = TheoryError;

    /// `monadic P=inf notP=0`, `matching inf inf` (pairs, then unmatched;
    /// `pairs=`/`unmatched=` keys are accepted too) or `linorder 2Q+1+Q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let (family, args) = words.split_first().ok_or_else(|| TheoryError::Config("empty theory".into()))?;
        let value = |arg: &str| arg.split_once('=').map_or(arg, |(_, v)| v).to_string();
        match family.parse::<Family>()? {
            Family::Monadic | Family::Matching if args.len() != 2 => {
                Err(TheoryError::Config(format!("`{family}` takes two cardinalities")))
            }
            Family::Monadic => Self::monadic(value(args[0]).parse()?, value(args[1]).parse()?),
            Family::Matching => Self::matching(value(args[0]).parse()?, value(args[1]).parse()?),
            Family::LinorderS => {
                let shape: OrderShape = args.join("").parse()?;
                Ok(Self::linorder(shape))
            }
        }
    }
}
