//! Borel codes over Cantor space.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::up::UPPoint;
use crate::verdict::Verdict;

/// `Σ` or `Π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Sigma,
    Pi,
}

impl Side {
    pub fn dual(self) -> Side {
        match self {
            Side::Sigma => Side::Pi,
            Side::Pi => Side::Sigma,
        }
    }
}

/// A level of the Borel hierarchy; `n = None` stands for `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BorelLevel {
    pub side: Side,
    pub n: Option<usize>,
}

impl BorelLevel {
    pub fn sigma(n: usize) -> Self {
        BorelLevel { side: Side::Sigma, n: Some(n) }
    }

    pub fn pi(n: usize) -> Self {
        BorelLevel { side: Side::Pi, n: Some(n) }
    }

    pub fn pi_omega() -> Self {
        BorelLevel { side: Side::Pi, n: None }
    }

    pub fn dual(self) -> Self {
        BorelLevel { side: self.side.dual(), n: self.n }
    }

    /// Whether every set of level `other` is of level `self`.
    pub fn contains(self, other: BorelLevel) -> bool {
        match (self.n, other.n) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b < a || (a == b && self.side == other.side),
        }
    }
}

impl fmt::Display for BorelLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            Side::Sigma => "Sigma",
            Side::Pi => "Pi",
        };
        match self.n {
            Some(n) => write!(f, "{s}{n}"),
            None => write!(f, "{s}Omega"),
        }
    }
}

pub type UpRule = Arc<dyn Fn(&UPPoint) -> bool + Send + Sync>;
type Generator = Arc<dyn Fn(usize) -> BorelCode + Send + Sync>;
type ScanLimit = Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// A countable sequence of codes, given by a total generator.
#[derive(Clone)]
pub struct Sequence {
    gen: Generator,
    len: Option<usize>,
    // members worth inspecting on a prefix of the given length
    scan: Option<ScanLimit>,
}

impl Sequence {
    pub fn infinite(gen: impl Fn(usize) -> BorelCode + Send + Sync + 'static) -> Self {
        Sequence { gen: Arc::new(gen), len: None, scan: None }
    }

    pub fn finite(codes: Vec<BorelCode>) -> Self {
        let len = codes.len();
        let codes = Arc::new(codes);
        Sequence { gen: Arc::new(move |i| codes[i].clone()), len: Some(len), scan: None }
    }

    /// Prefix verdicts inspect only members `0..limit(prefix_len)` of an
    /// infinite sequence. Defaults to `prefix_len + 1`.
    pub fn with_scan_limit(mut self, limit: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        self.scan = Some(Arc::new(limit));
        self
    }

    /// `None` for an infinite sequence.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn member(&self, i: usize) -> BorelCode {
        if let Some(n) = self.len {
            assert!(i < n, "member {i} of a sequence of length {n}");
        }
        (self.gen)(i)
    }

    fn scan_bound(&self, prefix_len: usize) -> usize {
        let b = self.scan.as_ref().map_or(prefix_len + 1, |f| f(prefix_len));
        self.len.map_or(b, |n| n.min(b))
    }
}

#[derive(Clone)]
pub enum Node {
    /// Basic clopen set: the listed positions carry the listed bits.
    Cylinder(Vec<(usize, bool)>),
    Complement(Box<BorelCode>),
    Union(Sequence),
    Intersect(Sequence),
}

/// A Borel code together with its claimed level and, optionally, a decision
/// rule for ultimately periodic points.
#[derive(Clone)]
pub struct BorelCode {
    node: Node,
    level: BorelLevel,
    rule: Option<UpRule>,
    name: Option<Arc<str>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("membership of ultimately periodic points is not decidable for `{0}`: infinite sequence without a decision rule")]
    Undecidable(String),
    #[error("unknown pointclass `{0}`")]
    UnknownKind(String),
}

impl BorelCode {
    pub fn cylinder(assignment: Vec<(usize, bool)>) -> Self {
        BorelCode { node: Node::Cylinder(assignment), level: BorelLevel::sigma(1), rule: None, name: None }
    }

    pub fn bit(pos: usize, value: bool) -> Self {
        Self::cylinder(vec![(pos, value)])
    }

    /// The whole space.
    pub fn everything() -> Self {
        Self::cylinder(Vec::new())
    }

    pub fn complement(c: BorelCode) -> Self {
        let level = c.level.dual();
        BorelCode { node: Node::Complement(Box::new(c)), level, rule: None, name: None }
    }

    pub fn union(seq: Sequence, level: BorelLevel) -> Self {
        BorelCode { node: Node::Union(seq), level, rule: None, name: None }
    }

    pub fn intersect(seq: Sequence, level: BorelLevel) -> Self {
        BorelCode { node: Node::Intersect(seq), level, rule: None, name: None }
    }

    /// Finite intersection; the level is the join of the members' levels.
    pub fn all_of(codes: Vec<BorelCode>) -> Self {
        let level = join_levels(codes.iter().map(|c| c.level));
        Self::intersect(Sequence::finite(codes), level)
    }

    /// Finite union.
    pub fn any_of(codes: Vec<BorelCode>) -> Self {
        let level = join_levels(codes.iter().map(|c| c.level));
        Self::union(Sequence::finite(codes), level)
    }

    pub fn with_rule(mut self, rule: impl Fn(&UPPoint) -> bool + Send + Sync + 'static) -> Self {
        self.rule = Some(Arc::new(rule));
        self
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn level(&self) -> BorelLevel {
        self.level
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn has_rule(&self) -> bool {
        self.rule.is_some()
    }

    fn label(&self) -> String {
        self.name.as_deref().map_or_else(|| format!("{}-code", self.level), str::to_string)
    }

    /// Least `(s, p)` with the set in `Σs` and in `Πp`, computed bottom-up
    /// from the tree. Infinite sequences are judged by their first `sample`
    /// members; generators are uniform, so later members have the same shape
    /// in every shipped code.
    pub fn computed_bounds(&self, sample: usize) -> (usize, usize) {
        match &self.node {
            Node::Cylinder(_) => (1, 1),
            Node::Complement(inner) => {
                let (s, p) = inner.computed_bounds(sample);
                (p, s)
            }
            Node::Union(seq) | Node::Intersect(seq) => {
                let count = seq.len.unwrap_or(sample);
                let members: Vec<(usize, usize)> = (0..count).map(|i| seq.member(i).computed_bounds(sample)).collect();
                let is_union = matches!(self.node, Node::Union(_));
                if seq.len.is_some() {
                    let s = members.iter().map(|m| m.0).max().unwrap_or(1);
                    let p = members.iter().map(|m| m.1).max().unwrap_or(1);
                    return (s, p);
                }
                if is_union {
                    let s = members.iter().map(|m| m.0.min(m.1 + 1)).max().unwrap_or(1);
                    (s, s + 1)
                } else {
                    let p = members.iter().map(|m| m.1.min(m.0 + 1)).max().unwrap_or(1);
                    (p + 1, p)
                }
            }
        }
    }

    /// The better of `Σs` and `Πp` from [`computed_bounds`](Self::computed_bounds).
    pub fn computed_level(&self, sample: usize) -> BorelLevel {
        let (s, p) = self.computed_bounds(sample);
        if p <= s {
            BorelLevel::pi(p)
        } else {
            BorelLevel::sigma(s)
        }
    }

    /// Whether the annotated level is compatible with the tree shape.
    pub fn level_consistent(&self, sample: usize) -> bool {
        let (s, p) = self.computed_bounds(sample);
        match (self.level.side, self.level.n) {
            (_, None) => true,
            (Side::Sigma, Some(n)) => n >= s,
            (Side::Pi, Some(n)) => n >= p,
        }
    }
}

fn join_levels(levels: impl Iterator<Item = BorelLevel>) -> BorelLevel {
    let joined = levels.fold(None, |acc: Option<BorelLevel>, l| {
        Some(match acc {
            None => l,
            Some(a) if a.contains(l) => a,
            Some(a) if l.contains(a) => l,
            // incomparable: the join lies in Δ(n+1), reported as Σ(n+1)
            Some(a) => BorelLevel { side: Side::Sigma, n: a.n.max(l.n).map(|n| n + 1) },
        })
    });
    // the empty combination is clopen
    joined.unwrap_or(BorelLevel::sigma(1))
}

impl fmt::Debug for BorelCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BorelCode({}, {})", self.label(), self.level)
    }
}

/// Exact membership of an ultimately periodic point.
///
/// Decidable for cylinders, complements and finite combinations, and for any
/// node carrying a decision rule.
pub fn member_up(c: &BorelCode, p: &UPPoint) -> Result<bool, CodeError> {
    if let Some(rule) = &c.rule {
        return Ok(rule(p));
    }
    match &c.node {
        Node::Cylinder(a) => Ok(a.iter().all(|&(i, b)| p.bit(i) == b)),
        Node::Complement(inner) => member_up(inner, p).map(|b| !b),
        Node::Union(seq) | Node::Intersect(seq) => {
            let n = seq.len.ok_or_else(|| CodeError::Undecidable(c.label()))?;
            let want = matches!(c.node, Node::Union(_));
            for i in 0..n {
                if member_up(&seq.member(i), p)? == want {
                    return Ok(want);
                }
            }
            Ok(!want)
        }
    }
}

/// What a finite prefix says about membership: a definite answer only when
/// every extension agrees, as witnessed by the cylinders inspected.
///
/// Sound but incomplete: infinite sequences are scanned up to their scan
/// limit, so a union is never refuted and an intersection never confirmed.
pub fn verdict_prefix(c: &BorelCode, bits: &[bool]) -> Verdict {
    match &c.node {
        Node::Cylinder(a) => {
            let mut all_known = true;
            for &(i, b) in a {
                match bits.get(i) {
                    Some(&x) if x != b => return Verdict::False,
                    Some(_) => {}
                    None => all_known = false,
                }
            }
            if all_known {
                Verdict::True
            } else {
                Verdict::Unknown
            }
        }
        Node::Complement(inner) => !verdict_prefix(inner, bits),
        Node::Union(seq) | Node::Intersect(seq) => {
            let want = if matches!(c.node, Node::Union(_)) { Verdict::True } else { Verdict::False };
            let bound = seq.scan_bound(bits.len());
            let mut all_opposite = true;
            for i in 0..bound {
                let v = verdict_prefix(&seq.member(i), bits);
                if v == want {
                    return want;
                }
                all_opposite &= v == !want;
            }
            if seq.len.is_some_and(|n| n <= bound) && all_opposite {
                !want
            } else {
                Verdict::Unknown
            }
        }
    }
}
