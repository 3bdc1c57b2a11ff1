use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A first-order variable `x_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabularyError {
    #[error("duplicate relation symbol `{0}`")]
    Duplicate(String),
    #[error("relation symbol `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("malformed vocabulary entry `{0}` (expected name/arity)")]
    Malformed(String),
    #[error("`{0}` is reserved and cannot name a relation")]
    Reserved(String),
}

/// A finite relational vocabulary. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vocabulary(Arc<[Symbol]>);

pub(crate) const KEYWORDS: [&str; 7] = ["forall", "exists", "and", "or", "not", "implies", "="];

impl Vocabulary {
    pub fn new<I, S>(symbols: I) -> Result<Self, VocabularyError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<Symbol> = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            if arity == 0 {
                return Err(VocabularyError::ZeroArity(name));
            }
            if KEYWORDS.contains(&name.as_str()) || is_variable_token(&name) {
                return Err(VocabularyError::Reserved(name));
            }
            if name.is_empty()
                || name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')' || c == ',' || c == '/')
            {
                return Err(VocabularyError::Malformed(name));
            }
            if out.iter().any(|s| s.name == name) {
                return Err(VocabularyError::Duplicate(name));
            }
            out.push(Symbol { name, arity });
        }
        Ok(Vocabulary(out.into()))
    }

    /// Parses a `name/arity` comma list such as `R/2,P/1`.
    pub fn parse(text: &str) -> Result<Self, VocabularyError> {
        let mut entries = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, arity) = item.rsplit_once('/').ok_or_else(|| VocabularyError::Malformed(item.to_string()))?;
            let arity: usize = arity.trim().parse().map_err(|_| VocabularyError::Malformed(item.to_string()))?;
            entries.push((name.trim().to_string(), arity));
        }
        Vocabulary::new(entries)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|s| s.name == name)
    }

    pub fn arity(&self, sym: usize) -> usize {
        self.0[sym].arity
    }

    pub fn name(&self, sym: usize) -> &str {
        &self.0[sym].name
    }

    pub fn max_arity(&self) -> usize {
        self.0.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Disjoint union; fails on a shared name.
    pub fn disjoint_union(&self, other: &Vocabulary) -> Result<Vocabulary, VocabularyError> {
        Vocabulary::new(self.0.iter().chain(other.0.iter()).map(|s| (s.name.clone(), s.arity)))
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}/{}", s.name, s.arity)?;
        }
        Ok(())
    }
}

pub(crate) fn is_variable_token(tok: &str) -> bool {
    tok.len() > 1 && tok.starts_with('x') && tok[1..].bytes().all(|b| b.is_ascii_digit())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quant {
    Exists,
    Forall,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::Exists => Quant::Forall,
            Quant::Forall => Quant::Exists,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quant::Exists => "exists",
            Quant::Forall => "forall",
        }
    }
}

/// First-order formula over a relational vocabulary.
///
/// `And(vec![])` is truth and `Or(vec![])` is falsity; both print as
/// `(and)` / `(or)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom { rel: Arc<str>, args: Vec<Var> },
    Eq(Var, Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quant, Var, Box<Formula>),
}

impl Formula {
    pub fn atom(rel: &str, args: &[u32]) -> Formula {
        Formula::Atom { rel: Arc::from(rel), args: args.iter().map(|&i| Var(i)).collect() }
    }

    pub fn eq(a: u32, b: u32) -> Formula {
        Formula::Eq(Var(a), Var(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::And(fs.into_iter().collect())
    }

    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::Or(fs.into_iter().collect())
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: u32, f: Formula) -> Formula {
        Formula::Quant(Quant::Exists, Var(v), Box::new(f))
    }

    pub fn forall(v: u32, f: Formula) -> Formula {
        Formula::Quant(Quant::Forall, Var(v), Box::new(f))
    }

    pub fn truth() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn falsity() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom { args, .. } => {
                out.extend(args.iter().filter(|v| !bound.contains(v)));
            }
            Formula::Eq(a, b) => {
                for v in [a, b] {
                    if !bound.contains(v) {
                        out.insert(*v);
                    }
                }
            }
            Formula::Not(g) => g.collect_free(bound, out),
            Formula::And(gs) | Formula::Or(gs) => {
                for g in gs {
                    g.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, v, g) => {
                bound.push(*v);
                g.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Variables bound by some quantifier, in first-occurrence order.
    pub fn bound_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Quant(_, v, _) = f {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        });
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.walk(&mut |f| {
            if matches!(f, Formula::Quant(..)) {
                qf = false;
            }
        });
        qf
    }

    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |f| {
            if matches!(f, Formula::Quant(..)) {
                n += 1;
            }
        });
        n
    }

    /// Largest variable index mentioned anywhere (free or bound).
    pub fn max_var(&self) -> Option<Var> {
        let mut m: Option<Var> = None;
        let mut bump = |v: Var| m = Some(m.map_or(v, |w| w.max(v)));
        self.walk(&mut |f| match f {
            Formula::Atom { args, .. } => args.iter().for_each(|&v| bump(v)),
            Formula::Eq(a, b) => {
                bump(*a);
                bump(*b);
            }
            Formula::Quant(_, v, _) => bump(*v),
            _ => {}
        });
        m
    }

    /// Relation names mentioned, deduplicated, in first-occurrence order.
    pub fn relations(&self) -> Vec<Arc<str>> {
        let mut out: Vec<Arc<str>> = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Atom { rel, .. } = f {
                if !out.iter().any(|r| r == rel) {
                    out.push(rel.clone());
                }
            }
        });
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => 0,
            Formula::Not(g) | Formula::Quant(_, _, g) => 1 + g.depth(),
            Formula::And(gs) | Formula::Or(gs) => 1 + gs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Atom { .. } | Formula::Eq(..) => {}
            Formula::Not(g) | Formula::Quant(_, _, g) => g.walk(visit),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.walk(visit)),
            Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Renames free occurrences of variables. Bound variables are untouched;
    /// the caller is responsible for avoiding capture.
    pub fn rename_free(&self, map: &impl Fn(Var) -> Var) -> Formula {
        self.rename_inner(map, &mut Vec::new())
    }

    fn rename_inner(&self, map: &impl Fn(Var) -> Var, bound: &mut Vec<Var>) -> Formula {
        let r = |v: &Var, bound: &Vec<Var>| if bound.contains(v) { *v } else { map(*v) };
        match self {
            Formula::Atom { rel, args } => {
                Formula::Atom { rel: rel.clone(), args: args.iter().map(|v| r(v, bound)).collect() }
            }
            Formula::Eq(a, b) => Formula::Eq(r(a, bound), r(b, bound)),
            Formula::Not(g) => Formula::not(g.rename_inner(map, bound)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.rename_inner(map, bound)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.rename_inner(map, bound)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.rename_inner(map, bound), b.rename_inner(map, bound)),
            Formula::Quant(q, v, g) => {
                bound.push(*v);
                let body = g.rename_inner(map, bound);
                bound.pop();
                Formula::Quant(*q, *v, Box::new(body))
            }
        }
    }

    /// Checks every atom against `vocab`.
    pub fn check(&self, vocab: &Vocabulary) -> Result<(), super::parse::ParseError> {
        let mut err = None;
        self.walk(&mut |f| {
            if err.is_some() {
                return;
            }
            if let Formula::Atom { rel, args } = f {
                match vocab.index_of(rel) {
                    None => err = Some(super::parse::ParseError::UnknownSymbol { name: rel.to_string(), pos: 0 }),
                    Some(i) if vocab.arity(i) != args.len() => {
                        err = Some(super::parse::ParseError::ArityMismatch {
                            name: rel.to_string(),
                            expected: vocab.arity(i),
                            found: args.len(),
                            pos: 0,
                        })
                    }
                    _ => {}
                }
            }
        });
        err.map_or(Ok(()), Err)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { rel, args } => {
                write!(f, "({rel}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) | Formula::Or(gs) => {
                f.write_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" })?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                f.write_str(")")
            }
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Quant(q, v, g) => write!(f, "({} {v} {g})", q.keyword()),
        }
    }
}

/// Which end of the quantifier hierarchy a level starts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelKind {
    E,
    A,
}

impl LevelKind {
    pub fn dual(self) -> LevelKind {
        match self {
            LevelKind::E => LevelKind::A,
            LevelKind::A => LevelKind::E,
        }
    }

    pub fn quant(self) -> Quant {
        match self {
            LevelKind::E => Quant::Exists,
            LevelKind::A => Quant::Forall,
        }
    }

    pub fn of(q: Quant) -> LevelKind {
        match q {
            Quant::Exists => LevelKind::E,
            Quant::Forall => LevelKind::A,
        }
    }
}

/// `E(n)` / `A(n)`: prenex sentences with `n` alternating blocks starting
/// with the given quantifier. Levels are cumulative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level {
    pub kind: LevelKind,
    pub n: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed level `{0}` (expected E<n> or A<n>)")]
pub struct LevelParseError(pub String);

impl Level {
    pub const fn e(n: usize) -> Level {
        Level { kind: LevelKind::E, n }
    }

    pub const fn a(n: usize) -> Level {
        Level { kind: LevelKind::A, n }
    }

    pub fn dual(self) -> Level {
        Level { kind: self.kind.dual(), n: self.n }
    }

    /// Whether every sentence at level `other` is also at level `self`.
    pub fn contains(self, other: Level) -> bool {
        other.n == 0 || other.n < self.n || (other.n == self.n && other.kind == self.kind)
    }

    pub fn parse(text: &str) -> Result<Level, LevelParseError> {
        let t = text.trim();
        let bad = || LevelParseError(text.to_string());
        let (kind, rest) = match t.chars().next() {
            Some('E') | Some('e') => (LevelKind::E, &t[1..]),
            Some('A') | Some('a') => (LevelKind::A, &t[1..]),
            _ => return Err(bad()),
        };
        let n = rest.parse().map_err(|_| bad())?;
        Ok(Level { kind, n })
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            LevelKind::E => 'E',
            LevelKind::A => 'A',
        };
        write!(f, "{k}{}", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_parse_and_errors() {
        let v = Vocabulary::parse("R/2, P/1").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.to_string(), "R/2,P/1");
        assert_eq!(Vocabulary::parse("R/0"), Err(VocabularyError::ZeroArity("R".into())));
        assert_eq!(Vocabulary::parse("R/2,R/1"), Err(VocabularyError::Duplicate("R".into())));
        assert!(Vocabulary::parse("R").is_err());
        assert!(Vocabulary::parse("x3/1").is_err());
        assert!(Vocabulary::parse("and/2").is_err());
    }

    #[test]
    fn level_containment_is_cumulative() {
        assert!(Level::e(2).contains(Level::a(1)));
        assert!(Level::e(2).contains(Level::e(1)));
        assert!(Level::a(2).contains(Level::e(0)));
        assert!(!Level::e(2).contains(Level::a(2)));
        assert!(!Level::e(1).contains(Level::e(2)));
        assert_eq!(Level::parse("A2").unwrap(), Level::a(2));
        assert_eq!(Level::e(3).to_string(), "E3");
    }

    #[test]
    fn free_and_bound_vars() {
        let f = Formula::exists(1, Formula::and([Formula::atom("R", &[0, 1]), Formula::eq(1, 2)]));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec![Var(0), Var(2)]);
        assert_eq!(f.bound_vars(), vec![Var(1)]);
        assert!(!f.is_sentence());
    }
}
