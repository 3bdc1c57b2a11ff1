use std::collections::BTreeMap;

use thiserror::Error;

use super::parse::ParseError;
use super::prenex::{classify, prenex};
use super::structure::{for_each_structure, FiniteStructure};
use super::syntax::{Formula, Level, Quant, Var, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("free variable {0} has no value")]
    Unbound(Var),
    #[error("variable {var} is assigned {value}, outside a universe of size {size}")]
    OutOfRange { var: Var, value: usize, size: usize },
    #[error(transparent)]
    Vocabulary(#[from] ParseError),
}

const UNBOUND: usize = usize::MAX;

/// A formula with relation names resolved to vocabulary indices.
#[derive(Clone, Debug)]
pub struct Compiled {
    node: Node,
    slots: usize,
}

#[derive(Clone, Debug)]
enum Node {
    Atom(usize, Vec<usize>),
    Eq(usize, usize),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
}

impl Compiled {
    pub fn new(f: &Formula, vocab: &Vocabulary) -> Result<Compiled, ParseError> {
        f.check(vocab)?;
        Ok(Compiled { node: lower(f, vocab), slots: f.max_var().map_or(0, |v| v.index() + 1) })
    }

    /// Evaluates a sentence. Panics on free variables; use [`eval_finite`]
    /// for checked evaluation.
    pub fn holds(&self, s: &FiniteStructure) -> bool {
        let mut env = vec![UNBOUND; self.slots];
        eval(&self.node, s, &mut env)
    }
}

fn lower(f: &Formula, vocab: &Vocabulary) -> Node {
    match f {
        Formula::Atom { rel, args } => {
            Node::Atom(vocab.index_of(rel).expect("checked"), args.iter().map(|v| v.index()).collect())
        }
        Formula::Eq(a, b) => Node::Eq(a.index(), b.index()),
        Formula::Not(g) => Node::Not(Box::new(lower(g, vocab))),
        Formula::And(gs) => Node::And(gs.iter().map(|g| lower(g, vocab)).collect()),
        Formula::Or(gs) => Node::Or(gs.iter().map(|g| lower(g, vocab)).collect()),
        Formula::Implies(a, b) => Node::Implies(Box::new(lower(a, vocab)), Box::new(lower(b, vocab))),
        Formula::Quant(Quant::Exists, v, g) => Node::Exists(v.index(), Box::new(lower(g, vocab))),
        Formula::Quant(Quant::Forall, v, g) => Node::Forall(v.index(), Box::new(lower(g, vocab))),
    }
}

fn eval(n: &Node, s: &FiniteStructure, env: &mut [usize]) -> bool {
    match n {
        Node::Atom(sym, args) => {
            let size = s.size();
            let off = args.iter().fold(0, |acc, &a| acc * size + env[a]);
            s.holds_at(*sym, off)
        }
        Node::Eq(a, b) => env[*a] == env[*b],
        Node::Not(g) => !eval(g, s, env),
        Node::And(gs) => gs.iter().all(|g| eval(g, s, env)),
        Node::Or(gs) => gs.iter().any(|g| eval(g, s, env)),
        Node::Implies(a, b) => !eval(a, s, env) || eval(b, s, env),
        Node::Exists(v, g) | Node::Forall(v, g) => {
            let saved = env[*v];
            let want = matches!(n, Node::Exists(..));
            let mut result = !want;
            for e in 0..s.size() {
                env[*v] = e;
                if eval(g, s, env) == want {
                    result = want;
                    break;
                }
            }
            env[*v] = saved;
            result
        }
    }
}

/// Tarski semantics on a finite structure; quantifiers range over the
/// universe `{0, …, size-1}`.
pub fn eval_finite(f: &Formula, s: &FiniteStructure, asg: &BTreeMap<Var, usize>) -> Result<bool, EvalError> {
    let c = Compiled::new(f, s.vocabulary())?;
    let mut env = vec![UNBOUND; c.slots];
    for v in f.free_vars() {
        let value = *asg.get(&v).ok_or(EvalError::Unbound(v))?;
        if value >= s.size() {
            return Err(EvalError::OutOfRange { var: v, value, size: s.size() });
        }
        env[v.index()] = value;
    }
    Ok(eval(&c.node, s, &mut env))
}

/// Convenience for sentences.
pub fn holds(f: &Formula, s: &FiniteStructure) -> Result<bool, EvalError> {
    eval_finite(f, s, &BTreeMap::new())
}

fn mentioned_symbols(vocab: &Vocabulary, fs: &[&Formula]) -> Vec<usize> {
    let mut syms: Vec<usize> = fs.iter().flat_map(|f| f.relations()).filter_map(|r| vocab.index_of(&r)).collect();
    syms.sort_unstable();
    syms.dedup();
    syms
}

/// Whether two sentences agree on every structure of size `1..=size_cap`.
///
/// Relations neither sentence mentions are irrelevant to both and are held
/// empty during the sweep.
pub fn equivalent_on_small(vocab: &Vocabulary, f: &Formula, g: &Formula, size_cap: usize) -> Result<bool, ParseError> {
    let cf = Compiled::new(f, vocab)?;
    let cg = Compiled::new(g, vocab)?;
    let syms = mentioned_symbols(vocab, &[f, g]);
    Ok((1..=size_cap).all(|n| for_each_structure(vocab, n, &syms, |s| cf.holds(s) == cg.holds(s))))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelSearchError {
    #[error("expected a sentence at level E2, found {0}")]
    NotE2(Level),
    #[error("expected a sentence, found free variables")]
    NotSentence,
    #[error(transparent)]
    Vocabulary(#[from] ParseError),
}

/// Searches for a finite model of an `E(2)` sentence.
///
/// Any model contains the witnesses of the leading existential block, and the
/// substructure they generate is again a model (universal statements survive
/// passing to substructures). So it suffices to search sizes up to the number
/// of leading existential variables.
pub fn find_finite_model(
    f: &Formula,
    vocab: &Vocabulary,
    cap: usize,
) -> Result<Option<FiniteStructure>, ModelSearchError> {
    if !f.is_sentence() {
        return Err(ModelSearchError::NotSentence);
    }
    let level = classify(f);
    if !Level::e(2).contains(level) {
        return Err(ModelSearchError::NotE2(level));
    }
    let witnesses = prenex(f).leading_existentials().len().max(1);
    let c = Compiled::new(f, vocab)?;
    let syms = mentioned_symbols(vocab, &[f]);
    for n in 1..=witnesses.min(cap) {
        let mut found = None;
        for_each_structure(vocab, n, &syms, |s| {
            if c.holds(s) {
                found = Some(s.clone());
                false
            } else {
                true
            }
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::parse::parse_formula;

    fn p(text: &str, vocab: &Vocabulary) -> Formula {
        parse_formula(text, vocab).unwrap()
    }

    #[test]
    fn basic_semantics() {
        let v = Vocabulary::parse("P/1").unwrap();
        let s = FiniteStructure::parse(&v, "size=2; P 0").unwrap();
        assert!(holds(&p("(exists x0 (P x0))", &v), &s).unwrap());
        assert!(!holds(&p("(forall x0 (P x0))", &v), &s).unwrap());
    }

    #[test]
    fn free_variables_need_values() {
        let v = Vocabulary::parse("P/1").unwrap();
        let s = FiniteStructure::parse(&v, "size=2; P 1").unwrap();
        let f = p("(P x3)", &v);
        assert_eq!(eval_finite(&f, &s, &BTreeMap::new()), Err(EvalError::Unbound(Var(3))));
        let asg = BTreeMap::from([(Var(3), 1)]);
        assert_eq!(eval_finite(&f, &s, &asg), Ok(true));
        let asg = BTreeMap::from([(Var(3), 2)]);
        assert!(matches!(eval_finite(&f, &s, &asg), Err(EvalError::OutOfRange { .. })));
    }

    #[test]
    fn small_equivalence() {
        let v = Vocabulary::parse("P/1").unwrap();
        let e = p("(exists x0 (P x0))", &v);
        let a = p("(forall x0 (P x0))", &v);
        assert!(!equivalent_on_small(&v, &e, &a, 2).unwrap());
        assert!(equivalent_on_small(&v, &e, &prenex(&e).to_formula(), 4).unwrap());
    }

    #[test]
    fn finite_model_examples() {
        let v = Vocabulary::parse("R/2").unwrap();
        let m = find_finite_model(&p("(exists x0 (forall x1 (= x1 x0)))", &v), &v, 5).unwrap().unwrap();
        assert_eq!(m.size(), 1);
        let f = p("(exists x0 (exists x1 (and (R x0 x1) (forall x2 (or (= x2 x0) (= x2 x1))))))", &v);
        // x0 = x1 with a loop already works
        let m = find_finite_model(&f, &v, 5).unwrap().unwrap();
        assert_eq!(m.to_string(), "size=1; R 0 0");
        let f = p("(exists x0 (exists x1 (and (R x0 x1) (not (= x0 x1)) (forall x2 (or (= x2 x0) (= x2 x1))))))", &v);
        let m = find_finite_model(&f, &v, 5).unwrap().unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.facts(0).len(), 1);
    }

    #[test]
    fn finite_model_rejects_higher_levels() {
        let v = Vocabulary::parse("R/2").unwrap();
        let f = p("(forall x0 (exists x1 (R x0 x1)))", &v);
        assert_eq!(find_finite_model(&f, &v, 3), Err(ModelSearchError::NotE2(Level::a(2))));
    }

    #[test]
    fn sentences_without_existentials_search_size_one() {
        let v = Vocabulary::parse("R/2").unwrap();
        let f = p("(forall x0 (not (R x0 x0)))", &v);
        assert_eq!(find_finite_model(&f, &v, 4).unwrap().unwrap().size(), 1);
        let f = p("(forall x0 (and (R x0 x0) (not (R x0 x0))))", &v);
        assert_eq!(find_finite_model(&f, &v, 4).unwrap(), None);
    }
}
