use std::fmt;
use std::sync::Arc;

use super::TheoryError;
use crate::diagrams::{atom_index, bits_for_size};
use crate::formulas::{classify, prenex, Formula, Level, LevelKind, Quant, Var, Vocabulary};
use crate::pointclasses::{BorelCode, BorelLevel, Sequence};

/// Axioms inspected by prefix verdicts of an infinite axiom list.
pub const DEFAULT_AXIOM_WINDOW: usize = 6;

type AxiomGen = Arc<dyn Fn(usize) -> Formula + Send + Sync>;

/// A finite or computably enumerated list of axioms.
#[derive(Clone)]
pub enum AxiomSource {
    Finite(Vec<Formula>),
    Infinite {
        name: String,
        gen: AxiomGen,
        /// How many axioms a prefix verdict looks at.
        window: usize,
    },
}

impl AxiomSource {
    pub fn infinite(name: &str, gen: impl Fn(usize) -> Formula + Send + Sync + 'static) -> Self {
        AxiomSource::Infinite { name: name.into(), gen: Arc::new(gen), window: DEFAULT_AXIOM_WINDOW }
    }

    /// Axiom `i`, if the list is that long.
    pub fn axiom(&self, i: usize) -> Option<Formula> {
        match self {
            AxiomSource::Finite(v) => v.get(i).cloned(),
            AxiomSource::Infinite { gen, .. } => Some(gen(i)),
        }
    }

    /// The first `n` axioms (all of them for a shorter finite list).
    pub fn take(&self, n: usize) -> Vec<Formula> {
        (0..n).map_while(|i| self.axiom(i)).collect()
    }
}

impl fmt::Debug for AxiomSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomSource::Finite(v) => f.debug_tuple("Finite").field(v).finish(),
            AxiomSource::Infinite { name, window, .. } => {
                f.debug_struct("Infinite").field("name", name).field("window", window).finish()
            }
        }
    }
}

/// Axioms checked against the claimed level before an infinite list is
/// accepted. Later axioms are checked when generated.
const EAGER_CHECK: usize = 32;

fn complete_elements(vocab: &Vocabulary, len: usize) -> usize {
    let mut n = 0;
    while bits_for_size(vocab, n + 1) <= len {
        n += 1;
    }
    n
}

fn eval_qf(f: &Formula, env: &[usize], atom: &dyn Fn(&str, &[usize]) -> bool) -> bool {
    match f {
        Formula::Atom { rel, args } => {
            let tuple: Vec<usize> = args.iter().map(|v| env[v.index()]).collect();
            atom(rel, &tuple)
        }
        Formula::Eq(a, b) => env[a.index()] == env[b.index()],
        Formula::Not(g) => !eval_qf(g, env, atom),
        Formula::And(gs) => gs.iter().all(|g| eval_qf(g, env, atom)),
        Formula::Or(gs) => gs.iter().any(|g| eval_qf(g, env, atom)),
        Formula::Implies(a, b) => !eval_qf(a, env, atom) || eval_qf(b, env, atom),
        Formula::Quant(..) => unreachable!("matrix is quantifier-free"),
    }
}

// The clopen set of diagrams where the matrix holds under `env`: a union of
// full cylinders over the atom bits it mentions.
fn matrix_code(matrix: &Formula, env: &[usize], vocab: &Vocabulary) -> BorelCode {
    let mut positions: Vec<usize> = Vec::new();
    matrix.walk(&mut |g| {
        if let Formula::Atom { rel, args } = g {
            let sym = vocab.index_of(rel).expect("checked symbol");
            let tuple: Vec<usize> = args.iter().map(|v| env[v.index()]).collect();
            let pos = atom_index(vocab, sym, &tuple);
            if !positions.contains(&pos) {
                positions.push(pos);
            }
        }
    });
    positions.sort_unstable();
    let mut cylinders = Vec::new();
    for bits in 0..1u64 << positions.len() {
        let value = |pos: usize| bits >> positions.binary_search(&pos).expect("listed") & 1 == 1;
        let atom = |rel: &str, tuple: &[usize]| {
            let sym = vocab.index_of(rel).expect("checked symbol");
            value(atom_index(vocab, sym, tuple))
        };
        if eval_qf(matrix, env, &atom) {
            cylinders.push(BorelCode::cylinder(positions.iter().map(|&p| (p, value(p))).collect()));
        }
    }
    match cylinders.len() {
        0 => BorelCode::complement(BorelCode::everything()),
        1 => cylinders.pop().expect("one"),
        _ => BorelCode::any_of(cylinders),
    }
}

fn suffix_level(prefix: &[(Quant, Var)]) -> Option<BorelLevel> {
    let first = prefix.first()?.0;
    let blocks = 1 + prefix.windows(2).filter(|w| w[0].0 != w[1].0).count();
    Some(match first {
        Quant::Exists => BorelLevel::sigma(blocks),
        Quant::Forall => BorelLevel::pi(blocks),
    })
}

fn build(
    prefix: Arc<[(Quant, Var)]>,
    at: usize,
    matrix: Arc<Formula>,
    env: Vec<usize>,
    vocab: Vocabulary,
) -> BorelCode {
    let Some(level) = suffix_level(&prefix[at..]) else {
        return matrix_code(&matrix, &env, &vocab);
    };
    let (q, v) = prefix[at];
    let scan_vocab = vocab.clone();
    let seq = Sequence::infinite(move |e| {
        let mut env = env.clone();
        env[v.index()] = e;
        build(prefix.clone(), at + 1, matrix.clone(), env, vocab.clone())
    })
    .with_scan_limit(move |len| complete_elements(&scan_vocab, len) + 1);
    match q {
        Quant::Exists => BorelCode::union(seq, level),
        Quant::Forall => BorelCode::intersect(seq, level),
    }
}

/// The set of diagrams (structures with universe `ω`) satisfying one
/// sentence. Existential quantifiers become unions over elements, universal
/// ones intersections, and the matrix a finite union of cylinders, so an
/// `E(n)` sentence gets a `Σn` code and an `A(n)` sentence a `Πn` code.
pub fn sentence_code(f: &Formula, vocab: &Vocabulary) -> Result<BorelCode, TheoryError> {
    if !f.is_sentence() {
        return Err(TheoryError::NotSentence(f.to_string()));
    }
    f.check(vocab)?;
    let p = prenex(f);
    let slots = p.to_formula().max_var().map_or(0, |v| v.index() + 1);
    let code = build(p.prefix.clone().into(), 0, Arc::new(p.matrix.clone()), vec![0; slots], vocab.clone());
    Ok(code.named(&f.to_string()))
}

fn check_level(f: &Formula, index: usize, claimed: Level) -> Result<(), TheoryError> {
    let found = classify(f);
    if claimed.contains(found) {
        Ok(())
    } else {
        Err(TheoryError::AxiomAboveLevel { index, found, claimed })
    }
}

/// The set of diagrams satisfying every axiom.
///
/// A finite list is a finite intersection and keeps the join of its
/// members' levels. An infinite list of `A(n)` axioms gives a `Πn` code and
/// one of `E(n)` axioms a `Π(n+1)` code.
pub fn axioms_to_borel(axioms: &AxiomSource, claimed: Level, vocab: &Vocabulary) -> Result<BorelCode, TheoryError> {
    match axioms {
        AxiomSource::Finite(list) => {
            let mut codes = Vec::with_capacity(list.len());
            for (i, f) in list.iter().enumerate() {
                check_level(f, i, claimed)?;
                codes.push(sentence_code(f, vocab)?);
            }
            Ok(if codes.is_empty() { BorelCode::everything() } else { BorelCode::all_of(codes) })
        }
        AxiomSource::Infinite { name, gen, window } => {
            for i in 0..EAGER_CHECK {
                let f = gen(i);
                check_level(&f, i, claimed)?;
                sentence_code(&f, vocab)?;
            }
            let level = match claimed.kind {
                LevelKind::A => BorelLevel::pi(claimed.n.max(1)),
                LevelKind::E => BorelLevel::pi(claimed.n + 1),
            };
            let gen = gen.clone();
            let vocab = vocab.clone();
            let window = *window;
            let seq = Sequence::infinite(move |i| {
                let f = gen(i);
                check_level(&f, i, claimed).expect("axiom within the claimed level");
                sentence_code(&f, &vocab).expect("axiom over the vocabulary")
            })
            .with_scan_limit(move |len| (len + 1).min(window));
            Ok(BorelCode::intersect(seq, level).named(name))
        }
    }
}

fn distinct(vars: &[u32]) -> Vec<Formula> {
    let mut out = Vec::new();
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            out.push(Formula::not(Formula::eq(a, b)));
        }
    }
    out
}

fn close(body: Formula, exists: &[u32], forall: &[u32]) -> Formula {
    let inner = forall.iter().rev().fold(body, |f, &v| Formula::forall(v, f));
    exists.iter().rev().fold(inner, |f, &v| Formula::exists(v, f))
}

/// `R` irreflexive, symmetric, and with at most one partner per element.
pub fn matching_axioms() -> Vec<Formula> {
    vec![
        Formula::forall(0, Formula::not(Formula::atom("R", &[0, 0]))),
        Formula::forall(
            0,
            Formula::forall(1, Formula::implies(Formula::atom("R", &[0, 1]), Formula::atom("R", &[1, 0]))),
        ),
        Formula::forall(
            0,
            Formula::forall(
                1,
                Formula::forall(
                    2,
                    Formula::implies(
                        Formula::and([Formula::atom("R", &[0, 1]), Formula::atom("R", &[0, 2])]),
                        Formula::eq(1, 2),
                    ),
                ),
            ),
        ),
    ]
}

/// At least `k` elements with a partner (`E(1)`).
fn at_least_matched(k: u32) -> Formula {
    let xs: Vec<u32> = (0..k).collect();
    let ys: Vec<u32> = (k..2 * k).collect();
    let mut body = distinct(&xs);
    body.extend(xs.iter().zip(&ys).map(|(&x, &y)| Formula::atom("R", &[x, y])));
    let all: Vec<u32> = xs.iter().chain(&ys).copied().collect();
    close(Formula::and(body), &all, &[])
}

/// At least `k` elements without a partner (`E(2)`).
fn at_least_unmatched(k: u32) -> Formula {
    let xs: Vec<u32> = (0..k).collect();
    let mut body = distinct(&xs);
    body.extend(xs.iter().map(|&x| Formula::not(Formula::atom("R", &[x, k]))));
    close(Formula::and(body), &xs, &[k])
}

/// The theory of a matching with infinitely many matched and infinitely
/// many unmatched elements, axiomatized by `E(2)` sentences: the matching
/// axioms, then alternately "at least `k` matched" and "at least `k`
/// unmatched" for `k = 1, 2, …`.
pub fn matching_theory_axioms() -> AxiomSource {
    AxiomSource::infinite("matching-inf-inf", |i| {
        let base = matching_axioms();
        if i < base.len() {
            return base[i].clone();
        }
        let j = i - base.len();
        let k = (j / 2 + 1) as u32;
        if j.is_multiple_of(2) {
            at_least_matched(k)
        } else {
            at_least_unmatched(k)
        }
    })
}

/// `P` infinite and coinfinite: "at least `k` elements in `P`" and "at
/// least `k` outside `P`" for every `k` (`E(1)`).
pub fn infcoinf_axioms() -> AxiomSource {
    AxiomSource::infinite("infinite-coinfinite", |i| {
        let k = (i / 2 + 1) as u32;
        let xs: Vec<u32> = (0..k).collect();
        let mut body = distinct(&xs);
        body.extend(xs.iter().map(|&x| {
            let a = Formula::atom("P", &[x]);
            if i % 2 == 0 {
                a
            } else {
                Formula::not(a)
            }
        }));
        close(Formula::and(body), &xs, &[])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointclasses::verdict_prefix;
    use crate::verdict::Verdict;

    fn r() -> Vocabulary {
        Vocabulary::parse("R/2").unwrap()
    }

    #[test]
    fn universal_axioms_are_closed() {
        let code = axioms_to_borel(&AxiomSource::Finite(matching_axioms()), Level::a(1), &r()).unwrap();
        assert_eq!(code.level(), BorelLevel::pi(1));
        // R(0,0) is the first atom
        assert_eq!(verdict_prefix(&code, &[true]), Verdict::False);
        assert_eq!(verdict_prefix(&code, &[false, false, false, false]), Verdict::Unknown);
    }

    #[test]
    fn levels_of_shipped_lists() {
        let m = axioms_to_borel(&matching_theory_axioms(), Level::e(2), &r()).unwrap();
        assert_eq!(m.level(), BorelLevel::pi(3));
        let p = Vocabulary::parse("P/1").unwrap();
        let c = axioms_to_borel(&infcoinf_axioms(), Level::e(1), &p).unwrap();
        assert_eq!(c.level(), BorelLevel::pi(2));
        assert_eq!(classify(&at_least_unmatched(2)), Level::e(2));
        assert_eq!(classify(&at_least_matched(2)), Level::e(1));
    }

    #[test]
    fn claimed_level_is_enforced() {
        let err = axioms_to_borel(&matching_theory_axioms(), Level::e(1), &r()).unwrap_err();
        assert!(matches!(err, TheoryError::AxiomAboveLevel { index: 0, .. }));
    }
}
