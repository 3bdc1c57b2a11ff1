//! Seeded generators for formulas and structures, used by the property
//! harnesses and the battery.

use rand::seq::SliceRandom;
use rand::Rng;

use super::structure::FiniteStructure;
use super::syntax::{Formula, Quant, Var, Vocabulary};

/// Knobs for [`random_formula`].
#[derive(Clone, Debug)]
pub struct FormulaShape {
    pub max_depth: usize,
    pub max_quantifiers: usize,
    /// Variable indices are drawn from `0..var_pool`, so quantifiers may
    /// shadow one another.
    pub var_pool: u32,
    pub allow_implication: bool,
    pub allow_equality: bool,
}

impl Default for FormulaShape {
    fn default() -> Self {
        FormulaShape { max_depth: 5, max_quantifiers: 4, var_pool: 4, allow_implication: true, allow_equality: true }
    }
}

fn random_atom<R: Rng + ?Sized>(rng: &mut R, vocab: &Vocabulary, scope: &[Var], allow_eq: bool) -> Formula {
    if allow_eq && scope.len() > 1 && rng.gen_bool(0.2) {
        let a = *scope.choose(rng).unwrap();
        let b = *scope.choose(rng).unwrap();
        return Formula::Eq(a, b);
    }
    let sym = rng.gen_range(0..vocab.len());
    let args = (0..vocab.arity(sym)).map(|_| *scope.choose(rng).unwrap()).collect();
    Formula::Atom { rel: vocab.name(sym).into(), args }
}

fn grow<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    shape: &FormulaShape,
    depth: usize,
    quants: &mut usize,
    scope: &mut Vec<Var>,
) -> Formula {
    let can_quantify = *quants < shape.max_quantifiers && depth > 0;
    if scope.is_empty() {
        if !can_quantify {
            return if rng.gen() { Formula::truth() } else { Formula::falsity() };
        }
        return quantify(rng, vocab, shape, depth, quants, scope);
    }
    if depth == 0 {
        return random_atom(rng, vocab, scope, shape.allow_equality);
    }
    match rng.gen_range(0..10) {
        0 | 1 => random_atom(rng, vocab, scope, shape.allow_equality),
        2 => Formula::not(grow(rng, vocab, shape, depth - 1, quants, scope)),
        3 | 4 => {
            let n = rng.gen_range(2..=3);
            Formula::and((0..n).map(|_| grow(rng, vocab, shape, depth - 1, quants, scope)).collect::<Vec<_>>())
        }
        5 | 6 => {
            let n = rng.gen_range(2..=3);
            Formula::or((0..n).map(|_| grow(rng, vocab, shape, depth - 1, quants, scope)).collect::<Vec<_>>())
        }
        7 if shape.allow_implication => {
            let a = grow(rng, vocab, shape, depth - 1, quants, scope);
            let b = grow(rng, vocab, shape, depth - 1, quants, scope);
            Formula::implies(a, b)
        }
        _ if can_quantify => quantify(rng, vocab, shape, depth, quants, scope),
        _ => random_atom(rng, vocab, scope, shape.allow_equality),
    }
}

fn quantify<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    shape: &FormulaShape,
    depth: usize,
    quants: &mut usize,
    scope: &mut Vec<Var>,
) -> Formula {
    *quants += 1;
    let v = Var(rng.gen_range(0..shape.var_pool.max(1)));
    let q = if rng.gen() { Quant::Exists } else { Quant::Forall };
    let pushed = !scope.contains(&v);
    if pushed {
        scope.push(v);
    }
    let body = grow(rng, vocab, shape, depth - 1, quants, scope);
    if pushed {
        scope.pop();
    }
    Formula::Quant(q, v, Box::new(body))
}

/// A random sentence over `vocab`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, vocab: &Vocabulary, shape: &FormulaShape) -> Formula {
    let mut quants = 0;
    grow(rng, vocab, shape, shape.max_depth, &mut quants, &mut Vec::new())
}

/// A random sentence `∃x̄ ∀ȳ θ` with `θ` quantifier-free, `1 ≤ |x̄| ≤
/// max_exists` and `|ȳ| ≤ max_forall`.
pub fn random_e2_sentence<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    max_exists: usize,
    max_forall: usize,
) -> Formula {
    let e = rng.gen_range(1..=max_exists.max(1));
    let a = rng.gen_range(0..=max_forall);
    let scope: Vec<Var> = (0..(e + a) as u32).map(Var).collect();
    let matrix = random_matrix(rng, vocab, &scope, 3);
    let body = (e..e + a).rev().fold(matrix, |f, i| Formula::forall(i as u32, f));
    (0..e).rev().fold(body, |f, i| Formula::exists(i as u32, f))
}

fn random_matrix<R: Rng + ?Sized>(rng: &mut R, vocab: &Vocabulary, scope: &[Var], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        let atom = random_atom(rng, vocab, scope, true);
        return if rng.gen() { atom } else { Formula::not(atom) };
    }
    let n = rng.gen_range(2..=3);
    let parts: Vec<Formula> = (0..n).map(|_| random_matrix(rng, vocab, scope, depth - 1)).collect();
    if rng.gen() {
        Formula::and(parts)
    } else {
        Formula::or(parts)
    }
}

/// A structure where each cell holds independently with probability `density`.
pub fn random_structure<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    size: usize,
    density: f64,
) -> FiniteStructure {
    let mut s = FiniteStructure::empty(vocab, size).expect("size >= 1");
    for sym in 0..vocab.len() {
        for cell in s.table_mut(sym).iter_mut() {
            *cell = rng.gen_bool(density);
        }
    }
    s
}

/// A vocabulary of 1 to `max_symbols` symbols with arities in `1..=max_arity`.
pub fn random_vocabulary<R: Rng + ?Sized>(rng: &mut R, max_symbols: usize, max_arity: usize) -> Vocabulary {
    let n = rng.gen_range(1..=max_symbols.max(1));
    Vocabulary::new((0..n).map(|i| (format!("R{i}"), rng.gen_range(1..=max_arity.max(1))))).expect("distinct names")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::prenex::classify;
    use crate::formulas::syntax::Level;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_formulas_are_sentences_in_vocabulary() {
        let v = Vocabulary::parse("P/1,R/2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let f = random_formula(&mut rng, &v, &FormulaShape::default());
            assert!(f.is_sentence(), "{f}");
            f.check(&v).unwrap();
            assert!(f.quantifier_count() <= 4);
        }
    }

    #[test]
    fn e2_generator_stays_in_e2() {
        let v = Vocabulary::parse("R/2,S/2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let f = random_e2_sentence(&mut rng, &v, 3, 2);
            assert!(Level::e(2).contains(classify(&f)), "{f}");
        }
    }
}
