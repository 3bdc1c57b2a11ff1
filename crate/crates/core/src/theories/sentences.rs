use std::collections::BTreeSet;

use crate::formulas::{classify, Formula, Level, Quant, Var, Vocabulary};

/// The finite stock of sentences that fragments and completions range over.
///
/// A sentence in normal form is a prefix `Q_0 x_0 … Q_{q-1} x_{q-1}` over a
/// matrix that is one literal, or a conjunction or disjunction of up to
/// `max_literals` distinct, non-complementary literals, and that mentions
/// every quantified variable. Literals are relation atoms and equalities
/// `x_i = x_j` with `i < j`, possibly negated. The stock is closed under
/// negation up to the obvious rewriting.
///
/// Order: by quantifier count, then lexicographically by printed form.
#[derive(Clone, Debug)]
pub struct SentenceSpace {
    pub vocab: Vocabulary,
    pub max_quantifiers: usize,
    pub max_literals: usize,
}

impl SentenceSpace {
    pub fn new(vocab: &Vocabulary, max_quantifiers: usize, max_literals: usize) -> Self {
        SentenceSpace { vocab: vocab.clone(), max_quantifiers, max_literals }
    }

    fn literals(&self, q: usize) -> Vec<Formula> {
        let mut atoms = Vec::new();
        for s in self.vocab.symbols() {
            let k = s.arity as u32;
            for code in 0..(q as u32).pow(k) {
                let args: Vec<u32> = (0..k).rev().map(|i| code / (q as u32).pow(i) % q as u32).collect();
                atoms.push(Formula::atom(&s.name, &args));
            }
        }
        for i in 0..q as u32 {
            for j in i + 1..q as u32 {
                atoms.push(Formula::eq(i, j));
            }
        }
        atoms.into_iter().flat_map(|a| [a.clone(), Formula::not(a)]).collect()
    }

    fn matrices(&self, q: usize) -> Vec<Formula> {
        let lits = self.literals(q);
        let base = |f: &Formula| match f {
            Formula::Not(g) => (**g).clone(),
            g => g.clone(),
        };
        let mut out = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        fn rec(
            lits: &[Formula],
            start: usize,
            chosen: &mut Vec<usize>,
            max: usize,
            base: &dyn Fn(&Formula) -> Formula,
            out: &mut Vec<Vec<Formula>>,
        ) {
            if !chosen.is_empty() {
                out.push(chosen.iter().map(|&i| lits[i].clone()).collect());
            }
            if chosen.len() == max {
                return;
            }
            for i in start..lits.len() {
                if chosen.iter().any(|&j| base(&lits[j]) == base(&lits[i])) {
                    continue;
                }
                chosen.push(i);
                rec(lits, i + 1, chosen, max, base, out);
                chosen.pop();
            }
        }
        let mut sets = Vec::new();
        rec(&lits, 0, &mut chosen, self.max_literals, &base, &mut sets);
        for set in sets {
            let vars: BTreeSet<Var> = set.iter().flat_map(|l| l.free_vars()).collect();
            if vars.len() != q {
                continue;
            }
            if set.len() == 1 {
                out.push(set[0].clone());
            } else {
                out.push(Formula::And(set.clone()));
                out.push(Formula::Or(set));
            }
        }
        out
    }

    /// Normal-form sentences with exactly `q` quantifiers, in order.
    pub fn with_quantifiers(&self, q: usize) -> Vec<Formula> {
        let matrices = self.matrices(q);
        let mut out = Vec::new();
        for pattern in 0..1u32 << q {
            for m in &matrices {
                let mut f = m.clone();
                for i in (0..q).rev() {
                    let quant = if pattern >> i & 1 == 0 { Quant::Exists } else { Quant::Forall };
                    f = Formula::Quant(quant, Var(i as u32), Box::new(f));
                }
                out.push(f);
            }
        }
        let mut keyed: Vec<(String, Formula)> = out.into_iter().map(|f| (f.to_string(), f)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        keyed.into_iter().map(|(_, f)| f).collect()
    }

    /// All normal-form sentences with `1..=max_quantifiers` quantifiers.
    pub fn sentences(&self) -> Vec<Formula> {
        (1..=self.max_quantifiers).flat_map(|q| self.with_quantifiers(q)).collect()
    }

    /// The sentences classified inside `level`.
    pub fn in_level(&self, level: Level) -> Vec<Formula> {
        self.sentences().into_iter().filter(|f| level.contains(classify(f))).collect()
    }
}

/// The normal-form negation: dual prefix, negated literals, dual connective.
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Quant(q, v, g) => Formula::Quant(q.dual(), *v, Box::new(negate(g))),
        Formula::And(gs) => Formula::Or(gs.iter().map(negate).collect()),
        Formula::Or(gs) => Formula::And(gs.iter().map(negate).collect()),
        Formula::Not(g) => (**g).clone(),
        other => Formula::not(other.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_space() {
        let v = Vocabulary::parse("P/1").unwrap();
        let s = SentenceSpace::new(&v, 1, 3);
        let got: Vec<String> = s.sentences().iter().map(|f| f.to_string()).collect();
        assert_eq!(
            got,
            ["(exists x0 (P x0))", "(exists x0 (not (P x0)))", "(forall x0 (P x0))", "(forall x0 (not (P x0)))"]
        );
    }

    #[test]
    fn closed_under_negation() {
        let v = Vocabulary::parse("R/2").unwrap();
        let s = SentenceSpace::new(&v, 2, 2);
        let all: BTreeSet<String> = s.sentences().iter().map(|f| f.to_string()).collect();
        for f in s.sentences() {
            let n = negate(&f);
            // literal order inside a matrix is kept, so the negation is listed
            assert!(all.contains(&n.to_string()), "{n}");
        }
    }

    #[test]
    fn distinct_p_elements_is_listed() {
        let v = Vocabulary::parse("P/1").unwrap();
        let s = SentenceSpace::new(&v, 2, 3);
        let want = "(exists x0 (exists x1 (and (P x0) (P x1) (not (= x0 x1)))))";
        assert!(s.sentences().iter().any(|f| f.to_string() == want));
    }
}
