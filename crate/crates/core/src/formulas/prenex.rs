//! Prenex normalization with alternation-minimal block merging.
//!
//! Quantifiers of independent conjuncts (or disjuncts) may be pulled out in
//! any interleaving. For each subformula we track the fewest blocks a prefix
//! starting with `E` (resp. `A`) can have, allowing an empty leading block:
//!
//! ```text
//! c_K(g ∧ h) = max(c_K(g), c_K(h))        c_K(¬g) = c_dual(K)(g)
//! c_E(∃x g)  = max(1, c_E(g))             c_A(∃x g) = c_E(∃x g) + 1
//! ```
//!
//! and build the prefix achieving the smaller of `c_E`, `c_A` at the root.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::syntax::{Formula, Level, LevelKind, Quant, Var};

/// A prenex formula: quantifier prefix followed by a quantifier-free matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrenexForm {
    pub prefix: Vec<(Quant, Var)>,
    pub matrix: Formula,
}

impl PrenexForm {
    /// Maximal runs of like quantifiers.
    pub fn blocks(&self) -> Vec<(Quant, Vec<Var>)> {
        let mut out: Vec<(Quant, Vec<Var>)> = Vec::new();
        for &(q, v) in &self.prefix {
            match out.last_mut() {
                Some((lq, vs)) if *lq == q => vs.push(v),
                _ => out.push((q, vec![v])),
            }
        }
        out
    }

    pub fn level(&self) -> Level {
        let blocks = self.blocks();
        match blocks.first() {
            None => Level::e(0),
            Some((q, _)) => Level { kind: LevelKind::of(*q), n: blocks.len() },
        }
    }

    /// Variables of the leading existential block (empty if the prefix
    /// starts universally).
    pub fn leading_existentials(&self) -> Vec<Var> {
        self.prefix.iter().take_while(|(q, _)| *q == Quant::Exists).map(|&(_, v)| v).collect()
    }

    pub fn to_formula(&self) -> Formula {
        self.prefix.iter().rev().fold(self.matrix.clone(), |body, &(q, v)| Formula::Quant(q, v, Box::new(body)))
    }
}

impl fmt::Display for PrenexForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

#[derive(Clone, Copy)]
struct Cost {
    e: usize,
    a: usize,
}

impl Cost {
    fn get(self, k: LevelKind) -> usize {
        match k {
            LevelKind::E => self.e,
            LevelKind::A => self.a,
        }
    }
}

fn cost(f: &Formula) -> Cost {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => Cost { e: 0, a: 0 },
        Formula::Not(g) => {
            let c = cost(g);
            Cost { e: c.a, a: c.e }
        }
        Formula::And(gs) | Formula::Or(gs) => {
            gs.iter().map(cost).fold(Cost { e: 0, a: 0 }, |acc, c| Cost { e: acc.e.max(c.e), a: acc.a.max(c.a) })
        }
        Formula::Implies(..) => unreachable!("implications are rewritten before costing"),
        Formula::Quant(q, _, g) => {
            let c = cost(g);
            let own = LevelKind::of(*q);
            let same = c.get(own).max(1);
            match own {
                LevelKind::E => Cost { e: same, a: same + 1 },
                LevelKind::A => Cost { e: same + 1, a: same },
            }
        }
    }
}

// blocks[0] has kind `k`, blocks[1] its dual, and so on; blocks[0] may be empty.
fn build(f: &Formula, k: LevelKind) -> (Vec<Vec<Var>>, Formula) {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => (Vec::new(), f.clone()),
        Formula::Not(g) => {
            let (blocks, m) = build(g, k.dual());
            (blocks, Formula::not(m))
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let mut blocks: Vec<Vec<Var>> = Vec::new();
            let mut mats = Vec::with_capacity(gs.len());
            for g in gs {
                let (bs, m) = build(g, k);
                for (i, b) in bs.into_iter().enumerate() {
                    if blocks.len() <= i {
                        blocks.push(Vec::new());
                    }
                    blocks[i].extend(b);
                }
                mats.push(m);
            }
            let m = if matches!(f, Formula::And(_)) { Formula::And(mats) } else { Formula::Or(mats) };
            (blocks, m)
        }
        Formula::Implies(..) => unreachable!("implications are rewritten before building"),
        Formula::Quant(q, v, g) => {
            let own = LevelKind::of(*q);
            let (mut blocks, m) = build(g, own);
            if blocks.is_empty() {
                blocks.push(Vec::new());
            }
            blocks[0].insert(0, *v);
            if own != k {
                blocks.insert(0, Vec::new());
            }
            (blocks, m)
        }
    }
}

fn eliminate_implications(f: &Formula) -> Formula {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(eliminate_implications(g)),
        Formula::And(gs) => Formula::And(gs.iter().map(eliminate_implications).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(eliminate_implications).collect()),
        Formula::Implies(a, b) => Formula::or([Formula::not(eliminate_implications(a)), eliminate_implications(b)]),
        Formula::Quant(q, v, g) => Formula::Quant(*q, *v, Box::new(eliminate_implications(g))),
    }
}

// Gives every quantifier its own variable, numbered above everything in `f`.
fn rename_apart(f: &Formula, next: &mut u32, env: &mut BTreeMap<Var, Var>) -> Formula {
    let r = |v: &Var, env: &BTreeMap<Var, Var>| *env.get(v).unwrap_or(v);
    match f {
        Formula::Atom { rel, args } => {
            Formula::Atom { rel: rel.clone(), args: args.iter().map(|v| r(v, env)).collect() }
        }
        Formula::Eq(a, b) => Formula::Eq(r(a, env), r(b, env)),
        Formula::Not(g) => Formula::not(rename_apart(g, next, env)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_apart(g, next, env)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_apart(g, next, env)).collect()),
        Formula::Implies(a, b) => Formula::implies(rename_apart(a, next, env), rename_apart(b, next, env)),
        Formula::Quant(q, v, g) => {
            let fresh = Var(*next);
            *next += 1;
            let saved = env.insert(*v, fresh);
            let body = rename_apart(g, next, env);
            match saved {
                Some(old) => env.insert(*v, old),
                None => env.remove(v),
            };
            Formula::Quant(*q, fresh, Box::new(body))
        }
    }
}

/// Converts `f` to prenex form.
///
/// Implications become `¬a ∨ b`, quantifiers are pulled left to right with
/// like-kind blocks merged so the alternation count is minimal, and bound
/// variables are renamed to the lowest free-variable-avoiding `x_i` in
/// prefix order.
pub fn prenex(f: &Formula) -> PrenexForm {
    let free: BTreeSet<Var> = f.free_vars();
    let g = eliminate_implications(f);
    let mut next = g.max_var().map_or(0, |v| v.0 + 1);
    let g = rename_apart(&g, &mut next, &mut BTreeMap::new());

    let c = cost(&g);
    let k = if c.e <= c.a { LevelKind::E } else { LevelKind::A };
    let (blocks, matrix) = build(&g, k);

    let mut prefix = Vec::new();
    let mut kind = k;
    for b in blocks {
        for v in b {
            prefix.push((kind.quant(), v));
        }
        kind = kind.dual();
    }

    // canonical names
    let mut map = BTreeMap::new();
    let mut idx = 0u32;
    for (_, v) in prefix.iter_mut() {
        while free.contains(&Var(idx)) {
            idx += 1;
        }
        map.insert(*v, Var(idx));
        *v = Var(idx);
        idx += 1;
    }
    let matrix = matrix.rename_free(&|v| *map.get(&v).unwrap_or(&v));
    PrenexForm { prefix, matrix }
}

/// Minimal level of `f` under the cumulative convention; ties between `E(n)`
/// and `A(n)` resolve to `E(n)`.
pub fn classify(f: &Formula) -> Level {
    prenex(f).level()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::parse::parse_formula;
    use crate::formulas::syntax::Vocabulary;

    fn p(text: &str, vocab: &str) -> Formula {
        parse_formula(text, &Vocabulary::parse(vocab).unwrap()).unwrap()
    }

    #[test]
    fn negated_existential() {
        let f = p("(not (exists x5 (P x5)))", "P/1");
        assert_eq!(prenex(&f).to_string(), "(forall x0 (not (P x0)))");
    }

    #[test]
    fn block_merge_of_conjuncts() {
        let f = p("(and (exists x0 (P x0)) (exists x1 (not (P x1))))", "P/1");
        assert_eq!(prenex(&f).to_string(), "(exists x0 (exists x1 (and (P x0) (not (P x1)))))");
        assert_eq!(classify(&f), Level::e(1));
    }

    #[test]
    fn forall_exists_is_a2() {
        let f = p("(forall x0 (exists x1 (R x0 x1)))", "R/2");
        assert_eq!(classify(&f), Level::a(2));
    }

    #[test]
    fn quantifier_free_sentence_is_e0() {
        assert_eq!(classify(&Formula::truth()), Level::e(0));
        assert_eq!(classify(&Formula::not(Formula::falsity())), Level::e(0));
    }

    #[test]
    fn interleaving_beats_left_to_right() {
        // ∃x(∀y Q ∧ ∃z ∀u R) pulls as ∃x∃z∀y∀u, not ∃x∀y∃z∀u
        let f = p("(exists x0 (and (forall x1 (R x0 x1)) (exists x2 (forall x3 (R x2 x3)))))", "R/2");
        assert_eq!(classify(&f), Level::e(2));
    }

    #[test]
    fn implication_flips_antecedent() {
        let f = p("(implies (exists x0 (P x0)) (forall x1 (P x1)))", "P/1");
        let pf = prenex(&f);
        assert_eq!(pf.level(), Level::a(1));
        assert_eq!(pf.to_string(), "(forall x0 (forall x1 (or (not (P x0)) (P x1))))");
    }

    #[test]
    fn renaming_avoids_free_variables() {
        let f = p("(exists x0 (R x0 x1))", "R/2");
        assert_eq!(prenex(&f).to_string(), "(exists x0 (R x0 x1))");
        let f = p("(exists x7 (R x7 x0))", "R/2");
        assert_eq!(prenex(&f).to_string(), "(exists x1 (R x1 x0))");
    }

    #[test]
    fn shadowed_variables_are_separated() {
        let f = p("(exists x0 (and (P x0) (forall x0 (P x0))))", "P/1");
        let pf = prenex(&f);
        assert_eq!(pf.to_string(), "(exists x0 (forall x1 (and (P x0) (P x1))))");
    }
}
