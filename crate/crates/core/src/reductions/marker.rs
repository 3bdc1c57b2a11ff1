//! A limit-coded Marker extension.
//!
//! Each input element becomes an element tagged `Orig`. Each tuple `ā` of
//! each input symbol `R` gets a gadget element `g`, tagged `Pos` if `R(ā)`
//! holds and `Neg` otherwise, with `L_R_i(g, a_i)` linking it to the
//! arguments. Gadgets for tuples whose largest element is `m` are appended
//! one stage late, when element `m+1` arrives, so the recovered structure is
//! a guess that converges rather than a finished copy at every stage.

use std::collections::HashSet;
use std::sync::Arc;

use crate::diagrams::{for_each_rank_tuple, Presentation};
use crate::formulas::{FiniteStructure, Formula, Quant, Var, Vocabulary};
use crate::transducers::{DiagramStaged, ElementRun, SharedTransducer};

const ORIG: usize = 0;
const POS: usize = 1;
const NEG: usize = 2;

pub fn link_name(rel: &str, i: usize) -> String {
    format!("L_{rel}_{i}")
}

/// `Orig/1, Pos/1, Neg/1` followed by `L_R_i/2` for every input symbol `R`
/// and argument position `i`.
pub fn marker_vocabulary(input: &Vocabulary) -> Vocabulary {
    let mut syms: Vec<(String, usize)> = vec![("Orig".into(), 1), ("Pos".into(), 1), ("Neg".into(), 1)];
    for s in input.symbols() {
        for i in 0..s.arity {
            syms.push((link_name(&s.name, i), 2));
        }
    }
    Vocabulary::new(syms).expect("link names are fresh")
}

fn link_offsets(input: &Vocabulary) -> Vec<usize> {
    let mut next = 3;
    input
        .symbols()
        .iter()
        .map(|s| {
            let at = next;
            next += s.arity;
            at
        })
        .collect()
}

struct MarkerRun {
    input: Vocabulary,
    links: Vec<usize>,
    orig: Vec<usize>,
    previous: HashSet<(usize, Vec<usize>)>,
}

impl MarkerRun {
    fn gadgets(&mut self, m: usize, out: &mut Presentation) {
        for sym in 0..self.input.len() {
            let base = self.links[sym];
            let (orig, previous) = (&self.orig, &self.previous);
            for_each_rank_tuple(m, self.input.arity(sym), &mut |t| {
                let g = out.add_element();
                let holds = previous.contains(&(sym, t.to_vec()));
                out.add_fact(if holds { POS } else { NEG }, &[g]);
                for (i, &a) in t.iter().enumerate() {
                    out.add_fact(base + i, &[g, orig[a]]);
                }
            });
        }
    }
}

impl ElementRun for MarkerRun {
    fn element(&mut self, m: usize, facts: &[(usize, Vec<usize>)], out: &mut Presentation) {
        let o = out.add_element();
        out.add_fact(ORIG, &[o]);
        self.orig.push(o);
        if m > 0 {
            self.gadgets(m - 1, out);
        }
        self.previous = facts.iter().cloned().collect();
    }

    fn finish(&mut self, out: &mut Presentation) {
        if let Some(last) = self.orig.len().checked_sub(1) {
            self.gadgets(last, out);
        }
    }
}

pub fn marker_construction(input: &Vocabulary) -> DiagramStaged {
    let (inp, links) = (input.clone(), link_offsets(input));
    DiagramStaged::new("marker", input.clone(), marker_vocabulary(input), 1, move || {
        Box::new(MarkerRun { input: inp.clone(), links: links.clone(), orig: Vec::new(), previous: HashSet::new() })
    })
}

pub fn marker_extend(input: &Vocabulary) -> SharedTransducer {
    Arc::new(marker_construction(input))
}

/// Reads the original structure back from a marker presentation.
pub struct MarkerRecovery {
    input: Vocabulary,
    links: Vec<usize>,
}

impl MarkerRecovery {
    pub fn new(input: &Vocabulary) -> Self {
        MarkerRecovery { input: input.clone(), links: link_offsets(input) }
    }

    /// The guess after `stage` closed stages: the `Orig` elements in order,
    /// with `R(ā)` holding iff a `Pos` gadget for `ā` is present. `None`
    /// before the first original element.
    pub fn guess(&self, pres: &Presentation, stage: usize) -> Option<FiniteStructure> {
        self.guess_prefix(pres, pres.elements_after(stage))
    }

    /// The guess from the first `n` elements of the presentation.
    pub fn guess_prefix(&self, pres: &Presentation, n: usize) -> Option<FiniteStructure> {
        let mut index = vec![usize::MAX; n];
        let mut count = 0;
        for (e, slot) in index.iter_mut().enumerate() {
            if pres.facts_with_max(e).any(|(s, t)| s == ORIG && t == [e as u32]) {
                *slot = count;
                count += 1;
            }
        }
        let mut out = FiniteStructure::empty(&self.input, count).ok()?;
        for g in 0..n {
            if !pres.facts_with_max(g).any(|(s, t)| s == POS && t == [g as u32]) {
                continue;
            }
            for sym in 0..self.input.len() {
                let base = self.links[sym];
                let mut tuple = vec![usize::MAX; self.input.arity(sym)];
                for (s, t) in pres.facts_with_max(g) {
                    if (base..base + tuple.len()).contains(&s) && t[0] == g as u32 {
                        tuple[s - base] = index[t[1] as usize];
                    }
                }
                if tuple.iter().all(|&a| a < count) {
                    out.set(sym, &tuple, true);
                }
            }
        }
        Some(out)
    }
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => {
            if negate {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => nnf(g, !negate),
        Formula::And(fs) if negate => Formula::Or(fs.iter().map(|g| nnf(g, true)).collect()),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| nnf(g, false)).collect()),
        Formula::Or(fs) if negate => Formula::And(fs.iter().map(|g| nnf(g, true)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| nnf(g, false)).collect()),
        Formula::Implies(a, b) => {
            if negate {
                Formula::and([nnf(a, false), nnf(b, true)])
            } else {
                Formula::or([nnf(a, true), nnf(b, false)])
            }
        }
        Formula::Quant(q, v, g) => {
            let q = if negate { q.dual() } else { *q };
            Formula::Quant(q, *v, Box::new(nnf(g, negate)))
        }
    }
}

/// Translates a sentence about the original structure into one about its
/// marker extension: quantifiers range over `Orig`, and a (negated) atom
/// `R(x̄)` becomes `∃g (Pos(g) ∧ ⋀ L_R_i(g, x_i))` (with `Neg` in place of
/// `Pos`).
pub fn marker_lift(f: &Formula) -> Formula {
    let mut fresh = f.max_var().map_or(0, |v| v.0 + 1);
    lift(&nnf(f, false), &mut fresh)
}

fn lift(f: &Formula, fresh: &mut u32) -> Formula {
    let gadget = |rel: &str, args: &[Var], species: &str, fresh: &mut u32| {
        let g = *fresh;
        *fresh += 1;
        let mut parts = vec![Formula::atom(species, &[g])];
        for (i, a) in args.iter().enumerate() {
            parts.push(Formula::atom(&link_name(rel, i), &[g, a.0]));
        }
        Formula::exists(g, Formula::and(parts))
    };
    match f {
        Formula::Atom { rel, args } => gadget(rel, args, "Pos", fresh),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom { rel, args } => gadget(rel, args, "Neg", fresh),
            other => Formula::not(lift(other, fresh)),
        },
        Formula::Eq(..) => f.clone(),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| lift(g, fresh)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| lift(g, fresh)).collect()),
        Formula::Implies(a, b) => Formula::implies(lift(a, fresh), lift(b, fresh)),
        Formula::Quant(q, v, g) => {
            let orig = Formula::atom("Orig", &[v.0]);
            let body = lift(g, fresh);
            let body = match q {
                Quant::Exists => Formula::and([orig, body]),
                Quant::Forall => Formula::implies(orig, body),
            };
            Formula::Quant(*q, *v, Box::new(body))
        }
    }
}

/// Axioms saying a structure is a marker extension: the three sorts are
/// disjoint, every gadget is linked, and every tuple of originals has a
/// gadget of one species.
pub fn marker_structure_axioms(input: &Vocabulary) -> Vec<Formula> {
    let x = 0;
    let mut out = vec![
        Formula::forall(x, Formula::not(Formula::and([Formula::atom("Orig", &[x]), Formula::atom("Pos", &[x])]))),
        Formula::forall(x, Formula::not(Formula::and([Formula::atom("Orig", &[x]), Formula::atom("Neg", &[x])]))),
        Formula::forall(x, Formula::not(Formula::and([Formula::atom("Pos", &[x]), Formula::atom("Neg", &[x])]))),
    ];
    for s in input.symbols() {
        let k = s.arity as u32;
        let g = k;
        let mut body = vec![Formula::or([Formula::atom("Pos", &[g]), Formula::atom("Neg", &[g])])];
        body.extend((0..k).map(|i| Formula::atom(&link_name(&s.name, i as usize), &[g, i])));
        let mut f = Formula::implies(
            Formula::and((0..k).map(|i| Formula::atom("Orig", &[i]))),
            Formula::exists(g, Formula::and(body)),
        );
        for i in (0..k).rev() {
            f = Formula::forall(i, f);
        }
        out.push(f);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{FiniteSource, StructureStream};

    #[test]
    fn round_trip_of_a_single_edge() {
        let v = Vocabulary::parse("R/2").unwrap();
        let s = FiniteStructure::parse(&v, "size=2; R 0 1").unwrap();
        let mut st = marker_construction(&v).stream(StructureStream::new(FiniteSource::new(s.clone()))).unwrap();
        st.run_to(10);
        let rec = MarkerRecovery::new(&v);
        let last = st.stages();
        assert_eq!(rec.guess(st.presentation(), last), Some(s));
        // before the delayed gadgets arrive, the guess for element 1 is empty
        let early = rec.guess(st.presentation(), 2).unwrap();
        assert_eq!(early.size(), 2);
        assert!(!early.holds(0, &[0, 1]));
    }

    #[test]
    fn vocabulary_layout() {
        let v = Vocabulary::parse("R/2,P/1").unwrap();
        assert_eq!(marker_vocabulary(&v).to_string(), "Orig/1,Pos/1,Neg/1,L_R_0/2,L_R_1/2,L_P_0/2");
    }
}
