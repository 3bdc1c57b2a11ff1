//! A budgeted model search for `∃x̄ ∀ȳ θ` sentences, independent of
//! [`find_finite_model`](crate::formulas::find_finite_model): it grounds the
//! universal block over a fixed universe and backtracks over diagram cells,
//! pruning as soon as some ground instance is already false.

use std::collections::HashMap;

use crate::formulas::{prenex, FiniteStructure, Formula, Quant, Var, Vocabulary};
use crate::Verdict;

/// Outcome of a bounded search.
#[derive(Clone, Debug)]
pub enum Search {
    Model(FiniteStructure),
    NoModel,
    /// The node budget ran out before the search finished.
    Unknown,
}

enum Ground {
    Const(bool),
    Cell(usize),
    Not(Box<Ground>),
    And(Vec<Ground>),
    Or(Vec<Ground>),
}

impl Ground {
    fn eval(&self, cells: &[Option<bool>]) -> Verdict {
        match self {
            Ground::Const(b) => Verdict::from_bool(*b),
            Ground::Cell(i) => cells[*i].map_or(Verdict::Unknown, Verdict::from_bool),
            Ground::Not(g) => !g.eval(cells),
            Ground::And(gs) => gs.iter().fold(Verdict::True, |v, g| v.and(g.eval(cells))),
            Ground::Or(gs) => gs.iter().fold(Verdict::False, |v, g| v.or(g.eval(cells))),
        }
    }
}

struct Grounder<'a> {
    vocab: &'a Vocabulary,
    cells: HashMap<(usize, Vec<usize>), usize>,
    keys: Vec<(usize, Vec<usize>)>,
}

impl Grounder<'_> {
    fn ground(&mut self, f: &Formula, asg: &HashMap<Var, usize>) -> Ground {
        match f {
            Formula::Atom { rel, args } => {
                let sym = self.vocab.index_of(rel).expect("symbol in vocabulary");
                let tuple: Vec<usize> = args.iter().map(|v| asg[v]).collect();
                let key = (sym, tuple);
                let next = self.keys.len();
                let id = *self.cells.entry(key.clone()).or_insert(next);
                if id == next {
                    self.keys.push(key);
                }
                Ground::Cell(id)
            }
            Formula::Eq(a, b) => Ground::Const(asg[a] == asg[b]),
            Formula::Not(g) => Ground::Not(Box::new(self.ground(g, asg))),
            Formula::And(gs) => Ground::And(gs.iter().map(|g| self.ground(g, asg)).collect()),
            Formula::Or(gs) => Ground::Or(gs.iter().map(|g| self.ground(g, asg)).collect()),
            Formula::Implies(a, b) => Ground::Or(vec![Ground::Not(Box::new(self.ground(a, asg))), self.ground(b, asg)]),
            Formula::Quant(..) => unreachable!("matrix is quantifier-free"),
        }
    }
}

// Witness tuples up to renaming of elements: each coordinate is at most one
// more than the largest used so far.
fn witness_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(k);
    fn go(k: usize, n: usize, buf: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if buf.len() == k {
            out.push(buf.clone());
            return;
        }
        let bound = buf.iter().max().map_or(0, |&m| m + 1).min(n - 1);
        for v in 0..=bound {
            buf.push(v);
            go(k, n, buf, out);
            buf.pop();
        }
    }
    go(k, n, &mut buf, &mut out);
    out
}

fn tuples(k: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(k as u32)).map(move |mut c| {
        (0..k)
            .map(|_| {
                let d = c % n;
                c /= n;
                d
            })
            .collect()
    })
}

/// Searches sizes `1..=max_size` for a model of an `E(2)` sentence. Returns
/// `None` when the sentence is not of that shape.
pub fn search_sigma2(f: &Formula, vocab: &Vocabulary, max_size: usize, budget: usize) -> Option<Search> {
    let pf = prenex(f);
    let split = pf.prefix.iter().take_while(|(q, _)| *q == Quant::Exists).count();
    if pf.prefix[split..].iter().any(|(q, _)| *q == Quant::Exists) {
        return None;
    }
    let xs: Vec<Var> = pf.prefix[..split].iter().map(|&(_, v)| v).collect();
    let ys: Vec<Var> = pf.prefix[split..].iter().map(|&(_, v)| v).collect();
    let mut nodes = 0usize;
    for n in 1..=max_size {
        for w in witness_tuples(xs.len(), n) {
            let mut g = Grounder { vocab, cells: HashMap::new(), keys: Vec::new() };
            let instances: Vec<Ground> = tuples(ys.len(), n)
                .map(|ytuple| {
                    let asg: HashMap<Var, usize> =
                        xs.iter().copied().zip(w.iter().copied()).chain(ys.iter().copied().zip(ytuple)).collect();
                    g.ground(&pf.matrix, &asg)
                })
                .collect();
            let mut cells = vec![None; g.keys.len()];
            match backtrack(&instances, &mut cells, 0, &mut nodes, budget) {
                Some(true) => {
                    let mut s = FiniteStructure::empty(vocab, n).expect("positive size");
                    for (i, (sym, t)) in g.keys.iter().enumerate() {
                        s.set(*sym, t, cells[i] == Some(true));
                    }
                    return Some(Search::Model(s));
                }
                Some(false) => {}
                None => return Some(Search::Unknown),
            }
        }
    }
    Some(Search::NoModel)
}

fn backtrack(
    instances: &[Ground],
    cells: &mut Vec<Option<bool>>,
    next: usize,
    nodes: &mut usize,
    budget: usize,
) -> Option<bool> {
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    let mut all_true = true;
    for g in instances {
        match g.eval(cells) {
            Verdict::False => return Some(false),
            Verdict::Unknown => all_true = false,
            Verdict::True => {}
        }
    }
    if all_true {
        return Some(true);
    }
    for b in [false, true] {
        cells[next] = Some(b);
        match backtrack(instances, cells, next + 1, nodes, budget) {
            Some(false) => {}
            found => return found,
        }
    }
    cells[next] = None;
    Some(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{holds, parse_formula};

    #[test]
    fn finds_and_refutes() {
        let v = Vocabulary::parse("R/2").unwrap();
        let f = parse_formula("(exists x0 (exists x1 (and (not (= x0 x1)) (forall x2 (R x2 x0)))))", &v).unwrap();
        let Some(Search::Model(m)) = search_sigma2(&f, &v, 4, 100_000) else { panic!() };
        assert_eq!(m.size(), 2);
        assert!(holds(&f, &m).unwrap());
        let g = parse_formula("(exists x0 (forall x1 (and (R x0 x1) (not (R x1 x0)))))", &v).unwrap();
        assert!(matches!(search_sigma2(&g, &v, 4, 100_000), Some(Search::NoModel)));
        let h = parse_formula("(forall x0 (exists x1 (R x0 x1)))", &v).unwrap();
        assert!(search_sigma2(&h, &v, 3, 100).is_none());
    }

    #[test]
    fn witness_tuples_are_canonical() {
        assert_eq!(witness_tuples(2, 3), vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(witness_tuples(3, 2).len(), 4);
        assert_eq!(witness_tuples(0, 2), vec![Vec::<usize>::new()]);
    }
}
