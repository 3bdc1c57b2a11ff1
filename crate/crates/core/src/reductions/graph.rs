//! Coding structures as graphs.
//!
//! An element becomes a vertex on a triangle with a pendant vertex. A fact
//! `R_j(a_0, …, a_{k-1})` becomes a tuple vertex on a cycle of length
//! `4 + j`, joined to the vertex of `a_i` by a path of length `base + i`,
//! where `base = |vocabulary| + 4` exceeds every cycle length.

use std::sync::Arc;

use thiserror::Error;

use crate::diagrams::Presentation;
use crate::formulas::{FiniteStructure, Vocabulary};
use crate::transducers::{DiagramStaged, ElementRun, SharedTransducer};

pub const DEFAULT_MAX_ARITY: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("symbol `{name}` has arity {arity}, above the bound {bound}")]
    ArityAboveBound { name: String, arity: usize, bound: usize },
    #[error("not a graph code: {0}")]
    Malformed(String),
}

pub fn graph_vocabulary() -> Vocabulary {
    Vocabulary::parse("E/2").expect("valid vocabulary")
}

fn base(vocab: &Vocabulary) -> usize {
    vocab.len() + 4
}

struct GraphRun {
    vocab: Vocabulary,
    vertex: Vec<usize>,
}

fn edge(out: &mut Presentation, a: usize, b: usize) {
    out.add_symmetric(0, a, b);
}

impl ElementRun for GraphRun {
    fn element(&mut self, _m: usize, facts: &[(usize, Vec<usize>)], out: &mut Presentation) {
        let v = out.add_element();
        let (t1, t2, p) = (out.add_element(), out.add_element(), out.add_element());
        edge(out, v, t1);
        edge(out, t1, t2);
        edge(out, t2, v);
        edge(out, v, p);
        self.vertex.push(v);
        for (sym, t) in facts {
            let u = out.add_element();
            let mut prev = u;
            for _ in 0..3 + sym {
                let c = out.add_element();
                edge(out, prev, c);
                prev = c;
            }
            edge(out, prev, u);
            for (i, &a) in t.iter().enumerate() {
                let mut prev = u;
                for _ in 1..base(&self.vocab) + i {
                    let w = out.add_element();
                    edge(out, prev, w);
                    prev = w;
                }
                edge(out, prev, self.vertex[a]);
            }
        }
    }
}

pub fn graph_construction(vocab: &Vocabulary, max_arity: usize) -> Result<DiagramStaged, GraphError> {
    if let Some(s) = vocab.symbols().iter().find(|s| s.arity > max_arity) {
        return Err(GraphError::ArityAboveBound { name: s.name.clone(), arity: s.arity, bound: max_arity });
    }
    let v = vocab.clone();
    Ok(DiagramStaged::new("tograph", vocab.clone(), graph_vocabulary(), 4, move || {
        Box::new(GraphRun { vocab: v.clone(), vertex: Vec::new() })
    }))
}

pub fn to_graph(vocab: &Vocabulary, max_arity: usize) -> Result<SharedTransducer, GraphError> {
    Ok(Arc::new(graph_construction(vocab, max_arity)?))
}

/// Inverts the coding on a finite graph made of whole gadgets (such as any
/// stage of a coded stream).
pub fn decode_graph(g: &FiniteStructure, vocab: &Vocabulary) -> Result<FiniteStructure, GraphError> {
    let bad = |msg: String| GraphError::Malformed(msg);
    let n = g.size();
    let adj: Vec<Vec<usize>> = (0..n).map(|a| (0..n).filter(|&b| g.holds(0, &[a, b])).collect()).collect();
    for a in 0..n {
        if g.holds(0, &[a, a]) {
            return Err(bad(format!("loop at {a}")));
        }
    }
    let deg = |v: usize| adj[v].len();
    let is_element = |v: usize| {
        deg(v) >= 3
            && adj[v].iter().any(|&p| deg(p) == 1)
            && adj[v].iter().any(|&a| deg(a) == 2 && adj[a].iter().any(|&b| b != v && adj[v].contains(&b)))
    };
    let mut index = vec![usize::MAX; n];
    let mut count = 0;
    for (v, slot) in index.iter_mut().enumerate() {
        if is_element(v) {
            *slot = count;
            count += 1;
        }
    }
    let mut out = FiniteStructure::empty(vocab, count.max(1)).map_err(|e| bad(e.to_string()))?;
    if count == 0 {
        return Err(bad("no element gadgets".into()));
    }
    let base = base(vocab);
    for u in 0..n {
        if deg(u) < 3 || index[u] != usize::MAX {
            continue;
        }
        let mut cycle = None;
        let mut args: Vec<Option<usize>> = Vec::new();
        for &start in &adj[u] {
            let (mut prev, mut cur, mut len) = (u, start, 1usize);
            while deg(cur) == 2 && cur != u {
                let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                prev = cur;
                cur = next;
                len += 1;
            }
            if cur == u {
                cycle = Some(len);
            } else if index[cur] != usize::MAX {
                let i = len.checked_sub(base).ok_or_else(|| bad(format!("short path from {u}")))?;
                if args.len() <= i {
                    args.resize(i + 1, None);
                }
                args[i] = Some(index[cur]);
            } else {
                return Err(bad(format!("path from {u} ends at {cur}")));
            }
        }
        let sym = cycle.and_then(|c| c.checked_sub(4)).ok_or_else(|| bad(format!("no tag cycle at {u}")))?;
        if sym >= vocab.len() || args.len() != vocab.arity(sym) {
            return Err(bad(format!("tuple vertex {u} does not fit the vocabulary")));
        }
        let tuple: Option<Vec<usize>> = args.into_iter().collect();
        let tuple = tuple.ok_or_else(|| bad(format!("missing argument at {u}")))?;
        out.set(sym, &tuple, true);
    }
    Ok(out)
}
