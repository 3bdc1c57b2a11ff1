//! Stagewise presentations and the streams that grow them.
//!
//! A [`Presentation`] records elements in order of appearance together with
//! the facts that hold among them. Elements are appended in stages, and every
//! fact committed during a stage must mention an element appended during
//! that stage. Consequently, once the stage that appends element `m` closes,
//! the diagram bits of rank `m` can never change.

use thiserror::Error;

use super::enumeration::{atom_in_rank, bits_for_size, offset_in_rank, rank_len};
use super::prefix::DiagramPrefix;
use crate::formulas::{FiniteStructure, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FactError {
    #[error("fact `{rel}` has arity {arity}, got {len} arguments")]
    Arity { rel: String, arity: usize, len: usize },
    #[error("fact `{rel}` mentions element {elem}, but only {count} elements exist")]
    Unknown { rel: String, elem: usize, count: usize },
    #[error("fact `{rel}` {tuple:?} mentions no element of the open stage (which starts at {open_from})")]
    Settled { rel: String, tuple: Vec<usize>, open_from: usize },
}

/// Elements and facts of a structure under construction.
#[derive(Clone, Debug)]
pub struct Presentation {
    vocab: Vocabulary,
    // facts grouped by their largest element, flattened as [sym, args..]*
    by_max: Vec<Vec<u32>>,
    stage_ends: Vec<usize>,
    open_from: usize,
}

impl Presentation {
    pub fn new(vocab: &Vocabulary) -> Self {
        Presentation { vocab: vocab.clone(), by_max: Vec::new(), stage_ends: Vec::new(), open_from: 0 }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Elements appended so far, including those of the open stage.
    pub fn len(&self) -> usize {
        self.by_max.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_max.is_empty()
    }

    /// Number of closed stages.
    pub fn stages(&self) -> usize {
        self.stage_ends.len()
    }

    /// Elements whose diagram bits are final.
    pub fn settled(&self) -> usize {
        self.open_from
    }

    /// Element count after `s` closed stages (`s = 0` gives 0).
    pub fn elements_after(&self, s: usize) -> usize {
        if s == 0 {
            0
        } else {
            self.stage_ends[s - 1]
        }
    }

    pub fn stage_ends(&self) -> &[usize] {
        &self.stage_ends
    }

    pub fn add_element(&mut self) -> usize {
        self.by_max.push(Vec::new());
        self.by_max.len() - 1
    }

    pub fn add_elements(&mut self, n: usize) -> std::ops::Range<usize> {
        let start = self.len();
        for _ in 0..n {
            self.add_element();
        }
        start..self.len()
    }

    pub fn try_add_fact(&mut self, sym: usize, tuple: &[usize]) -> Result<(), FactError> {
        let arity = self.vocab.arity(sym);
        let rel = || self.vocab.name(sym).to_string();
        if tuple.len() != arity {
            return Err(FactError::Arity { rel: rel(), arity, len: tuple.len() });
        }
        let max = *tuple.iter().max().expect("arity >= 1");
        if max >= self.len() {
            return Err(FactError::Unknown { rel: rel(), elem: max, count: self.len() });
        }
        if max < self.open_from {
            return Err(FactError::Settled { rel: rel(), tuple: tuple.to_vec(), open_from: self.open_from });
        }
        let slot = &mut self.by_max[max];
        slot.push(sym as u32);
        slot.extend(tuple.iter().map(|&e| e as u32));
        Ok(())
    }

    /// Panics on an illegal fact; constructions use this.
    pub fn add_fact(&mut self, sym: usize, tuple: &[usize]) {
        if let Err(e) = self.try_add_fact(sym, tuple) {
            panic!("{e}");
        }
    }

    /// Adds `R(a,b)` and `R(b,a)`.
    pub fn add_symmetric(&mut self, sym: usize, a: usize, b: usize) {
        self.add_fact(sym, &[a, b]);
        if a != b {
            self.add_fact(sym, &[b, a]);
        }
    }

    pub fn close_stage(&mut self) {
        self.stage_ends.push(self.len());
        self.open_from = self.len();
    }

    /// Facts whose largest element is `m`, as `(symbol, tuple)` pairs.
    pub fn facts_with_max(&self, m: usize) -> impl Iterator<Item = (usize, &[u32])> + '_ {
        let data = &self.by_max[m];
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= data.len() {
                return None;
            }
            let sym = data[i] as usize;
            let arity = self.vocab.arity(sym);
            let t = &data[i + 1..i + 1 + arity];
            i += 1 + arity;
            Some((sym, t))
        })
    }

    /// All facts among the first `n` elements.
    pub fn facts_below(&self, n: usize) -> impl Iterator<Item = (usize, &[u32])> + '_ {
        (0..n.min(self.len())).flat_map(move |m| self.facts_with_max(m))
    }

    /// The structure on the first `n` elements (`n >= 1`).
    pub fn structure(&self, n: usize) -> FiniteStructure {
        assert!(n >= 1 && n <= self.len(), "structure on {n} of {} elements", self.len());
        let mut s = FiniteStructure::empty(&self.vocab, n).expect("n >= 1");
        let mut buf = Vec::new();
        for (sym, t) in self.facts_below(n) {
            buf.clear();
            buf.extend(t.iter().map(|&e| e as usize));
            s.set(sym, &buf, true);
        }
        s
    }

    /// Appends the diagram bits of rank `m` to `out`.
    pub fn push_rank_bits(&self, m: usize, out: &mut Vec<bool>) {
        let start = out.len();
        out.resize(start + rank_len(&self.vocab, m), false);
        let mut buf = Vec::new();
        for (sym, t) in self.facts_with_max(m) {
            buf.clear();
            buf.extend(t.iter().map(|&e| e as usize));
            out[start + offset_in_rank(&self.vocab, sym, &buf)] = true;
        }
    }

    /// Diagram of the first `n` elements.
    pub fn diagram(&self, n: usize) -> DiagramPrefix {
        let mut bits = Vec::with_capacity(bits_for_size(&self.vocab, n));
        for m in 0..n {
            self.push_rank_bits(m, &mut bits);
        }
        DiagramPrefix::new(&self.vocab, bits)
    }

    /// Reads a diagram prefix back, one element per stage. Trailing bits of an
    /// incomplete rank are ignored.
    pub fn from_prefix(p: &DiagramPrefix) -> Presentation {
        let mut out = Presentation::new(p.vocabulary());
        let mut reader = DiagramReader::new(p.vocabulary());
        for &b in p.bits() {
            if let Some(facts) = reader.push(b) {
                out.add_element();
                for (sym, t) in facts {
                    out.add_fact(sym, &t);
                }
                out.close_stage();
            }
        }
        out
    }
}

/// Incremental decoder from diagram bits to per-element facts.
#[derive(Clone, Debug)]
pub struct DiagramReader {
    vocab: Vocabulary,
    rank: usize,
    pos: usize,
    len: usize,
    pending: Vec<(usize, Vec<usize>)>,
}

impl DiagramReader {
    pub fn new(vocab: &Vocabulary) -> Self {
        assert!(!vocab.is_empty(), "diagrams need a nonempty vocabulary");
        DiagramReader { vocab: vocab.clone(), rank: 0, pos: 0, len: rank_len(vocab, 0), pending: Vec::new() }
    }

    /// Elements fully read so far.
    pub fn elements(&self) -> usize {
        self.rank
    }

    /// Feeds one bit; when it completes the rank block of element `m`,
    /// returns the facts whose largest element is `m`.
    pub fn push(&mut self, bit: bool) -> Option<Vec<(usize, Vec<usize>)>> {
        if bit {
            self.pending.push(atom_in_rank(&self.vocab, self.rank, self.pos));
        }
        self.pos += 1;
        if self.pos < self.len {
            return None;
        }
        self.rank += 1;
        self.pos = 0;
        self.len = rank_len(&self.vocab, self.rank);
        Some(std::mem::take(&mut self.pending))
    }
}

/// Something that performs stages of a construction.
pub trait StreamSource: Send {
    fn vocabulary(&self) -> Vocabulary;

    /// Performs one stage, appending elements and facts to `out` (the stage
    /// is closed by the caller). Returns `false`, without touching `out`, if
    /// the construction has nothing more to add.
    fn stage(&mut self, out: &mut Presentation) -> bool;
}

/// A structure with universe ω given stage by stage.
pub struct StructureStream {
    source: Box<dyn StreamSource>,
    pres: Presentation,
    exhausted: bool,
}

impl StructureStream {
    pub fn new(source: impl StreamSource + 'static) -> Self {
        Self::from_boxed(Box::new(source))
    }

    pub fn from_boxed(source: Box<dyn StreamSource>) -> Self {
        let pres = Presentation::new(&source.vocabulary());
        StructureStream { source, pres, exhausted: false }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        self.pres.vocabulary()
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn stages(&self) -> usize {
        self.pres.stages()
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Runs one stage. Returns `false` once the source is exhausted.
    pub fn advance(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        if self.source.stage(&mut self.pres) {
            self.pres.close_stage();
            true
        } else {
            self.exhausted = true;
            false
        }
    }

    /// Runs until `stages` stages are closed or the source is exhausted.
    pub fn run_to(&mut self, stages: usize) -> usize {
        while self.stages() < stages && self.advance() {}
        self.stages()
    }

    /// Runs until at least `n` elements are settled, giving up after
    /// `max_stages` total stages.
    pub fn ensure_settled(&mut self, n: usize, max_stages: usize) -> bool {
        while self.pres.settled() < n {
            if self.stages() >= max_stages || !self.advance() {
                return false;
            }
        }
        true
    }

    /// The structure on `{0, …, n-1}`, running further stages if needed.
    pub fn stage_view(&mut self, n: usize, max_stages: usize) -> Option<FiniteStructure> {
        (n >= 1 && self.ensure_settled(n, max_stages)).then(|| self.pres.structure(n))
    }

    /// The first `nbits` diagram bits, running further stages if needed.
    pub fn bits(&mut self, nbits: usize, max_stages: usize) -> Option<DiagramPrefix> {
        let vocab = self.vocabulary().clone();
        let mut n = 0;
        while bits_for_size(&vocab, n) < nbits {
            n += 1;
        }
        if !self.ensure_settled(n, max_stages) {
            return None;
        }
        let mut p = self.pres.diagram(n);
        p.truncate(nbits);
        Some(p)
    }
}

/// Streams a finite structure, one element per stage; exhausted afterwards.
pub struct FiniteSource {
    s: FiniteStructure,
    next: usize,
}

impl FiniteSource {
    pub fn new(s: FiniteStructure) -> Self {
        FiniteSource { s, next: 0 }
    }
}

impl StreamSource for FiniteSource {
    fn vocabulary(&self) -> Vocabulary {
        self.s.vocabulary().clone()
    }

    fn stage(&mut self, out: &mut Presentation) -> bool {
        if self.next == self.s.size() {
            return false;
        }
        let m = out.add_element();
        for sym in 0..self.s.vocabulary().len() {
            super::prefix::for_each_rank_tuple(m, self.s.vocabulary().arity(sym), &mut |t| {
                if self.s.holds(sym, t) {
                    out.add_fact(sym, t);
                }
            });
        }
        self.next += 1;
        true
    }
}

/// A structure stream of finitely many bits, one element per stage.
pub struct PrefixSource {
    pres: Presentation,
    next: usize,
}

impl PrefixSource {
    pub fn new(p: &DiagramPrefix) -> Self {
        PrefixSource { pres: Presentation::from_prefix(p), next: 0 }
    }
}

impl StreamSource for PrefixSource {
    fn vocabulary(&self) -> Vocabulary {
        self.pres.vocabulary().clone()
    }

    fn stage(&mut self, out: &mut Presentation) -> bool {
        if self.next == self.pres.len() {
            return false;
        }
        let m = out.add_element();
        let facts: Vec<(usize, Vec<usize>)> =
            self.pres.facts_with_max(m).map(|(s, t)| (s, t.iter().map(|&e| e as usize).collect())).collect();
        for (sym, t) in facts {
            out.add_fact(sym, &t);
        }
        self.next += 1;
        true
    }
}
