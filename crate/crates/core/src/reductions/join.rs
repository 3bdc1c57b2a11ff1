use std::sync::Arc;

use crate::diagrams::{Presentation, StreamSource, StructureStream};
use crate::formulas::{Vocabulary, VocabularyError};
use crate::transducers::{
    stages_for, BitStaged, DiagramStaged, ElementRun, Machine, SharedTransducer, StagedRun, Transducer,
};

/// `A`'s symbols, then `B`'s, then `U/1`.
pub fn join_vocabulary(a: &Vocabulary, b: &Vocabulary) -> Result<Vocabulary, VocabularyError> {
    a.disjoint_union(b)?.disjoint_union(&Vocabulary::parse("U/1")?)
}

/// Interleaves settled elements: output `2i` is `A`'s element `i` (with
/// `U`), output `2i+1` is `B`'s element `i`.
struct Merger {
    a_map: Vec<usize>,
    b_map: Vec<usize>,
    b_offset: usize,
    u: usize,
}

impl Merger {
    fn new(a: &Vocabulary, b: &Vocabulary) -> Self {
        Merger { a_map: Vec::new(), b_map: Vec::new(), b_offset: a.len(), u: a.len() + b.len() }
    }

    fn pump(&mut self, a: &Presentation, b: &Presentation, out: &mut Presentation) {
        loop {
            let a_turn = self.a_map.len() == self.b_map.len();
            let (src, map, offset) = if a_turn { (a, &mut self.a_map, 0) } else { (b, &mut self.b_map, self.b_offset) };
            let i = map.len();
            if i >= src.settled() {
                return;
            }
            let e = out.add_element();
            map.push(e);
            if a_turn {
                out.add_fact(self.u, &[e]);
            }
            let mut buf = Vec::new();
            for (sym, t) in src.facts_with_max(i) {
                buf.clear();
                buf.extend(t.iter().map(|&x| map[x as usize]));
                out.add_fact(offset + sym, &buf);
            }
        }
    }
}

struct JoinSource {
    a: StructureStream,
    b: StructureStream,
    vocab: Vocabulary,
    merger: Merger,
}

impl StreamSource for JoinSource {
    fn vocabulary(&self) -> Vocabulary {
        self.vocab.clone()
    }

    fn stage(&mut self, out: &mut Presentation) -> bool {
        let (more_a, more_b) = (self.a.advance(), self.b.advance());
        let before = out.len();
        self.merger.pump(self.a.presentation(), self.b.presentation(), out);
        more_a || more_b || out.len() > before
    }
}

/// The structure whose `U`-part is `a` and whose `¬U`-part is `b`.
pub fn diff_join(a: StructureStream, b: StructureStream) -> Result<StructureStream, VocabularyError> {
    let vocab = join_vocabulary(a.vocabulary(), b.vocabulary())?;
    let merger = Merger::new(a.vocabulary(), b.vocabulary());
    Ok(StructureStream::new(JoinSource { a, b, vocab, merger }))
}

/// Runs `a` on the even track of the input and `b` on the odd track, and
/// joins their outputs.
pub struct DiffJoin {
    a: Arc<BitStaged>,
    b: Arc<BitStaged>,
    vocab: Vocabulary,
}

struct DiffJoinMachine {
    runs: [Box<dyn StagedRun>; 2],
    pres: [Presentation; 2],
    parity: usize,
    merger: Merger,
    out: Presentation,
    emitted: usize,
}

impl Machine for DiffJoinMachine {
    fn step(&mut self, bit: bool, out: &mut Vec<bool>) {
        let side = self.parity;
        self.parity ^= 1;
        self.runs[side].stage(bit, &mut self.pres[side]);
        self.pres[side].close_stage();
        self.merger.pump(&self.pres[0], &self.pres[1], &mut self.out);
        self.out.close_stage();
        while self.emitted < self.out.settled() {
            self.out.push_rank_bits(self.emitted, out);
            self.emitted += 1;
        }
    }
}

impl Transducer for DiffJoin {
    fn name(&self) -> String {
        "diffjoin".into()
    }

    fn start(&self) -> Box<dyn Machine> {
        Box::new(DiffJoinMachine {
            runs: [self.a.instance(), self.b.instance()],
            pres: [Presentation::new(self.a.vocabulary()), Presentation::new(self.b.vocabulary())],
            parity: 0,
            merger: Merger::new(self.a.vocabulary(), self.b.vocabulary()),
            out: Presentation::new(&self.vocab),
            emitted: 0,
        })
    }

    /// After `2k` input bits each side has run `k` stages, so at least
    /// `2k·min(per_a, per_b)` elements are merged.
    fn modulus(&self, n: usize) -> usize {
        let per = self.a.min_per_stage().min(self.b.min_per_stage());
        2 * stages_for(&self.vocab, 2 * per, n)
    }

    fn output_vocabulary(&self) -> Option<Vocabulary> {
        Some(self.vocab.clone())
    }
}

pub fn diff_join_transducer(a: BitStaged, b: BitStaged) -> Result<SharedTransducer, VocabularyError> {
    let vocab = join_vocabulary(a.vocabulary(), b.vocabulary())?;
    Ok(Arc::new(DiffJoin { a: Arc::new(a), b: Arc::new(b), vocab }))
}

struct Copy;

impl ElementRun for Copy {
    fn element(&mut self, _m: usize, facts: &[(usize, Vec<usize>)], out: &mut Presentation) {
        out.add_element();
        for (sym, t) in facts {
            out.add_fact(*sym, t);
        }
    }
}

/// The same structure with every symbol name suffixed, for joining two
/// streams over one vocabulary.
pub fn rename_construction(input: &Vocabulary, suffix: &str) -> Result<DiagramStaged, VocabularyError> {
    let out = Vocabulary::new(input.symbols().iter().map(|s| (format!("{}{suffix}", s.name), s.arity)))?;
    Ok(DiagramStaged::new("rename", input.clone(), out, 1, || Box::new(Copy)))
}
