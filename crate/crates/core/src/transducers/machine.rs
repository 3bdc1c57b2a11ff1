use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::diagrams::{bits_for_size, DiagramReader, Presentation, StreamSource, StructureStream};
use crate::formulas::Vocabulary;
use crate::pointclasses::UPPoint;

/// A running transducer: private state, fed one input bit at a time.
pub trait Machine: Send {
    /// Consumes one input bit and appends the output bits it releases.
    fn step(&mut self, bit: bool, out: &mut Vec<bool>);
}

/// A continuous map on Cantor space given as a synchronous stream machine.
///
/// The modulus is a claim: after `modulus(n)` input bits the machine has
/// emitted at least `n` output bits. Since emitted bits are never revised,
/// those `n` bits depend only on the input bits read so far.
pub trait Transducer: Send + Sync {
    fn name(&self) -> String;

    fn start(&self) -> Box<dyn Machine>;

    fn modulus(&self, n: usize) -> usize;

    /// Vocabulary of the diagrams read, or `None` for raw bits.
    fn input_vocabulary(&self) -> Option<Vocabulary> {
        None
    }

    /// Vocabulary of the diagrams written, or `None` for raw bits.
    fn output_vocabulary(&self) -> Option<Vocabulary> {
        None
    }
}

pub type SharedTransducer = Arc<dyn Transducer>;

impl fmt::Debug for dyn Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transducer({})", self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransducerError {
    #[error("`{name}` emitted only {emitted} of {wanted} bits after consuming {consumed} input bits")]
    NotProductive { name: String, wanted: usize, emitted: usize, consumed: usize },
    #[error("input ended after {consumed} bits with {emitted} of {wanted} output bits")]
    InputExhausted { wanted: usize, emitted: usize, consumed: usize },
    #[error("cannot compose `{first}` into `{second}`: it writes {writes} but the second reads {reads}")]
    VocabularyMismatch { first: String, second: String, writes: String, reads: String },
}

/// The first `n_out` output bits on `input`, reading at most `budget` bits.
pub fn run(
    t: &dyn Transducer,
    input: impl IntoIterator<Item = bool>,
    n_out: usize,
    budget: usize,
) -> Result<Vec<bool>, TransducerError> {
    let mut m = t.start();
    let mut out = Vec::with_capacity(n_out);
    let mut consumed = 0;
    let mut input = input.into_iter();
    while out.len() < n_out {
        if consumed == budget {
            return Err(TransducerError::NotProductive { name: t.name(), wanted: n_out, emitted: out.len(), consumed });
        }
        let Some(b) = input.next() else {
            return Err(TransducerError::InputExhausted { wanted: n_out, emitted: out.len(), consumed });
        };
        m.step(b, &mut out);
        consumed += 1;
    }
    out.truncate(n_out);
    Ok(out)
}

/// Everything the machine emits while reading all of `input`.
pub fn run_all(t: &dyn Transducer, input: &[bool]) -> Vec<bool> {
    let mut m = t.start();
    let mut out = Vec::new();
    for &b in input {
        m.step(b, &mut out);
    }
    out
}

/// The identity on bits, optionally typed as diagrams over a vocabulary.
pub struct Identity(pub Option<Vocabulary>);

struct Copy;

impl Machine for Copy {
    fn step(&mut self, bit: bool, out: &mut Vec<bool>) {
        out.push(bit);
    }
}

impl Transducer for Identity {
    fn name(&self) -> String {
        "identity".into()
    }

    fn start(&self) -> Box<dyn Machine> {
        Box::new(Copy)
    }

    fn modulus(&self, n: usize) -> usize {
        n
    }

    fn input_vocabulary(&self) -> Option<Vocabulary> {
        self.0.clone()
    }

    fn output_vocabulary(&self) -> Option<Vocabulary> {
        self.0.clone()
    }
}

pub fn identity() -> SharedTransducer {
    Arc::new(Identity(None))
}

/// `second ∘ first`: the second machine reads what the first writes.
pub struct Composed {
    first: SharedTransducer,
    second: SharedTransducer,
}

struct ComposedMachine {
    first: Box<dyn Machine>,
    second: Box<dyn Machine>,
    buf: Vec<bool>,
}

impl Machine for ComposedMachine {
    fn step(&mut self, bit: bool, out: &mut Vec<bool>) {
        self.buf.clear();
        self.first.step(bit, &mut self.buf);
        for &b in &self.buf {
            self.second.step(b, out);
        }
    }
}

impl Transducer for Composed {
    fn name(&self) -> String {
        format!("{},{}", self.first.name(), self.second.name())
    }

    fn start(&self) -> Box<dyn Machine> {
        Box::new(ComposedMachine { first: self.first.start(), second: self.second.start(), buf: Vec::new() })
    }

    fn modulus(&self, n: usize) -> usize {
        self.first.modulus(self.second.modulus(n))
    }

    fn input_vocabulary(&self) -> Option<Vocabulary> {
        self.first.input_vocabulary()
    }

    fn output_vocabulary(&self) -> Option<Vocabulary> {
        self.second.output_vocabulary()
    }
}

fn describe(v: &Option<Vocabulary>) -> String {
    match v {
        None => "raw bits".into(),
        Some(v) => {
            let names: Vec<String> = v.symbols().iter().map(|s| format!("{}/{}", s.name, s.arity)).collect();
            format!("diagrams over {{{}}}", names.join(","))
        }
    }
}

/// Runs `first`, then feeds its output to `second`. A second transducer
/// reading raw bits accepts any diagram; one reading diagrams needs the
/// same vocabulary.
pub fn compose(first: SharedTransducer, second: SharedTransducer) -> Result<SharedTransducer, TransducerError> {
    let (writes, reads) = (first.output_vocabulary(), second.input_vocabulary());
    if reads.is_some() && reads != writes {
        return Err(TransducerError::VocabularyMismatch {
            first: first.name(),
            second: second.name(),
            writes: describe(&writes),
            reads: describe(&reads),
        });
    }
    Ok(Arc::new(Composed { first, second }))
}

/// One stage per input bit of a staged construction.
pub trait StagedRun: Send {
    /// Performs the stage that reads `bit`; the caller closes it.
    fn stage(&mut self, bit: bool, out: &mut Presentation);
}

/// One stage per input element of a construction on diagrams.
pub trait ElementRun: Send {
    /// Performs the stage triggered by input element `m`, whose facts with
    /// largest element `m` are `facts`.
    fn element(&mut self, m: usize, facts: &[(usize, Vec<usize>)], out: &mut Presentation);

    /// Called once if the input turns out to be finite.
    fn finish(&mut self, _out: &mut Presentation) {}
}

/// Emits the diagram bits of every rank that became settled.
struct Emitter {
    pres: Presentation,
    emitted: usize,
}

impl Emitter {
    fn close(&mut self, out: &mut Vec<bool>) {
        self.pres.close_stage();
        while self.emitted < self.pres.settled() {
            self.pres.push_rank_bits(self.emitted, out);
            self.emitted += 1;
        }
    }
}

type Factory<R> = Arc<dyn Fn() -> Box<R> + Send + Sync>;

/// A construction that reads one bit per stage and writes a diagram.
pub struct BitStaged {
    name: String,
    vocab: Vocabulary,
    min_per_stage: usize,
    factory: Factory<dyn StagedRun>,
}

impl BitStaged {
    /// `min_per_stage` is a lower bound on elements appended per stage and
    /// fixes the modulus.
    pub fn new(
        name: &str,
        vocab: Vocabulary,
        min_per_stage: usize,
        factory: impl Fn() -> Box<dyn StagedRun> + Send + Sync + 'static,
    ) -> Self {
        assert!(min_per_stage >= 1);
        BitStaged { name: name.into(), vocab, min_per_stage, factory: Arc::new(factory) }
    }
}

struct BitStagedMachine {
    run: Box<dyn StagedRun>,
    emit: Emitter,
}

impl Machine for BitStagedMachine {
    fn step(&mut self, bit: bool, out: &mut Vec<bool>) {
        self.run.stage(bit, &mut self.emit.pres);
        self.emit.close(out);
    }
}

/// Least `k` with `bits_for_size(vocab, per·k) ≥ n`.
pub(crate) fn stages_for(vocab: &Vocabulary, per: usize, n: usize) -> usize {
    let (mut lo, mut hi) = (0, 1);
    while bits_for_size(vocab, per * hi) < n {
        hi *= 2;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if bits_for_size(vocab, per * mid) >= n {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

impl Transducer for BitStaged {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn start(&self) -> Box<dyn Machine> {
        Box::new(BitStagedMachine {
            run: (self.factory)(),
            emit: Emitter { pres: Presentation::new(&self.vocab), emitted: 0 },
        })
    }

    fn modulus(&self, n: usize) -> usize {
        stages_for(&self.vocab, self.min_per_stage, n)
    }

    fn output_vocabulary(&self) -> Option<Vocabulary> {
        Some(self.vocab.clone())
    }
}

impl BitStaged {
    /// The construction on a fixed input, as a structure stream.
    pub fn stream(&self, p: &UPPoint) -> StructureStream {
        StructureStream::new(InputSource { run: (self.factory)(), vocab: self.vocab.clone(), input: p.clone(), pos: 0 })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn min_per_stage(&self) -> usize {
        self.min_per_stage
    }

    /// A fresh run of the construction.
    pub fn instance(&self) -> Box<dyn StagedRun> {
        (self.factory)()
    }
}

struct InputSource {
    run: Box<dyn StagedRun>,
    vocab: Vocabulary,
    input: UPPoint,
    pos: usize,
}

impl StreamSource for InputSource {
    fn vocabulary(&self) -> Vocabulary {
        self.vocab.clone()
    }

    fn stage(&mut self, out: &mut Presentation) -> bool {
        self.run.stage(self.input.bit(self.pos), out);
        self.pos += 1;
        true
    }
}

/// A construction that reads a diagram, one stage per input element.
pub struct DiagramStaged {
    name: String,
    input: Vocabulary,
    output: Vocabulary,
    min_per_element: usize,
    factory: Factory<dyn ElementRun>,
}

impl DiagramStaged {
    pub fn new(
        name: &str,
        input: Vocabulary,
        output: Vocabulary,
        min_per_element: usize,
        factory: impl Fn() -> Box<dyn ElementRun> + Send + Sync + 'static,
    ) -> Self {
        assert!(min_per_element >= 1);
        DiagramStaged { name: name.into(), input, output, min_per_element, factory: Arc::new(factory) }
    }
}

struct DiagramStagedMachine {
    run: Box<dyn ElementRun>,
    reader: DiagramReader,
    emit: Emitter,
}

impl Machine for DiagramStagedMachine {
    fn step(&mut self, bit: bool, out: &mut Vec<bool>) {
        if let Some(facts) = self.reader.push(bit) {
            let m = self.reader.elements() - 1;
            self.run.element(m, &facts, &mut self.emit.pres);
            self.emit.close(out);
        }
    }
}

impl Transducer for DiagramStaged {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn start(&self) -> Box<dyn Machine> {
        Box::new(DiagramStagedMachine {
            run: (self.factory)(),
            reader: DiagramReader::new(&self.input),
            emit: Emitter { pres: Presentation::new(&self.output), emitted: 0 },
        })
    }

    fn modulus(&self, n: usize) -> usize {
        bits_for_size(&self.input, stages_for(&self.output, self.min_per_element, n))
    }

    fn input_vocabulary(&self) -> Option<Vocabulary> {
        Some(self.input.clone())
    }

    fn output_vocabulary(&self) -> Option<Vocabulary> {
        Some(self.output.clone())
    }
}

impl DiagramStaged {
    /// The construction applied to a structure stream: each stage of the
    /// result runs one stage of `inner` and handles the elements it settles.
    pub fn stream(&self, inner: StructureStream) -> Result<StructureStream, TransducerError> {
        if inner.vocabulary() != &self.input {
            return Err(TransducerError::VocabularyMismatch {
                first: "stream".into(),
                second: self.name.clone(),
                writes: describe(&Some(inner.vocabulary().clone())),
                reads: describe(&Some(self.input.clone())),
            });
        }
        Ok(StructureStream::new(MappedSource {
            inner,
            run: (self.factory)(),
            vocab: self.output.clone(),
            next: 0,
            finished: false,
        }))
    }
}

struct MappedSource {
    inner: StructureStream,
    run: Box<dyn ElementRun>,
    vocab: Vocabulary,
    next: usize,
    finished: bool,
}

impl StreamSource for MappedSource {
    fn vocabulary(&self) -> Vocabulary {
        self.vocab.clone()
    }

    fn stage(&mut self, out: &mut Presentation) -> bool {
        if self.finished {
            return false;
        }
        let more = self.inner.advance();
        let pres = self.inner.presentation();
        while self.next < pres.settled() {
            let facts: Vec<(usize, Vec<usize>)> =
                pres.facts_with_max(self.next).map(|(s, t)| (s, t.iter().map(|&e| e as usize).collect())).collect();
            self.run.element(self.next, &facts, out);
            self.next += 1;
        }
        if !more {
            self.run.finish(out);
            self.finished = true;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointclasses::UPPoint;

    #[test]
    fn identity_runs() {
        let p: UPPoint = "01;1".parse().unwrap();
        let out = run(identity().as_ref(), p.bits(), 4, 4).unwrap();
        assert_eq!(out, [false, true, true, true]);
        assert!(matches!(
            run(identity().as_ref(), [true, false], 3, 10),
            Err(TransducerError::InputExhausted { emitted: 2, .. })
        ));
    }

    #[test]
    fn stage_counts() {
        let r = Vocabulary::parse("R/2").unwrap();
        // 9k² ≥ n
        assert_eq!(stages_for(&r, 3, 0), 0);
        assert_eq!(stages_for(&r, 3, 9), 1);
        assert_eq!(stages_for(&r, 3, 10), 2);
        assert_eq!(stages_for(&r, 3, 10_000), 34);
    }
}
