use std::fmt;

use thiserror::Error;

use super::enumeration::{bits_for_size, rank_len};
use crate::formulas::{FiniteStructure, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("prefix has {have} bits, {needed} are needed for {elements} elements")]
    Insufficient { needed: usize, have: usize, elements: usize },
    #[error("unexpected character {ch:?} at byte {pos} in diagram text")]
    BadChar { pos: usize, ch: char },
    #[error("diagrams need a nonempty vocabulary")]
    EmptyVocabulary,
}

/// A finite initial segment of an atomic diagram. Any bit string is valid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiagramPrefix {
    vocab: Vocabulary,
    bits: Vec<bool>,
}

/// Visits, in lexicographic order, every tuple over `{0, …, m}` of length
/// `arity` that contains `m`.
pub(crate) fn for_each_rank_tuple(m: usize, arity: usize, visit: &mut impl FnMut(&[usize])) {
    fn go(m: usize, arity: usize, seen: bool, buf: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if buf.len() == arity {
            visit(buf);
            return;
        }
        let last = buf.len() + 1 == arity;
        let lo = if last && !seen { m } else { 0 };
        for d in lo..=m {
            buf.push(d);
            go(m, arity, seen || d == m, buf, visit);
            buf.pop();
        }
    }
    go(m, arity, false, &mut Vec::with_capacity(arity), visit);
}

impl DiagramPrefix {
    pub fn new(vocab: &Vocabulary, bits: Vec<bool>) -> Self {
        DiagramPrefix { vocab: vocab.clone(), bits }
    }

    /// Reads `'0'`/`'1'` characters, ignoring whitespace.
    pub fn parse(vocab: &Vocabulary, text: &str) -> Result<Self, DiagramError> {
        let mut bits = Vec::with_capacity(text.len());
        for (pos, ch) in text.char_indices() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                ch => return Err(DiagramError::BadChar { pos, ch }),
            }
        }
        Ok(DiagramPrefix::new(vocab, bits))
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn truncate(&mut self, n: usize) {
        self.bits.truncate(n);
    }

    /// Largest `N` such that the prefix determines the structure on `{0..N-1}`.
    pub fn complete_elements(&self) -> usize {
        if self.vocab.is_empty() {
            return 0;
        }
        let mut n = 0;
        while bits_for_size(&self.vocab, n + 1) <= self.bits.len() {
            n += 1;
        }
        n
    }

    /// Bits as a `0`/`1` string without separators.
    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Blocks of 64 characters, each newline-terminated.
impl fmt::Display for DiagramPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for chunk in self.bits.chunks(64) {
            for &b in chunk {
                f.write_str(if b { "1" } else { "0" })?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DiagramPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiagramPrefix[{}]({})", self.vocab, self.to_bit_string())
    }
}

/// The atomic diagram of `s` restricted to atoms over its universe.
pub fn encode(s: &FiniteStructure) -> DiagramPrefix {
    let vocab = s.vocabulary();
    let mut bits = Vec::with_capacity(bits_for_size(vocab, s.size()));
    for m in 0..s.size() {
        for sym in 0..vocab.len() {
            for_each_rank_tuple(m, vocab.arity(sym), &mut |t| bits.push(s.holds(sym, t)));
        }
    }
    DiagramPrefix::new(vocab, bits)
}

/// The structure on `{0, …, n-1}` that `p` describes.
pub fn decode(p: &DiagramPrefix, n: usize) -> Result<FiniteStructure, DiagramError> {
    let vocab = p.vocabulary();
    if vocab.is_empty() {
        return Err(DiagramError::EmptyVocabulary);
    }
    let needed = bits_for_size(vocab, n);
    if p.len() < needed || n == 0 {
        return Err(DiagramError::Insufficient { needed, have: p.len(), elements: n });
    }
    let mut s = FiniteStructure::empty(vocab, n).expect("n >= 1");
    let mut i = 0;
    for m in 0..n {
        debug_assert_eq!(i, bits_for_size(vocab, m));
        for sym in 0..vocab.len() {
            for_each_rank_tuple(m, vocab.arity(sym), &mut |t| {
                if p.bits[i] {
                    s.set(sym, t, true);
                }
                i += 1;
            });
        }
        debug_assert_eq!(i, bits_for_size(vocab, m) + rank_len(vocab, m));
    }
    Ok(s)
}
