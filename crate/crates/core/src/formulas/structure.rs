use std::fmt;

use thiserror::Error;

use super::syntax::Vocabulary;

/// A finite structure with universe `{0, …, size-1}`.
///
/// Each relation is stored as a dense table indexed lexicographically by its
/// argument tuple.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    vocab: Vocabulary,
    size: usize,
    tables: Vec<Vec<bool>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("finite structures must be nonempty")]
    Empty,
    #[error("tuple {tuple:?} for `{rel}` is outside a universe of size {size}")]
    OutOfRange { rel: String, tuple: Vec<usize>, size: usize },
    #[error("relation `{rel}` has arity {arity}, tuple has length {len}")]
    Arity { rel: String, arity: usize, len: usize },
    #[error("unknown relation `{0}`")]
    Unknown(String),
    #[error("malformed structure description: {0}")]
    Malformed(String),
}

impl FiniteStructure {
    /// The structure of the given size where no relation holds.
    pub fn empty(vocab: &Vocabulary, size: usize) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::Empty);
        }
        let tables = vocab.symbols().iter().map(|s| vec![false; size.pow(s.arity as u32)]).collect();
        Ok(FiniteStructure { vocab: vocab.clone(), size, tables })
    }

    pub fn from_facts<'a>(
        vocab: &Vocabulary,
        size: usize,
        facts: impl IntoIterator<Item = (&'a str, &'a [usize])>,
    ) -> Result<Self, StructureError> {
        let mut s = FiniteStructure::empty(vocab, size)?;
        for (rel, tuple) in facts {
            let sym = vocab.index_of(rel).ok_or_else(|| StructureError::Unknown(rel.to_string()))?;
            s.try_set(sym, tuple, true)?;
        }
        Ok(s)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub(crate) fn offset(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &e| acc * self.size + e)
    }

    pub fn holds(&self, sym: usize, tuple: &[usize]) -> bool {
        self.tables[sym][self.offset(tuple)]
    }

    #[inline]
    pub(crate) fn holds_at(&self, sym: usize, offset: usize) -> bool {
        self.tables[sym][offset]
    }

    pub fn set(&mut self, sym: usize, tuple: &[usize], value: bool) {
        self.try_set(sym, tuple, value).expect("tuple within bounds")
    }

    pub fn try_set(&mut self, sym: usize, tuple: &[usize], value: bool) -> Result<(), StructureError> {
        let arity = self.vocab.arity(sym);
        if tuple.len() != arity {
            return Err(StructureError::Arity { rel: self.vocab.name(sym).into(), arity, len: tuple.len() });
        }
        if tuple.iter().any(|&e| e >= self.size) {
            return Err(StructureError::OutOfRange {
                rel: self.vocab.name(sym).into(),
                tuple: tuple.to_vec(),
                size: self.size,
            });
        }
        let off = self.offset(tuple);
        self.tables[sym][off] = value;
        Ok(())
    }

    pub(crate) fn table_mut(&mut self, sym: usize) -> &mut [bool] {
        &mut self.tables[sym]
    }

    /// All tuples where `sym` holds, in lexicographic order.
    pub fn facts(&self, sym: usize) -> Vec<Vec<usize>> {
        let arity = self.vocab.arity(sym);
        self.tables[sym]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(mut off, _)| {
                let mut t = vec![0; arity];
                for slot in t.iter_mut().rev() {
                    *slot = off % self.size;
                    off /= self.size;
                }
                t
            })
            .collect()
    }

    /// Substructure on the first `n` elements.
    pub fn restrict(&self, n: usize) -> FiniteStructure {
        let mut out = FiniteStructure::empty(&self.vocab, n).expect("n >= 1");
        for sym in 0..self.vocab.len() {
            for t in self.facts(sym) {
                if t.iter().all(|&e| e < n) {
                    out.set(sym, &t, true);
                }
            }
        }
        out
    }

    /// Applies a permutation `perm[old] = new` of the universe.
    pub fn permute(&self, perm: &[usize]) -> FiniteStructure {
        let mut out = FiniteStructure::empty(&self.vocab, self.size).expect("nonempty");
        for sym in 0..self.vocab.len() {
            for t in self.facts(sym) {
                let mapped: Vec<usize> = t.iter().map(|&e| perm[e]).collect();
                out.set(sym, &mapped, true);
            }
        }
        out
    }

    /// Parses `size=N; R 0 1; P 0` style descriptions.
    pub fn parse(vocab: &Vocabulary, text: &str) -> Result<Self, StructureError> {
        let mut size = None;
        let mut facts: Vec<(usize, Vec<usize>)> = Vec::new();
        for item in text.split([';', '\n']).map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(n) = item.strip_prefix("size") {
                let n = n.trim_start_matches([' ', '=']).trim();
                size = Some(n.parse().map_err(|_| StructureError::Malformed(item.into()))?);
                continue;
            }
            let mut words = item.split_whitespace();
            let rel = words.next().expect("nonempty item");
            let sym = vocab.index_of(rel).ok_or_else(|| StructureError::Unknown(rel.into()))?;
            let tuple = words
                .map(|w| w.parse::<usize>().map_err(|_| StructureError::Malformed(item.into())))
                .collect::<Result<Vec<_>, _>>()?;
            facts.push((sym, tuple));
        }
        let size = size.ok_or_else(|| StructureError::Malformed("missing size".into()))?;
        let mut s = FiniteStructure::empty(vocab, size)?;
        for (sym, t) in facts {
            s.try_set(sym, &t, true)?;
        }
        Ok(s)
    }
}

impl fmt::Display for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size={}", self.size)?;
        for sym in 0..self.vocab.len() {
            for t in self.facts(sym) {
                write!(f, "; {}", self.vocab.name(sym))?;
                for e in t {
                    write!(f, " {e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteStructure({self})")
    }
}

/// Calls `visit` on every structure of the given size whose relations outside
/// `symbols` are empty. Stops early when `visit` returns `false`.
///
/// Panics if the relevant table cells exceed 63.
pub fn for_each_structure(
    vocab: &Vocabulary,
    size: usize,
    symbols: &[usize],
    mut visit: impl FnMut(&FiniteStructure) -> bool,
) -> bool {
    let mut s = FiniteStructure::empty(vocab, size).expect("size >= 1");
    let cells: Vec<(usize, usize)> =
        symbols.iter().flat_map(|&sym| (0..size.pow(vocab.arity(sym) as u32)).map(move |off| (sym, off))).collect();
    assert!(cells.len() < 64, "too many cells ({}) for exhaustive enumeration", cells.len());
    let total: u64 = 1 << cells.len();
    for mask in 0..total {
        for (i, &(sym, off)) in cells.iter().enumerate() {
            s.table_mut(sym)[off] = mask >> i & 1 == 1;
        }
        if !visit(&s) {
            return false;
        }
    }
    true
}
