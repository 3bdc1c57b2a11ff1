//! The fixed enumeration of relation atoms.
//!
//! Atoms are grouped by rank, the largest variable index they mention. Rank
//! `m` lists, for each symbol in declaration order, the argument tuples over
//! `{0, …, m}` that contain `m`, lexicographically. Since exactly
//! `Σ_R m^arity(R)` atoms use only variables below `m`, rank `m` starts at
//! index [`bits_for_size`]`(m)`.

use crate::formulas::{Formula, Var, Vocabulary};

/// Number of atoms whose variables are all `< n`, i.e. the diagram length
/// of an `n`-element structure.
pub fn bits_for_size(vocab: &Vocabulary, n: usize) -> usize {
    vocab.symbols().iter().map(|s| n.pow(s.arity as u32)).sum()
}

/// Number of atoms of rank exactly `m`.
pub fn rank_len(vocab: &Vocabulary, m: usize) -> usize {
    bits_for_size(vocab, m + 1) - bits_for_size(vocab, m)
}

fn tuples_with_max(m: usize, arity: usize) -> usize {
    (m + 1).pow(arity as u32) - m.pow(arity as u32)
}

/// Position of `tuple` (which must have maximum `m`) among the rank-`m`
/// tuples of its arity.
fn offset_in_symbol(m: usize, tuple: &[usize]) -> usize {
    let mut seen_m = false;
    let mut off = 0;
    for (i, &t) in tuple.iter().enumerate() {
        let rest = (tuple.len() - i - 1) as u32;
        let completions = if seen_m { (m + 1).pow(rest) } else { (m + 1).pow(rest) - m.pow(rest) };
        off += t * completions;
        seen_m |= t == m;
    }
    off
}

fn unrank_in_symbol(m: usize, arity: usize, mut off: usize) -> Vec<usize> {
    let mut tuple = Vec::with_capacity(arity);
    let mut seen_m = false;
    for i in 0..arity {
        let rest = (arity - i - 1) as u32;
        for d in 0..=m {
            let completions = if seen_m || d == m { (m + 1).pow(rest) } else { (m + 1).pow(rest) - m.pow(rest) };
            if off < completions {
                tuple.push(d);
                seen_m |= d == m;
                break;
            }
            off -= completions;
        }
    }
    tuple
}

/// Offset of the atom `sym(tuple)` within its rank block.
pub fn offset_in_rank(vocab: &Vocabulary, sym: usize, tuple: &[usize]) -> usize {
    let m = tuple.iter().copied().max().expect("arity >= 1");
    let before: usize = (0..sym).map(|s| tuples_with_max(m, vocab.arity(s))).sum();
    before + offset_in_symbol(m, tuple)
}

/// Inverse of [`offset_in_rank`].
pub fn atom_in_rank(vocab: &Vocabulary, m: usize, mut off: usize) -> (usize, Vec<usize>) {
    for sym in 0..vocab.len() {
        let n = tuples_with_max(m, vocab.arity(sym));
        if off < n {
            return (sym, unrank_in_symbol(m, vocab.arity(sym), off));
        }
        off -= n;
    }
    panic!("offset beyond rank {m}");
}

/// Global index of the atom `sym(tuple)`.
pub fn atom_index(vocab: &Vocabulary, sym: usize, tuple: &[usize]) -> usize {
    let m = tuple.iter().copied().max().expect("arity >= 1");
    bits_for_size(vocab, m) + offset_in_rank(vocab, sym, tuple)
}

/// The `i`-th atom as `(symbol index, argument tuple)`.
pub fn atom_at(vocab: &Vocabulary, i: usize) -> (usize, Vec<usize>) {
    assert!(!vocab.is_empty(), "empty vocabulary has no atoms");
    // rank m satisfies bits_for_size(m) <= i < bits_for_size(m+1); gallop then bisect
    let mut hi = 1;
    while bits_for_size(vocab, hi + 1) <= i {
        hi *= 2;
    }
    let mut lo = 0;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if bits_for_size(vocab, mid + 1) <= i {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    atom_in_rank(vocab, lo, i - bits_for_size(vocab, lo))
}

/// The `i`-th atomic formula `φ_i`.
pub fn atomic_formula(vocab: &Vocabulary, i: usize) -> Formula {
    let (sym, tuple) = atom_at(vocab, i);
    Formula::Atom { rel: vocab.name(sym).into(), args: tuple.into_iter().map(|e| Var(e as u32)).collect() }
}
