use std::sync::Arc;

use crate::diagrams::Presentation;
use crate::formulas::Vocabulary;
use crate::pointclasses::unpair;
use crate::transducers::{BitStaged, SharedTransducer, StagedRun};

pub fn matching_vocabulary() -> Vocabulary {
    Vocabulary::parse("R/2").expect("valid vocabulary")
}

/// Reads the matrix point `x` cell by cell: stage `s` reads `x(j,k)` with
/// `⟨j,k⟩ = s`.
///
/// Each stage appends `a_s, c_s, d_s` and matches `c_s` with `d_s`. If
/// the cell is the first 1 of column `j`, it then appends `b_{j,k}` and
/// matches it with `a_j`. So `a_j` ends up unmatched exactly when column `j`
/// is empty.
#[derive(Default)]
struct Matching {
    a: Vec<usize>,
    column_hit: Vec<bool>,
}

impl StagedRun for Matching {
    fn stage(&mut self, bit: bool, out: &mut Presentation) {
        let s = self.a.len();
        let (j, _) = unpair(s);
        let a = out.add_element();
        let c = out.add_element();
        let d = out.add_element();
        self.a.push(a);
        self.column_hit.push(false);
        out.add_symmetric(0, c, d);
        if bit && !self.column_hit[j] {
            self.column_hit[j] = true;
            let b = out.add_element();
            out.add_symmetric(0, self.a[j], b);
        }
    }
}

pub fn matching_construction() -> BitStaged {
    BitStaged::new("matching", matching_vocabulary(), 3, || Box::<Matching>::default())
}

pub fn r_matching() -> SharedTransducer {
    Arc::new(matching_construction())
}

/// Elements appended by the first `s` stages on input `x`: three per stage
/// plus one per column whose first 1 has been read.
pub fn matching_elements_after(x: &crate::pointclasses::UPPoint, s: usize) -> usize {
    let mut hit = vec![false; s];
    let mut n = 3 * s;
    for t in 0..s {
        let (j, _) = unpair(t);
        if x.bit(t) && !hit[j] {
            hit[j] = true;
            n += 1;
        }
    }
    n
}
