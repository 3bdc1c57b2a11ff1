use std::sync::Arc;

use crate::diagrams::Presentation;
use crate::formulas::Vocabulary;
use crate::transducers::{BitStaged, Machine, SharedTransducer, StagedRun, Transducer};

pub fn monadic_vocabulary() -> Vocabulary {
    Vocabulary::parse("P/1").expect("valid vocabulary")
}

struct InfCoinf;

impl StagedRun for InfCoinf {
    fn stage(&mut self, bit: bool, out: &mut Presentation) {
        let e = out.add_element();
        if bit {
            out.add_fact(0, &[e]);
        }
    }
}

/// `P(i) ⟺ p(i)`: the output diagram over `{P/1}` is the input itself.
pub fn infcoinf_construction() -> BitStaged {
    BitStaged::new("infcoinf", monadic_vocabulary(), 1, || Box::new(InfCoinf))
}

pub fn r_infcoinf() -> SharedTransducer {
    Arc::new(infcoinf_construction())
}

/// `q'(2n) = q(n)`, `q'(2n+1) = 0`.
pub struct Pad;

struct PadMachine;

impl Machine for PadMachine {
    fn step(&mut self, bit: bool, out: &mut Vec<bool>) {
        out.push(bit);
        out.push(false);
    }
}

impl Transducer for Pad {
    fn name(&self) -> String {
        "pad".into()
    }

    fn start(&self) -> Box<dyn Machine> {
        Box::new(PadMachine)
    }

    fn modulus(&self, n: usize) -> usize {
        n.div_ceil(2)
    }
}

pub fn pad() -> SharedTransducer {
    Arc::new(Pad)
}
