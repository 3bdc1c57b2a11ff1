//! Deliberately broken transducers for exercising the harnesses.

use std::sync::Arc;

use super::machine::{Machine, SharedTransducer, Transducer};

/// Emits `b(i) xor b(i+1)` as bit `i`, one step late, while claiming the
/// identity modulus. Its claim is false, so the harnesses must object.
pub struct ReadAhead;

struct ReadAheadMachine(Option<bool>);

impl Machine for ReadAheadMachine {
    fn step(&mut self, bit: bool, out: &mut Vec<bool>) {
        if let Some(prev) = self.0 {
            out.push(prev ^ bit);
        }
        self.0 = Some(bit);
    }
}

impl Transducer for ReadAhead {
    fn name(&self) -> String {
        "read-ahead".into()
    }

    fn start(&self) -> Box<dyn Machine> {
        Box::new(ReadAheadMachine(None))
    }

    fn modulus(&self, n: usize) -> usize {
        n
    }
}

/// Copies ones and swallows zeros.
pub struct Stall;

struct StallMachine;

impl Machine for StallMachine {
    fn step(&mut self, bit: bool, out: &mut Vec<bool>) {
        if bit {
            out.push(true);
        }
    }
}

impl Transducer for Stall {
    fn name(&self) -> String {
        "stall".into()
    }

    fn start(&self) -> Box<dyn Machine> {
        Box::new(StallMachine)
    }

    fn modulus(&self, n: usize) -> usize {
        n
    }
}

pub fn read_ahead() -> SharedTransducer {
    Arc::new(ReadAhead)
}

pub fn stall() -> SharedTransducer {
    Arc::new(Stall)
}
