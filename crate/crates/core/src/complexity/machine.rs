//! The reference monotone machine.
//!
//! A program is a sequence of instructions read left to right:
//!
//! ```text
//! 0 gamma(l) b_1..b_l                  LITERAL: append b_1..b_l
//! 1 gamma(k) gamma(l) b_1..b_l         REPEAT:  append b_1..b_l, k times
//! ```
//!
//! Integer operands use the Elias-gamma code. A trailing partial
//! instruction produces nothing, and output stops growing at `out_cap`,
//! so extending a program can only extend its output.

use crate::bits::BitString;
use crate::coding::{read_gamma, GammaRead};

/// Bumped whenever the interpreter semantics change; cached tables and
/// measured constants are tied to it.
pub const MACHINE_VERSION: &str = "lit-rep-gamma/1";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonotoneProgram(pub BitString);

impl MonotoneProgram {
    pub fn run(&self, out_cap: usize) -> BitString {
        run_machine(&self.0, out_cap)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Read a gamma operand; `None` when the program ends inside it.
/// Values beyond 64 bits saturate.
fn operand(program: &BitString, pos: &mut usize) -> Option<u64> {
    match read_gamma(program, *pos) {
        GammaRead::Value(v, used) => {
            *pos += used;
            Some(v)
        }
        GammaRead::Overflow(used) => {
            *pos += used;
            Some(u64::MAX)
        }
        GammaRead::Truncated => None,
    }
}

/// Read `len` raw bits; `None` when the program is shorter.
fn payload(program: &BitString, pos: &mut usize, len: u64) -> Option<BitString> {
    let available = (program.len() - *pos) as u64;
    if len > available {
        return None;
    }
    let start = *pos;
    *pos += len as usize;
    Some(BitString::from_bits((start..*pos).map(|i| program.get(i).unwrap())))
}

pub fn run_machine(program: &BitString, out_cap: usize) -> BitString {
    assert!(out_cap >= 1, "out_cap must be positive");
    let mut out = BitString::with_capacity(out_cap.min(256));
    let mut pos = 0;
    while pos < program.len() && out.len() < out_cap {
        let repeat = program.get(pos).unwrap();
        pos += 1;
        let (count, pattern) = if repeat {
            let Some(k) = operand(program, &mut pos) else { break };
            let Some(l) = operand(program, &mut pos) else { break };
            let Some(bits) = payload(program, &mut pos, l) else { break };
            (k, bits)
        } else {
            let Some(l) = operand(program, &mut pos) else { break };
            let Some(bits) = payload(program, &mut pos, l) else { break };
            (1, bits)
        };
        'emit: for _ in 0..count {
            for b in pattern.iter() {
                if out.len() >= out_cap {
                    break 'emit;
                }
                out.push(b);
            }
        }
    }
    out
}
