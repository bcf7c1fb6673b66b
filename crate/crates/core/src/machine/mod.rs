//! Space-metered toy machine over which every complexity measure is defined.
//!
//! The machine has a read-only input tape framed by end markers, a binary
//! work tape of exactly `m` cells, an output buffer, an optional read-once
//! random tape and an optional membership oracle. Programs are lists of
//! instructions (see [`program`] for the encoding); the program counter plays
//! the role of the finite control.

pub mod asm;
pub mod exec;
pub mod program;

use serde::{Deserialize, Serialize};

pub use asm::{assemble, disassemble, AsmError};
pub use exec::{configuration_bound, run, MachineConfig, Oracle, Outcome, RunResult, MAX_SPACE};
pub use program::{Body, Cond, DecodeError, Op, Program, COMBINATOR_OVERHEAD};

use crate::bits::{BitString, StringSet, MAX_SET_LEN};
use crate::error::{check_cap, Result};

/// Resource caps shared by every exhaustive search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Longest program enumerated, in bits.
    pub program_len: usize,
    /// Longest input string.
    pub input_len: usize,
    /// Largest work-tape size.
    pub space: usize,
    /// Longest random tape enumerated exhaustively.
    pub tape_len: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            program_len: 16,
            input_len: MAX_SET_LEN,
            space: 24,
            tape_len: 16,
        }
    }
}

/// Programs longer than this are never enumerated, whatever the caps say.
pub const HARD_PROGRAM_LEN: usize = 24;

/// Every valid program of length at most `max_len`, in (length, lexicographic)
/// order.
pub fn enumerate_programs(max_len: usize, caps: &Caps) -> Result<Vec<Program>> {
    check_cap("program length", max_len, caps.program_len.min(HARD_PROGRAM_LEN))?;
    let mut out = Vec::new();
    let mut memo: Vec<Option<Vec<Program>>> = vec![None; max_len + 1];
    collect(max_len, &mut memo, &mut out);
    out.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
    Ok(out)
}

fn collect(budget: usize, memo: &mut Vec<Option<Vec<Program>>>, out: &mut Vec<Program>) {
    if let Some(done) = &memo[budget] {
        out.extend(done.iter().cloned());
        return;
    }
    let mut mine = Vec::new();
    let mut ops = Vec::new();
    op_lists(budget, 0, &mut ops, &mut mine);
    let min_sub = program::END.len();
    if budget >= COMBINATOR_OVERHEAD + 2 * min_sub {
        let mut firsts = Vec::new();
        collect(budget - COMBINATOR_OVERHEAD - min_sub, memo, &mut firsts);
        for a in &firsts {
            let mut seconds = Vec::new();
            collect(budget - COMBINATOR_OVERHEAD - a.len(), memo, &mut seconds);
            for b in seconds {
                mine.push(Program::compose(a.clone(), b.clone()));
                mine.push(Program::pair(a.clone(), b));
            }
        }
    }
    out.extend(mine.iter().cloned());
    memo[budget] = Some(mine);
}

fn op_lists(budget: usize, used: usize, ops: &mut Vec<Op>, out: &mut Vec<Program>) {
    let end_len = program::END.len();
    if used + end_len <= budget {
        if let Ok(p) = Program::from_ops(ops.clone()) {
            out.push(p);
        }
    }
    let room = budget.saturating_sub(used + end_len);
    let mut fixed = vec![
        Op::Exp(false),
        Op::Exp(true),
        Op::Acc,
        Op::Rej,
        Op::Skip,
        Op::QChk,
        Op::Out(false),
        Op::Out(true),
        Op::Halt,
        Op::Rout,
        Op::Back,
        Op::Write(false),
        Op::Write(true),
        Op::WMove(false),
        Op::WMove(true),
        Op::Load,
    ];
    // jumps: 11 bits + gamma(dist + 1)
    let mut dist = 0u32;
    while 11 + crate::bits::gamma_len(dist as u64 + 1) <= room {
        for cond in Cond::all() {
            for back in [false, true] {
                if back && (dist as usize) > ops.len() {
                    continue;
                }
                fixed.push(Op::Jump { cond, back, dist });
            }
        }
        dist += 1;
    }
    for op in fixed {
        let l = op.encoded_len();
        if l <= room {
            ops.push(op);
            op_lists(budget, used + l, ops, out);
            ops.pop();
        }
    }
}

fn strings(n: usize) -> impl Iterator<Item = BitString> {
    (0..1u64 << n).map(move |y| BitString::from_u64(y, n))
}

/// Accept on `x`, reject every other string of the same length, never exceed
/// `space` and never loop.
pub fn distinguishes(p: &Program, x: &BitString, space: usize, oracle: Oracle) -> bool {
    decides(p, x.len(), space, oracle) == Some(StringSet::singleton(x.len(), x.to_u64()))
}

/// The set of `n`-bit inputs `p` accepts, provided `p` halts with accept or
/// reject within `space` on every `n`-bit input.
pub fn decides(p: &Program, n: usize, space: usize, oracle: Oracle) -> Option<StringSet> {
    let mut set = StringSet::empty(n);
    for (y, input) in strings(n).enumerate() {
        let cfg = MachineConfig::new(space, input.bits()).with_oracle(oracle);
        match run(p, &cfg).outcome {
            Outcome::Accept => set.insert(y as u64),
            Outcome::Reject => {}
            _ => return None,
        }
    }
    Some(set)
}

/// The pair `(A, B)` decided by `p`: on input `a‖b` it must output exactly
/// `(a ∈ A, b ∈ B)`.
pub fn decides_pair(p: &Program, n: usize, space: usize, oracle: Oracle) -> Option<(StringSet, StringSet)> {
    let mut first: Vec<Option<bool>> = vec![None; 1 << n];
    let mut second: Vec<Option<bool>> = vec![None; 1 << n];
    for ab in strings(2 * n) {
        let cfg = MachineConfig::new(space, ab.bits()).with_oracle(oracle);
        let Outcome::Output(o) = run(p, &cfg).outcome else {
            return None;
        };
        if o.len() != 2 {
            return None;
        }
        let v = ab.to_u64();
        let (a, b) = ((v >> n) as usize, (v & ((1 << n) - 1)) as usize);
        for (slot, bit) in [(&mut first[a], o.bits()[0]), (&mut second[b], o.bits()[1])] {
            match slot {
                None => *slot = Some(bit),
                Some(prev) if *prev != bit => return None,
                _ => {}
            }
        }
    }
    let set = |v: &[Option<bool>]| StringSet::from_fn(n, |y| v[y as usize] == Some(true));
    Some((set(&first), set(&second)))
}

/// Largest work space `p` uses over all `n`-bit inputs, if it halts on all of
/// them within `space`.
pub fn peak_space(p: &Program, n: usize, space: usize, oracle: Oracle) -> Option<usize> {
    let mut peak = 0;
    for input in strings(n) {
        let r = run(p, &MachineConfig::new(space, input.bits()).with_oracle(oracle));
        if !r.outcome.is_halt() {
            return None;
        }
        peak = peak.max(r.peak_space);
    }
    Some(peak)
}

pub fn check_input_len(n: usize, caps: &Caps) -> Result<()> {
    check_cap("input length", n, caps.input_len.min(MAX_SET_LEN))
}

pub fn check_space(m: usize, caps: &Caps) -> Result<()> {
    if m == 0 {
        return Err(crate::Error::Invalid("space bound must be at least 1".into()));
    }
    check_cap("space bound", m, caps.space.min(MAX_SPACE))
}
