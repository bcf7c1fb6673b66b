use serde::Serialize;

use super::program::{Body, Cond, Op, Program};
use crate::bits::{BitString, StringSet};

/// Widest work tape the interpreter packs into a machine word.
pub const MAX_SPACE: usize = 63;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Accept,
    Reject,
    Output(BitString),
    SpaceExceeded,
    Loop,
}

impl Outcome {
    pub fn is_halt(&self) -> bool {
        matches!(self, Outcome::Accept | Outcome::Reject | Outcome::Output(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunResult {
    pub outcome: Outcome,
    pub steps: u64,
    pub peak_space: usize,
}

/// Membership oracle supplied from outside the program.
#[derive(Clone, Copy, Default)]
pub enum Oracle<'a> {
    #[default]
    None,
    Set(&'a StringSet),
    Fn(&'a (dyn Fn(&[bool]) -> bool + Sync)),
}

impl Oracle<'_> {
    fn member(&self, q: &[bool]) -> bool {
        match self {
            Oracle::None => false,
            Oracle::Set(s) => s.contains_bits(q),
            Oracle::Fn(f) => f(q),
        }
    }
}

#[derive(Clone, Copy)]
pub struct MachineConfig<'a> {
    /// Work tape cells, `1..=MAX_SPACE`.
    pub space: usize,
    pub input: &'a [bool],
    pub oracle: Oracle<'a>,
    pub random_tape: Option<&'a [bool]>,
}

impl<'a> MachineConfig<'a> {
    pub fn new(space: usize, input: &'a [bool]) -> Self {
        Self {
            space,
            input,
            oracle: Oracle::None,
            random_tape: None,
        }
    }

    pub fn with_oracle(mut self, oracle: Oracle<'a>) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn with_random_tape(mut self, tape: &'a [bool]) -> Self {
        self.random_tape = Some(tape);
        self
    }
}

/// Runs `p` under the space bound of `cfg`. Never fails: every way a run
/// can go wrong is an [`Outcome`].
pub fn run(p: &Program, cfg: &MachineConfig) -> RunResult {
    assert!(
        (1..=MAX_SPACE).contains(&cfg.space),
        "space bound {} outside 1..={MAX_SPACE}",
        cfg.space
    );
    exec(p, cfg.input, cfg.space, &Chain::External(cfg.oracle), cfg.random_tape)
}

enum Chain<'a> {
    External(Oracle<'a>),
    Program {
        program: &'a Program,
        outer: &'a Chain<'a>,
    },
}

enum Answer {
    Yes(u64, usize),
    No(u64, usize),
    Abort(RunResult),
}

impl Chain<'_> {
    /// Answers a query; `budget` is the space left beside the caller's cells.
    fn ask(&self, q: &[bool], budget: usize) -> Answer {
        match self {
            Chain::External(o) => {
                if o.member(q) {
                    Answer::Yes(0, 0)
                } else {
                    Answer::No(0, 0)
                }
            }
            Chain::Program { program, outer } => {
                let r = exec(program, q, budget, outer, None);
                match r.outcome {
                    Outcome::Accept => Answer::Yes(r.steps, r.peak_space),
                    Outcome::Reject | Outcome::Output(_) => Answer::No(r.steps, r.peak_space),
                    Outcome::SpaceExceeded | Outcome::Loop => Answer::Abort(r),
                }
            }
        }
    }
}

fn exec(p: &Program, input: &[bool], space: usize, chain: &Chain, rand: Option<&[bool]>) -> RunResult {
    match p.body() {
        Body::Ops(ops) => exec_ops(ops, input, space, chain, rand),
        Body::Compose { oracle, main } => exec(
            main,
            input,
            space,
            &Chain::Program {
                program: oracle,
                outer: chain,
            },
            rand,
        ),
        Body::Pair { first, second } => {
            let reject = |steps, peak_space| RunResult {
                outcome: Outcome::Reject,
                steps,
                peak_space,
            };
            if !input.len().is_multiple_of(2) {
                return reject(0, 0);
            }
            let (a, b) = input.split_at(input.len() / 2);
            let r1 = exec(first, a, space, chain, None);
            let bit1 = match r1.outcome {
                Outcome::Accept => true,
                Outcome::Reject => false,
                Outcome::Output(_) => return reject(r1.steps, r1.peak_space),
                _ => return r1,
            };
            let inner = Chain::Program {
                program: first,
                outer: chain,
            };
            let r2 = exec(second, b, space, &inner, rand);
            let steps = r1.steps + r2.steps;
            let peak_space = r1.peak_space.max(r2.peak_space);
            let bit2 = match r2.outcome {
                Outcome::Accept => true,
                Outcome::Reject => false,
                Outcome::Output(_) => return reject(steps, peak_space),
                other => {
                    return RunResult {
                        outcome: other,
                        steps,
                        peak_space,
                    }
                }
            };
            RunResult {
                outcome: Outcome::Output(BitString::from_bits(vec![bit1, bit2])),
                steps,
                peak_space,
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Config {
    pc: usize,
    head: usize,
    whead: usize,
    tape: u64,
    rpos: usize,
}

/// Upper bound on distinct configurations; exceeding it in steps proves a loop.
pub fn configuration_bound(points: usize, n: usize, space: usize, tape_len: usize) -> u128 {
    (points as u128) * (n as u128 + 2) * (space as u128 + 1) * (1u128 << space) * (tape_len as u128 + 1)
}

fn exec_ops(ops: &[Op], input: &[bool], space: usize, chain: &Chain, rand: Option<&[bool]>) -> RunResult {
    let n = input.len();
    let rand = rand.unwrap_or(&[]);
    let bound = configuration_bound(ops.len() + 1, n, space, rand.len());
    let mut c = Config {
        pc: 0,
        head: 1,
        whead: 0,
        tape: 0,
        rpos: 0,
    };
    let mut peak = 0usize;
    let mut steps = 0u64;
    let mut out: Vec<bool> = Vec::new();
    // Brent cycle detection over configurations; the output buffer does not
    // influence transitions, so a repeated configuration is a loop.
    let mut saved: Option<Config> = None;
    let mut power = 1u64;
    let mut lam = 0u64;

    macro_rules! finish {
        ($o:expr) => {
            return RunResult {
                outcome: $o,
                steps,
                peak_space: peak,
            }
        };
    }

    loop {
        if c.pc == ops.len() {
            finish!(Outcome::Reject);
        }
        if saved == Some(c) || steps as u128 > bound {
            finish!(Outcome::Loop);
        }
        lam += 1;
        if lam == power {
            saved = Some(c);
            power *= 2;
            lam = 0;
        }
        steps += 1;
        let sym = |head: usize| -> Option<bool> { (1..=n).contains(&head).then(|| input[head - 1]) };
        let mut next = c.pc + 1;
        match ops[c.pc] {
            Op::Exp(b) => {
                if sym(c.head) == Some(b) {
                    c.head += 1;
                } else {
                    finish!(Outcome::Reject);
                }
            }
            Op::Acc => finish!(Outcome::Accept),
            Op::Rej => finish!(Outcome::Reject),
            Op::Halt => finish!(Outcome::Output(BitString::from_bits(out))),
            Op::Skip => c.head = (c.head + 1).min(n + 1),
            Op::Back => c.head = c.head.saturating_sub(1),
            Op::Out(b) => out.push(b),
            Op::Rout => match rand.get(c.rpos) {
                Some(&b) => {
                    out.push(b);
                    c.rpos += 1;
                }
                None => finish!(Outcome::Reject),
            },
            Op::Write(b) => {
                if c.whead >= space {
                    peak = space;
                    finish!(Outcome::SpaceExceeded);
                }
                peak = peak.max(c.whead + 1);
                if b {
                    c.tape |= 1 << c.whead;
                } else {
                    c.tape &= !(1 << c.whead);
                }
            }
            Op::WMove(right) => {
                if right {
                    if c.whead + 1 >= space {
                        peak = space;
                        finish!(Outcome::SpaceExceeded);
                    }
                    c.whead += 1;
                    peak = peak.max(c.whead + 1);
                } else {
                    c.whead = c.whead.saturating_sub(1);
                }
            }
            Op::Load | Op::QChk => {
                if n > space {
                    peak = space;
                    finish!(Outcome::SpaceExceeded);
                }
                peak = peak.max(n);
                let keep = if n >= 64 { 0 } else { !0u64 << n };
                let loaded = input
                    .iter()
                    .enumerate()
                    .fold(0u64, |t, (i, &b)| t | (b as u64) << i);
                c.tape = (c.tape & keep) | loaded;
                if ops[c.pc] == Op::QChk {
                    match query(&c, n, space, peak, chain, &mut steps) {
                        Ok((yes, p)) => {
                            peak = p;
                            if !yes {
                                finish!(Outcome::Reject);
                            }
                        }
                        Err(r) => return r,
                    }
                }
            }
            op @ Op::Jump { cond, .. } => {
                let taken = match cond {
                    Cond::Always => true,
                    Cond::In0 => sym(c.head) == Some(false),
                    Cond::In1 => sym(c.head) == Some(true),
                    Cond::InEnd => c.head == n + 1,
                    Cond::InStart => c.head == 0,
                    Cond::Work1 => {
                        if c.whead >= space {
                            peak = space;
                            finish!(Outcome::SpaceExceeded);
                        }
                        peak = peak.max(c.whead + 1);
                        c.tape >> c.whead & 1 == 1
                    }
                    Cond::Rand1 => match rand.get(c.rpos) {
                        Some(&b) => {
                            c.rpos += 1;
                            b
                        }
                        None => finish!(Outcome::Reject),
                    },
                    Cond::Oracle => {
                        if n > space {
                            peak = space;
                            finish!(Outcome::SpaceExceeded);
                        }
                        peak = peak.max(n);
                        match query(&c, n, space, peak, chain, &mut steps) {
                            Ok((yes, p)) => {
                                peak = p;
                                yes
                            }
                            Err(r) => return r,
                        }
                    }
                };
                if taken {
                    next = op.target(c.pc, ops.len()).expect("jumps are validated at decode");
                }
            }
        }
        c.pc = next;
    }
}

/// Queries with work cells `0..n`; returns the answer and the updated peak.
fn query(
    c: &Config,
    n: usize,
    space: usize,
    peak: usize,
    chain: &Chain,
    steps: &mut u64,
) -> Result<(bool, usize), RunResult> {
    let q: Vec<bool> = (0..n).map(|i| c.tape >> i & 1 == 1).collect();
    match chain.ask(&q, space - peak) {
        Answer::Yes(s, p) => {
            *steps += s;
            Ok((true, peak.max(peak + p)))
        }
        Answer::No(s, p) => {
            *steps += s;
            Ok((false, peak.max(peak + p)))
        }
        Answer::Abort(r) => Err(RunResult {
            outcome: r.outcome,
            steps: *steps + r.steps,
            peak_space: (peak + r.peak_space).min(space),
        }),
    }
}
