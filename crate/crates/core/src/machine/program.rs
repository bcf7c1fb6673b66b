//! Self-delimiting program encoding.
//!
//! A program is either a straight list of instructions closed by an `end`
//! code, or one of two combinators that glue two complete programs:
//!
//! * `compose P Q`: run `Q`, answering its oracle queries by running `P`.
//! * `pair P Q`: on input `a‖b` output the two bits `(P(a), Q(b))`, where `Q`
//!   queries `P` as its oracle.
//!
//! Opcode table (a complete prefix code):
//!
//! ```text
//! 00          exp 0       01          exp 1
//! 100         acc         101         end
//! 1100        rej         1101        skip
//! 11100       qchk        11101 b     out b
//! 111100      halt        111101      rout
//! 1111100 ccc d γ(k+1)    jmp         1111101     back
//! 1111110 b   write b     11111110 d  wmove d
//! 111111110   load        1111111110  compose
//! 1111111111  pair
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{gamma_decode, gamma_encode, BitString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cond {
    Always,
    In0,
    In1,
    InEnd,
    InStart,
    Work1,
    /// Consumes one bit of the random tape.
    Rand1,
    /// Queries the oracle with the first `n` work cells.
    Oracle,
}

impl Cond {
    const ALL: [Cond; 8] = [
        Cond::Always,
        Cond::In0,
        Cond::In1,
        Cond::InEnd,
        Cond::InStart,
        Cond::Work1,
        Cond::Rand1,
        Cond::Oracle,
    ];

    fn code(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).unwrap()
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Cond::Always => "always",
            Cond::In0 => "in0",
            Cond::In1 => "in1",
            Cond::InEnd => "end",
            Cond::InStart => "start",
            Cond::Work1 => "work1",
            Cond::Rand1 => "rand1",
            Cond::Oracle => "oracle",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.mnemonic() == s)
    }

    pub fn all() -> [Cond; 8] {
        Self::ALL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    /// Input symbol must equal the bit: advance, else reject.
    Exp(bool),
    Acc,
    Rej,
    /// Input head right (stays on the right marker).
    Skip,
    /// Input head left (stays on the left marker).
    Back,
    /// Copy the input onto work cells `0..n`, query the oracle, reject on "no".
    QChk,
    Out(bool),
    /// Halt with the output buffer as result.
    Halt,
    /// Append the next random-tape bit to the output.
    Rout,
    Jump { cond: Cond, back: bool, dist: u32 },
    Write(bool),
    /// Work head move, `true` = right.
    WMove(bool),
    /// Copy the input onto work cells `0..n`.
    Load,
}

impl Op {
    pub fn encode(&self, out: &mut Vec<bool>) {
        fn put(out: &mut Vec<bool>, s: &str) {
            out.extend(s.bytes().map(|c| c == b'1'));
        }
        match *self {
            Op::Exp(b) => {
                put(out, "0");
                out.push(b);
            }
            Op::Acc => put(out, "100"),
            Op::Rej => put(out, "1100"),
            Op::Skip => put(out, "1101"),
            Op::QChk => put(out, "11100"),
            Op::Out(b) => {
                put(out, "11101");
                out.push(b);
            }
            Op::Halt => put(out, "111100"),
            Op::Rout => put(out, "111101"),
            Op::Jump { cond, back, dist } => {
                put(out, "1111100");
                let c = cond.code();
                out.extend([c & 4 != 0, c & 2 != 0, c & 1 != 0]);
                out.push(back);
                gamma_encode(dist as u64 + 1, out);
            }
            Op::Back => put(out, "1111101"),
            Op::Write(b) => {
                put(out, "1111110");
                out.push(b);
            }
            Op::WMove(d) => {
                put(out, "11111110");
                out.push(d);
            }
            Op::Load => put(out, "111111110"),
        }
    }

    pub fn encoded_len(&self) -> usize {
        match *self {
            Op::Exp(_) => 2,
            Op::Acc => 3,
            Op::Rej | Op::Skip => 4,
            Op::QChk => 5,
            Op::Out(_) | Op::Halt | Op::Rout => 6,
            Op::Back => 7,
            Op::Jump { dist, .. } => 11 + crate::bits::gamma_len(dist as u64 + 1),
            Op::Write(_) => 8,
            Op::WMove(_) | Op::Load => 9,
        }
    }

    pub fn uses_oracle(&self) -> bool {
        matches!(
            self,
            Op::QChk
                | Op::Jump {
                    cond: Cond::Oracle,
                    ..
                }
        )
    }

    /// Jump target for an instruction at `pc`, if it is in range `0..=len`.
    pub fn target(&self, pc: usize, len: usize) -> Option<usize> {
        match *self {
            Op::Jump { back, dist, .. } => {
                let t = if back {
                    pc.checked_sub(dist as usize)?
                } else {
                    pc + 1 + dist as usize
                };
                (t <= len).then_some(t)
            }
            _ => None,
        }
    }
}

pub(crate) const END: &str = "101";
const COMPOSE: &str = "1111111110";
const PAIR: &str = "1111111111";
pub const COMBINATOR_OVERHEAD: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Body {
    Ops(Vec<Op>),
    Compose { oracle: Box<Program>, main: Box<Program> },
    Pair { first: Box<Program>, second: Box<Program> },
}

/// A decoded program together with the exact bits it was decoded from.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Program {
    code: BitString,
    body: Body,
    valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("encoding ends inside an instruction")]
    Truncated,
    #[error("{0} trailing bits after the end code")]
    Trailing(usize),
    #[error("jump at instruction {0} leaves the program")]
    JumpOutOfRange(usize),
    #[error("combinator code after instruction {0}")]
    MisplacedCombinator(usize),
}

impl Program {
    pub fn from_ops(ops: Vec<Op>) -> Result<Self, DecodeError> {
        check_jumps(&ops)?;
        let body = Body::Ops(ops);
        Ok(Self::from_body(body))
    }

    pub fn compose(oracle: Program, main: Program) -> Self {
        Self::from_body(Body::Compose {
            oracle: Box::new(oracle),
            main: Box::new(main),
        })
    }

    pub fn pair(first: Program, second: Program) -> Self {
        Self::from_body(Body::Pair {
            first: Box::new(first),
            second: Box::new(second),
        })
    }

    fn from_body(body: Body) -> Self {
        let mut bits = Vec::new();
        encode_body(&body, &mut bits);
        Self {
            code: BitString::from_bits(bits),
            body,
            valid: true,
        }
    }

    /// The canonical always-reject program (an empty instruction list).
    pub fn always_reject() -> Self {
        Self::from_body(Body::Ops(Vec::new()))
    }

    pub fn always_accept() -> Self {
        Self::from_body(Body::Ops(vec![Op::Acc]))
    }

    /// Strict decoding: the whole bit string must be one valid program.
    pub fn parse(code: &BitString) -> Result<Self, DecodeError> {
        let mut pos = 0;
        let body = decode_body(code.bits(), &mut pos)?;
        if pos != code.len() {
            return Err(DecodeError::Trailing(code.len() - pos));
        }
        Ok(Self {
            code: code.clone(),
            body,
            valid: true,
        })
    }

    /// Decoding that never fails: invalid encodings keep their length but
    /// behave as the always-reject program.
    pub fn decode(code: &BitString) -> Self {
        Self::parse(code).unwrap_or_else(|_| Self {
            code: code.clone(),
            body: Body::Ops(Vec::new()),
            valid: false,
        })
    }

    pub fn code(&self) -> &BitString {
        &self.code
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    /// Program length in bits.
    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn to_hex(&self) -> String {
        self.code.to_hex()
    }

    /// Whether running this program can consult the oracle supplied from outside.
    pub fn queries_outer_oracle(&self) -> bool {
        match &self.body {
            Body::Ops(ops) => ops.iter().any(Op::uses_oracle),
            Body::Compose { oracle, .. } => oracle.queries_outer_oracle(),
            Body::Pair { first, .. } => first.queries_outer_oracle(),
        }
    }

    /// Number of control points (instructions plus the fall-off point),
    /// summed over nested programs.
    pub fn control_points(&self) -> usize {
        match &self.body {
            Body::Ops(ops) => ops.len() + 1,
            Body::Compose { oracle, main } => oracle.control_points() + main.control_points(),
            Body::Pair { first, second } => first.control_points() + second.control_points(),
        }
    }

    /// Canonical order: length first, then lexicographic on the code.
    pub fn canonical_key(&self) -> (usize, &BitString) {
        (self.len(), &self.code)
    }
}

impl Serialize for Program {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Program({})", self.to_hex())
    }
}

fn check_jumps(ops: &[Op]) -> Result<(), DecodeError> {
    for (pc, op) in ops.iter().enumerate() {
        if matches!(op, Op::Jump { .. }) && op.target(pc, ops.len()).is_none() {
            return Err(DecodeError::JumpOutOfRange(pc));
        }
    }
    Ok(())
}

fn encode_body(body: &Body, out: &mut Vec<bool>) {
    let put = |out: &mut Vec<bool>, s: &str| out.extend(s.bytes().map(|c| c == b'1'));
    match body {
        Body::Ops(ops) => {
            for op in ops {
                op.encode(out);
            }
            put(out, END);
        }
        Body::Compose { oracle, main } => {
            put(out, COMPOSE);
            out.extend_from_slice(oracle.code.bits());
            out.extend_from_slice(main.code.bits());
        }
        Body::Pair { first, second } => {
            put(out, PAIR);
            out.extend_from_slice(first.code.bits());
            out.extend_from_slice(second.code.bits());
        }
    }
}

enum Token {
    Op(Op),
    End,
    Compose,
    Pair,
}

fn next_token(bits: &[bool], pos: &mut usize) -> Result<Token, DecodeError> {
    let mut take = || -> Result<bool, DecodeError> {
        let b = *bits.get(*pos).ok_or(DecodeError::Truncated)?;
        *pos += 1;
        Ok(b)
    };
    // Count leading ones (at most 10) to select the opcode group.
    if !take()? {
        return Ok(Token::Op(Op::Exp(take()?)));
    }
    if !take()? {
        return Ok(if take()? { Token::End } else { Token::Op(Op::Acc) });
    }
    if !take()? {
        return Ok(Token::Op(if take()? { Op::Skip } else { Op::Rej }));
    }
    if !take()? {
        return Ok(if take()? {
            Token::Op(Op::Out(take()?))
        } else {
            Token::Op(Op::QChk)
        });
    }
    if !take()? {
        return Ok(Token::Op(if take()? { Op::Rout } else { Op::Halt }));
    }
    if !take()? {
        if take()? {
            return Ok(Token::Op(Op::Back));
        }
        let c = (take()? as usize) << 2 | (take()? as usize) << 1 | take()? as usize;
        let back = take()?;
        let d = gamma_decode(bits, pos).ok_or(DecodeError::Truncated)?;
        let dist = u32::try_from(d - 1).map_err(|_| DecodeError::Truncated)?;
        return Ok(Token::Op(Op::Jump {
            cond: Cond::ALL[c],
            back,
            dist,
        }));
    }
    if !take()? {
        return Ok(Token::Op(Op::Write(take()?)));
    }
    if !take()? {
        return Ok(Token::Op(Op::WMove(take()?)));
    }
    if !take()? {
        return Ok(Token::Op(Op::Load));
    }
    Ok(if take()? { Token::Pair } else { Token::Compose })
}

fn decode_body(bits: &[bool], pos: &mut usize) -> Result<Body, DecodeError> {
    let start = *pos;
    let mut ops = Vec::new();
    loop {
        match next_token(bits, pos)? {
            Token::Op(op) => ops.push(op),
            Token::End => break,
            tok @ (Token::Compose | Token::Pair) => {
                if !ops.is_empty() {
                    return Err(DecodeError::MisplacedCombinator(ops.len()));
                }
                let a = decode_sub(bits, pos)?;
                let b = decode_sub(bits, pos)?;
                return Ok(match tok {
                    Token::Compose => Body::Compose {
                        oracle: Box::new(a),
                        main: Box::new(b),
                    },
                    _ => Body::Pair {
                        first: Box::new(a),
                        second: Box::new(b),
                    },
                });
            }
        }
    }
    let _ = start;
    check_jumps(&ops)?;
    Ok(Body::Ops(ops))
}

fn decode_sub(bits: &[bool], pos: &mut usize) -> Result<Program, DecodeError> {
    let start = *pos;
    let body = decode_body(bits, pos)?;
    Ok(Program {
        code: BitString::from_bits(bits[start..*pos].to_vec()),
        body,
        valid: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn every_op_round_trips_with_its_length() {
        let mut ops = vec![
            Op::Exp(false),
            Op::Exp(true),
            Op::Acc,
            Op::Rej,
            Op::Skip,
            Op::Back,
            Op::QChk,
            Op::Out(true),
            Op::Halt,
            Op::Rout,
            Op::Write(true),
            Op::WMove(false),
            Op::Load,
        ];
        for cond in Cond::all() {
            ops.push(Op::Jump { cond, back: true, dist: 3 });
        }
        for op in &ops {
            let mut v = Vec::new();
            op.encode(&mut v);
            assert_eq!(v.len(), op.encoded_len(), "{op:?}");
        }
        let p = Program::from_ops(ops).unwrap();
        assert_eq!(Program::parse(p.code()).unwrap(), p);
    }

    #[test]
    fn canonical_short_programs() {
        assert_eq!(Program::always_reject().code().to_string(), "101");
        assert_eq!(Program::always_accept().code().to_string(), "100101");
        let p = Program::parse(&bits("010001100101")).unwrap();
        assert_eq!(
            p.body(),
            &Body::Ops(vec![Op::Exp(true), Op::Exp(false), Op::Exp(true), Op::Acc])
        );
    }

    #[test]
    fn invalid_encodings() {
        assert_eq!(Program::parse(&bits("01")), Err(DecodeError::Truncated));
        assert_eq!(Program::parse(&bits("1010")), Err(DecodeError::Trailing(1)));
        // jmp always +1 on a one-instruction program lands past the end.
        let j = Program::parse(&bits("11111000000010101"));
        assert_eq!(j, Err(DecodeError::JumpOutOfRange(0)));
        let bad = Program::decode(&bits("0"));
        assert!(!bad.is_valid());
        assert_eq!(bad.len(), 1);
        assert_eq!(bad.body(), &Body::Ops(vec![]));
        // compose after an instruction
        assert_eq!(
            Program::parse(&bits("1001111111110101101")),
            Err(DecodeError::MisplacedCombinator(1))
        );
    }

    #[test]
    fn combinators_concatenate_codes() {
        let a = Program::always_accept();
        let r = Program::always_reject();
        let c = Program::compose(a.clone(), r.clone());
        assert_eq!(c.len(), COMBINATOR_OVERHEAD + a.len() + r.len());
        assert_eq!(Program::parse(c.code()).unwrap(), c);
        let p = Program::pair(r, a);
        assert_eq!(Program::parse(p.code()).unwrap(), p);
    }
}
