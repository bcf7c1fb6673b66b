//! Textual assembler: one instruction per line, mirroring the code stream.
//!
//! ```text
//! # accepts exactly 101
//! exp 1
//! exp 0
//! exp 1
//! acc
//! end
//! ```
//!
//! Jumps are written `jmp <cond> +k` (to `pc + 1 + k`) or `jmp <cond> -k`
//! (to `pc - k`). `compose` and `pair` open a combinator whose two operands
//! follow, each closed by its own `end`.

use super::program::{Body, Cond, Op, Program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct AsmError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> AsmError {
    AsmError {
        line,
        msg: msg.into(),
    }
}

enum Item {
    Op(Op),
    End,
    Compose,
    Pair,
}

fn parse_bit(line: usize, s: Option<&str>) -> Result<bool, AsmError> {
    match s {
        Some("0") => Ok(false),
        Some("1") => Ok(true),
        other => Err(err(line, format!("expected bit, got {other:?}"))),
    }
}

fn parse_line(line: usize, text: &str) -> Result<Option<Item>, AsmError> {
    let text = text.split('#').next().unwrap().trim();
    if text.is_empty() {
        return Ok(None);
    }
    let mut words = text.split_whitespace();
    let mnemonic = words.next().unwrap();
    let arg = words.next();
    let extra = words.next();
    let item = match mnemonic {
        "exp" => Item::Op(Op::Exp(parse_bit(line, arg)?)),
        "acc" => Item::Op(Op::Acc),
        "rej" => Item::Op(Op::Rej),
        "skip" => Item::Op(Op::Skip),
        "back" => Item::Op(Op::Back),
        "qchk" => Item::Op(Op::QChk),
        "out" => Item::Op(Op::Out(parse_bit(line, arg)?)),
        "halt" => Item::Op(Op::Halt),
        "rout" => Item::Op(Op::Rout),
        "write" => Item::Op(Op::Write(parse_bit(line, arg)?)),
        "wmove" => Item::Op(Op::WMove(match arg {
            Some("l") => false,
            Some("r") => true,
            other => return Err(err(line, format!("expected l or r, got {other:?}"))),
        })),
        "load" => Item::Op(Op::Load),
        "end" => Item::End,
        "compose" => Item::Compose,
        "pair" => Item::Pair,
        "jmp" => {
            let cond = arg
                .and_then(Cond::from_mnemonic)
                .ok_or_else(|| err(line, format!("unknown condition {arg:?}")))?;
            let off = extra.ok_or_else(|| err(line, "missing jump offset"))?;
            let (back, digits) = match off.split_at(1) {
                ("+", d) => (false, d),
                ("-", d) => (true, d),
                _ => return Err(err(line, "offset must start with + or -")),
            };
            let dist = digits
                .parse()
                .map_err(|_| err(line, format!("bad offset {off:?}")))?;
            return Ok(Some(Item::Op(Op::Jump { cond, back, dist })));
        }
        other => return Err(err(line, format!("unknown mnemonic {other:?}"))),
    };
    if extra.is_some() || (arg.is_some() && !matches!(mnemonic, "exp" | "out" | "write" | "wmove")) {
        return Err(err(line, "unexpected operand"));
    }
    Ok(Some(item))
}

pub fn assemble(src: &str) -> Result<Program, AsmError> {
    let mut items = Vec::new();
    for (i, l) in src.lines().enumerate() {
        if let Some(item) = parse_line(i + 1, l)? {
            items.push((i + 1, item));
        }
    }
    let mut pos = 0;
    let p = assemble_items(&items, &mut pos)?;
    if let Some((line, _)) = items.get(pos) {
        return Err(err(*line, "text after the end of the program"));
    }
    Ok(p)
}

fn assemble_items(items: &[(usize, Item)], pos: &mut usize) -> Result<Program, AsmError> {
    let last_line = items.last().map_or(0, |(l, _)| *l);
    let mut ops = Vec::new();
    loop {
        let Some((line, item)) = items.get(*pos) else {
            return Err(err(last_line, "missing `end`"));
        };
        *pos += 1;
        match item {
            Item::Op(op) => ops.push(*op),
            Item::End => {
                return Program::from_ops(ops).map_err(|e| err(*line, e.to_string()));
            }
            Item::Compose | Item::Pair => {
                if !ops.is_empty() {
                    return Err(err(*line, "combinator must open a program"));
                }
                let a = assemble_items(items, pos)?;
                let b = assemble_items(items, pos)?;
                return Ok(if matches!(item, Item::Compose) {
                    Program::compose(a, b)
                } else {
                    Program::pair(a, b)
                });
            }
        }
    }
}

pub fn disassemble(p: &Program) -> String {
    let mut out = String::new();
    write_body(p, 0, &mut out);
    out
}

fn write_body(p: &Program, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match p.body() {
        Body::Ops(ops) => {
            for op in ops {
                out.push_str(&pad);
                out.push_str(&op_text(op));
                out.push('\n');
            }
            out.push_str(&pad);
            out.push_str("end\n");
        }
        Body::Compose { oracle: a, main: b } | Body::Pair { first: a, second: b } => {
            out.push_str(&pad);
            out.push_str(if matches!(p.body(), Body::Compose { .. }) {
                "compose\n"
            } else {
                "pair\n"
            });
            write_body(a, depth + 1, out);
            write_body(b, depth + 1, out);
        }
    }
}

fn op_text(op: &Op) -> String {
    let bit = |b: bool| if b { "1" } else { "0" };
    match *op {
        Op::Exp(b) => format!("exp {}", bit(b)),
        Op::Acc => "acc".into(),
        Op::Rej => "rej".into(),
        Op::Skip => "skip".into(),
        Op::Back => "back".into(),
        Op::QChk => "qchk".into(),
        Op::Out(b) => format!("out {}", bit(b)),
        Op::Halt => "halt".into(),
        Op::Rout => "rout".into(),
        Op::Write(b) => format!("write {}", bit(b)),
        Op::WMove(d) => format!("wmove {}", if d { "r" } else { "l" }),
        Op::Load => "load".into(),
        Op::Jump { cond, back, dist } => {
            format!("jmp {} {}{}", cond.mnemonic(), if back { '-' } else { '+' }, dist)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembles_nested_programs() {
        let src = "
            pair      # decide (a, b)
              acc
              end
              qchk    # b in first set
              acc
              end
        ";
        let p = assemble(src).unwrap();
        assert!(matches!(p.body(), Body::Pair { .. }));
        assert_eq!(assemble(&disassemble(&p)).unwrap(), p);
    }

    #[test]
    fn reports_errors_with_lines() {
        assert_eq!(assemble("exp 2\nend").unwrap_err().line, 1);
        assert_eq!(assemble("acc\n").unwrap_err().msg, "missing `end`");
        assert_eq!(assemble("jmp always +3\nend").unwrap_err().line, 2);
        assert!(assemble("acc\nend\nacc").is_err());
        assert!(assemble("acc 1\nend").is_err());
        assert!(assemble("acc\ncompose\nend\nend\nend").is_err());
    }

    #[test]
    fn jump_syntax() {
        let p = assemble("jmp rand1 -0\nwmove r\nend").unwrap();
        assert_eq!(disassemble(&p), "jmp rand1 -0\nwmove r\nend\n");
    }
}
