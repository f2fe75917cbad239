use std::collections::BTreeSet;

use super::{Block, BoolExpr, CmpOp, Instruction, JumpTarget, Program};
use crate::error::{Error, Result};
use crate::graph::{is_direction_char, DirectionSet, Path};

/// A whitespace-separated word and its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Word<'a> {
    col: usize,
    text: &'a str,
}

fn words(s: &str, base_col: usize) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if c.is_whitespace() {
            if let Some(st) = start.take() {
                out.push(Word {
                    col: base_col + s[..st].chars().count(),
                    text: &s[st..i],
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(Word {
            col: base_col + s[..st].chars().count(),
            text: &s[st..],
        });
    }
    out
}

fn strip_comment(s: &str) -> &str {
    match s.find('#') {
        Some(i) => &s[..i],
        None => s,
    }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn path_token(line: usize, w: Word<'_>) -> Result<Path> {
    if w.text == "_" {
        return Ok(Path::empty());
    }
    if w.text.contains('_') {
        return Err(Error::BadPath {
            line,
            col: w.col,
            token: w.text.to_string(),
        });
    }
    if let Some((i, c)) = w.text.char_indices().find(|&(_, c)| !is_direction_char(c)) {
        return Err(syntax(
            line,
            w.col + w.text[..i].chars().count(),
            format!("{c:?} is not a direction character"),
        ));
    }
    Ok(Path::from(w.text))
}

/// Text after the word `w` on the raw line, trimmed.
fn rest_after<'a>(raw: &'a str, w: Word<'_>) -> &'a str {
    let byte = raw.char_indices().nth(w.col - 1).map(|(b, _)| b).unwrap_or(raw.len());
    raw[byte + w.text.len()..].trim()
}

pub fn parse_program(text: &str) -> Result<Program> {
    let mut instructions = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut prologue_len: Option<usize> = None;
    let mut declared: Option<DirectionSet> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let all = words(raw, 1);
        let Some(&first) = all.first() else { continue };
        if first.text.starts_with('#') {
            continue;
        }

        if first.text.starts_with('.') {
            let ws = words(strip_comment(raw), 1);
            match first.text {
                ".block" => {
                    let [_, name] = ws[..] else {
                        return Err(syntax(line, first.col, ".block takes exactly one name"));
                    };
                    if blocks.iter().any(|b| b.name == name.text) {
                        return Err(syntax(line, name.col, format!("duplicate block {}", name.text)));
                    }
                    if prologue_len.is_none() {
                        prologue_len = Some(instructions.len());
                    }
                    blocks.push(Block {
                        name: name.text.to_string(),
                        start: instructions.len() + 1,
                        len: 0,
                    });
                }
                ".directions" => {
                    if declared.is_some() {
                        return Err(syntax(line, first.col, "duplicate .directions"));
                    }
                    let chars: String = ws[1..].iter().map(|w| w.text).collect();
                    let set = DirectionSet::parse(&chars).map_err(|e| syntax(line, first.col, e.to_string()))?;
                    declared = Some(set);
                }
                other => return Err(syntax(line, first.col, format!("unknown directive {other}"))),
            }
            continue;
        }

        let number = instructions.len() + 1;
        let mut pos = 0;
        if first.text.chars().all(|c| c.is_ascii_digit()) {
            let found: usize = first
                .text
                .parse()
                .map_err(|_| syntax(line, first.col, "line number out of range"))?;
            if found != number {
                return Err(Error::LineNumber {
                    line,
                    expected: number,
                    found,
                });
            }
            pos = 1;
        }
        let Some(&kw) = all.get(pos) else {
            return Err(syntax(line, first.col, "line number without an instruction"));
        };
        let instr = match kw.text {
            "stop" => {
                let rest = rest_after(raw, kw);
                Instruction::Stop((!rest.is_empty()).then(|| rest.to_string()))
            }
            "skip" => Instruction::Skip(rest_after(raw, kw).to_string()),
            _ => {
                let body = strip_comment(raw);
                let ws = words(body, 1);
                let args = &ws[pos + 1..];
                parse_instruction(line, kw, args, body)?
            }
        };
        instructions.push(instr);
        if let Some(b) = blocks.last_mut() {
            b.len += 1;
        }
    }

    let prologue_len = prologue_len.unwrap_or(instructions.len());
    let (directions, declared_directions) = match declared {
        Some(d) => (d, true),
        None => {
            let chars: BTreeSet<char> = instructions.iter().flat_map(|i| i.direction_chars()).collect();
            // a program that mentions no direction still needs a non-empty set
            let set = if chars.is_empty() {
                DirectionSet::parse("o")?
            } else {
                DirectionSet::new(chars)?
            };
            (set, false)
        }
    };
    Ok(Program {
        instructions,
        prologue_len,
        blocks,
        directions,
        declared_directions,
    })
}

fn parse_instruction(line: usize, kw: Word<'_>, args: &[Word<'_>], body: &str) -> Result<Instruction> {
    let arity = |lo: usize, hi: usize| -> Result<()> {
        if args.len() < lo || args.len() > hi {
            let col = args.get(hi).map_or(kw.col, |w| w.col);
            Err(syntax(line, col, format!("wrong number of operands for {}", kw.text)))
        } else {
            Ok(())
        }
    };
    match kw.text {
        "new" => {
            arity(0, 1)?;
            Ok(Instruction::New(args.first().map(|w| w.text.to_string())))
        }
        "ren" => {
            arity(1, 1)?;
            Ok(Instruction::Ren(args[0].text.to_string()))
        }
        "set" => {
            arity(1, 2)?;
            let full = path_token(line, args[0])?;
            let mut prefix: String = full.as_str().to_string();
            let Some(dir) = prefix.pop() else {
                return Err(syntax(
                    line,
                    args[0].col,
                    "set needs a non-empty path ending in a direction",
                ));
            };
            let target = match args.get(1) {
                Some(&w) => path_token(line, w)?,
                None => Path::empty(),
            };
            Ok(Instruction::Set {
                prefix: Path::from(prefix.as_str()),
                dir,
                target,
            })
        }
        "ctr" | "center" => {
            arity(1, 1)?;
            Ok(Instruction::Ctr(path_token(line, args[0])?))
        }
        "if" => {
            arity(3, 3)?;
            let left = path_token(line, args[0])?;
            let right = path_token(line, args[1])?;
            let t = args[2];
            let jump = parse_jump(t.text).ok_or_else(|| syntax(line, t.col, format!("bad jump target {}", t.text)))?;
            Ok(Instruction::If { left, right, jump })
        }
        "match" => {
            let Some(first) = args.first() else {
                return Err(syntax(line, kw.col, "match needs an expression"));
            };
            let byte = body.char_indices().nth(first.col - 1).map_or(body.len(), |(b, _)| b);
            let expr = ExprParser::new(line, &body[byte..], first.col)?.parse()?;
            Ok(Instruction::Match(expr))
        }
        other => Err(syntax(line, kw.col, format!("unknown instruction {other}"))),
    }
}

fn parse_jump(s: &str) -> Option<JumpTarget> {
    if let Some(r) = s.strip_prefix('+') {
        r.chars()
            .all(|c| c.is_ascii_digit())
            .then(|| r.parse().ok().map(JumpTarget::Relative))?
    } else if let Some(r) = s.strip_prefix('-') {
        r.chars()
            .all(|c| c.is_ascii_digit())
            .then(|| r.parse::<i64>().ok().map(|v| JumpTarget::Relative(-v)))?
    } else {
        s.chars()
            .all(|c| c.is_ascii_digit())
            .then(|| s.parse().ok().map(JumpTarget::Absolute))?
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    LParen,
    RParen,
    EqEq,
    NotEq,
    And,
    Or,
    Not,
    Path(&'a str),
}

struct ExprParser<'a> {
    line: usize,
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end_col: usize,
}

impl<'a> ExprParser<'a> {
    fn new(line: usize, src: &'a str, base_col: usize) -> Result<Self> {
        let mut toks = Vec::new();
        let mut it = src.char_indices().peekable();
        let col_of = |b: usize| base_col + src[..b].chars().count();
        while let Some(&(b, c)) = it.peek() {
            if c.is_whitespace() {
                it.next();
                continue;
            }
            match c {
                '(' => {
                    toks.push((col_of(b), Tok::LParen));
                    it.next();
                }
                ')' => {
                    toks.push((col_of(b), Tok::RParen));
                    it.next();
                }
                '=' | '!' => {
                    it.next();
                    match it.peek() {
                        Some(&(_, '=')) => {
                            it.next();
                            toks.push((col_of(b), if c == '=' { Tok::EqEq } else { Tok::NotEq }));
                        }
                        _ => return Err(syntax(line, col_of(b), format!("expected `{c}=`"))),
                    }
                }
                _ => {
                    let start = b;
                    let mut end = src.len();
                    while let Some(&(b2, c2)) = it.peek() {
                        if c2.is_whitespace() || "()=!".contains(c2) {
                            end = b2;
                            break;
                        }
                        it.next();
                    }
                    let word = &src[start..end];
                    let tok = match word {
                        "AND" => Tok::And,
                        "OR" => Tok::Or,
                        "NOT" => Tok::Not,
                        _ => {
                            path_token(
                                line,
                                Word {
                                    col: col_of(start),
                                    text: word,
                                },
                            )?;
                            Tok::Path(word)
                        }
                    };
                    toks.push((col_of(start), tok));
                }
            }
        }
        Ok(ExprParser {
            line,
            toks,
            pos: 0,
            end_col: base_col + src.chars().count(),
        })
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(c, _)| *c)
    }

    fn err(&self, msg: &str) -> Error {
        syntax(self.line, self.col(), msg)
    }

    fn parse(mut self) -> Result<BoolExpr> {
        let e = self.or_expr()?;
        if self.pos != self.toks.len() {
            return Err(self.err("unexpected token after expression"));
        }
        Ok(e)
    }

    fn or_expr(&mut self) -> Result<BoolExpr> {
        let mut items = vec![self.and_expr()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            items.push(self.and_expr()?);
        }
        Ok(BoolExpr::any(items))
    }

    fn and_expr(&mut self) -> Result<BoolExpr> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(BoolExpr::all(items))
    }

    fn unary(&mut self) -> Result<BoolExpr> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(BoolExpr::Not(Box::new(self.unary()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.or_expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Path(_)) => self.comparison(),
            _ => Err(self.err("expected a comparison")),
        }
    }

    fn comparison(&mut self) -> Result<BoolExpr> {
        let lhs = self.path()?;
        let op = match self.peek() {
            Some(Tok::EqEq) => CmpOp::Eq,
            Some(Tok::NotEq) => CmpOp::Neq,
            _ => return Err(self.err("expected `==` or `!=`")),
        };
        self.pos += 1;
        let rhs = self.path()?;
        Ok(BoolExpr::Cmp { lhs, op, rhs })
    }

    fn path(&mut self) -> Result<Path> {
        match self.peek() {
            Some(&Tok::Path(p)) => {
                let col = self.col();
                self.pos += 1;
                // `_ e` reads as an attempt to extend the empty path
                if let Some(&Tok::Path(next)) = self.peek() {
                    if p == "_" || next == "_" {
                        return Err(Error::BadPath {
                            line: self.line,
                            col,
                            token: format!("{p} {next}"),
                        });
                    }
                }
                Ok(Path::from(p))
            }
            _ => Err(self.err("expected a path")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_with_default_target() {
        let p = parse_program("set 0").unwrap();
        assert_eq!(
            p.instructions[0],
            Instruction::Set {
                prefix: Path::empty(),
                dir: '0',
                target: Path::empty()
            }
        );
    }

    #[test]
    fn set_with_prefix_and_target() {
        let p = parse_program("set ew e\nset e ee").unwrap();
        assert_eq!(
            p.instructions[0],
            Instruction::Set {
                prefix: Path::from("e"),
                dir: 'w',
                target: Path::from("e")
            }
        );
        assert_eq!(
            p.instructions[1],
            Instruction::Set {
                prefix: Path::empty(),
                dir: 'e',
                target: Path::from("ee")
            }
        );
    }

    #[test]
    fn relative_and_absolute_jumps() {
        let p = parse_program("if e o +2\nif _ _ -1\nif ab b 1").unwrap();
        assert_eq!(
            p.instructions[0],
            Instruction::If {
                left: Path::from("e"),
                right: Path::from("o"),
                jump: JumpTarget::Relative(2)
            }
        );
        assert_eq!(
            p.instructions[1],
            Instruction::If {
                left: Path::empty(),
                right: Path::empty(),
                jump: JumpTarget::Relative(-1)
            }
        );
        assert!(matches!(
            p.instructions[2],
            Instruction::If {
                jump: JumpTarget::Absolute(1),
                ..
            }
        ));
    }

    #[test]
    fn underscore_inside_token_is_bad_path() {
        let err = parse_program("match 0 == _e").unwrap_err();
        assert_eq!(err.code(), "E_BAD_PATH");
        let err = parse_program("set e_ o").unwrap_err();
        assert_eq!(err.code(), "E_BAD_PATH");
    }

    #[test]
    fn underscore_juxtaposed_with_a_path_is_bad_path() {
        let err = parse_program("match 0 == _ e").unwrap_err();
        assert_eq!(err.code(), "E_BAD_PATH");
        let err = parse_program("match e _ == o").unwrap_err();
        assert_eq!(err.code(), "E_BAD_PATH");
        // two ordinary paths in a row are just a syntax error
        assert_eq!(parse_program("match 0 == o e").unwrap_err().code(), "E_SYNTAX");
    }

    #[test]
    fn explicit_line_numbers_must_match() {
        assert!(parse_program("1 skip\n2 stop").is_ok());
        let err = parse_program("1 skip\n3 stop").unwrap_err();
        assert_eq!(
            err,
            Error::LineNumber {
                line: 2,
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn directives_and_comments_take_no_number() {
        let src = "# header\n\nskip\n.block R\n# inner\nmatch a == _\nstop";
        let p = parse_program(src).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.prologue_len, 1);
        assert_eq!(
            p.blocks,
            vec![Block {
                name: "R".into(),
                start: 2,
                len: 2
            }]
        );
    }

    #[test]
    fn stop_and_skip_keep_text_verbatim() {
        let p = parse_program("skip A->BBB, BB->A; A # not a comment\nstop done # here\nstop").unwrap();
        assert_eq!(
            p.instructions[0],
            Instruction::Skip("A->BBB, BB->A; A # not a comment".into())
        );
        assert_eq!(p.instructions[1], Instruction::Stop(Some("done # here".into())));
        assert_eq!(p.instructions[2], Instruction::Stop(None));
    }

    #[test]
    fn expression_precedence_and_grouping() {
        let p = parse_program("match NOT a == b OR c != _ AND (d == e OR f == g)").unwrap();
        let Instruction::Match(e) = &p.instructions[0] else {
            panic!()
        };
        let expected = BoolExpr::Or(vec![
            BoolExpr::Not(Box::new(BoolExpr::eq("a", "b"))),
            BoolExpr::And(vec![
                BoolExpr::neq("c", "_"),
                BoolExpr::Or(vec![BoolExpr::eq("d", "e"), BoolExpr::eq("f", "g")]),
            ]),
        ]);
        assert_eq!(e, &expected);
    }

    #[test]
    fn operators_need_no_spaces() {
        let p = parse_program("match e!=o AND(e0==o)").unwrap();
        let Instruction::Match(e) = &p.instructions[0] else {
            panic!()
        };
        assert_eq!(
            e,
            &BoolExpr::And(vec![BoolExpr::neq("e", "o"), BoolExpr::eq("e0", "o")])
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_program("stop\n  frob x").unwrap_err() {
            Error::Syntax { line, col, .. } => assert_eq!((line, col), (2, 3)),
            e => panic!("{e}"),
        }
        match parse_program("match a == ").unwrap_err() {
            Error::Syntax { line, .. } => assert_eq!(line, 1),
            e => panic!("{e}"),
        }
        assert_eq!(parse_program("if a b x").unwrap_err().code(), "E_SYNTAX");
        assert_eq!(parse_program("set _").unwrap_err().code(), "E_SYNTAX");
        assert_eq!(parse_program(".block").unwrap_err().code(), "E_SYNTAX");
        assert_eq!(parse_program(".block A\n.block A").unwrap_err().code(), "E_SYNTAX");
    }

    #[test]
    fn inferred_and_declared_directions() {
        let p = parse_program("set e we\nmatch 0 == o").unwrap();
        assert_eq!(p.directions.to_string(), "0eow");
        assert!(!p.declared_directions);
        let p = parse_program(".directions o e w 0 1\nset e we").unwrap();
        assert_eq!(p.directions.to_string(), "01eow");
        assert!(p.declared_directions);
    }

    #[test]
    fn center_is_a_synonym_for_ctr() {
        let p = parse_program("center e\nctr e").unwrap();
        assert_eq!(p.instructions[0], p.instructions[1]);
    }
}
