//! Text grammar for weighted orders and flag descriptors.
//!
//! ```text
//! order      := atom ('+' atom)*
//! atom       := 'seq' '[' size (',' size)* ']' | 'omega' '(' size ')' | 'omegastar' '(' size ')'
//! size       := <positive integer> | 'inf'
//! descriptor := 'gen' ':' order
//!             | ('orth' | 'symp') ':' 'half' '=' order ';' 'middle' '=' ('empty' | size)
//! variety    := ('A' | 'B' | 'C' | 'D') '(' dim (',' dim)* ';' ambient ')'
//! ```
//!
//! Keywords are case-insensitive and whitespace (including newlines) is
//! free. Errors carry 1-based line and column numbers.

use crate::error::{Error, Result};
use crate::flag::{FiniteFlagVariety, FlagDescriptor, FormType, LieType, Middle};
use crate::order::{Atom, BlockSize, WeightedOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Punct(char),
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(word.to_ascii_lowercase()),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            column += i - start;
            let value = digits.parse::<u64>().map_err(|_| Error::Syntax {
                line: l0,
                column: c0,
                message: format!("integer {digits} out of range"),
            })?;
            out.push(Spanned {
                tok: Tok::Num(value),
                line: l0,
                column: c0,
            });
            continue;
        }
        if "[](),+:;=".contains(c) {
            out.push(Spanned {
                tok: Tok::Punct(c),
                line: l0,
                column: c0,
            });
            column += 1;
            i += 1;
            continue;
        }
        return Err(Error::Syntax {
            line: l0,
            column: c0,
            message: format!("unexpected character {c:?}"),
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(w) => format!("'{w}'"),
            Tok::Num(n) => format!("'{n}'"),
            Tok::Punct(c) => format!("'{c}'"),
            Tok::End => "end of input".into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Punct(c) {
            self.bump();
            Ok(())
        } else {
            let found = Self::describe(&self.peek().tok);
            self.fail(format!("expected '{c}', found {found}"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.peek().tok == Tok::Ident(kw.into()) {
            self.bump();
            Ok(())
        } else {
            let found = Self::describe(&self.peek().tok);
            self.fail(format!("expected '{kw}', found {found}"))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.peek().tok == Tok::End {
            Ok(())
        } else {
            let found = Self::describe(&self.peek().tok);
            self.fail(format!("unexpected trailing input {found}"))
        }
    }

    fn size(&mut self) -> Result<BlockSize> {
        match self.peek().tok.clone() {
            Tok::Num(0) => self.fail("block size must be positive"),
            Tok::Num(n) => {
                self.bump();
                Ok(BlockSize::Finite(n))
            }
            Tok::Ident(w) if w == "inf" => {
                self.bump();
                Ok(BlockSize::Inf)
            }
            other => {
                let found = Self::describe(&other);
                self.fail(format!("expected block size or 'inf', found {found}"))
            }
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let Tok::Ident(word) = self.peek().tok.clone() else {
            let found = Self::describe(&self.peek().tok);
            return self.fail(format!("expected 'seq', 'omega' or 'omegastar', found {found}"));
        };
        match word.as_str() {
            "seq" => {
                self.bump();
                self.expect_punct('[')?;
                let mut sizes = Vec::new();
                if self.peek().tok != Tok::Punct(']') {
                    sizes.push(self.size()?);
                    while self.peek().tok == Tok::Punct(',') {
                        self.bump();
                        sizes.push(self.size()?);
                    }
                }
                self.expect_punct(']')?;
                Ok(Atom::Seq(sizes))
            }
            "omega" | "omegastar" => {
                self.bump();
                self.expect_punct('(')?;
                let d = self.size()?;
                self.expect_punct(')')?;
                Ok(if word == "omega" {
                    Atom::Omega(d)
                } else {
                    Atom::OmegaStar(d)
                })
            }
            _ => self.fail(format!(
                "expected 'seq', 'omega' or 'omegastar', found '{word}'"
            )),
        }
    }

    fn order(&mut self) -> Result<WeightedOrder> {
        let mut atoms = vec![self.atom()?];
        while self.peek().tok == Tok::Punct('+') {
            self.bump();
            atoms.push(self.atom()?);
        }
        WeightedOrder::new(atoms)
    }

    fn number(&mut self) -> Result<u64> {
        match self.peek().tok.clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            other => {
                let found = Self::describe(&other);
                self.fail(format!("expected an integer, found {found}"))
            }
        }
    }

    fn variety(&mut self) -> Result<FiniteFlagVariety> {
        let lie_type = match &self.peek().tok {
            Tok::Ident(w) if w.len() == 1 => w.parse::<LieType>().ok(),
            _ => None,
        };
        let Some(lie_type) = lie_type else {
            let found = Self::describe(&self.peek().tok);
            return self.fail(format!("expected a Lie type A, B, C or D, found {found}"));
        };
        self.bump();
        self.expect_punct('(')?;
        let mut dims = vec![self.number()?];
        while self.peek().tok == Tok::Punct(',') {
            self.bump();
            dims.push(self.number()?);
        }
        self.expect_punct(';')?;
        let ambient = self.number()?;
        self.expect_punct(')')?;
        FiniteFlagVariety::new(lie_type, ambient, dims)
    }

    fn middle(&mut self) -> Result<Middle> {
        if self.peek().tok == Tok::Ident("empty".into()) {
            self.bump();
            return Ok(Middle::Empty);
        }
        Ok(Middle::Block(self.size()?))
    }

    fn descriptor(&mut self) -> Result<FlagDescriptor> {
        let Tok::Ident(word) = self.peek().tok.clone() else {
            return self.fail("expected 'gen', 'orth' or 'symp'");
        };
        let form = match word.as_str() {
            "gen" => FormType::General,
            "orth" => FormType::Orthogonal,
            "symp" => FormType::Symplectic,
            _ => return self.fail(format!("expected 'gen', 'orth' or 'symp', found '{word}'")),
        };
        self.bump();
        self.expect_punct(':')?;
        if form == FormType::General {
            return Ok(FlagDescriptor::General(self.order()?));
        }
        self.expect_keyword("half")?;
        self.expect_punct('=')?;
        let half = self.order()?;
        self.expect_punct(';')?;
        self.expect_keyword("middle")?;
        self.expect_punct('=')?;
        let middle = self.middle()?;
        Ok(if form == FormType::Orthogonal {
            FlagDescriptor::Orthogonal { half, middle }
        } else {
            FlagDescriptor::Symplectic { half, middle }
        })
    }
}

pub fn parse_order(text: &str) -> Result<WeightedOrder> {
    let mut p = Parser::new(text)?;
    let order = p.order()?;
    p.expect_end()?;
    Ok(order)
}

/// Parses a descriptor without checking the semantic conventions; see
/// [`FlagDescriptor::validate`].
pub fn parse_descriptor(text: &str) -> Result<FlagDescriptor> {
    let mut p = Parser::new(text)?;
    let d = p.descriptor()?;
    p.expect_end()?;
    Ok(d)
}

/// Parses `T(d1,...,dk; n)`, the same shape [`FiniteFlagVariety`] displays as.
pub fn parse_variety(text: &str) -> Result<FiniteFlagVariety> {
    let mut p = Parser::new(text)?;
    let v = p.variety()?;
    p.expect_end()?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_descriptor_forms() {
        let d = parse_descriptor("gen: seq[1,inf]").unwrap();
        assert_eq!(d.to_string(), "gen: seq[1,inf]");
        let d = parse_descriptor("SYMP: half=seq[1]; middle=INF").unwrap();
        assert_eq!(d.to_string(), "symp: half=seq[1]; middle=inf");
        let d = parse_descriptor("orth:\n  half = omega(1);\n  middle = empty").unwrap();
        assert_eq!(d.to_string(), "orth: half=omega(1); middle=empty");
    }

    #[test]
    fn reports_line_and_column() {
        match parse_order("seq[1,\n  x]") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse_order("omega(1) +") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 11)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_order("seq[0]"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_order("seq[1] seq[2]"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_order("seq[1] ? "), Err(Error::Syntax { .. })));
    }

    #[test]
    fn empty_seq_is_malformed_not_a_syntax_error() {
        assert!(matches!(parse_order("seq[]"), Err(Error::Malformed(_))));
    }

    #[test]
    fn varieties_round_trip() {
        let v = parse_variety("a(1, 3; 6)").unwrap();
        assert_eq!(v.to_string(), "A(1,3; 6)");
        assert_eq!(parse_variety(&v.to_string()).unwrap(), v);
        assert!(matches!(parse_variety("E(1; 6)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_variety("A(1,3 6)"), Err(Error::Syntax { .. })));
    }
}
