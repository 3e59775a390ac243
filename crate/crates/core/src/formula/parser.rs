//! Recursive descent parser for the formula grammar.
//!
//! Precedence from loosest to tightest: `<->` (left associative), `->`
//! (right associative), `|`, `&` (both left associative), then the prefix
//! operators `!`, `K[i]`, `H[i]`, `B[i]` and `EH[i,j,...]`.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{is_atom_name, is_identifier, Agent, AgentGroup, Formula, RESERVED_WORDS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {kind}")]
pub struct ParseError {
    /// 1-based character column of the offending token.
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unknown agent '{0}'")]
    UnknownAgent(String),
    #[error("invalid agent id '{0}'")]
    InvalidAgent(String),
    #[error("agent '{0}' listed twice in group")]
    DuplicateAgent(String),
    #[error("'{0}' is a reserved word and cannot be used as an atom")]
    ReservedWord(String),
    #[error("invalid identifier '{0}'")]
    InvalidIdentifier(String),
    #[error("number out of range: {0}")]
    NumberOutOfRange(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("'{w}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Bang => "'!'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::DoubleArrow => "'<->'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), column));
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                i += 2;
                Tok::DoubleArrow
            }
            other => {
                return Err(ParseError {
                    column,
                    kind: ParseErrorKind::UnexpectedChar(other),
                })
            }
        };
        out.push((tok, column));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'u> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    universe: &'u BTreeSet<Agent>,
}

/// Parses `text` into a formula. Every agent must belong to `universe`.
pub fn parse(text: &str, universe: &BTreeSet<Agent>) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        universe,
    };
    let f = p.iff()?;
    p.expect(Tok::End, "end of input")?;
    Ok(f)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        self.toks
            .get(self.pos + 1)
            .map(|(t, _)| t)
            .unwrap_or(&Tok::End)
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            column: self.column(),
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error(ParseErrorKind::Unexpected {
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if let (Tok::Word(w), Tok::LBracket) = (self.peek(), self.peek2()) {
            let w = w.clone();
            match w.as_str() {
                "K" | "H" | "B" => {
                    self.bump();
                    self.bump();
                    let agent = self.agent()?;
                    self.expect(Tok::RBracket, "']'")?;
                    let body = self.unary()?;
                    return Ok(match w.as_str() {
                        "K" => Formula::k(agent, body),
                        "H" => Formula::h(agent, body),
                        _ => Formula::b(agent, body),
                    });
                }
                "EH" => {
                    self.bump();
                    self.bump();
                    let mut members = BTreeSet::new();
                    loop {
                        let column = self.column();
                        let agent = self.agent()?;
                        if !members.insert(agent.clone()) {
                            return Err(ParseError {
                                column,
                                kind: ParseErrorKind::DuplicateAgent(agent.to_string()),
                            });
                        }
                        match self.peek() {
                            Tok::Comma => {
                                self.bump();
                            }
                            Tok::RBracket => {
                                self.bump();
                                break;
                            }
                            _ => return Err(self.unexpected("',' or ']'")),
                        }
                    }
                    let group = AgentGroup::new(members).expect("duplicates rejected above");
                    let body = self.unary()?;
                    return Ok(Formula::mutual_hope(group, body));
                }
                _ => {}
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Word(w) => match w.as_str() {
                "bot" => {
                    self.bump();
                    Ok(Formula::Bot)
                }
                "top" => {
                    self.bump();
                    Ok(Formula::Top)
                }
                "correct" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let agent = self.agent()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Formula::Correct(agent))
                }
                "type" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let agent = self.agent()?;
                    self.expect(Tok::Comma, "','")?;
                    let column = self.column();
                    let name = match self.bump().0 {
                        Tok::Word(n) if is_identifier(&n) => n,
                        Tok::Word(n) => {
                            return Err(ParseError {
                                column,
                                kind: ParseErrorKind::InvalidIdentifier(n),
                            })
                        }
                        other => {
                            return Err(ParseError {
                                column,
                                kind: ParseErrorKind::Unexpected {
                                    expected: "type name".into(),
                                    found: other.describe(),
                                },
                            })
                        }
                    };
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Formula::TypeAtom(agent, name))
                }
                "byz" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let column = self.column();
                    let n = match self.bump().0 {
                        Tok::Word(n) if n.chars().all(|c| c.is_ascii_digit()) => {
                            n.parse::<usize>().map_err(|_| ParseError {
                                column,
                                kind: ParseErrorKind::NumberOutOfRange(n.clone()),
                            })?
                        }
                        other => {
                            return Err(ParseError {
                                column,
                                kind: ParseErrorKind::Unexpected {
                                    expected: "number".into(),
                                    found: other.describe(),
                                },
                            })
                        }
                    };
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Formula::Byz(n))
                }
                _ if RESERVED_WORDS.contains(&w.as_str()) => {
                    Err(self.error(ParseErrorKind::ReservedWord(w)))
                }
                _ if is_atom_name(&w) => {
                    self.bump();
                    Ok(Formula::Atom(w))
                }
                _ => Err(self.error(ParseErrorKind::InvalidIdentifier(w))),
            },
            _ => Err(self.unexpected("formula")),
        }
    }

    fn agent(&mut self) -> Result<Agent, ParseError> {
        let column = self.column();
        match self.bump().0 {
            Tok::Word(w) => {
                let agent = Agent::new(w.clone()).map_err(|_| ParseError {
                    column,
                    kind: ParseErrorKind::InvalidAgent(w.clone()),
                })?;
                if !self.universe.contains(&agent) {
                    return Err(ParseError {
                        column,
                        kind: ParseErrorKind::UnknownAgent(w),
                    });
                }
                Ok(agent)
            }
            other => Err(ParseError {
                column,
                kind: ParseErrorKind::Unexpected {
                    expected: "agent".into(),
                    found: other.describe(),
                },
            }),
        }
    }
}
