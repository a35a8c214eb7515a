//! Tokenizer shared by the fact-file, clause and DLAB readers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifier starting with a lowercase letter or a digit.
    Name(String),
    /// Identifier starting with an uppercase letter or `_`.
    Var(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Dash,
    Neck,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, column);
        let mut push = |tok| {
            out.push(Token {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let first = word.chars().next().unwrap();
            if first.is_uppercase() || first == '_' {
                push(Tok::Var(word));
            } else {
                push(Tok::Name(word));
            }
            continue;
        }
        chars.next();
        column += 1;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '-' => Tok::Dash,
            ':' => {
                if chars.peek() == Some(&'-') {
                    chars.next();
                    column += 1;
                    Tok::Neck
                } else {
                    Tok::Colon
                }
            }
            other => {
                return Err(Error::Parse {
                    line: start_line,
                    column: start_col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        push(tok);
    }
    Ok(out)
}

/// Cursor over a token stream with positioned error reporting.
pub struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: (usize, usize),
}

impl<'a> Cursor<'a> {
    pub fn new(tokens: &'a [Token]) -> Self {
        let end = tokens
            .last()
            .map(|t| (t.line, t.column + 1))
            .unwrap_or((1, 1));
        Cursor {
            tokens,
            pos: 0,
            end,
        }
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&'a Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    pub fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.tokens.get(self.pos).map(|t| &t.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn position(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.end)
    }

    pub fn line(&self) -> usize {
        self.position().0
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.position();
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn expect(&mut self, want: &Tok) -> Result<()> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {want:?}, found {t:?}"))),
            None => Err(self.error(format!("expected {want:?}, found end of input"))),
        }
    }

    pub fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_dlab_header() {
        let toks: Vec<Tok> = tokenize("0-len:[a] % trailing")
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Name("0".into()),
                Tok::Dash,
                Tok::Name("len".into()),
                Tok::Colon,
                Tok::LBracket,
                Tok::Name("a".into()),
                Tok::RBracket
            ]
        );
    }

    #[test]
    fn neck_and_variables() {
        let toks: Vec<Tok> = tokenize("class(x) :- p(P1,_)")
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert!(toks.contains(&Tok::Neck));
        assert!(toks.contains(&Tok::Var("P1".into())));
        assert!(toks.contains(&Tok::Var("_".into())));
    }

    #[test]
    fn reports_position_of_bad_char() {
        let err = tokenize("p(a)\n  q(#)").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                column: 5,
                message: "unexpected character '#'".into()
            }
        );
    }
}
