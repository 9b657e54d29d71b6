//! Minimal s-expression reader with source positions.
//!
//! Shared by the PDDL front end and the solver model parser. Atoms are
//! kept as raw strings; numeric interpretation happens at the use site.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum SexpError {
    #[error("unexpected end of input at {0} (unbalanced parentheses?)")]
    UnexpectedEof(Pos),
    #[error("unexpected `)` at {0}")]
    UnexpectedClose(Pos),
    #[error("unterminated string literal starting at {0}")]
    UnterminatedString(Pos),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom { text: String, pos: Pos },
    List { items: Vec<Sexp>, pos: Pos },
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom { pos, .. } | Sexp::List { pos, .. } => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            _ => None,
        }
    }

    /// Head atom of a list, lowercased (PDDL keywords are case-insensitive).
    pub fn head(&self) -> Option<String> {
        self.as_list().and_then(|items| items.first()).and_then(|h| h.as_atom()).map(|s| s.to_ascii_lowercase())
    }
}

struct Reader<'a> {
    src: &'a [u8],
    idx: usize,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader { src: src.as_bytes(), idx: 0, line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.idx).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.idx += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b';') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, SexpError> {
        self.skip_trivia();
        let pos = self.pos();
        match self.peek() {
            None => Err(SexpError::UnexpectedEof(pos)),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(SexpError::UnexpectedEof(self.pos())),
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexp::List { items, pos });
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => Err(SexpError::UnexpectedClose(pos)),
            Some(b'"') => {
                self.bump();
                let mut text = String::from("\"");
                loop {
                    match self.bump() {
                        None => return Err(SexpError::UnterminatedString(pos)),
                        Some(b'"') => break,
                        Some(c) => text.push(c as char),
                    }
                }
                text.push('"');
                Ok(Sexp::Atom { text, pos })
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    text.push(c as char);
                    self.bump();
                }
                Ok(Sexp::Atom { text, pos })
            }
        }
    }
}

/// Parses a single s-expression; trailing input is an error.
pub fn parse_one(src: &str) -> Result<Sexp, SexpError> {
    let mut r = Reader::new(src);
    let e = r.read()?;
    r.skip_trivia();
    if r.peek().is_some() {
        return Err(SexpError::UnexpectedClose(r.pos()));
    }
    Ok(e)
}

/// Parses all top-level s-expressions in the input.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut r = Reader::new(src);
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_positions() {
        let e = parse_one("(a\n  (b c))").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items[0].pos(), Pos { line: 1, col: 2 });
        assert_eq!(items[1].pos(), Pos { line: 2, col: 3 });
    }

    #[test]
    fn comments_are_skipped() {
        let e = parse_one("; header\n(a ; mid\n b)").unwrap();
        assert_eq!(e.as_list().unwrap().len(), 2);
    }

    #[test]
    fn unbalanced_is_an_error() {
        assert!(parse_one("(a (b)").is_err());
        assert!(parse_one(")").is_err());
    }
}
