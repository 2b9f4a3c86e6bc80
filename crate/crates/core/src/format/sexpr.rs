//! A small reader for the parenthesized notation used by UMR graphs.
//!
//! The reader knows nothing about nodes or relations; it only produces
//! nested lists of atoms with their source positions. Interpretation
//! happens in the sentence-graph and document-level builders.

use crate::error::{Error, Result};

/// 1-based line and column in the original file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }
}

struct Reader {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    column: usize,
}

impl Reader {
    fn new(src: &str, first_line: usize) -> Self {
        Reader {
            chars: src.chars().collect(),
            idx: 0,
            line: first_line,
            column: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_ws();
        let start = self.pos();
        match self.peek() {
            None => Err(Error::syntax(
                start.line,
                start.column,
                "unexpected end of input",
            )),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => {
                            return Err(Error::syntax(
                                start.line,
                                start.column,
                                "unbalanced parenthesis",
                            ))
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(Error::syntax(start.line, start.column, "unexpected `)`")),
            Some('"') => self.read_quoted(start),
            Some('\'') => Ok(self.read_gloss_or_symbol(start)),
            Some(_) => Ok(Sexp::Atom(self.read_symbol(), start)),
        }
    }

    fn read_symbol(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn read_quoted(&mut self, start: Pos) -> Result<Sexp> {
        let mut s = String::new();
        s.push(self.bump().unwrap_or('"'));
        loop {
            match self.bump() {
                None => {
                    return Err(Error::syntax(
                        start.line,
                        start.column,
                        "unterminated string literal",
                    ))
                }
                Some('\\') => {
                    s.push('\\');
                    if let Some(c) = self.bump() {
                        s.push(c);
                    }
                }
                Some('"') => {
                    s.push('"');
                    return Ok(Sexp::Atom(s, start));
                }
                Some(c) => s.push(c),
            }
        }
    }

    /// `'read'` style glosses. A leading apostrophe without a closing one on
    /// the same line is an ordinary symbol.
    fn read_gloss_or_symbol(&mut self, start: Pos) -> Sexp {
        let rest = &self.chars[self.idx + 1..];
        let close = rest
            .iter()
            .take_while(|&&c| c != '\n')
            .position(|&c| c == '\'');
        match close {
            Some(n) => {
                let mut s = String::new();
                for _ in 0..n + 2 {
                    if let Some(c) = self.bump() {
                        s.push(c);
                    }
                }
                Sexp::Atom(s, start)
            }
            None => Sexp::Atom(self.read_symbol(), start),
        }
    }
}

/// Reads exactly one expression from `src`; trailing non-whitespace is an error.
/// `first_line` is the file line on which `src` begins.
pub fn read_one(src: &str, first_line: usize) -> Result<Sexp> {
    let mut reader = Reader::new(src, first_line);
    let expr = reader.read()?;
    reader.skip_ws();
    if reader.peek().is_some() {
        let p = reader.pos();
        return Err(Error::syntax(
            p.line,
            p.column,
            "trailing content after graph expression",
        ));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(e: &Sexp) -> Vec<String> {
        match e {
            Sexp::List(items, _) => items
                .iter()
                .map(|i| i.as_atom().unwrap_or("<list>").to_string())
                .collect(),
            Sexp::Atom(a, _) => vec![a.clone()],
        }
    }

    #[test]
    fn reads_nested_lists_with_strings_and_glosses() {
        let e = read_one("(a / číst-002 'read' :op1 \"United States\" :x (b / c))", 1).unwrap();
        assert_eq!(
            atoms(&e),
            vec![
                "a",
                "/",
                "číst-002",
                "'read'",
                ":op1",
                "\"United States\"",
                ":x",
                "<list>"
            ]
        );
    }

    #[test]
    fn apostrophe_without_close_is_a_symbol() {
        let e = read_one("(a / it's)", 1).unwrap();
        assert_eq!(atoms(&e), vec!["a", "/", "it's"]);
    }

    #[test]
    fn positions_track_lines_and_columns() {
        let e = read_one("(a / b\n  :x (c / d))", 7).unwrap();
        let Sexp::List(items, p) = e else { panic!() };
        assert_eq!(p, Pos { line: 7, column: 1 });
        assert_eq!(items[4].pos(), Pos { line: 8, column: 6 });
    }

    #[test]
    fn unbalanced_input_reports_location() {
        match read_one("(a / b\n :x (c / d)", 3) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 1)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_one("(a / b))", 1), Err(Error::Syntax { .. })));
        assert!(matches!(
            read_one("(a / \"b)", 1),
            Err(Error::Syntax { .. })
        ));
    }
}
