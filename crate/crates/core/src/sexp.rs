//! A small s-expression reader and printer shared by the surface syntaxes.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError { offset, message: message.into() }
    }
}

/// Reads exactly one s-expression; trailing input other than whitespace is
/// an error.
pub fn parse(src: &str) -> Result<Sexp, ParseError> {
    let mut r = Reader { src: src.as_bytes(), pos: 0 };
    let s = r.read()?;
    r.skip_ws();
    if r.pos != r.src.len() {
        return Err(ParseError::new(r.pos, "trailing input"));
    }
    Ok(s)
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn skip_ws(&mut self) {
        while let Some(&b) = self.src.get(self.pos) {
            if b == b';' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            None => Err(ParseError::new(self.pos, "unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        None => return Err(ParseError::new(self.pos, "unclosed list")),
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => Err(ParseError::new(self.pos, "unexpected `)`")),
            Some(_) => {
                let start = self.pos;
                while let Some(&b) = self.src.get(self.pos) {
                    if b.is_ascii_whitespace() || b == b'(' || b == b')' || b == b';' {
                        break;
                    }
                    self.pos += 1;
                }
                let atom = std::str::from_utf8(&self.src[start..self.pos])
                    .map_err(|_| ParseError::new(start, "invalid UTF-8 in atom"))?;
                Ok(Sexp::Atom(atom.to_string()))
            }
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn list(items: impl IntoIterator<Item = Sexp>) -> Sexp {
        Sexp::List(items.into_iter().collect())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            Sexp::Atom(_) => None,
        }
    }

    /// Splits `(head arg...)` into the head atom and the arguments.
    pub fn as_form(&self) -> Option<(&str, &[Sexp])> {
        let items = self.as_list()?;
        let (head, args) = items.split_first()?;
        Some((head.as_atom()?, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let s = parse(" (add (lit 2)\n  (lit -3)) ").unwrap();
        assert_eq!(s.to_string(), "(add (lit 2) (lit -3))");
        assert_eq!(parse("()").unwrap(), Sexp::List(vec![]));
    }

    #[test]
    fn comments_are_whitespace() {
        assert_eq!(parse("; hi\n(a b) ; tail").unwrap().to_string(), "(a b)");
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse("(a").unwrap_err().offset, 2);
        assert_eq!(parse("a b").unwrap_err().message, "trailing input");
        assert_eq!(parse(")").unwrap_err().offset, 0);
        assert!(parse("").is_err());
    }
}
