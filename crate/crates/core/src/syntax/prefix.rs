//! A small prefix notation shared by functor and model type expressions:
//! `head`, `head[index]`, `head(arg, ...)`, `head{atom, ...}`.

use super::parse::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefix {
    pub head: String,
    pub index: Option<String>,
    pub args: Vec<Prefix>,
    pub atoms: Option<Vec<String>>,
    /// Column of the head, 1-based.
    pub col: usize,
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl Cursor<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: 1, col: self.pos + 1, message: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<String, ParseError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '*' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn expr(&mut self) -> Result<Prefix, ParseError> {
        self.ws();
        let col = self.pos + 1;
        let head = self.word()?;
        let mut p = Prefix { head, index: None, args: Vec::new(), atoms: None, col };
        if self.peek() == Some('[') {
            self.pos += 1;
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos] != ']' {
                self.pos += 1;
            }
            if self.pos == self.chars.len() {
                return Err(self.err("unclosed `[`"));
            }
            p.index = Some(self.chars[start..self.pos].iter().collect::<String>().trim().to_string());
            self.pos += 1;
        }
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                loop {
                    p.args.push(self.expr()?);
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("expected `,` or `)`")),
                    }
                }
            }
            Some('{') => {
                self.pos += 1;
                let mut atoms = Vec::new();
                if self.peek() == Some('}') {
                    self.pos += 1;
                } else {
                    loop {
                        atoms.push(self.word()?);
                        match self.peek() {
                            Some(',') => self.pos += 1,
                            Some('}') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.err("expected `,` or `}`")),
                        }
                    }
                }
                p.atoms = Some(atoms);
            }
            _ => {}
        }
        Ok(p)
    }
}

pub fn parse_prefix(src: &str) -> Result<Prefix, ParseError> {
    let mut c = Cursor { chars: src.chars().collect(), pos: 0, _src: src };
    let p = c.expr()?;
    if c.peek().is_some() {
        return Err(c.err("trailing input"));
    }
    Ok(p)
}

impl Prefix {
    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: 1, col: self.col, message: msg.into() }
    }

    /// Checks the argument count.
    pub fn arity(&self, n: usize) -> Result<&[Prefix], ParseError> {
        if self.args.len() != n {
            return Err(self.error(format!("`{}` takes {n} argument(s), got {}", self.head, self.args.len())));
        }
        Ok(&self.args)
    }
}
