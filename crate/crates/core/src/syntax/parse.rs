//! Concrete syntax for terms and `.clott` files.
//!
//! ```text
//! term  ::= fun binder+ -> term | tick a [: k] -> term | clock k -> term
//!         | forall-clk k -> term | ^forall-clk k -> term
//!         | later (a : k) -> term | ^later (a : k) -> term
//!         | Pi (x : A) -> term | ^Pi (x : A) -> term
//!         | Sigma (x : A) * term | ^Sigma (x : A) * term
//!         | exists (x : A) -> term | all (x : A) -> term
//!         | case term of inl x -> term | inr y -> term
//!         | force k -> term
//!         | or [ (-> | ^->) term ]
//! or    ::= and [ \/ or ]          and ::= sum [ /\ and ]
//! sum   ::= prod [ (+ | ^+) sum ]  prod ::= eq [ (* | ^*) prod ]
//! eq    ::= app [ == app ]
//! app   ::= prefix arg* | arg arg*
//! arg   ::= atom ( [a] | @k )*
//! ```
//! Line comments start with `--`.

use thiserror::Error;

use super::term::{Abs, Clocks, Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    /// `^` followed by an identifier, e.g. `^Pi`.
    Code(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] = &[
    "^->", "^+", "^*", "->", "==", "/\\", "\\/", "(", ")", "[", "]", "{", "}", ",", ":", "*", "+", "@", "|", "=", ".",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let ident_at = |i: usize| -> usize {
        let mut j = i;
        while j < chars.len() && is_ident_char(chars[j]) {
            j += 1;
        }
        // `forall-clk` is the one hyphenated keyword
        let word: String = chars[i..j].iter().collect();
        if word == "forall" && chars[j..].starts_with(&['-', 'c', 'l', 'k']) {
            let k = j + 4;
            if k >= chars.len() || !is_ident_char(chars[k]) {
                return k;
            }
        }
        j
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (sl, sc) = (line, col);
        if is_ident_start(c) {
            let j = ident_at(i);
            out.push(Token { tok: Tok::Ident(chars[i..j].iter().collect()), line: sl, col: sc });
            col += j - i;
            i = j;
            continue;
        }
        if c == '^' && chars.get(i + 1).is_some_and(|c| is_ident_start(*c)) {
            let j = ident_at(i + 1);
            out.push(Token { tok: Tok::Code(chars[i + 1..j].iter().collect()), line: sl, col: sc });
            col += j - i;
            i = j;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), line: sl, col: sc });
                i += s.len();
                col += s.len();
            }
            None => {
                return Err(ParseError { line, col, message: format!("unexpected character `{c}`") });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const KEYWORDS: &[&str] = &[
    "fun", "tick", "clock", "forall-clk", "later", "Pi", "Sigma", "exists", "all", "case", "of", "inl", "inr", "force",
    "fst", "snd", "refl", "El", "Prf", "In", "Id", "absurd", "tirr", "cirr", "Unit", "tt", "Empty", "U", "Prop",
    "top", "bot", "fix", "assume", "def", "check", "conv",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// A top-level item of a `.clott` file.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Clock(Name),
    Tick(Name, Name),
    Assume(Name, Term),
    Def(Name, Term, Term),
    Check(Term, Term),
    Conv(Term, Term),
}

/// An item together with the line it starts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    pub line: usize,
    pub item: Item,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError { line: t.line, col: t.col, message: msg.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(x) if !is_keyword(&x) => {
                self.bump();
                Ok(x)
            }
            _ => self.err("expected a name"),
        }
    }

    fn clocks(&mut self) -> PResult<Clocks> {
        self.expect_sym("{")?;
        let mut names = Vec::new();
        while !self.is_sym("}") {
            names.push(self.name()?);
        }
        self.bump();
        Ok(Clocks::new(names))
    }

    /// `(x : A)` as used by Pi, Sigma and the quantifiers.
    fn typed_binder(&mut self) -> PResult<(Name, Term)> {
        self.expect_sym("(")?;
        let x = self.name()?;
        self.expect_sym(":")?;
        let a = self.term()?;
        self.expect_sym(")")?;
        Ok((x, a))
    }

    fn tick_binder(&mut self) -> PResult<(Name, Name)> {
        self.expect_sym("(")?;
        let a = self.name()?;
        self.expect_sym(":")?;
        let k = self.name()?;
        self.expect_sym(")")?;
        Ok((a, k))
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(kw) => match kw.as_str() {
                "fun" => {
                    self.bump();
                    let mut binders = Vec::new();
                    loop {
                        if self.is_sym("(") {
                            let (x, a) = self.typed_binder()?;
                            binders.push((x, Some(a)));
                        } else if self.is_sym("->") {
                            break;
                        } else {
                            binders.push((self.name()?, None));
                        }
                    }
                    if binders.is_empty() {
                        return self.err("`fun` needs at least one binder");
                    }
                    self.expect_sym("->")?;
                    let body = self.term()?;
                    Ok(binders
                        .into_iter()
                        .rev()
                        .fold(body, |acc, (x, a)| Term::Lam(a.map(Box::new), Abs::new(x, acc))))
                }
                "tick" => {
                    self.bump();
                    let a = self.name()?;
                    let k = if self.eat_sym(":") { Some(self.name()?) } else { None };
                    self.expect_sym("->")?;
                    let body = self.term()?;
                    Ok(Term::TickLam(k, Abs::new(a, body)))
                }
                "clock" => {
                    self.bump();
                    let k = self.name()?;
                    self.expect_sym("->")?;
                    Ok(Term::ClockLam(Abs::new(k, self.term()?)))
                }
                "forall-clk" => {
                    self.bump();
                    let k = self.name()?;
                    self.expect_sym("->")?;
                    Ok(Term::Forall(Abs::new(k, self.term()?)))
                }
                "force" => {
                    self.bump();
                    let k = self.name()?;
                    self.expect_sym("->")?;
                    Ok(Term::Force(Abs::new(k, self.term()?)))
                }
                "later" if matches!(self.peek_at(1), Tok::Sym("(")) => {
                    self.bump();
                    let (a, k) = self.tick_binder()?;
                    self.expect_sym("->")?;
                    Ok(Term::Later(k, Abs::new(a, self.term()?)))
                }
                "Pi" => {
                    self.bump();
                    let (x, a) = self.typed_binder()?;
                    self.expect_sym("->")?;
                    Ok(Term::Pi(Box::new(a), Abs::new(x, self.term()?)))
                }
                "Sigma" => {
                    self.bump();
                    let (x, a) = self.typed_binder()?;
                    self.expect_sym("*")?;
                    Ok(Term::Sigma(Box::new(a), Abs::new(x, self.term()?)))
                }
                "exists" | "all" => {
                    self.bump();
                    let (x, a) = self.typed_binder()?;
                    self.expect_sym("->")?;
                    let body = self.term()?;
                    Ok(if kw == "exists" {
                        Term::PExists(Box::new(a), Abs::new(x, body))
                    } else {
                        Term::PAll(Box::new(a), Abs::new(x, body))
                    })
                }
                "case" => {
                    self.bump();
                    let s = self.term()?;
                    self.expect_kw("of")?;
                    self.expect_kw("inl")?;
                    let x = self.name()?;
                    self.expect_sym("->")?;
                    let l = self.term()?;
                    self.expect_sym("|")?;
                    self.expect_kw("inr")?;
                    let y = self.name()?;
                    self.expect_sym("->")?;
                    let r = self.term()?;
                    Ok(Term::Case(Box::new(s), Abs::new(x, l), Abs::new(y, r)))
                }
                _ => self.arrow(),
            },
            Tok::Code(c) => match c.as_str() {
                "forall-clk" => {
                    self.bump();
                    let k = self.name()?;
                    self.expect_sym("->")?;
                    Ok(Term::CForall(Abs::new(k, self.term()?)))
                }
                "later" if matches!(self.peek_at(1), Tok::Sym("(")) => {
                    self.bump();
                    let (a, k) = self.tick_binder()?;
                    self.expect_sym("->")?;
                    Ok(Term::CLater(k, Abs::new(a, self.term()?)))
                }
                "Pi" => {
                    self.bump();
                    let (x, a) = self.typed_binder()?;
                    self.expect_sym("->")?;
                    Ok(Term::CPi(Box::new(a), Abs::new(x, self.term()?)))
                }
                "Sigma" => {
                    self.bump();
                    let (x, a) = self.typed_binder()?;
                    self.expect_sym("*")?;
                    Ok(Term::CSigma(Box::new(a), Abs::new(x, self.term()?)))
                }
                _ => self.arrow(),
            },
            _ => self.arrow(),
        }
    }

    fn arrow(&mut self) -> PResult<Term> {
        let lhs = self.or()?;
        if self.eat_sym("->") {
            let rhs = self.term()?;
            Ok(Term::arrow(lhs, rhs))
        } else if self.eat_sym("^->") {
            let rhs = self.term()?;
            Ok(Term::CPi(Box::new(lhs), Abs::new("_", rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> PResult<Term> {
        let lhs = self.and()?;
        if self.eat_sym("\\/") {
            let rhs = self.or_tail()?;
            return Ok(Term::POr(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    /// Right operand of an infix operator: a binder form or the next level.
    fn or_tail(&mut self) -> PResult<Term> {
        if self.starts_binder() {
            self.term()
        } else {
            self.or()
        }
    }

    fn starts_binder(&self) -> bool {
        match self.peek() {
            Tok::Ident(k) => {
                matches!(
                    k.as_str(),
                    "fun" | "tick" | "clock" | "forall-clk" | "force" | "Pi" | "Sigma" | "exists" | "all" | "case"
                ) || (k == "later" && matches!(self.peek_at(1), Tok::Sym("(")))
            }
            Tok::Code(k) => {
                matches!(k.as_str(), "forall-clk" | "Pi" | "Sigma")
                    || (k == "later" && matches!(self.peek_at(1), Tok::Sym("(")))
            }
            _ => false,
        }
    }

    fn and(&mut self) -> PResult<Term> {
        let lhs = self.sum()?;
        if self.eat_sym("/\\") {
            let rhs = if self.starts_binder() { self.term()? } else { self.and()? };
            return Ok(Term::PAnd(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> PResult<Term> {
        let lhs = self.prod()?;
        if self.eat_sym("+") {
            let rhs = if self.starts_binder() { self.term()? } else { self.sum()? };
            return Ok(Term::Sum(Box::new(lhs), Box::new(rhs)));
        }
        if self.eat_sym("^+") {
            let rhs = if self.starts_binder() { self.term()? } else { self.sum()? };
            return Ok(Term::CSum(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> PResult<Term> {
        let lhs = self.eq()?;
        if self.eat_sym("*") {
            let rhs = if self.starts_binder() { self.term()? } else { self.prod()? };
            return Ok(Term::prod(lhs, rhs));
        }
        if self.eat_sym("^*") {
            let rhs = if self.starts_binder() { self.term()? } else { self.prod()? };
            return Ok(Term::CSigma(Box::new(lhs), Abs::new("_", rhs)));
        }
        Ok(lhs)
    }

    fn eq(&mut self) -> PResult<Term> {
        let lhs = self.app()?;
        if self.eat_sym("==") {
            let rhs = self.app()?;
            return Ok(Term::PEq(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn starts_arg(&self) -> bool {
        match self.peek() {
            Tok::Ident(x) => !is_keyword(x) || matches!(x.as_str(), "Unit" | "tt" | "Empty" | "U" | "Prop" | "top" | "bot" | "fix"),
            Tok::Code(x) => matches!(x.as_str(), "Unit" | "Empty"),
            Tok::Sym(s) => *s == "(",
            Tok::Eof => false,
        }
    }

    fn app(&mut self) -> PResult<Term> {
        let mut head = self.prefix()?;
        while self.starts_arg() {
            let a = self.arg()?;
            head = Term::app(head, a);
        }
        Ok(head)
    }

    fn args<const N: usize>(&mut self) -> PResult<[Term; N]> {
        let mut v = Vec::with_capacity(N);
        for _ in 0..N {
            if !self.starts_arg() {
                return self.err("missing argument");
            }
            v.push(self.arg()?);
        }
        Ok(v.try_into().unwrap_or_else(|_| unreachable!()))
    }

    fn prefix(&mut self) -> PResult<Term> {
        let kw = match self.peek().clone() {
            Tok::Ident(k) => k,
            Tok::Code(c) => {
                return match c.as_str() {
                    "Id" => {
                        self.bump();
                        let [a, t, u] = self.args()?;
                        Ok(Term::CId(Box::new(a), Box::new(t), Box::new(u)))
                    }
                    "later" => {
                        self.bump();
                        let k = self.name()?;
                        let [a] = self.args()?;
                        Ok(Term::CLater(k, Abs::new("_", a)))
                    }
                    _ => self.arg(),
                };
            }
            _ => return self.arg(),
        };
        let unary = |s: &mut Self, f: fn(Box<Term>) -> Term| -> PResult<Term> {
            s.bump();
            let [t] = s.args()?;
            Ok(f(Box::new(t)))
        };
        match kw.as_str() {
            "fst" => unary(self, Term::Fst),
            "snd" => unary(self, Term::Snd),
            "inl" => unary(self, Term::Inl),
            "inr" => unary(self, Term::Inr),
            "refl" => unary(self, Term::Refl),
            "tirr" => unary(self, Term::Tirr),
            "cirr" => unary(self, Term::Cirr),
            "El" | "Prf" => {
                self.bump();
                let d = self.clocks()?;
                let [t] = self.args()?;
                Ok(if kw == "El" { Term::El(d, Box::new(t)) } else { Term::Prf(d, Box::new(t)) })
            }
            "In" => {
                self.bump();
                let d1 = self.clocks()?;
                let d2 = self.clocks()?;
                let [t] = self.args()?;
                Ok(Term::Incl(d1, d2, Box::new(t)))
            }
            "Id" => {
                self.bump();
                let [a, t, u] = self.args()?;
                Ok(Term::id(a, t, u))
            }
            "absurd" => {
                self.bump();
                let [a, t] = self.args()?;
                Ok(Term::Absurd(Box::new(a), Box::new(t)))
            }
            "later" => {
                self.bump();
                let k = self.name()?;
                let [a] = self.args()?;
                Ok(Term::later(k, a))
            }
            _ => self.arg(),
        }
    }

    fn arg(&mut self) -> PResult<Term> {
        let mut t = self.atom()?;
        loop {
            if self.is_sym("[") {
                self.bump();
                let a = self.name()?;
                self.expect_sym("]")?;
                t = Term::tick_app(t, a);
            } else if self.is_sym("@") {
                self.bump();
                let k = self.name()?;
                t = Term::clock_app(t, k);
            } else {
                return Ok(t);
            }
        }
    }

    fn atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                if self.eat_sym(",") {
                    let u = self.term()?;
                    self.expect_sym(")")?;
                    return Ok(Term::Pair(Box::new(t), Box::new(u)));
                }
                if self.eat_sym(":") {
                    let a = self.term()?;
                    self.expect_sym(")")?;
                    return Ok(Term::Ann(Box::new(t), Box::new(a)));
                }
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Code(c) => match c.as_str() {
                "Unit" => {
                    self.bump();
                    Ok(Term::CUnit)
                }
                "Empty" => {
                    self.bump();
                    Ok(Term::CEmpty)
                }
                _ => self.err(format!("unexpected `^{c}`")),
            },
            Tok::Ident(x) => match x.as_str() {
                "Unit" => {
                    self.bump();
                    Ok(Term::Unit)
                }
                "tt" => {
                    self.bump();
                    Ok(Term::Star)
                }
                "Empty" => {
                    self.bump();
                    Ok(Term::Empty)
                }
                "top" => {
                    self.bump();
                    Ok(Term::PTop)
                }
                "bot" => {
                    self.bump();
                    Ok(Term::PBot)
                }
                "U" => {
                    self.bump();
                    Ok(Term::Univ(self.clocks()?))
                }
                "Prop" => {
                    self.bump();
                    Ok(Term::Prop(self.clocks()?))
                }
                "fix" => {
                    self.bump();
                    if self.is_sym("[") && matches!(self.peek_at(2), Tok::Sym("]")) {
                        self.bump();
                        let k = self.name()?;
                        self.expect_sym("]")?;
                        return Ok(Term::Fix(Some(k)));
                    }
                    Ok(Term::Fix(None))
                }
                _ if is_keyword(&x) => self.err(format!("unexpected keyword `{x}`")),
                _ => {
                    self.bump();
                    Ok(Term::Var(x))
                }
            },
            Tok::Sym(s) => self.err(format!("unexpected `{s}`")),
            Tok::Eof => self.err("unexpected end of input"),
        }
    }

    fn item(&mut self) -> PResult<Located> {
        let line = self.toks[self.pos].line;
        let item = match self.peek().clone() {
            Tok::Ident(k) if k == "clock" => {
                self.bump();
                Item::Clock(self.name()?)
            }
            Tok::Ident(k) if k == "tick" => {
                self.bump();
                let a = self.name()?;
                self.expect_sym(":")?;
                Item::Tick(a, self.name()?)
            }
            Tok::Ident(k) if k == "assume" => {
                self.bump();
                let x = self.name()?;
                self.expect_sym(":")?;
                Item::Assume(x, self.term()?)
            }
            Tok::Ident(k) if k == "def" => {
                self.bump();
                let x = self.name()?;
                self.expect_sym(":")?;
                let a = self.term()?;
                self.expect_sym("=")?;
                Item::Def(x, a, self.term()?)
            }
            Tok::Ident(k) if k == "check" => {
                self.bump();
                let t = self.term()?;
                self.expect_sym(":")?;
                Item::Check(t, self.term()?)
            }
            Tok::Ident(k) if k == "conv" => {
                self.bump();
                let t = self.term()?;
                self.expect_sym("=")?;
                Item::Conv(t, self.term()?)
            }
            _ => return self.err("expected `clock`, `tick`, `assume`, `def`, `check` or `conv`"),
        };
        self.expect_sym(".")?;
        Ok(Located { line, item })
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.err("trailing input");
    }
    Ok(t)
}

pub fn parse_file(src: &str) -> Result<Vec<Located>, ParseError> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while *p.peek() != Tok::Eof {
        items.push(p.item()?);
    }
    Ok(items)
}
