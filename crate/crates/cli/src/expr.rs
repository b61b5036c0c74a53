//! Ring expressions over named instances.
//!
//! ```text
//! expr := term { ('+' | '-') term }
//! term := atom { '*' atom }
//! atom := NAT | IDENT | '(' expr ')'
//! ```
//!
//! A literal `n` stands for `n` copies of the terminal instance.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use decat_core::{class_of, to_ring, CanonicalForm, Instance, RingElement, Schema};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingExpr {
    Nat(u64),
    Ident(String),
    Add(Box<RingExpr>, Box<RingExpr>),
    Sub(Box<RingExpr>, Box<RingExpr>),
    Mul(Box<RingExpr>, Box<RingExpr>),
}

impl fmt::Display for RingExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingExpr::Nat(n) => write!(f, "{n}"),
            RingExpr::Ident(name) => f.write_str(name),
            RingExpr::Add(a, b) => write!(f, "(+ {a} {b})"),
            RingExpr::Sub(a, b) => write!(f, "(- {a} {b})"),
            RingExpr::Mul(a, b) => write!(f, "(* {a} {b})"),
        }
    }
}

impl RingExpr {
    /// Identifiers in order of first use.
    pub fn identifiers(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            RingExpr::Nat(_) => {}
            RingExpr::Ident(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            RingExpr::Add(a, b) | RingExpr::Sub(a, b) | RingExpr::Mul(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Nat(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Open,
    Close,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Nat(n) => write!(f, "`{n}`"),
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Plus => f.write_str("`+`"),
            Token::Minus => f.write_str("`-`"),
            Token::Star => f.write_str("`*`"),
            Token::Open => f.write_str("`(`"),
            Token::Close => f.write_str("`)`"),
            Token::End => f.write_str("end of input"),
        }
    }
}

/// Tokens with their 1-based line and column.
fn tokenize(text: &str) -> Result<Vec<(Token, usize, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let at = (line, column);
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '(' => Some(Token::Open),
            ')' => Some(Token::Close),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            column += 1;
            out.push((tok, at.0, at.1));
        } else if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                digits.push(d);
                chars.next();
                column += 1;
            }
            let n = digits.parse::<u64>().map_err(|_| SyntaxError {
                line: at.0,
                column: at.1,
                message: format!("`{digits}` is not a natural number literal"),
            })?;
            out.push((Token::Nat(n), at.0, at.1));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                name.push(d);
                chars.next();
                column += 1;
            }
            out.push((Token::Ident(name), at.0, at.1));
        } else {
            return Err(SyntaxError { line, column, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Token::End, line, column));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize, usize)>,
    next: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.next].0
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.next].0.clone();
        if tok != Token::End {
            self.next += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> SyntaxError {
        let (tok, line, column) = &self.tokens[self.next];
        SyntaxError { line: *line, column: *column, message: format!("expected {expected}, found {tok}") }
    }

    fn expr(&mut self) -> Result<RingExpr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = RingExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = RingExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<RingExpr, SyntaxError> {
        let mut lhs = self.atom()?;
        while *self.peek() == Token::Star {
            self.bump();
            lhs = RingExpr::Mul(Box::new(lhs), Box::new(self.atom()?));
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<RingExpr, SyntaxError> {
        match self.peek().clone() {
            Token::Nat(n) => {
                self.bump();
                Ok(RingExpr::Nat(n))
            }
            Token::Ident(name) => {
                self.bump();
                Ok(RingExpr::Ident(name))
            }
            Token::Open => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Token::Close {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("an identifier, a number or `(`")),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<RingExpr, SyntaxError> {
    let mut p = Parser { tokens: tokenize(text)?, next: 0 };
    let e = p.expr()?;
    if *p.peek() != Token::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unknown identifier `{0}`")]
    Unresolved(String),
    #[error("`{0}` lives over schema `{1}` but `{2}` over `{3}`")]
    SchemaMismatch(String, String, String, String),
    #[error("no identifier fixes the schema; pass one")]
    NoSchema,
    #[error("literal {0} is too large")]
    Overflow(u64),
    #[error(transparent)]
    Core(#[from] decat_core::Error),
}

/// Named instances an expression may refer to.
#[derive(Debug, Clone, Default)]
pub struct Defs {
    instances: BTreeMap<String, Arc<Instance>>,
    labels: BTreeMap<CanonicalForm, String>,
}

impl Defs {
    /// Adds a definition. Connected ones become labels; the least name wins.
    pub fn insert(&mut self, name: &str, inst: Arc<Instance>) {
        if decat_core::is_connected(&inst) {
            let form = decat_core::canonical_form(&inst);
            let slot = self.labels.entry(form).or_insert_with(|| name.to_string());
            if name < slot.as_str() {
                *slot = name.to_string();
            }
        }
        self.instances.insert(name.to_string(), inst);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Instance>> {
        self.instances.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.instances.keys().map(String::as_str)
    }

    pub fn label(&self, form: &CanonicalForm) -> Option<&str> {
        self.labels.get_key_value(form).filter(|(k, _)| *k == form).map(|(_, v)| v.as_str())
    }

    /// Printable label: a def name, else `#` and the form's digest.
    pub fn display_label(&self, form: &CanonicalForm) -> String {
        match self.label(form) {
            Some(name) => name.to_string(),
            None => format!("#{}", form.digest()),
        }
    }
}

/// Evaluates in the Grothendieck ring. `schema` is used when the expression
/// names no instance.
pub fn eval_expr(e: &RingExpr, defs: &Defs, schema: Option<&Arc<Schema>>) -> Result<RingElement, EvalError> {
    let mut owner: Option<(&str, &Arc<Schema>)> = None;
    for name in e.identifiers() {
        let inst = defs.get(name).ok_or_else(|| EvalError::Unresolved(name.to_string()))?;
        match owner {
            Some((first, s)) if s != inst.schema() => {
                return Err(EvalError::SchemaMismatch(
                    first.to_string(),
                    s.name().to_string(),
                    name.to_string(),
                    inst.schema().name().to_string(),
                ))
            }
            Some(_) => {}
            None => owner = Some((name, inst.schema())),
        }
    }
    let schema = owner.map(|(_, s)| s).or(schema).ok_or(EvalError::NoSchema)?;
    eval_in(e, defs, schema)
}

fn eval_in(e: &RingExpr, defs: &Defs, schema: &Arc<Schema>) -> Result<RingElement, EvalError> {
    Ok(match e {
        RingExpr::Nat(n) => {
            let k = i64::try_from(*n).map_err(|_| EvalError::Overflow(*n))?;
            RingElement::one(schema).scale(k)
        }
        RingExpr::Ident(name) => {
            let inst = defs.get(name).ok_or_else(|| EvalError::Unresolved(name.clone()))?;
            to_ring(&class_of(inst)?)
        }
        RingExpr::Add(a, b) => eval_in(a, defs, schema)?.add(&eval_in(b, defs, schema)?)?,
        RingExpr::Sub(a, b) => eval_in(a, defs, schema)?.sub(&eval_in(b, defs, schema)?)?,
        RingExpr::Mul(a, b) => eval_in(a, defs, schema)?.mul(&eval_in(b, defs, schema)?)?,
    })
}

/// `{A2: 1, K1: 2}` with labels sorted, or `0`.
pub fn format_element(r: &RingElement, defs: &Defs) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let mut pairs: Vec<(String, i64)> = r.coeffs().iter().map(|(f, &c)| (defs.display_label(f), c)).collect();
    pairs.sort();
    let body: Vec<String> = pairs.into_iter().map(|(l, c)| format!("{l}: {c}")).collect();
    format!("{{{}}}", body.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse_expr("A + 2*B").unwrap().to_string(), "(+ A (* 2 B))");
        assert_eq!(parse_expr("(A - B) * A").unwrap().to_string(), "(* (- A B) A)");
        assert_eq!(parse_expr("A - B - C").unwrap().to_string(), "(- (- A B) C)");
        assert_eq!(parse_expr("A*B*C").unwrap().to_string(), "(* (* A B) C)");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_expr("A + * B").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        assert!(e.message.contains("`*`"), "{e}");
        let e = parse_expr("A +\n (B").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        assert!(parse_expr("").is_err());
        assert!(parse_expr("A B").is_err());
        assert!(parse_expr("-A").is_err());
        assert_eq!(parse_expr("2x").unwrap_err().column, 1);
    }
}
