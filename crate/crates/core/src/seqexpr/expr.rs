use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Log,
    Exp,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sqrt" => Some(Func::Sqrt),
            "log" => Some(Func::Log),
            "exp" => Some(Func::Exp),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Abs => "abs",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sqrt => x.sqrt(),
            Func::Log => x.ln(),
            Func::Exp => x.exp(),
            Func::Abs => x.abs(),
        }
    }
}

/// Expression in the single variable `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, n: i64) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Var => n as f64,
            Expr::Neg(e) => -e.eval(n),
            Expr::Call(f, e) => f.apply(e.eval(n)),
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.eval(n), r.eval(n));
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                    BinOp::Pow => l.powf(r),
                }
            }
        }
    }

    // Binding strength used by both the parser and the printer.
    fn level(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var | Expr::Call(..) => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Var => f.write_str("n"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_child(f, e, e.level() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                if *op == BinOp::Pow {
                    write_child(f, l, l.level() <= 4)?;
                    f.write_str(sym)?;
                    write_child(f, r, r.level() < 3)
                } else {
                    let lv = self.level();
                    write_child(f, l, l.level() < lv)?;
                    write!(f, " {sym} ")?;
                    write_child(f, r, r.level() <= lv)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // optional exponent: e, E followed by an optionally signed integer
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("`{text}`"),
                })?;
                out.push((start, Tok::Num(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["number", "`n`", "function", "`(`", "operator"],
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const OPERAND: &[&str] = &["number", "`n`", "function", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            // right-associative; the exponent may carry its own sign
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Num(x))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.sum()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "n" {
                    return Ok(Expr::Var);
                }
                if *self.peek() != Tok::LParen {
                    return Err(ParseError::UnknownIdentifier { name, offset });
                }
                let func =
                    Func::from_name(&name).ok_or(ParseError::UnknownFunction { name, offset })?;
                self.bump();
                let arg = self.sum()?;
                self.expect_rparen()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.error(OPERAND)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&["`)`", "operator"]))
        }
    }
}

/// Parses an expression such as `n*2^(n-2)` or `sqrt(2*(n+1))`.
///
/// `^` is right-associative and binds tighter than unary minus, so `-2^2`
/// is `-(2^2)`.
pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    if *p.peek() == Tok::End {
        return Err(p.error(OPERAND));
    }
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, n: i64) -> f64 {
        parse_expression(src).unwrap().eval(n)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("-2^2", 0), -4.0);
        assert_eq!(ev("2^3^2", 0), 512.0);
        assert_eq!(ev("2^-1", 0), 0.5);
        assert_eq!(ev("1-2-3", 0), -4.0);
        assert_eq!(ev("8/4/2", 0), 1.0);
        assert_eq!(ev("2*-3", 0), -6.0);
    }

    #[test]
    fn spec_values() {
        assert_eq!(ev("2^n", 3), 8.0);
        assert_eq!(ev("n*2^(n-2)", -1), -0.125);
        assert_eq!(ev("(1-2^(-2*(n+1)))/(2*(n+1))", 0), 0.375);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_expression("2 + * 3") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_expression("sin(n)"),
            Err(ParseError::UnknownFunction { offset: 0, .. })
        ));
        assert!(matches!(
            parse_expression("n + k"),
            Err(ParseError::UnknownIdentifier { offset: 4, .. })
        ));
        assert!(parse_expression("").is_err());
        assert!(parse_expression("(n").is_err());
        assert!(parse_expression("n n").is_err());
    }

    #[test]
    fn printing_reparses() {
        for src in [
            "-2^2", "(-2)^2", "2^3^2", "(2^3)^2", "1-(2-3)", "-(n+1)*3", "2^-n",
        ] {
            let e = parse_expression(src).unwrap();
            assert_eq!(parse_expression(&e.to_string()).unwrap(), e, "{src}");
        }
    }
}
