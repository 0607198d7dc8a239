//! Expressions in one variable `x`.
//!
//! ```text
//! expr    = term { ("+" | "-") term }
//! term    = unary { ("*" | "/") unary }
//! unary   = "-" unary | power
//! power   = atom [ "^" unary ]
//! atom    = number | "x" | func "(" expr ")" | "(" expr ")"
//! func    = "exp" | "cos" | "sin" | "abs" | "sqrt"
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2` is
//! `-(x^2)` and `2^-1` is `0.5`. The Unicode minus sign `−` is accepted as `-`.
//! Positions in syntax errors are zero-based character offsets.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Cos,
    Sin,
    Abs,
    Sqrt,
}

impl Func {
    const ALL: [Func; 5] = [Func::Exp, Func::Cos, Func::Sin, Func::Abs, Func::Sqrt];

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Cos => "cos",
            Func::Sin => "sin",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Cos => v.cos(),
            Func::Sin => v.sin(),
            Func::Abs => v.abs(),
            Func::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

const NEG_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x),
            Expr::Call(f, e) => f.apply(e.eval(x)),
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(x), r.eval(x));
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

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            Expr::Neg(_) => NEG_PRECEDENCE,
            // a negative literal prints with a leading minus
            Expr::Num(v) if v.is_sign_negative() => NEG_PRECEDENCE,
            Expr::Num(_) | Expr::X | Expr::Call(..) => ATOM_PRECEDENCE,
        }
    }

    fn is_even_symmetric(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::X => false,
            Expr::Call(Func::Abs, _) => true,
            Expr::Call(Func::Cos, e) => e.is_even_symmetric() || e.is_odd_symmetric(),
            Expr::Call(_, e) => e.is_even_symmetric(),
            Expr::Neg(e) => e.is_even_symmetric(),
            Expr::Bin(BinOp::Pow, l, r) => {
                l.is_even_symmetric() && r.is_even_symmetric()
                    || matches!(**r, Expr::Num(n) if n.fract() == 0.0 && (n as i64) % 2 == 0)
                        && l.is_odd_symmetric()
            }
            Expr::Bin(BinOp::Mul | BinOp::Div, l, r) => {
                (l.is_even_symmetric() && r.is_even_symmetric())
                    || (l.is_odd_symmetric() && r.is_odd_symmetric())
            }
            Expr::Bin(_, l, r) => l.is_even_symmetric() && r.is_even_symmetric(),
        }
    }

    fn is_odd_symmetric(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Neg(e) => e.is_odd_symmetric(),
            Expr::Call(Func::Sin, e) => e.is_odd_symmetric(),
            Expr::Bin(BinOp::Add | BinOp::Sub, l, r) => l.is_odd_symmetric() && r.is_odd_symmetric(),
            Expr::Bin(BinOp::Mul | BinOp::Div, l, r) => {
                (l.is_odd_symmetric() && r.is_even_symmetric())
                    || (l.is_even_symmetric() && r.is_odd_symmetric())
            }
            _ => false,
        }
    }

    /// Syntactic evenness: true only when the tree is visibly invariant under `x ↦ -x`.
    pub fn is_even(&self) -> bool {
        self.is_even_symmetric()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => write!(f, "x"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Neg(e) => {
                write!(f, "-")?;
                wrap(f, e, e.precedence() < NEG_PRECEDENCE)
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                let (lp, rp) = if *op == BinOp::Pow {
                    // right-associative; a negated base must be grouped
                    (l.precedence() <= p, r.precedence() < NEG_PRECEDENCE)
                } else {
                    (l.precedence() < p, r.precedence() <= p)
                };
                wrap(f, l, lp)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, r, rp)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn syntax(position: usize, expected: &[&str]) -> Error {
    Error::SyntaxError {
        position,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text.parse().map_err(|_| syntax(start, &["number"]))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else {
            let tok = match c {
                '+' | '*' | '/' | '^' | '-' => Tok::Op(c),
                '\u{2212}' => Tok::Op('-'),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(syntax(
                        start,
                        &["number", "x", "function", "(", "operator"],
                    ))
                }
            };
            out.push((tok, start));
            i += 1;
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn expect_close(&mut self) -> Result<()> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.here(), &[")"]))
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.here();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_close()?;
                Ok(e)
            }
            Tok::Ident(name) if name == "x" => Ok(Expr::X),
            Tok::Ident(name) => {
                let func = Func::ALL
                    .into_iter()
                    .find(|f| f.name() == name)
                    .ok_or_else(|| syntax(at, &["x", "exp", "cos", "sin", "abs", "sqrt"]))?;
                if *self.peek() != Tok::LParen {
                    return Err(syntax(self.here(), &["("]));
                }
                self.bump();
                let arg = self.expr()?;
                self.expect_close()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(syntax(at, &["number", "x", "function", "("])),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let expected: &[&str] = if *p.peek() == Tok::RParen {
            &["end of input"]
        } else {
            &["operator", "end of input"]
        };
        return Err(syntax(p.here(), expected));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("1 + 2 * 3").unwrap().eval(0.0), 7.0);
        assert_eq!(parse("2 ^ 3 ^ 2").unwrap().eval(0.0), 512.0);
        assert_eq!(parse("-x^2").unwrap().eval(3.0), -9.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0), 0.5);
        assert_eq!(parse("8 / 4 / 2").unwrap().eval(0.0), 1.0);
        assert_eq!(parse("1 - 2 - 3").unwrap().eval(0.0), -4.0);
        assert_eq!(parse("1.5e2 + .5").unwrap().eval(0.0), 150.5);
        assert_eq!(parse("exp(\u{2212}x^2)").unwrap().eval(0.0), 1.0);
    }

    #[test]
    fn gaussian_osc_text() {
        let e = parse("exp(x^2) + exp(x^2)*cos(exp(x^2))").unwrap();
        assert!((e.eval(0.0) - (1.0 + 1f64.cos())).abs() < 1e-15);
        assert!(e.is_even());
    }

    #[test]
    fn unbalanced_parenthesis_position() {
        match parse("1 + cos(x") {
            Err(Error::SyntaxError { position, expected }) => {
                assert_eq!(position, 9);
                assert_eq!(expected, vec![")".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn other_errors_are_positional() {
        let pos = |s: &str| match parse(s) {
            Err(Error::SyntaxError { position, .. }) => position,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(pos(""), 0);
        assert_eq!(pos("1 +"), 3);
        assert_eq!(pos("log(x)"), 0);
        assert_eq!(pos("cos x"), 4);
        assert_eq!(pos("x )"), 2);
        assert_eq!(pos("2 # 3"), 2);
        assert_eq!(pos("x y"), 2);
    }

    #[test]
    fn parity_detection() {
        for (src, even) in [
            ("1 + cos(x)", true),
            ("exp(abs(x)) * cos(exp(2 * abs(x)))", true),
            ("x^2 + sin(x)^2", true),
            ("x * sin(x)", true),
            ("x", false),
            ("exp(x)", false),
            ("1 + sin(x)", false),
        ] {
            assert_eq!(parse(src).unwrap().is_even(), even, "{src}");
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-20.0f64..20.0).prop_map(Expr::Num),
            (0u32..5).prop_map(|k| Expr::Num(k as f64)),
            Just(Expr::X),
        ];
        leaf.prop_recursive(5, 32, 2, |inner| {
            let func = prop_oneof![
                Just(Func::Exp),
                Just(Func::Cos),
                Just(Func::Sin),
                Just(Func::Abs),
                Just(Func::Sqrt)
            ];
            let op = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div),
                Just(BinOp::Pow)
            ];
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (func, inner.clone()).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
                (op, inner.clone(), inner).prop_map(|(o, l, r)| Expr::Bin(o, Box::new(l), Box::new(r))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_round_trips(e in arb_expr(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let text = e.to_string();
            let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..100 {
                let x: f64 = rng.gen_range(-5.0..5.0);
                let (u, v) = (e.eval(x), back.eval(x));
                if u.is_finite() || v.is_finite() {
                    prop_assert!((u - v).abs() <= 1e-14 * u.abs().max(v.abs()), "{text} at {x}: {u} vs {v}");
                } else {
                    prop_assert_eq!(u.is_nan(), v.is_nan());
                }
            }
        }
    }
}
