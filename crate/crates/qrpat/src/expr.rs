//! Measure expressions:
//!
//! ```text
//! E := nu1 | nu2 | atom(x, m) | scale(E, c) | conv(E, E, ...)
//! ```
//!
//! Numbers may be integers, decimals or fractions `a/b`.

use qrpat_core::measures::{nu1, nu2, MeasureSpec};
use qrpat_core::Rational;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExprError {
    #[error("at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Measure(#[from] qrpat_core::Error),
}

/// Parsed expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Nu1,
    Nu2,
    Atom(Rational, Rational),
    Scale(Box<Expr>, Rational),
    Conv(Vec<Expr>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> Result<(), ExprError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn token(&mut self, accept: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(&accept) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<Rational, ExprError> {
        let start = self.pos;
        let text = self.token(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | '/'));
        parse_rational(text).ok_or(ExprError::Syntax { pos: start, msg: format!("bad number {text:?}") })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let name = self.token(|c| c.is_ascii_alphanumeric() || c == '_');
        match name {
            "nu1" => Ok(Expr::Nu1),
            "nu2" => Ok(Expr::Nu2),
            "atom" => {
                self.eat('(')?;
                let x = self.number()?;
                self.eat(',')?;
                let m = self.number()?;
                self.eat(')')?;
                Ok(Expr::Atom(x, m))
            }
            "scale" => {
                self.eat('(')?;
                let e = self.expr()?;
                self.eat(',')?;
                let c = self.number()?;
                self.eat(')')?;
                Ok(Expr::Scale(Box::new(e), c))
            }
            "conv" => {
                self.eat('(')?;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(',') {
                    self.eat(',')?;
                    args.push(self.expr()?);
                }
                self.eat(')')?;
                Ok(Expr::Conv(args))
            }
            "" => self.err("expected a measure"),
            other => Err(ExprError::Syntax { pos: start, msg: format!("unknown measure {other:?}") }),
        }
    }
}

/// `3`, `-0.25`, `1/512`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let (n, d): (i128, i128) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
        return (d != 0).then(|| Rational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return None;
        }
        let neg = whole.starts_with('-');
        let w: i128 = if whole.is_empty() || whole == "-" { 0 } else { whole.parse().ok()? };
        let scale = 10i128.pow(frac.len() as u32);
        let f: i128 = frac.parse().ok()?;
        let n = w.abs() * scale + f;
        return Some(Rational::new(if neg { -n } else { n }, scale));
    }
    text.parse::<i128>().ok().map(Rational::from)
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn to_f64(q: Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

impl Expr {
    pub fn eval(&self, step: f64) -> Result<MeasureSpec, ExprError> {
        Ok(match self {
            Expr::Nu1 => nu1(),
            Expr::Nu2 => nu2(),
            Expr::Atom(x, m) => MeasureSpec::atom(to_f64(*x), *m),
            Expr::Scale(e, c) => e.eval(step)?.scale(to_f64(*c))?,
            Expr::Conv(args) => {
                let ms = args.iter().map(|a| a.eval(step)).collect::<Result<Vec<_>, _>>()?;
                MeasureSpec::convolve_all(&ms, step)?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_grammar() {
        let e = parse("conv(scale(nu1,2), scale(nu2, 2), nu2)").unwrap();
        assert_eq!(
            e,
            Expr::Conv(vec![
                Expr::Scale(Box::new(Expr::Nu1), Rational::from(2)),
                Expr::Scale(Box::new(Expr::Nu2), Rational::from(2)),
                Expr::Nu2,
            ])
        );
        assert_eq!(parse("atom(-1.5, 1/2)").unwrap(), Expr::Atom(Rational::new(-3, 2), Rational::new(1, 2)));
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "nu3", "conv(nu1", "scale(nu1)", "atom(1,x)", "nu1 nu2", "conv()"] {
            assert!(matches!(parse(bad), Err(ExprError::Syntax { .. })), "{bad}");
        }
        assert_eq!(
            parse("scale(nu1,-1)").unwrap().eval(1.0 / 64.0),
            Err(ExprError::Measure(qrpat_core::Error::NonPositiveScale))
        );
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/512"), Some(Rational::new(1, 512)));
        assert_eq!(parse_rational("-0.25"), Some(Rational::new(-1, 4)));
        assert_eq!(parse_rational("-.5"), Some(Rational::new(-1, 2)));
        assert_eq!(parse_rational("7"), Some(Rational::from(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1."), None);
    }

    #[test]
    fn evaluates_support() {
        let m = parse("conv(scale(nu1,2),scale(nu2,2),nu2)").unwrap().eval(1.0 / 512.0).unwrap();
        assert_eq!(m.support(), (-10.0, 10.0));
    }
}
