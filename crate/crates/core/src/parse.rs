//! Expression language for differential polynomials and λ-polynomials.
//!
//! Grammar (EBNF):
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary ("*" unary)*
//! unary    := "-" unary | power
//! power    := atom ("^" ["-"] INT)?
//! atom     := INT ("/" INT)? | SYMBOL jet? | "(" expr ")"
//! jet      := "'"+ | "^(" INT ")"
//! ```
//! A symbol is a declared parameter, field, or theta name; `L` is the λ
//! token, legal only in bracket-table entries, and `D` stands for ∂ in
//! R-matrix entries. Jet orders are nonnegative; a parenthesized `^(k)`
//! suffix is always a jet order, a bare `^k` is a power. Negative powers are
//! accepted on order-0 field symbols in Laurent charts only.

use std::collections::BTreeMap;

use num::{BigInt, BigRational};

use crate::algebra::{DiffPoly, Generator};
use crate::context::{ChartId, Ctx};
use crate::error::{Error, Result};
use crate::lambda::LambdaPoly;
use crate::param::{ParamPoly, Rat};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Primes(u32),
    Caret,
    LParen,
    RParen,
    Star,
    Plus,
    Minus,
    Slash,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].to_string())));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            '\'' => {
                let start = i;
                let mut k = 0u32;
                while i < bytes.len() && bytes[i] == b'\'' {
                    k += 1;
                    i += 1;
                }
                out.push((start, Tok::Primes(k)));
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Density,
    Lambda,
    Del,
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ctx: &'a Ctx,
    chart: ChartId,
    mode: Mode,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        let pos = self.here();
        match self.bump() {
            Some(got) if got == t => Ok(()),
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn zero(&self) -> LambdaPoly {
        LambdaPoly::zero(self.ctx, self.chart)
    }

    fn expr(&mut self) -> Result<LambdaPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LambdaPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = acc.mul(&self.unary()?)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<LambdaPoly> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    fn parse_int(&mut self, what: &str) -> Result<i64> {
        let pos = self.here();
        let mut neg = false;
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            neg = true;
        }
        match self.bump() {
            Some(Tok::Int(s)) => {
                let v: i64 = s.parse().map_err(|_| Error::Parse {
                    pos,
                    msg: format!("{what} out of range"),
                })?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn power(&mut self) -> Result<LambdaPoly> {
        let (value, bare_symbol) = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(value);
        }
        let caret_pos = self.here();
        self.bump();
        if self.peek() == Some(&Tok::LParen) {
            return Err(Error::Parse {
                pos: self.here(),
                msg: "parenthesized `^( )` is a jet suffix and only follows a field or theta symbol"
                    .into(),
            });
        }
        let e = self.parse_int("integer exponent")?;
        match bare_symbol {
            Some(g) if g.parity == crate::algebra::Parity::Odd => {
                if e == 1 {
                    Ok(value)
                } else if e == 0 {
                    Ok(LambdaPoly::from_diff(DiffPoly::one(self.ctx, self.chart)))
                } else {
                    Err(Error::Parity(format!(
                        "odd variable raised to power {e} (position {caret_pos})"
                    )))
                }
            }
            Some(g) if e < 0 => {
                let p = DiffPoly::gen_pow(self.ctx, self.chart, g, e)?;
                Ok(LambdaPoly::from_diff(p))
            }
            _ => {
                if e < 0 {
                    Err(Error::Parse {
                        pos: caret_pos,
                        msg: "negative powers are only supported on field symbols".into(),
                    })
                } else {
                    let mut acc = LambdaPoly::from_diff(DiffPoly::one(self.ctx, self.chart));
                    for _ in 0..e {
                        acc = acc.mul(&value)?;
                    }
                    Ok(acc)
                }
            }
        }
    }

    /// Returns the parsed value plus the generator when the atom was a bare
    /// field/theta symbol (used for Laurent powers and parity diagnostics).
    fn atom(&mut self) -> Result<(LambdaPoly, Option<Generator>)> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Int(s)) => {
                let num: BigInt = s.parse().expect("lexed digits");
                let mut value = BigRational::from_integer(num);
                if self.peek() == Some(&Tok::Slash) {
                    if let Some(Tok::Int(_)) = self.peek2() {
                        self.bump();
                        if let Some(Tok::Int(d)) = self.bump() {
                            let den: BigInt = d.parse().expect("lexed digits");
                            if den == BigInt::from(0) {
                                return Err(Error::Parse {
                                    pos,
                                    msg: "zero denominator".into(),
                                });
                            }
                            value /= BigRational::from_integer(den);
                        }
                    }
                }
                Ok((
                    LambdaPoly::from_diff(DiffPoly::constant(self.ctx, self.chart, value)),
                    None,
                ))
            }
            Some(Tok::Ident(name)) => self.symbol(pos, name),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok((inner, None))
            }
            Some(Tok::Minus) => Err(Error::Parse {
                pos,
                msg: "unexpected `-`".into(),
            }),
            _ => Err(Error::Parse {
                pos,
                msg: "expected a rational, symbol, or `(`".into(),
            }),
        }
    }

    fn jet_suffix(&mut self) -> Result<u32> {
        match self.peek() {
            Some(Tok::Primes(k)) => {
                let k = *k;
                self.bump();
                Ok(k)
            }
            Some(Tok::Caret) if self.peek2() == Some(&Tok::LParen) => {
                self.bump();
                self.bump();
                let pos = self.here();
                let k = self.parse_int("jet order")?;
                if k < 0 {
                    return Err(Error::Parse {
                        pos,
                        msg: "jet orders are nonnegative".into(),
                    });
                }
                self.expect(Tok::RParen, "`)` closing the jet order")?;
                Ok(k as u32)
            }
            _ => Ok(0),
        }
    }

    fn symbol(&mut self, pos: usize, name: String) -> Result<(LambdaPoly, Option<Generator>)> {
        let chart = self.ctx.chart(self.chart);
        if name == "L" || name == "D" {
            let wanted = if name == "L" { Mode::Lambda } else { Mode::Del };
            if self.mode != wanted {
                return Err(Error::Parse {
                    pos,
                    msg: if name == "L" {
                        "`L` (λ) is only valid in bracket-table entries".into()
                    } else {
                        "`D` (∂) is only valid in R-matrix entries".into()
                    },
                });
            }
            return Ok((
                LambdaPoly::monomial(1, DiffPoly::one(self.ctx, self.chart)),
                None,
            ));
        }
        if let Some(f) = chart.fields.iter().position(|x| x == &name) {
            let jet = self.jet_suffix()?;
            let g = Generator::even(f, jet);
            return Ok((
                LambdaPoly::from_diff(DiffPoly::generator(self.ctx, self.chart, g)),
                Some(g),
            ));
        }
        if let Some(f) = chart.thetas.iter().position(|x| x == &name) {
            let jet = self.jet_suffix()?;
            let g = Generator::odd(f, jet);
            return Ok((
                LambdaPoly::from_diff(DiffPoly::generator(self.ctx, self.chart, g)),
                Some(g),
            ));
        }
        if let Some(i) = self.ctx.param_index(&name) {
            return Ok((
                LambdaPoly::from_diff(DiffPoly::param(self.ctx, self.chart, i)),
                None,
            ));
        }
        Err(Error::UnknownSymbol(format!("`{name}` at byte {pos}")))
    }
}

fn run(ctx: &Ctx, chart: ChartId, text: &str, mode: Mode) -> Result<LambdaPoly> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        ctx,
        chart,
        mode,
        len: text.len(),
    };
    if p.peek().is_none() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(Error::Parse {
            pos: p.here(),
            msg: "trailing input".into(),
        });
    }
    Ok(v)
}

/// Parse a differential polynomial (no λ).
pub fn parse_diff_poly(ctx: &Ctx, chart: ChartId, text: &str) -> Result<DiffPoly> {
    let v = run(ctx, chart, text, Mode::Density)?;
    Ok(v.at_zero())
}

/// Parse a λ-polynomial (bracket-table entry).
pub fn parse_lambda_poly(ctx: &Ctx, chart: ChartId, text: &str) -> Result<LambdaPoly> {
    run(ctx, chart, text, Mode::Lambda)
}

/// Parse an R-matrix entry: a polynomial in ∂ (`D`) with parameter
/// coefficients.
pub fn parse_rmatrix_entry(
    ctx: &Ctx,
    chart: ChartId,
    text: &str,
) -> Result<BTreeMap<u32, ParamPoly>> {
    let v = run(ctx, chart, text, Mode::Del)?;
    let mut out = BTreeMap::new();
    for (&k, coeff) in v.coeffs() {
        if coeff.n_terms() != 1 || !coeff.terms().next().unwrap().0.is_unit() {
            return Err(Error::Parse {
                pos: 0,
                msg: "R-matrix entries take parameter coefficients only".into(),
            });
        }
        let c: ParamPoly = coeff.terms().next().unwrap().1.clone();
        out.insert(k, c);
    }
    Ok(out)
}

/// Parse a full bracket table; `table[a][b]` is {u^a_λ u^b}.
pub fn parse_bracket_table(
    ctx: &Ctx,
    chart: ChartId,
    entries: &[Vec<String>],
) -> Result<crate::lambda::HamOperator> {
    let mut table = Vec::with_capacity(entries.len());
    for row in entries {
        let mut out = Vec::with_capacity(row.len());
        for cell in row {
            out.push(parse_lambda_poly(ctx, chart, cell)?);
        }
        table.push(out);
    }
    crate::lambda::HamOperator::from_bracket_table(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Context;
    use crate::param::rat;
    use crate::printer::{render_diff_poly, render_lambda_poly};

    fn ctx() -> Ctx {
        Context::builder()
            .params(["c"])
            .chart("U", &["u"], true)
            .build()
    }

    #[test]
    fn parses_theta_products() {
        let c = ctx();
        let p = parse_diff_poly(&c, ChartId(0), "th*th^(1)").unwrap();
        let q = parse_diff_poly(&c, ChartId(0), "th*th'").unwrap();
        assert_eq!(p, q);
        assert_eq!(render_diff_poly(&p), "th*th'");
        // odd factors in any order, signs normalized
        let r = parse_diff_poly(&c, ChartId(0), "th'*th").unwrap();
        assert_eq!(r, p.neg());
    }

    #[test]
    fn virasoro_bracket_entry() {
        let c = ctx();
        let l = parse_lambda_poly(&c, ChartId(0), "u' + 2*u*L + c*L^3").unwrap();
        assert_eq!(l.coeff(0), parse_diff_poly(&c, ChartId(0), "u'").unwrap());
        assert_eq!(l.coeff(1), parse_diff_poly(&c, ChartId(0), "2*u").unwrap());
        assert_eq!(l.coeff(3), parse_diff_poly(&c, ChartId(0), "c").unwrap());
        assert_eq!(render_lambda_poly(&l), "u' + 2*u*L + c*L^3");
    }

    #[test]
    fn parity_and_symbol_errors() {
        let c = ctx();
        assert!(matches!(
            parse_diff_poly(&c, ChartId(0), "th^2"),
            Err(Error::Parity(_))
        ));
        assert!(matches!(
            parse_diff_poly(&c, ChartId(0), "w + 1"),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            parse_diff_poly(&c, ChartId(0), "u^(-1)"),
            Err(Error::Parse { .. })
        ));
        // λ outside bracket tables
        assert!(matches!(
            parse_diff_poly(&c, ChartId(0), "u*L"),
            Err(Error::Parse { .. })
        ));
        let err = parse_diff_poly(&c, ChartId(0), "u + @").unwrap_err();
        match err {
            Error::Parse { pos, .. } => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn laurent_and_rational_literals() {
        let c = ctx();
        let p = parse_diff_poly(&c, ChartId(0), "3/2*u^-2*u'").unwrap();
        assert!(p.has_negative_exponent());
        let (key, coeff) = p.terms().next().unwrap();
        assert_eq!(key.even, vec![((0, 0), -2), ((0, 1), 1)]);
        assert_eq!(coeff.constant_term(), rat(3, 2));
        assert_eq!(render_diff_poly(&p), "3/2*u^-2*u'");
    }

    #[test]
    fn high_jet_orders_round_trip() {
        let c = ctx();
        let p = parse_diff_poly(&c, ChartId(0), "u^(4)^2*th^(5)").unwrap();
        assert_eq!(render_diff_poly(&p), "u^(4)^2*th^(5)");
        let again = parse_diff_poly(&c, ChartId(0), &render_diff_poly(&p)).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn rmatrix_entries() {
        let c = Context::builder()
            .params(["a", "b"])
            .chart("U", &["u", "v"], false)
            .build();
        let e = parse_rmatrix_entry(&c, ChartId(0), "a + 1/2*b*D^2").unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.contains_key(&0) && e.contains_key(&2));
        // field coefficients rejected
        assert!(parse_rmatrix_entry(&c, ChartId(0), "u*D").is_err());
    }
}
