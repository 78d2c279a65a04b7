//! Text front end: a lexer and recursive-descent parser for sequence
//! expressions and interval-set literals, with byte-span errors, and
//! formatters that round-trip structurally.
//!
//! Grammar, precedence low to high: addition and subtraction;
//! multiplication and division; unary minus; `^` with an integer
//! literal exponent (right-associative); atoms. Atoms are integer
//! literals, rational literals `p/q` (a literal only when both sides
//! are integer literals), `n`, `(-1)^n`, `periodic(...)`, `abs(...)`,
//! `patch(e; i->q, ...)`, `sub(e; stride, offset)`, and parenthesized
//! expressions. General `base^n` exponentiation is rejected: it leaves
//! the symbolic fragment.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::fluxion::ExtendedRational;
use crate::rational::Rational;
use crate::seqterm::SequenceTerm;
use crate::topology::{Interval, IntervalSet};

/// Byte range `[start, end)` into the parsed input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// A parse failure: where, what was expected, and the offending slice
/// reproduced verbatim.
#[derive(Clone, Debug)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "expected {}, found '{}' at {}",
            self.expected.join(" or "),
            self.found,
            self.span
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Arrow,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let tok = match bytes[i] {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Int(text[start..i].parse().unwrap())
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            b'-' if i + 1 < bytes.len() && bytes[i + 1] == b'>' => {
                i += 2;
                Tok::Arrow
            }
            other => {
                i += 1;
                match other {
                    b'+' => Tok::Plus,
                    b'-' => Tok::Minus,
                    b'*' => Tok::Star,
                    b'/' => Tok::Slash,
                    b'^' => Tok::Caret,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b',' => Tok::Comma,
                    b';' => Tok::Semicolon,
                    _ => {
                        let ch = text[start..].chars().next().unwrap();
                        let span = SourceSpan {
                            start,
                            end: start + ch.len_utf8(),
                        };
                        return Err(ParseError {
                            span,
                            expected: vec!["a token".to_string()],
                            found: text[span.start..span.end].to_string(),
                        });
                    }
                }
            }
        };
        toks.push((tok, SourceSpan { start, end: i }));
    }
    toks.push((
        Tok::Eof,
        SourceSpan {
            start: text.len(),
            end: text.len(),
        },
    ));
    Ok(toks)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> (Tok, SourceSpan) {
        let out = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        out
    }

    fn found_at(&self, span: SourceSpan) -> String {
        if span.start >= self.text.len() {
            "end of input".to_string()
        } else {
            self.text[span.start..span.end].to_string()
        }
    }

    fn error(&self, span: SourceSpan, expected: &[&str]) -> ParseError {
        ParseError {
            span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.found_at(span),
        }
    }

    fn err<T>(&self, span: SourceSpan, expected: &[&str]) -> PResult<T> {
        Err(self.error(span, expected))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            self.err(self.span(), &[what])
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(self.span(), &["end of input"])
        }
    }

    // Expression grammar.

    fn parse_expr(&mut self) -> PResult<SequenceTerm> {
        let mut acc = self.parse_mul()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    acc = acc.add(self.parse_mul()?);
                }
                Tok::Minus => {
                    self.advance();
                    acc = acc.sub(self.parse_mul()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_mul(&mut self) -> PResult<SequenceTerm> {
        let mut acc = self.parse_unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.advance();
                    acc = acc.mul(self.parse_unary()?);
                }
                Tok::Slash => {
                    self.advance();
                    acc = acc.div(self.parse_unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_unary(&mut self) -> PResult<SequenceTerm> {
        if *self.peek() == Tok::Minus {
            self.advance();
            let inner = self.parse_unary()?;
            return Ok(match inner {
                SequenceTerm::Const(c) => SequenceTerm::Const(-c),
                other => SequenceTerm::from_int(-1).mul(other),
            });
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> PResult<SequenceTerm> {
        let atom = self.parse_atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(atom);
        }
        self.advance();
        if let Tok::Ident(name) = self.peek() {
            if name == "n" {
                // Only the alternating sign is allowed an index
                // exponent; general base^n leaves the fragment.
                if atom == SequenceTerm::Const(crate::rational::q(-1)) {
                    self.advance();
                    return Ok(SequenceTerm::alternating());
                }
                return self.err(self.span(), &["an integer exponent"]);
            }
        }
        let e = self.parse_exponent()?;
        Ok(atom.int_pow(e))
    }

    fn parse_exponent(&mut self) -> PResult<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.advance();
            true
        } else {
            false
        };
        let span = self.span();
        let Tok::Int(v) = self.peek().clone() else {
            return self.err(span, &["an integer exponent"]);
        };
        self.advance();
        let mut val = i64::try_from(&v)
            .map_err(|_| self.error(span, &["an exponent that fits in 63 bits"]))?;
        if *self.peek() == Tok::Caret {
            // Right-associative literal towers: a^b^c is a^(b^c).
            self.advance();
            let upper = self.parse_exponent()?;
            let fit = u32::try_from(upper)
                .ok()
                .and_then(|u| val.checked_pow(u));
            val = match fit {
                Some(v) => v,
                None => return self.err(span, &["an exponent that fits in 63 bits"]),
            };
        }
        Ok(if neg { -val } else { val })
    }

    fn parse_atom(&mut self) -> PResult<SequenceTerm> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(p) => {
                self.advance();
                if *self.peek() == Tok::Slash {
                    if let Tok::Int(den) = self.peek2().clone() {
                        self.advance();
                        let den_span = self.span();
                        self.advance();
                        if den.is_zero() {
                            return self.err(den_span, &["a nonzero denominator"]);
                        }
                        return Ok(SequenceTerm::Const(Rational::new(p, den)));
                    }
                }
                Ok(SequenceTerm::Const(Rational::from_integer(p)))
            }
            Tok::Ident(name) => match name.as_str() {
                "n" => {
                    self.advance();
                    Ok(SequenceTerm::Index)
                }
                "abs" => {
                    self.advance();
                    self.expect(Tok::LParen, "'('")?;
                    let inner = self.parse_expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(inner.abs())
                }
                "periodic" => self.parse_periodic(),
                "patch" => self.parse_patch(),
                "sub" => self.parse_subseq(),
                _ => self.err(span, &["an atom"]),
            },
            Tok::LParen => {
                self.advance();
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.err(span, &["an atom"]),
        }
    }

    /// Signed rational literal: used for periodic cycles, patch values
    /// and set endpoints, where full expressions are not allowed.
    fn parse_value(&mut self) -> PResult<Rational> {
        let neg = if *self.peek() == Tok::Minus {
            self.advance();
            true
        } else {
            false
        };
        let span = self.span();
        let Tok::Int(p) = self.peek().clone() else {
            return self.err(span, &["a rational literal"]);
        };
        self.advance();
        let mut value = Rational::from_integer(p);
        if *self.peek() == Tok::Slash {
            if let Tok::Int(den) = self.peek2().clone() {
                self.advance();
                let den_span = self.span();
                self.advance();
                if den.is_zero() {
                    return self.err(den_span, &["a nonzero denominator"]);
                }
                value /= Rational::from_integer(den);
            }
        }
        Ok(if neg { -value } else { value })
    }

    fn parse_periodic(&mut self) -> PResult<SequenceTerm> {
        self.advance();
        self.expect(Tok::LParen, "'('")?;
        let mut cycle = vec![self.parse_value()?];
        while *self.peek() == Tok::Comma {
            self.advance();
            cycle.push(self.parse_value()?);
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(SequenceTerm::periodic(cycle))
    }

    fn parse_patch(&mut self) -> PResult<SequenceTerm> {
        self.advance();
        self.expect(Tok::LParen, "'('")?;
        let inner = self.parse_expr()?;
        self.expect(Tok::Semicolon, "';'")?;
        let mut overrides = BTreeMap::new();
        loop {
            let idx_span = self.span();
            let Tok::Int(idx) = self.peek().clone() else {
                return self.err(idx_span, &["a positive index"]);
            };
            self.advance();
            let idx = match u64::try_from(&idx) {
                Ok(i) if i >= 1 => i,
                _ => return self.err(idx_span, &["a positive index"]),
            };
            self.expect(Tok::Arrow, "'->'")?;
            overrides.insert(idx, self.parse_value()?);
            if *self.peek() == Tok::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(inner.patch(overrides))
    }

    fn parse_subseq(&mut self) -> PResult<SequenceTerm> {
        self.advance();
        self.expect(Tok::LParen, "'('")?;
        let inner = self.parse_expr()?;
        self.expect(Tok::Semicolon, "';'")?;
        let stride_span = self.span();
        let stride = match self.peek().clone() {
            Tok::Int(s) => match u64::try_from(&s) {
                Ok(s) if s >= 1 => {
                    self.advance();
                    s
                }
                _ => return self.err(stride_span, &["a positive stride"]),
            },
            _ => return self.err(stride_span, &["a positive stride"]),
        };
        self.expect(Tok::Comma, "','")?;
        let offset_span = self.span();
        let offset = match self.peek().clone() {
            Tok::Int(o) => match u64::try_from(&o) {
                Ok(o) => {
                    self.advance();
                    o
                }
                _ => return self.err(offset_span, &["a nonnegative offset"]),
            },
            _ => return self.err(offset_span, &["a nonnegative offset"]),
        };
        self.expect(Tok::RParen, "')'")?;
        Ok(inner.subseq(stride, offset))
    }

    // Interval-set grammar.

    fn parse_piece(&mut self) -> PResult<Interval> {
        let open_span = self.span();
        match self.peek().clone() {
            Tok::LBrace => {
                self.advance();
                let v = self.parse_value()?;
                self.expect(Tok::RBrace, "'}'")?;
                Ok(Interval::new(
                    ExtendedRational::Finite(v.clone()),
                    true,
                    ExtendedRational::Finite(v),
                    true,
                ))
            }
            Tok::LBracket | Tok::LParen => {
                let lo_closed = *self.peek() == Tok::LBracket;
                self.advance();
                let lo = self.parse_endpoint()?;
                self.expect(Tok::Comma, "','")?;
                let hi = self.parse_endpoint()?;
                let (hi_closed, close_span) = match self.peek() {
                    Tok::RBracket => (true, self.advance().1),
                    Tok::RParen => (false, self.advance().1),
                    _ => return self.err(self.span(), &["']'", "')'"]),
                };
                let whole = SourceSpan {
                    start: open_span.start,
                    end: close_span.end,
                };
                let nonempty = lo < hi
                    || (lo == hi && lo.is_finite() && lo_closed && hi_closed);
                if !nonempty {
                    return self.err(whole, &["a nonempty interval"]);
                }
                Ok(Interval::new(lo, lo_closed, hi, hi_closed))
            }
            _ => self.err(open_span, &["an interval or a singleton"]),
        }
    }

    fn parse_endpoint(&mut self) -> PResult<ExtendedRational> {
        match self.peek().clone() {
            Tok::Ident(w) if w == "inf" => {
                self.advance();
                Ok(ExtendedRational::PosInfinity)
            }
            Tok::Plus => {
                self.advance();
                let span = self.span();
                match self.peek() {
                    Tok::Ident(w) if w == "inf" => {
                        self.advance();
                        Ok(ExtendedRational::PosInfinity)
                    }
                    _ => self.err(span, &["'inf'"]),
                }
            }
            Tok::Minus => {
                if let Tok::Ident(w) = self.peek2() {
                    if w == "inf" {
                        self.advance();
                        self.advance();
                        return Ok(ExtendedRational::NegInfinity);
                    }
                }
                Ok(ExtendedRational::Finite(self.parse_value()?))
            }
            Tok::Int(_) => Ok(ExtendedRational::Finite(self.parse_value()?)),
            _ => self.err(self.span(), &["an endpoint"]),
        }
    }
}

/// Parses a sequence expression.
pub fn parse_term(text: &str) -> Result<SequenceTerm, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { text, toks, pos: 0 };
    let term = p.parse_expr()?;
    p.expect_eof()?;
    Ok(term)
}

/// Parses an interval-set literal such as `[0,1] U (2,3) U {5}`,
/// `(-inf, 0)`, or `empty`. The result is canonicalized.
pub fn parse_set(text: &str) -> Result<IntervalSet, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { text, toks, pos: 0 };
    if let Tok::Ident(w) = p.peek() {
        if w == "empty" {
            p.advance();
            p.expect_eof()?;
            return Ok(IntervalSet::empty());
        }
    }
    let mut pieces = vec![p.parse_piece()?];
    loop {
        match p.peek() {
            Tok::Ident(u) if u == "U" => {
                p.advance();
                pieces.push(p.parse_piece()?);
            }
            _ => break,
        }
    }
    p.expect_eof()?;
    Ok(IntervalSet::from_intervals(pieces))
}

/// Printing precedence classes: 0 forces parentheses in any child
/// position, 5 never needs them.
fn print_prec(t: &SequenceTerm) -> u8 {
    match t {
        SequenceTerm::Const(c) => {
            if c.is_negative() {
                0
            } else {
                5
            }
        }
        SequenceTerm::Add(..) | SequenceTerm::Sub(..) => 1,
        SequenceTerm::Mul(a, b) if is_minus_one(a) && !matches!(**b, SequenceTerm::Const(_)) => 3,
        SequenceTerm::Mul(..) | SequenceTerm::Div(..) => 2,
        SequenceTerm::IntPow(..) => 4,
        SequenceTerm::Periodic(c) if is_alternation(c) => 4,
        SequenceTerm::Index
        | SequenceTerm::Periodic(_)
        | SequenceTerm::Abs(_)
        | SequenceTerm::Patch(..)
        | SequenceTerm::AffineSubseq(..)
        | SequenceTerm::Opaque(_) => 5,
    }
}

fn is_minus_one(t: &SequenceTerm) -> bool {
    matches!(t, SequenceTerm::Const(c) if *c == crate::rational::q(-1))
}

fn is_alternation(cycle: &[Rational]) -> bool {
    cycle.len() == 2 && cycle[0] == crate::rational::q(-1) && cycle[1] == crate::rational::q(1)
}

/// Whether a formatted term begins with a bare integer token, which
/// could fuse with a preceding integer and `/` into a rational literal.
fn starts_with_integer(t: &SequenceTerm) -> bool {
    match t {
        SequenceTerm::Const(c) => !c.is_negative(),
        SequenceTerm::IntPow(base, _) => {
            matches!(&**base, SequenceTerm::Const(c) if !c.is_negative())
        }
        _ => false,
    }
}

fn fmt_term_into(t: &SequenceTerm, ctx: u8, out: &mut String) {
    use std::fmt::Write;
    let prec = print_prec(t);
    let parens = prec < ctx;
    if parens {
        out.push('(');
    }
    match t {
        SequenceTerm::Const(c) => {
            let _ = write!(out, "{c}");
        }
        SequenceTerm::Index => out.push('n'),
        SequenceTerm::Add(a, b) => {
            fmt_term_into(a, 1, out);
            out.push_str(" + ");
            fmt_term_into(b, 2, out);
        }
        SequenceTerm::Sub(a, b) => {
            fmt_term_into(a, 1, out);
            out.push_str(" - ");
            fmt_term_into(b, 2, out);
        }
        SequenceTerm::Mul(a, b) if is_minus_one(a) && !matches!(**b, SequenceTerm::Const(_)) => {
            out.push('-');
            fmt_term_into(b, 4, out);
        }
        SequenceTerm::Mul(a, b) => {
            fmt_term_into(a, 2, out);
            out.push('*');
            fmt_term_into(b, 3, out);
        }
        SequenceTerm::Div(a, b) => {
            // An integer numerator printed flat against an integer-led
            // denominator would re-lex as one rational literal; parens
            // on the numerator keep the division structural.
            let guard = matches!(&**a, SequenceTerm::Const(c) if c.is_integer() && !c.is_negative())
                && starts_with_integer(b);
            if guard {
                out.push('(');
                fmt_term_into(a, 0, out);
                out.push(')');
            } else {
                fmt_term_into(a, 2, out);
            }
            out.push('/');
            fmt_term_into(b, 3, out);
        }
        SequenceTerm::IntPow(a, e) => {
            fmt_term_into(a, 5, out);
            let _ = write!(out, "^{e}");
        }
        SequenceTerm::Abs(a) => {
            out.push_str("abs(");
            fmt_term_into(a, 0, out);
            out.push(')');
        }
        SequenceTerm::Periodic(cycle) if is_alternation(cycle) => {
            out.push_str("(-1)^n");
        }
        SequenceTerm::Periodic(cycle) => {
            out.push_str("periodic(");
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{v}");
            }
            out.push(')');
        }
        SequenceTerm::Patch(a, overrides) => {
            out.push_str("patch(");
            fmt_term_into(a, 0, out);
            out.push_str("; ");
            for (i, (k, v)) in overrides.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{k}->{v}");
            }
            out.push(')');
        }
        SequenceTerm::AffineSubseq(a, stride, offset) => {
            out.push_str("sub(");
            fmt_term_into(a, 0, out);
            let _ = write!(out, "; {stride}, {offset}");
            out.push(')');
        }
        SequenceTerm::Opaque(o) => {
            // Opaque sequences have no textual form; the marker is
            // deliberately unparseable.
            let _ = write!(out, "<{}>", o.label());
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders a term with minimal parenthesization; for opaque-free terms
/// `parse_term(format_term(t))` is structurally equal to `t`.
pub fn format_term(t: &SequenceTerm) -> String {
    let mut out = String::new();
    fmt_term_into(t, 0, &mut out);
    out
}

fn fmt_endpoint(e: &ExtendedRational, out: &mut String) {
    use std::fmt::Write;
    match e {
        ExtendedRational::Finite(v) => {
            let _ = write!(out, "{v}");
        }
        ExtendedRational::PosInfinity => out.push_str("inf"),
        ExtendedRational::NegInfinity => out.push_str("-inf"),
    }
}

/// Renders a canonical interval set; `parse_set(format_set(s))` equals
/// `s`.
pub fn format_set(set: &IntervalSet) -> String {
    use std::fmt::Write;
    if set.components().is_empty() {
        return "empty".to_string();
    }
    let mut out = String::new();
    for (i, c) in set.components().iter().enumerate() {
        if i > 0 {
            out.push_str(" U ");
        }
        if c.is_singleton() {
            let ExtendedRational::Finite(v) = &c.lo else {
                unreachable!("singletons have finite endpoints");
            };
            let _ = write!(out, "{{{v}}}");
        } else {
            out.push(if c.lo_closed { '[' } else { '(' });
            fmt_endpoint(&c.lo, &mut out);
            out.push(',');
            fmt_endpoint(&c.hi, &mut out);
            out.push(if c.hi_closed { ']' } else { ')' });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn index() -> SequenceTerm {
        SequenceTerm::index()
    }

    #[test]
    fn shifted_alternation_example_parses_structurally() {
        let got = parse_term("(1 + (-1)^n) / n").unwrap();
        let want = SequenceTerm::from_int(1)
            .add(SequenceTerm::alternating())
            .div(index());
        assert_eq!(got, want);
    }

    #[test]
    fn patch_overrides_and_falls_through() {
        let got = parse_term("patch(1/n; 1->5, 3->7)").unwrap();
        let want = SequenceTerm::from_int(1).div(index()).patch(
            [(1, q(5)), (3, q(7))].into_iter().collect(),
        );
        assert_eq!(got, want);
        assert_eq!(got.eval_exact(1).unwrap(), q(5));
        assert_eq!(got.eval_exact(2).unwrap(), qr(1, 2));
        assert_eq!(got.eval_exact(3).unwrap(), q(7));
    }

    #[test]
    fn truncated_input_errors_past_the_end() {
        let err = parse_term("n +").unwrap_err();
        assert_eq!(err.span, SourceSpan { start: 3, end: 3 });
        assert!(err.expected.iter().any(|e| e.contains("atom")));
        assert_eq!(err.found, "end of input");
    }

    #[test]
    fn zero_patch_index_is_rejected_in_place() {
        let err = parse_term("patch(1/n; 0->5)").unwrap_err();
        assert_eq!(err.span, SourceSpan { start: 11, end: 12 });
        assert!(err.expected.iter().any(|e| e.contains("positive index")));
        assert_eq!(err.found, "0");
    }

    #[test]
    fn reversed_interval_is_rejected_as_a_whole() {
        let err = parse_set("[2,1]").unwrap_err();
        assert_eq!(err.span, SourceSpan { start: 0, end: 5 });
        assert!(err.expected.iter().any(|e| e.contains("interval")));
        assert_eq!(err.found, "[2,1]");
    }

    #[test]
    fn precedence_puts_power_above_product_above_sum() {
        let t = parse_term("1+2*n^2").unwrap();
        assert_eq!(t.eval_exact(3).unwrap(), q(19));
        let want = SequenceTerm::from_int(1)
            .add(SequenceTerm::from_int(2).mul(index().int_pow(2)));
        assert_eq!(t, want);
    }

    #[test]
    fn rational_literals_need_two_integer_tokens() {
        assert_eq!(parse_term("1/2").unwrap(), SequenceTerm::constant(qr(1, 2)));
        assert_eq!(
            parse_term("1/n").unwrap(),
            SequenceTerm::from_int(1).div(index())
        );
        assert_eq!(
            parse_term("1/2/3").unwrap(),
            SequenceTerm::constant(qr(1, 2)).div(SequenceTerm::from_int(3))
        );
        assert_eq!(
            parse_term("(1)/2").unwrap(),
            SequenceTerm::from_int(1).div(SequenceTerm::from_int(2))
        );
        assert!(parse_term("1/0").is_err());
    }

    #[test]
    fn integer_quotients_format_without_literal_fusion() {
        let t = SequenceTerm::from_int(1).div(SequenceTerm::from_int(2));
        assert_eq!(format_term(&t), "(1)/2");
        assert_eq!(parse_term(&format_term(&t)).unwrap(), t);

        let u = SequenceTerm::from_int(1).div(SequenceTerm::from_int(2).int_pow(3));
        assert_eq!(parse_term(&format_term(&u)).unwrap(), u);

        let v = SequenceTerm::from_int(2).div(SequenceTerm::constant(qr(1, 2)));
        assert_eq!(parse_term(&format_term(&v)).unwrap(), v);
    }

    #[test]
    fn reciprocal_formats_plainly() {
        let t = SequenceTerm::from_int(1).div(index());
        assert_eq!(format_term(&t), "1/n");
    }

    #[test]
    fn alternating_sign_is_a_special_form() {
        assert_eq!(parse_term("(-1)^n").unwrap(), SequenceTerm::alternating());
        assert_eq!(format_term(&SequenceTerm::alternating()), "(-1)^n");
        assert!(parse_term("2^n").is_err());
        assert!(parse_term("n^n").is_err());
    }

    #[test]
    fn exponent_towers_are_right_associative() {
        assert_eq!(parse_term("n^2^3").unwrap(), index().int_pow(8));
        assert_eq!(parse_term("n^-2").unwrap(), index().int_pow(-2));
    }

    #[test]
    fn negation_round_trips_structurally() {
        let neg_n = parse_term("-n").unwrap();
        assert_eq!(neg_n, index().neg());
        assert_eq!(format_term(&neg_n), "-n");
        assert_eq!(parse_term("-5/2").unwrap(), SequenceTerm::constant(qr(-5, 2)));
        let awkward = SequenceTerm::from_int(-1).mul(SequenceTerm::from_int(5));
        assert_eq!(parse_term(&format_term(&awkward)).unwrap(), awkward);
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(
            parse_term(" 1 +  2 * n ^ 2 ").unwrap(),
            parse_term("1+2*n^2").unwrap()
        );
    }

    #[test]
    fn trailing_input_is_rejected() {
        let err = parse_term("n n").unwrap_err();
        assert_eq!(err.span, SourceSpan { start: 2, end: 3 });
        assert!(err.expected.iter().any(|e| e.contains("end of input")));
    }

    #[test]
    fn set_literals_parse_and_canonicalize() {
        let s = parse_set("[0,1] U {2}").unwrap();
        assert_eq!(s.components().len(), 2);
        assert_eq!(format_set(&s), "[0,1] U {2}");

        let ray = parse_set("(-inf, 0)").unwrap();
        assert_eq!(ray.components().len(), 1);
        assert!(!ray.is_bounded());
        assert_eq!(format_set(&ray), "(-inf,0)");

        assert_eq!(parse_set("empty").unwrap(), IntervalSet::empty());
        assert_eq!(format_set(&IntervalSet::empty()), "empty");

        // Touching pieces merge during canonicalization and the
        // printed form round-trips the canonical set.
        let merged = parse_set("[0,1] U [1,2]").unwrap();
        assert_eq!(merged.components().len(), 1);
        assert_eq!(parse_set(&format_set(&merged)).unwrap(), merged);
    }

    #[test]
    fn set_endpoints_accept_signs_and_rationals() {
        let s = parse_set("[-3/2, -1/2) U (0, inf)").unwrap();
        assert_eq!(s.components().len(), 2);
        assert_eq!(parse_set(&format_set(&s)).unwrap(), s);
        assert!(parse_set("(inf, 0)").is_err());
        assert!(parse_set("(2,2)").is_err());
        assert!(parse_set("[2,2)").is_err());
    }

    #[test]
    fn degenerate_closed_interval_is_a_singleton() {
        let s = parse_set("[2,2]").unwrap();
        assert_eq!(s, IntervalSet::singleton(q(2)));
        assert_eq!(format_set(&s), "{2}");
    }
}
