//! Recursive-descent parser for series expressions over a chart.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nat)?
//! atom   := rational | identifier | '(' expr ')' | '-' atom
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::series::{Chart, GradedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {column} (offset {offset}): {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parsed series plus notes about terms discarded by truncation.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub series: GradedSeries,
    pub warnings: Vec<String>,
}

pub fn parse_expression(chart: &Arc<Chart>, input: &str) -> Result<GradedSeries, ParseError> {
    parse_expression_with_warnings(chart, input).map(|p| p.series)
}

pub fn parse_expression_with_warnings(chart: &Arc<Chart>, input: &str) -> Result<Parsed, ParseError> {
    let mut p = Parser {
        chart,
        src: input,
        pos: 0,
        truncated: false,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let series = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(&format!("unexpected character `{}`", p.peek().unwrap())));
    }
    let warnings = if p.truncated {
        vec!["terms beyond the truncation order were dropped".to_string()]
    } else {
        Vec::new()
    };
    Ok(Parsed { series, warnings })
}

struct Parser<'a> {
    chart: &'a Arc<Chart>,
    src: &'a str,
    pos: usize,
    truncated: bool,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, message: &str) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, offset: usize, message: &str) -> ParseError {
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().unwrap_or("").chars().count() + 1;
        ParseError {
            offset,
            line,
            column,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<GradedSeries, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<GradedSeries, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let rhs = self.factor()?;
            acc = acc.mul_tracked(&rhs, &mut self.truncated);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<GradedSeries, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error("expected exponent"));
        }
        let k: u32 = digits
            .parse()
            .map_err(|_| self.error_at(start, "exponent too large"))?;
        let mut acc = GradedSeries::one(self.chart);
        for _ in 0..k {
            acc = acc.mul_tracked(&base, &mut self.truncated);
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<GradedSeries, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('-') => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                GradedSeries::variable_named(self.chart, name)
                    .map_err(|_| self.error_at(start, &format!("unknown coordinate `{name}`")))
            }
            Some(c) => Err(self.error(&format!("unexpected character `{c}`"))),
        }
    }

    fn rational(&mut self) -> Result<GradedSeries, ParseError> {
        let num: BigInt = self.digits().parse().expect("digits");
        let mut value = BigRational::from_integer(num);
        let save = self.pos;
        if self.eat('/') {
            self.skip_ws();
            let start = self.pos;
            let den = self.digits();
            if den.is_empty() {
                // Not a denominator; leave `/` for the caller to reject.
                self.pos = save;
            } else {
                let den: BigInt = den.parse().expect("digits");
                if den.is_zero() {
                    return Err(self.error_at(start, "zero denominator"));
                }
                value /= BigRational::from_integer(den);
            }
        }
        Ok(GradedSeries::constant(self.chart, value))
    }
}
