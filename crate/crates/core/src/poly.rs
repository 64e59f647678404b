//! Polynomial and support-file input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if let Some(&e) = entries.iter().find(|&&e| e < 0) {
            return Err(Error::Schema(format!("negative exponent {e}")));
        }
        Ok(ExponentVector(entries))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The support of a polynomial in named variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    variables: Vec<String>,
    points: BTreeSet<ExponentVector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupportDocument {
    variables: Vec<String>,
    support: Vec<Vec<u64>>,
}

/// `x, y, z, w` for up to four variables, `x1..xn` beyond.
pub fn default_variables(n: usize) -> Vec<String> {
    if n <= 4 {
        ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl SupportSet {
    pub fn new(variables: Vec<String>, points: Vec<Vec<i64>>) -> Result<Self> {
        let n = variables.len();
        if n < 2 {
            return Err(Error::TooFewVariables(n));
        }
        let distinct: BTreeSet<&String> = variables.iter().collect();
        if distinct.len() != n {
            return Err(Error::Schema("repeated variable name".into()));
        }
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut set = BTreeSet::new();
        for (index, p) in points.into_iter().enumerate() {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    index,
                    found: p.len(),
                    expected: n,
                });
            }
            if p.iter().all(|&e| e == 0) {
                return Err(Error::ConstantTerm);
            }
            let v = ExponentVector::new(p)?;
            if !set.insert(v.clone()) {
                return Err(Error::DuplicatePoint(v.0));
            }
        }
        Ok(SupportSet {
            variables,
            points: set,
        })
    }

    /// Support with default variable names.
    pub fn from_points(points: Vec<Vec<i64>>) -> Result<Self> {
        let n = points.first().map_or(0, |p| p.len());
        SupportSet::new(default_variables(n), points)
    }

    pub fn n(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn points(&self) -> impl Iterator<Item = &[i64]> {
        self.points.iter().map(|p| p.as_slice())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SupportDocument =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let points = doc
            .support
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|e| i64::try_from(e).map_err(|_| Error::Schema("exponent too large".into())))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SupportSet::new(doc.variables, points)
    }

    pub fn to_json(&self) -> String {
        let doc = SupportDocument {
            variables: self.variables.clone(),
            support: self
                .points
                .iter()
                .map(|p| p.0.iter().map(|&e| e as u64).collect())
                .collect(),
        };
        serde_json::to_string(&doc).expect("support document serializes")
    }
}

impl fmt::Display for SupportSet {
    /// Renders the support as a polynomial with unit coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.points.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let mut first = true;
            for (v, &e) in self.variables.iter().zip(&p.0) {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

pub fn load_support(path: &Path) -> Result<SupportSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    SupportSet::from_json(&text)
}

type Coeff = Ratio<i128>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

/// One parsed monomial: coefficient and `(variable, exponent)` factors.
struct Term {
    coeff: Coeff,
    factors: Vec<(String, usize, i64)>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<i128> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an unsigned integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse().or_else(|_| {
            self.pos = start;
            self.err("integer literal too large")
        })
    }

    fn ident(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => self.pos += 1,
            _ => return self.err("expected a variable"),
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        Ok((s.to_string(), start))
    }

    fn factor(&mut self) -> Result<(String, usize, i64)> {
        let (name, at) = self.ident()?;
        let exp = if self.eat(b'^') {
            let e = self.uint()?;
            i64::try_from(e).or_else(|_| self.err("exponent too large"))?
        } else {
            1
        };
        Ok((name, at, exp))
    }

    fn term(&mut self) -> Result<Term> {
        let mut coeff = Coeff::from_integer(1);
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = self.uint()?;
            let den = if self.eat(b'/') {
                let d = self.uint()?;
                if d == 0 {
                    return self.err("zero denominator");
                }
                d
            } else {
                1
            };
            coeff = Coeff::new(num, den);
            self.eat(b'*');
        }
        let mut factors = vec![self.factor()?];
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        Ok(Term { coeff, factors })
    }

    fn expr(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut sign = if self.eat(b'-') {
            -1
        } else {
            self.eat(b'+');
            1
        };
        loop {
            let mut t = self.term()?;
            t.coeff *= Coeff::from_integer(sign);
            terms.push(t);
            if self.eat(b'+') {
                sign = 1;
            } else if self.eat(b'-') {
                sign = -1;
            } else if self.peek().is_none() {
                return Ok(terms);
            } else {
                return self.err("expected `+`, `-` or end of input");
            }
        }
    }
}

fn infer_variables(used: &BTreeSet<&str>) -> Option<Vec<String>> {
    let short = ["x", "y", "z", "w"];
    if used.iter().all(|v| short.contains(v)) {
        let n = used
            .iter()
            .map(|v| short.iter().position(|s| s == v).unwrap() + 1)
            .max()?;
        return Some(default_variables(n.max(2)));
    }
    let mut n = 0;
    for v in used {
        let i: usize = v.strip_prefix('x')?.parse().ok()?;
        if i == 0 || v.starts_with("x0") {
            return None;
        }
        n = n.max(i);
    }
    Some((1..=n.max(2)).map(|i| format!("x{i}")).collect())
}

/// Parses a polynomial and returns the support of its nonzero terms.
pub fn parse_polynomial(text: &str, variable_order: Option<&[String]>) -> Result<SupportSet> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    if parser.peek().is_none() {
        return parser.err("empty input");
    }
    let terms = parser.expr()?;

    let variables: Vec<String> = match variable_order {
        Some(v) => v.to_vec(),
        None => {
            let used: BTreeSet<&str> = terms
                .iter()
                .flat_map(|t| t.factors.iter().map(|f| f.0.as_str()))
                .collect();
            match infer_variables(&used) {
                Some(v) => v,
                None => {
                    let odd = used
                        .iter()
                        .find(|v| !["x", "y", "z", "w"].contains(v))
                        .expect("inference fails only on a non-default name");
                    return Err(Error::UnknownVariable(odd.to_string()));
                }
            }
        }
    };
    let n = variables.len();
    if n < 2 {
        return Err(Error::TooFewVariables(n));
    }

    let mut collected: BTreeMap<Vec<i64>, Coeff> = BTreeMap::new();
    for t in terms {
        let mut e = vec![0i64; n];
        for (name, _, exp) in &t.factors {
            let Some(i) = variables.iter().position(|v| v == name) else {
                return Err(Error::UnknownVariable(name.clone()));
            };
            e[i] += exp;
        }
        *collected.entry(e).or_insert_with(Coeff::zero) += t.coeff;
    }
    let points: Vec<Vec<i64>> = collected
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, _)| e)
        .collect();
    if points.is_empty() {
        return Err(Error::EmptySupport);
    }
    for (i, v) in variables.iter().enumerate() {
        if points.iter().all(|p| p[i] == 0) {
            return Err(Error::DegenerateSupport(v.clone()));
        }
    }
    SupportSet::new(variables, points)
}
