//! The embedding polynomial: one integer polynomial of degree at most 4
//! whose real zeros are exactly the embeddings of a graph.
//!
//! Variables per vertex `v`: coordinates `xv yv zv` and auxiliaries `pv qv`
//! with `pv^2 = zv`, `pv qv = 1` (so `zv > 0`). Per non-adjacent pair
//! `u < v`: `tu_v = u . v` and `wu_v` with `wu_v (1 - tu_v) = 1` (so the two
//! unit vectors differ; in the open upper hemisphere they cannot be
//! antipodal). The polynomial is the sum of the squared residuals of
//!
//! ```text
//! xv^2 + yv^2 + zv^2 - 1        for every vertex
//! u . v                         for every edge
//! pv qv - 1,  pv^2 - zv         for every vertex
//! tu_v - u . v,  wu_v - wu_v tu_v - 1   for every non-adjacent pair
//! ```
//!
//! Text format (whitespace and line breaks are insignificant after `poly:`):
//!
//! ```text
//! file    := { "#" comment "\n" } "vars:" name { name } "\n" "poly:" expr
//! expr    := [sign] term { sign term }
//! sign    := "+" | "-"
//! term    := factor { "*" factor }
//! factor  := integer | name [ "^" integer ]
//! name    := letter { letter | digit | "_" }
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// `(variable, exponent)` pairs sorted by variable.
pub type Monomial = Vec<(u32, u32)>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, i64>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

impl Poly {
    pub fn constant(c: i64) -> Self {
        let mut p = Poly::default();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: u32) -> Self {
        let mut p = Poly::default();
        p.add_term(vec![(v, 1)], 1);
        p
    }

    fn add_term(&mut self, m: Monomial, c: i64) {
        use std::collections::btree_map::Entry;
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::default();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &o.terms {
                out.add_term(mono_mul(a, b), ca * cb);
            }
        }
        out
    }

    pub fn square(&self) -> Poly {
        self.mul(self)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&(_, e)| e).sum()).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, &c)| c as f64 * m.iter().map(|&(v, e)| x[v as usize].powi(e as i32)).product::<f64>())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingPolynomial {
    pub legend: Vec<String>,
    pub poly: Poly,
}

struct Vars {
    legend: Vec<String>,
}

impl Vars {
    fn add(&mut self, name: String) -> Poly {
        self.legend.push(name);
        Poly::var(self.legend.len() as u32 - 1)
    }
}

/// Builds the embedding polynomial of `g`.
pub fn export_polynomial(g: &Graph) -> EmbeddingPolynomial {
    let n = g.n();
    let mut vars = Vars { legend: Vec::new() };
    let mut coords = Vec::with_capacity(n);
    let mut aux = Vec::with_capacity(n);
    for v in 0..n {
        coords.push([vars.add(format!("x{v}")), vars.add(format!("y{v}")), vars.add(format!("z{v}"))]);
    }
    for v in 0..n {
        aux.push((vars.add(format!("p{v}")), vars.add(format!("q{v}"))));
    }
    let one = Poly::constant(1);
    let dot = |a: &[Poly; 3], b: &[Poly; 3]| a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]));
    let mut p = Poly::default();
    for v in 0..n {
        let c = &coords[v];
        p = p.add(&dot(c, c).sub(&one).square());
        let (pv, qv) = &aux[v];
        p = p.add(&pv.mul(qv).sub(&one).square());
        p = p.add(&pv.square().sub(&c[2]).square());
    }
    for u in 0..n {
        for v in u + 1..n {
            let d = dot(&coords[u], &coords[v]);
            if g.has_edge(u, v) {
                p = p.add(&d.square());
            } else {
                let t = vars.add(format!("t{u}_{v}"));
                let w = vars.add(format!("w{u}_{v}"));
                p = p.add(&t.sub(&d).square());
                p = p.add(&w.sub(&w.mul(&t)).sub(&one).square());
            }
        }
    }
    EmbeddingPolynomial { legend: vars.legend, poly: p }
}

impl EmbeddingPolynomial {
    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.legend.iter().position(|l| l == name)
    }

    /// Evaluates at named values; unnamed variables are 0.
    pub fn eval_named(&self, values: &HashMap<String, f64>) -> f64 {
        let x: Vec<f64> = self.legend.iter().map(|l| values.get(l).copied().unwrap_or(0.0)).collect();
        self.poly.eval(&x)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("# embedding polynomial: sum of squared constraint residuals\n");
        let _ =
            writeln!(s, "# {} variables, {} terms, degree {}", self.legend.len(), self.poly.num_terms(), self.degree());
        s.push_str("vars:");
        for l in &self.legend {
            s.push(' ');
            s.push_str(l);
        }
        s.push_str("\npoly:\n");
        if self.poly.num_terms() == 0 {
            s.push_str("0\n");
        }
        for (i, (m, c)) in self.poly.terms().enumerate() {
            let sign = if c < 0 {
                "- "
            } else if i > 0 {
                "+ "
            } else {
                ""
            };
            s.push_str(sign);
            let a = c.unsigned_abs();
            let mut factors: Vec<String> = Vec::new();
            if a != 1 || m.is_empty() {
                factors.push(a.to_string());
            }
            for &(v, e) in m {
                let name = &self.legend[v as usize];
                factors.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
            }
            s.push_str(&factors.join("*"));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |offset: usize, message: String| Error::Parse { offset, message };
        let mut legend: Option<Vec<String>> = None;
        let mut offset = 0;
        let mut body = None;
        for line in text.split_inclusive('\n') {
            let t = line.trim();
            if body.is_none() {
                if let Some(rest) = t.strip_prefix("vars:") {
                    legend = Some(rest.split_whitespace().map(str::to_string).collect());
                } else if t.starts_with("poly:") {
                    body = Some(offset + line.find("poly:").expect("prefix present") + 5);
                } else if !(t.starts_with('#') || t.is_empty()) {
                    return Err(err(offset, format!("unexpected line {t:?}")));
                }
            }
            offset += line.len();
        }
        let legend = legend.ok_or_else(|| err(0, "missing vars: line".into()))?;
        let start = body.ok_or_else(|| err(text.len(), "missing poly: section".into()))?;
        let index: HashMap<&str, u32> = legend.iter().enumerate().map(|(i, l)| (l.as_str(), i as u32)).collect();
        let poly = ExprParser { s: text.as_bytes(), at: start, index: &index }.expr()?;
        Ok(EmbeddingPolynomial { legend, poly })
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    at: usize,
    index: &'a HashMap<&'a str, u32>,
}

impl ExprParser<'_> {
    fn skip(&mut self) {
        while self.at < self.s.len() && self.s[self.at].is_ascii_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.at).copied()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { offset: self.at, message: message.into() }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.at;
        while self.at < self.s.len() && self.s[self.at].is_ascii_digit() {
            self.at += 1;
        }
        std::str::from_utf8(&self.s[start..self.at])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Parse { offset: start, message: "bad integer".into() })
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Poly::constant(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.at;
                while self.at < self.s.len() && (self.s[self.at].is_ascii_alphanumeric() || self.s[self.at] == b'_') {
                    self.at += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.at]).expect("ascii name");
                let v = *self
                    .index
                    .get(name)
                    .ok_or_else(|| Error::Parse { offset: start, message: format!("unknown variable {name:?}") })?;
                let mut p = Poly::var(v);
                if self.peek() == Some(b'^') {
                    self.at += 1;
                    self.skip();
                    let e = self.integer()?;
                    let base = p.clone();
                    p = Poly::constant(1);
                    for _ in 0..e {
                        p = p.mul(&base);
                    }
                }
                Ok(p)
            }
            Some(_) => Err(self.error("expected a number or variable")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut p = self.factor()?;
        while self.peek() == Some(b'*') {
            self.at += 1;
            p = p.mul(&self.factor()?);
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut total = Poly::default();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(b'+') => {
                    self.at += 1;
                    false
                }
                Some(b'-') => {
                    self.at += 1;
                    true
                }
                None if !first => return Ok(total),
                _ if first => false,
                _ => return Err(self.error("expected '+' or '-'")),
            };
            let t = self.term()?;
            total = if negative { total.sub(&t) } else { total.add(&t) };
            first = false;
        }
    }
}
