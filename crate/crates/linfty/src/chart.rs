//! Polynomial coordinate charts: exact vector fields, differential forms, and
//! the Cartan operations.
//!
//! The exterior derivative, contraction, and Lie derivative are each computed
//! directly from their coordinate formulas. None of them is defined through
//! the Cartan homotopy formula or the bracket-commutators, so those classical
//! identities stay honest test statements.

use crate::scalar::{q_to_string, qi, Q};
use num::{One, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;

/// A polynomial coordinate chart in `dim` variables `x1..x{dim}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chart {
    pub dim: usize,
}

/// Sparse polynomial: exponent vector (length = chart dimension) to nonzero
/// coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Poly {
    pub dim: usize,
    pub terms: BTreeMap<Vec<u8>, Q>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Q) -> Self {
        let mut p = Poly::zero(dim);
        if !c.is_zero() {
            p.terms.insert(vec![0; dim], c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Q::one())
    }

    /// The coordinate function `x{i+1}`.
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut e = vec![0u8; dim];
        e[i] = 1;
        let mut p = Poly::zero(dim);
        p.terms.insert(e, Q::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exp: Vec<u8>, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to `x{i+1}`.
    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.clone() * qi(e[i] as i64));
        }
        out
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max().unwrap_or(0)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect();
            let coeff = q_to_string(c);
            let body = if mono.is_empty() {
                coeff
            } else if c.is_one() {
                mono.join("*")
            } else if (-c.clone()).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", coeff, mono.join("*"))
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if let Some(stripped) = body.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

/// All exponent vectors in `dim` variables of total degree at most `deg`,
/// in lexicographic order. The monomial basis used by ansatz solvers.
pub fn monomials_up_to(dim: usize, deg: usize) -> Vec<Vec<u8>> {
    fn rec(e: &mut Vec<u8>, i: usize, left: usize, dim: usize, out: &mut Vec<Vec<u8>>) {
        if i == dim {
            out.push(e.clone());
            return;
        }
        for k in 0..=left {
            e[i] = k as u8;
            rec(e, i + 1, left - k, dim, out);
        }
        e[i] = 0;
    }
    let mut out = Vec::new();
    rec(&mut vec![0u8; dim], 0, deg, dim, &mut out);
    out.sort();
    out
}

/// Parses polynomial literals like `3/2*x1^2*x3 - x2 + 1`.
pub fn parse_poly(dim: usize, input: &str) -> Result<Poly, String> {
    let mut parser = PolyParser { dim, chars: input.chars().collect(), pos: 0 };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.chars.len() {
        return Err(format!("unexpected input at byte {}", parser.pos));
    }
    Ok(p)
}

struct PolyParser {
    dim: usize,
    chars: Vec<char>,
    pos: usize,
}

impl PolyParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, String> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, String> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, String> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()? as u32;
            let mut acc = Poly::one(self.dim);
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.expr()?;
                if self.peek() != Some(')') {
                    return Err("expected ')'".into());
                }
                self.pos += 1;
                Ok(p)
            }
            Some('x') => {
                self.pos += 1;
                let i = self.integer()?;
                if i == 0 || i as usize > self.dim {
                    return Err(format!("variable x{i} out of range for dimension {}", self.dim));
                }
                Ok(Poly::var(self.dim, i as usize - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d == 0 {
                        return Err("division by zero".into());
                    }
                    Ok(Poly::constant(self.dim, crate::scalar::qr(n, d)))
                } else {
                    Ok(Poly::constant(self.dim, qi(n)))
                }
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }

    fn integer(&mut self) -> Result<i64, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err("expected integer".into());
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|e| format!("{e}"))
    }
}

/// Polynomial vector field: `sum_i comps[i] d/dx{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct VectorField {
    pub comps: Vec<Poly>,
}

impl VectorField {
    pub fn zero(dim: usize) -> Self {
        VectorField { comps: vec![Poly::zero(dim); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.comps[i] = Poly::one(dim);
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn neg(&self) -> VectorField {
        VectorField { comps: self.comps.iter().map(Poly::neg).collect() }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> VectorField {
        VectorField { comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn mul_fn(&self, f: &Poly) -> VectorField {
        VectorField { comps: self.comps.iter().map(|p| p.mul(f)).collect() }
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(f.dim);
        for (i, xi) in self.comps.iter().enumerate() {
            out = out.add(&xi.mul(&f.partial(i)));
        }
        out
    }
}

/// Commutator of vector fields: `[X,Y]^i = sum_j (X^j d_j Y^i - Y^j d_j X^i)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let dim = x.dim();
    let mut comps = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut acc = Poly::zero(dim);
        for j in 0..dim {
            acc = acc.add(&x.comps[j].mul(&y.comps[i].partial(j)));
            acc = acc.sub(&y.comps[j].mul(&x.comps[i].partial(j)));
        }
        comps.push(acc);
    }
    VectorField { comps }
}

/// Differential form of homogeneous degree `p`: strictly increasing index
/// tuple to polynomial coefficient.
///
/// A form with no terms is the zero form and compares equal to zero of any
/// degree, so degree bookkeeping never traps the zero element.
#[derive(Clone, Debug, Eq)]
pub struct DiffForm {
    pub dim: usize,
    pub p: usize,
    pub terms: BTreeMap<Vec<u8>, Poly>,
}

impl PartialEq for DiffForm {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && (self.p == other.p || self.terms.is_empty())
    }
}

impl PartialOrd for DiffForm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DiffForm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let pa = if self.terms.is_empty() { usize::MAX } else { self.p };
        let pb = if other.terms.is_empty() { usize::MAX } else { other.p };
        pa.cmp(&pb).then_with(|| self.terms.cmp(&other.terms))
    }
}

impl DiffForm {
    pub fn zero(dim: usize, p: usize) -> Self {
        DiffForm { dim, p, terms: BTreeMap::new() }
    }

    pub fn from_fn(f: Poly) -> Self {
        let dim = f.dim;
        let mut form = DiffForm::zero(dim, 0);
        if !f.is_zero() {
            form.terms.insert(vec![], f);
        }
        form
    }

    pub fn as_fn(&self) -> Poly {
        assert_eq!(self.p, 0);
        self.terms.get(&vec![]).cloned().unwrap_or_else(|| Poly::zero(self.dim))
    }

    /// The basis form `dx{i1+1} ^ ... ^ dx{ip+1}` with the given coefficient;
    /// indices need not be sorted, the sign is handled.
    pub fn monomial(dim: usize, idx: &[u8], coeff: Poly) -> Self {
        let mut form = DiffForm::zero(dim, idx.len());
        form.add_monomial(idx, coeff);
        form
    }

    pub fn add_monomial(&mut self, idx: &[u8], coeff: Poly) {
        assert_eq!(idx.len(), self.p);
        if coeff.is_zero() {
            return;
        }
        let mut sorted: Vec<u8> = idx.to_vec();
        let mut sign = 1i64;
        // Bubble sort, flipping the sign per swap; repeated indices kill the term.
        loop {
            let mut swapped = false;
            for i in 0..sorted.len().saturating_sub(1) {
                if sorted[i] == sorted[i + 1] {
                    return;
                }
                if sorted[i] > sorted[i + 1] {
                    sorted.swap(i, i + 1);
                    sign = -sign;
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        let add = if sign == 1 { coeff } else { coeff.neg() };
        let entry = self.terms.entry(sorted.clone()).or_insert_with(|| Poly::zero(self.dim));
        *entry = entry.add(&add);
        if entry.is_zero() {
            self.terms.remove(&sorted);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &DiffForm) -> DiffForm {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.p, other.p, "adding forms of different degrees");
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_monomial(i, c.clone());
        }
        out
    }

    pub fn neg(&self) -> DiffForm {
        DiffForm {
            dim: self.dim,
            p: self.p,
            terms: self.terms.iter().map(|(i, c)| (i.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &DiffForm) -> DiffForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> DiffForm {
        if c.is_zero() {
            return DiffForm::zero(self.dim, self.p);
        }
        DiffForm {
            dim: self.dim,
            p: self.p,
            terms: self.terms.iter().map(|(i, f)| (i.clone(), f.scale(c))).collect(),
        }
    }

    pub fn mul_fn(&self, f: &Poly) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.p);
        for (i, c) in &self.terms {
            out.add_monomial(i, c.mul(f));
        }
        out
    }

    /// Wedge product.
    pub fn wedge(&self, other: &DiffForm) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.p + other.p);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                let idx: Vec<u8> = ia.iter().chain(ib.iter()).copied().collect();
                out.add_monomial(&idx, ca.mul(cb));
            }
        }
        out
    }

    /// Exterior derivative, straight from `d(f dxI) = sum_k d_k f dx_k ^ dxI`.
    pub fn d(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.p + 1);
        for (i, c) in &self.terms {
            for k in 0..self.dim {
                let dc = c.partial(k);
                if dc.is_zero() {
                    continue;
                }
                let mut idx = Vec::with_capacity(self.p + 1);
                idx.push(k as u8);
                idx.extend_from_slice(i);
                out.add_monomial(&idx, dc);
            }
        }
        out
    }

    /// Contraction `i_X`, plugging `X` into the first slot.
    pub fn contract(&self, x: &VectorField) -> DiffForm {
        if self.p == 0 {
            return DiffForm::zero(self.dim, 0);
        }
        let mut out = DiffForm::zero(self.dim, self.p - 1);
        for (i, c) in &self.terms {
            for (j, &ij) in i.iter().enumerate() {
                let coeff = c.mul(&x.comps[ij as usize]);
                if coeff.is_zero() {
                    continue;
                }
                let rest: Vec<u8> = i
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &v)| v)
                    .collect();
                let signed = if j % 2 == 0 { coeff } else { coeff.neg() };
                out.add_monomial(&rest, signed);
            }
        }
        out
    }

    /// Lie derivative, computed directly: derivative of the coefficient plus
    /// one term per slot replacing `dx_i` by `d(X^i)`.
    pub fn lie_derivative(&self, x: &VectorField) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.p);
        for (i, c) in &self.terms {
            out.add_monomial(i, x.apply(c));
            for (j, &ij) in i.iter().enumerate() {
                // d(X^{ij}) = sum_k d_k X^{ij} dx_k replacing slot j.
                for k in 0..self.dim {
                    let coeff = c.mul(&x.comps[ij as usize].partial(k));
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut idx = i.clone();
                    idx[j] = k as u8;
                    out.add_monomial(&idx, coeff);
                }
            }
        }
        out
    }

    /// Full evaluation `w(X_1, ..., X_p)` by contracting the slots in order.
    pub fn eval_fields(&self, fields: &[&VectorField]) -> Poly {
        assert_eq!(fields.len(), self.p);
        let mut cur = self.clone();
        for x in fields {
            cur = cur.contract(x);
        }
        cur.as_fn()
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i.is_empty() {
                write!(f, "{c}")?;
            } else {
                let basis: Vec<String> = i.iter().map(|&k| format!("dx{}", k + 1)).collect();
                write!(f, "({c}) {}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Random polynomial with integer coefficients in `[-bound, bound]`.
pub fn random_poly<R: Rng>(rng: &mut R, dim: usize, max_deg: usize, bound: i64) -> Poly {
    let monos = monomials_up_to(dim, max_deg);
    let mut p = Poly::zero(dim);
    for e in monos {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 && rng.gen_bool(0.6) {
            p.add_term(e, qi(c));
        }
    }
    p
}

pub fn random_field<R: Rng>(rng: &mut R, dim: usize, max_deg: usize, bound: i64) -> VectorField {
    VectorField { comps: (0..dim).map(|_| random_poly(rng, dim, max_deg, bound)).collect() }
}

pub fn random_form<R: Rng>(rng: &mut R, dim: usize, p: usize, max_deg: usize, bound: i64) -> DiffForm {
    let mut form = DiffForm::zero(dim, p);
    let mut idx: Vec<u8> = (0..p as u8).collect();
    loop {
        form.add_monomial(&idx.clone(), random_poly(rng, dim, max_deg, bound));
        // Advance the strictly increasing index tuple.
        let mut j = p;
        loop {
            if j == 0 {
                return form;
            }
            j -= 1;
            if (idx[j] as usize) < dim - (p - j) {
                idx[j] += 1;
                for k in j + 1..p {
                    idx[k] = idx[k - 1] + 1;
                }
                break;
            }
        }
        if p == 0 {
            return form;
        }
    }
}
