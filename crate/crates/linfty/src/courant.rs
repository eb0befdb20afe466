//! Sections of the twisted extended tangent bundle and the bracket tower on
//! the shifted form complex they generate.
//!
//! A section pairs a field with an `(n-1)`-form. The symmetric pairing, the
//! non-skew bracket, its skew part, and the gauge flow by an `n`-form live on
//! sections; the tower extends the skew bracket to the complex
//! `functions -> 1-forms -> ... -> (n-2)-forms -> sections`, with a ternary
//! bracket built from cyclic pairings and higher odd brackets whose
//! coefficients are Bernoulli numbers. The tower is cross-checked elsewhere
//! against brackets derived by homotopy transfer; the binary coefficient of a
//! field acting on a shifted form is the one forced by the weight-two
//! structure identity, one half of the naive derivative action.

use crate::algebroid::{Algebroid, Element};
use crate::chart::{lie_bracket, DiffForm, Poly, VectorField};
use crate::combinatorics::bernoulli;
use crate::scalar::{neg_one_pow, qi, qr, Q};
use rand_chacha::ChaCha20Rng;

/// A degree-zero section: a field and an `(n-1)`-form.
#[derive(Clone, Debug, PartialEq)]
pub struct CourantSection {
    pub n: usize,
    pub x: VectorField,
    pub alpha: DiffForm,
}

impl CourantSection {
    pub fn new(n: usize, x: VectorField, alpha: DiffForm) -> Self {
        assert!(alpha.is_zero() || alpha.p == n - 1);
        CourantSection { n, x, alpha }
    }

    pub fn zero(n: usize, dim: usize) -> Self {
        CourantSection { n, x: VectorField::zero(dim), alpha: DiffForm::zero(dim, n - 1) }
    }

    pub fn add(&self, other: &Self) -> Self {
        CourantSection {
            n: self.n,
            x: self.x.add(&other.x),
            alpha: self.alpha.add(&other.alpha),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        CourantSection {
            n: self.n,
            x: self.x.sub(&other.x),
            alpha: self.alpha.sub(&other.alpha),
        }
    }

    pub fn scale_fn(&self, f: &Poly) -> Self {
        CourantSection { n: self.n, x: self.x.mul_fn(f), alpha: self.alpha.mul_fn(f) }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.alpha.is_zero()
    }
}

/// Symmetric pairing of two sections: contraction of each field into the
/// other form, an `(n-2)`-form.
pub fn pairing(a: &CourantSection, b: &CourantSection) -> DiffForm {
    b.alpha.contract(&a.x).add(&a.alpha.contract(&b.x))
}

pub(crate) fn require_closed(h: &DiffForm, n: usize) -> Result<(), String> {
    if !h.is_zero() && h.p != n + 1 {
        return Err(format!("twist must be an {}-form, got degree {}", n + 1, h.p));
    }
    if !h.d().is_zero() {
        return Err("twist form is not closed".to_string());
    }
    Ok(())
}

fn dorfman_raw(h: &DiffForm, a: &CourantSection, b: &CourantSection) -> CourantSection {
    let x = lie_bracket(&a.x, &b.x);
    let alpha = b
        .alpha
        .lie_derivative(&a.x)
        .sub(&a.alpha.d().contract(&b.x))
        .add(&h.contract(&b.x).contract(&a.x));
    CourantSection { n: a.n, x, alpha }
}

/// The non-skew twisted bracket of sections: field bracket, derivative of the
/// second form along the first field minus contraction of the second field
/// into the first form's differential, plus the twist contracted by both
/// fields. Requires a closed twist.
pub fn dorfman(
    h: &DiffForm,
    a: &CourantSection,
    b: &CourantSection,
) -> Result<CourantSection, String> {
    require_closed(h, a.n)?;
    Ok(dorfman_raw(h, a, b))
}

fn courant_raw(h: &DiffForm, a: &CourantSection, b: &CourantSection) -> CourantSection {
    let x = lie_bracket(&a.x, &b.x);
    let half = qr(1, 2);
    let alpha = b
        .alpha
        .lie_derivative(&a.x)
        .sub(&a.alpha.lie_derivative(&b.x))
        .sub(&b.alpha.contract(&a.x).sub(&a.alpha.contract(&b.x)).d().scale(&half))
        .add(&h.contract(&b.x).contract(&a.x));
    CourantSection { n: a.n, x, alpha }
}

/// The skew part of the twisted bracket: subtracting half the differential of
/// the pairing from the non-skew bracket.
pub fn courant_bracket(
    h: &DiffForm,
    a: &CourantSection,
    b: &CourantSection,
) -> Result<CourantSection, String> {
    require_closed(h, a.n)?;
    Ok(courant_raw(h, a, b))
}

/// Gauge flow of a section by an `n`-form: shears the form part by the
/// contraction of the field. An automorphism of the non-skew bracket exactly
/// when the `n`-form is closed.
pub fn gauge_transform(b_form: &DiffForm, s: &CourantSection) -> CourantSection {
    assert!(b_form.is_zero() || b_form.p == s.n);
    CourantSection { n: s.n, x: s.x.clone(), alpha: s.alpha.add(&b_form.contract(&s.x)) }
}

/// A random section with polynomial coefficients.
pub fn random_section(rng: &mut ChaCha20Rng, n: usize, dim: usize) -> CourantSection {
    CourantSection {
        n,
        x: crate::chart::random_field(rng, dim, 2, 2),
        alpha: crate::chart::random_form(rng, dim, n - 1, 2, 2),
    }
}

/// Element of the bracket tower: a field part in degree zero and one form
/// per degree `q <= forms.len() - 1`, the `q`-form sitting in degree
/// `q - n + 1`. The full tower keeps forms up to degree `n - 1`, the
/// truncated towers in [`crate::transfer`] less.
#[derive(Clone, Debug, PartialEq)]
pub struct CourEl {
    pub n: usize,
    pub dim: usize,
    pub x: VectorField,
    pub forms: Vec<DiffForm>,
}

impl CourEl {
    pub fn zero(n: usize, dim: usize, top: usize) -> Self {
        CourEl {
            n,
            dim,
            x: VectorField::zero(dim),
            forms: (0..=top).map(|q| DiffForm::zero(dim, q)).collect(),
        }
    }

    pub fn from_section(s: &CourantSection) -> Self {
        let dim = s.x.dim();
        let mut out = Self::zero(s.n, dim, s.n - 1);
        out.x = s.x.clone();
        if !s.alpha.is_zero() {
            out.forms[s.n - 1] = s.alpha.clone();
        }
        out
    }

    pub fn from_field(n: usize, top: usize, x: VectorField) -> Self {
        let dim = x.dim();
        let mut out = Self::zero(n, dim, top);
        out.x = x;
        out
    }

    pub fn from_form(n: usize, top: usize, form: DiffForm) -> Self {
        let mut out = Self::zero(n, form.dim, top);
        assert!(form.p <= top);
        if !form.is_zero() {
            let q = form.p;
            out.forms[q] = form;
        }
        out
    }

    pub fn top(&self) -> usize {
        self.forms.len() - 1
    }

    /// The section carried by a degree-zero element of the full tower.
    pub fn as_section(&self) -> CourantSection {
        assert_eq!(self.top(), self.n - 1);
        CourantSection { n: self.n, x: self.x.clone(), alpha: self.forms[self.n - 1].clone() }
    }

    pub(crate) fn add_form(&mut self, form: DiffForm) {
        if form.is_zero() {
            return;
        }
        assert!(form.p <= self.top());
        let q = form.p;
        self.forms[q] = self.forms[q].add(&form);
    }

    fn piece_degrees(&self) -> Vec<i64> {
        let mut degs = Vec::new();
        if !self.x.is_zero() {
            degs.push(0);
        }
        for (q, f) in self.forms.iter().enumerate() {
            if !f.is_zero() {
                let d = q as i64 - self.n as i64 + 1;
                if !degs.contains(&d) {
                    degs.push(d);
                }
            }
        }
        degs
    }
}

impl Element for CourEl {
    fn degree(&self) -> Option<i64> {
        let degs = self.piece_degrees();
        match degs.len() {
            0 => None,
            1 => Some(degs[0]),
            _ => panic!("inhomogeneous tower element: degrees {degs:?}"),
        }
    }

    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.forms.iter().all(|f| f.is_zero())
    }

    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        assert_eq!(self.forms.len(), other.forms.len());
        CourEl {
            n: self.n,
            dim: self.dim,
            x: self.x.add(&other.x),
            forms: self.forms.iter().zip(&other.forms).map(|(a, b)| a.add(b)).collect(),
        }
    }

    fn neg(&self) -> Self {
        CourEl {
            n: self.n,
            dim: self.dim,
            x: self.x.neg(),
            forms: self.forms.iter().map(|f| f.neg()).collect(),
        }
    }

    fn scale(&self, c: &Q) -> Self {
        CourEl {
            n: self.n,
            dim: self.dim,
            x: self.x.scale(c),
            forms: self.forms.iter().map(|f| f.scale(c)).collect(),
        }
    }
}

/// The full bracket tower over one chart with a closed twist: sections in
/// degree zero over the shifted form complex, brackets of every arity up to
/// `n + 1`.
#[derive(Clone, Debug)]
pub struct ZambonAlgebroid {
    pub n: usize,
    pub dim: usize,
    pub h: DiffForm,
}

impl ZambonAlgebroid {
    pub fn new(n: usize, dim: usize, h: DiffForm) -> Result<Self, String> {
        assert!(n >= 1);
        require_closed(&h, n)?;
        Ok(ZambonAlgebroid { n, dim, h })
    }

    fn zero_el(&self) -> CourEl {
        CourEl::zero(self.n, self.dim, self.n - 1)
    }

    /// Ternary value on one shifted form and two fields: contractions of the
    /// derivative actions and of the field bracket, weighted by minus one
    /// sixth.
    fn ternary_form(&self, xi: &DiffForm, x2: &VectorField, x3: &VectorField) -> DiffForm {
        let half = qr(1, 2);
        let inner = xi
            .lie_derivative(x3)
            .contract(x2)
            .sub(&xi.lie_derivative(x2).contract(x3))
            .scale(&half)
            .add(&xi.contract(&lie_bracket(x2, x3)));
        inner.scale(&qr(-1, 6))
    }

    /// Cyclic pairing average of the skew bracket against the third section.
    fn ternary_sections(&self, e: &[&CourantSection]) -> DiffForm {
        let mut acc = DiffForm::zero(self.dim, self.n.saturating_sub(2));
        for (i, j, k) in [(0, 1, 2), (2, 0, 1), (1, 2, 0)] {
            let br = courant_raw(&self.h, e[i], e[j]);
            acc = acc.add(&pairing(&br, e[k]));
        }
        acc.scale(&qr(-1, 6))
    }

    /// The untwisted cyclic ternary with a bare top form in the first slot.
    fn ternary_top_form(&self, alpha: &DiffForm, x2: &VectorField, x3: &VectorField) -> DiffForm {
        let zero_h = DiffForm::zero(self.dim, self.n + 1);
        let ea = CourantSection { n: self.n, x: VectorField::zero(self.dim), alpha: alpha.clone() };
        let e2 = CourantSection { n: self.n, x: x2.clone(), alpha: DiffForm::zero(self.dim, self.n - 1) };
        let e3 = CourantSection { n: self.n, x: x3.clone(), alpha: DiffForm::zero(self.dim, self.n - 1) };
        let mut acc = DiffForm::zero(self.dim, self.n.saturating_sub(2));
        for (a, b, c) in [(&ea, &e2, &e3), (&e3, &ea, &e2), (&e2, &e3, &ea)] {
            let br = courant_raw(&zero_h, a, b);
            acc = acc.add(&pairing(&br, c));
        }
        acc.scale(&qr(1, 6))
    }

    /// Higher odd bracket on homogeneous arguments: an alternating sum of
    /// contraction strings against ternary seeds, plus the fully contracted
    /// twist with Bernoulli weight.
    fn higher_bracket(&self, args: &[CourEl]) -> CourEl {
        let k = args.len();
        let mut out = self.zero_el();
        if k % 2 == 0 || k > self.n + 1 {
            return out;
        }
        let fields: Vec<VectorField> = args.iter().map(|a| a.x.clone()).collect();
        let bk = bernoulli(k - 1);
        if bk == qi(0) {
            return out;
        }
        // Index parity of pulling the distinguished slot out front.
        for i in 0..k {
            let rest: Vec<&VectorField> =
                (0..k).filter(|&j| j != i).map(|j| &fields[j]).collect();
            let sign = qi(neg_one_pow((i + 1) as i64));
            for q in 0..self.n {
                let piece = &args[i].forms[q];
                if piece.is_zero() {
                    continue;
                }
                let (xi, alpha) = if q == self.n - 1 {
                    (None, Some(piece))
                } else {
                    (Some(piece), None)
                };
                let val = self.mu_bracket(k, xi, alpha, &rest);
                out.add_form(val.scale(&sign));
            }
        }
        let mut twist = self.h.clone();
        for x in &fields {
            twist = twist.contract(x);
        }
        let half_sign = qi(neg_one_pow(((k + 1) / 2) as i64));
        out.add_form(twist.scale(&(half_sign * qi(k as i64) * bk)));
        out
    }

    /// The seed sum of the higher bracket: over ordered pairs of the
    /// remaining slots, contract everything else into a ternary of the
    /// distinguished piece against that pair.
    fn mu_bracket(
        &self,
        k: usize,
        xi: Option<&DiffForm>,
        alpha: Option<&DiffForm>,
        fields: &[&VectorField],
    ) -> DiffForm {
        // fields are the k - 1 undistinguished slots, labelled 2..=k.
        debug_assert_eq!(fields.len(), k - 1);
        let bk = bernoulli(k - 1);
        let lead = qi(neg_one_pow(((k + 1) / 2) as i64))
            * qi(12)
            * bk
            / (qi((k - 1) as i64) * qi((k - 2) as i64));
        let mut acc: Option<DiffForm> = None;
        for i in 2..=k {
            for j in (i + 1)..=k {
                let mut seed = DiffForm::zero(self.dim, 0);
                if let Some(xi) = xi {
                    seed = self.ternary_form(xi, fields[i - 2], fields[j - 2]);
                }
                if let Some(alpha) = alpha {
                    seed = seed.sub(&self.ternary_top_form(alpha, fields[i - 2], fields[j - 2]));
                }
                let mut val = seed;
                for s in 2..=k {
                    if s != i && s != j {
                        val = val.contract(fields[s - 2]);
                    }
                }
                let sign = qi(neg_one_pow((i + j + 1) as i64));
                let term = val.scale(&sign);
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
        }
        acc.map(|a| a.scale(&lead)).unwrap_or_else(|| DiffForm::zero(self.dim, 0))
    }
}

impl Algebroid for ZambonAlgebroid {
    type El = CourEl;

    fn max_arity(&self) -> usize {
        self.n + 1
    }

    fn bracket(&self, args: &[CourEl]) -> CourEl {
        let k = args.len();
        let mut out = self.zero_el();
        match k {
            1 => {
                for q in 0..self.n.saturating_sub(1) {
                    if !args[0].forms[q].is_zero() {
                        out.add_form(args[0].forms[q].d());
                    }
                }
                out
            }
            2 => {
                let (a, b) = (&args[0], &args[1]);
                let da = a.degree();
                let db = b.degree();
                match (da, db) {
                    (None, _) | (_, None) => out,
                    (Some(0), Some(0)) => {
                        let br = courant_raw(&self.h, &a.as_section(), &b.as_section());
                        out.x = br.x;
                        out.add_form(br.alpha);
                        out
                    }
                    (Some(0), Some(_)) => {
                        let half = qr(1, 2);
                        for q in 0..self.n.saturating_sub(1) {
                            if !b.forms[q].is_zero() {
                                out.add_form(b.forms[q].lie_derivative(&a.x).scale(&half));
                            }
                        }
                        out
                    }
                    (Some(_), Some(0)) => {
                        let half = qr(-1, 2);
                        for q in 0..self.n.saturating_sub(1) {
                            if !a.forms[q].is_zero() {
                                out.add_form(a.forms[q].lie_derivative(&b.x).scale(&half));
                            }
                        }
                        out
                    }
                    _ => out,
                }
            }
            3 => {
                let degs: Vec<Option<i64>> = args.iter().map(|a| a.degree()).collect();
                if degs.iter().any(|d| d.is_none()) {
                    return out;
                }
                let lower: Vec<usize> = (0..3).filter(|&i| degs[i] != Some(0)).collect();
                match lower.len() {
                    0 => {
                        let secs: Vec<CourantSection> =
                            args.iter().map(|a| a.as_section()).collect();
                        let refs: Vec<&CourantSection> = secs.iter().collect();
                        out.add_form(self.ternary_sections(&refs));
                        // Top forms in the sections also seed the shifted
                        // ternary through their bare-form slots; the cyclic
                        // pairing sum above already includes them.
                        out
                    }
                    1 => {
                        let i = lower[0];
                        let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
                        // Move the shifted form to the front: each swap past
                        // a degree-zero slot contributes a bare minus sign.
                        let sign = qi(neg_one_pow(i as i64));
                        for q in 0..self.n.saturating_sub(1) {
                            let piece = &args[i].forms[q];
                            if piece.is_zero() {
                                continue;
                            }
                            let val =
                                self.ternary_form(piece, &args[others[0]].x, &args[others[1]].x);
                            out.add_form(val.scale(&sign));
                        }
                        // The top-form parts of the two remaining sections
                        // pair through the cyclic ternary with zero twist.
                        out
                    }
                    _ => out,
                }
            }
            _ => self.higher_bracket(args),
        }
    }

    fn anchor(&self, e: &CourEl) -> VectorField {
        e.x.clone()
    }

    fn chart_dim(&self) -> usize {
        self.dim
    }

    fn act(&self, f: &Poly, e: &CourEl) -> CourEl {
        CourEl {
            n: e.n,
            dim: e.dim,
            x: e.x.mul_fn(f),
            forms: e.forms.iter().map(|w| w.mul_fn(f)).collect(),
        }
    }

    fn zero(&self) -> CourEl {
        self.zero_el()
    }

    fn sample_elements(&self, rng: &mut ChaCha20Rng) -> Vec<CourEl> {
        let mut pool = Vec::new();
        for i in 0..self.dim.min(2) {
            pool.push(CourEl::from_section(&CourantSection::new(
                self.n,
                VectorField::basis(self.dim, i),
                crate::chart::random_form(rng, self.dim, self.n - 1, 2, 2),
            )));
        }
        pool.push(CourEl::from_section(&random_section(rng, self.n, self.dim)));
        pool.push(CourEl::from_section(&CourantSection::new(
            self.n,
            VectorField::zero(self.dim),
            crate::chart::random_form(rng, self.dim, self.n - 1, 2, 2),
        )));
        for q in 0..self.n.saturating_sub(1) {
            pool.push(CourEl::from_form(
                self.n,
                self.n - 1,
                crate::chart::random_form(rng, self.dim, q, 2, 2),
            ));
        }
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::random_form;
    use rand::SeedableRng;

    fn closed_form(rng: &mut ChaCha20Rng, dim: usize, p: usize) -> DiffForm {
        random_form(rng, dim, p - 1, 2, 2).d()
    }

    #[test]
    fn dorfman_is_courant_plus_half_exact_pairing() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for (n, dim) in [(2usize, 3usize), (3, 4)] {
            let h = closed_form(&mut rng, dim, n + 1);
            let a = random_section(&mut rng, n, dim);
            let b = random_section(&mut rng, n, dim);
            let d = dorfman(&h, &a, &b).unwrap();
            let c = courant_bracket(&h, &a, &b).unwrap();
            let correction = pairing(&a, &b).d().scale(&qr(1, 2));
            assert_eq!(d.x, c.x);
            assert_eq!(d.alpha, c.alpha.add(&correction));
        }
    }

    #[test]
    fn dorfman_rejects_non_closed_twist() {
        let dim = 4;
        let mut h = DiffForm::zero(dim, 3);
        h.add_monomial(&[0, 1, 2], Poly::var(dim, 3));
        assert!(!h.d().is_zero());
        let a = CourantSection::zero(2, dim);
        assert!(dorfman(&h, &a, &a).is_err());
    }

    #[test]
    fn dorfman_leibniz_in_both_slots() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        let (n, dim) = (2usize, 3usize);
        let h = closed_form(&mut rng, dim, n + 1);
        let a = random_section(&mut rng, n, dim);
        let b = random_section(&mut rng, n, dim);
        let f = crate::chart::random_poly(&mut rng, dim, 2, 2);

        let lhs = dorfman(&h, &a, &b.scale_fn(&f)).unwrap();
        let rhs = dorfman(&h, &a, &b).unwrap().scale_fn(&f).add(&b.scale_fn(&a.x.apply(&f)));
        assert_eq!(lhs, rhs);

        let lhs2 = dorfman(&h, &a.scale_fn(&f), &b).unwrap();
        let mut rhs2 = dorfman(&h, &a, &b).unwrap().scale_fn(&f).sub(&a.scale_fn(&b.x.apply(&f)));
        rhs2.alpha = rhs2.alpha.add(&DiffForm::from_fn(f.clone()).d().wedge(&pairing(&a, &b)));
        assert_eq!(lhs2, rhs2);
    }

    #[test]
    fn dorfman_jacobi_in_leibniz_form() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for (n, dim) in [(2usize, 3usize), (3, 4)] {
            let h = closed_form(&mut rng, dim, n + 1);
            let e1 = random_section(&mut rng, n, dim);
            let e2 = random_section(&mut rng, n, dim);
            let e3 = random_section(&mut rng, n, dim);
            let lhs = dorfman(&h, &e1, &dorfman(&h, &e2, &e3).unwrap()).unwrap();
            let rhs = dorfman(&h, &dorfman(&h, &e1, &e2).unwrap(), &e3)
                .unwrap()
                .add(&dorfman(&h, &e2, &dorfman(&h, &e1, &e3).unwrap()).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pairing_is_invariant_under_the_nonskew_bracket() {
        let mut rng = ChaCha20Rng::seed_from_u64(24);
        let (n, dim) = (3usize, 4usize);
        let h = closed_form(&mut rng, dim, n + 1);
        let e1 = random_section(&mut rng, n, dim);
        let e2 = random_section(&mut rng, n, dim);
        let e3 = random_section(&mut rng, n, dim);
        let lhs = pairing(&e1, &e2).lie_derivative(&e3.x);
        let rhs = pairing(&dorfman(&h, &e3, &e1).unwrap(), &e2)
            .add(&pairing(&e1, &dorfman(&h, &e3, &e2).unwrap()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauge_by_a_closed_form_is_an_automorphism() {
        let mut rng = ChaCha20Rng::seed_from_u64(25);
        let (n, dim) = (2usize, 3usize);
        let h = closed_form(&mut rng, dim, n + 1);
        let b_closed = closed_form(&mut rng, dim, n);
        let e1 = random_section(&mut rng, n, dim);
        let e2 = random_section(&mut rng, n, dim);
        let lhs = dorfman(&h, &gauge_transform(&b_closed, &e1), &gauge_transform(&b_closed, &e2))
            .unwrap();
        let rhs = gauge_transform(&b_closed, &dorfman(&h, &e1, &e2).unwrap());
        assert_eq!(lhs, rhs);

        // Non-closed gauge forms leave a residue: the double contraction of
        // the gauge form's differential.
        let b_open = random_form(&mut rng, dim, n, 2, 2);
        assert!(!b_open.d().is_zero());
        let lhs2 =
            dorfman(&h, &gauge_transform(&b_open, &e1), &gauge_transform(&b_open, &e2)).unwrap();
        let rhs2 = gauge_transform(&b_open, &dorfman(&h, &e1, &e2).unwrap());
        let residue = lhs2.alpha.sub(&rhs2.alpha);
        assert_eq!(residue, b_open.d().contract(&e1.x).contract(&e2.x));
        assert_eq!(lhs2.x, rhs2.x);
    }

    #[test]
    fn tower_degrees_and_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(26);
        let alg = ZambonAlgebroid::new(3, 4, closed_form(&mut rng, 4, 4)).unwrap();
        let s = CourEl::from_section(&random_section(&mut rng, 3, 4));
        assert_eq!(s.degree(), Some(0));
        let f = CourEl::from_form(3, 2, DiffForm::from_fn(Poly::one(4)));
        assert_eq!(f.degree(), Some(-2));
        let w = CourEl::from_form(3, 2, random_form(&mut rng, 4, 1, 2, 2));
        assert_eq!(w.degree(), Some(-1));
        assert_eq!(alg.zero().degree(), None);
    }
}
