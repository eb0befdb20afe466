//! The derivation differential graded Lie algebra of a chart, twisted by a
//! top-degree flux form.
//!
//! Carrier: pairs (derivation of the form algebra, form shifted down by `n`).
//! We work in the sub-dgla generated by contractions, field derivatives, and
//! forms; it is closed under the bracket and the twisted differential, and the
//! quotients of its degree filtration carry the bracket towers built in
//! [`crate::transfer`] and [`crate::courant`]. Contractions sit in degree
//! `-1`, field derivatives in degree `0`, and a `q`-form in degree `q - n`.
//!
//! The differential pairs the commutator with the exterior derivative and
//! feeds the flux in through the derivation part; it squares to zero exactly
//! when the flux is closed, which the negative tests below exercise.

use crate::algebroid::Element;
use crate::chart::{lie_bracket, DiffForm, VectorField};
use crate::scalar::{neg_one_pow, qi, Q};
use rand_chacha::ChaCha20Rng;

/// An element of the derivation dgla: a contraction part, a field-derivative
/// part, and one form per form degree. Homogeneous elements of degree `-1`
/// hold a contraction and an `(n-1)`-form, degree `0` a field derivative and
/// an `n`-form, and any other degree `m` a single `(n+m)`-form.
#[derive(Clone, Debug, PartialEq)]
pub struct DerOmegaElement {
    pub n: usize,
    pub dim: usize,
    pub iota: VectorField,
    pub lie: VectorField,
    pub forms: Vec<DiffForm>,
}

impl DerOmegaElement {
    pub fn zero(n: usize, dim: usize) -> Self {
        DerOmegaElement {
            n,
            dim,
            iota: VectorField::zero(dim),
            lie: VectorField::zero(dim),
            forms: (0..=dim).map(|q| DiffForm::zero(dim, q)).collect(),
        }
    }

    pub fn from_iota(n: usize, x: VectorField) -> Self {
        let dim = x.dim();
        let mut out = Self::zero(n, dim);
        out.iota = x;
        out
    }

    pub fn from_lie(n: usize, x: VectorField) -> Self {
        let dim = x.dim();
        let mut out = Self::zero(n, dim);
        out.lie = x;
        out
    }

    pub fn from_form(n: usize, form: DiffForm) -> Self {
        let mut out = Self::zero(n, form.dim);
        if !form.is_zero() {
            let q = form.p;
            out.forms[q] = form;
        }
        out
    }

    pub fn mul_fn(&self, f: &crate::chart::Poly) -> Self {
        DerOmegaElement {
            n: self.n,
            dim: self.dim,
            iota: self.iota.mul_fn(f),
            lie: self.lie.mul_fn(f),
            forms: self.forms.iter().map(|w| w.mul_fn(f)).collect(),
        }
    }

    /// Degrees of the nonzero pieces, in the grading of the dgla.
    fn piece_degrees(&self) -> Vec<i64> {
        let mut degs = Vec::new();
        if !self.iota.is_zero() {
            degs.push(-1);
        }
        if !self.lie.is_zero() {
            degs.push(0);
        }
        for (q, f) in self.forms.iter().enumerate() {
            if !f.is_zero() {
                let d = q as i64 - self.n as i64;
                if !degs.contains(&d) {
                    degs.push(d);
                }
            }
        }
        degs
    }
}

impl Element for DerOmegaElement {
    fn degree(&self) -> Option<i64> {
        let degs = self.piece_degrees();
        match degs.len() {
            0 => None,
            1 => Some(degs[0]),
            _ => panic!("inhomogeneous derivation-algebra element: degrees {degs:?}"),
        }
    }

    fn is_zero(&self) -> bool {
        self.iota.is_zero() && self.lie.is_zero() && self.forms.iter().all(|f| f.is_zero())
    }

    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        assert_eq!(self.dim, other.dim);
        DerOmegaElement {
            n: self.n,
            dim: self.dim,
            iota: self.iota.add(&other.iota),
            lie: self.lie.add(&other.lie),
            forms: self.forms.iter().zip(&other.forms).map(|(a, b)| a.add(b)).collect(),
        }
    }

    fn neg(&self) -> Self {
        DerOmegaElement {
            n: self.n,
            dim: self.dim,
            iota: self.iota.neg(),
            lie: self.lie.neg(),
            forms: self.forms.iter().map(|f| f.neg()).collect(),
        }
    }

    fn scale(&self, c: &Q) -> Self {
        DerOmegaElement {
            n: self.n,
            dim: self.dim,
            iota: self.iota.scale(c),
            lie: self.lie.scale(c),
            forms: self.forms.iter().map(|f| f.scale(c)).collect(),
        }
    }
}

/// The ambient dgla over one chart: dimension, shift level `n`, and the
/// `(n+1)`-form flux twisting the differential. The flux is not required to
/// be closed at construction; a non-closed flux breaks the square-zero law
/// and is used as a negative control.
#[derive(Clone, Debug)]
pub struct DerOmegaAlgebra {
    pub n: usize,
    pub dim: usize,
    pub flux: DiffForm,
}

impl DerOmegaAlgebra {
    pub fn new(n: usize, dim: usize, flux: DiffForm) -> Self {
        assert!(n >= 1);
        assert!(flux.is_zero() || (flux.dim == dim && flux.p == n + 1));
        DerOmegaAlgebra { n, dim, flux }
    }

    pub fn zero_el(&self) -> DerOmegaElement {
        DerOmegaElement::zero(self.n, self.dim)
    }

    /// Twisted differential: the contraction part flows to the field
    /// derivative and feeds the flux in as an `n`-form, the field-derivative
    /// part pushes its derivative of the flux one degree up, and every form
    /// moves up by the exterior derivative.
    pub fn d(&self, e: &DerOmegaElement) -> DerOmegaElement {
        let mut out = self.zero_el();
        out.lie = e.iota.clone();
        if !e.iota.is_zero() && !self.flux.is_zero() {
            out.forms[self.n] = out.forms[self.n].add(&self.flux.contract(&e.iota));
        }
        if !e.lie.is_zero() && !self.flux.is_zero() && self.n + 1 <= self.dim {
            out.forms[self.n + 1] =
                out.forms[self.n + 1].add(&self.flux.lie_derivative(&e.lie).neg());
        }
        for q in 0..self.dim {
            if !e.forms[q].is_zero() {
                out.forms[q + 1] = out.forms[q + 1].add(&e.forms[q].d());
            }
        }
        out
    }

    /// Graded bracket: commutators between the derivation parts, the first
    /// derivation applied to the second form, and the second derivation
    /// applied to the first form with the sign of moving it past that form.
    pub fn bracket(&self, a: &DerOmegaElement, b: &DerOmegaElement) -> DerOmegaElement {
        let mut out = self.zero_el();
        out.iota = lie_bracket(&a.lie, &b.iota).sub(&lie_bracket(&b.lie, &a.iota));
        out.lie = lie_bracket(&a.lie, &b.lie);
        for q in 0..=self.dim {
            if !b.forms[q].is_zero() {
                if q >= 1 && !a.iota.is_zero() {
                    out.forms[q - 1] = out.forms[q - 1].add(&b.forms[q].contract(&a.iota));
                }
                if !a.lie.is_zero() {
                    out.forms[q] = out.forms[q].add(&b.forms[q].lie_derivative(&a.lie));
                }
            }
            if !a.forms[q].is_zero() {
                if q >= 1 && !b.iota.is_zero() {
                    let sign = qi(neg_one_pow((q + self.n + 1) as i64));
                    out.forms[q - 1] =
                        out.forms[q - 1].add(&a.forms[q].contract(&b.iota).scale(&sign));
                }
                if !b.lie.is_zero() {
                    out.forms[q] = out.forms[q].add(&a.forms[q].lie_derivative(&b.lie).neg());
                }
            }
        }
        out
    }

    /// Sample pool: basis and polynomial contractions and field derivatives,
    /// plus forms of every degree around the shift level.
    pub fn sample_elements(&self, rng: &mut ChaCha20Rng) -> Vec<DerOmegaElement> {
        let mut pool = Vec::new();
        for i in 0..self.dim.min(2) {
            pool.push(DerOmegaElement::from_iota(self.n, VectorField::basis(self.dim, i)));
            pool.push(DerOmegaElement::from_lie(self.n, VectorField::basis(self.dim, i)));
        }
        pool.push(DerOmegaElement::from_iota(
            self.n,
            crate::chart::random_field(rng, self.dim, 2, 2),
        ));
        pool.push(DerOmegaElement::from_lie(
            self.n,
            crate::chart::random_field(rng, self.dim, 2, 2),
        ));
        for q in 0..=self.dim.min(self.n + 1) {
            pool.push(DerOmegaElement::from_form(
                self.n,
                crate::chart::random_form(rng, self.dim, q, 2, 2),
            ));
        }
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{random_field, random_form, Poly};
    use rand::SeedableRng;

    fn sample_algebra(n: usize, dim: usize, closed: bool, seed: u64) -> DerOmegaAlgebra {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let flux = if closed {
            // d of a random n-form is closed of degree n + 1.
            random_form(&mut rng, dim, n, 2, 2).d()
        } else {
            let mut h = DiffForm::zero(dim, n + 1);
            let idx: Vec<u8> = (0..=n as u8).collect();
            h.add_monomial(&idx, Poly::var(dim, n + 1));
            assert!(!h.d().is_zero());
            h
        };
        DerOmegaAlgebra::new(n, dim, flux)
    }

    #[test]
    fn degrees_of_generators() {
        let g = sample_algebra(2, 4, true, 1);
        let x = VectorField::basis(4, 0);
        assert_eq!(DerOmegaElement::from_iota(2, x.clone()).degree(), Some(-1));
        assert_eq!(DerOmegaElement::from_lie(2, x.clone()).degree(), Some(0));
        let w = DiffForm::monomial(4, &[0], Poly::one(4));
        assert_eq!(DerOmegaElement::from_form(2, w).degree(), Some(-1));
        assert_eq!(g.zero_el().degree(), None);
    }

    #[test]
    fn bracket_is_graded_antisymmetric() {
        let g = sample_algebra(2, 4, true, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let pool = g.sample_elements(&mut rng);
        for a in &pool {
            for b in &pool {
                let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
                let lhs = g.bracket(a, b);
                let rhs = g.bracket(b, a).scale(&qi(-neg_one_pow(da * db)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn bracket_satisfies_graded_jacobi() {
        let g = sample_algebra(2, 4, true, 4);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let pool = g.sample_elements(&mut rng);
        // ad(a) is a graded derivation of the bracket.
        for (i, a) in pool.iter().enumerate().step_by(2) {
            for (j, b) in pool.iter().enumerate().step_by(3) {
                for c in pool.iter().skip((i + j) % 3).step_by(4) {
                    let da = a.degree().unwrap();
                    let db = b.degree().unwrap();
                    let lhs = g.bracket(a, &g.bracket(b, c));
                    let rhs = g
                        .bracket(&g.bracket(a, b), c)
                        .add(&g.bracket(b, &g.bracket(a, c)).scale(&qi(neg_one_pow(da * db))));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn differential_squares_to_zero_iff_flux_closed() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let good = sample_algebra(2, 4, true, 7);
        for e in good.sample_elements(&mut rng) {
            assert!(good.d(&good.d(&e)).is_zero());
        }
        let bad = sample_algebra(2, 4, false, 8);
        let x = DerOmegaElement::from_iota(2, VectorField::basis(4, 0));
        assert!(!bad.d(&bad.d(&x)).is_zero());
    }

    #[test]
    fn differential_is_a_derivation_of_the_bracket() {
        let g = sample_algebra(2, 4, true, 9);
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let pool = g.sample_elements(&mut rng);
        for (i, a) in pool.iter().enumerate() {
            for b in pool.iter().skip(i % 2).step_by(2) {
                let da = a.degree().unwrap();
                let lhs = g.d(&g.bracket(a, b));
                let rhs =
                    g.bracket(&g.d(a), b).add(&g.bracket(a, &g.d(b)).scale(&qi(neg_one_pow(da))));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn pinned_commutators() {
        let g = sample_algebra(2, 4, true, 11);
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let x = random_field(&mut rng, 4, 2, 2);
        let y = random_field(&mut rng, 4, 2, 2);
        let ix = DerOmegaElement::from_iota(2, x.clone());
        let iy = DerOmegaElement::from_iota(2, y.clone());
        let lx = DerOmegaElement::from_lie(2, x.clone());
        let ly = DerOmegaElement::from_lie(2, y.clone());
        // Two contractions commute; a field derivative moves a contraction
        // along the field bracket; field derivatives close among themselves.
        assert!(g.bracket(&ix, &iy).is_zero());
        assert_eq!(g.bracket(&lx, &iy), DerOmegaElement::from_iota(2, lie_bracket(&x, &y)));
        assert_eq!(g.bracket(&lx, &ly), DerOmegaElement::from_lie(2, lie_bracket(&x, &y)));
        // The differential of a contraction: field derivative plus flux
        // contraction; of a field derivative: minus the flux derivative.
        let dix = g.d(&ix);
        assert_eq!(dix.lie, x);
        assert_eq!(dix.forms[2], g.flux.contract(&x));
        let dlx = g.d(&lx);
        assert!(dlx.lie.is_zero() && dlx.iota.is_zero());
        assert_eq!(dlx.forms[3], g.flux.lie_derivative(&x).neg());
        // A form bracketed with a contraction from the right picks up the
        // parity of moving the contraction past the form.
        let w = random_form(&mut rng, 4, 2, 2, 2);
        let ew = DerOmegaElement::from_form(2, w.clone());
        let br = g.bracket(&ew, &iy);
        assert_eq!(br.forms[1], w.contract(&y).scale(&qi(neg_one_pow((2 + 2 + 1) as i64))));
    }
}
