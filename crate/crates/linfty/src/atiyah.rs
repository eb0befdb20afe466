//! Two models of the symmetry algebroid of a higher circle bundle, and the
//! morphism that identifies them.
//!
//! The split model `At` has carrier `fields + functions[n-1]`, zero
//! differential, the field part acting on the function part, and one higher
//! bracket of arity `n + 1` given by a prescribed global `(n+1)`-form flux.
//! Its generalized Jacobi identity holds exactly when the flux is closed;
//! a non-closed flux breaks precisely the weight-`(n+2)` identity.
//!
//! The Čech model `CechAt` is built from cocycle data on a cover: a strict
//! two-bracket structure on a complex of function cochains capped by the
//! compatible pairs (field, function cochain at the deepest level) whose
//! cochain part tracks the log-transition derivative along the field.
//!
//! The strictification morphism maps the split model into the Čech model:
//! its linear part pairs the identity on fields with contraction into the
//! 1-form layer and carries the function slot to its restriction; the
//! weight-`k` part contracts the `k`-form layer. All its defects vanish:
//! weight 1 because restrictions are coboundary-closed, weight 2 and above
//! by the descent equations of the cocycle, with the top cancellation
//! pairing the facewise derivative of the deepest layer against the flux.

use crate::algebroid::{Algebroid, Check, CheckStatus, Coordinates, Element};
use crate::chart::{lie_bracket, DiffForm, Poly, VectorField};
use crate::deligne::CechCocycle;
use crate::morphism::{Component, Morphism};
use crate::nerve::{cech_delta, FormCochain, SampledSpace};
use crate::scalar::Q;
use rand_chacha::ChaCha20Rng;
use std::rc::Rc;

/// Element of the split model: a field part and a function part. For
/// `n = 1` both parts share degree zero; for `n >= 2` the field part sits in
/// degree `0`, the function part in degree `1 - n`, and homogeneous elements
/// have only one part.
#[derive(Clone, Debug, PartialEq)]
pub struct AtEl {
    pub n: usize,
    pub x: VectorField,
    pub f: Poly,
}

impl AtEl {
    pub fn field(n: usize, x: VectorField) -> AtEl {
        let dim = x.dim();
        AtEl { n, x, f: Poly::zero(dim) }
    }

    pub fn function(n: usize, dim: usize, f: Poly) -> AtEl {
        AtEl { n, x: VectorField::zero(dim), f }
    }
}

impl Element for AtEl {
    fn degree(&self) -> Option<i64> {
        let xz = self.x.is_zero();
        let fz = self.f.is_zero();
        match (xz, fz) {
            (true, true) => None,
            (false, true) => Some(0),
            (true, false) => Some(1 - self.n as i64),
            (false, false) => {
                assert_eq!(self.n, 1, "inhomogeneous element of the split model");
                Some(0)
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.f.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        AtEl { n: self.n, x: self.x.add(&other.x), f: self.f.add(&other.f) }
    }

    fn neg(&self) -> Self {
        AtEl { n: self.n, x: self.x.neg(), f: self.f.neg() }
    }

    fn scale(&self, c: &Q) -> Self {
        AtEl { n: self.n, x: self.x.scale(c), f: self.f.scale(c) }
    }
}

/// The split model with prescribed flux: an `(n+1)`-form, not required to be
/// closed (the structure verifier is expected to catch a non-closed one).
#[derive(Clone, Debug)]
pub struct AtiyahAlgebroid {
    pub n: usize,
    pub dim: usize,
    pub flux: DiffForm,
}

pub fn build_at(n: usize, flux: DiffForm) -> AtiyahAlgebroid {
    assert!(n >= 1);
    assert!(flux.is_zero() || flux.p == n + 1);
    AtiyahAlgebroid { n, dim: flux.dim, flux }
}

impl Algebroid for AtiyahAlgebroid {
    type El = AtEl;

    fn max_arity(&self) -> usize {
        self.n + 1
    }

    fn bracket(&self, args: &[AtEl]) -> AtEl {
        let k = args.len();
        if k == 2 {
            let a = &args[0];
            let b = &args[1];
            let x = lie_bracket(&a.x, &b.x);
            let mut f = a.x.apply(&b.f).sub(&b.x.apply(&a.f));
            if self.n == 1 {
                f = f.add(&self.flux.eval_fields(&[&a.x, &b.x]));
            }
            return AtEl { n: self.n, x, f };
        }
        if k == self.n + 1 && self.n >= 2 {
            let fields: Vec<&VectorField> = args.iter().map(|a| &a.x).collect();
            let f = self.flux.eval_fields(&fields);
            return AtEl::function(self.n, self.dim, f);
        }
        self.zero()
    }

    fn anchor(&self, e: &AtEl) -> VectorField {
        e.x.clone()
    }

    fn chart_dim(&self) -> usize {
        self.dim
    }

    fn act(&self, f: &Poly, e: &AtEl) -> AtEl {
        AtEl { n: self.n, x: e.x.mul_fn(f), f: e.f.mul(f) }
    }

    fn zero(&self) -> AtEl {
        AtEl { n: self.n, x: VectorField::zero(self.dim), f: Poly::zero(self.dim) }
    }

    fn sample_elements(&self, rng: &mut ChaCha20Rng) -> Vec<AtEl> {
        let mut pool = Vec::new();
        for i in 0..self.dim {
            pool.push(AtEl::field(self.n, VectorField::basis(self.dim, i)));
        }
        for _ in 0..2 {
            pool.push(AtEl::field(self.n, crate::chart::random_field(rng, self.dim, 2, 2)));
        }
        pool.push(AtEl::function(self.n, self.dim, Poly::one(self.dim)));
        pool.push(AtEl::function(self.n, self.dim, crate::chart::random_poly(rng, self.dim, 2, 2)));
        pool
    }
}

impl Coordinates for AtiyahAlgebroid {
    fn generators(&self) -> Vec<AtEl> {
        let mut gens: Vec<AtEl> = (0..self.dim)
            .map(|i| AtEl::field(self.n, VectorField::basis(self.dim, i)))
            .collect();
        gens.push(AtEl::function(self.n, self.dim, Poly::one(self.dim)));
        gens
    }

    fn coords(&self, e: &AtEl) -> Vec<Poly> {
        let mut out = e.x.comps.clone();
        out.push(e.f.clone());
        out
    }
}

/// Element of the Čech model: field part and compatible function cochain at
/// level `n - 1` in degree zero, plus one function cochain per lower level
/// `j = 0..n-2` in degree `j - n + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CechAtEl {
    pub x: VectorField,
    pub e: FormCochain,
    pub lower: Vec<FormCochain>,
}

impl Element for CechAtEl {
    fn degree(&self) -> Option<i64> {
        let n1 = self.lower.len() as i64 + 1;
        let top = !self.x.is_zero() || !self.e.is_zero();
        let low: Vec<usize> =
            (0..self.lower.len()).filter(|&j| !self.lower[j].is_zero()).collect();
        match (top, low.len()) {
            (false, 0) => None,
            (true, 0) => Some(0),
            (false, 1) => Some(low[0] as i64 - n1 + 1),
            _ => panic!("inhomogeneous element of the Čech model"),
        }
    }

    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.e.is_zero() && self.lower.iter().all(|c| c.is_zero())
    }

    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.lower.len(), other.lower.len());
        CechAtEl {
            x: self.x.add(&other.x),
            e: self.e.add(&other.e),
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| a.add(b)).collect(),
        }
    }

    fn neg(&self) -> Self {
        CechAtEl {
            x: self.x.neg(),
            e: self.e.neg(),
            lower: self.lower.iter().map(|c| c.neg()).collect(),
        }
    }

    fn scale(&self, c: &Q) -> Self {
        CechAtEl {
            x: self.x.scale(c),
            e: self.e.scale(c),
            lower: self.lower.iter().map(|v| v.scale(c)).collect(),
        }
    }
}

/// The Čech model over a validated cocycle.
#[derive(Clone, Debug)]
pub struct CechAtiyahAlgebroid {
    pub cocycle: CechCocycle,
}

pub fn build_cech_at(cocycle: &CechCocycle) -> CechAtiyahAlgebroid {
    CechAtiyahAlgebroid { cocycle: cocycle.clone() }
}

impl CechAtiyahAlgebroid {
    fn n(&self) -> usize {
        self.cocycle.n
    }

    pub fn zero_el(&self) -> CechAtEl {
        let n = self.n();
        let dim = self.cocycle.dim;
        CechAtEl {
            x: VectorField::zero(dim),
            e: FormCochain::zero(&self.cocycle.nerve, n - 1, 0, dim),
            lower: (0..n.saturating_sub(1))
                .map(|j| FormCochain::zero(&self.cocycle.nerve, j, 0, dim))
                .collect(),
        }
    }

    /// The compatible pair over a field: cochain part is the contraction of
    /// the 1-form layer.
    pub fn horizontal(&self, x: &VectorField) -> CechAtEl {
        let mut out = self.zero_el();
        out.e = self.cocycle.a[0].map(|v| v.contract(x));
        out.x = x.clone();
        out
    }

    /// Whether the degree-zero pair satisfies the membership equation:
    /// the log-transition derivative along the field equals the coboundary
    /// of the cochain part.
    pub fn is_member(&self, el: &CechAtEl) -> bool {
        let dl = self.cocycle.lambda.d().map(|v| v.contract(&el.x));
        let de = cech_delta(&self.cocycle.nerve, &el.e);
        dl == de
    }
}

impl Algebroid for CechAtiyahAlgebroid {
    type El = CechAtEl;

    fn max_arity(&self) -> usize {
        2
    }

    fn bracket(&self, args: &[CechAtEl]) -> CechAtEl {
        let n = self.n();
        match args.len() {
            1 => {
                // Coboundary cascade with level-dependent sign; the top
                // (degree-zero) part is closed.
                let a = &args[0];
                let mut out = self.zero_el();
                for j in 0..n.saturating_sub(1) {
                    if a.lower[j].is_zero() {
                        continue;
                    }
                    let sign = crate::scalar::neg_one_pow((n - j) as i64);
                    let image = cech_delta(&self.cocycle.nerve, &a.lower[j])
                        .scale(&crate::scalar::qi(sign));
                    if j + 1 < n - 1 {
                        out.lower[j + 1] = out.lower[j + 1].add(&image);
                    } else {
                        out.e = out.e.add(&image);
                    }
                }
                out
            }
            2 => {
                let a = &args[0];
                let b = &args[1];
                let mut out = self.zero_el();
                out.x = lie_bracket(&a.x, &b.x);
                out.e = b.e.map(|v| v.lie_derivative(&a.x)).add(&a.e.map(|v| v.lie_derivative(&b.x)).neg());
                for j in 0..n.saturating_sub(1) {
                    out.lower[j] = b.lower[j]
                        .map(|v| v.lie_derivative(&a.x))
                        .add(&a.lower[j].map(|v| v.lie_derivative(&b.x)).neg());
                }
                out
            }
            _ => self.zero_el(),
        }
    }

    fn anchor(&self, e: &CechAtEl) -> VectorField {
        e.x.clone()
    }

    fn chart_dim(&self) -> usize {
        self.cocycle.dim
    }

    fn act(&self, f: &Poly, e: &CechAtEl) -> CechAtEl {
        CechAtEl {
            x: e.x.mul_fn(f),
            e: e.e.map(|v| v.mul_fn(f)),
            lower: e.lower.iter().map(|c| c.map(|v| v.mul_fn(f))).collect(),
        }
    }

    fn zero(&self) -> CechAtEl {
        self.zero_el()
    }

    fn sample_elements(&self, rng: &mut ChaCha20Rng) -> Vec<CechAtEl> {
        let n = self.n();
        let dim = self.cocycle.dim;
        let nerve = &self.cocycle.nerve;
        let mut pool = Vec::new();
        for i in 0..dim.min(3) {
            pool.push(self.horizontal(&VectorField::basis(dim, i)));
        }
        pool.push(self.horizontal(&crate::chart::random_field(rng, dim, 2, 2)));
        // Anchor-kernel members of degree zero need a coboundary-closed
        // cochain part: restricted globals at the bottom level, a coboundary
        // from the next level down otherwise.
        let mut ker = self.zero_el();
        ker.e = if n == 1 {
            FormCochain::diagonal(
                nerve,
                0,
                &DiffForm::from_fn(crate::chart::random_poly(rng, dim, 2, 2)),
            )
        } else {
            cech_delta(nerve, &crate::nerve::random_form_cochain(rng, nerve, n - 2, 0, dim, 2, 2))
        };
        pool.push(ker);
        for j in 0..n.saturating_sub(1) {
            let mut el = self.zero_el();
            el.lower[j] = crate::nerve::random_form_cochain(rng, nerve, j, 0, dim, 2, 2);
            pool.push(el);
        }
        pool
    }
}

/// The strictification morphism from the split model (flux = the cocycle's
/// curvature) into the Čech model. Components: weight 1 pairs the field part
/// with contraction into the 1-form layer and restricts the function part to
/// the deepest position; weight `k = 2..=n` contracts the `k`-form layer
/// with the field parts and vanishes on words with a function letter.
pub fn strictify<'a>(
    at: &'a AtiyahAlgebroid,
    cat: &'a CechAtiyahAlgebroid,
) -> Morphism<'a, AtiyahAlgebroid, CechAtiyahAlgebroid> {
    let n = cat.n();
    assert_eq!(at.n, n);
    assert_eq!(at.flux, cat.cocycle.curvature(), "flux must match the cocycle curvature");
    let mut comps: Vec<Component<'a, AtiyahAlgebroid, CechAtiyahAlgebroid>> = Vec::new();

    let c1: Component<'a, AtiyahAlgebroid, CechAtiyahAlgebroid> = Rc::new(move |w: &[AtEl]| {
        let v = &w[0];
        let mut out = cat.horizontal(&v.x);
        if !v.f.is_zero() {
            let restricted =
                FormCochain::diagonal(&cat.cocycle.nerve, 0, &DiffForm::from_fn(v.f.clone()));
            if n == 1 {
                out.e = out.e.add(&restricted);
            } else {
                out.lower[0] = out.lower[0].add(&restricted);
            }
        }
        out
    });
    comps.push(c1);

    for k in 2..=n {
        let ck: Component<'a, AtiyahAlgebroid, CechAtiyahAlgebroid> = Rc::new(move |w: &[AtEl]| {
            let mut out = cat.zero_el();
            if w.iter().any(|v| !v.f.is_zero()) {
                return out;
            }
            let fields: Vec<&VectorField> = w.iter().map(|v| &v.x).collect();
            let val = cat.cocycle.a[k - 1].map(|form| DiffForm::from_fn(form.eval_fields(&fields)));
            out.lower[n - k] = val;
            out
        });
        comps.push(ck);
    }

    Morphism::new(at, cat, comps)
}

/// Defect checks of a morphism across explicit weights (also beyond its
/// order, where an exact morphism must still have vanishing defect).
pub fn mc_defect_checks<S: Algebroid, T: Algebroid>(
    phi: &Morphism<S, T>,
    rng: &mut ChaCha20Rng,
    max_weight: usize,
    samples: usize,
) -> Vec<Check> {
    let pool = phi.source.sample_elements(rng);
    let mut checks = Vec::new();
    for w in 1..=max_weight {
        let mut ok = true;
        let mut why = String::new();
        for word in crate::algebroid::sample_words(&pool, w, samples, rng) {
            let defect = phi.mc_defect(&word);
            if !defect.is_zero() {
                ok = false;
                why = format!(
                    "residue at degrees {:?}",
                    word.iter().map(|e| e.degree()).collect::<Vec<_>>()
                );
                break;
            }
        }
        checks.push(Check::of(format!("mc-defect-weight-{w}"), ok, why));
    }
    checks
}

/// Exact quasi-isomorphism test for the anchor-kernel complexes of the
/// strictification, run on a sampled model: the kernel of the split model is
/// the globals in one degree; the kernel complex of the Čech model is the
/// function cochain cascade capped by coboundary-closed deepest cochains.
/// The map is minus restriction, so the check is: restriction is injective,
/// it fills the first coboundary kernel, and every higher slot is exact.
pub fn sampled_kernel_quasi_iso(n: usize, space: &SampledSpace) -> Check {
    let dims = space.augmented_cohomology_dims();
    if dims.len() < n {
        return Check::fail("kernel-quasi-iso", "sampled nerve too shallow for this degree");
    }
    let bad: Vec<usize> = (0..n).filter(|&k| dims[k] != 0).collect();
    Check::of(
        "kernel-quasi-iso",
        bad.is_empty(),
        format!("cohomology survives at cochain levels {bad:?}"),
    )
}

/// The chart model cannot decide the kernel quasi-isomorphism: identity
/// restrictions admit no honest partition of unity, so exactness of its
/// cochain cascade genuinely fails there and the question must be settled on
/// a sampled model.
pub fn chart_kernel_quasi_iso() -> Check {
    Check {
        name: "kernel-quasi-iso".into(),
        status: CheckStatus::Inconclusive(
            "identity restrictions: decide on a sampled model".into(),
        ),
    }
}
