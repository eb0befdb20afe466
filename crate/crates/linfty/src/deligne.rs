//! Multiplicative cocycle data for higher circle bundles over a covered
//! chart, and the simplicial object of order-`p` connection data over a
//! fixed cocycle.
//!
//! Degree `n = 1` is an ordinary circle bundle: log-transitions on double
//! overlaps (nerve level 1 here, since level `k` means `(k+1)`-fold
//! intersections) and a connection 1-form per open. Degree `n` keeps
//! log-transitions `lambda` at level `n` and form layers `A^(k)` of form
//! degree `k` at level `n - k`, tied together by
//!
//! `d lambda = cech(A^(1))`,
//! `d A^(k-1) + (-1)^k cech(A^(k)) = 0` for `k = 2..=n`,
//!
//! with curvature the global `(n+1)`-form `d A^(n)`.
//!
//! An `m`-simplex of the connection space of order `p` assigns form data to
//! every monotone injection into `[m]`: the connection layers at the
//! vertices, comparison potentials on higher faces. All its structure
//! equations are instances of one rule, stated in [`ConnSimplex::validate`].

use crate::algebroid::Check;
use crate::chart::DiffForm;
use crate::nerve::{cech_delta, FormCochain, Nerve};
use crate::scalar::{neg_one_pow, qi};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;

/// A multiplicative cocycle with connection data of degree `n` over a
/// covered `dim`-dimensional chart.
#[derive(Clone, Debug)]
pub struct CechCocycle {
    pub n: usize,
    pub dim: usize,
    pub nerve: Nerve,
    /// Log-transitions: a function cochain at level `n`.
    pub lambda: FormCochain,
    /// `a[k-1]` is the `k`-form layer at level `n - k`.
    pub a: Vec<FormCochain>,
}

impl CechCocycle {
    /// Checks the structure equations exactly. The log-transitions cocycle
    /// condition is additive here: the coboundary of `lambda` must be
    /// constant on every face (the surrogate for landing in the discrete
    /// subgroup), and degenerates to nothing when the nerve has no faces one
    /// level up.
    pub fn validate(&self) -> Vec<Check> {
        let mut checks = Vec::new();

        let dl = cech_delta(&self.nerve, &self.lambda);
        let mut const_ok = true;
        for v in &dl.vals {
            if !v.d().is_zero() {
                const_ok = false;
            }
        }
        checks.push(Check::of(
            "transition-coboundary-constant",
            const_ok,
            "coboundary of the log-transitions is not constant",
        ));

        let lhs = self.lambda.d();
        let rhs = cech_delta(&self.nerve, &self.a[0]);
        checks.push(Check::of(
            "transitions-match-first-layer",
            lhs == rhs,
            "d(lambda) differs from the coboundary of the 1-form layer",
        ));

        for k in 2..=self.n {
            let lhs = self.a[k - 2].d();
            let rhs = cech_delta(&self.nerve, &self.a[k - 1]).scale(&qi(neg_one_pow(k as i64)));
            checks.push(Check::of(
                format!("layer-{k}-descent"),
                lhs.add(&rhs).is_zero(),
                format!("d A^({}) + (-1)^{k} cech(A^({k})) is nonzero", k - 1),
            ));
        }

        let top = self.a[self.n - 1].d();
        let spread = cech_delta(&self.nerve, &top);
        checks.push(Check::of(
            "curvature-is-global",
            spread.is_zero(),
            "top layer curvatures disagree across opens",
        ));

        checks
    }

    /// The global curvature form `d A^(n)` (asserts agreement across opens).
    pub fn curvature(&self) -> DiffForm {
        let top = self.a[self.n - 1].d();
        for v in &top.vals {
            assert_eq!(v, &top.vals[0], "curvature is not global");
        }
        top.vals[0].clone()
    }
}

/// A circle bundle on the three-arc circle cover: one chart variable, flat
/// connection, class recorded by the holonomy constant `winding` on one
/// overlap.
pub fn circle_winding(winding: i64) -> CechCocycle {
    let nerve = Nerve::sphere(3);
    let dim = 1;
    // Connection 1-forms c_a dx on the arcs; transitions are the primitives
    // of their differences, plus the class constant.
    let consts = [0i64, 1, 3];
    let mut a1 = FormCochain::zero(&nerve, 0, 1, dim);
    for (pos, f) in nerve.faces_at(0).iter().enumerate() {
        let c = consts[f[0]];
        a1.vals[pos] = DiffForm::monomial(dim, &[0], crate::chart::Poly::constant(dim, qi(c)));
    }
    let mut lambda = FormCochain::zero(&nerve, 1, 0, dim);
    for (pos, f) in nerve.faces_at(1).iter().enumerate() {
        let diff = consts[f[1]] - consts[f[0]];
        let mut val = crate::chart::Poly::var(dim, 0).scale(&qi(diff));
        if f == &[0, 2] {
            val = val.add(&crate::chart::Poly::constant(dim, qi(-winding)));
        }
        lambda.vals[pos] = DiffForm::from_fn(val);
    }
    CechCocycle { n: 1, dim, nerve, lambda, a: vec![a1] }
}

/// A circle bundle over a two-variable chart covered by four opens, with
/// curvature `scale * dx0 ^ dx1`; `scale = 0` gives the flat representative.
pub fn u1_on_plane(scale: i64) -> CechCocycle {
    standard_cocycle(1, 2, 4, 7, Some(scale))
}

/// A degree-`n` cocycle over a `dim`-variable chart on the boundary-simplex
/// nerve with the given number of opens. Layers are populated by coboundary
/// enrichment of random potentials, so the structure equations hold exactly;
/// `curved` adds `scale * x0 dx1...` to the top layer, making the curvature
/// `scale * dx0 ^ dx1 ^ ... ^ dx_n` (requires `dim > n`).
pub fn standard_cocycle(
    n: usize,
    dim: usize,
    opens: usize,
    seed: u64,
    curved: Option<i64>,
) -> CechCocycle {
    assert!(n >= 1 && opens >= n + 2);
    let nerve = Nerve::sphere(opens);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    // Potentials r_k: k-forms at level n-k-1, for k = 0..n-1.
    let potentials: Vec<FormCochain> = (0..n)
        .map(|k| crate::nerve::random_form_cochain(&mut rng, &nerve, n - k - 1, k, dim, 2, 2))
        .collect();

    let mut lambda = cech_delta(&nerve, &potentials[0]);
    debug_assert_eq!(lambda.level, n);
    // Class constants on the level-n faces (invisible to the derivative,
    // constant after one more coboundary).
    for v in lambda.vals.iter_mut() {
        let c = crate::chart::Poly::constant(dim, qi(rng.gen_range(-3..=3)));
        *v = v.add(&DiffForm::from_fn(c));
    }

    let mut a = Vec::with_capacity(n);
    for k in 1..=n {
        let mut layer = potentials[k - 1].d();
        if k < n {
            let sweep = cech_delta(&nerve, &potentials[k]).scale(&qi(neg_one_pow(k as i64)));
            layer = layer.add(&sweep);
        }
        if k == n {
            if let Some(scale) = curved {
                assert!(dim > n, "a curved top layer needs dim > n");
                // x0 dx1 ^ ... ^ dxn, globally (the same on every open).
                let idx: Vec<u8> = (1..=n as u8).collect();
                let b = DiffForm::monomial(
                    dim,
                    &idx,
                    crate::chart::Poly::var(dim, 0).scale(&qi(scale)),
                );
                layer = layer.add(&FormCochain::diagonal(&nerve, 0, &b));
            }
        }
        a.push(layer);
    }

    CechCocycle { n, dim, nerve, lambda, a }
}

/// An `m`-simplex of the order-`p` connection space over a fixed cocycle:
/// form layers indexed by the nonempty subsets of `{0..=m}` (the images of
/// monotone injections). A subset of size `l + 1` carries `k`-form cochains
/// at nerve level `n - l - k` for `k = 1..=min(n - l, p)`; subsets with
/// `l > n` carry nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnSimplex {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub data: BTreeMap<Vec<usize>, Vec<FormCochain>>,
}

/// Number of form layers carried by a face of simplex dimension `l`.
pub fn layer_count(n: usize, p: usize, l: usize) -> usize {
    if l > n {
        0
    } else {
        (n - l).min(p)
    }
}

fn subsets_of(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << (m + 1)) {
        let s: Vec<usize> = (0..=m).filter(|i| mask & (1 << i) != 0).collect();
        out.push(s);
    }
    out
}

impl ConnSimplex {
    /// The zero-data skeleton: every carried layer present and zero.
    pub fn blank(cocycle: &CechCocycle, p: usize, m: usize) -> ConnSimplex {
        let n = cocycle.n;
        let mut data = BTreeMap::new();
        for s in subsets_of(m) {
            let l = s.len() - 1;
            if l > n {
                continue;
            }
            let layers: Vec<FormCochain> = (1..=layer_count(n, p, l))
                .map(|k| FormCochain::zero(&cocycle.nerve, n - l - k, k, cocycle.dim))
                .collect();
            data.insert(s, layers);
        }
        ConnSimplex { n, p, m, data }
    }

    /// A vertex simplex from connection layers (`a[k-1]` at level `n - k`).
    pub fn vertex(cocycle: &CechCocycle, p: usize, a: Vec<FormCochain>) -> ConnSimplex {
        assert_eq!(a.len(), layer_count(cocycle.n, p, 0));
        let mut s = ConnSimplex::blank(cocycle, p, 0);
        s.data.insert(vec![0], a);
        s
    }

    pub fn layers(&self, face: &[usize]) -> &[FormCochain] {
        self.data.get(face).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Every structure equation of the simplex, one instance of the rule:
    /// for each face subset `S` of dimension `l` and each `k` in
    /// `1..=min(n - l + 1, p)`,
    ///
    /// `d(layer k-1 of S) + (-1)^(l+k) cech(layer k of S)
    ///     = (-1)^(k+1) sum_r (-1)^r (layer k of S minus its r-th vertex)`,
    ///
    /// where layer 0 means the log-transitions (the fixed cocycle's at
    /// vertices, zero on higher faces), terms whose layer is not carried
    /// drop out, and the right side is empty at vertices. The `(-1)^(k+1)`
    /// is forced by commutation of the derivative with the coboundary:
    /// applying `d` to the rule at `k` must reproduce the coboundary of the
    /// rule at `k + 1` on every face chain.
    pub fn validate(&self, cocycle: &CechCocycle) -> Vec<Check> {
        let n = self.n;
        let p = self.p;
        let nerve = &cocycle.nerve;
        let dim = cocycle.dim;
        let mut checks = Vec::new();
        for (s, layers) in &self.data {
            let l = s.len() - 1;
            let kmax = (n + 1 - l).min(p);
            for k in 1..=kmax {
                // d of the (k-1)-layer.
                let lead = if k == 1 {
                    if l == 0 {
                        cocycle.lambda.d()
                    } else {
                        FormCochain::zero(nerve, n - l, 1, dim)
                    }
                } else {
                    layers[k - 2].d()
                };
                let mut lhs = lead;
                if k <= layer_count(n, p, l) {
                    let sweep = cech_delta(nerve, &layers[k - 1])
                        .scale(&qi(neg_one_pow((l + k) as i64)));
                    lhs = lhs.add(&sweep);
                }
                let mut rhs = FormCochain::zero(nerve, n + 1 - l - k, k, dim);
                for r in 0..s.len() {
                    let mut sub = s.clone();
                    sub.remove(r);
                    if sub.is_empty() {
                        continue;
                    }
                    let term =
                        self.layers(&sub)[k - 1].scale(&qi(neg_one_pow((r + k + 1) as i64)));
                    rhs = rhs.add(&term);
                }
                checks.push(Check::of(
                    format!("face-{s:?}-layer-{k}"),
                    lhs == rhs,
                    "structure equation fails",
                ));
            }
        }
        checks
    }

    pub fn is_valid(&self, cocycle: &CechCocycle) -> bool {
        self.validate(cocycle).iter().all(|c| c.status.passed())
    }

    /// The `i`-th face: precompose every injection with the coface skipping
    /// `i`.
    pub fn face(&self, i: usize) -> ConnSimplex {
        assert!(self.m >= 1 && i <= self.m);
        let mut data = BTreeMap::new();
        for s in subsets_of(self.m - 1) {
            let l = s.len() - 1;
            if l > self.n {
                continue;
            }
            let image: Vec<usize> = s.iter().map(|&j| if j < i { j } else { j + 1 }).collect();
            data.insert(s, self.data[&image].clone());
        }
        ConnSimplex { n: self.n, p: self.p, m: self.m - 1, data }
    }

    /// The `i`-th degeneracy: precompose with the codegeneracy collapsing
    /// `i, i+1`; injections hitting both collapse to carried-zero data.
    pub fn degeneracy(&self, i: usize, cocycle: &CechCocycle) -> ConnSimplex {
        assert!(i <= self.m);
        let mut out = ConnSimplex::blank(cocycle, self.p, self.m + 1);
        for s in subsets_of(self.m + 1) {
            let l = s.len() - 1;
            if l > self.n {
                continue;
            }
            let collapsed: Vec<usize> =
                s.iter().map(|&j| if j <= i { j } else { j - 1 }).collect();
            let mut image = collapsed.clone();
            image.dedup();
            if image.len() == collapsed.len() {
                out.data.insert(s, self.data[&image].clone());
            }
        }
        out
    }
}

/// Vertex layers shifted by a family of comparison potentials: layer `k`
/// moves by `(-1)^(k+1) d(pot k-1) + cech(pot k)`, absent potentials dropping
/// out. Shifting preserves the vertex equations because the derivative and
/// the coboundary commute and both square to zero.
fn shifted_layers(
    cocycle: &CechCocycle,
    base: &[FormCochain],
    pots: &[FormCochain],
) -> Vec<FormCochain> {
    let nerve = &cocycle.nerve;
    base.iter()
        .enumerate()
        .map(|(k1, layer)| {
            let k = k1 + 1;
            let mut out = layer.clone();
            if k >= 2 && k - 2 < pots.len() {
                out = out.add(&pots[k - 2].d().scale(&qi(neg_one_pow(k as i64 + 1))));
            }
            if k - 1 < pots.len() {
                out = out.add(&cech_delta(nerve, &pots[k - 1]));
            }
            out
        })
        .collect()
}

fn random_edge_potentials(
    cocycle: &CechCocycle,
    p: usize,
    rng: &mut ChaCha20Rng,
) -> Vec<FormCochain> {
    let n = cocycle.n;
    (1..=layer_count(n, p, 1))
        .map(|k| {
            crate::nerve::random_form_cochain(rng, &cocycle.nerve, n - 1 - k, k, cocycle.dim, 2, 2)
        })
        .collect()
}

/// A valid 1-simplex over the cocycle: source vertex the cocycle's own
/// layers, target vertex shifted by random comparison potentials carried on
/// the edge.
pub fn interpolated_edge(cocycle: &CechCocycle, p: usize, rng: &mut ChaCha20Rng) -> ConnSimplex {
    let n = cocycle.n;
    let base: Vec<FormCochain> = cocycle.a[..layer_count(n, p, 0)].to_vec();
    let pots = random_edge_potentials(cocycle, p, rng);
    let mut s = ConnSimplex::blank(cocycle, p, 1);
    s.data.insert(vec![0], base.clone());
    s.data.insert(vec![1], shifted_layers(cocycle, &base, &pots));
    s.data.insert(vec![0, 1], pots);
    s
}

/// A valid 2-simplex: two independent random edge potential families on the
/// first two edges; the third edge carries their sum, which settles the
/// triangle equation, and any layers of the triangle face itself stay zero.
pub fn interpolated_triangle(
    cocycle: &CechCocycle,
    p: usize,
    rng: &mut ChaCha20Rng,
) -> ConnSimplex {
    let n = cocycle.n;
    let base: Vec<FormCochain> = cocycle.a[..layer_count(n, p, 0)].to_vec();
    let pots01 = random_edge_potentials(cocycle, p, rng);
    let pots12 = random_edge_potentials(cocycle, p, rng);
    let pots02: Vec<FormCochain> =
        pots01.iter().zip(&pots12).map(|(a, b)| a.add(b)).collect();
    let a1 = shifted_layers(cocycle, &base, &pots01);
    let a2 = shifted_layers(cocycle, &a1, &pots12);
    let mut s = ConnSimplex::blank(cocycle, p, 2);
    s.data.insert(vec![0], base);
    s.data.insert(vec![1], a1);
    s.data.insert(vec![2], a2);
    s.data.insert(vec![0, 1], pots01);
    s.data.insert(vec![1, 2], pots12);
    s.data.insert(vec![0, 2], pots02);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_preset_is_a_cocycle() {
        let c = circle_winding(1);
        for chk in c.validate() {
            assert!(chk.status.passed(), "{}: {:?}", chk.name, chk.status);
        }
        // One chart variable: the curvature 2-form vanishes identically.
        assert!(c.curvature().is_zero());
    }

    #[test]
    fn plane_bundle_curvature() {
        let flat = u1_on_plane(0);
        for chk in flat.validate() {
            assert!(chk.status.passed(), "{}: {:?}", chk.name, chk.status);
        }
        assert!(flat.curvature().is_zero());
        let curved = u1_on_plane(3);
        for chk in curved.validate() {
            assert!(chk.status.passed(), "{}: {:?}", chk.name, chk.status);
        }
        let h = curved.curvature();
        let expect = DiffForm::monomial(2, &[0, 1], crate::chart::Poly::constant(2, qi(3)));
        assert_eq!(h, expect);
    }

    #[test]
    fn standard_cocycles_validate_for_higher_degrees() {
        for (n, dim, opens) in [(2usize, 3usize, 4usize), (3, 4, 5)] {
            let c = standard_cocycle(n, dim, opens, 11, Some(2));
            for chk in c.validate() {
                assert!(chk.status.passed(), "n={n} {}: {:?}", chk.name, chk.status);
            }
            let h = c.curvature();
            assert_eq!(h.p, n + 1);
            assert!(!h.is_zero());
            assert!(h.d().is_zero());
        }
    }

    #[test]
    fn vertex_simplices_validate() {
        // Order n (full) and order 1 (truncated) connection data at a
        // vertex.
        let c = standard_cocycle(2, 3, 4, 13, Some(1));
        let v = ConnSimplex::vertex(&c, 2, c.a.clone());
        assert!(v.is_valid(&c), "{:?}", v.validate(&c));
        let v1 = ConnSimplex::vertex(&c, 1, vec![c.a[0].clone()]);
        assert!(v1.is_valid(&c), "{:?}", v1.validate(&c));
        // Breaking the first layer breaks validation.
        let mut bad = c.a.clone();
        bad[0] = bad[0].scale(&qi(2));
        let vb = ConnSimplex::vertex(&c, 2, bad);
        assert!(!vb.is_valid(&c));
    }

    #[test]
    fn edges_interpolate_truncated_connections() {
        // n = 2, p = 1: an edge carries a 1-form potential at level 0 whose
        // coboundary is the difference of the endpoint layers.
        let c = standard_cocycle(2, 3, 4, 17, None);
        let mut rng = ChaCha20Rng::seed_from_u64(18);
        let omega = crate::nerve::random_form_cochain(&mut rng, &c.nerve, 0, 1, c.dim, 2, 2);
        let a0 = c.a[0].clone();
        let a1 = a0.add(&cech_delta(&c.nerve, &omega));
        let mut e = ConnSimplex::blank(&c, 1, 1);
        e.data.insert(vec![0], vec![a0]);
        e.data.insert(vec![1], vec![a1]);
        e.data.insert(vec![0, 1], vec![omega]);
        assert!(e.is_valid(&c), "{:?}", e.validate(&c));

        // Faces are the endpoint vertices.
        let d0 = e.face(0);
        let d1 = e.face(1);
        assert_eq!(d0.layers(&[0]), e.layers(&[1]));
        assert_eq!(d1.layers(&[0]), e.layers(&[0]));
        assert!(d0.is_valid(&c) && d1.is_valid(&c));

        // Degeneracy of a vertex gives a valid edge with zero potential.
        let v = e.face(1);
        let sv = v.degeneracy(0, &c);
        assert!(sv.is_valid(&c));
        assert!(sv.layers(&[0, 1])[0].is_zero());
        assert_eq!(sv.face(0), v);
        assert_eq!(sv.face(1), v);
    }

    #[test]
    fn triangle_of_potentials_validates() {
        // n = 2, p = 1, l = 2: edge potentials must satisfy the triangle
        // relation; the 2-face carries no data of its own.
        let c = standard_cocycle(2, 3, 4, 19, None);
        let mut rng = ChaCha20Rng::seed_from_u64(20);
        let w01 = crate::nerve::random_form_cochain(&mut rng, &c.nerve, 0, 1, c.dim, 2, 2);
        let w12 = crate::nerve::random_form_cochain(&mut rng, &c.nerve, 0, 1, c.dim, 2, 2);
        let w02 = w01.add(&w12);
        let a0 = c.a[0].clone();
        let a1 = a0.add(&cech_delta(&c.nerve, &w01));
        let a2 = a1.add(&cech_delta(&c.nerve, &w12));
        let mut t = ConnSimplex::blank(&c, 1, 2);
        t.data.insert(vec![0], vec![a0]);
        t.data.insert(vec![1], vec![a1]);
        t.data.insert(vec![2], vec![a2]);
        t.data.insert(vec![0, 1], vec![w01]);
        t.data.insert(vec![1, 2], vec![w12]);
        t.data.insert(vec![0, 2], vec![w02]);
        assert!(t.is_valid(&c), "{:?}", t.validate(&c));
        // Skewing one edge potential by a non-closed form breaks it.
        let mut bad = t.clone();
        bad.data.get_mut(&vec![0, 2]).unwrap()[0] =
            bad.layers(&[0, 2])[0].scale(&qi(2));
        assert!(!bad.is_valid(&c));
        // All three faces are valid edges.
        for i in 0..=2 {
            assert!(t.face(i).is_valid(&c));
        }
    }

    #[test]
    fn interpolated_simplices_validate() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for (n, dim, opens, p) in
            [(1usize, 2usize, 3usize, 1usize), (2, 3, 4, 1), (2, 3, 4, 2), (3, 4, 5, 2)]
        {
            let c = standard_cocycle(n, dim, opens, 29 + n as u64, Some(1));
            let e = interpolated_edge(&c, p, &mut rng);
            assert_eq!(e.m, 1);
            assert!(e.is_valid(&c), "edge n={n} p={p}: {:?}", e.validate(&c));
            let t = interpolated_triangle(&c, p, &mut rng);
            assert!(t.is_valid(&c), "triangle n={n} p={p}: {:?}", t.validate(&c));
            for i in 0..=2 {
                assert!(t.face(i).is_valid(&c));
            }
        }
    }
}
