//! A simplicial fattening of the Čech model whose levels are dg Lie
//! algebroids and whose bottom augmentation is a levelwise quasi-isomorphism.
//!
//! Level `m` carries an `(m + 1)`-tuple of model elements over one common
//! anchor together with anchor-kernel corrections indexed by the faces of the
//! `m`-simplex: a correction at a face of dimension `l` is shifted up by `l`.
//! The differential is the entrywise one plus a simplicial cochain part that
//! seeds vertex differences into the edges and pushes each correction into
//! the faces one dimension up, with alternating vertex-insertion signs. The
//! bracket is entrywise on tuples, acts on corrections through the common
//! anchor (any tuple entry gives the same action, which is what the carrier
//! constraint buys), and vanishes on pairs of corrections.
//!
//! Simplicial maps relabel tuple entries directly and sum corrections over
//! all monotone lifts of their face through the relabeling; the diagonal is
//! the augmentation. A monotone-injection-indexed element of connection data
//! over a cocycle and an order-`p` morphism out of the tangent algebroid
//! into a fattening level encode each other, and the converters here realize
//! that correspondence on the nose.

use crate::algebroid::{Algebroid, Check, Element, TangentAlgebroid};
use crate::atiyah::{build_cech_at, CechAtEl, CechAtiyahAlgebroid};
use crate::chart::{DiffForm, VectorField};
use crate::deligne::{CechCocycle, ConnSimplex};
use crate::linalg::QMatrix;
use crate::morphism::{basis_index_words, Component, Morphism};
use crate::scalar::{neg_one_pow, qi, Q};
use num::Zero;
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;
use std::rc::Rc;

/// An element of fattening level `m`: tuple entry `i` sits over vertex `i`,
/// and `pieces[s]` for a sorted vertex subset `s` of size `l + 1 >= 2` is an
/// anchor-kernel correction placed in total degree `(model degree) + l`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResEl {
    pub m: usize,
    pub tuple: Vec<CechAtEl>,
    pub pieces: BTreeMap<Vec<usize>, CechAtEl>,
}

fn add_piece(pieces: &mut BTreeMap<Vec<usize>, CechAtEl>, key: Vec<usize>, v: CechAtEl) {
    if v.is_zero() {
        return;
    }
    let merged = match pieces.remove(&key) {
        Some(cur) => cur.add(&v),
        None => v,
    };
    if !merged.is_zero() {
        pieces.insert(key, merged);
    }
}

impl Element for ResEl {
    fn degree(&self) -> Option<i64> {
        let mut degs: Vec<i64> = Vec::new();
        for e in &self.tuple {
            if let Some(d) = e.degree() {
                degs.push(d);
            }
        }
        for (s, y) in &self.pieces {
            if let Some(d) = y.degree() {
                degs.push(d + s.len() as i64 - 1);
            }
        }
        match degs.first() {
            None => None,
            Some(&d) if degs.iter().all(|&x| x == d) => Some(d),
            _ => panic!("inhomogeneous element of the simplicial fattening"),
        }
    }

    fn is_zero(&self) -> bool {
        self.tuple.iter().all(|e| e.is_zero()) && self.pieces.values().all(|y| y.is_zero())
    }

    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        let tuple = self.tuple.iter().zip(&other.tuple).map(|(a, b)| a.add(b)).collect();
        let mut pieces = self.pieces.clone();
        pieces.retain(|_, y| !y.is_zero());
        for (s, y) in &other.pieces {
            add_piece(&mut pieces, s.clone(), y.clone());
        }
        ResEl { m: self.m, tuple, pieces }
    }

    fn neg(&self) -> Self {
        ResEl {
            m: self.m,
            tuple: self.tuple.iter().map(|e| e.neg()).collect(),
            pieces: self.pieces.iter().map(|(s, y)| (s.clone(), y.neg())).collect(),
        }
    }

    fn scale(&self, c: &Q) -> Self {
        let mut pieces: BTreeMap<Vec<usize>, CechAtEl> =
            self.pieces.iter().map(|(s, y)| (s.clone(), y.scale(c))).collect();
        pieces.retain(|_, y| !y.is_zero());
        ResEl { m: self.m, tuple: self.tuple.iter().map(|e| e.scale(c)).collect(), pieces }
    }
}

/// One level of the fattening over a fixed Čech model.
#[derive(Clone, Debug)]
pub struct ResolvedAlgebroid {
    pub base: CechAtiyahAlgebroid,
    pub m: usize,
}

pub fn build_resolution(cocycle: &CechCocycle, m: usize) -> ResolvedAlgebroid {
    ResolvedAlgebroid { base: build_cech_at(cocycle), m }
}

impl ResolvedAlgebroid {
    pub fn zero_el(&self) -> ResEl {
        ResEl {
            m: self.m,
            tuple: vec![self.base.zero_el(); self.m + 1],
            pieces: BTreeMap::new(),
        }
    }

    /// The augmentation: a model element placed diagonally, no corrections.
    pub fn augment(&self, v: &CechAtEl) -> ResEl {
        ResEl { m: self.m, tuple: vec![v.clone(); self.m + 1], pieces: BTreeMap::new() }
    }

    /// A single correction supported on one face.
    pub fn piece_el(&self, s: &[usize], y: &CechAtEl) -> ResEl {
        assert!(s.len() >= 2 && s.windows(2).all(|w| w[0] < w[1]) && *s.last().unwrap() <= self.m);
        assert!(y.x.is_zero(), "corrections live in the anchor kernel");
        let mut out = self.zero_el();
        add_piece(&mut out.pieces, s.to_vec(), y.clone());
        out
    }

    fn d(&self, el: &ResEl) -> ResEl {
        let mut out = self.zero_el();
        let mut tuple_deg: Option<i64> = None;
        for (i, e) in el.tuple.iter().enumerate() {
            out.tuple[i] = self.base.differential(e);
            if tuple_deg.is_none() {
                tuple_deg = e.degree();
            }
        }
        if let Some(xd) = tuple_deg {
            let s0 = qi(-neg_one_pow(xd));
            for a in 0..=self.m {
                for b in (a + 1)..=self.m {
                    let diff = el.tuple[b].sub(&el.tuple[a]).scale(&s0);
                    add_piece(&mut out.pieces, vec![a, b], diff);
                }
            }
        }
        for (s, y) in &el.pieces {
            add_piece(&mut out.pieces, s.clone(), self.base.differential(y));
            let l = s.len() as i64 - 1;
            let ydeg = y.degree().unwrap_or(0);
            let lead = -neg_one_pow(ydeg + l);
            for v in 0..=self.m {
                if s.binary_search(&v).is_ok() {
                    continue;
                }
                let q = s.iter().position(|&u| u > v).unwrap_or(s.len());
                let mut big = s.clone();
                big.insert(q, v);
                add_piece(&mut out.pieces, big, y.scale(&qi(lead * neg_one_pow(q as i64))));
            }
        }
        out
    }

    fn b2(&self, a: &ResEl, b: &ResEl) -> ResEl {
        let mut out = self.zero_el();
        for i in 0..=self.m {
            out.tuple[i] = self.base.bracket(&[a.tuple[i].clone(), b.tuple[i].clone()]);
        }
        if a.tuple.iter().any(|e| !e.is_zero()) {
            for (s, y) in &b.pieces {
                let v = self.base.bracket(&[a.tuple[s[0]].clone(), y.clone()]);
                add_piece(&mut out.pieces, s.clone(), v);
            }
        }
        if b.tuple.iter().any(|e| !e.is_zero()) {
            let adeg = a.degree().unwrap_or(0);
            let bdeg = b.degree().unwrap_or(0);
            let sign = qi(-neg_one_pow(adeg * bdeg));
            for (s, y) in &a.pieces {
                let v = self.base.bracket(&[b.tuple[s[0]].clone(), y.clone()]).scale(&sign);
                add_piece(&mut out.pieces, s.clone(), v);
            }
        }
        out
    }

    /// Pullback along a monotone map into `[self.m]` given by its value
    /// list; the result lives at level `alpha.len() - 1`. Tuple entries
    /// relabel; a correction lands on every monotone lift of its face.
    pub fn simplicial_map(&self, el: &ResEl, alpha: &[usize]) -> ResEl {
        assert_eq!(el.m, self.m);
        assert!(alpha.windows(2).all(|w| w[0] <= w[1]) && *alpha.last().unwrap() <= self.m);
        let mut out = ResEl {
            m: alpha.len() - 1,
            tuple: alpha.iter().map(|&v| el.tuple[v].clone()).collect(),
            pieces: BTreeMap::new(),
        };
        for (s, y) in &el.pieces {
            let mut lifts: Vec<Vec<usize>> = vec![Vec::new()];
            for &v in s {
                let pre: Vec<usize> = (0..alpha.len()).filter(|&j| alpha[j] == v).collect();
                if pre.is_empty() {
                    lifts.clear();
                    break;
                }
                lifts = lifts
                    .iter()
                    .flat_map(|prefix| {
                        pre.iter().map(move |&j| {
                            let mut ext = prefix.clone();
                            ext.push(j);
                            ext
                        })
                    })
                    .collect();
            }
            for lift in lifts {
                add_piece(&mut out.pieces, lift, y.clone());
            }
        }
        out
    }

    pub fn face_at(&self, el: &ResEl, i: usize) -> ResEl {
        assert!(self.m >= 1 && i <= self.m);
        let alpha: Vec<usize> = (0..=self.m).filter(|&j| j != i).collect();
        self.simplicial_map(el, &alpha)
    }

    pub fn degeneracy_at(&self, el: &ResEl, i: usize) -> ResEl {
        assert!(i <= self.m);
        let alpha: Vec<usize> = (0..=self.m + 1).map(|j| if j <= i { j } else { j - 1 }).collect();
        self.simplicial_map(el, &alpha)
    }

    /// The filler of a level-one matching pair: two bottom elements with a
    /// common anchor become the ends of an edge, corrections free (zero).
    pub fn fill_matching_m1(&self, g0: &ResEl, g1: &ResEl) -> Option<ResEl> {
        assert_eq!(self.m, 1);
        assert_eq!((g0.m, g1.m), (0, 0));
        if g0.tuple[0].x != g1.tuple[0].x {
            return None;
        }
        let mut out = self.zero_el();
        out.tuple[0] = g1.tuple[0].clone();
        out.tuple[1] = g0.tuple[0].clone();
        Some(out)
    }

    /// The filler of a level-two matching triple `(g0, g1, g2)` of edges
    /// satisfying the simplicial compatibilities `d_i g_j = d_(j-1) g_i`;
    /// the triple-face correction is free (zero).
    pub fn fill_matching_m2(&self, g0: &ResEl, g1: &ResEl, g2: &ResEl) -> Option<ResEl> {
        assert_eq!(self.m, 2);
        assert_eq!((g0.m, g1.m, g2.m), (1, 1, 1));
        let x0 = &g1.tuple[0];
        let x1 = &g2.tuple[1];
        let x2 = &g0.tuple[1];
        if g2.tuple[0] != *x0 || g0.tuple[0] != *x1 || g1.tuple[1] != *x2 {
            return None;
        }
        let mut out = self.zero_el();
        out.tuple = vec![x0.clone(), x1.clone(), x2.clone()];
        for (s, g) in [(vec![1, 2], g0), (vec![0, 2], g1), (vec![0, 1], g2)] {
            if let Some(z) = g.pieces.get(&vec![0, 1]) {
                add_piece(&mut out.pieces, s, z.clone());
            }
        }
        Some(out)
    }
}

impl Algebroid for ResolvedAlgebroid {
    type El = ResEl;

    fn max_arity(&self) -> usize {
        2
    }

    fn bracket(&self, args: &[ResEl]) -> ResEl {
        match args.len() {
            1 => self.d(&args[0]),
            2 => self.b2(&args[0], &args[1]),
            _ => self.zero_el(),
        }
    }

    fn anchor(&self, e: &ResEl) -> VectorField {
        e.tuple[0].x.clone()
    }

    fn chart_dim(&self) -> usize {
        self.base.chart_dim()
    }

    fn act(&self, f: &crate::chart::Poly, e: &ResEl) -> ResEl {
        let mut pieces: BTreeMap<Vec<usize>, CechAtEl> =
            e.pieces.iter().map(|(s, y)| (s.clone(), self.base.act(f, y))).collect();
        pieces.retain(|_, y| !y.is_zero());
        ResEl {
            m: e.m,
            tuple: e.tuple.iter().map(|v| self.base.act(f, v)).collect(),
            pieces,
        }
    }

    fn zero(&self) -> ResEl {
        self.zero_el()
    }

    fn sample_elements(&self, rng: &mut ChaCha20Rng) -> Vec<ResEl> {
        let base_pool = self.base.sample_elements(rng);
        let kernels: Vec<CechAtEl> =
            base_pool.iter().filter(|v| v.x.is_zero()).cloned().collect();
        let mut pool = Vec::new();
        for v in base_pool.iter().take(3) {
            pool.push(self.augment(v));
        }
        for v in &kernels {
            pool.push(self.augment(v));
        }
        if self.m >= 1 && !kernels.is_empty() {
            // A non-diagonal carrier tuple: entries share the anchor but
            // differ by a kernel element.
            let mut el = self.augment(&base_pool[0]);
            el.tuple[1] = el.tuple[1].add(&kernels[0]);
            pool.push(el);
        }
        for size in 2..=(self.m + 1).min(3) {
            let s: Vec<usize> = (0..size).collect();
            for y in kernels.iter().take(2) {
                pool.push(self.piece_el(&s, y));
            }
        }
        pool
    }
}

/// Rank bookkeeping for the vertex-insertion label complex with rational
/// coefficients: one basis vector per face of the `m`-simplex, differential
/// the alternating sum over vertex insertions. Exactness above the bottom,
/// and a one-dimensional bottom kernel, are the rank skeleton of the
/// augmentation being a quasi-isomorphism at level `m`: the full
/// differential only adds the entrywise model differential and per-level
/// sign twists, which change no ranks.
pub fn insertion_exactness(m: usize) -> Vec<Check> {
    let mut levels: Vec<Vec<Vec<usize>>> = vec![Vec::new(); m + 1];
    for mask in 1u32..(1 << (m + 1)) {
        let s: Vec<usize> = (0..=m).filter(|i| mask & (1 << i) != 0).collect();
        levels[s.len() - 1].push(s);
    }
    for lv in &mut levels {
        lv.sort();
    }
    let index: Vec<BTreeMap<Vec<usize>, usize>> = levels
        .iter()
        .map(|lv| lv.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
        .collect();
    let mats: Vec<QMatrix> = (0..m)
        .map(|l| {
            let mut mat = QMatrix::zero(levels[l + 1].len(), levels[l].len());
            for (row, t) in levels[l + 1].iter().enumerate() {
                for q in 0..t.len() {
                    let mut s = t.clone();
                    s.remove(q);
                    let col = index[l][&s];
                    *mat.at_mut(row, col) = mat.at(row, col) + qi(neg_one_pow(q as i64));
                }
            }
            mat
        })
        .collect();

    let mut checks = Vec::new();
    let mut comp_ok = true;
    for l in 0..m.saturating_sub(1) {
        let prod = mats[l + 1].mul(&mats[l]);
        for i in 0..levels[l + 2].len() {
            for j in 0..levels[l].len() {
                if !prod.at(i, j).is_zero() {
                    comp_ok = false;
                }
            }
        }
    }
    checks.push(Check::of(
        format!("insertion-square-zero-m{m}"),
        comp_ok,
        "consecutive insertion differentials do not compose to zero",
    ));

    let bottom_ok = if m == 0 { true } else { mats[0].rank() == m };
    checks.push(Check::of(
        format!("insertion-bottom-kernel-m{m}"),
        bottom_ok,
        "bottom kernel is not the diagonal line",
    ));

    for l in 1..=m {
        let out_rank = if l < m { mats[l].rank() } else { 0 };
        let ok = mats[l - 1].rank() + out_rank == levels[l].len();
        checks.push(Check::of(
            format!("insertion-exact-dim-{l}-m{m}"),
            ok,
            "closed labels are not exactly the inserted ones",
        ));
    }
    checks
}

/// The order-`p` morphism out of the tangent algebroid encoded by an
/// `m`-simplex of connection data: weight `w` contracts the word into the
/// `w`-form layer of every face and files the value in the slot whose model
/// degree matches; the weight-one tuple rides the field itself.
pub fn simplex_to_morphism<'a>(
    tan: &'a TangentAlgebroid,
    res: &'a ResolvedAlgebroid,
    simplex: &ConnSimplex,
) -> Morphism<'a, TangentAlgebroid, ResolvedAlgebroid> {
    assert_eq!(res.m, simplex.m);
    assert_eq!(res.base.cocycle.n, simplex.n);
    assert_eq!(res.base.cocycle.dim, tan.dim);
    let n = simplex.n;
    let mut comps: Vec<Component<'a, TangentAlgebroid, ResolvedAlgebroid>> = Vec::new();
    for w in 1..=simplex.p {
        let sx = simplex.clone();
        let resc = res.clone();
        comps.push(Rc::new(move |word: &[VectorField]| {
            debug_assert_eq!(word.len(), w);
            let fields: Vec<&VectorField> = word.iter().collect();
            let mut out = resc.zero_el();
            for (s, layers) in &sx.data {
                if w > layers.len() {
                    continue;
                }
                let ev = layers[w - 1].map(|form| DiffForm::from_fn(form.eval_fields(&fields)));
                let r = s.len() - 1;
                if r == 0 {
                    let entry = &mut out.tuple[s[0]];
                    if w == 1 {
                        entry.x = word[0].clone();
                        entry.e = ev;
                    } else {
                        entry.lower[n - w] = ev;
                    }
                } else {
                    let mut y = resc.base.zero_el();
                    y.lower[n - w - r] = ev;
                    add_piece(&mut out.pieces, s.clone(), y);
                }
            }
            out
        }));
    }
    Morphism::new(tan, res, comps)
}

/// Reads the connection data back off a morphism into a fattening level:
/// every carried layer coefficient is the matching slot of the component's
/// value on the increasing basis-field word.
pub fn morphism_to_simplex(
    phi: &Morphism<TangentAlgebroid, ResolvedAlgebroid>,
    p: usize,
) -> ConnSimplex {
    let res = phi.target;
    let cocycle = &res.base.cocycle;
    let n = cocycle.n;
    let dim = cocycle.dim;
    let mut out = ConnSimplex::blank(cocycle, p, res.m);
    for w in 1..=p {
        for idx in basis_index_words(dim, &vec![-1; dim], w) {
            let word: Vec<VectorField> =
                idx.iter().map(|&i| VectorField::basis(dim, i)).collect();
            let val = phi.component(&word);
            let idx8: Vec<u8> = idx.iter().map(|&i| i as u8).collect();
            for (s, layers) in out.data.iter_mut() {
                if w > layers.len() {
                    continue;
                }
                let r = s.len() - 1;
                let coch = if r == 0 {
                    let entry = &val.tuple[s[0]];
                    if w == 1 {
                        &entry.e
                    } else {
                        &entry.lower[n - w]
                    }
                } else {
                    match val.pieces.get(s) {
                        Some(y) => &y.lower[n - w - r],
                        None => continue,
                    }
                };
                for (f, form) in coch.vals.iter().enumerate() {
                    layers[w - 1].vals[f].add_monomial(&idx8, form.as_fn());
                }
            }
        }
    }
    out
}

/// Postcomposition of a morphism into level `m` with the pullback along a
/// monotone value list, landing in the given lower level.
pub fn postcompose_simplicial<'a>(
    phi: &Morphism<'a, TangentAlgebroid, ResolvedAlgebroid>,
    alpha: &[usize],
    target: &'a ResolvedAlgebroid,
) -> Morphism<'a, TangentAlgebroid, ResolvedAlgebroid> {
    assert_eq!(target.m, alpha.len() - 1);
    let mut comps: Vec<Component<'a, TangentAlgebroid, ResolvedAlgebroid>> = Vec::new();
    for _ in 1..=phi.order() {
        let phic = phi.clone();
        let a = alpha.to_vec();
        comps.push(Rc::new(move |word: &[VectorField]| {
            phic.target.simplicial_map(&phic.component(word), &a)
        }));
    }
    Morphism::new(phi.source, target, comps)
}

/// Degree-zero values of the weight-one component must satisfy the model's
/// membership equation entrywise; this is the one vertex condition the
/// defect cannot see, since the model differential vanishes in degree zero.
pub fn membership_check(
    phi: &Morphism<TangentAlgebroid, ResolvedAlgebroid>,
    rng: &mut ChaCha20Rng,
) -> Check {
    let mut fields: Vec<VectorField> = (0..phi.source.dim.min(3))
        .map(|i| VectorField::basis(phi.source.dim, i))
        .collect();
    fields.push(crate::chart::random_field(rng, phi.source.dim, 2, 2));
    for x in &fields {
        let v = phi.component(std::slice::from_ref(x));
        for entry in &v.tuple {
            if !phi.target.base.is_member(entry) {
                return Check::fail(
                    "weight-one-membership",
                    "a tuple entry misses the membership equation",
                );
            }
        }
    }
    Check::pass("weight-one-membership")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{jacobi_defect, verify_linfty, VerifyOptions};
    use crate::deligne::{
        interpolated_edge, interpolated_triangle, standard_cocycle, u1_on_plane,
    };
    use crate::morphism::{check_order, MorphismCheckOptions};
    use crate::nerve::{cech_delta, random_form_cochain};
    use rand::SeedableRng;

    fn test_cocycle(n: usize) -> CechCocycle {
        match n {
            1 => u1_on_plane(2),
            _ => standard_cocycle(n, n + 1, n + 2, 71 + n as u64, Some(1)),
        }
    }

    #[test]
    fn fattening_levels_verify_as_dg_algebroids() {
        for n in [1usize, 2] {
            let cocycle = test_cocycle(n);
            for m in 0..=2 {
                let res = build_resolution(&cocycle, m);
                let mut rng = ChaCha20Rng::seed_from_u64(100 + m as u64);
                let opts = VerifyOptions { samples_per_weight: 4, ..Default::default() };
                for chk in verify_linfty(&res, &mut rng, &opts) {
                    assert!(
                        chk.status.passed(),
                        "n={n} m={m} {}: {:?}",
                        chk.name,
                        chk.status
                    );
                }
            }
        }
    }

    #[test]
    fn differential_squares_to_zero_on_deep_levels() {
        let cocycle = test_cocycle(2);
        let res = build_resolution(&cocycle, 3);
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for el in res.sample_elements(&mut rng) {
            let dd = res.differential(&res.differential(&el));
            assert!(dd.is_zero(), "degree {:?}", el.degree());
            assert!(jacobi_defect(&res, std::slice::from_ref(&el)).is_zero());
        }
    }

    #[test]
    fn simplicial_maps_are_chain_maps_and_bracket_morphisms() {
        let cocycle = test_cocycle(2);
        let res2 = build_resolution(&cocycle, 2);
        let res1 = build_resolution(&cocycle, 1);
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let pool = res2.sample_elements(&mut rng);
        for el in &pool {
            for i in 0..=2 {
                let lhs = res1.differential(&res2.face_at(el, i));
                let rhs = res2.face_at(&res2.differential(el), i);
                assert_eq!(lhs, rhs, "face {i} vs differential");
            }
            let up = res2.degeneracy_at(el, 1);
            let res3 = build_resolution(&cocycle, 3);
            assert_eq!(res3.differential(&up), res2.degeneracy_at(&res2.differential(el), 1));
        }
        for a in pool.iter().take(4) {
            for b in pool.iter().take(4) {
                let br = res2.bracket(&[a.clone(), b.clone()]);
                for i in 0..=2 {
                    let lhs = res1.bracket(&[res2.face_at(a, i), res2.face_at(b, i)]);
                    assert_eq!(lhs, res2.face_at(&br, i), "face {i} vs bracket");
                }
            }
        }
        // Simplicial identities on faces and degeneracies.
        for el in pool.iter().take(5) {
            for j in 1..=2usize {
                for i in 0..j {
                    let lhs = res1.face_at(&res2.face_at(el, j), i);
                    let rhs = res1.face_at(&res2.face_at(el, i), j - 1);
                    assert_eq!(lhs, rhs, "d_{i} d_{j}");
                }
            }
            for i in 0..=1usize {
                let y = res2.face_at(el, 2);
                let up = res1.degeneracy_at(&y, i);
                assert_eq!(res2.face_at(&up, i), y, "d_{i} s_{i}");
                assert_eq!(res2.face_at(&up, i + 1), y, "d_{} s_{i}", i + 1);
            }
        }
    }

    #[test]
    fn augmentation_is_a_chain_map_with_exact_label_complex() {
        let cocycle = test_cocycle(1);
        let res = build_resolution(&cocycle, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for v in res.base.sample_elements(&mut rng) {
            let lhs = res.differential(&res.augment(&v));
            let rhs = res.augment(&res.base.differential(&v));
            assert_eq!(lhs, rhs);
        }
        let pool = res.base.sample_elements(&mut rng);
        for a in pool.iter().take(3) {
            for b in pool.iter().take(3) {
                let lhs = res.bracket(&[res.augment(a), res.augment(b)]);
                let rhs = res.augment(&res.base.bracket(&[a.clone(), b.clone()]));
                assert_eq!(lhs, rhs);
            }
        }
        for m in 0..=3 {
            for chk in insertion_exactness(m) {
                assert!(chk.status.passed(), "m={m} {}: {:?}", chk.name, chk.status);
            }
        }
    }

    #[test]
    fn correction_action_factors_through_the_anchor() {
        let cocycle = test_cocycle(2);
        let res = build_resolution(&cocycle, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let base_pool = res.base.sample_elements(&mut rng);
        let kernel = base_pool.iter().find(|v| v.x.is_zero()).unwrap();
        let mut xi = res.augment(&base_pool[0]);
        xi.tuple[2] = xi.tuple[2].add(kernel);
        let s = vec![0usize, 2];
        let piece = res.piece_el(&s, kernel);
        let br = res.bracket(&[xi.clone(), piece]);
        for &entry in &s {
            let direct = res.base.bracket(&[xi.tuple[entry].clone(), kernel.clone()]);
            assert_eq!(br.pieces.get(&s), Some(&direct), "entry {entry}");
        }
    }

    #[test]
    fn matching_families_fill() {
        let cocycle = test_cocycle(2);
        let res0 = build_resolution(&cocycle, 0);
        let res1 = build_resolution(&cocycle, 1);
        let res2 = build_resolution(&cocycle, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let anchor = crate::chart::random_field(&mut rng, cocycle.dim, 2, 2);
        let kernels: Vec<CechAtEl> = res0
            .base
            .sample_elements(&mut rng)
            .into_iter()
            .filter(|v| v.x.is_zero() && v.degree() == Some(0))
            .collect();
        let horiz = res0.base.horizontal(&anchor);

        // Level one: any two bottom elements over one anchor bound an edge.
        let g0 = res0.augment(&horiz);
        let g1 = res0.augment(&horiz.add(&kernels[0]));
        let x = res1.fill_matching_m1(&g0, &g1).expect("common anchor fills");
        assert_eq!(res1.face_at(&x, 0), g0);
        assert_eq!(res1.face_at(&x, 1), g1);
        let other = res0.augment(&res0.base.horizontal(&VectorField::basis(cocycle.dim, 0)));
        assert!(res1.fill_matching_m1(&g0, &other).is_none());

        // Level two: a compatible triple of edges built from independent
        // corner and correction data fills, faces landing on the nose.
        let corners: Vec<CechAtEl> = vec![
            horiz.clone(),
            horiz.add(&kernels[0]),
            horiz.add(&kernels[0].scale(&qi(2))),
        ];
        let zs: Vec<CechAtEl> = (0..3)
            .map(|k| {
                let c = cech_delta(
                    &cocycle.nerve,
                    &random_form_cochain(&mut rng, &cocycle.nerve, cocycle.n - 2, 0, cocycle.dim, 2, 2),
                );
                let mut y = res0.base.zero_el();
                y.e = c.scale(&qi(k + 1));
                y
            })
            .collect();
        let edge = |a: &CechAtEl, b: &CechAtEl, z: &CechAtEl| {
            let mut e = res1.zero_el();
            e.tuple = vec![a.clone(), b.clone()];
            add_piece(&mut e.pieces, vec![0, 1], z.clone());
            e
        };
        let g0 = edge(&corners[1], &corners[2], &zs[0]);
        let g1 = edge(&corners[0], &corners[2], &zs[1]);
        let g2 = edge(&corners[0], &corners[1], &zs[2]);
        let x = res2.fill_matching_m2(&g0, &g1, &g2).expect("compatible triple fills");
        assert_eq!(res2.face_at(&x, 0), g0);
        assert_eq!(res2.face_at(&x, 1), g1);
        assert_eq!(res2.face_at(&x, 2), g2);
        // An incompatible triple is rejected.
        let bad = edge(&corners[1], &corners[1], &zs[0]);
        assert!(res2.fill_matching_m2(&bad, &g1, &g2).is_none());
    }

    fn simplex_for(cocycle: &CechCocycle, p: usize, l: usize, rng: &mut ChaCha20Rng) -> ConnSimplex {
        match l {
            0 => ConnSimplex::vertex(
                cocycle,
                p,
                cocycle.a[..crate::deligne::layer_count(cocycle.n, p, 0)].to_vec(),
            ),
            1 => interpolated_edge(cocycle, p, rng),
            _ => interpolated_triangle(cocycle, p, rng),
        }
    }

    #[test]
    fn simplices_encode_order_p_morphisms() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        for n in [1usize, 2] {
            let cocycle = test_cocycle(n);
            let tan = TangentAlgebroid { dim: cocycle.dim };
            for p in 1..=n {
                for l in 0..=2usize {
                    let sx = simplex_for(&cocycle, p, l, &mut rng);
                    assert!(sx.is_valid(&cocycle), "n={n} p={p} l={l}");
                    let res = build_resolution(&cocycle, l);
                    let phi = simplex_to_morphism(&tan, &res, &sx);
                    let opts = MorphismCheckOptions { samples_per_weight: 4, ..Default::default() };
                    for chk in check_order(&phi, &mut rng, &opts) {
                        assert!(
                            chk.status.passed(),
                            "n={n} p={p} l={l} {}: {:?}",
                            chk.name,
                            chk.status
                        );
                    }
                    assert!(membership_check(&phi, &mut rng).status.passed());
                    assert_eq!(morphism_to_simplex(&phi, p), sx, "n={n} p={p} l={l}");
                }
            }
        }
    }

    #[test]
    fn invalid_simplices_fail_on_the_morphism_side() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        // A broken vertex layer (n = 1): the defect is silent in weight one,
        // so only the membership equation can catch it, and it does.
        let c1 = test_cocycle(1);
        let tan1 = TangentAlgebroid { dim: c1.dim };
        let res0 = build_resolution(&c1, 0);
        let bad_vertex = ConnSimplex::vertex(&c1, 1, vec![c1.a[0].scale(&qi(3))]);
        assert!(!bad_vertex.is_valid(&c1));
        let phi = simplex_to_morphism(&tan1, &res0, &bad_vertex);
        assert!(!membership_check(&phi, &mut rng).status.passed());

        // A skewed edge potential (n = 2): the weight-one defect sees it.
        let c2 = test_cocycle(2);
        let tan2 = TangentAlgebroid { dim: c2.dim };
        let res1 = build_resolution(&c2, 1);
        let mut edge = interpolated_edge(&c2, 2, &mut rng);
        let skew = random_form_cochain(&mut rng, &c2.nerve, 0, 1, c2.dim, 2, 2);
        let pots = edge.data.get_mut(&vec![0, 1]).unwrap();
        pots[0] = pots[0].add(&skew);
        assert!(!edge.is_valid(&c2));
        let phi = simplex_to_morphism(&tan2, &res1, &edge);
        let opts = MorphismCheckOptions { samples_per_weight: 4, ..Default::default() };
        let failed: Vec<String> = check_order(&phi, &mut rng, &opts)
            .into_iter()
            .filter(|c| !c.status.passed())
            .map(|c| c.name)
            .collect();
        // Both structure equations of the edge involve its potential, so the
        // defect fails in both weights and nowhere else.
        assert!(failed.contains(&"mc-defect-weight-1".to_string()), "{failed:?}");
        assert!(failed.iter().all(|n| n.starts_with("mc-defect-weight-")), "{failed:?}");
    }

    #[test]
    fn the_correspondence_is_simplicial() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let cocycle = test_cocycle(2);
        let tan = TangentAlgebroid { dim: cocycle.dim };
        let sx = interpolated_triangle(&cocycle, 2, &mut rng);
        let res2 = build_resolution(&cocycle, 2);
        let res1 = build_resolution(&cocycle, 1);
        let res3 = build_resolution(&cocycle, 3);
        let phi = simplex_to_morphism(&tan, &res2, &sx);
        let words: Vec<Vec<VectorField>> = vec![
            vec![VectorField::basis(cocycle.dim, 0)],
            vec![crate::chart::random_field(&mut rng, cocycle.dim, 2, 2)],
            vec![VectorField::basis(cocycle.dim, 1), VectorField::basis(cocycle.dim, 2)],
            vec![
                crate::chart::random_field(&mut rng, cocycle.dim, 2, 2),
                VectorField::basis(cocycle.dim, 0),
            ],
        ];
        for i in 0..=2usize {
            let alpha: Vec<usize> = (0..=2).filter(|&j| j != i).collect();
            let direct = simplex_to_morphism(&tan, &res1, &sx.face(i));
            let routed = postcompose_simplicial(&phi, &alpha, &res1);
            for wd in &words {
                assert_eq!(direct.component(wd), routed.component(wd), "face {i}");
            }
        }
        for i in 0..=2usize {
            let alpha: Vec<usize> = (0..=3).map(|j| if j <= i { j } else { j - 1 }).collect();
            let direct = simplex_to_morphism(&tan, &res3, &sx.degeneracy(i, &cocycle));
            let routed = postcompose_simplicial(&phi, &alpha, &res3);
            for wd in &words {
                assert_eq!(direct.component(wd), routed.component(wd), "degeneracy {i}");
            }
        }
    }
}
