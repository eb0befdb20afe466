//! Morphisms of homotopy Lie algebroids up to a finite order.
//!
//! A morphism of order `p` is a family of function-multilinear components
//! `phi_w` for weights `1..=p`, each mapping weight-`w` words of the source to
//! elements of the target with an overall degree of `+1` against shifted
//! degrees. The defining condition is Maurer-Cartan: the homological defect
//!
//! `D(phi)(w) = d(phi(w)) - phi(delta w) + sum_{m>=2} (1/m!) [phi,..,phi]_m(w)`
//!
//! vanishes on words of weight up to `p`. At weight `p+1` the defect is the
//! curvature of the truncated morphism; it obstructs extension by one more
//! order, and solvability of the linear extension problem is decided here by
//! exact linear algebra over a bounded polynomial ansatz.

use crate::algebroid::{
    ce_differential, sample_words, shifted_bracket, shifted_degree, Algebroid, Check, Coordinates,
    Element,
};
use crate::chart::{monomials_up_to, Poly};
use crate::combinatorics::{concat_perm, koszul_sign, ordered_partitions};
use crate::linalg::QMatrix;
use crate::scalar::{factorial, neg_one_pow, qi, Q};
use num::{One, Zero};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;
use std::rc::Rc;

/// One weight component: a multilinear map from source words to target
/// elements.
pub type Component<'a, S, T> =
    Rc<dyn Fn(&[<S as Algebroid>::El]) -> <T as Algebroid>::El + 'a>;

/// A morphism given by components for weights `1..=order`.
pub struct Morphism<'a, S: Algebroid, T: Algebroid> {
    pub source: &'a S,
    pub target: &'a T,
    comps: Vec<Component<'a, S, T>>,
}

impl<'a, S: Algebroid, T: Algebroid> Clone for Morphism<'a, S, T> {
    fn clone(&self) -> Self {
        Morphism { source: self.source, target: self.target, comps: self.comps.clone() }
    }
}

impl<'a, S: Algebroid, T: Algebroid> Morphism<'a, S, T> {
    pub fn new(source: &'a S, target: &'a T, comps: Vec<Component<'a, S, T>>) -> Self {
        Morphism { source, target, comps }
    }

    /// Strict morphism: a single linear component.
    pub fn strict(
        source: &'a S,
        target: &'a T,
        linear: impl Fn(&S::El) -> T::El + 'a,
    ) -> Self {
        let comp: Component<'a, S, T> = Rc::new(move |w: &[S::El]| linear(&w[0]));
        Morphism { source, target, comps: vec![comp] }
    }

    pub fn order(&self) -> usize {
        self.comps.len()
    }

    /// Extends by one component of weight `order + 1`.
    pub fn extended(&self, comp: Component<'a, S, T>) -> Self {
        let mut comps = self.comps.clone();
        comps.push(comp);
        Morphism { source: self.source, target: self.target, comps }
    }

    /// Applies the weight-matching component; zero when no component exists.
    pub fn component(&self, word: &[S::El]) -> T::El {
        let w = word.len();
        if w == 0 || w > self.comps.len() {
            return self.target.zero();
        }
        (self.comps[w - 1])(word)
    }

    fn apply_wordsum(&self, terms: &crate::algebroid::WordSum<S::El>) -> T::El {
        let mut acc = self.target.zero();
        for (c, w) in terms {
            let v = self.component(w);
            if !v.is_zero() {
                acc = acc.add(&v.scale(c));
            }
        }
        acc
    }

    /// The homological part of the defect on one word:
    /// `d_target(phi(w)) - phi(delta_source(w))`.
    pub fn d_hom(&self, word: &[S::El]) -> T::El {
        let direct = self.target.differential(&self.component(word));
        let pulled = self.apply_wordsum(&ce_differential(self.source, word));
        direct.sub(&pulled)
    }

    /// The `m`-fold bracket of the morphism with itself on one word:
    /// the sum over ordered partitions of the letters into `m` nonempty
    /// blocks, with the unshuffle Koszul sign on shifted degrees, of the
    /// shifted target bracket of the per-block component values. The shifted
    /// bracket is the one symmetric under the same Koszul exchange, so every
    /// reordering of a partition contributes the identical term and the
    /// `1/m!` in the defect reduces the sum to unordered partitions.
    pub fn power_bracket(&self, m: usize, word: &[S::El]) -> T::El {
        let len = word.len();
        let shifted: Vec<i64> = word.iter().map(shifted_degree).collect();
        let mut acc = self.target.zero();
        if m > len {
            return acc;
        }
        for part in ordered_partitions(len, m) {
            let blocks: Vec<&[usize]> = part.iter().map(|b| b.as_slice()).collect();
            let perm = concat_perm(&blocks);
            let sign = koszul_sign(&shifted, &perm);
            let mut args = Vec::with_capacity(m);
            let mut skip = false;
            for b in &part {
                let block: Vec<S::El> = b.iter().map(|&i| word[i].clone()).collect();
                let v = self.component(&block);
                if v.is_zero() {
                    skip = true;
                    break;
                }
                args.push(v);
            }
            if skip {
                continue;
            }
            let bracket = shifted_bracket(self.target, &args);
            if !bracket.is_zero() {
                acc = acc.add(&bracket.scale(&qi(sign)));
            }
        }
        acc
    }

    /// Full Maurer-Cartan defect on one word.
    pub fn mc_defect(&self, word: &[S::El]) -> T::El {
        let mut acc = self.d_hom(word);
        let top = word.len().min(self.target.max_arity());
        for m in 2..=top {
            let v = self.power_bracket(m, word);
            if !v.is_zero() {
                acc = acc.add(&v.scale(&(Q::one() / factorial(m))));
            }
        }
        acc
    }

    /// Curvature: the defect on a word one weight above the order.
    pub fn curvature(&self, word: &[S::El]) -> T::El {
        assert_eq!(word.len(), self.order() + 1);
        self.mc_defect(word)
    }
}

/// Options for [`check_order`].
#[derive(Clone, Debug)]
pub struct MorphismCheckOptions {
    pub samples_per_weight: usize,
    /// Also check function-multilinearity of the components and the anchor
    /// conditions. On for morphisms of algebroid module structures; off for
    /// homotopy morphisms whose components are differential operators (the
    /// transfer inclusions and projections), where neither condition is part
    /// of the definition.
    pub module_conditions: bool,
}

impl Default for MorphismCheckOptions {
    fn default() -> Self {
        MorphismCheckOptions { samples_per_weight: 6, module_conditions: true }
    }
}

/// Verifies the order-`p` morphism conditions on sampled words: component
/// degrees, function-multilinearity, graded symmetry, anchor compatibility
/// (the linear component intertwines anchors, higher components are
/// anchor-killed), and vanishing of the Maurer-Cartan defect through weight
/// `p`. Exact equality throughout.
pub fn check_order<S: Algebroid, T: Algebroid>(
    phi: &Morphism<S, T>,
    rng: &mut ChaCha20Rng,
    opts: &MorphismCheckOptions,
) -> Vec<Check> {
    let p = phi.order();
    let pool = phi.source.sample_elements(rng);
    let dim = phi.source.chart_dim();
    let mut checks = Vec::new();

    let mut deg_ok = true;
    let mut deg_why = String::new();
    for w in 1..=p {
        for word in sample_words(&pool, w, opts.samples_per_weight, rng) {
            let v = phi.component(&word);
            if v.is_zero() {
                continue;
            }
            let expect: i64 = word.iter().map(shifted_degree).sum::<i64>() + 1;
            if v.degree() != Some(expect) {
                deg_ok = false;
                deg_why = format!("weight {w}: got {:?}, expected {expect}", v.degree());
            }
        }
    }
    checks.push(Check::of("component-degrees", deg_ok, deg_why));

    if opts.module_conditions {
        let mut lin_ok = true;
        let mut lin_why = String::new();
        for w in 1..=p {
            for word in sample_words(&pool, w, opts.samples_per_weight / 2 + 1, rng) {
                let f = crate::chart::random_poly(rng, dim, 2, 3);
                let mut scaled = word.clone();
                scaled[0] = phi.source.act(&f, &scaled[0]);
                let lhs = phi.component(&scaled);
                let rhs = phi.target.act(&f, &phi.component(&word));
                if lhs != rhs {
                    lin_ok = false;
                    lin_why = format!("weight {w}");
                }
            }
        }
        checks.push(Check::of("component-function-linearity", lin_ok, lin_why));
    }

    let mut sym_ok = true;
    let mut sym_why = String::new();
    for w in 2..=p {
        for word in sample_words(&pool, w, opts.samples_per_weight / 2 + 1, rng) {
            for i in 0..w - 1 {
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                let s = shifted_degree(&word[i]) * shifted_degree(&word[i + 1]);
                let lhs = phi.component(&swapped);
                let rhs = if neg_one_pow(s) == 1 {
                    phi.component(&word)
                } else {
                    phi.component(&word).neg()
                };
                if lhs != rhs {
                    sym_ok = false;
                    sym_why = format!("weight {w}, slots {i},{}", i + 1);
                }
            }
        }
    }
    checks.push(Check::of("component-graded-symmetry", sym_ok, sym_why));

    if opts.module_conditions {
        let mut anch_ok = true;
        let mut anch_why = String::new();
        for e in &pool {
            let lhs = phi.target.anchor(&phi.component(std::slice::from_ref(e)));
            let rhs = phi.source.anchor(e);
            if lhs != rhs {
                anch_ok = false;
                anch_why = "linear component does not intertwine anchors".into();
            }
        }
        for w in 2..=p {
            for word in sample_words(&pool, w, 3, rng) {
                if !phi.target.anchor(&phi.component(&word)).is_zero() {
                    anch_ok = false;
                    anch_why = format!("weight-{w} component has nonzero anchor");
                }
            }
        }
        checks.push(Check::of("anchor-conditions", anch_ok, anch_why));
    }

    for w in 1..=p {
        let mut ok = true;
        let mut why = String::new();
        for word in sample_words(&pool, w, opts.samples_per_weight, rng) {
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

/// Composition of morphisms: the weight-`m` component of `psi . phi` is the
/// sum over `j` and ordered partitions of the letters into `j` nonempty
/// blocks (divided by `j!`) of `psi_j` applied to the `phi`-values of the
/// blocks, with unshuffle Koszul signs on shifted degrees.
pub fn compose<'a, S: Algebroid, M: Algebroid, T: Algebroid>(
    psi: &Morphism<'a, M, T>,
    phi: &Morphism<'a, S, M>,
    order: usize,
) -> Morphism<'a, S, T> {
    let mut comps: Vec<Component<'a, S, T>> = Vec::new();
    for m in 1..=order {
        let psi = psi.clone();
        let phi = phi.clone();
        let comp: Component<'a, S, T> = Rc::new(move |word: &[S::El]| {
            assert_eq!(word.len(), m);
            let shifted: Vec<i64> = word.iter().map(shifted_degree).collect();
            let mut acc = psi.target.zero();
            for j in 1..=m {
                let mut inner = psi.target.zero();
                for part in ordered_partitions(m, j) {
                    let blocks: Vec<&[usize]> = part.iter().map(|b| b.as_slice()).collect();
                    let perm = concat_perm(&blocks);
                    let sign = koszul_sign(&shifted, &perm);
                    let mut mids = Vec::with_capacity(j);
                    let mut skip = false;
                    for b in &part {
                        let block: Vec<S::El> = b.iter().map(|&i| word[i].clone()).collect();
                        let v = phi.component(&block);
                        if v.is_zero() {
                            skip = true;
                            break;
                        }
                        mids.push(v);
                    }
                    if skip {
                        continue;
                    }
                    let v = psi.component(&mids);
                    if !v.is_zero() {
                        inner = inner.add(&v.scale(&qi(sign)));
                    }
                }
                if !inner.is_zero() {
                    acc = acc.add(&inner.scale(&(Q::one() / factorial(j))));
                }
            }
            acc
        });
        comps.push(comp);
    }
    Morphism::new(phi.source, psi.target, comps)
}

/// Sorts a generator index word by bubble sort, tracking the Koszul sign on
/// the generators' shifted degrees. Returns `None` when the word contains a
/// repeated odd generator (the symmetric word is zero).
pub fn canonical_index_word(indices: &[usize], shifted_degs: &[i64]) -> Option<(i64, Vec<usize>)> {
    let mut idx = indices.to_vec();
    let mut sign = 1i64;
    let n = idx.len();
    for i in 0..n {
        for j in 0..n.saturating_sub(1 + i) {
            if idx[j] > idx[j + 1] {
                sign *= neg_one_pow(shifted_degs[idx[j]] * shifted_degs[idx[j + 1]]);
                idx.swap(j, j + 1);
            }
        }
    }
    for k in 0..n.saturating_sub(1) {
        if idx[k] == idx[k + 1] && shifted_degs[idx[k]] % 2 != 0 {
            return None;
        }
    }
    Some((sign, idx))
}

/// Evaluates a symmetric multilinear map, given by a table on sorted
/// generator index words, on a word of arbitrary elements: each letter is
/// expanded through [`Coordinates::coords`] and coefficients move out front
/// (they have degree zero).
pub fn eval_multilinear<S: Coordinates, T: Algebroid>(
    source: &S,
    target: &T,
    table: &dyn Fn(&[usize]) -> T::El,
    word: &[S::El],
) -> T::El {
    let gens = source.generators();
    let shifted_degs: Vec<i64> = gens.iter().map(shifted_degree).collect();
    let expansions: Vec<Vec<Poly>> = word.iter().map(|e| source.coords(e)).collect();
    let w = word.len();
    let mut acc = target.zero();
    let mut assignment = vec![0usize; w];
    loop {
        let mut coeff = Poly::one(source.chart_dim());
        let mut zero = false;
        for (slot, &g) in assignment.iter().enumerate() {
            let f = &expansions[slot][g];
            if f.is_zero() {
                zero = true;
                break;
            }
            coeff = coeff.mul(f);
        }
        if !zero {
            if let Some((sign, sorted)) = canonical_index_word(&assignment, &shifted_degs) {
                let v = table(&sorted);
                if !v.is_zero() {
                    let term = target.act(&coeff, &v).scale(&qi(sign));
                    acc = acc.add(&term);
                }
            }
        }
        // Next assignment in the product of generator index ranges.
        let mut slot = 0;
        loop {
            if slot == w {
                return acc;
            }
            assignment[slot] += 1;
            if assignment[slot] < gens.len() {
                break;
            }
            assignment[slot] = 0;
            slot += 1;
        }
    }
}

/// Enumerates sorted generator index words of the given length that are not
/// forced to zero by symmetry.
pub fn basis_index_words(gen_count: usize, shifted_degs: &[i64], len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(
        out: &mut Vec<Vec<usize>>,
        cur: &mut Vec<usize>,
        from: usize,
        gen_count: usize,
        shifted_degs: &[i64],
        len: usize,
    ) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for g in from..gen_count {
            if let Some(&prev) = cur.last() {
                if prev == g && shifted_degs[g] % 2 != 0 {
                    continue;
                }
            }
            cur.push(g);
            rec(out, cur, g, gen_count, shifted_degs, len);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, gen_count, shifted_degs, len);
    out
}

/// Outcome of the order-extension decision.
pub struct ExtensionOutcome<'a, S: Algebroid, T: Algebroid> {
    /// Whether the linear extension problem is solvable within the ansatz.
    pub solvable: bool,
    /// The extended morphism when solvable.
    pub extended: Option<Morphism<'a, S, T>>,
}

/// Decides extension to order `p + 1`: builds the curvature of the order-`p`
/// morphism on generator words, poses the linear problem for a symmetric
/// function-multilinear weight-`(p+1)` component whose homological defect
/// cancels it, over target coefficients of polynomial degree at most
/// `ansatz_degree`, and solves it exactly.
pub fn extend_check<'a, S, T>(
    phi: &Morphism<'a, S, T>,
    ansatz_degree: usize,
) -> ExtensionOutcome<'a, S, T>
where
    S: Coordinates,
    T: Coordinates,
    S::El: 'a,
    T::El: 'a,
    S: 'a,
    T: 'a,
{
    let p = phi.order();
    let w = p + 1;
    let source = phi.source;
    let target = phi.target;
    let sgens = source.generators();
    let tgens = target.generators();
    let s_shifted: Vec<i64> = sgens.iter().map(shifted_degree).collect();
    let words = basis_index_words(sgens.len(), &s_shifted, w);
    let monomials = monomials_up_to(source.chart_dim(), ansatz_degree);

    // Unknowns: one rational per (basis word, matching target generator,
    // coefficient monomial).
    let mut unknowns: Vec<(usize, usize, Vec<u8>)> = Vec::new();
    for (wi, iw) in words.iter().enumerate() {
        let out_deg: i64 = iw.iter().map(|&g| s_shifted[g]).sum::<i64>() + 1;
        for (ti, tg) in tgens.iter().enumerate() {
            if tg.degree() != Some(out_deg) {
                continue;
            }
            for m in &monomials {
                unknowns.push((wi, ti, m.clone()));
            }
        }
    }

    // The defect map is linear in the unknown component, so each unknown set
    // to one yields a column; the right-hand side is minus the curvature.
    let mut row_index: BTreeMap<(usize, usize, Vec<u8>), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, Q)>> = Vec::new();
    let mut rhs_entries: Vec<(usize, Q)> = Vec::new();

    let record = |row_index: &mut BTreeMap<(usize, usize, Vec<u8>), usize>,
                      wi: usize,
                      el: &T::El,
                      target: &T,
                      sink: &mut Vec<(usize, Q)>| {
        let coords = target.coords(el);
        for (ti, f) in coords.iter().enumerate() {
            for (mono, c) in &f.terms {
                let key = (wi, ti, mono.clone());
                let next = row_index.len();
                let r = *row_index.entry(key).or_insert(next);
                sink.push((r, c.clone()));
            }
        }
    };

    let defect_of = |comp_table: &dyn Fn(&[usize]) -> T::El, iw: &[usize]| -> T::El {
        let word: Vec<S::El> = iw.iter().map(|&g| sgens[g].clone()).collect();
        // d_target(tau(w)) - tau(delta w), with tau supported in weight w.
        let direct = target.differential(&eval_multilinear(source, target, comp_table, &word));
        let mut pulled = target.zero();
        for (c, w2) in ce_differential(source, &word) {
            if w2.len() != w {
                continue;
            }
            let v = eval_multilinear(source, target, comp_table, &w2);
            if !v.is_zero() {
                pulled = pulled.add(&v.scale(&c));
            }
        }
        direct.sub(&pulled)
    };

    for (uwi, uti, umono) in unknowns.iter() {
        let mono_poly = {
            let mut f = Poly::zero(source.chart_dim());
            f.add_term(umono.clone(), Q::one());
            f
        };
        let unit_table = |iw: &[usize]| -> T::El {
            if iw == words[*uwi].as_slice() {
                target.act(&mono_poly, &tgens[*uti])
            } else {
                target.zero()
            }
        };
        let mut col = Vec::new();
        for (wi, iw) in words.iter().enumerate() {
            let v = defect_of(&unit_table, iw);
            if !v.is_zero() {
                record(&mut row_index, wi, &v, target, &mut col);
            }
        }
        columns.push(col);
    }

    for (wi, iw) in words.iter().enumerate() {
        let word: Vec<S::El> = iw.iter().map(|&g| sgens[g].clone()).collect();
        let curv = phi.curvature(&word);
        if !curv.is_zero() {
            let neg = curv.neg();
            record(&mut row_index, wi, &neg, target, &mut rhs_entries);
        }
    }

    let rows = row_index.len().max(1);
    let mut mat = QMatrix::zero(rows, unknowns.len().max(1));
    for (j, col) in columns.iter().enumerate() {
        for (r, c) in col {
            let cur = mat.at(*r, j).clone();
            *mat.at_mut(*r, j) = cur + c.clone();
        }
    }
    let mut rhs = vec![Q::zero(); rows];
    for (r, c) in &rhs_entries {
        rhs[*r] = rhs[*r].clone() + c.clone();
    }

    let solution = mat.solve(&rhs);
    match solution {
        None => ExtensionOutcome { solvable: false, extended: None },
        Some(sol) => {
            // Materialize the solved component as a table on basis words.
            let mut table: BTreeMap<Vec<usize>, T::El> = BTreeMap::new();
            for (k, (wi, ti, mono)) in unknowns.iter().enumerate() {
                if sol[k].is_zero() {
                    continue;
                }
                let mut f = Poly::zero(source.chart_dim());
                f.add_term(mono.clone(), sol[k].clone());
                let add = target.act(&f, &tgens[*ti]);
                let entry = table.entry(words[*wi].clone()).or_insert_with(|| target.zero());
                *entry = entry.add(&add);
            }
            let comp: Component<'a, S, T> = Rc::new(move |word: &[S::El]| {
                let lookup = |iw: &[usize]| -> T::El {
                    table.get(iw).cloned().unwrap_or_else(|| target.zero())
                };
                eval_multilinear(source, target, &lookup, word)
            });
            let extended = phi.extended(comp);
            ExtensionOutcome { solvable: true, extended: Some(extended) }
        }
    }
}
