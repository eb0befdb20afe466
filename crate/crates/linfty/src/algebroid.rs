//! The homotopy Lie algebroid interface and its Chevalley-Eilenberg word
//! machinery.
//!
//! A structure implements [`Algebroid`] by exposing its graded elements, its
//! antisymmetric multilinear brackets `l_k` (with `l_1` the differential), an
//! anchor to polynomial vector fields, and the module action of chart
//! functions. Everything else here is generic: the shifted (symmetric-word)
//! brackets, the coalgebra differential on words, the generalized Jacobi
//! defect, and the structure verifier.
//!
//! Words live in the shifted symmetric coalgebra: a word is a list of
//! homogeneous elements, and sign bookkeeping uses the shifted degrees
//! (degree minus one). A coderivation squares to zero iff its cogenerator
//! projection does, so the verifier only ever has to compare elements, never
//! normalize formal words.

use crate::chart::{Poly, VectorField};
use crate::combinatorics::{concat_perm, koszul_sign, shuffle_splits};
use crate::scalar::{neg_one_pow, Q};
use rand_chacha::ChaCha20Rng;
use std::fmt::Debug;

/// A graded element with exact equality.
pub trait Element: Clone + PartialEq + Debug {
    /// Cohomological degree; `None` for the zero element, which belongs to
    /// every degree.
    fn degree(&self) -> Option<i64>;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Q) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

/// A homotopy Lie algebroid over a polynomial chart.
pub trait Algebroid {
    type El: Element;

    /// Largest arity with a possibly nonzero bracket; 1 means only the
    /// differential.
    fn max_arity(&self) -> usize;

    /// The antisymmetric bracket `l_k` with `k = args.len()`, of degree
    /// `2 - k`; `l_1` is the differential.
    fn bracket(&self, args: &[Self::El]) -> Self::El;

    /// Anchor to vector fields; zero away from degree 0.
    fn anchor(&self, e: &Self::El) -> VectorField;

    fn chart_dim(&self) -> usize;

    /// Module action of a chart function.
    fn act(&self, f: &Poly, e: &Self::El) -> Self::El;

    fn zero(&self) -> Self::El;

    /// Homogeneous elements for randomized identity checks, covering every
    /// degree of the carrier.
    fn sample_elements(&self, rng: &mut ChaCha20Rng) -> Vec<Self::El>;

    fn differential(&self, e: &Self::El) -> Self::El {
        self.bracket(std::slice::from_ref(e))
    }
}

/// A free-module presentation: homogeneous generators and exact expansion of
/// any element as polynomial coefficients against them. Used by the linear
/// solvers.
pub trait Coordinates: Algebroid {
    fn generators(&self) -> Vec<Self::El>;

    /// Coefficients such that `e` equals the sum of `coords[a]` acting on
    /// `generators()[a]`.
    fn coords(&self, e: &Self::El) -> Vec<Poly>;
}

/// Degree of an element inside the shifted copy (degree minus one); zero
/// elements report 0 and never contribute signs.
pub fn shifted_degree<E: Element>(e: &E) -> i64 {
    e.degree().map(|d| d - 1).unwrap_or(0)
}

/// The shifted symmetric bracket of weight `k` on unshifted arguments:
/// `b_k(x_1, ..., x_k) = (-1)^{sum_i (k-i) |x_i|} l_k(x_1, ..., x_k)`,
/// a degree `+1` operation on the shifted word.
pub fn shifted_bracket<A: Algebroid>(alg: &A, args: &[A::El]) -> A::El {
    let k = args.len();
    let mut exp = 0i64;
    for (i, a) in args.iter().enumerate() {
        let weight = (k - 1 - i) as i64;
        exp += weight * a.degree().unwrap_or(0);
    }
    let v = alg.bracket(args);
    if neg_one_pow(exp) == 1 {
        v
    } else {
        v.neg()
    }
}

/// A formal rational combination of words of homogeneous elements.
pub type WordSum<E> = Vec<(Q, Vec<E>)>;

/// The coalgebra (Chevalley-Eilenberg) differential applied to one word,
/// returned as a formal word sum: for each `j` and each `(j, m-j)` split,
/// the shifted bracket of the first block becomes a new first letter, with
/// the Koszul sign of the unshuffle on shifted degrees.
pub fn ce_differential<A: Algebroid>(alg: &A, word: &[A::El]) -> WordSum<A::El> {
    let m = word.len();
    let shifted: Vec<i64> = word.iter().map(shifted_degree).collect();
    let mut out: WordSum<A::El> = Vec::new();
    for j in 1..=m.min(alg.max_arity()) {
        for (first, rest) in shuffle_splits(m, j) {
            let perm = concat_perm(&[&first, &rest]);
            let sign = koszul_sign(&shifted, &perm);
            let block: Vec<A::El> = first.iter().map(|&i| word[i].clone()).collect();
            let head = shifted_bracket(alg, &block);
            if head.is_zero() {
                continue;
            }
            let mut new_word = Vec::with_capacity(m - j + 1);
            new_word.push(head);
            new_word.extend(rest.iter().map(|&i| word[i].clone()));
            out.push((crate::scalar::qi(sign), new_word));
        }
    }
    out
}

/// The generalized Jacobi defect of a word: the cogenerator projection of the
/// squared coalgebra differential. Identically zero iff the brackets form a
/// homotopy Lie structure (through this weight).
pub fn jacobi_defect<A: Algebroid>(alg: &A, word: &[A::El]) -> A::El {
    let mut acc = alg.zero();
    for (c, w) in ce_differential(alg, word) {
        if w.len() > alg.max_arity() {
            continue;
        }
        let term = shifted_bracket(alg, &w);
        if !term.is_zero() {
            acc = acc.add(&term.scale(&c));
        }
    }
    acc
}

/// Outcome of one named check inside a verification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail(String),
    Inconclusive(String),
}

impl CheckStatus {
    pub fn passed(&self) -> bool {
        matches!(self, CheckStatus::Pass)
    }
}

/// One named check with its outcome.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: CheckStatus::Pass }
    }

    pub fn fail(name: impl Into<String>, why: impl Into<String>) -> Self {
        Check { name: name.into(), status: CheckStatus::Fail(why.into()) }
    }

    pub fn of(name: impl Into<String>, ok: bool, why: impl Into<String>) -> Self {
        if ok {
            Check::pass(name)
        } else {
            Check::fail(name, why)
        }
    }
}

/// Options for [`verify_linfty`].
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Highest word weight for the Jacobi checks; defaults to
    /// `max_arity + 2` when `None`.
    pub weight_cutoff: Option<usize>,
    /// Words sampled per weight.
    pub samples_per_weight: usize,
    /// Also check the chart-module axioms (anchored Leibniz and function
    /// linearity of the higher brackets). Structures whose binary bracket
    /// carries a pairing correction term are homotopy Lie but not anchored
    /// modules in this sense; they verify with this off.
    pub module_axioms: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { weight_cutoff: None, samples_per_weight: 6, module_axioms: true }
    }
}

/// Structure verification: grading of the brackets, graded antisymmetry,
/// anchored Leibniz for the binary bracket, function-multilinearity of the
/// higher brackets, anchor compatibility, and the generalized Jacobi identity
/// per weight up to the cutoff. Exact: any nonzero residue is a failure.
pub fn verify_linfty<A: Algebroid>(alg: &A, rng: &mut ChaCha20Rng, opts: &VerifyOptions) -> Vec<Check> {
    let cutoff = opts.weight_cutoff.unwrap_or(alg.max_arity() + 2);
    let pool = alg.sample_elements(rng);
    let mut checks = Vec::new();

    // Degrees: |l_k(x_1..x_k)| = sum |x_i| + 2 - k on nonzero values.
    let mut grading_ok = true;
    let mut grading_why = String::new();
    for k in 1..=alg.max_arity() {
        for word in sample_words(&pool, k, opts.samples_per_weight, rng) {
            let v = alg.bracket(&word);
            if v.is_zero() {
                continue;
            }
            let expect: i64 = word.iter().map(|e| e.degree().unwrap_or(0)).sum::<i64>() + 2 - k as i64;
            if v.degree() != Some(expect) {
                grading_ok = false;
                grading_why = format!("arity {k}: got degree {:?}, expected {expect}", v.degree());
            }
        }
    }
    checks.push(Check::of("bracket-degrees", grading_ok, grading_why));

    // Graded antisymmetry in each adjacent pair of slots.
    let mut anti_ok = true;
    let mut anti_why = String::new();
    for k in 2..=alg.max_arity() {
        for word in sample_words(&pool, k, opts.samples_per_weight, rng) {
            for i in 0..k - 1 {
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                let s = word[i].degree().unwrap_or(0) * word[i + 1].degree().unwrap_or(0);
                let lhs = alg.bracket(&swapped);
                let rhs = if neg_one_pow(s) == 1 {
                    alg.bracket(&word).neg()
                } else {
                    alg.bracket(&word)
                };
                if lhs != rhs {
                    anti_ok = false;
                    anti_why = format!("arity {k}, slots {i},{}", i + 1);
                }
            }
        }
    }
    checks.push(Check::of("graded-antisymmetry", anti_ok, anti_why));

    // Anchored Leibniz rule for the binary bracket:
    // [x, f y] = f [x, y] + (rho(x) f) y for chart functions f.
    let dim = alg.chart_dim();
    let mut leib_ok = true;
    let mut leib_why = String::new();
    if opts.module_axioms && alg.max_arity() >= 2 {
        for word in sample_words(&pool, 2, opts.samples_per_weight, rng) {
            let f = crate::chart::random_poly(rng, dim, 2, 3);
            let lhs = alg.bracket(&[word[0].clone(), alg.act(&f, &word[1])]);
            let mut rhs = alg.act(&f, &alg.bracket(&word));
            let df = alg.anchor(&word[0]).apply(&f);
            rhs = rhs.add(&alg.act(&df, &word[1]));
            if lhs != rhs {
                leib_ok = false;
                leib_why = format!("degrees {:?}/{:?}", word[0].degree(), word[1].degree());
            }
        }
    }
    if opts.module_axioms {
        checks.push(Check::of("anchored-leibniz", leib_ok, leib_why));
    }

    // Brackets of arity >= 3 are multilinear over chart functions.
    let mut multi_ok = true;
    let mut multi_why = String::new();
    for k in if opts.module_axioms { 3..=alg.max_arity() } else { 3..=2 } {
        for word in sample_words(&pool, k, opts.samples_per_weight / 2 + 1, rng) {
            let f = crate::chart::random_poly(rng, dim, 2, 3);
            let mut scaled = word.clone();
            scaled[k - 1] = alg.act(&f, &scaled[k - 1]);
            let lhs = alg.bracket(&scaled);
            let rhs = alg.act(&f, &alg.bracket(&word));
            if lhs != rhs {
                multi_ok = false;
                multi_why = format!("arity {k}");
            }
        }
    }
    if opts.module_axioms {
        checks.push(Check::of("higher-bracket-function-linearity", multi_ok, multi_why));
    }

    // Anchor: chain map to fields in degree zero (differential lands in the
    // kernel), bracket morphism on degree-zero pairs, kills arity >= 3.
    let mut anchor_ok = true;
    let mut anchor_why = String::new();
    for e in &pool {
        if e.degree() == Some(-1) {
            let de = alg.differential(e);
            if !alg.anchor(&de).is_zero() {
                anchor_ok = false;
                anchor_why = "anchor of a differential image".into();
            }
        }
    }
    for word in sample_words(&pool, 2, opts.samples_per_weight, rng) {
        if word[0].degree() == Some(0) && word[1].degree() == Some(0) {
            let lhs = alg.anchor(&alg.bracket(&word));
            let rhs = crate::chart::lie_bracket(&alg.anchor(&word[0]), &alg.anchor(&word[1]));
            if lhs != rhs {
                anchor_ok = false;
                anchor_why = "anchor vs field bracket on a binary value".into();
            }
        }
    }
    for k in 3..=alg.max_arity() {
        for word in sample_words(&pool, k, 2, rng) {
            if !alg.anchor(&alg.bracket(&word)).is_zero() {
                anchor_ok = false;
                anchor_why = format!("anchor survives arity {k}");
            }
        }
    }
    checks.push(Check::of("anchor-compatibility", anchor_ok, anchor_why));

    // Generalized Jacobi per weight.
    for m in 1..=cutoff {
        let mut ok = true;
        let mut why = String::new();
        for word in sample_words(&pool, m, opts.samples_per_weight, rng) {
            let defect = jacobi_defect(alg, &word);
            if !defect.is_zero() {
                ok = false;
                why = format!("residue at degrees {:?}", word.iter().map(|e| e.degree()).collect::<Vec<_>>());
                break;
            }
        }
        checks.push(Check::of(format!("jacobi-weight-{m}"), ok, why));
    }

    checks
}

/// Draws `count` words of length `m` from the pool (all-pool sweep first,
/// then random with repetition).
pub fn sample_words<E: Element>(pool: &[E], m: usize, count: usize, rng: &mut ChaCha20Rng) -> Vec<Vec<E>> {
    use rand::Rng;
    let mut words = Vec::new();
    if pool.is_empty() {
        return words;
    }
    for start in 0..count {
        let word: Vec<E> = (0..m).map(|i| pool[(start + i * 3) % pool.len()].clone()).collect();
        words.push(word);
    }
    for _ in 0..count {
        let word: Vec<E> = (0..m).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
        words.push(word);
    }
    words
}

/// The tangent algebroid of a chart: vector fields in degree zero, the
/// commutator bracket, the identity anchor.
#[derive(Clone, Debug)]
pub struct TangentAlgebroid {
    pub dim: usize,
}

impl Element for VectorField {
    fn degree(&self) -> Option<i64> {
        if VectorField::is_zero(self) {
            None
        } else {
            Some(0)
        }
    }

    fn is_zero(&self) -> bool {
        VectorField::is_zero(self)
    }

    fn add(&self, other: &Self) -> Self {
        VectorField::add(self, other)
    }

    fn neg(&self) -> Self {
        VectorField::neg(self)
    }

    fn scale(&self, c: &Q) -> Self {
        VectorField::scale(self, c)
    }
}

impl Algebroid for TangentAlgebroid {
    type El = VectorField;

    fn max_arity(&self) -> usize {
        2
    }

    fn bracket(&self, args: &[VectorField]) -> VectorField {
        match args.len() {
            1 => VectorField::zero(self.dim),
            2 => crate::chart::lie_bracket(&args[0], &args[1]),
            _ => VectorField::zero(self.dim),
        }
    }

    fn anchor(&self, e: &VectorField) -> VectorField {
        e.clone()
    }

    fn chart_dim(&self) -> usize {
        self.dim
    }

    fn act(&self, f: &Poly, e: &VectorField) -> VectorField {
        e.mul_fn(f)
    }

    fn zero(&self) -> VectorField {
        VectorField::zero(self.dim)
    }

    fn sample_elements(&self, rng: &mut ChaCha20Rng) -> Vec<VectorField> {
        let mut pool: Vec<VectorField> = (0..self.dim).map(|i| VectorField::basis(self.dim, i)).collect();
        for _ in 0..3 {
            pool.push(crate::chart::random_field(rng, self.dim, 2, 2));
        }
        pool
    }
}

impl Coordinates for TangentAlgebroid {
    fn generators(&self) -> Vec<VectorField> {
        (0..self.dim).map(|i| VectorField::basis(self.dim, i)).collect()
    }

    fn coords(&self, e: &VectorField) -> Vec<Poly> {
        e.comps.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;
    use rand::SeedableRng;

    #[test]
    fn tangent_structure_verifies() {
        let alg = TangentAlgebroid { dim: 3 };
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let checks = verify_linfty(&alg, &mut rng, &VerifyOptions::default());
        for c in &checks {
            assert!(c.status.passed(), "{}: {:?}", c.name, c.status);
        }
    }

    /// A deliberately broken bracket (missing sign) must be caught by the
    /// Jacobi check at weight 3.
    #[derive(Clone, Debug)]
    struct BrokenTangent {
        dim: usize,
    }

    impl Algebroid for BrokenTangent {
        type El = VectorField;

        fn max_arity(&self) -> usize {
            2
        }

        fn bracket(&self, args: &[VectorField]) -> VectorField {
            match args.len() {
                2 => {
                    // Only half of the commutator: not a Lie bracket.
                    let x = &args[0];
                    let y = &args[1];
                    let dim = self.dim;
                    let mut comps = Vec::with_capacity(dim);
                    for i in 0..dim {
                        let mut acc = crate::chart::Poly::zero(dim);
                        for j in 0..dim {
                            acc = acc.add(&x.comps[j].mul(&y.comps[i].partial(j)));
                        }
                        comps.push(acc);
                    }
                    VectorField { comps }
                }
                _ => VectorField::zero(self.dim),
            }
        }

        fn anchor(&self, e: &VectorField) -> VectorField {
            e.clone()
        }

        fn chart_dim(&self) -> usize {
            self.dim
        }

        fn act(&self, f: &Poly, e: &VectorField) -> VectorField {
            e.mul_fn(f)
        }

        fn zero(&self) -> VectorField {
            VectorField::zero(self.dim)
        }

        fn sample_elements(&self, rng: &mut ChaCha20Rng) -> Vec<VectorField> {
            TangentAlgebroid { dim: self.dim }.sample_elements(rng)
        }
    }

    #[test]
    fn broken_bracket_is_caught() {
        let alg = BrokenTangent { dim: 2 };
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        let checks = verify_linfty(&alg, &mut rng, &VerifyOptions::default());
        let failed: Vec<&str> = checks
            .iter()
            .filter(|c| !c.status.passed())
            .map(|c| c.name.as_str())
            .collect();
        assert!(failed.iter().any(|n| n.starts_with("jacobi") || *n == "graded-antisymmetry"), "{failed:?}");
    }

    #[test]
    fn ce_differential_weight_two_on_fields() {
        // On a weight-2 word of degree-0 letters the word differential has a
        // single term: the shifted binary bracket, with sign +1 because the
        // shifted degrees are odd but the identity split carries no inversion.
        let alg = TangentAlgebroid { dim: 2 };
        let x = VectorField::basis(2, 0);
        let y = {
            let mut v = VectorField::zero(2);
            v.comps[1] = Poly::var(2, 0);
            v
        };
        let terms = ce_differential(&alg, &[x.clone(), y.clone()]);
        // j=1 terms vanish (zero differential), so only the j=2 term remains.
        assert_eq!(terms.len(), 1);
        let (c, w) = &terms[0];
        assert_eq!(c, &qi(1));
        assert_eq!(w.len(), 1);
        assert_eq!(w[0], crate::chart::lie_bracket(&x, &y));
    }
}
