//! Intersection combinatorics of a finite open cover, with two computational
//! models sharing the same nerve.
//!
//! The chart model puts one polynomial chart under every face and makes all
//! restrictions the identity; it supports honest differential forms and is
//! used wherever structure equations must hold symbolically. The sampled
//! model replaces functions by their values on finitely many tagged points,
//! which makes every cochain space finite-dimensional over the rationals, so
//! kernel and image dimensions of the coboundary are computed exactly.
//!
//! Level `k` of the nerve collects the nonempty `(k+1)`-fold intersections.

use crate::chart::DiffForm;
use crate::linalg::QMatrix;
use crate::scalar::{neg_one_pow, qi, Q};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;

/// The nerve of a cover: faces grouped by level, each face a sorted list of
/// open indices, closed under passing to nonempty subsets.
#[derive(Clone, Debug)]
pub struct Nerve {
    pub opens: usize,
    faces: Vec<Vec<Vec<usize>>>,
    index: BTreeMap<Vec<usize>, (usize, usize)>,
}

impl Nerve {
    /// Builds the nerve generated by the given faces (subsets are added).
    pub fn from_faces(opens: usize, generators: &[Vec<usize>]) -> Nerve {
        let mut present: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
        for g in generators {
            let mut f = g.clone();
            f.sort_unstable();
            f.dedup();
            assert!(!f.is_empty() && *f.last().unwrap() < opens);
            // Insert every nonempty subset.
            let m = f.len();
            for mask in 1..(1u32 << m) {
                let sub: Vec<usize> =
                    (0..m).filter(|i| mask & (1 << i) != 0).map(|i| f[i]).collect();
                present.insert(sub, ());
            }
        }
        let top = present.keys().map(|f| f.len()).max().unwrap_or(0);
        let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top];
        for f in present.keys() {
            faces[f.len() - 1].push(f.clone());
        }
        let mut index = BTreeMap::new();
        for (k, level) in faces.iter().enumerate() {
            for (pos, f) in level.iter().enumerate() {
                index.insert(f.clone(), (k, pos));
            }
        }
        Nerve { opens, faces, index }
    }

    /// The boundary-of-a-simplex nerve: all proper nonempty subsets of the
    /// opens are faces. With `n + 2` opens this is the combinatorial
    /// `n`-sphere.
    pub fn sphere(opens: usize) -> Nerve {
        assert!(opens >= 2);
        let all: Vec<usize> = (0..opens).collect();
        let mut gens = Vec::new();
        for skip in 0..opens {
            let f: Vec<usize> = all.iter().copied().filter(|&i| i != skip).collect();
            gens.push(f);
        }
        Nerve::from_faces(opens, &gens)
    }

    /// Number of levels with at least one face.
    pub fn levels(&self) -> usize {
        self.faces.len()
    }

    pub fn faces_at(&self, level: usize) -> &[Vec<usize>] {
        if level < self.faces.len() {
            &self.faces[level]
        } else {
            &[]
        }
    }

    pub fn pos(&self, face: &[usize]) -> Option<(usize, usize)> {
        self.index.get(face).copied()
    }
}

/// A form-valued cochain in the chart model: one differential form per face
/// of its level. Functions are degree-zero forms.
#[derive(Clone, Debug)]
pub struct FormCochain {
    pub level: usize,
    pub p: usize,
    pub vals: Vec<DiffForm>,
}

impl PartialEq for FormCochain {
    fn eq(&self, other: &Self) -> bool {
        // The degree tag is bookkeeping only; zero cochains of any tag agree.
        self.level == other.level && self.vals == other.vals
    }
}

impl Eq for FormCochain {}

impl FormCochain {
    pub fn zero(nerve: &Nerve, level: usize, p: usize, dim: usize) -> FormCochain {
        let count = nerve.faces_at(level).len();
        FormCochain { level, p, vals: vec![DiffForm::zero(dim, p); count] }
    }

    /// The same global form under every face.
    pub fn diagonal(nerve: &Nerve, level: usize, form: &DiffForm) -> FormCochain {
        let count = nerve.faces_at(level).len();
        FormCochain { level, p: form.p, vals: vec![form.clone(); count] }
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|v| v.is_zero())
    }

    pub fn add(&self, other: &FormCochain) -> FormCochain {
        assert_eq!(self.level, other.level);
        assert_eq!(self.vals.len(), other.vals.len());
        let vals = self.vals.iter().zip(&other.vals).map(|(a, b)| a.add(b)).collect();
        FormCochain { level: self.level, p: self.p.max(other.p), vals }
    }

    pub fn neg(&self) -> FormCochain {
        FormCochain { level: self.level, p: self.p, vals: self.vals.iter().map(|v| v.neg()).collect() }
    }

    pub fn scale(&self, c: &Q) -> FormCochain {
        FormCochain { level: self.level, p: self.p, vals: self.vals.iter().map(|v| v.scale(c)).collect() }
    }

    pub fn map(&self, f: impl Fn(&DiffForm) -> DiffForm) -> FormCochain {
        let vals: Vec<DiffForm> = self.vals.iter().map(f).collect();
        let p = vals.iter().find(|v| !v.is_zero()).map(|v| v.p).unwrap_or(self.p);
        FormCochain { level: self.level, p, vals }
    }

    /// Facewise exterior derivative.
    pub fn d(&self) -> FormCochain {
        self.map(|v| v.d())
    }
}

/// Čech coboundary in the chart model: on a face of the next level,
/// the alternating sum of the values on its vertex-deleted subfaces.
pub fn cech_delta(nerve: &Nerve, c: &FormCochain) -> FormCochain {
    let next = c.level + 1;
    let faces = nerve.faces_at(next);
    let dim = c.vals.first().map(|v| v.dim).unwrap_or(0);
    let mut vals = Vec::with_capacity(faces.len());
    for f in faces {
        let mut acc = DiffForm::zero(dim, c.p);
        for r in 0..f.len() {
            let mut sub = f.clone();
            sub.remove(r);
            let (k, pos) = nerve.pos(&sub).expect("nerve closed under subsets");
            debug_assert_eq!(k, c.level);
            let term = c.vals[pos].scale(&qi(neg_one_pow(r as i64)));
            acc = acc.add(&term);
        }
        vals.push(acc);
    }
    FormCochain { level: next, p: c.p, vals }
}

pub fn random_form_cochain(
    rng: &mut ChaCha20Rng,
    nerve: &Nerve,
    level: usize,
    p: usize,
    dim: usize,
    deg: usize,
    coeff: i64,
) -> FormCochain {
    let vals = (0..nerve.faces_at(level).len())
        .map(|_| crate::chart::random_form(rng, dim, p, deg, coeff))
        .collect();
    FormCochain { level, p, vals }
}

/// The sampled model: finitely many tagged points, each belonging to a face
/// of member opens, with a fixed number of tangent directions per point.
/// Function spaces become finite-dimensional; covector data is one rational
/// per (carrier, point, direction).
#[derive(Clone, Debug)]
pub struct SampledSpace {
    pub nerve: Nerve,
    /// Per point: the sorted set of opens containing it.
    pub memberships: Vec<Vec<usize>>,
    pub tangent_dim: usize,
}

impl SampledSpace {
    /// One point at the barycenter of every face of the nerve.
    pub fn barycentric(nerve: Nerve, tangent_dim: usize) -> SampledSpace {
        let mut memberships = Vec::new();
        for k in 0..nerve.levels() {
            for f in nerve.faces_at(k) {
                memberships.push(f.clone());
            }
        }
        SampledSpace { nerve, memberships, tangent_dim }
    }

    pub fn points(&self) -> usize {
        self.memberships.len()
    }

    fn contains(&self, point: usize, face: &[usize]) -> bool {
        face.iter().all(|o| self.memberships[point].binary_search(o).is_ok())
    }

    /// Index pairs (face position, point) carrying a value at this level.
    pub fn pairs(&self, level: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (pos, f) in self.nerve.faces_at(level).iter().enumerate() {
            for s in 0..self.points() {
                if self.contains(s, f) {
                    out.push((pos, s));
                }
            }
        }
        out
    }

    /// Matrix of the Čech coboundary from level `k` to `k + 1` on sampled
    /// function cochains.
    pub fn delta_matrix(&self, level: usize) -> QMatrix {
        let dom = self.pairs(level);
        let cod = self.pairs(level + 1);
        let mut dom_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, key) in dom.iter().enumerate() {
            dom_index.insert(*key, i);
        }
        let mut m = QMatrix::zero(cod.len(), dom.len());
        let cod_faces = self.nerve.faces_at(level + 1);
        for (row, (pos, s)) in cod.iter().enumerate() {
            let f = &cod_faces[*pos];
            for r in 0..f.len() {
                let mut sub = f.clone();
                sub.remove(r);
                let (_, sub_pos) = self.nerve.pos(&sub).unwrap();
                let col = dom_index[&(sub_pos, *s)];
                let cur = m.at(row, col).clone();
                *m.at_mut(row, col) = cur + qi(neg_one_pow(r as i64));
            }
        }
        m
    }

    /// Matrix of the restriction of global functions to the opens
    /// (level-zero cochains).
    pub fn augmentation_matrix(&self) -> QMatrix {
        let cod = self.pairs(0);
        let mut m = QMatrix::zero(cod.len(), self.points());
        for (row, (_pos, s)) in cod.iter().enumerate() {
            *m.at_mut(row, *s) = qi(1);
        }
        m
    }

    /// Exact cohomology dimensions of the augmented sampled Čech complex:
    /// entry 0 is `dim ker(delta_0) - rank(augmentation)` (zero means the
    /// globals fill the kernel), entry `k > 0` is `dim ker(delta_k) -
    /// rank(delta_{k-1})`.
    pub fn augmented_cohomology_dims(&self) -> Vec<i64> {
        let levels = self.nerve.levels();
        let mut out = Vec::new();
        let mut prev_rank: i64 = self.augmentation_matrix().rank() as i64;
        for k in 0..levels {
            let dom_dim = self.pairs(k).len() as i64;
            let (rank_k, ker_k) = if k + 1 < levels {
                let d = self.delta_matrix(k);
                let r = d.rank() as i64;
                (r, dom_dim - r)
            } else {
                (0, dom_dim)
            };
            out.push(ker_k - prev_rank);
            prev_rank = rank_k;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{random_form, Poly};
    use rand::SeedableRng;

    #[test]
    fn sphere_nerve_counts() {
        // Proper nonempty subsets of a 3-set: 6 faces on 2 levels.
        let n = Nerve::sphere(3);
        assert_eq!(n.levels(), 2);
        assert_eq!(n.faces_at(0).len(), 3);
        assert_eq!(n.faces_at(1).len(), 3);
        let n4 = Nerve::sphere(4);
        assert_eq!(n4.levels(), 3);
        assert_eq!(n4.faces_at(2).len(), 4);
    }

    #[test]
    fn chart_coboundary_squares_to_zero() {
        let n = Nerve::sphere(4);
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        let c = random_form_cochain(&mut rng, &n, 0, 1, 2, 2, 3);
        let dd = cech_delta(&n, &cech_delta(&n, &c));
        assert!(dd.is_zero());
        // A global (diagonal) cochain is killed by one application.
        let g = FormCochain::diagonal(&n, 0, &random_form(&mut rng, 2, 1, 2, 3));
        assert!(cech_delta(&n, &g).is_zero());
    }

    #[test]
    fn chart_coboundary_alternating_signs() {
        // On the pair {a, b} the coboundary of a level-0 cochain is
        // f_b - f_a.
        let n = Nerve::sphere(3);
        let mut c = FormCochain::zero(&n, 0, 0, 1);
        let f0 = DiffForm::from_fn(Poly::var(1, 0));
        let (_, p0) = n.pos(&[0]).unwrap();
        c.vals[p0] = f0.clone();
        let d = cech_delta(&n, &c);
        let (_, p01) = n.pos(&[0, 1]).unwrap();
        let (_, p12) = n.pos(&[1, 2]).unwrap();
        assert_eq!(d.vals[p01], f0.neg());
        assert!(d.vals[p12].is_zero());
    }

    #[test]
    fn sampled_coboundary_squares_to_zero() {
        let s = SampledSpace::barycentric(Nerve::sphere(4), 1);
        let d0 = s.delta_matrix(0);
        let d1 = s.delta_matrix(1);
        let prod = d1.mul(&d0);
        assert_eq!(prod.rank(), 0);
    }

    #[test]
    fn sampled_circle_and_spheres_are_acyclic() {
        // Barycentric samples make the augmented complex exact: every point
        // lives on a full simplex of opens.
        for opens in [3usize, 4, 5] {
            let s = SampledSpace::barycentric(Nerve::sphere(opens), 1);
            let dims = s.augmented_cohomology_dims();
            assert!(dims.iter().all(|&d| d == 0), "opens {opens}: {dims:?}");
        }
    }

    #[test]
    fn chart_model_is_not_acyclic_on_the_circle() {
        // With identity restrictions a cover of the circle has nonzero
        // first cohomology: the alternating cochain (1, -1, 1) on the three
        // pairwise overlaps is closed (top level) but not a coboundary of a
        // symbolic level-0 cochain with equal values on both sides. We
        // exhibit the class over constants.
        let n = Nerve::sphere(3);
        // delta from level 0 to level 1 over constants: matrix rows are
        // (f_b - f_a) per pair.
        let mut m = QMatrix::zero(3, 3);
        for (row, f) in n.faces_at(1).iter().enumerate() {
            let (_, a) = n.pos(&[f[0]]).unwrap();
            let (_, b) = n.pos(&[f[1]]).unwrap();
            *m.at_mut(row, b) = qi(1);
            *m.at_mut(row, a) = qi(-1);
        }
        // rank 2, so the image is 2-dimensional inside a 3-dimensional
        // kernel of the (zero) next coboundary: cohomology survives.
        assert_eq!(m.rank(), 2);
    }
}
