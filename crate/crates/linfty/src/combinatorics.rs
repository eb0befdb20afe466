//! Sign bookkeeping for graded words: Koszul signs, shuffles, ordered block
//! partitions, and Bernoulli numbers.
//!
//! Permutations are stored as output sequences: `perm[k]` is the original
//! position of the symbol that ends up in slot `k`.

use crate::scalar::{binomial, qi, Q};
use num::Zero;
use std::sync::{Mutex, OnceLock};

/// Sign of a permutation given as an output sequence.
pub fn perm_sign(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    for k in 0..perm.len() {
        for l in (k + 1)..perm.len() {
            if perm[k] > perm[l] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Koszul sign of rearranging graded symbols of the given degrees into the
/// order `perm`: one factor `(-1)^{|a||b|}` per inverted pair.
pub fn koszul_sign(degrees: &[i64], perm: &[usize]) -> i64 {
    debug_assert_eq!(degrees.len(), perm.len());
    let mut sign = 1i64;
    for k in 0..perm.len() {
        for l in (k + 1)..perm.len() {
            if perm[k] > perm[l] && degrees[perm[k]] % 2 != 0 && degrees[perm[l]] % 2 != 0 {
                sign = -sign;
            }
        }
    }
    sign
}

/// Koszul sign times the permutation sign: the sign picked up in a graded
/// antisymmetric (wedge) context.
pub fn antisym_koszul_sign(degrees: &[i64], perm: &[usize]) -> i64 {
    koszul_sign(degrees, perm) * perm_sign(perm)
}

/// All ways to split `0..m` into a block of size `j` and its complement, both
/// kept in increasing order. These are exactly the `(j, m-j)`-unshuffles;
/// `j = 0` and `j = m` each yield the single identity split.
pub fn shuffle_splits(m: usize, j: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let mut first = Vec::with_capacity(j);
    fn rec(
        start: usize,
        m: usize,
        j: usize,
        first: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) {
        if first.len() == j {
            let second: Vec<usize> = (0..m).filter(|i| !first.contains(i)).collect();
            out.push((first.clone(), second));
            return;
        }
        for i in start..m {
            if m - i < j - first.len() {
                break;
            }
            first.push(i);
            rec(i + 1, m, j, first, out);
            first.pop();
        }
    }
    rec(0, m, j, &mut first, &mut out);
    out
}

/// All assignments of `0..m` into `blocks` ordered nonempty blocks, each block
/// listed in increasing order.
pub fn ordered_partitions(m: usize, blocks: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    if blocks == 0 || blocks > m {
        return out;
    }
    let mut assign = vec![0usize; m];
    loop {
        let mut part: Vec<Vec<usize>> = vec![Vec::new(); blocks];
        for (i, &b) in assign.iter().enumerate() {
            part[b].push(i);
        }
        if part.iter().all(|b| !b.is_empty()) {
            out.push(part);
        }
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            assign[i] += 1;
            if assign[i] < blocks {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

/// The flattening of a split or partition as an output-sequence permutation.
pub fn concat_perm(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    let mut used = vec![false; k];
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, depth: usize, out: &mut Vec<Vec<usize>>) {
        if depth == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur[depth] = i;
                rec(k, cur, used, depth + 1, out);
                used[i] = false;
            }
        }
    }
    rec(k, &mut cur, &mut used, 0, &mut out);
    out
}

static BERNOULLI: OnceLock<Mutex<Vec<Q>>> = OnceLock::new();

/// The `m`-th Bernoulli number in the convention with `B_1 = -1/2`, computed
/// from the defining recursion `sum_{k=0}^{m} C(m+1, k) B_k = [m = 0]` and
/// memoized.
pub fn bernoulli(m: usize) -> Q {
    let cache = BERNOULLI.get_or_init(|| Mutex::new(vec![qi(1)]));
    let mut cache = cache.lock().unwrap();
    while cache.len() <= m {
        let t = cache.len();
        let mut acc = Q::zero();
        for (k, b) in cache.iter().enumerate() {
            acc += binomial(t + 1, k) * b;
        }
        let val = -acc / binomial(t + 1, t);
        cache.push(val);
    }
    cache[m].clone()
}
