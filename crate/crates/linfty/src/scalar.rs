//! Exact rational scalars.
//!
//! All arithmetic in this crate runs over `Q`, arbitrary-precision rationals
//! kept in lowest terms with positive denominator. There is no tolerance
//! anywhere: two scalars are equal iff they are the same reduced fraction.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// The scalar field: exact rationals in lowest terms.
pub type Q = BigRational;

/// The integer `n` as a scalar.
pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// The fraction `n/d` as a scalar (reduced, `d != 0`).
pub fn qr(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(-1)^k` as a plain sign.
pub fn neg_one_pow(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `n!` as a scalar.
pub fn factorial(n: usize) -> Q {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    BigRational::from_integer(acc)
}

/// Binomial coefficient `C(n, k)` as a scalar; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> Q {
    if k > n {
        return Q::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

/// Renders a scalar as `p` or `p/q` with a leading minus when negative.
pub fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// True iff the scalar is a (possibly negative) integer.
pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Absolute value.
pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_fractions() {
        assert_eq!(qr(2, 4), qr(1, 2));
        assert_eq!(qr(-2, -4), qr(1, 2));
        assert_eq!(qr(2, -4), qr(-1, 2));
        assert!(qr(2, -4).denom() > &BigInt::zero());
    }

    #[test]
    fn binomials_match_pascal() {
        for n in 0..12usize {
            for k in 0..=n {
                let pascal = if k == 0 || k == n {
                    qi(1)
                } else {
                    binomial(n - 1, k - 1) + binomial(n - 1, k)
                };
                assert_eq!(binomial(n, k), pascal, "C({n},{k})");
            }
        }
        assert_eq!(binomial(3, 5), qi(0));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), qi(1));
        assert_eq!(factorial(5), qi(120));
        assert_eq!(factorial(10), qi(3_628_800));
    }
}
