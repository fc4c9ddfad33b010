//! Scalar abstraction shared by the `f64` and exact-rational evaluation paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Field-like scalar: the generic series and product formulas are written
/// once and instantiated with `f64` (fast path) or [`BigRational`] (exact
/// path, integer model parameters).
pub trait Scalar:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_int(n: i64) -> Self;
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Exact rational; alias used throughout the exact-mode code.
pub type Rat = BigRational;

/// `n` as an exact rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Nearest `f64` to an exact rational; for reporting and float cross-checks.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float; every finite `f64` is a dyadic
/// rational, so no information is lost.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float required for exact conversion")
}

/// Natural log of a positive big integer, accurate to a few ulp even far
/// beyond the `f64` range (top 53 bits plus the binary exponent).
pub fn ln_big(x: &BigInt) -> f64 {
    use num_traits::{Signed, ToPrimitive};
    assert!(x.is_positive(), "ln_big needs a positive argument");
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational; safe for magnitudes outside `f64`.
pub fn ln_rat(r: &Rat) -> f64 {
    use num_traits::Signed;
    assert!(r.is_positive(), "ln_rat needs a positive argument");
    ln_big(r.numer()) - ln_big(r.denom())
}

/// Exact factorial `n!`.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Exact Γ(n) for a positive integer argument, i.e. `(n-1)!`.
///
/// Panics if `n ≤ 0`: the exact path only ever forms Γ at strictly positive
/// integers (the parameter constraints guarantee it).
pub fn gamma_int(n: i64) -> BigInt {
    assert!(n > 0, "gamma_int argument must be positive, got {n}");
    factorial((n - 1) as u64)
}

/// Rising factorial (a)_k = a(a+1)⋯(a+k−1) with (a)_0 = 1.
pub fn pochhammer<T: Scalar>(a: T, k: usize) -> T {
    let mut acc = T::one();
    let mut cur = a;
    for _ in 0..k {
        acc = acc * cur.clone();
        cur = cur + T::one();
    }
    acc
}

/// Determinant of a small dense matrix by Laplace expansion on the first row.
///
/// Intended for the p×p minors appearing in transition formulas (p ≤ 4);
/// complexity is O(n!) and no pivoting is performed, which keeps the result
/// exact for rational entries.
pub fn det_small<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n));
    if n == 1 {
        return m[0][0].clone();
    }
    if n == 2 {
        return m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
    }
    let mut acc = T::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<T>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].clone() * det_small(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(gamma_int(1), BigInt::one());
        assert_eq!(gamma_int(4), BigInt::from(6));
    }

    #[test]
    fn pochhammer_small() {
        assert_eq!(pochhammer(rat(1), 3), rat(6));
        assert_eq!(pochhammer(pochhammer(rat(2), 0), 0), rat(1));
        assert_eq!(pochhammer(2.0f64, 3), 24.0);
        // (−2)_3 = (−2)(−1)(0) = 0
        assert_eq!(pochhammer(rat(-2), 3), rat(0));
    }

    #[test]
    fn det_small_exact() {
        let m = vec![vec![rat(1), rat(2)], vec![rat(3), rat(4)]];
        assert_eq!(det_small(&m), rat(-2));
        let m3 = vec![
            vec![rat(2), rat(0), rat(1)],
            vec![rat(1), rat(1), rat(0)],
            vec![rat(0), rat(3), rat(1)],
        ];
        // 2·(1·1−0·3) − 0 + 1·(1·3−1·0) = 2 + 3 = 5
        assert_eq!(det_small(&m3), rat(5));
        let empty: Vec<Vec<Rat>> = vec![];
        assert_eq!(det_small(&empty), rat(1));
    }
}
