//! Integer combinatorics and the generalized falling product.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{Backend, Scalar};

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Binomial coefficient C(n, k); zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn binomial_scalar(n: usize, k: usize, backend: Backend) -> Scalar {
    Scalar::from_bigint(&binomial(n, k), backend)
}

/// The weight `k! / ((k - sum(parts))! * prod(parts[i]!))`.
///
/// Errors when the parts sum past `k`.
pub fn multinomial(k: usize, parts: &[usize]) -> Result<BigInt> {
    let sum: usize = parts.iter().sum();
    if sum > k {
        return Err(Error::PartsExceedK { k, sum });
    }
    let mut numer = factorial(k);
    numer /= factorial(k - sum);
    for &p in parts {
        numer /= factorial(p);
    }
    Ok(numer)
}

/// Falling product `alpha (alpha-1) ... (alpha-a+1)`, empty product for `a = 0`.
pub fn falling_product(alpha: &Scalar, a: usize) -> Scalar {
    let backend = alpha.backend();
    let mut acc = Scalar::one(backend);
    for i in 0..a {
        acc = acc * (alpha.clone() - Scalar::from_i64(i as i64, backend));
    }
    acc
}

/// Rising product `alpha (alpha+1) ... (alpha+a-1)`, empty product for `a = 0`.
pub fn rising_product(alpha: &Scalar, a: usize) -> Scalar {
    let backend = alpha.backend();
    let mut acc = Scalar::one(backend);
    for i in 0..a {
        acc = acc * (alpha.clone() + Scalar::from_i64(i as i64, backend));
    }
    acc
}
