//! Integer scalar abstraction shared by the lattice, collection and quiver code.
//!
//! Every quantity in the kernel is an exact integer. The width is a type
//! parameter so long mutation words can be replayed in `i128` when `i64`
//! would overflow; all multiplication goes through the checked helpers below.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{NumCast, PrimInt, Signed};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

/// A signed machine integer usable as the coefficient ring of the numerical K-group.
pub trait Scalar:
    PrimInt
    + Signed
    + Integer
    + Hash
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts a small literal. Panics only if `v` does not fit, which never
    /// happens for the constants used in this crate.
    fn lit(v: i64) -> Self {
        <Self as NumCast>::from(v).expect("literal fits in scalar type")
    }

    /// Lossless conversion to `i128` for display and cross-width comparison.
    fn to_wide(self) -> i128 {
        <i128 as NumCast>::from(self).expect("scalar fits in i128")
    }

    /// Checked conversion from another width.
    fn try_from_wide(v: i128) -> Option<Self> {
        <Self as NumCast>::from(v)
    }
}

impl Scalar for i32 {}
impl Scalar for i64 {}
impl Scalar for i128 {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("integer overflow in exact arithmetic")]
pub struct Overflow;

#[inline]
pub fn add<T: Scalar>(a: T, b: T) -> Result<T, Overflow> {
    a.checked_add(&b).ok_or(Overflow)
}

#[inline]
pub fn sub<T: Scalar>(a: T, b: T) -> Result<T, Overflow> {
    a.checked_sub(&b).ok_or(Overflow)
}

#[inline]
pub fn mul<T: Scalar>(a: T, b: T) -> Result<T, Overflow> {
    a.checked_mul(&b).ok_or(Overflow)
}

#[inline]
pub fn neg<T: Scalar>(a: T) -> Result<T, Overflow> {
    T::zero().checked_sub(&a).ok_or(Overflow)
}

/// Sum of products `Σ a_i b_i` with overflow detection.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> Result<T, Overflow> {
    a.iter()
        .zip(b)
        .try_fold(T::zero(), |acc, (&x, &y)| add(acc, mul(x, y)?))
}

/// `(-1)^k` as a scalar.
#[inline]
pub fn sign_of_parity<T: Scalar>(k: i64) -> T {
    if k.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn determinant<T: Scalar>(rows: &[Vec<T>]) -> Result<T, Overflow> {
    let n = rows.len();
    if n == 0 {
        return Ok(T::one());
    }
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(T::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = sub(mul(m[i][j], m[k][k])?, mul(m[i][k], m[k][j])?)?;
                m[i][j] = num / prev;
            }
        }
        prev = m[k][k];
    }
    mul(sign, m[n - 1][n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let a: Vec<Vec<i64>> = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        assert_eq!(determinant(&a).unwrap(), 4);
        let b: Vec<Vec<i64>> = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(determinant(&b).unwrap(), -1);
        let singular: Vec<Vec<i64>> = vec![vec![1, 2], vec![2, 4]];
        assert_eq!(determinant(&singular).unwrap(), 0);
    }

    #[test]
    fn checked_ops_report_overflow() {
        assert_eq!(mul(i32::MAX, 2), Err(Overflow));
        assert_eq!(add(1i64, 2), Ok(3));
        assert_eq!(neg(i64::MIN), Err(Overflow));
    }
}
