//! Exact scalars: rationals of unbounded size, or residues modulo a prime.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::classifier::FieldDescriptor;

/// Reduced fraction with a positive denominator. Stays on machine integers
/// until an operation overflows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rational {
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl Rational {
    pub fn from_i64(n: i64) -> Self {
        Rational::Small(n, 1)
    }

    fn small(num: i128, den: i128) -> Option<Self> {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Some(Rational::Small(n.try_into().ok()?, d.try_into().ok()?))
    }

    fn big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(b) => (**b).clone(),
        }
    }

    fn from_big(b: BigRational) -> Self {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) => Rational::Small(n, d),
            _ => Rational::Big(Box::new(b)),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    fn add(&self, o: &Self) -> Self {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, o) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            let num = (a * d).checked_add(c * b);
            if let Some(r) = num.and_then(|n| Rational::small(n, b * d)) {
                return r;
            }
        }
        Rational::from_big(self.big() + o.big())
    }

    fn mul(&self, o: &Self) -> Self {
        if let (Rational::Small(a, b), Rational::Small(c, d)) = (self, o) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let Some(r) = Rational::small(a * c, b * d) {
                return r;
            }
        }
        Rational::from_big(self.big() * o.big())
    }

    fn neg(&self) -> Self {
        match self {
            Rational::Small(n, d) if *n != i64::MIN => Rational::Small(-n, *d),
            _ => Rational::from_big(-self.big()),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Rational::Small(n, d) => Rational::small(*d as i128, *n as i128).expect("swapping parts cannot overflow"),
            Rational::Big(b) => Rational::from_big(b.recip()),
        })
    }

    fn is_negative(&self) -> bool {
        match self {
            Rational::Small(n, _) => *n < 0,
            Rational::Big(b) => b.is_negative(),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Rational::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Rational),
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn from_i64(field: FieldDescriptor, n: i64) -> Self {
        match field {
            FieldDescriptor::Rationals => Scalar::Rational(Rational::from_i64(n)),
            FieldDescriptor::PrimeField(p) => Scalar::Residue {
                value: n.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    pub fn zero(field: FieldDescriptor) -> Self {
        Self::from_i64(field, 0)
    }

    pub fn one(field: FieldDescriptor) -> Self {
        Self::from_i64(field, 1)
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Scalar::Rational(Rational::small(num as i128, den as i128).unwrap())
    }

    pub fn field(&self) -> FieldDescriptor {
        match self {
            Scalar::Rational(_) => FieldDescriptor::Rationals,
            Scalar::Residue { modulus, .. } => FieldDescriptor::PrimeField(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => *r == Rational::Small(1, 1),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(r) => r.inv().map(Scalar::Rational),
            Scalar::Residue { value, modulus } => {
                if *value == 0 {
                    return None;
                }
                // Fermat: a^(p-2)
                let (mut base, mut exp, mut acc) = (*value as u128, *modulus - 2, 1u128);
                let m = *modulus as u128;
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc = acc * base % m;
                    }
                    base = base * base % m;
                    exp >>= 1;
                }
                Some(Scalar::Residue {
                    value: acc as u64,
                    modulus: *modulus,
                })
            }
        }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        self * &o.inv().expect("division by zero")
    }

    /// Over ℚ, whether the value is strictly negative. Residues never are.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Residue { .. } => false,
        }
    }

    /// The involution on scalars is the identity.
    pub fn conj(&self) -> Scalar {
        self.clone()
    }
}

fn residue_op(a: &Scalar, b: &Scalar, op: impl Fn(u128, u128, u128) -> u128) -> Scalar {
    match (a, b) {
        (Scalar::Residue { value: x, modulus: p }, Scalar::Residue { value: y, modulus: q }) => {
            assert_eq!(p, q, "mixing residues of different moduli");
            Scalar::Residue {
                value: op(*x as u128, *y as u128, *p as u128) as u64,
                modulus: *p,
            }
        }
        _ => panic!("mixing rationals and residues"),
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.add(b)),
            _ => residue_op(self, o, |x, y, m| (x + y) % m),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.add(&b.neg())),
            _ => residue_op(self, o, |x, y, m| (x + m - y) % m),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.mul(b)),
            _ => residue_op(self, o, |x, y, m| x * y % m),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(a.neg()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Residue { value, modulus } => write!(f, "{value} mod {modulus}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display() {
        assert_eq!(Scalar::ratio(6, 8).to_string(), "3/4");
        assert_eq!(Scalar::ratio(-4, -2).to_string(), "2");
        assert_eq!(
            Scalar::from_i64(FieldDescriptor::PrimeField(5), 7).to_string(),
            "2 mod 5"
        );
    }

    #[test]
    fn overflow_promotes() {
        let big = Scalar::Rational(Rational::Small(i64::MAX, 1));
        let sq = &big * &big;
        assert!(matches!(sq, Scalar::Rational(Rational::Big(_))));
        let back = sq.div(&big);
        assert_eq!(back, big);
        let tiny = Scalar::ratio(1, i64::MAX);
        assert_eq!(
            &(&tiny * &big) - &Scalar::one(FieldDescriptor::Rationals),
            Scalar::zero(FieldDescriptor::Rationals)
        );
    }

    #[test]
    fn residues() {
        let f5 = FieldDescriptor::PrimeField(5);
        let two = Scalar::from_i64(f5, 2);
        assert_eq!(two.inv().unwrap(), Scalar::from_i64(f5, 3));
        let one = Scalar::one(f5);
        let four = &two * &two;
        assert!((&one + &four).is_zero());
        assert_eq!(-&two, Scalar::from_i64(f5, 3));
    }
}
