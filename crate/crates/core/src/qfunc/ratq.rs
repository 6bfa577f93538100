use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::qfunc::PolyQ;

/// A reduced rational function `num / den` in `q`.
///
/// Canonical form: `gcd(num, den)` is 1 in `Z[q]` (no common factor and no common integer
/// content), `den` has a positive leading coefficient, and zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatQ {
    num: PolyQ,
    den: PolyQ,
}

impl RatQ {
    pub fn new(num: PolyQ, den: PolyQ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: PolyQ, den: PolyQ) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        if den.leading().unwrap().is_negative() {
            num = -&num;
            den = -&den;
        }
        RatQ { num, den }
    }

    /// Trusts the caller that `num / den` is already in canonical form.
    pub(crate) fn from_reduced(num: PolyQ, den: PolyQ) -> Self {
        debug_assert!(den.leading().is_some_and(|l| l.is_positive()));
        if num.is_zero() {
            return Self::zero();
        }
        RatQ { num, den }
    }

    pub fn zero() -> Self {
        RatQ { num: PolyQ::zero(), den: PolyQ::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(PolyQ::one())
    }

    pub fn from_poly(p: PolyQ) -> Self {
        RatQ { num: p, den: PolyQ::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(PolyQ::constant(BigInt::from(n)))
    }

    /// `q^e` for any integer `e`.
    pub fn q_pow(e: i64) -> Self {
        if e >= 0 {
            Self::from_poly(PolyQ::q_pow(e as usize))
        } else {
            RatQ { num: PolyQ::one(), den: PolyQ::q_pow(e.unsigned_abs() as usize) }
        }
    }

    pub fn num(&self) -> &PolyQ {
        &self.num
    }

    pub fn den(&self) -> &PolyQ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::normalized(&self.num + &other.num, self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        let a = other.den.exact_div(&g).expect("gcd divides");
        let b = self.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &a) + &(&other.num * &b);
        Self::normalized(num, &self.den * &a)
    }

    pub fn neg(&self) -> Self {
        RatQ { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_poly() && other.is_poly() {
            return Self::from_poly(&self.num * &other.num);
        }
        // cancel across the diagonal first so that the final reduction stays small
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let a = self.num.exact_div(&g1).expect("gcd divides");
        let d = other.den.exact_div(&g1).expect("gcd divides");
        let c = other.num.exact_div(&g2).expect("gcd divides");
        let b = self.den.exact_div(&g2).expect("gcd divides");
        Self::normalized(&a * &c, &b * &d)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn mul_poly(&self, p: &PolyQ) -> Self {
        if let Some(rest) = p.exact_div(&self.den) {
            return Self::from_poly(&self.num * &rest);
        }
        self.mul(&Self::from_poly(p.clone()))
    }

    /// Exact value at an integer point; fails where the denominator vanishes.
    pub fn eval(&self, q: &BigInt) -> Result<BigRational> {
        let d = self.den.eval(q);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::new(self.num.eval(q), d))
    }
}

fn wrap(p: &PolyQ) -> String {
    if p.term_count() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

impl fmt::Display for RatQ {
    /// `num / den`, parenthesizing multi-term polynomials; plain `num` when `den = 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{} / {}", wrap(&self.num), wrap(&self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq(c: &[i64]) -> PolyQ {
        PolyQ::from_i64s(c)
    }

    fn r(n: &[i64], d: &[i64]) -> RatQ {
        RatQ::new(pq(n), pq(d)).unwrap()
    }

    #[test]
    fn normalization() {
        // (q^2 - 1) / (2q - 2) = (q + 1) / 2
        assert_eq!(r(&[-1, 0, 1], &[-2, 2]), r(&[1, 1], &[2]));
        let x = r(&[1, 1], &[-2]);
        assert_eq!(x.num(), &pq(&[-1, -1]));
        assert_eq!(x.den(), &pq(&[2]));
        assert_eq!(r(&[], &[5, 1]), RatQ::zero());
        assert_eq!(RatQ::new(pq(&[1]), PolyQ::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn negative_powers_clear() {
        // 1 - q^{-1} = (q - 1) / q
        let f1 = RatQ::one().sub(&RatQ::q_pow(-1));
        assert_eq!(f1, r(&[-1, 1], &[0, 1]));
        assert_eq!(f1.inv().unwrap().to_string(), "q / (q - 1)");
    }

    #[test]
    fn display() {
        assert_eq!(r(&[-1, 2], &[-1, 1]).to_string(), "(2*q - 1) / (q - 1)");
        assert_eq!(RatQ::one().to_string(), "1");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat() -> impl Strategy<Value = RatQ> {
            (proptest::collection::vec(-5i64..6, 1..5), proptest::collection::vec(-5i64..6, 1..5)).prop_filter_map(
                "nonzero",
                |(n, d)| {
                    let (n, d) = (PolyQ::from_i64s(&n), PolyQ::from_i64s(&d));
                    (!n.is_zero() && !d.is_zero()).then(|| RatQ::new(n, d).unwrap())
                },
            )
        }

        proptest! {
            #[test]
            fn times_inverse_is_one(a in rat()) {
                prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            }

            #[test]
            fn normalization_idempotent(a in rat()) {
                let again = RatQ::new(a.num().clone(), a.den().clone()).unwrap();
                prop_assert_eq!(again, a);
            }

            #[test]
            fn field_laws(a in rat(), b in rat(), c in rat()) {
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                prop_assert_eq!(a.add(&b).sub(&b), a.clone());
                prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a);
            }

            #[test]
            fn evaluation_is_a_homomorphism(a in rat(), b in rat(), q in 2i64..40) {
                let q = BigInt::from(q);
                if let (Ok(x), Ok(y), Ok(s), Ok(p)) = (a.eval(&q), b.eval(&q), a.add(&b).eval(&q), a.mul(&b).eval(&q)) {
                    prop_assert_eq!(s, &x + &y);
                    prop_assert_eq!(p, x * y);
                }
            }
        }
    }
}
