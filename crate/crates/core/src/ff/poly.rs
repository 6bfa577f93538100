use std::fmt::Write;

use crate::error::{Error, Result};
use crate::ff::{FieldElement, FieldSpec};

/// A univariate polynomial over a finite field, coefficients constant-first.
///
/// Canonical: the last stored coefficient is nonzero; the zero polynomial stores nothing
/// and has degree `None`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyFF {
    coeffs: Vec<FieldElement>,
}

impl PolyFF {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyFF { coeffs }
    }

    pub fn zero() -> Self {
        PolyFF { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyFF { coeffs: vec![FieldElement::ONE] }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        PolyFF { coeffs: vec![FieldElement::ZERO, FieldElement::ONE] }
    }

    /// `t - c`.
    pub fn linear(field: &FieldSpec, c: FieldElement) -> Self {
        PolyFF { coeffs: vec![field.neg(c), FieldElement::ONE] }
    }

    /// Builds from raw element indices, constant first.
    pub fn from_indices(indices: &[u32]) -> Self {
        Self::new(indices.iter().map(|&i| FieldElement::from_index(i)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&FieldElement::ONE)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn add(&self, other: &Self, f: &FieldSpec) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self, f: &FieldSpec) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, c: FieldElement, f: &FieldSpec) -> Self {
        Self::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self, f: &FieldSpec) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(out)
    }

    /// Euclidean division: `self = quot * divisor + rem` with `deg rem < deg divisor`.
    pub fn div_rem(&self, divisor: &Self, f: &FieldSpec) -> Result<(Self, Self)> {
        let lead = divisor.leading().ok_or(Error::DivisionByZero)?;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = f.inv(lead)?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![FieldElement::ZERO; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = f.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = f.sub(rem[i + j], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, divisor: &Self, f: &FieldSpec) -> Result<Self> {
        Ok(self.div_rem(divisor, f)?.1)
    }

    /// Scales to a monic polynomial; zero stays zero.
    pub fn monic(&self, f: &FieldSpec) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) if l == FieldElement::ONE => self.clone(),
            Some(l) => self.scale(f.inv(l).expect("leading coefficient is nonzero"), f),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self, f: &FieldSpec) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn divides(&self, other: &Self, f: &FieldSpec) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self, f).map(|r| r.is_zero()).unwrap_or(false)
    }

    pub fn eval(&self, x: FieldElement, f: &FieldSpec) -> FieldElement {
        self.coeffs.iter().rev().fold(FieldElement::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `g(c t)`: coefficient `i` is scaled by `c^i`.
    pub fn scale_variable(&self, c: FieldElement, f: &FieldSpec) -> Self {
        let mut pw = FieldElement::ONE;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &a in &self.coeffs {
            out.push(f.mul(a, pw));
            pw = f.mul(pw, c);
        }
        Self::new(out)
    }

    pub fn display(&self, f: &FieldSpec) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" + ");
            }
            let lit = f.format_element(c);
            let coef = if lit.contains('+') { format!("({lit})") } else { lit };
            match (i, coef.as_str()) {
                (0, _) => s.push_str(&coef),
                (_, "1") => {}
                _ => {
                    let _ = write!(s, "{coef}*");
                }
            }
            match i {
                0 => {}
                1 => s.push('x'),
                _ => {
                    let _ = write!(s, "x^{i}");
                }
            }
        }
        s
    }
}

/// Membership in `P_m`: the monic `g = t^d + c_1 t^{d-1} + ... + c_d` has `c_j = 0`
/// whenever `m` does not divide `j`. Equivalently `g(t) = t^b G(t^m)`.
pub fn pm_member(g: &PolyFF, m: u64) -> Result<bool> {
    if !g.is_monic() {
        return Err(Error::NotMonic);
    }
    if m == 0 {
        return Err(Error::Invalid("m must be positive".into()));
    }
    let d = g.coeffs.len() - 1;
    Ok(g.coeffs.iter().enumerate().all(|(i, c)| c.is_zero() || ((d - i) as u64).is_multiple_of(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f: &FieldSpec, c: &[i64]) -> PolyFF {
        PolyFF::new(c.iter().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn division_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        let (q, r) = p(&f3, &[-1, 0, 1]).div_rem(&p(&f3, &[-1, 1]), &f3).unwrap();
        assert_eq!(q, p(&f3, &[1, 1]));
        assert!(r.is_zero());
        assert_eq!(p(&f3, &[1]).div_rem(&PolyFF::zero(), &f3), Err(Error::DivisionByZero));
        assert!(p(&f3, &[1, 2, 1]).mul(&PolyFF::zero(), &f3).is_zero());
        assert_eq!(PolyFF::zero().degree(), None);
    }

    #[test]
    fn gcd_example() {
        let f2 = FieldSpec::prime(2).unwrap();
        let g = p(&f2, &[0, 1, 1]).gcd(&p(&f2, &[1, 0, 1]), &f2);
        assert_eq!(g, p(&f2, &[1, 1]));
    }

    #[test]
    fn pm_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        assert!(pm_member(&p(&f3, &[0, 2, 0, 1]), 2).unwrap());
        assert!(!pm_member(&p(&f3, &[0, 1, 1]), 2).unwrap());
        assert!(pm_member(&p(&f3, &[2, 1, 1]), 1).unwrap());
        assert_eq!(pm_member(&p(&f3, &[0, 2]), 2), Err(Error::NotMonic));
    }

    /// Does `g = t^b * G(t^m)` for some `b` and monic `G`? Search over every `b`.
    fn pm_by_factoring(g: &PolyFF, m: usize) -> bool {
        let d = g.degree().unwrap();
        (0..=d).any(|b| {
            if !(d - b).is_multiple_of(m) {
                return false;
            }
            // the low b coefficients must vanish and the rest must sit on multiples of m
            (0..b).all(|i| g.coeff(i).is_zero()) && (b..=d).all(|i| (i - b) % m == 0 || g.coeff(i).is_zero())
        })
    }

    fn all_monic(f: &FieldSpec, deg: usize) -> Vec<PolyFF> {
        let q = f.q() as usize;
        (0..q.pow(deg as u32))
            .map(|mut idx| {
                let mut c = Vec::with_capacity(deg + 1);
                for _ in 0..deg {
                    c.push(FieldElement::from_index((idx % q) as u32));
                    idx /= q;
                }
                c.push(FieldElement::ONE);
                PolyFF::new(c)
            })
            .collect()
    }

    #[test]
    fn pm_coefficient_test_matches_factored_form() {
        for q in [2, 3] {
            let f = FieldSpec::prime(q).unwrap();
            for deg in 0..=6 {
                for g in all_monic(&f, deg) {
                    for m in 1..=7 {
                        assert_eq!(pm_member(&g, m as u64).unwrap(), pm_by_factoring(&g, m), "{g:?} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn scale_variable_matches_substitution() {
        let f5 = FieldSpec::prime(5).unwrap();
        let g = p(&f5, &[3, 1, 4, 1]);
        let c = f5.from_int(2);
        let h = g.scale_variable(c, &f5);
        for x in f5.elements() {
            assert_eq!(h.eval(x, &f5), g.eval(f5.mul(c, x), &f5));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn poly5() -> impl Strategy<Value = Vec<i64>> {
            proptest::collection::vec(0i64..5, 0..8)
        }

        proptest! {
            #[test]
            fn division_identity(a in poly5(), b in poly5()) {
                let f = FieldSpec::prime(5).unwrap();
                let (a, b) = (p(&f, &a), p(&f, &b));
                prop_assume!(!b.is_zero());
                let (q, r) = a.div_rem(&b, &f).unwrap();
                prop_assert_eq!(q.mul(&b, &f).add(&r, &f), a);
                prop_assert!(r.degree() < b.degree());
            }

            #[test]
            fn gcd_divides_both(a in poly5(), b in poly5()) {
                let f = FieldSpec::new(2, 2).unwrap();
                let a = PolyFF::new(a.iter().map(|&x| FieldElement::from_index((x % 4) as u32)).collect());
                let b = PolyFF::new(b.iter().map(|&x| FieldElement::from_index((x % 4) as u32)).collect());
                let g = a.gcd(&b, &f);
                prop_assert!(g.divides(&a, &f) && g.divides(&b, &f));
                prop_assert!(g.is_zero() || g.is_monic());
            }
        }
    }
}
