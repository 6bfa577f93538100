//! Gcd-free arithmetic for series whose `x^k` coefficient has a denominator dividing
//! `D_k = (q - 1)(q^2 - 1)...(q^k - 1)`. Each coefficient is held as its numerator over
//! `D_k`, so products become q-binomial convolutions of integer polynomials.

use crate::qfunc::{PolyQ, RatQ, SeriesX};

pub(crate) struct Basis {
    d: Vec<PolyQ>,
    /// `binom[n][k]` is the Gaussian binomial `D_n / (D_k D_{n-k})`.
    binom: Vec<Vec<PolyQ>>,
    /// `cyclo[j]` is the cyclotomic polynomial of index `j` (index 0 unused).
    cyclo: Vec<PolyQ>,
}

impl Basis {
    pub(crate) fn new(order: usize) -> Self {
        let mut d = vec![PolyQ::one()];
        for k in 1..=order {
            d.push(&d[k - 1] * &PolyQ::q_pow_minus_one(k));
        }
        let mut binom: Vec<Vec<PolyQ>> = vec![vec![PolyQ::one()]];
        for n in 1..=order {
            let prev = &binom[n - 1];
            let row = (0..=n)
                .map(|k| match k {
                    0 => PolyQ::one(),
                    _ if k == n => PolyQ::one(),
                    _ => &prev[k - 1] + &prev[k].shift_up(k),
                })
                .collect();
            binom.push(row);
        }
        let mut cyclo = vec![PolyQ::zero()];
        for j in 1..=order {
            let phi = (1..j)
                .filter(|e| j % e == 0)
                .fold(PolyQ::q_pow_minus_one(j), |acc, e| acc.exact_div(&cyclo[e]).expect("cyclotomic factor"));
            cyclo.push(phi);
        }
        Basis { d, binom, cyclo }
    }

    pub(crate) fn order(&self) -> usize {
        self.d.len() - 1
    }

    /// Numerators over `D_k`, or `None` when some coefficient does not fit.
    pub(crate) fn to_scaled(&self, s: &SeriesX) -> Option<Vec<PolyQ>> {
        if s.order() != self.order() {
            return None;
        }
        s.coeffs()
            .iter()
            .zip(&self.d)
            .map(
                |(c, dk)| {
                    if c.den() == dk {
                        Some(c.num().clone())
                    } else {
                        dk.exact_div(c.den()).map(|rest| c.num() * &rest)
                    }
                },
            )
            .collect()
    }

    pub(crate) fn mul(&self, a: &[PolyQ], b: &[PolyQ]) -> Vec<PolyQ> {
        self.mul_dilated(a, b, 1)
    }

    /// `a(x) * b(x^i)`.
    pub(crate) fn mul_dilated(&self, a: &[PolyQ], b: &[PolyQ], i: usize) -> Vec<PolyQ> {
        let order = self.order();
        // b_j moved to x^(ij) must be re-expressed over D_(ij)
        let moved: Vec<(usize, PolyQ)> = b
            .iter()
            .enumerate()
            .take_while(|(j, _)| i * j <= order)
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let lift = ((j + 1)..=(i * j)).fold(PolyQ::one(), |acc, e| &acc * &PolyQ::q_pow_minus_one(e));
                (i * j, c * &lift)
            })
            .collect();
        (0..=order)
            .map(|n| {
                let mut acc = PolyQ::zero();
                for (e, c) in moved.iter().take_while(|(e, _)| *e <= n) {
                    let x = &a[n - e];
                    if x.is_zero() {
                        continue;
                    }
                    let w = if *e == 0 || *e == n { c.clone() } else { c * &self.binom[n][*e] };
                    acc = &acc + &(x * &w);
                }
                acc
            })
            .collect()
    }

    /// The reduced rational function `s / D_k`.
    pub(crate) fn to_ratq(&self, s: &PolyQ, k: usize) -> RatQ {
        if s.is_zero() {
            return RatQ::zero();
        }
        let mut num = s.clone();
        let mut den = self.d[k].clone();
        for j in 1..=k {
            for _ in 0..k / j {
                match num.exact_div(&self.cyclo[j]) {
                    Some(rest) => {
                        num = rest;
                        den = den.exact_div(&self.cyclo[j]).expect("cyclotomic factor of D_k");
                    }
                    None => break,
                }
            }
        }
        RatQ::from_reduced(num, den)
    }

    pub(crate) fn to_series(&self, s: &[PolyQ]) -> SeriesX {
        SeriesX::new(self.order(), s.iter().enumerate().map(|(k, c)| self.to_ratq(c, k)).collect())
    }
}
