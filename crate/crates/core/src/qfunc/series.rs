use num_bigint::BigInt;

use crate::counting::CountSet;
use crate::error::{Error, Result};
use crate::qfunc::scaled::Basis;
use crate::qfunc::{gl_order_poly, PolyQ, RatQ};

/// Note attached to every polynomial-in-q count: the formula is a field count only for
/// fields that contain a unit of order `m`.
pub const VALIDITY_NOTE: &str = "requires m | q-1";

/// A power series in `x` with `RatQ` coefficients, known exactly modulo `x^(order+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesX {
    order: usize,
    coeffs: Vec<RatQ>,
}

impl SeriesX {
    /// Pads with zeros (or truncates) to `order + 1` coefficients.
    pub fn new(order: usize, mut coeffs: Vec<RatQ>) -> Self {
        coeffs.resize(order + 1, RatQ::zero());
        SeriesX { order, coeffs }
    }

    pub fn one(order: usize) -> Self {
        Self::new(order, vec![RatQ::one()])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize) -> Result<&RatQ> {
        self.coeffs.get(i).ok_or(Error::BeyondTruncation { index: i, order: self.order })
    }

    pub fn coeffs(&self) -> &[RatQ] {
        &self.coeffs
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch(self.order, other.order))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(SeriesX { order: self.order, coeffs })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let basis = Basis::new(self.order);
        if let (Some(a), Some(b)) = (basis.to_scaled(self), basis.to_scaled(other)) {
            return Ok(basis.to_series(&basis.mul(&a, &b)));
        }
        self.mul_generic(other)
    }

    fn mul_generic(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let n = self.order;
        let mut out = vec![RatQ::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(SeriesX { order: n, coeffs: out })
    }

    /// The series `f(x^i)`, truncated at the same order.
    pub fn dilate(&self, i: usize) -> Self {
        assert!(i >= 1, "dilation index must be positive");
        let mut out = vec![RatQ::zero(); self.order + 1];
        for (b, c) in self.coeffs.iter().enumerate() {
            match b.checked_mul(i) {
                Some(e) if e <= self.order => out[e] = c.clone(),
                _ => break,
            }
        }
        SeriesX { order: self.order, coeffs: out }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0].inv().map_err(|_| Error::NotInvertible)?;
        let mut out = vec![RatQ::zero(); self.order + 1];
        out[0] = c0.clone();
        for k in 1..=self.order {
            let mut acc = RatQ::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
                }
            }
            out[k] = acc.mul(&c0).neg();
        }
        Ok(SeriesX { order: self.order, coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inverse()?)
    }
}

/// `G_m(x; q) = (1 - x^m) / ((1 - x)(1 - q x^m))`, whose `x^b` coefficient is `q^floor(b/m)`.
pub fn factor_g(m: u64, order: usize) -> SeriesX {
    assert!(m >= 1, "m must be positive");
    let coeffs = (0..=order).map(|b| RatQ::from_poly(PolyQ::q_pow(b / m as usize))).collect();
    SeriesX::new(order, coeffs)
}

/// `1/f(a)` with `f(a) = (1 - q^-1)(1 - q^-2)...(1 - q^-a)`.
pub fn inverse_f(a: usize) -> RatQ {
    let f = (1..=a as i64).fold(RatQ::one(), |acc, j| acc.mul(&RatQ::one().sub(&RatQ::q_pow(-j))));
    f.inv().expect("f(a) is nonzero")
}

/// `H(x; q) = sum_a x^a / f(a)`.
pub fn factor_h(order: usize) -> SeriesX {
    SeriesX::new(order, (0..=order).map(inverse_f).collect())
}

/// `F_m = G_m * H`.
pub fn factor_f(m: u64, order: usize) -> SeriesX {
    factor_g(m, order).mul(&factor_h(order)).expect("same order")
}

/// `prod_{i=1}^{order} factor_at(i)(x^i)` modulo `x^(order+1)`.
///
/// The factor at index `i` only moves coefficients of degree `>= i`, so stopping at
/// `i = order` is exact.
pub fn series_product(order: usize, mut factor_at: impl FnMut(usize) -> Result<SeriesX>) -> Result<SeriesX> {
    let mut factors = Vec::with_capacity(order);
    for i in 1..=order {
        let factor = factor_at(i)?;
        if factor.order != order {
            return Err(Error::OrderMismatch(factor.order, order));
        }
        if !factor.coeffs[0].is_one() {
            return Err(Error::BadConstantTerm(i));
        }
        factors.push(factor);
    }
    let basis = Basis::new(order);
    let scaled: Option<Vec<Vec<PolyQ>>> = factors.iter().map(|f| basis.to_scaled(f)).collect();
    if let Some(scaled) = scaled {
        let acc =
            scaled.iter().enumerate().fold(basis.to_scaled(&SeriesX::one(order)).expect("one fits"), |acc, (i, f)| {
                basis.mul_dilated(&acc, f, i + 1)
            });
        return Ok(basis.to_series(&acc));
    }
    let mut acc = SeriesX::one(order);
    for (i, factor) in factors.iter().enumerate() {
        acc = acc.mul_generic(&factor.dilate(i + 1))?;
    }
    Ok(acc)
}

/// Provider of the per-index factors. Lets verification runs swap in altered factors.
pub trait FactorSource: Sync {
    fn g(&self, m: u64, order: usize) -> SeriesX;
    fn h(&self, order: usize) -> SeriesX;
}

/// The exact factors `G_m` and `H`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactFactors;

impl FactorSource for ExactFactors {
    fn g(&self, m: u64, order: usize) -> SeriesX {
        factor_g(m, order)
    }

    fn h(&self, order: usize) -> SeriesX {
        factor_h(order)
    }
}

/// Generating function of `|set_n| / |GL_n|` (for `S`, of `|S_n|` itself) to the given order.
pub fn series_for(set: CountSet, m: u64, order: usize) -> Result<SeriesX> {
    series_for_with(&ExactFactors, set, m, order)
}

pub fn series_for_with(src: &dyn FactorSource, set: CountSet, m: u64, order: usize) -> Result<SeriesX> {
    if m == 0 {
        return Err(Error::Invalid("m must be positive".into()));
    }
    let base = match set {
        CountSet::K => src.g(m, order).mul(&src.h(order))?,
        CountSet::U | CountSet::S => src.g(m, order),
        CountSet::N => src.h(order),
    };
    series_product(order, |_| Ok(base.clone()))
}

/// Turns the `x^n` coefficient of the set's series into the counting polynomial.
pub fn count_poly_from_series(set: CountSet, series: &SeriesX, n: usize) -> Result<PolyQ> {
    let c = series.coeff(n)?;
    let scaled = match set {
        CountSet::S => c.clone(),
        _ => c.mul_poly(&gl_order_poly(n)),
    };
    if !scaled.is_poly() {
        return Err(Error::Integrality(format!(
            "coefficient of x^{n} for {set} times |GL_{n}| leaves denominator {}",
            scaled.den()
        )));
    }
    Ok(scaled.num().clone())
}

/// The polynomial `q -> |set_{ζ,n}(F_q)|` for `ord(ζ) = m`.
pub fn count_poly(set: CountSet, m: u64, n: usize) -> Result<PolyQ> {
    count_poly_from_series(set, &series_for(set, m, n)?, n)
}

/// Counting polynomials for every `n <= n_max` from one series expansion.
pub fn count_polys(set: CountSet, m: u64, n_max: usize) -> Result<Vec<PolyQ>> {
    let series = series_for(set, m, n_max)?;
    (0..=n_max).map(|n| count_poly_from_series(set, &series, n)).collect()
}

pub fn count_eval(set: CountSet, m: u64, n: usize, q: u64) -> Result<BigInt> {
    Ok(count_poly(set, m, n)?.eval(&BigInt::from(q)))
}
