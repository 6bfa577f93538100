use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A polynomial in the formal variable `q` with integer coefficients, constant first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PolyQ {
    coeffs: Vec<BigInt>,
}

impl PolyQ {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        PolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c q^e`.
    pub fn monomial(c: BigInt, e: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); e];
        coeffs.push(c);
        Self::new(coeffs)
    }

    /// `q^e`.
    pub fn q_pow(e: usize) -> Self {
        Self::monomial(BigInt::one(), e)
    }

    /// `q^e - 1`.
    pub fn q_pow_minus_one(e: usize) -> Self {
        &Self::q_pow(e) - &Self::one()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Exponent of the lowest nonzero term; `None` for zero.
    pub fn q_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `q^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        PolyQ { coeffs }
    }

    /// Divides by `q^k`; the low `k` coefficients must vanish.
    fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        PolyQ { coeffs: self.coeffs[k.min(self.coeffs.len())..].to_vec() }
    }

    /// Nonnegative gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        Self::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    pub fn exact_div_scalar(&self, c: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            let (quot, rem) = a.div_rem(c);
            if !rem.is_zero() {
                return None;
            }
            out.push(quot);
        }
        Some(Self::new(out))
    }

    /// Quotient when `divisor` divides `self` in `Z[q]`, otherwise `None`.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let lead = divisor.leading()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        rem.iter().all(|c| c.is_zero()).then(|| Self::new(quot))
    }

    /// Pseudo-remainder: `lc(divisor)^(deg self - deg divisor + 1) * self mod divisor`.
    fn pseudo_rem(&self, divisor: &Self) -> Self {
        let dd = divisor.coeffs.len() - 1;
        let lead = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            for r in rem.iter_mut() {
                *r *= lead;
            }
            let off = rem.len() - dd;
            for (j, d) in divisor.coeffs[..dd].iter().enumerate() {
                rem[off + j] -= &top * d;
            }
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        Self::new(rem)
    }

    /// Greatest common divisor in `Z[q]`, normalized to a positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.with_positive_leading();
        }
        if other.is_zero() {
            return self.with_positive_leading();
        }
        let content = self.content().gcd(&other.content());
        let v = self.q_valuation().unwrap().min(other.q_valuation().unwrap());
        let a = self.shift_down(self.q_valuation().unwrap()).primitive_part();
        let b = other.shift_down(other.q_valuation().unwrap()).primitive_part();
        let (mut a, mut b) = if a.degree() >= b.degree() { (a, b) } else { (b, a) };
        while !b.is_constant() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        let core = if b.is_zero() { a } else { Self::one() };
        core.scale(&content).shift_up(v)
    }

    fn with_positive_leading(&self) -> Self {
        match self.leading() {
            Some(l) if l.is_negative() => -self,
            _ => self.clone(),
        }
    }

    pub fn eval(&self, q: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * q + c)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl fmt::Display for PolyQ {
    /// Terms in decreasing degree with explicit signs, e.g. `2*q^4 - q^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            match (first, c.is_negative()) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let var = match e {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{e}"),
            };
            if e == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyQ::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyQ::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        if self.is_zero() || rhs.is_zero() {
            return PolyQ::zero();
        }
        if self.coeffs.len().min(rhs.coeffs.len()) >= KRONECKER_MIN_LEN {
            return kronecker_mul(&self.coeffs, &rhs.coeffs);
        }
        schoolbook_mul(&self.coeffs, &rhs.coeffs)
    }
}

const KRONECKER_MIN_LEN: usize = 24;

fn schoolbook_mul(a: &[BigInt], b: &[BigInt]) -> PolyQ {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    PolyQ::new(out)
}

fn max_bits(c: &[BigInt]) -> u64 {
    c.iter().map(|x| x.bits()).max().unwrap_or(0)
}

/// Packs coefficients into one integer at `slot` bits per coefficient.
fn pack(c: &[BigInt], slot: u64) -> BigInt {
    let words = (c.len() as u64 * slot).div_ceil(64) as usize + 1;
    let mut pos = vec![0u64; words];
    let mut neg = vec![0u64; words];
    for (i, x) in c.iter().enumerate() {
        let target = if x.is_negative() { &mut neg } else { &mut pos };
        let offset = i as u64 * slot;
        for (w, digit) in x.magnitude().iter_u64_digits().enumerate() {
            let bit = offset + 64 * w as u64;
            let (idx, sh) = ((bit / 64) as usize, bit % 64);
            target[idx] |= digit << sh;
            if sh > 0 && digit >> (64 - sh) != 0 {
                target[idx + 1] |= digit >> (64 - sh);
            }
        }
    }
    let to_big = |v: Vec<u64>| BigInt::from(BigUint::from_slice(&to_u32(&v)));
    to_big(pos) - to_big(neg)
}

fn to_u32(v: &[u64]) -> Vec<u32> {
    v.iter().flat_map(|&w| [w as u32, (w >> 32) as u32]).collect()
}

/// Bits `[start, start + len)` of a little-endian word array.
fn read_bits(words: &[u64], start: u64, len: u64) -> BigUint {
    let n = len.div_ceil(64) as usize;
    let mut out = vec![0u64; n];
    for (k, o) in out.iter_mut().enumerate() {
        let bit = start + 64 * k as u64;
        let (idx, sh) = ((bit / 64) as usize, bit % 64);
        let lo = words.get(idx).copied().unwrap_or(0) >> sh;
        let hi = if sh > 0 { words.get(idx + 1).copied().unwrap_or(0) << (64 - sh) } else { 0 };
        *o = lo | hi;
    }
    let rem = len % 64;
    if rem > 0 {
        out[n - 1] &= (1u64 << rem) - 1;
    }
    BigUint::from_slice(&to_u32(&out))
}

/// Multiplication by substitution `q = 2^slot`; each slot holds one signed coefficient of
/// the product with room for its sign.
fn kronecker_mul(a: &[BigInt], b: &[BigInt]) -> PolyQ {
    let len = a.len() + b.len() - 1;
    let growth = 64 - (a.len().min(b.len()) as u64).leading_zeros() as u64;
    let slot = max_bits(a) + max_bits(b) + growth + 2;
    let prod = pack(a, slot) * pack(b, slot);
    let negative = prod.is_negative();
    let words: Vec<u64> = prod.magnitude().iter_u64_digits().collect();
    let half = BigUint::one() << (slot - 1);
    let full = BigUint::one() << slot;
    let mut carry = false;
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let mut chunk = read_bits(&words, i as u64 * slot, slot);
        if carry {
            chunk += 1u32;
        }
        let c = if chunk >= half {
            carry = true;
            BigInt::from(chunk) - BigInt::from(full.clone())
        } else {
            carry = false;
            BigInt::from(chunk)
        };
        out.push(if negative { -c } else { c });
    }
    PolyQ::new(out)
}

/// `|GL_n(F_q)| = (q^n - 1)(q^n - q)...(q^n - q^{n-1})` as a polynomial in `q`.
pub fn gl_order_poly(n: usize) -> PolyQ {
    (0..n).fold(PolyQ::one(), |acc, j| &acc * &(&PolyQ::q_pow(n) - &PolyQ::q_pow(j)))
}
