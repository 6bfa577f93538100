use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound on `p^k` accepted by [`FieldSpec::new`].
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 20;

/// Fields up to this size get exp/log tables.
const LOG_TABLE_LIMIT: u32 = 1 << 16;
/// Fields up to this size get full addition and multiplication tables.
const FULL_TABLE_LIMIT: u32 = 256;

/// An element of GF(p^k), stored as the base-p integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
/// of its residue coefficients. The encoding is a bijection, so equality is coefficient-wise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw index without checking it against any field.
    #[inline]
    pub const fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    #[inline]
    pub const fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
}

struct LogTables {
    // exp has length 2(q-1) so that log a + log b never needs a reduction
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct FullTables {
    add: Vec<u32>,
    mul: Vec<u32>,
}

struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    neg: Vec<u32>,
    logs: Option<LogTables>,
    full: Option<FullTables>,
    /// Prime factors of q - 1.
    unit_primes: Vec<u64>,
}

/// A concrete finite field GF(p^k) with a fixed defining polynomial.
///
/// The modulus is the lexicographically smallest monic irreducible of degree `k`,
/// comparing coefficients from the constant term upward. Cloning is cheap.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldData>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("k", &self.inner.k)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d) || d.saturating_mul(*d) > q)?;
    let p = if q.is_multiple_of(p) { p } else { q };
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `f` modulo the monic `g` over GF(p); both low-to-high.
fn rem_mod_p(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = r.pop().unwrap() % p64;
        if c != 0 {
            let off = r.len() - dg;
            for (j, &gj) in g[..dg].iter().enumerate() {
                r[off + j] = (r[off + j] + (p64 - c) * gj as u64) % p64;
            }
        }
    }
    r.into_iter().map(|c| (c % p64) as u32).collect()
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    if k <= 1 {
        return k == 1;
    }
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                g.push((x % p as u64) as u32);
                x /= p as u64;
            }
            g.push(1);
            if rem_mod_p(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let total = (p as u64).pow(k);
    for idx in 0..total {
        // c_0 is the most significant digit so that the scan is lexicographic
        // from the constant term upward
        let mut coeffs = vec![0u32; k as usize + 1];
        let mut x = idx;
        for j in (0..k as usize).rev() {
            coeffs[j] = (x % p as u64) as u32;
            x /= p as u64;
        }
        coeffs[k as usize] = 1;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// GF(p^k) with the default size bound.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        Self::with_bound(p, k, DEFAULT_FIELD_BOUND)
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    /// The field with `q` elements, `q` a prime power.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, k)
    }

    pub fn with_bound(p: u64, k: u32, bound: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let too_large = Error::FieldTooLarge { p, k, bound };
        let q = p.checked_pow(k).ok_or(too_large.clone())?;
        if q > bound || q > u32::MAX as u64 {
            return Err(too_large);
        }
        let (p, q) = (p as u32, q as u32);
        let modulus = if k == 1 { vec![0, 1] } else { smallest_irreducible(p, k) };
        let mut data = FieldData {
            p,
            k,
            q,
            modulus,
            neg: Vec::new(),
            logs: None,
            full: None,
            unit_primes: prime_factors(q as u64 - 1),
        };
        data.neg = (0..q).map(|a| data.neg_slow(a)).collect();
        if q <= LOG_TABLE_LIMIT {
            data.logs = Some(data.build_logs());
        }
        if q <= FULL_TABLE_LIMIT {
            data.full = Some(data.build_full());
        }
        Ok(FieldSpec { inner: Arc::new(data) })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.inner.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Coefficients of the defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.inner.q
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.inner.q {
            Ok(FieldElement(index))
        } else {
            Err(Error::NotInField { index, q: self.inner.q })
        }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.inner.q).map(FieldElement)
    }

    pub fn units(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.inner.q).map(FieldElement)
    }

    /// The image of an integer under Z -> GF(p).
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// Element with the given residue coefficients (constant first), reduced
    /// modulo `p` and the defining polynomial.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> FieldElement {
        let p = self.inner.p as i64;
        let reduced: Vec<u32> = coeffs.iter().map(|c| c.rem_euclid(p) as u32).collect();
        let r = if reduced.len() > self.inner.k as usize {
            rem_mod_p(&reduced, &self.inner.modulus, self.inner.p)
        } else {
            reduced
        };
        FieldElement(self.inner.encode(&r))
    }

    /// Residue coefficients of `a`, constant first, always of length `k`.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        self.inner.decode(a.0)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.inner.add(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.inner.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.inner.mul(a.0, b.0))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::InverseOfZero);
        }
        Ok(FieldElement(self.inner.inv(a.0)))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Checked entry point: validates membership of the operands before computing.
    /// `b` is ignored by the unary operations.
    pub fn arith(&self, op: FieldOp, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        for x in [a, b] {
            self.element(x.0)?;
        }
        match op {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Sub => Ok(self.sub(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Neg => Ok(self.neg(a)),
            FieldOp::Inv => self.inv(a),
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, z: FieldElement) -> Result<u64> {
        self.element(z.0)?;
        if z.is_zero() {
            return Err(Error::InverseOfZero);
        }
        let mut ord = self.inner.q as u64 - 1;
        for &r in &self.inner.unit_primes {
            while ord.is_multiple_of(r) && self.pow(z, ord / r) == FieldElement::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Every unit of exact multiplicative order `m`, in index order.
    pub fn roots_of_order(&self, m: u64) -> Vec<FieldElement> {
        if m == 0 || !(self.inner.q as u64 - 1).is_multiple_of(m) {
            return Vec::new();
        }
        self.units().filter(|&z| self.mult_order(z).ok() == Some(m)).collect()
    }

    /// Parses literals such as `2`, `t`, `1+2*t`, `t^2+t+1` (powers of `t` are reduced).
    pub fn parse_element(&self, literal: &str) -> Result<FieldElement> {
        let fail = |reason: &str| Error::Parse { literal: literal.to_string(), reason: reason.to_string() };
        let s: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(fail("empty literal"));
        }
        let mut acc = FieldElement::ZERO;
        let mut rest = s.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let sign = match rest.as_bytes()[0] {
                b'+' => {
                    rest = &rest[1..];
                    1
                }
                b'-' => {
                    rest = &rest[1..];
                    -1
                }
                _ if first => 1,
                _ => return Err(fail("expected + or -")),
            };
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            if term.is_empty() {
                return Err(fail("empty term"));
            }
            let (coef, power) = match term.split_once('t') {
                None => (term, None),
                Some((c, pw)) => {
                    let c = c.strip_suffix('*').unwrap_or(c);
                    let e = if pw.is_empty() {
                        1
                    } else {
                        pw.strip_prefix('^').and_then(|e| e.parse::<u64>().ok()).ok_or_else(|| fail("bad exponent"))?
                    };
                    (c, Some(e))
                }
            };
            let c: i64 = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| fail("bad coefficient"))? };
            let mut value = self.from_int(sign * c);
            if let Some(e) = power {
                let t = self.from_coeffs(&[0, 1]);
                value = self.mul(value, self.pow(t, e));
            }
            acc = self.add(acc, value);
        }
        Ok(acc)
    }

    /// Canonical literal: nonzero terms from the constant term upward, e.g. `1+2*t^2`.
    pub fn format_element(&self, a: FieldElement) -> String {
        let coeffs = self.coeffs(a);
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            terms.push(match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}*t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}*t^{i}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

impl FieldData {
    fn decode(&self, mut a: u32) -> Vec<u32> {
        let mut out = vec![0; self.k as usize];
        for c in out.iter_mut() {
            *c = a % self.p;
            a /= self.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn neg_slow(&self, a: u32) -> u32 {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let c: Vec<u32> = self.decode(a).iter().map(|&c| (self.p - c) % self.p).collect();
        self.encode(&c)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as u32;
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let c: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&c)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let p = self.p as u64;
        let mut prod = vec![0u32; 2 * self.k as usize - 1];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + u as u64 * v as u64) % p) as u32;
            }
        }
        self.encode(&rem_mod_p(&prod, &self.modulus, self.p))
    }

    fn build_logs(&self) -> LogTables {
        let q = self.q;
        let order = q as u64 - 1;
        let is_primitive = |g: u32| {
            self.unit_primes.iter().all(|&r| {
                let mut e = order / r;
                let (mut base, mut acc) = (g, 1u32);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul_slow(acc, base);
                    }
                    base = self.mul_slow(base, base);
                    e >>= 1;
                }
                acc != 1
            })
        };
        let g = (1..q).find(|&g| is_primitive(g)).expect("unit group is cyclic");
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for (i, e) in exp.iter_mut().take(n).enumerate() {
            *e = x;
            log[x as usize] = i as u32;
            x = self.mul_slow(x, g);
        }
        for i in n..exp.len() {
            exp[i] = exp[i - n];
        }
        LogTables { exp, log }
    }

    fn build_full(&self) -> FullTables {
        let q = self.q as usize;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = self.add_slow(a as u32, b as u32);
                mul[a * q + b] = self.mul_via_logs(a as u32, b as u32);
            }
        }
        FullTables { add, mul }
    }

    #[inline]
    fn mul_via_logs(&self, a: u32, b: u32) -> u32 {
        match &self.logs {
            Some(t) => {
                if a == 0 || b == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
                }
            }
            None => self.mul_slow(a, b),
        }
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        match &self.full {
            Some(t) => t.add[(a * self.q + b) as usize],
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.full {
            Some(t) => t.mul[(a * self.q + b) as usize],
            None => self.mul_via_logs(a, b),
        }
    }

    fn inv(&self, a: u32) -> u32 {
        match &self.logs {
            Some(t) => {
                let n = self.q - 1;
                t.exp[((n - t.log[a as usize]) % n) as usize]
            }
            None => {
                let mut e = self.q as u64 - 2;
                let (mut base, mut acc) = (a, 1u32);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul_slow(acc, base);
                    }
                    base = self.mul_slow(base, base);
                    e >>= 1;
                }
                acc
            }
        }
    }
}
