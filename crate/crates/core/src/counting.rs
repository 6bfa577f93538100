//! Closed-form counts at a concrete `q`: partition sums for `|S|`, `|U|` and `|N|`, and
//! `|K|` through the Fitting convolution `|K_n| = sum_{s+t=n} h(s,t) |N_s| |U_t|`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Which family of pairs is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CountSet {
    /// All pairs with `AB = ζBA`.
    K,
    /// Pairs with `A` nonsingular.
    U,
    /// Pairs with `A` nilpotent.
    N,
    /// Similarity classes `β` with `B ~ ζB` for `B ∈ β`.
    S,
}

impl fmt::Display for CountSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CountSet::K => "K",
            CountSet::U => "U",
            CountSet::N => "N",
            CountSet::S => "S",
        };
        f.write_str(s)
    }
}

impl FromStr for CountSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" | "k" => Ok(CountSet::K),
            "U" | "u" => Ok(CountSet::U),
            "N" | "n" => Ok(CountSet::N),
            "S" | "s" => Ok(CountSet::S),
            _ => Err(Error::Invalid(format!("unknown set {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Series,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Series => "series",
            Method::Oracle => "oracle",
        })
    }
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// One labeled count, with enough parameters to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub set: CountSet,
    pub n: usize,
    pub q: u64,
    pub m: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<String>,
    pub method: Method,
    #[serde(serialize_with = "as_decimal")]
    pub value: BigUint,
}

/// A partition of `n` by multiplicities: `a_i` parts equal to `i`, so `n = sum i a_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    /// `mult[i - 1] = a_i`, without trailing zeros.
    mult: Vec<usize>,
}

impl Partition {
    pub fn from_multiplicities(mut mult: Vec<usize>) -> Self {
        while mult.last() == Some(&0) {
            mult.pop();
        }
        Partition { mult }
    }

    pub fn from_parts(parts: &[usize]) -> Self {
        let mut mult = vec![0; parts.iter().copied().max().unwrap_or(0)];
        for &p in parts.iter().filter(|&&p| p > 0) {
            mult[p - 1] += 1;
        }
        Self::from_multiplicities(mult)
    }

    /// `a_i`; zero for `i = 0` or beyond the largest part.
    pub fn multiplicity(&self, i: usize) -> usize {
        i.checked_sub(1).and_then(|j| self.mult.get(j)).copied().unwrap_or(0)
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.mult
    }

    pub fn n(&self) -> usize {
        self.mult.iter().enumerate().map(|(i, a)| (i + 1) * a).sum()
    }

    pub fn largest_part(&self) -> usize {
        self.mult.len()
    }

    /// `(part size, multiplicity)` for the sizes that occur, smallest first.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mult.iter().enumerate().filter(|(_, &a)| a > 0).map(|(i, &a)| (i + 1, a))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .flat_map(|(i, a)| std::iter::repeat_n(i.to_string(), a))
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Every partition of `n` once, in increasing lexicographic order of `(a_1, a_2, ..., a_n)`.
pub fn partitions(n: usize) -> impl Iterator<Item = Partition> {
    let mut out = Vec::new();
    let mut mult = vec![0usize; n];
    fill(1, n, &mut mult, &mut out);
    out.into_iter()
}

fn fill(i: usize, remaining: usize, mult: &mut [usize], out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition::from_multiplicities(mult.to_vec()));
        return;
    }
    if i > mult.len() {
        return;
    }
    for a in 0..=remaining / i {
        let rest = remaining - a * i;
        // parts larger than i must be able to absorb the rest
        if rest != 0 && rest < i + 1 {
            continue;
        }
        mult[i - 1] = a;
        fill(i + 1, rest, mult, out);
    }
    mult[i - 1] = 0;
}

pub fn partition_count(n: usize) -> usize {
    partitions(n).count()
}

/// `|GL_n(F_q)|`.
pub fn gl_order(n: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let qn = q.pow(n as u32);
    (0..n).fold(BigUint::one(), |acc, j| acc * (&qn - q.pow(j as u32)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum MemoKey {
    Gl(usize),
    S(usize, u64),
    N(usize),
}

/// Closed-form evaluator at a fixed `q`, with a memo table shared by all calls.
pub struct ClosedForm {
    q: u64,
    memo: Mutex<HashMap<MemoKey, BigUint>>,
}

impl ClosedForm {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Invalid(format!("q must be at least 2, got {q}")));
        }
        Ok(ClosedForm { q, memo: Mutex::new(HashMap::new()) })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    fn memoized(&self, key: MemoKey, compute: impl FnOnce() -> Result<BigUint>) -> Result<BigUint> {
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        self.memo.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    pub fn gl_order(&self, n: usize) -> BigUint {
        self.memoized(MemoKey::Gl(n), || Ok(gl_order(n, self.q))).expect("infallible")
    }

    /// `h(s,t) = |GL_{s+t}| / (|GL_s| |GL_t|)`, the number of ordered complementary subspace
    /// pairs of dimensions `s` and `t`.
    pub fn h_subspace_pairs(&self, s: usize, t: usize) -> Result<BigUint> {
        let num = self.gl_order(s + t);
        let den = self.gl_order(s) * self.gl_order(t);
        let (quot, rem) = num.div_rem(&den);
        if !rem.is_zero() {
            return Err(Error::Integrality(format!("h({s},{t}) at q={}", self.q)));
        }
        Ok(quot)
    }

    /// `|S_{ζ,n}| = sum over (b_i) with sum i b_i = n of q^(sum_i floor(b_i / m))`.
    pub fn count_s(&self, n: usize, m: u64) -> Result<BigUint> {
        check_m(m)?;
        self.memoized(MemoKey::S(n, m), || {
            let q = BigUint::from(self.q);
            Ok(partitions(n)
                .map(|b| {
                    let e: u64 = b.multiplicities().iter().map(|&bi| bi as u64 / m).sum();
                    q.pow(e as u32)
                })
                .sum())
        })
    }

    pub fn count_u(&self, n: usize, m: u64) -> Result<BigUint> {
        Ok(self.gl_order(n) * self.count_s(n, m)?)
    }

    /// `|N_n| = |GL_n| sum_{π ⊢ n} prod_i 1/f(a_i)`; independent of ζ.
    pub fn count_n(&self, n: usize) -> Result<BigUint> {
        self.memoized(MemoKey::N(n), || {
            let q = BigInt::from(self.q);
            let inv_f: Vec<BigRational> = (0..=n)
                .map(|a| {
                    let f = (1..=a as u32).fold(BigRational::one(), |acc, j| {
                        acc * (BigRational::one() - BigRational::new(BigInt::one(), q.pow(j)))
                    });
                    f.recip()
                })
                .collect();
            let sum: BigRational = partitions(n)
                .map(|p| p.multiplicities().iter().fold(BigRational::one(), |acc, &a| acc * &inv_f[a]))
                .sum();
            let total = sum * BigRational::from_integer(BigInt::from(self.gl_order(n)));
            if !total.is_integer() {
                return Err(Error::Integrality(format!("|N_{n}| at q={} is {total}", self.q)));
            }
            Ok(total.to_integer().to_biguint().expect("counts are nonnegative"))
        })
    }

    pub fn count_k(&self, n: usize, m: u64) -> Result<BigUint> {
        let mut total = BigUint::zero();
        for s in 0..=n {
            let t = n - s;
            total += self.h_subspace_pairs(s, t)? * self.count_n(s)? * self.count_u(t, m)?;
        }
        Ok(total)
    }

    pub fn count(&self, set: CountSet, n: usize, m: u64) -> Result<BigUint> {
        match set {
            CountSet::K => self.count_k(n, m),
            CountSet::U => self.count_u(n, m),
            CountSet::N => self.count_n(n),
            CountSet::S => self.count_s(n, m),
        }
    }

    pub fn report(&self, set: CountSet, n: usize, m: u64) -> Result<CountReport> {
        Ok(CountReport { set, n, q: self.q, m, zeta: None, method: Method::ClosedForm, value: self.count(set, n, m)? })
    }
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        Err(Error::Invalid("m must be positive".into()))
    } else {
        Ok(())
    }
}

pub fn h_subspace_pairs(s: usize, t: usize, q: u64) -> Result<BigUint> {
    ClosedForm::new(q)?.h_subspace_pairs(s, t)
}

pub fn count_s(n: usize, m: u64, q: u64) -> Result<BigUint> {
    ClosedForm::new(q)?.count_s(n, m)
}

pub fn count_u(n: usize, m: u64, q: u64) -> Result<BigUint> {
    ClosedForm::new(q)?.count_u(n, m)
}

pub fn count_n(n: usize, q: u64) -> Result<BigUint> {
    ClosedForm::new(q)?.count_n(n)
}

pub fn count_k(n: usize, m: u64, q: u64) -> Result<BigUint> {
    ClosedForm::new(q)?.count_k(n, m)
}
