//! Invariant factors via the Smith normal form of `tI - A` over `F_q[t]`.

use crate::error::{Error, Result};
use crate::ff::{pm_member, FieldElement, FieldSpec, PolyFF};
use crate::linalg::MatrixFF;

/// The chain `g_1 | g_2 | ... | g_r` of monic nonconstant invariant factors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantFactors {
    pub chain: Vec<PolyFF>,
}

impl InvariantFactors {
    pub fn total_degree(&self) -> usize {
        self.chain.iter().map(|g| g.degree().unwrap_or(0)).sum()
    }

    /// Product of the chain, which is the characteristic polynomial.
    pub fn product(&self, f: &FieldSpec) -> PolyFF {
        self.chain.iter().fold(PolyFF::one(), |acc, g| acc.mul(g, f))
    }

    pub fn is_chain(&self, f: &FieldSpec) -> bool {
        self.chain.windows(2).all(|w| w[0].divides(&w[1], f))
    }

    /// Every factor lies in `P_m`.
    pub fn all_in_pm(&self, m: u64) -> bool {
        self.chain.iter().all(|g| pm_member(g, m).expect("invariant factors are monic"))
    }

    pub fn display(&self, f: &FieldSpec) -> String {
        let parts: Vec<String> = self.chain.iter().map(|g| g.display(f)).collect();
        format!("({})", parts.join(", "))
    }
}

/// Outcome of deciding `B ~ zB` two ways.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZetaSimilarity {
    /// Invariant factors of `B` and `zB` coincide.
    pub by_similarity: bool,
    /// Every invariant factor of `B` lies in `P_m` with `m = ord(z)`.
    pub by_pm: bool,
}

impl ZetaSimilarity {
    pub fn agree(&self) -> bool {
        self.by_similarity == self.by_pm
    }
}

/// Smith normal form diagonal of a square polynomial matrix (row-major), monic,
/// ordered by divisibility. Zero diagonal entries are kept as zero polynomials.
pub fn smith_diagonal(f: &FieldSpec, mut m: Vec<PolyFF>, n: usize) -> Vec<PolyFF> {
    let idx = |i: usize, j: usize| i * n + j;
    for k in 0..n {
        loop {
            // pivot: minimal degree, ties broken by row-major position
            let mut best: Option<(usize, usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if let Some(d) = m[idx(i, j)].degree() {
                        if best.is_none_or(|(bd, _, _)| d < bd) {
                            best = Some((d, i, j));
                        }
                    }
                }
            }
            let Some((_, pi, pj)) = best else {
                break;
            };
            if pi != k {
                for j in 0..n {
                    m.swap(idx(pi, j), idx(k, j));
                }
            }
            if pj != k {
                for i in 0..n {
                    m.swap(idx(i, pj), idx(i, k));
                }
            }
            let pivot = m[idx(k, k)].clone();
            let mut dirty = false;
            for i in k + 1..n {
                if m[idx(i, k)].is_zero() {
                    continue;
                }
                let (quot, rem) = m[idx(i, k)].div_rem(&pivot, f).expect("pivot is nonzero");
                for j in k..n {
                    let v = quot.mul(&m[idx(k, j)], f);
                    m[idx(i, j)] = m[idx(i, j)].sub(&v, f);
                }
                dirty |= !rem.is_zero();
            }
            for j in k + 1..n {
                if m[idx(k, j)].is_zero() {
                    continue;
                }
                let (quot, rem) = m[idx(k, j)].div_rem(&pivot, f).expect("pivot is nonzero");
                for i in k..n {
                    let v = quot.mul(&m[idx(i, k)], f);
                    m[idx(i, j)] = m[idx(i, j)].sub(&v, f);
                }
                dirty |= !rem.is_zero();
            }
            if dirty {
                continue;
            }
            // row and column k are clear; the pivot must divide the trailing block
            let offender = (k + 1..n).find(|&i| (k + 1..n).any(|j| !pivot.divides(&m[idx(i, j)], f)));
            match offender {
                Some(i) => {
                    for j in k..n {
                        let v = m[idx(i, j)].clone();
                        m[idx(k, j)] = m[idx(k, j)].add(&v, f);
                    }
                }
                None => break,
            }
        }
    }
    (0..n).map(|k| m[idx(k, k)].monic(f)).collect()
}

impl MatrixFF {
    /// `tI - A` as a row-major polynomial matrix.
    pub fn characteristic_matrix(&self) -> Vec<PolyFF> {
        let (n, f) = (self.n(), self.field());
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let c = f.neg(self.get(i, j));
                out.push(if i == j { PolyFF::new(vec![c, FieldElement::ONE]) } else { PolyFF::constant(c) });
            }
        }
        out
    }

    pub fn invariant_factors(&self) -> InvariantFactors {
        let diag = smith_diagonal(self.field(), self.characteristic_matrix(), self.n());
        InvariantFactors { chain: diag.into_iter().filter(|g| g.degree().is_some_and(|d| d > 0)).collect() }
    }

    pub fn characteristic_polynomial(&self) -> PolyFF {
        self.invariant_factors().product(self.field())
    }

    pub fn is_similar(&self, other: &MatrixFF) -> Result<bool> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(self.n(), other.n()));
        }
        Ok(self.invariant_factors() == other.invariant_factors())
    }

    /// Decides whether `B` is similar to `zB`, by comparing canonical forms and by the
    /// `P_m` criterion on the invariant factors.
    pub fn similar_to_zeta_multiple(&self, z: FieldElement) -> Result<ZetaSimilarity> {
        let f = self.field();
        if z.is_zero() {
            return Err(Error::ZeroZeta);
        }
        let m = f.mult_order(z)?;
        let own = self.invariant_factors();
        let scaled = self.scale(z)?.invariant_factors();
        Ok(ZetaSimilarity { by_similarity: own == scaled, by_pm: own.all_in_pm(m) })
    }
}
