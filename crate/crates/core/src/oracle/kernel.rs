//! Allocation-free inner loop: field arithmetic on raw indices and ranks over `F_q`.

use crate::ff::{FieldElement, FieldSpec};

pub(crate) trait Arith: Sync {
    fn add(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn inv(&self, a: u32) -> u32;
}

impl Arith for FieldSpec {
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        FieldSpec::add(self, FieldElement::from_index(a), FieldElement::from_index(b)).index()
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        FieldSpec::mul(self, FieldElement::from_index(a), FieldElement::from_index(b)).index()
    }

    #[inline]
    fn neg(&self, a: u32) -> u32 {
        FieldSpec::neg(self, FieldElement::from_index(a)).index()
    }

    #[inline]
    fn inv(&self, a: u32) -> u32 {
        FieldSpec::inv(self, FieldElement::from_index(a)).expect("nonzero pivot").index()
    }
}

/// Byte tables for fields with at most 256 elements.
pub(crate) struct Tables {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl Tables {
    pub(crate) const MAX_Q: u32 = 256;

    pub(crate) fn new(f: &FieldSpec) -> Option<Self> {
        if f.q() > Self::MAX_Q {
            return None;
        }
        let q = f.q() as usize;
        let el = |i: usize| FieldElement::from_index(i as u32);
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = f.add(el(a), el(b)).index() as u8;
                mul[a * q + b] = f.mul(el(a), el(b)).index() as u8;
            }
        }
        let neg = (0..q).map(|a| f.neg(el(a)).index() as u8).collect();
        let inv = (0..q).map(|a| if a == 0 { 0 } else { f.inv(el(a)).unwrap().index() as u8 }).collect();
        Some(Tables { q, add, mul, neg, inv })
    }
}

impl Arith for Tables {
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize] as u32
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize] as u32
    }

    #[inline]
    fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }

    #[inline]
    fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize] as u32
    }
}

/// Rank of a row-major `rows x cols` matrix; destroys `m`.
pub(crate) fn rank<F: Arith>(f: &F, m: &mut [u32], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for j in c..cols {
                m.swap(p * cols + j, r * cols + j);
            }
        }
        let scale = f.neg(f.inv(m[r * cols + c]));
        for i in r + 1..rows {
            let lead = m[i * cols + c];
            if lead == 0 {
                continue;
            }
            let factor = f.mul(lead, scale);
            for j in c..cols {
                let pivot_entry = m[r * cols + j];
                if pivot_entry != 0 {
                    m[i * cols + j] = f.add(m[i * cols + j], f.mul(factor, pivot_entry));
                }
            }
        }
        r += 1;
    }
    r
}

/// Matrix of `X -> AX - zXA` on row-major `vec(X)`, written into `out` (`n^2 x n^2`).
pub(crate) fn twisted_operator<F: Arith>(f: &F, a: &[u32], n: usize, z: u32, out: &mut [u32]) {
    let nn = n * n;
    out.fill(0);
    let mz = f.neg(z);
    for i in 0..n {
        for j in 0..n {
            let row = (i * n + j) * nn;
            // (AX)_ij = sum_k A_ik X_kj
            for k in 0..n {
                let col = k * n + j;
                out[row + col] = f.add(out[row + col], a[i * n + k]);
            }
            // -z (XA)_ij = -z sum_k X_ik A_kj
            for k in 0..n {
                let col = i * n + k;
                out[row + col] = f.add(out[row + col], f.mul(mz, a[k * n + j]));
            }
        }
    }
}

pub(crate) fn twisted_nullity<F: Arith>(f: &F, a: &[u32], n: usize, z: u32, scratch: &mut [u32]) -> usize {
    let nn = n * n;
    twisted_operator(f, a, n, z, scratch);
    nn - rank(f, scratch, nn, nn)
}

pub(crate) fn mat_mul<F: Arith>(f: &F, a: &[u32], b: &[u32], n: usize, out: &mut [u32]) {
    for i in 0..n {
        for j in 0..n {
            let mut s = 0;
            for k in 0..n {
                let (x, y) = (a[i * n + k], b[k * n + j]);
                if x != 0 && y != 0 {
                    s = f.add(s, f.mul(x, y));
                }
            }
            out[i * n + j] = s;
        }
    }
}

/// Whether `A` is nonsingular and whether it is nilpotent (`A^n = 0`).
pub(crate) fn classify<F: Arith>(f: &F, a: &[u32], n: usize, scratch: &mut Vec<u32>) -> (bool, bool) {
    let nsq = n * n;
    scratch.clear();
    scratch.extend_from_slice(a);
    let nonsingular = rank(f, scratch, n, n) == n;
    if nonsingular {
        // a nilpotent matrix is singular unless n = 0
        return (true, n == 0);
    }
    scratch.clear();
    scratch.extend_from_slice(a);
    scratch.resize(3 * nsq, 0);
    let (power, rest) = scratch.split_at_mut(nsq);
    let (next, _) = rest.split_at_mut(nsq);
    for _ in 1..n {
        if power.iter().all(|&x| x == 0) {
            break;
        }
        mat_mul(f, power, a, n, next);
        power.copy_from_slice(next);
    }
    (false, power.iter().all(|&x| x == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::MatrixFF;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tables_match_field() {
        for q in [2u64, 3, 4, 8, 9, 25] {
            let f = FieldSpec::of_order(q).unwrap();
            let t = Tables::new(&f).unwrap();
            for a in 0..q as u32 {
                assert_eq!(Arith::neg(&t, a), Arith::neg(&f, a));
                if a != 0 {
                    assert_eq!(Arith::inv(&t, a), Arith::inv(&f, a));
                }
                for b in 0..q as u32 {
                    assert_eq!(Arith::add(&t, a, b), Arith::add(&f, a, b));
                    assert_eq!(Arith::mul(&t, a, b), Arith::mul(&f, a, b));
                }
            }
        }
    }

    #[test]
    fn kernel_matches_matrix_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2u64, 3, 4, 5, 7] {
            let f = FieldSpec::of_order(q).unwrap();
            let t = Tables::new(&f).unwrap();
            for n in 1..=4 {
                for _ in 0..40 {
                    let idx: Vec<u32> = (0..n * n).map(|_| rng.gen_range(0..q as u32)).collect();
                    let a = MatrixFF::from_indices(&f, n, &idx).unwrap();
                    let z = rng.gen_range(1..q as u32);
                    let mut scratch = vec![0; n.pow(4)];
                    let dim = twisted_nullity(&t, &idx, n, z, &mut scratch);
                    assert_eq!(dim, a.twisted_centralizer_dim(FieldElement::from_index(z)).unwrap());
                    let mut s = Vec::new();
                    assert_eq!(classify(&t, &idx, n, &mut s), (a.is_nonsingular(), a.is_nilpotent()));
                    let mut copy = idx.clone();
                    assert_eq!(rank(&f, &mut copy, n, n), a.rank());
                }
            }
        }
    }
}
