use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::ff::{FieldElement, FieldSpec};

/// A square matrix over a finite field, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFF {
    field: FieldSpec,
    n: usize,
    entries: Vec<FieldElement>,
}

impl fmt::Debug for MatrixFF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u32>> = (0..self.n).map(|i| self.row(i).iter().map(|e| e.index()).collect()).collect();
        write!(f, "MatrixFF(q={}, {:?})", self.field.q(), rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixClass {
    Nonsingular,
    Nilpotent,
    Mixed,
}

/// Bases of the Fitting components `K_A = ker A^n` and `I_A = im A^n`, as column vectors
/// in reduced column echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittingPair {
    pub kernel_basis: Vec<Vec<FieldElement>>,
    pub image_basis: Vec<Vec<FieldElement>>,
}

impl FittingPair {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }

    pub fn image_dim(&self) -> usize {
        self.image_basis.len()
    }

    /// The change-of-basis matrix whose columns are the kernel basis followed by the image basis.
    pub fn basis_matrix(&self, field: &FieldSpec) -> MatrixFF {
        let cols: Vec<&Vec<FieldElement>> = self.kernel_basis.iter().chain(&self.image_basis).collect();
        let n = cols.len();
        MatrixFF::from_fn(field, n, |i, j| cols[j][i])
    }
}

/// Reduces `data` (rows x cols, row-major) to reduced row echelon form in place and
/// returns the pivot columns.
pub(crate) fn rref(f: &FieldSpec, data: &mut [FieldElement], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !data[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(data[r * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            data[r * cols + j] = f.mul(data[r * cols + j], inv);
        }
        for i in 0..rows {
            let factor = data[i * cols + c];
            if i == r || factor.is_zero() {
                continue;
            }
            for j in c..cols {
                let v = f.mul(factor, data[r * cols + j]);
                data[i * cols + j] = f.sub(data[i * cols + j], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank by forward elimination; destroys `data`.
pub(crate) fn rank_in_place(f: &FieldSpec, data: &mut [FieldElement], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !data[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.neg(f.inv(data[r * cols + c]).expect("pivot is nonzero"));
        for i in r + 1..rows {
            let x = data[i * cols + c];
            if x.is_zero() {
                continue;
            }
            let factor = f.mul(x, inv);
            for j in c + 1..cols {
                let v = f.mul(factor, data[r * cols + j]);
                data[i * cols + j] = f.add(data[i * cols + j], v);
            }
        }
        r += 1;
    }
    r
}

/// Canonical basis of the span of `vectors`: the nonzero rows of their reduced echelon form.
fn canonical_span(f: &FieldSpec, vectors: &[Vec<FieldElement>], dim: usize) -> Vec<Vec<FieldElement>> {
    let mut data: Vec<FieldElement> = vectors.iter().flatten().copied().collect();
    let pivots = rref(f, &mut data, vectors.len(), dim);
    (0..pivots.len()).map(|i| data[i * dim..(i + 1) * dim].to_vec()).collect()
}

impl MatrixFF {
    pub fn zero(field: &FieldSpec, n: usize) -> Self {
        MatrixFF { field: field.clone(), n, entries: vec![FieldElement::ZERO; n * n] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        Self::from_fn(field, n, |i, j| if i == j { FieldElement::ONE } else { FieldElement::ZERO })
    }

    pub fn from_fn(field: &FieldSpec, n: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        MatrixFF { field: field.clone(), n, entries }
    }

    /// Row-major entries given as element indices.
    pub fn from_indices(field: &FieldSpec, n: usize, indices: &[u32]) -> Result<Self> {
        if indices.len() != n * n {
            return Err(Error::DimensionMismatch(indices.len(), n * n));
        }
        let entries = indices.iter().map(|&i| field.element(i)).collect::<Result<Vec<_>>>()?;
        Ok(MatrixFF { field: field.clone(), n, entries })
    }

    /// Row-major integer entries, reduced into the prime subfield.
    pub fn from_ints(field: &FieldSpec, n: usize, ints: &[i64]) -> Result<Self> {
        if ints.len() != n * n {
            return Err(Error::DimensionMismatch(ints.len(), n * n));
        }
        Ok(MatrixFF { field: field.clone(), n, entries: ints.iter().map(|&x| field.from_int(x)).collect() })
    }

    pub fn diagonal(field: &FieldSpec, diag: &[FieldElement]) -> Self {
        Self::from_fn(field, diag.len(), |i, j| if i == j { diag[i] } else { FieldElement::ZERO })
    }

    /// Companion matrix of a monic polynomial of positive degree.
    pub fn companion(field: &FieldSpec, g: &crate::ff::PolyFF) -> Result<Self> {
        if !g.is_monic() {
            return Err(Error::NotMonic);
        }
        let d = g.degree().unwrap_or(0);
        Ok(Self::from_fn(field, d, |i, j| {
            if j == d - 1 {
                field.neg(g.coeff(i))
            } else if i == j + 1 {
                FieldElement::ONE
            } else {
                FieldElement::ZERO
            }
        }))
    }

    /// Nilpotent Jordan block of size `n` (ones on the superdiagonal).
    pub fn jordan_nilpotent(field: &FieldSpec, n: usize) -> Self {
        Self::from_fn(field, n, |i, j| if j == i + 1 { FieldElement::ONE } else { FieldElement::ZERO })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let (n, f) = (self.n, &self.field);
        let mut out = vec![FieldElement::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = f.mul(a, other.entries[k * n + j]);
                    out[i * n + j] = f.add(out[i * n + j], v);
                }
            }
        }
        MatrixFF { field: f.clone(), n, entries: out }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = &self.field;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(MatrixFF { field: f.clone(), n: self.n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = &self.field;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(MatrixFF { field: f.clone(), n: self.n, entries })
    }

    pub fn scale(&self, z: FieldElement) -> Result<Self> {
        self.field.element(z.index())?;
        let f = &self.field;
        Ok(MatrixFF { field: f.clone(), n: self.n, entries: self.entries.iter().map(|&a| f.mul(a, z)).collect() })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(&self.field, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.n, |i, j| self.get(j, i))
    }

    pub fn rank_nullity(&self) -> (usize, usize) {
        let mut data = self.entries.clone();
        let r = rank_in_place(&self.field, &mut data, self.n, self.n);
        (r, self.n - r)
    }

    pub fn rank(&self) -> usize {
        self.rank_nullity().0
    }

    pub fn is_nonsingular(&self) -> bool {
        self.rank() == self.n
    }

    pub fn is_nilpotent(&self) -> bool {
        self.pow(self.n as u64).is_zero()
    }

    pub fn classify(&self) -> MatrixClass {
        if self.is_nonsingular() {
            MatrixClass::Nonsingular
        } else if self.is_nilpotent() {
            MatrixClass::Nilpotent
        } else {
            MatrixClass::Mixed
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let w = 2 * n;
        let mut data = vec![FieldElement::ZERO; n * w];
        for i in 0..n {
            data[i * w..i * w + n].copy_from_slice(self.row(i));
            data[i * w + n + i] = FieldElement::ONE;
        }
        let pivots = rref(&self.field, &mut data, n, w);
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(&self.field, n, |i, j| data[i * w + n + j]))
    }

    /// `P^{-1} A P`.
    pub fn conjugate_by(&self, p: &Self) -> Result<Self> {
        p.inverse()?.mul(self)?.mul(p)
    }

    /// Basis of the null space `{x : A x = 0}` in reduced column echelon form.
    pub fn nullspace(&self) -> Vec<Vec<FieldElement>> {
        let (n, f) = (self.n, &self.field);
        let mut data = self.entries.clone();
        let pivots = rref(f, &mut data, n, n);
        let mut basis = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![FieldElement::ZERO; n];
            v[free] = FieldElement::ONE;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(data[r * n + free]);
            }
            basis.push(v);
        }
        canonical_span(f, &basis, n)
    }

    /// Basis of the column space in reduced column echelon form.
    pub fn column_space(&self) -> Vec<Vec<FieldElement>> {
        let t = self.transpose();
        let rows: Vec<Vec<FieldElement>> = (0..self.n).map(|i| t.row(i).to_vec()).collect();
        canonical_span(&self.field, &rows, self.n)
    }

    /// The Fitting decomposition `V = ker A^n ⊕ im A^n`.
    pub fn fitting_decompose(&self) -> FittingPair {
        let p = self.pow(self.n as u64);
        FittingPair { kernel_basis: p.nullspace(), image_basis: p.column_space() }
    }

    /// Dimension of `{B : AB = zBA}`, the null space of `X -> AX - zXA` on `Mat_n`.
    pub fn twisted_centralizer_dim(&self, z: FieldElement) -> Result<usize> {
        self.field.element(z.index())?;
        if z.is_zero() {
            return Err(Error::ZeroZeta);
        }
        let (n, f) = (self.n, &self.field);
        let nn = n * n;
        let mut op = vec![FieldElement::ZERO; nn * nn];
        // row (i,j) of AX - zXA: sum_k A[i][k] X[k][j] - z X[i][k] A[k][j]
        for i in 0..n {
            for j in 0..n {
                let row = (i * n + j) * nn;
                for k in 0..n {
                    let a = self.get(i, k);
                    op[row + k * n + j] = f.add(op[row + k * n + j], a);
                    let b = f.mul(z, self.get(k, j));
                    op[row + i * n + k] = f.sub(op[row + i * n + k], b);
                }
            }
        }
        Ok(nn - rank_in_place(f, &mut op, nn, nn))
    }

    /// Square principal block on the index range.
    pub fn principal_block(&self, range: Range<usize>) -> Self {
        let start = range.start;
        Self::from_fn(&self.field, range.len(), |i, j| self.get(start + i, start + j))
    }

    pub fn block_is_zero(&self, rows: Range<usize>, cols: Range<usize>) -> bool {
        rows.into_iter().all(|i| cols.clone().all(|j| self.get(i, j).is_zero()))
    }

    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        let f = &self.field;
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).fold(FieldElement::ZERO, |acc, (&a, &x)| f.add(acc, f.mul(a, x))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: &FieldSpec, n: usize, v: &[i64]) -> MatrixFF {
        MatrixFF::from_ints(f, n, v).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        let a = m(&f3, 2, &[1, 2, 0, 1]);
        assert_eq!(a.mul(&MatrixFF::identity(&f3, 2)).unwrap(), a);
        let z = f3.from_int(2);
        assert_eq!(MatrixFF::identity(&f3, 2).scale(z).unwrap(), m(&f3, 2, &[2, 0, 0, 2]));
        let j2 = MatrixFF::jordan_nilpotent(&f3, 2);
        assert!(j2.mul(&j2).unwrap().is_zero());
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(a.mul(&m(&f5, 2, &[1, 0, 0, 1])), Err(Error::FieldMismatch));
        assert_eq!(a.add(&MatrixFF::identity(&f3, 3)), Err(Error::DimensionMismatch(2, 3)));
    }

    #[test]
    fn rank_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(MatrixFF::zero(&f2, 3).rank_nullity(), (0, 3));
        assert_eq!(MatrixFF::identity(&f2, 3).rank_nullity(), (3, 0));
        assert_eq!(m(&f2, 2, &[1, 1, 1, 1]).rank_nullity(), (1, 1));
    }

    #[test]
    fn classify_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(MatrixFF::identity(&f2, 2).classify(), MatrixClass::Nonsingular);
        assert_eq!(MatrixFF::jordan_nilpotent(&f2, 2).classify(), MatrixClass::Nilpotent);
        assert_eq!(m(&f2, 2, &[0, 0, 0, 1]).classify(), MatrixClass::Mixed);
    }

    #[test]
    fn fitting_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let e = |v: &[u32]| v.iter().map(|&x| FieldElement::from_index(x)).collect::<Vec<_>>();
        let zero = MatrixFF::zero(&f2, 2).fitting_decompose();
        assert_eq!(zero.kernel_basis, vec![e(&[1, 0]), e(&[0, 1])]);
        assert!(zero.image_basis.is_empty());
        let id = MatrixFF::identity(&f2, 2).fitting_decompose();
        assert!(id.kernel_basis.is_empty());
        assert_eq!(id.image_dim(), 2);
        let d = m(&f2, 2, &[0, 0, 0, 1]).fitting_decompose();
        assert_eq!(d.kernel_basis, vec![e(&[1, 0])]);
        assert_eq!(d.image_basis, vec![e(&[0, 1])]);
    }

    #[test]
    fn twisted_centralizer_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        let two = f3.from_int(2);
        assert_eq!(m(&f3, 1, &[1]).twisted_centralizer_dim(two).unwrap(), 0);
        assert_eq!(MatrixFF::zero(&f3, 3).twisted_centralizer_dim(two).unwrap(), 9);
        assert_eq!(MatrixFF::jordan_nilpotent(&f3, 2).twisted_centralizer_dim(two).unwrap(), 2);
        assert_eq!(MatrixFF::zero(&f3, 2).twisted_centralizer_dim(f3.zero()), Err(Error::ZeroZeta));
    }

    #[test]
    fn inverse_round_trip() {
        let f5 = FieldSpec::prime(5).unwrap();
        let a = m(&f5, 3, &[1, 2, 3, 0, 1, 4, 5, 6, 0]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), MatrixFF::identity(&f5, 3));
        assert_eq!(m(&f5, 2, &[1, 2, 2, 4]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn fitting_invariants_exhaustive() {
        for q in [2u64, 3] {
            let f = FieldSpec::prime(q).unwrap();
            for n in 1..=2usize {
                let total = (q as u32).pow((n * n) as u32);
                for idx in 0..total {
                    let a = matrix_from_index(&f, n, idx);
                    let fp = a.fitting_decompose();
                    assert_eq!(fp.kernel_dim() + fp.image_dim(), n);
                    let p = fp.basis_matrix(&f);
                    let c = a.conjugate_by(&p).unwrap();
                    let s = fp.kernel_dim();
                    assert!(c.block_is_zero(0..s, s..n) && c.block_is_zero(s..n, 0..s));
                    assert!(c.principal_block(0..s).is_nilpotent());
                    assert!(c.principal_block(s..n).is_nonsingular());
                }
            }
        }
    }

    pub(crate) fn matrix_from_index(f: &FieldSpec, n: usize, mut idx: u32) -> MatrixFF {
        let q = f.q();
        MatrixFF::from_fn(f, n, |_, _| {
            let e = FieldElement::from_index(idx % q);
            idx /= q;
            e
        })
    }
}
