//! Exhaustive and sampled checks of the structural facts behind the closed forms.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counting::{ClosedForm, Partition};
use crate::error::{Error, Result};
use crate::ff::{FieldElement, FieldSpec, PolyFF};
use crate::linalg::{InvariantFactors, MatrixFF};
use crate::oracle::kernel::{self, Arith};
use crate::oracle::{check_zeta, matrix_at, oracle_tally, steps, NAIVE_BUDGET};

/// `A_π`: for each part size `i` (ascending) an `i a_i` square block `J_i ⊗ I_{a_i}`, with
/// identity blocks on the block superdiagonal.
pub fn block_representative(pi: &Partition, field: &FieldSpec) -> MatrixFF {
    let n = pi.n();
    let mut a = MatrixFF::zero(field, n);
    let mut offset = 0;
    for (i, mult) in pi.blocks() {
        for r in 0..i.saturating_sub(1) {
            for s in 0..mult {
                a.set(offset + r * mult + s, offset + (r + 1) * mult + s, FieldElement::ONE);
            }
        }
        offset += i * mult;
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockReport {
    pub partition: Partition,
    pub dim_zeta: usize,
    pub dim_one: usize,
    /// `sum_{i,j} min(i,j) a_i a_j`.
    pub expected: usize,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.dim_zeta == self.dim_one && self.dim_zeta == self.expected
    }
}

pub fn verify_block_structure(pi: &Partition, field: &FieldSpec, zeta: FieldElement) -> Result<BlockReport> {
    check_zeta(field, zeta)?;
    let a = block_representative(pi, field);
    let expected = pi.blocks().flat_map(|(i, ai)| pi.blocks().map(move |(j, aj)| i.min(j) * ai * aj)).sum();
    Ok(BlockReport {
        partition: pi.clone(),
        dim_zeta: a.twisted_centralizer_dim(zeta)?,
        dim_one: a.twisted_centralizer_dim(FieldElement::ONE)?,
        expected,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FittingMode {
    /// Every pair `(A, B)`; needs `q^(2n^2)` within the naive budget.
    Exhaustive,
    /// Random `A`; each `B` is uniform or, every other draw, a random solution.
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug, Default)]
pub struct FittingReport {
    pub pairs_tested: u64,
    /// Pairs with `AB = ζBA`.
    pub solutions: u64,
    /// `A` whose change of basis failed to block-diagonalize it as nilpotent ⊕ invertible.
    pub bad_decompositions: u64,
    pub counterexamples: u64,
    /// Up to a few counterexamples, as `(A, B)`.
    pub examples: Vec<(MatrixFF, MatrixFF)>,
}

impl FittingReport {
    pub fn passed(&self) -> bool {
        self.counterexamples == 0 && self.bad_decompositions == 0
    }
}

const KEPT_EXAMPLES: usize = 5;

struct FittingFrame {
    s: usize,
    p: MatrixFF,
    p_inv: MatrixFF,
    a_kernel: MatrixFF,
    a_image: MatrixFF,
    zeta: FieldElement,
}

impl FittingFrame {
    fn new(a: &MatrixFF, zeta: FieldElement) -> Result<(Self, bool)> {
        let n = a.n();
        let fp = a.fitting_decompose();
        let s = fp.kernel_dim();
        let p = fp.basis_matrix(a.field());
        let p_inv = p.inverse()?;
        let ap = a.conjugate_by(&p)?;
        let a_kernel = ap.principal_block(0..s);
        let a_image = ap.principal_block(s..n);
        let sound = ap.block_is_zero(0..s, s..n)
            && ap.block_is_zero(s..n, 0..s)
            && a_kernel.is_nilpotent()
            && a_image.is_nonsingular();
        Ok((FittingFrame { s, p, p_inv, a_kernel, a_image, zeta }, sound))
    }

    /// `B` preserves both components and satisfies both restricted equations.
    fn block_condition(&self, b: &MatrixFF) -> Result<bool> {
        let n = b.n();
        let bp = self.p_inv.mul(b)?.mul(&self.p)?;
        if !bp.block_is_zero(0..self.s, self.s..n) || !bp.block_is_zero(self.s..n, 0..self.s) {
            return Ok(false);
        }
        let holds = |a: &MatrixFF, b: &MatrixFF| -> Result<bool> { Ok(a.mul(b)? == b.mul(&a.scale(self.zeta)?)?) };
        Ok(holds(&self.a_kernel, &bp.principal_block(0..self.s))?
            && holds(&self.a_image, &bp.principal_block(self.s..n))?)
    }
}

pub fn verify_fitting(field: &FieldSpec, n: usize, zeta: FieldElement, mode: FittingMode) -> Result<FittingReport> {
    check_zeta(field, zeta)?;
    let mut report = FittingReport::default();
    let mut check = |a: &MatrixFF, frame: &FittingFrame, b: &MatrixFF| -> Result<()> {
        let direct = a.mul(b)? == b.mul(&a.scale(zeta)?)?;
        let blocks = frame.block_condition(b)?;
        report.pairs_tested += 1;
        report.solutions += direct as u64;
        if direct != blocks {
            report.counterexamples += 1;
            if report.examples.len() < KEPT_EXAMPLES {
                report.examples.push((a.clone(), b.clone()));
            }
        }
        Ok(())
    };
    let mut bad = 0;
    match mode {
        FittingMode::Exhaustive => {
            let total = steps(field.q(), n * n);
            let needed = total.saturating_mul(total);
            if needed > NAIVE_BUDGET {
                return Err(Error::BudgetExceeded { needed, budget: NAIVE_BUDGET });
            }
            let mats: Vec<MatrixFF> = (0..total as u64).map(|i| matrix_at(field, n, i)).collect();
            for a in &mats {
                let (frame, sound) = FittingFrame::new(a, zeta)?;
                bad += !sound as u64;
                for b in &mats {
                    check(a, &frame, b)?;
                }
            }
        }
        FittingMode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = field.q();
            for draw in 0..samples {
                let a = random_matrix(field, n, &mut rng);
                let (frame, sound) = FittingFrame::new(&a, zeta)?;
                bad += !sound as u64;
                let b = if draw % 2 == 0 {
                    random_matrix(field, n, &mut rng)
                } else {
                    random_solution(&a, zeta, &mut rng, q)
                };
                check(&a, &frame, &b)?;
            }
        }
    }
    report.bad_decompositions = bad;
    Ok(report)
}

fn random_matrix(field: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> MatrixFF {
    let q = field.q();
    MatrixFF::from_fn(field, n, |_, _| FieldElement::from_index(rng.gen_range(0..q)))
}

/// A uniform element of `{B : AB = zBA}`.
fn random_solution(a: &MatrixFF, zeta: FieldElement, rng: &mut ChaCha8Rng, q: u32) -> MatrixFF {
    let (f, n) = (a.field(), a.n());
    let nn = n * n;
    let idx: Vec<u32> = a.entries().iter().map(|e| e.index()).collect();
    let mut op = vec![0u32; nn * nn];
    kernel::twisted_operator(f, &idx, n, zeta.index(), &mut op);
    let op = MatrixFF::from_indices(f, nn, &op).expect("entries lie in the field");
    let mut v = vec![FieldElement::ZERO; nn];
    for basis in op.nullspace() {
        let c = FieldElement::from_index(rng.gen_range(0..q));
        for (x, y) in v.iter_mut().zip(&basis) {
            *x = f.add(*x, f.mul(c, *y));
        }
    }
    MatrixFF::from_fn(f, n, |i, j| v[i * n + j])
}

/// Every similarity class of `Mat_n(F_q)`, as its invariant-factor chain: monic
/// nonconstant `g_1 | g_2 | ... | g_r` with total degree `n`.
pub fn similarity_classes(field: &FieldSpec, n: usize) -> Vec<InvariantFactors> {
    let mut out = Vec::new();
    let mut chain = Vec::new();
    extend_chains(field, None, n, &mut chain, &mut out);
    out
}

fn extend_chains(
    field: &FieldSpec,
    prev: Option<&PolyFF>,
    remaining: usize,
    chain: &mut Vec<PolyFF>,
    out: &mut Vec<InvariantFactors>,
) {
    if remaining == 0 {
        out.push(InvariantFactors { chain: chain.clone() });
        return;
    }
    let base_deg = prev.map_or(0, |p| p.degree().unwrap());
    // next factor is prev * h with deg h = e; later factors are at least as large
    let min_e = if prev.is_none() { 1 } else { 0 };
    for e in min_e..=remaining.saturating_sub(base_deg) {
        let d = base_deg + e;
        if d > remaining || (remaining - d != 0 && remaining - d < d) {
            continue;
        }
        for h in monic_polys(field, e) {
            let g = match prev {
                Some(p) => p.mul(&h, field),
                None => h,
            };
            chain.push(g.clone());
            extend_chains(field, Some(&g), remaining - d, chain, out);
            chain.pop();
        }
    }
}

fn monic_polys(field: &FieldSpec, e: usize) -> impl Iterator<Item = PolyFF> {
    let q = field.q() as u64;
    let count = q.pow(e as u32);
    (0..count).map(move |mut i| {
        let mut idx: Vec<u32> = (0..e)
            .map(|_| {
                let d = (i % q) as u32;
                i /= q;
                d
            })
            .collect();
        idx.push(1);
        PolyFF::from_indices(&idx)
    })
}

/// Block-diagonal rational canonical form of a chain.
fn canonical_form(field: &FieldSpec, inv: &InvariantFactors) -> Result<MatrixFF> {
    let n = inv.total_degree();
    let mut out = MatrixFF::zero(field, n);
    let mut offset = 0;
    for g in &inv.chain {
        let c = MatrixFF::companion(field, g)?;
        for i in 0..c.n() {
            for j in 0..c.n() {
                out.set(offset + i, offset + j, c.get(i, j));
            }
        }
        offset += c.n();
    }
    Ok(out)
}

/// `|S_{ζ,n}|` by brute force over classes: the canonical forms `B` with `B ~ ζB`.
pub fn oracle_count_s(field: &FieldSpec, n: usize, zeta: FieldElement, budget: u128) -> Result<BigUint> {
    check_zeta(field, zeta)?;
    let needed = steps(field.q(), n);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut count = BigUint::zero();
    for chain in similarity_classes(field, n) {
        let b = canonical_form(field, &chain)?;
        if b.scale(zeta)?.invariant_factors() == chain {
            count += 1u32;
        }
    }
    Ok(count)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityReport {
    pub n: usize,
    pub q: u32,
    pub zeta: FieldElement,
    pub m: u64,
    /// Whether every matrix was checked, or only one canonical form per class.
    pub exhaustive: bool,
    pub matrices_checked: u64,
    /// Matrices where `B ~ ζB` and the `P_m` test disagree.
    pub disagreements: u64,
    /// Classes with `B ~ ζB` among the classes met in the check.
    pub classes_similar: u64,
    /// Distinct classes met in the check.
    pub classes_seen: u64,
    /// Chains from direct enumeration, all and with every factor in `P_m`.
    pub chains_total: u64,
    pub chains_in_pm: u64,
    pub expected: BigUint,
}

impl SimilarityReport {
    pub fn passed(&self) -> bool {
        let expected_ok =
            BigUint::from(self.chains_in_pm) == self.expected && BigUint::from(self.classes_similar) == self.expected;
        self.disagreements == 0 && self.classes_seen == self.chains_total && expected_ok
    }
}

/// Above this many matrices only canonical forms are checked.
pub const SIMILARITY_EXHAUSTIVE_LIMIT: u128 = 1 << 21;

pub fn verify_similarity_criterion(field: &FieldSpec, n: usize, zeta: FieldElement) -> Result<SimilarityReport> {
    Ok(verify_similarity_criterion_for(field, n, &[zeta])?.remove(0))
}

/// The similarity check for every `ζ ≠ 0`, sharing one class table.
pub fn verify_similarity_criterion_all(field: &FieldSpec, n: usize) -> Result<Vec<SimilarityReport>> {
    let zetas: Vec<FieldElement> = field.units().collect();
    verify_similarity_criterion_for(field, n, &zetas)
}

fn verify_similarity_criterion_for(
    field: &FieldSpec,
    n: usize,
    zetas: &[FieldElement],
) -> Result<Vec<SimilarityReport>> {
    for &z in zetas {
        check_zeta(field, z)?;
    }
    let chains = similarity_classes(field, n);
    let closed = ClosedForm::new(field.q() as u64)?;
    let total = steps(field.q(), n * n);
    let exhaustive = total <= SIMILARITY_EXHAUSTIVE_LIMIT;
    let table = if exhaustive { Some(ClassTable::build(field, n)) } else { None };
    let mut reports = Vec::with_capacity(zetas.len());
    for &zeta in zetas {
        let m = field.mult_order(zeta)?;
        let chains_in_pm = chains.iter().filter(|c| c.all_in_pm(m)).count() as u64;
        let mut report = SimilarityReport {
            n,
            q: field.q(),
            zeta,
            m,
            exhaustive,
            matrices_checked: 0,
            disagreements: 0,
            classes_similar: 0,
            classes_seen: 0,
            chains_total: chains.len() as u64,
            chains_in_pm,
            expected: closed.count_s(n, m)?,
        };
        match &table {
            Some(t) => t.check(field, zeta, m, &mut report),
            None => {
                for chain in &chains {
                    let b = canonical_form(field, chain)?;
                    let r = b.similar_to_zeta_multiple(zeta)?;
                    report.matrices_checked += 1;
                    report.disagreements += !r.agree() as u64;
                    report.classes_similar += r.by_similarity as u64;
                }
                report.classes_seen = chains.len() as u64;
            }
        }
        reports.push(report);
    }
    Ok(reports)
}

/// Class id of every matrix in `Mat_n(F_q)`, indexed as in [`matrix_at`].
struct ClassTable {
    n: usize,
    ids: Vec<u32>,
    classes: Vec<InvariantFactors>,
}

impl ClassTable {
    fn build(field: &FieldSpec, n: usize) -> Self {
        let total = steps(field.q(), n * n) as u64;
        let mut lookup: HashMap<InvariantFactors, u32> = HashMap::new();
        let mut classes = Vec::new();
        let ids = (0..total)
            .map(|i| {
                let inv = matrix_at(field, n, i).invariant_factors();
                *lookup.entry(inv).or_insert_with_key(|k| {
                    classes.push(k.clone());
                    (classes.len() - 1) as u32
                })
            })
            .collect();
        ClassTable { n, ids, classes }
    }

    fn check(&self, field: &FieldSpec, zeta: FieldElement, m: u64, report: &mut SimilarityReport) {
        let q = field.q() as u64;
        let nsq = self.n * self.n;
        let in_pm: Vec<bool> = self.classes.iter().map(|c| c.all_in_pm(m)).collect();
        let mut similar: Vec<Option<bool>> = vec![None; self.classes.len()];
        let mut digits = vec![0u32; nsq];
        for (i, &id) in self.ids.iter().enumerate() {
            let mut rest = i as u64;
            for d in digits.iter_mut() {
                *d = (rest % q) as u32;
                rest /= q;
            }
            let scaled = digits.iter().rev().fold(0u64, |acc, &d| acc * q + Arith::mul(field, zeta.index(), d) as u64);
            let by_similarity = self.ids[scaled as usize] == id;
            report.matrices_checked += 1;
            report.disagreements += (by_similarity != in_pm[id as usize]) as u64;
            match similar[id as usize] {
                None => similar[id as usize] = Some(by_similarity),
                // similarity to ζB is a class property
                Some(prev) => report.disagreements += (prev != by_similarity) as u64,
            }
        }
        report.classes_seen = self.classes.len() as u64;
        report.classes_similar = similar.iter().filter(|s| **s == Some(true)).count() as u64;
    }
}

/// One row of the decomposition check `|K_n| = sum_{s+t=n} h(s,t) |N_s| |U_t|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionRow {
    pub n: usize,
    pub k: BigUint,
    pub convolution: BigUint,
}

impl DecompositionRow {
    pub fn holds(&self) -> bool {
        self.k == self.convolution
    }
}

pub fn verify_decomposition(
    field: &FieldSpec,
    zeta: FieldElement,
    n_max: usize,
    workers: usize,
    budget: u128,
) -> Result<Vec<DecompositionRow>> {
    check_zeta(field, zeta)?;
    let closed = ClosedForm::new(field.q() as u64)?;
    let tallies = (0..=n_max)
        .map(|n| Ok(oracle_tally(field, n, &[zeta], workers, budget)?.remove(0)))
        .collect::<Result<Vec<_>>>()?;
    (0..=n_max)
        .map(|n| {
            let mut convolution = BigUint::zero();
            for s in 0..=n {
                let t = n - s;
                convolution += closed.h_subspace_pairs(s, t)? * &tallies[s].n * &tallies[t].u;
            }
            Ok(DecompositionRow { n, k: tallies[n].k.clone(), convolution })
        })
        .collect()
}
