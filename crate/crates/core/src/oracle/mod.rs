//! Brute-force ground truth over a concrete field.
//!
//! Every `A` in `Mat_n(F_q)` is enumerated once and the solutions `B` of `AB = ζBA` are
//! counted as `q^dim` of the twisted centralizer. Work is split into `q^n` shards by the
//! first row of `A` and reduced in shard order, so the result does not depend on the
//! number of workers.

mod kernel;
mod verify;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::counting::CountSet;
use crate::error::{Error, Result};
use crate::ff::{FieldElement, FieldSpec};
use crate::linalg::MatrixFF;

use kernel::{Arith, Tables};

pub use verify::{
    block_representative, oracle_count_s, similarity_classes, verify_block_structure, verify_decomposition,
    verify_fitting, verify_similarity_criterion, verify_similarity_criterion_all, BlockReport, DecompositionRow,
    FittingMode, FittingReport, SimilarityReport,
};

/// Default cap on the number of matrices `A` enumerated by one job.
pub const DEFAULT_BUDGET: u128 = 1 << 34;

/// Cap on `q^(2n^2)` for [`oracle_naive`].
pub const NAIVE_BUDGET: u128 = 1 << 26;

pub const BUDGET_ENV: &str = "QCOMMUTE_BUDGET";

/// Reads the enumeration budget from `QCOMMUTE_BUDGET` (a decimal integer or `2^k`),
/// falling back to [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> Result<u128> {
    match std::env::var(BUDGET_ENV) {
        Ok(s) => parse_budget(&s),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

pub fn parse_budget(s: &str) -> Result<u128> {
    let s = s.trim();
    let bad = || Error::Parse { literal: s.to_string(), reason: "expected an integer or 2^k".into() };
    if let Some(e) = s.strip_prefix("2^") {
        let e: u32 = e.parse().map_err(|_| bad())?;
        return 1u128.checked_shl(e).filter(|_| e < 128).ok_or_else(bad);
    }
    s.parse().map_err(|_| bad())
}

/// `q^e`, saturating.
pub(crate) fn steps(q: u32, e: usize) -> u128 {
    (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

pub fn check_budget(field: &FieldSpec, n: usize, budget: u128) -> Result<()> {
    let needed = steps(field.q(), n * n);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Shard-level progress: `done` of `total` shards finished.
pub type ProgressFn = Arc<dyn Fn(usize, usize) + Send + Sync>;

/// One oracle count: `set` pairs of `n x n` matrices over `field` with `AB = zeta BA`.
#[derive(Clone)]
pub struct OracleJob {
    pub field: FieldSpec,
    pub n: usize,
    pub zeta: FieldElement,
    pub set: CountSet,
    pub workers: usize,
    pub budget: u128,
    /// Report after every this many shards (0 disables reporting).
    pub progress_every: usize,
    pub progress: Option<ProgressFn>,
}

impl OracleJob {
    pub fn new(field: &FieldSpec, n: usize, zeta: FieldElement, set: CountSet) -> Result<Self> {
        check_zeta(field, zeta)?;
        if set == CountSet::S {
            return Err(Error::Invalid("the oracle counts K, U and N pairs".into()));
        }
        Ok(OracleJob {
            field: field.clone(),
            n,
            zeta,
            set,
            workers: 1,
            budget: DEFAULT_BUDGET,
            progress_every: 0,
            progress: None,
        })
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn progress(mut self, every: usize, f: ProgressFn) -> Self {
        self.progress_every = every;
        self.progress = Some(f);
        self
    }
}

pub(crate) fn check_zeta(field: &FieldSpec, zeta: FieldElement) -> Result<()> {
    if !field.contains(zeta) {
        return Err(Error::NotInField { index: zeta.index(), q: field.q() });
    }
    if zeta.is_zero() {
        return Err(Error::ZeroZeta);
    }
    Ok(())
}

pub fn oracle_count(job: &OracleJob) -> Result<BigUint> {
    let tally = run_tally(&job.field, job.n, &[job.zeta], job.workers, job.budget, progress_of(job))?;
    Ok(tally.into_iter().next().expect("one zeta").get(job.set).clone())
}

fn progress_of(job: &OracleJob) -> Option<(usize, ProgressFn)> {
    match (&job.progress, job.progress_every) {
        (Some(f), every) if every > 0 => Some((every, f.clone())),
        _ => None,
    }
}

/// Oracle counts of all three sets for one `ζ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    pub zeta: FieldElement,
    pub k: BigUint,
    pub u: BigUint,
    pub n: BigUint,
}

impl Tally {
    pub fn get(&self, set: CountSet) -> &BigUint {
        match set {
            CountSet::K => &self.k,
            CountSet::U => &self.u,
            CountSet::N => &self.n,
            CountSet::S => panic!("the oracle does not tally similarity classes"),
        }
    }
}

/// One enumeration pass computing K, U and N counts for every listed `ζ`.
pub fn oracle_tally(
    field: &FieldSpec,
    n: usize,
    zetas: &[FieldElement],
    workers: usize,
    budget: u128,
) -> Result<Vec<Tally>> {
    run_tally(field, n, zetas, workers, budget, None)
}

fn run_tally(
    field: &FieldSpec,
    n: usize,
    zetas: &[FieldElement],
    workers: usize,
    budget: u128,
    progress: Option<(usize, ProgressFn)>,
) -> Result<Vec<Tally>> {
    for &z in zetas {
        check_zeta(field, z)?;
    }
    check_budget(field, n, budget)?;
    let hist = match Tables::new(field) {
        Some(t) => histograms(&t, field.q(), n, zetas, workers, progress)?,
        None => histograms(field, field.q(), n, zetas, workers, progress)?,
    };
    let q = BigUint::from(field.q());
    let powers: Vec<BigUint> = (0..=n * n).map(|d| q.pow(d as u32)).collect();
    let weigh = |h: &[u64]| -> BigUint {
        h.iter().zip(&powers).filter(|(c, _)| **c > 0).map(|(&c, p)| p * BigUint::from(c)).sum()
    };
    Ok(zetas
        .iter()
        .zip(hist)
        .map(|(&zeta, h)| Tally { zeta, k: weigh(&h[0]), u: weigh(&h[1]), n: weigh(&h[2]) })
        .collect())
}

/// Per `ζ`: for K, U and N, the number of `A` whose twisted centralizer has each dimension.
type Histogram = Vec<[Vec<u64>; 3]>;

fn histograms<F: Arith>(
    f: &F,
    q: u32,
    n: usize,
    zetas: &[FieldElement],
    workers: usize,
    progress: Option<(usize, ProgressFn)>,
) -> Result<Histogram> {
    let shards = steps(q, n) as usize;
    let done = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let per_shard: Vec<Histogram> = pool.install(|| {
        (0..shards)
            .into_par_iter()
            .map(|s| {
                let h = shard(f, q, n, zetas, s);
                if let Some((every, report)) = &progress {
                    let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                    if d.is_multiple_of(*every) || d == shards {
                        report(d, shards);
                    }
                }
                h
            })
            .collect()
    });
    let mut total: Histogram = zetas.iter().map(|_| empty(n)).collect();
    for h in per_shard {
        for (acc, part) in total.iter_mut().zip(h) {
            for (a, p) in acc.iter_mut().zip(part) {
                for (x, y) in a.iter_mut().zip(p) {
                    *x += y;
                }
            }
        }
    }
    Ok(total)
}

fn empty(n: usize) -> [Vec<u64>; 3] {
    [vec![0; n * n + 1], vec![0; n * n + 1], vec![0; n * n + 1]]
}

/// All `A` whose first row encodes `s` in base `q`; the remaining entries run as an
/// odometer in row-major order, last entry fastest.
fn shard<F: Arith>(f: &F, q: u32, n: usize, zetas: &[FieldElement], s: usize) -> Histogram {
    let mut out: Histogram = zetas.iter().map(|_| empty(n)).collect();
    let nsq = n * n;
    let mut a = vec![0u32; nsq];
    let mut rest = s;
    for x in a.iter_mut().take(n) {
        *x = (rest % q as usize) as u32;
        rest /= q as usize;
    }
    let mut op = vec![0u32; nsq * nsq];
    let mut scratch = Vec::with_capacity(3 * nsq);
    loop {
        let (nonsingular, nilpotent) = kernel::classify(f, &a, n, &mut scratch);
        for (h, z) in out.iter_mut().zip(zetas) {
            let d = kernel::twisted_nullity(f, &a, n, z.index(), &mut op);
            h[0][d] += 1;
            if nonsingular {
                h[1][d] += 1;
            }
            if nilpotent {
                h[2][d] += 1;
            }
        }
        // advance the odometer over entries n..n^2
        let mut i = nsq;
        loop {
            if i == n {
                return out;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < q {
                break;
            }
            a[i] = 0;
        }
    }
}

/// The matrix whose row-major entries are the base-`q` digits of `index`, least
/// significant first.
pub fn matrix_at(field: &FieldSpec, n: usize, mut index: u64) -> MatrixFF {
    let q = field.q() as u64;
    MatrixFF::from_fn(field, n, |_, _| {
        let d = index % q;
        index /= q;
        FieldElement::from_index(d as u32)
    })
}

/// Counts by enumerating both `A` and `B` and testing `AB = ζBA` entry by entry.
pub fn oracle_naive(set: CountSet, n: usize, field: &FieldSpec, zeta: FieldElement) -> Result<BigUint> {
    check_zeta(field, zeta)?;
    if set == CountSet::S {
        return Err(Error::Invalid("the oracle counts K, U and N pairs".into()));
    }
    let total = steps(field.q(), n * n);
    let needed = total.saturating_mul(total);
    if needed > NAIVE_BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: NAIVE_BUDGET });
    }
    let mats: Vec<MatrixFF> = (0..total as u64).map(|i| matrix_at(field, n, i)).collect();
    let mut count = BigUint::zero();
    for a in &mats {
        let keep = match set {
            CountSet::K => true,
            CountSet::U => a.is_nonsingular(),
            CountSet::N => a.is_nilpotent(),
            CountSet::S => unreachable!(),
        };
        if !keep {
            continue;
        }
        let za = a.scale(zeta)?;
        for b in &mats {
            // ζBA = B(ζA)
            if a.mul_unchecked(b) == b.mul_unchecked(&za) {
                count += BigUint::one();
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(i: u32) -> FieldElement {
        FieldElement::from_index(i)
    }

    fn job(q: u64, n: usize, z: u32, set: CountSet) -> BigUint {
        let f = FieldSpec::of_order(q).unwrap();
        oracle_count(&OracleJob::new(&f, n, el(z), set).unwrap()).unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(job(3, 1, 2, CountSet::K), BigUint::from(5u32));
        assert_eq!(job(2, 2, 1, CountSet::N), BigUint::from(28u32));
        assert_eq!(job(3, 2, 2, CountSet::U), BigUint::from(192u32));
        assert_eq!(job(3, 2, 2, CountSet::K), BigUint::from(417u32));
        assert_eq!(job(2, 2, 1, CountSet::K), BigUint::from(88u32));
        for set in [CountSet::K, CountSet::U, CountSet::N] {
            assert_eq!(job(5, 0, 3, set), BigUint::one());
        }
    }

    #[test]
    fn naive_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(oracle_naive(CountSet::K, 1, &f2, el(1)).unwrap(), BigUint::from(4u32));
        assert_eq!(oracle_naive(CountSet::K, 1, &f3, el(2)).unwrap(), BigUint::from(5u32));
        assert_eq!(oracle_naive(CountSet::K, 2, &f2, el(1)).unwrap(), BigUint::from(88u32));
        assert!(matches!(oracle_naive(CountSet::K, 3, &f3, el(1)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn naive_agrees_with_nullity_count() {
        for q in [2u64, 3, 4, 5, 7] {
            let f = FieldSpec::of_order(q).unwrap();
            for z in f.units() {
                for set in [CountSet::K, CountSet::U, CountSet::N] {
                    let fast = oracle_count(&OracleJob::new(&f, 1, z, set).unwrap()).unwrap();
                    assert_eq!(fast, oracle_naive(set, 1, &f, z).unwrap(), "q={q} z={z:?} {set}");
                }
            }
        }
        let f2 = FieldSpec::prime(2).unwrap();
        for set in [CountSet::K, CountSet::U, CountSet::N] {
            let fast = oracle_count(&OracleJob::new(&f2, 2, el(1), set).unwrap()).unwrap();
            assert_eq!(fast, oracle_naive(set, 2, &f2, el(1)).unwrap());
        }
    }

    #[test]
    fn refusals() {
        let f = FieldSpec::prime(5).unwrap();
        assert_eq!(OracleJob::new(&f, 2, el(0), CountSet::K).err(), Some(Error::ZeroZeta));
        assert!(OracleJob::new(&f, 2, el(7), CountSet::K).is_err());
        assert!(OracleJob::new(&f, 2, el(1), CountSet::S).is_err());
        let big = OracleJob::new(&f, 4, el(1), CountSet::K).unwrap().budget(1 << 20);
        assert!(matches!(oracle_count(&big), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn worker_count_does_not_matter() {
        let f = FieldSpec::prime(3).unwrap();
        let zetas: Vec<_> = f.units().collect();
        let one = oracle_tally(&f, 2, &zetas, 1, DEFAULT_BUDGET).unwrap();
        for w in [2, 3, 8] {
            assert_eq!(oracle_tally(&f, 2, &zetas, w, DEFAULT_BUDGET).unwrap(), one);
        }
    }

    #[test]
    fn progress_reaches_total() {
        let f = FieldSpec::prime(2).unwrap();
        let last = Arc::new(AtomicUsize::new(0));
        let seen = last.clone();
        let job = OracleJob::new(&f, 3, el(1), CountSet::K).unwrap().progress(
            1,
            Arc::new(move |d, _| {
                seen.fetch_max(d, Ordering::Relaxed);
            }),
        );
        oracle_count(&job).unwrap();
        assert_eq!(last.load(Ordering::Relaxed), 8);
    }

    #[test]
    fn budget_parsing() {
        assert_eq!(parse_budget("2^20").unwrap(), 1 << 20);
        assert_eq!(parse_budget(" 1000 ").unwrap(), 1000);
        assert!(parse_budget("lots").is_err());
        assert!(parse_budget("2^200").is_err());
    }
}
