//! The verification suite: every cross-check between the oracle, the closed forms and the
//! series, as a list of named pass/fail results.
//!
//! Results other than timings depend only on the options, never on the worker count.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::counting::{partitions, ClosedForm, CountSet};
use crate::error::Result;
use crate::ff::{FieldElement, FieldSpec};
use crate::oracle::{
    oracle_naive, oracle_tally, verify_block_structure, verify_decomposition, verify_fitting,
    verify_similarity_criterion_all, FittingMode, Tally,
};
use crate::qfunc::{count_poly_from_series, series_for_with, FactorSource, PolyQ, RatQ, SeriesX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub level: Level,
    pub threads: usize,
    pub seed: u64,
    pub budget: u128,
}

impl SuiteOptions {
    pub fn new(level: Level) -> Self {
        SuiteOptions { level, threads: 1, seed: 0, budget: crate::oracle::DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckResult {
    /// Everything but the timing.
    pub fn outcome(&self) -> (&str, bool, &str) {
        (&self.name, self.passed, &self.detail)
    }
}

/// Sizes of the check matrix at each level.
struct Plan {
    pipeline_n: usize,
    pipeline_q: &'static [u64],
    series_order: usize,
    fitting_q: &'static [u64],
    sampled_fitting: bool,
    route_n: usize,
    route_q: &'static [u64],
    class_n: usize,
    block_n: usize,
    decomposition_n: usize,
    decomposition_q: &'static [u64],
    order_n: usize,
    nilpotent_n: usize,
    interpolate: bool,
}

const FAST: Plan = Plan {
    pipeline_n: 2,
    pipeline_q: &[2, 3],
    series_order: 8,
    fitting_q: &[2, 3],
    sampled_fitting: false,
    route_n: 2,
    route_q: &[2, 3],
    class_n: 2,
    block_n: 3,
    decomposition_n: 2,
    decomposition_q: &[2, 3],
    order_n: 2,
    nilpotent_n: 2,
    interpolate: false,
};

const FULL: Plan = Plan {
    pipeline_n: 3,
    pipeline_q: &[2, 3, 4, 5],
    series_order: 12,
    fitting_q: &[2, 3],
    sampled_fitting: true,
    route_n: 3,
    route_q: &[2, 3, 5],
    class_n: 4,
    block_n: 5,
    decomposition_n: 3,
    decomposition_q: &[2, 3, 4, 5],
    order_n: 2,
    nilpotent_n: 3,
    interpolate: true,
};

pub fn run_suite(opts: &SuiteOptions, src: &dyn FactorSource) -> Vec<CheckResult> {
    run_suite_with(opts, src, &mut |_| {})
}

/// Runs every check in a fixed order, handing each result to `sink` as it completes.
pub fn run_suite_with(
    opts: &SuiteOptions,
    src: &dyn FactorSource,
    sink: &mut dyn FnMut(&CheckResult),
) -> Vec<CheckResult> {
    let plan = match opts.level {
        Level::Fast => &FAST,
        Level::Full => &FULL,
    };
    let mut out = Vec::new();
    let mut run = |name: String, check: &mut dyn FnMut() -> Result<(bool, String)>| {
        let start = Instant::now();
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let result = CheckResult { name, passed, detail, elapsed: start.elapsed() };
        sink(&result);
        out.push(result);
    };

    for &q in plan.pipeline_q {
        run(format!("pipelines n<={} q={q}", plan.pipeline_n), &mut || pipelines(q, plan.pipeline_n, opts, src));
    }
    run("anchor values".into(), &mut anchors);
    run("naive oracle agreement".into(), &mut || naive_agreement(opts));
    run(format!("counting polynomials n<={}", plan.series_order), &mut || polynomials(plan.series_order, src));
    run(format!("series decomposition N={}", plan.series_order), &mut || series_identities(plan.series_order, src));
    for &q in plan.fitting_q {
        run(format!("fitting exhaustive n=2 q={q}"), &mut || fitting_exhaustive(q));
    }
    if plan.sampled_fitting {
        run("fitting sampled n=3 q=5".into(), &mut || fitting_sampled(opts.seed));
    }
    for &q in plan.route_q {
        run(format!("similarity criterion n<={} q={q}", plan.class_n.max(plan.route_n)), &mut || {
            similarity(q, plan.route_n, plan.class_n)
        });
    }
    run(format!("block structure n<={}", plan.block_n), &mut || block_structure(plan.block_n));
    run(format!("decomposition via oracle n<={}", plan.decomposition_n), &mut || {
        decomposition(plan.decomposition_q, plan.decomposition_n, opts)
    });
    run(format!("order invariance n<={}", plan.order_n), &mut || order_invariance(plan.order_n, opts));
    run(format!("nilpotent zeta independence n<={}", plan.nilpotent_n), &mut || {
        nilpotent_independence(plan.nilpotent_n, opts)
    });
    if plan.interpolate {
        run("interpolated degrees".into(), &mut || interpolated(opts));
    }
    out
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

fn verdict(failures: Vec<String>, ok_detail: String) -> (bool, String) {
    if failures.is_empty() {
        (true, ok_detail)
    } else {
        let shown: Vec<_> = failures.iter().take(5).cloned().collect();
        (false, format!("{} failures: {}", failures.len(), shown.join("; ")))
    }
}

fn series_value(src: &dyn FactorSource, set: CountSet, m: u64, n: usize, q: u64) -> Result<BigInt> {
    let series = series_for_with(src, set, m, n)?;
    Ok(count_poly_from_series(set, &series, n)?.eval(&BigInt::from(q)))
}

/// Oracle, closed form and series agree for every set, `n` and `ζ`.
fn pipelines(q: u64, n_max: usize, opts: &SuiteOptions, src: &dyn FactorSource) -> Result<(bool, String)> {
    let f = FieldSpec::of_order(q)?;
    let closed = ClosedForm::new(q)?;
    let zetas: Vec<FieldElement> = f.units().collect();
    let mut failures = Vec::new();
    let mut compared = 0;
    for n in 0..=n_max {
        let tallies = oracle_tally(&f, n, &zetas, opts.threads, opts.budget)?;
        for t in &tallies {
            let m = f.mult_order(t.zeta)?;
            for set in [CountSet::K, CountSet::U, CountSet::N] {
                let oracle = BigInt::from(t.get(set).clone());
                let cf = BigInt::from(closed.count(set, n, m)?);
                let series = series_value(src, set, m, n, q)?;
                compared += 1;
                if oracle != cf || oracle != series {
                    failures.push(format!(
                        "{set} n={n} zeta={} oracle={oracle} closed={cf} series={series}",
                        f.format_element(t.zeta)
                    ));
                }
            }
        }
    }
    Ok(verdict(failures, format!("{compared} triples equal")))
}

fn anchors() -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut expect = |label: &str, got: BigUint, want: u64| {
        if got != BigUint::from(want) {
            failures.push(format!("{label}: got {got}, want {want}"));
        }
    };
    let el = FieldElement::from_index;
    let f2 = FieldSpec::prime(2)?;
    let f3 = FieldSpec::prime(3)?;
    expect("K m=1 n=2 q=2", oracle_naive(CountSet::K, 2, &f2, el(1))?, 88);
    expect("N n=2 q=2", oracle_naive(CountSet::N, 2, &f2, el(1))?, 28);
    expect("N n=2 q=3", oracle_naive(CountSet::N, 2, &f3, el(2))?, 153);
    expect("U m=2 n=2 q=3", oracle_naive(CountSet::U, 2, &f3, el(2))?, 192);
    expect("K m=2 n=2 q=3", oracle_naive(CountSet::K, 2, &f3, el(2))?, 417);
    for q in [3u64, 4, 5, 7] {
        let f = FieldSpec::of_order(q)?;
        for z in f.units().filter(|z| *z != FieldElement::ONE) {
            expect(&format!("K n=1 q={q}"), oracle_naive(CountSet::K, 1, &f, z)?, 2 * q - 1);
        }
    }
    Ok(verdict(failures, "all anchors reproduced by the naive oracle".into()))
}

fn naive_agreement(opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut compared = 0;
    let mut compare = |f: &FieldSpec, n: usize| -> Result<()> {
        let zetas: Vec<FieldElement> = f.units().collect();
        for t in oracle_tally(f, n, &zetas, opts.threads, opts.budget)? {
            for set in [CountSet::K, CountSet::U, CountSet::N] {
                compared += 1;
                let naive = oracle_naive(set, n, f, t.zeta)?;
                if &naive != t.get(set) {
                    failures.push(format!("{set} n={n} q={} zeta={}", f.q(), f.format_element(t.zeta)));
                }
            }
        }
        Ok(())
    };
    for q in [2u64, 3, 4, 5, 7] {
        compare(&FieldSpec::of_order(q)?, 1)?;
    }
    compare(&FieldSpec::prime(2)?, 2)?;
    Ok(verdict(failures, format!("{compared} counts equal")))
}

fn polynomials(order: usize, src: &dyn FactorSource) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let named = [
        (CountSet::N, 1, PolyQ::from_i64s(&[0, 0, -1, 0, 2])),
        (CountSet::K, 1, PolyQ::from_i64s(&[0, 0, 0, -1, 0, 1, 1])),
        (CountSet::K, 2, PolyQ::from_i64s(&[0, 1, -2, -2, 3, 1])),
    ];
    for (set, m, want) in named {
        let got = count_poly_from_series(set, &series_for_with(src, set, m, 2)?, 2)?;
        if got != want {
            failures.push(format!("{set} m={m} n=2: got {got}, want {want}"));
        }
    }
    let mut checked = 0;
    for set in [CountSet::K, CountSet::U, CountSet::N, CountSet::S] {
        let mut n_polys: Option<Vec<PolyQ>> = None;
        for m in 1..=6u64 {
            let series = series_for_with(src, set, m, order)?;
            let mut polys = Vec::new();
            for n in 0..=order {
                checked += 1;
                match count_poly_from_series(set, &series, n) {
                    Ok(p) => {
                        if let Some(q) = (2..=9i64).find(|&q| p.eval(&BigInt::from(q)).is_negative()) {
                            failures.push(format!("{set} m={m} n={n} negative at q={q}"));
                        }
                        polys.push(p);
                    }
                    Err(e) => failures.push(format!("{set} m={m} n={n}: {e}")),
                }
            }
            if set == CountSet::N {
                match &n_polys {
                    None => n_polys = Some(polys),
                    Some(first) if *first != polys => failures.push(format!("N depends on m at m={m}")),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(verdict(failures, format!("{checked} polynomials integral")))
}

fn series_identities(order: usize, src: &dyn FactorSource) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    for m in [1u64, 2, 3, 4, 6] {
        let k = series_for_with(src, CountSet::K, m, order)?;
        let u = series_for_with(src, CountSet::U, m, order)?;
        let n = series_for_with(src, CountSet::N, m, order)?;
        if k != u.mul(&n)? {
            failures.push(format!("K != U*N at m={m}"));
        }
    }
    // F_m from its defining quotient, times the Euler product prod_j 1/(1 - x q^-j),
    // whose coefficients c_a satisfy c_a (1 - q^-a) = c_(a-1).
    let mut euler = vec![RatQ::one()];
    for a in 1..=order {
        let c = euler[a - 1].div(&RatQ::one().sub(&RatQ::q_pow(-(a as i64))))?;
        euler.push(c);
    }
    let euler = SeriesX::new(order, euler);
    let h = src.h(order);
    for m in [1u64, 2, 3] {
        let m_us = m as usize;
        let mut num = vec![RatQ::zero(); m_us + 1];
        num[0] = RatQ::one();
        num[m_us] = RatQ::from_int(-1);
        let mut den = vec![RatQ::zero(); m_us + 2];
        let q = RatQ::q_pow(1);
        den[0] = RatQ::one();
        den[1] = RatQ::from_int(-1);
        den[m_us] = den[m_us].sub(&q);
        den[m_us + 1] = den[m_us + 1].add(&q);
        let quotient = SeriesX::new(order, num).div(&SeriesX::new(order, den))?;
        if quotient.mul(&euler)? != src.g(m, order).mul(&h)? {
            failures.push(format!("F_{m} != G_{m} H"));
        }
    }
    Ok(verdict(failures, "K = U N for m in 1,2,3,4,6; F = G H for m in 1,2,3".into()))
}

fn fitting_exhaustive(q: u64) -> Result<(bool, String)> {
    let f = FieldSpec::of_order(q)?;
    let mut failures = Vec::new();
    let mut pairs = 0;
    for z in f.units() {
        let r = verify_fitting(&f, 2, z, FittingMode::Exhaustive)?;
        pairs += r.pairs_tested;
        if !r.passed() {
            failures.push(format!(
                "zeta={}: {} counterexamples, {} bad decompositions",
                f.format_element(z),
                r.counterexamples,
                r.bad_decompositions
            ));
        }
    }
    Ok(verdict(failures, format!("{pairs} pairs, no counterexample")))
}

fn fitting_sampled(seed: u64) -> Result<(bool, String)> {
    let f = FieldSpec::prime(5)?;
    let mut failures = Vec::new();
    let mut solutions = 0;
    for z in f.units() {
        let r = verify_fitting(&f, 3, z, FittingMode::Sampled { seed, samples: 2000 })?;
        solutions += r.solutions;
        if !r.passed() {
            failures.push(format!("zeta={}: {} counterexamples", f.format_element(z), r.counterexamples));
        }
    }
    Ok(verdict(failures, format!("8000 sampled pairs ({solutions} solutions), seed {seed}")))
}

fn similarity(q: u64, route_n: usize, class_n: usize) -> Result<(bool, String)> {
    let f = FieldSpec::of_order(q)?;
    let mut failures = Vec::new();
    let mut matrices = 0;
    for n in 0..=route_n.max(class_n) {
        for r in verify_similarity_criterion_all(&f, n)? {
            matrices += r.matrices_checked;
            if !r.passed() {
                failures.push(format!(
                    "n={n} zeta={}: {} disagreements, classes {}/{} similar, chains in P_m {}, expected {}",
                    f.format_element(r.zeta),
                    r.disagreements,
                    r.classes_similar,
                    r.classes_seen,
                    r.chains_in_pm,
                    r.expected
                ));
            }
        }
    }
    Ok(verdict(failures, format!("{matrices} matrices, class counts match")))
}

fn block_structure(n_max: usize) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for q in [2u64, 3, 5] {
        let f = FieldSpec::of_order(q)?;
        for n in 0..=n_max {
            for pi in partitions(n) {
                for z in f.units() {
                    checked += 1;
                    let r = verify_block_structure(&pi, &f, z)?;
                    if !r.passed() {
                        failures.push(format!("{pi} q={q}: {r:?}"));
                    }
                }
            }
        }
    }
    Ok(verdict(failures, format!("{checked} representatives")))
}

fn decomposition(qs: &[u64], n_max: usize, opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut rows = 0;
    for &q in qs {
        let f = FieldSpec::of_order(q)?;
        for z in f.units() {
            for row in verify_decomposition(&f, z, n_max, opts.threads, opts.budget)? {
                rows += 1;
                if !row.holds() {
                    failures.push(format!("q={q} zeta={} n={}", f.format_element(z), row.n));
                }
            }
        }
    }
    Ok(verdict(failures, format!("{rows} decompositions hold")))
}

fn order_invariance(n_max: usize, opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    for q in [5u64, 7] {
        let f = FieldSpec::prime(q)?;
        let zetas: Vec<FieldElement> = f.units().collect();
        for n in 0..=n_max {
            let tallies = oracle_tally(&f, n, &zetas, opts.threads, opts.budget)?;
            for a in &tallies {
                for b in &tallies {
                    if f.mult_order(a.zeta)? == f.mult_order(b.zeta)? && a.k != b.k {
                        failures.push(format!(
                            "q={q} n={n} zeta {} vs {}",
                            f.format_element(a.zeta),
                            f.format_element(b.zeta)
                        ));
                    }
                }
            }
        }
    }
    Ok(verdict(failures, "K depends only on ord(zeta) in GF(5), GF(7)".into()))
}

fn nilpotent_independence(n_max: usize, opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    for q in [2u64, 3, 4] {
        let f = FieldSpec::of_order(q)?;
        let zetas: Vec<FieldElement> = f.units().collect();
        for n in 0..=n_max {
            let tallies: Vec<Tally> = oracle_tally(&f, n, &zetas, opts.threads, opts.budget)?;
            if tallies.iter().any(|t| t.n != tallies[0].n) {
                failures.push(format!("q={q} n={n}"));
            }
        }
    }
    Ok(verdict(failures, "N identical across all zeta for q <= 4".into()))
}

/// Lagrange interpolation through `(x_i, y_i)`; `None` if the result is not integral.
pub fn interpolate(points: &[(BigInt, BigInt)]) -> Option<PolyQ> {
    let mut acc = vec![BigRational::zero(); points.len()];
    for (i, (xi, yi)) in points.iter().enumerate() {
        // basis polynomial prod_{j != i} (q - x_j) / (x_i - x_j)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigInt::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * BigRational::from_integer(xj.clone());
            }
            basis = next;
            denom *= xi - xj;
        }
        let scale = BigRational::new(yi.clone(), denom);
        for (a, c) in acc.iter_mut().zip(basis) {
            *a += c * &scale;
        }
    }
    acc.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect::<Option<Vec<_>>>().map(PolyQ::new)
}

const PRIMES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// `deg |K_{1,n}| = n^2 + n`: oracle-interpolated for `n <= 2`, and from the closed form at
/// `n^2 + n + 2` primes for `n <= 4`, each matched against the series polynomial.
fn interpolated(opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut detail = String::new();
    for n in 1..=4usize {
        let deg = n * n + n;
        let series = crate::qfunc::count_poly(CountSet::K, 1, n)?;
        let primes: Vec<u64> = if n <= 2 {
            PRIMES[..deg + 1].to_vec()
        } else {
            (2u64..).filter(|&p| crate::ff::is_prime(p)).take(deg + 2).collect()
        };
        let points: Vec<(BigInt, BigInt)> = primes
            .iter()
            .map(|&p| {
                let v = if n <= 2 {
                    let f = FieldSpec::prime(p)?;
                    oracle_tally(&f, n, &[FieldElement::ONE], opts.threads, opts.budget)?.remove(0).k
                } else {
                    ClosedForm::new(p)?.count_k(n, 1)?
                };
                Ok((BigInt::from(p), BigInt::from(v)))
            })
            .collect::<Result<_>>()?;
        let source = if n <= 2 { "oracle" } else { "closed form" };
        match interpolate(&points) {
            Some(p) if p == series && p.degree() == Some(deg) => {
                let _ = write!(detail, "n={n} deg {deg} ({source}); ");
            }
            Some(p) => failures.push(format!("n={n}: interpolated {p} vs series {series}")),
            None => failures.push(format!("n={n}: interpolation not integral")),
        }
    }
    Ok(verdict(failures, detail.trim_end_matches("; ").to_string()))
}
