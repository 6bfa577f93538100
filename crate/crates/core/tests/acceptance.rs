//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use qcommute_core::counting::{ClosedForm, CountSet};
use qcommute_core::oracle::{
    oracle_naive, oracle_tally, verify_fitting, verify_similarity_criterion_all, FittingMode, DEFAULT_BUDGET,
};
use qcommute_core::qfunc::{count_eval, count_poly, count_polys, factor_g, factor_h, series_for, FactorSource};
use qcommute_core::suite::{run_suite, Level, SuiteOptions};
use qcommute_core::{FieldElement, FieldSpec, PolyQ, RatQ, SeriesX};

/// Every count is compared exactly.
const TOLERANCE: u64 = 0;
const PIPELINE_LIMIT: Duration = Duration::from_secs(600);
const IDENTITY_LIMIT: Duration = Duration::from_secs(60);
const EXHAUSTIVE_LIMIT: Duration = Duration::from_secs(60);
const SIMILARITY_LIMIT: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(failures: Vec<String>, ok: String) -> Outcome {
    if failures.is_empty() {
        Ok(ok)
    } else {
        let shown: Vec<_> = failures.iter().take(5).cloned().collect();
        Err(format!("{} failures: {}", failures.len(), shown.join("; ")))
    }
}

fn within(start: Instant, limit: Duration, failures: &mut Vec<String>) {
    if start.elapsed() > limit {
        failures.push(format!("took {:?}, limit {limit:?}", start.elapsed()));
    }
}

fn diff(a: &BigInt, b: &BigInt) -> BigInt {
    if a > b {
        a - b
    } else {
        b - a
    }
}

fn pipelines() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut compared = 0;
    for q in [2u64, 3, 4, 5] {
        let f = FieldSpec::of_order(q).map_err(|e| e.to_string())?;
        let closed = ClosedForm::new(q).map_err(|e| e.to_string())?;
        let zetas: Vec<FieldElement> = f.units().collect();
        for n in 0..=3 {
            let tallies = oracle_tally(&f, n, &zetas, 1, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            for t in &tallies {
                let m = f.mult_order(t.zeta).map_err(|e| e.to_string())?;
                for set in [CountSet::K, CountSet::U, CountSet::N] {
                    let oracle = BigInt::from(t.get(set).clone());
                    let cf = BigInt::from(closed.count(set, n, m).map_err(|e| e.to_string())?);
                    let ser = count_eval(set, m, n, q).map_err(|e| e.to_string())?;
                    compared += 1;
                    let tol = BigInt::from(TOLERANCE);
                    if diff(&oracle, &cf) > tol || diff(&oracle, &ser) > tol {
                        failures
                            .push(format!("{set} n={n} q={q} zeta={}: {oracle} {cf} {ser}", f.format_element(t.zeta)));
                    }
                }
            }
        }
    }
    within(start, PIPELINE_LIMIT, &mut failures);
    ensure(failures, format!("{compared} oracle/closed/series triples equal, single worker, {:.1?}", start.elapsed()))
}

fn anchors() -> Outcome {
    let mut failures = Vec::new();
    let el = FieldElement::from_index;
    let mut check = |label: String, set: CountSet, n: usize, q: u64, zeta: FieldElement, want: u64| {
        let f = FieldSpec::of_order(q).unwrap();
        let m = f.mult_order(zeta).unwrap();
        let naive = oracle_naive(set, n, &f, zeta).unwrap();
        let closed = ClosedForm::new(q).unwrap().count(set, n, m).unwrap();
        let want = BigUint::from(want);
        if naive != want || closed != want {
            failures.push(format!("{label}: naive {naive}, closed form {closed}, want {want}"));
        }
    };
    check("K m=1 n=2 q=2".into(), CountSet::K, 2, 2, el(1), 88);
    check("N n=2 q=2".into(), CountSet::N, 2, 2, el(1), 28);
    check("N n=2 q=3".into(), CountSet::N, 2, 3, el(1), 153);
    check("U zeta=-1 n=2 q=3".into(), CountSet::U, 2, 3, el(2), 192);
    check("K zeta=-1 n=2 q=3".into(), CountSet::K, 2, 3, el(2), 417);
    let mut cases = 5;
    for q in [3u64, 4, 5, 7] {
        let f = FieldSpec::of_order(q).unwrap();
        for z in f.units().filter(|&z| z != FieldElement::ONE) {
            check(format!("K n=1 q={q} zeta={}", f.format_element(z)), CountSet::K, 1, q, z, 2 * q - 1);
            cases += 1;
        }
    }
    ensure(failures, format!("{cases} anchors, each recomputed by the naive pair oracle"))
}

fn polynomials() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let named = [
        (CountSet::N, 1u64, 2usize, PolyQ::from_i64s(&[0, 0, -1, 0, 2])),
        (CountSet::K, 1, 2, PolyQ::from_i64s(&[0, 0, 0, -1, 0, 1, 1])),
        (CountSet::K, 2, 2, PolyQ::from_i64s(&[0, 1, -2, -2, 3, 1])),
    ];
    for (set, m, n, want) in &named {
        match count_poly(*set, *m, *n) {
            Ok(p) if &p == want => {}
            Ok(p) => failures.push(format!("{set} m={m} n={n}: {p}, want {want}")),
            Err(e) => failures.push(e.to_string()),
        }
    }
    // Integer coefficients and zero remainder are enforced by count_polys, which fails
    // on any leftover denominator. Values must be nonnegative counts.
    let mut total = 0;
    let mut with_negative_coefficients = 0;
    for set in [CountSet::K, CountSet::U, CountSet::N, CountSet::S] {
        for m in 1..=6u64 {
            let polys = match count_polys(set, m, 12) {
                Ok(p) => p,
                Err(e) => {
                    failures.push(format!("{set} m={m}: {e}"));
                    continue;
                }
            };
            for (n, p) in polys.iter().enumerate() {
                total += 1;
                if p.coeffs().iter().any(|c| c.sign() == num_bigint::Sign::Minus) {
                    with_negative_coefficients += 1;
                }
                for q in 2..=9i64 {
                    if p.eval(&BigInt::from(q)).sign() == num_bigint::Sign::Minus {
                        failures.push(format!("{set} m={m} n={n} negative at q={q}"));
                    }
                }
            }
        }
    }
    within(start, IDENTITY_LIMIT, &mut failures);
    ensure(
        failures,
        format!(
            "3 named polynomials exact; {total} polynomials integral with zero remainder and nonnegative values; \
             sign clause read as values, since {with_negative_coefficients} polynomials, \
             the named ones included, have negative coefficients"
        ),
    )
}

fn series_identities() -> Outcome {
    let start = Instant::now();
    let order = 12;
    let mut failures = Vec::new();
    for m in [1u64, 2, 3, 4, 6] {
        let k = series_for(CountSet::K, m, order).unwrap();
        let u = series_for(CountSet::U, m, order).unwrap();
        let n = series_for(CountSet::N, m, order).unwrap();
        if k != u.mul(&n).unwrap() {
            failures.push(format!("K != U N at m={m}"));
        }
    }
    // F_m straight from (1 - x^m) / ((1 - x)(1 - q x^m)) * prod_j 1/(1 - x q^-j).
    // The product P satisfies P(x) = P(x/q) / (1 - x), so c_a = c_(a-1) / (1 - q^-a).
    let mut euler = vec![RatQ::one()];
    for a in 1..=order {
        let next = euler[a - 1].div(&RatQ::one().sub(&RatQ::q_pow(-(a as i64)))).unwrap();
        euler.push(next);
    }
    let euler = SeriesX::new(order, euler);
    for m in [1usize, 2, 3] {
        // 1 / (1 - q x^m) as a geometric series, times (1 - x^m) / (1 - x) = 1 + x + ... + x^(m-1)
        let geometric: Vec<RatQ> =
            (0..=order).map(|b| if b % m == 0 { RatQ::q_pow((b / m) as i64) } else { RatQ::zero() }).collect();
        let head: Vec<RatQ> = (0..m).map(|_| RatQ::one()).collect();
        let g_direct = SeriesX::new(order, geometric).mul(&SeriesX::new(order, head)).unwrap();
        let f_direct = g_direct.mul(&euler).unwrap();
        let f_product = factor_g(m as u64, order).mul(&factor_h(order)).unwrap();
        if f_direct != f_product {
            failures.push(format!("F_{m} != G_{m} H"));
        }
    }
    within(start, IDENTITY_LIMIT, &mut failures);
    ensure(failures, format!("K = U N for m in 1,2,3,4,6 and F_m = G_m H for m in 1,2,3, to x^{order}"))
}

fn fitting() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for q in [2u64, 3] {
        let f = FieldSpec::of_order(q).unwrap();
        for z in f.units() {
            let r = verify_fitting(&f, 2, z, FittingMode::Exhaustive).unwrap();
            pairs += r.pairs_tested;
            if r.counterexamples > TOLERANCE || !r.passed() {
                failures.push(format!("q={q} zeta={}: {} counterexamples", f.format_element(z), r.counterexamples));
            }
        }
    }
    within(start, EXHAUSTIVE_LIMIT, &mut failures);
    ensure(failures, format!("{pairs} pairs (A, B, zeta), zero counterexamples"))
}

fn similarity() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut matrices = 0u64;
    for q in [2u64, 3, 5] {
        let f = FieldSpec::of_order(q).unwrap();
        for n in 0..=4 {
            for r in verify_similarity_criterion_all(&f, n).unwrap() {
                if n <= 3 && !r.exhaustive {
                    failures.push(format!("n={n} q={q} not checked for every matrix"));
                }
                matrices += r.matrices_checked;
                let direct = BigUint::from(r.classes_similar);
                let closed = ClosedForm::new(q).unwrap().count(CountSet::S, n, r.m).unwrap();
                if r.disagreements > TOLERANCE || direct != closed || !r.passed() {
                    failures.push(format!(
                        "n={n} q={q} zeta={}: {} disagreements, {direct} classes vs count {closed}",
                        f.format_element(r.zeta),
                        r.disagreements
                    ));
                }
            }
        }
    }
    within(start, SIMILARITY_LIMIT, &mut failures);
    ensure(
        failures,
        format!("both routes agree on all {matrices} matrices checked (every matrix for n <= 3); class counts equal count_S for n <= 4"),
    )
}

fn order_invariance() -> Outcome {
    let mut failures = Vec::new();
    let el = FieldElement::from_index;
    for (q, a, b) in [(5u64, 2u32, 3u32), (7, 3, 5)] {
        let f = FieldSpec::of_order(q).unwrap();
        for n in 0..=2 {
            let t = oracle_tally(&f, n, &[el(a), el(b)], 1, DEFAULT_BUDGET).unwrap();
            if t[0].k != t[1].k {
                failures.push(format!("q={q} n={n}: K differs for zeta={a} and zeta={b}"));
            }
        }
    }
    for q in [2u64, 3, 4, 5] {
        let f = FieldSpec::of_order(q).unwrap();
        let zetas: Vec<FieldElement> = f.units().collect();
        for n in 0..=2 {
            let t = oracle_tally(&f, n, &zetas, 1, DEFAULT_BUDGET).unwrap();
            if t.iter().any(|x| x.n != t[0].n) {
                failures.push(format!("q={q} n={n}: N depends on zeta"));
            }
        }
    }
    ensure(failures, "K equal for same-order zeta in GF(5), GF(7); N equal across all zeta, q <= 5".into())
}

fn determinism() -> Outcome {
    let outcomes: Vec<Vec<(String, bool, String)>> = [1usize, 2, 8]
        .iter()
        .map(|&threads| {
            let opts = SuiteOptions { threads, ..SuiteOptions::new(Level::Fast) };
            run_suite(&opts, &qcommute_core::qfunc::ExactFactors)
                .iter()
                .map(|r| {
                    let (name, passed, detail) = r.outcome();
                    (name.to_string(), passed, detail.to_string())
                })
                .collect()
        })
        .collect();
    let mut failures = Vec::new();
    if outcomes[0] != outcomes[1] || outcomes[0] != outcomes[2] {
        failures.push("fast suite results differ between 1, 2 and 8 workers".into());
    }
    if outcomes[0].iter().any(|o| !o.1) {
        failures.push("fast suite has failing checks".into());
    }
    ensure(failures, format!("{} fast checks identical for 1, 2 and 8 workers", outcomes[0].len()))
}

/// Doubles every coefficient of `G_m` past the constant term.
struct CorruptedG;

impl FactorSource for CorruptedG {
    fn g(&self, m: u64, order: usize) -> SeriesX {
        let good = factor_g(m, order);
        let coeffs = good.coeffs().iter().enumerate().map(|(b, c)| if b == 0 { c.clone() } else { c.add(c) }).collect();
        SeriesX::new(order, coeffs)
    }

    fn h(&self, order: usize) -> SeriesX {
        factor_h(order)
    }
}

fn fault_injection() -> Outcome {
    let results = run_suite(&SuiteOptions::new(Level::Fast), &CorruptedG);
    let pipeline_failures = results.iter().filter(|r| r.name.starts_with("pipelines") && !r.passed).count();
    if pipeline_failures > 0 {
        Ok(format!("corrupted G_m caught by {pipeline_failures} series-vs-oracle checks"))
    } else {
        Err("corrupted G_m went unnoticed".into())
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 three-pipeline agreement", pipelines),
        ("2 anchor values", anchors),
        ("3 polynomial identities", polynomials),
        ("4 series identities", series_identities),
        ("5 fitting decomposition", fitting),
        ("6 similarity criterion", similarity),
        ("7 zeta-order invariance", order_invariance),
        ("8 determinism", determinism),
        ("fault injection", fault_injection),
    ];
    let mut all = true;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{ms} ms]"),
            Err(detail) => {
                all = false;
                println!("FAIL criterion {name}: {detail} [{ms} ms]");
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
