//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use milnor_core::hodge::Engine;
use milnor_core::monodromy::{self, JordanSpectrum};
use milnor_core::newton::NewtonPolyhedron;
use milnor_core::oracles::{self, brieskorn_pham_spectrum, kouchnirenko_mu};
use milnor_core::poly::{parse_polynomial, SupportSet};
use milnor_core::{EquivariantHodgeTable, RootOfUnity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn r(s: &str) -> RootOfUnity {
    s.parse().unwrap()
}

fn np(s: &str) -> NewtonPolyhedron {
    NewtonPolyhedron::new(parse_polynomial(s, None).unwrap()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spectrum(p: &NewtonPolyhedron, e: &Engine) -> Result<JordanSpectrum, String> {
    monodromy::jordan_blocks(p, e).map_err(|e| e.to_string())
}

fn blocks(entries: &[(&str, usize, u64)]) -> BTreeMap<RootOfUnity, BTreeMap<usize, u64>> {
    let mut out: BTreeMap<RootOfUnity, BTreeMap<usize, u64>> = BTreeMap::new();
    for &(l, k, c) in entries {
        out.entry(r(l)).or_default().insert(k, c);
    }
    out
}

fn golden_total(n: usize, e: &[(usize, usize, &str, i64)]) -> EquivariantHodgeTable {
    let v: Vec<_> = e.iter().map(|&(p, q, a, v)| (p, q, r(a), v)).collect();
    EquivariantHodgeTable::from_entries(n, &v)
}

fn golden_case(
    poly: &str,
    mu: u64,
    expected: &[(&str, usize, u64)],
    total: Option<&[(usize, usize, &str, i64)]>,
) -> Outcome {
    let e = Engine::new();
    let p = np(poly);
    let t = monodromy::motivic_milnor_table(&p, &e).map_err(|e| e.to_string())?;
    let s = monodromy::spectrum_from_table(&t).map_err(|e| e.to_string())?;
    ensure(s.mu == mu, || format!("mu = {}, expected {mu}", s.mu))?;
    ensure(s.blocks == blocks(expected), || format!("blocks {:?}", s.blocks))?;
    if let Some(g) = total {
        let g = golden_total(p.n(), g);
        ensure(t.total == g, || format!("total {:?}", t.total.entries()))?;
    }
    Ok(format!("mu = {mu}"))
}

fn criterion_1() -> Outcome {
    golden_case(
        "x^2 + y^3",
        2,
        &[("1/6", 1, 1), ("5/6", 1, 1)],
        Some(&[(0, 0, "0/1", 1), (1, 0, "5/6", -1), (0, 1, "1/6", -1)]),
    )
}

fn criterion_2() -> Outcome {
    golden_case("x^2 + y^2", 1, &[("0/1", 1, 1)], Some(&[(0, 0, "0/1", 1), (1, 1, "0/1", -1)]))
}

fn criterion_3() -> Outcome {
    let e = Engine::new();
    let p = np("x^3 + y^3");
    let s = spectrum(&p, &e)?;
    ensure(s.mu == 4, || format!("mu = {}", s.mu))?;
    ensure(s.multiplicity(RootOfUnity::ONE) == 2, || format!("blocks {:?}", s.blocks))?;
    ensure(s.count(RootOfUnity::ONE, 1) == 2, || format!("blocks {:?}", s.blocks))?;
    ensure(s.is_semisimple(), || format!("blocks {:?}", s.blocks))?;
    let (pi, _) = monodromy::fastpath_unipotent(&p);
    ensure(pi == 2, || format!("Π_f = {pi}"))?;
    Ok("mu = 4, Π_f = 2".into())
}

fn criterion_4() -> Outcome {
    let e = Engine::new();
    let mut cases = 0;
    let mut grid: Vec<Vec<u64>> = Vec::new();
    for a in 2..=5 {
        for b in 2..=5 {
            grid.push(vec![a, b]);
            for c in 2..=5 {
                grid.push(vec![a, b, c]);
            }
        }
    }
    for exps in grid {
        let vars = ["x", "y", "z"];
        let poly: Vec<String> = exps.iter().zip(vars).map(|(a, v)| format!("{v}^{a}")).collect();
        let p = np(&poly.join(" + "));
        let s = spectrum(&p, &e)?;
        let (_, oracle) = brieskorn_pham_spectrum(&exps);
        ensure(s == oracle, || format!("{exps:?}: engine {:?}, oracle {:?}", s.blocks, oracle.blocks))?;
        let product: u64 = exps.iter().map(|a| a - 1).product();
        ensure(s.mu == product && kouchnirenko_mu(&p) == product, || {
            format!("{exps:?}: mu {} vs {product}", s.mu)
        })?;
        cases += 1;
    }
    Ok(format!("{cases} exponent vectors"))
}

fn criterion_5() -> Outcome {
    let e = Engine::new();
    let p = np("x^5 + x^2*y^2 + y^5");
    let t = monodromy::motivic_milnor_table(&p, &e).map_err(|e| e.to_string())?;
    let s = monodromy::spectrum_from_table(&t).map_err(|e| e.to_string())?;
    ensure(s.mu == 11, || format!("mu = {}", s.mu))?;
    ensure(s.count(r("1/2"), 2) == 1, || format!("blocks {:?}", s.blocks))?;
    ensure(
        s.blocks.iter().all(|(l, b)| b.keys().all(|&k| k == 1) || *l == r("1/2")),
        || format!("blocks {:?}", s.blocks),
    )?;
    ensure(s.blocks.get(&RootOfUnity::ONE) == Some(&BTreeMap::from([(1, 1)])), || {
        format!("blocks {:?}", s.blocks)
    })?;
    let top = monodromy::fastpath_top(&p, r("1/2")).map_err(|e| e.to_string())?;
    ensure(top == (1, 0), || format!("fastpath_top(1/2) = {top:?}"))?;
    for l in t.first_sum.roots().into_iter().filter(|l| !l.is_one()) {
        let (a, b) = monodromy::fastpath_top(&p, l).map_err(|e| e.to_string())?;
        ensure((a, b) == (s.count(l, 2), s.count(l, 1)), || format!("λ={l}: fast ({a},{b})"))?;
    }
    let (pi, _) = monodromy::fastpath_unipotent(&p);
    ensure(pi == s.count(RootOfUnity::ONE, 1), || format!("Π_f = {pi}"))?;
    Ok("mu = 11, one size-2 block at 1/2".into())
}

fn criterion_6() -> Outcome {
    let e = Engine::new();
    let p = np("x^4 + y^4 + z^4 + x^2*y^2*z^2");
    let fast = monodromy::fastpath_unipotent(&p);
    ensure(fast == (0, 6), || format!("fastpath_unipotent = {fast:?}"))?;
    let t = monodromy::motivic_milnor_table(&p, &e).map_err(|e| e.to_string())?;
    for k in 1..=3 {
        let (a, b) = (monodromy::unipotent_at_least_total(&t, k), monodromy::unipotent_at_least_first(&t, k));
        ensure(a == b, || format!("size ≥ {k}: {a} vs {b}"))?;
    }
    let report = oracles::validate_tables(&p, &e, &t).map_err(|e| e.to_string())?;
    ensure(report.all_passed(), || format!("{:?}", report.failures().collect::<Vec<_>>()))?;
    Ok(format!("{} checks", report.checks.len()))
}

fn criterion_7() -> Outcome {
    let e = Engine::new();
    let p = np("x^7 + y^7 + z^7 + x^2*y^2*z^2");
    let top = monodromy::fastpath_top(&p, r("1/2")).map_err(|e| e.to_string())?;
    ensure(top.0 == 1, || format!("fastpath_top(1/2) = {top:?}"))?;
    let s = spectrum(&p, &e)?;
    ensure(s.count(r("1/2"), 3) == 1, || format!("general path: {:?}", s.blocks.get(&r("1/2"))))?;
    ensure(s.count(r("1/2"), 2) == top.1, || format!("size 2 at 1/2: fast {} general {}", top.1, s.count(r("1/2"), 2)))?;
    let mu = kouchnirenko_mu(&p);
    ensure(s.mu == mu, || format!("mu {} vs oracle {mu}", s.mu))?;
    Ok(format!("mu = {mu}"))
}

fn random_support(rng: &mut ChaCha8Rng) -> SupportSet {
    let n = rng.gen_range(2..=3);
    let mut points: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = rng.gen_range(2..=6);
            v
        })
        .collect();
    let extra = rng.gen_range(0..=8 - n);
    for _ in 0..extra {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=6)).collect();
        if v.iter().sum::<i64>() >= 2 && !points.contains(&v) {
            points.push(v);
        }
    }
    SupportSet::from_points(points).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let e = Engine::new();
    let runs = 200;
    let mut checks = 0;
    for i in 0..runs {
        let support = random_support(&mut rng);
        let p = NewtonPolyhedron::new(support.clone()).map_err(|e| format!("run {i}: {e}"))?;
        let report = oracles::validate(&p, &e).map_err(|e| format!("run {i} ({support}): {e}"))?;
        for name in ["bkk-total", "conjugation-symmetry", "pyramid-identity", "global-identity", "ehrhart-shift", "steenbrink-saito", "eigenvalue-1-routes", "pseudo-prime-row-sums", "block-counts", "kouchnirenko"] {
            ensure(report.get(name).is_some(), || format!("run {i}: check {name} did not run"))?;
        }
        ensure(report.all_passed(), || {
            format!("run {i} ({support}): {:?}", report.failures().collect::<Vec<_>>())
        })?;
        checks += report.checks.len();
    }
    Ok(format!("{runs} supports, {checks} checks"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("cusp x^2+y^3", criterion_1, Duration::from_secs(1)),
        ("node x^2+y^2", criterion_2, Duration::from_secs(1)),
        ("x^3+y^3", criterion_3, Duration::from_secs(1)),
        ("Brieskorn-Pham grid", criterion_4, Duration::from_secs(60)),
        ("x^5+x^2y^2+y^5", criterion_5, Duration::from_secs(5)),
        ("x^4+y^4+z^4+x^2y^2z^2", criterion_6, Duration::from_secs(30)),
        ("x^7+y^7+z^7+x^2y^2z^2", criterion_7, Duration::from_secs(60)),
        ("random property suite", criterion_8, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > budget => Err(format!("over budget {budget:?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({why}; {elapsed:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
