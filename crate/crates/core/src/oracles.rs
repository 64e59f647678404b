//! Independent ground truth and the cross-check battery.
//!
//! The Newton number is computed here by brute-force facet enumeration and
//! exact rational volumes, sharing no geometry code with the main pipeline.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::ehrhart::PhiTable;
use crate::error::Result;
use crate::hodge::{Engine, EquivariantHodgeTable};
use crate::monodromy::{self, JordanSpectrum, MotivicTable};
use crate::newton::NewtonPolyhedron;
use crate::polytope::Primeness;
use crate::root::RootOfUnity;

type Q = Ratio<i128>;

fn dot_q(a: &[Q], b: &[i64]) -> Q {
    a.iter().zip(b).map(|(x, &y)| *x * Q::from_integer(y as i128)).sum()
}

/// One-dimensional null space of the rows, if that is its dimension.
fn normal(rows: &[Vec<Q>], d: usize) -> Option<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..d {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..d {
                    let t = m[r][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() + 1 != d {
        return None;
    }
    let free = (0..d).find(|c| !pivots.contains(c))?;
    let mut v = vec![Q::zero(); d];
    v[free] = Q::one();
    for (i, &c) in pivots.iter().enumerate() {
        v[c] = -m[i][free];
    }
    Some(v)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Supporting hyperplanes `a·x = c` through `d` of the points with every
/// point on the side `a·x ≥ c`, each given once with its points.
fn facets(points: &[Vec<i64>], d: usize) -> Vec<(Vec<Q>, Q, Vec<usize>)> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for s in subsets(points.len(), d) {
        let p0 = &points[s[0]];
        let rows: Vec<Vec<Q>> = s[1..]
            .iter()
            .map(|&i| {
                points[i]
                    .iter()
                    .zip(p0)
                    .map(|(&x, &y)| Q::from_integer((x - y) as i128))
                    .collect()
            })
            .collect();
        let Some(mut a) = normal(&rows, d) else {
            continue;
        };
        let mut c = dot_q(&a, p0);
        let vals: Vec<Q> = points.iter().map(|p| dot_q(&a, p)).collect();
        if vals.iter().all(|v| *v == c) {
            // every point on one hyperplane: both orientations support it
            let neg: Vec<Q> = a.iter().map(|x| -*x).collect();
            out.push((neg, -c, (0..points.len()).collect()));
            out.push((a, c, (0..points.len()).collect()));
            return out;
        }
        if vals.iter().all(|v| *v <= c) {
            a.iter_mut().for_each(|x| *x = -*x);
            c = -c;
        } else if !vals.iter().all(|v| *v >= c) {
            continue;
        }
        let on: Vec<usize> = (0..points.len())
            .filter(|&i| dot_q(&a, &points[i]) == c)
            .collect();
        if seen.insert(on.clone()) {
            out.push((a, c, on));
        }
    }
    out
}

/// Euclidean volume of the convex hull of full-dimensional points in ℝ^d.
fn hull_volume(points: &[Vec<i64>], d: usize) -> Q {
    if d == 0 {
        return Q::one();
    }
    if d == 1 {
        let lo = points.iter().map(|p| p[0]).min().unwrap();
        let hi = points.iter().map(|p| p[0]).max().unwrap();
        return Q::from_integer((hi - lo) as i128);
    }
    let apex = &points[0];
    let mut vol = Q::zero();
    for (a, c, on) in facets(points, d) {
        let h = c - dot_q(&a, apex);
        if h.is_zero() {
            continue;
        }
        vol += pyramid_volume(points, &a, h.abs(), &on, d);
    }
    vol
}

/// Volume of the pyramid of height `h` (measured by the functional `a`)
/// over the facet spanned by `points[on]`.
fn pyramid_volume(points: &[Vec<i64>], a: &[Q], h: Q, on: &[usize], d: usize) -> Q {
    let i = (0..d).find(|&i| !a[i].is_zero()).expect("nonzero normal");
    let proj: Vec<Vec<i64>> = on
        .iter()
        .map(|&j| {
            let mut p = points[j].clone();
            p.remove(i);
            p
        })
        .collect();
    h * hull_volume(&proj, d - 1) / (Q::from_integer(d as i128) * a[i].abs())
}

/// Volume of `{x ∈ ℝ^k_+ : x ∉ Γ₊}` for a convenient support in `ℝ^k`.
fn under_volume(points: &[Vec<i64>], k: usize) -> Q {
    if k == 0 {
        return Q::one();
    }
    let mut origin_side = Q::zero();
    for (a, c, on) in facets(points, k) {
        if a.iter().any(|x| !x.is_positive()) {
            continue;
        }
        origin_side += pyramid_volume(points, &a, c, &on, k);
    }
    origin_side
}

/// The Newton number `Σ_I (−1)^{n−|I|} |I|! V_I`.
pub fn kouchnirenko_mu(np: &NewtonPolyhedron) -> u64 {
    let n = np.n();
    let pts: Vec<Vec<i64>> = np.support().points().map(|p| p.to_vec()).collect();
    let mut mu = Q::zero();
    for mask in 0u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let k = idx.len();
        let restricted: Vec<Vec<i64>> = pts
            .iter()
            .filter(|p| (0..n).all(|i| idx.contains(&i) || p[i] == 0))
            .map(|p| idx.iter().map(|&i| p[i]).collect())
            .collect();
        let fact: i128 = (1..=k as i128).product();
        let v = under_volume(&restricted, k) * Q::from_integer(fact);
        if (n - k) % 2 == 0 {
            mu += v;
        } else {
            mu -= v;
        }
    }
    assert!(mu.is_integer() && !mu.is_negative(), "Newton number {mu} is not a natural number");
    mu.to_integer() as u64
}

/// Eigenvalues `Σ k_i/a_i` of `x₁^{a₁} + … + x_n^{a_n}`, all in blocks of size 1.
pub fn brieskorn_pham_spectrum(exponents: &[u64]) -> (BTreeMap<RootOfUnity, u64>, JordanSpectrum) {
    let n = exponents.len();
    assert!(n >= 2 && exponents.iter().all(|&a| a >= 2));
    let mut eig: BTreeMap<RootOfUnity, u64> = BTreeMap::new();
    let mut ks = vec![1u64; n];
    loop {
        let mut s = RootOfUnity::ONE;
        for (k, a) in ks.iter().zip(exponents) {
            s = s.mul(RootOfUnity::new(*k as i64, *a));
        }
        *eig.entry(s).or_insert(0) += 1;
        let mut i = 0;
        loop {
            if i == n {
                let spec = JordanSpectrum {
                    n,
                    blocks: eig.iter().map(|(&l, &c)| (l, BTreeMap::from([(1, c)]))).collect(),
                    multiplicities: eig.clone(),
                    mu: exponents.iter().map(|a| a - 1).product(),
                };
                return (eig, spec);
            }
            if ks[i] + 1 < exponents[i] {
                ks[i] += 1;
                break;
            }
            ks[i] = 1;
            i += 1;
        }
    }
}

/// Exponents `a_i` if the support is exactly `{a_i e_i}`.
pub fn brieskorn_pham_exponents(np: &NewtonPolyhedron) -> Option<Vec<u64>> {
    let n = np.n();
    if np.support().len() != n {
        return None;
    }
    let mut a = vec![0u64; n];
    for p in np.support().points() {
        let nz: Vec<usize> = (0..n).filter(|&i| p[i] != 0).collect();
        if nz.len() != 1 {
            return None;
        }
        a[nz[0]] = p[nz[0]] as u64;
    }
    (a.iter().all(|&x| x >= 2)).then_some(a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    fn record(&mut self, name: &str, failure: Option<String>) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: failure.is_none(),
            detail: failure,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The first `(p, q, λ)` where `total` violates the Steenbrink–Saito
/// constraints.
pub fn steenbrink_saito_defect(total: &EquivariantHodgeTable, n: usize) -> Option<String> {
    let one = RootOfUnity::ONE;
    if total.get(0, 0, one) != 1 {
        return Some(format!("e^(0,0)_1 = {}", total.get(0, 0, one)));
    }
    for (p, q, a, v) in total.iter() {
        if total.get(q, p, a.conj()) != v {
            return Some(format!("({p},{q},{a}) = {v} but ({q},{p},{}) = {}", a.conj(), total.get(q, p, a.conj())));
        }
        if a.is_one() {
            if (p, q) == (0, 0) {
                continue;
            }
            if !(1..n).contains(&p) || !(1..n).contains(&q) {
                return Some(format!("({p},{q},{a}) = {v} outside [1,n-1]²"));
            }
            if total.get(n - q, n - p, a) != v {
                return Some(format!("({p},{q},{a}) = {v} but ({},{},{a}) = {}", n - q, n - p, total.get(n - q, n - p, a)));
            }
        } else {
            if p > n - 1 || q > n - 1 {
                return Some(format!("({p},{q},{a}) = {v} outside [0,n-1]²"));
            }
            let (pp, qq) = (n - 1 - q, n - 1 - p);
            if total.get(pp, qq, a) != v {
                return Some(format!("({p},{q},{a}) = {v} but ({pp},{qq},{a}) = {}", total.get(pp, qq, a)));
            }
        }
    }
    None
}

fn first<T: std::fmt::Display>(mut it: impl Iterator<Item = T>) -> Option<String> {
    it.next().map(|t| t.to_string())
}

/// Runs the full battery for a convenient Newton polyhedron.
pub fn validate(np: &NewtonPolyhedron, engine: &Engine) -> Result<ValidationReport> {
    let table = monodromy::motivic_milnor_table(np, engine)?;
    validate_tables(np, engine, &table)
}

/// Runs the battery against precomputed tables, so corrupted tables can be
/// checked too.
pub fn validate_tables(
    np: &NewtonPolyhedron,
    engine: &Engine,
    table: &MotivicTable,
) -> Result<ValidationReport> {
    let n = np.n();
    let one = RootOfUnity::ONE;
    let mut report = ValidationReport::default();

    let mut face_tables: Vec<(usize, &str, &EquivariantHodgeTable, i64)> = Vec::new();
    for c in &table.contributions {
        let chart = np.face_chart(c.face);
        let f = np.face(c.face);
        face_tables.push((c.face, "Δ", &c.pyramid, sign(f.dim) * chart.pyramid.normalized_volume() as i64));
        if let Some(t) = &c.face_table {
            let vol = chart.face_lattice.polytope.normalized_volume() as i64;
            face_tables.push((c.face, "γ", t, sign(f.dim - 1) * vol));
        }
    }
    report.record(
        "bkk-total",
        first(face_tables.iter().filter(|(_, _, t, v)| t.total() != *v).map(|(f, w, t, v)| {
            format!("face {f} ({w}): total {} expected {v}", t.total())
        })),
    );
    report.record(
        "conjugation-symmetry",
        first(face_tables.iter().filter_map(|(f, w, t, _)| {
            t.conjugation_defect().map(|(p, q, a)| format!("face {f} ({w}) at ({p},{q},{a})"))
        })),
    );

    let mut pyramid_fail = None;
    for f in np.faces() {
        let c = engine.pyramid_identity(np, f.id)?;
        if let Some((p, q, e, g)) = c.offending {
            pyramid_fail = Some(format!("face {} at ({p},{q}): expected {e}, found {g}", f.id));
            break;
        }
    }
    report.record("pyramid-identity", pyramid_fail);

    let mut global = EquivariantHodgeTable::new(n);
    for c in &table.contributions {
        let m = np.face(c.face).m;
        let mut sum = (*c.pyramid).clone();
        if let Some(t) = &c.face_table {
            sum.add_table(t, 1);
        }
        for (p, q, a, v) in sum.twist(m + 1).iter() {
            if a.is_one() {
                global.add(p, q, a, v);
            }
        }
    }
    let expected = EquivariantHodgeTable::from_entries(n, &[(0, 0, one, 1), (n, n, one, -1)]);
    report.record(
        "global-identity",
        (global != expected).then(|| format!("eigenvalue-1 sum is {:?}", global.entries())),
    );

    let mut shift_fail = None;
    for f in np.faces() {
        let chart = np.face_chart(f.id);
        let big: std::sync::Arc<PhiTable> = engine.phi(&chart.pyramid_equivariant())?;
        let small = engine.phi(&chart.face_equivariant())?;
        let ok = (0..=f.dim + 1).all(|j| big.phi(one, j + 1) == small.phi(one, j)) && big.phi(one, 0) == 0;
        if !ok {
            shift_fail = Some(format!(
                "face {}: P_1(Δ) = {:?}, P_1(γ) = {:?}",
                f.id,
                big.polynomial(one),
                small.polynomial(one)
            ));
            break;
        }
    }
    report.record("ehrhart-shift", shift_fail);

    report.record("steenbrink-saito", steenbrink_saito_defect(&table.total, n));
    report.record(
        "second-sum-unipotent",
        first(table.second_sum.iter().filter(|e| !e.2.is_one()).map(|(p, q, a, v)| format!("({p},{q},{a}) = {v}"))),
    );

    let routes = (1..=n)
        .map(|k| (k, monodromy::unipotent_at_least_total(table, k), monodromy::unipotent_at_least_first(table, k)))
        .find(|(_, a, b)| a != b)
        .map(|(k, a, b)| format!("sizes ≥ {k}: {a} vs {b}"));
    report.record("eigenvalue-1-routes", routes);

    let mut pp_fail = None;
    'faces: for c in &table.contributions {
        let ep = np.face_chart(c.face).pyramid_equivariant();
        if ep.polytope.primeness() == Primeness::Neither {
            continue;
        }
        for a in c.pyramid.roots().into_iter().filter(|a| !a.is_one()) {
            for (r, v) in engine.pseudo_prime_row_sums(&ep, a)? {
                if v != c.pyramid.antidiagonal(r, a) {
                    pp_fail = Some(format!(
                        "face {} at r={r}, α={a}: formula {v}, table {}",
                        c.face,
                        c.pyramid.antidiagonal(r, a)
                    ));
                    break 'faces;
                }
            }
        }
    }
    report.record("pseudo-prime-row-sums", pp_fail);

    let spectrum = monodromy::spectrum_from_table(table);
    report.record("block-counts", spectrum.as_ref().err().map(|e| e.to_string()));
    let Ok(spectrum) = spectrum else {
        return Ok(report);
    };

    let lambdas: Vec<RootOfUnity> = table.first_sum.roots().into_iter().filter(|a| !a.is_one()).collect();
    let mut fast_fail = None;
    for &l in &lambdas {
        let (top, next) = monodromy::fastpath_top(np, l)?;
        if top != spectrum.count(l, n) || next != spectrum.count(l, n - 1) {
            fast_fail = Some(format!(
                "λ={l}: fast path ({top},{next}), general ({},{})",
                spectrum.count(l, n),
                spectrum.count(l, n - 1)
            ));
            break;
        }
    }
    report.record("fastpath-top", fast_fail);

    let (pi, two) = monodromy::fastpath_unipotent(np);
    let general = (spectrum.count(one, n - 1), if n >= 3 { spectrum.count(one, n - 2) } else { 0 });
    report.record(
        "fastpath-unipotent",
        ((pi, two) != general).then(|| format!("fast path ({pi},{two}), general {general:?}")),
    );

    if monodromy::prime_gate(np).is_ok() {
        let mut prime_fail = None;
        'l: for &l in &lambdas {
            for k in 1..=n {
                let v = monodromy::prime_face_blocks(np, l, k, engine)?;
                if v != spectrum.at_least(l, k) as i64 {
                    prime_fail = Some(format!("λ={l}, k={k}: formula {v}, general {}", spectrum.at_least(l, k)));
                    break 'l;
                }
            }
        }
        report.record("prime-face-blocks", prime_fail);
    }

    let mu = kouchnirenko_mu(np);
    report.record("kouchnirenko", (mu != spectrum.mu).then(|| format!("oracle {mu}, engine {}", spectrum.mu)));

    if let Some(a) = brieskorn_pham_exponents(np) {
        let (_, oracle) = brieskorn_pham_spectrum(&a);
        report.record(
            "brieskorn-pham",
            (oracle != spectrum).then(|| format!("oracle {:?}, engine {:?}", oracle.blocks, spectrum.blocks)),
        );
    }
    if np.faces().iter().any(|f| f.dim == n - 1 && np.support().points().all(|p| f.vertices.iter().any(|v| v == p) || on_face(np, f.id, p))) {
        report.record(
            "quasi-homogeneous-semisimple",
            (!spectrum.is_semisimple()).then(|| format!("blocks {:?}", spectrum.blocks)),
        );
    }
    Ok(report)
}

/// Whether `p` lies on the affine hyperplane of an `(n−1)`-face.
fn on_face(np: &NewtonPolyhedron, face: usize, p: &[i64]) -> bool {
    let chart = np.face_chart(face);
    match crate::intmat::coordinates(&chart.lattice_basis, p) {
        Some(y) => chart.height(&y) == 0,
        None => false,
    }
}
