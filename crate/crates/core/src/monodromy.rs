//! Hodge table of the motivic Milnor fiber and the Jordan normal form of
//! the monodromy, plus the closed formulas for special block sizes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hodge::{binomial, Engine, EquivariantHodgeTable};
use crate::newton::NewtonPolyhedron;
use crate::polytope::{Primeness, Region};
use crate::root::RootOfUnity;

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Hodge tables attached to one compact face γ.
#[derive(Clone, Debug)]
pub struct FaceContribution {
    pub face: usize,
    /// `e(Z*_{Δ_γ})` with the height character.
    pub pyramid: Arc<EquivariantHodgeTable>,
    /// `e(Z*_γ)` with the trivial character, for `dim γ ≥ 1`.
    pub face_table: Option<Arc<EquivariantHodgeTable>>,
}

#[derive(Clone, Debug)]
pub struct MotivicTable {
    pub n: usize,
    pub contributions: Vec<FaceContribution>,
    /// `Σ_γ (1−L)^{m_γ} e(Z*_{Δ_γ})`.
    pub first_sum: EquivariantHodgeTable,
    /// `Σ_{dim γ ≥ 1} (1−L)^{m_γ+1} e(Z*_γ)`.
    pub second_sum: EquivariantHodgeTable,
    pub total: EquivariantHodgeTable,
}

pub fn motivic_milnor_table(np: &NewtonPolyhedron, engine: &Engine) -> Result<MotivicTable> {
    let n = np.n();
    let contributions: Vec<FaceContribution> = np
        .faces()
        .par_iter()
        .map(|f| {
            let chart = np.face_chart(f.id);
            let pyramid = engine.hodge_table(&chart.pyramid_equivariant())?;
            let face_table = if f.dim >= 1 {
                Some(engine.hodge_table(&chart.face_equivariant())?)
            } else {
                None
            };
            Ok(FaceContribution {
                face: f.id,
                pyramid,
                face_table,
            })
        })
        .collect::<Result<_>>()?;
    let mut first_sum = EquivariantHodgeTable::new(n);
    let mut second_sum = EquivariantHodgeTable::new(n);
    for c in &contributions {
        let m = np.face(c.face).m;
        first_sum.add_table(&c.pyramid.twist(m), 1);
        if let Some(t) = &c.face_table {
            second_sum.add_table(&t.twist(m + 1), 1);
        }
    }
    let mut total = first_sum.clone();
    total.add_table(&second_sum, 1);
    Ok(MotivicTable {
        n,
        contributions,
        first_sum,
        second_sum,
        total,
    })
}

/// Jordan blocks of the monodromy on `H^{n−1}` of the Milnor fiber.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct JordanSpectrum {
    pub n: usize,
    /// Eigenvalue ↦ block size ↦ number of blocks (zero counts omitted).
    pub blocks: BTreeMap<RootOfUnity, BTreeMap<usize, u64>>,
    pub multiplicities: BTreeMap<RootOfUnity, u64>,
    pub mu: u64,
}

impl JordanSpectrum {
    pub fn count(&self, lambda: RootOfUnity, size: usize) -> u64 {
        self.blocks
            .get(&lambda)
            .and_then(|b| b.get(&size))
            .copied()
            .unwrap_or(0)
    }

    /// Number of blocks of size at least `k`.
    pub fn at_least(&self, lambda: RootOfUnity, k: usize) -> u64 {
        self.blocks
            .get(&lambda)
            .map_or(0, |b| b.range(k..).map(|(_, &c)| c).sum())
    }

    pub fn multiplicity(&self, lambda: RootOfUnity) -> u64 {
        self.multiplicities.get(&lambda).copied().unwrap_or(0)
    }

    /// Whether every block has size 1.
    pub fn is_semisimple(&self) -> bool {
        self.blocks.values().all(|b| b.keys().all(|&k| k == 1))
    }
}

/// `N_{≥k}(λ)` for `λ ≠ 1` from the first sum.
pub fn blocks_at_least(t: &MotivicTable, lambda: RootOfUnity, k: usize) -> i64 {
    let n = t.n;
    sign(n - 1) * (t.first_sum.antidiagonal(n - 2 + k, lambda) + t.first_sum.antidiagonal(n - 1 + k, lambda))
}

/// `N_{≥k}(1)` from the total table.
pub fn unipotent_at_least_total(t: &MotivicTable, k: usize) -> i64 {
    let n = t.n;
    let one = RootOfUnity::ONE;
    sign(n - 1) * (t.total.antidiagonal(n - 1 + k, one) + t.total.antidiagonal(n + k, one))
}

/// `N_{≥k}(1)` from the first sum alone.
pub fn unipotent_at_least_first(t: &MotivicTable, k: usize) -> i64 {
    let n = t.n as i64;
    let one = RootOfUnity::ONE;
    let line = |r: i64| {
        if r < 0 {
            0
        } else {
            t.first_sum.antidiagonal(r as usize, one)
        }
    };
    sign(t.n - 1) * (line(n - 2 - k as i64) + line(n - 1 - k as i64))
}

/// Reads off the Jordan spectrum, checking every count it derives.
pub fn spectrum_from_table(t: &MotivicTable) -> Result<JordanSpectrum> {
    let n = t.n;
    let one = RootOfUnity::ONE;
    let mut roots: BTreeSet<RootOfUnity> = t.first_sum.roots();
    roots.extend(t.total.roots());
    roots.insert(one);
    let mut out = JordanSpectrum {
        n,
        ..Default::default()
    };
    for &lambda in &roots {
        let kmax = if lambda.is_one() { n - 1 } else { n };
        let mut at_least = Vec::with_capacity(kmax + 2);
        for k in 1..=kmax + 1 {
            let v = if lambda.is_one() {
                let a = unipotent_at_least_total(t, k);
                let b = unipotent_at_least_first(t, k);
                if a != b {
                    return Err(Error::Internal(format!(
                        "eigenvalue 1, sizes ≥ {k}: total route gives {a}, first-sum route gives {b}"
                    )));
                }
                a
            } else {
                blocks_at_least(t, lambda, k)
            };
            at_least.push(v);
        }
        if at_least[kmax] != 0 {
            return Err(Error::Internal(format!(
                "{} blocks of size > {kmax} for eigenvalue {lambda}",
                at_least[kmax]
            )));
        }
        let mut mult = sign(n - 1) * t.total.total_for(lambda);
        if lambda.is_one() {
            mult -= sign(n - 1);
        }
        let mut sizes = BTreeMap::new();
        for k in 1..=kmax {
            let c = at_least[k - 1] - at_least[k];
            if c < 0 {
                return Err(Error::Internal(format!(
                    "negative block count {c} for eigenvalue {lambda}, size {k}"
                )));
            }
            if c > 0 {
                sizes.insert(k, c as u64);
            }
        }
        let weighted: i64 = at_least.iter().sum();
        if weighted != mult || mult < 0 {
            return Err(Error::Internal(format!(
                "eigenvalue {lambda}: block sizes sum to {weighted}, multiplicity is {mult}"
            )));
        }
        if mult > 0 {
            out.multiplicities.insert(lambda, mult as u64);
            out.blocks.insert(lambda, sizes);
            out.mu += mult as u64;
        }
    }
    Ok(out)
}

pub fn jordan_blocks(np: &NewtonPolyhedron, engine: &Engine) -> Result<JordanSpectrum> {
    spectrum_from_table(&motivic_milnor_table(np, engine)?)
}

/// Blocks of the maximal size `n` and of size `n−1` for `λ ≠ 1`.
pub fn fastpath_top(np: &NewtonPolyhedron, lambda: RootOfUnity) -> Result<(u64, u64)> {
    if lambda.is_one() {
        return Err(Error::BadEigenvalue(lambda));
    }
    let order = lambda.order();
    let mut top = 0;
    let mut next = 0;
    for f in np.faces().iter().filter(|f| f.interior_touching) {
        match f.dim {
            0 if f.d % order == 0 => top += 1,
            1 if f.d % order == 0 => {
                let e = f.d as i64;
                let k = (lambda.num() * (f.d / order)) as i64;
                let chart = np.face_chart(f.id);
                for v in chart.pyramid.lattice_points(1, Region::Relint) {
                    let h = chart.pyramid_height(&v);
                    next += (h == k) as u64 + (h == e - k) as u64;
                }
            }
            _ => {}
        }
    }
    Ok((top, next))
}

/// Blocks for eigenvalue 1 of size `n−1` (`Π_f`) and of size `n−2`
/// (`2 Σ l*(γ)` over interior 2-faces).
pub fn fastpath_unipotent(np: &NewtonPolyhedron) -> (u64, u64) {
    let pi = np.interior_skeleton_points().len() as u64;
    let interior: u64 = np
        .faces()
        .iter()
        .filter(|f| f.dim == 2 && f.interior_touching)
        .map(|f| {
            np.face_chart(f.id)
                .face_lattice
                .polytope
                .lattice_points(1, Region::Relint)
                .len() as u64
        })
        .sum();
    (pi, 2 * interior)
}

/// Whether every compact face is prime in its own lattice; the first
/// failing face otherwise.
pub fn prime_gate(np: &NewtonPolyhedron) -> Result<()> {
    for f in np.faces() {
        if np.face_chart(f.id).face_lattice.polytope.primeness() != Primeness::Prime {
            return Err(Error::NotPrime { face: f.id });
        }
    }
    Ok(())
}

/// Blocks of size `≥ k` for `λ ≠ 1` by the closed formula for Newton
/// polyhedra whose compact faces are all prime.
pub fn prime_face_blocks(
    np: &NewtonPolyhedron,
    lambda: RootOfUnity,
    k: usize,
    engine: &Engine,
) -> Result<i64> {
    if lambda.is_one() {
        return Err(Error::BadEigenvalue(lambda));
    }
    if k == 0 {
        return Err(Error::Precondition("block size must be at least 1".into()));
    }
    prime_gate(np)?;
    let n = np.n();
    let mut total = 0i64;
    for f in np.faces() {
        let chart = np.face_chart(f.id);
        let e = engine.pseudo_prime_row_sums(&chart.pyramid_equivariant(), lambda)?;
        for kk in [k, k + 1] {
            for r in 0..=f.dim {
                if (n + kk - 2 + r) % 2 != 0 || n + kk - 2 < r {
                    continue;
                }
                let d = (n + kk - 2 - r) / 2;
                total += sign(d) * binomial(f.m, d) * e.get(&r).copied().unwrap_or(0);
            }
        }
    }
    Ok(sign(n - 1) * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn np(s: &str) -> NewtonPolyhedron {
        NewtonPolyhedron::new(parse_polynomial(s, None).unwrap()).unwrap()
    }

    fn r(s: &str) -> RootOfUnity {
        s.parse().unwrap()
    }

    fn table(dim: usize, e: &[(usize, usize, &str, i64)]) -> EquivariantHodgeTable {
        let v: Vec<_> = e.iter().map(|&(p, q, a, v)| (p, q, r(a), v)).collect();
        EquivariantHodgeTable::from_entries(dim, &v)
    }

    #[test]
    fn cusp_total_and_spectrum() {
        let e = Engine::new();
        let p = np("x^2 + y^3");
        let t = motivic_milnor_table(&p, &e).unwrap();
        assert_eq!(t.total, table(2, &[(0, 0, "0/1", 1), (1, 0, "5/6", -1), (0, 1, "1/6", -1)]));
        let s = spectrum_from_table(&t).unwrap();
        assert_eq!(s.mu, 2);
        assert_eq!(s.count(r("1/6"), 1), 1);
        assert_eq!(s.count(r("5/6"), 1), 1);
        assert_eq!(s.multiplicity(RootOfUnity::ONE), 0);
        assert_eq!(s.blocks.len(), 2);
    }

    #[test]
    fn node() {
        let e = Engine::new();
        let t = motivic_milnor_table(&np("x^2 + y^2"), &e).unwrap();
        assert_eq!(t.total, table(2, &[(0, 0, "0/1", 1), (1, 1, "0/1", -1)]));
        let s = spectrum_from_table(&t).unwrap();
        assert_eq!(s.mu, 1);
        assert_eq!(s.count(RootOfUnity::ONE, 1), 1);
    }

    #[test]
    fn x5_x2y2_y5() {
        let e = Engine::new();
        let p = np("x^5 + x^2*y^2 + y^5");
        let s = jordan_blocks(&p, &e).unwrap();
        assert_eq!(s.mu, 11);
        assert_eq!(s.count(r("1/2"), 2), 1);
        assert_eq!(s.count(RootOfUnity::ONE, 1), 1);
        assert_eq!(fastpath_top(&p, r("1/2")).unwrap(), (1, 0));
        assert_eq!(fastpath_unipotent(&p), (1, 0));
    }

    #[test]
    fn fast_paths_on_small_examples() {
        let cusp = np("x^2 + y^3");
        assert_eq!(fastpath_top(&cusp, r("1/6")).unwrap(), (0, 1));
        assert_eq!(fastpath_top(&cusp, r("1/4")).unwrap(), (0, 0));
        assert!(fastpath_top(&cusp, RootOfUnity::ONE).is_err());
        assert_eq!(fastpath_unipotent(&np("x^3 + y^3")), (2, 0));
        assert_eq!(fastpath_unipotent(&cusp), (0, 0));
        assert_eq!(fastpath_unipotent(&np("x^4 + y^4 + z^4 + x^2*y^2*z^2")), (0, 6));
    }

    #[test]
    fn prime_formula_on_the_cusp() {
        let e = Engine::new();
        let cusp = np("x^2 + y^3");
        assert_eq!(prime_face_blocks(&cusp, r("1/6"), 1, &e).unwrap(), 1);
        assert_eq!(prime_face_blocks(&cusp, r("1/6"), 2, &e).unwrap(), 0);
    }

    #[test]
    fn gate_reports_a_non_simple_face() {
        let p = np("x^2 + y^3 + z^3 + w^2 + y*w + x*y");
        let Err(Error::NotPrime { face }) = prime_gate(&p) else {
            panic!("gate passed");
        };
        let poly = p.face_chart(face).face_lattice.polytope;
        assert_eq!(p.face(face).dim, 3);
        assert_ne!(poly.primeness(), crate::polytope::Primeness::Prime);
        let err = prime_face_blocks(&p, r("1/2"), 1, &Engine::new());
        assert_eq!(err, Err(Error::NotPrime { face }));
    }
}
