//! Equivariant Hodge–Deligne numbers `e^{p,q}(Z*_Δ)_α` of non-degenerate
//! hypersurfaces in tori, computed from the polytope and its character.
//!
//! Entries with `p+q > m−1` and the row sums are closed formulas. The entries
//! below the middle line come from the compactification `Z̄` in the toric
//! variety of a simplicial refinement of the normal fan: its strata are
//! hypersurfaces of faces times tori, and `Z̄` satisfies Poincaré duality.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::ehrhart::PhiTable;
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::newton::NewtonPolyhedron;
use crate::polytope::{EquivariantPolytope, PolytopeKey, Primeness, Region};
use crate::root::RootOfUnity;

pub(crate) fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sparse table `(p, q, α) ↦ e^{p,q}_α`; absent entries are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquivariantHodgeTable {
    dim: usize,
    entries: BTreeMap<(usize, usize, RootOfUnity), i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeEntry {
    pub p: usize,
    pub q: usize,
    pub alpha: RootOfUnity,
    pub value: i64,
}

impl EquivariantHodgeTable {
    pub fn new(dim: usize) -> Self {
        EquivariantHodgeTable {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(dim: usize, entries: &[(usize, usize, RootOfUnity, i64)]) -> Self {
        let mut t = EquivariantHodgeTable::new(dim);
        for &(p, q, a, v) in entries {
            t.add(p, q, a, v);
        }
        t
    }

    /// Dimension of the ambient torus.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, p: usize, q: usize, alpha: RootOfUnity) -> i64 {
        self.entries.get(&(p, q, alpha)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, p: usize, q: usize, alpha: RootOfUnity, v: i64) {
        if v == 0 {
            return;
        }
        let e = self.entries.entry((p, q, alpha)).or_insert(0);
        *e += v;
        if *e == 0 {
            self.entries.remove(&(p, q, alpha));
        }
    }

    pub fn set(&mut self, p: usize, q: usize, alpha: RootOfUnity, v: i64) {
        if v == 0 {
            self.entries.remove(&(p, q, alpha));
        } else {
            self.entries.insert((p, q, alpha), v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, RootOfUnity, i64)> + '_ {
        self.entries.iter().map(|(&(p, q, a), &v)| (p, q, a, v))
    }

    pub fn entries(&self) -> Vec<HodgeEntry> {
        self.iter()
            .map(|(p, q, alpha, value)| HodgeEntry { p, q, alpha, value })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn roots(&self) -> BTreeSet<RootOfUnity> {
        self.entries.keys().map(|k| k.2).collect()
    }

    pub fn total(&self) -> i64 {
        self.entries.values().sum()
    }

    pub fn total_for(&self, alpha: RootOfUnity) -> i64 {
        self.iter().filter(|e| e.2 == alpha).map(|e| e.3).sum()
    }

    /// `Σ_{p+q=r} e^{p,q}_α`.
    pub fn antidiagonal(&self, r: usize, alpha: RootOfUnity) -> i64 {
        self.iter()
            .filter(|&(p, q, a, _)| p + q == r && a == alpha)
            .map(|e| e.3)
            .sum()
    }

    /// `Σ_q e^{p,q}_α`.
    pub fn row(&self, p: usize, alpha: RootOfUnity) -> i64 {
        self.iter()
            .filter(|&(pp, _, a, _)| pp == p && a == alpha)
            .map(|e| e.3)
            .sum()
    }

    pub fn add_table(&mut self, other: &EquivariantHodgeTable, scale: i64) {
        for (p, q, a, v) in other.iter() {
            self.add(p, q, a, scale * v);
        }
    }

    /// Multiplication by `(1 − L)^m`, `L` of type `(1,1)` with trivial action.
    pub fn twist(&self, m: usize) -> EquivariantHodgeTable {
        let mut out = EquivariantHodgeTable::new(self.dim + m);
        for (p, q, a, v) in self.iter() {
            for i in 0..=m {
                out.add(p + i, q + i, a, sign(i) * binomial(m, i) * v);
            }
        }
        out
    }

    /// Product with a torus `(ℂ*)^j`, i.e. multiplication by `(L − 1)^j`.
    pub fn torus_product(&self, j: usize) -> EquivariantHodgeTable {
        let mut out = EquivariantHodgeTable::new(self.dim + j);
        for (p, q, a, v) in self.iter() {
            for i in 0..=j {
                out.add(p + i, q + i, a, sign(j - i) * binomial(j, i) * v);
            }
        }
        out
    }

    /// `(p, q, α) ↦ (q, p, −α)`.
    pub fn conjugate(&self) -> EquivariantHodgeTable {
        let mut out = EquivariantHodgeTable::new(self.dim);
        for (p, q, a, v) in self.iter() {
            out.set(q, p, a.conj(), v);
        }
        out
    }

    /// First entry violating `e^{p,q}_α = e^{q,p}_{−α}`.
    pub fn conjugation_defect(&self) -> Option<(usize, usize, RootOfUnity)> {
        self.iter()
            .chain(self.conjugate().iter())
            .find(|&(p, q, a, _)| self.get(p, q, a) != self.get(q, p, a.conj()))
            .map(|(p, q, a, _)| (p, q, a))
    }
}

pub fn lefschetz_twist(table: &EquivariantHodgeTable, m: usize) -> EquivariantHodgeTable {
    table.twist(m)
}

/// The closed-formula part of a Hodge table.
#[derive(Clone, Debug)]
pub struct BoundaryValues {
    pub dim: usize,
    /// All entries with `p+q > m−1`.
    pub high: EquivariantHodgeTable,
    /// `e^{p,0}` and `e^{0,p}` for `p > 0`.
    pub edges: EquivariantHodgeTable,
    /// `e^{0,0}`.
    pub corner: EquivariantHodgeTable,
    /// Row-sum targets `Σ_q e^{p,q}_α`, keyed by `(p, α)`.
    pub row_sums: BTreeMap<(usize, RootOfUnity), i64>,
}

impl BoundaryValues {
    /// Every entry the closed formulas determine.
    pub fn known(&self) -> EquivariantHodgeTable {
        let mut t = self.high.clone();
        for part in [&self.edges, &self.corner] {
            for (p, q, a, v) in part.iter() {
                t.set(p, q, a, v);
            }
        }
        t
    }
}

/// Memoizing evaluator for φ-tables and Hodge tables, keyed by normalized
/// vertices and character. Safe to share across threads.
#[derive(Default)]
pub struct Engine {
    phi: Mutex<HashMap<PolytopeKey, Arc<PhiTable>>>,
    hodge: Mutex<HashMap<PolytopeKey, Arc<EquivariantHodgeTable>>>,
}

impl Engine {
    pub fn new() -> Self {
        Engine::default()
    }

    pub fn phi(&self, ep: &EquivariantPolytope) -> Result<Arc<PhiTable>> {
        let key = ep.key();
        if let Some(t) = self.phi.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(PhiTable::compute(ep)?);
        self.phi.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }

    pub fn hodge_table(&self, ep: &EquivariantPolytope) -> Result<Arc<EquivariantHodgeTable>> {
        let key = ep.key();
        if let Some(t) = self.hodge.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.compute_hodge(ep)?);
        self.hodge.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }

    /// Number of memoized φ-tables and Hodge tables.
    pub fn cache_sizes(&self) -> (usize, usize) {
        (self.phi.lock().unwrap().len(), self.hodge.lock().unwrap().len())
    }

    pub fn boundary_values(&self, ep: &EquivariantPolytope) -> Result<BoundaryValues> {
        let m = ep.dim();
        if m == 0 {
            return Err(Error::Precondition(
                "boundary values need a polytope of positive dimension".into(),
            ));
        }
        let poly = &ep.polytope;
        let one = RootOfUnity::ONE;

        let mut high = EquivariantHodgeTable::new(m);
        for p in 0..m {
            if 2 * p > m - 1 {
                high.set(p, p, one, sign(m + p + 1) * binomial(m, p + 1));
            }
        }

        let mut edges = EquivariantHodgeTable::new(m);
        for p in 1..m {
            for f in poly.faces_of_dim(p + 1) {
                for (a, c) in ep.face(f).count_points(1, Region::Relint) {
                    let v = sign(m - 1) * c as i64;
                    edges.add(p, 0, a, v);
                    edges.add(0, p, a.conj(), v);
                }
            }
        }

        let mut corner = EquivariantHodgeTable::new(m);
        let skeleton = ep.count_points(1, Region::OneSkeleton);
        for (&a, &c) in &skeleton {
            let c = c as i64;
            if a.is_one() {
                corner.add(0, 0, one, sign(m - 1) * (c - 1));
            } else {
                corner.add(0, 0, a.conj(), sign(m - 1) * c);
            }
        }

        let phi = self.phi(ep)?;
        let mut row_sums = BTreeMap::new();
        let mut roots: BTreeSet<RootOfUnity> = phi.roots().collect();
        roots.insert(one);
        for p in 0..m {
            for &a in &roots {
                let mut v = sign(m + 1) * phi.phi(a, m - p);
                if a.is_one() {
                    v += sign(p + m + 1) * binomial(m, p + 1);
                }
                if v != 0 {
                    row_sums.insert((p, a), v);
                }
            }
        }
        Ok(BoundaryValues {
            dim: m,
            high,
            edges,
            corner,
            row_sums,
        })
    }

    /// Strata of `Z̄ ∖ Z*`: `Σ_{σ≠0} e(Z*_{F(σ)}) · (L−1)^{m − dim σ − dim F(σ)}`.
    fn strata(&self, ep: &EquivariantPolytope) -> Result<EquivariantHodgeTable> {
        let m = ep.dim();
        let poly = &ep.polytope;
        let fan = Fan::normal_fan(poly).simplicial_refinement();
        let mut groups: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for cone in fan.cones().iter().filter(|c| !c.is_empty()) {
            let f = fan.back_reference(cone, poly);
            let fdim = poly.face(f).dim;
            if fdim == 0 {
                continue;
            }
            let j = m - fan.cone_dim(cone) - fdim;
            *groups.entry((f, j)).or_insert(0) += 1;
        }
        let mut out = EquivariantHodgeTable::new(m);
        for ((f, j), mult) in groups {
            let table = self.hodge_table(&ep.face(f))?;
            out.add_table(&table.torus_product(j), mult);
        }
        Ok(out)
    }

    fn compute_hodge(&self, ep: &EquivariantPolytope) -> Result<EquivariantHodgeTable> {
        let m = ep.dim();
        if m == 0 {
            // A monomial has no zeros in the torus.
            return Ok(EquivariantHodgeTable::new(0));
        }
        let bv = self.boundary_values(ep)?;
        let mut table = bv.high.clone();

        if m >= 2 {
            let strata = self.strata(ep)?;
            let mut closure_high = bv.high.clone();
            for (p, q, a, v) in strata.iter() {
                if p + q > m - 1 {
                    closure_high.add(p, q, a, v);
                }
            }
            for (p, q, a, v) in closure_high.iter() {
                if p > m - 1 || q > m - 1 {
                    return Err(Error::Internal(format!(
                        "closure entry ({p},{q},{a}) = {v} outside the Hodge diamond"
                    )));
                }
                let (lp, lq) = (m - 1 - p, m - 1 - q);
                table.add(lp, lq, a.conj(), v);
            }
            for (p, q, a, v) in strata.iter() {
                if p + q < m - 1 {
                    table.add(p, q, a, -v);
                }
            }
        }

        // Middle line from the row sums.
        let mut roots: BTreeSet<RootOfUnity> = bv.row_sums.keys().map(|k| k.1).collect();
        roots.extend(table.roots());
        for p in 0..m {
            let q = m - 1 - p;
            for &a in &roots {
                let target = bv.row_sums.get(&(p, a)).copied().unwrap_or(0);
                let rest = table.row(p, a) - table.get(p, q, a);
                table.set(p, q, a, target - rest);
            }
        }

        self.post_check(ep, &bv, &table)?;
        Ok(table)
    }

    fn post_check(
        &self,
        ep: &EquivariantPolytope,
        bv: &BoundaryValues,
        table: &EquivariantHodgeTable,
    ) -> Result<()> {
        let m = ep.dim();
        let fail = |what: String| -> Result<()> {
            Err(Error::Internal(format!(
                "Hodge table of polytope {:?} with character {:?}: {what}",
                ep.polytope.vertices(),
                ep.character
            )))
        };
        if let Some((p, q, a)) = table.conjugation_defect() {
            return fail(format!("conjugation symmetry fails at ({p},{q},{a})"));
        }
        let known = bv.known();
        let mut keys: BTreeSet<(usize, usize, RootOfUnity)> =
            known.iter().map(|(p, q, a, _)| (p, q, a)).collect();
        // boundary tables are exhaustive on their own ranges
        for (p, q, a, _) in table.iter() {
            if p + q > m - 1 || p == 0 || q == 0 {
                keys.insert((p, q, a));
            }
        }
        for (p, q, a) in keys {
            if table.get(p, q, a) != known.get(p, q, a) {
                return fail(format!(
                    "entry ({p},{q},{a}) is {} but the boundary formula gives {}",
                    table.get(p, q, a),
                    known.get(p, q, a)
                ));
            }
        }
        let vol = ep.polytope.normalized_volume() as i64;
        if table.total() != sign(m - 1) * vol {
            return fail(format!(
                "total {} differs from (−1)^(m−1)·vol = {}",
                table.total(),
                sign(m - 1) * vol
            ));
        }
        Ok(())
    }

    /// Anti-diagonal sums `Σ_{p+q=r} e^{p,q}_α` of a pseudo-prime polytope by
    /// the closed formula in φ̃.
    pub fn pseudo_prime_row_sums(
        &self,
        ep: &EquivariantPolytope,
        alpha: RootOfUnity,
    ) -> Result<BTreeMap<usize, i64>> {
        if alpha.is_one() {
            return Err(Error::BadEigenvalue(alpha));
        }
        if ep.polytope.primeness() == Primeness::Neither {
            return Err(Error::Precondition("polytope is not pseudo-prime".into()));
        }
        let m = ep.dim();
        let poly = &ep.polytope;
        let mut tilde: HashMap<usize, i64> = HashMap::new();
        let mut out = BTreeMap::new();
        for r in 0..m {
            let mut s = 0i64;
            for g in poly.faces_of_dim(r + 1) {
                for &h in poly.subfaces(g).iter().chain(std::iter::once(&g)) {
                    let t = match tilde.get(&h) {
                        Some(&t) => t,
                        None => {
                            let t = self.phi(&ep.face(h))?.phi_tilde(alpha)?;
                            tilde.insert(h, t);
                            t
                        }
                    };
                    s += sign(poly.face(h).dim) * t;
                }
            }
            out.insert(r, sign(m + r) * s);
        }
        Ok(out)
    }

    /// Checks `e(Z*_γ)₁ + e(Z*_{Δ_γ})₁ = (t₁t₂ − 1)^{dim γ}` for a compact face.
    pub fn pyramid_identity(&self, np: &NewtonPolyhedron, face: usize) -> Result<PyramidCheck> {
        let chart = np.face_chart(face);
        let dim = np.face(face).dim;
        let pyramid = self.hodge_table(&chart.pyramid_equivariant())?;
        let own = if dim == 0 {
            Arc::new(EquivariantHodgeTable::new(0))
        } else {
            self.hodge_table(&chart.face_equivariant())?
        };
        let one = RootOfUnity::ONE;
        let mut keys: BTreeSet<(usize, usize)> = (0..=dim).map(|p| (p, p)).collect();
        for t in [&pyramid, &own] {
            keys.extend(t.iter().filter(|e| e.2.is_one()).map(|e| (e.0, e.1)));
        }
        let offending = keys.into_iter().find_map(|(p, q)| {
            let expected = if p == q { sign(dim + p) * binomial(dim, p) } else { 0 };
            let got = own.get(p, q, one) + pyramid.get(p, q, one);
            (got != expected).then_some((p, q, expected, got))
        });
        Ok(PyramidCheck {
            face,
            pyramid,
            face_table: own,
            offending,
        })
    }
}

#[derive(Clone, Debug)]
pub struct PyramidCheck {
    pub face: usize,
    pub pyramid: Arc<EquivariantHodgeTable>,
    pub face_table: Arc<EquivariantHodgeTable>,
    /// `(p, q, expected, found)` of the first mismatch.
    pub offending: Option<(usize, usize, i64, i64)>,
}

impl PyramidCheck {
    pub fn passed(&self) -> bool {
        self.offending.is_none()
    }
}

/// Hodge table with a fresh engine.
pub fn hodge_table(ep: &EquivariantPolytope) -> Result<EquivariantHodgeTable> {
    Ok((*Engine::new().hodge_table(ep)?).clone())
}

pub fn boundary_values(ep: &EquivariantPolytope) -> Result<BoundaryValues> {
    Engine::new().boundary_values(ep)
}
