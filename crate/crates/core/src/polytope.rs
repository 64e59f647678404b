//! Full-dimensional lattice polytopes in their own lattice, finite-order
//! characters on that lattice, and the lattice-point machinery built on them.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_integer::Integer;

use crate::hull::{self, Bits};
use crate::intmat::{self, IVec};
use crate::root::RootOfUnity;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("polytope is not full-dimensional in its lattice: {0}")]
    NotFullDimensional(String),
    #[error("empty point set")]
    Empty,
    #[error("points have inconsistent dimensions")]
    Ragged,
    #[error("character takes the value {value} on vertex {vertex:?}; it must vanish on vertices")]
    CharacterOnVertex { vertex: IVec, value: RootOfUnity },
}

/// A homomorphism `ℤ^m → ℚ/ℤ`, `x ↦ (Σ coeffs_i·x_i)/den mod 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    den: u64,
    coeffs: Vec<i64>,
}

impl Character {
    pub fn trivial(dim: usize) -> Self {
        Character {
            den: 1,
            coeffs: vec![0; dim],
        }
    }

    pub fn new(coeffs: Vec<i64>, den: u64) -> Self {
        assert!(den > 0);
        let d = den as i64;
        let mut coeffs: Vec<i64> = coeffs.into_iter().map(|c| c.rem_euclid(d)).collect();
        let g = coeffs.iter().fold(d, |g, c| g.gcd(c)) as u64;
        let den = den / g;
        coeffs.iter_mut().for_each(|c| *c /= g as i64);
        Character { den, coeffs }
    }

    /// The character `v ↦ −ht(v)/d`, where `ht = d − ℓ` for a linear form `ℓ`;
    /// equivalently `v ↦ ℓ(v)/d`.
    pub fn from_height(linear: &[i64], distance: u64) -> Self {
        Character::new(linear.to_vec(), distance)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_trivial(&self) -> bool {
        self.den == 1
    }

    pub fn eval(&self, x: &[i64]) -> RootOfUnity {
        let d = self.den as i128;
        let s: i128 = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(&c, &v)| c as i128 * v as i128)
            .sum();
        RootOfUnity::new(s.rem_euclid(d) as i64, self.den)
    }

    pub fn neg(&self) -> Self {
        Character::new(self.coeffs.iter().map(|c| -c).collect(), self.den)
    }

    /// Pull back along `ℤ^k → ℤ^m`, `e_j ↦ basis[j]`.
    pub fn restrict(&self, basis: &[IVec]) -> Self {
        let coeffs = basis
            .iter()
            .map(|b| {
                let s: i128 = self
                    .coeffs
                    .iter()
                    .zip(b)
                    .map(|(&c, &v)| c as i128 * v as i128)
                    .sum();
                s.rem_euclid(self.den as i128) as i64
            })
            .collect();
        Character::new(coeffs, self.den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    /// Relative interior.
    Relint,
    /// The closed polytope.
    Full,
    /// Union of the closed edges (and vertices).
    OneSkeleton,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Primeness {
    Prime,
    PseudoPrime,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    /// Primitive inner normal: `normal·x ≥ offset` on the polytope.
    pub normal: IVec,
    pub offset: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    /// Indices into the polytope's vertex list, sorted.
    pub vertices: Vec<usize>,
    /// Indices of the facets containing this face.
    pub facets: Vec<usize>,
}

/// A lattice polytope that is full-dimensional in `ℤ^dim`, normalized so that
/// its vertices are sorted lexicographically and the first one is the origin.
#[derive(Clone, Debug)]
pub struct LatticePolytope {
    dim: usize,
    origin: IVec,
    vertices: Vec<IVec>,
    facets: Vec<Facet>,
    faces: Vec<Face>,
    face_index: HashMap<Vec<usize>, usize>,
    subfaces: Vec<Vec<usize>>,
}

fn homogenize(p: &[i64]) -> IVec {
    let mut v = Vec::with_capacity(p.len() + 1);
    v.push(1);
    v.extend_from_slice(p);
    v
}

impl LatticePolytope {
    /// Convex hull of `points`, which must affinely span `ℝ^dim`.
    pub fn new(points: &[IVec]) -> Result<Self, GeometryError> {
        let Some(first) = points.first() else {
            return Err(GeometryError::Empty);
        };
        let dim = first.len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(GeometryError::Ragged);
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if dim == 0 {
            return Ok(Self::assemble(0, vec![], vec![vec![]], Vec::new(), Vec::new()));
        }
        let gens: Vec<IVec> = pts.iter().map(|p| homogenize(p)).collect();
        let hull = hull::cone_facets(&gens)
            .map_err(|e| GeometryError::NotFullDimensional(e.to_string()))?;
        let mut verts: Vec<IVec> = Vec::new();
        for i in 0..pts.len() {
            let mut closure = Bits::full(pts.len());
            for inc in hull.incidence.iter().filter(|b| b.contains(i)) {
                closure = closure.and(inc);
            }
            if closure.count() == 1 {
                verts.push(pts[i].clone());
            }
        }
        verts.sort();
        let base = verts[0].clone();
        let verts: Vec<IVec> = verts.iter().map(|v| intmat::sub(v, &base)).collect();
        let gens: Vec<IVec> = verts.iter().map(|p| homogenize(p)).collect();
        let hull = hull::cone_facets(&gens)
            .map_err(|e| GeometryError::NotFullDimensional(e.to_string()))?;
        let facets: Vec<Facet> = hull
            .normals
            .iter()
            .map(|n| Facet {
                normal: n[1..].to_vec(),
                offset: -n[0],
            })
            .collect();
        let mut faces = Vec::new();
        for set in hull::face_sets(verts.len(), &hull.incidence) {
            let vs: Vec<usize> = set.iter().collect();
            if vs.is_empty() {
                continue;
            }
            let rows: Vec<IVec> = vs.iter().map(|&i| gens[i].clone()).collect();
            let fdim = intmat::rank(&rows) - 1;
            let fs: Vec<usize> = (0..facets.len())
                .filter(|&j| set.is_subset(&hull.incidence[j]))
                .collect();
            faces.push(Face {
                dim: fdim,
                vertices: vs,
                facets: fs,
            });
        }
        Ok(Self::assemble(dim, base, verts, facets, faces))
    }

    fn assemble(
        dim: usize,
        origin: IVec,
        vertices: Vec<IVec>,
        facets: Vec<Facet>,
        mut faces: Vec<Face>,
    ) -> Self {
        if faces.is_empty() {
            faces.push(Face {
                dim: 0,
                vertices: vec![0],
                facets: vec![],
            });
        }
        faces.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));
        let face_index = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (f.vertices.clone(), i))
            .collect();
        let subfaces = faces
            .iter()
            .map(|f| {
                faces
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| g.dim < f.dim && g.vertices.iter().all(|v| f.vertices.contains(v)))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        LatticePolytope {
            dim,
            origin,
            vertices,
            facets,
            faces,
            face_index,
            subfaces,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[IVec] {
        &self.vertices
    }

    /// Input coordinates of the point normalized to the origin.
    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Nonempty faces ordered by `(dim, vertex indices)`; the polytope itself
    /// is the last entry.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    pub fn top_face(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn face_of_vertices(&self, vertices: &[usize]) -> Option<usize> {
        self.face_index.get(vertices).copied()
    }

    /// Proper nonempty faces of face `i`.
    pub fn subfaces(&self, i: usize) -> &[usize] {
        &self.subfaces[i]
    }

    pub fn faces_of_dim(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(move |(_, f)| f.dim == k)
            .map(|(i, _)| i)
    }

    /// The face of `self` on which the linear functional `u` is minimized.
    pub fn minimizing_face(&self, u: &[i64]) -> usize {
        let vals: Vec<i64> = self.vertices.iter().map(|v| intmat::dot(u, v)).collect();
        let min = *vals.iter().min().expect("polytope has vertices");
        let vs: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] == min).collect();
        self.face_of_vertices(&vs)
            .expect("minimizing set of a linear functional is a face")
    }

    /// Lattice points of `k·P` in the requested region.
    pub fn lattice_points(&self, k: u64, region: Region) -> Vec<IVec> {
        let k = k as i64;
        if self.dim == 0 {
            return match region {
                Region::Relint if k == 0 => vec![],
                _ => vec![vec![]],
            };
        }
        if region == Region::OneSkeleton {
            return self.one_skeleton_points(k);
        }
        let strict = region == Region::Relint;
        let m = self.dim;
        let lo: IVec = (0..m)
            .map(|i| self.vertices.iter().map(|v| v[i] * k).min().unwrap())
            .collect();
        let hi: IVec = (0..m)
            .map(|i| self.vertices.iter().map(|v| v[i] * k).max().unwrap())
            .collect();
        let mut out = Vec::new();
        let mut x: IVec = lo.clone();
        loop {
            // Solve the last coordinate's range from the facet inequalities.
            let mut a = lo[m - 1];
            let mut b = hi[m - 1];
            let mut feasible = true;
            for f in &self.facets {
                let rhs = f.offset * k + strict as i64;
                let rest: i64 = (0..m - 1).map(|i| f.normal[i] * x[i]).sum();
                let c = f.normal[m - 1];
                let need = rhs - rest;
                if c > 0 {
                    a = a.max(Integer::div_ceil(&need, &c));
                } else if c < 0 {
                    b = b.min(Integer::div_floor(&-need, &-c));
                } else if rest < rhs {
                    feasible = false;
                    break;
                }
            }
            if feasible {
                for t in a..=b {
                    let mut p = x.clone();
                    p[m - 1] = t;
                    out.push(p);
                }
            }
            // odometer over the first m-1 coordinates
            let mut i = m - 1;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if x[i] < hi[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = lo[i];
            }
        }
    }

    fn one_skeleton_points(&self, k: i64) -> Vec<IVec> {
        let mut pts: Vec<IVec> = self.vertices.iter().map(|v| intmat::scale(v, k)).collect();
        for e in self.faces_of_dim(1) {
            let f = &self.faces[e];
            let a = intmat::scale(&self.vertices[f.vertices[0]], k);
            let b = intmat::scale(&self.vertices[f.vertices[1]], k);
            let d = intmat::sub(&b, &a);
            let g = intmat::gcd_all(&d);
            if g == 0 {
                continue;
            }
            let step: IVec = d.iter().map(|x| x / g).collect();
            for t in 1..g {
                pts.push(intmat::add(&a, &intmat::scale(&step, t)));
            }
        }
        pts.sort();
        pts.dedup();
        pts
    }

    /// Lattice point counts of `k·P` in `region`, bucketed by character value.
    pub fn count_points(
        &self,
        k: u64,
        region: Region,
        character: &Character,
    ) -> Result<BTreeMap<RootOfUnity, u64>, GeometryError> {
        self.check_character(character)?;
        let mut out = BTreeMap::new();
        for p in self.lattice_points(k, region) {
            *out.entry(character.eval(&p)).or_insert(0) += 1;
        }
        Ok(out)
    }

    pub fn check_character(&self, character: &Character) -> Result<(), GeometryError> {
        assert_eq!(character.dim(), self.dim, "character dimension mismatch");
        for v in &self.vertices {
            let value = character.eval(v);
            if !value.is_one() {
                return Err(GeometryError::CharacterOnVertex {
                    vertex: v.clone(),
                    value,
                });
            }
        }
        Ok(())
    }

    /// `dim!` times the Euclidean volume (in the polytope's own lattice).
    pub fn normalized_volume(&self) -> u64 {
        let top = self.top_face();
        let mut total: i128 = 0;
        for s in self.pulling_triangulation(top) {
            let apex = &self.vertices[s[0]];
            let rows: Vec<IVec> = s[1..]
                .iter()
                .map(|&i| intmat::sub(&self.vertices[i], apex))
                .collect();
            total += intmat::det(&rows).abs();
        }
        total as u64
    }

    fn pulling_triangulation(&self, face: usize) -> Vec<Vec<usize>> {
        let f = &self.faces[face];
        if f.dim == 0 {
            return vec![vec![f.vertices[0]]];
        }
        let apex = f.vertices[0];
        let mut out = Vec::new();
        for &g in &self.subfaces[face] {
            let gf = &self.faces[g];
            if gf.dim + 1 != f.dim || gf.vertices.contains(&apex) {
                continue;
            }
            for mut s in self.pulling_triangulation(g) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }

    /// Prime: every vertex lies on exactly `dim` edges (simple polytope).
    /// Pseudo-prime: every edge lies on exactly `dim − 1` two-faces.
    pub fn primeness(&self) -> Primeness {
        let m = self.dim;
        if m <= 1 {
            return Primeness::Prime;
        }
        let edges: Vec<usize> = self.faces_of_dim(1).collect();
        let simple = (0..self.vertices.len()).all(|v| {
            edges
                .iter()
                .filter(|&&e| self.faces[e].vertices.contains(&v))
                .count()
                == m
        });
        if simple {
            return Primeness::Prime;
        }
        let twos: Vec<usize> = self.faces_of_dim(2).collect();
        let pseudo = edges.iter().all(|&e| {
            twos.iter()
                .filter(|&&t| self.subfaces[t].contains(&e))
                .count()
                == m - 1
        });
        if pseudo {
            Primeness::PseudoPrime
        } else {
            Primeness::Neither
        }
    }

    /// Face `i` as a polytope in its own lattice, with the embedding data.
    pub fn face_embedding(&self, i: usize) -> FaceEmbedding {
        let pts: Vec<IVec> = self.faces[i]
            .vertices
            .iter()
            .map(|&v| self.vertices[v].clone())
            .collect();
        FaceEmbedding::of_points(&pts)
    }

    /// `Σ_faces (−1)^dim` over nonempty faces; equals 1 for every polytope.
    pub fn euler_characteristic(&self) -> i64 {
        self.faces
            .iter()
            .map(|f| if f.dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }
}

/// A face re-expressed in its own lattice: `basis` spans the direction
/// lattice of the face inside the parent lattice.
#[derive(Clone, Debug)]
pub struct FaceEmbedding {
    pub basis: Vec<IVec>,
    pub polytope: LatticePolytope,
}

impl FaceEmbedding {
    /// The convex hull of `points` in the lattice of its affine span.
    pub fn of_points(points: &[IVec]) -> FaceEmbedding {
        let w0 = &points[0];
        let ambient = w0.len();
        let diffs: Vec<IVec> = points.iter().map(|p| intmat::sub(p, w0)).collect();
        let basis = intmat::saturated_basis(&diffs, ambient);
        let coords: Vec<IVec> = diffs
            .iter()
            .map(|d| intmat::coordinates(&basis, d).expect("span lattice contains its generators"))
            .collect();
        let polytope =
            LatticePolytope::new(&coords).expect("a point set is full-dimensional in its span");
        FaceEmbedding { basis, polytope }
    }
}

/// A lattice polytope together with a character that vanishes on its
/// vertices; the data of a non-degenerate hypersurface with a finite-order
/// torus action.
#[derive(Clone, Debug)]
pub struct EquivariantPolytope {
    pub polytope: Arc<LatticePolytope>,
    pub character: Character,
}

/// Memoization key: normalized vertices and character.
pub type PolytopeKey = (Vec<IVec>, Character);

impl EquivariantPolytope {
    pub fn new(polytope: Arc<LatticePolytope>, character: Character) -> Result<Self, GeometryError> {
        polytope.check_character(&character)?;
        Ok(EquivariantPolytope {
            polytope,
            character,
        })
    }

    pub fn trivial(polytope: Arc<LatticePolytope>) -> Self {
        let character = Character::trivial(polytope.dim());
        EquivariantPolytope {
            polytope,
            character,
        }
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn key(&self) -> PolytopeKey {
        (self.polytope.vertices().to_vec(), self.character.clone())
    }

    pub fn count_points(&self, k: u64, region: Region) -> BTreeMap<RootOfUnity, u64> {
        self.polytope
            .count_points(k, region, &self.character)
            .expect("character checked at construction")
    }

    /// Face `i` with the restricted character.
    pub fn face(&self, i: usize) -> EquivariantPolytope {
        let emb = self.polytope.face_embedding(i);
        let character = self.character.restrict(&emb.basis);
        EquivariantPolytope {
            polytope: Arc::new(emb.polytope),
            character,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(pts: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::new(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn cusp() -> (LatticePolytope, Character) {
        (poly(&[&[0, 0], &[2, 0], &[0, 3]]), Character::from_height(&[3, 2], 6))
    }

    fn buckets(pairs: &[(&str, u64)]) -> BTreeMap<RootOfUnity, u64> {
        pairs.iter().map(|(r, c)| (r.parse().unwrap(), *c)).collect()
    }

    #[test]
    fn cusp_triangle_interior_bucket() {
        let (p, c) = cusp();
        assert_eq!(p.count_points(1, Region::Relint, &c).unwrap(), buckets(&[("5/6", 1)]));
    }

    #[test]
    fn cusp_triangle_one_skeleton() {
        let (p, c) = cusp();
        assert_eq!(
            p.count_points(1, Region::OneSkeleton, &c).unwrap(),
            buckets(&[("0/1", 3), ("1/2", 1), ("1/3", 1), ("2/3", 1)])
        );
    }

    #[test]
    fn zero_dilate_has_empty_interior() {
        let (p, c) = cusp();
        assert!(p.count_points(0, Region::Relint, &c).unwrap().is_empty());
        let pt = poly(&[&[]]);
        assert!(pt.count_points(0, Region::Relint, &Character::trivial(0)).unwrap().is_empty());
        assert_eq!(pt.count_points(3, Region::Relint, &Character::trivial(0)).unwrap(), buckets(&[("0/1", 1)]));
    }

    #[test]
    fn character_must_vanish_on_vertices() {
        let (p, _) = cusp();
        let bad = Character::new(vec![1, 0], 6);
        assert!(matches!(
            p.count_points(1, Region::Full, &bad),
            Err(GeometryError::CharacterOnVertex { .. })
        ));
    }

    #[test]
    fn normalized_volumes() {
        assert_eq!(cusp().0.normalized_volume(), 6);
        assert_eq!(poly(&[&[0], &[2]]).normalized_volume(), 2);
        assert_eq!(
            poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).normalized_volume(),
            1
        );
        assert_eq!(poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).normalized_volume(), 2);
    }

    #[test]
    fn primeness_classes() {
        assert_eq!(poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).primeness(), Primeness::Prime);
        // Polygons are simple: each vertex cone is spanned by a real basis.
        assert_eq!(cusp().0.primeness(), Primeness::Prime);
        let oct = poly(&[
            &[1, 0, 0],
            &[-1, 0, 0],
            &[0, 1, 0],
            &[0, -1, 0],
            &[0, 0, 1],
            &[0, 0, -1],
        ]);
        assert_eq!(oct.primeness(), Primeness::PseudoPrime);
        // Square pyramid over a square in 4-space: its apex sees four edges.
        let bipyr = poly(&[
            &[0, 0, 0, 0],
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[1, 1, 0, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, 1],
        ]);
        assert_eq!(bipyr.primeness(), Primeness::Neither);
    }

    #[test]
    fn face_embedding_restricts_character() {
        let (p, c) = cusp();
        let ep = EquivariantPolytope::new(Arc::new(p), c).unwrap();
        // segment [0,(2,0)]: lattice length 2, character j/2
        let i = ep
            .polytope
            .faces()
            .iter()
            .position(|f| f.dim == 1 && f.vertices.iter().all(|&v| ep.polytope.vertices()[v][1] == 0))
            .unwrap();
        let seg = ep.face(i);
        assert_eq!(seg.dim(), 1);
        assert_eq!(seg.polytope.vertices(), &[vec![0], vec![2]]);
        assert_eq!(seg.count_points(1, Region::Full), buckets(&[("0/1", 2), ("1/2", 1)]));
    }

    fn arb_points() -> impl Strategy<Value = Vec<IVec>> {
        prop::collection::vec(prop::collection::vec(0i64..5, 3), 4..9)
    }

    proptest! {
        #[test]
        fn euler_relation_and_full_count_decomposition(pts in arb_points()) {
            prop_assume!(intmat::rank(&pts.iter().map(|p| homogenize(p)).collect::<Vec<_>>()) == 4);
            let p = LatticePolytope::new(&pts).unwrap();
            prop_assert_eq!(p.euler_characteristic(), 1);
            let full = p.lattice_points(1, Region::Full).len();
            let by_faces: usize = (0..p.faces().len())
                .map(|i| p.face_embedding(i).polytope.lattice_points(1, Region::Relint).len())
                .sum();
            prop_assert_eq!(full, by_faces);
        }

        #[test]
        fn dehn_sommerville_for_simple_polytopes(pts in arb_points()) {
            prop_assume!(intmat::rank(&pts.iter().map(|p| homogenize(p)).collect::<Vec<_>>()) == 4);
            let p = LatticePolytope::new(&pts).unwrap();
            prop_assume!(p.primeness() == Primeness::Prime);
            let d = p.dim() as i64;
            let binom = |a: i64, b: i64| -> i64 {
                if b < 0 || b > a { 0 } else { (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1)) }
            };
            for q in 0..=d {
                let lhs: i64 = p.faces().iter().map(|f| {
                    let k = f.dim as i64;
                    (-1i64).pow(k as u32) * binom(k, q)
                }).sum();
                let rhs: i64 = p.faces().iter().map(|f| {
                    let k = f.dim as i64;
                    (-1i64).pow((d + k) as u32) * binom(k, d - q)
                }).sum();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
