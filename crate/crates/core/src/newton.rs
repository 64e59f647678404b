//! The Newton polyhedron of a support set and the lattice data of its
//! compact faces.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::{self, Bits};
use crate::intmat::{self, IVec};
use crate::poly::SupportSet;
use crate::polytope::{Character, EquivariantPolytope, FaceEmbedding, LatticePolytope};

/// A compact face γ of Γ₊(f).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompactFace {
    pub id: usize,
    pub dim: usize,
    /// Vertices in ℤⁿ, sorted.
    pub vertices: Vec<IVec>,
    /// Ids of the proper nonempty faces of γ.
    pub subfaces: Vec<usize>,
    /// Whether the relative interior of γ lies in the open positive orthant.
    pub interior_touching: bool,
    /// Smallest coordinate subspace containing γ, as 0-based axis indices.
    pub s: Vec<usize>,
    /// `|S| − dim − 1`.
    pub m: usize,
    /// Lattice distance from the origin.
    pub d: u64,
}

/// Lattice data for a compact face: the lattice `M = ℤⁿ ∩ span(γ)`, the
/// height `ht = d − ℓ` on it, and the polytopes `Δ_γ = conv(0, γ)` and `γ`.
#[derive(Clone, Debug)]
pub struct FaceChart {
    pub face: usize,
    /// Basis of `M` in ℤⁿ (row Hermite normal form).
    pub lattice_basis: Vec<IVec>,
    /// Primitive linear functional on `M` (in basis coordinates), equal to
    /// `d` on γ.
    pub linear: IVec,
    pub d: u64,
    /// `Δ_γ` in basis coordinates, normalized.
    pub pyramid: Arc<LatticePolytope>,
    /// γ in the lattice of its own affine span.
    pub face_lattice: FaceEmbedding,
}

impl FaceChart {
    /// `ht(v)` for `v` given in basis coordinates of `M`.
    pub fn height(&self, v: &[i64]) -> i64 {
        self.d as i64 - intmat::dot(&self.linear, v)
    }

    /// `ht` of a lattice point in the normalized coordinates of `pyramid`.
    pub fn pyramid_height(&self, v: &[i64]) -> i64 {
        self.height(&intmat::add(v, self.pyramid.origin()))
    }

    /// `v ↦ −ht(v)/d mod 1` on `M`.
    pub fn character(&self) -> Character {
        Character::from_height(&self.linear, self.d)
    }

    pub fn pyramid_equivariant(&self) -> EquivariantPolytope {
        EquivariantPolytope::new(self.pyramid.clone(), self.character())
            .expect("the height character vanishes on the vertices of Δ_γ")
    }

    pub fn face_equivariant(&self) -> EquivariantPolytope {
        EquivariantPolytope::trivial(Arc::new(self.face_lattice.polytope.clone()))
    }
}

#[derive(Clone, Debug)]
pub struct NewtonPolyhedron {
    support: SupportSet,
    faces: Vec<CompactFace>,
    convenient: bool,
}

impl NewtonPolyhedron {
    /// Γ₊(f) for a convenient support; a missing axis is reported by name.
    pub fn new(support: SupportSet) -> Result<Self> {
        let np = Self::build(support);
        if let Some(axis) = np.missing_axis() {
            return Err(Error::NotConvenient(np.support.variables()[axis].clone()));
        }
        Ok(np)
    }

    /// Γ₊(f) without the convenience requirement.
    pub fn build(support: SupportSet) -> Self {
        let n = support.n();
        let pts: Vec<IVec> = support.points().map(|p| p.to_vec()).collect();
        let npts = pts.len();
        let mut gens: Vec<IVec> = pts
            .iter()
            .map(|p| {
                let mut v = vec![1];
                v.extend_from_slice(p);
                v
            })
            .collect();
        for i in 0..n {
            let mut v = vec![0; n + 1];
            v[i + 1] = 1;
            gens.push(v);
        }
        let hull = hull::cone_facets(&gens).expect("Γ₊ is full-dimensional and pointed");
        let is_vertex: Vec<bool> = (0..npts)
            .map(|i| {
                let mut closure = Bits::full(gens.len());
                for inc in hull.incidence.iter().filter(|b| b.contains(i)) {
                    closure = closure.and(inc);
                }
                closure.count() == 1
            })
            .collect();

        let mut faces: Vec<CompactFace> = Vec::new();
        for set in hull::face_sets(gens.len(), &hull.incidence) {
            if set.iter().any(|i| i >= npts) {
                continue;
            }
            let mut vertices: Vec<IVec> = set
                .iter()
                .filter(|&i| is_vertex[i])
                .map(|i| pts[i].clone())
                .collect();
            if vertices.is_empty() {
                continue;
            }
            vertices.sort();
            let homog: Vec<IVec> = set.iter().map(|i| gens[i].clone()).collect();
            let dim = intmat::rank(&homog) - 1;
            let s: Vec<usize> = (0..n)
                .filter(|&j| vertices.iter().any(|v| v[j] > 0))
                .collect();
            let basis = intmat::saturated_basis(&vertices, n);
            let d = pyramid_distance(&basis, &vertices).1;
            faces.push(CompactFace {
                id: 0,
                dim,
                interior_touching: s.len() == n,
                m: s.len() - dim - 1,
                s,
                d,
                vertices,
                subfaces: Vec::new(),
            });
        }
        faces.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));
        let vsets: Vec<Vec<IVec>> = faces.iter().map(|f| f.vertices.clone()).collect();
        for (id, f) in faces.iter_mut().enumerate() {
            f.id = id;
            f.subfaces = (0..vsets.len())
                .filter(|&j| {
                    j != id
                        && vsets[j].len() < f.vertices.len()
                        && vsets[j].iter().all(|v| f.vertices.contains(v))
                })
                .collect();
        }
        let convenient = (0..n).all(|i| {
            pts.iter()
                .any(|p| p[i] > 0 && p.iter().enumerate().all(|(j, &e)| j == i || e == 0))
        });
        NewtonPolyhedron {
            support,
            faces,
            convenient,
        }
    }

    fn missing_axis(&self) -> Option<usize> {
        (0..self.n()).find(|&i| {
            !self
                .support
                .points()
                .any(|p| p[i] > 0 && p.iter().enumerate().all(|(j, &e)| j == i || e == 0))
        })
    }

    pub fn n(&self) -> usize {
        self.support.n()
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn is_convenient(&self) -> bool {
        self.convenient
    }

    /// Compact faces ordered by `(dim, sorted vertices)`.
    pub fn faces(&self) -> &[CompactFace] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &CompactFace {
        &self.faces[id]
    }

    pub fn face_chart(&self, id: usize) -> FaceChart {
        let f = &self.faces[id];
        let basis = intmat::saturated_basis(&f.vertices, self.n());
        let (linear, d, coords) = pyramid_distance(&basis, &f.vertices);
        let mut pts = coords;
        pts.push(vec![0; basis.len()]);
        let pyramid = LatticePolytope::new(&pts).expect("Δ_γ is full-dimensional in M_γ");
        FaceChart {
            face: id,
            lattice_basis: basis,
            linear,
            d,
            pyramid: Arc::new(pyramid),
            face_lattice: FaceEmbedding::of_points(&f.vertices),
        }
    }

    /// Lattice points on compact edges and vertices with all coordinates
    /// positive.
    pub fn interior_skeleton_points(&self) -> Vec<IVec> {
        let mut out: Vec<IVec> = Vec::new();
        for f in self.faces.iter().filter(|f| f.dim <= 1) {
            let a = &f.vertices[0];
            let b = f.vertices.last().expect("faces have vertices");
            let diff = intmat::sub(b, a);
            let g = intmat::gcd_all(&diff).max(1);
            for t in 0..=g {
                let p: IVec = a.iter().zip(&diff).map(|(x, y)| x + y / g * t).collect();
                if p.iter().all(|&x| x > 0) {
                    out.push(p);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// The primitive functional on `M` that is constant on γ, that constant, and
/// the coordinates of γ's vertices in `basis`.
fn pyramid_distance(basis: &[IVec], vertices: &[IVec]) -> (IVec, u64, Vec<IVec>) {
    let coords: Vec<IVec> = vertices
        .iter()
        .map(|v| intmat::coordinates(basis, v).expect("vertex lies in M_γ"))
        .collect();
    let diffs: Vec<IVec> = coords[1..]
        .iter()
        .map(|y| intmat::sub(y, &coords[0]))
        .collect();
    let kernel = intmat::integer_kernel(&diffs, basis.len());
    assert_eq!(kernel.len(), 1, "γ spans a hyperplane of M_γ");
    let mut linear = kernel.into_iter().next().unwrap();
    let mut d = intmat::dot(&linear, &coords[0]);
    if d < 0 {
        linear.iter_mut().for_each(|x| *x = -*x);
        d = -d;
    }
    assert!(d > 0, "compact faces avoid the origin");
    (linear, d as u64, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::polytope::Region;
    use crate::RootOfUnity;

    fn np(s: &str) -> NewtonPolyhedron {
        NewtonPolyhedron::new(parse_polynomial(s, None).unwrap()).unwrap()
    }

    fn find(np: &NewtonPolyhedron, vertices: &[&[i64]]) -> usize {
        let vs: Vec<IVec> = vertices.iter().map(|v| v.to_vec()).collect();
        np.faces().iter().position(|f| f.vertices == vs).unwrap()
    }

    #[test]
    fn cusp_has_three_compact_faces() {
        let p = np("x^2 + y^3");
        assert!(p.is_convenient());
        let dims: Vec<usize> = p.faces().iter().map(|f| f.dim).collect();
        assert_eq!(dims, vec![0, 0, 1]);
        assert_eq!(p.face(2).subfaces, vec![0, 1]);
    }

    #[test]
    fn missing_axis_is_named() {
        let s = SupportSet::from_points(vec![vec![2, 0]]).unwrap();
        assert_eq!(NewtonPolyhedron::new(s).unwrap_err(), Error::NotConvenient("y".into()));
        let s = SupportSet::from_points(vec![vec![2, 0], vec![1, 1]]).unwrap();
        assert!(!NewtonPolyhedron::build(s).is_convenient());
    }

    #[test]
    fn interior_vertex_of_x5_x2y2_y5() {
        let p = np("x^5 + x^2*y^2 + y^5");
        assert_eq!(p.faces().len(), 5);
        let v = find(&p, &[&[2, 2]]);
        assert!(p.face(v).interior_touching);
        assert_eq!(p.face(v).d, 2);
        // a point above the boundary is not a vertex
        let q = np("x^5 + x^2*y^2 + y^5 + x^3*y^3");
        assert_eq!(q.faces().len(), 5);
    }

    #[test]
    fn edge_chart_of_the_cusp() {
        let p = np("x^2 + y^3");
        let e = find(&p, &[&[0, 3], &[2, 0]]);
        let c = p.face_chart(e);
        assert_eq!(c.d, 6);
        assert_eq!(p.face(e).d, 6);
        // (1,1) in basis coordinates of M = ℤ²
        let v = intmat::coordinates(&c.lattice_basis, &[1, 1]).unwrap();
        assert_eq!(c.height(&v), 1);
        assert_eq!(p.face(e).m, 0);
        assert!(p.face(e).interior_touching);
    }

    #[test]
    fn vertex_charts() {
        let p = np("x^5 + x^2*y^2 + y^5");
        let c = p.face_chart(find(&p, &[&[2, 2]]));
        assert_eq!(c.lattice_basis, vec![vec![1, 1]]);
        assert_eq!(c.d, 2);
        for j in 0..3 {
            assert_eq!(c.height(&[j]), 2 - j);
        }
        let p = np("x^2 + y^3");
        let v = find(&p, &[&[2, 0]]);
        assert_eq!((p.face(v).d, p.face(v).s.clone(), p.face(v).m), (2, vec![0], 0));
    }

    #[test]
    fn height_is_primitive_and_vanishes_on_the_face() {
        let p = np("x^4 + y^4 + z^4 + x^2*y^2*z^2");
        for f in p.faces() {
            let c = p.face_chart(f.id);
            for v in &f.vertices {
                let y = intmat::coordinates(&c.lattice_basis, v).unwrap();
                assert_eq!(c.height(&y), 0);
            }
            assert_eq!(c.height(&vec![0; c.lattice_basis.len()]), f.d as i64);
            assert_eq!(intmat::gcd_all(&c.linear), 1);
            // the pyramid's character puts the apex's neighbours in the right bucket
            let ep = c.pyramid_equivariant();
            let pts = ep.polytope.lattice_points(1, Region::Full);
            for q in pts {
                let expected = RootOfUnity::new(-c.pyramid_height(&q), c.d);
                assert_eq!(ep.character.eval(&q), expected);
            }
        }
    }

    #[test]
    fn interior_skeleton_points_of_x3_y3() {
        let p = np("x^3 + y^3");
        assert_eq!(p.interior_skeleton_points(), vec![vec![1, 2], vec![2, 1]]);
    }
}
