//! Rational polyhedral fans stored as face-closed families of ray sets, with
//! simplicial refinement by stellar subdivision.

use std::collections::BTreeSet;

use crate::hull;
use crate::intmat::{self, IVec};
use crate::polytope::LatticePolytope;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<IVec>,
    /// Sorted ray-index sets, closed under taking faces; includes the zero cone.
    cones: Vec<Vec<usize>>,
}

impl Fan {
    /// The inner normal fan of a full-dimensional polytope: face `F` maps to
    /// the cone over the normals of the facets containing `F`.
    pub fn normal_fan(p: &LatticePolytope) -> Fan {
        let rays = p.facets().iter().map(|f| f.normal.clone()).collect();
        let cones: BTreeSet<Vec<usize>> = p.faces().iter().map(|f| f.facets.clone()).collect();
        Fan {
            dim: p.dim(),
            rays,
            cones: cones.into_iter().collect(),
        }
    }

    /// Fan generated by the given maximal cones (ray-index sets), closed
    /// under faces. The caller guarantees the cones meet along common faces.
    pub fn from_maximal_cones(dim: usize, rays: Vec<IVec>, maximal: &[Vec<usize>]) -> Fan {
        let mut cones = BTreeSet::new();
        cones.insert(Vec::new());
        for m in maximal {
            for face in cone_faces(&rays, m, dim) {
                cones.insert(face);
            }
        }
        Fan {
            dim,
            rays,
            cones: cones.into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IVec] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone_dim(&self, cone: &[usize]) -> usize {
        let gens: Vec<IVec> = cone.iter().map(|&r| self.rays[r].clone()).collect();
        intmat::rank(&gens)
    }

    pub fn is_simplicial(&self, cone: &[usize]) -> bool {
        self.cone_dim(cone) == cone.len()
    }

    /// Cones not contained in any other cone.
    pub fn maximal_cones(&self) -> Vec<&[usize]> {
        self.cones
            .iter()
            .filter(|c| {
                !self
                    .cones
                    .iter()
                    .any(|d| d.len() > c.len() && is_subset(c, d))
            })
            .map(|c| c.as_slice())
            .collect()
    }

    /// Sum of the ray generators of a cone: a point of its relative interior.
    pub fn interior_vector(&self, cone: &[usize]) -> IVec {
        let mut s = vec![0; self.dim];
        for &r in cone {
            s = intmat::add(&s, &self.rays[r]);
        }
        s
    }

    /// For a refinement of `p`'s normal fan: the face of `p` whose normal
    /// cone contains `cone` in its relative interior.
    pub fn back_reference(&self, cone: &[usize], p: &LatticePolytope) -> usize {
        p.minimizing_face(&self.interior_vector(cone))
    }

    /// Iterated stellar subdivision until every cone is simplicial. The cone
    /// to star is the non-simplicial cone of least dimension, ties broken by
    /// its sorted generator list; it is starred at the primitive vector on the
    /// sum of its generators.
    pub fn simplicial_refinement(&self) -> Fan {
        let mut fan = self.clone();
        loop {
            let target = fan
                .cones
                .iter()
                .filter(|c| !fan.is_simplicial(c))
                .min_by_key(|c| {
                    let mut gens: Vec<IVec> = c.iter().map(|&r| fan.rays[r].clone()).collect();
                    gens.sort();
                    (fan.cone_dim(c), gens)
                })
                .cloned();
            let Some(tau) = target else {
                return fan;
            };
            fan = fan.star(&tau);
        }
    }

    fn star(&self, tau: &[usize]) -> Fan {
        let mut rays = self.rays.clone();
        let rho = rays.len();
        rays.push(intmat::primitive(&self.interior_vector(tau)));
        let around: Vec<&Vec<usize>> = self.cones.iter().filter(|s| is_subset(tau, s)).collect();
        let mut cones = BTreeSet::new();
        for eta in &self.cones {
            if is_subset(tau, eta) {
                continue;
            }
            cones.insert(eta.clone());
            if around.iter().any(|s| is_subset(eta, s)) {
                let mut c = eta.clone();
                c.push(rho);
                cones.insert(c);
            }
        }
        Fan {
            dim: self.dim,
            rays,
            cones: cones.into_iter().collect(),
        }
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// All faces of `cone(rays[idx])` as sorted ray-index sets.
fn cone_faces(rays: &[IVec], idx: &[usize], dim: usize) -> Vec<Vec<usize>> {
    let gens: Vec<IVec> = idx.iter().map(|&i| rays[i].clone()).collect();
    let basis = intmat::saturated_basis(&gens, dim);
    if basis.is_empty() {
        return vec![Vec::new()];
    }
    let coords: Vec<IVec> = gens
        .iter()
        .map(|g| intmat::coordinates(&basis, g).expect("generator lies in its span"))
        .collect();
    let facets = hull::cone_facets(&coords).expect("cone is full-dimensional in its span");
    hull::face_sets(idx.len(), &facets.incidence)
        .into_iter()
        .map(|b| {
            let mut v: Vec<usize> = b.iter().map(|i| idx[i]).collect();
            v.sort();
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(pts: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::new(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Whether `u` lies in the simplicial cone spanned by `gens`.
    fn in_simplicial_cone(gens: &[IVec], u: &[i64]) -> bool {
        let d = intmat::det(gens);
        assert_ne!(d, 0);
        (0..gens.len()).all(|i| {
            let mut m = gens.to_vec();
            m[i] = u.to_vec();
            let di = intmat::det(&m);
            di == 0 || (di > 0) == (d > 0)
        })
    }

    fn check_complete_simplicial(fan: &Fan) {
        let m = fan.dim() as i64;
        assert!(fan.cones().iter().all(|c| fan.is_simplicial(c)));
        let chi: i64 = fan
            .cones()
            .iter()
            .map(|c| if fan.cone_dim(c) % 2 == 0 { 1 } else { -1 })
            .sum();
        assert_eq!(chi, if m % 2 == 0 { 1 } else { -1 });
        let maximal = fan.maximal_cones();
        for c in fan.cones().iter().filter(|c| fan.cone_dim(c) as i64 == m - 1) {
            let n = maximal.iter().filter(|d| is_subset(c, d)).count();
            assert_eq!(n, 2, "wall {c:?} must separate two chambers");
        }
    }

    #[test]
    fn square_normal_fan_is_unchanged() {
        let fan = Fan::normal_fan(&poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]));
        assert_eq!(fan.simplicial_refinement(), fan);
        assert_eq!(fan.maximal_cones().len(), 4);
    }

    #[test]
    fn simplex_fan_is_identity() {
        let fan = Fan::normal_fan(&poly(&[&[0, 0, 0], &[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]));
        assert_eq!(fan.simplicial_refinement(), fan);
    }

    #[test]
    fn cone_over_square_is_starred_into_four() {
        let rays = vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 1]];
        let fan = Fan::from_maximal_cones(3, rays, &[vec![0, 1, 2, 3]]);
        assert_eq!(fan.maximal_cones().len(), 1);
        let refined = fan.simplicial_refinement();
        assert_eq!(refined.rays().last().unwrap(), &vec![1, 1, 1]);
        let maximal = refined.maximal_cones();
        assert_eq!(maximal.len(), 4);
        assert!(maximal.iter().all(|c| c.len() == 3 && refined.is_simplicial(c)));
    }

    #[test]
    fn octahedron_fan_refines_to_a_complete_simplicial_fan() {
        let oct = poly(&[
            &[1, 0, 0],
            &[-1, 0, 0],
            &[0, 1, 0],
            &[0, -1, 0],
            &[0, 0, 1],
            &[0, 0, -1],
        ]);
        let refined = Fan::normal_fan(&oct).simplicial_refinement();
        check_complete_simplicial(&refined);
        // one new ray per vertex cone of the octahedron
        assert_eq!(refined.rays().len(), 8 + 6);
    }

    fn arb_points() -> impl Strategy<Value = Vec<IVec>> {
        prop::collection::vec(prop::collection::vec(0i64..4, 3), 4..9)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn refinement_covers_and_respects_back_references(
            pts in arb_points(),
            probes in prop::collection::vec(prop::collection::vec(-9i64..10, 3), 8),
        ) {
            let homog: Vec<IVec> = pts.iter().map(|p| { let mut v = vec![1]; v.extend(p); v }).collect();
            prop_assume!(intmat::rank(&homog) == 4);
            let p = LatticePolytope::new(&pts).unwrap();
            let fan = Fan::normal_fan(&p);
            let refined = fan.simplicial_refinement();
            check_complete_simplicial(&refined);
            // each refined cone sits inside the normal cone of its face
            for c in refined.cones() {
                let f = refined.back_reference(c, &p);
                for &r in c {
                    let g = p.minimizing_face(&refined.rays()[r]);
                    let fv = &p.face(f).vertices;
                    prop_assert!(fv.iter().all(|v| p.face(g).vertices.contains(v)));
                }
            }
            // every probe vector lies in some maximal cone
            for u in probes {
                let covered = refined.maximal_cones().iter().any(|c| {
                    let gens: Vec<IVec> = c.iter().map(|&r| refined.rays()[r].clone()).collect();
                    in_simplicial_cone(&gens, &u)
                });
                prop_assert!(covered);
            }
        }
    }
}
