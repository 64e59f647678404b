//! Exact double-description method for pointed full-dimensional cones, plus
//! face-lattice enumeration from facet incidences.

use std::collections::HashSet;

use crate::intmat::{self, IVec};

/// Fixed-width bitset over generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bits::empty(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HullError {
    #[error("generators span a cone of dimension {rank} in ambient dimension {dim}")]
    NotFullDimensional { rank: usize, dim: usize },
    #[error("no generators")]
    Empty,
}

/// Facets of `cone(generators)`: primitive inner normals `a` with `a·g ≥ 0`
/// for every generator, together with the set of generators on each facet.
#[derive(Clone, Debug)]
pub struct ConeFacets {
    pub normals: Vec<IVec>,
    pub incidence: Vec<Bits>,
}

struct Ray {
    v: Vec<i128>,
    zero: Bits,
}

fn dot128(a: &[i64], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y).sum()
}

fn normalize(v: &mut [i128]) {
    use num_integer::Integer;
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

/// Computes the facets of a pointed, full-dimensional cone by the
/// double-description method with the combinatorial adjacency test.
pub fn cone_facets(generators: &[IVec]) -> Result<ConeFacets, HullError> {
    let Some(first) = generators.first() else {
        return Err(HullError::Empty);
    };
    let dim = first.len();
    let ngen = generators.len();

    // Greedy independent subset for the initial simplicial cone.
    let mut basis: Vec<usize> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        let mut trial: Vec<IVec> = basis.iter().map(|&j| generators[j].clone()).collect();
        trial.push(g.clone());
        if intmat::rank(&trial) == trial.len() {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    if basis.len() < dim {
        return Err(HullError::NotFullDimensional {
            rank: basis.len(),
            dim,
        });
    }

    let mut rays: Vec<Ray> = Vec::with_capacity(dim);
    for (j, &bj) in basis.iter().enumerate() {
        let others: Vec<IVec> = basis
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &b)| generators[b].clone())
            .collect();
        let mut v: Vec<i128> = if others.is_empty() {
            vec![1]
        } else {
            let k = intmat::integer_kernel(&others, dim);
            debug_assert_eq!(k.len(), 1);
            k[0].iter().map(|&x| x as i128).collect()
        };
        if dot128(&generators[bj], &v) < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let mut zero = Bits::empty(ngen);
        for (k, &b) in basis.iter().enumerate() {
            if k != j {
                zero.insert(b);
            }
        }
        rays.push(Ray { v, zero });
    }

    let in_basis: HashSet<usize> = basis.iter().copied().collect();
    for (h, g) in generators.iter().enumerate() {
        if in_basis.contains(&h) {
            continue;
        }
        let vals: Vec<i128> = rays.iter().map(|r| dot128(g, &r.v)).collect();
        if vals.iter().all(|&s| s >= 0) {
            for (r, &s) in rays.iter_mut().zip(&vals) {
                if s == 0 {
                    r.zero.insert(h);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zero.and(&rays[q].zero);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !common.is_subset(&r.zero));
                if !adjacent {
                    continue;
                }
                let (sp, sq) = (vals[p], vals[q]);
                let mut v: Vec<i128> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(&a, &b)| sp * a - sq * b)
                    .collect();
                normalize(&mut v);
                let mut zero = common;
                zero.insert(h);
                fresh.push(Ray { v, zero });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (r, &s) in rays.into_iter().zip(&vals) {
            if s > 0 {
                next.push(r);
            } else if s == 0 {
                let mut r = r;
                r.zero.insert(h);
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
    }

    let mut normals: Vec<IVec> = rays
        .iter()
        .map(|r| {
            r.v.iter()
                .map(|&x| i64::try_from(x).expect("facet normal overflow"))
                .collect()
        })
        .collect();
    normals.sort();
    normals.dedup();
    let incidence = normals
        .iter()
        .map(|a| {
            let mut b = Bits::empty(ngen);
            for (i, g) in generators.iter().enumerate() {
                let s = intmat::dot(a, g);
                debug_assert!(s >= 0);
                if s == 0 {
                    b.insert(i);
                }
            }
            b
        })
        .collect();
    Ok(ConeFacets { normals, incidence })
}

/// All faces of a polyhedral cone as generator sets: the full set and every
/// intersection of facet incidences (including possibly the empty set).
pub fn face_sets(ngen: usize, incidence: &[Bits]) -> Vec<Bits> {
    let full = Bits::full(ngen);
    let mut seen: HashSet<Bits> = HashSet::new();
    let mut queue = vec![full.clone()];
    seen.insert(full);
    while let Some(f) = queue.pop() {
        for inc in incidence {
            let g = f.and(inc);
            if seen.insert(g.clone()) {
                queue.push(g);
            }
        }
    }
    let mut out: Vec<Bits> = seen.into_iter().collect();
    out.sort();
    out
}
