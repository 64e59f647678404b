//! Equivariant Ehrhart polynomials `P_α(Δ;t) = (1−t)^{dim+1} Σ_k l*(kΔ)_α t^k`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::polytope::{EquivariantPolytope, Region};
use crate::root::RootOfUnity;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTable {
    dim: usize,
    /// `φ_{α,0..=dim+1}` for every α with a nonzero polynomial.
    coeffs: BTreeMap<RootOfUnity, Vec<i64>>,
}

fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl PhiTable {
    /// Counts interior points of `kΔ` for `k ≤ 2(dim+1)` and checks that the
    /// resulting series times `(1−t)^{dim+1}` has degree at most `dim+1`.
    pub fn compute(ep: &EquivariantPolytope) -> Result<PhiTable> {
        let dim = ep.dim();
        let kmax = 2 * (dim + 1);
        let mut series: BTreeMap<RootOfUnity, Vec<i64>> = BTreeMap::new();
        for k in 1..=kmax {
            for (alpha, c) in ep.count_points(k as u64, Region::Relint) {
                series.entry(alpha).or_insert_with(|| vec![0; kmax + 1])[k] = c as i64;
            }
        }
        let mut coeffs = BTreeMap::new();
        for (alpha, s) in series {
            let mut phi = vec![0i64; kmax + 1];
            for (i, slot) in phi.iter_mut().enumerate() {
                *slot = (0..=i.min(dim + 1))
                    .map(|j| {
                        let sign = if j % 2 == 0 { 1 } else { -1 };
                        sign * binomial(dim + 1, j) * s[i - j]
                    })
                    .sum();
            }
            if let Some(i) = (dim + 2..=kmax).find(|&i| phi[i] != 0) {
                return Err(Error::Internal(format!(
                    "equivariant Ehrhart series for {alpha} is not polynomial: φ_{i} = {}",
                    phi[i]
                )));
            }
            phi.truncate(dim + 2);
            if phi.iter().any(|&x| x != 0) {
                coeffs.insert(alpha, phi);
            }
        }
        Ok(PhiTable { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `φ_{α,i}`; zero outside the table.
    pub fn phi(&self, alpha: RootOfUnity, i: usize) -> i64 {
        self.coeffs
            .get(&alpha)
            .and_then(|c| c.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// Coefficients of `P_α`, lowest degree first, padded to `dim+2` entries.
    pub fn polynomial(&self, alpha: RootOfUnity) -> Vec<i64> {
        (0..self.dim + 2).map(|i| self.phi(alpha, i)).collect()
    }

    pub fn roots(&self) -> impl Iterator<Item = RootOfUnity> + '_ {
        self.coeffs.keys().copied()
    }

    /// `φ̃_α = Σ_{i ≤ dim} φ_{α,i}`, defined for `α ≠ 1`.
    pub fn phi_tilde(&self, alpha: RootOfUnity) -> Result<i64> {
        if alpha.is_one() {
            return Err(Error::BadEigenvalue(alpha));
        }
        Ok((0..=self.dim).map(|i| self.phi(alpha, i)).sum())
    }
}

pub fn p_alpha(ep: &EquivariantPolytope) -> Result<PhiTable> {
    PhiTable::compute(ep)
}

pub fn phi_tilde(ep: &EquivariantPolytope, alpha: RootOfUnity) -> Result<i64> {
    PhiTable::compute(ep)?.phi_tilde(alpha)
}
