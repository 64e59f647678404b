//! Exact integer linear algebra on small dense matrices.
//!
//! Everything here works row-wise on `Vec<Vec<i64>>` and computes in `i128`,
//! which is ample for the exponent ranges the engine is meant for.

use num_integer::Integer;

pub type IVec = Vec<i64>;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[i64], k: i64) -> IVec {
    a.iter().map(|x| x * k).collect()
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, x| g.gcd(x))
}

/// Divides out the content of `v`; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> IVec {
    let g = gcd_all(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

fn narrow(v: &[i128]) -> IVec {
    v.iter()
        .map(|&x| i64::try_from(x).expect("integer overflow in lattice computation"))
        .collect()
}

fn primitive128(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

/// Rank over ℚ.
pub fn rank(rows: &[IVec]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c] != 0 {
                let (a, b) = (m[r][c], m[i][c]);
                for j in c..ncols {
                    m[i][j] = a * m[i][j] - b * m[r][j];
                }
                primitive128(&mut m[i]);
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Determinant of a square matrix (Bareiss elimination).
pub fn det(rows: &[IVec]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// A basis of the integer kernel `{x ∈ ℤ^ncols : A x = 0}`.
///
/// Column reduction with a unimodular transform; the trailing columns of the
/// transform span the kernel and the result is always saturated.
pub fn integer_kernel(rows: &[IVec], ncols: usize) -> Vec<IVec> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols);
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    // u is stored column-major: u[j] is column j.
    let mut u: Vec<Vec<i128>> = (0..ncols)
        .map(|j| (0..ncols).map(|i| (i == j) as i128).collect())
        .collect();
    let mut piv = 0;
    for i in 0..a.len() {
        if piv == ncols {
            break;
        }
        loop {
            let best = (piv..ncols)
                .filter(|&j| a[i][j] != 0)
                .min_by_key(|&j| a[i][j].abs());
            let Some(j) = best else { break };
            for row in a.iter_mut() {
                row.swap(j, piv);
            }
            u.swap(j, piv);
            let mut clean = true;
            for j in piv + 1..ncols {
                if a[i][j] != 0 {
                    let q = Integer::div_floor(&a[i][j], &a[i][piv]);
                    for row in a.iter_mut() {
                        row[j] -= q * row[piv];
                    }
                    let col = u[piv].clone();
                    for (x, y) in u[j].iter_mut().zip(col) {
                        *x -= q * y;
                    }
                    if a[i][j] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                piv += 1;
                break;
            }
        }
    }
    u[piv..]
        .iter()
        .map(|c| {
            let mut c = c.clone();
            primitive128(&mut c);
            narrow(&c)
        })
        .collect()
}

/// Row Hermite normal form of a matrix; zero rows are dropped.
pub fn hnf_rows(rows: &[IVec]) -> Vec<IVec> {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        loop {
            let best = (r..m.len())
                .filter(|&i| m[i][c] != 0)
                .min_by_key(|&i| m[i][c].abs());
            let Some(p) = best else { break };
            m.swap(r, p);
            let mut clean = true;
            for i in r + 1..m.len() {
                if m[i][c] != 0 {
                    let q = Integer::div_floor(&m[i][c], &m[r][c]);
                    for j in 0..ncols {
                        m[i][j] -= q * m[r][j];
                    }
                    if m[i][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if m[r][c] == 0 {
            continue;
        }
        if m[r][c] < 0 {
            for x in m[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let q = Integer::div_floor(&m[i][c], &m[r][c]);
            if q != 0 {
                for j in 0..ncols {
                    m[i][j] -= q * m[r][j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    m.iter().map(|row| narrow(row)).collect()
}

/// HNF basis of the saturated lattice `span_ℚ(vectors) ∩ ℤ^ncols`.
pub fn saturated_basis(vectors: &[IVec], ncols: usize) -> Vec<IVec> {
    let nonzero: Vec<IVec> = vectors
        .iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let perp = integer_kernel(&nonzero, ncols);
    let basis = if perp.is_empty() {
        (0..ncols)
            .map(|i| (0..ncols).map(|j| (i == j) as i64).collect())
            .collect()
    } else {
        integer_kernel(&perp, ncols)
    };
    hnf_rows(&basis)
}

/// Coordinates of `v` in a row-HNF basis, or `None` if `v` is not in its
/// integer span.
pub fn coordinates(hnf_basis: &[IVec], v: &[i64]) -> Option<IVec> {
    let mut rest: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    let mut out = Vec::with_capacity(hnf_basis.len());
    for row in hnf_basis {
        let c = row.iter().position(|&x| x != 0)?;
        let p = row[c] as i128;
        if rest[c] % p != 0 {
            return None;
        }
        let k = rest[c] / p;
        for (x, &y) in rest.iter_mut().zip(row) {
            *x -= k * y as i128;
        }
        out.push(k);
    }
    if rest.iter().any(|&x| x != 0) {
        return None;
    }
    Some(narrow(&out))
}

/// Linear combination `Σ coeffs[i]·basis[i]`.
pub fn combine(basis: &[IVec], coeffs: &[i64], ncols: usize) -> IVec {
    let mut out = vec![0i64; ncols];
    for (row, &k) in basis.iter().zip(coeffs) {
        for (x, &y) in out.iter_mut().zip(row) {
            *x += k * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kernel_of_plane() {
        let k = integer_kernel(&[vec![3, 2]], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(dot(&k[0], &[3, 2]), 0);
        assert_eq!(gcd_all(&k[0]), 1);
    }

    #[test]
    fn saturation_of_diagonal() {
        // span of (2,2) meets ℤ² in ℤ·(1,1)
        let b = saturated_basis(&[vec![2, 2]], 2);
        assert_eq!(b, vec![vec![1, 1]]);
        assert_eq!(coordinates(&b, &[2, 2]), Some(vec![2]));
        assert_eq!(coordinates(&b, &[1, 0]), None);
        let b = saturated_basis(&[vec![7, 0, 0], vec![2, 2, 2]], 3);
        assert_eq!(b, vec![vec![1, 0, 0], vec![0, 1, 1]]);
    }

    #[test]
    fn full_rank_saturates_to_identity() {
        let b = saturated_basis(&[vec![2, 0], vec![0, 3]], 2);
        assert_eq!(b, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&[vec![2, 0], vec![0, 3]]), 6);
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), -3);
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), 0);
    }

    proptest! {
        #[test]
        fn kernel_vectors_annihilate(rows in prop::collection::vec(prop::collection::vec(-6i64..7, 4), 1..4)) {
            let k = integer_kernel(&rows, 4);
            prop_assert_eq!(k.len() + rank(&rows), 4);
            for v in &k {
                for r in &rows {
                    prop_assert_eq!(dot(r, v), 0);
                }
            }
        }

        #[test]
        fn saturated_basis_contains_inputs(rows in prop::collection::vec(prop::collection::vec(-6i64..7, 3), 1..3)) {
            let b = saturated_basis(&rows, 3);
            prop_assert_eq!(b.len(), rank(&rows));
            for r in &rows {
                let c = coordinates(&b, r);
                prop_assert!(c.is_some());
                prop_assert_eq!(combine(&b, &c.unwrap(), 3), r.clone());
            }
        }
    }
}
