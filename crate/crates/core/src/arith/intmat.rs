//! Small dense integer matrices: Hermite normal form, integer kernels, determinants.
//!
//! Entries are `i64` at the interface and `i128` internally; the matrices handled
//! here are vertex matrices of low-dimensional lattice polytopes.

/// Extended gcd: returns `(g, x, y)` with `a x + b y = g >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    ext_gcd(a as i128, b as i128).0 as i64
}

/// gcd of all entries (0 for an all-zero slice).
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| gcd(g, x))
}

/// Divide out the content; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = content(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

fn to_wide(m: &[Vec<i64>]) -> Vec<Vec<i128>> {
    m.iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect()
}

fn to_narrow(m: Vec<Vec<i128>>) -> Vec<Vec<i64>> {
    m.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).expect("matrix entry overflowed i64"))
                .collect()
        })
        .collect()
}

/// Row-style Hermite normal form, with the unimodular transform applied to `aux`.
///
/// Rows are combined with unimodular operations so that the result is in row
/// echelon form, every pivot is positive, and entries above a pivot lie in
/// `[0, pivot)`. Zero rows are moved to the bottom. `aux` (if nonempty) must have
/// as many rows as `m` and receives the same row operations.
fn hnf_in_place(m: &mut Vec<Vec<i128>>, aux: &mut Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let track = !aux.is_empty();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // Fold every lower entry of this column into the pivot row.
        for r in pivot_row + 1..rows {
            if m[r][col] == 0 {
                continue;
            }
            let a = m[pivot_row][col];
            let b = m[r][col];
            let (g, x, y) = ext_gcd(a, b);
            let (ag, bg) = (a / g, b / g);
            for c in 0..cols {
                let (u, v) = (m[pivot_row][c], m[r][c]);
                m[pivot_row][c] = x * u + y * v;
                m[r][c] = -bg * u + ag * v;
            }
            if track {
                for c in 0..aux[0].len() {
                    let (u, v) = (aux[pivot_row][c], aux[r][c]);
                    aux[pivot_row][c] = x * u + y * v;
                    aux[r][c] = -bg * u + ag * v;
                }
            }
        }
        if m[pivot_row][col] == 0 {
            continue;
        }
        if m[pivot_row][col] < 0 {
            for c in 0..cols {
                m[pivot_row][c] = -m[pivot_row][c];
            }
            if track {
                for c in 0..aux[0].len() {
                    aux[pivot_row][c] = -aux[pivot_row][c];
                }
            }
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
    }
    // Reduce entries above each pivot.
    for &(pr, pc) in &pivots {
        let piv = m[pr][pc];
        for r in 0..pr {
            let q = m[r][pc].div_euclid(piv);
            if q == 0 {
                continue;
            }
            for c in 0..cols {
                m[r][c] -= q * m[pr][c];
            }
            if track {
                for c in 0..aux[0].len() {
                    aux[r][c] -= q * aux[pr][c];
                }
            }
        }
    }
    pivot_row
}

/// Hermite normal form of the row lattice of `m`, zero rows dropped.
///
/// Two matrices with the same number of columns have the same HNF iff their rows
/// span the same sublattice of Z^cols; for full-row-rank matrices this is the
/// same as `B = U A` for some `U` in GL(rows, Z).
pub fn row_hnf(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut w = to_wide(m);
    let rank = hnf_in_place(&mut w, &mut Vec::new());
    w.truncate(rank);
    to_narrow(w)
}

/// Basis of `{x in Z^cols : m x = 0}` in row HNF.
///
/// Column operations on `m` are row operations on its transpose; the rows of the
/// tracked unimodular transform that hit zero rows span the kernel, and since a
/// unimodular transform is used the basis spans the full (saturated) kernel.
pub fn integer_kernel(m: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let mut t: Vec<Vec<i128>> = (0..cols)
        .map(|c| m.iter().map(|r| r[c] as i128).collect())
        .collect();
    if m.is_empty() {
        t = vec![Vec::new(); cols];
    }
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let rank = if m.is_empty() {
        0
    } else {
        hnf_in_place(&mut t, &mut u)
    };
    let basis: Vec<Vec<i64>> = to_narrow(u.split_off(rank));
    row_hnf(&basis)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = to_wide(m);
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

pub fn rank(m: &[Vec<i64>]) -> usize {
    let mut w = to_wide(m);
    hnf_in_place(&mut w, &mut Vec::new())
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `m v` for a matrix given by rows.
pub fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Normal to the hyperplane spanned by `n - 1` vectors in Z^n, via cofactors.
///
/// The result is orthogonal to every input vector and is zero iff they are
/// linearly dependent.
pub fn cofactor_normal(vectors: &[Vec<i64>]) -> Vec<i64> {
    let n = vectors.len() + 1;
    (0..n)
        .map(|i| {
            let minor: Vec<Vec<i64>> = vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let d = determinant(&minor);
            let d = if i % 2 == 0 { d } else { -d };
            i64::try_from(d).expect("normal vector overflowed i64")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_is_canonical() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let h = row_hnf(&a);
        assert_eq!(h, vec![vec![2, 4, 4], vec![0, 6, 0], vec![0, 0, 12]]);
        // Unimodular row mixing does not change the form.
        let b = vec![
            vec![2 + -6, 4 + 6, 4 + 12],
            vec![-6, 6, 12],
            vec![10 + 2 * 2, -4 + 2 * 4, -16 + 2 * 4],
        ];
        assert_eq!(row_hnf(&b), h);
    }

    #[test]
    fn kernel_of_weighted_simplex() {
        // columns (1,0,0),(0,1,0),(0,0,1),(-3,-1,-1)
        let m = vec![vec![1, 0, 0, -3], vec![0, 1, 0, -1], vec![0, 0, 1, -1]];
        assert_eq!(integer_kernel(&m, 4), vec![vec![3, 1, 1, 1]]);
    }

    #[test]
    fn kernel_of_cross_polytope() {
        let m = vec![vec![1, 0, -1, 0], vec![0, 1, 0, -1]];
        assert_eq!(integer_kernel(&m, 4), vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x = 0 over Z has only the zero solution; x - y = 0 -> (1, 1)
        assert!(integer_kernel(&[vec![2]], 1).is_empty());
        assert_eq!(integer_kernel(&[vec![2, -2]], 2), vec![vec![1, 1]]);
        assert_eq!(integer_kernel(&[], 2), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&[vec![2, 1], vec![1, 3]]), 5);
        assert_eq!(determinant(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]), -1);
        assert_eq!(determinant(&[vec![1, 2], vec![2, 4]]), 0);
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
    }

    #[test]
    fn normals() {
        let n = cofactor_normal(&[vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(n, vec![0, 0, 1]);
        let n = cofactor_normal(&[vec![1, 2, 3], vec![4, 5, 6]]);
        assert_eq!(dot(&n, &[1, 2, 3]), 0);
        assert_eq!(dot(&n, &[4, 5, 6]), 0);
    }
}
