//! Dense Gaussian elimination over [`Scalar`], enough for desk-scale
//! polytope work: ranks, independent row selection, null spaces, solves.

use std::cmp::Ordering;

use super::scalar::Scalar;

pub type Matrix<F> = Vec<Vec<F>>;

fn pivot_row<F: Scalar>(m: &Matrix<F>, col: usize, from: usize, tol: f64) -> Option<usize> {
    let mut best: Option<(usize, F)> = None;
    for (r, row) in m.iter().enumerate().skip(from) {
        let a = row[col].abs();
        if a.is_zero_tol(tol) {
            continue;
        }
        match &best {
            Some((_, b)) if a.cmp_tol(b, 0.0) != Ordering::Greater => {}
            _ => best = Some((r, a)),
        }
    }
    best.map(|(r, _)| r)
}

/// Reduced row echelon form. Returns the reduced matrix and its pivot columns.
pub fn rref<F: Scalar>(mut m: Matrix<F>, tol: f64) -> (Matrix<F>, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pivot_row(&m, c, r, tol) else {
            for row in m.iter_mut().skip(r) {
                row[c] = F::zero();
            }
            continue;
        };
        m.swap(r, p);
        let inv = F::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero_tol(0.0) {
                continue;
            }
            let factor = m[i][c].clone();
            for j in 0..cols {
                let v = m[r][j].clone();
                if !v.is_zero_tol(0.0) {
                    m[i][j] = m[i][j].clone() - factor.clone() * v;
                }
            }
            m[i][c] = F::zero();
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank<F: Scalar>(m: &[Vec<F>], tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    rref(m.to_vec(), tol).1.len()
}

/// Greedily selects a maximal set of linearly independent rows, preferring
/// earlier rows.
pub fn independent_rows<F: Scalar>(m: &[Vec<F>], tol: f64) -> Vec<usize> {
    let mut chosen = Vec::new();
    // Echelon basis of the span of the chosen rows, each with a leading pivot.
    let mut basis: Vec<(usize, Vec<F>)> = Vec::new();
    for (i, row) in m.iter().enumerate() {
        let mut v = row.clone();
        for (p, b) in &basis {
            if v[*p].is_zero_tol(0.0) {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(b) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        // Largest remaining entry decides independence.
        let Some(p) = (0..v.len())
            .filter(|&j| !v[j].is_zero_tol(tol))
            .max_by(|&a, &b| v[a].abs().cmp_tol(&v[b].abs(), 0.0))
        else {
            continue;
        };
        let inv = F::one() / v[p].clone();
        for x in v.iter_mut() {
            *x = x.clone() * inv.clone();
        }
        // Keep the basis reduced so later eliminations stay independent.
        for (_, b) in basis.iter_mut() {
            if b[p].is_zero_tol(0.0) {
                continue;
            }
            let f = b[p].clone();
            for (x, y) in b.iter_mut().zip(&v) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        basis.push((p, v));
        chosen.push(i);
    }
    chosen
}

/// Basis of `{x : row · x = 0 for every row}` in dimension `n`.
pub fn null_space<F: Scalar>(m: &[Vec<F>], n: usize, tol: f64) -> Vec<Vec<F>> {
    if m.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
            .collect();
    }
    let (r, pivots) = rref(m.to_vec(), tol);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); n];
            v[f] = F::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[row][f].clone();
            }
            v
        })
        .collect()
}

/// Solves the square system `a x = b`; `None` when singular.
pub fn solve<F: Scalar>(a: &[Vec<F>], b: &[F], tol: f64) -> Option<Vec<F>> {
    let n = a.len();
    let aug: Matrix<F> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(aug, tol);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(r.into_iter().map(|row| row[n].clone()).collect())
}

/// Inverse of a square matrix; `None` when singular.
pub fn inverse<F: Scalar>(a: &[Vec<F>], tol: f64) -> Option<Matrix<F>> {
    let n = a.len();
    let aug: Matrix<F> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(aug, tol);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Determinant by elimination with partial pivoting.
pub fn det<F: Scalar>(a: &[Vec<F>]) -> F {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = F::one();
    for c in 0..n {
        let Some(p) = pivot_row(&m, c, c, 0.0) else {
            return F::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c].clone();
        d = d * piv.clone();
        for i in c + 1..n {
            let f = m[i][c].clone() / piv.clone();
            for j in c..n {
                m[i][j] = m[i][j].clone() - f.clone() * m[c][j].clone();
            }
        }
    }
    d
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn sub<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale<F: Scalar>(a: &[F], s: &F) -> Vec<F> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}
