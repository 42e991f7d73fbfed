//! Double description method for pointed polyhedral cones.
//!
//! Given rows `a_1, …, a_m` spanning `R^d`, computes the extreme rays of the
//! cone `{y : ⟨a_i, y⟩ ≥ 0 for all i}`. Constraints are added one at a time;
//! after each step the ray set is exactly the set of extreme rays of the cone
//! cut out by the rows processed so far. Adjacency of two rays is decided
//! combinatorially from their zero sets.
//!
//! Exact input is scaled to primitive integer rows and enumerated over `i128`,
//! falling back to `BigInt` on overflow. Floating-point rays are re-solved
//! from their tight rows after every combination.

use std::cmp::Ordering;

use fixedbitset::FixedBitSet;
use num::{BigInt, Integer, One, ToPrimitive, Zero};

use super::linalg;
use super::scalar::{Mode, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DdError {
    /// The rows do not span the ambient space (the cone has a lineality space).
    NotPointed,
}

struct Ray<N> {
    coords: Vec<N>,
    zeros: FixedBitSet,
}

/// Arithmetic used inside the enumeration. `None` signals overflow.
trait DdNum: Clone + Sized {
    fn dot(a: &[Self], b: &[Self]) -> Option<Self>;
    fn sign(&self, tol: f64) -> Ordering;
    /// `vp * xn - vn * xp` with `vp > 0 > vn`.
    fn combine(vp: &Self, xn: &[Self], vn: &Self, xp: &[Self]) -> Option<Vec<Self>>;
    fn normalize(v: &mut [Self]);
    fn polish(_coords: &mut [Self], _zeros: &FixedBitSet, _rows: &[Vec<Self>], _d: usize, _tol: f64) {}
}

impl DdNum for f64 {
    fn dot(a: &[Self], b: &[Self]) -> Option<Self> {
        Some(a.iter().zip(b).map(|(x, y)| x * y).sum())
    }

    fn sign(&self, tol: f64) -> Ordering {
        Scalar::sign_tol(self, tol)
    }

    fn combine(vp: &Self, xn: &[Self], vn: &Self, xp: &[Self]) -> Option<Vec<Self>> {
        Some(xn.iter().zip(xp).map(|(a, b)| vp * a - vn * b).collect())
    }

    fn normalize(v: &mut [Self]) {
        <f64 as Scalar>::normalize_ray(v)
    }

    fn polish(coords: &mut [Self], zeros: &FixedBitSet, rows: &[Vec<Self>], d: usize, tol: f64) {
        let tight: Vec<Vec<f64>> = zeros.ones().map(|i| rows[i].clone()).collect();
        if let [v] = linalg::null_space(&tight, d, tol).as_slice() {
            let len = linalg::norm2(v);
            let s = if <f64 as Scalar>::dot(v, coords) < 0.0 { -1.0 / len } else { 1.0 / len };
            for (c, x) in coords.iter_mut().zip(v) {
                *c = x * s;
            }
        }
    }
}

impl DdNum for i128 {
    fn dot(a: &[Self], b: &[Self]) -> Option<Self> {
        a.iter()
            .zip(b)
            .try_fold(0i128, |acc, (x, y)| acc.checked_add(x.checked_mul(*y)?))
    }

    fn sign(&self, _tol: f64) -> Ordering {
        self.cmp(&0)
    }

    fn combine(vp: &Self, xn: &[Self], vn: &Self, xp: &[Self]) -> Option<Vec<Self>> {
        xn.iter()
            .zip(xp)
            .map(|(a, b)| vp.checked_mul(*a)?.checked_sub(vn.checked_mul(*b)?))
            .collect()
    }

    fn normalize(v: &mut [Self]) {
        let g = v.iter().fold(0i128, |g, x| g.gcd(x));
        if g > 1 {
            v.iter_mut().for_each(|x| *x /= g);
        }
    }
}

impl DdNum for BigInt {
    fn dot(a: &[Self], b: &[Self]) -> Option<Self> {
        Some(a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y))
    }

    fn sign(&self, _tol: f64) -> Ordering {
        self.cmp(&BigInt::zero())
    }

    fn combine(vp: &Self, xn: &[Self], vn: &Self, xp: &[Self]) -> Option<Vec<Self>> {
        Some(xn.iter().zip(xp).map(|(a, b)| vp * a - vn * b).collect())
    }

    fn normalize(v: &mut [Self]) {
        let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g > BigInt::one() {
            v.iter_mut().for_each(|x| *x /= &g);
        }
    }
}

#[cfg(test)]
fn extreme_rays<F: Scalar>(rows: &[Vec<F>], tol: f64) -> Result<Vec<Vec<F>>, DdError> {
    Ok(extreme_rays_with_zeros(rows, tol)?.into_iter().map(|(r, _)| r).collect())
}

/// Extreme rays together with the set of input rows each one is tight on.
pub(crate) fn extreme_rays_with_zeros<F: Scalar>(rows: &[Vec<F>], tol: f64) -> Result<Vec<(Vec<F>, FixedBitSet)>, DdError> {
    let d = match rows.first() {
        Some(r) => r.len(),
        None => return Err(DdError::NotPointed),
    };
    let total = rows.len();
    let keep: Vec<usize> = (0..total).filter(|&i| rows[i].iter().any(|x| !x.is_zero_tol(tol))).collect();
    let rows: Vec<Vec<F>> = keep
        .iter()
        .map(|&i| {
            let mut r = rows[i].clone();
            F::normalize_ray(&mut r);
            r
        })
        .collect();
    // Zero rows are tight everywhere.
    let remap = |z: FixedBitSet| {
        let mut out = FixedBitSet::with_capacity(total);
        out.insert_range(..);
        for (j, &i) in keep.iter().enumerate() {
            if !z.contains(j) {
                out.set(i, false);
            }
        }
        out
    };

    let basis = linalg::independent_rows(&rows, tol);
    if basis.len() < d {
        return Err(DdError::NotPointed);
    }
    let sub: Vec<Vec<F>> = basis.iter().map(|&i| rows[i].clone()).collect();
    let inv = linalg::inverse(&sub, tol).ok_or(DdError::NotPointed)?;
    let init: Vec<Vec<F>> = (0..d)
        .map(|j| {
            let mut coords: Vec<F> = inv.iter().map(|row| row[j].clone()).collect();
            F::normalize_ray(&mut coords);
            coords
        })
        .collect();

    if F::MODE == Mode::Approx {
        let to = |v: &Vec<F>| v.iter().map(F::to_f64).collect::<Vec<f64>>();
        let rows: Vec<Vec<f64>> = rows.iter().map(to).collect();
        let init: Vec<Vec<f64>> = init.iter().map(to).collect();
        let rays = enumerate(&rows, init, &basis, d, tol).expect("floats do not overflow");
        return Ok(rays
            .into_iter()
            .map(|r| (r.coords.iter().map(|x| F::from_f64(*x)).collect(), remap(r.zeros)))
            .collect());
    }

    // Rows and initial rays are primitive integer vectors after normalization.
    let big = |v: &Vec<F>| v.iter().map(|x| x.to_rational().to_integer()).collect::<Vec<BigInt>>();
    let rows: Vec<Vec<BigInt>> = rows.iter().map(big).collect();
    let init: Vec<Vec<BigInt>> = init.iter().map(big).collect();
    let back = |rays: Vec<Ray<BigInt>>| {
        rays.into_iter()
            .map(|r| {
                let coords = r.coords.into_iter().map(|x| F::from_rational(&Rational::from_integer(x))).collect();
                (coords, remap(r.zeros))
            })
            .collect()
    };
    let small = |v: &Vec<BigInt>| v.iter().map(|x| x.to_i128()).collect::<Option<Vec<i128>>>();
    if let (Some(r), Some(i)) = (
        rows.iter().map(small).collect::<Option<Vec<_>>>(),
        init.iter().map(small).collect::<Option<Vec<_>>>(),
    ) {
        if let Some(rays) = enumerate(&r, i, &basis, d, 0.0) {
            return Ok(back(
                rays.into_iter()
                    .map(|r| Ray {
                        coords: r.coords.into_iter().map(BigInt::from).collect(),
                        zeros: r.zeros,
                    })
                    .collect(),
            ));
        }
    }
    let rays = enumerate(&rows, init, &basis, d, 0.0).expect("big integers do not overflow");
    Ok(back(rays))
}

fn enumerate<N: DdNum>(rows: &[Vec<N>], init: Vec<Vec<N>>, basis: &[usize], d: usize, tol: f64) -> Option<Vec<Ray<N>>> {
    let m = rows.len();
    let mut rays: Vec<Ray<N>> = init
        .into_iter()
        .enumerate()
        .map(|(j, coords)| {
            let mut zeros = FixedBitSet::with_capacity(m);
            for (k, &b) in basis.iter().enumerate() {
                if k != j {
                    zeros.insert(b);
                }
            }
            Ray { coords, zeros }
        })
        .collect();

    let mut processed = FixedBitSet::with_capacity(m);
    for &b in basis {
        processed.insert(b);
    }
    for i in 0..m {
        if processed.contains(i) {
            continue;
        }
        processed.insert(i);
        rays = add_constraint(rays, rows, i, d, tol)?;
        if rays.is_empty() {
            break;
        }
    }
    Some(rays)
}

fn add_constraint<N: DdNum>(rays: Vec<Ray<N>>, rows: &[Vec<N>], index: usize, d: usize, tol: f64) -> Option<Vec<Ray<N>>> {
    let row = &rows[index];
    let values: Vec<N> = rays.iter().map(|r| N::dot(row, &r.coords)).collect::<Option<_>>()?;
    let signs: Vec<Ordering> = values.iter().map(|v| v.sign(tol)).collect();
    if !signs.contains(&Ordering::Less) {
        let mut rays = rays;
        for (r, s) in rays.iter_mut().zip(&signs) {
            if *s == Ordering::Equal {
                r.zeros.insert(index);
            }
        }
        return Some(rays);
    }

    let pos: Vec<usize> = (0..rays.len()).filter(|&k| signs[k] == Ordering::Greater).collect();
    let neg: Vec<usize> = (0..rays.len()).filter(|&k| signs[k] == Ordering::Less).collect();
    let counts: Vec<usize> = rays.iter().map(|r| r.zeros.count_ones(..)).collect();

    let mut created = Vec::new();
    for &p in &pos {
        for &n in &neg {
            let mut common = rays[p].zeros.clone();
            common.intersect_with(&rays[n].zeros);
            let size = common.count_ones(..);
            if size + 2 < d {
                continue;
            }
            let adjacent = rays
                .iter()
                .enumerate()
                .all(|(k, r)| k == p || k == n || counts[k] < size || !r.zeros.is_superset(&common));
            if !adjacent {
                continue;
            }
            let mut coords = N::combine(&values[p], &rays[n].coords, &values[n], &rays[p].coords)?;
            common.insert(index);
            N::polish(&mut coords, &common, rows, d, tol);
            N::normalize(&mut coords);
            created.push(Ray { coords, zeros: common });
        }
    }

    let mut next: Vec<Ray<N>> = rays
        .into_iter()
        .zip(signs)
        .filter_map(|(mut r, s)| match s {
            Ordering::Greater => Some(r),
            Ordering::Equal => {
                r.zeros.insert(index);
                Some(r)
            }
            Ordering::Less => None,
        })
        .collect();
    next.extend(created);
    Some(next)
}
