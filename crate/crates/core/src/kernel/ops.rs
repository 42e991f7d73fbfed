//! Geometric operations on canonical polytopes.

use std::cmp::Ordering;

use num::{BigInt, Integer, One, ToPrimitive};

use super::linalg;
use super::polytope::{affine_chart, HPolytope, Halfspace, VPolytope};
use super::scalar::{Mode, Scalar};
use super::subset::CoordSubset;
use crate::error::{Error, Result};

pub(crate) fn joint_tol(a: f64, b: f64) -> Result<f64> {
    if a == b {
        Ok(a)
    } else {
        Err(Error::ToleranceMismatch(a, b))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Orthogonal projection onto the coordinate subspace `F(S)`, expressed in
/// the `|S|` coordinates of `S`.
pub fn project<F: Scalar>(p: &VPolytope<F>, s: &CoordSubset) -> Result<VPolytope<F>> {
    check_dim(p.dim(), s.ambient_dim())?;
    let pts = p.vertices().iter().map(|v| s.restrict(v)).collect();
    VPolytope::hull_with_tol(pts, p.tol())
}

/// Preimage of a polytope in `F(S)` under the projection onto `F(S)`: the
/// rows of `q` with zero coefficients outside `S`. The cylinder is unbounded
/// unless `S` is everything.
pub fn lift_cylinder<F: Scalar>(q: &HPolytope<F>, s: &CoordSubset) -> Result<HPolytope<F>> {
    check_dim(q.dim(), s.len())?;
    let rows = q
        .rows()
        .iter()
        .map(|r| Halfspace::new(s.embed(&r.normal, F::zero()), r.offset.clone()))
        .collect();
    let h = HPolytope::from_rows(s.ambient_dim(), rows, q.tol())?;
    Ok(if s.len() == s.ambient_dim() && q.is_bounded() {
        h.reduce()?.0
    } else {
        h.mark_unbounded()
    })
}

/// Section `P ∩ F(S)` in the coordinates of `S`, reduced.
pub fn section<F: Scalar>(p: &HPolytope<F>, s: &CoordSubset) -> Result<HPolytope<F>> {
    check_dim(p.dim(), s.ambient_dim())?;
    let rows = p
        .rows()
        .iter()
        .map(|r| Halfspace::new(s.restrict(&r.normal), r.offset.clone()))
        .collect();
    Ok(HPolytope::from_rows(s.len(), rows, p.tol())?.reduce()?.0)
}

/// Section of `P` with the subspace orthogonal to `normals`, returned as a
/// vertex set in ambient coordinates.
pub fn section_affine<F: Scalar>(p: &HPolytope<F>, normals: &[Vec<F>]) -> Result<VPolytope<F>> {
    let n = p.dim();
    for v in normals {
        check_dim(n, v.len())?;
    }
    let tol = p.tol();
    if linalg::rank(normals, tol) < normals.len() {
        return Err(Error::DependentNormals);
    }
    let basis = linalg::null_space(normals, n, tol);
    if basis.is_empty() {
        return Ok(VPolytope::from_vertices_unchecked(n, vec![vec![F::zero(); n]], tol));
    }
    let m = basis.len();
    // x = Σ y_j basis_j, so ⟨a, x⟩ = Σ y_j ⟨a, basis_j⟩.
    let rows = p
        .rows()
        .iter()
        .map(|r| {
            let a: Vec<F> = basis.iter().map(|b| F::dot(&r.normal, b)).collect();
            Halfspace::new(a, r.offset.clone())
        })
        .collect();
    let inner = HPolytope::from_rows(m, rows, tol)?.to_v()?;
    let vertices = inner
        .vertices()
        .iter()
        .map(|y| {
            (0..n)
                .map(|i| {
                    y.iter()
                        .zip(&basis)
                        .fold(F::zero(), |acc, (yj, b)| acc + yj.clone() * b[i].clone())
                })
                .collect()
        })
        .collect();
    Ok(VPolytope::from_vertices_unchecked(n, vertices, tol))
}

/// Intersection by concatenating rows. Call [`HPolytope::reduce`] on the
/// result to drop redundancy and certify boundedness.
pub fn intersect<F: Scalar>(a: &HPolytope<F>, b: &HPolytope<F>) -> Result<HPolytope<F>> {
    check_dim(a.dim(), b.dim())?;
    let tol = joint_tol(a.tol(), b.tol())?;
    let rows = a.rows().iter().chain(b.rows()).cloned().collect();
    HPolytope::from_rows(a.dim(), rows, tol)
}

/// `conv(A ∪ B)`.
pub fn conv_union<F: Scalar>(a: &VPolytope<F>, b: &VPolytope<F>) -> Result<VPolytope<F>> {
    check_dim(a.dim(), b.dim())?;
    let tol = joint_tol(a.tol(), b.tol())?;
    let pts = a.vertices().iter().chain(b.vertices()).cloned().collect();
    VPolytope::hull_with_tol(pts, tol)
}

/// `A + B`, the hull of all pairwise vertex sums.
pub fn minkowski_sum<F: Scalar>(a: &VPolytope<F>, b: &VPolytope<F>) -> Result<VPolytope<F>> {
    check_dim(a.dim(), b.dim())?;
    let tol = joint_tol(a.tol(), b.tol())?;
    let mut pts = Vec::with_capacity(a.vertices().len() * b.vertices().len());
    for x in a.vertices() {
        for y in b.vertices() {
            pts.push(linalg::add(x, y));
        }
    }
    VPolytope::hull_with_tol(pts, tol)
}

/// `v = coords / den` with `den > 0`, when everything fits in `i128`.
fn small_int_form<F: Scalar>(v: &[F]) -> Option<(Vec<i128>, i128)> {
    let rs: Vec<_> = v.iter().map(F::to_rational).collect();
    let den = rs.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let coords = rs
        .iter()
        .map(|r| (r.numer() * (&den / r.denom())).to_i128())
        .collect::<Option<Vec<_>>>()?;
    Some((coords, den.to_i128()?))
}

fn dot_i128(a: &[i128], b: &[i128]) -> Option<i128> {
    a.iter().zip(b).try_fold(0i128, |acc, (x, y)| acc.checked_add(x.checked_mul(*y)?))
}

/// Exact inclusion over machine integers; `None` on overflow.
fn inclusion_small<F: Scalar>(a: &VPolytope<F>, b: &HPolytope<F>, c: &F) -> Option<bool> {
    let (c_num, c_den) = small_int_form(std::slice::from_ref(c)).map(|(n, d)| (n[0], d))?;
    // Row `n/d · x <= o_num/o_den` scaled by `c`: `(o_den c_den) n·w <= (c_num o_num d) D`.
    let rows = b
        .rows()
        .iter()
        .map(|r| {
            let (n, d) = small_int_form(&r.normal)?;
            let (o, o_den) = small_int_form(std::slice::from_ref(&r.offset))?;
            Some((n, o_den.checked_mul(c_den)?, c_num.checked_mul(o[0])?.checked_mul(d)?))
        })
        .collect::<Option<Vec<_>>>()?;
    for v in a.vertices() {
        let (w, den) = small_int_form(v)?;
        for (n, l, r) in &rows {
            if l.checked_mul(dot_i128(n, &w)?)? > r.checked_mul(den)? {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// Whether every vertex of `a` satisfies every row of `c · b`.
pub fn inclusion<F: Scalar>(a: &VPolytope<F>, b: &HPolytope<F>, c: &F) -> Result<bool> {
    check_dim(a.dim(), b.dim())?;
    let tol = joint_tol(a.tol(), b.tol())?;
    if F::MODE == Mode::Exact {
        if let Some(ok) = inclusion_small(a, b, c) {
            return Ok(ok);
        }
    }
    Ok(a.vertices().iter().all(|v| {
        b.rows().iter().all(|r| {
            let lhs = F::dot(&r.normal, v);
            let rhs = c.clone() * r.offset.clone();
            let slack_tol = if tol == 0.0 {
                0.0
            } else {
                tol * linalg::norm2(&r.normal.iter().map(F::to_f64).collect::<Vec<_>>()).max(1.0)
            };
            (rhs - lhs).sign_tol(slack_tol) != Ordering::Less
        })
    }))
}

/// Gauge of `x` with respect to a body whose rows all have positive offset:
/// the least `t ≥ 0` with `x ∈ t·B`.
pub fn gauge<F: Scalar>(b: &HPolytope<F>, x: &[F]) -> Result<F> {
    let mut best = F::zero();
    for r in b.rows() {
        if r.offset.sign_tol(0.0) != Ordering::Greater {
            return Err(Error::PolarUnbounded);
        }
        let t = F::dot(&r.normal, x) / r.offset.clone();
        if t > best {
            best = t;
        }
    }
    Ok(best)
}

/// Least `c` with `A ⊆ c·B`, for `B` containing the origin in its interior.
pub fn min_scale_factor<F: Scalar>(a: &VPolytope<F>, b: &HPolytope<F>) -> Result<F> {
    check_dim(a.dim(), b.dim())?;
    let mut best = F::zero();
    for v in a.vertices() {
        let g = gauge(b, v)?;
        if g > best {
            best = g;
        }
    }
    Ok(best)
}

/// Whether `A ⊆ c·B` for two vertex descriptions; `B` may be lower-dimensional.
pub fn contains_scaled<F: Scalar>(a: &VPolytope<F>, b: &VPolytope<F>, c: &F) -> Result<bool> {
    check_dim(a.dim(), b.dim())?;
    let tol = joint_tol(a.tol(), b.tol())?;
    let cb = b.scale(c);
    if cb.is_full_dim() {
        return inclusion(a, &cb.to_h()?, &F::one());
    }
    let chart = affine_chart(cb.vertices(), tol);
    if chart.pivots.is_empty() {
        return Ok(a.vertices().iter().all(|v| super::scalar::vec_eq_tol(v, &cb.vertices()[0], tol)));
    }
    // Express points of aff(cB) through the pivot coordinates, then check
    // that every vertex of A reconstructs exactly (i.e. lies in aff(cB)).
    let dirs: Vec<Vec<F>> = cb.vertices()[1..].iter().map(|v| linalg::sub(v, &chart.base)).collect();
    let basis_idx = linalg::independent_rows(&dirs, tol);
    let basis: Vec<Vec<F>> = basis_idx.iter().map(|&i| dirs[i].clone()).collect();
    let square: Vec<Vec<F>> = chart
        .pivots
        .iter()
        .map(|&p| basis.iter().map(|b| b[p].clone()).collect())
        .collect();
    let restrict = |x: &[F]| -> Vec<F> { chart.pivots.iter().map(|&p| x[p].clone()).collect() };
    for v in a.vertices() {
        let d = linalg::sub(v, &chart.base);
        let Some(coef) = linalg::solve(&square, &restrict(&d), tol) else {
            return Ok(false);
        };
        let recon: Vec<F> = (0..v.len())
            .map(|i| {
                coef.iter()
                    .zip(&basis)
                    .fold(F::zero(), |acc, (c, b)| acc + c.clone() * b[i].clone())
            })
            .collect();
        if !super::scalar::vec_eq_tol(&recon, &d, tol.max(0.0) * 10.0) {
            return Ok(false);
        }
    }
    let pa = VPolytope::from_vertices_unchecked(
        chart.pivots.len(),
        a.vertices().iter().map(|v| restrict(v)).collect(),
        tol,
    );
    let pb = VPolytope::hull_with_tol(cb.vertices().iter().map(|v| restrict(v)).collect(), tol)?;
    inclusion(&pa, &pb.to_h()?, &F::one())
}

/// Largest `t` with `t·u ∈ P` (no normalization of `u`).
pub fn ray_extent<F: Scalar>(p: &HPolytope<F>, u: &[F]) -> Result<F> {
    check_dim(p.dim(), u.len())?;
    if u.iter().all(|x| x.is_zero_tol(0.0)) {
        return Err(Error::ZeroDirection);
    }
    let mut best: Option<F> = None;
    for r in p.rows() {
        let au = F::dot(&r.normal, u);
        if au.sign_tol(0.0) == Ordering::Greater {
            let t = r.offset.clone() / au;
            if best.as_ref().is_none_or(|b| t < *b) {
                best = Some(t);
            }
        }
    }
    best.ok_or(Error::Unbounded)
}

/// Radial function `ρ_P(u/‖u‖)`.
pub fn radial<F: Scalar>(p: &HPolytope<F>, u: &[F]) -> Result<f64> {
    let t = ray_extent(p, u)?;
    let norm = linalg::norm2(&u.iter().map(F::to_f64).collect::<Vec<_>>());
    Ok(t.to_f64() * norm)
}

/// Support function `max ⟨u, v⟩` over the vertices.
pub fn support<F: Scalar>(p: &VPolytope<F>, u: &[F]) -> Result<F> {
    check_dim(p.dim(), u.len())?;
    p.vertices()
        .iter()
        .map(|v| F::dot(u, v))
        .reduce(|a, b| if b > a { b } else { a })
        .ok_or(Error::EmptyPointSet)
}

/// Largest Euclidean norm of a point of `P`.
pub fn max_norm<F: Scalar>(p: &VPolytope<F>) -> f64 {
    p.vertices()
        .iter()
        .map(|v| linalg::norm2(&v.iter().map(F::to_f64).collect::<Vec<_>>()))
        .fold(0.0, f64::max)
}

impl<F: Scalar> VPolytope<F> {
    pub fn scale(&self, c: &F) -> VPolytope<F> {
        let vs = self.vertices().iter().map(|v| linalg::scale(v, c)).collect();
        VPolytope::from_vertices_unchecked(self.dim(), vs, self.tol())
    }

    /// Image under the linear map with the given square matrix (rows act on
    /// column vectors). The map must be invertible.
    pub fn linear_image(&self, m: &[Vec<F>]) -> Result<VPolytope<F>> {
        check_dim(self.dim(), m.len())?;
        let vs = self
            .vertices()
            .iter()
            .map(|v| m.iter().map(|row| F::dot(row, v)).collect())
            .collect();
        Ok(VPolytope::from_vertices_unchecked(self.dim(), vs, self.tol()))
    }

    /// Polar body `{x : ⟨x, v⟩ ≤ 1 for every vertex v}` as a minimal H-description.
    pub fn polar(&self) -> Result<HPolytope<F>> {
        if !(self.is_full_dim() && self.is_symmetric()) {
            let h = self.to_h().map_err(|_| Error::PolarUnbounded)?;
            if h.rows().iter().any(|r| r.offset.sign_tol(self.tol()) != Ordering::Greater) {
                return Err(Error::PolarUnbounded);
            }
        }
        let rows = self
            .vertices()
            .iter()
            .map(|v| Halfspace::new(v.clone(), F::one()))
            .collect();
        Ok(HPolytope::from_rows(self.dim(), rows, self.tol())?.certified())
    }
}

impl<F: Scalar> HPolytope<F> {
    pub fn scale(&self, c: &F) -> Result<HPolytope<F>> {
        if c.sign_tol(0.0) != Ordering::Greater {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        let rows = self
            .rows()
            .iter()
            .map(|r| Halfspace::new(r.normal.clone(), r.offset.clone() * c.clone()))
            .collect();
        let h = HPolytope::from_rows(self.dim(), rows, self.tol())?;
        Ok(if self.is_bounded() { h.certified() } else { h })
    }

    /// Polar body: the hull of the row normals scaled to unit offset.
    pub fn polar(&self) -> Result<VPolytope<F>> {
        if self.rows().iter().any(|r| r.offset.sign_tol(self.tol()) != Ordering::Greater) {
            return Err(Error::PolarUnbounded);
        }
        let pts = self
            .rows()
            .iter()
            .map(|r| linalg::scale(&r.normal, &(F::one() / r.offset.clone())))
            .collect();
        VPolytope::hull_with_tol(pts, self.tol())
    }
}
