//! Vertex and halfspace representations, and the conversions between them.
//!
//! Both representations are kept canonical: redundant vertices and rows are
//! removed on construction and the remaining ones are sorted
//! lexicographically, so two polytopes describe the same set exactly when
//! their lists agree (up to tolerance in approx mode).

use std::cmp::Ordering;

use fixedbitset::FixedBitSet;

use super::dd::{self, DdError};
use super::linalg;
use super::scalar::{lex_cmp_tol, vec_eq_tol, Mode, Scalar, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Tolerance used when none is given: zero for exact arithmetic.
pub fn default_tol<F: Scalar>() -> f64 {
    match F::MODE {
        Mode::Exact => 0.0,
        Mode::Approx => DEFAULT_TOL,
    }
}

/// The closed halfspace `⟨normal, x⟩ ≤ offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<F> {
    pub normal: Vec<F>,
    pub offset: F,
}

impl<F: Scalar> Halfspace<F> {
    pub fn new(normal: Vec<F>, offset: F) -> Self {
        Self { normal, offset }
    }

    /// Scales the row so that `|offset| = 1`, or, for rows through the
    /// origin, so that the normal has canonical size.
    pub(crate) fn normalized(mut self) -> Self {
        if self.offset.is_zero_tol(0.0) {
            F::normalize_ray(&mut self.normal);
            self.offset = F::zero();
        } else {
            let s = F::one() / self.offset.abs();
            self.normal = linalg::scale(&self.normal, &s);
            self.offset = self.offset.clone() * s;
        }
        self
    }

    /// Slack `offset - ⟨normal, x⟩`; nonnegative iff `x` satisfies the row.
    pub fn slack(&self, x: &[F]) -> F {
        self.offset.clone() - F::dot(&self.normal, x)
    }

    /// Absolute tolerance for tests against this row.
    pub(crate) fn scaled_tol(&self, tol: f64) -> f64 {
        if tol == 0.0 {
            return 0.0;
        }
        let m = self
            .normal
            .iter()
            .fold(self.offset.abs().to_f64(), |m, x| m.max(x.abs().to_f64()));
        tol * m.max(1.0)
    }

    pub fn is_tight(&self, x: &[F], tol: f64) -> bool {
        self.slack(x).is_zero_tol(self.scaled_tol(tol))
    }

    pub fn contains(&self, x: &[F], tol: f64) -> bool {
        self.slack(x).sign_tol(self.scaled_tol(tol)) != Ordering::Less
    }

    fn cmp_tol(&self, other: &Self, tol: f64) -> Ordering {
        lex_cmp_tol(&self.normal, &other.normal, tol).then_with(|| self.offset.cmp_tol(&other.offset, tol))
    }
}

/// A polytope given as the convex hull of its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope<F> {
    dim: usize,
    vertices: Vec<Vec<F>>,
    symmetric: bool,
    full_dim: bool,
    tol: f64,
}

/// A polyhedron given as an intersection of halfspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope<F> {
    dim: usize,
    rows: Vec<Halfspace<F>>,
    symmetric: bool,
    bounded: bool,
    tol: f64,
}

fn sort_dedup_points<F: Scalar>(mut pts: Vec<Vec<F>>, tol: f64) -> Vec<Vec<F>> {
    pts.sort_by(|a, b| lex_cmp_tol(a, b, 0.0));
    pts.dedup_by(|a, b| vec_eq_tol(a, b, tol));
    if tol > 0.0 {
        // Sorting under a tolerance is not transitive; catch stragglers.
        let mut out: Vec<Vec<F>> = Vec::with_capacity(pts.len());
        for p in pts {
            if !out.iter().any(|q| vec_eq_tol(q, &p, tol)) {
                out.push(p);
            }
        }
        out
    } else {
        pts
    }
}

pub(crate) fn contains_point<F: Scalar>(set: &[Vec<F>], p: &[F], tol: f64) -> bool {
    if tol == 0.0 {
        set.binary_search_by(|q| lex_cmp_tol(q, p, 0.0)).is_ok()
    } else {
        set.iter().any(|q| vec_eq_tol(q, p, tol))
    }
}

fn is_centrally_symmetric<F: Scalar>(pts: &[Vec<F>], tol: f64) -> bool {
    pts.iter().all(|p| {
        let neg: Vec<F> = p.iter().map(|x| -x.clone()).collect();
        contains_point(pts, &neg, tol)
    })
}

/// Affine hull data of a point set: a base point and the coordinates on
/// which projection is injective along the affine hull.
pub(crate) struct AffineChart<F> {
    pub base: Vec<F>,
    pub pivots: Vec<usize>,
}

pub(crate) fn affine_chart<F: Scalar>(points: &[Vec<F>], tol: f64) -> AffineChart<F> {
    let base = points[0].clone();
    let diffs: Vec<Vec<F>> = points[1..].iter().map(|p| linalg::sub(p, &base)).collect();
    let pivots = if diffs.is_empty() { Vec::new() } else { linalg::rref(diffs, tol).1 };
    AffineChart { base, pivots }
}

/// Facets of a full-dimensional point set, as normalized halfspaces, with
/// the indices of the points on each facet.
fn facets_full_dim<F: Scalar>(points: &[Vec<F>], tol: f64) -> Result<Vec<(Halfspace<F>, FixedBitSet)>> {
    let rows: Vec<Vec<F>> = points
        .iter()
        .map(|p| {
            let mut r = Vec::with_capacity(p.len() + 1);
            r.push(F::one());
            r.extend(p.iter().cloned());
            r
        })
        .collect();
    let rays = dd::extreme_rays_with_zeros(&rows, tol).map_err(|DdError::NotPointed| Error::LowerDimensional {
        dim: points[0].len(),
        found: linalg::rank(&rows, tol).saturating_sub(1),
    })?;
    Ok(rays
        .into_iter()
        .map(|(r, zeros)| {
            let normal = r[1..].iter().map(|x| -x.clone()).collect();
            (Halfspace::new(normal, r[0].clone()).normalized(), zeros)
        })
        .collect())
}

/// A distinct input point is a vertex exactly when the facets through it
/// share no other input point.
fn vertex_mask<F>(n_points: usize, facets: &[(Halfspace<F>, FixedBitSet)]) -> Vec<bool> {
    let mut common: Vec<Option<FixedBitSet>> = vec![None; n_points];
    for (_, zeros) in facets {
        for i in zeros.ones() {
            match &mut common[i] {
                Some(c) => c.intersect_with(zeros),
                slot => *slot = Some(zeros.clone()),
            }
        }
    }
    common
        .into_iter()
        .map(|c| c.is_some_and(|c| c.count_ones(..) == 1))
        .collect()
}

impl<F: Scalar> VPolytope<F> {
    /// Convex hull of a point set, reduced to its vertices.
    pub fn hull(points: Vec<Vec<F>>) -> Result<Self> {
        Self::hull_with_tol(points, default_tol::<F>())
    }

    pub fn hull_with_tol(points: Vec<Vec<F>>, tol: f64) -> Result<Self> {
        Ok(Self::hull_with_facets(points, tol)?.0)
    }

    /// Convex hull together with its facets when it is full-dimensional.
    pub(crate) fn hull_with_facets(points: Vec<Vec<F>>, tol: f64) -> Result<(Self, Option<HPolytope<F>>)> {
        let dim = points.first().ok_or(Error::EmptyPointSet)?.len();
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        let points = sort_dedup_points(points, tol);
        let chart = affine_chart(&points, tol);
        let r = chart.pivots.len();
        let mut h = None;
        let vertices = if r == 0 {
            points
        } else if r == dim {
            let facets = facets_full_dim(&points, tol)?;
            let mask = vertex_mask(points.len(), &facets);
            let rows = facets.into_iter().map(|(f, _)| f).collect();
            h = Some(HPolytope::from_canonical(dim, rows, true, tol));
            points.into_iter().zip(mask).filter(|(_, v)| *v).map(|(p, _)| p).collect()
        } else {
            let proj: Vec<Vec<F>> = points
                .iter()
                .map(|p| chart.pivots.iter().map(|&i| p[i].clone()).collect())
                .collect();
            let facets = facets_full_dim(&proj, tol)?;
            let mask = vertex_mask(proj.len(), &facets);
            points.into_iter().zip(mask).filter(|(_, v)| *v).map(|(p, _)| p).collect()
        };
        Ok((Self::from_canonical(dim, vertices, r == dim, tol), h))
    }

    /// Wraps a list already known to consist of distinct vertices.
    pub(crate) fn from_vertices_unchecked(dim: usize, vertices: Vec<Vec<F>>, tol: f64) -> Self {
        let vertices = sort_dedup_points(vertices, tol);
        let full_dim = !vertices.is_empty() && affine_chart(&vertices, tol).pivots.len() == dim;
        Self::from_canonical(dim, vertices, full_dim, tol)
    }

    fn from_canonical(dim: usize, vertices: Vec<Vec<F>>, full_dim: bool, tol: f64) -> Self {
        let symmetric = is_centrally_symmetric(&vertices, tol);
        Self {
            dim,
            vertices,
            symmetric,
            full_dim,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<F>] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec<F>> {
        self.vertices
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_full_dim(&self) -> bool {
        self.full_dim
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn mode(&self) -> Mode {
        F::MODE
    }

    /// Same point set under a different comparison tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Facet description (minimal, canonical).
    pub fn to_h(&self) -> Result<HPolytope<F>> {
        if !self.full_dim {
            let found = if self.vertices.is_empty() {
                0
            } else {
                affine_chart(&self.vertices, self.tol).pivots.len()
            };
            return Err(Error::LowerDimensional { dim: self.dim, found });
        }
        let rows = facets_full_dim(&self.vertices, self.tol)?.into_iter().map(|(h, _)| h).collect();
        Ok(HPolytope::from_canonical(self.dim, rows, true, self.tol))
    }

    /// Vertex-set equality (exact in exact mode, within tolerance otherwise).
    pub fn same_set(&self, other: &Self) -> bool {
        let tol = self.tol.max(other.tol);
        self.dim == other.dim
            && self.vertices.len() == other.vertices.len()
            && self.vertices.iter().all(|v| contains_point(&other.vertices, v, tol))
    }

    /// Converts the coordinates to another number type.
    pub fn convert<G: Scalar>(&self, tol: f64) -> VPolytope<G> {
        let vertices = self.vertices.iter().map(|v| super::scalar::convert_vec(v)).collect();
        VPolytope::from_vertices_unchecked(self.dim, vertices, tol)
    }
}

impl<F: Scalar> HPolytope<F> {
    /// Intersection of the given halfspaces, reduced to its facets.
    ///
    /// The set must be bounded and full-dimensional.
    pub fn new(dim: usize, rows: Vec<Halfspace<F>>) -> Result<Self> {
        Self::new_with_tol(dim, rows, default_tol::<F>())
    }

    pub fn new_with_tol(dim: usize, rows: Vec<Halfspace<F>>, tol: f64) -> Result<Self> {
        Ok(Self::from_rows(dim, rows, tol)?.reduce()?.0)
    }

    /// Normalizes and sorts rows without removing redundant ones. The result
    /// is not certified bounded.
    pub fn from_rows(dim: usize, rows: Vec<Halfspace<F>>, tol: f64) -> Result<Self> {
        let mut kept = Vec::with_capacity(rows.len());
        for r in rows {
            if r.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.normal.len(),
                });
            }
            if r.normal.iter().all(|x| x.is_zero_tol(tol)) {
                if r.offset.sign_tol(tol) == Ordering::Less {
                    return Err(Error::Infeasible);
                }
                continue;
            }
            kept.push(r.normalized());
        }
        let mut h = Self::from_canonical(dim, kept, false, tol);
        h.bounded = false;
        Ok(h)
    }

    fn from_canonical(dim: usize, mut rows: Vec<Halfspace<F>>, bounded: bool, tol: f64) -> Self {
        rows.sort_by(|a, b| a.cmp_tol(b, 0.0));
        rows.dedup_by(|a, b| a.cmp_tol(b, tol) == Ordering::Equal);
        if tol > 0.0 {
            let mut out: Vec<Halfspace<F>> = Vec::with_capacity(rows.len());
            for r in rows {
                if !out.iter().any(|s| s.cmp_tol(&r, tol) == Ordering::Equal) {
                    out.push(r);
                }
            }
            rows = out;
        }
        let symmetric = rows.iter().all(|r| {
            r.offset.sign_tol(tol) == Ordering::Greater
                && rows.iter().any(|s| {
                    s.offset.cmp_tol(&r.offset, tol) == Ordering::Equal
                        && s.normal.iter().zip(&r.normal).all(|(x, y)| x.cmp_tol(&-y.clone(), tol) == Ordering::Equal)
                })
        });
        Self {
            dim,
            rows,
            symmetric,
            bounded,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Halfspace<F>] {
        &self.rows
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Whether boundedness has been certified (true after reduction).
    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn mode(&self) -> Mode {
        F::MODE
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn contains(&self, x: &[F]) -> bool {
        self.rows.iter().all(|r| r.contains(x, self.tol))
    }

    /// Vertex enumeration.
    pub fn to_v(&self) -> Result<VPolytope<F>> {
        let (vertices, _) = self.vertices_with_rows()?;
        Ok(VPolytope::from_vertices_unchecked(self.dim, vertices, self.tol))
    }

    /// Vertices, each with the set of rows tight at it.
    fn vertices_with_rows(&self) -> Result<(Vec<Vec<F>>, Vec<FixedBitSet>)> {
        let mut rows = Vec::with_capacity(self.rows.len() + 1);
        let mut t = vec![F::zero(); self.dim + 1];
        t[0] = F::one();
        rows.push(t);
        for r in &self.rows {
            let mut row = Vec::with_capacity(self.dim + 1);
            row.push(r.offset.clone());
            row.extend(r.normal.iter().map(|x| -x.clone()));
            rows.push(row);
        }
        let rays = dd::extreme_rays_with_zeros(&rows, self.tol).map_err(|DdError::NotPointed| Error::Unbounded)?;
        if rays.is_empty() {
            return Err(Error::Infeasible);
        }
        let mut vertices = Vec::with_capacity(rays.len());
        let mut tight = Vec::with_capacity(rays.len());
        for (r, zeros) in rays {
            if r[0].is_zero_tol(self.tol) {
                return Err(Error::Unbounded);
            }
            let t = r[0].clone();
            vertices.push(r[1..].iter().map(|x| x.clone() / t.clone()).collect());
            let mut z = FixedBitSet::with_capacity(self.rows.len());
            z.extend(zeros.ones().filter(|&i| i > 0).map(|i| i - 1));
            tight.push(z);
        }
        Ok((vertices, tight))
    }

    /// Drops redundant rows. Returns the minimal description together with
    /// the vertex set computed along the way.
    ///
    /// A row is a facet exactly when the vertices on it form a nonempty set
    /// not strictly contained in the vertex set of another row.
    pub fn reduce(&self) -> Result<(HPolytope<F>, VPolytope<F>)> {
        let (vertices, tight) = self.vertices_with_rows()?;
        let mut on_row = vec![FixedBitSet::with_capacity(vertices.len()); self.rows.len()];
        for (v, z) in tight.iter().enumerate() {
            for j in z.ones() {
                on_row[j].insert(v);
            }
        }
        let v = VPolytope::from_vertices_unchecked(self.dim, vertices, self.tol);
        if !v.is_full_dim() {
            return Err(Error::LowerDimensional {
                dim: self.dim,
                found: affine_chart(v.vertices(), self.tol).pivots.len(),
            });
        }
        let counts: Vec<usize> = on_row.iter().map(|z| z.count_ones(..)).collect();
        let rows: Vec<Halfspace<F>> = (0..self.rows.len())
            .filter(|&j| {
                counts[j] >= self.dim
                    && !(0..self.rows.len()).any(|k| {
                        k != j
                            && counts[k] >= counts[j]
                            && on_row[k].is_superset(&on_row[j])
                            && (counts[k] > counts[j] || k < j)
                    })
            })
            .map(|j| self.rows[j].clone())
            .collect();
        Ok((HPolytope::from_canonical(self.dim, rows, true, self.tol), v))
    }

    /// Row-set equality of two canonical descriptions.
    pub fn same_rows(&self, other: &Self) -> bool {
        let tol = self.tol.max(other.tol);
        self.dim == other.dim
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .all(|r| other.rows.iter().any(|s| r.cmp_tol(s, tol) == Ordering::Equal))
    }

    pub fn convert<G: Scalar>(&self, tol: f64) -> HPolytope<G> {
        let rows = self
            .rows
            .iter()
            .map(|r| Halfspace::new(super::scalar::convert_vec(&r.normal), G::from_rational(&r.offset.to_rational())))
            .collect();
        let mut h = HPolytope::from_canonical(self.dim, rows, self.bounded, tol);
        h.bounded = self.bounded;
        h
    }

    pub(crate) fn certified(mut self) -> Self {
        self.bounded = true;
        self
    }

    pub(crate) fn mark_unbounded(mut self) -> Self {
        self.bounded = false;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::scalar::Rational;

    fn q(p: i64) -> Rational {
        Rational::from_i64(p)
    }

    fn pts(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter().map(|p| p.iter().map(|&x| q(x)).collect()).collect()
    }

    fn hrow(a: &[i64], b: i64) -> Halfspace<Rational> {
        Halfspace::new(a.iter().map(|&x| q(x)).collect(), q(b))
    }

    #[test]
    fn hull_drops_interior_origin() {
        let p = VPolytope::hull(pts(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1], &[0, 0]])).unwrap();
        assert_eq!(p.vertices(), pts(&[&[-1, 0], &[0, -1], &[0, 1], &[1, 0]]).as_slice());
        assert!(p.is_symmetric() && p.is_full_dim());
    }

    #[test]
    fn hull_of_empty_set_fails() {
        assert_eq!(VPolytope::<Rational>::hull(vec![]).unwrap_err(), Error::EmptyPointSet);
        assert_eq!(Error::EmptyPointSet.to_string(), "empty point set");
    }

    #[test]
    fn hull_of_collinear_points() {
        let p = VPolytope::hull(pts(&[&[-1, -1], &[0, 0], &[2, 2], &[1, 1]])).unwrap();
        assert_eq!(p.vertices(), pts(&[&[-1, -1], &[2, 2]]).as_slice());
        assert!(!p.is_full_dim());
        assert!(matches!(p.to_h(), Err(Error::LowerDimensional { dim: 2, found: 1 })));
    }

    #[test]
    fn hull_of_single_point() {
        let p = VPolytope::hull(pts(&[&[0, 0], &[0, 0]])).unwrap();
        assert_eq!(p.vertices().len(), 1);
        assert!(p.is_symmetric());
    }

    #[test]
    fn square_facets() {
        let sq = VPolytope::hull(pts(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]])).unwrap();
        let h = sq.to_h().unwrap();
        let expect = HPolytope::from_rows(
            2,
            vec![hrow(&[1, 0], 1), hrow(&[-1, 0], 1), hrow(&[0, 1], 1), hrow(&[0, -1], 1)],
            0.0,
        )
        .unwrap();
        assert!(h.same_rows(&expect));
        assert!(h.is_symmetric() && h.is_bounded());
    }

    #[test]
    fn unbounded_and_infeasible() {
        let slab = HPolytope::from_rows(2, vec![hrow(&[1, 0], 1), hrow(&[-1, 0], 1)], 0.0).unwrap();
        assert_eq!(slab.to_v().unwrap_err(), Error::Unbounded);
        let half = HPolytope::from_rows(1, vec![hrow(&[1], 1)], 0.0).unwrap();
        assert_eq!(half.to_v().unwrap_err(), Error::Unbounded);
        let empty = HPolytope::from_rows(1, vec![hrow(&[1], -1), hrow(&[-1], -1)], 0.0).unwrap();
        assert_eq!(empty.to_v().unwrap_err(), Error::Infeasible);
        assert_eq!(
            HPolytope::from_rows(1, vec![hrow(&[0], -1)], 0.0).unwrap_err(),
            Error::Infeasible
        );
    }

    #[test]
    fn reduce_drops_redundant_rows() {
        let h = HPolytope::new(
            1,
            vec![hrow(&[1], 1), hrow(&[-1], 1), hrow(&[1], 2), hrow(&[2], 3)],
        )
        .unwrap();
        assert_eq!(h.rows().len(), 2);
        assert!(h.is_symmetric());
    }

    #[test]
    fn approx_hull_merges_near_duplicates() {
        let p = VPolytope::hull(vec![
            vec![1.0, 0.0],
            vec![1.0 + 1e-12, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
            vec![0.5, 0.5 - 1e-13],
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
    }
}
