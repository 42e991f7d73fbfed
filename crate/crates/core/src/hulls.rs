//! k-convex hulls and k-cross approximations.
//!
//! For a symmetric body `K ⊂ R^n` and `1 ≤ k ≤ n`:
//!
//! * `Q_k(K)` intersects, over all `k`-element coordinate subsets `S`, the
//!   cylinders over the projections of `K` onto `F(S)`. It shrinks to `K` as
//!   `k` grows: `K = Q_n ⊆ … ⊆ Q_1`, and `Q_1` is the bounding box.
//! * `R_k(K)` is the convex hull of the sections of `K` by all `k`-dimensional
//!   coordinate subspaces. It grows to `K`: `R_1 ⊆ … ⊆ R_n = K`, and `R_1` is
//!   the largest axis-aligned cross-polytope inside `K`.
//!
//! The two families are polar to each other: `Q_k(K)° = R_k(K°)`.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{
    contains_scaled, linalg, max_norm, minkowski_sum, project, ray_extent, section_affine, CoordSubset, HPolytope,
    Halfspace, Mode, Scalar, VPolytope,
};

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::KOutOfRange { k, n })
    } else {
        Ok(())
    }
}

fn require_body<F: Scalar>(k: &VPolytope<F>) -> Result<()> {
    if !k.is_full_dim() {
        return Err(Error::LowerDimensional {
            dim: k.dim(),
            found: linalg::rank(
                &k.vertices()
                    .iter()
                    .map(|v| linalg::sub(v, &k.vertices()[0]))
                    .collect::<Vec<_>>(),
                k.tol(),
            ),
        });
    }
    if !k.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// Rows `±x_i ≤ max |v_i|` of the smallest axis-aligned box containing `K`.
fn bounding_box_rows<F: Scalar>(k: &VPolytope<F>) -> Vec<Halfspace<F>> {
    let n = k.dim();
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        let m = k
            .vertices()
            .iter()
            .map(|v| v[i].abs())
            .fold(F::zero(), |a, b| if b > a { b } else { a });
        let mut e = vec![F::zero(); n];
        e[i] = F::one();
        rows.push(Halfspace::new(e.clone(), m.clone()));
        e[i] = -F::one();
        rows.push(Halfspace::new(e, m));
    }
    rows
}

/// `Q_k(K)` together with its vertex set.
pub fn q_hull_with_vertices<F: Scalar>(body: &VPolytope<F>, k: usize) -> Result<(HPolytope<F>, VPolytope<F>)> {
    let n = body.dim();
    check_k(k, n)?;
    require_body(body)?;
    let cylinders: Vec<Vec<Halfspace<F>>> = CoordSubset::all_of_size(n, k)
        .par_iter()
        .map(|s| -> Result<Vec<Halfspace<F>>> {
            let facets = project(body, s)?.to_h()?;
            Ok(facets
                .rows()
                .iter()
                .map(|r| Halfspace::new(s.embed(&r.normal, F::zero()), r.offset.clone()))
                .collect())
        })
        .collect::<Result<_>>()?;
    // Box first keeps every intermediate bounded; cylinders follow in subset order.
    let mut rows = bounding_box_rows(body);
    rows.extend(cylinders.into_iter().flatten());
    HPolytope::from_rows(n, rows, body.tol())?.reduce()
}

/// The k-convex hull `Q_k(K)` as a minimal H-description.
pub fn q_hull<F: Scalar>(body: &VPolytope<F>, k: usize) -> Result<HPolytope<F>> {
    Ok(q_hull_with_vertices(body, k)?.0)
}

/// Vertices of `K ∩ F(S)` in ambient coordinates.
fn section_vertices<F: Scalar>(body: &HPolytope<F>, s: &CoordSubset) -> Result<Vec<Vec<F>>> {
    let rows = body
        .rows()
        .iter()
        .map(|r| Halfspace::new(s.restrict(&r.normal), r.offset.clone()))
        .collect();
    let sec = HPolytope::from_rows(s.len(), rows, body.tol())?.to_v()?;
    Ok(sec.vertices().iter().map(|y| s.embed(y, F::zero())).collect())
}

/// The k-cross approximation `R_k(K)`.
pub fn r_hull<F: Scalar>(body: &HPolytope<F>, k: usize) -> Result<VPolytope<F>> {
    Ok(r_hull_with_facets(body, k)?.0)
}

/// `R_k(K)` together with its facets.
pub fn r_hull_with_facets<F: Scalar>(body: &HPolytope<F>, k: usize) -> Result<(VPolytope<F>, HPolytope<F>)> {
    let n = body.dim();
    check_k(k, n)?;
    if !body.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let pieces: Vec<Vec<Vec<F>>> = CoordSubset::all_of_size(n, k)
        .par_iter()
        .map(|s| section_vertices(body, s))
        .collect::<Result<_>>()?;
    match VPolytope::hull_with_facets(pieces.into_iter().flatten().collect(), body.tol())? {
        (v, Some(h)) => Ok((v, h)),
        // Not reached for symmetric bodies; `to_h` reports the dimension.
        (v, None) => v.to_h().map(|h| (v, h)),
    }
}

/// Checks `Q_k(K)° = R_k(K°)` by computing both sides along independent
/// paths (projections and facet enumeration on one side, sections and
/// vertex enumeration of the polar on the other). Exact arithmetic only.
pub fn verify_duality<F: Scalar>(body: &VPolytope<F>, k: usize) -> Result<bool> {
    if F::MODE != Mode::Exact {
        return Err(Error::ExactRequired);
    }
    let lhs = q_hull(body, k)?.polar()?;
    let rhs = r_hull(&body.polar()?, k)?;
    Ok(lhs.same_set(&rhs))
}

/// Diameter of `P` in the `ℓ_p` norm (`p = f64::INFINITY` for the max norm).
pub fn diameter<F: Scalar>(p: &VPolytope<F>, exponent: f64) -> Result<f64> {
    if exponent.is_nan() || exponent < 1.0 {
        return Err(Error::InvalidNorm(exponent));
    }
    let vs: Vec<Vec<f64>> = p.vertices().iter().map(|v| v.iter().map(F::to_f64).collect()).collect();
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        if exponent.is_infinite() {
            diffs.fold(0.0, f64::max)
        } else if exponent == 1.0 {
            diffs.sum()
        } else if exponent == 2.0 {
            diffs.map(|d| d * d).sum::<f64>().sqrt()
        } else {
            diffs.map(|d| d.powf(exponent)).sum::<f64>().powf(1.0 / exponent)
        }
    };
    let mut best = 0.0_f64;
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            best = best.max(dist(a, b));
        }
    }
    Ok(best)
}

/// Squared Euclidean diameter, computed in the polytope's own arithmetic.
pub fn diameter_l2_squared<F: Scalar>(p: &VPolytope<F>) -> F {
    let vs = p.vertices();
    let mut best = F::zero();
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            let d = linalg::sub(a, b);
            let sq = F::dot(&d, &d);
            if sq > best {
                best = sq;
            }
        }
    }
    best
}

fn check_unit<F: Scalar>(e: &[F], tol: f64) -> Result<()> {
    let sq = F::dot(e, e);
    if sq.cmp_tol(&F::one(), tol.max(0.0) * 10.0) != Ordering::Equal {
        return Err(Error::InvalidArgument("direction e must be a unit vector".into()));
    }
    Ok(())
}

fn segment<F: Scalar>(e: &[F], r: &F, tol: f64) -> Result<VPolytope<F>> {
    let p = linalg::scale(e, r);
    let m: Vec<F> = p.iter().map(|x| -x.clone()).collect();
    VPolytope::hull_with_tol(vec![p, m], tol)
}

/// Checks `(1-η)L ⊆ (L ∩ span{e}) + 2(L ∩ e^⊥)` for a symmetric body `L`,
/// a unit vector `e` and `η ∈ [0, 1)` with `ρ_L(e) ≥ (1-η)‖L‖`.
///
/// A hypothesis violation is reported as [`Error::EtaHypothesis`]; `Ok(false)`
/// would mean the inclusion itself failed.
pub fn check_step1<F: Scalar>(body: &VPolytope<F>, e: &[F], eta: f64) -> Result<bool> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::EtaOutOfRange(eta));
    }
    require_body(body)?;
    let tol = body.tol();
    check_unit(e, tol)?;
    let h = body.to_h()?;
    let rho = ray_extent(&h, e)?;
    let shrink = F::one() - F::from_f64(eta);
    let max_sq = body
        .vertices()
        .iter()
        .map(|v| F::dot(v, v))
        .fold(F::zero(), |a, b| if b > a { b } else { a });
    let bound_sq = shrink.clone() * shrink.clone() * max_sq;
    if (rho.clone() * rho.clone()).cmp_tol(&bound_sq, tol) == Ordering::Less {
        return Err(Error::EtaHypothesis {
            rho: rho.to_f64(),
            bound: (1.0 - eta) * max_norm(body),
        });
    }
    let axis = segment(e, &rho, tol)?;
    let slice = section_affine(&h, &[e.to_vec()])?;
    let rhs = minkowski_sum(&axis, &slice.scale(&F::from_i64(2)))?;
    contains_scaled(&body.scale(&shrink), &rhs, &F::one())
}

/// Checks `[-re, re] + 2M ⊆ c · conv([-re, re] ∪ M)` for a symmetric `M`
/// lying in `e^⊥`.
pub fn check_step2_with_factor<F: Scalar>(r: &F, m: &VPolytope<F>, e: &[F], c: &F) -> Result<bool> {
    let tol = m.tol();
    if r.sign_tol(tol) != Ordering::Greater {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    if e.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: e.len(),
        });
    }
    check_unit(e, tol)?;
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if m.vertices().iter().any(|v| !F::dot(v, e).is_zero_tol(tol * 10.0)) {
        return Err(Error::NotInHyperplane);
    }
    let axis = segment(e, r, tol)?;
    let lhs = minkowski_sum(&axis, &m.scale(&F::from_i64(2)))?;
    let rhs = crate::kernel::conv_union(&axis, m)?;
    contains_scaled(&lhs, &rhs, c)
}

/// [`check_step2_with_factor`] at the factor 3.
pub fn check_step2<F: Scalar>(r: &F, m: &VPolytope<F>, e: &[F]) -> Result<bool> {
    check_step2_with_factor(r, m, e, &F::from_i64(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullKind {
    /// k-convex hulls, approximating from outside.
    Q,
    /// k-cross approximations, approximating from inside.
    R,
}

/// All levels `k = 1..=n` of one approximation family of a body.
#[derive(Debug, Clone)]
pub struct HullFamily<F> {
    pub kind: HullKind,
    pub body: VPolytope<F>,
    /// `levels[k - 1]` holds level `k` as (facets, vertices).
    pub levels: Vec<(HPolytope<F>, VPolytope<F>)>,
}

impl<F: Scalar> HullFamily<F> {
    pub fn q(body: &VPolytope<F>) -> Result<Self> {
        let levels = (1..=body.dim())
            .map(|k| q_hull_with_vertices(body, k))
            .collect::<Result<_>>()?;
        Ok(Self {
            kind: HullKind::Q,
            body: body.clone(),
            levels,
        })
    }

    pub fn r(body: &VPolytope<F>) -> Result<Self> {
        require_body(body)?;
        let h = body.to_h()?;
        let levels = (1..=body.dim())
            .map(|k| r_hull_with_facets(&h, k).map(|(v, f)| (f, v)))
            .collect::<Result<_>>()?;
        Ok(Self {
            kind: HullKind::R,
            body: body.clone(),
            levels,
        })
    }

    pub fn level(&self, k: usize) -> Option<&(HPolytope<F>, VPolytope<F>)> {
        k.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    /// Whether consecutive levels are nested in the family's direction.
    pub fn is_nested(&self) -> Result<bool> {
        for w in self.levels.windows(2) {
            let (lower, upper) = (&w[0], &w[1]);
            let ok = match self.kind {
                HullKind::Q => crate::kernel::inclusion(&upper.1, &lower.0, &F::one())?,
                HullKind::R => crate::kernel::inclusion(&lower.1, &upper.0, &F::one())?,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the top level equals the body.
    pub fn terminal_matches_body(&self) -> bool {
        self.levels.last().is_some_and(|(_, v)| v.same_set(&self.body))
    }

    /// Least `c_k` with `Q_{k-1} ⊆ c_k Q_k` (or `R_k ⊆ c_k R_{k-1}`), for `k = 2..=n`.
    pub fn step_factors(&self) -> Result<Vec<F>> {
        self.levels
            .windows(2)
            .map(|w| match self.kind {
                HullKind::Q => crate::kernel::min_scale_factor(&w[0].1, &w[1].0),
                HullKind::R => crate::kernel::min_scale_factor(&w[1].1, &w[0].0),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Rational, VPolytope};

    fn q(p: i64) -> Rational {
        Rational::from_i64(p)
    }

    fn vp(v: &[&[i64]]) -> VPolytope<Rational> {
        VPolytope::hull(v.iter().map(|p| p.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    fn cube3() -> VPolytope<Rational> {
        let mut pts = Vec::new();
        for a in [-1, 1] {
            for b in [-1, 1] {
                for c in [-1, 1] {
                    pts.push(vec![q(a), q(b), q(c)]);
                }
            }
        }
        VPolytope::hull(pts).unwrap()
    }

    fn octahedron() -> VPolytope<Rational> {
        vp(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]])
    }

    #[test]
    fn q1_of_cross_is_square() {
        let cross = vp(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        let (_, v) = q_hull_with_vertices(&cross, 1).unwrap();
        assert!(v.same_set(&vp(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]])));
    }

    #[test]
    fn q2_of_octahedron_membership() {
        let (h, v) = q_hull_with_vertices(&octahedron(), 2).unwrap();
        let half = Rational::from_ratio(1, 2);
        let p = vec![half.clone(), half.clone(), half.clone()];
        assert!(h.contains(&p));
        assert!(!octahedron().to_h().unwrap().contains(&p));
        // Oracle: x ∈ Q_2 iff |x_i| + |x_j| ≤ 1 for every pair.
        let member = |x: &[Rational]| {
            (0..3).all(|i| (i + 1..3).all(|j| x[i].clone().abs() + x[j].clone().abs() <= q(1)))
        };
        for x in v.vertices() {
            assert!(member(x));
        }
        let probe = vec![Rational::from_ratio(3, 5), Rational::from_ratio(2, 5), q(0)];
        assert_eq!(h.contains(&probe), member(&probe));
        let probe = vec![Rational::from_ratio(3, 5), Rational::from_ratio(1, 2), q(0)];
        assert_eq!(h.contains(&probe), member(&probe));
    }

    #[test]
    fn r2_of_cube_is_cuboctahedron() {
        let r2 = r_hull(&cube3().to_h().unwrap(), 2).unwrap();
        assert_eq!(r2.vertices().len(), 12);
        let cubo = vp(&[
            &[1, 1, 0], &[1, -1, 0], &[-1, 1, 0], &[-1, -1, 0],
            &[1, 0, 1], &[1, 0, -1], &[-1, 0, 1], &[-1, 0, -1],
            &[0, 1, 1], &[0, 1, -1], &[0, -1, 1], &[0, -1, -1],
        ]);
        assert!(r2.same_set(&cubo));
        assert!(!r2.to_h().unwrap().contains(&[q(1), q(1), q(1)]));
    }

    #[test]
    fn r1_of_square_is_cross() {
        let sq = vp(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        let r1 = r_hull(&sq.to_h().unwrap(), 1).unwrap();
        assert!(r1.same_set(&vp(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])));
    }

    #[test]
    fn k_out_of_range() {
        assert_eq!(q_hull(&cube3(), 0).unwrap_err(), Error::KOutOfRange { k: 0, n: 3 });
        assert_eq!(r_hull(&cube3().to_h().unwrap(), 4).unwrap_err(), Error::KOutOfRange { k: 4, n: 3 });
    }

    #[test]
    fn duality_small_cases() {
        let sq = vp(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        assert!(verify_duality(&sq, 1).unwrap());
        assert!(verify_duality(&sq, 2).unwrap());
        assert!(verify_duality(&octahedron(), 2).unwrap());
        let approx: VPolytope<f64> = sq.convert(1e-9);
        assert_eq!(verify_duality(&approx, 1).unwrap_err(), Error::ExactRequired);
    }

    #[test]
    fn diameters() {
        let sq = vp(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        assert!((diameter(&sq, 2.0).unwrap() - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(diameter_l2_squared(&sq), q(8));
        assert_eq!(diameter(&octahedron(), 1.0).unwrap(), 2.0);
        assert_eq!(diameter(&cube3(), f64::INFINITY).unwrap(), 2.0);
        assert_eq!(diameter_l2_squared(&cube3()), q(12));
        assert_eq!(diameter(&sq, 0.5).unwrap_err(), Error::InvalidNorm(0.5));
    }

    #[test]
    fn step1_examples() {
        let sq = vp(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        // rho_sq(e1) = 1 < ‖sq‖ = √2, so eta = 0 violates the hypothesis.
        assert!(matches!(check_step1(&sq, &[q(1), q(0)], 0.0), Err(Error::EtaHypothesis { .. })));
        assert!(check_step1(&sq, &[q(1), q(0)], 0.3).unwrap());
        let hex = vp(&[&[2, 0], &[-2, 0], &[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        assert!(check_step1(&hex, &[q(1), q(0)], 0.0).unwrap());
    }

    #[test]
    fn step2_examples() {
        let e1 = [q(1), q(0)];
        let m = vp(&[&[0, 1], &[0, -1]]);
        assert!(check_step2(&q(1), &m, &e1).unwrap());
        let almost = Rational::from_ratio(2_999_999, 1_000_000);
        assert!(!check_step2_with_factor(&q(1), &m, &e1, &almost).unwrap());
        let origin = vp(&[&[0, 0]]);
        assert!(check_step2(&q(5), &origin, &e1).unwrap());
        let tilted = vp(&[&[1, 1], &[-1, -1]]);
        assert_eq!(check_step2(&q(1), &tilted, &e1).unwrap_err(), Error::NotInHyperplane);
    }

    #[test]
    fn families_nest() {
        let body = vp(&[&[2, 1, 0], &[-2, -1, 0], &[0, 1, 1], &[0, -1, -1], &[1, 0, 2], &[-1, 0, -2]]);
        let qf = HullFamily::q(&body).unwrap();
        let rf = HullFamily::r(&body).unwrap();
        assert!(qf.is_nested().unwrap() && rf.is_nested().unwrap());
        assert!(qf.terminal_matches_body() && rf.terminal_matches_body());
        for c in qf.step_factors().unwrap().iter().chain(&rf.step_factors().unwrap()) {
            assert!(*c >= q(1));
        }
    }
}
