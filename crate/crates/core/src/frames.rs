//! Greedy orthonormal frames and the factor-3 nesting checks.
//!
//! The greedy frame picks `u_1` maximizing the radial function of `K`, then
//! `u_2` maximizing it on the sphere of `u_1^⊥`, and so on. With the body
//! rotated so that `u_j ↦ e_j`, consecutive k-cross approximations satisfy
//! `R_k(UK) ⊆ 3 R_{k-1}(UK)`, and dually `Q_{k-1}(UK) ⊆ 3 Q_k(UK)` when the
//! frame is taken from the polar body.
//!
//! Frames live in floating point: normalizing a vertex needs a square root.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hulls::{diameter, q_hull_with_vertices, r_hull};
use crate::kernel::{lex_cmp_tol, linalg, min_scale_factor, section_affine, Mode, Scalar, VPolytope, DEFAULT_TOL};

/// Relative slack allowed on the factor checks.
pub const FACTOR_REL_TOL: f64 = 1e-7;

/// Norm exponents for the diameter ratios in [`DualFactorRecord`].
pub const DIAM_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

/// An ordered, positively oriented orthonormal basis with the radial values
/// of the body along each vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub n: usize,
    pub vectors: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub eta: f64,
}

impl Frame {
    /// The standard basis, with unit radial values.
    pub fn identity(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            n,
            vectors,
            rho: vec![1.0; n],
            seed: 0,
            eta: 0.0,
        }
    }

    /// A frame from given vectors; radial values are left at 1.
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let n = vectors.len();
        let f = Self {
            n,
            vectors,
            rho: vec![1.0; n],
            seed: 0,
            eta: 0.0,
        };
        f.validate(DEFAULT_TOL * 1e3)?;
        Ok(f)
    }

    pub fn determinant(&self) -> f64 {
        linalg::det(&self.vectors)
    }

    /// Checks orthonormality, orientation and the shape of the data.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.vectors.len() != self.n || self.rho.len() != self.n {
            return Err(Error::format("vectors", format!("expected {} vectors and radial values", self.n)));
        }
        for (i, u) in self.vectors.iter().enumerate() {
            if u.len() != self.n {
                return Err(Error::format(format!("vectors[{i}]"), format!("expected {} entries", self.n)));
            }
            for (j, w) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (f64::dot(u, w) - target).abs() > tol {
                    return Err(Error::format("vectors", "not orthonormal"));
                }
            }
        }
        if (self.determinant() - 1.0).abs() > tol {
            return Err(Error::format("vectors", "orientation is not positive"));
        }
        Ok(())
    }

    /// Whether the radial values are nonincreasing within `tol`.
    pub fn rho_nonincreasing(&self, tol: f64) -> bool {
        self.rho.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// `U x` where `U` sends `u_j` to `e_j`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.vectors.iter().map(|u| f64::dot(u, x)).collect()
    }
}

fn approx_body<F: Scalar>(k: &VPolytope<F>) -> VPolytope<f64> {
    let tol = if F::MODE == Mode::Exact { DEFAULT_TOL } else { k.tol() };
    k.convert(tol)
}

fn leading_positive(v: &[f64], tol: f64) -> bool {
    v.iter().find(|x| x.abs() > tol).is_some_and(|x| *x > 0.0)
}

/// Candidate section vertices (one per antipodal pair) and the largest norm.
fn section_candidates(h: &crate::kernel::HPolytope<f64>, normals: &[Vec<f64>]) -> Result<(Vec<(Vec<f64>, f64)>, f64)> {
    let tol = h.tol();
    let sec = section_affine(h, normals)?;
    let mut cands: Vec<(Vec<f64>, f64)> = sec
        .vertices()
        .iter()
        .filter(|v| leading_positive(v, tol))
        .map(|v| (v.clone(), linalg::norm2(v)))
        .collect();
    cands.sort_by(|a, b| lex_cmp_tol(&a.0, &b.0, 0.0));
    let max = cands.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok((cands, max))
}

/// Unit direction of largest radial value in the orthogonal complement of
/// `normals`, with that value.
///
/// Ties are broken towards the lexicographically largest vector whose
/// leading nonzero coordinate is positive.
pub fn max_norm_direction<F: Scalar>(body: &VPolytope<F>, normals: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let k = approx_body(body);
    if normals.len() >= k.dim() {
        return Err(Error::EmptyComplement);
    }
    let h = k.to_h()?;
    let (cands, max) = section_candidates(&h, normals)?;
    let tol = h.tol() * max.max(1.0);
    let best = cands
        .iter()
        .filter(|c| c.1 >= max - tol)
        .max_by(|a, b| lex_cmp_tol(&a.0, &b.0, h.tol()))
        .ok_or(Error::Unbounded)?;
    Ok((best.0.iter().map(|x| x / best.1).collect(), best.1))
}

fn orthonormalize(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Vec<f64> {
    for b in basis {
        let d = f64::dot(&v, b);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= d * y;
        }
    }
    let n = linalg::norm2(&v);
    v.iter().map(|x| x / n).collect()
}

/// The greedy frame of a symmetric full-dimensional body.
///
/// With `eta > 0`, each step draws uniformly (seeded) among the section
/// vertices whose norm is at least `(1 - eta)` times the largest one.
pub fn greedy_frame<F: Scalar>(body: &VPolytope<F>, eta: f64, seed: u64) -> Result<Frame> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::EtaOutOfRange(eta));
    }
    let k = approx_body(body);
    if !k.is_full_dim() {
        return Err(Error::LowerDimensional {
            dim: k.dim(),
            found: linalg::rank(k.vertices(), k.tol()),
        });
    }
    if !k.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = k.dim();
    let h = k.to_h()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    for _ in 0..n {
        let (cands, max) = section_candidates(&h, &vectors)?;
        let slack = h.tol() * max.max(1.0);
        let pick = if eta > 0.0 {
            let admissible: Vec<&(Vec<f64>, f64)> =
                cands.iter().filter(|c| c.1 >= (1.0 - eta) * max - slack).collect();
            if admissible.is_empty() {
                return Err(Error::Unbounded);
            }
            admissible[rng.gen_range(0..admissible.len())]
        } else {
            cands
                .iter()
                .filter(|c| c.1 >= max - slack)
                .max_by(|a, b| lex_cmp_tol(&a.0, &b.0, h.tol()))
                .ok_or(Error::Unbounded)?
        };
        vectors.push(orthonormalize(pick.0.clone(), &vectors));
        rho.push(pick.1);
    }
    if linalg::det(&vectors) < 0.0 {
        for x in vectors[n - 1].iter_mut() {
            *x = -*x;
        }
    }
    Ok(Frame {
        n,
        vectors,
        rho,
        seed,
        eta,
    })
}

/// The image `UK` of the body under the rotation sending `u_j` to `e_j`.
pub fn rotate<F: Scalar>(body: &VPolytope<F>, frame: &Frame) -> Result<VPolytope<f64>> {
    if frame.n != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            found: frame.n,
        });
    }
    approx_body(body).linear_image(&frame.vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorRecord {
    pub k: usize,
    /// Least `c` with the level-`k` body inside `c` times the level-`k-1` one.
    pub c_star: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorReport {
    pub factor: f64,
    pub rel_tol: f64,
    pub records: Vec<FactorRecord>,
}

impl FactorReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn max_c_star(&self) -> f64 {
        self.records.iter().map(|r| r.c_star).fold(0.0, f64::max)
    }
}

fn check_factor(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("factor must be positive, got {c}")))
    }
}

/// Least factors `c*_k` with `R_k(UK) ⊆ c*_k R_{k-1}(UK)` for `k = 2..=n`,
/// each compared against `c (1 + rel_tol)`.
pub fn verify_factor<F: Scalar>(body: &VPolytope<F>, frame: &Frame, c: f64, rel_tol: f64) -> Result<FactorReport> {
    check_factor(c)?;
    let uk = rotate(body, frame)?;
    let h = uk.to_h()?;
    let levels: Vec<VPolytope<f64>> = (1..=uk.dim()).into_par_iter().map(|k| r_hull(&h, k)).collect::<Result<_>>()?;
    let records = levels
        .par_windows(2)
        .enumerate()
        .map(|(i, w)| {
            let c_star = min_scale_factor(&w[1], &w[0].to_h()?)?;
            Ok(FactorRecord {
                k: i + 2,
                c_star,
                pass: c_star <= c * (1.0 + rel_tol),
            })
        })
        .collect::<Result<_>>()?;
    Ok(FactorReport { factor: c, rel_tol, records })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualFactorRecord {
    pub k: usize,
    /// Least `c` with `Q_{k-1}(UK) ⊆ c Q_k(UK)`.
    pub c_star: f64,
    /// The same factor computed as `R_k(UK°) ⊆ c R_{k-1}(UK°)`.
    pub c_star_polar: f64,
    /// `diam_p Q_{k-1}(UK) / diam_p Q_k(UK)` for each exponent in [`DIAM_EXPONENTS`].
    pub diam_ratios: Vec<f64>,
    pub routes_agree: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualFactorReport {
    pub factor: f64,
    pub rel_tol: f64,
    pub records: Vec<DualFactorRecord>,
}

impl DualFactorReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn max_c_star(&self) -> f64 {
        self.records.iter().map(|r| r.c_star).fold(0.0, f64::max)
    }
}

/// Relative agreement required between the two routes of [`verify_dual_factor`].
pub const ROUTE_REL_TOL: f64 = 1e-6;

/// Least factors `c*_k` with `Q_{k-1}(UK) ⊆ c*_k Q_k(UK)`, cross-checked
/// against [`verify_factor`] on the polar body under the same frame.
///
/// A record passes when `c*_k ≤ c (1 + rel_tol)`, both routes agree within
/// [`ROUTE_REL_TOL`], and every diameter ratio is at most `c (1 + rel_tol)`.
pub fn verify_dual_factor<F: Scalar>(body: &VPolytope<F>, frame: &Frame, c: f64, rel_tol: f64) -> Result<DualFactorReport> {
    check_factor(c)?;
    let uk = rotate(body, frame)?;
    let levels: Vec<(crate::kernel::HPolytope<f64>, VPolytope<f64>)> = (1..=uk.dim())
        .into_par_iter()
        .map(|k| q_hull_with_vertices(&uk, k))
        .collect::<Result<_>>()?;
    // Polar in the body's own arithmetic, rotated afterwards.
    let polar = body.polar()?.to_v()?;
    let polar_route = verify_factor(&polar, frame, c, rel_tol)?;
    let bound = c * (1.0 + rel_tol);
    let records = levels
        .windows(2)
        .zip(&polar_route.records)
        .enumerate()
        .map(|(i, (w, pr))| {
            let (outer, inner) = (&w[0], &w[1]);
            let c_star = min_scale_factor(&outer.1, &inner.0)?;
            let diam_ratios = DIAM_EXPONENTS
                .iter()
                .map(|&p| Ok(diameter(&outer.1, p)? / diameter(&inner.1, p)?))
                .collect::<Result<Vec<f64>>>()?;
            let routes_agree = (c_star - pr.c_star).abs() <= ROUTE_REL_TOL * c_star.abs().max(pr.c_star.abs());
            let pass = c_star <= bound && routes_agree && diam_ratios.iter().all(|r| *r <= bound);
            Ok(DualFactorRecord {
                k: i + 2,
                c_star,
                c_star_polar: pr.c_star,
                diam_ratios,
                routes_agree,
                pass,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DualFactorReport { factor: c, rel_tol, records })
}

/// `δ = 3η / (1 - η)`, the extra slack allowed for η-greedy frames.
pub fn eta_slack(eta: f64) -> f64 {
    3.0 * eta / (1.0 - eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Rational;

    fn vq(v: &[&[i64]]) -> VPolytope<Rational> {
        VPolytope::hull(v.iter().map(|p| p.iter().map(|&x| Rational::from_i64(x)).collect()).collect()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    fn kite() -> VPolytope<Rational> {
        vq(&[&[3, 0], &[-3, 0], &[1, 2], &[-1, -2]])
    }

    #[test]
    fn max_norm_direction_examples() {
        let (u, r) = max_norm_direction(&kite(), &[]).unwrap();
        assert!(close(&u, &[1.0, 0.0]) && (r - 3.0).abs() < 1e-12);
        let (u, r) = max_norm_direction(&kite(), &[vec![1.0, 0.0]]).unwrap();
        assert!(close(&u, &[0.0, 1.0]) && (r - 1.5).abs() < 1e-9);
        let cross = vq(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        let (u, _) = max_norm_direction(&cross, &[]).unwrap();
        assert!(close(&u, &[1.0, 0.0]));
        assert_eq!(
            max_norm_direction(&cross, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap_err(),
            Error::EmptyComplement
        );
    }

    #[test]
    fn greedy_examples() {
        let f = greedy_frame(&kite(), 0.0, 0).unwrap();
        assert!(close(&f.vectors[0], &[1.0, 0.0]) && close(&f.vectors[1], &[0.0, 1.0]));
        assert!(close(&f.rho, &[3.0, 1.5]));
        assert!(rotate(&kite(), &f).unwrap().same_set(&kite().convert(1e-9)));

        let bx = vq(&[&[2, 1], &[2, -1], &[-2, 1], &[-2, -1]]);
        let f = greedy_frame(&bx, 0.0, 0).unwrap();
        let s = 5f64.sqrt();
        assert!(close(&f.vectors[0], &[2.0 / s, 1.0 / s]));
        // The greedy step yields (1,-2)/√5; orientation flips it.
        assert!(close(&f.vectors[1], &[-1.0 / s, 2.0 / s]));
        assert!(close(&f.rho, &[s, s / 2.0]));
        f.validate(1e-9).unwrap();
    }

    #[test]
    fn cross_frame_is_signed_permutation() {
        let cross = vq(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
        let f = greedy_frame(&cross, 0.0, 0).unwrap();
        f.validate(1e-9).unwrap();
        assert!(close(&f.rho, &[1.0, 1.0, 1.0]));
        for u in &f.vectors {
            assert_eq!(u.iter().filter(|x| x.abs() > 1e-9).count(), 1);
        }
        let rep = verify_factor(&cross, &f, 3.0, FACTOR_REL_TOL).unwrap();
        assert!(rep.records.iter().all(|r| (r.c_star - 1.0).abs() < 1e-9));
    }

    #[test]
    fn orientation_in_2d() {
        let sq = vq(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        let f = greedy_frame(&sq, 0.0, 0).unwrap();
        assert!(close(&f.vectors[1], &[0.0, 1.0]));
    }

    #[test]
    fn quarter_turn_keeps_square() {
        let sq = vq(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        let f = Frame::from_vectors(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(rotate(&sq, &f).unwrap().same_set(&sq.convert(1e-9)));
        assert!(rotate(&sq, &Frame::identity(2)).unwrap().same_set(&sq.convert(1e-9)));
    }

    #[test]
    fn square_factors() {
        let sq = vq(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        let rep = verify_factor(&sq, &Frame::identity(2), 3.0, FACTOR_REL_TOL).unwrap();
        assert!((rep.records[0].c_star - 2.0).abs() < 1e-9 && rep.passed());
        let rep = verify_factor(&sq, &Frame::identity(2), 1.5, FACTOR_REL_TOL).unwrap();
        assert!(!rep.passed());
        let dual = verify_dual_factor(&sq, &Frame::identity(2), 3.0, FACTOR_REL_TOL).unwrap();
        assert!((dual.records[0].c_star - 1.0).abs() < 1e-9 && dual.passed());
    }

    #[test]
    fn dual_factor_cross3() {
        let cross = vq(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]);
        let dual = verify_dual_factor(&cross, &Frame::identity(3), 3.0, FACTOR_REL_TOL).unwrap();
        assert!(dual.passed());
        // Q_1 is the cube, Q_2 = {|x_i| + |x_j| ≤ 1}: the corner (1,1,1) needs factor 2.
        assert!((dual.records[0].c_star - 2.0).abs() < 1e-9);
        assert!((dual.records[1].c_star - 1.5).abs() < 1e-9);
    }

    #[test]
    fn eta_frames_are_valid_and_seeded() {
        let body = vq(&[&[5, 1, 0], &[-5, -1, 0], &[1, 4, 2], &[-1, -4, -2], &[0, 2, 4], &[0, -2, -4], &[3, -3, 3], &[-3, 3, -3]]);
        let a = greedy_frame(&body, 0.1, 7).unwrap();
        let b = greedy_frame(&body, 0.1, 7).unwrap();
        assert_eq!(a, b);
        a.validate(1e-9).unwrap();
        let rep = verify_factor(&body, &a, 3.0 + eta_slack(0.1), FACTOR_REL_TOL).unwrap();
        assert!(rep.passed());
        assert_eq!(greedy_frame(&body, 1.0, 0).unwrap_err(), Error::EtaOutOfRange(1.0));
    }
}
