//! Randomized properties of the kernel, the hull families and frames.

use crosshull::frames::{greedy_frame, rotate, verify_factor};
use crosshull::hulls::{diameter, q_hull, r_hull};
use crosshull::{
    inclusion, minkowski_sum, project, ray_extent, section, support, CoordSubset, Rational, Scalar, VPolytope,
};
use proptest::prelude::*;

type Body = VPolytope<Rational>;

fn q(v: i64) -> Rational {
    Rational::from_i64(v)
}

fn symmetric_hull(gens: &[Vec<i64>]) -> Option<Body> {
    let mut pts = Vec::new();
    for g in gens {
        pts.push(g.iter().map(|&x| q(x)).collect::<Vec<_>>());
        pts.push(g.iter().map(|&x| q(-x)).collect());
    }
    VPolytope::hull(pts).ok().filter(|b| b.is_full_dim())
}

fn body(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Body> {
    dims.prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-4i64..=4, n), n..=n + 2))
        .prop_filter_map("full-dimensional", |g| symmetric_hull(&g))
}

fn scale(b: &Body, c: i64) -> Body {
    b.scale(&q(c))
}

fn permutation(n: usize, shift: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| (0..n).map(|j| q(i64::from(j == (i + shift) % n))).collect())
        .collect()
}

/// `x ∈ Q_k(K)` iff every `k`-coordinate projection of `x` lies in that of `K`.
fn q_oracle(body: &Body, k: usize, x: &[Rational]) -> bool {
    CoordSubset::all_of_size(body.dim(), k).iter().all(|s| {
        let p = project(body, s).unwrap();
        p.to_h().unwrap().contains(&s.restrict(x))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn h_v_round_trip(k in body(2..=4)) {
        let h = k.to_h().unwrap();
        prop_assert!(h.to_v().unwrap().same_set(&k));
        prop_assert!(h.to_v().unwrap().to_h().unwrap().same_rows(&h));
    }

    #[test]
    fn polar_is_an_involution(k in body(2..=4)) {
        let back = k.polar().unwrap().polar().unwrap();
        prop_assert!(back.same_set(&k));
    }

    #[test]
    fn polarity_reverses_inclusion(a in body(2..=3)) {
        let b = scale(&a, 2);
        prop_assert!(inclusion(&a, &b.to_h().unwrap(), &q(1)).unwrap());
        let pb = b.polar().unwrap().to_v().unwrap();
        prop_assert!(inclusion(&pb, &a.polar().unwrap(), &q(1)).unwrap());
        let pa = a.polar().unwrap().to_v().unwrap();
        prop_assert!(!inclusion(&pa, &b.polar().unwrap(), &q(1)).unwrap());
    }

    #[test]
    fn radial_of_polar_inverts_support(k in body(2..=3), u in prop::collection::vec(-3i64..=3, 3)) {
        let u: Vec<Rational> = u[..k.dim()].iter().map(|&x| q(x)).collect();
        prop_assume!(u.iter().any(|x| *x != q(0)));
        let t = ray_extent(&k.polar().unwrap(), &u).unwrap();
        prop_assert_eq!(t * support(&k, &u).unwrap(), q(1));
    }

    #[test]
    fn hull_is_idempotent(k in body(2..=4)) {
        let mut pts = k.vertices().to_vec();
        let n = k.dim();
        for w in k.vertices().windows(2) {
            pts.push((0..n).map(|i| (w[0][i].clone() + w[1][i].clone()) / q(2)).collect());
        }
        pts.push(vec![q(0); n]);
        prop_assert!(VPolytope::hull(pts).unwrap().same_set(&k));
        prop_assert!(VPolytope::hull(k.vertices().to_vec()).unwrap().same_set(&k));
    }

    #[test]
    fn minkowski_sum_commutes(a in body(2..=3), b in body(2..=3)) {
        prop_assume!(a.dim() == b.dim());
        let ab = minkowski_sum(&a, &b).unwrap();
        prop_assert!(ab.same_set(&minkowski_sum(&b, &a).unwrap()));
        prop_assert!(inclusion(&a, &ab.to_h().unwrap(), &q(1)).unwrap());
    }

    #[test]
    fn section_restricts_rows(k in body(3..=4)) {
        let h = k.to_h().unwrap();
        prop_assert!(section(&h, &CoordSubset::full(k.dim())).unwrap().same_rows(&h));
        for s in CoordSubset::all_of_size(k.dim(), 2) {
            let sec = section(&h, &s).unwrap().to_v().unwrap();
            for y in sec.vertices() {
                prop_assert!(h.contains(&s.embed(y, q(0))));
            }
        }
    }

    #[test]
    fn inclusion_of_own_description_is_tight(k in body(2..=4)) {
        let h = k.to_h().unwrap();
        prop_assert!(inclusion(&k, &h, &q(1)).unwrap());
        prop_assert!(!inclusion(&k, &h, &Rational::from_ratio(999, 1000)).unwrap());
    }

    #[test]
    fn q_hull_matches_projection_oracle(
        k in body(3..=3),
        pts in prop::collection::vec(prop::collection::vec(-8i64..=8, 3), 12),
    ) {
        for level in 1..=3 {
            let qk = q_hull(&k, level).unwrap();
            for p in &pts {
                let x: Vec<Rational> = p.iter().map(|&v| Rational::from_ratio(v, 2)).collect();
                prop_assert_eq!(qk.contains(&x), q_oracle(&k, level, &x));
            }
        }
    }

    #[test]
    fn r_hull_vertices_come_from_sections(k in body(3..=4)) {
        let h = k.to_h().unwrap();
        let n = k.dim();
        for level in 1..=n {
            let r = r_hull(&h, level).unwrap();
            let rh = r.to_h().unwrap();
            for v in r.vertices() {
                let support = v.iter().filter(|x| **x != q(0)).count();
                prop_assert!(support <= level && h.contains(v));
            }
            // Every section vertex lies in R_k.
            for s in CoordSubset::all_of_size(n, level) {
                for y in crosshull::section(&h, &s).unwrap().to_v().unwrap().vertices() {
                    prop_assert!(rh.contains(&s.embed(y, q(0))));
                }
            }
        }
    }

    #[test]
    fn hulls_commute_with_permutation_and_scaling(k in body(3..=3), shift in 1usize..3) {
        let p = permutation(3, shift);
        let pk = k.linear_image(&p).unwrap();
        let kh = k.to_h().unwrap();
        let pkh = pk.to_h().unwrap();
        for level in 1..=2 {
            let a = q_hull(&pk, level).unwrap().to_v().unwrap();
            let b = q_hull(&k, level).unwrap().to_v().unwrap().linear_image(&p).unwrap();
            prop_assert!(a.same_set(&b));
            let a = r_hull(&pkh, level).unwrap();
            let b = r_hull(&kh, level).unwrap().linear_image(&p).unwrap();
            prop_assert!(a.same_set(&b));
            let a = q_hull(&scale(&k, 3), level).unwrap().to_v().unwrap();
            prop_assert!(a.same_set(&scale(&q_hull(&k, level).unwrap().to_v().unwrap(), 3)));
            let a = r_hull(&scale(&k, 3).to_h().unwrap(), level).unwrap();
            prop_assert!(a.same_set(&scale(&r_hull(&kh, level).unwrap(), 3)));
        }
    }

    #[test]
    fn greedy_frame_invariants(k in body(2..=4)) {
        let f = greedy_frame(&k, 0.0, 0).unwrap();
        prop_assert!(f.validate(1e-9).is_ok());
        prop_assert!((f.determinant() - 1.0).abs() < 1e-9);
        prop_assert!(f.rho_nonincreasing(1e-9));
        // The first length is the largest vertex norm.
        let top = k.vertices().iter().map(|v| v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()).fold(0.0, f64::max);
        prop_assert!((f.rho[0] - top).abs() < 1e-9);
    }

    #[test]
    fn factors_are_invariant_under_coordinate_sign_flips(k in body(2..=4), flips in prop::collection::vec(any::<bool>(), 4)) {
        let n = k.dim();
        let sign = |i: usize| if flips[i] { -1.0 } else { 1.0 };
        let d: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i != j { q(0) } else { Rational::from_f64(sign(i)) }).collect())
            .collect();
        let dk = k.linear_image(&d).unwrap();
        let a = greedy_frame(&k, 0.0, 0).unwrap();
        let b = greedy_frame(&dk, 0.0, 0).unwrap();
        prop_assert!((a.rho[0] - b.rho[0]).abs() < 1e-9 * a.rho[0]);
        // U D^{-1} rotates DK onto UK; flipping u_n restores orientation and
        // only reflects one coordinate.
        let mut flipped = a.clone();
        for u in &mut flipped.vectors {
            for (i, x) in u.iter_mut().enumerate() {
                *x *= sign(i);
            }
        }
        if flipped.determinant() < 0.0 {
            flipped.vectors[n - 1].iter_mut().for_each(|x| *x = -*x);
        }
        let ra = verify_factor(&k, &a, 3.0, 1e-7).unwrap();
        let rb = verify_factor(&dk, &flipped, 3.0, 1e-7).unwrap();
        for (x, y) in ra.records.iter().zip(&rb.records) {
            prop_assert!((x.c_star - y.c_star).abs() < 1e-9 * x.c_star.max(1.0));
        }
    }

    #[test]
    fn rotation_preserves_euclidean_diameter(k in body(2..=4)) {
        let f = greedy_frame(&k, 0.0, 0).unwrap();
        let uk = rotate(&k, &f).unwrap();
        let before = diameter(&k, 2.0).unwrap();
        prop_assert!((diameter(&uk, 2.0).unwrap() - before).abs() < 1e-9 * before);
    }
}
