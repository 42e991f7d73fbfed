//! Seeded generators for symmetric test bodies with integer coordinates.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{linalg, parse_rational, HPolytope, Halfspace, Polytope, Rational, Scalar, VPolytope};

/// Resampling budget for full-dimensionality.
pub const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// Hull of `±v_i` for random integer vectors `v_i`.
    VRandom,
    /// Random symmetric slabs `|⟨a_i, x⟩| ≤ 1` inside a bounding box.
    HRandom,
    Named,
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "v-random" => Ok(GenKind::VRandom),
            "h-random" => Ok(GenKind::HRandom),
            "named" => Ok(GenKind::Named),
            _ => Err(format!("unknown body kind {s:?} (expected v-random, h-random or named)")),
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::VRandom => "v-random",
            GenKind::HRandom => "h-random",
            GenKind::Named => "named",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedBody {
    /// `[-1, 1]^n`.
    Cube,
    /// `conv{±e_i}`.
    Cross,
    /// `conv(Δ ∪ -Δ)` for the simplex `Δ = conv{e_1, …, e_n, -(e_1 + … + e_n)}`.
    SimplexSym,
    /// `[-a_1, a_1] × … × [-a_n, a_n]`, half-widths as `p/q` strings.
    Box(Vec<String>),
}

impl FromStr for NamedBody {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cube" => Ok(NamedBody::Cube),
            "cross" => Ok(NamedBody::Cross),
            "simplex-sym" => Ok(NamedBody::SimplexSym),
            _ => {
                let inner = s
                    .strip_prefix("box(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown body name {s:?}"))?;
                let widths: Vec<String> = inner.split(',').map(|w| w.trim().to_string()).collect();
                for w in &widths {
                    let a = parse_rational(w)?;
                    if a <= Rational::zero() {
                        return Err(format!("box half-width {w} must be positive"));
                    }
                }
                Ok(NamedBody::Box(widths))
            }
        }
    }
}

impl fmt::Display for NamedBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedBody::Cube => f.write_str("cube"),
            NamedBody::Cross => f.write_str("cross"),
            NamedBody::SimplexSym => f.write_str("simplex-sym"),
            NamedBody::Box(a) => write!(f, "box({})", a.join(",")),
        }
    }
}

/// Everything needed to reproduce one generated body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    /// Number of vertex pairs (v-random) or slab pairs (h-random).
    pub size: usize,
    pub coeff_bound: i64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<NamedBody>,
}

impl GenSpec {
    pub fn v_random(n: usize, size: usize, coeff_bound: i64, seed: u64) -> Self {
        Self {
            kind: GenKind::VRandom,
            n,
            size,
            coeff_bound,
            seed,
            name: None,
        }
    }

    pub fn named(name: NamedBody, n: usize) -> Self {
        Self {
            kind: GenKind::Named,
            n,
            size: n,
            coeff_bound: 1,
            seed: 0,
            name: Some(name),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n must be at least 2, got {}", self.n)));
        }
        match self.kind {
            GenKind::Named => match &self.name {
                None => Err(Error::InvalidArgument("named bodies need a name".into())),
                Some(NamedBody::Box(a)) if a.len() != self.n => Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: a.len(),
                }),
                Some(_) => Ok(()),
            },
            _ if self.size < self.n => Err(Error::InvalidArgument(format!(
                "size must be at least n = {}, got {}",
                self.n, self.size
            ))),
            _ if self.coeff_bound < 1 => Err(Error::InvalidArgument("coefficient bound must be positive".into())),
            _ => Ok(()),
        }
    }
}

fn q(x: i64) -> Rational {
    Rational::from_i64(x)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<Rational> {
    (0..n).map(|_| q(rng.gen_range(-bound..=bound))).collect()
}

fn symmetric_hull(points: Vec<Vec<Rational>>) -> Result<VPolytope<Rational>> {
    let mut all = Vec::with_capacity(2 * points.len());
    for p in points {
        all.push(p.iter().map(|x| -x.clone()).collect());
        all.push(p);
    }
    VPolytope::hull(all)
}

fn named_body(name: &NamedBody, n: usize) -> Result<VPolytope<Rational>> {
    let unit = |i: usize| -> Vec<Rational> { (0..n).map(|j| q((i == j) as i64)).collect() };
    match name {
        NamedBody::Cube => {
            let pts = (0..1u64 << n)
                .map(|mask| (0..n).map(|i| q(if mask >> i & 1 == 1 { 1 } else { -1 })).collect())
                .collect();
            VPolytope::hull(pts)
        }
        NamedBody::Cross => symmetric_hull((0..n).map(unit).collect()),
        NamedBody::SimplexSym => {
            let mut pts: Vec<Vec<Rational>> = (0..n).map(unit).collect();
            pts.push(vec![q(-1); n]);
            symmetric_hull(pts)
        }
        NamedBody::Box(widths) => {
            let a = widths
                .iter()
                .map(|w| parse_rational(w).map_err(Error::InvalidArgument))
                .collect::<Result<Vec<_>>>()?;
            let pts = (0..1u64 << n)
                .map(|mask| {
                    (0..n)
                        .map(|i| if mask >> i & 1 == 1 { a[i].clone() } else { -a[i].clone() })
                        .collect()
                })
                .collect();
            VPolytope::hull(pts)
        }
    }
}

/// Generates the body described by `spec`, in exact arithmetic.
pub fn gen_body(spec: &GenSpec) -> Result<Polytope<Rational>> {
    spec.validate()?;
    let n = spec.n;
    if spec.kind == GenKind::Named {
        let name = spec.name.as_ref().expect("validated");
        return Ok(Polytope::V(named_body(name, n)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_ATTEMPTS {
        let vs: Vec<Vec<Rational>> = (0..spec.size)
            .map(|_| random_vector(&mut rng, n, spec.coeff_bound))
            .collect();
        if linalg::rank(&vs, 0.0) < n {
            continue;
        }
        return Ok(match spec.kind {
            GenKind::VRandom => Polytope::V(symmetric_hull(vs)?),
            _ => {
                let mut rows = Vec::with_capacity(2 * (spec.size + n));
                for a in vs.into_iter().filter(|a| a.iter().any(|x| !x.is_zero_tol(0.0))) {
                    rows.push(Halfspace::new(a.iter().map(|x| -x.clone()).collect(), q(1)));
                    rows.push(Halfspace::new(a, q(1)));
                }
                for i in 0..n {
                    let mut e = vec![q(0); n];
                    e[i] = q(1);
                    rows.push(Halfspace::new(e.clone(), q(spec.coeff_bound)));
                    e[i] = q(-1);
                    rows.push(Halfspace::new(e, q(spec.coeff_bound)));
                }
                Polytope::H(HPolytope::new(n, rows)?)
            }
        });
    }
    Err(Error::GenerationFailed(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_counts() {
        let cube = gen_body(&GenSpec::named(NamedBody::Cube, 3)).unwrap().to_v().unwrap();
        assert_eq!(cube.vertices().len(), 8);
        let cross = gen_body(&GenSpec::named(NamedBody::Cross, 4)).unwrap().to_v().unwrap();
        assert_eq!(cross.vertices().len(), 8);
        let s = gen_body(&GenSpec::named(NamedBody::SimplexSym, 3)).unwrap().to_v().unwrap();
        assert_eq!(s.vertices().len(), 8);
        let b = gen_body(&GenSpec::named("box(2,1/2)".parse().unwrap(), 2)).unwrap().to_v().unwrap();
        assert!(b.vertices().contains(&vec![q(2), Rational::from_ratio(1, 2)]));
    }

    #[test]
    fn random_is_reproducible_and_full() {
        let spec = GenSpec::v_random(3, 5, 4, 42);
        let a = gen_body(&spec).unwrap();
        assert_eq!(a, gen_body(&spec).unwrap());
        let v = a.to_v().unwrap();
        assert!(v.is_full_dim() && v.is_symmetric());
        let h = GenSpec {
            kind: GenKind::HRandom,
            ..spec
        };
        let p = gen_body(&h).unwrap().to_v().unwrap();
        assert!(p.is_full_dim() && p.is_symmetric());
    }

    #[test]
    fn bad_specs() {
        assert!(gen_body(&GenSpec::v_random(1, 3, 2, 0)).is_err());
        assert!(gen_body(&GenSpec::v_random(3, 2, 2, 0)).is_err());
        assert!("box(1,-1)".parse::<NamedBody>().is_err());
        assert!("sphere".parse::<NamedBody>().is_err());
    }
}
