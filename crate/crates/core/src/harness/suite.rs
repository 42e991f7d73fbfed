//! Experiment drivers. Each suite generates a corpus of bodies, runs one
//! family of checks on every body and emits one report per body.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::gen::{gen_body, GenKind, GenSpec, NamedBody};
use crate::error::{Error, Result};
use crate::frames::{eta_slack, greedy_frame, verify_dual_factor, verify_factor, Frame, FACTOR_REL_TOL};
use crate::hulls::{check_step1, check_step2, diameter_l2_squared, q_hull_with_vertices, verify_duality, HullFamily};
use crate::kernel::{inclusion, linalg, max_norm, Mode, Polytope, Rational, Scalar, VPolytope, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Duality,
    Nesting,
    Factor,
    DualFactor,
    DiamRatio,
    StepLemmas,
    EtaSweep,
    BallRatio,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 8] = [
        SuiteKind::Duality,
        SuiteKind::Nesting,
        SuiteKind::Factor,
        SuiteKind::DualFactor,
        SuiteKind::DiamRatio,
        SuiteKind::StepLemmas,
        SuiteKind::EtaSweep,
        SuiteKind::BallRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Duality => "duality",
            SuiteKind::Nesting => "nesting",
            SuiteKind::Factor => "factor",
            SuiteKind::DualFactor => "dual-factor",
            SuiteKind::DiamRatio => "diam-ratio",
            SuiteKind::StepLemmas => "step-lemmas",
            SuiteKind::EtaSweep => "eta-sweep",
            SuiteKind::BallRatio => "ball-ratio",
        }
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: SuiteKind,
    /// Bodies to generate; ignored by `ball-ratio`, which runs once per dimension.
    pub bodies: usize,
    /// Dimensions, cycled through by body index.
    pub dims: Vec<usize>,
    pub kind: GenKind,
    /// Vertex or slab pairs per body; `None` means `n + 2`.
    pub size: Option<usize>,
    pub coeff_bound: i64,
    pub seed: u64,
    pub mode: Mode,
    pub tol: f64,
    pub factor: f64,
    pub rel_tol: f64,
    /// Relaxation parameters for `eta-sweep`.
    pub etas: Vec<f64>,
    pub timings: bool,
}

impl SuiteConfig {
    pub fn new(suite: SuiteKind) -> Self {
        Self {
            suite,
            bodies: 20,
            dims: vec![2, 3, 4],
            kind: GenKind::VRandom,
            size: None,
            coeff_bound: 5,
            seed: 0,
            mode: Mode::Exact,
            tol: DEFAULT_TOL,
            factor: 3.0,
            rel_tol: FACTOR_REL_TOL,
            etas: vec![0.0, 0.05, 0.1],
            timings: false,
        }
    }

    /// Generation parameters of body `index`; seeds are drawn from one stream so that the
    /// corpus depends only on the base seed.
    pub fn body_spec(&self, index: usize) -> GenSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut seed = 0;
        for _ in 0..=index {
            seed = rng.gen::<u64>();
        }
        let n = self.dims[index % self.dims.len()];
        GenSpec {
            kind: self.kind,
            n,
            size: self.size.unwrap_or(n + 2),
            coeff_bound: self.coeff_bound,
            seed,
            name: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    #[default]
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One check at one level `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct KRecord {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    pub c_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_star_polar: Option<f64>,
    pub diam_ratio_p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diam_ratio_p1_5: Option<f64>,
    pub diam_ratio_p2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diam_ratio_p3: Option<f64>,
    pub diam_ratio_pinf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub suite: SuiteKind,
    pub index: usize,
    pub body_digest: String,
    pub n: usize,
    pub mode: Mode,
    pub records: Vec<KRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<Frame>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.records.iter().all(|r| r.verdict == Verdict::Pass)
    }
}

/// SHA-256 of the body's canonical JSON.
pub fn body_digest<F: Scalar>(body: &Polytope<F>) -> String {
    let text = serde_json::to_string(&body.to_json()).expect("JSON values serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn exact_body(spec: &GenSpec) -> Result<VPolytope<Rational>> {
    gen_body(spec)?.to_v()
}

fn duality_records(body: &VPolytope<Rational>) -> Result<Vec<KRecord>> {
    (1..=body.dim())
        .map(|k| {
            Ok(KRecord {
                k,
                verdict: Verdict::from_bool(verify_duality(body, k)?),
                ..Default::default()
            })
        })
        .collect()
}

fn nesting_records<F: Scalar>(body: &VPolytope<F>) -> Result<Vec<KRecord>> {
    let n = body.dim();
    let qf = HullFamily::q(body)?;
    let rf = HullFamily::r(body)?;
    let kh = body.to_h()?;
    let one = F::one();
    (1..=n)
        .map(|k| {
            let (qh, _) = qf.level(k).expect("level exists");
            let (rh, rv) = rf.level(k).expect("level exists");
            let mut ok = inclusion(rv, &kh, &one)? && inclusion(body, qh, &one)?;
            if k >= 2 {
                let (qh_prev, _) = qf.level(k - 1).expect("level exists");
                let (_, rv_prev) = rf.level(k - 1).expect("level exists");
                ok &= inclusion(&qf.levels[k - 1].1, qh_prev, &one)? && inclusion(rv_prev, rh, &one)?;
            }
            if k == n {
                ok &= qf.terminal_matches_body() && rf.terminal_matches_body();
            }
            Ok(KRecord {
                k,
                verdict: Verdict::from_bool(ok),
                ..Default::default()
            })
        })
        .collect()
}

fn factor_records<F: Scalar>(body: &VPolytope<F>, cfg: &SuiteConfig, eta: f64, seed: u64) -> Result<(Vec<KRecord>, Frame)> {
    let frame = greedy_frame(body, eta, seed)?;
    let c = cfg.factor + eta_slack(eta);
    let rep = verify_factor(body, &frame, c, cfg.rel_tol)?;
    let records = rep
        .records
        .iter()
        .map(|r| KRecord {
            k: r.k,
            eta: (cfg.suite == SuiteKind::EtaSweep).then_some(eta),
            c_star: Some(r.c_star),
            threshold: Some(c),
            verdict: Verdict::from_bool(r.pass),
            ..Default::default()
        })
        .collect();
    Ok((records, frame))
}

fn dual_records<F: Scalar>(body: &VPolytope<F>, cfg: &SuiteConfig, seed: u64) -> Result<(Vec<KRecord>, Frame)> {
    let polar = body.polar()?.to_v()?;
    let frame = greedy_frame(&polar, 0.0, seed)?;
    let rep = verify_dual_factor(body, &frame, cfg.factor, cfg.rel_tol)?;
    let bound = cfg.factor * (1.0 + cfg.rel_tol);
    let records = rep
        .records
        .iter()
        .map(|r| {
            let d = &r.diam_ratios;
            let ok = match cfg.suite {
                SuiteKind::DiamRatio => d.iter().all(|x| *x <= bound),
                _ => r.pass,
            };
            KRecord {
                k: r.k,
                c_star: Some(r.c_star),
                c_star_polar: Some(r.c_star_polar),
                diam_ratio_p1: Some(d[0]),
                diam_ratio_p1_5: Some(d[1]),
                diam_ratio_p2: Some(d[2]),
                diam_ratio_p3: Some(d[3]),
                diam_ratio_pinf: Some(d[4]),
                threshold: Some(cfg.factor),
                verdict: Verdict::from_bool(ok),
                ..Default::default()
            }
        })
        .collect();
    Ok((records, frame))
}

/// One instance of each step lemma built from the body and the seed.
///
/// The first lemma uses the direction of a random vertex `v` with an `η`
/// drawn from `[1 - ‖v‖/‖L‖, 1)`, so the hypothesis holds by construction.
/// The second uses `e = e_1`, a random radius and the symmetric hull of random
/// integer vectors with vanishing first coordinate.
fn step_records(body: &VPolytope<Rational>, cfg: &SuiteConfig, seed: u64) -> Result<Vec<KRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = body.dim();

    let l: VPolytope<f64> = body.convert(cfg.tol);
    let v = &l.vertices()[rng.gen_range(0..l.vertices().len())];
    let norm = linalg::norm2(v);
    let e: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let eta_min = (1.0 - norm / max_norm(&l)).max(0.0);
    let eta = (eta_min + rng.gen::<f64>() * (1.0 - eta_min) * 0.9 + 1e-6).min(0.999);
    let step1 = check_step1(&l, &e, eta)?;

    let r = Rational::from_i64(rng.gen_range(1..=cfg.coeff_bound));
    let pairs = rng.gen_range(1..=n);
    let pts: Vec<Vec<Rational>> = (0..pairs)
        .flat_map(|_| {
            let mut w: Vec<Rational> = (0..n)
                .map(|_| Rational::from_i64(rng.gen_range(-cfg.coeff_bound..=cfg.coeff_bound)))
                .collect();
            w[0] = Rational::zero();
            let neg = w.iter().map(|x| -x.clone()).collect();
            [w, neg]
        })
        .collect();
    let m = VPolytope::hull(pts)?;
    let mut e1 = vec![Rational::zero(); n];
    e1[0] = Rational::one();
    let step2 = check_step2(&r, &m, &e1)?;

    Ok(vec![
        KRecord {
            k: n,
            check: Some("step1".into()),
            eta: Some(eta),
            verdict: Verdict::from_bool(step1),
            ..Default::default()
        },
        KRecord {
            k: n,
            check: Some("step2".into()),
            threshold: Some(3.0),
            verdict: Verdict::from_bool(step2),
            ..Default::default()
        },
    ])
}

/// `diam_2 Q_1(cross_n) / diam_2 cross_n`, checked exactly through squares.
fn ball_records(n: usize) -> Result<(VPolytope<Rational>, Vec<KRecord>)> {
    let cross = gen_body(&GenSpec::named(NamedBody::Cross, n))?.to_v()?;
    let (_, q1) = q_hull_with_vertices(&cross, 1)?;
    let ratio_sq = diameter_l2_squared(&q1) / diameter_l2_squared(&cross);
    let ok = ratio_sq == Rational::from_i64(n as i64);
    let record = KRecord {
        k: 1,
        diam_ratio_p2: Some(ratio_sq.to_f64().sqrt()),
        threshold: Some((n as f64).sqrt()),
        verdict: Verdict::from_bool(ok),
        ..Default::default()
    };
    Ok((cross, vec![record]))
}

fn run_generic<F: Scalar>(body: &VPolytope<F>, cfg: &SuiteConfig, seed: u64) -> Result<(Vec<KRecord>, Option<Frame>)> {
    match cfg.suite {
        SuiteKind::Nesting => Ok((nesting_records(body)?, None)),
        SuiteKind::Factor => factor_records(body, cfg, 0.0, seed).map(|(r, f)| (r, Some(f))),
        SuiteKind::DualFactor | SuiteKind::DiamRatio => dual_records(body, cfg, seed).map(|(r, f)| (r, Some(f))),
        SuiteKind::EtaSweep => {
            let mut records = Vec::new();
            let mut last = None;
            for &eta in &cfg.etas {
                let (r, f) = factor_records(body, cfg, eta, seed)?;
                records.extend(r);
                last = Some(f);
            }
            Ok((records, last))
        }
        _ => unreachable!("handled by the caller"),
    }
}

fn run_one(cfg: &SuiteConfig, index: usize) -> ExperimentReport {
    let start = Instant::now();
    let spec = cfg.body_spec(index);
    let mut report = ExperimentReport {
        suite: cfg.suite,
        index,
        body_digest: String::new(),
        n: spec.n,
        mode: cfg.mode,
        records: Vec::new(),
        frame: None,
        error: None,
        elapsed_ms: None,
    };
    let outcome = (|| -> Result<()> {
        if cfg.suite == SuiteKind::BallRatio {
            let (body, records) = ball_records(spec.n)?;
            report.body_digest = body_digest(&Polytope::V(body));
            report.mode = Mode::Exact;
            report.records = records;
            return Ok(());
        }
        let body = exact_body(&spec)?;
        let exact_only = matches!(cfg.suite, SuiteKind::Duality | SuiteKind::StepLemmas);
        match cfg.mode {
            Mode::Exact => {
                report.body_digest = body_digest(&Polytope::V(body.clone()));
            }
            Mode::Approx if exact_only => {
                report.body_digest = body_digest(&Polytope::V(body.clone()));
                report.mode = Mode::Exact;
            }
            Mode::Approx => {
                report.body_digest = body_digest(&Polytope::V(body.convert::<f64>(cfg.tol)));
            }
        }
        match cfg.suite {
            SuiteKind::Duality => report.records = duality_records(&body)?,
            SuiteKind::StepLemmas => report.records = step_records(&body, cfg, spec.seed)?,
            _ => {
                let (records, frame) = match cfg.mode {
                    Mode::Exact => run_generic(&body, cfg, spec.seed)?,
                    Mode::Approx => run_generic(&body.convert::<f64>(cfg.tol), cfg, spec.seed)?,
                };
                report.records = records;
                report.frame = frame;
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        report.error = Some(e.to_string());
    }
    if cfg.timings {
        report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    report
}

/// Runs the configured suite. Reports come back in generation order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<ExperimentReport>> {
    if cfg.dims.is_empty() || cfg.dims.iter().any(|&n| n < 2) {
        return Err(Error::InvalidArgument("dimensions must be at least 2".into()));
    }
    let count = if cfg.suite == SuiteKind::BallRatio { cfg.dims.len() } else { cfg.bodies };
    Ok((0..count).into_par_iter().map(|i| run_one(cfg, i)).collect())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    body_digest: &'a str,
    n: usize,
    k: usize,
    c_star: Option<f64>,
    diam_ratio_p1: Option<f64>,
    diam_ratio_p2: Option<f64>,
    diam_ratio_pinf: Option<f64>,
    verdict: Verdict,
}

/// One CSV row per record; a report that errored gets a single failing row.
pub fn write_csv<W: Write>(reports: &[ExperimentReport], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidArgument(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    for rep in reports {
        let rows: Vec<CsvRow> = if rep.error.is_some() || rep.records.is_empty() {
            vec![CsvRow {
                body_digest: &rep.body_digest,
                n: rep.n,
                k: 0,
                c_star: None,
                diam_ratio_p1: None,
                diam_ratio_p2: None,
                diam_ratio_pinf: None,
                verdict: Verdict::from_bool(rep.passed()),
            }]
        } else {
            rep.records
                .iter()
                .map(|r| CsvRow {
                    body_digest: &rep.body_digest,
                    n: rep.n,
                    k: r.k,
                    c_star: r.c_star,
                    diam_ratio_p1: r.diam_ratio_p1,
                    diam_ratio_p2: r.diam_ratio_p2,
                    diam_ratio_pinf: r.diam_ratio_pinf,
                    verdict: r.verdict,
                })
                .collect()
        };
        for row in rows {
            w.serialize(row).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("writing CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: SuiteKind) -> SuiteConfig {
        SuiteConfig {
            bodies: 4,
            dims: vec![2, 3],
            seed: 11,
            ..SuiteConfig::new(suite)
        }
    }

    #[test]
    fn every_suite_passes_on_a_small_corpus() {
        for suite in SuiteKind::ALL {
            let reports = run_suite(&small(suite)).unwrap();
            for r in &reports {
                assert!(r.passed(), "{suite}: {r:?}");
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = small(SuiteKind::Factor);
        let a = serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite() {
        assert_eq!("bogus".parse::<SuiteKind>().unwrap_err(), Error::UnknownSuite("bogus".into()));
    }

    #[test]
    fn csv_has_expected_header() {
        let reports = run_suite(&small(SuiteKind::BallRatio)).unwrap();
        let mut buf = Vec::new();
        write_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("body_digest,n,k,c_star,diam_ratio_p1,diam_ratio_p2,diam_ratio_pinf,verdict\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
