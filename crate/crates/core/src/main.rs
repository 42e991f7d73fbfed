use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crosshull::frames::{greedy_frame, verify_dual_factor, verify_factor, Frame, FACTOR_REL_TOL};
use crosshull::harness::{gen_body, run_suite, write_csv, GenKind, GenSpec, NamedBody, SuiteConfig, SuiteKind};
use crosshull::hulls::{diameter, diameter_l2_squared, q_hull, r_hull, verify_duality};
use crosshull::{AnyPolytope, Error, Mode, Polytope, Result, Scalar, VPolytope, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "crosshull", version, about = "k-convex hulls, k-cross approximations and greedy frames of symmetric polytopes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Arithmetic for the computation (default: that of the input).
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Comparison tolerance in approx mode.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, env = "CROSSHULL_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Approx => Mode::Approx,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a symmetric body.
    Gen {
        #[arg(long, default_value = "v-random")]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        /// Vertex or slab pairs (default n + 2).
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 5)]
        coeff_bound: i64,
        /// cube, cross, simplex-sym or box(a1,...,an).
        #[arg(long)]
        name: Option<NamedBody>,
    },
    /// k-convex hull, as facets.
    Qhull {
        #[arg(long)]
        k: usize,
        input: Option<PathBuf>,
    },
    /// k-cross approximation, as vertices.
    Rhull {
        #[arg(long)]
        k: usize,
        input: Option<PathBuf>,
    },
    /// Polar body, in the opposite representation.
    Polar { input: Option<PathBuf> },
    /// Diameter in the l_p norm.
    Diam {
        /// Exponent p >= 1, or "inf".
        #[arg(long, value_parser = parse_exponent)]
        p: f64,
        input: Option<PathBuf>,
    },
    /// Check that the polar of Q_k(K) equals R_k of the polar (exact only).
    Duality {
        /// Level to check (default: all).
        #[arg(long)]
        k: Option<usize>,
        input: Option<PathBuf>,
    },
    /// Greedy frame of a body; the body is embedded in the output.
    Frame {
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        /// Take the frame of the polar body instead.
        #[arg(long)]
        polar: bool,
        input: Option<PathBuf>,
    },
    /// Least factors with R_k(UK) inside c R_{k-1}(UK).
    Verify {
        #[arg(long, default_value_t = 3.0)]
        factor: f64,
        /// Levels to report, e.g. 2..4 (default: all).
        #[arg(long, value_parser = parse_range)]
        k_range: Option<(usize, usize)>,
        #[arg(long, default_value_t = FACTOR_REL_TOL)]
        rel_tol: f64,
        /// Frame file (default: embedded frame, else the greedy frame of the body).
        #[arg(long)]
        frame: Option<PathBuf>,
        input: Option<PathBuf>,
    },
    /// Least factors with Q_{k-1}(UK) inside c Q_k(UK), checked both ways.
    VerifyDual {
        #[arg(long, default_value_t = 3.0)]
        factor: f64,
        #[arg(long, default_value_t = FACTOR_REL_TOL)]
        rel_tol: f64,
        /// Frame file (default: embedded frame, else the greedy frame of the polar).
        #[arg(long)]
        frame: Option<PathBuf>,
        input: Option<PathBuf>,
    },
    /// Run an experiment suite; JSON lines to the output, optional CSV.
    Suite {
        /// duality, nesting, factor, dual-factor, diam-ratio, step-lemmas, eta-sweep or ball-ratio.
        name: String,
        #[arg(long, default_value_t = 20)]
        bodies: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        #[arg(long, default_value = "v-random")]
        kind: GenKind,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 5)]
        coeff_bound: i64,
        #[arg(long, default_value_t = 3.0)]
        factor: f64,
        #[arg(long, default_value_t = FACTOR_REL_TOL)]
        rel_tol: f64,
        /// Relaxations for eta-sweep.
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1")]
        eta: Vec<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include wall-clock times (makes reports nondeterministic).
        #[arg(long)]
        timings: bool,
    },
}

fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" | "infinity" | "Inf" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|e| e.to_string()),
    }
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let bad = || format!("expected a level or a range like 2..4, got {s:?}");
    let (a, b) = match s.split_once("..").or_else(|| s.split_once('-')) {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// Rendered output and whether every check in it passed.
struct Outcome {
    output: String,
    ok: bool,
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn done(v: Value, ok: bool) -> Outcome {
    Outcome { output: pretty(&v), ok }
}

fn read_json(path: &Option<PathBuf>) -> Result<Value> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::InvalidArgument(format!("stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Error::format("<root>", e.to_string()))
}

/// A body document, or a frame document carrying its body.
struct Input {
    body: AnyPolytope,
    frame: Option<Frame>,
}

fn parse_frame(v: &Value) -> Result<Frame> {
    let mut stripped = v.clone();
    if let Some(obj) = stripped.as_object_mut() {
        obj.remove("body");
    }
    let frame: Frame = serde_json::from_value(stripped).map_err(|e| Error::format("frame", e.to_string()))?;
    frame.validate(1e-6)?;
    Ok(frame)
}

fn load(path: &Option<PathBuf>, g: &Global) -> Result<Input> {
    let v = read_json(path)?;
    let (body, frame) = if v.get("vectors").is_some() {
        let body = v
            .get("body")
            .ok_or_else(|| Error::format("body", "frame document without an embedded body"))?;
        (AnyPolytope::from_json(body)?, Some(parse_frame(&v)?))
    } else {
        (AnyPolytope::from_json(&v)?, None)
    };
    let body = match g.mode {
        Some(m) => body.into_mode(m.into(), g.tol),
        None => body,
    };
    Ok(Input { body, frame })
}

fn load_frame(path: &PathBuf) -> Result<Frame> {
    parse_frame(&read_json(&Some(path.clone()))?)
}

macro_rules! with_body {
    ($any:expr, |$p:ident| $body:expr) => {
        match $any {
            AnyPolytope::Exact($p) => $body,
            AnyPolytope::Approx($p) => $body,
        }
    };
}

fn within(k: usize, range: Option<(usize, usize)>) -> bool {
    range.is_none_or(|(a, b)| (a..=b).contains(&k))
}

fn polar_v<F: Scalar>(p: &Polytope<F>) -> Result<VPolytope<F>> {
    match p {
        Polytope::V(v) => v.polar()?.to_v(),
        Polytope::H(h) => h.polar(),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    match cli.command {
        Command::Gen {
            kind,
            n,
            size,
            coeff_bound,
            name,
        } => {
            let spec = GenSpec {
                kind,
                n,
                size: size.unwrap_or(n + 2),
                coeff_bound,
                seed: g.seed,
                name,
            };
            let body = AnyPolytope::Exact(gen_body(&spec)?).into_mode(g.mode.map_or(Mode::Exact, Mode::from), g.tol);
            Ok(done(body.to_json(), true))
        }
        Command::Qhull { k, input } => {
            let inp = load(&input, g)?;
            with_body!(inp.body, |p| Ok(done(Polytope::H(q_hull(&p.to_v()?, k)?).to_json(), true)))
        }
        Command::Rhull { k, input } => {
            let inp = load(&input, g)?;
            with_body!(inp.body, |p| Ok(done(Polytope::V(r_hull(&p.to_h()?, k)?).to_json(), true)))
        }
        Command::Polar { input } => {
            let inp = load(&input, g)?;
            with_body!(inp.body, |p| {
                let out = match &p {
                    Polytope::V(v) => Polytope::H(v.polar()?),
                    Polytope::H(h) => Polytope::V(h.polar()?),
                };
                Ok(done(out.to_json(), true))
            })
        }
        Command::Diam { p: exponent, input } => {
            let inp = load(&input, g)?;
            let exact_sq = match &inp.body {
                AnyPolytope::Exact(p) if exponent == 2.0 => Some(diameter_l2_squared(&p.to_v()?).to_json()),
                _ => None,
            };
            let d = with_body!(inp.body, |p| diameter(&p.to_v()?, exponent)?);
            let p_json = if exponent.is_infinite() { json!("inf") } else { json!(exponent) };
            let mut out = json!({"p": p_json, "diameter": d});
            if let Some(sq) = exact_sq {
                out["diameter_squared"] = sq;
            }
            Ok(done(out, true))
        }
        Command::Duality { k, input } => {
            let inp = load(&input, g)?;
            let AnyPolytope::Exact(p) = inp.body else {
                return Err(Error::ExactRequired);
            };
            let v = p.to_v()?;
            let levels: Vec<usize> = match k {
                Some(k) => vec![k],
                None => (1..=v.dim()).collect(),
            };
            let mut results = Vec::new();
            let mut ok = true;
            for k in levels {
                let equal = verify_duality(&v, k)?;
                ok &= equal;
                results.push(json!({"k": k, "equal": equal}));
            }
            Ok(done(json!({ "results": results }), ok))
        }
        Command::Frame { eta, polar, input } => {
            let inp = load(&input, g)?;
            let frame = with_body!(&inp.body, |p| {
                if polar {
                    greedy_frame(&polar_v(p)?, eta, g.seed)?
                } else {
                    greedy_frame(&p.to_v()?, eta, g.seed)?
                }
            });
            let mut out = serde_json::to_value(&frame).expect("frames serialize");
            out["body"] = inp.body.to_json();
            Ok(done(out, true))
        }
        Command::Verify {
            factor,
            k_range,
            rel_tol,
            frame,
            input,
        } => {
            let inp = load(&input, g)?;
            let explicit = match &frame {
                Some(path) => Some(load_frame(path)?),
                None => inp.frame.clone(),
            };
            let mut report = with_body!(&inp.body, |p| {
                let v = p.to_v()?;
                let f = match explicit {
                    Some(f) => f,
                    None => greedy_frame(&v, 0.0, g.seed)?,
                };
                verify_factor(&v, &f, factor, rel_tol)?
            });
            report.records.retain(|r| within(r.k, k_range));
            let ok = report.passed();
            Ok(done(serde_json::to_value(&report).expect("reports serialize"), ok))
        }
        Command::VerifyDual {
            factor,
            rel_tol,
            frame,
            input,
        } => {
            let inp = load(&input, g)?;
            let explicit = match &frame {
                Some(path) => Some(load_frame(path)?),
                None => inp.frame.clone(),
            };
            let report = with_body!(&inp.body, |p| {
                let v = p.to_v()?;
                let f = match explicit {
                    Some(f) => f,
                    None => greedy_frame(&polar_v(p)?, 0.0, g.seed)?,
                };
                verify_dual_factor(&v, &f, factor, rel_tol)?
            });
            let ok = report.passed();
            Ok(done(serde_json::to_value(&report).expect("reports serialize"), ok))
        }
        Command::Suite {
            name,
            bodies,
            dims,
            kind,
            size,
            coeff_bound,
            factor,
            rel_tol,
            eta,
            csv,
            timings,
        } => {
            let suite: SuiteKind = name.parse()?;
            let cfg = SuiteConfig {
                suite,
                bodies,
                dims,
                kind,
                size,
                coeff_bound,
                seed: g.seed,
                mode: g.mode.map_or(Mode::Exact, Mode::from),
                tol: g.tol,
                factor,
                rel_tol,
                etas: eta,
                timings,
            };
            let reports = run_suite(&cfg)?;
            if let Some(path) = csv {
                let file = fs::File::create(&path)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                write_csv(&reports, file)?;
            }
            let mut output = String::new();
            for r in &reports {
                output.push_str(&serde_json::to_string(r).expect("reports serialize"));
                output.push('\n');
            }
            let ok = reports.iter().all(|r| r.passed());
            Ok(Outcome { output, ok })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.global.out.clone();
    match run(cli) {
        Ok(outcome) => {
            let written = match &out {
                Some(path) => fs::write(path, &outcome.output),
                None => io::stdout().write_all(outcome.output.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("crosshull: {e}");
                return ExitCode::from(2);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("crosshull: check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("crosshull: {e}");
            ExitCode::from(2)
        }
    }
}
