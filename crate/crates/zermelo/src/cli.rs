//! Command-line surface.
//!
//! Subcommands:
//!
//! * `plan --wind <file> --start x1,x2 --goal x1,x2 [--goal-radius r]
//!   [--t-ceiling t] [--out <file>] [--format csv|json]` — solve a
//!   navigation problem, print the arrival summary, optionally write the
//!   trajectory.
//! * `spray-dump --wind <file> --at x1,x2 --dir y1,y2` — constants ledger,
//!   polynomial values, and spray coefficients of an affine field, as JSON.
//! * `fit --wind <file> --rect a,b,c,d [--samples n]` — affine fit report.
//! * `verify [--seed n]` — run the invariant report; nonzero exit on any
//!   failing check.
//! * `export --traj <file>` — convert a stored JSON trajectory to CSV on
//!   standard output.
//!
//! Exit codes: 0 success; 1 failed verification checks; 2 parse, I/O, or
//! validation errors; 3 solver non-convergence.

use crate::affine_spray::{affine_constants, affine_polynomials, spray_with_constants};
use crate::error::Error;
use crate::geodesic::{GeodesicState, TerminalReason, Trajectory, TrajectorySample};
use crate::navigator::{solve_navigation, NavigationProblem};
use crate::randers::{metric_value, zeta_spray};
use crate::vec2::Vec2;
use crate::wind::{affine_fit, load_wind_spec, to_spec_json, Domain, WindField};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

const USAGE: &str = "\
usage: zermelo <subcommand> [options]

subcommands:
  plan --wind <file> --start x1,x2 --goal x1,x2
       [--goal-radius r] [--t-ceiling t] [--out <file>] [--format csv|json]
  spray-dump --wind <file> --at x1,x2 --dir y1,y2
  fit --wind <file> --rect a,b,c,d [--samples n]
  verify [--seed n]
  export --traj <file>
";

/// Run the CLI against an argument list (without the program name) and
/// return the process exit code.
pub fn run(args: &[String]) -> i32 {
    match dispatch(args) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("zermelo: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    message: String,
    code: i32,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            message: format!("{}\n{}", message.into(), USAGE),
            code: 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::NoConvergence { .. } | Error::GoalUnreachable => 3,
            _ => 2,
        };
        Failure {
            message: e.to_string(),
            code,
        }
    }
}

fn dispatch(args: &[String]) -> Result<i32, Failure> {
    let Some(sub) = args.first() else {
        return Err(Failure::usage("missing subcommand"));
    };
    let rest = &args[1..];
    match sub.as_str() {
        "plan" => plan(rest),
        "spray-dump" => spray_dump(rest),
        "fit" => fit(rest),
        "verify" => verify(rest),
        "export" => export(rest),
        other => Err(Failure::usage(format!("unknown subcommand `{other}`"))),
    }
}

/// Minimal flag parser: every option takes exactly one value.
struct Flags {
    pairs: Vec<(String, String)>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Flags, Failure> {
        let mut pairs = Vec::new();
        let mut it = args.iter();
        while let Some(flag) = it.next() {
            if !flag.starts_with("--") {
                return Err(Failure::usage(format!("unexpected argument `{flag}`")));
            }
            let Some(value) = it.next() else {
                return Err(Failure::usage(format!("flag `{flag}` needs a value")));
            };
            pairs.push((flag.trim_start_matches("--").to_string(), value.clone()));
        }
        Ok(Flags { pairs })
    }

    fn take(&self, name: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn require(&self, name: &str) -> Result<&str, Failure> {
        self.take(name)
            .ok_or_else(|| Failure::usage(format!("missing required flag `--{name}`")))
    }
}

fn parse_vec2(text: &str, what: &str) -> Result<Vec2, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Failure::usage(format!(
            "{what} must be two comma-separated numbers, got `{text}`"
        )));
    }
    let x = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|_| Failure::usage(format!("cannot parse `{}` in {what}", parts[0])))?;
    let y = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|_| Failure::usage(format!("cannot parse `{}` in {what}", parts[1])))?;
    Ok(Vec2::new(x, y))
}

fn parse_rect(text: &str) -> Result<Domain, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(Failure::usage(format!(
            "--rect must be four comma-separated numbers, got `{text}`"
        )));
    }
    let mut vals = [0.0f64; 4];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|_| Failure::usage(format!("cannot parse `{p}` in --rect")))?;
    }
    Ok(Domain::new(vals[0], vals[1], vals[2], vals[3])?)
}

fn fmt15(v: f64) -> String {
    crate::geodesic::fmt15(v)
}

fn plan(args: &[String]) -> Result<i32, Failure> {
    let flags = Flags::parse(args)?;
    let field = load_wind_spec(Path::new(flags.require("wind")?))?;
    let start = parse_vec2(flags.require("start")?, "--start")?;
    let goal = parse_vec2(flags.require("goal")?, "--goal")?;

    let mut problem = NavigationProblem::new(&field, start, goal)?;
    if let Some(radius) = flags.take("goal-radius") {
        let r: f64 = radius
            .parse()
            .map_err(|_| Failure::usage(format!("cannot parse --goal-radius `{radius}`")))?;
        if r.is_nan() || r <= 0.0 {
            return Err(Failure::usage("--goal-radius must be positive"));
        }
        problem = problem.with_goal_radius(r);
    }
    if let Some(ceiling) = flags.take("t-ceiling") {
        let t: f64 = ceiling
            .parse()
            .map_err(|_| Failure::usage(format!("cannot parse --t-ceiling `{ceiling}`")))?;
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::usage("--t-ceiling must be positive"));
        }
        problem = problem.with_t_ceiling(t);
    }

    let solution = solve_navigation(&problem)?;
    println!("time {:.6}", solution.time);
    println!("theta0 {:.6}", solution.theta0);
    println!("residual {}", fmt15(solution.residual_miss));
    println!("evaluations {}", solution.evaluations);

    if let Some(out) = flags.take("out") {
        let format = flags.take("format").unwrap_or("csv");
        let path = PathBuf::from(out);
        let contents = match format {
            "csv" => solution.trajectory.to_csv_string(),
            "json" => trajectory_to_json(&solution.trajectory)?,
            other => {
                return Err(Failure::usage(format!(
                    "unknown --format `{other}` (expected csv or json)"
                )))
            }
        };
        std::fs::write(&path, contents).map_err(|e| Failure {
            message: format!("cannot write {}: {e}", path.display()),
            code: 2,
        })?;
        println!("wrote {}", path.display());
    } else if flags.take("format").is_some() {
        return Err(Failure::usage("--format requires --out"));
    }
    Ok(0)
}

#[derive(Serialize)]
struct SprayDump {
    constants: crate::affine_spray::AffineConstants,
    at: [f64; 2],
    dir: [f64; 2],
    metric: f64,
    polynomials: crate::affine_spray::AffinePolynomials,
    spray: [f64; 2],
    general_spray: [f64; 2],
}

fn spray_dump(args: &[String]) -> Result<i32, Failure> {
    let flags = Flags::parse(args)?;
    let field = load_wind_spec(Path::new(flags.require("wind")?))?;
    let at = parse_vec2(flags.require("at")?, "--at")?;
    let dir = parse_vec2(flags.require("dir")?, "--dir")?;

    let WindField::Affine(wind) = &field else {
        return Err(Failure {
            message: "spray-dump needs an affine wind spec".into(),
            code: 2,
        });
    };
    if !wind.domain().contains(at) {
        return Err(Error::PointOutsideDomain { point: at }.into());
    }

    let constants = affine_constants(wind);
    let polynomials = affine_polynomials(&constants, at);
    let w = wind.value_unchecked(at);
    let metric = metric_value(w, dir)?;
    let spray = spray_with_constants(&constants, at, w, dir)?;
    let general = zeta_spray(&field, at, dir)?;
    let dump = SprayDump {
        constants,
        at: [at.x, at.y],
        dir: [dir.x, dir.y],
        metric,
        polynomials,
        spray: [spray.x, spray.y],
        general_spray: [general.x, general.y],
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&dump).expect("spray dump serializes")
    );
    Ok(0)
}

fn fit(args: &[String]) -> Result<i32, Failure> {
    let flags = Flags::parse(args)?;
    let field = load_wind_spec(Path::new(flags.require("wind")?))?;
    let rect = parse_rect(flags.require("rect")?)?;
    let samples = match flags.take("samples") {
        Some(s) => {
            let n: usize = s
                .parse()
                .map_err(|_| Failure::usage(format!("cannot parse --samples `{s}`")))?;
            if n < 2 {
                return Err(Failure::usage("--samples must be at least 2"));
            }
            n
        }
        None => 5,
    };

    let (fitted, residual) = affine_fit(&field, rect, samples)?;
    let report = fitted.weakness_report();
    println!("residual {}", fmt15(residual));
    println!("max_norm {}", fmt15(report.max_norm));
    println!("c {} {}", fmt15(fitted.c().x), fmt15(fitted.c().y));
    println!(
        "A {} {} {} {}",
        fmt15(fitted.a().m[0][0]),
        fmt15(fitted.a().m[0][1]),
        fmt15(fitted.a().m[1][0]),
        fmt15(fitted.a().m[1][1])
    );
    let spec = to_spec_json(&WindField::Affine(fitted))?;
    println!("spec {}", spec.replace(['\n', ' '], ""));
    Ok(0)
}

fn verify(args: &[String]) -> Result<i32, Failure> {
    let flags = Flags::parse(args)?;
    let seed = match flags.take("seed") {
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| Failure::usage(format!("cannot parse --seed `{s}`")))?,
        None => 0,
    };
    let results = crate::verify::run_all(seed)?;
    let mut failures = 0usize;
    for r in &results {
        let status = if r.passed() { "ok  " } else { "FAIL" };
        if !r.passed() {
            failures += 1;
        }
        println!(
            "{status} {:<28} max {:9.3e}  tol {:7.1e}",
            r.name, r.max_err, r.tol
        );
    }
    println!(
        "verify: {} checks, {} passed, {} failed (seed {seed})",
        results.len(),
        results.len() - failures,
        failures
    );
    Ok(if failures == 0 { 0 } else { 1 })
}

fn export(args: &[String]) -> Result<i32, Failure> {
    let flags = Flags::parse(args)?;
    let path = PathBuf::from(flags.require("traj")?);
    let text = std::fs::read_to_string(&path).map_err(|e| Failure {
        message: format!("cannot read {}: {e}", path.display()),
        code: 2,
    })?;
    let trajectory = trajectory_from_json(&text)?;
    print!("{}", trajectory.to_csv_string());
    Ok(0)
}

#[derive(Serialize, Deserialize)]
struct SampleDoc {
    t: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    #[serde(rename = "F")]
    f: f64,
    theta: f64,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryDoc {
    terminal_reason: String,
    samples: Vec<SampleDoc>,
}

/// Stored-trajectory JSON, the `--format json` counterpart of the CSV
/// export.
pub fn trajectory_to_json(traj: &Trajectory) -> Result<String, Error> {
    let doc = TrajectoryDoc {
        terminal_reason: match traj.terminal_reason {
            TerminalReason::TimeLimit => "time_limit".into(),
            TerminalReason::DomainExit => "domain_exit".into(),
            TerminalReason::GoalEvent => "goal_event".into(),
        },
        samples: traj
            .samples
            .iter()
            .map(|s| SampleDoc {
                t: s.t,
                x1: s.state.x.x,
                x2: s.state.x.y,
                y1: s.state.y.x,
                y2: s.state.y.y,
                f: s.f,
                theta: s.theta,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::ParseError(e.to_string()))
}

pub fn trajectory_from_json(text: &str) -> Result<Trajectory, Error> {
    let doc: TrajectoryDoc =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    let terminal_reason = match doc.terminal_reason.as_str() {
        "time_limit" => TerminalReason::TimeLimit,
        "domain_exit" => TerminalReason::DomainExit,
        "goal_event" => TerminalReason::GoalEvent,
        other => {
            return Err(Error::ParseError(format!(
                "unknown terminal reason `{other}`"
            )))
        }
    };
    if doc.samples.is_empty() {
        return Err(Error::ParseError("trajectory has no samples".into()));
    }
    Ok(Trajectory {
        terminal_reason,
        samples: doc
            .samples
            .into_iter()
            .map(|s| TrajectorySample {
                t: s.t,
                state: GeodesicState {
                    x: Vec2::new(s.x1, s.x2),
                    y: Vec2::new(s.y1, s.y2),
                },
                f: s.f,
                theta: s.theta,
            })
            .collect(),
    })
}
