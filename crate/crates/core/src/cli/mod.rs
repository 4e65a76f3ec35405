//! The `blendfit` command-line tool.
//!
//! Exit codes: 0 success, 1 invalid input or I/O failure, 2 a lift hit the cut
//! locus, 3 a `check` failed.

pub mod datafile;
pub mod testdata;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::blend::{fit, BlendedSpline, FitProblem};
use crate::error::{Error, Result};
use crate::manifold::{AnyManifold, Manifold, ManifoldDescriptor, ManifoldKind};
use crate::model::{load_model, save_model};
use crate::spline1d::{solve_smoothing_spline, KnotGrid};

pub use datafile::DataFile;
pub use testdata::{generate, Shape, TestDataSpec, TimeLayout};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ILL_POSED: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

const CHECK_SAMPLES: usize = 1000;
const JUNCTION_H: f64 = 1e-6;
const POSITION_GAP_TOL: f64 = 1e-12;
const VELOCITY_GAP_TOL: f64 = 1e-3;
const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "blendfit",
    version,
    about = "Blended smoothing splines on manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a blended smoothing spline to a CSV data file.
    Fit {
        #[arg(long)]
        manifold: ManifoldKind,
        /// Ambient dimension; inferred from the data when omitted.
        #[arg(long)]
        dim: Option<usize>,
        /// Positive smoothing weight, or `inf` to interpolate.
        #[arg(long, value_parser = parse_lambda)]
        lambda: f64,
        #[arg(long)]
        intervals: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write `num` uniform curve samples on [0, n].
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        num: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write the speed profile at `num` uniform times.
    Speed {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        num: usize,
        #[arg(long, default_value_t = 1e-5)]
        h: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Verify closure, junction continuity and, for Euclidean data, equivalence
    /// with the direct smoothing spline.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Generate a reproducible synthetic dataset.
    GenTestdata {
        #[arg(long, default_value = "sphere2")]
        manifold: ManifoldKind,
        #[arg(long, default_value_t = 0)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 4.0)]
        t_end: f64,
        /// Standard deviation of the tangent-space noise.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TimeLayout::Random)]
        times: TimeLayout,
        #[arg(long, value_enum, default_value_t = Shape::Curve)]
        shape: Shape,
        #[arg(long)]
        output: PathBuf,
    },
}

fn parse_lambda(s: &str) -> std::result::Result<f64, String> {
    if s == "inf" {
        return Ok(f64::INFINITY);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number or `inf`, got `{s}`")),
    }
}

/// Runs the tool on `args` (including the program name), writing reports to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_INVALID
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Fit {
            manifold,
            dim,
            lambda,
            intervals,
            input,
            output,
        } => cmd_fit(manifold, dim, lambda, intervals, &input, &output, out),
        Command::Sample { model, num, output } => cmd_sample(&model, num, &output),
        Command::Speed {
            model,
            num,
            h,
            output,
        } => cmd_speed(&model, num, h, &output),
        Command::Check { model, data } => cmd_check(&model, data.as_deref(), out),
        Command::GenTestdata {
            manifold,
            dim,
            count,
            t_end,
            noise,
            seed,
            times,
            shape,
            output,
        } => generate(&TestDataSpec {
            kind: manifold,
            dim,
            count,
            t_end,
            noise,
            seed,
            times,
            shape,
        })
        .and_then(|d| d.write(&output))
        .map(|()| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_well_posedness() {
                EXIT_ILL_POSED
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn descriptor_for(
    kind: ManifoldKind,
    dim: Option<usize>,
    data_dim: usize,
) -> Result<ManifoldDescriptor> {
    let dim = match (kind, dim) {
        (_, Some(d)) => d,
        (ManifoldKind::Euclidean, None) => data_dim,
        (ManifoldKind::Sphere2, None) => 3,
        (ManifoldKind::So3, None) => 9,
    };
    let desc = ManifoldDescriptor::new(kind, dim)?;
    if data_dim != dim {
        return Err(Error::InvalidInput(format!(
            "data have {data_dim} coordinates but {kind} needs {dim}"
        )));
    }
    Ok(desc)
}

fn cmd_fit(
    kind: ManifoldKind,
    dim: Option<usize>,
    lambda: f64,
    intervals: usize,
    input: &Path,
    output: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let data = DataFile::read(input)?;
    let manifold = AnyManifold::from_descriptor(descriptor_for(kind, dim, data.dim())?)?;
    data.validate(&manifold)?;
    let m = data.times.len() - 1;
    let problem = FitProblem::new(data.times, data.points, intervals, lambda)?;

    let start = Instant::now();
    let spline = fit(manifold, &problem)?;
    let elapsed = start.elapsed();
    let misfit = spline.data_misfit(problem.data())?;
    save_model(&spline, output)?;

    let lambda_text = if lambda.is_infinite() {
        "inf".to_string()
    } else {
        format!("{lambda:e}")
    };
    let report = format!(
        "manifold: {kind} (dim {})\nm: {m}\nn: {intervals}\nlambda: {lambda_text}\nfit time: {:.3} ms\ndata misfit: {misfit:.6e}\n",
        spline.manifold().ambient_dim(),
        elapsed.as_secs_f64() * 1e3,
    );
    out.write_all(report.as_bytes())
        .map_err(|e| Error::InvalidInput(format!("cannot write report: {e}")))?;
    Ok(EXIT_OK)
}

/// `num` uniform times on [0, n], both ends included.
fn uniform_times(n: usize, num: usize) -> Result<Vec<f64>> {
    if num < 2 {
        return Err(Error::InvalidInput(format!(
            "--num must be at least 2, got {num}"
        )));
    }
    let n = n as f64;
    Ok((0..num)
        .map(|k| {
            if k == num - 1 {
                n
            } else {
                n * k as f64 / (num - 1) as f64
            }
        })
        .collect())
}

fn cmd_sample(model: &Path, num: usize, output: &Path) -> Result<i32> {
    let spline = load_model(model)?;
    let times = uniform_times(spline.n(), num)?;
    let points = times
        .iter()
        .map(|&t| spline.eval(t))
        .collect::<Result<Vec<_>>>()?;
    DataFile { times, points }.write(output)?;
    Ok(EXIT_OK)
}

fn cmd_speed(model: &Path, num: usize, h: f64, output: &Path) -> Result<i32> {
    let spline = load_model(model)?;
    let times = uniform_times(spline.n(), num)?;
    let speeds = times
        .iter()
        .map(|&t| spline.speed(t, h).map(|s| [s]))
        .collect::<Result<Vec<_>>>()?;
    let file = std::fs::File::create(output).map_err(|e| crate::model::io_error(output, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "t,speed")?;
        for (t, [s]) in times.iter().zip(&speeds) {
            writeln!(w, "{t},{s}")?;
        }
        w.flush()
    };
    write().map_err(|e| crate::model::io_error(output, e))?;
    Ok(EXIT_OK)
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Every sample must lie on the manifold within the membership tolerance.
pub fn check_closure<M: Manifold>(spline: &BlendedSpline<M>, samples: usize) -> CheckResult {
    let name = "on-manifold closure";
    let times = match uniform_times(spline.n(), samples) {
        Ok(t) => t,
        Err(e) => {
            return CheckResult {
                name,
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    for t in times {
        let bad = spline
            .eval(t)
            .and_then(|p| spline.manifold().check_point(&p));
        if let Err(e) = bad {
            return CheckResult {
                name,
                passed: false,
                detail: format!("t = {t}: {e}"),
            };
        }
    }
    CheckResult {
        name,
        passed: true,
        detail: format!("{samples} samples"),
    }
}

/// Position gaps at most 1e-12 and velocity gaps at most `1e-3·max(1, speed)`.
pub fn check_junctions<M: Manifold>(spline: &BlendedSpline<M>) -> CheckResult {
    let name = "junction continuity";
    let report = match spline.junction_report(JUNCTION_H) {
        Ok(r) => r,
        Err(e) => {
            return CheckResult {
                name,
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    let (mut worst_pos, mut worst_vel) = (0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for j in &report {
        worst_pos = worst_pos.max(j.position_gap);
        let rel = j.velocity_gap / j.speed.max(1.0);
        worst_vel = worst_vel.max(rel);
        if !(j.position_gap <= POSITION_GAP_TOL && rel <= VELOCITY_GAP_TOL) {
            failures.push(j.t.to_string());
        }
    }
    CheckResult {
        name,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "{} junctions, max position gap {worst_pos:.3e}, max relative velocity gap {worst_vel:.3e}",
                report.len()
            )
        } else {
            format!(
                "gaps too large at t = {}; max position gap {worst_pos:.3e}, max relative velocity gap {worst_vel:.3e}",
                failures.join(", ")
            )
        },
    }
}

/// Compares a flat-space model with the smoothing spline solved directly on `data`.
pub fn check_equivalence<M: Manifold>(
    spline: &BlendedSpline<M>,
    data: &DataFile,
    samples: usize,
) -> CheckResult {
    let name = "euclidean equivalence";
    let run = || -> Result<f64> {
        if data.times != spline.times() {
            return Err(Error::InvalidInput(
                "data times differ from the model's times".into(),
            ));
        }
        let rows: Vec<Vec<f64>> = data.points.iter().map(|p| p.coords().to_vec()).collect();
        let grid = KnotGrid::new(data.times.clone(), spline.n() as f64)?;
        let direct = solve_smoothing_spline(&grid, &rows, spline.lambda())?;
        let mut worst = 0.0f64;
        for t in uniform_times(spline.n(), samples)? {
            let b = spline.eval(t)?;
            let s = direct.eval(t)?;
            let d = b
                .coords()
                .iter()
                .zip(&s)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(d);
        }
        Ok(worst)
    };
    match run() {
        Ok(worst) => CheckResult {
            name,
            passed: worst <= EQUIVALENCE_TOL,
            detail: format!("max deviation {worst:.3e} over {samples} samples"),
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn cmd_check(model: &Path, data: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let spline = load_model(model)?;
    let mut results = vec![
        check_closure(&spline, CHECK_SAMPLES),
        check_junctions(&spline),
    ];
    let mut notes = Vec::new();
    if let Some(path) = data {
        let data = DataFile::read(path)?;
        data.validate(spline.manifold())?;
        if spline.manifold().descriptor().kind == ManifoldKind::Euclidean {
            results.push(check_equivalence(&spline, &data, CHECK_SAMPLES));
        } else {
            notes.push(format!(
                "SKIP euclidean equivalence: model is on {}",
                spline.manifold().descriptor().kind
            ));
        }
    }
    let mut report = String::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        report.push_str(&format!("{status} {}: {}\n", r.name, r.detail));
    }
    for note in notes {
        report.push_str(&note);
        report.push('\n');
    }
    out.write_all(report.as_bytes())
        .map_err(|e| Error::InvalidInput(format!("cannot write report: {e}")))?;
    Ok(if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}
