//! Command-line front end. [`run`] does all the work and returns the bytes
//! to print, so the binary is a thin wrapper and tests can call it directly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use systole_core::certificate::Case;
use systole_core::cocycle::{develop, develop_sl2c, edge_length_bound, verify_cocycle, AnyCocycle, DevelopedComplex};
use systole_core::grigoriev::systole_symbolic_bound_for;
use systole_core::margulis::{
    closed_certificate, cusped_certificate, epsilon_lower, tube_radius_lower, MargulisConstant, MargulisSource,
};
use systole_core::oracles::{pigeonhole_suite, roots_suite, thin_part_suite};
use systole_core::polysys::{build_closed_system, build_cusped_system, SystemFormat};
use systole_core::real::{format_sig, DoubleDouble, Precision, Real};
use systole_core::triangulation::{base_tree, census, star_link, Triangulation};
use systole_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Significant digits for every float in command output.
pub const OUTPUT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        CommandResult { code: EXIT_OK, stdout, stderr: String::new() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "systole", version, about = "Systole lower bounds for hyperbolic manifolds from triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Triangulation files.
    #[command(subcommand)]
    Tri(TriCommand),
    /// Polynomial systems over the representation variety.
    #[command(subcommand)]
    Polysys(PolysysCommand),
    /// Edge cocycles.
    #[command(subcommand)]
    Cocycle(CocycleCommand),
    /// Margulis-tube and symbolic bounds.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Seeded Monte-Carlo suites.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand, Debug)]
enum TriCommand {
    /// Validate a tri-v1 file and print its census.
    Validate { file: PathBuf },
    /// Census plus per-vertex star and link data.
    Inspect {
        file: PathBuf,
        #[arg(long)]
        vertex: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CaseArg {
    Closed,
    Cusped,
}

impl From<CaseArg> for Case {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Closed => Case::Closed,
            CaseArg::Cusped => Case::Cusped,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum PolysysCommand {
    /// Emit the polynomial system of a triangulation.
    Emit {
        file: PathBuf,
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Dimension; defaults to that of the triangulation.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum CocycleCommand {
    /// Check the face, inverse and membership relations.
    Verify {
        tri: PathBuf,
        cocycle: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Develop along a base tree and report vertex images and edge lengths.
    Develop {
        tri: PathBuf,
        cocycle: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        basepoint: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum BoundCommand {
    /// Lower bound on the tube radius around a geodesic of length R.
    TubeRadius {
        #[arg(long)]
        n: usize,
        #[arg(long = "R", conflicts_with = "ln_r", required_unless_present = "ln_r")]
        r: Option<f64>,
        /// Natural logarithm of R, for lengths below double range.
        #[arg(long = "ln-R", allow_negative_numbers = true)]
        ln_r: Option<f64>,
        /// meyerhoff, kellerhals or a numeric value.
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Explicit certificate from an edge-length bound B.
    Certificate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long = "B")]
        b: f64,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long, value_enum, default_value = "closed")]
        case: CaseArg,
    },
    /// Symbolic bound with the edge bound (nt)^{c n^4 t}.
    Symbolic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, value_enum, default_value = "closed")]
        case: CaseArg,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Rotation recurrence within the pigeonhole bound.
    Pigeonhole {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Displacement below 2ε inside the tube.
    Tube {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Root magnitude window of random integer polynomials.
    Roots {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        #[arg(long, default_value_t = 1024)]
        max_coefficient: i64,
    },
}

/// Why a command did not succeed.
enum Failure {
    Input(String),
    Check { stdout: String, message: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<String, Failure>;

pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandResult::ok(text),
                _ => CommandResult { code: EXIT_INPUT, stdout: String::new(), stderr: text },
            };
        }
    };
    let outcome = match cli.command {
        Command::Tri(cmd) => tri(cmd),
        Command::Polysys(cmd) => polysys(cmd),
        Command::Cocycle(cmd) => cocycle(cmd),
        Command::Bound(cmd) => bound(cmd),
        Command::Oracle(cmd) => oracle(cmd),
    };
    match outcome {
        Ok(stdout) => CommandResult::ok(stdout),
        Err(Failure::Input(message)) => {
            CommandResult { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {message}\n") }
        }
        Err(Failure::Check { stdout, message }) => {
            CommandResult { code: EXIT_CHECK_FAILED, stdout, stderr: format!("check failed: {message}\n") }
        }
    }
}

/// Rounds every non-integer number to [`OUTPUT_DIGITS`] significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if !num.is_i64() && !num.is_u64() => {
            if let Some(x) = num.as_f64() {
                let r: f64 = format_sig(x, OUTPUT_DIGITS).parse().unwrap_or(x);
                if let Some(n) = serde_json::Number::from_f64(r) {
                    *num = n;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn render(value: impl Serialize) -> String {
    let mut v = serde_json::to_value(value).expect("output serializes");
    round_floats(&mut v);
    serde_json::to_string_pretty(&v).expect("output serializes") + "\n"
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_tri(path: &Path) -> std::result::Result<Triangulation, Failure> {
    Triangulation::parse(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn tri(cmd: TriCommand) -> Outcome {
    match cmd {
        TriCommand::Validate { file } => match Triangulation::parse(&read(&file)?) {
            Ok(t) => Ok(render(json!({ "valid": true, "census": census(&t) }))),
            Err(Error::InvalidTriangulation { check, detail }) => Err(Failure::Check {
                stdout: render(json!({ "valid": false, "check": check.to_string(), "detail": detail })),
                message: format!("{check}: {detail}"),
            }),
            Err(e) => Err(e.into()),
        },
        TriCommand::Inspect { file, vertex } => {
            let t = load_tri(&file)?;
            let vertices: Vec<usize> = match vertex {
                Some(v) => vec![v],
                None => (0..t.vertex_count()).collect(),
            };
            let mut per_vertex = Vec::new();
            for v in vertices {
                let sl = star_link(&t, v)?;
                per_vertex.push(json!({
                    "vertex": v,
                    "ideal": t.is_ideal(v),
                    "degree": t.neighbors(v).len(),
                    "star_f_vector": sl.star.f_vector(),
                    "link_f_vector": sl.link.f_vector(),
                    "link_euler_characteristic": sl.link.euler_characteristic(),
                }));
            }
            let tree = match t.default_basepoint() {
                Some(b) => {
                    let tree = base_tree(&t, b)?;
                    json!({ "basepoint": b, "max_depth": tree.max_depth() })
                }
                None => Value::Null,
            };
            Ok(render(json!({ "census": census(&t), "base_tree": tree, "vertices": per_vertex })))
        }
    }
}

fn polysys(cmd: PolysysCommand) -> Outcome {
    let PolysysCommand::Emit { file, case, format, n } = cmd;
    let t = load_tri(&file)?;
    let n = n.unwrap_or(t.dim());
    let sys = match case {
        CaseArg::Closed => build_closed_system(&t, n)?,
        CaseArg::Cusped => build_cusped_system(&t, n)?,
    };
    Ok(sys.emit(match format {
        FormatArg::Text => SystemFormat::Text,
        FormatArg::Json => SystemFormat::Json,
    }))
}

fn load_cocycle(tri: &Path, coc: &Path) -> std::result::Result<(Triangulation, AnyCocycle), Failure> {
    let t = load_tri(tri)?;
    let alpha = AnyCocycle::parse(&t, &read(coc)?).map_err(|e| Failure::Input(format!("{}: {e}", coc.display())))?;
    Ok((t, alpha))
}

fn precision() -> std::result::Result<Precision, Failure> {
    Precision::from_env().map_err(Failure::Input)
}

fn developed_json<S: Real>(group: &str, precision: &str, dev: &DevelopedComplex<S>) -> Value {
    let vertex_images: BTreeMap<String, Vec<f64>> =
        dev.vertex_images.iter().map(|(v, p)| (v.to_string(), p.coords().iter().map(|x| x.to_f64()).collect())).collect();
    let edges: Vec<Value> = dev
        .edge_lengths
        .iter()
        .map(|((u, v), d)| {
            json!({ "edge": format!("{u}-{v}"), "length": d.distance.to_f64(), "cosh_minus_one": d.cosh_minus_one.to_f64() })
        })
        .collect();
    let ideal: BTreeMap<String, _> = dev.ideal_images.iter().map(|(v, p)| (v.to_string(), *p)).collect();
    json!({
        "group": group,
        "precision": precision,
        "basepoint": dev.basepoint,
        "vertex_images": vertex_images,
        "edge_lengths": edges,
        "edge_length_bound": edge_length_bound(dev),
        "ideal_images": ideal,
    })
}

fn develop_failure(e: Error) -> Failure {
    match e {
        Error::CocycleVerification(_) | Error::NonParabolic { .. } => {
            Failure::Check { stdout: String::new(), message: e.to_string() }
        }
        e => e.into(),
    }
}

fn cocycle(cmd: CocycleCommand) -> Outcome {
    match cmd {
        CocycleCommand::Verify { tri, cocycle, tol } => {
            let (t, alpha) = load_cocycle(&tri, &cocycle)?;
            let report = match &alpha {
                AnyCocycle::Lorentz(a) => verify_cocycle(&t, a, tol)?,
                AnyCocycle::Sl2c(a) => verify_cocycle(&t, a, tol)?,
            };
            let out = render(&report);
            if report.passes {
                Ok(out)
            } else {
                Err(Failure::Check {
                    stdout: out,
                    message: format!("{} faces exceed tolerance {tol:e}", report.failing_faces.len()),
                })
            }
        }
        CocycleCommand::Develop { tri, cocycle, tol, basepoint } => {
            let (t, alpha) = load_cocycle(&tri, &cocycle)?;
            let b = match basepoint {
                Some(b) => b,
                None => t.default_basepoint().ok_or_else(|| Failure::Input("no non-ideal vertex".into()))?,
            };
            let tree = base_tree(&t, b)?;
            let value = match (precision()?, &alpha) {
                (Precision::Double, AnyCocycle::Lorentz(a)) => {
                    developed_json("lorentz", "double", &develop(&t, a, &tree, tol).map_err(develop_failure)?)
                }
                (Precision::DoubleDouble, AnyCocycle::Lorentz(a)) => developed_json(
                    "lorentz",
                    "double-double",
                    &develop(&t, &a.to_real::<DoubleDouble>(), &tree, tol).map_err(develop_failure)?,
                ),
                (Precision::Double, AnyCocycle::Sl2c(a)) => {
                    developed_json("sl2c", "double", &develop_sl2c(&t, a, &tree, tol).map_err(develop_failure)?)
                }
                (Precision::DoubleDouble, AnyCocycle::Sl2c(a)) => developed_json(
                    "sl2c",
                    "double-double",
                    &develop_sl2c(&t, &a.to_real::<DoubleDouble>(), &tree, tol).map_err(develop_failure)?,
                ),
            };
            Ok(render(value))
        }
    }
}

fn parse_epsilon(arg: Option<&str>, n: usize) -> std::result::Result<MargulisConstant, Failure> {
    let Some(s) = arg else {
        return Ok(MargulisConstant::default_for(n)?);
    };
    if let Ok(source) = s.parse::<MargulisSource>() {
        if source != MargulisSource::UserSupplied {
            return Ok(epsilon_lower(n, source)?);
        }
    }
    let value: f64 = s.parse().map_err(|_| Failure::Input(format!("epsilon `{s}` is not a source name or a number")))?;
    Ok(MargulisConstant::user_supplied(n, value)?)
}

fn bound(cmd: BoundCommand) -> Outcome {
    match cmd {
        BoundCommand::TubeRadius { n, r, ln_r, epsilon } => {
            let eps = parse_epsilon(epsilon.as_deref(), n)?;
            let (r, ln_r) = match (r, ln_r) {
                (Some(r), None) if r > 0.0 => (r, r.ln()),
                (None, Some(l)) => (l.exp(), l),
                _ => return Err(Failure::Input("R must be positive".into())),
            };
            // The formula is linear in ln R, which reaches R below double range.
            let radius = if r > 0.0 {
                tube_radius_lower(r, n, &eps)?
            } else {
                if ln_r > (2.0 * eps.value()).ln() {
                    return Err(Error::OutOfRange { name: "R", value: r, range: "(0, 2 epsilon]" }.into());
                }
                -ln_r / n as f64 + eps.value().ln() - 4f64.ln()
            };
            Ok(render(json!({
                "n": n,
                "ln_R": ln_r,
                "log2_R": ln_r / std::f64::consts::LN_2,
                "epsilon": eps.value(),
                "epsilon_source": eps.source(),
                "tube_radius": radius,
                "vacuous": radius <= 0.0,
            })))
        }
        BoundCommand::Certificate { n, t, b, epsilon, case } => {
            let eps = parse_epsilon(epsilon.as_deref(), n)?;
            let cert = match case {
                CaseArg::Closed => closed_certificate(n, t, b, &eps)?,
                CaseArg::Cusped => cusped_certificate(n, t, b, &eps)?,
            };
            Ok(render(&cert))
        }
        BoundCommand::Symbolic { n, t, c, case } => {
            let (bound, cert) = systole_symbolic_bound_for(case.into(), n, t, c)?;
            Ok(render(json!({ "bound": bound, "certificate": cert })))
        }
    }
}

fn suite_outcome(passes: bool, summary: impl Serialize, what: &str) -> Outcome {
    let out = render(summary);
    if passes {
        Ok(out)
    } else {
        Err(Failure::Check { stdout: out, message: format!("{what} suite has failing trials") })
    }
}

fn oracle(cmd: OracleCommand) -> Outcome {
    match cmd {
        OracleCommand::Pigeonhole { n, trials, seed } => {
            let s = pigeonhole_suite(n, trials, seed)?;
            suite_outcome(s.passes, &s, "pigeonhole")
        }
        OracleCommand::Tube { n, trials, seed, epsilon } => {
            let eps = parse_epsilon(epsilon.as_deref(), n)?;
            let s = thin_part_suite(n, &eps, trials, seed)?;
            suite_outcome(s.passes, &s, "tube")
        }
        OracleCommand::Roots { trials, seed, max_degree, max_coefficient } => {
            let s = roots_suite(trials, max_degree, max_coefficient, seed)?;
            suite_outcome(s.passes, &s, "roots")
        }
    }
}
