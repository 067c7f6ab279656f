//! Command line front end: reads a JSON system document and reports moduli.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 infeasible system or
//! point, 4 numerical failure, 5 full-perturbation estimate requested on an
//! unbounded system.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use linstab::{
    clm, estimate_lipusc, is_bounded, is_feasible, is_full_space, lipusc, restricted_vertices,
    vertices, EstimatorConfig, LinearSystem, Mode, Norm, Tolerances,
};

pub mod document;
pub mod endset;
pub mod render;

use document::{
    vertex_entries, AnalysisDocument, ClmDocument, ClmRow, ReportDocument, SystemDocument,
};

pub const SEED_ENV: &str = "LINSTAB_SEED";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Unbounded(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Unbounded(_) => 5,
        }
    }

    /// Wraps a library error, naming the operation that raised it.
    pub fn core(op: &str, e: linstab::Error) -> Self {
        use linstab::Error as E;
        let msg = format!("{op}: {e}");
        match e {
            E::InfeasiblePoint { .. } | E::InfeasibleSystem => CliError::Infeasible(msg),
            E::UnboundedFullMode => CliError::Unbounded(msg),
            E::DimensionMismatch { .. }
            | E::EmptySystem
            | E::NonFinite(_)
            | E::InvalidTolerance(_) => CliError::Parse(msg),
            _ => CliError::Numerical(msg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rhs,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Rhs => Mode::Rhs,
            ModeArg::Full => Mode::Full,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "linstab",
    version,
    about = "Calmness and Lipschitz upper semicontinuity moduli of linear inequality systems"
)]
pub struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Override the norm given in the system file (l1, l2 or linf).
    #[arg(long, global = true)]
    pub norm: Option<Norm>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Comma separated coordinates, e.g. "1,-1".
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Feasibility, extreme points, calmness table and both Lipschitz moduli.
    Analyze { file: PathBuf },
    /// Calmness modulus at a point.
    Clm {
        file: PathBuf,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value = "rhs")]
        mode: ModeArg,
    },
    /// Lipschitz upper semicontinuity moduli; both modes unless one is given.
    Lipusc {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Extreme points, or with --restricted those of F intersected with the row span.
    Vertices {
        file: PathBuf,
        #[arg(long)]
        restricted: bool,
    },
    /// Sampling estimate of a Lipschitz modulus next to its closed form.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Defaults to $LINSTAB_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        #[arg(long)]
        targeted: bool,
        #[arg(long)]
        box_radius: Option<f64>,
    },
    /// CSV of the active-gradient hull boundary tagged by end-set membership.
    Endset {
        file: PathBuf,
        #[command(flatten)]
        point: PointArgs,
    },
}

/// What a command writes: result data on stdout, warnings on stderr.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
}

impl Output {
    fn text(stdout: String) -> Self {
        Output {
            stdout,
            warnings: Vec::new(),
        }
    }
}

pub fn parse_point(text: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| CliError::Parse(format!("invalid --point `{text}`: {e}")))?;
    if coords.len() != n {
        return Err(CliError::Parse(format!(
            "--point has {} coordinates but the system has n = {n}",
            coords.len()
        )));
    }
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Parse(format!("--point `{text}` is not finite")));
    }
    Ok(coords)
}

pub fn load(path: &PathBuf, norm: Option<Norm>) -> Result<(LinearSystem, Tolerances), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    SystemDocument::parse(&text)?.build(norm)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

pub fn analyze(sys: &LinearSystem, tol: &Tolerances) -> Result<AnalysisDocument, CliError> {
    let err = |op: &'static str| move |e| CliError::core(op, e);
    if !is_feasible(sys, tol).map_err(err("is_feasible"))? {
        return Err(CliError::Infeasible(
            "analyze: the system has no feasible point".into(),
        ));
    }
    let bounded = is_bounded(sys, tol).map_err(err("is_bounded"))?;
    let full_space = is_full_space(sys, tol);
    let all = vertices(sys, tol).map_err(err("vertices"))?;
    let e = restricted_vertices(sys, tol).map_err(err("restricted_vertices"))?;
    let mut points = Vec::with_capacity(e.len());
    for (p, _) in e.iter() {
        let rhs = clm(sys, p, Mode::Rhs, tol).map_err(err("clm_rhs"))?;
        let full = clm(sys, p, Mode::Full, tol).map_err(err("clm_full"))?;
        points.push(ClmRow {
            point: p.clone(),
            active: rhs.active.one_based(),
            clm_rhs: rhs.value,
            clm_full: full.value,
        });
    }
    let lr = lipusc(sys, Mode::Rhs, tol).map_err(err("lipusc_rhs"))?;
    let lf = lipusc(sys, Mode::Full, tol).map_err(err("lipusc_full"))?;
    Ok(AnalysisDocument {
        norm: sys.norm(),
        feasible: true,
        bounded,
        full_space,
        vertices: vertex_entries(&all),
        restricted_vertices: vertex_entries(&e),
        points,
        lipusc_rhs: ReportDocument::from(&lr),
        lipusc_full: ReportDocument::from(&lf),
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VerifyDocument {
    pub report: linstab::EstimateReport,
    pub closed_form: linstab::ExtendedNonneg,
    /// `estimate / closed_form`; absent when the closed form is 0.
    pub ratio: Option<f64>,
}

pub fn verify(
    sys: &LinearSystem,
    cfg: &EstimatorConfig,
    mode: Mode,
    tol: &Tolerances,
) -> Result<VerifyDocument, CliError> {
    let closed = lipusc(sys, mode, tol).map_err(|e| CliError::core("lipusc", e))?;
    if mode == Mode::Full && closed.value.is_infinite() {
        return Err(CliError::Unbounded(
            "verify: the feasible set is unbounded, so the full-perturbation modulus is +inf and cannot be estimated by sampling; use --mode rhs".into(),
        ));
    }
    let report = estimate_lipusc(sys, cfg, mode, tol).map_err(|e| CliError::core("verify", e))?;
    let ratio = (closed.value.value() > 0.0).then(|| report.estimate / closed.value.value());
    Ok(VerifyDocument {
        report,
        closed_form: closed.value,
        ratio,
    })
}

fn seed_from_env(env_seed: Option<&str>) -> Result<u64, CliError> {
    match env_seed {
        None => Ok(0),
        Some(s) => s.trim().parse().map_err(|_| {
            CliError::Parse(format!(
                "{SEED_ENV}=`{s}` is not an unsigned 64-bit integer"
            ))
        }),
    }
}

/// Runs one command. `env_seed` is the value of `LINSTAB_SEED`, if set.
pub fn run(cli: &Cli, env_seed: Option<&str>) -> Result<Output, CliError> {
    let table = cli.format == Format::Table;
    match &cli.command {
        Command::Analyze { file } => {
            let (sys, tol) = load(file, cli.norm)?;
            let doc = analyze(&sys, &tol)?;
            Ok(Output::text(if table {
                render::analysis(&doc)
            } else {
                json(&doc)
            }))
        }
        Command::Clm { file, point, mode } => {
            let (sys, tol) = load(file, cli.norm)?;
            let x = parse_point(&point.point, sys.n())?;
            let mode = Mode::from(*mode);
            let c = clm(&sys, &x, mode, &tol).map_err(|e| CliError::core("clm", e))?;
            let doc = ClmDocument::new(x, mode, &c);
            Ok(Output::text(if table {
                render::clm(&doc)
            } else {
                json(&doc)
            }))
        }
        Command::Lipusc { file, mode } => {
            let (sys, tol) = load(file, cli.norm)?;
            let modes = match mode {
                Some(m) => vec![Mode::from(*m)],
                None => vec![Mode::Rhs, Mode::Full],
            };
            let mut docs = Vec::new();
            for m in modes {
                let r = lipusc(&sys, m, &tol).map_err(|e| CliError::core("lipusc", e))?;
                docs.push(ReportDocument::from(&r));
            }
            Ok(Output::text(if table {
                render::reports(&docs)
            } else if docs.len() == 1 {
                json(&docs[0])
            } else {
                json(&docs)
            }))
        }
        Command::Vertices { file, restricted } => {
            let (sys, tol) = load(file, cli.norm)?;
            if !is_feasible(&sys, &tol).map_err(|e| CliError::core("is_feasible", e))? {
                return Err(CliError::Infeasible(
                    "vertices: the system has no feasible point".into(),
                ));
            }
            let set = if *restricted {
                restricted_vertices(&sys, &tol)
            } else {
                vertices(&sys, &tol)
            }
            .map_err(|e| CliError::core("vertices", e))?;
            let entries = vertex_entries(&set);
            Ok(Output::text(if table {
                render::vertices(&entries)
            } else {
                json(&entries)
            }))
        }
        Command::Verify {
            file,
            samples,
            delta,
            seed,
            mode,
            targeted,
            box_radius,
        } => {
            let (sys, tol) = load(file, cli.norm)?;
            let seed = match seed {
                Some(s) => *s,
                None => seed_from_env(env_seed)?,
            };
            let cfg = EstimatorConfig {
                samples: *samples,
                delta: *delta,
                seed,
                box_radius: *box_radius,
                targeted: *targeted,
            };
            cfg.validate()
                .map_err(|e| CliError::Parse(format!("verify: {e}")))?;
            let doc = verify(&sys, &cfg, Mode::from(*mode), &tol)?;
            Ok(Output::text(if table {
                render::estimate(&doc.report, doc.closed_form, doc.ratio)
            } else {
                json(&doc)
            }))
        }
        Command::Endset { file, point } => {
            let (sys, tol) = load(file, cli.norm)?;
            let x = parse_point(&point.point, sys.n())?;
            let data = endset::endset_data(&sys, &x, &tol)?;
            Ok(Output {
                stdout: data.to_csv(),
                warnings: data.warnings,
            })
        }
    }
}
