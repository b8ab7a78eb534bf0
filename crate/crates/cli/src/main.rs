//! `stadisc`: command-line front end for stadisc-core.
//!
//! Exit codes: 0 success, 1 usage or IO error, 2 mathematical FAIL,
//! 3 inconclusive.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use stadisc_core::admissibility::{check_admissible, det_q_plot_csv, index_report, search_pairs};
use stadisc_core::discs::{initial_lift, verify_stationary};
use stadisc_core::jets::{jet_injectivity, jet_order};
use stadisc_core::linearization::{assemble_g, kernel, maslov_index, partial_indices};
use stadisc_core::model::{perturb, validate, ModelFile};
use stadisc_core::solver::{axis_grid, corner_grid, evaluation_rank, family_chart, solve};
use stadisc_core::{
    BoundaryGrid, CandidatePair, Complex64, Error, Lift, LiftedDefiningSystem, Model, Perturbation,
    SolveConfig,
};

const EXIT_FAIL: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_USAGE: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "stadisc", version, about = "Stationary discs for graded polynomial models")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON payload here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed recorded in the manifest and used by randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    /// Real weights c, comma separated (default: e_1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    c: Option<Vec<f64>>,

    /// Direction V, comma separated; complex entries as `re:im` (default: all ones).
    #[arg(long = "v", value_delimiter = ',', allow_hyphen_values = true)]
    v: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model file against the graded Hermitian form.
    Validate { model: PathBuf },

    /// Decide admissibility of a pair (c, V) from the symbol Q, or search for one.
    Admissible {
        model: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        /// Rank seeded random pairs instead of checking a given one.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 256)]
        budget: usize,
        /// Write `theta,abs_detQ` rows for |det Q| on the circle.
        #[arg(long)]
        emit_plot: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        plot_samples: usize,
    },

    /// Winding of det Q, ind(-conj(Q)^-1 Q), Maslov index and family dimension.
    Index {
        model: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
    },

    /// Build the explicit initial lift through (1 - zeta) V and verify stationarity.
    Disc {
        model: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        /// Save the lift as JSON.
        #[arg(long)]
        lift_out: Option<PathBuf>,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },

    /// Kernel of the linearized operator at the initial lift.
    Kernel {
        model: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "N", default_value_t = 24)]
        n: usize,
        /// Require g~(1) fixed (dimension drops by d).
        #[arg(long)]
        pinned: bool,
        /// Include the kernel basis lifts in the payload.
        #[arg(long)]
        with_basis: bool,
    },

    /// Partial indices of the reduced symbol -conj(G~2)^-1 G~2, with the jet order.
    Indices {
        model: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
    },

    /// Solve for a stationary lift of a perturbed model, optionally charting the family.
    Solve {
        model: PathBuf,
        /// Perturbation file (omit for the unperturbed model).
        #[arg(long)]
        perturbation: Option<PathBuf>,
        /// Override the perturbation's epsilon.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        /// Start lift (default: the initial lift of the pair).
        #[arg(long)]
        start: Option<PathBuf>,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "N", default_value_t = 24)]
        n: usize,
        #[arg(long, default_value_t = 30)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        target: f64,
        #[arg(long)]
        pinned: bool,
        #[arg(long, value_enum, default_value_t = ChartKind::None)]
        chart: ChartKind,
        #[arg(long, default_value_t = 0.02)]
        radius: f64,
        /// Save the solved lift as JSON.
        #[arg(long)]
        lift_out: Option<PathBuf>,
    },

    /// Rank of the jet map at zeta = 1 on the kernel basis.
    Jets {
        model: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        /// Jet order (default: max(2 k0, largest partial index)).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long = "N", default_value_t = 24)]
        n: usize,
        #[arg(long)]
        pinned: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ChartKind {
    None,
    Axis,
    Corner,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    inputs: Vec<String>,
    seed: u64,
    overrides: BTreeMap<String, Value>,
    version: String,
    timestamp: String,
}

#[derive(Serialize)]
struct Output {
    manifest: RunManifest,
    status: Status,
    payload: Value,
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => EXIT_FAIL,
        }
    }
}

/// A command failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(e) => core_code(e),
            None => EXIT_USAGE,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: core_code(&e),
            error: e.into(),
        }
    }
}

fn core_code(e: &Error) -> u8 {
    match e {
        Error::Inconclusive(_) => EXIT_INCONCLUSIVE,
        Error::InvalidModel(_)
        | Error::InvalidPerturbation(_)
        | Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::Json(_)
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    let s = s.trim();
    match s.split_once(':') {
        Some((a, b)) => Ok(Complex64::new(a.trim().parse()?, b.trim().parse()?)),
        None => Ok(Complex64::new(s.parse()?, 0.0)),
    }
}

fn resolve_pair(model: &Model, args: &PairArgs) -> anyhow::Result<CandidatePair> {
    let std = CandidatePair::standard(model);
    let c = args.c.clone().unwrap_or(std.c);
    let v = match &args.v {
        Some(items) => items
            .iter()
            .map(|s| parse_complex(s).with_context(|| format!("bad V entry {s:?}")))
            .collect::<anyhow::Result<Vec<_>>>()?,
        None => std.v,
    };
    let pair = CandidatePair::new(c, v);
    pair.check(model)?;
    Ok(pair)
}

fn load_model(path: &Path) -> anyhow::Result<Model> {
    Model::load(path).with_context(|| format!("loading model {}", path.display()))
}

fn pair_overrides(o: &mut BTreeMap<String, Value>, pair: &CandidatePair) {
    o.insert("c".into(), json!(pair.c));
    o.insert("V".into(), json!(pair.v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()));
}

struct Run {
    command: &'static str,
    inputs: Vec<PathBuf>,
    overrides: BTreeMap<String, Value>,
    status: Status,
    payload: Value,
}

fn run(cli: &Cli) -> Result<Run, Failure> {
    let mut o = BTreeMap::new();
    let run = |command, inputs: Vec<&PathBuf>, overrides, status, payload| Run {
        command,
        inputs: inputs.into_iter().cloned().collect(),
        overrides,
        status,
        payload,
    };
    match &cli.command {
        Command::Validate { model } => {
            let file = ModelFile::load(model)?;
            let rep = validate(&file);
            Ok(run("validate", vec![model], o, Status::from_bool(rep.valid), serde_json::to_value(&rep).map_err(anyhow::Error::from)?))
        }
        Command::Admissible {
            model,
            pair,
            search,
            budget,
            emit_plot,
            plot_samples,
        } => {
            let m = load_model(model)?;
            if *search {
                o.insert("budget".into(), json!(budget));
                let rep = search_pairs(&m, *budget, cli.seed, 8);
                if let (Some(path), Some(best)) = (emit_plot, rep.ranking.first()) {
                    let adm = check_admissible(&m, &best.pair)?;
                    std::fs::write(path, det_q_plot_csv(&adm.det_q, *plot_samples)).map_err(anyhow::Error::from)?;
                }
                let status = Status::from_bool(rep.any_admissible);
                return Ok(run("admissible", vec![model], o, status, to_value(&rep)?));
            }
            let p = resolve_pair(&m, pair)?;
            pair_overrides(&mut o, &p);
            let rep = check_admissible(&m, &p)?;
            if let Some(path) = emit_plot {
                std::fs::write(path, det_q_plot_csv(&rep.det_q, *plot_samples)).map_err(anyhow::Error::from)?;
            }
            Ok(run("admissible", vec![model], o, Status::from_bool(rep.admissible), to_value(&rep)?))
        }
        Command::Index { model, pair } => {
            let m = load_model(model)?;
            let p = resolve_pair(&m, pair)?;
            pair_overrides(&mut o, &p);
            let rep = index_report(&m, &p)?;
            Ok(run("index", vec![model], o, Status::Pass, to_value(&rep)?))
        }
        Command::Disc {
            model,
            pair,
            lift_out,
            grid,
            tol,
        } => {
            let m = load_model(model)?;
            let p = resolve_pair(&m, pair)?;
            pair_overrides(&mut o, &p);
            o.insert("grid".into(), json!(grid));
            o.insert("tol".into(), json!(tol));
            let lift = initial_lift(&m, &p)?;
            let rep = verify_stationary(&LiftedDefiningSystem::model(&m), &lift, BoundaryGrid::new(*grid), *tol)?;
            if let Some(path) = lift_out {
                lift.save(path)?;
            }
            let payload = json!({ "lift": lift, "stationarity": rep });
            Ok(run("disc", vec![model], o, Status::from_bool(rep.passed), payload))
        }
        Command::Kernel {
            model,
            pair,
            n,
            pinned,
            with_basis,
        } => {
            let m = load_model(model)?;
            let p = resolve_pair(&m, pair)?;
            pair_overrides(&mut o, &p);
            o.insert("N".into(), json!(n));
            o.insert("pinned".into(), json!(pinned));
            let op = assemble_g(&m, &p)?.pinned(*pinned);
            let mut rep = kernel(&op, *n)?;
            let status = Status::from_bool(rep.matches);
            if !with_basis {
                rep.basis.clear();
            }
            let mut payload = to_value(&rep)?;
            payload["maslov_winding"] = json!(maslov_index(&op)?);
            Ok(run("kernel", vec![model], o, status, payload))
        }
        Command::Indices { model, pair } => {
            let m = load_model(model)?;
            let p = resolve_pair(&m, pair)?;
            pair_overrides(&mut o, &p);
            let op = assemble_g(&m, &p)?;
            let pi = partial_indices(&op)?;
            let order = jet_order(&op)?;
            let status = Status::from_bool(pi.sum_matches && pi.bound_holds);
            let mut payload = to_value(&pi)?;
            payload["jet_order"] = json!(order);
            Ok(run("indices", vec![model], o, status, payload))
        }
        Command::Solve {
            model,
            perturbation,
            epsilon,
            start,
            pair,
            n,
            max_iter,
            target,
            pinned,
            chart,
            radius,
            lift_out,
        } => {
            let m = load_model(model)?;
            let p = resolve_pair(&m, pair)?;
            pair_overrides(&mut o, &p);
            let mut inputs = vec![model];
            let sys = match perturbation {
                Some(path) => {
                    inputs.push(path);
                    let mut pert = Perturbation::load(path)?;
                    if let Some(e) = epsilon {
                        o.insert("epsilon".into(), json!(e));
                        pert = pert.with_epsilon(*e);
                    }
                    perturb(&m, &pert)?
                }
                None => LiftedDefiningSystem::model(&m),
            };
            let start_lift = match start {
                Some(path) => {
                    inputs.push(path);
                    Lift::load(path)?
                }
                None => initial_lift(&m, &p)?,
            };
            let cfg = SolveConfig {
                truncation: *n,
                max_iterations: *max_iter,
                residual_target: *target,
                pinned: *pinned,
                ..SolveConfig::default()
            };
            o.insert("config".into(), to_value(&cfg)?);
            let rep = solve(&sys, &start_lift, &cfg)?;
            if let Some(path) = lift_out {
                rep.lift.save(path)?;
            }
            let mut payload = json!({ "solve": rep });
            let mut status = Status::from_bool(rep.check_residual <= cfg.residual_target);
            if *chart != ChartKind::None {
                o.insert("chart".into(), json!(format!("{chart:?}").to_lowercase()));
                o.insert("radius".into(), json!(radius));
                let op = assemble_g(&m, &p)?.pinned(*pinned);
                let k = kernel(&op, *n)?;
                let params = match chart {
                    ChartKind::Axis => axis_grid(k.nullity, *radius),
                    _ => corner_grid(k.nullity, *radius),
                };
                let fam = family_chart(&sys, &rep.lift, &k.basis, &params, &cfg, 1e-9)?;
                let points: Vec<Value> = fam
                    .points
                    .iter()
                    .map(|pt| json!({ "t": pt.t, "iterations": pt.iterations, "max_residual": pt.max_residual, "stationary": pt.stationary }))
                    .collect();
                status = Status::from_bool(status == Status::Pass && fam.all_stationary() && fam.min_pairwise_distance > 0.0);
                payload["family"] = json!({
                    "dimension": fam.dimension,
                    "pinned": fam.pinned,
                    "points": points,
                    "min_pairwise_distance": fam.min_pairwise_distance,
                    "evaluation_rank": evaluation_rank(&fam),
                });
            }
            Ok(run("solve", inputs, o, status, payload))
        }
        Command::Jets {
            model,
            pair,
            order,
            n,
            pinned,
        } => {
            let m = load_model(model)?;
            let p = resolve_pair(&m, pair)?;
            pair_overrides(&mut o, &p);
            o.insert("N".into(), json!(n));
            o.insert("pinned".into(), json!(pinned));
            let op = assemble_g(&m, &p)?.pinned(*pinned);
            let ell = match order {
                Some(v) => {
                    o.insert("order".into(), json!(v));
                    *v
                }
                None => jet_order(&op)?,
            };
            let k = kernel(&op, *n)?;
            let rep = jet_injectivity(&k, m.k0(), ell)?;
            let status = Status::from_bool(rep.injective && rep.palindromic && k.matches);
            Ok(run("jets", vec![model], o, status, to_value(&rep)?))
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn configure_threads() {
    if let Some(n) = std::env::var("DISC_TOOLKIT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let result = run(&cli).and_then(|r| {
        let out = Output {
            manifest: RunManifest {
                command: r.command.into(),
                inputs: r.inputs.iter().map(|p| p.display().to_string()).collect(),
                seed: cli.seed,
                overrides: r.overrides,
                version: env!("CARGO_PKG_VERSION").into(),
                timestamp: chrono::Utc::now().to_rfc3339(),
            },
            status: r.status,
            payload: r.payload,
        };
        let text = serde_json::to_string_pretty(&out).map_err(anyhow::Error::from)?;
        match &cli.out {
            Some(path) => std::fs::write(path, text + "\n")
                .with_context(|| format!("writing {}", path.display()))?,
            None => println!("{text}"),
        }
        if r.status != Status::Pass {
            eprintln!("stadisc {}: {:?}", r.command, r.status);
        }
        Ok(r.status.code())
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_entries() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("-1:0.25").unwrap(), Complex64::new(-1.0, 0.25));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(core_code(&Error::Inconclusive("x".into())), EXIT_INCONCLUSIVE);
        assert_eq!(core_code(&Error::NotAdmissible("x".into())), EXIT_FAIL);
        assert_eq!(core_code(&Error::InvalidInput("x".into())), EXIT_USAGE);
    }
}
