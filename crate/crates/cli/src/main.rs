//! `gybe-forge`: build solution families, verify the equations they satisfy,
//! search parity assignments, and probe integrability and gate properties.
//!
//! Exit codes: 0 success / all checks pass, 1 a verification failed,
//! 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gybe_core::gates::{apply_gate, concurrence, gate_from_params, time_schedule, unitarize, GateParams};
use gybe_core::integrability::{hamiltonian_extract, partition_function, transfer_matrix, ChainSpec};
use gybe_core::perm::{parity_search, SearchConfig, SearchMode, SearchTarget};
use gybe_core::registry::{self, Certificate, Family};
use gybe_core::tensor::CMatrix;
use gybe_core::verify::{default_tolerance, inhomogeneous_residual, spectral_residual, sweep, EquationForm, GybeShape, VerificationReport};
use gybe_core::xshape::{assemble_x_shaped, BlockMap};
use gybe_core::GybeError;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gybe-forge", version, about = "Generalized Yang-Baxter solution families and their numerical checks")]
struct Cli {
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    #[arg(long)]
    family: String,
    /// JSON file with parameter overrides.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Inline JSON object with parameter overrides (applied after --params).
    #[arg(long)]
    set: Option<String>,
    /// Shorthand for the family's size parameter (`dim` or `n`).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args, Clone)]
struct SampleArgs {
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance on the max-abs residual (default depends on the size).
    #[arg(long)]
    tol: Option<f64>,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Symmetric,
    Random,
    Fractional,
}

#[derive(Subcommand)]
enum Cmd {
    /// List registered families with defaults and certificates.
    Families,
    /// Evaluate a family (or a block map file) at one spectral parameter.
    Build {
        #[arg(long, required_unless_present = "block_map")]
        family: Option<String>,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        /// Assemble an X-shaped matrix from a BlockMap JSON file.
        #[arg(long, conflicts_with = "family")]
        block_map: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        u: f64,
    },
    /// Check one equation (or all certificates when no shape is given).
    Verify {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Homogeneous shape `d,k,p`.
        #[arg(long, conflicts_with = "dims")]
        shape: Option<String>,
        /// Mixed equation on `N1,N2,N3` with the family's partner as Ř₂₃.
        #[arg(long)]
        dims: Option<String>,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Check every certificate of one family, or of every family.
    Sweep {
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Search parity assignments of the 16×16 permutation sums.
    ParitySearch {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value = "gybe-2-4-2")]
        target: String,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Random mode: parities depend on all four indices.
        #[arg(long)]
        full_dependence: bool,
    },
    /// Transfer matrix τ(u) on a periodic chain.
    Transfer {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        sites: usize,
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
    },
    /// Hamiltonian from the logarithmic derivative of τ at 0.
    Hamiltonian {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        sites: usize,
        #[arg(long, default_value_t = 1e-5)]
        fd_step: f64,
        /// Spectral parameter of the τ used in the commutation check.
        #[arg(long, default_value_t = 0.37, allow_hyphen_values = true)]
        v: f64,
    },
    /// Torus partition function tr τ(u)^rows.
    Partition {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        sites: usize,
        #[arg(long, default_value_t = 3)]
        rows: u32,
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
    },
    /// Unitary two-qubit gate, its output states and their concurrences.
    Gate {
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = 0.9, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        u: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        /// Use the time schedule at `t` instead of (gamma, beta, u).
        #[arg(long, allow_hyphen_values = true)]
        schedule: Option<f64>,
    },
}

enum Failure {
    Usage(String),
}

impl From<GybeError> for Failure {
    fn from(e: GybeError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Out = Result<(Value, bool), Failure>;

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: malformed JSON: {e}", path.display())))
}

fn overrides(family: &str, params: Option<&PathBuf>, set: Option<&str>, dim: Option<usize>) -> Result<Option<Value>, Failure> {
    let mut o = serde_json::Map::new();
    let mut merge = |v: Value, what: &str| match v {
        Value::Object(m) => {
            o.extend(m);
            Ok(())
        }
        _ => Err(Failure::Usage(format!("{what} must be a JSON object"))),
    };
    if let Some(p) = params {
        merge(read_json(p)?, "--params")?;
    }
    if let Some(s) = set {
        merge(serde_json::from_str(s).map_err(|e| Failure::Usage(format!("--set: malformed JSON: {e}")))?, "--set")?;
    }
    if let Some(d) = dim {
        let defaults = registry::default_params(family)?;
        let key = ["dim", "n"].into_iter().find(|k| defaults.get(k).is_some());
        let key = key.ok_or_else(|| Failure::Usage(format!("family {family} has no size parameter for --dim")))?;
        o.insert(key.into(), json!(d));
    }
    Ok((!o.is_empty()).then_some(Value::Object(o)))
}

fn load(f: &FamilyArgs) -> Result<Family, Failure> {
    let o = overrides(&f.family, f.params.as_ref(), f.set.as_deref(), f.dim)?;
    Ok(registry::instantiate(&f.family, o.as_ref())?)
}

fn parse_triple(s: &str) -> Result<[usize; 3], Failure> {
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| Failure::Usage(format!("expected three integers, got '{s}'")))?;
    v.try_into().map_err(|_| Failure::Usage(format!("expected three integers, got '{s}'")))
}

fn certificate_report(f: &Family, cert: &Certificate, s: &SampleArgs) -> Result<VerificationReport, GybeError> {
    let tol = s.tol.unwrap_or_else(|| default_tolerance(cert.total_dim()));
    let mut r = sweep(&format!("{} {}", f.id, cert.label()), s.samples, s.seed, tol, |u, v| f.check(cert, u, v))?;
    if *cert == Certificate::Unitary {
        // only u is used
        r.equation = format!("{} unitary", f.id);
    }
    Ok(r)
}

fn reports_value(reports: &[VerificationReport]) -> (Value, bool) {
    (to_value(&reports), reports.iter().all(|r| r.pass))
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Families => Ok((to_value(&registry::describe_all()?), true)),
        Cmd::Build { family, params, set, dim, block_map, u } => {
            let m: CMatrix = match (family, block_map) {
                (_, Some(path)) => {
                    let bm: BlockMap = serde_json::from_value(read_json(&path)?).map_err(|e| Failure::Usage(format!("block map: {e}")))?;
                    assemble_x_shaped(&bm, u)?
                }
                (Some(id), None) => {
                    let o = overrides(&id, params.as_ref(), set.as_deref(), dim)?;
                    registry::instantiate(&id, o.as_ref())?.eval(u)?
                }
                (None, None) => return Err(Failure::Usage("either --family or --block-map is required".into())),
            };
            Ok((to_value(&m), true))
        }
        Cmd::Verify { fam, shape, dims, sample } => {
            let f = load(&fam)?;
            if let Some(s) = shape {
                let shape = GybeShape::parse(&s, EquationForm::SpectralDifference)?;
                let tol = sample.tol.unwrap_or_else(|| default_tolerance(shape.total_dim()));
                let eval = |x: f64| f.eval(x);
                let r = sweep(&format!("{} gybe {}", f.id, shape.label()), sample.samples, sample.seed, tol, |u, v| spectral_residual(&eval, &shape, u, v))?;
                let ok = r.pass;
                Ok((to_value(&r), ok))
            } else if let Some(d) = dims {
                let dims = parse_triple(&d)?;
                let tol = sample.tol.unwrap_or_else(|| default_tolerance(dims.iter().product()));
                let (a, b) = (|x: f64| f.eval(x), |x: f64| f.partner(x));
                let r = sweep(&format!("{} inhomogeneous {dims:?}", f.id), sample.samples, sample.seed, tol, |u, v| inhomogeneous_residual(&a, &b, dims, u, v))?;
                let ok = r.pass;
                Ok((to_value(&r), ok))
            } else {
                let reports = f.certificates.iter().map(|c| certificate_report(&f, c, &sample)).collect::<Result<Vec<_>, _>>()?;
                Ok(reports_value(&reports))
            }
        }
        Cmd::Sweep { family, sample } => {
            let ids: Vec<String> = match family {
                Some(id) => vec![id],
                None => registry::family_ids().into_iter().map(String::from).collect(),
            };
            let mut reports = vec![];
            for id in ids {
                let f = registry::instantiate(&id, None)?;
                for c in &f.certificates {
                    reports.push(certificate_report(&f, c, &sample)?);
                }
            }
            Ok(reports_value(&reports))
        }
        Cmd::ParitySearch { mode, target, budget, seed, tol, samples, full_dependence } => {
            let mode = match mode {
                Mode::Symmetric => SearchMode::SymmetricConstrained,
                Mode::Random => SearchMode::RandomUnconstrained,
                Mode::Fractional => SearchMode::FractionalPhases,
            };
            let mut cfg = SearchConfig::new(mode, SearchTarget::parse(&target)?, budget, seed);
            cfg.tol = tol;
            cfg.samples = samples;
            cfg.full_dependence = full_dependence;
            Ok((to_value(&parity_search(&cfg)?), true))
        }
        Cmd::Transfer { fam, sites, u } => {
            let (f, chain) = chain_for(&fam, sites)?;
            Ok((to_value(&transfer_matrix(&|x| f.eval(x), &chain, u)?), true))
        }
        Cmd::Hamiltonian { fam, sites, fd_step, v } => {
            let (f, chain) = chain_for(&fam, sites)?;
            let rep = hamiltonian_extract(&|x| f.eval(x), &chain, fd_step, v)?;
            Ok((to_value(&rep), true))
        }
        Cmd::Partition { fam, sites, rows, u } => {
            let (f, chain) = chain_for(&fam, sites)?;
            let z = partition_function(&|x| f.eval(x), &chain, rows, u)?;
            Ok((json!({"z": [z.re, z.im], "sites": sites, "rows": rows, "u": u}), true))
        }
        Cmd::Gate { gamma, beta, u, alpha, schedule } => {
            let (gate, params): (CMatrix, GateParams) = match schedule {
                Some(t) => {
                    let mut p = time_schedule(t);
                    p.alpha_phase = alpha;
                    (gate_from_params(&p), p)
                }
                None => unitarize(gamma, beta, u, alpha),
            };
            let mut states = vec![];
            let mut conc = vec![];
            for i in 0..4 {
                let s = apply_gate(&gate, i)?;
                conc.push(concurrence(&s)?.value);
                states.push(s);
            }
            Ok((json!({"gate": gate, "params": params, "outputs": states, "concurrences": conc}), true))
        }
    }
}

fn chain_for(fam: &FamilyArgs, sites: usize) -> Result<(Family, ChainSpec), Failure> {
    let f = load(fam)?;
    let d = f.site_dim().ok_or_else(|| Failure::Usage(format!("{} does not act on two equal sites", f.id)))?;
    let chain = ChainSpec::new(sites, d)?;
    chain.dim()?;
    Ok((f, chain))
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match &cli.cmd {
        Cmd::Verify { sample, .. } | Cmd::Sweep { sample, .. } => sample.report.clone(),
        _ => None,
    };
    match run(cli.cmd) {
        Ok((value, pass)) => {
            let text = serde_json::to_string_pretty(&value).expect("json") + "\n";
            let written = emit(&text, cli.out.as_ref()).and_then(|_| report.map_or(Ok(()), |p| emit(&text, Some(&p))));
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
