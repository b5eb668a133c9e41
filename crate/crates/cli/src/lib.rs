//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification check found a violation,
//! 2 invalid input, 3 infeasible bound or dense cap exceeded.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use trotterlab::bounds::{self, Family, GateCountQuery, Regime};
use trotterlab::dense::DEFAULT_CAP;
use trotterlab::fermion::{FermionHamiltonian, FermionJson};
use trotterlab::lab::{self, CsvRow, Ensemble, ExperimentConfig};
use trotterlab::models::{self, GaussianModel, ModelSpec};
use trotterlab::norms::{fermion_profile, NormProfile};
use trotterlab::pauli::PauliHamiltonian;
use trotterlab::suzuki::{build_schedule, build_schedule_unmerged};
use trotterlab::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "trotterlab", version, about = "Trotter error bounds, gate counts and numerical checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest qubit count handled densely.
    #[arg(long = "cap-n", global = true, default_value_t = DEFAULT_CAP)]
    cap_n: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a model Hamiltonian as JSON.
    Model(ModelArgs),
    /// Local norm profile of a Hamiltonian file ("-" for stdin).
    Norms {
        input: String,
        /// Input is a fermionic Hamiltonian.
        #[arg(long)]
        fermionic: bool,
    },
    /// Suzuki schedule for Γ terms.
    Schedule {
        #[arg(long)]
        gamma: usize,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Keep adjacent repeats of the same term.
        #[arg(long)]
        unmerged: bool,
    },
    /// Gate count for a Hamiltonian file under a regime.
    Gatecount(GateArgs),
    /// Sample Trotter errors over states or random coefficients.
    Simulate(SimArgs),
    /// Run inequality and closed-form checks.
    Verify(VerifyArgs),
    /// Truncation plan for a power-law lattice.
    Truncate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Tabulated gate-complexity scalings.
    Table1 {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// Power-law exponents to list (`d/2 ≤ α`).
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0])]
        alpha: Vec<f64>,
    },
    /// Counting lower bound on the epsilon-net size of the SYK ensemble.
    Lowerbound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    ChainHeisenberg,
    PowerLaw,
    KLocalSyk,
    Zxyz,
    FermiHop,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Emit the fermionic operator instead of its qubit image (fermi-hop only).
    #[arg(long)]
    fermionic: bool,
}

#[derive(Args, Debug)]
struct GateArgs {
    input: String,
    #[arg(long, default_value = "nonrandom-typical")]
    regime: String,
    #[arg(long, default_value_t = 2)]
    order: u32,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long)]
    fermionic: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleArg {
    Basis,
    Haar,
    Gaussian,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct SimArgs {
    input: String,
    #[arg(long, value_enum, default_value = "basis")]
    ensemble: EnsembleArg,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Trotter steps.
    #[arg(long)]
    r: u64,
    #[arg(long, default_value_t = 1)]
    order: u32,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0])]
    p: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Suite {
    Hypercontractivity,
    Smoothness,
    Weighted,
    Fermionic,
    TwoPoint,
    Optimality,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 4.0])]
    p: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// An error tagged with its exit code.
#[derive(Debug)]
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Cap(_) | Error::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_INVALID,
        };
        Fail(code, e.to_string())
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail(EXIT_INVALID, format!("io: {e}"))
    }
}

type CliResult = Result<(String, i32), Fail>;

fn read_input(path: &str) -> Result<String, Fail> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Fail(EXIT_INVALID, format!("cannot read {path}: {e}")))
    }
}

fn json_err(e: serde_json::Error) -> Fail {
    Fail(EXIT_INVALID, format!("malformed JSON at line {} column {}: {e}", e.line(), e.column()))
}

fn read_hamiltonian(path: &str) -> Result<PauliHamiltonian, Fail> {
    let s = read_input(path)?;
    let j = serde_json::from_str(&s).map_err(json_err)?;
    Ok(PauliHamiltonian::from_json(&j)?)
}

fn read_fermionic(path: &str) -> Result<FermionHamiltonian, Fail> {
    let s = read_input(path)?;
    let j: FermionJson = serde_json::from_str(&s).map_err(json_err)?;
    Ok(FermionHamiltonian::from_json(&j)?)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Fail> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Fail(EXIT_INVALID, e.to_string()))
}

fn need_seed(seed: Option<u64>, cmd: &str) -> Result<u64, Fail> {
    seed.ok_or_else(|| Fail(EXIT_INVALID, format!("{cmd} is stochastic and needs --seed")))
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T, Fail> {
    v.ok_or_else(|| Fail(EXIT_INVALID, format!("family {family} needs --{flag}")))
}

fn cmd_model(a: &ModelArgs) -> CliResult {
    let spec = match a.family {
        FamilyArg::ChainHeisenberg => ModelSpec::ChainHeisenberg { n: need(a.n, "n", "chain-heisenberg")?, j: a.j },
        FamilyArg::PowerLaw => ModelSpec::PowerLaw {
            n: need(a.n, "n", "power-law")?,
            d: a.d,
            alpha: need(a.alpha, "alpha", "power-law")?,
        },
        FamilyArg::KLocalSyk => ModelSpec::KLocalSyk {
            n: need(a.n, "n", "k-local-syk")?,
            k: a.k,
            j: a.j,
            seed: need_seed(a.seed, "model --family k-local-syk")?,
        },
        FamilyArg::Zxyz => ModelSpec::Zxyz { m: need(a.m, "m", "zxyz")? },
        FamilyArg::FermiHop => ModelSpec::FermiHop { m: need(a.m, "m", "fermi-hop")? },
    };
    if a.fermionic {
        let ModelSpec::FermiHop { m } = spec else {
            return Err(Fail(EXIT_INVALID, "--fermionic applies to fermi-hop only".into()));
        };
        return Ok((to_json(&models::fermi_hop(m)?.combined()?.to_json())?, EXIT_OK));
    }
    Ok((to_json(&models::build(&spec)?.to_json())?, EXIT_OK))
}

fn profile_of(input: &str, fermionic: bool) -> Result<(NormProfile, usize), Fail> {
    if fermionic {
        let f = read_fermionic(input)?;
        Ok((fermion_profile(&f)?, f.n))
    } else {
        let h = read_hamiltonian(input)?;
        Ok((NormProfile::of(&h)?, h.n()))
    }
}

fn cmd_gatecount(a: &GateArgs) -> CliResult {
    let regime: Regime = a.regime.parse()?;
    let q = GateCountQuery::new(a.t, a.eps, a.delta, a.order, regime)?;
    let (p, n) = profile_of(&a.input, a.fermionic)?;
    let mut res = bounds::gatecount(&p, n, &q)?;
    if let (true, Some(lf)) = (a.fermionic, p.lambda_ferm) {
        if regime == Regime::NonrandomTypical {
            let mut fp = p.clone();
            fp.lambda = lf;
            res = bounds::gatecount_nonrandom(&fp, &q)?;
        }
    }
    let code = if res.infeasible { EXIT_INFEASIBLE } else { EXIT_OK };
    Ok((to_json(&res)?, code))
}

fn report_rows(rep: &lab::ErrorReport) -> Vec<CsvRow> {
    let seed = Some(rep.config.seed);
    let mut rows = vec![CsvRow::new("spectral_norm", None, rep.spectral_norm, None, seed)];
    for e in &rep.p_norms {
        rows.push(CsvRow::new("p_norm", Some(e.p), e.norm, None, seed));
        rows.push(CsvRow::new("tail", Some(e.p), rep.tail.mean, Some(e.markov_bound), seed));
    }
    rows.push(CsvRow::new("state_error_mean", None, rep.state_error.mean, None, seed));
    rows.push(CsvRow::new("state_error_se", None, rep.state_error.se, None, seed));
    for (q, v) in &rep.quantiles {
        rows.push(CsvRow::new(format!("quantile_{q}"), None, *v, None, seed));
    }
    rows.push(CsvRow::new("fixed_input_lower_bound", None, rep.fixed_input_lower_bound, Some(rep.spectral_norm), seed));
    rows
}

fn random_rows(rep: &lab::RandomReport) -> Vec<CsvRow> {
    let seed = Some(rep.config.seed);
    let mut rows = vec![
        CsvRow::new("l2_error_mean", None, rep.l2_error.mean, None, seed),
        CsvRow::new("l2_error_se", None, rep.l2_error.se, None, seed),
        CsvRow::new("tail", None, rep.tail.mean, None, seed),
        CsvRow::new("trace_distance_mean", None, rep.trace_distance.mean, Some(2.0 * rep.l2_error.mean), seed),
    ];
    for (q, v) in &rep.quantiles {
        rows.push(CsvRow::new(format!("quantile_{q}"), None, *v, None, seed));
    }
    for s in &rep.rows {
        rows.push(CsvRow::new(format!("sample_{}_l2_error", s.index), None, s.l2_error, None, seed));
    }
    rows
}

fn emit_csv(rows: &[CsvRow]) -> Result<String, Fail> {
    Ok(lab::csv_string(rows)?)
}

fn cmd_simulate(a: &SimArgs, cap: usize) -> CliResult {
    let seed = need_seed(a.seed, "simulate")?;
    let h = read_hamiltonian(&a.input)?;
    let ensemble = match a.ensemble {
        EnsembleArg::Basis => Ensemble::Basis1Design,
        EnsembleArg::Haar => Ensemble::Haar,
        EnsembleArg::Gaussian => Ensemble::GaussianHamiltonian,
    };
    let mut cfg = ExperimentConfig::new(seed, a.samples, ensemble, a.t, a.r, a.order, a.eps);
    cfg.ps = a.p.clone();
    cfg.cap = cap;
    if ensemble == Ensemble::GaussianHamiltonian {
        let rep = lab::sample_random_hamiltonian(&GaussianModel { base: h }, &cfg, None, false)?;
        let out = if a.format == Format::Csv { emit_csv(&random_rows(&rep))? } else { to_json(&rep)? };
        return Ok((out, EXIT_OK));
    }
    let rep = lab::sample_typical_error(&h, &cfg)?;
    let out = if a.format == Format::Csv { emit_csv(&report_rows(&rep))? } else { to_json(&rep)? };
    Ok((out, EXIT_OK))
}

fn cmd_verify(a: &VerifyArgs) -> CliResult {
    let seed = need_seed(a.seed, "verify")?;
    if a.p.iter().any(|&p| p.is_nan() || p < 2.0) {
        return Err(Fail(EXIT_INVALID, "verify needs every --p >= 2".into()));
    }
    if a.n_max == 0 || a.n_max > 8 {
        return Err(Fail(EXIT_INVALID, "--n-max must lie in 1..=8".into()));
    }
    let want = |s: Suite| a.suite == s || a.suite == Suite::All;
    let mut reports = Vec::new();
    if want(Suite::Hypercontractivity) {
        reports.push(lab::hypercontractivity_suite(seed, a.samples, a.n_max, 3, &a.p)?);
    }
    if want(Suite::Smoothness) {
        reports.push(lab::uniform_smoothness_suite(seed, a.n_max, &a.p, a.samples)?);
    }
    if want(Suite::Weighted) {
        reports.push(lab::weighted_smoothness_suite(seed, a.n_max, &a.p, a.samples)?);
    }
    if want(Suite::Fermionic) {
        reports.push(lab::check_fermionic_smoothness(seed, a.n_max, &a.p, a.samples)?);
    }
    if want(Suite::TwoPoint) {
        reports.push(lab::two_point_suite(seed, a.samples));
    }
    let mut optimality = Vec::new();
    if want(Suite::Optimality) {
        for m in 1..=2 {
            optimality.push(lab::optimality_experiment(m, 1, 12)?);
            optimality.push(lab::optimality_experiment(m, 2, 12)?);
            optimality.push(lab::fermi_optimality_experiment(m, 12)?);
        }
    }
    let failed = reports.iter().any(|r| !r.passed);
    let code = if failed { EXIT_CHECK_FAILED } else { EXIT_OK };
    let out = if a.format == Format::Csv {
        let mut rows = Vec::new();
        for r in &reports {
            rows.push(CsvRow::new(format!("{}_violations", r.name), None, r.violations as f64, Some(0.0), Some(seed)));
            rows.push(CsvRow::new(format!("{}_worst_margin", r.name), None, r.worst_relative_margin, None, Some(seed)));
        }
        for o in &optimality {
            for e in &o.entries {
                let q = format!("{}_m{}_order{}_{}", o.model, o.m, o.order, e.name);
                rows.push(CsvRow::new(format!("{q}_two_norm"), Some(2.0), e.two_norm, Some(e.closed_two_norm), None));
            }
        }
        emit_csv(&rows)?
    } else {
        #[derive(Serialize)]
        struct Out<'a> {
            seed: u64,
            checks: &'a [lab::CheckReport],
            optimality: &'a [lab::OptimalityReport],
        }
        to_json(&Out { seed, checks: &reports, optimality: &optimality })?
    };
    Ok((out, code))
}

fn cmd_table1(k: u32, d: u32, alphas: &[f64]) -> CliResult {
    let mut cells = bounds::table1_cells(Family::Norms)?;
    cells.extend(bounds::table1_cells(Family::KLocal { k })?);
    for &alpha in alphas {
        cells.extend(bounds::table1_cells(Family::PowerLaw { d, alpha })?);
    }
    Ok((to_json(&cells)?, EXIT_OK))
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.cmd {
        Cmd::Model(a) => cmd_model(a),
        Cmd::Norms { input, fermionic } => Ok((to_json(&profile_of(input, *fermionic)?.0)?, EXIT_OK)),
        Cmd::Schedule { gamma, order, t, unmerged } => {
            let s = if *unmerged { build_schedule_unmerged(*gamma, *order, *t)? } else { build_schedule(*gamma, *order, *t)? };
            Ok((to_json(&s)?, EXIT_OK))
        }
        Cmd::Gatecount(a) => cmd_gatecount(a),
        Cmd::Simulate(a) => cmd_simulate(a, cli.cap_n),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Truncate { n, d, alpha, t, eps } => Ok((to_json(&bounds::truncation_plan(*n, *d, *alpha, *t, *eps)?)?, EXIT_OK)),
        Cmd::Table1 { k, d, alpha } => cmd_table1(*k, *d, alpha),
        Cmd::Lowerbound { n, k, j, eps } => Ok((to_json(&bounds::counting_net_size(*k, *n, *j, *eps)?)?, EXIT_OK)),
    }
}

/// Parse `argv`, run the command, print or write its output and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((text, code)) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_INVALID;
            }
            code
        }
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}
