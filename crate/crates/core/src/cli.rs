//! Command-line front end: argument parsing, dispatch and output.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage error, 3 runtime error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::functionals::{normalized_values, FunctionalParams};
use crate::oracles;
use crate::rng::{map_replicates, RngStream};
use crate::sampler::{calibrate_kappa, mean_mass_height, OffspringLaw, TreeModel};
use crate::stats::mc_estimate;
use crate::subordinator::{limit_integrals, DEFAULT_DELTA, DEFAULT_TOL};
use crate::tree::{read_json_lines, write_json_lines, WeightedTree};
use crate::verify::{run_suite, SuiteConfig, SuiteReport, SUITES};
use crate::zoom::{zoom_marginal_test, ZoomConfig, ZoomSpeed};

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "stable-trees", version, about = "Normalized stable trees: sampling, additive functionals, limits and checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample normalized trees (JSON lines, or a CSV summary per tree).
    ///
    /// CSV columns: replicate, vertices, height, mass, mean_height.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of trees.
        #[arg(long, default_value_t = 1)]
        replicates: usize,
    },
    /// Additive functionals Z_(alpha,beta) of sampled or supplied trees.
    ///
    /// CSV columns: gamma, alpha, beta, c, n, seed, replicate, z_total, z_leaf,
    /// height, normalized_subcritical, normalized_supercritical,
    /// leaf_normalized_subcritical, leaf_normalized_supercritical.
    /// The leaf is the highest vertex.
    Zfunc {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        /// Put beta on the curve beta = c alpha^(1-1/gamma) unless --beta is given.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        /// Read trees from a JSON-lines file instead of sampling.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Monte Carlo mean of int_0^inf exp(-S_t - c t / H) dt.
    ///
    /// CSV columns: gamma, c, H, delta, estimate, lower, upper, stderr, replicates.
    Limit {
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c: f64,
        #[arg(long = "H", default_value_t = 1.0, allow_negative_numbers = true)]
        h: f64,
        /// Time step of the path discretization.
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        /// Paths are followed until exp(-S_t) / gamma drops below this.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
    },
    /// Zoomed spine measure S^eps_t against the subordinator S_t.
    ///
    /// CSV columns: epsilon, t, ks_stat, p_value, correlation, replicates.
    Zoom {
        #[command(flatten)]
        model: ModelArgs,
        /// Decreasing ladder of zoom levels.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.03, 0.01])]
        epsilon: Vec<f64>,
        /// Cutoff speed: `linear`, or an exponent p in (1/2, 1) for eps^p.
        #[arg(long, default_value = "0.75")]
        speed: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 2000)]
        replicates: usize,
        /// Reference draws of S_t; defaults to ten per replicate.
        #[arg(long)]
        reference: Option<usize>,
    },
    /// Print a closed-form or quadrature oracle value.
    Oracle {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(oracles::ORACLE_NAMES))]
        name: String,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
    },
    /// Run a verification suite (or `all`); exit status 1 if any check fails.
    ///
    /// A table goes to stderr; the report goes to stdout or --output.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(suite_names()))]
        suite: String,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
    },
}

fn suite_names() -> Vec<&'static str> {
    let mut v = SUITES.to_vec();
    v.push("all");
    v
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Offspring law: geometric, binary or zipf (default: geometric at gamma = 2, zipf otherwise).
    #[arg(long)]
    pub law: Option<String>,
    /// Vertices of the conditioned BGW tree.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Use the Brownian excursion sampler on this many grid points (gamma = 2).
    #[arg(long = "grid")]
    pub m: Option<usize>,
    /// Distance scale; default is analytic for finite variance, calibrated otherwise.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Trees used when calibrating kappa.
    #[arg(long, default_value_t = 500)]
    pub calibration_replicates: usize,
}

/// Parameter problems found before any work starts.
#[derive(Debug)]
struct Usage(String);

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Usage> {
    if cond {
        Ok(())
    } else {
        Err(Usage(msg()))
    }
}

fn check_gamma(gamma: f64) -> Result<(), Usage> {
    check(gamma > 1.0 && gamma <= 2.0, || format!("--gamma must lie in (1, 2], got {gamma}"))
}

fn check_nonneg(name: &str, v: f64) -> Result<(), Usage> {
    check(v >= 0.0 && v.is_finite(), || format!("--{name} must be finite and >= 0, got {v}"))
}

fn check_count(name: &str, v: usize) -> Result<(), Usage> {
    check(v >= 1, || format!("--{name} must be at least 1"))
}

impl Command {
    fn validate(&self) -> Result<(), Usage> {
        match self {
            Command::Sample { model, replicates } => {
                model.validate()?;
                check_count("replicates", *replicates)
            }
            Command::Zfunc { model, alpha, beta, c, replicates, .. } => {
                model.validate()?;
                check_nonneg("alpha", *alpha)?;
                if let Some(b) = beta {
                    check_nonneg("beta", *b)?;
                }
                if let Some(c) = c {
                    check_nonneg("c", *c)?;
                }
                check_count("replicates", *replicates)
            }
            Command::Limit { gamma, c, h, delta, tol, replicates } => {
                check_gamma(*gamma)?;
                check_nonneg("c", *c)?;
                check(*h > 0.0, || format!("--H must be positive, got {h}"))?;
                check(*delta > 0.0 && delta.is_finite(), || format!("--delta must be positive, got {delta}"))?;
                check(*tol > 0.0 && *tol < 1.0, || format!("--tol must lie in (0, 1), got {tol}"))?;
                check_count("replicates", *replicates)
            }
            Command::Zoom { model, epsilon, t, replicates, .. } => {
                model.validate()?;
                check(!epsilon.is_empty(), || "--epsilon needs at least one value".into())?;
                check(*t > 0.0 && t.is_finite(), || format!("--t must be positive, got {t}"))?;
                check_count("replicates", *replicates)
            }
            Command::Oracle { gamma, alpha, .. } => {
                check_gamma(*gamma)?;
                if let Some(a) = alpha {
                    check_nonneg("alpha", *a)?;
                }
                Ok(())
            }
            Command::Verify { gamma, n, replicates, .. } => {
                if let Some(g) = gamma {
                    check_gamma(*g)?;
                }
                if let Some(n) = n {
                    check_count("n", *n)?;
                }
                if let Some(r) = replicates {
                    check_count("replicates", *r)?;
                }
                Ok(())
            }
        }
    }
}

impl ModelArgs {
    fn validate(&self) -> Result<(), Usage> {
        check_gamma(self.gamma)?;
        check_count("n", self.n)?;
        if let Some(m) = self.m {
            check(self.gamma == 2.0, || "--grid needs --gamma 2".into())?;
            check(m >= 2, || "--grid must be at least 2".into())?;
        }
        if let Some(k) = self.kappa {
            check(k > 0.0 && k.is_finite(), || format!("--kappa must be positive, got {k}"))?;
        }
        check(self.calibration_replicates >= 2, || "--calibration-replicates must be at least 2".into())
    }

    fn size(&self) -> usize {
        self.m.unwrap_or(self.n)
    }

    fn model(&self, stream: &RngStream) -> Result<TreeModel, Error> {
        if let Some(m) = self.m {
            return Ok(TreeModel::Brownian { m });
        }
        let law = match &self.law {
            Some(name) => OffspringLaw::by_name(name, self.gamma)?,
            None => OffspringLaw::default_for(self.gamma)?,
        };
        let kappa = match (self.kappa, law.brownian_kappa()) {
            (Some(k), _) => k,
            (None, Some(k)) => k,
            (None, None) => {
                let n = self.n.min(100_000);
                calibrate_kappa(&law, self.gamma, n, self.calibration_replicates, stream)?.kappa
            }
        };
        Ok(TreeModel::Bgw { law, n: self.n, kappa })
    }
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    cli.command.validate()?;
    if let Some(t) = cli.global.threads {
        check_count("threads", t)?;
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Runtime(Error::Config(e.to_string())))?;
    }
    let g = &cli.global;
    let root = RngStream::new(g.seed, 0);
    let (bytes, code) = match &cli.command {
        Command::Sample { model, replicates } => (sample(g, &root, model, *replicates)?, EXIT_OK),
        Command::Zfunc { model, alpha, beta, c, replicates, input } => {
            let params = match (beta, c) {
                (Some(b), c) => FunctionalParams::with_c(*alpha, *b, model.gamma, c.unwrap_or(0.0))?,
                (None, Some(c)) => FunctionalParams::on_curve(*alpha, *c, model.gamma)?,
                (None, None) => FunctionalParams::new(*alpha, 0.0, model.gamma)?,
            };
            (zfunc(g, &root, model, params, *replicates, input.as_deref())?, EXIT_OK)
        }
        Command::Limit { gamma, c, h, delta, tol, replicates } => {
            (limit(g, &root, *gamma, *c, *h, *delta, *tol, *replicates)?, EXIT_OK)
        }
        Command::Zoom { model, epsilon, speed, t, replicates, reference } => {
            let speed = parse_speed(speed)?;
            let config = ZoomConfig {
                t: *t,
                epsilons: epsilon.clone(),
                speed,
                replicates: *replicates,
                reference_size: reference.unwrap_or(10 * replicates),
            };
            (zoom(g, &root, model, &config)?, EXIT_OK)
        }
        Command::Oracle { name, gamma, p, alpha } => (oracle(g, name, *gamma, *p, *alpha)?, EXIT_OK),
        Command::Verify { suite, gamma, n, replicates } => {
            let config = SuiteConfig { seed: g.seed, gamma: *gamma, n: *n, replicates: *replicates };
            verify(g, suite, &config)?
        }
    };
    emit(g.output.as_deref(), &bytes)?;
    Ok(code)
}

fn parse_speed(s: &str) -> Result<ZoomSpeed, Failure> {
    if s.eq_ignore_ascii_case("linear") {
        return Ok(ZoomSpeed::Linear);
    }
    let p: f64 = s
        .parse()
        .map_err(|_| Failure::Usage(format!("--speed must be `linear` or a number, got {s}")))?;
    Ok(ZoomSpeed::new_intermediate(p)?)
}

/// Write to `path` through a temporary file in the same directory, or to stdout.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| Failure::from(e.error))?;
        }
    }
    Ok(())
}

fn json_bytes(value: &serde_json::Value) -> Result<Vec<u8>, Failure> {
    let mut v = serde_json::to_vec_pretty(value).map_err(Error::from)?;
    v.push(b'\n');
    Ok(v)
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s.into_bytes()
}

fn sample_trees(root: &RngStream, model: &ModelArgs, replicates: usize) -> Result<Vec<WeightedTree>, Error> {
    let m = model.model(&root.fork(1))?;
    map_replicates(&root.fork(2), replicates, |_, rng| m.sample(rng)).into_iter().collect()
}

fn sample(g: &GlobalArgs, root: &RngStream, model: &ModelArgs, replicates: usize) -> Result<Vec<u8>, Failure> {
    let trees = sample_trees(root, model, replicates)?;
    match g.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut buf = Vec::new();
            write_json_lines(&mut buf, &trees)?;
            Ok(buf)
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = trees
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    vec![
                        i.to_string(),
                        t.len().to_string(),
                        t.total_height().to_string(),
                        t.total_mass().to_string(),
                        mean_mass_height(t).to_string(),
                    ]
                })
                .collect();
            Ok(csv_bytes(&["replicate", "vertices", "height", "mass", "mean_height"], &rows))
        }
    }
}

#[derive(Serialize)]
struct ZRow {
    gamma: f64,
    alpha: f64,
    beta: f64,
    c: f64,
    n: usize,
    seed: u64,
    replicate: usize,
    z_total: f64,
    z_leaf: f64,
    height: f64,
    normalized_subcritical: f64,
    normalized_supercritical: f64,
    leaf_normalized_subcritical: f64,
    leaf_normalized_supercritical: f64,
}

fn zfunc(
    g: &GlobalArgs,
    root: &RngStream,
    model: &ModelArgs,
    params: FunctionalParams,
    replicates: usize,
    input: Option<&Path>,
) -> Result<Vec<u8>, Failure> {
    let row = |i: usize, t: &WeightedTree, n: usize| -> Result<ZRow, Error> {
        let r = normalized_values(t, &params, t.argmax_vertex())?;
        Ok(ZRow {
            gamma: params.gamma,
            alpha: params.alpha,
            beta: params.beta,
            c: params.c,
            n,
            seed: g.seed,
            replicate: i,
            z_total: r.z_total,
            z_leaf: r.z_leaf,
            height: r.height,
            normalized_subcritical: r.normalized_subcritical,
            normalized_supercritical: r.normalized_supercritical,
            leaf_normalized_subcritical: r.leaf_normalized_subcritical,
            leaf_normalized_supercritical: r.leaf_normalized_supercritical,
        })
    };
    let rows = match input {
        Some(path) => {
            let f = std::fs::File::open(path)?;
            let trees = read_json_lines(std::io::BufReader::new(f))?;
            trees.iter().enumerate().map(|(i, t)| row(i, t, t.len())).collect::<Result<Vec<_>, Error>>()?
        }
        None => {
            let m = model.model(&root.fork(1))?;
            map_replicates(&root.fork(2), replicates, |i, rng| row(i, &m.sample(rng)?, model.size()))
                .into_iter()
                .collect::<Result<Vec<_>, Error>>()?
        }
    };
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => json_bytes(&json!({ "schema": SCHEMA, "rows": rows })),
        Format::Csv => {
            let header = [
                "gamma", "alpha", "beta", "c", "n", "seed", "replicate", "z_total", "z_leaf", "height",
                "normalized_subcritical", "normalized_supercritical",
                "leaf_normalized_subcritical", "leaf_normalized_supercritical",
            ];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.gamma.to_string(),
                        r.alpha.to_string(),
                        r.beta.to_string(),
                        r.c.to_string(),
                        r.n.to_string(),
                        r.seed.to_string(),
                        r.replicate.to_string(),
                        r.z_total.to_string(),
                        r.z_leaf.to_string(),
                        r.height.to_string(),
                        r.normalized_subcritical.to_string(),
                        r.normalized_supercritical.to_string(),
                        r.leaf_normalized_subcritical.to_string(),
                        r.leaf_normalized_supercritical.to_string(),
                    ]
                })
                .collect();
            Ok(csv_bytes(&header, &body))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn limit(
    g: &GlobalArgs,
    root: &RngStream,
    gamma: f64,
    c: f64,
    h: f64,
    delta: f64,
    tol: f64,
    replicates: usize,
) -> Result<Vec<u8>, Failure> {
    let samples = map_replicates(root, replicates, |_, rng| {
        limit_integrals(gamma, &[(c, h)], delta, tol, rng).map(|v| v[0])
    })
    .into_iter()
    .collect::<Result<Vec<_>, Error>>()?;
    let mean = |f: fn(&crate::subordinator::LimitSample) -> f64| {
        samples.iter().map(f).sum::<f64>() / replicates as f64
    };
    let (lower, upper) = (mean(|s| s.lower), mean(|s| s.upper));
    let estimates: Vec<f64> = samples.iter().map(|s| s.estimate).collect();
    let (estimate, stderr) = if replicates >= 2 {
        let e = mc_estimate(&estimates)?;
        (e.mean, e.stderr)
    } else {
        (estimates[0], f64::NAN)
    };
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => json_bytes(&json!({
            "schema": SCHEMA,
            "gamma": gamma, "c": c, "H": h, "delta": delta,
            "estimate": estimate, "lower": lower, "upper": upper,
            "stderr": if stderr.is_finite() { json!(stderr) } else { json!(null) },
            "replicates": replicates,
        })),
        Format::Csv => Ok(csv_bytes(
            &["gamma", "c", "H", "delta", "estimate", "lower", "upper", "stderr", "replicates"],
            &[vec![
                gamma.to_string(),
                c.to_string(),
                h.to_string(),
                delta.to_string(),
                estimate.to_string(),
                lower.to_string(),
                upper.to_string(),
                stderr.to_string(),
                replicates.to_string(),
            ]],
        )),
    }
}

fn zoom(g: &GlobalArgs, root: &RngStream, model: &ModelArgs, config: &ZoomConfig) -> Result<Vec<u8>, Failure> {
    let m = model.model(&root.fork(1))?;
    let results = zoom_marginal_test(&m, config, &root.fork(2))?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => json_bytes(&json!({ "schema": SCHEMA, "speed": config.speed, "rows": results })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| {
                    vec![
                        r.epsilon.to_string(),
                        r.t.to_string(),
                        r.ks_stat.to_string(),
                        r.p_value.to_string(),
                        r.correlation.to_string(),
                        r.replicates.to_string(),
                    ]
                })
                .collect();
            Ok(csv_bytes(&["epsilon", "t", "ks_stat", "p_value", "correlation", "replicates"], &rows))
        }
    }
}

fn oracle(g: &GlobalArgs, name: &str, gamma: f64, p: Option<f64>, alpha: Option<f64>) -> Result<Vec<u8>, Failure> {
    let v = oracles::evaluate(name, gamma, p, alpha)?;
    match g.format.unwrap_or(Format::Json) {
        Format::Json => {
            let params: serde_json::Map<String, serde_json::Value> =
                v.params.iter().map(|(k, x)| (k.clone(), json!(x))).collect();
            json_bytes(&json!({
                "schema": SCHEMA,
                "name": v.name,
                "params": params,
                "value": v.value,
                "method": v.method,
                "abs_err": v.abs_err,
            }))
        }
        Format::Csv => {
            let mut header = vec!["name"];
            let mut row = vec![v.name.clone()];
            for (k, x) in &v.params {
                header.push(k);
                row.push(x.to_string());
            }
            header.push("value");
            row.push(v.value.to_string());
            Ok(csv_bytes(&header, &[row]))
        }
    }
}

fn verify(g: &GlobalArgs, suite: &str, config: &SuiteConfig) -> Result<(Vec<u8>, i32), Failure> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let reports = names
        .iter()
        .map(|s| {
            let r = run_suite(s, config)?;
            eprint!("{r}");
            Ok(r)
        })
        .collect::<Result<Vec<SuiteReport>, Error>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let code = if pass { EXIT_OK } else { EXIT_CHECK_FAILED };
    let bytes = match g.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&json!({ "schema": SCHEMA, "pass": pass, "reports": reports }))?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| {
                        vec![
                            r.suite.clone(),
                            format!("\"{}\"", c.name.replace('"', "\"\"")),
                            serde_json::to_value(c.kind).map(|v| v.as_str().unwrap_or("").to_string()).unwrap_or_default(),
                            c.target.to_string(),
                            c.estimate.to_string(),
                            c.tolerance.to_string(),
                            c.pass.to_string(),
                        ]
                    })
                })
                .collect();
            csv_bytes(&["suite", "check", "kind", "target", "estimate", "tolerance", "pass"], &rows)
        }
    };
    Ok((bytes, code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn flag_table_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["stable-trees", "limit", "--c", "1"]), EXIT_USAGE);
        assert_eq!(run(["stable-trees", "oracle", "height_moment", "--gamma", "2.5", "--p", "1"]), EXIT_USAGE);
        assert_eq!(run(["stable-trees", "oracle", "no_such", "--gamma", "2"]), EXIT_USAGE);
        assert_eq!(run(["stable-trees", "zfunc", "--gamma", "2", "--alpha", "-1"]), EXIT_USAGE);
        assert_eq!(run(["stable-trees", "sample", "--gamma", "1.5", "--grid", "100"]), EXIT_USAGE);
        assert_eq!(run(["stable-trees", "oracle", "height_moment", "--gamma", "2"]), EXIT_USAGE);
        assert_eq!(run(["stable-trees", "zoom", "--gamma", "2", "--speed", "0.3"]), EXIT_USAGE);
    }

    #[test]
    fn speeds() {
        assert!(matches!(parse_speed("linear"), Ok(ZoomSpeed::Linear)));
        assert!(matches!(parse_speed("0.8"), Ok(ZoomSpeed::Intermediate { .. })));
        assert!(matches!(parse_speed("fast"), Err(Failure::Usage(_))));
    }
}
