//! Named acceptance suites: each one wires samplers, functionals and oracles
//! together and reports a list of pass/fail checks.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::functionals::{z_leaf, z_total, FunctionalParams};
use crate::oracles;
use crate::rng::{map_replicates, RngStream};
use crate::sampler::{
    calibrate_kappa, conditioned_offspring, cycle_lemma_rotate, mean_mass_height,
    random_weighted_tree, sample_bgw_conditioned, sample_brownian_tree, scale_to_unit,
    OffspringLaw, TreeModel,
};
use crate::stats::{ks_two_sample, mc_estimate, z_difference, McEstimate};
use crate::subordinator::{self, limit_integrals, sample_at, DEFAULT_DELTA, DEFAULT_TOL};
use crate::tree::WeightedTree;
use crate::zoom::{sample_mass_vertex, zoom_marginal_test, ZoomConfig, ZoomSpeed};

pub const SUITES: [&str; 8] = [
    "identities",
    "functionals",
    "moments",
    "subordinator",
    "subcritical",
    "supercritical",
    "zoom",
    "sampler",
];

/// Budget overrides; every suite has its own defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub gamma: Option<f64>,
    /// Tree size (or grid size for the Brownian sampler).
    pub n: Option<usize>,
    pub replicates: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 1, gamma: None, n: None, replicates: None }
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn replicates(&self, default: usize, min: usize) -> Result<usize> {
        let r = self.replicates.unwrap_or(default);
        ensure(r >= min, || {
            Error::Config(format!("this suite needs at least {min} replicates, got {r}"))
        })?;
        Ok(r)
    }

    fn size(&self, default: usize, min: usize) -> Result<usize> {
        let n = self.n.unwrap_or(default);
        ensure(n >= min, || Error::Config(format!("size must be at least {min}, got {n}")))?;
        Ok(n)
    }

    fn gammas(&self, default: &[f64]) -> Result<Vec<f64>> {
        match self.gamma {
            Some(g) => {
                crate::error::check_gamma(g)?;
                Ok(vec![g])
            }
            None => Ok(default.to_vec()),
        }
    }

    fn brownian_only(&self) -> Result<()> {
        ensure(self.gamma.is_none_or(|g| g == 2.0), || {
            Error::Config("this suite uses the Brownian case, gamma = 2".into())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `|estimate - target| <= tolerance`.
    Band,
    /// `estimate < target`.
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub target: f64,
    pub estimate: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn band(name: impl Into<String>, target: f64, estimate: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Band,
            target,
            estimate,
            tolerance,
            pass: (estimate - target).abs() <= tolerance,
        }
    }

    pub fn below(name: impl Into<String>, bound: f64, estimate: f64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Below,
            target: bound,
            estimate,
            tolerance: 0.0,
            pass: estimate < bound,
        }
    }

    /// Monte Carlo mean against a target, `k` standard errors plus `allowance`.
    fn mc(name: impl Into<String>, target: f64, est: &McEstimate, k: f64, allowance: f64) -> Self {
        Self::band(name, target, est.mean, k * est.stderr + allowance)
    }
}

/// Strict decrease along a ladder, one check per step.
fn decreasing(name: &str, labels: &[String], values: &[f64]) -> Vec<Check> {
    (1..values.len())
        .map(|i| Check::below(format!("{name}: {} < {}", labels[i], labels[i - 1]), values[i - 1], values[i]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Note {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub notes: Vec<Note>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &str, config: &SuiteConfig, checks: Vec<Check>, notes: Vec<Note>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.into(), config: config.clone(), checks, notes, pass }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {}): {}", self.suite, self.config.seed, if self.pass { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            let rel = match c.kind {
                CheckKind::Band => format!("target {:.6e} +- {:.2e}", c.target, c.tolerance),
                CheckKind::Below => format!("bound  {:.6e}", c.target),
            };
            writeln!(
                f,
                "  [{}] {:<52} estimate {:.6e}  {}",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.estimate,
                rel
            )?;
        }
        for n in &self.notes {
            writeln!(f, "  note {} = {:.6e}", n.name, n.value)?;
        }
        Ok(())
    }
}

fn note(name: impl Into<String>, value: f64) -> Note {
    Note { name: name.into(), value }
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let stream = RngStream::new(config.seed, 0).fork(
        SUITES.iter().position(|s| *s == name).unwrap_or(usize::MAX) as u64,
    );
    let (checks, notes) = match name {
        "identities" => identities(config)?,
        "functionals" => functionals(config, &stream)?,
        "moments" => moments(config, &stream)?,
        "subordinator" => subordinator_suite(config, &stream)?,
        "subcritical" => subcritical(config, &stream)?,
        "supercritical" => supercritical(config, &stream)?,
        "zoom" => zoom(config, &stream)?,
        "sampler" => sampler(config, &stream)?,
        other => {
            return Err(Error::Config(format!(
                "unknown suite {other}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport::new(name, config, checks, notes))
}

type Outcome = (Vec<Check>, Vec<Note>);

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn identities(config: &SuiteConfig) -> Result<Outcome> {
    let mut checks = Vec::new();
    for gamma in config.gammas(&[1.2, 1.5, 1.8, 2.0])? {
        checks.push(Check::band(
            format!("height_moment(p=0) = 1, gamma={gamma}"),
            1.0,
            oracles::height_moment(gamma, 0.0)?,
            1e-12,
        ));
        let h = oracles::height_moment(gamma, -1.0)?;
        let z = oracles::mean_z_alpha0(gamma, 0.0)?;
        checks.push(Check::band(format!("E[H(U)] = E[Z_(0,0)] (rel), gamma={gamma}"), 0.0, rel_err(h, z), 1e-10));
        for alpha in [0.0, 1.0, 2.0] {
            let closed = oracles::second_moment_closed(gamma, alpha)?;
            let quad = oracles::second_moment_quadrature(gamma, alpha)?;
            checks.push(Check::band(
                format!("second moment closed = quadrature, gamma={gamma} alpha={alpha}"),
                closed,
                quad.value,
                1e-8,
            ));
        }
        for alpha in [0.0, 1.0, 3.0] {
            let psi = oracles::first_moment_psi_rhs(gamma, alpha)?;
            checks.push(Check::band(
                format!("first moment psi = E[Z_(a,0)], gamma={gamma} alpha={alpha}"),
                oracles::mean_z_alpha0(gamma, alpha)?,
                psi.value,
                1e-8,
            ));
        }
        let c = oracles::tilt_constant(gamma)?;
        for p in [-0.5, 0.5, 1.0, 2.0, 3.0] {
            let ml = oracles::mittag_leffler_moment(gamma, p)?;
            let via_height = gamma.powf(p) * oracles::height_moment(gamma, 1.0 - p)? / c;
            checks.push(Check::band(
                format!("Mittag-Leffler = tilted height moment (rel), gamma={gamma} p={p}"),
                0.0,
                rel_err(ml, via_height),
                1e-10,
            ));
        }
    }
    Ok((checks, vec![]))
}

/// Random trees of several kinds for exact identities.
fn identity_tree(i: usize, max_n: usize, rng: &mut impl Rng) -> Result<WeightedTree> {
    let n = rng.random_range(2..=max_n.max(2));
    match i % 3 {
        0 => Ok(random_weighted_tree(n, rng)),
        1 => scale_to_unit(&sample_bgw_conditioned(&OffspringLaw::geometric_half(), n, rng)?, 2.0, 1.0),
        _ => scale_to_unit(&sample_bgw_conditioned(&OffspringLaw::zipf(1.5)?, n, rng)?, 1.5, 1.0),
    }
}

fn functionals(config: &SuiteConfig, stream: &RngStream) -> Result<Outcome> {
    let trees = config.replicates(100, 1)?;
    let max_n = config.size(1000, 2)?;
    let gammas = config.gammas(&[1.2, 1.5, 1.8, 2.0])?;
    let per_tree = map_replicates(stream, trees, |i, rng| -> Result<[f64; 4]> {
        let t = identity_tree(i, max_n, rng)?;
        let gamma = gammas[i % gammas.len()];
        let mut scaling: f64 = 0.0;
        let leaf = t.argmax_vertex();
        let x = rng.random_range(0..t.len());
        for a in [0.5, 2.0] {
            let s = t.rescale(a, gamma)?;
            for alpha in [0.0, 1.0, 2.0] {
                for beta in [0.0, 1.0, 2.0] {
                    let p = FunctionalParams::new(alpha, beta, gamma)?;
                    for v in [leaf, x] {
                        let lhs = z_leaf(&s, v, &p)?;
                        let rhs = a.powf(p.leaf_scaling_exponent()) * z_leaf(&t, v, &p)?;
                        if rhs > 0.0 {
                            scaling = scaling.max(rel_err(lhs, rhs));
                        }
                    }
                    let lhs = z_total(&s, &p);
                    let rhs = a.powf(p.total_scaling_exponent()) * z_total(&t, &p);
                    if rhs > 0.0 {
                        scaling = scaling.max(rel_err(lhs, rhs));
                    }
                }
            }
        }
        let mut aggregate: f64 = 0.0;
        for (alpha, beta) in [(0.0, 0.0), (1.0, 0.0), (0.5, 1.5), (3.0, 2.0)] {
            let p = FunctionalParams::new(alpha, beta, gamma)?;
            let total = z_total(&t, &p);
            let sum: f64 = (0..t.len())
                .map(|v| Ok(t.vertex_mass(v) * z_leaf(&t, v, &p)?))
                .sum::<Result<f64>>()?;
            if total > 0.0 {
                aggregate = aggregate.max(rel_err(sum, total));
            }
        }
        let height = t.total_height();
        let star = t.argmax_vertex();
        let mut linear: f64 = 0.0;
        let mut sublinear: f64 = 0.0;
        for v in 0..t.len() {
            let top = t.height(t.common_ancestor(v, star)?);
            for k in 0..=8 {
                let r = top * k as f64 / 8.0;
                let s = t.subtree_at_level(v, r)?;
                linear = linear.max((s.height + r - height).abs());
            }
            let r = t.height(v) * rng.random::<f64>();
            sublinear = sublinear.max(t.subtree_at_level(v, r)?.height + r - height);
        }
        Ok([scaling, aggregate, linear, sublinear])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let worst = |k: usize| per_tree.iter().map(|r| r[k]).fold(0.0, f64::max);
    Ok((
        vec![
            Check::band("scaling identity, max relative error", 0.0, worst(0), 1e-10),
            Check::band("z_total = sum mu(x) z_leaf(x), max relative error", 0.0, worst(1), 1e-10),
            Check::band("H_(r,x) + r = H below x ^ x*, max error", 0.0, worst(2), 1e-12),
            Check::below("H_(r,x) + r - H, max over samples", 1e-12, worst(3)),
        ],
        vec![note("trees", trees as f64)],
    ))
}

fn moments(config: &SuiteConfig, stream: &RngStream) -> Result<Outcome> {
    config.brownian_only()?;
    let reps = config.replicates(2000, 2)?;
    let m = config.size(1 << 14, 2)?;
    let alphas = [1.0, 4.0, 16.0];
    let rows = map_replicates(stream, reps, |_, rng| -> Result<Vec<f64>> {
        let t = sample_brownian_tree(m, rng)?;
        let mut row = vec![mean_mass_height(&t)];
        row.push(t.masses().iter().zip(t.heights()).map(|(w, h)| w * h * h).sum());
        for &alpha in &alphas {
            row.push(z_total(&t, &FunctionalParams::new(alpha, 0.0, 2.0)?));
        }
        Ok(row)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let column = |k: usize| mc_estimate(&rows.iter().map(|r| r[k]).collect::<Vec<_>>());
    let mut checks = Vec::new();
    let allowance = 0.02;
    let target = oracles::mean_z_alpha0(2.0, 0.0)?;
    checks.push(Check::mc("E[Z_(0,0)] = sqrt(pi)/2", target, &column(0)?, 3.0, allowance * target));
    let target = oracles::height_moment(2.0, -2.0)?;
    checks.push(Check::mc("E[int H^2 dmu] = 1", target, &column(1)?, 3.0, allowance * target));
    for (k, &alpha) in alphas.iter().enumerate() {
        let target = oracles::mean_z_alpha0(2.0, alpha)?;
        checks.push(Check::mc(
            format!("E[Z_(alpha,0)] = Beta closed form, alpha={alpha}"),
            target,
            &column(2 + k)?,
            3.0,
            allowance * target,
        ));
    }
    Ok((checks, vec![note("replicates", reps as f64), note("grid", m as f64)]))
}

fn subordinator_suite(config: &SuiteConfig, stream: &RngStream) -> Result<Outcome> {
    let paths = config.replicates(1_000_000, 2)?;
    let gamma = config.gammas(&[2.0])?[0];
    let (c, h) = (1.0, 1.0);
    let direct = map_replicates(&stream.fork(1), paths, |_, rng| -> Result<f64> {
        Ok((-sample_at(gamma, 1.0, rng)?).exp())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let integrals = map_replicates(&stream.fork(2), paths, |_, rng| {
        limit_integrals(gamma, &[(0.0, 1.0), (c, h)], DEFAULT_DELTA, DEFAULT_TOL, rng)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let plain: Vec<f64> = integrals.iter().map(|s| s[0].estimate).collect();
    let squares: Vec<f64> = plain.iter().map(|v| v * v).collect();
    let drifted: Vec<f64> = integrals.iter().map(|s| s[1].estimate).collect();
    let width = |k: usize| integrals.iter().map(|s| s[k].width()).sum::<f64>() / paths as f64;
    let phi1 = subordinator::laplace_exponent(gamma, 1.0);
    let phi2 = subordinator::laplace_exponent(gamma, 2.0);
    let checks = vec![
        Check::mc("E[exp(-S_1)] = exp(-gamma)", (-gamma).exp(), &mc_estimate(&direct)?, 3.0, 0.0),
        Check::mc("E[int exp(-S_t) dt] = 1/gamma", 1.0 / gamma, &mc_estimate(&plain)?, 3.0, width(0)),
        Check::mc(
            "E[(int exp(-S_t) dt)^2] = 2/(phi(1) phi(2))",
            2.0 / (phi1 * phi2),
            &mc_estimate(&squares)?,
            3.0,
            0.0,
        ),
        Check::mc(
            "E[int exp(-S_t - ct/H) dt] = 1/(gamma + c/H), c=H=1",
            1.0 / (gamma + c / h),
            &mc_estimate(&drifted)?,
            3.0,
            width(1),
        ),
    ];
    Ok((checks, vec![note("paths", paths as f64), note("mean bracket width", width(0))]))
}

const CALIBRATION_REPLICATES: usize = 500;
const CALIBRATION_MAX_N: usize = 100_000;

fn calibrated_model(law: OffspringLaw, n: usize, stream: &RngStream) -> Result<(TreeModel, f64)> {
    let cal = calibrate_kappa(&law, law.gamma(), n.min(CALIBRATION_MAX_N), CALIBRATION_REPLICATES, stream)?;
    Ok((TreeModel::Bgw { law, n, kappa: cal.kappa }, cal.kappa))
}

fn reference_limit(gamma: f64, size: usize, stream: &RngStream) -> Result<Vec<f64>> {
    map_replicates(stream, size, |_, rng| {
        Ok(limit_integrals(gamma, &[(0.0, 1.0)], DEFAULT_DELTA, DEFAULT_TOL, rng)?[0].estimate)
    })
    .into_iter()
    .collect()
}

fn subcritical(config: &SuiteConfig, stream: &RngStream) -> Result<Outcome> {
    let reps = config.replicates(2000, 50)?;
    let n = config.size(100_000, 2)?;
    let gamma = config.gammas(&[2.0])?[0];
    let alphas = [4.0, 16.0, 64.0];
    let (model, kappa) = calibrated_model(OffspringLaw::default_for(gamma)?, n, &stream.fork(1))?;
    let rows = map_replicates(&stream.fork(2), reps, |_, rng| -> Result<Vec<f64>> {
        let t = model.sample(rng)?;
        alphas
            .iter()
            .map(|&alpha| {
                let p = FunctionalParams::new(alpha, 0.0, gamma)?;
                Ok(p.subcritical_factor() * z_total(&t, &p))
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let reference = reference_limit(gamma, 10 * reps, &stream.fork(3))?;
    let mut ks = Vec::new();
    for k in 0..alphas.len() {
        let sample: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        ks.push(ks_two_sample(&sample, &reference)?.statistic);
    }
    let labels: Vec<String> = alphas.iter().map(|a| format!("KS(alpha={a})")).collect();
    let mut checks = decreasing("subcritical KS", &labels, &ks);
    checks.push(Check::below(format!("KS at alpha={}", alphas[2]), 0.1, ks[2]));
    let mut notes = vec![note("kappa", kappa), note("replicates", reps as f64)];
    for (a, d) in alphas.iter().zip(&ks) {
        notes.push(note(format!("KS alpha={a}"), *d));
    }
    Ok((checks, notes))
}

fn supercritical(config: &SuiteConfig, stream: &RngStream) -> Result<Outcome> {
    let reps = config.replicates(500, 2)?;
    let betas = [10.0, 20.0, 40.0];
    let mut checks = Vec::new();
    let mut notes = vec![note("replicates", reps as f64)];
    for (j, gamma) in config.gammas(&[1.5, 2.0])?.into_iter().enumerate() {
        let law = OffspringLaw::default_for(gamma)?;
        // comparable height resolution n^(1-1/gamma) across gamma
        let n = config.size(if gamma < 2.0 { 1_000_000 } else { 100_000 }, 2)?;
        notes.push(note(format!("gamma={gamma} n"), n as f64));
        let rows = map_replicates(&stream.fork(j as u64), reps, |_, rng| -> Result<Vec<f64>> {
            let t = scale_to_unit(&sample_bgw_conditioned(&law, n, rng)?, gamma, 1.0)?;
            let h = t.total_height();
            betas
                .iter()
                .map(|&beta| {
                    let p = FunctionalParams::new(0.0, beta, gamma)?;
                    let r = crate::functionals::normalized_values(&t, &p, t.argmax_vertex())?;
                    Ok((r.normalized_supercritical / h - 1.0).abs())
                })
                .collect()
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let means: Vec<f64> = (0..betas.len())
            .map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / reps as f64)
            .collect();
        let labels: Vec<String> = betas.iter().map(|b| format!("beta={b}")).collect();
        checks.extend(decreasing(&format!("gamma={gamma} mean deviation"), &labels, &means));
        checks.push(Check::below(format!("gamma={gamma} mean deviation at beta=40"), 0.1, means[2]));
        for (b, m) in betas.iter().zip(&means) {
            notes.push(note(format!("gamma={gamma} beta={b} mean deviation"), *m));
        }
    }
    Ok((checks, notes))
}

fn zoom(config: &SuiteConfig, stream: &RngStream) -> Result<Outcome> {
    config.brownian_only()?;
    let reps = config.replicates(2000, 100)?;
    let n = config.size(1_000_000, 2)?;
    let (model, kappa) = calibrated_model(OffspringLaw::geometric_half(), n, &stream.fork(1))?;
    let zoom_config = ZoomConfig {
        t: 1.0,
        epsilons: vec![0.1, 0.03, 0.01],
        speed: ZoomSpeed::default(),
        replicates: reps,
        reference_size: 10 * reps,
    };
    let results = zoom_marginal_test(&model, &zoom_config, &stream.fork(2))?;
    let labels: Vec<String> = results.iter().map(|r| format!("eps={}", r.epsilon)).collect();
    let ks: Vec<f64> = results.iter().map(|r| r.ks_stat).collect();
    let corr: Vec<f64> = results.iter().map(|r| r.correlation.abs()).collect();
    let mut checks = decreasing("KS(S^eps_1, S_1)", &labels, &ks);
    checks.extend(decreasing("|corr(S^eps_1, H(U))|", &labels, &corr));
    let mut notes = vec![note("kappa", kappa), note("n", n as f64)];
    for r in &results {
        notes.push(note(format!("eps={} KS", r.epsilon), r.ks_stat));
        notes.push(note(format!("eps={} p-value", r.epsilon), r.p_value));
        notes.push(note(format!("eps={} rank correlation", r.epsilon), r.correlation));
    }
    Ok((checks, notes))
}

/// Total variation between the empirical law of plane-tree shapes on `n`
/// vertices and the exact law `prod_v P(xi = deg v)`, normalized.
fn shape_tv(law: &OffspringLaw, n: usize, samples: usize, stream: &RngStream) -> Result<f64> {
    use std::collections::HashMap;
    let mut freq: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut rng = stream.rng();
    for _ in 0..samples {
        let mut d = conditioned_offspring(law, n, &mut rng)?;
        cycle_lemma_rotate(&mut d);
        *freq.entry(d).or_insert(0.0) += 1.0 / samples as f64;
    }
    // every sequence of n values summing to n - 1 with a positive walk is a shape
    let mut exact: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut seq = vec![0usize; n];
    fn fill(law: &OffspringLaw, seq: &mut Vec<usize>, i: usize, left: usize, out: &mut HashMap<Vec<usize>, f64>) {
        if i == seq.len() {
            if left == 0 {
                let mut s = 0i64;
                let ok = seq.iter().enumerate().all(|(j, &d)| {
                    s += d as i64 - 1;
                    j + 1 == seq.len() || s >= 0
                });
                if ok {
                    out.insert(seq.clone(), seq.iter().map(|&d| law.pmf(d)).product());
                }
            }
            return;
        }
        for d in 0..=left {
            seq[i] = d;
            fill(law, seq, i + 1, left - d, out);
        }
    }
    fill(law, &mut seq, 0, n - 1, &mut exact);
    let z: f64 = exact.values().sum();
    let mut tv: f64 = exact
        .iter()
        .map(|(s, w)| (w / z - freq.get(s).copied().unwrap_or(0.0)).abs())
        .sum();
    tv += freq.iter().filter(|(s, _)| !exact.contains_key(*s)).map(|(_, f)| f).sum::<f64>();
    Ok(tv / 2.0)
}

fn sampler(config: &SuiteConfig, stream: &RngStream) -> Result<Outcome> {
    let reps = config.replicates(2000, 2)?;
    let n = config.size(1 << 16, 2)?;
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let laws = [OffspringLaw::geometric_half(), OffspringLaw::zipf(1.5)?];
    for (i, law) in laws.iter().enumerate() {
        for size in [3usize, 4] {
            let tv = shape_tv(law, size, 100_000, &stream.fork(10 + 2 * i as u64 + size as u64))?;
            checks.push(Check::below(format!("shape TV, {} law, n={size}", law.name()), 0.01, tv));
        }
    }

    // the geometric law has variance 2, so its distance scale is known exactly
    let law = OffspringLaw::geometric_half();
    let kappa = law.brownian_kappa().expect("finite variance");
    let per_tree = |bgw: bool, s: &RngStream| -> Result<Vec<[f64; 2]>> {
        map_replicates(s, reps, |_, rng| -> Result<[f64; 2]> {
            let t = if bgw {
                scale_to_unit(&sample_bgw_conditioned(&law, n, rng)?, 2.0, kappa)?
            } else {
                sample_brownian_tree(n, rng)?
            };
            let u = sample_mass_vertex(&t, rng)?;
            Ok([t.height(u), mean_mass_height(&t)])
        })
        .into_iter()
        .collect()
    };
    let bgw = per_tree(true, &stream.fork(1))?;
    let brownian = per_tree(false, &stream.fork(2))?;
    for (k, what) in ["E[H(U)]", "E[Z_(0,0)]"].iter().enumerate() {
        let a = mc_estimate(&bgw.iter().map(|r| r[k]).collect::<Vec<_>>())?;
        let b = mc_estimate(&brownian.iter().map(|r| r[k]).collect::<Vec<_>>())?;
        checks.push(Check::below(format!("{what}: BGW vs Brownian, z-score"), 3.0, z_difference(&a, &b)));
        notes.push(note(format!("{what} BGW"), a.mean));
        notes.push(note(format!("{what} Brownian"), b.mean));
    }

    let zipf = OffspringLaw::zipf(1.5)?;
    let (cal_n, cal_reps) = (4000, 10_000);
    let cal = calibrate_kappa(&zipf, 1.5, cal_n, cal_reps, &stream.fork(3))?;
    let fresh = map_replicates(&stream.fork(4), cal_reps, |_, rng| -> Result<f64> {
        Ok(mean_mass_height(&scale_to_unit(&sample_bgw_conditioned(&zipf, cal_n, rng)?, 1.5, cal.kappa)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let est = mc_estimate(&fresh)?;
    checks.push(Check::band(
        "calibrated E[H(U)], gamma=1.5, relative error",
        0.0,
        rel_err(est.mean, cal.target),
        0.02,
    ));
    notes.push(note("kappa gamma=1.5", cal.kappa));
    Ok((checks, notes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_and_bad_budgets() {
        let c = SuiteConfig::default();
        assert!(matches!(run_suite("nope", &c), Err(Error::Config(_))));
        let zero = SuiteConfig { replicates: Some(0), ..SuiteConfig::default() };
        assert!(matches!(run_suite("moments", &zero), Err(Error::Config(_))));
        let odd = SuiteConfig { gamma: Some(1.5), ..SuiteConfig::default() };
        assert!(matches!(run_suite("moments", &odd), Err(Error::Config(_))));
    }

    #[test]
    fn identities_pass_without_budget() {
        let zero = SuiteConfig { replicates: Some(0), ..SuiteConfig::default() };
        let r = run_suite("identities", &zero).unwrap();
        assert!(r.pass, "{r}");
        assert_eq!(r.checks.len(), 4 * 13);
    }

    #[test]
    fn reports_are_deterministic() {
        let c = SuiteConfig { replicates: Some(20), n: Some(200), ..SuiteConfig::default() };
        let a = run_suite("functionals", &c).unwrap();
        let b = run_suite("functionals", &c).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.pass, "{a}");
    }

    #[test]
    fn small_budget_runs() {
        let c = SuiteConfig { replicates: Some(100), n: Some(2000), ..SuiteConfig::default() };
        for suite in ["moments", "subcritical", "supercritical", "zoom"] {
            let r = run_suite(suite, &c).unwrap();
            assert!(!r.checks.is_empty());
            assert!(r.checks.iter().all(|c| c.estimate.is_finite()), "{r}");
        }
        let r = run_suite("subordinator", &SuiteConfig { replicates: Some(2000), ..c.clone() }).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn ladder_checks() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let c = decreasing("x", &labels, &[3.0, 2.0, 2.0]);
        assert!(c[0].pass && !c[1].pass);
    }
}
