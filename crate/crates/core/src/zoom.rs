//! Zooming in at the root along the ancestral line of a vertex `U`.
//!
//! Subtrees grafted on the spine at height `h_i <= f(eps) H(U)` become atoms
//! `(h_i / eps, sigma_i eps^{-gamma/(gamma-1)}, norm(T_i))`, and
//! `S^eps_t` adds up the rescaled masses of the atoms at rescaled height
//! `<= t`. As `eps -> 0`, `S^eps` converges to the subordinator with Laplace
//! exponent `gamma lambda^{1-1/gamma}`, independently of the tree and `H(U)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, ensure, Error, Result};
use crate::rng::{map_replicates, RngStream};
use crate::sampler::TreeModel;
use crate::stats::{ks_two_sample, rank_correlation};
use crate::subordinator::sample_at;
use crate::tree::WeightedTree;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ZoomSpeed {
    /// `f(eps) = eps`.
    Linear,
    /// `f(eps) = eps^p` with `p` in `(1/2, 1)`.
    Intermediate { exponent: f64 },
}

impl Default for ZoomSpeed {
    fn default() -> Self {
        ZoomSpeed::Intermediate { exponent: 0.75 }
    }
}

impl ZoomSpeed {
    pub fn new_intermediate(exponent: f64) -> Result<Self> {
        ensure(exponent > 0.5 && exponent < 1.0, || {
            Error::Domain(format!("speed exponent must lie in (1/2, 1), got {exponent}"))
        })?;
        Ok(ZoomSpeed::Intermediate { exponent })
    }

    pub fn apply(&self, eps: f64) -> f64 {
        match *self {
            ZoomSpeed::Linear => eps,
            ZoomSpeed::Intermediate { exponent } => eps.powf(exponent),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZoomAtom {
    /// `h_i / eps`.
    pub height: f64,
    /// `sigma_i eps^{-gamma/(gamma-1)}`.
    pub mass: f64,
    /// Height of the grafted part after normalization to unit mass.
    pub normalized_height: f64,
    pub vertices: usize,
    pub spine_vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoomMeasure {
    pub epsilon: f64,
    pub speed: ZoomSpeed,
    pub gamma: f64,
    pub leaf: usize,
    pub leaf_height: f64,
    /// Sorted by height.
    pub atoms: Vec<ZoomAtom>,
}

fn check_inputs(tree: &WeightedTree, leaf: usize, eps: f64, gamma: f64) -> Result<()> {
    check_gamma(gamma)?;
    ensure(eps > 0.0 && eps.is_finite(), || {
        Error::Domain(format!("epsilon must be > 0, got {eps}"))
    })?;
    ensure(leaf < tree.len(), || Error::Domain(format!("vertex {leaf} out of range")))?;
    ensure(tree.height(leaf) > 0.0, || {
        Error::Degenerate(format!("vertex {leaf} is at height 0"))
    })
}

fn mass_exponent(gamma: f64) -> f64 {
    gamma / (gamma - 1.0)
}

fn count_below(tree: &WeightedTree, roots: &[usize]) -> usize {
    let mut stack = roots.to_vec();
    let mut count = 0;
    while let Some(v) = stack.pop() {
        count += 1;
        stack.extend_from_slice(tree.children(v));
    }
    count
}

pub fn zoom_measure(
    tree: &WeightedTree,
    leaf: usize,
    eps: f64,
    speed: ZoomSpeed,
    gamma: f64,
) -> Result<ZoomMeasure> {
    check_inputs(tree, leaf, eps, gamma)?;
    let leaf_height = tree.height(leaf);
    let cutoff = speed.apply(eps) * leaf_height;
    let spine = tree.spine_path(leaf)?;
    let mass_scale = eps.powf(-mass_exponent(gamma));
    let mut atoms = Vec::new();
    for (i, &u) in spine.iter().enumerate() {
        let h = tree.height(u);
        if h > cutoff {
            break;
        }
        let next = spine.get(i + 1).copied();
        let roots: Vec<usize> = tree.children(u).iter().copied().filter(|&c| Some(c) != next).collect();
        if roots.is_empty() {
            continue;
        }
        let sigma: f64 = roots.iter().map(|&c| tree.subtree_mass(c)).sum();
        let top = roots.iter().map(|&c| tree.subtree_max_height(c)).fold(h, f64::max);
        let normalized_height = if sigma > 0.0 {
            (top - h) * sigma.powf(-1.0 + 1.0 / gamma)
        } else {
            f64::INFINITY
        };
        atoms.push(ZoomAtom {
            height: h / eps,
            mass: sigma * mass_scale,
            normalized_height,
            vertices: count_below(tree, &roots),
            spine_vertex: u,
        });
    }
    Ok(ZoomMeasure { epsilon: eps, speed, gamma, leaf, leaf_height, atoms })
}

/// Nondecreasing right-continuous step function, 0 before its first jump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepPath {
    pub times: Vec<f64>,
    /// Value from `times[i]` until the next jump.
    pub values: Vec<f64>,
}

impl StepPath {
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// `S^eps_t = sum of rescaled graft masses at rescaled height <= t`, for
/// grafts below the cutoff `f(eps) H(U)`.
pub fn s_epsilon(
    tree: &WeightedTree,
    leaf: usize,
    eps: f64,
    speed: ZoomSpeed,
    gamma: f64,
) -> Result<StepPath> {
    check_inputs(tree, leaf, eps, gamma)?;
    let cutoff = speed.apply(eps) * tree.height(leaf);
    let mass_scale = eps.powf(-mass_exponent(gamma));
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut total = 0.0;
    for g in tree.graft_summaries(leaf)? {
        if g.height > cutoff {
            break;
        }
        total += g.sigma * mass_scale;
        let t = g.height / eps;
        match times.last() {
            Some(&last) if last == t => *values.last_mut().expect("paired") = total,
            _ => {
                times.push(t);
                values.push(total);
            }
        }
    }
    Ok(StepPath { times, values })
}

/// Vertex drawn from the normalized vertex-mass measure.
pub fn sample_mass_vertex<R: Rng + ?Sized>(tree: &WeightedTree, rng: &mut R) -> Result<usize> {
    let total = tree.total_mass();
    ensure(total > 0.0, || Error::Degenerate("tree has zero mass".into()))?;
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (v, &m) in tree.masses().iter().enumerate() {
        acc += m;
        if u < acc {
            return Ok(v);
        }
    }
    Ok(tree.masses().iter().rposition(|&m| m > 0.0).expect("positive total mass"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoomConfig {
    pub t: f64,
    pub epsilons: Vec<f64>,
    pub speed: ZoomSpeed,
    pub replicates: usize,
    pub reference_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZoomKs {
    pub epsilon: f64,
    pub t: f64,
    pub ks_stat: f64,
    pub p_value: f64,
    /// Spearman correlation between `S^eps_t` and `H(U)`.
    pub correlation: f64,
    pub replicates: usize,
}

/// Per replicate: one tree, one mass-distributed `U` with `H(U) > 0`, and
/// `S^eps_t` for every `eps`; the same trees serve all `eps`.
pub fn zoom_samples(
    model: &TreeModel,
    config: &ZoomConfig,
    stream: &RngStream,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let gamma = model.gamma();
    map_replicates(stream, config.replicates, |_, rng| -> Result<(f64, Vec<f64>)> {
        let tree = model.sample(rng)?;
        ensure(tree.total_height() > 0.0, || Error::Degenerate("sampled tree has height 0".into()))?;
        let leaf = loop {
            let v = sample_mass_vertex(&tree, rng)?;
            if tree.height(v) > 0.0 {
                break v;
            }
        };
        let values = config
            .epsilons
            .iter()
            .map(|&eps| Ok(s_epsilon(&tree, leaf, eps, config.speed, gamma)?.value_at(config.t)))
            .collect::<Result<Vec<_>>>()?;
        Ok((tree.height(leaf), values))
    })
    .into_iter()
    .collect()
}

/// Two-sample KS comparison of `S^eps_t` against draws of the limiting
/// subordinator at time `t`, for each `eps`.
pub fn zoom_marginal_test(
    model: &TreeModel,
    config: &ZoomConfig,
    stream: &RngStream,
) -> Result<Vec<ZoomKs>> {
    ensure(config.replicates >= 100, || {
        Error::Config(format!("zoom test needs at least 100 replicates, got {}", config.replicates))
    })?;
    ensure(config.reference_size >= 100, || {
        Error::Config("reference sample needs at least 100 draws".into())
    })?;
    ensure(config.t > 0.0, || Error::Config("t must be > 0".into()))?;
    ensure(config.epsilons.windows(2).all(|w| w[1] < w[0]), || {
        Error::Config("epsilon ladder must be decreasing".into())
    })?;
    let gamma = model.gamma();
    let samples = zoom_samples(model, config, &stream.fork(1))?;
    let mut rng = stream.fork(2).rng();
    let reference = (0..config.reference_size)
        .map(|_| sample_at(gamma, config.t, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let heights: Vec<f64> = samples.iter().map(|s| s.0).collect();
    config
        .epsilons
        .iter()
        .enumerate()
        .map(|(j, &eps)| {
            let values: Vec<f64> = samples.iter().map(|s| s.1[j]).collect();
            let ks = ks_two_sample(&values, &reference)?;
            Ok(ZoomKs {
                epsilon: eps,
                t: config.t,
                ks_stat: ks.statistic,
                p_value: ks.p_value,
                correlation: rank_correlation(&values, &heights)?,
                replicates: config.replicates,
            })
        })
        .collect()
}
