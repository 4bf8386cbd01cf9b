//! wasm-bindgen wrappers used by `www/index.html`. Every entry point returns a
//! JSON string; errors come back as `{"error": "..."}`.

use serde::Serialize;
use stable_trees::functionals::{z_total, FunctionalParams};
use stable_trees::sampler::{into_unit_scale, sample_bgw_conditioned, sample_brownian_tree, OffspringLaw};
use stable_trees::subordinator::{limit_integral, sample_path};
use stable_trees::{Result, RngStream, WeightedTree};
use wasm_bindgen::prelude::*;

const MAX_VERTICES: usize = 200_000;

fn respond<T: Serialize>(r: Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e.to_string()),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

fn clamp_size(n: u32) -> usize {
    (n as usize).clamp(2, MAX_VERTICES)
}

/// Brownian excursion tree at `gamma = 2`, conditioned BGW with the default
/// law otherwise (distance scale 1 when the variance is infinite).
fn sample(gamma: f64, n: usize, seed: u64) -> Result<WeightedTree> {
    let mut rng = RngStream::new(seed, 0).rng();
    if gamma == 2.0 {
        return sample_brownian_tree(n, &mut rng);
    }
    let law = OffspringLaw::default_for(gamma)?;
    let kappa = law.brownian_kappa().unwrap_or(1.0);
    into_unit_scale(sample_bgw_conditioned(&law, n, &mut rng)?, gamma, kappa)
}

#[derive(Serialize)]
struct Layout {
    x: Vec<f64>,
    y: Vec<f64>,
    parent: Vec<i64>,
    height: f64,
    argmax: usize,
}

/// Each vertex gets the middle of its subtree's mass interval as `x`, so wide
/// regions of the picture carry most of the mass.
fn layout(tree: &WeightedTree) -> Layout {
    let n = tree.len();
    let mut lo = vec![0.0; n];
    let mut x = vec![0.0; n];
    for &v in tree.topological_order() {
        let mut cursor = lo[v] + tree.vertex_mass(v) / 2.0;
        for &c in tree.children(v) {
            lo[c] = cursor;
            cursor += tree.subtree_mass(c);
        }
        x[v] = lo[v] + tree.subtree_mass(v) / 2.0;
    }
    Layout {
        x,
        y: tree.heights().to_vec(),
        parent: tree.parents().iter().map(|p| p.map_or(-1, |p| p as i64)).collect(),
        height: tree.total_height(),
        argmax: tree.argmax_vertex(),
    }
}

#[wasm_bindgen]
pub fn tree_layout(gamma: f64, n: u32, seed: u64) -> String {
    respond(sample(gamma, clamp_size(n), seed).map(|t| layout(&t)))
}

#[derive(Serialize)]
struct Profile {
    alpha: Vec<f64>,
    value: Vec<f64>,
    limit_mean: f64,
}

/// `alpha^{1-1/gamma} Z_(alpha,0)` on a log grid for one tree; it approaches a
/// draw of `int exp(-S_t) dt`, whose mean is `1/gamma`.
#[wasm_bindgen]
pub fn z_profile(gamma: f64, n: u32, seed: u64, points: u32) -> String {
    let run = || -> Result<Profile> {
        let t = sample(gamma, clamp_size(n), seed)?;
        let k = points.clamp(2, 400) as usize;
        let alpha: Vec<f64> = (0..k).map(|i| 10f64.powf(-1.0 + 3.5 * i as f64 / (k - 1) as f64)).collect();
        let value = alpha
            .iter()
            .map(|&a| {
                let p = FunctionalParams::new(a, 0.0, gamma)?;
                Ok(p.subcritical_factor() * z_total(&t, &p))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Profile { alpha, value, limit_mean: 1.0 / gamma })
    };
    respond(run())
}

#[derive(Serialize)]
struct Path {
    t: Vec<f64>,
    s: Vec<f64>,
    integral: f64,
}

/// One subordinator path, thinned to at most `points` samples for drawing,
/// with the exponential functional of an independent path of the same law.
#[wasm_bindgen]
pub fn subordinator_path(gamma: f64, delta: f64, seed: u64, points: u32) -> String {
    let run = || -> Result<Path> {
        let mut rng = RngStream::new(seed, 0).rng();
        let path = sample_path(gamma, delta, 1e-4, &mut rng)?;
        let stride = (path.values.len() / points.max(2) as usize).max(1);
        let (t, s) = path
            .values
            .iter()
            .enumerate()
            .step_by(stride)
            .map(|(i, &v)| (i as f64 * delta, v))
            .unzip();
        let integral = limit_integral(gamma, 0.0, 1.0, delta, 1e-6, &mut rng)?.estimate;
        Ok(Path { t, s, integral })
    };
    respond(run())
}
