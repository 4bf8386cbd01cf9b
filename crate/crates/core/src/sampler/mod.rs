//! Discrete approximations of the normalized stable tree.

mod bgw;
mod brownian;
mod offspring;
mod stable;

use rand::Rng;
use serde::Serialize;

pub use bgw::{conditioned_offspring, cycle_lemma_rotate, parents_from_degrees, sample_bgw_conditioned};
pub use brownian::{sample_brownian_tree, sample_excursion, tree_from_heights};
pub use offspring::OffspringLaw;
pub use stable::{sample_positive_stable, PositiveStable};

use crate::error::{check_gamma, ensure, Error, Result};
use crate::oracles;
use crate::rng::{map_replicates, RngStream};
use crate::stats::{mc_estimate, McEstimate};
use crate::tree::WeightedTree;

/// Multiply the edges of an `n`-vertex unit-edge tree by
/// `kappa * n^{-(1 - 1/gamma)}`.
pub fn scale_to_unit(tree: &WeightedTree, gamma: f64, kappa: f64) -> Result<WeightedTree> {
    Ok(tree.clone().into_dilated(unit_scale(tree.len(), gamma, kappa)?, 1.0))
}

fn unit_scale(n: usize, gamma: f64, kappa: f64) -> Result<f64> {
    check_gamma(gamma)?;
    ensure(kappa > 0.0 && kappa.is_finite(), || {
        Error::Domain(format!("kappa must be positive, got {kappa}"))
    })?;
    Ok(kappa * (n as f64).powf(-(1.0 - 1.0 / gamma)))
}

/// Consuming form of [`scale_to_unit`].
pub fn into_unit_scale(tree: WeightedTree, gamma: f64, kappa: f64) -> Result<WeightedTree> {
    let a = unit_scale(tree.len(), gamma, kappa)?;
    Ok(tree.into_dilated(a, 1.0))
}

/// `sum_v mu(v) H(v)`: the mean height of a mass-distributed vertex.
pub fn mean_mass_height(tree: &WeightedTree) -> f64 {
    tree.masses().iter().zip(tree.heights()).map(|(m, h)| m * h).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub kappa: f64,
    /// Delta-method standard error of `kappa`.
    pub kappa_stderr: f64,
    pub target: f64,
    /// Mean height of a mass-distributed vertex at `kappa = 1`.
    pub estimate: McEstimate,
}

/// Distance scale for `scale_to_unit` making the mean height of a
/// mass-distributed vertex agree with its value under the normalized
/// stable tree.
pub fn calibrate_kappa(
    law: &OffspringLaw,
    gamma: f64,
    n: usize,
    replicates: usize,
    stream: &RngStream,
) -> Result<Calibration> {
    check_gamma(gamma)?;
    ensure(replicates >= 2, || Error::Config("calibration needs at least 2 replicates".into()))?;
    let heights = map_replicates(stream, replicates, |_, rng| -> Result<f64> {
        let t = sample_bgw_conditioned(law, n, rng)?;
        Ok(mean_mass_height(&t) * unit_scale(n, gamma, 1.0)?)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let estimate = mc_estimate(&heights)?;
    ensure(estimate.mean > 0.0, || {
        Error::Calibration(format!("degenerate height estimate {}", estimate.mean))
    })?;
    let target = oracles::height_moment(gamma, -1.0)?;
    let kappa = target / estimate.mean;
    Ok(Calibration {
        kappa,
        kappa_stderr: kappa * estimate.stderr / estimate.mean,
        target,
        estimate,
    })
}

/// Random recursive tree with `n` vertices, edge lengths uniform on
/// `(0.05, 1)` and masses uniform on `(0, 1)`, about a third of them zero.
/// Useful as generic input for exact identities.
pub fn random_weighted_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> WeightedTree {
    let n = n.max(1);
    let mut parents = vec![None; n];
    let mut lens = vec![0.0; n];
    let mut masses = vec![0.0; n];
    for v in 0..n {
        if v > 0 {
            parents[v] = Some(rng.random_range(0..v));
            lens[v] = rng.random_range(0.05..1.0);
        }
        if rng.random_bool(2.0 / 3.0) {
            masses[v] = rng.random::<f64>();
        }
    }
    WeightedTree::build(parents, lens, masses).expect("recursive tree is valid")
}

/// Which discrete model to draw normalized trees from.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeModel {
    /// Conditioned BGW tree with `n` vertices, edges scaled by `kappa`.
    Bgw { law: OffspringLaw, n: usize, kappa: f64 },
    /// Brownian-excursion coding on an `m`-point grid (`gamma = 2` only).
    Brownian { m: usize },
}

impl TreeModel {
    pub fn gamma(&self) -> f64 {
        match self {
            TreeModel::Bgw { law, .. } => law.gamma(),
            TreeModel::Brownian { .. } => 2.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WeightedTree> {
        match self {
            TreeModel::Bgw { law, n, kappa } => {
                into_unit_scale(sample_bgw_conditioned(law, *n, rng)?, law.gamma(), *kappa)
            }
            TreeModel::Brownian { m } => sample_brownian_tree(*m, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::fixtures;

    #[test]
    fn scale_examples() {
        let law = OffspringLaw::geometric_half();
        let mut rng = RngStream::new(0, 0).rng();
        let t = sample_bgw_conditioned(&law, 10_000, &mut rng).unwrap();
        let s = scale_to_unit(&t, 2.0, 1.0).unwrap();
        assert!(s.edge_lens().iter().skip(1).all(|&e| (e - 0.01).abs() < 1e-15));
        let one = WeightedTree::build(vec![None], vec![0.0], vec![1.0]).unwrap();
        assert_eq!(scale_to_unit(&one, 1.5, 2.0).unwrap().total_height(), 0.0);
        assert!(matches!(scale_to_unit(&t, 2.0, 0.0), Err(Error::Domain(_))));
        let c = fixtures::cherry();
        let a = mean_mass_height(&scale_to_unit(&c, 2.0, 1.0).unwrap());
        let b = mean_mass_height(&scale_to_unit(&c, 2.0, 2.0).unwrap());
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn brownian_mean_height() {
        let heights = map_replicates(&RngStream::new(31, 0), 2000, |_, rng| {
            mean_mass_height(&sample_brownian_tree(1 << 14, rng).unwrap())
        });
        let est = mc_estimate(&heights).unwrap();
        let target = std::f64::consts::PI.sqrt() / 2.0;
        assert!(
            (est.mean - target).abs() < 3.0 * est.stderr,
            "{} vs {target} (se {})",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn geometric_calibration_is_near_one() {
        let law = OffspringLaw::geometric_half();
        let cal = calibrate_kappa(&law, 2.0, 10_000, 500, &RngStream::new(41, 0)).unwrap();
        assert!((cal.target - 0.886_226_925_452_758).abs() < 1e-12);
        assert!((cal.kappa - 1.0).abs() < 3.0 * cal.kappa_stderr + 0.02, "{cal:?}");
    }
}
