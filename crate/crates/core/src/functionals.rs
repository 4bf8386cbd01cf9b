//! The additive functionals
//! `Z_{alpha,beta}(x) = int_0^{H(x)} sigma_{r,x}^alpha H_{r,x}^beta dr` and
//! `Z_{alpha,beta} = int Z_{alpha,beta}(x) mu(dx)`.
//!
//! Along an edge `u -> v` of the ancestral line of `x`, `sigma_{r,x}` is the
//! subtree mass of `v` and `H_{r,x} = M(v) - r` with `M(v)` the maximal
//! height above `v`, so each edge contributes
//! `sigma^alpha [(M - H(u))^{beta+1} - (M - H(v))^{beta+1}] / (beta + 1)`.
//! Heights are divided by the total height before exponentiation, which
//! keeps every power in `[0, 1]` for large `beta`.

use serde::Serialize;

use crate::error::{check_gamma, ensure, Error, Result};
use crate::tree::WeightedTree;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Limit of `beta / alpha^{1 - 1/gamma}` in the subcritical regime.
    pub c: f64,
}

impl FunctionalParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::with_c(alpha, beta, gamma, 0.0)
    }

    pub fn with_c(alpha: f64, beta: f64, gamma: f64, c: f64) -> Result<Self> {
        check_gamma(gamma)?;
        for (name, v) in [("alpha", alpha), ("beta", beta), ("c", c)] {
            ensure(v >= 0.0 && v.is_finite(), || {
                Error::Domain(format!("{name} must be finite and >= 0, got {v}"))
            })?;
        }
        Ok(Self { alpha, beta, gamma, c })
    }

    /// Parameters on the curve `beta = c alpha^{1 - 1/gamma}`.
    pub fn on_curve(alpha: f64, c: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Self::with_c(alpha, c * alpha.powf(1.0 - 1.0 / gamma), gamma, c)
    }

    /// `alpha^{1 - 1/gamma}`, taken to be 1 at `alpha = 0`.
    pub fn subcritical_factor(&self) -> f64 {
        if self.alpha == 0.0 {
            1.0
        } else {
            self.alpha.powf(1.0 - 1.0 / self.gamma)
        }
    }

    /// Exponent of `a` in `Z(x)` under distances `* a` and masses
    /// `* a^{gamma/(gamma-1)}`.
    pub fn leaf_scaling_exponent(&self) -> f64 {
        self.alpha * self.gamma / (self.gamma - 1.0) + self.beta + 1.0
    }

    /// Same for the mass-integrated functional, which also picks up the
    /// scaling of `mu`.
    pub fn total_scaling_exponent(&self) -> f64 {
        (self.alpha + 1.0) * self.gamma / (self.gamma - 1.0) + self.beta + 1.0
    }
}

/// `(u_lo^p - u_hi^p) / p` for `u_lo >= u_hi >= 0`, accurate when the two are close.
fn power_gap(u_lo: f64, u_hi: f64, p: f64) -> f64 {
    if u_lo <= 0.0 {
        return 0.0;
    }
    let top = u_lo.powf(p);
    if u_hi <= 0.0 {
        return top / p;
    }
    top * -(p * (u_hi / u_lo).ln()).exp_m1() / p
}

/// `Z(x) / H^{beta+1}`.
fn reduced_leaf(tree: &WeightedTree, x: usize, alpha: f64, beta: f64) -> Result<f64> {
    let height = tree.total_height();
    let path = tree.spine_path(x)?;
    if height == 0.0 {
        return Ok(0.0);
    }
    let p = beta + 1.0;
    Ok(path
        .windows(2)
        .map(|w| {
            let (u, v) = (w[0], w[1]);
            let m = tree.subtree_max_height(v);
            let gap = power_gap((m - tree.height(u)) / height, (m - tree.height(v)) / height, p);
            tree.subtree_mass(v).powf(alpha) * gap
        })
        .sum())
}

/// `Z / H^{beta+1}`.
fn reduced_total(tree: &WeightedTree, alpha: f64, beta: f64) -> f64 {
    let height = tree.total_height();
    if height == 0.0 {
        return 0.0;
    }
    let p = beta + 1.0;
    let mut sum = 0.0;
    for v in 0..tree.len() {
        let Some(u) = tree.parent(v) else { continue };
        let sigma = tree.subtree_mass(v);
        if sigma == 0.0 {
            continue;
        }
        let m = tree.subtree_max_height(v);
        let gap = power_gap((m - tree.height(u)) / height, (m - tree.height(v)) / height, p);
        sum += sigma.powf(alpha + 1.0) * gap;
    }
    sum
}

/// `Z_{alpha,beta}(x)`.
pub fn z_leaf(tree: &WeightedTree, x: usize, params: &FunctionalParams) -> Result<f64> {
    let r = reduced_leaf(tree, x, params.alpha, params.beta)?;
    Ok(r * tree.total_height().powf(params.beta + 1.0))
}

/// `Z_{alpha,beta} = sum_x mu(x) Z_{alpha,beta}(x)`, in one pass over the edges.
pub fn z_total(tree: &WeightedTree, params: &FunctionalParams) -> f64 {
    reduced_total(tree, params.alpha, params.beta) * tree.total_height().powf(params.beta + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalResult {
    pub params: FunctionalParams,
    pub z_total: f64,
    pub z_leaf: f64,
    pub leaf: usize,
    pub height: f64,
    /// `alpha^{1-1/gamma} H^{-beta} Z`.
    pub normalized_subcritical: f64,
    /// `beta H^{-beta} Z`.
    pub normalized_supercritical: f64,
    pub leaf_normalized_subcritical: f64,
    pub leaf_normalized_supercritical: f64,
}

pub fn normalized_values(
    tree: &WeightedTree,
    params: &FunctionalParams,
    leaf: usize,
) -> Result<FunctionalResult> {
    let height = tree.total_height();
    ensure(height > 0.0 || params.beta == 0.0, || {
        Error::Degenerate("tree of height 0 with beta > 0".into())
    })?;
    let total = reduced_total(tree, params.alpha, params.beta);
    let at_leaf = reduced_leaf(tree, leaf, params.alpha, params.beta)?;
    let scale = height.powf(params.beta + 1.0);
    let sub = params.subcritical_factor() * height;
    let sup = params.beta * height;
    Ok(FunctionalResult {
        params: *params,
        z_total: total * scale,
        z_leaf: at_leaf * scale,
        leaf,
        height,
        normalized_subcritical: sub * total,
        normalized_supercritical: sup * total,
        leaf_normalized_subcritical: sub * at_leaf,
        leaf_normalized_supercritical: sup * at_leaf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::quadrature::integrate;
    use crate::rng::RngStream;
    use crate::sampler::random_weighted_tree;
    use crate::tree::fixtures::cherry;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(alpha: f64, beta: f64) -> FunctionalParams {
        FunctionalParams::new(alpha, beta, 2.0).unwrap()
    }

    fn single_edge(len: f64) -> WeightedTree {
        WeightedTree::build(vec![None, Some(0)], vec![0.0, len], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn single_edge_values() {
        let t = single_edge(2.5);
        assert_relative_eq!(z_leaf(&t, 1, &params(3.0, 0.0)).unwrap(), 2.5);
        assert_relative_eq!(z_total(&single_edge(1.0), &params(5.0, 0.0)), 1.0);
    }

    #[test]
    fn cherry_values() {
        let t = cherry();
        // leaf l1 is vertex 2 at height 3
        assert_relative_eq!(z_leaf(&t, 2, &params(1.0, 0.0)).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(z_leaf(&t, 2, &params(1.0, 1.0)).unwrap(), 3.5, epsilon = 1e-14);
        assert_relative_eq!(z_total(&t, &params(0.0, 0.0)), 2.5, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FunctionalParams::new(-1.0, 0.0, 2.0).is_err());
        assert!(FunctionalParams::new(0.0, f64::NAN, 2.0).is_err());
        assert!(FunctionalParams::new(0.0, 0.0, 2.5).is_err());
    }

    #[test]
    fn normalization_conventions() {
        let t = cherry();
        let r = normalized_values(&t, &params(0.0, 0.0), 2).unwrap();
        assert_eq!(r.normalized_subcritical, r.z_total);
        let p = FunctionalParams::new(4.0, 0.0, 2.0).unwrap();
        let r = normalized_values(&t, &p, 2).unwrap();
        assert_relative_eq!(r.normalized_subcritical, 2.0 * r.z_total, epsilon = 1e-14);
        let flat = WeightedTree::build(vec![None], vec![0.0], vec![1.0]).unwrap();
        assert!(matches!(normalized_values(&flat, &params(0.0, 1.0), 0), Err(Error::Degenerate(_))));
        assert_eq!(normalized_values(&flat, &params(1.0, 0.0), 0).unwrap().z_total, 0.0);
    }

    #[test]
    fn large_beta_is_finite_and_sane() {
        let mut rng = RngStream::new(4, 0).rng();
        let t = random_weighted_tree(300, &mut rng);
        let t = t.dilate(1.0, 1.0 / t.total_mass());
        for beta in [50.0, 100.0, 400.0] {
            let r = normalized_values(&t, &params(0.0, beta), t.argmax_vertex()).unwrap();
            assert!(r.normalized_supercritical.is_finite() && r.normalized_supercritical > 0.0);
            assert!(r.normalized_supercritical <= 2.0 * t.total_height());
        }
    }

    /// Piecewise adaptive quadrature of `r -> sigma_{r,x}^alpha H_{r,x}^beta`
    /// using only `subtree_at_level`.
    fn z_leaf_by_quadrature(t: &WeightedTree, x: usize, alpha: f64, beta: f64) -> f64 {
        let path = t.spine_path(x).unwrap();
        path.windows(2)
            .map(|w| {
                let (lo, hi) = (t.height(w[0]), t.height(w[1]));
                let f = |r: f64| {
                    let s = t.subtree_at_level(x, r).unwrap();
                    s.sigma.powf(alpha) * s.height.powf(beta)
                };
                integrate(f, lo, hi, 1e-13, 1e-13).unwrap().value
            })
            .sum()
    }

    #[test]
    fn matches_quadrature_on_random_trees() {
        let stream = RngStream::new(10, 0);
        for i in 0..100 {
            let mut rng = stream.replicate(i).rng();
            let t = random_weighted_tree(2 + (i as usize % 12), &mut rng);
            let x = (i as usize * 7) % t.len();
            for (alpha, beta) in [(0.0, 0.0), (1.0, 0.0), (0.5, 2.0), (3.0, 1.5)] {
                let exact = z_leaf(&t, x, &params(alpha, beta)).unwrap();
                let quad = z_leaf_by_quadrature(&t, x, alpha, beta);
                assert!((exact - quad).abs() < 1e-8, "tree {i} x={x}: {exact} vs {quad}");
            }
        }
    }

    proptest! {
        #[test]
        fn total_is_mass_weighted_leaf_sum(seed in any::<u64>(), n in 1usize..200, alpha in 0.0f64..5.0, beta in 0.0f64..5.0) {
            let t = random_weighted_tree(n, &mut RngStream::new(seed, 0).rng());
            let p = params(alpha, beta);
            let total = z_total(&t, &p);
            let sum: f64 = (0..t.len()).map(|x| t.vertex_mass(x) * z_leaf(&t, x, &p).unwrap()).sum();
            prop_assert!((total - sum).abs() <= 1e-10 * total.abs().max(1e-300) + 1e-300, "{} vs {}", total, sum);
        }

        #[test]
        fn scaling_identity(seed in any::<u64>(), n in 2usize..200, alpha in 0u8..3, beta in 0u8..3, gamma in 1.05f64..2.0, big in any::<bool>()) {
            let a = if big { 2.0 } else { 0.5 };
            let t = random_weighted_tree(n, &mut RngStream::new(seed, 1).rng());
            let p = FunctionalParams::new(alpha as f64, beta as f64, gamma).unwrap();
            let s = t.rescale(a, gamma).unwrap();
            let leaf = t.argmax_vertex();
            let lhs = z_leaf(&s, leaf, &p).unwrap();
            let rhs = a.powf(p.leaf_scaling_exponent()) * z_leaf(&t, leaf, &p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
            let lhs = z_total(&s, &p);
            let rhs = a.powf(p.total_scaling_exponent()) * z_total(&t, &p);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
        }

        #[test]
        fn monotone_in_exponents(seed in any::<u64>(), n in 2usize..100, alpha in 0.0f64..5.0, beta in 0.0f64..5.0, d in 0.0f64..3.0) {
            let t = random_weighted_tree(n, &mut RngStream::new(seed, 2).rng());
            let t = t.dilate(1.0, 1.0 / t.total_mass().max(1e-12));
            let z = z_total(&t, &params(alpha, beta));
            prop_assert!(z >= 0.0);
            prop_assert!(z_total(&t, &params(alpha + d, beta)) <= z * (1.0 + 1e-12));
            let short = t.dilate(1.0 / t.total_height().max(1e-12), 1.0);
            let z = z_total(&short, &params(alpha, beta));
            prop_assert!(z_total(&short, &params(alpha, beta + d)) <= z * (1.0 + 1e-12));
        }
    }
}
