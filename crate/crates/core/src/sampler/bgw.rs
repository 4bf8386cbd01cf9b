use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::offspring::OffspringLaw;
use crate::error::{ensure, Error, Result};
use crate::tree::WeightedTree;

const MAX_TRIALS: usize = 2_000_000;
// below this many undecided draws, each is sampled individually
const DIRECT_DRAWS: usize = 64;

/// Offspring counts of `n` i.i.d. draws from `law`, conditioned on summing to
/// `n - 1`, in exchangeable (uniformly shuffled) order.
///
/// The counts per value are generated as a sequence of binomials, which is
/// equivalent to drawing the `n` variables one at a time but lets a trial be
/// abandoned as soon as the sum condition can no longer hold.
pub fn conditioned_offspring<R: Rng + ?Sized>(
    law: &OffspringLaw,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    ensure(n >= 1, || Error::Domain("tree size must be at least 1".into()))?;
    let target = n - 1;
    let mut runs = Vec::new();
    for _ in 0..MAX_TRIALS {
        runs.clear();
        if trial(law, n, target, &mut runs, rng) {
            let mut degrees = Vec::with_capacity(n);
            for &(k, c) in &runs {
                degrees.extend(std::iter::repeat_n(k, c));
            }
            degrees.shuffle(rng);
            return Ok(degrees);
        }
    }
    Err(Error::Sampling(format!(
        "no offspring sequence summing to {target} after {MAX_TRIALS} trials with the {} law",
        law.name()
    )))
}

/// One attempt; on success `runs` holds `(value, multiplicity)` pairs.
fn trial<R: Rng + ?Sized>(
    law: &OffspringLaw,
    n: usize,
    target: usize,
    runs: &mut Vec<(usize, usize)>,
    rng: &mut R,
) -> bool {
    let mut left = n;
    let mut sum = 0usize;
    let mut k = 0usize;
    while left > 0 {
        if left <= DIRECT_DRAWS || k >= law.table_len() {
            for _ in 0..left {
                let d = law.sample_at_least(k, rng);
                sum = sum.saturating_add(d);
                if sum > target {
                    return false;
                }
                runs.push((d, 1));
            }
            break;
        }
        let q = law.hazard(k);
        let c = if q >= 1.0 {
            left
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(left as u64, q).map(|b| b.sample(rng) as usize).unwrap_or(0)
        };
        if c > 0 {
            runs.push((k, c));
        }
        sum += k * c;
        left -= c;
        k += 1;
        if sum.saturating_add(k.saturating_mul(left)) > target {
            return false;
        }
    }
    sum == target
}

/// Rotate a sequence of offspring counts summing to `len - 1` so that it
/// becomes the depth-first degree sequence of a plane tree.
///
/// With steps `d_i - 1`, the rotation starts right after the first time the
/// walk reaches its overall minimum; exactly one rotation has this property.
pub fn cycle_lemma_rotate(degrees: &mut [usize]) {
    let mut s = 0i64;
    let mut min = i64::MAX;
    let mut at = 0;
    for (j, &d) in degrees.iter().enumerate() {
        s += d as i64 - 1;
        if s < min {
            min = s;
            at = j + 1;
        }
    }
    degrees.rotate_left(at % degrees.len().max(1));
}

/// Parent array of the plane tree with depth-first degree sequence `degrees`.
pub fn parents_from_degrees(degrees: &[usize]) -> Result<Vec<Option<usize>>> {
    let n = degrees.len();
    ensure(n > 0, || Error::Structure("empty degree sequence".into()))?;
    let mut parents = vec![None; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    if degrees[0] > 0 {
        stack.push((0, degrees[0]));
    }
    for v in 1..n {
        let Some(top) = stack.last_mut() else {
            return Err(Error::Structure(format!("degree sequence closes before vertex {v}")));
        };
        parents[v] = Some(top.0);
        top.1 -= 1;
        if top.1 == 0 {
            stack.pop();
        }
        if degrees[v] > 0 {
            stack.push((v, degrees[v]));
        }
    }
    ensure(stack.is_empty(), || {
        Error::Structure("degree sequence leaves unfilled child slots".into())
    })?;
    Ok(parents)
}

/// Plane tree with `n` vertices whose offspring counts are i.i.d. `law`
/// conditioned on the total progeny being `n`. Edges have length 1 and every
/// vertex has mass `1/n`.
pub fn sample_bgw_conditioned<R: Rng + ?Sized>(
    law: &OffspringLaw,
    n: usize,
    rng: &mut R,
) -> Result<WeightedTree> {
    let mut degrees = conditioned_offspring(law, n, rng)?;
    cycle_lemma_rotate(&mut degrees);
    let parents = parents_from_degrees(&degrees)?;
    WeightedTree::build(parents, vec![1.0; n], vec![1.0 / n as f64; n])
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn small_sizes() {
        let law = OffspringLaw::geometric_half();
        let mut rng = RngStream::new(1, 0).rng();
        let t = sample_bgw_conditioned(&law, 1, &mut rng).unwrap();
        assert_eq!(t.len(), 1);
        for _ in 0..100 {
            let t = sample_bgw_conditioned(&law, 2, &mut rng).unwrap();
            assert_eq!(t.parents(), &[None, Some(0)]);
        }
        assert!(matches!(sample_bgw_conditioned(&law, 0, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn impossible_size_is_a_sampling_error() {
        let law = OffspringLaw::binary();
        let mut rng = RngStream::new(1, 0).rng();
        assert!(matches!(sample_bgw_conditioned(&law, 4, &mut rng), Err(Error::Sampling(_))));
    }

    #[test]
    fn cycle_lemma_examples() {
        let mut d = vec![0, 2, 0];
        cycle_lemma_rotate(&mut d);
        assert_eq!(d, vec![2, 0, 0]);
        let mut d = vec![0, 0, 1, 3, 0, 0];
        cycle_lemma_rotate(&mut d);
        assert_eq!(d, vec![1, 3, 0, 0, 0, 0]);
        assert!(parents_from_degrees(&[0, 1]).is_err());
        assert!(parents_from_degrees(&[2, 0]).is_err());
    }

    fn shape_frequencies(law: &OffspringLaw, n: usize, samples: usize, seed: u64) -> HashMap<Vec<usize>, f64> {
        let mut rng = RngStream::new(seed, 0).rng();
        let mut freq = HashMap::new();
        for _ in 0..samples {
            let mut d = conditioned_offspring(law, n, &mut rng).unwrap();
            cycle_lemma_rotate(&mut d);
            parents_from_degrees(&d).unwrap();
            *freq.entry(d).or_insert(0.0) += 1.0 / samples as f64;
        }
        freq
    }

    #[test]
    fn exact_law_for_three_and_four_vertices() {
        // under Geometric(1/2) every plane tree with n vertices has weight
        // 2^{-(2n-1)}, so the conditional law is uniform over plane trees
        let law = OffspringLaw::geometric_half();
        let freq3 = shape_frequencies(&law, 3, 100_000, 3);
        assert_eq!(freq3.len(), 2);
        let tv3: f64 = freq3.values().map(|p| (p - 0.5).abs()).sum::<f64>() / 2.0;
        assert!(tv3 < 0.01, "tv {tv3}");
        let freq4 = shape_frequencies(&law, 4, 100_000, 4);
        assert_eq!(freq4.len(), 5);
        let tv4: f64 = freq4.values().map(|p| (p - 0.2).abs()).sum::<f64>() / 2.0;
        assert!(tv4 < 0.01, "tv {tv4}");
    }

    #[test]
    fn exact_law_zipf() {
        // weights of the five plane trees on four vertices
        let law = OffspringLaw::zipf(1.5).unwrap();
        let p = |k| law.pmf(k);
        let mut exact: HashMap<Vec<usize>, f64> = HashMap::new();
        exact.insert(vec![3, 0, 0, 0], p(3) * p(0).powi(3));
        exact.insert(vec![1, 1, 1, 0], p(1).powi(3) * p(0));
        for d in [vec![2, 1, 0, 0], vec![2, 0, 1, 0], vec![1, 2, 0, 0]] {
            exact.insert(d, p(2) * p(1) * p(0).powi(2));
        }
        let z: f64 = exact.values().sum();
        let freq = shape_frequencies(&law, 4, 100_000, 5);
        let tv: f64 = exact
            .iter()
            .map(|(d, w)| (w / z - freq.get(d).copied().unwrap_or(0.0)).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.01, "tv {tv}");
    }

    #[test]
    fn large_trees_are_valid() {
        let mut rng = RngStream::new(8, 0).rng();
        for (law, n) in [
            (OffspringLaw::geometric_half(), 20_000),
            (OffspringLaw::zipf(1.2).unwrap(), 5_000),
            (OffspringLaw::zipf(1.7).unwrap(), 20_000),
        ] {
            let t = sample_bgw_conditioned(&law, n, &mut rng).unwrap();
            assert_eq!(t.len(), n);
            let edges: usize = (0..n).map(|v| t.children(v).len()).sum();
            assert_eq!(edges, n - 1);
            assert!((t.total_mass() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn reproducible() {
        let law = OffspringLaw::zipf(1.5).unwrap();
        let s = RngStream::new(77, 3);
        let a = sample_bgw_conditioned(&law, 3000, &mut s.rng()).unwrap();
        let b = sample_bgw_conditioned(&law, 3000, &mut s.rng()).unwrap();
        assert_eq!(a, b);
    }
}
