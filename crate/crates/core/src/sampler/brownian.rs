use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure, Error, Result};
use crate::tree::WeightedTree;

/// Values at `m` grid times of `sqrt(2)` times a normalized Brownian excursion,
/// obtained from a Gaussian random-walk bridge by the Vervaat transform.
pub fn sample_excursion<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Vec<f64>> {
    ensure(m >= 2, || Error::Domain(format!("grid size must be at least 2, got {m}")))?;
    let scale = 1.0 / (m as f64).sqrt();
    let mut walk = Vec::with_capacity(m + 1);
    walk.push(0.0);
    let mut w = 0.0;
    for _ in 0..m {
        let z: f64 = rng.sample(StandardNormal);
        w += z * scale;
        walk.push(w);
    }
    let end = walk[m];
    let bridge: Vec<f64> = (0..m).map(|i| walk[i] - end * i as f64 / m as f64).collect();
    let (at, &min) = bridge
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    Ok((0..m)
        .map(|j| std::f64::consts::SQRT_2 * (bridge[(at + j) % m] - min))
        .collect())
}

/// Tree coded by a height function `h`: grid times are vertices, and the
/// distance between times `i < j` is `h_i + h_j - 2 min_{[i, j]} h`.
///
/// The ancestors of `i` are the times on either side of `i` whose height is a
/// running minimum seen from `i`; the parent is the higher of the previous
/// and the next time with strictly smaller height. Vertex 0 is the root and
/// must be the unique minimum.
pub fn tree_from_heights(heights: &[f64]) -> Result<WeightedTree> {
    let m = heights.len();
    ensure(m > 0, || Error::Structure("empty height function".into()))?;
    ensure(heights[1..].iter().all(|&h| h > heights[0]), || {
        Error::Structure("time 0 must be the unique minimum of the height function".into())
    })?;
    let mut previous = vec![0usize; m];
    let mut stack: Vec<usize> = vec![0];
    for i in 1..m {
        while heights[*stack.last().expect("root stays")] >= heights[i] {
            stack.pop();
        }
        previous[i] = *stack.last().expect("root stays");
        stack.push(i);
    }
    let mut next: Vec<Option<usize>> = vec![None; m];
    stack.clear();
    for i in (1..m).rev() {
        while let Some(&top) = stack.last() {
            if heights[top] < heights[i] {
                break;
            }
            stack.pop();
        }
        next[i] = stack.last().copied();
        stack.push(i);
    }
    let mut parents = vec![None; m];
    let mut edges = vec![0.0; m];
    for i in 1..m {
        let p = match next[i] {
            Some(f) if heights[f] > heights[previous[i]] => f,
            _ => previous[i],
        };
        parents[i] = Some(p);
        edges[i] = heights[i] - heights[p];
    }
    WeightedTree::build(parents, edges, vec![1.0 / m as f64; m])
}

/// Tree coded by `sqrt(2)` times a normalized Brownian excursion on an
/// `m`-point grid, with mass `1/m` per grid time.
pub fn sample_brownian_tree<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<WeightedTree> {
    tree_from_heights(&sample_excursion(m, rng)?)
}
