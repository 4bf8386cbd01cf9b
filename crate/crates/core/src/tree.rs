//! Finite weighted rooted trees.
//!
//! A [`WeightedTree`] is a rooted tree whose non-root vertices carry the
//! length of the edge to their parent and whose vertices carry a nonnegative
//! mass. Edge interiors carry no mass. All derived quantities (heights,
//! subtree masses, subtree maximal heights) are computed once at build time;
//! the tree is immutable afterwards.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, ensure, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    parent: Vec<Option<usize>>,
    edge_len: Vec<f64>,
    vertex_mass: Vec<f64>,
    root: usize,
    // children of v are children[child_start[v]..child_start[v + 1]], ascending
    child_start: Vec<usize>,
    children: Vec<usize>,
    // parents precede children: the identity when parents have smaller
    // indices, breadth-first from the root otherwise
    order: Vec<usize>,
    height: Vec<f64>,
    subtree_mass: Vec<f64>,
    subtree_max_height: Vec<f64>,
    total_mass: f64,
    total_height: f64,
    argmax_vertex: usize,
}

/// Mass and height of the subtree above level `r` containing a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubtreeSummary {
    pub level: f64,
    pub sigma: f64,
    pub height: f64,
    /// First vertex of the ancestral line at height `>= level`.
    pub top_vertex: usize,
}

/// One edge `u -> v` of an ancestral line, covering heights `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpineSegment {
    pub lo: f64,
    pub hi: f64,
    /// Subtree mass of `v`; the value of `sigma_{r,x}` on the whole segment.
    pub sigma: f64,
    /// Maximal height in the subtree of `v`; `height_{r,x} = max_height - r`.
    pub max_height: f64,
    pub vertex: usize,
}

/// Everything hanging off one spine vertex, without the spine itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraftSummary {
    pub height: f64,
    pub sigma: f64,
    pub spine_vertex: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graft {
    pub height: f64,
    pub sigma: f64,
    pub spine_vertex: usize,
    /// Copy of the grafted part, rooted at a massless copy of the spine vertex.
    pub subtree: WeightedTree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpineView {
    pub vertex: usize,
    /// Vertices from the root to `vertex`, inclusive.
    pub spine: Vec<usize>,
    pub segments: Vec<SpineSegment>,
    pub grafts: Vec<Graft>,
}

/// Line-oriented JSON record for a tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub parents: Vec<Option<usize>>,
    pub edge_lens: Vec<f64>,
    pub masses: Vec<f64>,
}

impl WeightedTree {
    /// Build a tree from a parent array. `edge_lens[root]` is ignored.
    pub fn build(
        parents: Vec<Option<usize>>,
        edge_lens: Vec<f64>,
        masses: Vec<f64>,
    ) -> Result<Self> {
        let n = parents.len();
        ensure(n > 0, || Error::Structure("empty tree".into()))?;
        ensure(edge_lens.len() == n && masses.len() == n, || {
            Error::Validation(format!(
                "length mismatch: {} parents, {} edge lengths, {} masses",
                n,
                edge_lens.len(),
                masses.len()
            ))
        })?;

        let mut root = None;
        let mut degree = vec![0usize; n + 1];
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None => {
                    if let Some(r) = root {
                        return Err(Error::Structure(format!(
                            "multiple roots: {r} and {v}"
                        )));
                    }
                    root = Some(v);
                }
                Some(p) => {
                    ensure(p < n, || {
                        Error::Structure(format!("vertex {v} has out-of-range parent {p}"))
                    })?;
                    ensure(p != v, || Error::Structure(format!("vertex {v} is its own parent")))?;
                    let len = edge_lens[v];
                    ensure(len.is_finite() && len > 0.0, || {
                        Error::Validation(format!("edge length of vertex {v} must be > 0, got {len}"))
                    })?;
                    degree[p + 1] += 1;
                }
            }
        }
        let root = root.ok_or_else(|| Error::Structure("no root".into()))?;
        for (v, &m) in masses.iter().enumerate() {
            ensure(m.is_finite() && m >= 0.0, || {
                Error::Validation(format!("mass of vertex {v} must be >= 0, got {m}"))
            })?;
        }

        for v in 0..n {
            degree[v + 1] += degree[v];
        }
        let child_start = degree;
        let mut fill = child_start.clone();
        let mut children = vec![0usize; n - 1];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                children[fill[p]] = v;
                fill[p] += 1;
            }
        }

        let indexed = root == 0 && parents[1..].iter().enumerate().all(|(i, p)| p.is_some_and(|p| p <= i));
        let order: Vec<usize> = if indexed {
            (0..n).collect()
        } else {
            let mut order = Vec::with_capacity(n);
            order.push(root);
            let mut head = 0;
            while head < order.len() {
                let v = order[head];
                head += 1;
                order.extend_from_slice(&children[child_start[v]..child_start[v + 1]]);
            }
            order
        };
        ensure(order.len() == n, || {
            Error::Structure(format!(
                "{} of {} vertices unreachable from the root (cycle)",
                n - order.len(),
                n
            ))
        })?;

        let mut height = vec![0.0; n];
        for &v in &order[1..] {
            let p = parents[v].expect("non-root");
            height[v] = height[p] + edge_lens[v];
        }
        let mut subtree_mass = masses.clone();
        let mut subtree_max_height = height.clone();
        for &v in order[1..].iter().rev() {
            let p = parents[v].expect("non-root");
            subtree_mass[p] += subtree_mass[v];
            if subtree_max_height[v] > subtree_max_height[p] {
                subtree_max_height[p] = subtree_max_height[v];
            }
        }

        let mut argmax_vertex = 0;
        for v in 1..n {
            if height[v] > height[argmax_vertex] {
                argmax_vertex = v;
            }
        }
        let mut edge_lens = edge_lens;
        edge_lens[root] = 0.0;

        Ok(Self {
            total_mass: subtree_mass[root],
            total_height: height[argmax_vertex],
            parent: parents,
            edge_len: edge_lens,
            vertex_mass: masses,
            root,
            child_start,
            children,
            order,
            height,
            subtree_mass,
            subtree_max_height,
            argmax_vertex,
        })
    }

    pub fn from_record(record: TreeRecord) -> Result<Self> {
        Self::build(record.parents, record.edge_lens, record.masses)
    }

    pub fn to_record(&self) -> TreeRecord {
        TreeRecord {
            parents: self.parent.clone(),
            edge_lens: self.edge_len.clone(),
            masses: self.vertex_mass.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[self.child_start[v]..self.child_start[v + 1]]
    }

    pub fn edge_len(&self, v: usize) -> f64 {
        self.edge_len[v]
    }

    pub fn edge_lens(&self) -> &[f64] {
        &self.edge_len
    }

    pub fn vertex_mass(&self, v: usize) -> f64 {
        self.vertex_mass[v]
    }

    pub fn masses(&self) -> &[f64] {
        &self.vertex_mass
    }

    pub fn height(&self, v: usize) -> f64 {
        self.height[v]
    }

    pub fn heights(&self) -> &[f64] {
        &self.height
    }

    pub fn subtree_mass(&self, v: usize) -> f64 {
        self.subtree_mass[v]
    }

    /// Maximal height over the descendants of `v`, `v` included.
    pub fn subtree_max_height(&self, v: usize) -> f64 {
        self.subtree_max_height[v]
    }

    /// All vertices, every parent before its children.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn total_height(&self) -> f64 {
        self.total_height
    }

    /// Highest vertex, lowest index on ties.
    pub fn argmax_vertex(&self) -> usize {
        self.argmax_vertex
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        ensure(v < self.len(), || {
            Error::Domain(format!("vertex {v} out of range for tree of {} vertices", self.len()))
        })
    }

    /// Root-to-`x` path, root first.
    pub fn spine_path(&self, x: usize) -> Result<Vec<usize>> {
        self.check_vertex(x)?;
        let mut path = vec![x];
        let mut v = x;
        while let Some(p) = self.parent[v] {
            path.push(p);
            v = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Most recent common ancestor of `x` and `y`.
    pub fn common_ancestor(&self, x: usize, y: usize) -> Result<usize> {
        let a = self.spine_path(x)?;
        let b = self.spine_path(y)?;
        let mut last = self.root;
        for (u, v) in a.iter().zip(&b) {
            if u != v {
                break;
            }
            last = *u;
        }
        Ok(last)
    }

    /// Mass and height of `T_{r,x}`, the subtree above level `r` containing `x`.
    ///
    /// The subtree is rooted at the ancestor of `x` at height `r`; when that
    /// point lies inside an edge `u -> v` it carries the subtree of `v`.
    pub fn subtree_at_level(&self, x: usize, r: f64) -> Result<SubtreeSummary> {
        self.check_vertex(x)?;
        ensure(r >= 0.0 && r <= self.height[x], || {
            Error::Domain(format!("level {r} outside [0, H(x)] = [0, {}]", self.height[x]))
        })?;
        let mut v = x;
        while let Some(p) = self.parent[v] {
            if self.height[p] >= r {
                v = p;
            } else {
                break;
            }
        }
        Ok(SubtreeSummary {
            level: r,
            sigma: self.subtree_mass[v],
            height: self.subtree_max_height[v] - r,
            top_vertex: v,
        })
    }

    /// Piecewise description of `r -> (sigma_{r,x}, height_{r,x})` along the
    /// ancestral line of `x`, ordered by increasing height.
    pub fn spine_segments(&self, x: usize) -> Result<Vec<SpineSegment>> {
        let path = self.spine_path(x)?;
        Ok(path
            .windows(2)
            .map(|w| SpineSegment {
                lo: self.height[w[0]],
                hi: self.height[w[1]],
                sigma: self.subtree_mass[w[1]],
                max_height: self.subtree_max_height[w[1]],
                vertex: w[1],
            })
            .collect())
    }

    /// Heights and masses of everything grafted on the ancestral line of `x`,
    /// one entry per spine vertex with off-spine children.
    pub fn graft_summaries(&self, x: usize) -> Result<Vec<GraftSummary>> {
        let path = self.spine_path(x)?;
        Ok(self.graft_summaries_on(&path))
    }

    fn graft_summaries_on(&self, path: &[usize]) -> Vec<GraftSummary> {
        let mut out = Vec::new();
        for (i, &u) in path.iter().enumerate() {
            let next = path.get(i + 1).copied();
            let mut sigma = 0.0;
            let mut any = false;
            for &c in self.children(u) {
                if Some(c) != next {
                    sigma += self.subtree_mass[c];
                    any = true;
                }
            }
            if any {
                out.push(GraftSummary {
                    height: self.height[u],
                    sigma,
                    spine_vertex: u,
                });
            }
        }
        out
    }

    /// Spine decomposition of the path from the root to `x`.
    pub fn spine_view(&self, x: usize) -> Result<SpineView> {
        let spine = self.spine_path(x)?;
        let segments = self.spine_segments(x)?;
        let grafts = self
            .graft_summaries_on(&spine)
            .into_iter()
            .map(|g| {
                let i = spine.iter().position(|&v| v == g.spine_vertex).expect("on spine");
                let next = spine.get(i + 1).copied();
                let roots: Vec<usize> = self
                    .children(g.spine_vertex)
                    .iter()
                    .copied()
                    .filter(|&c| Some(c) != next)
                    .collect();
                Graft {
                    height: g.height,
                    sigma: g.sigma,
                    spine_vertex: g.spine_vertex,
                    subtree: self.extract_forest(&roots),
                }
            })
            .collect();
        Ok(SpineView {
            vertex: x,
            spine,
            segments,
            grafts,
        })
    }

    /// Copy the subtrees of `roots` (siblings) below a fresh massless root.
    pub fn extract_forest(&self, roots: &[usize]) -> WeightedTree {
        let mut parents = vec![None];
        let mut lens = vec![0.0];
        let mut masses = vec![0.0];
        let mut stack: Vec<(usize, usize)> = roots.iter().rev().map(|&r| (r, 0)).collect();
        while let Some((v, new_parent)) = stack.pop() {
            let id = parents.len();
            parents.push(Some(new_parent));
            lens.push(self.edge_len[v]);
            masses.push(self.vertex_mass[v]);
            for &c in self.children(v).iter().rev() {
                stack.push((c, id));
            }
        }
        WeightedTree::build(parents, lens, masses).expect("copy of a valid subtree")
    }

    /// Copy of the subtree above `v`, rooted at `v`.
    pub fn extract_subtree(&self, v: usize) -> Result<WeightedTree> {
        self.check_vertex(v)?;
        let sub = self.extract_forest(self.children(v));
        let mut rec = sub.to_record();
        rec.masses[0] = self.vertex_mass[v];
        WeightedTree::from_record(rec)
    }

    /// Same tree with all distances multiplied by `a` and all masses by
    /// `a^{gamma/(gamma-1)}`.
    pub fn rescale(&self, a: f64, gamma: f64) -> Result<WeightedTree> {
        ensure(a.is_finite() && a > 0.0, || {
            Error::Domain(format!("scale factor must be > 0, got {a}"))
        })?;
        check_gamma(gamma)?;
        let mass_factor = a.powf(gamma / (gamma - 1.0));
        Ok(self.dilate(a, mass_factor))
    }

    /// Same tree with distances times `a` and masses times `b`.
    pub fn dilate(&self, a: f64, b: f64) -> WeightedTree {
        self.clone().into_dilated(a, b)
    }

    /// Consuming form of [`dilate`](Self::dilate).
    pub fn into_dilated(self, a: f64, b: f64) -> WeightedTree {
        let mut t = self;
        for (i, len) in t.edge_len.iter_mut().enumerate() {
            if i != t.root {
                *len *= a;
            }
        }
        for h in t.height.iter_mut().chain(t.subtree_max_height.iter_mut()) {
            *h *= a;
        }
        for m in t
            .vertex_mass
            .iter_mut()
            .chain(t.subtree_mass.iter_mut())
        {
            *m *= b;
        }
        t.total_mass *= b;
        t.total_height *= a;
        t
    }

    /// Rescale to unit total mass.
    pub fn normalize(&self, gamma: f64) -> Result<WeightedTree> {
        check_gamma(gamma)?;
        ensure(self.total_mass > 0.0, || {
            Error::Degenerate("cannot normalize a tree of zero mass".into())
        })?;
        self.rescale(self.total_mass.powf(-1.0 + 1.0 / gamma), gamma)
    }

    /// Upper bound on the GHP distance between this tree and the same tree
    /// with distances times `a` and masses times `b`, realized by the
    /// identity correspondence and the diagonal coupling.
    pub fn ghp_scaling_certificate(&self, a: f64, b: f64) -> Result<f64> {
        ensure(a > 0.0 && b > 0.0, || {
            Error::Domain(format!("dilation factors must be > 0, got a={a}, b={b}"))
        })?;
        Ok(2.0 * (a - 1.0).abs() * self.total_height + (b - 1.0).abs() * self.total_mass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_record(serde_json::from_str(s)?)
    }
}

/// Write trees as JSON lines.
pub fn write_json_lines<'a, W: Write>(
    mut w: W,
    trees: impl IntoIterator<Item = &'a WeightedTree>,
) -> Result<()> {
    for t in trees {
        serde_json::to_writer(&mut w, &t.to_record())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Read a JSON-lines corpus; blank lines are skipped.
pub fn read_json_lines<R: BufRead>(r: R) -> Result<Vec<WeightedTree>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(WeightedTree::from_json(&line)?);
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// root -> b (len 1); b -> l1 (len 2, mass 1/2); b -> l2 (len 1, mass 1/2).
    pub fn cherry() -> WeightedTree {
        WeightedTree::build(
            vec![None, Some(0), Some(1), Some(1)],
            vec![0.0, 1.0, 2.0, 1.0],
            vec![0.0, 0.0, 0.5, 0.5],
        )
        .unwrap()
    }

    pub fn path3() -> WeightedTree {
        WeightedTree::build(
            vec![None, Some(0), Some(1)],
            vec![0.0, 1.0, 2.0],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_vertex() {
        let t = WeightedTree::build(vec![None], vec![0.0], vec![1.0]).unwrap();
        assert_eq!(t.total_mass(), 1.0);
        assert_eq!(t.total_height(), 0.0);
        assert_eq!(t.argmax_vertex(), 0);
    }

    #[test]
    fn path_caches() {
        let t = path3();
        assert_eq!(t.height(2), 3.0);
        assert_eq!(t.subtree_max_height(0), 3.0);
        assert_eq!(t.subtree_mass(1), 1.0);
    }

    #[test]
    fn cherry_caches() {
        let t = cherry();
        assert_eq!(t.total_height(), 3.0);
        assert_eq!(t.argmax_vertex(), 2);
        assert_eq!(t.subtree_mass(1), 1.0);
        assert_eq!(t.total_mass(), 1.0);
    }

    #[test]
    fn parents_need_not_precede_children() {
        // root is vertex 2
        let t = WeightedTree::build(
            vec![Some(2), Some(0), None],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0],
        )
        .unwrap();
        assert_eq!(t.root(), 2);
        assert_eq!(t.height(1), 2.0);
        assert_eq!(t.subtree_mass(2), 1.0);
    }

    #[test]
    fn argmax_ties_take_lowest_index() {
        let t = WeightedTree::build(
            vec![None, Some(0), Some(0)],
            vec![0.0, 1.0, 1.0],
            vec![0.0, 0.5, 0.5],
        )
        .unwrap();
        assert_eq!(t.argmax_vertex(), 1);
    }

    #[test]
    fn structural_errors() {
        let cyc = WeightedTree::build(
            vec![None, Some(2), Some(1)],
            vec![0.0, 1.0, 1.0],
            vec![0.0; 3],
        );
        assert!(matches!(cyc, Err(Error::Structure(_))));
        let two_roots = WeightedTree::build(vec![None, None], vec![0.0; 2], vec![0.0; 2]);
        assert!(matches!(two_roots, Err(Error::Structure(_))));
        let no_root = WeightedTree::build(vec![Some(1), Some(0)], vec![1.0; 2], vec![0.0; 2]);
        assert!(matches!(no_root, Err(Error::Structure(_))));
        let zero_len = WeightedTree::build(vec![None, Some(0)], vec![0.0, 0.0], vec![0.0; 2]);
        assert!(matches!(zero_len, Err(Error::Validation(_))));
        let neg_mass = WeightedTree::build(vec![None, Some(0)], vec![0.0, 1.0], vec![0.0, -1.0]);
        assert!(matches!(neg_mass, Err(Error::Validation(_))));
        let mismatch = WeightedTree::build(vec![None, Some(0)], vec![0.0], vec![0.0; 2]);
        assert!(matches!(mismatch, Err(Error::Validation(_))));
    }

    #[test]
    fn subtree_at_level_examples() {
        let t = cherry();
        let s = t.subtree_at_level(2, 0.0).unwrap();
        assert_eq!((s.sigma, s.height), (1.0, 3.0));
        let s = t.subtree_at_level(2, 0.5).unwrap();
        assert_eq!((s.sigma, s.height), (1.0, 2.5));
        let s = t.subtree_at_level(2, 1.5).unwrap();
        assert_eq!((s.sigma, s.height), (0.5, 1.5));
        // at a branch point the subtree of the branch vertex is taken
        let s = t.subtree_at_level(2, 1.0).unwrap();
        assert_eq!((s.sigma, s.top_vertex), (1.0, 1));
        assert!(matches!(t.subtree_at_level(2, 3.5), Err(Error::Domain(_))));
    }

    #[test]
    fn spine_view_examples() {
        let single = WeightedTree::build(vec![None, Some(0)], vec![0.0, 2.0], vec![0.0, 1.0]).unwrap();
        let v = single.spine_view(1).unwrap();
        assert_eq!(v.segments.len(), 1);
        assert!(v.grafts.is_empty());

        let v = cherry().spine_view(2).unwrap();
        assert_eq!(v.segments.len(), 2);
        assert_eq!((v.segments[0].lo, v.segments[0].hi), (0.0, 1.0));
        assert_eq!((v.segments[0].sigma, v.segments[0].max_height), (1.0, 3.0));
        assert_eq!((v.segments[1].lo, v.segments[1].hi), (1.0, 3.0));
        assert_eq!((v.segments[1].sigma, v.segments[1].max_height), (0.5, 3.0));
        assert_eq!(v.grafts.len(), 1);
        assert_eq!((v.grafts[0].height, v.grafts[0].sigma), (1.0, 0.5));
        let g = &v.grafts[0].subtree;
        assert_eq!(g.len(), 2);
        assert_eq!(g.vertex_mass(0), 0.0);
        assert_eq!(g.total_mass(), 0.5);
        assert_eq!(g.total_height(), 1.0);

        let v = path3().spine_view(2).unwrap();
        assert_eq!(v.segments.len(), 2);
        assert!(v.grafts.is_empty());
    }

    #[test]
    fn rescale_examples() {
        let t = cherry();
        assert_eq!(t.rescale(1.0, 1.5).unwrap(), t);
        let r = t.rescale(2.0, 2.0).unwrap();
        assert_eq!(r.edge_len(2), 4.0);
        assert_eq!(r.vertex_mass(2), 2.0);
        let r = t.rescale(2.0, 1.5).unwrap();
        assert_relative_eq!(r.vertex_mass(2), 4.0, max_relative = 1e-12);
        assert_relative_eq!(r.total_mass(), 8.0, max_relative = 1e-12);
        assert!(matches!(t.rescale(0.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(t.rescale(1.0, 2.5), Err(Error::Domain(_))));
        assert!(matches!(t.rescale(1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn normalize_examples() {
        let t = cherry();
        assert_eq!(t.normalize(2.0).unwrap(), t);
        let heavy = t.dilate(1.0, 4.0);
        let n = heavy.normalize(2.0).unwrap();
        assert_relative_eq!(n.total_mass(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(n.total_height(), 1.5, max_relative = 1e-12);
        let light = t.dilate(1.0, 0.25);
        let n = light.normalize(2.0).unwrap();
        assert_relative_eq!(n.total_height(), 6.0, max_relative = 1e-12);
        let zero = t.dilate(1.0, 0.0);
        assert!(matches!(zero.normalize(2.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn ghp_certificate_examples() {
        let t = cherry();
        assert_eq!(t.ghp_scaling_certificate(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(t.ghp_scaling_certificate(2.0, 1.0).unwrap(), 6.0);
        assert_eq!(t.ghp_scaling_certificate(1.0, 3.0).unwrap(), 2.0);
        assert!(t.ghp_scaling_certificate(0.0, 1.0).is_err());
    }

    #[test]
    fn json_lines_roundtrip() {
        let trees = vec![cherry(), path3()];
        let mut buf = Vec::new();
        write_json_lines(&mut buf, &trees).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("{\"parents\":[null,0,1,1],\"edge_lens\""));
        let back = read_json_lines(&buf[..]).unwrap();
        assert_eq!(back, trees);
    }

    #[test]
    fn extract_subtree_copies() {
        let t = cherry();
        let s = t.extract_subtree(1).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.total_mass(), 1.0);
        assert_eq!(s.total_height(), 2.0);
    }
}
