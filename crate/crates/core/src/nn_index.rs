//! Exact nearest-neighbor search over a fixed design.
//!
//! A k-d tree with bucketed leaves. Queries descend near-side first and prune
//! far subtrees using the incremental per-dimension offset bound, which is
//! valid for every Minkowski metric. Leaf scans abandon a point as soon as its
//! partial distance exceeds the current best, which is what keeps the search
//! fast in high dimension where tree pruning alone stops helping.
//!
//! Ties are broken towards the smallest design index.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{contract, Result};
use crate::metrics::Metric;
use crate::points::Points;

const LEAF_SIZE: usize = 16;

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        dim: u32,
        value: f64,
        left: u32,
        right: u32,
    },
}

/// Immutable exact nearest-neighbor index.
#[derive(Debug)]
pub struct NnIndex {
    points: Points,
    metric: Metric,
    /// Leaf order -> original row index.
    perm: Vec<u32>,
    /// Points copied in leaf order so leaf scans stay contiguous.
    ordered: Vec<f64>,
    nodes: Vec<Node>,
    batch_calls: AtomicUsize,
}

/// Design points, with their distance from the owner, still able to compete
/// for a moving query. `None` means every point.
pub(crate) type Competitors = Option<Vec<(f64, u32)>>;

/// Design points ordered by distance from selected anchor points, used by
/// [`NnIndex::owned_batch`] to stop a scan once the triangle inequality rules
/// out every remaining point.
#[derive(Debug)]
pub struct AnchorTable {
    slot: Vec<u32>,
    rows: Vec<Vec<(f64, u32)>>,
}

impl AnchorTable {
    pub fn contains(&self, anchor: usize) -> bool {
        self.slot.get(anchor).is_some_and(|&s| s != u32::MAX)
    }

    fn row(&self, anchor: usize) -> &[(f64, u32)] {
        &self.rows[self.slot[anchor] as usize]
    }
}

struct Search<'a> {
    index: &'a NnIndex,
    query: &'a [f64],
    offsets: &'a mut [f64],
    best: f64,
    best_idx: usize,
}

impl NnIndex {
    /// Builds the index over the rows of `points`.
    pub fn build(points: &Points, metric: Metric) -> Result<Self> {
        if points.is_empty() {
            return Err(contract("cannot build a nearest-neighbor index over zero points"));
        }
        if !points.is_finite() {
            return Err(contract("nearest-neighbor index requires finite coordinates"));
        }
        let n = points.len();
        let dim = points.dim();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        build_node(points, &mut perm, 0, n, &mut nodes);

        let mut ordered = Vec::with_capacity(n * dim);
        for &i in &perm {
            ordered.extend_from_slice(points.row(i as usize));
        }
        Ok(Self {
            points: points.clone(),
            metric,
            perm,
            ordered,
            nodes,
            batch_calls: AtomicUsize::new(0),
        })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    /// Number of batched query calls served so far.
    pub fn batch_calls(&self) -> usize {
        self.batch_calls.load(Ordering::Relaxed)
    }

    /// Nearest design index to `query` and its distance.
    pub fn nearest(&self, query: &[f64]) -> Result<(usize, f64)> {
        self.check_dim(query.len())?;
        let mut offsets = vec![0.0; self.dim()];
        let i = self.search(query, None, &mut offsets);
        Ok((i, self.metric.dist(query, self.points.row(i))))
    }

    /// Nearest design index for every row of `queries`.
    pub fn nearest_batch(&self, queries: &Points) -> Result<Vec<usize>> {
        self.check_dim(queries.dim())?;
        self.batch_calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.run_batch(queries, |_| None))
    }

    /// Like [`nearest_batch`](Self::nearest_batch), seeding each search with a
    /// known design point `hints[m]`. The answer is still the exact nearest
    /// neighbor; a good hint only makes the search cheaper.
    pub fn nearest_batch_hinted(&self, queries: &Points, hints: &[usize]) -> Result<Vec<usize>> {
        self.check_dim(queries.dim())?;
        if hints.len() != queries.len() {
            return Err(contract(format!(
                "{} hints supplied for {} queries",
                hints.len(),
                queries.len()
            )));
        }
        if let Some(&bad) = hints.iter().find(|&&h| h >= self.len()) {
            return Err(contract(format!(
                "hint {bad} out of range for a design of {} points",
                self.len()
            )));
        }
        self.batch_calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.run_batch(queries, |m| Some(hints[m])))
    }

    /// Distances from each anchor to every design point, sorted ascending.
    pub fn anchor_table(&self, anchors: &[usize]) -> Result<AnchorTable> {
        let n = self.len();
        let mut slot = vec![u32::MAX; n];
        let mut unique = Vec::new();
        for &a in anchors {
            if a >= n {
                return Err(contract(format!("anchor {a} out of range for a design of {n} points")));
            }
            if slot[a] == u32::MAX {
                slot[a] = unique.len() as u32;
                unique.push(a);
            }
        }
        let rows = unique
            .par_iter()
            .map(|&a| {
                let xa = self.points.row(a);
                let mut row: Vec<(f64, u32)> = self
                    .points
                    .rows()
                    .enumerate()
                    .map(|(j, xj)| (self.metric.dist(xa, xj), j as u32))
                    .collect();
                row.sort_unstable_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
                row
            })
            .collect();
        Ok(AnchorTable { slot, rows })
    }

    /// For every query, whether its nearest design point (under the usual
    /// tie rule) is `owners[m]`. Agrees exactly with comparing
    /// [`nearest_batch`](Self::nearest_batch) against `owners`, but a scan
    /// stops at the first point that beats the owner and skips every point
    /// farther than twice the owner's distance from the owner.
    pub fn owned_batch(&self, queries: &Points, owners: &[usize], table: &AnchorTable) -> Result<Vec<bool>> {
        self.check_dim(queries.dim())?;
        if owners.len() != queries.len() {
            return Err(contract(format!(
                "{} owners supplied for {} queries",
                owners.len(),
                queries.len()
            )));
        }
        if let Some(&bad) = owners.iter().find(|&&o| !table.contains(o)) {
            return Err(contract(format!("owner {bad} is not an anchor of the table")));
        }
        self.batch_calls.fetch_add(1, Ordering::Relaxed);
        let dim = self.dim();
        Ok(queries
            .as_flat()
            .par_chunks(dim)
            .zip(owners.par_iter())
            .map(|(q, &o)| self.owns(q, o, table.row(o)))
            .collect())
    }

    /// [`owned_batch`](Self::owned_batch) for queries that move in small
    /// steps. Every later query for slot `m` must lie within `reach[m]` of
    /// the current one; `lists[m]` then shrinks to the design points that
    /// could still tie or beat the owner anywhere in that ball. Start each
    /// list as `None`.
    pub(crate) fn owned_batch_narrowing(
        &self,
        queries: &Points,
        owners: &[usize],
        reach: &[f64],
        lists: &mut [Competitors],
        table: &AnchorTable,
    ) -> Result<Vec<bool>> {
        self.check_dim(queries.dim())?;
        if owners.len() != queries.len() || reach.len() != queries.len() || lists.len() != queries.len() {
            return Err(contract("owners, reach and lists must match the queries"));
        }
        if let Some(&bad) = owners.iter().find(|&&o| !table.contains(o)) {
            return Err(contract(format!("owner {bad} is not an anchor of the table")));
        }
        self.batch_calls.fetch_add(1, Ordering::Relaxed);
        let dim = self.dim();
        Ok(queries
            .as_flat()
            .par_chunks(dim)
            .zip(owners.par_iter())
            .zip(reach.par_iter())
            .zip(lists.par_iter_mut())
            .map(|(((q, &o), &h), list)| self.owns_narrowing(q, o, h, table.row(o), list))
            .collect())
    }

    fn owns_narrowing(&self, q: &[f64], o: usize, reach: f64, row: &[(f64, u32)], list: &mut Competitors) -> bool {
        let r_red = self.metric.reduced(q, self.points.row(o));
        let r = match self.metric {
            Metric::L2 => r_red.sqrt(),
            _ => r_red,
        };
        if list.is_none() && reach > r {
            return self.owns(q, o, row);
        }
        // A point that ties or beats the owner at q' with d(q, q') <= h is
        // within r + 2h of q and within 2(r + h) of the owner.
        let pad = 1.0 + 1e-9;
        let limit = 2.0 * (r + reach) * pad;
        let keep = (r + 2.0 * reach) * pad + 1e-12;
        let keep_red = match self.metric {
            Metric::L2 => keep * keep,
            _ => keep,
        };
        let mut owned = true;
        let mut next = Vec::new();
        for &(d_oj, j) in list.as_deref().unwrap_or(row) {
            if d_oj > limit {
                break;
            }
            let ju = j as usize;
            if ju == o {
                continue;
            }
            if let Some(v) = self.metric.reduced_within(q, self.points.row(ju), keep_red) {
                if v < r_red || (v == r_red && ju < o) {
                    owned = false;
                }
                next.push((d_oj, j));
            }
        }
        *list = Some(next);
        owned
    }

    fn owns(&self, q: &[f64], o: usize, row: &[(f64, u32)]) -> bool {
        let r_red = self.metric.reduced(q, self.points.row(o));
        let r = match self.metric {
            Metric::L2 => r_red.sqrt(),
            _ => r_red,
        };
        // d(q, x_j) >= d(o, x_j) - r > r once d(o, x_j) > 2r; the slack
        // covers rounding in both distances.
        let limit = 2.0 * r * (1.0 + 1e-9);
        for &(d_oj, j) in row {
            if d_oj > limit {
                break;
            }
            let j = j as usize;
            if j == o {
                continue;
            }
            if let Some(v) = self.metric.reduced_within(q, self.points.row(j), r_red) {
                if v < r_red || j < o {
                    return false;
                }
            }
        }
        true
    }

    fn run_batch(&self, queries: &Points, hint: impl Fn(usize) -> Option<usize> + Sync) -> Vec<usize> {
        let dim = self.dim();
        queries
            .as_flat()
            .par_chunks(dim)
            .enumerate()
            .map_init(
                || vec![0.0; dim],
                |offsets, (m, q)| {
                    offsets.fill(0.0);
                    self.search(q, hint(m), offsets)
                },
            )
            .collect()
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(contract(format!(
                "query dimension {dim} does not match index dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    fn search(&self, query: &[f64], hint: Option<usize>, offsets: &mut [f64]) -> usize {
        let (best, best_idx) = match hint {
            Some(h) => (self.metric.reduced(query, self.points.row(h)), h),
            None => (f64::INFINITY, usize::MAX),
        };
        let mut s = Search {
            index: self,
            query,
            offsets,
            best,
            best_idx,
        };
        s.visit(0, 0.0);
        s.best_idx
    }
}

impl Search<'_> {
    fn visit(&mut self, node: usize, bound: f64) {
        let index = self.index;
        match index.nodes[node] {
            Node::Leaf { start, end } => {
                let dim = index.points.dim();
                for slot in start as usize..end as usize {
                    let row = &index.ordered[slot * dim..(slot + 1) * dim];
                    if let Some(r) = index.metric.reduced_within(self.query, row, self.best) {
                        let orig = index.perm[slot] as usize;
                        if r < self.best || orig < self.best_idx {
                            self.best = r;
                            self.best_idx = orig;
                        }
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let d = dim as usize;
                let diff = self.query[d] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.visit(near as usize, bound);

                let old = self.offsets[d];
                let far_bound = match index.metric {
                    Metric::LInf => bound.max(diff.abs()),
                    m => bound - m.reduced_offset(old) + m.reduced_offset(diff),
                };
                // Slack absorbs rounding in the incremental update so that a
                // point exactly at the current best is never pruned.
                if far_bound * (1.0 - 1e-12) <= self.best {
                    self.offsets[d] = diff.abs();
                    self.visit(far as usize, far_bound);
                    self.offsets[d] = old;
                }
            }
        }
    }
}

fn build_node(points: &Points, perm: &mut [u32], start: usize, end: usize, nodes: &mut Vec<Node>) -> u32 {
    let id = nodes.len() as u32;
    let leaf = Node::Leaf {
        start: start as u32,
        end: end as u32,
    };
    if end - start <= LEAF_SIZE {
        nodes.push(leaf);
        return id;
    }

    let dim = points.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &i in &perm[start..end] {
        for (k, &v) in points.row(i as usize).iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let (split_dim, spread) = (0..dim)
        .map(|k| (k, hi[k] - lo[k]))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    if spread <= 0.0 {
        nodes.push(leaf);
        return id;
    }

    let mid = (end - start) / 2;
    perm[start..end].select_nth_unstable_by(mid, |&a, &b| {
        points.row(a as usize)[split_dim].total_cmp(&points.row(b as usize)[split_dim])
    });
    let value = points.row(perm[start + mid] as usize)[split_dim];

    nodes.push(Node::Split {
        dim: split_dim as u32,
        value,
        left: 0,
        right: 0,
    });
    let left = build_node(points, perm, start, start + mid, nodes);
    let right = build_node(points, perm, start + mid, end, nodes);
    nodes[id as usize] = Node::Split {
        dim: split_dim as u32,
        value,
        left,
        right,
    };
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Points {
        Points::from_flat(dim, (0..n * dim).map(|_| rng.random()).collect()).unwrap()
    }

    fn brute_force(points: &Points, metric: Metric, q: &[f64]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, row) in points.rows().enumerate() {
            let d = metric.dist(q, row);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    #[test]
    fn single_point_index_always_answers_zero() {
        let pts = Points::from_rows(&[[0.3, 0.9]]).unwrap();
        let idx = NnIndex::build(&pts, Metric::L2).unwrap();
        let q = Points::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.3, 0.9]]).unwrap();
        assert_eq!(idx.nearest_batch(&q).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn one_dimensional_example() {
        let pts = Points::from_rows(&[[0.2], [0.8]]).unwrap();
        let idx = NnIndex::build(&pts, Metric::L1).unwrap();
        assert_eq!(idx.nearest(&[0.4]).unwrap().0, 0);
    }

    #[test]
    fn design_points_map_to_themselves() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = random_points(&mut rng, 300, 4);
        for m in Metric::ALL {
            let idx = NnIndex::build(&pts, m).unwrap();
            let got = idx.nearest_batch(&pts).unwrap();
            assert_eq!(got, (0..300).collect::<Vec<_>>());
        }
    }

    #[test]
    fn ties_go_to_the_smallest_index() {
        // Duplicates and a query equidistant to two points.
        let pts = Points::from_rows(&[[0.5, 0.5], [0.25, 0.5], [0.75, 0.5], [0.25, 0.5]]).unwrap();
        for m in Metric::ALL {
            let idx = NnIndex::build(&pts, m).unwrap();
            assert_eq!(idx.nearest(&[0.25, 0.5]).unwrap().0, 1);
            assert_eq!(idx.nearest(&[0.375, 0.5]).unwrap().0, 0);
            let q = Points::from_rows(&[[0.25, 0.5]]).unwrap();
            assert_eq!(idx.nearest_batch_hinted(&q, &[3]).unwrap(), vec![1]);
        }
        // Many duplicates force degenerate (zero-spread) nodes.
        let dup = Points::from_flat(2, [0.25, 0.75].repeat(100)).unwrap();
        let idx = NnIndex::build(&dup, Metric::L2).unwrap();
        assert_eq!(idx.nearest(&[0.0, 0.0]).unwrap().0, 0);
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for &(n, dim) in &[(100usize, 10usize), (1000, 2), (257, 3), (60, 100)] {
            let pts = random_points(&mut rng, n, dim);
            let queries = random_points(&mut rng, 500, dim);
            for m in Metric::ALL {
                let idx = NnIndex::build(&pts, m).unwrap();
                let got = idx.nearest_batch(&queries).unwrap();
                let hints: Vec<usize> = (0..queries.len()).map(|_| rng.random_range(0..n)).collect();
                let hinted = idx.nearest_batch_hinted(&queries, &hints).unwrap();
                for (k, q) in queries.rows().enumerate() {
                    let (bi, bd) = brute_force(&pts, m, q);
                    assert_eq!(got[k], bi, "metric {m}, n={n}, dim={dim}");
                    assert_eq!(hinted[k], bi);
                    let (ni, nd) = idx.nearest(q).unwrap();
                    assert_eq!(ni, bi);
                    assert!((nd - bd).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn ownership_matches_nearest() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for &(n, dim) in &[(50usize, 2usize), (200, 10), (80, 60)] {
            let pts = random_points(&mut rng, n, dim);
            for m in Metric::ALL {
                let idx = NnIndex::build(&pts, m).unwrap();
                let owners: Vec<usize> = (0..400).map(|_| rng.random_range(0..n)).collect();
                // Queries scattered around their owners at a range of radii.
                let mut flat = Vec::new();
                for (k, &o) in owners.iter().enumerate() {
                    let scale = [0.01, 0.05, 0.2, 1.0][k % 4];
                    flat.extend(pts.row(o).iter().map(|v| v + scale * (rng.random::<f64>() - 0.5)));
                }
                let queries = Points::from_flat(dim, flat).unwrap();
                let table = idx.anchor_table(&owners).unwrap();
                let owned = idx.owned_batch(&queries, &owners, &table).unwrap();
                let nearest = idx.nearest_batch(&queries).unwrap();
                for k in 0..owners.len() {
                    assert_eq!(owned[k], nearest[k] == owners[k], "metric {m}, n={n}, dim={dim}");
                }
            }
        }
    }

    #[test]
    fn ownership_respects_ties() {
        let pts = Points::from_rows(&[[0.5, 0.5], [0.25, 0.5], [0.75, 0.5], [0.25, 0.5]]).unwrap();
        for m in Metric::ALL {
            let idx = NnIndex::build(&pts, m).unwrap();
            let table = idx.anchor_table(&[0, 1, 3]).unwrap();
            let q = Points::from_rows(&[[0.25, 0.5], [0.25, 0.5], [0.375, 0.5], [0.375, 0.5]]).unwrap();
            assert_eq!(idx.owned_batch(&q, &[1, 3, 0, 1], &table).unwrap(), vec![true, false, true, false]);
            assert!(idx.owned_batch(&q, &[2, 2, 2, 2], &table).is_err());
        }
    }

    #[test]
    fn narrowing_follows_a_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for &(n, dim) in &[(40usize, 2usize), (150, 5), (60, 40)] {
            let pts = random_points(&mut rng, n, dim);
            for m in Metric::ALL {
                let idx = NnIndex::build(&pts, m).unwrap();
                let owners: Vec<usize> = (0..200).map(|_| rng.random_range(0..n)).collect();
                let dirs = random_points(&mut rng, 200, dim);
                let table = idx.anchor_table(&owners).unwrap();
                let zero = vec![0.0; dim];
                let (mut lo, mut hi) = (vec![0.0; 200], vec![1.0; 200]);
                let mut lists: Vec<Competitors> = vec![None; 200];
                for _ in 0..25 {
                    let mut flat = Vec::new();
                    for k in 0..200 {
                        let t = 0.5 * (lo[k] + hi[k]);
                        let u = dirs.row(k);
                        flat.extend(pts.row(owners[k]).iter().zip(u).map(|(x, d)| x + t * (d - 0.5)));
                    }
                    let q = Points::from_flat(dim, flat).unwrap();
                    let reach: Vec<f64> = (0..200)
                        .map(|k| {
                            let u: Vec<f64> = dirs.row(k).iter().map(|d| d - 0.5).collect();
                            0.5 * (hi[k] - lo[k]) * m.dist(&u, &zero)
                        })
                        .collect();
                    let owned = idx.owned_batch_narrowing(&q, &owners, &reach, &mut lists, &table).unwrap();
                    let nearest = idx.nearest_batch(&q).unwrap();
                    for k in 0..200 {
                        assert_eq!(owned[k], nearest[k] == owners[k], "metric {m}, n={n}, dim={dim}");
                        let t = 0.5 * (lo[k] + hi[k]);
                        if owned[k] {
                            lo[k] = t;
                        } else {
                            hi[k] = t;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn counts_batched_calls() {
        let pts = Points::from_rows(&[[0.1], [0.6]]).unwrap();
        let idx = NnIndex::build(&pts, Metric::L2).unwrap();
        let q = Points::from_rows(&[[0.2], [0.5]]).unwrap();
        idx.nearest_batch(&q).unwrap();
        idx.nearest_batch_hinted(&q, &[1, 1]).unwrap();
        idx.nearest(&[0.3]).unwrap();
        assert_eq!(idx.batch_calls(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NnIndex::build(&Points::new(3), Metric::L2).is_err());
        let pts = Points::from_rows(&[[0.1, 0.2]]).unwrap();
        assert!(NnIndex::build(&Points::from_rows(&[[f64::NAN, 0.0]]).unwrap(), Metric::L2).is_err());
        let idx = NnIndex::build(&pts, Metric::L2).unwrap();
        assert!(idx.nearest_batch(&Points::from_rows(&[[0.1]]).unwrap()).is_err());
        assert!(idx
            .nearest_batch_hinted(&Points::from_rows(&[[0.1, 0.1]]).unwrap(), &[4])
            .is_err());
    }
}
