//! Random geometric graphs: construction on a spatial cell grid, adjacency
//! queries and connected components.

use std::collections::HashSet;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, BoundaryMode, Point};
use crate::unionfind::UnionFind;

/// An added long-range link between `u < v`, with its length at construction time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongLink {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// Compressed sorted adjacency lists.
#[derive(Debug, Clone, Default, PartialEq)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    fn from_edges(n: usize, edges: impl Iterator<Item = (usize, usize)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (u, v) in edges.clone() {
            offsets[u + 1] += 1;
            offsets[v + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for (u, v) in edges {
            targets[cursor[u]] = v as u32;
            cursor[u] += 1;
            targets[cursor[v]] = u as u32;
            cursor[v] += 1;
        }
        for i in 0..n {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Adjacency { offsets, targets }
    }

    #[inline]
    fn row(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// A sensor network: node positions, range-`R` local links and optional
/// long-range links. Immutable once built; [`crate::smallworld`] returns
/// a new augmented copy.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    side: f64,
    boundary: BoundaryMode,
    range: f64,
    positions: Vec<Point>,
    local: Adjacency,
    long: Adjacency,
    long_links: Vec<LongLink>,
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Point {
        self.positions[v]
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        geom::distance(self.positions[u], self.positions[v], self.side, self.boundary)
    }

    /// Sorted local (range-`R`) neighbors of `v`.
    pub fn local_neighbors(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.local.row(v).iter().map(|&u| u as usize)
    }

    /// Sorted long-range neighbors of `v`.
    pub fn long_neighbors(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.long.row(v).iter().map(|&u| u as usize)
    }

    /// All neighbors of `v`, local first.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.local_neighbors(v).chain(self.long_neighbors(v))
    }

    #[inline]
    pub(crate) fn neighbor_slices(&self, v: usize) -> (&[u32], &[u32]) {
        (self.local.row(v), self.long.row(v))
    }

    /// Degree over local and long-range links.
    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.local_degree(v) + self.long.row(v).len()
    }

    #[inline]
    pub fn local_degree(&self, v: usize) -> usize {
        self.local.offsets[v + 1] - self.local.offsets[v]
    }

    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        self.local.row(u).binary_search(&(v as u32)).is_ok()
            || self.long.row(u).binary_search(&(v as u32)).is_ok()
    }

    /// Number of local links, `K_local`.
    pub fn local_edge_count(&self) -> usize {
        self.local.targets.len() / 2
    }

    pub fn long_links(&self) -> &[LongLink] {
        &self.long_links
    }

    /// Local links as `(u, v)` with `u < v`, in ascending order.
    pub fn local_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count())
            .flat_map(move |u| self.local_neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Empirical mean local degree, `2 K_local / N`.
    pub fn mean_local_degree(&self) -> f64 {
        2.0 * self.local_edge_count() as f64 / self.node_count() as f64
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Copy of this network with `extra` long-range links appended.
    pub(crate) fn with_long_links(&self, extra: Vec<LongLink>) -> Network {
        let mut links = self.long_links.clone();
        links.extend(extra);
        let long = Adjacency::from_edges(self.node_count(), links.iter().map(|l| (l.u, l.v)));
        Network {
            long,
            long_links: links,
            ..self.clone()
        }
    }

    /// Assembles a network from explicit parts, validating every edge.
    pub fn from_parts(
        positions: Vec<Point>,
        side: f64,
        boundary: BoundaryMode,
        range: f64,
        local_edges: &[(usize, usize)],
        long_links: &[LongLink],
    ) -> Result<Network> {
        geom::check_side(side)?;
        let n = positions.len();
        if n == 0 {
            return Err(Error::invalid("n_nodes", "need at least one node"));
        }
        let mut seen = HashSet::with_capacity(local_edges.len() + long_links.len());
        let mut check = |u: usize, v: usize| -> Result<(usize, usize)> {
            if u >= n || v >= n {
                return Err(Error::invalid("edge", format!("({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                return Err(Error::invalid("edge", format!("self-loop at {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::invalid("edge", format!("duplicate edge ({u}, {v})")));
            }
            Ok(key)
        };
        let local: Vec<_> = local_edges
            .iter()
            .map(|&(u, v)| check(u, v))
            .collect::<Result<_>>()?;
        let long_links: Vec<_> = long_links
            .iter()
            .map(|l| {
                let (u, v) = check(l.u, l.v)?;
                Ok(LongLink { u, v, length: l.length })
            })
            .collect::<Result<_>>()?;
        Ok(Network {
            side,
            boundary,
            range,
            local: Adjacency::from_edges(n, local.iter().copied()),
            long: Adjacency::from_edges(n, long_links.iter().map(|l| (l.u, l.v))),
            long_links,
            positions,
        })
    }

    /// Pure topology with `n` nodes stacked at the origin. Handy for small
    /// hand-built cascade examples.
    pub fn from_topology(n: usize, edges: &[(usize, usize)]) -> Result<Network> {
        Network::from_parts(
            vec![Point::new(0.0, 0.0); n],
            1.0,
            BoundaryMode::Planar,
            1.0,
            edges,
            &[],
        )
    }
}

/// Uniform grid of square cells, each of side at least the radio range.
struct CellGrid {
    per_axis: usize,
    cell: f64,
    cells: Vec<Vec<u32>>,
}

impl CellGrid {
    fn new(points: &[Point], side: f64, range: f64) -> Self {
        // Cap the grid at ~sqrt(N) cells per axis; tiny ranges would
        // otherwise allocate absurd numbers of empty cells.
        let cap = ((points.len() as f64).sqrt().ceil() as usize).max(1);
        let per_axis = ((side / range).floor() as usize).clamp(1, cap);
        let cell = side / per_axis as f64;
        let mut cells = vec![Vec::new(); per_axis * per_axis];
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = (Self::coord(p.x, cell, per_axis), Self::coord(p.y, cell, per_axis));
            cells[cy * per_axis + cx].push(i as u32);
        }
        CellGrid { per_axis, cell, cells }
    }

    fn coord(v: f64, cell: f64, per_axis: usize) -> usize {
        ((v / cell) as usize).min(per_axis - 1)
    }

    /// Indices of the (up to nine) cells around the cell containing `p`.
    fn around(&self, p: Point, boundary: BoundaryMode, out: &mut Vec<usize>) {
        out.clear();
        let m = self.per_axis as isize;
        let cx = Self::coord(p.x, self.cell, self.per_axis) as isize;
        let cy = Self::coord(p.y, self.cell, self.per_axis) as isize;
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (mut x, mut y) = (cx + dx, cy + dy);
                match boundary {
                    BoundaryMode::Torus => {
                        x = x.rem_euclid(m);
                        y = y.rem_euclid(m);
                    }
                    BoundaryMode::Planar => {
                        if x < 0 || y < 0 || x >= m || y >= m {
                            continue;
                        }
                    }
                }
                out.push((y * m + x) as usize);
            }
        }
        // With fewer than three cells per axis the wrapped offsets coincide.
        out.sort_unstable();
        out.dedup();
    }
}

/// Connects every pair of points within distance `range` (inclusive).
///
/// Points are bucketed on a cell grid whose cell side is at least `range`,
/// so only the 3x3 block of cells around each point has to be scanned and
/// the expected cost is `O(N * alpha)`.
pub fn build_rgg(points: Vec<Point>, range: f64, side: f64, boundary: BoundaryMode) -> Result<Network> {
    geom::check_side(side)?;
    if points.is_empty() {
        return Err(Error::invalid("n_nodes", "need at least one node"));
    }
    if let Some(p) = points.iter().find(|p| !p.is_inside(side)) {
        return Err(Error::invalid(
            "points",
            format!("({}, {}) lies outside [0, {side})^2", p.x, p.y),
        ));
    }
    if range.is_nan() {
        return Err(Error::invalid("R", "radio range is NaN"));
    }
    let n = points.len();
    let mut edges = Vec::new();
    if range > 0.0 {
        if boundary == BoundaryMode::Torus && range > side / 2.0 {
            warn!("radio range {range} exceeds half the torus side {side}; links use the minimum image");
        }
        let r2 = range * range;
        let grid = CellGrid::new(&points, side, range);
        let mut around = Vec::with_capacity(9);
        for (i, &p) in points.iter().enumerate() {
            grid.around(p, boundary, &mut around);
            for &c in &around {
                for &j in &grid.cells[c] {
                    let j = j as usize;
                    if j > i && geom::distance_sq(p, points[j], side, boundary) <= r2 {
                        edges.push((i, j));
                    }
                }
            }
        }
    }
    let local = Adjacency::from_edges(n, edges.iter().copied());
    Ok(Network {
        side,
        boundary,
        range: range.max(0.0),
        long: Adjacency::from_edges(n, std::iter::empty()),
        long_links: Vec::new(),
        local,
        positions: points,
    })
}

/// Connected-component labels. Component `0` contains node `0`; labels
/// are assigned in order of each component's smallest node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub component_id: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ComponentLabeling {
    pub fn largest(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }
}

/// Components over the union of local and long-range links.
pub fn components(net: &Network) -> ComponentLabeling {
    let n = net.node_count();
    let mut uf = UnionFind::new(n);
    for (u, v) in net.local_edges() {
        uf.union(u, v);
    }
    for l in net.long_links() {
        uf.union(l.u, l.v);
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut component_id = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    for v in 0..n {
        let root = uf.find(v);
        if label_of_root[root] == usize::MAX {
            label_of_root[root] = sizes.len();
            sizes.push(0);
        }
        let label = label_of_root[root];
        sizes[label] += 1;
        component_id.push(label);
    }
    ComponentLabeling { component_id, sizes }
}

/// Fraction of the `n` nodes in the largest component.
pub fn giant_fraction(labeling: &ComponentLabeling, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "node count must be positive"));
    }
    let total: usize = labeling.sizes.iter().sum();
    if total != n {
        return Err(Error::invalid(
            "n",
            format!("labeling covers {total} nodes, expected {n}"),
        ));
    }
    Ok(labeling.largest() as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{expected_degree, sample_points, Density};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, VecDeque};

    fn brute_force_edges(points: &[Point], range: f64, side: f64, b: BoundaryMode) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if geom::distance(points[i], points[j], side, b) <= range {
                    out.insert((i, j));
                }
            }
        }
        out
    }

    fn bfs_component_sizes(net: &Network) -> Vec<usize> {
        let n = net.node_count();
        let mut seen = vec![false; n];
        let mut sizes = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for v in net.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        sizes
    }

    #[test]
    fn pair_inside_and_outside_range() {
        let r = 10.0;
        let near = vec![Point::new(100.0, 100.0), Point::new(105.0, 100.0)];
        let net = build_rgg(near, r, 1000.0, BoundaryMode::Torus).unwrap();
        assert_eq!(net.local_edge_count(), 1);
        assert!(net.are_adjacent(0, 1) && net.are_adjacent(1, 0));

        let far = vec![Point::new(100.0, 100.0), Point::new(110.1, 100.0)];
        let net = build_rgg(far, r, 1000.0, BoundaryMode::Torus).unwrap();
        assert_eq!(net.local_edge_count(), 0);
    }

    #[test]
    fn edges_wrap_on_torus_only() {
        let pts = vec![Point::new(1.0, 500.0), Point::new(998.0, 500.0)];
        let torus = build_rgg(pts.clone(), 5.0, 1000.0, BoundaryMode::Torus).unwrap();
        let planar = build_rgg(pts, 5.0, 1000.0, BoundaryMode::Planar).unwrap();
        assert_eq!(torus.local_edge_count(), 1);
        assert_eq!(planar.local_edge_count(), 0);
    }

    #[test]
    fn non_positive_range_gives_no_edges() {
        let pts = vec![Point::new(1.0, 1.0); 3];
        assert_eq!(build_rgg(pts.clone(), 0.0, 10.0, BoundaryMode::Torus).unwrap().local_edge_count(), 0);
        assert_eq!(build_rgg(pts, -2.0, 10.0, BoundaryMode::Torus).unwrap().local_edge_count(), 0);
    }

    #[test]
    fn huge_range_on_small_torus_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = sample_points(30, 10.0, &mut rng).unwrap();
        let net = build_rgg(pts, 8.0, 10.0, BoundaryMode::Torus).unwrap();
        assert_eq!(net.local_edge_count(), 30 * 29 / 2);
    }

    #[test]
    fn points_outside_square_rejected() {
        let pts = vec![Point::new(10.0, 1.0)];
        assert!(build_rgg(pts, 1.0, 10.0, BoundaryMode::Torus).is_err());
    }

    #[test]
    fn grid_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let n = 2 + trial * 12;
            let side = 100.0;
            let range = 2.0 + (trial as f64) * 1.7;
            for b in [BoundaryMode::Torus, BoundaryMode::Planar] {
                let pts = sample_points(n, side, &mut rng).unwrap();
                let expect = brute_force_edges(&pts, range, side, b);
                let net = build_rgg(pts, range, side, b).unwrap();
                let got: BTreeSet<_> = net.local_edges().collect();
                assert_eq!(got, expect, "n={n} R={range} {b}");
            }
        }
    }

    #[test]
    fn mean_degree_matches_area_law() {
        let rho = Density::new(0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let reps = 20;
        let mean: f64 = (0..reps)
            .map(|_| {
                let pts = sample_points(10_000, 1000.0, &mut rng).unwrap();
                build_rgg(pts, 12.5, 1000.0, BoundaryMode::Torus).unwrap().mean_local_degree()
            })
            .sum::<f64>()
            / reps as f64;
        let alpha = expected_degree(rho, 12.5).unwrap();
        assert!((mean - alpha).abs() / alpha < 0.02, "mean degree {mean} vs {alpha}");
    }

    #[test]
    fn component_examples() {
        let empty = Network::from_topology(5, &[]).unwrap();
        let lab = components(&empty);
        assert_eq!(lab.sizes, vec![1; 5]);

        let tri = Network::from_topology(4, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let lab = components(&tri);
        assert_eq!(lab.sizes, vec![3, 1]);
        assert_eq!(lab.component_id, vec![0, 0, 0, 1]);
        assert_eq!(giant_fraction(&lab, 4).unwrap(), 0.75);
    }

    #[test]
    fn labels_follow_smallest_member() {
        let net = Network::from_topology(5, &[(3, 4), (1, 2)]).unwrap();
        let lab = components(&net);
        assert_eq!(lab.component_id, vec![0, 1, 1, 2, 2]);
        assert_eq!(lab.sizes, vec![1, 2, 2]);
    }

    #[test]
    fn components_include_long_links() {
        let net = Network::from_topology(4, &[(0, 1), (2, 3)]).unwrap();
        let joined = net.with_long_links(vec![LongLink { u: 1, v: 2, length: 3.0 }]);
        assert_eq!(components(&net).len(), 2);
        assert_eq!(components(&joined).sizes, vec![4]);
    }

    #[test]
    fn giant_fraction_examples() {
        let lab = |sizes: Vec<usize>| ComponentLabeling { component_id: vec![], sizes };
        assert_eq!(giant_fraction(&lab(vec![7]), 7).unwrap(), 1.0);
        assert_eq!(giant_fraction(&lab(vec![50, 30, 20]), 100).unwrap(), 0.5);
        assert!(giant_fraction(&lab(vec![]), 0).is_err());
        assert!(giant_fraction(&lab(vec![3]), 4).is_err());
    }

    #[test]
    fn supercritical_graph_has_giant_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let runs = 100;
        let mut good = 0;
        for _ in 0..runs {
            let pts = sample_points(10_000, 1000.0, &mut rng).unwrap();
            let net = build_rgg(pts, 16.0, 1000.0, BoundaryMode::Torus).unwrap();
            let lab = components(&net);
            let mut bfs = bfs_component_sizes(&net);
            let mut uf = lab.sizes.clone();
            bfs.sort_unstable();
            uf.sort_unstable();
            assert_eq!(bfs, uf);
            if lab.largest() as f64 >= 0.95 * 10_000.0 {
                good += 1;
            }
        }
        assert!(good >= 95, "{good} of {runs} realizations had a 95% giant component");
    }

    #[test]
    fn from_parts_rejects_bad_edges() {
        assert!(Network::from_topology(3, &[(0, 0)]).is_err());
        assert!(Network::from_topology(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Network::from_topology(3, &[(0, 3)]).is_err());
        let dup_long = Network::from_parts(
            vec![Point::new(0.0, 0.0); 3],
            1.0,
            BoundaryMode::Planar,
            1.0,
            &[(0, 1)],
            &[LongLink { u: 1, v: 0, length: 0.0 }],
        );
        assert!(dup_long.is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn permutation_invariant(seed in any::<u64>(), range in 1.0f64..30.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = sample_points(200, 100.0, &mut rng).unwrap();
            let mut shuffled = pts.clone();
            shuffled.shuffle(&mut rng);
            let key = |net: &Network| -> BTreeSet<((u64, u64), (u64, u64))> {
                net.local_edges().map(|(u, v)| {
                    let a = (net.position(u).x.to_bits(), net.position(u).y.to_bits());
                    let b = (net.position(v).x.to_bits(), net.position(v).y.to_bits());
                    (a.min(b), a.max(b))
                }).collect()
            };
            let a = build_rgg(pts, range, 100.0, BoundaryMode::Torus).unwrap();
            let b = build_rgg(shuffled, range, 100.0, BoundaryMode::Torus).unwrap();
            prop_assert_eq!(key(&a), key(&b));
        }

        #[test]
        fn adjacency_is_symmetric_and_simple(seed in any::<u64>(), range in 0.5f64..25.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = sample_points(150, 100.0, &mut rng).unwrap();
            let net = build_rgg(pts, range, 100.0, BoundaryMode::Planar).unwrap();
            let mut total = 0;
            for u in 0..net.node_count() {
                let row: Vec<_> = net.local_neighbors(u).collect();
                prop_assert!(row.windows(2).all(|w| w[0] < w[1]));
                for &v in &row {
                    prop_assert!(v != u);
                    prop_assert!(net.are_adjacent(v, u));
                    prop_assert!(net.distance(u, v) <= range);
                }
                total += row.len();
            }
            prop_assert_eq!(total, 2 * net.local_edge_count());
            prop_assert!((net.mean_local_degree() - total as f64 / 150.0).abs() < 1e-12);
        }
    }
}
