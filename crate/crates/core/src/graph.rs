//! Graph families used by the experiments: lattices, percolation bonds,
//! random geometric graphs, random regular graphs and trees.
//!
//! Graphs are stored in compressed adjacency form with every neighbor list
//! sorted. Grid and torus vertices are indexed row-major over their
//! coordinates (last coordinate varies fastest), so a vertex at
//! `(c_0, ..., c_{k-1})` on `dims` has index `((c_0 * dims[1] + c_1) * dims[2] + ...)`.

use std::collections::{HashSet, VecDeque};
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::stats::least_squares;

const REGULAR_MAX_RETRIES: usize = 1000;

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from undirected edges. Self-loops, out-of-range
    /// endpoints and repeated edges are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::Spec(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::Spec(format!("self-loop at vertex {u}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; offsets[n]];
        for &(u, v) in &edges {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..n {
            let adj = &mut neighbors[offsets[v]..offsets[v + 1]];
            adj.sort_unstable();
            if adj.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Spec(format!("repeated edge at vertex {v}")));
            }
        }
        Ok(Graph { offsets, neighbors })
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `Some(d)` if every vertex has degree `d`. The empty graph is not regular.
    pub fn regular_degree(&self) -> Option<usize> {
        if self.n() == 0 {
            return None;
        }
        let d = self.degree(0);
        (0..self.n()).all(|v| self.degree(v) == d).then_some(d)
    }

    /// Offset of `v`'s adjacency in the flattened half-edge array. The half-edge
    /// `v -> neighbors(v)[k]` has index `half_edge_offset(v) + k`.
    pub fn half_edge_offset(&self, v: usize) -> usize {
        self.offsets[v]
    }

    pub fn half_edge_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Undirected edges `(u, v)` with `u < v`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Verifies symmetry, absence of self-loops and duplicates, and index range.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n();
        for v in 0..n {
            let adj = self.neighbors(v);
            for (k, &w) in adj.iter().enumerate() {
                if w >= n {
                    return Err(Error::Spec(format!("neighbor {w} of {v} out of range")));
                }
                if w == v {
                    return Err(Error::Spec(format!("self-loop at {v}")));
                }
                if k > 0 && adj[k - 1] >= w {
                    return Err(Error::Spec(format!("adjacency of {v} not strictly sorted")));
                }
                if self.neighbors(w).binary_search(&v).is_err() {
                    return Err(Error::Spec(format!("edge {v}->{w} has no reverse")));
                }
            }
        }
        Ok(())
    }
}

/// Description of a graph to generate. Random families carry their seed.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Grid {
        dims: Vec<usize>,
    },
    Torus {
        dims: Vec<usize>,
    },
    /// Full grid on `dims` with each edge kept independently with probability `p`.
    PercolationBond {
        dims: Vec<usize>,
        p: f64,
        seed: u64,
    },
    /// `n` uniform points in `[0,1]^dim`, linked when strictly closer than `radius`.
    RandomGeometric {
        n: usize,
        dim: usize,
        radius: f64,
        seed: u64,
    },
    RandomRegular {
        n: usize,
        d: usize,
        seed: u64,
    },
    /// Uniform labeled tree on `n` vertices.
    RandomTree {
        n: usize,
        seed: u64,
    },
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
}

impl GraphSpec {
    pub fn family(&self) -> &'static str {
        match self {
            GraphSpec::Grid { .. } => "grid",
            GraphSpec::Torus { .. } => "torus",
            GraphSpec::PercolationBond { .. } => "percolation_bond",
            GraphSpec::RandomGeometric { .. } => "random_geometric",
            GraphSpec::RandomRegular { .. } => "random_regular",
            GraphSpec::RandomTree { .. } => "random_tree",
            GraphSpec::Path { .. } => "path",
            GraphSpec::Cycle { .. } => "cycle",
            GraphSpec::Complete { .. } => "complete",
        }
    }

    pub fn is_random(&self) -> bool {
        self.seed().is_some()
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            GraphSpec::PercolationBond { seed, .. }
            | GraphSpec::RandomGeometric { seed, .. }
            | GraphSpec::RandomRegular { seed, .. }
            | GraphSpec::RandomTree { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// Same spec with the seed replaced (no-op for deterministic families).
    pub fn with_seed(&self, new_seed: u64) -> GraphSpec {
        let mut spec = self.clone();
        match &mut spec {
            GraphSpec::PercolationBond { seed, .. }
            | GraphSpec::RandomGeometric { seed, .. }
            | GraphSpec::RandomRegular { seed, .. }
            | GraphSpec::RandomTree { seed, .. } => *seed = new_seed,
            _ => {}
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        let check_dims = |dims: &[usize]| {
            if dims.is_empty() || dims.contains(&0) {
                Err(Error::Spec(format!(
                    "dims must be non-empty and positive, got {dims:?}"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            GraphSpec::Grid { dims } | GraphSpec::Torus { dims } => check_dims(dims),
            GraphSpec::PercolationBond { dims, p, .. } => {
                check_dims(dims)?;
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Spec(format!(
                        "percolation p must lie in [0,1], got {p}"
                    )));
                }
                Ok(())
            }
            GraphSpec::RandomGeometric { dim, radius, .. } => {
                if *dim == 0 {
                    return Err(Error::Spec(
                        "random geometric dimension must be >= 1".into(),
                    ));
                }
                if !(*radius > 0.0) {
                    return Err(Error::Spec(format!("radius must be > 0, got {radius}")));
                }
                Ok(())
            }
            GraphSpec::RandomRegular { n, d, .. } => {
                if (n * d) % 2 != 0 {
                    return Err(Error::Spec(format!("n*d must be even (n={n}, d={d})")));
                }
                if d >= n {
                    return Err(Error::Spec(format!("degree {d} must be < n={n}")));
                }
                Ok(())
            }
            GraphSpec::Cycle { n } if *n < 3 => Err(Error::Spec(format!(
                "a cycle needs at least 3 vertices, got {n}"
            ))),
            _ => Ok(()),
        }
    }

    /// Builds the graph. Deterministic given the spec (including its seed).
    pub fn generate(&self) -> Result<Graph> {
        self.validate()?;
        match self {
            GraphSpec::Grid { dims } => {
                Graph::from_edges(product(dims), lattice_edges(dims, false))
            }
            GraphSpec::Torus { dims } => {
                Graph::from_edges(product(dims), lattice_edges(dims, true))
            }
            GraphSpec::PercolationBond { dims, p, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let kept: Vec<_> = lattice_edges(dims, false)
                    .into_iter()
                    .filter(|_| rng.random::<f64>() < *p)
                    .collect();
                Graph::from_edges(product(dims), kept)
            }
            GraphSpec::RandomGeometric {
                n,
                dim,
                radius,
                seed,
            } => random_geometric(*n, *dim, *radius, *seed),
            GraphSpec::RandomRegular { n, d, seed } => random_regular(*n, *d, *seed),
            GraphSpec::RandomTree { n, seed } => random_tree(*n, *seed),
            GraphSpec::Path { n } => Graph::from_edges(*n, (1..*n).map(|i| (i - 1, i))),
            GraphSpec::Cycle { n } => Graph::from_edges(*n, (0..*n).map(|i| (i, (i + 1) % n))),
            GraphSpec::Complete { n } => {
                Graph::from_edges(*n, (0..*n).flat_map(|u| (u + 1..*n).map(move |v| (u, v))))
            }
        }
    }
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn lattice_edges(dims: &[usize], wrap: bool) -> Vec<(usize, usize)> {
    let n = product(dims);
    let k = dims.len();
    let mut strides = vec![1usize; k];
    for axis in (0..k.saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * dims[axis + 1];
    }
    let mut edges = Vec::new();
    for v in 0..n {
        for axis in 0..k {
            let c = (v / strides[axis]) % dims[axis];
            let side = dims[axis];
            if c + 1 < side {
                edges.push((v, v + strides[axis]));
            } else if wrap && side >= 3 {
                // c == side - 1: link back to coordinate 0 along this axis
                edges.push((v - c * strides[axis], v));
            }
        }
    }
    edges
}

fn random_geometric(n: usize, dim: usize, radius: f64, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<f64> = (0..n * dim).map(|_| rng.random::<f64>()).collect();
    let point = |i: usize| &points[i * dim..(i + 1) * dim];

    // Bucket points into cells of side >= radius; only neighboring cells can hold links.
    let cells_per_axis = ((1.0 / radius).floor() as usize).clamp(1, 1 << 10);
    let cells_per_axis = if cells_per_axis
        .checked_pow(dim as u32)
        .is_none_or(|c| c > 4 * n.max(1))
    {
        ((4 * n.max(1)) as f64)
            .powf(1.0 / dim as f64)
            .floor()
            .max(1.0) as usize
    } else {
        cells_per_axis
    };
    let cell_coord = |x: f64| ((x * cells_per_axis as f64) as usize).min(cells_per_axis - 1);
    let cell_index = |coords: &[usize]| {
        coords
            .iter()
            .fold(0usize, |acc, &c| acc * cells_per_axis + c)
    };
    let total_cells = cells_per_axis.pow(dim as u32);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); total_cells];
    for i in 0..n {
        let coords: Vec<usize> = point(i).iter().map(|&x| cell_coord(x)).collect();
        buckets[cell_index(&coords)].push(i);
    }

    let r2 = radius * radius;
    let offsets_count = 3usize.pow(dim as u32);
    let mut edges = Vec::new();
    let mut coords = vec![0usize; dim];
    let mut other = vec![0usize; dim];
    for i in 0..n {
        for (c, &x) in coords.iter_mut().zip(point(i)) {
            *c = cell_coord(x);
        }
        'offsets: for code in 0..offsets_count {
            let mut rem = code;
            for axis in 0..dim {
                let delta = (rem % 3) as isize - 1;
                rem /= 3;
                let c = coords[axis] as isize + delta;
                if c < 0 || c >= cells_per_axis as isize {
                    continue 'offsets;
                }
                other[axis] = c as usize;
            }
            for &j in &buckets[cell_index(&other)] {
                if j <= i {
                    continue;
                }
                let d2: f64 = point(i)
                    .iter()
                    .zip(point(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d2 < r2 {
                    edges.push((i, j));
                }
            }
        }
    }
    // A small cell grid can visit the same neighboring cell twice (cells_per_axis < 3).
    edges.sort_unstable();
    edges.dedup();
    Graph::from_edges(n, edges)
}

fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..REGULAR_MAX_RETRIES {
        stubs.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(stubs.len() / 2);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Graph::from_edges(n, edges);
    }
    Err(Error::Spec(format!(
        "no simple {d}-regular pairing on {n} vertices after {REGULAR_MAX_RETRIES} attempts"
    )))
}

fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    match n {
        0 | 1 => return Graph::from_edges(n, std::iter::empty()),
        2 => return Graph::from_edges(2, [(0, 1)]),
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("Prüfer decoding always has a leaf");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(std::cmp::Reverse(c));
        }
    }
    let std::cmp::Reverse(u) = leaves.pop().unwrap();
    let std::cmp::Reverse(v) = leaves.pop().unwrap();
    edges.push((u, v));
    Graph::from_edges(n, edges)
}

/// Induced subgraph on one connected component, with index maps both ways.
#[derive(Debug, Clone)]
pub struct Component {
    pub graph: Graph,
    /// `old_to_new[v]` is the new index of original vertex `v`, if kept.
    pub old_to_new: Vec<Option<usize>>,
    /// `new_to_old[i]` is the original index of new vertex `i` (increasing).
    pub new_to_old: Vec<usize>,
}

/// Largest connected component. Ties go to the component containing the
/// smallest original vertex index. New indices preserve the original order.
pub fn largest_component(g: &Graph) -> Component {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut best: Option<(usize, usize)> = None; // (label, size)
    let mut queue = VecDeque::new();
    let mut next_label = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next_label;
        queue.push_back(s);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = next_label;
                    queue.push_back(w);
                }
            }
        }
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((next_label, size));
        }
        next_label += 1;
    }
    let Some((keep, _)) = best else {
        return Component {
            graph: g.clone(),
            old_to_new: Vec::new(),
            new_to_old: Vec::new(),
        };
    };
    let new_to_old: Vec<usize> = (0..n).filter(|&v| label[v] == keep).collect();
    let mut old_to_new = vec![None; n];
    for (i, &v) in new_to_old.iter().enumerate() {
        old_to_new[v] = Some(i);
    }
    let edges = g
        .edges()
        .filter_map(|(u, v)| Some((old_to_new[u]?, old_to_new[v]?)));
    let graph = Graph::from_edges(new_to_old.len(), edges)
        .expect("induced subgraph of a simple graph is simple");
    Component {
        graph,
        old_to_new,
        new_to_old,
    }
}

/// Shortest-path distances from `source`; `usize::MAX` marks unreachable
/// vertices and vertices beyond `max_depth`.
pub fn bfs_distances(g: &Graph, source: usize, max_depth: Option<usize>) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        if max_depth.is_some_and(|m| dist[v] >= m) {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Largest finite distance from `v`.
pub fn eccentricity(g: &Graph, v: usize) -> usize {
    bfs_distances(g, v, None)
        .into_iter()
        .filter(|&d| d != usize::MAX)
        .max()
        .unwrap_or(0)
}

/// Ball sizes `|B_t(v)|` and BFS layers (vertices at distance exactly `t`)
/// for `t = 0..=t_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Balls {
    pub sizes: Vec<usize>,
    pub layers: Vec<Vec<usize>>,
}

pub fn balls(g: &Graph, v: usize, t_max: usize) -> Balls {
    let dist = bfs_distances(g, v, Some(t_max));
    let mut layers = vec![Vec::new(); t_max + 1];
    for (w, &d) in dist.iter().enumerate() {
        if d <= t_max {
            layers[d].push(w);
        }
    }
    let mut sizes = Vec::with_capacity(t_max + 1);
    let mut total = 0;
    for layer in &layers {
        total += layer.len();
        sizes.push(total);
    }
    Balls { sizes, layers }
}

/// Growth exponent of `|B_t(v)|`: least-squares slope of `ln |B_t|` against
/// `ln t` over `t_lo..=t_hi`, keeping only radii with `t >= 1` and
/// `|B_t| < n/2`.
pub fn hausdorff_estimate(g: &Graph, v: usize, t_lo: usize, t_hi: usize) -> Result<f64> {
    let b = balls(g, v, t_hi);
    let half = 0.5 * g.n() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (t_lo.max(1)..=t_hi)
        .filter(|&t| (b.sizes[t] as f64) < half)
        .map(|t| ((t as f64).ln(), (b.sizes[t] as f64).ln()))
        .unzip();
    least_squares(&xs, &ys).map(|f| f.slope).ok_or_else(|| {
        Error::Estimation(format!(
            "no usable radii in [{t_lo}, {t_hi}] below half the graph ({} points)",
            xs.len()
        ))
    })
}

/// Writes `n m` followed by one `u v` line per edge (`u < v`).
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.n(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines();
    let parse_pair = |line: &str, what: &str| -> Result<(usize, usize)> {
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
            _ => Err(Error::Parse(format!("malformed {what} line: {line:?}"))),
        }
    };
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let (n, m) = parse_pair(&header, "header")?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        edges.push(parse_pair(&line, "edge")?);
    }
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header announces {m} edges, found {}",
            edges.len()
        )));
    }
    Graph::from_edges(n, edges)
}

pub fn save_edge_list(g: &Graph, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut out = std::io::BufWriter::new(file);
    write_edge_list(g, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn load_edge_list(path: &Path) -> Result<Graph> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_edge_list(std::io::BufReader::new(file))
}
