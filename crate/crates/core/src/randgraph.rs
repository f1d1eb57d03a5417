//! Sparse Erdős–Rényi graphs with Weibull edge weights, and the structural
//! statistics the large-deviation arguments are phrased in: degree profiles,
//! connected components with tree excess and clique number, and star
//! decompositions.

use std::collections::{BTreeMap, BinaryHeap};
use std::cmp::Reverse;
use std::fmt::Write as _;

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{self, WeibullSpec};
use crate::error::{domain, Error, Result};
use crate::scale::Scale;

/// Default recursion-node budget for exact clique search, per component.
pub const CLIQUE_BUDGET: u64 = 1_000_000;

/// Simple undirected graph on `0..n` as a sorted edge list of pairs `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from arbitrary undirected pairs. Pairs are normalized to
    /// `i < j` and sorted; self-loops, duplicates and out-of-range endpoints are
    /// rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(i, j)| if i < j { (i, j) } else { (j, i) })
            .collect();
        edges.sort_unstable();
        Self::check(n, &edges)?;
        Ok(Self { n, edges })
    }

    fn check(n: usize, edges: &[(usize, usize)]) -> Result<()> {
        for (idx, &(i, j)) in edges.iter().enumerate() {
            if i == j {
                return domain(format!("self-loop at vertex {i}"));
            }
            if j >= n {
                return domain(format!("edge ({i}, {j}) out of range for n = {n}"));
            }
            if idx > 0 && edges[idx - 1] >= (i, j) {
                return domain(format!("duplicate or unsorted edge ({i}, {j})"));
            }
        }
        Ok(())
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// A graph with one real weight per edge: the symmetric matrix `Z` with
/// `Z_ij = Z_ji = w` on edges and zero elsewhere, including the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<f64>) -> Result<Self> {
        if graph.edge_count() != weights.len() {
            return domain(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edge_count()
            ));
        }
        Ok(Self { graph, weights })
    }

    /// Builds from `(i, j, w)` triples in any order.
    pub fn from_triples(n: usize, triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut t: Vec<(usize, usize, f64)> = triples
            .into_iter()
            .map(|(i, j, w)| if i < j { (i, j, w) } else { (j, i, w) })
            .collect();
        t.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let edges: Vec<(usize, usize)> = t.iter().map(|&(i, j, _)| (i, j)).collect();
        Graph::check(n, &edges)?;
        Ok(Self {
            graph: Graph { n, edges },
            weights: t.into_iter().map(|(_, _, w)| w).collect(),
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            graph: Graph::empty(n),
            weights: Vec::new(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.graph
            .edges
            .iter()
            .zip(&self.weights)
            .map(|(&(i, j), &w)| (i, j, w))
    }

    /// Multiplies every weight by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            graph: self.graph.clone(),
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }

    /// Dense symmetric matrix, row major.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut a = vec![vec![0.0; n]; n];
        for (i, j, w) in self.triples() {
            a[i][j] = w;
            a[j][i] = w;
        }
        a
    }
}

/// Samples `G(n, d/n)`.
///
/// Walks the `C(n, 2)` pairs in lexicographic order, jumping over absent
/// pairs with geometric skips, so the cost is proportional to the number of
/// edges rather than pairs.
pub fn sample_er<R: Rng + ?Sized>(n: usize, d: f64, rng: &mut R) -> Result<Graph> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    if !(d > 0.0 && d <= n as f64) {
        return domain(format!("need 0 < d <= n, got d = {d}, n = {n}"));
    }
    let p = d / n as f64;
    let total = (n as u64) * (n as u64 - 1) / 2;
    let mut edges = Vec::with_capacity((p * total as f64 * 1.1) as usize + 16);
    if p >= 1.0 {
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        return Ok(Graph { n, edges });
    }
    let log_q = (-p).ln_1p();
    // `pos` is the linear index of the pair `(row, col)` in lexicographic order.
    let (mut pos, mut row, mut col) = (0u64, 0usize, 1usize);
    let advance = |row: &mut usize, col: &mut usize, mut k: u64| {
        while k > 0 {
            let left = (n - 1 - *col) as u64;
            if k <= left {
                *col += k as usize;
                k = 0;
            } else {
                k -= left + 1;
                *row += 1;
                *col = *row + 1;
            }
        }
    };
    loop {
        let u: f64 = rng.sample(Open01);
        let skip = (u.ln() / log_q).floor();
        if !(skip < (total - pos) as f64) {
            break;
        }
        let skip = skip as u64;
        advance(&mut row, &mut col, skip);
        pos += skip;
        edges.push((row, col));
        pos += 1;
        if pos >= total {
            break;
        }
        advance(&mut row, &mut col, 1);
    }
    Ok(Graph { n, edges })
}

/// Attaches i.i.d. weights drawn from a canonical spec, one per edge in edge order.
pub fn attach_weights<R: Rng + ?Sized>(g: &Graph, spec: &WeibullSpec, rng: &mut R) -> Result<WeightedGraph> {
    let weights = (0..g.edge_count())
        .map(|_| distributions::sample(spec, rng))
        .collect::<Result<Vec<_>>>()?;
    WeightedGraph::new(g.clone(), weights)
}

/// Splits edges into `|w| > threshold` (high) and the rest (low).
pub fn split_by_threshold(z: &WeightedGraph, threshold: f64) -> (WeightedGraph, WeightedGraph) {
    let n = z.n();
    let (mut hi_e, mut hi_w, mut lo_e, mut lo_w) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, j, w) in z.triples() {
        if w.abs() > threshold {
            hi_e.push((i, j));
            hi_w.push(w);
        } else {
            lo_e.push((i, j));
            lo_w.push(w);
        }
    }
    (
        WeightedGraph {
            graph: Graph { n, edges: hi_e },
            weights: hi_w,
        },
        WeightedGraph {
            graph: Graph { n, edges: lo_e },
            weights: lo_w,
        },
    )
}

/// Degree threshold `g(gamma) = ceil(gamma log n / log log n)`.
pub fn g_of_gamma(gamma: f64, scale: Scale) -> Result<usize> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return domain(format!("gamma must be finite and >= 0, got {gamma}"));
    }
    Ok((gamma * scale.t_n()).ceil() as usize)
}

/// Default gamma grid `0, 0.1, ..., 1.5`.
pub fn default_gamma_grid() -> Vec<f64> {
    (0..=15).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeLevel {
    pub gamma: f64,
    pub threshold: usize,
    /// `|D_gamma|`: vertices of degree at least `threshold`.
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentStats {
    /// Smallest vertex index in the component.
    pub root: usize,
    pub size: usize,
    pub edge_count: usize,
    /// `|E| - |V|`; `-1` exactly for trees.
    pub tree_excess: i64,
    pub max_clique: usize,
    /// False when the clique search ran out of budget and `max_clique` is only a lower bound.
    pub clique_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub n: usize,
    pub degree_counts: BTreeMap<usize, usize>,
    pub d_gamma: Vec<DegreeLevel>,
    pub components: Vec<ComponentStats>,
    pub max_degree: usize,
}

impl StructureReport {
    pub fn all_trees(&self) -> bool {
        self.components.iter().all(|c| c.tree_excess == -1)
    }

    pub fn largest_component(&self) -> usize {
        self.components.iter().map(|c| c.size).max().unwrap_or(0)
    }

    pub fn max_clique(&self) -> usize {
        self.components.iter().map(|c| c.max_clique).max().unwrap_or(0)
    }
}

pub fn structure_report(g: &Graph, gammas: &[f64]) -> Result<StructureReport> {
    structure_report_with_budget(g, gammas, CLIQUE_BUDGET)
}

pub fn structure_report_with_budget(g: &Graph, gammas: &[f64], budget: u64) -> Result<StructureReport> {
    let degrees = g.degrees();
    let mut degree_counts = BTreeMap::new();
    for &d in &degrees {
        *degree_counts.entry(d).or_insert(0) += 1;
    }
    let d_gamma = if gammas.is_empty() {
        Vec::new()
    } else {
        let scale = Scale::from_n(g.n as f64)?;
        gammas
            .iter()
            .map(|&gamma| {
                let threshold = g_of_gamma(gamma, scale)?;
                let count = degrees.iter().filter(|&&d| d >= threshold).count();
                Ok(DegreeLevel {
                    gamma,
                    threshold,
                    count,
                })
            })
            .collect::<Result<Vec<_>>>()?
    };

    let adj = g.adjacency();
    let mut dsu = DisjointSets::new(g.n);
    for &(i, j) in &g.edges {
        dsu.union(i, j);
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..g.n {
        members.entry(dsu.find(v)).or_default().push(v);
    }
    let mut edge_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &(i, _) in &g.edges {
        *edge_counts.entry(dsu.find(i)).or_insert(0) += 1;
    }
    let mut components: Vec<ComponentStats> = members
        .iter()
        .map(|(rep, verts)| {
            let edge_count = edge_counts.get(rep).copied().unwrap_or(0);
            let (max_clique, clique_exact) = if edge_count == 0 {
                (1, true)
            } else if edge_count + 1 == verts.len() {
                // trees are triangle free
                (2, true)
            } else {
                component_max_clique(&adj, verts, budget)
            };
            ComponentStats {
                root: verts[0],
                size: verts.len(),
                edge_count,
                tree_excess: edge_count as i64 - verts.len() as i64,
                max_clique,
                clique_exact,
            }
        })
        .collect();
    components.sort_by_key(|c| c.root);

    Ok(StructureReport {
        n: g.n,
        degree_counts,
        d_gamma,
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        components,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSize {
    pub size: usize,
    pub exact: bool,
}

/// Clique number of the whole graph (maximum over components).
pub fn max_clique(g: &Graph, budget: u64) -> CliqueSize {
    if g.n == 0 {
        return CliqueSize { size: 0, exact: true };
    }
    let adj = g.adjacency();
    let mut dsu = DisjointSets::new(g.n);
    for &(i, j) in &g.edges {
        dsu.union(i, j);
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..g.n {
        members.entry(dsu.find(v)).or_default().push(v);
    }
    let mut best = CliqueSize { size: 1, exact: true };
    for verts in members.values() {
        if verts.len() <= best.size {
            continue;
        }
        let (size, exact) = component_max_clique(&adj, verts, budget);
        best.size = best.size.max(size);
        best.exact &= exact;
    }
    best
}

/// Bron–Kerbosch with Tomita pivoting over a degeneracy ordering, pruned by
/// the best clique found so far.
fn component_max_clique(adj: &[Vec<usize>], verts: &[usize], budget: u64) -> (usize, bool) {
    let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let nbrs: Vec<Vec<usize>> = verts
        .iter()
        .map(|v| {
            let mut l: Vec<usize> = adj[*v].iter().map(|u| local[u]).collect();
            l.sort_unstable();
            l
        })
        .collect();
    let order = degeneracy_order(&nbrs);
    let mut position = vec![0; order.len()];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    let mut search = CliqueSearch {
        nbrs: &nbrs,
        best: 1,
        nodes: 0,
        budget,
        exhausted: false,
    };
    for &v in &order {
        let p: Vec<usize> = nbrs[v].iter().copied().filter(|&u| position[u] > position[v]).collect();
        let x: Vec<usize> = nbrs[v].iter().copied().filter(|&u| position[u] < position[v]).collect();
        search.expand(1, p, x);
        if search.exhausted {
            break;
        }
    }
    (search.best, !search.exhausted)
}

fn degeneracy_order(nbrs: &[Vec<usize>]) -> Vec<usize> {
    let n = nbrs.len();
    let mut deg: Vec<usize> = nbrs.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n).map(|v| Reverse((deg[v], v))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((d, v))) = heap.pop() {
        if removed[v] || d != deg[v] {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &u in &nbrs[v] {
            if !removed[u] {
                deg[u] -= 1;
                heap.push(Reverse((deg[u], u)));
            }
        }
    }
    order
}

struct CliqueSearch<'a> {
    nbrs: &'a [Vec<usize>],
    best: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, r: usize, mut p: Vec<usize>, mut x: Vec<usize>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if p.is_empty() {
            if x.is_empty() {
                self.best = self.best.max(r);
            }
            return;
        }
        if r + p.len() <= self.best {
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| (intersection_len(&p, &self.nbrs[u]), Reverse(u)))
            .expect("p is nonempty");
        let candidates: Vec<usize> = p
            .iter()
            .copied()
            .filter(|v| self.nbrs[pivot].binary_search(v).is_err())
            .collect();
        for v in candidates {
            let np = intersect(&p, &self.nbrs[v]);
            let nx = intersect(&x, &self.nbrs[v]);
            self.expand(r + 1, np, nx);
            if self.exhausted {
                return;
            }
            if let Ok(pos) = p.binary_search(&v) {
                p.remove(pos);
            }
            let pos = x.binary_search(&v).unwrap_or_else(|e| e);
            x.insert(pos, v);
            if r + p.len() <= self.best {
                return;
            }
        }
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: usize,
    pub leaves: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarDecomposition {
    pub stars: Vec<Star>,
    pub remainder: Graph,
    pub degree_threshold: usize,
    /// Remainder maximum degree is at most `degree_threshold`.
    pub success: bool,
}

impl StarDecomposition {
    pub fn star_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.stars.iter().flat_map(|s| {
            s.leaves
                .iter()
                .map(move |&l| if s.center < l { (s.center, l) } else { (l, s.center) })
        })
    }
}

/// Greedy star extraction.
///
/// Repeatedly takes the vertex of largest residual degree (lowest index on
/// ties). While that degree exceeds `degree_threshold`: if the vertex is not
/// yet part of a star and has unused residual neighbours, those neighbours
/// become the leaves of a new star centred at it; every other residual edge of
/// the vertex moves to the remainder. Leftover residual edges end in the
/// remainder.
pub fn star_decomposition(g: &Graph, degree_threshold: usize) -> Result<StarDecomposition> {
    if degree_threshold < 1 {
        return domain("degree_threshold must be at least 1");
    }
    let n = g.n;
    let adj = g.adjacency();
    let mut live: Vec<Vec<bool>> = adj.iter().map(|l| vec![true; l.len()]).collect();
    let mut residual: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut used = vec![false; n];
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = (0..n).map(|v| (residual[v], Reverse(v))).collect();
    let mut stars = Vec::new();
    let mut remainder = Vec::new();

    while let Some((deg, Reverse(v))) = heap.pop() {
        if deg != residual[v] {
            continue;
        }
        if deg <= degree_threshold {
            break;
        }
        let mut leaves = Vec::new();
        let mut updates = Vec::new();
        for k in 0..adj[v].len() {
            if !live[v][k] {
                continue;
            }
            let u = adj[v][k];
            if !used[v] && !used[u] {
                leaves.push(u);
            } else {
                remainder.push((v.min(u), v.max(u)));
            }
            live[v][k] = false;
            let back = adj[u].binary_search(&v).expect("symmetric adjacency");
            live[u][back] = false;
            residual[v] -= 1;
            residual[u] -= 1;
            updates.push(u);
        }
        if !leaves.is_empty() {
            used[v] = true;
            for &l in &leaves {
                used[l] = true;
            }
            stars.push(Star { center: v, leaves });
        }
        for u in updates {
            heap.push((residual[u], Reverse(u)));
        }
    }
    for v in 0..n {
        for (k, &u) in adj[v].iter().enumerate() {
            if live[v][k] && v < u {
                remainder.push((v, u));
            }
        }
    }
    let remainder = Graph::new(n, remainder)?;
    let success = remainder.max_degree() <= degree_threshold;
    Ok(StarDecomposition {
        stars,
        remainder,
        degree_threshold,
        success,
    })
}

/// Edge-list text: a `n m` header, then one `i j` or `i j w` line per edge.
/// Weights use the shortest decimal that round-trips.
pub fn write_edge_list(g: &Graph, weights: Option<&[f64]>) -> String {
    let mut out = String::with_capacity(16 * (g.edge_count() + 1));
    let _ = writeln!(out, "{} {}", g.n, g.edge_count());
    for (k, &(i, j)) in g.edges.iter().enumerate() {
        match weights {
            Some(w) => {
                let _ = writeln!(out, "{i} {j} {:?}", w[k]);
            }
            None => {
                let _ = writeln!(out, "{i} {j}");
            }
        }
    }
    out
}

pub fn write_weighted(z: &WeightedGraph) -> String {
    write_edge_list(&z.graph, Some(&z.weights))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub graph: Graph,
    pub weights: Option<Vec<f64>>,
}

impl EdgeList {
    /// Missing weights are read as 1.
    pub fn into_weighted(self) -> WeightedGraph {
        let m = self.graph.edge_count();
        WeightedGraph {
            graph: self.graph,
            weights: self.weights.unwrap_or_else(|| vec![1.0; m]),
        }
    }
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
    let mut head = header.split_whitespace();
    let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
        s.ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
    };
    let n = parse_usize(head.next(), "vertex count")?;
    let m = parse_usize(head.next(), "edge count")?;
    let mut triples = Vec::with_capacity(m);
    let mut weighted: Option<bool> = None;
    for line in lines {
        let mut f = line.split_whitespace();
        let i = parse_usize(f.next(), "edge endpoint")?;
        let j = parse_usize(f.next(), "edge endpoint")?;
        let w = f
            .next()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("bad weight {s:?}: {e}"))))
            .transpose()?;
        if f.next().is_some() {
            return Err(Error::Parse(format!("trailing fields in {line:?}")));
        }
        match (weighted, w.is_some()) {
            (None, has) => weighted = Some(has),
            (Some(a), b) if a != b => return Err(Error::Parse("mixed weighted and unweighted lines".into())),
            _ => {}
        }
        triples.push((i, j, w.unwrap_or(1.0)));
    }
    if triples.len() != m {
        return Err(Error::Parse(format!("header announces {m} edges, found {}", triples.len())));
    }
    let z = WeightedGraph::from_triples(n, triples)?;
    Ok(EdgeList {
        weights: if weighted == Some(true) { Some(z.weights) } else { None },
        graph: z.graph,
    })
}
