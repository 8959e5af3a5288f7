//! Communication topology: undirected simple graphs, the degree-normalized
//! (weighted) adjacency matrix and the modal basis that decouples the
//! network dynamics.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::jacobi_eigen;

/// Elementwise tolerance for structural identities such as `T_inv W T = diag`.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for spectral range and simplicity checks.
pub const SPECTRAL_TOL: f64 = 1e-9;

/// Undirected simple graph stored as a symmetric 0/1 adjacency matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<u8>>,
}

impl Graph {
    /// Validates symmetry, binary entries and an empty diagonal.
    pub fn new(adjacency: Vec<Vec<u8>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::param("graph must have at least one node"));
        }
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &a) in row.iter().enumerate() {
                if a > 1 {
                    return Err(Error::param(format!(
                        "adjacency[{i}][{j}] = {a} is not 0/1"
                    )));
                }
                if i == j && a != 0 {
                    return Err(Error::param(format!("self loop at node {i}")));
                }
                if adjacency[j][i] != a {
                    return Err(Error::param(format!(
                        "adjacency not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Graph { n, adjacency })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![vec![0u8; n]; n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::param(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            adjacency[i][j] = 1;
            adjacency[j][i] = 1;
        }
        Graph::new(adjacency)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        Graph::from_edges(n, &edges)
    }

    /// The randomly generated 8-agent topology used in the reference
    /// simulation study.
    pub fn eight_agent_reference() -> Self {
        let rows: [[u8; 8]; 8] = [
            [0, 0, 0, 1, 0, 0, 0, 1],
            [0, 0, 1, 1, 0, 0, 0, 0],
            [0, 1, 0, 1, 0, 0, 0, 0],
            [1, 1, 1, 0, 1, 0, 0, 1],
            [0, 0, 0, 1, 0, 1, 1, 0],
            [0, 0, 0, 0, 1, 0, 1, 0],
            [0, 0, 0, 0, 1, 1, 0, 0],
            [1, 0, 0, 1, 0, 0, 0, 0],
        ];
        Graph::new(rows.iter().map(|r| r.to_vec()).collect()).expect("reference graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &[Vec<u8>] {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j] == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].iter().map(|&a| a as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == 1)
            .map(|(j, _)| j)
    }

    /// Connected component label of every node (labels in order of first appearance).
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for w in self.neighbours(u) {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Parses the plain-text format: first line `n`, then `n` rows of `n`
    /// whitespace-separated 0/1 entries.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("graph", "empty input"))?;
        let n: usize = header
            .parse()
            .map_err(|e| Error::parse("graph header", e))?;
        let mut adjacency = Vec::with_capacity(n);
        for row in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::parse("graph", format!("missing row {}", row + 1)))?;
            let entries = line
                .split_whitespace()
                .map(|tok| tok.parse::<u8>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(format!("graph row {}", row + 1), e))?;
            adjacency.push(entries);
        }
        if lines.next().is_some() {
            return Err(Error::parse("graph", "trailing data after the last row"));
        }
        Graph::new(adjacency)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in &self.adjacency {
            let line: Vec<String> = row.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Graph::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// `W = Δ⁻¹ A`: row `i` holds `1/δᵢ` at each neighbour of `i`.
pub fn weighted_adjacency(g: &Graph) -> Result<DMatrix<f64>> {
    let degrees = g.degrees();
    if let Some(node) = degrees.iter().position(|&d| d == 0) {
        return Err(Error::IsolatedNode { node });
    }
    Ok(DMatrix::from_fn(g.n(), g.n(), |i, j| {
        if g.has_edge(i, j) {
            1.0 / degrees[i] as f64
        } else {
            0.0
        }
    }))
}

/// Breadth-first search from node 0.
pub fn is_connected(g: &Graph) -> bool {
    g.components().iter().all(|&c| c == 0)
}

/// Diagonalizing basis of the weighted adjacency matrix.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    spectrum: DVector<f64>,
    t: DMatrix<f64>,
    t_inv: DMatrix<f64>,
}

impl ModalBasis {
    /// Eigenvalues `λ₁ ≥ λ₂ ≥ … ≥ λₙ`.
    pub fn spectrum(&self) -> &DVector<f64> {
        &self.spectrum
    }

    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn t_inv(&self) -> &DMatrix<f64> {
        &self.t_inv
    }

    pub fn n(&self) -> usize {
        self.spectrum.len()
    }

    /// Second-largest eigenvalue, the graph's connectivity measure.
    /// Returns `None` for a single node.
    pub fn lambda2(&self) -> Option<f64> {
        (self.n() > 1).then(|| self.spectrum[1])
    }

    pub fn to_modal(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.t_inv * x
    }

    pub fn from_modal(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.t * z
    }
}

/// Eigen-decomposition of `W_d` through the symmetric similar matrix
/// `S = Δ^{-1/2} A Δ^{-1/2}`: with `S = U Λ Uᵀ`, `T = Δ^{-1/2} U` and
/// `T⁻¹ = Uᵀ Δ^{1/2}`. The first column of `T` is rescaled to the all-ones
/// vector (and the first row of `T⁻¹` inversely).
pub fn modal_decomposition(g: &Graph) -> Result<ModalBasis> {
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if n == 1 {
        let one = DMatrix::from_element(1, 1, 1.0);
        return Ok(ModalBasis {
            spectrum: DVector::from_element(1, 1.0),
            t: one.clone(),
            t_inv: one,
        });
    }
    let degrees = g.degrees();
    let sqrt_deg: Vec<f64> = degrees.iter().map(|&d| (d as f64).sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| {
        if g.has_edge(i, j) {
            1.0 / (sqrt_deg[i] * sqrt_deg[j])
        } else {
            0.0
        }
    });
    let eig = jacobi_eigen(&s)?;
    let u = eig.vectors;
    let mut t = DMatrix::from_fn(n, n, |i, j| u[(i, j)] / sqrt_deg[i]);
    let mut t_inv = DMatrix::from_fn(n, n, |i, j| u[(j, i)] * sqrt_deg[j]);

    let scale = t.column(0).sum() / n as f64;
    t.column_mut(0).fill(1.0);
    t_inv.row_mut(0).scale_mut(scale);

    Ok(ModalBasis {
        spectrum: eig.values,
        t,
        t_inv,
    })
}

/// Erdős–Rényi sample with edge probability `edge_prob`, then uniformly random
/// node pairs are drawn and joined whenever they lie in different components,
/// until the graph is connected. Deterministic for a given seed (ChaCha8).
pub fn random_connected_graph(n: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param(format!("need n >= 2, got {n}")));
    }
    if !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(Error::param(format!(
            "edge probability {edge_prob} not in (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < edge_prob {
                adjacency[i][j] = 1;
                adjacency[j][i] = 1;
            }
        }
    }
    let mut g = Graph { n, adjacency };
    loop {
        let comp = g.components();
        if comp.iter().all(|&c| c == 0) {
            return Ok(g);
        }
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if comp[u] != comp[v] {
            g.adjacency[u][v] = 1;
            g.adjacency[v][u] = 1;
        }
    }
}
