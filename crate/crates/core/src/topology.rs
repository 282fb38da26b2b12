//! Vietoris-Rips persistence in homology dimensions 0 and 1.
//!
//! Distances inside a cloud are Euclidean. Simplices are ordered by
//! (filtration value, dimension, lexicographic vertex tuple), which makes the
//! pairing unique.
//!
//! * H0 comes from Kruskal's algorithm with a union-find: every vertex is
//!   born at 0 and the younger component dies on each merge, so the finite
//!   deaths are exactly the minimum spanning tree edge lengths.
//! * H1 is computed on the filtration truncated at the enclosing radius
//!   `min_v max_u d(v, u)`. At that scale the complex is a cone over `v`, so
//!   every 1-cycle is already a boundary and nothing is lost. The reduction
//!   runs on the coboundary matrix (edges as columns, in reverse filtration
//!   order), which yields the same pairs as reducing the boundary matrix.
//!   Edges that killed an H0 class are cleared up front.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};

use ndarray::{s, Array2};
use thiserror::Error;

use crate::corpus::PointCloud;
use crate::numerics::{self, center_columns, NumericsError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePoint {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        debug_assert!(death >= birth, "death {death} before birth {birth}");
        Self { dim, birth, death }
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub cloud_id: usize,
    pub max_dim: usize,
    pub points: Vec<PersistencePoint>,
}

impl PersistenceDiagram {
    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistencePoint> {
        self.points.iter().filter(move |p| p.dim == dim)
    }

    /// Writes `dim,birth,death` rows; infinite deaths are `inf`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "dim,birth,death")?;
        for p in &self.points {
            let death = if p.is_infinite() {
                "inf".to_string()
            } else {
                format!("{:?}", p.death)
            };
            writeln!(out, "{},{:?},{}", p.dim, p.birth, death)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("cloud {cloud}: cannot keep {k} components of a {rows}x{dim} cloud")]
    ComponentsOutOfRange {
        cloud: usize,
        k: usize,
        rows: usize,
        dim: usize,
    },
    #[error("cloud {cloud}: PCA needs at least 2 points, got {rows}")]
    TooFewPoints { cloud: usize, rows: usize },
    #[error("cloud {cloud}: all points coincide, captured variance is undefined")]
    ZeroVariance { cloud: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("homology dimension {0} is not supported (only 0 and 1)")]
    UnsupportedDim(usize),
}

/// Full Euclidean distance matrix of the cloud's points.
pub fn pairwise_distances(cloud: &PointCloud) -> Array2<f64> {
    let n = cloud.len();
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let v = euclidean(cloud, i, j);
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    d
}

fn euclidean(cloud: &PointCloud, i: usize, j: usize) -> f64 {
    cloud
        .point(i)
        .iter()
        .zip(cloud.point(j).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `min_v max_u d(v, u)`; 0 for a single point.
pub fn enclosing_radius(dist: &Array2<f64>) -> f64 {
    if dist.nrows() == 0 {
        return 0.0;
    }
    dist.rows()
        .into_iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

// Non-negative f64 bit patterns sort like the values, so derived `Ord` on
// these keys follows the filtration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Edge {
    len: u64,
    i: u32,
    j: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Triangle {
    diam: u64,
    a: u32,
    b: u32,
    c: u32,
}

fn key(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    // fold -0.0 into +0.0
    (x + 0.0).to_bits()
}

fn sorted_edges(dist: &Array2<f64>, threshold: f64) -> Vec<Edge> {
    let n = dist.nrows();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = dist[[i, j]];
            if d <= threshold {
                edges.push(Edge {
                    len: key(d),
                    i: i as u32,
                    j: j as u32,
                });
            }
        }
    }
    edges.sort_unstable();
    edges
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal over `edges` (already sorted); returns the merging edges.
fn spanning_edges(n: usize, edges: &[Edge]) -> Vec<Edge> {
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for &e in edges {
        if uf.union(e.i as usize, e.j as usize) {
            tree.push(e);
            if tree.len() + 1 == n {
                break;
            }
        }
    }
    tree
}

/// Dimension-0 diagram: `(0, w)` per spanning-tree edge plus one `(0, inf)`.
pub fn rips_h0(cloud: &PointCloud) -> PersistenceDiagram {
    let dist = pairwise_distances(cloud);
    let edges = sorted_edges(&dist, f64::INFINITY);
    PersistenceDiagram {
        cloud_id: cloud.sentence_id,
        max_dim: 0,
        points: h0_points(cloud.len(), &edges),
    }
}

fn h0_points(n: usize, edges: &[Edge]) -> Vec<PersistencePoint> {
    let mut points: Vec<PersistencePoint> = spanning_edges(n, edges)
        .into_iter()
        .map(|e| PersistencePoint::new(0, 0.0, f64::from_bits(e.len)))
        .collect();
    points.push(PersistencePoint::new(0, 0.0, f64::INFINITY));
    points
}

/// Dimension-1 diagram of the Rips filtration truncated at the enclosing
/// radius. Zero-persistence pairs are dropped. Fewer than 3 points give an
/// empty diagram.
pub fn rips_h1(cloud: &PointCloud) -> PersistenceDiagram {
    let dist = pairwise_distances(cloud);
    PersistenceDiagram {
        cloud_id: cloud.sentence_id,
        max_dim: 1,
        points: h1_points(&dist),
    }
}

/// H0 and (when `max_dim >= 1`) H1 in one pass over the distance matrix.
pub fn rips_diagram(cloud: &PointCloud, max_dim: usize) -> Result<PersistenceDiagram, TopologyError> {
    if max_dim > 1 {
        return Err(TopologyError::UnsupportedDim(max_dim));
    }
    let dist = pairwise_distances(cloud);
    let edges = sorted_edges(&dist, f64::INFINITY);
    let mut points = h0_points(cloud.len(), &edges);
    if max_dim == 1 {
        points.extend(h1_points(&dist));
    }
    Ok(PersistenceDiagram {
        cloud_id: cloud.sentence_id,
        max_dim,
        points,
    })
}

fn h1_points(dist: &Array2<f64>) -> Vec<PersistencePoint> {
    let n = dist.nrows();
    if n < 3 {
        return Vec::new();
    }
    let radius = enclosing_radius(dist);
    let edges = sorted_edges(dist, radius);
    let tree = spanning_edges(n, &edges);
    let mut cleared: std::collections::HashSet<Edge> = tree.into_iter().collect();

    let mut pivots: HashMap<Triangle, usize> = HashMap::new();
    let mut reduced: Vec<Vec<Triangle>> = Vec::new();
    let mut points = Vec::new();

    for &edge in edges.iter().rev() {
        if cleared.remove(&edge) {
            continue;
        }
        let mut column = coboundary(dist, edge, radius);
        while let Some(&low) = column.first() {
            match pivots.get(&low) {
                Some(&other) => column = symmetric_difference(&column, &reduced[other]),
                None => break,
            }
        }
        let birth = f64::from_bits(edge.len);
        match column.first() {
            Some(&low) => {
                let death = f64::from_bits(low.diam);
                if death > birth {
                    points.push(PersistencePoint::new(1, birth, death));
                }
                pivots.insert(low, reduced.len());
                reduced.push(column);
            }
            None => {
                // cannot happen for a cone, kept so the diagram stays finite
                if radius > birth {
                    points.push(PersistencePoint::new(1, birth, radius));
                }
            }
        }
    }
    points.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
    points
}

/// Triangles `{i, j, k}` with diameter within `radius`, ascending.
fn coboundary(dist: &Array2<f64>, edge: Edge, radius: f64) -> Vec<Triangle> {
    let (i, j) = (edge.i as usize, edge.j as usize);
    let len = f64::from_bits(edge.len);
    let mut out = Vec::new();
    for k in 0..dist.nrows() {
        if k == i || k == j {
            continue;
        }
        let diam = len.max(dist[[i, k]]).max(dist[[j, k]]);
        if diam <= radius {
            let mut v = [i as u32, j as u32, k as u32];
            v.sort_unstable();
            out.push(Triangle {
                diam: key(diam),
                a: v[0],
                b: v[1],
                c: v[2],
            });
        }
    }
    out.sort_unstable();
    out
}

fn symmetric_difference(a: &[Triangle], b: &[Triangle]) -> Vec<Triangle> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Result of projecting a cloud onto its leading principal directions.
#[derive(Debug, Clone)]
pub struct PcaProjection {
    pub cloud: PointCloud,
    pub variance_captured: f64,
}

impl fmt::Display for PcaProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cloud {} -> {} components ({:.4} of variance)",
            self.cloud.sentence_id,
            self.cloud.dim(),
            self.variance_captured
        )
    }
}

/// Centers the cloud and projects it onto the top-`k` eigenvectors of the
/// sample covariance (denominator `rows - 1`).
///
/// When the cloud has fewer points than dimensions the eigenproblem is solved
/// on the `rows x rows` Gram matrix instead, which has the same non-zero
/// spectrum.
pub fn pca_reduce(cloud: &PointCloud, k: usize) -> Result<PcaProjection, TopologyError> {
    let (rows, dim) = cloud.points().dim();
    let id = cloud.sentence_id;
    if rows < 2 {
        return Err(TopologyError::TooFewPoints { cloud: id, rows });
    }
    if k == 0 || k > rows.min(dim) {
        return Err(TopologyError::ComponentsOutOfRange {
            cloud: id,
            k,
            rows,
            dim,
        });
    }
    let centered = center_columns(cloud.points().view());
    let denom = (rows - 1) as f64;

    let (eigenvalues, directions) = if dim <= rows {
        let cov = centered.t().dot(&centered) / denom;
        let eig = numerics::sym_eigen(cov.view())?;
        (eig.values, eig.vectors.slice(s![.., ..k]).to_owned())
    } else {
        let gram = centered.dot(&centered.t()) / denom;
        let eig = numerics::sym_eigen(gram.view())?;
        let mut directions = Array2::zeros((dim, k));
        for c in 0..k {
            let v = centered.t().dot(&eig.vectors.column(c));
            let norm = v.dot(&v).sqrt();
            // directions with no variance stay zero and project to 0
            if norm > 0.0 && eig.values[c] > 0.0 {
                directions.column_mut(c).assign(&(v / norm));
            }
        }
        numerics::fix_signs(&mut directions);
        (eig.values, directions)
    };

    let total: f64 = eigenvalues.iter().map(|v| v.max(0.0)).sum();
    if total <= 0.0 {
        return Err(TopologyError::ZeroVariance { cloud: id });
    }
    let kept: f64 = eigenvalues.iter().take(k).map(|v| v.max(0.0)).sum();
    let scores = centered.dot(&directions);
    Ok(PcaProjection {
        cloud: PointCloud::new(id, scores),
        variance_captured: (kept / total).clamp(0.0, 1.0),
    })
}

/// Per-row variance captured for `1..=max_k` components, used for reporting.
pub fn variance_profile(cloud: &PointCloud, max_k: usize) -> Result<Vec<f64>, TopologyError> {
    (1..=max_k)
        .map(|k| pca_reduce(cloud, k).map(|p| p.variance_captured))
        .collect()
}
