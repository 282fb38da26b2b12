//! Bottleneck distance between persistence diagrams.
//!
//! The distance is the smallest `t` for which a partial matching of cost
//! `<= t` exists. Every matching's cost is one of finitely many candidate
//! values (an L-infinity distance between two points, or half a point's
//! persistence), so the search sorts those candidates and binary-searches the
//! smallest feasible one. Feasibility is a perfect-matching test on the usual
//! bipartite graph where each diagram is augmented with diagonal copies of
//! the other's points.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::matrices::{upper_pairs, DistanceMatrix, MatrixError};
use crate::topology::PersistenceDiagram;

#[derive(Debug, Error, PartialEq)]
pub enum DiagramError {
    #[error("cannot compare an H{left} diagram with an H{right} diagram")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matching index {index} is out of range for a diagram with {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("point {index} appears in more than one matched pair")]
    DuplicateIndex { index: usize },
    #[error("matching was built for {matching_p}x{matching_q} points, diagrams have {p}x{q}")]
    MatchingShape {
        matching_p: usize,
        matching_q: usize,
        p: usize,
        q: usize,
    },
    #[error("bottleneck cost is undefined for the infinite point {index}")]
    InfinitePoint { index: usize },
    #[error("diagram {cloud} only holds dimensions up to {max_dim}, H{dim} requested")]
    MissingDimension { cloud: usize, max_dim: usize, dim: usize },
    #[error("no diagrams given")]
    Empty,
}

/// One homology dimension of a diagram as plain `(birth, death)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DimDiagram {
    pub dim: usize,
    pub points: Vec<(f64, f64)>,
}

impl DimDiagram {
    pub fn new(dim: usize, points: Vec<(f64, f64)>) -> Self {
        Self { dim, points }
    }

    pub fn from_diagram(d: &PersistenceDiagram, dim: usize) -> Result<Self, DiagramError> {
        if dim > d.max_dim {
            return Err(DiagramError::MissingDimension {
                cloud: d.cloud_id,
                max_dim: d.max_dim,
                dim,
            });
        }
        Ok(Self {
            dim,
            points: d.in_dim(dim).map(|p| (p.birth, p.death)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `M: P <-> Q`, with each index used at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatching {
    pairs: Vec<(usize, usize)>,
    unmatched_p: Vec<usize>,
    unmatched_q: Vec<usize>,
}

impl PartialMatching {
    pub fn new(pairs: Vec<(usize, usize)>, p_len: usize, q_len: usize) -> Result<Self, DiagramError> {
        let mut used_p = vec![false; p_len];
        let mut used_q = vec![false; q_len];
        for &(p, q) in &pairs {
            for (index, used) in [(p, &mut used_p), (q, &mut used_q)] {
                let len = used.len();
                let slot = used
                    .get_mut(index)
                    .ok_or(DiagramError::IndexOutOfRange { index, len })?;
                if *slot {
                    return Err(DiagramError::DuplicateIndex { index });
                }
                *slot = true;
            }
        }
        let unmatched = |used: &[bool]| used.iter().enumerate().filter(|(_, &u)| !u).map(|(i, _)| i).collect();
        Ok(Self {
            unmatched_p: unmatched(&used_p),
            unmatched_q: unmatched(&used_q),
            pairs,
        })
    }

    pub fn empty(p_len: usize, q_len: usize) -> Self {
        Self::new(Vec::new(), p_len, q_len).expect("empty matching is valid")
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn unmatched_p(&self) -> &[usize] {
        &self.unmatched_p
    }

    pub fn unmatched_q(&self) -> &[usize] {
        &self.unmatched_q
    }

    fn p_len(&self) -> usize {
        self.pairs.len() + self.unmatched_p.len()
    }

    fn q_len(&self) -> usize {
        self.pairs.len() + self.unmatched_q.len()
    }
}

fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

fn half_persistence(s: (f64, f64)) -> f64 {
    (s.1 - s.0).abs() / 2.0
}

/// Max of the matched L-infinity distances and the unmatched half
/// persistences. Diagrams must be finite.
pub fn bottleneck_cost(p: &DimDiagram, q: &DimDiagram, m: &PartialMatching) -> Result<f64, DiagramError> {
    if p.dim != q.dim {
        return Err(DiagramError::DimensionMismatch {
            left: p.dim,
            right: q.dim,
        });
    }
    if p.len() != m.p_len() || q.len() != m.q_len() {
        return Err(DiagramError::MatchingShape {
            matching_p: m.p_len(),
            matching_q: m.q_len(),
            p: p.len(),
            q: q.len(),
        });
    }
    for d in [p, q] {
        if let Some(index) = d.points.iter().position(|s| !s.1.is_finite()) {
            return Err(DiagramError::InfinitePoint { index });
        }
    }
    let matched = m.pairs.iter().map(|&(i, j)| linf(p.points[i], q.points[j]));
    let unmatched_p = m.unmatched_p.iter().map(|&i| half_persistence(p.points[i]));
    let unmatched_q = m.unmatched_q.iter().map(|&j| half_persistence(q.points[j]));
    Ok(matched.chain(unmatched_p).chain(unmatched_q).fold(0.0, f64::max))
}

/// Bottleneck distance, possibly infinite when the diagrams carry different
/// numbers of essential (infinite-death) classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bottleneck {
    Finite(f64),
    Infinite,
}

impl Bottleneck {
    pub fn as_f64(self) -> f64 {
        match self {
            Bottleneck::Finite(v) => v,
            Bottleneck::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Bottleneck::Finite(v) => Some(v),
            Bottleneck::Infinite => None,
        }
    }
}

impl fmt::Display for Bottleneck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bottleneck::Finite(v) => write!(f, "{v}"),
            Bottleneck::Infinite => f.write_str("inf"),
        }
    }
}

pub fn bottleneck_distance(p: &DimDiagram, q: &DimDiagram) -> Result<Bottleneck, DiagramError> {
    if p.dim != q.dim {
        return Err(DiagramError::DimensionMismatch {
            left: p.dim,
            right: q.dim,
        });
    }
    let split = |d: &DimDiagram| {
        let mut finite = Vec::new();
        let mut essential = Vec::new();
        for &(b, e) in &d.points {
            if e.is_finite() {
                // diagonal points cost nothing left unmatched
                if e != b {
                    finite.push((b, e));
                }
            } else {
                essential.push(b);
            }
        }
        (finite, essential)
    };
    let (pf, mut pe) = split(p);
    let (qf, mut qe) = split(q);
    if pe.len() != qe.len() {
        return Ok(Bottleneck::Infinite);
    }
    // on a line, sorted order minimises the largest displacement
    pe.sort_by(f64::total_cmp);
    qe.sort_by(f64::total_cmp);
    let essential_cost = pe.iter().zip(&qe).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Bottleneck::Finite(finite_bottleneck(&pf, &qf).max(essential_cost)))
}

/// All values a matching's cost can take; sorted, deduplicated.
pub fn candidate_costs(p: &[(f64, f64)], q: &[(f64, f64)]) -> Vec<f64> {
    let mut out: Vec<f64> = p.iter().chain(q).map(|&s| half_persistence(s)).collect();
    for &a in p {
        for &b in q {
            out.push(linf(a, b));
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn finite_bottleneck(p: &[(f64, f64)], q: &[(f64, f64)]) -> f64 {
    if p.is_empty() && q.is_empty() {
        return 0.0;
    }
    let candidates = candidate_costs(p, q);
    // the largest candidate is always feasible: match everything to the diagonal
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(p, q, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Whether a partial matching of cost `<= t` exists.
///
/// Left vertices are `P` followed by diagonal copies of `Q`; right vertices
/// are `Q` followed by diagonal copies of `P`.
fn feasible(p: &[(f64, f64)], q: &[(f64, f64)], t: f64) -> bool {
    let (np, nq) = (p.len(), q.len());
    let size = np + nq;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); size];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            if linf(a, b) <= t {
                adj[i].push(j as u32);
            }
        }
        if half_persistence(a) <= t {
            adj[i].push((nq + i) as u32);
        }
    }
    for (j, &b) in q.iter().enumerate() {
        let left = np + j;
        if half_persistence(b) <= t {
            adj[left].push(j as u32);
        }
        // diagonal to diagonal is free
        adj[left].extend((nq..nq + np).map(|r| r as u32));
    }
    hopcroft_karp(&adj, size) == size
}

const FREE: u32 = u32::MAX;

/// Size of a maximum matching; `adj[l]` lists right neighbours of left `l`.
fn hopcroft_karp(adj: &[Vec<u32>], right_len: usize) -> usize {
    let left_len = adj.len();
    let mut match_left = vec![FREE; left_len];
    let mut match_right = vec![FREE; right_len];
    let mut layer = vec![u32::MAX; left_len];
    let mut size = 0;

    loop {
        // BFS from free left vertices
        let mut queue = VecDeque::new();
        for l in 0..left_len {
            if match_left[l] == FREE {
                layer[l] = 0;
                queue.push_back(l);
            } else {
                layer[l] = u32::MAX;
            }
        }
        let mut reachable_free = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = match_right[r as usize];
                if next == FREE {
                    reachable_free = true;
                } else if layer[next as usize] == u32::MAX {
                    layer[next as usize] = layer[l] + 1;
                    queue.push_back(next as usize);
                }
            }
        }
        if !reachable_free {
            return size;
        }

        let mut cursor = vec![0usize; left_len];
        for l in 0..left_len {
            if match_left[l] == FREE && augment(l, adj, &mut match_left, &mut match_right, &mut layer, &mut cursor) {
                size += 1;
            }
        }
    }
}

fn augment(
    start: usize,
    adj: &[Vec<u32>],
    match_left: &mut [u32],
    match_right: &mut [u32],
    layer: &mut [u32],
    cursor: &mut [usize],
) -> bool {
    // iterative DFS along the BFS layers
    let mut stack = vec![start];
    while let Some(&l) = stack.last() {
        if cursor[l] == adj[l].len() {
            layer[l] = u32::MAX;
            stack.pop();
            continue;
        }
        let r = adj[l][cursor[l]] as usize;
        cursor[l] += 1;
        let next = match_right[r];
        if next == FREE {
            // flip the path recorded on the stack
            let mut r = r as u32;
            while let Some(l) = stack.pop() {
                let prev = match_left[l];
                match_left[l] = r;
                match_right[r as usize] = l as u32;
                r = prev;
            }
            return true;
        }
        let next = next as usize;
        if layer[next] == layer[l].wrapping_add(1) && layer[next] != u32::MAX {
            stack.push(next);
        }
    }
    false
}

/// Pairwise bottleneck distances between the `dim` parts of the diagrams.
/// Infinite distances are stored as `f64::INFINITY`.
pub fn bottleneck_matrix(
    diagrams: &[PersistenceDiagram],
    dim: usize,
    source: impl Into<String>,
) -> Result<DistanceMatrix, BottleneckMatrixError> {
    if diagrams.is_empty() {
        return Err(DiagramError::Empty.into());
    }
    let parts: Vec<DimDiagram> = diagrams
        .iter()
        .map(|d| DimDiagram::from_diagram(d, dim))
        .collect::<Result<_, _>>()?;
    let n = parts.len();
    let pairs: Vec<(usize, usize)> = upper_pairs(n).collect();
    let upper: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| bottleneck_distance(&parts[i], &parts[j]).map(Bottleneck::as_f64))
        .collect::<Result<_, _>>()?;
    Ok(DistanceMatrix::from_upper(source, n, &upper)?)
}

#[derive(Debug, Error)]
pub enum BottleneckMatrixError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
