//! Brute-force reference implementations shared by the integration tests.
//! Each one is written from the definition, independent of the library's
//! algorithm.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::VecDeque;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    // Box-Muller; keeps the tests free of a distributions dependency
    Array2::from_shape_fn((rows, cols), |_| {
        let u: f64 = rng.random_range(f64::EPSILON..1.0);
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    })
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(lo..hi))
}

pub fn euclidean(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn distance_table(points: &Array2<f64>) -> Vec<Vec<f64>> {
    let n = points.nrows();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = euclidean(points.row(i), points.row(j));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Every word list of length `0..=max_len` over `vocab` symbols, encoded as
/// symbol vectors, in shortlex order.
pub fn all_lists(vocab: u8, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in &layer {
            for s in 0..vocab {
                let mut m = l.clone();
                m.push(s);
                next.push(m);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Edit distances from `lists[source]` to every list, by breadth-first
/// search over single-word insertions, deletions and substitutions.
/// Intermediate lists never need to exceed the longest list, so the
/// search stays inside `lists`.
pub struct EditGraph {
    neighbours: Vec<Vec<usize>>,
}

impl EditGraph {
    pub fn new(lists: &[Vec<u8>], vocab: u8, max_len: usize) -> Self {
        let index: std::collections::HashMap<&[u8], usize> =
            lists.iter().enumerate().map(|(i, l)| (l.as_slice(), i)).collect();
        let neighbours = lists
            .iter()
            .map(|l| {
                let mut out = Vec::new();
                for pos in 0..l.len() {
                    let mut del = l.clone();
                    del.remove(pos);
                    out.push(index[del.as_slice()]);
                    for s in 0..vocab {
                        if s != l[pos] {
                            let mut sub = l.clone();
                            sub[pos] = s;
                            out.push(index[sub.as_slice()]);
                        }
                    }
                }
                if l.len() < max_len {
                    for pos in 0..=l.len() {
                        for s in 0..vocab {
                            let mut ins = l.clone();
                            ins.insert(pos, s);
                            out.push(index[ins.as_slice()]);
                        }
                    }
                }
                out
            })
            .collect();
        Self { neighbours }
    }

    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.neighbours.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbours[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Edge weights of a minimum spanning tree (Prim, O(n^2)).
pub fn mst_weights(d: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    if n == 0 {
        return vec![];
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut weights = Vec::new();
    for step in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[u] = true;
        if step > 0 {
            weights.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] && d[u][v] < best[v] {
                best[v] = d[u][v];
            }
        }
    }
    weights
}

/// Finite H1 pairs `(birth, death)` of the Vietoris-Rips filtration, by
/// textbook column reduction of the full boundary matrix over all
/// vertices, edges and triangles. Zero-persistence pairs are dropped.
pub fn brute_h1(d: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = d.len();
    // (value, dim, vertices)
    let mut simplices: Vec<(f64, usize, Vec<usize>)> = (0..n).map(|i| (0.0, 0, vec![i])).collect();
    for i in 0..n {
        for j in i + 1..n {
            simplices.push((d[i][j], 1, vec![i, j]));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = d[i][j].max(d[i][k]).max(d[j][k]);
                simplices.push((v, 2, vec![i, j, k]));
            }
        }
    }
    simplices.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let position: std::collections::HashMap<Vec<usize>, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.2.clone(), i)).collect();

    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|(_, dim, v)| {
            if *dim == 0 {
                return vec![];
            }
            let mut faces: Vec<usize> = (0..v.len())
                .map(|skip| {
                    let face: Vec<usize> = v
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    position[&face]
                })
                .collect();
            faces.sort_unstable();
            faces
        })
        .collect();

    let mut low_owner: std::collections::HashMap<usize, usize> = Default::default();
    let mut pairs = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_owner.get(&low) {
                Some(&k) => {
                    let other = columns[k].clone();
                    columns[j] = symmetric_difference(&columns[j], &other);
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            low_owner.insert(low, j);
            if simplices[j].1 == 2 {
                let (birth, death) = (simplices[low].0, simplices[j].0);
                if death > birth {
                    pairs.push((birth, death));
                }
            }
        }
    }
    pairs
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
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

/// Bottleneck distance between finite diagrams as the minimum, over every
/// partial matching, of the largest L-infinity distance between matched
/// points and half-persistence of unmatched points.
pub fn brute_bottleneck(p: &[(f64, f64)], q: &[(f64, f64)]) -> f64 {
    fn rec(p: &[(f64, f64)], q: &[(f64, f64)], i: usize, used: &mut Vec<bool>, worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        if i == p.len() {
            let rest = q
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(pt, _)| (pt.1 - pt.0) / 2.0)
                .fold(worst, f64::max);
            *best = best.min(rest);
            return;
        }
        let (b, d) = p[i];
        rec(p, q, i + 1, used, worst.max((d - b) / 2.0), best);
        for j in 0..q.len() {
            if !used[j] {
                used[j] = true;
                let c = (b - q[j].0).abs().max((d - q[j].1).abs());
                rec(p, q, i + 1, used, worst.max(c), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(p, q, 0, &mut vec![false; q.len()], 0.0, &mut best);
    best
}

/// Symmetric Hausdorff distance by the double loop over both sets.
pub fn brute_hausdorff(x: &Array2<f64>, y: &Array2<f64>) -> f64 {
    let directed = |a: &Array2<f64>, b: &Array2<f64>| {
        a.rows()
            .into_iter()
            .map(|r| {
                b.rows()
                    .into_iter()
                    .map(|s| euclidean(r, s))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(x, y).max(directed(y, x))
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

pub fn sorted_pairs(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}
