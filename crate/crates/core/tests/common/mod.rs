//! Brute-force reference computations shared by the integration suites.
//! Everything here works from raw edge lists and formulas, not from the
//! library's metric or model code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn adjacency_matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in edges {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Random simple graph as a deduplicated edge list.
pub fn random_edges(n: usize, p: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn degrees(a: &[Vec<bool>]) -> Vec<usize> {
    a.iter().map(|row| row.iter().filter(|x| **x).count()).collect()
}

/// Local CC by enumerating every neighbor pair.
pub fn local_cc(a: &[Vec<bool>], v: usize) -> f64 {
    let nbrs: Vec<usize> = (0..a.len()).filter(|&u| a[v][u]).collect();
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0;
    for i in 0..d {
        for j in i + 1..d {
            if a[nbrs[i]][nbrs[j]] {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (d * (d - 1)) as f64
}

pub fn ccpd(a: &[Vec<bool>]) -> BTreeMap<usize, f64> {
    let deg = degrees(a);
    let mut out = BTreeMap::new();
    for d in deg.iter().copied().collect::<std::collections::BTreeSet<_>>() {
        let members: Vec<usize> = (0..a.len()).filter(|&v| deg[v] == d).collect();
        let sum: f64 = members.iter().map(|&v| local_cc(a, v)).sum();
        out.insert(d, sum / members.len() as f64);
    }
    out
}

pub fn degree_counts(a: &[Vec<bool>]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for d in degrees(a) {
        *out.entry(d).or_insert(0) += 1;
    }
    out
}

pub fn density(a: &[Vec<bool>]) -> f64 {
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let m: usize = degrees(a).iter().sum::<usize>() / 2;
    m as f64 / (n * (n - 1) / 2) as f64
}

/// RMSE over degrees `0..=max`, absent entries read as zero.
pub fn rmse(reference: &BTreeMap<usize, f64>, sample: &BTreeMap<usize, f64>) -> f64 {
    let max = reference.keys().chain(sample.keys()).copied().max().expect("non-empty");
    let mut ss = 0.0;
    for d in 0..=max {
        let e = reference.get(&d).unwrap_or(&0.0) - sample.get(&d).unwrap_or(&0.0);
        ss += e * e;
    }
    (ss / (max + 1) as f64).sqrt()
}

pub fn as_real(counts: &BTreeMap<usize, usize>) -> BTreeMap<usize, f64> {
    counts.iter().map(|(&d, &n)| (d, n as f64)).collect()
}

/// `Q = sum_i (e_ii - a_i^2)` from the explicit community-pair matrix.
pub fn modularity(n_communities: usize, labels: &[usize], edges: &[(usize, usize)]) -> f64 {
    let m = edges.len() as f64;
    let mut e = vec![vec![0.0; n_communities]; n_communities];
    for &(u, v) in edges {
        e[labels[u]][labels[v]] += 0.5 / m;
        e[labels[v]][labels[u]] += 0.5 / m;
    }
    (0..n_communities)
        .map(|i| {
            let a: f64 = e[i].iter().sum();
            e[i][i] - a * a
        })
        .sum()
}

/// Maximum modularity over every set partition of `0..n` (restricted growth
/// strings).
pub fn best_modularity(n: usize, edges: &[(usize, usize)]) -> f64 {
    let mut labels = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    fn recurse(i: usize, max_label: usize, labels: &mut [usize], edges: &[(usize, usize)], best: &mut f64) {
        if i == labels.len() {
            let q = modularity(max_label + 1, labels, edges);
            if q > *best {
                *best = q;
            }
            return;
        }
        for l in 0..=max_label + 1 {
            labels[i] = l;
            recurse(i + 1, max_label.max(l), labels, edges, best);
        }
    }
    if n == 0 {
        return best;
    }
    labels[0] = 0;
    recurse(1, 0, &mut labels, edges, &mut best);
    best
}

/// Exact GBTER pair probability written out from the model definition.
pub fn gbter_pair_probability(degrees: &[usize], labels: &[usize], p: &[f64], i: usize, j: usize) -> f64 {
    let size = |k: usize| labels.iter().filter(|&&l| l == k).count();
    let eps: Vec<f64> = (0..degrees.len())
        .map(|v| (degrees[v] as f64 - p[labels[v]] * (size(labels[v]) - 1) as f64).max(0.0))
        .collect();
    let total: f64 = eps.iter().sum();
    let cl = if total > 0.0 {
        (eps[i] * eps[j] / total).min(1.0)
    } else {
        0.0
    };
    if labels[i] == labels[j] {
        p[labels[i]] + (1.0 - p[labels[i]]) * cl
    } else {
        cl
    }
}

/// Sum and variance of the edge count under independent pair trials.
pub fn gbter_edge_moments(degrees: &[usize], labels: &[usize], p: &[f64]) -> (f64, f64) {
    let n = degrees.len();
    let mut sizes = BTreeMap::new();
    for &l in labels {
        *sizes.entry(l).or_insert(0usize) += 1;
    }
    let eps: Vec<f64> = (0..n)
        .map(|v| (degrees[v] as f64 - p[labels[v]] * (sizes[&labels[v]] - 1) as f64).max(0.0))
        .collect();
    let total: f64 = eps.iter().sum();
    let (mut mean, mut var) = (0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let cl = if total > 0.0 {
                (eps[i] * eps[j] / total).min(1.0)
            } else {
                0.0
            };
            let q = if labels[i] == labels[j] {
                p[labels[i]] + (1.0 - p[labels[i]]) * cl
            } else {
                cl
            };
            mean += q;
            var += q * (1.0 - q);
        }
    }
    (mean, var)
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Upper tail P(Z > x) of the standard normal (Abramowitz & Stegun 7.1.26,
/// absolute error below 1.5e-7).
pub fn normal_tail(x: f64) -> f64 {
    let z = x.abs() / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.3275911 * z);
    let poly = t * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erfc = poly * (-z * z).exp();
    if x >= 0.0 {
        0.5 * erfc
    } else {
        1.0 - 0.5 * erfc
    }
}
