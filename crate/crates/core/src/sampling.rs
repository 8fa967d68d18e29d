//! Deterministic random streams and weighted sampling primitives.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::num::Real;

/// Seeded random stream backed by ChaCha8.
///
/// The stream for a given seed is `ChaCha8Rng::seed_from_u64(seed)`, which is
/// specified independently of platform and word size.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a sequence of tags.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Stable 64-bit tag for a string (FNV-1a).
pub fn tag(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Walker/Vose alias table for O(1) draws from a discrete distribution.
#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
    total: f64,
}

impl AliasTable {
    /// Returns `None` when the weights sum to zero. Weights must be finite
    /// and non-negative.
    pub fn new<T: Real>(weights: &[T]) -> Result<Option<Self>> {
        let w: Vec<f64> = weights.iter().map(|x| x.as_f64()).collect();
        if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidParameter(format!("sampling weight {bad}")));
        }
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Ok(None);
        }
        let n = w.len();
        let mut prob: Vec<f64> = w.iter().map(|x| x * n as f64 / total).collect();
        let mut alias = vec![0; n];
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| prob[i] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s] = l;
            prob[l] = (prob[l] + prob[s]) - 1.0;
            if prob[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
        }
        // zero-weight entries must never be drawn, even via rounding
        for (i, x) in w.iter().enumerate() {
            if *x == 0.0 {
                prob[i] = 0.0;
            }
        }
        Ok(Some(Self { prob, alias, total }))
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }
}

/// Maximum redraws when a sampled endpoint pair coincides.
pub const MAX_ENDPOINT_RETRIES: usize = 1000;

/// Draws endpoint pairs `(i, j)`, `i != j`, each endpoint independently with
/// probability proportional to its weight.
#[derive(Debug, Clone)]
pub struct EndpointSampler {
    table: AliasTable,
    support: usize,
    nodes: Option<Vec<NodeId>>,
}

impl EndpointSampler {
    pub fn new<T: Real>(weights: &[T]) -> Result<Self> {
        let support = weights.iter().filter(|w| **w > T::zero()).count();
        let table = AliasTable::new(weights)?.ok_or_else(|| Error::DegenerateWeights("total weight is zero".into()))?;
        Ok(Self {
            table,
            support,
            nodes: None,
        })
    }

    /// Sampler over a subset of nodes; `weights[k]` belongs to `nodes[k]`.
    pub fn over<T: Real>(nodes: Vec<NodeId>, weights: &[T]) -> Result<Self> {
        let mut s = Self::new(weights)?;
        s.nodes = Some(nodes);
        Ok(s)
    }

    /// Number of nodes with positive weight. Fewer than two means no pair can
    /// ever be drawn.
    pub fn support(&self) -> usize {
        self.support
    }

    pub fn total(&self) -> f64 {
        self.table.total()
    }

    fn node(&self, k: usize) -> NodeId {
        self.nodes.as_ref().map_or(k, |nodes| nodes[k])
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(NodeId, NodeId)> {
        for _ in 0..MAX_ENDPOINT_RETRIES {
            let a = self.table.sample(rng);
            let b = self.table.sample(rng);
            if a != b {
                return Ok((self.node(a), self.node(b)));
            }
        }
        Err(Error::DegenerateWeights(format!(
            "no distinct pair after {MAX_ENDPOINT_RETRIES} draws"
        )))
    }
}

/// Two distinct elements of `members`, uniformly without replacement.
pub fn uniform_pair<R: Rng + ?Sized>(members: &[NodeId], rng: &mut R) -> (NodeId, NodeId) {
    debug_assert!(members.len() >= 2);
    let a = rng.gen_range(0..members.len());
    let mut b = rng.gen_range(0..members.len() - 1);
    if b >= a {
        b += 1;
    }
    (members[a], members[b])
}
