//! Seeded realisations of the intersection graph `G_q(n, K, P) ∩ G(n, p)`.
//!
//! Each node draws a uniform `K`-subset of the key pool. Two nodes are joined
//! when their rings share at least `q` keys and the channel between them is on.
//! Shared-key counts come from an inverted index (key → holders), so the cost is
//! the number of co-holder pairs rather than `n(n-1)/2`.

pub mod dump;
pub mod rng;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use dump::{read_edge_list, write_edge_list, EdgeListHeader};
pub use rng::{trial_seed, ChannelDraws};

use crate::analytic::ModelParams;
use crate::error::ParamError;

/// The key rings of all `n` nodes, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyRingSet {
    pool_size: u32,
    ring_size: usize,
    keys: Vec<u32>,
}

impl KeyRingSet {
    /// Builds a ring set from explicit rings. Every ring must hold `ring_size`
    /// distinct keys below `pool_size`; rings are sorted on the way in.
    pub fn from_rings(pool_size: u32, rings: Vec<Vec<u32>>) -> Result<Self, ParamError> {
        let ring_size = rings.first().map_or(0, Vec::len);
        let mut keys = Vec::with_capacity(rings.len() * ring_size);
        for mut ring in rings {
            ring.sort_unstable();
            ring.dedup();
            if ring.len() != ring_size || ring_size == 0 {
                return Err(ParamError::EmptyRing);
            }
            if ring.last().is_some_and(|&k| k >= pool_size) {
                return Err(ParamError::RingExceedsPool {
                    ring: ring_size,
                    pool: pool_size as usize,
                });
            }
            keys.extend(ring);
        }
        Ok(Self {
            pool_size,
            ring_size,
            keys,
        })
    }

    pub fn len(&self) -> usize {
        if self.ring_size == 0 {
            0
        } else {
            self.keys.len() / self.ring_size
        }
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn ring_size(&self) -> usize {
        self.ring_size
    }

    pub fn pool_size(&self) -> u32 {
        self.pool_size
    }

    pub fn ring(&self, node: usize) -> &[u32] {
        &self.keys[node * self.ring_size..(node + 1) * self.ring_size]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.keys.chunks_exact(self.ring_size.max(1))
    }
}

fn check_id_range(params: &ModelParams<f64>) -> Result<(), ParamError> {
    params.validate()?;
    if u32::try_from(params.n).is_err() {
        return Err(ParamError::TooLarge("node count"));
    }
    if u32::try_from(params.pool_size).is_err() {
        return Err(ParamError::TooLarge("key pool size"));
    }
    Ok(())
}

/// Draws `n` independent uniform `K`-subsets of `{0, .., P-1}` (Floyd's
/// algorithm), each sorted ascending.
pub fn sample_key_rings(params: &ModelParams<f64>, seed: u64) -> Result<KeyRingSet, ParamError> {
    check_id_range(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_rings(&mut rng, params.n, params.ring_size, params.pool_size as u32))
}

fn draw_rings(rng: &mut ChaCha8Rng, n: usize, ring_size: usize, pool_size: u32) -> KeyRingSet {
    let mut keys = Vec::with_capacity(n * ring_size);
    let mut taken = vec![false; pool_size as usize];
    let first = pool_size - ring_size as u32;
    for _ in 0..n {
        let start = keys.len();
        for j in first..pool_size {
            // u32 ranges keep the stream independent of the platform word size
            let t = rng.gen_range(0..=j);
            let pick = if taken[t as usize] { j } else { t };
            taken[pick as usize] = true;
            keys.push(pick);
        }
        let ring = &mut keys[start..];
        ring.sort_unstable();
        for &k in ring.iter() {
            taken[k as usize] = false;
        }
    }
    KeyRingSet {
        pool_size,
        ring_size,
        keys,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SharedPair {
    pub i: u32,
    pub j: u32,
    pub shared: u32,
}

/// Sparse shared-key counts: every pair `i < j` whose rings intersect, in
/// lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCounts {
    pairs: Vec<SharedPair>,
}

impl PairCounts {
    pub fn get(&self, i: u32, j: u32) -> u32 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.pairs
            .binary_search_by(|p| (p.i, p.j).cmp(&key))
            .map_or(0, |idx| self.pairs[idx].shared)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SharedPair> {
        self.pairs.iter()
    }
}

impl<'a> IntoIterator for &'a PairCounts {
    type Item = &'a SharedPair;
    type IntoIter = std::slice::Iter<'a, SharedPair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

/// Counts `|S_i ∩ S_j|` for every intersecting pair.
///
/// Holder lists are built in node order, so for node `i` the co-holders with a
/// larger index are a suffix of each of its keys' lists. A dense scratch row
/// accumulates the counts for `i`.
pub fn shared_key_counts(rings: &KeyRingSet) -> PairCounts {
    let n = rings.len();
    let mut holders: Vec<Vec<u32>> = vec![Vec::new(); rings.pool_size() as usize];
    for (node, ring) in rings.iter().enumerate() {
        for &key in ring {
            holders[key as usize].push(node as u32);
        }
    }

    let mut scratch = vec![0u32; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut pairs = Vec::new();
    for (i, ring) in rings.iter().enumerate() {
        let i = i as u32;
        for &key in ring {
            let list = &holders[key as usize];
            let after = list.partition_point(|&h| h <= i);
            for &j in &list[after..] {
                let slot = &mut scratch[j as usize];
                if *slot == 0 {
                    touched.push(j);
                }
                *slot += 1;
            }
        }
        touched.sort_unstable();
        for &j in &touched {
            pairs.push(SharedPair {
                i,
                j,
                shared: std::mem::take(&mut scratch[j as usize]),
            });
        }
        touched.clear();
    }
    PairCounts { pairs }
}

/// One realised graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSample {
    seed: u64,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl GraphSample {
    /// Builds a graph from undirected edges; duplicates and self-loops are dropped.
    pub fn from_edges(n: usize, seed: u64, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            if a != b {
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Self {
            seed,
            adjacency,
            edge_count: edge_count / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Sorted neighbours of `node`.
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            let i = i as u32;
            let start = list.partition_point(|&j| j <= i);
            list[start..].iter().map(move |&j| (i, j))
        })
    }

    /// Fraction of the `n(n-1)/2` node pairs that are joined.
    pub fn edge_density(&self) -> f64 {
        let n = self.n() as f64;
        self.edge_count as f64 / (n * (n - 1.0) / 2.0)
    }
}

/// Keeps the pairs that share at least `q` keys and whose channel is on.
pub fn intersect_with_channels(
    n: usize,
    seed: u64,
    counts: &PairCounts,
    q: usize,
    channel_prob: f64,
) -> GraphSample {
    let draws = ChannelDraws::new(seed, n, channel_prob);
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut edge_count = 0;
    for pair in counts {
        if pair.shared as usize >= q && draws.is_on(pair.i, pair.j) {
            // lexicographic pair order keeps both lists sorted
            adjacency[pair.i as usize].push(pair.j);
            adjacency[pair.j as usize].push(pair.i);
            edge_count += 1;
        }
    }
    GraphSample {
        seed,
        adjacency,
        edge_count,
    }
}

/// Samples `G_q(n, K, P) ∩ G(n, p)` from `seed`.
pub fn sample_graph(params: &ModelParams<f64>, seed: u64) -> Result<GraphSample, ParamError> {
    let rings = sample_key_rings(params, seed)?;
    let counts = shared_key_counts(&rings);
    Ok(intersect_with_channels(params.n, seed, &counts, params.q, params.channel_prob))
}
