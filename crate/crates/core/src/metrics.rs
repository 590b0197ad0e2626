//! Degree observables of a single graph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sampler::GraphSample;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub degrees: Vec<u32>,
    /// Minimum degree `δ`.
    pub min_degree: u32,
    /// `h → Φ_{n,h}`, the number of nodes with degree exactly `h`. Only
    /// degrees that occur are stored.
    pub count_by_degree: BTreeMap<u32, u32>,
}

impl DegreeStats {
    /// `Φ_{n,h}`.
    pub fn count_with_degree(&self, h: u32) -> u32 {
        self.count_by_degree.get(&h).copied().unwrap_or(0)
    }
}

pub fn degree_stats(graph: &GraphSample) -> DegreeStats {
    let degrees: Vec<u32> = (0..graph.n()).map(|v| graph.degree(v) as u32).collect();
    let mut count_by_degree = BTreeMap::new();
    for &d in &degrees {
        *count_by_degree.entry(d).or_insert(0) += 1;
    }
    let min_degree = degrees.iter().copied().min().unwrap_or(0);
    DegreeStats {
        degrees,
        min_degree,
        count_by_degree,
    }
}

/// `δ >= k`.
pub fn indicator_min_degree_at_least(stats: &DegreeStats, k: u32) -> bool {
    stats.min_degree >= k
}

/// Same event read off the degree counts: no node has degree below `k`.
pub fn no_degree_below(stats: &DegreeStats, k: u32) -> bool {
    stats.count_by_degree.range(..k).all(|(_, &count)| count == 0)
}
