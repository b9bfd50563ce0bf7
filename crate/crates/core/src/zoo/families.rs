use std::collections::BTreeMap;

use super::{invalid, ZooError};
use crate::oracle::{check_weights, OracleFlags, SetFunction, SubsetMask};

/// Cut function of an undirected graph with nonnegative edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphCut {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl GraphCut {
    /// Self-loops are rejected; parallel edges are merged by adding weights.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, ZooError> {
        if n == 0 {
            return Err(invalid("graph_cut", "n must be at least 1"));
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(invalid("graph_cut", format!("edge ({u}, {v}) has an endpoint outside 0..{n}")));
            }
            if u == v {
                return Err(invalid("graph_cut", format!("self-loop at {u}")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(invalid("graph_cut", format!("edge ({u}, {v}) has weight {w}, expected finite and >= 0")));
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges = merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        Ok(GraphCut { n, edges })
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }
}

impl SetFunction for GraphCut {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        if let Some(bits) = s.as_word() {
            self.edges
                .iter()
                .filter(|(u, v, _)| (bits >> u ^ bits >> v) & 1 == 1)
                .map(|e| e.2)
                .sum()
        } else {
            self.edges
                .iter()
                .filter(|(u, v, _)| s.contains(*u) != s.contains(*v))
                .map(|e| e.2)
                .sum()
        }
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::symmetric()
    }
}

/// Weighted coverage: `f(S)` is the total weight of universe items covered by
/// the members of `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coverage {
    item_weights: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

impl Coverage {
    pub fn new(item_weights: Vec<f64>, covers: Vec<Vec<usize>>) -> Result<Self, ZooError> {
        if covers.is_empty() {
            return Err(invalid("coverage", "at least one element is required"));
        }
        if let Some(i) = item_weights.iter().position(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(invalid("coverage", format!("item {i} has a negative or non-finite weight")));
        }
        for (v, c) in covers.iter().enumerate() {
            if let Some(&item) = c.iter().find(|&&i| i >= item_weights.len()) {
                return Err(invalid(
                    "coverage",
                    format!("element {v} covers item {item} outside 0..{}", item_weights.len()),
                ));
            }
        }
        Ok(Coverage { item_weights, covers })
    }

    pub fn item_weights(&self) -> &[f64] {
        &self.item_weights
    }

    pub fn covers(&self) -> &[Vec<usize>] {
        &self.covers
    }
}

impl SetFunction for Coverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        let mut covered = vec![false; self.item_weights.len()];
        let mut total = 0.0;
        for v in s.iter() {
            for &i in &self.covers[v] {
                if !covered[i] {
                    covered[i] = true;
                    total += self.item_weights[i];
                }
            }
        }
        total
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::monotone()
    }
}

/// Rank function of a partition matroid: `f(S) = Σ_i min(|S ∩ B_i|, cap_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionMatroid {
    block_of: Vec<usize>,
    caps: Vec<usize>,
}

impl PartitionMatroid {
    pub fn new(blocks: &[Vec<usize>], caps: Vec<usize>) -> Result<Self, ZooError> {
        if blocks.len() != caps.len() {
            return Err(invalid(
                "partition_matroid",
                format!("{} blocks but {} caps", blocks.len(), caps.len()),
            ));
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        if n == 0 {
            return Err(invalid("partition_matroid", "blocks cover no elements"));
        }
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                if v >= n || block_of[v] != usize::MAX {
                    return Err(invalid(
                        "partition_matroid",
                        format!("blocks are not a partition of 0..{n} (element {v})"),
                    ));
                }
                block_of[v] = b;
            }
        }
        Ok(PartitionMatroid { block_of, caps })
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.caps.len()];
        for (v, &b) in self.block_of.iter().enumerate() {
            out[b].push(v);
        }
        out
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }
}

impl SetFunction for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.block_of.len()
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        let mut counts = vec![0usize; self.caps.len()];
        for v in s.iter() {
            counts[self.block_of[v]] += 1;
        }
        counts.iter().zip(&self.caps).map(|(&c, &cap)| c.min(cap)).sum::<usize>() as f64
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::monotone()
    }
}

/// `f(S) = Σ_{v ∈ S} w(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Result<Self, ZooError> {
        if weights.is_empty() {
            return Err(invalid("modular", "at least one element is required"));
        }
        check_weights(weights.len(), &weights)?;
        Ok(Modular { weights })
    }

    pub fn cardinality(n: usize) -> Self {
        Modular { weights: vec![1.0; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        s.weight(&self.weights)
    }

    fn flags(&self) -> OracleFlags {
        let nonneg = self.weights.iter().all(|&w| w >= 0.0);
        OracleFlags { monotone: nonneg, symmetric: false, nonnegative: nonneg }
    }
}
