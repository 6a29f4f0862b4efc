//! Intrinsic interference and concurrency structure of a node set.
//!
//! The interference intensity `I*` of a set is the size of a maximum clique
//! of the interference graph restricted to the set; the concurrency
//! intensity `C*` is the size of a maximum independent set. Both are
//! computed exactly. When several optimal sets exist, the witness is the
//! lexicographically smallest by `(path_id, seq)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{self, bit, bits, Mask};
use crate::model::{validate_path_rules, NodeRef, PathPair};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntensityReport {
    pub n_nodes: usize,
    pub interference_intensity: usize,
    pub concurrency_intensity: usize,
    pub intrinsic_interference_degree: usize,
    pub intrinsic_concurrency_degree: usize,
    pub dominant: bool,
    pub witness_interference_set: Vec<NodeRef>,
    pub witness_concurrency_set: Vec<NodeRef>,
}

/// Per-node connection degrees within a node set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDegree {
    pub node: NodeRef,
    /// Concurrent partners in the set, excluding the node itself.
    pub concurrency: usize,
    pub interference: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionDegrees {
    pub nodes: Vec<NodeDegree>,
    pub intrinsic_concurrency_degree: usize,
    pub intrinsic_interference_degree: usize,
}

fn nonempty_mask(pair: &PathPair, nodes: &[NodeRef]) -> Result<Mask> {
    if nodes.is_empty() {
        return domain("node set must be nonempty");
    }
    pair.mask_of(nodes)
}

pub(crate) fn clique_in(adj: &[Mask], set: Mask) -> (usize, Mask) {
    let size = graph::max_clique_size(adj, set);
    let witness = graph::lex_min_clique(adj, set, size).expect("a clique of the maximum size exists");
    (size, witness)
}

/// `I*` of `nodes` and a maximum interference clique attaining it. With no
/// interfering pair `I* = 1` and the witness is the first node.
pub fn interference_intensity(pair: &PathPair, nodes: &[NodeRef]) -> Result<(usize, Vec<NodeRef>)> {
    let set = nonempty_mask(pair, nodes)?;
    let (size, witness) = clique_in(pair.adjacency(), set);
    Ok((size, pair.nodes_of(witness)))
}

/// `C*` of `nodes` and a maximum second-order concurrency subset.
pub fn concurrency_intensity(pair: &PathPair, nodes: &[NodeRef]) -> Result<(usize, Vec<NodeRef>)> {
    let set = nonempty_mask(pair, nodes)?;
    let comp = graph::complement(pair.adjacency(), set);
    let (size, witness) = clique_in(&comp, set);
    Ok((size, pair.nodes_of(witness)))
}

pub fn connection_degrees(pair: &PathPair, nodes: &[NodeRef]) -> Result<ConnectionDegrees> {
    let set = pair.mask_of(nodes)?;
    let adj = pair.adjacency();
    let per: Vec<NodeDegree> = bits(set)
        .map(|i| {
            let interference = (adj[i] & set).count_ones() as usize;
            NodeDegree {
                node: pair.node_at(i),
                interference,
                concurrency: set.count_ones() as usize - 1 - interference,
            }
        })
        .collect();
    Ok(ConnectionDegrees {
        intrinsic_concurrency_degree: per.iter().map(|d| d.concurrency).max().unwrap_or(0),
        intrinsic_interference_degree: per.iter().map(|d| d.interference).max().unwrap_or(0),
        nodes: per,
    })
}

fn max_interference_degree(adj: &[Mask], set: Mask) -> usize {
    bits(set).map(|i| (adj[i] & set).count_ones() as usize).max().unwrap_or(0)
}

/// Dominant iff the largest interference degree is strictly below `I*`.
pub fn is_dominant(pair: &PathPair, nodes: &[NodeRef]) -> Result<bool> {
    let set = nonempty_mask(pair, nodes)?;
    let adj = pair.adjacency();
    Ok(max_interference_degree(adj, set) < graph::max_clique_size(adj, set))
}

pub fn intensity_report(pair: &PathPair, nodes: &[NodeRef]) -> Result<IntensityReport> {
    let (interference_intensity, wi) = interference_intensity(pair, nodes)?;
    let (concurrency_intensity, wc) = concurrency_intensity(pair, nodes)?;
    let degrees = connection_degrees(pair, nodes)?;
    Ok(IntensityReport {
        n_nodes: nodes.len(),
        interference_intensity,
        concurrency_intensity,
        intrinsic_interference_degree: degrees.intrinsic_interference_degree,
        intrinsic_concurrency_degree: degrees.intrinsic_concurrency_degree,
        dominant: degrees.intrinsic_interference_degree < interference_intensity,
        witness_interference_set: wi,
        witness_concurrency_set: wc,
    })
}

/// Splits a dominant set into exactly `I*` disjoint concurrency subsets.
///
/// Each group is seeded with one member of the witness clique; every other
/// node, in ascending `(path_id, seq)` order, joins the first group holding
/// none of its interferers. A node interferes with at most `I* - 1` others
/// in a dominant set, so some group always accepts it.
pub fn split_dominant(pair: &PathPair, nodes: &[NodeRef]) -> Result<Vec<Vec<NodeRef>>> {
    let set = nonempty_mask(pair, nodes)?;
    let adj = pair.adjacency();
    let (size, seed) = clique_in(adj, set);
    if max_interference_degree(adj, set) >= size {
        return Err(Error::Precondition("set not dominant".into()));
    }
    let mut groups: Vec<Mask> = bits(seed).map(bit).collect();
    for v in bits(set & !seed) {
        let slot = groups
            .iter_mut()
            .find(|g| **g & adj[v] == 0)
            .ok_or_else(|| Error::Internal(format!("no group accepts {}", pair.node_at(v))))?;
        *slot |= bit(v);
    }
    Ok(groups.into_iter().map(|g| pair.nodes_of(g)).collect())
}

/// Every maximum interference clique of `nodes`, each sorted, in
/// lexicographic order.
pub fn max_interference_cliques(pair: &PathPair, nodes: &[NodeRef]) -> Result<Vec<Vec<NodeRef>>> {
    let set = nonempty_mask(pair, nodes)?;
    Ok(graph::all_max_cliques(pair.adjacency(), set)
        .into_iter()
        .map(|c| pair.nodes_of(c))
        .collect())
}

/// True iff every maximum interference clique of the path is a run of
/// consecutive sequence numbers. Requires the monotone path rules.
pub fn check_continuity(pair: &PathPair, path_id: u8) -> Result<bool> {
    let report = validate_path_rules(pair, path_id)?;
    if !report.holds() {
        return Err(Error::Precondition(format!(
            "path {path_id} violates the monotone concurrency rules ({} violations)",
            report.violations.len()
        )));
    }
    let nodes: Vec<_> = pair.path(path_id)?.senders().collect();
    Ok(max_interference_cliques(pair, &nodes)?
        .iter()
        .all(|c| c.windows(2).all(|w| w[1].seq == w[0].seq + 1)))
}

/// `I*` of a path satisfying the monotone rules, by the window method: the
/// longest run of consecutive senders that pairwise interfere. Under the
/// rules a run pairwise interferes iff its two endpoints do.
pub fn window_intensity(pair: &PathPair, path_id: u8) -> Result<usize> {
    let n = pair.path(path_id)?.n_senders;
    let mut best = 1;
    for j in 1..=n {
        for k in j + 1..=n {
            if pair.interferes(NodeRef::new(path_id, j), NodeRef::new(path_id, k))? {
                best = best.max(k - j + 1);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InterferenceRelation;

    fn window(n: usize, w: usize) -> PathPair {
        PathPair::single(n, InterferenceRelation::window(n, w).unwrap()).unwrap()
    }

    fn seqs(v: &[NodeRef]) -> Vec<usize> {
        v.iter().map(|n| n.seq).collect()
    }

    fn all(pair: &PathPair) -> Vec<NodeRef> {
        pair.all_nodes()
    }

    #[test]
    fn window3_six_senders() {
        let p = window(6, 3);
        let (i, w) = interference_intensity(&p, &all(&p)).unwrap();
        assert_eq!((i, seqs(&w)), (3, vec![1, 2, 3]));
        let (c, w) = concurrency_intensity(&p, &all(&p)).unwrap();
        assert_eq!((c, seqs(&w)), (2, vec![1, 4]));
        let d = connection_degrees(&p, &all(&p)).unwrap();
        assert_eq!(d.nodes[2].interference, 4);
        assert_eq!(d.intrinsic_interference_degree, 4);
        assert!(!is_dominant(&p, &all(&p)).unwrap());
        assert_eq!(
            split_dominant(&p, &all(&p)).unwrap_err(),
            Error::Precondition("set not dominant".into())
        );
    }

    #[test]
    fn interference_free_set() {
        let p = window(5, 1);
        assert_eq!(interference_intensity(&p, &all(&p)).unwrap().0, 1);
        assert_eq!(concurrency_intensity(&p, &all(&p)).unwrap().0, 5);
        assert!(is_dominant(&p, &all(&p)).unwrap());
        let groups = split_dominant(&window(4, 1), &all(&window(4, 1))).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(seqs(&groups[0]), vec![1, 2, 3, 4]);
    }

    #[test]
    fn fully_interfering_pair() {
        let p = PathPair::from_predicate(2, Some(2), |_, _| true).unwrap();
        assert_eq!(interference_intensity(&p, &all(&p)).unwrap().0, 4);
        assert_eq!(concurrency_intensity(&p, &all(&p)).unwrap().0, 1);
        let d = connection_degrees(&p, &all(&p)).unwrap();
        assert!(d.nodes.iter().all(|n| n.interference == 3 && n.concurrency == 0));
    }

    #[test]
    fn window3_three_senders_is_dominant() {
        let p = window(3, 3);
        assert!(is_dominant(&p, &all(&p)).unwrap());
        let groups = split_dominant(&p, &all(&p)).unwrap();
        let got: Vec<_> = groups.iter().map(|g| seqs(g)).collect();
        assert_eq!(got, vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn singleton_degrees() {
        let p = window(3, 3);
        let d = connection_degrees(&p, &[NodeRef::new(1, 2)]).unwrap();
        assert_eq!((d.intrinsic_concurrency_degree, d.intrinsic_interference_degree), (0, 0));
    }

    #[test]
    fn empty_set_rejected() {
        let p = window(3, 3);
        assert!(interference_intensity(&p, &[]).is_err());
        assert!(concurrency_intensity(&p, &[]).is_err());
    }

    #[test]
    fn continuity() {
        assert!(check_continuity(&window(7, 3), 1).unwrap());
        assert!(check_continuity(&window(1, 1), 1).unwrap());
        let broken = PathPair::from_predicate(5, None, |a, b| {
            let (j, k) = (a.seq.min(b.seq), a.seq.max(b.seq));
            k - j < 3 || (j, k) == (1, 5)
        })
        .unwrap();
        assert!(matches!(check_continuity(&broken, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn window_method_matches_clique() {
        for n in 1..9 {
            for w in 1..=n {
                let p = window(n, w);
                let (i, _) = interference_intensity(&p, &all(&p)).unwrap();
                assert_eq!(window_intensity(&p, 1).unwrap(), i);
                assert_eq!(i, w);
            }
        }
    }
}
