//! Paths, path pairs and the pairwise interference relation between their
//! sending nodes.
//!
//! Sending nodes of a pair are indexed globally: path 1's senders come first
//! in sequence order, then path 2's. That order is also the `(path_id, seq)`
//! lexicographic order used for every deterministic tie-break downstream.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{bit, bits, Mask};

/// Largest number of sending nodes a pair may hold in total.
pub const MAX_TOTAL_SENDERS: usize = 64;

/// A sending node: the `seq`-th sender (1-based) of path `path_id`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    pub path_id: u8,
    pub seq: usize,
}

impl NodeRef {
    pub const fn new(path_id: u8, seq: usize) -> Self {
        NodeRef { path_id, seq }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n({},{})", self.path_id, self.seq)
    }
}

/// A linear multi-hop route of `n_senders` senders followed by one final
/// receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryPath {
    pub id: u8,
    pub n_senders: usize,
}

impl PrimaryPath {
    pub fn new(id: u8, n_senders: usize) -> Result<Self> {
        if id != 1 && id != 2 {
            return domain(format!("path id must be 1 or 2, got {id}"));
        }
        if n_senders == 0 {
            return domain(format!("path {id} must have at least one sending node"));
        }
        Ok(PrimaryPath { id, n_senders })
    }

    pub fn senders(&self) -> impl Iterator<Item = NodeRef> + '_ {
        (1..=self.n_senders).map(move |seq| NodeRef::new(self.id, seq))
    }
}

/// Symmetric, irreflexive interference predicate over the global sender
/// indices of a pair. Concurrency is its complement on distinct nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterferenceRelation {
    adj: Vec<Mask>,
}

impl InterferenceRelation {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_TOTAL_SENDERS {
            return domain(format!("at most {MAX_TOTAL_SENDERS} sending nodes supported, got {n}"));
        }
        Ok(InterferenceRelation { adj: vec![0; n] })
    }

    /// Builds a relation from a predicate on global indices. The predicate is
    /// consulted for `i < j` only; the result is symmetric by construction.
    pub fn from_fn(n: usize, mut interferes: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut rel = Self::empty(n)?;
        for i in 0..n {
            for j in i + 1..n {
                if interferes(i, j) {
                    rel.adj[i] |= bit(j);
                    rel.adj[j] |= bit(i);
                }
            }
        }
        Ok(rel)
    }

    /// Builds a relation from a full square 0/1 matrix, rejecting asymmetric
    /// input or a non-zero diagonal.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Config(format!(
                    "relation row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|&v| v > 1) {
                return Err(Error::Config(format!("relation row {i} is not binary")));
            }
            if row[i] != 0 {
                return Err(Error::Config(format!(
                    "relation diagonal entry {i} must be 0: a node never interferes with itself"
                )));
            }
        }
        let mut lower = (0..n).flat_map(|i| (0..i).map(move |j| (i, j)));
        if let Some((i, j)) = lower.find(|&(i, j)| rows[i][j] != rows[j][i]) {
            return Err(Error::Config(format!("relation is not symmetric at ({i},{j})")));
        }
        Self::from_fn(n, |i, j| rows[i][j] == 1)
    }

    /// Window relation on a single path: senders `j != k` interfere iff
    /// `|j - k| < width`. Its maximum interference clique has `width` nodes
    /// (capped at `n`).
    pub fn window(n: usize, width: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| j - i < width)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn interferes_idx(&self, i: usize, j: usize) -> bool {
        self.adj[i] & bit(j) != 0
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.interferes_idx(i, j) as u8).collect())
            .collect()
    }

    pub(crate) fn adjacency(&self) -> &[Mask] {
        &self.adj
    }
}

/// One or two primary paths sharing an interference environment.
///
/// Single-path scenarios are represented with `path2 == None`; every
/// operation that needs both paths rejects them with a domain error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPair {
    path1: PrimaryPath,
    path2: Option<PrimaryPath>,
    relation: InterferenceRelation,
}

impl PathPair {
    pub fn new(path1: PrimaryPath, path2: Option<PrimaryPath>, relation: InterferenceRelation) -> Result<Self> {
        if path1.id != 1 {
            return domain("first path must have id 1");
        }
        if let Some(p2) = path2 {
            if p2.id != 2 {
                return domain("second path must have id 2");
            }
        }
        let total = path1.n_senders + path2.map_or(0, |p| p.n_senders);
        if relation.len() != total {
            return Err(Error::Config(format!(
                "relation covers {} nodes but the paths declare {total} sending nodes",
                relation.len()
            )));
        }
        Ok(PathPair {
            path1,
            path2,
            relation,
        })
    }

    pub fn single(n_senders: usize, relation: InterferenceRelation) -> Result<Self> {
        Self::new(PrimaryPath::new(1, n_senders)?, None, relation)
    }

    pub fn pair(n1: usize, n2: usize, relation: InterferenceRelation) -> Result<Self> {
        Self::new(PrimaryPath::new(1, n1)?, Some(PrimaryPath::new(2, n2)?), relation)
    }

    /// Builds a pair from a predicate over node references.
    pub fn from_predicate(
        n1: usize,
        n2: Option<usize>,
        mut interferes: impl FnMut(NodeRef, NodeRef) -> bool,
    ) -> Result<Self> {
        let path1 = PrimaryPath::new(1, n1)?;
        let path2 = n2.map(|n| PrimaryPath::new(2, n)).transpose()?;
        let total = n1 + n2.unwrap_or(0);
        let node = |i: usize| {
            if i < n1 {
                NodeRef::new(1, i + 1)
            } else {
                NodeRef::new(2, i - n1 + 1)
            }
        };
        let relation = InterferenceRelation::from_fn(total, |i, j| interferes(node(i), node(j)))?;
        Self::new(path1, path2, relation)
    }

    pub fn path1(&self) -> &PrimaryPath {
        &self.path1
    }

    pub fn path2(&self) -> Option<&PrimaryPath> {
        self.path2.as_ref()
    }

    pub fn is_pair(&self) -> bool {
        self.path2.is_some()
    }

    pub fn relation(&self) -> &InterferenceRelation {
        &self.relation
    }

    pub fn path(&self, id: u8) -> Result<&PrimaryPath> {
        match (id, &self.path2) {
            (1, _) => Ok(&self.path1),
            (2, Some(p)) => Ok(p),
            (2, None) => domain("scenario declares only path 1"),
            _ => domain(format!("path id must be 1 or 2, got {id}")),
        }
    }

    pub fn paths(&self) -> impl Iterator<Item = &PrimaryPath> {
        std::iter::once(&self.path1).chain(self.path2.iter())
    }

    /// Total number of sending nodes over both paths.
    pub fn total_senders(&self) -> usize {
        self.relation.len()
    }

    pub fn index_of(&self, node: NodeRef) -> Result<usize> {
        let path = self.path(node.path_id)?;
        if node.seq == 0 || node.seq > path.n_senders {
            return domain(format!(
                "{node} is outside path {} ({} sending nodes)",
                path.id, path.n_senders
            ));
        }
        Ok(match node.path_id {
            1 => node.seq - 1,
            _ => self.path1.n_senders + node.seq - 1,
        })
    }

    pub fn node_at(&self, idx: usize) -> NodeRef {
        if idx < self.path1.n_senders {
            NodeRef::new(1, idx + 1)
        } else {
            NodeRef::new(2, idx - self.path1.n_senders + 1)
        }
    }

    pub fn all_nodes(&self) -> Vec<NodeRef> {
        (0..self.total_senders()).map(|i| self.node_at(i)).collect()
    }

    pub fn interferes(&self, a: NodeRef, b: NodeRef) -> Result<bool> {
        Ok(self.relation.interferes_idx(self.index_of(a)?, self.index_of(b)?))
    }

    /// Concurrency holds for a node with itself and for every distinct
    /// non-interfering pair.
    pub fn concurrent(&self, a: NodeRef, b: NodeRef) -> Result<bool> {
        Ok(a == b || !self.interferes(a, b)?)
    }

    pub(crate) fn mask_of(&self, nodes: &[NodeRef]) -> Result<Mask> {
        nodes
            .iter()
            .try_fold(0, |m, &n| Ok(m | bit(self.index_of(n)?)))
    }

    pub(crate) fn nodes_of(&self, mask: Mask) -> Vec<NodeRef> {
        bits(mask).map(|i| self.node_at(i)).collect()
    }

    pub(crate) fn adjacency(&self) -> &[Mask] {
        self.relation.adjacency()
    }

    pub(crate) fn mask_is_concurrent(&self, mask: Mask) -> bool {
        let adj = self.adjacency();
        bits(mask).all(|i| adj[i] & mask == 0)
    }
}

/// True iff no two distinct members of `nodes` interfere. Singletons are
/// always concurrency subsets.
pub fn is_concurrency_subset(pair: &PathPair, nodes: &[NodeRef]) -> Result<bool> {
    if nodes.is_empty() {
        return domain("a concurrency subset must be nonempty");
    }
    Ok(pair.mask_is_concurrent(pair.mask_of(nodes)?))
}

/// A 1D or 2D position in abstract distance units. 1D inputs use `y = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        match v.as_slice() {
            [x] => Ok(Point::new(*x, 0.0)),
            [x, y] => Ok(Point::new(*x, *y)),
            _ => Err(serde::de::Error::custom(format!(
                "a position needs 1 or 2 coordinates, got {}",
                v.len()
            ))),
        }
    }
}

fn default_half_duplex() -> bool {
    true
}

/// Disk interference model: positions for every node of every path (senders
/// plus the final receiver), a common interference radius and a half-duplex
/// flag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricTopology {
    /// Keyed by path id; entry `k` is the position of node `k + 1`.
    pub positions: BTreeMap<u8, Vec<Point>>,
    pub interference_radius: f64,
    #[serde(default = "default_half_duplex")]
    pub half_duplex: bool,
}

impl GeometricTopology {
    /// Evenly spaced collinear positions for a single path of `n_senders`
    /// senders starting at the origin.
    pub fn line(n_senders: usize, spacing: f64, radius: f64) -> Self {
        let pts = (0..=n_senders).map(|k| Point::new(k as f64 * spacing, 0.0)).collect();
        GeometricTopology {
            positions: BTreeMap::from([(1, pts)]),
            interference_radius: radius,
            half_duplex: true,
        }
    }

    fn position(&self, path: u8, node: usize) -> Result<Point> {
        self.positions
            .get(&path)
            .and_then(|v| v.get(node - 1))
            .copied()
            .ok_or_else(|| Error::Config(format!("missing position for node {node} of path {path}")))
    }

    /// Derives the pairwise interference relation.
    ///
    /// Sender `a` interferes with sender `b` iff `a` lies within the radius of
    /// `b`'s receiver, or `b` lies within the radius of `a`'s receiver, or
    /// (half duplex) one sender's receiver is the other sender.
    pub fn derive_relation(&self, paths: &[PrimaryPath]) -> Result<InterferenceRelation> {
        if !(self.interference_radius.is_finite() && self.interference_radius >= 0.0) {
            return Err(Error::Config(format!(
                "interference radius must be a finite non-negative number, got {}",
                self.interference_radius
            )));
        }
        let mut senders = Vec::new();
        for p in paths {
            for seq in 1..=p.n_senders {
                senders.push((p.id, seq, self.position(p.id, seq)?, self.position(p.id, seq + 1)?));
            }
        }
        for p in paths {
            if let Some(v) = self.positions.get(&p.id) {
                if v.len() > p.n_senders + 1 {
                    return Err(Error::Config(format!(
                        "path {} lists {} positions but has only {} nodes",
                        p.id,
                        v.len(),
                        p.n_senders + 1
                    )));
                }
            }
        }
        let r = self.interference_radius;
        InterferenceRelation::from_fn(senders.len(), |i, j| {
            let (pa, sa, txa, rxa) = senders[i];
            let (pb, sb, txb, rxb) = senders[j];
            let same_node_link = pa == pb && sa.abs_diff(sb) == 1;
            txa.distance(&rxb) <= r || txb.distance(&rxa) <= r || (self.half_duplex && same_node_link)
        })
    }

    /// Builds the pair directly from the topology.
    pub fn build_pair(&self, path1: PrimaryPath, path2: Option<PrimaryPath>) -> Result<PathPair> {
        let paths: Vec<_> = std::iter::once(path1).chain(path2).collect();
        PathPair::new(path1, path2, self.derive_relation(&paths)?)
    }
}

/// One violation of the monotone concurrency rules within a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleViolation {
    /// 3: `j ∥ k` but `j` interferes with `k + 1`.
    /// 4: `j ∥ k` but `j - 1` interferes with `k`.
    pub rule: u8,
    pub j: usize,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleReport {
    pub path_id: u8,
    pub rule3_holds: bool,
    pub rule4_holds: bool,
    pub violations: Vec<RuleViolation>,
}

impl RuleReport {
    pub fn holds(&self) -> bool {
        self.rule3_holds && self.rule4_holds
    }
}

/// Checks, for every `j < k` with `j ∥ k`, that concurrency persists when the
/// later node moves downstream (`k + 1`) or the earlier one moves upstream
/// (`j - 1`).
pub fn validate_path_rules(pair: &PathPair, path_id: u8) -> Result<RuleReport> {
    let n = pair.path(path_id)?.n_senders;
    let node = |s| NodeRef::new(path_id, s);
    let mut violations = Vec::new();
    for j in 1..=n {
        for k in j + 1..=n {
            if pair.interferes(node(j), node(k))? {
                continue;
            }
            if k < n && pair.interferes(node(j), node(k + 1))? {
                violations.push(RuleViolation { rule: 3, j, k });
            }
            if j > 1 && pair.interferes(node(j - 1), node(k))? {
                violations.push(RuleViolation { rule: 4, j, k });
            }
        }
    }
    Ok(RuleReport {
        path_id,
        rule3_holds: violations.iter().all(|v| v.rule != 3),
        rule4_holds: violations.iter().all(|v| v.rule != 4),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize, radius: f64, half_duplex: bool) -> PathPair {
        let mut topo = GeometricTopology::line(n, 1.0, radius);
        topo.half_duplex = half_duplex;
        topo.build_pair(PrimaryPath::new(1, n).unwrap(), None).unwrap()
    }

    #[test]
    fn unit_line_radius_one_gives_window_three() {
        let pair = chain(8, 1.0, true);
        let n = |s| NodeRef::new(1, s);
        assert!(!pair.interferes(n(2), n(5)).unwrap());
        assert!(pair.interferes(n(2), n(4)).unwrap());
        assert!(pair.interferes(n(3), n(4)).unwrap());
        assert_eq!(pair.relation(), &InterferenceRelation::window(8, 3).unwrap());
    }

    #[test]
    fn half_duplex_adjacent_interfere() {
        let pair = chain(4, 0.0, true);
        assert!(pair.interferes(NodeRef::new(1, 2), NodeRef::new(1, 3)).unwrap());
    }

    #[test]
    fn zero_radius_non_adjacent_concurrent() {
        let pair = chain(6, 0.0, false);
        for j in 1..=6 {
            for k in j + 2..=6 {
                assert!(pair.concurrent(NodeRef::new(1, j), NodeRef::new(1, k)).unwrap());
            }
        }
    }

    #[test]
    fn missing_position_names_node() {
        let mut topo = GeometricTopology::line(3, 1.0, 1.0);
        topo.positions.get_mut(&1).unwrap().pop();
        let err = topo.build_pair(PrimaryPath::new(1, 3).unwrap(), None).unwrap_err();
        assert_eq!(err, Error::Config("missing position for node 4 of path 1".into()));
    }

    #[test]
    fn concurrency_subsets() {
        let pair = chain(6, 1.0, true);
        let n = |s| NodeRef::new(1, s);
        assert!(is_concurrency_subset(&pair, &[n(1)]).unwrap());
        assert!(!is_concurrency_subset(&pair, &[n(1), n(2)]).unwrap());
        assert!(is_concurrency_subset(&pair, &[n(1), n(4)]).unwrap());
        assert!(is_concurrency_subset(&pair, &[]).is_err());
        assert!(is_concurrency_subset(&pair, &[n(7)]).is_err());
    }

    #[test]
    fn window_relation_satisfies_rules() {
        for w in 1..5 {
            let pair = PathPair::single(9, InterferenceRelation::window(9, w).unwrap()).unwrap();
            assert!(validate_path_rules(&pair, 1).unwrap().holds());
        }
    }

    #[test]
    fn rule3_counterexample() {
        // 1 ∥ 4 but 1 interferes with 5.
        let pair = PathPair::from_predicate(5, None, |a, b| {
            let (j, k) = (a.seq.min(b.seq), a.seq.max(b.seq));
            k - j < 3 || (j, k) == (1, 5)
        })
        .unwrap();
        let report = validate_path_rules(&pair, 1).unwrap();
        assert!(!report.rule3_holds);
        assert!(report.violations.contains(&RuleViolation { rule: 3, j: 1, k: 4 }));
    }

    #[test]
    fn single_sender_rules_vacuous() {
        let pair = chain(1, 3.0, true);
        let report = validate_path_rules(&pair, 1).unwrap();
        assert!(report.holds());
        assert!(report.violations.is_empty());
    }

    #[test]
    fn explicit_matrix_validation() {
        assert!(InterferenceRelation::from_matrix(&[vec![0, 1], vec![0, 0]]).is_err());
        assert!(InterferenceRelation::from_matrix(&[vec![1, 0], vec![0, 0]]).is_err());
        let rel = InterferenceRelation::from_matrix(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(rel.to_matrix(), vec![vec![0, 1], vec![1, 0]]);
    }
}
