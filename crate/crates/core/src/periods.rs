//! Equally spaced subsets, period reachability and joint concurrency
//! matrices.

use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::error::{domain, Error, Result};
use crate::graph::{bit, Mask};
use crate::matrix::BinaryMatrix;
use crate::model::{validate_path_rules, NodeRef, PathPair, PrimaryPath};

/// Senders `phase, phase + spacing, phase + 2·spacing, ...` of one path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EquallySpacedSubset {
    pub path_id: u8,
    pub phase: usize,
    pub spacing: usize,
}

impl EquallySpacedSubset {
    pub fn new(path: &PrimaryPath, phase: usize, spacing: usize) -> Result<Self> {
        if spacing == 0 || spacing > path.n_senders {
            return domain(format!(
                "spacing {spacing} outside 1..={} for path {}",
                path.n_senders, path.id
            ));
        }
        if phase == 0 || phase > spacing {
            return domain(format!("phase {phase} outside 1..={spacing}"));
        }
        Ok(EquallySpacedSubset {
            path_id: path.id,
            phase,
            spacing,
        })
    }

    pub fn members(&self, n_senders: usize) -> Vec<NodeRef> {
        (self.phase..=n_senders)
            .step_by(self.spacing)
            .map(|s| NodeRef::new(self.path_id, s))
            .collect()
    }

    pub(crate) fn mask(&self, pair: &PathPair) -> Mask {
        let offset = if self.path_id == 1 { 0 } else { pair.path1().n_senders };
        let n = pair.path(self.path_id).map_or(0, |p| p.n_senders);
        (self.phase..=n)
            .step_by(self.spacing)
            .fold(0, |m, s| m | bit(offset + s - 1))
    }
}

pub fn subset_members(path: &PrimaryPath, phase: usize, spacing: usize) -> Result<Vec<NodeRef>> {
    Ok(EquallySpacedSubset::new(path, phase, spacing)?.members(path.n_senders))
}

fn first_unreachable_phase(pair: &PathPair, path_id: u8, spacing: usize) -> Result<Option<usize>> {
    let path = pair.path(path_id)?;
    for phase in 1..=spacing {
        let s = EquallySpacedSubset::new(path, phase, spacing)?;
        if !pair.mask_is_concurrent(s.mask(pair)) {
            return Ok(Some(phase));
        }
    }
    Ok(None)
}

/// True iff every phase's equally spaced subset at `spacing` is free of
/// interference.
pub fn is_reachable_period(pair: &PathPair, path_id: u8, spacing: usize) -> Result<bool> {
    Ok(first_unreachable_phase(pair, path_id, spacing)?.is_none())
}

/// Smallest reachable period, found by ascending scan. When the path obeys
/// the monotone concurrency rules the result is checked against the
/// clique-computed interference intensity.
pub fn intrinsic_period(pair: &PathPair, path_id: u8) -> Result<usize> {
    let n = pair.path(path_id)?.n_senders;
    let found = (1..=n)
        .find(|&t| matches!(is_reachable_period(pair, path_id, t), Ok(true)))
        .ok_or_else(|| Error::Internal(format!("path {path_id} has no reachable period")))?;
    if validate_path_rules(pair, path_id)?.holds() {
        let nodes: Vec<_> = pair.path(path_id)?.senders().collect();
        let (intensity, _) = analysis::interference_intensity(pair, &nodes)?;
        if intensity != found {
            return Err(Error::Internal(format!(
                "path {path_id}: intrinsic period {found} differs from interference intensity {intensity}"
            )));
        }
    }
    Ok(found)
}

/// Joint concurrency matrix of a pair at spacings `(t1, t2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcurrencyMatrix {
    pub spacing1: usize,
    pub spacing2: usize,
    pub entries: BinaryMatrix,
}

/// Entry `(i, j)` is 1 iff the union of path 1's phase-`i` subset and path 2's
/// phase-`j` subset is free of interference. Both spacings must be reachable.
pub fn build_matrix(pair: &PathPair, t1: usize, t2: usize) -> Result<ConcurrencyMatrix> {
    if !pair.is_pair() {
        return domain("a concurrency matrix needs two paths");
    }
    for (id, t) in [(1, t1), (2, t2)] {
        if let Some(phase) = first_unreachable_phase(pair, id, t)? {
            return domain(format!(
                "spacing {t} is not reachable on path {id}: phase {phase} subset is not interference-free"
            ));
        }
    }
    let (p1, p2) = (*pair.path1(), *pair.path(2)?);
    let rows: Vec<Mask> = (1..=t1).map(|phase| EquallySpacedSubset::new(&p1, phase, t1).map(|s| s.mask(pair))).collect::<Result<_>>()?;
    let cols: Vec<Mask> = (1..=t2).map(|phase| EquallySpacedSubset::new(&p2, phase, t2).map(|s| s.mask(pair))).collect::<Result<_>>()?;
    let entries = BinaryMatrix::from_fn(t1, t2, |i, j| pair.mask_is_concurrent(rows[i - 1] | cols[j - 1]))?;
    Ok(ConcurrencyMatrix {
        spacing1: t1,
        spacing2: t2,
        entries,
    })
}

/// Block tiling of `matrix`: `l1` copies down, `l2` copies across.
pub fn continuation(matrix: &BinaryMatrix, l1: usize, l2: usize) -> Result<BinaryMatrix> {
    if l1 == 0 || l2 == 0 {
        return domain(format!("activation counts must be at least 1, got ({l1},{l2})"));
    }
    let (r, c) = (matrix.rows(), matrix.cols());
    BinaryMatrix::from_fn(l1 * r, l2 * c, |i, j| matrix.get((i - 1) % r + 1, (j - 1) % c + 1))
}
