//! Exhaustive reference computations used to cross-check the fast paths.
//! Everything here is exponential and meant for small inputs only.

use crate::error::{domain, Result};
use crate::graph::{bit, bits, Mask};
use crate::matrix::BinaryMatrix;
use crate::model::{NodeRef, PathPair};
use crate::periods::EquallySpacedSubset;

/// Largest pairwise-interfering subset of `nodes`, by trying every subset.
pub fn clique_by_subsets(pair: &PathPair, nodes: &[NodeRef]) -> Result<usize> {
    if nodes.len() > 20 {
        return domain("subset enumeration limited to 20 nodes");
    }
    let idx: Vec<usize> = nodes.iter().map(|&n| pair.index_of(n)).collect::<Result<_>>()?;
    let adj = pair.adjacency();
    let mut best = 0;
    for sub in 1u32..1 << idx.len() {
        let m: Mask = bits(sub as u64).fold(0, |m, k| m | bit(idx[k]));
        let size = m.count_ones() as usize;
        if size > best && bits(m).all(|i| (adj[i] | bit(i)) & m == m) {
            best = size;
        }
    }
    Ok(best)
}

/// Largest pairwise-concurrent subset of `nodes`, by trying every subset.
pub fn independent_by_subsets(pair: &PathPair, nodes: &[NodeRef]) -> Result<usize> {
    if nodes.len() > 20 {
        return domain("subset enumeration limited to 20 nodes");
    }
    let idx: Vec<usize> = nodes.iter().map(|&n| pair.index_of(n)).collect::<Result<_>>()?;
    let mut best = 0;
    for sub in 1u32..1 << idx.len() {
        let m: Mask = bits(sub as u64).fold(0, |m, k| m | bit(idx[k]));
        if m.count_ones() as usize > best && pair.mask_is_concurrent(m) {
            best = m.count_ones() as usize;
        }
    }
    Ok(best)
}

/// Fewest beats in any arrangement that activates every phase subset of
/// both paths exactly once, at most one subset per path per beat, with every
/// beat interference-free. Checks unions directly on the pair.
pub fn min_joint_period(pair: &PathPair, t1: usize, t2: usize) -> Result<usize> {
    let (p1, p2) = (*pair.path(1)?, *pair.path(2)?);
    let rows: Vec<Mask> = (1..=t1)
        .map(|ph| EquallySpacedSubset::new(&p1, ph, t1).map(|s| s.mask(pair)))
        .collect::<Result<_>>()?;
    let cols: Vec<Mask> = (1..=t2)
        .map(|ph| EquallySpacedSubset::new(&p2, ph, t2).map(|s| s.mask(pair)))
        .collect::<Result<_>>()?;
    if rows.iter().chain(&cols).any(|&m| !pair.mask_is_concurrent(m)) {
        return domain("every phase subset must be interference-free");
    }
    let mut best = t1 + t2;
    arrange(pair, &rows, &cols, 0, &mut vec![false; t2], 0, &mut best);
    Ok(best)
}

/// Assigns path-1 phase `r` either a beat of its own or a shared beat with
/// an unused path-2 phase; path-2 phases left over get beats of their own.
fn arrange(pair: &PathPair, rows: &[Mask], cols: &[Mask], r: usize, used: &mut [bool], shared: usize, best: &mut usize) {
    if r == rows.len() {
        *best = (*best).min(rows.len() + cols.len() - shared);
        return;
    }
    arrange(pair, rows, cols, r + 1, used, shared, best);
    for c in 0..cols.len() {
        if !used[c] && pair.mask_is_concurrent(rows[r] | cols[c]) {
            used[c] = true;
            arrange(pair, rows, cols, r + 1, used, shared + 1, best);
            used[c] = false;
        }
    }
}

/// Every partition of `nodes` into exactly `k` nonempty interference-free
/// groups. Groups are listed by smallest member; members ascending.
pub fn concurrent_partitions(pair: &PathPair, nodes: &[NodeRef], k: usize) -> Result<Vec<Vec<Vec<NodeRef>>>> {
    if nodes.len() > 12 {
        return domain("partition enumeration limited to 12 nodes");
    }
    let mut sorted = nodes.to_vec();
    sorted.sort();
    let idx: Vec<usize> = sorted.iter().map(|&n| pair.index_of(n)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut label = vec![0usize; idx.len()];
    growth(pair, &idx, 0, 0, k, &mut label, &mut out);
    Ok(out
        .into_iter()
        .map(|groups| groups.into_iter().map(|g| pair.nodes_of(g)).collect())
        .collect())
}

/// Restricted growth strings: node `i` joins an existing block or opens the
/// next one.
fn growth(pair: &PathPair, idx: &[usize], i: usize, blocks: usize, k: usize, label: &mut [usize], out: &mut Vec<Vec<Mask>>) {
    if i == idx.len() {
        if blocks == k {
            let mut groups = vec![0 as Mask; k];
            for (pos, &b) in label.iter().enumerate() {
                groups[b] |= bit(idx[pos]);
            }
            if groups.iter().all(|&g| pair.mask_is_concurrent(g)) {
                out.push(groups);
            }
        }
        return;
    }
    for b in 0..=blocks.min(k.saturating_sub(1)) {
        label[i] = b;
        growth(pair, idx, i + 1, blocks.max(b + 1), k, label, out);
    }
}

/// Every binary matrix of the given shape, in counting order.
pub fn all_matrices(rows: usize, cols: usize) -> impl Iterator<Item = BinaryMatrix> {
    let cells = rows * cols;
    (0u64..1 << cells).map(move |code| {
        BinaryMatrix::from_fn(rows, cols, |i, j| code >> ((i - 1) * cols + (j - 1)) & 1 == 1).expect("nonempty shape")
    })
}

/// A pair whose concurrency matrix at spacings `(rows, cols)` is exactly
/// `matrix`: each path has one sender per phase, senders within a path all
/// interfere, and path-1 sender `i` interferes with path-2 sender `j` iff
/// entry `(i, j)` is 0.
pub fn pair_realizing(matrix: &BinaryMatrix) -> Result<PathPair> {
    PathPair::from_predicate(matrix.rows(), Some(matrix.cols()), |a, b| {
        if a.path_id == b.path_id {
            return true;
        }
        let (x, y) = if a.path_id == 1 { (a, b) } else { (b, a) };
        !matrix.get(x.seq, y.seq)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InterferenceRelation;
    use crate::periods::build_matrix;

    #[test]
    fn window_partitions_unique() {
        let pair = PathPair::single(7, InterferenceRelation::window(7, 3).unwrap()).unwrap();
        let parts = concurrent_partitions(&pair, &pair.all_nodes(), 3).unwrap();
        assert_eq!(parts.len(), 1);
        let seqs: Vec<Vec<usize>> = parts[0].iter().map(|g| g.iter().map(|n| n.seq).collect()).collect();
        assert_eq!(seqs, vec![vec![1, 4, 7], vec![2, 5], vec![3, 6]]);
    }

    #[test]
    fn realized_matrix_round_trips() {
        let m = BinaryMatrix::from_rows(&[vec![1, 0, 1], vec![0, 0, 1]]).unwrap();
        let pair = pair_realizing(&m).unwrap();
        assert_eq!(build_matrix(&pair, 2, 3).unwrap().entries, m);
        assert_eq!(min_joint_period(&pair, 2, 3).unwrap(), 3);
    }

    #[test]
    fn matrix_enumeration_count() {
        assert_eq!(all_matrices(2, 2).count(), 16);
        assert_eq!(all_matrices(1, 3).filter(|m| m.is_zero()).count(), 1);
    }

    #[test]
    fn subset_oracles() {
        let pair = PathPair::single(6, InterferenceRelation::window(6, 3).unwrap()).unwrap();
        assert_eq!(clique_by_subsets(&pair, &pair.all_nodes()).unwrap(), 3);
        assert_eq!(independent_by_subsets(&pair, &pair.all_nodes()).unwrap(), 2);
    }
}
