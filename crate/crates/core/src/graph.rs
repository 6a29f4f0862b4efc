//! Exact clique routines over small graphs stored as `u64` adjacency masks.
//!
//! Vertex `i` is bit `i`. All routines take a candidate mask restricting the
//! search to an induced subgraph. Callers pass graphs of at most 64 vertices.

pub(crate) type Mask = u64;

#[inline]
pub(crate) fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

#[inline]
pub(crate) fn bit(i: usize) -> Mask {
    1u64 << i
}

/// Adjacency of the complement graph induced on `within`.
pub(crate) fn complement(adj: &[Mask], within: Mask) -> Vec<Mask> {
    adj.iter()
        .enumerate()
        .map(|(i, &row)| {
            if within & bit(i) != 0 {
                !row & within & !bit(i)
            } else {
                0
            }
        })
        .collect()
}

/// Size of a maximum clique inside `cand`.
pub(crate) fn max_clique_size(adj: &[Mask], cand: Mask) -> usize {
    let mut best = 0;
    expand(adj, 0, cand, &mut best);
    best
}

fn expand(adj: &[Mask], size: usize, mut cand: Mask, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    while cand != 0 {
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= !bit(v);
        expand(adj, size + 1, cand & adj[v], best);
    }
    *best = (*best).max(size);
}

/// The lexicographically smallest (by ascending vertex index) clique of size
/// `k` inside `cand`, if one exists.
pub(crate) fn lex_min_clique(adj: &[Mask], cand: Mask, k: usize) -> Option<Mask> {
    let mut chosen: Mask = 0;
    let mut allowed = cand;
    let mut need = k;
    for v in bits(cand) {
        if need == 0 {
            break;
        }
        if allowed & bit(v) == 0 {
            continue;
        }
        let later = allowed & adj[v] & !((bit(v) << 1) - 1);
        if 1 + max_clique_size(adj, later) >= need {
            chosen |= bit(v);
            allowed = later;
            need -= 1;
        }
    }
    (need == 0).then_some(chosen)
}

/// Every maximum clique inside `cand` (Bron–Kerbosch with pivoting).
pub(crate) fn all_max_cliques(adj: &[Mask], cand: Mask) -> Vec<Mask> {
    let target = max_clique_size(adj, cand);
    let mut out = Vec::new();
    bron_kerbosch(adj, 0, cand, 0, target, &mut out);
    out.sort_by(|a, b| bits(*a).cmp(bits(*b)));
    out
}

fn bron_kerbosch(adj: &[Mask], r: Mask, mut p: Mask, mut x: Mask, target: usize, out: &mut Vec<Mask>) {
    if p == 0 && x == 0 {
        if r.count_ones() as usize == target {
            out.push(r);
        }
        return;
    }
    if (r.count_ones() + p.count_ones()) < target as u32 {
        return;
    }
    let pivot = bits(p | x).max_by_key(|&u| (p & adj[u]).count_ones()).unwrap();
    for v in bits(p & !adj[pivot]) {
        bron_kerbosch(adj, r | bit(v), p & adj[v], x & adj[v], target, out);
        p &= !bit(v);
        x |= bit(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(n: usize, w: usize) -> Vec<Mask> {
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && i.abs_diff(j) < w)
                    .fold(0, |m, j| m | bit(j))
            })
            .collect()
    }

    #[test]
    fn window_cliques() {
        let adj = window(6, 3);
        let all = (1u64 << 6) - 1;
        assert_eq!(max_clique_size(&adj, all), 3);
        assert_eq!(lex_min_clique(&adj, all, 3), Some(0b111));
        let cliques = all_max_cliques(&adj, all);
        assert_eq!(cliques, vec![0b000111, 0b001110, 0b011100, 0b111000]);
    }

    #[test]
    fn empty_graph_has_singleton_cliques() {
        let adj = vec![0; 4];
        assert_eq!(max_clique_size(&adj, 0b1111), 1);
        assert_eq!(lex_min_clique(&adj, 0b1110, 1), Some(0b0010));
        assert_eq!(all_max_cliques(&adj, 0b1111).len(), 4);
    }

    #[test]
    fn complement_is_restricted() {
        let adj = window(4, 2);
        let comp = complement(&adj, 0b0111);
        assert_eq!(comp[0], 0b0100);
        assert_eq!(comp[3], 0);
    }
}
