//! Supporting-element sets of binary matrices.
//!
//! A supporting set is a set of 1-entries with pairwise distinct rows and
//! columns such that every 1-entry shares a row or a column with one of
//! them. Read as edges of the bipartite row/column graph, the first
//! condition says the set is a matching and the second that no further
//! 1-entry can be added to it, so supporting sets are exactly the maximal
//! matchings. The largest one is therefore a maximum matching.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::matrix::BinaryMatrix;

/// 1-based `(row, col)` entries, sorted by row.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSet {
    pub elements: Vec<(usize, usize)>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportViolation {
    /// The candidate names a 0-entry.
    ZeroEntry { row: usize, col: usize },
    /// A 1-entry shares neither row nor column with any candidate element.
    Uncovered { row: usize, col: usize },
    DuplicateRow { row: usize },
    DuplicateCol { col: usize },
}

impl fmt::Display for SupportViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroEntry { row, col } => write!(f, "element ({row},{col}) is a zero entry"),
            Self::Uncovered { row, col } => write!(f, "entry ({row},{col}) is not covered"),
            Self::DuplicateRow { row } => write!(f, "row {row} used more than once"),
            Self::DuplicateCol { col } => write!(f, "column {col} used more than once"),
        }
    }
}

/// Checks every supporting-set condition and lists each failure.
pub fn validate_support_set(matrix: &BinaryMatrix, candidate: &[(usize, usize)]) -> Result<Vec<SupportViolation>> {
    let mut row_used = vec![false; matrix.rows() + 1];
    let mut col_used = vec![false; matrix.cols() + 1];
    let mut out = Vec::new();
    for &(row, col) in candidate {
        if !matrix.try_get(row, col)? {
            out.push(SupportViolation::ZeroEntry { row, col });
        }
        if std::mem::replace(&mut row_used[row], true) {
            out.push(SupportViolation::DuplicateRow { row });
        }
        if std::mem::replace(&mut col_used[col], true) {
            out.push(SupportViolation::DuplicateCol { col });
        }
    }
    for (row, col) in matrix.ones_positions() {
        if !row_used[row] && !col_used[col] {
            out.push(SupportViolation::Uncovered { row, col });
        }
    }
    Ok(out)
}

pub fn is_support_set(matrix: &BinaryMatrix, candidate: &[(usize, usize)]) -> Result<bool> {
    Ok(validate_support_set(matrix, candidate)?.is_empty())
}

/// A maximum supporting set and its size, via augmenting paths. Rows are
/// tried in ascending order and each search explores columns ascending.
pub fn max_support_set(matrix: &BinaryMatrix) -> (SupportSet, usize) {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let adj: Vec<Vec<usize>> = (1..=rows)
        .map(|i| (1..=cols).filter(|&j| matrix.get(i, j)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; cols + 1];
    for r in 1..=rows {
        let mut seen = vec![false; cols + 1];
        augment(r, &adj, &mut owner, &mut seen);
    }
    let mut elements: Vec<_> = (1..=cols).filter_map(|c| owner[c].map(|r| (r, c))).collect();
    elements.sort_unstable();
    let size = elements.len();
    (SupportSet { elements }, size)
}

fn augment(row: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &c in &adj[row - 1] {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        if owner[c].map_or(true, |r| augment(r, adj, owner, seen)) {
            owner[c] = Some(row);
            return true;
        }
    }
    false
}

/// Largest supporting set found by enumerating every row- and
/// column-distinct selection of 1-entries and keeping those that validate.
pub fn brute_force_max_support(matrix: &BinaryMatrix) -> Result<usize> {
    if matrix.rows() * matrix.cols() > 30 {
        return domain(format!(
            "brute force limited to 30 cells, got {}x{}",
            matrix.rows(),
            matrix.cols()
        ));
    }
    let mut best = 0;
    let mut chosen = Vec::new();
    let mut col_used = vec![false; matrix.cols() + 1];
    enumerate(matrix, 1, &mut chosen, &mut col_used, &mut best)?;
    Ok(best)
}

fn enumerate(
    m: &BinaryMatrix,
    row: usize,
    chosen: &mut Vec<(usize, usize)>,
    col_used: &mut [bool],
    best: &mut usize,
) -> Result<()> {
    if row > m.rows() {
        if chosen.len() > *best && is_support_set(m, chosen)? {
            *best = chosen.len();
        }
        return Ok(());
    }
    enumerate(m, row + 1, chosen, col_used, best)?;
    for col in 1..=m.cols() {
        if m.get(row, col) && !col_used[col] {
            col_used[col] = true;
            chosen.push((row, col));
            enumerate(m, row + 1, chosen, col_used, best)?;
            chosen.pop();
            col_used[col] = false;
        }
    }
    Ok(())
}

/// Fewest rows plus columns covering every 1-entry, by exhaustive search
/// over row subsets.
pub fn brute_force_min_cover(matrix: &BinaryMatrix) -> Result<usize> {
    if matrix.rows() > 16 {
        return domain("cover brute force limited to 16 rows");
    }
    let best = (0u32..1 << matrix.rows())
        .map(|rows| {
            let cols = (1..=matrix.cols())
                .filter(|&j| (1..=matrix.rows()).any(|i| rows & (1 << (i - 1)) == 0 && matrix.get(i, j)))
                .count();
            rows.count_ones() as usize + cols
        })
        .min()
        .unwrap_or(0);
    Ok(best)
}
