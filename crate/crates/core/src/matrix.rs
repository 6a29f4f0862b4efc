use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Dense binary matrix with 1-based accessors.
///
/// Serialized as an array of rows of 0/1 integers. Parsed from text either
/// as that JSON form or as an ASCII grid of `0`/`1` characters, one row per
/// line (whitespace between digits is ignored).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return domain(format!("matrix must be at least 1x1, got {rows}x{cols}"));
        }
        Ok(BinaryMatrix {
            rows,
            cols,
            cells: vec![false; rows * cols],
        })
    }

    pub fn ones(rows: usize, cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        m.cells.fill(true);
        Ok(m)
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::from_fn(k, k, |i, j| i == j)
    }

    /// Builds a matrix from a predicate on 1-based `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        for i in 1..=rows {
            for j in 1..=cols {
                m.cells[(i - 1) * cols + (j - 1)] = f(i, j);
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return domain(format!("row {} has {} entries, expected {c}", i + 1, row.len()));
            }
            if let Some(v) = row.iter().find(|&&v| v > 1) {
                return domain(format!("row {} holds non-binary value {v}", i + 1));
            }
        }
        Self::from_fn(r, c, |i, j| rows[i - 1][j - 1] == 1)
    }

    /// Uniformly random matrix where each entry is 1 with probability `p`.
    pub fn random(rows: usize, cols: usize, p: f64, rng: &mut impl rand::Rng) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| rng.gen_bool(p))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn check(&self, i: usize, j: usize) -> Result<usize> {
        if i == 0 || j == 0 || i > self.rows || j > self.cols {
            return domain(format!("index ({i},{j}) outside {}x{} matrix", self.rows, self.cols));
        }
        Ok((i - 1) * self.cols + (j - 1))
    }

    /// Entry at 1-based `(i, j)`. Panics out of bounds.
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[self.check(i, j).expect("matrix index in bounds")]
    }

    pub fn try_get(&self, i: usize, j: usize) -> Result<bool> {
        Ok(self.cells[self.check(i, j)?])
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) -> Result<()> {
        let k = self.check(i, j)?;
        self.cells[k] = v;
        Ok(())
    }

    pub fn ones_count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        !self.cells.iter().any(|&b| b)
    }

    /// All 1-entries in row-major order.
    pub fn ones_positions(&self) -> Vec<(usize, usize)> {
        (1..=self.rows)
            .flat_map(|i| (1..=self.cols).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j))
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (1..=self.rows)
            .map(|i| (1..=self.cols).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    pub fn to_grid(&self) -> String {
        self.to_string()
    }

    pub fn parse_grid(text: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, line)| {
                line.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(Error::Domain(format!("line {}: unexpected character {other:?}", i + 1))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Self::from_rows(&rows)
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('[') {
            serde_json::from_str(s).map_err(|e| Error::Domain(format!("matrix JSON: {e}")))
        } else {
            Self::parse_grid(s)
        }
    }
}

impl Serialize for BinaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BinaryMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        BinaryMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_json_agree() {
        let m: BinaryMatrix = "110\n010\n011\n".parse().unwrap();
        let j: BinaryMatrix = "[[1,1,0],[0,1,0],[0,1,1]]".parse().unwrap();
        assert_eq!(m, j);
        assert_eq!(m.to_grid(), "110\n010\n011\n");
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[1,1,0],[0,1,0],[0,1,1]]");
        assert_eq!(m.ones_positions()[..2], [(1, 1), (1, 2)]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!("10\n1".parse::<BinaryMatrix>().is_err());
        assert!("12".parse::<BinaryMatrix>().is_err());
        assert!("".parse::<BinaryMatrix>().is_err());
        assert!(BinaryMatrix::zeros(0, 3).is_err());
        assert!(BinaryMatrix::zeros(2, 2).unwrap().try_get(3, 1).is_err());
    }
}
