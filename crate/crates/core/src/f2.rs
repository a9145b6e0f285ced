//! Dense matrices over F₂ packed 64 columns per word.

use crate::error::{check_dim, invalid, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    hollow_symmetric: bool,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64).max(1);
        Self {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
            hollow_symmetric: false,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from explicit rows of booleans.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            check_dim(cols, row.len())?;
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        Ok(m)
    }

    /// Square matrix declared hollow-symmetric; the flag is verified.
    pub fn hollow_symmetric(m: F2Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return invalid("hollow-symmetric matrix must be square");
        }
        for i in 0..m.rows {
            if m.get(i, i) {
                return invalid(format!("diagonal entry {i} is nonzero"));
            }
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return invalid(format!("entries ({i},{j}) and ({j},{i}) differ"));
                }
            }
        }
        Ok(Self {
            hollow_symmetric: true,
            ..m
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_hollow_symmetric(&self) -> bool {
        self.hollow_symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.words_per_row + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.words_per_row + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    /// Toggles (i,j) and, for hollow-symmetric use, (j,i) too.
    pub fn flip_symmetric(&mut self, i: usize, j: usize) {
        let a = self.get(i, j);
        self.set(i, j, !a);
        let b = self.get(j, i);
        self.set(j, i, !b);
    }

    pub fn mark_hollow_symmetric(mut self) -> Self {
        self.hollow_symmetric = true;
        self
    }
}

/// Rank over F₂ by word-parallel Gaussian elimination.
pub fn f2_rank(m: &F2Matrix) -> usize {
    let mut work: Vec<Vec<u64>> = m
        .bits
        .chunks_exact(m.words_per_row)
        .map(|r| r.to_vec())
        .collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let (word, bit) = (col / 64, 1u64 << (col % 64));
        let Some(pivot) = (rank..work.len()).find(|&r| work[r][word] & bit != 0) else {
            continue;
        };
        work.swap(rank, pivot);
        let pivot_row = work[rank].clone();
        for (r, row) in work.iter_mut().enumerate() {
            if r != rank && row[word] & bit != 0 {
                row.iter_mut().zip(&pivot_row).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    rank
}
