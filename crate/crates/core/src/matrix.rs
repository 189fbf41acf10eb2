//! Dense Gaussian elimination over a [`Field`].
//!
//! Entries may live in any subfield; elimination only ever multiplies by
//! ratios of entries, so results stay in the subfield the inputs came from.

use crate::field::{Elem, Field};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<Elem>) -> Matrix {
        assert_eq!(rows * cols, data.len());
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, field: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Elem::ZERO;
                for k in 0..self.cols {
                    acc = field.add(acc, field.mul(self.get(r, k), other.get(k, c)));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn rank(&self, field: &Field) -> usize {
        let mut work = self.data.clone();
        rank_in_place(field, &mut work, self.rows, self.cols)
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self, field: &Field) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug: Vec<Vec<Elem>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend((0..n).map(|c| if c == r { Elem::ONE } else { Elem::ZERO }));
                row
            })
            .collect();
        let pivots = rref_rows(field, &mut aug);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let rows: Vec<Vec<Elem>> = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        Some(Matrix::from_rows(&rows))
    }
}

/// Rank of a row-major `rows × cols` block, destroying it.
pub fn rank_in_place(field: &Field, m: &mut [Elem], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !m[r * cols + col].is_zero()) else {
            continue;
        };
        if piv != rank {
            for c in col..cols {
                m.swap(piv * cols + c, rank * cols + c);
            }
        }
        let inv = field.inv_nonzero(m[rank * cols + col]);
        for r in rank + 1..rows {
            let lead = m[r * cols + col];
            if lead.is_zero() {
                continue;
            }
            let factor = field.neg(field.mul(lead, inv));
            for c in col..cols {
                let v = m[rank * cols + c];
                if !v.is_zero() {
                    m[r * cols + c] = field.add(m[r * cols + c], field.mul(factor, v));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Reduces `rows` to reduced row echelon form in place (zero rows dropped)
/// and returns the pivot columns.
pub fn rref_rows(field: &Field, rows: &mut Vec<Vec<Elem>>) -> Vec<usize> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(piv, rank);
        let inv = field.inv_nonzero(rows[rank][col]);
        if inv != Elem::ONE {
            for v in rows[rank].iter_mut() {
                *v = field.mul(*v, inv);
            }
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let lead = row[col];
            if lead.is_zero() {
                continue;
            }
            let factor = field.neg(lead);
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !y.is_zero() {
                    *x = field.add(*x, field.mul(factor, y));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}
