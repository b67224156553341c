use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

/// Compressed-column matrix with small signed integer entries.
///
/// Boundary operators only ever hold `-1`, `0`, `+1`, so the entries are
/// stored as `i8`; products are accumulated in `i64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<i8>,
}

impl SparseIntMatrix {
    /// An all-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            col_ptr: vec![0; cols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix column by column. Each column lists `(row, value)`
    /// pairs; rows within a column are sorted on insertion.
    ///
    /// Panics if a row index is out of range or repeated within a column.
    pub fn from_columns<I, C>(rows: usize, columns: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = (usize, i8)>,
    {
        let mut col_ptr = vec![0];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for column in columns {
            let start = row_idx.len();
            let mut entries: Vec<(usize, i8)> = column.into_iter().filter(|e| e.1 != 0).collect();
            entries.sort_unstable_by_key(|e| e.0);
            for w in entries.windows(2) {
                assert!(w[0].0 != w[1].0, "duplicate row {} in column", w[0].0);
            }
            for (r, v) in entries {
                assert!(r < rows, "row {r} out of range for {rows} rows");
                row_idx.push(r);
                values.push(v);
            }
            debug_assert!(row_idx.len() >= start);
            col_ptr.push(row_idx.len());
        }
        let cols = col_ptr.len() - 1;
        Self {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of column `j` as `(row, value)` pairs in ascending row order.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, i8)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Entry lookup; O(log nnz(column)).
    pub fn get(&self, row: usize, col: usize) -> i8 {
        let range = self.col_ptr[col]..self.col_ptr[col + 1];
        match self.row_idx[range.clone()].binary_search(&row) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut buckets: Vec<Vec<(usize, i8)>> = vec![Vec::new(); self.rows];
        for j in 0..self.cols {
            for (i, v) in self.column(j) {
                buckets[i].push((j, v));
            }
        }
        Self::from_columns(self.cols, buckets)
    }

    /// Exact integer product `self * rhs`, returned densely in row-major order.
    pub fn mul_exact(&self, rhs: &SparseIntMatrix) -> Vec<i64> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = vec![0i64; self.rows * rhs.cols];
        for j in 0..rhs.cols {
            for (k, b) in rhs.column(j) {
                for (i, a) in self.column(k) {
                    out[i * rhs.cols + j] += i64::from(a) * i64::from(b);
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for (i, v) in self.column(j) {
                m[(i, j)] = f64::from(v);
            }
        }
        m
    }

    /// Row-major dense copy with integer entries, for exact elimination.
    pub fn to_dense_int(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols]; self.rows];
        for j in 0..self.cols {
            for (i, v) in self.column(j) {
                m[i][j] = i64::from(v);
            }
        }
        m
    }

    /// Dense `selfᵀ · self` (columns against columns).
    pub fn gram_columns(&self) -> DMatrix<f64> {
        let t = self.transpose();
        let mut g = DMatrix::zeros(self.cols, self.cols);
        // Each row of `self` contributes an outer product over its nonzeros.
        for row in 0..t.cols {
            let entries: Vec<(usize, i8)> = t.column(row).collect();
            for &(a, va) in &entries {
                for &(b, vb) in &entries {
                    g[(a, b)] += f64::from(va) * f64::from(vb);
                }
            }
        }
        g
    }

    /// Dense `self · selfᵀ` (rows against rows).
    pub fn gram_rows(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.rows, self.rows);
        for j in 0..self.cols {
            let entries: Vec<(usize, i8)> = self.column(j).collect();
            for &(a, va) in &entries {
                for &(b, vb) in &entries {
                    g[(a, b)] += f64::from(va) * f64::from(vb);
                }
            }
        }
        g
    }
}

/// Row-compressed real matrix used for repeated matrix-vector products.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) out of range");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Keeps the nonzero entries of a dense matrix.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut triplets = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// `out = self · x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_are_sorted_and_zeros_dropped() {
        let m = SparseIntMatrix::from_columns(3, [vec![(2, 1), (0, -1), (1, 0)], vec![]]);
        assert_eq!(m.cols(), 2);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.column(0).collect::<Vec<_>>(), vec![(0, -1), (2, 1)]);
        assert_eq!(m.get(2, 0), 1);
        assert_eq!(m.get(1, 0), 0);
    }

    #[test]
    fn gram_matches_dense_products() {
        let m = SparseIntMatrix::from_columns(3, [vec![(0, -1), (1, 1)], vec![(1, -1), (2, 1)], vec![(0, -1), (2, 1)]]);
        let d = m.to_dense();
        assert_eq!(m.gram_columns(), d.transpose() * &d);
        assert_eq!(m.gram_rows(), &d * d.transpose());
        assert_eq!(m.transpose().to_dense(), d.transpose());
    }

    #[test]
    fn csr_sums_duplicates() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 2.0), (0, 0, 0.5)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.mul_vec(&[2.0, 1.0]), vec![3.0, 2.0]);
    }
}
