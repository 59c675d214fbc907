//! Compressed sparse row matrices.

use alloc::vec;
use alloc::vec::Vec;

/// CSR matrix with sorted column indices in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given pattern; `rows[i]` must be sorted and unique.
    pub fn from_pattern(ncols: usize, rows: Vec<Vec<usize>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let nnz = rows.iter().map(|r| r.len()).sum();
        let mut col_idx = Vec::with_capacity(nnz);
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            col_idx.extend_from_slice(&r);
            row_ptr.push(col_idx.len());
        }
        Self { nrows, ncols, row_ptr, col_idx, values: vec![0.0; nnz] }
    }

    /// Builds a matrix from coordinate triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            assert!(i < nrows && j < ncols, "triplet out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn from_dense(n: usize, dense: &[f64]) -> Self {
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if dense[i * n + j] != 0.0 {
                    triplets.push((i, j, dense[i * n + j]));
                }
            }
        }
        Self::from_triplets(n, n, &triplets)
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn row_mut(&mut self, i: usize) -> (&[usize], &mut [f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &mut self.values[r])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.nrows) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                x[i] * cols.iter().zip(vals).map(|(&j, v)| v * y[j]).sum::<f64>()
            })
            .sum()
    }

    /// `alpha * self + beta * other`; both must share dimensions.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for (m, s) in [(self, alpha), (other, beta)] {
            for i in 0..m.nrows {
                let (cols, vals) = m.row(i);
                triplets.extend(cols.iter().zip(vals).map(|(&j, v)| (i, j, s * v)));
            }
        }
        CsrMatrix::from_triplets(self.nrows, self.ncols, &triplets)
    }

    /// The sub-matrix of rows `rows` and columns `cols`, re-indexed from zero.
    pub fn block(&self, rows: core::ops::Range<usize>, cols: core::ops::Range<usize>) -> CsrMatrix {
        let mut pattern = Vec::with_capacity(rows.len());
        let mut values = Vec::new();
        for i in rows {
            let (c, v) = self.row(i);
            let mut r = Vec::new();
            for (&j, &x) in c.iter().zip(v) {
                if cols.contains(&j) {
                    r.push(j - cols.start);
                    values.push(x);
                }
            }
            pattern.push(r);
        }
        let mut m = CsrMatrix::from_pattern(cols.len(), pattern);
        m.values = values;
        m
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * self.ncols + j] = v;
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Adds a dense block: `local[a * n + b]` goes to `(rows[a], rows[b])`.
    /// `rows` must be sorted ascending and present in the pattern.
    pub fn add_dense_block(&mut self, rows: &[usize], local: &[f64]) {
        let n = rows.len();
        for (a, &i) in rows.iter().enumerate() {
            let start = self.row_ptr[i];
            let end = self.row_ptr[i + 1];
            let cols = &self.col_idx[start..end];
            let mut k = 0;
            for (b, &j) in rows.iter().enumerate() {
                while cols[k] != j {
                    k += 1;
                }
                self.values[start + k] += local[a * n + b];
            }
        }
    }
}

/// Accumulates the union of dense index blocks into a symmetric pattern.
#[derive(Debug, Clone)]
pub struct PatternBuilder {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl PatternBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, blocks: Vec::new() }
    }

    /// Registers a block coupling all `indices` with each other.
    pub fn add_block(&mut self, mut indices: Vec<usize>) {
        indices.sort_unstable();
        indices.dedup();
        self.blocks.push(indices);
    }

    pub fn build(self) -> CsrMatrix {
        let n = self.n;
        // blocks touching each row
        let mut touching: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                touching[i].push(b as u32);
            }
        }
        let mut stamp = vec![usize::MAX; n];
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::new();
            for &b in &touching[i] {
                for &j in &self.blocks[b as usize] {
                    if stamp[j] != i {
                        stamp[j] = i;
                        row.push(j);
                    }
                }
            }
            row.sort_unstable();
            rows.push(row);
        }
        CsrMatrix::from_pattern(n, rows)
    }
}
