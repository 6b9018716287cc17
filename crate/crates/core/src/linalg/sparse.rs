use std::collections::BTreeMap;

/// Compressed sparse row matrix of f64.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl SparseMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed in a
    /// fixed order, explicit zeros are kept out.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); nrows];
        for &(r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) outside {nrows}x{ncols}");
            *rows[r].entry(c).or_insert(0.0) += v;
        }
        Self::from_rows(ncols, rows)
    }

    pub fn from_rows(ncols: usize, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for row in &rows {
            for (c, v) in row {
                if *v != 0.0 {
                    indices.push(*c);
                    data.push(*v);
                }
            }
            indptr.push(indices.len());
        }
        SparseMatrix { nrows: rows.len(), ncols, indptr, indices, data }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: vec![], data: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, &(0..n).map(|i| (i, i, 1.0)).collect::<Vec<_>>())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[a..b].iter().copied().zip(self.data[a..b].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|(j, _)| *j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let t: Vec<_> = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn scale(&self, s: f64) -> SparseMatrix {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn add(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (o.nrows, o.ncols));
        let mut t = self.triplets();
        t.extend(o.triplets());
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Sparse product self · o.
    pub fn mul(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, o.nrows);
        let rows = (0..self.nrows)
            .map(|r| {
                let mut acc = BTreeMap::new();
                for (k, a) in self.row(r) {
                    for (c, b) in o.row(k) {
                        *acc.entry(c).or_insert(0.0) += a * b;
                    }
                }
                acc
            })
            .collect();
        Self::from_rows(o.ncols, rows)
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut cmap = vec![usize::MAX; self.ncols];
        for (j, &c) in cols.iter().enumerate() {
            cmap[c] = j;
        }
        let out = rows
            .iter()
            .map(|&r| self.row(r).filter(|(c, _)| cmap[*c] != usize::MAX).map(|(c, v)| (cmap[c], v)).collect())
            .collect();
        Self::from_rows(cols.len(), out)
    }

    pub fn to_dense(&self) -> faer::Mat<f64> {
        let mut m = faer::Mat::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// max |A − Aᵀ|.
    pub fn asymmetry(&self) -> f64 {
        self.triplets().iter().map(|&(r, c, v)| (v - self.get(c, r)).abs()).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Coordinate text dump: one `row col value` line per stored entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = format!("% {} {} {}\n", self.nrows, self.ncols, self.nnz());
        for (r, c, v) in self.triplets() {
            s.push_str(&format!("{r} {c} {v:?}\n"));
        }
        s
    }
}
