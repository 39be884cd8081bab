//! Dense and sparse matrices over a [`Field`], with exact Gaussian
//! elimination kernels (rank, kernel, solve, inverse, determinant) and an
//! incremental echelon basis for span-membership tests.

use std::collections::BTreeMap;

use crate::scalar::{ComplexField, Field};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged matrix columns");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let p = a.mul(b);
                        out[(i, j)].add_assign(&p);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Matrix<T> {
        self.map(|x| x.mul(s))
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_assign(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best = None;
            let mut best_score = 0.0;
            for i in r..m.rows {
                let s = m[(i, c)].pivot_score();
                if !m[(i, c)].is_zero() && s > best_score {
                    best = Some(i);
                    best_score = s;
                    if T::EXACT {
                        break;
                    }
                }
            }
            let Some(p) = best else { continue };
            m.swap_rows(p, r);
            let inv = T::one().div(&m[(r, c)]);
            for j in c..m.cols {
                let v = m[(r, j)].mul(&inv);
                m[(r, j)] = v;
            }
            let pivot_row: Vec<T> = m.row(r).to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    if !pivot_row[j].is_zero() {
                        let d = f.mul(&pivot_row[j]);
                        m[(i, j)].sub_assign(&d);
                    }
                }
                if !T::EXACT {
                    m[(i, c)] = T::zero();
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = r[(row, f)].neg();
                }
                v
            })
            .collect()
    }

    /// Some solution of `A x = b`, if the system is consistent.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = T::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let mut best = None;
            let mut best_score = 0.0;
            for i in c..n {
                let s = m[(i, c)].pivot_score();
                if !m[(i, c)].is_zero() && s > best_score {
                    best = Some(i);
                    best_score = s;
                    if T::EXACT {
                        break;
                    }
                }
            }
            let Some(p) = best else { return T::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg();
            }
            let pivot = m[(c, c)].clone();
            det = det.mul(&pivot);
            for i in c + 1..n {
                let f = m[(i, c)].div(&pivot);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let d = f.mul(&m[(c, j)]);
                    m[(i, j)].sub_assign(&d);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-major sparse matrix; rows hold `(column, value)` pairs sorted by
/// column with no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<(usize, T)>>,
}

impl<T: Field> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: n, entries: (0..n).map(|i| vec![(i, T::one())]).collect() }
    }

    /// Build from row maps; zero values are dropped.
    pub fn from_row_maps(rows: usize, cols: usize, maps: Vec<BTreeMap<usize, T>>) -> Self {
        assert_eq!(maps.len(), rows);
        let entries = maps.into_iter().map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect();
        SparseMatrix { rows, cols, entries }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut maps: Vec<BTreeMap<usize, T>> = vec![BTreeMap::new(); rows];
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "triplet out of range");
            maps[i].entry(j).or_insert_with(T::zero).add_assign(&v);
        }
        Self::from_row_maps(rows, cols, maps)
    }

    pub fn from_dense(m: &Matrix<T>) -> Self {
        let entries = (0..m.rows())
            .map(|i| m.row(i).iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect())
            .collect();
        SparseMatrix { rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row {
                m[(i, *j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.entries[i]
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|(_, v)| v.is_zero()))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|k| self.entries[i][k].1.clone())
            .unwrap_or_else(|_| T::zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.iter().map(|(i, j, v)| (j, i, v.clone())))
    }

    pub fn mul(&self, other: &SparseMatrix<T>) -> SparseMatrix<T> {
        assert_eq!(self.cols, other.rows, "sparse product shape mismatch");
        let maps = self
            .entries
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, T> = BTreeMap::new();
                for (k, a) in row {
                    for (j, b) in &other.entries[*k] {
                        acc.entry(*j).or_insert_with(T::zero).add_assign(&a.mul(b));
                    }
                }
                acc
            })
            .collect();
        Self::from_row_maps(self.rows, other.cols, maps)
    }

    pub fn mul_dense(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows());
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols());
        for (i, row) in self.entries.iter().enumerate() {
            for (k, a) in row {
                for j in 0..other.cols() {
                    let b = &other[(*k, j)];
                    if !b.is_zero() {
                        out[(i, j)].add_assign(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn dense_mul(left: &Matrix<T>, right: &SparseMatrix<T>) -> Matrix<T> {
        assert_eq!(left.cols(), right.rows);
        let mut out: Matrix<T> = Matrix::zeros(left.rows(), right.cols);
        for i in 0..left.rows() {
            for k in 0..left.cols() {
                let a = &left[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for (j, b) in &right.entries[k] {
                    out[(i, *j)].add_assign(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn combine(&self, other: &SparseMatrix<T>, f: impl Fn(&T, &T) -> T) -> SparseMatrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sparse shape mismatch");
        let maps = (0..self.rows)
            .map(|i| {
                let mut pairs: BTreeMap<usize, (T, T)> = BTreeMap::new();
                for (j, v) in &self.entries[i] {
                    pairs.entry(*j).or_insert_with(|| (T::zero(), T::zero())).0 = v.clone();
                }
                for (j, v) in &other.entries[i] {
                    pairs.entry(*j).or_insert_with(|| (T::zero(), T::zero())).1 = v.clone();
                }
                let acc: BTreeMap<usize, T> = pairs.into_iter().map(|(j, (a, b))| (j, f(&a, &b))).collect();
                acc
            })
            .collect();
        Self::from_row_maps(self.rows, self.cols, maps)
    }

    pub fn add(&self, other: &SparseMatrix<T>) -> SparseMatrix<T> {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &SparseMatrix<T>) -> SparseMatrix<T> {
        self.combine(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: &T) -> SparseMatrix<T> {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|r| r.iter().map(|(j, v)| (*j, v.mul(s))).collect()).collect(),
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        self.entries
            .iter()
            .map(|row| {
                let mut acc = T::zero();
                for (j, v) in row {
                    if !x[*j].is_zero() {
                        acc.add_assign(&v.mul(&x[*j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Apply a real matrix to a complex vector.
    pub fn apply_complex<C: ComplexField<Re = T>>(&self, x: &[C]) -> Vec<C> {
        assert_eq!(x.len(), self.cols);
        self.entries
            .iter()
            .map(|row| {
                let mut acc = C::zero();
                for (j, v) in row {
                    if !x[*j].is_zero() {
                        acc.add_assign(&x[*j].scale(v));
                    }
                }
                acc
            })
            .collect()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &SparseMatrix<T>) -> T {
        assert_eq!((self.rows, self.cols), (other.cols, other.rows));
        let mut acc = T::zero();
        for (i, row) in self.entries.iter().enumerate() {
            for (k, a) in row {
                let b = other.get(*k, i);
                if !b.is_zero() {
                    acc.add_assign(&a.mul(&b));
                }
            }
        }
        acc
    }
}

/// Sparse vector keyed by coordinate index.
pub type SparseVec<T> = BTreeMap<usize, T>;

/// Incrementally maintained echelon basis of a subspace, with each reduced
/// row remembered as a combination of the inserted vectors.
#[derive(Clone, Debug)]
pub struct EchelonBasis<T> {
    rows: Vec<(usize, SparseVec<T>, Vec<T>)>,
    inserted: usize,
}

impl<T: Field> Default for EchelonBasis<T> {
    fn default() -> Self {
        EchelonBasis { rows: Vec::new(), inserted: 0 }
    }
}

impl<T: Field> EchelonBasis<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis. Returns the residual and the
    /// combination of inserted vectors that was subtracted.
    pub fn reduce(&self, v: &SparseVec<T>) -> (SparseVec<T>, Vec<T>) {
        let mut v = v.clone();
        v.retain(|_, x| !x.is_zero());
        let mut combo = vec![T::zero(); self.inserted];
        for (pivot, row, row_combo) in &self.rows {
            let Some(f) = v.get(pivot).cloned() else { continue };
            let f = f.div(&row[pivot]);
            for (k, x) in row {
                let e = v.entry(*k).or_insert_with(T::zero);
                e.sub_assign(&f.mul(x));
                if e.is_zero() {
                    v.remove(k);
                }
            }
            v.remove(pivot);
            for (c, x) in combo.iter_mut().zip(row_combo) {
                c.add_assign(&f.mul(x));
            }
        }
        (v, combo)
    }

    pub fn contains(&self, v: &SparseVec<T>) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Coordinates of `v` in terms of the inserted vectors (only those that
    /// were accepted carry nonzero weight), if `v` lies in the span.
    pub fn coordinates(&self, v: &SparseVec<T>) -> Option<Vec<T>> {
        let (residual, combo) = self.reduce(v);
        residual.is_empty().then_some(combo)
    }

    /// Insert `v`; returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec<T>) -> bool {
        let (residual, combo) = self.reduce(v);
        let index = self.inserted;
        self.inserted += 1;
        for (_, _, c) in self.rows.iter_mut() {
            c.push(T::zero());
        }
        let Some((&pivot, _)) = residual.iter().next() else {
            return false;
        };
        let mut row_combo: Vec<T> = combo.iter().map(Field::neg).collect();
        row_combo.push(T::one());
        debug_assert_eq!(row_combo.len(), index + 1);
        self.rows.push((pivot, residual, row_combo));
        true
    }
}

pub fn to_sparse<T: Field>(v: &[T]) -> SparseVec<T> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn from_sparse<T: Field>(v: &SparseVec<T>, len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}
