//! Sparse symmetric storage, banded LDLᵀ with inertia, and small dense
//! symmetric kernels.

use crate::error::{Error, Result};
use crate::numeric::{lit, Real};

/// Coordinate-format accumulator for symmetric matrices.
#[derive(Debug, Clone)]
pub struct CooBuilder<T> {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> CooBuilder<T> {
    pub fn new(n: usize) -> Self {
        CooBuilder { n, rows: Vec::new(), cols: Vec::new(), vals: Vec::new() }
    }

    pub fn with_capacity(n: usize, nnz: usize) -> Self {
        CooBuilder { n, rows: Vec::with_capacity(nnz), cols: Vec::with_capacity(nnz), vals: Vec::with_capacity(nnz) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `v` at `(i, j)` only.
    pub fn push(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.n && j < self.n);
        self.rows.push(i);
        self.cols.push(j);
        self.vals.push(v);
    }

    /// Adds `v` at `(i, j)` and, off the diagonal, at `(j, i)`.
    pub fn push_sym(&mut self, i: usize, j: usize, v: T) {
        self.push(i, j, v);
        if i != j {
            self.push(j, i, v);
        }
    }

    /// Compresses into CSR, summing duplicates.
    pub fn build(self) -> CsrMatrix<T> {
        let n = self.n;
        let mut counts = vec![0usize; n + 1];
        for &r in &self.rows {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; self.vals.len()];
        let mut vals = vec![T::zero(); self.vals.len()];
        for ((r, c), v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            let p = next[*r];
            cols[p] = *c;
            vals[p] = *v;
            next[*r] += 1;
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(cols.len());
        let mut values = Vec::with_capacity(cols.len());
        indptr.push(0);
        let mut row: Vec<(usize, T)> = Vec::new();
        for i in 0..n {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            row.sort_unstable_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = row[k].1;
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMatrix { n, indptr, indices, values }
    }
}

/// Square CSR matrix with sorted column indices (full symmetric storage).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    pub fn identity(n: usize) -> Self {
        CsrMatrix { n, indptr: (0..=n).collect(), indices: (0..n).collect(), values: vec![T::one(); n] }
    }

    pub fn from_dense(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut coo = CooBuilder::new(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "dense input must be square");
            for (j, v) in r.iter().enumerate() {
                if *v != T::zero() {
                    coo.push(i, j, *v);
                }
            }
        }
        coo.build()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries in row-major order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |p| (self.indices[p], self.values[p]))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        match self.indices[lo..hi].binary_search(&j) {
            Ok(p) => self.values[lo + p],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = M x`.
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        for i in 0..self.n {
            let mut acc = T::zero();
            for p in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[p] * x[self.indices[p]];
            }
            y[i] = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            let mut r = T::zero();
            for p in self.indptr[i]..self.indptr[i + 1] {
                r += self.values[p] * y[self.indices[p]];
            }
            acc += x[i] * r;
        }
        acc
    }

    /// Half bandwidth `max |i − j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for i in 0..self.n {
            for p in self.indptr[i]..self.indptr[i + 1] {
                let j = self.indices[p];
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }

    /// Largest entrywise asymmetry `|m_ij − m_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `alpha * self + beta * other` on the union pattern.
    pub fn linear_combination(&self, alpha: T, other: &CsrMatrix<T>, beta: T) -> CsrMatrix<T> {
        assert_eq!(self.n, other.n);
        let mut indptr = Vec::with_capacity(self.n + 1);
        let mut indices = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(self.nnz().max(other.nnz()));
        indptr.push(0);
        for i in 0..self.n {
            let (mut p, pe) = (self.indptr[i], self.indptr[i + 1]);
            let (mut q, qe) = (other.indptr[i], other.indptr[i + 1]);
            while p < pe || q < qe {
                let cp = if p < pe { self.indices[p] } else { usize::MAX };
                let cq = if q < qe { other.indices[q] } else { usize::MAX };
                if cp < cq {
                    indices.push(cp);
                    values.push(alpha * self.values[p]);
                    p += 1;
                } else if cq < cp {
                    indices.push(cq);
                    values.push(beta * other.values[q]);
                    q += 1;
                } else {
                    indices.push(cp);
                    values.push(alpha * self.values[p] + beta * other.values[q]);
                    p += 1;
                    q += 1;
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix { n: self.n, indptr, indices, values }
    }

    /// Symmetric permutation `P M Pᵀ` with `new_index[old] = perm[old]`.
    pub fn permuted(&self, perm: &[usize]) -> CsrMatrix<T> {
        let mut coo = CooBuilder::with_capacity(self.n, self.nnz());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                coo.push(perm[i], perm[j], v);
            }
        }
        coo.build()
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

/// Reverse Cuthill–McKee ordering; returns `perm[old] = new`.
pub fn reverse_cuthill_mckee<T: Real>(m: &CsrMatrix<T>) -> Vec<usize> {
    let n = m.dim();
    let degree: Vec<usize> = (0..n).map(|i| m.row(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).expect("unvisited node");
        visited[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut nbrs: Vec<usize> = m.row(v).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nbrs.sort_unstable_by_key(|&j| degree[j]);
            for j in nbrs {
                visited[j] = true;
                order.push(j);
            }
        }
    }
    let mut perm = vec![0; n];
    for (new, old) in order.into_iter().rev().enumerate() {
        perm[old] = new;
    }
    perm
}

/// Banded LDLᵀ factorization without pivoting.
///
/// Row `i` of `L` is stored for columns `i − bw .. i − 1`. The inertia
/// (count of negative pivots) equals the number of negative eigenvalues of
/// the factored matrix by Sylvester's law whenever the factorization exists.
#[derive(Debug, Clone)]
pub struct BandLdl<T> {
    n: usize,
    bw: usize,
    l: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> BandLdl<T> {
    /// Factors `m`, which must have bandwidth `≤ bw` (computed if `None`).
    pub fn factor(m: &CsrMatrix<T>, bw: Option<usize>) -> Result<Self> {
        let n = m.dim();
        let bw = bw.unwrap_or_else(|| m.bandwidth());
        let mut l = vec![T::zero(); n * bw];
        let mut d = vec![T::zero(); n];
        let mut v = vec![T::zero(); bw];
        let scale = (0..n).map(|i| m.get(i, i).abs()).fold(T::zero(), T::max).max(T::min_positive_value());
        let tiny = scale * T::epsilon() * lit(1e-2);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            let w = i - j0;
            // v[j - j0] holds L_ij d_j during the sweep.
            for x in v.iter_mut().take(w) {
                *x = T::zero();
            }
            for (j, val) in m.row(i) {
                if j >= j0 && j < i {
                    v[j - j0] = val;
                }
            }
            let mut diag = m.get(i, i);
            for jj in 0..w {
                let j = j0 + jj;
                let k0 = j0.max(j.saturating_sub(bw));
                let mut acc = v[jj];
                if k0 < j {
                    let lrow = &l[j * bw..j * bw + bw];
                    // column k of row j sits at offset bw - (j - k)
                    let off_j = bw - (j - k0);
                    let len = j - k0;
                    let vi = &v[k0 - j0..k0 - j0 + len];
                    let lj = &lrow[off_j..off_j + len];
                    let mut dot = T::zero();
                    for (a, b) in vi.iter().zip(lj) {
                        dot += *a * *b;
                    }
                    acc -= dot;
                }
                v[jj] = acc;
                let lij = acc / d[j];
                l[i * bw + bw - (i - j)] = lij;
                diag -= acc * lij;
            }
            if !diag.is_finite() {
                return Err(Error::Range("banded LDL factorization"));
            }
            if diag.abs() <= tiny {
                diag = if diag < T::zero() { -tiny } else { tiny };
            }
            d[i] = diag;
        }
        Ok(BandLdl { n, bw, l, d })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of negative pivots.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|x| **x < T::zero()).count()
    }

    /// Solves in place.
    pub fn solve_in_place(&self, x: &mut [T]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            let row = &self.l[i * bw..i * bw + bw];
            let mut acc = x[i];
            for j in j0..i {
                acc -= row[bw - (i - j)] * x[j];
            }
            x[i] = acc;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let xi = x[i];
            let j0 = i.saturating_sub(bw);
            let row = &self.l[i * bw..i * bw + bw];
            for j in j0..i {
                x[j] -= row[bw - (i - j)] * xi;
            }
        }
    }
}

/// Dense Cholesky factor (lower) of a symmetric positive-definite matrix.
pub fn cholesky<T: Real>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = m.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= T::zero() || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// All eigenpairs of a dense symmetric matrix by Householder
/// tridiagonalization followed by implicit QL.
///
/// Returns ascending eigenvalues and the matrix whose columns are the
/// orthonormal eigenvectors (`vectors[row][col]`).
pub fn symmetric_eigen<T: Real>(m: &[Vec<T>]) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = m.len();
    let mut z: Vec<Vec<T>> = m.to_vec();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut z, &mut d, &mut e);
    implicit_ql(&mut d, &mut e, &mut z)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| d[i]).collect();
    let vecs = (0..n).map(|r| order.iter().map(|&c| z[r][c]).collect()).collect();
    Ok((vals, vecs))
}

fn tridiagonalize<T: Real>(a: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = a.len();
    if n == 0 {
        return;
    }
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale: T = (0..=l).map(|k| a[i][k].abs()).sum();
            if scale == T::zero() {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] /= scale;
                    h += a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i][l] = f - g;
                let mut f = T::zero();
                for j in 0..=l {
                    a[j][i] = a[i][j] / h;
                    let mut g = T::zero();
                    for k in 0..=j {
                        g += a[j][k] * a[i][k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i][j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let t = f * e[k] + g * a[i][k];
                        a[j][k] -= t;
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();
    for i in 0..n {
        if d[i] != T::zero() {
            for j in 0..i {
                let mut g = T::zero();
                for k in 0..i {
                    g += a[i][k] * a[k][j];
                }
                for k in 0..i {
                    let t = g * a[k][i];
                    a[k][j] -= t;
                }
            }
        }
        d[i] = a[i][i];
        a[i][i] = T::one();
        for j in 0..i {
            a[j][i] = T::zero();
            a[i][j] = T::zero();
        }
    }
}

fn implicit_ql<T: Real>(d: &mut [T], e: &mut [T], z: &mut [Vec<T>]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence { iterations: iter, residuals: vec![e[l].to_f64_lossy()] });
            }
            let mut g = (d[l + 1] - d[l]) / (lit::<T>(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + lit::<T>(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

#[inline]
pub fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(a, b)| *a * *b).sum()
}

#[inline]
pub fn norm<T: Real>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

#[inline]
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}
