//! Lowest eigenpairs of symmetric-definite pencils `A x = λ B x`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, dot, reverse_cuthill_mckee, symmetric_eigen, BandLdl, CsrMatrix};
use crate::numeric::{cnt, lit, Real};

/// Discretized quadratic form: stiffness `a`, mass `b`.
#[derive(Debug, Clone)]
pub struct SymPencil<T> {
    pub a: CsrMatrix<T>,
    pub b: CsrMatrix<T>,
    pub provenance: String,
    /// A value believed to lie at or below the lowest eigenvalue; used as the
    /// first shift of the iterative solver.
    pub lower_hint: Option<T>,
}

impl<T: Real> SymPencil<T> {
    pub fn new(a: CsrMatrix<T>, b: CsrMatrix<T>, provenance: impl Into<String>) -> Self {
        assert_eq!(a.dim(), b.dim(), "pencil matrices must have equal size");
        SymPencil { a, b, provenance: provenance.into(), lower_hint: None }
    }

    pub fn with_lower_hint(mut self, hint: T) -> Self {
        self.lower_hint = Some(hint);
        self
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Rayleigh quotient `xᵀAx / xᵀBx`.
    pub fn rayleigh(&self, x: &[T]) -> T {
        self.a.bilinear(x, x) / self.b.bilinear(x, x)
    }

    /// Smallest of `samples` random quotients `xᵀBx / xᵀx`.
    pub fn sampled_mass_quotient(&self, samples: usize, seed: u64) -> T {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let n = self.dim();
        let mut best = T::infinity();
        let diag = self.b.diagonal();
        for i in 0..n {
            best = best.min(diag[i]);
        }
        for _ in 0..samples {
            let x: Vec<T> = (0..n).map(|_| lit(rng.gen_range(-1.0..1.0))).collect();
            best = best.min(self.b.bilinear(&x, &x) / dot(&x, &x));
        }
        best
    }

    /// Relative residual `‖Av − λBv‖ / (‖Bv‖ max(1, |λ|))`.
    pub fn residual(&self, lambda: T, v: &[T]) -> T {
        let av = self.a.mul_vec(v);
        let bv = self.b.mul_vec(v);
        let r: T = av.iter().zip(&bv).map(|(x, y)| (*x - lambda * *y).powi(2)).sum::<T>().sqrt();
        let nb: T = bv.iter().map(|x| *x * *x).sum::<T>().sqrt();
        r / (nb * lambda.abs().max(T::one()))
    }
}

/// Ascending eigenvalue estimates with certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub values: Vec<T>,
    pub vectors: Option<Vec<Vec<T>>>,
    pub residuals: Vec<T>,
    pub threshold: Option<T>,
    pub discrete_flags: Vec<bool>,
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn discrete_count(&self) -> usize {
        self.discrete_flags.iter().filter(|f| **f).count()
    }
}

/// Marks values strictly below `threshold − margin` as discrete.
pub fn classify_discrete<T: Real>(mut spectrum: Spectrum<T>, threshold: T, margin: T) -> Spectrum<T> {
    let cut = threshold - margin.max(T::zero());
    spectrum.discrete_flags = spectrum.values.iter().map(|v| *v < cut).collect();
    spectrum.threshold = Some(threshold);
    spectrum
}

/// Solver controls.
#[derive(Debug, Clone)]
pub struct SolverOptions<T> {
    pub tol: T,
    pub seed: u64,
    /// Pencils up to this size are solved densely.
    pub dense_limit: usize,
    pub keep_vectors: bool,
    /// Maximum Krylov basis size before a restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Confirm with an inertia count that no eigenvalue was skipped.
    pub certify: bool,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: lit(1e-9),
            seed: 0,
            dense_limit: 400,
            keep_vectors: false,
            max_basis: 120,
            max_restarts: 40,
            certify: true,
        }
    }
}

/// The `k` smallest eigenpairs of `pencil` with residuals at most `tol`.
pub fn lowest_eigenpairs<T: Real>(pencil: &SymPencil<T>, k: usize, tol: T) -> Result<Spectrum<T>> {
    let opts = SolverOptions { tol, ..SolverOptions::default() };
    lowest_eigenpairs_with(pencil, k, &opts)
}

pub fn lowest_eigenpairs_with<T: Real>(pencil: &SymPencil<T>, k: usize, opts: &SolverOptions<T>) -> Result<Spectrum<T>> {
    let n = pencil.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("requested {k} eigenpairs of a pencil of size {n}")));
    }
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let q = pencil.sampled_mass_quotient(4, opts.seed);
    if !(q > T::zero()) {
        return Err(Error::NotPositiveDefinite { quotient: q.to_f64_lossy() });
    }
    let spectrum = if n <= opts.dense_limit { dense_lowest(pencil, k)? } else { sparse_lowest(pencil, k, opts)? };
    if let Some(worst) = spectrum.residuals.iter().copied().fold(None, |m: Option<T>, r| Some(m.map_or(r, |m| m.max(r)))) {
        if !(worst <= opts.tol) {
            return Err(Error::NoConvergence {
                iterations: 0,
                residuals: spectrum.residuals.iter().map(|r| r.to_f64_lossy()).collect(),
            });
        }
    }
    Ok(if opts.keep_vectors { spectrum } else { Spectrum { vectors: None, ..spectrum } })
}

fn dense_lowest<T: Real>(pencil: &SymPencil<T>, k: usize) -> Result<Spectrum<T>> {
    let n = pencil.dim();
    let a = pencil.a.to_dense();
    let b = pencil.b.to_dense();
    let l = cholesky(&b).ok_or(Error::NotPositiveDefinite { quotient: f64::NAN })?;
    // C = L⁻¹ A L⁻ᵀ
    let mut y = a.clone();
    for col in 0..n {
        forward_solve_column(&l, &mut y, col);
    }
    let mut c = transpose(&y);
    for col in 0..n {
        forward_solve_column(&l, &mut c, col);
    }
    for i in 0..n {
        for j in 0..i {
            let s = (c[i][j] + c[j][i]) * lit(0.5);
            c[i][j] = s;
            c[j][i] = s;
        }
    }
    let (vals, vecs) = symmetric_eigen(&c)?;
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for j in 0..k {
        let mut x: Vec<T> = (0..n).map(|r| vecs[r][j]).collect();
        // x = L⁻ᵀ z
        for i in (0..n).rev() {
            let mut s = x[i];
            for m in (i + 1)..n {
                s -= l[m][i] * x[m];
            }
            x[i] = s / l[i][i];
        }
        residuals.push(pencil.residual(vals[j], &x));
        values.push(vals[j]);
        vectors.push(x);
    }
    Ok(Spectrum { values, vectors: Some(vectors), residuals, threshold: None, discrete_flags: vec![false; k] })
}

fn forward_solve_column<T: Real>(l: &[Vec<T>], m: &mut [Vec<T>], col: usize) {
    let n = l.len();
    for i in 0..n {
        let mut s = m[i][col];
        for k in 0..i {
            s -= l[i][k] * m[k][col];
        }
        m[i][col] = s / l[i][i];
    }
}

fn transpose<T: Real>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

struct Shifted<T> {
    sigma: T,
    ldl: BandLdl<T>,
}

fn factor_at<T: Real>(a: &CsrMatrix<T>, b: &CsrMatrix<T>, sigma: T, bw: usize) -> Result<Shifted<T>> {
    let k = a.linear_combination(T::one(), b, -sigma);
    Ok(Shifted { sigma, ldl: BandLdl::factor(&k, Some(bw))? })
}

fn sparse_lowest<T: Real>(pencil: &SymPencil<T>, k: usize, opts: &SolverOptions<T>) -> Result<Spectrum<T>> {
    // Reorder for a narrow band when the assembler's ordering is poor.
    let natural_bw = pencil.a.bandwidth().max(pencil.b.bandwidth());
    let perm = reverse_cuthill_mckee(&pencil.a.linear_combination(T::one(), &pencil.b, T::one()));
    let (a, b, perm) = {
        let pa = pencil.a.permuted(&perm);
        if pa.bandwidth() * 10 < natural_bw * 9 {
            let pb = pencil.b.permuted(&perm);
            (pa, pb, Some(perm))
        } else {
            (pencil.a.clone(), pencil.b.clone(), None)
        }
    };
    let bw = a.bandwidth().max(b.bandwidth()).max(1);

    let safe = lower_shift(&a, &b, bw, pencil.lower_hint)?;
    let mut extra = (k / 2).max(4);
    let mut last_err = None;
    for attempt in 0..3 {
        let block = (k + extra).min(a.dim());
        let seed = opts.seed.wrapping_add(attempt);
        // A coarse pass from the safe shift locates the wanted cluster; the
        // final pass runs from a shift just below it.
        let coarse_tol = opts.tol.max(lit(1e-3));
        let run = krylov(&a, &b, &safe, k, block, opts, seed, Vec::new(), coarse_tol).and_then(|coarse| {
            if coarse_tol <= opts.tol {
                return Ok(coarse);
            }
            let (theta, start) = (&coarse.values, coarse.vectors);
            let first = theta[0];
            let spread = (theta[k - 1] - first) * lit(0.5);
            let sigma = first - spread.max(first.abs().max(T::one()) * lit(1e-3));
            if sigma > safe.sigma {
                let near = factor_at(&a, &b, sigma, bw)?;
                krylov(&a, &b, &near, k, block, opts, seed, start, opts.tol)
            } else {
                krylov(&a, &b, &safe, k, block, opts, seed, start, opts.tol)
            }
        });
        match run {
            Ok(out) => {
                if opts.certify && !certified(&a, &b, bw, k, &out.values, opts.tol)? {
                    last_err = Some(Error::NoConvergence {
                        iterations: attempt as usize,
                        residuals: out.residuals.iter().map(|r| r.to_f64_lossy()).collect(),
                    });
                    extra *= 2;
                    continue;
                }
                let vectors = out
                    .vectors
                    .into_iter()
                    .take(k)
                    .map(|v| match &perm {
                        Some(p) => (0..v.len()).map(|old| v[p[old]]).collect(),
                        None => v,
                    })
                    .collect();
                let values = out.values[..k].to_vec();
                return Ok(Spectrum { values, vectors: Some(vectors), residuals: out.residuals, threshold: None, discrete_flags: vec![false; k] });
            }
            Err(e) => {
                last_err = Some(e);
                extra *= 2;
            }
        }
    }
    Err(last_err.unwrap_or(Error::NoConvergence { iterations: 0, residuals: vec![] }))
}

/// Finds a shift with no eigenvalue below it, so the shifted matrix is
/// positive definite and its unpivoted factorization stable.
fn lower_shift<T: Real>(a: &CsrMatrix<T>, b: &CsrMatrix<T>, bw: usize, hint: Option<T>) -> Result<Shifted<T>> {
    let mut sigma = hint.unwrap_or(T::zero());
    let mut step = sigma.abs().max(T::one()) * lit(0.05);
    for _ in 0..200 {
        let f = factor_at(a, b, sigma, bw)?;
        if f.ldl.negative_count() == 0 {
            return Ok(f);
        }
        sigma -= step;
        step *= lit(2.0);
    }
    Err(Error::NoConvergence { iterations: 200, residuals: vec![] })
}

/// Inertia check at a cut just above the `k`-th value: the exact count of
/// eigenvalues below it must equal the number of Ritz values below it.
/// Ritz values bound their eigenvalues from above, so equality means no
/// eigenvalue was skipped.
fn certified<T: Real>(a: &CsrMatrix<T>, b: &CsrMatrix<T>, bw: usize, k: usize, ritz: &[T], tol: T) -> Result<bool> {
    let last = ritz[k - 1];
    let slack = (tol.sqrt() * lit(10.0)).max(lit(1e-8)) * last.abs().max(T::one());
    let cut = last + slack;
    let f = factor_at(a, b, cut, bw)?;
    let below = ritz.iter().filter(|v| **v < cut).count();
    Ok(f.ldl.negative_count() == below)
}

struct KrylovOut<T> {
    /// The `k` wanted Ritz values followed by the rest of the kept block.
    values: Vec<T>,
    vectors: Vec<Vec<T>>,
    residuals: Vec<T>,
}

/// B-orthonormal basis with cached images and projected matrix.
struct Basis<T> {
    x: Vec<Vec<T>>,
    bx: Vec<Vec<T>>,
    ax: Vec<Vec<T>>,
    h: Vec<Vec<T>>,
}

/// `[x, Ax, Bx]`.
type RitzVectors<T> = [Vec<T>; 3];

impl<T: Real> Basis<T> {
    fn new() -> Self {
        Basis { x: Vec::new(), bx: Vec::new(), ax: Vec::new(), h: Vec::new() }
    }

    fn len(&self) -> usize {
        self.x.len()
    }

    /// B-orthogonalizes `w` (two passes) and appends it; `false` when `w`
    /// is numerically dependent on the basis.
    fn push(&mut self, a: &CsrMatrix<T>, b: &CsrMatrix<T>, mut w: Vec<T>) -> bool {
        let norm0 = b.bilinear(&w, &w).max(T::zero()).sqrt();
        if !(norm0 > T::zero()) || !norm0.is_finite() {
            return false;
        }
        for _ in 0..2 {
            for (x, bx) in self.x.iter().zip(&self.bx) {
                let c = dot(bx, &w);
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi -= c * *xi;
                }
            }
        }
        let bw = b.mul_vec(&w);
        let nrm = dot(&w, &bw).max(T::zero()).sqrt();
        if !(nrm > norm0 * lit(1e-10)) {
            return false;
        }
        let inv = T::one() / nrm;
        w.iter_mut().for_each(|v| *v *= inv);
        let bw: Vec<T> = bw.into_iter().map(|v| v * inv).collect();
        let aw = a.mul_vec(&w);
        let m = self.len();
        let mut row = Vec::with_capacity(m + 1);
        for i in 0..m {
            let v = (dot(&self.x[i], &aw) + dot(&w, &self.ax[i])) * lit(0.5);
            row.push(v);
            self.h[i].push(v);
        }
        row.push(dot(&w, &aw));
        self.h.push(row);
        self.x.push(w);
        self.bx.push(bw);
        self.ax.push(aw);
        true
    }

    /// The lowest `want` Ritz pairs with their `A`- and `B`-images.
    fn ritz(&self, want: usize) -> Result<(Vec<T>, Vec<RitzVectors<T>>)> {
        let (vals, y) = symmetric_eigen(&self.h)?;
        let m = self.len();
        let n = self.x[0].len();
        let want = want.min(m);
        let combine = |src: &[Vec<T>], c: usize| {
            let mut out = vec![T::zero(); n];
            for (r, v) in src.iter().enumerate() {
                let coef = y[r][c];
                for (o, vi) in out.iter_mut().zip(v) {
                    *o += coef * *vi;
                }
            }
            out
        };
        let pairs = (0..want).map(|c| [combine(&self.x, c), combine(&self.ax, c), combine(&self.bx, c)]).collect();
        Ok((vals[..want].to_vec(), pairs))
    }
}

/// Block shift-and-invert iteration with Rayleigh–Ritz on `(A, B)`:
/// each sweep applies `(A − σB)⁻¹B` to the current leading Ritz vectors.
#[allow(clippy::too_many_arguments)]
fn krylov<T: Real>(
    a: &CsrMatrix<T>,
    b: &CsrMatrix<T>,
    shifted: &Shifted<T>,
    k: usize,
    block: usize,
    opts: &SolverOptions<T>,
    seed: u64,
    start: Vec<Vec<T>>,
    tol: T,
) -> Result<KrylovOut<T>> {
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_basis = opts.max_basis.max(3 * block).min(n);
    let keep = (k + block).min(n);
    let mut basis = Basis::new();
    let mut frontier: Vec<Vec<T>> = start.into_iter().take(block).collect();
    while frontier.len() < block {
        frontier.push(random_vec(&mut rng, n));
    }
    let mut best: Vec<T> = vec![T::infinity(); k];
    let mut sweeps = 0;
    loop {
        let mut grew = false;
        for v in frontier.drain(..) {
            if basis.len() >= max_basis {
                break;
            }
            let mut w = b.mul_vec(&v);
            shifted.ldl.solve_in_place(&mut w);
            grew |= basis.push(a, b, w);
        }
        if !grew {
            grew = basis.push(a, b, random_vec(&mut rng, n));
        }
        sweeps += 1;
        if basis.len() < (2 * block).min(n) && grew {
            let (_, pairs) = basis.ritz(block)?;
            frontier = pairs.into_iter().map(|[x, _, _]| x).collect();
            continue;
        }
        let (vals, pairs) = basis.ritz(keep)?;
        let take = k.min(vals.len());
        let residuals: Vec<T> = (0..take)
            .map(|j| {
                let [_, ax, bx] = &pairs[j];
                let r: T = ax.iter().zip(bx).map(|(p, q)| (*p - vals[j] * *q).powi(2)).sum::<T>().sqrt();
                let nb: T = bx.iter().map(|x| *x * *x).sum::<T>().sqrt();
                r / (nb * vals[j].abs().max(T::one()))
            })
            .collect();
        for (b_, r) in best.iter_mut().zip(&residuals) {
            *b_ = b_.min(*r);
        }
        let done = take == k && residuals.iter().all(|r| *r <= tol);
        if done {
            let vectors = pairs.into_iter().map(|[x, _, _]| x).collect();
            return Ok(KrylovOut { values: vals, vectors, residuals });
        }
        if basis.len() >= n || sweeps > opts.max_restarts * 8 {
            return Err(Error::NoConvergence { iterations: sweeps, residuals: best.iter().map(|r| r.to_f64_lossy()).collect() });
        }
        let ritz_vectors: Vec<Vec<T>> = pairs.into_iter().map(|[x, _, _]| x).collect();
        if basis.len() + block > max_basis {
            basis = Basis::new();
            for v in &ritz_vectors {
                basis.push(a, b, v.clone());
            }
        }
        frontier = ritz_vectors.into_iter().take(block).collect();
    }
}

fn random_vec<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<T> {
    (0..n).map(|_| lit(rng.gen_range(-1.0..1.0))).collect()
}

/// Lowest eigenvalue estimate with an automatically chosen tolerance;
/// convenience for callers that do not need vectors.
pub fn lowest_values<T: Real>(pencil: &SymPencil<T>, k: usize) -> Result<Vec<T>> {
    Ok(lowest_eigenpairs(pencil, k, lit(1e-9))?.values)
}

/// Mean of `xs`; helper for convergence studies.
pub fn mean<T: Real>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / cnt(xs.len().max(1))
}

/// Number of eigenvalues of the pencil strictly below `sigma` (Sylvester
/// inertia of `A − σB`).
pub fn count_below<T: Real>(pencil: &SymPencil<T>, sigma: T) -> Result<usize> {
    let k = pencil.a.linear_combination(T::one(), &pencil.b, -sigma);
    let perm = reverse_cuthill_mckee(&k);
    let pk = k.permuted(&perm);
    let m = if pk.bandwidth() < k.bandwidth() { pk } else { k };
    Ok(BandLdl::factor(&m, None)?.negative_count())
}
