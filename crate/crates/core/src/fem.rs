//! Conforming Lagrange finite elements on intervals and tensor grids.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CooBuilder, CsrMatrix};
use crate::numeric::{cnt, lit, Real};
use crate::quadrature::gauss_legendre;

/// Equispaced Lagrange basis of degree `p` on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct LagrangeBasis<T> {
    pub degree: usize,
    nodes: Vec<T>,
}

impl<T: Real> LagrangeBasis<T> {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1, "element degree must be at least one");
        let nodes = (0..=degree).map(|i| cnt::<T>(i) / cnt::<T>(degree)).collect();
        LagrangeBasis { degree, nodes }
    }

    pub fn value(&self, i: usize, x: T) -> T {
        let mut v = T::one();
        for (j, xj) in self.nodes.iter().enumerate() {
            if j != i {
                v *= (x - *xj) / (self.nodes[i] - *xj);
            }
        }
        v
    }

    pub fn derivative(&self, i: usize, x: T) -> T {
        let mut total = T::zero();
        for (m, xm) in self.nodes.iter().enumerate() {
            if m == i {
                continue;
            }
            let mut term = T::one() / (self.nodes[i] - *xm);
            for (j, xj) in self.nodes.iter().enumerate() {
                if j != i && j != m {
                    term *= (x - *xj) / (self.nodes[i] - *xj);
                }
            }
            total += term;
        }
        total
    }
}

/// Reference-element tables: Gauss points on `[0,1]`, weights, basis values
/// and derivatives (`[point][function]`).
#[derive(Debug, Clone)]
struct Tables<T> {
    points: Vec<T>,
    weights: Vec<T>,
    phi: Vec<Vec<T>>,
    dphi: Vec<Vec<T>>,
}

impl<T: Real> Tables<T> {
    fn new(degree: usize, order: usize) -> Self {
        let basis = LagrangeBasis::<T>::new(degree);
        let (x, w) = gauss_legendre::<T>(order);
        let points: Vec<T> = x.iter().map(|x| (*x + T::one()) * lit(0.5)).collect();
        let weights: Vec<T> = w.iter().map(|w| *w * lit(0.5)).collect();
        let phi = points.iter().map(|p| (0..=degree).map(|i| basis.value(i, *p)).collect()).collect();
        let dphi = points.iter().map(|p| (0..=degree).map(|i| basis.derivative(i, *p)).collect()).collect();
        Tables { points, weights, phi, dphi }
    }
}

/// Condition at an end of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum End<T> {
    /// Value pinned to zero (row eliminated).
    Dirichlet,
    /// Natural condition with boundary term `c |f(end)|²` (Neumann for `c = 0`).
    Robin(T),
}

/// Interval mesh for one-dimensional forms.
#[derive(Debug, Clone)]
pub struct Mesh1d<T> {
    /// Element boundaries, strictly increasing.
    pub nodes: Vec<T>,
    pub degree: usize,
    /// Identify the two ends (`f(left) = f(right)`).
    pub periodic: bool,
    pub left: End<T>,
    pub right: End<T>,
}

impl<T: Real> Mesh1d<T> {
    pub fn uniform(lo: T, hi: T, elements: usize, degree: usize) -> Self {
        Mesh1d { nodes: uniform_nodes(lo, hi, elements), degree, periodic: false, left: End::Robin(T::zero()), right: End::Robin(T::zero()) }
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of nodal values before boundary elimination.
    pub fn raw_dofs(&self) -> usize {
        let n = self.elements() * self.degree;
        if self.periodic {
            n
        } else {
            n + 1
        }
    }

    /// Coordinate of raw degree of freedom `i`.
    pub fn dof_coordinate(&self, i: usize) -> T {
        let e = (i / self.degree).min(self.elements() - 1);
        let local = i - e * self.degree;
        let h = self.nodes[e + 1] - self.nodes[e];
        self.nodes[e] + h * cnt::<T>(local) / cnt::<T>(self.degree)
    }
}

/// `elements + 1` equispaced points on `[lo, hi]`.
pub fn uniform_nodes<T: Real>(lo: T, hi: T, elements: usize) -> Vec<T> {
    (0..=elements).map(|i| lo + (hi - lo) * cnt::<T>(i) / cnt::<T>(elements)).collect()
}

/// `elements + 1` points on `[0, width]` clustered by a tanh stretch of
/// strength `stretch` near `0` (one-sided) or near both ends.
pub fn stretched_nodes<T: Real>(width: T, elements: usize, stretch: T, two_sided: bool) -> Vec<T> {
    if stretch <= T::zero() {
        return uniform_nodes(T::zero(), width, elements);
    }
    let th = stretch.tanh();
    (0..=elements)
        .map(|i| {
            let x = cnt::<T>(i) / cnt::<T>(elements);
            let y = if two_sided {
                (T::one() + (stretch * (lit::<T>(2.0) * x - T::one())).tanh() / th) * lit(0.5)
            } else {
                T::one() - (stretch * (T::one() - x)).tanh() / th
            };
            width * y
        })
        .collect()
}

/// Numbering of the retained degrees of freedom.
#[derive(Debug, Clone)]
pub struct DofMap {
    map: Vec<Option<usize>>,
    n_u: usize,
    count: usize,
}

impl DofMap {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Index of raw node `(is, iu)` (tensor) or `is` (1D with `iu = 0`).
    pub fn index(&self, is: usize, iu: usize) -> Option<usize> {
        self.map[is * self.n_u + iu]
    }
}

/// Assembles `∫ p|f'|² + v|f|²` plus end terms against mass `∫ w|f|²`.
pub fn assemble_1d<T: Real>(
    mesh: &Mesh1d<T>,
    p: impl Fn(T) -> T,
    v: impl Fn(T) -> T,
    w: impl Fn(T) -> T,
) -> Result<(CsrMatrix<T>, CsrMatrix<T>, DofMap)> {
    let ne = mesh.elements();
    if ne < 1 || mesh.nodes.windows(2).any(|x| !(x[1] > x[0])) {
        return Err(Error::InvalidInput("1D mesh nodes must be strictly increasing".into()));
    }
    let deg = mesh.degree;
    let raw = mesh.raw_dofs();
    let mut keep = vec![true; raw];
    if !mesh.periodic {
        if mesh.left == End::Dirichlet {
            keep[0] = false;
        }
        if mesh.right == End::Dirichlet {
            keep[raw - 1] = false;
        }
    }
    let mut map = vec![None; raw];
    let mut count = 0;
    // Interleave periodic numbering so the wrap-around coupling stays banded.
    let order: Vec<usize> = if mesh.periodic { interleaved(raw) } else { (0..raw).collect() };
    for &i in &order {
        if keep[i] {
            map[i] = Some(count);
            count += 1;
        }
    }
    let dofs = DofMap { map, n_u: 1, count };
    let tab = Tables::<T>::new(deg, deg + 2);
    let mut ca = CooBuilder::with_capacity(count, ne * (deg + 1) * (deg + 1));
    let mut cb = CooBuilder::with_capacity(count, ne * (deg + 1) * (deg + 1));
    for e in 0..ne {
        let (x0, x1) = (mesh.nodes[e], mesh.nodes[e + 1]);
        let h = x1 - x0;
        let glob: Vec<Option<usize>> = (0..=deg).map(|a| dofs.map[(e * deg + a) % raw]).collect();
        for (q, xq) in tab.points.iter().enumerate() {
            let x = x0 + h * *xq;
            let wq = tab.weights[q] * h;
            let (pq, vq, mq) = (p(x), v(x), w(x));
            for a in 0..=deg {
                let Some(ga) = glob[a] else { continue };
                for b in 0..=deg {
                    let Some(gb) = glob[b] else { continue };
                    let stiff = pq * tab.dphi[q][a] * tab.dphi[q][b] / (h * h) + vq * tab.phi[q][a] * tab.phi[q][b];
                    ca.push(ga, gb, wq * stiff);
                    cb.push(ga, gb, wq * mq * tab.phi[q][a] * tab.phi[q][b]);
                }
            }
        }
    }
    if !mesh.periodic {
        if let (End::Robin(c), Some(g)) = (mesh.left, dofs.map[0]) {
            ca.push(g, g, c);
        }
        if let (End::Robin(c), Some(g)) = (mesh.right, dofs.map[raw - 1]) {
            ca.push(g, g, c);
        }
    }
    Ok((ca.build(), cb.build(), dofs))
}

/// Order `0, 1, n−1, 2, n−2, …` returned as the visiting sequence.
fn interleaved(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(0);
    let (mut lo, mut hi) = (1, n - 1);
    while lo <= hi {
        out.push(lo);
        if hi != lo {
            out.push(hi);
        }
        lo += 1;
        if hi == 0 {
            break;
        }
        hi -= 1;
    }
    out
}

/// Longitudinal boundary treatment of a tensor mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LongitudinalEnds {
    Dirichlet,
    Neumann,
    Periodic,
}

/// Tensor grid on `[s_0, s_N] × [0, a]`.
#[derive(Debug, Clone)]
pub struct TensorMesh<T> {
    pub s: Vec<T>,
    pub u: Vec<T>,
    pub degree_s: usize,
    pub degree_u: usize,
    pub ends: LongitudinalEnds,
    /// Pin the solution to zero on `u = a`.
    pub far_dirichlet: bool,
}

/// Coefficients of the strip form at an interior quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct PointCoefficients<T> {
    /// Weight of `|∂_s φ|²`.
    pub ds: T,
    /// Weight of `|∂_u φ|²`.
    pub du: T,
    pub potential: T,
    pub mass: T,
}

impl<T: Real> TensorMesh<T> {
    fn raw_s(&self) -> usize {
        let n = (self.s.len() - 1) * self.degree_s;
        if self.ends == LongitudinalEnds::Periodic {
            n
        } else {
            n + 1
        }
    }

    fn raw_u(&self) -> usize {
        (self.u.len() - 1) * self.degree_u + 1
    }

    pub fn element_count(&self) -> (usize, usize) {
        (self.s.len() - 1, self.u.len() - 1)
    }

    /// Coordinates of raw longitudinal node `i`.
    pub fn s_coordinate(&self, i: usize) -> T {
        let m = Mesh1d { nodes: self.s.clone(), degree: self.degree_s, periodic: false, left: End::Dirichlet, right: End::Dirichlet };
        m.dof_coordinate(i)
    }
}

/// Assembles the form
/// `∫∫ ds|φ_s|² + du|φ_u|² + V|φ|² + ∫ near(s)|φ(s,0)|² + ∫ far(s)|φ(s,a)|²`
/// against the mass `∫∫ mass |φ|²`.
pub fn assemble_tensor<T, FI, FN, FF>(mesh: &TensorMesh<T>, interior: FI, near: FN, far: FF) -> Result<(CsrMatrix<T>, CsrMatrix<T>, DofMap)>
where
    T: Real,
    FI: Fn(T, T) -> PointCoefficients<T> + Sync,
    FN: Fn(T) -> T + Sync,
    FF: Fn(T) -> T + Sync,
{
    let (ns, nu) = mesh.element_count();
    if ns < 1 || nu < 1 {
        return Err(Error::InvalidInput("tensor mesh needs at least one element per direction".into()));
    }
    if mesh.s.windows(2).any(|x| !(x[1] > x[0])) || mesh.u.windows(2).any(|x| !(x[1] > x[0])) {
        return Err(Error::InvalidInput("tensor mesh nodes must be strictly increasing".into()));
    }
    let (ps, pu) = (mesh.degree_s, mesh.degree_u);
    let (raw_s, raw_u) = (mesh.raw_s(), mesh.raw_u());
    let periodic = mesh.ends == LongitudinalEnds::Periodic;
    let s_order: Vec<usize> = if periodic { interleaved(raw_s) } else { (0..raw_s).collect() };
    let mut map = vec![None; raw_s * raw_u];
    let mut count = 0;
    for &is in &s_order {
        let s_pinned = mesh.ends == LongitudinalEnds::Dirichlet && (is == 0 || is == raw_s - 1);
        for iu in 0..raw_u {
            let u_pinned = mesh.far_dirichlet && iu == raw_u - 1;
            if !s_pinned && !u_pinned {
                map[is * raw_u + iu] = Some(count);
                count += 1;
            }
        }
    }
    let dofs = DofMap { map, n_u: raw_u, count };
    if count == 0 {
        return Err(Error::InvalidInput("tensor mesh has no free degrees of freedom".into()));
    }
    let ts = Tables::<T>::new(ps, ps + 2);
    let tu = Tables::<T>::new(pu, pu + 2);
    let nloc = (ps + 1) * (pu + 1);

    let columns: Vec<Vec<(usize, usize, T, T)>> = (0..ns)
        .into_par_iter()
        .map(|es| {
            let mut out = Vec::with_capacity(nu * nloc * nloc + 2 * (ps + 1) * (ps + 1));
            let (s0, s1) = (mesh.s[es], mesh.s[es + 1]);
            let hs = s1 - s0;
            let sdof: Vec<usize> = (0..=ps).map(|a| (es * ps + a) % raw_s).collect();
            let mut kloc = vec![T::zero(); nloc * nloc];
            let mut mloc = vec![T::zero(); nloc * nloc];
            for eu in 0..nu {
                let (u0, u1) = (mesh.u[eu], mesh.u[eu + 1]);
                let hu = u1 - u0;
                kloc.iter_mut().for_each(|x| *x = T::zero());
                mloc.iter_mut().for_each(|x| *x = T::zero());
                for (qs, xs) in ts.points.iter().enumerate() {
                    let s = s0 + hs * *xs;
                    for (qu, xu) in tu.points.iter().enumerate() {
                        let u = u0 + hu * *xu;
                        let c = interior(s, u);
                        let wq = ts.weights[qs] * tu.weights[qu] * hs * hu;
                        for a in 0..=ps {
                            for b in 0..=pu {
                                let i = a * (pu + 1) + b;
                                let phi_i = ts.phi[qs][a] * tu.phi[qu][b];
                                let dsi = ts.dphi[qs][a] * tu.phi[qu][b] / hs;
                                let dui = ts.phi[qs][a] * tu.dphi[qu][b] / hu;
                                for a2 in 0..=ps {
                                    for b2 in 0..=pu {
                                        let j = a2 * (pu + 1) + b2;
                                        let phi_j = ts.phi[qs][a2] * tu.phi[qu][b2];
                                        let dsj = ts.dphi[qs][a2] * tu.phi[qu][b2] / hs;
                                        let duj = ts.phi[qs][a2] * tu.dphi[qu][b2] / hu;
                                        kloc[i * nloc + j] += wq * (c.ds * dsi * dsj + c.du * dui * duj + c.potential * phi_i * phi_j);
                                        mloc[i * nloc + j] += wq * c.mass * phi_i * phi_j;
                                    }
                                }
                            }
                        }
                    }
                }
                for a in 0..=ps {
                    for b in 0..=pu {
                        let Some(gi) = dofs.map[sdof[a] * raw_u + eu * pu + b] else { continue };
                        for a2 in 0..=ps {
                            for b2 in 0..=pu {
                                let Some(gj) = dofs.map[sdof[a2] * raw_u + eu * pu + b2] else { continue };
                                let i = a * (pu + 1) + b;
                                let j = a2 * (pu + 1) + b2;
                                out.push((gi, gj, kloc[i * nloc + j], mloc[i * nloc + j]));
                            }
                        }
                    }
                }
            }
            // Edge terms on u = 0 and u = a.
            for (edge_iu, coef_fn, active) in [
                (0usize, &near as &(dyn Fn(T) -> T + Sync), true),
                (raw_u - 1, &far as &(dyn Fn(T) -> T + Sync), !mesh.far_dirichlet),
            ] {
                if !active {
                    continue;
                }
                for (qs, xs) in ts.points.iter().enumerate() {
                    let s = s0 + hs * *xs;
                    let c = coef_fn(s) * ts.weights[qs] * hs;
                    for a in 0..=ps {
                        let Some(gi) = dofs.map[sdof[a] * raw_u + edge_iu] else { continue };
                        for a2 in 0..=ps {
                            let Some(gj) = dofs.map[sdof[a2] * raw_u + edge_iu] else { continue };
                            out.push((gi, gj, c * ts.phi[qs][a] * ts.phi[qs][a2], T::zero()));
                        }
                    }
                }
            }
            out
        })
        .collect();

    let nnz: usize = columns.iter().map(|c| c.len()).sum();
    let mut ca = CooBuilder::with_capacity(count, nnz);
    let mut cb = CooBuilder::with_capacity(count, nnz);
    for col in columns {
        for (i, j, k, m) in col {
            ca.push(i, j, k);
            if m != T::zero() {
                cb.push(i, j, m);
            }
        }
    }
    Ok((ca.build(), cb.build(), dofs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{lowest_eigenpairs, SymPencil};
    use std::f64::consts::PI;

    #[test]
    fn lagrange_basis_partition_of_unity() {
        let b = LagrangeBasis::<f64>::new(4);
        for x in [0.0, 0.13, 0.5, 0.97] {
            let s: f64 = (0..5).map(|i| b.value(i, x)).sum();
            let d: f64 = (0..5).map(|i| b.derivative(i, x)).sum();
            assert!((s - 1.0).abs() < 1e-13 && d.abs() < 1e-11);
        }
    }

    #[test]
    fn dirichlet_interval_spectrum() {
        let mut mesh = Mesh1d::uniform(0.0, 1.0, 40, 2);
        mesh.left = End::Dirichlet;
        mesh.right = End::Dirichlet;
        let (a, b, _) = assemble_1d(&mesh, |_| 1.0, |_| 0.0, |_| 1.0).unwrap();
        let s = lowest_eigenpairs(&SymPencil::new(a, b, "test"), 2, 1e-10).unwrap();
        assert!((s.values[0] - PI * PI).abs() < 1e-5);
        assert!((s.values[1] - 4.0 * PI * PI).abs() < 1e-3);
    }

    #[test]
    fn tensor_square_separates() {
        // Dirichlet in s on [0,1], Neumann at u=0, Dirichlet at u=1:
        // λ = π² + (π/2)².
        let mesh = TensorMesh {
            s: uniform_nodes(0.0, 1.0, 12),
            u: uniform_nodes(0.0, 1.0, 12),
            degree_s: 2,
            degree_u: 2,
            ends: LongitudinalEnds::Dirichlet,
            far_dirichlet: true,
        };
        let (a, b, _) = assemble_tensor(
            &mesh,
            |_, _| PointCoefficients { ds: 1.0, du: 1.0, potential: 0.0, mass: 1.0 },
            |_| 0.0,
            |_| 0.0,
        )
        .unwrap();
        let s = lowest_eigenpairs(&SymPencil::new(a, b, "test"), 1, 1e-10).unwrap();
        let exact = PI * PI * 1.25;
        assert!((s.values[0] - exact).abs() < 1e-4 * exact, "{}", s.values[0]);
    }

    #[test]
    fn interleaving_visits_every_index_once() {
        for n in 1..9 {
            let mut v = interleaved(n);
            v.sort();
            assert_eq!(v, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn stretched_nodes_hit_the_endpoints() {
        let x: Vec<f64> = stretched_nodes(2.0, 10, 2.5, true);
        assert!((x[0]).abs() < 1e-15 && (x[10] - 2.0).abs() < 1e-14);
        assert!(x[1] - x[0] < x[5] - x[4]);
    }
}
