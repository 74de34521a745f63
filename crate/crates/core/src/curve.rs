//! Arc-length parametrized boundary curves, curvature statistics, tube maps
//! and the geometric hypotheses needed by the strip reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{cnt, japanese_bracket, lit, Real};
use crate::profile::{Profile, ProfileSpec};
use crate::quadrature::{adaptive, gauss_legendre};
use crate::roots::golden_max;

/// Global shape of the parameter domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology<T> {
    InfiniteLine,
    ClosedLoop { perimeter: T },
}

/// Which side of the curve the normal coordinate `u` points into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Left of the direction of travel.
    Interior,
    /// Right of the direction of travel.
    Exterior,
}

/// JSON description of a curve family (`{"family": "circle", "radius": 1}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    /// Deformed line with curvature `sech(s) − sech(s − separation)`, whose
    /// total turning vanishes.
    LineBump {
        #[serde(default = "default_separation")]
        separation: f64,
    },
    /// Boundary of a wedge whose asymptotes make angles `∓half_angle` with
    /// the horizontal; the corner is replaced by a C⁴ fillet of half-length
    /// `fillet`.
    WedgeSmoothed {
        half_angle: f64,
        #[serde(default = "default_fillet")]
        fillet: f64,
    },
    /// `y = c x²`, domain above.
    Parabola {
        #[serde(default = "default_parabola")]
        c: f64,
    },
    /// Counter-clockwise circle.
    Circle { radius: f64 },
    /// Curve reconstructed from its curvature on `window`, tangent angle
    /// `initial_angle` and position at the origin at `anchor` (default: the
    /// window start).
    FromCurvature {
        profile: ProfileSpec,
        window: [f64; 2],
        #[serde(default)]
        anchor: Option<f64>,
        #[serde(default)]
        initial_angle: f64,
        #[serde(default)]
        closed: bool,
    },
    /// Graph `y = amplitude · exp(−x²/width²)`, domain above.
    GraphBump {
        amplitude: f64,
        #[serde(default = "default_fillet")]
        width: f64,
    },
    Straight,
    /// Curve at normal distance `offset` to the left of `base`, kept in the
    /// base parameter.
    Parallel { base: Box<CurveSpec>, offset: f64 },
    /// `base` traversed backwards: `Γ̃(s) = Γ(−s)`.
    Reversed { base: Box<CurveSpec> },
}

fn default_separation() -> f64 {
    8.0
}
fn default_fillet() -> f64 {
    1.0
}
fn default_parabola() -> f64 {
    0.5
}

impl CurveSpec {
    pub fn build<T: Real>(&self) -> Result<BoundaryCurve<T>> {
        let geometry = match self {
            CurveSpec::LineBump { separation } => {
                if !(*separation > 0.0) {
                    return Err(Error::InvalidInput("line_bump separation must be positive".into()));
                }
                let profile = line_bump_profile(*separation);
                let lo = -16.0;
                let hi = separation + 16.0;
                Geometry::Reconstructed(Box::new(Reconstruction::new(profile, lo, hi, lo, 0.0, false)?))
            }
            CurveSpec::WedgeSmoothed { half_angle, fillet } => {
                if !(*half_angle > 0.0 && *half_angle < std::f64::consts::FRAC_PI_2) || !(*fillet > 0.0) {
                    return Err(Error::InvalidInput("wedge half angle must lie in (0, π/2) and the fillet be positive".into()));
                }
                let profile = ProfileSpec::turning_bump(2.0 * half_angle, 0.0, *fillet);
                let w = fillet * 20.0;
                Geometry::Reconstructed(Box::new(Reconstruction::new(profile, -w, w, 0.0, 0.0, false)?))
            }
            CurveSpec::Parabola { c } => {
                if !(*c > 0.0) {
                    return Err(Error::InvalidInput("parabola coefficient must be positive".into()));
                }
                Geometry::Graph(Box::new(GraphCurve::new(GraphShape::Parabola { c: *c }, 400.0)?))
            }
            CurveSpec::Circle { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidInput("circle radius must be positive".into()));
                }
                Geometry::Circle { radius: lit(*radius) }
            }
            CurveSpec::FromCurvature { profile, window, anchor, initial_angle, closed } => {
                if !(window[1] > window[0]) {
                    return Err(Error::InvalidInput("curvature window must be increasing".into()));
                }
                let anchor = anchor.unwrap_or(window[0]);
                Geometry::Reconstructed(Box::new(Reconstruction::new(profile.clone(), window[0], window[1], anchor, *initial_angle, *closed)?))
            }
            CurveSpec::GraphBump { amplitude, width } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidInput("graph bump width must be positive".into()));
                }
                Geometry::Graph(Box::new(GraphCurve::new(GraphShape::Gaussian { amp: *amplitude, width: *width }, 12.0 * width)?))
            }
            CurveSpec::Straight => {
                Geometry::Reconstructed(Box::new(Reconstruction::new(ProfileSpec::Zero, -50.0, 50.0, 0.0, 0.0, false)?))
            }
            CurveSpec::Parallel { base, offset } => {
                let base = base.build::<T>()?;
                Geometry::Parallel { base: Box::new(base), offset: lit(*offset) }
            }
            CurveSpec::Reversed { base } => Geometry::Reversed(Box::new(base.build::<T>()?)),
        };
        Ok(BoundaryCurve { spec: self.clone(), geometry })
    }
}

/// Curvature of the built-in deformed line.
pub fn line_bump_profile(separation: f64) -> ProfileSpec {
    ProfileSpec::Sum {
        terms: vec![
            ProfileSpec::Sech { amp: 1.0, center: 0.0, width: 1.0 },
            ProfileSpec::Sech { amp: -1.0, center: separation, width: 1.0 },
        ],
    }
}

/// Reconstructs a curve from its curvature: `θ(s) = θ₀ + ∫γ`,
/// `Γ(s) = ∫(cos θ, sin θ)`, with `Γ(s0) = 0`, `θ(s0) = θ₀`.
pub fn curve_from_curvature<T: Real>(profile: ProfileSpec, window: [f64; 2], s0: f64) -> Result<BoundaryCurve<T>> {
    CurveSpec::FromCurvature { profile, window, anchor: Some(s0), initial_angle: 0.0, closed: false }.build()
}

/// A planar curve parametrized by arc length with curvature evaluators.
#[derive(Debug, Clone)]
pub struct BoundaryCurve<T: Real> {
    spec: CurveSpec,
    geometry: Geometry<T>,
}

#[derive(Debug, Clone)]
enum Geometry<T: Real> {
    Reconstructed(Box<Reconstruction<T>>),
    Circle { radius: T },
    Graph(Box<GraphCurve<T>>),
    Parallel { base: Box<BoundaryCurve<T>>, offset: T },
    Reversed(Box<BoundaryCurve<T>>),
}

impl<T: Real> BoundaryCurve<T> {
    /// Family description the curve was built from.
    pub fn family(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn topology(&self) -> Topology<T> {
        match &self.geometry {
            Geometry::Reconstructed(r) if r.closed => Topology::ClosedLoop { perimeter: r.hi - r.lo },
            Geometry::Reconstructed(_) | Geometry::Graph(_) => Topology::InfiniteLine,
            Geometry::Circle { radius } => Topology::ClosedLoop { perimeter: T::TAU() * *radius },
            Geometry::Parallel { base, .. } | Geometry::Reversed(base) => base.topology(),
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.topology(), Topology::ClosedLoop { .. })
    }

    /// Parameter range on which the geometry is represented exactly; outside
    /// it an infinite curve continues along its tangent rays.
    pub fn window(&self) -> (T, T) {
        match &self.geometry {
            Geometry::Reconstructed(r) => (r.lo, r.hi),
            Geometry::Circle { radius } => (T::zero(), T::TAU() * *radius),
            Geometry::Graph(g) => (g.s_table[0], *g.s_table.last().expect("non-empty table")),
            Geometry::Parallel { base, .. } => base.window(),
            Geometry::Reversed(base) => {
                let (lo, hi) = base.window();
                (-hi, -lo)
            }
        }
    }

    /// Orientation-flipped copy: `Γ̃(s) = Γ(−s)`, `γ̃(s) = −γ(−s)`.
    pub fn flipped(&self) -> BoundaryCurve<T> {
        BoundaryCurve { spec: CurveSpec::Reversed { base: Box::new(self.spec.clone()) }, geometry: Geometry::Reversed(Box::new(self.clone())) }
    }

    fn check(&self, s: T) -> Result<()> {
        if s.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { what: "curve parameter", value: s.to_f64_lossy() })
        }
    }

    /// `(h(x), h'(x))` when the curve is a localized graph `y = h(x)` with
    /// the domain above (the Gaussian bump and the straight line).
    pub fn graph_height(&self, x: T) -> Option<(T, T)> {
        match (&self.spec, &self.geometry) {
            (CurveSpec::Straight, _) => Some((T::zero(), T::zero())),
            (CurveSpec::GraphBump { .. }, Geometry::Graph(g)) => {
                let j = g.shape.jet(x);
                Some((j[0], j[1]))
            }
            _ => None,
        }
    }

    /// Oriented curvature, positive when the curve turns left.
    pub fn curvature(&self, s: T) -> Result<T> {
        self.check(s)?;
        self.curvature_derivative(s, 0)
    }

    /// `γ'(s)`.
    pub fn curvature_d1(&self, s: T) -> Result<T> {
        self.check(s)?;
        self.curvature_derivative(s, 1)
    }

    /// `γ''(s)`.
    pub fn curvature_d2(&self, s: T) -> Result<T> {
        self.check(s)?;
        self.curvature_derivative(s, 2)
    }

    /// `(γ, γ', γ'')` at `s`.
    pub fn curvature_jet(&self, s: T) -> Result<[T; 3]> {
        self.check(s)?;
        Ok([self.curvature_derivative(s, 0)?, self.curvature_derivative(s, 1)?, self.curvature_derivative(s, 2)?])
    }

    fn curvature_derivative(&self, s: T, order: u8) -> Result<T> {
        Ok(match &self.geometry {
            Geometry::Reconstructed(r) => r.curvature(s, order),
            Geometry::Circle { radius } => {
                if order == 0 {
                    T::one() / *radius
                } else {
                    T::zero()
                }
            }
            Geometry::Graph(g) => g.curvature(s, order),
            Geometry::Parallel { base, offset } => {
                let g = base.curvature_derivative(s, 0)?;
                let j = T::one() - *offset * g;
                if !(j > T::zero()) {
                    return Err(Error::SingularOffset { product: (*offset * g).to_f64_lossy() });
                }
                match order {
                    0 => g / j,
                    1 => base.curvature_derivative(s, 1)? / (j * j),
                    _ => {
                        let g1 = base.curvature_derivative(s, 1)?;
                        let g2 = base.curvature_derivative(s, 2)?;
                        g2 / (j * j) + lit::<T>(2.0) * *offset * g1 * g1 / (j * j * j)
                    }
                }
            }
            Geometry::Reversed(base) => {
                let v = base.curvature_derivative(-s, order)?;
                if order == 1 {
                    v
                } else {
                    -v
                }
            }
        })
    }

    /// `Γ(s)`.
    pub fn point(&self, s: T) -> Result<[T; 2]> {
        self.check(s)?;
        Ok(match &self.geometry {
            Geometry::Reconstructed(r) => r.point(s),
            Geometry::Circle { radius } => {
                let t = s / *radius;
                [*radius * t.cos(), *radius * t.sin()]
            }
            Geometry::Graph(g) => g.point(s),
            Geometry::Parallel { base, offset } => {
                let p = base.point(s)?;
                let n = base.normal(s)?;
                [p[0] + *offset * n[0], p[1] + *offset * n[1]]
            }
            Geometry::Reversed(base) => base.point(-s)?,
        })
    }

    /// Unit tangent `Γ'(s)` (for parallel curves, the unit tangent in the
    /// base parameter).
    pub fn tangent(&self, s: T) -> Result<[T; 2]> {
        self.check(s)?;
        Ok(match &self.geometry {
            Geometry::Reconstructed(r) => {
                let th = r.angle(s);
                [th.cos(), th.sin()]
            }
            Geometry::Circle { radius } => {
                let t = s / *radius;
                [-t.sin(), t.cos()]
            }
            Geometry::Graph(g) => g.tangent(s),
            Geometry::Parallel { base, offset } => {
                let g = base.curvature(s)?;
                if !(T::one() - *offset * g > T::zero()) {
                    return Err(Error::SingularOffset { product: (*offset * g).to_f64_lossy() });
                }
                base.tangent(s)?
            }
            Geometry::Reversed(base) => {
                let t = base.tangent(-s)?;
                [-t[0], -t[1]]
            }
        })
    }

    /// Left unit normal `(−Γ₂', Γ₁')`.
    pub fn normal(&self, s: T) -> Result<[T; 2]> {
        let t = self.tangent(s)?;
        Ok([-t[1], t[0]])
    }

    /// `Γ''(s) = γ(s) · normal(s)`.
    pub fn second_derivative(&self, s: T) -> Result<[T; 2]> {
        let g = self.curvature(s)?;
        let n = self.normal(s)?;
        Ok([g * n[0], g * n[1]])
    }

    /// `|dΓ/ds|`: one except for parallel curves (`1 − dγ`).
    pub fn speed(&self, s: T) -> Result<T> {
        match &self.geometry {
            Geometry::Parallel { base, offset } => Ok((T::one() - *offset * base.curvature(s)?) * base.speed(s)?),
            Geometry::Reversed(base) => base.speed(-s),
            _ => Ok(T::one()),
        }
    }

    /// Point at normal distance `u` on `side`.
    pub fn tube_map(&self, s: T, u: T, side: Side) -> Result<[T; 2]> {
        if !(u >= T::zero()) {
            return Err(Error::Domain { what: "tube map normal coordinate", value: u.to_f64_lossy() });
        }
        let p = self.point(s)?;
        let n = self.normal(s)?;
        let sign = match side {
            Side::Interior => T::one(),
            Side::Exterior => -T::one(),
        };
        Ok([p[0] + sign * u * n[0], p[1] + sign * u * n[1]])
    }

    /// `∫ γ ds` over `[lo, hi]`.
    pub fn total_turning(&self, lo: T, hi: T) -> Result<T> {
        let mut err = None;
        let v = adaptive(
            |s| match self.curvature(s) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    T::zero()
                }
            },
            lo,
            hi,
            lit(1e-12),
            lit(1e-12),
            4000,
        );
        match err {
            Some(e) => Err(e),
            None => Ok(v.value),
        }
    }
}

/// Tangent-angle and position tables of a reconstructed curve.
#[derive(Debug, Clone)]
struct Reconstruction<T: Real> {
    profile: ProfileSpec,
    lo: T,
    hi: T,
    h: T,
    closed: bool,
    theta: Vec<T>,
    pts: Vec<[T; 2]>,
    gx: Vec<T>,
    gw: Vec<T>,
    rot: T,
    shift: [T; 2],
}

impl<T: Real> Reconstruction<T> {
    fn new(profile: ProfileSpec, lo: f64, hi: f64, anchor: f64, initial_angle: f64, closed: bool) -> Result<Self> {
        let (lo_t, hi_t): (T, T) = (lit(lo), lit(hi));
        let n = (((hi - lo) / 0.05).ceil() as usize).clamp(64, 40_000);
        let h = (hi_t - lo_t) / cnt::<T>(n);
        let (gx, gw) = gauss_legendre::<T>(8);
        let mut r = Reconstruction {
            profile,
            lo: lo_t,
            hi: hi_t,
            h,
            closed,
            theta: Vec::with_capacity(n + 1),
            pts: Vec::with_capacity(n + 1),
            gx,
            gw,
            rot: T::zero(),
            shift: [T::zero(); 2],
        };
        let mut th = T::zero();
        let mut p = [T::zero(); 2];
        r.theta.push(th);
        r.pts.push(p);
        for i in 0..n {
            let a = lo_t + h * cnt::<T>(i);
            let (dth, dp) = r.cell_increment(a, th, h);
            if !dth.is_finite() || !dp[0].is_finite() || !dp[1].is_finite() {
                return Err(Error::InvalidInput("curvature profile is not finite on the window".into()));
            }
            th += dth;
            p = [p[0] + dp[0], p[1] + dp[1]];
            r.theta.push(th);
            r.pts.push(p);
        }
        let anchor_t: T = lit(anchor);
        let th_a = r.raw_angle(anchor_t);
        let p_a = r.raw_point(anchor_t);
        r.rot = lit::<T>(initial_angle) - th_a;
        let rp = rotate(p_a, r.rot);
        r.shift = [-rp[0], -rp[1]];
        Ok(r)
    }

    fn gamma(&self, s: T) -> T {
        self.profile.value(s)
    }

    /// Angle and displacement accumulated over `[a, a + len]` from angle `th`.
    fn cell_increment(&self, a: T, th: T, len: T) -> (T, [T; 2]) {
        let half = len * lit(0.5);
        let mut dth = T::zero();
        let mut dp = [T::zero(); 2];
        for (x, w) in self.gx.iter().zip(&self.gw) {
            let t = a + half * (*x + T::one());
            dth += *w * self.gamma(t);
            let ang = th + self.partial_angle(a, t);
            dp[0] += *w * ang.cos();
            dp[1] += *w * ang.sin();
        }
        (dth * half, [dp[0] * half, dp[1] * half])
    }

    fn partial_angle(&self, a: T, t: T) -> T {
        let half = (t - a) * lit(0.5);
        let mut acc = T::zero();
        for (x, w) in self.gx.iter().zip(&self.gw) {
            acc += *w * self.gamma(a + half * (*x + T::one()));
        }
        acc * half
    }

    fn wrap(&self, s: T) -> T {
        if self.closed {
            let l = self.hi - self.lo;
            let mut r = (s - self.lo) % l;
            if r < T::zero() {
                r += l;
            }
            self.lo + r
        } else {
            s
        }
    }

    fn cell(&self, s: T) -> usize {
        let n = self.theta.len() - 1;
        let i = ((s - self.lo) / self.h).floor().to_f64_lossy();
        (i.max(0.0) as usize).min(n - 1)
    }

    fn raw_angle(&self, s: T) -> T {
        let s = self.wrap(s);
        if s <= self.lo {
            return self.theta[0];
        }
        if s >= self.hi {
            return *self.theta.last().expect("table");
        }
        let i = self.cell(s);
        let a = self.lo + self.h * cnt::<T>(i);
        self.theta[i] + self.partial_angle(a, s)
    }

    fn raw_point(&self, s: T) -> [T; 2] {
        let mut s = s;
        let mut lap = [T::zero(); 2];
        if self.closed {
            let l = self.hi - self.lo;
            let k = ((s - self.lo) / l).floor();
            s -= k * l;
            let end = *self.pts.last().expect("table");
            lap = [end[0] * k, end[1] * k];
        }
        let out = if s <= self.lo {
            let th = self.theta[0];
            let d = s - self.lo;
            [self.pts[0][0] + d * th.cos(), self.pts[0][1] + d * th.sin()]
        } else if s >= self.hi {
            let th = *self.theta.last().expect("table");
            let p = *self.pts.last().expect("table");
            let d = s - self.hi;
            [p[0] + d * th.cos(), p[1] + d * th.sin()]
        } else {
            let i = self.cell(s);
            let a = self.lo + self.h * cnt::<T>(i);
            let (_, dp) = self.cell_increment(a, self.theta[i], s - a);
            [self.pts[i][0] + dp[0], self.pts[i][1] + dp[1]]
        };
        [out[0] + lap[0], out[1] + lap[1]]
    }

    fn angle(&self, s: T) -> T {
        self.raw_angle(s) + self.rot
    }

    fn point(&self, s: T) -> [T; 2] {
        let p = rotate(self.raw_point(s), self.rot);
        [p[0] + self.shift[0], p[1] + self.shift[1]]
    }

    fn curvature(&self, s: T, order: u8) -> T {
        let s = self.wrap(s);
        if !self.closed && (s < self.lo || s > self.hi) {
            return T::zero();
        }
        match order {
            0 => self.profile.value(s),
            1 => self.profile.d1(s),
            _ => self.profile.d2(s),
        }
    }
}

fn rotate<T: Real>(p: [T; 2], a: T) -> [T; 2] {
    let (s, c) = a.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

#[derive(Debug, Clone, Copy)]
enum GraphShape {
    Parabola { c: f64 },
    Gaussian { amp: f64, width: f64 },
}

impl GraphShape {
    /// `[h, h', h'', h''', h'''']` at `x`.
    fn jet<T: Real>(&self, x: T) -> [T; 5] {
        match *self {
            GraphShape::Parabola { c } => {
                let c: T = lit(c);
                [c * x * x, lit::<T>(2.0) * c * x, lit::<T>(2.0) * c, T::zero(), T::zero()]
            }
            GraphShape::Gaussian { amp, width } => {
                let w: T = lit(width);
                let a: T = lit(amp);
                let t = x / w;
                let e = a * (-t * t).exp();
                let t2 = t * t;
                // Hermite polynomials: h⁽ᵏ⁾ = (−1)ᵏ Hₖ(t) e^{−t²} / wᵏ
                let h1 = lit::<T>(2.0) * t;
                let h2 = lit::<T>(4.0) * t2 - lit(2.0);
                let h3 = lit::<T>(8.0) * t2 * t - lit::<T>(12.0) * t;
                let h4 = lit::<T>(16.0) * t2 * t2 - lit::<T>(48.0) * t2 + lit(12.0);
                [e, -h1 * e / w, h2 * e / (w * w), -h3 * e / (w * w * w), h4 * e / (w * w * w * w)]
            }
        }
    }
}

/// Graph `y = h(x)` reparametrized by arc length measured from `x = 0`.
#[derive(Debug, Clone)]
struct GraphCurve<T: Real> {
    shape: GraphShape,
    x_table: Vec<T>,
    s_table: Vec<T>,
    gx: Vec<T>,
    gw: Vec<T>,
}

impl<T: Real> GraphCurve<T> {
    fn new(shape: GraphShape, half_range: f64) -> Result<Self> {
        let n = ((2.0 * half_range / 0.05).ceil() as usize).clamp(64, 40_000);
        let (gx, gw) = gauss_legendre::<T>(8);
        let x_table: Vec<T> = (0..=n).map(|i| lit::<T>(-half_range) + lit::<T>(2.0 * half_range) * cnt::<T>(i) / cnt::<T>(n)).collect();
        let mut g = GraphCurve { shape, x_table, s_table: Vec::with_capacity(n + 1), gx, gw };
        let mut s = T::zero();
        g.s_table.push(s);
        for i in 0..n {
            s += g.arc(g.x_table[i], g.x_table[i + 1]);
            g.s_table.push(s);
        }
        // Arc length is measured from x = 0, the midpoint of the table.
        let s0 = g.s_table[n / 2];
        for v in g.s_table.iter_mut() {
            *v -= s0;
        }
        if !g.s_table.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("graph arc length is not finite".into()));
        }
        Ok(g)
    }

    fn q(&self, x: T) -> T {
        let j = self.shape.jet(x);
        (T::one() + j[1] * j[1]).sqrt()
    }

    fn arc(&self, a: T, b: T) -> T {
        let half = (b - a) * lit(0.5);
        let mut acc = T::zero();
        for (x, w) in self.gx.iter().zip(&self.gw) {
            acc += *w * self.q(a + half * (*x + T::one()));
        }
        acc * half
    }

    /// Abscissa for arc length `s` inside the table, or `None` outside.
    fn x_of_s(&self, s: T) -> Option<T> {
        let n = self.s_table.len() - 1;
        if s < self.s_table[0] || s > self.s_table[n] {
            return None;
        }
        let i = match self.s_table.binary_search_by(|v| v.partial_cmp(&s).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => return Some(self.x_table[i]),
            Err(i) => i.clamp(1, n) - 1,
        };
        let (x0, x1) = (self.x_table[i], self.x_table[i + 1]);
        let (s0, s1) = (self.s_table[i], self.s_table[i + 1]);
        let mut x = x0 + (x1 - x0) * (s - s0) / (s1 - s0);
        for _ in 0..40 {
            let f = s0 + self.arc(x0, x) - s;
            let dx = f / self.q(x);
            x -= dx;
            if dx.abs() <= T::epsilon() * lit(8.0) * x.abs().max(T::one()) {
                break;
            }
        }
        Some(x)
    }

    fn end_ray(&self, s: T) -> ([T; 2], [T; 2], T) {
        let n = self.s_table.len() - 1;
        let (x, sb) = if s < self.s_table[0] { (self.x_table[0], self.s_table[0]) } else { (self.x_table[n], self.s_table[n]) };
        let j = self.shape.jet(x);
        let q = (T::one() + j[1] * j[1]).sqrt();
        ([x, j[0]], [T::one() / q, j[1] / q], s - sb)
    }

    fn point(&self, s: T) -> [T; 2] {
        match self.x_of_s(s) {
            Some(x) => [x, self.shape.jet(x)[0]],
            None => {
                let (p, t, d) = self.end_ray(s);
                [p[0] + d * t[0], p[1] + d * t[1]]
            }
        }
    }

    fn tangent(&self, s: T) -> [T; 2] {
        match self.x_of_s(s) {
            Some(x) => {
                let j = self.shape.jet(x);
                let q = (T::one() + j[1] * j[1]).sqrt();
                [T::one() / q, j[1] / q]
            }
            None => self.end_ray(s).1,
        }
    }

    fn curvature(&self, s: T, order: u8) -> T {
        let Some(x) = self.x_of_s(s) else { return T::zero() };
        let [_, h1, h2, h3, h4] = self.shape.jet(x);
        let q = (T::one() + h1 * h1).sqrt();
        let q2 = q * q;
        let q3 = q2 * q;
        let q5 = q3 * q2;
        let q7 = q5 * q2;
        let three: T = lit(3.0);
        match order {
            0 => h2 / q3,
            _ => {
                // g1 = dγ/dx
                let g1 = h3 / q3 - three * h2 * h2 * h1 / q5;
                if order == 1 {
                    return g1 / q;
                }
                let g1x = h4 / q3 - (lit::<T>(9.0) * h1 * h2 * h3 + three * h2 * h2 * h2) / q5 + lit::<T>(15.0) * h1 * h1 * h2 * h2 * h2 / q7;
                g1x / q2 - g1 * h1 * h2 / (q2 * q2)
            }
        }
    }
}

/// Curvature of the parallel curve at distance `d`: `γ/(1 − dγ)`.
pub fn parallel_curvature<T: Real>(gamma: T, d: T) -> Result<T> {
    let j = T::one() - d * gamma;
    if !(j > T::zero()) {
        return Err(Error::SingularOffset { product: (d * gamma).to_f64_lossy() });
    }
    Ok(gamma / j)
}

/// Extremal curvature data over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureStats<T> {
    pub gamma_star: T,
    pub gamma_lowstar: T,
    pub gamma_plus: T,
    pub gamma1_plus: T,
    pub gamma2_plus: T,
    pub s_star: T,
    pub s_lowstar: T,
    /// Least-squares slope of `log|γ|` against `log⟨s⟩` on the outer half of
    /// the window; `None` when fewer than two nonzero samples remain.
    pub decay_exponent_fit: Option<T>,
    pub flat: bool,
}

/// Curvature extrema by dense sampling followed by golden-section refinement.
pub fn curvature_stats<T: Real>(curve: &BoundaryCurve<T>, window: (T, T), n_samples: usize) -> Result<CurvatureStats<T>> {
    if n_samples < 3 {
        return Err(Error::InvalidInput("curvature statistics need at least three samples".into()));
    }
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(Error::InvalidInput("curvature window must be increasing".into()));
    }
    let h = (hi - lo) / cnt::<T>(n_samples - 1);
    let ss: Vec<T> = (0..n_samples).map(|i| lo + h * cnt::<T>(i)).collect();
    let mut jets = Vec::with_capacity(n_samples);
    for s in &ss {
        jets.push(curve.curvature_jet(*s)?);
    }
    let refine = |idx: usize, f: &dyn Fn(T) -> T| -> (T, T) {
        let a = if idx == 0 { ss[0] } else { ss[idx - 1] };
        let b = if idx + 1 == n_samples { ss[n_samples - 1] } else { ss[idx + 1] };
        let (x, fx) = golden_max(&f, a, b, h * lit(1e-6));
        let f0 = f(ss[idx]);
        if fx >= f0 {
            (x, fx)
        } else {
            (ss[idx], f0)
        }
    };
    let argmax = |key: &dyn Fn(&[T; 3]) -> T| -> usize {
        let mut best = 0;
        for i in 1..n_samples {
            if key(&jets[i]) > key(&jets[best]) {
                best = i;
            }
        }
        best
    };
    let val = |s: T, k: usize| curve.curvature_derivative(s, k as u8).unwrap_or(T::zero());

    let i_max = argmax(&|j| j[0]);
    let (s_star, g_star) = refine(i_max, &|s| val(s, 0));
    let i_min = argmax(&|j| -j[0]);
    let (s_low, neg_low) = refine(i_min, &|s| -val(s, 0));
    let g_low = -neg_low;
    let i1 = argmax(&|j| j[1].abs());
    let (_, g1) = refine(i1, &|s| val(s, 1).abs());
    let i2 = argmax(&|j| j[2].abs());
    let (_, g2) = refine(i2, &|s| val(s, 2).abs());
    let g_plus = g_star.abs().max(g_low.abs());
    let flat = g_plus <= lit(1e-14);

    let decay = if curve.is_closed() {
        None
    } else {
        let center = (lo + hi) * lit(0.5);
        let quarter = (hi - lo) * lit(0.25);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (s, j) in ss.iter().zip(&jets) {
            if (*s - center).abs() >= quarter && j[0].abs() > T::min_positive_value() * lit(1e20) {
                xs.push(japanese_bracket(*s).ln());
                ys.push(j[0].abs().ln());
            }
        }
        least_squares_slope(&xs, &ys).map(|(p, _)| p)
    };
    Ok(CurvatureStats {
        gamma_star: g_star,
        gamma_lowstar: g_low,
        gamma_plus: g_plus,
        gamma1_plus: g1,
        gamma2_plus: g2,
        s_star: if flat { T::zero() } else { s_star },
        s_lowstar: if flat { T::zero() } else { s_low },
        decay_exponent_fit: decay,
        flat,
    })
}

/// Slope and coefficient of determination of the least-squares line.
pub fn least_squares_slope<T: Real>(xs: &[T], ys: &[T]) -> Option<(T, T)> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = cnt::<T>(n);
    let mx = xs.iter().copied().sum::<T>() / nf;
    let my = ys.iter().copied().sum::<T>() / nf;
    let sxx: T = xs.iter().map(|x| (*x - mx) * (*x - mx)).sum();
    let sxy: T = xs.iter().zip(ys).map(|(x, y)| (*x - mx) * (*y - my)).sum();
    let syy: T = ys.iter().map(|y| (*y - my) * (*y - my)).sum();
    if !(sxx > T::zero()) {
        return None;
    }
    let p = sxy / sxx;
    let r2 = if syy > T::zero() { (sxy * sxy) / (sxx * syy) } else { T::one() };
    Some((p, r2))
}

/// Outcome of the geometric hypothesis checks.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport<T> {
    pub injective: bool,
    /// `a · γ₊ < 1`.
    pub local_ok: bool,
    /// No crossing of normal segments whose feet are more than `3a` apart.
    pub global_ok: bool,
    pub a1_estimate: T,
    pub decay_ok: bool,
    pub stats: CurvatureStats<T>,
}

/// Checks that the tube map of width `a` on `side` is injective (sampled)
/// and that the curvature decays fast enough.
pub fn check_assumptions<T: Real>(curve: &BoundaryCurve<T>, side: Side, a: T, n_samples: usize) -> Result<AssumptionReport<T>> {
    if !(a > T::zero()) {
        return Err(Error::InvalidInput("strip width must be positive".into()));
    }
    let window = curve.window();
    let stats = curvature_stats(curve, window, n_samples.max(64))?;
    let side_curv = match side {
        Side::Interior => stats.gamma_star,
        Side::Exterior => -stats.gamma_lowstar,
    };
    // Only curvature bending towards the strip limits the local width.
    let local_limit = if side_curv > T::zero() { T::one() / side_curv } else { T::infinity() };
    let local_ok = a < local_limit;
    let global_ok = segments_disjoint(curve, side, a, n_samples)?;
    let mut a1 = if local_limit.is_finite() { local_limit } else { window.1 - window.0 };
    for _ in 0..30 {
        if segments_disjoint(curve, side, a1 * lit(0.999), n_samples.min(400))? {
            break;
        }
        a1 *= lit(0.5);
    }
    let decay_ok = curve.is_closed() || stats.flat || stats.decay_exponent_fit.is_none_or(|p| p < -T::one());
    Ok(AssumptionReport { injective: local_ok && global_ok, local_ok, global_ok, a1_estimate: a1, decay_ok, stats })
}

fn segments_disjoint<T: Real>(curve: &BoundaryCurve<T>, side: Side, a: T, n: usize) -> Result<bool> {
    let (lo, hi) = curve.window();
    let n = n.max(8);
    let closed = curve.is_closed();
    let step = if closed { (hi - lo) / cnt::<T>(n) } else { (hi - lo) / cnt::<T>(n - 1) };
    let mut segs = Vec::with_capacity(n);
    for i in 0..n {
        let s = lo + step * cnt::<T>(i);
        segs.push((s, curve.point(s)?, curve.tube_map(s, a, side)?));
    }
    let per = hi - lo;
    let sep = lit::<T>(3.0) * a;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut d = (segs[j].0 - segs[i].0).abs();
            if closed {
                d = d.min(per - d);
            }
            if d <= sep {
                continue;
            }
            if segments_intersect(segs[i].1, segs[i].2, segs[j].1, segs[j].2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn orient<T: Real>(a: [T; 2], b: [T; 2], c: [T; 2]) -> T {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment<T: Real>(a: [T; 2], b: [T; 2], p: [T; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect<T: Real>(p1: [T; 2], p2: [T; 2], q1: [T; 2], q2: [T; 2]) -> bool {
    let scale = [p1, p2, q1, q2].iter().map(|p| p[0].abs().max(p[1].abs())).fold(T::one(), T::max);
    let eps = scale * scale * T::epsilon() * lit(64.0);
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)) {
        return true;
    }
    (d1.abs() <= eps && on_segment(q1, q2, p1))
        || (d2.abs() <= eps && on_segment(q1, q2, p2))
        || (d3.abs() <= eps && on_segment(p1, p2, q1))
        || (d4.abs() <= eps && on_segment(p1, p2, q2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_curvature(c: &BoundaryCurve<f64>, s: f64) -> f64 {
        // curvature of the sampled point sequence, independent of the
        // curvature evaluator
        let h = 1e-3;
        let p0 = c.point(s - h).unwrap();
        let p1 = c.point(s).unwrap();
        let p2 = c.point(s + h).unwrap();
        let d1 = [(p2[0] - p0[0]) / (2.0 * h), (p2[1] - p0[1]) / (2.0 * h)];
        let d2 = [(p2[0] - 2.0 * p1[0] + p0[0]) / (h * h), (p2[1] - 2.0 * p1[1] + p0[1]) / (h * h)];
        d1[0] * d2[1] - d1[1] * d2[0]
    }

    #[test]
    fn circle_basics() {
        let c = CurveSpec::Circle { radius: 2.0 }.build::<f64>().unwrap();
        assert_eq!(c.curvature(0.3).unwrap(), 0.5);
        let p = c.tube_map(1.0, 0.5, Side::Exterior).unwrap();
        assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - 2.5).abs() < 1e-14);
        assert!((fd_curvature(&c, 0.7) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn reconstructed_geometry_matches_profile() {
        let c = CurveSpec::LineBump { separation: 8.0 }.build::<f64>().unwrap();
        for s in [-3.0, -0.5, 0.0, 0.4, 2.0, 7.5, 9.0] {
            let t = c.tangent(s).unwrap();
            assert!(((t[0] * t[0] + t[1] * t[1]).sqrt() - 1.0).abs() < 1e-12);
            assert!((fd_curvature(&c, s) - c.curvature(s).unwrap()).abs() < 2e-6, "s={s}");
        }
    }

    #[test]
    fn sech_profile_turns_by_pi() {
        let c = curve_from_curvature::<f64>(ProfileSpec::Sech { amp: 1.0, center: 0.0, width: 1.0 }, [-40.0, 40.0], -40.0).unwrap();
        let t0 = c.tangent(-40.0).unwrap();
        let t1 = c.tangent(40.0).unwrap();
        let turned = t1[1].atan2(t1[0]) - t0[1].atan2(t0[0]);
        // 2 gd(40) = π − 4 e^{−40} + …
        assert!((turned - std::f64::consts::PI).abs() < 1e-9, "{turned}");
    }

    #[test]
    fn graph_curvature_derivatives_match_differences() {
        let c = CurveSpec::GraphBump { amplitude: 0.3, width: 1.0 }.build::<f64>().unwrap();
        for s in [-1.2, -0.3, 0.0, 0.8, 2.0] {
            let h = 1e-4;
            let d1 = (c.curvature(s + h).unwrap() - c.curvature(s - h).unwrap()) / (2.0 * h);
            let d2 = (c.curvature_d1(s + h).unwrap() - c.curvature_d1(s - h).unwrap()) / (2.0 * h);
            assert!((d1 - c.curvature_d1(s).unwrap()).abs() < 1e-7);
            assert!((d2 - c.curvature_d2(s).unwrap()).abs() < 1e-6);
            assert!((fd_curvature(&c, s) - c.curvature(s).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn flipped_curve_negates_curvature() {
        let c = CurveSpec::LineBump { separation: 8.0 }.build::<f64>().unwrap();
        let f = c.flipped();
        for s in [-1.0, 0.0, 2.5] {
            assert!((f.curvature(s).unwrap() + c.curvature(-s).unwrap()).abs() < 1e-15);
            assert!((f.curvature_d1(s).unwrap() - c.curvature_d1(-s).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn injectivity_of_circle_tubes() {
        let c = CurveSpec::Circle { radius: 1.0 }.build::<f64>().unwrap();
        assert!(check_assumptions(&c, Side::Interior, 0.5, 400).unwrap().injective);
        assert!(!check_assumptions(&c, Side::Interior, 1.5, 400).unwrap().injective);
        assert!(check_assumptions(&c, Side::Exterior, 1.5, 400).unwrap().injective);
    }

    #[test]
    fn parallel_curvature_values() {
        assert_eq!(parallel_curvature::<f64>(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(parallel_curvature::<f64>(1.0, 0.5).unwrap(), 2.0);
        assert!((parallel_curvature::<f64>(-1.0, 0.5).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(parallel_curvature::<f64>(2.0, 0.5), Err(Error::SingularOffset { .. })));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec: CurveSpec = serde_json::from_str(r#"{"family":"parallel","base":{"family":"circle","radius":2.0},"offset":0.5}"#).unwrap();
        let c = spec.build::<f64>().unwrap();
        assert!((c.curvature(0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(serde_json::from_str::<CurveSpec>(r#"{"family":"circle","radius":1,"extra":0}"#).is_err());
    }
}
