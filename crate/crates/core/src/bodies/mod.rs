//! Convex bodies: support functions, Minkowski functionals, polars,
//! volumes, surface area measures and the mixed volume V₁.

mod measure;
mod polytope;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::config::Settings;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{AdaptedFrame, SphereGrid};

pub use measure::{fibonacci_sphere, DirectionBins, SphericalMeasure};
pub use polytope::{Facet, Polytope, Ridge};

/// A 1-homogeneous function on R^d, used as an exact support function.
pub type SupportFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// {x : xᵗ A x ≤ 1} for a symmetric positive-definite A.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    /// Lower-triangular L with A^{-1} = L Lᵗ, so the body is L·B.
    l: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let d = a.nrows();
        if d == 0 || a.ncols() != d {
            return invalid("ellipsoid matrix must be square");
        }
        let scale = a.amax().max(1e-300);
        if (&a - a.transpose()).amax() > 1e-10 * scale {
            return invalid("ellipsoid matrix must be symmetric");
        }
        let sym = (&a + a.transpose()) * 0.5;
        if sym.clone().cholesky().is_none() {
            return invalid("ellipsoid matrix must be positive definite");
        }
        let a_inv = sym
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("singular ellipsoid".into()))?;
        let a_inv = (&a_inv + a_inv.transpose()) * 0.5;
        let l = a_inv
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Degenerate("ellipsoid inverse not positive definite".into()))?
            .l();
        Ok(Ellipsoid { a: sym, a_inv, l })
    }

    /// Ball of the given radius.
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim) / (radius * radius))
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    fn quad(m: &DMatrix<f64>, x: &[f64]) -> f64 {
        let d = m.nrows();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += x[i] * m[(i, j)] * x[j];
            }
        }
        s.max(0.0)
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        Self::quad(&self.a_inv, u).sqrt()
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        Self::quad(&self.a, x).sqrt()
    }

    /// Exact volume ω_d / √det A.
    pub fn volume(&self) -> f64 {
        crate::special::ball_volume(self.dim() as f64)
            * self.l.diagonal().iter().product::<f64>().abs()
    }

    pub fn polar(&self) -> Result<Self> {
        Self::new(self.a_inv.clone())
    }

    /// Image under x ↦ Mx.
    pub fn linear_image(&self, m: &DMatrix<f64>) -> Result<Self> {
        let minv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("singular map".into()))?;
        Self::new(minv.transpose() * &self.a * minv)
    }

    /// Surface area measure from a sphere grid pushed through y = L u:
    /// normal ∝ L^{-t} u and area element |det L|·|L^{-t} u| du.
    pub fn surface_measure(&self, grid: &SphereGrid) -> Result<SphericalMeasure> {
        if grid.dim() != self.dim() {
            return invalid("grid dimension differs from ellipsoid dimension");
        }
        let lt_inv = self
            .l
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("singular ellipsoid".into()))?;
        let det = self.l.diagonal().iter().product::<f64>().abs();
        let d = self.dim();
        let mut dirs = Vec::with_capacity(grid.len());
        let mut ws = Vec::with_capacity(grid.len());
        for (u, w) in grid.nodes().zip(grid.weights()) {
            let n: Vec<f64> = (0..d)
                .map(|i| (0..d).map(|j| lt_inv[(i, j)] * u[j]).sum())
                .collect();
            ws.push(w * det * norm(&n));
            dirs.push(n);
        }
        SphericalMeasure::new(d, &dirs, &ws)
    }
}

/// Body known through support values on a sphere grid, optionally backed by
/// an exact support evaluator.
#[derive(Clone)]
pub struct SampledBody {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
    exact: Option<SupportFn>,
}

impl fmt::Debug for SampledBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledBody")
            .field("dim", &self.grid.dim())
            .field("nodes", &self.grid.len())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl SampledBody {
    pub fn from_values(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid("one support value per grid node required");
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Degenerate(format!(
                "support value at node {i} is not positive"
            )));
        }
        Ok(SampledBody {
            grid,
            values,
            exact: None,
        })
    }

    /// Samples `h` on the grid and keeps it for off-grid evaluation.
    pub fn from_fn(grid: Arc<SphereGrid>, h: SupportFn) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().map(|u| h(u)).collect();
        let mut b = Self::from_values(grid, values)?;
        b.exact = Some(h);
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact evaluator when present, otherwise the nearest grid node.
    pub fn support(&self, u: &[f64]) -> f64 {
        if let Some(h) = &self.exact {
            return h(u);
        }
        let r = norm(u);
        if r == 0.0 {
            return 0.0;
        }
        let (k, _) = self
            .grid
            .nodes()
            .enumerate()
            .map(|(k, v)| (k, dot(u, v)))
            .fold((0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
        r * self.values[k]
    }

    /// Gauge of the Wulff shape ∩ {x·uᵢ ≤ hᵢ}: max over nodes of x·uᵢ/hᵢ.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.grid
            .nodes()
            .zip(&self.values)
            .map(|(u, h)| dot(x, u) / h)
            .fold(0.0, f64::max)
    }

    /// Largest violation of h(c) ≤ αh(a) + βh(b) over consecutive node
    /// triples with c = αa + βb, relative to h(c). Planar grids only; other
    /// dimensions compare h(a+b) ≤ h(a)+h(b) through the exact evaluator.
    pub fn convexity_defect(&self) -> f64 {
        let n = self.grid.len();
        let mut worst: f64 = 0.0;
        if self.dim() == 2 {
            let mut order: Vec<usize> = (0..n).collect();
            let ang = |k: usize| self.grid.node(k)[1].atan2(self.grid.node(k)[0]);
            order.sort_by(|&i, &j| ang(i).partial_cmp(&ang(j)).unwrap());
            for k in 0..n {
                let (ia, ic, ib) = (order[k], order[(k + 1) % n], order[(k + 2) % n]);
                let (a, b, c) = (self.grid.node(ia), self.grid.node(ib), self.grid.node(ic));
                let det = a[0] * b[1] - a[1] * b[0];
                if det.abs() < 1e-14 {
                    continue;
                }
                let alpha = (c[0] * b[1] - c[1] * b[0]) / det;
                let beta = (a[0] * c[1] - a[1] * c[0]) / det;
                if alpha < 0.0 || beta < 0.0 {
                    continue;
                }
                let v = self.values[ic] - alpha * self.values[ia] - beta * self.values[ib];
                worst = worst.max(v / self.values[ic]);
            }
        } else if let Some(h) = &self.exact {
            for i in (0..n).step_by((n / 64).max(1)) {
                for j in (0..n).step_by((n / 16).max(1)) {
                    let (a, b) = (self.grid.node(i), self.grid.node(j));
                    let s: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    if norm(&s) < 1e-6 {
                        continue;
                    }
                    let v = h(&s) - self.values[i] - self.values[j];
                    worst = worst.max(v / (self.values[i] + self.values[j]));
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub enum ConvexBody {
    Polytope(Polytope),
    Ellipsoid(Ellipsoid),
    SupportSampled(SampledBody),
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope(p) => p.dim(),
            ConvexBody::Ellipsoid(e) => e.dim(),
            ConvexBody::SupportSampled(s) => s.dim(),
        }
    }

    /// h_K(u), extended 1-homogeneously to all u.
    pub fn support(&self, u: &[f64]) -> f64 {
        match self {
            ConvexBody::Polytope(p) => p.support(u),
            ConvexBody::Ellipsoid(e) => e.support(u),
            ConvexBody::SupportSampled(s) => s.support(u),
        }
    }

    /// ‖x‖_K = inf{r > 0 : x ∈ rK}.
    pub fn minkowski_functional(&self, x: &[f64]) -> Result<f64> {
        match self {
            ConvexBody::Polytope(p) => p.gauge(x),
            ConvexBody::Ellipsoid(e) => Ok(e.gauge(x)),
            ConvexBody::SupportSampled(s) => Ok(s.gauge(x)),
        }
    }

    fn gauge_fn(&self) -> Result<Box<dyn Fn(&[f64]) -> f64 + '_>> {
        Ok(match self {
            ConvexBody::Polytope(p) => {
                if !p.contains_origin_interior() {
                    return Err(Error::OriginNotInterior);
                }
                Box::new(move |x| p.gauge_unchecked(x))
            }
            ConvexBody::Ellipsoid(e) => Box::new(move |x| e.gauge(x)),
            ConvexBody::SupportSampled(s) => Box::new(move |x| s.gauge(x)),
        })
    }

    pub fn polar(&self) -> Result<ConvexBody> {
        Ok(match self {
            ConvexBody::Polytope(p) => ConvexBody::Polytope(p.polar()?),
            ConvexBody::Ellipsoid(e) => ConvexBody::Ellipsoid(e.polar()?),
            ConvexBody::SupportSampled(s) => {
                let src = s.clone();
                let h: SupportFn = Arc::new(move |x| src.gauge(x));
                ConvexBody::SupportSampled(SampledBody::from_fn(s.grid.clone(), h)?)
            }
        })
    }

    /// Volume by polar coordinates, (1/d)∫ ‖θ‖_K^{-d} dθ, on the default
    /// sphere grid after affine whitening.
    pub fn volume_polar(&self, settings: &Settings) -> Result<f64> {
        let d = self.dim();
        if d == 1 {
            return self.volume(settings);
        }
        let grid = settings.sphere(d)?;
        let g = self.gauge_fn()?;
        let v = AdaptedFrame::new(&grid, g, settings.whiten_passes)?.volume();
        check_volume(v)
    }

    /// Volume: closed form for polytopes and ellipsoids, polar coordinates
    /// otherwise.
    pub fn volume(&self, settings: &Settings) -> Result<f64> {
        match self {
            ConvexBody::Polytope(p) => check_volume(p.volume()),
            ConvexBody::Ellipsoid(e) => check_volume(e.volume()),
            ConvexBody::SupportSampled(_) => self.volume_polar(settings),
        }
    }

    /// Image under x ↦ Mx (polytopes and ellipsoids).
    pub fn linear_image(&self, m: &DMatrix<f64>) -> Result<ConvexBody> {
        Ok(match self {
            ConvexBody::Polytope(p) => ConvexBody::Polytope(p.transform(m)?),
            ConvexBody::Ellipsoid(e) => ConvexBody::Ellipsoid(e.linear_image(m)?),
            ConvexBody::SupportSampled(_) => {
                return Err(Error::Unsupported("linear image of a sampled body".into()))
            }
        })
    }

    /// Plain-text literal, e.g. `polytope n=2 v=(0,0);(1,0);(0,1)`.
    pub fn to_literal(&self) -> Result<String> {
        match self {
            ConvexBody::Polytope(p) => {
                let v: Vec<String> = p
                    .vertices()
                    .iter()
                    .map(|x| {
                        format!(
                            "({})",
                            x.iter()
                                .map(|c| c.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    })
                    .collect();
                Ok(format!("polytope n={} v={}", p.dim(), v.join(";")))
            }
            ConvexBody::Ellipsoid(e) => {
                let d = e.dim();
                let rows: Vec<String> = (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| e.matrix()[(i, j)].to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                Ok(format!("ellipsoid n={d} a=({})", rows.join(";")))
            }
            ConvexBody::SupportSampled(_) => {
                Err(Error::Unsupported("literal for a sampled body".into()))
            }
        }
    }
}

fn check_volume(v: f64) -> Result<f64> {
    if !(v > 1e-12) || !v.is_finite() {
        return Err(Error::Degenerate(format!("volume {v:e} below 1e-12")));
    }
    Ok(v)
}

/// σ_P: one atom per facet at its outer normal with weight its area.
pub fn surface_measure(p: &Polytope) -> Result<SphericalMeasure> {
    let facets: Vec<&Facet> = p.facets().iter().filter(|f| f.area >= 1e-12).collect();
    let dirs: Vec<Vec<f64>> = facets.iter().map(|f| f.normal.clone()).collect();
    let ws: Vec<f64> = facets.iter().map(|f| f.area).collect();
    SphericalMeasure::new(p.dim(), &dirs, &ws)
}

/// σ_{P,p} = h_P^{1-p} σ_P.
pub fn lp_surface_measure(p: &Polytope, exponent: f64) -> Result<SphericalMeasure> {
    if !(exponent >= 1.0) {
        return invalid("p must be at least 1");
    }
    if !p.contains_origin_interior() {
        return Err(Error::OriginNotInterior);
    }
    let facets: Vec<&Facet> = p.facets().iter().filter(|f| f.area >= 1e-12).collect();
    let dirs: Vec<Vec<f64>> = facets.iter().map(|f| f.normal.clone()).collect();
    let ws: Vec<f64> = facets
        .iter()
        .map(|f| f.area * f.offset.powf(1.0 - exponent))
        .collect();
    SphericalMeasure::new(p.dim(), &dirs, &ws)
}

/// V₁(K, L) = (1/d) ∫ h_L dσ_K, with σ_K exact for polytopes and by
/// boundary quadrature for ellipsoids.
pub fn mixed_volume_v1(k: &ConvexBody, l: &ConvexBody, settings: &Settings) -> Result<f64> {
    if k.dim() != l.dim() {
        return invalid("bodies live in different dimensions");
    }
    let sigma = match k {
        ConvexBody::Polytope(p) => surface_measure(p)?,
        ConvexBody::Ellipsoid(e) => {
            let grid = settings.sphere(e.dim())?;
            e.surface_measure(&grid)?
        }
        ConvexBody::SupportSampled(_) => {
            return Err(Error::Unsupported(
                "surface measure of a sampled body".into(),
            ))
        }
    };
    Ok(sigma.integrate(|v| l.support(v)) / k.dim() as f64)
}

fn parse_tuple(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected (..), got '{s}'")))?;
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{x}'")))
        })
        .collect()
}

/// Parses `polytope n=2 v=(0,0);(1,0);(0,1)` or `ellipsoid n=2 a=(1,0;0,4)`.
pub fn parse_body(text: &str) -> Result<ConvexBody> {
    let mut parts = text.split_whitespace();
    let kind = parts
        .next()
        .ok_or_else(|| Error::Parse("empty body literal".into()))?;
    let mut n: Option<usize> = None;
    let mut payload: Option<(&str, String)> = None;
    for tok in parts {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{tok}'")))?;
        match k {
            "n" => {
                n = Some(
                    v.parse()
                        .map_err(|_| Error::Parse(format!("bad dimension '{v}'")))?,
                )
            }
            "v" | "a" => payload = Some((k, v.to_string())),
            _ => return Err(Error::Parse(format!("unknown field '{k}'"))),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("missing n=".into()))?;
    match (kind, payload) {
        ("polytope", Some(("v", v))) => {
            let pts: Vec<Vec<f64>> = v.split(';').map(parse_tuple).collect::<Result<_>>()?;
            if pts.iter().any(|p| p.len() != n) {
                return Err(Error::Parse("vertex of wrong dimension".into()));
            }
            Ok(ConvexBody::Polytope(Polytope::from_points(n, &pts)?))
        }
        ("ellipsoid", Some(("a", a))) => {
            let inner = a
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse("expected a=(..)".into()))?;
            let rows: Vec<Vec<f64>> = inner
                .split(';')
                .map(|r| parse_tuple(&format!("({r})")))
                .collect::<Result<_>>()?;
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Parse("ellipsoid matrix must be n×n".into()));
            }
            let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            Ok(ConvexBody::Ellipsoid(Ellipsoid::new(m)?))
        }
        (k, _) => Err(Error::Parse(format!(
            "unknown or incomplete body literal '{k}'"
        ))),
    }
}
