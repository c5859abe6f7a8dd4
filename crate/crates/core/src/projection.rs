//! (L^p,Q) cosine transforms, projection bodies in R^{nm}, polar projection
//! volumes, (L^p,Q) centroid bodies and the constant d_{n,p}(Q).
//!
//! A point θ of R^{nm} is the n×m matrix (θ₁ … θ_m) stored column after
//! column, so θ[k·n + a] is entry (a, k). For v ∈ R^n the row product vᵗθ is
//! (v·θ₁, …, v·θ_m), and for a vertex q of Q one has vᵗθ·q = v·(θq). The
//! kernel below precomputes θq_j once per direction θ.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bodies::{
    dot, lp_surface_measure, norm, ConvexBody, Polytope, SampledBody, SphericalMeasure, SupportFn,
};
use crate::config::Settings;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_sphere, pairwise_sum, AdaptedFrame};
use crate::special::ball_volume;

/// Unit vector of R^{nm} viewed as an n×m matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDirection {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl MatrixDirection {
    pub fn new(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 || data.len() != n * m {
            return invalid("matrix direction needs n·m entries");
        }
        if (norm(&data) - 1.0).abs() > 1e-12 {
            return invalid("matrix direction must have unit Frobenius norm");
        }
        Ok(MatrixDirection { n, m, data })
    }

    pub fn normalized(n: usize, m: usize, data: &[f64]) -> Result<Self> {
        let r = norm(data);
        if !(r > 0.0 && r.is_finite()) {
            return invalid("cannot normalize a zero or non-finite matrix");
        }
        Self::new(n, m, data.iter().map(|x| x / r).collect())
    }

    /// θ with θ₁ = e₁ and the other columns zero.
    pub fn first_slot(n: usize, m: usize) -> Self {
        let mut data = vec![0.0; n * m];
        data[0] = 1.0;
        MatrixDirection { n, m, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// vᵗθ ∈ R^m.
    pub fn row_product(&self, v: &[f64]) -> Vec<f64> {
        row_product(self.n, &self.data, v)
    }
}

fn row_product(n: usize, theta: &[f64], v: &[f64]) -> Vec<f64> {
    theta.chunks_exact(n).map(|col| dot(v, col)).collect()
}

/// Convex polytope in R^m that contains the origin, used as the Q of an
/// (L^p,Q) construction.
#[derive(Debug, Clone, PartialEq)]
pub struct QBody {
    name: String,
    poly: Polytope,
}

impl QBody {
    pub fn new(name: &str, poly: Polytope) -> Result<Self> {
        if poly.facets().iter().any(|f| f.offset < -1e-12) {
            return invalid("Q must contain the origin");
        }
        Ok(QBody {
            name: name.to_string(),
            poly,
        })
    }

    pub fn from_vertices(name: &str, m: usize, vertices: &[Vec<f64>]) -> Result<Self> {
        Self::new(name, Polytope::from_points(m, vertices)?)
    }

    /// `segment` = [-1/2,1/2]^m, `segment+` = [0,1]^m, `square` =
    /// [-1/4,3/4]^m, `simplex2` = conv(0, e₁, …, e_m).
    pub fn preset(name: &str, m: usize) -> Result<Self> {
        if !(1..=3).contains(&m) {
            return invalid("Q presets exist for m = 1, 2, 3");
        }
        let cube = |lo: f64, hi: f64| -> Vec<Vec<f64>> {
            (0..1usize << m)
                .map(|mask| {
                    (0..m)
                        .map(|k| if mask >> k & 1 == 1 { hi } else { lo })
                        .collect()
                })
                .collect()
        };
        let verts = match name {
            "segment" => cube(-0.5, 0.5),
            "segment+" => cube(0.0, 1.0),
            "square" => cube(-0.25, 0.75),
            "simplex2" => {
                let mut v = vec![vec![0.0; m]];
                for k in 0..m {
                    let mut e = vec![0.0; m];
                    e[k] = 1.0;
                    v.push(e);
                }
                v
            }
            _ => return invalid(&format!("unknown Q preset '{name}'")),
        };
        Self::from_vertices(name, m, &verts)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        self.poly.vertices()
    }

    pub fn polytope(&self) -> &Polytope {
        &self.poly
    }

    /// h_Q(y), never negative since 0 ∈ Q.
    pub fn support(&self, y: &[f64]) -> f64 {
        self.poly.support(y).max(0.0)
    }

    /// Columns θq_j ∈ R^n, one per vertex, flattened.
    pub(crate) fn images(&self, n: usize, theta: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vertices().len() * n);
        for q in self.vertices() {
            for a in 0..n {
                out.push((0..q.len()).map(|k| theta[k * n + a] * q[k]).sum());
            }
        }
        out
    }

    /// h_Q(vᵗθ) = max_j v·(θq_j), from precomputed images.
    #[inline]
    pub(crate) fn support_from_images(images: &[f64], n: usize, v: &[f64]) -> f64 {
        images
            .chunks_exact(n)
            .map(|a| dot(v, a))
            .fold(0.0, f64::max)
    }

    /// sup over unit v of h_Q(vᵗθ) = max_j |θq_j|.
    pub fn max_row_support(&self, n: usize, theta: &[f64]) -> f64 {
        self.images(n, theta)
            .chunks_exact(n)
            .map(norm)
            .fold(0.0, f64::max)
    }
}

#[inline]
pub(crate) fn pow_p(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else if x <= 0.0 {
        0.0
    } else if p.fract() == 0.0 && p <= 32.0 {
        x.powi(p as i32)
    } else if (2.0 * p).fract() == 0.0 && p <= 32.0 {
        x.powi(p as i32) * x.sqrt()
    } else {
        x.powf(p)
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return invalid("p must be a finite number at least 1");
    }
    Ok(())
}

/// Σᵢ wᵢ h_Q(vᵢᵗθ)^p for θ of any length (1-homogeneous after the p-th root).
pub(crate) fn cosine_sum(nu: &SphericalMeasure, q: &QBody, p: f64, theta: &[f64]) -> f64 {
    let n = nu.dim();
    let img = q.images(n, theta);
    let terms: Vec<f64> = match n {
        2 => cosine_terms::<2>(nu, &img, p),
        3 => cosine_terms::<3>(nu, &img, p),
        _ => nu
            .directions()
            .zip(nu.weights())
            .map(|(v, w)| w * pow_p(QBody::support_from_images(&img, n, v), p))
            .collect(),
    };
    pairwise_sum(&terms)
}

fn cosine_terms<const N: usize>(nu: &SphericalMeasure, img: &[f64], p: f64) -> Vec<f64> {
    let imgs: Vec<[f64; N]> = img.chunks_exact(N).map(|a| a.try_into().unwrap()).collect();
    let support = |v: &[f64]| {
        let mut best = 0.0f64;
        for a in &imgs {
            let mut s = 0.0;
            for k in 0..N {
                s += v[k] * a[k];
            }
            best = best.max(s);
        }
        best
    };
    let dirs = nu.directions();
    if p == 1.0 {
        dirs.zip(nu.weights())
            .map(|(v, w)| w * support(v))
            .collect()
    } else if p == 2.0 {
        dirs.zip(nu.weights())
            .map(|(v, w)| {
                let h = support(v);
                w * h * h
            })
            .collect()
    } else {
        dirs.zip(nu.weights())
            .map(|(v, w)| w * pow_p(support(v), p))
            .collect()
    }
}

fn check_shapes(nu: &SphericalMeasure, q: &QBody, p: f64, theta_len: usize) -> Result<()> {
    check_p(p)?;
    if theta_len != nu.dim() * q.dim() {
        return invalid("direction must have n·m entries");
    }
    Ok(())
}

/// (C^m_{p,Q} ν)(θ) = ∫ h_Q(vᵗθ)^p dν(v). A non-positive value means ν sits
/// in a closed hemisphere as seen from θ.
pub fn cosine_transform(
    nu: &SphericalMeasure,
    q: &QBody,
    p: f64,
    theta: &MatrixDirection,
) -> Result<f64> {
    check_shapes(nu, q, p, theta.as_slice().len())?;
    if theta.n() != nu.dim() || theta.m() != q.dim() {
        return invalid("direction shape differs from n×m");
    }
    let v = cosine_sum(nu, q, p, theta.as_slice());
    if !v.is_finite() {
        return Err(Error::NonFinite {
            context: "cosine_transform",
            index: 0,
        });
    }
    if !(v > 0.0) {
        return Err(Error::NotSpanning);
    }
    Ok(v)
}

/// Π^m_{p,Q} ν, sampled on the default S^{nm-1} grid with the cosine
/// transform kept as its exact support evaluator.
pub fn projection_body_of_measure(
    nu: &SphericalMeasure,
    q: &QBody,
    p: f64,
    settings: &Settings,
) -> Result<ConvexBody> {
    let (n, m) = (nu.dim(), q.dim());
    check_shapes(nu, q, p, n * m)?;
    if n == 1 {
        if nu.len() < 2 {
            return Err(Error::NotSpanning);
        }
    } else {
        nu.require_spanning(&*settings.sphere(n)?)?;
    }
    let grid = settings.sphere(n * m)?;
    let (nu, q) = (nu.clone(), q.clone());
    let h: SupportFn = Arc::new(move |theta| pow_p_inv(cosine_sum(&nu, &q, p, theta), p));
    Ok(ConvexBody::SupportSampled(SampledBody::from_fn(grid, h)?))
}

pub(crate) fn pow_p_inv(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x.max(0.0).sqrt()
    } else {
        x.max(0.0).powf(1.0 / p)
    }
}

/// Π^m_{p,Q} K for a polytope (exact L^p surface measure) or an ellipsoid
/// (surface measure on the default S^{n-1} grid).
pub fn projection_body(
    k: &ConvexBody,
    q: &QBody,
    p: f64,
    settings: &Settings,
) -> Result<ConvexBody> {
    check_p(p)?;
    let nu = match k {
        ConvexBody::Polytope(poly) => lp_surface_measure(poly, p)?,
        ConvexBody::Ellipsoid(e) => {
            let grid = settings.sphere(e.dim())?;
            let sigma = e.surface_measure(&grid)?;
            let ws: Vec<f64> = sigma
                .directions()
                .zip(sigma.weights())
                .map(|(u, w)| w * e.support(u).powf(1.0 - p))
                .collect();
            sigma.reweighted(ws)?
        }
        ConvexBody::SupportSampled(_) => {
            return Err(Error::Unsupported(
                "projection body of a sampled body".into(),
            ))
        }
    };
    projection_body_of_measure(&nu, q, p, settings)
}

/// vol_{nm}(body°) = (1/nm) ∫ h^{-nm}, in whitened polar coordinates.
pub fn polar_projection_volume(body: &ConvexBody, settings: &Settings) -> Result<f64> {
    let d = body.dim();
    if let ConvexBody::SupportSampled(s) = body {
        if let Some(i) = s.values().iter().position(|h| !(*h >= 1e-10)) {
            return Err(Error::Degenerate(format!(
                "support value below 1e-10 at node {i}"
            )));
        }
    }
    if d == 1 {
        let (a, b) = (body.support(&[1.0]), body.support(&[-1.0]));
        if !(a >= 1e-10 && b >= 1e-10) {
            return Err(Error::Degenerate("support value below 1e-10".into()));
        }
        return Ok(1.0 / a + 1.0 / b);
    }
    let grid = settings.sphere(d)?;
    let frame = AdaptedFrame::new(&grid, |x| body.support(x), settings.whiten_passes)?;
    Ok(frame.volume())
}

/// Star body given by a positive radial function on its sphere.
#[derive(Clone)]
pub struct StarBody {
    dim: usize,
    radial: SupportFn,
}

impl std::fmt::Debug for StarBody {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StarBody").field("dim", &self.dim).finish()
    }
}

impl StarBody {
    /// `radial` is read at unit vectors only.
    pub fn new(dim: usize, radial: SupportFn) -> Self {
        StarBody { dim, radial }
    }

    /// Star body of a convex body with the origin inside.
    pub fn from_convex(k: &ConvexBody) -> Result<Self> {
        let dim = k.dim();
        k.minkowski_functional(&vec![1.0; dim])?;
        let k = k.clone();
        let radial: SupportFn =
            Arc::new(move |u| 1.0 / k.minkowski_functional(u).unwrap_or(f64::NAN));
        Ok(StarBody { dim, radial })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radial(&self, u: &[f64]) -> f64 {
        (self.radial)(u)
    }

    /// ‖x‖_L = |x| / ρ(x/|x|).
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        if r == 0.0 {
            return 0.0;
        }
        let u: Vec<f64> = x.iter().map(|c| c / r).collect();
        r / self.radial(&u)
    }

    pub fn volume(&self, settings: &Settings) -> Result<f64> {
        let grid = settings.sphere(self.dim)?;
        Ok(AdaptedFrame::new(&grid, |x| self.gauge(x), settings.whiten_passes)?.volume())
    }
}

impl StarBody {
    /// The polar of a body known through its support function: ρ = 1/h.
    pub fn polar_of(k: &ConvexBody) -> Self {
        let dim = k.dim();
        let k = k.clone();
        StarBody {
            dim,
            radial: Arc::new(move |u| 1.0 / k.support(u)),
        }
    }
}

/// Γ^m_{p,Q} L with h(v)^p = (1/vol L) ∫_L h_Q(vᵗx)^p dx, sampled on the
/// default S^{n-1} grid. The x-integral runs over whitened polar
/// coordinates of L.
pub fn centroid_body(l: &StarBody, q: &QBody, p: f64, settings: &Settings) -> Result<ConvexBody> {
    check_p(p)?;
    let (d, m) = (l.dim(), q.dim());
    if d % m != 0 || d == m && d < 2 {
        return invalid("body dimension must be n·m");
    }
    let n = d / m;
    if n < 2 {
        return Err(Error::Unsupported("centroid bodies need n ≥ 2".into()));
    }
    let frame = AdaptedFrame::new(
        &*settings.sphere(d)?,
        |x| l.gauge(x),
        settings.whiten_passes,
    )?;
    let vol = frame.volume();
    if !(vol > 1e-12) {
        return Err(Error::Degenerate(format!("volume {vol:e} below 1e-12")));
    }
    let e = d as f64 + p;
    let coef: Vec<f64> = (0..frame.len())
        .map(|i| frame.weight(i) * frame.radius(i).powf(e) / (e * vol))
        .collect();
    let images: Vec<f64> = (0..frame.len())
        .flat_map(|i| q.images(n, frame.point(i)))
        .collect();
    let stride = q.vertices().len() * n;
    let h: SupportFn = Arc::new(move |v| {
        let terms: Vec<f64> = coef
            .iter()
            .zip(images.chunks_exact(stride))
            .map(|(c, img)| c * pow_p(QBody::support_from_images(img, n, v), p))
            .collect();
        pow_p_inv(pairwise_sum(&terms), p)
    });
    Ok(ConvexBody::SupportSampled(SampledBody::from_fn(
        settings.sphere(n)?,
        h,
    )?))
}

/// nω_n σ-uniform measure on S^{n-1}, exact for n = 1.
fn sphere_measure(n: usize, settings: &Settings) -> Result<SphericalMeasure> {
    if n == 1 {
        return SphericalMeasure::new(1, &[vec![1.0], vec![-1.0]], &[1.0, 1.0]);
    }
    Ok(SphericalMeasure::from_grid(&*settings.sphere(n)?))
}

fn check_nm(n: usize, m: usize, q: &QBody) -> Result<()> {
    if n == 0 || m != q.dim() {
        return invalid("Q must live in R^m");
    }
    Ok(())
}

/// d_{n,p}(Q) = (nω_n)^{1/p} (nm·vol_{nm}(Π°_{p,Q} B))^{1/nm}, memoized per
/// argument set and quadrature setting.
pub fn dnp_constant(n: usize, m: usize, p: f64, q: &QBody, settings: &Settings) -> Result<f64> {
    check_p(p)?;
    check_nm(n, m, q)?;
    static CACHE: OnceLock<Mutex<HashMap<String, f64>>> = OnceLock::new();
    let key = format!(
        "{n}|{m}|{p:e}|{:?}|{:?}|{:?}|{}",
        q.vertices(),
        settings.sphere_resolution,
        settings.scheme,
        settings.whiten_passes
    );
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let body = projection_body_of_measure(&sphere_measure(n, settings)?, q, p, settings)?;
    let vol = polar_projection_volume(&body, settings)?;
    let nm = (n * m) as f64;
    let d = (n as f64 * ball_volume(n as f64)).powf(1.0 / p) * (nm * vol).powf(1.0 / nm);
    cache.lock().unwrap().insert(key, d);
    Ok(d)
}

/// Haar-distributed element of O(n): Q from the QR factorization of a
/// Gaussian matrix with the signs of diag(R) folded into its columns.
pub fn haar_orthogonal<R: rand::Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (mut qm, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            qm.column_mut(j).neg_mut();
        }
    }
    qm
}

/// d_{n,p}(Q)^{nm} = ∫_{S^{nm-1}} (∫_{O(n)} h_Q((Tᵗe₁)ᵗθ)^p dT)^{-nm/p} dθ
/// with the O(n) integral replaced by a mean over `samples` Haar matrices
/// drawn from `seed`.
pub fn dnp_constant_haar(
    n: usize,
    m: usize,
    p: f64,
    q: &QBody,
    samples: usize,
    seed: u64,
    settings: &Settings,
) -> Result<f64> {
    check_p(p)?;
    check_nm(n, m, q)?;
    if samples == 0 {
        return invalid("at least one Haar sample required");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<f64> = (0..samples)
        .flat_map(|_| {
            let t = haar_orthogonal(n, &mut rng);
            (0..n).map(move |b| t[(0, b)])
        })
        .collect();
    let nm = n * m;
    let avg = |theta: &[f64]| {
        let img = q.images(n, theta);
        let terms: Vec<f64> = rows
            .chunks_exact(n)
            .map(|u| pow_p(QBody::support_from_images(&img, n, u), p))
            .collect();
        pairwise_sum(&terms) / samples as f64
    };
    let power = if nm == 1 {
        avg(&[1.0]).powf(-1.0 / p) + avg(&[-1.0]).powf(-1.0 / p)
    } else {
        integrate_sphere(&*settings.sphere(nm)?, |theta| {
            avg(theta).powf(-(nm as f64) / p)
        })?
    };
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::NotSpanning);
    }
    Ok(power.powf(1.0 / nm as f64))
}

/// d_{n,∞}(Q) = (∫_{S^{nm-1}} (max_j |θq_j|)^{-nm} dθ)^{1/nm}, the p → ∞
/// limit of d_{n,p}(Q).
pub fn dn_infinity(n: usize, m: usize, q: &QBody, settings: &Settings) -> Result<f64> {
    check_nm(n, m, q)?;
    let nm = n * m;
    let g = |theta: &[f64]| q.max_row_support(n, theta).powi(-(nm as i32));
    let power = if nm == 1 {
        g(&[1.0]) + g(&[-1.0])
    } else {
        integrate_sphere(&*settings.sphere(nm)?, g)?
    };
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::Degenerate(
            "Q meets a direction only at the origin".into(),
        ));
    }
    Ok(power.powf(1.0 / nm as f64))
}

/// T̄(x₁,…,x_m) = (Tx₁,…,Tx_m) as an nm×nm matrix.
pub fn lift_map(t: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let n = t.nrows();
    let mut out = DMatrix::zeros(n * m, n * m);
    for k in 0..m {
        out.view_mut((k * n, k * n), (n, n)).copy_from(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Ellipsoid;
    use approx::assert_relative_eq;
    use rand::Rng;
    use std::f64::consts::PI;

    fn s() -> Settings {
        Settings::default()
    }

    fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    fn apply(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
        (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
            .collect()
    }

    #[test]
    fn cosine_transform_examples() {
        let nu = SphericalMeasure::from_grid(&s().sphere(2).unwrap());
        assert_relative_eq!(nu.total_mass(), 2.0 * PI, max_relative = 1e-12);
        let seg = QBody::preset("segment", 1).unwrap();
        let e1 = MatrixDirection::first_slot(2, 1);
        assert_relative_eq!(
            cosine_transform(&nu, &seg, 1.0, &e1).unwrap(),
            2.0,
            max_relative = 1e-4
        );

        let pm = SphericalMeasure::new(2, &[vec![1.0, 0.0], vec![-1.0, 0.0]], &[1.0, 1.0]).unwrap();
        let plus = QBody::preset("segment+", 1).unwrap();
        assert_relative_eq!(
            cosine_transform(&pm, &plus, 1.0, &e1).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        // the same two atoms are invisible from e₂
        let e2 = MatrixDirection::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            cosine_transform(&pm, &plus, 1.0, &e2),
            Err(Error::NotSpanning)
        ));
        assert!(projection_body_of_measure(&pm, &plus, 1.0, &s()).is_err());

        assert!(QBody::from_vertices("point", 1, &[vec![0.0], vec![0.0]]).is_err());
        assert!(QBody::from_vertices("off", 1, &[vec![0.5], vec![1.0]]).is_err());
        assert!(MatrixDirection::new(2, 1, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn row_products_and_presets() {
        let th = MatrixDirection::normalized(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let r = th.row_product(&[1.0, -1.0]);
        let c = 30f64.sqrt();
        assert_relative_eq!(r[0], -1.0 / c, max_relative = 1e-14);
        assert_relative_eq!(r[1], -1.0 / c, max_relative = 1e-14);
        let q = QBody::preset("simplex2", 2).unwrap();
        assert_eq!(q.vertices().len(), 3);
        assert_relative_eq!(q.support(&[-1.0, -1.0]), 0.0);
        assert_eq!(QBody::preset("square", 3).unwrap().vertices().len(), 8);
        assert!(QBody::preset("disk", 2).is_err());
        // kernel agrees with h_Q(vᵗθ) evaluated directly
        let v = [0.3, -0.7];
        let img = q.images(2, th.as_slice());
        assert_relative_eq!(
            QBody::support_from_images(&img, 2, &v),
            q.support(&th.row_product(&v)),
            max_relative = 1e-14
        );
    }

    #[test]
    fn projection_bodies_of_ball_and_square() {
        let seg = QBody::preset("segment", 1).unwrap();
        let ball = ConvexBody::Ellipsoid(Ellipsoid::ball(2, 1.0).unwrap());
        let pb = projection_body(&ball, &seg, 1.0, &s()).unwrap();
        for t in [0.0f64, 0.4, 1.3, 2.9] {
            assert_relative_eq!(pb.support(&[t.cos(), t.sin()]), 2.0, max_relative = 1e-4);
        }
        let unit = Polytope::from_points(
            2,
            &[
                vec![-0.5, -0.5],
                vec![0.5, -0.5],
                vec![0.5, 0.5],
                vec![-0.5, 0.5],
            ],
        )
        .unwrap();
        let pu = projection_body_of_measure(
            &crate::bodies::surface_measure(&unit).unwrap(),
            &seg,
            1.0,
            &s(),
        )
        .unwrap();
        assert_relative_eq!(pu.support(&[1.0, 0.0]), 1.0, max_relative = 1e-14);
        let big = ConvexBody::Polytope(unit.scaled(2.0).unwrap());
        let pbig = projection_body(&big, &seg, 1.0, &s()).unwrap();
        assert_relative_eq!(pbig.support(&[1.0, 0.0]), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn homogeneity_in_the_measure_is_exact() {
        let nu = SphericalMeasure::new(
            2,
            &[vec![1.0, 0.2], vec![-0.4, 1.0], vec![-0.5, -1.0]],
            &[1.0, 2.0, 0.7],
        )
        .unwrap();
        let q = QBody::preset("square", 2).unwrap();
        let (c, p) = (3.7, 3.0);
        let a = projection_body_of_measure(&nu, &q, p, &s()).unwrap();
        let scaled = nu
            .reweighted(nu.weights().iter().map(|w| c * w).collect())
            .unwrap();
        let b = projection_body_of_measure(&scaled, &q, p, &s()).unwrap();
        let (ConvexBody::SupportSampled(a), ConvexBody::SupportSampled(b)) = (a, b) else {
            panic!()
        };
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_relative_eq!(*y, c.powf(1.0 / p) * x, max_relative = 1e-13);
        }
    }

    #[test]
    fn contravariance_uses_the_inverse_lift() {
        let k = ConvexBody::Polytope(
            Polytope::from_points(
                2,
                &[
                    vec![1.0, 0.1],
                    vec![0.2, 0.9],
                    vec![-0.8, 0.4],
                    vec![-0.3, -0.7],
                    vec![0.6, -0.6],
                ],
            )
            .unwrap(),
        );
        let phi = mat(&[&[1.3, 0.4], &[-0.2, 0.7]]);
        let det = phi.determinant();
        let phi = phi / det.sqrt();
        let phi_inv = phi.clone().try_inverse().unwrap();
        let q = QBody::preset("square", 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [1.0, 2.5] {
            let pk = projection_body(&k, &q, p, &s()).unwrap();
            let pphik = projection_body(&k.linear_image(&phi).unwrap(), &q, p, &s()).unwrap();
            let lift = lift_map(&phi_inv, 2);
            let lift_wrong = lift_map(&phi.transpose(), 2);
            let mut worst_wrong: f64 = 0.0;
            for _ in 0..20 {
                let th: Vec<f64> = (0..4).map(|_| rng.random::<f64>() - 0.5).collect();
                let lhs = pphik.support(&th);
                assert_relative_eq!(lhs, pk.support(&apply(&lift, &th)), max_relative = 1e-10);
                worst_wrong =
                    worst_wrong.max((lhs / pk.support(&apply(&lift_wrong, &th)) - 1.0).abs());
            }
            assert!(worst_wrong > 0.01);
        }
    }

    #[test]
    fn polar_projection_volume_of_the_disk() {
        let seg = QBody::preset("segment", 1).unwrap();
        let nu = SphericalMeasure::from_grid(&s().sphere(2).unwrap());
        let pb = projection_body_of_measure(&nu, &seg, 1.0, &s()).unwrap();
        let v = polar_projection_volume(&pb, &s()).unwrap();
        assert_relative_eq!(v, PI / 4.0, max_relative = 1e-4);
        // Petty product for the disk
        assert_relative_eq!(v * PI, PI * PI / 4.0, max_relative = 1e-4);
        // scaling the body by c scales the polar volume by c^{-nm}
        let ConvexBody::SupportSampled(sb) = &pb else {
            panic!()
        };
        let c = 1.7;
        let scaled = SampledBody::from_values(
            sb.grid().clone(),
            sb.values().iter().map(|h| c * h).collect(),
        )
        .unwrap();
        let vs = polar_projection_volume(&ConvexBody::SupportSampled(scaled), &s()).unwrap();
        assert_relative_eq!(vs, v / (c * c), max_relative = 1e-3);
    }

    #[test]
    fn dnp_reference_value_and_dual_route() {
        let seg = QBody::preset("segment", 1).unwrap();
        let d = dnp_constant(2, 1, 1.0, &seg, &s()).unwrap();
        assert_relative_eq!(d, 2.0 * PI * (PI / 2.0).sqrt(), max_relative = 1e-4);
        assert_relative_eq!(d, 7.874, max_relative = 2e-4);
        let cases = [
            (1, 1.0, "segment+"),
            (2, 2.0, "square"),
            (1, 1.0, "segment"),
            (2, 1.0, "simplex2"),
        ];
        for (m, p, name) in cases {
            let q = QBody::preset(name, m).unwrap();
            let a = dnp_constant(2, m, p, &q, &s()).unwrap();
            let b = dnp_constant_haar(2, m, p, &q, 20_000, 42, &s()).unwrap();
            assert!((a / b - 1.0).abs() < 0.01, "{name} m={m} p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn dn_infinity_is_the_large_p_limit() {
        let seg = QBody::preset("segment", 1).unwrap();
        let dinf = dn_infinity(2, 1, &seg, &s()).unwrap();
        assert_relative_eq!(dinf, (8.0 * PI).sqrt(), max_relative = 1e-10);
        let d400 = dnp_constant(2, 1, 400.0, &seg, &s()).unwrap();
        assert!((d400 / dinf - 1.0).abs() < 0.03, "{d400} vs {dinf}");
    }

    #[test]
    fn centroid_body_of_the_disk() {
        let seg = QBody::preset("segment", 1).unwrap();
        let disk = StarBody::from_convex(&ConvexBody::Ellipsoid(Ellipsoid::ball(2, 1.0).unwrap()))
            .unwrap();
        let g = centroid_body(&disk, &seg, 1.0, &s()).unwrap();
        for t in [0.0f64, 0.7, 2.0] {
            assert_relative_eq!(
                g.support(&[t.cos(), t.sin()]),
                2.0 / (3.0 * PI),
                max_relative = 1e-4
            );
        }
        let big = StarBody::from_convex(&ConvexBody::Ellipsoid(Ellipsoid::ball(2, 2.5).unwrap()))
            .unwrap();
        let g2 = centroid_body(&big, &seg, 1.0, &s()).unwrap();
        assert_relative_eq!(
            g2.support(&[0.6, 0.8]),
            2.5 * 2.0 / (3.0 * PI),
            max_relative = 1e-4
        );
    }

    #[test]
    fn centroid_of_polar_projection_of_ellipse() {
        let e = Ellipsoid::new(mat(&[&[2.0, 0.6], &[0.6, 0.8]])).unwrap();
        let n = 2.0;
        let w = ball_volume(n);
        for (m, p, name) in [
            (1, 1.0, "segment"),
            (2, 2.0, "square"),
            (1, 3.0, "segment+"),
        ] {
            let q = QBody::preset(name, m).unwrap();
            let pe = projection_body(&ConvexBody::Ellipsoid(e.clone()), &q, p, &s()).unwrap();
            let g = centroid_body(&StarBody::polar_of(&pe), &q, p, &s()).unwrap();
            let mf = m as f64;
            let c = w.powf(1.0 / p)
                * e.volume().powf(-1.0 / p)
                * (mf / (w * (n * mf + p))).powf(1.0 / p);
            for t in [0.0f64, 0.9, 2.2, 4.0] {
                let u = [t.cos(), t.sin()];
                let got = g.support(&u);
                let want = c * e.support(&u);
                assert!(
                    (got / want - 1.0).abs() < 0.01,
                    "{name} p={p}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn lift_map_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            lift_map(&DMatrix::identity(3, 3), 2),
            DMatrix::identity(6, 6)
        );
        let t = DMatrix::from_fn(3, 3, |_, _| rng.random::<f64>() - 0.5);
        let m = 2;
        let lt = lift_map(&t, m);
        assert_relative_eq!(
            lt.determinant(),
            t.determinant().powi(m as i32),
            max_relative = 1e-12
        );
        for _ in 0..100 {
            let th: Vec<f64> = (0..6).map(|_| rng.random::<f64>() - 0.5).collect();
            let v: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();
            let lhs = row_product(3, &apply(&lt, &th), &v);
            let rhs = row_product(3, &th, &apply(&t.transpose(), &v));
            for (a, b) in lhs.iter().zip(&rhs) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let o = haar_orthogonal(3, &mut rng);
        let lo = lift_map(&o, 2);
        for _ in 0..100 {
            let th: Vec<f64> = (0..6).map(|_| rng.random::<f64>() - 0.5).collect();
            assert_relative_eq!(norm(&apply(&lo, &th)), norm(&th), max_relative = 1e-12);
        }
    }

    #[test]
    fn haar_first_rows_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 3;
        let k = 20_000;
        let mut second = DMatrix::<f64>::zeros(n, n);
        for _ in 0..k {
            let t = haar_orthogonal(n, &mut rng);
            assert!((&t * t.transpose() - DMatrix::identity(n, n)).norm() < 1e-12);
            let u: Vec<f64> = (0..n).map(|b| t[(0, b)]).collect();
            for a in 0..n {
                for b in 0..n {
                    second[(a, b)] += u[a] * u[b] / k as f64;
                }
            }
        }
        // E[uuᵗ] = I/n for the uniform distribution
        assert!((second - DMatrix::identity(n, n) / n as f64).abs().max() < 0.01);
    }
}
