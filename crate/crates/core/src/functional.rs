//! Functions sampled on a box grid: gradients, norms, distribution
//! functions, rearrangements, LYZ projection bodies and the affine energies
//! E_p(Q,f) and E_∞(Q,f).

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::bodies::{ConvexBody, DirectionBins, SphericalMeasure};
use crate::config::Settings;
use crate::error::{invalid, Error, Result};

use crate::projection::{
    centroid_body, check_p, cosine_sum, dn_infinity, dnp_constant, lift_map, polar_projection_volume,
    pow_p, pow_p_inv, projection_body_of_measure, QBody, StarBody,
};
use crate::quadrature::{box_grid, integrate_sphere, pairwise_sum, AdaptedFrame, BoxGrid};
use crate::special::ball_volume;

/// Gradients below this length count as zero.
const GRAD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: BoxGrid,
    values: Vec<f64>,
}

/// One vector per grid cell, flattened.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    dim: usize,
    data: Vec<f64>,
}

impl VectorField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn at(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn norm_at(&self, k: usize) -> f64 {
        self.at(k).iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl GridFunction {
    pub fn new(grid: BoxGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "grid function",
                index: i,
            });
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples `f` at the cell centres.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: BoxGrid, f: F) -> Result<Self> {
        let n = grid.dim();
        let values = (0..grid.len()).map(|k| f(&grid.center(k)[..n])).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// True when the two outermost cell layers vanish.
    pub fn is_compact(&self) -> bool {
        let c = self.grid.cells_per_axis();
        (0..self.grid.len()).all(|k| {
            let idx = self.grid.unravel(k);
            let inner = idx[..self.dim()].iter().all(|&i| i >= 2 && i + 2 < c);
            inner || self.values[k] == 0.0
        })
    }

    pub fn require_compact(&self) -> Result<()> {
        if self.is_compact() {
            Ok(())
        } else {
            invalid("support reaches the two outer cell layers of the box")
        }
    }

    /// Central differences inside the box, one-sided on its faces.
    pub fn gradient(&self) -> VectorField {
        let n = self.dim();
        let c = self.grid.cells_per_axis();
        let h = self.grid.spacing();
        let mut data = vec![0.0; self.values.len() * n];
        for k in 0..self.values.len() {
            let idx = self.grid.unravel(k);
            for a in 0..n {
                let at = |i: usize| {
                    let mut j = idx;
                    j[a] = i;
                    self.values[self.grid.ravel(j)]
                };
                let i = idx[a];
                data[k * n + a] = if i == 0 {
                    (at(1) - at(0)) / h
                } else if i + 1 == c {
                    (at(i) - at(i - 1)) / h
                } else {
                    (at(i + 1) - at(i - 1)) / (2.0 * h)
                };
            }
        }
        VectorField { dim: n, data }
    }

    /// (Σ|f|^p·cellvol)^{1/p}; p = ∞ gives max|f|.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let terms: Vec<f64> = self.values.iter().map(|v| v.abs().powf(p)).collect();
        (pairwise_sum(&terms) * self.grid.cell_volume()).powf(1.0 / p)
    }

    /// ‖∇f‖_p.
    pub fn dirichlet_norm(&self, p: f64) -> f64 {
        let g = self.gradient();
        let terms: Vec<f64> = (0..g.len()).map(|k| g.norm_at(k).powf(p)).collect();
        (pairwise_sum(&terms) * self.grid.cell_volume()).powf(1.0 / p)
    }

    /// μ_f(t) = vol{|f| > t}.
    pub fn distribution_function(&self, t: f64) -> f64 {
        self.values.iter().filter(|v| v.abs() > t).count() as f64 * self.grid.cell_volume()
    }

    /// vol(supp f) by cell count.
    pub fn support_volume(&self) -> f64 {
        self.distribution_function(0.0)
    }

    /// |f| sorted in decreasing order: f*(s) on the cell with s ∈
    /// [k·cellvol, (k+1)·cellvol).
    pub fn decreasing_rearrangement(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.iter().map(|x| x.abs()).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    /// Places the decreasing rearrangement on cells ordered by `key`, ties
    /// broken by cell index, so that μ is preserved exactly.
    fn assign_by<K: Fn(&[f64]) -> f64>(&self, key: K) -> Self {
        let n = self.dim();
        let keys: Vec<f64> = (0..self.grid.len())
            .map(|k| key(&self.grid.center(k)[..n]))
            .collect();
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap().then(a.cmp(&b)));
        let sorted = self.decreasing_rearrangement();
        let mut values = vec![0.0; keys.len()];
        for (rank, &k) in order.iter().enumerate() {
            values[k] = sorted[rank];
        }
        GridFunction {
            grid: self.grid.clone(),
            values,
        }
    }

    /// f⋆(x) = f*(ω_n|x|^n).
    pub fn schwarz_rearrangement(&self) -> Self {
        self.assign_by(|x| x.iter().map(|c| c * c).sum::<f64>())
    }

    /// f^K(x) = f*(vol(K)‖x‖_K^n); K must contain the origin in its interior.
    pub fn convex_rearrangement(&self, k: &ConvexBody) -> Result<Self> {
        if k.dim() != self.dim() {
            return invalid("body and function live in different dimensions");
        }
        k.minkowski_functional(&vec![1.0; self.dim()])?;
        Ok(self.assign_by(|x| k.minkowski_functional(x).unwrap_or(f64::INFINITY)))
    }

    /// Σ h_K(∇f)^p·cellvol.
    pub fn support_integral(&self, k: &ConvexBody, p: f64) -> Result<f64> {
        if k.dim() != self.dim() {
            return invalid("body and function live in different dimensions");
        }
        let g = self.gradient();
        let terms: Vec<f64> = g.iter().map(|v| pow_p(k.support(v).max(0.0), p)).collect();
        Ok(pairwise_sum(&terms) * self.grid.cell_volume())
    }

    /// First line: cell-centre coordinates. Then one line per fixed leading
    /// index, with the last axis varying along the line.
    pub fn to_csv(&self) -> String {
        let c = self.grid.cells_per_axis();
        let mut out = String::new();
        let coords: Vec<String> = (0..c).map(|i| self.grid.coord(i).to_string()).collect();
        out.push_str(&coords.join(","));
        out.push('\n');
        for row in self.values.chunks(c) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let parse_row = |l: &str| -> Result<Vec<f64>> {
            l.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number '{x}'")))
                })
                .collect()
        };
        let coords = parse_row(
            lines
                .next()
                .ok_or_else(|| Error::Parse("empty grid CSV".into()))?,
        )?;
        let c = coords.len();
        if c < 2 {
            return Err(Error::Parse("need at least two coordinates".into()));
        }
        let halfwidth = c as f64 * (coords[c - 1] - coords[0]) / (2.0 * (c - 1) as f64);
        let mut values = Vec::new();
        let mut rows = 0usize;
        for l in lines {
            let r = parse_row(l)?;
            if r.len() != c {
                return Err(Error::Parse(format!(
                    "row {} has {} values, expected {c}",
                    rows + 1,
                    r.len()
                )));
            }
            values.extend(r);
            rows += 1;
        }
        let n = match rows {
            1 => 1,
            r if r == c => 2,
            r if r == c * c => 3,
            r => {
                return Err(Error::Parse(format!(
                    "{r} rows do not form a cube of side {c}"
                )))
            }
        };
        let grid = box_grid(n, halfwidth, c)?;
        let expect_first = grid.coord(0);
        if (expect_first - coords[0]).abs() > 1e-9 * halfwidth {
            return Err(Error::Parse(
                "coordinates are not a centred cell grid".into(),
            ));
        }
        Self::new(grid, values)
    }
}

fn require_energy_dims(f: &GridFunction, q: &QBody) -> Result<(usize, usize)> {
    let (n, m) = (f.dim(), q.dim());
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!("energies in dimension {n}")));
    }
    Ok((n, m))
}

/// Σ_cells cellvol·|∇f|^p δ_{∇f/|∇f|}; zero gradients are dropped.
pub fn gradient_measure(f: &GridFunction, p: f64) -> Result<SphericalMeasure> {
    let n = f.dim();
    let g = f.gradient();
    let cv = f.grid().cell_volume();
    let mut dirs = Vec::new();
    let mut ws = Vec::new();
    for k in 0..g.len() {
        let r = g.norm_at(k);
        if r >= GRAD_FLOOR {
            dirs.extend_from_slice(g.at(k));
            ws.push(cv * pow_p(r, p));
        }
    }
    if ws.is_empty() {
        return invalid("function is constant on the grid");
    }
    SphericalMeasure::from_atoms(n, dirs, ws)
}

/// LYZ body Π_{p,Q} f: h(θ) = (Σ h_Q((∇f)ᵗθ)^p·cellvol)^{1/p} on the
/// default S^{nm-1} grid.
pub fn lyz_body(f: &GridFunction, q: &QBody, p: f64, settings: &Settings) -> Result<ConvexBody> {
    check_p(p)?;
    require_energy_dims(f, q)?;
    let nu = gradient_measure(f, p)?;
    let body = projection_body_of_measure(&nu, q, p, settings).map_err(|e| match e {
        Error::NotSpanning => Error::Degenerate(
            "LYZ support vanishes in some direction, contradicting the positivity lemma for non-constant f".into(),
        ),
        e => e,
    })?;
    if let ConvexBody::SupportSampled(s) = &body {
        if let Some(i) = s.values().iter().position(|h| !(*h >= 1e-10)) {
            return Err(Error::Degenerate(format!(
                "LYZ support below 1e-10 at node {i}, contradicting the positivity lemma for non-constant f"
            )));
        }
    }
    Ok(body)
}

/// Polar-coordinate frame for Π°_{p,Q} f, pre-whitened by lifting
/// M^{-1/2} with M = Σ wᵢ vᵢvᵢᵗ the second moment of the gradient measure.
fn polar_lyz_frame(
    nu: &SphericalMeasure,
    q: &QBody,
    p: f64,
    passes: usize,
    settings: &Settings,
) -> Result<AdaptedFrame> {
    let (n, m) = (nu.dim(), q.dim());
    let mut mom = DMatrix::<f64>::zeros(n, n);
    for (v, w) in nu.directions().zip(nu.weights()) {
        for a in 0..n {
            for b in 0..n {
                mom[(a, b)] += w * v[a] * v[b];
            }
        }
    }
    let eig = SymmetricEigen::new(mom);
    let initial = if eig.eigenvalues.min() > 0.0 {
        let isqrt = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
        let a = &eig.eigenvectors * DMatrix::from_diagonal(&isqrt) * eig.eigenvectors.transpose();
        lift_map(&a, m)
    } else {
        DMatrix::identity(n * m, n * m)
    };
    let grid = settings.sphere(n * m)?;
    let frame = AdaptedFrame::with_initial_map(
        &grid,
        |theta| pow_p_inv(cosine_sum(nu, q, p, theta), p),
        passes,
        initial,
    )?;
    for i in 0..frame.len() {
        let r = frame.point(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(1.0 / (frame.radius(i) * r) >= 1e-10) {
            return Err(Error::Degenerate(format!(
                "LYZ support below 1e-10 at node {i}, contradicting the positivity lemma for non-constant f"
            )));
        }
    }
    Ok(frame)
}

/// E_p(Q,f) = d_{n,p}(Q)(nm·vol_{nm}(Π°_{p,Q} f))^{-1/nm}. The gradient
/// measure is first compressed into `settings.energy_bins` direction bins.
pub fn energy(f: &GridFunction, q: &QBody, p: f64, settings: &Settings) -> Result<f64> {
    let (n, m) = require_energy_dims(f, q)?;
    check_p(p)?;
    let mut nu = gradient_measure(f, p)?;
    let bins = settings.energy_bins[n - 2];
    if bins > 0 {
        nu = nu.binned(&DirectionBins::new(n, bins)?)?;
    }
    nu.require_spanning(&*settings.sphere(n)?).map_err(|_| {
        Error::Degenerate("LYZ support vanishes in some direction, contradicting the positivity lemma".into())
    })?;
    let passes = settings.whiten_passes.saturating_sub(1);
    let vol = polar_lyz_frame(&nu, q, p, passes, settings)?.volume();
    let nm = (n * m) as f64;
    Ok(dnp_constant(n, m, p, q, settings)? * (nm * vol).powf(-1.0 / nm))
}

/// E_p(Q,f) from its defining θ-integral on the raw sphere rule, without
/// the polar-body route or whitening.
pub fn energy_direct(f: &GridFunction, q: &QBody, p: f64, settings: &Settings) -> Result<f64> {
    let (n, m) = require_energy_dims(f, q)?;
    check_p(p)?;
    let nu = gradient_measure(f, p)?;
    let nm = n * m;
    let grid = settings.sphere(nm)?;
    let s = integrate_sphere(&grid, |theta| {
        cosine_sum(&nu, q, p, theta).powf(-(nm as f64) / p)
    })?;
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::NotSpanning);
    }
    Ok(dnp_constant(n, m, p, q, settings)? * s.powf(-1.0 / nm as f64))
}

/// E_p(Q,f) = d_{n,p}(Q)(vol(Π°f)(nm+p)∫h_{ΓΠ°f}(∇f)^p)^{-1/nm}, through the
/// centroid body of the polar LYZ body.
pub fn energy_via_centroid(
    f: &GridFunction,
    q: &QBody,
    p: f64,
    settings: &Settings,
) -> Result<f64> {
    let (n, m) = require_energy_dims(f, q)?;
    let body = lyz_body(f, q, p, settings)?;
    let vol = polar_projection_volume(&body, settings)?;
    let gamma = centroid_body(&StarBody::polar_of(&body), q, p, settings)?;
    let integral = f.support_integral(&gamma, p)?;
    let nm = (n * m) as f64;
    Ok(dnp_constant(n, m, p, q, settings)? * (vol * (nm + p) * integral).powf(-1.0 / nm))
}

/// Right side of the centroid-body lower bound
/// (ω_n/vol(ΓΠ°f))^{1/n}(∫h_{ΓΠ°f}(∇f)^p)^{1/p}.
pub fn centroid_lower_bound(
    f: &GridFunction,
    q: &QBody,
    p: f64,
    settings: &Settings,
) -> Result<f64> {
    let (n, _) = require_energy_dims(f, q)?;
    let body = lyz_body(f, q, p, settings)?;
    let gamma = centroid_body(&StarBody::polar_of(&body), q, p, settings)?;
    let vol = gamma.volume(settings)?;
    let integral = f.support_integral(&gamma, p)?;
    Ok((ball_volume(n as f64) / vol).powf(1.0 / n as f64) * integral.powf(1.0 / p))
}

/// E_∞(Q,f) = d_{n,∞}(Q)(∫ ‖h_Q((∇f)ᵗθ)‖_∞^{-nm} dθ)^{-1/nm}.
pub fn energy_infty(f: &GridFunction, q: &QBody, settings: &Settings) -> Result<f64> {
    let (n, m) = require_energy_dims(f, q)?;
    let nu = gradient_measure(f, 1.0)?;
    let nm = n * m;
    let grid = settings.sphere(nm)?;
    // θ ↦ max over cells of h_Q((∇f)ᵗθ) is the support function of a convex
    // body, so its polar volume gives the θ-integral.
    let gauge = |theta: &[f64]| {
        let img = q.images(n, theta);
        nu.directions()
            .zip(nu.weights())
            .map(|(v, w)| w * QBody::support_from_images(&img, n, v))
            .fold(0.0, f64::max)
            / f.grid().cell_volume()
    };
    let frame = AdaptedFrame::new(&grid, gauge, settings.whiten_passes)?;
    let vol = frame.volume();
    Ok(dn_infinity(n, m, q, settings)? * (nm as f64 * vol).powf(-1.0 / nm as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{Ellipsoid, Polytope};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    fn s() -> Settings {
        Settings::default()
    }

    fn cone(r0: f64) -> GridFunction {
        GridFunction::from_fn(s().box_grid(2).unwrap(), |x| {
            (1.0 - (x[0] * x[0] + x[1] * x[1]).sqrt() / r0).max(0.0)
        })
        .unwrap()
    }

    fn sheared_cone(r0: f64) -> GridFunction {
        let a = [[1.4, 0.5], [0.1, 0.75]];
        let det: f64 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let c: f64 = det.sqrt();
        GridFunction::from_fn(s().box_grid(2).unwrap(), |x| {
            let y = [
                (a[0][0] * x[0] + a[0][1] * x[1]) / c,
                (a[1][0] * x[0] + a[1][1] * x[1]) / c,
            ];
            (1.0 - (y[0] * y[0] + y[1] * y[1]).sqrt() / r0).max(0.0)
        })
        .unwrap()
    }

    #[test]
    fn gradient_of_linear_and_radial_functions() {
        let g = GridFunction::from_fn(box_grid(2, 1.0, 33).unwrap(), |x| 0.3 * x[0] - 1.7 * x[1])
            .unwrap();
        let d = g.gradient();
        for k in 0..d.len() {
            assert!((d.at(k)[0] - 0.3).abs() < 1e-10 && (d.at(k)[1] + 1.7).abs() < 1e-10);
        }
        let f = cone(1.0);
        let d = f.gradient();
        let h = f.grid().spacing();
        let (mut good, mut total) = (0, 0);
        for k in 0..d.len() {
            let x = f.grid().center(k);
            let r = x[0].hypot(x[1]);
            if r > 2.0 * h && r < 1.0 - 2.0 * h {
                total += 1;
                if (d.norm_at(k) - 1.0).abs() < 0.02 {
                    good += 1;
                }
                let cos = -(d.at(k)[0] * x[0] + d.at(k)[1] * x[1]) / (d.norm_at(k) * r);
                assert!(cos >= 0.999);
            }
        }
        assert!(good as f64 >= 0.9 * total as f64);
    }

    #[test]
    fn norms_and_distribution() {
        let f = cone(1.0);
        assert_relative_eq!(f.dirichlet_norm(2.0), PI.sqrt(), max_relative = 0.01);
        assert_relative_eq!(f.dirichlet_norm(1.0), PI, max_relative = 0.01);
        assert_relative_eq!(
            f.scaled(2.0).dirichlet_norm(2.0),
            2.0 * f.dirichlet_norm(2.0),
            max_relative = 1e-12
        );
        assert_relative_eq!(f.distribution_function(0.5), PI / 4.0, max_relative = 0.02);
        assert_eq!(f.distribution_function(1.0), 0.0);
        assert!(f.is_compact());
    }

    #[test]
    fn rearrangements_preserve_distribution() {
        let f = sheared_cone(0.6);
        let star = f.schwarz_rearrangement();
        let cv = f.grid().cell_volume();
        for t in [0.0, 0.1, 0.37, 0.5, 0.9] {
            assert!((f.distribution_function(t) - star.distribution_function(t)).abs() <= cv);
        }
        let sq = |g: &GridFunction| g.values().iter().map(|v| v * v).sum::<f64>();
        assert_relative_eq!(sq(&f), sq(&star), max_relative = 1e-12);
        // a centred radial function is its own rearrangement
        let c = cone(0.8);
        let cs = c.schwarz_rearrangement();
        let worst = c
            .values()
            .iter()
            .zip(cs.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12);
        // indicator of a square goes to an indicator of a disk of equal area
        let ind = GridFunction::from_fn(s().box_grid(2).unwrap(), |x| {
            if x[0].abs() < 0.4 && x[1].abs() < 0.4 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let is = ind.schwarz_rearrangement();
        let rmax = (0..is.values().len())
            .filter(|&k| is.values()[k] > 0.5)
            .map(|k| {
                let x = is.grid().center(k);
                x[0].hypot(x[1])
            })
            .fold(0.0, f64::max);
        let r = (ind.support_volume() / PI).sqrt();
        assert!((rmax - r).abs() < 1.5 * is.grid().spacing());
        // convex rearrangement w.r.t. the disk equals the Schwarz one
        let ball = ConvexBody::Ellipsoid(Ellipsoid::ball(2, 1.0).unwrap());
        let fb = f.convex_rearrangement(&ball).unwrap();
        // equal up to the order of cells on a common circle
        let worst = fb
            .values()
            .iter()
            .zip(star.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.01, "{worst}");
        let sqr = ConvexBody::Polytope(
            Polytope::from_points(
                2,
                &[
                    vec![-1.0, -1.0],
                    vec![1.0, -1.0],
                    vec![1.0, 1.0],
                    vec![-1.0, 1.0],
                ],
            )
            .unwrap(),
        );
        let fk = f.convex_rearrangement(&sqr).unwrap();
        for t in [0.05, 0.4, 0.8] {
            assert!((f.distribution_function(t) - fk.distribution_function(t)).abs() <= cv);
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = GridFunction::from_fn(box_grid(2, 1.0, 33).unwrap(), |x| x[0] * x[0] - 0.3 * x[1])
            .unwrap();
        let g = GridFunction::from_csv(&f.to_csv()).unwrap();
        assert_eq!(f, g);
        let f3 = GridFunction::from_fn(box_grid(3, 0.5, 33).unwrap(), |x| x[0] + 2.0 * x[1] - x[2])
            .unwrap();
        assert_eq!(GridFunction::from_csv(&f3.to_csv()).unwrap(), f3);
        assert!(GridFunction::from_csv("0,1\n1,2,3\n").is_err());
    }

    #[test]
    fn lyz_body_of_the_cone() {
        let f = cone(1.0);
        let seg = QBody::preset("segment", 1).unwrap();
        let b = lyz_body(&f, &seg, 2.0, &s()).unwrap();
        for t in [0.0f64, 0.8, 2.1] {
            assert_relative_eq!(
                b.support(&[t.cos(), t.sin()]),
                (PI / 8.0).sqrt(),
                max_relative = 0.01
            );
        }
        let b2 = lyz_body(&f.scaled(2.0), &seg, 2.0, &s()).unwrap();
        let (ConvexBody::SupportSampled(x), ConvexBody::SupportSampled(y)) = (&b, &b2) else {
            panic!()
        };
        for (a, c) in x.values().iter().zip(y.values()) {
            assert_relative_eq!(*c, 2.0 * a, max_relative = 1e-12);
        }
        let zero = GridFunction::from_fn(s().box_grid(2).unwrap(), |_| 0.0).unwrap();
        assert!(lyz_body(&zero, &seg, 2.0, &s()).is_err());
    }

    #[test]
    fn energy_routes_agree_and_match_radial_value() {
        let f = cone(1.0);
        for (m, name, p) in [
            (1, "segment", 2.0),
            (2, "square", 2.0),
            (1, "segment+", 1.0),
            (2, "simplex2", 3.0),
        ] {
            let q = QBody::preset(name, m).unwrap();
            let e = energy(&f, &q, p, &s()).unwrap();
            let d = energy_direct(&f, &q, p, &s()).unwrap();
            assert!((e / d - 1.0).abs() < 0.005, "{name} m={m}: {e} vs {d}");
            let g = f.dirichlet_norm(p);
            assert!((e / g - 1.0).abs() < 0.01, "{name} m={m} p={p}: {e} vs {g}");
        }
    }

    #[test]
    fn binned_energy_matches_exact_atoms() {
        let f = sheared_cone(0.8);
        let mut exact = s();
        exact.energy_bins = [0, 0];
        for (m, name, p) in [(1, "segment+", 1.5), (2, "square", 2.0)] {
            let q = QBody::preset(name, m).unwrap();
            let a = energy(&f, &q, p, &s()).unwrap();
            let b = energy(&f, &q, p, &exact).unwrap();
            assert!((a / b - 1.0).abs() < 1e-4, "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn energy_is_affine_invariant_and_polya_szego_holds() {
        let seg = QBody::preset("segment", 1).unwrap();
        let f = cone(0.6);
        let g = sheared_cone(0.6);
        let (ef, eg) = (
            energy(&f, &seg, 2.0, &s()).unwrap(),
            energy(&g, &seg, 2.0, &s()).unwrap(),
        );
        assert!((ef / eg - 1.0).abs() < 0.01, "{ef} vs {eg}");
        let gs = g.schwarz_rearrangement();
        let es = energy(&gs, &seg, 2.0, &s()).unwrap();
        assert!(eg >= 0.99 * es);
        assert!((eg / es - 1.0).abs() < 0.02, "{eg} vs {es}");
        // the Dirichlet norm of the sheared cone is strictly larger
        assert!(g.dirichlet_norm(2.0) > 1.05 * eg);
    }

    #[test]
    fn centroid_route_and_lower_bound() {
        let f = sheared_cone(0.7);
        for (m, name, p) in [(1, "segment", 2.0), (2, "square", 1.5)] {
            let q = QBody::preset(name, m).unwrap();
            let e = energy(&f, &q, p, &s()).unwrap();
            let c = energy_via_centroid(&f, &q, p, &s()).unwrap();
            assert!((e / c - 1.0).abs() < 0.01, "{e} vs {c}");
            let lb = centroid_lower_bound(&f, &q, p, &s()).unwrap();
            assert!(e >= 0.99 * lb, "{e} vs {lb}");
        }
    }

    #[test]
    fn faber_krahn_energy_of_the_cone() {
        let seg = QBody::preset("segment", 1).unwrap();
        let f = cone(1.0);
        let e = energy_infty(&f, &seg, &s()).unwrap();
        assert!((e - 1.0).abs() < 0.02, "{e}");
        assert_relative_eq!(
            energy_infty(&f.scaled(2.0), &seg, &s()).unwrap(),
            2.0 * e,
            max_relative = 1e-10
        );
    }

    #[test]
    fn support_integrals_of_convex_rearrangements() {
        let f = sheared_cone(0.6);
        let k = ConvexBody::Ellipsoid(
            Ellipsoid::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.6])).unwrap(),
        );
        let fk = f.convex_rearrangement(&k).unwrap();
        assert!(
            f.support_integral(&k, 2.0).unwrap() >= 0.99 * fk.support_integral(&k, 2.0).unwrap()
        );
    }
}
