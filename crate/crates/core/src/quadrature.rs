//! Sphere and box quadrature.
//!
//! Sums are accumulated pairwise in a fixed order so results are
//! bit-reproducible for a given grid.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::distribution::{ContinuousCDF, Normal};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::special::sphere_area;

/// Pairwise (cascade) summation in a fixed split order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        let mut s = 0.0;
        for x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Product,
    LowDiscrepancy,
}

/// Quadrature rule on S^{d-1}; nodes stored flat, `dim` entries per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Builds a grid from explicit nodes, rescaling weights to the sphere area.
    pub fn from_parts(dim: usize, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim < 2 || nodes.len() != dim * weights.len() || weights.is_empty() {
            return invalid("inconsistent sphere grid parts");
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return invalid("sphere grid weights must be positive");
        }
        let mut g = SphereGrid {
            dim,
            nodes,
            weights,
        };
        g.normalize();
        Ok(g)
    }

    fn normalize(&mut self) {
        for v in self.nodes.chunks_exact_mut(self.dim) {
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= r);
        }
        let s = pairwise_sum(&self.weights);
        let scale = sphere_area(self.dim) / s;
        self.weights.iter_mut().for_each(|w| *w *= scale);
    }
}

/// Builds a deterministic quadrature rule on S^{d-1}.
///
/// For the product scheme with d ≥ 3 the node count is only close to
/// `resolution`: each polar angle gets `n` Gauss-Legendre nodes and the
/// azimuth `2n` uniform nodes, with `n` chosen so that `2n^{d-1}` is nearest
/// to the request.
pub fn sphere_grid(d: usize, resolution: usize, scheme: Scheme) -> Result<SphereGrid> {
    if d < 2 {
        return invalid(format!("sphere dimension {d} < 2"));
    }
    if resolution < 16 {
        return invalid(format!("sphere resolution {resolution} < 16"));
    }
    match scheme {
        Scheme::Product => Ok(product_grid(d, resolution)),
        Scheme::LowDiscrepancy => Ok(low_discrepancy_grid(d, resolution)),
    }
}

fn product_grid(d: usize, resolution: usize) -> SphereGrid {
    if d == 2 {
        let n = resolution;
        let mut nodes = Vec::with_capacity(2 * n);
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            nodes.push(t.cos());
            nodes.push(t.sin());
        }
        let weights = vec![2.0 * PI / n as f64; n];
        let mut g = SphereGrid {
            dim: 2,
            nodes,
            weights,
        };
        g.normalize();
        return g;
    }
    let npol = ((resolution as f64 / 2.0).powf(1.0 / (d - 1) as f64).round() as usize).max(2);
    let naz = 2 * npol;
    let (gx, gw) = gauss_legendre(npol);
    let phis: Vec<f64> = gx.iter().map(|x| 0.5 * PI * (x + 1.0)).collect();
    let pw: Vec<f64> = gw.iter().map(|w| 0.5 * PI * w).collect();
    let npolar = d - 2;
    let total = npol.pow(npolar as u32) * naz;
    let mut nodes = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; npolar];
    loop {
        let mut w = 1.0;
        let mut sin_prod = 1.0;
        let mut coords = Vec::with_capacity(d);
        for (k, &i) in idx.iter().enumerate() {
            let phi = phis[i];
            coords.push(sin_prod * phi.cos());
            w *= pw[i] * phi.sin().powi((d - 2 - k) as i32);
            sin_prod *= phi.sin();
        }
        for j in 0..naz {
            let psi = 2.0 * PI * j as f64 / naz as f64;
            nodes.extend_from_slice(&coords);
            nodes.push(sin_prod * psi.cos());
            nodes.push(sin_prod * psi.sin());
            weights.push(w * 2.0 * PI / naz as f64);
        }
        let mut k = npolar;
        loop {
            if k == 0 {
                let mut g = SphereGrid {
                    dim: d,
                    nodes,
                    weights,
                };
                g.normalize();
                return g;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < npol {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn low_discrepancy_grid(d: usize, n: usize) -> SphereGrid {
    // Additive recurrence with the generalized golden ratio of dimension d.
    let mut g = 2.0f64;
    for _ in 0..100 {
        let f = g.powi(d as i32 + 1) - g - 1.0;
        let df = (d + 1) as f64 * g.powi(d as i32) - 1.0;
        g -= f / df;
    }
    let alpha: Vec<f64> = (1..=d).map(|k| (1.0 / g.powi(k as i32)).fract()).collect();
    let normal = Normal::standard();
    let mut nodes = Vec::with_capacity(n * d);
    for i in 1..=n {
        let start = nodes.len();
        for a in &alpha {
            let u = (0.5 + a * i as f64).fract().clamp(1e-12, 1.0 - 1e-12);
            nodes.push(normal.inverse_cdf(u));
        }
        if nodes[start..].iter().all(|x| x.abs() < 1e-300) {
            nodes[start] = 1.0;
        }
    }
    let mut grid = SphereGrid {
        dim: d,
        nodes,
        weights: vec![1.0; n],
    };
    grid.normalize();
    grid
}

/// Σ weights·g(node), summed pairwise.
pub fn integrate_sphere<F: FnMut(&[f64]) -> f64>(grid: &SphereGrid, mut g: F) -> Result<f64> {
    let mut terms = Vec::with_capacity(grid.len());
    for (i, (x, w)) in grid.nodes().zip(grid.weights()).enumerate() {
        let v = g(x);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "integrate_sphere",
                index: i,
            });
        }
        terms.push(w * v);
    }
    Ok(pairwise_sum(&terms))
}

/// Cell-centred Cartesian grid on [-R, R]^n.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGrid {
    dim: usize,
    halfwidth: f64,
    cells: usize,
}

/// Builds a box grid; `cells` must be odd so that the origin is a cell centre.
pub fn box_grid(n: usize, halfwidth: f64, cells: usize) -> Result<BoxGrid> {
    if !(1..=3).contains(&n) {
        return invalid(format!("box dimension {n} not in 1..=3"));
    }
    if !(halfwidth > 0.0 && halfwidth.is_finite()) {
        return invalid("box halfwidth must be positive");
    }
    if cells % 2 == 0 {
        return invalid(format!("cells per axis must be odd, got {cells}"));
    }
    if cells < 33 {
        return invalid(format!("cells per axis must be at least 33, got {cells}"));
    }
    Ok(BoxGrid {
        dim: n,
        halfwidth,
        cells,
    })
}

impl BoxGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    /// Cell edge length 2R/cells.
    pub fn spacing(&self) -> f64 {
        2.0 * self.halfwidth / self.cells as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of the i-th cell centre along an axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.halfwidth + (i as f64 + 0.5) * self.spacing()
    }

    /// Axis indices of a flat cell index (first axis slowest).
    pub fn unravel(&self, k: usize) -> [usize; 3] {
        let c = self.cells;
        match self.dim {
            1 => [k, 0, 0],
            2 => [k / c, k % c, 0],
            _ => [k / (c * c), (k / c) % c, k % c],
        }
    }

    pub fn ravel(&self, idx: [usize; 3]) -> usize {
        let c = self.cells;
        match self.dim {
            1 => idx[0],
            2 => idx[0] * c + idx[1],
            _ => (idx[0] * c + idx[1]) * c + idx[2],
        }
    }

    /// Centre of a flat cell index; unused trailing entries are zero.
    pub fn center(&self, k: usize) -> [f64; 3] {
        let idx = self.unravel(k);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coord(idx[a]);
        }
        x
    }
}

/// Polar-coordinate integration over a star body given by its gauge,
/// after a volume-preserving linear change of variables that makes the
/// body close to isotropic.
///
/// With det T = 1 and y = T^{-1}θ, ∫_K F = (1/(d+k)) Σ w_i F(y_i) ρ_i^{d+k}
/// for F homogeneous of degree k, where ρ_i = 1/‖y_i‖_K. The substitution is
/// exact, so T only affects how well the grid resolves the integrand.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    radii: Vec<f64>,
}

impl AdaptedFrame {
    pub fn new<G: Fn(&[f64]) -> f64>(grid: &SphereGrid, gauge: G, passes: usize) -> Result<Self> {
        let d = grid.dim();
        Self::with_initial_map(grid, gauge, passes, DMatrix::identity(d, d))
    }

    /// Starts from y = Aθ for a user-supplied invertible A (rescaled to
    /// |det A| = 1) before the whitening passes.
    pub fn with_initial_map<G: Fn(&[f64]) -> f64>(
        grid: &SphereGrid,
        gauge: G,
        passes: usize,
        initial: DMatrix<f64>,
    ) -> Result<Self> {
        let d = grid.dim();
        if initial.nrows() != d || initial.ncols() != d {
            return invalid("initial map must be d×d");
        }
        let det = initial.determinant().abs();
        if !(det > 0.0 && det.is_finite()) {
            return Err(Error::Degenerate("initial map is singular".into()));
        }
        let mut tinv = initial / det.powf(1.0 / d as f64);
        let mut points = vec![0.0; grid.nodes.len()];
        for (t, y) in grid.nodes().zip(points.chunks_exact_mut(d)) {
            for a in 0..d {
                y[a] = (0..d).map(|b| tinv[(a, b)] * t[b]).sum();
            }
        }
        let mut radii = vec![0.0; grid.len()];
        for pass in 0..=passes {
            for (i, y) in points.chunks_exact(d).enumerate() {
                let g = gauge(y);
                if !g.is_finite() {
                    return Err(Error::NonFinite {
                        context: "gauge",
                        index: i,
                    });
                }
                if !(g > 0.0) {
                    return Err(Error::Degenerate(format!("non-positive gauge at node {i}")));
                }
                radii[i] = 1.0 / g;
            }
            if pass == passes {
                break;
            }
            // Second moment of the current image body TK about the origin.
            let mut m = DMatrix::<f64>::zeros(d, d);
            for a in 0..d {
                for b in a..d {
                    let terms: Vec<f64> = grid
                        .nodes()
                        .zip(grid.weights())
                        .zip(&radii)
                        .map(|((t, w), r)| w * r.powi(d as i32 + 2) * t[a] * t[b])
                        .collect();
                    let s = pairwise_sum(&terms);
                    m[(a, b)] = s;
                    m[(b, a)] = s;
                }
            }
            let eig = SymmetricEigen::new(m);
            let lmin = eig.eigenvalues.min();
            let lmax = eig.eigenvalues.max();
            if !(lmin > 0.0) || !(lmax / lmin).is_finite() {
                break;
            }
            // S^{-1} = M^{1/2} / det(M)^{1/(2d)}.
            let logdet: f64 = eig.eigenvalues.iter().map(|l| l.ln()).sum();
            let c = (-logdet / (2.0 * d as f64)).exp();
            let sq = eig.eigenvalues.map(|l| l.sqrt() * c);
            let sinv =
                &eig.eigenvectors * DMatrix::from_diagonal(&sq) * eig.eigenvectors.transpose();
            tinv = &tinv * sinv;
            for (t, y) in grid.nodes().zip(points.chunks_exact_mut(d)) {
                for a in 0..d {
                    y[a] = (0..d).map(|b| tinv[(a, b)] * t[b]).sum();
                }
            }
        }
        Ok(AdaptedFrame {
            dim: d,
            points,
            weights: grid.weights.clone(),
            radii,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Mapped node T^{-1}θ_i.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    /// Volume (1/d) Σ w ρ^d.
    pub fn volume(&self) -> f64 {
        let d = self.dim as i32;
        let terms: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.radii)
            .map(|(w, r)| w * r.powi(d))
            .collect();
        pairwise_sum(&terms) / self.dim as f64
    }

    /// ∫_K F for F positively homogeneous of degree `k`.
    pub fn integrate_homogeneous<F: FnMut(&[f64]) -> f64>(&self, k: f64, mut f: F) -> f64 {
        let e = self.dim as f64 + k;
        let terms: Vec<f64> = (0..self.len())
            .map(|i| self.weights[i] * f(self.point(i)) * self.radii[i].powf(e))
            .collect();
        pairwise_sum(&terms) / e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ball_volume;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((s - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn circle_rule() {
        let g = sphere_grid(2, 360, Scheme::Product).unwrap();
        assert_eq!(g.len(), 360);
        for w in g.weights() {
            assert_relative_eq!(*w, 2.0 * PI / 360.0, max_relative = 1e-13);
        }
        assert_relative_eq!(g.node(90)[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn weight_sums() {
        let g = sphere_grid(3, 26, Scheme::Product).unwrap();
        assert_relative_eq!(
            g.weights().iter().sum::<f64>(),
            4.0 * PI,
            max_relative = 1e-9
        );
        let g = sphere_grid(6, 4096, Scheme::LowDiscrepancy).unwrap();
        let s = integrate_sphere(&g, |_| 1.0).unwrap();
        // area of S^5 from the ball volume formula, computed independently
        let area = 6.0 * PI.powi(3) / 6.0;
        assert_relative_eq!(s, area, max_relative = 1e-6);
    }

    #[test]
    fn moments() {
        let g = sphere_grid(3, 2048, Scheme::Product).unwrap();
        let s = integrate_sphere(&g, |t| t[0] * t[0]).unwrap();
        assert_relative_eq!(s, 4.0 * PI / 3.0, max_relative = 1e-10);
        let g = sphere_grid(2, 720, Scheme::Product).unwrap();
        let s = integrate_sphere(&g, |t| (t[0] * t[0] + t[1] * t[1]).powf(-1.0)).unwrap();
        assert_relative_eq!(s / 2.0, PI, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sphere_grid(1, 100, Scheme::Product).is_err());
        assert!(sphere_grid(3, 10, Scheme::Product).is_err());
        assert!(box_grid(2, 1.0, 64).is_err());
        assert!(box_grid(4, 1.0, 65).is_err());
        let g = sphere_grid(2, 16, Scheme::Product).unwrap();
        let e = integrate_sphere(&g, |t| if t[0] > 0.99 { f64::NAN } else { 1.0 });
        assert_eq!(
            e,
            Err(Error::NonFinite {
                context: "integrate_sphere",
                index: 0
            })
        );
    }

    #[test]
    fn box_grid_geometry() {
        let b = box_grid(2, 2.0, 129).unwrap();
        assert_relative_eq!(
            b.cell_volume(),
            (4.0f64 / 129.0).powi(2),
            max_relative = 1e-14
        );
        assert_eq!(b.center(b.ravel([64, 64, 0])), [0.0, 0.0, 0.0]);
        let b = box_grid(1, 1.0, 33).unwrap();
        assert_eq!(b.len(), 33);
        assert_relative_eq!(b.coord(0), -b.coord(32), epsilon = 1e-15);
        let b = box_grid(3, 1.5, 65).unwrap();
        assert_eq!(b.len(), 65 * 65 * 65);
        for k in [0, 17, 4000, 65 * 65 * 65 - 1] {
            assert_eq!(b.ravel(b.unravel(k)), k);
        }
    }

    #[test]
    fn adapted_frame_recovers_stretched_ellipsoid_volume() {
        let g = sphere_grid(4, 2048, Scheme::Product).unwrap();
        let axes = [5.0, 1.0, 0.5, 0.4];
        let gauge = |x: &[f64]| {
            x.iter()
                .zip(&axes)
                .map(|(x, a)| (x / a).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let exact = ball_volume(4.0) * axes.iter().product::<f64>();
        let raw = AdaptedFrame::new(&g, gauge, 0).unwrap().volume();
        let adapted = AdaptedFrame::new(&g, gauge, 2).unwrap().volume();
        assert!((raw / exact - 1.0).abs() > 1e-2);
        assert_relative_eq!(adapted, exact, max_relative = 1e-8);
    }

    #[test]
    fn homogeneous_moment_of_ball() {
        // ∫_{B^3} |x|^2 = 4π/5
        let g = sphere_grid(3, 2048, Scheme::Product).unwrap();
        let f = AdaptedFrame::new(&g, |x| x.iter().map(|v| v * v).sum::<f64>().sqrt(), 1).unwrap();
        let m = f.integrate_homogeneous(2.0, |x| x.iter().map(|v| v * v).sum());
        assert_relative_eq!(m, 4.0 * PI / 5.0, max_relative = 1e-10);
    }
}
