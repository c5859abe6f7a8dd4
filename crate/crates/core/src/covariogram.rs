//! Covariograms, m-th difference bodies and Schneider's volume ratio.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::Polytope;
use crate::config::Settings;
use crate::error::{invalid, Error, Result};
use crate::lp::{maximize, LpOutcome};
use crate::optimize::nelder_mead;
use crate::quadrature::AdaptedFrame;

/// g_K(x) = vol(K ∩ (K + x)).
pub fn covariogram(k: &Polytope, x: &[f64]) -> Result<f64> {
    m_covariogram(k, &[x.to_vec()])
}

/// g_{K,m}(x₁,…,x_m) = vol(K ∩ ∩ᵢ (K + xᵢ)), by half-space clipping.
pub fn m_covariogram(k: &Polytope, xs: &[Vec<f64>]) -> Result<f64> {
    let n = k.dim();
    if xs.iter().any(|x| x.len() != n) {
        return invalid("translation vectors must live in the body's space");
    }
    let mut normals = Vec::with_capacity(k.facets().len() * (xs.len() + 1));
    let mut offsets = Vec::with_capacity(normals.capacity());
    for f in k.facets() {
        normals.push(f.normal.clone());
        offsets.push(f.offset);
        for x in xs {
            normals.push(f.normal.clone());
            offsets.push(f.offset + f.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>());
        }
    }
    match Polytope::from_halfspaces(n, &normals, &offsets) {
        Ok(p) => Ok(p.volume().max(0.0)),
        Err(Error::Degenerate(_)) => Ok(0.0),
        Err(Error::Unsupported(_)) => Ok(m_covariogram_monte_carlo(k, xs, 1_000_000, 0x5eed)),
        Err(e) => Err(e),
    }
}

/// Monte-Carlo estimate of the m-th covariogram from a fixed seed.
pub fn m_covariogram_monte_carlo(k: &Polytope, xs: &[Vec<f64>], samples: usize, seed: u64) -> f64 {
    let n = k.dim();
    let lo: Vec<f64> = (0..n)
        .map(|a| {
            k.vertices()
                .iter()
                .map(|v| v[a])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let hi: Vec<f64> = (0..n)
        .map(|a| {
            k.vertices()
                .iter()
                .map(|v| v[a])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let boxvol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let inside = |y: &[f64]| {
        k.facets()
            .iter()
            .all(|f| f.normal.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() <= f.offset)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut hits = 0usize;
    for _ in 0..samples {
        for a in 0..n {
            y[a] = lo[a] + (hi[a] - lo[a]) * rng.random::<f64>();
        }
        if !inside(&y) {
            continue;
        }
        let ok = xs.iter().all(|x| {
            for a in 0..n {
                z[a] = y[a] - x[a];
            }
            inside(&z)
        });
        if ok {
            hits += 1;
        }
    }
    boxvol * hits as f64 / samples as f64
}

/// D^mK ⊂ R^{nm} through its radial function, one small LP per query.
#[derive(Debug, Clone)]
pub struct DifferenceBody {
    n: usize,
    m: usize,
    normals: Vec<Vec<f64>>,
    slack: Vec<f64>,
}

impl DifferenceBody {
    pub fn new(k: &Polytope, m: usize) -> Result<Self> {
        if m == 0 {
            return invalid("m must be at least 1");
        }
        let y0 = k.centroid();
        let normals: Vec<Vec<f64>> = k.facets().iter().map(|f| f.normal.clone()).collect();
        let slack: Vec<f64> = k
            .facets()
            .iter()
            .map(|f| f.offset - f.normal.iter().zip(&y0).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        Ok(DifferenceBody {
            n: k.dim(),
            m,
            normals,
            slack,
        })
    }

    pub fn dim(&self) -> usize {
        self.n * self.m
    }

    /// max{r ≥ 0 : ∃y ∈ K, y − r xᵢ ∈ K for all i}; 1-homogeneous of degree
    /// −1 in x, infinite at x = 0.
    pub fn radial(&self, x: &[f64]) -> Result<f64> {
        let (n, m) = (self.n, self.m);
        if x.len() != n * m {
            return invalid("direction must have n·m coordinates");
        }
        // variables (u⁺, u⁻, r) with y = y0 + u⁺ − u⁻
        let nv = 2 * n + 1;
        let mut rows = Vec::with_capacity(self.normals.len() * (m + 1));
        let mut rhs = Vec::with_capacity(rows.capacity());
        for (a, s) in self.normals.iter().zip(&self.slack) {
            let mut row = vec![0.0; nv];
            for j in 0..n {
                row[j] = a[j];
                row[n + j] = -a[j];
            }
            rows.push(row.clone());
            rhs.push(*s);
            for i in 0..m {
                let ax: f64 = (0..n).map(|j| a[j] * x[i * n + j]).sum();
                let mut r = row.clone();
                r[2 * n] = -ax;
                rows.push(r);
                rhs.push(*s);
            }
        }
        let mut c = vec![0.0; nv];
        c[2 * n] = 1.0;
        match maximize(&c, &rows, &rhs)? {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Unbounded => Ok(f64::INFINITY),
        }
    }

    /// vol_{nm}(D^mK) by polar coordinates.
    pub fn volume(&self, settings: &Settings) -> Result<f64> {
        let grid = settings.sphere(self.dim())?;
        let frame = AdaptedFrame::new(
            &grid,
            |x| match self.radial(x) {
                Ok(r) if r > 0.0 => 1.0 / r,
                _ => f64::NAN,
            },
            settings.whiten_passes,
        )?;
        Ok(frame.volume())
    }
}

/// ρ_{D^mK}(θ) for θ = (θ₁,…,θ_m) ∈ R^{nm}.
pub fn difference_body_radial(k: &Polytope, m: usize, theta: &[f64]) -> Result<f64> {
    DifferenceBody::new(k, m)?.radial(theta)
}

/// vol_{nm}(D^mK) / vol(K)^m, an SL(n)-invariant of K.
pub fn schneider_ratio(k: &Polytope, m: usize, settings: &Settings) -> Result<f64> {
    if k.dim() * m > 6 {
        return Err(Error::Unsupported(format!(
            "n·m = {} exceeds 6",
            k.dim() * m
        )));
    }
    if k.dim() * m == 1 {
        return Ok(2.0);
    }
    let v = DifferenceBody::new(k, m)?.volume(settings)?;
    Ok(v / k.volume().powi(m as i32))
}

/// d/dr g_K(rθ) at r = 0⁺ by two rounds of Richardson extrapolation on
/// forward differences with steps {1e-2, 5e-3, 2.5e-3}·diam K.
pub fn matheron_derivative(k: &Polytope, theta: &[f64]) -> Result<f64> {
    if k.dim() > 3 {
        return Err(Error::Unsupported("Matheron derivative needs n ≤ 3".into()));
    }
    let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || theta.len() != k.dim() {
        return invalid("direction must be a nonzero vector of the body's dimension");
    }
    let u: Vec<f64> = theta.iter().map(|x| x / norm).collect();
    let vs = k.vertices();
    let diam = vs
        .iter()
        .flat_map(|a| {
            vs.iter().map(move |b| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
        })
        .fold(0.0, f64::max);
    let g0 = k.volume();
    let steps = [1e-2 * diam, 5e-3 * diam, 2.5e-3 * diam];
    if steps[2] < 1e-12 {
        return Err(Error::Degenerate("Matheron step underflow".into()));
    }
    let mut d = [0.0; 3];
    for (di, h) in d.iter_mut().zip(steps) {
        let x: Vec<f64> = u.iter().map(|c| c * h).collect();
        *di = (covariogram(k, &x)? - g0) / h;
    }
    let r1a = 2.0 * d[1] - d[0];
    let r1b = 2.0 * d[2] - d[1];
    Ok((4.0 * r1b - r1a) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    SymmetricPolygons,
    Polygons,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct RatioSearch {
    /// Best polygon found, scaled to unit area.
    pub body: Polytope,
    pub ratio: f64,
    pub evaluations: usize,
    /// Set when some restart ran out of budget before converging.
    pub exhausted: bool,
}

fn polygon_from_params(family: Family, x: &[f64]) -> Result<Polytope> {
    let mut pts: Vec<Vec<f64>> = x.chunks_exact(2).map(|c| c.to_vec()).collect();
    if family == Family::SymmetricPolygons {
        let neg: Vec<Vec<f64>> = pts.iter().map(|p| vec![-p[0], -p[1]]).collect();
        pts.extend(neg);
    }
    let p = Polytope::from_points(2, &pts)?;
    let v = p.volume();
    if !(v > 1e-6) {
        return Err(Error::Degenerate("polygon too thin".into()));
    }
    p.scaled(v.powf(-0.5))
}

/// Local Nelder–Mead search over polygon vertices with seeded restarts.
/// `polygons` moves four free points; `symmetric_polygons` moves three
/// points and their reflections through the origin.
pub fn optimize_ratio(
    family: Family,
    n: usize,
    m: usize,
    sense: Sense,
    budget: usize,
    seed: u64,
    settings: &Settings,
) -> Result<RatioSearch> {
    if n != 2 || !(1..=2).contains(&m) {
        return Err(Error::Unsupported(
            "ratio search needs n = 2 and m ∈ {1, 2}".into(),
        ));
    }
    let npts = match family {
        Family::Polygons => 4,
        Family::SymmetricPolygons => 3,
    };
    let restarts = 4;
    let per = (budget / restarts).max(2 * npts + 4);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let sign = if sense == Sense::Max { -1.0 } else { 1.0 };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0;
    let mut exhausted = false;
    for _ in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let span = match family {
            Family::Polygons => 2.0 * std::f64::consts::PI,
            Family::SymmetricPolygons => std::f64::consts::PI,
        };
        let mut x0 = Vec::with_capacity(2 * npts);
        for k in 0..npts {
            let t = span * (k as f64 + rng.random_range(-0.4..0.4)) / npts as f64;
            let r = rng.random_range(0.6..1.4);
            x0.push(r * t.cos());
            x0.push(r * t.sin());
        }
        let res = nelder_mead(
            |x| match polygon_from_params(family, x).and_then(|p| schneider_ratio(&p, m, settings))
            {
                Ok(r) => sign * r,
                Err(_) => f64::INFINITY,
            },
            &x0,
            0.25,
            per,
            1e-7,
        );
        evaluations += res.evaluations;
        exhausted |= !res.converged;
        if res.value.is_finite() && best.as_ref().is_none_or(|(_, v)| res.value < *v) {
            best = Some((res.x, res.value));
        }
    }
    let (x, v) = best.ok_or_else(|| Error::NoConvergence {
        iterations: evaluations,
        residual: f64::NAN,
    })?;
    Ok(RatioSearch {
        body: polygon_from_params(family, &x)?,
        ratio: sign * v,
        evaluations,
        exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> Polytope {
        Polytope::from_points(
            2,
            &[
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn covariogram_examples() {
        let k = unit_square();
        assert_relative_eq!(
            covariogram(&k, &[0.0, 0.0]).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            covariogram(&k, &[0.5, 0.0]).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert_eq!(covariogram(&k, &[2.0, 0.0]).unwrap(), 0.0);
        let g = m_covariogram(&k, &[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_relative_eq!(g, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn covariogram_matches_product_formula_and_monte_carlo() {
        let k = unit_square();
        for (a, b) in [(0.3f64, -0.2f64), (-0.7, 0.1), (0.05, 0.9)] {
            let exact = (1.0f64 - a.abs()) * (1.0 - b.abs());
            assert_relative_eq!(
                covariogram(&k, &[a, b]).unwrap(),
                exact,
                max_relative = 1e-10
            );
        }
        let tri =
            Polytope::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.2, 0.9]]).unwrap();
        let xs = vec![vec![0.1, 0.05], vec![-0.05, 0.1]];
        let exact = m_covariogram(&tri, &xs).unwrap();
        let mc = m_covariogram_monte_carlo(&tri, &xs, 400_000, 3);
        assert!((exact - mc).abs() < 4e-3, "{exact} {mc}");
    }

    #[test]
    fn radial_examples() {
        let k = unit_square();
        let r = difference_body_radial(&k, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(r, 1.0, max_relative = 1e-12);
        let c = Polytope::from_points(
            2,
            &[
                vec![-1.0, -1.0],
                vec![1.0, -1.0],
                vec![1.0, 1.0],
                vec![-1.0, 1.0],
            ],
        )
        .unwrap();
        let t = [0.6, 0.8];
        let r = difference_body_radial(&c, 1, &t).unwrap();
        assert_relative_eq!(r, 2.0 / c.gauge(&t).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn ratios_of_basic_polygons() {
        let s = Settings::default();
        assert_relative_eq!(
            schneider_ratio(&unit_square(), 1, &s).unwrap(),
            4.0,
            max_relative = 1e-3
        );
        let tri =
            Polytope::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_relative_eq!(
            schneider_ratio(&tri, 1, &s).unwrap(),
            6.0,
            max_relative = 1e-3
        );
    }

    #[test]
    fn matheron_examples() {
        let k = unit_square();
        assert_relative_eq!(
            matheron_derivative(&k, &[1.0, 0.0]).unwrap(),
            -1.0,
            max_relative = 1e-6
        );
        let d = matheron_derivative(&k, &[1.0, 1.0]).unwrap();
        assert_relative_eq!(d, -(2f64.sqrt()), max_relative = 1e-6);
    }
}
