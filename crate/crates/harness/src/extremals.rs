//! Analytic test functions and the extremals of the sharp inequalities.

use std::sync::Arc;

use affiq_core::constants::{GNParameters, NeumannProfile};
use affiq_core::functional::GridFunction;
use affiq_core::quadrature::BoxGrid;
use affiq_core::{Error, Result};
use nalgebra::DMatrix;

/// Non-compact profiles are cut at this fraction of their peak, and the cut
/// level is subtracted so the sampled function stays continuous.
pub const TAIL: f64 = 1e-6;

pub type Eval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A function on R^n given by a formula, with a bound on the Euclidean
/// radius of its support.
#[derive(Clone)]
pub struct Profile {
    pub id: String,
    pub dim: usize,
    /// sup |x| over the support.
    pub reach: f64,
    eval: Eval,
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile")
            .field("id", &self.id)
            .field("reach", &self.reach)
            .finish()
    }
}

impl Profile {
    pub fn new(id: impl Into<String>, dim: usize, reach: f64, eval: Eval) -> Self {
        Profile {
            id: id.into(),
            dim,
            reach,
            eval,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// x ↦ f(A(x − x₀)).
    pub fn compose(&self, tag: &str, a: &DMatrix<f64>, shift: &[f64]) -> Result<Profile> {
        let n = self.dim;
        if a.nrows() != n || a.ncols() != n || shift.len() != n {
            return Err(Error::InvalidInput("map and shift must match the dimension".into()));
        }
        let inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("map is singular".into()))?;
        let norm_inv = inv.svd(false, false).singular_values.max();
        let shift_norm = shift.iter().map(|c| c * c).sum::<f64>().sqrt();
        let (inner, a, x0) = (self.eval.clone(), a.clone(), shift.to_vec());
        let eval: Eval = Arc::new(move |x: &[f64]| {
            let y: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| a[(i, j)] * (x[j] - x0[j])).sum())
                .collect();
            inner(&y)
        });
        Ok(Profile {
            id: format!("{}@{tag}", self.id),
            dim: n,
            reach: norm_inv * self.reach + shift_norm,
            eval,
        })
    }

    pub fn scaled(&self, c: f64) -> Profile {
        let inner = self.eval.clone();
        Profile {
            id: format!("{}*{c}", self.id),
            dim: self.dim,
            reach: self.reach,
            eval: Arc::new(move |x: &[f64]| c * inner(x)),
        }
    }

    /// Samples on `grid`; the support must keep two empty cell layers at the
    /// edge of the box.
    pub fn sample(&self, grid: &BoxGrid) -> Result<GridFunction> {
        if grid.dim() != self.dim {
            return Err(Error::InvalidInput(format!(
                "{}-dimensional function on a {}-dimensional grid",
                self.dim,
                grid.dim()
            )));
        }
        let room = grid.halfwidth() - 2.0 * grid.spacing();
        if self.reach > room {
            return Err(Error::InvalidInput(format!(
                "support of {} (radius {:.4}) exceeds the box",
                self.id, self.reach
            )));
        }
        let f = GridFunction::from_fn(grid.clone(), |x| self.eval(x))?;
        f.require_compact()?;
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extremal {
    /// (1 − r)₊, the Faber–Krahn extremal.
    Cone,
    /// exp(−r²/2).
    Gaussian,
    /// (1 − r^{(p−n)/(p−1)})₊, p > n.
    Morrey { p: f64 },
    /// exp(−r^{p/(p−1)}), 1 < p.
    LogSobolev { p: f64 },
    /// (1 + r^{p/(p−1)})^{−(p−1)/(q−p)}, 1 < p < n, p < q ≤ p(n−1)/(n−p).
    GagliardoNirenberg { p: f64, q: f64 },
    /// u(r) − u(1) on the unit ball, u the radial Neumann eigenfunction,
    /// scaled to peak 1.
    Nash,
}

/// f(x) = amplitude·φ(|A(x − x₀)|/scale).
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub amplitude: f64,
    pub scale: f64,
    pub matrix: Option<DMatrix<f64>>,
    pub shift: Option<Vec<f64>>,
}

impl Default for Placement {
    fn default() -> Self {
        Placement {
            amplitude: 1.0,
            scale: 1.0,
            matrix: None,
            shift: None,
        }
    }
}

impl Placement {
    pub fn scale(scale: f64) -> Self {
        Placement {
            scale,
            ..Default::default()
        }
    }
}

type Radial = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

fn cut(phi: Radial) -> Radial {
    Arc::new(move |r| (phi(r) - TAIL).max(0.0))
}

impl Extremal {
    pub fn name(&self) -> String {
        match self {
            Extremal::Cone => "cone".into(),
            Extremal::Gaussian => "gauss".into(),
            Extremal::Morrey { p } => format!("ms{p}"),
            Extremal::LogSobolev { p } => format!("ls{p}"),
            Extremal::GagliardoNirenberg { p, q } => format!("gn{p}-{q}"),
            Extremal::Nash => "nash".into(),
        }
    }

    /// Radial profile with φ(0) = 1 and the radius where it vanishes.
    fn radial(&self, n: usize) -> Result<(Radial, f64)> {
        let nf = n as f64;
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        Ok(match *self {
            Extremal::Cone => (Arc::new(|r: f64| (1.0 - r).max(0.0)), 1.0),
            Extremal::Gaussian => {
                let reach = (2.0 * (1.0 / TAIL).ln()).sqrt();
                (cut(Arc::new(|r: f64| (-0.5 * r * r).exp())), reach)
            }
            Extremal::Morrey { p } => {
                if !(p > nf) {
                    return bad(format!("Morrey extremal needs p > n, got p={p}"));
                }
                let e = (p - nf) / (p - 1.0);
                (Arc::new(move |r: f64| (1.0 - r.powf(e)).max(0.0)), 1.0)
            }
            Extremal::LogSobolev { p } => {
                if !(p > 1.0) {
                    return bad(format!("log-Sobolev extremal needs p > 1, got p={p}"));
                }
                let e = p / (p - 1.0);
                let reach = (1.0 / TAIL).ln().powf(1.0 / e);
                (cut(Arc::new(move |r: f64| (-r.powf(e)).exp())), reach)
            }
            Extremal::GagliardoNirenberg { p, q } => {
                if !(p > 1.0 && p < nf && q > p && q <= GNParameters::q_max(n, p) * (1.0 + 1e-12)) {
                    return bad(format!("no Gagliardo-Nirenberg extremal for n={n}, p={p}, q={q}"));
                }
                let (e, k) = (p / (p - 1.0), (p - 1.0) / (q - p));
                let reach = (TAIL.powf(-1.0 / k) - 1.0).powf(1.0 / e);
                (cut(Arc::new(move |r: f64| (1.0 + r.powf(e)).powf(-k))), reach)
            }
            Extremal::Nash => {
                let u = NeumannProfile::new(n)?;
                let (u0, u1) = (u.eval(0.0), u.eval(1.0));
                (
                    Arc::new(move |r: f64| {
                        if r >= 1.0 {
                            0.0
                        } else {
                            ((u.eval(r) - u1) / (u0 - u1)).max(0.0)
                        }
                    }),
                    1.0,
                )
            }
        })
    }

    pub fn profile(&self, n: usize, placement: &Placement) -> Result<Profile> {
        if !(placement.scale > 0.0 && placement.amplitude.is_finite()) {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        let (phi, reach) = self.radial(n)?;
        let (amp, s) = (placement.amplitude, placement.scale);
        let base = Profile::new(
            self.name(),
            n,
            reach * s,
            Arc::new(move |x: &[f64]| {
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                amp * phi(r / s)
            }),
        );
        match (&placement.matrix, &placement.shift) {
            (None, None) => Ok(base),
            (a, x0) => {
                let a = a.clone().unwrap_or_else(|| DMatrix::identity(n, n));
                let x0 = x0.clone().unwrap_or_else(|| vec![0.0; n]);
                base.compose("A", &a, &x0)
            }
        }
    }
}

/// Samples an extremal on `grid`. Errors when the support leaves the box.
pub fn make_extremal(kind: Extremal, placement: &Placement, grid: &BoxGrid) -> Result<GridFunction> {
    kind.profile(grid.dim(), placement)?.sample(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use affiq_core::quadrature::box_grid;
    use affiq_core::special::ball_volume;

    fn grid() -> BoxGrid {
        box_grid(2, 1.25, 129).unwrap()
    }

    fn value_at(f: &GridFunction, x: [f64; 2]) -> f64 {
        let g = f.grid();
        let h = g.spacing();
        let i = ((x[0] + g.halfwidth()) / h) as usize;
        let j = ((x[1] + g.halfwidth()) / h) as usize;
        f.values()[g.ravel([i, j, 0])]
    }

    #[test]
    fn cone_peaks_at_origin_with_disk_support() {
        let f = make_extremal(Extremal::Cone, &Placement::default(), &grid()).unwrap();
        assert_eq!(f.max_abs(), 1.0);
        assert!((f.support_volume() / ball_volume(2.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn morrey_endpoints() {
        let p = Extremal::Morrey { p: 3.0 }.profile(2, &Placement::default()).unwrap();
        assert_eq!(p.eval(&[0.0, 0.0]), 1.0);
        assert_eq!(p.eval(&[1.0, 0.0]), 0.0);
        assert_eq!(p.eval(&[0.0, 1.2]), 0.0);
    }

    #[test]
    fn support_outside_the_box_is_rejected() {
        let pl = Placement::scale(1.3);
        assert!(make_extremal(Extremal::Cone, &pl, &grid()).is_err());
        let g = make_extremal(Extremal::Gaussian, &Placement::scale(0.5), &grid());
        assert!(g.is_err());
        assert!(make_extremal(Extremal::Gaussian, &Placement::scale(0.2), &grid()).is_ok());
    }

    #[test]
    fn composition_moves_the_peak() {
        let pl = Placement {
            matrix: Some(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5])),
            shift: Some(vec![0.1, -0.2]),
            ..Placement::scale(0.4)
        };
        let p = Extremal::Cone.profile(2, &pl).unwrap();
        assert!((p.eval(&[0.1, -0.2]) - 1.0).abs() < 1e-15);
        // |A(x − x₀)| = 0.4 along e₂ at distance 0.8
        assert!(p.eval(&[0.1, 0.6]).abs() < 1e-15);
        assert!(p.reach >= 0.8 + 0.2 - 1e-12);
        let f = p.sample(&grid()).unwrap();
        assert!(value_at(&f, [0.1, -0.2]) > 0.95);
    }

    #[test]
    fn nash_profile_is_flat_at_the_rim() {
        let p = Extremal::Nash.profile(2, &Placement::default()).unwrap();
        assert!((p.eval(&[0.0, 0.0]) - 1.0).abs() < 1e-12);
        let near = p.eval(&[0.999, 0.0]);
        assert!(near >= 0.0 && near < 1e-5);
    }

    #[test]
    fn gn_rejects_q_outside_range() {
        let bad = Extremal::GagliardoNirenberg { p: 1.5, q: 3.5 };
        assert!(bad.profile(2, &Placement::default()).is_err());
        let ok = Extremal::GagliardoNirenberg { p: 1.5, q: 1.6 };
        assert!(ok.profile(2, &Placement::scale(0.3)).unwrap().reach < 1.0);
    }
}
