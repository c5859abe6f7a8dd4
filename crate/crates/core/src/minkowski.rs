//! Discrete L^p Minkowski problem, level-set measures ν_t and the asymmetric
//! convexification of level sets.
//!
//! For a discrete measure ν = Σ wᵢ δ_{vᵢ} the solver minimizes Σ wᵢ hᵢ^p over
//! Wulff shapes W(h) = {x : x·vᵢ ≤ hᵢ} of unit volume. Stationarity reads
//! p wᵢ hᵢ^{p-1} = λ Aᵢ(h) with Aᵢ the facet areas; rescaling by s^p = p/λ
//! turns it into vol(K) h_K(vᵢ)^{p-1} wᵢ = Aᵢ(K).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

pub use crate::bodies::fibonacci_sphere;
use crate::bodies::{ConvexBody, DirectionBins, Ellipsoid, Polytope, SphericalMeasure};
use crate::config::Settings;
use crate::error::{invalid, Error, Result};
use crate::functional::GridFunction;
use crate::projection::{check_p, dnp_constant, polar_projection_volume, projection_body_of_measure, QBody};
use crate::special::ball_volume;

/// Origin distances below this are reported as "origin on the boundary".
pub const ORIGIN_BOUNDARY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Stop when the KKT residual falls below tol·(1 + total mass).
    pub tol: f64,
    /// Stalled or slowly contracting iterations are accepted below
    /// stall·(1 + total mass).
    pub stall: f64,
    pub max_iter: usize,
    /// Support numbers below floor·scale count as touching the origin.
    pub floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-13,
            stall: 1e-8,
            max_iter: 200,
            floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiSolution {
    pub body: Polytope,
    /// Atoms after merging repeated directions.
    pub measure: SphericalMeasure,
    pub p: f64,
    /// h_K(vᵢ) per atom.
    pub support: Vec<f64>,
    /// Facet area of K with normal vᵢ (zero when absent).
    pub areas: Vec<f64>,
    /// max |vol(K) h_K(vᵢ)^{p-1} wᵢ − Aᵢ|.
    pub residual: f64,
    /// |1 − (1/n) Σ wᵢ h_K(vᵢ)^p|.
    pub normalization_defect: f64,
    pub iterations: usize,
    /// min over atoms of h_K(vᵢ).
    pub origin_distance: f64,
    /// Atoms whose support number is below the floor.
    pub floored: usize,
}

impl MinkowskiSolution {
    pub fn volume(&self) -> f64 {
        self.body.volume()
    }

    pub fn origin_on_boundary(&self) -> bool {
        self.origin_distance < ORIGIN_BOUNDARY
    }

    /// Max over vertices of |x| divided by min over facets of the offset.
    pub fn asphericity(&self) -> f64 {
        let rmax = self
            .body
            .vertices()
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let rmin = self
            .body
            .facets()
            .iter()
            .map(|f| f.offset)
            .fold(f64::INFINITY, f64::min);
        rmax / rmin
    }
}

struct Wulff {
    poly: Polytope,
    area: Vec<f64>,
    volume: f64,
}

fn wulff(n: usize, dirs: &[Vec<f64>], h: &[f64]) -> Result<Wulff> {
    let poly = Polytope::from_halfspaces(n, dirs, h).map_err(|e| match e {
        Error::Degenerate(ref s) if s.contains("unbounded") => Error::NotSpanning,
        e => e,
    })?;
    let mut area = vec![0.0; h.len()];
    for f in poly.facets() {
        area[f.label] = f.area;
    }
    let volume = poly.volume();
    Ok(Wulff { poly, area, volume })
}

/// ∂Aᵢ/∂hⱼ = R_ij / sin α_ij for adjacent facets, −Σ R_ij cot α_ij on the
/// diagonal, where R_ij is the measure of the shared ridge.
fn area_hessian(w: &Wulff, dirs: &[Vec<f64>]) -> DMatrix<f64> {
    let m = dirs.len();
    let mut hs = DMatrix::zeros(m, m);
    let facets = w.poly.facets();
    for r in w.poly.ridges() {
        let (i, j) = (facets[r.facets.0].label, facets[r.facets.1].label);
        let c: f64 = dirs[i].iter().zip(&dirs[j]).map(|(a, b)| a * b).sum();
        let s = (1.0 - c * c).max(0.0).sqrt();
        if s < 1e-14 {
            continue;
        }
        hs[(i, j)] += r.measure / s;
        hs[(j, i)] += r.measure / s;
        hs[(i, i)] -= r.measure * c / s;
        hs[(j, j)] -= r.measure * c / s;
    }
    hs
}

fn merged_atoms(nu: &SphericalMeasure) -> Result<SphericalMeasure> {
    let dirs: Vec<Vec<f64>> = nu.directions().map(|v| v.to_vec()).collect();
    let keep: Vec<usize> = (0..nu.len()).filter(|&i| nu.weights()[i] > 0.0).collect();
    let d: Vec<Vec<f64>> = keep.iter().map(|&i| dirs[i].clone()).collect();
    let w: Vec<f64> = keep.iter().map(|&i| nu.weights()[i]).collect();
    SphericalMeasure::new(nu.dim(), &d, &w)
}

pub fn solve_lp_minkowski(nu: &SphericalMeasure, p: f64) -> Result<MinkowskiSolution> {
    solve_lp_minkowski_with(nu, p, &SolverOptions::default())
}

/// Damped Newton iteration on the KKT system of min Σ wᵢ hᵢ^p, vol = 1.
/// For p = 1 the translation freedom is removed by Σ hᵢ vᵢ = 0; the matching
/// multiplier absorbs any imbalance Σ wᵢ vᵢ ≠ 0, which then shows up in the
/// residual.
pub fn solve_lp_minkowski_with(
    nu: &SphericalMeasure,
    p: f64,
    opts: &SolverOptions,
) -> Result<MinkowskiSolution> {
    check_p(p)?;
    let n = nu.dim();
    if !(1..=3).contains(&n) {
        return Err(Error::Unsupported(format!("Minkowski problem in dimension {n}")));
    }
    let nu = merged_atoms(nu)?;
    let dirs: Vec<Vec<f64>> = nu.directions().map(|v| v.to_vec()).collect();
    let w = nu.weights().to_vec();
    let na = dirs.len();
    if na <= n {
        return Err(Error::NotSpanning);
    }
    let linear = p == 1.0;
    let nc = if linear { n } else { 0 };
    let size = na + 1 + nc;
    let mass: f64 = w.iter().sum();

    let mut h = vec![1.0; na];
    let first = wulff(n, &dirs, &h)?;
    if first.poly.facets().len() != na {
        return Err(Error::Degenerate("initial Wulff shape misses facets".into()));
    }
    let s0 = first.volume.powf(-1.0 / n as f64);
    h.iter_mut().for_each(|x| *x *= s0);
    let mut cur = wulff(n, &dirs, &h)?;
    let mut lam = {
        let num: f64 = (0..na).map(|i| grad_term(p, w[i], h[i]) * cur.area[i]).sum();
        let den: f64 = cur.area.iter().map(|a| a * a).sum();
        num / den
    };
    let mut mu = vec![0.0; nc];

    let kkt = |h: &[f64], lam: f64, mu: &[f64], wf: &Wulff| -> DVector<f64> {
        let mut r = DVector::zeros(size);
        for i in 0..na {
            let mut v = grad_term(p, w[i], h[i]) - lam * wf.area[i];
            for k in 0..nc {
                v += mu[k] * dirs[i][k];
            }
            r[i] = v;
        }
        r[na] = wf.volume - 1.0;
        for k in 0..nc {
            r[na + 1 + k] = (0..na).map(|i| h[i] * dirs[i][k]).sum();
        }
        r
    };

    let target = opts.tol * (1.0 + mass);
    let mut res = kkt(&h, lam, &mu, &cur);
    let mut iterations = 0;
    while res.norm() > target {
        if iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: res.norm(),
            });
        }
        iterations += 1;
        let ha = area_hessian(&cur, &dirs);
        let mut jac = DMatrix::zeros(size, size);
        for i in 0..na {
            for j in 0..na {
                jac[(i, j)] = -lam * ha[(i, j)];
            }
            jac[(i, i)] += hess_term(p, w[i], h[i]);
            jac[(i, na)] = -cur.area[i];
            jac[(na, i)] = cur.area[i];
            for k in 0..nc {
                jac[(i, na + 1 + k)] = dirs[i][k];
                jac[(na + 1 + k, i)] = dirs[i][k];
            }
        }
        if !linear {
            // columns for sᵢ = ln hᵢ
            for j in 0..na {
                for i in 0..size {
                    jac[(i, j)] *= h[j];
                }
            }
        }
        let step = jac
            .lu()
            .solve(&(-&res))
            .ok_or_else(|| Error::Degenerate("singular Newton system".into()))?;
        let mut t = 1.0;
        let mut accepted = false;
        let mut slow = false;
        for _ in 0..60 {
            let hn: Vec<f64> = if linear {
                (0..na).map(|i| h[i] + t * step[i]).collect()
            } else {
                (0..na)
                    .map(|i| (h[i].ln() + t * step[i]).max(LOG_FLOOR).exp())
                    .collect()
            };
            if let Ok(wn) = wulff(n, &dirs, &hn) {
                if wn.poly.facets().len() == na {
                    let ln = lam + t * step[na];
                    let mn: Vec<f64> = (0..nc).map(|k| mu[k] + t * step[na + 1 + k]).collect();
                    let rn = kkt(&hn, ln, &mn, &wn);
                    if rn.norm() < (1.0 - 1e-4 * t) * res.norm() {
                        slow = rn.norm() > 0.5 * res.norm();
                        h = hn;
                        lam = ln;
                        mu = mn;
                        cur = wn;
                        res = rn;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if accepted && slow && res.norm() <= opts.stall * (1.0 + mass) {
            break;
        }
        if !accepted {
            if res.norm() <= opts.stall * (1.0 + mass) {
                break;
            }
            return Err(Error::NoConvergence {
                iterations,
                residual: res.norm(),
            });
        }
    }
    if !(lam > 0.0) {
        return Err(Error::Degenerate("non-positive volume multiplier".into()));
    }
    let s = (p / lam).powf(1.0 / p);
    let hk: Vec<f64> = h.iter().map(|x| x * s).collect();
    let k = wulff(n, &dirs, &hk)?;
    finish(k, nu, p, iterations, &hk, opts.floor * s)
}

/// Smallest ln h reachable by the log-variable iteration.
const LOG_FLOOR: f64 = -690.0;

fn grad_term(p: f64, w: f64, h: f64) -> f64 {
    if p == 1.0 {
        w
    } else {
        p * w * h.max(0.0).powf(p - 1.0)
    }
}

fn hess_term(p: f64, w: f64, h: f64) -> f64 {
    if p == 1.0 {
        0.0
    } else {
        p * (p - 1.0) * w * h.max(1e-300).powf(p - 2.0)
    }
}

fn finish(
    k: Wulff,
    nu: SphericalMeasure,
    p: f64,
    iterations: usize,
    h: &[f64],
    floor: f64,
) -> Result<MinkowskiSolution> {
    let n = nu.dim();
    // every atom carries a facet, so hᵢ is h_K(vᵢ) exactly; recomputing it
    // from the vertices loses everything below the rounding scale
    let support: Vec<f64> = if p == 1.0 {
        nu.directions().map(|v| k.poly.support(v)).collect()
    } else {
        h.to_vec()
    };
    let mut residual: f64 = 0.0;
    let mut total = 0.0;
    for (i, w) in nu.weights().iter().enumerate() {
        let hp1 = if p == 1.0 {
            1.0
        } else {
            support[i].max(0.0).powf(p - 1.0)
        };
        residual = residual.max((k.volume * hp1 * w - k.area[i]).abs());
        total += w * support[i].max(0.0).powf(p);
    }
    let origin_distance = support.iter().cloned().fold(f64::INFINITY, f64::min);
    let floored = support.iter().filter(|h| **h <= floor * (1.0 + 1e-9)).count();
    Ok(MinkowskiSolution {
        body: k.poly,
        areas: k.area,
        measure: nu,
        p,
        support,
        residual,
        normalization_defect: (1.0 - total / n as f64).abs(),
        iterations,
        origin_distance,
        floored,
    })
}

/// Default band width 2·(cell diameter)·max|∇f|.
pub fn default_band(f: &GridFunction) -> f64 {
    let g = f.abs().gradient();
    let gmax = (0..g.len()).map(|k| g.norm_at(k)).fold(0.0, f64::max);
    let h = f.grid().spacing();
    2.0 * h * (f.dim() as f64).sqrt() * gmax
}

pub fn level_set_measure(
    f: &GridFunction,
    t: f64,
    p: f64,
    settings: &Settings,
) -> Result<SphericalMeasure> {
    level_set_measure_band(f, t, p, default_band(f), settings)
}

/// ν_t from the coarea formula: cells with s = |f| − t in (−Δ/2, Δ/2)
/// contribute |∇f|^p·cellvol·k(s) at the outer normal −∇|f|/|∇|f|| of
/// {|f| ≥ t}, with the unit-mass tent k(s) = (2/Δ)(1 − 2|s|/Δ). Atoms are
/// binned, each bin sitting at the weighted mean of its directions.
pub fn level_set_measure_band(
    f: &GridFunction,
    t: f64,
    p: f64,
    delta: f64,
    settings: &Settings,
) -> Result<SphericalMeasure> {
    check_p(p)?;
    let n = f.dim();
    let top = f.max_abs();
    if !(t > 0.0 && t < top) {
        return invalid(format!("level t = {t} must lie in (0, {top})"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return invalid("band width must be positive");
    }
    let g = f.abs();
    let grad = g.gradient();
    let cv = f.grid().cell_volume();
    let count = match n {
        1 => 2,
        2 => settings.direction_bins[0],
        _ => settings.direction_bins[1],
    };
    let bins = DirectionBins::new(n, count)?;
    let mut mass = vec![0.0; bins.count()];
    let mut mean = vec![0.0; bins.count() * n];
    let mut hits = 0usize;
    for (k, v) in g.values().iter().enumerate() {
        let tent = 1.0 - 2.0 * (v - t).abs() / delta;
        if tent <= 0.0 {
            continue;
        }
        let r = grad.norm_at(k);
        if r < 1e-12 {
            continue;
        }
        let u: Vec<f64> = grad.at(k).iter().map(|x| -x / r).collect();
        let wgt = r.powf(p) * cv * 2.0 * tent / delta;
        let b = bins.index(&u);
        mass[b] += wgt;
        for i in 0..n {
            mean[b * n + i] += wgt * u[i];
        }
        hits += 1;
    }
    if hits == 0 {
        return Err(Error::Degenerate(format!("level-set band at t = {t} is empty")));
    }
    let mut dirs = Vec::new();
    let mut ws = Vec::new();
    for b in 0..bins.count() {
        if mass[b] > 0.0 {
            let d = &mean[b * n..(b + 1) * n];
            let r = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r > 0.0 {
                dirs.extend(d.iter().map(|x| x / r));
                ws.push(mass[b]);
            }
        }
    }
    SphericalMeasure::from_atoms(n, dirs, ws)
}

/// Masses of a planar measure in `sectors` equal angular sectors, the first
/// centred on the positive x-axis.
pub fn sector_masses(nu: &SphericalMeasure, sectors: usize) -> Result<Vec<f64>> {
    if nu.dim() != 2 || sectors == 0 {
        return invalid("sector masses need a planar measure and at least one sector");
    }
    let mut out = vec![0.0; sectors];
    for (v, w) in nu.directions().zip(nu.weights()) {
        let a = (v[1].atan2(v[0]) + PI / sectors as f64).rem_euclid(2.0 * PI);
        let k = ((a / (2.0 * PI) * sectors as f64) as usize).min(sectors - 1);
        out[k] += w;
    }
    Ok(out)
}

/// ⟨f⟩_{t,p}: the Minkowski solution for the level-set measure ν_t.
pub fn asymmetric_convexification(
    f: &GridFunction,
    t: f64,
    p: f64,
    settings: &Settings,
) -> Result<MinkowskiSolution> {
    solve_lp_minkowski(&level_set_measure(f, t, p, settings)?, p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    /// vol_{nm}(Π°_{p,Q} ν).
    pub lhs: f64,
    /// vol_{nm}(Π°_{p,Q} B)·vol(B)^{nm/p − m}·vol(K)^m.
    pub rhs: f64,
    pub solution: MinkowskiSolution,
}

impl LemmaCheck {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + tol)
    }
}

/// vol_{nm}(Π°_{p,Q} B) recovered from the cached d_{n,p}(Q).
pub fn polar_projection_volume_ball(
    n: usize,
    m: usize,
    p: f64,
    q: &QBody,
    settings: &Settings,
) -> Result<f64> {
    let d = dnp_constant(n, m, p, q, settings)?;
    let nm = (n * m) as f64;
    let base = n as f64 * ball_volume(n as f64);
    Ok((d / base.powf(1.0 / p)).powf(nm) / nm)
}

/// Compares vol(Π°ν) with the bound coming from the Minkowski solution K of ν.
pub fn verify_lemma_body(
    nu: &SphericalMeasure,
    p: f64,
    q: &QBody,
    settings: &Settings,
) -> Result<LemmaCheck> {
    let (n, m) = (nu.dim(), q.dim());
    let body = projection_body_of_measure(nu, q, p, settings)?;
    let lhs = polar_projection_volume(&body, settings)?;
    let solution = solve_lp_minkowski(nu, p)?;
    let nm = (n * m) as f64;
    let rhs = polar_projection_volume_ball(n, m, p, q, settings)?
        * ball_volume(n as f64).powf(nm / p - m as f64)
        * solution.volume().powi(m as i32);
    Ok(LemmaCheck { lhs, rhs, solution })
}

/// Terms of E_p^p(Q,f) ≥ nω_n vol(Π°B)^{p/nm} ∫ vol(Π°ν_t)^{-p/nm} dt
/// ≥ nω_n^{p/n} ∫ vol(⟨f⟩_{t,p})^{-p/n} dt, the t-integrals by the
/// midpoint rule on `levels` levels in (0, max|f|).
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetChain {
    pub energy_p: f64,
    pub middle: f64,
    pub lower: f64,
}

pub fn level_set_chain(
    f: &GridFunction,
    q: &QBody,
    p: f64,
    levels: usize,
    settings: &Settings,
) -> Result<LevelSetChain> {
    if levels == 0 {
        return invalid("need at least one level");
    }
    let (n, m) = (f.dim(), q.dim());
    let nm = (n * m) as f64;
    let omega = ball_volume(n as f64);
    let top = f.max_abs();
    let dt = top / levels as f64;
    let band = default_band(f);
    let mut mid = 0.0;
    let mut low = 0.0;
    for k in 0..levels {
        let t = (k as f64 + 0.5) * dt;
        let nu = level_set_measure_band(f, t, p, band, settings)?;
        let body = projection_body_of_measure(&nu, q, p, settings)?;
        mid += polar_projection_volume(&body, settings)?.powf(-p / nm) * dt;
        let k = solve_lp_minkowski(&nu, p)?;
        low += k.volume().powf(-p / n as f64) * dt;
    }
    let pb = polar_projection_volume_ball(n, m, p, q, settings)?;
    let e = crate::functional::energy(f, q, p, settings)?;
    Ok(LevelSetChain {
        energy_p: e.powf(p),
        middle: n as f64 * omega * pb.powf(p / nm) * mid,
        lower: n as f64 * omega.powf(p / n as f64) * low,
    })
}

/// σ_{B,p} = σ_B on the default sphere grid.
pub fn ball_measure(n: usize, settings: &Settings) -> Result<SphericalMeasure> {
    Ellipsoid::ball(n, 1.0)?.surface_measure(&*settings.sphere(n)?)
}

/// Ball K of vol(K) h_K^{p-1} σ_B = σ_K: radius ω_n^{-1/p}.
pub fn ball_solution_radius(n: usize, p: f64) -> f64 {
    ball_volume(n as f64).powf(-1.0 / p)
}

/// The body as a ConvexBody.
pub fn solution_body(s: &MinkowskiSolution) -> ConvexBody {
    ConvexBody::Polytope(s.body.clone())
}
