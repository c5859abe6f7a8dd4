//! Sharp constants: a_{n,p} (Sobolev), b_{n,p} (Morrey), c_{n,p}
//! (log-Sobolev), the Gagliardo–Nirenberg family, Nash's β_n through the
//! radial Neumann eigenvalue λ_n, and a lower estimate for the
//! Moser–Trudinger constant m_n.

use std::f64::consts::{E, PI};
use std::fmt;

use crate::error::{invalid, Result};
use crate::optimize::golden_section;
use crate::quadrature::gauss_legendre;
use crate::special::{ball_volume, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Ode,
    Estimate,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "CLOSED-FORM",
            Provenance::Ode => "ODE",
            Provenance::Estimate => "ESTIMATE",
        })
    }
}

fn check_n(n: usize) -> Result<f64> {
    if n == 0 {
        return invalid("dimension must be positive");
    }
    Ok(n as f64)
}

/// a_{n,p} for 1 ≤ p < n; a_{n,1} = nω_n^{1/n} is the p → 1⁺ limit.
pub fn sobolev_constant(n: usize, p: f64) -> Result<f64> {
    let nf = check_n(n)?;
    if !(p >= 1.0 && p < nf) {
        return invalid(format!("a_(n,p) needs 1 <= p < n, got n={n}, p={p}"));
    }
    if p == 1.0 {
        return Ok(nf * ball_volume(nf).powf(1.0 / nf));
    }
    let bracket = ball_volume(nf).ln() - ln_gamma(nf) + ln_gamma(nf / p) + ln_gamma(nf + 1.0 - nf / p);
    Ok(nf.powf(1.0 / p) * ((nf - p) / (p - 1.0)).powf((p - 1.0) / p) * (bracket / nf).exp())
}

/// b_{n,p} = n^{-1/p} ω_n^{-1/n} ((p−1)/(p−n))^{(p−1)/p} for p > n.
pub fn morrey_constant(n: usize, p: f64) -> Result<f64> {
    let nf = check_n(n)?;
    if !(p > nf && p.is_finite()) {
        return invalid(format!("b_(n,p) needs p > n, got n={n}, p={p}"));
    }
    Ok(nf.powf(-1.0 / p)
        * ball_volume(nf).powf(-1.0 / nf)
        * ((p - 1.0) / (p - nf)).powf((p - 1.0) / p))
}

/// c_{n,p}; c_{n,1} = ω_n^{-1/n}/n is the p → 1⁺ limit. The formula is
/// evaluated for every p ≥ 1 so that the Gaussian case p = 2 is available
/// in the plane.
pub fn logsobolev_constant(n: usize, p: f64) -> Result<f64> {
    let nf = check_n(n)?;
    if !(p >= 1.0 && p.is_finite()) {
        return invalid(format!("c_(n,p) needs p >= 1, got {p}"));
    }
    if p == 1.0 {
        return Ok(ball_volume(nf).powf(-1.0 / nf) / nf);
    }
    let lg = ln_gamma(1.0 + nf / 2.0) - 0.5 * nf * PI.ln() - ln_gamma(1.0 + nf * (p - 1.0) / p);
    Ok((p / nf).powf(1.0 / p) * ((p - 1.0) / E).powf(1.0 - 1.0 / p) * (lg / nf).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GNParameters {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub theta: f64,
    pub delta: f64,
    pub alpha: f64,
}

impl GNParameters {
    /// Upper end p(n−1)/(n−p) of the admissible q range.
    pub fn q_max(n: usize, p: f64) -> f64 {
        let nf = n as f64;
        p * (nf - 1.0) / (nf - p)
    }
}

/// r = p(q−1)/(p−1), θ = n(q−p)/((q−1)(np−(n−p)q)), δ = np − q(n−p) and
/// the sharp constant α_{n,p}(r,q).
pub fn gn_parameters(n: usize, p: f64, q: f64) -> Result<GNParameters> {
    let nf = check_n(n)?;
    if !(p > 1.0 && p < nf) {
        return invalid(format!("Gagliardo-Nirenberg needs 1 < p < n, got n={n}, p={p}"));
    }
    let qmax = GNParameters::q_max(n, p);
    if !(q > p && q <= qmax * (1.0 + 1e-12)) {
        return invalid(format!("q must lie in ({p}, {qmax}], got {q}"));
    }
    let r = p * (q - 1.0) / (p - 1.0);
    let delta = nf * p - q * (nf - p);
    let theta = nf * (q - p) / ((q - 1.0) * delta);
    let lg = ln_gamma(delta * (p - 1.0) / (p * (q - p))) + ln_gamma(1.0 + nf * (p - 1.0) / p)
        - ln_gamma(q * (p - 1.0) / (q - p))
        - ln_gamma(1.0 + nf / 2.0);
    let inner = (p * PI.sqrt() / (q - p))
        * (nf * (q - p) / (p * q)).powf(1.0 / p)
        * (lg / nf).exp();
    let alpha = (p * q / delta).powf(1.0 / r) * inner.powf(theta);
    Ok(GNParameters {
        n,
        p,
        q,
        r,
        theta,
        delta,
        alpha,
    })
}

/// u'' + (n−1)u'/r + λu = 0 on (0, 1] with u(0) = 1, u'(0) = 0, by RK4 from
/// a series start at r₀ = h/4. Returns (u, u') at every grid node.
fn shoot(n: f64, lambda: f64, steps: usize) -> Vec<(f64, f64, f64)> {
    let r0 = 0.25 / steps as f64;
    let l = lambda;
    let mut u = 1.0 - l * r0 * r0 / (2.0 * n) + l * l * r0.powi(4) / (8.0 * n * (n + 2.0));
    let mut du = -l * r0 / n + l * l * r0.powi(3) / (2.0 * n * (n + 2.0));
    let h = (1.0 - r0) / steps as f64;
    let rhs = |r: f64, u: f64, du: f64| (du, -(n - 1.0) * du / r - l * u);
    let mut out = Vec::with_capacity(steps + 1);
    let mut r = r0;
    out.push((r, u, du));
    for _ in 0..steps {
        let k1 = rhs(r, u, du);
        let k2 = rhs(r + h / 2.0, u + h / 2.0 * k1.0, du + h / 2.0 * k1.1);
        let k3 = rhs(r + h / 2.0, u + h / 2.0 * k2.0, du + h / 2.0 * k2.1);
        let k4 = rhs(r + h, u + h * k3.0, du + h * k3.1);
        u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        du += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        r += h;
        out.push((r, u, du));
    }
    out
}

pub const NASH_STEPS: usize = 2000;

/// First nonzero Neumann eigenvalue of −Δ on radial functions of the unit
/// ball, by shooting on u'(1) = 0 with bisection in λ ∈ (1, 40).
pub fn neumann_eigenvalue(n: usize, steps: usize) -> Result<f64> {
    let nf = check_n(n)?;
    if n < 2 || steps < 10 {
        return invalid("Neumann eigenvalue needs n >= 2 and at least 10 steps");
    }
    let end = |l: f64| shoot(nf, l, steps).last().unwrap().2;
    let (mut lo, mut hi) = (1.0, 40.0);
    let flo = end(lo);
    if flo * end(hi) > 0.0 {
        return invalid(format!("no sign change of u'(1) for n={n}"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if end(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// β_n² = 2(1 + n/2)^{1+n/2} / (n λ_n ω_n^{2/n}), n ∈ {2, 3}.
pub fn nash_constant(n: usize) -> Result<f64> {
    nash_constant_steps(n, NASH_STEPS)
}

pub fn nash_constant_steps(n: usize, steps: usize) -> Result<f64> {
    if !(2..=3).contains(&n) {
        return invalid(format!("Nash constant is provided for n = 2, 3, got {n}"));
    }
    let nf = n as f64;
    let lambda = neumann_eigenvalue(n, steps)?;
    let b2 = 2.0 * (1.0 + nf / 2.0).powf(1.0 + nf / 2.0)
        / (nf * lambda * ball_volume(nf).powf(2.0 / nf));
    Ok(b2.sqrt())
}

/// Radial Neumann eigenfunction u (u(0) = 1) on [0, 1], tabulated by the
/// shooting integrator and evaluated by cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct NeumannProfile {
    pub lambda: f64,
    n: f64,
    nodes: Vec<(f64, f64, f64)>,
}

impl NeumannProfile {
    pub fn new(n: usize) -> Result<Self> {
        let lambda = neumann_eigenvalue(n, NASH_STEPS)?;
        Ok(NeumannProfile {
            lambda,
            n: n as f64,
            nodes: shoot(n as f64, lambda, NASH_STEPS),
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let first = self.nodes[0];
        if r <= first.0 {
            return 1.0 - self.lambda * r * r / (2.0 * self.n);
        }
        let last = self.nodes.len() - 1;
        let h = self.nodes[1].0 - first.0;
        let k = (((r - first.0) / h) as usize).min(last - 1);
        let (r0, u0, d0) = self.nodes[k];
        let (_, u1, d1) = self.nodes[k + 1];
        let s = ((r - r0) / h).clamp(0.0, 1.0);
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * u0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * u1
            + (s3 - s2) * h * d1
    }
}

/// One member φ' = c(t + a)^{-β} on [0, T], zero afterwards, with c fixed
/// by ∫φ'^n = 1; parameters (ln a, β, ln T).
fn mt_value(n: f64, params: [f64; 3]) -> f64 {
    let (a, beta, t_end) = (params[0].exp(), params[1], params[2].exp());
    let nb = n * beta;
    let mass = if (1.0 - nb).abs() < 1e-12 {
        ((t_end + a) / a).ln()
    } else {
        ((t_end + a).powf(1.0 - nb) - a.powf(1.0 - nb)) / (1.0 - nb)
    };
    let c = mass.powf(-1.0 / n);
    let phi = |t: f64| {
        if (1.0 - beta).abs() < 1e-12 {
            c * ((t + a) / a).ln()
        } else {
            c * ((t + a).powf(1.0 - beta) - a.powf(1.0 - beta)) / (1.0 - beta)
        }
    };
    let ex = n / (n - 1.0);
    let (x, w) = gauss_legendre(8);
    let panels = ((4.0 * t_end).ceil() as usize).max(64);
    let h = t_end / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let t = mid + 0.5 * h * xi;
            s += 0.5 * h * wi * (phi(t).powf(ex) - t).exp();
        }
    }
    s + (phi(t_end).powf(ex) - t_end).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoserTrudingerEstimate {
    pub value: f64,
    /// (a, β, T) of the best profile.
    pub profile: [f64; 3],
    pub label: Provenance,
}

const MT_BOUNDS: [(f64, f64); 3] = [(-8.0, 6.0), (-0.5, 0.95), (-3.0, 6.0)];

/// Lower estimate for m_n = sup ∫₀^∞ e^{φ^{n/(n−1)} − t} dt by cyclic
/// golden-section search over the profiles of `mt_value`. `sweeps` cycles
/// over the three parameters with `iters` golden steps each. With
/// `free_beta` false the search stays on β = 0, the truncated linear
/// (Moser) profiles.
pub fn moser_trudinger_search(
    n: usize,
    sweeps: usize,
    iters: usize,
    free_beta: bool,
) -> Result<MoserTrudingerEstimate> {
    let nf = check_n(n)?;
    if n < 2 {
        return invalid("m_n needs n >= 2");
    }
    let mut x = [0.0, 0.0, 1.0f64];
    let mut best = mt_value(nf, x).max(1.0);
    for _ in 0..sweeps {
        for k in 0..3 {
            if k == 1 && !free_beta {
                continue;
            }
            let (lo, hi) = MT_BOUNDS[k];
            let (arg, val) = golden_section(
                |v| {
                    let mut y = x;
                    y[k] = v;
                    -mt_value(nf, y)
                },
                lo,
                hi,
                iters,
            );
            if -val > best {
                best = -val;
                x[k] = arg;
            }
        }
    }
    Ok(MoserTrudingerEstimate {
        value: best,
        profile: [x[0].exp(), x[1], x[2].exp()],
        label: Provenance::Estimate,
    })
}

/// Truncated linear profiles first, then the full family from there, so
/// the estimate is never below the smaller family's.
pub fn moser_trudinger_lower_estimate(n: usize) -> Result<MoserTrudingerEstimate> {
    moser_trudinger_lower_estimate_budget(n, 6, 60)
}

pub fn moser_trudinger_lower_estimate_budget(
    n: usize,
    sweeps: usize,
    iters: usize,
) -> Result<MoserTrudingerEstimate> {
    let base = moser_trudinger_search(n, sweeps, iters, false)?;
    let full = moser_trudinger_search(n, sweeps, iters, true)?;
    Ok(if full.value >= base.value { full } else { base })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRow {
    pub name: String,
    pub value: f64,
    pub label: Provenance,
}

/// The constants defined for (n, p), each with its provenance label.
pub fn constants_table(n: usize, p: f64) -> Result<Vec<ConstantRow>> {
    let nf = check_n(n)?;
    let row = |name: String, value: f64, label| ConstantRow { name, value, label };
    let mut rows = vec![row(format!("omega_{n}"), ball_volume(nf), Provenance::ClosedForm)];
    if p >= 1.0 && p < nf {
        rows.push(row(format!("a_{{{n},{p}}}"), sobolev_constant(n, p)?, Provenance::ClosedForm));
    }
    if p > nf {
        rows.push(row(format!("b_{{{n},{p}}}"), morrey_constant(n, p)?, Provenance::ClosedForm));
    }
    if p >= 1.0 {
        rows.push(row(format!("c_{{{n},{p}}}"), logsobolev_constant(n, p)?, Provenance::ClosedForm));
    }
    if (2..=3).contains(&n) {
        rows.push(row(format!("lambda_{n}"), neumann_eigenvalue(n, NASH_STEPS)?, Provenance::Ode));
        rows.push(row(format!("beta_{n}"), nash_constant(n)?, Provenance::Ode));
    }
    if n >= 2 {
        let mt = moser_trudinger_lower_estimate(n)?;
        rows.push(row(format!("m_{n}"), mt.value, mt.label));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// J₁ by its power series.
    fn bessel_j1(x: f64) -> f64 {
        let mut term = x / 2.0;
        let mut s = term;
        for k in 1..60 {
            term *= -(x * x / 4.0) / (k as f64 * (k as f64 + 1.0));
            s += term;
        }
        s
    }

    fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
        let fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) * fa > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn sobolev_values() {
        assert_relative_eq!(sobolev_constant(2, 1.0).unwrap(), 2.0 * PI.sqrt(), max_relative = 1e-14);
        let a = sobolev_constant(3, 2.0).unwrap();
        // Aubin–Talenti: 1/a_{n,2} = (πn(n−2))^{-1/2}(Γ(n)/Γ(n/2))^{1/n}
        assert_relative_eq!(a, (3.0 * PI).sqrt() * (PI.sqrt() / 4.0).powf(1.0 / 3.0), max_relative = 1e-12);
        assert!((sobolev_constant(3, 2.0 + 1e-8).unwrap() - a).abs() < 1e-6);
        assert!((sobolev_constant(3, 2.0 - 1e-8).unwrap() - a).abs() < 1e-6);
        assert!(sobolev_constant(2, 2.0).is_err());
        assert!(sobolev_constant(2, 3.0).is_err());
    }

    #[test]
    fn sobolev_limit_at_one() {
        // the p → 1⁺ approach is of order ε|ln ε|
        for n in [2usize, 3, 5] {
            let lim = sobolev_constant(n, 1.0).unwrap();
            for e in [1e-4, 1e-6, 1e-8] {
                let v = sobolev_constant(n, 1.0 + e).unwrap();
                assert!((v / lim - 1.0).abs() < 3.0 * e * (1.0 / e).ln() * n as f64, "n={n} e={e}");
            }
        }
    }

    #[test]
    fn sobolev_matches_bliss_extremal_in_3d() {
        // f = (1 + |x|²)^{-1/2} gives equality for n = 3, p = 2
        let rad = |g: &dyn Fn(f64) -> f64| {
            let (x, w) = gauss_legendre(40);
            let mut s = 0.0;
            for k in 0..4000 {
                let (a, b) = (k as f64 * 0.05, (k + 1) as f64 * 0.05);
                for (xi, wi) in x.iter().zip(&w) {
                    let r = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                    s += 0.5 * (b - a) * wi * 4.0 * PI * r * r * g(r);
                }
            }
            s
        };
        let f6 = rad(&|r: f64| (1.0 + r * r).powf(-3.0));
        // tail beyond r = 200: ∫ 4πr⁴(1+r²)^{-3} ≈ 4π/200
        let grad2 = rad(&|r: f64| r * r * (1.0 + r * r).powf(-3.0)) + 4.0 * PI / 200.0;
        let a = sobolev_constant(3, 2.0).unwrap();
        assert_relative_eq!(a * f6.powf(1.0 / 6.0), grad2.sqrt(), max_relative = 2e-4);
    }

    #[test]
    fn morrey_values() {
        assert_relative_eq!(morrey_constant(2, 3.0).unwrap(), 2f64.powf(1.0 / 3.0) / PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(
            morrey_constant(2, 4.0).unwrap(),
            2f64.powf(-0.25) / PI.sqrt() * 1.5f64.powf(0.75),
            max_relative = 1e-14
        );
        assert!(morrey_constant(2, 2.0).is_err());
        assert!(morrey_constant(3, 1.5).is_err());
    }

    #[test]
    fn morrey_equality_for_radial_extremal() {
        // f = 1 − r^{(p−n)/(p−1)}: ‖f‖∞ = 1, |supp| = ω_n
        for (n, p) in [(2usize, 3.0f64), (2, 4.0), (3, 5.0)] {
            let nf = n as f64;
            let g = (p - nf) / (p - 1.0);
            // ∫|∇f|^p = nω_n g^p ∫₀¹ r^{(g−1)p + n − 1} dr
            let e = nf * ball_volume(nf) * g.powf(p) / ((g - 1.0) * p + nf);
            let rhs = morrey_constant(n, p).unwrap() * ball_volume(nf).powf((p / nf - 1.0) / p) * e.powf(1.0 / p);
            assert_relative_eq!(rhs, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn logsobolev_values() {
        let c = logsobolev_constant(2, 2.0).unwrap();
        assert_relative_eq!(c, (1.0 / (E * PI)).sqrt(), max_relative = 1e-12);
        assert!((c - 0.3422).abs() < 1e-4);
        assert_relative_eq!(logsobolev_constant(3, 2.0).unwrap(), (2.0 / (3.0 * E * PI)).sqrt(), max_relative = 1e-12);
        let lim = logsobolev_constant(2, 1.0).unwrap();
        assert_relative_eq!(lim, 0.5 / PI.sqrt(), max_relative = 1e-14);
        for e in [1e-6, 1e-8] {
            let v = logsobolev_constant(2, 1.0 + e).unwrap();
            assert!((v / lim - 1.0).abs() < 3.0 * e * (1.0 / e).ln());
        }
    }

    #[test]
    fn gn_plug_in_and_boundary() {
        let g = gn_parameters(3, 2.0, 2.5).unwrap();
        assert_relative_eq!(g.delta, 3.5, max_relative = 1e-15);
        assert_relative_eq!(g.r, 3.0, max_relative = 1e-15);
        assert!(g.theta > 0.0 && g.theta < 1.0);
        for (n, p) in [(3usize, 2.0f64), (3, 1.5), (4, 2.5), (5, 3.0)] {
            let q = GNParameters::q_max(n, p);
            let g = gn_parameters(n, p, q).unwrap();
            assert_relative_eq!(g.theta, 1.0, max_relative = 1e-12);
            assert_relative_eq!(g.r, n as f64 * p / (n as f64 - p), max_relative = 1e-12);
            assert!((g.alpha - sobolev_constant(n, p).unwrap()).abs() < 1e-6, "n={n} p={p}");
        }
        assert!(gn_parameters(3, 2.0, 2.0).is_err());
        assert!(gn_parameters(3, 2.0, 4.5).is_err());
        assert!(gn_parameters(2, 2.0, 3.0).is_err());
    }

    #[test]
    fn neumann_eigenvalues_match_series_oracles() {
        // n = 2: √λ is the first positive zero of J₁
        let j11 = bisect(bessel_j1, 3.0, 4.5);
        let l2 = neumann_eigenvalue(2, NASH_STEPS).unwrap();
        assert!((l2 - j11 * j11).abs() < 1e-6, "{l2} {}", j11 * j11);
        assert!((l2 - 14.682).abs() < 0.01);
        // n = 3: u = sin(kr)/r, u'(1) = 0 ⇔ tan k = k
        let k = bisect(|k: f64| k.sin() - k * k.cos(), 4.0, 4.6);
        let l3 = neumann_eigenvalue(3, NASH_STEPS).unwrap();
        assert!((l3 - k * k).abs() < 1e-6);
        assert!((l3 - 20.19).abs() < 0.01);
    }

    #[test]
    fn nash_stable_under_step_halving() {
        for n in [2, 3] {
            let a = nash_constant_steps(n, 500).unwrap();
            let b = nash_constant_steps(n, 1000).unwrap();
            assert!(a > 0.0 && (a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn nash_equality_for_the_eigenfunction() {
        // f = u(|x|) − u(1) on the unit disk attains β₂
        let prof = NeumannProfile::new(2).unwrap();
        let u1 = prof.eval(1.0);
        let (x, w) = gauss_legendre(20);
        let (mut l1, mut l2, mut g2) = (0.0, 0.0, 0.0);
        let dr = 1e-6;
        for k in 0..200 {
            let (a, b) = (k as f64 / 200.0, (k + 1) as f64 / 200.0);
            for (xi, wi) in x.iter().zip(&w) {
                let r = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                let f = prof.eval(r) - u1;
                let df = (prof.eval(r + dr) - prof.eval(r - dr)) / (2.0 * dr);
                let m = 0.5 * (b - a) * wi * 2.0 * PI * r;
                l1 += m * f.abs();
                l2 += m * f * f;
                g2 += m * df * df;
            }
        }
        let lhs = l2.sqrt() * (l2.sqrt() / l1);
        assert_relative_eq!(lhs, nash_constant(2).unwrap() * g2.sqrt(), max_relative = 1e-5);
    }

    #[test]
    fn moser_trudinger_estimate() {
        let base = moser_trudinger_search(2, 6, 60, false).unwrap();
        let est = moser_trudinger_lower_estimate(2).unwrap();
        assert!(est.value >= 1.0);
        assert!(est.value >= base.value);
        assert_eq!(est.label, Provenance::Estimate);
        let doubled = moser_trudinger_lower_estimate_budget(2, 12, 120).unwrap();
        assert!((doubled.value / est.value - 1.0).abs() <= 0.01);
    }

    #[test]
    fn table_labels() {
        let t = constants_table(2, 2.0).unwrap();
        let c = t.iter().find(|r| r.name.starts_with("c_")).unwrap();
        assert!((c.value - 0.3422).abs() < 1e-4);
        assert_eq!(c.label.to_string(), "CLOSED-FORM");
        assert!(t.iter().any(|r| r.label == Provenance::Ode));
        assert!(t.iter().any(|r| r.label == Provenance::Estimate));
    }
}
