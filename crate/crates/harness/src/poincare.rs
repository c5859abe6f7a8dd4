//! Widths of the domain and the Poincaré-type ratios of the energy.

use affiq_core::bodies::{ConvexBody, Polytope};
use affiq_core::functional::{energy, lyz_body, GridFunction};
use affiq_core::projection::QBody;
use affiq_core::{Error, Result, Settings};

/// w(Ω, ξ) = h_Ω(ξ) + h_Ω(−ξ) for a unit vector ξ.
pub fn width(omega: &Polytope, xi: &[f64]) -> Result<f64> {
    if xi.len() != omega.dim() {
        return Err(Error::InvalidInput("direction has the wrong dimension".into()));
    }
    let r = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (r - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("direction must be a unit vector, |ξ| = {r}")));
    }
    let neg: Vec<f64> = xi.iter().map(|c| -c).collect();
    Ok(omega.support(xi) + omega.support(&neg))
}

/// Errors unless Q = −Q.
pub fn require_symmetric(q: &QBody) -> Result<()> {
    let poly = q.polytope();
    let symmetric = poly.contains_origin_interior()
        && q.vertices().iter().all(|v| {
            let neg: Vec<f64> = v.iter().map(|c| -c).collect();
            poly.gauge(&neg).map(|g| g <= 1.0 + 1e-9).unwrap_or(false)
        });
    if symmetric {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "Poincaré inequality needs an origin-symmetric Q; '{}' is not",
            q.name()
        )))
    }
}

/// E / (‖f‖_p^{(nm−1)/nm}·‖∇f‖_p^{1/nm}) for a known energy value.
pub fn ratio_from_energy(e: f64, f: &GridFunction, q: &QBody, p: f64) -> f64 {
    let nm = (f.dim() * q.dim()) as f64;
    e / (f.lp_norm(p).powf((nm - 1.0) / nm) * f.dirichlet_norm(p).powf(1.0 / nm))
}

pub fn poincare_ratio(f: &GridFunction, q: &QBody, p: f64, settings: &Settings) -> Result<f64> {
    require_symmetric(q)?;
    Ok(ratio_from_energy(energy(f, q, p, settings)?, f, q, p))
}

/// min over θ of h_{Π_{p,Q} f}(θ) on the default sphere grid.
pub fn lyz_min_support(f: &GridFunction, q: &QBody, p: f64, settings: &Settings) -> Result<f64> {
    match lyz_body(f, q, p, settings)? {
        ConvexBody::SupportSampled(s) => Ok(s.values().iter().copied().fold(f64::INFINITY, f64::min)),
        _ => Err(Error::Degenerate("LYZ body is not sampled".into())),
    }
}

/// ‖∂_ξ f‖_p from the grid gradient.
pub fn directional_norm(f: &GridFunction, xi: &[f64], p: f64) -> f64 {
    let g = f.gradient();
    let s: f64 = g
        .iter()
        .map(|v| v.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>().abs().powf(p))
        .sum();
    (s * f.grid().cell_volume()).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremals::{make_extremal, Extremal, Placement};
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn square() -> Polytope {
        Polytope::from_points(
            2,
            &[vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn widths() {
        let sq = square();
        assert!((width(&sq, &[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!((width(&sq, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
        let r = 0.7;
        let pts: Vec<Vec<f64>> = (0..4096)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 4096.0;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        let disk = Polytope::from_points(2, &pts).unwrap();
        for a in [0.1, 1.0, 2.5] {
            let w = width(&disk, &[f64::cos(a), f64::sin(a)]).unwrap();
            assert!((w - 2.0 * r).abs() < 1e-6);
        }
        assert!(width(&sq, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn ratio_is_scale_free_in_f() {
        let s = Settings::default();
        let grid = s.box_grid(2).unwrap();
        let f = make_extremal(Extremal::Cone, &Placement::default(), &grid).unwrap();
        let q = QBody::preset("segment", 1).unwrap();
        let a = poincare_ratio(&f, &q, 2.0, &s).unwrap();
        let b = poincare_ratio(&f.scaled(2.0), &q, 2.0, &s).unwrap();
        assert!(a > 0.0);
        assert!((a / b - 1.0).abs() < 1e-12);
        assert!(lyz_min_support(&f, &q, 2.0, &s).unwrap() > 0.0);
    }

    #[test]
    fn nonsymmetric_q_is_rejected() {
        let s = Settings::default();
        let grid = s.box_grid(2).unwrap();
        let f = make_extremal(Extremal::Cone, &Placement::default(), &grid).unwrap();
        for name in ["segment+", "square", "simplex2"] {
            let q = QBody::preset(name, 1).unwrap();
            let err = poincare_ratio(&f, &q, 1.0, &s).unwrap_err();
            assert!(err.to_string().contains("origin-symmetric"), "{err}");
        }
        assert!(require_symmetric(&QBody::preset("segment", 2).unwrap()).is_ok());
    }
}
