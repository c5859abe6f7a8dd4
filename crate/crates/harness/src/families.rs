//! Seeded families of non-radial test functions.

use std::f64::consts::PI;
use std::sync::Arc;

use affiq_core::bodies::Polytope;
use affiq_core::Result;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::extremals::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BumpKind {
    EllipseCone,
    Cap,
    PolygonCone,
}

struct Bump {
    kind: BumpKind,
    centre: [f64; 2],
    /// x ↦ M(x − c) maps the bump's support into the unit disk.
    map: [[f64; 2]; 2],
    polygon: Option<Polytope>,
    amplitude: f64,
}

impl Bump {
    fn eval(&self, x: &[f64]) -> f64 {
        let d = [x[0] - self.centre[0], x[1] - self.centre[1]];
        let y = [
            self.map[0][0] * d[0] + self.map[0][1] * d[1],
            self.map[1][0] * d[0] + self.map[1][1] * d[1],
        ];
        let t = match self.kind {
            BumpKind::EllipseCone => {
                1.0 - (y[0] * y[0] + y[1] * y[1]).sqrt()
            }
            BumpKind::Cap => {
                let s = 1.0 - (y[0] * y[0] + y[1] * y[1]);
                if s <= 0.0 {
                    return 0.0;
                }
                return self.amplitude * s * s;
            }
            BumpKind::PolygonCone => {
                let g = self
                    .polygon
                    .as_ref()
                    .and_then(|p| p.gauge(&d).ok())
                    .unwrap_or(f64::INFINITY);
                1.0 - g
            }
        };
        self.amplitude * t.max(0.0)
    }
}

fn rotation(a: f64) -> [[f64; 2]; 2] {
    let (s, c) = a.sin_cos();
    [[c, -s], [s, c]]
}

fn random_bump(rng: &mut ChaCha8Rng, centre_radius: f64, size: (f64, f64)) -> Result<Bump> {
    let kind = match rng.random_range(0..3) {
        0 => BumpKind::EllipseCone,
        1 => BumpKind::Cap,
        _ => BumpKind::PolygonCone,
    };
    let r = centre_radius * rng.random::<f64>().sqrt();
    let a = rng.random_range(0.0..2.0 * PI);
    let centre = [r * a.cos(), r * a.sin()];
    let (ax, ay) = (rng.random_range(size.0..size.1), rng.random_range(size.0..size.1));
    let rot = rotation(rng.random_range(0.0..PI));
    // M = diag(1/ax, 1/ay)·Rᵗ
    let map = [
        [rot[0][0] / ax, rot[1][0] / ax],
        [rot[0][1] / ay, rot[1][1] / ay],
    ];
    let polygon = if kind == BumpKind::PolygonCone {
        let k = rng.random_range(5..8);
        let pts: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + rng.random_range(-0.3..0.3)) / k as f64;
                let rad = rng.random_range(size.0..size.1);
                vec![rad * t.cos(), rad * t.sin()]
            })
            .collect();
        Some(Polytope::from_points(2, &pts)?)
    } else {
        None
    };
    Ok(Bump {
        kind,
        centre,
        map,
        polygon,
        amplitude: rng.random_range(0.5..1.5),
    })
}

/// `count` sums of one to three bumps (elliptic cones, quartic caps and
/// polygonal cones) on R², drawn from `seed`. Supports stay within radius
/// `shrink`.
pub fn nonradial_family(seed: u64, count: usize, shrink: f64) -> Result<Vec<Profile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let k = rng.random_range(1..4);
        let bumps: Vec<Bump> = (0..k)
            .map(|_| random_bump(&mut rng, 0.3, (0.35, 0.7)))
            .collect::<Result<_>>()?;
        let s = shrink;
        let id = if s == 1.0 {
            format!("fam{seed}-{i:02}")
        } else {
            format!("fam{seed}x{s}-{i:02}")
        };
        let eval = Arc::new(move |x: &[f64]| {
            let y = [x[0] / s, x[1] / s];
            bumps.iter().map(|b| b.eval(&y)).sum()
        });
        out.push(Profile::new(id, 2, s, eval));
    }
    Ok(out)
}

/// Sums of one or two ellipsoidal caps in R³ with supports inside the unit
/// ball.
pub fn nonradial_family_3d(seed: u64, count: usize) -> Result<Vec<Profile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let k = rng.random_range(1..3);
        let mut caps: Vec<(DMatrix<f64>, [f64; 3], f64)> = Vec::new();
        for _ in 0..k {
            let g = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
            let q = g.qr().q();
            let axes = [
                rng.random_range(0.35..0.6),
                rng.random_range(0.35..0.6),
                rng.random_range(0.35..0.6),
            ];
            let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, axes.iter().map(|a| 1.0 / a)))
                * q.transpose();
            let c = [
                rng.random_range(-0.25..0.25),
                rng.random_range(-0.25..0.25),
                rng.random_range(-0.25..0.25),
            ];
            caps.push((m, c, rng.random_range(0.5..1.5)));
        }
        let eval = Arc::new(move |x: &[f64]| {
            caps.iter()
                .map(|(m, c, a)| {
                    let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
                    let r2: f64 = (0..3)
                        .map(|r| (0..3).map(|j| m[(r, j)] * d[j]).sum::<f64>().powi(2))
                        .sum();
                    let s = (1.0 - r2).max(0.0);
                    a * s * s
                })
                .sum()
        });
        out.push(Profile::new(format!("fam3d{seed}-{i:02}"), 3, 1.0, eval));
    }
    Ok(out)
}

/// Quartic caps (1 − |M(x − c)|²)²₊ whose elliptic supports lie inside Ω.
pub fn bumps_in_domain(omega: &Polytope, seed: u64, count: usize) -> Result<Vec<Profile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let reach = omega
        .vertices()
        .iter()
        .map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    while out.len() < count {
        let c = [rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7)];
        let (ax, ay) = (rng.random_range(0.12..0.4), rng.random_range(0.12..0.4));
        let rot = rotation(rng.random_range(0.0..PI));
        let amp = rng.random_range(0.5..1.5);
        let inside = (0..64).all(|k| {
            let t = 2.0 * PI * k as f64 / 64.0;
            let (u, v) = (ax * t.cos(), ay * t.sin());
            let x = [c[0] + rot[0][0] * u + rot[0][1] * v, c[1] + rot[1][0] * u + rot[1][1] * v];
            omega.gauge(&x).map(|g| g < 0.97).unwrap_or(false)
        });
        if !inside {
            continue;
        }
        let map = [
            [rot[0][0] / ax, rot[1][0] / ax],
            [rot[0][1] / ay, rot[1][1] / ay],
        ];
        let bump = Bump {
            kind: BumpKind::Cap,
            centre: c,
            map,
            polygon: None,
            amplitude: amp,
        };
        let i = out.len();
        out.push(Profile::new(
            format!("omega{seed}-{i:02}"),
            2,
            reach,
            Arc::new(move |x: &[f64]| bump.eval(x)),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use affiq_core::quadrature::box_grid;

    #[test]
    fn family_is_seeded_and_fits_the_box() {
        let grid = box_grid(2, 1.25, 129).unwrap();
        let a = nonradial_family(7, 6, 1.0).unwrap();
        let b = nonradial_family(7, 6, 1.0).unwrap();
        for (f, g) in a.iter().zip(&b) {
            let (sf, sg) = (f.sample(&grid).unwrap(), g.sample(&grid).unwrap());
            assert_eq!(sf.values(), sg.values());
            assert!(sf.max_abs() > 0.0);
        }
        let c = nonradial_family(8, 6, 1.0).unwrap();
        assert_ne!(
            a[0].sample(&grid).unwrap().values(),
            c[0].sample(&grid).unwrap().values()
        );
    }

    #[test]
    fn domain_bumps_vanish_outside_omega() {
        let omega = Polytope::from_points(
            2,
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
        )
        .unwrap();
        let grid = box_grid(2, 1.25, 129).unwrap();
        for f in bumps_in_domain(&omega, 3, 5).unwrap() {
            let s = f.sample(&grid).unwrap();
            for (k, v) in s.values().iter().enumerate() {
                let x = grid.center(k);
                if *v != 0.0 {
                    assert!(omega.gauge(&x[..2]).unwrap() < 1.0);
                }
            }
        }
    }
}
