//! Dense tableau simplex for small linear programs
//! max cᵗz subject to Az ≤ b, z ≥ 0, with b ≥ 0.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, z: Vec<f64> },
    Unbounded,
}

const EPS: f64 = 1e-12;

/// Solves with Bland's anticycling rule from the slack basis.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome> {
    let nv = c.len();
    let nr = a.len();
    if b.len() != nr || a.iter().any(|r| r.len() != nv) {
        return invalid("LP dimensions are inconsistent");
    }
    if b.iter().any(|x| !(*x >= -EPS)) {
        return invalid("LP right-hand side must be nonnegative");
    }
    let width = nv + nr + 1;
    let mut t = vec![0.0; (nr + 1) * width];
    for (i, row) in a.iter().enumerate() {
        let r = &mut t[i * width..(i + 1) * width];
        r[..nv].copy_from_slice(row);
        r[nv + i] = 1.0;
        r[width - 1] = b[i].max(0.0);
    }
    // objective row holds -c so that negative entries can improve
    {
        let r = &mut t[nr * width..];
        for j in 0..nv {
            r[j] = -c[j];
        }
    }
    let mut basis: Vec<usize> = (nv..nv + nr).collect();
    let max_iter = 50 * (nv + nr) + 100;
    for _ in 0..max_iter {
        let obj = &t[nr * width..];
        let Some(enter) = (0..nv + nr).find(|&j| obj[j] < -EPS) else {
            let mut z = vec![0.0; nv];
            for (i, &bj) in basis.iter().enumerate() {
                if bj < nv {
                    z[bj] = t[i * width + width - 1];
                }
            }
            return Ok(LpOutcome::Optimal {
                value: t[nr * width + width - 1],
                z,
            });
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..nr {
            let aij = t[i * width + enter];
            if aij > EPS {
                let ratio = t[i * width + width - 1] / aij;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, r)) => {
                        if ratio < r - EPS || (ratio <= r + EPS && basis[i] < basis[k]) {
                            Some((i, ratio))
                        } else {
                            Some((k, r))
                        }
                    }
                };
            }
        }
        let Some((p, _)) = leave else {
            return Ok(LpOutcome::Unbounded);
        };
        let piv = t[p * width + enter];
        for j in 0..width {
            t[p * width + j] /= piv;
        }
        for i in 0..=nr {
            if i == p {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= f * t[p * width + j];
                }
            }
        }
        basis[p] = enter;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let out = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        match out {
            LpOutcome::Optimal { value, z } => {
                assert_relative_eq!(value, 36.0, max_relative = 1e-12);
                assert_relative_eq!(z[0], 2.0, max_relative = 1e-12);
                assert_relative_eq!(z[1], 6.0, max_relative = 1e-12);
            }
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn unbounded_and_degenerate() {
        assert_eq!(
            maximize(&[1.0], &[vec![-1.0]], &[1.0]).unwrap(),
            LpOutcome::Unbounded
        );
        // degenerate vertex at the origin
        let out = maximize(
            &[1.0, 1.0],
            &[vec![1.0, -1.0], vec![-1.0, 1.0], vec![1.0, 1.0]],
            &[0.0, 0.0, 2.0],
        )
        .unwrap();
        match out {
            LpOutcome::Optimal { value, .. } => {
                assert_relative_eq!(value, 2.0, max_relative = 1e-12)
            }
            _ => panic!("expected optimum"),
        }
        assert!(maximize(&[1.0], &[vec![1.0]], &[-1.0]).is_err());
    }
}
