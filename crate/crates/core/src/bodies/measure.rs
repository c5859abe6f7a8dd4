//! Finite Borel measures on S^{n-1} given by weighted atoms.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{pairwise_sum, SphereGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalMeasure {
    dim: usize,
    directions: Vec<f64>,
    weights: Vec<f64>,
}

/// Nearly uniform points on S² (Fibonacci lattice).
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * i as f64;
            [r * a.cos(), r * a.sin(), z]
        })
        .collect()
}

/// Quantizes directions on S^{n-1}, n ≤ 3: two half-lines in R, equal
/// angular bins on S¹, nearest Fibonacci-lattice centre on S².
#[derive(Debug, Clone)]
pub struct DirectionBins {
    n: usize,
    count: usize,
    centres: Vec<[f64; 3]>,
}

impl DirectionBins {
    pub fn new(n: usize, count: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return invalid("direction bins exist for n ≤ 3");
        }
        let count = if n == 1 { 2 } else { count };
        if count < 2 {
            return invalid("at least two direction bins required");
        }
        let centres = if n == 3 {
            fibonacci_sphere(count)
        } else {
            Vec::new()
        };
        Ok(DirectionBins { n, count, centres })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn index(&self, u: &[f64]) -> usize {
        match self.n {
            1 => usize::from(u[0] > 0.0),
            2 => {
                let a = u[1].atan2(u[0]).rem_euclid(2.0 * PI);
                ((a / (2.0 * PI) * self.count as f64) as usize).min(self.count - 1)
            }
            _ => {
                // lattice point k sits at height 1 − (2k+1)/N, and the chord to
                // the nearest centre bounds the height gap, so a band of
                // heights around u₃ holds it
                let nf = self.count as f64;
                let w = 3.0 * (4.0 * PI / nf).sqrt();
                let at = |z: f64| ((1.0 - z) * nf / 2.0 - 0.5).clamp(0.0, nf - 1.0);
                let (lo, hi) = (at(u[2] + w).floor() as usize, at(u[2] - w).ceil() as usize);
                let mut best = (f64::NEG_INFINITY, 0);
                for k in lo..=hi {
                    let c = &self.centres[k];
                    let d = c[0] * u[0] + c[1] * u[1] + c[2] * u[2];
                    if d > best.0 {
                        best = (d, k);
                    }
                }
                best.1
            }
        }
    }
}

impl SphericalMeasure {
    /// Normalizes directions and merges atoms whose directions coincide
    /// within 1e-12.
    pub fn new(dim: usize, directions: &[Vec<f64>], weights: &[f64]) -> Result<Self> {
        if dim < 1 || directions.len() != weights.len() {
            return invalid("measure directions and weights differ in length");
        }
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(directions.len());
        let mut ws: Vec<f64> = Vec::with_capacity(directions.len());
        for (v, w) in directions.iter().zip(weights) {
            if v.len() != dim {
                return invalid("measure direction has wrong dimension");
            }
            if !(w.is_finite() && *w >= 0.0) {
                return invalid("measure weights must be finite and nonnegative");
            }
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(r > 0.0 && r.is_finite()) {
                return invalid("measure direction must be a nonzero finite vector");
            }
            let u: Vec<f64> = v.iter().map(|x| x / r).collect();
            match dirs
                .iter()
                .position(|d| d.iter().zip(&u).all(|(a, b)| (a - b).abs() <= 1e-12))
            {
                Some(k) => ws[k] += w,
                None => {
                    dirs.push(u);
                    ws.push(*w);
                }
            }
        }
        if dirs.is_empty() {
            return invalid("empty measure");
        }
        Ok(SphericalMeasure {
            dim,
            directions: dirs.concat(),
            weights: ws,
        })
    }

    /// Atoms kept as given (no merging of repeated directions), for large
    /// measures built from sampled data. Directions are normalized.
    pub fn from_atoms(dim: usize, directions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim < 1 || directions.len() != dim * weights.len() {
            return invalid("measure directions and weights differ in length");
        }
        if weights.is_empty() {
            return invalid("empty measure");
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid("measure weights must be finite and nonnegative");
        }
        let mut directions = directions;
        for v in directions.chunks_exact_mut(dim) {
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(r > 0.0 && r.is_finite()) {
                return invalid("measure direction must be a nonzero finite vector");
            }
            v.iter_mut().for_each(|x| *x /= r);
        }
        Ok(SphericalMeasure {
            dim,
            directions,
            weights,
        })
    }

    /// Quadrature weights of a sphere grid viewed as a discrete measure.
    pub fn from_grid(grid: &SphereGrid) -> Self {
        SphericalMeasure {
            dim: grid.dim(),
            directions: grid.nodes().flat_map(|v| v.iter().copied()).collect(),
            weights: grid.weights().to_vec(),
        }
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

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn directions(&self) -> impl Iterator<Item = &[f64]> {
        self.directions.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Σ w_i f(v_i), summed pairwise.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        let terms: Vec<f64> = self
            .directions()
            .zip(&self.weights)
            .map(|(v, w)| w * f(v))
            .collect();
        pairwise_sum(&terms)
    }

    /// Merges the atoms falling in each bin into one atom of the bin's
    /// total mass, placed at the mass-weighted mean direction.
    pub fn binned(&self, bins: &DirectionBins) -> Result<Self> {
        if bins.n != self.dim {
            return invalid("bins and measure live in different dimensions");
        }
        let n = self.dim;
        let mut mass = vec![0.0; bins.count];
        let mut mean = vec![0.0; bins.count * n];
        for (v, w) in self.directions().zip(&self.weights) {
            let b = bins.index(v);
            mass[b] += w;
            for i in 0..n {
                mean[b * n + i] += w * v[i];
            }
        }
        let mut dirs = Vec::new();
        let mut ws = Vec::new();
        for b in 0..bins.count {
            let d = &mean[b * n..(b + 1) * n];
            if mass[b] > 0.0 && d.iter().any(|x| *x != 0.0) {
                dirs.extend_from_slice(d);
                ws.push(mass[b]);
            }
        }
        Self::from_atoms(n, dirs, ws)
    }

    /// Same atoms with new weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.len() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid("reweighting must keep one finite nonnegative weight per atom");
        }
        Ok(SphericalMeasure {
            dim: self.dim,
            directions: self.directions.clone(),
            weights,
        })
    }

    /// |Σ w v| / Σ w; zero for measures with centroid at the origin.
    pub fn centroid_defect(&self) -> f64 {
        let mass = self.total_mass();
        let mut c = vec![0.0; self.dim];
        for (v, w) in self.directions().zip(&self.weights) {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += w * vi;
            }
        }
        c.iter().map(|x| x * x).sum::<f64>().sqrt() / mass
    }

    /// min over probe directions u of Σ w (v·u)_+. Besides the grid, the
    /// probes include the arrangement vertices where the minimum can sit:
    /// directions orthogonal to atoms in the plane (at most 720 atoms), and
    /// to pairs of atoms in space (at most 64 atoms).
    pub fn hemisphere_margin(&self, probe: &SphereGrid) -> Result<f64> {
        if probe.dim() != self.dim {
            return invalid("probe grid dimension differs from measure dimension");
        }
        let eval = |u: &[f64]| {
            let t: Vec<f64> = self
                .directions()
                .zip(&self.weights)
                .map(|(v, w)| w * v.iter().zip(u).map(|(a, b)| a * b).sum::<f64>().max(0.0))
                .collect();
            pairwise_sum(&t)
        };
        let mut best = probe.nodes().map(eval).fold(f64::INFINITY, f64::min);
        if self.dim == 2 && self.len() <= 720 {
            for v in self.directions() {
                best = best.min(eval(&[-v[1], v[0]])).min(eval(&[v[1], -v[0]]));
            }
        } else if self.dim == 3 && self.len() <= 64 {
            for i in 0..self.len() {
                for j in i + 1..self.len() {
                    let (a, b) = (self.direction(i), self.direction(j));
                    let c = [
                        a[1] * b[2] - a[2] * b[1],
                        a[2] * b[0] - a[0] * b[2],
                        a[0] * b[1] - a[1] * b[0],
                    ];
                    let r = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                    if r > 1e-12 {
                        let u = [c[0] / r, c[1] / r, c[2] / r];
                        best = best.min(eval(&u)).min(eval(&[-u[0], -u[1], -u[2]]));
                    }
                }
            }
        }
        Ok(best)
    }

    /// True when the measure is not concentrated on a closed hemisphere.
    pub fn is_spanning(&self, probe: &SphereGrid) -> Result<bool> {
        Ok(self.hemisphere_margin(probe)? > 1e-12 * self.total_mass())
    }

    pub fn require_spanning(&self, probe: &SphereGrid) -> Result<()> {
        if self.is_spanning(probe)? {
            Ok(())
        } else {
            Err(Error::NotSpanning)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{sphere_grid, Scheme};

    #[test]
    fn merges_repeats_and_checks_hemisphere() {
        let m = SphericalMeasure::new(
            2,
            &[vec![1.0, 0.0], vec![2.0, 0.0], vec![-1.0, 0.0]],
            &[1.0, 1.0, 2.0],
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.weights(), &[2.0, 2.0]);
        assert!(m.centroid_defect() < 1e-15);
        let g = sphere_grid(2, 720, Scheme::Product).unwrap();
        assert!(!m.is_spanning(&g).unwrap());
        let m = SphericalMeasure::new(
            2,
            &[vec![1.0, 0.3], vec![-0.2, 1.0], vec![-1.0, -1.3]],
            &[1.0, 1.0, 1.0],
        )
        .unwrap();
        assert!(m.is_spanning(&g).unwrap());
    }

    #[test]
    fn rejects_bad_atoms() {
        assert!(SphericalMeasure::new(2, &[vec![0.0, 0.0]], &[1.0]).is_err());
        assert!(SphericalMeasure::new(2, &[vec![1.0, 0.0]], &[-1.0]).is_err());
        assert!(SphericalMeasure::new(2, &[vec![1.0, 0.0, 0.0]], &[1.0]).is_err());
    }


    #[test]
    fn windowed_lattice_search_finds_the_nearest_centre() {
        let bins = DirectionBins::new(3, 2048).unwrap();
        let centres = fibonacci_sphere(2048);
        let mut s = 0x9e3779b97f4a7c15u64;
        for _ in 0..2000 {
            let mut v = [0.0; 3];
            for x in v.iter_mut() {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                *x = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            }
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            let u = [v[0] / r, v[1] / r, v[2] / r];
            let brute = (0..centres.len())
                .max_by(|&a, &b| {
                    let da: f64 = (0..3).map(|i| centres[a][i] * u[i]).sum();
                    let db: f64 = (0..3).map(|i| centres[b][i] * u[i]).sum();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            assert_eq!(bins.index(&u), brute);
        }
        for pole in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]] {
            let k = bins.index(&pole);
            assert!(k == 0 || k == 2047);
        }
    }
}
