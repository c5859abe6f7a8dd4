//! Gamma function and ball/sphere measures.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) by the Lanczos approximation, with reflection for x < 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

/// Volume ω_n of the Euclidean unit ball in R^n (n may be fractional).
pub fn ball_volume(n: f64) -> f64 {
    (0.5 * n * PI.ln() - ln_gamma(0.5 * n + 1.0)).exp()
}

/// Surface measure of S^{d-1}, equal to d·ω_d.
pub fn sphere_area(d: usize) -> f64 {
    d as f64 * ball_volume(d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_at_integers_and_half() {
        let mut fact = 1.0;
        for k in 1..15 {
            assert_relative_eq!(gamma(k as f64), fact, max_relative = 1e-13);
            fact *= k as f64;
        }
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(ln_gamma(30.0), gamma(30.0).ln(), max_relative = 1e-13);
    }

    #[test]
    fn recurrence_holds() {
        for i in 1..200 {
            let x = 0.037 * i as f64;
            assert_relative_eq!(gamma(x + 1.0), x * gamma(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(ball_volume(1.0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(2.0), PI, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(3.0), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(6.0), PI.powi(3) / 6.0, max_relative = 1e-13);
        assert_relative_eq!(sphere_area(6), PI.powi(3), max_relative = 1e-13);
    }
}
