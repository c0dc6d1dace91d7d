//! Unit-ball volumes and Gamma-based binomials.

use std::f64::consts::PI;

/// Volume ω_d of the unit ball in R^d, via log-Gamma so large `d` does not overflow.
pub fn unit_ball_volume(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    (half * PI.ln() - libm::lgamma(half + 1.0)).exp()
}

/// Surface measure of the unit sphere in R^d, `d·ω_d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// Generalized binomial coefficient `C(n + p, n)` = Γ(n+p+1) / (Γ(n+1) Γ(p+1)).
pub fn binomial_shifted(n: usize, p: f64) -> f64 {
    let n = n as f64;
    (libm::lgamma(n + p + 1.0) - libm::lgamma(n + 1.0) - libm::lgamma(p + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_dimensional_balls() {
        assert_relative_eq!(unit_ball_volume(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn recurrence_holds_up_to_fifty() {
        // ω_d = 2π/d · ω_{d-2}
        for d in 3..=50 {
            let lhs = unit_ball_volume(d);
            let rhs = 2.0 * PI / d as f64 * unit_ball_volume(d - 2);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn integer_binomials() {
        assert_relative_eq!(binomial_shifted(1, 3.0), 4.0, max_relative = 1e-13);
        assert_relative_eq!(binomial_shifted(2, 3.0), 10.0, max_relative = 1e-13);
        assert_relative_eq!(binomial_shifted(5, 1.0), 6.0, max_relative = 1e-13);
    }
}
