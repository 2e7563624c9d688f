//! Closed-form values of the weighted chart integrals.
//!
//! Every integral of a monomial against `e^{-mΦ_FS} dV` reduces to a
//! Beta/Dirichlet integral once the radial coordinates are substituted by
//! `u = r²/(1+r²)`. These closed forms are kept separate from the
//! quadrature path so the two can be compared as independent routes.

use std::f64::consts::PI;

/// `n!` as f64 (exact for n ≤ 22, correctly rounded far beyond).
pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Binomial coefficient `C(n, k)` as f64, computed multiplicatively.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc
}

/// Euler Beta function `B(a, b)` for positive integer arguments.
pub fn beta_int(a: u32, b: u32) -> f64 {
    // B(a,b) = (a-1)!(b-1)!/(a+b-1)!; evaluated as a product to avoid
    // forming large factorials.
    let (small, large) = if a < b { (a, b) } else { (b, a) };
    let mut acc = 1.0 / f64::from(large);
    for i in 1..small {
        acc = acc * f64::from(i) / f64::from(large + i);
    }
    acc
}

/// `∫_{U_0} e^{-mΦ} dV = measure_scale · π^n · m!/(m+n)!`.
pub fn weighted_volume(n: usize, m: u32, measure_scale: f64) -> f64 {
    let mut ratio = 1.0; // m!/(m+n)!
    for i in 1..=n as u32 {
        ratio /= f64::from(m + i);
    }
    measure_scale * PI.powi(n as i32) * ratio
}

/// Normalization constant `c(m) = 1 / ∫ e^{-mΦ} dV`.
pub fn c_constant(n: usize, m: u32, measure_scale: f64) -> f64 {
    1.0 / weighted_volume(n, m, measure_scale)
}

/// Dirichlet closed form of the basis constants:
/// `D_{(q_1,…,q_n;q)} = (Π_i q_i!) (m−q)! / m!`, the reciprocal of the
/// multinomial coefficient `m! / (q_1! ⋯ q_n! (m−q)!)`.
///
/// Independent of the measure convention (the scale cancels in the ratio).
pub fn normalization_d(exponents: &[u32], m: u32) -> f64 {
    let q: u32 = exponents.iter().sum();
    assert!(q <= m, "degree must not exceed the level");
    // Build the multinomial coefficient incrementally via binomials:
    // m!/(q1!…qn!(m-q)!) = Π_k C(remaining_k, q_k) with remaining counts.
    let mut remaining = m;
    let mut multinomial = 1.0;
    for &qi in exponents {
        multinomial *= binomial(remaining, qi);
        remaining -= qi;
    }
    1.0 / multinomial
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_and_binomial_agree() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(binomial(6, 0), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
        // C(n,k) = n!/(k!(n-k)!) spot check away from overflow.
        let direct = factorial(12) / (factorial(5) * factorial(7));
        assert!((binomial(12, 5) - direct).abs() < 1e-9);
    }

    #[test]
    fn beta_int_matches_factorial_form() {
        for a in 1..8u32 {
            for b in 1..8u32 {
                let direct = factorial(a - 1) * factorial(b - 1) / factorial(a + b - 1);
                assert!((beta_int(a, b) - direct).abs() < 1e-15 * direct.max(1.0));
            }
        }
    }

    #[test]
    fn c_constant_reference_values() {
        // n = 1: c(m) = (m+1)/(2π) under measure_scale = 2.
        assert!((c_constant(1, 1, 2.0) - 1.0 / PI).abs() < 1e-15);
        assert!((c_constant(1, 2, 2.0) - 3.0 / (2.0 * PI)).abs() < 1e-15);
        // n = 2: c(m) = (m+1)(m+2)/(2π)² under measure_scale = 4.
        let want = 3.0 * 4.0 / (2.0 * PI).powi(2);
        assert!((c_constant(2, 2, 4.0) - want).abs() < 1e-14);
    }

    #[test]
    fn normalization_d_reference_values() {
        // n = 1: D_q = q!(m-q)!/m!.
        assert_eq!(normalization_d(&[0], 7), 1.0);
        assert!((normalization_d(&[1], 2) - 0.5).abs() < 1e-15);
        for m in 1..=12u32 {
            for q in 0..=m {
                let direct = factorial(q) * factorial(m - q) / factorial(m);
                let d = normalization_d(&[q], m);
                assert!((d - direct).abs() < 1e-14 * direct.max(1.0), "m={m} q={q}");
            }
        }
        // n = 2 sample: D_{(1,1;2)} at m = 2 is 1/2.
        assert!((normalization_d(&[1, 1], 2) - 0.5).abs() < 1e-15);
    }
}
