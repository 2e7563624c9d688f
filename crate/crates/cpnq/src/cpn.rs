//! Geometry of the affine chart `U_0 ≅ C^n` of `CP^n`.
//!
//! Everything here is expressed in the inhomogeneous coordinates
//! `μ = (μ_1, …, μ_n)`. The Kähler potential of the level-`m` bundle is
//! `m·log(1 + |μ|²)`, the Fubini-Study metric is its mixed Hessian, and the
//! volume density is the determinant of that Hessian.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

/// A point of the affine chart, held as its inhomogeneous coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointU0 {
    pub coords: Vec<C64>,
}

impl PointU0 {
    pub fn new(coords: Vec<C64>) -> Self {
        assert!(!coords.is_empty(), "chart points need n >= 1 coordinates");
        assert!(
            coords.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            "chart points must have finite coordinates"
        );
        Self { coords }
    }

    /// Origin of `C^n`.
    pub fn origin(n: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); n])
    }

    /// Convenience constructor for `n = 1`.
    pub fn scalar(z: C64) -> Self {
        Self::new(vec![z])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `|μ|² = Σ_i |μ_i|²`.
    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Hermitian pairing `μ̄ · ν = Σ_i conj(μ_i) ν_i` (self conjugated).
    pub fn pair(&self, other: &PointU0) -> C64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl fmt::Display for PointU0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+.6}{:+.6}i", c.re, c.im)?;
        }
        write!(f, ")")
    }
}

/// Parameters of one quantization level: chart dimension `n`, level `m`
/// (so `ħ = 1/m`), the constant converting `|dμ ∧ dμ̄|` to Lebesgue measure
/// on `R^{2n}`, and the default numerical tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationConfig {
    pub n: usize,
    pub m: u32,
    pub measure_scale: f64,
    pub tol: f64,
}

impl QuantizationConfig {
    /// Standard convention: `measure_scale = 2^n`, `tol = 1e-10`.
    pub fn new(n: usize, m: u32) -> Self {
        assert!(n >= 1, "chart dimension must be at least 1");
        Self {
            n,
            m,
            measure_scale: (2.0f64).powi(n as i32),
            tol: 1e-10,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        assert!(tol > 0.0);
        self.tol = tol;
        self
    }

    pub fn with_measure_scale(mut self, scale: f64) -> Self {
        assert!(scale > 0.0);
        self.measure_scale = scale;
        self
    }

    /// The semiclassical parameter `ħ = 1/m`.
    pub fn hbar(&self) -> f64 {
        1.0 / f64::from(self.m)
    }
}

/// Kähler potential of the level-`m` bundle: `m · log(1 + |μ|²)`.
pub fn kahler_potential(mu: &PointU0, cfg: &QuantizationConfig) -> f64 {
    f64::from(cfg.m) * (1.0 + mu.norm_sq()).ln()
}

/// Fubini-Study metric `g_{ij̄} = ∂²/∂μ_i ∂μ̄_j log(1 + |μ|²)`.
///
/// Closed form: `g_{ij̄} = [δ_ij (1 + |μ|²) − μ̄_i μ_j] / (1 + |μ|²)²`,
/// a positive-definite Hermitian matrix on all of `U_0`.
pub fn fs_metric_matrix(mu: &PointU0) -> DMatrix<C64> {
    let n = mu.dim();
    let a = 1.0 + mu.norm_sq();
    let a2 = a * a;
    DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { a } else { 0.0 };
        (C64::new(delta, 0.0) - mu.coords[i].conj() * mu.coords[j]) / a2
    })
}

/// Volume density `𝒢(μ) = (1 + |μ|²)^{-(n+1)} = det g(μ)`.
pub fn volume_density(mu: &PointU0) -> f64 {
    (1.0 + mu.norm_sq()).powi(-(mu.dim() as i32 + 1))
}

type FieldFn = Arc<dyn Fn(&PointU0) -> C64 + Send + Sync>;
type PartialFn = Arc<dyn Fn(&PointU0, usize) -> C64 + Send + Sync>;

/// A scalar field on the chart together with its Wirtinger partials.
///
/// Partials may be supplied analytically; otherwise they fall back to
/// central finite differences of the evaluation map with step `fd_step`.
#[derive(Clone)]
pub struct SmoothField {
    eval: FieldFn,
    d_mu: Option<PartialFn>,
    d_mu_bar: Option<PartialFn>,
    fd_step: f64,
}

impl SmoothField {
    pub fn new(eval: impl Fn(&PointU0) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            d_mu: None,
            d_mu_bar: None,
            fd_step: 1e-5,
        }
    }

    pub fn with_partials(
        eval: impl Fn(&PointU0) -> C64 + Send + Sync + 'static,
        d_mu: impl Fn(&PointU0, usize) -> C64 + Send + Sync + 'static,
        d_mu_bar: impl Fn(&PointU0, usize) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            d_mu: Some(Arc::new(d_mu)),
            d_mu_bar: Some(Arc::new(d_mu_bar)),
            fd_step: 1e-5,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::with_partials(
            move |_| c,
            |_, _| C64::new(0.0, 0.0),
            |_, _| C64::new(0.0, 0.0),
        )
    }

    /// `Re μ_1 / (1 + |μ|²)`, a bounded coordinate function on the chart.
    pub fn re_frac() -> Self {
        Self::with_partials(
            |p| {
                let s = 1.0 + p.norm_sq();
                C64::new(p.coords[0].re / s, 0.0)
            },
            |p, j| {
                let s = 1.0 + p.norm_sq();
                let delta = if j == 0 {
                    C64::new(s, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                let z1 = p.coords[0] + p.coords[0].conj();
                (delta - z1 * p.coords[j].conj()) / (2.0 * s * s)
            },
            |p, j| {
                let s = 1.0 + p.norm_sq();
                let delta = if j == 0 {
                    C64::new(s, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                let z1 = p.coords[0] + p.coords[0].conj();
                (delta - z1 * p.coords[j]) / (2.0 * s * s)
            },
        )
    }

    /// `Im μ_1 / (1 + |μ|²)`.
    pub fn im_frac() -> Self {
        Self::with_partials(
            |p| {
                let s = 1.0 + p.norm_sq();
                C64::new(p.coords[0].im / s, 0.0)
            },
            |p, j| {
                let s = 1.0 + p.norm_sq();
                let delta = if j == 0 {
                    C64::new(s, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                let w1 = p.coords[0] - p.coords[0].conj();
                (delta - w1 * p.coords[j].conj()) / (C64::new(0.0, 2.0) * s * s)
            },
            |p, j| {
                let s = 1.0 + p.norm_sq();
                let delta = if j == 0 {
                    C64::new(s, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                let w1 = p.coords[0] - p.coords[0].conj();
                (-delta - w1 * p.coords[j]) / (C64::new(0.0, 2.0) * s * s)
            },
        )
    }

    /// `|μ|² / (1 + |μ|²)`, the radial coordinate that compactifies the chart.
    pub fn abs_frac() -> Self {
        Self::with_partials(
            |p| {
                let s = p.norm_sq();
                C64::new(s / (1.0 + s), 0.0)
            },
            |p, j| {
                let s = 1.0 + p.norm_sq();
                p.coords[j].conj() / (s * s)
            },
            |p, j| {
                let s = 1.0 + p.norm_sq();
                p.coords[j] / (s * s)
            },
        )
    }

    pub fn eval(&self, p: &PointU0) -> C64 {
        (self.eval)(p)
    }

    /// Holomorphic partial `∂/∂μ_j = (∂_x − i ∂_y)/2`.
    pub fn d_mu(&self, p: &PointU0, j: usize) -> C64 {
        match &self.d_mu {
            Some(f) => f(p, j),
            None => {
                let (dx, dy) = self.fd_real_partials(p, j);
                (dx - C64::i() * dy) / 2.0
            }
        }
    }

    /// Antiholomorphic partial `∂/∂μ̄_j = (∂_x + i ∂_y)/2`.
    pub fn d_mu_bar(&self, p: &PointU0, j: usize) -> C64 {
        match &self.d_mu_bar {
            Some(f) => f(p, j),
            None => {
                let (dx, dy) = self.fd_real_partials(p, j);
                (dx + C64::i() * dy) / 2.0
            }
        }
    }

    fn fd_real_partials(&self, p: &PointU0, j: usize) -> (C64, C64) {
        let h = self.fd_step;
        let mut px = p.clone();
        let mut py = p.clone();
        px.coords[j].re += h;
        py.coords[j].im += h;
        let fxp = (self.eval)(&px);
        px.coords[j].re -= 2.0 * h;
        let fxm = (self.eval)(&px);
        let fyp = (self.eval)(&py);
        py.coords[j].im -= 2.0 * h;
        let fym = (self.eval)(&py);
        ((fxp - fxm) / (2.0 * h), (fyp - fym) / (2.0 * h))
    }
}

impl fmt::Debug for SmoothField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothField")
            .field("analytic_partials", &self.d_mu.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

/// Fubini-Study Poisson bracket
/// `{t, s} = Σ_{ij} Ω^{ij} (∂t/∂μ̄_j ∂s/∂μ_i − ∂s/∂μ̄_j ∂t/∂μ_i)`,
/// with `Ω_{ij}` the metric matrix and `Ω^{ij}` its inverse. The slot
/// pairing is the same in both terms, which makes the bracket antisymmetric
/// and bilinear for every `n`.
pub fn poisson_bracket_fs(t: &SmoothField, s: &SmoothField, mu: &PointU0) -> C64 {
    let n = mu.dim();
    let omega = fs_metric_matrix(mu);
    let inv = omega
        .try_inverse()
        .expect("Fubini-Study form is invertible on U_0");

    let t_mu = DVector::from_fn(n, |j, _| t.d_mu(mu, j));
    let t_bar = DVector::from_fn(n, |j, _| t.d_mu_bar(mu, j));
    let s_mu = DVector::from_fn(n, |j, _| s.d_mu(mu, j));
    let s_bar = DVector::from_fn(n, |j, _| s.d_mu_bar(mu, j));

    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += inv[(i, j)] * (t_bar[j] * s_mu[i] - s_bar[j] * t_mu[i]);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn potential_closed_form_values() {
        let cfg = QuantizationConfig::new(1, 2);
        assert_eq!(kahler_potential(&PointU0::origin(1), &cfg), 0.0);
        let v = kahler_potential(&PointU0::scalar(c(1.0, 0.0)), &cfg);
        assert!((v - 2.0 * (2.0f64).ln()).abs() < 1e-15);

        let cfg2 = QuantizationConfig::new(2, 3);
        let p = PointU0::new(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((kahler_potential(&p, &cfg2) - 3.0 * (3.0f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn potential_scales_linearly_in_level() {
        let p = PointU0::new(vec![c(0.3, -0.7), c(1.2, 0.4)]);
        let base = kahler_potential(&p, &QuantizationConfig::new(2, 1));
        for m in [2u32, 5, 17, 64] {
            let v = kahler_potential(&p, &QuantizationConfig::new(2, m));
            assert_eq!(v / f64::from(m), base);
        }
    }

    #[test]
    fn metric_closed_form_small_cases() {
        let g = fs_metric_matrix(&PointU0::origin(1));
        assert!((g[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let g = fs_metric_matrix(&PointU0::scalar(c(1.0, 0.0)));
        assert!((g[(0, 0)] - c(0.25, 0.0)).norm() < 1e-15);

        // Mixed Hessian of log(1+|μ|²) at the origin of C² is the identity.
        let g = fs_metric_matrix(&PointU0::origin(2));
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn metric_matches_finite_difference_hessian() {
        // Second-order FD of the potential against the analytic matrix.
        let p = PointU0::new(vec![c(0.4, -0.2), c(-0.1, 0.9)]);
        let g = fs_metric_matrix(&p);
        let h = 1e-4;
        let pot = |q: &PointU0| (1.0 + q.norm_sq()).ln();
        for i in 0..2 {
            for j in 0..2 {
                // ∂²/∂μ_i∂μ̄_j via nested Wirtinger finite differences.
                let d_mu_bar_j = |q: &PointU0| {
                    let mut qx = q.clone();
                    let mut qy = q.clone();
                    qx.coords[j].re += h;
                    qy.coords[j].im += h;
                    let fxp = pot(&qx);
                    qx.coords[j].re -= 2.0 * h;
                    let fxm = pot(&qx);
                    let fyp = pot(&qy);
                    qy.coords[j].im -= 2.0 * h;
                    let fym = pot(&qy);
                    (c((fxp - fxm) / (2.0 * h), 0.0) + C64::i() * ((fyp - fym) / (2.0 * h))) / 2.0
                };
                let mut qx = p.clone();
                let mut qy = p.clone();
                qx.coords[i].re += h;
                qy.coords[i].im += h;
                let gxp = d_mu_bar_j(&qx);
                qx.coords[i].re -= 2.0 * h;
                let gxm = d_mu_bar_j(&qx);
                let gyp = d_mu_bar_j(&qy);
                qy.coords[i].im -= 2.0 * h;
                let gym = d_mu_bar_j(&qy);
                let fd = ((gxp - gxm) / (2.0 * h) - C64::i() * ((gyp - gym) / (2.0 * h))) / 2.0;
                assert!(
                    (fd - g[(i, j)]).norm() < 1e-6,
                    "entry ({i},{j}): fd {fd} vs analytic {}",
                    g[(i, j)]
                );
            }
        }
    }

    #[test]
    fn volume_density_equals_metric_determinant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3usize {
            for _ in 0..1000 {
                let p = PointU0::new(
                    (0..n)
                        .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                        .collect(),
                );
                let det = fs_metric_matrix(&p).determinant();
                assert!(det.im.abs() < 1e-13);
                assert!(
                    (det.re - volume_density(&p)).abs() < 1e-12,
                    "n={n} det {} vs density {}",
                    det.re,
                    volume_density(&p)
                );
            }
        }
    }

    #[test]
    fn volume_density_values() {
        assert!((volume_density(&PointU0::origin(1)) - 1.0).abs() < 1e-15);
        assert!((volume_density(&PointU0::scalar(c(1.0, 0.0))) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bracket_basic_identities() {
        let t = SmoothField::with_partials(
            |p| p.coords[0] + p.coords[0].conj(),
            |_, _| c(1.0, 0.0),
            |_, _| c(1.0, 0.0),
        );
        let s = SmoothField::with_partials(
            |p| C64::i() * (p.coords[0] - p.coords[0].conj()),
            |_, _| c(0.0, 1.0),
            |_, _| c(0.0, -1.0),
        );
        let origin = PointU0::origin(1);

        // {t, t} = 0 and {t, const} = 0.
        assert!((poisson_bracket_fs(&t, &t, &origin)).norm() < 1e-14);
        let k = SmoothField::constant(c(4.0, -1.0));
        assert!((poisson_bracket_fs(&t, &k, &origin)).norm() < 1e-14);

        // Frozen from the convention Ω_11 = 1/(1+|μ|²)²: at μ = 0,
        // {μ+μ̄, i(μ−μ̄)} = 1·(1·i − (−i)·1) = 2i.
        let b = poisson_bracket_fs(&t, &s, &origin);
        assert!((b - c(0.0, 2.0)).norm() < 1e-12, "bracket {b}");
    }

    #[test]
    fn bracket_antisymmetric_and_bilinear() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        // Fields with analytic partials: f = μ_1 μ̄_1, g = μ_1 + μ̄_2² (n = 2).
        let f = SmoothField::with_partials(
            |p| p.coords[0] * p.coords[0].conj(),
            |p, j| {
                if j == 0 {
                    p.coords[0].conj()
                } else {
                    c(0.0, 0.0)
                }
            },
            |p, j| if j == 0 { p.coords[0] } else { c(0.0, 0.0) },
        );
        let g = SmoothField::with_partials(
            |p| p.coords[0] + p.coords[1].conj() * p.coords[1].conj(),
            |_, j| if j == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) },
            |p, j| {
                if j == 1 {
                    2.0 * p.coords[1].conj()
                } else {
                    c(0.0, 0.0)
                }
            },
        );
        let h = SmoothField::with_partials(
            |p| p.coords[1],
            |_, j| if j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) },
            |_, _| c(0.0, 0.0),
        );
        for _ in 0..50 {
            let p = PointU0::new(vec![
                c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
                c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            ]);
            let fg = poisson_bracket_fs(&f, &g, &p);
            let gf = poisson_bracket_fs(&g, &f, &p);
            assert!((fg + gf).norm() < 1e-10, "antisymmetry at {p}");

            // Bilinearity in the second slot: {f, g + 2h} = {f, g} + 2{f, h}.
            let gh = SmoothField::with_partials(
                {
                    let (g, h) = (g.clone(), h.clone());
                    move |p: &PointU0| g.eval(p) + 2.0 * h.eval(p)
                },
                {
                    let (g, h) = (g.clone(), h.clone());
                    move |p: &PointU0, j: usize| g.d_mu(p, j) + 2.0 * h.d_mu(p, j)
                },
                {
                    let (g, h) = (g.clone(), h.clone());
                    move |p: &PointU0, j: usize| g.d_mu_bar(p, j) + 2.0 * h.d_mu_bar(p, j)
                },
            );
            let lhs = poisson_bracket_fs(&f, &gh, &p);
            let rhs = poisson_bracket_fs(&f, &g, &p) + 2.0 * poisson_bracket_fs(&f, &h, &p);
            assert!((lhs - rhs).norm() < 1e-10, "bilinearity at {p}");
        }
    }

    #[test]
    fn named_fields_have_consistent_partials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for field in [
            SmoothField::re_frac(),
            SmoothField::im_frac(),
            SmoothField::abs_frac(),
        ] {
            let fd = SmoothField::new({
                let f = field.clone();
                move |p: &PointU0| f.eval(p)
            });
            for n in [1usize, 2] {
                for _ in 0..20 {
                    let p = PointU0::new(
                        (0..n)
                            .map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                            .collect(),
                    );
                    for j in 0..n {
                        assert!((field.d_mu(&p, j) - fd.d_mu(&p, j)).norm() < 1e-8);
                        assert!((field.d_mu_bar(&p, j) - fd.d_mu_bar(&p, j)).norm() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn finite_difference_partials_track_analytic_ones() {
        let analytic = SmoothField::with_partials(
            |p| (p.coords[0] * p.coords[0].conj()).exp(),
            |p, _| p.coords[0].conj() * (p.coords[0] * p.coords[0].conj()).exp(),
            |p, _| p.coords[0] * (p.coords[0] * p.coords[0].conj()).exp(),
        );
        let fd = SmoothField::new(|p| (p.coords[0] * p.coords[0].conj()).exp());
        let p = PointU0::scalar(c(0.6, -0.3));
        assert!((analytic.d_mu(&p, 0) - fd.d_mu(&p, 0)).norm() < 1e-8);
        assert!((analytic.d_mu_bar(&p, 0) - fd.d_mu_bar(&p, 0)).norm() < 1e-8);
    }
}
