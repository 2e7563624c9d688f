//! Transition amplitudes, Monge-Ampère residuals, path holonomy and the
//! coherent-state metric built from the diagonal line-bundle kernel, plus
//! their pullbacks to embedded manifolds.

use crate::cpn::{fs_metric_matrix, PointU0, QuantizationConfig};
use crate::embedding::EmbeddedManifold;
use crate::error::Error;
use crate::exact;
use crate::fit;
use crate::Result;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The coefficient kernel `K(μ̄, ν) = (1 + μ̄·ν)^k` of the quantization
/// line bundle on the chart, with chart-index bookkeeping for the single
/// chart the computations live on.
///
/// The exponent defaults to the level `m`; it is injectable because the
/// twisted bundle (with the canonical factor) plausibly shifts it to
/// `m + n + 1`, and both variants should be testable.
#[derive(Debug, Clone)]
pub struct LineBundleKernel {
    pub cfg: QuantizationConfig,
    pub exponent: u32,
    /// Chart tags (α, β); every computation here stays on chart 0.
    pub chart: (usize, usize),
}

impl LineBundleKernel {
    pub fn new(cfg: QuantizationConfig) -> Self {
        let exponent = cfg.m;
        Self {
            cfg,
            exponent,
            chart: (0, 0),
        }
    }

    pub fn with_exponent(cfg: QuantizationConfig, exponent: u32) -> Self {
        Self {
            cfg,
            exponent,
            chart: (0, 0),
        }
    }

    /// `K(μ̄, ν)` — antiholomorphic in the first slot.
    pub fn eval(&self, mu: &PointU0, nu: &PointU0) -> C64 {
        (C64::new(1.0, 0.0) + mu.pair(nu)).powu(self.exponent)
    }

    /// Diagonal value `K(μ̄, μ) = (1 + |μ|²)^k > 0`.
    pub fn diagonal(&self, mu: &PointU0) -> f64 {
        (1.0 + mu.norm_sq()).powi(self.exponent as i32)
    }

    /// The 1-form coefficient `∂ log K(μ̄,μ)/∂μ̄_j = k μ_j/(1+|μ|²)`.
    fn dbar_log_diagonal(&self, mu: &PointU0, j: usize) -> C64 {
        f64::from(self.exponent) * mu.coords[j] / (1.0 + mu.norm_sq())
    }
}

/// Transition amplitude
/// `a(μ̄, ν) = K(μ̄, ν) / (K(μ̄,μ)^{1/2} K(ν̄,ν)^{1/2})`; `|a| ≤ 1` by
/// Cauchy-Schwarz, with equality on the diagonal.
pub fn transition_amplitude(mu: &PointU0, nu: &PointU0, kernel: &LineBundleKernel) -> C64 {
    kernel.eval(mu, nu) / (kernel.diagonal(mu).sqrt() * kernel.diagonal(nu).sqrt())
}

/// `1 − |a(μ̄, ν)|`, the radicand of the coherent-state metric. Coincident
/// points short-circuit to 0: the two power routes in the amplitude can
/// disagree by an ulp, and the radicand must not go negative there.
pub fn metric_radicand(mu: &PointU0, nu: &PointU0, kernel: &LineBundleKernel) -> f64 {
    if mu == nu {
        return 0.0;
    }
    1.0 - transition_amplitude(mu, nu, kernel).norm()
}

/// Coherent-state metric `d(μ, ν) = √2 (1 − |a(μ̄, ν)|)^{1/2}`.
///
/// Coincident points can round `|a|` a few ulps above 1; the radicand is
/// floored at 0 there.
pub fn cs_metric(mu: &PointU0, nu: &PointU0, kernel: &LineBundleKernel) -> f64 {
    (2.0f64).sqrt() * metric_radicand(mu, nu, kernel).max(0.0).sqrt()
}

/// Density exponent solving the Monge-Ampère relation: `N = n + m + 1`.
pub fn solution_exponent(cfg: &QuantizationConfig) -> f64 {
    cfg.n as f64 + f64::from(cfg.m) + 1.0
}

/// The constant `C` that zeroes the determinant reading:
/// `det(−N g) = C (−1)^{n(n+1)/2} (1/n!) ρ K` forces
/// `C = (−1)^{n(n−1)/2} N^n n!`.
pub fn c_for_det_reading(n: usize, n_param: f64) -> f64 {
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    sign * n_param.powi(n as i32) * exact::factorial(n as u32)
}

/// The constant `C = ±N n!` of the displayed one-line reading, with the
/// sign fixed by the parity of `(−1)^{n(n+1)/2 + 1}`.
pub fn c_for_displayed_reading(n: usize, n_param: f64) -> f64 {
    let sign = if (n * (n + 1) / 2 + 1).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    sign * n_param * exact::factorial(n as u32)
}

/// Monge-Ampère residual at one point with the left side computed from the
/// analytic mixed Hessian: `|det(−N g(μ)) − C (−1)^{n(n+1)/2} ρ K / n!|`
/// for `ρ = (1+|μ|²)^{−N}` and the kernel's diagonal.
pub fn monge_ampere_residual(
    mu: &PointU0,
    n_param: f64,
    c_param: f64,
    kernel: &LineBundleKernel,
) -> f64 {
    let lhs = (fs_metric_matrix(mu) * C64::new(-n_param, 0.0)).determinant();
    let rhs = monge_ampere_rhs(mu, n_param, c_param, kernel);
    (lhs.re - rhs).abs().max(lhs.im.abs())
}

/// Residual of the displayed one-line reading, whose left side is
/// `−N/(1+|μ|²)^{n+1}` regardless of the dimension.
pub fn monge_ampere_residual_displayed(
    mu: &PointU0,
    n_param: f64,
    c_param: f64,
    kernel: &LineBundleKernel,
) -> f64 {
    let n = mu.dim() as i32;
    let lhs = -n_param * (1.0 + mu.norm_sq()).powi(-(n + 1));
    (lhs - monge_ampere_rhs(mu, n_param, c_param, kernel)).abs()
}

fn monge_ampere_rhs(mu: &PointU0, n_param: f64, c_param: f64, kernel: &LineBundleKernel) -> f64 {
    let n = mu.dim();
    let parity = if (n * (n + 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let rho = (1.0 + mu.norm_sq()).powf(-n_param);
    c_param * parity / exact::factorial(n as u32) * rho * kernel.diagonal(mu)
}

/// One row of a Monge-Ampère grid scan: both readings at one point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MongeAmpereRow {
    pub point: Vec<[f64; 2]>,
    pub residual_det: f64,
    pub residual_displayed: f64,
}

/// Scan both residual readings over a square grid in the first coordinate
/// plane (the remaining coordinates stay at the grid value too for n = 2).
pub fn monge_ampere_grid(
    kernel: &LineBundleKernel,
    n_param: f64,
    c_det: f64,
    c_displayed: f64,
    grid: usize,
    extent: f64,
) -> Vec<MongeAmpereRow> {
    let n = kernel.cfg.n;
    let mut rows = Vec::with_capacity(grid * grid);
    for ix in 0..grid {
        for iy in 0..grid {
            let x = -extent + 2.0 * extent * ix as f64 / (grid.max(2) - 1) as f64;
            let y = -extent + 2.0 * extent * iy as f64 / (grid.max(2) - 1) as f64;
            let mut coords = vec![C64::new(x, y)];
            for k in 1..n {
                // Spread higher coordinates deterministically off-axis.
                coords.push(C64::new(0.3 * x + 0.1 * k as f64, -0.2 * y));
            }
            let mu = PointU0::new(coords);
            rows.push(MongeAmpereRow {
                point: mu.coords.iter().map(|c| [c.re, c.im]).collect(),
                residual_det: monge_ampere_residual(&mu, n_param, c_det, kernel),
                residual_displayed: monge_ampere_residual_displayed(
                    &mu,
                    n_param,
                    c_displayed,
                    kernel,
                ),
            });
        }
    }
    rows
}

/// A discretized path in the chart.
#[derive(Debug, Clone)]
pub struct PathGamma {
    pub points: Vec<PointU0>,
    pub closed: bool,
}

impl PathGamma {
    pub fn from_points(points: Vec<PointU0>, closed: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least 2 points".into()));
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::InvalidPath("mixed coordinate dimensions".into()));
        }
        if closed {
            let gap: f64 = points
                .first()
                .unwrap()
                .coords
                .iter()
                .zip(&points.last().unwrap().coords)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if gap > 1e-12 {
                return Err(Error::InvalidPath(format!(
                    "closed path must repeat its first point (gap {gap:.3e})"
                )));
            }
        }
        Ok(Self { points, closed })
    }

    /// Circle `center + r e^{2πi·turns·t}` in the first coordinate of `C^n`
    /// (remaining coordinates 0), sampled at `samples` steps with the first
    /// point repeated at the end so the loop closes exactly.
    pub fn circle(n: usize, center: C64, radius: f64, turns: f64, samples: usize) -> Self {
        assert!(samples >= 2);
        let mut points: Vec<PointU0> = (0..samples)
            .map(|j| {
                let angle = 2.0 * PI * turns * j as f64 / samples as f64;
                let mut coords = vec![C64::new(0.0, 0.0); n];
                coords[0] = center + C64::from_polar(radius, angle);
                PointU0::new(coords)
            })
            .collect();
        let whole_turns = (turns - turns.round()).abs() < 1e-12;
        if whole_turns {
            points.push(points[0].clone());
        } else {
            let angle = 2.0 * PI * turns;
            let mut coords = vec![C64::new(0.0, 0.0); n];
            coords[0] = center + C64::from_polar(radius, angle);
            points.push(PointU0::new(coords));
        }
        Self {
            points,
            closed: whole_turns,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self {
            points,
            closed: self.closed,
        }
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }
}

/// Product of transition amplitudes along consecutive path points:
/// `Π_i a(z̄_{i+1}, z_i)`.
pub fn holonomy_discrete(gamma: &PathGamma, kernel: &LineBundleKernel) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for pair in gamma.points.windows(2) {
        acc *= transition_amplitude(&pair[1], &pair[0], kernel);
    }
    acc
}

/// The line integral `∫_γ Im(∂̄ log K)` by composite trapezoid along the
/// stored points; for the diagonal kernel the 1-form is
/// `k · Im(Σ_j μ_j dμ̄_j)/(1 + |μ|²)`.
pub fn holonomy_integral_phase(gamma: &PathGamma, kernel: &LineBundleKernel) -> f64 {
    let n = gamma.points[0].dim();
    let mut phase = 0.0;
    for pair in gamma.points.windows(2) {
        for j in 0..n {
            let w0 = kernel.dbar_log_diagonal(&pair[0], j);
            let w1 = kernel.dbar_log_diagonal(&pair[1], j);
            let dz_bar = (pair[1].coords[j] - pair[0].coords[j]).conj();
            phase += (0.5 * (w0 + w1) * dz_bar).im;
        }
    }
    phase
}

/// `exp(i ∫_γ Im(∂̄ log K))`, the holonomy of the path.
pub fn holonomy_integral(gamma: &PathGamma, kernel: &LineBundleKernel) -> C64 {
    C64::from_polar(1.0, holonomy_integral_phase(gamma, kernel))
}

/// One refinement level of a holonomy comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolonomyRow {
    pub n_steps: usize,
    pub discrete: [f64; 2],
    pub integral: [f64; 2],
    pub abs_err: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub rows: Vec<HolonomyRow>,
    /// Fitted convergence order of `|discrete − integral|` in the step count.
    pub fitted_order: Option<f64>,
}

/// Compare the discrete amplitude product against the integral holonomy
/// over a family of refinements of the same curve. The integral reference
/// is evaluated on the finest requested sampling times 16.
pub fn holonomy_agreement(
    sample: impl Fn(usize) -> PathGamma,
    steps_list: &[usize],
    kernel: &LineBundleKernel,
) -> HolonomyReport {
    assert!(!steps_list.is_empty());
    let reference = holonomy_integral(&sample(steps_list.iter().max().unwrap() * 16), kernel);
    let rows: Vec<HolonomyRow> = steps_list
        .iter()
        .map(|&n_steps| {
            let gamma = sample(n_steps);
            let discrete = holonomy_discrete(&gamma, kernel);
            HolonomyRow {
                n_steps,
                discrete: [discrete.re, discrete.im],
                integral: [reference.re, reference.im],
                abs_err: (discrete - reference).norm(),
            }
        })
        .collect();
    let ns: Vec<f64> = rows.iter().map(|r| r.n_steps as f64).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.abs_err).collect();
    let fitted_order = fit::fit_log_log(&ns, &errs).map(|(slope, _)| -slope);
    HolonomyReport { rows, fitted_order }
}

/// Pullback kernel `Q(p̄, q) = K(conj(ε(p)), ε(q))` at embedded points.
pub fn pullback_kernel_q(p_img: &PointU0, q_img: &PointU0, kernel: &LineBundleKernel) -> C64 {
    kernel.eval(p_img, q_img)
}

/// Pullback transition amplitude between embedded points.
pub fn pullback_amplitude_a(p_img: &PointU0, q_img: &PointU0, kernel: &LineBundleKernel) -> C64 {
    transition_amplitude(p_img, q_img, kernel)
}

/// Path amplitude `A(γ, p, q) = exp(i ∫_γ Im(∂̄ log Q))` for a parameter
/// path on the manifold, computed by pushing the path through the
/// embedding and reusing the chart holonomy.
pub fn pullback_path_amplitude(
    manifold: &EmbeddedManifold,
    param_path: &[Vec<f64>],
    closed: bool,
    kernel: &LineBundleKernel,
) -> Result<C64> {
    let points = param_path
        .iter()
        .map(|p| manifold.map_param(p))
        .collect::<Result<Vec<PointU0>>>()?;
    let gamma = PathGamma::from_points(points, closed)?;
    Ok(holonomy_integral(&gamma, kernel))
}

/// Discrete (amplitude-product) version of [`pullback_path_amplitude`].
pub fn pullback_path_amplitude_discrete(
    manifold: &EmbeddedManifold,
    param_path: &[Vec<f64>],
    closed: bool,
    kernel: &LineBundleKernel,
) -> Result<C64> {
    let points = param_path
        .iter()
        .map(|p| manifold.map_param(p))
        .collect::<Result<Vec<PointU0>>>()?;
    let gamma = PathGamma::from_points(points, closed)?;
    Ok(holonomy_discrete(&gamma, kernel))
}
