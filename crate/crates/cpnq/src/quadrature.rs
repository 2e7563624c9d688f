//! Weighted integration over the chart: `∫_{U_0} f(ν) e^{-mΦ_FS} dV(ν)`.
//!
//! The radial substitution `u_k = r_k²/(1 + r_1² + … + r_k²)`-style nesting
//! turns the weight into a product of Beta kernels `(1-x_k)^{m+k-1} dx_k`
//! on the unit cube, so a tensor Gauss-Legendre rule in the `x_k` crossed
//! with uniform angular nodes integrates every angular-charge-balanced
//! monomial exactly at modest orders. Monte-Carlo draws the `x_k` from the
//! matching Beta laws, which makes the weight measure an exact importance
//! sampler.

use crate::cpn::{PointU0, QuantizationConfig};
use crate::error::Error;
use crate::exact;
use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    GaussRadialAngular,
    MonteCarlo,
}

/// Node-count / seed parameters for [`build_rule`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleParams {
    /// Gauss-Legendre points per radial coordinate.
    pub radial: usize,
    /// Uniform points per angular coordinate.
    pub angular: usize,
    /// Monte-Carlo sample count.
    pub mc_samples: usize,
    /// Mandatory for Monte-Carlo rules.
    pub seed: Option<u64>,
}

impl Default for RuleParams {
    fn default() -> Self {
        Self {
            radial: 24,
            angular: 24,
            mc_samples: 20_000,
            seed: None,
        }
    }
}

impl RuleParams {
    pub fn gauss(radial: usize, angular: usize) -> Self {
        Self {
            radial,
            angular,
            ..Self::default()
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            mc_samples: samples,
            seed: Some(seed),
            ..Self::default()
        }
    }
}

/// A fixed node/weight list for one quantization level. Weights absorb the
/// full weight function `e^{-mΦ} 𝒢 ·` (measure scale), so integrating `f`
/// is the plain dot product `Σ w_i f(ν_i)`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<PointU0>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
    pub n: usize,
    pub m: u32,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on (0, 1) by the Golub-Welsch method.
fn gauss_legendre_unit(deg: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(deg >= 2);
    let mut jacobi = DMatrix::<f64>::zeros(deg, deg);
    for k in 1..deg {
        let kf = k as f64;
        let off = kf / (4.0 * kf * kf - 1.0).sqrt();
        jacobi[(k - 1, k)] = off;
        jacobi[(k, k - 1)] = off;
    }
    let eigen = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = eigen
        .eigenvalues
        .iter()
        .copied()
        .zip(eigen.eigenvectors.row(0).iter().map(|v| 2.0 * v * v))
        .collect();
    pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Affine map [-1,1] -> (0,1): x = (y+1)/2, w -> w/2.
    pairs
        .iter()
        .map(|&(y, w)| ((y + 1.0) / 2.0, w / 2.0))
        .unzip()
}

/// Map cube coordinates `x ∈ (0,1)^n` to radii via the nested substitution
/// `t_k = (1 + t_1 + … + t_{k-1}) · x_k/(1 - x_k)`.
fn radii_from_cube(xs: &[f64]) -> Vec<f64> {
    let mut radii = Vec::with_capacity(xs.len());
    let mut total = 1.0; // 1 + t_1 + ... + t_{k-1}
    for &x in xs {
        let t = total * x / (1.0 - x);
        radii.push(t.sqrt());
        total /= 1.0 - x;
    }
    radii
}

/// Build a quadrature rule for the weight `e^{-mΦ} dV` at the level in `cfg`.
///
/// Tensor Gauss rules are supported for `n ≤ 3`; higher dimensions fall
/// back to Monte-Carlo (which then requires a seed).
pub fn build_rule(
    cfg: &QuantizationConfig,
    kind: RuleKind,
    params: &RuleParams,
) -> Result<QuadratureRule> {
    let kind = if kind == RuleKind::GaussRadialAngular && cfg.n > 3 {
        RuleKind::MonteCarlo
    } else {
        kind
    };
    match kind {
        RuleKind::GaussRadialAngular => {
            if params.radial < 4 || params.angular < 4 {
                return Err(Error::Config {
                    field: "quadrature.radial/angular".into(),
                    message: format!(
                        "gauss rule needs radial >= 4 and angular >= 4, got {} and {}",
                        params.radial, params.angular
                    ),
                });
            }
            Ok(build_gauss(cfg, params.radial, params.angular))
        }
        RuleKind::MonteCarlo => {
            if params.mc_samples < 1000 {
                return Err(Error::Config {
                    field: "quadrature.mc_samples".into(),
                    message: format!(
                        "monte_carlo needs >= 1000 samples, got {}",
                        params.mc_samples
                    ),
                });
            }
            let seed = params.seed.ok_or(Error::MissingSeed)?;
            Ok(build_monte_carlo(cfg, params.mc_samples, seed))
        }
    }
}

fn build_gauss(cfg: &QuantizationConfig, radial: usize, angular: usize) -> QuadratureRule {
    let n = cfg.n;
    let m = cfg.m;
    let (gx, gw) = gauss_legendre_unit(radial);
    let scale = cfg.measure_scale / (2.0f64).powi(n as i32);
    let ang_w = 2.0 * PI / angular as f64;

    // Odometer over n radial indices then n angular indices, lexicographic.
    let total = radial.pow(n as u32) * angular.pow(n as u32);
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; 2 * n];
    loop {
        let xs: Vec<f64> = (0..n).map(|k| gx[idx[k]]).collect();
        let radii = radii_from_cube(&xs);
        let mut w = scale;
        for k in 0..n {
            w *= gw[idx[k]] * (1.0 - xs[k]).powi(m as i32 + k as i32) * ang_w;
        }
        let coords: Vec<C64> = (0..n)
            .map(|k| {
                let theta = 2.0 * PI * idx[n + k] as f64 / angular as f64;
                C64::from_polar(radii[k], theta)
            })
            .collect();
        nodes.push(PointU0::new(coords));
        weights.push(w);

        // Advance the odometer.
        let mut pos = 2 * n;
        loop {
            if pos == 0 {
                return QuadratureRule {
                    nodes,
                    weights,
                    kind: RuleKind::GaussRadialAngular,
                    n,
                    m,
                };
            }
            pos -= 1;
            let limit = if pos < n { radial } else { angular };
            idx[pos] += 1;
            if idx[pos] < limit {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn build_monte_carlo(cfg: &QuantizationConfig, samples: usize, seed: u64) -> QuadratureRule {
    let n = cfg.n;
    let m = cfg.m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let volume = exact::weighted_volume(n, m, cfg.measure_scale);
    let w = volume / samples as f64;
    let mut nodes = Vec::with_capacity(samples);
    for _ in 0..samples {
        // x_k ~ Beta(1, m+k) by inverse CDF, matching the weight density.
        let xs: Vec<f64> = (0..n)
            .map(|k| {
                let b = f64::from(m) + (k as f64 + 1.0);
                let u: f64 = rng.gen();
                1.0 - (1.0 - u).powf(1.0 / b)
            })
            .collect();
        let radii = radii_from_cube(&xs);
        let coords: Vec<C64> = radii
            .iter()
            .map(|&r| {
                let theta: f64 = rng.gen_range(0.0..(2.0 * PI));
                C64::from_polar(r, theta)
            })
            .collect();
        nodes.push(PointU0::new(coords));
    }
    QuadratureRule {
        nodes,
        weights: vec![w; samples],
        kind: RuleKind::MonteCarlo,
        n,
        m,
    }
}

/// Pairwise (balanced-tree) summation: the reduction order is fixed by the
/// slice layout, so results are bit-stable across thread counts.
pub fn pairwise_sum(values: &[C64]) -> C64 {
    if values.len() <= 8 {
        let mut acc = C64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `∫_{U_0} f(ν) e^{-mΦ} dV(ν)` over the rule's nodes.
///
/// Node evaluation is a parallel map; the reduction is a sequential
/// pairwise sum, so the value does not depend on the worker count.
pub fn integrate_weighted<F>(f: F, rule: &QuadratureRule) -> Result<C64>
where
    F: Fn(&PointU0) -> C64 + Sync,
{
    let terms: Vec<C64> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(node, &w)| f(node) * w)
        .collect();
    for (i, t) in terms.iter().enumerate() {
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::NonFiniteNode {
                index: i,
                point: rule.nodes[i].to_string(),
            });
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Normalization constant `c(m) = 1 / ∫ e^{-mΦ} dV`, quadrature route.
pub fn c_constant(rule: &QuadratureRule) -> Result<f64> {
    let v = integrate_weighted(|_| C64::new(1.0, 0.0), rule)?;
    Ok(1.0 / v.re)
}

/// Basis constant `D_I = c(m) ∫ Π_i |ν_i|^{2 q_i} e^{-mΦ} dV`, quadrature
/// route (both factors from the same rule).
pub fn normalization_d(
    exponents: &[u32],
    cfg: &QuantizationConfig,
    rule: &QuadratureRule,
) -> Result<f64> {
    let q: u32 = exponents.iter().sum();
    if q > cfg.m {
        return Err(Error::DegreeExceedsLevel {
            degree: q,
            level: cfg.m,
        });
    }
    let moment = integrate_weighted(
        |p| {
            let mut acc = 1.0;
            for (c, &e) in p.coords.iter().zip(exponents) {
                acc *= c.norm_sqr().powi(e as i32);
            }
            C64::new(acc, 0.0)
        },
        rule,
    )?;
    let volume = integrate_weighted(|_| C64::new(1.0, 0.0), rule)?;
    Ok(moment.re / volume.re)
}
