//! Berezin covariant symbols, the star product, Toeplitz quantization and
//! semiclassical convergence studies.
//!
//! The star-product integrand is evaluated in its cancelled form
//! `⟨ψ_μ, Â1 ψ_ν⟩⟨ψ_ν, Â2 ψ_μ⟩ e^{-mΦ(ν)} / L(μ, μ̄)`: the off-diagonal
//! symbol alone has poles where the kernel vanishes, the product does not.

use crate::cpn::{poisson_bracket_fs, PointU0, QuantizationConfig, SmoothField};
use crate::error::Error;
use crate::exact;
use crate::fit;
use crate::hilbert::{coherent_state, kernel_l, BasisSpec};
use crate::quadrature::{
    build_rule, integrate_weighted, pairwise_sum, QuadratureRule, RuleKind, RuleParams,
};
use crate::Result;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A bounded operator on the level-`m` space, as a matrix in the
/// orthonormal monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<C64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operators are square");
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn scaled_identity(dim: usize, c: C64) -> Self {
        Self::new(DMatrix::identity(dim, dim) * c)
    }

    /// Rank-one projector `|Φ_k⟩⟨Φ_k|`.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut entries = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        entries[(k, k)] = C64::new(1.0, 0.0);
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn compose(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new(&self.entries * &other.entries)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    fn check_dim(&self, basis: &BasisSpec) -> Result<()> {
        if self.dim() != basis.dim() {
            return Err(Error::BasisMismatch {
                expected: basis.dim(),
                got: self.dim(),
            });
        }
        Ok(())
    }
}

/// Relative scale of the kernel at a pair of points, used to detect
/// genuinely vanishing denominators: `(1+|μ|²)^{m/2} (1+|ν|²)^{m/2}`.
fn kernel_scale(mu: &PointU0, nu: &PointU0, cfg: &QuantizationConfig) -> f64 {
    let m = f64::from(cfg.m);
    ((1.0 + mu.norm_sq()) * (1.0 + nu.norm_sq())).powf(m / 2.0)
}

/// Covariant symbol `A(ν, μ̄) = ⟨ψ_ν, Â ψ_μ⟩ / ⟨ψ_ν, ψ_μ⟩`.
///
/// Errors where the kernel `(1 + μ̄·ν)^m` vanishes, which happens at
/// genuinely off-diagonal pairs.
pub fn covariant_symbol(
    op: &OperatorMatrix,
    nu: &PointU0,
    mu: &PointU0,
    basis: &BasisSpec,
) -> Result<C64> {
    op.check_dim(basis)?;
    let den = kernel_l(nu, mu, &basis.cfg);
    if den.norm() < 1e-12 * kernel_scale(mu, nu, &basis.cfg) {
        return Err(Error::VanishingKernel {
            at: format!("(nu, mu) = ({nu}, {mu})"),
        });
    }
    let psi_nu = coherent_state(nu, basis).coeffs;
    let psi_mu = coherent_state(mu, basis).coeffs;
    let num = psi_nu.dotc(&(&op.entries * &psi_mu));
    Ok(num / den)
}

/// Plain-function form of an off-diagonal symbol.
pub type SymbolClosure = Arc<dyn Fn(&PointU0, &PointU0) -> C64 + Send + Sync>;

/// An off-diagonal symbol `A(ν, μ̄)`, either backed by an operator matrix
/// (so the kernel-weighted numerator is available in closed form) or by a
/// plain function of the two points.
#[derive(Clone)]
pub enum SymbolFunction {
    Operator(Arc<OperatorMatrix>),
    Closure(SymbolClosure),
}

impl SymbolFunction {
    pub fn of_operator(op: OperatorMatrix) -> Self {
        SymbolFunction::Operator(Arc::new(op))
    }

    pub fn from_fn(f: impl Fn(&PointU0, &PointU0) -> C64 + Send + Sync + 'static) -> Self {
        SymbolFunction::Closure(Arc::new(f))
    }

    /// Symbol value `A(ν, μ̄)`.
    pub fn eval(&self, nu: &PointU0, mu: &PointU0, basis: &BasisSpec) -> Result<C64> {
        match self {
            SymbolFunction::Operator(op) => covariant_symbol(op, nu, mu, basis),
            SymbolFunction::Closure(f) => Ok(f(nu, mu)),
        }
    }

    /// Diagonal value `A(μ, μ̄)` (always defined).
    pub fn diagonal(&self, mu: &PointU0, basis: &BasisSpec) -> Result<C64> {
        self.eval(mu, mu, basis)
    }
}

enum PreparedFactor {
    Row(DVector<C64>),
    Col(DVector<C64>),
    Fun(SymbolClosure),
}

/// Berezin star product
/// `(A1 ∗ A2)(μ, μ̄) = c(m) ∫ A1(μ, ν̄) A2(ν, μ̄) L(μ,ν̄)L(ν,μ̄)/L(μ,μ̄) e^{-mΦ(ν)} dV(ν)`
/// over the given rule, with the kernel factors cancelled into the
/// numerators so kernel zeros never divide.
pub fn star_product(
    a1: &SymbolFunction,
    a2: &SymbolFunction,
    mu: &PointU0,
    basis: &BasisSpec,
    rule: &QuadratureRule,
) -> Result<C64> {
    let cfg = &basis.cfg;
    let phi_mu = basis.eval_all(mu);
    let l_diag = kernel_l(mu, mu, cfg).re;

    // N1(ν) = ⟨ψ_μ, Â1 ψ_ν⟩ = Σ_J (Φ(μ)ᵀ A1)_J conj(Φ_J(ν))
    // N2(ν) = ⟨ψ_ν, Â2 ψ_μ⟩ = Σ_I Φ_I(ν) (A2 conj(Φ(μ)))_I
    let left = match a1 {
        SymbolFunction::Operator(op) => {
            op.check_dim(basis)?;
            PreparedFactor::Row(op.entries.transpose() * &phi_mu)
        }
        SymbolFunction::Closure(f) => PreparedFactor::Fun(f.clone()),
    };
    let right = match a2 {
        SymbolFunction::Operator(op) => {
            op.check_dim(basis)?;
            PreparedFactor::Col(&op.entries * phi_mu.map(|z| z.conj()))
        }
        SymbolFunction::Closure(f) => PreparedFactor::Fun(f.clone()),
    };

    let integral = integrate_weighted(
        |nu| {
            let phi_nu = basis.eval_all(nu);
            let n1 = match &left {
                PreparedFactor::Row(row) => row.dot(&phi_nu.map(|z| z.conj())),
                PreparedFactor::Fun(f) => f(mu, nu) * kernel_l(mu, nu, cfg),
                PreparedFactor::Col(_) => unreachable!(),
            };
            let n2 = match &right {
                PreparedFactor::Col(col) => phi_nu.dot(col),
                PreparedFactor::Fun(f) => f(nu, mu) * kernel_l(nu, mu, cfg),
                PreparedFactor::Row(_) => unreachable!(),
            };
            n1 * n2 / l_diag
        },
        rule,
    )?;
    let c = exact::c_constant(cfg.n, cfg.m, cfg.measure_scale);
    Ok(c * integral)
}

/// Symbol of the composition `Â1 ∘ Â2` at the diagonal point: the exact
/// value the star-product integral approximates.
pub fn star_via_composition(
    op1: &OperatorMatrix,
    op2: &OperatorMatrix,
    mu: &PointU0,
    basis: &BasisSpec,
) -> Result<C64> {
    covariant_symbol(&op1.compose(op2), mu, mu, basis)
}

/// Toeplitz quantization of a function:
/// `T_f[I,J] = c(m) ∫ f(ν) conj(Φ_I(ν)) Φ_J(ν) e^{-mΦ} dV`.
pub fn toeplitz_operator(
    f: &SmoothField,
    basis: &BasisSpec,
    rule: &QuadratureRule,
) -> Result<OperatorMatrix> {
    let dim = basis.dim();
    // Parallel map over nodes, then a fixed-order pairwise sum per entry:
    // the result is independent of the worker count.
    let evals: Vec<(C64, DVector<C64>)> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(node, &w)| (f.eval(node) * w, basis.eval_all(node)))
        .collect();
    for (i, (fv, _)) in evals.iter().enumerate() {
        if !fv.re.is_finite() || !fv.im.is_finite() {
            return Err(Error::NonFiniteNode {
                index: i,
                point: rule.nodes[i].to_string(),
            });
        }
    }
    let c = exact::c_constant(basis.cfg.n, basis.cfg.m, basis.cfg.measure_scale);
    let entries: Vec<C64> = (0..dim * dim)
        .into_par_iter()
        .map(|e| {
            let (i, j) = (e / dim, e % dim);
            let terms: Vec<C64> = evals
                .iter()
                .map(|(fw, phi)| fw * phi[i].conj() * phi[j])
                .collect();
            c * pairwise_sum(&terms)
        })
        .collect();
    Ok(OperatorMatrix::new(DMatrix::from_fn(dim, dim, |i, j| {
        entries[i * dim + j]
    })))
}

/// An `m`-indexed family of Toeplitz operators generated by a fixed
/// function; quantizing at successive levels yields the operator families
/// whose symbols the correspondence principle speaks about.
#[derive(Clone)]
pub struct ToeplitzFamily {
    pub field: SmoothField,
}

impl ToeplitzFamily {
    pub fn new(field: SmoothField) -> Self {
        Self { field }
    }

    pub fn operator(&self, basis: &BasisSpec, rule: &QuadratureRule) -> Result<OperatorMatrix> {
        toeplitz_operator(&self.field, basis, rule)
    }
}

/// Which route evaluates the star product inside a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarRoute {
    /// Composition symbol (exact; the integral route is validated against
    /// it separately).
    Composition,
    /// The quadrature integral.
    Integral,
}

/// Tuning knobs for [`correspondence_study`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StudyOptions {
    /// Gauss radial count is `m/2 + radial_margin`.
    pub radial_margin: usize,
    /// Gauss angular count is `m + angular_margin`.
    pub angular_margin: usize,
    pub route: StarRoute,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            radial_margin: 8,
            angular_margin: 8,
            route: StarRoute::Composition,
        }
    }
}

fn complex_parts(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Output of a correspondence study: per-level product and commutator
/// defects with their fitted log-log slopes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub m: Vec<u32>,
    pub e0: Vec<f64>,
    pub e1: Vec<f64>,
    /// Fitted complex constant relating the scaled commutator to the
    /// Poisson bracket, as `[re, im]`.
    pub kappa_fit: Option<[f64; 2]>,
    pub slope_e0: Option<f64>,
    pub slope_e1: Option<f64>,
    /// R² of the `e0` log-log fit.
    pub r2: Option<f64>,
    pub r2_e1: Option<f64>,
    pub flags: Vec<String>,
}

/// Track the correspondence principle along an ascending list of levels.
///
/// For each `m` the two functions are Toeplitz-quantized and the study
/// records `e0(m) = |(A1∗A2)(μ) − A1(μ)A2(μ)|` together with the distance
/// `e1(m)` of the scaled commutator `m(A1∗A2 − A2∗A1)(μ)` from its fitted
/// limit `κ·{f1,f2}_FS(μ)`. The limit is extrapolated from the two largest
/// levels; slopes come from log-log least squares.
pub fn correspondence_study(
    f1: &SmoothField,
    f2: &SmoothField,
    mu: &PointU0,
    m_list: &[u32],
    opts: &StudyOptions,
) -> Result<ConvergenceReport> {
    assert!(
        m_list.windows(2).all(|w| w[0] < w[1]),
        "m_list must be ascending"
    );
    assert!(m_list.iter().all(|&m| m >= 2), "levels must be >= 2");
    let n = mu.dim();

    struct LevelData {
        e0: f64,
        v: C64, // m · (A1∗A2 − A2∗A1)(μ)
    }

    let per_level: Vec<(u32, std::result::Result<LevelData, String>)> = m_list
        .par_iter()
        .map(|&m| {
            let run = || -> Result<LevelData> {
                let cfg = QuantizationConfig::new(n, m);
                let radial = (m as usize) / 2 + opts.radial_margin;
                let angular = m as usize + opts.angular_margin;
                let rule = build_rule(
                    &cfg,
                    RuleKind::GaussRadialAngular,
                    &RuleParams::gauss(radial, angular),
                )?;
                let basis = BasisSpec::build(cfg.clone());
                let t1 = toeplitz_operator(f1, &basis, &rule)?;
                let t2 = toeplitz_operator(f2, &basis, &rule)?;
                let a1 = covariant_symbol(&t1, mu, mu, &basis)?;
                let a2 = covariant_symbol(&t2, mu, mu, &basis)?;
                let (s12, s21) = match opts.route {
                    StarRoute::Composition => (
                        star_via_composition(&t1, &t2, mu, &basis)?,
                        star_via_composition(&t2, &t1, mu, &basis)?,
                    ),
                    StarRoute::Integral => {
                        // The star integrand carries angular charge up to 2m.
                        let rule2 = build_rule(
                            &cfg,
                            RuleKind::GaussRadialAngular,
                            &RuleParams::gauss(
                                m as usize + opts.radial_margin,
                                2 * m as usize + opts.angular_margin,
                            ),
                        )?;
                        let s1 = SymbolFunction::of_operator(t1.clone());
                        let s2 = SymbolFunction::of_operator(t2.clone());
                        (
                            star_product(&s1, &s2, mu, &basis, &rule2)?,
                            star_product(&s2, &s1, mu, &basis, &rule2)?,
                        )
                    }
                };
                Ok(LevelData {
                    e0: (s12 - a1 * a2).norm(),
                    v: f64::from(m) * (s12 - s21),
                })
            };
            (m, run().map_err(|e| e.to_string()))
        })
        .collect();

    let mut ms = Vec::new();
    let mut e0 = Vec::new();
    let mut vs = Vec::new();
    let mut flags = Vec::new();
    for (m, res) in per_level {
        match res {
            Ok(d) => {
                ms.push(m);
                e0.push(d.e0);
                vs.push(d.v);
            }
            Err(msg) => flags.push(format!("m={m}: {msg}")),
        }
    }

    // Extrapolate the commutator limit from the two largest levels
    // (v(m) = α + β/m: the 1/m term cancels exactly).
    let bracket = poisson_bracket_fs(f1, f2, mu);
    let (kappa, alpha) = if ms.len() >= 2 && bracket.norm() > 1e-12 {
        let k = ms.len() - 1;
        let (m1, m0) = (f64::from(ms[k]), f64::from(ms[k - 1]));
        let alpha = (m1 * vs[k] - m0 * vs[k - 1]) / (m1 - m0);
        (Some(alpha / bracket), alpha)
    } else {
        if bracket.norm() <= 1e-12 && !ms.is_empty() {
            flags.push("bracket vanishes at the base point; commutator compared to 0".into());
        }
        (None, C64::new(0.0, 0.0))
    };
    let e1: Vec<f64> = vs.iter().map(|v| (v - alpha).norm()).collect();

    let ms_f: Vec<f64> = ms.iter().map(|&m| f64::from(m)).collect();
    let fit0 = fit::fit_log_log(&ms_f, &e0);
    let fit1 = fit::fit_log_log(&ms_f, &e1);

    Ok(ConvergenceReport {
        m: ms,
        e0,
        e1,
        kappa_fit: kappa.map(complex_parts),
        slope_e0: fit0.map(|f| f.0),
        slope_e1: fit1.map(|f| f.0),
        r2: fit0.map(|f| f.1),
        r2_e1: fit1.map(|f| f.1),
        flags,
    })
}
