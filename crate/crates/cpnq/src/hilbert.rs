//! The level-`m` Hilbert space on the chart: polynomials of degree at most
//! `m` in `n` variables with the weighted inner product, its orthonormal
//! monomial basis, coherent states and reproducing kernel.

use crate::cpn::{PointU0, QuantizationConfig};
use crate::error::Error;
use crate::exact;
use crate::quadrature::{integrate_weighted, QuadratureRule};
use crate::Result;
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use std::cmp::Ordering;

/// Exponent tuple `(q_1, …, q_n)` of one basis monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    pub exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    /// Graded-lexicographic: by total degree, then by the exponent tuple.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exponents.cmp(&other.exponents))
    }
}

/// Number of monomials of degree at most `m` in `n` variables: `C(n+m, n)`.
pub fn basis_dim(n: usize, m: u32) -> usize {
    exact::binomial(n as u32 + m, n as u32).round() as usize
}

/// The ordered orthonormal basis `Φ_I = μ^I / √D_I` of one level.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    pub cfg: QuantizationConfig,
    pub indices: Vec<MultiIndex>,
    pub d: Vec<f64>,
}

impl BasisSpec {
    /// Build with the closed-form Dirichlet constants `D_I`.
    pub fn build(cfg: QuantizationConfig) -> Self {
        let indices = enumerate_indices(cfg.n, cfg.m);
        let d = indices
            .iter()
            .map(|i| exact::normalization_d(&i.exponents, cfg.m))
            .collect();
        Self { cfg, indices, d }
    }

    /// Build with `D_I` taken from the quadrature route instead. Intended
    /// for cross-checks against [`BasisSpec::build`].
    pub fn build_with_rule(cfg: QuantizationConfig, rule: &QuadratureRule) -> Result<Self> {
        let indices = enumerate_indices(cfg.n, cfg.m);
        let d = indices
            .iter()
            .map(|i| crate::quadrature::normalization_d(&i.exponents, &cfg, rule))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { cfg, indices, d })
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Position of a multi-index in the graded-lex ordering.
    pub fn position(&self, index: &MultiIndex) -> Option<usize> {
        self.indices.binary_search(index).ok()
    }

    /// `Φ_I(μ)` for the `k`-th basis element.
    pub fn eval_index(&self, k: usize, mu: &PointU0) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for (c, &e) in mu.coords.iter().zip(&self.indices[k].exponents) {
            acc *= c.powu(e);
        }
        acc / self.d[k].sqrt()
    }

    /// All basis values at `μ`, sharing one coordinate power table.
    pub fn eval_all(&self, mu: &PointU0) -> DVector<C64> {
        let n = self.cfg.n;
        let m = self.cfg.m as usize;
        let mut pows = vec![vec![C64::new(1.0, 0.0); m + 1]; n];
        for (i, c) in mu.coords.iter().enumerate() {
            for e in 1..=m {
                pows[i][e] = pows[i][e - 1] * c;
            }
        }
        DVector::from_fn(self.dim(), |k, _| {
            let mut acc = C64::new(1.0, 0.0);
            for (i, &e) in self.indices[k].exponents.iter().enumerate() {
                acc *= pows[i][e as usize];
            }
            acc / self.d[k].sqrt()
        })
    }

    fn check_len(&self, v: &SectionVector) -> Result<()> {
        if v.coeffs.len() != self.dim() {
            return Err(Error::BasisMismatch {
                expected: self.dim(),
                got: v.coeffs.len(),
            });
        }
        Ok(())
    }
}

fn enumerate_indices(n: usize, m: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(basis_dim(n, m));
    let mut current = vec![0u32; n];
    for q in 0..=m {
        push_compositions(q, 0, &mut current, &mut out);
    }
    out
}

fn push_compositions(
    remaining: u32,
    slot: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for v in 0..=remaining {
        current[slot] = v;
        push_compositions(remaining - v, slot + 1, current, out);
    }
}

/// Coefficient vector of a section in the orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionVector {
    pub coeffs: DVector<C64>,
}

impl SectionVector {
    pub fn new(coeffs: DVector<C64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(DVector::from_element(dim, C64::new(0.0, 0.0)))
    }

    /// Unit vector on one basis element.
    pub fn basis_element(dim: usize, k: usize) -> Self {
        let mut coeffs = DVector::from_element(dim, C64::new(0.0, 0.0));
        coeffs[k] = C64::new(1.0, 0.0);
        Self::new(coeffs)
    }
}

/// `⟨f, g⟩ = Σ_I conj(f_I) g_I`, conjugate-linear in the first slot.
pub fn inner_product(f: &SectionVector, g: &SectionVector, basis: &BasisSpec) -> Result<C64> {
    basis.check_len(f)?;
    basis.check_len(g)?;
    Ok(f.coeffs.dotc(&g.coeffs))
}

/// The same inner product through the weighted integral
/// `c(m) ∫ conj(f(ν)) g(ν) e^{-mΦ} dV`, with `c(m)` taken from the same
/// rule so the whole value is a pure quadrature route.
pub fn inner_product_quadrature(
    f: &SectionVector,
    g: &SectionVector,
    basis: &BasisSpec,
    rule: &QuadratureRule,
) -> Result<C64> {
    basis.check_len(f)?;
    basis.check_len(g)?;
    let num = integrate_weighted(
        |p| {
            let phi = basis.eval_all(p);
            let fv = (phi.transpose() * &f.coeffs)[(0, 0)];
            let gv = (phi.transpose() * &g.coeffs)[(0, 0)];
            fv.conj() * gv
        },
        rule,
    )?;
    let den = integrate_weighted(|_| C64::new(1.0, 0.0), rule)?;
    Ok(num / den.re)
}

/// Pointwise evaluation `Ψ(μ) = Σ_I Ψ_I Φ_I(μ)` by the monomial sum.
pub fn eval_section(v: &SectionVector, mu: &PointU0, basis: &BasisSpec) -> Result<C64> {
    basis.check_len(v)?;
    let phi = basis.eval_all(mu);
    Ok((phi.transpose() * &v.coeffs)[(0, 0)])
}

/// Coherent state `ψ_μ = Σ_I conj(Φ_I(μ)) Φ_I` as a coefficient vector.
pub fn coherent_state(mu: &PointU0, basis: &BasisSpec) -> SectionVector {
    SectionVector::new(basis.eval_all(mu).map(|z| z.conj()))
}

/// Reproducing kernel in closed form:
/// `L(μ, ν) = ⟨ψ_μ, ψ_ν⟩ = ψ_ν(μ) = (1 + ν̄·μ)^m`.
pub fn kernel_l(mu: &PointU0, nu: &PointU0, cfg: &QuantizationConfig) -> C64 {
    (C64::new(1.0, 0.0) + nu.pair(mu)).powu(cfg.m)
}

/// `|⟨ψ_μ, Ψ⟩ − Ψ(μ)|`: coefficient-space pairing against pointwise
/// evaluation. Algebraically zero; the residual is pure rounding.
pub fn reproducing_check(v: &SectionVector, mu: &PointU0, basis: &BasisSpec) -> Result<f64> {
    let state = coherent_state(mu, basis);
    let paired = inner_product(&state, v, basis)?;
    let direct = eval_section(v, mu, basis)?;
    Ok((paired - direct).norm())
}

/// `|c(m) ∫ ⟨Ψ1, ψ_μ⟩⟨ψ_μ, Ψ2⟩ e^{-mΦ} dV − ⟨Ψ1, Ψ2⟩|`.
pub fn resolution_identity_residual(
    v1: &SectionVector,
    v2: &SectionVector,
    basis: &BasisSpec,
    rule: &QuadratureRule,
) -> Result<f64> {
    basis.check_len(v1)?;
    basis.check_len(v2)?;
    let num = integrate_weighted(
        |p| {
            let phi = basis.eval_all(p);
            // ⟨Ψ1, ψ_μ⟩ = conj(Ψ1(μ)) and ⟨ψ_μ, Ψ2⟩ = Ψ2(μ).
            let e1 = (phi.transpose() * &v1.coeffs)[(0, 0)];
            let e2 = (phi.transpose() * &v2.coeffs)[(0, 0)];
            e1.conj() * e2
        },
        rule,
    )?;
    let den = integrate_weighted(|_| C64::new(1.0, 0.0), rule)?;
    let exact_ip = inner_product(v1, v2, basis)?;
    Ok((num / den.re - exact_ip).norm())
}
