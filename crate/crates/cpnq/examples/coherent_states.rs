//! Coherent states and the reproducing kernel: the basis-sum evaluation
//! against the closed form, the reproducing identity, the resolution of
//! identity and the finite-rank overcompleteness of the state family.
//!
//! ```bash
//! cargo run --release -p cpnq --example coherent_states
//! ```

use cpnq::cpn::{PointU0, QuantizationConfig};
use cpnq::hilbert::{
    basis_dim, coherent_state, eval_section, kernel_l, reproducing_check,
    resolution_identity_residual, BasisSpec, SectionVector,
};
use cpnq::quadrature::{build_rule, RuleKind, RuleParams};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = QuantizationConfig::new(1, 4);
    let basis = BasisSpec::build(cfg.clone());
    println!("n = {}, m = {}, dim H_m = {}", cfg.n, cfg.m, basis.dim());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let mu = PointU0::scalar(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let nu = PointU0::scalar(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let by_sum = eval_section(&coherent_state(&mu, &basis), &nu, &basis).unwrap();
        let closed = kernel_l(&nu, &mu, &cfg);
        worst = worst.max((by_sum - closed).norm());
    }
    println!("psi_mu(nu) basis sum vs (1 + conj(mu) nu)^m over 200 pairs: max err {worst:.3e}");

    let mut worst_repro: f64 = 0.0;
    for _ in 0..100 {
        let v = SectionVector::new(DVector::from_fn(basis.dim(), |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }));
        let p = PointU0::scalar(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        worst_repro = worst_repro.max(reproducing_check(&v, &p, &basis).unwrap());
    }
    println!("reproducing identity <psi_mu, S> = S(mu): max residual {worst_repro:.3e}");

    let rule = build_rule(
        &cfg,
        RuleKind::GaussRadialAngular,
        &RuleParams::gauss(14, 14),
    )
    .unwrap();
    let phi0 = SectionVector::basis_element(basis.dim(), 0);
    println!(
        "resolution of identity on Phi_0: residual {:.3e}",
        resolution_identity_residual(&phi0, &phi0, &basis, &rule).unwrap()
    );

    // The coherent family spans only dim H_m directions: the Gram matrix of
    // dim+1 states is singular while dim states stay positive definite.
    let dim = basis_dim(cfg.n, cfg.m);
    let pts: Vec<PointU0> = (0..=dim)
        .map(|_| PointU0::scalar(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let gram_ok = DMatrix::from_fn(dim, dim, |i, j| kernel_l(&pts[i], &pts[j], &cfg));
    let gram_over = DMatrix::from_fn(dim + 1, dim + 1, |i, j| kernel_l(&pts[i], &pts[j], &cfg));
    let svals = gram_over.svd(false, false).singular_values;
    println!();
    println!(
        "Gram of {dim} states: Cholesky {}",
        if gram_ok.cholesky().is_some() {
            "succeeds"
        } else {
            "fails"
        }
    );
    println!(
        "Gram of {} states: smallest/largest singular value = {:.3e}",
        dim + 1,
        svals.min() / svals.max()
    );
}
