//! The weighted-integral normalization constants through both routes:
//! Gauss quadrature against the Beta/Dirichlet closed forms, plus a seeded
//! Monte-Carlo cross-check.
//!
//! ```bash
//! cargo run --release -p cpnq --example normalization_constants
//! ```

use cpnq::cpn::QuantizationConfig;
use cpnq::exact;
use cpnq::quadrature::{
    build_rule, c_constant, integrate_weighted, normalization_d, RuleKind, RuleParams,
};
use num_complex::Complex64 as C64;

fn main() {
    println!("c(m) on CP^1 (quadrature vs closed form):");
    for m in [1u32, 2, 4, 8] {
        let cfg = QuantizationConfig::new(1, m);
        let rule = build_rule(
            &cfg,
            RuleKind::GaussRadialAngular,
            &RuleParams::gauss(16, 16),
        )
        .unwrap();
        let quad = c_constant(&rule).unwrap();
        let closed = exact::c_constant(1, m, cfg.measure_scale);
        println!(
            "  m = {m}: {quad:.12}  vs  {closed:.12}  (diff {:.2e})",
            (quad - closed).abs()
        );
    }

    println!();
    println!("D_q on CP^1 at m = 4:");
    let cfg = QuantizationConfig::new(1, 4);
    let rule = build_rule(
        &cfg,
        RuleKind::GaussRadialAngular,
        &RuleParams::gauss(12, 12),
    )
    .unwrap();
    for q in 0..=4u32 {
        let quad = normalization_d(&[q], &cfg, &rule).unwrap();
        let closed = exact::normalization_d(&[q], 4);
        println!("  q = {q}: {quad:.12}  vs  {closed:.12}");
    }

    println!();
    println!("D_I on CP^2 at m = 3 (Dirichlet closed form route):");
    let cfg2 = QuantizationConfig::new(2, 3);
    let rule2 = build_rule(
        &cfg2,
        RuleKind::GaussRadialAngular,
        &RuleParams::gauss(10, 10),
    )
    .unwrap();
    for (q1, q2) in [(0u32, 0u32), (1, 0), (1, 1), (2, 1), (3, 0)] {
        let quad = normalization_d(&[q1, q2], &cfg2, &rule2).unwrap();
        let closed = exact::normalization_d(&[q1, q2], 3);
        println!("  ({q1},{q2}): {quad:.12}  vs  {closed:.12}");
    }

    println!();
    println!("Monte-Carlo route for the weighted volume (n = 1, m = 3):");
    let cfg = QuantizationConfig::new(1, 3);
    let gauss = build_rule(
        &cfg,
        RuleKind::GaussRadialAngular,
        &RuleParams::gauss(20, 20),
    )
    .unwrap();
    let f = |p: &cpnq::cpn::PointU0| C64::new((-p.norm_sq() / (1.0 + p.norm_sq())).exp(), 0.0);
    let reference = integrate_weighted(f, &gauss).unwrap().re;
    for seed in [1u64, 2, 3] {
        let mc = build_rule(
            &cfg,
            RuleKind::MonteCarlo,
            &RuleParams::monte_carlo(20_000, seed),
        )
        .unwrap();
        let estimate = integrate_weighted(f, &mc).unwrap().re;
        println!(
            "  seed {seed}: {estimate:.8}  (gauss {reference:.8}, diff {:+.2e})",
            estimate - reference
        );
    }
}
