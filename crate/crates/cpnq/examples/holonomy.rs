//! Path holonomy: the discrete product of transition amplitudes against
//! the integral formula, with the closed-form circle phase.
//!
//! ```bash
//! cargo run --release -p cpnq --example holonomy
//! ```

use cpnq::cpn::QuantizationConfig;
use cpnq::embedding::EmbeddedManifold;
use cpnq::odzijewicz::{
    holonomy_agreement, holonomy_discrete, holonomy_integral, holonomy_integral_phase,
    pullback_path_amplitude, LineBundleKernel, PathGamma,
};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn main() {
    let m = 2u32;
    let kernel = LineBundleKernel::new(QuantizationConfig::new(1, m));

    // Unit circle traversed once: phase = -2 pi m r^2/(1+r^2).
    let r = 1.0f64;
    let gamma = PathGamma::circle(1, C64::new(0.0, 0.0), r, 1.0, 200_000);
    let phase = holonomy_integral_phase(&gamma, &kernel);
    let closed_form = -2.0 * PI * f64::from(m) * r * r / (1.0 + r * r);
    println!("unit circle, m = {m}:");
    println!("  integral phase  = {phase:.10}");
    println!("  closed form     = {closed_form:.10}");
    println!(
        "  |holonomy|      = {:.12}",
        holonomy_integral(&gamma, &kernel).norm()
    );

    // Refinement study: the discrete product converges at first order.
    let report = holonomy_agreement(
        |steps| PathGamma::circle(1, C64::new(0.0, 0.0), 1.0, 1.0, steps),
        &[16, 32, 64, 128, 256, 512],
        &kernel,
    );
    println!();
    println!("{:>8} {:>24} {:>12}", "N", "discrete product", "abs err");
    for row in &report.rows {
        println!(
            "{:>8} {:>+12.8}{:+.8}i {:>12.3e}",
            row.n_steps, row.discrete[0], row.discrete[1], row.abs_err
        );
    }
    println!("fitted order: {:.3}", report.fitted_order.unwrap());

    // Reversal conjugates the holonomy.
    let fwd = holonomy_discrete(&gamma, &kernel);
    let back = holonomy_discrete(&gamma.reversed(), &kernel);
    println!();
    println!(
        "reversal check |h(gamma) - conj(h(reversed))| = {:.3e}",
        (fwd - back.conj()).norm()
    );

    // Pullback of the parameter circle through the embedding reproduces the
    // ambient loop holonomy.
    let manifold = EmbeddedManifold::circle(8);
    let samples = 5000usize;
    let mut params: Vec<Vec<f64>> = (0..samples)
        .map(|j| vec![2.0 * PI * j as f64 / samples as f64])
        .collect();
    params.push(vec![0.0]);
    let pulled = pullback_path_amplitude(&manifold, &params, false, &kernel).unwrap();
    let ambient = holonomy_integral(
        &PathGamma::circle(1, C64::new(0.0, 0.0), 1.0, 1.0, samples),
        &kernel,
    );
    println!(
        "pullback loop amplitude vs ambient: {:.3e}",
        (pulled - ambient).norm()
    );
}
