//! Operators induced on the pullback space, their X-symbols, and the
//! transfer identity `B(p,q) = A(eps(p), eps(q))`.
//!
//! ```bash
//! cargo run --release -p cpnq --example induced_operators
//! ```

use cpnq::berezin::{covariant_symbol, toeplitz_operator, OperatorMatrix};
use cpnq::cpn::{PointU0, QuantizationConfig, SmoothField};
use cpnq::embedding::{
    build_pullback, induced_operator, kernel_invariance_defect, reconstruct_ambient, x_symbol,
    EmbeddedManifold,
};
use cpnq::hilbert::BasisSpec;
use cpnq::quadrature::{build_rule, RuleKind, RuleParams};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let m = 6u32;
    let cfg = QuantizationConfig::new(1, m);
    let basis = BasisSpec::build(cfg.clone());
    let rule = build_rule(
        &cfg,
        RuleKind::GaussRadialAngular,
        &RuleParams::gauss(14, 14),
    )
    .unwrap();
    let manifold = EmbeddedManifold::circle(64);
    let space = build_pullback(&manifold, &basis, 1e-10).unwrap();
    println!(
        "circle pullback at m = {m}: rank {} of dim {}",
        space.rank,
        basis.dim()
    );

    // Induce a Toeplitz operator and compare symbols through both layers.
    let ambient_op = toeplitz_operator(&SmoothField::abs_frac(), &basis, &rule).unwrap();
    let induced = induced_operator(&ambient_op, &space).unwrap();
    println!();
    println!(
        "{:>6} {:>6} {:>26} {:>26} {:>12}",
        "i", "j", "B(p,q)", "A(eps(p),eps(q))", "abs diff"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut shown = 0;
    while shown < 6 {
        let i = rng.gen_range(0..manifold.sample_count());
        let j = rng.gen_range(0..manifold.sample_count());
        let (p, q) = (&manifold.points[i], &manifold.points[j]);
        let den = cpnq::hilbert::kernel_l(p, q, &cfg);
        if den.norm() < 1e-2 * (4.0f64).powi(m as i32 / 2) {
            continue; // skip near-antipodal pairs where the symbol blows up
        }
        let b = x_symbol(&induced, p, q, &space).unwrap();
        let a = covariant_symbol(&ambient_op, p, q, &basis).unwrap();
        println!(
            "{i:>6} {j:>6} {:>+13.8}{:+.8}i {:>+13.8}{:+.8}i {:>12.3e}",
            b.re,
            b.im,
            a.re,
            a.im,
            (b - a).norm()
        );
        shown += 1;
    }

    // Frobenius-minimal reconstruction of the ambient operator.
    let (_, fro, spectral) = reconstruct_ambient(&induced, &space);
    println!();
    println!("reconstructed ambient operator: |.|_F = {fro:.6}, |.|_2 = {spectral:.6}");
    println!(
        "kernel invariance defect (full-rank sampling): {:.3e}",
        kernel_invariance_defect(&ambient_op, &space)
    );

    // A deficient sampling shows the defect the min-norm convention absorbs.
    let sparse = EmbeddedManifold::custom(
        (0..4).map(|k| vec![k as f64]).collect(),
        (0..4)
            .map(|k| PointU0::scalar(C64::new(0.3 * k as f64 - 0.4, 0.2)))
            .collect(),
        "four chart points".into(),
    )
    .unwrap();
    let sparse_space = build_pullback(&sparse, &basis, 1e-10).unwrap();
    println!();
    println!(
        "4-point sampling: rank {} / dim {}, invariance defect of T_f = {:.4}",
        sparse_space.rank,
        basis.dim(),
        kernel_invariance_defect(&ambient_op, &sparse_space)
    );
    let id_defect = kernel_invariance_defect(&OperatorMatrix::identity(basis.dim()), &sparse_space);
    println!("                  invariance defect of Id  = {id_defect:.3e}");
}
