//! The pullback Hilbert space of the circle: restriction-matrix ranks,
//! quotient norms and the two coherent-state constructions.
//!
//! ```bash
//! cargo run --release -p cpnq --example pullback_circle
//! ```

use cpnq::cpn::QuantizationConfig;
use cpnq::embedding::{
    build_pullback, orthonormal_pullback_basis, pullback_coherent_state, pullback_norm,
    rawnsley_pullback_state, EmbeddedManifold, PullbackSection,
};
use cpnq::hilbert::BasisSpec;
use nalgebra::DVector;
use num_complex::Complex64 as C64;

fn main() {
    let m = 4u32;
    let basis = BasisSpec::build(QuantizationConfig::new(1, m));
    println!("ambient dim at m = {m}: {}", basis.dim());
    println!();

    println!("{:>10} {:>6} {:>8}", "samples", "rank", "nullity");
    for samples in [3usize, 4, 16, 64] {
        let manifold = EmbeddedManifold::circle(samples);
        let space = build_pullback(&manifold, &basis, 1e-10).unwrap();
        println!("{samples:>10} {:>6} {:>8}", space.rank, space.nullity());
    }

    let manifold = EmbeddedManifold::circle(64);
    let space = build_pullback(&manifold, &basis, 1e-10).unwrap();
    println!();
    println!("singular values of the restriction matrix (64 samples):");
    for s in space.singular_values.iter() {
        print!("  {s:.6}");
    }
    println!();

    // Quotient norms of pulled-back basis sections: unique preimages keep
    // their ambient norm.
    println!();
    println!("quotient norms of eps*Phi_I: ");
    for k in 0..basis.dim() {
        let mut e = DVector::from_element(basis.dim(), C64::new(0.0, 0.0));
        e[k] = C64::new(1.0, 0.0);
        let s = PullbackSection::from_ambient(&space, &e);
        print!("  {:.6}", pullback_norm(&s));
    }
    println!();

    // With full rank the Rawnsley construction reproduces the pullback
    // coherent states.
    let etas = orthonormal_pullback_basis(&space).unwrap();
    println!();
    println!("orthonormal pullback basis size: {}", etas.len());
    let p = &manifold.points[5];
    let rawnsley = rawnsley_pullback_state(p, &space).unwrap();
    let pulled = pullback_coherent_state(p, &space);
    let diff = (rawnsley.values.clone() - pulled.values.clone()).norm() / pulled.values.norm();
    println!("Rawnsley state vs pullback state at a sample point: relative diff {diff:.3e}");

    let diag = pulled.eval_at(&space, p);
    println!(
        "Psi_p(p) = {:.6} (closed form {:.6})",
        diag.re,
        (1.0 + p.norm_sq()).powi(m as i32)
    );
}
