//! Covariant symbols and the Berezin star product: the quadrature integral
//! against the exact composition symbol.
//!
//! ```bash
//! cargo run --release -p cpnq --example star_product
//! ```

use cpnq::berezin::{
    covariant_symbol, star_product, star_via_composition, toeplitz_operator, OperatorMatrix,
    SymbolFunction,
};
use cpnq::cpn::{PointU0, QuantizationConfig, SmoothField};
use cpnq::hilbert::BasisSpec;
use cpnq::quadrature::{build_rule, RuleKind, RuleParams};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let m = 5u32;
    let cfg = QuantizationConfig::new(1, m);
    let basis = BasisSpec::build(cfg.clone());
    let rule = build_rule(
        &cfg,
        RuleKind::GaussRadialAngular,
        &RuleParams::gauss(m as usize + 6, 2 * m as usize + 6),
    )
    .unwrap();

    // Symbol of the identity is 1; symbol of a Toeplitz operator tracks its
    // generating function.
    let id = OperatorMatrix::identity(basis.dim());
    let mu = PointU0::scalar(C64::new(0.4, -0.1));
    println!(
        "symbol(Id)(mu)          = {}",
        covariant_symbol(&id, &mu, &mu, &basis).unwrap()
    );
    let t = toeplitz_operator(&SmoothField::abs_frac(), &basis, &rule).unwrap();
    let sym = covariant_symbol(&t, &mu, &mu, &basis).unwrap();
    let f_val = mu.norm_sq() / (1.0 + mu.norm_sq());
    println!(
        "symbol(T_f)(mu)         = {:.8} (f(mu) = {f_val:.8})",
        sym.re
    );

    // Star product through the integral vs the composition oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let raw = DMatrix::from_fn(basis.dim(), basis.dim(), |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let op1 = OperatorMatrix::new((raw.clone() + raw.adjoint()) * C64::new(0.5, 0.0));
    let op2 = t;
    let s1 = SymbolFunction::of_operator(op1.clone());
    let s2 = SymbolFunction::of_operator(op2.clone());
    println!();
    println!(
        "{:>8} {:>26} {:>26} {:>12}",
        "point", "integral", "composition", "abs diff"
    );
    for r in [0.0f64, 0.3, 0.8] {
        let p = PointU0::scalar(C64::new(r, 0.2));
        let integral = star_product(&s1, &s2, &p, &basis, &rule).unwrap();
        let composed = star_via_composition(&op1, &op2, &p, &basis).unwrap();
        println!(
            "{:>8.2} {:>+13.8}{:+.8}i {:>+13.8}{:+.8}i {:>12.3e}",
            r,
            integral.re,
            integral.im,
            composed.re,
            composed.im,
            (integral - composed).norm()
        );
    }

    // The identity symbol is absorbed by the star product.
    let one = SymbolFunction::of_operator(OperatorMatrix::identity(basis.dim()));
    let left = star_product(&one, &s1, &mu, &basis, &rule).unwrap();
    let diag = covariant_symbol(&op1, &mu, &mu, &basis).unwrap();
    println!();
    println!("(1 * A)(mu) - A(mu) = {:.3e}", (left - diag).norm());
}
