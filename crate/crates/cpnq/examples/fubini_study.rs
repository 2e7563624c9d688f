//! Chart geometry on `U_0`: Kähler potential, Fubini-Study metric, volume
//! density and the Poisson bracket.
//!
//! ```bash
//! cargo run --release -p cpnq --example fubini_study
//! ```

use cpnq::cpn::{
    fs_metric_matrix, kahler_potential, poisson_bracket_fs, volume_density, PointU0,
    QuantizationConfig, SmoothField,
};
use num_complex::Complex64 as C64;

fn main() {
    let cfg = QuantizationConfig::new(1, 2);
    println!("level m = {}, hbar = {}", cfg.m, cfg.hbar());
    println!();
    println!(
        "{:>8} {:>14} {:>14} {:>14}",
        "|mu|", "potential", "g_11", "volume"
    );
    for r in [0.0, 0.5, 1.0, 2.0] {
        let mu = PointU0::scalar(C64::new(r, 0.0));
        println!(
            "{:>8.2} {:>14.8} {:>14.8} {:>14.8}",
            r,
            kahler_potential(&mu, &cfg),
            fs_metric_matrix(&mu)[(0, 0)].re,
            volume_density(&mu)
        );
    }

    // det g = volume density in any dimension.
    let p = PointU0::new(vec![C64::new(0.4, -0.2), C64::new(-0.1, 0.9)]);
    let det = fs_metric_matrix(&p).determinant();
    println!();
    println!("n = 2 at {p}:");
    println!("  det g          = {:.12}", det.re);
    println!("  volume density = {:.12}", volume_density(&p));

    // The bracket of the two bounded coordinate functions.
    let f1 = SmoothField::re_frac();
    let f2 = SmoothField::im_frac();
    println!();
    println!("{{Re mu/(1+|mu|^2), Im mu/(1+|mu|^2)}} along the real axis:");
    for r in [0.0, 0.3, 0.6, 1.0] {
        let mu = PointU0::scalar(C64::new(r, 0.0));
        let b = poisson_bracket_fs(&f1, &f2, &mu);
        println!("  mu = {r:.1}: {:+.8}{:+.8}i", b.re, b.im);
    }
}
