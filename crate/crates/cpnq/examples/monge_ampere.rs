//! The Monge-Ampère relation between the density `(1+|mu|^2)^{-N}` and the
//! diagonal kernel: exact in one dimension, and in two dimensions a
//! comparison of the determinant reading against the displayed one-line
//! reading (they need different constants).
//!
//! ```bash
//! cargo run --release -p cpnq --example monge_ampere
//! ```

use cpnq::cpn::{PointU0, QuantizationConfig};
use cpnq::odzijewicz::{
    c_for_det_reading, c_for_displayed_reading, monge_ampere_grid, monge_ampere_residual,
    solution_exponent, LineBundleKernel,
};
use num_complex::Complex64 as C64;

fn main() {
    println!("CP^1: residual of the solution N = m + 2, C = N");
    println!("{:>4} {:>6} {:>6} {:>14}", "m", "N", "C", "max residual");
    for m in [1u32, 2, 4, 8] {
        let cfg = QuantizationConfig::new(1, m);
        let kernel = LineBundleKernel::new(cfg.clone());
        let n_param = solution_exponent(&cfg);
        let c_param = c_for_det_reading(1, n_param);
        let mut worst: f64 = 0.0;
        for ix in 0..20 {
            for iy in 0..20 {
                let mu = PointU0::scalar(C64::new(
                    -2.0 + 4.0 * ix as f64 / 19.0,
                    -2.0 + 4.0 * iy as f64 / 19.0,
                ));
                worst = worst.max(monge_ampere_residual(&mu, n_param, c_param, &kernel));
            }
        }
        println!("{m:>4} {n_param:>6} {c_param:>6} {worst:>14.3e}");
    }

    // A detuned exponent leaves a visible residual.
    let cfg = QuantizationConfig::new(1, 2);
    let kernel = LineBundleKernel::new(cfg.clone());
    let wrong = monge_ampere_residual(
        &PointU0::scalar(C64::new(1.0, 0.0)),
        3.0,
        c_for_det_reading(1, 3.0),
        &kernel,
    );
    println!();
    println!("detuned N = m + 1 at mu = 1: residual {wrong:.6}");

    // CP^2: the two readings disagree about C.
    let cfg2 = QuantizationConfig::new(2, 3);
    let kernel2 = LineBundleKernel::new(cfg2.clone());
    let n_param = solution_exponent(&cfg2);
    let c_det = c_for_det_reading(2, n_param);
    let c_disp = c_for_displayed_reading(2, n_param);
    println!();
    println!("CP^2 at m = 3: N = {n_param}");
    println!("  determinant reading needs C = {c_det}");
    println!("  displayed reading needs   C = {c_disp}");
    let rows = monge_ampere_grid(&kernel2, n_param, c_det, c_disp, 10, 1.5);
    let max_det = rows.iter().map(|r| r.residual_det).fold(0.0, f64::max);
    let max_disp = rows
        .iter()
        .map(|r| r.residual_displayed)
        .fold(0.0, f64::max);
    println!("  max residual, each reading with its own C: {max_det:.3e} / {max_disp:.3e}");
    let cross = monge_ampere_residual(
        &PointU0::new(vec![C64::new(0.7, -0.1), C64::new(0.2, 0.4)]),
        n_param,
        c_disp,
        &kernel2,
    );
    println!("  determinant reading with the displayed C:  {cross:.6} (the readings differ)");
}
