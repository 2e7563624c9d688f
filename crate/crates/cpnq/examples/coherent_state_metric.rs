//! Transition amplitudes and the coherent-state metric
//! `d(mu, nu) = sqrt(2) (1 - |a(mu, nu)|)^{1/2}`.
//!
//! ```bash
//! cargo run --release -p cpnq --example coherent_state_metric
//! ```

use cpnq::cpn::{PointU0, QuantizationConfig};
use cpnq::odzijewicz::{cs_metric, metric_radicand, transition_amplitude, LineBundleKernel};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let kernel = LineBundleKernel::new(QuantizationConfig::new(1, 2));

    println!("amplitude and metric from the origin along the real axis (m = 2):");
    println!("{:>6} {:>14} {:>14}", "mu", "|a(0, mu)|", "d(0, mu)");
    let origin = PointU0::origin(1);
    for r in [0.0f64, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let p = PointU0::scalar(C64::new(r, 0.0));
        let a = transition_amplitude(&origin, &p, &kernel).norm();
        let d = cs_metric(&origin, &p, &kernel);
        println!("{r:>6.2} {a:>14.8} {d:>14.8}");
    }
    println!("(d saturates at sqrt(2) as the states become orthogonal)");

    // Higher levels separate points faster.
    println!();
    println!("distance between 0 and 0.5 as the level grows:");
    for m in [1u32, 2, 4, 8, 16] {
        let k = LineBundleKernel::new(QuantizationConfig::new(1, m));
        let p = PointU0::scalar(C64::new(0.5, 0.0));
        println!("  m = {m:>2}: d = {:.8}", cs_metric(&origin, &p, &k));
    }

    // Random-pair sanity: |a| <= 1 keeps the radicand nonnegative, the
    // metric symmetric and zero only on the diagonal.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut min_radicand = f64::INFINITY;
    let mut max_asym: f64 = 0.0;
    for _ in 0..10_000 {
        let mu = PointU0::scalar(C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let nu = PointU0::scalar(C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        min_radicand = min_radicand.min(metric_radicand(&mu, &nu, &kernel));
        max_asym =
            max_asym.max((cs_metric(&mu, &nu, &kernel) - cs_metric(&nu, &mu, &kernel)).abs());
    }
    println!();
    println!("10000 random pairs: min radicand {min_radicand:.3e}, max |d(mu,nu) - d(nu,mu)| = {max_asym:.3e}");
}
