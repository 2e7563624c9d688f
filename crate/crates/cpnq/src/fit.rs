//! Least-squares fits used by the convergence studies.

/// Ordinary least squares for `y ≈ a + b·x`. Returns `(intercept, slope, r²)`.
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        1.0 - ss_res / syy
    };
    Some((intercept, slope, r2))
}

/// Fit `log e ≈ a + p·log h` and return `(p, r²)`; points with `e <= 0`
/// are dropped first (they are converged to rounding).
pub fn fit_log_log(hs: &[f64], es: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(es)
        .filter(|&(&h, &e)| h > 0.0 && e > 0.0)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    fit_linear(&xs, &ys).map(|(_, slope, r2)| (slope, r2))
}
