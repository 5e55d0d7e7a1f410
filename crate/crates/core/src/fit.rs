/// Least-squares slope of `ln y` against `ln x`.
///
/// Used for convergence orders (error vs step) and asymptotic fall-off
/// exponents (|kernel| vs p²).
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a slope");
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `count` points from `start` to `end` spaced evenly in log scale.
pub fn geometric_grid(start: f64, end: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && start > 0.0 && end > start);
    let ratio = (end / start).ln() / (count - 1) as f64;
    (0..count).map(|k| start * (ratio * k as f64).exp()).collect()
}
