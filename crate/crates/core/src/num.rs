//! Small numeric helpers shared across modules.

/// Distance from `x` to the nearest integer.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Sup-norm distance from a real vector to the nearest integer vector.
pub fn dist_to_int_vec(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |acc, &x| acc.max(dist_to_int(x)))
}

/// Sup norm of a real vector.
pub fn sup_norm(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// gcd of a u64 with every entry of an i64 slice (absolute values).
pub fn gcd_with_slice(x: u64, ys: &[i64]) -> u64 {
    ys.iter().fold(x, |g, &y| gcd_u64(g, y.unsigned_abs()))
}

/// `k`-samples log-spaced on [lo, hi], endpoints included.
pub fn log_spaced(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    assert!(k >= 2 && lo > 0.0 && hi > lo);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..k)
        .map(|i| (llo + (lhi - llo) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// Ordinary least squares fit y = intercept + slope * x, with r².
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_to_int_basics() {
        assert_eq!(dist_to_int(0.3), 0.3);
        assert!((dist_to_int(0.9) - 0.1).abs() < 1e-15);
        assert_eq!(dist_to_int(2.0), 0.0);
        assert_eq!(dist_to_int(-1.75), 0.25);
    }

    #[test]
    fn ols_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (s, i, r2) = ols(&xs, &ys);
        assert!((s - 2.5).abs() < 1e-12 && (i + 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_spacing_endpoints() {
        let ts = log_spaced(10.0, 1.0e4, 7);
        assert!((ts[0] - 10.0).abs() < 1e-9 && (ts[6] - 1.0e4).abs() < 1e-6);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }
}
