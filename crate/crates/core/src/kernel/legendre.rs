//! Legendre polynomials mapped to a time interval.
//!
//! The local basis on `(a, b)` is `P_k(x)` with `x = (2t - a - b) / (b - a)`,
//! unnormalized, so `P_k(b) = 1` and `P_k(a) = (-1)^k`.

/// Values `P_0(x) .. P_n(x)`.
pub fn values(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    fill_values(x, &mut out);
    out
}

/// Writes `P_0(x) .. P_{len-1}(x)` into `out`.
pub fn fill_values(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for k in 2..out.len() {
        let kf = k as f64;
        out[k] = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
    }
}

/// Derivatives `P'_0(x) .. P'_n(x)` with respect to the reference variable.
pub fn derivatives(n: usize, x: f64) -> Vec<f64> {
    let p = values(n, x);
    let mut d = vec![0.0; n + 1];
    // P'_{k} = P'_{k-2} + (2k - 1) P_{k-1}
    for k in 1..=n {
        d[k] = (2 * k - 1) as f64 * p[k - 1] + if k >= 2 { d[k - 2] } else { 0.0 };
    }
    d
}

/// Reference coordinate of `t` in `(a, b)`.
#[inline]
pub fn to_reference(t: f64, a: f64, b: f64) -> f64 {
    (2.0 * t - a - b) / (b - a)
}

/// Evaluates `sum_k c_k P_k(x)` by Clenshaw recurrence.
pub fn eval_series(coeffs: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (0..coeffs.len()).rev() {
        let kf = k as f64;
        // alpha_k = (2k+1)/(k+1) x, beta_{k+1} = -(k+1)/(k+2)
        let a = (2.0 * kf + 1.0) / (kf + 1.0) * x;
        let b = -(kf + 1.0) / (kf + 2.0);
        let t = coeffs[k] + a * b1 + b * b2;
        b2 = b1;
        b1 = t;
    }
    b1
}

/// `int_{-1}^{1} P_l'(x) P_r(x) dx`: 2 when `l > r` and `l + r` is odd.
#[inline]
pub fn transport_entry(r: usize, l: usize) -> f64 {
    if l > r && (l + r) % 2 == 1 {
        2.0
    } else {
        0.0
    }
}

/// `(-1)^k`, the value of `P_k` at the left end of its interval.
#[inline]
pub fn left_value(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let p = values(3, 0.5);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[1], 0.5);
        assert!((p[2] - (1.5 * 0.25 - 0.5)).abs() < 1e-15);
        assert!((p[3] - (2.5 * 0.125 - 1.5 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn endpoint_values() {
        for k in 0..12 {
            assert!((values(k, 1.0)[k] - 1.0).abs() < 1e-14);
            assert!((values(k, -1.0)[k] - left_value(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for &x in &[-0.7, 0.1, 0.9] {
            let d = derivatives(6, x);
            let pp = values(6, x + h);
            let pm = values(6, x - h);
            for k in 0..=6 {
                let fd = (pp[k] - pm[k]) / (2.0 * h);
                assert!((fd - d[k]).abs() < 1e-7, "k={k} {fd} {}", d[k]);
            }
        }
    }

    #[test]
    fn clenshaw_matches_direct_sum() {
        let c = [0.3, -1.2, 0.7, 2.0, -0.1];
        for &x in &[-1.0, -0.3, 0.0, 0.55, 1.0] {
            let p = values(4, x);
            let direct: f64 = c.iter().zip(&p).map(|(a, b)| a * b).sum();
            assert!((eval_series(&c, x) - direct).abs() < 1e-14);
        }
    }
}
