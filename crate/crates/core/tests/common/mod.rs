//! Test-only oracles, independent of the library's quadrature and basis code.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Double-exponential (tanh-sinh) quadrature on `[0, len]`.
///
/// The integrand receives `(distance from left end, distance from right end)`
/// so that endpoint singularities can be evaluated without cancellation.
/// Integrates every component of a vector-valued integrand; refinement halves
/// the step until successive levels agree to `tol` (relative, max norm).
pub fn tanh_sinh_vec<G>(g: G, len: f64, dim: usize, tol: f64) -> Vec<f64>
where
    G: Fn(f64, f64, &mut [f64]),
{
    let umax = 6.0;
    let mut h = 0.5;
    let mut buf = vec![0.0; dim];
    let mut sum = vec![0.0; dim];
    let add = |u: f64, sum: &mut Vec<f64>, buf: &mut Vec<f64>| {
        let s = FRAC_PI_2 * u.sinh();
        let left = len / (1.0 + (-2.0 * s).exp());
        let right = len / (1.0 + (2.0 * s).exp());
        let w = FRAC_PI_2 * u.cosh() / s.cosh().powi(2) * 0.5 * len;
        if !(left > 0.0 && right > 0.0) || w == 0.0 || !w.is_finite() {
            return;
        }
        buf.iter_mut().for_each(|v| *v = 0.0);
        g(left, right, buf);
        for (a, b) in sum.iter_mut().zip(buf.iter()) {
            *a += w * b;
        }
    };
    // level 0: nodes k*h
    let mut n = (umax / h) as i64;
    add(0.0, &mut sum, &mut buf);
    for k in 1..=n {
        add(k as f64 * h, &mut sum, &mut buf);
        add(-(k as f64) * h, &mut sum, &mut buf);
    }
    let mut est: Vec<f64> = sum.iter().map(|v| v * h).collect();
    for _level in 0..12 {
        h *= 0.5;
        n = (umax / h) as i64;
        let mut k = 1;
        while k <= n {
            add(k as f64 * h, &mut sum, &mut buf);
            add(-(k as f64) * h, &mut sum, &mut buf);
            k += 2;
        }
        let new: Vec<f64> = sum.iter().map(|v| v * h).collect();
        let scale = new.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let diff = new.iter().zip(&est).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        est = new;
        if diff <= tol * scale && _level >= 2 {
            break;
        }
    }
    est
}

pub fn tanh_sinh<G>(g: G, len: f64, tol: f64) -> f64
where
    G: Fn(f64, f64) -> f64,
{
    tanh_sinh_vec(|l, r, out| out[0] = g(l, r), len, 1, tol)[0]
}

/// Legendre polynomial via the explicit sum
/// `P_k(x) = 2^{-k} sum_m C(k,m)^2 (x-1)^{k-m} (x+1)^m`.
pub fn legendre_explicit(k: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for m in 0..=k {
        let c = binom(k, m);
        sum += c * c * (x - 1.0).powi((k - m) as i32) * (x + 1.0).powi(m as i32);
    }
    sum / 2f64.powi(k as i32)
}

/// Derivative of [`legendre_explicit`] by the same expansion.
pub fn legendre_explicit_derivative(k: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for m in 0..=k {
        let c = binom(k, m);
        let c2 = c * c;
        let km = (k - m) as i32;
        let mi = m as i32;
        if km > 0 {
            sum += c2 * km as f64 * (x - 1.0).powi(km - 1) * (x + 1.0).powi(mi);
        }
        if mi > 0 {
            sum += c2 * (x - 1.0).powi(km) * mi as f64 * (x + 1.0).powi(mi - 1);
        }
    }
    sum / 2f64.powi(k as i32)
}

pub fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Oracle for a memory block through the jump representation
/// `B_alpha v = omega(t - a) v(a^+) - omega(t - b) v(b^-) + int omega(t - s) v'(s) ds`
/// (the `b` term only when the source lies strictly before the target).
/// Returns entries row-major, `(p_n + 1) x (p_j + 1)`.
pub fn memory_block_oracle(src: (f64, f64), pj: usize, tgt: (f64, f64), pn: usize, alpha: f64, tol: f64) -> Vec<f64> {
    let (a, b) = src;
    let (c, d) = tgt;
    let local = a == c && b == d;
    let inv_g = 1.0 / gamma(alpha + 1.0);
    let om = |x: f64| x.powf(alpha) * inv_g;
    let gap = c - b;
    let dim = (pn + 1) * (pj + 1);
    let src_len = b - a;
    tanh_sinh_vec(
        |tl, tr, out| {
            let xt = if tl < tr {
                -1.0 + 2.0 * tl / (d - c)
            } else {
                1.0 - 2.0 * tr / (d - c)
            };
            // inner: int over source (restricted to s < t for the local block) of omega(t-s) P_l'(s)
            let inner_len = if local { tl } else { src_len };
            let inner = tanh_sinh_vec(
                |sl, sr, o| {
                    let dist = if local { sr } else { gap + tl + sr };
                    let s_ref = if local || sl < sr {
                        -1.0 + 2.0 * sl / src_len
                    } else {
                        1.0 - 2.0 * sr / src_len
                    };
                    let k = om(dist);
                    for l in 0..=pj {
                        o[l] = k * legendre_explicit_derivative(l, s_ref) * 2.0 / src_len;
                    }
                },
                inner_len,
                pj + 1,
                1e-14,
            );
            let dist_a = if local { tl } else { gap + src_len + tl };
            for i in 0..=pn {
                let pi = legendre_explicit(i, xt);
                for l in 0..=pj {
                    let left = if l % 2 == 0 { 1.0 } else { -1.0 };
                    let mut v = om(dist_a) * left + inner[l];
                    if !local {
                        v -= om(gap + tl);
                    }
                    out[i * (pj + 1) + l] = pi * v;
                }
            }
        },
        d - c,
        dim,
        tol,
    )
}

/// Oracle for `int_a^{min(b,t)} (t-s)^alpha P_k(s) ds`.
pub fn moment_oracle(a: f64, b: f64, t: f64, k: usize, alpha: f64) -> f64 {
    let upper = t.min(b);
    let len = upper - a;
    tanh_sinh(
        |sl, sr| {
            let s = a + sl;
            let x = -1.0 + 2.0 * (s - a) / (b - a);
            let dist = (t - upper) + sr;
            dist.powf(alpha) * legendre_explicit(k, x)
        },
        len,
        1e-14,
    )
}
