//! Gauss-Legendre and Gauss-Jacobi rules, plus the geometric splitting used
//! for integrands that are analytic on an interval but have a singular point
//! close to one of its ends.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes and weights on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Gauss-Legendre rule with `n` points, exact for polynomials of degree `2n - 1`.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = ((4 * i + 3) as f64 * PI / (4 * n + 2) as f64).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        QuadratureRule { nodes, weights }
    }

    /// Gauss-Jacobi rule for the weight `(1 - x)^alpha (1 + x)^beta` on [-1, 1].
    ///
    /// Nodes start from the Golub-Welsch eigenvalues and are polished by Newton
    /// iteration on the Jacobi polynomial; weights are the Christoffel numbers
    /// of the orthonormal recurrence.
    pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("Gauss-Jacobi rule needs at least one point"));
        }
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::domain(format!(
                "Gauss-Jacobi exponents must exceed -1, got ({alpha}, {beta})"
            )));
        }
        let ab = alpha + beta;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let diag = if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
            };
            jac[(k, k)] = diag;
            if k + 1 < n {
                let j = kf + 1.0;
                let s = 2.0 * j + ab;
                let b = if k == 0 {
                    4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))
                };
                let off = b.sqrt();
                jac[(k, k + 1)] = off;
                jac[(k + 1, k)] = off;
            }
        }
        let diag: Vec<f64> = (0..n).map(|k| jac[(k, k)]).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|k| jac[(k, k + 1)]).collect();
        let eig = SymmetricEigen::new(jac);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

        for x in nodes.iter_mut() {
            for _ in 0..8 {
                let (p, d) = jacobi_with_derivative(n, alpha, beta, *x);
                if d == 0.0 {
                    break;
                }
                let dx = p / d;
                let next = *x - dx;
                if !(next > -1.0 && next < 1.0) {
                    break;
                }
                *x = next;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
        }

        // Christoffel numbers 1 / sum_k q_k(x)^2 with q_k orthonormal, from the
        // three-term recurrence of the Jacobi matrix.
        let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0)
            - libm::lgamma(ab + 2.0))
        .exp();
        let weights = nodes
            .iter()
            .map(|&x| {
                let mut q_prev = 0.0;
                let mut q = 1.0 / mu0.sqrt();
                let mut sum = q * q;
                for k in 0..n - 1 {
                    let prev_off = if k == 0 { 0.0 } else { off[k - 1] };
                    let q_next = ((x - diag[k]) * q - prev_off * q_prev) / off[k];
                    q_prev = q;
                    q = q_next;
                    sum += q * q;
                }
                1.0 / sum
            })
            .collect();
        Ok(QuadratureRule { nodes, weights })
    }

    /// Maps a Gauss-Legendre rule to `[a, b]`, returning physical nodes and weights.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` and its derivative.
fn jacobi_with_derivative(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    let p = jacobi(n, a, b, x);
    let d = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + a + b + 1.0) * jacobi(n - 1, a + 1.0, b + 1.0, x)
    };
    (p, d)
}

fn jacobi(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c1 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

type RuleKey = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached Gauss-Legendre rule.
pub fn legendre_rule(n: usize) -> Arc<QuadratureRule> {
    let key = (n, u64::MAX, u64::MAX);
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let rule = Arc::new(QuadratureRule::gauss_legendre(n));
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

/// Cached Gauss-Jacobi rule on [-1, 1] for the weight `(1-x)^alpha (1+x)^beta`.
pub fn jacobi_rule(n: usize, alpha: f64, beta: f64) -> Result<Arc<QuadratureRule>> {
    if alpha == 0.0 && beta == 0.0 {
        return Ok(legendre_rule(n));
    }
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(QuadratureRule::gauss_jacobi(n, alpha, beta)?);
    cache().lock().unwrap().insert(key, rule.clone());
    Ok(rule)
}

/// Physical nodes and weights on `[a, b]` for the weight `(t - a)^exponent`.
///
/// The rule integrates `(t - a)^exponent * q(t)` exactly for polynomials `q`
/// of degree up to `2 * npoints - 1`.
pub fn gauss_jacobi_rule(npoints: usize, exponent: f64, interval: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    if exponent <= -1.0 || !exponent.is_finite() {
        return Err(Error::domain(format!("weight exponent must exceed -1, got {exponent}")));
    }
    let (a, b) = interval;
    if !(b > a) {
        return Err(Error::domain(format!("empty interval ({a}, {b})")));
    }
    let rule = jacobi_rule(npoints, 0.0, exponent)?;
    let half = 0.5 * (b - a);
    let scale = half.powf(exponent + 1.0);
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| (a + half * (1.0 + x), scale * w))
        .collect())
}

/// Same as [`gauss_jacobi_rule`] but with the weight `(b - t)^exponent`.
pub fn gauss_jacobi_rule_right(npoints: usize, exponent: f64, interval: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let (a, b) = interval;
    Ok(gauss_jacobi_rule(npoints, exponent, (a, b))?
        .into_iter()
        .map(|(t, w)| (a + b - t, w))
        .rev()
        .collect())
}

/// Splits `[lo, hi]` into consecutive pieces whose distance to `singular` is at
/// least `ratio` times their length. `singular` must lie strictly outside
/// `[lo, hi]`.
pub fn graded_pieces(lo: f64, hi: f64, singular: f64, ratio: f64) -> Vec<(f64, f64)> {
    debug_assert!(hi > lo);
    let mut out = Vec::new();
    if singular < lo {
        let mut s = lo;
        while s < hi {
            let len = ((s - singular) / ratio).min(hi - s);
            let e = if hi - (s + len) <= 1e-15 * hi.abs().max(1.0) {
                hi
            } else {
                s + len
            };
            out.push((s, e));
            s = e;
        }
    } else if singular > hi {
        let mut e = hi;
        while e > lo {
            let len = ((singular - e) / ratio).min(e - lo);
            let s = if (e - len) - lo <= 1e-15 * lo.abs().max(1.0) {
                lo
            } else {
                e - len
            };
            out.push((s, e));
            e = s;
        }
        out.reverse();
    } else {
        out.push((lo, hi));
    }
    out
}

/// Integrates `f` over `[lo, hi]` with composite Gauss-Legendre on pieces
/// graded toward an external singular point.
pub fn integrate_near_singular<F>(f: F, lo: f64, hi: f64, singular: f64, npoints: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let rule = legendre_rule(npoints);
    let mut sum = 0.0;
    for (a, b) in graded_pieces(lo, hi, singular, 1.0) {
        for (t, w) in rule.mapped(a, b) {
            sum += w * f(t);
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_legendre() {
        let r = QuadratureRule::gauss_legendre(2);
        let s = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + s).abs() < 1e-15);
        assert!((r.nodes[1] - s).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_exactness() {
        for n in 1..30 {
            let r = QuadratureRule::gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg} q={q}");
            }
        }
    }

    #[test]
    fn jacobi_zero_exponents_match_legendre() {
        let gj = QuadratureRule::gauss_jacobi(2, 0.0, 0.0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((gj.nodes[1] - s).abs() < 1e-15);
        assert!((gj.weights[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_weight_sum() {
        // integral over (0,1) of t^{-1/2} is 2
        let rule = gauss_jacobi_rule(5, -0.5, (0.0, 1.0)).unwrap();
        let s: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_power_rule() {
        let rule = gauss_jacobi_rule(2, -0.7, (0.0, 1.0)).unwrap();
        let s: f64 = rule.iter().map(|(t, w)| w * t * t).sum();
        assert!((s - 1.0 / 2.3).abs() < 1e-14);
    }

    #[test]
    fn jacobi_rejects_bad_exponent() {
        assert!(gauss_jacobi_rule(3, -1.0, (0.0, 1.0)).is_err());
        assert!(QuadratureRule::gauss_jacobi(3, 0.2, -1.5).is_err());
    }

    #[test]
    fn jacobi_two_sided_beta_function() {
        // int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
        for &(a, b) in &[(-0.3, 0.4), (0.7, -0.9), (-0.95, -0.95), (2.5, 0.0)] {
            let r = QuadratureRule::gauss_jacobi(7, a, b).unwrap();
            let s: f64 = r.weights.iter().sum();
            let exact = 2f64.powf(a + b + 1.0)
                * (libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0) - libm::lgamma(a + b + 2.0)).exp();
            assert!((s - exact).abs() < 1e-13 * exact, "a={a} b={b} {s} {exact}");
        }
    }

    #[test]
    fn graded_pieces_cover_interval() {
        let p = graded_pieces(0.1, 10.0, 0.0, 1.0);
        assert_eq!(p.first().unwrap().0, 0.1);
        assert_eq!(p.last().unwrap().1, 10.0);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        for &(a, b) in &p {
            assert!(a - 0.0 >= (b - a) * (1.0 - 1e-12));
        }
        let q = graded_pieces(0.0, 1.0, 1.5, 1.0);
        assert_eq!(q.first().unwrap().0, 0.0);
        assert_eq!(q.last().unwrap().1, 1.0);
    }

    #[test]
    fn near_singular_power() {
        // int_1^5 (t - 0.999)^{-3/2} dt, singular point just left of the interval
        let v = integrate_near_singular(|t| (t - 0.999).powf(-1.5), 1.0, 5.0, 0.999, 16);
        let exact = -2.0 * ((5.0 - 0.999f64).powf(-0.5) - (0.001f64).powf(-0.5));
        assert!((v - exact).abs() < 1e-12 * exact, "{v} {exact}");
    }
}
