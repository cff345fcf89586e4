//! One-dimensional rules and the pole-adapted polar rule used by the integrators.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    (
        x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
        w.iter().map(|v| 0.5 * v).collect(),
    )
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
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
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Pairwise (tree) summation; the reduction order depends only on the length.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if v.len() <= LEAF {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Integral over the square `[-H, H]^2` centred at the origin of
/// `r^(2c) g(x)`, in polar coordinates split into eight triangles.
///
/// The radial variable is mapped so that the weight `r^(2c) r dr` becomes
/// uniform, which makes the rule accurate for any `c > -1`.
pub(crate) fn polar_square_power(half: f64, c: f64, order: usize, g: impl Fn(f64, f64) -> f64) -> f64 {
    let (s, ws) = gauss_legendre_unit(order);
    let (t, wt) = gauss_legendre_unit(order);
    let e = 2.0 * c + 2.0;
    let mut total = 0.0;
    for k in 0..8 {
        let th0 = k as f64 * PI / 4.0;
        let axis = ((k + 1) / 2) as f64 * PI / 2.0;
        for (ti, wti) in t.iter().zip(&wt) {
            let th = th0 + ti * PI / 4.0;
            let rho = half / (th - axis).cos();
            let (sn, cs) = th.sin_cos();
            let mut inner = 0.0;
            for (si, wsi) in s.iter().zip(&ws) {
                let r = rho * si.powf(1.0 / e);
                inner += wsi * g(r * cs, r * sn);
            }
            total += wti * (PI / 4.0) * rho.powf(e) / e * inner;
        }
    }
    total
}

/// Integral over `[-H, H]^2` of `c log r^2 + g(x)` where `g` is bounded.
pub(crate) fn polar_square_log(half: f64, c: f64, order: usize, g: impl Fn(f64, f64) -> f64) -> f64 {
    let (s, ws) = gauss_legendre_unit(order);
    let (t, wt) = gauss_legendre_unit(order);
    let mut total = 0.0;
    for k in 0..8 {
        let th0 = k as f64 * PI / 4.0;
        let axis = ((k + 1) / 2) as f64 * PI / 2.0;
        for (ti, wti) in t.iter().zip(&wt) {
            let th = th0 + ti * PI / 4.0;
            let rho = half / (th - axis).cos();
            let (sn, cs) = th.sin_cos();
            // exact radial integral of c log r^2 against r dr
            let mut inner = c * 0.5 * rho * rho * ((rho * rho).ln() - 1.0);
            for (si, wsi) in s.iter().zip(&ws) {
                let r = rho * si;
                inner += wsi * rho * r * g(r * cs, r * sn);
            }
            total += wti * (PI / 4.0) * inner;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre_unit(12);
        for p in 0..24 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-13, "degree {p}");
        }
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
    }

    #[test]
    fn polar_rule_on_square() {
        // area
        let a = polar_square_power(0.5, 0.0, 16, |_, _| 1.0);
        assert!((a - 1.0).abs() < 1e-13);
        // r^{-1} over [-1,1]^2 equals 8 asinh(1)
        let b = polar_square_power(1.0, -0.5, 16, |_, _| 1.0);
        assert!((b - 8.0 * 1f64.asinh()).abs() < 1e-12);
        // log r^2 over [-1,1]^2: 4 * (2 * (ln 2 - 3) / 2 + pi)/... compare with
        // a fine product Gauss rule on the four quadrants
        let l = polar_square_log(1.0, 1.0, 16, |_, _| 0.0);
        let (x, w) = gauss_legendre_unit(400);
        let mut q = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            for (yi, wj) in x.iter().zip(&w) {
                q += wi * wj * (xi * xi + yi * yi).ln();
            }
        }
        assert!((l - 4.0 * q).abs() < 1e-4, "{l} vs {}", 4.0 * q);
    }
}
