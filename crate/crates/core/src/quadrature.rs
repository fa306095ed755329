//! Gauss–Legendre nodes and a polar product rule for the unit disk.

use std::f64::consts::PI;

/// Nodes and weights on `[-1, 1]`, nodes ascending. Newton iteration on
/// `P_n` from the Chebyshev-like initial guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss-legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
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
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule for `∬_{|z| ≤ 1} f dx dy`: Gauss–Legendre with `radial` nodes
/// in `u = r²` (which absorbs the Jacobian `r dr = du / 2`) times the
/// trapezoid rule with `angular` equispaced angles. Exact for polynomials
/// whose degree is below both `angular` and `4·radial − 1`.
pub fn integrate_unit_disk(f: impl Fn(f64, f64) -> f64, radial: usize, angular: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(radial);
    let dtheta = 2.0 * PI / angular as f64;
    let mut total = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        let u = 0.5 * (t + 1.0);
        let r = u.sqrt();
        let mut ring = 0.0;
        for m in 0..angular {
            let theta = dtheta * m as f64;
            ring += f(r * theta.cos(), r * theta.sin());
        }
        // du = dt / 2, area element = du dθ / 2
        total += w * 0.5 * 0.5 * ring * dtheta;
    }
    total
}

/// Midpoint rule with `n × n` cells on `[−h, h]²`.
pub fn integrate_square_midpoint(f: impl Fn(f64, f64) -> f64, half_width: f64, n: usize) -> f64 {
    let cell = 2.0 * half_width / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let x = -half_width + cell * (i as f64 + 0.5);
        for j in 0..n {
            let y = -half_width + cell * (j as f64 + 0.5);
            total += f(x, y);
        }
    }
    total * cell * cell
}
