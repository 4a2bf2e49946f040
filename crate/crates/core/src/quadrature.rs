//! Gauss-Legendre quadrature and round-sphere volume constants.

use std::f64::consts::PI;

/// Nodes and weights of the q-point Gauss-Legendre rule on [-1, 1].
///
/// Nodes are found by Newton iteration on the Legendre polynomial, using the
/// Chebyshev points as starting guesses.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1, "quadrature order must be at least 1");
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q {
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        // Newton iteration for the i-th root of P_q.
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(q, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_and_derivative(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrate `f` over [a, b] with a q-point Gauss-Legendre rule.
pub fn integrate<F: Fn(f64) -> f64>(a: f64, b: f64, q: usize, f: F) -> f64 {
    let (nodes, weights) = gauss_legendre(q);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Volume (surface measure) of the unit k-sphere S^k in R^{k+1}.
///
/// Recursion: |S^k| = 2*pi*|S^{k-2}|/(k-1), with |S^0| = 2 and |S^1| = 2*pi.
pub fn unit_sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI * unit_sphere_area(k - 2) / (k as f64 - 1.0),
    }
}
