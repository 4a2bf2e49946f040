//! Cosine-series (Chebyshev) machinery shared by the angular graphs and the
//! radial collocation solver.
//!
//! A function sampled at the Chebyshev-Gauss-Lobatto angles `theta_j = j*pi/m`
//! is represented as `u(theta) = sum_k a_k cos(k*theta)`. Under `x = cos(theta)`
//! this is the Chebyshev series `sum_k a_k T_k(x)`; the cosine form keeps the
//! endpoint derivatives `u'(0) = u'(pi) = 0` exact, which is what the pole
//! regularity of axisymmetric graphs requires.

use std::f64::consts::PI;

/// Chebyshev-Gauss-Lobatto angles theta_j = j*pi/m for j = 0..=m.
pub fn lobatto_angles(m: usize) -> Vec<f64> {
    assert!(m >= 2, "need at least 3 nodes");
    (0..=m).map(|j| j as f64 * PI / m as f64).collect()
}

/// An even cosine series on [0, pi].
#[derive(Debug, Clone)]
pub struct CosineSeries {
    coeffs: Vec<f64>,
}

impl CosineSeries {
    /// Build from values at the Lobatto angles (DCT-I, direct summation).
    pub fn from_lobatto_values(values: &[f64]) -> Self {
        let m = values.len() - 1;
        assert!(m >= 2, "need at least 3 nodes");
        let mut coeffs = vec![0.0; m + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate() {
                let cj = if j == 0 || j == m { 2.0 } else { 1.0 };
                acc += v / cj * (k as f64 * j as f64 * PI / m as f64).cos();
            }
            let ck = if k == 0 || k == m { 2.0 } else { 1.0 };
            *c = 2.0 * acc / (m as f64 * ck);
        }
        Self { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Amplitude of the cos(k*theta) mode.
    pub fn mode_amplitude(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * (k as f64 * theta).cos())
            .sum()
    }

    /// First derivative in theta: -sum_k k a_k sin(k*theta).
    pub fn eval_d1(&self, theta: f64) -> f64 {
        -self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * k as f64 * (k as f64 * theta).sin())
            .sum::<f64>()
    }

    /// Second derivative in theta: -sum_k k^2 a_k cos(k*theta).
    pub fn eval_d2(&self, theta: f64) -> f64 {
        -self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * (k as f64).powi(2) * (k as f64 * theta).cos())
            .sum::<f64>()
    }

    /// u'(theta)/sin(theta), evaluated stably through the Chebyshev recurrence
    /// sin(k*theta)/sin(theta) = U_{k-1}(cos(theta)). Finite at the poles.
    pub fn eval_d1_over_sin(&self, theta: f64) -> f64 {
        let x = theta.cos();
        let mut acc = 0.0;
        let mut u_prev = 0.0; // U_{-1}
        let mut u_curr = 1.0; // U_0
        for (k, a) in self.coeffs.iter().enumerate().skip(1) {
            // u_curr holds U_{k-1}(x) at this point.
            acc -= a * k as f64 * u_curr;
            let u_next = 2.0 * x * u_curr - u_prev;
            u_prev = u_curr;
            u_curr = u_next;
        }
        acc
    }
}

/// Chebyshev-Gauss-Lobatto nodes x_j = cos(j*pi/n), j = 0..=n (descending).
pub fn cgl_nodes(n: usize) -> Vec<f64> {
    (0..=n).map(|j| (j as f64 * PI / n as f64).cos()).collect()
}

/// First-order Chebyshev differentiation matrix on the CGL nodes, row-major
/// (n+1) x (n+1). Acts on nodal values ordered by `cgl_nodes`.
pub fn cheb_diff_matrix(n: usize) -> Vec<f64> {
    let np = n + 1;
    let x = cgl_nodes(n);
    let mut c = vec![1.0; np];
    c[0] = 2.0;
    c[n] = 2.0;
    let mut d = vec![0.0; np * np];
    for i in 0..np {
        for j in 0..np {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                d[i * np + j] = c[i] / c[j] * sign / (x[i] - x[j]);
            }
        }
    }
    // Negative row sums on the diagonal kill the O(n^2) rounding in the
    // analytic diagonal entries.
    for i in 0..np {
        let sum: f64 = (0..np).filter(|&j| j != i).map(|j| d[i * np + j]).sum();
        d[i * np + i] = -sum;
    }
    d
}

/// Chebyshev coefficients of the derivative, from the coefficients of the
/// series on [-1, 1] (backward recurrence).
pub fn cheb_derivative_coeffs(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 0.0;
    if n >= 2 {
        b[n - 2] = 2.0 * (n as f64 - 1.0) * a[n - 1];
    }
    for k in (1..n - 1).rev() {
        let upper = if k + 1 < n - 1 { b[k + 1] } else { 0.0 };
        b[k - 1] = upper + 2.0 * k as f64 * a[k];
    }
    b[0] *= 0.5;
    b.truncate(n - 1);
    b
}

/// Clenshaw evaluation of a Chebyshev series at x in [-1, 1].
pub fn cheb_eval(a: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ak in a.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ak;
        b2 = b1;
        b1 = b0;
    }
    a[0] + x * b1 - b2
}
