//! C^2 cubic-spline interpolation (not-a-knot ends).
//!
//! Used for tabulated potential profiles: the squared potential is
//! interpolated, since it stays smooth across a horizon while the potential
//! itself does not. A C^2 spline keeps the second derivative O(h^2) accurate
//! also at interior extrema of the data, which profiles with a cosmological
//! outer region genuinely have.

/// Cubic spline through strictly increasing abscissae.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives (moments) at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(x.len() >= 4, "need at least four samples");
        assert!(
            x.windows(2).all(|w| w[1] > w[0]),
            "abscissae must be strictly increasing"
        );
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Tridiagonal system for the moments M_1 .. M_{n-2}; the not-a-knot
        // conditions express M_0 and M_{n-1} through their neighbors:
        //   M_0 = ((h0 + h1) M_1 - h0 M_2) / h1,
        //   M_{n-1} = ((h_{n-2} + h_{n-3}) M_{n-2} - h_{n-2} M_{n-3}) / h_{n-3}.
        let k = n - 2;
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 1..=k {
            let j = i - 1;
            sub[j] = h[i - 1] / 6.0;
            diag[j] = (h[i - 1] + h[i]) / 3.0;
            sup[j] = h[i] / 6.0;
            rhs[j] = delta[i] - delta[i - 1];
        }
        // Fold the not-a-knot expressions into the first and last rows.
        diag[0] += sub[0] * (h[0] + h[1]) / h[1];
        sup[0] -= sub[0] * h[0] / h[1];
        sub[0] = 0.0;
        let last = k - 1;
        diag[last] += sup[last] * (h[n - 2] + h[n - 3]) / h[n - 3];
        sub[last] -= sup[last] * h[n - 2] / h[n - 3];
        sup[last] = 0.0;

        // Thomas algorithm.
        let mut c = vec![0.0; k];
        let mut d = vec![0.0; k];
        c[0] = sup[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for j in 1..k {
            let denom = diag[j] - sub[j] * c[j - 1];
            c[j] = sup[j] / denom;
            d[j] = (rhs[j] - sub[j] * d[j - 1]) / denom;
        }
        let mut inner = vec![0.0; k];
        inner[k - 1] = d[k - 1];
        for j in (0..k - 1).rev() {
            inner[j] = d[j] - c[j] * inner[j + 1];
        }

        let mut m = vec![0.0; n];
        m[1..=k].copy_from_slice(&inner);
        m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
        m[n - 1] = ((h[n - 2] + h[n - 3]) * m[n - 2] - h[n - 2] * m[n - 3]) / h[n - 3];

        Self { x, y, m }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    fn segment(&self, s: f64) -> usize {
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&s).expect("NaN abscissa"))
        {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Value, first and second derivative at `s` (end cubics extend outside
    /// the table).
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        let i = self.segment(s);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - s) / h;
        let b = (s - self.x[i]) / h;
        let (mi, mj) = (self.m[i], self.m[i + 1]);
        let v = mi * a * a * a * h * h / 6.0
            + mj * b * b * b * h * h / 6.0
            + (self.y[i] - mi * h * h / 6.0) * a
            + (self.y[i + 1] - mj * h * h / 6.0) * b;
        let v1 = -mi * a * a * h / 2.0 + mj * b * b * h / 2.0
            + (self.y[i + 1] - self.y[i]) / h
            - (mj - mi) * h / 6.0;
        let v2 = mi * a + mj * b;
        (v, v1, v2)
    }
}
