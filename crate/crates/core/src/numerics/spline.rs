//! Natural cubic splines and quintic Hermite interpolation.

#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    /// Natural spline (zero second derivative at both ends).
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 3 && y.len() == n);
        let mut a = vec![0.0; n];
        let mut b = vec![1.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        // Thomas algorithm
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        CubicSpline { x, y, m }
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        }
    }

    /// Value and first derivative at `t` (clamped to the knot range).
    pub fn eval_d(&self, t: f64) -> (f64, f64) {
        let i = self.segment(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let v = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0;
        let dv = (self.y[i + 1] - self.y[i]) / h
            + (-(3.0 * a * a - 1.0) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0;
        (v, dv)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_d(t).0
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }
}

/// Quintic Hermite interpolant on a uniform grid from values and first and
/// second derivatives at the nodes.
#[derive(Clone, Debug)]
pub struct QuinticHermite {
    x0: f64,
    h: f64,
    v: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl QuinticHermite {
    pub fn uniform(x0: f64, h: f64, v: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Self {
        assert!(v.len() >= 2 && d1.len() == v.len() && d2.len() == v.len());
        QuinticHermite { x0, h, v, d1, d2 }
    }

    /// Fourth-order finite-difference derivative of uniformly sampled values.
    pub fn derivative4(v: &[f64], h: f64) -> Vec<f64> {
        let n = v.len();
        assert!(n >= 5);
        (0..n)
            .map(|i| {
                let s = if i < 2 {
                    let b = &v[..5];
                    let k = i;
                    // one-sided five-point stencil at offset k
                    let c: [[f64; 5]; 2] = [
                        [-25.0, 48.0, -36.0, 16.0, -3.0],
                        [-3.0, -10.0, 18.0, -6.0, 1.0],
                    ];
                    (0..5).map(|j| c[k][j] * b[j]).sum::<f64>()
                } else if i + 2 >= n {
                    let b = &v[n - 5..];
                    let k = n - 1 - i;
                    let c: [[f64; 5]; 2] = [
                        [3.0, -16.0, 36.0, -48.0, 25.0],
                        [-1.0, 6.0, -18.0, 10.0, 3.0],
                    ];
                    (0..5).map(|j| c[k][j] * b[j]).sum::<f64>()
                } else {
                    v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]
                };
                s / (12.0 * h)
            })
            .collect()
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.v.len() - 1) as f64
    }

    /// Value and first derivative at `t` (clamped to the grid).
    pub fn eval_d(&self, t: f64) -> (f64, f64) {
        let n = self.v.len();
        let u = ((t - self.x0) / self.h).clamp(0.0, (n - 1) as f64);
        let i = (u.floor() as usize).min(n - 2);
        let t = u - i as f64;
        let (h, j) = (self.h, i + 1);
        let (t2, t3, t4, t5) = (t * t, t * t * t, t.powi(4), t.powi(5));
        let b = [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            0.5 * t3 - t4 + 0.5 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
        ];
        let db = [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
            1.5 * t2 - 4.0 * t3 + 2.5 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
        ];
        let c = [
            self.v[i],
            h * self.d1[i],
            h * h * self.d2[i],
            h * h * self.d2[j],
            h * self.d1[j],
            self.v[j],
        ];
        let v = (0..6).map(|k| c[k] * b[k]).sum::<f64>();
        let dv = (0..6).map(|k| c[k] * db[k]).sum::<f64>() / h;
        (v, dv)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_d(t).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_smooth_function() {
        let x: Vec<f64> = (0..201).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = CubicSpline::natural(x, y);
        let (v, d) = s.eval_d(1.234);
        assert!((v - 1.234f64.sin()).abs() < 1e-8);
        assert!((d - 1.234f64.cos()).abs() < 1e-5);
    }

    #[test]
    fn quintic_hermite_is_high_order() {
        let h = 0.05;
        let x: Vec<f64> = (0..61).map(|i| i as f64 * h).collect();
        let v: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let d1 = QuinticHermite::derivative4(&v, h);
        for (d, t) in d1.iter().zip(&x) {
            assert!((d - t.cos()).abs() < 2e-5);
        }
        let d1: Vec<f64> = x.iter().map(|t| t.cos()).collect();
        let d2: Vec<f64> = x.iter().map(|t| -t.sin()).collect();
        let q = QuinticHermite::uniform(0.0, h, v, d1, d2);
        for t in [0.013, 1.234, 2.9] {
            let (a, b) = q.eval_d(t);
            assert!((a - f64::sin(t)).abs() < 1e-11);
            assert!((b - f64::cos(t)).abs() < 1e-9);
        }
    }
}
