//! Piecewise-cubic interpolation of uniformly sampled series.

/// Uniform samples with optional derivative samples.
///
/// With derivatives the interpolant is cubic Hermite; without, Catmull–Rom.
/// Outside the sampled range the series is taken as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSeries {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    derivs: Option<Vec<f64>>,
}

impl UniformSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, derivs: Option<Vec<f64>>) -> Self {
        assert!(values.len() >= 4);
        if let Some(d) = &derivs {
            assert_eq!(d.len(), values.len());
        }
        Self { t0, dt, values, derivs }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.values.len();
        let mut x = (t - self.t0) / self.dt;
        if (x - x.round()).abs() < 1e-9 {
            x = x.round();
        }
        let last = (n - 1) as f64;
        if !(0.0..=last).contains(&x) {
            return 0.0;
        }
        let k = (x.floor() as usize).min(n - 2);
        let s = x - k as f64;
        let (p0, p1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = match &self.derivs {
            Some(d) => (d[k] * self.dt, d[k + 1] * self.dt),
            None => {
                let v = &self.values;
                let before = if k > 0 { v[k - 1] } else { 2.0 * p0 - p1 };
                let after = if k + 2 < n { v[k + 2] } else { 2.0 * p1 - p0 };
                (0.5 * (p1 - before), 0.5 * (after - p0))
            }
        };
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1
    }
}
