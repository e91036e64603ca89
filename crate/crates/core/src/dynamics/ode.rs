//! Dormand–Prince 5(4) with step-size control and the standard 4th-order
//! continuous extension.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions<const N: usize> {
    pub rtol: f64,
    pub atol: [f64; N],
    /// Largest allowed step; also the first trial step.
    pub h_max: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution<const N: usize> {
    /// States at the requested output times.
    pub states: Vec<[f64; N]>,
    pub accepted: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

/// Integrates `y' = f(t, y)` from `times[0]` (where `y = y0`) and returns the
/// state at every entry of `times`, which must be increasing.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    times: &[f64],
    opts: &OdeOptions<N>,
) -> Result<OdeSolution<N>> {
    assert!(!times.is_empty());
    let t_end = *times.last().unwrap();
    let mut t = times[0];
    let mut y = y0;
    let mut states = Vec::with_capacity(times.len());
    states.push(y0);
    let mut next_out = 1;
    let mut h = opts.h_max.min(t_end - t);
    let h_min = 1e-14 * (t_end - t).abs().max(1.0);
    let mut k1 = f(t, &y);
    let (mut accepted, mut rejected) = (0, 0);

    while next_out < times.len() {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::StepSize(t));
        }
        if h < h_min {
            return Err(Error::StepSize(t));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t1 = if last { t_end } else { t + h };
        let k7 = f(t1, &y1);

        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol[i] + opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.2;
            rejected += 1;
            continue;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err > 1.0 {
            h *= factor.min(1.0);
            rejected += 1;
            continue;
        }

        // dense output on [t, t1]
        let mut rcont = [[0.0; N]; 5];
        for i in 0..N {
            let dy = y1[i] - y[i];
            let bspl = h * k1[i] - dy;
            rcont[0][i] = y[i];
            rcont[1][i] = dy;
            rcont[2][i] = bspl;
            rcont[3][i] = dy - h * k7[i] - bspl;
            rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        while next_out < times.len() && (times[next_out] <= t1 || last) {
            let theta = ((times[next_out] - t) / h).clamp(0.0, 1.0);
            let th1 = 1.0 - theta;
            let mut out = [0.0; N];
            for i in 0..N {
                out[i] = rcont[0][i]
                    + theta * (rcont[1][i] + th1 * (rcont[2][i] + theta * (rcont[3][i] + th1 * rcont[4][i])));
            }
            if times[next_out] == t1 {
                out = y1;
            }
            states.push(out);
            next_out += 1;
        }

        t = t1;
        y = y1;
        k1 = k7;
        accepted += 1;
        h = (h * factor).min(opts.h_max);
    }
    Ok(OdeSolution {
        states,
        accepted,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts<const N: usize>(tol: f64) -> OdeOptions<N> {
        OdeOptions {
            rtol: tol,
            atol: [tol; N],
            h_max: 1.0,
            max_steps: 100_000,
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let times: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
        let sol = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], &times, &opts(1e-10)).unwrap();
        for (t, s) in times.iter().zip(&sol.states) {
            assert!((s[0] - t.cos()).abs() < 1e-8, "t={t}");
            assert!((s[1] + t.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn dense_output_is_fourth_order_between_steps() {
        // few large steps, many output points in between
        let times: Vec<f64> = (0..=1000).map(|k| 0.002 * k as f64).collect();
        let mut o = opts::<1>(1e-9);
        o.h_max = 0.5;
        let sol = integrate(|_, y: &[f64; 1]| [y[0]], [1.0], &times, &o).unwrap();
        assert!(sol.accepted < 200);
        for (t, s) in times.iter().zip(&sol.states) {
            assert!((s[0] - t.exp()).abs() < 1e-8 * t.exp());
        }
    }

    #[test]
    fn fifth_order_convergence() {
        // fixed-ish steps via loose tolerance and capped h
        let err = |h: f64| {
            let o = OdeOptions {
                rtol: 1.0,
                atol: [1.0; 1],
                h_max: h,
                max_steps: 1_000_000,
            };
            let sol = integrate(|t, _y: &[f64; 1]| [t.cos()], [0.0], &[0.0, 2.0], &o).unwrap();
            (sol.states[1][0] - 2f64.sin()).abs()
        };
        let ratio = err(0.2) / err(0.1);
        assert!(ratio > 25.0, "ratio {ratio}");
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let mut o = opts::<1>(1e-12);
        o.max_steps = 3;
        let r = integrate(|_, y: &[f64; 1]| [-50.0 * y[0]], [1.0], &[0.0, 10.0], &o);
        assert!(matches!(r, Err(Error::StepSize(_))));
    }
}
