use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Time-domain samples recovered from a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseTransform {
    pub values: Vec<f64>,
    /// `max |Im f(t)| / max |Re f(t)|` over the targets.
    pub imag_residue: f64,
}

/// Trapezoid weights for sorted, possibly nonuniform nodes.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|k| {
            let left = if k > 0 { nodes[k] - nodes[k - 1] } else { 0.0 };
            let right = if k + 1 < n { nodes[k + 1] - nodes[k] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Evaluates `f(t) = (1/2π) Σ w_k F(ω_k) e^{-iω_k t}` at each target time.
///
/// The real part is returned. A relative imaginary part above
/// `residue_limit` means the input was not Hermitian and is reported as
/// [`Error::ImaginaryResidue`].
pub fn fourier_invert(
    omegas: &[f64],
    weights: &[f64],
    values: &[Complex64],
    t_targets: &[f64],
    residue_limit: f64,
) -> Result<InverseTransform> {
    assert_eq!(omegas.len(), weights.len());
    assert_eq!(omegas.len(), values.len());
    let weighted: Vec<Complex64> = values.iter().zip(weights).map(|(v, w)| v * *w).collect();
    let samples: Vec<Complex64> = t_targets
        .par_iter()
        .map(|&t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, fw) in omegas.iter().zip(&weighted) {
                acc += fw * Complex64::from_polar(1.0, -w * t);
            }
            acc / (2.0 * PI)
        })
        .collect();
    let max_re = samples.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
    let max_im = samples.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let imag_residue = if max_im == 0.0 {
        0.0
    } else if max_re == 0.0 {
        f64::INFINITY
    } else {
        max_im / max_re
    };
    if imag_residue > residue_limit {
        return Err(Error::ImaginaryResidue {
            residue: imag_residue,
            limit: residue_limit,
        });
    }
    Ok(InverseTransform {
        values: samples.iter().map(|z| z.re).collect(),
        imag_residue,
    })
}
