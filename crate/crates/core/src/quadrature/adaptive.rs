use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rules::{gk21, Rule};
use super::{Domain, Estimate, Piece, QuadValue, QuadratureConfig};
use crate::error::{Error, Result};

struct Interval<T> {
    piece: usize,
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
    seq: usize,
}

impl<T> PartialEq for Interval<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Interval<T> {}
impl<T> PartialOrd for Interval<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Interval<T> {
    // Largest error first; ties go to the older interval.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// QUADPACK-style error rescaling of |K - G|.
pub(super) fn rescale_error(diff: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = diff;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn apply_rule<T: QuadValue>(
    rule: &Rule,
    f: &impl Fn(f64) -> T,
    piece: &Piece,
    lo: f64,
    hi: f64,
) -> (T, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let n = rule.nodes.len();
    let mut values = Vec::with_capacity(n);
    let mut kronrod = T::zero();
    let mut gauss = T::zero();
    let mut res_abs = 0.0;
    for j in 0..n {
        let v = piece.eval(f, center + half * rule.nodes[j]);
        kronrod = kronrod + v * rule.kronrod[j];
        if rule.gauss[j] != 0.0 {
            gauss = gauss + v * rule.gauss[j];
        }
        res_abs += rule.kronrod[j] * v.magnitude();
        values.push(v);
    }
    let mean = kronrod * 0.5;
    let res_asc: f64 = values
        .iter()
        .zip(&rule.kronrod)
        .map(|(v, w)| w * (*v - mean).magnitude())
        .sum();
    let diff = (kronrod - gauss).magnitude() * half.abs();
    let err = rescale_error(diff, res_abs * half.abs(), res_asc * half.abs());
    (kronrod * half, err)
}

/// Adaptive Gauss–Kronrod (21-point) integration over a single domain.
pub fn integrate_1d<T, F>(f: F, domain: Domain, cfg: &QuadratureConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_pieces(f, &domain.pieces(), cfg)
}

/// Globally adaptive integration over a union of pieces.
///
/// The interval with the largest error estimate is bisected until the summed
/// error meets `max(abs_tol, rel_tol * |I|)`. On failure the error carries the
/// best value and estimate found.
pub fn integrate_pieces<T, F>(f: F, pieces: &[Piece], cfg: &QuadratureConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let rule = gk21();
    let per_eval = rule.nodes.len();
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut evaluations = 0usize;

    for (k, piece) in pieces.iter().enumerate() {
        let (lo, hi) = piece.param_range();
        if hi <= lo {
            continue;
        }
        let (value, error) = apply_rule(rule, &f, piece, lo, hi);
        evaluations += per_eval;
        heap.push(Interval {
            piece: k,
            lo,
            hi,
            value,
            error,
            seq,
        });
        seq += 1;
    }

    let (mut total, mut total_err) = sum_intervals(&heap);
    let mut since_resum = 0usize;
    loop {
        let converged = total_err <= cfg.target(total.magnitude());
        if converged || !total_err.is_finite() || heap.len() >= cfg.max_subdivisions {
            let (value, error) = sum_intervals(&heap);
            if converged {
                return Ok(Estimate {
                    value,
                    error,
                    evaluations,
                });
            }
            return Err(Error::NonConvergence {
                value: value.magnitude(),
                error,
                subdivisions: heap.len(),
            });
        }

        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // cannot split further; roundoff limit
            return Err(Error::NonConvergence {
                value: total.magnitude(),
                error: total_err,
                subdivisions: heap.len() + 1,
            });
        }
        total = total - worst.value;
        total_err -= worst.error;
        let piece = &pieces[worst.piece];
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (value, error) = apply_rule(rule, &f, piece, lo, hi);
            evaluations += per_eval;
            total = total + value;
            total_err += error;
            heap.push(Interval {
                piece: worst.piece,
                lo,
                hi,
                value,
                error,
                seq,
            });
            seq += 1;
        }
        since_resum += 1;
        if since_resum == 64 {
            (total, total_err) = sum_intervals(&heap);
            since_resum = 0;
        }
    }
}

fn sum_intervals<T: QuadValue>(heap: &BinaryHeap<Interval<T>>) -> (T, f64) {
    let mut items: Vec<&Interval<T>> = heap.iter().collect();
    items.sort_by(|a, b| a.piece.cmp(&b.piece).then(a.lo.total_cmp(&b.lo)));
    items.iter().fold((T::zero(), 0.0), |(v, e), it| (v + it.value, e + it.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{half_line_pieces, Multi};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn tight() -> QuadratureConfig {
        QuadratureConfig::default().with_tolerances(1e-13, 1e-12)
    }

    #[test]
    fn exponential_on_half_line() {
        let cfg = QuadratureConfig::default();
        let r = integrate_1d(|x: f64| (-x).exp(), Domain::SemiInfinite { start: 0.0, scale: 1.0 }, &cfg)
            .unwrap();
        assert!((r.value - 1.0).abs() < cfg.abs_tol);
        assert!((r.value - 1.0).abs() <= r.error);
    }

    #[test]
    fn squared_response_integrates_to_quarter_pi() {
        // Υ(ω)² at μ0 = 1, λ0 = 0 is ω²/(1+ω²)²
        let cfg = tight();
        let r = integrate_1d(
            |w: f64| w * w / ((1.0 + w * w) * (1.0 + w * w)),
            Domain::SemiInfinite { start: 0.0, scale: 1.0 },
            &cfg,
        )
        .unwrap();
        assert!((r.value - PI / 4.0).abs() < 1e-12 * PI / 4.0 * 10.0);
    }

    #[test]
    fn odd_function_vanishes_on_full_line() {
        let cfg = QuadratureConfig::default();
        let r = integrate_1d(
            |x: f64| x * (-x * x).exp() + x.powi(3) / (1.0 + x.powi(6)),
            Domain::FullLine { scale: 1.0 },
            &cfg,
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn breakpoint_placement_does_not_matter() {
        let cfg = tight();
        let f = |x: f64| 1.0 / (1.0 + x * x);
        let a = integrate_pieces(f, &half_line_pieces(1.0), &cfg).unwrap();
        let b = integrate_pieces(f, &half_line_pieces(7.5), &cfg).unwrap();
        assert!((a.value - PI / 2.0).abs() < 1e-11);
        assert!((a.value - b.value).abs() < 1e-11);
    }

    #[test]
    fn complex_and_vector_values() {
        let cfg = tight();
        let c = integrate_1d(
            |x: f64| Complex64::new(0.0, x).exp(),
            Domain::Finite(0.0, PI),
            &cfg,
        )
        .unwrap();
        assert!((c.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        let v = integrate_1d(|x: f64| Multi([x, x * x]), Domain::Finite(0.0, 1.0), &cfg).unwrap();
        assert!((v.value.0[0] - 0.5).abs() < 1e-14);
        assert!((v.value.0[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn nonconvergence_reports_best_estimate() {
        let mut cfg = tight();
        cfg.max_subdivisions = 10;
        let r = integrate_1d(|x: f64| (1.0 / x).sin(), Domain::Finite(1e-6, 1.0), &cfg);
        match r {
            Err(Error::NonConvergence { error, subdivisions, .. }) => {
                assert!(error > 0.0);
                assert!(subdivisions >= 10);
            }
            other => panic!("expected nonconvergence, got {other:?}"),
        }
    }

    #[test]
    fn scale_of_tail_map_is_immaterial() {
        // ∫₀^∞ μ / (μ² + ω²) dω = π/2 for any μ; mapped with scale μ or 2μ
        let cfg = tight();
        for mu in [0.3, 1.0, 40.0] {
            let f = |w: f64| mu / (mu * mu + w * w);
            let a = integrate_1d(f, Domain::SemiInfinite { start: 0.0, scale: mu }, &cfg).unwrap();
            let b =
                integrate_1d(f, Domain::SemiInfinite { start: 0.0, scale: 2.0 * mu }, &cfg).unwrap();
            assert!((a.value - b.value).abs() < 1e-11);
            assert!((a.value - PI / 2.0).abs() < 1e-11);
        }
    }
}
