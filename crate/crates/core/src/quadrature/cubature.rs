use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rules::gk15;
use super::{half_line_pieces, Domain, Estimate, Piece, QuadValue, QuadratureConfig};
use crate::error::{Error, Result};

/// Two-dimensional integration domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain2 {
    /// `[0, ∞)²`, resolved band `[0, omega_max]` per axis plus mapped tails.
    FirstQuadrant,
    /// `ℝ²`, as four quadrants folded onto the first.
    FullPlane,
    Product(Domain, Domain),
}

impl Domain2 {
    fn pieces(&self, cutoff: f64) -> (Vec<Piece>, Vec<Piece>) {
        match self {
            Domain2::FirstQuadrant => (half_line_pieces(cutoff), half_line_pieces(cutoff)),
            Domain2::FullPlane => {
                let axis: Vec<Piece> = half_line_pieces(cutoff)
                    .into_iter()
                    .map(Piece::folded)
                    .collect();
                (axis.clone(), axis)
            }
            Domain2::Product(x, y) => (x.pieces(), y.pieces()),
        }
    }

    fn has_cutoff(&self) -> bool {
        !matches!(self, Domain2::Product(..))
    }
}

struct Rect<T> {
    px: usize,
    py: usize,
    x: (f64, f64),
    y: (f64, f64),
    value: T,
    error: f64,
    split_x: bool,
    seq: usize,
}

impl<T> PartialEq for Rect<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Rect<T> {}
impl<T> PartialOrd for Rect<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Rect<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Adaptive cubature over a standard 2D domain.
///
/// For the quadrant/plane domains with `doubling_check` set, the integral is
/// recomputed with the band edge moved to `2 * omega_max`; a shift larger than
/// the combined error estimate is reported as [`Error::CutoffSensitivity`].
pub fn integrate_2d<T, F>(f: F, domain: Domain2, cfg: &QuadratureConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    let (xs, ys) = domain.pieces(cfg.omega_max);
    let base = integrate_2d_pieces(&f, &xs, &ys, cfg)?;
    if !(cfg.doubling_check && domain.has_cutoff()) {
        return Ok(base);
    }
    let (xs, ys) = domain.pieces(2.0 * cfg.omega_max);
    let doubled = integrate_2d_pieces(&f, &xs, &ys, cfg)?;
    compare_doubled(base, doubled)
}

/// Accepts `base` if it agrees with the doubled-cutoff result within the sum of
/// both error estimates; the returned error is that sum.
pub fn compare_doubled<T: QuadValue>(base: Estimate<T>, doubled: Estimate<T>) -> Result<Estimate<T>> {
    let shift = (base.value - doubled.value).magnitude();
    let allowed = base.error + doubled.error;
    if !(shift <= allowed) {
        return Err(Error::CutoffSensitivity {
            base: base.value.magnitude(),
            doubled: doubled.value.magnitude(),
            error: allowed,
        });
    }
    Ok(Estimate {
        value: base.value,
        error: allowed,
        evaluations: base.evaluations + doubled.evaluations,
    })
}

fn apply_rule<T: QuadValue>(
    f: &impl Fn(f64, f64) -> T,
    px: &Piece,
    py: &Piece,
    x: (f64, f64),
    y: (f64, f64),
) -> (T, f64, bool) {
    let rule = gk15();
    let n = rule.nodes.len();
    let (cx, hx) = (0.5 * (x.0 + x.1), 0.5 * (x.1 - x.0));
    let (cy, hy) = (0.5 * (y.0 + y.1), 0.5 * (y.1 - y.0));
    let xp: Vec<(f64, f64)> = rule.nodes.iter().map(|t| px.point(cx + hx * t)).collect();
    let yp: Vec<(f64, f64)> = rule.nodes.iter().map(|t| py.point(cy + hy * t)).collect();

    let mut kk = T::zero();
    let mut gk = T::zero();
    let mut kg = T::zero();
    let mut res_abs = 0.0;
    for i in 0..n {
        let (xv, jx) = xp[i];
        // inner sums over y with Kronrod and Gauss weights
        let mut row_k = T::zero();
        let mut row_g = T::zero();
        for j in 0..n {
            let (yv, jy) = yp[j];
            let mut v = f(xv, yv);
            if px.fold {
                v = v + f(-xv, yv);
            }
            if py.fold {
                v = v + f(xv, -yv);
                if px.fold {
                    v = v + f(-xv, -yv);
                }
            }
            let v = v * (jx * jy);
            row_k = row_k + v * rule.kronrod[j];
            if rule.gauss[j] != 0.0 {
                row_g = row_g + v * rule.gauss[j];
            }
            res_abs += rule.kronrod[i] * rule.kronrod[j] * v.magnitude();
        }
        kk = kk + row_k * rule.kronrod[i];
        kg = kg + row_g * rule.kronrod[i];
        if rule.gauss[i] != 0.0 {
            gk = gk + row_k * rule.gauss[i];
        }
    }
    let area = (hx * hy).abs();
    let err_x = (kk - gk).magnitude() * area;
    let err_y = (kk - kg).magnitude() * area;
    let floor = 50.0 * f64::EPSILON * res_abs * area;
    ((kk * area), (err_x + err_y).max(floor), err_x >= err_y)
}

/// Globally adaptive cubature over the product of two piece lists.
pub fn integrate_2d_pieces<T, F>(
    f: F,
    xs: &[Piece],
    ys: &[Piece],
    cfg: &QuadratureConfig,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    let per_eval = gk15().nodes.len().pow(2);
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut evaluations = 0usize;

    for (ix, px) in xs.iter().enumerate() {
        for (iy, py) in ys.iter().enumerate() {
            let x = px.param_range();
            let y = py.param_range();
            if x.1 <= x.0 || y.1 <= y.0 {
                continue;
            }
            let (value, error, split_x) = apply_rule(&f, px, py, x, y);
            evaluations += per_eval;
            heap.push(Rect {
                px: ix,
                py: iy,
                x,
                y,
                value,
                error,
                split_x,
                seq,
            });
            seq += 1;
        }
    }

    let (mut total, mut total_err) = sum_rects(&heap);
    let mut since_resum = 0usize;
    loop {
        let converged = total_err <= cfg.target(total.magnitude());
        if converged || !total_err.is_finite() || heap.len() >= cfg.max_subdivisions {
            let (value, error) = sum_rects(&heap);
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
        let halves = if worst.split_x {
            let m = 0.5 * (worst.x.0 + worst.x.1);
            [((worst.x.0, m), worst.y), ((m, worst.x.1), worst.y)]
        } else {
            let m = 0.5 * (worst.y.0 + worst.y.1);
            [(worst.x, (worst.y.0, m)), (worst.x, (m, worst.y.1))]
        };
        total = total - worst.value;
        total_err -= worst.error;
        for (x, y) in halves {
            let (value, error, split_x) = apply_rule(&f, &xs[worst.px], &ys[worst.py], x, y);
            evaluations += per_eval;
            total = total + value;
            total_err += error;
            heap.push(Rect {
                px: worst.px,
                py: worst.py,
                x,
                y,
                value,
                error,
                split_x,
                seq,
            });
            seq += 1;
        }
        since_resum += 1;
        if since_resum == 64 {
            (total, total_err) = sum_rects(&heap);
            since_resum = 0;
        }
    }
}

fn sum_rects<T: QuadValue>(heap: &BinaryHeap<Rect<T>>) -> (T, f64) {
    let mut items: Vec<&Rect<T>> = heap.iter().collect();
    items.sort_by(|a, b| {
        (a.px, a.py)
            .cmp(&(b.px, b.py))
            .then(a.x.0.total_cmp(&b.x.0))
            .then(a.y.0.total_cmp(&b.y.0))
    });
    items
        .iter()
        .fold((T::zero(), 0.0), |(v, e), r| (v + r.value, e + r.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_1d;
    use std::f64::consts::PI;

    #[test]
    fn exponential_over_first_quadrant() {
        let cfg = QuadratureConfig::default().with_omega_max(3.0);
        let r = integrate_2d(|x: f64, y: f64| (-x - y).exp(), Domain2::FirstQuadrant, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        assert!((r.value - 1.0).abs() <= r.error);
    }

    #[test]
    fn separable_product_matches_1d_results() {
        let cfg = QuadratureConfig::default().with_tolerances(1e-12, 1e-10);
        let fx = |x: f64| 1.0 / (1.0 + x * x);
        let fy = |y: f64| y * (-y).exp();
        let ix = integrate_1d(fx, Domain::Finite(-2.0, 3.0), &cfg).unwrap();
        let iy = integrate_1d(fy, Domain::SemiInfinite { start: 0.0, scale: 1.0 }, &cfg).unwrap();
        let ixy = integrate_2d(
            |x: f64, y: f64| fx(x) * fy(y),
            Domain2::Product(Domain::Finite(-2.0, 3.0), Domain::SemiInfinite { start: 0.0, scale: 1.0 }),
            &cfg,
        )
        .unwrap();
        let combined = ix.error * iy.value.abs() + iy.error * ix.value.abs() + ixy.error;
        assert!((ixy.value - ix.value * iy.value).abs() <= combined.max(1e-12));
    }

    #[test]
    fn gaussian_over_full_plane() {
        let cfg = QuadratureConfig::default()
            .with_tolerances(1e-12, 1e-10)
            .with_omega_max(4.0);
        let r = integrate_2d(
            |x: f64, y: f64| (-(x - 0.3).powi(2) - 2.0 * y * y).exp(),
            Domain2::FullPlane,
            &cfg,
        )
        .unwrap();
        let exact = PI / 2f64.sqrt();
        assert!((r.value - exact).abs() < 1e-9);
    }

    #[test]
    fn diagonal_ridge_converges() {
        // ∫∫ exp(-25(x+y-2)²) over [0,∞)² = ∫₀^∞ s exp(-25(s-2)²) ds
        // = 2·√(π/25)·(1 + erf 10)/2 + e^{-100}/50, and erf 10 rounds to 1
        let cfg = QuadratureConfig::default()
            .with_tolerances(1e-12, 1e-9)
            .with_omega_max(5.0);
        let r = integrate_2d(
            |x: f64, y: f64| (-25.0 * (x + y - 2.0).powi(2)).exp(),
            Domain2::FirstQuadrant,
            &cfg,
        )
        .unwrap();
        let exact = 2.0 * (PI / 25.0).sqrt();
        assert!((r.value - exact).abs() < 1e-8, "{} vs {exact}", r.value);
    }

    #[test]
    fn doubling_comparison() {
        let est = |value: f64, error: f64| Estimate {
            value,
            error,
            evaluations: 1,
        };
        let ok = compare_doubled(est(1.0, 1e-6), est(1.0 + 1.5e-6, 1e-6)).unwrap();
        assert_eq!(ok.value, 1.0);
        assert_eq!(ok.error, 2e-6);
        assert!(matches!(
            compare_doubled(est(1.0, 1e-6), est(1.0 + 3e-6, 1e-6)),
            Err(Error::CutoffSensitivity { .. })
        ));
        assert!(compare_doubled(est(1.0, 1e-6), est(f64::NAN, 1e-6)).is_err());
    }
}
