use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    /// Dense near zero, sparse towards the cutoff (w = s·u/(1-u)).
    MappedSemiInfinite,
}

/// Output grid on `[0, omega_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub omega_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl FrequencyGrid {
    pub fn uniform(omega_max: f64, n_points: usize) -> Self {
        Self {
            omega_max,
            n_points,
            spacing: Spacing::Uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_max > 0.0) || !self.omega_max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "grid omega_max must be > 0 (got {})",
                self.omega_max
            )));
        }
        if self.n_points < 16 {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least 16 points (got {})",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        match self.spacing {
            Spacing::Uniform => (0..self.n_points)
                .map(|k| self.omega_max * k as f64 / last)
                .collect(),
            Spacing::MappedSemiInfinite => {
                // u_max = 0.9 puts the cutoff at the last point
                let u_max = 0.9;
                let scale = self.omega_max * (1.0 - u_max) / u_max;
                (0..self.n_points)
                    .map(|k| {
                        let u = u_max * k as f64 / last;
                        scale * u / (1.0 - u)
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_strictly_increase_to_cutoff() {
        for spacing in [Spacing::Uniform, Spacing::MappedSemiInfinite] {
            let g = FrequencyGrid {
                omega_max: 4.0,
                n_points: 33,
                spacing,
            };
            g.validate().unwrap();
            let p = g.points();
            assert_eq!(p.len(), 33);
            assert_eq!(p[0], 0.0);
            assert!((p[32] - 4.0).abs() < 1e-12);
            assert!(p.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn small_grids_rejected() {
        assert!(FrequencyGrid::uniform(1.0, 8).validate().is_err());
        assert!(FrequencyGrid::uniform(0.0, 32).validate().is_err());
    }
}
