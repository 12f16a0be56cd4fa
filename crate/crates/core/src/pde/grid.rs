use crate::dynamics::Distribution;
use crate::error::{Error, Result};

/// Uniform mesh of `m` cells on `[-l, l]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    l: f64,
    m: usize,
}

pub const MIN_CELLS: usize = 8;

impl SpatialGrid {
    pub fn new(l: f64, m: usize) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::domain(format!(
                "grid half-width must be positive, got {l}"
            )));
        }
        if m < MIN_CELLS {
            return Err(Error::domain(format!(
                "grid needs at least {MIN_CELLS} cells, got {m}"
            )));
        }
        Ok(SpatialGrid { l, m })
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / self.m as f64
    }

    pub fn center(&self, c: usize) -> f64 {
        -self.l + (c as f64 + 0.5) * self.h()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.m).map(|c| self.center(c)).collect()
    }

    /// Edge between cell `c - 1` and cell `c`; `edge(0) = -l`, `edge(m) = l`.
    pub fn edge(&self, c: usize) -> f64 {
        if c == self.m {
            self.l
        } else {
            -self.l + c as f64 * self.h()
        }
    }

    /// Cell averages of `dist`, renormalized to unit mass on the grid.
    /// Mass outside `[-l, l]` is dropped before renormalizing.
    pub fn discretize(&self, dist: &Distribution) -> Result<Vec<f64>> {
        dist.validate()?;
        let h = self.h();
        let mut rho = vec![0.0; self.m];
        match dist {
            Distribution::PointMass { at } => self.bin_atoms(std::slice::from_ref(at), &mut rho),
            Distribution::Empirical { samples } => self.bin_atoms(samples, &mut rho),
            _ => {
                let mut cdf_lo = dist.cdf(self.edge(0));
                for (c, r) in rho.iter_mut().enumerate() {
                    let cdf_hi = dist.cdf(self.edge(c + 1));
                    *r = (cdf_hi - cdf_lo).max(0.0);
                    cdf_lo = cdf_hi;
                }
            }
        }
        let mass: f64 = rho.iter().sum();
        if !(mass > 0.0) {
            return Err(Error::domain(format!(
                "initial law {dist:?} puts no mass on [{}, {}]",
                -self.l, self.l
            )));
        }
        Ok(rho.into_iter().map(|v| v / (mass * h)).collect())
    }

    /// Equal-weight atoms into their cells; atoms outside `[-l, l]` are dropped.
    fn bin_atoms(&self, atoms: &[f64], rho: &mut [f64]) {
        for &x in atoms {
            if (-self.l..=self.l).contains(&x) {
                let c = (((x + self.l) / self.h()).floor() as usize).min(self.m - 1);
                rho[c] += 1.0;
            }
        }
    }

    /// `h · Σ ρ`.
    pub fn mass(&self, rho: &[f64]) -> f64 {
        self.h() * rho.iter().sum::<f64>()
    }

    /// `h · Σ |a - b|`.
    pub fn l1(&self, a: &[f64], b: &[f64]) -> f64 {
        self.h() * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let g = SpatialGrid::new(8.0, 400).unwrap();
        assert!((g.h() * 400.0 - 16.0).abs() < 1e-12);
        assert!((g.center(0) + 8.0 - 0.02).abs() < 1e-12);
        assert_eq!(g.edge(400), 8.0);
        assert!(SpatialGrid::new(1.0, 7).is_err());
        assert!(SpatialGrid::new(0.0, 100).is_err());
    }

    #[test]
    fn discretized_laws_have_unit_mass() {
        let g = SpatialGrid::new(4.0, 64).unwrap();
        for d in [
            Distribution::Gaussian { mean: 0.3, sd: 0.7 },
            Distribution::Uniform {
                low: -1.0,
                high: 2.0,
            },
            Distribution::PointMass { at: 0.0 },
            Distribution::Empirical {
                samples: vec![-1.0, 0.0, 3.9],
            },
        ] {
            let rho = g.discretize(&d).unwrap();
            assert!((g.mass(&rho) - 1.0).abs() < 1e-13, "{d:?}");
            assert!(rho.iter().all(|&v| v >= 0.0));
        }
        let atom = g.discretize(&Distribution::PointMass { at: 0.0 }).unwrap();
        assert_eq!(atom.iter().filter(|&&v| v > 0.0).count(), 1);
        assert!(g.discretize(&Distribution::PointMass { at: 10.0 }).is_err());
        assert!(g
            .discretize(&Distribution::PointMass { at: -10.0 })
            .is_err());
    }
}
