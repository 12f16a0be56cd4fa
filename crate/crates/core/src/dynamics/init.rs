use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::graphon::{LabelPartition, StepKernel};
use crate::rng::standard_normal_quantile;

/// Law of a particle's initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Distribution {
    PointMass {
        at: f64,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    /// Uniform choice among the listed values.
    Empirical {
        samples: Vec<f64>,
    },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Distribution::PointMass { at } => at.is_finite(),
            Distribution::Gaussian { mean, sd } => mean.is_finite() && sd.is_finite() && *sd >= 0.0,
            Distribution::Uniform { low, high } => {
                low.is_finite() && high.is_finite() && low < high
            }
            Distribution::Empirical { samples } => {
                !samples.is_empty() && samples.iter().all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "invalid initial distribution {self:?}"
            )))
        }
    }

    /// Inverse-CDF draw from a uniform `u ∈ (0, 1)`.
    #[inline]
    pub fn sample(&self, u: f64) -> f64 {
        match self {
            Distribution::PointMass { at } => *at,
            Distribution::Gaussian { mean, sd } => mean + sd * standard_normal_quantile(u),
            Distribution::Uniform { low, high } => low + (high - low) * u,
            Distribution::Empirical { samples } => {
                let i = ((u * samples.len() as f64) as usize).min(samples.len() - 1);
                samples[i]
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Distribution::PointMass { at } => *at,
            Distribution::Gaussian { mean, .. } => *mean,
            Distribution::Uniform { low, high } => 0.5 * (low + high),
            Distribution::Empirical { samples } => {
                samples.iter().sum::<f64>() / samples.len() as f64
            }
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            Distribution::PointMass { at } => at * at,
            Distribution::Gaussian { mean, sd } => mean * mean + sd * sd,
            Distribution::Uniform { low, high } => (low * low + low * high + high * high) / 3.0,
            Distribution::Empirical { samples } => {
                samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64
            }
        }
    }

    /// Spread scale used to size truncated domains.
    pub fn scale(&self) -> f64 {
        (self.second_moment() - self.mean().powi(2)).max(0.0).sqrt()
    }

    /// Right-continuous CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Distribution::PointMass { at } => {
                if x >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            Distribution::Gaussian { mean, sd } => {
                if *sd == 0.0 {
                    return if x >= *mean { 1.0 } else { 0.0 };
                }
                0.5 * erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
            }
            Distribution::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            Distribution::Empirical { samples } => {
                samples.iter().filter(|&&v| v <= x).count() as f64 / samples.len() as f64
            }
        }
    }
}

/// Block-constant map from labels to initial laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDatum {
    pub partition: LabelPartition,
    pub distributions: Vec<Distribution>,
}

impl InitialDatum {
    pub fn new(partition: LabelPartition, distributions: Vec<Distribution>) -> Result<Self> {
        if distributions.len() != partition.num_classes() {
            return Err(Error::Partition(format!(
                "{} classes but {} distributions",
                partition.num_classes(),
                distributions.len()
            )));
        }
        for d in &distributions {
            d.validate()?;
        }
        Ok(InitialDatum {
            partition,
            distributions,
        })
    }

    /// The same law for every label.
    pub fn iid(distribution: Distribution) -> Result<Self> {
        Self::new(LabelPartition::whole(), vec![distribution])
    }

    /// One law per block of `w`.
    pub fn per_block(w: &StepKernel, distributions: Vec<Distribution>) -> Result<Self> {
        Self::new(w.partition(), distributions)
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.partition.clone(), self.distributions.clone()).map(|_| ())
    }

    pub fn class_of(&self, x: f64) -> usize {
        self.partition.class_of(x)
    }

    pub fn distribution_at(&self, x: f64) -> &Distribution {
        &self.distributions[self.class_of(x)]
    }

    pub fn distribution(&self, class: usize) -> &Distribution {
        &self.distributions[class]
    }

    /// Class containing block `i` of `w`, or a shape error if the block
    /// straddles several classes.
    pub fn class_of_block(&self, w: &StepKernel, i: usize) -> Result<usize> {
        let (lo, hi) = w.block(i);
        let mut found = None;
        for (c, class) in self.partition.classes().iter().enumerate() {
            if class.overlap(lo, hi) > 1e-14 {
                if found.is_some() {
                    return Err(Error::shape(format!(
                        "block {i} = [{lo}, {hi}) meets several initial-law classes"
                    )));
                }
                found = Some(c);
            }
        }
        found.ok_or_else(|| Error::shape(format!("block {i} meets no class")))
    }

    /// Law of block `i` for every block; fails unless the datum is constant on blocks.
    pub fn block_distributions(&self, w: &StepKernel) -> Result<Vec<Distribution>> {
        (0..w.k())
            .map(|i| {
                self.class_of_block(w, i)
                    .map(|c| self.distributions[c].clone())
            })
            .collect()
    }

    /// Datum relabeled by a block permutation of `w`: new block `i` carries
    /// the law of old block `perm[i]`.
    pub fn relabeled(&self, w: &StepKernel, perm: &[usize]) -> Result<Self> {
        let laws = self.block_distributions(w)?;
        let permuted = perm.iter().map(|&p| laws[p].clone()).collect();
        Self::per_block(w, permuted)
    }

    /// The label-averaged law `∫ μ₀(x) dx` as a single distribution, when
    /// it is representable (all classes point masses or empirical).
    pub fn pooled(&self) -> Result<Distribution> {
        if self.distributions.len() == 1 {
            return Ok(self.distributions[0].clone());
        }
        // Equal-measure classes of atoms pool exactly into an empirical law.
        let m0 = self.partition.class(0).measure();
        let equal = self
            .partition
            .classes()
            .iter()
            .all(|c| (c.measure() - m0).abs() < 1e-12);
        let mut atoms = Vec::new();
        for d in &self.distributions {
            match d {
                Distribution::PointMass { at } if equal => atoms.push(*at),
                _ => {
                    return Err(Error::Capability(
                        "pooling is only representable for equal-measure classes of point masses"
                            .into(),
                    ))
                }
            }
        }
        Ok(Distribution::Empirical { samples: atoms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_inverts_the_cdf() {
        let g = Distribution::Gaussian { mean: 1.0, sd: 2.0 };
        for u in [0.1, 0.5, 0.9] {
            assert!((g.cdf(g.sample(u)) - u).abs() < 1e-10);
        }
        let e = Distribution::Empirical {
            samples: vec![0.0, 2.0],
        };
        assert_eq!(e.sample(0.3), 0.0);
        assert_eq!(e.sample(0.7), 2.0);
        assert_eq!(
            Distribution::Uniform {
                low: 1.0,
                high: 3.0
            }
            .sample(0.25),
            1.5
        );
    }

    #[test]
    fn moments() {
        assert_eq!(
            Distribution::Gaussian { mean: 1.0, sd: 2.0 }.second_moment(),
            5.0
        );
        assert!(
            (Distribution::Uniform {
                low: 0.0,
                high: 1.0
            }
            .second_moment()
                - 1.0 / 3.0)
                .abs()
                < 1e-15
        );
        assert_eq!(Distribution::PointMass { at: 3.0 }.scale(), 0.0);
    }

    #[test]
    fn invalid_distributions_are_rejected() {
        assert!(Distribution::Gaussian {
            mean: 0.0,
            sd: -1.0
        }
        .validate()
        .is_err());
        assert!(Distribution::Uniform {
            low: 1.0,
            high: 1.0
        }
        .validate()
        .is_err());
        assert!(Distribution::Empirical { samples: vec![] }
            .validate()
            .is_err());
        assert!(Distribution::Empirical {
            samples: vec![f64::NAN]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn block_alignment() {
        let w = StepKernel::uniform(vec![vec![0.5; 4]; 4]).unwrap();
        let aligned = InitialDatum::new(
            LabelPartition::with_classes(vec![0.0, 0.5, 1.0], vec![0, 1]).unwrap(),
            vec![
                Distribution::PointMass { at: 0.0 },
                Distribution::PointMass { at: 1.0 },
            ],
        )
        .unwrap();
        let laws = aligned.block_distributions(&w).unwrap();
        assert_eq!(laws[1], Distribution::PointMass { at: 0.0 });
        assert_eq!(laws[2], Distribution::PointMass { at: 1.0 });
        let misaligned = InitialDatum::new(
            LabelPartition::from_breakpoints(vec![0.0, 0.3, 1.0]).unwrap(),
            vec![
                Distribution::PointMass { at: 0.0 },
                Distribution::PointMass { at: 1.0 },
            ],
        )
        .unwrap();
        assert!(matches!(
            misaligned.block_distributions(&w),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn pooled_point_masses() {
        let w = StepKernel::uniform(vec![vec![0.5; 2]; 2]).unwrap();
        let d = InitialDatum::per_block(
            &w,
            vec![
                Distribution::PointMass { at: 0.0 },
                Distribution::PointMass { at: 2.0 },
            ],
        )
        .unwrap();
        assert_eq!(
            d.pooled().unwrap(),
            Distribution::Empirical {
                samples: vec![0.0, 2.0]
            }
        );
        let r = d.relabeled(&w, &[1, 0]).unwrap();
        assert_eq!(r.distribution_at(0.1), &Distribution::PointMass { at: 2.0 });
    }
}
