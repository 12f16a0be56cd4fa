use crate::dynamics::{mean_and_stderr, CoupledPairEstimate, TrajectoryEnsemble};
use crate::error::{Error, Result};
use crate::metrics::wasserstein::{wasserstein2, MeasureSnapshot};

/// Batches used for the standard error of a lower bound.
pub const STDERR_BATCHES: usize = 10;

/// Certified bracket on the path distance `D_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtBounds {
    /// `max_t W₂(μ_t, ν_t)`.
    pub lower: f64,
    pub lower_stderr: f64,
    /// Grid index where the maximum is attained.
    pub argmax_step: usize,
    /// `√E sup_t |θ_t − θ̄_t|²` from a shared-noise coupling.
    pub upper: Option<f64>,
    pub upper_stderr: Option<f64>,
}

/// `max_t W₂(a_t, b_t)` over two sample series on one time grid.
pub fn d_t_lower(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<(f64, usize)> {
    if a.len() != b.len() {
        return Err(Error::shape(format!(
            "time grids differ: {} vs {} points",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::domain("empty time grid"));
    }
    let mut best = (0.0, 0);
    for (s, (x, y)) in a.iter().zip(b).enumerate() {
        let w = wasserstein2(
            &MeasureSnapshot::empirical(x.clone())?,
            &MeasureSnapshot::empirical(y.clone())?,
        )?;
        if w > best.0 {
            best = (w, s);
        }
    }
    Ok(best)
}

/// Standard error of a statistic from its values on contiguous batches.
fn batch_stderr(
    replicas: usize,
    stat: impl Fn(std::ops::Range<usize>) -> Result<f64>,
) -> Result<f64> {
    let batches = STDERR_BATCHES.min(replicas / 2);
    if batches < 2 {
        return Ok(0.0);
    }
    let size = replicas / batches;
    let values: Vec<f64> = (0..batches)
        .map(|b| stat(b * size..(b + 1) * size))
        .collect::<Result<_>>()?;
    Ok(mean_and_stderr(&values).1)
}

/// Bounds from a coupled pair: the lower bound compares the replica
/// marginals of the two tags, the upper bound is the coupling estimate.
pub fn d_t_bounds_coupled(est: &CoupledPairEstimate) -> Result<DtBounds> {
    let tags = &est.tags;
    let series = |tag: usize, range: std::ops::Range<usize>| -> Vec<Vec<f64>> {
        (0..=tags.steps)
            .map(|s| {
                tags.paths[tag][range.clone()]
                    .iter()
                    .map(|p| p[s])
                    .collect()
            })
            .collect()
    };
    let r = tags.replicas();
    let (lower, argmax_step) = d_t_lower(&series(0, 0..r), &series(1, 0..r))?;
    let lower_stderr = batch_stderr(r, |range| {
        Ok(d_t_lower(&series(0, range.clone()), &series(1, range))?.0)
    })?;
    let upper = est.mean_sup_sq.sqrt();
    let upper_stderr = if upper > 0.0 {
        est.stderr / (2.0 * upper)
    } else {
        0.0
    };
    Ok(DtBounds {
        lower,
        lower_stderr,
        argmax_step,
        upper: Some(upper),
        upper_stderr: Some(upper_stderr),
    })
}

/// Lower bound between the pooled marginals of two ensembles.
pub fn d_t_bounds_ensembles(a: &TrajectoryEnsemble, b: &TrajectoryEnsemble) -> Result<DtBounds> {
    if a.steps() != b.steps() || a.dt() != b.dt() {
        return Err(Error::shape(format!(
            "time grids differ: {} steps of {} vs {} steps of {}",
            a.steps(),
            a.dt(),
            b.steps(),
            b.dt()
        )));
    }
    if a.stride() != b.stride() {
        return Err(Error::shape(
            "ensembles were recorded with different strides",
        ));
    }
    let sa: Vec<Vec<f64>> = a
        .recorded_steps()
        .into_iter()
        .map(|s| a.states_at(s).to_vec())
        .collect();
    let sb: Vec<Vec<f64>> = b
        .recorded_steps()
        .into_iter()
        .map(|s| b.states_at(s).to_vec())
        .collect();
    let (lower, frame) = d_t_lower(&sa, &sb)?;
    Ok(DtBounds {
        lower,
        lower_stderr: 0.0,
        argmax_step: frame * a.stride(),
        upper: None,
        upper_stderr: None,
    })
}

/// The label-averaged law at every recorded time: all particles pooled.
pub fn pooled_marginal(e: &TrajectoryEnsemble) -> Vec<MeasureSnapshot> {
    e.recorded_steps()
        .into_iter()
        .map(|s| pooled_at(e, s))
        .collect()
}

pub fn pooled_at(e: &TrajectoryEnsemble, step: usize) -> MeasureSnapshot {
    MeasureSnapshot::empirical(e.states_at(step).to_vec())
        .expect("ensembles are non-empty and finite")
}

/// Pooled samples at `step` across several replica ensembles.
pub fn pooled_replicas(es: &[TrajectoryEnsemble], step: usize) -> Result<MeasureSnapshot> {
    MeasureSnapshot::empirical(
        es.iter()
            .flat_map(|e| e.states_at(step).iter().copied())
            .collect(),
    )
}

/// Samples of group `g` at `step`, pooled across replicas.
pub fn group_replicas(es: &[TrajectoryEnsemble], step: usize, g: usize) -> Result<MeasureSnapshot> {
    MeasureSnapshot::empirical(es.iter().flat_map(|e| e.group_states(step, g)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        coupled_pair, simulate_finite, CoefficientSet, Distribution, InitialDatum, SimConfig,
    };
    use crate::graphon::Kernel;

    #[test]
    fn identical_ensembles_have_zero_lower_bound() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let init = InitialDatum::iid(Distribution::Gaussian { mean: 0.0, sd: 1.0 }).unwrap();
        let cfg = SimConfig::new(0.1, 0.01, 30, 2);
        let a = simulate_finite(&Kernel::Constant(0.5), &c, &init, &cfg).unwrap();
        let b = d_t_bounds_ensembles(&a, &a).unwrap();
        assert_eq!(b.lower, 0.0);
        let other = simulate_finite(
            &Kernel::Constant(0.5),
            &c,
            &init,
            &SimConfig::new(0.2, 0.01, 30, 2),
        )
        .unwrap();
        assert!(matches!(
            d_t_bounds_ensembles(&a, &other),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn constant_kernel_pair_has_zero_bounds() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let init = InitialDatum::iid(Distribution::Gaussian { mean: 0.0, sd: 1.0 }).unwrap();
        let est = coupled_pair(
            &Kernel::Constant(0.5),
            0.2,
            0.7,
            &c,
            &init,
            20,
            &SimConfig::new(0.1, 0.01, 30, 2),
        )
        .unwrap();
        let b = d_t_bounds_coupled(&est).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.upper, Some(0.0));
    }

    #[test]
    fn pooled_single_block_is_the_block_marginal() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let init = InitialDatum::iid(Distribution::Gaussian { mean: 0.0, sd: 1.0 }).unwrap();
        let e = simulate_finite(
            &Kernel::Constant(0.5),
            &c,
            &init,
            &SimConfig::new(0.1, 0.01, 30, 2),
        )
        .unwrap();
        let pooled = pooled_marginal(&e);
        let block = MeasureSnapshot::empirical(e.group_states(10, 0)).unwrap();
        assert_eq!(pooled[10], block);
    }
}
