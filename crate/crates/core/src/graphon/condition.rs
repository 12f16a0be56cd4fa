use crate::error::{Error, Result};
use crate::graphon::kernel::Kernel;
use crate::graphon::partition::LabelPartition;

/// Default tolerance for step and constant kernels, where degrees are exact sums.
pub const STEP_TOLERANCE: f64 = 1e-8;
/// Default tolerance for analytic kernels, whose degrees come from quadrature.
pub const ANALYTIC_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    /// Largest spread `max − min` of `d_ȳ(x)` over `x` in one class, over all class pairs.
    pub max_deviation: f64,
}

pub fn default_tolerance(w: &Kernel) -> f64 {
    match w {
        Kernel::Analytic(_) => ANALYTIC_TOLERANCE,
        _ => STEP_TOLERANCE,
    }
}

/// Checks that every class-degree `d_ȳ(·)` is constant on every class `[x̄]`.
///
/// Step kernels are checked exactly per block (each block meeting a class
/// contributes one degree value); analytic kernels are sampled at
/// `samples_per_class` points spread evenly through each class.
pub fn check_condition_h(
    w: &Kernel,
    partition: &LabelPartition,
    samples_per_class: usize,
    tol: f64,
) -> Result<ConditionReport> {
    if samples_per_class < 2 {
        return Err(Error::domain(
            "condition (H) check needs at least two samples per class",
        ));
    }
    for (c, class) in partition.classes().iter().enumerate() {
        if class.measure() <= 0.0 {
            return Err(Error::Partition(format!("class {c} has zero measure")));
        }
    }
    let mut max_deviation: f64 = 0.0;
    for source in partition.classes() {
        for target in partition.classes() {
            let values: Vec<f64> = match w {
                Kernel::Constant(_) => vec![w.degree_wrt(source.point_at_fraction(0.0), target)?],
                Kernel::Step(step) => (0..step.k())
                    .filter(|&b| {
                        let (lo, hi) = step.block(b);
                        source.overlap(lo, hi) > 0.0
                    })
                    .map(|b| step.block_degree_wrt(b, target))
                    .collect(),
                Kernel::Analytic(_) => (0..samples_per_class)
                    .map(|s| {
                        let q = (s as f64 + 0.5) / samples_per_class as f64;
                        w.degree_wrt(source.point_at_fraction(q), target)
                    })
                    .collect::<Result<_>>()?,
            };
            let (lo, hi) = values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            max_deviation = max_deviation.max(hi - lo);
        }
    }
    Ok(ConditionReport {
        holds: max_deviation <= tol,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::kernel::{AnalyticKernel, CayleyProfile};
    use crate::graphon::step::StepKernel;

    #[test]
    fn step_kernel_satisfies_h_on_its_own_blocks() {
        let w = StepKernel::uniform(vec![
            vec![0.9, 0.1, 0.3],
            vec![0.1, 0.2, 0.5],
            vec![0.3, 0.5, 0.7],
        ])
        .unwrap();
        let r =
            check_condition_h(&Kernel::Step(w.clone()), &w.partition(), 4, STEP_TOLERANCE).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_deviation, 0.0);
    }

    #[test]
    fn constant_degree_cayley_with_one_class() {
        let w = Kernel::Analytic(AnalyticKernel::cayley(CayleyProfile::Cosine {
            mean: 0.5,
            amplitude: 0.25,
        }));
        let r = check_condition_h(&w, &LabelPartition::whole(), 16, ANALYTIC_TOLERANCE).unwrap();
        assert!(r.holds, "deviation {}", r.max_deviation);
    }

    #[test]
    fn non_constant_degree_fails() {
        let w = Kernel::Step(StepKernel::uniform(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap());
        let r = check_condition_h(&w, &LabelPartition::whole(), 4, STEP_TOLERANCE).unwrap();
        assert!(!r.holds);
        assert!((r.max_deviation - 0.5).abs() < 1e-15);
    }

    #[test]
    fn balanced_rows_satisfy_h_with_coarser_classes() {
        let w = StepKernel::uniform(vec![
            vec![0.9, 0.1, 0.2, 0.6],
            vec![0.1, 0.9, 0.6, 0.2],
            vec![0.2, 0.6, 0.3, 0.5],
            vec![0.6, 0.2, 0.5, 0.3],
        ])
        .unwrap();
        let p = LabelPartition::with_classes(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![0, 0, 1, 1])
            .unwrap();
        let r = check_condition_h(&Kernel::Step(w), &p, 2, STEP_TOLERANCE).unwrap();
        assert!(r.holds, "deviation {}", r.max_deviation);
    }

    #[test]
    fn needs_two_samples() {
        let err = check_condition_h(&Kernel::Constant(0.5), &LabelPartition::whole(), 1, 1e-8)
            .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
