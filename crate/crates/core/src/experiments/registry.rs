use std::path::Path;

use crate::dynamics::{CoefficientSet, COEFFICIENT_NAMES};
use crate::error::{Error, Result};
use crate::graphon::spec::parse_kernel;
use crate::graphon::{AnalyticKernel, CayleyProfile, Kernel, StepKernel};

pub const KERNEL_NAMES: &[&str] = &[
    "fig1-cayley",
    "fig1-constant",
    "fig1-disconnected",
    "fig2-scalefree",
    "fig2-step3",
    "h-balanced4",
    "h-violating2",
    "sbm2-disconnected",
    "sbm2-unequal",
];

pub const DISTRIBUTION_KINDS: &[&str] = &["empirical", "gaussian", "point-mass", "uniform"];

/// Two components on `[0, ⅓)` and `[⅓, 1]`; the smaller one is denser so
/// every label has degree ⅓.
pub fn fig1_disconnected() -> StepKernel {
    StepKernel::new(
        vec![0.0, 1.0 / 3.0, 1.0],
        vec![vec![1.0, 0.0], vec![0.0, 0.5]],
    )
    .expect("valid kernel")
}

/// Block means of `(1 − x)(1 − y)` on thirds.
pub fn fig2_step3() -> StepKernel {
    let a = [5.0 / 6.0, 0.5, 1.0 / 6.0];
    StepKernel::uniform(
        a.iter()
            .map(|x| a.iter().map(|y| x * y).collect())
            .collect(),
    )
    .expect("valid kernel")
}

/// Four blocks whose degrees towards `{0,1}` and `{2,3}` are equal inside
/// each of those pairs.
pub fn h_balanced4() -> StepKernel {
    StepKernel::uniform(vec![
        vec![0.9, 0.1, 0.2, 0.6],
        vec![0.1, 0.9, 0.6, 0.2],
        vec![0.2, 0.6, 0.3, 0.5],
        vec![0.6, 0.2, 0.5, 0.3],
    ])
    .expect("valid kernel")
}

/// One connected half and one isolated half.
pub fn h_violating2() -> StepKernel {
    StepKernel::uniform(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).expect("valid kernel")
}

/// Two isolated halves.
pub fn sbm2_disconnected() -> StepKernel {
    StepKernel::uniform(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).expect("valid kernel")
}

/// Two communities of measure 0.4 and 0.6.
pub fn sbm2_unequal() -> StepKernel {
    StepKernel::new(vec![0.0, 0.4, 1.0], vec![vec![0.9, 0.3], vec![0.3, 0.6]])
        .expect("valid kernel")
}

pub fn named_kernel(name: &str) -> Option<Kernel> {
    Some(match name {
        "fig1-constant" => Kernel::Constant(1.0 / 3.0),
        "fig1-disconnected" => Kernel::Step(fig1_disconnected()),
        "fig1-cayley" => Kernel::Analytic(AnalyticKernel::cayley(CayleyProfile::Cosine {
            mean: 1.0 / 3.0,
            amplitude: 0.25,
        })),
        "fig2-scalefree" => Kernel::Analytic(AnalyticKernel::scale_free(1.0)),
        "fig2-step3" => Kernel::Step(fig2_step3()),
        "h-balanced4" => Kernel::Step(h_balanced4()),
        "h-violating2" => Kernel::Step(h_violating2()),
        "sbm2-disconnected" => Kernel::Step(sbm2_disconnected()),
        "sbm2-unequal" => Kernel::Step(sbm2_unequal()),
        _ => return None,
    })
}

/// A registry name or a kernel specification string.
pub fn resolve_kernel(name: &str, base_dir: &Path) -> Result<Kernel> {
    match named_kernel(name) {
        Some(k) => Ok(k),
        None if name.contains(':') => parse_kernel(name, base_dir),
        None => Err(Error::config(format!(
            "unknown kernel '{name}' (available: {})",
            KERNEL_NAMES.join(", ")
        ))),
    }
}

pub fn resolve_step_kernel(name: &str, base_dir: &Path) -> Result<StepKernel> {
    let k = resolve_kernel(name, base_dir)?;
    k.as_step()
        .ok_or_else(|| Error::config(format!("kernel '{name}' is not a step kernel")))
}

pub fn resolve_coefficients(name: &str) -> Result<CoefficientSet> {
    CoefficientSet::named(name)
}

/// Deterministic listing of everything the registry knows.
pub fn registry_list() -> String {
    let mut out = String::new();
    out.push_str("kernels:\n");
    for name in KERNEL_NAMES {
        out.push_str(&format!("  {name}\n"));
    }
    out.push_str("coefficients:\n");
    for name in COEFFICIENT_NAMES {
        out.push_str(&format!("  {name}\n"));
    }
    out.push_str("distributions:\n");
    for name in DISTRIBUTION_KINDS {
        out.push_str(&format!("  {name}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_name_resolves() {
        for name in KERNEL_NAMES {
            resolve_kernel(name, Path::new(".")).unwrap();
        }
        assert!(matches!(
            resolve_kernel("nope", Path::new(".")),
            Err(Error::Config(_))
        ));
        assert!(resolve_kernel("constant:0.2", Path::new(".")).is_ok());
    }

    #[test]
    fn listing_is_stable_and_complete() {
        let a = registry_list();
        assert_eq!(a, registry_list());
        for needle in [
            "kuramoto",
            "zero",
            "tanh-drift",
            "fig1-disconnected",
            "fig1-cayley",
            "fig2-step3",
        ] {
            assert!(a.contains(needle), "{needle}");
        }
    }

    #[test]
    fn figure_one_kernels_have_degree_one_third() {
        for name in ["fig1-constant", "fig1-disconnected", "fig1-cayley"] {
            let k = named_kernel(name).unwrap();
            for x in [0.05, 0.3, 0.5, 0.95] {
                assert!(
                    (k.degree(x).unwrap() - 1.0 / 3.0).abs() < 1e-10,
                    "{name} at {x}"
                );
            }
        }
    }
}
