use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::{Domain, Stream};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type PairFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Interaction `Γ(θ, θ')`, first argument the particle's own state.
#[derive(Clone)]
pub enum Interaction {
    Zero,
    /// `Γ(a, b) = Σ_r f_r(a) · g_r(b)`; lets interaction sums collapse to O(N).
    Separable(Vec<(ScalarFn, ScalarFn)>),
    General(PairFn),
}

impl Interaction {
    #[inline]
    pub fn eval(&self, own: f64, other: f64) -> f64 {
        match self {
            Interaction::Zero => 0.0,
            Interaction::Separable(factors) => factors.iter().map(|(f, g)| f(own) * g(other)).sum(),
            Interaction::General(gamma) => gamma(own, other),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Interaction::Zero)
    }
}

#[derive(Clone)]
pub enum Diffusion {
    Constant(f64),
    Function(ScalarFn),
}

impl Diffusion {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Diffusion::Constant(s) => *s,
            Diffusion::Function(f) => f(x),
        }
    }
}

/// Declared Lipschitz constants and sup bounds of `F`, `Γ` and `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub drift_lipschitz: f64,
    pub drift_sup: f64,
    pub interaction_lipschitz: f64,
    pub interaction_sup: f64,
    pub diffusion_lipschitz: f64,
    pub diffusion_sup: f64,
}

impl CoefficientBounds {
    pub const UNIT: CoefficientBounds = CoefficientBounds {
        drift_lipschitz: 1.0,
        drift_sup: 1.0,
        interaction_lipschitz: 1.0,
        interaction_sup: 1.0,
        diffusion_lipschitz: 1.0,
        diffusion_sup: 1.0,
    };
}

/// Drift `F`, interaction `Γ` and diffusion `σ` of the particle system.
#[derive(Clone)]
pub struct CoefficientSet {
    name: String,
    drift: Option<ScalarFn>,
    interaction: Interaction,
    diffusion: Diffusion,
    bounds: CoefficientBounds,
}

impl fmt::Debug for CoefficientSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSet")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

/// Largest observed ratios from a randomized check of the declared bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub drift_lipschitz: f64,
    pub drift_sup: f64,
    pub interaction_lipschitz_own: f64,
    pub interaction_lipschitz_other: f64,
    pub interaction_sup: f64,
    pub diffusion_lipschitz: f64,
    pub diffusion_sup: f64,
}

pub const COEFFICIENT_NAMES: &[&str] = &[
    "heat",
    "kuramoto",
    "kuramoto-deterministic",
    "tanh-attraction",
    "tanh-drift",
    "zero",
];

fn kuramoto() -> Interaction {
    // sin(b − a) = cos(a)·sin(b) − sin(a)·cos(b)
    Interaction::Separable(vec![
        (Arc::new(f64::cos), Arc::new(f64::sin)),
        (Arc::new(|a: f64| -a.sin()), Arc::new(f64::cos)),
    ])
}

impl CoefficientSet {
    pub fn new(
        name: impl Into<String>,
        drift: Option<ScalarFn>,
        interaction: Interaction,
        diffusion: Diffusion,
        bounds: CoefficientBounds,
    ) -> Self {
        CoefficientSet {
            name: name.into(),
            drift,
            interaction,
            diffusion,
            bounds,
        }
    }

    /// Built-in coefficient sets, see [`COEFFICIENT_NAMES`].
    pub fn named(name: &str) -> Result<Self> {
        let unit = CoefficientBounds::UNIT;
        let set = match name {
            "zero" => CoefficientSet::new(
                name,
                None,
                Interaction::Zero,
                Diffusion::Constant(0.0),
                unit,
            ),
            "heat" => CoefficientSet::new(
                name,
                None,
                Interaction::Zero,
                Diffusion::Constant(1.0),
                unit,
            ),
            "kuramoto" => {
                CoefficientSet::new(name, None, kuramoto(), Diffusion::Constant(1.0), unit)
            }
            "kuramoto-deterministic" => {
                CoefficientSet::new(name, None, kuramoto(), Diffusion::Constant(0.0), unit)
            }
            "tanh-drift" => CoefficientSet::new(
                name,
                Some(Arc::new(|x: f64| -x.tanh())),
                kuramoto(),
                Diffusion::Constant(1.0),
                unit,
            ),
            "tanh-attraction" => CoefficientSet::new(
                name,
                None,
                Interaction::General(Arc::new(|a: f64, b: f64| (b - a).tanh())),
                Diffusion::Constant(1.0),
                unit,
            ),
            other => {
                return Err(Error::config(format!(
                    "unknown coefficient set '{other}' (available: {})",
                    COEFFICIENT_NAMES.join(", ")
                )))
            }
        };
        Ok(set)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bounds(&self) -> CoefficientBounds {
        self.bounds
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    pub fn diffusion_kind(&self) -> &Diffusion {
        &self.diffusion
    }

    pub fn has_drift(&self) -> bool {
        self.drift.is_some()
    }

    #[inline]
    pub fn drift(&self, x: f64) -> f64 {
        match &self.drift {
            Some(f) => f(x),
            None => 0.0,
        }
    }

    #[inline]
    pub fn gamma(&self, own: f64, other: f64) -> f64 {
        self.interaction.eval(own, other)
    }

    #[inline]
    pub fn diffusion(&self, x: f64) -> f64 {
        self.diffusion.eval(x)
    }

    pub fn with_interaction(mut self, interaction: Interaction) -> Self {
        self.interaction = interaction;
        self
    }

    /// Samples `samples` random pairs in `[-range, range]` and measures the
    /// largest difference quotients and magnitudes. Fails if any exceeds the
    /// declared bound by more than 1e-12. Γ is checked in each argument separately.
    pub fn check_bounds(&self, samples: usize, range: f64, seed: u64) -> Result<BoundsReport> {
        let s = Stream::new(seed, Domain::Search, 0xC0EF);
        let draw = |c: u64| (2.0 * s.uniform(c) - 1.0) * range;
        let mut r = BoundsReport {
            drift_lipschitz: 0.0,
            drift_sup: 0.0,
            interaction_lipschitz_own: 0.0,
            interaction_lipschitz_other: 0.0,
            interaction_sup: 0.0,
            diffusion_lipschitz: 0.0,
            diffusion_sup: 0.0,
        };
        let quotient = |fa: f64, fb: f64, a: f64, b: f64| {
            if a == b {
                0.0
            } else {
                (fa - fb).abs() / (a - b).abs()
            }
        };
        for i in 0..samples as u64 {
            let (a, b, c) = (draw(3 * i), draw(3 * i + 1), draw(3 * i + 2));
            let (fa, fb) = (self.drift(a), self.drift(b));
            r.drift_lipschitz = r.drift_lipschitz.max(quotient(fa, fb, a, b));
            r.drift_sup = r.drift_sup.max(fa.abs());
            let (ga, gb) = (self.gamma(a, c), self.gamma(b, c));
            r.interaction_lipschitz_own = r.interaction_lipschitz_own.max(quotient(ga, gb, a, b));
            let (gc, gd) = (self.gamma(c, a), self.gamma(c, b));
            r.interaction_lipschitz_other =
                r.interaction_lipschitz_other.max(quotient(gc, gd, a, b));
            r.interaction_sup = r.interaction_sup.max(ga.abs()).max(gc.abs());
            let (sa, sb) = (self.diffusion(a), self.diffusion(b));
            r.diffusion_lipschitz = r.diffusion_lipschitz.max(quotient(sa, sb, a, b));
            r.diffusion_sup = r.diffusion_sup.max(sa.abs());
        }
        let b = self.bounds;
        let checks = [
            ("drift Lipschitz", r.drift_lipschitz, b.drift_lipschitz),
            ("drift bound", r.drift_sup, b.drift_sup),
            (
                "interaction Lipschitz (own state)",
                r.interaction_lipschitz_own,
                b.interaction_lipschitz,
            ),
            (
                "interaction Lipschitz (other state)",
                r.interaction_lipschitz_other,
                b.interaction_lipschitz,
            ),
            ("interaction bound", r.interaction_sup, b.interaction_sup),
            (
                "diffusion Lipschitz",
                r.diffusion_lipschitz,
                b.diffusion_lipschitz,
            ),
            ("diffusion bound", r.diffusion_sup, b.diffusion_sup),
        ];
        for (what, observed, declared) in checks {
            if observed > declared + 1e-12 {
                return Err(Error::config(format!(
                    "coefficient set '{}': observed {what} {observed} exceeds declared {declared}",
                    self.name
                )));
            }
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_respect_declared_bounds() {
        for name in COEFFICIENT_NAMES {
            let c = CoefficientSet::named(name).unwrap();
            c.check_bounds(10_000, 10.0, 3).unwrap();
        }
    }

    #[test]
    fn separable_kuramoto_matches_sine() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        for (a, b) in [(0.0, 1.0), (2.5, -1.0), (-3.0, 4.0)] {
            assert!((c.gamma(a, b) - (b - a).sin()).abs() < 1e-15);
        }
        assert_eq!(c.gamma(0.0, 0.0), 0.0);
    }

    #[test]
    fn violated_bound_is_reported() {
        let steep = CoefficientSet::new(
            "steep",
            Some(Arc::new(|x: f64| (3.0 * x).tanh())),
            Interaction::Zero,
            Diffusion::Constant(1.0),
            CoefficientBounds::UNIT,
        );
        let err = steep.check_bounds(10_000, 5.0, 1).unwrap_err();
        assert!(err.to_string().contains("drift Lipschitz"));
    }

    #[test]
    fn unknown_name_is_a_config_error() {
        assert!(matches!(
            CoefficientSet::named("nope"),
            Err(Error::Config(_))
        ));
    }
}
