use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graphon::partition::{equipartition, IntervalSet};
use crate::graphon::step::StepKernel;
use crate::quadrature::{integrate, DEFAULT_ABS_TOL, DEFAULT_MAX_EVALS};

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Profile `f` of a Cayley graphon `W(x, y) = f((x − y) mod 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CayleyProfile {
    /// `f(u) = mean + amplitude·cos(2πu)`.
    Cosine { mean: f64, amplitude: f64 },
    /// `f(u) = 1` if the circular distance `min(u, 1 − u)` is below `half_width`.
    Band { half_width: f64 },
}

impl CayleyProfile {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            CayleyProfile::Cosine { mean, amplitude } => {
                mean + amplitude * (2.0 * std::f64::consts::PI * u).cos()
            }
            CayleyProfile::Band { half_width } => {
                if u.min(1.0 - u) < half_width {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn degree(&self) -> f64 {
        match *self {
            CayleyProfile::Cosine { mean, .. } => mean,
            CayleyProfile::Band { half_width } => (2.0 * half_width).min(1.0),
        }
    }

    fn range(&self) -> (f64, f64) {
        match *self {
            CayleyProfile::Cosine { mean, amplitude } => {
                (mean - amplitude.abs(), mean + amplitude.abs())
            }
            CayleyProfile::Band { half_width } => (
                if half_width >= 0.5 { 1.0 } else { 0.0 },
                if half_width > 0.0 { 1.0 } else { 0.0 },
            ),
        }
    }
}

/// A kernel given by a closed-form evaluator and a declared sup bound.
#[derive(Clone)]
pub struct AnalyticKernel {
    name: String,
    f: KernelFn,
    bound: f64,
    graphon: bool,
}

impl fmt::Debug for AnalyticKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticKernel")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .field("graphon", &self.graphon)
            .finish()
    }
}

impl AnalyticKernel {
    /// `graphon` certifies that the evaluator stays in `[0, 1]`.
    pub fn new(
        name: impl Into<String>,
        bound: f64,
        graphon: bool,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AnalyticKernel {
            name: name.into(),
            f: Arc::new(f),
            bound,
            graphon,
        }
    }

    pub fn cayley(profile: CayleyProfile) -> Self {
        let (lo, hi) = profile.range();
        let name = match profile {
            CayleyProfile::Cosine { mean, amplitude } => {
                format!("cayley:cosine:{mean},{amplitude}")
            }
            CayleyProfile::Band { half_width } => format!("cayley:band:{half_width}"),
        };
        AnalyticKernel::new(
            name,
            lo.abs().max(hi.abs()),
            lo >= 0.0 && hi <= 1.0,
            move |x, y| profile.eval((x - y).rem_euclid(1.0)),
        )
    }

    /// `W(x, y) = ((1 − x)(1 − y))^exponent`.
    pub fn scale_free(exponent: f64) -> Self {
        AnalyticKernel::new(format!("scalefree:{exponent}"), 1.0, true, move |x, y| {
            ((1.0 - x) * (1.0 - y)).powf(exponent)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }
}

#[derive(Debug, Clone)]
pub enum Kernel {
    Constant(f64),
    Step(StepKernel),
    Analytic(AnalyticKernel),
}

fn check_label(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(format!("label {x} outside [0, 1]")))
    }
}

impl Kernel {
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_label(x)?;
        check_label(y)?;
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    pub fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        match self {
            Kernel::Constant(p) => *p,
            Kernel::Step(w) => w.eval(x, y),
            Kernel::Analytic(a) => a.eval(x, y),
        }
    }

    pub fn bound(&self) -> f64 {
        match self {
            Kernel::Constant(p) => p.abs(),
            Kernel::Step(w) => w.bound(),
            Kernel::Analytic(a) => a.bound,
        }
    }

    pub fn is_graphon(&self) -> bool {
        match self {
            Kernel::Constant(p) => (0.0..=1.0).contains(p),
            Kernel::Step(w) => w.is_graphon(),
            Kernel::Analytic(a) => a.graphon,
        }
    }

    /// Short identifier used in provenance records.
    pub fn id(&self) -> String {
        match self {
            Kernel::Constant(p) => format!("constant:{p}"),
            Kernel::Step(w) => format!("step:k={}", w.k()),
            Kernel::Analytic(a) => a.name.clone(),
        }
    }

    /// The kernel as a step kernel, when it is one structurally.
    pub fn as_step(&self) -> Option<StepKernel> {
        match self {
            Kernel::Constant(p) => Some(StepKernel::constant(*p)),
            Kernel::Step(w) => Some(w.clone()),
            Kernel::Analytic(_) => None,
        }
    }

    /// `d(x) = ∫₀¹ W(x, y) dy`.
    pub fn degree(&self, x: f64) -> Result<f64> {
        self.degree_wrt(x, &IntervalSet::unit())
    }

    /// `d_A(x) = ∫_A W(x, y) dy`; exact for structural kernels, adaptive
    /// quadrature (absolute tolerance 1e-10) otherwise.
    pub fn degree_wrt(&self, x: f64, set: &IntervalSet) -> Result<f64> {
        check_label(x)?;
        match self {
            Kernel::Constant(p) => Ok(p * set.measure()),
            Kernel::Step(w) => Ok(w.block_degree_wrt(w.block_of(x), set)),
            Kernel::Analytic(a) => {
                let mut total = 0.0;
                for &(lo, hi) in set.intervals() {
                    total +=
                        integrate(|y| a.eval(x, y), lo, hi, DEFAULT_ABS_TOL, DEFAULT_MAX_EVALS)?;
                }
                Ok(total)
            }
        }
    }

    /// Block-average onto an equipartition into `k` blocks.
    pub fn step_approximate(&self, k: usize) -> Result<StepKernel> {
        if k == 0 {
            return Err(Error::domain("step approximation needs k >= 1"));
        }
        match self {
            Kernel::Constant(p) => StepKernel::uniform(vec![vec![*p; k]; k]),
            Kernel::Step(w) => w.averaged_onto(equipartition(k)),
            Kernel::Analytic(a) => {
                let breaks = equipartition(k);
                let mut values = vec![vec![0.0; k]; k];
                for i in 0..k {
                    for j in i..k {
                        let (x0, x1) = (breaks[i], breaks[i + 1]);
                        let (y0, y1) = (breaks[j], breaks[j + 1]);
                        let inner_err = std::cell::RefCell::new(None);
                        let mass = integrate(
                            |x| match integrate(
                                |y| a.eval(x, y),
                                y0,
                                y1,
                                DEFAULT_ABS_TOL,
                                DEFAULT_MAX_EVALS,
                            ) {
                                Ok(v) => v,
                                Err(e) => {
                                    inner_err.borrow_mut().get_or_insert(e);
                                    0.0
                                }
                            },
                            x0,
                            x1,
                            DEFAULT_ABS_TOL,
                            DEFAULT_MAX_EVALS,
                        )?;
                        if let Some(e) = inner_err.into_inner() {
                            return Err(e);
                        }
                        let v = mass / ((x1 - x0) * (y1 - y0));
                        values[i][j] = v;
                        values[j][i] = v;
                    }
                }
                StepKernel::new(breaks, values)
            }
        }
    }
}

impl From<StepKernel> for Kernel {
    fn from(w: StepKernel) -> Self {
        Kernel::Step(w)
    }
}

impl From<AnalyticKernel> for Kernel {
    fn from(a: AnalyticKernel) -> Self {
        Kernel::Analytic(a)
    }
}
