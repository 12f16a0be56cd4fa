use crate::dynamics::{validate_time_grid, CoefficientSet, Diffusion, Interaction};
use crate::error::{Error, Result};
use crate::graphon::StepKernel;
use crate::pde::grid::SpatialGrid;

/// Cells below this are a solver fault; values in `[-NEG_TOL, 0)` are clipped.
pub const NEG_TOL: f64 = 1e-14;
/// Allowed drift of `h · Σρ` away from 1 per block.
pub const MASS_TOL: f64 = 1e-10;

/// Per-block cell averages at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub time: f64,
    pub blocks: Vec<Vec<f64>>,
}

/// Snapshots of a Fokker–Planck solve.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySeries {
    pub grid: SpatialGrid,
    pub frames: Vec<DensityGrid>,
    /// Cells clipped from `[-NEG_TOL, 0)` to zero over the whole run.
    pub clipped: usize,
}

impl DensitySeries {
    pub fn last(&self) -> &DensityGrid {
        self.frames
            .last()
            .expect("a series holds at least the initial frame")
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.time).collect()
    }

    /// Frame closest to time `t`.
    pub fn at_time(&self, t: f64) -> &DensityGrid {
        self.frames
            .iter()
            .min_by(|a, b| (a.time - t).abs().total_cmp(&(b.time - t).abs()))
            .expect("non-empty series")
    }
}

/// `z / (e^z - 1)`, continuous at 0.
#[inline]
fn bernoulli(z: f64) -> f64 {
    if z.abs() < 1e-10 {
        1.0 - 0.5 * z
    } else {
        z / z.exp_m1()
    }
}

/// Interaction integrals `∫ Γ(x_f, θ') ρ(θ') dθ'` at faces by midpoint quadrature.
enum InteractionPlan {
    Zero,
    /// `own[r][f] = f_r(x_f)`, `other[r][c] = g_r(x_c)`.
    Separable {
        own: Vec<Vec<f64>>,
        other: Vec<Vec<f64>>,
    },
    /// Row-major `(M-1) × M` table of `Γ(x_f, x_c)`.
    General {
        table: Vec<f64>,
    },
}

impl InteractionPlan {
    fn new(coeffs: &CoefficientSet, faces: &[f64], centers: &[f64]) -> Self {
        match coeffs.interaction() {
            Interaction::Zero => InteractionPlan::Zero,
            Interaction::Separable(factors) => InteractionPlan::Separable {
                own: factors
                    .iter()
                    .map(|(f, _)| faces.iter().map(|&x| f(x)).collect())
                    .collect(),
                other: factors
                    .iter()
                    .map(|(_, g)| centers.iter().map(|&x| g(x)).collect())
                    .collect(),
            },
            Interaction::General(gamma) => InteractionPlan::General {
                table: faces
                    .iter()
                    .flat_map(|&x| centers.iter().map(move |&y| gamma(x, y)))
                    .collect(),
            },
        }
    }

    /// Adds `weight · ∫Γ(x_f, ·)ρ` to `out[f]` for every face.
    fn accumulate(&self, rho: &[f64], h: f64, weight: f64, out: &mut [f64]) {
        match self {
            InteractionPlan::Zero => {}
            InteractionPlan::Separable { own, other } => {
                for (f_r, g_r) in own.iter().zip(other) {
                    let moment = h * g_r.iter().zip(rho).map(|(g, r)| g * r).sum::<f64>();
                    let c = weight * moment;
                    for (o, &fx) in out.iter_mut().zip(f_r) {
                        *o += c * fx;
                    }
                }
            }
            InteractionPlan::General { table } => {
                let m = rho.len();
                for (f, o) in out.iter_mut().enumerate() {
                    let row = &table[f * m..(f + 1) * m];
                    *o += weight * h * row.iter().zip(rho).map(|(g, r)| g * r).sum::<f64>();
                }
            }
        }
    }
}

fn validate_density(grid: &SpatialGrid, rho: &[f64], block: usize) -> Result<()> {
    if rho.len() != grid.cells() {
        return Err(Error::shape(format!(
            "block {block}: density has {} cells, grid has {}",
            rho.len(),
            grid.cells()
        )));
    }
    if let Some(v) = rho.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::domain(format!(
            "block {block}: initial density has invalid value {v}"
        )));
    }
    let mass = grid.mass(rho);
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::domain(format!(
            "block {block}: initial density has mass {mass}, expected 1"
        )));
    }
    Ok(())
}

/// Thomas solve of a tridiagonal system, in place in `rhs`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) {
    let n = diag.len();
    scratch[0] = upper.first().copied().unwrap_or(0.0) / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i - 1] * scratch[i - 1];
        if i + 1 < n {
            scratch[i] = upper[i] / denom;
        }
        rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

/// Snapshots every `record_every` steps of the coupled Fokker–Planck system
/// on a step kernel. Block `i` is transported by
/// `b_i(θ) = F(θ) + Σ_j w_ij m_j ∫Γ(θ, θ') ρ^j(θ') dθ'` and diffused by `σ²/2`.
///
/// Fluxes use Scharfetter–Gummel exponential fitting (upwind where `σ = 0`)
/// with no-flux boundaries. The drift is frozen at the start of each step and
/// the resulting linear problem is solved implicitly.
pub fn solve_fp_system_recording(
    w: &StepKernel,
    coeffs: &CoefficientSet,
    init: &[Vec<f64>],
    grid: &SpatialGrid,
    horizon: f64,
    dt: f64,
    record_every: usize,
) -> Result<DensitySeries> {
    let steps = validate_time_grid(horizon, dt)?;
    let k = w.k();
    if init.len() != k {
        return Err(Error::shape(format!(
            "kernel has {k} blocks but {} initial densities were given",
            init.len()
        )));
    }
    for (b, rho) in init.iter().enumerate() {
        validate_density(grid, rho, b)?;
    }
    let record_every = record_every.max(1);
    let m = grid.cells();
    let h = grid.h();
    let centers = grid.centers();
    let faces: Vec<f64> = (1..m).map(|c| grid.edge(c)).collect();
    let plan = InteractionPlan::new(coeffs, &faces, &centers);
    let diff_face: Vec<f64> = faces
        .iter()
        .map(|&x| 0.5 * coeffs.diffusion(x).powi(2))
        .collect();
    // v = b - D', with D' by central differences of D at the neighboring centers.
    let diff_slope: Vec<f64> = match coeffs.diffusion_kind() {
        Diffusion::Constant(_) => vec![0.0; m - 1],
        Diffusion::Function(_) => (0..m - 1)
            .map(|f| {
                let d = |x: f64| 0.5 * coeffs.diffusion(x).powi(2);
                (d(centers[f + 1]) - d(centers[f])) / h
            })
            .collect(),
    };
    let drift_face: Vec<f64> = faces.iter().map(|&x| coeffs.drift(x)).collect();
    let weights: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| w.value(i, j) * w.measure(j)).collect())
        .collect();

    let mut rho: Vec<Vec<f64>> = init.to_vec();
    let mut frames = vec![DensityGrid {
        time: 0.0,
        blocks: rho.clone(),
    }];
    let mut clipped = 0;
    let (mut lower, mut diag, mut upper) = (vec![0.0; m - 1], vec![0.0; m], vec![0.0; m - 1]);
    let mut scratch = vec![0.0; m];
    let mut velocity = vec![0.0; m - 1];
    let r = dt / h;

    for step in 1..=steps {
        let mut next = Vec::with_capacity(k);
        for i in 0..k {
            velocity.copy_from_slice(&drift_face);
            for (j, rho_j) in rho.iter().enumerate() {
                if weights[i][j] != 0.0 {
                    plan.accumulate(rho_j, h, weights[i][j], &mut velocity);
                }
            }
            let mut vmax: f64 = 0.0;
            for (v, s) in velocity.iter_mut().zip(&diff_slope) {
                *v -= s;
                vmax = vmax.max(v.abs());
            }
            if vmax * r > 1.0 {
                return Err(Error::Stability {
                    dt,
                    max_speed: vmax,
                    suggested_dt: 0.9 * h / vmax,
                });
            }
            diag.iter_mut().for_each(|d| *d = 1.0);
            for f in 0..m - 1 {
                let (d, v) = (diff_face[f], velocity[f]);
                // J_f = alpha · ρ_f − beta · ρ_{f+1}
                let (alpha, beta) = if d > 0.0 {
                    let z = v * h / d;
                    (d / h * bernoulli(-z), d / h * bernoulli(z))
                } else {
                    (v.max(0.0), (-v).max(0.0))
                };
                diag[f] += r * alpha;
                diag[f + 1] += r * beta;
                upper[f] = -r * beta;
                lower[f] = -r * alpha;
            }
            let mut sol = rho[i].clone();
            thomas(&lower, &diag, &upper, &mut sol, &mut scratch);
            for (c, v) in sol.iter_mut().enumerate() {
                if *v < 0.0 {
                    if *v < -NEG_TOL || !v.is_finite() {
                        return Err(Error::SolverFault(format!(
                            "block {i}, step {step}, cell {c}: density {v} below -{NEG_TOL}"
                        )));
                    }
                    *v = 0.0;
                    clipped += 1;
                } else if !v.is_finite() {
                    return Err(Error::SolverFault(format!(
                        "block {i}, step {step}, cell {c}: density {v}"
                    )));
                }
            }
            let mass = grid.mass(&sol);
            if (mass - 1.0).abs() > MASS_TOL {
                return Err(Error::SolverFault(format!(
                    "block {i}, step {step}: mass drifted to {mass}"
                )));
            }
            next.push(sol);
        }
        rho = next;
        if step % record_every == 0 || step == steps {
            frames.push(DensityGrid {
                time: step as f64 * dt,
                blocks: rho.clone(),
            });
        }
    }
    Ok(DensitySeries {
        grid: *grid,
        frames,
        clipped,
    })
}

/// [`solve_fp_system_recording`] keeping every step.
pub fn solve_fp_system(
    w: &StepKernel,
    coeffs: &CoefficientSet,
    init: &[Vec<f64>],
    grid: &SpatialGrid,
    horizon: f64,
    dt: f64,
) -> Result<DensitySeries> {
    solve_fp_system_recording(w, coeffs, init, grid, horizon, dt, 1)
}

/// Single-population McKean–Vlasov equation with interaction strength `p`.
pub fn solve_mckean_vlasov(
    p: f64,
    coeffs: &CoefficientSet,
    init: &[f64],
    grid: &SpatialGrid,
    horizon: f64,
    dt: f64,
) -> Result<DensitySeries> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "interaction strength p = {p} outside [0, 1]"
        )));
    }
    solve_fp_system(
        &StepKernel::constant(p),
        coeffs,
        &[init.to_vec()],
        grid,
        horizon,
        dt,
    )
}

/// Half-width `8 · (sd + sup|F| + sup|Γ|) · max(1, T)` of a truncated domain.
pub fn default_half_width(init_sd: f64, coeffs: &CoefficientSet, horizon: f64) -> f64 {
    let b = coeffs.bounds();
    8.0 * (init_sd + b.drift_sup + b.interaction_sup) * horizon.max(1.0)
}
