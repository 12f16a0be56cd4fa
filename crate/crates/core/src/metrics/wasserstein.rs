use crate::error::{Error, Result};
use crate::pde::{SpatialGrid, MASS_TOL};

/// Quantile levels `(q + ½) / QUANTILE_MESH` used whenever two measures
/// cannot be paired sample by sample.
pub const QUANTILE_MESH: usize = 2048;

/// A one-dimensional probability law.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSnapshot {
    /// Sorted equal-weight samples.
    Empirical(Vec<f64>),
    /// Cell averages on a grid, unit mass.
    Gridded {
        grid: SpatialGrid,
        density: Vec<f64>,
    },
}

impl MeasureSnapshot {
    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("empirical measure needs at least one sample"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("empirical measure has non-finite samples"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(MeasureSnapshot::Empirical(samples))
    }

    pub fn gridded(grid: SpatialGrid, density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.cells() {
            return Err(Error::shape(format!(
                "{} cells on a {}-cell grid",
                density.len(),
                grid.cells()
            )));
        }
        if density.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain("density must be finite and nonnegative"));
        }
        let mass = grid.mass(&density);
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::domain(format!(
                "density has mass {mass}, expected 1"
            )));
        }
        Ok(MeasureSnapshot::Gridded { grid, density })
    }

    /// Left-continuous quantile function at `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            MeasureSnapshot::Empirical(s) => {
                let n = s.len();
                let i = ((u * n as f64).ceil() as usize).clamp(1, n) - 1;
                s[i]
            }
            MeasureSnapshot::Gridded { grid, density } => {
                // The cumulative distribution is piecewise linear; invert it exactly.
                let h = grid.h();
                let mut below = 0.0;
                for (c, &r) in density.iter().enumerate() {
                    let mass = r * h;
                    if mass > 0.0 && below + mass >= u {
                        return grid.edge(c) + h * ((u - below) / mass).clamp(0.0, 1.0);
                    }
                    below += mass;
                }
                let last = density
                    .iter()
                    .rposition(|&r| r > 0.0)
                    .unwrap_or(grid.cells() - 1);
                grid.edge(last + 1)
            }
        }
    }

    pub fn quantiles_on_mesh(&self) -> Vec<f64> {
        match self {
            MeasureSnapshot::Empirical(_) => (0..QUANTILE_MESH)
                .map(|q| self.quantile(mesh_level(q)))
                .collect(),
            MeasureSnapshot::Gridded { grid, density } => {
                // One sweep over cells instead of a search per level.
                let h = grid.h();
                let mut out = Vec::with_capacity(QUANTILE_MESH);
                let (mut c, mut below) = (0usize, 0.0);
                for q in 0..QUANTILE_MESH {
                    let u = mesh_level(q);
                    while c < density.len() && (density[c] == 0.0 || below + density[c] * h < u) {
                        below += density[c] * h;
                        c += 1;
                    }
                    if c == density.len() {
                        out.push(self.quantile(u));
                    } else {
                        let mass = density[c] * h;
                        out.push(grid.edge(c) + h * ((u - below) / mass).clamp(0.0, 1.0));
                    }
                }
                out
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            MeasureSnapshot::Empirical(s) => s.iter().sum::<f64>() / s.len() as f64,
            MeasureSnapshot::Gridded { grid, density } => {
                grid.h()
                    * density
                        .iter()
                        .enumerate()
                        .map(|(c, r)| grid.center(c) * r)
                        .sum::<f64>()
            }
        }
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        match self {
            MeasureSnapshot::Empirical(s) => {
                s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / s.len() as f64
            }
            MeasureSnapshot::Gridded { grid, density } => {
                let h = grid.h();
                // Cell-average second moment includes the within-cell spread h²/12.
                h * density
                    .iter()
                    .enumerate()
                    .map(|(c, r)| ((grid.center(c) - m).powi(2) + h * h / 12.0) * r)
                    .sum::<f64>()
            }
        }
    }
}

#[inline]
fn mesh_level(q: usize) -> f64 {
    (q as f64 + 0.5) / QUANTILE_MESH as f64
}

/// Paired quantile values under the optimal (monotone) coupling.
fn coupled_quantiles(a: &MeasureSnapshot, b: &MeasureSnapshot) -> (Vec<f64>, Vec<f64>) {
    match (a, b) {
        (MeasureSnapshot::Empirical(x), MeasureSnapshot::Empirical(y)) if x.len() == y.len() => {
            (x.clone(), y.clone())
        }
        _ => (a.quantiles_on_mesh(), b.quantiles_on_mesh()),
    }
}

/// Wasserstein-2 distance. Equal-size samples are paired in sorted order,
/// which is exact; anything else is compared on the quantile mesh.
pub fn wasserstein2(a: &MeasureSnapshot, b: &MeasureSnapshot) -> Result<f64> {
    for m in [a, b] {
        if let MeasureSnapshot::Empirical(s) = m {
            if s.is_empty() {
                return Err(Error::domain("empirical measure needs at least one sample"));
            }
        }
    }
    let (x, y) = coupled_quantiles(a, b);
    let n = x.len() as f64;
    Ok((x
        .iter()
        .zip(&y)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        / n)
        .sqrt())
}

/// `W₂` between two raw sample sets.
pub fn wasserstein2_samples(a: &[f64], b: &[f64]) -> Result<f64> {
    wasserstein2(
        &MeasureSnapshot::empirical(a.to_vec())?,
        &MeasureSnapshot::empirical(b.to_vec())?,
    )
}

/// `|∫f dμ − ∫f dν|` evaluated on the same representation [`wasserstein2`]
/// uses, so that the bound by `W₂` holds for 1-Lipschitz `f` exactly.
pub fn test_function_gap(a: &MeasureSnapshot, b: &MeasureSnapshot, f: impl Fn(f64) -> f64) -> f64 {
    let (x, y) = coupled_quantiles(a, b);
    let n = x.len() as f64;
    let fa: f64 = x.iter().map(|&v| f(v)).sum::<f64>() / n;
    let fb: f64 = y.iter().map(|&v| f(v)).sum::<f64>() / n;
    (fa - fb).abs()
}
