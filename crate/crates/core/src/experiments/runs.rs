use std::path::{Path, PathBuf};

use crate::dynamics::{
    coupled_pair, coupled_tags, mean_and_stderr, simulate_finite_recording,
    simulate_reduced_recording, validate_time_grid, CoefficientSet, CoupledPairEstimate,
    Distribution, InitialDatum, SimConfig, TrajectoryEnsemble,
};
use crate::error::{Error, Result};
use crate::experiments::config::{ExperimentId, ExperimentSpec};
use crate::experiments::output::{write_densities, write_metrics, write_summary, MetricRow};
use crate::experiments::registry::{resolve_coefficients, resolve_kernel, resolve_step_kernel};
use crate::experiments::{Check, ExperimentReport};
use crate::graphon::{
    check_condition_h, cut_distance_step, default_tolerance, CutNormMode, Kernel, StepKernel,
};
use crate::metrics::{
    continuity_diagnostic, d_t_bounds_coupled, group_replicas, pooled_replicas, test_function_gap,
    wasserstein2, ContinuityScenario, DtBounds, MeasureSnapshot,
};
use crate::par;
use crate::pde::{
    solve_fp_system, solve_mckean_vlasov, split_block_refinement_check, DensitySeries,
    RefinementScenario, SpatialGrid, REFINEMENT_TOL,
};
use crate::rng::{replica_seed, Domain, Stream};

/// Condition-(H) samples per class for analytic kernels.
const H_SAMPLES: usize = 64;
const RANDOM_REFINEMENTS: usize = 10;
const LIPSCHITZ_SLACK: f64 = 1e-12;

pub(crate) fn run(
    spec: &ExperimentSpec,
    base: &Path,
    mode: CutNormMode,
) -> Result<ExperimentReport> {
    let mut r = Run::new(spec)?;
    match spec.id {
        ExperimentId::MeanfieldEquivalence => meanfield(&mut r, base)?,
        ExperimentId::ConditionH => condition_h(&mut r, base)?,
        ExperimentId::Relabeling => relabeling(&mut r, base, mode)?,
        ExperimentId::CutnormContinuity => continuity(&mut r, base, mode)?,
        ExperimentId::InitialMixing => mixing(&mut r, base)?,
        ExperimentId::ReductionConsistency => reduction(&mut r, base)?,
    }
    r.finish()
}

struct Run<'a> {
    spec: &'a ExperimentSpec,
    coeffs: CoefficientSet,
    metrics: Vec<MetricRow>,
    checks: Vec<Check>,
    files: Vec<PathBuf>,
    lipschitz_excess: f64,
    lipschitz_pairs: usize,
}

impl<'a> Run<'a> {
    fn new(spec: &'a ExperimentSpec) -> Result<Self> {
        spec.sim.validate()?;
        spec.init.validate()?;
        if spec.replicas == 0 {
            return Err(Error::config("replicas must be at least 1"));
        }
        if spec.kernels.is_empty() {
            return Err(Error::config("no kernels given"));
        }
        Ok(Run {
            spec,
            coeffs: resolve_coefficients(&spec.coefficients)?,
            metrics: Vec::new(),
            checks: Vec::new(),
            files: Vec::new(),
            lipschitz_excess: f64::NEG_INFINITY,
            lipschitz_pairs: 0,
        })
    }

    fn metric(&mut self, t: f64, quantity: impl Into<String>, value: f64, stderr: f64) {
        self.metrics.push(MetricRow::new(
            self.spec.id.short(),
            t,
            quantity,
            value,
            stderr,
        ));
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn path(&self, name: &str) -> PathBuf {
        self.spec.out.join(name)
    }

    fn wrote(&mut self, p: PathBuf) {
        self.files.push(p);
    }

    /// W₂ between two snapshots, also auditing the Lipschitz test-function gaps.
    fn w2(&mut self, a: &MeasureSnapshot, b: &MeasureSnapshot) -> Result<f64> {
        let w = wasserstein2(a, b)?;
        let fs: [fn(f64) -> f64; 3] = [f64::sin, f64::tanh, |x| x.clamp(-1.0, 1.0)];
        for f in fs {
            self.lipschitz_excess = self.lipschitz_excess.max(test_function_gap(a, b, f) - w);
        }
        self.lipschitz_pairs += 1;
        Ok(w)
    }

    fn summaries(&mut self, tag: &str, e: &TrajectoryEnsemble) -> Result<()> {
        let p = write_summary(&self.path(&format!("summary_{tag}.csv")), &e.summary(1))?;
        self.wrote(p);
        Ok(())
    }

    fn densities(&mut self, tag: &str, series: &DensitySeries) -> Result<()> {
        let p = write_densities(
            &self.path(&format!("densities_{tag}.csv")),
            series,
            Some(&self.spec.times),
        )?;
        self.wrote(p);
        Ok(())
    }

    fn finish(mut self) -> Result<ExperimentReport> {
        if self.lipschitz_pairs > 0 {
            self.checks.push(Check::at_most(
                format!(
                    "Lipschitz test-function gaps stay below W2 on {} snapshot pairs",
                    self.lipschitz_pairs
                ),
                self.lipschitz_excess,
                LIPSCHITZ_SLACK,
            ));
        }
        let p = write_metrics(&self.path("metrics.csv"), &self.metrics)?;
        self.files.push(p);
        Ok(ExperimentReport {
            id: self.spec.id,
            metrics: self.metrics,
            checks: self.checks,
            files: self.files,
        })
    }
}

/// File-name-safe form of a kernel name.
fn tag(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Reporting times with their grid indices, and the coarsest recording
/// stride that still contains all of them.
fn reporting(spec: &ExperimentSpec) -> Result<(usize, Vec<(f64, usize)>)> {
    let steps = spec.sim.steps();
    if spec.times.is_empty() {
        return Err(Error::config("no reporting times given"));
    }
    let mut stride = steps;
    let mut out = Vec::with_capacity(spec.times.len());
    for &t in &spec.times {
        if !(t >= 0.0 && t <= spec.sim.horizon * (1.0 + 1e-12)) {
            return Err(Error::config(format!(
                "reporting time {t} outside [0, {}]",
                spec.sim.horizon
            )));
        }
        let s = ((t / spec.sim.dt).round() as usize).min(steps);
        stride = gcd(stride, s);
        out.push((t, s));
    }
    Ok((stride.max(1), out))
}

/// Independent replicas; replica `r` uses `replica_seed(seed, offset + r)`.
fn ensembles(
    w: &Kernel,
    coeffs: &CoefficientSet,
    init: &InitialDatum,
    cfg: &SimConfig,
    replicas: usize,
    offset: usize,
    stride: usize,
) -> Result<Vec<TrajectoryEnsemble>> {
    par::map_indices(replicas, |r| {
        let c = cfg
            .clone()
            .with_seed(replica_seed(cfg.seed, (offset + r) as u64));
        simulate_finite_recording(w, coeffs, init, &c, stride)
    })
    .into_iter()
    .collect()
}

fn discretize_all(grid: &SpatialGrid, laws: &[Distribution]) -> Result<Vec<Vec<f64>>> {
    laws.iter().map(|d| grid.discretize(d)).collect()
}

fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

fn meanfield(r: &mut Run, base: &Path) -> Result<()> {
    let spec = r.spec;
    if spec.kernels.len() < 2 {
        return Err(Error::config(
            "mean-field comparison needs at least two kernels",
        ));
    }
    let kernels: Vec<(String, Kernel)> = spec
        .kernels
        .iter()
        .map(|n| resolve_kernel(n, base).map(|k| (tag(n), k)))
        .collect::<Result<_>>()?;
    let (stride, times) = reporting(spec)?;
    let runs: Vec<Vec<TrajectoryEnsemble>> = kernels
        .iter()
        .map(|(_, k)| {
            ensembles(
                k,
                &r.coeffs,
                &spec.init,
                &spec.sim,
                spec.replicas,
                0,
                stride,
            )
        })
        .collect::<Result<_>>()?;
    for ((name, _), e) in kernels.iter().zip(&runs) {
        r.summaries(name, &e[0])?;
    }
    let last = times.len() - 1;
    for (ti, &(t, s)) in times.iter().enumerate() {
        let pooled: Vec<MeasureSnapshot> = runs
            .iter()
            .map(|e| pooled_replicas(e, s))
            .collect::<Result<_>>()?;
        for i in 0..kernels.len() {
            for j in i + 1..kernels.len() {
                let w = r.w2(&pooled[i], &pooled[j])?;
                let (a, b) = (&kernels[i].0, &kernels[j].0);
                r.metric(t, format!("w2:{a}~{b}"), w, 0.0);
                if ti == last {
                    r.check(Check::at_most(
                        format!("pooled W2({a}, {b}) at t={t}"),
                        w,
                        spec.tolerance,
                    ));
                }
            }
        }
    }

    // Deterministic counterpart: the single-population equation against
    // every step kernel in the list, when the initial law is shared.
    let p = kernels.iter().find_map(|(_, k)| match k {
        Kernel::Constant(p) => Some(*p),
        _ => None,
    });
    if let (Some(p), [law]) = (p, spec.init.distributions.as_slice()) {
        let grid = spec.grid.grid()?;
        let rho0 = grid.discretize(law)?;
        let mv = solve_mckean_vlasov(
            p,
            &r.coeffs,
            &rho0,
            &grid,
            spec.sim.horizon,
            spec.grid.dt_pde,
        )?;
        r.densities("meanfield", &mv)?;
        for (name, k) in &kernels {
            let Kernel::Step(s) = k else { continue };
            let fp = solve_fp_system(
                s,
                &r.coeffs,
                &vec![rho0.clone(); s.k()],
                &grid,
                spec.sim.horizon,
                spec.grid.dt_pde,
            )?;
            let mut worst: f64 = 0.0;
            for (fa, fb) in mv.frames.iter().zip(&fp.frames) {
                for rho in &fb.blocks {
                    worst = worst.max(grid.l1(&fa.blocks[0], rho));
                }
            }
            r.metric(
                spec.sim.horizon,
                format!("pde_l1:meanfield~{name}"),
                worst,
                0.0,
            );
            if let Some(tol) = spec.pde_tolerance {
                r.check(Check::at_most(
                    format!("density L1(meanfield, {name}) over [0, T]"),
                    worst,
                    tol,
                ));
            }
            r.densities(name, &fp)?;
        }
    }
    Ok(())
}

fn lower_in_errors(b: &DtBounds) -> f64 {
    if b.lower_stderr > 0.0 {
        b.lower / b.lower_stderr
    } else if b.lower > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn record_bounds(r: &mut Run, label: &str, b: &DtBounds) {
    let t = r.spec.sim.horizon;
    let upper = b.upper.unwrap_or(f64::NAN);
    let upper_se = b.upper_stderr.unwrap_or(0.0);
    r.metric(t, format!("d_t_lower:{label}"), b.lower, b.lower_stderr);
    r.metric(t, format!("d_t_upper:{label}"), upper, upper_se);
    let slack = r.spec.sigmas * combined(b.lower_stderr, upper_se);
    r.check(Check::at_most(
        format!("d_T lower <= upper within errors for {label}"),
        b.lower - upper,
        slack,
    ));
}

/// Splits every block of `w` at `ratio`. Returns the refined kernel and the
/// coarse block of each fine block.
fn split_all(w: &StepKernel, ratio: f64) -> Result<(StepKernel, Vec<usize>)> {
    let mut fine = w.clone();
    let mut parent: Vec<usize> = (0..w.k()).collect();
    for i in (0..w.k()).rev() {
        let (f, p) = fine.split_block(i, ratio)?;
        parent = p.iter().map(|&q| parent[q]).collect();
        fine = f;
    }
    Ok((fine, parent))
}

/// A seeded step kernel with uneven blocks, plus a block to split and a ratio.
fn random_refinement(seed: u64, index: usize) -> Result<(StepKernel, usize, f64)> {
    let s = Stream::new(seed, Domain::Scenario, index as u64);
    let mut c = 0u64;
    let mut u = || {
        c += 1;
        s.uniform(c)
    };
    let k = 2 + (u() * 3.0) as usize;
    let widths: Vec<f64> = (0..k).map(|_| 0.2 + u()).collect();
    let total: f64 = widths.iter().sum();
    let mut breaks = vec![0.0];
    let mut acc = 0.0;
    for w in &widths[..k - 1] {
        acc += w / total;
        breaks.push(acc);
    }
    breaks.push(1.0);
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = u();
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    let block = ((u() * k as f64) as usize).min(k - 1);
    let ratio = 0.2 + 0.6 * u();
    Ok((StepKernel::new(breaks, values)?, block, ratio))
}

fn condition_h(r: &mut Run, base: &Path) -> Result<()> {
    let spec = r.spec;
    let name = tag(&spec.kernels[0]);
    let w = resolve_kernel(&spec.kernels[0], base)?;
    let h = check_condition_h(&w, &spec.init.partition, H_SAMPLES, default_tolerance(&w))?;
    r.metric(0.0, format!("h_deviation:{name}"), h.max_deviation, 0.0);
    r.check(Check::holds(
        format!("condition (H) holds for {name}"),
        h.holds,
    ));
    if spec.label_pairs.is_empty() {
        return Err(Error::config("no label pairs given"));
    }
    // One set of background populations serves every pair.
    let mut labels = Vec::with_capacity(2 * spec.label_pairs.len());
    for &[x, y] in &spec.label_pairs {
        if spec.init.class_of(x) != spec.init.class_of(y) {
            return Err(Error::config(format!(
                "labels {x} and {y} lie in different initial-law classes"
            )));
        }
        labels.extend([x, y]);
    }
    let tags = coupled_tags(&w, &r.coeffs, &spec.init, &labels, spec.replicas, &spec.sim)?;
    let mut worst: f64 = 0.0;
    for (p, &[x, y]) in spec.label_pairs.iter().enumerate() {
        let est = CoupledPairEstimate::from_tags(&tags, 2 * p, 2 * p + 1);
        let b = d_t_bounds_coupled(&est)?;
        let step = b.argmax_step;
        let a = MeasureSnapshot::empirical(est.tags.marginal(0, step))?;
        let c = MeasureSnapshot::empirical(est.tags.marginal(1, step))?;
        r.w2(&a, &c)?;
        record_bounds(r, &format!("{name}:{x}~{y}"), &b);
        worst = worst.max(b.lower);
    }
    r.check(Check::at_most(
        format!("max same-class d_T lower bound on {name}"),
        worst,
        spec.tolerance,
    ));

    if let (Some(control), Some([x, y])) = (&spec.control, spec.control_pair) {
        let cname = tag(control);
        let wc = resolve_kernel(control, base)?;
        let init = spec.alternate_init.as_ref().unwrap_or(&spec.init);
        let hc = check_condition_h(&wc, &init.partition, H_SAMPLES, default_tolerance(&wc))?;
        r.metric(0.0, format!("h_deviation:{cname}"), hc.max_deviation, 0.0);
        r.check(Check::holds(
            format!("condition (H) fails for control {cname}"),
            !hc.holds,
        ));
        let est = coupled_pair(&wc, x, y, &r.coeffs, init, spec.replicas, &spec.sim)?;
        let b = d_t_bounds_coupled(&est)?;
        record_bounds(r, &format!("{cname}:{x}~{y}"), &b);
        r.check(Check::at_least(
            format!("control d_T lower bound on {cname} in standard errors"),
            lower_in_errors(&b),
            spec.sigmas,
        ));
    }

    if let Some(kname) = spec.kernels.get(1) {
        let name = tag(kname);
        let s = resolve_step_kernel(kname, base)?;
        let ratio = spec.split_ratio.unwrap_or(0.5);
        let (fine, parent) = split_all(&s, ratio)?;
        let grid = spec.grid.grid()?;
        let laws = spec.init.block_distributions(&s).unwrap_or_else(|_| {
            let d = RefinementScenario::default().laws;
            (0..s.k()).map(|b| d[b % d.len()].clone()).collect()
        });
        let coarse_init = discretize_all(&grid, &laws)?;
        let fine_init: Vec<Vec<f64>> = parent.iter().map(|&p| coarse_init[p].clone()).collect();
        let (t, dt) = (spec.sim.horizon, spec.grid.dt_pde);
        let coarse = solve_fp_system(&s, &r.coeffs, &coarse_init, &grid, t, dt)?;
        let refined = solve_fp_system(&fine, &r.coeffs, &fine_init, &grid, t, dt)?;
        let mut identical = true;
        let mut gap: f64 = 0.0;
        for (fc, ff) in coarse.frames.iter().zip(&refined.frames) {
            for (f, &p) in parent.iter().enumerate() {
                let first = parent
                    .iter()
                    .position(|&q| q == p)
                    .expect("parent has a child");
                identical &= ff.blocks[f] == ff.blocks[first];
                for (a, b) in fc.blocks[p].iter().zip(&ff.blocks[f]) {
                    gap = gap.max((a - b).abs());
                }
            }
        }
        let steps = validate_time_grid(t, dt)?;
        r.metric(
            t,
            format!("split_bitwise:{name}"),
            if identical { 1.0 } else { 0.0 },
            0.0,
        );
        r.metric(t, format!("split_gap:{name}"), gap, 0.0);
        r.check(Check::holds(
            format!("split sub-blocks of {name} bitwise identical over {steps} steps"),
            identical,
        ));
        r.check(Check::at_most(
            format!("split sub-blocks of {name} follow the parent block"),
            gap,
            spec.pde_tolerance.unwrap_or(REFINEMENT_TOL),
        ));
        r.densities(&format!("split_{name}"), &refined)?;
    }

    let outcomes: Vec<Result<bool>> = par::map_indices(RANDOM_REFINEMENTS, |i| {
        let (k, block, ratio) = random_refinement(spec.sim.seed, i)?;
        split_block_refinement_check(&k, block, ratio)
    });
    let passed = outcomes
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .iter()
        .filter(|&&b| b)
        .count();
    r.metric(0.0, "random_refinements_passed", passed as f64, 0.0);
    r.check(Check::at_least(
        "split refinement check on randomized step kernels",
        passed as f64,
        RANDOM_REFINEMENTS as f64,
    ));
    Ok(())
}

fn relabeling(r: &mut Run, base: &Path, mode: CutNormMode) -> Result<()> {
    let spec = r.spec;
    let w = resolve_step_kernel(&spec.kernels[0], base)?;
    let perm = if spec.permutation.is_empty() {
        (0..w.k()).rev().collect()
    } else {
        spec.permutation.clone()
    };
    let v = w.relabel(&perm)?;
    let init_v = spec.init.relabeled(&w, &perm)?;
    let cd = cut_distance_step(&w, &v, mode)?;
    r.metric(0.0, "cut_distance", cd.value, 0.0);
    r.check(Check::at_most(
        "cut distance between kernel and its relabeling",
        cd.value,
        0.0,
    ));
    let (stride, times) = reporting(spec)?;
    let a = ensembles(
        &Kernel::Step(w),
        &r.coeffs,
        &spec.init,
        &spec.sim,
        spec.replicas,
        0,
        stride,
    )?;
    let b = ensembles(
        &Kernel::Step(v),
        &r.coeffs,
        &init_v,
        &spec.sim,
        spec.replicas,
        0,
        stride,
    )?;
    r.summaries("original", &a[0])?;
    r.summaries("relabeled", &b[0])?;
    for (t, s) in times {
        let w2 = r.w2(&pooled_replicas(&a, s)?, &pooled_replicas(&b, s)?)?;
        r.metric(t, "w2_pooled:original~relabeled", w2, 0.0);
        r.check(Check::at_most(
            format!("pooled W2(original, relabeled) at t={t}"),
            w2,
            spec.tolerance,
        ));
    }
    Ok(())
}

fn continuity(r: &mut Run, base: &Path, mode: CutNormMode) -> Result<()> {
    let spec = r.spec;
    let w = resolve_step_kernel(&spec.kernels[0], base)?;
    if spec.epsilons.is_empty() {
        return Err(Error::config("no kernel offsets given"));
    }
    let mut eps = spec.epsilons.clone();
    eps.sort_by(f64::total_cmp);
    let perturbed: Vec<StepKernel> = eps.iter().map(|&e| w.map_values(|x| x + e)).collect();
    let scenario = ContinuityScenario {
        coeffs: r.coeffs.clone(),
        init: spec.init.clone(),
        cfg: spec.sim.clone(),
        replicas: spec.replicas,
        mode,
    };
    let rep = continuity_diagnostic(&w, &perturbed, &scenario)?;
    let t = spec.sim.horizon;
    for (e, row) in eps.iter().zip(&rep.rows) {
        r.metric(t, format!("cut_norm:eps={e}"), row.cut_norm, 0.0);
        r.metric(t, format!("d_t_lower:eps={e}"), row.d_t_lower, row.stderr);
        r.check(Check::at_most(
            format!("cut norm of offset {e} equals {e}"),
            (row.cut_norm - e.abs()).abs(),
            1e-12,
        ));
        if *e == 0.0 {
            r.check(Check::at_most(
                "D_T estimate for the unperturbed kernel",
                row.d_t_lower,
                spec.tolerance,
            ));
        }
    }
    for i in 1..rep.rows.len() {
        let (a, b) = (&rep.rows[i - 1], &rep.rows[i]);
        r.check(Check::at_most(
            format!(
                "D_T estimate nondecreasing from offset {} to {}",
                eps[i - 1],
                eps[i]
            ),
            a.d_t_lower - b.d_t_lower,
            spec.sigmas * combined(a.stderr, b.stderr),
        ));
    }
    r.metric(t, "c_hat", rep.c_hat, 0.0);

    let doubled = ContinuityScenario {
        cfg: scenario.cfg.clone().with_particles(2 * spec.sim.particles),
        ..scenario
    };
    let rep2 = continuity_diagnostic(&w, &perturbed, &doubled)?;
    r.metric(t, "c_hat_doubled_n", rep2.c_hat, 0.0);
    if rep.c_hat > 0.0 && rep2.c_hat > 0.0 {
        let ratio = rep2.c_hat / rep.c_hat;
        r.metric(t, "c_hat_ratio", ratio, 0.0);
        r.check(Check::at_most(
            "C_hat change under doubling N (factor)",
            ratio.max(1.0 / ratio),
            2.0,
        ));
    }
    Ok(())
}

fn mixing(r: &mut Run, base: &Path) -> Result<()> {
    let spec = r.spec;
    let w = resolve_kernel(&spec.kernels[0], base)?;
    let pooled_init = match &spec.alternate_init {
        Some(d) => d.clone(),
        None => InitialDatum::iid(spec.init.pooled()?)?,
    };
    let (stride, times) = reporting(spec)?;
    let joint = ensembles(
        &w,
        &r.coeffs,
        &spec.init,
        &spec.sim,
        spec.replicas,
        0,
        stride,
    )?;
    let pooled = ensembles(
        &w,
        &r.coeffs,
        &pooled_init,
        &spec.sim,
        spec.replicas,
        0,
        stride,
    )?;
    r.summaries("joint", &joint[0])?;
    r.summaries("pooled", &pooled[0])?;
    let last = times.len() - 1;
    for (ti, &(t, s)) in times.iter().enumerate() {
        let a = pooled_replicas(&joint, s)?;
        let b = pooled_replicas(&pooled, s)?;
        let w2 = r.w2(&a, &b)?;
        let per: Vec<f64> = joint
            .iter()
            .zip(&pooled)
            .map(|(x, y)| {
                wasserstein2(
                    &crate::metrics::pooled_at(x, s),
                    &crate::metrics::pooled_at(y, s),
                )
            })
            .collect::<Result<_>>()?;
        let (_, w2_se) = mean_and_stderr(&per);
        r.metric(t, "w2_pooled:joint~pooled", w2, w2_se);
        let gaps: Vec<f64> = joint
            .iter()
            .zip(&pooled)
            .map(|(x, y)| {
                crate::metrics::pooled_at(x, s).variance()
                    - crate::metrics::pooled_at(y, s).variance()
            })
            .collect();
        let (gap, gap_se) = mean_and_stderr(&gaps);
        r.metric(t, "variance_gap:joint-pooled", gap, gap_se);
        if ti == last {
            let z = if gap_se > 0.0 {
                gap.abs() / gap_se
            } else if gap != 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            r.check(Check::at_least(
                format!("joint and pooled starts give different pooled laws at t={t} (variance gap in standard errors)"),
                z,
                spec.sigmas,
            ));
        }
    }
    Ok(())
}

fn reduction(r: &mut Run, base: &Path) -> Result<()> {
    let spec = r.spec;
    let w = resolve_step_kernel(&spec.kernels[0], base)?;
    let m = spec
        .particles_per_block
        .ok_or_else(|| Error::config("particles_per_block is required for the reduced system"))?;
    let (stride, times) = reporting(spec)?;
    let sim = &spec.sim;
    let full = ensembles(
        &Kernel::Step(w.clone()),
        &r.coeffs,
        &spec.init,
        sim,
        spec.replicas,
        0,
        stride,
    )?;
    let reduced: Vec<TrajectoryEnsemble> = par::map_indices(spec.replicas, |i| {
        let seed = replica_seed(sim.seed, (spec.replicas + i) as u64);
        simulate_reduced_recording(
            &w,
            &r.coeffs,
            &spec.init,
            m,
            sim.horizon,
            sim.dt,
            seed,
            stride,
        )
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let grid = spec.grid.grid()?;
    let rho0 = discretize_all(&grid, &spec.init.block_distributions(&w)?)?;
    let series = solve_fp_system(&w, &r.coeffs, &rho0, &grid, sim.horizon, spec.grid.dt_pde)?;
    r.summaries("full", &full[0])?;
    r.summaries("reduced", &reduced[0])?;
    r.densities("pde", &series)?;
    for (t, s) in times {
        let frame = series.at_time(t);
        for b in 0..w.k() {
            let f = group_replicas(&full, s, b)?;
            let red = group_replicas(&reduced, s, b)?;
            let p = MeasureSnapshot::gridded(grid, frame.blocks[b].clone())?;
            for (label, x, y) in [
                ("full~reduced", &f, &red),
                ("full~pde", &f, &p),
                ("reduced~pde", &red, &p),
            ] {
                let d = r.w2(x, y)?;
                r.metric(t, format!("w2:block{b}:{label}"), d, 0.0);
                r.check(Check::at_most(
                    format!("block {b} W2({label}) at t={t}"),
                    d,
                    spec.tolerance,
                ));
            }
        }
    }
    Ok(())
}
