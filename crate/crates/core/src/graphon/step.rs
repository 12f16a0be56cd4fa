use crate::error::{Error, Result};
use crate::graphon::partition::{
    equipartition, locate, validate_breakpoints, IntervalSet, LabelPartition,
};

const SYMMETRY_TOL: f64 = 1e-12;

/// A kernel constant on every product `S_i × S_j` of a block partition.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepKernel {
    /// `values` is a `k × k` symmetric matrix; entries differing from their
    /// transpose by at most 1e-12 are symmetrized from the upper triangle.
    pub fn new(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        validate_breakpoints(&breakpoints)?;
        let k = breakpoints.len() - 1;
        if values.len() != k || values.iter().any(|row| row.len() != k) {
            return Err(Error::shape(format!("expected a {k}x{k} value matrix")));
        }
        let mut flat: Vec<f64> = values.into_iter().flatten().collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("step kernel values must be finite"));
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let (u, l) = (flat[i * k + j], flat[j * k + i]);
                if (u - l).abs() > SYMMETRY_TOL {
                    return Err(Error::domain(format!(
                        "value matrix not symmetric at ({i},{j}): {u} vs {l}"
                    )));
                }
                flat[j * k + i] = u;
            }
        }
        Ok(StepKernel {
            breakpoints,
            values: flat,
        })
    }

    /// Equipartition into `values.len()` blocks.
    pub fn uniform(values: Vec<Vec<f64>>) -> Result<Self> {
        let k = values.len();
        if k == 0 {
            return Err(Error::shape("empty value matrix"));
        }
        Self::new(equipartition(k), values)
    }

    pub fn constant(p: f64) -> Self {
        StepKernel {
            breakpoints: vec![0.0, 1.0],
            values: vec![p],
        }
    }

    pub fn k(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn measures(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn measure(&self, i: usize) -> f64 {
        self.breakpoints[i + 1] - self.breakpoints[i]
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.k();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn values(&self) -> Vec<Vec<f64>> {
        (0..self.k()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn block_of(&self, x: f64) -> usize {
        locate(&self.breakpoints, x)
    }

    pub fn block(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.value(self.block_of(x), self.block_of(y))
    }

    pub fn bound(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_graphon(&self) -> bool {
        self.values.iter().all(|v| (0.0..=1.0).contains(v))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_equipartition(&self) -> bool {
        let k = self.k() as f64;
        self.measures().iter().all(|m| (m - 1.0 / k).abs() <= 1e-12)
    }

    pub fn partition(&self) -> LabelPartition {
        LabelPartition::from_breakpoints(self.breakpoints.clone())
            .expect("breakpoints already validated")
    }

    /// Exact `d_A(x) = Σ_j w_ij |A ∩ S_j|` for `x` in block `i`.
    pub fn block_degree_wrt(&self, i: usize, set: &IntervalSet) -> f64 {
        (0..self.k())
            .map(|j| {
                let (lo, hi) = self.block(j);
                self.value(i, j) * set.overlap(lo, hi)
            })
            .sum()
    }

    /// Block masses `a_ij = w_ij m_i m_j`, row-major.
    pub fn weighted_masses(&self) -> Vec<f64> {
        let k = self.k();
        let m = self.measures();
        let mut a = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                a[i * k + j] = self.value(i, j) * m[i] * m[j];
            }
        }
        a
    }

    /// `∫∫ W`.
    pub fn integral(&self) -> f64 {
        self.weighted_masses().iter().sum()
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> StepKernel {
        StepKernel {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> StepKernel {
        self.map_values(|v| c * v)
    }

    /// `self − other` on a common partition.
    pub fn difference(&self, other: &StepKernel) -> Result<StepKernel> {
        if self.breakpoints != other.breakpoints {
            return Err(Error::shape("kernels have different block partitions"));
        }
        Ok(StepKernel {
            breakpoints: self.breakpoints.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Block averages over a new partition; exact for any pair of partitions.
    pub fn averaged_onto(&self, breakpoints: Vec<f64>) -> Result<StepKernel> {
        validate_breakpoints(&breakpoints)?;
        let kn = breakpoints.len() - 1;
        let k = self.k();
        // overlap[a][i] = |S'_a ∩ S_i|
        let overlap: Vec<Vec<f64>> = (0..kn)
            .map(|a| {
                let (lo, hi) = (breakpoints[a], breakpoints[a + 1]);
                (0..k)
                    .map(|i| {
                        let (s, e) = self.block(i);
                        (e.min(hi) - s.max(lo)).max(0.0)
                    })
                    .collect()
            })
            .collect();
        let mut values = vec![vec![0.0; kn]; kn];
        for a in 0..kn {
            let ma = breakpoints[a + 1] - breakpoints[a];
            for b in a..kn {
                let mb = breakpoints[b + 1] - breakpoints[b];
                let mut acc = 0.0;
                for i in 0..k {
                    if overlap[a][i] == 0.0 {
                        continue;
                    }
                    for j in 0..k {
                        acc += self.value(i, j) * overlap[a][i] * overlap[b][j];
                    }
                }
                let v = acc / (ma * mb);
                values[a][b] = v;
                values[b][a] = v;
            }
        }
        StepKernel::new(breakpoints, values)
    }

    /// Splits block `i` at fraction `ratio` of its length; the two halves
    /// inherit block `i`'s row and column.
    pub fn split_block(&self, i: usize, ratio: f64) -> Result<(StepKernel, Vec<usize>)> {
        let k = self.k();
        if i >= k {
            return Err(Error::domain(format!("block {i} out of range for k = {k}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::domain(format!("split ratio {ratio} not in (0, 1)")));
        }
        let (lo, hi) = self.block(i);
        let cut = lo + ratio * (hi - lo);
        if !(cut > lo && cut < hi) {
            return Err(Error::domain("split point collapses onto a block boundary"));
        }
        let mut breaks = self.breakpoints.clone();
        breaks.insert(i + 1, cut);
        let parent: Vec<usize> = (0..=k).map(|a| if a <= i { a } else { a - 1 }).collect();
        let values = (0..=k)
            .map(|a| (0..=k).map(|b| self.value(parent[a], parent[b])).collect())
            .collect();
        Ok((StepKernel::new(breaks, values)?, parent))
    }

    /// `v_ij = w_{perm(i), perm(j)}`; `perm` must map blocks to blocks of equal measure.
    pub fn relabel(&self, perm: &[usize]) -> Result<StepKernel> {
        let k = self.k();
        validate_permutation(perm, k)?;
        for (i, &p) in perm.iter().enumerate() {
            if (self.measure(i) - self.measure(p)).abs() > 1e-12 {
                return Err(Error::shape(format!(
                    "block {i} (measure {}) cannot take the place of block {p} (measure {})",
                    self.measure(i),
                    self.measure(p)
                )));
            }
        }
        let values = (0..k)
            .map(|i| (0..k).map(|j| self.value(perm[i], perm[j])).collect())
            .collect();
        StepKernel::new(self.breakpoints.clone(), values)
    }
}

pub(crate) fn validate_permutation(perm: &[usize], k: usize) -> Result<()> {
    if perm.len() != k {
        return Err(Error::shape(format!(
            "permutation of length {} for {k} blocks",
            perm.len()
        )));
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::shape(format!(
                "{perm:?} is not a permutation of 0..{k}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disconnected() -> StepKernel {
        StepKernel::new(
            vec![0.0, 1.0 / 3.0, 1.0],
            vec![vec![1.0, 0.0], vec![0.0, 0.5]],
        )
        .unwrap()
    }

    #[test]
    fn eval_picks_the_containing_block() {
        let w = disconnected();
        assert_eq!(w.eval(0.1, 0.2), 1.0);
        assert_eq!(w.eval(0.5, 0.9), 0.5);
        assert_eq!(w.eval(0.1, 0.9), 0.0);
        assert_eq!(w.eval(1.0, 1.0), 0.5);
    }

    #[test]
    fn rejects_asymmetric_and_malformed() {
        assert!(StepKernel::uniform(vec![vec![1.0, 0.2], vec![0.3, 1.0]]).is_err());
        assert!(StepKernel::new(vec![0.0, 1.0], vec![vec![1.0, 0.0]]).is_err());
        assert!(StepKernel::new(vec![0.0, 0.7, 0.5, 1.0], vec![vec![0.0; 3]; 3]).is_err());
    }

    #[test]
    fn aligned_refinement_repeats_blocks() {
        let w = StepKernel::uniform(vec![vec![0.9, 0.1], vec![0.1, 0.4]]).unwrap();
        let r = w.averaged_onto(equipartition(4)).unwrap();
        let expected = [
            [0.9, 0.9, 0.1, 0.1],
            [0.9, 0.9, 0.1, 0.1],
            [0.1, 0.1, 0.4, 0.4],
            [0.1, 0.1, 0.4, 0.4],
        ];
        for (a, row) in expected.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                assert!((r.value(a, b) - v).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn split_copies_parent_rows() {
        let w = disconnected();
        let (s, parent) = w.split_block(1, 0.5).unwrap();
        assert_eq!(s.k(), 3);
        assert_eq!(parent, vec![0, 1, 1]);
        assert_eq!(s.row(1), s.row(2));
        assert!((s.measure(1) - 1.0 / 3.0).abs() < 1e-15);
        assert!(w.split_block(0, 1.0).is_err());
    }

    #[test]
    fn relabel_identity_and_involution() {
        let w = StepKernel::uniform(vec![vec![0.9, 0.1], vec![0.1, 0.4]]).unwrap();
        assert_eq!(w.relabel(&[0, 1]).unwrap(), w);
        let swapped = w.relabel(&[1, 0]).unwrap();
        assert_eq!(swapped.value(0, 0), 0.4);
        assert_eq!(swapped.relabel(&[1, 0]).unwrap(), w);
        assert!(matches!(
            disconnected().relabel(&[1, 0]),
            Err(Error::Shape(_))
        ));
        assert!(w.relabel(&[0, 0]).is_err());
    }
}
