use crate::error::{Error, Result};

use super::matrix::ComplexMatrix;

/// Position of the probe qubit in every composite space.
pub const PROBE: usize = 0;
/// Position of the ancilla qubit in the probe ⊗ ancilla ⊗ mode space.
pub const ANCILLA: usize = 1;

/// Ordered tensor-product structure of a Hilbert space.
///
/// Factors are always listed probe first, then ancilla (when present), with
/// the bosonic mode last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompositeSpace {
    factor_dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.iter().any(|&d| d == 0) {
            return Err(Error::Dimension(format!("invalid factor dimensions {factor_dims:?}")));
        }
        Ok(Self { factor_dims })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    /// Probe ⊗ mode, with the mode truncated at `n_max` quanta.
    pub fn probe_mode(n_max: usize) -> Self {
        Self { factor_dims: vec![2, n_max + 1] }
    }

    /// Probe ⊗ ancilla ⊗ mode, with the mode truncated at `n_max` quanta.
    pub fn probe_ancilla_mode(n_max: usize) -> Self {
        Self { factor_dims: vec![2, 2, n_max + 1] }
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn n_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn mode_factor(&self) -> usize {
        self.factor_dims.len() - 1
    }

    pub fn check_factor(&self, factor: usize) -> Result<()> {
        if factor >= self.factor_dims.len() {
            return Err(Error::InvalidArgument(format!(
                "subsystem {factor} out of range for {} factors",
                self.factor_dims.len()
            )));
        }
        Ok(())
    }

    /// Lifts an operator on one factor to the full space.
    pub fn embed(&self, op: &ComplexMatrix, factor: usize) -> Result<ComplexMatrix> {
        self.check_factor(factor)?;
        let d = self.factor_dims[factor];
        if op.rows() != d || op.cols() != d {
            return Err(Error::Dimension(format!(
                "operator {}x{} on a factor of dimension {d}",
                op.rows(),
                op.cols()
            )));
        }
        let left: usize = self.factor_dims[..factor].iter().product();
        let right: usize = self.factor_dims[factor + 1..].iter().product();
        let mut out = op.clone();
        if left > 1 {
            out = ComplexMatrix::identity(left).kron(&out);
        }
        if right > 1 {
            out = out.kron(&ComplexMatrix::identity(right));
        }
        Ok(out)
    }

    /// Splits a flat basis index into per-factor indices.
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factor_dims.len()];
        for (slot, &d) in digits.iter_mut().zip(&self.factor_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        digits
    }

    pub fn ravel(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.factor_dims).fold(0, |acc, (&k, &d)| acc * d + k)
    }
}
