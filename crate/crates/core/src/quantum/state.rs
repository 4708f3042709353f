use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

use super::matrix::ComplexMatrix;
use super::space::CompositeSpace;

/// Tolerances a density matrix has to meet.
#[derive(Clone, Copy, Debug)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl StateTolerance {
    pub const STRICT: Self = Self { hermiticity: 1e-10, trace: 1e-10, min_eigenvalue: -1e-8 };
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self::STRICT
    }
}

/// How far a matrix is from being a valid state.
#[derive(Clone, Copy, Debug)]
pub struct StateDiagnostics {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn of(matrix: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            hermiticity_error: matrix.hermiticity_error(),
            trace_error: (matrix.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue: matrix.hermitian_eigenvalues()?[0],
        })
    }

    pub fn check(&self, tol: &StateTolerance) -> Result<()> {
        if self.hermiticity_error > tol.hermiticity {
            return Err(Error::InvalidState(format!("not Hermitian (error {:e})", self.hermiticity_error)));
        }
        if self.trace_error > tol.trace {
            return Err(Error::InvalidState(format!("trace off by {:e}", self.trace_error)));
        }
        if self.min_eigenvalue < tol.min_eigenvalue {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", self.min_eigenvalue)));
        }
        Ok(())
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on a composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: CompositeSpace,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(space: CompositeSpace, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(space, matrix, &StateTolerance::STRICT)
    }

    pub fn with_tolerance(space: CompositeSpace, matrix: ComplexMatrix, tol: &StateTolerance) -> Result<Self> {
        check_shape(&space, &matrix)?;
        StateDiagnostics::of(&matrix)?.check(tol)?;
        Ok(Self { space, matrix })
    }

    /// Wraps a matrix whose validity the caller has already established.
    pub(crate) fn from_parts_unchecked(space: CompositeSpace, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(space.total_dim(), matrix.rows());
        Self { space, matrix }
    }

    /// |ψ⟩⟨ψ| for a normalized state vector.
    pub fn pure(space: CompositeSpace, psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|x| x.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state vector has norm² {norm}")));
        }
        let n = psi.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self::new(space, m)
    }

    /// Tensor product of states, in the given factor order.
    pub fn product(states: &[&DensityMatrix]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        let mut dims = first.space.factor_dims().to_vec();
        let mut m = first.matrix.clone();
        for s in &states[1..] {
            dims.extend_from_slice(s.space.factor_dims());
            m = m.kron(&s.matrix);
        }
        Ok(Self { space: CompositeSpace::new(dims)?, matrix: m })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(Error::Dimension(format!(
                "operator {}x{} on state of dimension {}",
                op.rows(),
                op.cols(),
                self.dim()
            )));
        }
        // Tr(Aρ) = Σ_ij A_ij ρ_ji
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += op.get(i, j) * self.matrix.get(j, i);
            }
        }
        Ok(acc)
    }

    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        StateDiagnostics::of(&self.matrix)
    }

    /// Conjugates the state by a unitary on the full space.
    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> Result<Self> {
        check_shape(&self.space, unitary)?;
        let m = unitary.matmul(&self.matrix).matmul(&unitary.adjoint());
        Ok(Self { space: self.space.clone(), matrix: m })
    }

    /// Reduced state on a single factor.
    pub fn partial_trace(&self, keep: usize) -> Result<Self> {
        partial_trace(self, keep)
    }
}

fn check_shape(space: &CompositeSpace, matrix: &ComplexMatrix) -> Result<()> {
    let d = space.total_dim();
    if matrix.rows() != d || matrix.cols() != d {
        return Err(Error::Dimension(format!(
            "{}x{} matrix on a space of dimension {d}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    Ok(())
}

/// Traces out every factor except `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    let space = rho.space();
    space.check_factor(keep)?;
    let dims = space.factor_dims();
    let dk = dims[keep];
    let left: usize = dims[..keep].iter().product();
    let right: usize = dims[keep + 1..].iter().product();
    let m = rho.matrix();
    let reduced = ComplexMatrix::from_fn(dk, dk, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for l in 0..left {
            for r in 0..right {
                let i = (l * dk + a) * right + r;
                let j = (l * dk + b) * right + r;
                acc += m.get(i, j);
            }
        }
        acc
    });
    Ok(DensityMatrix::from_parts_unchecked(CompositeSpace::single(dk)?, reduced))
}

/// Thermal Fock state with mean occupation `n_bar`, renormalized on `n_max + 1` levels.
pub fn thermal_state(n_bar: f64, n_max: usize) -> Result<DensityMatrix> {
    if !(n_bar >= 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidArgument(format!("n_bar = {n_bar}")));
    }
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let ratio = n_bar / (n_bar + 1.0);
    let weights: Vec<f64> = (0..=n_max).map(|n| ratio.powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    let diag: Vec<C64> = weights.iter().map(|w| C64::new(w / total, 0.0)).collect();
    Ok(DensityMatrix::from_parts_unchecked(
        CompositeSpace::single(n_max + 1)?,
        ComplexMatrix::diagonal(&diag),
    ))
}

/// Basis projector |k⟩⟨k| on a `dim`-level factor.
pub fn basis_state(dim: usize, k: usize) -> Result<DensityMatrix> {
    if k >= dim {
        return Err(Error::InvalidArgument(format!("level {k} out of range for dimension {dim}")));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    m.set(k, k, C64::new(1.0, 0.0));
    Ok(DensityMatrix::from_parts_unchecked(CompositeSpace::single(dim)?, m))
}

/// (|0⟩ + i|1⟩)/√2, the probe state after the first Ramsey pulse.
pub fn qubit_superposition_state() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(CompositeSpace::single(2).expect("dim 2"), &[C64::new(h, 0.0), C64::new(0.0, h)])
        .expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_temperature_is_vacuum() {
        let rho = thermal_state(0.0, 7).unwrap();
        assert_eq!(rho.element(0, 0), C64::new(1.0, 0.0));
        assert!((1..8).all(|n| rho.element(n, n).norm() == 0.0));
    }

    #[test]
    fn thermal_populations() {
        for &n_bar in &[0.0, 0.02, 0.05, 0.5] {
            let rho = thermal_state(n_bar, 7).unwrap();
            let p: Vec<f64> = (0..8).map(|n| rho.element(n, n).re).collect();
            assert!(p.iter().all(|&x| x >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let mean: f64 = p.iter().enumerate().map(|(n, x)| n as f64 * x).sum();
            assert!(mean <= n_bar + 1e-15);
        }
        // untruncated geometric series: p0 = 1/(1 + n_bar)
        let rho = thermal_state(0.05, 7).unwrap();
        assert!((rho.element(0, 0).re - 1.0 / 1.05).abs() < 1e-9);
    }

    #[test]
    fn thermal_truncation_tail() {
        // tail beyond n_max of the untruncated distribution: x^(n_max+1)
        let x: f64 = 0.02 / 1.02;
        assert!(x.powi(8) < 1e-10);
    }

    #[test]
    fn superposition_state() {
        let rho = qubit_superposition_state();
        assert!((rho.element(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.element(1, 1).re - 0.5).abs() < 1e-15);
        assert!((rho.element(1, 0) - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_and_reduce() {
        let a = qubit_superposition_state();
        let b = thermal_state(0.5, 3).unwrap();
        let ab = DensityMatrix::product(&[&a, &b]).unwrap();
        assert_eq!(ab.space().factor_dims(), &[2, 4]);
        assert!(ab.partial_trace(0).unwrap().matrix().approx_eq(a.matrix(), 1e-15));
        assert!(ab.partial_trace(1).unwrap().matrix().approx_eq(b.matrix(), 1e-15));
        assert!(ab.partial_trace(2).is_err());
    }

    #[test]
    fn bell_state_reduces_to_identity() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let bell = DensityMatrix::pure(
            CompositeSpace::new(vec![2, 2]).unwrap(),
            &[C64::new(h, 0.0), z, z, C64::new(h, 0.0)],
        )
        .unwrap();
        let reduced = bell.partial_trace(0).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(reduced.matrix().approx_eq(&half, 1e-15));
    }

    #[test]
    fn invalid_states_rejected() {
        let space = CompositeSpace::single(2).unwrap();
        let not_unit = ComplexMatrix::identity(2);
        assert!(DensityMatrix::new(space.clone(), not_unit).is_err());
        let negative = ComplexMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]).unwrap();
        assert!(DensityMatrix::new(space.clone(), negative).is_err());
        let wrong = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        assert!(DensityMatrix::new(space, wrong).is_err());
    }
}
