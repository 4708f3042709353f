//! Closed-form decoherence functions and the single-excitation amplitude ODE.
//!
//! With one excitation shared by probe, mode and ancilla, the master equation
//! reduces to three linear amplitude equations. Their solution gives the
//! function `f̃(t)` that fixes the probe's amplitude-damping channel:
//! `ρ₁₀(t) = f̃(t) ρ₁₀(0)` and `ρ₁₁(t) = |f̃(t)|² ρ₁₁(0)`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lindblad::SystemParams;

const I: C64 = C64::new(0.0, 1.0);

/// Below this |root · t| the hyperbolic bracket is evaluated by its Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

/// Δ = ω − ω_m
pub fn detuning(p: &SystemParams) -> f64 {
    p.omega - p.omega_m
}

/// χ = Γ − 2iΔ
pub fn chi(p: &SystemParams) -> C64 {
    C64::new(p.gamma, -2.0 * detuning(p))
}

/// Ω = √(χ²/4 − 4λ²), principal branch.
pub fn big_omega(p: &SystemParams) -> C64 {
    let c = chi(p);
    (c * c / 4.0 - 4.0 * p.lambda * p.lambda).sqrt()
}

/// Z = √(Ω² − 4λ̃²), principal branch.
pub fn z_root(p: &SystemParams) -> C64 {
    let c = chi(p);
    (c * c / 4.0 - 4.0 * p.lambda * p.lambda - 4.0 * p.lambda_tilde * p.lambda_tilde).sqrt()
}

/// `e^{−χt/4} (cosh(rt/2) + χ/(2r) sinh(rt/2))`, even in `r`.
pub fn damped_bracket(root: C64, chi: C64, t: f64) -> C64 {
    let decay = -chi * t / 4.0;
    let u = root * t / 2.0;
    if (root * t).norm() < SERIES_THRESHOLD {
        let u2 = u * u;
        let cosh = 1.0 + u2 / 2.0 + u2 * u2 / 24.0;
        let sinhc = 1.0 + u2 / 6.0 + u2 * u2 / 120.0;
        return decay.exp() * (cosh + chi * t / 4.0 * sinhc);
    }
    let up = (decay + u).exp();
    let down = (decay - u).exp();
    let ratio = chi / (2.0 * root);
    0.5 * ((1.0 + ratio) * up + (1.0 - ratio) * down)
}

/// Decoherence function of a probe coupled to the damped mode alone.
pub fn f_basic(t: f64, p: &SystemParams) -> C64 {
    let c = chi(p);
    (-I * p.omega * t).exp() * damped_bracket(big_omega(p), c, t)
}

/// C_∞ = λ̃²/(λ² + λ̃²)
pub fn c_infinity(lambda: f64, lambda_tilde: f64) -> Result<f64> {
    let l2 = lambda * lambda;
    let lt2 = lambda_tilde * lambda_tilde;
    if l2 + lt2 == 0.0 {
        return Err(Error::InvalidArgument("c_infinity needs a non-zero coupling".into()));
    }
    Ok(lt2 / (l2 + lt2))
}

/// Decoherence function with a resonant ancilla (ω̃ = ω).
pub fn f_ct(t: f64, p: &SystemParams) -> Result<C64> {
    if p.lambda_tilde == 0.0 {
        return Err(Error::InvalidArgument("f_ct needs lambda_tilde != 0; use amplitude_evolution".into()));
    }
    let scale = p.omega.abs().max(p.gamma).max(1e-300);
    if (p.omega_tilde - p.omega).abs() > 1e-12 * scale {
        return Err(Error::InvalidArgument(format!(
            "f_ct requires omega_tilde == omega (got {} vs {})",
            p.omega_tilde, p.omega
        )));
    }
    let c_inf = c_infinity(p.lambda, p.lambda_tilde)?;
    let ratio = (p.lambda / p.lambda_tilde).powi(2);
    let bracket = 1.0 + ratio * damped_bracket(z_root(p), chi(p), t);
    Ok((-I * p.omega * t).exp() * c_inf * bracket)
}

/// Amplitudes of the single-excitation sector: probe, mode and ancilla.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeState {
    pub kappa: C64,
    pub a_amp: C64,
    pub kappa_tilde: C64,
}

impl AmplitudeState {
    pub fn norm_sqr(&self) -> f64 {
        self.kappa.norm_sqr() + self.a_amp.norm_sqr() + self.kappa_tilde.norm_sqr()
    }

    fn from_vector(v: &Vector3<C64>) -> Self {
        Self { kappa: v[0], a_amp: v[1], kappa_tilde: v[2] }
    }
}

/// Coefficient matrix `M` of `i d/dt (κ, a, κ̃) = M (κ, a, κ̃)`.
pub fn amplitude_matrix(p: &SystemParams) -> Matrix3<C64> {
    let z_bar = C64::new(p.omega_m, -0.5 * p.gamma);
    let r = |x: f64| C64::new(x, 0.0);
    Matrix3::new(
        r(p.omega),
        r(p.lambda),
        r(0.0),
        r(p.lambda),
        z_bar,
        r(p.lambda_tilde),
        r(0.0),
        r(p.lambda_tilde),
        r(p.omega_tilde),
    )
}

/// Eigendecomposition `M = V diag(μ) V⁻¹` of a 3×3 complex matrix.
#[derive(Clone, Debug)]
pub struct Eigen3 {
    pub values: [C64; 3],
    pub vectors: Matrix3<C64>,
}

impl Eigen3 {
    /// Fails when the eigenvector matrix is numerically singular (defective `M`).
    pub fn new(m: &Matrix3<C64>) -> Option<Self> {
        let values = cubic_eigenvalues(m);
        let mut vectors = Matrix3::zeros();
        for (k, &mu) in values.iter().enumerate() {
            let v = null_vector(m, mu)?;
            vectors.set_column(k, &v);
        }
        // columns have unit norm, so |det| measures their independence
        if vectors.determinant().norm() < 1e-6 {
            return None;
        }
        Some(Self { values, vectors })
    }

    /// `exp(−iMt) x0`
    pub fn propagate(&self, x0: &Vector3<C64>, t: f64) -> Option<Vector3<C64>> {
        let coeffs = self.vectors.lu().solve(x0)?;
        let mut out = Vector3::zeros();
        for k in 0..3 {
            out += self.vectors.column(k) * (coeffs[k] * (-I * self.values[k] * t).exp());
        }
        Some(out)
    }
}

fn cubic_eigenvalues(m: &Matrix3<C64>) -> [C64; 3] {
    // det(μ − M) = μ³ − c2 μ² + c1 μ − c0
    let c2 = m.trace();
    let c1 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let c0 = m.determinant();
    let poly = |x: C64| ((x - c2) * x + c1) * x - c0;
    let dpoly = |x: C64| (3.0 * x - 2.0 * c2) * x + c1;

    // Durand–Kerner iteration
    let scale = 1.0 + c2.norm().max(c1.norm().sqrt()).max(c0.norm().cbrt());
    let seed = C64::new(0.4, 0.9);
    let mut roots = [seed * scale, seed.powu(2) * scale, seed.powu(3) * scale];
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for k in 0..3 {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..3 {
                if j != k {
                    denom *= roots[k] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = C64::new(1e-300, 0.0);
            }
            let delta = poly(roots[k]) / denom;
            roots[k] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved <= 1e-15 * scale {
            break;
        }
    }
    // Newton polish
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = dpoly(*r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= poly(*r) / d;
        }
    }
    roots
}

fn null_vector(m: &Matrix3<C64>, mu: C64) -> Option<Vector3<C64>> {
    let shifted = m - Matrix3::from_diagonal_element(mu);
    let rows: Vec<Vector3<C64>> = (0..3).map(|i| shifted.row(i).transpose()).collect();
    let cross = |a: &Vector3<C64>, b: &Vector3<C64>| {
        Vector3::new(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
    };
    let best = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| cross(&rows[i], &rows[j]))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    let n = best.norm();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(best / C64::new(n, 0.0))
}

/// `exp(−iMt) x0` via the matrix exponential.
pub fn propagate_by_expm(m: &Matrix3<C64>, x0: &Vector3<C64>, t: f64) -> Vector3<C64> {
    (m * (-I * t)).exp() * x0
}

/// Solves the amplitude equations from `(κ₀, 0, 0)` for any ω̃.
///
/// Uses the eigendecomposition of `M`; at exceptional points where `M` is not
/// diagonalizable the matrix exponential is used instead.
pub fn amplitude_evolution(t: f64, p: &SystemParams, kappa0: C64) -> Result<AmplitudeState> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t = {t}")));
    }
    let m = amplitude_matrix(p);
    let x0 = Vector3::new(kappa0, C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let out = match Eigen3::new(&m).and_then(|e| e.propagate(&x0, t)) {
        Some(v) => v,
        None => propagate_by_expm(&m, &x0, t),
    };
    Ok(AmplitudeState::from_vector(&out))
}

/// `f̃(t) = κ(t)/κ₀` for arbitrary ω̃.
pub fn f_tilde(t: f64, p: &SystemParams) -> Result<C64> {
    Ok(amplitude_evolution(t, p, C64::new(1.0, 0.0))?.kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig1() -> SystemParams {
        SystemParams {
            omega: 0.05,
            omega_tilde: 0.05,
            omega_m: 0.0,
            lambda: 0.3,
            lambda_tilde: 0.6,
            gamma: 1.0,
            gamma_se: 0.0,
            n_bar: 0.0,
            n_max: 1,
        }
    }

    #[test]
    fn initial_values() {
        let p = fig1();
        assert!((f_basic(0.0, &p) - 1.0).norm() < 1e-15);
        assert!((f_ct(0.0, &p).unwrap() - 1.0).norm() < 1e-15);
        let s = amplitude_evolution(0.0, &p, C64::new(0.7, 0.1)).unwrap();
        assert!((s.kappa - C64::new(0.7, 0.1)).norm() < 1e-15);
        assert!(s.a_amp.norm() < 1e-15 && s.kappa_tilde.norm() < 1e-15);
    }

    #[test]
    fn decoupled_probe_only_rotates() {
        let mut p = fig1();
        p.lambda = 0.0;
        for &t in &[0.5, 3.0, 17.0] {
            let expected = (-I * p.omega * t).exp();
            assert!((f_basic(t, &p) - expected).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn c_infinity_values() {
        assert_eq!(c_infinity(0.3, 0.0).unwrap(), 0.0);
        assert_relative_eq!(c_infinity(0.3, 0.6).unwrap(), 0.8, max_relative = 1e-15);
        assert_relative_eq!(c_infinity(0.1, -0.29).unwrap(), 0.0841 / 0.0941, max_relative = 1e-14);
        assert!(c_infinity(0.0, 0.0).is_err());
    }

    #[test]
    fn f_ct_requires_resonance_and_ancilla() {
        let mut p = fig1();
        p.lambda_tilde = 0.0;
        assert!(f_ct(1.0, &p).is_err());
        let mut q = fig1();
        q.omega_tilde = 0.2;
        assert!(f_ct(1.0, &q).is_err());
    }

    #[test]
    fn trapped_coherence_at_long_times() {
        let p = fig1();
        assert!((f_ct(30.0, &p).unwrap().norm() - 0.8).abs() < 2e-4);
    }

    #[test]
    fn residual_stays_inside_envelope() {
        // underdamped (fig1 parameters) and overdamped (real Z) regimes
        let overdamped = SystemParams { lambda: 0.1, lambda_tilde: 0.2, omega: 0.0, omega_tilde: 0.0, ..fig1() };
        for p in [fig1(), overdamped] {
            let c_inf = c_infinity(p.lambda, p.lambda_tilde).unwrap();
            let c = chi(&p);
            let z = z_root(&p);
            let prefactor = c_inf * (p.lambda / p.lambda_tilde).powi(2) * (1.0 + c.norm() / (2.0 * z.norm()));
            for k in 1..=60 {
                let t = 0.5 * k as f64;
                let envelope = prefactor * ((0.5 * z.re.abs() - 0.25 * p.gamma) * t).exp();
                let residual = (f_ct(t, &p).unwrap().norm() - c_inf).abs();
                assert!(residual <= envelope * (1.0 + 1e-12), "t={t} {residual:e} > {envelope:e}");
            }
        }
    }

    #[test]
    fn branch_choice_is_irrelevant() {
        let p = fig1();
        for &t in &[0.1, 2.0, 11.0] {
            let c = chi(&p);
            let w = big_omega(&p);
            let z = z_root(&p);
            assert!((damped_bracket(w, c, t) - damped_bracket(-w, c, t)).norm() < 1e-13);
            assert!((damped_bracket(z, c, t) - damped_bracket(-z, c, t)).norm() < 1e-13);
        }
    }

    #[test]
    fn series_matches_hyperbolic_form_near_degeneracy() {
        // root small but above the threshold vs direct series
        let c = C64::new(1.0, -0.1);
        let t = 2.0;
        let small = C64::new(3e-5, 1e-5);
        let series = damped_bracket(small, c, t);
        let direct = (-c * t / 4.0).exp()
            * ((small * t / 2.0).cosh() + c / (2.0 * small) * (small * t / 2.0).sinh());
        assert!((series - direct).norm() < 1e-9);
        // exactly degenerate: Ω = 0 gives e^{-χt/4}(1 + χt/4)
        let exact = (-c * t / 4.0).exp() * (1.0 + c * t / 4.0);
        assert!((damped_bracket(C64::new(0.0, 0.0), c, t) - exact).norm() < 1e-15);
    }

    #[test]
    fn amplitude_solution_reproduces_both_closed_forms() {
        let p = fig1();
        let mut no_ancilla = p;
        no_ancilla.lambda_tilde = 0.0;
        for k in 0..=300 {
            let t = 0.1 * k as f64;
            let ct = f_ct(t, &p).unwrap();
            assert!((f_tilde(t, &p).unwrap() - ct).norm() < 1e-10, "t={t}");
            let basic = f_basic(t, &no_ancilla);
            assert!((f_tilde(t, &no_ancilla).unwrap() - basic).norm() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn eigen_route_agrees_with_expm() {
        let mut p = fig1();
        p.omega_tilde = 0.37;
        p.omega_m = -0.1;
        let m = amplitude_matrix(&p);
        let e = Eigen3::new(&m).unwrap();
        let x0 = Vector3::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &t in &[0.3, 4.0, 25.0] {
            let a = e.propagate(&x0, t).unwrap();
            let b = propagate_by_expm(&m, &x0, t);
            assert!((a - b).norm() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn exceptional_point_falls_back() {
        // Jordan block: two-level exceptional point of a damped pair (λ̃ = 0, Γ = 4λ)
        let p = SystemParams {
            omega: 0.0,
            omega_tilde: 0.0,
            omega_m: 0.0,
            lambda: 0.25,
            lambda_tilde: 0.0,
            gamma: 1.0,
            gamma_se: 0.0,
            n_bar: 0.0,
            n_max: 1,
        };
        assert!(big_omega(&p).norm() < 1e-15);
        for &t in &[1.0, 5.0] {
            let s = amplitude_evolution(t, &p, C64::new(1.0, 0.0)).unwrap();
            assert!((s.kappa - f_basic(t, &p)).norm() < 1e-8, "t={t}");
        }
    }
}
