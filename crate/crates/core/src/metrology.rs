//! Precision functionals for frequency estimation.
//!
//! Conventions: `n_probes` counts the qubits that carry the signal,
//! `total_time` is the total interrogation budget T and every returned error
//! is a mean-squared error Δ²ω in (rad/s)². Multiply by T to get the
//! T-independent figure of merit Δ²ω·T.

use crate::analytic::{c_infinity, f_basic};
use crate::error::{Error, Result};
use crate::lindblad::SystemParams;

/// Repetition budget of an estimation run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimationScenario {
    pub n_probes: u64,
    pub total_time: f64,
    pub interrogation_time: f64,
}

impl EstimationScenario {
    pub fn new(n_probes: u64, total_time: f64, interrogation_time: f64) -> Result<Self> {
        if n_probes == 0 {
            return Err(Error::InvalidArgument("n_probes must be positive".into()));
        }
        if !(interrogation_time > 0.0) || !(total_time >= interrogation_time) {
            return Err(Error::InvalidArgument(format!(
                "need total_time >= interrogation_time > 0 (got T={total_time}, t={interrogation_time})"
            )));
        }
        Ok(Self { n_probes, total_time, interrogation_time })
    }

    /// ν = T/t
    pub fn repetitions(&self) -> f64 {
        self.total_time / self.interrogation_time
    }

    /// True when ν < 10 and the many-repetitions assumption behind the bounds is shaky.
    pub fn few_repetitions(&self) -> bool {
        self.repetitions() < 10.0
    }
}

/// Entangled-probe bound as a function of interrogation time, with its minimizer.
#[derive(Clone, Debug)]
pub struct BoundCurve {
    pub times: Vec<f64>,
    /// Δ²ω·T on `times`.
    pub values: Vec<f64>,
    pub t_opt: f64,
    /// Δ²ω·T at `t_opt`.
    pub value_at_min: f64,
}

/// Right-hand side of the amplitude-damping QFI bound for `n_probes`
/// entangled qubits interrogated for `t`, given `|f(t)|`.
pub fn crb_bound(t: f64, n_probes: f64, total_time: f64, f_mod: f64) -> f64 {
    if f_mod == 0.0 {
        return f64::INFINITY;
    }
    let n = n_probes;
    (1.0 + 0.25 * n * (f_mod.powi(-2) - 1.0)) / (n * n * total_time * t)
}

/// Minimizes the entangled bound over `t ∈ t_window` with |f| of the basic
/// probe–mode model.
///
/// A log-spaced grid of 1024 points locates the best cell; golden-section
/// search then refines inside the two neighbouring cells.
pub fn minimize_bound(p: &SystemParams, n_probes: f64, total_time: f64, t_window: (f64, f64)) -> Result<BoundCurve> {
    const GRID: usize = 1024;
    let (lo, hi) = t_window;
    if !(lo > 0.0) || !(hi > lo) || !(hi <= total_time) {
        return Err(Error::InvalidArgument(format!(
            "empty or invalid window ({lo}, {hi}] for T = {total_time}"
        )));
    }
    let objective = |t: f64| crb_bound(t, n_probes, 1.0, f_basic(t, p).norm());
    let ratio = (hi / lo).ln();
    let times: Vec<f64> = (0..GRID).map(|k| lo * (ratio * k as f64 / (GRID - 1) as f64).exp()).collect();
    let values: Vec<f64> = times.iter().map(|&t| objective(t)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let a = times[best.saturating_sub(1)];
    let b = times[(best + 1).min(GRID - 1)];
    let (t_opt, mut value) = golden_section(objective, a, b, 1e-13);
    let mut t_best = t_opt;
    if values[best] < value {
        t_best = times[best];
        value = values[best];
    }
    Ok(BoundCurve { times, values, t_opt: t_best, value_at_min: value })
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Large-N limit of the entangled bound, λ/(T N^{3/2}).
pub fn asymptotic_entangled_error(n_probes: f64, total_time: f64, lambda: f64) -> f64 {
    lambda / (total_time * n_probes.powf(1.5))
}

/// Ramsey excitation probability `(1 + Re f̃)/2`.
pub fn ramsey_signal(f_tilde: num_complex::Complex64) -> f64 {
    0.5 * (1.0 + f_tilde.re)
}

/// Error-propagation uncertainty of a Ramsey measurement; infinite where the slope vanishes.
pub fn ramsey_uncertainty(p: f64, dp_domega: f64, t_bar: f64, n_probes: f64, total_time: f64) -> f64 {
    if dp_domega == 0.0 {
        return f64::INFINITY;
    }
    p * (1.0 - p) * t_bar / (n_probes * total_time * dp_domega * dp_domega)
}

/// Minimum Ramsey error with trapped coherence `c_inf`: `C_∞⁻²/(N T t̄)`.
pub fn ct_min_error(n_probes: f64, total_time: f64, t_bar: f64, c_inf: f64) -> f64 {
    1.0 / (c_inf * c_inf * n_probes * total_time * t_bar)
}

/// Gain of the trapping strategy with N probes over the entangled strategy
/// with 2N qubits: `λ t̄ C_∞²/√(8N)`.
pub fn gain(n_probes: f64, t_bar: f64, lambda: f64, lambda_tilde: f64) -> Result<f64> {
    if lambda_tilde == 0.0 {
        return Err(Error::InvalidArgument("gain needs lambda_tilde != 0".into()));
    }
    let c = c_infinity(lambda, lambda_tilde)?;
    Ok(lambda * t_bar * c * c / (8.0 * n_probes).sqrt())
}

/// dP/dω on a uniform, strictly increasing ω grid.
///
/// Fourth-order five-point stencils at every point: central in the interior,
/// shifted one step from an edge and one-sided at the edges. Grids of three or
/// four points fall back to second-order stencils.
pub fn signal_derivative(grid: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let n = grid.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 grid points, got {n}")));
    }
    let h = grid[1].0 - grid[0].0;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("omega grid must be strictly increasing".into()));
    }
    for w in grid.windows(2) {
        let step = w[1].0 - w[0].0;
        if !(step > 0.0) || (step - h).abs() > 1e-9 * h.abs().max(w[1].0.abs()) {
            return Err(Error::InvalidArgument("omega grid must be uniform and strictly increasing".into()));
        }
    }
    let p: Vec<f64> = grid.iter().map(|g| g.1).collect();
    // forward stencils; the right edge mirrors them
    let edge = |q: [f64; 5]| (-25.0 * q[0] + 48.0 * q[1] - 36.0 * q[2] + 16.0 * q[3] - 3.0 * q[4]) / (12.0 * h);
    let near_edge = |q: [f64; 5]| (-3.0 * q[0] - 10.0 * q[1] + 18.0 * q[2] - 6.0 * q[3] + q[4]) / (12.0 * h);
    let fwd = |i: usize| [p[i], p[i + 1], p[i + 2], p[i + 3], p[i + 4]];
    let bwd = |i: usize| [p[i], p[i - 1], p[i - 2], p[i - 3], p[i - 4]];
    let d = |i: usize| -> f64 {
        if n < 5 {
            return if i == 0 {
                (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * h)
            } else {
                (p[i + 1] - p[i - 1]) / (2.0 * h)
            };
        }
        match i {
            0 => edge(fwd(0)),
            1 => near_edge(fwd(0)),
            _ if i == n - 1 => -edge(bwd(n - 1)),
            _ if i == n - 2 => -near_edge(bwd(n - 1)),
            _ => (p[i - 2] - 8.0 * p[i - 1] + 8.0 * p[i + 1] - p[i + 2]) / (12.0 * h),
        }
    };
    Ok((0..n).map(|i| (grid[i].0, d(i))).collect())
}

/// Grid points sitting on a zero of dP/dω, where the Ramsey uncertainty diverges.
///
/// A point is flagged when the slope vanishes there or changes sign towards a
/// neighbour whose slope is at least as large in magnitude.
pub fn slope_zeros(derivative: &[f64]) -> Vec<bool> {
    let n = derivative.len();
    (0..n)
        .map(|i| {
            let d = derivative[i];
            if d == 0.0 {
                return true;
            }
            let crosses = |j: usize| {
                let e = derivative[j];
                d * e <= 0.0 && d.abs() <= e.abs()
            };
            (i > 0 && crosses(i - 1)) || (i + 1 < n && crosses(i + 1))
        })
        .collect()
}
