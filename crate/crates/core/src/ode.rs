//! Direct numerical integration of the coupled amplitude equations. This path
//! shares nothing with the closed-form propagator beyond the per-block
//! frequencies, and serves as its oracle.

use num_complex::Complex64;
use ode_solvers::{DVector, Dop853, OutputType, System};

use crate::dynamics::{detuning, JointState, ModelParams};
use crate::error::{JcmError, Result};
use crate::spin::raising_coeff;

/// Relative and absolute local error tolerance of the integrator.
pub const ODE_TOLERANCE: f64 = 1e-11;

const MAX_STEPS: u32 = 2_000_000;

struct LadderEquations {
    detuning: Vec<f64>,
    coupling: Vec<f64>,
}

impl System<f64, DVector<f64>> for LadderEquations {
    // y = [Re a_n, Im a_n, Re b_n, Im b_n] for each n, then the clock.
    // The solver's twelfth-stage node is wrong, so time is carried as state.
    fn system(&self, _: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let clock = 4 * self.detuning.len();
        let t = y[clock];
        dy[clock] = 1.0;
        for (n, (&om, &g)) in self.detuning.iter().zip(&self.coupling).enumerate() {
            let k = 4 * n;
            let a = Complex64::new(y[k], y[k + 1]);
            let b = Complex64::new(y[k + 2], y[k + 3]);
            let phase = Complex64::from_polar(1.0, om * t);
            // i a' = g e^{i Om t} b  =>  a' = -i g e^{i Om t} b
            let da = Complex64::new(0.0, -g) * phase * b;
            let db = Complex64::new(0.0, -g) * phase.conj() * a;
            dy[k] = da.re;
            dy[k + 1] = da.im;
            dy[k + 2] = db.re;
            dy[k + 3] = db.im;
        }
    }
}

/// Integrates the interaction-picture equations from `state0.t` to `t` with an
/// adaptive 8th-order Dormand-Prince scheme.
pub fn evolve_ode_oracle(params: &ModelParams, state0: &JointState, t: f64) -> Result<JointState> {
    let dim = params.rep.dim();
    if state0.dim() != dim {
        return Err(JcmError::invalid(
            "state0",
            "dimension does not match the representation",
        ));
    }
    if !t.is_finite() || t < state0.t {
        return Err(JcmError::invalid(
            "t",
            "must be finite and not earlier than the state time",
        ));
    }
    if t == state0.t {
        return Ok(state0.clone());
    }

    let mut equations = LadderEquations {
        detuning: Vec::with_capacity(dim),
        coupling: Vec::with_capacity(dim),
    };
    for n in 0..dim {
        equations.detuning.push(detuning(params, n)?);
        equations.coupling.push(params.lambda * raising_coeff(params.rep, n)?);
    }

    let mut y0 = DVector::zeros(4 * dim + 1);
    y0[4 * dim] = state0.t;
    for n in 0..dim {
        y0[4 * n] = state0.a[n].re;
        y0[4 * n + 1] = state0.a[n].im;
        y0[4 * n + 2] = state0.b[n].re;
        y0[4 * n + 3] = state0.b[n].im;
    }

    let span = t - state0.t;
    let mut solver = Dop853::from_param(
        equations,
        state0.t,
        t,
        span,
        y0,
        ODE_TOLERANCE,
        ODE_TOLERANCE,
        0.9,
        0.0,
        0.333,
        6.0,
        span,
        0.0,
        MAX_STEPS,
        u32::MAX,
        OutputType::Sparse,
    );
    // sparse output: the dense interpolant of this solver is also unreliable
    let integrated = solver.integrate();
    let stats = match integrated {
        Ok(stats) => stats,
        Err(err) => {
            return Err(JcmError::Integrator {
                t: solver.x_out().last().copied().unwrap_or(state0.t),
                message: err.to_string(),
                accepted: 0,
                rejected: 0,
                evaluations: 0,
            })
        }
    };
    let (Some(&t_end), Some(y)) = (solver.x_out().last(), solver.y_out().last()) else {
        return Err(JcmError::Integrator {
            t: state0.t,
            message: "solver produced no output".into(),
            accepted: stats.accepted_steps,
            rejected: stats.rejected_steps,
            evaluations: stats.num_eval,
        });
    };
    if (t_end - t).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(JcmError::Integrator {
            t: t_end,
            message: format!("stopped short of t = {t}"),
            accepted: stats.accepted_steps,
            rejected: stats.rejected_steps,
            evaluations: stats.num_eval,
        });
    }

    let a = (0..dim).map(|n| Complex64::new(y[4 * n], y[4 * n + 1])).collect();
    let b = (0..dim).map(|n| Complex64::new(y[4 * n + 2], y[4 * n + 3])).collect();
    Ok(JointState { a, b, t })
}

/// Largest componentwise distance between two states' amplitudes.
pub fn max_amplitude_difference(lhs: &JointState, rhs: &JointState) -> f64 {
    lhs.a
        .iter()
        .chain(&lhs.b)
        .zip(rhs.a.iter().chain(&rhs.b))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
