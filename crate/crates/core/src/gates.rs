//! Unitary two-qubit gates from the trigonometric block, their action on the
//! product basis and entanglement of the outputs.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blocks::{build_trig_block, TrigBlockParams};
use crate::error::{GybeError, Result};
use crate::tensor::{re, residual_norm, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub theta_u: f64,
    pub epsilon_u: f64,
    pub alpha_phase: f64,
}

/// Coefficients on `(|++⟩, |+−⟩, |−+⟩, |−−⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    pub coeffs: [Complex64; 4],
    /// Set when the producing gate was not unitary within 1e-10.
    #[serde(default)]
    pub non_unitary_gate: bool,
}

impl TwoQubitState {
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `√2/√(cosh 2γu + cosh 2βu)`.
pub fn unitary_factor(gamma: f64, beta: f64, u: f64) -> f64 {
    (2.0 / ((2.0 * gamma * u).cosh() + (2.0 * beta * u).cosh())).sqrt()
}

/// Normalized block with signs `(1, −1, −1)` and `q = e^{iα}`, plus the
/// angles read off with `atan2`.
pub fn unitarize(gamma: f64, beta: f64, u: f64, alpha_phase: f64) -> (CMatrix, GateParams) {
    let q = Complex64::from_polar(1.0, alpha_phase);
    let n = unitary_factor(gamma, beta, u);
    let r = build_trig_block(&TrigBlockParams::new(gamma, beta, q, (1, -1, -1)), u).scale(re(n));
    let theta_u = (n * (beta * u).sinh()).atan2(n * (gamma * u).cosh());
    let epsilon_u = (n * (gamma * u).sinh()).atan2(n * (beta * u).cosh());
    (r, GateParams { theta_u, epsilon_u, alpha_phase })
}

/// The same gate written directly in the angles.
pub fn gate_from_params(p: &GateParams) -> CMatrix {
    let (ct, st) = (p.theta_u.cos(), p.theta_u.sin());
    let (ce, se) = (p.epsilon_u.cos(), p.epsilon_u.sin());
    let q = Complex64::from_polar(1.0, p.alpha_phase);
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = re(ct);
    m[(0, 3)] = q * st;
    m[(1, 1)] = re(ce);
    m[(1, 2)] = re(se);
    m[(2, 1)] = re(-se);
    m[(2, 2)] = re(ce);
    m[(3, 0)] = -q.conj() * st;
    m[(3, 3)] = re(ct);
    m
}

pub fn is_unitary(g: &CMatrix, tol: f64) -> bool {
    g.is_square()
        && g.matmul(&g.dagger()).ok().and_then(|p| residual_norm(&p, &CMatrix::identity(g.rows())).ok()).is_some_and(|r| r.max_abs <= tol)
}

/// Image of basis ket `index` read as row `index` of the gate, i.e. the
/// superposition listed against that ket in the usual gate tables.
pub fn apply_gate(gate: &CMatrix, index: usize) -> Result<TwoQubitState> {
    if gate.shape() != (4, 4) {
        return Err(GybeError::Dimension(format!("two-qubit gate must be 4x4, got {:?}", gate.shape())));
    }
    if index > 3 {
        return Err(GybeError::InvalidParams(format!("basis index {index} out of range 0..3")));
    }
    let row = gate.row(index);
    Ok(TwoQubitState { coeffs: [row[0], row[1], row[2], row[3]], non_unitary_gate: !is_unitary(gate, 1e-10) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Concurrence {
    pub value: f64,
    /// The input was not normalized and has been rescaled first.
    pub renormalized: bool,
}

/// `2|ad − bc|` after normalizing.
pub fn concurrence(s: &TwoQubitState) -> Result<Concurrence> {
    let n = s.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(GybeError::InvalidParams("zero or non-finite state".into()));
    }
    let renormalized = (n - 1.0).abs() > 1e-12;
    let [a, b, c, d] = s.coeffs.map(|z| z / n);
    Ok(Concurrence { value: 2.0 * (a * d - b * c).norm(), renormalized })
}

/// `εũ = πt/4`, `θũ = π(t−1)/4`.
pub fn time_schedule(t: f64) -> GateParams {
    GateParams { theta_u: FRAC_PI_4 * (t - 1.0), epsilon_u: FRAC_PI_4 * t, alpha_phase: 0.0 }
}

/// Concurrences of the images of `|++⟩` and `|+−⟩`.
pub fn paired_concurrences(gate: &CMatrix) -> Result<[f64; 2]> {
    Ok([concurrence(&apply_gate(gate, 0)?)?.value, concurrence(&apply_gate(gate, 1)?)?.value])
}
