//! Small spectral-parameter blocks (1×1, 2×2, 4×4) that larger solutions
//! are assembled from. Every block is normalized so that `B(0) = I`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GybeError, Result};
use crate::tensor::{re, CMatrix, ONE, ZERO};

/// Tolerance used when a parameter relation (e.g. `|γ| = |β|`) must hold.
const PARAM_TOL: f64 = 1e-12;

fn x4(diag: [Complex64; 4], anti: [Complex64; 4]) -> CMatrix {
    let mut m = CMatrix::diag(&diag);
    for (r, &a) in anti.iter().enumerate() {
        m[(r, 3 - r)] = a;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigBlockParams {
    pub gamma: f64,
    pub beta: f64,
    pub q: Complex64,
    pub t: i8,
    pub t1: i8,
    pub t2: i8,
}

impl TrigBlockParams {
    pub fn new(gamma: f64, beta: f64, q: Complex64, (t, t1, t2): (i8, i8, i8)) -> Self {
        Self { gamma, beta, q, t, t1, t2 }
    }

    pub fn signs(&self) -> (i8, i8, i8) {
        (self.t, self.t1, self.t2)
    }

    /// Sign configurations admitted by the YBE: `(±1, ±1, 1)` and `(±1, ∓1, −1)`.
    pub fn signs_allowed(&self) -> bool {
        let (t, t1, t2) = self.signs();
        [t, t1, t2].iter().all(|s| s.abs() == 1)
            && ((t2 == 1 && t == t1) || (t2 == -1 && t == -t1))
    }

    /// Checks the YBE conditions. The `t₂ = 1` configurations are only
    /// solutions on the free-fermion line `|γ| = |β|`.
    pub fn check_ybe(&self) -> Result<()> {
        if !self.signs_allowed() {
            return Err(GybeError::InvalidParams(format!("sign configuration {:?} is not a YBE solution", self.signs())));
        }
        if self.t2 == 1 && (self.gamma.abs() - self.beta.abs()).abs() > PARAM_TOL * (1.0 + self.gamma.abs()) {
            return Err(GybeError::InvalidParams(format!(
                "signs {:?} need |gamma| = |beta| (got {}, {})",
                self.signs(),
                self.gamma,
                self.beta
            )));
        }
        if self.q.norm() == 0.0 {
            return Err(GybeError::SingularParameter("q = 0".into()));
        }
        Ok(())
    }

    pub fn is_ybe_valid(&self) -> bool {
        self.check_ybe().is_ok()
    }
}

pub fn build_trig_block(p: &TrigBlockParams, u: f64) -> CMatrix {
    let (cg, sg) = ((p.gamma * u).cosh(), (p.gamma * u).sinh());
    let (cb, sb) = ((p.beta * u).cosh(), (p.beta * u).sinh());
    x4(
        [re(cg), re(cb), re(cb), re(cg)],
        [p.q * sb, re(p.t as f64 * sg), re(p.t1 as f64 * sg), re(p.t2 as f64 * sb) / p.q],
    )
}

pub fn build_diag_block(thetas: &[f64; 4], u: f64) -> CMatrix {
    CMatrix::diag(&thetas.map(|th| re((th * u).exp())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XxzVariant {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XxzBlockParams {
    pub u0: f64,
    pub gamma: f64,
    pub variant: XxzVariant,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default)]
    pub overall_alpha: f64,
}

fn one() -> f64 {
    1.0
}

pub fn build_xxz_block(p: &XxzBlockParams, u: f64) -> Result<CMatrix> {
    let s0 = p.u0.sinh();
    if s0 == 0.0 || !s0.is_finite() {
        return Err(GybeError::SingularParameter(format!("sinh(u0) = {s0}")));
    }
    let x = p.a * u;
    let last = match p.variant {
        XxzVariant::Plus => (p.u0 + x).sinh(),
        XxzVariant::Minus => (p.u0 - x).sinh(),
    };
    let mut m = CMatrix::diag(&[re((x + p.u0).sinh() / s0), ONE, ONE, re(last / s0)]);
    m[(1, 2)] = re(p.gamma.exp() * x.sinh() / s0);
    m[(2, 1)] = re((-p.gamma).exp() * x.sinh() / s0);
    Ok(m.scale(re((p.overall_alpha * u).exp())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformedBlockParams {
    pub alpha0: f64,
    pub alphax: f64,
    pub q: Complex64,
    pub t: Complex64,
}

impl DeformedBlockParams {
    /// Partner block of the mixed-constant relation: rates swapped,
    /// deformations `(q′, q/(q′t))`.
    pub fn partner(&self, q_prime: Complex64) -> DeformedBlockParams {
        DeformedBlockParams { alpha0: self.alphax, alphax: self.alpha0, q: q_prime, t: self.q / (q_prime * self.t) }
    }
}

pub fn build_deformed_block(p: &DeformedBlockParams, u: f64) -> Result<CMatrix> {
    if p.q.norm() == 0.0 || p.t.norm() == 0.0 {
        return Err(GybeError::SingularParameter("q and t must be nonzero".into()));
    }
    let (c0, s0) = ((p.alpha0 * u).cosh(), (p.alpha0 * u).sinh());
    let (cx, sx) = ((p.alphax * u).cosh(), (p.alphax * u).sinh());
    Ok(x4([re(c0), re(cx), re(cx), re(c0)], [p.q * sx, p.t * s0, -re(s0) / p.t, -re(sx) / p.q]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddBlockParams {
    pub theta: Complex64,
    pub p: Complex64,
    #[serde(default)]
    pub alpha: f64,
}

/// Returns `(e^{αu}, [[cos θu, p sin θu], [−sin θu / p, cos θu]])`.
pub fn build_odd_blocks(p: &OddBlockParams, u: f64) -> Result<(CMatrix, CMatrix)> {
    if p.p.norm() == 0.0 {
        return Err(GybeError::SingularParameter("p = 0".into()));
    }
    let x = p.theta * u;
    let (co, si) = (x.cos(), x.sin());
    let v = CMatrix::new(2, 2, vec![co, p.p * si, -si / p.p, co])?;
    Ok((CMatrix::scalar(re((p.alpha * u).exp())), v))
}

/// Cos/sin two-rate block, the building block of the factorized (`p ≥ k`)
/// relation. Multiplied by `F̄(u) = e^{i·fbar_rate·u}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosSinBlockParams {
    pub theta: f64,
    pub epsilon: f64,
    pub q: Complex64,
    pub t: Complex64,
    #[serde(default)]
    pub fbar_rate: f64,
}

pub fn fbar(rate: f64, u: f64) -> Complex64 {
    Complex64::new(0.0, rate * u).exp()
}

pub fn build_cos_sin_block(p: &CosSinBlockParams, u: f64) -> Result<CMatrix> {
    if p.q.norm() == 0.0 || p.t.norm() == 0.0 {
        return Err(GybeError::SingularParameter("q and t must be nonzero".into()));
    }
    let (ct, st) = ((p.theta * u).cos(), (p.theta * u).sin());
    let (ce, se) = ((p.epsilon * u).cos(), (p.epsilon * u).sin());
    let m = x4([re(ct), re(ce), re(ce), re(ct)], [p.q * st, p.t * se, -re(se) / p.t, -re(st) / p.q]);
    Ok(m.scale(fbar(p.fbar_rate, u)))
}

/// The anti-diagonal `M_q = antidiag(q, t, −1/t, −1/q)` with `q = e^{iφ}`,
/// `t = ±1`; `M_q² = −I`.
pub fn bell_generator(phi: f64, t: i8) -> Result<CMatrix> {
    if t.abs() != 1 {
        return Err(GybeError::InvalidParams(format!("t must be ±1, got {t}")));
    }
    let q = Complex64::new(0.0, phi).exp();
    let t = re(t as f64);
    Ok(x4([ZERO; 4], [q, t, -ONE / t, -ONE / q]))
}

/// Second-kind family `Ř(ū) = I + ū·M_q`, up to the scalar `1/√(1+ū²)`
/// which cancels in the braid relation.
pub fn build_bell_second_kind(phi: f64, t: i8, ubar: f64) -> Result<CMatrix> {
    let m = bell_generator(phi, t)?;
    Ok(&CMatrix::identity(4) + &m.scale(re(ubar)))
}

/// Tagged block description used in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BlockSpec {
    Trig(TrigBlockParams),
    Diag { thetas: [f64; 4] },
    Xxz(XxzBlockParams),
    Deformed(DeformedBlockParams),
    Odd(OddBlockParams),
}

impl BlockSpec {
    /// Evaluates the block as a `size × size` matrix. Four-by-four kinds only
    /// accept `size = 4`; the odd kind yields its scalar (1) or vector (2) part.
    pub fn eval(&self, u: f64, size: usize) -> Result<CMatrix> {
        let m = match (self, size) {
            (BlockSpec::Trig(p), 4) => build_trig_block(p, u),
            (BlockSpec::Diag { thetas }, 4) => build_diag_block(thetas, u),
            (BlockSpec::Xxz(p), 4) => build_xxz_block(p, u)?,
            (BlockSpec::Deformed(p), 4) => build_deformed_block(p, u)?,
            (BlockSpec::Odd(p), 1) => build_odd_blocks(p, u)?.0,
            (BlockSpec::Odd(p), 2) => build_odd_blocks(p, u)?.1,
            (spec, n) => {
                return Err(GybeError::Dimension(format!("block kind {} cannot fill a {n}x{n} cell", spec.kind())))
            }
        };
        Ok(m)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BlockSpec::Trig(_) => "trig",
            BlockSpec::Diag { .. } => "diag",
            BlockSpec::Xxz(_) => "xxz",
            BlockSpec::Deformed(_) => "deformed",
            BlockSpec::Odd(_) => "odd",
        }
    }
}
