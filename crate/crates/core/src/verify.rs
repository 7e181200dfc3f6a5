//! Residuals of every equation variant: constant braid relations,
//! difference-form spectral equations, inhomogeneous sets, the
//! relativistic second-kind rule, the factorized `p ≥ k` relation and
//! unitarity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GybeError, Result};
use crate::tensor::{embed_operator, re, residual_norm, CMatrix, Residual, SiteDims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationForm {
    ConstantBraid,
    SpectralDifference,
    SpectralSecondKind,
    InhomogeneousI,
    InhomogeneousIi,
    Factorized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GybeShape {
    pub dims: SiteDims,
    pub span_a: (usize, usize),
    pub span_b: (usize, usize),
    pub form: EquationForm,
}

impl GybeShape {
    pub fn new(dims: SiteDims, span_a: (usize, usize), span_b: (usize, usize), form: EquationForm) -> Result<Self> {
        for (s, l) in [span_a, span_b] {
            if l == 0 || s + l > dims.len() {
                return Err(GybeError::Dimension(format!("span ({s},{l}) outside {} sites", dims.len())));
            }
        }
        Ok(Self { dims, span_a, span_b, form })
    }

    /// GYBE of type `(d, k, p)`: a `k`-site operator and its copy shifted by `p`.
    pub fn homogeneous(d: usize, k: usize, p: usize, form: EquationForm) -> Result<Self> {
        if d == 0 || k == 0 || p == 0 {
            return Err(GybeError::Dimension(format!("invalid shape ({d},{k},{p})")));
        }
        Self::new(SiteDims::uniform(d, k + p), (0, k), (p, k), form)
    }

    /// Parses `"d,k,p"`.
    pub fn parse(s: &str, form: EquationForm) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| GybeError::UnknownShape(s.to_string()))?;
        match parts[..] {
            [d, k, p] => Self::homogeneous(d, k, p, form),
            _ => Err(GybeError::UnknownShape(s.to_string())),
        }
    }

    pub fn operator_dim(&self) -> usize {
        self.dims.span_dim(self.span_a.0, self.span_a.1)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.total()
    }

    pub fn label(&self) -> String {
        let d = &self.dims.0;
        if d.iter().all(|&x| x == d[0]) && self.span_a == (0, self.span_b.1) {
            format!("({},{},{})", d[0], self.span_a.1, self.span_b.0)
        } else {
            format!("dims{:?} a{:?} b{:?}", d, self.span_a, self.span_b)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub equation: String,
    pub samples: usize,
    pub max_abs_residual: f64,
    pub frobenius_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    /// Spectral parameters at which the equation was evaluated.
    pub draws: Vec<[f64; 2]>,
}

impl VerificationReport {
    pub fn from_residual(equation: impl Into<String>, r: Residual, tol: f64, seed: u64, draws: Vec<[f64; 2]>) -> Self {
        Self {
            equation: equation.into(),
            samples: draws.len().max(1),
            max_abs_residual: r.max_abs,
            frobenius_residual: r.frobenius,
            tolerance: tol,
            pass: r.max_abs <= tol,
            seed,
            draws,
        }
    }
}

/// 1e-10 for operands up to 16×16-ish chains, 1e-9 once the embedded
/// product reaches dimension 64.
pub fn default_tolerance(total_dim: usize) -> f64 {
    if total_dim >= 64 {
        1e-9
    } else {
        1e-10
    }
}

fn triple(a: [&CMatrix; 3], b: [&CMatrix; 3]) -> Result<Residual> {
    let lhs = a[0].matmul(a[1])?.matmul(a[2])?;
    let rhs = b[0].matmul(b[1])?.matmul(b[2])?;
    residual_norm(&lhs, &rhs)
}

fn check_dim(r: &CMatrix, want: usize) -> Result<()> {
    if r.rows() != want || !r.is_square() {
        return Err(GybeError::Dimension(format!("operator is {:?}, shape needs {want}x{want}", r.shape())));
    }
    Ok(())
}

/// `(Ř⊗I)(I⊗Ř)(Ř⊗I) − (I⊗Ř)(Ř⊗I)(I⊗Ř)` for the embedding given by `shape`.
pub fn constant_residual(r: &CMatrix, shape: &GybeShape) -> Result<Residual> {
    check_dim(r, shape.operator_dim())?;
    let a = embed_operator(r, &shape.dims, shape.span_a.0)?;
    let b = embed_operator(r, &shape.dims, shape.span_b.0)?;
    triple([&a, &b, &a], [&b, &a, &b])
}

pub fn verify_constant(r: &CMatrix, shape: &GybeShape, tol: f64) -> Result<VerificationReport> {
    let res = constant_residual(r, shape)?;
    Ok(VerificationReport::from_residual(format!("constant-braid {}", shape.label()), res, tol, 0, vec![]))
}

/// `Ř(u−v)Ř(u)Ř(v) − Ř(v)Ř(u)Ř(u−v)`, the operators alternating between the
/// two embeddings of `shape`.
pub fn spectral_residual<F>(family: &F, shape: &GybeShape, u: f64, v: f64) -> Result<Residual>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    let at = |w: f64| -> Result<(CMatrix, CMatrix)> {
        let r = family(w)?;
        check_dim(&r, shape.operator_dim())?;
        Ok((embed_operator(&r, &shape.dims, shape.span_a.0)?, embed_operator(&r, &shape.dims, shape.span_b.0)?))
    };
    let (a_uv, b_uv) = at(u - v)?;
    let (a_u, b_u) = at(u)?;
    let (a_v, b_v) = at(v)?;
    triple([&a_uv, &b_u, &a_v], [&b_v, &a_u, &b_uv])
}

pub fn verify_spectral<F>(family: &F, shape: &GybeShape, u: f64, v: f64, tol: f64) -> Result<VerificationReport>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    let res = spectral_residual(family, shape, u, v)?;
    Ok(VerificationReport::from_residual(format!("spectral {}", shape.label()), res, tol, 0, vec![[u, v]]))
}

/// Inhomogeneous equation on `V_{N1}⊗V_{N2}⊗V_{N3}` with `Ř₁₂` acting on the
/// first two sites and `Ř₂₃` on the last two.
pub fn inhomogeneous_residual<F, G>(r12: &F, r23: &G, dims: [usize; 3], u: f64, v: f64) -> Result<Residual>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
    G: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    let sd = SiteDims::new(dims.to_vec())?;
    let a = |w: f64| -> Result<CMatrix> {
        let r = r12(w)?;
        check_dim(&r, dims[0] * dims[1])?;
        embed_operator(&r, &sd, 0)
    };
    let b = |w: f64| -> Result<CMatrix> {
        let r = r23(w)?;
        check_dim(&r, dims[1] * dims[2])?;
        embed_operator(&r, &sd, 1)
    };
    triple([&a(u - v)?, &b(u)?, &a(v)?], [&b(v)?, &a(u)?, &b(u - v)?])
}

pub fn verify_inhomogeneous<F, G>(r12: &F, r23: &G, dims: [usize; 3], u: f64, v: f64, tol: f64) -> Result<VerificationReport>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
    G: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    let res = inhomogeneous_residual(r12, r23, dims, u, v)?;
    Ok(VerificationReport::from_residual(format!("inhomogeneous {dims:?}"), res, tol, 0, vec![[u, v]]))
}

/// The three mixed equations tying `Ř_ab` (`N_a·N_b`), `Ř_ba` and `Ř_aa`:
/// `gybe123` on `(a,b,a)`, `gybe231` on `(b,a,a)`, `gybe312` on `(a,a,b)`.
pub fn full_set_residuals<F, G, H>(r_ab: &F, r_ba: &G, r_aa: &H, (na, nb): (usize, usize), u: f64, v: f64) -> Result<[Residual; 3]>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
    G: Fn(f64) -> Result<CMatrix> + ?Sized,
    H: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    Ok([
        inhomogeneous_residual(r_ab, r_ba, [na, nb, na], u, v)?,
        inhomogeneous_residual(r_ba, r_aa, [nb, na, na], u, v)?,
        inhomogeneous_residual(r_aa, r_ab, [na, na, nb], u, v)?,
    ])
}

pub const FULL_SET_IDS: [&str; 3] = ["gybe123", "gybe231", "gybe312"];

/// Relativistic composition `(ū − v̄)/(1 − ūv̄)`.
pub fn relativistic_difference(ubar: f64, vbar: f64) -> Result<f64> {
    let den = 1.0 - ubar * vbar;
    if den.abs() <= 1e-9 {
        return Err(GybeError::SingularArgument(format!("1 - ubar*vbar = {den:e}")));
    }
    Ok((ubar - vbar) / den)
}

/// Second-kind relation for a 4×4 family on `V₂⊗V₂⊗V₂`.
pub fn second_kind_residual<F>(family: &F, ubar: f64, vbar: f64) -> Result<Residual>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    let w = relativistic_difference(ubar, vbar)?;
    let shape = GybeShape::homogeneous(2, 2, 1, EquationForm::SpectralSecondKind)?;
    let a = |x: f64| family(x).and_then(|r| embed_operator(&r, &shape.dims, 0));
    let b = |x: f64| family(x).and_then(|r| embed_operator(&r, &shape.dims, 1));
    triple([&a(w)?, &b(ubar)?, &a(vbar)?], [&b(vbar)?, &a(ubar)?, &b(w)?])
}

pub fn verify_second_kind<F>(family: &F, ubar: f64, vbar: f64, tol: f64) -> Result<VerificationReport>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    let res = second_kind_residual(family, ubar, vbar)?;
    Ok(VerificationReport::from_residual("second-kind", res, tol, 0, vec![[ubar, vbar]]))
}

/// `Ř(u−v)·Ř(v) − F̄(u−v)F̄(v)/F̄(u)·Ř(u)`.
pub fn factorized_residual<F, B>(family: &F, fbar: &B, u: f64, v: f64) -> Result<Residual>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
    B: Fn(f64) -> num_complex::Complex64 + ?Sized,
{
    let fu = fbar(u);
    if fu.norm() < 1e-300 {
        return Err(GybeError::SingularArgument(format!("Fbar({u}) = 0")));
    }
    let lhs = family(u - v)?.matmul(&family(v)?)?;
    let rhs = family(u)?.scale(fbar(u - v) * fbar(v) / fu);
    residual_norm(&lhs, &rhs)
}

pub fn verify_factorized<F, B>(family: &F, fbar: &B, u: f64, v: f64, tol: f64) -> Result<VerificationReport>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
    B: Fn(f64) -> num_complex::Complex64 + ?Sized,
{
    let res = factorized_residual(family, fbar, u, v)?;
    Ok(VerificationReport::from_residual("factorized", res, tol, 0, vec![[u, v]]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Normalization {
    None,
    /// `√2/√(cosh 2γu + cosh 2βu)` for the 4×4 trigonometric block.
    Trig { gamma: f64, beta: f64, u: f64 },
    /// `(1 + Σ sinh²(α_e u))^{−1/2}` for the colored 16×16 superposition.
    Perm16 { alphas: [f64; 4], u: f64 },
}

impl Normalization {
    pub fn factor(&self) -> f64 {
        match *self {
            Normalization::None => 1.0,
            Normalization::Trig { gamma, beta, u } => {
                2f64.sqrt() / ((2.0 * gamma * u).cosh() + (2.0 * beta * u).cosh()).sqrt()
            }
            Normalization::Perm16 { alphas, u } => {
                1.0 / (1.0 + alphas.iter().map(|a| (a * u).sinh().powi(2)).sum::<f64>()).sqrt()
            }
        }
    }
}

/// `‖N·R (N·R)† − I‖` after the chosen normalization.
pub fn unitarity_defect(r: &CMatrix, norm: Normalization) -> Result<Residual> {
    if !r.is_square() {
        return Err(GybeError::Dimension("unitarity of a non-square matrix".into()));
    }
    if r.max_abs() == 0.0 {
        return Err(GybeError::Singular("zero matrix".into()));
    }
    let m = r.scale(re(norm.factor()));
    residual_norm(&m.matmul(&m.dagger())?, &CMatrix::identity(r.rows()))
}

pub fn verify_unitary(r: &CMatrix, norm: Normalization, tol: f64) -> Result<VerificationReport> {
    let res = unitarity_defect(r, norm)?;
    Ok(VerificationReport::from_residual("unitarity", res, tol, 0, vec![]))
}

/// Seeded `(u, v)` draws, uniform on `[−1, 1]²`.
pub fn draw_pairs(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)]).collect()
}

/// Evaluates `residual` at `n_samples` seeded draws in parallel and keeps the
/// maximum. Identical seeds give identical reports.
pub fn sweep<F>(equation: &str, n_samples: usize, seed: u64, tol: f64, residual: F) -> Result<VerificationReport>
where
    F: Fn(f64, f64) -> Result<Residual> + Sync,
{
    if n_samples == 0 {
        return Err(GybeError::InvalidParams("sweep needs at least one sample".into()));
    }
    let draws = draw_pairs(n_samples, seed);
    let results: Vec<Residual> =
        crate::parallel::install(|| draws.par_iter().map(|&[u, v]| residual(u, v)).collect::<Result<Vec<_>>>())?;
    let worst = results.into_iter().fold(Residual::zero(), Residual::max);
    Ok(VerificationReport::from_residual(equation, worst, tol, seed, draws))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{build_trig_block, TrigBlockParams};
    use crate::tensor::{c, kron, ONE};

    fn m4() -> CMatrix {
        CMatrix::from_real(4, 4, &[0., 0., 0., 1., 0., 0., 1., 0., 0., -1., 0., 0., -1., 0., 0., 0.]).unwrap()
    }

    fn trig_family(u: f64) -> Result<CMatrix> {
        Ok(build_trig_block(&TrigBlockParams::new(0.3, 0.7, c(2.0, 0.0), (1, -1, -1)), u))
    }

    #[test]
    fn shape_parse() {
        let s = GybeShape::parse("2,2,1", EquationForm::SpectralDifference).unwrap();
        assert_eq!(s.dims.0, vec![2, 2, 2]);
        assert_eq!(s.span_b, (1, 2));
        assert_eq!(s.label(), "(2,2,1)");
        assert!(GybeShape::parse("2,2", EquationForm::SpectralDifference).is_err());
        assert!(GybeShape::parse("a,b,c", EquationForm::SpectralDifference).is_err());
    }

    #[test]
    fn constant_cases() {
        let shape = GybeShape::homogeneous(2, 2, 1, EquationForm::ConstantBraid).unwrap();
        let mp = &CMatrix::identity(4) + &m4();
        assert!(verify_constant(&mp, &shape, 1e-14).unwrap().pass);
        assert!(constant_residual(&m4(), &shape).unwrap().max_abs > 0.5);
        assert_eq!(constant_residual(&CMatrix::identity(4), &shape).unwrap().max_abs, 0.0);
        let mut bad = mp.clone();
        bad[(0, 1)] += 0.1;
        assert!(constant_residual(&bad, &shape).unwrap().max_abs > 1e-3);
        assert!(constant_residual(&CMatrix::identity(8), &shape).is_err());
    }

    #[test]
    fn spectral_trig_and_diagonal_point() {
        let shape = GybeShape::homogeneous(2, 2, 1, EquationForm::SpectralDifference).unwrap();
        assert!(spectral_residual(&trig_family, &shape, 0.3, 0.7).unwrap().max_abs < 1e-12);
        assert!(spectral_residual(&trig_family, &shape, 0.45, 0.45).unwrap().max_abs < 1e-13);
    }

    #[test]
    fn spectral_matches_loop_oracle() {
        // Hand-rolled 8×8 triple product with explicit index loops.
        let (u, v) = (0.3, -0.6);
        let big = |r: &CMatrix, first: bool| {
            CMatrix::from_fn(8, 8, |row, col| {
                let (a, b, cc) = (row >> 2, (row >> 1) & 1, row & 1);
                let (a2, b2, c2) = (col >> 2, (col >> 1) & 1, col & 1);
                if first {
                    if cc == c2 { r[(a * 2 + b, a2 * 2 + b2)] } else { crate::tensor::ZERO }
                } else if a == a2 {
                    r[(b * 2 + cc, b2 * 2 + c2)]
                } else {
                    crate::tensor::ZERO
                }
            })
        };
        let f = |w| trig_family(w).unwrap();
        let lhs = &(&big(&f(u - v), true) * &big(&f(u), false)) * &big(&f(v), true);
        let rhs = &(&big(&f(v), false) * &big(&f(u), true)) * &big(&f(u - v), false);
        let oracle = residual_norm(&lhs, &rhs).unwrap();
        let shape = GybeShape::homogeneous(2, 2, 1, EquationForm::SpectralDifference).unwrap();
        let got = spectral_residual(&trig_family, &shape, u, v).unwrap();
        assert!((oracle.max_abs - got.max_abs).abs() < 1e-15);
        assert_eq!(embed_operator(&f(u), &shape.dims, 0).unwrap(), big(&f(u), true));
    }

    #[test]
    fn second_kind_pole() {
        let fam = |x: f64| crate::blocks::build_bell_second_kind(0.3, 1, x);
        assert!(matches!(second_kind_residual(&fam, 2.0, 0.5), Err(GybeError::SingularArgument(_))));
        assert!(second_kind_residual(&fam, 0.4, 0.4).unwrap().max_abs < 1e-13);
    }

    #[test]
    fn factorized_zero_fbar() {
        let fam = |_u: f64| Ok(CMatrix::identity(4));
        let zero = |_u: f64| crate::tensor::ZERO;
        assert!(factorized_residual(&fam, &zero, 0.3, 0.1).is_err());
        let unit = |_u: f64| ONE;
        assert_eq!(factorized_residual(&fam, &unit, 0.3, 0.0).unwrap().max_abs, 0.0);
    }

    #[test]
    fn unitarity_identity_and_unnormalized() {
        assert_eq!(unitarity_defect(&CMatrix::identity(4), Normalization::None).unwrap().max_abs, 0.0);
        let r = trig_family(1.0).unwrap();
        assert!(unitarity_defect(&r, Normalization::None).unwrap().max_abs > 0.1);
        assert!(unitarity_defect(&CMatrix::zeros(2, 2), Normalization::None).is_err());
    }

    #[test]
    fn sweep_is_deterministic() {
        let shape = GybeShape::homogeneous(2, 2, 1, EquationForm::SpectralDifference).unwrap();
        let run = || sweep("trig", 20, 7, 1e-10, |u, v| spectral_residual(&trig_family, &shape, u, v)).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.pass);
        let one = sweep("trig", 1, 3, 1e-10, |u, v| spectral_residual(&trig_family, &shape, u, v)).unwrap();
        let [u, v] = one.draws[0];
        assert_eq!(one.max_abs_residual, spectral_residual(&trig_family, &shape, u, v).unwrap().max_abs);
        assert!(sweep("x", 0, 1, 1.0, |_, _| Ok(Residual::zero())).is_err());
    }

    #[test]
    fn swapping_sides_is_symmetric() {
        let shape = GybeShape::homogeneous(2, 2, 1, EquationForm::SpectralDifference).unwrap();
        let mut bad = trig_family(0.4).unwrap();
        bad[(0, 1)] = c(0.2, 0.0);
        let f = |w: f64| Ok(bad.scale(re(1.0 + w)));
        let a = spectral_residual(&f, &shape, 0.2, 0.9).unwrap();
        // Mirror statement: v ↔ u with the two sides exchanged.
        let mirror = |u: f64, v: f64| -> Result<Residual> {
            let at = |w: f64| -> Result<(CMatrix, CMatrix)> {
                let r = f(w)?;
                Ok((embed_operator(&r, &shape.dims, 0)?, embed_operator(&r, &shape.dims, 1)?))
            };
            let (a_uv, b_uv) = at(v - u)?;
            let (a_u, b_u) = at(v)?;
            let (a_v, b_v) = at(u)?;
            triple([&b_v, &a_u, &b_uv], [&a_uv, &b_u, &a_v])
        };
        let b = mirror(0.9, 0.2).unwrap();
        assert!((a.max_abs - b.max_abs).abs() < 1e-13);
        assert!(a.max_abs > 1e-3);
        let _ = kron(&CMatrix::identity(1), &CMatrix::identity(1));
        let _ = ONE;
    }
}
