//! Named solution families with default parameters, JSON overrides and the
//! equations each one is certified against.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::blocks::{
    build_bell_second_kind, build_cos_sin_block, build_deformed_block, build_diag_block, build_trig_block, build_xxz_block, fbar,
    BlockSpec, CosSinBlockParams, DeformedBlockParams, OddBlockParams, TrigBlockParams, XxzBlockParams, XxzVariant,
};
use crate::error::{GybeError, Result};
use crate::gates::unitarize;
use crate::perm::{build_perm_superposition, four_colors, parity_from_bits, r44, two_parameter_r, PermSpec};
use crate::tensor::{c, CMatrix, Residual};
use crate::verify::{
    factorized_residual, full_set_residuals, inhomogeneous_residual, second_kind_residual, spectral_residual, unitarity_defect,
    EquationForm, GybeShape, Normalization,
};
use crate::xshape::{
    assemble_x_shaped, build_appendix_8x8, build_m_family, build_p_block_general, AppendixKind, AppendixParams, AppendixTrigParams,
    AppendixXxzParams, BlockMap, CellSpec,
};

/// An equation a family is expected to satisfy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Homogeneous difference-form GYBE `(d, k, p)`.
    Gybe { d: usize, k: usize, p: usize },
    /// Mixed equation on `V_{N1} ⊗ V_{N2} ⊗ V_{N3}` with the family as `Ř₁₂`
    /// and its partner as `Ř₂₃`, or the other way round when `second` is set.
    Inhomogeneous {
        dims: [usize; 3],
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        second: bool,
    },
    /// All three mixed equations on `(a,b,a)`, `(b,a,a)`, `(a,a,b)`.
    FullSet { na: usize, nb: usize },
    SecondKind,
    Factorized,
    Unitary,
}

impl Certificate {
    pub fn label(&self) -> String {
        match self {
            Certificate::Gybe { d, k, p } => format!("gybe ({d},{k},{p})"),
            Certificate::Inhomogeneous { dims, second } => format!("inhomogeneous {dims:?}{}", if *second { " (as right factor)" } else { "" }),
            Certificate::FullSet { na, nb } => format!("full-set ({na},{nb})"),
            Certificate::SecondKind => "second-kind".into(),
            Certificate::Factorized => "factorized".into(),
            Certificate::Unitary => "unitary".into(),
        }
    }

    /// Dimension of the largest matrix product evaluated for this check.
    pub fn total_dim(&self) -> usize {
        match *self {
            Certificate::Gybe { d, k, p } => d.pow((k + p) as u32),
            Certificate::Inhomogeneous { dims, .. } => dims.iter().product(),
            Certificate::FullSet { na, nb } => na * na * nb,
            Certificate::SecondKind => 8,
            Certificate::Factorized | Certificate::Unitary => 0,
        }
    }
}

type MatFn = Arc<dyn Fn(f64) -> Result<CMatrix> + Send + Sync>;

/// A family instance: parameters resolved, constructors ready.
#[derive(Clone)]
pub struct Family {
    pub id: String,
    pub params: Value,
    pub operator_dim: usize,
    pub certificates: Vec<Certificate>,
    eval: MatFn,
    partner: Option<MatFn>,
    diagonal_partner: Option<MatFn>,
    fbar_rate: f64,
    normalization: Option<Arc<dyn Fn(f64) -> Normalization + Send + Sync>>,
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Family").field("id", &self.id).field("params", &self.params).finish()
    }
}

impl Family {
    pub fn eval(&self, u: f64) -> Result<CMatrix> {
        (self.eval)(u)
    }

    pub fn partner(&self, u: f64) -> Result<CMatrix> {
        let p = self.partner.as_ref().ok_or_else(|| GybeError::InvalidParams(format!("{} has no partner", self.id)))?;
        p(u)
    }

    /// Local dimension `d` when the operator acts on two equal sites.
    pub fn site_dim(&self) -> Option<usize> {
        let d = (self.operator_dim as f64).sqrt().round() as usize;
        (d * d == self.operator_dim).then_some(d)
    }

    pub fn fbar(&self, u: f64) -> Complex64 {
        fbar(self.fbar_rate, u)
    }

    pub fn normalization(&self, u: f64) -> Normalization {
        self.normalization.as_ref().map_or(Normalization::None, |n| n(u))
    }

    /// Residual of `cert` at the spectral pair `(u, v)`. The unitarity
    /// certificate only looks at `u`.
    pub fn check(&self, cert: &Certificate, u: f64, v: f64) -> Result<Residual> {
        let f = |x: f64| self.eval(x);
        let g = |x: f64| self.partner(x);
        match *cert {
            Certificate::Gybe { d, k, p } => {
                let shape = GybeShape::homogeneous(d, k, p, EquationForm::SpectralDifference)?;
                spectral_residual(&f, &shape, u, v)
            }
            Certificate::Inhomogeneous { dims, second: false } => inhomogeneous_residual(&f, &g, dims, u, v),
            Certificate::Inhomogeneous { dims, second: true } => inhomogeneous_residual(&g, &f, dims, u, v),
            Certificate::FullSet { na, nb } => {
                let aa = self.diagonal_partner.as_ref().ok_or_else(|| GybeError::InvalidParams(format!("{} has no diagonal partner", self.id)))?;
                let h = |x: f64| aa(x);
                let [a, b, cc] = full_set_residuals(&f, &g, &h, (na, nb), u, v)?;
                Ok(a.max(b).max(cc))
            }
            Certificate::SecondKind => second_kind_residual(&f, u, v),
            Certificate::Factorized => factorized_residual(&f, &|x| self.fbar(x), u, v),
            Certificate::Unitary => unitarity_defect(&self.eval(u)?, self.normalization(u)),
        }
    }

    /// The three mixed-equation residuals separately.
    pub fn full_set(&self, na: usize, nb: usize, u: f64, v: f64) -> Result<[Residual; 3]> {
        let aa = self.diagonal_partner.as_ref().ok_or_else(|| GybeError::InvalidParams(format!("{} has no diagonal partner", self.id)))?;
        full_set_residuals(&|x| self.eval(x), &|x| self.partner(x), &|x| aa(x), (na, nb), u, v)
    }
}

struct Entry {
    id: &'static str,
    description: &'static str,
    defaults: fn() -> Value,
    build: fn(&Value) -> Result<Family>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub id: String,
    pub description: String,
    pub defaults: Value,
    pub operator_dim: usize,
    pub certificates: Vec<Certificate>,
}

fn typed<T: DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| GybeError::InvalidParams(e.to_string()))
}

fn family(id: &str, params: &Value, dim: usize, eval: MatFn, certs: Vec<Certificate>) -> Family {
    Family {
        id: id.into(),
        params: params.clone(),
        operator_dim: dim,
        certificates: certs,
        eval,
        partner: None,
        diagonal_partner: None,
        fbar_rate: 0.0,
        normalization: None,
    }
}

const G221: Certificate = Certificate::Gybe { d: 2, k: 2, p: 1 };

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct XxzFamilyParams {
    u0: f64,
    gamma: f64,
    #[serde(default = "one")]
    a: f64,
    #[serde(default)]
    overall_alpha: f64,
}

fn one() -> f64 {
    1.0
}

fn xxz_family(id: &str, p: &Value, variant: XxzVariant) -> Result<Family> {
    let x: XxzFamilyParams = typed(p)?;
    let bp = XxzBlockParams { u0: x.u0, gamma: x.gamma, variant, a: x.a, overall_alpha: x.overall_alpha };
    build_xxz_block(&bp, 0.0)?;
    Ok(family(id, p, 4, Arc::new(move |u| build_xxz_block(&bp, u)), vec![G221]))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DeformedFamilyParams {
    alpha0: f64,
    alphax: f64,
    q: Complex64,
    t: Complex64,
    q_prime: Complex64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MParams {
    dim: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvenParams {
    n1: usize,
    n2: usize,
    n3: usize,
    block: BlockSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OddParams {
    n: usize,
    beta: f64,
    q: Complex64,
    t: i8,
    theta: Complex64,
    p: Complex64,
    kappa: f64,
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct XxzAppendixFamilyParams {
    #[serde(flatten)]
    inner: AppendixXxzParams,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GradedParams {
    alpha: f64,
    alpha_prime: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Perm16Params {
    alphas: [f64; 4],
    /// Free parity bits `(b₁₂, b₂₃, b₁₃)`.
    bits: [u8; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FracParams {
    epsilon: [Complex64; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BellParams {
    phi: f64,
    t: i8,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GateFamilyParams {
    gamma: f64,
    beta: f64,
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PBlockParams {
    n: usize,
    block: TrigBlockParams,
}

fn appendix_family(id: &str, p: &Value, kind: AppendixKind) -> Result<Family> {
    let (n1, n2) = kind.dims();
    let (params, partner_kind) = match kind {
        AppendixKind::Trig42 | AppendixKind::Trig24 => {
            let t: AppendixTrigParams = typed(p)?;
            let pk = if kind == AppendixKind::Trig42 { AppendixKind::Trig24 } else { AppendixKind::Trig42 };
            (AppendixParams::Trig(t), pk)
        }
        AppendixKind::Xxz42 | AppendixKind::Xxz24 => {
            let x: XxzAppendixFamilyParams = typed(p)?;
            let pk = if kind == AppendixKind::Xxz42 { AppendixKind::Xxz24 } else { AppendixKind::Xxz42 };
            (AppendixParams::Xxz(x.inner), pk)
        }
    };
    build_appendix_8x8(kind, &params, 0.0)?;
    let mut certs = vec![Certificate::Inhomogeneous { dims: [n1, n2, n1], second: false }];
    let mut fam_diag: Option<MatFn> = None;
    if let AppendixParams::Xxz(x) = params {
        // the (4,2,4) ordering and the diagonal partner only work with matched constants
        let matched = (x.ux - x.u0).abs() < 1e-12 && x.a0 == 1.0 && x.ax == 1.0;
        if kind == AppendixKind::Xxz42 {
            certs = vec![Certificate::Inhomogeneous { dims: [2, 4, 2], second: true }];
            if matched {
                certs.push(Certificate::Inhomogeneous { dims: [4, 2, 4], second: false });
            }
        }
        if matched && kind == AppendixKind::Xxz24 {
            certs.push(Certificate::FullSet { na: 2, nb: 4 });
        }
        let r22 = XxzBlockParams { u0: x.u0, gamma: x.gamma, variant: x.variant, a: x.a0, overall_alpha: 0.0 };
        fam_diag = Some(Arc::new(move |u| build_xxz_block(&r22, u)));
    }
    let mut f = family(id, p, n1 * n2, Arc::new(move |u| build_appendix_8x8(kind, &params, u)), certs);
    f.partner = Some(Arc::new(move |u| build_appendix_8x8(partner_kind, &params, u)));
    f.diagonal_partner = fam_diag;
    Ok(f)
}

fn odd_block_map(o: &OddParams, n1: usize, n2: usize) -> BlockMap {
    let trig = BlockSpec::Trig(TrigBlockParams::new(o.beta, o.beta, o.q, (o.t, o.t, 1)));
    let rot = OddBlockParams { theta: o.theta, p: o.p, alpha: o.alpha };
    let mut bm = BlockMap { n1, n2, cells: vec![] };
    for (a, b) in bm.required_pairs().expect("positive dims") {
        let cell = match (a, b) {
            (0, 0) => CellSpec { pair: [0, 0], block: BlockSpec::Odd(rot), gamma: 0.0, alpha: 1.0 },
            (0, _) | (_, 0) => CellSpec { pair: [a, b], block: BlockSpec::Odd(rot), gamma: o.kappa, alpha: 1.0 },
            _ => CellSpec { pair: [a, b], block: trig.clone(), gamma: 0.0, alpha: 1.0 },
        };
        bm.cells.push(cell);
    }
    bm
}

fn entries() -> Vec<Entry> {
    vec![
        Entry {
            id: "trig-block",
            description: "4x4 hyperbolic eight-vertex block with signs (t, t1, t2)",
            defaults: || json!({"gamma": 0.3, "beta": 0.7, "q": [2.0, 0.0], "t": 1, "t1": -1, "t2": -1}),
            build: |p| {
                let t: TrigBlockParams = typed(p)?;
                t.check_ybe()?;
                Ok(family("trig-block", p, 4, Arc::new(move |u| Ok(build_trig_block(&t, u))), vec![G221]))
            },
        },
        Entry {
            id: "diag-block",
            description: "diagonal block diag(e^{θ_i u})",
            defaults: || json!({"thetas": [0.3, -0.5, 0.8, 1.1]}),
            build: |p| {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct D {
                    thetas: [f64; 4],
                }
                let d: D = typed(p)?;
                Ok(family("diag-block", p, 4, Arc::new(move |u| Ok(build_diag_block(&d.thetas, u))), vec![G221, Certificate::Factorized]))
            },
        },
        Entry {
            id: "xxz-plus",
            description: "XXZ-type block, last diagonal entry sinh(u0 + x)",
            defaults: || json!({"u0": 0.7, "gamma": 0.4, "a": 1.3, "overall_alpha": 0.2}),
            build: |p| xxz_family("xxz-plus", p, XxzVariant::Plus),
        },
        Entry {
            id: "xxz-minus",
            description: "XXZ-type block, last diagonal entry sinh(u0 - x)",
            defaults: || json!({"u0": 0.7, "gamma": 0.4, "a": 1.3, "overall_alpha": 0.2}),
            build: |p| xxz_family("xxz-minus", p, XxzVariant::Minus),
        },
        Entry {
            id: "deformed-block",
            description: "two-rate block deformed by (q, t); partner uses (q', q/(q't)) with rates swapped",
            defaults: || json!({"alpha0": 0.4, "alphax": 0.9, "q": [1.3, 0.2], "t": [1.0, 0.0], "q_prime": [0.7, -0.4]}),
            build: |p| {
                let d: DeformedFamilyParams = typed(p)?;
                let bp = DeformedBlockParams { alpha0: d.alpha0, alphax: d.alphax, q: d.q, t: d.t };
                let partner = bp.partner(d.q_prime);
                build_deformed_block(&bp, 0.0)?;
                build_deformed_block(&partner, 0.0)?;
                let mut certs = vec![Certificate::Inhomogeneous { dims: [2, 2, 2], second: false }];
                if (d.t - c(1.0, 0.0)).norm() < 1e-12 || (d.t + c(1.0, 0.0)).norm() < 1e-12 {
                    certs.insert(0, G221);
                }
                let mut f = family("deformed-block", p, 4, Arc::new(move |u| build_deformed_block(&bp, u)), certs);
                f.partner = Some(Arc::new(move |u| build_deformed_block(&partner, u)));
                Ok(f)
            },
        },
        Entry {
            id: "m-matrix",
            description: "cosh(u) I + sinh(u) M with the anti-diagonal M, M^2 = -I",
            defaults: || json!({"dim": 4}),
            build: |p| {
                let m: MParams = typed(p)?;
                let d = m.dim;
                if !(d.is_power_of_two() && (4..=64).contains(&d)) {
                    return Err(GybeError::UnsupportedDimension(format!("m-matrix supports dim 4, 8, 16, 32, 64; got {d}")));
                }
                let k = d.trailing_zeros() as usize;
                let mut certs = vec![Certificate::Gybe { d: 2, k, p: 1 }];
                if d == 16 {
                    certs.push(Certificate::Gybe { d: 4, k: 2, p: 1 });
                }
                Ok(family("m-matrix", p, d, Arc::new(move |u| build_m_family(d, u)), certs))
            },
        },
        Entry {
            id: "x-shaped-even",
            description: "X-shaped matrix on V_n1 x V_n2 from identical eight-vertex cells; partner on V_n2 x V_n3",
            defaults: || {
                json!({"n1": 4, "n2": 8, "n3": 4,
                       "block": {"kind": "trig", "gamma": 0.3, "beta": 0.7, "q": [2.0, 0.0], "t": 1, "t1": -1, "t2": -1}})
            },
            build: |p| {
                let e: EvenParams = typed(p)?;
                if [e.n1, e.n2, e.n3].iter().any(|n| *n == 0 || n % 2 == 1) {
                    return Err(GybeError::UnsupportedDimension("x-shaped-even needs even dimensions".into()));
                }
                if e.n1 * e.n2 * e.n3 > 128 {
                    return Err(GybeError::MemoryGuard { dim: e.n1 * e.n2 * e.n3, limit: 128 });
                }
                let bm = BlockMap::uniform(e.n1, e.n2, e.block.clone())?;
                let pm = BlockMap::uniform(e.n2, e.n3, e.block)?;
                assemble_x_shaped(&bm, 0.0)?;
                let mut certs = vec![Certificate::Inhomogeneous { dims: [e.n1, e.n2, e.n3], second: false }];
                if e.n1 == e.n2 && e.n2 == e.n3 {
                    certs.insert(0, Certificate::Gybe { d: e.n1, k: 2, p: 1 });
                }
                let mut f = family("x-shaped-even", p, e.n1 * e.n2, Arc::new(move |u| assemble_x_shaped(&bm, u)), certs);
                f.partner = Some(Arc::new(move |u| assemble_x_shaped(&pm, u)));
                Ok(f)
            },
        },
        Entry {
            id: "x-shaped-odd",
            description: "odd-dimensional X-shaped matrix: trig cells with gamma = beta plus the central 1x1/2x2 sector",
            defaults: || {
                json!({"n": 3, "beta": 0.7, "q": [1.0, 0.0], "t": 1, "theta": [0.5, 0.0], "p": [0.0, 1.0], "kappa": 0.1, "alpha": 0.4})
            },
            build: |p| {
                let o: OddParams = typed(p)?;
                if o.n.is_multiple_of(2) || !(3..=5).contains(&o.n) {
                    return Err(GybeError::UnsupportedDimension(format!("x-shaped-odd supports n = 3 or 5, got {}", o.n)));
                }
                if o.t.abs() != 1 {
                    return Err(GybeError::InvalidParams("t must be ±1".into()));
                }
                if (o.p * o.p + o.q * o.t as f64).norm() > 1e-12 {
                    return Err(GybeError::InvalidParams("the central sector needs p² = -q·t".into()));
                }
                let bm = odd_block_map(&o, o.n, o.n);
                assemble_x_shaped(&bm, 0.0)?;
                let n = o.n;
                Ok(family("x-shaped-odd", p, n * n, Arc::new(move |u| assemble_x_shaped(&bm, u)), vec![Certificate::Gybe { d: n, k: 2, p: 1 }]))
            },
        },
        Entry {
            id: "trig42",
            description: "8x8 two-rate matrix on V4 x V2; partner is trig24",
            defaults: || json!({"rates": [0.3, 0.8, 0.8, 0.3], "alpha": 0.4, "allow_any_pattern": false}),
            build: |p| appendix_family("trig42", p, AppendixKind::Trig42),
        },
        Entry {
            id: "trig24",
            description: "8x8 two-rate matrix on V2 x V4; partner is trig42",
            defaults: || json!({"rates": [0.3, 0.8, 0.8, 0.3], "alpha": 0.4, "allow_any_pattern": false}),
            build: |p| appendix_family("trig24", p, AppendixKind::Trig24),
        },
        Entry {
            id: "xxz42",
            description: "8x8 XXZ-type matrix on V4 x V2; partner is xxz24",
            defaults: || {
                json!({"variant": "plus", "u0": 1.0, "ux": 0.6, "a0": 1.3, "ax": 0.7, "gamma": 0.3,
                       "beta": -0.4, "beta_prime": 0.5, "alpha": 0.2, "alpha_prime": -0.3})
            },
            build: |p| appendix_family("xxz42", p, AppendixKind::Xxz42),
        },
        Entry {
            id: "xxz24",
            description: "8x8 XXZ-type matrix on V2 x V4; partner is xxz42, diagonal partner the 4x4 XXZ block",
            defaults: || {
                json!({"variant": "plus", "u0": 1.0, "ux": 1.0, "a0": 1.0, "ax": 1.0, "gamma": 0.3,
                       "beta": -0.4, "beta_prime": 0.5, "alpha": 0.2, "alpha_prime": -0.3})
            },
            build: |p| appendix_family("xxz24", p, AppendixKind::Xxz24),
        },
        Entry {
            id: "graded-sum-2",
            description: "sum of the two Yang-Baxterized graded permutations on two states, rates (alpha, alpha')",
            defaults: || json!({"alpha": 1.0, "alpha_prime": 0.4}),
            build: |p| {
                let g: GradedParams = typed(p)?;
                Ok(family("graded-sum-2", p, 4, Arc::new(move |u| Ok(two_parameter_r(g.alpha * u, g.alpha_prime * u))), vec![G221]))
            },
        },
        Entry {
            id: "perm-16",
            description: "16x16 sum of four colored graded permutations with rates alpha_e",
            defaults: || json!({"alphas": [1.0, 1.0, 1.0, 1.0], "bits": [1, 0, 1]}),
            build: |p| {
                let g: Perm16Params = typed(p)?;
                if g.bits.iter().any(|b| *b > 1) {
                    return Err(GybeError::InvalidParams("parity bits must be 0 or 1".into()));
                }
                let parity = parity_from_bits(g.bits[0], g.bits[1], g.bits[2]);
                let alphas = g.alphas;
                let terms: Vec<(PermSpec, f64)> = four_colors().into_iter().zip(alphas).collect();
                let mut f = family(
                    "perm-16",
                    p,
                    16,
                    Arc::new(move |u| build_perm_superposition(&terms, &parity, u)),
                    vec![Certificate::Gybe { d: 2, k: 4, p: 2 }, Certificate::Unitary],
                );
                f.normalization = Some(Arc::new(move |u| Normalization::Perm16 { alphas, u }));
                Ok(f)
            },
        },
        Entry {
            id: "r2222-fractional",
            description: "cosh(u) I + sinh(u) sum eps_k Mbreve_k x Mbar_k with phases eps",
            defaults: || json!({"epsilon": [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]}),
            build: |p| {
                let g: FracParams = typed(p)?;
                let eps = g.epsilon;
                Ok(family("r2222-fractional", p, 16, Arc::new(move |u| Ok(r44(eps, u))), vec![Certificate::Gybe { d: 2, k: 4, p: 1 }]))
            },
        },
        Entry {
            id: "bell-second-kind",
            description: "I + ubar M_q with q = e^{i phi}; parameters compose relativistically",
            defaults: || json!({"phi": 0.3, "t": 1}),
            build: |p| {
                let b: BellParams = typed(p)?;
                build_bell_second_kind(b.phi, b.t, 0.0)?;
                Ok(family("bell-second-kind", p, 4, Arc::new(move |u| build_bell_second_kind(b.phi, b.t, u)), vec![Certificate::SecondKind]))
            },
        },
        Entry {
            id: "factorized-trig",
            description: "cos/sin two-rate block times Fbar(u) = e^{i r u}",
            defaults: || json!({"theta": 0.7, "epsilon": -0.4, "q": [1.2, 0.3], "t": [0.8, 0.0], "fbar_rate": 0.9}),
            build: |p| {
                let b: CosSinBlockParams = typed(p)?;
                build_cos_sin_block(&b, 0.0)?;
                let mut f = family("factorized-trig", p, 4, Arc::new(move |u| build_cos_sin_block(&b, u)), vec![Certificate::Factorized]);
                f.fbar_rate = b.fbar_rate;
                Ok(f)
            },
        },
        Entry {
            id: "unitary-gate",
            description: "normalized trig block with signs (1,-1,-1) and q = e^{i alpha}",
            defaults: || json!({"gamma": 0.4, "beta": 0.9, "alpha": 0.3}),
            build: |p| {
                let g: GateFamilyParams = typed(p)?;
                Ok(family(
                    "unitary-gate",
                    p,
                    4,
                    Arc::new(move |u| Ok(unitarize(g.gamma, g.beta, u, g.alpha).0)),
                    vec![G221, Certificate::Unitary],
                ))
            },
        },
        Entry {
            id: "p-block-2",
            description: "(2n)^2 x (2n)^2 matrix from identical 4x4 cells in the (s, n) ordering",
            defaults: || json!({"n": 2, "block": {"gamma": 0.3, "beta": 0.7, "q": [2.0, 0.0], "t": 1, "t1": -1, "t2": -1}}),
            build: |p| {
                let g: PBlockParams = typed(p)?;
                if !(1..=4).contains(&g.n) {
                    return Err(GybeError::UnsupportedDimension(format!("p-block-2 supports n in 1..=4, got {}", g.n)));
                }
                g.block.check_ybe()?;
                let (n, blk) = (g.n, g.block);
                let eval = move |u: f64| {
                    let cell = build_trig_block(&blk, u);
                    let cells: BTreeMap<(usize, usize), CMatrix> =
                        (1..=n).flat_map(|a| (1..=n).map(move |b| (a, b))).map(|k| (k, cell.clone())).collect();
                    build_p_block_general(2, n, n, &cells)
                };
                let d = 2 * n;
                let certs = if d.pow(3) <= 512 { vec![Certificate::Gybe { d, k: 2, p: 1 }] } else { vec![] };
                Ok(family("p-block-2", p, d * d, Arc::new(eval), certs))
            },
        },
    ]
}

pub fn family_ids() -> Vec<&'static str> {
    entries().iter().map(|e| e.id).collect()
}

fn merge(defaults: Value, overrides: Option<&Value>) -> Result<Value> {
    let mut base = defaults;
    if let Some(o) = overrides {
        let (Value::Object(b), Value::Object(o)) = (&mut base, o) else {
            return Err(GybeError::InvalidParams("parameters must be a JSON object".into()));
        };
        for (k, v) in o {
            if !b.contains_key(k) {
                return Err(GybeError::InvalidParams(format!("unknown parameter '{k}' (known: {})", b.keys().cloned().collect::<Vec<_>>().join(", "))));
            }
            b.insert(k.clone(), v.clone());
        }
    }
    Ok(base)
}

/// Builds family `id` from its defaults overridden by `overrides`.
pub fn instantiate(id: &str, overrides: Option<&Value>) -> Result<Family> {
    let all = entries();
    let e = all.iter().find(|e| e.id == id).ok_or_else(|| GybeError::UnknownFamily {
        name: id.to_string(),
        known: all.iter().map(|e| e.id).collect::<Vec<_>>().join(", "),
    })?;
    (e.build)(&merge((e.defaults)(), overrides)?)
}

pub fn default_params(id: &str) -> Result<Value> {
    let all = entries();
    all.iter().find(|e| e.id == id).map(|e| (e.defaults)()).ok_or_else(|| GybeError::UnknownFamily {
        name: id.to_string(),
        known: all.iter().map(|e| e.id).collect::<Vec<_>>().join(", "),
    })
}

pub fn describe_all() -> Result<Vec<FamilySummary>> {
    entries()
        .iter()
        .map(|e| {
            let f = (e.build)(&(e.defaults)())?;
            Ok(FamilySummary {
                id: e.id.into(),
                description: e.description.into(),
                defaults: (e.defaults)(),
                operator_dim: f.operator_dim,
                certificates: f.certificates,
            })
        })
        .collect()
}
