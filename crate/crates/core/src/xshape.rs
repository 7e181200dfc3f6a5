//! X-shaped matrices on `V_{N1}⊗V_{N2}` assembled from eight-vertex cells,
//! the odd central sector, the `M` family, induced matrices, `p`-block
//! generalizations and the 8×8 appendix families.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::blocks::{build_deformed_block, build_xxz_block, BlockSpec, DeformedBlockParams, XxzBlockParams, XxzVariant};
use crate::error::{GybeError, Result};
use crate::tensor::{kron, re, CMatrix, ONE};

/// Signed labels of one site, highest first: `𝒩..1,(0),−1..−𝒩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub n: usize,
    pub labels: Vec<i32>,
}

impl LabelMap {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GybeError::Dimension("site dimension 0".into()));
        }
        let h = (n / 2) as i32;
        let mut labels: Vec<i32> = (1..=h).rev().collect();
        if n % 2 == 1 {
            labels.push(0);
        }
        labels.extend((1..=h).map(|l| -l));
        Ok(Self { n, labels })
    }

    pub fn index_of(&self, label: i32) -> Result<usize> {
        let h = (self.n / 2) as i32;
        if label.abs() > h || (label == 0 && self.n.is_multiple_of(2)) {
            return Err(GybeError::LabelOutOfRange(label, self.n));
        }
        Ok(if label > 0 { (h - label) as usize } else { self.n - 1 - (h + label) as usize })
    }

    /// Nonnegative labels that index cells: `1..=𝒩`, plus `0` for odd `N`.
    pub fn cell_labels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = (1..=(self.n / 2) as u32).collect();
        if self.n % 2 == 1 {
            v.push(0);
        }
        v
    }
}

/// Number of nonzero entries of a generic X-shaped `N1N2 × N1N2` matrix.
pub fn vertex_count(n1: usize, n2: usize) -> usize {
    if n1.is_multiple_of(2) || n2.is_multiple_of(2) {
        2 * n1 * n2
    } else {
        2 * n1 * n2 - 1
    }
}

pub fn cell_size(a: u32, b: u32) -> usize {
    match (a, b) {
        (0, 0) => 1,
        (0, _) | (_, 0) => 2,
        _ => 4,
    }
}

/// Signed states a cell acts on, in cell order `(++, +−, −+, −−)`.
fn cell_states(a: u32, b: u32) -> Vec<(i32, i32)> {
    let sa: Vec<i32> = if a == 0 { vec![0] } else { vec![a as i32, -(a as i32)] };
    let sb: Vec<i32> = if b == 0 { vec![0] } else { vec![b as i32, -(b as i32)] };
    sa.iter().flat_map(|&x| sb.iter().map(move |&y| (x, y))).collect()
}

fn cell_positions(lm1: &LabelMap, lm2: &LabelMap, a: u32, b: u32) -> Result<Vec<usize>> {
    cell_states(a, b).into_iter().map(|(x, y)| Ok(lm1.index_of(x)? * lm2.n + lm2.index_of(y)?)).collect()
}

/// Places every cell returned by `cell(a, b)` on its signed positions.
pub fn assemble_with<F>(n1: usize, n2: usize, mut cell: F) -> Result<CMatrix>
where
    F: FnMut(u32, u32) -> Result<CMatrix>,
{
    let (lm1, lm2) = (LabelMap::new(n1)?, LabelMap::new(n2)?);
    let mut m = CMatrix::zeros(n1 * n2, n1 * n2);
    for &a in &lm1.cell_labels() {
        for &b in &lm2.cell_labels() {
            let block = cell(a, b)?;
            let size = cell_size(a, b);
            if block.shape() != (size, size) {
                return Err(GybeError::Dimension(format!("cell ({a},{b}) must be {size}x{size}, got {:?}", block.shape())));
            }
            let pos = cell_positions(&lm1, &lm2, a, b)?;
            for (r, &pr) in pos.iter().enumerate() {
                for (col, &pc) in pos.iter().enumerate() {
                    m[(pr, pc)] = block[(r, col)];
                }
            }
        }
    }
    Ok(m)
}

pub fn extract_block(m: &CMatrix, lm1: &LabelMap, lm2: &LabelMap, (a, b): (u32, u32)) -> Result<CMatrix> {
    let d = lm1.n * lm2.n;
    if m.shape() != (d, d) {
        return Err(GybeError::Dimension(format!("expected {d}x{d}, got {:?}", m.shape())));
    }
    let pos = cell_positions(lm1, lm2, a, b)?;
    let n = pos.len();
    Ok(CMatrix::from_fn(n, n, |r, c| m[(pos[r], pos[c])]))
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub pair: [u32; 2],
    pub block: BlockSpec,
    /// Prefactor rate: the cell is multiplied by `e^{γu}`.
    #[serde(default)]
    pub gamma: f64,
    /// Argument rate: the block is evaluated at `αu`.
    #[serde(default = "one")]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMap {
    pub n1: usize,
    pub n2: usize,
    pub cells: Vec<CellSpec>,
}

impl BlockMap {
    pub fn cell(&self, a: u32, b: u32) -> Option<&CellSpec> {
        self.cells.iter().find(|c| c.pair == [a, b])
    }

    pub fn required_pairs(&self) -> Result<Vec<(u32, u32)>> {
        let (l1, l2) = (LabelMap::new(self.n1)?, LabelMap::new(self.n2)?);
        Ok(l1.cell_labels().iter().flat_map(|&a| l2.cell_labels().into_iter().map(move |b| (a, b))).collect())
    }

    /// Same block everywhere (the odd sector needs an `odd`-kind block, so
    /// this is only meant for even dimensions).
    pub fn uniform(n1: usize, n2: usize, block: BlockSpec) -> Result<Self> {
        let mut bm = BlockMap { n1, n2, cells: vec![] };
        for (a, b) in bm.required_pairs()? {
            bm.cells.push(CellSpec { pair: [a, b], block: block.clone(), gamma: 0.0, alpha: 1.0 });
        }
        Ok(bm)
    }
}

pub fn assemble_x_shaped(bm: &BlockMap, u: f64) -> Result<CMatrix> {
    assemble_with(bm.n1, bm.n2, |a, b| {
        let cell = bm.cell(a, b).ok_or(GybeError::IncompleteBlockMap(a, b))?;
        Ok(cell.block.eval(cell.alpha * u, cell_size(a, b))?.scale(re((cell.gamma * u).exp())))
    })
}

/// `M` of even dimension `D`: anti-diagonal, `+1` on the upper half and
/// `−1` on the lower half, so `M² = −I`.
pub fn build_m(d: usize) -> Result<CMatrix> {
    if d == 0 || d % 2 == 1 {
        return Err(GybeError::UnsupportedDimension(format!("M needs an even dimension, got {d}")));
    }
    let mut m = CMatrix::zeros(d, d);
    for r in 0..d {
        m[(r, d - 1 - r)] = if r < d / 2 { ONE } else { -ONE };
    }
    Ok(m)
}

/// `Ř_M(u) = cosh(u)·I + sinh(u)·M`.
pub fn build_m_family(d: usize, u: f64) -> Result<CMatrix> {
    let m = build_m(d)?;
    Ok(&CMatrix::identity(d).scale(re(u.cosh())) + &m.scale(re(u.sinh())))
}

/// `M± = I ± M`.
pub fn build_m_pm(d: usize, sign: f64) -> Result<CMatrix> {
    Ok(&CMatrix::identity(d) + &build_m(d)?.scale(re(sign)))
}

/// `Ř₂₂ ⊗ I_{n1} ⊗ I_{n2}`.
pub fn build_induced(r22: &CMatrix, n1: usize, n2: usize) -> Result<CMatrix> {
    if r22.shape() != (4, 4) {
        return Err(GybeError::Dimension(format!("induced matrices need a 4x4 seed, got {:?}", r22.shape())));
    }
    Ok(kron(r22, &CMatrix::identity(n1 * n2)))
}

/// Induced variant with the unit replaced by `diag(e^{iγ₁u}, …)` on each
/// extra factor.
pub fn build_induced_diag(r22: &CMatrix, phases1: &[f64], phases2: &[f64], u: f64) -> Result<CMatrix> {
    if r22.shape() != (4, 4) {
        return Err(GybeError::Dimension(format!("induced matrices need a 4x4 seed, got {:?}", r22.shape())));
    }
    let d = |ph: &[f64]| CMatrix::diag(&ph.iter().map(|g| num_complex::Complex64::new(0.0, g * u).exp()).collect::<Vec<_>>());
    Ok(kron(&kron(r22, &d(phases1)), &d(phases2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AppendixKind {
    Trig42,
    Trig24,
    Xxz42,
    Xxz24,
}

impl AppendixKind {
    pub fn dims(self) -> (usize, usize) {
        match self {
            AppendixKind::Trig42 | AppendixKind::Xxz42 => (4, 2),
            AppendixKind::Trig24 | AppendixKind::Xxz24 => (2, 4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixTrigParams {
    /// `(α₁, α₂, α₃, α₄)`.
    pub rates: [f64; 4],
    /// Exponential prefactor rate on the `(1,1)` cell.
    pub alpha: f64,
    /// Skip the pattern check (negative-control experiments).
    #[serde(default)]
    pub allow_any_pattern: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixXxzParams {
    pub variant: XxzVariant,
    pub u0: f64,
    pub ux: f64,
    pub a0: f64,
    pub ax: f64,
    pub gamma: f64,
    pub beta: f64,
    pub beta_prime: f64,
    pub alpha: f64,
    pub alpha_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AppendixParams {
    Trig(AppendixTrigParams),
    Xxz(AppendixXxzParams),
}

/// Permissible rate patterns: `(α₃, α₄)` repeats `(α₁, α₂)` in either order.
pub fn a4_pattern_ok(r: &[f64; 4]) -> bool {
    let eq = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs());
    (eq(r[2], r[0]) && eq(r[3], r[1])) || (eq(r[2], r[1]) && eq(r[3], r[0]))
}

fn two_rate(alpha0: f64, alphax: f64) -> DeformedBlockParams {
    DeformedBlockParams { alpha0, alphax, q: ONE, t: ONE }
}

/// The 8×8 matrices on `V₄⊗V₂` / `V₂⊗V₄`. The cell touching label 2 carries
/// the first rate pair, the `(1,1)` cell the second pair and the prefactor.
pub fn build_appendix_8x8(kind: AppendixKind, params: &AppendixParams, u: f64) -> Result<CMatrix> {
    let (n1, n2) = kind.dims();
    match (kind, params) {
        (AppendixKind::Trig42 | AppendixKind::Trig24, AppendixParams::Trig(p)) => {
            if !p.allow_any_pattern && !a4_pattern_ok(&p.rates) {
                return Err(GybeError::InvalidPattern(format!("rates {:?} are not a permissible pattern", p.rates)));
            }
            let [a1, a2, a3, a4] = p.rates;
            assemble_with(n1, n2, |a, b| {
                if a == 1 && b == 1 {
                    Ok(build_deformed_block(&two_rate(a3, a4), u)?.scale(re((p.alpha * u).exp())))
                } else {
                    build_deformed_block(&two_rate(a1, a2), u)
                }
            })
        }
        (AppendixKind::Xxz42 | AppendixKind::Xxz24, AppendixParams::Xxz(p)) => assemble_with(n1, n2, |a, b| {
            let cell = if a == 1 && b == 1 {
                XxzBlockParams { u0: p.u0, gamma: p.gamma, variant: p.variant, a: p.a0, overall_alpha: 0.0 }
            } else if a == 2 {
                XxzBlockParams { u0: p.ux, gamma: p.beta, variant: p.variant, a: p.ax, overall_alpha: p.alpha }
            } else {
                XxzBlockParams { u0: p.ux, gamma: p.beta_prime, variant: p.variant, a: p.ax, overall_alpha: p.alpha_prime }
            };
            build_xxz_block(&cell, u)
        }),
        (k, _) => Err(GybeError::InvalidParams(format!("parameter kind does not match {k:?}"))),
    }
}

/// `(pN)² × (pK)²` matrix from `p²×p²` cells keyed by `(nᵢ, kⱼ)` with
/// `nᵢ ∈ 1..=N`, `kⱼ ∈ 1..=K`. State `(s, n)` sits at `(s−1)·N + (N−n)`.
pub fn build_p_block_general(p: usize, n: usize, k: usize, cells: &BTreeMap<(usize, usize), CMatrix>) -> Result<CMatrix> {
    if p == 0 || n == 0 || k == 0 {
        return Err(GybeError::Dimension("p, N and K must be positive".into()));
    }
    let (d1, d2) = (p * n, p * k);
    let mut m = CMatrix::zeros(d1 * d2, d1 * d2);
    for ni in 1..=n {
        for kj in 1..=k {
            let cell = cells.get(&(ni, kj)).ok_or(GybeError::IncompleteBlockMap(ni as u32, kj as u32))?;
            if cell.shape() != (p * p, p * p) {
                return Err(GybeError::Dimension(format!("cell ({ni},{kj}) must be {0}x{0}", p * p)));
            }
            let pos = |idx: usize| {
                let (s1, s2) = (idx / p, idx % p);
                (s1 * n + (n - ni)) * d2 + s2 * k + (k - kj)
            };
            for r in 0..p * p {
                for c in 0..p * p {
                    m[(pos(r), pos(c))] = cell[(r, c)];
                }
            }
        }
    }
    Ok(m)
}
