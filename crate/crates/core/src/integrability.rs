//! Transfer matrices on cyclic chains, commutativity, Hamiltonians and small
//! partition functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GybeError, Result};
use crate::perm::{h44_density, r2222_bracket};
use crate::tensor::{embed_operator, kron, kron_all, pauli, re, residual_norm, CMatrix, SiteDims, ONE, ZERO};
use crate::xshape::LabelMap;

/// Largest transfer-matrix dimension we agree to build.
pub const MAX_TRANSFER_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub site_dim: usize,
}

impl ChainSpec {
    pub fn new(n_sites: usize, site_dim: usize) -> Result<Self> {
        if n_sites < 2 || site_dim == 0 {
            return Err(GybeError::InvalidParams(format!("chain needs ≥2 sites and a positive site dimension, got {n_sites}x{site_dim}")));
        }
        let c = Self { n_sites, site_dim };
        c.dim()?;
        Ok(c)
    }

    pub fn dim(&self) -> Result<usize> {
        match self.site_dim.checked_pow(self.n_sites as u32) {
            Some(d) if d <= MAX_TRANSFER_DIM => Ok(d),
            _ => Err(GybeError::MemoryGuard { dim: self.site_dim.saturating_pow(self.n_sites as u32), limit: MAX_TRANSFER_DIM }),
        }
    }
}

fn digits(mut x: usize, d: usize, n: usize) -> Vec<usize> {
    let mut v = vec![0; n];
    for slot in v.iter_mut().rev() {
        *slot = x % d;
        x /= d;
    }
    v
}

/// `τ[J][I] = Σ_K Π_r Ř[(J_{r−1}, K_r), (K_{r−1}, I_r)]` with cyclic labels.
/// Evaluated per `(J, I)` as the trace of a product of `d×d` slices.
pub fn transfer_from_weight(r: &CMatrix, chain: &ChainSpec) -> Result<CMatrix> {
    let (d, n) = (chain.site_dim, chain.n_sites);
    let dim = chain.dim()?;
    if r.shape() != (d * d, d * d) {
        return Err(GybeError::Dimension(format!("local weight must be {0}x{0}, got {1:?}", d * d, r.shape())));
    }
    let w = |o1: usize, o2: usize, i1: usize, i2: usize| r[(o1 * d + o2, i1 * d + i2)];
    let labels: Vec<Vec<usize>> = (0..dim).map(|x| digits(x, d, n)).collect();
    let mut tau = CMatrix::zeros(dim, dim);
    let mut acc = vec![ZERO; d * d];
    let mut tmp = vec![ZERO; d * d];
    for (jx, jl) in labels.iter().enumerate() {
        for (ix, il) in labels.iter().enumerate() {
            // acc = Π_r A_r with A_r[a][b] = w(J_{r−1}, b, a, I_r)
            for a in 0..d {
                for b in 0..d {
                    acc[a * d + b] = w(jl[n - 1], b, a, il[0]);
                }
            }
            for s in 1..n {
                for a in 0..d {
                    for b in 0..d {
                        let mut z = ZERO;
                        for k in 0..d {
                            z += acc[a * d + k] * w(jl[s - 1], b, k, il[s]);
                        }
                        tmp[a * d + b] = z;
                    }
                }
                std::mem::swap(&mut acc, &mut tmp);
            }
            tau[(jx, ix)] = (0..d).map(|a| acc[a * d + a]).sum();
        }
    }
    Ok(tau)
}

pub fn transfer_matrix<F>(family: &F, chain: &ChainSpec, u: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    transfer_from_weight(&family(u)?, chain)
}

/// `‖[a, b]‖_F`.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(a.commutator(b)?.frobenius())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianReport {
    pub hamiltonian: CMatrix,
    /// `‖τ(0) − I‖_max`, measured rather than assumed.
    pub tau0_identity_defect: f64,
    pub tau0_condition: f64,
    pub probe_v: f64,
    pub commutator_with_tau: f64,
}

/// `H = τ(0)⁻¹·(τ(h) − τ(−h))/(2h)` and its commutator with `τ(v)`.
pub fn hamiltonian_extract<F>(family: &F, chain: &ChainSpec, fd_step: f64, probe_v: f64) -> Result<HamiltonianReport>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    if !(fd_step > 0.0) {
        return Err(GybeError::InvalidParams(format!("finite-difference step must be positive, got {fd_step}")));
    }
    let tau0 = transfer_matrix(family, chain, 0.0)?;
    let cond = tau0.condition_number();
    if !(cond < 1e8) {
        return Err(GybeError::Singular(format!("τ(0) has condition number {cond:e}")));
    }
    let defect = residual_norm(&tau0, &CMatrix::identity(tau0.rows()))?.max_abs;
    let diff = &transfer_matrix(family, chain, fd_step)? - &transfer_matrix(family, chain, -fd_step)?;
    let h = tau0.inverse()?.matmul(&diff.scale(re(0.5 / fd_step)))?;
    let comm = commutator_norm(&h, &transfer_matrix(family, chain, probe_v)?)?;
    Ok(HamiltonianReport { hamiltonian: h, tau0_identity_defect: defect, tau0_condition: cond, probe_v, commutator_with_tau: comm })
}

/// `tr τ(u)^{n_rows}` on a torus.
pub fn partition_function<F>(family: &F, chain: &ChainSpec, n_rows: u32, u: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<CMatrix> + ?Sized,
{
    if n_rows == 0 {
        return Err(GybeError::InvalidParams("need at least one row".into()));
    }
    Ok(transfer_matrix(family, chain, u)?.powi(n_rows)?.trace())
}

/// Least-squares `a ≈ λ·b + μ·I`; returns `(λ, μ, max-abs residual)`.
pub fn fit_modulo_scale_identity(a: &CMatrix, b: &CMatrix) -> Result<(Complex64, Complex64, f64)> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(GybeError::Dimension(format!("cannot compare {:?} with {:?}", a.shape(), b.shape())));
    }
    let n = a.rows() as f64;
    // remove traces, then fit the traceless parts
    let strip = |m: &CMatrix| &m.scale(ONE) - &CMatrix::identity(m.rows()).scale(m.trace() / n);
    let (a0, b0) = (strip(a), strip(b));
    let den: f64 = b0.data().iter().map(|x| x.norm_sqr()).sum();
    let lam = if den == 0.0 { ZERO } else { b0.data().iter().zip(a0.data()).map(|(x, y)| x.conj() * y).sum::<Complex64>() / den };
    let mu = (a.trace() - lam * b.trace()) / n;
    let fitted = &b.scale(lam) + &CMatrix::identity(a.rows()).scale(mu);
    Ok((lam, mu, residual_norm(a, &fitted)?.max_abs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormKind {
    XyzSets,
    H44,
    H2222,
}

fn default_eps() -> [[f64; 2]; 3] {
    [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    /// `J_x, J_y, J_z` for the composite-spin chain.
    #[serde(default)]
    pub couplings: [f64; 3],
    pub n_sites: usize,
    /// Spin-set sizes `𝒩ᵢ`; site `i` has dimension `2𝒩ᵢ`.
    #[serde(default)]
    pub set_sizes: Vec<usize>,
    #[serde(default)]
    pub periodic: bool,
    /// `ε` of the four-qubit bracket, as `[re, im]`.
    #[serde(default = "default_eps")]
    pub epsilon: [[f64; 2]; 3],
}

/// `S^a = Σ_k σ^a_k`, with `σ^a_k` acting on `span{|k⟩, |−k⟩}`.
pub fn composite_spin(set_size: usize, axis: usize) -> Result<CMatrix> {
    let lm = LabelMap::new(2 * set_size)?;
    let s = [pauli::sx(), pauli::sy(), pauli::sz()]
        .into_iter()
        .nth(axis)
        .ok_or_else(|| GybeError::InvalidParams(format!("axis {axis} out of range")))?;
    let mut m = CMatrix::zeros(2 * set_size, 2 * set_size);
    for k in 1..=set_size as i32 {
        let idx = [lm.index_of(k)?, lm.index_of(-k)?];
        for r in 0..2 {
            for c in 0..2 {
                m[(idx[r], idx[c])] += s[(r, c)];
            }
        }
    }
    Ok(m)
}

fn chain_sum(density: &CMatrix, dims: &SiteDims, periodic: bool) -> Result<CMatrix> {
    let n = dims.len();
    let mut h = CMatrix::zeros(dims.total(), dims.total());
    for k in 0..n - 1 {
        h = &h + &embed_operator(density, dims, k)?;
    }
    if periodic && n > 2 {
        // wrap the last bond by conjugating with a cyclic shift of the sites
        let shift = cyclic_shift(dims)?;
        let last = embed_operator(density, &SiteDims(dims.0[n - 1..].iter().chain(&dims.0[..n - 1]).cloned().collect()), 0)?;
        h = &h + &shift.dagger().matmul(&last)?.matmul(&shift)?;
    }
    Ok(h)
}

/// Permutation sending site order `(0..n)` to `(n−1, 0, …, n−2)`.
fn cyclic_shift(dims: &SiteDims) -> Result<CMatrix> {
    let n = dims.len();
    let rot: Vec<usize> = std::iter::once(n - 1).chain(0..n - 1).collect();
    let new_dims: Vec<usize> = rot.iter().map(|&i| dims.0[i]).collect();
    let total = dims.total();
    let mut m = CMatrix::zeros(total, total);
    for x in 0..total {
        let mut rem = x;
        let mut lab = vec![0; n];
        for i in (0..n).rev() {
            lab[i] = rem % dims.0[i];
            rem /= dims.0[i];
        }
        let mut y = 0;
        for (pos, &i) in rot.iter().enumerate() {
            y = y * new_dims[pos] + lab[i];
        }
        m[(y, x)] = ONE;
    }
    Ok(m)
}

pub fn closed_form_hamiltonian(spec: &HamiltonianSpec, kind: ClosedFormKind) -> Result<CMatrix> {
    if spec.n_sites < 2 {
        return Err(GybeError::InvalidParams("need at least two sites".into()));
    }
    match kind {
        ClosedFormKind::XyzSets => {
            let sizes = if spec.set_sizes.is_empty() { vec![1; spec.n_sites] } else { spec.set_sizes.clone() };
            if sizes.len() != spec.n_sites {
                return Err(GybeError::InvalidParams(format!("{} set sizes for {} sites", sizes.len(), spec.n_sites)));
            }
            let dims = SiteDims::new(sizes.iter().map(|s| 2 * s).collect())?;
            let total = dims.total();
            let mut h = CMatrix::zeros(total, total);
            let bonds: Vec<(usize, usize)> = (0..spec.n_sites - 1)
                .map(|k| (k, k + 1))
                .chain((spec.periodic && spec.n_sites > 2).then_some((spec.n_sites - 1, 0)))
                .collect();
            for (i, j) in bonds {
                for a in 0..3 {
                    let ops: Vec<CMatrix> = (0..spec.n_sites)
                        .map(|s| if s == i || s == j { composite_spin(sizes[s], a) } else { Ok(CMatrix::identity(dims.0[s])) })
                        .collect::<Result<_>>()?;
                    let refs: Vec<&CMatrix> = ops.iter().collect();
                    h = &h + &kron_all(&refs).scale(re(spec.couplings[a]));
                }
            }
            Ok(h)
        }
        ClosedFormKind::H44 | ClosedFormKind::H2222 => {
            let density = match kind {
                ClosedFormKind::H44 => h44_density(),
                _ => r2222_bracket(spec.epsilon.map(|[a, b]| Complex64::new(a, b))),
            };
            chain_sum(&density, &SiteDims::uniform(4, spec.n_sites), spec.periodic)
        }
    }
}

/// `Π_k (σz⊗σz)_k` on `n` four-dimensional sites.
pub fn zz_charge(n_sites: usize) -> CMatrix {
    let zz = kron(&pauli::sz(), &pauli::sz());
    let factors: Vec<&CMatrix> = std::iter::repeat_n(&zz, n_sites).collect();
    kron_all(&factors)
}
