//! Graded and colored permutation operators, their Yang–Baxterization, the
//! 16×16 four-color family and brute-force parity/phase searches.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GybeError, Result};
use crate::parallel;
use crate::tensor::{c, kron, pauli, re, residual_norm, CMatrix, Residual, I, ONE, ZERO};
use crate::verify::{draw_pairs, spectral_residual, EquationForm, GybeShape};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermSpec {
    pub n: usize,
    /// Color map: state `i` is recolored to `tau[i]`.
    pub tau: Vec<usize>,
}

impl PermSpec {
    pub fn new(tau: Vec<usize>) -> Result<Self> {
        let n = tau.len();
        let mut seen = vec![false; n];
        for &t in &tau {
            if t >= n || seen[t] {
                return Err(GybeError::InvalidParams(format!("color map {tau:?} is not a bijection")));
            }
            seen[t] = true;
        }
        if n == 0 {
            return Err(GybeError::Dimension("empty color map".into()));
        }
        Ok(Self { n, tau })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, tau: (0..n).collect() }
    }

    pub fn is_involution(&self) -> bool {
        (0..self.n).all(|i| self.tau[self.tau[i]] == i)
    }
}

/// The four full color maps on four states: `e, a, b, c`.
pub fn four_colors() -> [PermSpec; 4] {
    [
        PermSpec::identity(4),
        PermSpec { n: 4, tau: vec![1, 0, 3, 2] },
        PermSpec { n: 4, tau: vec![2, 3, 0, 1] },
        PermSpec { n: 4, tau: vec![3, 2, 1, 0] },
    ]
}

/// Parities `p`; the entry phase is `exp(iπp)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParityAssignment {
    /// One `(i₁, j₁)` table shared by every color.
    Shared { table: Vec<Vec<f64>> },
    /// One `(i₁, j₁)` table per color.
    PerColor { tables: Vec<Vec<Vec<f64>>> },
    /// Full `(i₁, i₂, j₁, j₂)` dependence per color, flattened row-major.
    Full { n: usize, tables: Vec<Vec<f64>> },
}

impl ParityAssignment {
    pub fn trivial(n: usize) -> Self {
        ParityAssignment::Shared { table: vec![vec![0.0; n]; n] }
    }

    pub fn parity(&self, e: usize, i1: usize, i2: usize, j1: usize, j2: usize) -> Result<f64> {
        let miss = || GybeError::InvalidParams(format!("no parity for color {e}"));
        match self {
            ParityAssignment::Shared { table } => Ok(table[i1][j1]),
            ParityAssignment::PerColor { tables } => Ok(tables.get(e).ok_or_else(miss)?[i1][j1]),
            ParityAssignment::Full { n, tables } => {
                Ok(tables.get(e).ok_or_else(miss)?[((i1 * n + i2) * n + j1) * n + j2])
            }
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(GybeError::InvalidParams(m));
        let square = |t: &Vec<Vec<f64>>| t.len() == n && t.iter().all(|r| r.len() == n);
        match self {
            ParityAssignment::Shared { table } => {
                if !square(table) {
                    return bad(format!("parity table must be {n}x{n}"));
                }
                if (0..n).any(|i| table[i][i] != 0.0) {
                    return bad("diagonal parities must vanish".into());
                }
            }
            ParityAssignment::PerColor { tables } => {
                for t in tables {
                    if !square(t) {
                        return bad(format!("parity table must be {n}x{n}"));
                    }
                    if (0..n).any(|i| t[i][i] != 0.0) {
                        return bad("diagonal parities must vanish".into());
                    }
                }
            }
            ParityAssignment::Full { n: m, tables } => {
                if *m != n || tables.iter().any(|t| t.len() != n.pow(4)) {
                    return bad(format!("full parity tables must have {} entries", n.pow(4)));
                }
                for t in tables {
                    for i1 in 0..n {
                        for i2 in 0..n {
                            if t[((i1 * n + i2) * n + i1) * n + i2] != 0.0 {
                                return bad("diagonal parities must vanish".into());
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn phase(p: f64) -> Complex64 {
    // exact values for the common cases keep the integer-parity matrices real
    let r = p.rem_euclid(2.0);
    match r {
        x if x == 0.0 => ONE,
        x if x == 0.5 => I,
        x if x == 1.0 => -ONE,
        x if x == 1.5 => -I,
        _ => Complex64::new(0.0, std::f64::consts::PI * p).exp(),
    }
}

/// Entry at `(out = (j₁, j₂), in = (i₁, i₂))` is
/// `phase(p_e)·[i₁ = τ(j₂)]·[i₂ = τ(j₁)]`.
pub fn build_graded_perm(spec: &PermSpec, parity: &ParityAssignment, e: usize) -> Result<CMatrix> {
    let n = spec.n;
    parity.check(n)?;
    let mut m = CMatrix::zeros(n * n, n * n);
    for j1 in 0..n {
        for j2 in 0..n {
            let (i1, i2) = (spec.tau[j2], spec.tau[j1]);
            m[(j1 * n + j2, i1 * n + i2)] = phase(parity.parity(e, i1, i2, j1, j2)?);
        }
    }
    Ok(m)
}

/// `½(e^{αu}P + e^{−αu}P†)`.
pub fn yang_baxterize(p: &CMatrix, alpha: f64, u: f64) -> Result<CMatrix> {
    if !p.is_square() {
        return Err(GybeError::Dimension(format!("expected a square operator, got {:?}", p.shape())));
    }
    let x = alpha * u;
    Ok(&p.scale(re(0.5 * x.exp())) + &p.dagger().scale(re(0.5 * (-x).exp())))
}

/// `Σ_e ½(e^{α_e u}P_e + e^{−α_e u}P_e†)`; term `e` uses color `e` of the parity.
pub fn build_perm_superposition(terms: &[(PermSpec, f64)], parity: &ParityAssignment, u: f64) -> Result<CMatrix> {
    let n = terms.first().map(|t| t.0.n).ok_or_else(|| GybeError::InvalidParams("no terms".into()))?;
    let mut acc = CMatrix::zeros(n * n, n * n);
    for (e, (spec, alpha)) in terms.iter().enumerate() {
        if spec.n != n {
            return Err(GybeError::Dimension(format!("mixed dimensions {n} and {}", spec.n)));
        }
        acc = &acc + &yang_baxterize(&build_graded_perm(spec, parity, e)?, *alpha, u)?;
    }
    Ok(acc)
}

/// Parity of the two-state graded permutations: `p[0][1] = 1`.
pub fn n2_parity() -> ParityAssignment {
    ParityAssignment::Shared { table: vec![vec![0.0, 1.0], vec![0.0, 0.0]] }
}

pub fn pg2() -> CMatrix {
    build_graded_perm(&PermSpec::identity(2), &n2_parity(), 0).expect("static parity")
}

pub fn pg2_tau() -> CMatrix {
    build_graded_perm(&PermSpec { n: 2, tau: vec![1, 0] }, &n2_parity(), 0).expect("static parity")
}

/// `Ř⁰(u) + Ř^τ(u′)` on two states.
pub fn two_parameter_r(u: f64, u_prime: f64) -> CMatrix {
    &yang_baxterize(&pg2(), 1.0, u).expect("square") + &yang_baxterize(&pg2_tau(), 1.0, u_prime).expect("square")
}

/// `Ř₁₂(u−v; u′−v′)Ř₂₃(u; u′)Ř₁₂(v; v′) − Ř₂₃(v; v′)Ř₁₂(u; u′)Ř₂₃(u−v; u′−v′)`.
pub fn two_parameter_residual((u, up): (f64, f64), (v, vp): (f64, f64)) -> Result<Residual> {
    let id = pauli::id2();
    let l = |m: CMatrix| kron(&m, &id);
    let r = |m: CMatrix| kron(&id, &m);
    let lhs = l(two_parameter_r(u - v, up - vp)).matmul(&r(two_parameter_r(u, up)))?.matmul(&l(two_parameter_r(v, vp)))?;
    let rhs = r(two_parameter_r(v, vp)).matmul(&l(two_parameter_r(u, up)))?.matmul(&r(two_parameter_r(u - v, up - vp)))?;
    residual_norm(&lhs, &rhs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidRelation {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub residual: f64,
}

const BRAID_WORDS: [(&str, &str, &str); 5] = [
    ("g-g", "g12 g23 g12", "g23 g12 g23"),
    ("t-t", "t12 t23 t12", "t23 t12 t23"),
    ("g-t-g", "g12 t23 g12", "t23 g12 t23"),
    ("t-g-t", "t12 g23 t12", "g23 t12 g23"),
    ("t-t-g", "t12 t23 g12", "g23 t12 t23"),
];

/// The two mixed relations exactly as usually printed, with the same outer
/// letters on both sides. They do not hold; kept for the record.
pub const LITERAL_MIXED_WORDS: [(&str, &str, &str); 2] =
    [("g-t-g literal", "g12 t23 g12", "g23 t12 g23"), ("t-g-t literal", "t12 g23 t12", "t23 g12 t23")];

/// Evaluates a word like `"g12 t23 g12"` on three two-state sites.
pub fn eval_braid_word(word: &str) -> Result<CMatrix> {
    let id = pauli::id2();
    let mut acc = CMatrix::identity(8);
    for tok in word.split_whitespace() {
        let (letter, pos) = tok.split_at(1);
        let base = match letter {
            "g" => pg2(),
            "t" => pg2_tau(),
            _ => return Err(GybeError::InvalidParams(format!("unknown letter in {tok}"))),
        };
        let op = match pos {
            "12" => kron(&base, &id),
            "23" => kron(&id, &base),
            _ => return Err(GybeError::InvalidParams(format!("unknown position in {tok}"))),
        };
        acc = acc.matmul(&op)?;
    }
    Ok(acc)
}

fn eval_relations(words: &[(&str, &str, &str)]) -> Result<Vec<BraidRelation>> {
    words
        .iter()
        .map(|(name, l, r)| {
            let res = residual_norm(&eval_braid_word(l)?, &eval_braid_word(r)?)?;
            Ok(BraidRelation { name: name.to_string(), lhs: l.to_string(), rhs: r.to_string(), residual: res.max_abs })
        })
        .collect()
}

/// Five mixed braid relations between `P_g` and `P_g^τ`.
pub fn braid_relations_n2() -> Result<Vec<BraidRelation>> {
    eval_relations(&BRAID_WORDS)
}

pub fn literal_mixed_relations_n2() -> Result<Vec<BraidRelation>> {
    eval_relations(&LITERAL_MIXED_WORDS)
}

/// Free bits `(b₁₂, b₂₃, b₁₃)` of a symmetric four-state parity table
/// (0-based, upper triangle `bᵢⱼ = p[i][j]`, `i < j`). The rest follow from
/// `b₀₃ = b₁₂+1`, `b₀₁ = b₂₃+1`, `b₀₂ = b₁₃` and `p[j][i] = p[i][j]+1`.
pub fn parity_from_bits(b12: u8, b23: u8, b13: u8) -> ParityAssignment {
    let mut t = vec![vec![0.0; 4]; 4];
    let upper = [
        (0, 1, (b23 + 1) % 2),
        (0, 2, b13 % 2),
        (0, 3, (b12 + 1) % 2),
        (1, 2, b12 % 2),
        (1, 3, b13 % 2),
        (2, 3, b23 % 2),
    ];
    for (i, j, b) in upper {
        t[i][j] = b as f64;
        t[j][i] = ((b + 1) % 2) as f64;
    }
    ParityAssignment::Shared { table: t }
}

/// Upper-triangle bits `(b₀₁, b₀₂, b₀₃, b₁₂, b₁₃, b₂₃)` of a 4×4 table.
pub fn upper_bits(table: &[Vec<f64>]) -> [u8; 6] {
    let b = |i: usize, j: usize| table[i][j].rem_euclid(2.0) as u8;
    [b(0, 1), b(0, 2), b(0, 3), b(1, 2), b(1, 3), b(2, 3)]
}

/// Antisymmetry, zero diagonal and the three linking relations.
pub fn check_symmetric_constraints(table: &[Vec<f64>]) -> bool {
    if table.len() != 4 || table.iter().any(|r| r.len() != 4) {
        return false;
    }
    let m = |x: f64| x.rem_euclid(2.0);
    let anti = (0..4).all(|i| table[i][i] == 0.0 && (0..4).all(|j| i == j || m(table[j][i]) == m(table[i][j] + 1.0)));
    anti && m(table[0][3]) == m(table[1][2] + 1.0) && m(table[0][1]) == m(table[2][3] + 1.0) && m(table[0][2]) == m(table[1][3])
}

/// The explicit-display parity (all signs `ε = +1`).
pub fn display_parity() -> ParityAssignment {
    parity_from_bits(1, 0, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

/// Commuting `M̄` operators.
pub fn m_bar(a: Axis) -> CMatrix {
    let v: [f64; 16] = match a {
        Axis::X => [0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.],
        Axis::Y => [0., 0., 1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., 1., 0., 0.],
        Axis::Z => [0., 0., 0., 1., 0., 0., 1., 0., 0., 1., 0., 0., 1., 0., 0., 0.],
    };
    CMatrix::from_real(4, 4, &v).expect("4x4")
}

/// `M̆` operators (`M̆² = −I`).
pub fn m_breve(a: Axis) -> CMatrix {
    let v: [f64; 16] = match a {
        Axis::X => [0., 1., 0., 0., -1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.],
        Axis::Y => [0., 0., 1., 0., 0., 0., 0., 1., -1., 0., 0., 0., 0., -1., 0., 0.],
        Axis::Z => [0., 0., 0., -1., 0., 0., 1., 0., 0., -1., 0., 0., 1., 0., 0., 0.],
    };
    CMatrix::from_real(4, 4, &v).expect("4x4")
}

/// `Σ_k ε_k M̆_k ⊗ M̄_k`.
pub fn r44_generator(eps: [Complex64; 3]) -> CMatrix {
    AXES.iter().zip(eps).fold(CMatrix::zeros(16, 16), |acc, (&a, e)| &acc + &kron(&m_breve(a), &m_bar(a)).scale(e))
}

/// `cosh(u)·I + sinh(u)·Σ_k ε_k M̆_k ⊗ M̄_k`.
pub fn r44(eps: [Complex64; 3], u: f64) -> CMatrix {
    &CMatrix::identity(16).scale(re(u.cosh())) + &r44_generator(eps).scale(re(u.sinh()))
}

/// Four-qubit density `σzσyIσx + σyIσxI − σxσyσxσx` of the all-plus family.
pub fn h44_density() -> CMatrix {
    &(&pauli::string("zyIx") + &pauli::string("yIxI")) - &pauli::string("xyxx")
}

/// Bracketed four-qubit generator `s_x·iσzσyIσx + s_y·σyIσxI + s_z·σxσyσxσx`
/// with `(s_x, s_y, s_z) = (ε_x, iε_y, −iε_z)`.
pub fn r2222_bracket(eps: [Complex64; 3]) -> CMatrix {
    let s = [eps[0], I * eps[1], -I * eps[2]];
    &(&pauli::string("zyIx").scale(I * s[0]) + &pauli::string("yIxI").scale(s[1])) + &pauli::string("xyxx").scale(s[2])
}

/// Least-squares `λ` in `a ≈ λ·b` and the remaining max-abs residual.
pub fn fit_scalar(a: &CMatrix, b: &CMatrix) -> Result<(Complex64, f64)> {
    let num: Complex64 = b.data().iter().zip(a.data()).map(|(x, y)| x.conj() * y).sum();
    let den: f64 = b.data().iter().map(|x| x.norm_sqr()).sum();
    if den == 0.0 {
        return Err(GybeError::Singular("cannot fit against a zero operator".into()));
    }
    let lam = num / den;
    Ok((lam, residual_norm(a, &b.scale(lam))?.max_abs))
}

/// Fits `ε` with `d ≈ Σ ε_k M̆_k⊗M̄_k`; returns the coefficients and residual.
pub fn fit_epsilon(d: &CMatrix) -> Result<([Complex64; 3], f64)> {
    let mut eps = [ZERO; 3];
    for (k, &a) in AXES.iter().enumerate() {
        let basis = kron(&m_breve(a), &m_bar(a));
        let num: Complex64 = basis.data().iter().zip(d.data()).map(|(x, y)| x.conj() * y).sum();
        eps[k] = num / 16.0;
    }
    Ok((eps, residual_norm(d, &r44_generator(eps))?.max_abs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliReport {
    /// `(check name, max-abs residual)`.
    pub checks: Vec<(String, f64)>,
    /// Constant `J` with `dŘ₄₄/du|₀ = J·density`.
    pub coupling: [f64; 2],
}

impl PauliReport {
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.1).fold(0.0, f64::max)
    }
}

fn derivative_at_zero(f: impl Fn(f64) -> CMatrix, h: f64) -> CMatrix {
    (&f(h) - &f(-h)).scale(re(0.5 / h))
}

pub fn pauli_identities_check() -> Result<PauliReport> {
    let s = pauli::string;
    let mut checks = vec![];
    let mut push = |name: &str, r: f64| checks.push((name.to_string(), r));
    let ident = [
        ("Mbar_x = I⊗σx", m_bar(Axis::X), s("Ix")),
        ("Mbar_y = σx⊗I", m_bar(Axis::Y), s("xI")),
        ("Mbar_z = σx⊗σx", m_bar(Axis::Z), s("xx")),
        ("Mbreve_x = iσz⊗σy", m_breve(Axis::X), s("zy").scale(I)),
        ("Mbreve_y = iσy⊗I", m_breve(Axis::Y), s("yI").scale(I)),
        ("Mbreve_z = −iσx⊗σy", m_breve(Axis::Z), s("xy").scale(-I)),
    ];
    for (name, a, b) in &ident {
        push(name, residual_norm(a, b)?.max_abs);
    }
    for (a, b) in [(Axis::X, Axis::Y), (Axis::Y, Axis::Z), (Axis::X, Axis::Z)] {
        push(&format!("[Mbar_{a:?}, Mbar_{b:?}] = 0"), m_bar(a).commutator(&m_bar(b))?.max_abs());
    }
    // {iM̆} close like sl₂: each commutator is a multiple of the third one.
    for (a, b, cc) in [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)] {
        let com = m_breve(a).scale(I).commutator(&m_breve(b).scale(I))?;
        let (lam, res) = fit_scalar(&com, &m_breve(cc).scale(I))?;
        push(&format!("[iMbreve_{a:?}, iMbreve_{b:?}] ∝ iMbreve_{cc:?}"), if lam.norm() < 1e-12 { 1.0 } else { res });
    }
    let ones = [ONE; 3];
    let d = derivative_at_zero(|u| r44(ones, u), 1e-6);
    push("dR44/du|0 = Σ ε Mbreve⊗Mbar", residual_norm(&d, &r44_generator(ones))?.max_abs);
    let (j, res) = fit_scalar(&d, &h44_density())?;
    push("dR44/du|0 = J·density", res);
    let frac = [ONE, I, I];
    let d2 = derivative_at_zero(|u| r44(frac, u), 1e-6);
    push("dR2222/du|0 = bracket", residual_norm(&d2, &r2222_bracket(frac))?.max_abs);
    Ok(PauliReport { checks, coupling: [j.re, j.im] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    SymmetricConstrained,
    RandomUnconstrained,
    FractionalPhases,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchTarget {
    /// Four qubits, shifted by one qubit.
    Gybe241,
    /// Four qubits shifted by two, i.e. YBE on `V₄⊗V₄`.
    Gybe242,
    Gybe243,
}

impl SearchTarget {
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
        match t.as_str() {
            "241" => Ok(SearchTarget::Gybe241),
            "242" | "421" => Ok(SearchTarget::Gybe242),
            "243" => Ok(SearchTarget::Gybe243),
            _ => Err(GybeError::UnknownShape(format!("{s} (search targets: 2,4,1 | 2,4,2 | 2,4,3)"))),
        }
    }

    pub fn shape(self) -> GybeShape {
        let p = match self {
            SearchTarget::Gybe241 => 1,
            SearchTarget::Gybe242 => 2,
            SearchTarget::Gybe243 => 3,
        };
        GybeShape::homogeneous(2, 4, p, EquationForm::SpectralDifference).expect("static shape")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub target: SearchTarget,
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
    /// Rates `α_e` for the superposition modes.
    pub alphas: [f64; 4],
    /// Number of `(u, v)` draws per candidate.
    pub samples: usize,
    /// Random mode: draw full `(i₁,i₂,j₁,j₂)` tables instead of `(i₁,j₁)`.
    pub full_dependence: bool,
}

impl SearchConfig {
    pub fn new(mode: SearchMode, target: SearchTarget, budget: usize, seed: u64) -> Self {
        Self { mode, target, budget, seed, tol: 1e-10, alphas: [1.0; 4], samples: 10, full_dependence: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Assignment {
    /// Upper-triangle bits `(b₀₁, b₀₂, b₀₃, b₁₂, b₁₃, b₂₃)` with the fitted
    /// sign vector when the matrix has the `Σ ε M̆⊗M̄` form.
    Bits { bits: [u8; 6], epsilon: Option<[i8; 3]> },
    /// Parities of `(ε_x, ε_y, ε_z) = exp(iπp)`.
    Phases { parities: [f64; 3] },
    Tables { parity: ParityAssignment },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub key: String,
    pub assignment: Assignment,
    pub target: String,
    pub max_residual: f64,
    pub samples: usize,
}

fn max_over_draws<F>(f: &F, shape: &GybeShape, draws: &[[f64; 2]]) -> Result<f64>
where
    F: Fn(f64) -> Result<CMatrix> + Sync,
{
    let mut worst = 0.0f64;
    for &[u, v] in draws {
        worst = worst.max(spectral_residual(f, shape, u, v)?.max_abs);
        if !worst.is_finite() {
            break;
        }
    }
    Ok(worst)
}

fn superposition(parity: &ParityAssignment, alphas: [f64; 4]) -> impl Fn(f64) -> Result<CMatrix> + Sync + '_ {
    let colors = four_colors();
    move |u| {
        let terms: Vec<(PermSpec, f64)> = colors.iter().cloned().zip(alphas).collect();
        build_perm_superposition(&terms, parity, u)
    }
}

struct Candidate {
    key: String,
    assignment: Assignment,
    family: Box<dyn Fn(f64) -> Result<CMatrix> + Sync + Send>,
}

fn symmetric_candidates(cfg: &SearchConfig) -> Result<Vec<Candidate>> {
    let mut out = vec![];
    for idx in 0..8u8 {
        let (b12, b23, b13) = (idx >> 2 & 1, idx >> 1 & 1, idx & 1);
        let parity = parity_from_bits(b12, b23, b13);
        let ParityAssignment::Shared { table } = &parity else { unreachable!() };
        let bits = upper_bits(table);
        let d = derivative_at_zero(|u| superposition(&parity, [1.0; 4])(u).expect("valid parity"), 1e-6);
        let (eps, res) = fit_epsilon(&d)?;
        let epsilon = (res < 1e-8).then(|| eps.map(|e| e.re.round() as i8));
        let alphas = cfg.alphas;
        let p2 = parity.clone();
        out.push(Candidate {
            key: bits.iter().map(|b| b.to_string()).collect(),
            assignment: Assignment::Bits { bits, epsilon },
            family: Box::new(move |u| superposition(&p2, alphas)(u)),
        });
    }
    Ok(out)
}

fn fractional_candidates() -> Vec<Candidate> {
    let ps = [0.0, 0.5, 1.0, 1.5];
    let mut out = vec![];
    for &px in &ps {
        for &py in &ps {
            for &pz in &ps {
                let eps = [phase(px), phase(py), phase(pz)];
                out.push(Candidate {
                    key: format!("{px:.1},{py:.1},{pz:.1}"),
                    assignment: Assignment::Phases { parities: [px, py, pz] },
                    family: Box::new(move |u| Ok(r44(eps, u))),
                });
            }
        }
    }
    out
}

fn random_candidates(cfg: &SearchConfig) -> Vec<Candidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = 4usize;
    (0..cfg.budget)
        .map(|k| {
            let parity = if cfg.full_dependence {
                let tables = (0..4)
                    .map(|_| {
                        let mut t: Vec<f64> = (0..n.pow(4)).map(|_| rng.random_range(0..2u8) as f64).collect();
                        for i1 in 0..n {
                            for i2 in 0..n {
                                t[((i1 * n + i2) * n + i1) * n + i2] = 0.0;
                            }
                        }
                        t
                    })
                    .collect();
                ParityAssignment::Full { n, tables }
            } else {
                let tables = (0..4)
                    .map(|_| {
                        (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { rng.random_range(0..2u8) as f64 }).collect()).collect()
                    })
                    .collect();
                ParityAssignment::PerColor { tables }
            };
            let alphas = cfg.alphas;
            let p2 = parity.clone();
            Candidate {
                key: format!("{k:06}"),
                assignment: Assignment::Tables { parity },
                family: Box::new(move |u| superposition(&p2, alphas)(u)),
            }
        })
        .collect()
}

/// Tests candidate assignments against the target and returns the passing
/// ones, sorted by key.
pub fn parity_search(cfg: &SearchConfig) -> Result<Vec<CatalogEntry>> {
    if cfg.budget == 0 {
        return Ok(vec![]);
    }
    let mut cands = match cfg.mode {
        SearchMode::SymmetricConstrained => symmetric_candidates(cfg)?,
        SearchMode::FractionalPhases => fractional_candidates(),
        SearchMode::RandomUnconstrained => random_candidates(cfg),
    };
    cands.truncate(cfg.budget);
    let shape = cfg.target.shape();
    let draws = draw_pairs(cfg.samples.max(1), cfg.seed);
    let evaluated: Vec<Result<Option<CatalogEntry>>> = parallel::install(|| {
        cands
            .into_par_iter()
            .map(|cand| {
                let worst = max_over_draws(&cand.family, &shape, &draws)?;
                Ok((worst <= cfg.tol).then(|| CatalogEntry {
                    key: cand.key,
                    assignment: cand.assignment,
                    target: format!("gybe {}", shape.label()),
                    max_residual: worst,
                    samples: draws.len(),
                }))
            })
            .collect()
    });
    let mut out = vec![];
    for e in evaluated {
        if let Some(entry) = e? {
            out.push(entry);
        }
    }
    out.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(out)
}

/// Sum of single-color terms with the display parity and rates `α_e`.
pub fn perm16(alphas: [f64; 4], u: f64) -> Result<CMatrix> {
    superposition(&display_parity(), alphas)(u)
}

/// Random complex entries on the nonzero pattern of `P + P†`.
pub fn random_on_pattern(p: &CMatrix, rng: &mut impl Rng) -> CMatrix {
    let pattern = &p.scale(ONE) + &p.dagger();
    let mut m = CMatrix::zeros(p.rows(), p.cols());
    for (r, col) in pattern.support(0.0) {
        m[(r, col)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    m
}
