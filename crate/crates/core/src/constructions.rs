//! Finite models of two infinite-rank torsion-free groups.
//!
//! `G` is the subgroup of `ℚ^(ω)` generated by `(1/p_i^∞) e_i` for `i ≥ 0`
//! and `(1/q_i^∞)(e_0 + e_i)` for `i ≥ 1`, where the `p_i` and `q_i`
//! partition the primes. The truncation `G_{N,K}` keeps `e_0, ..., e_N` and
//! replaces each `1/p^∞` by `1/p^K`. It is stored scaled by the common
//! denominator `D = ∏ p_i^K ∏ q_i^K`, as an integer lattice in Hermite form.
//!
//! Everything reported here is a statement about truncations: growth in `N`
//! and `K`, or constraint sets that do not depend on `K`. None of it proves
//! anything about `G` itself.
//!
//! `H = G^(n)` has `End(H) = M_n(ℤ)`, with `γ` acting as `γ ⊗ G` and
//! `H/φ(H) ≅ (ℤ^n/γℤ^n) ⊗ G`; [`tensor_endo_analyze`] reads the flags off
//! `γ`.

use std::fmt;
use std::thread;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integer_linear::{
    cokernel_structure, determinant, hermite_normal_form, in_row_lattice, kernel_basis, smith_normal_form,
    solve_integer, FgGroupCanon, IntMatrix,
};
use crate::prime::Prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("multiplication by 0: the quotient is the whole group")]
    DegenerateMultiplier,
    #[error("not a permutation of 1..{n}: {detail}")]
    BadPermutation { n: usize, detail: String },
    #[error("prime {0} is not used by the configuration")]
    UnknownPrime(Prime),
    #[error("expected a square matrix, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Truncation rank `N`, depth `K` and the prime partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinConfig {
    pub n: usize,
    pub k: u32,
    /// `p_0, ..., p_N`.
    pub p: Vec<Prime>,
    /// `q_1, ..., q_N`.
    pub q: Vec<Prime>,
}

impl InfinConfig {
    /// Ascending primes interleaved: `p_0 = 2, q_1 = 3, p_1 = 5, q_2 = 7, ...`.
    pub fn new(n: usize, k: u32) -> Result<Self, ConstructionError> {
        let primes = Prime::first(2 * n + 1);
        let p = primes.iter().step_by(2).cloned().collect();
        let q = primes.iter().skip(1).step_by(2).cloned().collect();
        Self::with_partition(n, k, p, q)
    }

    pub fn with_partition(n: usize, k: u32, p: Vec<Prime>, q: Vec<Prime>) -> Result<Self, ConstructionError> {
        let bad = |m: String| Err(ConstructionError::InvalidConfig(m));
        if n == 0 || k == 0 {
            return bad(format!("need N >= 1 and K >= 1, got N={n}, K={k}"));
        }
        if p.len() != n + 1 || q.len() != n {
            return bad(format!("need {} p-primes and {n} q-primes, got {} and {}", n + 1, p.len(), q.len()));
        }
        let mut all: Vec<&Prime> = p.iter().chain(&q).collect();
        all.sort();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return bad("the p- and q-primes must be distinct".into());
        }
        Ok(InfinConfig { n, k, p, q })
    }

    pub fn with_n(&self, n: usize) -> Result<Self, ConstructionError> {
        InfinConfig::new(n, self.k)
    }

    fn uses(&self, p: &Prime) -> bool {
        self.p.contains(p) || self.q.contains(p)
    }
}

/// A vector of `ℚ^d` as integer numerators over a common denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QVector {
    pub num: Vec<BigInt>,
    pub den: BigInt,
}

impl QVector {
    pub fn new(num: Vec<BigInt>, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        QVector { num, den }
    }

    pub fn integral(num: Vec<BigInt>) -> Self {
        QVector { num, den: BigInt::one() }
    }

    /// `(1/d) e_i` in dimension `dim`.
    pub fn unit(dim: usize, i: usize, d: BigInt) -> Self {
        let mut num = vec![BigInt::zero(); dim];
        num[i] = BigInt::one();
        QVector::new(num, d)
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .num
            .iter()
            .map(|a| {
                let g = a.gcd(&self.den);
                let (n, mut d) = (a / &g, &self.den / &g);
                let n = if d.is_negative() { -n } else { n };
                d = d.abs();
                if d.is_one() || n.is_zero() {
                    n.to_string()
                } else {
                    format!("{n}/{d}")
                }
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `G_{N,K}` scaled by `scale`: `scale · G_{N,K}` is the row lattice of
/// `basis`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedLattice {
    pub config: InfinConfig,
    /// `σ(i)` for `i = 1..N`: the `q`-generator of `e_0 + e_i` is `q_{σ(i)}`.
    pub sigma: Vec<usize>,
    pub ambient_dim: usize,
    pub scale: BigInt,
    /// Scaled generators, one per row.
    pub generators: IntMatrix,
    pub basis: IntMatrix,
}

impl TruncatedLattice {
    /// Whether `x ∈ G_{N,K}`.
    pub fn contains(&self, x: &QVector) -> bool {
        let Some(v) = self.scaled(x) else { return false };
        in_row_lattice(&self.basis, &v)
    }

    /// `scale · x` when it is integral.
    fn scaled(&self, x: &QVector) -> Option<Vec<BigInt>> {
        assert_eq!(x.num.len(), self.ambient_dim, "dimension mismatch");
        x.num
            .iter()
            .map(|a| {
                let (q, r) = (a * &self.scale).div_rem(&x.den);
                r.is_zero().then_some(q)
            })
            .collect()
    }

    /// Coordinates of `x` in the basis rows.
    fn coordinates(&self, x: &QVector) -> Option<Vec<BigInt>> {
        let v = self.scaled(x)?;
        solve_integer(&self.basis.transpose(), &v)
    }

    /// The unscaled generators.
    pub fn generator_vectors(&self) -> Vec<QVector> {
        self.generators.to_rows().into_iter().map(|r| QVector::new(r, self.scale.clone())).collect()
    }
}

fn check_permutation(n: usize, sigma: &[usize]) -> Result<(), ConstructionError> {
    let mut seen = vec![false; n + 1];
    let bad = |detail: String| Err(ConstructionError::BadPermutation { n, detail });
    if sigma.len() != n {
        return bad(format!("expected {n} entries, got {}", sigma.len()));
    }
    for &s in sigma {
        if s == 0 || s > n {
            return bad(format!("entry {s} out of range"));
        }
        if std::mem::replace(&mut seen[s], true) {
            return bad(format!("entry {s} repeated"));
        }
    }
    Ok(())
}

pub fn identity_permutation(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur = identity_permutation(n);
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { return out };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

pub fn build_truncation(cfg: &InfinConfig) -> TruncatedLattice {
    build_twisted(cfg, &identity_permutation(cfg.n)).expect("identity is a permutation")
}

/// `G_σ`: the generator over `e_0 + e_i` is divisible by `q_{σ(i)}`.
pub fn build_twisted(cfg: &InfinConfig, sigma: &[usize]) -> Result<TruncatedLattice, ConstructionError> {
    check_permutation(cfg.n, sigma)?;
    let dim = cfg.n + 1;
    let pk = |p: &Prime| BigInt::from(p.value().clone()).pow(cfg.k);
    let scale: BigInt = cfg.p.iter().chain(&cfg.q).map(pk).product();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, p) in cfg.p.iter().enumerate() {
        let mut r = vec![BigInt::zero(); dim];
        r[i] = &scale / pk(p);
        rows.push(r);
    }
    for i in 1..=cfg.n {
        let c = &scale / pk(&cfg.q[sigma[i - 1] - 1]);
        let mut r = vec![BigInt::zero(); dim];
        r[0] = c.clone();
        r[i] = c;
        rows.push(r);
    }
    let generators = IntMatrix::from_rows(&rows).expect("rectangular");
    let (h, _) = hermite_normal_form(&generators);
    let basis_rows: Vec<Vec<BigInt>> = h.to_rows().into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let basis = IntMatrix::from_rows(&basis_rows).expect("rectangular");
    Ok(TruncatedLattice { config: cfg.clone(), sigma: sigma.to_vec(), ambient_dim: dim, scale, generators, basis })
}

/// `G_{N,K} / n G_{N,K}`.
pub fn quotient_growth(cfg: &InfinConfig, n: i64) -> Result<FgGroupCanon, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::DegenerateMultiplier);
    }
    let lattice = build_truncation(cfg);
    // n·(basis row j) in basis coordinates, one column each
    let cols: Vec<Vec<BigInt>> = lattice
        .basis
        .to_rows()
        .into_iter()
        .map(|row| {
            let v = QVector::new(row.iter().map(|x| x * n).collect(), lattice.scale.clone());
            lattice.coordinates(&v).expect("n·G lies in G")
        })
        .collect();
    Ok(cokernel_structure(&IntMatrix::from_columns(lattice.ambient_dim, &cols)))
}

/// `|G_{N,K} / n G_{N,K}|` for several `N`, computed concurrently.
pub fn quotient_orders(cfg: &InfinConfig, n: i64, ns: &[usize]) -> Result<Vec<(usize, BigInt)>, ConstructionError> {
    let configs: Vec<InfinConfig> = ns.iter().map(|&m| cfg.with_n(m)).collect::<Result<_, _>>()?;
    thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || quotient_growth(c, n))).collect();
        ns.iter()
            .zip(handles)
            .map(|(&m, h)| {
                let q = h.join().expect("worker panicked")?;
                Ok((m, BigInt::from(q.order().expect("finite quotient"))))
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionSet {
    /// Exactly the maps `x ↦ t x` with `t ∈ ℤ`.
    AllIntegers,
    OnlyZero,
    /// Anything else, described.
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierSolution {
    pub solution_set: SolutionSet,
    /// The derived conditions on the multipliers `c_0, ..., c_N`.
    pub constraints: Vec<String>,
    /// Integer rows `A` with `A c = 0`.
    pub system: IntMatrix,
    /// Scope of the result.
    pub scope: &'static str,
}

const MULTIPLIER_SCOPE: &str = "maps diagonal on the lines Q e_i; the full endomorphism ring of the truncation is not computed";

impl MultiplierSolution {
    /// Re-derives the solution set from the stored system.
    pub fn verify(&self) -> bool {
        let k = kernel_basis(&self.system);
        match &self.solution_set {
            SolutionSet::OnlyZero => k.cols() == 0,
            SolutionSet::AllIntegers => {
                k.cols() == 1 && {
                    let c = k.column(0);
                    c.iter().all(|x| x == &c[0]) && c[0].abs().is_one()
                }
            }
            SolutionSet::Other(_) => true,
        }
    }
}

/// Homomorphisms `G → G_σ` of the form `e_i ↦ c_i e_i`.
pub fn multiplier_constraints(cfg: &InfinConfig, sigma: &[usize]) -> Result<MultiplierSolution, ConstructionError> {
    multiplier_between(cfg, &identity_permutation(cfg.n), sigma)
}

/// Homomorphisms `G_σ → G_τ` of the form `e_i ↦ c_i e_i`.
///
/// `q_j`-divisibility is preserved, so the `q_j`-line `e_0 + e_a` of the
/// source (`σ(a) = j`) must land in the `q_j`-line `e_0 + e_b` of the target
/// (`τ(b) = j`). For `a = b` that forces `c_0 = c_a`; otherwise `c_0 = c_a = 0`.
/// The surviving multiples `t (1, ..., 1)` must map each generator into the
/// target lattice.
pub fn multiplier_between(
    cfg: &InfinConfig,
    sigma: &[usize],
    tau: &[usize],
) -> Result<MultiplierSolution, ConstructionError> {
    check_permutation(cfg.n, sigma)?;
    check_permutation(cfg.n, tau)?;
    let dim = cfg.n + 1;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut constraints = Vec::new();
    for j in 1..=cfg.n {
        let a = sigma.iter().position(|&s| s == j).unwrap() + 1;
        let b = tau.iter().position(|&t| t == j).unwrap() + 1;
        let q = &cfg.q[j - 1];
        let mut row = vec![0i64; dim];
        if a == b {
            row[0] = 1;
            row[a] = -1;
            constraints.push(format!("c0 = c{a}: the {q}-divisible line e0+e{a} maps to itself"));
            rows.push(row);
        } else {
            row[a] = 1;
            rows.push(row.clone());
            row[a] = 0;
            row[0] = 1;
            rows.push(row);
            constraints.push(format!("c0 = c{a} = 0: the {q}-divisible line e0+e{a} must map into e0+e{b}"));
        }
    }
    let system = IntMatrix::from_rows(&rows).expect("rectangular");
    let kernel = kernel_basis(&system);
    let solution_set = if kernel.cols() == 0 {
        SolutionSet::OnlyZero
    } else if kernel.cols() == 1 && kernel.column(0).iter().all(|x| x == &kernel.column(0)[0]) {
        // c = t(1, ..., 1); find the t that keep every generator inside G_τ
        let source = build_twisted(cfg, sigma)?;
        let target = build_twisted(cfg, tau)?;
        let mut step = BigInt::zero();
        for g in source.generator_vectors() {
            let coords = target.coordinates(&g);
            // t g ∈ G_τ for t ∈ (1/d)ℤ, d the content of the coordinates
            let d = coords.map_or(BigInt::zero(), |c| c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)));
            step = step.gcd(&d);
            let range = if d.is_one() { "Z".to_string() } else { format!("(1/{d})Z") };
            constraints.push(format!("t·{g} lies in the target for t in {range}"));
        }
        if step.is_one() {
            SolutionSet::AllIntegers
        } else {
            SolutionSet::Other(format!("t(1, ..., 1) with t in (1/{step})Z"))
        }
    } else {
        SolutionSet::Other(format!("a solution lattice of rank {}", kernel.cols()))
    };
    Ok(MultiplierSolution { solution_set, constraints, system, scope: MULTIPLIER_SCOPE })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidReport {
    pub permutations: Vec<Vec<usize>>,
    /// `Hom(G_σ, G_τ)` for every ordered pair of indices.
    pub pairs: Vec<(usize, usize, SolutionSet)>,
    /// `Hom(G_σ, G_τ) = 0` for `σ ≠ τ` and `End(G_σ) = ℤ`.
    pub rigid: bool,
}

/// The multiplier analysis for a finite family `{G_σ}`: a block-diagonal
/// model of the endomorphisms of `⊕ G_σ`.
pub fn rigid(cfg: &InfinConfig, perms: &[Vec<usize>]) -> Result<RigidReport, ConstructionError> {
    let mut pairs = Vec::new();
    let mut ok = true;
    for (i, s) in perms.iter().enumerate() {
        for (j, t) in perms.iter().enumerate() {
            let sol = multiplier_between(cfg, s, t)?.solution_set;
            let want = if i == j { SolutionSet::AllIntegers } else { SolutionSet::OnlyZero };
            ok &= sol == want;
            pairs.push((i, j, sol));
        }
    }
    Ok(RigidReport { permutations: perms.to_vec(), pairs, rigid: ok })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirWitness {
    pub prime: Prime,
    pub injective: bool,
    pub quotient: FgGroupCanon,
    /// `(N, |G_N / p G_N|)` at `N`, `2N` and `4N`.
    pub growth: Vec<(usize, BigInt)>,
}

/// Multiplication by `p`: injective, with quotient growing in `N`.
pub fn fir_witness(cfg: &InfinConfig, p: &Prime) -> Result<FirWitness, ConstructionError> {
    if !cfg.uses(p) {
        return Err(ConstructionError::UnknownPrime(p.clone()));
    }
    let lattice = build_truncation(cfg);
    let pv = BigInt::from(p.value().clone());
    let scaled = IntMatrix::from_rows(
        &lattice.basis.to_rows().into_iter().map(|r| r.into_iter().map(|x| x * &pv).collect()).collect::<Vec<_>>(),
    )
    .expect("rectangular");
    // ×p acts on row vectors; its kernel is that of the transpose
    let injective = kernel_basis(&scaled.transpose()).cols() == 0;
    let small = p.to_u64().and_then(|x| i64::try_from(x).ok()).ok_or_else(|| ConstructionError::UnknownPrime(p.clone()))?;
    let quotient = quotient_growth(cfg, small)?;
    let growth = quotient_orders(cfg, small, &[cfg.n, 2 * cfg.n, 4 * cfg.n])?;
    Ok(FirWitness { prime: p.clone(), injective, quotient, growth })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorAnalysis {
    pub det: BigInt,
    /// `ℤ^n / γℤ^n`; `H/φ(H)` is this group tensored with `G`.
    pub gamma_cokernel: FgGroupCanon,
    pub injective: bool,
    pub surjective: bool,
    pub cokernel_finite: bool,
    pub cfh_consistent: bool,
}

/// `φ = γ ⊗ G` on `H = G^(n)`. A non-zero `B = ℤ^n/γℤ^n` gives an infinite
/// `B ⊗ G`, since `ℤ ⊗ G = G` and `ℤ(m) ⊗ G = G/mG` are infinite.
pub fn tensor_endo_analyze(gamma: &IntMatrix) -> Result<TensorAnalysis, ConstructionError> {
    if !gamma.is_square() {
        return Err(ConstructionError::NotSquare { rows: gamma.rows(), cols: gamma.cols() });
    }
    let det = determinant(gamma);
    let gamma_cokernel = cokernel_structure(gamma);
    // G is torsion-free, so ker(γ ⊗ G) = 0 iff ker γ = 0
    let injective = smith_normal_form(gamma).rank() == gamma.cols();
    let surjective = gamma_cokernel.is_trivial();
    let cokernel_finite = surjective;
    Ok(TensorAnalysis {
        det,
        gamma_cokernel,
        injective,
        surjective,
        cokernel_finite,
        cfh_consistent: !cokernel_finite || (injective && surjective),
    })
}
