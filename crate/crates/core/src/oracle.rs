//! Ground truth from the definitions.
//!
//! Finite groups are decided by running over every endomorphism. An
//! endomorphism is a tuple of generator images `(φ(g_1), ..., φ(g_k))` where
//! `φ(g_j)` is any element killed by `ord(g_j)`; tuples are visited in
//! lexicographic order of element indices. Small endomorphism rings are
//! enumerated directly, evaluating each map on every element. Larger ones
//! are aggregated by image subgroup: endomorphisms that generate the same
//! image are counted together and represented by the lexicographically
//! first tuple, and kernel orders come from `|G| / |φ(G)|`.
//!
//! Free groups `ℤ^r` are sampled: random integer matrices with small entries
//! plus the zero and identity matrices.

use std::collections::BTreeMap;
use std::fmt;
use std::thread;

use fixedbitset::FixedBitSet;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{classify_full, Classification, Options, Outcome, Property, RuleId};
use crate::group_model::{GroupExpr, NormalForm};
use crate::integer_linear::{
    cokernel_structure, determinant, endo_kernel_cokernel, kernel_basis, EndoAnalysis, EndoMap, FgGroupCanon,
    IntMatrix,
};
use crate::prime::Prime;

pub const DEFAULT_ORDER_BOUND: u64 = 256;
pub const DEFAULT_ENTRY_BOUND: i64 = 9;
pub const MAX_FREE_RANK: u64 = 6;
/// Largest free rank `cross_check` accepts.
pub const CROSS_CHECK_FREE_RANK: u64 = 4;
/// Endomorphism counts up to this are enumerated one by one.
pub const DIRECT_LIMIT: u128 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("group of order {order} exceeds the order bound {bound}")]
    TooLarge { order: BigUint, bound: u64 },
    #[error("{0} is outside the oracle fragment (finite groups and Z^r with r <= {CROSS_CHECK_FREE_RANK})")]
    OutOfFragment(String),
    #[error("free rank {0} exceeds the sampling limit {MAX_FREE_RANK}")]
    RankTooLarge(u64),
}

/// A finite abelian group `⊕ ℤ(p^e)^k` within the order bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteGroupSpec {
    canon: FgGroupCanon,
    order: u64,
}

impl FiniteGroupSpec {
    pub fn new(components: impl IntoIterator<Item = (Prime, u32, u64)>, bound: u64) -> Result<Self, OracleError> {
        let canon = FgGroupCanon::finite(components.into_iter().collect());
        let order = canon.order().expect("finite by construction");
        match order.to_u64() {
            Some(n) if n <= bound => Ok(FiniteGroupSpec { canon, order: n }),
            _ => Err(OracleError::TooLarge { order, bound }),
        }
    }

    pub fn trivial() -> Self {
        FiniteGroupSpec { canon: FgGroupCanon::trivial(), order: 1 }
    }

    pub fn from_normal_form(nf: &NormalForm, bound: u64) -> Result<Self, OracleError> {
        let parts = nf.finite_decomposition().ok_or_else(|| OracleError::OutOfFragment(nf.to_string()))?;
        Self::new(parts, bound)
    }

    pub fn canon(&self) -> &FgGroupCanon {
        &self.canon
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn generator_orders(&self) -> Vec<u64> {
        self.canon.generator_orders().iter().map(|o| o.to_u64().expect("bounded order")).collect()
    }

    /// `∏ p^min(e_i, e_j)` over ordered pairs of cyclic factors of the same
    /// prime.
    pub fn hom_count(&self) -> u128 {
        let gens: Vec<(&Prime, u32)> =
            self.canon.torsion.iter().flat_map(|(p, e, k)| std::iter::repeat_n((p, *e), *k as usize)).collect();
        let mut n: u128 = 1;
        for &(p, ei) in &gens {
            for &(q, ej) in &gens {
                if p == q {
                    n *= u128::from(p.to_u64().unwrap()).pow(ei.min(ej));
                }
            }
        }
        n
    }

    pub fn to_expr(&self) -> GroupExpr {
        GroupExpr::sum(
            self.canon
                .torsion
                .iter()
                .map(|(p, e, k)| (GroupExpr::Cyclic { p: p.clone(), n: *e }, crate::Mult::Finite(*k))),
        )
    }
}

impl fmt::Display for FiniteGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canon)
    }
}

/// Every abelian group of order exactly `n`, one per isomorphism class.
pub fn abelian_groups_of_order(n: u64) -> Vec<FiniteGroupSpec> {
    let big = BigUint::from(n);
    let factors: Vec<(BigUint, usize)> =
        if n <= 1 { Vec::new() } else { num_prime::nt_funcs::factorize(big).into_iter().collect() };
    let mut acc: Vec<Vec<(Prime, u32, u64)>> = vec![Vec::new()];
    for (p, e) in factors {
        let p = Prime::new(p).expect("prime factor");
        let mut next = Vec::new();
        for part in partitions(e as u32) {
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for x in part {
                *counts.entry(x).or_default() += 1;
            }
            for base in &acc {
                let mut g = base.clone();
                g.extend(counts.iter().map(|(&x, &k)| (p.clone(), x, k)));
                next.push(g);
            }
        }
        acc = next;
    }
    acc.into_iter().map(|c| FiniteGroupSpec::new(c, n).expect("order n")).collect()
}

/// All abelian groups of order at most `bound` whose order has prime
/// factors in `primes`.
pub fn abelian_groups_up_to(bound: u64, primes: &[u64]) -> Vec<FiniteGroupSpec> {
    (1..=bound)
        .filter(|&n| {
            let mut m = n;
            for &p in primes {
                while m % p == 0 {
                    m /= p;
                }
            }
            m == 1
        })
        .flat_map(abelian_groups_of_order)
        .collect()
}

fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for x in (1..=n.min(max)).rev() {
            cur.push(x);
            go(n - x, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Element arithmetic on `G` in mixed-radix coordinates, first generator
/// most significant.
#[derive(Debug, Clone)]
struct Arith {
    orders: Vec<u64>,
    strides: Vec<usize>,
    n: usize,
    add: Vec<u32>,
}

impl Arith {
    fn new(spec: &FiniteGroupSpec) -> Self {
        let orders = spec.generator_orders();
        let k = orders.len();
        let mut strides = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1] as usize;
        }
        let n = spec.order as usize;
        let mut a = Arith { orders, strides, n, add: Vec::new() };
        let digits: Vec<Vec<u64>> = (0..n).map(|x| a.digits(x)).collect();
        let mut add = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let idx: usize = (0..k)
                    .map(|i| ((digits[x][i] + digits[y][i]) % a.orders[i]) as usize * a.strides[i])
                    .sum();
                add[x * n + y] = idx as u32;
            }
        }
        a.add = add;
        a
    }

    fn digits(&self, x: usize) -> Vec<u64> {
        self.strides.iter().zip(&self.orders).map(|(s, o)| (x / s) as u64 % o).collect()
    }

    fn plus(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.n + y as usize]
    }

    fn times(&self, c: u64, x: u32) -> u32 {
        (0..c).fold(0, |acc, _| self.plus(acc, x))
    }

    /// The elements a generator of order `m` may map to.
    fn candidates(&self, m: u64) -> Vec<u32> {
        (0..self.n as u32).filter(|&x| self.times(m, x) == 0).collect()
    }

    /// `H + <x>`.
    fn extend(&self, h: &FixedBitSet, x: u32) -> FixedBitSet {
        if h.contains(x as usize) {
            return h.clone();
        }
        let mut out = h.clone();
        let mut m = x;
        while m != 0 {
            for y in h.ones() {
                out.insert(self.plus(y as u32, m) as usize);
            }
            m = self.plus(m, x);
        }
        out
    }

    /// `φ` on every element, from the generator images.
    fn evaluate(&self, images: &[u32]) -> Vec<u32> {
        let k = self.orders.len();
        let mut phi = vec![0u32; self.n];
        for x in 1..self.n {
            let j = (0..k).rev().find(|&j| !((x / self.strides[j]) as u64).is_multiple_of(self.orders[j])).unwrap();
            phi[x] = self.plus(phi[x - self.strides[j]], images[j]);
        }
        phi
    }

    fn to_endo(&self, spec: &FiniteGroupSpec, images: &[u32]) -> EndoMap {
        let k = self.orders.len();
        let mut m = IntMatrix::zeros(k, k);
        for (j, &img) in images.iter().enumerate() {
            for (i, d) in self.digits(img as usize).into_iter().enumerate() {
                m[(i, j)] = BigInt::from(d);
            }
        }
        EndoMap::new(spec.canon.clone(), m).expect("images respect generator orders")
    }
}

/// Every endomorphism once, in lexicographic order of generator images.
pub fn enumerate_endos(spec: &FiniteGroupSpec) -> impl Iterator<Item = EndoMap> + '_ {
    let arith = Arith::new(spec);
    let cands: Vec<Vec<u32>> = arith.orders.iter().map(|&m| arith.candidates(m)).collect();
    let mut pos = vec![0usize; cands.len()];
    let mut done = cands.iter().any(|c| c.is_empty());
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let images: Vec<u32> = pos.iter().zip(&cands).map(|(&i, c)| c[i]).collect();
        done = true;
        for j in (0..pos.len()).rev() {
            pos[j] += 1;
            if pos[j] < cands[j].len() {
                done = false;
                break;
            }
            pos[j] = 0;
        }
        Some(arith.to_endo(spec, &images))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Enumerate directly when the count is at most [`DIRECT_LIMIT`].
    Auto,
    Direct,
    ImageClasses,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteConfig {
    pub bound: u64,
    pub workers: usize,
    pub strategy: Strategy,
}

impl Default for FiniteConfig {
    fn default() -> Self {
        FiniteConfig { bound: DEFAULT_ORDER_BOUND, workers: 1, strategy: Strategy::Auto }
    }
}

/// Endomorphisms sharing an image subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ImageClass {
    count: u128,
    image_order: u64,
    kernel_order: u64,
    first: Vec<u32>,
}

type Table = BTreeMap<FixedBitSet, ImageClass>;

fn merge(into: &mut Table, key: FixedBitSet, class: ImageClass) {
    match into.get_mut(&key) {
        Some(c) => {
            debug_assert_eq!(c.kernel_order, class.kernel_order);
            c.count += class.count;
            if class.first < c.first {
                c.first = class.first;
            }
        }
        None => {
            into.insert(key, class);
        }
    }
}

fn direct_table(arith: &Arith, cands: &[Vec<u32>], heads: &[u32]) -> Table {
    let mut table = Table::new();
    let rest = &cands[1..];
    let mut pos = vec![0usize; rest.len()];
    for &head in heads {
        loop {
            let mut images = vec![head];
            images.extend(pos.iter().zip(rest).map(|(&i, c)| c[i]));
            let phi = arith.evaluate(&images);
            let mut image = FixedBitSet::with_capacity(arith.n);
            phi.iter().for_each(|&y| image.insert(y as usize));
            let kernel_order = phi.iter().filter(|&&y| y == 0).count() as u64;
            let image_order = image.count_ones(..) as u64;
            merge(&mut table, image, ImageClass { count: 1, image_order, kernel_order, first: images });
            let mut carried = true;
            for j in (0..pos.len()).rev() {
                pos[j] += 1;
                if pos[j] < rest[j].len() {
                    carried = false;
                    break;
                }
                pos[j] = 0;
            }
            if carried {
                break;
            }
        }
    }
    table
}

fn class_table(arith: &Arith, cands: &[Vec<u32>], heads: &[u32]) -> Table {
    let mut zero = FixedBitSet::with_capacity(arith.n);
    zero.insert(0);
    let mut states: BTreeMap<FixedBitSet, (u128, Vec<u32>)> = BTreeMap::new();
    for &x in heads {
        let h = arith.extend(&zero, x);
        let e = states.entry(h).or_insert((0, vec![x]));
        e.0 += 1;
        e.1 = e.1.clone().min(vec![x]);
    }
    for c in &cands[1..] {
        let mut next: BTreeMap<FixedBitSet, (u128, Vec<u32>)> = BTreeMap::new();
        for (h, (count, first)) in &states {
            for &x in c {
                let h2 = arith.extend(h, x);
                let mut tuple = first.clone();
                tuple.push(x);
                match next.get_mut(&h2) {
                    Some(e) => {
                        e.0 += count;
                        if tuple < e.1 {
                            e.1 = tuple;
                        }
                    }
                    None => {
                        next.insert(h2, (*count, tuple));
                    }
                }
            }
        }
        states = next;
    }
    let n = arith.n as u64;
    states
        .into_iter()
        .map(|(h, (count, first))| {
            let image_order = h.count_ones(..) as u64;
            (h, ImageClass { count, image_order, kernel_order: n / image_order, first })
        })
        .collect()
}

fn build_table(spec: &FiniteGroupSpec, cfg: FiniteConfig) -> (Arith, Table, Method) {
    let arith = Arith::new(spec);
    let cands: Vec<Vec<u32>> = arith.orders.iter().map(|&m| arith.candidates(m)).collect();
    let method = match cfg.strategy {
        Strategy::Direct => Method::Direct,
        Strategy::ImageClasses => Method::ImageClasses,
        Strategy::Auto if spec.hom_count() <= DIRECT_LIMIT => Method::Direct,
        Strategy::Auto => Method::ImageClasses,
    };
    if cands.is_empty() {
        let mut t = Table::new();
        let mut zero = FixedBitSet::with_capacity(1);
        zero.insert(0);
        t.insert(zero, ImageClass { count: 1, image_order: 1, kernel_order: 1, first: Vec::new() });
        return (arith, t, method);
    }
    let heads = &cands[0];
    let workers = cfg.workers.clamp(1, heads.len());
    let chunk = heads.len().div_ceil(workers);
    let run = |part: &[u32]| match method {
        Method::Direct => direct_table(&arith, &cands, part),
        _ => class_table(&arith, &cands, part),
    };
    let parts: Vec<Table> = if workers == 1 {
        vec![run(heads)]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = heads.chunks(chunk).map(|part| s.spawn(move || run(part))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut table = Table::new();
    for part in parts {
        for (k, v) in part {
            merge(&mut table, k, v);
        }
    }
    (arith, table, method)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Every endomorphism evaluated on every element.
    Direct,
    /// Endomorphisms aggregated by image subgroup.
    ImageClasses,
    Sampling,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// No endomorphism violates the property.
    Exhaustion { endomorphisms: u128, relevant: u128 },
    /// No sampled endomorphism violates the property; with the reason it
    /// cannot be violated.
    Sampled { trials: usize, reason: String },
    /// A violating endomorphism with its kernel and cokernel.
    Witness { endo: EndoMap, kernel: FgGroupCanon, cokernel: FgGroupCanon, description: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub outcome: Outcome,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub group: String,
    pub method: Method,
    /// Endomorphisms enumerated, or matrices sampled.
    pub endomorphisms: u128,
    pub properties: Vec<PropertyReport>,
}

impl OracleReport {
    pub fn outcome(&self, p: Property) -> Option<Outcome> {
        self.properties.iter().find(|r| r.property == p).map(|r| r.outcome)
    }

    pub fn get(&self, p: Property) -> Option<&PropertyReport> {
        self.properties.iter().find(|r| r.property == p)
    }
}

/// Whether an endomorphism with this kernel/cokernel behaviour violates the
/// property. Cokernels of finite groups are always finite.
fn violates(p: Property, kernel: u64, surjective: bool, coker_finite: bool, kernel_finite: bool) -> bool {
    let injective = kernel == 1;
    match p {
        Property::Hopfian => surjective && !injective,
        Property::CoHopfian => injective && !surjective,
        Property::CoFinitelyInjective => coker_finite && !injective,
        Property::CoFinitelySurjective => coker_finite && !surjective,
        Property::CoFinitelyHopfian => coker_finite && !(injective && surjective),
        Property::AlmostCoFinitelyHopfian => coker_finite && !kernel_finite,
        Property::AlmostFinitelyHopfian => surjective && !kernel_finite,
        Property::FiniteInjectiveRank | Property::Bassian => false,
    }
}

fn relevant(p: Property, surjective: bool, injective: bool) -> bool {
    match p {
        Property::Hopfian | Property::AlmostFinitelyHopfian => surjective,
        Property::CoHopfian => injective,
        _ => true,
    }
}

fn describe_finite(images: &[u32], arith: &Arith) -> String {
    let cols: Vec<String> = images
        .iter()
        .map(|&x| {
            let d: Vec<String> = arith.digits(x as usize).iter().map(|v| v.to_string()).collect();
            format!("({})", d.join(","))
        })
        .collect();
    format!("generator images {}", cols.join(" "))
}

/// Decides the seven core properties of a finite group by exhaustion.
pub fn decide_finite(spec: &FiniteGroupSpec, cfg: FiniteConfig) -> Result<OracleReport, OracleError> {
    if spec.order > cfg.bound {
        return Err(OracleError::TooLarge { order: BigUint::from(spec.order), bound: cfg.bound });
    }
    let (arith, table, method) = build_table(spec, cfg);
    let total: u128 = table.values().map(|c| c.count).sum();
    let n = spec.order;
    let properties = Property::CORE
        .iter()
        .map(|&p| {
            let bad = table
                .values()
                .filter(|c| violates(p, c.kernel_order, c.image_order == n, true, true))
                .min_by(|a, b| (a.kernel_order, &a.first).cmp(&(b.kernel_order, &b.first)));
            let (outcome, certificate) = match bad {
                Some(c) => {
                    let endo = arith.to_endo(spec, &c.first);
                    let a = endo_kernel_cokernel(&endo);
                    (
                        Outcome::Fails,
                        Certificate::Witness {
                            description: describe_finite(&c.first, &arith),
                            endo,
                            kernel: a.kernel,
                            cokernel: a.cokernel,
                        },
                    )
                }
                None => {
                    let relevant: u128 = table
                        .values()
                        .filter(|c| relevant(p, c.image_order == n, c.kernel_order == 1))
                        .map(|c| c.count)
                        .sum();
                    (Outcome::Holds, Certificate::Exhaustion { endomorphisms: total, relevant })
                }
            };
            PropertyReport { property: p, outcome, certificate }
        })
        .collect();
    Ok(OracleReport { group: spec.to_string(), method, endomorphisms: total, properties })
}

/// Re-checks a certificate: the witness reproduces its kernel and cokernel
/// and violates the property.
pub fn verify_certificate(p: Property, report: &PropertyReport) -> bool {
    match &report.certificate {
        Certificate::Witness { endo, kernel, cokernel, .. } => {
            let a: EndoAnalysis = endo_kernel_cokernel(endo);
            let kernel_order = a.kernel.order().and_then(|o| o.to_u64());
            a.kernel == *kernel
                && a.cokernel == *cokernel
                && report.outcome == Outcome::Fails
                && violates(p, kernel_order.unwrap_or(u64::MAX), a.surjective, a.cokernel_finite, a.kernel.is_finite())
        }
        Certificate::Exhaustion { .. } | Certificate::Sampled { .. } => report.outcome == Outcome::Holds,
    }
}

/// One sampled endomorphism of `ℤ^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub matrix: IntMatrix,
    pub det: BigInt,
    pub injective: bool,
    pub surjective: bool,
    pub cokernel_finite: bool,
}

impl Sample {
    pub fn of(matrix: IntMatrix) -> Self {
        let det = determinant(&matrix);
        let injective = kernel_basis(&matrix).cols() == 0;
        let coker = cokernel_structure(&matrix);
        Sample { det, injective, surjective: coker.is_trivial(), cokernel_finite: coker.is_finite(), matrix }
    }

    /// `det ≠ 0 ⟺ injective ⟺ finite cokernel`, and `|det| = 1 ⟺ onto`.
    pub fn consistent(&self) -> bool {
        let nz = !self.det.is_zero();
        nz == self.injective && nz == self.cokernel_finite && (self.det.abs() == BigInt::one()) == self.surjective
    }
}

/// The sampled matrices: zero and identity first, then uniform entries in
/// `[-entry_bound, entry_bound]`.
pub fn sample_matrices(r: u64, trials: usize, seed: u64, entry_bound: i64) -> Vec<IntMatrix> {
    let r = r as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![IntMatrix::zeros(r, r), IntMatrix::identity(r)];
    out.truncate(trials);
    while out.len() < trials {
        let rows: Vec<Vec<i64>> =
            (0..r).map(|_| (0..r).map(|_| rng.gen_range(-entry_bound..=entry_bound)).collect()).collect();
        out.push(IntMatrix::from_rows(&rows).expect("rectangular"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeRankReport {
    pub report: OracleReport,
    /// Samples breaking `det ≠ 0 ⟺ injective ⟺ finite cokernel`.
    pub violations: Vec<Sample>,
    pub injective: usize,
    pub surjective: usize,
}

/// Samples endomorphisms of `ℤ^r` and reports the core properties.
pub fn sample_free_rank(r: u64, trials: usize, seed: u64, entry_bound: i64) -> Result<FreeRankReport, OracleError> {
    if r > MAX_FREE_RANK {
        return Err(OracleError::RankTooLarge(r));
    }
    let samples: Vec<Sample> = sample_matrices(r, trials, seed, entry_bound).into_iter().map(Sample::of).collect();
    let violations: Vec<Sample> = samples.iter().filter(|s| !s.consistent()).cloned().collect();
    let count = |f: fn(&Sample) -> bool| samples.iter().filter(|s| f(s)).count();
    let injective = count(|s| s.injective);
    let surjective = count(|s| s.surjective);
    let domain = FgGroupCanon::free(r);
    let group = domain.to_string();
    if r == 0 {
        let mut report = decide_finite(&FiniteGroupSpec::trivial(), FiniteConfig::default())?;
        report.group = group;
        return Ok(FreeRankReport { report, violations, injective, surjective });
    }
    let doubling = EndoMap::scalar(domain, 2).expect("scalar map");
    let a = endo_kernel_cokernel(&doubling);
    let witness = || Certificate::Witness {
        endo: doubling.clone(),
        kernel: a.kernel.clone(),
        cokernel: a.cokernel.clone(),
        description: "2·identity".into(),
    };
    // a sampled counterexample would show up as a failure here
    let sampled_fail = |p: Property| {
        samples.iter().find(|s| {
            let kernel = if s.injective { 1 } else { u64::MAX };
            violates(p, kernel, s.surjective, s.cokernel_finite, s.injective)
        })
    };
    let properties = Property::CORE
        .iter()
        .map(|&p| {
            let proven = match p {
                Property::Hopfian | Property::AlmostFinitelyHopfian => Some("a surjective matrix has determinant ±1"),
                Property::CoFinitelyInjective | Property::AlmostCoFinitelyHopfian => {
                    Some("a finite cokernel forces det ≠ 0, hence injectivity")
                }
                _ => None,
            };
            let (outcome, certificate) = match (proven, sampled_fail(p)) {
                (Some(reason), None) => (Outcome::Holds, Certificate::Sampled { trials, reason: reason.into() }),
                (Some(_), Some(s)) => {
                    let endo = EndoMap::new(FgGroupCanon::free(r), s.matrix.clone()).expect("free domain");
                    let a = endo_kernel_cokernel(&endo);
                    (
                        Outcome::Fails,
                        Certificate::Witness { endo, kernel: a.kernel, cokernel: a.cokernel, description: "sampled".into() },
                    )
                }
                (None, _) => (Outcome::Fails, witness()),
            };
            PropertyReport { property: p, outcome, certificate }
        })
        .collect();
    Ok(FreeRankReport {
        report: OracleReport { group, method: Method::Sampling, endomorphisms: trials as u128, properties },
        violations,
        injective,
        surjective,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub property: Property,
    pub classifier: Outcome,
    pub oracle: Outcome,
    pub rules: Vec<RuleId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub group: String,
    pub oracle: OracleReport,
    /// `(property, classifier, oracle)` for every core property.
    pub compared: Vec<(Property, Outcome, Outcome)>,
    pub mismatches: Vec<Disagreement>,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for CrossCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({:?}, {} endomorphisms)", self.group, self.oracle.method, self.oracle.endomorphisms)?;
        for (p, c, o) in &self.compared {
            let mark = if *c == Outcome::Undecided || c == o { "ok" } else { "MISMATCH" };
            writeln!(f, "  {:<9} classifier={c:<9} oracle={o:<9} {mark}", p.short_name())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossConfig {
    pub finite: FiniteConfig,
    pub trials: usize,
    pub seed: u64,
    pub entry_bound: i64,
    pub classifier: Options,
}

impl Default for CrossConfig {
    fn default() -> Self {
        CrossConfig {
            finite: FiniteConfig::default(),
            trials: 200,
            seed: 0,
            entry_bound: DEFAULT_ENTRY_BOUND,
            classifier: Options::default(),
        }
    }
}

/// Compares every decided classifier verdict with the oracle.
pub fn cross_check(g: &GroupExpr, cfg: CrossConfig) -> Result<CrossCheck, OracleError> {
    let nf = NormalForm::of(g);
    let oracle = if nf.finite_decomposition().is_some() {
        decide_finite(&FiniteGroupSpec::from_normal_form(&nf, cfg.finite.bound)?, cfg.finite)?
    } else if let Some(r) = nf.as_free_rank().filter(|&r| r <= CROSS_CHECK_FREE_RANK) {
        sample_free_rank(r, cfg.trials, cfg.seed, cfg.entry_bound)?.report
    } else {
        return Err(OracleError::OutOfFragment(nf.to_string()));
    };
    let c: Classification = classify_full(g, cfg.classifier);
    let mut compared = Vec::new();
    let mut mismatches = Vec::new();
    for p in Property::CORE {
        let ours = c.outcome(p);
        let theirs = oracle.outcome(p).expect("core property reported");
        compared.push((p, ours, theirs));
        if ours != Outcome::Undecided && ours != theirs {
            mismatches.push(Disagreement { property: p, classifier: ours, oracle: theirs, rules: c.verdict(p).rules() });
        }
    }
    Ok(CrossCheck { group: nf.to_string(), oracle, compared, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::from_u64(n).unwrap()
    }

    fn spec(parts: &[(u64, u32, u64)]) -> FiniteGroupSpec {
        FiniteGroupSpec::new(parts.iter().map(|&(q, e, k)| (p(q), e, k)), DEFAULT_ORDER_BOUND).unwrap()
    }

    #[test]
    fn endo_counts() {
        assert_eq!(enumerate_endos(&spec(&[(2, 1, 1)])).count(), 2);
        assert_eq!(enumerate_endos(&spec(&[(2, 2, 1), (2, 1, 1)])).count(), 32);
        assert_eq!(spec(&[(2, 2, 1), (2, 1, 1)]).hom_count(), 32);
        assert_eq!(enumerate_endos(&FiniteGroupSpec::trivial()).count(), 1);
    }

    #[test]
    fn hom_formula_up_to_128() {
        for g in abelian_groups_up_to(128, &[2, 3, 5, 7]) {
            let (_, table, _) = build_table(&g, FiniteConfig { strategy: Strategy::ImageClasses, ..Default::default() });
            let total: u128 = table.values().map(|c| c.count).sum();
            assert_eq!(total, g.hom_count(), "{g}");
        }
    }

    #[test]
    fn enumeration_is_distinct_and_valid() {
        let g = spec(&[(2, 2, 1), (2, 1, 1), (3, 1, 1)]);
        let all: Vec<EndoMap> = enumerate_endos(&g).collect();
        assert_eq!(all.len() as u128, g.hom_count());
        let mut seen = std::collections::HashSet::new();
        for e in &all {
            assert!(seen.insert(e.matrix().to_rows()));
        }
    }

    #[test]
    fn group_counts_by_order() {
        // number of partitions multiplies over prime powers
        assert_eq!(abelian_groups_of_order(1).len(), 1);
        assert_eq!(abelian_groups_of_order(8).len(), 3);
        assert_eq!(abelian_groups_of_order(16).len(), 5);
        assert_eq!(abelian_groups_of_order(72).len(), 6);
        assert_eq!(abelian_groups_of_order(64).len(), 11);
    }

    #[test]
    fn z4_verdicts_and_witness() {
        let r = decide_finite(&spec(&[(2, 2, 1)]), FiniteConfig::default()).unwrap();
        assert_eq!(r.outcome(Property::Hopfian), Some(Outcome::Holds));
        assert_eq!(r.outcome(Property::CoHopfian), Some(Outcome::Holds));
        let cfh = r.get(Property::CoFinitelyHopfian).unwrap();
        assert_eq!(cfh.outcome, Outcome::Fails);
        match &cfh.certificate {
            Certificate::Witness { endo, .. } => assert_eq!(endo.matrix().to_rows(), vec![vec![BigInt::from(2)]]),
            other => panic!("{other:?}"),
        }
        for pr in &r.properties {
            assert!(verify_certificate(pr.property, pr));
        }
    }

    #[test]
    fn trivial_group_holds_everything() {
        let r = decide_finite(&FiniteGroupSpec::trivial(), FiniteConfig::default()).unwrap();
        assert!(r.properties.iter().all(|p| p.outcome == Outcome::Holds));
        assert_eq!(r.endomorphisms, 1);
    }

    #[test]
    fn klein_group_is_acfh() {
        let r = decide_finite(&spec(&[(2, 1, 2)]), FiniteConfig::default()).unwrap();
        assert_eq!(r.outcome(Property::AlmostCoFinitelyHopfian), Some(Outcome::Holds));
    }

    #[test]
    fn strategies_and_workers_agree() {
        for g in abelian_groups_up_to(48, &[2, 3, 5]) {
            if g.hom_count() > 1 << 14 {
                continue;
            }
            let base = decide_finite(&g, FiniteConfig { strategy: Strategy::Direct, ..Default::default() }).unwrap();
            for strategy in [Strategy::Direct, Strategy::ImageClasses] {
                for workers in [1, 3] {
                    let cfg = FiniteConfig { strategy, workers, ..Default::default() };
                    let (_, t1, _) = build_table(&g, cfg);
                    let (_, t0, _) = build_table(&g, FiniteConfig { strategy: Strategy::Direct, ..Default::default() });
                    assert_eq!(t1, t0, "{g}");
                    assert_eq!(decide_finite(&g, cfg).unwrap().properties, base.properties);
                }
            }
        }
    }

    #[test]
    fn too_large_is_reported() {
        let err = FiniteGroupSpec::new([(p(2), 1, 9)], DEFAULT_ORDER_BOUND).unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { bound: 256, .. }));
        let g = spec(&[(2, 1, 6)]);
        let cfg = FiniteConfig { bound: 32, ..Default::default() };
        assert!(matches!(decide_finite(&g, cfg), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn free_rank_examples() {
        let s = Sample::of(IntMatrix::from_rows(&[vec![2]]).unwrap());
        assert!(s.injective && !s.surjective && s.cokernel_finite);
        let s = Sample::of(IntMatrix::identity(3));
        assert!(s.injective && s.surjective);
        let s = Sample::of(IntMatrix::zeros(2, 2));
        assert!(!s.injective && !s.cokernel_finite);
        assert_eq!(kernel_basis(&s.matrix).cols(), 2);

        let r = sample_free_rank(3, 100, 7, DEFAULT_ENTRY_BOUND).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.report.outcome(Property::CoFinitelyInjective), Some(Outcome::Holds));
        assert_eq!(r.report.outcome(Property::CoFinitelySurjective), Some(Outcome::Fails));
        for pr in &r.report.properties {
            assert!(verify_certificate(pr.property, pr));
        }
        assert!(matches!(sample_free_rank(7, 1, 0, 9), Err(OracleError::RankTooLarge(7))));
    }

    #[test]
    fn sampling_is_seeded() {
        assert_eq!(sample_matrices(4, 20, 3, 9), sample_matrices(4, 20, 3, 9));
        assert_ne!(sample_matrices(4, 20, 3, 9), sample_matrices(4, 20, 4, 9));
        assert!(sample_matrices(2, 5, 0, 9)[0].is_zero());
    }

    #[test]
    fn cross_check_examples() {
        let z8 = crate::dsl::parse("Z(2^3)").unwrap();
        let c = cross_check(&z8, CrossConfig::default()).unwrap();
        assert!(c.agrees());
        assert!(c.compared.iter().all(|(_, ours, _)| *ours != Outcome::Undecided));
        assert_eq!(c.oracle.endomorphisms, 8);

        let z2 = crate::dsl::parse("Z^2").unwrap();
        let c = cross_check(&z2, CrossConfig::default()).unwrap();
        assert!(c.agrees());

        let q = crate::dsl::parse("Q").unwrap();
        assert!(matches!(cross_check(&q, CrossConfig::default()), Err(OracleError::OutOfFragment(_))));
    }
}
