//! Exact integer matrix algebra: Smith and Hermite forms, determinants,
//! kernels, and kernel/cokernel structure of endomorphisms of finitely
//! generated abelian groups.
//!
//! Cokernels are always `ℤ^rows / column space`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prime::Prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearError {
    #[error("block shape mismatch: {0}")]
    BlockShape(String),
    #[error("entry ({row}, {col}) = {value} violates the homomorphism constraint: {reason}")]
    Constraint { row: usize, col: usize, value: BigInt, reason: String },
    #[error("malformed matrix: {0}")]
    Malformed(String),
}

/// A dense matrix over `ℤ`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = BigInt::from(d);
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, LinearError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinearError::Malformed("rows have different lengths".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().cloned().map(Into::into)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hconcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "row counts differ");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> IntMatrix {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[target] -= q * row[source]`
    fn row_sub(&mut self, target: usize, source: usize, q: &BigInt) {
        for j in 0..self.cols {
            let d = q * &self[(source, j)];
            self[(target, j)] -= d;
        }
    }

    fn col_sub(&mut self, target: usize, source: usize, q: &BigInt) {
        for i in 0..self.rows {
            let d = q * &self[(i, source)];
            self[(i, target)] -= d;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let d = a * &rhs[(k, j)];
                    out[(i, j)] += d;
                }
            }
        }
        out
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

// JSON exchange format: an array of rows of decimal strings.
impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|s| s.trim().parse::<BigInt>().map_err(|_| D::Error::custom(format!("bad integer {s:?}")))).collect())
            .collect::<Result<_, _>>()?;
        IntMatrix::from_rows(&parsed).map_err(D::Error::custom)
    }
}

/// `u * a * v == s` with `u`, `v` unimodular and `s` in Smith form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// The diagonal `d_1 | d_2 | ...`, zeros included.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = &a[(i, j)];
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < a[(bi, bj)].magnitude()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smith normal form. The pivot is the entry of least non-zero magnitude,
/// ties broken by the lowest (row, column) index.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let mut s = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut v = IntMatrix::identity(a.cols);
    for t in 0..a.rows.min(a.cols) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&s, t) else {
                return finish_snf(u, s, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..s.rows {
                if !s[(i, t)].is_zero() {
                    let q = &s[(i, t)] / &s[(t, t)];
                    s.row_sub(i, t, &q);
                    u.row_sub(i, t, &q);
                    clean &= s[(i, t)].is_zero();
                }
            }
            for j in t + 1..s.cols {
                if !s[(t, j)].is_zero() {
                    let q = &s[(t, j)] / &s[(t, t)];
                    s.col_sub(j, t, &q);
                    v.col_sub(j, t, &q);
                    clean &= s[(t, j)].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // enforce d_t | every remaining entry
            let bad = (t + 1..s.rows).find(|&i| (t + 1..s.cols).any(|j| !s[(i, j)].is_multiple_of(&s[(t, t)])));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    s.row_sub(t, i, &minus_one);
                    u.row_sub(t, i, &minus_one);
                }
                None => break,
            }
        }
    }
    finish_snf(u, s, v)
}

fn finish_snf(mut u: IntMatrix, mut s: IntMatrix, v: IntMatrix) -> SnfResult {
    for t in 0..s.rows.min(s.cols) {
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, s, v }
}

/// Row-style Hermite normal form `(h, u)` with `u * a == h`: pivots positive,
/// entries above a pivot reduced into `[0, pivot)`, zero rows last.
pub fn hermite_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut r = 0;
    for j in 0..a.cols {
        if r == a.rows {
            break;
        }
        loop {
            let pivot = (r..h.rows)
                .filter(|&i| !h[(i, j)].is_zero())
                .min_by(|&x, &y| h[(x, j)].magnitude().cmp(h[(y, j)].magnitude()).then(x.cmp(&y)));
            let Some(pi) = pivot else { break };
            h.swap_rows(r, pi);
            u.swap_rows(r, pi);
            let mut clean = true;
            for i in r + 1..h.rows {
                if !h[(i, j)].is_zero() {
                    let q = h[(i, j)].div_floor(&h[(r, j)]);
                    h.row_sub(i, r, &q);
                    u.row_sub(i, r, &q);
                    clean &= h[(i, j)].is_zero();
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = h[(i, j)].div_floor(&h[(r, j)]);
            if !q.is_zero() {
                h.row_sub(i, r, &q);
                u.row_sub(i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Membership of `v` in the row lattice of a matrix already in Hermite form.
pub fn in_row_lattice(h: &IntMatrix, v: &[BigInt]) -> bool {
    assert_eq!(v.len(), h.cols, "dimension mismatch");
    let mut rest = v.to_vec();
    let mut j = 0;
    for i in 0..h.rows {
        while j < h.cols && h[(i, j)].is_zero() {
            if !rest[j].is_zero() {
                return false;
            }
            j += 1;
        }
        if j == h.cols {
            break;
        }
        let (q, rem) = rest[j].div_rem(&h[(i, j)]);
        if !rem.is_zero() {
            return false;
        }
        for (k, x) in rest.iter_mut().enumerate() {
            *x -= &q * &h[(i, k)];
        }
        j += 1;
    }
    rest.iter().all(Zero::is_zero)
}

/// Determinant by fraction-free Bareiss elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            m.swap_rows(k, i);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = x / &prev;
            }
        }
        prev = m[(k, k)].clone();
    }
    sign * &m[(n - 1, n - 1)]
}

pub fn rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// A basis of the integer kernel `{x : a x = 0}`, as columns.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let cols: Vec<Vec<BigInt>> = (r..a.cols).map(|j| snf.v.column(j)).collect();
    IntMatrix::from_columns(a.cols, &cols)
}

/// An integer solution of `a x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let y = snf.u.mul_vec(b);
    let mut z = vec![BigInt::zero(); a.cols];
    for (i, yi) in y.iter().enumerate() {
        let d = if i < a.cols { snf.s[(i, i)].clone() } else { BigInt::zero() };
        if d.is_zero() {
            if !yi.is_zero() {
                return None;
            }
        } else {
            let (q, rem) = yi.div_rem(&d);
            if !rem.is_zero() {
                return None;
            }
            z[i] = q;
        }
    }
    Some(snf.v.mul_vec(&z))
}

/// A finitely generated abelian group `ℤ^free_rank ⊕ ⊕ ℤ(p^e)^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FgGroupCanon {
    pub free_rank: u64,
    /// `(p, e, k)` sorted by `(p, e)`, with `e, k ≥ 1`.
    pub torsion: Vec<(Prime, u32, u64)>,
}

impl FgGroupCanon {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: u64) -> Self {
        FgGroupCanon { free_rank: rank, torsion: Vec::new() }
    }

    pub fn finite(torsion: Vec<(Prime, u32, u64)>) -> Self {
        Self::from_parts(0, torsion)
    }

    /// Sorts and merges primary components.
    pub fn from_parts(free_rank: u64, torsion: impl IntoIterator<Item = (Prime, u32, u64)>) -> Self {
        let mut map: BTreeMap<(Prime, u32), u64> = BTreeMap::new();
        for (p, e, k) in torsion {
            if e > 0 && k > 0 {
                *map.entry((p, e)).or_default() += k;
            }
        }
        FgGroupCanon { free_rank, torsion: map.into_iter().map(|((p, e), k)| (p, e, k)).collect() }
    }

    /// `ℤ^free_rank ⊕ ⊕ ℤ/d` for the given invariant factors (units ignored).
    pub fn from_invariants<'a>(free_rank: u64, invariants: impl IntoIterator<Item = &'a BigInt>) -> Self {
        let mut parts = Vec::new();
        for d in invariants {
            let d = d.magnitude();
            if *d > BigUint::one() {
                for (p, e) in num_prime::nt_funcs::factorize(d.clone()) {
                    parts.push((Prime::new(p).expect("factor is prime"), e as u32, 1));
                }
            }
        }
        Self::from_parts(free_rank, parts)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            return None;
        }
        let mut n = BigUint::one();
        for (p, e, k) in &self.torsion {
            n *= Pow::pow(p.value(), u64::from(*e) * k);
        }
        Some(n)
    }

    /// Generator orders: `0` for each free generator, then `p^e` repeated.
    pub fn generator_orders(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.free_rank as usize];
        for (p, e, k) in &self.torsion {
            let q = BigInt::from_biguint(Sign::Plus, Pow::pow(p.value(), *e));
            out.extend(std::iter::repeat_n(q, *k as usize));
        }
        out
    }

    /// `(p, e)` for each torsion generator, in generator order.
    fn torsion_generators(&self) -> Vec<(Prime, u32)> {
        self.torsion.iter().flat_map(|(p, e, k)| std::iter::repeat_n((p.clone(), *e), *k as usize)).collect()
    }

    pub fn generator_count(&self) -> usize {
        self.free_rank as usize + self.torsion.iter().map(|t| t.2 as usize).sum::<usize>()
    }

    /// The relation matrix: one column `ord(g_i) e_i` per torsion generator.
    pub fn relations(&self) -> IntMatrix {
        let orders = self.generator_orders();
        let n = orders.len();
        let f = self.free_rank as usize;
        let mut r = IntMatrix::zeros(n, n - f);
        for (j, ord) in orders[f..].iter().enumerate() {
            r[(f + j, j)] = ord.clone();
        }
        r
    }
}

impl fmt::Display for FgGroupCanon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for (p, e, k) in &self.torsion {
            parts.push(if *k == 1 { format!("Z({p}^{e})") } else { format!("Z({p}^{e})^{k}") });
        }
        f.write_str(&parts.join(" + "))
    }
}

/// `ℤ^rows / column space of a`.
pub fn cokernel_structure(a: &IntMatrix) -> FgGroupCanon {
    let snf = smith_normal_form(a);
    let free = (a.rows - snf.rank()) as u64;
    FgGroupCanon::from_invariants(free, snf.diagonal().iter())
}

/// An endomorphism of a finitely generated abelian group. Column `j` of the
/// matrix is the image of generator `j`; generators are ordered as in
/// [`FgGroupCanon::generator_orders`]. The matrix splits into blocks by
/// component, and the constraints below are stated per block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoMap {
    domain: FgGroupCanon,
    matrix: IntMatrix,
}

impl EndoMap {
    /// Checks shape and the homomorphism constraints: torsion generators map
    /// into the torsion part, a generator of order `p^s` maps to a multiple of
    /// `p^max(0, t-s)` in a component of order `p^t`, different primes do not
    /// mix, and torsion coordinates are reduced modulo their order.
    pub fn new(domain: FgGroupCanon, matrix: IntMatrix) -> Result<Self, LinearError> {
        let n = domain.generator_count();
        if matrix.rows != n || matrix.cols != n {
            return Err(LinearError::BlockShape(format!(
                "expected a {n}x{n} matrix, found {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        let f = domain.free_rank as usize;
        let gens = domain.torsion_generators();
        let orders = domain.generator_orders();
        let violation = |row, col, reason: &str| LinearError::Constraint {
            row,
            col,
            value: matrix[(row, col)].clone(),
            reason: reason.to_string(),
        };
        for i in 0..n {
            for j in 0..n {
                let x = &matrix[(i, j)];
                if i >= f && (x.is_negative() || *x >= orders[i]) {
                    return Err(violation(i, j, "torsion coordinates must lie in [0, order)"));
                }
                if x.is_zero() || j < f {
                    continue;
                }
                if i < f {
                    return Err(violation(i, j, "torsion cannot map to the free part"));
                }
                let (ps, es) = &gens[j - f];
                let (pt, et) = &gens[i - f];
                if ps != pt {
                    return Err(violation(i, j, "components of different primes do not mix"));
                }
                let need = BigInt::from_biguint(Sign::Plus, Pow::pow(pt.value(), et.saturating_sub(*es)));
                if !x.is_multiple_of(&need) {
                    return Err(violation(i, j, "image order must divide the source order"));
                }
            }
        }
        Ok(EndoMap { domain, matrix })
    }

    pub fn identity(domain: FgGroupCanon) -> Self {
        Self::scalar(domain, 1).expect("the identity satisfies every constraint")
    }

    /// Multiplication by `c`, reduced modulo each torsion order.
    pub fn scalar(domain: FgGroupCanon, c: i64) -> Result<Self, LinearError> {
        let orders = domain.generator_orders();
        let mut m = IntMatrix::zeros(orders.len(), orders.len());
        for (i, o) in orders.iter().enumerate() {
            m[(i, i)] = if o.is_zero() { BigInt::from(c) } else { BigInt::from(c).mod_floor(o) };
        }
        Self::new(domain, m)
    }

    pub fn domain(&self) -> &FgGroupCanon {
        &self.domain
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// The `(target, source)` block between the `free` component (index 0)
    /// and the torsion components `1..`.
    pub fn block(&self, target: usize, source: usize) -> IntMatrix {
        let mut bounds = vec![0, self.domain.free_rank as usize];
        for (_, _, k) in &self.domain.torsion {
            bounds.push(bounds.last().unwrap() + *k as usize);
        }
        let (r0, r1) = (bounds[target], bounds[target + 1]);
        let (c0, c1) = (bounds[source], bounds[source + 1]);
        let mut b = IntMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b[(i - r0, j - c0)] = self.matrix[(i, j)].clone();
            }
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoAnalysis {
    pub kernel: FgGroupCanon,
    pub cokernel: FgGroupCanon,
    pub injective: bool,
    pub surjective: bool,
    pub cokernel_finite: bool,
}

/// Kernel and cokernel of `φ` on `G = ℤ^k / col(R)`.
///
/// The cokernel is `ℤ^k / col([M | R])`. The kernel is `K / col(R)` where `K`
/// is the projection of `ker [M | R]` onto the first `k` coordinates.
pub fn endo_kernel_cokernel(e: &EndoMap) -> EndoAnalysis {
    let k = e.matrix.rows;
    let rel = e.domain.relations();
    let cone = e.matrix.hconcat(&rel);
    let cokernel = cokernel_structure(&cone);

    let null = kernel_basis(&cone);
    let projected: Vec<Vec<BigInt>> = (0..null.cols).map(|j| null.column(j)[..k].to_vec()).collect();
    let gens = IntMatrix::from_columns(k, &projected);
    let (h, _) = hermite_normal_form(&gens.transpose());
    let basis_rows: Vec<Vec<BigInt>> = (0..h.rows).map(|i| h.row(i).to_vec()).filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let basis = IntMatrix::from_columns(k, &basis_rows);
    let coords: Vec<Vec<BigInt>> = (0..rel.cols)
        .map(|j| solve_integer(&basis, &rel.column(j)).expect("relations lie in the kernel lattice"))
        .collect();
    let kernel = cokernel_structure(&IntMatrix::from_columns(basis.cols, &coords));

    EndoAnalysis {
        injective: kernel.is_trivial(),
        surjective: cokernel.is_trivial(),
        cokernel_finite: cokernel.is_finite(),
        kernel,
        cokernel,
    }
}
