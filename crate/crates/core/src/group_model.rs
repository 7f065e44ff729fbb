//! Group expressions, their normal form, and structural facts.
//!
//! Every expression denotes a finite direct sum of blocks `atom^m`, where
//! `m` is a positive integer or `ω`. Because the atoms are either torsion
//! (`ℤ(pⁿ)`, `ℤ(p^∞)`) or torsion-free, every group in the grammar splits as
//! `T ⊕ G/T` and as `D ⊕ R`; the derived parts below are all direct summands.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mult::{Mult, Rank};
use crate::prime::Prime;
use crate::types_lattice::{FamilySchema, SchemaKind, TypeClass, TypeFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a direct sum needs at least one summand")]
    EmptySum,
    #[error("multiplicities must be positive")]
    ZeroMultiplicity,
    #[error("cyclic exponent must be at least 1")]
    ZeroExponent,
    #[error("prime {0} appears twice in an adic product")]
    RepeatedPrime(Prime),
    #[error("adic products need at least one prime and positive ranks")]
    BadAdicProduct,
    #[error("completely decomposable family is empty")]
    EmptyFamily,
}

/// The expression tree the parser produces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupExpr {
    Zero,
    IntZ,
    RatQ,
    Cyclic { p: Prime, n: u32 },
    Prufer(Prime),
    Padic(Prime),
    RankOne(TypeClass),
    AdicProduct(Vec<(Prime, u64)>),
    CompletelyDecomposable(TypeFamily),
    DirectSum(Vec<(GroupExpr, Mult)>),
}

impl GroupExpr {
    pub fn cyclic(p: u64, n: u32) -> Self {
        GroupExpr::Cyclic { p: Prime::from_u64(p).expect("prime"), n }
    }

    pub fn prufer(p: u64) -> Self {
        GroupExpr::Prufer(Prime::from_u64(p).expect("prime"))
    }

    pub fn padic(p: u64) -> Self {
        GroupExpr::Padic(Prime::from_u64(p).expect("prime"))
    }

    pub fn sum(parts: impl IntoIterator<Item = (GroupExpr, Mult)>) -> Self {
        GroupExpr::DirectSum(parts.into_iter().collect())
    }

    pub fn pow(self, m: Mult) -> Self {
        GroupExpr::DirectSum(vec![(self, m)])
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            GroupExpr::Cyclic { n, .. } if *n == 0 => Err(ModelError::ZeroExponent),
            GroupExpr::AdicProduct(list) => {
                if list.is_empty() || list.iter().any(|(_, r)| *r == 0) {
                    return Err(ModelError::BadAdicProduct);
                }
                for (i, (p, _)) in list.iter().enumerate() {
                    if list[..i].iter().any(|(q, _)| q == p) {
                        return Err(ModelError::RepeatedPrime(p.clone()));
                    }
                }
                Ok(())
            }
            GroupExpr::CompletelyDecomposable(f) => {
                if f.is_empty() {
                    return Err(ModelError::EmptyFamily);
                }
                let zero = |m: &Mult| *m == Mult::Finite(0);
                if f.entries.iter().any(|(_, m)| zero(m))
                    || f.schemas.iter().any(|s| zero(&s.length) || zero(&s.copies))
                {
                    return Err(ModelError::ZeroMultiplicity);
                }
                Ok(())
            }
            GroupExpr::DirectSum(parts) => {
                if parts.is_empty() {
                    return Err(ModelError::EmptySum);
                }
                for (g, m) in parts {
                    if *m == Mult::Finite(0) {
                        return Err(ModelError::ZeroMultiplicity);
                    }
                    g.validate()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::print(self))
    }
}

/// An indecomposable building block of the normal form. The variant order is
/// the canonical block order: divisible atoms first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    RatQ,
    Prufer(Prime),
    Cyclic(Prime, u32),
    IntZ,
    RankOne(TypeClass),
    /// An `ω`-indexed generated family of rank-1 groups, each type once.
    Family(SchemaKind),
    /// `⊕_p Ĵ_p^{r_p}` with finite support and finite ranks.
    AdicProduct(BTreeMap<Prime, u64>),
    /// Only appears with multiplicity `ω`; finite powers live in `AdicProduct`.
    Padic(Prime),
}

impl Atom {
    pub fn is_torsion(&self) -> bool {
        matches!(self, Atom::Cyclic(..) | Atom::Prufer(_))
    }

    pub fn is_divisible(&self) -> bool {
        matches!(self, Atom::RatQ | Atom::Prufer(_))
    }

    pub fn torsion_prime(&self) -> Option<&Prime> {
        match self {
            Atom::Cyclic(p, _) | Atom::Prufer(p) => Some(p),
            _ => None,
        }
    }

    fn rank(&self) -> Rank {
        match self {
            Atom::RatQ | Atom::IntZ | Atom::RankOne(_) => Rank::Finite(1),
            Atom::Cyclic(..) | Atom::Prufer(_) => Rank::Finite(0),
            Atom::Family(_) | Atom::AdicProduct(_) | Atom::Padic(_) => Rank::Infinite,
        }
    }

    fn cotorsion(&self, m: Mult) -> Cotorsion {
        match self {
            // bounded, divisible, or finite sums of p-adic modules
            Atom::RatQ | Atom::Prufer(_) | Atom::Cyclic(..) | Atom::AdicProduct(_) => Cotorsion::Yes,
            // countable, reduced, torsion-free and non-zero
            Atom::IntZ | Atom::RankOne(_) | Atom::Family(_) => Cotorsion::No,
            Atom::Padic(_) if m.is_finite() => Cotorsion::Yes,
            Atom::Padic(_) => Cotorsion::Unknown,
        }
    }

    pub fn to_expr(&self) -> GroupExpr {
        match self {
            Atom::RatQ => GroupExpr::RatQ,
            Atom::IntZ => GroupExpr::IntZ,
            Atom::Prufer(p) => GroupExpr::Prufer(p.clone()),
            Atom::Cyclic(p, n) => GroupExpr::Cyclic { p: p.clone(), n: *n },
            Atom::RankOne(t) => GroupExpr::RankOne(t.clone()),
            Atom::Family(kind) => {
                GroupExpr::CompletelyDecomposable(TypeFamily::from_schema(FamilySchema::new(*kind, Mult::Omega)))
            }
            Atom::AdicProduct(map) => {
                GroupExpr::AdicProduct(map.iter().map(|(p, r)| (p.clone(), *r)).collect())
            }
            Atom::Padic(p) => GroupExpr::Padic(p.clone()),
        }
    }
}

/// A normalized group: sorted blocks with distinct atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct NormalForm {
    blocks: Vec<(Atom, Mult)>,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::default()
    }

    pub fn of(g: &GroupExpr) -> Self {
        let mut raw = Vec::new();
        flatten(g, Mult::ONE, &mut raw);
        NormalForm::from_blocks(raw)
    }

    /// Merges equal atoms and folds finite p-adic powers into one product.
    pub fn from_blocks(raw: impl IntoIterator<Item = (Atom, Mult)>) -> Self {
        let mut merged: BTreeMap<Atom, Mult> = BTreeMap::new();
        let mut adic: BTreeMap<Prime, Mult> = BTreeMap::new();
        for (atom, m) in raw {
            match atom {
                Atom::Padic(p) => {
                    let e = adic.entry(p).or_insert(Mult::Finite(0));
                    *e = *e + m;
                }
                Atom::AdicProduct(map) => {
                    for (p, r) in map {
                        let e = adic.entry(p).or_insert(Mult::Finite(0));
                        *e = *e + Mult::Finite(r) * m;
                    }
                }
                other => {
                    let e = merged.entry(other).or_insert(Mult::Finite(0));
                    *e = *e + m;
                }
            }
        }
        let mut product = BTreeMap::new();
        for (p, m) in adic {
            match m {
                Mult::Finite(r) => {
                    product.insert(p, r);
                }
                Mult::Omega => {
                    merged.insert(Atom::Padic(p), Mult::Omega);
                }
            }
        }
        if !product.is_empty() {
            merged.insert(Atom::AdicProduct(product), Mult::ONE);
        }
        NormalForm { blocks: merged.into_iter().collect() }
    }

    pub fn blocks(&self) -> &[(Atom, Mult)] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn to_expr(&self) -> GroupExpr {
        match self.blocks.as_slice() {
            [] => GroupExpr::Zero,
            [(atom, Mult::Finite(1))] => atom.to_expr(),
            blocks => GroupExpr::DirectSum(blocks.iter().map(|(a, m)| (a.to_expr(), *m)).collect()),
        }
    }

    fn filter(&self, keep: impl Fn(&Atom) -> bool) -> NormalForm {
        NormalForm { blocks: self.blocks.iter().filter(|(a, _)| keep(a)).cloned().collect() }
    }

    pub fn torsion_part(&self) -> NormalForm {
        self.filter(Atom::is_torsion)
    }

    /// `G/T`, realized as the torsion-free summand.
    pub fn torsion_free_part(&self) -> NormalForm {
        self.filter(|a| !a.is_torsion())
    }

    pub fn divisible_part(&self) -> NormalForm {
        self.filter(Atom::is_divisible)
    }

    pub fn reduced_part(&self) -> NormalForm {
        self.filter(|a| !a.is_divisible())
    }

    pub fn primary_part(&self, p: &Prime) -> NormalForm {
        self.filter(|a| a.torsion_prime() == Some(p))
    }

    pub fn torsion_primes(&self) -> Vec<Prime> {
        let mut ps: Vec<Prime> = self.blocks.iter().filter_map(|(a, _)| a.torsion_prime().cloned()).collect();
        ps.dedup();
        ps
    }

    /// The direct sum of both forms.
    pub fn plus(&self, other: &NormalForm) -> NormalForm {
        NormalForm::from_blocks(self.blocks.iter().chain(other.blocks.iter()).cloned())
    }

    /// `(ℚ-multiplicity)` if the group is `ℚⁿ` for some finite `n` (including `n = 0`).
    pub fn as_rational_power(&self) -> Option<u64> {
        match self.blocks.as_slice() {
            [] => Some(0),
            [(Atom::RatQ, Mult::Finite(n))] => Some(*n),
            _ => None,
        }
    }

    /// `r` if the group is free abelian `ℤ^r` of finite rank.
    pub fn as_free_rank(&self) -> Option<u64> {
        match self.blocks.as_slice() {
            [] => Some(0),
            [(Atom::IntZ, Mult::Finite(n))] => Some(*n),
            _ => None,
        }
    }

    /// Primary decomposition `(p, e, multiplicity)` of a finite group.
    pub fn finite_decomposition(&self) -> Option<Vec<(Prime, u32, u64)>> {
        self.blocks
            .iter()
            .map(|(a, m)| match (a, m) {
                (Atom::Cyclic(p, e), Mult::Finite(k)) => Some((p.clone(), *e, *k)),
                _ => None,
            })
            .collect()
    }

    /// The order of a finite group.
    pub fn order(&self) -> Option<BigUint> {
        let mut order = BigUint::one();
        for (p, e, k) in self.finite_decomposition()? {
            order *= Pow::pow(p.value(), u64::from(e) * k);
        }
        Some(order)
    }

    /// The summands the classifier may inspect: every block, the atom of every
    /// repeated block, and the standard parts, excluding the group itself.
    pub fn summands(&self) -> Vec<NormalForm> {
        let mut out: Vec<NormalForm> = Vec::new();
        let mut push = |nf: NormalForm| {
            if !nf.is_zero() && nf != *self && !out.contains(&nf) {
                out.push(nf);
            }
        };
        for (a, m) in &self.blocks {
            push(NormalForm::from_blocks([(a.clone(), *m)]));
            if *m != Mult::ONE {
                push(NormalForm::from_blocks([(a.clone(), Mult::ONE)]));
            }
        }
        push(self.torsion_part());
        push(self.torsion_free_part());
        push(self.divisible_part());
        push(self.reduced_part());
        for p in self.torsion_primes() {
            push(self.primary_part(&p));
        }
        out
    }

    /// Whether `self ⊕ C ≅ other` for some `C`, decided block by block.
    pub fn is_summand_of(&self, other: &NormalForm) -> bool {
        let find = |atom: &Atom| other.blocks.iter().find(|(a, _)| a == atom).map(|(_, m)| *m);
        let covers = |have: Mult, need: Mult| match (have, need) {
            (Mult::Omega, _) => true,
            (Mult::Finite(h), Mult::Finite(n)) => h >= n,
            (Mult::Finite(_), Mult::Omega) => false,
        };
        self.blocks.iter().all(|(a, m)| match a {
            Atom::AdicProduct(map) => map.iter().all(|(p, r)| {
                find(&Atom::Padic(p.clone())).is_some()
                    || other.blocks.iter().any(|(b, _)| matches!(b, Atom::AdicProduct(theirs) if theirs.get(p).is_some_and(|x| x >= r)))
            }),
            _ => find(a).is_some_and(|have| covers(have, *m)),
        })
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::print(&self.to_expr()))
    }
}

fn rank_one_atom(t: &TypeClass) -> Atom {
    if t.is_integers() {
        Atom::IntZ
    } else if t.is_rationals() {
        Atom::RatQ
    } else {
        Atom::RankOne(t.clone())
    }
}

fn flatten(g: &GroupExpr, m: Mult, out: &mut Vec<(Atom, Mult)>) {
    match g {
        GroupExpr::Zero => {}
        GroupExpr::IntZ => out.push((Atom::IntZ, m)),
        GroupExpr::RatQ => out.push((Atom::RatQ, m)),
        GroupExpr::Cyclic { p, n } => out.push((Atom::Cyclic(p.clone(), *n), m)),
        GroupExpr::Prufer(p) => out.push((Atom::Prufer(p.clone()), m)),
        GroupExpr::Padic(p) => out.push((Atom::Padic(p.clone()), m)),
        GroupExpr::RankOne(t) => out.push((rank_one_atom(t), m)),
        GroupExpr::AdicProduct(list) => {
            for (p, r) in list {
                out.push((Atom::Padic(p.clone()), Mult::Finite(*r) * m));
            }
        }
        GroupExpr::CompletelyDecomposable(f) => {
            for (t, k) in &f.entries {
                out.push((rank_one_atom(t), *k * m));
            }
            for s in &f.schemas {
                match s.expand() {
                    Some(entries) => {
                        for (t, k) in entries {
                            out.push((rank_one_atom(&t), k * m));
                        }
                    }
                    None => {
                        // ω copies of an ω-family simply repeat each type ω times
                        out.push((Atom::Family(s.kind), s.copies * m));
                    }
                }
            }
        }
        GroupExpr::DirectSum(parts) => {
            for (h, k) in parts {
                flatten(h, m * *k, out);
            }
        }
    }
}

/// Flattens, merges multiplicities and sorts divisible atoms ahead of
/// reduced ones.
pub fn normalize(g: &GroupExpr) -> GroupExpr {
    NormalForm::of(g).to_expr()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cotorsion {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryFacts {
    pub bounded: bool,
    pub finite: bool,
    pub separable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralFacts {
    pub is_zero: bool,
    pub is_finite: bool,
    pub is_torsion: bool,
    pub is_torsion_free: bool,
    pub is_divisible: bool,
    pub is_reduced: bool,
    pub is_completely_decomposable: bool,
    pub is_cotorsion: Cotorsion,
    pub torsion_free_rank: Rank,
    pub divisible_part: NormalForm,
    pub reduced_part: NormalForm,
    pub torsion_part: NormalForm,
    pub torsion_free_part: NormalForm,
    pub primary_parts: BTreeMap<Prime, NormalForm>,
    pub primary_facts: BTreeMap<Prime, PrimaryFacts>,
}

impl StructuralFacts {
    pub fn bounded_p_torsion(&self, p: &Prime) -> bool {
        self.primary_facts.get(p).is_none_or(|f| f.bounded)
    }

    pub fn tp_finite(&self, p: &Prime) -> bool {
        self.primary_facts.get(p).is_none_or(|f| f.finite)
    }

    pub fn tp_separable(&self, p: &Prime) -> bool {
        self.primary_facts.get(p).is_none_or(|f| f.separable)
    }

    pub fn all_tp_bounded(&self) -> bool {
        self.primary_facts.values().all(|f| f.bounded)
    }

    pub fn all_tp_finite(&self) -> bool {
        self.primary_facts.values().all(|f| f.finite)
    }

    pub fn all_tp_separable(&self) -> bool {
        self.primary_facts.values().all(|f| f.separable)
    }
}

impl NormalForm {
    pub fn facts(&self) -> StructuralFacts {
        let blocks = &self.blocks;
        let is_torsion = blocks.iter().all(|(a, _)| a.is_torsion());
        let is_torsion_free = blocks.iter().all(|(a, _)| !a.is_torsion());
        let is_cotorsion = blocks.iter().fold(Cotorsion::Yes, |acc, (a, m)| match (acc, a.cotorsion(*m)) {
            (Cotorsion::No, _) | (_, Cotorsion::No) => Cotorsion::No,
            (Cotorsion::Unknown, _) | (_, Cotorsion::Unknown) => Cotorsion::Unknown,
            _ => Cotorsion::Yes,
        });
        let torsion_free_rank =
            blocks.iter().fold(Rank::Finite(0), |acc, (a, m)| acc + a.rank().scaled(*m));
        let mut primary_parts = BTreeMap::new();
        let mut primary_facts = BTreeMap::new();
        for p in self.torsion_primes() {
            let part = self.primary_part(&p);
            let has_prufer = part.blocks.iter().any(|(a, _)| matches!(a, Atom::Prufer(_)));
            let has_omega = part.blocks.iter().any(|(_, m)| !m.is_finite());
            primary_facts.insert(
                p.clone(),
                PrimaryFacts { bounded: !has_prufer, finite: !has_prufer && !has_omega, separable: !has_prufer },
            );
            primary_parts.insert(p, part);
        }
        StructuralFacts {
            is_zero: blocks.is_empty(),
            is_finite: self.finite_decomposition().is_some(),
            is_torsion,
            is_torsion_free,
            is_divisible: blocks.iter().all(|(a, _)| a.is_divisible()),
            is_reduced: blocks.iter().all(|(a, _)| !a.is_divisible()),
            is_completely_decomposable: blocks
                .iter()
                .all(|(a, _)| matches!(a, Atom::RatQ | Atom::IntZ | Atom::RankOne(_) | Atom::Family(_))),
            is_cotorsion,
            torsion_free_rank,
            divisible_part: self.divisible_part(),
            reduced_part: self.reduced_part(),
            torsion_part: self.torsion_part(),
            torsion_free_part: self.torsion_free_part(),
            primary_parts,
            primary_facts,
        }
    }

    /// The completely decomposable family carried by the rank-1 blocks.
    pub fn type_family(&self) -> TypeFamily {
        let mut f = TypeFamily::default();
        for (a, m) in &self.blocks {
            match a {
                Atom::RatQ => f.entries.push((TypeClass::rationals(), *m)),
                Atom::IntZ => f.entries.push((TypeClass::integers(), *m)),
                Atom::RankOne(t) => f.entries.push((t.clone(), *m)),
                Atom::Family(kind) => f.schemas.push(FamilySchema { kind: *kind, length: Mult::Omega, copies: *m }),
                _ => {}
            }
        }
        f
    }
}

pub fn facts(g: &GroupExpr) -> StructuralFacts {
    NormalForm::of(g).facts()
}

/// Separability of every non-zero `T_p`: a direct sum of cyclic `p`-groups is
/// separable, a Prüfer summand is not. Primes that are absent have `T_p = 0`
/// and are separable.
pub fn separability_table(g: &GroupExpr) -> BTreeMap<Prime, bool> {
    facts(g).primary_facts.into_iter().map(|(p, f)| (p, f.separable)).collect()
}

/// One representative of every atom kind, used for catalog-wide checks.
pub fn atom_catalog() -> Vec<GroupExpr> {
    use crate::types_lattice::HeightDefault;
    let p2 = Prime::from_u64(2).unwrap();
    let p3 = Prime::from_u64(3).unwrap();
    vec![
        GroupExpr::Zero,
        GroupExpr::IntZ,
        GroupExpr::RatQ,
        GroupExpr::cyclic(2, 1),
        GroupExpr::cyclic(3, 2),
        GroupExpr::prufer(2),
        GroupExpr::padic(3),
        GroupExpr::RankOne(TypeClass::new(HeightDefault::Zero, [p2.clone()])),
        GroupExpr::RankOne(TypeClass::new(HeightDefault::Infinity, [p3.clone()])),
        GroupExpr::AdicProduct(vec![(p2, 1), (p3, 2)]),
        GroupExpr::CompletelyDecomposable(TypeFamily::from_schema(FamilySchema::new(
            SchemaKind::PairwiseIncomparable,
            Mult::Omega,
        ))),
        GroupExpr::CompletelyDecomposable(TypeFamily::from_schema(FamilySchema::new(
            SchemaKind::Descending,
            Mult::Omega,
        ))),
    ]
}

/// A random well-formed expression over small primes.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> GroupExpr {
    use crate::types_lattice::HeightDefault;
    const PRIMES: [u64; 4] = [2, 3, 5, 7];
    let prime = |rng: &mut R| Prime::from_u64(PRIMES[rng.gen_range(0..PRIMES.len())]).unwrap();
    let mult = |rng: &mut R| {
        if rng.gen_bool(0.25) {
            Mult::Omega
        } else {
            Mult::Finite(rng.gen_range(1..=3))
        }
    };
    let random_type = |rng: &mut R| {
        let d = if rng.gen_bool(0.5) { HeightDefault::Zero } else { HeightDefault::Infinity };
        let n = rng.gen_range(0..=2);
        TypeClass::new(d, (0..n).map(|_| prime(rng)))
    };
    if depth > 0 && rng.gen_bool(0.4) {
        let n = rng.gen_range(1..=3);
        return GroupExpr::DirectSum((0..n).map(|_| (random_expr(rng, depth - 1), mult(rng))).collect());
    }
    match rng.gen_range(0..13) {
        0 => GroupExpr::Zero,
        1 => GroupExpr::IntZ,
        2 => GroupExpr::RatQ,
        3 | 4 => GroupExpr::Cyclic { p: prime(rng), n: rng.gen_range(1..=3) },
        5 => GroupExpr::Prufer(prime(rng)),
        6 => GroupExpr::Padic(prime(rng)),
        7 => GroupExpr::RankOne(random_type(rng)),
        8 => {
            let mut ps: Vec<Prime> = (0..rng.gen_range(1..=2)).map(|_| prime(rng)).collect();
            ps.sort();
            ps.dedup();
            GroupExpr::AdicProduct(ps.into_iter().map(|p| (p, rng.gen_range(1..=2))).collect())
        }
        9 | 10 => {
            let n = rng.gen_range(1..=3);
            GroupExpr::CompletelyDecomposable(TypeFamily::from_entries(
                (0..n).map(|_| (random_type(rng), mult(rng))).collect(),
            ))
        }
        11 => GroupExpr::CompletelyDecomposable(TypeFamily::from_schema(FamilySchema::new(
            SchemaKind::PairwiseIncomparable,
            Mult::Omega,
        ))),
        _ => GroupExpr::CompletelyDecomposable(TypeFamily::from_schema(FamilySchema::new(
            SchemaKind::Descending,
            Mult::Omega,
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: u64) -> Prime {
        Prime::from_u64(n).unwrap()
    }

    #[test]
    fn multiplicities_absorb_into_omega() {
        let g = GroupExpr::sum([
            (GroupExpr::sum([(GroupExpr::IntZ, Mult::ONE), (GroupExpr::IntZ, Mult::ONE)]), Mult::ONE),
            (GroupExpr::IntZ, Mult::Omega),
        ]);
        assert_eq!(normalize(&g), GroupExpr::IntZ.pow(Mult::Omega));
    }

    #[test]
    fn divisible_and_reduced_parts_separate() {
        let g = GroupExpr::sum([
            (GroupExpr::RatQ, Mult::ONE),
            (GroupExpr::cyclic(2, 3), Mult::ONE),
            (GroupExpr::RatQ, Mult::ONE),
        ]);
        let f = facts(&g);
        assert_eq!(f.divisible_part.to_expr(), GroupExpr::RatQ.pow(Mult::Finite(2)));
        assert_eq!(f.reduced_part.to_expr(), GroupExpr::cyclic(2, 3));
        assert_eq!(f.divisible_part.plus(&f.reduced_part), NormalForm::of(&g));
    }

    #[test]
    fn integer_typed_family_is_free() {
        let g = GroupExpr::CompletelyDecomposable(TypeFamily::from_entries(vec![(TypeClass::integers(), Mult::Finite(3))]));
        assert_eq!(normalize(&g), GroupExpr::IntZ.pow(Mult::Finite(3)));
    }

    #[test]
    fn prufer_facts() {
        let f = facts(&GroupExpr::prufer(3));
        assert!(f.is_divisible && f.is_torsion && !f.is_reduced);
        assert!(!f.bounded_p_torsion(&p(3)));
        assert!(f.bounded_p_torsion(&p(2)));
    }

    #[test]
    fn rational_power_facts() {
        let f = facts(&GroupExpr::RatQ.pow(Mult::Finite(3)));
        assert_eq!(f.torsion_free_rank, Rank::Finite(3));
        assert!(f.is_divisible && f.is_torsion_free && f.is_completely_decomposable);
        assert_eq!(f.is_cotorsion, Cotorsion::Yes);
    }

    #[test]
    fn adic_product_facts() {
        let f = facts(&GroupExpr::AdicProduct(vec![(p(2), 1)]));
        assert_eq!(f.is_cotorsion, Cotorsion::Yes);
        assert!(f.is_torsion_free && f.is_reduced && !f.is_completely_decomposable);
        assert_eq!(f.torsion_free_rank, Rank::Infinite);
        assert_eq!(NormalForm::of(&GroupExpr::padic(2)), NormalForm::of(&GroupExpr::AdicProduct(vec![(p(2), 1)])));
    }

    #[test]
    fn cotorsion_table() {
        assert_eq!(facts(&GroupExpr::IntZ).is_cotorsion, Cotorsion::No);
        assert_eq!(facts(&GroupExpr::cyclic(2, 1).pow(Mult::Omega)).is_cotorsion, Cotorsion::Yes);
        assert_eq!(facts(&GroupExpr::padic(2).pow(Mult::Omega)).is_cotorsion, Cotorsion::Unknown);
        let mixed = GroupExpr::sum([(GroupExpr::padic(2).pow(Mult::Omega), Mult::ONE), (GroupExpr::IntZ, Mult::ONE)]);
        assert_eq!(facts(&mixed).is_cotorsion, Cotorsion::No);
    }

    #[test]
    fn separability_examples() {
        let t = separability_table(&GroupExpr::cyclic(2, 2).pow(Mult::Omega));
        assert_eq!(t.get(&p(2)), Some(&true));
        let t = separability_table(&GroupExpr::prufer(2));
        assert_eq!(t.get(&p(2)), Some(&false));
        let f = facts(&GroupExpr::IntZ.pow(Mult::Finite(2)));
        assert!(separability_table(&GroupExpr::IntZ).is_empty());
        assert!(f.tp_separable(&p(2)) && f.tp_separable(&p(7)));
    }

    #[test]
    fn summand_relation() {
        let g = NormalForm::of(&crate::dsl::parse("Z^w + Z(2^1)^3 + Prod(2:2,3:1) + Jp(5)^w").unwrap());
        for s in g.summands() {
            assert!(s.is_summand_of(&g), "{s}");
        }
        for text in ["Z(2^1)^2", "Jp(2)", "Prod(2:2)", "Jp(5)^3", "Z^w + Jp(5)^w"] {
            assert!(NormalForm::of(&crate::dsl::parse(text).unwrap()).is_summand_of(&g), "{text}");
        }
        for text in ["Z(2^1)^4", "Prod(2:3)", "Q", "Z(2^1)^w", "Jp(3)^2"] {
            assert!(!NormalForm::of(&crate::dsl::parse(text).unwrap()).is_summand_of(&g), "{text}");
        }
    }

    #[test]
    fn validation_rejects_malformed_trees() {
        assert_eq!(GroupExpr::DirectSum(vec![]).validate(), Err(ModelError::EmptySum));
        assert_eq!(
            GroupExpr::AdicProduct(vec![(p(2), 1), (p(2), 2)]).validate(),
            Err(ModelError::RepeatedPrime(p(2)))
        );
        assert_eq!(GroupExpr::sum([(GroupExpr::IntZ, Mult::Finite(0))]).validate(), Err(ModelError::ZeroMultiplicity));
        assert_eq!(GroupExpr::cyclic(2, 0).validate(), Err(ModelError::ZeroExponent));
    }

    #[test]
    fn normalize_invariants_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let g = random_expr(&mut rng, 3);
            g.validate().unwrap();
            let n = normalize(&g);
            assert_eq!(normalize(&n), n, "idempotence on {g:?}");
            let (fg, fn_) = (facts(&g), facts(&n));
            assert_eq!(fg, fn_);
            assert!(!(fg.is_torsion && fg.is_torsion_free) || fg.is_zero);
            assert_eq!(fg.divisible_part.plus(&fg.reduced_part), NormalForm::of(&g));
            assert_eq!(fg.is_divisible, fg.reduced_part.is_zero());
        }
    }
}
