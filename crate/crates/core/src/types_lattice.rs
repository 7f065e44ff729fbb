//! Characteristics and types of rank-1 torsion-free groups.
//!
//! A characteristic assigns a height in `ℕ ∪ {∞}` to every prime. Only
//! characteristics that are eventually constant (eventually `0` or eventually
//! `∞`) are representable. Two characteristics have the same type when they
//! differ at finitely many primes, by finite amounts at each. Under that
//! equivalence a finite height is interchangeable with `0`, so a type is
//! fully described by the set of primes carrying `∞`, which is finite or
//! cofinite. [`TypeClass`] stores exactly that set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mult::Mult;
use crate::prime::Prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("the type family is empty")]
    EmptyFamily,
}

/// The height of an element at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Height {
    Finite(u64),
    Infinite,
}

/// The height a characteristic takes at every prime it does not list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HeightDefault {
    Zero,
    Infinity,
}

impl HeightDefault {
    fn height(self) -> Height {
        match self {
            HeightDefault::Zero => Height::Finite(0),
            HeightDefault::Infinity => Height::Infinite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Characteristic {
    default: HeightDefault,
    exceptions: BTreeMap<Prime, Height>,
}

impl Characteristic {
    /// Builds a characteristic; exceptions equal to the default are dropped
    /// and later entries for the same prime win.
    pub fn new(default: HeightDefault, exceptions: impl IntoIterator<Item = (Prime, Height)>) -> Self {
        let mut map = BTreeMap::new();
        for (p, h) in exceptions {
            map.insert(p, h);
        }
        map.retain(|_, h| *h != default.height());
        Characteristic { default, exceptions: map }
    }

    pub fn default_height(&self) -> HeightDefault {
        self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<Prime, Height> {
        &self.exceptions
    }

    pub fn height_at(&self, p: &Prime) -> Height {
        self.exceptions.get(p).copied().unwrap_or(self.default.height())
    }
}

/// A type: the pattern of primes at which the characteristic is infinite.
///
/// For default `Zero` the exceptions are the primes carrying `∞`; for default
/// `Infinity` they are the primes carrying a finite height.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeClass {
    default: HeightDefault,
    exceptions: BTreeSet<Prime>,
}

impl TypeClass {
    pub fn new(default: HeightDefault, exceptions: impl IntoIterator<Item = Prime>) -> Self {
        TypeClass { default, exceptions: exceptions.into_iter().collect() }
    }

    /// The type of `ℤ`.
    pub fn integers() -> Self {
        TypeClass::new(HeightDefault::Zero, [])
    }

    /// The type of `ℚ`.
    pub fn rationals() -> Self {
        TypeClass::new(HeightDefault::Infinity, [])
    }

    pub fn default_height(&self) -> HeightDefault {
        self.default
    }

    pub fn exceptions(&self) -> &BTreeSet<Prime> {
        &self.exceptions
    }

    pub fn is_integers(&self) -> bool {
        self.default == HeightDefault::Zero && self.exceptions.is_empty()
    }

    pub fn is_rationals(&self) -> bool {
        self.default == HeightDefault::Infinity && self.exceptions.is_empty()
    }

    pub fn infinite_at(&self, p: &Prime) -> bool {
        match self.default {
            HeightDefault::Zero => self.exceptions.contains(p),
            HeightDefault::Infinity => !self.exceptions.contains(p),
        }
    }

    /// The characteristic with height `0` wherever the type is finite.
    pub fn representative(&self) -> Characteristic {
        let h = match self.default {
            HeightDefault::Zero => Height::Infinite,
            HeightDefault::Infinity => Height::Finite(0),
        };
        Characteristic::new(self.default, self.exceptions.iter().cloned().map(|p| (p, h)))
    }
}

impl fmt::Display for TypeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (def, val) = match self.default {
            HeightDefault::Zero => ("0", "inf"),
            HeightDefault::Infinity => ("inf", "0"),
        };
        write!(f, "def={def}")?;
        for (i, p) in self.exceptions.iter().enumerate() {
            let sep = if i == 0 { "; " } else { ", " };
            write!(f, "{sep}{p}->{val}")?;
        }
        Ok(())
    }
}

/// Forgets finite heights: only the `∞`-pattern survives.
pub fn canonicalize(c: &Characteristic) -> TypeClass {
    let exceptions = c
        .exceptions
        .iter()
        .filter(|(_, h)| match c.default {
            HeightDefault::Zero => **h == Height::Infinite,
            HeightDefault::Infinity => true,
        })
        .map(|(p, _)| p.clone());
    TypeClass::new(c.default, exceptions)
}

/// `a ≤ b` iff every prime carrying `∞` in `a` carries `∞` in `b`.
pub fn type_le(a: &TypeClass, b: &TypeClass) -> bool {
    use HeightDefault::*;
    match (a.default, b.default) {
        (Zero, Zero) => a.exceptions.is_subset(&b.exceptions),
        (Zero, Infinity) => a.exceptions.is_disjoint(&b.exceptions),
        // a cofinite set never fits inside a finite one
        (Infinity, Zero) => false,
        (Infinity, Infinity) => b.exceptions.is_subset(&a.exceptions),
    }
}

pub fn type_lt(a: &TypeClass, b: &TypeClass) -> bool {
    a != b && type_le(a, b)
}

/// The elements of `s` with nothing in `s` strictly below them, in input order
/// and without duplicates.
pub fn minimal_elements(s: &[TypeClass]) -> Result<Vec<TypeClass>, TypeError> {
    if s.is_empty() {
        return Err(TypeError::EmptyFamily);
    }
    let mut out: Vec<TypeClass> = Vec::new();
    for m in s {
        if !s.iter().any(|x| type_lt(x, m)) && !out.contains(m) {
            out.push(m.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SchemaKind {
    /// `τ_i` is `∞` exactly at the `i`-th prime: pairwise incomparable.
    PairwiseIncomparable,
    /// `τ_i` is `∞` everywhere except the first `i` primes: `τ_1 > τ_2 > ...`.
    Descending,
}

/// A rule-generated family of rank-1 types, each type repeated `copies` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FamilySchema {
    pub kind: SchemaKind,
    pub length: Mult,
    pub copies: Mult,
}

impl FamilySchema {
    pub fn new(kind: SchemaKind, length: Mult) -> Self {
        FamilySchema { kind, length, copies: Mult::ONE }
    }

    /// The `i`-th type of the family, counting from zero.
    pub fn type_at(&self, i: usize) -> TypeClass {
        match self.kind {
            SchemaKind::PairwiseIncomparable => TypeClass::new(HeightDefault::Zero, [Prime::nth(i)]),
            SchemaKind::Descending => TypeClass::new(HeightDefault::Infinity, Prime::first(i + 1)),
        }
    }

    /// The first `n` types (all of them when the family is shorter).
    pub fn prefix(&self, n: usize) -> Vec<TypeClass> {
        let len = match self.length {
            Mult::Finite(k) => n.min(k as usize),
            Mult::Omega => n,
        };
        (0..len).map(|i| self.type_at(i)).collect()
    }

    /// Explicit entries for a finite-length family.
    pub fn expand(&self) -> Option<Vec<(TypeClass, Mult)>> {
        let k = self.length.finite()?;
        Some((0..k as usize).map(|i| (self.type_at(i), self.copies)).collect())
    }
}

/// Rank-1 types with multiplicities, plus rule-generated infinite families.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TypeFamily {
    pub entries: Vec<(TypeClass, Mult)>,
    pub schemas: Vec<FamilySchema>,
}

impl TypeFamily {
    pub fn from_entries(entries: Vec<(TypeClass, Mult)>) -> Self {
        TypeFamily { entries, schemas: Vec::new() }
    }

    pub fn from_schema(schema: FamilySchema) -> Self {
        TypeFamily { entries: Vec::new(), schemas: vec![schema] }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.schemas.is_empty()
    }

    /// The distinct explicit types.
    pub fn distinct_types(&self) -> Vec<TypeClass> {
        let mut seen = BTreeSet::new();
        self.entries.iter().filter(|(t, _)| seen.insert(t.clone())).map(|(t, _)| t.clone()).collect()
    }
}

/// Why the descending type condition fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DtcWitness {
    /// One type is carried by infinitely many summands.
    RepeatedType { ty: TypeClass },
    /// Every type of a generated family is carried infinitely often.
    RepeatedSchema { kind: SchemaKind },
    /// A strictly descending chain; the first few members are listed.
    DescendingChain { prefix: Vec<TypeClass> },
}

impl fmt::Display for DtcWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DtcWitness::RepeatedType { ty } => {
                write!(f, "type [{ty}] is carried by infinitely many rank-1 summands")
            }
            DtcWitness::RepeatedSchema { kind } => {
                write!(f, "every type of the {kind:?} family is repeated infinitely often")
            }
            DtcWitness::DescendingChain { prefix } => {
                write!(f, "strictly descending chain ")?;
                for t in prefix {
                    write!(f, "[{t}] > ")?;
                }
                f.write_str("...")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DtcOutcome {
    Holds,
    Fails { witness: DtcWitness },
}

impl DtcOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, DtcOutcome::Holds)
    }
}

/// Decides the descending type condition.
///
/// Condition (a), each type carried by finitely many summands, fails exactly
/// when some multiplicity is `ω`. Condition (b), a minimal element in every
/// non-empty subset, can only fail through a strictly descending infinite
/// chain: finitely many explicit types form a finite poset, and the
/// pairwise-incomparable family contributes at most one member to any chain.
/// So (b) fails exactly when a descending family is present.
pub fn dtc_check(f: &TypeFamily) -> DtcOutcome {
    if let Some((ty, _)) = f.entries.iter().find(|(_, m)| !m.is_finite()) {
        return DtcOutcome::Fails { witness: DtcWitness::RepeatedType { ty: ty.clone() } };
    }
    for s in &f.schemas {
        if !s.copies.is_finite() {
            if let Some(k) = s.length.finite() {
                // finite family repeated ω times: its first type repeats
                if k > 0 {
                    return DtcOutcome::Fails { witness: DtcWitness::RepeatedType { ty: s.type_at(0) } };
                }
            } else {
                return DtcOutcome::Fails { witness: DtcWitness::RepeatedSchema { kind: s.kind } };
            }
        }
    }
    if let Some(s) = f
        .schemas
        .iter()
        .find(|s| s.kind == SchemaKind::Descending && !s.length.is_finite())
    {
        return DtcOutcome::Fails { witness: DtcWitness::DescendingChain { prefix: s.prefix(3) } };
    }
    DtcOutcome::Holds
}
