//! Forward-chaining classification with derivation traces.
//!
//! Facts are `(subject, claim)` pairs with a boolean outcome, where the
//! subjects are the group and the direct summands the rules look at (blocks,
//! torsion part, torsion-free part, divisible and reduced parts, primary
//! parts, and their own summands). Rules fire until nothing changes. A fact
//! keeps the derivation of the lowest-ranked rule that produced it, unless
//! adopting that derivation would make the trace cyclic.

mod rules;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::group_model::{GroupExpr, NormalForm, StructuralFacts};

pub use rules::{rule_table, Hyp, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "hopfian")]
    Hopfian,
    #[serde(rename = "cohopfian")]
    CoHopfian,
    #[serde(rename = "cfi")]
    CoFinitelyInjective,
    #[serde(rename = "cfs")]
    CoFinitelySurjective,
    #[serde(rename = "cfh")]
    CoFinitelyHopfian,
    #[serde(rename = "acfh")]
    AlmostCoFinitelyHopfian,
    #[serde(rename = "afh")]
    AlmostFinitelyHopfian,
    #[serde(rename = "fir")]
    FiniteInjectiveRank,
    #[serde(rename = "bassian")]
    Bassian,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Hopfian,
        Property::CoHopfian,
        Property::CoFinitelyInjective,
        Property::CoFinitelySurjective,
        Property::CoFinitelyHopfian,
        Property::AlmostCoFinitelyHopfian,
        Property::AlmostFinitelyHopfian,
        Property::FiniteInjectiveRank,
        Property::Bassian,
    ];

    /// The properties both oracles decide from the definitions.
    pub const CORE: [Property; 7] = [
        Property::Hopfian,
        Property::CoHopfian,
        Property::CoFinitelyInjective,
        Property::CoFinitelySurjective,
        Property::CoFinitelyHopfian,
        Property::AlmostCoFinitelyHopfian,
        Property::AlmostFinitelyHopfian,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Property::Hopfian => "hopfian",
            Property::CoHopfian => "cohopfian",
            Property::CoFinitelyInjective => "cfi",
            Property::CoFinitelySurjective => "cfs",
            Property::CoFinitelyHopfian => "cfh",
            Property::AlmostCoFinitelyHopfian => "acfh",
            Property::AlmostFinitelyHopfian => "afh",
            Property::FiniteInjectiveRank => "fir",
            Property::Bassian => "bassian",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            Property::Hopfian => "Hopfian",
            Property::CoHopfian => "co-Hopfian",
            Property::CoFinitelyInjective => "co-finitely injective",
            Property::CoFinitelySurjective => "co-finitely surjective",
            Property::CoFinitelyHopfian => "co-finitely Hopfian",
            Property::AlmostCoFinitelyHopfian => "almost co-finitely Hopfian",
            Property::AlmostFinitelyHopfian => "almost finitely Hopfian",
            Property::FiniteInjectiveRank => "finite injective rank",
            Property::Bassian => "Bassian",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.short_name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

/// What a fact is about: a property, or the descending type condition used
/// as an intermediate step for completely decomposable groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Claim {
    Prop(Property),
    Dtc,
}

const N_CLAIMS: usize = 10;

impl Claim {
    fn index(self) -> usize {
        match self {
            Claim::Prop(p) => p.index(),
            Claim::Dtc => 9,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Claim::Prop(p) => p.short_name(),
            Claim::Dtc => "dtc",
        }
    }
}

impl From<Property> for Claim {
    fn from(p: Property) -> Self {
        Claim::Prop(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    /// Definitional facts.
    D(u8),
    R(u8),
    /// Grammar lemmas behind the `extended_lemmas` switch.
    Ext(u8),
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::D(n) => write!(f, "D{n}"),
            RuleId::R(n) => write!(f, "R{n}"),
            RuleId::Ext(n) => write!(f, "EXT{n}"),
        }
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Holds,
    Fails,
    Undecided,
}

impl Outcome {
    fn of(holds: bool) -> Self {
        if holds {
            Outcome::Holds
        } else {
            Outcome::Fails
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Holds => "Holds",
            Outcome::Fails => "Fails",
            Outcome::Undecided => "Undecided",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Options {
    pub extended_lemmas: bool,
}

/// A rule's output before it is recorded.
#[derive(Debug, Clone)]
pub struct Conclusion {
    subject: usize,
    claim: Claim,
    holds: bool,
    premises: Vec<(usize, Claim)>,
    note: Option<String>,
    witness: Option<String>,
}

impl Conclusion {
    fn new(subject: usize, claim: impl Into<Claim>, holds: bool) -> Self {
        Conclusion { subject, claim: claim.into(), holds, premises: Vec::new(), note: None, witness: None }
    }

    fn because(mut self, subject: usize, claim: impl Into<Claim>) -> Self {
        self.premises.push((subject, claim.into()));
        self
    }

    fn witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }
}

#[derive(Debug, Clone)]
struct Derivation {
    rule: RuleId,
    holds: bool,
    premises: Vec<(usize, Claim)>,
    note: Option<String>,
    witness: Option<String>,
}

/// A summand under consideration, with its standard parts located among the
/// subjects (`None` when the part is zero).
#[derive(Debug, Clone)]
pub struct Subject {
    pub nf: NormalForm,
    pub facts: StructuralFacts,
    pub label: String,
    torsion: Option<usize>,
    torsion_free: Option<usize>,
    divisible: Option<usize>,
    reduced: Option<usize>,
    primary: Vec<usize>,
    proper_summands: Vec<usize>,
}

/// The subjects of one group, computed once and reusable across rule orders.
#[derive(Debug, Clone)]
pub struct Prepared {
    subjects: Vec<Subject>,
}

impl Prepared {
    pub fn new(g: &GroupExpr) -> Self {
        let root = NormalForm::of(g);
        let mut forms = vec![root];
        let mut index: HashMap<NormalForm, usize> = HashMap::new();
        index.insert(forms[0].clone(), 0);
        let mut i = 0;
        while i < forms.len() {
            for s in forms[i].summands() {
                if !index.contains_key(&s) {
                    index.insert(s.clone(), forms.len());
                    forms.push(s);
                }
            }
            i += 1;
        }
        let locate = |nf: &NormalForm| if nf.is_zero() { None } else { index.get(nf).copied() };
        let subjects = forms
            .iter()
            .map(|nf| {
                let facts = nf.facts();
                Subject {
                    torsion: locate(&facts.torsion_part),
                    torsion_free: locate(&facts.torsion_free_part),
                    divisible: locate(&facts.divisible_part),
                    reduced: locate(&facts.reduced_part),
                    primary: facts.primary_parts.values().filter_map(locate).collect(),
                    proper_summands: forms
                        .iter()
                        .enumerate()
                        .filter(|(_, other)| *other != nf && other.is_summand_of(nf))
                        .map(|(j, _)| j)
                        .collect(),
                    label: nf.to_string(),
                    nf: nf.clone(),
                    facts,
                }
            })
            .collect();
        Prepared { subjects }
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    /// Runs the rules in the given order (indices into [`rule_table`]) to a
    /// fixpoint.
    pub fn run(&self, opts: Options, order: &[usize]) -> Classification {
        let table = rule_table();
        let active: Vec<(usize, Vec<bool>)> = order
            .iter()
            .filter(|&&r| opts.extended_lemmas || !matches!(table[r].id, RuleId::Ext(_)))
            .map(|&r| (r, self.subjects.iter().map(|s| table[r].hyps.iter().all(|h| h.check(s))).collect()))
            .collect();
        let mut state = State { facts: vec![Default::default(); self.subjects.len()], conflicts: Vec::new() };
        loop {
            let mut changed = false;
            for (r, applicable) in &active {
                let rule = &table[*r];
                for (s, _) in applicable.iter().enumerate().filter(|(_, ok)| **ok) {
                    let ctx = Ctx { subjects: &self.subjects, facts: &state.facts };
                    for c in (rule.apply)(&ctx, s) {
                        changed |= state.record(rule.id, c);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Classification { prepared: self.clone(), facts: state.facts, conflicts: state.conflicts, opts }
    }
}

// ctx gives rules read access to the subjects and current facts
pub struct Ctx<'a> {
    subjects: &'a [Subject],
    facts: &'a [[Option<Derivation>; N_CLAIMS]],
}

impl Ctx<'_> {
    fn subject(&self, s: usize) -> &Subject {
        &self.subjects[s]
    }

    fn get(&self, s: usize, claim: impl Into<Claim>) -> Option<bool> {
        self.facts[s][claim.into().index()].as_ref().map(|d| d.holds)
    }
}

struct State {
    facts: Vec<[Option<Derivation>; N_CLAIMS]>,
    conflicts: Vec<Conflict>,
}

impl State {
    fn depends_on(&self, from: (usize, Claim), target: (usize, Claim)) -> bool {
        let mut stack = vec![from];
        let mut seen = std::collections::HashSet::new();
        while let Some((s, c)) = stack.pop() {
            if (s, c) == target {
                return true;
            }
            if !seen.insert((s, c.index())) {
                continue;
            }
            if let Some(d) = &self.facts[s][c.index()] {
                stack.extend(d.premises.iter().copied());
            }
        }
        false
    }

    fn record(&mut self, rule: RuleId, c: Conclusion) -> bool {
        let key = (c.subject, c.claim);
        let new = Derivation { rule, holds: c.holds, premises: c.premises, note: c.note, witness: c.witness };
        match &self.facts[c.subject][c.claim.index()] {
            None => {
                self.facts[c.subject][c.claim.index()] = Some(new);
                true
            }
            Some(old) if old.holds != new.holds => {
                let conflict = Conflict { subject: c.subject, claim: c.claim.name().to_string(), first: old.rule, second: rule };
                if !self.conflicts.contains(&conflict) {
                    self.conflicts.push(conflict);
                }
                false
            }
            Some(old) => {
                if rule < old.rule && !new.premises.iter().any(|&p| self.depends_on(p, key)) {
                    self.facts[c.subject][c.claim.index()] = Some(new);
                    true
                } else {
                    false
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub subject: usize,
    pub claim: String,
    pub first: RuleId,
    pub second: RuleId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: RuleId,
    pub anchor: &'static str,
    pub subject: String,
    pub claim: &'static str,
    pub outcome: Outcome,
    /// Positions of the premise steps within the same trace.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearMiss {
    pub rule: RuleId,
    pub anchor: &'static str,
    pub unmet: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub property: Property,
    pub outcome: Outcome,
    pub trace: Vec<TraceStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub near_misses: Vec<NearMiss>,
}

impl Verdict {
    /// The rule that settled the property.
    pub fn rule(&self) -> Option<RuleId> {
        self.trace.first().map(|s| s.rule)
    }

    pub fn rules(&self) -> Vec<RuleId> {
        self.trace.iter().map(|s| s.rule).collect()
    }
}

/// The full fixpoint for one group.
#[derive(Debug, Clone)]
pub struct Classification {
    prepared: Prepared,
    facts: Vec<[Option<Derivation>; N_CLAIMS]>,
    conflicts: Vec<Conflict>,
    opts: Options,
}

impl Classification {
    pub fn conflicts(&self) -> &[Conflict] {
        &self.conflicts
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.prepared.subjects
    }

    pub fn outcome_at(&self, subject: usize, p: Property) -> Outcome {
        self.facts[subject][p.index()].as_ref().map_or(Outcome::Undecided, |d| Outcome::of(d.holds))
    }

    pub fn outcome(&self, p: Property) -> Outcome {
        self.outcome_at(0, p)
    }

    pub fn outcomes(&self) -> Vec<(Property, Outcome)> {
        Property::ALL.iter().map(|&p| (p, self.outcome(p))).collect()
    }

    pub fn verdict(&self, p: Property) -> Verdict {
        let claim = Claim::Prop(p);
        let Some(d) = &self.facts[0][claim.index()] else {
            return Verdict {
                property: p,
                outcome: Outcome::Undecided,
                trace: Vec::new(),
                witness: None,
                near_misses: self.near_misses(p),
            };
        };
        let mut trace = Vec::new();
        let mut placed = HashMap::new();
        self.push_step(0, claim, &mut trace, &mut placed);
        Verdict {
            property: p,
            outcome: Outcome::of(d.holds),
            trace,
            witness: if d.holds { None } else { self.witness_of(0, claim) },
            near_misses: Vec::new(),
        }
    }

    fn witness_of(&self, s: usize, claim: Claim) -> Option<String> {
        let d = self.facts[s][claim.index()].as_ref()?;
        if d.witness.is_some() {
            return d.witness.clone();
        }
        d.premises
            .iter()
            .filter(|(ps, pc)| self.facts[*ps][pc.index()].as_ref().is_some_and(|pd| !pd.holds))
            .find_map(|&(ps, pc)| {
                let w = self.witness_of(ps, pc)?;
                Some(if ps == s { w } else { format!("{w} (on the summand {})", self.prepared.subjects[ps].label) })
            })
    }

    // depth-first: the concluding step first, then each premise
    fn push_step(&self, s: usize, claim: Claim, trace: &mut Vec<TraceStep>, placed: &mut HashMap<(usize, usize), usize>) -> usize {
        if let Some(&i) = placed.get(&(s, claim.index())) {
            return i;
        }
        let d = self.facts[s][claim.index()].as_ref().expect("premise is a recorded fact");
        let i = trace.len();
        placed.insert((s, claim.index()), i);
        trace.push(TraceStep {
            rule: d.rule,
            anchor: rules::anchor(d.rule),
            subject: self.prepared.subjects[s].label.clone(),
            claim: claim.name(),
            outcome: Outcome::of(d.holds),
            premises: Vec::new(),
            note: d.note.clone(),
        });
        let premises: Vec<usize> = d.premises.iter().map(|&(ps, pc)| self.push_step(ps, pc, trace, placed)).collect();
        trace[i].premises = premises;
        i
    }

    fn near_misses(&self, p: Property) -> Vec<NearMiss> {
        let g = &self.prepared.subjects[0];
        let mut out: Vec<NearMiss> = rule_table()
            .iter()
            .filter(|r| r.concludes.contains(&p))
            .filter(|r| self.opts.extended_lemmas || !matches!(r.id, RuleId::Ext(_)))
            .map(|r| {
                let unmet: Vec<&'static str> =
                    r.hyps.iter().filter(|h| !h.check(g)).map(|h| h.describe()).collect();
                NearMiss {
                    rule: r.id,
                    anchor: r.anchor,
                    unmet: if unmet.is_empty() { vec!["its premises are undecided"] } else { unmet },
                }
            })
            .collect();
        out.sort_by_key(|m| (m.unmet.len(), m.rule));
        out.truncate(3);
        out
    }

    /// The serializable report for the requested properties.
    pub fn report(&self, props: &[Property]) -> Report {
        Report {
            group: self.prepared.subjects[0].label.clone(),
            verdicts: props.iter().map(|&p| self.verdict(p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub group: String,
    pub verdicts: Vec<Verdict>,
}

/// The implication constraints violated among decided outcomes.
pub fn implication_violations(c: &Classification) -> Vec<&'static str> {
    use Outcome::{Fails, Holds};
    use Property::*;
    let o = |p| c.outcome(p);
    let mut bad = Vec::new();
    if o(CoFinitelyInjective) == Holds && o(Hopfian) == Fails {
        bad.push("cfi without Hopfian");
    }
    if o(CoFinitelyInjective) == Holds && o(AlmostCoFinitelyHopfian) == Fails {
        bad.push("cfi without acfH");
    }
    let cfh = o(CoFinitelyHopfian);
    let (cfi, cfs) = (o(CoFinitelyInjective), o(CoFinitelySurjective));
    if cfh == Holds && (cfi == Fails || cfs == Fails) {
        bad.push("cfH without cfi and cfs");
    }
    if cfh == Fails && cfi == Holds && cfs == Holds {
        bad.push("cfi and cfs without cfH");
    }
    if (o(Hopfian) == Holds || o(AlmostCoFinitelyHopfian) == Holds) && o(AlmostFinitelyHopfian) == Fails {
        bad.push("Hopfian or acfH without afH");
    }
    if o(FiniteInjectiveRank) == Holds && cfi == Fails {
        bad.push("FIR without cfi");
    }
    bad
}

/// The identity rule order.
pub fn default_order() -> Vec<usize> {
    (0..rule_table().len()).collect()
}

pub fn classify_full(g: &GroupExpr, opts: Options) -> Classification {
    Prepared::new(g).run(opts, &default_order())
}

/// Verdicts for the requested properties.
pub fn classify(g: &GroupExpr, props: &[Property], opts: Options) -> Vec<Verdict> {
    let c = classify_full(g, opts);
    props.iter().map(|&p| c.verdict(p)).collect()
}

/// Renders a verdict with one line per trace step.
pub fn explain(v: &Verdict) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "{}: {}", v.property.long_name(), v.outcome).unwrap();
    if v.trace.is_empty() {
        out.push_str("  no applicable rule\n");
        for m in &v.near_misses {
            writeln!(out, "  nearest: {} ({}); unmet: {}", m.rule, m.anchor, m.unmet.join(", ")).unwrap();
        }
        return out;
    }
    for (i, step) in v.trace.iter().enumerate() {
        write!(out, "  [{i}] {} {} on {}: {} -- {}", step.rule, step.outcome, step.subject, step.claim, step.anchor).unwrap();
        if !step.premises.is_empty() {
            let ps: Vec<String> = step.premises.iter().map(|p| format!("[{p}]")).collect();
            write!(out, " (from {})", ps.join(", ")).unwrap();
        }
        out.push('\n');
        if let Some(n) = &step.note {
            writeln!(out, "      note: {n}").unwrap();
        }
    }
    if let Some(w) = &v.witness {
        writeln!(out, "  witness: {w}").unwrap();
    }
    out
}
