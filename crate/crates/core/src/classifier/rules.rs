//! The rule base. Each rule names the hypotheses it needs (so near misses can
//! be reported) and computes its conclusions from structural facts and
//! previously derived verdicts.

use super::{Claim, Conclusion, Ctx, Property, RuleId, Subject};
use crate::group_model::{Atom, Cotorsion};
use crate::mult::{Mult, Rank};
use crate::prime::Prime;
use crate::types_lattice::{dtc_check, DtcOutcome, HeightDefault, TypeClass};

use Property::{
    AlmostCoFinitelyHopfian as Acfh, AlmostFinitelyHopfian as Afh, Bassian, CoFinitelyHopfian as Cfh,
    CoFinitelyInjective as Cfi, CoFinitelySurjective as Cfs, CoHopfian as Ch, FiniteInjectiveRank as Fir,
    Hopfian,
};

/// A structural precondition of a rule.
#[derive(Clone, Copy)]
pub struct Hyp {
    text: &'static str,
    test: fn(&Subject) -> bool,
}

impl Hyp {
    pub fn check(&self, s: &Subject) -> bool {
        (self.test)(s)
    }

    pub fn describe(&self) -> &'static str {
        self.text
    }
}

impl std::fmt::Debug for Hyp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.text)
    }
}

#[derive(Debug)]
pub struct Rule {
    pub id: RuleId,
    pub anchor: &'static str,
    pub hyps: &'static [Hyp],
    pub concludes: &'static [Property],
    pub(super) apply: fn(&Ctx, usize) -> Vec<Conclusion>,
}

const ZERO: Hyp = Hyp { text: "the group is zero", test: |s| s.facts.is_zero };
const NONZERO: Hyp = Hyp { text: "the group is non-zero", test: |s| !s.facts.is_zero };
const FINITE: Hyp = Hyp { text: "the group is finite", test: |s| s.facts.is_finite };
const HAS_SUMMANDS: Hyp = Hyp { text: "the group has a proper direct summand", test: |s| !s.proper_summands.is_empty() };
const CYCLIC_OR_PRUFER: Hyp = Hyp {
    text: "the group is a single cyclic or quasi-cyclic p-group",
    test: |s| matches!(single(s), Some(Atom::Cyclic(..) | Atom::Prufer(_))),
};
const PRUFER: Hyp = Hyp { text: "the group is a single quasi-cyclic p-group", test: |s| matches!(single(s), Some(Atom::Prufer(_))) };
const HAS_TORSION: Hyp = Hyp { text: "the group has non-zero torsion", test: |s| s.torsion.is_some() };
const DIVISIBLE: Hyp = Hyp { text: "the group is divisible", test: |s| s.facts.is_divisible };
const MIXED_DR: Hyp = Hyp {
    text: "both the divisible and the reduced part are non-zero",
    test: |s| s.divisible.is_some() && s.reduced.is_some(),
};
const TORSION_FREE: Hyp = Hyp { text: "the group is torsion-free", test: |s| s.facts.is_torsion_free };
const FINITE_RANK: Hyp = Hyp { text: "the torsion-free rank is finite", test: |s| s.facts.torsion_free_rank.is_finite() };
const CD: Hyp = Hyp { text: "the group is completely decomposable", test: |s| s.facts.is_completely_decomposable };
const COTORSION: Hyp = Hyp { text: "the group is known to be cotorsion", test: |s| s.facts.is_cotorsion == Cotorsion::Yes };
const TORSION: Hyp = Hyp { text: "the group is torsion", test: |s| s.facts.is_torsion };
const SEVERAL_PRIMES: Hyp = Hyp { text: "torsion at more than one prime", test: |s| s.primary.len() > 1 };
const MIXED_TF: Hyp = Hyp {
    text: "both the torsion and the torsion-free part are non-zero",
    test: |s| s.torsion.is_some() && s.torsion_free.is_some(),
};
const BOUNDED_TP: Hyp = Hyp { text: "every p-primary part is bounded", test: |s| s.facts.all_tp_bounded() };
const SEPARABLE_TP: Hyp = Hyp { text: "every p-primary part is separable", test: |s| s.facts.all_tp_separable() };
const INFINITE_P_GROUP: Hyp = Hyp {
    text: "the group is an infinite p-group",
    test: |s| s.facts.is_torsion && s.primary.len() == 1 && !s.facts.is_finite,
};
const ALWAYS: Hyp = Hyp { text: "none", test: |_| true };

static RULES: [Rule; 27] = [
    Rule {
        id: RuleId::D(1),
        anchor: "the zero group has only the zero endomorphism, which is an automorphism",
        hyps: &[ZERO],
        concludes: &Property::ALL,
        apply: d1,
    },
    Rule {
        id: RuleId::D(2),
        anchor: "injective and surjective coincide for endomorphisms of a finite group",
        hyps: &[NONZERO, FINITE],
        concludes: &[Hopfian, Ch, Acfh, Afh],
        apply: d2,
    },
    Rule {
        id: RuleId::R(1),
        anchor: "a direct summand inherits the property, so a failing summand makes the group fail",
        hyps: &[HAS_SUMMANDS],
        concludes: &[Cfi, Cfs, Cfh, Ch, Hopfian, Acfh],
        apply: r1,
    },
    Rule {
        id: RuleId::R(2),
        anchor: "Z(p^n) is neither cfi nor cfs; Z(p^inf) is cfs but not cfi",
        hyps: &[CYCLIC_OR_PRUFER],
        concludes: &[Cfi, Cfs],
        apply: r2,
    },
    Rule {
        id: RuleId::R(3),
        anchor: "a cfi group is torsion-free; a cfs group has torsion-free reduced part",
        hyps: &[HAS_TORSION],
        concludes: &[Cfi, Cfs],
        apply: r3,
    },
    Rule {
        id: RuleId::R(4),
        anchor: "divisible groups are cfs, and cfi exactly when torsion-free of finite rank",
        hyps: &[NONZERO, DIVISIBLE],
        concludes: &[Cfi, Cfs, Cfh],
        apply: r4,
    },
    Rule {
        id: RuleId::R(5),
        anchor: "D + R is cfi iff R is cfi and D is Q^n; it is cfs iff R is",
        hyps: &[MIXED_DR],
        concludes: &[Cfi, Cfs],
        apply: r5,
    },
    Rule {
        id: RuleId::R(6),
        anchor: "torsion-free D + R is cfH iff D is Q^n and R is reduced cfH",
        hyps: &[TORSION_FREE, MIXED_DR],
        concludes: &[Cfh],
        apply: r6,
    },
    Rule {
        id: RuleId::R(7),
        anchor: "torsion-free groups of finite rank are cfi, hence Hopfian",
        hyps: &[TORSION_FREE, FINITE_RANK],
        concludes: &[Cfi],
        apply: r7,
    },
    Rule {
        id: RuleId::R(8),
        anchor: "for torsion-free finite rank, cfH, co-Hopfian and cfs each mean divisible",
        hyps: &[TORSION_FREE],
        concludes: &[Cfs, Cfh, Ch],
        apply: r8,
    },
    Rule {
        id: RuleId::R(9),
        anchor: "a completely decomposable group is cfs iff divisible",
        hyps: &[CD],
        concludes: &[Cfs, Cfh, Ch],
        apply: r9,
    },
    Rule {
        id: RuleId::R(10),
        anchor: "completely decomposable: Hopfian iff cfi iff the rank-1 types satisfy the descending type condition",
        hyps: &[CD],
        concludes: &[Cfi, Hopfian],
        apply: r10,
    },
    Rule {
        id: RuleId::R(11),
        anchor: "the descending type condition: finitely many summands per type, and minimal elements exist",
        hyps: &[CD],
        concludes: &[],
        apply: r11,
    },
    Rule {
        id: RuleId::R(12),
        anchor: "a cotorsion group is cfs iff divisible",
        hyps: &[TORSION_FREE, COTORSION],
        concludes: &[Cfs],
        apply: r12,
    },
    Rule {
        id: RuleId::R(13),
        anchor: "torsion-free cotorsion: cfi iff Hopfian iff Q^n plus finite-rank p-adic modules",
        hyps: &[TORSION_FREE, COTORSION],
        concludes: &[Cfi, Hopfian],
        apply: r13,
    },
    Rule {
        id: RuleId::R(14),
        anchor: "a cotorsion group is cfH iff it is torsion-free divisible of finite rank",
        hyps: &[TORSION_FREE, COTORSION],
        concludes: &[Cfh],
        apply: r14,
    },
    Rule {
        id: RuleId::R(15),
        anchor: "a torsion group is acfH iff every T_p is and almost all T_p are Hopfian",
        hyps: &[TORSION, SEVERAL_PRIMES],
        concludes: &[Acfh],
        apply: r15,
    },
    Rule {
        id: RuleId::R(16),
        anchor: "a torsion-free group is acfH iff it is cfi",
        hyps: &[TORSION_FREE],
        concludes: &[Acfh, Cfi],
        apply: r16,
    },
    Rule {
        id: RuleId::R(17),
        anchor: "torsion-free groups of finite rank are acfH",
        hyps: &[TORSION_FREE, FINITE_RANK],
        concludes: &[Acfh],
        apply: r17,
    },
    Rule {
        id: RuleId::R(18),
        anchor: "if T and G/T are acfH then so is G",
        hyps: &[MIXED_TF],
        concludes: &[Acfh],
        apply: r18,
    },
    Rule {
        id: RuleId::R(19),
        anchor: "with G/T acfH and every T_p bounded, G is acfH iff every T_p is finite",
        hyps: &[HAS_TORSION, BOUNDED_TP],
        concludes: &[Acfh],
        apply: r19,
    },
    Rule {
        id: RuleId::R(20),
        anchor: "finite torsion-free rank and bounded p-torsion: acfH iff Bassian",
        hyps: &[FINITE_RANK, BOUNDED_TP],
        concludes: &[Bassian, Acfh],
        apply: r20,
    },
    Rule {
        id: RuleId::R(21),
        anchor: "when every T_p is separable, afH iff Hopfian",
        hyps: &[SEPARABLE_TP],
        concludes: &[Afh, Hopfian],
        apply: r21,
    },
    Rule {
        id: RuleId::R(22),
        anchor: "cfH = cfi + cfs; cfi implies Hopfian and acfH; acfH and Hopfian imply afH; FIR implies cfi",
        hyps: &[ALWAYS],
        concludes: &[Cfi, Cfs, Cfh, Hopfian, Acfh, Afh, Fir],
        apply: r22,
    },
    Rule {
        id: RuleId::Ext(1),
        anchor: "an infinite p-group of the grammar is not Hopfian",
        hyps: &[INFINITE_P_GROUP],
        concludes: &[Hopfian],
        apply: ext1,
    },
    Rule {
        id: RuleId::Ext(2),
        anchor: "surjective endomorphisms of Z(p^inf) have finite kernel",
        hyps: &[PRUFER],
        concludes: &[Afh],
        apply: ext2,
    },
    Rule {
        id: RuleId::Ext(3),
        anchor: "multiplication by p on Z(p^inf) is onto with kernel Z(p)",
        hyps: &[PRUFER],
        concludes: &[Hopfian],
        apply: ext3,
    },
];

/// Every rule, the extended lemmas last.
pub fn rule_table() -> &'static [Rule] {
    &RULES
}

pub(super) fn anchor(id: RuleId) -> &'static str {
    rule_table().iter().find(|r| r.id == id).map_or("", |r| r.anchor)
}

fn single(s: &Subject) -> Option<&Atom> {
    match s.nf.blocks() {
        [(a, Mult::Finite(1))] => Some(a),
        _ => None,
    }
}

/// The smallest prime at which a rank-1 type is not divisible.
fn non_divisible_prime(t: &TypeClass) -> Option<Prime> {
    match t.default_height() {
        HeightDefault::Zero => (0..).map(Prime::nth).find(|p| !t.exceptions().contains(p)),
        HeightDefault::Infinity => t.exceptions().iter().next().cloned(),
    }
}

/// A non-divisible block and a prime witnessing it.
fn non_divisible_block(s: &Subject) -> Option<(Atom, Prime)> {
    s.nf.blocks().iter().find_map(|(a, _)| {
        let p = match a {
            Atom::IntZ => Some(Prime::nth(0)),
            Atom::Cyclic(p, _) | Atom::Padic(p) => Some(p.clone()),
            Atom::RankOne(t) => non_divisible_prime(t),
            Atom::Family(kind) => {
                non_divisible_prime(&crate::types_lattice::FamilySchema::new(*kind, Mult::Omega).type_at(0))
            }
            Atom::AdicProduct(map) => map.keys().next().cloned(),
            Atom::RatQ | Atom::Prufer(_) => None,
        }?;
        Some((a.clone(), p))
    })
}

fn atom_label(a: &Atom) -> String {
    crate::dsl::print(&a.to_expr())
}

/// `p·1` where some block is not `p`-divisible: finite index, not onto. On
/// infinite rank it is restricted to one summand.
fn times_p_witness(s: &Subject) -> String {
    match non_divisible_block(s) {
        Some((_, p)) if s.facts.torsion_free_rank.is_finite() => {
            format!("{p}·identity: injective with finite cokernel, not surjective")
        }
        Some((a, p)) => format!(
            "{p}·identity on one {} summand, identity elsewhere: injective with finite cokernel, not surjective",
            atom_label(&a)
        ),
        None => "an injective endomorphism with finite cokernel that is not surjective".into(),
    }
}

fn shift_witness(s: &Subject) -> String {
    match s.nf.blocks().iter().find(|(_, m)| !m.is_finite()) {
        Some((a, _)) => format!("the shift on {}^w: surjective with kernel {}", atom_label(a), atom_label(a)),
        None => "a surjective endomorphism with non-zero kernel".into(),
    }
}

fn torsion_witness(s: &Subject) -> String {
    let prufer = s.nf.blocks().iter().find_map(|(a, _)| match a {
        Atom::Prufer(p) => Some(p.clone()),
        _ => None,
    });
    let cyclic = s.nf.blocks().iter().find_map(|(a, _)| match a {
        Atom::Cyclic(p, n) => Some((p.clone(), *n)),
        _ => None,
    });
    match (cyclic, prufer) {
        (Some((p, n)), _) => {
            format!("{p}·identity on one Z({p}^{n}) summand, identity elsewhere: kernel and cokernel Z({p})")
        }
        (None, Some(p)) => {
            format!("{p}·identity on one Z({p}^inf) summand, identity elsewhere: surjective with kernel Z({p})")
        }
        (None, None) => "an endomorphism with finite cokernel and non-zero kernel".into(),
    }
}

fn d1(_: &Ctx, s: usize) -> Vec<Conclusion> {
    Property::ALL.iter().map(|&p| Conclusion::new(s, p, true)).collect()
}

fn d2(_: &Ctx, s: usize) -> Vec<Conclusion> {
    [Hopfian, Ch, Acfh, Afh].iter().map(|&p| Conclusion::new(s, p, true)).collect()
}

fn r1(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let mut out = Vec::new();
    for &a in &ctx.subject(s).proper_summands {
        for p in [Cfi, Cfs, Cfh, Ch, Hopfian, Acfh] {
            if ctx.get(a, p) == Some(false) {
                let mut c = Conclusion::new(s, p, false).because(a, p);
                if matches!(p, Hopfian | Acfh) {
                    c = c.note("summand inheritance applied to this property as well");
                }
                out.push(c);
            }
        }
    }
    out
}

fn r2(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    match single(ctx.subject(s)) {
        Some(Atom::Cyclic(p, _)) => {
            let w = format!("{p}·identity: not injective and not surjective, finite cokernel");
            vec![Conclusion::new(s, Cfi, false).witness(w.clone()), Conclusion::new(s, Cfs, false).witness(w)]
        }
        Some(Atom::Prufer(p)) => vec![
            Conclusion::new(s, Cfs, true),
            Conclusion::new(s, Cfi, false).witness(format!("{p}·identity: surjective with kernel Z({p})")),
        ],
        _ => Vec::new(),
    }
}

fn r3(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let mut out = vec![Conclusion::new(s, Cfi, false).witness(torsion_witness(sub))];
    let reduced_torsion = sub.nf.blocks().iter().any(|(a, _)| matches!(a, Atom::Cyclic(..)));
    if reduced_torsion {
        out.push(Conclusion::new(s, Cfs, false).witness(torsion_witness(sub)));
    }
    out
}

fn r4(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let mut out = vec![Conclusion::new(s, Cfs, true)];
    if sub.nf.as_rational_power().is_some() {
        out.push(Conclusion::new(s, Cfi, true));
        out.push(Conclusion::new(s, Cfh, true));
    } else {
        let w = if sub.facts.is_torsion_free { shift_witness(sub) } else { torsion_witness(sub) };
        out.push(Conclusion::new(s, Cfi, false).witness(w));
    }
    out
}

fn r5(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let (Some(d), Some(r)) = (sub.divisible, sub.reduced) else { return Vec::new() };
    let mut out = Vec::new();
    let d_rational = ctx.subject(d).nf.as_rational_power().is_some();
    if !d_rational && ctx.get(d, Cfi) == Some(false) {
        out.push(Conclusion::new(s, Cfi, false).because(d, Cfi));
    }
    match ctx.get(r, Cfi) {
        Some(false) => out.push(Conclusion::new(s, Cfi, false).because(r, Cfi)),
        Some(true) if d_rational => out.push(Conclusion::new(s, Cfi, true).because(r, Cfi)),
        _ => {}
    }
    if let Some(v) = ctx.get(r, Cfs) {
        out.push(Conclusion::new(s, Cfs, v).because(r, Cfs));
    }
    out
}

fn r6(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let (Some(d), Some(r)) = (sub.divisible, sub.reduced) else { return Vec::new() };
    if ctx.subject(d).nf.as_rational_power().is_none() {
        return vec![Conclusion::new(s, Cfh, false).witness(shift_witness(ctx.subject(d)))];
    }
    match ctx.get(r, Cfh) {
        Some(v) => vec![Conclusion::new(s, Cfh, v).because(r, Cfh)],
        None => Vec::new(),
    }
}

fn r7(_: &Ctx, s: usize) -> Vec<Conclusion> {
    vec![Conclusion::new(s, Cfi, true)]
}

fn r8(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let divisible = sub.facts.is_divisible;
    let mut out = Vec::new();
    if sub.facts.torsion_free_rank.is_finite() {
        let w = times_p_witness(sub);
        for p in [Cfs, Cfh, Ch] {
            let c = Conclusion::new(s, p, divisible);
            out.push(if divisible { c } else { c.witness(w.clone()) });
        }
    } else if !divisible {
        let w = match non_divisible_block(sub) {
            Some((a, p)) => format!("{p}·identity on one {} summand: injective, not surjective", atom_label(&a)),
            None => "an injective endomorphism that is not surjective".into(),
        };
        out.push(Conclusion::new(s, Ch, false).witness(w));
    }
    out
}

fn r9(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let divisible = sub.facts.is_divisible;
    let finite_rank = matches!(sub.facts.torsion_free_rank, Rank::Finite(_));
    let mut out = Vec::new();
    let cfs = Conclusion::new(s, Cfs, divisible);
    out.push(if divisible { cfs } else { cfs.witness(times_p_witness(sub)) });
    let both = divisible && finite_rank;
    let w = if divisible { shift_witness(sub) } else { times_p_witness(sub) };
    for p in [Cfh, Ch] {
        let c = Conclusion::new(s, p, both);
        out.push(if both { c } else { c.witness(w.clone()) });
    }
    out
}

fn r10(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let Some(dtc) = ctx.get(s, Claim::Dtc) else { return Vec::new() };
    let schemas = ctx.subject(s).nf.blocks().iter().any(|(a, _)| matches!(a, Atom::Family(_)));
    [Cfi, Hopfian]
        .into_iter()
        .map(|p| {
            let c = Conclusion::new(s, p, dtc).because(s, Claim::Dtc);
            if schemas {
                c.note("the criterion is applied to a rule-generated family read as an arbitrary index set")
            } else {
                c
            }
        })
        .collect()
}

fn r11(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    match dtc_check(&ctx.subject(s).nf.type_family()) {
        DtcOutcome::Holds => vec![Conclusion::new(s, Claim::Dtc, true)],
        DtcOutcome::Fails { witness } => vec![Conclusion::new(s, Claim::Dtc, false).witness(witness.to_string())],
    }
}

fn r12(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let c = Conclusion::new(s, Cfs, sub.facts.is_divisible);
    vec![if sub.facts.is_divisible { c } else { c.witness(times_p_witness(sub)) }]
}

fn r13(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let q_finite = sub.nf.blocks().iter().all(|(a, m)| *a != Atom::RatQ || m.is_finite());
    [Cfi, Hopfian]
        .into_iter()
        .map(|p| {
            let c = Conclusion::new(s, p, q_finite);
            if q_finite {
                c
            } else {
                c.witness("the shift on Q^w: surjective with kernel Q")
            }
        })
        .collect()
}

fn r14(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let holds = sub.nf.as_rational_power().is_some();
    let c = Conclusion::new(s, Cfh, holds);
    vec![if holds {
        c
    } else if sub.facts.is_divisible {
        c.witness(shift_witness(sub))
    } else {
        c.witness(times_p_witness(sub))
    }]
}

fn r15(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let mut out = Vec::new();
    if sub.primary.iter().all(|&t| ctx.get(t, Acfh) == Some(true)) {
        let mut c = Conclusion::new(s, Acfh, true);
        for &t in &sub.primary {
            c = c.because(t, Acfh);
        }
        out.push(c);
    }
    for &t in &sub.primary {
        if ctx.get(t, Acfh) == Some(false) {
            out.push(Conclusion::new(s, Acfh, false).because(t, Acfh));
        }
    }
    out
}

fn r16(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let mut out = Vec::new();
    if let Some(v) = ctx.get(s, Cfi) {
        out.push(Conclusion::new(s, Acfh, v).because(s, Cfi));
    }
    if let Some(v) = ctx.get(s, Acfh) {
        out.push(Conclusion::new(s, Cfi, v).because(s, Acfh));
    }
    out
}

fn r17(_: &Ctx, s: usize) -> Vec<Conclusion> {
    vec![Conclusion::new(s, Acfh, true)]
}

fn r18(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let (Some(t), Some(f)) = (sub.torsion, sub.torsion_free) else { return Vec::new() };
    if ctx.get(t, Acfh) == Some(true) && ctx.get(f, Acfh) == Some(true) {
        vec![Conclusion::new(s, Acfh, true).because(t, Acfh).because(f, Acfh)]
    } else {
        Vec::new()
    }
}

fn r19(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let quotient_ok = match sub.torsion_free {
        None => true,
        Some(f) => ctx.get(f, Acfh) == Some(true),
    };
    if !quotient_ok {
        return Vec::new();
    }
    let holds = sub.facts.all_tp_finite();
    let mut c = Conclusion::new(s, Acfh, holds);
    if let Some(f) = sub.torsion_free {
        c = c.because(f, Acfh);
    }
    if !holds {
        let big = sub.nf.blocks().iter().find_map(|(a, m)| match a {
            Atom::Cyclic(p, n) if !m.is_finite() => Some((p.clone(), *n)),
            _ => None,
        });
        if let Some((p, n)) = big {
            c = c.witness(format!(
                "the shift on Z({p}^{n})^w, identity elsewhere: surjective with infinite kernel"
            ));
        }
    }
    vec![c]
}

fn r20(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let mut out = Vec::new();
    if let Some(v) = ctx.get(s, Acfh) {
        out.push(Conclusion::new(s, Bassian, v).because(s, Acfh));
    }
    if let Some(v) = ctx.get(s, Bassian) {
        out.push(Conclusion::new(s, Acfh, v).because(s, Bassian));
    }
    out
}

fn r21(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let mut out = Vec::new();
    if let Some(v) = ctx.get(s, Hopfian) {
        out.push(Conclusion::new(s, Afh, v).because(s, Hopfian));
    }
    if let Some(v) = ctx.get(s, Afh) {
        out.push(Conclusion::new(s, Hopfian, v).because(s, Afh));
    }
    out
}

fn r22(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let g = |p| ctx.get(s, p);
    let mut out = Vec::new();
    // cfH = cfi + cfs
    match (g(Cfi), g(Cfs)) {
        (Some(true), Some(true)) => out.push(Conclusion::new(s, Cfh, true).because(s, Cfi).because(s, Cfs)),
        (Some(false), _) => out.push(Conclusion::new(s, Cfh, false).because(s, Cfi)),
        (_, Some(false)) => out.push(Conclusion::new(s, Cfh, false).because(s, Cfs)),
        _ => {}
    }
    match g(Cfh) {
        Some(true) => {
            out.push(Conclusion::new(s, Cfi, true).because(s, Cfh));
            out.push(Conclusion::new(s, Cfs, true).because(s, Cfh));
        }
        Some(false) => {
            if g(Cfi) == Some(true) {
                out.push(Conclusion::new(s, Cfs, false).because(s, Cfh).because(s, Cfi));
            }
            if g(Cfs) == Some(true) {
                out.push(Conclusion::new(s, Cfi, false).because(s, Cfh).because(s, Cfs));
            }
        }
        None => {}
    }
    // one-way implications and their contrapositives
    for (a, b) in [(Cfi, Hopfian), (Cfi, Acfh), (Acfh, Afh), (Hopfian, Afh), (Fir, Cfi)] {
        if g(a) == Some(true) {
            out.push(Conclusion::new(s, b, true).because(s, a));
        }
        if g(b) == Some(false) {
            out.push(Conclusion::new(s, a, false).because(s, b));
        }
    }
    out
}

fn ext1(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let sub = ctx.subject(s);
    let w = match sub.nf.blocks().iter().find(|(a, _)| matches!(a, Atom::Prufer(_))) {
        Some((Atom::Prufer(p), _)) => format!("{p}·identity on one Z({p}^inf) summand: surjective with kernel Z({p})"),
        _ => shift_witness(sub),
    };
    vec![Conclusion::new(s, Hopfian, false).witness(w)]
}

fn ext2(_: &Ctx, s: usize) -> Vec<Conclusion> {
    vec![Conclusion::new(s, Afh, true)]
}

fn ext3(ctx: &Ctx, s: usize) -> Vec<Conclusion> {
    let w = match single(ctx.subject(s)) {
        Some(Atom::Prufer(p)) => format!("{p}·identity: surjective with kernel Z({p})"),
        _ => String::new(),
    };
    vec![Conclusion::new(s, Hopfian, false).witness(w)]
}
