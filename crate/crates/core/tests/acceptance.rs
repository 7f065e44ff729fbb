//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts. The lines go to the process stdout directly, so they show up
//! even when the harness captures output.

use std::io::Write;
use std::time::{Duration, Instant};

use hopf_core::classifier::{
    classify_full, default_order, implication_violations, rule_table, Options, Outcome, Prepared, Property, RuleId,
};
use hopf_core::constructions::{
    all_permutations, fir_witness, identity_permutation, multiplier_constraints, quotient_orders, tensor_endo_analyze,
    InfinConfig, SolutionSet,
};
use hopf_core::dsl::parse;
use hopf_core::group_model::random_expr;
use hopf_core::integer_linear::{cokernel_structure, determinant, kernel_basis, smith_normal_form, IntMatrix};
use hopf_core::oracle::{abelian_groups_up_to, cross_check, sample_matrices, verify_certificate, CrossConfig};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use Outcome::{Fails, Holds};
use Property::*;

fn finish(n: u32, name: &str, start: Instant, bound: Option<Duration>, failures: &[String]) {
    let elapsed = start.elapsed();
    let in_time = bound.is_none_or(|b| elapsed < b);
    let ok = failures.is_empty() && in_time;
    let limit = bound.map_or("exact".to_string(), |b| format!("< {}s", b.as_secs()));
    let mut line = format!(
        "criterion {n} [{}] {name}: {:.2}s ({limit}), {} failure(s)\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        failures.len()
    );
    for f in failures.iter().take(10) {
        line.push_str(&format!("    {f}\n"));
    }
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(failures.is_empty(), "criterion {n}: {failures:?}");
    assert!(in_time, "criterion {n}: took {elapsed:?}");
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

#[test]
fn criterion_1_atom_verdicts() {
    let start = Instant::now();
    // (group, property, outcome, rules accepted as the deciding step)
    let table: &[(&str, Property, Outcome, &[RuleId])] = &[
        ("Z(2^3)", CoFinitelyInjective, Fails, &[RuleId::R(2)]),
        ("Z(2^3)", CoFinitelySurjective, Fails, &[RuleId::R(2)]),
        ("Z(2^3)", Hopfian, Holds, &[RuleId::D(2)]),
        ("Z(5^1)", CoFinitelyInjective, Fails, &[RuleId::R(2)]),
        ("Z(5^1)", CoFinitelySurjective, Fails, &[RuleId::R(2)]),
        ("Z(5^1)", Hopfian, Holds, &[RuleId::D(2)]),
        ("Prufer(2)", CoFinitelySurjective, Holds, &[RuleId::R(2), RuleId::R(4)]),
        ("Prufer(3)", CoFinitelyInjective, Fails, &[RuleId::R(2), RuleId::R(4)]),
        ("Q", CoFinitelyHopfian, Holds, &[RuleId::R(4)]),
        ("Q^5", CoFinitelyHopfian, Holds, &[RuleId::R(4)]),
        ("Jp(5)", CoFinitelyInjective, Holds, &[RuleId::R(13)]),
        ("Jp(5)", CoFinitelySurjective, Fails, &[RuleId::R(12)]),
        ("Prod(2:1)", CoFinitelyInjective, Holds, &[RuleId::R(13)]),
        ("Prod(2:2, 3:1)", CoFinitelySurjective, Fails, &[RuleId::R(12)]),
        ("Q^w", CoFinitelySurjective, Holds, &[RuleId::R(4)]),
        ("Prufer(3)^w + Q", CoFinitelySurjective, Holds, &[RuleId::R(4)]),
        ("Q^3 + Prufer(2)^2", CoFinitelySurjective, Holds, &[RuleId::R(4)]),
        ("Z", CoFinitelyInjective, Holds, &[RuleId::R(7)]),
        ("Z", CoFinitelySurjective, Fails, &[RuleId::R(8)]),
        ("Z", CoFinitelyHopfian, Fails, &[RuleId::R(8)]),
        ("Z^4", CoFinitelyInjective, Holds, &[RuleId::R(7)]),
        ("Z^4", CoFinitelySurjective, Fails, &[RuleId::R(1), RuleId::R(8)]),
        ("Z^4", CoFinitelyHopfian, Fails, &[RuleId::R(1), RuleId::R(8)]),
        ("R1[def=0; 3->inf]", CoFinitelyInjective, Holds, &[RuleId::R(7)]),
        ("R1[def=inf; 2->0]", CoFinitelySurjective, Fails, &[RuleId::R(8)]),
        ("R1[def=inf; 2->0]", CoFinitelyHopfian, Fails, &[RuleId::R(8)]),
        ("Jp(5)", CoFinitelyHopfian, Fails, &[RuleId::R(14)]),
        ("Prod(2:1)", CoFinitelyHopfian, Fails, &[RuleId::R(14)]),
        ("Jp(5) + Q^2", CoFinitelyHopfian, Fails, &[RuleId::R(14), RuleId::R(1)]),
        ("Q^4", CoFinitelyHopfian, Holds, &[RuleId::R(4), RuleId::R(14)]),
    ];
    let mut failures = Vec::new();
    for &(src, p, want, rules) in table {
        let v = classify_full(&parse(src).unwrap(), Options::default()).verdict(p);
        let anchored = v.trace.first().is_some_and(|s| rules.contains(&s.rule) && !s.anchor.is_empty());
        if v.outcome != want || !anchored {
            failures.push(format!("{src} {}: got {} via {:?}, want {want} via {rules:?}", p.short_name(), v.outcome, v.rule()));
        }
    }
    finish(1, "atom verdict table", start, secs(1), &failures);
}

#[test]
fn criterion_2_oracle_exhaustion() {
    let start = Instant::now();
    let groups = abelian_groups_up_to(64, &[2, 3, 5, 7]);
    let mut failures = Vec::new();
    for g in &groups {
        let check = match cross_check(&g.to_expr(), CrossConfig::default()) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("{g}: {e}"));
                continue;
            }
        };
        for d in &check.mismatches {
            failures.push(format!("{g}: mismatch {d:?}"));
        }
        let mut want = vec![(Hopfian, Holds), (CoHopfian, Holds)];
        if !g.is_trivial() {
            want.extend([(CoFinitelyInjective, Fails), (CoFinitelySurjective, Fails), (CoFinitelyHopfian, Fails)]);
        }
        for (p, o) in want {
            if check.oracle.outcome(p) != Some(o) {
                failures.push(format!("{g}: oracle {} = {:?}", p.short_name(), check.oracle.outcome(p)));
            }
        }
        for r in &check.oracle.properties {
            if !verify_certificate(r.property, r) {
                failures.push(format!("{g}: certificate for {} does not verify", r.property.short_name()));
            }
        }
    }
    if groups.len() < 50 {
        failures.push(format!("only {} groups enumerated", groups.len()));
    }
    finish(2, &format!("oracle exhaustion over {} groups", groups.len()), start, secs(60), &failures);
}

#[test]
fn criterion_3_snf_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    for t in 0..1000 {
        let (r, c) = if t % 2 == 0 {
            let n = rng.gen_range(1..=6);
            (n, n)
        } else {
            (rng.gen_range(1..=6), rng.gen_range(1..=6))
        };
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-1000..=1000)).collect()).collect();
        let a = IntMatrix::from_rows(&rows).unwrap();
        let snf = smith_normal_form(&a);
        let mut bad = |m: &str| failures.push(format!("{m}: {rows:?}"));
        if &(&snf.u * &a) * &snf.v != snf.s {
            bad("U·A·V != S");
        }
        if !determinant(&snf.u).abs().is_one() || !determinant(&snf.v).abs().is_one() {
            bad("transform not unimodular");
        }
        let off_diagonal = (0..r).any(|i| (0..c).any(|j| i != j && !snf.s[(i, j)].is_zero()));
        if off_diagonal {
            bad("S not diagonal");
        }
        let d = snf.diagonal();
        if d.iter().any(|x| x.is_negative()) {
            bad("negative invariant");
        }
        if d.windows(2).any(|w| !(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])))) {
            bad("divisibility chain broken");
        }
        if r == c {
            let det = determinant(&a);
            if !det.is_zero() && d.iter().product::<BigInt>() != det.abs() {
                bad("product of invariants != |det|");
            }
        }
    }
    finish(3, "SNF on 1000 random matrices", start, secs(30), &failures);
}

#[test]
fn criterion_4_free_rank_oracle() {
    let start = Instant::now();
    let mut failures = Vec::new();
    // small entries make singular samples common
    let samples = sample_matrices(4, 500, 4, 2);
    let singular = samples.iter().filter(|m| determinant(m).is_zero()).count();
    for m in &samples {
        let nonzero_det = !determinant(m).is_zero();
        let injective = kernel_basis(m).cols() == 0;
        let finite = cokernel_structure(m).is_finite();
        if nonzero_det != injective || injective != finite {
            failures.push(format!("det/injective/finite disagree on {m}"));
        }
    }
    if singular == 0 || singular == samples.len() {
        failures.push(format!("{singular} singular samples out of {}", samples.len()));
    }
    let c = classify_full(&parse("Z^4").unwrap(), Options::default());
    if c.outcome(CoFinitelyInjective) != Holds {
        failures.push("cfi(Z^4) is not Holds".into());
    }
    let v = c.verdict(CoFinitelySurjective);
    if v.outcome != Fails || !v.witness.as_deref().is_some_and(|w| w.starts_with("2·identity")) {
        failures.push(format!("cfs(Z^4): {} with witness {:?}", v.outcome, v.witness));
    }
    finish(4, &format!("Z^4 oracle over 500 samples ({singular} singular)"), start, secs(10), &failures);
}

#[test]
fn criterion_5_descending_type_condition() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let c = classify_full(&parse("CD{incomparable(w)}").unwrap(), Options::default());
    let v = c.verdict(CoFinitelyInjective);
    if v.outcome != Holds || v.rule() != Some(RuleId::R(10)) {
        failures.push(format!("CD{{incomparable(w)}} cfi: {} via {:?}", v.outcome, v.rule()));
    }
    let v = classify_full(&parse("CD{R1[def=0]:w}").unwrap(), Options::default()).verdict(Hopfian);
    let rules = v.rules();
    let repeated = v.witness.as_deref().is_some_and(|w| w.contains("infinitely many"));
    if v.outcome != Fails || !rules.contains(&RuleId::R(10)) || !rules.contains(&RuleId::R(11)) || !repeated {
        failures.push(format!("CD{{R1[def=0]:w}} Hopfian: {} via {rules:?}, witness {:?}", v.outcome, v.witness));
    }
    let finite = [
        "CD{R1[def=0]:3}",
        "CD{R1[def=0]:2, R1[def=inf; 2->0]:5}",
        "CD{R1[def=0; 3->inf], R1[def=0; 5->inf], R1[def=0; 3->inf; 5->inf]:2}",
        "CD{R1[def=inf]:4, R1[def=0; 7->2]}",
    ];
    for src in finite {
        let o = classify_full(&parse(src).unwrap(), Options::default()).outcome(CoFinitelyInjective);
        if o != Holds {
            failures.push(format!("{src} cfi: {o}"));
        }
    }
    finish(5, "descending type condition", start, None, &failures);
}

#[test]
fn criterion_6_truncations() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cfg = InfinConfig::new(4, 2).unwrap();
    let orders = quotient_orders(&cfg, 3, &[2, 4, 8]).unwrap();
    if !orders.windows(2).all(|w| w[0].1 < w[1].1) {
        failures.push(format!("|G_N/3G_N| not increasing: {orders:?}"));
    }
    for n in 1..=4 {
        let cfg = InfinConfig::new(n, 2).unwrap();
        for sigma in all_permutations(n) {
            let want = if sigma == identity_permutation(n) { SolutionSet::AllIntegers } else { SolutionSet::OnlyZero };
            let sol = multiplier_constraints(&cfg, &sigma).unwrap();
            if sol.solution_set != want || !sol.verify() {
                failures.push(format!("N={n} {sigma:?}: {:?}", sol.solution_set));
            }
        }
    }
    let w = fir_witness(&cfg, &cfg.q[0].clone()).unwrap();
    if !w.injective || w.quotient.is_trivial() || !w.growth.windows(2).all(|g| g[0].1 < g[1].1) {
        failures.push(format!("fir witness: {w:?}"));
    }
    finish(6, "truncated construction", start, secs(30), &failures);
}

#[test]
fn criterion_7_tensor_analyzer() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let a = tensor_endo_analyze(&IntMatrix::from_rows(&rows).unwrap()).unwrap();
        let unit = a.det.abs().is_one();
        if (a.surjective && !a.injective) || a.cokernel_finite != unit || !a.cfh_consistent {
            failures.push(format!("{rows:?}: {a:?}"));
        }
    }
    finish(7, "tensor analyzer on 200 matrices", start, secs(5), &failures);
}

#[test]
fn criterion_8_classifier_coherence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n_rules = rule_table().len();
    let orders: Vec<Vec<usize>> = std::iter::once(default_order())
        .chain((1..20).map(|_| {
            let mut o: Vec<usize> = (0..n_rules).collect();
            o.shuffle(&mut rng);
            o
        }))
        .collect();
    let exprs: Vec<_> = (0..10_000).map(|_| random_expr(&mut rng, 3)).collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = exprs.len().div_ceil(workers);
    let failures: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = exprs
            .chunks(chunk)
            .map(|part| {
                let orders = &orders;
                s.spawn(move || {
                    let mut out = Vec::new();
                    for g in part {
                        let prepared = Prepared::new(g);
                        let mut first = None;
                        for order in orders {
                            let c = prepared.run(Options::default(), order);
                            if !c.conflicts().is_empty() {
                                out.push(format!("{g}: conflicting verdicts {:?}", c.conflicts()));
                            }
                            for v in implication_violations(&c) {
                                out.push(format!("{g}: {v}"));
                            }
                            let outcomes = c.outcomes();
                            match &first {
                                None => first = Some(outcomes),
                                Some(f) if *f != outcomes => out.push(format!("{g}: ordering changes verdicts")),
                                _ => {}
                            }
                        }
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    finish(8, "coherence over 10^4 groups x 20 orderings", start, secs(60), &failures);
}
