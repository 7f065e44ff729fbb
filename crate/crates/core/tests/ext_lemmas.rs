//! Finite shadows of the extended lemmas, checked with the endomorphism
//! machinery on `Z(p^k)` for growing `k`.

use hopf_core::classifier::{classify_full, Options, Outcome, Property, RuleId};
use hopf_core::dsl::parse;
use hopf_core::integer_linear::{endo_kernel_cokernel, EndoMap, FgGroupCanon, IntMatrix};
use hopf_core::oracle::{enumerate_endos, FiniteGroupSpec, DEFAULT_ORDER_BOUND};
use hopf_core::Prime;
use num_traits::ToPrimitive;

fn pr(p: u64) -> Prime {
    Prime::from_u64(p).unwrap()
}

fn cyclic(p: u64, e: u32, k: u64) -> FgGroupCanon {
    FgGroupCanon::finite(vec![(pr(p), e, k)])
}

fn order(g: &FgGroupCanon) -> u64 {
    g.order().unwrap().to_u64().unwrap()
}

#[test]
fn times_p_has_kernel_z_p_at_every_depth() {
    // Z(p^inf) is the union of the Z(p^(k+1)); ×p maps each layer onto the
    // previous one, with the same kernel
    for p in [2u64, 3, 5] {
        for k in 1..=5 {
            let a = endo_kernel_cokernel(&EndoMap::scalar(cyclic(p, k + 1, 1), p as i64).unwrap());
            assert_eq!(a.kernel, cyclic(p, 1, 1), "p={p} k={k}");
            assert_eq!(order(&a.cokernel), p);
        }
    }
}

#[test]
fn kernels_of_multiplication_are_bounded_independently_of_depth() {
    // every endomorphism of Z(p^k) is ×a; its kernel has order p^min(v_p(a), k)
    for p in [2u64, 3] {
        for a in 1..=30u64 {
            let mut v = 0;
            while a % p.pow(v + 1) == 0 {
                v += 1;
            }
            for k in 1..=5u32 {
                let r = endo_kernel_cokernel(&EndoMap::scalar(cyclic(p, k, 1), a as i64).unwrap());
                assert_eq!(order(&r.kernel), p.pow(v.min(k)), "p={p} a={a} k={k}");
                assert!(order(&r.kernel) <= p.pow(v));
            }
        }
    }
}

#[test]
fn enumeration_of_cyclic_endos_is_by_multipliers() {
    for (p, k) in [(2u64, 4u32), (3, 3), (5, 2)] {
        let spec = FiniteGroupSpec::new([(pr(p), k, 1)], DEFAULT_ORDER_BOUND).unwrap();
        let surjective_kernels: Vec<u64> = enumerate_endos(&spec)
            .map(|e| endo_kernel_cokernel(&e))
            .filter(|r| r.surjective)
            .map(|r| order(&r.kernel))
            .collect();
        // units of Z(p^k), all with trivial kernel
        assert_eq!(surjective_kernels.len() as u64, p.pow(k - 1) * (p - 1));
        assert!(surjective_kernels.iter().all(|&o| o == 1));
    }
}

fn shift(p: u64, n: u32, k: u64) -> EndoMap {
    let mut m = IntMatrix::zeros(k as usize, k as usize);
    for i in 1..k as usize {
        m[(i - 1, i)] = 1.into();
    }
    EndoMap::new(cyclic(p, n, k), m).unwrap()
}

#[test]
fn truncated_shift_has_stable_kernel_and_cokernel() {
    // e_0 ↦ 0, e_i ↦ e_(i-1): on Z(p^n)^k the kernel and cokernel are one
    // copy of Z(p^n) for every k, so the limit map is onto with kernel Z(p^n)
    for p in [2u64, 3] {
        for n in 1..=3 {
            for k in 2..=6 {
                let r = endo_kernel_cokernel(&shift(p, n, k));
                assert_eq!(r.kernel, cyclic(p, n, 1));
                assert_eq!(r.cokernel, cyclic(p, n, 1));
                assert!(!r.injective && !r.surjective);
            }
        }
    }
}

#[test]
fn extended_rules_fire_only_with_the_flag() {
    let ext = Options { extended_lemmas: true };
    for (src, p, rule) in [
        ("Prufer(2)", Property::Hopfian, RuleId::Ext(1)),
        ("Z(3^2)^w", Property::Hopfian, RuleId::Ext(1)),
        ("Prufer(5)", Property::AlmostFinitelyHopfian, RuleId::Ext(2)),
    ] {
        let g = parse(src).unwrap();
        let v = classify_full(&g, ext).verdict(p);
        assert_ne!(v.outcome, Outcome::Undecided, "{src}");
        assert!(v.rules().contains(&rule), "{src}: {:?}", v.rules());
        let plain = classify_full(&g, Options::default()).verdict(p);
        assert!(plain.rules().iter().all(|r| !matches!(r, RuleId::Ext(_))));
    }
}
