use proptest::prelude::*;

use peisert::critgrp::{all_blocks, block_divisors_formula, is_palindromic, p_profile_formula, p_rank_formula};
use peisert::digits::CarryContext;

const PRIMES: [u64; 8] = [3, 7, 11, 19, 23, 31, 43, 47];

fn ctx_strategy() -> impl Strategy<Value = CarryContext> {
    (prop::sample::select(PRIMES.to_vec()), 1u32..=2)
        .prop_map(|(p, t)| CarryContext::from_t(p, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn carry_identities(ctx in ctx_strategy(), seed in any::<u64>()) {
        let c = |a: u64, b: u64| ctx.carry_count(a as i64, b as i64).unwrap();
        let n = ctx.q() - 1;
        let r = ctx.r();
        let t = ctx.t();
        let i = 1 + seed % (n - 1);
        if i % r != 0 {
            let cycle = c(i, r) + c((i + r) % n, r) + c((i + 2 * r) % n, r) + c((i + 3 * r) % n, r);
            prop_assert_eq!(cycle, 4 * t);
            prop_assert_eq!(c(i, 2 * r) + c((i + 2 * r) % n, 2 * r), 2 * t);
            prop_assert_eq!(c(i, r) + c(n - i, 3 * r), 2 * t);
        }
    }

    #[test]
    fn block_lists(ctx in ctx_strategy(), seed in any::<u64>()) {
        let i = 1 + seed % (ctx.r() - 1);
        let b = block_divisors_formula(&ctx, i, None).unwrap();
        let t = ctx.t();
        prop_assert_eq!(b.list1.iter().sum::<u32>(), 4 * t);
        prop_assert_eq!(b.list2.iter().sum::<u32>(), 4 * t);
        let overall = *b.list1.iter().chain(b.list2.iter()).min().unwrap();
        prop_assert_eq!(*b.exponents.iter().min().unwrap(), overall);
        let chosen = if b.list1.iter().min() <= b.list2.iter().min() { b.list1 } else { b.list2 };
        prop_assert_eq!(b.exponents, chosen);
        prop_assert_eq!(b.class[0], i);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn profile_invariants(p in prop::sample::select(vec![3u64, 7, 11, 19]), t in 1u32..=2) {
        let ctx = CarryContext::from_t(p, t).unwrap();
        let prof = p_profile_formula(&ctx, &all_blocks(&ctx).unwrap());
        prop_assert!(is_palindromic(&prof, t));
        prop_assert_eq!(prof.total_exponent(), t as u64 * (ctx.q() - 3));
        prop_assert_eq!(prof.m(0), p_rank_formula(&ctx));
    }
}
