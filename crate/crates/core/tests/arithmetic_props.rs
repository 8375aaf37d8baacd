use casas::exactnum::{
    binomial, digit_sum, factor, is_prime, vp_binomial, vp_int, FactorEffort, Integer, Valuation,
};
use proptest::prelude::*;

fn trial_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

// exponent of p in n! by repeated division of every factor
fn factorial_valuation(n: u64, p: u64) -> u64 {
    (1..=n)
        .map(|mut k| {
            let mut e = 0;
            while k % p == 0 {
                k /= p;
                e += 1;
            }
            e
        })
        .sum()
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 101])
}

proptest! {
    #[test]
    fn legendre_matches_factorization(n in 0u64..300, k in 0u64..300, p in small_prime()) {
        let j = k % (n + 1);
        let lhs = vp_binomial(&n.into(), &j.into(), &p.into()).unwrap();
        let oracle = factorial_valuation(n, p) - factorial_valuation(j, p) - factorial_valuation(n - j, p);
        prop_assert_eq!(lhs, oracle);
        let c = binomial(n, j);
        prop_assert_eq!(vp_int(&c, &p.into()).unwrap(), Valuation::Finite(oracle));
        let f = factor(&c, FactorEffort::default());
        let e = f.factors.iter().find(|(q, _)| *q == Integer::from(p)).map(|(_, e)| *e as u64).unwrap_or(0);
        prop_assert_eq!(e, oracle);
    }

    #[test]
    fn digit_sum_by_base_expansion(n in 0u64..1_000_000, p in small_prime()) {
        let mut m = n;
        let mut s = 0;
        while m > 0 {
            s += m % p;
            m /= p;
        }
        prop_assert_eq!(digit_sum(&n.into(), &p.into()).unwrap(), Integer::from(s));
    }

    #[test]
    fn factorization_multiplies_back(n in 1u64..u64::MAX) {
        let f = factor(&n.into(), FactorEffort::default());
        prop_assert!(f.is_complete());
        prop_assert_eq!(f.product(), Integer::from(n));
        for (q, _) in &f.factors {
            prop_assert!(is_prime(q));
        }
    }

    #[test]
    fn primality_agrees_with_trial_division(n in 0u64..200_000) {
        prop_assert_eq!(is_prime(&n.into()), trial_prime(n));
    }
}
