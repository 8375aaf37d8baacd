use casas::filters::{
    delta_det, delta_det_integer, delta_keep, divisibility_rules, restricted_list, FilterConfig,
    FilterToggles, ScenarioFilter,
};
use casas::scenario::{close_under_descendants, counts_by_type, enumerate, Scenario};
use num_bigint::BigInt;
use proptest::prelude::*;

// S(n, k) by the triangle recurrence
fn stirling2(n: usize, k: usize) -> u64 {
    let mut row = vec![0u64; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = j as u64 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[k]
}

fn is_rgs(e: &[u8]) -> bool {
    let mut max = 0;
    e[0] == 0
        && e.iter().skip(1).all(|&x| {
            let ok = x <= max + 1;
            max = max.max(x);
            ok
        })
}

#[test]
fn counts_match_partition_numbers() {
    for d in 3..=10 {
        let all: Vec<Scenario> = enumerate(d).unwrap().collect();
        let counts = counts_by_type(&all, d);
        for (t, &c) in counts.iter().enumerate() {
            assert_eq!(c as u64, stirling2(d - 1, t + 1), "d={d} t={t}");
        }
        assert!(
            all.windows(2).all(|w| w[0] < w[1]),
            "lexicographic, no repeats"
        );
        assert!(all.iter().all(|s| is_rgs(s.entries())));
    }
}

#[test]
fn degree_twelve_counts() {
    let all: Vec<Scenario> = enumerate(12).unwrap().collect();
    assert_eq!(all.len(), 678570);
    assert_eq!(
        counts_by_type(&all, 12),
        [1, 1023, 28501, 145750, 246730, 179487, 63987, 11880, 1155, 55, 1]
    );
}

#[test]
fn descendants_are_valid_and_drop_one_type() {
    for d in 3..=7 {
        for s in enumerate(d).unwrap() {
            for c in s.descendants() {
                assert!(is_rgs(c.entries()), "{s:?} -> {c:?}");
                assert_eq!(c.type_of() + 1, s.type_of());
            }
        }
    }
}

#[test]
fn delta_singletons_closed_form() {
    for j in 2..=100usize {
        let expected = j as i64 - if j % 2 == 0 { 1 } else { -1 };
        assert_eq!(
            delta_det_integer(&[j]).unwrap(),
            BigInt::from(expected),
            "j={j}"
        );
    }
}

#[test]
fn delta_pairs_degree_twelve() {
    let mut pairs = Vec::new();
    for a in 2..=10 {
        for b in a + 1..=10 {
            if delta_det(&[a, b], 11).unwrap() == 0 {
                pairs.push((a, b));
            }
        }
    }
    assert_eq!(pairs, [(3, 8), (5, 6), (6, 8), (6, 9), (7, 9)]);
}

#[test]
fn delta_only_list_degree_twelve() {
    let cfg = FilterConfig {
        degree: 12,
        toggles: FilterToggles {
            delta: true,
            ..FilterToggles::none()
        },
    };
    let list = restricted_list(&cfg, false).unwrap();
    assert_eq!(list.len(), 29392);
    assert_eq!(
        counts_by_type(&list, 12),
        [0, 48, 1668, 8172, 11586, 6298, 1469, 146, 5, 0, 0]
    );
    let type8: Vec<String> = list
        .iter()
        .filter(|s| s.type_of() == 8)
        .map(|s| s.to_string())
        .collect();
    for s in [
        "0,1,2,3,4,5,6,7,3,8,3",
        "0,1,2,3,4,5,5,6,7,8,5",
        "0,1,2,3,4,3,5,6,7,8,3",
        "0,1,2,3,4,2,5,6,7,8,2",
        "0,1,2,3,2,4,5,6,7,8,2",
    ] {
        assert!(type8.iter().any(|t| t == s), "{s}");
    }
}

// direct evaluation of the degree-12 rules with a cofactor-expansion determinant
fn oracle_det(m: &[Vec<i128>]) -> i128 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
        .map(|c| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != c)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            sign * m[0][c] * oracle_det(&minor)
        })
        .sum()
}

fn oracle_binom(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

fn oracle_keep_twelve(e: &[u8]) -> bool {
    let s = |j: usize| e[j - 1];
    if s(11) == 0 || s(3) == s(9) || s(4) == s(8) {
        return false;
    }
    let js: Vec<usize> = (2..=10).filter(|&j| s(12 - j) == s(11)).collect();
    if js.len() < 2 {
        return false;
    }
    let mut m = Vec::new();
    for (i, &ji) in js.iter().enumerate() {
        let mut row = vec![-1i128];
        for &jk in &js[..i] {
            row.push(oracle_binom(ji - 2, jk - 2) * ji as i128);
        }
        row.push(ji as i128);
        row.resize(js.len() + 1, 0);
        m.push(row);
    }
    let mut last = vec![-1i128];
    last.extend(js.iter().map(|&j| if j % 2 == 0 { 1 } else { -1 }));
    m.push(last);
    oracle_det(&m) % 11 == 0
}

#[test]
fn filtered_and_closed_lists_degree_twelve() {
    let cfg = FilterConfig {
        degree: 12,
        toggles: FilterToggles::standard(),
    };
    let list = restricted_list(&cfg, false).unwrap();
    let oracle: Vec<Scenario> = enumerate(12)
        .unwrap()
        .filter(|s| oracle_keep_twelve(s.entries()))
        .collect();
    assert_eq!(list, oracle);
    assert_eq!(
        counts_by_type(&list, 12),
        [0, 6, 718, 5210, 8918, 5405, 1352, 141, 5, 0, 0]
    );

    let closed = restricted_list(&cfg, true).unwrap();
    assert_eq!(
        counts_by_type(&closed, 12),
        [1, 279, 3892, 12073, 13661, 6685, 1491, 146, 5, 0, 0]
    );
    assert_eq!(close_under_descendants(&closed).unwrap(), closed);
    assert!(list.iter().all(|s| closed
        .binary_search_by(|c| { c.type_of().cmp(&s.type_of()).then_with(|| c.cmp(s)) })
        .is_ok()));

    // every dropped scenario violates an enabled rule
    let filter = ScenarioFilter::new(cfg).unwrap();
    let rules = divisibility_rules(12).unwrap();
    for s in enumerate(12).unwrap().step_by(97) {
        if !filter.keeps(&s).unwrap() {
            assert!(
                !delta_keep(&s).unwrap() || rules.iter().any(|r| r.excludes(&s)),
                "{s:?}"
            );
        }
    }
}

#[test]
fn degree_six_rules_cover_the_example() {
    let rules = divisibility_rules(6).unwrap();
    let s: Scenario = "0,1,2,1,3".parse().unwrap();
    assert!(rules.iter().any(|r| r.indices == [2, 4] && r.excludes(&s)));
}

fn scenario_strategy(d: usize) -> impl Strategy<Value = Scenario> {
    proptest::collection::vec(0u8..(d as u8), d - 2).prop_map(move |raw| {
        let mut e = vec![0u8];
        let mut max = 0;
        for x in raw {
            let v = x % (max + 2);
            max = max.max(v);
            e.push(v);
        }
        Scenario::new(e).unwrap()
    })
}

proptest! {
    #[test]
    fn closure_is_idempotent(list in proptest::collection::vec(scenario_strategy(9), 0..8)) {
        let once = close_under_descendants(&list).unwrap();
        prop_assert_eq!(close_under_descendants(&once).unwrap(), once.clone());
        for s in &list {
            prop_assert!(once.contains(s));
        }
    }

    #[test]
    fn parse_round_trip(s in scenario_strategy(11)) {
        prop_assert_eq!(s.to_string().parse::<Scenario>().unwrap(), s);
    }
}
