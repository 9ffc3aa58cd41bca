use num_bigint::BigUint;
use sqrt2_collatz::cycles::{classify_range, counting_function, detect_cycle, CycleLimits, CycleOutcome};
use sqrt2_collatz::map::step_u64;

#[test]
fn small_range_structure() {
    let c = classify_range(0, 200, CycleLimits::default());
    assert_eq!(
        c.divergent,
        vec![73, 103, 104, 105, 107, 141, 145, 146, 147, 148, 149, 151, 152, 153, 155, 161, 175, 199]
    );
    assert_eq!(c.reaching(0), vec![0]);
    assert_eq!(c.reaching(1), vec![1, 2, 3, 4, 6]);
    assert_eq!(
        c.reaching(5),
        vec![5, 7, 8, 9, 10, 12, 13, 14, 18, 19, 20, 26, 27, 28, 38, 40, 54]
    );
    assert_eq!(
        c.distinct_cycles()[3],
        vec![15, 21, 29, 41, 57, 80, 56, 39, 55, 77, 108, 76, 53, 74, 52, 36, 25, 35, 49, 69, 97, 137, 193, 272, 192, 135, 190, 134, 94, 66, 46, 32, 22]
    );
    assert_eq!(c.cycling.len() + c.divergent.len(), 200);
}

#[test]
fn reported_cycles_are_closed() {
    let c = classify_range(0, 600, CycleLimits::default());
    for cycle in c.distinct_cycles() {
        for (i, &m) in cycle.iter().enumerate() {
            assert_eq!(step_u64(m), cycle[(i + 1) % cycle.len()]);
        }
        assert_eq!(*cycle.iter().min().unwrap(), cycle[0]);
    }
}

#[test]
fn counting_is_monotone_and_matches_classification() {
    let counts = counting_function(300, CycleLimits::default());
    assert!(counts.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].1 - w[0].1 <= 1));
    let c = classify_range(0, 300, CycleLimits::default());
    assert_eq!(counts.last().unwrap().1 as usize, c.cycling.len());
    assert_eq!(&counts[..8], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8)]);
}

#[test]
fn caps_only_turn_cycles_into_divergent_verdicts() {
    let n = BigUint::from(15u32);
    assert!(detect_cycle(&n, 20_000).is_cycle());
    assert!(matches!(detect_cycle(&n, 10), CycleOutcome::Divergent { .. }));
    assert!(!detect_cycle(&BigUint::from(73u32), 20_000).is_cycle());
}
