use sqrt2_collatz::parity::{
    appendix_enumeration, markov_pr, markov_series, stationary, stationary_odd, ParityDistribution,
    ParityError, ParityKernel,
};
use sqrt2_collatz::QSqrt2;

#[test]
fn markov_matches_enumeration() {
    for r in 2..=18 {
        assert_eq!(markov_pr(r), appendix_enumeration(r).unwrap(), "r={r}");
    }
}

#[test]
fn weight_is_conserved_exactly() {
    let kernel = ParityKernel::default();
    let mut dist = ParityDistribution::uniform();
    for _ in 0..40 {
        dist = dist.advance(&kernel);
        assert_eq!(dist.total(), QSqrt2::one());
    }
}

#[test]
fn series_head_and_limit() {
    let s = markov_series(60);
    let half = QSqrt2::from_ratios((1, 2), (0, 1));
    assert_eq!((s[0].clone(), s[1].clone()), (half.clone(), half));
    let limit = stationary_odd().unwrap();
    assert_eq!(limit, QSqrt2::from_ratios((8, 23), (3, 23)));
    assert!((s[60].to_f64() - limit.to_f64()).abs() < 1e-9);
}

#[test]
fn stationary_is_fixed() {
    let kernel = ParityKernel::default();
    let pi = stationary(&kernel).unwrap();
    assert_eq!(pi.advance(&kernel), pi);
}

#[test]
fn enumeration_range() {
    assert!(matches!(appendix_enumeration(1), Err(ParityError::OutOfRange { r: 1 })));
    assert!(matches!(appendix_enumeration(26), Err(ParityError::OutOfRange { r: 26 })));
}
