//! Cycle detection and cycling-vs-divergent censuses.
//!
//! A divergent verdict only means the caps were hit first. It is never a proof.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::map::step;

pub const DEFAULT_ITERATION_CAP: u64 = 20_000;
pub const DEFAULT_VALUE_CAP_BITS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleLimits {
    /// Maximum number of map evaluations spent searching for a repeat.
    pub iteration_cap: u64,
    /// Give up once an iterate has more bits than this.
    pub value_cap_bits: u64,
}

impl Default for CycleLimits {
    fn default() -> Self {
        Self {
            iteration_cap: DEFAULT_ITERATION_CAP,
            value_cap_bits: DEFAULT_VALUE_CAP_BITS,
        }
    }
}

impl CycleLimits {
    pub fn with_iteration_cap(iteration_cap: u64) -> Self {
        Self {
            iteration_cap,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    pub start_n: BigUint,
    /// Minimal `m` with `f^(m+r)(n) = f^m(n)`.
    pub pre_period: u64,
    /// Minimal `r > 0` for that `m`.
    pub period: u64,
    /// The cycle, rotated to start at its smallest member.
    pub cycle_members: Vec<BigUint>,
}

impl CycleReport {
    pub fn members_u64(&self) -> Vec<u64> {
        self.cycle_members
            .iter()
            .map(|v| v.to_u64().expect("cycle member fits in u64"))
            .collect()
    }

    pub fn min_member(&self) -> &BigUint {
        &self.cycle_members[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceReason {
    IterationCap,
    ValueCap { bits: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleOutcome {
    Cycle(CycleReport),
    /// Heuristic verdict: no repeat was found before a cap was reached.
    Divergent {
        start_n: BigUint,
        iterations: u64,
        reason: DivergenceReason,
    },
}

impl CycleOutcome {
    pub fn is_cycle(&self) -> bool {
        matches!(self, CycleOutcome::Cycle(_))
    }

    pub fn cycle(&self) -> Option<&CycleReport> {
        match self {
            CycleOutcome::Cycle(report) => Some(report),
            CycleOutcome::Divergent { .. } => None,
        }
    }
}

/// Brent's algorithm over exact iterates of [`step`], default value cap.
pub fn detect_cycle(n: &BigUint, iteration_cap: u64) -> CycleOutcome {
    detect_cycle_with(n, CycleLimits::with_iteration_cap(iteration_cap))
}

pub fn detect_cycle_with(n: &BigUint, limits: CycleLimits) -> CycleOutcome {
    let divergent = |iterations, reason| CycleOutcome::Divergent {
        start_n: n.clone(),
        iterations,
        reason,
    };

    let mut power = 1u64;
    let mut period = 1u64;
    let mut tortoise = n.clone();
    let mut hare = step(n);
    let mut evaluations = 1u64;
    while tortoise != hare {
        if evaluations >= limits.iteration_cap {
            return divergent(evaluations, DivergenceReason::IterationCap);
        }
        if hare.bits() > limits.value_cap_bits {
            return divergent(
                evaluations,
                DivergenceReason::ValueCap { bits: hare.bits() },
            );
        }
        if power == period {
            tortoise = hare.clone();
            power *= 2;
            period = 0;
        }
        hare = step(&hare);
        period += 1;
        evaluations += 1;
    }

    // hare runs `period` steps ahead; they first meet at the cycle entry
    let mut tortoise = n.clone();
    let mut hare = n.clone();
    for _ in 0..period {
        hare = step(&hare);
    }
    let mut pre_period = 0u64;
    while tortoise != hare {
        tortoise = step(&tortoise);
        hare = step(&hare);
        pre_period += 1;
    }

    let mut members = Vec::with_capacity(period as usize);
    let mut value = tortoise;
    for _ in 0..period {
        let next = step(&value);
        members.push(value);
        value = next;
    }
    let min_at = members
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    members.rotate_left(min_at);

    CycleOutcome::Cycle(CycleReport {
        start_n: n.clone(),
        pre_period,
        period,
        cycle_members: members,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedRange {
    pub lo: u64,
    pub hi: u64,
    /// Ordered by `start_n`.
    pub cycling: Vec<CycleReport>,
    /// Ordered ascending.
    pub divergent: Vec<u64>,
    pub iteration_cap: u64,
    pub value_cap_bits: u64,
}

impl ClassifiedRange {
    /// Cycling start values whose cycle has `min_member` as smallest element.
    pub fn reaching(&self, min_member: u64) -> Vec<u64> {
        self.cycling
            .iter()
            .filter(|r| r.min_member() == &BigUint::from(min_member))
            .map(|r| r.start_n.to_u64().expect("range values fit in u64"))
            .collect()
    }

    /// Distinct cycles found, by smallest member.
    pub fn distinct_cycles(&self) -> Vec<Vec<u64>> {
        let mut cycles: Vec<Vec<u64>> = self.cycling.iter().map(|r| r.members_u64()).collect();
        cycles.sort();
        cycles.dedup();
        cycles
    }
}

/// Runs [`detect_cycle_with`] on every `n` in `lo..hi` in parallel. The merge
/// is ordered by `n`, so the result does not depend on scheduling.
pub fn classify_range(lo: u64, hi: u64, limits: CycleLimits) -> ClassifiedRange {
    assert!(lo < hi, "classify_range needs lo < hi");
    let outcomes: Vec<CycleOutcome> = (lo..hi)
        .into_par_iter()
        .map(|n| detect_cycle_with(&BigUint::from(n), limits))
        .collect();

    let mut cycling = Vec::new();
    let mut divergent = Vec::new();
    for (n, outcome) in (lo..hi).zip(outcomes) {
        match outcome {
            CycleOutcome::Cycle(report) => cycling.push(report),
            CycleOutcome::Divergent { .. } => divergent.push(n),
        }
    }
    ClassifiedRange {
        lo,
        hi,
        cycling,
        divergent,
        iteration_cap: limits.iteration_cap,
        value_cap_bits: limits.value_cap_bits,
    }
}

/// `(n, #{cycling k ≤ n})` for `n` in `0..hi`.
pub fn counting_function(hi: u64, limits: CycleLimits) -> Vec<(u64, u64)> {
    let classified = classify_range(0, hi, limits);
    counting_from(&classified)
}

pub fn counting_from(classified: &ClassifiedRange) -> Vec<(u64, u64)> {
    let mut cycling = classified.cycling.iter().peekable();
    let mut count = 0u64;
    (classified.lo..classified.hi)
        .map(|n| {
            if cycling
                .peek()
                .is_some_and(|r| r.start_n == BigUint::from(n))
            {
                cycling.next();
                count += 1;
            }
            (n, count)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn five_cycle() {
        let report = detect_cycle(&big(7), 1000).cycle().cloned().unwrap();
        assert_eq!(report.members_u64(), vec![5, 7, 9, 12, 8]);
        assert_eq!(report.period, 5);
        assert_eq!(report.pre_period, 0);
    }

    #[test]
    fn fixed_point_one() {
        let report = detect_cycle(&big(2), 1000).cycle().cloned().unwrap();
        assert_eq!((report.pre_period, report.period), (1, 1));
        assert_eq!(report.members_u64(), vec![1]);
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let report = detect_cycle(&big(0), 10).cycle().cloned().unwrap();
        assert_eq!((report.pre_period, report.period), (0, 1));
        assert_eq!(report.members_u64(), vec![0]);
    }

    #[test]
    fn tight_cap_gives_divergent() {
        assert!(!detect_cycle(&big(15), 3).is_cycle());
    }

    #[test]
    fn value_cap_triggers() {
        let limits = CycleLimits {
            iteration_cap: 100_000,
            value_cap_bits: 32,
        };
        match detect_cycle_with(&big(73), limits) {
            CycleOutcome::Divergent {
                reason: DivergenceReason::ValueCap { bits },
                ..
            } => assert!(bits > 32),
            other => panic!("expected value cap, got {other:?}"),
        }
    }

    #[test]
    fn counting_function_tiny() {
        assert_eq!(counting_function(1, CycleLimits::default()), vec![(0, 1)]);
    }

    /// Direct scan for the minimal (m, r) over a stored orbit prefix.
    fn brute_force(n: u64, horizon: usize) -> Option<(u64, u64)> {
        let mut orbit = vec![big(n)];
        for _ in 0..horizon {
            let next = step(orbit.last().unwrap());
            orbit.push(next);
        }
        for end in 1..orbit.len() {
            if let Some(m) = orbit[..end].iter().position(|v| *v == orbit[end]) {
                return Some((m as u64, (end - m) as u64));
            }
        }
        None
    }

    #[test]
    fn minimality_against_direct_scan() {
        for n in 0..400u64 {
            let brute = brute_force(n, 200);
            match detect_cycle(&big(n), 20_000) {
                CycleOutcome::Cycle(r) if r.pre_period + r.period <= 200 => {
                    assert_eq!(brute, Some((r.pre_period, r.period)), "n={n}");
                }
                CycleOutcome::Cycle(_) => {}
                CycleOutcome::Divergent { .. } => assert_eq!(brute, None, "n={n}"),
            }
        }
    }
}
