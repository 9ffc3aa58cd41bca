//! Preimages of the map and their Beatty-sequence structure.
//!
//! Every `m ≥ 1` falls in exactly one class:
//!
//! * no predecessor: `m = ⌊k(2+√2)⌋ = 2k + ⌊k√2⌋`
//! * one predecessor `4k`: `m = ⌊2k√2⌋`
//! * two predecessors `2k−1` and `4k−2`: `m = ⌊(2k−1)√2⌋`
//!
//! All interval tests compare squares of integers; nothing is rounded.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::LazyLock;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::isqrt::{floor_div_sqrt2_u64, floor_sqrt2_u64, isqrt};

pub const DEFAULT_NODE_CAP: usize = 10_000;
/// Censuses at or below this bound are cross-checked by enumeration.
pub const CENSUS_CROSS_CHECK_LIMIT: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredecessorError {
    #[error("m = {m}: enumeration finds {enumerated:?} but the Beatty form says {beatty:?}")]
    ClassificationMismatch {
        m: u64,
        enumerated: PredecessorKind,
        beatty: Option<PredecessorKind>,
    },
    #[error("census below {hi}: closed form {closed_form} but enumeration {enumerated}")]
    CensusMismatch {
        hi: u64,
        closed_form: u64,
        enumerated: u64,
    },
    #[error("node cap {cap} reached, tree may be incomplete")]
    CapExceeded { cap: usize, partial: Box<PredecessorTree> },
    #[error("more than two distinct words at level {level}")]
    PatternBreak { level: usize },
    #[error("not enough gaps to form two words at level {level}; raise hi")]
    InsufficientData { level: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredecessorKind {
    Zero,
    One,
    Two,
}

impl PredecessorKind {
    pub fn count(self) -> usize {
        match self {
            PredecessorKind::Zero => 0,
            PredecessorKind::One => 1,
            PredecessorKind::Two => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredecessorClass {
    pub m: u64,
    pub kind: PredecessorKind,
    pub witnesses: Vec<u64>,
    /// The `k` of the Beatty form that classifies `m`.
    pub beatty_k: Option<u64>,
}

/// Even `n` maps to `m` iff `m ≤ n/√2 < m+1`, i.e. `2m² ≤ n² < 2(m+1)²`.
fn even_maps_to(n: u64, m: u64) -> bool {
    let (n, m) = (n as u128, m as u128);
    n % 2 == 0 && 2 * m * m <= n * n && n * n < 2 * (m + 1) * (m + 1)
}

/// Odd `n` maps to `m` iff `m ≤ n√2 < m+1`, i.e. `m² ≤ 2n² < (m+1)²`.
fn odd_maps_to(n: u64, m: u64) -> bool {
    let (n, m) = (n as u128, m as u128);
    n % 2 == 1 && m * m <= 2 * n * n && 2 * n * n < (m + 1) * (m + 1)
}

/// All `n` with `f(n) = m`, ascending. Valid for `m < 2^61`.
pub fn predecessors_of(m: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(2);
    // odd candidates around [m/√2, (m+1)/√2)
    let lo = floor_div_sqrt2_u64(m);
    let hi = floor_div_sqrt2_u64(m + 1) + 1;
    out.extend((lo..=hi).filter(|&n| odd_maps_to(n, m)));
    // even candidates around [m√2, (m+1)√2)
    let lo = floor_sqrt2_u64(m);
    let hi = floor_sqrt2_u64(m + 1) + 1;
    out.extend((lo..=hi).filter(|&n| even_maps_to(n, m)));
    out.sort_unstable();
    out
}

/// `k ≥ 1` with `2k + ⌊k√2⌋ = m`, if any.
pub fn complementary_beatty_index(m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    // k ≈ m(2−√2)/2 = m − m/√2
    let estimate = m - floor_div_sqrt2_u64(m);
    (estimate.saturating_sub(2)..=estimate + 1)
        .filter(|&k| k >= 1)
        .find(|&k| 2 * k + floor_sqrt2_u64(k) == m)
}

/// `j ≥ 1` with `⌊j√2⌋ = m`, if any.
pub fn sqrt2_beatty_index(m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let estimate = floor_div_sqrt2_u64(m);
    (estimate.saturating_sub(1)..=estimate + 2)
        .filter(|&j| j >= 1)
        .find(|&j| floor_sqrt2_u64(j) == m)
}

/// Classification from the Beatty forms alone.
pub fn beatty_form(m: u64) -> Option<(PredecessorKind, u64)> {
    match (complementary_beatty_index(m), sqrt2_beatty_index(m)) {
        (Some(k), None) => Some((PredecessorKind::Zero, k)),
        (None, Some(j)) if j % 2 == 0 => Some((PredecessorKind::One, j / 2)),
        (None, Some(j)) => Some((PredecessorKind::Two, j.div_ceil(2))),
        _ => None,
    }
}

/// Classifies by enumeration and by Beatty form, failing if they disagree.
pub fn classify_predecessor(m: u64) -> Result<PredecessorClass, PredecessorError> {
    if m == 0 {
        return Err(PredecessorError::InvalidArgument("m must be positive"));
    }
    let witnesses = predecessors_of(m);
    let enumerated = match witnesses.len() {
        0 => PredecessorKind::Zero,
        1 => PredecessorKind::One,
        2 => PredecessorKind::Two,
        _ => unreachable!("at most one odd and two even candidates, never three hits"),
    };
    let form = beatty_form(m);
    let expected_witnesses = match form {
        Some((PredecessorKind::Zero, _)) => vec![],
        Some((PredecessorKind::One, k)) => vec![4 * k],
        Some((PredecessorKind::Two, k)) => vec![2 * k - 1, 4 * k - 2],
        None => vec![u64::MAX],
    };
    match form {
        Some((kind, k)) if kind == enumerated && expected_witnesses == witnesses => {
            Ok(PredecessorClass {
                m,
                kind,
                witnesses,
                beatty_k: Some(k),
            })
        }
        _ => Err(PredecessorError::ClassificationMismatch {
            m,
            enumerated,
            beatty: form.map(|f| f.0),
        }),
    }
}

/// Number of `m` in `[1, hi)` with no predecessor: `hi − 1 − ⌊hi/√2⌋`.
pub fn no_predecessor_closed_form(hi: u64) -> u64 {
    if hi <= 1 {
        return 0;
    }
    hi - 1 - floor_div_sqrt2_u64(hi)
}

/// Same count by enumerating predecessors of every `m`.
pub fn no_predecessor_enumerated(hi: u64) -> u64 {
    (1..hi.max(1))
        .into_par_iter()
        .filter(|&m| predecessors_of(m).is_empty())
        .count() as u64
}

/// The census by closed form, cross-checked by enumeration up to
/// [`CENSUS_CROSS_CHECK_LIMIT`].
pub fn no_predecessor_census(hi: u64) -> Result<u64, PredecessorError> {
    if hi == 0 {
        return Err(PredecessorError::InvalidArgument("hi must be at least 1"));
    }
    let closed_form = no_predecessor_closed_form(hi);
    if hi <= CENSUS_CROSS_CHECK_LIMIT {
        let enumerated = no_predecessor_enumerated(hi);
        if enumerated != closed_form {
            return Err(PredecessorError::CensusMismatch {
                hi,
                closed_form,
                enumerated,
            });
        }
    }
    Ok(closed_form)
}

/// The numbers in `[1, hi)` without predecessors, ascending.
pub fn no_predecessor_numbers(hi: u64) -> Vec<u64> {
    (1u64..)
        .map(|k| 2 * k + floor_sqrt2_u64(k))
        .take_while(|&m| m < hi)
        .collect()
}

/// `⌊(2+√2)·2^64⌋`, for a fixed-point route independent of `2n + ⌊n√2⌋`.
static TWO_PLUS_SQRT2_Q64: LazyLock<u128> = LazyLock::new(|| {
    let root = isqrt(&(BigUint::one() << 129u32));
    let value = (BigUint::one() << 65u32) + root;
    u128::try_from(value).expect("fits in 128 bits")
});

/// `⌊n(2+√2)⌋` from the fixed-point constant, settled exactly when the
/// enclosure straddles an integer. Valid for `n < 2^60`.
fn floor_two_plus_sqrt2(n: u64) -> u64 {
    let c = *TWO_PLUS_SQRT2_Q64;
    let lo = ((n as u128 * c) >> 64) as u64;
    let hi = ((n as u128 * (c + 1)) >> 64) as u64;
    if lo == hi {
        return lo;
    }
    // m ≤ 2n + n√2 ⇔ (m − 2n)² ≤ 2n² when m ≥ 2n
    let n2 = 2 * (n as u128) * (n as u128);
    (lo..=hi)
        .rev()
        .find(|&m| {
            let d = m.saturating_sub(2 * n) as u128;
            d * d <= n2
        })
        .expect("lo is a lower bound")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeattyCheck {
    pub hi: u64,
    pub ok: bool,
    /// First value covered zero or two times, or where the floor identity fails.
    pub counterexample: Option<u64>,
    pub sqrt2_count: u64,
    pub complement_count: u64,
}

/// Checks that `{⌊n√2⌋}` and `{⌊n(2+√2)⌋}` tile `[1, hi)` and that
/// `⌊n(2+√2)⌋ = 2n + ⌊n√2⌋` along the way.
pub fn beatty_partition_check(hi: u64) -> BeattyCheck {
    let mut cover = vec![0u8; hi.max(1) as usize];
    let mut sqrt2_count = 0u64;
    let mut complement_count = 0u64;
    let mut counterexample = None;

    for n in 1u64.. {
        let lower = floor_sqrt2_u64(n);
        if lower >= hi {
            break;
        }
        cover[lower as usize] += 1;
        sqrt2_count += 1;
        let upper = floor_two_plus_sqrt2(n);
        if upper != 2 * n + lower {
            counterexample.get_or_insert(upper);
        }
        if upper < hi {
            cover[upper as usize] += 1;
            complement_count += 1;
        }
    }
    if counterexample.is_none() {
        counterexample = (1..hi).find(|&m| cover[m as usize] != 1);
    }
    BeattyCheck {
        hi,
        ok: counterexample.is_none(),
        counterexample,
        sqrt2_count,
        complement_count,
    }
}

/// `{⌊n√2⌋} ∩ [1, hi)` and `{⌊n(2+√2)⌋} ∩ [1, hi)`.
pub fn beatty_sets(hi: u64) -> (Vec<u64>, Vec<u64>) {
    let lower = (1u64..)
        .map(floor_sqrt2_u64)
        .take_while(|&m| m < hi)
        .collect();
    (lower, no_predecessor_numbers(hi))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredecessorTree {
    pub root: u64,
    /// Parent to children (its predecessors), children ascending.
    pub edges: BTreeMap<u64, Vec<u64>>,
    pub leaves_without_predecessor: Vec<u64>,
    pub complete: bool,
    /// Some node is its own predecessor or is reached twice (0, or a root on a cycle).
    pub degenerate: bool,
}

impl PredecessorTree {
    pub fn nodes(&self) -> BTreeSet<u64> {
        let mut nodes = BTreeSet::from([self.root]);
        for (parent, children) in &self.edges {
            nodes.insert(*parent);
            nodes.extend(children);
        }
        nodes
    }

    pub fn edge_list(&self) -> Vec<(u64, u64)> {
        self.edges
            .iter()
            .flat_map(|(p, cs)| cs.iter().map(move |c| (*p, *c)))
            .collect()
    }

    /// Depth-first text rendering; leaves without predecessors end in `---`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut visited = BTreeSet::new();
        self.render_node(self.root, 0, &mut visited, &mut out);
        let status = if self.complete {
            "complete"
        } else {
            "incomplete"
        };
        let _ = writeln!(out, "({} nodes, {status})", self.nodes().len());
        out
    }

    fn render_node(&self, node: u64, depth: usize, visited: &mut BTreeSet<u64>, out: &mut String) {
        let indent = "    ".repeat(depth);
        let first_visit = visited.insert(node);
        let children = self.edges.get(&node).filter(|_| first_visit);
        match children {
            Some(cs) if !cs.is_empty() => {
                let _ = writeln!(out, "{indent}{node}");
                for &c in cs {
                    self.render_node(c, depth + 1, visited, out);
                }
            }
            _ if self.leaves_without_predecessor.contains(&node) => {
                let _ = writeln!(out, "{indent}{node} ---");
            }
            _ => {
                let _ = writeln!(out, "{indent}{node} ...");
            }
        }
    }
}

/// Breadth-first back-step expansion from `root`.
pub fn predecessor_tree(root: u64, node_cap: usize) -> Result<PredecessorTree, PredecessorError> {
    if node_cap == 0 {
        return Err(PredecessorError::InvalidArgument("node_cap must be at least 1"));
    }
    let mut tree = PredecessorTree {
        root,
        ..Default::default()
    };
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(node) = queue.pop_front() {
        let preds = predecessors_of(node);
        if preds.is_empty() {
            tree.leaves_without_predecessor.push(node);
            continue;
        }
        for &p in &preds {
            if seen.insert(p) {
                if seen.len() > node_cap {
                    tree.edges.insert(node, preds.clone());
                    tree.leaves_without_predecessor.sort_unstable();
                    return Err(PredecessorError::CapExceeded {
                        cap: node_cap,
                        partial: Box::new(tree),
                    });
                }
                queue.push_back(p);
            } else {
                tree.degenerate = true;
            }
        }
        tree.edges.insert(node, preds);
    }
    tree.leaves_without_predecessor.sort_unstable();
    tree.complete = true;
    Ok(tree)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapWordLevel {
    pub level: usize,
    pub short_gap: u64,
    pub long_gap: u64,
    /// `true` for the long letter.
    pub letters: Vec<bool>,
}

impl GapWordLevel {
    /// Level 0 as comma-separated gaps, higher levels with `a`/`A`, `b`/`B`, ….
    pub fn word_sequence(&self) -> String {
        if self.level == 0 {
            return self
                .letters
                .iter()
                .map(|&l| if l { self.long_gap } else { self.short_gap }.to_string())
                .collect::<Vec<_>>()
                .join(",");
        }
        let base = (b'a' + ((self.level - 1) % 26) as u8) as char;
        self.letters
            .iter()
            .map(|&l| if l { base.to_ascii_uppercase() } else { base })
            .collect()
    }
}

/// Groups one level's letters into the two words of the next level.
///
/// One letter never repeats and acts as a separator; the other comes in runs.
/// If the sequence starts with the separator, words are `separator + run`,
/// otherwise `run + separator`. The last, possibly truncated, word is dropped.
fn next_level(prev: &GapWordLevel) -> Result<GapWordLevel, PredecessorError> {
    let level = prev.level + 1;
    let letters = &prev.letters;
    let doubled = |x: bool| letters.windows(2).any(|w| w[0] == x && w[1] == x);
    let separator = match (doubled(false), doubled(true)) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => return Err(PredecessorError::PatternBreak { level }),
        (false, false) => return Err(PredecessorError::InsufficientData { level }),
    };
    let gap = |l: bool| if l { prev.long_gap } else { prev.short_gap };

    let mut words: Vec<u64> = Vec::new();
    let mut current = 0u64;
    let mut open = false;
    if letters.first() == Some(&separator) {
        for &l in letters {
            if l == separator && open {
                words.push(current);
                current = 0;
            }
            current += gap(l);
            open = true;
        }
    } else {
        for &l in letters {
            current += gap(l);
            if l == separator {
                words.push(current);
                current = 0;
            }
        }
    }

    let distinct: BTreeSet<u64> = words.iter().copied().collect();
    match distinct.len() {
        0 | 1 => Err(PredecessorError::InsufficientData { level }),
        2 => {
            let short_gap = *distinct.first().expect("two values");
            let long_gap = *distinct.last().expect("two values");
            Ok(GapWordLevel {
                level,
                short_gap,
                long_gap,
                letters: words.iter().map(|&w| w == long_gap).collect(),
            })
        }
        _ => Err(PredecessorError::PatternBreak { level }),
    }
}

/// Gap-word levels `0..=max_level` of the no-predecessor numbers below `hi`.
pub fn gap_words(hi: u64, max_level: usize) -> Result<Vec<GapWordLevel>, PredecessorError> {
    let numbers = no_predecessor_numbers(hi);
    if numbers.len() < 4 {
        return Err(PredecessorError::InsufficientData { level: 0 });
    }
    let gaps: Vec<u64> = std::iter::once(0)
        .chain(numbers.iter().copied())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let distinct: BTreeSet<u64> = gaps.iter().copied().collect();
    if distinct.len() != 2 {
        return Err(PredecessorError::PatternBreak { level: 0 });
    }
    let short_gap = *distinct.first().expect("two values");
    let long_gap = *distinct.last().expect("two values");
    let mut levels = vec![GapWordLevel {
        level: 0,
        short_gap,
        long_gap,
        letters: gaps.iter().map(|&g| g == long_gap).collect(),
    }];
    for _ in 0..max_level {
        let next = next_level(levels.last().expect("nonempty"))?;
        levels.push(next);
    }
    Ok(levels)
}

/// Convergents `p/q` of √2 starting from `1/0`: `p_{k+1} = 2p_k + p_{k−1}`.
pub fn sqrt2_convergents(count: usize) -> Vec<(BigUint, BigUint)> {
    let mut out = Vec::with_capacity(count);
    let (mut p_prev, mut q_prev) = (BigUint::one(), BigUint::from(0u8));
    let (mut p, mut q) = (BigUint::one(), BigUint::one());
    for _ in 0..count {
        out.push((p_prev.clone(), q_prev.clone()));
        let next_p = &p * 2u32 + &p_prev;
        let next_q = &q * 2u32 + &q_prev;
        p_prev = std::mem::replace(&mut p, next_p);
        q_prev = std::mem::replace(&mut q, next_q);
    }
    out
}

/// `(m, class)` rows for `m` in `lo..hi`, the layout of a predecessor table.
pub fn predecessor_table(lo: u64, hi: u64) -> Result<Vec<PredecessorClass>, PredecessorError> {
    (lo.max(1)..hi).map(classify_predecessor).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::step_u64;

    #[test]
    fn listed_predecessors() {
        assert_eq!(predecessors_of(73), vec![104]);
        assert_eq!(predecessors_of(3), Vec::<u64>::new());
        assert_eq!(predecessors_of(1), vec![1, 2]);
        assert_eq!(predecessors_of(0), vec![0]);
    }

    #[test]
    fn brute_force_preimages() {
        let mut preimages: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for n in 0..3000u64 {
            preimages.entry(step_u64(n)).or_default().push(n);
        }
        // every m < 2000 has all its preimages below 3000 (n ≤ (m+1)√2)
        for m in 0..2000u64 {
            let expected = preimages.get(&m).cloned().unwrap_or_default();
            assert_eq!(predecessors_of(m), expected, "m={m}");
        }
    }

    #[test]
    fn classification_examples() {
        let c = classify_predecessor(73).unwrap();
        assert_eq!(
            (c.kind, c.witnesses, c.beatty_k),
            (PredecessorKind::One, vec![104], Some(26))
        );
        let c = classify_predecessor(6).unwrap();
        assert_eq!((c.kind, c.beatty_k), (PredecessorKind::Zero, Some(2)));
        let c = classify_predecessor(1).unwrap();
        assert_eq!(
            (c.kind, c.witnesses, c.beatty_k),
            (PredecessorKind::Two, vec![1, 2], Some(1))
        );
        assert!(classify_predecessor(0).is_err());
    }

    #[test]
    fn small_censuses() {
        assert_eq!(no_predecessor_census(1).unwrap(), 0);
        assert_eq!(no_predecessor_census(10).unwrap(), 2);
        assert_eq!(no_predecessor_numbers(31), vec![3, 6, 10, 13, 17, 20, 23, 27, 30]);
    }

    #[test]
    fn beatty_small_ranges() {
        assert!(beatty_partition_check(2).ok);
        let check = beatty_partition_check(10);
        assert!(check.ok);
        assert_eq!(beatty_sets(10), (vec![1, 2, 4, 5, 7, 8, 9], vec![3, 6]));
    }

    #[test]
    fn trivial_trees() {
        let t = predecessor_tree(3, 10).unwrap();
        assert!(t.complete && t.edges.is_empty());
        assert_eq!(t.leaves_without_predecessor, vec![3]);

        let t = predecessor_tree(0, 10).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.edge_list(), vec![(0, 0)]);

        match predecessor_tree(73, 3) {
            Err(PredecessorError::CapExceeded { cap: 3, partial }) => assert!(!partial.complete),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn convergent_rows() {
        let c = sqrt2_convergents(9);
        let p: Vec<u64> = c.iter().map(|(p, _)| p.try_into().unwrap()).collect();
        let q: Vec<u64> = c.iter().map(|(_, q)| q.try_into().unwrap()).collect();
        assert_eq!(p, vec![1, 1, 3, 7, 17, 41, 99, 239, 577]);
        assert_eq!(q, vec![0, 1, 2, 5, 12, 29, 70, 169, 408]);
    }

    #[test]
    fn first_gap_levels() {
        let levels = gap_words(20_000, 1).unwrap();
        assert!(levels[0].word_sequence().starts_with("3,3,4,3,4,3,3,4,3,4,3,3,4"));
        assert_eq!((levels[1].short_gap, levels[1].long_gap), (7, 10));
        assert!(levels[1].word_sequence().starts_with("AaAaAaaAaAaa"));
    }

    #[test]
    fn fixed_point_route_matches_identity() {
        for n in 1..200_000u64 {
            assert_eq!(floor_two_plus_sqrt2(n), 2 * n + floor_sqrt2_u64(n));
        }
    }
}
