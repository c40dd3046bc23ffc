//! Turning normalized compound constituents into a surface segmentation.
//!
//! Given a word `x` of `n` characters and constituents `c1..ck`, find
//! boundaries `0 = r0 < r1 < ... < rk = n` minimizing the summed Levenshtein
//! distance between each segment `x[r(i-1)..ri]` and `ci`. Ties go to the
//! candidate whose per-segment cost vector is lexicographically greater
//! (edits pushed towards earlier segments), then to the lexicographically
//! smaller boundary list.
//!
//! Two solvers are provided. [`Aligner::bruteforce`] enumerates every
//! boundary set. [`Aligner::fast`] enumerates per-segment length offsets
//! `oi = |si| - |ci|` in order of increasing `sum |oi|`, which is a lower
//! bound on the cost of the induced segmentation, and stops once that bound
//! exceeds the best cost found.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::text::{Boundaries, Segmentation, Word};

pub const DEFAULT_MAX_CANDIDATES: u64 = 10_000_000;

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

pub(crate) fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let above = row[j + 1];
            let sub = diag + usize::from(ca != cb);
            row[j + 1] = sub.min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[b.len()]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentResult {
    segmentation: Segmentation,
    per_segment_costs: Vec<usize>,
    total_cost: usize,
}

impl AlignmentResult {
    pub fn segmentation(&self) -> &Segmentation {
        &self.segmentation
    }

    pub fn boundaries(&self) -> &Boundaries {
        self.segmentation.boundaries()
    }

    pub fn segments(&self) -> &[String] {
        self.segmentation.segments()
    }

    pub fn per_segment_costs(&self) -> &[usize] {
        &self.per_segment_costs
    }

    pub fn total_cost(&self) -> usize {
        self.total_cost
    }
}

/// Ordering of two candidates; `Less` means `a` is preferred.
pub fn preference(a_costs: &[usize], a_bounds: &[usize], b_costs: &[usize], b_bounds: &[usize]) -> Ordering {
    let a_total: usize = a_costs.iter().sum();
    let b_total: usize = b_costs.iter().sum();
    a_total
        .cmp(&b_total)
        .then_with(|| b_costs.cmp(a_costs))
        .then_with(|| a_bounds.cmp(b_bounds))
}

/// Pick between two equal-cost alignments.
pub fn tie_break<'a>(a: &'a AlignmentResult, b: &'a AlignmentResult) -> Result<&'a AlignmentResult> {
    if a.total_cost != b.total_cost {
        return Err(Error::UnequalCost(a.total_cost, b.total_cost));
    }
    let order = preference(
        &a.per_segment_costs,
        a.boundaries().indices(),
        &b.per_segment_costs,
        b.boundaries().indices(),
    );
    Ok(if order == Ordering::Greater { b } else { a })
}

/// Per-segment length offsets: segment `i` has length `|ci| + oi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OffsetVector(pub Vec<i64>);

impl OffsetVector {
    pub fn bound(&self) -> u64 {
        self.0.iter().map(|o| o.unsigned_abs()).sum()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }
}

/// All `k`-vectors with `sum |oi| = bound` and `sum oi = delta`, in
/// descending lexicographic order.
pub fn enumerate_offsets(k: usize, delta: i64, bound: u64) -> Vec<OffsetVector> {
    let mut out = Vec::new();
    for_each_offset(k, delta, bound, None, |o| out.push(OffsetVector(o.to_vec())));
    out
}

/// Walks the offset vectors without materializing them. `mins` restricts
/// each coordinate from below.
fn for_each_offset(k: usize, delta: i64, bound: u64, mins: Option<&[i64]>, mut visit: impl FnMut(&[i64])) {
    if k == 0 || bound < delta.unsigned_abs() || !(bound - delta.unsigned_abs()).is_multiple_of(2) {
        return;
    }
    let bound = bound as i64;
    // positive and negative mass
    let pos = (bound + delta) / 2;
    let neg = (bound - delta) / 2;
    let mut cur = vec![0i64; k];
    walk(0, pos, neg, mins, &mut cur, &mut visit);
}

fn walk(at: usize, pos: i64, neg: i64, mins: Option<&[i64]>, cur: &mut [i64], visit: &mut impl FnMut(&[i64])) {
    let k = cur.len();
    let lo = mins.map_or(i64::MIN, |m| m[at]);
    if at + 1 == k {
        let v = match (pos, neg) {
            (p, 0) => p,
            (0, n) => -n,
            _ => return,
        };
        if v >= lo {
            cur[at] = v;
            visit(cur);
        }
        return;
    }
    let mut v = pos;
    while v >= -neg && v >= lo {
        cur[at] = v;
        if v >= 0 {
            walk(at + 1, pos - v, neg, mins, cur, visit);
        } else {
            walk(at + 1, pos, neg + v, mins, cur, visit);
        }
        v -= 1;
    }
}

/// One candidate examined by [`Aligner::fast_traced`].
#[derive(Debug, Clone)]
pub struct Candidate<'a> {
    pub offsets: &'a [i64],
    pub bound: usize,
    pub boundaries: &'a [usize],
    pub costs: &'a [usize],
    pub total: usize,
}

struct Problem {
    word: Vec<char>,
    constituents: Vec<Vec<char>>,
}

impl Problem {
    fn new<S: AsRef<str>>(word: &Word, constituents: &[S]) -> Result<Self> {
        if constituents.is_empty() {
            return Err(Error::NoConstituents(word.text().into()));
        }
        if constituents.iter().any(|c| c.as_ref().is_empty()) {
            return Err(Error::EmptyConstituent(word.text().into()));
        }
        let chars: Vec<char> = word.text().chars().collect();
        if chars.len() < constituents.len() {
            return Err(Error::TooFewCharacters {
                word: word.text().into(),
                len: chars.len(),
                parts: constituents.len(),
            });
        }
        Ok(Problem {
            word: chars,
            constituents: constituents.iter().map(|c| c.as_ref().chars().collect()).collect(),
        })
    }

    fn costs(&self, bounds: &[usize], out: &mut Vec<usize>) {
        out.clear();
        out.extend(
            bounds
                .windows(2)
                .zip(&self.constituents)
                .map(|(w, c)| levenshtein_chars(&self.word[w[0]..w[1]], c)),
        );
    }
}

#[derive(Default)]
struct Best {
    costs: Vec<usize>,
    bounds: Vec<usize>,
    total: Option<usize>,
}

impl Best {
    fn offer(&mut self, costs: &[usize], bounds: &[usize]) {
        let better = match self.total {
            None => true,
            Some(_) => preference(costs, bounds, &self.costs, &self.bounds) == Ordering::Less,
        };
        if better {
            self.costs.clear();
            self.costs.extend_from_slice(costs);
            self.bounds.clear();
            self.bounds.extend_from_slice(bounds);
            self.total = Some(costs.iter().sum());
        }
    }

    fn finish(self, word: &Word) -> Result<AlignmentResult> {
        let total_cost = self.total.expect("a valid segmentation exists when n >= k");
        let segmentation = Segmentation::new(word.clone(), Boundaries::new(self.bounds)?)?;
        Ok(AlignmentResult { segmentation, per_segment_costs: self.costs, total_cost })
    }
}

/// Alignment solver with a cap on the number of candidates examined per word.
#[derive(Debug, Clone, Copy)]
pub struct Aligner {
    pub max_candidates: u64,
}

impl Default for Aligner {
    fn default() -> Self {
        Aligner { max_candidates: DEFAULT_MAX_CANDIDATES }
    }
}

impl Aligner {
    pub fn new(max_candidates: u64) -> Self {
        Aligner { max_candidates }
    }

    /// Exhaustive search over all `C(n-1, k-1)` interior boundary sets.
    pub fn bruteforce<S: AsRef<str>>(&self, word: &Word, constituents: &[S]) -> Result<AlignmentResult> {
        let problem = Problem::new(word, constituents)?;
        let n = problem.word.len();
        let k = problem.constituents.len();

        let mut interior: Vec<usize> = (1..k).collect();
        let mut bounds = Vec::with_capacity(k + 1);
        let mut costs = Vec::with_capacity(k);
        let mut best = Best::default();
        let mut examined = 0u64;
        loop {
            examined += 1;
            if examined > self.max_candidates {
                return Err(Error::CandidateCap { word: word.text().into(), cap: self.max_candidates });
            }
            bounds.clear();
            bounds.push(0);
            bounds.extend_from_slice(&interior);
            bounds.push(n);
            problem.costs(&bounds, &mut costs);
            best.offer(&costs, &bounds);

            // next (k-1)-combination of 1..n-1 in lexicographic order
            let m = interior.len();
            let Some(i) = (0..m).rev().find(|&i| interior[i] < n - m + i) else {
                break;
            };
            interior[i] += 1;
            for j in i + 1..m {
                interior[j] = interior[j - 1] + 1;
            }
        }
        best.finish(word)
    }

    /// Search in order of increasing length-difference lower bound.
    pub fn fast<S: AsRef<str>>(&self, word: &Word, constituents: &[S]) -> Result<AlignmentResult> {
        self.fast_traced(word, constituents, |_| {})
    }

    /// Like [`Aligner::fast`], reporting every examined candidate to `trace`.
    pub fn fast_traced<S: AsRef<str>>(
        &self,
        word: &Word,
        constituents: &[S],
        mut trace: impl FnMut(&Candidate<'_>),
    ) -> Result<AlignmentResult> {
        let problem = Problem::new(word, constituents)?;
        let n = problem.word.len() as i64;
        let lens: Vec<i64> = problem.constituents.iter().map(|c| c.len() as i64).collect();
        let len_sum: i64 = lens.iter().sum();
        let delta = n - len_sum;
        // segments must keep at least one character
        let mins: Vec<i64> = lens.iter().map(|l| 1 - l).collect();
        let max_bound = (n + len_sum) as u64;

        let mut best = Best::default();
        let mut bounds = Vec::with_capacity(lens.len() + 1);
        let mut costs = Vec::with_capacity(lens.len());
        let mut examined = 0u64;
        let mut capped = false;

        let mut bound = delta.unsigned_abs();
        while bound <= max_bound && best.total.is_none_or(|b| bound <= b as u64) {
            for_each_offset(lens.len(), delta, bound, Some(&mins), |offsets| {
                if capped {
                    return;
                }
                examined += 1;
                if examined > self.max_candidates {
                    capped = true;
                    return;
                }
                bounds.clear();
                bounds.push(0usize);
                let mut acc = 0i64;
                for (len, o) in lens.iter().zip(offsets) {
                    acc += len + o;
                    bounds.push(acc as usize);
                }
                problem.costs(&bounds, &mut costs);
                trace(&Candidate {
                    offsets,
                    bound: bound as usize,
                    boundaries: &bounds,
                    costs: &costs,
                    total: costs.iter().sum(),
                });
                best.offer(&costs, &bounds);
            });
            if capped {
                return Err(Error::CandidateCap { word: word.text().into(), cap: self.max_candidates });
            }
            // sum |oi| and sum oi share parity
            bound += 2;
        }
        best.finish(word)
    }
}

/// Recompute the alignment cost of a given boundary set.
pub fn total_cost<S: AsRef<str>>(word: &Word, boundaries: &Boundaries, constituents: &[S]) -> Result<AlignmentResult> {
    if boundaries.segments() != constituents.len() {
        return Err(Error::ConstituentCount { expected: boundaries.segments(), got: constituents.len() });
    }
    let segmentation = Segmentation::new(word.clone(), boundaries.clone())?;
    let per_segment_costs: Vec<usize> = segmentation
        .segments()
        .iter()
        .zip(constituents)
        .map(|(s, c)| levenshtein(s, c.as_ref()))
        .collect();
    let total_cost = per_segment_costs.iter().sum();
    Ok(AlignmentResult { segmentation, per_segment_costs, total_cost })
}

pub fn align_bruteforce<S: AsRef<str>>(word: &Word, constituents: &[S]) -> Result<AlignmentResult> {
    Aligner::default().bruteforce(word, constituents)
}

pub fn align_fast<S: AsRef<str>>(word: &Word, constituents: &[S]) -> Result<AlignmentResult> {
    Aligner::default().fast(word, constituents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::new(s, "en").unwrap()
    }

    // Full-table Wagner-Fischer, kept separate from the two-row version.
    fn dp_table(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in t.iter_mut().enumerate() {
            row[0] = i;
        }
        for (j, cell) in t[0].iter_mut().enumerate() {
            *cell = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let sub = t[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
                t[i][j] = sub.min(t[i - 1][j] + 1).min(t[i][j - 1] + 1);
            }
        }
        t[a.len()][b.len()]
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("maid", "maid"), 0);
        assert_eq!(levenshtein("brides", "bride"), 1);
        assert_eq!(dp_table("kitten", "sitting"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("naïve", "naive"), 1);
    }

    #[test]
    fn total_cost_examples() {
        let r = total_cost(&w("bridesmaid"), &Boundaries::new(vec![0, 6, 10]).unwrap(), &["bride", "maid"]).unwrap();
        assert_eq!(r.per_segment_costs(), [1, 0]);
        assert_eq!(r.total_cost(), 1);

        let r = total_cost(&w("maid"), &Boundaries::new(vec![0, 4]).unwrap(), &["maid"]).unwrap();
        assert_eq!((r.per_segment_costs(), r.total_cost()), (&[0][..], 0));

        let r = total_cost(&w("bridesmaid"), &Boundaries::new(vec![0, 5, 10]).unwrap(), &["bride", "maid"]).unwrap();
        assert_eq!(r.per_segment_costs(), [0, 1]);

        let err = total_cost(&w("bridesmaid"), &Boundaries::new(vec![0, 10]).unwrap(), &["bride", "maid"]);
        assert!(matches!(err, Err(Error::ConstituentCount { .. })));
    }

    #[test]
    fn bridesmaid_prefers_brides_maid() {
        for r in [align_bruteforce(&w("bridesmaid"), &["bride", "maid"]), align_fast(&w("bridesmaid"), &["bride", "maid"])] {
            let r = r.unwrap();
            assert_eq!(r.segments(), ["brides", "maid"]);
            assert_eq!(r.per_segment_costs(), [1, 0]);
            assert_eq!(r.boundaries().indices(), [0, 6, 10]);
        }
    }

    #[test]
    fn single_constituent_takes_whole_word() {
        let r = align_bruteforce(&w("maid"), &["maid"]).unwrap();
        assert_eq!((r.segments(), r.total_cost()), (&["maid".to_string()][..], 0));
        let r = align_fast(&w("maid"), &["girl"]).unwrap();
        assert_eq!(r.boundaries().indices(), [0, 4]);
    }

    #[test]
    fn sideexperiments() {
        let r = align_bruteforce(&w("sideexperiments"), &["side", "experiment"]).unwrap();
        assert_eq!(r.segments(), ["side", "experiments"]);
        assert_eq!(r.total_cost(), 1);
        assert_eq!(align_fast(&w("sideexperiments"), &["side", "experiment"]).unwrap(), r);
    }

    #[test]
    fn highwayman_three_way() {
        let r = align_fast(&w("highwayman"), &["high", "way", "man"]).unwrap();
        assert_eq!(r.segments(), ["high", "way", "man"]);
        assert_eq!(r.total_cost(), 0);
    }

    #[test]
    fn alignment_errors() {
        assert!(matches!(align_fast(&w("ab"), &["a", "b", "c"]), Err(Error::TooFewCharacters { .. })));
        assert!(matches!(align_bruteforce(&w("ab"), &["a", "b", "c"]), Err(Error::TooFewCharacters { .. })));
        assert!(matches!(align_fast(&w("ab"), &["a", ""]), Err(Error::EmptyConstituent(_))));
        let none: [&str; 0] = [];
        assert!(matches!(align_fast(&w("ab"), &none), Err(Error::NoConstituents(_))));
    }

    #[test]
    fn candidate_cap_is_an_error() {
        let word = w("abcdefghijklmnopqrst");
        let cs = ["zz", "yy", "xx", "ww"];
        assert!(matches!(Aligner::new(5).bruteforce(&word, &cs), Err(Error::CandidateCap { cap: 5, .. })));
        assert!(matches!(Aligner::new(5).fast(&word, &cs), Err(Error::CandidateCap { cap: 5, .. })));
    }

    #[test]
    fn tie_break_examples() {
        let word = w("bridesmaid");
        let a = total_cost(&word, &Boundaries::new(vec![0, 6, 10]).unwrap(), &["bride", "maid"]).unwrap();
        let b = total_cost(&word, &Boundaries::new(vec![0, 5, 10]).unwrap(), &["bride", "maid"]).unwrap();
        assert_eq!(tie_break(&a, &b).unwrap().per_segment_costs(), [1, 0]);
        assert_eq!(tie_break(&b, &a).unwrap().per_segment_costs(), [1, 0]);

        // identical cost vectors: smaller boundary list wins
        let word = w("abcdef");
        let a = total_cost(&word, &Boundaries::new(vec![0, 3, 6]).unwrap(), &["xyz", "xyz"]).unwrap();
        let b = total_cost(&word, &Boundaries::new(vec![0, 4, 6]).unwrap(), &["xyzd", "xyz"]).unwrap();
        assert_eq!(a.per_segment_costs(), b.per_segment_costs());
        assert_eq!(tie_break(&b, &a).unwrap().boundaries().indices(), [0, 3, 6]);

        assert_eq!(preference(&[2, 0, 0], &[0, 1, 2, 3], &[1, 1, 0], &[0, 1, 2, 3]), Ordering::Less);

        let c = total_cost(&word, &Boundaries::new(vec![0, 6]).unwrap(), &["abcdef"]).unwrap();
        assert!(matches!(tie_break(&a, &c), Err(Error::UnequalCost(6, 0))));
    }

    // Independent enumeration oracle: every vector in [-b, b]^k.
    fn offsets_oracle(k: usize, delta: i64, bound: u64) -> Vec<Vec<i64>> {
        let b = bound as i64;
        let mut out = vec![vec![]];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i64>| {
                    (-b..=b).map(move |x| {
                        let mut v = v.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out.retain(|v| v.iter().map(|x| x.unsigned_abs()).sum::<u64>() == bound && v.iter().sum::<i64>() == delta);
        out
    }

    #[test]
    fn offset_examples() {
        let got = |k, d, b| enumerate_offsets(k, d, b).into_iter().map(|o| o.0).collect::<Vec<_>>();
        assert_eq!(got(2, 0, 0), vec![vec![0, 0]]);
        assert_eq!(got(2, 1, 1), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(got(2, 0, 2), vec![vec![1, -1], vec![-1, 1]]);
        assert_eq!(offsets_oracle(2, 0, 2), vec![vec![-1, 1], vec![1, -1]]);
        assert!(got(2, 1, 2).is_empty());
        assert!(got(3, 3, 1).is_empty());
    }

    proptest! {
        #[test]
        fn offsets_match_oracle(k in 1usize..4, delta in -4i64..5, bound in 0u64..6) {
            let mut got: Vec<Vec<i64>> = enumerate_offsets(k, delta, bound).into_iter().map(|o| o.0).collect();
            let mut want = offsets_oracle(k, delta, bound);
            got.sort();
            want.sort();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn levenshtein_matches_table(a in "[abc]{0,7}", b in "[abc]{0,7}") {
            prop_assert_eq!(levenshtein(&a, &b), dp_table(&a, &b));
        }

        #[test]
        fn fast_equals_bruteforce(word in "[abcd]{1,12}", cs in proptest::collection::vec("[abcd]{1,5}", 1..4)) {
            prop_assume!(word.chars().count() >= cs.len());
            let word = w(&word);
            prop_assert_eq!(align_fast(&word, &cs).unwrap(), align_bruteforce(&word, &cs).unwrap());
        }

        #[test]
        fn zero_cost_iff_concatenation(word in "[ab]{1,8}", cs in proptest::collection::vec("[ab]{1,4}", 1..4)) {
            prop_assume!(word.chars().count() >= cs.len());
            let r = align_fast(&w(&word), &cs).unwrap();
            prop_assert_eq!(r.total_cost() == 0, cs.concat() == word);
            prop_assert_eq!(r.segments().concat(), word);
        }
    }
}
