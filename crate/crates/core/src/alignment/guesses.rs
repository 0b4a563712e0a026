use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::segments::SegmentLadder;
use crate::numerics::Rational;
use crate::{Error, Result};

/// Largest ladder the enumeration accepts (active sets are `u128` bitmasks).
pub const MAX_ENUMERATED_SEGMENTS: usize = 127;

/// A forest edge between segments `low < high` enforcing
/// `alpha_low · R_low = alpha_high · R_high`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledEdge {
    pub low: usize,
    pub high: usize,
    pub alpha_low: u64,
    pub alpha_high: u64,
}

/// One enumeration candidate: an active segment set containing segment 1 and
/// a labelled alignment forest over it.
///
/// The minimal-interval estimate is not part of the guess: segments live in
/// multiplier space, so every guess is shared by all `tmin` candidates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlignmentGuess {
    active: Vec<usize>,
    edges: Vec<LabeledEdge>,
}

impl AlignmentGuess {
    /// Checks the structural invariants against a ladder and multiple bound.
    pub fn new(
        mut active: Vec<usize>,
        edges: Vec<LabeledEdge>,
        ladder: &SegmentLadder,
        psi: u64,
    ) -> Result<Self> {
        active.sort_unstable();
        active.dedup();
        if active.first() != Some(&1) {
            return Err(Error::InvalidCandidate("segment 1 must be active".into()));
        }
        if *active.last().unwrap() > ladder.len() {
            return Err(Error::InvalidCandidate(format!(
                "active segment {} exceeds ladder length {}",
                active.last().unwrap(),
                ladder.len()
            )));
        }
        let mut dsu = Dsu::new(ladder.len() + 1);
        for e in &edges {
            if e.low >= e.high
                || active.binary_search(&e.low).is_err()
                || active.binary_search(&e.high).is_err()
            {
                return Err(Error::InvalidCandidate(format!(
                    "edge {}-{} does not join two distinct active segments",
                    e.low, e.high
                )));
            }
            if e.alpha_low == 0 || e.alpha_high == 0 || e.alpha_low > psi || e.alpha_high > psi {
                return Err(Error::InvalidCandidate(format!(
                    "labels ({}, {}) outside [1, {psi}]",
                    e.alpha_low, e.alpha_high
                )));
            }
            if e.alpha_low.gcd(&e.alpha_high) != 1 {
                return Err(Error::InvalidCandidate("edge labels must be coprime".into()));
            }
            if !label_fits_window(ladder, e.high - e.low, e.alpha_low, e.alpha_high) {
                return Err(Error::InvalidCandidate(format!(
                    "labels ({}, {}) contradict the segment windows of {}-{}",
                    e.alpha_low, e.alpha_high, e.low, e.high
                )));
            }
            if !dsu.union(e.low, e.high) {
                return Err(Error::InvalidCandidate("edges contain a cycle".into()));
            }
        }
        Ok(AlignmentGuess { active, edges })
    }

    /// Skips validation; for exercising the beta algebra on arbitrary labels.
    #[cfg(test)]
    pub(crate) fn unchecked(active: Vec<usize>, edges: Vec<LabeledEdge>) -> Self {
        AlignmentGuess { active, edges }
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    /// Bit `ℓ−1` set for each active segment `ℓ`.
    pub fn active_mask(&self) -> u128 {
        self.active.iter().fold(0u128, |m, &l| m | (1u128 << (l - 1)))
    }

    /// Connected components of the forest, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let size = self.active.last().map_or(1, |&l| l + 1);
        let mut dsu = Dsu::new(size);
        for e in &self.edges {
            dsu.union(e.low, e.high);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_of_group: Vec<usize> = Vec::new();
        for &v in &self.active {
            let root = dsu.find(v);
            match root_of_group.iter().position(|&r| r == root) {
                Some(g) => groups[g].push(v),
                None => {
                    root_of_group.push(root);
                    groups.push(vec![v]);
                }
            }
        }
        groups
    }
}

/// `α_high/α_low` must lie in `[(1+ε)^{−d−1}, (1+ε)^{1−d}]` for `d = high − low`.
fn label_window(ladder: &SegmentLadder, gap: usize) -> (Rational, Rational) {
    let lo = ladder.growth_power(gap + 1).recip();
    let hi = ladder.growth_power(gap - 1).recip();
    (lo, hi)
}

fn label_fits_window(ladder: &SegmentLadder, gap: usize, alpha_low: u64, alpha_high: u64) -> bool {
    if gap == 0 || gap >= ladder.len() {
        return false;
    }
    let (lo, hi) = label_window(ladder, gap);
    let ratio = Rational::ratio(alpha_high as i64, alpha_low as i64);
    lo <= ratio && ratio <= hi
}

/// Coprime `(α_low, α_high)` pairs within `[1, psi]` that respect the window
/// for segments `gap` apart, in lexicographic order.
pub fn admissible_labels(ladder: &SegmentLadder, gap: usize, psi: u64) -> Vec<(u64, u64)> {
    if gap == 0 || gap >= ladder.len() {
        return Vec::new();
    }
    let (lo, hi) = label_window(ladder, gap);
    let mut out = Vec::new();
    for alpha_low in 1..=psi {
        let a = Rational::from_integer(alpha_low);
        let first = (&a * &lo).ceil().to_u64().unwrap_or(u64::MAX).max(1);
        let last = (&a * &hi).floor().to_u64().unwrap_or(u64::MAX).min(psi);
        let mut alpha_high = first;
        while alpha_high <= last {
            if alpha_low.gcd(&alpha_high) == 1 {
                out.push((alpha_low, alpha_high));
            }
            alpha_high += 1;
        }
    }
    out
}

/// Deterministic, budgeted stream of [`AlignmentGuess`]es.
///
/// Order: active sets by bitmask ascending, forests by their sorted edge lists
/// in lexicographic order, labels lexicographically with the last edge
/// varying fastest. Items are `(ordinal, guess)`.
pub struct GuessStream {
    segments: usize,
    budget: u64,
    yielded: u64,
    budget_exhausted: bool,
    finished: bool,
    /// `labels[d]` for segment gap `d`.
    labels: Vec<Vec<(u64, u64)>>,
    mask: u128,
    active: Vec<usize>,
    candidate_edges: Vec<(usize, usize)>,
    forest: Option<Vec<usize>>,
    odometer: Option<Vec<usize>>,
}

impl GuessStream {
    pub fn new(ladder: &SegmentLadder, psi: u64, budget: u64) -> Result<Self> {
        let segments = ladder.len();
        if segments > MAX_ENUMERATED_SEGMENTS {
            return Err(Error::Config(format!(
                "{segments} segments exceed the enumeration limit of {MAX_ENUMERATED_SEGMENTS}; increase epsilon"
            )));
        }
        if psi == 0 {
            return Err(Error::Config("psi must be at least 1".into()));
        }
        let labels = (0..segments).map(|d| admissible_labels(ladder, d, psi)).collect();
        let mut stream = GuessStream {
            segments,
            budget,
            yielded: 0,
            budget_exhausted: false,
            finished: false,
            labels,
            mask: 0,
            active: Vec::new(),
            candidate_edges: Vec::new(),
            forest: None,
            odometer: None,
        };
        stream.set_mask(1);
        Ok(stream)
    }

    /// True once the budget cut the stream short.
    pub fn budget_exhausted(&self) -> bool {
        self.budget_exhausted
    }

    pub fn yielded(&self) -> u64 {
        self.yielded
    }

    fn set_mask(&mut self, mask: u128) {
        self.mask = mask;
        self.active = (1..=self.segments).filter(|&l| mask & (1u128 << (l - 1)) != 0).collect();
        self.candidate_edges.clear();
        for (i, &a) in self.active.iter().enumerate() {
            for &b in &self.active[i + 1..] {
                self.candidate_edges.push((a, b));
            }
        }
        self.forest = None;
        self.odometer = None;
    }

    fn advance_mask(&mut self) -> bool {
        let next = self.mask + 2;
        if self.segments < 128 && next >= (1u128 << self.segments) {
            return false;
        }
        self.set_mask(next);
        true
    }

    fn extends_acyclic(&self, chosen: &[usize], extra: usize) -> bool {
        let mut dsu = Dsu::new(self.segments + 1);
        for &e in chosen {
            let (a, b) = self.candidate_edges[e];
            dsu.union(a, b);
        }
        let (a, b) = self.candidate_edges[extra];
        dsu.find(a) != dsu.find(b)
    }

    /// Moves to the next forest in lexicographic order of edge-index lists.
    fn advance_forest(&mut self) -> bool {
        let mut current = match self.forest.take() {
            None => {
                self.forest = Some(Vec::new());
                return true;
            }
            Some(f) => f,
        };
        let total = self.candidate_edges.len();
        let start = current.last().map_or(0, |&x| x + 1);
        if let Some(e) = (start..total).find(|&e| self.extends_acyclic(&current, e)) {
            current.push(e);
            self.forest = Some(current);
            return true;
        }
        while let Some(last) = current.pop() {
            if let Some(e) = (last + 1..total).find(|&e| self.extends_acyclic(&current, e)) {
                current.push(e);
                self.forest = Some(current);
                return true;
            }
        }
        false
    }

    fn current_guess(&self, odometer: &[usize]) -> AlignmentGuess {
        let forest = self.forest.as_ref().expect("forest selected");
        let edges = forest
            .iter()
            .zip(odometer)
            .map(|(&e, &pick)| {
                let (low, high) = self.candidate_edges[e];
                let (alpha_low, alpha_high) = self.labels[high - low][pick];
                LabeledEdge { low, high, alpha_low, alpha_high }
            })
            .collect();
        AlignmentGuess { active: self.active.clone(), edges }
    }

    fn next_unbudgeted(&mut self) -> Option<AlignmentGuess> {
        loop {
            if self.finished {
                return None;
            }
            if let Some(mut odometer) = self.odometer.take() {
                let guess = self.current_guess(&odometer);
                let forest = self.forest.as_ref().expect("forest selected");
                let mut carried = true;
                for pos in (0..odometer.len()).rev() {
                    let (low, high) = self.candidate_edges[forest[pos]];
                    odometer[pos] += 1;
                    if odometer[pos] < self.labels[high - low].len() {
                        carried = false;
                        break;
                    }
                    odometer[pos] = 0;
                }
                if !carried {
                    self.odometer = Some(odometer);
                }
                return Some(guess);
            }
            if self.advance_forest() {
                let forest = self.forest.as_ref().expect("forest selected");
                let labelled = forest.iter().all(|&e| {
                    let (low, high) = self.candidate_edges[e];
                    !self.labels[high - low].is_empty()
                });
                if labelled {
                    self.odometer = Some(vec![0; forest.len()]);
                }
                continue;
            }
            if !self.advance_mask() {
                self.finished = true;
            }
        }
    }
}

impl Iterator for GuessStream {
    type Item = (u64, AlignmentGuess);

    fn next(&mut self) -> Option<Self::Item> {
        if self.yielded >= self.budget {
            if !self.finished && !self.budget_exhausted && self.next_unbudgeted().is_some() {
                self.budget_exhausted = true;
            }
            self.finished = true;
            return None;
        }
        let guess = self.next_unbudgeted()?;
        let ordinal = self.yielded;
        self.yielded += 1;
        Some((ordinal, guess))
    }
}

/// `enumerate_guesses` as a free function.
pub fn enumerate_guesses(ladder: &SegmentLadder, psi: u64, budget: u64) -> Result<GuessStream> {
    GuessStream::new(ladder, psi, budget)
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(size: usize) -> Self {
        Dsu { parent: (0..size).collect() }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false when `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
