use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Pow, Signed};

use super::guesses::AlignmentGuess;
use super::segments::SegmentLadder;
use crate::numerics::Rational;
use crate::{Error, Result};

/// Scale factors `β_ℓ` with `R_ℓ = β_ℓ · R_source`, one per component vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Betas {
    pub source: usize,
    /// `(segment, β)` sorted by segment.
    pub values: Vec<(usize, Rational)>,
}

impl Betas {
    pub fn get(&self, segment: usize) -> Option<&Rational> {
        self.values
            .binary_search_by_key(&segment, |(s, _)| *s)
            .ok()
            .map(|i| &self.values[i].1)
    }
}

/// Propagates edge ratios outward from `source` along the unique forest paths.
///
/// For an edge with `α_u·R_u = α_v·R_v`, stepping from `u` to `v` multiplies
/// by `α_u/α_v`.
pub fn propagate_betas(guess: &AlignmentGuess, component: &[usize], source: usize) -> Result<Betas> {
    if !component.contains(&source) {
        return Err(Error::Internal(format!("source {source} is not in the component")));
    }
    let mut values: Vec<(usize, Option<Rational>)> =
        component.iter().map(|&s| (s, None)).collect();
    values.sort_unstable_by_key(|(s, _)| *s);
    let slot = |values: &Vec<(usize, Option<Rational>)>, s: usize| {
        values.binary_search_by_key(&s, |(x, _)| *x).ok()
    };
    let src = slot(&values, source).expect("source present");
    values[src].1 = Some(Rational::one());
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let beta_u = values[slot(&values, u).expect("visited vertex")].1.clone().expect("set");
        for e in guess.edges() {
            let (v, alpha_u, alpha_v) = if e.low == u {
                (e.high, e.alpha_low, e.alpha_high)
            } else if e.high == u {
                (e.low, e.alpha_high, e.alpha_low)
            } else {
                continue;
            };
            let Some(i) = slot(&values, v) else {
                return Err(Error::Internal(format!(
                    "edge {}-{} leaves the component",
                    e.low, e.high
                )));
            };
            if values[i].1.is_none() {
                let step = Rational::ratio(alpha_u as i64, alpha_v as i64);
                values[i].1 = Some(&beta_u * &step);
                queue.push_back(v);
            }
        }
    }
    let values = values
        .into_iter()
        .map(|(s, b)| {
            b.map(|b| (s, b)).ok_or_else(|| {
                Error::Internal(format!("segment {s} is not connected to source {source}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Betas { source, values })
}

/// True when every `β` has numerator and denominator at most `psi^size`.
pub fn betas_within_bound(betas: &Betas, psi: u64) -> bool {
    let bound: BigInt = Pow::pow(BigInt::from(psi), betas.values.len() as u32);
    betas
        .values
        .iter()
        .all(|(_, b)| b.numer().abs() <= bound && b.denom() <= &bound)
}

/// Range `[r⁻, r⁺]` of source values keeping every `β_ℓ·r` inside `S̄_ℓ`;
/// `None` when empty.
pub fn feasibility_interval(betas: &Betas, ladder: &SegmentLadder) -> Option<(Rational, Rational)> {
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for (segment, beta) in &betas.values {
        let lo = ladder.lower(*segment) / beta;
        let hi = ladder.upper(*segment) / beta;
        if lower.as_ref().is_none_or(|l| lo > *l) {
            lower = Some(lo);
        }
        if upper.as_ref().is_none_or(|u| hi < *u) {
            upper = Some(hi);
        }
    }
    let (lower, upper) = (lower?, upper?);
    (lower <= upper).then_some((lower, upper))
}

/// A component with its source, scale factors and feasible source range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSolution {
    pub vertices: Vec<usize>,
    pub betas: Betas,
    pub lower: Rational,
    pub upper: Rational,
}

impl ComponentSolution {
    pub fn source(&self) -> usize {
        self.betas.source
    }

    pub fn is_tight(&self) -> bool {
        self.lower == self.upper
    }
}

/// Betas and feasibility for every component of `guess`, sources at the
/// smallest vertex. `None` as soon as one component is infeasible.
pub fn solve_components(
    guess: &AlignmentGuess,
    ladder: &SegmentLadder,
) -> Result<Option<Vec<ComponentSolution>>> {
    let mut out = Vec::new();
    for vertices in guess.components() {
        let betas = propagate_betas(guess, &vertices, vertices[0])?;
        let Some((lower, upper)) = feasibility_interval(&betas, ladder) else {
            return Ok(None);
        };
        out.push(ComponentSolution { vertices, betas, lower, upper });
    }
    Ok(Some(out))
}
