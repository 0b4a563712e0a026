use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::numerics::Rational;
use crate::{Error, Result};

/// The solver requires `0 < ε < 1/2`.
pub fn validate_epsilon(epsilon: &Rational) -> Result<()> {
    if epsilon.is_positive() && *epsilon < Rational::ratio(1, 2) {
        Ok(())
    } else {
        Err(Error::Config(format!("epsilon must lie in (0, 1/2), got {epsilon}")))
    }
}

/// The ladder, T̃min grid and Ψ are also well defined at `ε = 1/2`.
fn validate_epsilon_closed(epsilon: &Rational) -> Result<()> {
    if epsilon.is_positive() && *epsilon <= Rational::ratio(1, 2) {
        Ok(())
    } else {
        Err(Error::Config(format!("epsilon must lie in (0, 1/2], got {epsilon}")))
    }
}

/// Candidate values for the minimal ordering interval: `(K0/OPT~)·(1+ε/2)^j`
/// for every `j ≥ 0` with `(1+ε/2)^j < n/ε`.
pub fn enumerate_tmin(
    joint_cost: f64,
    opt_estimate: f64,
    epsilon: &Rational,
    commodities: usize,
) -> Result<Vec<f64>> {
    validate_epsilon_closed(epsilon)?;
    if commodities == 0 {
        return Err(Error::Config("at least one commodity is required".into()));
    }
    if !(joint_cost > 0.0 && opt_estimate > 0.0) {
        return Err(Error::Config(format!(
            "joint cost and optimum estimate must be positive, got {joint_cost} and {opt_estimate}"
        )));
    }
    let anchor = joint_cost / opt_estimate;
    let step = Rational::one() + epsilon / &Rational::from_integer(2);
    let limit = &Rational::from_integer(commodities as u64) / epsilon;
    let mut out = Vec::new();
    let mut power = Rational::one();
    while power < limit {
        out.push(anchor * power.to_f64());
        power = &power * &step;
    }
    Ok(out)
}

/// Geometric segments `S̄_ℓ = [(1+ε)^{ℓ−1}, (1+ε)^ℓ]` (as multipliers of
/// `tmin`) covering `[1, 1/ε]`, with `L` minimal.
///
/// Segment indices are 1-based throughout the alignment module.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentLadder {
    epsilon: Rational,
    tmin: f64,
    /// `(1+ε)^0, ..., (1+ε)^L`
    bounds: Vec<Rational>,
}

impl SegmentLadder {
    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn tmin(&self) -> f64 {
        self.tmin
    }

    /// Number of segments `L`.
    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Left endpoint of `S̄_ℓ`.
    pub fn lower(&self, segment: usize) -> &Rational {
        debug_assert!((1..=self.len()).contains(&segment));
        &self.bounds[segment - 1]
    }

    /// Right endpoint of `S̄_ℓ`.
    pub fn upper(&self, segment: usize) -> &Rational {
        debug_assert!((1..=self.len()).contains(&segment));
        &self.bounds[segment]
    }

    /// `(1+ε)^k` for `0 ≤ k ≤ L`.
    pub fn growth_power(&self, k: usize) -> &Rational {
        &self.bounds[k]
    }

    pub fn contains(&self, segment: usize, value: &Rational) -> bool {
        self.lower(segment) <= value && value <= self.upper(segment)
    }

    /// Same multipliers anchored at a different `tmin`.
    pub fn with_tmin(&self, tmin: f64) -> SegmentLadder {
        SegmentLadder { tmin, ..self.clone() }
    }
}

pub fn build_segments(epsilon: &Rational, tmin: f64) -> Result<SegmentLadder> {
    validate_epsilon_closed(epsilon)?;
    if !(tmin.is_finite() && tmin > 0.0) {
        return Err(Error::Config(format!("tmin must be positive, got {tmin}")));
    }
    let growth = Rational::one() + epsilon;
    let target = epsilon.recip();
    let mut bounds = alloc::vec![Rational::one()];
    loop {
        let next = bounds.last().unwrap() * &growth;
        let done = next >= target;
        bounds.push(next);
        if done {
            break;
        }
    }
    Ok(SegmentLadder { epsilon: epsilon.clone(), tmin, bounds })
}

/// Theoretical multiple bound `⌈2L²·2^L/ε⌉` and the value actually enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiBound {
    pub theoretical: BigInt,
    pub effective: u64,
}

impl PsiBound {
    pub fn is_capped(&self) -> bool {
        BigInt::from(self.effective) < self.theoretical
    }
}

pub fn psi_value(epsilon: &Rational, segments: usize, cap: Option<u64>) -> Result<PsiBound> {
    validate_epsilon_closed(epsilon)?;
    if segments == 0 {
        return Err(Error::Config("segment count must be positive".into()));
    }
    let l = BigInt::from(segments);
    let raw = Rational::from_integer(BigInt::from(2) * &l * &l * (BigInt::from(1) << segments));
    let theoretical = (&raw / epsilon).ceil();
    let effective = match cap {
        Some(0) => return Err(Error::Config("psi cap must be at least 1".into())),
        Some(c) => match theoretical.to_u64() {
            Some(t) => t.min(c),
            None => c,
        },
        None => theoretical.to_u64().ok_or_else(|| {
            Error::Config(format!("theoretical psi {theoretical} does not fit in 64 bits; set a cap"))
        })?,
    };
    Ok(PsiBound { theoretical, effective })
}
