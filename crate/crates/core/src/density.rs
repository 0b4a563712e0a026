//! Joint-order counting and long-run density for rational grids.
//!
//! A grid is a real `base` and a set of rational multipliers; commodity `i`
//! orders at `0, m_i·base, 2·m_i·base, ...`. Everything here is computed in
//! multiplier space with exact arithmetic and scaled by `base` at the end.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::numerics::Rational;
use crate::{Error, Result};

/// Default ceiling on the number of multipliers fed to inclusion–exclusion.
pub const DEFAULT_EXPONENT_CAP: usize = 20;

/// Positive real base plus distinct positive rational multipliers (kept sorted).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledGrid {
    base: f64,
    multipliers: Vec<Rational>,
}

impl ScaledGrid {
    pub fn new(base: f64, mut multipliers: Vec<Rational>) -> Result<Self> {
        if !(base.is_finite() && base > 0.0) {
            return Err(Error::Validation(format!("grid base must be positive, got {base}")));
        }
        if multipliers.is_empty() {
            return Err(Error::Validation("grid has no multipliers".into()));
        }
        if let Some(bad) = multipliers.iter().find(|m| !m.is_positive()) {
            return Err(Error::Validation(format!("grid multiplier {bad} is not positive")));
        }
        multipliers.sort();
        if multipliers.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("grid multipliers must be distinct".into()));
        }
        Ok(ScaledGrid { base, multipliers })
    }

    /// Builds a grid after sorting and removing duplicate multipliers.
    pub fn deduplicated(base: f64, mut multipliers: Vec<Rational>) -> Result<Self> {
        multipliers.sort();
        multipliers.dedup();
        ScaledGrid::new(base, multipliers)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn multipliers(&self) -> &[Rational] {
        &self.multipliers
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }
}

fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::Budget { size, cap })
    } else {
        Ok(())
    }
}

/// Visits every non-empty subset once with the LCM of its members and its size.
///
/// Subsets are extended one element at a time, so each LCM costs one
/// rational `lcm` on top of its parent's.
fn for_each_subset_lcm(multipliers: &[Rational], visit: &mut impl FnMut(&Rational, usize)) {
    fn walk(
        multipliers: &[Rational],
        start: usize,
        current: &Rational,
        size: usize,
        visit: &mut impl FnMut(&Rational, usize),
    ) {
        for i in start..multipliers.len() {
            // positive operands, lcm cannot fail
            let next = current.lcm(&multipliers[i]).expect("positive multipliers");
            visit(&next, size + 1);
            walk(multipliers, i + 1, &next, size + 1, visit);
        }
    }
    for i in 0..multipliers.len() {
        let m = &multipliers[i];
        visit(m, 1);
        walk(multipliers, i + 1, m, 1, visit);
    }
}

/// Number of distinct order epochs in `[0, horizon·base]`, epoch 0 included.
///
/// Inclusion–exclusion: `Σ_{∅≠N} (−1)^{|N|+1} (⌊Δ/M_N⌋ + 1)`.
pub fn count_orders(multipliers: &[Rational], horizon: &Rational, cap: usize) -> Result<BigInt> {
    check_cap(multipliers.len(), cap)?;
    if *horizon < 0 {
        return Err(Error::Domain(format!("horizon must be non-negative, got {horizon}")));
    }
    let mut total = BigInt::zero();
    for_each_subset_lcm(multipliers, &mut |lcm, size| {
        let term = (horizon / lcm).floor() + 1;
        if size % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    });
    Ok(total)
}

/// `lim N(Δ)/Δ` per unit of base time: `Σ_{∅≠N} (−1)^{|N|+1} / lcm(N)`.
pub fn asymptotic_density(multipliers: &[Rational], cap: usize) -> Result<Rational> {
    check_cap(multipliers.len(), cap)?;
    if multipliers.is_empty() {
        return Err(Error::Validation("density of an empty grid".into()));
    }
    let mut total = Rational::zero();
    for_each_subset_lcm(multipliers, &mut |lcm, size| {
        let term = lcm.recip();
        total = if size % 2 == 1 { &total + &term } else { &total - &term };
    });
    Ok(total)
}

/// `K0 × density / base`, converted to floating point at the last step.
pub fn joint_cost(joint_cost: f64, grid: &ScaledGrid, cap: usize) -> Result<f64> {
    let density = asymptotic_density(grid.multipliers(), cap)?;
    Ok(joint_cost_from_density(joint_cost, &density, grid.base()))
}

#[inline]
pub(crate) fn joint_cost_from_density(joint_cost: f64, density: &Rational, base: f64) -> f64 {
    joint_cost_from_density_f64(joint_cost, density.to_f64(), base)
}

#[inline]
pub(crate) fn joint_cost_from_density_f64(joint_cost: f64, density: f64, base: f64) -> f64 {
    joint_cost * density / base
}
