//! Convex relaxation lower bound, power-of-2 policies and the overloaded
//! EOQ policy for long cycles.

use alloc::vec;
use alloc::vec::Vec;

use crate::density::DEFAULT_EXPONENT_CAP;
use crate::eoq::{overloaded_model, Instance};
use crate::numerics::Rational;
use crate::policy::{evaluate_exact, IntervalAssignment, Provenance, ScaledGridPolicy};
use crate::Result;

const GOLDEN_TOLERANCE: f64 = 1e-10;

/// Number of base points tried by [`opt_estimate`] per octave.
pub const BASE_GRID_POINTS: u32 = 64;

/// Minimizer `t0` and value of the relaxation
/// `g(T0) = K0/T0 + Σ C_i(max(T0, √(K_i/H_i)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    pub t0: f64,
    pub value: f64,
}

impl Relaxation {
    /// Relaxed interval `max(T0, √(K_i/H_i))` of each commodity, in instance order.
    pub fn intervals(&self, instance: &Instance) -> Vec<f64> {
        instance.commodities().iter().map(|c| self.t0.max(c.model.minimizer())).collect()
    }
}

fn relaxation_value(instance: &Instance, t0: f64) -> f64 {
    instance.commodities().iter().fold(instance.joint_cost() / t0, |acc, c| {
        acc + c.model.cost_unchecked(t0.max(c.model.minimizer()))
    })
}

/// Golden-section search for the relaxation minimum, in log space.
pub fn relaxation_lower_bound(instance: &Instance) -> Relaxation {
    let k0 = instance.joint_cost();
    let lo = instance
        .commodities()
        .iter()
        .map(|c| c.model.minimizer())
        .fold(f64::INFINITY, f64::min)
        * 1e-3;
    let hi = instance
        .commodities()
        .iter()
        .map(|c| overloaded_model(k0, &c.model).minimizer())
        .fold(0.0, f64::max)
        * 1e3;
    let g = |u: f64| relaxation_value(instance, libm::exp(u));
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = (libm::log(lo), libm::log(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > GOLDEN_TOLERANCE {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let t0 = libm::exp((a + b) / 2.0);
    Relaxation { t0, value: relaxation_value(instance, t0) }
}

/// Exponent `k` with `2^k·base ∈ [t/√2, √2·t)`.
pub fn power_of_two_exponent(t: f64, base: f64) -> i32 {
    let sqrt2 = core::f64::consts::SQRT_2;
    let mut k = libm::ceil(libm::log2(t / base) - 0.5) as i32;
    while libm::ldexp(base, k) < t / sqrt2 {
        k += 1;
    }
    while libm::ldexp(base, k) >= sqrt2 * t {
        k -= 1;
    }
    k
}

fn two_power(k: i32) -> Rational {
    let p = Rational::from_integer(num_bigint::BigInt::from(1u8) << k.unsigned_abs());
    if k >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Rounds every relaxed interval to a power of 2 times `base`.
///
/// Power-of-2 grids starting at 0 are nested, so the joint grid is the
/// single finest multiplier.
pub fn power_of_two_policy(instance: &Instance, base: f64) -> Result<ScaledGridPolicy> {
    let relaxation = relaxation_lower_bound(instance);
    power_of_two_from(instance, &relaxation, base)
}

fn power_of_two_from(instance: &Instance, relaxation: &Relaxation, base: f64) -> Result<ScaledGridPolicy> {
    let exponents: Vec<i32> = relaxation
        .intervals(instance)
        .into_iter()
        .map(|t| power_of_two_exponent(t, base))
        .collect();
    let finest = two_power(*exponents.iter().min().expect("non-empty instance"));
    let intervals = instance
        .commodities()
        .iter()
        .zip(&exponents)
        .map(|(c, &k)| IntervalAssignment {
            id: c.id,
            multiplier: two_power(k),
            of_representative: finest.clone(),
        })
        .collect();
    ScaledGridPolicy::new(base, base, vec![finest], intervals, None, Provenance::PowerOfTwo)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub relaxation: Relaxation,
    pub lower_bound: f64,
    pub pow2_policy: ScaledGridPolicy,
    pub pow2_cost: f64,
    pub opt_estimate: f64,
}

/// Relaxation bound plus the best power-of-2 policy over bases
/// `T0·2^{j/64}`, `j = 0..63` (ties to the smaller base).
pub fn baseline(instance: &Instance) -> Result<BaselineResult> {
    let relaxation = relaxation_lower_bound(instance);
    let mut best: Option<(ScaledGridPolicy, f64)> = None;
    for j in 0..BASE_GRID_POINTS {
        let base = relaxation.t0 * libm::exp2(j as f64 / BASE_GRID_POINTS as f64);
        let policy = power_of_two_from(instance, &relaxation, base)?;
        let cost = evaluate_exact(instance, &policy, DEFAULT_EXPONENT_CAP)?.total;
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((policy, cost));
        }
    }
    let (pow2_policy, pow2_cost) = best.expect("base grid is non-empty");
    Ok(BaselineResult {
        relaxation,
        lower_bound: relaxation.value,
        pow2_policy,
        pow2_cost,
        opt_estimate: pow2_cost,
    })
}

/// Cost of the best power-of-2 policy, an upper bound on the optimum within
/// `√(9/8)` of the relaxation bound.
pub fn opt_estimate(instance: &Instance) -> Result<f64> {
    Ok(baseline(instance)?.opt_estimate)
}

/// Every commodity on its own overloaded EOQ interval `√((K0+K_i)/H_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EasyRegimePolicy {
    /// `(id, T̂_i)` in instance order.
    pub intervals: Vec<(u64, f64)>,
    /// `Σ 2√((K0+K_i)·H_i)`, an upper bound on the policy's true cost.
    pub certified_cost: f64,
}

impl EasyRegimePolicy {
    /// Joint orders charged once per commodity order, which overcounts
    /// shared epochs.
    pub fn overcounted_joint(&self, instance: &Instance) -> f64 {
        self.intervals.iter().fold(0.0, |acc, (_, t)| acc + instance.joint_cost() / t)
    }
}

pub fn easy_regime_policy(instance: &Instance) -> EasyRegimePolicy {
    let k0 = instance.joint_cost();
    let mut intervals = Vec::with_capacity(instance.len());
    let mut certified_cost = 0.0;
    for c in instance.commodities() {
        let m = overloaded_model(k0, &c.model);
        intervals.push((c.id, m.minimizer()));
        certified_cost += m.min_cost();
    }
    EasyRegimePolicy { intervals, certified_cost }
}
