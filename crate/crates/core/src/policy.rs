//! Grid policies: assembly from representatives and cost evaluation.
//!
//! A [`ScaledGridPolicy`] places joint orders on the integer multiples of its
//! joint-grid values (times `base`) and gives every commodity an interval that
//! is an integer multiple of one of them, so each commodity order coincides
//! with a joint order.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::alignment::RepresentativeSet;
use crate::density::{asymptotic_density, joint_cost_from_density};
use crate::eoq::Instance;
use crate::numerics::Rational;
use crate::{Error, Result};

/// A commodity interval `multiplier · base`, an integer multiple of the
/// joint-grid value `of_representative`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalAssignment {
    pub id: u64,
    pub multiplier: Rational,
    pub of_representative: Rational,
}

impl IntervalAssignment {
    /// `multiplier / of_representative`.
    pub fn factor(&self) -> BigInt {
        (&self.multiplier / &self.of_representative).floor()
    }

    /// The interval in time units.
    ///
    /// Computed as `factor · of_representative · base` so that candidates
    /// priced during the search reproduce bit for bit.
    pub fn interval(&self, base: f64) -> f64 {
        interval_f64(self.factor().to_f64().unwrap_or(f64::INFINITY), self.of_representative.to_f64(), base)
    }
}

#[inline]
pub(crate) fn interval_f64(factor: f64, representative: f64, base: f64) -> f64 {
    factor * representative * base
}

/// Where a policy came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Read from a file or built by hand.
    External,
    PowerOfTwo,
    Aligned {
        tmin_index: usize,
        guess: u64,
        /// Aligned cross-component pairs left by tight components.
        collisions: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledGridPolicy {
    base: f64,
    tmin: f64,
    joint_grid: Vec<Rational>,
    intervals: Vec<IntervalAssignment>,
    components: Vec<Vec<Rational>>,
    provenance: Provenance,
}

impl ScaledGridPolicy {
    /// Validates grid closure. Without a partition the whole grid is one component.
    pub fn new(
        base: f64,
        tmin: f64,
        mut joint_grid: Vec<Rational>,
        intervals: Vec<IntervalAssignment>,
        components: Option<Vec<Vec<Rational>>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if !(base.is_finite() && base > 0.0) {
            return Err(Error::Validation(format!("policy base must be positive, got {base}")));
        }
        if !(tmin.is_finite() && tmin > 0.0) {
            return Err(Error::Validation(format!("policy tmin must be positive, got {tmin}")));
        }
        if joint_grid.is_empty() {
            return Err(Error::Validation("joint grid is empty".into()));
        }
        if let Some(bad) = joint_grid.iter().find(|m| !m.is_positive()) {
            return Err(Error::Validation(format!("joint grid value {bad} is not positive")));
        }
        joint_grid.sort();
        if joint_grid.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("joint grid values must be distinct".into()));
        }
        for (pos, a) in intervals.iter().enumerate() {
            if intervals[..pos].iter().any(|o| o.id == a.id) {
                return Err(Error::Validation(format!("commodity {} has two intervals", a.id)));
            }
            if joint_grid.binary_search(&a.of_representative).is_err() {
                return Err(Error::Validation(format!(
                    "commodity {}: {} is not on the joint grid",
                    a.id, a.of_representative
                )));
            }
            if !a.multiplier.is_positive() || !a.multiplier.is_multiple_of(&a.of_representative) {
                return Err(Error::Validation(format!(
                    "commodity {}: interval {} is not a positive integer multiple of {}; \
                     off-grid policies only have certified upper bounds",
                    a.id, a.multiplier, a.of_representative
                )));
            }
        }
        let components = match components {
            None => alloc::vec![joint_grid.clone()],
            Some(mut parts) => {
                for p in &mut parts {
                    p.sort();
                }
                parts.retain(|p| !p.is_empty());
                parts.sort();
                let mut all: Vec<Rational> = parts.iter().flatten().cloned().collect();
                all.sort();
                if all != joint_grid {
                    return Err(Error::Validation(
                        "components must partition the joint grid".into(),
                    ));
                }
                parts
            }
        };
        Ok(ScaledGridPolicy { base, tmin, joint_grid, intervals, components, provenance })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Minimal-interval estimate the grid was built around (equals `base`
    /// for policies that are not aligned).
    pub fn tmin(&self) -> f64 {
        self.tmin
    }

    pub fn joint_grid(&self) -> &[Rational] {
        &self.joint_grid
    }

    pub fn intervals(&self) -> &[IntervalAssignment] {
        &self.intervals
    }

    pub fn components(&self) -> &[Vec<Rational>] {
        &self.components
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn interval_of(&self, id: u64) -> Option<&IntervalAssignment> {
        self.intervals.iter().find(|a| a.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointMethod {
    Exact,
    Uncrossing,
    CertifiedUpperBound,
}

impl JointMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            JointMethod::Exact => "exact",
            JointMethod::Uncrossing => "uncrossing",
            JointMethod::CertifiedUpperBound => "certified_upper_bound",
        }
    }
}

impl core::str::FromStr for JointMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(JointMethod::Exact),
            "uncrossing" => Ok(JointMethod::Uncrossing),
            "certified_upper_bound" => Ok(JointMethod::CertifiedUpperBound),
            other => Err(Error::Parse(format!("unknown joint cost method {other:?}"))),
        }
    }
}

/// `F = J + Σ C_i`, with `C` in instance order.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub joint: f64,
    pub per_commodity: Vec<f64>,
    pub total: f64,
    pub method: JointMethod,
    /// Set when exact evaluation was requested but the grid exceeded the cap.
    pub fallback: bool,
}

impl CostReport {
    pub(crate) fn new(joint: f64, per_commodity: Vec<f64>, method: JointMethod) -> Self {
        let total = total_cost(joint, &per_commodity);
        CostReport { joint, per_commodity, total, method, fallback: false }
    }
}

#[inline]
pub(crate) fn total_cost(joint: f64, per_commodity: &[f64]) -> f64 {
    per_commodity.iter().fold(joint, |acc, c| acc + c)
}

/// Smallest `k ≥ 1` with `k·r ≥ x`.
pub(crate) fn multiple_count(x: f64, r: f64) -> u64 {
    let mut k = libm::ceil(x / r).max(1.0) as u64;
    while (k as f64) * r < x {
        k += 1;
    }
    while k > 1 && ((k - 1) as f64) * r >= x {
        k -= 1;
    }
    k
}

/// `k·r` for the smallest positive integer `k` with `k·r ≥ x`.
pub fn round_up_to_multiple(x: f64, r: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite() && r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("round_up_to_multiple needs positive inputs, got {x} and {r}")));
    }
    Ok(multiple_count(x, r) as f64 * r)
}

/// Joint grid values and their component partition, with components that
/// share a value merged.
pub(crate) fn grid_partition(reps: &RepresentativeSet) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let values = reps.distinct_values();
    let mut groups: Vec<Vec<Rational>> = reps
        .components()
        .iter()
        .map(|comp| {
            let mut g: Vec<Rational> =
                comp.iter().filter_map(|&s| reps.get(s).cloned()).collect();
            g.sort();
            g.dedup();
            g
        })
        .collect();
    let mut merged: Vec<Vec<Rational>> = Vec::new();
    while let Some(mut g) = groups.pop() {
        loop {
            let hit = groups.iter().position(|o| o.iter().any(|v| g.binary_search(v).is_ok()));
            match hit {
                Some(i) => {
                    g.extend(groups.swap_remove(i));
                    g.sort();
                    g.dedup();
                }
                None => break,
            }
        }
        merged.push(g);
    }
    merged.sort();
    (values, merged)
}

/// Assembles the policy for one representative set and `tmin`.
///
/// Each commodity takes the cheapest of the representatives and one large
/// option, the smallest multiple of `R̂₁` reaching `max(tmin/ε, √(K/H))`.
/// Ties go to the shorter interval.
pub fn assemble_policy(
    instance: &Instance,
    reps: &RepresentativeSet,
    epsilon: &Rational,
    tmin: f64,
) -> Result<ScaledGridPolicy> {
    let r1 = reps
        .get(1)
        .ok_or_else(|| Error::InvalidCandidate("segment 1 has no representative".into()))?
        .clone();
    let (values, components) = grid_partition(reps);
    let value_f: Vec<f64> = values.iter().map(Rational::to_f64).collect();
    let r1_f = r1.to_f64();
    let inv_eps = epsilon.recip().to_f64();
    let mut intervals = Vec::with_capacity(instance.len());
    for c in instance.commodities() {
        let choice = best_option(&c.model, &value_f, r1_f, inv_eps, tmin);
        let assignment = match choice {
            Choice::Representative(i) => IntervalAssignment {
                id: c.id,
                multiplier: values[i].clone(),
                of_representative: values[i].clone(),
            },
            Choice::Large(k) => IntervalAssignment {
                id: c.id,
                multiplier: &r1 * &BigInt::from(k),
                of_representative: r1.clone(),
            },
        };
        intervals.push(assignment);
    }
    ScaledGridPolicy::new(tmin, tmin, values, intervals, Some(components), Provenance::External)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Choice {
    /// Index into the ascending distinct representative values.
    Representative(usize),
    /// `k · R̂₁`.
    Large(u64),
}

/// Argmin over the options of [`assemble_policy`], returning the choice and its cost.
pub(crate) fn best_option_cost(
    model: &crate::eoq::EoqModel,
    values: &[f64],
    r1: f64,
    inv_eps: f64,
    tmin: f64,
) -> (Choice, f64) {
    let mut best = Choice::Representative(0);
    let mut best_cost = f64::INFINITY;
    let mut best_interval = f64::INFINITY;
    for (i, &v) in values.iter().enumerate() {
        let t = interval_f64(1.0, v, tmin);
        let cost = model.cost_unchecked(t);
        if cost < best_cost {
            best = Choice::Representative(i);
            best_cost = cost;
            best_interval = t;
        }
    }
    let target = inv_eps.max(model.minimizer() / tmin);
    let k = multiple_count(target, r1);
    let t = interval_f64(k as f64, r1, tmin);
    let cost = model.cost_unchecked(t);
    if cost < best_cost || (cost == best_cost && t < best_interval) {
        best = Choice::Large(k);
        best_cost = cost;
    }
    (best, best_cost)
}

fn best_option(model: &crate::eoq::EoqModel, values: &[f64], r1: f64, inv_eps: f64, tmin: f64) -> Choice {
    best_option_cost(model, values, r1, inv_eps, tmin).0
}

fn per_commodity_costs(instance: &Instance, policy: &ScaledGridPolicy) -> Result<Vec<f64>> {
    if policy.intervals.len() != instance.len() {
        return Err(Error::Validation(format!(
            "policy has {} intervals for {} commodities",
            policy.intervals.len(),
            instance.len()
        )));
    }
    instance
        .commodities()
        .iter()
        .map(|c| {
            let a = policy.interval_of(c.id).ok_or(Error::UnknownCommodity(c.id))?;
            c.model.cost(a.interval(policy.base))
        })
        .collect()
}

/// Exact joint density of a grid, or the uncrossing sum once the grid is
/// larger than `cap`.
pub(crate) fn grid_density(
    values: &[Rational],
    components: &[Vec<Rational>],
    cap: usize,
) -> Result<(Rational, JointMethod)> {
    if values.len() <= cap {
        return Ok((asymptotic_density(values, cap)?, JointMethod::Exact));
    }
    Ok((uncrossing_density(components, cap)?, JointMethod::Uncrossing))
}

fn uncrossing_density(components: &[Vec<Rational>], cap: usize) -> Result<Rational> {
    let mut total = Rational::zero();
    for comp in components {
        total = total + asymptotic_density(comp, cap)?;
    }
    Ok(total)
}

/// Full inclusion–exclusion over the joint grid; falls back to
/// [`evaluate_uncrossing`] (flagged) beyond `cap` values.
pub fn evaluate_exact(instance: &Instance, policy: &ScaledGridPolicy, cap: usize) -> Result<CostReport> {
    let per = per_commodity_costs(instance, policy)?;
    let (density, method) = grid_density(&policy.joint_grid, &policy.components, cap)?;
    let joint = joint_cost_from_density(instance.joint_cost(), &density, policy.base);
    let mut report = CostReport::new(joint, per, method);
    report.fallback = method != JointMethod::Exact;
    Ok(report)
}

/// Inclusion–exclusion restricted to subsets inside a single component.
pub fn evaluate_uncrossing(instance: &Instance, policy: &ScaledGridPolicy, cap: usize) -> Result<CostReport> {
    let per = per_commodity_costs(instance, policy)?;
    let density = uncrossing_density(&policy.components, cap)?;
    let joint = joint_cost_from_density(instance.joint_cost(), &density, policy.base);
    Ok(CostReport::new(joint, per, JointMethod::Uncrossing))
}

/// Exact value of `F` for the policy as priced in floating point: `K0`,
/// `base` and every interval are taken at their exact binary values.
pub fn exact_total(instance: &Instance, policy: &ScaledGridPolicy, cap: usize) -> Result<Rational> {
    let exact = |x: f64| {
        Rational::from_f64(x).ok_or_else(|| Error::Domain(format!("{x} is not finite")))
    };
    let (density, _) = grid_density(&policy.joint_grid, &policy.components, cap)?;
    let mut total = exact(instance.joint_cost())? * density / exact(policy.base)?;
    for c in instance.commodities() {
        let a = policy.interval_of(c.id).ok_or(Error::UnknownCommodity(c.id))?;
        let t = exact(a.interval(policy.base))?;
        let k = exact(c.model.ordering_cost)?;
        let h = exact(c.model.holding_rate)?;
        total = total + &k / &t + &h * &t;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DEFAULT_EXPONENT_CAP;
    use alloc::vec;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn on_grid(id: u64, m: &str) -> IntervalAssignment {
        IntervalAssignment { id, multiplier: r(m), of_representative: r(m) }
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_up_to_multiple(5.0, 2.0).unwrap(), 6.0);
        assert_eq!(round_up_to_multiple(6.0, 2.0).unwrap(), 6.0);
        assert_eq!(round_up_to_multiple(core::f64::consts::SQRT_2, 1.0).unwrap(), 2.0);
        assert_eq!(round_up_to_multiple(0.3, 0.1).unwrap(), 0.30000000000000004);
        assert!(round_up_to_multiple(0.0, 1.0).is_err());
    }

    #[test]
    fn exact_examples() {
        let cap = DEFAULT_EXPONENT_CAP;
        let inst = Instance::from_params(1.0, &[(1.0, 1.0)]).unwrap();
        let p = ScaledGridPolicy::new(1.0, 1.0, vec![r("1")], vec![on_grid(0, "1")], None, Provenance::External)
            .unwrap();
        let rep = evaluate_exact(&inst, &p, cap).unwrap();
        assert_eq!(rep.joint, 1.0);
        assert_eq!(rep.total, 3.0);
        assert_eq!(rep.method, JointMethod::Exact);

        let inst = Instance::from_params(2.0, &[(1.0, 1.0), (1.0, 1.0)]).unwrap();
        let p = ScaledGridPolicy::new(
            1.0,
            1.0,
            vec![r("1/2"), r("1/3")],
            vec![on_grid(0, "1/2"), on_grid(1, "1/3")],
            Some(vec![vec![r("1/2")], vec![r("1/3")]]),
            Provenance::External,
        )
        .unwrap();
        assert_eq!(evaluate_exact(&inst, &p, cap).unwrap().joint, 8.0);
        // uncrossing drops the −1/lcm cross term: 2·(2 + 3)
        assert_eq!(evaluate_uncrossing(&inst, &p, cap).unwrap().joint, 10.0);
        let fallback = evaluate_exact(&inst, &p, 1).unwrap();
        assert!(fallback.fallback);
        assert_eq!(fallback.method, JointMethod::Uncrossing);
    }

    #[test]
    fn single_component_uncrossing_is_exact() {
        let inst = Instance::from_params(2.0, &[(1.0, 1.0), (1.0, 1.0)]).unwrap();
        let p = ScaledGridPolicy::new(
            0.7,
            0.7,
            vec![r("1/2"), r("1/3")],
            vec![on_grid(0, "1/2"), on_grid(1, "1/3")],
            None,
            Provenance::External,
        )
        .unwrap();
        let cap = DEFAULT_EXPONENT_CAP;
        let (exact, unc) = (evaluate_exact(&inst, &p, cap).unwrap(), evaluate_uncrossing(&inst, &p, cap).unwrap());
        assert_eq!(exact.joint, unc.joint);
        assert_eq!(exact.total, unc.total);
    }

    #[test]
    fn closure_is_validated() {
        let off = IntervalAssignment { id: 0, multiplier: r("3/4"), of_representative: r("1/2") };
        assert!(ScaledGridPolicy::new(1.0, 1.0, vec![r("1/2")], vec![off], None, Provenance::External).is_err());
        let absent = IntervalAssignment { id: 0, multiplier: r("1"), of_representative: r("1/3") };
        assert!(ScaledGridPolicy::new(1.0, 1.0, vec![r("1/2")], vec![absent], None, Provenance::External).is_err());
        let ok = IntervalAssignment { id: 0, multiplier: r("3/2"), of_representative: r("1/2") };
        assert!(ScaledGridPolicy::new(1.0, 1.0, vec![r("1/2")], vec![ok], None, Provenance::External).is_ok());
        let bad_parts = Some(vec![vec![r("1/2")]]);
        assert!(ScaledGridPolicy::new(1.0, 1.0, vec![r("1/2"), r("1")], vec![], bad_parts, Provenance::External)
            .is_err());
    }

    #[test]
    fn assembled_single_segment_hits_eoq_minimum() {
        use crate::alignment::{build_segments, choose_representatives, solve_components, AlignmentGuess};
        // K = 9/4, H = 1 gives T* = 3/2; choose tmin = 1 and ε = 1/2 so S̄₁ = [1, 3/2]
        let inst = Instance::from_params(1.0, &[(2.25, 1.0)]).unwrap();
        let eps = r("1/2");
        let lad = build_segments(&eps, 1.0).unwrap();
        let guess = AlignmentGuess::new(vec![1, 2], vec![crate::alignment::LabeledEdge {
            low: 1,
            high: 2,
            alpha_low: 1,
            alpha_high: 1,
        }], &lad, 1)
        .unwrap();
        let comps = solve_components(&guess, &lad).unwrap().unwrap();
        let reps = choose_representatives(&comps, 1);
        let p = assemble_policy(&inst, &reps, &eps, 1.0).unwrap();
        assert_eq!(p.joint_grid(), &[r("3/2")]);
        let rep = evaluate_exact(&inst, &p, DEFAULT_EXPONENT_CAP).unwrap();
        assert_eq!(rep.per_commodity, vec![3.0]);
    }

    #[test]
    fn large_option_is_a_multiple_of_first_representative() {
        use crate::alignment::{build_segments, choose_representatives, solve_components, AlignmentGuess};
        // T* = 100 is far beyond tmin/ε = 2
        let inst = Instance::from_params(1.0, &[(10000.0, 1.0)]).unwrap();
        let eps = r("1/2");
        let lad = build_segments(&eps, 1.0).unwrap();
        let guess = AlignmentGuess::new(vec![1], vec![], &lad, 1).unwrap();
        let comps = solve_components(&guess, &lad).unwrap().unwrap();
        let reps = choose_representatives(&comps, 1);
        assert_eq!(reps.get(1), Some(&r("5/4")));
        let p = assemble_policy(&inst, &reps, &eps, 1.0).unwrap();
        let a = &p.intervals()[0];
        assert_eq!(a.of_representative, r("5/4"));
        assert_eq!(a.multiplier, r("100"));
        assert_eq!(a.factor(), BigInt::from(80));
    }

    #[test]
    fn merged_components_share_values() {
        use crate::alignment::{build_segments, choose_representatives, solve_components, AlignmentGuess};
        let eps = r("1/2");
        let lad = build_segments(&eps, 1.0).unwrap();
        // both tight at 3/2 in separate components is impossible for singletons;
        // a tight pair yields one value and one component
        let guess = AlignmentGuess::new(vec![1, 2], vec![crate::alignment::LabeledEdge {
            low: 1,
            high: 2,
            alpha_low: 1,
            alpha_high: 1,
        }], &lad, 1)
        .unwrap();
        let comps = solve_components(&guess, &lad).unwrap().unwrap();
        let reps = choose_representatives(&comps, 1);
        let (values, parts) = grid_partition(&reps);
        assert_eq!(values, vec![r("3/2")]);
        assert_eq!(parts, vec![vec![r("3/2")]]);
    }
}
