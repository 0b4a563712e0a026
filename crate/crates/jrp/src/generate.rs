//! Seeded random instances.

use jrp_core::eoq::Instance;
use jrp_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Independent log-uniform `K` and `H` per commodity.
    Random,
    /// One sampled `(K, H)` shared by every commodity.
    Identical,
    /// Half the commodities short-cycle, half with EOQ intervals 10 to 30
    /// times longer (their `H` is derived from the target interval).
    TwoScale,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Family::Random),
            "identical" => Ok(Family::Identical),
            "two_scale" => Ok(Family::TwoScale),
            other => Err(Error::Config(format!(
                "unknown family {other:?}; expected random, identical or two_scale"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub seed: u64,
    pub k0_range: (f64, f64),
    pub k_range: (f64, f64),
    pub h_range: (f64, f64),
    pub family: Family,
}

impl GenSpec {
    pub fn new(n: usize, seed: u64, family: Family) -> Self {
        GenSpec { n, seed, k0_range: (0.01, 100.0), k_range: (0.01, 100.0), h_range: (0.01, 100.0), family }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Validation("n must be at least 1".into()));
        }
        if self.family == Family::TwoScale && self.n < 2 {
            return Err(Error::Validation("two_scale needs at least 2 commodities".into()));
        }
        for (name, (lo, hi)) in [("K0", self.k0_range), ("K", self.k_range), ("H", self.h_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
                return Err(Error::Validation(format!(
                    "{name} range [{lo}, {hi}] must be positive, finite and ordered"
                )));
            }
        }
        Ok(())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    rng.gen_range(lo.ln()..hi.ln()).exp().clamp(lo, hi)
}

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k0 = log_uniform(&mut rng, spec.k0_range);
    let params: Vec<(f64, f64)> = match spec.family {
        Family::Random => (0..spec.n)
            .map(|_| (log_uniform(&mut rng, spec.k_range), log_uniform(&mut rng, spec.h_range)))
            .collect(),
        Family::Identical => {
            let p = (log_uniform(&mut rng, spec.k_range), log_uniform(&mut rng, spec.h_range));
            vec![p; spec.n]
        }
        Family::TwoScale => {
            let short = spec.n.div_ceil(2);
            let mut params: Vec<(f64, f64)> = (0..short)
                .map(|_| (log_uniform(&mut rng, spec.k_range), log_uniform(&mut rng, spec.h_range)))
                .collect();
            let longest_short = params.iter().map(|(k, h)| (k / h).sqrt()).fold(0.0, f64::max);
            for _ in short..spec.n {
                let k = log_uniform(&mut rng, spec.k_range);
                let target = longest_short * log_uniform(&mut rng, (10.0, 30.0));
                params.push((k, k / (target * target)));
            }
            params
        }
    };
    Instance::from_params(k0, &params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_respected() {
        let mut spec = GenSpec::new(10, 3, Family::Random);
        spec.k_range = (0.5, 2.0);
        spec.h_range = (1.0, 1.0);
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.len(), 10);
        for c in inst.commodities() {
            assert!((0.5..=2.0).contains(&c.model.ordering_cost));
            assert_eq!(c.model.holding_rate, 1.0);
        }
    }

    #[test]
    fn two_scale_spread() {
        for seed in 0..20 {
            let inst = generate(&GenSpec::new(4, seed, Family::TwoScale)).unwrap();
            let t: Vec<f64> = inst.commodities().iter().map(|c| c.model.minimizer()).collect();
            let max = t.iter().cloned().fold(0.0, f64::max);
            let min = t.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(max > 10.0 * min);
        }
    }

    #[test]
    fn invalid_specs() {
        let mut spec = GenSpec::new(3, 0, Family::Random);
        spec.k_range = (2.0, 1.0);
        assert!(matches!(generate(&spec), Err(Error::Validation(_))));
        assert!(generate(&GenSpec::new(0, 0, Family::Random)).is_err());
        assert!(generate(&GenSpec::new(1, 0, Family::TwoScale)).is_err());
    }
}
