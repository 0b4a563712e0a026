//! Single-commodity EOQ cost curves and the multi-commodity instance.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// EOQ parameters: cost `K` per order and folded holding rate `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EoqModel {
    pub ordering_cost: f64,
    pub holding_rate: f64,
}

impl EoqModel {
    pub fn new(ordering_cost: f64, holding_rate: f64) -> Result<Self> {
        if !(ordering_cost.is_finite() && ordering_cost > 0.0) {
            return Err(Error::Validation(format!(
                "ordering cost must be positive and finite, got {ordering_cost}"
            )));
        }
        if !(holding_rate.is_finite() && holding_rate > 0.0) {
            return Err(Error::Validation(format!(
                "holding rate must be positive and finite, got {holding_rate}"
            )));
        }
        Ok(EoqModel { ordering_cost, holding_rate })
    }

    /// `K/T + H·T`.
    pub fn cost(&self, interval: f64) -> Result<f64> {
        if interval.is_nan() || interval <= 0.0 {
            return Err(Error::Domain(format!("interval must be positive, got {interval}")));
        }
        Ok(self.cost_unchecked(interval))
    }

    #[inline]
    pub(crate) fn cost_unchecked(&self, interval: f64) -> f64 {
        self.ordering_cost / interval + self.holding_rate * interval
    }

    /// `sqrt(K/H)`.
    pub fn minimizer(&self) -> f64 {
        libm::sqrt(self.ordering_cost / self.holding_rate)
    }

    /// `2·sqrt(K·H)`, the cost at [`EoqModel::minimizer`].
    pub fn min_cost(&self) -> f64 {
        2.0 * libm::sqrt(self.ordering_cost * self.holding_rate)
    }
}

pub fn eoq_cost(model: &EoqModel, interval: f64) -> Result<f64> {
    model.cost(interval)
}

pub fn eoq_minimizer(model: &EoqModel) -> f64 {
    model.minimizer()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commodity {
    pub id: u64,
    pub model: EoqModel,
}

/// Joint ordering cost `K0` plus the commodities, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    joint_cost: f64,
    commodities: Vec<Commodity>,
}

impl Instance {
    /// Validates `K0 > 0`, a non-empty commodity list, positive parameters and unique ids.
    pub fn new(joint_cost: f64, commodities: Vec<Commodity>) -> Result<Self> {
        if !(joint_cost.is_finite() && joint_cost > 0.0) {
            return Err(Error::Validation(format!(
                "joint ordering cost must be positive and finite, got {joint_cost}"
            )));
        }
        if commodities.is_empty() {
            return Err(Error::Validation("instance has no commodities".into()));
        }
        for (pos, c) in commodities.iter().enumerate() {
            EoqModel::new(c.model.ordering_cost, c.model.holding_rate).map_err(|e| {
                Error::Validation(format!("commodity {}: {e}", c.id))
            })?;
            if commodities[..pos].iter().any(|o| o.id == c.id) {
                return Err(Error::Validation(format!("duplicate commodity id {}", c.id)));
            }
        }
        Ok(Instance { joint_cost, commodities })
    }

    /// Convenience constructor with ids `0..n`.
    pub fn from_params(joint_cost: f64, params: &[(f64, f64)]) -> Result<Self> {
        let commodities = params
            .iter()
            .enumerate()
            .map(|(i, &(k, h))| {
                Ok(Commodity { id: i as u64, model: EoqModel::new(k, h)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(joint_cost, commodities)
    }

    pub fn joint_cost(&self) -> f64 {
        self.joint_cost
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn len(&self) -> usize {
        self.commodities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commodities.is_empty()
    }

    pub fn commodity(&self, id: u64) -> Result<&Commodity> {
        self.commodities
            .iter()
            .find(|c| c.id == id)
            .ok_or(Error::UnknownCommodity(id))
    }

    /// `(K0 + K_i)/T + H_i·T`: commodity `id` paying the joint cost on every one of its orders.
    pub fn overloaded_cost(&self, id: u64, interval: f64) -> Result<f64> {
        let c = self.commodity(id)?;
        overloaded_model(self.joint_cost, &c.model).cost(interval)
    }

    /// Same instance with every `K` and `H` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let commodities = self
            .commodities
            .iter()
            .map(|c| {
                Ok(Commodity {
                    id: c.id,
                    model: EoqModel::new(
                        c.model.ordering_cost * factor,
                        c.model.holding_rate * factor,
                    )?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(self.joint_cost * factor, commodities)
    }
}

pub(crate) fn overloaded_model(joint_cost: f64, model: &EoqModel) -> EoqModel {
    EoqModel {
        ordering_cost: joint_cost + model.ordering_cost,
        holding_rate: model.holding_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(k: f64, h: f64) -> EoqModel {
        EoqModel::new(k, h).unwrap()
    }

    #[test]
    fn cost_examples() {
        assert_eq!(m(4.0, 1.0).cost(2.0).unwrap(), 4.0);
        assert_eq!(m(4.0, 1.0).cost(4.0).unwrap(), 5.0);
        assert_eq!(m(1.0, 1.0).cost(1.0).unwrap(), 2.0);
        assert!(matches!(m(1.0, 1.0).cost(0.0), Err(Error::Domain(_))));
        assert!(matches!(m(1.0, 1.0).cost(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn minimizer_examples() {
        assert_eq!(m(4.0, 1.0).minimizer(), 2.0);
        assert_eq!(m(1.0, 1.0).minimizer(), 1.0);
        assert_eq!(m(9.0, 4.0).minimizer(), 1.5);
        assert_eq!(m(9.0, 4.0).min_cost(), 12.0);
    }

    #[test]
    fn overloaded_examples() {
        let inst = Instance::from_params(3.0, &[(1.0, 1.0)]).unwrap();
        assert_eq!(inst.overloaded_cost(0, 2.0).unwrap(), 4.0);
        let t = m(4.0, 1.0).minimizer();
        assert_eq!(inst.overloaded_cost(0, t).unwrap(), 4.0);
        let inst = Instance::from_params(0.5, &[(0.5, 1.0)]).unwrap();
        assert_eq!(inst.overloaded_cost(0, 1.0).unwrap(), 2.0);
        assert!(matches!(inst.overloaded_cost(9, 1.0), Err(Error::UnknownCommodity(9))));
    }

    #[test]
    fn validation() {
        assert!(EoqModel::new(0.0, 1.0).is_err());
        assert!(EoqModel::new(1.0, f64::NAN).is_err());
        assert!(Instance::from_params(0.0, &[(1.0, 1.0)]).is_err());
        assert!(Instance::from_params(1.0, &[]).is_err());
        let c = Commodity { id: 1, model: m(1.0, 1.0) };
        assert!(Instance::new(1.0, alloc::vec![c, c]).is_err());
        let zero_k = Commodity { id: 2, model: EoqModel { ordering_cost: 0.0, holding_rate: 1.0 } };
        assert!(Instance::new(1.0, alloc::vec![zero_k]).is_err());
    }
}
