//! JSON documents for instances, policies and solve results.
//!
//! Rationals are written as `"p/q"` strings (or `"p"` for integers) so they
//! survive the round trip exactly; floats use shortest round-trip printing.

use jrp_core::baseline::EasyRegimePolicy;
use jrp_core::eoq::{Commodity, EoqModel, Instance};
use jrp_core::policy::{CostReport, IntervalAssignment, JointMethod, Provenance, ScaledGridPolicy};
use jrp_core::solver::{certify, BestPolicy, Method, SolveResult};
use jrp_core::{Error, Rational, Result};
use serde::{Deserialize, Serialize};

fn parse_rational(s: &str) -> Result<Rational> {
    s.parse()
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid {what} JSON: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize") + "\n"
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommodityDoc {
    pub id: u64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(rename = "K0")]
    pub k0: f64,
    pub commodities: Vec<CommodityDoc>,
}

impl InstanceDoc {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceDoc {
            k0: instance.joint_cost(),
            commodities: instance
                .commodities()
                .iter()
                .map(|c| CommodityDoc { id: c.id, k: c.model.ordering_cost, h: c.model.holding_rate })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let commodities = self
            .commodities
            .iter()
            .map(|c| {
                let model = EoqModel::new(c.k, c.h)
                    .map_err(|e| Error::Validation(format!("commodity {}: {e}", c.id)))?;
                Ok(Commodity { id: c.id, model })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(self.k0, commodities)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_json::<InstanceDoc>(text, "instance")?.to_instance()
}

pub fn instance_to_json(instance: &Instance) -> String {
    to_json(&InstanceDoc::from_instance(instance))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostDoc {
    #[serde(rename = "J")]
    pub joint: f64,
    #[serde(rename = "C")]
    pub per_commodity: Vec<f64>,
    #[serde(rename = "F")]
    pub total: f64,
    pub j_method: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fallback: bool,
}

impl CostDoc {
    pub fn from_report(report: &CostReport) -> Self {
        CostDoc {
            joint: report.joint,
            per_commodity: report.per_commodity.clone(),
            total: report.total,
            j_method: report.method.as_str().to_string(),
            fallback: report.fallback,
        }
    }

    pub fn to_report(&self) -> Result<CostReport> {
        Ok(CostReport {
            joint: self.joint,
            per_commodity: self.per_commodity.clone(),
            total: self.total,
            method: self.j_method.parse::<JointMethod>()?,
            fallback: self.fallback,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalDoc {
    pub id: u64,
    pub multiplier: String,
    pub of_representative: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProvenanceDoc {
    External,
    PowerOfTwo,
    Aligned { tmin_index: usize, guess: u64, collisions: usize },
}

impl From<&Provenance> for ProvenanceDoc {
    fn from(p: &Provenance) -> Self {
        match *p {
            Provenance::External => ProvenanceDoc::External,
            Provenance::PowerOfTwo => ProvenanceDoc::PowerOfTwo,
            Provenance::Aligned { tmin_index, guess, collisions } => {
                ProvenanceDoc::Aligned { tmin_index, guess, collisions }
            }
        }
    }
}

impl From<&ProvenanceDoc> for Provenance {
    fn from(p: &ProvenanceDoc) -> Self {
        match *p {
            ProvenanceDoc::External => Provenance::External,
            ProvenanceDoc::PowerOfTwo => Provenance::PowerOfTwo,
            ProvenanceDoc::Aligned { tmin_index, guess, collisions } => {
                Provenance::Aligned { tmin_index, guess, collisions }
            }
        }
    }
}

/// Grid policy document. `components` is optional; without it the whole
/// joint grid is treated as one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPolicyDoc {
    pub base: f64,
    pub tmin: f64,
    pub joint_grid: Vec<String>,
    pub intervals: Vec<IntervalDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostDoc>,
}

impl GridPolicyDoc {
    pub fn from_policy(policy: &ScaledGridPolicy, report: Option<&CostReport>) -> Self {
        let strings = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>();
        GridPolicyDoc {
            base: policy.base(),
            tmin: policy.tmin(),
            joint_grid: strings(policy.joint_grid()),
            intervals: policy
                .intervals()
                .iter()
                .map(|a| IntervalDoc {
                    id: a.id,
                    multiplier: a.multiplier.to_string(),
                    of_representative: a.of_representative.to_string(),
                })
                .collect(),
            components: Some(policy.components().iter().map(|c| strings(c)).collect()),
            provenance: Some(policy.provenance().into()),
            cost: report.map(CostDoc::from_report),
        }
    }

    pub fn to_policy(&self) -> Result<ScaledGridPolicy> {
        let rationals = |v: &[String]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>();
        let intervals = self
            .intervals
            .iter()
            .map(|a| {
                Ok(IntervalAssignment {
                    id: a.id,
                    multiplier: parse_rational(&a.multiplier)?,
                    of_representative: parse_rational(&a.of_representative)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let components = match &self.components {
            None => None,
            Some(parts) => Some(parts.iter().map(|p| rationals(p)).collect::<Result<Vec<_>>>()?),
        };
        ScaledGridPolicy::new(
            self.base,
            self.tmin,
            rationals(&self.joint_grid)?,
            intervals,
            components,
            self.provenance.as_ref().map_or(Provenance::External, Provenance::from),
        )
    }

    /// Interval lengths in time units without checking grid closure.
    pub fn raw_intervals(&self) -> Result<Vec<(u64, f64)>> {
        self.intervals
            .iter()
            .map(|a| Ok((a.id, parse_rational(&a.multiplier)?.to_f64() * self.base)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EasyIntervalDoc {
    pub id: u64,
    pub interval: f64,
}

/// Overloaded-EOQ policy: real intervals, certified cost only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EasyPolicyDoc {
    pub intervals: Vec<EasyIntervalDoc>,
    pub certified_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostDoc>,
}

impl EasyPolicyDoc {
    pub fn from_policy(policy: &EasyRegimePolicy, report: Option<&CostReport>) -> Self {
        EasyPolicyDoc {
            intervals: policy
                .intervals
                .iter()
                .map(|&(id, interval)| EasyIntervalDoc { id, interval })
                .collect(),
            certified_cost: policy.certified_cost,
            cost: report.map(CostDoc::from_report),
        }
    }

    pub fn to_policy(&self) -> EasyRegimePolicy {
        EasyRegimePolicy {
            intervals: self.intervals.iter().map(|i| (i.id, i.interval)).collect(),
            certified_cost: self.certified_cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyDoc {
    Grid(GridPolicyDoc),
    Easy(EasyPolicyDoc),
}

/// Accepts a bare policy or a solve result carrying one.
pub fn parse_policy(text: &str) -> Result<PolicyDoc> {
    match parse_json::<PolicyDoc>(text, "policy") {
        Ok(doc) => Ok(doc),
        Err(err) => parse_json::<ResultDoc>(text, "result").map(|r| r.policy).map_err(|_| err),
    }
}

pub fn policy_to_json(policy: &ScaledGridPolicy, report: Option<&CostReport>) -> String {
    to_json(&GridPolicyDoc::from_policy(policy, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDoc {
    pub best_method: String,
    pub best_cost: f64,
    pub lower_bound: f64,
    pub ratio: f64,
    pub opt_estimate: f64,
    pub pow2_cost: f64,
    pub easy_cost: f64,
    pub candidates_evaluated: u64,
    pub guesses_pruned: u64,
    pub budget_exhausted: bool,
    pub psi_effective: u64,
    pub psi_theoretical: String,
    pub segments: usize,
    pub tmin_count: usize,
    pub policy: PolicyDoc,
}

impl ResultDoc {
    pub fn from_result(result: &SolveResult) -> Self {
        let policy = match &result.best {
            BestPolicy::Grid(p) => PolicyDoc::Grid(GridPolicyDoc::from_policy(p, Some(&result.report))),
            BestPolicy::EasyRegime(p) => PolicyDoc::Easy(EasyPolicyDoc::from_policy(p, Some(&result.report))),
        };
        ResultDoc {
            best_method: result.best_method.as_str().to_string(),
            best_cost: result.best_cost,
            lower_bound: result.lower_bound,
            ratio: certify(result).ratio,
            opt_estimate: result.opt_estimate,
            pow2_cost: result.pow2_cost,
            easy_cost: result.easy_cost,
            candidates_evaluated: result.candidates_evaluated,
            guesses_pruned: result.guesses_pruned,
            budget_exhausted: result.budget_exhausted,
            psi_effective: result.psi_effective,
            psi_theoretical: result.psi_theoretical.to_string(),
            segments: result.segments,
            tmin_count: result.tmin_count,
            policy,
        }
    }

    pub fn to_result(&self) -> Result<SolveResult> {
        let (best, cost) = match &self.policy {
            PolicyDoc::Grid(p) => (BestPolicy::Grid(p.to_policy()?), &p.cost),
            PolicyDoc::Easy(p) => (BestPolicy::EasyRegime(p.to_policy()), &p.cost),
        };
        let report = cost
            .as_ref()
            .ok_or_else(|| Error::Parse("result policy has no cost".into()))?
            .to_report()?;
        Ok(SolveResult {
            best,
            best_cost: self.best_cost,
            best_method: self.best_method.parse::<Method>()?,
            report,
            candidates_evaluated: self.candidates_evaluated,
            guesses_pruned: self.guesses_pruned,
            budget_exhausted: self.budget_exhausted,
            lower_bound: self.lower_bound,
            opt_estimate: self.opt_estimate,
            pow2_cost: self.pow2_cost,
            easy_cost: self.easy_cost,
            psi_effective: self.psi_effective,
            psi_theoretical: self
                .psi_theoretical
                .parse()
                .map_err(|_| Error::Parse(format!("bad psi_theoretical {:?}", self.psi_theoretical)))?,
            segments: self.segments,
            tmin_count: self.tmin_count,
        })
    }
}

pub fn parse_result(text: &str) -> Result<SolveResult> {
    parse_json::<ResultDoc>(text, "result")?.to_result()
}

pub fn result_to_json(result: &SolveResult) -> String {
    to_json(&ResultDoc::from_result(result))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineDoc {
    #[serde(rename = "LB")]
    pub lower_bound: f64,
    pub pow2_cost: f64,
    pub opt_estimate: f64,
    pub easy_cost: f64,
}
