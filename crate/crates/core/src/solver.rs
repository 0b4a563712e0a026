//! End-to-end search: baselines, then every `tmin` candidate against every
//! enumerated alignment guess, keeping the cheapest policy.
//!
//! [`solve`] runs sequentially. [`SolvePlan`] exposes the same search in
//! pieces so callers can fan guesses out over threads and combine partial
//! [`Accumulator`]s with [`SolvePlan::merge`]; the reduction uses a total
//! order, so the result does not depend on how work was split.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;

use crate::alignment::{
    betas_within_bound, build_segments, choose_representatives, enumerate_tmin, psi_value,
    solve_components, validate_epsilon, AlignmentGuess, GuessStream, PsiBound, SegmentLadder,
    MAX_ENUMERATED_SEGMENTS,
};
use crate::baseline::{baseline, easy_regime_policy, BaselineResult, EasyRegimePolicy};
use crate::density::{joint_cost_from_density_f64, DEFAULT_EXPONENT_CAP};
use crate::eoq::Instance;
use crate::numerics::Rational;
use crate::policy::{
    assemble_policy, best_option_cost, evaluate_exact, exact_total, grid_density, grid_partition,
    CostReport, JointMethod, Provenance, ScaledGridPolicy,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Upper limit on the multiple bound Ψ; `None` enumerates the theoretical value.
    pub psi_cap: Option<u64>,
    /// Maximum number of guesses drawn from the enumeration.
    pub guess_budget: u64,
    /// Restrict the search to one `tmin` candidate.
    pub tmin_index: Option<usize>,
    /// Break near-ties by exact rational cost.
    pub exact_compare: bool,
    pub exponent_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            psi_cap: Some(64),
            guess_budget: 100_000,
            tmin_index: None,
            exact_compare: false,
            exponent_cap: DEFAULT_EXPONENT_CAP,
        }
    }
}

/// Candidate families, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Aligned,
    PowerOfTwo,
    EasyRegime,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Aligned => "aligned",
            Method::PowerOfTwo => "power_of_two",
            Method::EasyRegime => "easy_regime",
        }
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aligned" => Ok(Method::Aligned),
            "power_of_two" => Ok(Method::PowerOfTwo),
            "easy_regime" => Ok(Method::EasyRegime),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub cost: f64,
    pub method: Method,
    pub tmin_index: usize,
    pub ordinal: u64,
    pub guess: Option<AlignmentGuess>,
}

impl Candidate {
    fn baseline(cost: f64, method: Method) -> Self {
        Candidate { cost, method, tmin_index: 0, ordinal: 0, guess: None }
    }

    fn key_cmp(&self, other: &Candidate) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.method.cmp(&other.method))
            .then(self.tmin_index.cmp(&other.tmin_index))
            .then(self.ordinal.cmp(&other.ordinal))
    }
}

/// Partial search state over a subset of guesses.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Accumulator {
    pub best: Option<Candidate>,
    /// Priced `(guess, tmin)` pairs.
    pub evaluated: u64,
    /// Guesses discarded as infeasible or beyond the exponent cap.
    pub pruned: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BestPolicy {
    Grid(ScaledGridPolicy),
    EasyRegime(EasyRegimePolicy),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best: BestPolicy,
    pub best_cost: f64,
    pub best_method: Method,
    pub report: CostReport,
    pub candidates_evaluated: u64,
    pub guesses_pruned: u64,
    pub budget_exhausted: bool,
    pub lower_bound: f64,
    pub opt_estimate: f64,
    pub pow2_cost: f64,
    pub easy_cost: f64,
    pub psi_effective: u64,
    pub psi_theoretical: BigInt,
    pub segments: usize,
    pub tmin_count: usize,
}

/// Optimality-gap certificate; `ratio` bounds `best_cost / OPT` from above.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub best_cost: f64,
    pub lower_bound: f64,
    pub ratio: f64,
    pub budget_exhausted: bool,
    pub psi_effective: u64,
    pub psi_theoretical: BigInt,
}

pub fn certify(result: &SolveResult) -> Certificate {
    Certificate {
        best_cost: result.best_cost,
        lower_bound: result.lower_bound,
        ratio: result.best_cost / result.lower_bound,
        budget_exhausted: result.budget_exhausted,
        psi_effective: result.psi_effective,
        psi_theoretical: result.psi_theoretical.clone(),
    }
}

/// Everything the guess loop needs, computed once per solve.
#[derive(Debug, Clone)]
pub struct SolvePlan {
    instance: Instance,
    epsilon: Rational,
    config: SolverConfig,
    baseline: BaselineResult,
    easy: EasyRegimePolicy,
    tmins: Vec<f64>,
    selected: Vec<usize>,
    ladder: SegmentLadder,
    psi: PsiBound,
    inv_eps: f64,
}

impl SolvePlan {
    pub fn new(instance: &Instance, epsilon: &Rational, config: &SolverConfig) -> Result<Self> {
        validate_epsilon(epsilon)?;
        let baseline = baseline(instance)?;
        let easy = easy_regime_policy(instance);
        let tmins = enumerate_tmin(instance.joint_cost(), baseline.opt_estimate, epsilon, instance.len())?;
        let selected = match config.tmin_index {
            Some(i) if i < tmins.len() => alloc::vec![i],
            Some(i) => {
                return Err(Error::Config(format!(
                    "tmin index {i} is out of range; there are {} candidates",
                    tmins.len()
                )))
            }
            None => (0..tmins.len()).collect(),
        };
        let ladder = build_segments(epsilon, tmins[0])?;
        if ladder.len() > MAX_ENUMERATED_SEGMENTS {
            return Err(Error::Config(format!(
                "epsilon {epsilon} needs {} segments, more than the {MAX_ENUMERATED_SEGMENTS} supported",
                ladder.len()
            )));
        }
        let psi = psi_value(epsilon, ladder.len(), config.psi_cap)?;
        Ok(SolvePlan {
            instance: instance.clone(),
            epsilon: epsilon.clone(),
            config: config.clone(),
            baseline,
            easy,
            tmins,
            selected,
            ladder,
            psi,
            inv_eps: epsilon.recip().to_f64(),
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn baseline(&self) -> &BaselineResult {
        &self.baseline
    }

    pub fn easy_policy(&self) -> &EasyRegimePolicy {
        &self.easy
    }

    pub fn tmins(&self) -> &[f64] {
        &self.tmins
    }

    pub fn ladder(&self) -> &SegmentLadder {
        &self.ladder
    }

    pub fn psi(&self) -> &PsiBound {
        &self.psi
    }

    /// The budgeted guess enumeration shared by all `tmin` candidates.
    pub fn guesses(&self) -> Result<GuessStream> {
        GuessStream::new(&self.ladder, self.psi.effective, self.config.guess_budget)
    }

    /// Prices one guess at every selected `tmin` and offers the cheapest to `acc`.
    pub fn evaluate_guess(&self, acc: &mut Accumulator, ordinal: u64, guess: &AlignmentGuess) -> Result<()> {
        let Some(components) = solve_components(guess, &self.ladder)? else {
            acc.pruned += 1;
            return Ok(());
        };
        debug_assert!(components.iter().all(|c| betas_within_bound(&c.betas, self.psi.effective)));
        let reps = choose_representatives(&components, self.psi.effective);
        let (values, parts) = grid_partition(&reps);
        let density = match grid_density(&values, &parts, self.config.exponent_cap) {
            Ok((d, _)) => d.to_f64(),
            Err(Error::Budget { .. }) => {
                acc.pruned += 1;
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let values_f: Vec<f64> = values.iter().map(Rational::to_f64).collect();
        let r1 = reps
            .get(1)
            .ok_or_else(|| Error::Internal("segment 1 missing from a guess".into()))?
            .to_f64();
        let k0 = self.instance.joint_cost();
        for &j in &self.selected {
            let tmin = self.tmins[j];
            let mut cost = joint_cost_from_density_f64(k0, density, tmin);
            for c in self.instance.commodities() {
                cost += best_option_cost(&c.model, &values_f, r1, self.inv_eps, tmin).1;
            }
            acc.evaluated += 1;
            let challenger = Candidate { cost, method: Method::Aligned, tmin_index: j, ordinal, guess: None };
            let wins = match &acc.best {
                None => true,
                Some(best) if self.config.exact_compare && near(cost, best.cost) => {
                    let full = Candidate { guess: Some(guess.clone()), ..challenger.clone() };
                    self.compare(&full, best) == Ordering::Less
                }
                Some(best) => challenger.key_cmp(best) == Ordering::Less,
            };
            if wins {
                acc.best = Some(Candidate { guess: Some(guess.clone()), ..challenger });
            }
        }
        Ok(())
    }

    /// Combines two partial results; associative and commutative.
    pub fn merge(&self, a: Accumulator, b: Accumulator) -> Accumulator {
        let best = match (a.best, b.best) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(if self.compare(&y, &x) == Ordering::Less { y } else { x }),
        };
        Accumulator { best, evaluated: a.evaluated + b.evaluated, pruned: a.pruned + b.pruned }
    }

    fn compare(&self, a: &Candidate, b: &Candidate) -> Ordering {
        if self.config.exact_compare && near(a.cost, b.cost) {
            if let (Ok(x), Ok(y)) = (self.exact_cost(a), self.exact_cost(b)) {
                match x.cmp(&y) {
                    Ordering::Equal => {}
                    o => return o,
                }
                return a
                    .method
                    .cmp(&b.method)
                    .then(a.tmin_index.cmp(&b.tmin_index))
                    .then(a.ordinal.cmp(&b.ordinal));
            }
        }
        a.key_cmp(b)
    }

    fn exact_cost(&self, candidate: &Candidate) -> Result<Rational> {
        match candidate.method {
            Method::EasyRegime => Rational::from_f64(self.easy.certified_cost)
                .ok_or_else(|| Error::Internal("certified cost is not finite".into())),
            Method::PowerOfTwo => exact_total(&self.instance, &self.baseline.pow2_policy, self.config.exponent_cap),
            Method::Aligned => {
                let policy = self.aligned_policy(candidate)?;
                exact_total(&self.instance, &policy, self.config.exponent_cap)
            }
        }
    }

    /// Policy of an aligned candidate, rebuilt from its guess.
    pub fn candidate_policy(&self, tmin_index: usize, ordinal: u64, guess: &AlignmentGuess) -> Result<Option<ScaledGridPolicy>> {
        let tmin = *self
            .tmins
            .get(tmin_index)
            .ok_or_else(|| Error::Config(format!("tmin index {tmin_index} is out of range")))?;
        let Some(components) = solve_components(guess, &self.ladder)? else {
            return Ok(None);
        };
        let reps = choose_representatives(&components, self.psi.effective);
        let policy = assemble_policy(&self.instance, &reps, &self.epsilon, tmin)?;
        Ok(Some(policy.with_provenance(Provenance::Aligned {
            tmin_index,
            guess: ordinal,
            collisions: reps.collisions().len(),
        })))
    }

    fn aligned_policy(&self, candidate: &Candidate) -> Result<ScaledGridPolicy> {
        let guess = candidate
            .guess
            .as_ref()
            .ok_or_else(|| Error::Internal("aligned candidate without a guess".into()))?;
        self.candidate_policy(candidate.tmin_index, candidate.ordinal, guess)?
            .ok_or_else(|| Error::Internal("winning guess is infeasible".into()))
    }

    /// Picks the overall winner among the aligned best and the two baselines.
    pub fn finish(&self, acc: Accumulator, budget_exhausted: bool) -> Result<SolveResult> {
        let mut winner = Candidate::baseline(self.easy.certified_cost, Method::EasyRegime);
        let pow2 = Candidate::baseline(self.baseline.pow2_cost, Method::PowerOfTwo);
        if self.compare(&pow2, &winner) == Ordering::Less {
            winner = pow2;
        }
        if let Some(aligned) = acc.best {
            if self.compare(&aligned, &winner) == Ordering::Less {
                winner = aligned;
            }
        }
        let (best, report) = match winner.method {
            Method::EasyRegime => {
                let per: Vec<f64> = self
                    .instance
                    .commodities()
                    .iter()
                    .zip(&self.easy.intervals)
                    .map(|(c, (_, t))| c.model.cost_unchecked(*t))
                    .collect();
                let separable: f64 = per.iter().sum();
                let report = CostReport {
                    joint: self.easy.certified_cost - separable,
                    per_commodity: per,
                    total: self.easy.certified_cost,
                    method: JointMethod::CertifiedUpperBound,
                    fallback: false,
                };
                (BestPolicy::EasyRegime(self.easy.clone()), report)
            }
            Method::PowerOfTwo => {
                let policy = self.baseline.pow2_policy.clone();
                let report = evaluate_exact(&self.instance, &policy, self.config.exponent_cap)?;
                (BestPolicy::Grid(policy), report)
            }
            Method::Aligned => {
                let policy = self.aligned_policy(&winner)?;
                let report = evaluate_exact(&self.instance, &policy, self.config.exponent_cap)?;
                debug_assert_eq!(report.total, winner.cost);
                (BestPolicy::Grid(policy), report)
            }
        };
        Ok(SolveResult {
            best,
            best_cost: report.total,
            best_method: winner.method,
            report,
            candidates_evaluated: acc.evaluated + 2,
            guesses_pruned: acc.pruned,
            budget_exhausted,
            lower_bound: self.baseline.lower_bound,
            opt_estimate: self.baseline.opt_estimate,
            pow2_cost: self.baseline.pow2_cost,
            easy_cost: self.easy.certified_cost,
            psi_effective: self.psi.effective,
            psi_theoretical: self.psi.theoretical.clone(),
            segments: self.ladder.len(),
            tmin_count: self.selected.len(),
        })
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Runs the whole search on the current thread.
pub fn solve(instance: &Instance, epsilon: &Rational, config: &SolverConfig) -> Result<SolveResult> {
    let plan = SolvePlan::new(instance, epsilon, config)?;
    let mut acc = Accumulator::default();
    let mut stream = plan.guesses()?;
    for (ordinal, guess) in stream.by_ref() {
        plan.evaluate_guess(&mut acc, ordinal, &guess)?;
    }
    plan.finish(acc, stream.budget_exhausted())
}
