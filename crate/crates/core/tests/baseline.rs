use jrp_core::baseline::{baseline, easy_regime_policy, power_of_two_exponent, power_of_two_policy, relaxation_lower_bound};
use jrp_core::density::DEFAULT_EXPONENT_CAP;
use jrp_core::eoq::Instance;
use jrp_core::policy::evaluate_exact;
use proptest::prelude::*;

fn param() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

fn instance() -> impl Strategy<Value = Instance> {
    (param(), prop::collection::vec((param(), param()), 1..10))
        .prop_map(|(k0, c)| Instance::from_params(k0, &c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponent_lands_in_the_rounding_window(t in 1e-3f64..1e3, base in 1e-3f64..1e3) {
        let k = power_of_two_exponent(t, base);
        let v = base * f64::powi(2.0, k);
        prop_assert!(v >= t / std::f64::consts::SQRT_2 && v < t * std::f64::consts::SQRT_2);
    }

    #[test]
    fn relaxation_is_a_stationary_minimum(inst in instance()) {
        let r = relaxation_lower_bound(&inst);
        let g = |t0: f64| {
            inst.commodities().iter().fold(inst.joint_cost() / t0, |acc, c| {
                acc + c.model.cost(t0.max(c.model.minimizer())).unwrap()
            })
        };
        prop_assert!((g(r.t0) - r.value).abs() <= 1e-12 * r.value);
        for f in [0.9, 0.99, 1.01, 1.1] {
            prop_assert!(g(r.t0 * f) >= r.value * (1.0 - 1e-12));
        }
    }

    #[test]
    fn power_of_two_at_relaxed_base_is_within_the_rounding_factor(inst in instance()) {
        let r = relaxation_lower_bound(&inst);
        let p = power_of_two_policy(&inst, r.t0).unwrap();
        let f = evaluate_exact(&inst, &p, DEFAULT_EXPONENT_CAP).unwrap().total;
        prop_assert!(f >= r.value * (1.0 - 1e-9));
        prop_assert!(f <= r.value * f64::sqrt(9.0 / 8.0) * (1.0 + 1e-9));
    }

    #[test]
    fn best_base_improves_on_the_relaxed_base(inst in instance()) {
        let b = baseline(&inst).unwrap();
        let at_t0 = power_of_two_policy(&inst, b.relaxation.t0).unwrap();
        let f = evaluate_exact(&inst, &at_t0, DEFAULT_EXPONENT_CAP).unwrap().total;
        prop_assert!(b.pow2_cost <= f);
        prop_assert_eq!(b.opt_estimate, b.pow2_cost);
        prop_assert_eq!(evaluate_exact(&inst, &b.pow2_policy, DEFAULT_EXPONENT_CAP).unwrap().total, b.pow2_cost);
    }

    #[test]
    fn overloaded_policy_bounds(inst in instance()) {
        let easy = easy_regime_policy(&inst);
        let lb = relaxation_lower_bound(&inst).value;
        prop_assert!(easy.certified_cost >= lb * (1.0 - 1e-9));
        let direct: f64 = easy
            .intervals
            .iter()
            .map(|&(id, t)| inst.overloaded_cost(id, t).unwrap())
            .sum();
        prop_assert!((direct - easy.certified_cost).abs() <= 1e-12 * direct);
    }
}
