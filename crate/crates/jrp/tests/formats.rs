use jrp::format::{
    instance_to_json, parse_instance, parse_policy, parse_result, policy_to_json, result_to_json, PolicyDoc,
};
use jrp::generate::{generate, Family, GenSpec};
use jrp_core::eoq::Instance;
use jrp_core::solver::{solve, BestPolicy, SolverConfig};
use jrp_core::Rational;
use proptest::prelude::*;

fn param() -> impl Strategy<Value = f64> {
    (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

fn instance() -> impl Strategy<Value = Instance> {
    (param(), prop::collection::vec((param(), param()), 1..6))
        .prop_map(|(k0, c)| Instance::from_params(k0, &c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn instance_round_trip(inst in instance()) {
        prop_assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn result_and_policy_round_trip(inst in instance()) {
        let config = SolverConfig { psi_cap: Some(6), guess_budget: 60, ..SolverConfig::default() };
        let result = solve(&inst, &Rational::ratio(9, 20), &config).unwrap();
        let text = result_to_json(&result);
        let back = parse_result(&text).unwrap();
        prop_assert_eq!(&back, &result);
        prop_assert_eq!(result_to_json(&back), text);
        if let BestPolicy::Grid(p) = &result.best {
            match parse_policy(&policy_to_json(p, Some(&result.report))).unwrap() {
                PolicyDoc::Grid(doc) => prop_assert_eq!(&doc.to_policy().unwrap(), p),
                PolicyDoc::Easy(_) => prop_assert!(false, "grid policy parsed as easy"),
            }
        }
    }
}

#[test]
fn generated_families() {
    for family in [Family::Random, Family::Identical, Family::TwoScale] {
        let spec = GenSpec::new(4, 9, family);
        let inst = generate(&spec).unwrap();
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }
    let spread = generate(&GenSpec::new(4, 9, Family::TwoScale)).unwrap();
    let t: Vec<f64> = spread.commodities().iter().map(|c| c.model.minimizer()).collect();
    let (lo, hi) = t.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi > 10.0 * lo);
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(parse_instance(r#"{"K0": 1, "commodities": [{"id": 0, "K": 1, "H": 1}], "extra": 1}"#).is_err());
    assert!(parse_instance(r#"{"K0": 1, "commodities": [{"id": 0, "K": 1, "H": 1, "x": 1}]}"#).is_err());
}
