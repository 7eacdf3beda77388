//! Cross-route properties of the cyclicity pipeline on random inputs.

use hblab::boundary::literal::parse_function;
use hblab::cyclicity::{
    analyze, classify_finite_defect, decay_table, estimate_from_decay, necessity_check, AnalyzeOptions,
    DecayThresholds, Verdict,
};
use hblab::factor::is_outer;
use hblab::hb::HbSpace;
use hblab::models::{theta_cyclic, theta_model};
use hblab::poly::CPoly;
use hblab::scalar::C64;
use hblab::Config;
use proptest::prelude::*;

fn space(b: &str) -> HbSpace {
    HbSpace::new(parse_function(b).unwrap(), Config::default()).unwrap()
}

fn poly() -> impl Strategy<Value = CPoly> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..7)
        .prop_map(|c| CPoly::new(c.into_iter().map(|(re, im)| C64::new(re, im)).collect()))
        .prop_filter("nonzero", |p| p.max_abs() > 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn classifier_and_decay_never_contradict(f in poly()) {
        let s = space("(1+z)/2");
        let k = classify_finite_defect(&s, &f).unwrap().verdict;
        let e = estimate_from_decay(&decay_table(&s, &f, 40).unwrap(), &DecayThresholds::default()).verdict;
        prop_assert!(!k.contradicts(e), "{k:?} vs {e:?}");
    }

    #[test]
    fn shifted_functions_are_never_cyclic(f in poly(), b in prop::sample::select(vec!["(1+z)/2", "z/2", "z(1+z)/2"])) {
        let s = space(b);
        prop_assert_eq!(classify_finite_defect(&s, &f.shift(1)).unwrap().verdict, Verdict::NotCyclic);
        prop_assert!(!necessity_check(&s, &f.shift(1)).unwrap().passed);
    }

    #[test]
    fn multiplying_by_the_mate_keeps_cyclicity(f in poly(), b in prop::sample::select(vec!["z/2", "(1+z)/4", "(2+z^2)/4"])) {
        let s = space(b);
        if classify_finite_defect(&s, &f).unwrap().verdict == Verdict::Cyclic {
            let af = s.a_num() * &f;
            prop_assert_eq!(classify_finite_defect(&s, &af).unwrap().verdict, Verdict::Cyclic);
        }
    }

    #[test]
    fn necessity_failure_blocks_every_cyclic_route(f in poly()) {
        let s = space("z(1+z)/2");
        let n = necessity_check(&s, &f).unwrap();
        let r = analyze(&s, &f, &AnalyzeOptions { decay_n: Some(30), ..Default::default() }).unwrap();
        if !n.passed {
            prop_assert!(r.verdict == Verdict::NotCyclic);
            prop_assert!(r.evidence.iter().all(|e| e.verdict != Verdict::Cyclic && e.verdict != Verdict::LikelyCyclic));
        }
        prop_assert_eq!(n.passed, is_outer(&f).unwrap() && f.eval(&C64::new(1.0, 0.0)).norm() > 1e-9);
    }

    #[test]
    fn inner_model_matches_classifier(f in poly()) {
        let cfg = Config::default();
        let m = theta_model(&parse_function("z").unwrap(), &cfg).unwrap();
        let s = space("(1+z)/2");
        prop_assert_eq!(theta_cyclic(&m, &f).unwrap().verdict, classify_finite_defect(&s, &f).unwrap().verdict);
    }
}

#[test]
fn exact_and_float_decay_agree() {
    use hblab::poly::QPoly;
    use hblab::scalar::{q, QC};
    let s = space("(3z+z^2)/4");
    let fq = QPoly::new(vec![QC::new(q(2, 1), q(0, 1)), QC::new(q(1, 2), q(1, 3)), QC::new(q(-1, 4), q(0, 1))]);
    let ex = hblab::cyclicity::decay_table_exact(&s, &fq, 10).unwrap();
    let fl = decay_table(&s, &fq.to_c64(), 10).unwrap();
    for (a, b) in ex.entries.iter().zip(&fl.entries) {
        assert!((a.d2 - b.d2).abs() < 1e-10, "{} vs {}", a.d2, b.d2);
    }
}
