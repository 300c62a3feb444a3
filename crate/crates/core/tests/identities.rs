use loopforge::brackets::{decompose_anti_associator, decompose_associator, decompose_commutator};
use loopforge::identities::{verify_formula, verify_multilinearity, verify_regularity, Formula, Mutation};
use loopforge::{parse_term, CayleyLoop, SeriesContext};

#[test]
fn small_formulas_hold() {
    for f in Formula::all() {
        let p = if matches!(f, Formula::AntiAssociatorSingle | Formula::AssociatorSingle) { 1 } else { 2 };
        let r = verify_formula(f, p, 2, 6, Mutation::None).unwrap();
        assert!(r.pass, "formula {}: {}", f.id(), r.difference);
    }
}

#[test]
fn flipped_sign_is_detected() {
    let r = verify_formula(Formula::Associator, 1, 2, 5, Mutation::FlipSign).unwrap();
    assert!(!r.pass);
    assert!(r.witness.is_some());
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(verify_formula(Formula::AssociatorSingle, 2, 2, 6, Mutation::None).is_err());
    assert!(verify_formula(Formula::Associator, 2, 2, 3, Mutation::None).is_err());
    assert!(Formula::from_id(6).is_err());
}

#[test]
fn decompositions_evaluate_on_a_finite_loop() {
    let l = CayleyLoop::parse("5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0").unwrap();
    for d in [decompose_associator(1, 2).unwrap(), decompose_anti_associator(2, 1).unwrap(), decompose_commutator(2).unwrap()] {
        let k = d.atom_count();
        for t in 0..5usize.pow(k as u32) {
            let atoms: Vec<usize> = (0..k).map(|i| t / 5usize.pow(i as u32) % 5).collect();
            assert_eq!(d.evaluate(&l, &atoms).unwrap(), d.target(&l, &atoms).unwrap());
        }
    }
}

#[test]
fn decomposition_in_series_model() {
    let d = decompose_associator(2, 2).unwrap();
    let ctx = SeriesContext::new(d.atom_count() as u32);
    let xs: Vec<_> = (1..=d.atom_count() as u32).map(|i| ctx.x(i)).collect();
    assert_eq!(d.evaluate(&ctx, &xs).unwrap(), d.target(&ctx, &xs).unwrap());
}

#[test]
fn multilinearity_report_is_complete() {
    let r = verify_multilinearity(1, 1, 2, 5).unwrap();
    assert!(r.pass);
    assert!(!r.checks.is_empty());
}

#[test]
fn regularity_of_a_commutator_word() {
    let w = parse_term("((x2*x1)\\(x1*x2))").unwrap();
    let r = verify_regularity(&w, 1, &[1, 1, 1], 4).unwrap();
    assert!(r.precondition && r.pass);
}
