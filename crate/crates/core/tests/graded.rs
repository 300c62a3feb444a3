use loopforge::brackets::BracketExpr;
use loopforge::graded::{akivis_check, induced_op, leading_term, primitivity_control, primitivity_suite, representative_independence, HomogeneousElement, LeadingTerm};
use loopforge::series::is_primitive;
use loopforge::{parse_term, Rational};

#[test]
fn commutator_of_generators() {
    let c = BracketExpr::comm(BracketExpr::slot(1), BracketExpr::slot(2));
    let g = |i| HomogeneousElement::generator(i).unwrap();
    let v = induced_op(&c, &[g(1), g(2)], 3).unwrap();
    assert_eq!(v.degree(), 2);
    let swapped = induced_op(&c, &[g(2), g(1)], 3).unwrap();
    assert_eq!(v.add(&swapped).unwrap(), HomogeneousElement::zero(2));
    assert!(v.is_primitive().unwrap());
}

#[test]
fn leading_term_of_a_word() {
    let w = parse_term("((x2*x1)\\(x1*x2))").unwrap();
    match leading_term(&w, 4).unwrap() {
        LeadingTerm::Homogeneous(h) => assert_eq!(h.degree(), 2),
        LeadingTerm::ExceedsOrder => panic!("commutator vanished"),
    }
    assert_eq!(leading_term(&parse_term("(x1/x1)").unwrap(), 3).unwrap(), LeadingTerm::ExceedsOrder);
}

#[test]
fn representatives_do_not_matter() {
    let a = BracketExpr::assoc(BracketExpr::slot(1), BracketExpr::slot(2), BracketExpr::slot(3));
    let args: Vec<_> = (1..=3).map(|i| HomogeneousElement::generator(i).unwrap()).collect();
    assert!(representative_independence(&a, &args, 4, 7, 5).unwrap());
}

#[test]
fn akivis_and_primitivity() {
    assert!(akivis_check(4).unwrap().pass);
    let r = primitivity_suite(3, 3).unwrap();
    assert!(r.pass && !r.control_primitive);
    assert!(!is_primitive(&primitivity_control().unwrap()).unwrap());
}

#[test]
fn scaling_is_linear() {
    let g = HomogeneousElement::generator(1).unwrap();
    let two = g.add(&g).unwrap();
    assert_eq!(two, g.scale(&Rational::from_i64(2)));
    assert!(g.sub(&g).unwrap().is_zero());
}
