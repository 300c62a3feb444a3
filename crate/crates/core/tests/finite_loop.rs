use loopforge::finite_loop::{
    analyze, bruck_series, corpus, corpus_loop, gamma_series, ideal_powers, isolator, nilpotency_class, normal_closure,
    periodicity_witness, quotient, Nilpotency, CORPUS_NAMES,
};
use loopforge::{eval_term, CayleyLoop, Subloop};

#[test]
fn corpus_is_complete() {
    assert_eq!(corpus().len(), CORPUS_NAMES.len());
    for name in CORPUS_NAMES {
        let l = corpus_loop(name).unwrap();
        assert_eq!(CayleyLoop::parse(&l.to_text()).unwrap(), l, "{name}");
        assert_eq!(CayleyLoop::parse(&l.to_json().to_string()).unwrap(), l, "{name}");
    }
    assert!(corpus_loop("nope").is_err());
}

#[test]
fn malformed_tables_are_rejected() {
    assert!(CayleyLoop::parse("2\n0 1\n1 1").is_err());
    assert!(CayleyLoop::parse("2\n1 0\n0 1").is_err());
    assert!(CayleyLoop::parse("3\n0 1 2\n1 2 0").is_err());
    assert!(CayleyLoop::parse("{\"table\": 3}").is_err());
}

#[test]
fn known_classes() {
    let cases = [
        ("trivial", Nilpotency::Class(0)),
        ("z4", Nilpotency::Class(1)),
        ("d8", Nilpotency::Class(2)),
        ("d32", Nilpotency::Class(4)),
        ("s3", Nilpotency::NotNilpotent),
        ("moufang16", Nilpotency::Class(3)),
    ];
    for (name, want) in cases {
        let c = nilpotency_class(&corpus_loop(name).unwrap()).unwrap();
        assert_eq!(c.gamma, want, "{name}");
    }
}

#[test]
fn moufang16_separates_the_series() {
    let l = corpus_loop("moufang16").unwrap();
    let r = analyze(&l, 4).unwrap();
    assert!(r.bruck_in_gamma && r.gamma_in_dims);
    assert_eq!(r.strict_gaps, vec![3]);
    assert_eq!(r.classes.bruck, Nilpotency::Class(2));
}

#[test]
fn series_terms_are_normal_and_descending() {
    for (name, l) in corpus() {
        let g = gamma_series(&l, 4).unwrap();
        let b = bruck_series(&l, 4).unwrap();
        for s in g.iter().chain(&b) {
            assert_eq!(&normal_closure(&l, s.elements()).unwrap(), s, "{name}");
        }
        assert!(g.windows(2).all(|w| w[1].is_subset(&w[0])), "{name}");
        assert!(b.windows(2).all(|w| w[1].is_subset(&w[0])), "{name}");
    }
}

#[test]
fn quotient_by_center_of_d8() {
    let l = corpus_loop("d8").unwrap();
    let g2 = gamma_series(&l, 2).unwrap()[1].clone();
    assert_eq!(g2.len(), 2);
    let q = quotient(&l, &g2).unwrap();
    assert_eq!(q.order(), 4);
    assert!(q.is_commutative() && q.is_associative());
    assert!(quotient(&l, &Subloop::whole(&l)).unwrap().order() == 1);
}

#[test]
fn ideal_powers_are_stable() {
    let l = corpus_loop("moufang12").unwrap();
    let p = ideal_powers(&l, 3).unwrap();
    assert!(p.iter().all(|s| s.dim() == 11));
}

#[test]
fn witnesses_land_in_the_isolated_subloop() {
    let l = corpus_loop("z4").unwrap();
    let k = normal_closure(&l, &[2]).unwrap();
    let iso = isolator(&l, &k).unwrap();
    assert_eq!(iso.subloop, Subloop::whole(&l));
    for (x, w) in &iso.witnesses {
        let v = eval_term(w, &l, &[*x]).unwrap();
        assert!(k.contains(v), "{x}: {w}");
    }
    let w = periodicity_witness(&l, 1).unwrap();
    assert_eq!(eval_term(&w, &l, &[1]).unwrap(), 0);
}
