use loopforge::bridge::{check_containment_finite, check_containment_free, check_jennings_finite, check_nsequence_nu, Scope};
use loopforge::finite_loop::{corpus, corpus_loop};

#[test]
fn free_model_checks_pass() {
    let r = check_nsequence_nu(5, 4).unwrap();
    assert!(r.pass, "{}", r.to_json());
    assert_eq!(r.scope, Scope::FreeModel { order: 5 });
    assert!(!r.witnesses.is_empty());
    assert!(check_containment_free(5, 4).unwrap().pass);
}

#[test]
fn finite_checks_pass_on_corpus() {
    for (name, l) in corpus() {
        let r = check_containment_finite(name, &l, 4).unwrap();
        assert!(r.pass, "{name}: {}", r.to_json());
        let j = check_jennings_finite(name, &l).unwrap();
        assert!(j.pass, "{name}: {}", j.to_json());
        assert_eq!(j.scope, Scope::Loop { name: name.to_string() });
    }
}

#[test]
fn result_json_carries_verdict() {
    let l = corpus_loop("d8").unwrap();
    let v = check_jennings_finite("d8", &l).unwrap().to_json();
    assert_eq!(v["pass"], true);
}
