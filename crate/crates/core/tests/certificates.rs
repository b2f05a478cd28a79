use inducert_core::certifier::{
    certify_full, certify_linear, gap_at_n, is_valid, mutate_certificate, validate_certificate, CertifyError,
    CertifyOptions, MUTATION_KINDS,
};
use inducert_core::exactnum::{quad_sign, rat};
use inducert_core::Graph;

fn flagships() -> Vec<(Graph, inducert_core::Rational)> {
    let p3v = Graph::named("path3+v").unwrap();
    vec![
        (Graph::cycle(5), rat(1, 2)),
        (Graph::complete(3), rat(1, 2)),
        (Graph::complete(4), rat(1, 2)),
        (p3v.clone(), rat(2, 5)),
        (p3v, rat(1, 2)),
    ]
}

#[test]
fn every_mutation_is_rejected() {
    for (f, p) in flagships() {
        let c = certify_full(&f, &p, &rat(1, 4), &CertifyOptions::default()).unwrap();
        assert_eq!(validate_certificate(&c), Ok(()));
        assert_eq!(quad_sign(&c.gap), 1);
        for s in 0..MUTATION_KINDS * 3 {
            let m = mutate_certificate(&c, s);
            assert_ne!(m, c, "selector {s} changed nothing");
            assert!(!is_valid(&m), "{f:?} at {p}: selector {s} still valid");
        }
    }
}

#[test]
fn gap_is_the_stored_sum_at_n() {
    for (f, p) in flagships() {
        let c = certify_full(&f, &p, &rat(1, 4), &CertifyOptions::default()).unwrap();
        assert_eq!(gap_at_n(&c, c.n).unwrap(), c.gap);
    }
}

#[test]
fn linear_route_referrals() {
    let p3v = Graph::named("path3+v").unwrap();
    for p in [rat(2, 5), rat(1, 2)] {
        assert!(matches!(certify_linear(&p3v, &p), Err(CertifyError::ExceptionalPoint)));
    }
    // S_{K3,K4} = 4(1-p)^3 never vanishes, so K4 takes the linear route
    let lin = certify_linear(&Graph::complete(4), &rat(1, 2)).unwrap();
    assert_eq!(lin.gap, rat(703, 55296));
}
