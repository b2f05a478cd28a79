use inducert::core::certifier::{certify_full, is_valid, CertifyOptions};
use inducert::core::exactnum::rat;
use inducert::core::Graph;
use inducert::json::{certificate_from_str, certificate_to_string, parse_rat, rational_str};
use proptest::prelude::*;
use serde_json::Value;

fn k3_json() -> String {
    let c = certify_full(&Graph::complete(3), &rat(1, 2), &rat(1, 4), &CertifyOptions::default()).unwrap();
    certificate_to_string(&c)
}

proptest! {
    #[test]
    fn rationals_roundtrip(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
        let r = rat(n, d);
        let s = rational_str(&r);
        prop_assert!(s.contains('/'));
        prop_assert_eq!(parse_rat(&s, "x").unwrap(), r);
    }
}

#[test]
fn certificates_roundtrip() {
    for (f, p) in [(Graph::complete(3), rat(1, 2)), (Graph::cycle(5), rat(1, 2)), (Graph::complete(4), rat(1, 2))] {
        let c = certify_full(&f, &p, &rat(1, 4), &CertifyOptions::default()).unwrap();
        let s = certificate_to_string(&c);
        let back = certificate_from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(is_valid(&back));
        assert_eq!(certificate_to_string(&back), s);
    }
}

#[test]
fn field_names_are_stable() {
    let v: Value = serde_json::from_str(&k3_json()).unwrap();
    for key in ["F", "p", "delta", "lambda", "m", "handle_U", "k", "z", "N", "W_choice", "support", "gap", "gamma"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["H", "P", "t_B", "t_U", "t_W", "contribution"] {
        assert!(v["support"][0].get(key).is_some(), "missing support.{key}");
    }
    assert_eq!(v["F"], "Bw");
    assert_eq!(v["p"], "1/2");
}

/// Each edit leaves well-formed JSON that must fail validation. The C5
/// certificate is used because every field of it carries information.
#[test]
fn tampered_files_are_rejected() {
    let c = certify_full(&Graph::cycle(5), &rat(1, 2), &rat(1, 4), &CertifyOptions::default()).unwrap();
    let base: Value = serde_json::from_str(&certificate_to_string(&c)).unwrap();
    let n = c.n;
    let edits: Vec<(&str, Box<dyn Fn(&mut Value)>)> = vec![
        ("p", Box::new(|v| v["p"] = "9/10".into())),
        ("p nearby", Box::new(|v| v["p"] = "2/5".into())),
        ("delta", Box::new(|v| v["delta"] = "1/5".into())),
        ("N odd", Box::new(|v| v["N"] = 3.into())),
        ("N larger", Box::new(move |v| v["N"] = (n + 2).into())),
        ("N smaller", Box::new(move |v| v["N"] = (n - 2).into())),
        ("lambda", Box::new(|v| v["lambda"] = "1/2".into())),
        ("gamma", Box::new(|v| v["gamma"] = "1/2".into())),
        ("gap", Box::new(|v| v["gap"]["coords"][0] = "1/2".into())),
        ("support P", Box::new(|v| v["support"][0]["P"] = "1/1".into())),
        ("support t_B", Box::new(|v| v["support"][0]["t_B"] = "7/1".into())),
        ("support dropped", Box::new(|v| v["support"].as_array_mut().unwrap().clear())),
        ("k", Box::new(|v| v["k"] = 3.into())),
        ("z", Box::new(|v| v["z"] = 4.into())),
        ("W", Box::new(|v| v["W_choice"] = "const1".into())),
        ("F", Box::new(|v| v["F"] = "Bo".into())),
    ];
    for (name, edit) in edits {
        let mut v = base.clone();
        edit(&mut v);
        let parsed = certificate_from_str(&serde_json::to_string(&v).unwrap());
        if let Ok(c) = parsed {
            assert!(!is_valid(&c), "{name} accepted");
        }
    }
}

#[test]
fn malformed_documents_fail_to_parse() {
    assert!(certificate_from_str("{}").is_err());
    let mut v: Value = serde_json::from_str(&k3_json()).unwrap();
    v["p"] = "0.5".into();
    assert!(certificate_from_str(&v.to_string()).is_err());
    let mut v: Value = serde_json::from_str(&k3_json()).unwrap();
    v["W_choice"] = "const2".into();
    assert!(certificate_from_str(&v.to_string()).is_err());
}
