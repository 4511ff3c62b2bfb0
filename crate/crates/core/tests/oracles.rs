use std::path::PathBuf;
use std::sync::Arc;

use fusionkit::cohom::{cyclic_invariant, fusion_system_to_cocycle, h3, h3_via_uber};
use fusionkit::feudal::{
    enumerate_feudal, moore_read, round_trip_hom, round_trip_rule, tambara_yamagami,
};
use fusionkit::fsys::{enumerate_bruteforce, Support, DEFAULT_BUDGET_BITS};
use fusionkit::group::{by_name, cyclic, product};
use fusionkit::io::{parse_hom_datum, parse_rule, read_file};
use fusionkit::uber::{enumerate_uber, Ambi};
use fusionkit::Field;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

#[test]
fn cyclic_h3_order_is_gcd() {
    for n in 1..=6 {
        for p in [2u32, 3, 5, 7, 13, 17] {
            let r = h3(&cyclic(n), &Field::new(p).unwrap()).unwrap();
            assert_eq!(r.order as usize, gcd(n, p as usize - 1), "Z{n} over {p}");
        }
    }
}

#[test]
fn klein_h3_order_over_odd_primes() {
    let v4 = product(&cyclic(2), &cyclic(2));
    for p in [3u32, 5, 7, 17] {
        assert_eq!(h3(&v4, &Field::new(p).unwrap()).unwrap().order, 16);
    }
    assert_eq!(h3(&v4, &Field::new(2).unwrap()).unwrap().order, 1);
}

#[test]
fn bruteforce_matches_uber_on_ty_z2() {
    let ty = tambara_yamagami(&cyclic(2));
    let k = Arc::new(Field::new(17).unwrap());
    let brute = enumerate_bruteforce(
        Support::new(ty.rule()).unwrap(),
        k.clone(),
        DEFAULT_BUDGET_BITS,
    )
    .unwrap();
    let ambi = Ambi::new(&ty).unwrap();
    let uber = enumerate_uber(&ambi, &k).unwrap();
    assert_eq!(brute.class_count(), 2);
    assert_eq!(uber.gauge_classes.len(), 2);
}

#[test]
fn bruteforce_matches_h3_on_z4() {
    let z4 = cyclic(4);
    let k = Arc::new(Field::new(17).unwrap());
    let brute =
        enumerate_bruteforce(Support::new(&z4.to_fusion_rule()).unwrap(), k.clone(), 96.0).unwrap();
    assert_eq!(brute.class_count(), 4);
    assert_eq!(h3(&z4, &k).unwrap().order, 4);
    let mut zetas: Vec<u32> = brute
        .classes
        .iter()
        .map(|f| cyclic_invariant(&z4, 1, &fusion_system_to_cocycle(&z4, f).unwrap()).value())
        .collect();
    zetas.sort_unstable();
    assert_eq!(zetas, vec![1, 4, 13, 16]);
}

#[test]
fn bruteforce_matches_h3_on_klein() {
    let v4 = product(&cyclic(2), &cyclic(2));
    let k = Arc::new(Field::new(17).unwrap());
    let brute =
        enumerate_bruteforce(Support::new(&v4.to_fusion_rule()).unwrap(), k.clone(), 96.0).unwrap();
    assert_eq!(brute.class_count(), 16);
    let via = h3_via_uber(&v4, &v4.index_two_subgroups()[0], &k).unwrap();
    assert_eq!(via.count, 16);
    assert!(via.agrees);
}

#[test]
fn fixtures_parse() {
    for name in [
        "ty_z2.json",
        "ty_z3.json",
        "moore_read.json",
        "z4_graded.json",
        "z2xz2_graded.json",
    ] {
        let loaded = parse_rule(&read_file(&fixture(name)).unwrap()).unwrap();
        assert!(loaded.rule.verify().passed(), "{name}");
        assert!(loaded.feudal().is_ok(), "{name}");
    }
    let mr = parse_rule(&read_file(&fixture("moore_read.json")).unwrap()).unwrap();
    assert!(mr
        .feudal()
        .unwrap()
        .graded_isomorphism(&moore_read())
        .is_some());
    let broken = parse_rule(&read_file(&fixture("broken_rule.json")).unwrap()).unwrap();
    assert!(!broken.rule.verify().passed());
    let datum = parse_hom_datum(&read_file(&fixture("hom_z4_doubling.json")).unwrap()).unwrap();
    assert!(round_trip_hom(&datum));
    assert_eq!(datum.source().order(), by_name("Z4").unwrap().order());
}

#[test]
fn feudal_round_trips_up_to_order_eight() {
    let found = enumerate_feudal(8).unwrap();
    assert!(!found.rules.is_empty());
    for e in &found.rules {
        assert!(round_trip_hom(&e.datum));
        assert!(round_trip_rule(&e.rule));
    }
}
