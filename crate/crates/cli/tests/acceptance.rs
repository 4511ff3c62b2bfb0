use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use fusionkit::cohom::{coboundary, Cochain, LordFunctions, Side};
use fusionkit::feudal::{
    enumerate_feudal, graded_group, moore_read, round_trip_hom, round_trip_rule, tambara_yamagami,
    FeudalRule,
};
use fusionkit::fsys::{enumerate_bruteforce, FusionSystem, GaugeXi, Support};
use fusionkit::group::{catalog, cyclic, dihedral, product, FiniteGroup};
use fusionkit::io::rule_to_json;
use fusionkit::uber::decomp::{gauge_identities, pentagon_identities};
use fusionkit::uber::{
    enumerate_uber, is_normal, normalize, psi, reconstruct, Ambi, Decomposition, GaugeParts,
};
use fusionkit::{Field, Multiset};

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fusionkit"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field(p: u32) -> Arc<Field> {
    Arc::new(Field::new(p).unwrap())
}

fn structural_catalog() -> Outcome {
    let mr = cli(&["rule", "analyze", p(&fixture("moore_read.json"))])?;
    ensure(mr["simple_current_index"] == 2, || {
        format!("MR index {}", mr["simple_current_index"])
    })?;
    ensure(
        mr["adjoint_subrule"].as_array().map(Vec::len) == Some(2),
        || format!("MR adjoint {}", mr["adjoint_subrule"]),
    )?;
    ensure(mr["universal_grading"]["group"] == "Z4", || {
        format!("MR grading {}", mr["universal_grading"])
    })?;
    for ty in ["ty_z2.json", "ty_z3.json"] {
        let r = cli(&["rule", "analyze", p(&fixture(ty))])?;
        ensure(r["universal_grading"]["group"] == "Z2", || {
            format!("{ty} grading {}", r["universal_grading"])
        })?;
    }
    Ok("MR: index 2, adjoint size 2, grading Z4; TY(Z2), TY(Z3): grading Z2".into())
}

fn feudal_round_trip() -> Outcome {
    let found = enumerate_feudal(8).map_err(|e| e.to_string())?;
    ensure(!found.rules.is_empty(), || "no data enumerated".into())?;
    for e in &found.rules {
        ensure(round_trip_hom(&e.datum), || {
            format!("Gamma(Phi(H)) differs for {:?}", e.summary())
        })?;
        ensure(round_trip_rule(&e.rule), || {
            format!("Phi(Gamma(L)) differs for {:?}", e.summary())
        })?;
    }
    Ok(format!(
        "{} homomorphism data round-trip both ways",
        found.rules.len()
    ))
}

fn tambara_yamagami_z2() -> Outcome {
    let rule = fixture("ty_z2.json");
    let c = cli(&["uber", "classify", "--rule", p(&rule), "--p", "17"])?;
    ensure(c["class_count"] == 2, || {
        format!("class count {}", c["class_count"])
    })?;
    let mut taus = Vec::new();
    for cl in c["classes"].as_array().unwrap() {
        ensure(cl["key"]["chi(1,1)"] == serde_json::json!([16]), || {
            format!("chi(a,a) {}", cl["key"])
        })?;
        taus.push(cl["key"]["tau"][0].as_u64().unwrap());
    }
    taus.sort_unstable();
    // τ² = 1/|A| in GF(17), found by search.
    let expected: Vec<u64> = (1..17u64).filter(|t| (2 * t * t) % 17 == 1).collect();
    ensure(taus == expected, || {
        format!("tau {taus:?}, expected {expected:?}")
    })?;
    let brute = cli(&["fsys", "enumerate", "--rule", p(&rule), "--p", "17"])?;
    ensure(brute["class_count"] == 2, || {
        format!("brute force found {}", brute["class_count"])
    })?;
    Ok(format!(
        "2 classes, chi(a,a) = -1, tau in {taus:?}; brute force agrees"
    ))
}

fn moore_read_classes() -> Outcome {
    let c = cli(&[
        "uber",
        "classify",
        "--rule",
        p(&fixture("moore_read.json")),
        "--p",
        "17",
    ])?;
    let mut xs: Vec<u64> = c["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|cl| cl["key"]["chi(i,i)"][0].as_u64().unwrap())
        .collect();
    xs.sort_unstable();
    let roots: Vec<u64> = (1..17u64).filter(|x| x.pow(4) % 17 == 16).collect();
    ensure(xs == roots, || {
        format!("x values {xs:?}, roots of x^4 = -1 are {roots:?}")
    })?;
    let am = Ambi::new(&moore_read()).map_err(|e| e.to_string())?;
    let k = field(17);
    let classes = enumerate_uber(&am, &k).map_err(|e| e.to_string())?;
    for u in &classes.gauge_classes {
        let f = reconstruct(u).map_err(|e| e.to_string())?;
        let report = f.verify();
        ensure(report.passed(), || {
            format!("reconstructed system fails {:?}", report.failed_axioms())
        })?;
        ensure(
            report
                .checks
                .iter()
                .any(|c| c.axiom.contains("pentagon") && c.checked > 0),
            || "no pentagon instances checked".into(),
        )?;
    }
    let brute = enumerate_bruteforce(Support::new(am.feudal().rule()).unwrap(), k, 1024.0)
        .map_err(|e| e.to_string())?;
    ensure(brute.class_count() == 4, || {
        format!("brute force found {}", brute.class_count())
    })?;
    Ok(format!(
        "4 classes, x in {xs:?}; all reconstructions pass the pentagon; brute force agrees"
    ))
}

fn cohomology_cross_check() -> Outcome {
    let h = cli(&[
        "cohom",
        "h3",
        "--group",
        "Z4",
        "--p",
        "17",
        "--via-uber",
        "2",
    ])?;
    ensure(h["order"] == 4, || format!("order {}", h["order"]))?;
    let roots: Vec<u64> = (1..17u64).filter(|x| x.pow(4) % 17 == 1).collect();
    let mut got: Vec<u64> = h["roots_of_unity"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    got.sort_unstable();
    ensure(got == roots, || {
        format!("invariants {got:?}, 4th roots of unity {roots:?}")
    })?;
    ensure(
        h["via_uber"]["count"] == 4 && h["via_uber"]["agrees"] == true,
        || format!("via uber {}", h["via_uber"]),
    )?;
    Ok(format!(
        "order 4, invariants {got:?}, via the index-2 subgroup: 4"
    ))
}

fn obstruction_suite() -> Outcome {
    let c = cli(&[
        "uber",
        "classify",
        "--rule",
        p(&fixture("ty_z3.json")),
        "--p",
        "7",
    ])?;
    ensure(c["class_count"] == 0, || {
        format!("TY(Z3)/7 classes {}", c["class_count"])
    })?;
    let brute = cli(&[
        "fsys",
        "enumerate",
        "--rule",
        p(&fixture("ty_z3.json")),
        "--p",
        "7",
        "--budget-bits",
        "1024",
    ])?;
    ensure(brute["class_count"] == 0, || {
        format!("TY(Z3)/7 brute force {}", brute["class_count"])
    })?;
    let s3 = tambara_yamagami(&dihedral(3));
    let path = scratch("ty_s3.json");
    std::fs::write(&path, rule_to_json(s3.rule(), Some(s3.serfs())).to_string()).unwrap();
    let c = cli(&["uber", "classify", "--rule", p(&path), "--p", "5"])?;
    ensure(c["class_count"] == 0, || {
        format!("TY(S3) classes {}", c["class_count"])
    })?;
    ensure(
        c["obstructions"]["obstructions"] == serde_json::json!(["A is not abelian"]),
        || format!("TY(S3) {}", c["obstructions"]),
    )?;
    Ok("TY(Z3)/7: 0 systems by both engines; TY(S3)/5: A is not abelian, empty".into())
}

fn random_gauge(f: &FusionSystem, rng: &mut ChaCha8Rng) -> GaugeXi {
    let rng = std::cell::RefCell::new(rng);
    let e = f.rule().unit();
    let k = f.field().clone();
    GaugeXi::from_fn(f.support().clone(), k.clone(), |t| {
        if t[0] == e || t[1] == e {
            k.one()
        } else {
            k.elem(rng.borrow_mut().gen_range(1..k.p() as u64))
        }
    })
}

fn engine_rules() -> Vec<(&'static str, FeudalRule)> {
    vec![
        ("TY(Z2)", tambara_yamagami(&cyclic(2))),
        ("MR", moore_read()),
        ("Z2-graded Z4", graded_group(&cyclic(4), &[0, 2]).unwrap()),
    ]
}

fn engine_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let k = field(17);
    let mut counts = Vec::new();
    for (name, feudal) in engine_rules() {
        let am = Ambi::new(&feudal).map_err(|e| e.to_string())?;
        let classes = enumerate_uber(&am, &k).map_err(|e| e.to_string())?;
        for u in &classes.gauge_classes {
            let f = reconstruct(u).map_err(|e| e.to_string())?;
            ensure(psi(&am, &f).as_ref() == Ok(u), || {
                format!("{name}: psi(reconstruct(u)) != u")
            })?;
            let g = f
                .apply_gauge(&random_gauge(&f, &mut rng))
                .map_err(|e| e.to_string())?;
            let (n, _) = normalize(&am, &g).map_err(|e| e.to_string())?;
            ensure(is_normal(&am, &n).unwrap_or(false), || {
                format!("{name}: normalize is not normal")
            })?;
            let back = reconstruct(&psi(&am, &n).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure(back == n, || format!("{name}: reconstruct(psi(n)) != n"))?;
            ensure(back.is_gauge_equivalent(&f), || {
                format!("{name}: round trip changed the class")
            })?;
            ensure(back.is_gauge_equivalent(&g), || {
                format!("{name}: round trip left the gauge class")
            })?;
        }
        counts.push(format!("{name}: {}", classes.gauge_classes.len()));
    }
    Ok(format!("round trips exact on {}", counts.join(", ")))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = field(17);
    let mut systems = Vec::new();
    for (_, feudal) in engine_rules() {
        let am = Ambi::new(&feudal).map_err(|e| e.to_string())?;
        for u in enumerate_uber(&am, &k)
            .map_err(|e| e.to_string())?
            .gauge_classes
        {
            systems.push((am.clone(), reconstruct(&u).map_err(|e| e.to_string())?));
        }
    }
    for i in 0..200 {
        let (am, f) = &systems[i % systems.len()];
        let xi = random_gauge(f, &mut rng);
        let g = f.apply_gauge(&xi).map_err(|e| e.to_string())?;
        let d = Decomposition::of(am, f).map_err(|e| e.to_string())?;
        let dg = Decomposition::of(am, &g).map_err(|e| e.to_string())?;
        let gi = gauge_identities(am, &d, &dg, &GaugeParts::of(am, &xi));
        let pi = pentagon_identities(am, &dg, &k);
        ensure(gi.checks.len() + pi.checks.len() == 24, || {
            "expected 24 identities".into()
        })?;
        ensure(gi.passed() && pi.passed(), || {
            format!(
                "case {i}: {:?} {:?}",
                gi.failed_axioms(),
                pi.failed_axioms()
            )
        })?;
    }

    for g in catalog(4) {
        for pr in [5u32, 13, 17] {
            let kf = Field::new(pr).unwrap();
            for deg in 1..=2usize {
                let vals: Vec<_> = (0..g.order().pow(deg as u32))
                    .map(|_| kf.elem(rng.gen_range(1..pr as u64)))
                    .collect();
                let h = Cochain::from_values(deg, g.order(), vals).unwrap();
                for side in [Side::Left, Side::Right] {
                    let dd =
                        coboundary(&g, &kf, &coboundary(&g, &kf, &h, side).unwrap(), side).unwrap();
                    ensure(dd.values().iter().all(|v| v.value() == 1), || {
                        format!("dd != 1 on {}", g.name())
                    })?;
                }
            }
        }
    }
    let am = Ambi::new(&moore_read()).unwrap();
    let module = LordFunctions {
        ambi: am.clone(),
        field: k.clone(),
    };
    for deg in 1..=2usize {
        let vals: Vec<Vec<_>> = (0..am.serf_count().pow(deg as u32))
            .map(|_| {
                (0..am.lord_count())
                    .map(|_| k.elem(rng.gen_range(1..17)))
                    .collect()
            })
            .collect();
        let h = Cochain::from_values(deg, am.serf_count(), vals).unwrap();
        let dd = coboundary(
            am.group(),
            &module,
            &coboundary(am.group(), &module, &h, Side::Left).unwrap(),
            Side::Left,
        )
        .unwrap();
        ensure(
            dd.values().iter().all(|v| v.iter().all(|x| x.value() == 1)),
            || "dd != 1 on lord functions".into(),
        )?;
    }

    for (_, f) in &systems {
        let rule = f.rule();
        let e = rule.unit();
        for x in 0..rule.len() {
            for y in 0..rule.len() {
                for r in rule.fuse(x, y).support() {
                    for m in [
                        f.recoupling_matrix(e, x, y, r),
                        f.recoupling_matrix(x, y, e, r),
                    ] {
                        ensure(
                            m.rows.len() == 1 && m.cols.len() == 1 && m.entries[0][0].value() == 1,
                            || "unit leg is not the identity".into(),
                        )?;
                    }
                }
            }
        }
    }

    let v4 = product(&cyclic(2), &cyclic(2));
    let fixtures = [
        tambara_yamagami(&cyclic(2)),
        tambara_yamagami(&cyclic(3)),
        moore_read(),
        graded_group(&cyclic(4), &[0, 2]).unwrap(),
        graded_group(&v4, &v4.index_two_subgroups()[0]).unwrap(),
    ];
    for feudal in &fixtures {
        let am = Ambi::new(feudal).unwrap();
        let g = am.group();
        let cosets: Vec<Vec<usize>> = (0..g.order())
            .map(|x| {
                let mut c: Vec<usize> = am
                    .a_subgroup()
                    .iter()
                    .map(|&y| am.serf_id(g.mul(x, y)))
                    .collect();
                c.sort_unstable();
                c
            })
            .collect();
        let support = Support::new(feudal.rule()).unwrap();
        let n = feudal.rule().len();
        for idx in 0..n.pow(4) {
            let (x, y, z, r) = (idx % n, idx / n % n, idx / n / n % n, idx / n / n / n);
            let (mut rows, mut cols) = support.matrix_shape(x, y, z, r);
            rows.sort_unstable();
            cols.sort_unstable();
            let ok = rows.len() == cols.len()
                && (rows.len() <= 1 || (cosets.contains(&rows) && cosets.contains(&cols)));
            ensure(ok, || format!("shape law fails at {x},{y},{z},{r}"))?;
        }
    }

    let mut rules: Vec<_> = catalog(8).iter().map(FiniteGroup::to_fusion_rule).collect();
    rules.extend(fixtures.iter().map(|f| f.rule().clone()));
    for i in 0..500 {
        let rule = &rules[i % rules.len()];
        let mut ms = || {
            let mut m = Multiset::empty();
            for _ in 0..rng.gen_range(1..4) {
                m.add(rng.gen_range(0..rule.len()), rng.gen_range(1..3));
            }
            m
        };
        let (a, b, c) = (ms(), ms(), ms());
        let left = rule.fuse_multisets(&rule.fuse_multisets(&a, &b), &c);
        let right = rule.fuse_multisets(&a, &rule.fuse_multisets(&b, &c));
        ensure(left == right, || format!("associativity fails on rule {i}"))?;
    }
    Ok(
        "24 identities x 200 gauges, dd = 1, unit legs, shape law, 500 associativity samples"
            .into(),
    )
}

// Bypasses libtest output capture so the lines show up in plain `cargo test`.
fn report(line: String) {
    use std::io::Write;
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        (
            "structural catalog",
            structural_catalog,
            Some(Duration::from_secs(1)),
        ),
        (
            "feudal round trip",
            feudal_round_trip,
            Some(Duration::from_secs(10)),
        ),
        (
            "Tambara-Yamagami Z2 over GF(17)",
            tambara_yamagami_z2,
            Some(Duration::from_secs(60)),
        ),
        (
            "Moore-Read over GF(17)",
            moore_read_classes,
            Some(Duration::from_secs(120)),
        ),
        (
            "cohomology cross-check",
            cohomology_cross_check,
            Some(Duration::from_secs(30)),
        ),
        ("obstruction suite", obstruction_suite, None),
        ("equivalence engine soundness", engine_soundness, None),
        ("property suites", property_suites, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(l)) = (&outcome, limit) {
            if elapsed > *l {
                outcome = Err(format!("took {elapsed:.2?}, limit {l:?}"));
            }
        }
        let budget = limit.map_or(String::new(), |l| format!(" / {l:?}"));
        match outcome {
            Ok(detail) => report(format!(
                "PASS criterion {}: {name}: {detail} [{elapsed:.2?}{budget}]",
                i + 1
            )),
            Err(detail) => {
                failed += 1;
                report(format!(
                    "FAIL criterion {}: {name}: {detail} [{elapsed:.2?}{budget}]",
                    i + 1
                ));
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
