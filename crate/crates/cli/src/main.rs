use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fusionkit::cohom::{h3, h3_via_uber};
use fusionkit::feudal::{analyze_rule, enumerate_feudal, gamma, phi};
use fusionkit::fsys::{enumerate_bruteforce, Support, DEFAULT_BUDGET_BITS};
use fusionkit::group::by_name;
use fusionkit::io::{
    hom_datum_to_json, parse_gauge, parse_hom_datum, parse_rule, parse_system, parse_uber,
    read_file, rule_to_json, system_to_json, uber_to_json, LoadedRule,
};
use fusionkit::uber::{
    check_existence_obstructions, enumerate_uber, is_normal, normalize, psi, reconstruct, Ambi,
};
use fusionkit::{AxiomReport, Error, Field};

#[derive(Parser)]
#[command(
    name = "fusionkit",
    version,
    about = "Exact computations with fusion rules and fusion systems over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Fusion rules.
    #[command(subcommand)]
    Rule(RuleCmd),
    /// Feudal rules and homomorphism data.
    #[command(subcommand)]
    Feudal(FeudalCmd),
    /// Fusion systems.
    #[command(subcommand)]
    Fsys(FsysCmd),
    /// Überderivations.
    #[command(subcommand)]
    Uber(UberCmd),
    /// Group cohomology.
    #[command(subcommand)]
    Cohom(CohomCmd),
}

#[derive(Subcommand)]
enum RuleCmd {
    /// Check the fusion-rule axioms.
    Verify { rule: PathBuf },
    /// Nilpotency, simple currents, adjoint subrule, universal grading.
    Analyze { rule: PathBuf },
}

#[derive(Subcommand)]
enum FeudalCmd {
    /// Feudal rule of a homomorphism datum.
    Phi { datum: PathBuf },
    /// Homomorphism datum of a feudal rule.
    Gamma { rule: PathBuf },
    /// Properly feudal rules up to isomorphism.
    Enumerate {
        #[arg(long)]
        max_order: usize,
    },
}

#[derive(Args)]
struct RuleField {
    #[arg(long)]
    rule: PathBuf,
    #[arg(long)]
    p: u32,
}

#[derive(Subcommand)]
enum FsysCmd {
    /// Check every fusion-system axiom.
    Verify { system: PathBuf },
    /// Apply a gauge transformation.
    GaugeApply {
        system: PathBuf,
        #[arg(long)]
        gauge: PathBuf,
    },
    /// All fusion systems up to gauge, by exhaustive search.
    Enumerate {
        #[command(flatten)]
        target: RuleField,
        #[arg(long, default_value_t = DEFAULT_BUDGET_BITS)]
        budget_bits: f64,
    },
}

#[derive(Subcommand)]
enum UberCmd {
    /// Überderivation of a fusion system, normalizing it first if needed.
    Psi { system: PathBuf },
    /// The normal fusion system of an überderivation.
    Reconstruct {
        uber: PathBuf,
        #[arg(long)]
        rule: Option<PathBuf>,
        #[arg(long)]
        p: Option<u32>,
    },
    /// Überderivations up to gauge and graded automorphisms.
    Classify {
        #[command(flatten)]
        target: RuleField,
    },
    /// Necessary conditions for existence.
    Obstructions {
        #[command(flatten)]
        target: RuleField,
    },
}

#[derive(Subcommand)]
enum CohomCmd {
    /// Third cohomology with coefficients in GF(p)^×.
    H3 {
        #[arg(long)]
        group: String,
        #[arg(long)]
        p: u32,
        /// Also count through überderivations on the index-2 subgroup
        /// generated by these comma-separated labels.
        #[arg(long)]
        via_uber: Option<String>,
    },
}

struct Outcome {
    report: Value,
    ok: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, ok: true }
    }
}

fn load_rule(path: &Path) -> Result<LoadedRule> {
    let text = read_file(path)?;
    parse_rule(&text).with_context(|| format!("in {}", path.display()))
}

fn field(p: u32) -> Result<Arc<Field>> {
    Ok(Arc::new(Field::new(p)?))
}

fn axioms(report: &AxiomReport) -> Outcome {
    Outcome {
        report: serde_json::to_value(report).expect("report serializes"),
        ok: report.passed(),
    }
}

fn run_rule(cmd: RuleCmd) -> Result<Outcome> {
    match cmd {
        RuleCmd::Verify { rule } => Ok(axioms(&load_rule(&rule)?.rule.verify())),
        RuleCmd::Analyze { rule } => {
            let a = analyze_rule(&load_rule(&rule)?.rule);
            let ok = a.axioms_hold;
            Ok(Outcome {
                report: serde_json::to_value(a)?,
                ok,
            })
        }
    }
}

fn run_feudal(cmd: FeudalCmd) -> Result<Outcome> {
    match cmd {
        FeudalCmd::Phi { datum } => {
            let h = parse_hom_datum(&read_file(&datum)?)
                .with_context(|| format!("in {}", datum.display()))?;
            let l = phi(&h);
            Ok(Outcome::ok(rule_to_json(l.rule(), Some(l.serfs()))))
        }
        FeudalCmd::Gamma { rule } => {
            let l = load_rule(&rule)?.feudal()?;
            Ok(Outcome::ok(hom_datum_to_json(&gamma(&l)?)))
        }
        FeudalCmd::Enumerate { max_order } => {
            let e = enumerate_feudal(max_order)?;
            let rules: Vec<_> = e.rules.iter().map(|r| r.summary()).collect();
            Ok(Outcome::ok(json!({
                "max_order": max_order,
                "count": rules.len(),
                "rules": rules,
                "warnings": e.warnings,
            })))
        }
    }
}

fn load_system(path: &Path) -> Result<(LoadedRule, fusionkit::fsys::FusionSystem)> {
    let text = read_file(path)?;
    parse_system(&text, path.parent()).with_context(|| format!("in {}", path.display()))
}

fn coeffs_only(f: &fusionkit::fsys::FusionSystem) -> Value {
    system_to_json(f, None)["coeffs"].clone()
}

fn run_fsys(cmd: FsysCmd) -> Result<Outcome> {
    match cmd {
        FsysCmd::Verify { system } => Ok(axioms(&load_system(&system)?.1.verify())),
        FsysCmd::GaugeApply { system, gauge } => {
            let (loaded, f) = load_system(&system)?;
            let xi = parse_gauge(&read_file(&gauge)?, f.support(), f.field())
                .with_context(|| format!("in {}", gauge.display()))?;
            let g = f.apply_gauge(&xi)?;
            Ok(Outcome::ok(system_to_json(&g, loaded.serfs.as_deref())))
        }
        FsysCmd::Enumerate {
            target,
            budget_bits,
        } => {
            if !(budget_bits > 0.0) {
                bail!(Error::Invalid("--budget-bits must be positive".into()));
            }
            let loaded = load_rule(&target.rule)?;
            let support = Support::new(&loaded.rule)?;
            let report = enumerate_bruteforce(support, field(target.p)?, budget_bits)?;
            let mut v = serde_json::to_value(&report)?;
            v["classes"] = report.classes.iter().map(coeffs_only).collect();
            v["class_count"] = json!(report.class_count());
            Ok(Outcome::ok(v))
        }
    }
}

fn uber_key(u: &fusionkit::uber::Uberderivation) -> Value {
    let am = &*u.ambi;
    let rule = am.feudal().rule();
    let mut key = BTreeMap::new();
    for a in 0..am.serf_count() {
        if a == am.unit() {
            continue;
        }
        let l = rule.label(am.serf_id(a));
        let vals: Vec<u32> = (0..am.lord_count())
            .map(|m| u.chi.get(a, a, m).value())
            .collect();
        key.insert(format!("chi({l},{l})"), json!(vals));
    }
    key.insert(
        "tau".into(),
        json!(u.tau.iter().map(|v| v.value()).collect::<Vec<_>>()),
    );
    json!(key)
}

fn strip_rule(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("rule");
        o.remove("p");
    }
    v
}

fn run_uber(cmd: UberCmd) -> Result<Outcome> {
    match cmd {
        UberCmd::Psi { system } => {
            let (loaded, f) = load_system(&system)?;
            let ambi = Ambi::new(&loaded.feudal()?)?;
            let was_normal = is_normal(&ambi, &f)?;
            let n = if was_normal {
                f
            } else {
                normalize(&ambi, &f)?.0
            };
            let u = psi(&ambi, &n)?;
            let mut v = uber_to_json(&u);
            v["input_was_normal"] = json!(was_normal);
            v["valid"] = json!(u.is_valid());
            Ok(Outcome {
                ok: u.is_valid(),
                report: v,
            })
        }
        UberCmd::Reconstruct { uber, rule, p } => {
            let rule = rule.map(|r| load_rule(&r)).transpose()?;
            let u = parse_uber(&read_file(&uber)?, uber.parent(), rule, p)
                .with_context(|| format!("in {}", uber.display()))?;
            let f = reconstruct(&u)?;
            let serfs = u.ambi.feudal().serfs().to_vec();
            let ok = f.verify().passed();
            Ok(Outcome {
                report: system_to_json(&f, Some(&serfs)),
                ok,
            })
        }
        UberCmd::Classify { target } => {
            let feudal = load_rule(&target.rule)?.feudal()?;
            let ambi = Ambi::new(&feudal)?;
            let c = enumerate_uber(&ambi, &field(target.p)?)?;
            let classes: Vec<Value> = c
                .classes
                .iter()
                .map(|cl| {
                    json!({
                        "key": uber_key(&cl.representative),
                        "gauge_classes": cl.members,
                        "representative": strip_rule(uber_to_json(&cl.representative)),
                    })
                })
                .collect();
            Ok(Outcome::ok(json!({
                "p": c.p,
                "obstructions": c.obstructions,
                "lattice_classes": c.lattice_classes.to_string(),
                "gauge_class_count": c.gauge_classes.len(),
                "class_count": c.classes.len(),
                "graded_automorphisms": c.graded_automorphisms,
                "all_automorphisms_graded": c.all_automorphisms_graded,
                "classes": classes,
            })))
        }
        UberCmd::Obstructions { target } => {
            let feudal = load_rule(&target.rule)?.feudal()?;
            let r = check_existence_obstructions(&feudal, &*field(target.p)?)?;
            Ok(Outcome::ok(serde_json::to_value(r)?))
        }
    }
}

fn run_cohom(cmd: CohomCmd) -> Result<Outcome> {
    match cmd {
        CohomCmd::H3 { group, p, via_uber } => {
            let g = by_name(&group)?;
            let k = field(p)?;
            let mut v = serde_json::to_value(h3(&g, &k)?)?;
            let mut ok = true;
            if let Some(spec) = via_uber {
                let gens = spec
                    .split(',')
                    .map(|l| {
                        g.index_of(l.trim()).ok_or_else(|| {
                            Error::Invalid(format!("unknown element {l:?} of {group}"))
                        })
                    })
                    .collect::<fusionkit::Result<Vec<_>>>()?;
                let r = h3_via_uber(&g, &g.generated(&gens), &k)?;
                ok = r.agrees;
                v["via_uber"] = serde_json::to_value(r)?;
            }
            Ok(Outcome { report: v, ok })
        }
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if x.is_object()
                    || (x.is_array()
                        && x.as_array()
                            .is_some_and(|a| a.iter().any(|e| e.is_object())))
                {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                render_text(x, indent + 1, out);
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        x => x.to_string(),
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(s) = std::env::var("FUSIONKIT_THREADS") {
        let n: usize = s.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Invalid(format!(
                "FUSIONKIT_THREADS must be a positive integer, got {s:?}"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Resource(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Rule(c) => run_rule(c),
        Command::Feudal(c) => run_feudal(c),
        Command::Fsys(c) => run_fsys(c),
        Command::Uber(c) => run_uber(c),
        Command::Cohom(c) => run_cohom(c),
    });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outcome.report).expect("json") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(&outcome.report, 0, &mut s);
            s
        }
    };
    let written = match &cli.out {
        Some(path) => {
            std::fs::write(path, &body).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
