//! JSON formats for rules, groups, homomorphism data, fusion systems,
//! gauges and überderivations.
//!
//! Syntax errors carry a line and column. Semantic errors name the offending
//! key.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};
use crate::feudal::{detect_feudal, FeudalRule, HomDatum};
use crate::fsys::{FusionSystem, GaugeXi, Support};
use crate::group::{by_name, FiniteGroup};
use crate::multimagma::{FusionRule, Multiset};
use crate::scalars::{Field, Fp};
use crate::uber::{Ambi, PairTable, Uberderivation};

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    })
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

// Splits on commas outside parentheses, so product labels like `(0,1)`
// survive.
fn split_key(key: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in key.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(key[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(key[start..].trim());
    parts
}

fn labels_of<'a>(key: &'a str, n: usize, what: &str) -> Result<Vec<&'a str>> {
    let parts = split_key(key);
    if parts.len() != n {
        return invalid(format!(
            "{what} key {key:?} needs {n} comma-separated labels"
        ));
    }
    Ok(parts)
}

fn join(labels: &[&str]) -> String {
    labels.join(",")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleJson {
    pub labels: Vec<String>,
    pub unit: String,
    #[serde(default)]
    pub dual: BTreeMap<String, String>,
    #[serde(default)]
    pub table: BTreeMap<String, BTreeMap<String, u32>>,
    /// Optional feudal structure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub serfs: Option<Vec<String>>,
}

/// A rule together with the serfs named in its file, if any.
#[derive(Clone, Debug)]
pub struct LoadedRule {
    pub rule: FusionRule,
    pub serfs: Option<Vec<usize>>,
}

impl LoadedRule {
    /// The declared feudal structure, or the detected one.
    pub fn feudal(&self) -> Result<FeudalRule> {
        match &self.serfs {
            Some(s) => FeudalRule::new(self.rule.clone(), s),
            None => detect_feudal(&self.rule)
                .map(|d| d.feudal)
                .ok_or_else(|| Error::Domain("the rule has no feudal grading".into())),
        }
    }
}

impl RuleJson {
    pub fn into_rule(self) -> Result<LoadedRule> {
        let n = self.labels.len();
        if let Some(bad) = self
            .labels
            .iter()
            .find(|l| split_key(l).len() != 1 || l.trim() != l.as_str())
        {
            return invalid(format!(
                "label {bad:?} may not contain top-level commas or surrounding spaces"
            ));
        }
        let idx: HashMap<&str, usize> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let look = |l: &str, ctx: &str| {
            idx.get(l)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("unknown label {l:?} in {ctx}")))
        };
        let unit = look(&self.unit, "unit")?;
        let mut dual: Vec<Option<usize>> = vec![None; n];
        for (x, y) in &self.dual {
            dual[look(x, "dual")?] = Some(look(y, "dual")?);
        }
        dual[unit].get_or_insert(unit);
        let dual: Vec<usize> = dual
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| Error::Invalid(format!("dual of {:?} is missing", self.labels[i])))
            })
            .collect::<Result<_>>()?;
        let mut table = vec![Multiset::empty(); n * n];
        for (key, cell) in &self.table {
            let ctx = format!("table key {key:?}");
            let xy = labels_of(key, 2, "table")?;
            let (x, y) = (look(xy[0], &ctx)?, look(xy[1], &ctx)?);
            let mut m = Multiset::empty();
            for (z, &c) in cell {
                if c > 0 {
                    m.add(look(z, &ctx)?, c);
                }
            }
            table[x * n + y] = m;
        }
        let rule = FusionRule::new(self.labels.clone(), table, unit, dual)?;
        let serfs = match &self.serfs {
            Some(s) => Some(
                s.iter()
                    .map(|l| look(l, "serfs"))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Ok(LoadedRule { rule, serfs })
    }

    pub fn from_rule(rule: &FusionRule, serfs: Option<&[usize]>) -> Self {
        let l = |x: usize| rule.label(x).to_string();
        let n = rule.len();
        let mut table = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                let cell = rule.fuse(x, y);
                if !cell.is_empty() {
                    let m = cell.entries().iter().map(|&(z, c)| (l(z), c)).collect();
                    table.insert(join(&[rule.label(x), rule.label(y)]), m);
                }
            }
        }
        RuleJson {
            labels: rule.labels().to_vec(),
            unit: l(rule.unit()),
            dual: (0..n).map(|x| (l(x), l(rule.dual(x)))).collect(),
            table,
            serfs: serfs.map(|s| s.iter().map(|&x| l(x)).collect()),
        }
    }
}

pub fn parse_rule(text: &str) -> Result<LoadedRule> {
    parse_json::<RuleJson>(text)?.into_rule()
}

pub fn rule_to_json(rule: &FusionRule, serfs: Option<&[usize]>) -> Value {
    serde_json::to_value(RuleJson::from_rule(rule, serfs)).expect("rule serializes")
}

/// A group given inline, or by catalog name such as `"Z4"` or `"S3"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupJson {
    Name(String),
    Table {
        labels: Vec<String>,
        table: BTreeMap<String, String>,
        #[serde(default)]
        name: Option<String>,
    },
}

impl GroupJson {
    pub fn into_group(self) -> Result<FiniteGroup> {
        match self {
            GroupJson::Name(n) => by_name(&n),
            GroupJson::Table {
                labels,
                table,
                name,
            } => {
                let n = labels.len();
                let idx: HashMap<&str, usize> = labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.as_str(), i))
                    .collect();
                let look = |l: &str| {
                    idx.get(l)
                        .copied()
                        .ok_or_else(|| Error::Invalid(format!("unknown group label {l:?}")))
                };
                let mut cells = vec![None; n * n];
                for (key, v) in &table {
                    let ab = labels_of(key, 2, "group table")?;
                    cells[look(ab[0])? * n + look(ab[1])?] = Some(look(v)?);
                }
                let cells: Vec<usize> = cells
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| {
                        c.ok_or_else(|| {
                            Error::Invalid(format!(
                                "group table misses {:?}",
                                join(&[&labels[i / n], &labels[i % n]])
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                FiniteGroup::new(name.unwrap_or_else(|| "G".into()), labels, cells)
            }
        }
    }

    pub fn from_group(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut table = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                table.insert(
                    join(&[g.label(a), g.label(b)]),
                    g.label(g.mul(a, b)).to_string(),
                );
            }
        }
        GroupJson::Table {
            labels: g.labels().to_vec(),
            table,
            name: Some(g.name().to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDatumJson {
    pub source: GroupJson,
    pub target: GroupJson,
    pub map: BTreeMap<String, String>,
}

pub fn parse_hom_datum(text: &str) -> Result<HomDatum> {
    let raw: HomDatumJson = parse_json(text)?;
    let source = raw.source.into_group()?;
    let target = raw.target.into_group()?;
    let mut map = vec![None; source.order()];
    for (a, b) in &raw.map {
        let i = source
            .index_of(a)
            .ok_or_else(|| Error::Invalid(format!("unknown source label {a:?} in map")))?;
        let j = target
            .index_of(b)
            .ok_or_else(|| Error::Invalid(format!("unknown target label {b:?} in map")))?;
        map[i] = Some(j);
    }
    let map: Vec<usize> = map
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| Error::Invalid(format!("map misses {:?}", source.label(i)))))
        .collect::<Result<_>>()?;
    HomDatum::new(source, target, map)
}

pub fn hom_datum_to_json(h: &HomDatum) -> Value {
    let raw = HomDatumJson {
        source: GroupJson::from_group(h.source()),
        target: GroupJson::from_group(h.target()),
        map: (0..h.source().order())
            .map(|a| {
                (
                    h.source().label(a).to_string(),
                    h.target().label(h.map()[a]).to_string(),
                )
            })
            .collect(),
    };
    serde_json::to_value(raw).expect("datum serializes")
}

/// A rule given inline or as a path relative to the referring file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RuleRef {
    Path(String),
    Inline(RuleJson),
}

impl RuleRef {
    pub fn load(self, base: Option<&Path>) -> Result<LoadedRule> {
        match self {
            RuleRef::Inline(r) => r.into_rule(),
            RuleRef::Path(p) => {
                let path = base.map_or_else(|| Path::new(&p).to_path_buf(), |b| b.join(&p));
                parse_rule(&read_file(&path)?)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub rule: RuleRef,
    pub p: u32,
    pub coeffs: BTreeMap<String, u64>,
}

/// A fusion system; `base` resolves a rule given by path.
pub fn parse_system(text: &str, base: Option<&Path>) -> Result<(LoadedRule, FusionSystem)> {
    let raw: SystemJson = parse_json(text)?;
    let loaded = raw.rule.load(base)?;
    let field = Arc::new(Field::new(raw.p)?);
    let support = Support::new(&loaded.rule)?;
    let mut coeffs = HashMap::new();
    for (key, &v) in &raw.coeffs {
        let parts = labels_of(key, 6, "coefficient")?;
        let mut s = [0usize; 6];
        for (slot, l) in s.iter_mut().zip(&parts) {
            *slot = loaded.rule.index_of(l).ok_or_else(|| {
                Error::Invalid(format!("unknown label {l:?} in coefficient key {key:?}"))
            })?;
        }
        coeffs.insert(s, field.elem(v));
    }
    let f = FusionSystem::from_map(support, field, &coeffs)?;
    Ok((loaded, f))
}

pub fn system_to_json(f: &FusionSystem, serfs: Option<&[usize]>) -> Value {
    let rule = f.rule();
    let coeffs: BTreeMap<String, u64> = f
        .support()
        .sextuples()
        .iter()
        .zip(f.values())
        .map(|(s, v)| {
            let l: Vec<&str> = s.iter().map(|&x| rule.label(x)).collect();
            (join(&l), v.value() as u64)
        })
        .collect();
    let raw = SystemJson {
        rule: RuleRef::Inline(RuleJson::from_rule(rule, serfs)),
        p: f.field().p(),
        coeffs,
    };
    serde_json::to_value(raw).expect("system serializes")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeJson {
    /// Values on `x,y,r`; absent triples are 1.
    pub xi: BTreeMap<String, u64>,
}

pub fn parse_gauge(text: &str, support: &Arc<Support>, field: &Arc<Field>) -> Result<GaugeXi> {
    let raw: GaugeJson = parse_json(text)?;
    let rule = support.rule();
    let mut map = HashMap::new();
    for (key, &v) in &raw.xi {
        let parts = labels_of(key, 3, "gauge")?;
        let mut t = [0usize; 3];
        for (slot, l) in t.iter_mut().zip(&parts) {
            *slot = rule.index_of(l).ok_or_else(|| {
                Error::Invalid(format!("unknown label {l:?} in gauge key {key:?}"))
            })?;
        }
        map.insert(t, field.elem(v));
    }
    GaugeXi::from_map(support.clone(), field.clone(), &map)
}

pub fn gauge_to_json(xi: &GaugeXi) -> Value {
    let rule = xi.support().rule();
    let map: BTreeMap<String, u64> = xi
        .support()
        .triples()
        .iter()
        .zip(xi.values())
        .filter(|(_, v)| v.value() != 1)
        .map(|(t, v)| {
            let l: Vec<&str> = t.iter().map(|&x| rule.label(x)).collect();
            (join(&l), v.value() as u64)
        })
        .collect();
    serde_json::to_value(GaugeJson { xi: map }).expect("gauge serializes")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UberJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    /// Lord labels in the order of the per-lord arrays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lords: Option<Vec<String>>,
    pub chi: BTreeMap<String, Vec<u64>>,
    pub ups: BTreeMap<String, Vec<u64>>,
    pub tau: Vec<u64>,
}

/// Reads an überderivation. The rule and prime come from the file unless
/// supplied by the caller.
pub fn parse_uber(
    text: &str,
    base: Option<&Path>,
    rule: Option<LoadedRule>,
    p: Option<u32>,
) -> Result<Uberderivation> {
    let raw: UberJson = parse_json(text)?;
    let loaded = match (rule, raw.rule) {
        (Some(r), _) => r,
        (None, Some(r)) => r.load(base)?,
        (None, None) => return invalid("überderivation needs a rule"),
    };
    let p = p
        .or(raw.p)
        .ok_or_else(|| Error::Invalid("überderivation needs p".into()))?;
    let field = Arc::new(Field::new(p)?);
    let ambi = Ambi::new(&loaded.feudal()?)?;
    let (s, k) = (ambi.serf_count(), ambi.lord_count());
    let rule = ambi.feudal().rule();
    if let Some(lords) = &raw.lords {
        let want: Vec<&str> = (0..k).map(|m| rule.label(ambi.lord_id(m))).collect();
        if lords.iter().map(String::as_str).ne(want.iter().copied()) {
            return invalid(format!("lords must be listed as {want:?}"));
        }
    }
    let serf = |l: &str, key: &str| {
        rule.index_of(l)
            .and_then(|x| ambi.serf_pos(x))
            .ok_or_else(|| Error::Invalid(format!("{l:?} in key {key:?} is not a serf")))
    };
    let table = |name: &str, map: &BTreeMap<String, Vec<u64>>| -> Result<PairTable> {
        let mut t = PairTable::filled(s, k, field.zero());
        let mut seen = vec![false; s * s];
        for (key, vals) in map {
            let ab = labels_of(key, 2, name)?;
            let (a, b) = (serf(ab[0], key)?, serf(ab[1], key)?);
            if vals.len() != k {
                return invalid(format!("{name}[{key:?}] needs {k} per-lord values"));
            }
            for (m, &v) in vals.iter().enumerate() {
                t.set(a, b, m, field.elem(v));
            }
            seen[a * s + b] = true;
        }
        if let Some(i) = seen.iter().position(|&x| !x) {
            let (a, b) = (i / s, i % s);
            return invalid(format!(
                "{name} misses {:?}",
                join(&[rule.label(ambi.serf_id(a)), rule.label(ambi.serf_id(b))])
            ));
        }
        Ok(t)
    };
    let chi = table("chi", &raw.chi)?;
    let ups = table("ups", &raw.ups)?;
    if raw.tau.len() != k {
        return invalid(format!("tau needs {k} per-lord values"));
    }
    let tau: Vec<Fp> = raw.tau.iter().map(|&v| field.elem(v)).collect();
    Uberderivation::new(ambi, field, chi, ups, tau)
}

pub fn uber_to_json(u: &Uberderivation) -> Value {
    let am = &*u.ambi;
    let rule = am.feudal().rule();
    let (s, k) = (am.serf_count(), am.lord_count());
    let table = |t: &PairTable| -> BTreeMap<String, Vec<u64>> {
        let mut out = BTreeMap::new();
        for a in 0..s {
            for b in 0..s {
                let key = join(&[rule.label(am.serf_id(a)), rule.label(am.serf_id(b))]);
                out.insert(key, (0..k).map(|m| t.get(a, b, m).value() as u64).collect());
            }
        }
        out
    };
    let raw = UberJson {
        rule: Some(RuleRef::Inline(RuleJson::from_rule(
            rule,
            Some(am.feudal().serfs()),
        ))),
        p: Some(u.field.p()),
        lords: Some(
            (0..k)
                .map(|m| rule.label(am.lord_id(m)).to_string())
                .collect(),
        ),
        chi: table(&u.chi),
        ups: table(&u.ups),
        tau: u.tau.iter().map(|v| v.value() as u64).collect(),
    };
    serde_json::to_value(raw).expect("überderivation serializes")
}
