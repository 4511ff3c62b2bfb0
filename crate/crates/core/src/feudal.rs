//! Feudal rules, homomorphism data and the two constructions between them.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::group::{self, FiniteGroup};
use crate::multimagma::{FusionRule, Multiset};
use crate::report::{AxiomCheck, AxiomReport};

/// A fusion rule with a Z2-grading whose degree-1 part (the serfs) is a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeudalRule {
    rule: FusionRule,
    serfs: Vec<usize>,
    lords: Vec<usize>,
}

impl FeudalRule {
    /// Checks the grading, that the serfs form a group, and the structural
    /// facts every feudal rule satisfies.
    pub fn new(rule: FusionRule, serfs: &[usize]) -> Result<Self> {
        let n = rule.len();
        let mut serfs = serfs.to_vec();
        serfs.sort_unstable();
        serfs.dedup();
        if serfs.iter().any(|&x| x >= n) {
            return invalid("serf id out of range");
        }
        let is_serf: Vec<bool> = (0..n).map(|x| serfs.binary_search(&x).is_ok()).collect();
        let lords: Vec<usize> = (0..n).filter(|&x| !is_serf[x]).collect();
        if lords.is_empty() {
            return invalid("a feudal grading needs at least one lord");
        }
        for x in 0..n {
            for y in 0..n {
                let want = is_serf[x] == is_serf[y];
                if rule.fuse(x, y).support().any(|z| is_serf[z] != want) {
                    return invalid(format!(
                        "{} * {} violates the Z2-grading",
                        rule.label(x),
                        rule.label(y)
                    ));
                }
                if is_serf[x] && is_serf[y] && rule.fuse(x, y).single().is_none() {
                    return invalid("serfs do not form a group");
                }
            }
        }
        let feudal = FeudalRule { rule, serfs, lords };
        let report = feudal.structure_report();
        if !report.passed() {
            return invalid(format!(
                "feudal structure fails: {}",
                report.failed_axioms().join(", ")
            ));
        }
        Ok(feudal)
    }

    pub fn rule(&self) -> &FusionRule {
        &self.rule
    }

    pub fn serfs(&self) -> &[usize] {
        &self.serfs
    }

    pub fn lords(&self) -> &[usize] {
        &self.lords
    }

    pub fn is_serf(&self, x: usize) -> bool {
        self.serfs.binary_search(&x).is_ok()
    }

    /// Degree of `x` in Z2 written multiplicatively: `1` for serfs, `-1` for lords.
    pub fn grading(&self, x: usize) -> i8 {
        if self.is_serf(x) {
            1
        } else {
            -1
        }
    }

    /// The serfs as an abstract group (labels from the rule).
    pub fn serf_group(&self) -> FiniteGroup {
        let k = self.serfs.len();
        let labels = self
            .serfs
            .iter()
            .map(|&s| self.rule.label(s).to_string())
            .collect();
        let pos = |x: usize| self.serfs.binary_search(&x).expect("serfs are closed");
        FiniteGroup::from_fn("S", labels, |a, b| {
            pos(self
                .rule
                .fuse(self.serfs[a], self.serfs[b])
                .single()
                .expect("serf product"))
        })
        .unwrap_or_else(|_| unreachable!("serfs of size {k} form a group"))
    }

    /// Serfs acting trivially on every lord from both sides.
    pub fn stabilizer(&self) -> Vec<usize> {
        self.serfs
            .iter()
            .copied()
            .filter(|&a| {
                self.lords.iter().all(|&m| {
                    self.rule.fuse(a, m).single() == Some(m)
                        && self.rule.fuse(m, a).single() == Some(m)
                })
            })
            .collect()
    }

    /// Multiplicity-freeness, transitive serf actions, lords fusing to
    /// cosets of the adjoint subrule, and the three descriptions of a
    /// lord product.
    pub fn structure_report(&self) -> AxiomReport {
        let r = &self.rule;
        let mut mf = AxiomCheck::new("multiplicity-free");
        for x in 0..r.len() {
            for y in 0..r.len() {
                mf.record(r.fuse(x, y).is_set(), || vec![x, y]);
            }
        }
        let mut transitive = AxiomCheck::new("transitive-actions");
        let m0 = self.lords[0];
        let left: BTreeSet<usize> = self
            .serfs
            .iter()
            .flat_map(|&a| r.fuse(a, m0).support().collect::<Vec<_>>())
            .collect();
        let right: BTreeSet<usize> = self
            .serfs
            .iter()
            .flat_map(|&a| r.fuse(m0, a).support().collect::<Vec<_>>())
            .collect();
        let all: BTreeSet<usize> = self.lords.iter().copied().collect();
        transitive.record(left == all, || vec![m0]);
        transitive.record(right == all, || vec![m0]);

        let ad = r.adjoint_subrule();
        let mut cosets = AxiomCheck::new("lord-products-are-adjoint-cosets");
        let mut three = AxiomCheck::new("lord-product-descriptions");
        for &m in &self.lords {
            for &l in &self.lords {
                let ml: Vec<usize> = r.fuse(m, l).support().collect();
                let is_coset = ml.first().is_some_and(|&a| {
                    let coset: Vec<usize> = r
                        .fuse_multisets(
                            &Multiset::singleton(a),
                            &Multiset::from_set(ad.members().iter().copied()),
                        )
                        .support()
                        .collect();
                    coset == ml
                });
                cosets.record(is_coset, || vec![m, l]);
                let mbar = r.dual(m);
                let lbar = r.dual(l);
                let by_left: Vec<usize> = self
                    .serfs
                    .iter()
                    .copied()
                    .filter(|&a| r.fuse(mbar, a).single() == Some(l))
                    .collect();
                let by_right: Vec<usize> = self
                    .serfs
                    .iter()
                    .copied()
                    .filter(|&a| r.fuse(a, lbar).single() == Some(m))
                    .collect();
                three.record(ml == by_left && ml == by_right, || vec![m, l]);
            }
        }
        AxiomReport {
            checks: vec![mf, transitive, cosets, three],
        }
    }

    /// Graded isomorphism onto `other` (serfs to serfs), if one exists.
    pub fn graded_isomorphism(&self, other: &FeudalRule) -> Option<Vec<usize>> {
        if self.serfs.len() != other.serfs.len() || self.lords.len() != other.lords.len() {
            return None;
        }
        self.rule
            .isomorphism_to(&other.rule, |x, y| self.is_serf(x) == other.is_serf(y))
    }

    /// Automorphisms of the rule that preserve the grading.
    pub fn graded_automorphisms(&self) -> Vec<Vec<usize>> {
        self.rule
            .isomorphisms_to(&self.rule, |x, y| self.is_serf(x) == self.is_serf(y))
    }

    /// Nilpotent with simple current index 2.
    pub fn is_properly_feudal(&self) -> bool {
        is_properly_feudal(&self.rule)
    }
}

pub fn is_properly_feudal(rule: &FusionRule) -> bool {
    rule.is_nilpotent() && rule.simple_current_index().ok() == Some(2)
}

/// Every degree-1 part of a Z2-grading of `rule` that is a group, found by
/// searching all surjective homomorphisms onto Z2.
pub fn feudal_gradings(rule: &FusionRule) -> Vec<Vec<usize>> {
    if !rule.is_multiplicity_free() {
        return Vec::new();
    }
    let z2 = group::cyclic(2).to_fusion_rule();
    let mut out = BTreeSet::new();
    for h in rule.homomorphisms(&z2) {
        if !h.iter().any(|&g| g != z2.unit()) {
            continue;
        }
        // Gradings must respect products exactly: xy lies in degree h(x)h(y).
        let exact = (0..rule.len()).all(|x| {
            (0..rule.len()).all(|y| {
                let d = z2.fuse(h[x], h[y]).single().expect("group");
                rule.fuse(x, y).support().all(|z| h[z] == d)
            })
        });
        if !exact {
            continue;
        }
        let serfs: Vec<usize> = (0..rule.len()).filter(|&x| h[x] == z2.unit()).collect();
        let group_like = serfs
            .iter()
            .all(|&a| serfs.iter().all(|&b| rule.fuse(a, b).single().is_some()));
        if group_like {
            out.insert(serfs);
        }
    }
    out.into_iter().collect()
}

/// Outcome of [`detect_feudal`].
#[derive(Clone, Debug)]
pub struct Detection {
    pub feudal: FeudalRule,
    pub properly_feudal: bool,
    /// Number of feudal gradings of the rule.
    pub gradings: usize,
}

impl Detection {
    pub fn unique(&self) -> bool {
        self.gradings == 1
    }
}

/// Finds a feudal structure. For properly feudal rules the serfs are the
/// simple currents and the structure is unique; otherwise the first grading
/// found is returned together with the number of alternatives.
pub fn detect_feudal(rule: &FusionRule) -> Option<Detection> {
    let gradings = feudal_gradings(rule);
    if gradings.is_empty() {
        return None;
    }
    let proper = is_properly_feudal(rule);
    let serfs = if proper {
        let (sc, _) = rule.simple_currents().ok()?;
        let serfs = sc.members().to_vec();
        if !gradings.contains(&serfs) {
            return None;
        }
        serfs
    } else {
        gradings[0].clone()
    };
    let feudal = FeudalRule::new(rule.clone(), &serfs).ok()?;
    Some(Detection {
        feudal,
        properly_feudal: proper,
        gradings: gradings.len(),
    })
}

/// A homomorphism `u: S -> G` whose image has index 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomDatum {
    source: FiniteGroup,
    target: FiniteGroup,
    map: Vec<usize>,
}

impl HomDatum {
    pub fn new(source: FiniteGroup, target: FiniteGroup, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() || map.iter().any(|&g| g >= target.order()) {
            return invalid("homomorphism map must be total into the target");
        }
        for a in 0..source.order() {
            for b in 0..source.order() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return invalid(format!(
                        "map is not a homomorphism at ({}, {})",
                        source.label(a),
                        source.label(b)
                    ));
                }
            }
        }
        let image: BTreeSet<usize> = map.iter().copied().collect();
        if image.len() * 2 != target.order() {
            return invalid(format!(
                "cokernel has order {}/{}, expected 2",
                target.order(),
                image.len()
            ));
        }
        Ok(HomDatum {
            source,
            target,
            map,
        })
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.map.iter().copied().collect();
        set.into_iter().collect()
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.source.order())
            .filter(|&a| self.map[a] == self.target.unit())
            .collect()
    }

    /// `G` minus the image, in target order.
    pub fn lords(&self) -> Vec<usize> {
        let image = self.image();
        (0..self.target.order())
            .filter(|g| image.binary_search(g).is_err())
            .collect()
    }

    /// Size of the rule built by [`phi`].
    pub fn rule_size(&self) -> usize {
        self.source.order() + self.target.order() / 2
    }

    /// An isomorphism pair `(h0, h1)` with `h1 u = u' h0`, if any. Lords are
    /// then preserved automatically since `h1` maps image onto image.
    pub fn isomorphism(&self, other: &HomDatum) -> Option<(Vec<usize>, Vec<usize>)> {
        if self.source.order() != other.source.order()
            || self.target.order() != other.target.order()
        {
            return None;
        }
        let h0s = self.source.isomorphisms_to(&other.source);
        if h0s.is_empty() {
            return None;
        }
        let h1s = self.target.isomorphisms_to(&other.target);
        for h0 in &h0s {
            for h1 in &h1s {
                let commutes =
                    (0..self.source.order()).all(|a| h1[self.map[a]] == other.map[h0[a]]);
                if commutes {
                    return Some((h0.clone(), h1.clone()));
                }
            }
        }
        None
    }
}

/// Label prefix distinguishing lords from serfs in [`phi`].
pub const LORD_PREFIX: &str = "*";

/// The feudal rule with serfs `S`, lords `G \ im u` and
/// `a*b = ab`, `a*m = u(a)m`, `m*a = m u(a)`, `m*l = u^{-1}(ml)`.
pub fn phi(h: &HomDatum) -> FeudalRule {
    let s = &h.source;
    let g = &h.target;
    let ns = s.order();
    let lords = h.lords();
    let nl = lords.len();
    let n = ns + nl;
    let lord_pos = |x: usize| ns + lords.binary_search(&x).expect("lord");
    let mut labels: Vec<String> = s.labels().to_vec();
    labels.extend(
        lords
            .iter()
            .map(|&m| format!("{LORD_PREFIX}{}", g.label(m))),
    );
    let mut preimage: Vec<Vec<usize>> = vec![Vec::new(); g.order()];
    for a in 0..ns {
        preimage[h.map[a]].push(a);
    }
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let cell = match (x < ns, y < ns) {
                (true, true) => Multiset::singleton(s.mul(x, y)),
                (true, false) => Multiset::singleton(lord_pos(g.mul(h.map[x], lords[y - ns]))),
                (false, true) => Multiset::singleton(lord_pos(g.mul(lords[x - ns], h.map[y]))),
                (false, false) => Multiset::from_set(
                    preimage[g.mul(lords[x - ns], lords[y - ns])]
                        .iter()
                        .copied(),
                ),
            };
            table.push(cell);
        }
    }
    let mut dual: Vec<usize> = (0..ns).map(|a| s.inv(a)).collect();
    dual.extend(lords.iter().map(|&m| lord_pos(g.inv(m))));
    let rule =
        FusionRule::new(labels, table, s.unit(), dual).expect("phi produces a well-formed table");
    FeudalRule::new(rule, &(0..ns).collect::<Vec<_>>()).expect("phi produces a feudal rule")
}

/// `(S, universal grading group, restricted projection)`.
pub fn gamma(l: &FeudalRule) -> Result<HomDatum> {
    let grading = l.rule.universal_grading()?;
    let target = FiniteGroup::new(
        "U",
        grading.group_labels.clone(),
        grading.group_table.clone(),
    )?;
    let source = l.serf_group();
    let map = l.serfs.iter().map(|&a| grading.projection[a]).collect();
    HomDatum::new(source, target, map)
}

/// `Γ(Φ(H)) ≅ H` as homomorphism data.
pub fn round_trip_hom(h: &HomDatum) -> bool {
    gamma(&phi(h)).is_ok_and(|h2| h2.isomorphism(h).is_some())
}

/// `Φ(Γ(L)) ≅ L` as graded rules.
pub fn round_trip_rule(l: &FeudalRule) -> bool {
    gamma(l).is_ok_and(|h| phi(&h).graded_isomorphism(l).is_some())
}

/// Tambara-Yamagami rule: serfs `A` plus one lord `m` with `m*m = A`.
pub fn tambara_yamagami(a: &FiniteGroup) -> FeudalRule {
    let na = a.order();
    let n = na + 1;
    let m = na;
    let mut labels = a.labels().to_vec();
    labels.push("m".into());
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            table.push(match (x == m, y == m) {
                (false, false) => Multiset::singleton(a.mul(x, y)),
                (true, true) => Multiset::from_set(0..na),
                _ => Multiset::singleton(m),
            });
        }
    }
    let mut dual: Vec<usize> = (0..na).map(|x| a.inv(x)).collect();
    dual.push(m);
    let rule = FusionRule::new(labels, table, a.unit(), dual).expect("TY table");
    FeudalRule::new(rule, &(0..na).collect::<Vec<_>>()).expect("TY is feudal")
}

/// Fermionic Moore-Read rule on `1, -1, i, -i, i', -i'`.
pub fn moore_read() -> FeudalRule {
    // Serf i^k has id pos[k]; lord (i^k)' for k odd.
    let labels: Vec<String> = ["1", "-1", "i", "-i", "i'", "-i'"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let serf_id = |k: usize| [0, 2, 1, 3][k % 4];
    let serf_exp = |id: usize| [0, 2, 1, 3][id];
    let lord_id = |k: usize| if k % 4 == 1 { 4 } else { 5 };
    let lord_exp = |id: usize| if id == 4 { 1 } else { 3 };
    let mut table = Vec::new();
    for x in 0..6 {
        for y in 0..6 {
            table.push(match (x < 4, y < 4) {
                (true, true) => Multiset::singleton(serf_id(serf_exp(x) + serf_exp(y))),
                (true, false) => Multiset::singleton(lord_id(2 * serf_exp(x) + lord_exp(y))),
                (false, true) => Multiset::singleton(lord_id(2 * serf_exp(y) + lord_exp(x))),
                (false, false) => {
                    let s = lord_exp(x) + lord_exp(y);
                    Multiset::from_set((0..4).filter(|&k| (2 * k) % 4 == s % 4).map(serf_id))
                }
            });
        }
    }
    let dual = vec![0, 1, 3, 2, 5, 4];
    let rule = FusionRule::new(labels, table, 0, dual).expect("MR table");
    FeudalRule::new(rule, &[0, 1, 2, 3]).expect("MR is feudal")
}

/// The group `G` graded by an index-2 subgroup `S`.
pub fn graded_group(g: &FiniteGroup, serfs: &[usize]) -> Result<FeudalRule> {
    if serfs.len() * 2 != g.order() || g.generated(serfs).len() != serfs.len() {
        return Err(Error::Domain("serfs must form an index-2 subgroup".into()));
    }
    FeudalRule::new(g.to_fusion_rule(), serfs)
}

/// One enumerated properly feudal rule with the datum it came from.
#[derive(Clone, Debug)]
pub struct EnumeratedFeudal {
    pub datum: HomDatum,
    pub rule: FeudalRule,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationSummary {
    pub source: String,
    pub target: String,
    pub map: Vec<String>,
    pub size: usize,
    pub serfs: usize,
    pub lords: usize,
    pub kernel: usize,
}

#[derive(Clone, Debug, Default)]
pub struct FeudalEnumeration {
    pub rules: Vec<EnumeratedFeudal>,
    pub warnings: Vec<String>,
}

impl EnumeratedFeudal {
    pub fn summary(&self) -> EnumerationSummary {
        let d = &self.datum;
        EnumerationSummary {
            source: d.source.name().to_string(),
            target: d.target.name().to_string(),
            map: d
                .map
                .iter()
                .map(|&g| d.target.label(g).to_string())
                .collect(),
            size: d.rule_size(),
            serfs: d.source.order(),
            lords: d.target.order() / 2,
            kernel: d.kernel().len(),
        }
    }
}

/// Maximum rule size accepted by [`enumerate_feudal`].
pub const MAX_ENUMERATION_ORDER: usize = 16;

/// Every properly feudal rule with at most `max_order` elements, as `Φ` of
/// homomorphisms with order-2 cokernel and nontrivial kernel, one per
/// isomorphism class.
pub fn enumerate_feudal(max_order: usize) -> Result<FeudalEnumeration> {
    if max_order > MAX_ENUMERATION_ORDER {
        return Err(Error::Resource(format!(
            "feudal enumeration is limited to {MAX_ENUMERATION_ORDER} elements"
        )));
    }
    let mut out = FeudalEnumeration::default();
    // |S| > |G|/2 and |S| + |G|/2 <= max_order.
    let mut pairs = Vec::new();
    for half in 1..max_order {
        let g_order = 2 * half;
        for s_order in half + 1..=max_order.saturating_sub(half) {
            for n in [g_order, s_order] {
                if !group::catalog_complete(n) {
                    let w = format!("catalog incomplete for order {n}");
                    if !out.warnings.contains(&w) {
                        out.warnings.push(w);
                    }
                }
            }
            for s in group::groups_of_order(s_order) {
                for g in group::groups_of_order(g_order) {
                    pairs.push((s.clone(), g));
                }
            }
        }
    }
    let found: Vec<Vec<EnumeratedFeudal>> = pairs
        .into_par_iter()
        .map(|(s, g)| data_up_to_isomorphism(&s, &g))
        .collect();
    for batch in found {
        out.rules.extend(batch);
    }
    out.rules.sort_by_key(|e| {
        (
            e.datum.rule_size(),
            e.datum.source.order(),
            e.datum.target.order(),
            e.datum.source.name().to_string(),
            e.datum.target.name().to_string(),
            e.datum.map.clone(),
        )
    });
    Ok(out)
}

// Orbit representatives of Hom(S, G) (index-2 image, nontrivial kernel)
// under Aut(S) x Aut(G).
fn data_up_to_isomorphism(s: &FiniteGroup, g: &FiniteGroup) -> Vec<EnumeratedFeudal> {
    let homs: Vec<Vec<usize>> = s
        .homomorphisms_to(g)
        .into_iter()
        .filter(|u| {
            let image: BTreeSet<usize> = u.iter().copied().collect();
            image.len() * 2 == g.order() && image.len() < s.order()
        })
        .collect();
    if homs.is_empty() {
        return Vec::new();
    }
    let aut_s = s.automorphisms();
    let aut_g = g.automorphisms();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for u in homs {
        if seen.contains(&u) {
            continue;
        }
        for h0 in &aut_s {
            let mut h0_inv = vec![0; s.order()];
            for (a, &b) in h0.iter().enumerate() {
                h0_inv[b] = a;
            }
            for h1 in &aut_g {
                let v: Vec<usize> = (0..s.order()).map(|a| h1[u[h0_inv[a]]]).collect();
                seen.insert(v);
            }
        }
        let datum = HomDatum::new(s.clone(), g.clone(), u).expect("filtered homomorphism");
        let rule = phi(&datum);
        out.push(EnumeratedFeudal { datum, rule });
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GradingSummary {
    pub order: usize,
    /// Catalog name of the grading group, when it is in the catalog.
    pub group: Option<String>,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeudalSummary {
    pub serfs: Vec<String>,
    pub lords: Vec<String>,
    pub properly_feudal: bool,
    pub gradings: usize,
}

/// Structural invariants of a fusion rule.
#[derive(Clone, Debug, Serialize)]
pub struct RuleAnalysis {
    pub size: usize,
    pub axioms_hold: bool,
    pub multiplicity_free: bool,
    pub is_group: bool,
    pub nilpotency_class: Option<usize>,
    pub simple_currents: Vec<String>,
    pub simple_current_index: Option<usize>,
    pub adjoint_subrule: Vec<String>,
    pub universal_grading: Option<GradingSummary>,
    pub feudal: Option<FeudalSummary>,
}

pub fn analyze_rule(rule: &FusionRule) -> RuleAnalysis {
    let names = |xs: &[usize]| {
        xs.iter()
            .map(|&x| rule.label(x).to_string())
            .collect::<Vec<_>>()
    };
    let sc = rule.simple_currents().ok();
    let grading = rule.universal_grading().ok().map(|g| {
        let n = g.order();
        let group = FiniteGroup::new("grading", g.group_labels.clone(), g.group_table.clone())
            .ok()
            .and_then(|q| {
                group::groups_of_order(n)
                    .into_iter()
                    .find(|c| !c.isomorphisms_to(&q).is_empty())
                    .map(|c| c.name().to_string())
            });
        GradingSummary {
            order: n,
            group,
            elements: g.group_labels,
        }
    });
    let feudal = detect_feudal(rule).map(|d| FeudalSummary {
        serfs: names(d.feudal.serfs()),
        lords: names(d.feudal.lords()),
        properly_feudal: d.properly_feudal,
        gradings: d.gradings,
    });
    RuleAnalysis {
        size: rule.len(),
        axioms_hold: rule.verify().passed(),
        multiplicity_free: rule.is_multiplicity_free(),
        is_group: rule.is_group(),
        nilpotency_class: rule.nilpotency_class(),
        simple_currents: sc
            .as_ref()
            .map_or_else(Vec::new, |(s, _)| names(s.members())),
        simple_current_index: sc.map(|(_, i)| i),
        adjoint_subrule: names(rule.adjoint_subrule().members()),
        universal_grading: grading,
        feudal,
    }
}
