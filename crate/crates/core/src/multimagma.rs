//! Multisets, multimagmas and fusion rules.
//!
//! Elements of a carrier are dense ids `0..n` with a separate label table.
//! The fusion table stores one [`Multiset`] per ordered pair.

use std::collections::BTreeSet;

use crate::error::{domain, invalid, Error, Result};
use crate::report::{AxiomCheck, AxiomReport};

/// Finite multiset over element ids; entries are sorted and multiplicities
/// are strictly positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset {
    entries: Vec<(usize, u32)>,
}

impl Multiset {
    pub fn empty() -> Self {
        Multiset::default()
    }

    pub fn singleton(x: usize) -> Self {
        Multiset {
            entries: vec![(x, 1)],
        }
    }

    pub fn from_set<I: IntoIterator<Item = usize>>(items: I) -> Self {
        let set: BTreeSet<usize> = items.into_iter().collect();
        Multiset {
            entries: set.into_iter().map(|x| (x, 1)).collect(),
        }
    }

    pub fn from_counts<I: IntoIterator<Item = (usize, u32)>>(items: I) -> Self {
        let mut m = Multiset::empty();
        for (x, c) in items {
            m.add(x, c);
        }
        m
    }

    pub fn add(&mut self, x: usize, count: u32) {
        if count == 0 {
            return;
        }
        match self.entries.binary_search_by_key(&x, |e| e.0) {
            Ok(i) => self.entries[i].1 += count,
            Err(i) => self.entries.insert(i, (x, count)),
        }
    }

    pub fn count(&self, x: usize) -> u32 {
        self.entries
            .binary_search_by_key(&x, |e| e.0)
            .map_or(0, |i| self.entries[i].1)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.count(x) > 0
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    /// Underlying set, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.1 as u64).sum()
    }

    pub fn is_set(&self) -> bool {
        self.entries.iter().all(|e| e.1 == 1)
    }

    pub fn floor(&self) -> Multiset {
        Multiset::from_set(self.support())
    }

    /// The single element, when this is a singleton.
    pub fn single(&self) -> Option<usize> {
        match self.entries.as_slice() {
            [(x, 1)] => Some(*x),
            _ => None,
        }
    }
}

/// A finite fusion rule: labelled carrier, multiset-valued table, unit, duals.
///
/// Construction checks only shapes and ranges; the axioms are examined by
/// [`FusionRule::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionRule {
    labels: Vec<String>,
    table: Vec<Multiset>,
    unit: usize,
    dual: Vec<usize>,
}

/// A subset of the carrier closed under duals and fusion, containing the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subrule {
    members: Vec<usize>,
}

impl Subrule {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Left cosets `⌊xS⌋` with the induced operation `*_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetQuotient {
    /// Distinct cosets as sorted element lists, ordered by least element.
    pub cosets: Vec<Vec<usize>>,
    /// `table[i * k + j]` is `cosets[i] *_S cosets[j]` over coset indices.
    pub table: Vec<Multiset>,
}

impl CosetQuotient {
    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    /// True when the cosets are pairwise disjoint and cover `n` elements.
    pub fn partitions(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for c in &self.cosets {
            for &x in c {
                if seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn coset_of(&self, x: usize) -> Option<usize> {
        self.cosets.iter().position(|c| c.binary_search(&x).is_ok())
    }
}

/// Universal grading: the quotient by the adjoint subrule, which is a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingReport {
    /// Each group element is a coset, labelled `{a,b,...}` from the rule labels.
    pub group_labels: Vec<String>,
    pub cosets: Vec<Vec<usize>>,
    /// Element id -> group element index.
    pub projection: Vec<usize>,
    /// Row-major single-valued multiplication table.
    pub group_table: Vec<usize>,
    pub unit: usize,
}

impl GradingReport {
    pub fn order(&self) -> usize {
        self.cosets.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.group_table[g * self.order() + h]
    }
}

/// Default carrier bound for automorphism and homomorphism searches.
pub const DEFAULT_SEARCH_BOUND: usize = 10;

impl FusionRule {
    pub fn new(
        labels: Vec<String>,
        table: Vec<Multiset>,
        unit: usize,
        dual: Vec<usize>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return invalid("fusion rule carrier is empty");
        }
        if table.len() != n * n {
            return invalid(format!(
                "fusion table has {} cells, expected {}",
                table.len(),
                n * n
            ));
        }
        if unit >= n {
            return invalid("unit out of range");
        }
        if dual.len() != n || dual.iter().any(|&d| d >= n) {
            return invalid("dual map must be total on the carrier");
        }
        if table.iter().any(|m| m.support().any(|z| z >= n)) {
            return invalid("fusion table refers to an element outside the carrier");
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return invalid("labels must be distinct");
        }
        Ok(FusionRule {
            labels,
            table,
            unit,
            dual,
        })
    }

    /// Builds a rule and rejects it unless every axiom holds.
    pub fn validated(
        labels: Vec<String>,
        table: Vec<Multiset>,
        unit: usize,
        dual: Vec<usize>,
    ) -> Result<Self> {
        let rule = Self::new(labels, table, unit, dual)?;
        let report = rule.verify();
        if !report.passed() {
            return invalid(format!(
                "fusion rule axioms fail: {}",
                report.failed_axioms().join(", ")
            ));
        }
        Ok(rule)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn dual(&self, x: usize) -> usize {
        self.dual[x]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    pub fn fuse(&self, x: usize, y: usize) -> &Multiset {
        &self.table[x * self.len() + y]
    }

    pub fn table(&self) -> &[Multiset] {
        &self.table
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.table.iter().all(Multiset::is_set)
    }

    /// True when every product is a singleton.
    pub fn is_group(&self) -> bool {
        self.table.iter().all(|m| m.single().is_some())
    }

    /// `X * Y` by the convolution `<X*Y, z> = Σ <X,x><Y,y><xy,z>`.
    pub fn fuse_multisets(&self, a: &Multiset, b: &Multiset) -> Multiset {
        let mut out = Multiset::empty();
        for &(x, cx) in a.entries() {
            for &(y, cy) in b.entries() {
                for &(z, cz) in self.fuse(x, y).entries() {
                    out.add(z, cx * cy * cz);
                }
            }
        }
        out
    }

    /// Checks associativity, the unit law and duality, plus the elementary
    /// consequences (nonempty products, unique unit, involutive dual).
    pub fn verify(&self) -> AxiomReport {
        let n = self.len();
        let mut assoc = AxiomCheck::new("associativity");
        for x in 0..n {
            for y in 0..n {
                let xy = self.fuse(x, y);
                for z in 0..n {
                    let yz = self.fuse(y, z);
                    let left = self.fuse_multisets(xy, &Multiset::singleton(z));
                    let right = self.fuse_multisets(&Multiset::singleton(x), yz);
                    assoc.record(left == right, || vec![x, y, z]);
                }
            }
        }
        let mut unit = AxiomCheck::new("unit");
        for x in 0..n {
            let ok = self.fuse(self.unit, x).single() == Some(x)
                && self.fuse(x, self.unit).single() == Some(x);
            unit.record(ok, || vec![x]);
        }
        let mut duality = AxiomCheck::new("duality");
        for x in 0..n {
            for y in 0..n {
                let expect = u32::from(y == self.dual[x]);
                let ok = self.fuse(x, y).count(self.unit) == expect
                    && self.fuse(y, x).count(self.unit) == expect;
                duality.record(ok, || vec![x, y]);
            }
        }
        let mut nonempty = AxiomCheck::new("nonempty-products");
        for x in 0..n {
            for y in 0..n {
                nonempty.record(!self.fuse(x, y).is_empty(), || vec![x, y]);
            }
        }
        let mut unique_unit = AxiomCheck::new("unique-unit");
        for e in 0..n {
            if e == self.unit {
                continue;
            }
            let is_unit = (0..n).all(|x| {
                self.fuse(e, x).single() == Some(x) && self.fuse(x, e).single() == Some(x)
            });
            unique_unit.record(!is_unit, || vec![e]);
        }
        let mut involutive = AxiomCheck::new("involutive-dual");
        for x in 0..n {
            involutive.record(self.dual[self.dual[x]] == x, || vec![x]);
        }
        involutive.record(self.dual[self.unit] == self.unit, || vec![self.unit]);

        AxiomReport {
            checks: vec![assoc, unit, duality, nonempty, unique_unit, involutive],
        }
    }

    /// Least subrule containing `seed`.
    pub fn subrule_generated<I: IntoIterator<Item = usize>>(&self, seed: I) -> Subrule {
        let n = self.len();
        let mut inside = vec![false; n];
        inside[self.unit] = true;
        for x in seed {
            inside[x] = true;
        }
        loop {
            let mut grew = false;
            for x in 0..n {
                if inside[x] && !inside[self.dual[x]] {
                    inside[self.dual[x]] = true;
                    grew = true;
                }
            }
            for x in 0..n {
                for y in 0..n {
                    if inside[x] && inside[y] {
                        for z in self.fuse(x, y).support() {
                            if !inside[z] {
                                inside[z] = true;
                                grew = true;
                            }
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        Subrule {
            members: (0..n).filter(|&x| inside[x]).collect(),
        }
    }

    /// Whether `set` (with the unit) is already closed.
    pub fn is_subrule(&self, set: &[usize]) -> bool {
        let closure = self.subrule_generated(set.iter().copied());
        let mut s: Vec<usize> = set.to_vec();
        s.sort_unstable();
        s.dedup();
        closure.members == s
    }

    /// Left cosets `⌊xS⌋` for an arbitrary subset `S` and the `max`-induced
    /// operation between them.
    pub fn left_cosets(&self, s: &[usize]) -> CosetQuotient {
        let n = self.len();
        let sm = Multiset::from_set(s.iter().copied());
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let c: Vec<usize> = self
                .fuse_multisets(&Multiset::singleton(x), &sm)
                .support()
                .collect();
            if !cosets.contains(&c) {
                cosets.push(c);
            }
        }
        cosets.sort();
        let k = cosets.len();
        let mut table = Vec::with_capacity(k * k);
        for a in &cosets {
            for b in &cosets {
                let mut cell = Multiset::empty();
                for (zi, c) in cosets.iter().enumerate() {
                    let mut best = 0;
                    for &x in a {
                        for &y in b {
                            for &z in c {
                                best = best.max(self.fuse(x, y).count(z));
                            }
                        }
                    }
                    cell.add(zi, best);
                }
                table.push(cell);
            }
        }
        CosetQuotient { cosets, table }
    }

    /// Smallest subrule containing every `⌊x x̄⌋`.
    pub fn adjoint_subrule(&self) -> Subrule {
        self.adjoint_of(&(0..self.len()).collect::<Vec<_>>())
    }

    // Adjoint subrule of the subrule `members`, viewed as a fusion rule.
    fn adjoint_of(&self, members: &[usize]) -> Subrule {
        let seed: Vec<usize> = members
            .iter()
            .flat_map(|&x| self.fuse(x, self.dual[x]).support().collect::<Vec<_>>())
            .collect();
        self.subrule_generated(seed)
    }

    /// Least `n` with `L^(n) = {1}`; `None` when the series stalls above `{1}`.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let mut current: Vec<usize> = (0..self.len()).collect();
        let mut n = 0;
        loop {
            if current == [self.unit] {
                return Some(n);
            }
            let next = self.adjoint_of(&current).members;
            if next == current {
                return None;
            }
            current = next;
            n += 1;
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_class().is_some()
    }

    /// Quotient by the adjoint subrule, checked to be a group partitioning
    /// the carrier.
    pub fn universal_grading(&self) -> Result<GradingReport> {
        let ad = self.adjoint_subrule();
        let q = self.left_cosets(ad.members());
        if !q.partitions(self.len()) {
            return Err(Error::Domain(
                "cosets of the adjoint subrule do not partition the carrier".into(),
            ));
        }
        let k = q.index();
        let mut group_table = Vec::with_capacity(k * k);
        for cell in &q.table {
            let floor = cell.floor();
            match floor.single() {
                Some(g) => group_table.push(g),
                None => {
                    return Err(Error::Domain(
                        "quotient by the adjoint subrule is not single-valued".into(),
                    ))
                }
            }
        }
        let unit = q.coset_of(self.unit).expect("cosets cover the carrier");
        let projection: Vec<usize> = (0..self.len())
            .map(|x| q.coset_of(x).expect("cosets cover the carrier"))
            .collect();
        let group_labels = q
            .cosets
            .iter()
            .map(|c| {
                if c.len() == 1 {
                    self.labels[c[0]].clone()
                } else {
                    let inner: Vec<&str> = c.iter().map(|&x| self.label(x)).collect();
                    format!("{{{}}}", inner.join(" "))
                }
            })
            .collect();
        let report = GradingReport {
            group_labels,
            cosets: q.cosets,
            projection,
            group_table,
            unit,
        };
        check_group_table(&report.group_table, k, unit)?;
        Ok(report)
    }

    pub fn is_simple_current(&self, a: usize) -> bool {
        self.fuse(a, self.dual[a]).single() == Some(self.unit)
    }

    /// Simple currents `{a : a ā = 1}` and their index.
    pub fn simple_currents(&self) -> Result<(Subrule, usize)> {
        let members: Vec<usize> = (0..self.len())
            .filter(|&a| self.is_simple_current(a))
            .collect();
        if !self.is_subrule(&members) {
            return Err(Error::Domain("simple currents are not closed".into()));
        }
        let closed_group = members.iter().all(|&a| {
            members.iter().all(|&b| {
                self.fuse(a, b)
                    .single()
                    .is_some_and(|c| members.contains(&c))
            })
        });
        if !closed_group {
            return Err(Error::Domain("simple currents do not form a group".into()));
        }
        let index = self.left_cosets(&members).index();
        Ok((Subrule { members }, index))
    }

    /// Simple-current index (number of cosets of the simple currents).
    pub fn simple_current_index(&self) -> Result<usize> {
        Ok(self.simple_currents()?.1)
    }

    /// Subrule with the given members, if closed.
    pub fn subrule(&self, members: &[usize]) -> Option<Subrule> {
        self.is_subrule(members).then(|| {
            let mut m = members.to_vec();
            m.sort_unstable();
            m.dedup();
            Subrule { members: m }
        })
    }

    /// `f(⌊xy⌋) ⊆ ⌊f(x) f(y)⌋` for all pairs. `map` must be total.
    pub fn is_homomorphism(&self, map: &[usize], target: &FusionRule) -> Result<bool> {
        if map.len() != self.len() || map.iter().any(|&y| y >= target.len()) {
            return domain("homomorphism map must be total into the target carrier");
        }
        if !self.is_multiplicity_free() || !target.is_multiplicity_free() {
            return domain("homomorphisms are defined between multiplicity-free rules");
        }
        Ok(self.hom_pairs_ok(map, target, self.len()))
    }

    // Checks the inclusion for all pairs among the first `upto` elements.
    fn hom_pairs_ok(&self, map: &[usize], target: &FusionRule, upto: usize) -> bool {
        (0..upto).all(|x| (0..upto).all(|y| self.pair_ok(map, target, x, y, upto)))
    }

    fn pair_ok(&self, map: &[usize], target: &FusionRule, x: usize, y: usize, upto: usize) -> bool {
        let image = target.fuse(map[x], map[y]);
        self.fuse(x, y)
            .support()
            .all(|z| z >= upto || image.contains(map[z]))
    }

    /// All homomorphisms `⌊L⌋ -> target` by backtracking with pairwise checks.
    pub fn homomorphisms(&self, target: &FusionRule) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out = Vec::new();
        let mut map = vec![0usize; n];
        self.hom_search(target, &mut map, 0, &mut out);
        out
    }

    fn hom_search(
        &self,
        target: &FusionRule,
        map: &mut Vec<usize>,
        k: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == self.len() {
            out.push(map.clone());
            return;
        }
        for img in 0..target.len() {
            map[k] = img;
            let upto = k + 1;
            let ok = (0..upto).all(|x| {
                self.pair_ok(map, target, x, k, upto) && self.pair_ok(map, target, k, x, upto)
            });
            // Products landing in already-assigned elements are checked once
            // both factors are known; later elements are checked on assignment.
            let ok = ok
                && (0..upto).all(|x| {
                    (0..upto).all(|y| {
                        self.fuse(x, y)
                            .support()
                            .filter(|&z| z == k)
                            .all(|z| target.fuse(map[x], map[y]).contains(map[z]))
                    })
                });
            if ok {
                self.hom_search(target, map, k + 1, out);
            }
        }
    }

    /// Permutations fixing the unit, commuting with duals and preserving the
    /// multiset table.
    pub fn automorphisms(&self) -> Result<Vec<Vec<usize>>> {
        self.automorphisms_bounded(DEFAULT_SEARCH_BOUND)
    }

    pub fn automorphisms_bounded(&self, bound: usize) -> Result<Vec<Vec<usize>>> {
        if self.len() > bound {
            return Err(Error::Resource(format!(
                "automorphism search limited to {bound} elements, rule has {}",
                self.len()
            )));
        }
        Ok(self.isomorphisms_to(self, |_, _| true))
    }

    /// All isomorphisms to `other`, restricted by a per-element predicate
    /// `allowed(x, image)`.
    pub fn isomorphisms_to(
        &self,
        other: &FusionRule,
        allowed: impl Fn(usize, usize) -> bool,
    ) -> Vec<Vec<usize>> {
        self.isomorphisms_limited(other, allowed, usize::MAX)
    }

    /// First isomorphism to `other` allowed by the predicate, if any.
    pub fn isomorphism_to(
        &self,
        other: &FusionRule,
        allowed: impl Fn(usize, usize) -> bool,
    ) -> Option<Vec<usize>> {
        self.isomorphisms_limited(other, allowed, 1)
            .into_iter()
            .next()
    }

    fn isomorphisms_limited(
        &self,
        other: &FusionRule,
        allowed: impl Fn(usize, usize) -> bool,
        limit: usize,
    ) -> Vec<Vec<usize>> {
        let n = self.len();
        if other.len() != n {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        // Assign the unit first.
        if !allowed(self.unit, other.unit) {
            return out;
        }
        let mut order: Vec<usize> = vec![self.unit];
        order.extend((0..n).filter(|&x| x != self.unit));
        self.iso_search(
            other, &allowed, &order, 0, &mut map, &mut used, &mut out, limit,
        );
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn iso_search(
        &self,
        other: &FusionRule,
        allowed: &impl Fn(usize, usize) -> bool,
        order: &[usize],
        k: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if k == order.len() {
            out.push(map.clone());
            return;
        }
        let x = order[k];
        for y in 0..other.len() {
            if used[y] || !allowed(x, y) {
                continue;
            }
            if k == 0 && y != other.unit {
                continue;
            }
            // Dual compatibility where the dual is already placed.
            let dx = self.dual[x];
            if map[dx] != usize::MAX && map[dx] != other.dual[y] {
                continue;
            }
            if dx == x && other.dual[y] != y {
                continue;
            }
            map[x] = y;
            used[y] = true;
            let consistent = order[..=k].iter().all(|&a| {
                order[..=k].iter().all(|&b| {
                    if a != x && b != x {
                        return true;
                    }
                    let src = self.fuse(a, b);
                    let dst = other.fuse(map[a], map[b]);
                    // Every assigned z must carry its count over; total sizes agree.
                    src.total() == dst.total()
                        && src
                            .entries()
                            .iter()
                            .all(|&(z, c)| map[z] == usize::MAX || dst.count(map[z]) == c)
                })
            });
            if consistent {
                self.iso_search(other, allowed, order, k + 1, map, used, out, limit);
            }
            map[x] = usize::MAX;
            used[y] = false;
        }
    }
}

fn check_group_table(table: &[usize], k: usize, unit: usize) -> Result<()> {
    for g in 0..k {
        if table[unit * k + g] != g || table[g * k + unit] != g {
            return Err(Error::Domain("quotient has no two-sided unit".into()));
        }
        if !(0..k).any(|h| table[g * k + h] == unit) {
            return Err(Error::Domain("quotient element lacks an inverse".into()));
        }
        for h in 0..k {
            for l in 0..k {
                if table[table[g * k + h] * k + l] != table[g * k + table[h * k + l]] {
                    return Err(Error::Domain("quotient is not associative".into()));
                }
            }
        }
    }
    Ok(())
}
