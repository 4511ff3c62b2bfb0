//! Finite groups given by multiplication tables, and a small catalog.

use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::multimagma::{FusionRule, Multiset};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    labels: Vec<String>,
    table: Vec<usize>,
    unit: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from a table, checking the group axioms.
    pub fn new(name: impl Into<String>, labels: Vec<String>, table: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return invalid("group carrier is empty");
        }
        if table.len() != n * n || table.iter().any(|&x| x >= n) {
            return invalid("group table has the wrong shape");
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return invalid("group labels must be distinct");
        }
        let at = |a: usize, b: usize| table[a * n + b];
        let unit = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::Invalid("group table has no unit".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| at(a, b) == unit && at(b, a) == unit)
                .ok_or_else(|| Error::Invalid(format!("element {} has no inverse", labels[a])))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return invalid(format!(
                            "group table is not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        ));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            name: name.into(),
            labels,
            table,
            unit,
            inverse,
        })
    }

    pub fn from_fn(
        name: impl Into<String>,
        labels: Vec<String>,
        mul: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = labels.len();
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(mul(a, b));
            }
        }
        Self::new(name, labels, table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.unit {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by `seed`, as a sorted list.
    pub fn generated(&self, seed: &[usize]) -> Vec<usize> {
        let n = self.order();
        let mut inside = vec![false; n];
        inside[self.unit] = true;
        let mut frontier = vec![self.unit];
        while let Some(x) = frontier.pop() {
            for &g in seed {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    frontier.push(y);
                }
            }
        }
        (0..n).filter(|&x| inside[x]).collect()
    }

    /// A small generating set, chosen greedily by element order.
    pub fn generators(&self) -> Vec<usize> {
        let n = self.order();
        let mut by_order: Vec<usize> = (0..n).collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut current = vec![self.unit];
        for a in by_order {
            if current.len() == n {
                break;
            }
            if current.binary_search(&a).is_err() {
                gens.push(a);
                current = self.generated(&gens);
            }
        }
        gens
    }

    /// Subgroups of index 2, each as a sorted member list.
    pub fn index_two_subgroups(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        if n % 2 != 0 {
            return Vec::new();
        }
        // Index-2 subgroups are kernels of surjections onto Z2.
        let z2 = cyclic(2);
        let mut out = BTreeSet::new();
        for h in self.homomorphisms_to(&z2) {
            let ker: Vec<usize> = (0..n).filter(|&x| h[x] == z2.unit()).collect();
            if ker.len() * 2 == n {
                out.insert(ker);
            }
        }
        out.into_iter().collect()
    }

    /// The group viewed as a fusion rule with singleton products.
    pub fn to_fusion_rule(&self) -> FusionRule {
        let n = self.order();
        let table = (0..n * n)
            .map(|i| Multiset::singleton(self.table[i]))
            .collect();
        FusionRule::new(self.labels.clone(), table, self.unit, self.inverse.clone())
            .expect("group tables are valid fusion rules")
    }

    /// All homomorphisms into `target`, as element maps.
    pub fn homomorphisms_to(&self, target: &FiniteGroup) -> Vec<Vec<usize>> {
        self.maps_from_generators(target, false)
    }

    /// All isomorphisms onto `target`.
    pub fn isomorphisms_to(&self, target: &FiniteGroup) -> Vec<Vec<usize>> {
        if self.order() != target.order() {
            return Vec::new();
        }
        self.maps_from_generators(target, true)
    }

    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        self.isomorphisms_to(self)
    }

    fn maps_from_generators(&self, target: &FiniteGroup, bijective: bool) -> Vec<Vec<usize>> {
        let gens = self.generators();
        let orders: Vec<usize> = gens.iter().map(|&g| self.element_order(g)).collect();
        let candidates: Vec<Vec<usize>> = orders
            .iter()
            .map(|&o| {
                (0..target.order())
                    .filter(|&y| {
                        let oy = target.element_order(y);
                        if bijective {
                            oy == o
                        } else {
                            o % oy == 0
                        }
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut images = vec![0usize; gens.len()];
        self.extend_choices(
            target,
            &gens,
            &candidates,
            0,
            &mut images,
            bijective,
            &mut out,
        );
        out.sort();
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_choices(
        &self,
        target: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        k: usize,
        images: &mut Vec<usize>,
        bijective: bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == gens.len() {
            if let Some(map) = self.extend_hom(target, gens, images) {
                if !bijective || is_bijection(&map, target.order()) {
                    out.push(map);
                }
            }
            return;
        }
        for &y in &candidates[k] {
            images[k] = y;
            self.extend_choices(target, gens, candidates, k + 1, images, bijective, out);
        }
    }

    // Extends generator images to a map by breadth-first search over words,
    // then checks the homomorphism property on all pairs.
    fn extend_hom(
        &self,
        target: &FiniteGroup,
        gens: &[usize],
        images: &[usize],
    ) -> Option<Vec<usize>> {
        let n = self.order();
        let mut map = vec![usize::MAX; n];
        map[self.unit] = target.unit();
        let mut queue = std::collections::VecDeque::from([self.unit]);
        while let Some(x) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let val = target.mul(map[x], img);
                if map[y] == usize::MAX {
                    map[y] = val;
                    queue.push_back(y);
                } else if map[y] != val {
                    return None;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if map[self.mul(a, b)] != target.mul(map[a], map[b]) {
                    return None;
                }
            }
        }
        Some(map)
    }
}

fn is_bijection(map: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &y in map {
        if seen[y] {
            return false;
        }
        seen[y] = true;
    }
    map.len() == n
}

/// Cyclic group `Z_n` with elements labelled `0..n-1` additively.
pub fn cyclic(n: usize) -> FiniteGroup {
    assert!(n >= 1);
    let labels = (0..n).map(|k| k.to_string()).collect();
    FiniteGroup::from_fn(format!("Z{n}"), labels, |a, b| (a + b) % n).expect("cyclic group")
}

/// Direct product with elements labelled `(a,b)`.
pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
    let m = h.order();
    let mut labels = Vec::new();
    for a in g.labels() {
        for b in h.labels() {
            labels.push(format!("({a},{b})"));
        }
    }
    FiniteGroup::from_fn(format!("{}x{}", g.name(), h.name()), labels, |x, y| {
        g.mul(x / m, y / m) * m + h.mul(x % m, y % m)
    })
    .expect("direct product")
}

/// Dihedral group of order `2n`: rotations `r0..` and reflections `s0..`
/// where `s_k = s r^k`.
pub fn dihedral(n: usize) -> FiniteGroup {
    assert!(n >= 1);
    let mut labels: Vec<String> = (0..n).map(|k| format!("r{k}")).collect();
    labels.extend((0..n).map(|k| format!("s{k}")));
    // Element (e, k) = s^e r^k; r^k s = s r^{-k}.
    FiniteGroup::from_fn(format!("D{n}"), labels, |x, y| {
        let (e1, k1) = (x / n, x % n);
        let (e2, k2) = (y / n, y % n);
        let k = if e2 == 0 { k1 + k2 } else { n - k1 % n + k2 } % n;
        ((e1 + e2) % 2) * n + k
    })
    .expect("dihedral group")
}

/// Dicyclic group of order `4n`: `a^k x^e` with `a^{2n} = 1`, `x^2 = a^n`,
/// `x a = a^{-1} x`.
pub fn dicyclic(n: usize) -> FiniteGroup {
    let m = 2 * n;
    let mut labels: Vec<String> = (0..m).map(|k| format!("a{k}")).collect();
    labels.extend((0..m).map(|k| format!("a{k}x")));
    FiniteGroup::from_fn(format!("Dic{n}"), labels, |x, y| {
        let (e1, k1) = (x / m, x % m);
        let (e2, k2) = (y / m, y % m);
        // a^k1 x^e1 a^k2 x^e2 = a^(k1 ± k2) x^e1 x^e2
        let k = if e1 == 0 { k1 + k2 } else { k1 + m - k2 } % m;
        if e1 == 1 && e2 == 1 {
            (k + n) % m
        } else {
            ((e1 + e2) % 2) * m + k
        }
    })
    .expect("dicyclic group")
}

/// Quaternion group with labels `1, -1, i, -i, j, -j, k, -k`.
pub fn quaternion() -> FiniteGroup {
    let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    // Index 2u + sign; unit products ii = jj = kk = -1, ij = k, jk = i, ki = j.
    let unit_mul = |p: usize, q: usize| -> (usize, bool) {
        match (p, q) {
            (0, q) => (q, false),
            (p, 0) => (p, false),
            (p, q) if p == q => (0, true),
            (1, 2) => (3, false),
            (2, 1) => (3, true),
            (2, 3) => (1, false),
            (3, 2) => (1, true),
            (3, 1) => (2, false),
            (1, 3) => (2, true),
            _ => unreachable!(),
        }
    };
    FiniteGroup::from_fn("Q8", labels, |x, y| {
        let (u, neg) = unit_mul(x / 2, y / 2);
        let sign = (x % 2 + y % 2 + usize::from(neg)) % 2;
        2 * u + sign
    })
    .expect("quaternion group")
}

/// Alternating group on four points, elements labelled by their image lists.
pub fn alternating4() -> FiniteGroup {
    let mut perms: Vec<[usize; 4]> = Vec::new();
    let mut p = [0, 1, 2, 3];
    permutations(&mut p, 0, &mut perms);
    perms.retain(|q| parity(q) == 0);
    perms.sort();
    let labels = perms
        .iter()
        .map(|q| format!("{}{}{}{}", q[0], q[1], q[2], q[3]))
        .collect();
    FiniteGroup::from_fn("A4", labels, |x, y| {
        // (x * y)(i) = x(y(i))
        let comp: [usize; 4] = std::array::from_fn(|i| perms[x][perms[y][i]]);
        perms.iter().position(|q| *q == comp).expect("closed")
    })
    .expect("alternating group")
}

fn permutations(p: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
    if k == 4 {
        out.push(*p);
        return;
    }
    for i in k..4 {
        p.swap(k, i);
        permutations(p, k + 1, out);
        p.swap(k, i);
    }
}

fn parity(p: &[usize; 4]) -> usize {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2
}

/// Number of isomorphism classes of groups of each order up to 16.
pub const GROUP_COUNTS: [usize; 17] = [0, 1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14];

/// Every group in the catalog, one per isomorphism class, orders 1 to 15.
pub fn catalog(max_order: usize) -> Vec<FiniteGroup> {
    let mut out = Vec::new();
    for n in 1..=max_order.min(15) {
        out.extend(groups_of_order(n));
    }
    out
}

/// Catalog entries of order `n`; complete for `n <= 15`.
pub fn groups_of_order(n: usize) -> Vec<FiniteGroup> {
    let z = cyclic;
    match n {
        4 => vec![z(4), product(&z(2), &z(2))],
        6 => vec![z(6), dihedral(3)],
        8 => vec![
            z(8),
            product(&z(2), &z(4)),
            product(&product(&z(2), &z(2)), &z(2)),
            dihedral(4),
            quaternion(),
        ],
        9 => vec![z(9), product(&z(3), &z(3))],
        10 => vec![z(10), dihedral(5)],
        12 => vec![
            z(12),
            product(&z(2), &z(6)),
            dihedral(6),
            alternating4(),
            dicyclic(3),
        ],
        14 => vec![z(14), dihedral(7)],
        n if n <= 15 => vec![z(n)],
        _ => Vec::new(),
    }
}

/// Whether the catalog lists every group of order `n`.
pub fn catalog_complete(n: usize) -> bool {
    n <= 16 && groups_of_order(n).len() == GROUP_COUNTS[n]
}

/// Parses a group name: `Z<n>`, `Z<a>xZ<b>[x...]`, `D<n>`, `Dic<n>`, `Q8`,
/// `A4`, `S3`, `V4`, `1`.
pub fn by_name(name: &str) -> Result<FiniteGroup> {
    let bad = || Error::Invalid(format!("unknown group name {name:?}"));
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad());
    match name {
        "1" => return Ok(cyclic(1)),
        "Q8" => return Ok(quaternion()),
        "A4" => return Ok(alternating4()),
        "S3" => return Ok(dihedral(3)),
        "V4" => return Ok(product(&cyclic(2), &cyclic(2))),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("Dic") {
        let n = parse(rest)?;
        if n == 0 || 4 * n > 64 {
            return Err(bad());
        }
        return Ok(dicyclic(n));
    }
    if let Some(rest) = name.strip_prefix('D') {
        let n = parse(rest)?;
        if n == 0 || n > 32 {
            return Err(bad());
        }
        return Ok(dihedral(n));
    }
    let factors: Vec<&str> = name.split('x').collect();
    let mut group: Option<FiniteGroup> = None;
    for f in factors {
        let n = parse(f.strip_prefix('Z').ok_or_else(bad)?)?;
        if n == 0 || n > 64 {
            return Err(bad());
        }
        let c = cyclic(n);
        group = Some(match group {
            None => c,
            Some(g) => product(&g, &c),
        });
    }
    let g = group.ok_or_else(bad)?;
    if g.order() > 64 {
        return Err(bad());
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete_to_fifteen() {
        for n in 1..=15 {
            assert!(catalog_complete(n), "order {n}");
        }
    }

    #[test]
    fn catalog_groups_are_pairwise_non_isomorphic() {
        for n in 1..=15 {
            let gs = groups_of_order(n);
            for i in 0..gs.len() {
                for j in i + 1..gs.len() {
                    assert!(
                        gs[i].isomorphisms_to(&gs[j]).is_empty(),
                        "{} ~ {}",
                        gs[i].name(),
                        gs[j].name()
                    );
                }
            }
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(cyclic(4).automorphisms().len(), 2);
        assert_eq!(product(&cyclic(2), &cyclic(2)).automorphisms().len(), 6);
        assert_eq!(quaternion().automorphisms().len(), 24);
        assert_eq!(dihedral(4).automorphisms().len(), 8);
        assert_eq!(alternating4().automorphisms().len(), 24);
    }

    #[test]
    fn homomorphism_counts() {
        // Hom(Z4, Z4) has 4 elements; Hom(Z2xZ2, Z2) has 4.
        assert_eq!(cyclic(4).homomorphisms_to(&cyclic(4)).len(), 4);
        assert_eq!(
            by_name("Z2xZ2").unwrap().homomorphisms_to(&cyclic(2)).len(),
            4
        );
        assert_eq!(dihedral(3).homomorphisms_to(&cyclic(3)).len(), 1);
    }

    #[test]
    fn index_two_subgroups() {
        assert_eq!(cyclic(4).index_two_subgroups().len(), 1);
        assert_eq!(by_name("Z2xZ2").unwrap().index_two_subgroups().len(), 3);
        assert_eq!(cyclic(3).index_two_subgroups().len(), 0);
        assert_eq!(quaternion().index_two_subgroups().len(), 3);
    }

    #[test]
    fn names_parse() {
        assert_eq!(by_name("Z2xZ4").unwrap().order(), 8);
        assert_eq!(by_name("D4").unwrap().order(), 8);
        assert_eq!(by_name("Dic3").unwrap().order(), 12);
        assert!(!by_name("S3").unwrap().is_abelian());
        assert!(by_name("Y7").is_err());
    }
}
