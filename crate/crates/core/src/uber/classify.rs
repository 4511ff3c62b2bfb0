//! Überderivations up to gauge, computed in discrete-log coordinates.
//!
//! Every monomial condition is affine-linear over `Z/(p-1)`: unknowns are
//! the exponents of `χ(a,b)(m)`, `υ(a,b)(m)` and `τ(m)`. Solutions modulo
//! the image of the gauge map are enumerated, then filtered by the two
//! additive conditions (character-sum nondegeneracy and the norm of `τ`).

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_existence_obstructions, Ambi, GaugeTriple, ObstructionReport, PairTable, SingleTable,
    Uberderivation,
};
use crate::error::{Error, Result};
use crate::feudal::graded_group;
use crate::group::FiniteGroup;
use crate::scalars::Field;
use crate::zn::{self, quotient, smith, ZnMatrix};

/// Largest lattice quotient enumerated before giving up.
pub const MAX_CLASSES: u128 = 1 << 22;
const MAX_SERFS: usize = 8;
const MAX_P: u32 = 257;

struct Layout {
    s: usize,
    k: usize,
}

impl Layout {
    fn chi(&self, a: usize, b: usize, m: usize) -> usize {
        (a * self.s + b) * self.k + m
    }
    fn ups(&self, a: usize, b: usize, m: usize) -> usize {
        self.s * self.s * self.k + (a * self.s + b) * self.k + m
    }
    fn tau(&self, m: usize) -> usize {
        2 * self.s * self.s * self.k + m
    }
    fn len(&self) -> usize {
        2 * self.s * self.s * self.k + self.k
    }
}

fn layout(am: &Ambi) -> Layout {
    Layout {
        s: am.serf_count(),
        k: am.lord_count(),
    }
}

fn to_logs(u: &Uberderivation) -> Option<Vec<u64>> {
    u.chi
        .values()
        .iter()
        .chain(u.ups.values())
        .chain(&u.tau)
        .map(|&v| (!v.is_zero()).then(|| u.field.log_unit(v)))
        .collect()
}

fn from_logs(am: &Arc<Ambi>, field: &Arc<Field>, x: &[u64]) -> Uberderivation {
    let l = layout(am);
    let e = |i: usize| field.exp_u64(x[i]);
    Uberderivation {
        ambi: am.clone(),
        field: field.clone(),
        chi: PairTable::from_fn(l.s, l.k, |a, b, m| e(l.chi(a, b, m))),
        ups: PairTable::from_fn(l.s, l.k, |a, b, m| e(l.ups(a, b, m))),
        tau: (0..l.k).map(|m| e(l.tau(m))).collect(),
    }
}

/// Monomial conditions as `C x = rhs`; `None` when `|A|` vanishes in `F`.
fn constraints(am: &Ambi, field: &Field) -> Option<(ZnMatrix, Vec<u64>)> {
    let n = field.unit_order() as u64;
    let l = layout(am);
    let (s, k) = (l.s, l.k);
    let e = am.unit();
    let mut rows: Vec<(Vec<(usize, i64)>, u64)> = Vec::new();

    for a in 0..s {
        for m in 0..k {
            rows.push((vec![(l.ups(e, a, m), 1)], 0));
            rows.push((vec![(l.ups(a, e, m), 1)], 0));
        }
    }
    // υ(a,b)/υ(a,b)^c · χ(ab,c) = χ(a,c) · ᵃχ(b,c)
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                for m in 0..k {
                    rows.push((
                        vec![
                            (l.ups(a, b, m), 1),
                            (l.ups(a, b, am.mr(m, am.inv(c))), -1),
                            (l.chi(am.mul(a, b), c, m), 1),
                            (l.chi(a, c, m), -1),
                            (l.chi(b, c, am.lm(am.inv(a), m)), -1),
                        ],
                        0,
                    ));
                }
            }
        }
    }
    // χ(b,a)(m̄) = χ(a,b)(amb) τ(amb) τ(m) / (τ(am) τ(mb))
    for a in 0..s {
        for b in 0..s {
            for m in 0..k {
                let amb = am.act(a, m, b);
                rows.push((
                    vec![
                        (l.chi(b, a, am.bar(m)), 1),
                        (l.chi(a, b, amb), -1),
                        (l.tau(amb), -1),
                        (l.tau(m), -1),
                        (l.tau(am.lm(a, m)), 1),
                        (l.tau(am.mr(m, b)), 1),
                    ],
                    0,
                ));
            }
        }
    }
    let asub = am.a_subgroup();
    for m in 0..k {
        for &a in asub {
            for &b in asub {
                rows.push((vec![(l.chi(a, b, m), 1), (l.chi(b, a, m), -1)], 0));
                for &c in asub {
                    rows.push((
                        vec![
                            (l.chi(am.mul(a, b), c, m), 1),
                            (l.chi(a, c, m), -1),
                            (l.chi(b, c, m), -1),
                        ],
                        0,
                    ));
                }
            }
        }
    }
    // |A| τ τ̄ = 1
    let order = field.elem(asub.len() as u64);
    if order.is_zero() {
        return None;
    }
    let log_a = field.log_unit(order);
    for m in 0..k {
        rows.push((vec![(l.tau(m), 1), (l.tau(am.bar(m)), 1)], (n - log_a) % n));
    }

    let mut c = ZnMatrix::zeros(rows.len(), l.len(), n);
    let mut rhs = Vec::with_capacity(rows.len());
    for (i, (terms, r)) in rows.into_iter().enumerate() {
        for (j, v) in terms {
            c.add_signed(i, j, v);
        }
        rhs.push(r);
    }
    Some((c, rhs))
}

/// Gauge parameters: `φ(a)(m)` for `a ≠ 1`, `ς(m)`, then `θ(a,b)` per
/// lord orbit for `a, b ≠ 1`.
struct GaugeLayout {
    s: usize,
    k: usize,
    unit: usize,
    orbits: usize,
}

impl GaugeLayout {
    // Position among the non-unit serfs.
    fn skip(&self, a: usize) -> Option<usize> {
        match a.cmp(&self.unit) {
            std::cmp::Ordering::Less => Some(a),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(a - 1),
        }
    }
    fn phi(&self, a: usize, m: usize) -> Option<usize> {
        self.skip(a).map(|i| i * self.k + m)
    }
    fn sigma(&self, m: usize) -> usize {
        (self.s - 1) * self.k + m
    }
    fn theta(&self, a: usize, b: usize, o: usize) -> Option<usize> {
        let (i, j) = (self.skip(a)?, self.skip(b)?);
        Some((self.s - 1) * self.k + self.k + (i * (self.s - 1) + j) * self.orbits + o)
    }
    fn len(&self) -> usize {
        (self.s - 1) * self.k + self.k + (self.s - 1) * (self.s - 1) * self.orbits
    }
}

fn gauge_layout(am: &Ambi) -> GaugeLayout {
    GaugeLayout {
        s: am.serf_count(),
        k: am.lord_count(),
        unit: am.unit(),
        orbits: am.fix_orbits().len(),
    }
}

/// Linear map from gauge parameters to changes of `(χ, υ, τ)` exponents.
fn gauge_map(am: &Ambi, n: u64) -> (ZnMatrix, GaugeLayout) {
    let l = layout(am);
    let g = gauge_layout(am);
    let mut mat = ZnMatrix::zeros(l.len(), g.len(), n);
    let (s, k) = (l.s, l.k);
    let phi = |mat: &mut ZnMatrix, row: usize, a: usize, m: usize, v: i64| {
        if let Some(c) = g.phi(a, m) {
            mat.add_signed(row, c, v);
        }
    };
    for a in 0..s {
        for b in 0..s {
            for m in 0..k {
                let (ai, bi) = (am.inv(a), am.inv(b));
                let row = l.chi(a, b, m);
                phi(&mut mat, row, a, m, 1);
                phi(&mut mat, row, b, am.act(b, am.bar(m), a), 1);
                phi(&mut mat, row, a, am.mr(m, bi), -1);
                phi(&mut mat, row, b, am.lm(b, am.bar(m)), -1);
                mat.add_signed(row, g.sigma(am.act(ai, m, bi)), 1);
                mat.add_signed(row, g.sigma(m), 1);
                mat.add_signed(row, g.sigma(am.lm(ai, m)), -1);
                mat.add_signed(row, g.sigma(am.mr(m, bi)), -1);

                let row = l.ups(a, b, m);
                phi(&mut mat, row, a, m, 1);
                phi(&mut mat, row, b, am.lm(ai, m), 1);
                phi(&mut mat, row, am.mul(a, b), m, -1);
                if let Some(c) = g.theta(a, b, am.orbit_of(m)) {
                    mat.add_signed(row, c, -1);
                }
            }
        }
    }
    for m in 0..k {
        mat.add_signed(l.tau(m), g.sigma(am.bar(m)), 1);
        mat.add_signed(l.tau(m), g.sigma(m), -1);
    }
    (mat, g)
}

fn triple_from_params(am: &Ambi, field: &Field, g: &GaugeLayout, lambda: &[u64]) -> GaugeTriple {
    let (s, k) = (g.s, g.k);
    let e = |x: u64| field.exp_u64(x);
    GaugeTriple {
        theta: PairTable::from_fn(s, k, |a, b, m| {
            g.theta(a, b, am.orbit_of(m))
                .map_or(field.one(), |c| e(lambda[c]))
        }),
        phi: SingleTable::from_fn(s, k, |a, m| {
            g.phi(a, m).map_or(field.one(), |c| e(lambda[c]))
        }),
        sigma: (0..k).map(|m| e(lambda[g.sigma(m)])).collect(),
    }
}

/// A gauge `(θ, φ, ς)` from `u1` to `u2`, if one exists.
pub fn gauge_equivalent_uber(u1: &Uberderivation, u2: &Uberderivation) -> Option<GaugeTriple> {
    if u1.ambi.feudal() != u2.ambi.feudal() || u1.field.p() != u2.field.p() {
        return None;
    }
    let n = u1.field.unit_order() as u64;
    let (x1, x2) = (to_logs(u1)?, to_logs(u2)?);
    let (gm, g) = gauge_map(&u1.ambi, n);
    let diff: Vec<u64> = x1.iter().zip(&x2).map(|(a, b)| (b + n - a) % n).collect();
    let lambda = zn::solve(&gm, &diff)?;
    Some(triple_from_params(&u1.ambi, &u1.field, &g, &lambda))
}

/// For two lords: a gauge-equivalent überderivation with `τ` constant,
/// equal to `±|A|^{-1/2}`; the root with the smaller residue is tried first.
pub fn canonicalize_tau(u: &Uberderivation) -> Result<Uberderivation> {
    let am = &*u.ambi;
    let field = &u.field;
    let k = am.lord_count();
    if k != 2 {
        return Err(Error::Unsupported(format!(
            "constant τ is only available with two lords, found {k}"
        )));
    }
    let order = field.elem(am.a_subgroup().len() as u64);
    let root = order.try_inv().and_then(|x| field.sqrt(x)).ok_or_else(|| {
        Error::UnsupportedField(format!("|A|^(-1/2) does not exist in GF({})", field.p()))
    })?;
    let mut roots = [root, -root];
    roots.sort();
    let n = field.unit_order() as u64;
    let mut mat = ZnMatrix::zeros(k, k, n);
    for m in 0..k {
        mat.add_signed(m, am.bar(m), 1);
        mat.add_signed(m, m, -1);
    }
    for t in roots {
        let lt = field.log_unit(t);
        let rhs: Vec<u64> = (0..k)
            .map(|m| (lt + n - field.log_unit(u.tau[m])) % n)
            .collect();
        if let Some(sol) = zn::solve(&mat, &rhs) {
            let mut g = GaugeTriple::identity(am, field);
            g.sigma = sol.iter().map(|&x| field.exp_u64(x)).collect();
            return Ok(u.apply_gauge(&g));
        }
    }
    Err(Error::Domain(
        "τ is not gauge equivalent to a constant".into(),
    ))
}

/// One class under gauge equivalence and graded automorphisms.
#[derive(Clone, Debug)]
pub struct UberClass {
    pub representative: Uberderivation,
    /// Indices into [`UberClassification::gauge_classes`].
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct UberClassification {
    pub p: u32,
    pub obstructions: ObstructionReport,
    /// Order of the solution lattice modulo gauge, before the additive filters.
    pub lattice_classes: u128,
    pub gauge_classes: Vec<Uberderivation>,
    pub classes: Vec<UberClass>,
    pub graded_automorphisms: usize,
    pub all_automorphisms_graded: bool,
}

#[derive(Serialize)]
pub struct ClassSummary {
    pub gauge_classes: usize,
    pub classes: usize,
}

impl UberClassification {
    pub fn summary(&self) -> ClassSummary {
        ClassSummary {
            gauge_classes: self.gauge_classes.len(),
            classes: self.classes.len(),
        }
    }
}

/// All überderivations on `ambi` over `field` up to gauge, grouped further
/// by graded automorphisms of the rule.
pub fn enumerate_uber(ambi: &Arc<Ambi>, field: &Arc<Field>) -> Result<UberClassification> {
    let am = &**ambi;
    if am.serf_count() > MAX_SERFS {
        return Err(Error::Resource(format!(
            "enumeration supports at most {MAX_SERFS} serfs, found {}",
            am.serf_count()
        )));
    }
    if field.p() > MAX_P {
        return Err(Error::Resource(format!("enumeration supports p ≤ {MAX_P}")));
    }
    let obstructions = check_existence_obstructions(am.feudal(), field)?;
    let graded = am.feudal().graded_automorphisms();
    let all_graded = am
        .feudal()
        .rule()
        .automorphisms()
        .map(|all| all.len() == graded.len())
        .unwrap_or(false);
    let mut out = UberClassification {
        p: field.p(),
        obstructions,
        lattice_classes: 0,
        gauge_classes: Vec::new(),
        classes: Vec::new(),
        graded_automorphisms: graded.len(),
        all_automorphisms_graded: all_graded,
    };
    let n = field.unit_order() as u64;
    let Some((cmat, rhs)) = constraints(am, field) else {
        return Ok(out);
    };
    let cs = smith(&cmat, true);
    let Some(x0) = cs.solve(&rhs) else {
        return Ok(out);
    };
    let kernel = cs.kernel();
    let (gm, _) = gauge_map(am, n);
    let gauge_cols: Vec<Vec<u64>> = (0..gm.cols()).map(|j| gm.column(j)).collect();
    debug_assert!(gauge_cols
        .iter()
        .all(|c| cmat.mul_vec(c).iter().all(|&x| x == 0)));
    let q = quotient(&kernel, &gauge_cols, cmat.cols(), n);
    out.lattice_classes = q.order();
    if q.order() > MAX_CLASSES {
        return Err(Error::Resource(format!(
            "{} lattice classes exceed the limit of {MAX_CLASSES}",
            q.order()
        )));
    }

    let l = layout(am);
    let asub = am.a_subgroup();
    let e = am.unit();
    let nondegenerate = |x: &[u64]| {
        (0..l.k).all(|m| {
            asub.iter().filter(|&&a| a != e).all(|&a| {
                asub.iter()
                    .fold(field.zero(), |acc, &b| {
                        acc + field.exp_u64(x[l.chi(a, b, m)])
                    })
                    .is_zero()
            })
        })
    };
    let solutions: Vec<Vec<u64>> = q
        .elements()
        .into_par_iter()
        .map(|el| {
            x0.iter()
                .zip(&el)
                .map(|(a, b)| (a + b) % n)
                .collect::<Vec<u64>>()
        })
        .filter(|x| nondegenerate(x))
        .collect();

    let gs = smith(&gm, true);
    let mut key_index: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, x) in solutions.iter().enumerate() {
        key_index.insert(gs.coset_key(x), i);
    }
    let reps: Vec<Uberderivation> = solutions
        .iter()
        .map(|x| {
            let u = from_logs(ambi, field, x);
            if am.lord_count() == 2 {
                canonicalize_tau(&u).unwrap_or(u)
            } else {
                u
            }
        })
        .collect();

    // Union classes related by a graded automorphism.
    let mut parent: Vec<usize> = (0..reps.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for (i, u) in reps.iter().enumerate() {
        for sigma in &graded {
            let moved = to_logs(&u.relabel(sigma)).expect("units stay units");
            let j = *key_index
                .get(&gs.coset_key(&moved))
                .ok_or_else(|| Error::Domain("automorphism left the solution set".into()))?;
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    let mut bucket_of: HashMap<usize, usize> = HashMap::new();
    for i in 0..reps.len() {
        let r = find(&mut parent, i);
        let b = *bucket_of.entry(r).or_insert_with(|| {
            buckets.push(Vec::new());
            buckets.len() - 1
        });
        buckets[b].push(i);
    }
    out.classes = buckets
        .into_iter()
        .map(|members| UberClass {
            representative: reps[members[0]].clone(),
            members,
        })
        .collect();
    out.gauge_classes = reps;
    Ok(out)
}

/// Number of überderivations on `serfs ⊂ g` over `F^{G∖S}` up to gauge.
pub fn h3_count_via_uber(g: &FiniteGroup, serfs: &[usize], field: &Arc<Field>) -> Result<usize> {
    let feudal = graded_group(g, serfs)?;
    let ambi = Ambi::new(&feudal)?;
    Ok(enumerate_uber(&ambi, field)?.gauge_classes.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_image_solves_constraints() {
        let feudal = crate::feudal::moore_read();
        let am = Ambi::new(&feudal).unwrap();
        let field = Field::new(17).unwrap();
        let (c, _) = constraints(&am, &field).unwrap();
        let (g, _) = gauge_map(&am, 16);
        let prod = c.mul(&g);
        for i in 0..prod.rows() {
            for j in 0..prod.cols() {
                assert_eq!(prod.get(i, j), 0);
            }
        }
    }
}
