//! Exhaustive search for fusion systems up to gauge equivalence.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{FusionSystem, Support};
use crate::error::{Error, Result};
use crate::scalars::{Field, Fp};
use crate::zn::{inv_mod, smith};

pub const DEFAULT_BUDGET_BITS: f64 = 64.0;

#[derive(Clone, Debug, Serialize)]
pub struct BruteForceReport {
    pub p: u32,
    pub admissible: usize,
    pub unit_fixed: usize,
    pub gauge_fixed: usize,
    pub free: usize,
    pub search_bits: f64,
    pub solutions: u64,
    #[serde(skip)]
    pub classes: Vec<FusionSystem>,
}

impl BruteForceReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

// Rows of the gauge matrix that can be pinned to 1 simultaneously: reduced
// with unit pivots so every right-hand side stays reachable.
fn gauge_fix_rows(support: &Support, n: u64) -> Vec<usize> {
    let (d, _) = support.gauge_matrix(n);
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for i in 0..d.rows() {
        let mut row: Vec<u64> = (0..d.cols()).map(|j| d.get(i, j)).collect();
        for (piv, b) in &basis {
            let c = row[*piv];
            if c != 0 {
                for (x, y) in row.iter_mut().zip(b) {
                    *x = (*x + (n - c) * y) % n;
                }
            }
        }
        if let Some(piv) = (0..row.len()).find(|&j| inv_mod(row[j], n).is_some()) {
            let k = inv_mod(row[piv], n).expect("unit pivot");
            for x in row.iter_mut() {
                *x = *x * k % n;
            }
            for (_, b) in basis.iter_mut() {
                let c = b[piv];
                if c != 0 {
                    for (x, y) in b.iter_mut().zip(&row) {
                        *x = (*x + (n - c) * y) % n;
                    }
                }
            }
            basis.push((piv, row));
            chosen.push(i);
        }
    }
    chosen
}

struct Plan {
    support: Arc<Support>,
    field: Arc<Field>,
    free: Vec<usize>,
    // Instances touching each coefficient index.
    touching: Vec<Vec<usize>>,
    // Free coefficient indices per instance.
    inst_vars: Vec<Vec<usize>>,
}

impl Plan {
    fn eval(&self, inst: usize, vals: &[Fp]) -> bool {
        let pi = &self.support.pentagons()[inst];
        let zero = self.field.zero();
        let lhs = pi.lhs.map_or(zero, |(a, b)| vals[a] * vals[b]);
        let rhs = pi
            .rhs
            .iter()
            .fold(zero, |acc, &(a, b, c)| acc + vals[a] * vals[b] * vals[c]);
        lhs == rhs
    }
}

struct State {
    vals: Vec<Fp>,
    known: Vec<bool>,
    trail: Vec<usize>,
}

impl State {
    fn assign(&mut self, i: usize, v: Fp) {
        self.vals[i] = v;
        self.known[i] = true;
        self.trail.push(i);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let i = self.trail.pop().expect("trail entry");
            self.known[i] = false;
        }
    }
}

// Checks instances touched by the queue, forcing any variable that is the
// sole unknown of an instance with exactly one admissible value.
fn propagate(plan: &Plan, st: &mut State, mut queue: Vec<usize>) -> bool {
    let units: Vec<Fp> = plan.field.units().collect();
    while let Some(i) = queue.pop() {
        for &inst in &plan.touching[i] {
            let mut unknown = None;
            let mut count = 0;
            for &v in &plan.inst_vars[inst] {
                if !st.known[v] {
                    if unknown != Some(v) {
                        count += 1;
                    }
                    unknown = Some(v);
                }
            }
            match count {
                0 => {
                    if !plan.eval(inst, &st.vals) {
                        return false;
                    }
                }
                1 => {
                    let v = unknown.expect("one unknown");
                    let mut hit = None;
                    let mut many = false;
                    for &c in &units {
                        st.vals[v] = c;
                        if plan.eval(inst, &st.vals) {
                            if hit.is_some() {
                                many = true;
                                break;
                            }
                            hit = Some(c);
                        }
                    }
                    match (hit, many) {
                        (None, _) => return false,
                        (Some(c), false) => {
                            st.assign(v, c);
                            queue.push(v);
                        }
                        _ => {}
                    }
                }
                _ => {}
            }
        }
    }
    true
}

type Found = HashMap<Vec<u64>, (Vec<u32>, u64)>;

fn record(plan: &Plan, key_of: &dyn Fn(&[Fp]) -> Vec<u64>, vals: &[Fp], found: &mut Found) {
    let f = FusionSystem {
        support: plan.support.clone(),
        field: plan.field.clone(),
        values: vals.to_vec(),
    };
    if !f.verify().passed() {
        return;
    }
    let raw: Vec<u32> = vals.iter().map(|v| v.value()).collect();
    let entry = found.entry(key_of(vals)).or_insert((raw.clone(), 0));
    entry.1 += 1;
    if raw < entry.0 {
        entry.0 = raw;
    }
}

fn dfs(plan: &Plan, st: &mut State, key_of: &dyn Fn(&[Fp]) -> Vec<u64>, found: &mut Found) {
    let next = plan.free.iter().copied().find(|&v| !st.known[v]);
    let Some(v) = next else {
        record(plan, key_of, &st.vals, found);
        return;
    };
    let units: Vec<Fp> = plan.field.units().collect();
    for c in units {
        let mark = st.trail.len();
        st.assign(v, c);
        if propagate(plan, st, vec![v]) {
            dfs(plan, st, key_of, found);
        }
        st.undo(mark);
    }
}

/// `log2` of the number of raw assignments left after normalization.
pub fn search_bits(support: &Support, field: &Field) -> f64 {
    let n = field.unit_order() as u64;
    let fixed = gauge_fix_rows(support, n).len();
    let unit = support
        .sextuples()
        .iter()
        .filter(|s| support.has_unit_leg(s))
        .count();
    let free = support.len() - unit - fixed;
    free as f64 * (n as f64).log2()
}

/// All fusion systems on `support` over `field`, one representative per
/// gauge class. Coefficients with a unit leg are pinned to 1 and a maximal
/// independent set of gauge directions is fixed before the search.
pub fn enumerate_bruteforce(
    support: Arc<Support>,
    field: Arc<Field>,
    budget_bits: f64,
) -> Result<BruteForceReport> {
    let n = field.unit_order() as u64;
    let total = support.len();
    let is_unit: Vec<bool> = support
        .sextuples()
        .iter()
        .map(|s| support.has_unit_leg(s))
        .collect();
    let fixed_rows = gauge_fix_rows(&support, n);
    let mut pinned = is_unit.clone();
    for &i in &fixed_rows {
        pinned[i] = true;
    }
    let mut free: Vec<usize> = (0..total).filter(|&i| !pinned[i]).collect();
    let bits = free.len() as f64 * (n as f64).log2();
    if bits > budget_bits {
        return Err(Error::Resource(format!(
            "search space of {bits:.1} bits exceeds the budget of {budget_bits:.1} bits"
        )));
    }

    let mut touching = vec![Vec::new(); total];
    let mut inst_vars = Vec::with_capacity(support.pentagons().len());
    for (k, pi) in support.pentagons().iter().enumerate() {
        let mut vars: Vec<usize> = pi
            .lhs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain(pi.rhs.iter().flat_map(|&(a, b, c)| [a, b, c]))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        for &v in &vars {
            touching[v].push(k);
        }
        vars.retain(|&v| !pinned[v]);
        inst_vars.push(vars);
    }
    // Most constrained coefficients first.
    free.sort_by_key(|&v| (std::cmp::Reverse(touching[v].len()), v));

    let plan = Plan {
        support: support.clone(),
        field: field.clone(),
        free,
        touching,
        inst_vars,
    };

    let (d, _) = support.gauge_matrix(n);
    let sm = smith(&d, true);
    let fld = field.clone();
    let key_of = move |vals: &[Fp]| {
        let logs: Vec<u64> = vals.iter().map(|&v| fld.log_unit(v)).collect();
        sm.coset_key(&logs)
    };

    let mut report = BruteForceReport {
        p: field.p(),
        admissible: total,
        unit_fixed: is_unit.iter().filter(|&&b| b).count(),
        gauge_fixed: fixed_rows.len(),
        free: plan.free.len(),
        search_bits: bits,
        solutions: 0,
        classes: Vec::new(),
    };

    let mut base = State {
        vals: vec![field.one(); total],
        known: pinned.clone(),
        trail: Vec::new(),
    };
    // Instances without free coefficients are settled up front.
    let all: Vec<usize> = (0..total).filter(|&i| pinned[i]).collect();
    if !propagate(&plan, &mut base, all) {
        return Ok(report);
    }

    let found: Found = match plan.free.iter().copied().find(|&v| !base.known[v]) {
        None => {
            let mut found = Found::new();
            record(&plan, &key_of, &base.vals, &mut found);
            found
        }
        Some(v) => {
            let units: Vec<Fp> = field.units().collect();
            units
                .par_iter()
                .map(|&c| {
                    let mut st = State {
                        vals: base.vals.clone(),
                        known: base.known.clone(),
                        trail: Vec::new(),
                    };
                    let mut found = Found::new();
                    st.assign(v, c);
                    if propagate(&plan, &mut st, vec![v]) {
                        dfs(&plan, &mut st, &key_of, &mut found);
                    }
                    found
                })
                .reduce(Found::new, |mut a, b| {
                    for (k, (raw, cnt)) in b {
                        let entry = a.entry(k).or_insert((raw.clone(), 0));
                        entry.1 += cnt;
                        if raw < entry.0 {
                            entry.0 = raw;
                        }
                    }
                    a
                })
        }
    };

    let mut reps: Vec<Vec<u32>> = Vec::new();
    for (_, (raw, cnt)) in found {
        report.solutions += cnt;
        reps.push(raw);
    }
    reps.sort();
    let p = field.p();
    report.classes = reps
        .into_iter()
        .map(|raw| FusionSystem {
            support: support.clone(),
            field: field.clone(),
            values: raw.into_iter().map(|v| Fp::new(v as u64, p)).collect(),
        })
        .collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic;

    fn run(rule: &crate::FusionRule, p: u32) -> BruteForceReport {
        let s = Support::new(rule).unwrap();
        let k = Arc::new(Field::new(p).unwrap());
        enumerate_bruteforce(s, k, DEFAULT_BUDGET_BITS).unwrap()
    }

    #[test]
    fn cyclic_two_classes() {
        let z2 = cyclic(2).to_fusion_rule();
        assert_eq!(run(&z2, 5).class_count(), 2);
        assert_eq!(run(&z2, 3).class_count(), 2);
        assert_eq!(run(&z2, 2).class_count(), 1);
    }

    #[test]
    fn cyclic_three_classes() {
        let z3 = cyclic(3).to_fusion_rule();
        // Z/3 in GF(7)^* gives all three classes, GF(5)^* has no 3-torsion.
        assert_eq!(run(&z3, 7).class_count(), 3);
        assert_eq!(run(&z3, 5).class_count(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let z3 = cyclic(3).to_fusion_rule();
        let s = Support::new(&z3).unwrap();
        let k = Arc::new(Field::new(7).unwrap());
        assert!(matches!(
            enumerate_bruteforce(s, k, 0.5),
            Err(Error::Resource(_))
        ));
    }
}
