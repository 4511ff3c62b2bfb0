//! Fusion systems on multiplicity-free rules: admissible sextuples,
//! recoupling matrices, axiom verification and gauge transformations.

mod search;

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::multimagma::FusionRule;
use crate::report::{AxiomCheck, AxiomReport};
use crate::scalars::{Field, Fp};
use crate::zn::{self, ZnMatrix};

pub use search::{enumerate_bruteforce, search_bits, BruteForceReport, DEFAULT_BUDGET_BITS};

/// `(x, y, z, u, r, v)`: `u ∈ xy`, `v ∈ yz`, `r ∈ uz ∩ xv`.
pub type Sextuple = [usize; 6];

/// `(x, y, r)` with `r ∈ xy`.
pub type Triple = [usize; 3];

/// One pentagon instance `P^{wxyz}_{purvq}` compiled to coefficient indices.
#[derive(Clone, Debug)]
pub struct PentagonInstance {
    /// `[w, x, y, z, p, u, r, v, q]`.
    pub labels: [usize; 9],
    /// `f^{wxq}_{prv}` and `f^{pyz}_{urq}`, absent when `r ∉ pq`.
    pub lhs: Option<(usize, usize)>,
    /// `f^{xyz}_{svq} f^{wsz}_{urv} f^{wxy}_{pus}` for each admissible `s`.
    pub rhs: Vec<(usize, usize, usize)>,
}

/// Admissible sextuples and triples of a rule, with the compiled pentagon.
#[derive(Debug)]
pub struct Support {
    rule: FusionRule,
    sextuples: Vec<Sextuple>,
    index: HashMap<Sextuple, usize>,
    triples: Vec<Triple>,
    triple_index: HashMap<Triple, usize>,
    pentagons: Vec<PentagonInstance>,
}

impl Support {
    pub fn new(rule: &FusionRule) -> Result<Arc<Support>> {
        if !rule.is_multiplicity_free() {
            return Err(Error::Unsupported(
                "fusion systems are only defined on multiplicity-free rules".into(),
            ));
        }
        let n = rule.len();
        let mut sextuples = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for u in rule.fuse(x, y).support() {
                        for v in rule.fuse(y, z).support() {
                            for r in rule.fuse(u, z).support() {
                                if rule.fuse(x, v).contains(r) {
                                    sextuples.push([x, y, z, u, r, v]);
                                }
                            }
                        }
                    }
                }
            }
        }
        let index = sextuples.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut triples = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for r in rule.fuse(x, y).support() {
                    triples.push([x, y, r]);
                }
            }
        }
        let triple_index = triples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let mut support = Support {
            rule: rule.clone(),
            sextuples,
            index,
            triples,
            triple_index,
            pentagons: Vec::new(),
        };
        support.pentagons = support.compile_pentagons();
        Ok(Arc::new(support))
    }

    fn compile_pentagons(&self) -> Vec<PentagonInstance> {
        let l = &self.rule;
        let n = l.len();
        let mut out = Vec::new();
        for w in 0..n {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        for p in l.fuse(w, x).support() {
                            for q in l.fuse(y, z).support() {
                                for u in l.fuse(p, y).support() {
                                    for v in l.fuse(x, q).support() {
                                        for r in l.fuse(u, z).support() {
                                            if !l.fuse(w, v).contains(r) {
                                                continue;
                                            }
                                            let lhs = self
                                                .idx(&[w, x, q, p, r, v])
                                                .zip(self.idx(&[p, y, z, u, r, q]));
                                            let rhs = l
                                                .fuse(x, y)
                                                .support()
                                                .filter_map(|s| {
                                                    Some((
                                                        self.idx(&[x, y, z, s, v, q])?,
                                                        self.idx(&[w, s, z, u, r, v])?,
                                                        self.idx(&[w, x, y, p, u, s])?,
                                                    ))
                                                })
                                                .collect();
                                            out.push(PentagonInstance {
                                                labels: [w, x, y, z, p, u, r, v, q],
                                                lhs,
                                                rhs,
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn rule(&self) -> &FusionRule {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.sextuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sextuples.is_empty()
    }

    pub fn sextuples(&self) -> &[Sextuple] {
        &self.sextuples
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn pentagons(&self) -> &[PentagonInstance] {
        &self.pentagons
    }

    #[inline]
    pub fn idx(&self, s: &Sextuple) -> Option<usize> {
        self.index.get(s).copied()
    }

    #[inline]
    pub fn triple_idx(&self, t: &Triple) -> Option<usize> {
        self.triple_index.get(t).copied()
    }

    /// Row indices `v` and column indices `u` of `F^{xyz}_r`.
    pub fn matrix_shape(&self, x: usize, y: usize, z: usize, r: usize) -> (Vec<usize>, Vec<usize>) {
        let l = &self.rule;
        let rows = l
            .fuse(y, z)
            .support()
            .filter(|&v| l.fuse(x, v).contains(r))
            .collect();
        let cols = l
            .fuse(x, y)
            .support()
            .filter(|&u| l.fuse(u, z).contains(r))
            .collect();
        (rows, cols)
    }

    pub(crate) fn has_unit_leg(&self, s: &Sextuple) -> bool {
        let e = self.rule.unit();
        s[0] == e || s[1] == e || s[2] == e
    }

    /// Linear action of normalized gauges on exponent coordinates: column
    /// `j` is the change of every `log f` when `log ξ` of the `j`-th
    /// non-unit triple grows by one.
    pub fn gauge_matrix(&self, modulus: u64) -> (ZnMatrix, Vec<usize>) {
        let e = self.rule.unit();
        let cols: Vec<usize> = (0..self.triples.len())
            .filter(|&t| self.triples[t][0] != e && self.triples[t][1] != e)
            .collect();
        let mut col_of = vec![usize::MAX; self.triples.len()];
        for (j, &t) in cols.iter().enumerate() {
            col_of[t] = j;
        }
        let mut d = ZnMatrix::zeros(self.sextuples.len(), cols.len(), modulus);
        for (i, &[x, y, z, u, r, v]) in self.sextuples.iter().enumerate() {
            let mut bump = |t: Triple, sign: i64| {
                let c = col_of[self.triple_idx(&t).expect("admissible triple")];
                if c != usize::MAX {
                    d.add_signed(i, c, sign);
                }
            };
            // log f~ = log f + ξ^{yz}_v + ξ^{xv}_r - ξ^{xy}_u - ξ^{uz}_r
            bump([y, z, v], 1);
            bump([x, v, r], 1);
            bump([x, y, u], -1);
            bump([u, z, r], -1);
        }
        (d, cols)
    }
}

/// Dense square matrix over GF(p) with its row (`v`) and column (`u`) labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecouplingMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub entries: Vec<Vec<Fp>>,
}

impl RecouplingMatrix {
    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn inverse(&self) -> Option<Vec<Vec<Fp>>> {
        if !self.is_square() {
            return None;
        }
        invert(&self.entries)
    }
}

/// Gauss-Jordan inverse over GF(p); `None` when singular.
pub fn invert(m: &[Vec<Fp>]) -> Option<Vec<Vec<Fp>>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let p = m[0][0].modulus();
    let mut a: Vec<Vec<Fp>> = m.to_vec();
    let mut inv: Vec<Vec<Fp>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Fp::one(p) } else { Fp::zero(p) })
                .collect()
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        inv.swap(c, piv);
        let k = a[c][c].inv();
        for j in 0..n {
            a[c][j] = a[c][j] * k;
            inv[c][j] = inv[c][j] * k;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for j in 0..n {
                    let t = a[c][j];
                    a[r][j] = a[r][j] - f * t;
                    let t = inv[c][j];
                    inv[r][j] = inv[r][j] - f * t;
                }
            }
        }
    }
    Some(inv)
}

pub fn mat_mul(a: &[Vec<Fp>], b: &[Vec<Fp>]) -> Vec<Vec<Fp>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let p = a[0][0].modulus();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).fold(Fp::zero(p), |acc, k| acc + a[i][k] * b[k][j]))
                .collect()
        })
        .collect()
}

/// Coefficients on the admissible sextuples of a multiplicity-free rule.
#[derive(Clone, Debug)]
pub struct FusionSystem {
    support: Arc<Support>,
    field: Arc<Field>,
    values: Vec<Fp>,
}

impl PartialEq for FusionSystem {
    fn eq(&self, other: &Self) -> bool {
        self.field.p() == other.field.p()
            && self.support.rule == other.support.rule
            && self.values == other.values
    }
}

impl Eq for FusionSystem {}

impl FusionSystem {
    /// Builds a system from values listed in sextuple order.
    pub fn from_values(support: Arc<Support>, field: Arc<Field>, values: Vec<Fp>) -> Result<Self> {
        if values.len() != support.len() {
            return invalid(format!(
                "expected {} coefficients, got {}",
                support.len(),
                values.len()
            ));
        }
        if values.iter().any(|v| v.modulus() != field.p()) {
            return invalid("coefficient modulus does not match the field");
        }
        Ok(FusionSystem {
            support,
            field,
            values,
        })
    }

    pub fn from_fn(support: Arc<Support>, field: Arc<Field>, f: impl Fn(&Sextuple) -> Fp) -> Self {
        let values = support.sextuples.iter().map(f).collect();
        FusionSystem {
            support,
            field,
            values,
        }
    }

    /// Builds a system from an explicit map; every admissible sextuple must
    /// be present and nothing else may be nonzero.
    pub fn from_map(
        support: Arc<Support>,
        field: Arc<Field>,
        coeffs: &HashMap<Sextuple, Fp>,
    ) -> Result<Self> {
        for (s, v) in coeffs {
            if support.idx(s).is_none() && !v.is_zero() {
                return invalid(format!(
                    "nonzero coefficient on inadmissible sextuple {s:?}"
                ));
            }
        }
        let mut values = Vec::with_capacity(support.len());
        for s in &support.sextuples {
            match coeffs.get(s) {
                Some(v) => values.push(*v),
                None => {
                    return invalid(format!("missing coefficient for admissible sextuple {s:?}"))
                }
            }
        }
        Self::from_values(support, field, values)
    }

    /// Every admissible coefficient equal to one.
    pub fn trivial(support: Arc<Support>, field: Arc<Field>) -> Self {
        let one = field.one();
        Self::from_fn(support, field, |_| one)
    }

    pub fn support(&self) -> &Arc<Support> {
        &self.support
    }

    pub fn rule(&self) -> &FusionRule {
        &self.support.rule
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn values(&self) -> &[Fp] {
        &self.values
    }

    /// `f^{xyz}_{urv}`, zero off the admissible support.
    pub fn get(&self, s: &Sextuple) -> Fp {
        self.support
            .idx(s)
            .map_or_else(|| self.field.zero(), |i| self.values[i])
    }

    /// Coefficient at an admissible sextuple; panics otherwise.
    #[inline]
    pub fn at(&self, s: Sextuple) -> Fp {
        self.values[self
            .support
            .idx(&s)
            .unwrap_or_else(|| panic!("inadmissible sextuple {s:?}"))]
    }

    pub fn set(&mut self, s: &Sextuple, v: Fp) -> Result<()> {
        let i = self
            .support
            .idx(s)
            .ok_or_else(|| Error::Domain(format!("inadmissible sextuple {s:?}")))?;
        self.values[i] = v;
        Ok(())
    }

    /// `F^{xyz}_r = (f^{xyz}_{urv})_{v,u}`.
    pub fn recoupling_matrix(&self, x: usize, y: usize, z: usize, r: usize) -> RecouplingMatrix {
        let (rows, cols) = self.support.matrix_shape(x, y, z, r);
        let entries = rows
            .iter()
            .map(|&v| {
                cols.iter()
                    .map(|&u| self.get(&[x, y, z, u, r, v]))
                    .collect()
            })
            .collect();
        RecouplingMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Admissibility, invertibility, pentagon, triangle and rigidity, plus
    /// `f^{1xy}_{xrr} = f^{xy1}_{rry} = 1`.
    pub fn verify(&self) -> AxiomReport {
        let l = self.rule();
        let n = l.len();
        let e = l.unit();
        let mut admissible = AxiomCheck::new("admissibility");
        for (i, s) in self.support.sextuples.iter().enumerate() {
            admissible.record(!self.values[i].is_zero(), || s.to_vec());
        }

        let mut invertible = AxiomCheck::new("invertibility");
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for r in 0..n {
                        let m = self.recoupling_matrix(x, y, z, r);
                        if m.rows.is_empty() && m.cols.is_empty() {
                            continue;
                        }
                        invertible.record(m.inverse().is_some(), || vec![x, y, z, r]);
                    }
                }
            }
        }

        let pentagon = self.check_pentagons();

        let one = self.field.one();
        let mut triangle = AxiomCheck::new("triangle");
        for x in 0..n {
            for y in 0..n {
                for r in l.fuse(x, y).support() {
                    let m = self.recoupling_matrix(x, e, y, r);
                    let ok = m.rows == [y] && m.cols == [x] && m.entries[0][0] == one;
                    triangle.record(ok, || vec![x, y, r]);
                }
            }
        }

        let mut rigidity = AxiomCheck::new("rigidity");
        for r in 0..n {
            let rb = l.dual(r);
            let lhs = self.get(&[r, rb, r, e, r, e]);
            let m = self.recoupling_matrix(rb, r, rb, rb);
            let ok = m.inverse().is_some_and(|inv| {
                // Inverse rows are indexed by u, columns by v.
                let i = m.cols.iter().position(|&u| u == e);
                let j = m.rows.iter().position(|&v| v == e);
                match (i, j) {
                    (Some(i), Some(j)) => inv[i][j] == lhs && !lhs.is_zero(),
                    _ => false,
                }
            });
            rigidity.record(ok, || vec![r]);
        }

        let mut unit_legs = AxiomCheck::new("unit-leg-identity");
        for x in 0..n {
            for y in 0..n {
                for r in l.fuse(x, y).support() {
                    let top = self.recoupling_matrix(e, x, y, r);
                    let bottom = self.recoupling_matrix(x, y, e, r);
                    unit_legs.record(is_unit_entry(&top, one), || vec![e, x, y, r]);
                    unit_legs.record(is_unit_entry(&bottom, one), || vec![x, y, e, r]);
                }
            }
        }

        AxiomReport {
            checks: vec![
                admissible, invertible, pentagon, triangle, rigidity, unit_legs,
            ],
        }
    }

    fn check_pentagons(&self) -> AxiomCheck {
        let zero = self.field.zero();
        let v = &self.values;
        let chunks: Vec<AxiomCheck> = self
            .support
            .pentagons
            .par_chunks(4096)
            .map(|chunk| {
                let mut c = AxiomCheck::new("pentagon");
                for inst in chunk {
                    let lhs = inst.lhs.map_or(zero, |(a, b)| v[a] * v[b]);
                    let rhs = inst
                        .rhs
                        .iter()
                        .fold(zero, |acc, &(a, b, d)| acc + v[a] * v[b] * v[d]);
                    c.record(lhs == rhs, || inst.labels.to_vec());
                }
                c
            })
            .collect();
        let mut out = AxiomCheck::new("pentagon");
        for c in chunks {
            out.merge(c);
        }
        out
    }

    /// `f~` from the rectangle axiom
    /// `f^{xyz}_{urv} ξ^{yz}_v ξ^{xv}_r = ξ^{xy}_u ξ^{uz}_r f~^{xyz}_{urv}`.
    pub fn apply_gauge(&self, xi: &GaugeXi) -> Result<FusionSystem> {
        if !Arc::ptr_eq(&xi.support, &self.support) && xi.support.rule != self.support.rule {
            return Err(Error::Domain("gauge belongs to a different rule".into()));
        }
        if xi.values.iter().any(|v| v.is_zero()) {
            return Err(Error::Domain("gauge values must be nonzero".into()));
        }
        if !xi.is_normalized() {
            return Err(Error::Domain("gauge must be normalized".into()));
        }
        let x = |t: Triple| xi.values[self.support.triple_idx(&t).expect("admissible triple")];
        let values = self
            .support
            .sextuples
            .iter()
            .zip(&self.values)
            .map(|(&[a, b, c, u, r, v], &f)| {
                f * x([b, c, v]) * x([a, v, r]) / (x([a, b, u]) * x([u, c, r]))
            })
            .collect();
        Ok(FusionSystem {
            support: self.support.clone(),
            field: self.field.clone(),
            values,
        })
    }

    /// A normalized gauge from `self` to `other`, found by solving the
    /// rectangle relations as a linear system in exponent coordinates.
    pub fn gauge_to(&self, other: &FusionSystem) -> Option<GaugeXi> {
        if self.support.rule != other.support.rule || self.field.p() != other.field.p() {
            return None;
        }
        if self.values.iter().chain(&other.values).any(|v| v.is_zero()) {
            return None;
        }
        let nmod = self.field.unit_order() as u64;
        let (d, cols) = self.support.gauge_matrix(nmod);
        let b: Vec<u64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&f, &g)| (self.field.log_unit(g) + nmod - self.field.log_unit(f)) % nmod)
            .collect();
        let lambda = zn::solve(&d, &b)?;
        let mut xi = GaugeXi::identity(self.support.clone(), self.field.clone());
        for (j, &t) in cols.iter().enumerate() {
            xi.values[t] = self.field.exp_u64(lambda[j]);
        }
        Some(xi)
    }

    pub fn is_gauge_equivalent(&self, other: &FusionSystem) -> bool {
        self.gauge_to(other).is_some()
    }

    /// Discrete logs of all coefficients; `None` if any is zero.
    pub fn log_vector(&self) -> Option<Vec<u64>> {
        self.values
            .iter()
            .map(|&v| (!v.is_zero()).then(|| self.field.log_unit(v)))
            .collect()
    }
}

// A unit leg leaves a single basis vector on each side.
fn is_unit_entry(m: &RecouplingMatrix, one: Fp) -> bool {
    m.rows.len() == 1 && m.cols.len() == 1 && m.entries[0][0] == one
}

/// Gauge values `ξ^{xy}_r` on the admissible triples.
#[derive(Clone, Debug)]
pub struct GaugeXi {
    support: Arc<Support>,
    field: Arc<Field>,
    values: Vec<Fp>,
}

impl PartialEq for GaugeXi {
    fn eq(&self, other: &Self) -> bool {
        self.support.rule == other.support.rule && self.values == other.values
    }
}

impl GaugeXi {
    pub fn identity(support: Arc<Support>, field: Arc<Field>) -> Self {
        let values = vec![field.one(); support.triples.len()];
        GaugeXi {
            support,
            field,
            values,
        }
    }

    pub fn from_fn(support: Arc<Support>, field: Arc<Field>, f: impl Fn(&Triple) -> Fp) -> Self {
        let values = support.triples.iter().map(f).collect();
        GaugeXi {
            support,
            field,
            values,
        }
    }

    pub fn from_map(
        support: Arc<Support>,
        field: Arc<Field>,
        map: &HashMap<Triple, Fp>,
    ) -> Result<Self> {
        for t in map.keys() {
            if support.triple_idx(t).is_none() {
                return invalid(format!("gauge value on inadmissible triple {t:?}"));
            }
        }
        let one = field.one();
        Ok(Self::from_fn(support, field, |t| {
            map.get(t).copied().unwrap_or(one)
        }))
    }

    pub fn support(&self) -> &Arc<Support> {
        &self.support
    }

    pub fn values(&self) -> &[Fp] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize, r: usize) -> Fp {
        self.support
            .triple_idx(&[x, y, r])
            .map_or_else(|| self.field.zero(), |i| self.values[i])
    }

    pub fn set(&mut self, x: usize, y: usize, r: usize, v: Fp) -> Result<()> {
        let i = self
            .support
            .triple_idx(&[x, y, r])
            .ok_or_else(|| Error::Domain("inadmissible gauge triple".into()))?;
        self.values[i] = v;
        Ok(())
    }

    /// `ξ^{1r}_r = ξ^{r1}_r = 1`.
    pub fn is_normalized(&self) -> bool {
        let e = self.support.rule.unit();
        let one = self.field.one();
        self.support
            .triples
            .iter()
            .zip(&self.values)
            .all(|(t, &v)| (t[0] != e && t[1] != e) || v == one)
    }

    /// Pointwise product; applying it equals applying both gauges in turn.
    pub fn compose(&self, other: &GaugeXi) -> GaugeXi {
        GaugeXi {
            support: self.support.clone(),
            field: self.field.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a * b)
                .collect(),
        }
    }

    pub fn inverse(&self) -> GaugeXi {
        GaugeXi {
            support: self.support.clone(),
            field: self.field.clone(),
            values: self.values.iter().map(|v| v.inv()).collect(),
        }
    }
}

/// Admissible sextuples of `rule` (errors on multiplicities).
pub fn admissible_sextuples(rule: &FusionRule) -> Result<Vec<Sextuple>> {
    Ok(Support::new(rule)?.sextuples.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feudal::{moore_read, tambara_yamagami};
    use crate::group::cyclic;

    fn field(p: u32) -> Arc<Field> {
        Arc::new(Field::new(p).unwrap())
    }

    // Independent count: brute force over L^6 against the definition.
    fn count_admissible(rule: &FusionRule) -> usize {
        let n = rule.len();
        let mut c = 0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for u in 0..n {
                        for r in 0..n {
                            for v in 0..n {
                                if rule.fuse(x, y).contains(u)
                                    && rule.fuse(y, z).contains(v)
                                    && rule.fuse(u, z).contains(r)
                                    && rule.fuse(x, v).contains(r)
                                {
                                    c += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        c
    }

    #[test]
    fn admissible_counts() {
        let z2 = cyclic(2).to_fusion_rule();
        assert_eq!(admissible_sextuples(&z2).unwrap().len(), 8);
        let ty = tambara_yamagami(&cyclic(2));
        assert_eq!(
            admissible_sextuples(ty.rule()).unwrap().len(),
            count_admissible(ty.rule())
        );
        let mr = moore_read();
        assert_eq!(
            admissible_sextuples(mr.rule()).unwrap().len(),
            count_admissible(mr.rule())
        );
    }

    #[test]
    fn trivial_system_on_z2_passes() {
        let z2 = cyclic(2).to_fusion_rule();
        let s = Support::new(&z2).unwrap();
        let f = FusionSystem::trivial(s, field(5));
        let r = f.verify();
        assert!(r.passed(), "{:?}", r.failed_axioms());
    }

    #[test]
    fn non_cocycle_fails_pentagon() {
        let z2 = cyclic(2).to_fusion_rule();
        let s = Support::new(&z2).unwrap();
        let k = field(5);
        let mut f = FusionSystem::trivial(s, k.clone());
        f.set(&[1, 1, 1, 0, 1, 0], k.elem(2)).unwrap();
        let report = f.verify();
        assert!(!report.get("pentagon").unwrap().passed);
        // (a,a,a,a) is among the failing quadruples.
        assert!(report
            .get("pentagon")
            .unwrap()
            .failures
            .iter()
            .any(|w| w[..4] == [1, 1, 1, 1]));
    }

    #[test]
    fn z2_sign_cocycle_passes() {
        let z2 = cyclic(2).to_fusion_rule();
        let s = Support::new(&z2).unwrap();
        let k = field(5);
        let mut f = FusionSystem::trivial(s, k.clone());
        f.set(&[1, 1, 1, 0, 1, 0], k.elem(4)).unwrap();
        assert!(f.verify().passed());
    }

    #[test]
    fn recoupling_shapes() {
        let ty = tambara_yamagami(&cyclic(2));
        let s = Support::new(ty.rule()).unwrap();
        let f = FusionSystem::trivial(s, field(17));
        assert_eq!(f.recoupling_matrix(2, 2, 2, 2).dim(), 2);
        let mr = moore_read();
        let s = Support::new(mr.rule()).unwrap();
        let f = FusionSystem::trivial(s, field(17));
        for r in 0..6 {
            let m = f.recoupling_matrix(4, 5, 4, r);
            assert!(m.dim() == 0 || m.dim() == 2);
        }
    }

    #[test]
    fn gauge_identity_and_inverse() {
        let z2 = cyclic(2).to_fusion_rule();
        let s = Support::new(&z2).unwrap();
        let k = field(5);
        let mut f = FusionSystem::trivial(s.clone(), k.clone());
        f.set(&[1, 1, 1, 0, 1, 0], k.elem(4)).unwrap();
        let id = GaugeXi::identity(s.clone(), k.clone());
        assert_eq!(f.apply_gauge(&id).unwrap(), f);
        let mut xi = id.clone();
        xi.set(1, 1, 0, k.elem(3)).unwrap();
        let g = f.apply_gauge(&xi).unwrap();
        assert_eq!(g.apply_gauge(&xi.inverse()).unwrap(), f);
        assert!(f.is_gauge_equivalent(&g));
        let found = f.gauge_to(&g).unwrap();
        assert_eq!(f.apply_gauge(&found).unwrap(), g);
    }

    #[test]
    fn matrix_inverse() {
        let k = field(17);
        let m = vec![vec![k.elem(1), k.elem(2)], vec![k.elem(3), k.elem(4)]];
        let inv = invert(&m).unwrap();
        let id = mat_mul(&m, &inv);
        assert_eq!(id[0][0], k.one());
        assert_eq!(id[0][1], k.zero());
        let singular = vec![vec![k.elem(1), k.elem(2)], vec![k.elem(2), k.elem(4)]];
        assert!(invert(&singular).is_none());
    }
}
