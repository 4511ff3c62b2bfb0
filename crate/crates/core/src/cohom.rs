//! Group cochains, left and right coboundaries, and third cohomology with
//! coefficients in `F^×` computed in exponent coordinates over `Z/(p-1)`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fsys::{FusionSystem, Support};
use crate::group::FiniteGroup;
use crate::scalars::{Field, Fp};
use crate::uber::{h3_count_via_uber, Ambi};
use crate::zn::{quotient, smith, solve, ZnMatrix};

pub const MAX_GROUP_ORDER: usize = 8;
pub const MAX_P: u32 = 257;

/// A module over a group acting on both sides.
pub trait Bimodule {
    type Elem: Clone + PartialEq + Debug;
    fn one(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Self::Elem;
    /// `ᵃx`.
    fn left(&self, a: usize, x: &Self::Elem) -> Self::Elem;
    /// `xᵇ`.
    fn right(&self, x: &Self::Elem, b: usize) -> Self::Elem;
    fn is_trivial(&self) -> bool;
}

impl Bimodule for Field {
    type Elem = Fp;
    fn one(&self) -> Fp {
        Field::one(self)
    }
    fn mul(&self, x: &Fp, y: &Fp) -> Fp {
        *x * *y
    }
    fn inv(&self, x: &Fp) -> Fp {
        x.inv()
    }
    fn left(&self, _: usize, x: &Fp) -> Fp {
        *x
    }
    fn right(&self, x: &Fp, _: usize) -> Fp {
        *x
    }
    fn is_trivial(&self) -> bool {
        true
    }
}

/// Functions from lords to `F^×`, with `ᵃμ(m) = μ(ā m)` and `μᵇ(m) = μ(m b̄)`.
#[derive(Clone, Debug)]
pub struct LordFunctions {
    pub ambi: Arc<Ambi>,
    pub field: Arc<Field>,
}

impl Bimodule for LordFunctions {
    type Elem = Vec<Fp>;
    fn one(&self) -> Vec<Fp> {
        vec![self.field.one(); self.ambi.lord_count()]
    }
    fn mul(&self, x: &Vec<Fp>, y: &Vec<Fp>) -> Vec<Fp> {
        x.iter().zip(y).map(|(&a, &b)| a * b).collect()
    }
    fn inv(&self, x: &Vec<Fp>) -> Vec<Fp> {
        x.iter().map(|v| v.inv()).collect()
    }
    fn left(&self, a: usize, x: &Vec<Fp>) -> Vec<Fp> {
        self.ambi.twist(x, a, self.ambi.unit())
    }
    fn right(&self, x: &Vec<Fp>, b: usize) -> Vec<Fp> {
        self.ambi.twist(x, self.ambi.unit(), b)
    }
    fn is_trivial(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A map `Gⁿ → U`, stored with the first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain<V> {
    degree: usize,
    order: usize,
    values: Vec<V>,
}

fn index(order: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * order + a)
}

fn tuples(order: usize, degree: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = order.pow(degree as u32);
    (0..total).map(move |mut i| {
        let mut t = vec![0; degree];
        for slot in t.iter_mut().rev() {
            *slot = i % order;
            i /= order;
        }
        t
    })
}

impl<V: Clone> Cochain<V> {
    pub fn from_fn(degree: usize, order: usize, f: impl Fn(&[usize]) -> V) -> Self {
        let values = tuples(order, degree).map(|t| f(&t)).collect();
        Cochain {
            degree,
            order,
            values,
        }
    }

    pub fn from_values(degree: usize, order: usize, values: Vec<V>) -> Result<Self> {
        if values.len() != order.pow(degree as u32) {
            return invalid(format!(
                "a degree-{degree} cochain on a group of order {order} needs {} values, got {}",
                order.pow(degree as u32),
                values.len()
            ));
        }
        Ok(Cochain {
            degree,
            order,
            values,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn get(&self, args: &[usize]) -> &V {
        assert_eq!(args.len(), self.degree, "wrong number of arguments");
        &self.values[index(self.order, args)]
    }
}

impl<V: Clone + PartialEq> Cochain<V> {
    /// `1` whenever some argument is the unit.
    pub fn is_normalized(&self, unit: usize, one: &V) -> bool {
        tuples(self.order, self.degree)
            .zip(&self.values)
            .all(|(t, v)| !t.contains(&unit) || v == one)
    }
}

impl Cochain<Fp> {
    /// Entries different from 1, keyed by comma-joined labels.
    pub fn table(&self, g: &FiniteGroup) -> BTreeMap<String, u32> {
        tuples(self.order, self.degree)
            .zip(&self.values)
            .filter(|(_, v)| v.value() != 1)
            .map(|(t, v)| {
                let key: Vec<&str> = t.iter().map(|&a| g.label(a)).collect();
                (key.join(","), v.value())
            })
            .collect()
    }
}

/// `δ̀h` or `δ́h`. For trivial actions both agree; the right operator in
/// degree 3 is only defined in that case.
pub fn coboundary<M: Bimodule>(
    g: &FiniteGroup,
    module: &M,
    h: &Cochain<M::Elem>,
    side: Side,
) -> Result<Cochain<M::Elem>> {
    let n = g.order();
    if h.order != n {
        return invalid(format!(
            "cochain is on a group of order {}, expected {n}",
            h.order
        ));
    }
    if !(1..=3).contains(&h.degree) {
        return invalid(format!(
            "coboundaries are defined in degrees 1 to 3, got {}",
            h.degree
        ));
    }
    let side = match (side, h.degree, module.is_trivial()) {
        (Side::Right, 3, true) => Side::Left,
        (Side::Right, 3, false) => {
            return Err(Error::Unsupported(
                "right coboundary in degree 3 needs a trivial action".into(),
            ))
        }
        (s, _, _) => s,
    };
    let out = Cochain::from_fn(h.degree + 1, n, |t| delta_at(g, module, h, side, t));
    if module.is_trivial() && side == Side::Right {
        debug_assert_eq!(
            out,
            Cochain::from_fn(h.degree + 1, n, |t| delta_at(g, module, h, Side::Left, t))
        );
    }
    Ok(out)
}

fn delta_at<M: Bimodule>(
    g: &FiniteGroup,
    m: &M,
    h: &Cochain<M::Elem>,
    side: Side,
    t: &[usize],
) -> M::Elem {
    let mul = |a, b| g.mul(a, b);
    let ratio = |num: [M::Elem; 3], den: [M::Elem; 2]| {
        let top = num.iter().fold(m.one(), |acc, x| m.mul(&acc, x));
        let bottom = m.mul(&den[0], &den[1]);
        m.mul(&top, &m.inv(&bottom))
    };
    match (h.degree, side) {
        (1, Side::Left) => {
            let (a, b) = (t[0], t[1]);
            ratio(
                [h.get(&[a]).clone(), m.left(a, h.get(&[b])), m.one()],
                [h.get(&[mul(a, b)]).clone(), m.one()],
            )
        }
        (1, Side::Right) => {
            let (a, b) = (t[0], t[1]);
            ratio(
                [m.right(h.get(&[a]), b), h.get(&[b]).clone(), m.one()],
                [h.get(&[mul(a, b)]).clone(), m.one()],
            )
        }
        (2, Side::Left) => {
            let (a, b, c) = (t[0], t[1], t[2]);
            ratio(
                [
                    h.get(&[a, mul(b, c)]).clone(),
                    m.left(a, h.get(&[b, c])),
                    m.one(),
                ],
                [h.get(&[a, b]).clone(), h.get(&[mul(a, b), c]).clone()],
            )
        }
        (2, Side::Right) => {
            let (a, b, c) = (t[0], t[1], t[2]);
            ratio(
                [
                    h.get(&[a, mul(b, c)]).clone(),
                    h.get(&[b, c]).clone(),
                    m.one(),
                ],
                [m.right(h.get(&[a, b]), c), h.get(&[mul(a, b), c]).clone()],
            )
        }
        _ => {
            let (a, b, c, d) = (t[0], t[1], t[2], t[3]);
            ratio(
                [
                    h.get(&[a, b, c]).clone(),
                    h.get(&[a, mul(b, c), d]).clone(),
                    m.left(a, h.get(&[b, c, d])),
                ],
                [
                    h.get(&[a, b, mul(c, d)]).clone(),
                    h.get(&[mul(a, b), c, d]).clone(),
                ],
            )
        }
    }
}

// Signed terms of the trivial-action coboundary at `t`.
fn delta_terms(g: &FiniteGroup, t: &[usize]) -> Vec<(Vec<usize>, i64)> {
    let mul = |a, b| g.mul(a, b);
    match t.len() {
        2 => vec![
            (vec![t[0]], 1),
            (vec![t[1]], 1),
            (vec![mul(t[0], t[1])], -1),
        ],
        3 => {
            let (a, b, c) = (t[0], t[1], t[2]);
            vec![
                (vec![a, mul(b, c)], 1),
                (vec![b, c], 1),
                (vec![a, b], -1),
                (vec![mul(a, b), c], -1),
            ]
        }
        _ => {
            let (a, b, c, d) = (t[0], t[1], t[2], t[3]);
            vec![
                (vec![a, b, c], 1),
                (vec![a, mul(b, c), d], 1),
                (vec![b, c, d], 1),
                (vec![a, b, mul(c, d)], -1),
                (vec![mul(a, b), c, d], -1),
            ]
        }
    }
}

/// Matrix of `δ` from degree `n` to `n + 1` in exponent coordinates,
/// restricted to the given row and column tuples.
fn delta_matrix(
    g: &FiniteGroup,
    rows: &[Vec<usize>],
    cols: &[Vec<usize>],
    modulus: u64,
) -> ZnMatrix {
    let order = g.order();
    let mut col_of = vec![usize::MAX; order.pow(cols.first().map_or(0, Vec::len) as u32)];
    for (j, c) in cols.iter().enumerate() {
        col_of[index(order, c)] = j;
    }
    let mut mat = ZnMatrix::zeros(rows.len(), cols.len(), modulus);
    for (i, t) in rows.iter().enumerate() {
        for (args, sign) in delta_terms(g, t) {
            let j = col_of[index(order, &args)];
            if j != usize::MAX {
                mat.add_signed(i, j, sign);
            }
        }
    }
    mat
}

fn non_unit_tuples(g: &FiniteGroup, degree: usize) -> Vec<Vec<usize>> {
    let e = g.unit();
    tuples(g.order(), degree)
        .filter(|t| !t.contains(&e))
        .collect()
}

fn check_bounds(g: &FiniteGroup, field: &Field) -> Result<()> {
    if g.order() > MAX_GROUP_ORDER {
        return Err(Error::Resource(format!(
            "groups of order above {MAX_GROUP_ORDER} are out of range, got {}",
            g.order()
        )));
    }
    if field.p() > MAX_P {
        return Err(Error::Resource(format!(
            "p above {MAX_P} is out of range, got {}",
            field.p()
        )));
    }
    Ok(())
}

pub fn is_cocycle(g: &FiniteGroup, field: &Field, h: &Cochain<Fp>) -> Result<bool> {
    let d = coboundary(g, field, h, Side::Left)?;
    Ok(d.values.iter().all(|v| v.value() == 1))
}

/// A normalized cocycle cohomologous to `h`, with the 2-cochain `k` such
/// that the result is `h · δk`.
pub fn normalize_cocycle(
    g: &FiniteGroup,
    field: &Field,
    h: &Cochain<Fp>,
) -> Result<(Cochain<Fp>, Cochain<Fp>)> {
    if h.degree != 3 {
        return invalid(format!("expected a 3-cochain, got degree {}", h.degree));
    }
    if !is_cocycle(g, field, h)? {
        return Err(Error::Domain("not a 3-cocycle".into()));
    }
    let n = field.unit_order() as u64;
    let e = g.unit();
    let rows: Vec<Vec<usize>> = tuples(g.order(), 3).filter(|t| t.contains(&e)).collect();
    let cols: Vec<Vec<usize>> = tuples(g.order(), 2).collect();
    let mat = delta_matrix(g, &rows, &cols, n);
    let rhs: Vec<u64> = rows
        .iter()
        .map(|t| (n - field.log_unit(*h.get(t))) % n)
        .collect();
    let k =
        solve(&mat, &rhs).ok_or_else(|| Error::Domain("no normalizing 2-cochain exists".into()))?;
    let witness =
        Cochain::from_values(2, g.order(), k.iter().map(|&x| field.exp_u64(x)).collect())?;
    let dk = coboundary(g, field, &witness, Side::Left)?;
    let values = h
        .values
        .iter()
        .zip(&dk.values)
        .map(|(&a, &b)| a * b)
        .collect();
    let out = Cochain::from_values(3, g.order(), values)?;
    debug_assert!(out.is_normalized(e, &field.one()));
    Ok((out, witness))
}

#[derive(Clone, Debug, Serialize)]
pub struct H3Report {
    pub group: String,
    pub p: u32,
    pub order: u128,
    pub invariant_factors: Vec<u64>,
    /// Generator used for the roots-of-unity table when the group is cyclic.
    pub generator: Option<String>,
    /// `∏ₖ h(g, gᵏ, g)` per representative, when the group is cyclic.
    pub roots_of_unity: Option<Vec<u32>>,
    pub tables: Vec<BTreeMap<String, u32>>,
    #[serde(skip)]
    pub representatives: Vec<Cochain<Fp>>,
}

/// The root of unity attached to a 3-cocycle on a cyclic group generated by
/// `gen`; it is constant on cohomology classes.
pub fn cyclic_invariant(g: &FiniteGroup, gen: usize, h: &Cochain<Fp>) -> Fp {
    let mut x = g.unit();
    let mut acc = Fp::one(h.values[0].modulus());
    for _ in 0..g.order() {
        acc = acc * *h.get(&[gen, x, gen]);
        x = g.mul(x, gen);
    }
    acc
}

fn cyclic_generator(g: &FiniteGroup) -> Option<usize> {
    (0..g.order()).find(|&a| g.element_order(a) == g.order())
}

/// `H³(G, F^×)` with normalized representatives.
pub fn h3(g: &FiniteGroup, field: &Field) -> Result<H3Report> {
    check_bounds(g, field)?;
    let n = field.unit_order() as u64;
    let t3 = non_unit_tuples(g, 3);
    let t4 = non_unit_tuples(g, 4);
    let t2 = non_unit_tuples(g, 2);
    let cocycle = delta_matrix(g, &t4, &t3, n);
    let kernel = smith(&cocycle, false).kernel();
    let bound = delta_matrix(g, &t3, &t2, n);
    let image: Vec<Vec<u64>> = (0..bound.cols()).map(|j| bound.column(j)).collect();
    let q = quotient(&kernel, &image, t3.len(), n);

    let order = g.order();
    let mut slot = vec![usize::MAX; order.pow(3)];
    for (j, t) in t3.iter().enumerate() {
        slot[index(order, t)] = j;
    }
    let representatives: Vec<Cochain<Fp>> = q
        .elements()
        .into_iter()
        .map(|x| {
            let x = if x.is_empty() { vec![0; t3.len()] } else { x };
            Cochain::from_fn(3, order, |t| match slot[index(order, t)] {
                usize::MAX => field.one(),
                j => field.exp_u64(x[j]),
            })
        })
        .collect();
    let gen = cyclic_generator(g);
    let roots_of_unity = gen.map(|c| {
        representatives
            .iter()
            .map(|h| cyclic_invariant(g, c, h).value())
            .collect()
    });
    Ok(H3Report {
        group: g.name().to_string(),
        p: field.p(),
        order: q.order(),
        invariant_factors: q.invariant_factors(),
        generator: gen.map(|c| g.label(c).to_string()),
        roots_of_unity,
        tables: representatives.iter().map(|h| h.table(g)).collect(),
        representatives,
    })
}

/// The fusion system on `G` with `f^{a,b,c}_{ab,abc,bc} = h(a,b,c)`;
/// non-normalized cocycles are normalized first.
pub fn cocycle_to_fusion_system(
    g: &FiniteGroup,
    field: &Arc<Field>,
    h: &Cochain<Fp>,
) -> Result<FusionSystem> {
    if h.order != g.order() || h.degree != 3 {
        return invalid("expected a 3-cochain on the given group");
    }
    let h = if h.is_normalized(g.unit(), &field.one()) {
        if !is_cocycle(g, field, h)? {
            return Err(Error::Domain("not a 3-cocycle".into()));
        }
        h.clone()
    } else {
        normalize_cocycle(g, field, h)?.0
    };
    let support = Support::new(&g.to_fusion_rule())?;
    Ok(FusionSystem::from_fn(support, field.clone(), |s| {
        *h.get(&s[..3])
    }))
}

pub fn fusion_system_to_cocycle(g: &FiniteGroup, f: &FusionSystem) -> Result<Cochain<Fp>> {
    if *f.rule() != g.to_fusion_rule() {
        return invalid("fusion system is not on the given group");
    }
    Ok(Cochain::from_fn(3, g.order(), |t| {
        let (a, b, c) = (t[0], t[1], t[2]);
        f.at([a, b, c, g.mul(a, b), g.mul(g.mul(a, b), c), g.mul(b, c)])
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct ViaUberReport {
    pub group: String,
    pub subgroup: Vec<String>,
    pub p: u32,
    pub count: usize,
    pub h3_order: u128,
    pub agrees: bool,
}

/// Counts `H³(G, F^×)` through überderivations on an index-2 subgroup.
pub fn h3_via_uber(g: &FiniteGroup, serfs: &[usize], field: &Arc<Field>) -> Result<ViaUberReport> {
    check_bounds(g, field)?;
    let mut serfs = serfs.to_vec();
    serfs.sort_unstable();
    serfs.dedup();
    if serfs.len() * 2 != g.order() || g.generated(&serfs) != serfs {
        return invalid("the subgroup must have index 2");
    }
    let count = h3_count_via_uber(g, &serfs, field)?;
    let direct = h3(g, field)?.order;
    Ok(ViaUberReport {
        group: g.name().to_string(),
        subgroup: serfs.iter().map(|&a| g.label(a).to_string()).collect(),
        p: field.p(),
        count,
        h3_order: direct,
        agrees: count as u128 == direct,
    })
}
