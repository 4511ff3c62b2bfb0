//! A fusion system on a feudal rule read as eight functions of serfs and
//! lords, a gauge read as four, and the identities the pentagon and the
//! rectangle impose on them.

use std::sync::Arc;

use super::{Ambi, PairTable, SingleTable};
use crate::error::{Error, Result};
use crate::fsys::{FusionSystem, GaugeXi, Sextuple, Support};
use crate::report::{AxiomCheck, AxiomReport};
use crate::scalars::{Field, Fp};

/// Which of `x, y, z` are lords (`1`) or serfs (`0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SextupleKind {
    K000,
    K100,
    K010,
    K001,
    K011,
    K101,
    K110,
    K111,
}

impl SextupleKind {
    pub const ALL: [SextupleKind; 8] = [
        SextupleKind::K000,
        SextupleKind::K100,
        SextupleKind::K010,
        SextupleKind::K001,
        SextupleKind::K011,
        SextupleKind::K101,
        SextupleKind::K110,
        SextupleKind::K111,
    ];

    fn from_bits(x: bool, y: bool, z: bool) -> Self {
        use SextupleKind::*;
        match (x, y, z) {
            (false, false, false) => K000,
            (true, false, false) => K100,
            (false, true, false) => K010,
            (false, false, true) => K001,
            (false, true, true) => K011,
            (true, false, true) => K101,
            (true, true, false) => K110,
            (true, true, true) => K111,
        }
    }
}

/// The sextuple (rule ids) read off by `kind` at serfs `a, b` and third
/// argument `c`, a serf for `K000` and a lord otherwise.
pub fn sextuple_of(am: &Ambi, kind: SextupleKind, a: usize, b: usize, c: usize) -> Sextuple {
    use SextupleKind::*;
    let s = |x: usize| am.serf_id(x);
    let l = |x: usize| am.lord_id(x);
    let mul = |x, y| am.mul(x, y);
    let inv = |x| am.inv(x);
    let (ai, bi) = (inv(a), inv(b));
    match kind {
        K000 => [
            s(a),
            s(b),
            s(c),
            s(mul(a, b)),
            s(mul(mul(a, b), c)),
            s(mul(b, c)),
        ],
        K100 => {
            let m = c;
            [
                l(am.mr(m, mul(bi, ai))),
                s(a),
                s(b),
                l(am.mr(m, bi)),
                l(m),
                s(mul(a, b)),
            ]
        }
        K010 => {
            let m = c;
            [
                s(a),
                l(am.act(ai, m, bi)),
                s(b),
                l(am.mr(m, bi)),
                l(m),
                l(am.lm(ai, m)),
            ]
        }
        K001 => {
            let m = c;
            [
                s(a),
                s(b),
                l(am.lm(mul(bi, ai), m)),
                s(mul(a, b)),
                l(m),
                l(am.lm(ai, m)),
            ]
        }
        K011 => {
            let m = c;
            [
                s(a),
                l(m),
                l(am.mr(am.bar(m), mul(ai, b))),
                l(am.lm(a, m)),
                s(b),
                s(mul(ai, b)),
            ]
        }
        K101 => {
            let m = c;
            [
                l(m),
                s(a),
                l(am.lm(ai, am.mr(am.bar(m), b))),
                l(am.mr(m, a)),
                s(b),
                l(am.mr(am.bar(m), b)),
            ]
        }
        K110 => {
            let m = c;
            [
                l(am.lm(mul(b, ai), am.bar(m))),
                l(m),
                s(a),
                s(mul(b, ai)),
                s(b),
                l(am.mr(m, a)),
            ]
        }
        K111 => {
            let m = c;
            [
                l(am.mr(m, ai)),
                l(am.act(a, am.bar(m), b)),
                l(am.lm(bi, m)),
                s(b),
                l(m),
                s(a),
            ]
        }
    }
}

/// Inverse of [`sextuple_of`] on admissible sextuples.
pub fn kind_of(am: &Ambi, t: &Sextuple) -> (SextupleKind, usize, usize, usize) {
    use SextupleKind::*;
    let [x, y, z, u, r, v] = *t;
    let sp = |id| am.serf_pos(id);
    let lp = |id| am.lord_pos(id).expect("lord");
    let kind = SextupleKind::from_bits(sp(x).is_none(), sp(y).is_none(), sp(z).is_none());
    let s = |id| sp(id).expect("serf");
    match kind {
        K000 => (kind, s(x), s(y), s(z)),
        K100 => (kind, s(y), s(z), lp(r)),
        K010 => (kind, s(x), s(z), lp(r)),
        K001 => (kind, s(x), s(y), lp(r)),
        K011 => (kind, s(x), s(r), lp(y)),
        K101 => (kind, s(y), s(r), lp(x)),
        K110 => (kind, s(z), s(r), lp(y)),
        K111 => (kind, s(v), s(u), lp(r)),
    }
}

/// `α, α₁, α₂, α₃, β₁, β₂, β₃, γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub alpha: Vec<Fp>,
    pub alpha1: PairTable,
    pub alpha2: PairTable,
    pub alpha3: PairTable,
    pub beta1: PairTable,
    pub beta2: PairTable,
    pub beta3: PairTable,
    pub gamma: PairTable,
    pub(crate) s: usize,
    pub(crate) k: usize,
}

impl Decomposition {
    pub fn of(am: &Arc<Ambi>, f: &FusionSystem) -> Result<Self> {
        if f.rule() != am.feudal().rule() {
            return Err(Error::Domain(
                "fusion system lives on a different rule".into(),
            ));
        }
        use SextupleKind::*;
        let (s, k) = (am.serf_count(), am.lord_count());
        let table = |kind| PairTable::from_fn(s, k, |a, b, m| f.at(sextuple_of(am, kind, a, b, m)));
        let mut alpha = Vec::with_capacity(s * s * s);
        for a in 0..s {
            for b in 0..s {
                for c in 0..s {
                    alpha.push(f.at(sextuple_of(am, K000, a, b, c)));
                }
            }
        }
        Ok(Decomposition {
            alpha,
            alpha1: table(K100),
            alpha2: table(K010),
            alpha3: table(K001),
            beta1: table(K011),
            beta2: table(K101),
            beta3: table(K110),
            gamma: table(K111),
            s,
            k,
        })
    }

    #[inline]
    pub fn alpha(&self, a: usize, b: usize, c: usize) -> Fp {
        self.alpha[(a * self.s + b) * self.s + c]
    }

    pub fn value(&self, kind: SextupleKind, a: usize, b: usize, c: usize) -> Fp {
        use SextupleKind::*;
        match kind {
            K000 => self.alpha(a, b, c),
            K100 => self.alpha1.get(a, b, c),
            K010 => self.alpha2.get(a, b, c),
            K001 => self.alpha3.get(a, b, c),
            K011 => self.beta1.get(a, b, c),
            K101 => self.beta2.get(a, b, c),
            K110 => self.beta3.get(a, b, c),
            K111 => self.gamma.get(a, b, c),
        }
    }

    /// The fusion system with these components.
    pub fn assemble(
        &self,
        am: &Arc<Ambi>,
        support: Arc<Support>,
        field: Arc<Field>,
    ) -> Result<FusionSystem> {
        if support.rule() != am.feudal().rule() {
            return Err(Error::Domain("support belongs to a different rule".into()));
        }
        Ok(FusionSystem::from_fn(support, field, |t| {
            let (kind, a, b, c) = kind_of(am, t);
            self.value(kind, a, b, c)
        }))
    }
}

/// `θ, φ, ψ, ω` of a gauge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeParts {
    pub theta: PairTable,
    pub phi: SingleTable,
    pub psi: SingleTable,
    pub omega: SingleTable,
}

impl GaugeParts {
    pub fn of(am: &Arc<Ambi>, xi: &GaugeXi) -> Self {
        let (s, k) = (am.serf_count(), am.lord_count());
        let sid = |a| am.serf_id(a);
        let lid = |m| am.lord_id(m);
        GaugeParts {
            theta: PairTable::from_fn(s, k, |a, b, _| xi.get(sid(a), sid(b), sid(am.mul(a, b)))),
            phi: SingleTable::from_fn(s, k, |a, m| {
                xi.get(sid(a), lid(am.lm(am.inv(a), m)), lid(m))
            }),
            psi: SingleTable::from_fn(s, k, |a, m| {
                xi.get(lid(am.mr(m, am.inv(a))), sid(a), lid(m))
            }),
            omega: SingleTable::from_fn(s, k, |a, m| {
                xi.get(lid(m), lid(am.mr(am.bar(m), a)), sid(a))
            }),
        }
    }
}

struct Ctx<'a> {
    am: &'a Ambi,
    s: usize,
    k: usize,
}

impl Ctx<'_> {
    fn mul(&self, a: usize, b: usize) -> usize {
        self.am.mul(a, b)
    }
    fn inv(&self, a: usize) -> usize {
        self.am.inv(a)
    }
    fn lm(&self, a: usize, m: usize) -> usize {
        self.am.lm(a, m)
    }
    fn mr(&self, m: usize, a: usize) -> usize {
        self.am.mr(m, a)
    }
    fn bar(&self, m: usize) -> usize {
        self.am.bar(m)
    }

    fn each2(&self, name: &str, mut ok: impl FnMut(usize, usize, usize) -> bool) -> AxiomCheck {
        let mut c = AxiomCheck::new(name);
        for a in 0..self.s {
            for b in 0..self.s {
                for m in 0..self.k {
                    c.record(ok(a, b, m), || vec![a, b, m]);
                }
            }
        }
        c
    }

    fn each3(
        &self,
        name: &str,
        mut ok: impl FnMut(usize, usize, usize, usize) -> bool,
    ) -> AxiomCheck {
        let mut c = AxiomCheck::new(name);
        for a in 0..self.s {
            for b in 0..self.s {
                for x in 0..self.s {
                    for m in 0..self.k {
                        c.record(ok(a, b, x, m), || vec![a, b, x, m]);
                    }
                }
            }
        }
        c
    }
}

/// The eight identities relating `f`, a gauge `ξ` and `f̃ = ξ·f`.
pub fn gauge_identities(
    am: &Ambi,
    d: &Decomposition,
    dt: &Decomposition,
    g: &GaugeParts,
) -> AxiomReport {
    let x = Ctx { am, s: d.s, k: d.k };
    let th = |a, b| g.theta.get(a, b, 0);
    let phi = |a, m| g.phi.get(a, m);
    let psi = |a, m| g.psi.get(a, m);
    let om = |a, m| g.omega.get(a, m);

    let mut g000 = AxiomCheck::new("G000");
    for a in 0..x.s {
        for b in 0..x.s {
            for c in 0..x.s {
                let dth = th(a, x.mul(b, c)) * th(b, c) / (th(a, b) * th(x.mul(a, b), c));
                g000.record(dt.alpha(a, b, c) == d.alpha(a, b, c) * dth, || {
                    vec![a, b, c]
                });
            }
        }
    }
    let g100 = x.each2("G100", |a, b, m| {
        let lhs =
            dt.alpha1.get(a, b, m) * psi(a, x.mr(m, x.inv(b))) * psi(b, m) / psi(x.mul(a, b), m);
        lhs == th(a, b) * d.alpha1.get(a, b, m)
    });
    let g010 = x.each2("G010", |a, b, m| {
        let lhs = dt.alpha2.get(a, b, m) * phi(a, x.mr(m, x.inv(b))) * psi(b, m);
        let rhs = phi(a, m) * psi(b, x.lm(x.inv(a), m)) * d.alpha2.get(a, b, m);
        lhs == rhs
    });
    let g001 = x.each2("G001", |a, b, m| {
        let lhs = dt.alpha3.get(a, b, m) * th(a, b);
        let rhs =
            d.alpha3.get(a, b, m) * phi(a, m) * phi(b, x.lm(x.inv(a), m)) / phi(x.mul(a, b), m);
        lhs == rhs
    });
    let g011 = x.each2("G011", |a, b, m| {
        let am_ = x.lm(a, m);
        let ab = x.mul(x.inv(a), b);
        let lhs = dt.beta1.get(a, b, m) * phi(a, am_) * om(b, am_);
        lhs == om(ab, m) * th(a, ab) * d.beta1.get(a, b, m)
    });
    let g101 = x.each2("G101", |a, b, m| {
        let ma = x.mr(m, a);
        let lhs = dt.beta2.get(a, b, m) * psi(a, ma) * om(b, ma);
        lhs == phi(a, x.mr(x.bar(m), b)) * om(b, m) * d.beta2.get(a, b, m)
    });
    let g110 = x.each2("G110", |a, b, m| {
        let ba = x.mul(b, x.inv(a));
        let n = x.lm(ba, x.bar(m));
        let lhs = dt.beta3.get(a, b, m) * th(ba, a) * om(ba, n);
        lhs == om(b, n) * psi(a, x.mr(m, a)) * d.beta3.get(a, b, m)
    });
    let g111 = x.each2("G111", |a, b, m| {
        let lhs = dt.gamma.get(a, b, m) * om(b, x.mr(m, x.inv(a))) * phi(b, m);
        let rhs = om(a, am.act(a, x.bar(m), b)) * psi(a, m) * d.gamma.get(a, b, m);
        lhs == rhs
    });
    AxiomReport {
        checks: vec![g000, g100, g010, g001, g011, g101, g110, g111],
    }
}

/// The sixteen identities the pentagon imposes on one decomposition.
pub fn pentagon_identities(am: &Ambi, d: &Decomposition, field: &Field) -> AxiomReport {
    let x = Ctx { am, s: d.s, k: d.k };
    let s = x.s;
    let al = |a, b, c| d.alpha(a, b, c);
    let a1 = |a, b, m| d.alpha1.get(a, b, m);
    let a2 = |a, b, m| d.alpha2.get(a, b, m);
    let a3 = |a, b, m| d.alpha3.get(a, b, m);
    let b1 = |a, b, m| d.beta1.get(a, b, m);
    let b2 = |a, b, m| d.beta2.get(a, b, m);
    let b3 = |a, b, m| d.beta3.get(a, b, m);
    let ga = |a, b, m| d.gamma.get(a, b, m);
    let inv = |a| x.inv(a);
    let mul = |a, b| x.mul(a, b);
    let lm = |a, m| x.lm(a, m);
    let mr = |m, a| x.mr(m, a);
    let bar = |m| x.bar(m);

    let mut p0000 = AxiomCheck::new("P0000");
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                for e in 0..s {
                    let lhs = al(b, c, e) * al(a, mul(b, c), e) * al(a, b, c);
                    let rhs = al(a, b, mul(c, e)) * al(mul(a, b), c, e);
                    p0000.record(lhs == rhs, || vec![a, b, c, e]);
                }
            }
        }
    }
    let p0001 = x.each3("P0001", |a, b, c, m| {
        let num = al(a, b, c) * a3(a, mul(b, c), m) * a3(b, c, lm(inv(a), m));
        num == a3(a, b, m) * a3(mul(a, b), c, m)
    });
    let p1000 = x.each3("P1000", |a, b, c, m| {
        let num = a1(a, mul(b, c), m) * a1(b, c, m);
        num == al(a, b, c) * a1(a, b, mr(m, inv(c))) * a1(mul(a, b), c, m)
    });
    let p0010 = x.each3("P0010", |a, b, c, m| {
        a3(a, b, m) * a2(mul(a, b), c, m)
            == a2(b, c, lm(inv(a), m)) * a2(a, c, m) * a3(a, b, mr(m, inv(c)))
    });
    let p0100 = x.each3("P0100", |a, b, c, m| {
        a1(b, c, m) * a2(a, mul(b, c), m)
            == a2(a, b, mr(m, inv(c))) * a2(a, c, m) * a1(b, c, lm(inv(a), m))
    });
    let p0011 = x.each3("P0011", |a, b, c, m| {
        let ab = mul(a, b);
        let lhs = al(a, b, mul(inv(b), mul(inv(a), c))) * b1(ab, c, m);
        let rhs = a3(a, b, lm(ab, m)) * b1(a, c, lm(b, m)) * b1(b, mul(inv(a), c), m);
        lhs == rhs
    });
    let p1100 = x.each3("P1100", |a, b, c, m| {
        let ab = mul(a, b);
        let cbi = mul(c, inv(b));
        let lhs = al(mul(cbi, inv(a)), a, b) * b3(ab, c, m);
        let rhs = b3(a, cbi, m) * b3(b, c, mr(m, a)) * a1(a, b, mr(m, ab));
        lhs == rhs
    });
    let p0101 = x.each3("P0101", |a, b, c, m| {
        let lhs = b1(a, c, m) * b2(b, c, lm(a, m));
        let rhs = b2(b, mul(inv(a), c), m) * b1(a, c, mr(m, b)) * a2(a, b, x.am.act(a, m, b));
        lhs == rhs
    });
    let p1010 = x.each3("P1010", |a, b, c, m| {
        let cbi = mul(c, inv(b));
        let n = x.am.act(cbi, bar(m), inv(a));
        let lhs = b2(a, c, n) * b3(b, c, m);
        let rhs = a2(a, b, x.am.act(a, m, b)) * b3(b, c, lm(a, m)) * b2(a, cbi, n);
        lhs == rhs
    });
    let p0110 = x.each3("P0110", |a, b, c, m| {
        let cbi = mul(c, inv(b));
        let n = mr(bar(m), mul(inv(a), cbi));
        let lhs = b1(a, c, m) * b3(b, c, n);
        let rhs = b3(b, mul(inv(a), c), n) * al(a, mul(inv(a), cbi), b) * b1(a, cbi, m);
        lhs == rhs
    });
    let p1001 = x.each3("P1001", |a, b, c, m| {
        let ab = mul(a, b);
        let lhs = b2(a, c, m) * b2(b, c, mr(m, a));
        let rhs = a3(a, b, mr(bar(m), c)) * b2(ab, c, m) * a1(a, b, mr(m, ab));
        lhs == rhs
    });
    let p0111 = x.each3("P0111", |a, b, c, m| {
        let aib = mul(inv(a), b);
        let lhs = a2(a, c, m) * ga(c, b, m);
        let rhs = ga(c, aib, lm(inv(a), m)) * a3(a, aib, m) * b1(a, b, x.am.act(inv(a), m, inv(c)));
        lhs == rhs
    });
    let p1110 = x.each3("P1110", |a, b, c, m| {
        let cai = mul(c, inv(a));
        let lhs = a2(b, a, m) * ga(c, b, m);
        let rhs = b3(a, c, x.am.act(inv(b), m, inv(a))) * a1(cai, a, m) * ga(cai, b, mr(m, inv(a)));
        lhs == rhs
    });
    let p1011 = x.each3("P1011", |a, b, c, m| {
        let ac = mul(a, c);
        let lhs = a1(a, c, m) * ga(c, b, m);
        let rhs =
            b2(a, b, mr(m, mul(inv(c), inv(a)))) * ga(ac, b, m) * b1(a, ac, x.am.act(c, bar(m), b));
        lhs == rhs
    });
    let p1101 = x.each3("P1101", |a, b, c, m| {
        let ba = mul(b, a);
        let n = x.am.act(c, bar(m), b);
        let lhs = ga(c, b, m) * a3(b, a, m);
        let rhs = b2(a, c, n) * ga(c, ba, m) * b3(a, ba, n);
        lhs == rhs
    });

    let mut p1111 = AxiomCheck::new("P1111");
    let zero = field.zero();
    for a in 0..s {
        for b in 0..s {
            for dd in 0..s {
                if !x.am.in_a(mul(inv(b), mul(a, dd))) {
                    continue;
                }
                for e in 0..s {
                    for m in 0..x.k {
                        let lhs = if b == mul(a, dd) {
                            b1(a, b, mr(bar(m), e)) * b3(dd, b, m)
                        } else {
                            zero
                        };
                        let rhs = x.am.a_subgroup().iter().fold(zero, |acc, &t| {
                            let c = mul(e, t);
                            acc + ga(c, a, x.am.act(a, bar(m), e))
                                * b2(c, b, lm(a, bar(m)))
                                * ga(dd, c, mr(m, dd))
                        });
                        p1111.record(lhs == rhs, || vec![a, b, dd, e, m]);
                    }
                }
            }
        }
    }

    AxiomReport {
        checks: vec![
            p0000, p0001, p1000, p0010, p0100, p0011, p1100, p0101, p1010, p0110, p1001, p0111,
            p1110, p1011, p1101, p1111,
        ],
    }
}

/// `(F^{m̄ m m̄}_{m̄})⁻¹` predicted from `(χ, υ, τ)`: rows and columns
/// indexed by `A`, entry `(x, y)` equal to `υ(x̄,x) τ̄ χ(y,x) / ῡ(ȳ,y)` at `m̄`.
pub fn predicted_inverse(u: &super::Uberderivation, m: usize) -> Vec<Vec<Fp>> {
    let am = &*u.ambi;
    let mb = am.bar(m);
    let asub = am.a_subgroup();
    asub.iter()
        .map(|&x| {
            asub.iter()
                .map(|&y| {
                    u.ups.get(am.inv(x), x, mb) * u.tau[am.bar(mb)] * u.chi.get(y, x, mb)
                        / u.ups.get(am.inv(y), y, am.bar(mb))
                })
                .collect()
        })
        .collect()
}
