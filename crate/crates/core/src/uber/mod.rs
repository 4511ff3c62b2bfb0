//! Feudal fusion systems through überderivations `(χ, υ, τ)` on the serfs
//! over `B = F^M`, where `M` is the set of lords.

mod classify;
pub mod decomp;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feudal::FeudalRule;
use crate::fsys::{FusionSystem, GaugeXi, Support};
use crate::group::FiniteGroup;
use crate::report::{AxiomCheck, AxiomReport};
use crate::scalars::{Field, Fp};

pub use classify::{
    canonicalize_tau, enumerate_uber, gauge_equivalent_uber, h3_count_via_uber, UberClass,
    UberClassification, MAX_CLASSES,
};
pub use decomp::{Decomposition, GaugeParts, SextupleKind};

/// The serfs `S`, the lords `M` and the two-sided action of `S` on `M`,
/// which together make `F^M` an involutory ambidextrous algebra.
///
/// Serfs and lords are addressed by position (`0..|S|`, `0..|M|`); the
/// serf group's unit is position `unit()`.
#[derive(Clone, Debug)]
pub struct Ambi {
    feudal: FeudalRule,
    group: FiniteGroup,
    left: Vec<usize>,
    right: Vec<usize>,
    lord_bar: Vec<usize>,
    lord_product: Vec<Vec<usize>>,
    a_sub: Vec<usize>,
    in_a: Vec<bool>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

impl Ambi {
    pub fn new(feudal: &FeudalRule) -> Result<Arc<Ambi>> {
        let rule = feudal.rule();
        let group = feudal.serf_group();
        let serfs = feudal.serfs();
        let lords = feudal.lords();
        let s = serfs.len();
        let k = lords.len();
        let lpos = |id: usize| lords.binary_search(&id).expect("lord id");
        let spos = |id: usize| serfs.binary_search(&id).expect("serf id");
        let single = |x: usize, y: usize| {
            rule.fuse(x, y)
                .single()
                .ok_or_else(|| Error::Invalid("serf-lord product is not a single lord".into()))
        };
        let mut left = vec![0; s * k];
        let mut right = vec![0; k * s];
        for a in 0..s {
            for m in 0..k {
                left[a * k + m] = lpos(single(serfs[a], lords[m])?);
                right[m * s + a] = lpos(single(lords[m], serfs[a])?);
            }
        }
        let lord_bar = (0..k).map(|m| lpos(rule.dual(lords[m]))).collect();
        let mut lord_product = Vec::with_capacity(k * k);
        for m in 0..k {
            for l in 0..k {
                let mut v: Vec<usize> = rule.fuse(lords[m], lords[l]).support().map(spos).collect();
                v.sort_unstable();
                lord_product.push(v);
            }
        }
        let in_a: Vec<bool> = (0..s)
            .map(|a| (0..k).all(|m| left[a * k + m] == m && right[m * s + a] == m))
            .collect();
        let a_sub = (0..s).filter(|&a| in_a[a]).collect();

        // Orbits of M under m ↦ a m b; fix(S) is the functions constant on them.
        let mut orbit_of = vec![usize::MAX; k];
        let mut orbits = Vec::new();
        for m0 in 0..k {
            if orbit_of[m0] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut stack = vec![m0];
            let mut orbit = Vec::new();
            orbit_of[m0] = id;
            while let Some(m) = stack.pop() {
                orbit.push(m);
                for a in 0..s {
                    for n in [left[a * k + m], right[m * s + a]] {
                        if orbit_of[n] == usize::MAX {
                            orbit_of[n] = id;
                            stack.push(n);
                        }
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }

        Ok(Arc::new(Ambi {
            feudal: feudal.clone(),
            group,
            left,
            right,
            lord_bar,
            lord_product,
            a_sub,
            in_a,
            orbits,
            orbit_of,
        }))
    }

    pub fn feudal(&self) -> &FeudalRule {
        &self.feudal
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn serf_count(&self) -> usize {
        self.group.order()
    }

    pub fn lord_count(&self) -> usize {
        self.lord_bar.len()
    }

    pub fn unit(&self) -> usize {
        self.group.unit()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.group.mul(a, b)
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.group.inv(a)
    }

    /// `a m`.
    #[inline]
    pub fn lm(&self, a: usize, m: usize) -> usize {
        self.left[a * self.lord_count() + m]
    }

    /// `m a`.
    #[inline]
    pub fn mr(&self, m: usize, a: usize) -> usize {
        self.right[m * self.serf_count() + a]
    }

    /// `a m b`.
    #[inline]
    pub fn act(&self, a: usize, m: usize, b: usize) -> usize {
        self.mr(self.lm(a, m), b)
    }

    /// `m̄`.
    #[inline]
    pub fn bar(&self, m: usize) -> usize {
        self.lord_bar[m]
    }

    /// The serfs in `m l`, a coset of `A`.
    pub fn lord_product(&self, m: usize, l: usize) -> &[usize] {
        &self.lord_product[m * self.lord_count() + l]
    }

    /// Serfs acting trivially on both sides.
    pub fn a_subgroup(&self) -> &[usize] {
        &self.a_sub
    }

    pub fn in_a(&self, a: usize) -> bool {
        self.in_a[a]
    }

    /// Orbits of lords under the two-sided serf action.
    pub fn fix_orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, m: usize) -> usize {
        self.orbit_of[m]
    }

    pub fn serf_id(&self, a: usize) -> usize {
        self.feudal.serfs()[a]
    }

    pub fn lord_id(&self, m: usize) -> usize {
        self.feudal.lords()[m]
    }

    pub fn serf_pos(&self, id: usize) -> Option<usize> {
        self.feudal.serfs().binary_search(&id).ok()
    }

    pub fn lord_pos(&self, id: usize) -> Option<usize> {
        self.feudal.lords().binary_search(&id).ok()
    }

    pub fn serf_label(&self, a: usize) -> &str {
        self.feudal.rule().label(self.serf_id(a))
    }

    pub fn lord_label(&self, m: usize) -> &str {
        self.feudal.rule().label(self.lord_id(m))
    }

    /// `ᵃμᵇ(m) = μ(ā m b̄)`.
    pub fn twist(&self, mu: &[Fp], a: usize, b: usize) -> Vec<Fp> {
        let (ai, bi) = (self.inv(a), self.inv(b));
        (0..self.lord_count())
            .map(|m| mu[self.act(ai, m, bi)])
            .collect()
    }

    /// `μ̄(m) = μ(m̄)`.
    pub fn conj(&self, mu: &[Fp]) -> Vec<Fp> {
        (0..self.lord_count()).map(|m| mu[self.bar(m)]).collect()
    }

    /// `μ` is fixed by every `ᵃ(−)ᵇ`.
    pub fn is_fixed(&self, mu: &[Fp]) -> bool {
        let s = self.serf_count();
        (0..s).all(|a| (0..s).all(|b| self.twist(mu, a, b) == mu))
    }

    /// The checks that make `F^M` an involutory ambidextrous algebra, run on
    /// the supplied sample elements.
    pub fn check_axioms(&self, samples: &[Vec<Fp>]) -> AxiomReport {
        let s = self.serf_count();
        let mut involution = AxiomCheck::new("involution");
        let mut compose = AxiomCheck::new("action-composition");
        let mut compat = AxiomCheck::new("conjugation-compatibility");
        let mut ring = AxiomCheck::new("ring-endomorphism");
        for (i, mu) in samples.iter().enumerate() {
            involution.record(self.conj(&self.conj(mu)) == *mu, || vec![i]);
            for a in 0..s {
                for b in 0..s {
                    let lhs = self.conj(&self.twist(mu, a, b));
                    let rhs = self.twist(&self.conj(mu), self.inv(b), self.inv(a));
                    compat.record(lhs == rhs, || vec![i, a, b]);
                    for c in 0..s {
                        for d in 0..s {
                            let lhs = self.twist(&self.twist(mu, b, c), a, d);
                            let rhs = self.twist(mu, self.mul(a, b), self.mul(c, d));
                            compose.record(lhs == rhs, || vec![i, a, b, c, d]);
                        }
                    }
                    if let Some(nu) = samples.get((i + 1) % samples.len()) {
                        let prod: Vec<Fp> = mu.iter().zip(nu).map(|(&x, &y)| x * y).collect();
                        let lhs = self.twist(&prod, a, b);
                        let rhs: Vec<Fp> = self
                            .twist(mu, a, b)
                            .into_iter()
                            .zip(self.twist(nu, a, b))
                            .map(|(x, y)| x * y)
                            .collect();
                        ring.record(lhs == rhs, || vec![i, a, b]);
                    }
                }
            }
        }
        AxiomReport {
            checks: vec![involution, compose, compat, ring],
        }
    }
}

/// A map `S × S → F^M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairTable {
    s: usize,
    k: usize,
    values: Vec<Fp>,
}

impl PairTable {
    pub fn filled(s: usize, k: usize, v: Fp) -> Self {
        PairTable {
            s,
            k,
            values: vec![v; s * s * k],
        }
    }

    pub fn from_fn(s: usize, k: usize, f: impl Fn(usize, usize, usize) -> Fp) -> Self {
        let mut values = Vec::with_capacity(s * s * k);
        for a in 0..s {
            for b in 0..s {
                for m in 0..k {
                    values.push(f(a, b, m));
                }
            }
        }
        PairTable { s, k, values }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, m: usize) -> Fp {
        self.values[(a * self.s + b) * self.k + m]
    }

    pub fn set(&mut self, a: usize, b: usize, m: usize, v: Fp) {
        self.values[(a * self.s + b) * self.k + m] = v;
    }

    /// `μ(a, b)` as an element of `F^M`.
    pub fn row(&self, a: usize, b: usize) -> &[Fp] {
        let i = (a * self.s + b) * self.k;
        &self.values[i..i + self.k]
    }

    pub fn values(&self) -> &[Fp] {
        &self.values
    }
}

/// A map `S → F^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleTable {
    k: usize,
    values: Vec<Fp>,
}

impl SingleTable {
    pub fn from_fn(s: usize, k: usize, f: impl Fn(usize, usize) -> Fp) -> Self {
        let mut values = Vec::with_capacity(s * k);
        for a in 0..s {
            for m in 0..k {
                values.push(f(a, m));
            }
        }
        SingleTable { k, values }
    }

    #[inline]
    pub fn get(&self, a: usize, m: usize) -> Fp {
        self.values[a * self.k + m]
    }

    pub fn values(&self) -> &[Fp] {
        &self.values
    }
}

/// `(χ, υ, τ)`.
#[derive(Clone, Debug)]
pub struct Uberderivation {
    pub ambi: Arc<Ambi>,
    pub field: Arc<Field>,
    pub chi: PairTable,
    pub ups: PairTable,
    pub tau: Vec<Fp>,
}

impl PartialEq for Uberderivation {
    fn eq(&self, other: &Self) -> bool {
        self.field.p() == other.field.p()
            && self.ambi.feudal == other.ambi.feudal
            && self.chi == other.chi
            && self.ups == other.ups
            && self.tau == other.tau
    }
}

impl Eq for Uberderivation {}

impl Uberderivation {
    pub fn new(
        ambi: Arc<Ambi>,
        field: Arc<Field>,
        chi: PairTable,
        ups: PairTable,
        tau: Vec<Fp>,
    ) -> Result<Self> {
        let (s, k) = (ambi.serf_count(), ambi.lord_count());
        if chi.s != s || chi.k != k || ups.s != s || ups.k != k || tau.len() != k {
            return Err(Error::Invalid(
                "überderivation tables have the wrong shape".into(),
            ));
        }
        Ok(Uberderivation {
            ambi,
            field,
            chi,
            ups,
            tau,
        })
    }

    /// Every defining condition, checked pointwise.
    pub fn check(&self) -> AxiomReport {
        let am = &*self.ambi;
        let (s, k) = (am.serf_count(), am.lord_count());
        let e = am.unit();
        let one = self.field.one();
        let chi = |a, b, m| self.chi.get(a, b, m);
        let ups = |a, b, m| self.ups.get(a, b, m);
        let tau = |m: usize| self.tau[m];

        let mut units = AxiomCheck::new("invertible-values");
        for (i, v) in self
            .chi
            .values
            .iter()
            .chain(&self.ups.values)
            .chain(&self.tau)
            .enumerate()
        {
            units.record(!v.is_zero(), || vec![i]);
        }
        if !units.passed {
            return AxiomReport {
                checks: vec![units],
            };
        }

        let mut normalized = AxiomCheck::new("ups-normalized");
        for a in 0..s {
            for m in 0..k {
                normalized.record(ups(e, a, m) == one && ups(a, e, m) == one, || vec![a, m]);
            }
        }

        let mut quasi = AxiomCheck::new("quasisymmetry");
        for a in 0..s {
            for b in 0..s {
                for m in 0..k {
                    let amb = am.act(a, m, b);
                    let lhs = chi(b, a, am.bar(m));
                    let rhs =
                        chi(a, b, amb) * tau(amb) * tau(m) / (tau(am.lm(a, m)) * tau(am.mr(m, b)));
                    quasi.record(lhs == rhs, || vec![a, b, m]);
                }
            }
        }

        let mut bider = AxiomCheck::new("biderivation");
        for a in 0..s {
            for b in 0..s {
                for c in 0..s {
                    for m in 0..k {
                        let lhs =
                            ups(a, b, m) / ups(a, b, am.mr(m, am.inv(c))) * chi(am.mul(a, b), c, m);
                        let rhs = chi(a, c, m) * chi(b, c, am.lm(am.inv(a), m));
                        bider.record(lhs == rhs, || vec![a, b, c, m]);
                    }
                }
            }
        }

        let asub = am.a_subgroup();
        let mut bichar = AxiomCheck::new("symmetric-bicharacter-on-A");
        let mut nondeg = AxiomCheck::new("nondegenerate-on-A");
        for m in 0..k {
            for &a in asub {
                for &b in asub {
                    bichar.record(chi(a, b, m) == chi(b, a, m), || vec![a, b, m]);
                    for &c in asub {
                        let ok = chi(am.mul(a, b), c, m) == chi(a, c, m) * chi(b, c, m);
                        bichar.record(ok, || vec![a, b, c, m]);
                    }
                }
                if a != e {
                    let sum = asub
                        .iter()
                        .fold(self.field.zero(), |acc, &b| acc + chi(a, b, m));
                    nondeg.record(sum.is_zero(), || vec![a, m]);
                }
            }
        }

        let mut norm = AxiomCheck::new("tau-norm");
        let order = self.field.elem(asub.len() as u64);
        for m in 0..k {
            norm.record(order * tau(m) * tau(am.bar(m)) == one, || vec![m]);
        }

        AxiomReport {
            checks: vec![units, normalized, quasi, bider, bichar, nondeg, norm],
        }
    }

    pub fn is_valid(&self) -> bool {
        self.check().passed()
    }

    /// `u` relabeled along a graded automorphism given on rule ids.
    pub fn relabel(&self, sigma: &[usize]) -> Uberderivation {
        let am = &*self.ambi;
        let (s, k) = (am.serf_count(), am.lord_count());
        let sp = |a: usize| {
            am.serf_pos(sigma[am.serf_id(a)])
                .expect("graded automorphism")
        };
        let lp = |m: usize| {
            am.lord_pos(sigma[am.lord_id(m)])
                .expect("graded automorphism")
        };
        let mut chi = self.chi.clone();
        let mut ups = self.ups.clone();
        let mut tau = self.tau.clone();
        for a in 0..s {
            for b in 0..s {
                for m in 0..k {
                    chi.set(sp(a), sp(b), lp(m), self.chi.get(a, b, m));
                    ups.set(sp(a), sp(b), lp(m), self.ups.get(a, b, m));
                }
            }
        }
        for m in 0..k {
            tau[lp(m)] = self.tau[m];
        }
        Uberderivation {
            ambi: self.ambi.clone(),
            field: self.field.clone(),
            chi,
            ups,
            tau,
        }
    }

    /// Applies `(θ, φ, ς)`.
    pub fn apply_gauge(&self, g: &GaugeTriple) -> Uberderivation {
        let am = &*self.ambi;
        let (s, k) = (am.serf_count(), am.lord_count());
        let phi = |a, m| g.phi.get(a, m);
        let sig = |m: usize| g.sigma[m];
        let chi = PairTable::from_fn(s, k, |a, b, m| {
            let (ai, bi) = (am.inv(a), am.inv(b));
            let num = phi(a, m) * phi(b, am.act(b, am.bar(m), a)) * sig(am.act(ai, m, bi)) * sig(m);
            let den = phi(a, am.mr(m, bi))
                * phi(b, am.lm(b, am.bar(m)))
                * sig(am.lm(ai, m))
                * sig(am.mr(m, bi));
            self.chi.get(a, b, m) * num / den
        });
        let ups = PairTable::from_fn(s, k, |a, b, m| {
            let d = phi(a, m) * phi(b, am.lm(am.inv(a), m))
                / (phi(am.mul(a, b), m) * g.theta.get(a, b, m));
            self.ups.get(a, b, m) * d
        });
        let tau = (0..k)
            .map(|m| self.tau[m] * sig(am.bar(m)) / sig(m))
            .collect();
        Uberderivation {
            ambi: self.ambi.clone(),
            field: self.field.clone(),
            chi,
            ups,
            tau,
        }
    }
}

/// `(θ, φ, ς)` with `θ` valued in `fix(S)` and `φ` normalized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeTriple {
    pub theta: PairTable,
    pub phi: SingleTable,
    pub sigma: Vec<Fp>,
}

impl GaugeTriple {
    pub fn identity(ambi: &Ambi, field: &Field) -> Self {
        let (s, k) = (ambi.serf_count(), ambi.lord_count());
        let one = field.one();
        GaugeTriple {
            theta: PairTable::filled(s, k, one),
            phi: SingleTable::from_fn(s, k, |_, _| one),
            sigma: vec![one; k],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.theta
            .values
            .iter()
            .chain(&self.phi.values)
            .chain(&self.sigma)
            .all(|v| v.value() == 1)
    }

    /// `θ` fixed, `φ(1) = 1`, all values invertible.
    pub fn is_admissible(&self, ambi: &Ambi) -> bool {
        let s = ambi.serf_count();
        let e = ambi.unit();
        let k = ambi.lord_count();
        let nonzero = self
            .theta
            .values
            .iter()
            .chain(&self.phi.values)
            .chain(&self.sigma)
            .all(|v| !v.is_zero());
        nonzero
            && (0..k).all(|m| self.phi.get(e, m).value() == 1)
            && (0..s).all(|a| (0..s).all(|b| ambi.is_fixed(self.theta.row(a, b))))
    }
}

/// `Ψ f`: `χ = α₂`, `υ = α₃`, `τ = γ(1, 1)`.
pub fn psi(ambi: &Arc<Ambi>, f: &FusionSystem) -> Result<Uberderivation> {
    let d = Decomposition::of(ambi, f)?;
    let e = ambi.unit();
    let k = ambi.lord_count();
    Ok(Uberderivation {
        ambi: ambi.clone(),
        field: f.field().clone(),
        chi: d.alpha2.clone(),
        ups: d.alpha3.clone(),
        tau: (0..k).map(|m| d.gamma.get(e, e, m)).collect(),
    })
}

/// `Ψ ξ = (θ, φ, ς)`.
pub fn psi_gauge(ambi: &Arc<Ambi>, xi: &GaugeXi) -> GaugeTriple {
    let g = GaugeParts::of(ambi, xi);
    let e = ambi.unit();
    let k = ambi.lord_count();
    GaugeTriple {
        theta: g.theta.clone(),
        phi: g.phi.clone(),
        sigma: (0..k).map(|m| g.omega.get(e, m)).collect(),
    }
}

/// The normal fusion system whose image under `Ψ` is `u`.
pub fn reconstruct(u: &Uberderivation) -> Result<FusionSystem> {
    let report = u.check();
    if !report.passed() {
        return Err(Error::Domain(format!(
            "not an überderivation: {}",
            report.failed_axioms().join(", ")
        )));
    }
    let am = &*u.ambi;
    let (s, k) = (am.serf_count(), am.lord_count());
    let ups = |a, b, m| u.ups.get(a, b, m);
    let chi = |a, b, m| u.chi.get(a, b, m);
    let tau = |m: usize| u.tau[m];
    let mul = |a, b| am.mul(a, b);
    let inv = |a| am.inv(a);

    // α = 1/δ̀υ, which must not depend on the lord.
    let mut alpha = vec![u.field.one(); s * s * s];
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                let mut value = None;
                for m in 0..k {
                    let d = ups(a, mul(b, c), m) * ups(b, c, am.lm(inv(a), m))
                        / (ups(a, b, m) * ups(mul(a, b), c, m));
                    let v = d.inv();
                    match value {
                        None => value = Some(v),
                        Some(w) if w != v => {
                            return Err(Error::Domain(format!(
                                "1/δ̀υ({a},{b},{c}) depends on the lord"
                            )))
                        }
                        _ => {}
                    }
                }
                alpha[(a * s + b) * s + c] = value.expect("at least one lord");
            }
        }
    }
    let al = |a: usize, b: usize, c: usize| alpha[(a * s + b) * s + c];

    let beta1 = PairTable::from_fn(s, k, |b, a, m| {
        let ai = inv(a);
        al(ai, b, mul(inv(b), a)) / ups(ai, b, am.lm(mul(ai, b), m))
    });
    let beta2 = PairTable::from_fn(s, k, |b, a, m| {
        let ai = inv(a);
        let mb = am.mr(m, b);
        ups(a, ai, m) / ups(a, ai, mb) * chi(a, b, mb)
    });
    let alpha1 = PairTable::from_fn(s, k, |b, c, m| ups(b, c, am.lm(mul(b, c), am.bar(m))).inv());
    let gamma = PairTable::from_fn(s, k, |c, a, m| {
        let n = am.lm(inv(a), m);
        tau(n) * ups(inv(c), c, am.bar(n)) / ups(inv(a), a, am.mr(n, inv(c))) / chi(a, c, m)
    });
    let beta3 = PairTable::from_fn(s, k, |a, c, m| {
        let ci = inv(c);
        ups(a, ci, am.bar(m)) * tau(am.mr(m, a))
            / (al(a, ci, c) * al(mul(a, ci), mul(c, inv(a)), a) * tau(m))
    });

    let d = Decomposition {
        alpha,
        alpha1,
        alpha2: u.chi.clone(),
        alpha3: u.ups.clone(),
        beta1,
        beta2,
        beta3,
        gamma,
        s,
        k,
    };
    let support = Support::new(am.feudal().rule())?;
    d.assemble(&u.ambi, support, u.field.clone())
}

/// `β₁(−, 1) = β₂(−, 1) ≡ 1`.
pub fn is_normal(ambi: &Arc<Ambi>, f: &FusionSystem) -> Result<bool> {
    let d = Decomposition::of(ambi, f)?;
    let e = ambi.unit();
    let one = f.field().one();
    Ok((0..ambi.serf_count()).all(|a| {
        (0..ambi.lord_count()).all(|m| d.beta1.get(a, e, m) == one && d.beta2.get(a, e, m) == one)
    }))
}

/// A normal system gauge equivalent to `f`, with the gauge used. `θ` and
/// `φ` are left trivial; `ω` clears `β₁(−, 1)` and then `ψ` clears `β₂(−, 1)`.
pub fn normalize(ambi: &Arc<Ambi>, f: &FusionSystem) -> Result<(FusionSystem, GaugeXi)> {
    let d = Decomposition::of(ambi, f)?;
    let e = ambi.unit();
    let field = f.field().clone();
    let support = f.support().clone();
    let one = field.one();
    let xi = GaugeXi::from_fn(support, field, |&[x, y, r]| {
        let (xs, ys) = (ambi.serf_pos(x), ambi.serf_pos(y));
        match (xs, ys) {
            (Some(_), _) => one,
            (None, Some(a)) => {
                // (mā, a, m): ψ(a)(m) = β₂(a, 1)(m ā)
                let m = ambi.lord_pos(r).expect("lord");
                d.beta2.get(a, e, ambi.mr(m, ambi.inv(a)))
            }
            (None, None) => {
                // (m, m̄a, a): ω(a)(m) = 1/β₁(ā, 1)(m)
                let m = ambi.lord_pos(x).expect("lord");
                let a = ambi.serf_pos(r).expect("serf");
                d.beta1.get(ambi.inv(a), e, m).inv()
            }
        }
    });
    let g = f.apply_gauge(&xi)?;
    Ok((g, xi))
}

/// The necessary conditions for a fusion system to exist on a feudal rule.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub p: u32,
    pub a_order: usize,
    pub a_abelian: bool,
    pub characteristic_divides_a: bool,
    pub needs_sqrt: bool,
    pub sqrt_available: bool,
    pub obstructions: Vec<String>,
}

impl ObstructionReport {
    pub fn obstructed(&self) -> bool {
        !self.obstructions.is_empty()
    }
}

pub fn check_existence_obstructions(
    feudal: &FeudalRule,
    field: &Field,
) -> Result<ObstructionReport> {
    let ambi = Ambi::new(feudal)?;
    let g = ambi.group();
    let asub = ambi.a_subgroup();
    let a_abelian = asub
        .iter()
        .all(|&a| asub.iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
    let n = asub.len() as u64;
    let characteristic_divides_a = n % field.p() as u64 == 0;
    let k = ambi.lord_count();
    let needs_sqrt = k % 2 == 1 || (0..k).any(|m| ambi.bar(m) == m);
    let sqrt_available = field.sqrt(field.elem(n)).is_some();
    let mut obstructions = Vec::new();
    if !a_abelian {
        obstructions.push("A is not abelian".to_string());
    }
    if characteristic_divides_a {
        obstructions.push(format!("characteristic {} divides |A| = {n}", field.p()));
    }
    if needs_sqrt && !sqrt_available {
        obstructions.push(format!("|A| = {n} has no square root in GF({})", field.p()));
    }
    Ok(ObstructionReport {
        p: field.p(),
        a_order: asub.len(),
        a_abelian,
        characteristic_divides_a,
        needs_sqrt,
        sqrt_available,
        obstructions,
    })
}

#[cfg(test)]
mod tests;
