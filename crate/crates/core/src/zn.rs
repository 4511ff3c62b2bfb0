//! Linear algebra over the ring Z/N.
//!
//! N is usually `p - 1` for a prime `p`, so it is composite and ordinary
//! field elimination does not apply. Everything here goes through a
//! Smith-style diagonalisation `U A V = D` built from unimodular 2x2
//! Bezout steps, which keeps every entry reduced below N.

use crate::scalars::gcd;

/// Dense matrix over Z/N, row-major, entries reduced into `[0, N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZnMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    data: Vec<u64>,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

impl ZnMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        assert!(modulus >= 1);
        ZnMatrix {
            rows,
            cols,
            modulus,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_columns(columns: &[Vec<u64>], rows: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(rows, columns.len(), modulus);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus;
    }

    /// Adds a signed integer to an entry.
    pub fn add_signed(&mut self, i: usize, j: usize, v: i64) {
        let n = self.modulus as i64;
        let cur = self.get(i, j) as i64;
        self.data[i * self.cols + j] = (cur + v).rem_euclid(n) as u64;
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        let n = self.modulus as u128;
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                (row.iter()
                    .zip(x)
                    .map(|(&a, &b)| a as u128 * b as u128)
                    .sum::<u128>()
                    % n) as u64
            })
            .collect()
    }

    pub fn mul(&self, other: &ZnMatrix) -> ZnMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ZnMatrix::zeros(self.rows, other.cols, self.modulus);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = (out.data[idx] + a * other.get(k, j)) % self.modulus;
                }
            }
        }
        out
    }

    // Row op on rows (s, t): [r_s; r_t] <- [[a, b], [c, d]] [r_s; r_t].
    fn row_mix(&mut self, s: usize, t: usize, a: u64, b: u64, c: u64, d: u64) {
        let n = self.modulus;
        for j in 0..self.cols {
            let x = self.data[s * self.cols + j];
            let y = self.data[t * self.cols + j];
            self.data[s * self.cols + j] = (a * x + b * y) % n;
            self.data[t * self.cols + j] = (c * x + d * y) % n;
        }
    }

    // Column op on columns (s, t): [c_s c_t] <- [c_s c_t] [[a, c], [b, d]].
    fn col_mix(&mut self, s: usize, t: usize, a: u64, b: u64, c: u64, d: u64) {
        let n = self.modulus;
        for i in 0..self.rows {
            let x = self.data[i * self.cols + s];
            let y = self.data[i * self.cols + t];
            self.data[i * self.cols + s] = (a * x + b * y) % n;
            self.data[i * self.cols + t] = (c * x + d * y) % n;
        }
    }

    fn swap_rows(&mut self, s: usize, t: usize) {
        if s == t {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(s * self.cols + j, t * self.cols + j);
        }
    }

    fn swap_cols(&mut self, s: usize, t: usize) {
        if s == t {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + s, i * self.cols + t);
        }
    }
}

/// Result of diagonalising `A`: `u * A * v = diag(d)`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub modulus: u64,
    /// Diagonal entries, one per pivot.
    pub diag: Vec<u64>,
    pub u: Option<ZnMatrix>,
    pub u_inv: Option<ZnMatrix>,
    pub v: ZnMatrix,
    pub rows: usize,
    pub cols: usize,
}

// Unimodular mixing coefficients that send (x, y) to (gcd, 0), reduced mod n.
fn bezout_step(x: u64, y: u64, n: u64) -> (u64, u64, u64, u64) {
    // Keep the pivot row intact when it already divides; otherwise the
    // row and column passes can trade the same entries back and forth.
    if y % x == 0 {
        return (1, 0, (n - (y / x) % n) % n, 1);
    }
    let (g, s, t) = ext_gcd(x as i128, y as i128);
    let nn = n as i128;
    let red = |v: i128| v.rem_euclid(nn) as u64;
    (red(s), red(t), red(-(y as i128) / g), red(x as i128 / g))
}

/// Diagonalises `a` with unimodular row and column operations.
pub fn smith(a: &ZnMatrix, track_u: bool) -> Smith {
    let n = a.modulus;
    let mut m = a.clone();
    let mut u = track_u.then(|| ZnMatrix::identity(a.rows, n));
    let mut u_inv = track_u.then(|| ZnMatrix::identity(a.rows, n));
    let mut v = ZnMatrix::identity(a.cols, n);
    let mut diag = Vec::new();
    let limit = a.rows.min(a.cols);

    for t in 0..limit {
        // Pivot: nonzero entry generating the largest ideal.
        let mut best: Option<(u64, usize, usize)> = None;
        'search: for i in t..m.rows {
            for j in t..m.cols {
                let x = m.get(i, j);
                if x != 0 {
                    let g = gcd(x, n);
                    if best.map_or(true, |(bg, _, _)| g < bg) {
                        best = Some((g, i, j));
                        if g == 1 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        m.swap_rows(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        if let Some(ui) = u_inv.as_mut() {
            ui.swap_cols(t, pi);
        }
        m.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut changed = false;
            for i in t + 1..m.rows {
                let y = m.get(i, t);
                if y == 0 {
                    continue;
                }
                let x = m.get(t, t);
                let (s, tt, c, d) = bezout_step(x, y, n);
                m.row_mix(t, i, s, tt, c, d);
                if let Some(u) = u.as_mut() {
                    u.row_mix(t, i, s, tt, c, d);
                }
                if let Some(ui) = u_inv.as_mut() {
                    // Inverse of [[s, tt], [c, d]] (determinant 1) applied on the right.
                    let ntt = (n - tt % n) % n;
                    let nc = (n - c % n) % n;
                    ui.col_mix(t, i, d, nc, ntt, s);
                }
                changed = true;
            }
            for j in t + 1..m.cols {
                let y = m.get(t, j);
                if y == 0 {
                    continue;
                }
                let x = m.get(t, t);
                let (s, tt, c, d) = bezout_step(x, y, n);
                m.col_mix(t, j, s, tt, c, d);
                v.col_mix(t, j, s, tt, c, d);
                changed = true;
            }
            let clean = (t + 1..m.rows).all(|i| m.get(i, t) == 0)
                && (t + 1..m.cols).all(|j| m.get(t, j) == 0);
            if clean || !changed {
                break;
            }
        }
        let d = m.get(t, t);
        if d == 0 {
            break;
        }
        diag.push(d);
    }
    Smith {
        modulus: n,
        diag,
        u,
        u_inv,
        v,
        rows: a.rows,
        cols: a.cols,
    }
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Generators of `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let n = self.modulus;
        let mut gens = Vec::new();
        for t in 0..self.cols {
            let scale = if t < self.diag.len() {
                let g = gcd(self.diag[t], n);
                n / g
            } else {
                1
            };
            if scale % n == 0 {
                continue;
            }
            gens.push(
                self.v
                    .column(t)
                    .into_iter()
                    .map(|x| x * scale % n)
                    .collect(),
            );
        }
        gens
    }

    /// One solution of `A x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let n = self.modulus;
        let u = self.u.as_ref().expect("solve needs the row transform");
        let c = u.mul_vec(b);
        let mut y = vec![0u64; self.cols];
        for (t, &ct) in c.iter().enumerate() {
            if t < self.diag.len() {
                let d = self.diag[t];
                let g = gcd(d, n);
                if ct % g != 0 {
                    return None;
                }
                let nm = n / g;
                let inv = inv_mod((d / g) % nm, nm).expect("d/g is a unit mod n/g");
                y[t] = ((ct / g) % nm) * inv % nm;
            } else if ct != 0 {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }

    /// A key for the coset `b + im A`; two vectors share a key exactly when
    /// their difference lies in the column span.
    pub fn coset_key(&self, b: &[u64]) -> Vec<u64> {
        let n = self.modulus;
        let u = self.u.as_ref().expect("coset_key needs the row transform");
        let mut c = u.mul_vec(b);
        for (t, ct) in c.iter_mut().enumerate() {
            if t < self.diag.len() {
                *ct %= gcd(self.diag[t], n);
            }
        }
        c
    }
}

/// Convenience wrapper around [`smith`] + [`Smith::solve`].
pub fn solve(a: &ZnMatrix, b: &[u64]) -> Option<Vec<u64>> {
    smith(a, true).solve(b)
}

/// Decomposition of a finite abelian group given as a quotient `K / I` of
/// subgroups of `(Z/N)^c`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub modulus: u64,
    /// Orders of the cyclic factors (all > 1).
    pub orders: Vec<u64>,
    /// One lift in `K` per cyclic factor.
    pub generators: Vec<Vec<u64>>,
}

impl Quotient {
    pub fn order(&self) -> u128 {
        self.orders.iter().map(|&o| o as u128).product()
    }

    /// Canonical invariant factors `e_1 | e_2 | ...`.
    pub fn invariant_factors(&self) -> Vec<u64> {
        invariant_factors(&self.orders)
    }

    /// Every element, as a lift in `K`, in lexicographic coefficient order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let dim = self.generators.first().map_or(0, Vec::len);
        let mut out = vec![vec![0u64; dim]];
        for (gen, &ord) in self.generators.iter().zip(&self.orders) {
            let mut next = Vec::with_capacity(out.len() * ord as usize);
            for base in &out {
                for k in 0..ord {
                    next.push(
                        base.iter()
                            .zip(gen)
                            .map(|(&b, &g)| (b + k * g) % self.modulus)
                            .collect(),
                    );
                }
            }
            out = next;
        }
        out
    }
}

/// Computes `span(big) / span(small)`; every generator of `small` must lie in
/// `span(big)`. `dim` is the ambient dimension.
pub fn quotient(big: &[Vec<u64>], small: &[Vec<u64>], dim: usize, modulus: u64) -> Quotient {
    let n = modulus;
    if big.is_empty() {
        return Quotient {
            modulus: n,
            orders: Vec::new(),
            generators: Vec::new(),
        };
    }
    let k = big.len();
    let kmat = ZnMatrix::from_columns(big, dim, n);
    let ks = smith(&kmat, true);
    let mut relations = ks.kernel();
    for w in small {
        let z = ks
            .solve(w)
            .expect("subgroup generator must lie in the ambient span");
        relations.push(z);
    }
    let rmat = ZnMatrix::from_columns(&relations, k, n);
    let rs = smith(&rmat, true);
    let u_inv = rs.u_inv.as_ref().expect("tracked");
    let mut orders = Vec::new();
    let mut generators = Vec::new();
    for t in 0..k {
        let ord = if t < rs.diag.len() {
            gcd(rs.diag[t], n)
        } else {
            n
        };
        if ord <= 1 {
            continue;
        }
        let z = u_inv.column(t);
        generators.push(kmat.mul_vec(&z));
        orders.push(ord);
    }
    Quotient {
        modulus: n,
        orders,
        generators,
    }
}

fn prime_power_parts(mut x: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            let mut q = 1;
            while x % d == 0 {
                x /= d;
                q *= d;
            }
            out.push((d, q));
        }
        d += 1;
    }
    if x > 1 {
        out.push((x, x));
    }
    out
}

/// Invariant factors of `⊕ Z/o_i`, smallest first.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &o in orders {
        for (p, q) in prime_power_parts(o) {
            by_prime.entry(p).or_default().push(q);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; len];
    for qs in by_prime.values_mut() {
        qs.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in qs.iter().enumerate() {
            factors[i] *= q;
        }
    }
    factors.reverse();
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[u64]], n: u64) -> ZnMatrix {
        let r = rows.len();
        let c = rows[0].len();
        let mut m = ZnMatrix::zeros(r, c, n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    fn brute_kernel_size(a: &ZnMatrix) -> usize {
        let n = a.modulus();
        let c = a.cols();
        let total = (n as usize).pow(c as u32);
        (0..total)
            .filter(|&code| {
                let mut x = vec![0u64; c];
                let mut k = code;
                for xi in x.iter_mut() {
                    *xi = (k % n as usize) as u64;
                    k /= n as usize;
                }
                a.mul_vec(&x).iter().all(|&v| v == 0)
            })
            .count()
    }

    fn span_size(gens: &[Vec<u64>], n: u64) -> usize {
        use std::collections::HashSet;
        let dim = gens.first().map_or(0, Vec::len);
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut frontier = vec![vec![0u64; dim]];
        seen.insert(vec![0u64; dim]);
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % n).collect();
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn diagonalisation_is_consistent() {
        let a = mat(&[&[2, 4, 6], &[3, 1, 0], &[6, 2, 0]], 12);
        let s = smith(&a, true);
        let u = s.u.clone().unwrap();
        let d = u.mul(&a).mul(&s.v);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j && i < s.diag.len() {
                    s.diag[i]
                } else {
                    0
                };
                assert_eq!(d.get(i, j), expect, "entry {i},{j}");
            }
        }
        let ui = s.u_inv.clone().unwrap();
        assert_eq!(u.mul(&ui), ZnMatrix::identity(3, 12));
    }

    #[test]
    fn kernel_matches_brute_force() {
        let cases = [
            mat(&[&[2, 4, 6], &[3, 1, 0]], 12),
            mat(&[&[2, 0], &[0, 3]], 6),
            mat(&[&[4, 2, 2]], 8),
            mat(&[&[0, 0]], 4),
        ];
        for a in cases {
            let s = smith(&a, false);
            let gens = s.kernel();
            for g in &gens {
                assert!(a.mul_vec(g).iter().all(|&v| v == 0));
            }
            assert_eq!(span_size(&gens, a.modulus()), brute_kernel_size(&a));
        }
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = mat(&[&[2, 0], &[0, 2]], 4);
        assert!(solve(&a, &[1, 0]).is_none());
        let x = solve(&a, &[2, 2]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![2, 2]);
    }

    #[test]
    fn quotient_of_cyclic_groups() {
        // (Z/12) / <4> has order 4.
        let q = quotient(&[vec![1]], &[vec![4]], 1, 12);
        assert_eq!(q.order(), 4);
        assert_eq!(q.invariant_factors(), vec![4]);
        assert_eq!(q.elements().len(), 4);
    }

    #[test]
    fn invariant_factor_normalisation() {
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[2, 4, 3]), vec![2, 12]);
        assert!(invariant_factors(&[]).is_empty());
    }

    #[test]
    fn modulus_one_is_trivial() {
        let a = mat(&[&[0, 0]], 1);
        let s = smith(&a, true);
        assert_eq!(s.rank(), 0);
        assert_eq!(s.solve(&[0]).unwrap(), vec![0, 0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn kernel_size_matches_brute_force(
                n in prop::sample::select(vec![2u64, 4, 6, 8, 12]),
                entries in prop::collection::vec(0u64..12, 6),
            ) {
                let mut a = ZnMatrix::zeros(2, 3, n);
                for (k, &e) in entries.iter().enumerate() {
                    a.set(k / 3, k % 3, e);
                }
                let s = smith(&a, true);
                prop_assert_eq!(span_size(&s.kernel(), n), brute_kernel_size(&a));
                let b = a.mul_vec(&[1, 2, 3]);
                let x = s.solve(&b).unwrap();
                prop_assert_eq!(a.mul_vec(&x), b);
            }
        }
    }
}
