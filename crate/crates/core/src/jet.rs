//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] holds the Taylor coefficients of a complex function of the
//! variables `z_1..z_n, z̄_1..z̄_n, t_1..t_p` about a point, up to a fixed total
//! order. `z_i` and `z̄_i` are independent (Wirtinger) variables, so `∂/∂z_i`
//! and `∂/∂z̄_i` are plain coordinate derivatives of the jet.
//!
//! Monomials are enumerated by total degree, so the jet of order `k - 1` is a
//! prefix of the jet of order `k`.

use num_complex::Complex64 as C64;
use smallvec::SmallVec;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

pub type Coeffs = SmallVec<[C64; 8]>;

/// Monomial tables for one `(nz, nt, order)` triple. Spaces are interned and
/// live for the whole process.
pub struct JetSpace {
    nz: usize,
    nt: usize,
    order: u32,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    mul: Vec<(u32, u32, u32)>,
    deriv: Vec<Vec<(u32, u32, f64)>>,
    conj: Vec<u32>,
    lower: Option<&'static JetSpace>,
}

type Registry = Mutex<HashMap<(usize, usize, u32), &'static JetSpace>>;

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

fn monomials(nv: usize, degree: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() + 1 == nv {
        prefix.push(degree as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=degree).rev() {
        prefix.push(first as u8);
        monomials(nv, degree - first, prefix, out);
        prefix.pop();
    }
}

impl JetSpace {
    pub fn get(nz: usize, nt: usize, order: u32) -> &'static JetSpace {
        let mut reg = registry().lock().unwrap_or_else(|e| e.into_inner());
        Self::get_locked(&mut reg, nz, nt, order)
    }

    fn get_locked(
        reg: &mut HashMap<(usize, usize, u32), &'static JetSpace>,
        nz: usize,
        nt: usize,
        order: u32,
    ) -> &'static JetSpace {
        if let Some(s) = reg.get(&(nz, nt, order)) {
            return s;
        }
        let lower = if order > 0 {
            Some(Self::get_locked(reg, nz, nt, order - 1))
        } else {
            None
        };
        let space: &'static JetSpace = Box::leak(Box::new(Self::build(nz, nt, order, lower)));
        reg.insert((nz, nt, order), space);
        space
    }

    fn build(nz: usize, nt: usize, order: u32, lower: Option<&'static JetSpace>) -> JetSpace {
        let nv = 2 * nz + nt;
        let mut exps = Vec::new();
        if nv == 0 {
            exps.push(Vec::new());
        } else {
            for d in 0..=order as usize {
                monomials(nv, d, &mut Vec::new(), &mut exps);
            }
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let deg = |e: &Vec<u8>| e.iter().map(|&x| x as u32).sum::<u32>();

        let mut mul = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            let da = deg(a);
            for (j, b) in exps.iter().enumerate() {
                if da + deg(b) > order {
                    continue;
                }
                let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                mul.push((i as u32, j as u32, index[&s] as u32));
            }
        }

        let mut deriv = vec![Vec::new(); nv];
        for (v, table) in deriv.iter_mut().enumerate() {
            for (i, e) in exps.iter().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let mut d = e.clone();
                d[v] -= 1;
                table.push((i as u32, index[&d] as u32, e[v] as f64));
            }
        }

        let conj = exps
            .iter()
            .map(|e| {
                let mut s = e.clone();
                for i in 0..nz {
                    s.swap(i, nz + i);
                }
                index[&s] as u32
            })
            .collect();

        JetSpace { nz, nt, order, exps, index, mul, deriv, conj, lower }
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nvars(&self) -> usize {
        2 * self.nz + self.nt
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exps[i]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// Space of the given lower order.
    pub fn at_order(&'static self, order: u32) -> &'static JetSpace {
        let mut s = self;
        while s.order > order {
            s = s.lower.expect("order-0 space has no lower space");
        }
        if s.order < order {
            return JetSpace::get(self.nz, self.nt, order);
        }
        s
    }

    pub fn z_var(&self, i: usize) -> usize {
        i
    }

    pub fn zbar_var(&self, i: usize) -> usize {
        self.nz + i
    }

    pub fn t_var(&self, j: usize) -> usize {
        2 * self.nz + j
    }
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetSpace(nz={}, nt={}, order={})", self.nz, self.nt, self.order)
    }
}

#[derive(Clone)]
pub struct Jet {
    space: &'static JetSpace,
    c: Coeffs,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[o{}]{:?}", self.space.order, self.c.as_slice())
    }
}

impl Jet {
    pub fn zero(space: &'static JetSpace) -> Jet {
        Jet { space, c: SmallVec::from_elem(C64::new(0.0, 0.0), space.len()) }
    }

    pub fn constant(space: &'static JetSpace, v: C64) -> Jet {
        let mut j = Jet::zero(space);
        j.c[0] = v;
        j
    }

    /// The coordinate function of variable `var` with value `v` at the point.
    pub fn var(space: &'static JetSpace, var: usize, v: C64) -> Jet {
        let mut j = Jet::constant(space, v);
        if space.order > 0 {
            j.c[1 + var] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(space: &'static JetSpace, c: Coeffs) -> Jet {
        assert_eq!(c.len(), space.len(), "coefficient count does not match jet space");
        Jet { space, c }
    }

    pub fn space(&self) -> &'static JetSpace {
        self.space
    }

    pub fn order(&self) -> u32 {
        self.space.order
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    pub fn coeff(&self, exps: &[u8]) -> C64 {
        match self.space.index_of(exps) {
            Some(i) => self.c[i],
            None => C64::new(0.0, 0.0),
        }
    }

    /// Partial derivative for a multi-index: coefficient times the product of factorials.
    pub fn partial(&self, exps: &[u8]) -> C64 {
        let fact: f64 = exps.iter().map(|&k| (1..=k as u64).product::<u64>() as f64).product();
        self.coeff(exps) * fact
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.re == 0.0 && x.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn truncate(&self, order: u32) -> Jet {
        if order >= self.space.order {
            return self.clone();
        }
        let space = self.space.at_order(order);
        Jet { space, c: self.c[..space.len()].iter().copied().collect() }
    }

    fn aligned<'a>(a: &'a Jet, b: &'a Jet) -> (std::borrow::Cow<'a, Jet>, std::borrow::Cow<'a, Jet>) {
        use std::borrow::Cow;
        debug_assert!(
            a.space.nz == b.space.nz && a.space.nt == b.space.nt,
            "jets over different variable sets"
        );
        match a.space.order.cmp(&b.space.order) {
            std::cmp::Ordering::Equal => (Cow::Borrowed(a), Cow::Borrowed(b)),
            std::cmp::Ordering::Less => (Cow::Borrowed(a), Cow::Owned(b.truncate(a.space.order))),
            std::cmp::Ordering::Greater => (Cow::Owned(a.truncate(b.space.order)), Cow::Borrowed(b)),
        }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let (a, b) = Jet::aligned(self, o);
        let c = a.c.iter().zip(b.c.iter()).map(|(x, y)| x + y).collect();
        Jet { space: a.space, c }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let (a, b) = Jet::aligned(self, o);
        let c = a.c.iter().zip(b.c.iter()).map(|(x, y)| x - y).collect();
        Jet { space: a.space, c }
    }

    pub fn add_assign(&mut self, o: &Jet) {
        if o.space.order < self.space.order {
            *self = self.truncate(o.space.order);
        }
        for (x, y) in self.c.iter_mut().zip(o.c.iter()) {
            *x += y;
        }
    }

    /// `self += s * o`
    pub fn axpy(&mut self, s: C64, o: &Jet) {
        if o.space.order < self.space.order {
            *self = self.truncate(o.space.order);
        }
        for (x, y) in self.c.iter_mut().zip(o.c.iter()) {
            *x += s * y;
        }
    }

    pub fn neg(&self) -> Jet {
        Jet { space: self.space, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet { space: self.space, c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Jet {
        Jet { space: self.space, c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn add_const(&self, v: C64) -> Jet {
        let mut j = self.clone();
        j.c[0] += v;
        j
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let (a, b) = Jet::aligned(self, o);
        let space = a.space;
        if space.order == 0 {
            return Jet::constant(space, a.c[0] * b.c[0]);
        }
        let mut c: Coeffs = SmallVec::from_elem(C64::new(0.0, 0.0), space.len());
        for &(i, j, k) in &space.mul {
            c[k as usize] += a.c[i as usize] * b.c[j as usize];
        }
        Jet { space, c }
    }

    /// `f(self)` where `series[k] = f^{(k)}(v)/k!` at the value `v` of `self`.
    pub fn compose(&self, series: &[C64]) -> Jet {
        let k = self.space.order as usize;
        let mut nil = self.clone();
        nil.c[0] = C64::new(0.0, 0.0);
        let coef = |i: usize| series.get(i).copied().unwrap_or(C64::new(0.0, 0.0));
        let mut acc = Jet::constant(self.space, coef(k));
        for i in (0..k).rev() {
            acc = acc.mul(&nil).add_const(coef(i));
        }
        acc
    }

    /// `1/self`, or `None` when the value vanishes.
    pub fn recip(&self) -> Option<Jet> {
        let v = self.c[0];
        if v.norm() == 0.0 || !v.is_finite() {
            return None;
        }
        let k = self.space.order as usize;
        let inv = 1.0 / v;
        let mut series = Vec::with_capacity(k + 1);
        let mut p = inv;
        for _ in 0..=k {
            series.push(p);
            p *= -inv;
        }
        Some(self.compose(&series))
    }

    pub fn exp(&self) -> Jet {
        let k = self.space.order as usize;
        let e = self.c[0].exp();
        let mut series = Vec::with_capacity(k + 1);
        let mut f = 1.0;
        for i in 0..=k {
            if i > 0 {
                f *= i as f64;
            }
            series.push(e / f);
        }
        self.compose(&series)
    }

    /// Complex conjugate: swaps the roles of `z_i` and `z̄_i`.
    pub fn conj(&self) -> Jet {
        let mut c: Coeffs = SmallVec::from_elem(C64::new(0.0, 0.0), self.c.len());
        for (i, x) in self.c.iter().enumerate() {
            c[self.space.conj[i] as usize] = x.conj();
        }
        Jet { space: self.space, c }
    }

    pub fn re(&self) -> Jet {
        self.add(&self.conj()).scale_re(0.5)
    }

    pub fn im(&self) -> Jet {
        self.sub(&self.conj()).scale(C64::new(0.0, -0.5))
    }

    /// Derivative with respect to jet variable `var`; the order drops by one.
    /// Returns `None` for an order-0 jet.
    pub fn deriv(&self, var: usize) -> Option<Jet> {
        let lower = self.space.lower?;
        let mut c: Coeffs = SmallVec::from_elem(C64::new(0.0, 0.0), lower.len());
        for &(src, dst, f) in &self.space.deriv[var] {
            c[dst as usize] += self.c[src as usize] * f;
        }
        Some(Jet { space: lower, c })
    }

    /// Re-express a jet in `(z, z̄, t)` as a jet in `(z, z̄)` by setting all
    /// `t` displacements to zero.
    pub fn drop_t(&self) -> Jet {
        let sp = self.space;
        if sp.nt == 0 {
            return self.clone();
        }
        let target = JetSpace::get(sp.nz, 0, sp.order);
        let mut c: Coeffs = SmallVec::from_elem(C64::new(0.0, 0.0), target.len());
        for (i, e) in sp.exps.iter().enumerate() {
            if e[2 * sp.nz..].iter().all(|&x| x == 0) {
                let j = target.index[&e[..2 * sp.nz]];
                c[j] = self.c[i];
            }
        }
        Jet { space: target, c }
    }

    /// Embed a jet in `(z, z̄)` into the space with `nt` extra variables.
    pub fn with_t_vars(&self, nt: usize) -> Jet {
        let sp = self.space;
        assert_eq!(sp.nt, 0, "jet already carries simplex variables");
        if nt == 0 {
            return self.clone();
        }
        let target = JetSpace::get(sp.nz, nt, sp.order);
        let mut c: Coeffs = SmallVec::from_elem(C64::new(0.0, 0.0), target.len());
        for (i, e) in sp.exps.iter().enumerate() {
            let mut ext = e.clone();
            ext.resize(2 * sp.nz + nt, 0);
            c[target.index[&ext]] = self.c[i];
        }
        Jet { space: target, c }
    }
}

/// Truncated Taylor series of a real function of one real variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Series(pub Vec<f64>);

impl Series {
    pub fn constant(v: f64, order: usize) -> Series {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Series(c)
    }

    pub fn var(x0: f64, order: usize) -> Series {
        let mut s = Series::constant(x0, order);
        if order > 0 {
            s.0[1] = 1.0;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn add(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Series {
        Series(self.0.iter().map(|a| a * s).collect())
    }

    pub fn add_const(&self, v: f64) -> Series {
        let mut s = self.clone();
        s.0[0] += v;
        s
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.0.len().min(o.0.len());
        let mut c = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Series(c)
    }

    pub fn recip(&self) -> Series {
        let a = &self.0;
        let mut b = vec![0.0; a.len()];
        b[0] = 1.0 / a[0];
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|i| a[i] * b[n - i]).sum();
            b[n] = -s / a[0];
        }
        Series(b)
    }

    pub fn exp(&self) -> Series {
        let a = &self.0;
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].exp();
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|i| i as f64 * a[i] * b[n - i]).sum();
            b[n] = s / n as f64;
        }
        Series(b)
    }

    pub fn ln(&self) -> Series {
        let a = &self.0;
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].ln();
        for n in 1..a.len() {
            let s: f64 = (1..n).map(|k| k as f64 * b[k] * a[n - k]).sum();
            b[n] = (a[n] - s / n as f64) / a[0];
        }
        Series(b)
    }

    pub fn to_complex(&self) -> Vec<C64> {
        self.0.iter().map(|&x| C64::new(x, 0.0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn prefix_property() {
        let hi = JetSpace::get(2, 1, 3);
        let lo = JetSpace::get(2, 1, 2);
        for i in 0..lo.len() {
            assert_eq!(hi.exponents(i), lo.exponents(i));
        }
        assert_eq!(hi.len(), 56);
    }

    #[test]
    fn product_matches_polynomial_partials() {
        // f = z1^2 * zb1 * z2 at (0.3+0.1i, -0.2+0.5i)
        let sp = JetSpace::get(2, 0, 4);
        let z1 = c(0.3, 0.1);
        let z2 = c(-0.2, 0.5);
        let j1 = Jet::var(sp, sp.z_var(0), z1);
        let jb = Jet::var(sp, sp.zbar_var(0), z1.conj());
        let j2 = Jet::var(sp, sp.z_var(1), z2);
        let f = j1.mul(&j1).mul(&jb).mul(&j2);
        assert!(close(f.value(), z1 * z1 * z1.conj() * z2, 1e-15));
        // d/dz1 = 2 z1 zb1 z2
        assert!(close(f.partial(&[1, 0, 0, 0]), 2.0 * z1 * z1.conj() * z2, 1e-14));
        // d2/dz1 dzb1 = 2 z1 z2
        assert!(close(f.partial(&[1, 0, 1, 0]), 2.0 * z1 * z2, 1e-14));
        // d3/dz1^2 dz2 = 2 zb1
        assert!(close(f.partial(&[2, 1, 0, 0]), 2.0 * z1.conj(), 1e-14));
        // d4/dz1^2 dzb1 dz2 = 2
        assert!(close(f.partial(&[2, 1, 1, 0]), c(2.0, 0.0), 1e-14));
    }

    #[test]
    fn recip_and_exp_match_closed_forms() {
        let sp = JetSpace::get(1, 0, 3);
        let z = c(0.7, -0.4);
        let jz = Jet::var(sp, 0, z);
        let r = jz.recip().unwrap();
        // d^k/dz^k 1/z = (-1)^k k! / z^{k+1}
        for k in 0..=3u8 {
            let fact: f64 = (1..=k as u64).product::<u64>() as f64;
            let want = (-1f64).powi(k as i32) * fact / z.powi(k as i32 + 1);
            assert!(close(r.partial(&[k, 0]), want, 1e-13));
        }
        let e = jz.exp();
        for k in 0..=3u8 {
            assert!(close(e.partial(&[k, 0]), z.exp(), 1e-13));
        }
    }

    #[test]
    fn conj_swaps_wirtinger_roles() {
        let sp = JetSpace::get(1, 0, 2);
        let z = c(0.2, 0.9);
        let jz = Jet::var(sp, 0, z);
        let f = jz.mul(&jz).scale(c(0.0, 1.0)); // i z^2
        let g = f.conj(); // -i zb^2
        assert!(close(g.partial(&[0, 2]), c(0.0, -2.0), 1e-15));
        assert!(close(g.partial(&[2, 0]), c(0.0, 0.0), 1e-15));
        let m = jz.mul(&jz.conj()); // |z|^2 is real
        let re = m.re();
        for (a, b) in re.coeffs().iter().zip(m.coeffs()) {
            assert!(close(*a, *b, 1e-15));
        }
    }

    #[test]
    fn mixed_partials_commute_through_deriv() {
        let sp = JetSpace::get(2, 1, 3);
        let f = {
            let a = Jet::var(sp, 0, c(0.1, 0.2));
            let b = Jet::var(sp, 3, c(0.4, -0.3));
            let t = Jet::var(sp, 4, c(0.25, 0.0));
            a.mul(&b).mul(&t).add(&a.mul(&a)).exp()
        };
        for u in 0..5 {
            for v in 0..5 {
                let x = f.deriv(u).unwrap().deriv(v).unwrap().value();
                let y = f.deriv(v).unwrap().deriv(u).unwrap().value();
                assert!(close(x, y, 1e-12));
            }
        }
    }

    #[test]
    fn drop_and_embed_t_round_trip() {
        let sp = JetSpace::get(1, 0, 2);
        let j = Jet::var(sp, 1, c(0.5, 0.5)).exp();
        let back = j.with_t_vars(2).drop_t();
        assert_eq!(back.coeffs(), j.coeffs());
    }

    #[test]
    fn series_ln_inverts_exp() {
        let s = Series::var(0.3, 5).mul(&Series::var(0.3, 5)).add_const(1.0);
        let r = s.ln().exp();
        for (a, b) in r.0.iter().zip(&s.0) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
