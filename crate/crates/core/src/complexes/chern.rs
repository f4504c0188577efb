//! Chern forms, mixed Chern forms of complexes and characteristic forms `Φ(D)`.

use crate::error::{Error, Result};
use crate::forms::mono::degree;
use crate::forms::pointwise::{FormJet, FormMat, Mat};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

/// `i/2π`
pub fn chern_factor() -> C64 {
    C64::new(0.0, 1.0 / (2.0 * PI))
}

fn trunc(f: &FormJet, max_deg: u32) -> FormJet {
    if f.terms().iter().all(|(m, _)| degree(*m) <= max_deg) {
        f.clone()
    } else {
        f.filter(|m| degree(m) <= max_deg)
    }
}

fn wedge_trunc(a: &FormJet, b: &FormJet, max_deg: u32) -> FormJet {
    trunc(&a.wedge(b), max_deg)
}

/// Determinant of a square matrix of even forms (which commute), by Laplace
/// expansion along the first row.
pub fn det_even(m: &FormMat, max_deg: u32) -> FormJet {
    let n = m.rows;
    assert!(n > 0);
    if n == 1 {
        return trunc(m.get(0, 0), max_deg);
    }
    let mut acc: Option<FormJet> = None;
    for j in 0..n {
        if m.get(0, j).is_empty() {
            continue;
        }
        let minor = Mat::from_fn(n - 1, n - 1, |r, c| m.get(r + 1, if c < j { c } else { c + 1 }).clone());
        let t = wedge_trunc(m.get(0, j), &det_even(&minor, max_deg), max_deg);
        let t = if j % 2 == 0 { t } else { t.neg() };
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t),
        });
    }
    acc.unwrap_or_else(|| FormJet::zero(m.layout(), m.get(0, 0).space()))
}

/// `[e_0, e_1, …, e_top]` of `det(I + (i/2π)Θ)`, each the sum of principal
/// `j × j` minors of `(i/2π)Θ`.
pub fn chern_forms(curv: &FormMat, top: usize) -> Vec<FormJet> {
    let r = curv.rows;
    let layout = curv.layout();
    let space = curv.get(0, 0).space().at_order(curv.order());
    let x = curv.scale(chern_factor());
    let max_deg = 2 * top as u32;
    let mut out = vec![FormJet::scalar(layout, crate::jet::Jet::constant(space, C64::new(1.0, 0.0)))];
    for j in 1..=top {
        let mut acc = FormJet::zero(layout, space);
        if j <= r {
            for s in crate::complexes::bundle::subsets(r, j) {
                let sub = Mat::from_fn(j, j, |a, b| x.get(s[a], s[b]).clone());
                acc = acc.add(&det_even(&sub, max_deg));
            }
        }
        out.push(acc.degree_part(2 * j as u32));
    }
    out
}

/// Total Chern form `1 + e_1 + … + e_top` as one inhomogeneous form.
fn total(es: &[FormJet]) -> FormJet {
    let mut acc = es[0].clone();
    for e in &es[1..] {
        acc = acc.add(e);
    }
    acc
}

/// Inverse of `1 + x` for `x` nilpotent (positive degree), by the Neumann series.
fn inverse_total(c: &FormJet, max_deg: u32) -> FormJet {
    let one = c.filter(|m| m == 0);
    let x = c.filter(|m| m != 0);
    let mut acc = one.clone();
    let mut pow = one;
    for _ in 0..=max_deg / 2 {
        pow = wedge_trunc(&pow, &x, max_deg).neg();
        if pow.is_empty() {
            break;
        }
        acc = acc.add(&pow);
    }
    acc
}

/// Mixed Chern forms `[e_0(D), …, e_top(D)]` of a complex:
/// `Π_k det(I + (i/2π)Θ_k)^{(-1)^k}`. `curvs[k]` is the curvature on `E_k`;
/// levels of rank 0 contribute 1.
pub fn mixed_chern(curvs: &[&FormMat], top: usize) -> Result<Vec<FormJet>> {
    let max_deg = 2 * top as u32;
    let mut acc: Option<FormJet> = None;
    for (k, c) in curvs.iter().enumerate() {
        if c.rows == 0 {
            continue;
        }
        let t = total(&chern_forms(c, top));
        let f = if k % 2 == 0 { t } else { inverse_total(&t, max_deg) };
        acc = Some(match acc {
            None => f,
            Some(a) => wedge_trunc(&a, &f, max_deg),
        });
    }
    let acc = acc.ok_or_else(|| Error::Dimension("complex without nonzero levels".into()))?;
    Ok((0..=top).map(|j| acc.degree_part(2 * j as u32)).collect())
}

/// Homogeneous polynomial in the elementary symmetric functions `e_1, e_2, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricPolynomial {
    terms: BTreeMap<Vec<usize>, C64>,
}

impl SymmetricPolynomial {
    /// Terms `(coefficient, [ℓ_1, …, ℓ_m])` meaning `c·e_{ℓ_1}⋯e_{ℓ_m}`.
    pub fn new(terms: Vec<(C64, Vec<usize>)>) -> Result<SymmetricPolynomial> {
        let mut map = BTreeMap::new();
        for (c, mut m) in terms {
            if m.iter().any(|&l| l == 0) {
                return Err(Error::InvalidInput("e_0 = 1 is not a generator".into()));
            }
            m.sort_unstable();
            *map.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c: &mut C64| c.norm() != 0.0);
        let p = SymmetricPolynomial { terms: map };
        p.degree()?;
        Ok(p)
    }

    /// The generator `e_k`.
    pub fn e(k: usize) -> SymmetricPolynomial {
        SymmetricPolynomial::new(vec![(C64::new(1.0, 0.0), vec![k])]).expect("k ≥ 1")
    }

    fn from_map(terms: BTreeMap<Vec<usize>, C64>) -> SymmetricPolynomial {
        let mut terms = terms;
        terms.retain(|_, c| c.norm() > 1e-300);
        SymmetricPolynomial { terms }
    }

    fn one() -> SymmetricPolynomial {
        SymmetricPolynomial { terms: BTreeMap::from([(Vec::new(), C64::new(1.0, 0.0))]) }
    }

    pub fn add(&self, o: &SymmetricPolynomial) -> SymmetricPolynomial {
        let mut t = self.terms.clone();
        for (m, c) in &o.terms {
            *t.entry(m.clone()).or_insert(C64::new(0.0, 0.0)) += c;
        }
        SymmetricPolynomial::from_map(t)
    }

    pub fn scale(&self, s: C64) -> SymmetricPolynomial {
        SymmetricPolynomial::from_map(self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect())
    }

    pub fn mul(&self, o: &SymmetricPolynomial) -> SymmetricPolynomial {
        let mut t = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let mut m: Vec<usize> = ma.iter().chain(mb).copied().collect();
                m.sort_unstable();
                *t.entry(m).or_insert(C64::new(0.0, 0.0)) += ca * cb;
            }
        }
        SymmetricPolynomial::from_map(t)
    }

    /// Power sum `p_k = Σ x_i^k` expressed through Newton's identities.
    pub fn power_sum(k: usize) -> SymmetricPolynomial {
        let mut p: Vec<SymmetricPolynomial> = vec![SymmetricPolynomial::one()];
        for j in 1..=k {
            let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let mut acc = SymmetricPolynomial::e(j).scale(C64::new(sign * j as f64, 0.0));
            for i in 1..j {
                let s = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
                acc = acc.add(&SymmetricPolynomial::e(i).mul(&p[j - i]).scale(C64::new(s, 0.0)));
            }
            p.push(acc);
        }
        p.pop().expect("k ≥ 1")
    }

    /// Total degree `ℓ = Σ ℓ_i`; errors on inhomogeneous or empty input.
    pub fn degree(&self) -> Result<usize> {
        let mut d = None;
        for m in self.terms.keys() {
            let k: usize = m.iter().sum();
            match d {
                None => d = Some(k),
                Some(x) if x != k => {
                    return Err(Error::InvalidInput(format!("inhomogeneous symmetric polynomial {}", self)))
                }
                _ => {}
            }
        }
        d.ok_or_else(|| Error::InvalidInput("zero symmetric polynomial".into()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], C64)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), *c))
    }

    /// `Φ̂(e_1, …, e_ℓ)` with `es[j] = e_j` (and `es[0] = 1`).
    pub fn evaluate(&self, es: &[FormJet]) -> Result<FormJet> {
        let l = self.degree()?;
        if es.len() <= l {
            return Err(Error::Dimension(format!("need e_0..e_{} for a degree-{} polynomial", l, l)));
        }
        let max_deg = 2 * l as u32;
        let mut acc = FormJet::zero(es[0].layout(), es[0].space());
        for (m, c) in &self.terms {
            let mut prod = es[0].clone();
            for &k in m {
                prod = wedge_trunc(&prod, &es[k], max_deg);
            }
            acc = acc.add(&prod.scale(*c));
        }
        Ok(acc)
    }

    /// Same polynomial on plain numbers.
    pub fn evaluate_numbers(&self, es: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().fold(*c, |acc, &k| acc * es.get(k).copied().unwrap_or(C64::new(0.0, 0.0))))
            .sum()
    }

    /// Parse strings such as `e1^2 - 2 e2`, `c2`, `p2` or `3*e1*e1`.
    pub fn parse(src: &str) -> Result<SymmetricPolynomial> {
        let s: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |m: &str| Error::Parse(format!("{} in symmetric polynomial '{}'", m, src));
        let mut pos = 0;
        let mut total: Option<SymmetricPolynomial> = None;
        while pos < s.len() || total.is_none() {
            let mut sign = 1.0;
            while pos < s.len() && (s[pos] == '+' || s[pos] == '-') {
                if s[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            }
            let mut term = SymmetricPolynomial::one().scale(C64::new(sign, 0.0));
            let mut any = false;
            loop {
                if pos >= s.len() || s[pos] == '+' || s[pos] == '-' {
                    break;
                }
                if s[pos] == '*' {
                    pos += 1;
                    continue;
                }
                let factor = if s[pos].is_ascii_digit() || s[pos] == '.' {
                    let start = pos;
                    while pos < s.len() && (s[pos].is_ascii_digit() || s[pos] == '.') {
                        pos += 1;
                    }
                    let v: f64 = s[start..pos].iter().collect::<String>().parse().map_err(|_| err("bad number"))?;
                    SymmetricPolynomial::one().scale(C64::new(v, 0.0))
                } else if matches!(s[pos], 'e' | 'c' | 'p') {
                    let kind = s[pos];
                    pos += 1;
                    let start = pos;
                    while pos < s.len() && s[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let k: usize = s[start..pos].iter().collect::<String>().parse().map_err(|_| err("generator needs an index"))?;
                    if k == 0 {
                        return Err(err("index must be ≥ 1"));
                    }
                    if kind == 'p' {
                        SymmetricPolynomial::power_sum(k)
                    } else {
                        SymmetricPolynomial::e(k)
                    }
                } else {
                    return Err(err(&format!("unexpected '{}'", s[pos])));
                };
                let mut factor = factor;
                if pos < s.len() && s[pos] == '^' {
                    pos += 1;
                    let start = pos;
                    while pos < s.len() && s[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let m: u32 = s[start..pos].iter().collect::<String>().parse().map_err(|_| err("bad exponent"))?;
                    let base = factor.clone();
                    factor = SymmetricPolynomial::one();
                    for _ in 0..m {
                        factor = factor.mul(&base);
                    }
                }
                term = term.mul(&factor);
                any = true;
            }
            if !any {
                return Err(err("empty term"));
            }
            total = Some(match total {
                None => term,
                Some(t) => t.add(&term),
            });
        }
        let p = total.ok_or_else(|| err("empty"))?;
        p.degree()?;
        Ok(p)
    }
}

impl fmt::Display for SymmetricPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({})", c)?;
            }
            for k in m {
                write!(f, "*e{}", k)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `Φ(D)` for a complex from its curvatures.
pub fn phi_form(phi: &SymmetricPolynomial, curvs: &[&FormMat]) -> Result<FormJet> {
    let l = phi.degree()?;
    let es = mixed_chern(curvs, l)?;
    phi.evaluate(&es)
}

/// Several characteristic forms from one mixed Chern expansion.
pub fn phi_forms(phis: &[SymmetricPolynomial], curvs: &[&FormMat]) -> Result<Vec<FormJet>> {
    let top = phis.iter().map(|p| p.degree()).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
    let es = mixed_chern(curvs, top)?;
    phis.iter().map(|p| p.evaluate(&es)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::mono::Layout;
    use crate::jet::{Jet, JetSpace};

    fn c(a: f64, b: f64) -> C64 {
        C64::new(a, b)
    }

    fn two_form(l: Layout, sp: &'static JetSpace, m: u32, v: C64) -> FormJet {
        FormJet::term(l, m, Jet::constant(sp, v))
    }

    #[test]
    fn rank_one_and_diagonal_rank_two() {
        let l = Layout::chart(2);
        let sp = JetSpace::get(2, 0, 0);
        let w1 = two_form(l, sp, l.dz(0) | l.dzb(0), c(0.3, 0.1));
        let w2 = two_form(l, sp, l.dz(1) | l.dzb(1), c(-0.2, 0.5));
        let one = Mat::from_fn(1, 1, |_, _| w1.clone());
        let e = chern_forms(&one, 2);
        assert!((e[1].value_at(l.dz(0) | l.dzb(0)) - chern_factor() * c(0.3, 0.1)).norm() < 1e-15);
        let zero = FormJet::zero(l, sp);
        let diag = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => w1.clone(),
            (1, 1) => w2.clone(),
            _ => zero.clone(),
        });
        let e = chern_forms(&diag, 2);
        let want = w1.wedge(&w2).scale(chern_factor() * chern_factor());
        assert!(e[2].sub(&want).max_abs() < 1e-15);
    }

    #[test]
    fn identity_complex_has_trivial_mixed_chern_form() {
        let l = Layout::chart(2);
        let sp = JetSpace::get(2, 0, 0);
        let w = two_form(l, sp, l.dz(0) | l.dzb(1), c(1.3, -0.4)).add(&two_form(l, sp, l.dz(1) | l.dzb(1), c(0.2, 0.0)));
        let m = Mat::from_fn(1, 1, |_, _| w.clone());
        let e = mixed_chern(&[&m, &m], 2).unwrap();
        assert!((e[0].value_at(0) - 1.0).norm() < 1e-15);
        assert!(e[1].max_abs() < 1e-15 && e[2].max_abs() < 1e-15);
        // level-1-only bundle: e_1 = -(i/2π)Θ
        let zero = Mat::from_fn(0, 0, |_, _| FormJet::zero(l, sp));
        let e = mixed_chern(&[&zero, &m], 2).unwrap();
        assert!(e[1].add(&w.scale(chern_factor())).max_abs() < 1e-15);
    }

    #[test]
    fn newton_power_sums() {
        let p2 = SymmetricPolynomial::power_sum(2);
        let want = SymmetricPolynomial::parse("e1^2 - 2e2").unwrap();
        assert_eq!(p2, want);
        // p3 = e1^3 - 3 e1 e2 + 3 e3
        let p3 = SymmetricPolynomial::power_sum(3);
        assert_eq!(p3, SymmetricPolynomial::parse("e1^3 - 3 e1*e2 + 3e3").unwrap());
        // numeric check on x = (1, 2, 4)
        let es = [c(1.0, 0.0), c(7.0, 0.0), c(14.0, 0.0), c(8.0, 0.0)];
        assert!((p3.evaluate_numbers(&es) - c(73.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn parse_rejects_inhomogeneous_and_garbage() {
        assert!(SymmetricPolynomial::parse("e1 + e2").is_err());
        assert!(SymmetricPolynomial::parse("e0").is_err());
        assert!(SymmetricPolynomial::parse("x1").is_err());
        assert!(SymmetricPolynomial::parse("").is_err());
        assert_eq!(SymmetricPolynomial::parse("c1*c1").unwrap().degree().unwrap(), 2);
    }
}
