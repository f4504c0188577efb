//! Forms and matrices evaluated at a point: coefficients are jets.

use crate::error::{Error, Result};
use crate::forms::mono::{degree, wedge_sign, Layout};
use crate::jet::{Jet, JetSpace};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// A differential form whose coefficients are jets at one point.
///
/// Terms are kept sorted by mask with no repeats. The jet variables are
/// `z, z̄` and optionally the simplex coordinates; the layout may carry `dt`
/// one-forms even when the jets do not depend on `t`.
#[derive(Clone, Debug)]
pub struct FormJet {
    layout: Layout,
    space: &'static JetSpace,
    terms: Vec<(u32, Jet)>,
}

impl FormJet {
    pub fn zero(layout: Layout, space: &'static JetSpace) -> FormJet {
        FormJet { layout, space, terms: Vec::new() }
    }

    pub fn scalar(layout: Layout, c: Jet) -> FormJet {
        FormJet::term(layout, 0, c)
    }

    pub fn term(layout: Layout, mask: u32, c: Jet) -> FormJet {
        let space = c.space();
        FormJet { layout, space, terms: vec![(mask, c)] }
    }

    pub fn from_terms(layout: Layout, space: &'static JetSpace, mut terms: Vec<(u32, Jet)>) -> FormJet {
        terms.sort_by_key(|(m, _)| *m);
        let mut out: Vec<(u32, Jet)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => lc.add_assign(&c),
                _ => out.push((m, c)),
            }
        }
        let order = out.iter().map(|(_, c)| c.order()).min().unwrap_or(space.order()).min(space.order());
        let space = space.at_order(order);
        for (_, c) in out.iter_mut() {
            if c.order() > order {
                *c = c.truncate(order);
            }
        }
        FormJet { layout, space, terms: out }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn space(&self) -> &'static JetSpace {
        self.space
    }

    pub fn order(&self) -> u32 {
        self.space.order()
    }

    pub fn terms(&self) -> &[(u32, Jet)] {
        &self.terms
    }

    pub fn get(&self, mask: u32) -> Option<&Jet> {
        self.terms.binary_search_by_key(&mask, |(m, _)| *m).ok().map(|i| &self.terms[i].1)
    }

    pub fn value_at(&self, mask: u32) -> C64 {
        self.get(mask).map_or(C64::new(0.0, 0.0), |c| c.value())
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same form, viewed in a layout with `nt` simplex one-forms.
    pub fn relayout(&self, nt: usize) -> FormJet {
        let layout = Layout::new(self.layout.nz, nt);
        debug_assert!(self.terms.iter().all(|(m, _)| m & !(layout.top_chart() | layout.t_mask()) == 0));
        FormJet { layout, space: self.space, terms: self.terms.clone() }
    }

    pub fn truncate(&self, order: u32) -> FormJet {
        if order >= self.order() {
            return self.clone();
        }
        FormJet {
            layout: self.layout,
            space: self.space.at_order(order),
            terms: self.terms.iter().map(|(m, c)| (*m, c.truncate(order))).collect(),
        }
    }

    fn merge(&self, o: &FormJet, sign: f64) -> FormJet {
        debug_assert_eq!(self.layout, o.layout, "layout mismatch");
        let order = self.order().min(o.order());
        let space = self.space.at_order(order);
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            let a = self.terms.get(i);
            let b = o.terms.get(j);
            match (a, b) {
                (Some((ma, ca)), Some((mb, cb))) if ma == mb => {
                    let c = if sign > 0.0 { ca.add(cb) } else { ca.sub(cb) };
                    out.push((*ma, c));
                    i += 1;
                    j += 1;
                }
                (Some((ma, ca)), Some((mb, _))) if ma < mb => {
                    out.push((*ma, ca.truncate(order)));
                    i += 1;
                }
                (Some((ma, ca)), None) => {
                    out.push((*ma, ca.truncate(order)));
                    i += 1;
                }
                (_, Some((mb, cb))) => {
                    let c = cb.truncate(order);
                    out.push((*mb, if sign > 0.0 { c } else { c.neg() }));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        FormJet { layout: self.layout, space, terms: out }
    }

    pub fn add(&self, o: &FormJet) -> FormJet {
        self.merge(o, 1.0)
    }

    pub fn sub(&self, o: &FormJet) -> FormJet {
        self.merge(o, -1.0)
    }

    pub fn neg(&self) -> FormJet {
        FormJet { layout: self.layout, space: self.space, terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect() }
    }

    pub fn scale(&self, s: C64) -> FormJet {
        FormJet {
            layout: self.layout,
            space: self.space,
            terms: self.terms.iter().map(|(m, c)| (*m, c.scale(s))).collect(),
        }
    }

    pub fn mul_jet(&self, f: &Jet) -> FormJet {
        let order = self.order().min(f.order());
        FormJet {
            layout: self.layout,
            space: self.space.at_order(order),
            terms: self.terms.iter().map(|(m, c)| (*m, c.mul(f))).collect(),
        }
    }

    pub fn wedge(&self, o: &FormJet) -> FormJet {
        debug_assert_eq!(self.layout, o.layout, "layout mismatch");
        let order = self.order().min(o.order());
        let space = self.space.at_order(order);
        let mut out = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if let Some(s) = wedge_sign(*ma, *mb) {
                    let c = ca.mul(cb);
                    out.push((ma | mb, if s > 0.0 { c } else { c.neg() }));
                }
            }
        }
        FormJet::from_terms(self.layout, space, out)
    }

    fn d_filtered(&self, keep: impl Fn(usize) -> bool) -> Result<FormJet> {
        if self.order() == 0 {
            return Err(Error::DerivativeOrderExhausted {
                coefficient: format!("form coefficient on {}", self.describe_first()),
            });
        }
        let lower = self.space.at_order(self.order() - 1);
        let nv = self.space.nvars();
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            for v in 0..nv {
                if !keep(v) {
                    continue;
                }
                let bit = self.layout.dvar(v);
                if let Some(s) = wedge_sign(bit, *m) {
                    let dc = c.deriv(v).expect("order checked above");
                    if dc.is_zero() {
                        continue;
                    }
                    out.push((bit | m, if s > 0.0 { dc } else { dc.neg() }));
                }
            }
        }
        Ok(FormJet::from_terms(self.layout, lower, out))
    }

    fn describe_first(&self) -> String {
        self.terms.first().map_or("0".into(), |(m, _)| self.layout.describe(*m))
    }

    /// Exterior derivative; the jet order drops by one.
    pub fn d(&self) -> Result<FormJet> {
        self.d_filtered(|_| true)
    }

    pub fn partial_d(&self) -> Result<FormJet> {
        let nz = self.layout.nz;
        self.d_filtered(|v| v < nz)
    }

    pub fn bar_d(&self) -> Result<FormJet> {
        let nz = self.layout.nz;
        self.d_filtered(|v| v >= nz && v < 2 * nz)
    }

    pub fn simplex_d(&self) -> Result<FormJet> {
        let nz = self.layout.nz;
        self.d_filtered(|v| v >= 2 * nz)
    }

    /// Negate the odd-degree terms.
    pub fn parity(&self) -> FormJet {
        FormJet {
            layout: self.layout,
            space: self.space,
            terms: self.terms.iter().map(|(m, c)| (*m, if degree(*m) % 2 == 1 { c.neg() } else { c.clone() })).collect(),
        }
    }

    pub fn filter(&self, keep: impl Fn(u32) -> bool) -> FormJet {
        FormJet {
            layout: self.layout,
            space: self.space,
            terms: self.terms.iter().filter(|(m, _)| keep(*m)).cloned().collect(),
        }
    }

    pub fn degree_part(&self, k: u32) -> FormJet {
        self.filter(|m| degree(m) == k)
    }

    /// Largest coefficient value in absolute value (ignores higher jet data).
    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.value().norm()).fold(0.0, f64::max)
    }

    /// `π_*` contribution of this form at one simplex node: keeps terms with all
    /// `dt` present, moves `dt_1∧…∧dt_p` to the left and drops it.
    pub fn dt_top_coefficient(&self) -> FormJet {
        let p = self.layout.nt;
        let tmask = self.layout.t_mask();
        let chart = Layout::new(self.layout.nz, 0);
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            if m & tmask != tmask {
                continue;
            }
            let rest = m & !tmask;
            let sign = if (p as u32 * degree(rest)) % 2 == 1 { -1.0 } else { 1.0 };
            let c = if self.space.nt() > 0 { c.drop_t() } else { c.clone() };
            out.push((rest, if sign > 0.0 { c } else { c.neg() }));
        }
        let space = if self.space.nt() > 0 { JetSpace::get(self.space.nz(), 0, self.order()) } else { self.space };
        FormJet::from_terms(chart, space, out)
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Mat<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn try_from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Result<T>) -> Result<Mat<T>> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j)?);
            }
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let c = self.cols;
        self.data[i * c + j] = v;
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<Mat<U>> {
        Ok(Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<Vec<U>>>()? })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

pub type JetMat = Mat<Jet>;
pub type FormMat = Mat<FormJet>;

fn check_mul(a: (usize, usize), b: (usize, usize)) {
    assert_eq!(a.1, b.0, "matrix shapes {:?} and {:?} do not compose", a, b);
}

impl JetMat {
    pub fn zeros(space: &'static JetSpace, rows: usize, cols: usize) -> JetMat {
        Mat::from_fn(rows, cols, |_, _| Jet::zero(space))
    }

    pub fn identity(space: &'static JetSpace, n: usize) -> JetMat {
        Mat::from_fn(n, n, |i, j| Jet::constant(space, C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)))
    }

    pub fn order(&self) -> u32 {
        self.data.iter().map(|c| c.order()).min().unwrap_or(u32::MAX)
    }

    pub fn mul(&self, o: &JetMat) -> JetMat {
        check_mul(self.shape(), o.shape());
        Mat::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).mul(o.get(0, j));
            for k in 1..self.cols {
                acc.add_assign(&self.get(i, k).mul(o.get(k, j)));
            }
            acc
        })
    }

    pub fn add(&self, o: &JetMat) -> JetMat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(o.get(i, j)))
    }

    pub fn sub(&self, o: &JetMat) -> JetMat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).sub(o.get(i, j)))
    }

    pub fn scale(&self, s: C64) -> JetMat {
        self.map(|c| c.scale(s))
    }

    pub fn scale_jet(&self, f: &Jet) -> JetMat {
        self.map(|c| c.mul(f))
    }

    /// Conjugate transpose (entrywise jet conjugation).
    pub fn adjoint(&self) -> JetMat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> JetMat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn truncate(&self, order: u32) -> JetMat {
        self.map(|c| c.truncate(order))
    }

    pub fn deriv(&self, var: usize) -> JetMat {
        self.map(|c| c.deriv(var).expect("matrix jet of order 0 cannot be differentiated"))
    }

    pub fn values(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).value())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> JetMat {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Inverse by Gauss–Jordan with partial pivoting on values.
    pub fn inverse(&self) -> Option<JetMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let space = self.data[0].space().at_order(self.order());
        let mut a = self.truncate(space.order());
        let mut inv = JetMat::identity(space, n);
        let scale = self.data.iter().map(|c| c.value().norm()).fold(0.0, f64::max);
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| {
                a.get(x, col).value().norm().partial_cmp(&a.get(y, col).value().norm()).unwrap()
            })?;
            if a.get(piv, col).value().norm() <= 1e-14 * scale {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let r = a.get(col, col).recip()?;
            for j in 0..n {
                let v = a.get(col, j).mul(&r);
                a.set(col, j, v);
                let w = inv.get(col, j).mul(&r);
                inv.set(col, j, w);
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a.get(i, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(i, j).sub(&f.mul(a.get(col, j)));
                    a.set(i, j, v);
                    let w = inv.get(i, j).sub(&f.mul(inv.get(col, j)));
                    inv.set(i, j, w);
                }
            }
        }
        Some(inv)
    }

    pub fn to_forms(&self, layout: Layout) -> FormMat {
        self.map(|c| FormJet::scalar(layout, c.clone()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.value().norm()).fold(0.0, f64::max)
    }
}

impl FormMat {
    pub fn zeros(layout: Layout, space: &'static JetSpace, rows: usize, cols: usize) -> FormMat {
        Mat::from_fn(rows, cols, |_, _| FormJet::zero(layout, space))
    }

    pub fn layout(&self) -> Layout {
        self.data[0].layout()
    }

    /// Matrix product with wedge of the entries.
    pub fn wedge(&self, o: &FormMat) -> FormMat {
        check_mul(self.shape(), o.shape());
        Mat::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).wedge(o.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).wedge(o.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_right(&self, m: &JetMat) -> FormMat {
        check_mul(self.shape(), m.shape());
        Mat::from_fn(self.rows, m.cols, |i, j| {
            let mut acc = self.get(i, 0).mul_jet(m.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).mul_jet(m.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_left(&self, m: &JetMat) -> FormMat {
        check_mul(m.shape(), self.shape());
        Mat::from_fn(m.rows, self.cols, |i, j| {
            let mut acc = self.get(0, j).mul_jet(m.get(i, 0));
            for k in 1..m.cols {
                acc = acc.add(&self.get(k, j).mul_jet(m.get(i, k)));
            }
            acc
        })
    }

    pub fn add(&self, o: &FormMat) -> FormMat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(o.get(i, j)))
    }

    pub fn sub(&self, o: &FormMat) -> FormMat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).sub(o.get(i, j)))
    }

    pub fn neg(&self) -> FormMat {
        self.map(|f| f.neg())
    }

    pub fn scale(&self, s: C64) -> FormMat {
        self.map(|f| f.scale(s))
    }

    pub fn mul_jet(&self, f: &Jet) -> FormMat {
        self.map(|x| x.mul_jet(f))
    }

    pub fn d(&self) -> Result<FormMat> {
        self.try_map(|f| f.d())
    }

    pub fn parity(&self) -> FormMat {
        self.map(|f| f.parity())
    }

    pub fn truncate(&self, order: u32) -> FormMat {
        self.map(|f| f.truncate(order))
    }

    pub fn relayout(&self, nt: usize) -> FormMat {
        self.map(|f| f.relayout(nt))
    }

    pub fn order(&self) -> u32 {
        self.data.iter().map(|f| f.order()).min().unwrap_or(u32::MAX)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|f| f.max_abs()).fold(0.0, f64::max)
    }

    /// Split a matrix of one-forms `Σ_m A_m dz_m (+ dz̄ parts)` into its
    /// per-one-form coefficient matrices, indexed by jet variable.
    pub fn one_form_components(&self, space: &'static JetSpace) -> Vec<JetMat> {
        let layout = self.layout();
        let nv = 2 * layout.nz + layout.nt;
        (0..nv)
            .map(|v| {
                let bit = layout.dvar(v);
                self.map(|f| f.get(bit).cloned().unwrap_or_else(|| Jet::zero(space)))
            })
            .collect()
    }
}

/// Block-diagonal assembly of square jet matrices.
pub fn block_diag_jets(space: &'static JetSpace, blocks: &[&JetMat]) -> JetMat {
    let rows: usize = blocks.iter().map(|b| b.rows).sum();
    let cols: usize = blocks.iter().map(|b| b.cols).sum();
    let mut m = JetMat::zeros(space, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                m.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    m
}

pub fn block_diag_forms(layout: Layout, space: &'static JetSpace, blocks: &[&FormMat]) -> FormMat {
    let rows: usize = blocks.iter().map(|b| b.rows).sum();
    let cols: usize = blocks.iter().map(|b| b.cols).sum();
    let mut m = FormMat::zeros(layout, space, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                m.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: f64, b: f64) -> C64 {
        C64::new(a, b)
    }

    #[test]
    fn wedge_and_d_on_simple_forms() {
        let sp = JetSpace::get(1, 0, 2);
        let l = Layout::chart(1);
        let z = c(0.3, 0.4);
        let zb = Jet::var(sp, 1, z.conj());
        // d(zb dz) = dzb ^ dz = -dz ^ dzb
        let f = FormJet::term(l, l.dz(0), zb);
        let df = f.d().unwrap();
        assert_eq!(df.terms().len(), 1);
        assert_eq!(df.terms()[0].0, l.dz(0) | l.dzb(0));
        assert!((df.terms()[0].1.value() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn jet_matrix_inverse() {
        let sp = JetSpace::get(1, 0, 2);
        let z = Jet::var(sp, 0, c(0.5, 0.2));
        let one = Jet::constant(sp, c(1.0, 0.0));
        let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => z.clone(),
            (0, 1) => one.clone(),
            (1, 0) => one.scale(c(2.0, 0.0)),
            _ => z.mul(&z).add_const(c(3.0, 0.0)),
        });
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                for (k, x) in id.get(i, j).coeffs().iter().enumerate() {
                    let w = if k == 0 { want } else { 0.0 };
                    assert!((x - c(w, 0.0)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn dt_top_sign_moves_dt_left() {
        // z t1 dt1 ^ dz1, stored canonically as -(z t1) dz1 ^ dt1
        let l = Layout::new(1, 1);
        let sp = JetSpace::get(1, 0, 0);
        let f = FormJet::term(l, l.dz(0) | l.dt(0), Jet::constant(sp, c(-1.0, 0.0)));
        let top = f.dt_top_coefficient();
        // dt1 ^ dz1 coefficient is +1
        assert!((top.value_at(Layout::chart(1).dz(0)) - c(1.0, 0.0)).norm() < 1e-15);
    }
}
