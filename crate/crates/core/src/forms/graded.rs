//! Symbolic differential forms on `U × Δ_p` with [`ScalarField`] coefficients.

use crate::error::{Error, Result};
use crate::forms::mono::{wedge_sign, Layout};
use crate::forms::pointwise::FormJet;
use crate::forms::scalar::{Point, ScalarField};
use crate::forms::simplex::SimplexRule;
use crate::jet::JetSpace;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct GradedForm {
    layout: Layout,
    terms: BTreeMap<u32, ScalarField>,
}

impl GradedForm {
    pub fn zero(layout: Layout) -> GradedForm {
        GradedForm { layout, terms: BTreeMap::new() }
    }

    pub fn scalar(layout: Layout, f: ScalarField) -> GradedForm {
        GradedForm::term(layout, 0, f)
    }

    pub fn term(layout: Layout, mask: u32, f: ScalarField) -> GradedForm {
        let mut g = GradedForm::zero(layout);
        if !f.is_const_zero() {
            g.terms.insert(mask, f);
        }
        g
    }

    pub fn basis(layout: Layout, mask: u32) -> GradedForm {
        GradedForm::term(layout, mask, ScalarField::one())
    }

    pub fn dz(layout: Layout, i: usize) -> GradedForm {
        GradedForm::basis(layout, layout.dz(i))
    }

    pub fn dzb(layout: Layout, i: usize) -> GradedForm {
        GradedForm::basis(layout, layout.dzb(i))
    }

    pub fn dt(layout: Layout, j: usize) -> GradedForm {
        GradedForm::basis(layout, layout.dt(j))
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn chart_dim(&self) -> usize {
        self.layout.nz
    }

    pub fn simplex_dim(&self) -> usize {
        self.layout.nt
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &ScalarField)> {
        self.terms.iter().map(|(m, f)| (*m, f))
    }

    pub fn coefficient(&self, mask: u32) -> Option<&ScalarField> {
        self.terms.get(&mask)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, o: &GradedForm) -> Result<()> {
        if self.layout != o.layout {
            return Err(Error::Dimension(format!(
                "forms on (n={}, p={}) and (n={}, p={})",
                self.layout.nz, self.layout.nt, o.layout.nz, o.layout.nt
            )));
        }
        Ok(())
    }

    fn push(&mut self, mask: u32, f: ScalarField) {
        if f.is_const_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(g) => *g = g.add(&f),
            None => {
                self.terms.insert(mask, f);
            }
        }
    }

    pub fn add(&self, o: &GradedForm) -> Result<GradedForm> {
        self.check(o)?;
        let mut out = self.clone();
        for (m, f) in &o.terms {
            out.push(*m, f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &GradedForm) -> Result<GradedForm> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> GradedForm {
        GradedForm { layout: self.layout, terms: self.terms.iter().map(|(m, f)| (*m, f.neg())).collect() }
    }

    pub fn scale(&self, c: C64) -> GradedForm {
        self.mul_scalar(&ScalarField::constant(c))
    }

    pub fn mul_scalar(&self, g: &ScalarField) -> GradedForm {
        let mut out = GradedForm::zero(self.layout);
        for (m, f) in &self.terms {
            out.push(*m, g.mul(f));
        }
        out
    }

    pub fn wedge(&self, o: &GradedForm) -> Result<GradedForm> {
        self.check(o)?;
        let mut out = GradedForm::zero(self.layout);
        for (ma, fa) in &self.terms {
            for (mb, fb) in &o.terms {
                if let Some(s) = wedge_sign(*ma, *mb) {
                    let f = fa.mul(fb);
                    out.push(ma | mb, if s > 0.0 { f } else { f.neg() });
                }
            }
        }
        Ok(out)
    }

    fn d_filtered(&self, keep: impl Fn(usize) -> bool) -> Result<GradedForm> {
        let nv = 2 * self.layout.nz + self.layout.nt;
        let mut out = GradedForm::zero(self.layout);
        for (m, f) in &self.terms {
            for v in 0..nv {
                if !keep(v) {
                    continue;
                }
                let bit = self.layout.dvar(v);
                if let Some(s) = wedge_sign(bit, *m) {
                    let df = f.derivative(v)?;
                    out.push(bit | m, if s > 0.0 { df } else { df.neg() });
                }
            }
        }
        Ok(out)
    }

    /// `d = ∂ + ∂̄ + d_t`
    pub fn exterior_d(&self) -> Result<GradedForm> {
        self.d_filtered(|_| true)
    }

    pub fn partial_d(&self) -> Result<GradedForm> {
        let nz = self.layout.nz;
        self.d_filtered(|v| v < nz)
    }

    pub fn bar_d(&self) -> Result<GradedForm> {
        let nz = self.layout.nz;
        self.d_filtered(|v| v >= nz && v < 2 * nz)
    }

    pub fn simplex_d(&self) -> Result<GradedForm> {
        let nz = self.layout.nz;
        self.d_filtered(|v| v >= 2 * nz)
    }

    /// Pull back from `U` to `U × Δ_p` (no `dt` content is created).
    pub fn pullback_to_simplex(&self, p: usize) -> GradedForm {
        GradedForm { layout: Layout::new(self.layout.nz, p), terms: self.terms.clone() }
    }

    /// `π_*`: integrate over `Δ_p` the terms containing `dt_1∧…∧dt_p`, after
    /// moving the `dt` factors to the left.
    pub fn fiber_integrate(&self, rule: Arc<SimplexRule>) -> Result<GradedForm> {
        let p = self.layout.nt;
        if p == 0 {
            return Err(Error::InvalidInput("fiber integration needs a simplex factor (p ≥ 1)".into()));
        }
        if rule.dim() != p {
            return Err(Error::Dimension(format!("rule on Δ_{} for a form on Δ_{}", rule.dim(), p)));
        }
        let tmask = self.layout.t_mask();
        let chart = Layout::chart(self.layout.nz);
        let mut out = GradedForm::zero(chart);
        for (m, f) in &self.terms {
            if m & tmask != tmask {
                continue;
            }
            let rest = m & !tmask;
            let odd = (p as u32 * rest.count_ones()) % 2 == 1;
            let g = f.simplex_integral(rule.clone());
            out.push(rest, if odd { g.neg() } else { g });
        }
        Ok(out)
    }

    /// Keep the terms whose mask satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(u32) -> bool) -> GradedForm {
        GradedForm {
            layout: self.layout,
            terms: self.terms.iter().filter(|(m, _)| keep(**m)).map(|(m, f)| (*m, f.clone())).collect(),
        }
    }

    pub fn eval(&self, pt: &Point, order: u32) -> Result<FormJet> {
        let space = JetSpace::get(pt.z.len(), pt.t.len(), order);
        if pt.z.len() != self.layout.nz {
            return Err(Error::Dimension(format!("point in ℂ^{} for a form on ℂ^{}", pt.z.len(), self.layout.nz)));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, f) in &self.terms {
            terms.push((*m, f.eval_in(pt, space)?));
        }
        Ok(FormJet::from_terms(self.layout, space, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::scalar::ScalarField as F;

    fn p1(z: C64) -> Point {
        Point::chart(vec![z])
    }

    #[test]
    fn wedge_examples() {
        let l = Layout::chart(1);
        let w = GradedForm::dz(l, 0).wedge(&GradedForm::dzb(l, 0)).unwrap();
        assert_eq!(w.terms().count(), 1);
        assert_eq!(w.terms().next().unwrap().0, l.dz(0) | l.dzb(0));
        assert!(GradedForm::dz(l, 0).wedge(&GradedForm::dz(l, 0)).unwrap().is_zero());

        let l2 = Layout::new(2, 1);
        let a = GradedForm::term(l2, l2.dzb(1), F::z(0));
        let b = GradedForm::dt(l2, 0);
        let c = a.wedge(&b).unwrap();
        let pt = Point::chart(vec![C64::new(0.2, 0.3), C64::new(0.0, 1.0)]).with_t(vec![0.4]);
        let v = c.eval(&pt, 0).unwrap();
        assert_eq!(v.terms().len(), 1);
        assert_eq!(v.terms()[0].0, l2.dzb(1) | l2.dt(0));
        assert!((v.terms()[0].1.value() - C64::new(0.2, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn d_examples() {
        let l = Layout::chart(1);
        // d(zb dz) = dzb ^ dz
        let f = GradedForm::term(l, l.dz(0), F::zb(0));
        let df = f.exterior_d().unwrap();
        let v = df.eval(&p1(C64::new(0.5, -0.5)), 0).unwrap();
        assert!((v.value_at(l.dz(0) | l.dzb(0)) - C64::new(-1.0, 0.0)).norm() < 1e-15);

        // d(t1 dz1) = dt1 ^ dz1 = -dz1 ^ dt1
        let l2 = Layout::new(1, 1);
        let g = GradedForm::term(l2, l2.dz(0), F::t(0));
        let dg = g.exterior_d().unwrap();
        let pt = p1(C64::new(0.1, 0.1)).with_t(vec![0.3]);
        let v = dg.eval(&pt, 0).unwrap();
        assert!((v.value_at(l2.dz(0) | l2.dt(0)) - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dd_of_abs_z_fourth_vanishes() {
        let l = Layout::chart(1);
        let f = GradedForm::scalar(l, F::z(0).abs2().pow(2));
        let ddf = f.exterior_d().unwrap().exterior_d().unwrap();
        for k in 0..10 {
            let z = C64::new(0.1 * k as f64 - 0.4, 0.3 - 0.05 * k as f64);
            let v = ddf.eval(&p1(z), 0).unwrap();
            assert!(v.max_abs() < 1e-12);
        }
    }

    #[test]
    fn fiber_integration_examples() {
        let rule1 = Arc::new(SimplexRule::grundmann_moller(1, 7));
        let l1 = Layout::new(1, 1);
        // ∫ t0 dt1 = 1/2
        let t0 = F::one().sub(&F::t(0));
        let a = GradedForm::term(l1, l1.dt(0), t0);
        let r = a.fiber_integrate(rule1.clone()).unwrap();
        let v = r.eval(&p1(C64::new(0.0, 0.0)), 0).unwrap();
        assert!((v.value_at(0) - C64::new(0.5, 0.0)).norm() < 1e-15);

        // ∫ dt1 ^ dt2 = 1/2
        let l2 = Layout::new(1, 2);
        let b = GradedForm::basis(l2, l2.dt(0) | l2.dt(1));
        let r = b.fiber_integrate(Arc::new(SimplexRule::grundmann_moller(2, 7))).unwrap();
        let v = r.eval(&p1(C64::new(0.0, 0.0)), 0).unwrap();
        assert!((v.value_at(0) - C64::new(0.5, 0.0)).norm() < 1e-15);

        // ∫ z t1 dt1 ^ dz1: dt already leftmost, result (z/2) dz1
        let dt_dz = GradedForm::dt(l1, 0).wedge(&GradedForm::dz(l1, 0)).unwrap();
        let c = dt_dz.mul_scalar(&F::z(0).mul(&F::t(0)));
        let r = c.fiber_integrate(rule1).unwrap();
        let z = C64::new(0.6, -0.2);
        let v = r.eval(&p1(z), 0).unwrap();
        let brute: f64 = (0..2000).map(|k| (k as f64 + 0.5) / 2000.0).sum::<f64>() / 2000.0;
        assert!((v.value_at(l1.dz(0)) - z * brute).norm() < 1e-7);
    }
}
