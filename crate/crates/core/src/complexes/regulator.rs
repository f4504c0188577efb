//! Cutoff regularization `D̂^ε = D + χ_ε a` with `χ_ε = Σ_β ψ_β χ(|s^β|²/ε)`.

use crate::complexes::bundle::BundleComplex;
use crate::complexes::connection::ConnectionSource;
use crate::complexes::tilde::TildeConnection;
use crate::error::{Error, Result};
use crate::forms::pointwise::FormMat;
use crate::forms::scalar::{Point, ScalarField, SmoothFn};
use crate::jet::{Jet, JetSpace};
use std::sync::Arc;

/// The fixed library of cutoffs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ChiKind {
    /// Transition on `[1/2, 2]`.
    #[default]
    Standard,
    /// Transition on `[1/4, 4]`.
    Wide,
}

impl ChiKind {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            ChiKind::Standard => (0.5, 2.0),
            ChiKind::Wide => (0.25, 4.0),
        }
    }

    pub fn smooth_fn(self) -> SmoothFn {
        let (lo, hi) = self.bounds();
        SmoothFn::Step { lo, hi }
    }

    pub fn value(self, u: f64) -> f64 {
        self.smooth_fn().value(u)
    }

    pub fn parse(s: &str) -> Result<ChiKind> {
        match s {
            "standard" => Ok(ChiKind::Standard),
            "wide" => Ok(ChiKind::Wide),
            _ => Err(Error::Parse(format!("unknown cutoff '{}' (expected 'standard' or 'wide')", s))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChiKind::Standard => "standard",
            ChiKind::Wide => "wide",
        }
    }
}

/// Data of one chart of the regulator cover.
#[derive(Clone, Debug)]
pub struct ChartCutoff {
    pub psi: ScalarField,
    /// Components of the holomorphic section `s^β`.
    pub sections: Vec<ScalarField>,
    /// Closed box containing `supp ψ_β`, as `[(lo, hi)]` over `x_1, y_1, x_2, …`.
    pub support: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug)]
pub struct Regulator {
    chi: ChiKind,
    charts: Vec<ChartCutoff>,
    field: ScalarField,
}

/// `|s|² = Σ |s_i|²` as a field.
fn norm2(s: &[ScalarField]) -> ScalarField {
    ScalarField::sum(&s.iter().map(|f| f.abs2()).collect::<Vec<_>>())
}

impl Regulator {
    pub fn new(chi: ChiKind, charts: Vec<ChartCutoff>) -> Result<Regulator> {
        if charts.is_empty() {
            return Err(Error::InvalidInput("regulator needs at least one chart".into()));
        }
        let inv_eps = ScalarField::eps().recip();
        let mut terms = Vec::new();
        for c in &charts {
            if c.sections.is_empty() {
                return Err(Error::InvalidInput("empty section s^β".into()));
            }
            let u = norm2(&c.sections).mul(&inv_eps);
            terms.push(c.psi.mul(&u.smooth(chi.smooth_fn())));
        }
        let field = ScalarField::sum(&terms);
        Ok(Regulator { chi, charts, field })
    }

    /// One chart with `ψ = 1`.
    pub fn single(chi: ChiKind, sections: Vec<ScalarField>) -> Result<Regulator> {
        Regulator::new(chi, vec![ChartCutoff { psi: ScalarField::one(), sections, support: None }])
    }

    /// Default section: the `ρ_1 × ρ_1` minors of `φ_1`.
    pub fn default_sections(c: &BundleComplex) -> Vec<ScalarField> {
        c.phi(1).minors(c.generic_rank(1))
    }

    pub fn chi(&self) -> ChiKind {
        self.chi
    }

    pub fn charts(&self) -> &[ChartCutoff] {
        &self.charts
    }

    /// `χ_ε` as a symbolic field of `z, z̄` and `ε`.
    pub fn chi_eps(&self) -> &ScalarField {
        &self.field
    }

    /// `χ_ε` with its partials at a chart point; `pt.eps` must be positive.
    pub fn cutoff_eval(&self, pt: &Point, order: u32) -> Result<Jet> {
        if !(pt.eps > 0.0) {
            return Err(Error::InvalidInput(format!("ε must be positive, got {}", pt.eps)));
        }
        self.field.eval_in(pt, JetSpace::get(pt.z.len(), 0, order))
    }

    fn relevant<'a>(&'a self, bx: &'a [(f64, f64)]) -> impl Iterator<Item = &'a ChartCutoff> + 'a {
        self.charts.iter().filter(move |c| match &c.support {
            None => true,
            Some(s) => s.iter().zip(bx).all(|(a, b)| a.0 < b.1 && b.0 < a.1),
        })
    }

    /// Enclosure of `u = |s^β|²/ε` over a box, the union over charts whose
    /// support meets it. `None` when some section is not a polynomial.
    pub fn u_interval(&self, bx: &[(f64, f64)], eps: f64) -> Option<(f64, f64)> {
        let n = bx.len() / 2;
        let re: Vec<(f64, f64)> = (0..n).map(|i| bx[2 * i]).collect();
        let im: Vec<(f64, f64)> = (0..n).map(|i| bx[2 * i + 1]).collect();
        let mut out: Option<(f64, f64)> = None;
        for c in self.relevant(bx) {
            let (mut lo, mut hi) = (0.0, 0.0);
            for s in &c.sections {
                let (a, b) = s.interval(&re, &im)?.abs2();
                lo += a;
                hi += b;
            }
            let (lo, hi) = (lo / eps, hi / eps);
            out = Some(match out {
                None => (lo, hi),
                Some((a, b)) => (a.min(lo), b.max(hi)),
            });
        }
        out
    }

    /// True when `χ_ε ≡ 1` on the box.
    pub fn is_one_on(&self, bx: &[(f64, f64)], eps: f64) -> bool {
        matches!(self.u_interval(bx, eps), Some((lo, _)) if lo >= self.chi.bounds().1)
    }

    /// True when `χ_ε ≡ 0` on the box.
    pub fn is_zero_on(&self, bx: &[(f64, f64)], eps: f64) -> bool {
        matches!(self.u_interval(bx, eps), Some((_, hi)) if hi <= self.chi.bounds().0)
    }
}

/// `θ̂^ε_k = θ_k + χ_ε a_k`; `ε` is taken from the evaluation point.
#[derive(Clone)]
pub struct RegularizedConnection {
    tilde: Arc<TildeConnection>,
    reg: Arc<Regulator>,
}

pub fn regularize(tilde: Arc<TildeConnection>, reg: Arc<Regulator>) -> RegularizedConnection {
    RegularizedConnection { tilde, reg }
}

impl RegularizedConnection {
    pub fn tilde(&self) -> &Arc<TildeConnection> {
        &self.tilde
    }

    pub fn regulator(&self) -> &Arc<Regulator> {
        &self.reg
    }
}

impl ConnectionSource for RegularizedConnection {
    fn nz(&self) -> usize {
        self.tilde.nz()
    }

    fn ranks(&self) -> &[usize] {
        self.tilde.complex().ranks()
    }

    fn theta(&self, pt: &Point, order: u32) -> Result<Vec<FormMat>> {
        let chi = self.reg.cutoff_eval(pt, order)?;
        if chi.is_zero() {
            return self.tilde.base().theta(pt, order).map(|v| v.iter().map(|t| t.truncate(order)).collect());
        }
        let ev = self.tilde.eval(pt, order)?;
        Ok(ev.theta.iter().zip(&ev.a).map(|(t, a)| t.add(&a.mul_jet(&chi))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::connection::ConnectionFamily;
    use crate::forms::mono::Layout;
    use crate::forms::pointwise::Mat;
    use num_complex::Complex64 as C64;

    fn z_sheaf() -> Arc<TildeConnection> {
        let phi = Mat::from_fn(1, 1, |_, _| ScalarField::z(0));
        let c = Arc::new(BundleComplex::new(1, vec![1, 1], vec![phi]).unwrap());
        Arc::new(TildeConnection::sheaf(c, Arc::new(ConnectionFamily::trivial(1, &[1, 1]))).unwrap())
    }

    #[test]
    fn cutoff_boundary_values() {
        let r = Regulator::single(ChiKind::Standard, vec![ScalarField::z(0)]).unwrap();
        let z = C64::new(0.3, 0.4);
        let pt = Point::chart(vec![z]).with_eps(z.norm_sqr() / 2.0);
        assert!((r.cutoff_eval(&pt, 1).unwrap().value() - 1.0).norm() < 1e-15);
        let j = r.cutoff_eval(&Point::chart(vec![C64::new(0.0, 0.0)]).with_eps(0.1), 1).unwrap();
        assert!(j.is_zero() || j.max_abs() == 0.0);
        assert!(r.cutoff_eval(&Point::chart(vec![z]), 0).is_err());
    }

    #[test]
    fn regularized_matches_tilde_and_base_at_the_extremes() {
        let t = z_sheaf();
        let reg = Arc::new(Regulator::single(ChiKind::Standard, vec![ScalarField::z(0)]).unwrap());
        let r = regularize(t.clone(), reg);
        let l = Layout::chart(1);
        let z = C64::new(0.3, 0.1);
        let far = Point::chart(vec![z]).with_eps(z.norm_sqr() / 3.0);
        let a = r.theta(&far, 1).unwrap();
        let b = t.theta(&far, 1).unwrap();
        assert!(a[1].sub(&b[1]).max_abs() < 1e-15);
        let near = Point::chart(vec![z]).with_eps(z.norm_sqr() * 3.0);
        assert!(r.theta(&near, 1).unwrap()[1].get(0, 0).value_at(l.dz(0)).norm() == 0.0);
    }

    #[test]
    fn convex_combination_of_two_charts() {
        let s1 = vec![ScalarField::z(0)];
        let s2 = vec![ScalarField::z(0).scale(C64::new(2.0, 0.0))];
        let psi = ScalarField::x(0).mul(&ScalarField::x(0)).scale(C64::new(0.5, 0.0));
        let charts = vec![
            ChartCutoff { psi: psi.clone(), sections: s1.clone(), support: None },
            ChartCutoff { psi: ScalarField::one().sub(&psi), sections: s2.clone(), support: None },
        ];
        let r = Regulator::new(ChiKind::Standard, charts).unwrap();
        let a = Regulator::single(ChiKind::Standard, s1).unwrap();
        let b = Regulator::single(ChiKind::Standard, s2).unwrap();
        let pt = Point::chart(vec![C64::new(0.6, 0.3)]).with_eps(0.3);
        let (va, vb, v) = (a.cutoff_eval(&pt, 0).unwrap().value().re, b.cutoff_eval(&pt, 0).unwrap().value().re, r.cutoff_eval(&pt, 0).unwrap().value().re);
        assert!(v >= va.min(vb) - 1e-15 && v <= va.max(vb) + 1e-15);
    }

    #[test]
    fn interval_bounds_decide_constant_boxes() {
        let r = Regulator::single(ChiKind::Standard, vec![ScalarField::z(0)]).unwrap();
        assert!(r.is_one_on(&[(1.0, 2.0), (0.0, 1.0)], 0.1));
        assert!(r.is_zero_on(&[(-0.1, 0.1), (-0.1, 0.1)], 0.1));
        assert!(!r.is_one_on(&[(-0.1, 2.0), (0.0, 1.0)], 0.1));
    }
}
