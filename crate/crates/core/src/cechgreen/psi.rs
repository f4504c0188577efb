//! The collapse `Ψ` of Čech–de Rham cochains to global forms.
//!
//! With `(Sγ)_{Δ} = Σ_β ψ_β γ_{Δβ}` and plain `d`,
//! `Ψ'γ = Σ_p [(dS)^p γ_p + S(dS)^p (∇γ)_{p+1}]` and `Ψγ = Σ_α ψ_α (Ψ'γ)_α`.
//! For cocycles the second sum vanishes and `Ψ'γ` is already global.

use crate::cechgreen::cochain::{zero_entry, CochainSource, Nabla};
use crate::cechgreen::cover::Cover;
use crate::error::{Error, Result};
use crate::forms::pointwise::FormJet;
use crate::forms::scalar::Point;
use crate::jet::Jet;

struct Ctx<'a> {
    cover: &'a Cover,
    members: Vec<usize>,
    pt: &'a Point,
}

impl Ctx<'_> {
    fn psi(&self, b: usize, order: u32) -> Result<Jet> {
        self.cover.psi(b).eval(self.pt, order)
    }

    /// `((dS)^j c)_{simplex}` at jet order `order`.
    fn dsj(&self, c: &dyn CochainSource, simplex: &mut Vec<usize>, j: usize, order: u32) -> Result<Vec<FormJet>> {
        if j == 0 {
            return Ok(c.entry(simplex, self.pt, order)?.iter().map(|f| f.truncate(order)).collect());
        }
        let mut acc = zero_entry(c.nz(), c.width(), order + 1);
        for &b in &self.members {
            let w = self.psi(b, order + 1)?;
            if w.is_zero() {
                continue;
            }
            simplex.push(b);
            let inner = self.dsj(c, simplex, j - 1, order + 1);
            simplex.pop();
            for (a, f) in acc.iter_mut().zip(&inner?) {
                *a = a.add(&f.mul_jet(&w));
            }
        }
        acc.iter().map(|f| f.d()).collect()
    }

    /// `(S c)_{simplex}` at jet order `order`, with `c = (dS)^j γ'`.
    fn s_dsj(&self, c: &dyn CochainSource, simplex: &mut Vec<usize>, j: usize, order: u32) -> Result<Vec<FormJet>> {
        let mut acc = zero_entry(c.nz(), c.width(), order);
        for &b in &self.members {
            let w = self.psi(b, order)?;
            if w.is_zero() {
                continue;
            }
            simplex.push(b);
            let inner = self.dsj(c, simplex, j, order);
            simplex.pop();
            for (a, f) in acc.iter_mut().zip(&inner?) {
                *a = a.add(&f.mul_jet(&w));
            }
        }
        Ok(acc)
    }
}

fn check(src: &dyn CochainSource, cover: &Cover, pt: &Point) -> Result<()> {
    if src.nz() != cover.nz() || pt.z.len() != cover.nz() {
        return Err(Error::Dimension(format!("cochain on ℂ^{} and cover of ℂ^{}", src.nz(), cover.nz())));
    }
    if cover.members(pt).is_empty() {
        return Err(Error::InvalidInput(format!("{} lies outside the cover", crate::error::fmt_point(&pt.z))));
    }
    Ok(())
}

/// Chart values `(α, (Ψ'γ)_α)` for every `α ∋ pt`. With `full = false` the
/// `S(dS)^p(∇γ)_{p+1}` terms are dropped, which is exact for cocycles.
pub fn psi_prime(
    src: &dyn CochainSource,
    cover: &Cover,
    max_degree: usize,
    pt: &Point,
    order: u32,
    full: bool,
) -> Result<Vec<(usize, Vec<FormJet>)>> {
    check(src, cover, pt)?;
    let ctx = Ctx { cover, members: cover.members(pt), pt };
    let nabla = Nabla(src);
    let mut out = Vec::new();
    for &a in &ctx.members {
        let mut acc = zero_entry(src.nz(), src.width(), order);
        let mut s = vec![a];
        for p in 0..=max_degree {
            for (x, f) in acc.iter_mut().zip(&ctx.dsj(src, &mut s, p, order)?) {
                *x = x.add(f);
            }
            if full {
                for (x, f) in acc.iter_mut().zip(&ctx.s_dsj(&nabla, &mut s, p, order)?) {
                    *x = x.add(f);
                }
            }
        }
        out.push((a, acc));
    }
    Ok(out)
}

/// `Ψγ` at a point with jets of order `order` (full formula).
pub fn psi_collapse(src: &dyn CochainSource, cover: &Cover, max_degree: usize, pt: &Point, order: u32) -> Result<Vec<FormJet>> {
    collapse(src, cover, max_degree, pt, order, true)
}

/// `Ψγ` for a cocycle `γ`, using `Ψ'γ = Σ_p (dS)^p γ_p`.
pub fn psi_collapse_cocycle(src: &dyn CochainSource, cover: &Cover, max_degree: usize, pt: &Point, order: u32) -> Result<Vec<FormJet>> {
    collapse(src, cover, max_degree, pt, order, false)
}

fn collapse(src: &dyn CochainSource, cover: &Cover, max_degree: usize, pt: &Point, order: u32, full: bool) -> Result<Vec<FormJet>> {
    let charts = psi_prime(src, cover, max_degree, pt, order, full)?;
    let mut acc = zero_entry(src.nz(), src.width(), order);
    for (a, v) in charts {
        let w = cover.psi(a).eval(pt, order)?;
        for (x, f) in acc.iter_mut().zip(&v) {
            *x = x.add(&f.mul_jet(&w));
        }
    }
    Ok(acc)
}

/// Largest disagreement between chart values of `Ψ'γ` at a point.
pub fn overlap_disagreement(src: &dyn CochainSource, cover: &Cover, max_degree: usize, pt: &Point, full: bool) -> Result<f64> {
    let charts = psi_prime(src, cover, max_degree, pt, 0, full)?;
    let mut worst: f64 = 0.0;
    for w in charts.windows(2) {
        for (a, b) in w[0].1.iter().zip(&w[1].1) {
            worst = worst.max(a.sub(b).max_abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cechgreen::cochain::Cochain;
    use crate::cechgreen::cover::BoxRegion;
    use crate::forms::graded::GradedForm;
    use crate::forms::mono::Layout;
    use crate::forms::scalar::ScalarField;

    fn cover() -> Cover {
        let d = BoxRegion::cube(1, 2.0);
        let a = BoxRegion::new(vec![(-2.0, 0.5), (-2.0, 2.0)]).unwrap();
        let b = BoxRegion::new(vec![(-0.5, 2.0), (-2.0, 2.0)]).unwrap();
        Cover::new(d, vec![a, b], 0.3).unwrap()
    }

    #[test]
    fn restriction_collapses_to_the_form() {
        let c = cover();
        let l = Layout::chart(1);
        let w = GradedForm::term(l, l.dz(0), ScalarField::z(0).mul(&ScalarField::zb(0)));
        let g = Cochain::restriction(&w, c.len());
        for pt in c.domain().sample(20, 3) {
            let v = psi_collapse(&g, &c, 1, &pt, 0).unwrap();
            let want = w.eval(&pt, 0).unwrap();
            assert!(v[0].sub(&want).max_abs() < 1e-12);
        }
    }

    #[test]
    fn one_cochain_collapse_commutes_with_nabla() {
        let c = cover();
        let l = Layout::chart(1);
        let mut g = Cochain::new(1);
        g.insert(vec![0, 1], GradedForm::scalar(l, ScalarField::z(0).pow(2).add(&ScalarField::zb(0))));
        g.insert(vec![1, 0], GradedForm::scalar(l, ScalarField::x(0)));
        g.insert(vec![0, 0], GradedForm::zero(l));
        g.insert(vec![1, 1], GradedForm::scalar(l, ScalarField::y(0)));
        let nabla = Nabla(&g);
        for pt in c.domain().sample(20, 5) {
            let lhs = psi_collapse(&g, &c, 2, &pt, 1).unwrap()[0].d().unwrap();
            let rhs = psi_collapse(&nabla, &c, 2, &pt, 0).unwrap();
            assert!(lhs.sub(&rhs[0]).max_abs() < 1e-10, "{:?}", pt.z);
        }
    }
}
