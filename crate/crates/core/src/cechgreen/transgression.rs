//! Transgression between two setups: `η̌ = hΦ̌_𝒱` on `𝒲 = 𝒰_1 ∩ 𝒰_2` for the
//! two refinements `𝒲 → 𝒱 = 𝒰_1 ⊔ 𝒰_2`, and `η = Ψ_𝒲(η̌)` with
//! `dη = Φ(D_2) - Φ(D_1)`.

use crate::cechgreen::cochain::{zero_entry, CochainSource, Homotopy, Nabla, Refined};
use crate::cechgreen::cover::Cover;
use crate::cechgreen::glued::{max_degree_of, CheckPhi};
use crate::cechgreen::psi::psi_collapse;
use crate::cechgreen::resolution::SimplicialResolution;
use crate::complexes::bundle::FieldMat;
use crate::complexes::chern::SymmetricPolynomial;
use crate::error::Result;
use crate::forms::pointwise::FormJet;
use crate::forms::scalar::Point;
use std::sync::Arc;

pub struct Transgression {
    check_v: CheckPhi,
    w: Arc<Cover>,
    rho1: Vec<usize>,
    rho2: Vec<usize>,
    max_degree: usize,
}

impl Transgression {
    /// `mixed` lists isomorphisms `g_{αβ}: P^{2,β} → P^{1,α}` for overlapping
    /// charts of the two setups whose complexes differ.
    pub fn new(
        r1: &SimplicialResolution,
        r2: &SimplicialResolution,
        phis: Vec<SymmetricPolynomial>,
        mixed: Vec<((usize, usize), Vec<FieldMat>)>,
    ) -> Result<Transgression> {
        let ell = max_degree_of(&phis)?;
        let v = Arc::new(SimplicialResolution::disjoint_union(r1, r2, mixed)?);
        let (w, pairs) = Cover::intersection(r1.cover(), r2.cover())?;
        let m1 = r1.cover().len();
        let rho1 = pairs.iter().map(|&(a, _)| a).collect();
        let rho2 = pairs.iter().map(|&(_, b)| m1 + b).collect();
        let max_degree = (2 * ell).saturating_sub(1).min(v.cover().len().saturating_sub(2));
        Ok(Transgression { check_v: CheckPhi::new(v, phis)?, w: Arc::new(w), rho1, rho2, max_degree })
    }

    pub fn cover(&self) -> &Arc<Cover> {
        &self.w
    }

    pub fn check_phi(&self) -> &CheckPhi {
        &self.check_v
    }

    /// Highest Čech degree of `η̌`.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn homotopy(&self) -> Homotopy<'_> {
        Homotopy { src: &self.check_v, rho1: &self.rho1, rho2: &self.rho2 }
    }

    /// `η = Ψ_𝒲(η̌)` at a point.
    pub fn eta(&self, pt: &Point, order: u32) -> Result<Vec<FormJet>> {
        psi_collapse(&self.homotopy(), &self.w, self.max_degree, pt, order)
    }

    /// `max |∇η̌ - (ρ_2Φ̌ - ρ_1Φ̌)|` over the simplices of `𝒲` containing `pt`.
    pub fn homotopy_defect(&self, pt: &Point) -> Result<f64> {
        let h = self.homotopy();
        let nabla = Nabla(&h);
        let r1 = Refined { src: &self.check_v, map: &self.rho1 };
        let r2 = Refined { src: &self.check_v, map: &self.rho2 };
        let mut worst: f64 = 0.0;
        for s in self.w.nerve(self.max_degree + 1) {
            if !s.iter().all(|&a| self.w.boxes()[a].contains(pt)) {
                continue;
            }
            let lhs = nabla.entry(&s, pt, 0)?;
            let (a, b) = (r1.entry(&s, pt, 0)?, r2.entry(&s, pt, 0)?);
            for ((l, x), y) in lhs.iter().zip(&a).zip(&b) {
                worst = worst.max(l.sub(&y.sub(x)).max_abs());
            }
        }
        Ok(worst)
    }
}

impl CochainSource for Transgression {
    fn nz(&self) -> usize {
        self.check_v.nz()
    }

    fn width(&self) -> usize {
        self.check_v.width()
    }

    fn entry(&self, simplex: &[usize], pt: &Point, order: u32) -> Result<Vec<FormJet>> {
        if simplex.len() - 1 > self.max_degree {
            return Ok(zero_entry(self.nz(), self.width(), order));
        }
        self.homotopy().entry(simplex, pt, order)
    }
}
