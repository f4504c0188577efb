//! Simplex-interpolated connections `D^Δ = Σ t_j D^{α_j}`, the cochain
//! `Φ̌(D)_Δ = ∫_{Δ_p} Φ(D^Δ)` and its collapse `Φ(D) = Ψ(Φ̌(D))`.

use crate::cechgreen::cochain::{zero_entry, CochainSource, Nabla};
use crate::cechgreen::psi::psi_collapse_cocycle;
use crate::cechgreen::resolution::SimplicialResolution;
use crate::complexes::chern::{phi_forms, SymmetricPolynomial};
use crate::complexes::connection::{curvature_jet, ConnectionSource};
use crate::error::{Error, Result};
use crate::forms::mono::Layout;
use crate::forms::pointwise::{FormJet, FormMat};
use crate::forms::scalar::Point;
use crate::forms::simplex::SimplexRule;
use crate::jet::{Jet, JetSpace};
use crate::C64;
use std::sync::Arc;

/// Cubature degree in the simplex variables; `Φ(D^Δ)` is a polynomial of
/// degree `≤ 2ℓ` in `t`, so this is exact for `ℓ ≤ 3`.
pub const SIMPLEX_DEGREE: usize = 7;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `∫_{Δ_p} Φ(Σ_j t_j D^j)` for the vertex connections `thetas[j][k]` (level
/// `k`, jets of order `m + 1`). Returns chart forms with jets of order `m`.
pub fn simplex_phi(thetas: &[Vec<FormMat>], phis: &[SymmetricPolynomial], rule: &SimplexRule) -> Result<Vec<FormJet>> {
    let p = thetas.len() - 1;
    if rule.dim() != p {
        return Err(Error::Dimension(format!("cubature on Δ_{} for {} vertices", rule.dim(), p + 1)));
    }
    let levels = thetas[0].len();
    let nz = thetas[0].iter().find(|t| t.rows > 0).map(|t| t.layout().nz).ok_or_else(|| Error::Dimension("all levels have rank 0".into()))?;
    let order = thetas.iter().flat_map(|v| v.iter()).filter(|t| t.rows > 0).map(|t| t.order()).min().unwrap_or(1);
    if order == 0 {
        return Err(Error::DerivativeOrderExhausted { coefficient: "connection matrix".into() });
    }
    if p == 0 {
        let curvs = thetas[0].iter().map(|t| if t.rows == 0 { Ok(t.clone()) } else { curvature_jet(t) }).collect::<Result<Vec<_>>>()?;
        return phi_forms(phis, &curvs.iter().collect::<Vec<_>>());
    }
    let layout = Layout::new(nz, p);
    let space = JetSpace::get(nz, 0, order);
    let lower = JetSpace::get(nz, 0, order - 1);
    let one = Jet::constant(space, real(1.0));
    let dts: Vec<FormJet> = (0..p).map(|j| FormJet::term(layout, layout.dt(j), one.clone())).collect();
    // per level: vertex matrices, their d, and dt_j ∧ (θ^j − θ^0)
    let mut th = Vec::with_capacity(levels);
    let mut dth = Vec::with_capacity(levels);
    let mut dt_part = Vec::with_capacity(levels);
    for k in 0..levels {
        let r = thetas[0][k].rows;
        if r == 0 {
            th.push(Vec::new());
            dth.push(Vec::new());
            dt_part.push(FormMat::zeros(layout, lower, 0, 0));
            continue;
        }
        let v: Vec<FormMat> = thetas.iter().map(|t| t[k].relayout(p)).collect();
        let d: Vec<FormMat> = v.iter().map(|t| t.d()).collect::<Result<_>>()?;
        let mut acc = FormMat::zeros(layout, lower, r, r);
        for j in 1..=p {
            let diff = v[j].sub(&v[0]).truncate(order - 1);
            acc = acc.add(&diff.map(|f| dts[j - 1].wedge(f)));
        }
        th.push(v);
        dth.push(d);
        dt_part.push(acc);
    }
    let mut out: Option<Vec<FormJet>> = None;
    for (t, w) in rule.nodes() {
        let t0 = 1.0 - t.iter().sum::<f64>();
        let weight = |j: usize| if j == 0 { t0 } else { t[j - 1] };
        let mut curvs = Vec::with_capacity(levels);
        for k in 0..levels {
            if th[k].is_empty() {
                curvs.push(FormMat::zeros(layout, lower, 0, 0));
                continue;
            }
            let mut theta = th[k][0].scale(real(weight(0)));
            let mut dtheta = dth[k][0].scale(real(weight(0)));
            for j in 1..=p {
                theta = theta.add(&th[k][j].scale(real(weight(j))));
                dtheta = dtheta.add(&dth[k][j].scale(real(weight(j))));
            }
            curvs.push(dtheta.add(&theta.wedge(&theta)).add(&dt_part[k]));
        }
        let vals = phi_forms(phis, &curvs.iter().collect::<Vec<_>>())?;
        let vals: Vec<FormJet> = vals.iter().map(|f| f.dt_top_coefficient().scale(real(w))).collect();
        out = Some(match out {
            None => vals,
            Some(acc) => acc.iter().zip(&vals).map(|(a, b)| a.add(b)).collect(),
        });
    }
    Ok(out.expect("cubature rules have nodes"))
}

/// The largest total degree `ℓ` among the polynomials.
pub fn max_degree_of(phis: &[SymmetricPolynomial]) -> Result<usize> {
    if phis.is_empty() {
        return Err(Error::InvalidInput("no characteristic polynomial given".into()));
    }
    Ok(phis.iter().map(|p| p.degree()).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0))
}

/// The cochain `Φ̌(D)` of a simplicial resolution, one form per polynomial.
#[derive(Clone, Debug)]
pub struct CheckPhi {
    res: Arc<SimplicialResolution>,
    phis: Vec<SymmetricPolynomial>,
    max_degree: usize,
    rules: Vec<SimplexRule>,
}

impl CheckPhi {
    pub fn new(res: Arc<SimplicialResolution>, phis: Vec<SymmetricPolynomial>) -> Result<CheckPhi> {
        let ell = max_degree_of(&phis)?;
        let max_degree = res.cover().default_max_degree(ell);
        let rules = (0..=max_degree).map(|p| SimplexRule::grundmann_moller(p, SIMPLEX_DEGREE)).collect();
        Ok(CheckPhi { res, phis, max_degree, rules })
    }

    pub fn resolution(&self) -> &Arc<SimplicialResolution> {
        &self.res
    }

    pub fn phis(&self) -> &[SymmetricPolynomial] {
        &self.phis
    }

    /// Highest Čech degree carried by the cochain.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Vertex connections of `D^Δ` in the frame of `E^Δ`.
    pub fn simplex_thetas(&self, simplex: &[usize], pt: &Point, order: u32) -> Result<Vec<Vec<FormMat>>> {
        (0..simplex.len()).map(|j| self.res.vertex_theta(simplex, j, pt, order)).collect()
    }
}

fn has_repeat(s: &[usize]) -> bool {
    s.iter().enumerate().any(|(i, a)| s[i + 1..].contains(a))
}

impl CochainSource for CheckPhi {
    fn nz(&self) -> usize {
        self.res.nz()
    }

    fn width(&self) -> usize {
        self.phis.len()
    }

    fn entry(&self, simplex: &[usize], pt: &Point, order: u32) -> Result<Vec<FormJet>> {
        let p = simplex.len() - 1;
        // a degenerate simplex pulls back through Δ_p → Δ_{p-1}
        if has_repeat(simplex) || p > self.max_degree {
            return Ok(zero_entry(self.nz(), self.width(), order));
        }
        let thetas = self.simplex_thetas(simplex, pt, order + 1)?;
        let v = simplex_phi(&thetas, &self.phis, &self.rules[p])?;
        Ok(v.iter().map(|f| f.truncate(order)).collect())
    }
}

/// `Φ(D) = Ψ(Φ̌(D))` at a point.
pub fn global_phi(check: &CheckPhi, pt: &Point, order: u32) -> Result<Vec<FormJet>> {
    psi_collapse_cocycle(check, check.res.cover(), check.max_degree, pt, order)
}

/// Largest coefficient of `∇Φ̌(D)` over the nerve simplices containing `pt`.
pub fn cocycle_defect(check: &CheckPhi, pt: &Point) -> Result<f64> {
    let cover = check.res.cover();
    let nabla = Nabla(check);
    let mut worst: f64 = 0.0;
    for s in cover.nerve(check.max_degree + 1) {
        if !s.iter().all(|&a| cover.boxes()[a].contains(pt)) {
            continue;
        }
        for f in nabla.entry(&s, pt, 0)? {
            worst = worst.max(f.max_abs());
        }
    }
    Ok(worst)
}

/// `max |Σ_k (-1)^k Φ(D^0..D̂^k..D^p) + (-1)^p dΦ(D^0..D^p)|` at a point, for
/// connections on one complex.
pub fn interpolation_identity_check(conns: &[Arc<dyn ConnectionSource>], phis: &[SymmetricPolynomial], pt: &Point) -> Result<f64> {
    let p = conns.len().checked_sub(1).filter(|&p| p >= 1).ok_or_else(|| Error::InvalidInput("the identity needs p ≥ 1".into()))?;
    let thetas2 = conns.iter().map(|c| c.theta(pt, 2)).collect::<Result<Vec<_>>>()?;
    let thetas1: Vec<Vec<FormMat>> = thetas2.iter().map(|v| v.iter().map(|t| t.truncate(1)).collect()).collect();
    let full = simplex_phi(&thetas2, phis, &SimplexRule::grundmann_moller(p, SIMPLEX_DEGREE))?;
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    let mut acc: Vec<FormJet> = full.iter().map(|f| f.d().map(|g| g.scale(real(sign)))).collect::<Result<_>>()?;
    let face_rule = SimplexRule::grundmann_moller(p - 1, SIMPLEX_DEGREE);
    for k in 0..=p {
        let mut face = thetas1.clone();
        face.remove(k);
        let v = simplex_phi(&face, phis, &face_rule)?;
        for (a, f) in acc.iter_mut().zip(&v) {
            *a = if k % 2 == 0 { a.add(f) } else { a.sub(f) };
        }
    }
    Ok(acc.iter().map(|f| f.max_abs()).fold(0.0, f64::max))
}

/// Largest coefficient on masks whose `(holomorphic, antiholomorphic)`
/// degrees are rejected by `allowed`.
pub fn excluded_bidegree_norm(f: &FormJet, allowed: impl Fn(u32, u32) -> bool) -> f64 {
    let l = f.layout();
    f.terms()
        .iter()
        .filter(|(m, _)| {
            let (a, b, _) = l.tridegree(*m);
            !allowed(a, b)
        })
        .map(|(_, c)| c.value().norm())
        .fold(0.0, f64::max)
}
