//! The singular connections `ã = D + a` built from minimal inverses, for
//! sheaves (presentations of `𝒪/𝒥`-type modules) and for foliations.
//!
//! Matrices act on column vectors in the standard frames and `Dφ_k` is the
//! plain matrix expression `dφ_k + θ_{k-1}φ_k - φ_kθ_k`.

use crate::complexes::bundle::BundleComplex;
use crate::complexes::connection::ConnectionSource;
use crate::complexes::mininv::minimal_inverse;
use crate::error::{Error, Result};
use crate::forms::graded::GradedForm;
use crate::forms::mono::Layout;
use crate::forms::pointwise::{FormJet, FormMat, JetMat, Mat};
use crate::forms::scalar::Point;
use crate::jet::{Jet, JetSpace};
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TildeKind {
    Sheaf,
    Foliation,
}

/// `D + a` with the corrections `a_k` evaluated pointwise on `U ∖ Z`.
#[derive(Clone)]
pub struct TildeConnection {
    complex: Arc<BundleComplex>,
    base: Arc<dyn ConnectionSource>,
    kind: TildeKind,
    a0_perturbation: Option<GradedForm>,
}

/// Everything computed at one point, with jets of order `m`.
#[derive(Clone, Debug)]
pub struct TildeEval {
    /// `φ_k` at index `k-1`.
    pub phi: Vec<JetMat>,
    /// `σ_k` at index `k-1`.
    pub sigma: Vec<JetMat>,
    /// Base connection matrices `θ_k`.
    pub theta: Vec<FormMat>,
    /// `Dφ_k` at index `k-1`.
    pub dphi: Vec<FormMat>,
    /// Corrections `a_k`.
    pub a: Vec<FormMat>,
    pub b: Option<FormMat>,
}

impl TildeEval {
    /// `θ_k + a_k`.
    pub fn tilde_theta(&self) -> Vec<FormMat> {
        self.theta.iter().zip(&self.a).map(|(t, a)| t.add(a)).collect()
    }
}

/// `Dφ = dφ + θ_{k-1}φ - φθ_k` for `φ` given with one more derivative than the `θ`s.
pub fn d_phi(theta_tgt: &FormMat, theta_src: &FormMat, phi: &JetMat, layout: Layout) -> Result<FormMat> {
    let order = theta_tgt.order().min(theta_src.order());
    let d = phi.to_forms(layout).d()?.truncate(order);
    let p = phi.truncate(order);
    Ok(d.add(&theta_tgt.mul_right(&p)).sub(&theta_src.mul_left(&p)))
}

/// `b = Σ_m B_m dz_m` with `(B_m)_{jk} = -(A_k)_{jm}` where `Dφ_1σ_1 = Σ_m A_m dz_m`.
pub fn b_from(dphi_sigma: &FormMat, space: &'static JetSpace) -> FormMat {
    let layout = dphi_sigma.layout();
    let n = layout.nz;
    let comps = dphi_sigma.one_form_components(space);
    let mut out = FormMat::zeros(layout, space, n, n);
    for m in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = comps[space.z_var(k)].get(j, m);
                if c.is_zero() {
                    continue;
                }
                let f = out.get(j, k).add(&FormJet::term(layout, layout.dz(m), c.neg()));
                out.set(j, k, f);
            }
        }
    }
    out
}

impl TildeConnection {
    /// Corrections `a_0 = 0`, `a_k = σ_k Dφ_k`.
    pub fn sheaf(complex: Arc<BundleComplex>, base: Arc<dyn ConnectionSource>) -> Result<TildeConnection> {
        TildeConnection::new(complex, base, TildeKind::Sheaf)
    }

    /// Corrections `a_0 = b(I - φ_1σ_1) - Dφ_1σ_1`, `a_k = -Dφ_{k+1}σ_{k+1}`
    /// for `1 ≤ k < N` and `a_N = 0`.
    pub fn foliation(complex: Arc<BundleComplex>, base: Arc<dyn ConnectionSource>) -> Result<TildeConnection> {
        if !complex.is_foliation() {
            return Err(Error::InvalidInput("foliation corrections need a complex in foliation mode".into()));
        }
        TildeConnection::new(complex, base, TildeKind::Foliation)
    }

    fn new(complex: Arc<BundleComplex>, base: Arc<dyn ConnectionSource>, kind: TildeKind) -> Result<TildeConnection> {
        if base.ranks() != complex.ranks() || base.nz() != complex.n() {
            return Err(Error::Dimension(format!(
                "connection ranks {:?} on ℂ^{} do not match the complex {:?} on ℂ^{}",
                base.ranks(),
                base.nz(),
                complex.ranks(),
                complex.n()
            )));
        }
        if complex.ranks().contains(&0) {
            return Err(Error::Dimension("levels of rank 0 are not supported; drop them from the complex".into()));
        }
        Ok(TildeConnection { complex, base, kind, a0_perturbation: None })
    }

    /// Add `ω ⊗ Id` to `a_0` (used as a negative control).
    pub fn with_a0_perturbation(mut self, omega: GradedForm) -> TildeConnection {
        self.a0_perturbation = Some(omega);
        self
    }

    pub fn kind(&self) -> TildeKind {
        self.kind
    }

    pub fn complex(&self) -> &Arc<BundleComplex> {
        &self.complex
    }

    pub fn base(&self) -> &Arc<dyn ConnectionSource> {
        &self.base
    }

    /// Evaluate all pieces with jets of order `order` at a chart point.
    pub fn eval(&self, pt: &Point, order: u32) -> Result<TildeEval> {
        let c = &self.complex;
        let n = c.n();
        let layout = Layout::chart(n);
        let space = JetSpace::get(n, 0, order);
        let hi = JetSpace::get(n, 0, order + 1);
        let phi_hi = c.eval_maps(pt, hi)?;
        let theta = self.base.theta(pt, order)?;
        let theta: Vec<FormMat> = theta.iter().map(|t| t.truncate(order)).collect();
        let nmaps = c.len();
        let mut phi = Vec::with_capacity(nmaps);
        let mut sigma = Vec::with_capacity(nmaps);
        let mut dphi = Vec::with_capacity(nmaps);
        for k in 1..=nmaps {
            let p = phi_hi[k - 1].truncate(order);
            let h_tgt = c.eval_metric(k - 1, pt, space)?;
            let h_src = c.eval_metric(k, pt, space)?;
            sigma.push(minimal_inverse(&p, c.generic_rank(k), h_tgt.as_ref(), h_src.as_ref(), pt)?);
            dphi.push(d_phi(&theta[k - 1], &theta[k], &phi_hi[k - 1], layout)?);
            phi.push(p);
        }
        let mut a: Vec<FormMat> = c.ranks().iter().map(|&r| FormMat::zeros(layout, space, r, r)).collect();
        let mut b = None;
        match self.kind {
            TildeKind::Sheaf => {
                for k in 1..=nmaps {
                    a[k] = dphi[k - 1].mul_left(&sigma[k - 1]);
                }
            }
            TildeKind::Foliation => {
                let ds = dphi[0].mul_right(&sigma[0]);
                let bm = b_from(&ds, space);
                let r0 = c.ranks()[0];
                let proj = JetMat::identity(space, r0).sub(&phi[0].mul(&sigma[0]));
                a[0] = bm.mul_right(&proj).sub(&ds);
                for k in 1..nmaps {
                    a[k] = dphi[k].mul_right(&sigma[k]).neg();
                }
                b = Some(bm);
            }
        }
        if let Some(w) = &self.a0_perturbation {
            let f = w.eval(pt, order)?.truncate(order);
            let r0 = c.ranks()[0];
            let id = Mat::from_fn(r0, r0, |i, j| if i == j { f.clone() } else { FormJet::zero(layout, space) });
            a[0] = a[0].add(&id);
        }
        Ok(TildeEval { phi, sigma, theta, dphi, a, b })
    }
}

impl ConnectionSource for TildeConnection {
    fn nz(&self) -> usize {
        self.complex.n()
    }

    fn ranks(&self) -> &[usize] {
        self.complex.ranks()
    }

    fn theta(&self, pt: &Point, order: u32) -> Result<Vec<FormMat>> {
        Ok(self.eval(pt, order)?.tilde_theta())
    }
}

/// `b` of a foliation complex at a point.
pub fn build_b(tilde: &TildeConnection, pt: &Point, order: u32) -> Result<FormMat> {
    if tilde.kind() != TildeKind::Foliation {
        return Err(Error::InvalidInput("b is only defined for foliation corrections".into()));
    }
    Ok(tilde.eval(pt, order)?.b.expect("foliation eval sets b"))
}

fn residual(basis: &[DVector<C64>], mut v: DVector<C64>) -> DVector<C64> {
    for q in basis {
        let c = q.dotc(&v);
        v -= q * c;
    }
    v
}

fn unit_vec(n: usize, i: usize) -> DVector<C64> {
    let mut e = DVector::from_element(n, C64::new(0.0, 0.0));
    e[i] = C64::new(1.0, 0.0);
    e
}

/// Induced connection matrix on `coker φ_1` in the frame of the images of the
/// coordinate vectors `e_j`, `j ∈ J`, where `J` complements the pivot columns
/// of `φ_1`. Returns `(J, θ_{-1})`.
pub fn quotient_connection(ev: &TildeEval, theta0: &FormMat, rho: usize, pt: &Point) -> Result<(Vec<usize>, FormMat)> {
    let phi = &ev.phi[0];
    let n = phi.rows;
    let space = phi.data[0].space();
    let vals = phi.values();
    // pivot columns of φ_1, then coordinate vectors completing them
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let mut cols = Vec::new();
    for _ in 0..rho {
        let best = (0..phi.cols)
            .filter(|j| !cols.contains(j))
            .map(|j| (j, residual(&basis, vals.column(j).clone_owned()).norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let Some((j, nrm)) = best.filter(|b| b.1 > 0.0) else {
            return Err(Error::SingularPoint { point: crate::error::fmt_point(&pt.z), reason: "φ_1 has dropped rank".into() });
        };
        basis.push(residual(&basis, vals.column(j).clone_owned()) / C64::new(nrm, 0.0));
        cols.push(j);
    }
    let mut jset = Vec::new();
    while jset.len() + rho < n {
        let (i, nrm) = (0..n)
            .filter(|i| !jset.contains(i))
            .map(|i| (i, residual(&basis, unit_vec(n, i)).norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("fewer than n vectors chosen");
        basis.push(residual(&basis, unit_vec(n, i)) / C64::new(nrm, 0.0));
        jset.push(i);
    }
    jset.sort_unstable();
    let q = jset.len();
    let m = Mat::from_fn(n, n, |i, j| {
        if j < q {
            Jet::constant(space, C64::new(if i == jset[j] { 1.0 } else { 0.0 }, 0.0))
        } else {
            phi.get(i, cols[j - q]).clone()
        }
    });
    let minv = m
        .inverse()
        .ok_or_else(|| Error::SingularPoint { point: crate::error::fmt_point(&pt.z), reason: "no frame of the cokernel".into() })?;
    let r = Mat::from_fn(q, n, |i, j| minv.get(i, j).clone());
    let cols_j = Mat::from_fn(n, q, |i, j| theta0.get(i, jset[j]).clone());
    Ok((jset, cols_j.mul_left(&r)))
}
