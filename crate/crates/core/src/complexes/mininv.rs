//! Minimal inverses `σ_k` of the maps of a complex.

use crate::error::{Error, Result};
use crate::forms::pointwise::JetMat;
use crate::forms::scalar::Point;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Relative threshold on `(s_ρ/s_1)²` below which the point counts as a rank drop.
pub const RANK_DROP_THRESHOLD: f64 = 1e-8;

/// Greedy column-pivoted Gram–Schmidt on values: indices of `rho` columns
/// spanning the column space.
fn pivot_columns(m: &DMatrix<C64>, rho: usize) -> Vec<usize> {
    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::new();
    let mut chosen = Vec::new();
    for _ in 0..rho {
        let mut best = (0, -1.0, None);
        for j in 0..m.ncols() {
            if chosen.contains(&j) {
                continue;
            }
            let mut v = m.column(j).clone_owned();
            for q in &basis {
                let c = q.dotc(&v);
                v -= q * c;
            }
            let n = v.norm();
            if n > best.1 {
                best = (j, n, Some(v));
            }
        }
        let (j, n, v) = best;
        let Some(v) = v else { break };
        chosen.push(j);
        if n > 0.0 {
            basis.push(v / C64::new(n, 0.0));
        }
    }
    chosen.sort_unstable();
    chosen
}

fn hermitian_or_identity(h: Option<&JetMat>, like: &JetMat, n: usize) -> JetMat {
    match h {
        Some(h) => h.truncate(like.order()),
        None => JetMat::identity(like.data.first().map(|c| c.space()).expect("nonempty"), n),
    }
}

/// Metric minimal inverse of `φ: E_k → E_{k-1}` of generic rank `rho`.
///
/// `h_src` and `h_tgt` are the metrics on `E_k` and `E_{k-1}` (identity when
/// absent). The result is `r_k × r_{k-1}` with the same jet order as `phi`.
pub fn minimal_inverse(phi: &JetMat, rho: usize, h_tgt: Option<&JetMat>, h_src: Option<&JetMat>, pt: &Point) -> Result<JetMat> {
    let (rt, rs) = phi.shape();
    if rt == 0 || rs == 0 {
        return Err(Error::Dimension("minimal inverse of a map with an empty side".into()));
    }
    let space = phi.data[0].space().at_order(phi.order());
    if rho == 0 {
        return Ok(JetMat::zeros(space, rs, rt));
    }
    let vals = phi.values();
    let sv = vals.clone().singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let ratio = if s[0] == 0.0 { 0.0 } else { (s.get(rho - 1).copied().unwrap_or(0.0) / s[0]).powi(2) };
    if ratio < RANK_DROP_THRESHOLD {
        return Err(Error::SingularPoint {
            point: crate::error::fmt_point(&pt.z),
            reason: format!("rank of a {}x{} map drops below {} (σ²-ratio {:.2e})", rt, rs, rho, ratio),
        });
    }
    let cols = pivot_columns(&vals, rho);
    let all_rows: Vec<usize> = (0..rt).collect();
    let c = phi.submatrix(&all_rows, &cols);
    let ch = c.adjoint();
    let sing = || Error::SingularPoint { point: crate::error::fmt_point(&pt.z), reason: "normal matrix is not invertible".into() };
    let f = ch.mul(&c).inverse().ok_or_else(sing)?.mul(&ch).mul(phi);
    let fh = f.adjoint();
    let ht = hermitian_or_identity(h_tgt, phi, rt);
    let hs = hermitian_or_identity(h_src, phi, rs);
    let hs_inv = hs.inverse().ok_or_else(sing)?;
    let left = hs_inv.mul(&fh).mul(&f.mul(&hs_inv).mul(&fh).inverse().ok_or_else(sing)?);
    let right = ch.mul(&ht).mul(&c).inverse().ok_or_else(sing)?.mul(&ch).mul(&ht);
    Ok(left.mul(&right))
}

/// Largest entry of `φσφ - φ`, `P_{im φ_{k+1}}` component of `im σ_k` and
/// `σ_{k+1}σ_k` in one number, for diagnostics and tests.
pub fn defining_identity_defects(phi_k: &DMatrix<C64>, sigma_k: &DMatrix<C64>, next: Option<(&DMatrix<C64>, &DMatrix<C64>)>, h_k: &DMatrix<C64>) -> [f64; 3] {
    let a = (phi_k * sigma_k * phi_k - phi_k).camax();
    let (b, c) = match next {
        Some((phi_n, sigma_n)) => ((phi_n.adjoint() * h_k * sigma_k).camax(), (sigma_n * sigma_k).camax()),
        None => (0.0, 0.0),
    };
    [a, b, c]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::bundle::{sample_points, BundleComplex};
    use crate::jet::JetSpace;

    fn c(a: f64, b: f64) -> C64 {
        C64::new(a, b)
    }

    #[test]
    fn row_vector_pseudoinverse() {
        let k = BundleComplex::koszul(2);
        let sp = JetSpace::get(2, 0, 1);
        let pt = Point::chart(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let phi = k.phi(1).eval(&pt, sp).unwrap();
        let s = minimal_inverse(&phi, 1, None, None, &pt).unwrap().values();
        assert!((s[(0, 0)] - 1.0).norm() < 1e-14 && s[(1, 0)].norm() < 1e-14);

        let z = [c(0.3, -0.7), c(1.1, 0.4)];
        let pt = Point::chart(z.to_vec());
        let phi = k.phi(1).eval(&pt, sp).unwrap();
        let s = minimal_inverse(&phi, 1, None, None, &pt).unwrap();
        let n2 = z[0].norm_sqr() + z[1].norm_sqr();
        let sv = s.values();
        assert!((sv[(0, 0)] - z[0].conj() / n2).norm() < 1e-14);
        assert!((sv[(1, 0)] - z[1].conj() / n2).norm() < 1e-14);
        // first partials agree with ∂/∂z̄_1 of z̄_1/|z|^2 = 1/|z|^2 - |z_1|^2/|z|^4
        let d = s.get(0, 0).deriv(sp.zbar_var(0)).unwrap().value();
        assert!((d - (1.0 / n2 - z[0].norm_sqr() / (n2 * n2))).norm() < 1e-13);
    }

    #[test]
    fn koszul_defining_identities() {
        let k = BundleComplex::koszul(2);
        let sp = JetSpace::get(2, 0, 0);
        let mut pts = vec![Point::chart(vec![c(1.0, 0.0), c(1.0, 0.0)])];
        pts.extend(sample_points(2, 10, 1.0, 3));
        for pt in pts {
            let p1 = k.phi(1).eval(&pt, sp).unwrap();
            let p2 = k.phi(2).eval(&pt, sp).unwrap();
            let s1 = minimal_inverse(&p1, 1, None, None, &pt).unwrap();
            let s2 = minimal_inverse(&p2, 1, None, None, &pt).unwrap();
            let id = DMatrix::identity(2, 2);
            let d = defining_identity_defects(&p1.values(), &s1.values(), Some((&p2.values(), &s2.values())), &id);
            assert!(d.iter().all(|&x| x < 1e-12), "{:?}", d);
            let d2 = defining_identity_defects(&p2.values(), &s2.values(), None, &id);
            assert!(d2[0] < 1e-12);
        }
    }

    #[test]
    fn weighted_metric_is_respected() {
        // φ = (z1 z2), metric diag(1, 4) on E_1: σ ⟂_H ker φ
        let k = BundleComplex::koszul(2);
        let sp = JetSpace::get(2, 0, 0);
        let pt = Point::chart(vec![c(0.5, 0.2), c(-0.3, 0.9)]);
        let phi = k.phi(1).eval(&pt, sp).unwrap();
        let mut h = JetMat::identity(sp, 2);
        h.set(1, 1, crate::jet::Jet::constant(sp, c(4.0, 0.0)));
        let s = minimal_inverse(&phi, 1, None, Some(&h), &pt).unwrap().values();
        let pv = phi.values();
        assert!((&pv * &s * &pv - &pv).camax() < 1e-13);
        // kernel vector (z2, -z1) is H-orthogonal to σ
        let kv = DMatrix::from_column_slice(2, 1, &[pt.z[1], -pt.z[0]]);
        assert!((kv.adjoint() * h.values() * s).camax() < 1e-13);
    }

    #[test]
    fn rank_drop_is_an_error() {
        let k = BundleComplex::koszul(2);
        let sp = JetSpace::get(2, 0, 0);
        let pt = Point::chart(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        let phi = k.phi(1).eval(&pt, sp).unwrap();
        assert!(matches!(minimal_inverse(&phi, 1, None, None, &pt), Err(Error::SingularPoint { .. })));
    }
}
