//! Pointwise defects: compatibility `Dφ = 0` and the basic condition of a
//! connection on the normal bundle of a foliation.

use crate::complexes::tilde::{d_phi, TildeConnection, TildeKind};
use crate::error::{Error, Result};
use crate::forms::mono::Layout;
use crate::forms::pointwise::{FormMat, JetMat};
use crate::forms::scalar::{Point, ScalarField};
use crate::jet::JetSpace;
use num_complex::Complex64 as C64;

/// `max_k ‖Dφ_k‖`, the Frobenius norm over all form coefficients of
/// `dφ_k + θ_{k-1}φ_k - φ_kθ_k`. `phis[k-1] = φ_k` must carry one more
/// derivative than the `θ`s.
pub fn compatibility_defect(thetas: &[FormMat], phis: &[JetMat]) -> Result<f64> {
    if thetas.len() != phis.len() + 1 {
        return Err(Error::Dimension(format!("{} connections for {} maps", thetas.len(), phis.len())));
    }
    let layout = thetas[0].layout();
    let mut worst: f64 = 0.0;
    for k in 1..=phis.len() {
        let d = d_phi(&thetas[k - 1], &thetas[k], &phis[k - 1], layout)?;
        let mut s = 0.0;
        for f in &d.data {
            for (_, c) in f.terms() {
                s += c.value().norm_sqr();
            }
        }
        worst = worst.max(s.sqrt());
    }
    Ok(worst)
}

/// Compatibility defect of `ã` at a chart point.
pub fn tilde_compatibility_defect(t: &TildeConnection, pt: &Point) -> Result<f64> {
    let ev = t.eval(pt, 0)?;
    let n = t.complex().n();
    let phis = t.complex().eval_maps(pt, JetSpace::get(n, 0, 1))?;
    compatibility_defect(&ev.tilde_theta(), &phis)
}

/// `‖P(i(u)D̃_0 v - [u, v])‖` where `P = I - φ_1σ_1` realizes `E_0 → coker φ_1`
/// as the orthogonal projection onto `(im φ_1)^⊥`.
///
/// `u` and `v` are holomorphic vector fields on `ℂⁿ`; the bracket terms cancel
/// down to `P(v·∂u + i(u)θ̃_0 v)`.
pub fn basic_defect(t: &TildeConnection, u: &[ScalarField], v: &[ScalarField], pt: &Point) -> Result<f64> {
    if t.kind() != TildeKind::Foliation {
        return Err(Error::InvalidInput("basic defect needs foliation corrections".into()));
    }
    let n = t.complex().n();
    if u.len() != n || v.len() != n {
        return Err(Error::Dimension(format!("vector fields on ℂ^{} need {} components", n, n)));
    }
    let ev = t.eval(pt, 0)?;
    let theta0 = &ev.tilde_theta()[0];
    let sp1 = JetSpace::get(n, 0, 1);
    let uj = u.iter().map(|f| f.eval_in(pt, sp1)).collect::<Result<Vec<_>>>()?;
    let vv = v.iter().map(|f| f.value(pt)).collect::<Result<Vec<_>>>()?;
    let uv: Vec<C64> = uj.iter().map(|j| j.value()).collect();
    let layout = Layout::chart(n);
    let mut w = nalgebra::DVector::from_element(n, C64::new(0.0, 0.0));
    for i in 0..n {
        // v·∂u_i
        for (m, vm) in vv.iter().enumerate() {
            w[i] += vm * uj[i].partial(&unit(2 * n, sp1.z_var(m)));
        }
        // (i(u)θ̃_0) v
        for k in 0..n {
            let mut c = C64::new(0.0, 0.0);
            for (m, um) in uv.iter().enumerate() {
                c += um * theta0.get(i, k).value_at(layout.dz(m));
            }
            w[i] += c * vv[k];
        }
    }
    let p = ev.phi[0].values();
    let s = ev.sigma[0].values();
    let proj = nalgebra::DMatrix::identity(n, n) - &p * &s;
    Ok((proj * w).norm())
}

fn unit(len: usize, i: usize) -> Vec<u8> {
    let mut e = vec![0u8; len];
    e[i] = 1;
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::bundle::{sample_points, BundleComplex};
    use crate::complexes::connection::ConnectionFamily;
    use crate::forms::graded::GradedForm;
    use crate::forms::pointwise::Mat;
    use std::sync::Arc;

    fn foliation(v: Vec<ScalarField>) -> TildeConnection {
        let n = v.len();
        let c = Arc::new(BundleComplex::vector_field(v).unwrap());
        TildeConnection::foliation(c, Arc::new(ConnectionFamily::trivial(n, &[n, 1]))).unwrap()
    }

    fn weighted() -> Vec<ScalarField> {
        vec![ScalarField::z(0), ScalarField::z(1).scale(C64::new(2.0, 0.0))]
    }

    #[test]
    fn trivial_connection_and_z() {
        let phi = Mat::from_fn(1, 1, |_, _| ScalarField::z(0));
        let c = BundleComplex::new(1, vec![1, 1], vec![phi]).unwrap();
        let sp = JetSpace::get(1, 0, 1);
        let pt = Point::chart(vec![C64::new(0.7, 0.2)]);
        let th = ConnectionFamily::trivial(1, &[1, 1]);
        use crate::complexes::connection::ConnectionSource;
        let d = compatibility_defect(&th.theta(&pt, 0).unwrap(), &c.eval_maps(&pt, sp).unwrap()).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tilde_is_compatible_off_the_zero_set() {
        let t = foliation(weighted());
        for pt in sample_points(2, 30, 1.0, 5) {
            if pt.z.iter().map(|z| z.norm_sqr()).sum::<f64>() < 0.04 {
                continue;
            }
            assert!(tilde_compatibility_defect(&t, &pt).unwrap() < 1e-9);
        }
        let k = Arc::new(BundleComplex::koszul(2));
        let t = TildeConnection::sheaf(k, Arc::new(ConnectionFamily::trivial(2, &[1, 2, 1]))).unwrap();
        for pt in sample_points(2, 30, 1.0, 6) {
            assert!(tilde_compatibility_defect(&t, &pt).unwrap() < 1e-10);
        }
    }

    #[test]
    fn basic_condition_holds_and_perturbation_breaks_it() {
        for v in [vec![ScalarField::z(0), ScalarField::z(1)], weighted()] {
            let t = foliation(v.clone());
            let f = ScalarField::one().add(&ScalarField::z(0).mul(&ScalarField::z(1)));
            let u: Vec<ScalarField> = v.iter().map(|g| g.mul(&f)).collect();
            let w = vec![ScalarField::z(1).pow(2), ScalarField::one().add(&ScalarField::z(0))];
            for pt in sample_points(2, 30, 1.0, 9) {
                if pt.z.iter().map(|z| z.norm_sqr()).sum::<f64>() < 0.04 {
                    continue;
                }
                assert!(basic_defect(&t, &u, &w, &pt).unwrap() < 1e-9);
            }
            let bad = t.clone().with_a0_perturbation(GradedForm::dz(Layout::chart(2), 0));
            let worst = sample_points(2, 30, 1.0, 9)
                .iter()
                .map(|pt| basic_defect(&bad, &u, &w, pt).unwrap_or(0.0))
                .fold(0.0, f64::max);
            assert!(worst > 0.1);
        }
    }

    #[test]
    fn regular_constant_foliation() {
        let t = foliation(vec![ScalarField::one(), ScalarField::zero()]);
        let u = vec![ScalarField::z(1), ScalarField::zero()];
        let w = vec![ScalarField::z(0), ScalarField::z(0).mul(&ScalarField::z(1))];
        for pt in sample_points(2, 5, 1.0, 2) {
            assert!(basic_defect(&t, &u, &w, &pt).unwrap() < 1e-14);
        }
    }
}
