//! Independent checks: the Grothendieck torus integral for Baum–Bott indices
//! and the Bott vanishing probe for basic connections.

use crate::cechgreen::glued::{simplex_phi, SIMPLEX_DEGREE};
use crate::complexes::chern::{phi_forms, SymmetricPolynomial};
use crate::complexes::connection::{curvature_jet, ConnectionSource};
use crate::complexes::tilde::TildeConnection;
use crate::error::{Error, Result};
use crate::forms::pointwise::FormMat;
use crate::forms::scalar::{Point, ScalarField};
use crate::forms::simplex::SimplexRule;
use crate::jet::JetSpace;
use crate::C64;
use serde::Serialize;
use std::f64::consts::PI;

/// Coefficients `e_0..e_n` of `det(I + tJ)`.
fn elementary(j: &nalgebra::DMatrix<C64>) -> Vec<C64> {
    let n = j.nrows();
    // Faddeev–LeVerrier on the characteristic polynomial det(λ - J) = Σ c_k λ^{n-k}
    let mut c = vec![C64::new(1.0, 0.0); n + 1];
    let mut m = nalgebra::DMatrix::<C64>::zeros(n, n);
    let id = nalgebra::DMatrix::<C64>::identity(n, n);
    for k in 1..=n {
        m = j * &m + &id * c[k - 1];
        c[k] = -(j * &m).trace() / k as f64;
    }
    // e_k = (-1)^k c_k
    c.iter().enumerate().map(|(k, v)| if k % 2 == 0 { *v } else { -v }).collect()
}

/// `(2πi)^{-n} ∮_{|z_i| = r} Φ(Jv) dz_1…dz_n / (v_1…v_n)` by the trapezoid rule
/// with `nodes` points per circle.
pub fn grothendieck_oracle(v: &[ScalarField], phi: &SymmetricPolynomial, r: f64, nodes: usize) -> Result<C64> {
    let n = v.len();
    if n == 0 || n > 3 {
        return Err(Error::OracleRejected(format!("torus oracle supports 1 ≤ n ≤ 3, got {}", n)));
    }
    if !(r > 0.0) || nodes < 8 {
        return Err(Error::OracleRejected("torus radius must be positive and at least 8 nodes are needed".into()));
    }
    if v.iter().any(|f| !f.is_holomorphic_polynomial_syntax()) {
        return Err(Error::OracleRejected("vector field components must be holomorphic polynomials".into()));
    }
    let space = JetSpace::get(n, 0, 1);
    let total = nodes.pow(n as u32);
    let mut acc = C64::new(0.0, 0.0);
    let mut min_v = f64::INFINITY;
    let mut max_v: f64 = 0.0;
    for idx in 0..total {
        let mut k = idx;
        let mut z = Vec::with_capacity(n);
        for _ in 0..n {
            let th = 2.0 * PI * (k % nodes) as f64 / nodes as f64;
            z.push(C64::from_polar(r, th));
            k /= nodes;
        }
        let pt = Point::chart(z.clone());
        let mut jac = nalgebra::DMatrix::<C64>::zeros(n, n);
        let mut prod = C64::new(1.0, 0.0);
        for (i, f) in v.iter().enumerate() {
            let jet = f.eval_in(&pt, space)?;
            prod *= jet.value();
            min_v = min_v.min(jet.value().norm());
            max_v = max_v.max(jet.value().norm());
            for j in 0..n {
                let mut e = vec![0u8; space.nvars()];
                e[space.z_var(j)] = 1;
                jac[(i, j)] = jet.partial(&e);
            }
        }
        let es = elementary(&jac);
        // dz_j = i z_j dθ_j
        let dz: C64 = z.iter().map(|zj| C64::new(0.0, 1.0) * zj).product();
        acc += phi.evaluate_numbers(&es) * dz / prod;
    }
    if min_v < 1e-6 * max_v.max(1e-300) {
        return Err(Error::OracleRejected(format!(
            "the torus |z_i| = {} meets {{v_i = 0}} (min |v_i| = {:.2e}); choose a radius avoiding the zeros of the components",
            r, min_v
        )));
    }
    let cell = (2.0 * PI / nodes as f64).powi(n as i32);
    Ok(acc * cell / C64::new(0.0, 2.0 * PI).powi(n as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BottProbe {
    /// `max |Φ(ã)|` over the points.
    pub single: f64,
    /// `max |Φ|` of the interpolation between two basic connections, over
    /// sample parameters `t` and the fiber integral on `Δ_1`.
    pub interpolated: Option<f64>,
}

fn phi_max(thetas: &[FormMat], phis: &[SymmetricPolynomial]) -> Result<f64> {
    let curvs = thetas.iter().map(curvature_jet).collect::<Result<Vec<_>>>()?;
    let vals = phi_forms(phis, &curvs.iter().collect::<Vec<_>>())?;
    Ok(vals.iter().map(|f| f.max_abs()).fold(0.0, f64::max))
}

/// Evaluate `Φ(ã)` (and, with `other`, the connections
/// `(1-t)ã + t ã'` and `∫_{Δ_1} Φ(D^Δ)`) at the sample points.
pub fn bott_vanishing_probe(
    tilde: &TildeConnection,
    other: Option<&TildeConnection>,
    phis: &[SymmetricPolynomial],
    points: &[Point],
) -> Result<BottProbe> {
    let mut single: f64 = 0.0;
    let mut inter: Option<f64> = other.map(|_| 0.0);
    let rule = SimplexRule::grundmann_moller(1, SIMPLEX_DEGREE);
    for pt in points {
        let a = tilde.theta(pt, 1)?;
        single = single.max(phi_max(&a, phis)?);
        if let (Some(o), Some(worst)) = (other, inter.as_mut()) {
            let b = o.theta(pt, 1)?;
            for t in [0.25, 0.5, 0.75] {
                let mix: Vec<FormMat> = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| x.scale(C64::new(1.0 - t, 0.0)).add(&y.scale(C64::new(t, 0.0))))
                    .collect();
                *worst = worst.max(phi_max(&mix, phis)?);
            }
            let fib = simplex_phi(&[a.clone(), b], phis, &rule)?;
            *worst = worst.max(fib.iter().map(|f| f.max_abs()).fold(0.0, f64::max));
        }
    }
    Ok(BottProbe { single, interpolated: inter })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(a: f64, b: f64) -> Vec<ScalarField> {
        vec![ScalarField::z(0).scale(C64::new(a, 0.0)), ScalarField::z(1).scale(C64::new(b, 0.0))]
    }

    #[test]
    fn elementary_symmetric_functions() {
        let j = nalgebra::DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0)]);
        let e = elementary(&j);
        assert!((e[1] - 3.0).norm() < 1e-14 && (e[2] - 2.0).norm() < 1e-14);
    }

    #[test]
    fn linear_fields() {
        let v = field(1.0, 2.0);
        let e11 = grothendieck_oracle(&v, &SymmetricPolynomial::parse("e1^2").unwrap(), 0.5, 32).unwrap();
        assert!((e11 - 4.5).norm() < 1e-12);
        let e2 = grothendieck_oracle(&v, &SymmetricPolynomial::parse("e2").unwrap(), 0.5, 32).unwrap();
        assert!((e2 - 1.0).norm() < 1e-12);
        let radial = grothendieck_oracle(&field(1.0, 1.0), &SymmetricPolynomial::parse("e2").unwrap(), 0.3, 32).unwrap();
        assert!((radial - 1.0).norm() < 1e-12);
    }

    #[test]
    fn torus_through_a_zero_is_rejected() {
        // v_1 = z_1 - 0.5 vanishes on the circle |z_1| = 0.5
        let v = vec![ScalarField::z(0).sub(&ScalarField::real(0.5)), ScalarField::z(1)];
        assert!(grothendieck_oracle(&v, &SymmetricPolynomial::parse("e2").unwrap(), 0.5, 32).is_err());
    }
}
