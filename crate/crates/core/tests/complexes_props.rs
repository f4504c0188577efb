use chernres::complexes::bundle::sample_points;
use chernres::complexes::tilde::quotient_connection;
use chernres::complexes::{curvature_jet, phi_form, BundleComplex, ConnectionFamily, ConnectionSource, SymmetricPolynomial, TildeConnection};
use chernres::{Point, ScalarField, C64};
use std::sync::Arc;

fn weighted() -> TildeConnection {
    let v = vec![ScalarField::z(0), ScalarField::z(1).scale(C64::new(2.0, 0.0))];
    let c = Arc::new(BundleComplex::vector_field(v).unwrap());
    TildeConnection::foliation(c, Arc::new(ConnectionFamily::trivial(2, &[2, 1]))).unwrap()
}

fn away(pts: Vec<Point>) -> impl Iterator<Item = Point> {
    pts.into_iter().filter(|p| p.z.iter().map(|z| z.norm_sqr()).sum::<f64>() > 0.04)
}

#[test]
fn bott_vanishing_for_the_weighted_foliation() {
    let t = weighted();
    for pt in away(sample_points(2, 20, 1.0, 21)) {
        let th = t.theta(&pt, 1).unwrap();
        let curvs: Vec<_> = th.iter().map(|x| curvature_jet(x).unwrap()).collect();
        let refs: Vec<_> = curvs.iter().collect();
        for phi in ["e1^2", "e2"] {
            let f = phi_form(&SymmetricPolynomial::parse(phi).unwrap(), &refs).unwrap();
            assert!(f.max_abs() < 1e-8, "{} {}", phi, f.max_abs());
        }
    }
}

#[test]
fn exact_collapse_matches_quotient_connection() {
    let t = weighted();
    let p = SymmetricPolynomial::parse("e1").unwrap();
    for pt in away(sample_points(2, 20, 1.0, 22)) {
        let ev = t.eval(&pt, 1).unwrap();
        let th = ev.tilde_theta();
        let curvs: Vec<_> = th.iter().map(|x| curvature_jet(x).unwrap()).collect();
        let refs: Vec<_> = curvs.iter().collect();
        let full = phi_form(&p, &refs).unwrap();
        let (_, q) = quotient_connection(&ev, &th[0], 1, &pt).unwrap();
        let cq = curvature_jet(&q).unwrap();
        let quot = phi_form(&p, &[&cq]).unwrap();
        assert!(full.sub(&quot).max_abs() < 1e-9, "{}", full.sub(&quot).max_abs());
    }
}
