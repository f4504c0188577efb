use chernres::cechgreen::*;
use chernres::complexes::bundle::FieldMat;
use chernres::complexes::{
    curvature_jet, phi_forms, regularize, BundleComplex, ChiKind, ConnectionFamily, ConnectionSource, Regulator, SymmetricPolynomial,
    TildeConnection,
};
use chernres::forms::pointwise::Mat;
use chernres::{GradedForm, Layout, Point, ScalarField, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_field(rng: &mut ChaCha8Rng) -> ScalarField {
    let z = ScalarField::z(0);
    let zb = ScalarField::zb(0);
    ScalarField::constant(c(rng))
        .add(&z.scale(c(rng)))
        .add(&zb.scale(c(rng)))
        .add(&z.mul(&zb).scale(c(rng)))
        .add(&z.pow(2).scale(c(rng)))
}

fn random_form(rng: &mut ChaCha8Rng) -> GradedForm {
    let l = Layout::chart(1);
    let mut f = GradedForm::zero(l);
    for m in [0, l.dz(0), l.dzb(0), l.dz(0) | l.dzb(0)] {
        f = f.add(&GradedForm::term(l, m, random_field(rng))).unwrap();
    }
    f
}

fn strip(lo: f64, hi: f64) -> BoxRegion {
    BoxRegion::new(vec![(lo, hi), (-2.0, 2.0)]).unwrap()
}

/// Three strips covering `[-2, 2]²`.
fn coarse() -> Cover {
    Cover::new(BoxRegion::cube(1, 2.0), vec![strip(-2.0, -0.3), strip(-0.7, 2.0), strip(0.3, 2.0)], 0.1).unwrap()
}

/// Four strips, each inside one or two of the coarse strips.
fn fine() -> Cover {
    Cover::new(BoxRegion::cube(1, 2.0), vec![strip(-2.0, -0.5), strip(-0.6, 0.1), strip(-0.1, 0.6), strip(0.4, 2.0)], 0.05).unwrap()
}

fn random_cochain(cover: &Cover, degrees: std::ops::RangeInclusive<usize>, seed: u64) -> Cochain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Cochain::new(1);
    for s in cover.nerve(*degrees.end()) {
        if degrees.contains(&(s.len() - 1)) {
            g.insert(s, random_form(&mut rng));
        }
    }
    g
}

/// Largest entry of `a - b` over simplices of `nerve`, sampled inside each simplex box.
fn max_diff(a: &dyn CochainSource, b: &dyn CochainSource, cover: &Cover, nerve: &[Vec<usize>], seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for s in nerve {
        let Some(bx) = cover.simplex_box(s) else { continue };
        for pt in bx.sample(2, seed) {
            let (x, y) = (a.entry(s, &pt, 0).unwrap(), b.entry(s, &pt, 0).unwrap());
            for (f, g) in x.iter().zip(&y) {
                worst = worst.max(f.sub(g).max_abs());
            }
        }
    }
    worst
}

fn zero_source() -> Cochain {
    Cochain::new(1)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn delta_and_nabla_square_to_zero(seed in any::<u64>()) {
        let u = coarse();
        let nerve = u.nerve(3);
        let g = random_cochain(&u, 0..=1, seed);
        let dd = g.cech_delta(&nerve).unwrap().cech_delta(&nerve).unwrap();
        prop_assert!(max_diff(&dd, &zero_source(), &u, &nerve, seed) < 1e-14);
        let nn = g.nabla(&nerve).unwrap().nabla(&nerve).unwrap();
        prop_assert!(max_diff(&nn, &zero_source(), &u, &nerve, seed) < 1e-10);
        // the pointwise operator agrees with the symbolic one
        let n1 = g.nabla(&nerve).unwrap();
        prop_assert!(max_diff(&Nabla(&g), &n1, &u, &nerve, seed) < 1e-12);
    }

    #[test]
    fn refinement_commutes_with_delta(seed in any::<u64>()) {
        let (u, v) = (coarse(), fine());
        let rho = [0usize, 1, 1, 1];
        validate_refinement(&rho, &v, &u).unwrap();
        let (nu, nv) = (u.nerve(2), v.nerve(2));
        let g = random_cochain(&u, 0..=1, seed);
        let a = g.cech_delta(&nu).unwrap().refine(&rho, &nv).unwrap();
        let b = g.refine(&rho, &nv).unwrap().cech_delta(&nv).unwrap();
        prop_assert!(max_diff(&a, &b, &v, &nv, seed) < 1e-14);
        let id: Vec<usize> = (0..u.len()).collect();
        let same = g.refine(&id, &nu).unwrap();
        prop_assert!(max_diff(&same, &g, &u, &nu, seed) == 0.0);
    }

    #[test]
    fn homotopy_identity(seed in any::<u64>(), equal in any::<bool>()) {
        let (u, v) = (coarse(), fine());
        let rho1 = [0usize, 1, 1, 1];
        let rho2 = if equal { rho1 } else { [0usize, 1, 1, 2] };
        validate_refinement(&rho2, &v, &u).unwrap();
        let (nu, nv) = (u.nerve(3), v.nerve(2));
        let g = random_cochain(&u, 0..=2, seed);
        let hg = g.homotopy_h(&rho1, &rho2, &nv).unwrap();
        let lhs = hg.nabla(&nv).unwrap().add(&g.nabla(&nu).unwrap().homotopy_h(&rho1, &rho2, &nv).unwrap()).unwrap();
        let rhs = g.refine(&rho2, &nv).unwrap().add(&g.refine(&rho1, &nv).unwrap().neg()).unwrap();
        prop_assert!(max_diff(&lhs, &rhs, &v, &nv, seed) < 1e-10);
        // the pointwise homotopy agrees with the symbolic one
        let h = Homotopy { src: &g, rho1: &rho1, rho2: &rho2 };
        prop_assert!(max_diff(&h, &hg, &v, &nv, seed) < 1e-12);
    }
}

#[test]
fn invalid_refinement_is_rejected() {
    assert!(validate_refinement(&[0, 0, 1, 2], &fine(), &coarse()).is_err());
}

fn poly(s: &str) -> SymmetricPolynomial {
    SymmetricPolynomial::parse(s).unwrap()
}

fn smooth_connection(nz: usize, ranks: &[usize], seed: u64) -> ConnectionFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = Layout::chart(nz);
    let theta = ranks
        .iter()
        .map(|&r| {
            Mat::from_fn(r, r, |_, _| {
                let mut f = GradedForm::zero(l);
                for i in 0..nz {
                    let coef = ScalarField::constant(c(&mut rng)).add(&ScalarField::zb((i + 1) % nz).scale(c(&mut rng)));
                    f = f.add(&GradedForm::term(l, l.dz(i), coef)).unwrap();
                }
                f
            })
        })
        .collect();
    ConnectionFamily::new(nz, theta).unwrap()
}

#[test]
fn global_mode_concentrates_in_degree_zero() {
    let k = Arc::new(BundleComplex::koszul(2));
    let d = BoxRegion::cube(2, 1.0);
    let a = BoxRegion::new(vec![(-1.0, 0.3), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)]).unwrap();
    let b = BoxRegion::new(vec![(-0.3, 1.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)]).unwrap();
    let cover = Arc::new(Cover::new(d, vec![a, b], 0.2).unwrap());
    let conn: Arc<dyn ConnectionSource> = Arc::new(smooth_connection(2, &[1, 2, 1], 4));
    let res = Arc::new(SimplicialResolution::global(k, cover.clone(), vec![conn.clone(), conn.clone()]).unwrap());
    let phis = vec![poly("e2"), poly("e1^2")];
    let chk = CheckPhi::new(res, phis.clone()).unwrap();
    for pt in cover.simplex_box(&[0, 1]).unwrap().sample(5, 8) {
        assert!(chk.entry(&[0, 1], &pt, 0).unwrap().iter().all(|f| f.max_abs() < 1e-12));
        let th = conn.theta(&pt, 1).unwrap();
        let curvs: Vec<_> = th.iter().map(|t| curvature_jet(t).unwrap()).collect();
        let want = phi_forms(&phis, &curvs.iter().collect::<Vec<_>>()).unwrap();
        let got = global_phi(&chk, &pt, 0).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!(g.sub(w).max_abs() < 1e-10);
        }
    }
}

const EPS: f64 = 0.05;

fn line(f: ScalarField) -> FieldMat {
    Mat::from_fn(1, 1, |_, _| f.clone())
}

fn regularized(c: Arc<BundleComplex>, base: Arc<dyn ConnectionSource>) -> Arc<dyn ConnectionSource> {
    let reg = Arc::new(Regulator::single(ChiKind::Standard, Regulator::default_sections(&c)).unwrap());
    Arc::new(regularize(Arc::new(TildeConnection::sheaf(c, base).unwrap()), reg))
}

fn z_complex() -> Arc<BundleComplex> {
    Arc::new(BundleComplex::new(1, vec![1, 1], vec![line(ScalarField::z(0))]).unwrap())
}

/// `𝒪/(z)` resolved by `𝒪 →z→ 𝒪` near the origin and by the padded zero complex away from it.
fn padded_point_sheaf() -> SimplicialResolution {
    let d = BoxRegion::cube(1, 2.0);
    let cover = Arc::new(Cover::new(d, vec![strip(-2.0, 0.6), strip(0.2, 2.0)], 0.15).unwrap());
    let e1 = z_complex();
    let zero = BundleComplex::new(1, vec![0, 0], vec![FieldMat::zero_fields(0, 0)]).unwrap();
    let e2 = Arc::new(zero.padded(&[(1, 1)]).unwrap());
    let triv = || Arc::new(ConnectionFamily::trivial(1, &[1, 1])) as Arc<dyn ConnectionSource>;
    let conns = vec![regularized(e1.clone(), triv()), regularized(e2.clone(), triv())];
    let g21 = ((1, 0), vec![line(ScalarField::one()), line(ScalarField::z(0))]);
    SimplicialResolution::padded_iso(cover, vec![e1, e2], conns, vec![g21]).unwrap()
}

fn sample_domain(n: usize, count: usize, seed: u64) -> Vec<Point> {
    BoxRegion::cube(n, 1.5).sample(count, seed).into_iter().map(|p| p.with_eps(EPS)).collect()
}

#[test]
fn padded_point_sheaf_is_a_cocycle_with_restricted_bidegrees() {
    let res = Arc::new(padded_point_sheaf());
    let chk = CheckPhi::new(res.clone(), vec![poly("e1")]).unwrap();
    for pt in sample_domain(1, 20, 3) {
        assert!(cocycle_defect(&chk, &pt).unwrap() < 1e-8);
        for s in res.cover().nerve(1) {
            if s.iter().all(|&a| res.cover().boxes()[a].contains(&pt)) {
                let f = &chk.entry(&s, &pt, 0).unwrap()[0];
                assert!(excluded_bidegree_norm(f, |a, _| a >= 1) < 1e-10);
            }
        }
        let phi = global_phi(&chk, &pt, 1).unwrap();
        assert!(phi[0].d().unwrap().max_abs() < 1e-8);
        assert!(excluded_bidegree_norm(&phi[0], |a, b| a == 1 && b == 1) < 1e-10);
        assert!(overlap_disagreement(&chk, res.cover(), chk.max_degree(), &pt, false).unwrap() < 1e-10);
    }
}

#[test]
fn padded_point_sheaf_form_vanishes_off_the_tube() {
    let res = Arc::new(padded_point_sheaf());
    let chk = CheckPhi::new(res, vec![poly("e1")]).unwrap();
    for pt in sample_domain(1, 20, 4) {
        if pt.z[0].norm_sqr() > 2.0 * EPS {
            assert!(global_phi(&chk, &pt, 0).unwrap()[0].max_abs() < 1e-10);
        }
    }
}

/// Chern connection of `h` on `E_0`, trivial on `E_1`.
fn metric_connection(h: &ScalarField) -> Arc<dyn ConnectionSource> {
    let t = ConnectionFamily::line_bundle_metric(1, h).unwrap();
    let zero = Mat::from_fn(1, 1, |_, _| GradedForm::zero(Layout::chart(1)));
    Arc::new(ConnectionFamily::new(1, vec![t, zero]).unwrap())
}

fn single(conn: Arc<dyn ConnectionSource>) -> SimplicialResolution {
    let cover = Arc::new(Cover::single(BoxRegion::cube(1, 2.0)));
    SimplicialResolution::global(z_complex(), cover, vec![conn]).unwrap()
}

fn phi_of(res: SimplicialResolution, pt: &Point) -> FormJetVec {
    let chk = CheckPhi::new(Arc::new(res), vec![poly("e1")]).unwrap();
    global_phi(&chk, pt, 0).unwrap()
}

type FormJetVec = Vec<chernres::forms::FormJet>;

#[test]
fn transgression_between_identical_setups_is_closed() {
    let conn = regularized(z_complex(), Arc::new(ConnectionFamily::trivial(1, &[1, 1])));
    let t = Transgression::new(&single(conn.clone()), &single(conn), vec![poly("e1")], vec![]).unwrap();
    for pt in sample_domain(1, 10, 5) {
        assert!(t.homotopy_defect(&pt).unwrap() < 1e-8);
        assert!(t.eta(&pt, 1).unwrap()[0].d().unwrap().max_abs() < 1e-8);
    }
}

#[test]
fn transgression_for_a_metric_change() {
    let h = ScalarField::one().add(&ScalarField::z(0).abs2());
    let d1 = regularized(z_complex(), Arc::new(ConnectionFamily::trivial(1, &[1, 1])));
    let d2 = regularized(z_complex(), metric_connection(&h));
    let t = Transgression::new(&single(d1.clone()), &single(d2.clone()), vec![poly("e1")], vec![]).unwrap();
    let mut seen_nonzero = false;
    for pt in sample_domain(1, 30, 6) {
        assert!(t.homotopy_defect(&pt).unwrap() < 1e-8);
        let eta = t.eta(&pt, 1).unwrap();
        let deta = eta[0].d().unwrap();
        let diff = phi_of(single(d2.clone()), &pt)[0].sub(&phi_of(single(d1.clone()), &pt)[0]);
        assert!(deta.sub(&diff).max_abs() < 1e-7, "{}", deta.sub(&diff).max_abs());
        seen_nonzero |= diff.max_abs() > 1e-3;
        assert!(excluded_bidegree_norm(&eta[0], |a, _| a >= 1) < 1e-10);
        if pt.z[0].norm_sqr() > 2.0 * EPS {
            assert!(eta[0].max_abs() < 1e-10);
        }
    }
    assert!(seen_nonzero);
}

#[test]
fn transgression_from_two_charts_to_one() {
    let r1 = padded_point_sheaf();
    let r2 = single(regularized(z_complex(), Arc::new(ConnectionFamily::trivial(1, &[1, 1]))));
    // chart 1 of the first setup is the padded complex; chart 0 carries the same complex as r2
    let mixed = vec![((1, 0), vec![line(ScalarField::one()), line(ScalarField::z(0))])];
    let t = Transgression::new(&r1, &r2, vec![poly("e1")], mixed).unwrap();
    let chk1 = CheckPhi::new(Arc::new(r1), vec![poly("e1")]).unwrap();
    for pt in sample_domain(1, 12, 7) {
        assert!(t.homotopy_defect(&pt).unwrap() < 1e-8);
        let deta = t.eta(&pt, 1).unwrap()[0].d().unwrap();
        let diff = phi_of(single(regularized(z_complex(), Arc::new(ConnectionFamily::trivial(1, &[1, 1])))), &pt)[0]
            .sub(&global_phi(&chk1, &pt, 0).unwrap()[0]);
        assert!(deta.sub(&diff).max_abs() < 1e-7, "{}", deta.sub(&diff).max_abs());
    }
}
