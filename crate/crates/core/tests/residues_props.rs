use chernres::cechgreen::*;
use chernres::complexes::bundle::{sample_points, FieldMat};
use chernres::complexes::*;
use chernres::forms::pointwise::Mat;
use chernres::residues::*;
use chernres::{GradedForm, Layout, Point, ScalarField, C64};
use std::sync::Arc;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn poly(s: &str) -> SymmetricPolynomial {
    SymmetricPolynomial::parse(s).unwrap()
}

fn line(f: ScalarField) -> FieldMat {
    Mat::from_fn(1, 1, |_, _| f.clone())
}

/// One-chart family for `𝒪 →f→ 𝒪` on ℂ with base connection `base`.
fn line_family(f: ScalarField, base: Arc<dyn ConnectionSource>, chi: ChiKind, domain: f64) -> RegularizedFamily {
    let cx = Arc::new(BundleComplex::new(1, vec![1, 1], vec![line(f)]).unwrap());
    let reg = Arc::new(Regulator::single(chi, Regulator::default_sections(&cx)).unwrap());
    let t = Arc::new(TildeConnection::sheaf(cx.clone(), base).unwrap());
    let conn: Arc<dyn ConnectionSource> = Arc::new(regularize(t, reg.clone()));
    let cover = Arc::new(Cover::single(BoxRegion::cube(1, domain)));
    let res = Arc::new(SimplicialResolution::global(cx, cover, vec![conn]).unwrap());
    RegularizedFamily::new(CheckPhi::new(res, vec![poly("e1")]).unwrap(), vec![reg])
}

fn trivial() -> Arc<dyn ConnectionSource> {
    Arc::new(ConnectionFamily::trivial(1, &[1, 1]))
}

/// Chern connection of `1 + |z|²` on `E_0`.
fn metric() -> Arc<dyn ConnectionSource> {
    let h = ScalarField::one().add(&ScalarField::z(0).abs2());
    let t = ConnectionFamily::line_bundle_metric(1, &h).unwrap();
    let zero = Mat::from_fn(1, 1, |_, _| GradedForm::zero(Layout::chart(1)));
    Arc::new(ConnectionFamily::new(1, vec![t, zero]).unwrap())
}

fn origin(n: usize) -> Vec<C64> {
    vec![c(0.0); n]
}

#[test]
fn pairing_vanishes_away_from_the_singular_set() {
    let f = line_family(ScalarField::z(0), trivial(), ChiKind::Standard, 1.0);
    let t = TestForm::bump(vec![c(0.55)], 0.3).unwrap();
    // evaluate every box, including those where the cutoff is saturated
    let quad = QuadConfig { skip_saturated: false, ..QuadConfig::default() };
    let ladder = EpsLadder::new(vec![0.02, 0.01]).unwrap().with_quad(quad);
    let p = pair(&f, &[t], &ladder).unwrap();
    for v in &p[0][0].values {
        assert!(v.norm() < 1e-10, "{}", v);
    }
}

#[test]
fn cutoff_choice_does_not_change_the_limit() {
    let t = TestForm::bump(origin(1), 0.8).unwrap();
    let ladder = EpsLadder::default();
    let run = |chi| {
        let f = line_family(ScalarField::z(0), trivial(), chi, 1.0);
        residue_current(&f, ResidueKind::Sheaf, &[t.clone()], &ladder).unwrap()[0][0].clone()
    };
    let (a, b) = (run(ChiKind::Standard), run(ChiKind::Wide));
    let chk = chi_independence(&a, &b);
    assert!(chk.agree, "{:?}", chk);
    assert!((a.limit - 1.0).norm() < 0.02 && (b.limit - 1.0).norm() < 0.02);
}

#[test]
fn stokes_for_the_transgression_form() {
    // ⟨η_ε, dφ⟩ = ⟨Φ(D̂_2^ε) - Φ(D̂_1^ε), φ⟩ at every ε
    let f1 = line_family(ScalarField::z(0), trivial(), ChiKind::Standard, 1.0);
    let f2 = line_family(ScalarField::z(0), metric(), ChiKind::Standard, 1.0);
    let t = Transgression::new(
        f1.check_phi().resolution(),
        f2.check_phi().resolution(),
        vec![poly("e1")],
        vec![],
    )
    .unwrap();
    let eta = EtaFamily::new(t, f1.regulators().to_vec());
    let test = TestForm::bump(origin(1), 0.8).unwrap().mul_scalar(&ScalarField::one().add(&ScalarField::z(0).abs2()));
    let points: Vec<Point> = sample_points(1, 10, 0.5, 3).into_iter().map(|p| p.with_eps(0.05)).collect();
    let r = comparison_current(&eta, &f1, &f2, &[test], &EpsLadder::default(), &points).unwrap();
    assert!(r.pointwise_defect < 1e-7, "{}", r.pointwise_defect);
    let (nd, rd) = (&r.n_dphi[0], &r.r_diff[0]);
    let mut seen = false;
    for k in 0..nd.eps.len() {
        let gap = (nd.pairings[k] - rd.pairings[k]).norm();
        assert!(gap <= 2.0 * (nd.quad_errors[k] + rd.quad_errors[k]) + 1e-9, "ε = {}: {}", nd.eps[k], gap);
        seen |= rd.pairings[k].norm() > 1e-4;
    }
    assert!(seen, "the metric change should be visible at finite ε");
    assert!(r.identity_defect[0] <= r.identity_bound[0]);
}

/// `2π ∫ r ρ(r) dr` by composite Simpson, with `ρ` sampled on the real axis.
fn radial_integral(rho: impl Fn(f64) -> f64, radius: f64) -> f64 {
    let m = 4000;
    let h = radius / m as f64;
    let mut s = 0.0;
    for k in 0..=m {
        let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        let r = k as f64 * h;
        s += w * r * rho(r);
    }
    2.0 * std::f64::consts::PI * s * h / 3.0
}

#[test]
fn cycle_pairings() {
    let t = TestForm::bump(vec![c(0.1)], 0.5).unwrap();
    let pt = CycleSpec { components: vec![CycleComponent { geometry: Geometry::Point(vec![c(0.2)]), multiplicity: 2 }] };
    let v = cycle_pairing(&pt, &t, &QuadConfig::default()).unwrap();
    assert!((v - t.value_at(&[c(0.2)]).unwrap() * 2.0).norm() < 1e-14);

    let t2 = TestForm::bump(origin(2), 0.8).unwrap().with_factor(&TestForm::area_form(2, 1)).unwrap();
    let slice = CycleSpec { components: vec![CycleComponent { geometry: Geometry::CoordinateSubspace(vec![0]), multiplicity: 1 }] };
    let got = cycle_pairing(&slice, &t2, &QuadConfig::default()).unwrap();
    let scalar = TestForm::bump(origin(2), 0.8).unwrap();
    let want = radial_integral(|r| scalar.value_at(&[c(0.0), c(r)]).unwrap().re, 0.8);
    assert!((got - want).norm() < 1e-5 * want, "{} vs {}", got, want);

    // points only see functions, slices only forms of their dimension
    assert!(cycle_pairing(&pt, &TestForm::bump(vec![c(0.0)], 0.5).unwrap().with_factor(&TestForm::area_form(1, 0)).unwrap(), &QuadConfig::default()).is_err());
    assert!(cycle_pairing(&slice, &scalar, &QuadConfig::default()).is_err());
    let bad = CycleSpec { components: vec![CycleComponent { geometry: Geometry::CoordinateSubspace(vec![2]), multiplicity: 1 }] };
    assert!(bad.validate(2).is_err());
}

#[test]
fn residues_localize_to_the_components() {
    // 𝒪/(z² - z) is supported at 0 and 1, each with multiplicity one
    let f = line_family(ScalarField::z(0).pow(2).sub(&ScalarField::z(0)), trivial(), ChiKind::Standard, 2.0);
    let test = TestForm::plateau(vec![c(0.5)], 0.9, 1.4).unwrap();
    let nbhds = vec![
        Neighborhood { center: vec![c(0.0)], inner: 0.15, outer: 0.3 },
        Neighborhood { center: vec![c(1.0)], inner: 0.15, outer: 0.3 },
    ];
    let loc = localized_residue(&f, ResidueKind::Sheaf, &test, &nbhds, &EpsLadder::default()).unwrap();
    assert!(loc.defect <= loc.bound, "{:?}", loc);
    for comp in &loc.components {
        assert!((comp.limit - 1.0).norm() < 0.02, "{:?}", comp.limit);
    }
    assert!((loc.total.limit - 2.0).norm() < 0.04);
    let overlapping = vec![nbhds[0].clone(), Neighborhood { center: vec![c(0.4)], inner: 0.1, outer: 0.2 }];
    assert!(localized_residue(&f, ResidueKind::Sheaf, &test, &overlapping, &EpsLadder::default()).is_err());
}

#[test]
fn degree_constraints() {
    assert!(degree_gate(ResidueKind::Sheaf, 2, 0).is_err());
    assert!(degree_gate(ResidueKind::Sheaf, 2, 2).is_ok());
    assert!(degree_gate(ResidueKind::Foliation { kappa: 1 }, 2, 1).is_err());
    assert!(degree_gate(ResidueKind::Foliation { kappa: 1 }, 2, 2).is_ok());
    let f = line_family(ScalarField::z(0), trivial(), ChiKind::Standard, 1.0);
    let two_form = TestForm::bump(origin(1), 0.5).unwrap().with_factor(&TestForm::area_form(1, 0)).unwrap();
    assert!(matches!(pair(&f, &[two_form], &EpsLadder::default()), Err(chernres::Error::DegreeConstraint(_))));
    let outside = TestForm::bump(vec![c(0.8)], 0.5).unwrap();
    assert!(pair(&f, &[outside], &EpsLadder::default()).is_err());
}

#[test]
fn zero_family_pairs_to_zero() {
    let z = ZeroFamily { nz: 1, degrees: vec![2], domain: BoxRegion::cube(1, 1.0).bounds.clone() };
    let t = TestForm::bump(origin(1), 0.5).unwrap();
    let p = pair(&z, &[t], &EpsLadder::default()).unwrap();
    assert!(p[0][0].values.iter().all(|v| v.norm() == 0.0));
}

fn weighted(base: Arc<dyn ConnectionSource>) -> TildeConnection {
    let v = vec![ScalarField::z(0), ScalarField::z(1).scale(c(2.0))];
    TildeConnection::foliation(Arc::new(BundleComplex::vector_field(v).unwrap()), base).unwrap()
}

/// A torsion-free connection on TM with constant symmetric Christoffel symbols.
fn christoffel() -> Arc<dyn ConnectionSource> {
    let l = Layout::chart(2);
    let k = |v: f64| ScalarField::constant(c(v));
    let t0 = Mat::from_fn(2, 2, |i, j| match (i, j) {
        // Γ^1_{11} = 0.3, Γ^2_{12} = Γ^2_{21} = 0.2
        (0, 0) => GradedForm::term(l, l.dz(0), k(0.3)),
        (1, 0) => GradedForm::term(l, l.dz(1), k(0.2)),
        (1, 1) => GradedForm::term(l, l.dz(0), k(0.2)),
        _ => GradedForm::zero(l),
    });
    let t1 = Mat::from_fn(1, 1, |_, _| GradedForm::term(l, l.dz(0), k(0.5)));
    Arc::new(ConnectionFamily::new(2, vec![t0, t1]).unwrap())
}

fn off_zero(count: usize, seed: u64) -> Vec<Point> {
    sample_points(2, count, 1.0, seed).into_iter().filter(|p| p.z.iter().map(|z| z.norm_sqr()).sum::<f64>() > 0.04).collect()
}

#[test]
fn bott_vanishing_probe_for_basic_connections() {
    let a = weighted(Arc::new(ConnectionFamily::trivial(2, &[2, 1])));
    let b = weighted(christoffel());
    let phis = vec![poly("e1^2"), poly("e2")];
    let pts = off_zero(12, 5);
    let probe = bott_vanishing_probe(&a, Some(&b), &phis, &pts).unwrap();
    assert!(probe.single < 1e-8, "{:?}", probe);
    assert!(probe.interpolated.unwrap() < 1e-8, "{:?}", probe);
}

#[test]
fn bott_probe_detects_a_non_basic_connection() {
    let l = Layout::chart(2);
    let omega = GradedForm::term(l, l.dz(0), ScalarField::zb(1)).add(&GradedForm::term(l, l.dz(1), ScalarField::zb(0))).unwrap();
    let bad = weighted(Arc::new(ConnectionFamily::trivial(2, &[2, 1]))).with_a0_perturbation(omega);
    let probe = bott_vanishing_probe(&bad, None, &[poly("e1^2")], &off_zero(12, 6)).unwrap();
    assert!(probe.single > 1e-3, "{:?}", probe);
}

#[test]
fn torus_oracle_is_independent_of_the_radius() {
    let v = vec![ScalarField::z(0).add(&ScalarField::z(1).pow(2)), ScalarField::z(1).scale(c(3.0))];
    let a = grothendieck_oracle(&v, &poly("e1^2"), 0.2, 48).unwrap();
    let b = grothendieck_oracle(&v, &poly("e1^2"), 0.4, 48).unwrap();
    // linear part diag(1, 3): (1 + 3)² / 3
    assert!((a - b).norm() < 1e-10 && (a - 16.0 / 3.0).norm() < 1e-10, "{} {}", a, b);
}
