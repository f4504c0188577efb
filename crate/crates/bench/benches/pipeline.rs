use chernres::cechgreen::{BoxRegion, CheckPhi, Cover, SimplicialResolution};
use chernres::complexes::{regularize, BundleComplex, ChiKind, ConnectionFamily, ConnectionSource, Regulator, SymmetricPolynomial, TildeConnection};
use chernres::forms::pointwise::Mat;
use chernres::residues::{grothendieck_oracle, residue_current, EpsLadder, FormFamily, RegularizedFamily, ResidueKind, TestForm};
use chernres::{Point, ScalarField, C64};
use criterion::{black_box, criterion_group, criterion_main, Criterion};
use std::sync::Arc;

/// `Φ = e1` for `0 → O --z--> O` on the unit square.
fn point_sheaf() -> RegularizedFamily {
    let phi = Mat::from_fn(1, 1, |_, _| ScalarField::z(0));
    let c = Arc::new(BundleComplex::new(1, vec![1, 1], vec![phi]).unwrap());
    let tilde = Arc::new(TildeConnection::sheaf(c.clone(), Arc::new(ConnectionFamily::trivial(1, &[1, 1]))).unwrap());
    let reg = Arc::new(Regulator::single(ChiKind::Standard, Regulator::default_sections(&c)).unwrap());
    let conn: Arc<dyn ConnectionSource> = Arc::new(regularize(tilde, reg.clone()));
    let cover = Arc::new(Cover::single(BoxRegion::cube(1, 1.0)));
    let res = Arc::new(SimplicialResolution::global(c, cover, vec![conn]).unwrap());
    let phis = vec![SymmetricPolynomial::parse("e1").unwrap()];
    RegularizedFamily::new(CheckPhi::new(res, phis).unwrap(), vec![reg])
}

fn benches(c: &mut Criterion) {
    let fam = point_sheaf();
    let pt = Point::chart(vec![C64::new(0.08, -0.05)]).with_eps(0.01);
    c.bench_function("point sheaf: family eval", |b| b.iter(|| fam.eval(black_box(&pt)).unwrap()));

    let test = TestForm::plateau(vec![C64::new(0.0, 0.0)], 0.4, 0.8).unwrap();
    let ladder = EpsLadder::new(vec![1e-1, 3e-2, 1e-2, 3e-3]).unwrap();
    let mut g = c.benchmark_group("pairing");
    g.sample_size(10);
    g.bench_function("point sheaf: residue current, 4-step ladder", |b| {
        b.iter(|| residue_current(&fam, ResidueKind::Sheaf, std::slice::from_ref(&test), &ladder).unwrap())
    });
    g.finish();

    let v = vec![ScalarField::z(0), ScalarField::z(1).scale(C64::new(2.0, 0.0))];
    let e11 = SymmetricPolynomial::parse("e1^2").unwrap();
    c.bench_function("torus oracle: e1^2, 64 nodes", |b| b.iter(|| grothendieck_oracle(black_box(&v), &e11, 0.5, 64).unwrap()));
}

criterion_group!(pipeline, benches);
criterion_main!(pipeline);
