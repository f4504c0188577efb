//! `verify`: pointwise invariant suites, deterministic per seed.

use crate::build::{setup, Setup};
use crate::report::{Check, Report};
use crate::run::Options;
use crate::scenario::{ConnectionKind, MetricSpec, Mode, Scenario};
use anyhow::{bail, Result};
use chernres::cechgreen::*;
use chernres::complexes::defects::tilde_compatibility_defect;
use chernres::complexes::mininv::defining_identity_defects;
use chernres::complexes::*;
use chernres::forms::pointwise::Mat;
use chernres::residues::bott_vanishing_probe;
use chernres::{GradedForm, Layout, Point, ScalarField, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

pub const SUITES: [&str; 5] = ["algebra", "cech", "connections", "vanishing", "transgression"];

pub fn verify(scn: &Scenario, suite: &str, opts: &Options) -> Result<Report> {
    let started = Instant::now();
    let scn = opts.apply(scn)?;
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => bail!("unknown suite '{}' (expected one of {} or all)", s, SUITES.join(", ")),
    };
    let mut report = Report::new("verify", &scn.name, opts.echo(&scn));
    let ctx = Ctx { scn: &scn, seed: opts.seed, scale: opts.tolerance_scale };
    for s in names {
        let res = match s {
            "algebra" => ctx.algebra(),
            "cech" => ctx.cech(),
            "connections" => ctx.connections(),
            "vanishing" => ctx.vanishing(),
            _ => ctx.transgression(),
        };
        match res {
            Ok(checks) => report.checks.extend(checks),
            Err(e) => report.checks.push(Check::failed(s, "suite", format!("{:#}", e))),
        }
    }
    report.finish(started);
    Ok(report)
}

struct Ctx<'a> {
    scn: &'a Scenario,
    seed: u64,
    scale: f64,
}

/// Running maximum of one named defect.
struct Worst {
    name: String,
    value: f64,
    samples: usize,
}

impl Worst {
    fn new(name: impl Into<String>) -> Worst {
        Worst { name: name.into(), value: 0.0, samples: 0 }
    }

    fn see(&mut self, v: f64) {
        // NaN sticks
        self.value = if v.is_nan() || self.value.is_nan() { f64::NAN } else { self.value.max(v) };
        self.samples += 1;
    }

    fn check(self, suite: &str, tol: f64, scale: f64) -> Check {
        let detail = format!("max over {} samples", self.samples);
        if self.samples == 0 {
            return Check::failed(suite, self.name, "no admissible sample points");
        }
        Check::new(suite, self.name, self.value, tol * scale).with_detail(detail)
    }
}

fn rc(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_field(n: usize, rng: &mut ChaCha8Rng) -> ScalarField {
    let mut f = ScalarField::constant(rc(rng));
    for i in 0..n {
        let (z, zb) = (ScalarField::z(i), ScalarField::zb(i));
        f = f.add(&z.scale(rc(rng))).add(&zb.scale(rc(rng))).add(&z.mul(&zb).scale(rc(rng)));
    }
    f.add(&ScalarField::z(0).pow(2).mul(&ScalarField::zb(n - 1)).scale(rc(rng)))
}

/// Random form of pure degree `p` on ℂⁿ.
fn random_form(n: usize, p: u32, rng: &mut ChaCha8Rng) -> Result<GradedForm> {
    let l = Layout::chart(n);
    let mut f = GradedForm::zero(l);
    for m in 0..(1u32 << (2 * n)) {
        let mask = (0..n).filter(|i| m >> (2 * i) & 1 == 1).fold(0, |a, i| a | l.dz(i))
            | (0..n).filter(|i| m >> (2 * i + 1) & 1 == 1).fold(0, |a, i| a | l.dzb(i));
        if mask.count_ones() == p {
            f = f.add(&GradedForm::term(l, mask, random_field(n, rng)))?;
        }
    }
    Ok(f)
}

fn sign(k: u32) -> C64 {
    C64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
}

fn strip(lo: f64, hi: f64) -> BoxRegion {
    BoxRegion::new(vec![(lo, hi), (-2.0, 2.0)]).expect("valid strip")
}

fn max_diff(a: &dyn CochainSource, b: &dyn CochainSource, cover: &Cover, nerve: &[Vec<usize>], seed: u64, w: &mut Worst) -> Result<()> {
    for s in nerve {
        let Some(bx) = cover.simplex_box(s) else { continue };
        for pt in bx.sample(2, seed) {
            let (x, y) = (a.entry(s, &pt, 0)?, b.entry(s, &pt, 0)?);
            w.see(x.iter().zip(&y).map(|(f, g)| f.sub(g).max_abs()).fold(0.0, f64::max));
        }
    }
    Ok(())
}

/// Σ|s|² of a regulator at a point (its `u` at `ε = 1`).
fn section_norm2(r: &Regulator, pt: &Point) -> f64 {
    let bx: Vec<(f64, f64)> = pt.z.iter().flat_map(|z| [(z.re, z.re), (z.im, z.im)]).collect();
    r.u_interval(&bx, 1.0).map_or(0.0, |(lo, _)| lo)
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.scn.manifold.n
    }

    fn points(&self, count: usize, salt: u64) -> Result<Vec<Point>> {
        let eps = self.scn.verify.eps;
        Ok(BoxRegion::new(self.scn.domain())?.sample(count, self.seed ^ salt).into_iter().map(|p| p.with_eps(eps)).collect())
    }

    /// Points cycling through three regimes of `u = |s|²/ε`: the scenario's
    /// `ε`, inside the cutoff transition and below it.
    fn points_across(&self, count: usize, salt: u64, reg: &Regulator) -> Result<Vec<Point>> {
        let (lo, hi) = self.scn.chi().bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ salt ^ 0x5eed);
        Ok(self
            .points(count, salt)?
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                let s2 = section_norm2(reg, &p);
                let u = match k % 3 {
                    _ if s2 <= 0.0 => return p,
                    0 => return p,
                    1 => lo + (hi - lo) * rng.gen_range(0.05..0.95),
                    _ => lo * rng.gen_range(0.1..0.9),
                };
                p.with_eps(s2 / u)
            })
            .collect())
    }

    fn setup(&self) -> Result<Setup> {
        setup(self.scn, self.scn.chi(), None)
    }

    fn algebra(&self) -> Result<Vec<Check>> {
        let n = self.n();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let pts = self.points(self.scn.verify.samples.min(8), 1)?;
        let mut dd = Worst::new("d² = 0");
        let mut leib = Worst::new("Leibniz d(a∧b) = da∧b + (-1)^p a∧db");
        let mut comm = Worst::new("graded commutativity a∧b = (-1)^{pq} b∧a");
        let mut assoc = Worst::new("associativity (a∧b)∧c = a∧(b∧c)");
        let mut jet = Worst::new("symbolic d agrees with jet d");
        for p in 0..=2u32.min(2 * n as u32) {
            for q in 0..=2u32 {
                if p + q > 2 * n as u32 {
                    continue;
                }
                let (a, b, c) = (random_form(n, p, &mut rng)?, random_form(n, q, &mut rng)?, random_form(n, 1, &mut rng)?);
                let da = a.exterior_d()?;
                let ddd = da.exterior_d()?;
                let lhs = a.wedge(&b)?.exterior_d()?;
                let rhs = da.wedge(&b)?.add(&a.wedge(&b.exterior_d()?)?.scale(sign(p)))?;
                let ab = a.wedge(&b)?;
                let ba = b.wedge(&a)?.scale(sign(p * q));
                let (abc1, abc2) = (ab.wedge(&c)?, a.wedge(&b.wedge(&c)?)?);
                for pt in &pts {
                    dd.see(ddd.eval(pt, 0)?.max_abs());
                    leib.see(lhs.sub(&rhs)?.eval(pt, 0)?.max_abs());
                    comm.see(ab.sub(&ba)?.eval(pt, 0)?.max_abs());
                    assoc.see(abc1.sub(&abc2)?.eval(pt, 0)?.max_abs());
                    jet.see(da.eval(pt, 0)?.sub(&a.eval(pt, 1)?.d()?.truncate(0)).max_abs());
                }
            }
        }
        Ok([dd, leib, comm, assoc, jet].into_iter().map(|w| w.check("algebra", 1e-10, self.scale)).collect())
    }

    fn cech(&self) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        // refinement homotopy on a fixed three-strip cover of [-2, 2]² and a four-strip refinement
        let coarse = Cover::new(BoxRegion::cube(1, 2.0), vec![strip(-2.0, -0.3), strip(-0.7, 2.0), strip(0.3, 2.0)], 0.1)?;
        let fine = Cover::new(BoxRegion::cube(1, 2.0), vec![strip(-2.0, -0.5), strip(-0.6, 0.1), strip(-0.1, 0.6), strip(0.4, 2.0)], 0.05)?;
        let (rho1, rho2) = ([0usize, 1, 1, 1], [0usize, 1, 1, 2]);
        validate_refinement(&rho1, &fine, &coarse)?;
        validate_refinement(&rho2, &fine, &coarse)?;
        let (nu, nv) = (coarse.nerve(3), fine.nerve(2));
        let mut homot = Worst::new("homotopy identity ∇h + h∇ = ρ₂ - ρ₁ on a 3-box cover");
        let mut sq = Worst::new("δ² = 0 and ∇² = 0 on a 3-box cover");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 2);
        for round in 0..3u64 {
            let mut g = Cochain::new(1);
            for s in coarse.nerve(2) {
                g.insert(s, random_form(1, rng.gen_range(0..=2), &mut rng)?);
            }
            let hg = g.homotopy_h(&rho1, &rho2, &nv)?;
            let lhs = hg.nabla(&nv)?.add(&g.nabla(&nu)?.homotopy_h(&rho1, &rho2, &nv)?)?;
            let rhs = g.refine(&rho2, &nv)?.add(&g.refine(&rho1, &nv)?.neg())?;
            max_diff(&lhs, &rhs, &fine, &nv, self.seed + round, &mut homot)?;
            let zero = Cochain::new(1);
            max_diff(&g.cech_delta(&nu)?.cech_delta(&nu)?, &zero, &coarse, &nu, self.seed + round, &mut sq)?;
            max_diff(&g.nabla(&nu)?.nabla(&nu)?, &zero, &coarse, &nu, self.seed + round, &mut sq)?;
        }
        out.push(homot.check("cech", 1e-10, self.scale));
        out.push(sq.check("cech", 1e-10, self.scale));

        // the scenario's characteristic cochain
        let s = self.setup()?;
        let phis = self.scn.phis();
        let chk = CheckPhi::new(s.resolution.clone(), phis.clone())?;
        let cover = s.resolution.cover().clone();
        let mut cocycle = Worst::new("cocycle ∇Φ̌(D) = 0");
        let mut closed = Worst::new("dΦ(D) = 0");
        let mut bideg = Worst::new("bidegree exclusions of Φ̌(D) and Φ(D) for (1,0) inputs");
        for pt in self.points_across(self.scn.verify.samples, 3, &s.charts[0].regulator)? {
            cocycle.see(cocycle_defect(&chk, &pt)?);
            let glob = global_phi(&chk, &pt, 1)?;
            for (f, p) in glob.iter().zip(&phis) {
                closed.see(f.d()?.max_abs());
                let ell = p.degree()? as u32;
                bideg.see(excluded_bidegree_norm(&f.truncate(0), |a, b| a >= b && a + b == 2 * ell));
            }
            for simplex in cover.nerve(chk.max_degree()) {
                if !simplex.iter().all(|&a| cover.boxes()[a].contains(&pt)) {
                    continue;
                }
                let q = simplex.len() as u32 - 1;
                for (f, p) in chk.entry(&simplex, &pt, 0)?.iter().zip(&phis) {
                    let ell = p.degree()? as u32;
                    bideg.see(excluded_bidegree_norm(f, |a, b| a >= ell && a + b + q == 2 * ell));
                }
            }
        }
        out.push(cocycle.check("cech", 1e-8, self.scale));
        out.push(closed.check("cech", 1e-8, self.scale));
        out.push(bideg.check("cech", 1e-10, self.scale));

        // interpolation identity for three connections on the chart-0 complex
        let c0 = &s.charts[0];
        let n = self.n();
        let conns: Vec<Arc<dyn ConnectionSource>> = vec![
            s.resolution.connection(0).clone(),
            Arc::new(ConnectionFamily::trivial(n, c0.complex.ranks())),
            Arc::new(constant_connection(n, c0.complex.ranks(), self.seed)?),
        ];
        let mut interp = Worst::new("simplex interpolation identity (p = 2)");
        for pt in self.points_across(self.scn.verify.samples.min(6), 4, &c0.regulator)? {
            interp.see(interpolation_identity_check(&conns, &phis, &pt)?);
        }
        out.push(interp.check("cech", 1e-9, self.scale));
        Ok(out)
    }

    fn connections(&self) -> Result<Vec<Check>> {
        let s = self.setup()?;
        let cover = s.resolution.cover().clone();
        let mut compat = Worst::new("compatibility defect of ã off Z");
        let mut mininv = Worst::new("minimal inverse identities φσφ = φ, σ ⟂ im φ, σσ = 0");
        let mut basic = Worst::new("basic-connection defect");
        let foliation = self.scn.mode == Mode::Foliation;
        let (u, w) = if foliation { basic_fields(&s.charts[0].complex) } else { (Vec::new(), Vec::new()) };
        for (a, ch) in s.charts.iter().enumerate() {
            for pt in cover.boxes()[a].sample(self.scn.verify.samples, self.seed ^ (10 + a as u64)) {
                if section_norm2(&ch.regulator, &pt) < 1e-2 {
                    continue;
                }
                compat.see(tilde_compatibility_defect(&ch.tilde, &pt)?);
                let ev = ch.tilde.eval(&pt, 0)?;
                for k in 0..ev.phi.len() {
                    let (phi, sigma) = (ev.phi[k].values(), ev.sigma[k].values());
                    let next = ev.phi.get(k + 1).map(|p| (p.values(), ev.sigma[k + 1].values()));
                    // ev.phi[k] is φ_{k+1}, so σ lands in level k + 1
                    let h = match ch.complex.metric(k + 1) {
                        Some(h) => h.values(&pt)?,
                        None => nalgebra::DMatrix::identity(sigma.nrows(), sigma.nrows()),
                    };
                    let d = defining_identity_defects(&phi, &sigma, next.as_ref().map(|(p, q)| (p, q)), &h);
                    // relative to the size of the matrices involved
                    let size = 1.0 + phi.norm() * sigma.norm() * (1.0 + phi.norm());
                    mininv.see(d.iter().copied().fold(0.0, f64::max) / size);
                }
                if foliation && a == 0 {
                    basic.see(basic_defect(&ch.tilde, &u, &w, &pt)?);
                }
            }
        }
        let mut out = vec![compat.check("connections", 1e-9, self.scale), mininv.check("connections", 1e-12, self.scale)];
        if foliation {
            out.push(basic.check("connections", 1e-9, self.scale));
        }
        Ok(out)
    }

    fn vanishing(&self) -> Result<Vec<Check>> {
        let s = self.setup()?;
        let phis = self.scn.phis();
        let mut out = Vec::new();
        // where every cutoff is identically 1, Φ(D̂^ε) = Φ(ã) vanishes
        let mut support = Worst::new("support lemma: Φ(D̂^ε) = 0 where χ ≡ 1");
        let chk = CheckPhi::new(s.resolution.clone(), phis.clone())?;
        for pt in self.points(self.scn.verify.samples, 5)? {
            let u = s.charts.iter().map(|c| section_norm2(&c.regulator, &pt)).fold(f64::INFINITY, f64::min);
            if u < 1e-2 {
                continue;
            }
            let (_, hi) = self.scn.chi().bounds();
            let pt = pt.with_eps(u / (2.0 * hi));
            support.see(global_phi(&chk, &pt, 0)?.iter().map(|f| f.max_abs()).fold(0.0, f64::max));
        }
        out.push(support.check("vanishing", 1e-10, self.scale));
        if self.scn.mode == Mode::Foliation {
            let ch = &s.charts[0];
            let n = self.n();
            let other = match ch.tilde.kind() {
                TildeKind::Foliation => TildeConnection::foliation(ch.complex.clone(), christoffel(n, ch.complex.ranks(), self.seed)?)?,
                TildeKind::Sheaf => unreachable!("foliation mode"),
            };
            let pts: Vec<Point> = self
                .points(self.scn.verify.samples, 6)?
                .into_iter()
                .filter(|p| section_norm2(&ch.regulator, p) >= 1e-2)
                .collect();
            let probe = bott_vanishing_probe(&ch.tilde, Some(&other), &phis, &pts)?;
            let detail = format!("{} points off Z", pts.len());
            out.push(Check::new("vanishing", "Bott vanishing Φ(ã) = 0", probe.single, 1e-8 * self.scale).with_detail(detail.clone()));
            out.push(
                Check::new("vanishing", "Bott vanishing along the segment to a second basic connection", probe.interpolated.unwrap_or(f64::NAN), 1e-8 * self.scale)
                    .with_detail(format!("{}; t = 1/4, 1/2, 3/4 and the fiber integral over Δ_1", detail)),
            );
        }
        Ok(out)
    }

    fn transgression(&self) -> Result<Vec<Check>> {
        if self.scn.cover.is_some() {
            bail!("the transgression suite needs a single-chart scenario");
        }
        let n = self.n();
        let s1 = self.setup()?;
        let default_alt;
        let (metrics, conn) = match &self.scn.transgression {
            Some(t) => (t.metrics.as_slice(), t.connection),
            None => {
                // foliations keep TM's connection torsion-free and vary the leaf level
                let ranks = s1.charts[0].complex.ranks();
                let level = if self.scn.mode == Mode::Foliation { ranks.len() - 1 } else { 0 };
                let r = ranks[level];
                let h = (1..=n).map(|i| format!("z{}*zb{}", i, i)).collect::<Vec<_>>().join(" + ");
                let m = (0..r).map(|i| (0..r).map(|j| if i == j { format!("1 + {}", h) } else { "0".into() }).collect()).collect();
                default_alt = vec![MetricSpec { level, matrix: m }];
                (default_alt.as_slice(), ConnectionKind::Chern)
            }
        };
        let s2 = setup(self.scn, self.scn.chi(), Some((metrics, conn)))?;
        let phis = self.scn.phis();
        let t = Transgression::new(&s1.resolution, &s2.resolution, phis.clone(), vec![])?;
        let c1 = CheckPhi::new(s1.resolution.clone(), phis.clone())?;
        let c2 = CheckPhi::new(s2.resolution.clone(), phis.clone())?;
        let mut ident = Worst::new("transgression dη = Φ(D̂₂^ε) - Φ(D̂₁^ε)");
        let mut homot = Worst::new("transgression homotopy defect");
        let mut bideg = Worst::new("bidegree exclusions of η for (1,0) inputs");
        let mut moved = 0.0f64;
        for pt in self.points_across(self.scn.verify.samples.max(30), 7, &s1.charts[0].regulator)? {
            homot.see(t.homotopy_defect(&pt)?);
            let eta = t.eta(&pt, 1)?;
            let (f1, f2) = (global_phi(&c1, &pt, 0)?, global_phi(&c2, &pt, 0)?);
            for k in 0..phis.len() {
                let diff = f2[k].sub(&f1[k]);
                moved = moved.max(diff.max_abs());
                ident.see(eta[k].d()?.sub(&diff).max_abs());
                bideg.see(excluded_bidegree_norm(&eta[k].truncate(0), |a, b| a > b));
            }
        }
        Ok(vec![
            ident.check("transgression", 1e-7, self.scale).with_detail(format!("max |Φ₂ - Φ₁| = {:.3e}", moved)),
            homot.check("transgression", 1e-8, self.scale),
            bideg.check("transgression", 1e-10, self.scale),
        ])
    }
}

/// Random constant (1,0) connection matrices.
fn constant_connection(n: usize, ranks: &[usize], seed: u64) -> Result<ConnectionFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 99);
    let l = Layout::chart(n);
    let theta = ranks
        .iter()
        .map(|&r| {
            Mat::try_from_fn(r, r, |_, _| {
                let mut f = GradedForm::zero(l);
                for i in 0..n {
                    f = f.add(&GradedForm::term(l, l.dz(i), ScalarField::constant(rc(&mut rng) * 0.5)))?;
                }
                Ok(f)
            })
        })
        .collect::<chernres::Result<Vec<_>>>()?;
    Ok(ConnectionFamily::new(n, theta)?)
}

/// Torsion-free connection on TM with random constant symmetric Christoffel
/// symbols, and a random constant connection on the other levels.
fn christoffel(n: usize, ranks: &[usize], seed: u64) -> Result<Arc<dyn ConnectionSource>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 77);
    let l = Layout::chart(n);
    let mut gamma = vec![vec![vec![C64::new(0.0, 0.0); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let g = rc(&mut rng) * 0.3;
                gamma[i][j][k] = g;
                gamma[i][k][j] = g;
            }
        }
    }
    // (θ_0)_{ij} = Σ_k Γ^i_{jk} dz_k
    let t0 = Mat::try_from_fn(n, n, |i, j| {
        let mut f = GradedForm::zero(l);
        for k in 0..n {
            f = f.add(&GradedForm::term(l, l.dz(k), ScalarField::constant(gamma[i][j][k])))?;
        }
        Ok(f)
    })?;
    let mut theta = vec![t0];
    let rest = constant_connection(n, &ranks[1..], seed)?;
    theta.extend((0..ranks.len() - 1).map(|k| rest.level(k).clone()));
    Ok(Arc::new(ConnectionFamily::new(n, theta)?))
}

/// `u = f·v` tangent to the foliation (first generator) and an arbitrary `w`.
fn basic_fields(c: &BundleComplex) -> (Vec<ScalarField>, Vec<ScalarField>) {
    let n = c.n();
    let phi = c.phi(1);
    let f = ScalarField::one().add(&ScalarField::z(0).mul(&ScalarField::z(n - 1)));
    let u = (0..n).map(|i| phi.get(i, 0).mul(&f)).collect();
    let w = (0..n).map(|i| ScalarField::z((i + 1) % n).pow(2).add(&ScalarField::real(1.0 + i as f64))).collect();
    (u, w)
}
