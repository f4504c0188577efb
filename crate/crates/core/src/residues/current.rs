//! Pairings of regularized characteristic forms with test forms and the
//! currents obtained in the limit `ε → 0`.

use crate::cechgreen::{global_phi, CheckPhi, Transgression};
use crate::complexes::chern::SymmetricPolynomial;
use crate::complexes::regulator::Regulator;
use crate::error::{Error, Result};
use crate::forms::mono::Layout;
use crate::forms::pointwise::FormJet;
use crate::forms::scalar::{Point, ScalarField, SmoothFn};
use crate::residues::extrapolate::{extrapolate, CurrentEstimate, EpsLadder};
use crate::residues::quadrature::{integrate, QuadConfig, Refine};
use crate::residues::testform::TestForm;
use crate::C64;
use serde::Serialize;
use std::sync::Arc;

/// An ε-family of global forms on a box domain.
pub trait FormFamily: Sync {
    fn nz(&self) -> usize;
    /// Form degree of each member.
    fn degrees(&self) -> Vec<u32>;
    /// Members at `pt` (with `pt.eps` set), jets of order 0.
    fn eval(&self, pt: &Point) -> Result<Vec<FormJet>>;
    /// Cutoffs whose transition shells drive the quadrature refinement.
    fn regulators(&self) -> &[Arc<Regulator>];
    fn domain(&self) -> &[(f64, f64)];
}

/// `Φ(D̂^ε)` glued over the cover of a simplicial resolution.
pub struct RegularizedFamily {
    check: CheckPhi,
    regs: Vec<Arc<Regulator>>,
}

impl RegularizedFamily {
    /// `regs` must list the cutoffs of every regularized vertex connection.
    pub fn new(check: CheckPhi, regs: Vec<Arc<Regulator>>) -> RegularizedFamily {
        RegularizedFamily { check, regs }
    }

    pub fn check_phi(&self) -> &CheckPhi {
        &self.check
    }

    pub fn phis(&self) -> &[SymmetricPolynomial] {
        self.check.phis()
    }
}

fn phi_degrees(phis: &[SymmetricPolynomial]) -> Vec<u32> {
    phis.iter().map(|p| 2 * p.degree().unwrap_or(0) as u32).collect()
}

impl FormFamily for RegularizedFamily {
    fn nz(&self) -> usize {
        self.check.resolution().nz()
    }

    fn degrees(&self) -> Vec<u32> {
        phi_degrees(self.check.phis())
    }

    fn eval(&self, pt: &Point) -> Result<Vec<FormJet>> {
        global_phi(&self.check, pt, 0)
    }

    fn regulators(&self) -> &[Arc<Regulator>] {
        &self.regs
    }

    fn domain(&self) -> &[(f64, f64)] {
        &self.check.resolution().cover().domain().bounds
    }
}

/// The transgression forms `η^ε` between two setups.
pub struct EtaFamily {
    t: Transgression,
    regs: Vec<Arc<Regulator>>,
    domain: Vec<(f64, f64)>,
}

impl EtaFamily {
    pub fn new(t: Transgression, regs: Vec<Arc<Regulator>>) -> EtaFamily {
        let domain = t.cover().domain().bounds.clone();
        EtaFamily { t, regs, domain }
    }

    pub fn transgression(&self) -> &Transgression {
        &self.t
    }
}

impl FormFamily for EtaFamily {
    fn nz(&self) -> usize {
        self.t.cover().nz()
    }

    fn degrees(&self) -> Vec<u32> {
        phi_degrees(self.t.check_phi().phis()).into_iter().map(|d| d.saturating_sub(1)).collect()
    }

    fn eval(&self, pt: &Point) -> Result<Vec<FormJet>> {
        self.t.eta(pt, 0)
    }

    fn regulators(&self) -> &[Arc<Regulator>] {
        &self.regs
    }

    fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }
}

/// Identically zero forms of the given degrees.
pub struct ZeroFamily {
    pub nz: usize,
    pub degrees: Vec<u32>,
    pub domain: Vec<(f64, f64)>,
}

impl FormFamily for ZeroFamily {
    fn nz(&self) -> usize {
        self.nz
    }

    fn degrees(&self) -> Vec<u32> {
        self.degrees.clone()
    }

    fn eval(&self, pt: &Point) -> Result<Vec<FormJet>> {
        let space = crate::jet::JetSpace::get(self.nz, 0, 0);
        Ok(self.degrees.iter().map(|_| FormJet::zero(Layout::chart(pt.z.len()), space)).collect())
    }

    fn regulators(&self) -> &[Arc<Regulator>] {
        &[]
    }

    fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }
}

/// Pairings of one member with one test form along the ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderPairing {
    pub eps: Vec<f64>,
    pub values: Vec<C64>,
    pub errors: Vec<f64>,
    pub leaves: Vec<usize>,
    /// Quadrature hit the refinement cap somewhere.
    pub flagged: bool,
}

/// `(-1)^{n(n-1)/2} (-2i)^n`: the top coefficient of `dz_1…dz_n dz̄_1…dz̄_n`
/// against `dx_1 dy_1 … dx_n dy_n`.
pub fn top_form_factor(n: usize) -> C64 {
    let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    C64::new(0.0, -2.0).powi(n as i32) * sign
}

pub(crate) fn point_of(x: &[f64]) -> Point {
    Point::chart((0..x.len() / 2).map(|i| C64::new(x[2 * i], x[2 * i + 1])).collect())
}

fn check_support(test: &TestForm, domain: &[(f64, f64)]) -> Result<()> {
    let inside = test.support().iter().zip(domain).all(|(s, d)| d.0 < s.0 && s.1 < d.1);
    if test.support().len() != domain.len() || !inside {
        return Err(Error::InvalidInput(format!(
            "test form support {:?} is not strictly inside the domain {:?}",
            test.support(),
            domain
        )));
    }
    Ok(())
}

/// Refinement towards the cutoff transition shells at a given ε.
fn shell_refiner<'a>(
    regs: &'a [Arc<Regulator>],
    test: &'a TestForm,
    eps: f64,
    cfg: &'a QuadConfig,
) -> impl Fn(&[(f64, f64)]) -> Refine + Sync + 'a {
    move |bx: &[(f64, f64)]| {
        if test.vanishes_on(bx) {
            return Refine::Skip;
        }
        // support lemma: the forms vanish where every cutoff is 1
        if cfg.skip_saturated && !regs.is_empty() && regs.iter().all(|r| r.is_one_on(bx, eps)) {
            return Refine::Skip;
        }
        // per axis: the u-width with the other coordinates frozen at the center
        let limit = |r: &Regulator| {
            let (t0, t1) = r.chi().bounds();
            (t1 - t0) * cfg.order as f64 / cfg.shell_nodes
        };
        let mut worst: Option<(usize, f64)> = None;
        for r in regs {
            let (t0, t1) = r.chi().bounds();
            match r.u_interval(bx, eps) {
                Some((lo, hi)) if hi > t0 && lo < t1 => {}
                _ => continue,
            }
            for k in 0..bx.len() {
                let line: Vec<(f64, f64)> = bx
                    .iter()
                    .enumerate()
                    .map(|(j, &(a, b))| if j == k { (a, b) } else { (0.5 * (a + b), 0.5 * (a + b)) })
                    .collect();
                let Some((lo, hi)) = r.u_interval(&line, eps) else { return Refine::Split(None) };
                let excess = (hi - lo) / limit(r);
                if excess > 1.0 && worst.map_or(true, |(_, w)| excess > w) {
                    worst = Some((k, excess));
                }
            }
        }
        if let Some((k, _)) = worst {
            return Refine::Split(Some(k));
        }
        Refine::Leaf
    }
}

/// `⟨F^ε, φ⟩ = ∫ F^ε ∧ φ` for every member of the family, test form and ε.
/// Returns `[member][test]`.
pub fn pair(family: &dyn FormFamily, tests: &[TestForm], ladder: &EpsLadder) -> Result<Vec<Vec<LadderPairing>>> {
    let n = family.nz();
    let degs = family.degrees();
    for t in tests {
        if t.nz() != n {
            return Err(Error::Dimension(format!("test form on ℂ^{} for forms on ℂ^{}", t.nz(), n)));
        }
        check_support(t, family.domain())?;
        let td = t.degree().unwrap_or(0);
        if let Some(d) = degs.iter().find(|d| *d + td != 2 * n as u32) {
            return Err(Error::DegreeConstraint(format!(
                "form of degree {} against a test form of degree {} is not a top-degree integral on ℂ^{}",
                d, td, n
            )));
        }
    }
    let layout = Layout::chart(n);
    let top = layout.top_chart();
    let factor = top_form_factor(n);
    let width = degs.len();
    let mut out = vec![Vec::with_capacity(tests.len()); width];
    for t in tests {
        let mut per: Vec<LadderPairing> = (0..width)
            .map(|_| LadderPairing { eps: Vec::new(), values: Vec::new(), errors: Vec::new(), leaves: Vec::new(), flagged: false })
            .collect();
        for &eps in ladder.values() {
            let f = |x: &[f64]| -> Result<Vec<C64>> {
                let pt = point_of(x).with_eps(eps);
                let tf = t.eval(&pt, 0)?;
                if tf.is_empty() {
                    return Ok(vec![C64::new(0.0, 0.0); width]);
                }
                let forms = family.eval(&pt)?;
                Ok(forms.iter().map(|g| g.wedge(&tf).value_at(top) * factor).collect())
            };
            let refine = shell_refiner(family.regulators(), t, eps, &ladder.quad);
            let r = integrate(t.support(), width, &ladder.quad, &refine, &f)?;
            for (k, p) in per.iter_mut().enumerate() {
                p.eps.push(eps);
                p.values.push(r.values[k]);
                p.errors.push(r.errors[k]);
                p.leaves.push(r.leaves);
                p.flagged |= r.capped;
            }
        }
        for (k, p) in per.into_iter().enumerate() {
            out[k].push(p);
        }
    }
    Ok(out)
}

fn estimate(p: &LadderPairing) -> Result<CurrentEstimate> {
    let mut e = extrapolate(&p.eps, &p.values, &p.errors)?;
    e.flagged |= p.flagged;
    Ok(e)
}

/// Which degree window applies to `Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueKind {
    /// Coherent sheaf resolutions: `1 ≤ ℓ ≤ n`.
    Sheaf,
    /// Foliations of rank `kappa`: `n - κ < ℓ ≤ n`.
    Foliation { kappa: usize },
}

pub fn degree_gate(kind: ResidueKind, n: usize, ell: usize) -> Result<()> {
    match kind {
        ResidueKind::Sheaf if (1..=n).contains(&ell) => Ok(()),
        ResidueKind::Sheaf => Err(Error::DegreeConstraint(format!("sheaf residues need 1 ≤ ℓ ≤ n = {}, got ℓ = {}", n, ell))),
        ResidueKind::Foliation { kappa } if ell + kappa > n && ell <= n => Ok(()),
        ResidueKind::Foliation { kappa } => Err(Error::DegreeConstraint(format!(
            "Baum–Bott residues need n - κ < ℓ ≤ n, here {} < ℓ ≤ {}, got ℓ = {}",
            n.saturating_sub(kappa),
            n,
            ell
        ))),
    }
}

/// `R^Φ` paired with each test form: `[member][test]`.
pub fn residue_current(family: &RegularizedFamily, kind: ResidueKind, tests: &[TestForm], ladder: &EpsLadder) -> Result<Vec<Vec<CurrentEstimate>>> {
    let n = family.nz();
    for p in family.phis() {
        degree_gate(kind, n, p.degree()?)?;
    }
    pair(family, tests, ladder)?.iter().map(|row| row.iter().map(estimate).collect()).collect()
}

/// Agreement of limits computed with two cutoff choices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiCheck {
    pub difference: f64,
    pub bound: f64,
    pub agree: bool,
}

pub fn chi_independence(a: &CurrentEstimate, b: &CurrentEstimate) -> ChiCheck {
    let difference = (a.limit - b.limit).norm();
    let bound = a.error + b.error;
    ChiCheck { difference, bound, agree: difference <= bound }
}

/// Ball around a singular component used to localize a test form.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighborhood {
    pub center: Vec<C64>,
    /// The localizing bump is 1 within `inner` and 0 beyond `outer`.
    pub inner: f64,
    pub outer: f64,
}

impl Neighborhood {
    fn bump(&self) -> ScalarField {
        let terms: Vec<ScalarField> =
            self.center.iter().enumerate().map(|(i, c)| ScalarField::z(i).sub(&ScalarField::constant(*c)).abs2()).collect();
        ScalarField::sum(&terms).smooth(SmoothFn::Plateau { lo: self.inner * self.inner, hi: self.outer * self.outer })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Localized {
    pub components: Vec<CurrentEstimate>,
    pub total: CurrentEstimate,
    /// `|Σ_k R_{Z_k} - R|`.
    pub defect: f64,
    /// Sum of the error bars involved.
    pub bound: f64,
}

/// `1_{Z'} R^Φ` for each component, via the test form times a bump around
/// `Z'`, for the first member of the family.
pub fn localized_residue(
    family: &RegularizedFamily,
    kind: ResidueKind,
    test: &TestForm,
    nbhds: &[Neighborhood],
    ladder: &EpsLadder,
) -> Result<Localized> {
    for (i, a) in nbhds.iter().enumerate() {
        if !(a.inner > 0.0 && a.outer > a.inner) || a.center.len() != family.nz() {
            return Err(Error::InvalidInput(format!("malformed neighborhood {:?}", a)));
        }
        for b in &nbhds[i + 1..] {
            let d = a.center.iter().zip(&b.center).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            if d < a.outer + b.outer {
                return Err(Error::InvalidInput(format!(
                    "neighborhoods of {:?} and {:?} overlap; shrink their outer radii",
                    a.center, b.center
                )));
            }
        }
    }
    let mut tests: Vec<TestForm> = nbhds.iter().map(|nb| test.clone().mul_scalar(&nb.bump())).collect();
    tests.push(test.clone());
    let est = residue_current(family, kind, &tests, ladder)?;
    let row = &est[0];
    let total = row[row.len() - 1].clone();
    let components = row[..row.len() - 1].to_vec();
    let sum: C64 = components.iter().map(|c| c.limit).sum();
    let bound = total.error + components.iter().map(|c| c.error).sum::<f64>();
    Ok(Localized { defect: (sum - total.limit).norm(), bound, components, total })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Point(Vec<C64>),
    /// `{z_i = 0 : i ∈ set}`.
    CoordinateSubspace(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleComponent {
    pub geometry: Geometry,
    pub multiplicity: i64,
}

/// `Σ m_k [Z_k]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CycleSpec {
    pub components: Vec<CycleComponent>,
}

impl CycleComponent {
    pub fn codimension(&self, n: usize) -> usize {
        match &self.geometry {
            Geometry::Point(_) => n,
            Geometry::CoordinateSubspace(s) => s.len(),
        }
    }
}

impl CycleSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        for c in &self.components {
            match &c.geometry {
                Geometry::Point(z) if z.len() != n => {
                    return Err(Error::Dimension(format!("point {:?} in ℂ^{}", z, n)));
                }
                Geometry::CoordinateSubspace(s) => {
                    let mut t = s.clone();
                    t.sort_unstable();
                    t.dedup();
                    if s.is_empty() || t.len() != s.len() || t.iter().any(|&i| i >= n) {
                        return Err(Error::InvalidInput(format!("bad coordinate subspace {:?} in ℂ^{}", s, n)));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The components of codimension `p`.
    pub fn part_of_codim(&self, n: usize, p: usize) -> CycleSpec {
        CycleSpec { components: self.components.iter().filter(|c| c.codimension(n) == p).cloned().collect() }
    }
}

/// `Σ m_k ∫_{Z_k} φ`: point evaluation, or quadrature over coordinate slices.
pub fn cycle_pairing(spec: &CycleSpec, test: &TestForm, quad: &QuadConfig) -> Result<C64> {
    let n = test.nz();
    spec.validate(n)?;
    let mut acc = C64::new(0.0, 0.0);
    for c in &spec.components {
        let v = match &c.geometry {
            Geometry::Point(z) => {
                if test.degree().is_some_and(|d| d != 0) {
                    return Err(Error::DegreeConstraint("a point pairs only with 0-forms".into()));
                }
                test.value_at(z)?
            }
            Geometry::CoordinateSubspace(set) => slice_integral(test, set, quad)?,
        };
        acc += v * c.multiplicity as f64;
    }
    Ok(acc)
}

fn slice_integral(test: &TestForm, set: &[usize], quad: &QuadConfig) -> Result<C64> {
    let n = test.nz();
    let free: Vec<usize> = (0..n).filter(|i| !set.contains(i)).collect();
    let m = free.len();
    if test.degree().is_some_and(|d| d != 2 * m as u32) {
        return Err(Error::DegreeConstraint(format!("a slice of dimension {} pairs with {}-forms", m, 2 * m)));
    }
    if m == 0 {
        return test.value_at(&vec![C64::new(0.0, 0.0); n]);
    }
    let l = Layout::chart(n);
    let mask = free.iter().fold(0, |acc, &i| acc | l.dz(i) | l.dzb(i));
    let factor = top_form_factor(m);
    let embed = |x: &[f64]| -> Vec<f64> {
        let mut full = vec![0.0; 2 * n];
        for (k, &i) in free.iter().enumerate() {
            full[2 * i] = x[2 * k];
            full[2 * i + 1] = x[2 * k + 1];
        }
        full
    };
    let bx: Vec<(f64, f64)> = free.iter().flat_map(|&i| [test.support()[2 * i], test.support()[2 * i + 1]]).collect();
    let f = |x: &[f64]| -> Result<Vec<C64>> { Ok(vec![test.eval(&point_of(&embed(x)), 0)?.value_at(mask) * factor]) };
    let refine = |b: &[(f64, f64)]| {
        let mut full = vec![(0.0, 0.0); 2 * n];
        for (k, &i) in free.iter().enumerate() {
            full[2 * i] = b[2 * k];
            full[2 * i + 1] = b[2 * k + 1];
        }
        if test.vanishes_on(&full) {
            Refine::Skip
        } else {
            Refine::Leaf
        }
    };
    let cfg = QuadConfig { initial_splits: quad.initial_splits.max(4), max_halvings: quad.max_halvings.max(4), ..quad.clone() };
    Ok(integrate(&bx, 1, &cfg, &refine, &f)?.values[0])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FundamentalCycleEntry {
    pub residue: CurrentEstimate,
    /// `(-1)^{p-1} (p-1)! ⟨[𝒢]_p, φ⟩`.
    pub expected: C64,
    pub relative_error: f64,
}

/// Compare `R^{e_p}` (the first member of the family) with the signed cycle.
pub fn fundamental_cycle_check(
    family: &RegularizedFamily,
    p: usize,
    spec: &CycleSpec,
    tests: &[TestForm],
    ladder: &EpsLadder,
) -> Result<Vec<FundamentalCycleEntry>> {
    if p == 0 {
        return Err(Error::InvalidInput("codimension p must be positive".into()));
    }
    let n = family.nz();
    let coeff = (1..p).map(|k| k as f64).product::<f64>() * if p % 2 == 1 { 1.0 } else { -1.0 };
    let part = spec.part_of_codim(n, p);
    let est = residue_current(family, ResidueKind::Sheaf, tests, ladder)?;
    est[0]
        .iter()
        .zip(tests)
        .map(|(r, t)| {
            let expected = cycle_pairing(&part, t, &ladder.quad)? * coeff;
            let relative_error = (r.limit - expected).norm() / expected.norm().max(1e-300);
            Ok(FundamentalCycleEntry { residue: r.clone(), expected, relative_error })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `⟨N^Φ, dφ⟩`, which equals `⟨dN^Φ, φ⟩` for odd-degree `N^Φ`.
    pub n_dphi: Vec<CurrentEstimate>,
    /// `⟨R_2 - R_1, φ⟩`.
    pub r_diff: Vec<CurrentEstimate>,
    pub identity_defect: Vec<f64>,
    pub identity_bound: Vec<f64>,
    /// `max |dη_ε - (Φ(D̂_2^ε) - Φ(D̂_1^ε))|` over the sample points.
    pub pointwise_defect: f64,
}

/// Pointwise transgression identity for the first member.
pub fn transgression_identity_defect(eta: &EtaFamily, f1: &RegularizedFamily, f2: &RegularizedFamily, points: &[Point]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for pt in points {
        let d_eta = eta.t.eta(pt, 1)?[0].d()?;
        let diff = f2.eval(pt)?[0].sub(&f1.eval(pt)?[0]);
        worst = worst.max(d_eta.sub(&diff).max_abs());
    }
    Ok(worst)
}

/// `N^Φ` from the transgression forms and the identity `dN = R_2 - R_1`.
pub fn comparison_current(
    eta: &EtaFamily,
    f1: &RegularizedFamily,
    f2: &RegularizedFamily,
    tests: &[TestForm],
    ladder: &EpsLadder,
    points: &[Point],
) -> Result<ComparisonReport> {
    let dtests = tests.iter().map(|t| t.d()).collect::<Result<Vec<_>>>()?;
    let n_pairs = pair(eta, &dtests, ladder)?;
    let p1 = pair(f1, tests, ladder)?;
    let p2 = pair(f2, tests, ladder)?;
    let mut report = ComparisonReport {
        n_dphi: Vec::new(),
        r_diff: Vec::new(),
        identity_defect: Vec::new(),
        identity_bound: Vec::new(),
        pointwise_defect: transgression_identity_defect(eta, f1, f2, points)?,
    };
    for k in 0..tests.len() {
        let nd = estimate(&n_pairs[0][k])?;
        let (a, b) = (&p1[0][k], &p2[0][k]);
        let diff: Vec<C64> = a.values.iter().zip(&b.values).map(|(x, y)| y - x).collect();
        let errs: Vec<f64> = a.errors.iter().zip(&b.errors).map(|(x, y)| x + y).collect();
        let rd = extrapolate(&a.eps, &diff, &errs)?;
        report.identity_defect.push((nd.limit - rd.limit).norm());
        report.identity_bound.push(nd.error + rd.error);
        report.n_dphi.push(nd);
        report.r_diff.push(rd);
    }
    Ok(report)
}

