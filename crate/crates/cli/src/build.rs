//! From a validated scenario to core objects.

use crate::scenario::{ComplexSpec, ConnectionKind, MetricSpec, Mode, Scenario, TestFormSpec};
use anyhow::{bail, Context, Result};
use chernres::cechgreen::{BoxRegion, CheckPhi, Cover, SimplicialResolution};
use chernres::complexes::bundle::{sample_points, FieldMat};
use chernres::complexes::*;
use chernres::forms::parse::{parse_polynomial, ParseOptions};
use chernres::forms::pointwise::Mat;
use chernres::residues::{RegularizedFamily, ResidueKind, TestForm};
use chernres::{GradedForm, Layout, ScalarField};
use std::sync::Arc;

/// One chart: its complex, the singular connection and the cutoff.
pub struct ChartSetup {
    pub complex: Arc<BundleComplex>,
    pub tilde: Arc<TildeConnection>,
    pub regulator: Arc<Regulator>,
}

pub struct Setup {
    pub charts: Vec<ChartSetup>,
    pub resolution: Arc<SimplicialResolution>,
}

impl Setup {
    pub fn regulators(&self) -> Vec<Arc<Regulator>> {
        self.charts.iter().map(|c| c.regulator.clone()).collect()
    }

    pub fn family(&self, phis: Vec<SymmetricPolynomial>) -> Result<RegularizedFamily> {
        Ok(RegularizedFamily::new(CheckPhi::new(self.resolution.clone(), phis)?, self.regulators()))
    }
}

fn matrix(m: &[Vec<String>], opts: ParseOptions) -> Result<FieldMat> {
    Ok(FieldMat::parse(m, opts)?)
}

pub fn complex_of(spec: &ComplexSpec, mode: Mode, n: usize, metrics: &[MetricSpec]) -> Result<BundleComplex> {
    let holo = ParseOptions::holomorphic(n);
    let mut c = if spec.koszul {
        BundleComplex::koszul(n)
    } else if !spec.vector_field.is_empty() {
        let v = spec.vector_field.iter().map(|s| parse_polynomial(s, holo)).collect::<chernres::Result<Vec<_>>>()?;
        BundleComplex::vector_field(v)?
    } else {
        let maps = spec.maps.iter().map(|m| matrix(m, holo)).collect::<Result<Vec<_>>>()?;
        let mut ranks = vec![maps[0].rows];
        ranks.extend(maps.iter().map(|m| m.cols));
        match mode {
            Mode::Sheaf => BundleComplex::new(n, ranks, maps)?,
            Mode::Foliation => BundleComplex::foliation(n, maps)?,
        }
    };
    for m in metrics {
        c = c.with_metric(m.level, matrix(&m.matrix, ParseOptions::smooth(n))?).with_context(|| format!("metric on level {}", m.level))?;
    }
    Ok(c)
}

/// `θ_k = diag(∂h_ii/h_ii)` on levels with a metric, 0 elsewhere.
pub fn base_connection(c: &BundleComplex, kind: ConnectionKind) -> Result<Arc<dyn ConnectionSource>> {
    let n = c.n();
    if kind == ConnectionKind::Trivial {
        return Ok(Arc::new(ConnectionFamily::trivial(n, c.ranks())));
    }
    let l = Layout::chart(n);
    let mut theta = Vec::new();
    for (k, &r) in c.ranks().iter().enumerate() {
        let Some(h) = c.metric(k) else {
            theta.push(Mat::from_fn(r, r, |_, _| GradedForm::zero(l)));
            continue;
        };
        for pt in sample_points(n, 10, 1.0, 17) {
            let v = h.values(&pt)?;
            let off = (0..r).flat_map(|i| (0..r).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| v[(i, j)].norm()).fold(0.0, f64::max);
            if off > 0.0 {
                bail!("connection = \"chern\" supports diagonal metrics only (level {} has off-diagonal entries)", k);
            }
        }
        let diag = (0..r).map(|i| Ok(ConnectionFamily::line_bundle_metric(n, h.get(i, i))?.get(0, 0).clone())).collect::<Result<Vec<_>>>()?;
        theta.push(Mat::from_fn(r, r, |i, j| if i == j { diag[i].clone() } else { GradedForm::zero(l) }));
    }
    Ok(Arc::new(ConnectionFamily::new(n, theta)?))
}

fn chart_setup(
    spec: &ComplexSpec,
    mode: Mode,
    n: usize,
    chi: ChiKind,
    metrics: &[MetricSpec],
    connection: ConnectionKind,
) -> Result<ChartSetup> {
    let complex = Arc::new(complex_of(spec, mode, n, metrics)?);
    let base = base_connection(&complex, connection)?;
    let tilde = Arc::new(match mode {
        Mode::Sheaf => TildeConnection::sheaf(complex.clone(), base)?,
        Mode::Foliation => TildeConnection::foliation(complex.clone(), base)?,
    });
    let sections = if spec.sections.is_empty() {
        Regulator::default_sections(&complex)
    } else {
        spec.sections.iter().map(|s| parse_polynomial(s, ParseOptions::holomorphic(n))).collect::<chernres::Result<Vec<_>>>()?
    };
    let regulator = Arc::new(Regulator::single(chi, sections)?);
    Ok(ChartSetup { complex, tilde, regulator })
}

/// The regularized setup of a scenario. `alternate` replaces the metrics and
/// connection of the top-level complex.
pub fn setup(scn: &Scenario, chi: ChiKind, alternate: Option<(&[MetricSpec], ConnectionKind)>) -> Result<Setup> {
    let n = scn.manifold.n;
    let domain = BoxRegion::new(scn.domain())?;
    let (metrics, conn) = alternate.unwrap_or((&scn.complex.metrics, scn.complex.connection));
    let top = || chart_setup(&scn.complex, scn.mode, n, chi, metrics, conn);
    let Some(cover) = &scn.cover else {
        let ch = top()?;
        let cover = Arc::new(Cover::single(domain));
        let conn: Arc<dyn ConnectionSource> = Arc::new(regularize(ch.tilde.clone(), ch.regulator.clone()));
        let resolution = Arc::new(SimplicialResolution::global(ch.complex.clone(), cover, vec![conn])?);
        return Ok(Setup { charts: vec![ch], resolution });
    };
    let boxes = cover
        .charts
        .iter()
        .map(|c| BoxRegion::new(c.bounds.iter().map(|[a, b]| (*a, *b)).collect()))
        .collect::<chernres::Result<Vec<_>>>()?;
    let cov = Arc::new(Cover::new(domain, boxes, cover.margin).context("building the cover")?);
    let charts = cover
        .charts
        .iter()
        .enumerate()
        .map(|(k, c)| match &c.complex {
            Some(spec) => chart_setup(spec, scn.mode, n, chi, &spec.metrics, spec.connection),
            None => top(),
        }
        .with_context(|| format!("chart {}", k)))
        .collect::<Result<Vec<_>>>()?;
    let conns: Vec<Arc<dyn ConnectionSource>> =
        charts.iter().map(|c| Arc::new(regularize(c.tilde.clone(), c.regulator.clone())) as Arc<dyn ConnectionSource>).collect();
    let resolution = if cover.charts.iter().all(|c| c.complex.is_none()) {
        SimplicialResolution::global(charts[0].complex.clone(), cov, conns)?
    } else {
        let holo = ParseOptions::holomorphic(n);
        let isos = cover
            .isomorphisms
            .iter()
            .map(|g| Ok(((g.target, g.source), g.maps.iter().map(|m| matrix(m, holo)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        SimplicialResolution::padded_iso(cov, charts.iter().map(|c| c.complex.clone()).collect(), conns, isos)?
    };
    Ok(Setup { charts, resolution: Arc::new(resolution) })
}

pub fn test_form(spec: &TestFormSpec, n: usize) -> Result<TestForm> {
    let center = if spec.center.is_empty() { vec![chernres::C64::new(0.0, 0.0); n] } else { spec.center.iter().map(|c| c.value()).collect() };
    let mut t = TestForm::plateau(center, spec.inner.unwrap_or(spec.radius / 2.0), spec.radius)?;
    for &k in &spec.area {
        t = t.with_factor(&TestForm::area_form(n, k - 1))?;
    }
    if let Some(f) = &spec.factor {
        t = t.mul_scalar(&parse_polynomial(f, ParseOptions::smooth(n))?);
    }
    Ok(t)
}

pub fn residue_kind(scn: &Scenario, c: &BundleComplex) -> ResidueKind {
    match scn.mode {
        Mode::Sheaf => ResidueKind::Sheaf,
        Mode::Foliation => ResidueKind::Foliation { kappa: c.generic_rank(1) },
    }
}

/// Vector field components of a foliation scenario.
pub fn vector_field(scn: &Scenario) -> Result<Vec<ScalarField>> {
    let holo = ParseOptions::holomorphic(scn.manifold.n);
    Ok(scn.complex.vector_field.iter().map(|s| parse_polynomial(s, holo)).collect::<chernres::Result<Vec<_>>>()?)
}

/// Semantic checks that need the built objects: degree windows and test-form
/// degrees. Returns all problems found.
pub fn check_buildable(scn: &Scenario) -> Vec<String> {
    let mut errs = Vec::new();
    let n = scn.manifold.n;
    let s = match setup(scn, scn.chi(), None) {
        Ok(s) => s,
        Err(e) => return vec![format!("{:#}", e)],
    };
    let kind = residue_kind(scn, &s.charts[0].complex);
    let mut test_degrees = Vec::new();
    for t in &scn.test_forms {
        match test_form(t, n) {
            Ok(tf) => test_degrees.push(tf.degree().unwrap_or(0)),
            Err(e) => errs.push(format!("test form {}: {:#}", t.name, e)),
        }
    }
    for (p, q) in scn.phi.iter().zip(scn.phis()) {
        let ell = q.degree().unwrap_or(0);
        if let Err(e) = chernres::residues::degree_gate(kind, n, ell) {
            errs.push(format!("phi \"{}\": {}", p, e));
        }
        let want = (2 * (n - ell.min(n))) as u32;
        if !scn.test_forms.is_empty() && !test_degrees.contains(&want) {
            errs.push(format!("phi \"{}\" has degree {} and needs a test form of degree {}", p, 2 * ell, want));
        }
    }
    if let Some(t) = &scn.transgression {
        if let Err(e) = setup(scn, scn.chi(), Some((&t.metrics, t.connection))) {
            errs.push(format!("transgression: {:#}", e));
        }
    }
    errs
}
