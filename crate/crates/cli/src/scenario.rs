//! Scenario files: a versioned TOML description of one computation.
//!
//! Polynomial entries are strings over `z1..zn`; metrics and test-form factors
//! may also use conjugates (`zb1`, `conj(z1)`, `x1`, `y1`). Complex numbers are
//! written as `re` or `[re, im]`. Chart and coordinate indices in cycles and
//! area factors are 1-based; chart indices in isomorphisms are 0-based.

use chernres::complexes::SymmetricPolynomial;
use chernres::forms::parse::{parse_polynomial, ParseOptions};
use chernres::residues::{EpsLadder, QuadConfig};
use chernres::complexes::ChiKind;
use chernres::C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sheaf,
    Foliation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectionKind {
    /// `θ = 0` in the standard frames.
    #[default]
    Trivial,
    /// `h⁻¹∂h` level by level for the declared (diagonal) metrics.
    Chern,
}

/// `re` or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CNum {
    Real(f64),
    Complex([f64; 2]),
}

impl CNum {
    pub fn value(self) -> C64 {
        match self {
            CNum::Real(r) => C64::new(r, 0.0),
            CNum::Complex([a, b]) => C64::new(a, b),
        }
    }
}

pub type Matrix = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub mode: Mode,
    /// Characteristic polynomials in `e_k`, e.g. `"e1^2"` or `"e2 - 0.5 e1^2"`.
    pub phi: Vec<String>,
    pub manifold: Manifold,
    pub complex: ComplexSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverSpec>,
    #[serde(default)]
    pub regulator: RegulatorSpec,
    #[serde(default)]
    pub quadrature: QuadConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub test_forms: Vec<TestFormSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycle: Vec<CycleEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub localize: Option<LocalizeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transgression: Option<TransgressionSpec>,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<Expected>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifold {
    pub n: usize,
    /// Half-width of the cube `[-r, r]^{2n}`; ignored when `domain` is given.
    #[serde(default = "one")]
    pub radius: f64,
    /// Real bounds over `x1, y1, x2, …`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<[f64; 2]>>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    /// `φ_1, …, φ_N`, each a matrix of holomorphic polynomials.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<Matrix>,
    /// Koszul complex of `z1, …, zn`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub koszul: bool,
    /// Components of one generating vector field `Σ v_i ∂/∂z_i`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vector_field: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<MetricSpec>,
    #[serde(default)]
    pub connection: ConnectionKind,
    /// Required in foliation mode when `D_0` is not the flat coordinate connection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_free: Option<bool>,
    /// Sections `s` of the cutoff `χ(|s|²/ε)`; default: maximal minors of `φ_1`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<String>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub level: usize,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    #[serde(default = "default_margin")]
    pub margin: f64,
    pub charts: Vec<ChartSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub isomorphisms: Vec<IsoSpec>,
}

fn default_margin() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub bounds: Vec<[f64; 2]>,
    /// Complex on this chart; the top-level complex when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSpec>,
}

/// `g: P^source → P^target` on the overlap, one matrix per level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoSpec {
    pub target: usize,
    pub source: usize,
    pub maps: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatorSpec {
    #[serde(default = "default_chi")]
    pub chi: String,
    /// Strictly decreasing ε values; the default ladder is `10^{-1}…10^{-3}` in steps of `√10`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    /// Recompute every limit with this cutoff and compare.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_chi: Option<String>,
}

fn default_chi() -> String {
    "standard".into()
}

impl Default for RegulatorSpec {
    fn default() -> Self {
        RegulatorSpec { chi: default_chi(), ladder: None, compare_chi: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFormSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub center: Vec<CNum>,
    pub radius: f64,
    /// The bump is 1 inside `inner`; default `radius / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
    /// Coordinates `k` whose area forms `(i/2)dz_k∧dz̄_k` multiply the bump.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub area: Vec<usize>,
    /// Extra smooth scalar factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<CNum>>,
    /// `{z_k = 0 : k ∈ subspace}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<usize>>,
    #[serde(default = "one_i64")]
    pub multiplicity: i64,
}

fn one_i64() -> i64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizeSpec {
    pub phi: String,
    pub test: String,
    pub neighborhoods: Vec<NeighborhoodSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodSpec {
    pub center: Vec<CNum>,
    pub inner: f64,
    pub outer: f64,
}

/// Torus `|z_i| = radius` for the Grothendieck residue of a vector field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub radius: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

fn default_nodes() -> usize {
    64
}

/// A second choice of metrics and connection for the transgression suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransgressionSpec {
    pub metrics: Vec<MetricSpec>,
    #[serde(default)]
    pub connection: ConnectionKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Fixed ε for the pointwise identities.
    #[serde(default = "default_verify_eps")]
    pub eps: f64,
}

fn default_samples() -> usize {
    20
}

fn default_verify_eps() -> f64 {
    0.05
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec { samples: default_samples(), eps: default_verify_eps() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpectedSource {
    /// The Grothendieck torus integral of `[oracle]`.
    Oracle,
    /// The signed fundamental cycle of `[[cycle]]`.
    Cycle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub phi: String,
    pub test: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<CNum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<ExpectedSource>,
    /// Relative tolerance, or absolute with `absolute = true`.
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub absolute: bool,
    /// Where the target comes from, for the report.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug)]
pub enum ScenarioError {
    Io(String),
    Syntax(String),
    Invalid(Vec<String>),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Io(m) => write!(f, "cannot read scenario: {}", m),
            ScenarioError::Syntax(m) => write!(f, "scenario syntax error: {}", m),
            ScenarioError::Invalid(errs) => {
                writeln!(f, "scenario has {} validation error(s):", errs.len())?;
                for e in errs {
                    writeln!(f, "  - {}", e)?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let src = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {}", path.display(), e)))?;
    parse_scenario_str(&src)
}

pub fn parse_scenario_str(src: &str) -> Result<Scenario, ScenarioError> {
    let scn: Scenario = toml::from_str(src).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
    let mut errs = scn.validate();
    if errs.is_empty() {
        errs = crate::build::check_buildable(&scn);
    }
    if errs.is_empty() {
        Ok(scn)
    } else {
        Err(ScenarioError::Invalid(errs))
    }
}

impl Scenario {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios serialize")
    }

    pub fn phis(&self) -> Vec<SymmetricPolynomial> {
        self.phi.iter().map(|s| SymmetricPolynomial::parse(s).expect("validated")).collect()
    }

    pub fn chi(&self) -> ChiKind {
        ChiKind::parse(&self.regulator.chi).expect("validated")
    }

    pub fn ladder(&self) -> EpsLadder {
        let l = match &self.regulator.ladder {
            Some(v) => EpsLadder::new(v.clone()).expect("validated"),
            None => EpsLadder::default(),
        };
        l.with_quad(self.quadrature.clone())
    }

    pub fn domain(&self) -> Vec<(f64, f64)> {
        match &self.manifold.domain {
            Some(d) => d.iter().map(|[a, b]| (*a, *b)).collect(),
            None => vec![(-self.manifold.radius, self.manifold.radius); 2 * self.manifold.n],
        }
    }

    /// Every structural problem, in file order.
    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        let n = self.manifold.n;
        if self.version != SCHEMA_VERSION {
            e.push(format!("unsupported version {} (this build reads version {})", self.version, SCHEMA_VERSION));
        }
        if self.name.trim().is_empty() {
            e.push("name must not be empty".into());
        }
        if !(1..=3).contains(&n) {
            e.push(format!("manifold.n = {} is outside 1..=3", n));
            return e;
        }
        match &self.manifold.domain {
            Some(d) if d.len() != 2 * n || d.iter().any(|[a, b]| !(b > a)) => {
                e.push(format!("manifold.domain needs {} increasing [lo, hi] pairs", 2 * n))
            }
            None if !(self.manifold.radius > 0.0) => e.push("manifold.radius must be positive".into()),
            _ => {}
        }
        if self.phi.is_empty() {
            e.push("phi must list at least one polynomial".into());
        }
        let mut phi_names = BTreeSet::new();
        for p in &self.phi {
            phi_names.insert(p.as_str());
            match SymmetricPolynomial::parse(p).and_then(|q| q.degree()) {
                Ok(d) if d == 0 || d > n => e.push(format!("phi \"{}\" has degree {} outside 1..={}", p, d, n)),
                Ok(_) => {}
                Err(err) => e.push(format!("phi \"{}\": {}", p, err)),
            }
        }
        self.complex.check("complex", self.mode, n, &mut e);
        if let Some(c) = &self.cover {
            if c.charts.is_empty() {
                e.push("cover.charts must not be empty".into());
            }
            if !(c.margin > 0.0) {
                e.push("cover.margin must be positive".into());
            }
            for (k, ch) in c.charts.iter().enumerate() {
                if ch.bounds.len() != 2 * n || ch.bounds.iter().any(|[a, b]| !(b > a)) {
                    e.push(format!("cover.charts[{}].bounds needs {} increasing [lo, hi] pairs", k, 2 * n));
                }
                if let Some(cx) = &ch.complex {
                    cx.check(&format!("cover.charts[{}].complex", k), self.mode, n, &mut e);
                }
            }
            for (k, iso) in c.isomorphisms.iter().enumerate() {
                let m = c.charts.len();
                if iso.target >= m || iso.source >= m || iso.target == iso.source {
                    e.push(format!("cover.isomorphisms[{}] names charts ({}, {}) of {}", k, iso.target, iso.source, m));
                }
                for (l, mat) in iso.maps.iter().enumerate() {
                    check_matrix(&format!("cover.isomorphisms[{}].maps[{}]", k, l), mat, ParseOptions::holomorphic(n), &mut e);
                }
            }
        }
        if let Err(err) = ChiKind::parse(&self.regulator.chi) {
            e.push(format!("regulator.chi: {}", err));
        }
        if let Some(c) = &self.regulator.compare_chi {
            match ChiKind::parse(c) {
                Err(err) => e.push(format!("regulator.compare_chi: {}", err)),
                Ok(k) if ChiKind::parse(&self.regulator.chi).ok() == Some(k) => {
                    e.push("regulator.compare_chi must differ from regulator.chi".into())
                }
                _ => {}
            }
        }
        if let Some(l) = &self.regulator.ladder {
            check_ladder(l, "regulator.ladder", &mut e);
        }
        if let Err(err) = self.quadrature.validate() {
            e.push(format!("quadrature: {}", err));
        }
        let mut tests = BTreeSet::new();
        for (k, t) in self.test_forms.iter().enumerate() {
            let at = format!("test_forms[{}] ({})", k, t.name);
            if t.name.is_empty() || !t.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                e.push(format!("{}: names use letters, digits, '-' and '_'", at));
            }
            if !tests.insert(t.name.as_str()) {
                e.push(format!("{}: duplicate name", at));
            }
            if !t.center.is_empty() && t.center.len() != n {
                e.push(format!("{}: center needs {} coordinates", at, n));
            }
            let inner = t.inner.unwrap_or(t.radius / 2.0);
            if !(t.radius > 0.0 && inner > 0.0 && inner < t.radius) {
                e.push(format!("{}: need 0 < inner < radius", at));
            }
            let uniq: BTreeSet<_> = t.area.iter().collect();
            if uniq.len() != t.area.len() || t.area.iter().any(|&i| i == 0 || i > n) {
                e.push(format!("{}: area lists distinct coordinates in 1..={}", at, n));
            }
            if let Some(f) = &t.factor {
                if let Err(err) = parse_polynomial(f, ParseOptions::smooth(n)) {
                    e.push(format!("{}.factor: {}", at, err));
                }
            }
        }
        for (k, c) in self.cycle.iter().enumerate() {
            match (&c.point, &c.subspace) {
                (Some(p), None) if p.len() == n => {}
                (None, Some(s)) if !s.is_empty() && s.iter().all(|&i| (1..=n).contains(&i)) => {}
                _ => e.push(format!("cycle[{}]: give either a point with {} coordinates or a subspace over 1..={}", k, n, n)),
            }
        }
        if !self.cycle.is_empty() && self.mode != Mode::Sheaf {
            e.push("cycle is only meaningful in sheaf mode".into());
        }
        if let Some(l) = &self.localize {
            if !phi_names.contains(l.phi.as_str()) {
                e.push(format!("localize.phi \"{}\" is not listed in phi", l.phi));
            }
            if !tests.contains(l.test.as_str()) {
                e.push(format!("localize.test \"{}\" is not a test form", l.test));
            }
            if l.neighborhoods.iter().any(|nb| nb.center.len() != n || !(nb.inner > 0.0 && nb.outer > nb.inner)) {
                e.push(format!("localize.neighborhoods need {} coordinates and 0 < inner < outer", n));
            }
        }
        if let Some(o) = &self.oracle {
            if self.mode != Mode::Foliation || self.complex.vector_field.is_empty() {
                e.push("oracle needs foliation mode with complex.vector_field".into());
            }
            if !(o.radius > 0.0) || o.nodes < 8 {
                e.push("oracle needs radius > 0 and nodes ≥ 8".into());
            }
        }
        if let Some(t) = &self.transgression {
            if self.cover.is_some() {
                e.push("transgression is supported for single-chart scenarios".into());
            }
            for (k, m) in t.metrics.iter().enumerate() {
                check_matrix(&format!("transgression.metrics[{}]", k), &m.matrix, ParseOptions::smooth(n), &mut e);
            }
        }
        if self.verify.samples == 0 || !(self.verify.eps > 0.0) {
            e.push("verify needs samples ≥ 1 and eps > 0".into());
        }
        for (k, x) in self.expected.iter().enumerate() {
            let at = format!("expected[{}]", k);
            if !phi_names.contains(x.phi.as_str()) {
                e.push(format!("{}: phi \"{}\" is not listed in phi", at, x.phi));
            }
            if !tests.contains(x.test.as_str()) {
                e.push(format!("{}: test \"{}\" is not a test form", at, x.test));
            }
            match (x.value, x.from) {
                (Some(_), None) => {}
                (None, Some(ExpectedSource::Oracle)) if self.oracle.is_none() => e.push(format!("{}: from = \"oracle\" needs [oracle]", at)),
                (None, Some(ExpectedSource::Cycle)) if self.cycle.is_empty() => e.push(format!("{}: from = \"cycle\" needs [[cycle]]", at)),
                (None, Some(_)) => {}
                _ => e.push(format!("{}: give exactly one of value and from", at)),
            }
            if !(x.tolerance > 0.0) {
                e.push(format!("{}: tolerance must be positive", at));
            }
        }
        e
    }
}

impl ComplexSpec {
    fn check(&self, at: &str, mode: Mode, n: usize, e: &mut Vec<String>) {
        let given = [!self.maps.is_empty(), self.koszul, !self.vector_field.is_empty()].iter().filter(|b| **b).count();
        if given != 1 {
            e.push(format!("{}: give exactly one of maps, koszul and vector_field", at));
        }
        let holo = ParseOptions::holomorphic(n);
        for (k, m) in self.maps.iter().enumerate() {
            check_matrix(&format!("{}.maps[{}]", at, k), m, holo, e);
        }
        for (k, s) in self.vector_field.iter().enumerate() {
            if let Err(err) = parse_polynomial(s, holo) {
                e.push(format!("{}.vector_field[{}] \"{}\": {}", at, k, s, err));
            }
        }
        if !self.vector_field.is_empty() && self.vector_field.len() != n {
            e.push(format!("{}.vector_field needs {} components", at, n));
        }
        for (k, s) in self.sections.iter().enumerate() {
            if let Err(err) = parse_polynomial(s, holo) {
                e.push(format!("{}.sections[{}] \"{}\": {}", at, k, s, err));
            }
        }
        for (k, m) in self.metrics.iter().enumerate() {
            check_matrix(&format!("{}.metrics[{}]", at, k), &m.matrix, ParseOptions::smooth(n), e);
        }
        if self.koszul && mode == Mode::Foliation {
            e.push(format!("{}: the Koszul complex is not a foliation presentation", at));
        }
        if !self.vector_field.is_empty() && mode == Mode::Sheaf {
            e.push(format!("{}: vector_field needs foliation mode", at));
        }
        if mode == Mode::Foliation {
            // D_0 on TM must be torsion free; only the flat coordinate connection is known to be
            let nontrivial_d0 = self.connection == ConnectionKind::Chern && self.metrics.iter().any(|m| m.level == 0);
            if nontrivial_d0 && self.torsion_free != Some(true) {
                e.push(format!(
                    "{}: foliation mode needs a torsion-free D_0; the Chern connection of the level-0 metric is not known to be one, set torsion_free = true to assert it",
                    at
                ));
            }
        }
        if self.connection == ConnectionKind::Chern && self.metrics.is_empty() {
            e.push(format!("{}: connection = \"chern\" needs metrics", at));
        }
    }
}

fn check_matrix(at: &str, m: &Matrix, opts: ParseOptions, e: &mut Vec<String>) {
    if m.is_empty() || m.iter().any(|r| r.len() != m[0].len()) || m[0].is_empty() {
        e.push(format!("{}: matrix rows must be nonempty and of equal length", at));
        return;
    }
    for (i, row) in m.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            if let Err(err) = parse_polynomial(s, opts) {
                e.push(format!("{}[{}][{}] \"{}\": {}", at, i, j, s, err));
            }
        }
    }
}

pub fn check_ladder(l: &[f64], at: &str, e: &mut Vec<String>) {
    if let Err(err) = EpsLadder::new(l.to_vec()) {
        e.push(format!("{}: {}", at, err));
    } else if l.len() < 4 {
        e.push(format!("{}: extrapolation needs at least 4 values, got {}", at, l.len()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_numbers_read_either_form() {
        #[derive(Deserialize)]
        struct W {
            c: Vec<CNum>,
        }
        let w: W = toml::from_str("c = [1.5, [0.0, -2.0]]").unwrap();
        assert_eq!(w.c[0].value(), C64::new(1.5, 0.0));
        assert_eq!(w.c[1].value(), C64::new(0.0, -2.0));
    }

    #[test]
    fn ladders_need_four_decreasing_values() {
        let mut e = Vec::new();
        check_ladder(&[0.1, 0.01, 0.001, 0.0001], "l", &mut e);
        assert!(e.is_empty());
        check_ladder(&[0.1, 0.01, 0.001], "short", &mut e);
        check_ladder(&[0.1, 0.2, 0.01, 0.001], "order", &mut e);
        assert_eq!(e.len(), 2);
        assert!(e[0].starts_with("short") && e[1].starts_with("order"));
    }
}
