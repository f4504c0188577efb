//! Simplicial resolutions over a cover: one padded complex per chart, chain
//! isomorphisms on overlaps, and per-vertex connections pulled to a common frame.
//!
//! On a simplex `Δ = (α_0..α_p)` the bundle is `E^Δ = P^{α_0}`; the connection
//! of vertex `α_j` is transported through `g_{α_j α_0}: P^{α_0} → P^{α_j}`.
//! Padding a chart complex by elementary blocks `ℂ^r →id→ ℂ^r` is how charts
//! with different resolutions are made isomorphic.

use crate::cechgreen::cover::Cover;
use crate::complexes::bundle::{BundleComplex, FieldMat};
use crate::complexes::connection::ConnectionSource;
use crate::error::{Error, Result};
use crate::forms::mono::Layout;
use crate::forms::pointwise::{FormMat, JetMat};
use crate::forms::scalar::Point;
use crate::jet::JetSpace;
use std::collections::BTreeMap;
use std::sync::Arc;

const VALIDATION_POINTS: usize = 24;
const VALIDATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
enum Iso {
    Identity,
    Given(Vec<FieldMat>),
    InverseOf(Vec<FieldMat>),
}

impl Iso {
    fn eval(&self, ranks: &[usize], pt: &Point, space: &'static JetSpace) -> Result<Vec<JetMat>> {
        match self {
            Iso::Identity => Ok(ranks.iter().map(|&r| JetMat::identity(space, r)).collect()),
            Iso::Given(g) => g.iter().map(|m| m.eval(pt, space)).collect(),
            Iso::InverseOf(g) => g
                .iter()
                .map(|m| {
                    m.eval(pt, space)?.inverse().ok_or_else(|| Error::SingularPoint {
                        point: crate::error::fmt_point(&pt.z),
                        reason: "overlap isomorphism is not invertible".into(),
                    })
                })
                .collect(),
        }
    }
}

/// Per-chart complexes, overlap isomorphisms and vertex connections.
#[derive(Clone)]
pub struct SimplicialResolution {
    cover: Arc<Cover>,
    complexes: Vec<Arc<BundleComplex>>,
    connections: Vec<Arc<dyn ConnectionSource>>,
    isos: BTreeMap<(usize, usize), Iso>,
    global: bool,
}

impl std::fmt::Debug for SimplicialResolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimplicialResolution")
            .field("charts", &self.complexes.len())
            .field("ranks", &self.complexes[0].ranks())
            .field("global", &self.global)
            .finish()
    }
}

fn check_connection(c: &BundleComplex, d: &dyn ConnectionSource, alpha: usize) -> Result<()> {
    if d.ranks() != c.ranks() || d.nz() != c.n() {
        return Err(Error::Dimension(format!(
            "connection on chart {} has ranks {:?}, complex has {:?}",
            alpha,
            d.ranks(),
            c.ranks()
        )));
    }
    Ok(())
}

/// Same maps, so the identity is a chain isomorphism.
fn same_complex(a: &Arc<BundleComplex>, b: &Arc<BundleComplex>) -> bool {
    Arc::ptr_eq(a, b)
        || (a.ranks() == b.ranks()
            && a.maps().iter().zip(b.maps()).all(|(x, y)| x.data.iter().zip(&y.data).all(|(f, g)| f.to_string() == g.to_string())))
}

impl SimplicialResolution {
    /// The same complex on every chart; no elementary blocks.
    pub fn global(complex: Arc<BundleComplex>, cover: Arc<Cover>, connections: Vec<Arc<dyn ConnectionSource>>) -> Result<SimplicialResolution> {
        if connections.len() != cover.len() {
            return Err(Error::Dimension(format!("{} connections for {} charts", connections.len(), cover.len())));
        }
        if complex.n() != cover.nz() {
            return Err(Error::Dimension("complex and cover live in different ℂⁿ".into()));
        }
        for (a, d) in connections.iter().enumerate() {
            check_connection(&complex, d.as_ref(), a)?;
        }
        Ok(SimplicialResolution {
            complexes: vec![complex; cover.len()],
            cover,
            connections,
            isos: BTreeMap::new(),
            global: true,
        })
    }

    /// Padded complexes `P^α` (all with the same ranks) and user isomorphisms
    /// `g_{αβ}: P^β → P^α` given level by level. The opposite direction is
    /// filled by inversion; pairs of charts sharing one complex default to the
    /// identity. Every overlap needs data, and the result is validated.
    pub fn padded_iso(
        cover: Arc<Cover>,
        complexes: Vec<Arc<BundleComplex>>,
        connections: Vec<Arc<dyn ConnectionSource>>,
        isos: Vec<((usize, usize), Vec<FieldMat>)>,
    ) -> Result<SimplicialResolution> {
        let m = cover.len();
        if complexes.len() != m || connections.len() != m {
            return Err(Error::Dimension(format!("{} complexes and {} connections for {} charts", complexes.len(), connections.len(), m)));
        }
        let ranks = complexes[0].ranks().to_vec();
        for (a, c) in complexes.iter().enumerate() {
            if c.ranks() != ranks.as_slice() {
                return Err(Error::Dimension(format!(
                    "padded complex on chart {} has ranks {:?}, chart 0 has {:?}; pad them to equal ranks",
                    a,
                    c.ranks(),
                    ranks
                )));
            }
            if c.n() != cover.nz() {
                return Err(Error::Dimension("complex and cover live in different ℂⁿ".into()));
            }
            check_connection(c, connections[a].as_ref(), a)?;
        }
        let mut table = BTreeMap::new();
        for ((a, b), g) in isos {
            if a >= m || b >= m || a == b {
                return Err(Error::InvalidInput(format!("isomorphism for invalid chart pair ({}, {})", a, b)));
            }
            if g.len() != ranks.len() || g.iter().zip(&ranks).any(|(x, &r)| x.shape() != (r, r)) {
                return Err(Error::Dimension(format!("isomorphism g_{}{} needs {} square blocks of sizes {:?}", a, b, ranks.len(), ranks)));
            }
            table.insert((b, a), Iso::InverseOf(g.clone()));
            table.insert((a, b), Iso::Given(g));
        }
        let mut missing = Vec::new();
        for a in 0..m {
            table.insert((a, a), Iso::Identity);
            for b in 0..m {
                if a == b || table.contains_key(&(a, b)) || cover.simplex_box(&[a, b]).is_none() {
                    continue;
                }
                if same_complex(&complexes[a], &complexes[b]) {
                    table.insert((a, b), Iso::Identity);
                } else {
                    missing.push(format!("overlap isomorphism g_{}{} (or g_{}{}) is required", a, b, b, a));
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::Validation(missing));
        }
        let r = SimplicialResolution { cover, complexes, connections, isos: table, global: false };
        r.validate()?;
        Ok(r)
    }

    /// Resolution over `𝒰_1 ⊔ 𝒰_2` extending both. `mixed` holds
    /// `g_{αβ}: P^{2,β} → P^{1,α}` indexed by `(α, β)` in the two covers;
    /// overlaps between charts with the same complex default to the identity.
    pub fn disjoint_union(r1: &SimplicialResolution, r2: &SimplicialResolution, mixed: Vec<((usize, usize), Vec<FieldMat>)>) -> Result<SimplicialResolution> {
        if r1.ranks() != r2.ranks() {
            return Err(Error::Dimension(format!("resolutions with ranks {:?} and {:?}", r1.ranks(), r2.ranks())));
        }
        let cover = Arc::new(Cover::disjoint_union(&r1.cover, &r2.cover)?);
        let m1 = r1.cover.len();
        let m = cover.len();
        let mut table = BTreeMap::new();
        for (r, off) in [(r1, 0), (r2, m1)] {
            let n = r.cover.len();
            for a in 0..n {
                for b in 0..n {
                    let g = if r.global || a == b { Some(Iso::Identity) } else { r.isos.get(&(a, b)).cloned() };
                    if let Some(g) = g {
                        table.insert((a + off, b + off), g);
                    }
                }
            }
        }
        for ((a, b), g) in mixed {
            if a >= m1 || b >= r2.cover.len() {
                return Err(Error::InvalidInput(format!("mixed isomorphism for invalid pair ({}, {})", a, b)));
            }
            table.insert((m1 + b, a), Iso::InverseOf(g.clone()));
            table.insert((a, m1 + b), Iso::Given(g));
        }
        let complexes: Vec<Arc<BundleComplex>> = r1.complexes.iter().chain(&r2.complexes).cloned().collect();
        let mut missing = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if table.contains_key(&(a, b)) || cover.simplex_box(&[a, b]).is_none() {
                    continue;
                }
                if same_complex(&complexes[a], &complexes[b]) {
                    table.insert((a, b), Iso::Identity);
                } else if a < m1 {
                    missing.push(format!("mixed overlap isomorphism for chart {} of the first cover and chart {} of the second", a, b - m1));
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::Validation(missing));
        }
        let connections = r1.connections.iter().chain(&r2.connections).cloned().collect();
        let r = SimplicialResolution { cover, complexes, connections, isos: table, global: false };
        r.validate()?;
        Ok(r)
    }

    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    pub fn complex(&self, alpha: usize) -> &Arc<BundleComplex> {
        &self.complexes[alpha]
    }

    pub fn connection(&self, alpha: usize) -> &Arc<dyn ConnectionSource> {
        &self.connections[alpha]
    }

    pub fn ranks(&self) -> &[usize] {
        self.complexes[0].ranks()
    }

    pub fn nz(&self) -> usize {
        self.cover.nz()
    }

    pub fn is_global(&self) -> bool {
        self.global
    }

    /// `g_{αβ}` at a point with jets in `space`.
    pub fn iso(&self, a: usize, b: usize, pt: &Point, space: &'static JetSpace) -> Result<Vec<JetMat>> {
        if self.global || a == b {
            return Iso::Identity.eval(self.ranks(), pt, space);
        }
        let g = self.isos.get(&(a, b)).ok_or_else(|| Error::MissingFace(vec![a, b]))?;
        g.eval(self.ranks(), pt, space)
    }

    fn validate(&self) -> Result<()> {
        let m = self.cover.len();
        let sp = JetSpace::get(self.nz(), 0, 0);
        let mut report = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let Some(bx) = self.cover.simplex_box(&[a, b]) else { continue };
                for (i, pt) in bx.sample(VALIDATION_POINTS, 31 + (a * m + b) as u64).iter().enumerate() {
                    let g = match self.iso(a, b, pt, sp) {
                        Ok(g) => g,
                        Err(e) => {
                            report.push(format!("g_{}{} at {}: {}", a, b, crate::error::fmt_point(&pt.z), e));
                            break;
                        }
                    };
                    let pa = self.complexes[a].eval_maps(pt, sp)?;
                    let pb = self.complexes[b].eval_maps(pt, sp)?;
                    for k in 1..g.len() {
                        let lhs = pa[k - 1].values() * g[k].values();
                        let rhs = g[k - 1].values() * pb[k - 1].values();
                        let err = (&lhs - &rhs).norm();
                        if err > VALIDATION_TOL * (1.0 + lhs.norm()) {
                            report.push(format!(
                                "g_{}{} is not a chain map at level {} near {} (defect {:.3e})",
                                a,
                                b,
                                k,
                                crate::error::fmt_point(&pt.z),
                                err
                            ));
                            break;
                        }
                    }
                    if i == 0 {
                        for c in 0..m {
                            self.check_cocycle(a, b, c, &mut report)?;
                        }
                    }
                }
            }
        }
        if report.is_empty() {
            Ok(())
        } else {
            report.dedup();
            Err(Error::Validation(report))
        }
    }

    fn check_cocycle(&self, a: usize, b: usize, c: usize, report: &mut Vec<String>) -> Result<()> {
        if c == a || c == b {
            return Ok(());
        }
        let Some(bx) = self.cover.simplex_box(&[a, b, c]) else { return Ok(()) };
        let sp = JetSpace::get(self.nz(), 0, 0);
        for pt in bx.sample(VALIDATION_POINTS / 4, 97) {
            let (Ok(ab), Ok(bc), Ok(ac)) = (self.iso(a, b, &pt, sp), self.iso(b, c, &pt, sp), self.iso(a, c, &pt, sp)) else {
                continue;
            };
            for k in 0..ab.len() {
                let lhs = ab[k].values() * bc[k].values();
                let err = (&lhs - ac[k].values()).norm();
                if err > VALIDATION_TOL * (1.0 + lhs.norm()) {
                    report.push(format!("cocycle g_{a}{b} g_{b}{c} = g_{a}{c} fails at level {k} (defect {err:.3e})"));
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// Connection matrices of vertex `simplex[j]` in the frame of `E^Δ = P^{simplex[0]}`:
    /// `g⁻¹dg + g⁻¹θ'g` with `g = g_{α_j α_0}`.
    pub fn vertex_theta(&self, simplex: &[usize], j: usize, pt: &Point, order: u32) -> Result<Vec<FormMat>> {
        let (a0, aj) = (simplex[0], simplex[j]);
        let theta = self.connections[aj].theta(pt, order)?;
        if self.global || a0 == aj {
            return Ok(theta.iter().map(|t| t.truncate(order)).collect());
        }
        let layout = Layout::chart(self.nz());
        let hi = JetSpace::get(self.nz(), 0, order + 1);
        let g = self.iso(aj, a0, pt, hi)?;
        let mut out = Vec::with_capacity(g.len());
        for (gk, tk) in g.iter().zip(&theta) {
            let ginv = gk.truncate(order).inverse().ok_or_else(|| Error::SingularPoint {
                point: crate::error::fmt_point(&pt.z),
                reason: format!("g_{}{} is not invertible", aj, a0),
            })?;
            let dg = gk.to_forms(layout).d()?;
            let conj = tk.truncate(order).mul_right(&gk.truncate(order));
            out.push(dg.add(&conj).mul_left(&ginv));
        }
        Ok(out)
    }
}
