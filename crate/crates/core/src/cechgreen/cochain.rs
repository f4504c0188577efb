//! Non-alternating Čech–de Rham cochains: symbolic ones with [`GradedForm`]
//! entries and pointwise sources evaluated on demand.
//!
//! Sign conventions: `(δγ)_{α_0..α_{p+1}} = Σ_j (-1)^j γ_{..α̂_j..}`,
//! `(dγ)_Δ = (-1)^p dγ_Δ` for `Δ` of Čech degree `p`, `∇ = d + δ`.

use crate::cechgreen::cover::Cover;
use crate::error::{Error, Result};
use crate::forms::graded::GradedForm;
use crate::forms::mono::Layout;
use crate::forms::pointwise::FormJet;
use crate::forms::scalar::Point;
use crate::jet::JetSpace;
use std::collections::{BTreeMap, BTreeSet};

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn face(s: &[usize], j: usize) -> Vec<usize> {
    let mut f = s.to_vec();
    f.remove(j);
    f
}

/// Homotopy tuples: `(k, [ρ_1β_0..ρ_1β_k, ρ_2β_k..ρ_2β_{p-1}])` for `k = 0..p-1`.
fn homotopy_tuples(simplex: &[usize], rho1: &[usize], rho2: &[usize]) -> Vec<(usize, Vec<usize>)> {
    (0..simplex.len())
        .map(|k| {
            let mut t: Vec<usize> = simplex[..=k].iter().map(|&b| rho1[b]).collect();
            t.extend(simplex[k..].iter().map(|&b| rho2[b]));
            (k, t)
        })
        .collect()
}

/// Cochain with symbolic entries. Čech degrees that are present must be
/// complete on the simplices asked for; absent degrees count as zero.
#[derive(Clone, Debug)]
pub struct Cochain {
    nz: usize,
    entries: BTreeMap<Vec<usize>, GradedForm>,
    degrees: BTreeSet<usize>,
}

impl Cochain {
    pub fn new(nz: usize) -> Cochain {
        Cochain { nz, entries: BTreeMap::new(), degrees: BTreeSet::new() }
    }

    /// 0-cochain restricting one global form to every chart.
    pub fn restriction(form: &GradedForm, cover_len: usize) -> Cochain {
        let mut c = Cochain::new(form.layout().nz);
        for a in 0..cover_len {
            c.insert(vec![a], form.clone());
        }
        c
    }

    pub fn insert(&mut self, simplex: Vec<usize>, form: GradedForm) {
        assert!(!simplex.is_empty());
        self.degrees.insert(simplex.len() - 1);
        self.entries.insert(simplex, form);
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn degrees(&self) -> &BTreeSet<usize> {
        &self.degrees
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &GradedForm)> {
        self.entries.iter()
    }

    /// Entry at a simplex; `Ok(None)` when that Čech degree is absent.
    pub fn get(&self, simplex: &[usize]) -> Result<Option<&GradedForm>> {
        if !self.degrees.contains(&(simplex.len() - 1)) {
            return Ok(None);
        }
        self.entries.get(simplex).map(Some).ok_or_else(|| Error::MissingFace(simplex.to_vec()))
    }

    fn zero(&self) -> GradedForm {
        GradedForm::zero(Layout::chart(self.nz))
    }

    fn get_or_zero(&self, simplex: &[usize]) -> Result<GradedForm> {
        Ok(self.get(simplex)?.cloned().unwrap_or_else(|| self.zero()))
    }

    /// `δγ` on the simplices of `nerve` of degree ≥ 1.
    pub fn cech_delta(&self, nerve: &[Vec<usize>]) -> Result<Cochain> {
        let mut out = Cochain::new(self.nz);
        for s in nerve {
            if s.len() < 2 || !self.degrees.contains(&(s.len() - 2)) {
                continue;
            }
            let mut acc = self.zero();
            for j in 0..s.len() {
                let f = self.get(&face(s, j))?.expect("degree present");
                acc = if j % 2 == 0 { acc.add(f)? } else { acc.sub(f)? };
            }
            out.insert(s.clone(), acc);
        }
        Ok(out)
    }

    /// `dγ` with the sign `(-1)^p`.
    pub fn twisted_d(&self) -> Result<Cochain> {
        let mut out = Cochain::new(self.nz);
        for (s, f) in &self.entries {
            let d = f.exterior_d()?;
            out.insert(s.clone(), if (s.len() - 1) % 2 == 0 { d } else { d.neg() });
        }
        Ok(out)
    }

    /// `∇γ = dγ + δγ` on `nerve`.
    pub fn nabla(&self, nerve: &[Vec<usize>]) -> Result<Cochain> {
        let d = self.twisted_d()?;
        let delta = self.cech_delta(nerve)?;
        let mut out = Cochain::new(self.nz);
        for s in nerve {
            let a = d.get(s).ok().flatten();
            let b = delta.get(s).ok().flatten();
            match (a, b) {
                (None, None) => {}
                (Some(x), None) | (None, Some(x)) => out.insert(s.clone(), x.clone()),
                (Some(x), Some(y)) => out.insert(s.clone(), x.add(y)?),
            }
        }
        Ok(out)
    }

    /// `(ργ)_{β_0..β_p} = γ_{ρβ_0..ρβ_p}` on the simplices of the fine nerve.
    pub fn refine(&self, map: &[usize], fine_nerve: &[Vec<usize>]) -> Result<Cochain> {
        let mut out = Cochain::new(self.nz);
        for s in fine_nerve {
            let t: Vec<usize> = s.iter().map(|&b| map[b]).collect();
            if let Some(f) = self.get(&t)? {
                out.insert(s.clone(), f.clone());
            }
        }
        Ok(out)
    }

    /// `(hγ)_{β_0..β_{p-1}} = Σ_k (-1)^k γ_{ρ_1β_0..ρ_1β_k, ρ_2β_k..ρ_2β_{p-1}}`.
    pub fn homotopy_h(&self, rho1: &[usize], rho2: &[usize], fine_nerve: &[Vec<usize>]) -> Result<Cochain> {
        let mut out = Cochain::new(self.nz);
        for s in fine_nerve {
            if !self.degrees.contains(&s.len()) {
                continue;
            }
            let mut acc = self.zero();
            for (k, t) in homotopy_tuples(s, rho1, rho2) {
                let f = self.get_or_zero(&t)?;
                acc = if k % 2 == 0 { acc.add(&f)? } else { acc.sub(&f)? };
            }
            out.insert(s.clone(), acc);
        }
        Ok(out)
    }

    pub fn add(&self, o: &Cochain) -> Result<Cochain> {
        let mut out = self.clone();
        for (s, f) in &o.entries {
            let g = match out.entries.get(s) {
                Some(x) => x.add(f)?,
                None => f.clone(),
            };
            out.insert(s.clone(), g);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Cochain {
        Cochain { entries: self.entries.iter().map(|(s, f)| (s.clone(), f.neg())).collect(), ..self.clone() }
    }
}

/// Check that a refinement map sends every fine box into its coarse box.
pub fn validate_refinement(map: &[usize], fine: &Cover, coarse: &Cover) -> Result<()> {
    if map.len() != fine.len() {
        return Err(Error::InvalidInput(format!("refinement map of length {} for {} sets", map.len(), fine.len())));
    }
    let mut bad = Vec::new();
    for (b, &a) in map.iter().enumerate() {
        if a >= coarse.len() {
            bad.push(format!("V_{} ↦ U_{} out of range", b, a));
            continue;
        }
        let v = &fine.boxes()[b].bounds;
        let u = &coarse.boxes()[a].bounds;
        if !v.iter().zip(u).all(|(x, y)| y.0 <= x.0 && x.1 <= y.1) {
            bad.push(format!("V_{} is not contained in U_{}", b, a));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(bad))
    }
}

/// A cochain evaluated pointwise: each entry is a list of forms (one per
/// characteristic polynomial) with jets of the requested order.
pub trait CochainSource: Send + Sync {
    fn nz(&self) -> usize;
    /// Number of forms per entry.
    fn width(&self) -> usize;
    fn entry(&self, simplex: &[usize], pt: &Point, order: u32) -> Result<Vec<FormJet>>;
}

pub fn zero_entry(nz: usize, width: usize, order: u32) -> Vec<FormJet> {
    vec![FormJet::zero(Layout::chart(nz), JetSpace::get(nz, 0, order)); width]
}

impl CochainSource for Cochain {
    fn nz(&self) -> usize {
        self.nz
    }

    fn width(&self) -> usize {
        1
    }

    fn entry(&self, simplex: &[usize], pt: &Point, order: u32) -> Result<Vec<FormJet>> {
        match self.get(simplex)? {
            Some(f) => Ok(vec![f.eval(pt, order)?]),
            None => Ok(zero_entry(self.nz, 1, order)),
        }
    }
}

/// `∇γ` evaluated pointwise.
pub struct Nabla<'a>(pub &'a dyn CochainSource);

impl CochainSource for Nabla<'_> {
    fn nz(&self) -> usize {
        self.0.nz()
    }

    fn width(&self) -> usize {
        self.0.width()
    }

    fn entry(&self, simplex: &[usize], pt: &Point, order: u32) -> Result<Vec<FormJet>> {
        let p = simplex.len() - 1;
        let own = self.0.entry(simplex, pt, order + 1)?;
        let mut acc: Vec<FormJet> = Vec::with_capacity(own.len());
        for f in &own {
            let d = f.d()?;
            acc.push(if p % 2 == 0 { d } else { d.neg() });
        }
        if p >= 1 {
            for j in 0..=p {
                let g = self.0.entry(&face(simplex, j), pt, order)?;
                for (a, b) in acc.iter_mut().zip(&g) {
                    *a = if j % 2 == 0 { a.add(b) } else { a.sub(b) };
                }
            }
        }
        Ok(acc)
    }
}

/// `ργ` evaluated pointwise.
pub struct Refined<'a> {
    pub src: &'a dyn CochainSource,
    pub map: &'a [usize],
}

impl CochainSource for Refined<'_> {
    fn nz(&self) -> usize {
        self.src.nz()
    }

    fn width(&self) -> usize {
        self.src.width()
    }

    fn entry(&self, simplex: &[usize], pt: &Point, order: u32) -> Result<Vec<FormJet>> {
        let t: Vec<usize> = simplex.iter().map(|&b| self.map[b]).collect();
        self.src.entry(&t, pt, order)
    }
}

/// `hγ` evaluated pointwise.
pub struct Homotopy<'a> {
    pub src: &'a dyn CochainSource,
    pub rho1: &'a [usize],
    pub rho2: &'a [usize],
}

impl CochainSource for Homotopy<'_> {
    fn nz(&self) -> usize {
        self.src.nz()
    }

    fn width(&self) -> usize {
        self.src.width()
    }

    fn entry(&self, simplex: &[usize], pt: &Point, order: u32) -> Result<Vec<FormJet>> {
        let mut acc = zero_entry(self.nz(), self.width(), order);
        for (k, t) in homotopy_tuples(simplex, self.rho1, self.rho2) {
            let g = self.src.entry(&t, pt, order)?;
            for (a, b) in acc.iter_mut().zip(&g) {
                *a = a.add(&b.scale(crate::C64::new(sign(k), 0.0)));
            }
        }
        Ok(acc)
    }
}
