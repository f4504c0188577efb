//! Form-valued homomorphisms between the levels of a graded bundle
//! `E = ⊕ E_k` and the super sign rules for applying and composing them.
//!
//! A level `k` carries parity `k mod 2`. An element `ω ⊗ γ` with `γ: E_ℓ → E_k`
//! has endomorphism degree `k - ℓ` and acts on `η ⊗ ξ` by
//! `(-1)^{deg_e(γ)·deg(η)} ω∧η ⊗ γ(ξ)`.

use crate::error::{Error, Result};
use crate::forms::graded::GradedForm;
use crate::forms::mono::{degree, Layout};
use crate::forms::pointwise::FormMat;

/// Matrix of forms representing a map `E_source → E_target`.
#[derive(Clone, Debug)]
pub struct EndForm {
    pub target: i32,
    pub source: i32,
    rows: usize,
    cols: usize,
    entries: Vec<GradedForm>,
}

/// Section of `E_level` with form coefficients (a column vector).
#[derive(Clone, Debug)]
pub struct VecForm {
    pub level: i32,
    pub entries: Vec<GradedForm>,
}

fn odd(k: i32) -> bool {
    k.rem_euclid(2) == 1
}

impl EndForm {
    pub fn new(target: i32, source: i32, rows: usize, cols: usize, entries: Vec<GradedForm>) -> Result<EndForm> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {}x{} matrix", entries.len(), rows, cols)));
        }
        if let Some(first) = entries.first() {
            if entries.iter().any(|e| e.layout() != first.layout()) {
                return Err(Error::Dimension("entries live on different domains".into()));
            }
        }
        Ok(EndForm { target, source, rows, cols, entries })
    }

    pub fn zero(layout: Layout, target: i32, source: i32, rows: usize, cols: usize) -> EndForm {
        EndForm { target, source, rows, cols, entries: vec![GradedForm::zero(layout); rows * cols] }
    }

    /// Identity of degree `(0, 0)` on `E_level` of rank `r`.
    pub fn identity(layout: Layout, level: i32, r: usize) -> EndForm {
        let mut e = EndForm::zero(layout, level, level, r, r);
        for i in 0..r {
            e.entries[i * r + i] = GradedForm::scalar(layout, crate::forms::scalar::ScalarField::one());
        }
        e
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GradedForm {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: GradedForm) {
        self.entries[i * self.cols + j] = f;
    }

    pub fn entries(&self) -> &[GradedForm] {
        &self.entries
    }

    pub fn endo_degree(&self) -> i32 {
        self.target - self.source
    }

    /// Form degree when all entries are homogeneous of the same degree.
    pub fn form_degree(&self) -> Option<u32> {
        let mut d = None;
        for e in &self.entries {
            for (m, _) in e.terms() {
                match d {
                    None => d = Some(degree(m)),
                    Some(x) if x != degree(m) => return None,
                    _ => {}
                }
            }
        }
        Some(d.unwrap_or(0))
    }

    fn layout(&self) -> Option<Layout> {
        self.entries.first().map(|e| e.layout())
    }

    pub fn add(&self, o: &EndForm) -> Result<EndForm> {
        if (self.target, self.source, self.rows, self.cols) != (o.target, o.source, o.rows, o.cols) {
            return Err(Error::Level("sum of maps between different levels".into()));
        }
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        Ok(EndForm { entries, ..self.clone() })
    }

    pub fn sub(&self, o: &EndForm) -> Result<EndForm> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> EndForm {
        EndForm { entries: self.entries.iter().map(|e| e.neg()).collect(), ..self.clone() }
    }

    pub fn exterior_d(&self) -> Result<EndForm> {
        let entries = self.entries.iter().map(|e| e.exterior_d()).collect::<Result<Vec<_>>>()?;
        Ok(EndForm { entries, ..self.clone() })
    }

    /// Plain matrix product with entrywise wedge (no super signs).
    pub fn wedge(&self, o: &EndForm) -> Result<EndForm> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let layout = self.layout().or(o.layout()).unwrap_or(Layout::chart(0));
        let mut out = EndForm::zero(layout, self.target, o.source, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = GradedForm::zero(layout);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).wedge(o.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }
}

/// Negate the odd-degree terms of `f`.
fn parity(f: &GradedForm) -> GradedForm {
    f.filter(|m| degree(m) % 2 == 0).add(&f.filter(|m| degree(m) % 2 == 1).neg()).expect("same layout")
}

/// `α(β) = (-1)^{deg_e α · deg_f β} ω∧η ⊗ γ(ξ)`, extended linearly over the
/// form degrees of `β`.
pub fn super_apply(a: &EndForm, b: &VecForm) -> Result<VecForm> {
    if a.source != b.level {
        return Err(Error::Level(format!("map from E_{} applied to a section of E_{}", a.source, b.level)));
    }
    if a.cols != b.entries.len() {
        return Err(Error::Dimension(format!("{} columns against a vector of length {}", a.cols, b.entries.len())));
    }
    let flip = odd(a.endo_degree());
    let layout = a.layout().or(b.entries.first().map(|e| e.layout())).unwrap_or(Layout::chart(0));
    let mut out = Vec::with_capacity(a.rows);
    for i in 0..a.rows {
        let mut acc = GradedForm::zero(layout);
        for (k, bk) in b.entries.iter().enumerate() {
            let bk = if flip { parity(bk) } else { bk.clone() };
            acc = acc.add(&a.get(i, k).wedge(&bk)?)?;
        }
        out.push(acc);
    }
    Ok(VecForm { level: a.target, entries: out })
}

/// `αα' = (-1)^{deg_e α · deg_f α'} ω∧ω' ⊗ γ∘γ'`.
pub fn super_compose(a: &EndForm, b: &EndForm) -> Result<EndForm> {
    if a.source != b.target {
        return Err(Error::Level(format!(
            "cannot compose E_{}←E_{} with E_{}←E_{}",
            a.target, a.source, b.target, b.source
        )));
    }
    let b = if odd(a.endo_degree()) {
        EndForm { entries: b.entries.iter().map(parity).collect(), ..b.clone() }
    } else {
        b.clone()
    };
    a.wedge(&b)
}

/// Pointwise counterpart of [`super_compose`] for matrices of form jets.
pub fn super_compose_jets(a: &FormMat, a_endo_degree: i32, b: &FormMat) -> FormMat {
    if odd(a_endo_degree) {
        a.wedge(&b.parity())
    } else {
        a.wedge(b)
    }
}
