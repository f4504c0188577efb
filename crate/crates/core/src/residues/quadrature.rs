//! Adaptive tensor Gauss–Legendre quadrature on real boxes.
//!
//! Boxes are split k-d style (on the axis the oracle names, else the longest
//! edge) as long as the refinement
//! oracle asks for it. Leaves are integrated with the `q`- and `(q-1)`-point
//! tensor rules; their difference is the error estimate. Leaves are evaluated
//! in parallel and summed in tree order, so results do not depend on the
//! thread count.

use crate::error::{Error, Result};
use crate::C64;
use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::num::NonZeroUsize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadConfig {
    /// Gauss–Legendre points per axis on a leaf.
    pub order: usize,
    /// Uniform halvings of every axis before adaptive refinement.
    pub initial_splits: u32,
    /// Cap on the halvings of any single axis.
    pub max_halvings: u32,
    /// Requested nodes per axis across the cutoff transition shell.
    pub shell_nodes: f64,
    /// Skip boxes on which every cutoff is identically 1.
    pub skip_saturated: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { order: 4, initial_splits: 2, max_halvings: 12, shell_nodes: 8.0, skip_saturated: true }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 2 || self.order > 32 {
            return Err(Error::InvalidInput(format!("quadrature order must be in 2..=32, got {}", self.order)));
        }
        if !(self.shell_nodes > 0.0) {
            return Err(Error::InvalidInput("shell_nodes must be positive".into()));
        }
        if self.initial_splits > self.max_halvings {
            return Err(Error::InvalidInput("initial_splits exceeds max_halvings".into()));
        }
        Ok(())
    }
}

/// Decision of the refinement oracle for one box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refine {
    /// The integrand vanishes on the box.
    Skip,
    Leaf,
    /// Split the given axis, or the longest edge.
    Split(Option<usize>),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadResult {
    pub values: Vec<C64>,
    /// `|Q_q - Q_{q-1}|` summed over leaves, per output.
    pub errors: Vec<f64>,
    pub leaves: usize,
    pub skipped: usize,
    /// Some box wanted refinement past `max_halvings`.
    pub capped: bool,
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new(q: usize) -> Rule {
        let gl = GaussLegendre::new(NonZeroUsize::new(q).expect("order ≥ 2"));
        let (nodes, weights) = gl.as_node_weight_pairs().iter().copied().unzip();
        Rule { nodes, weights }
    }

    /// Tensor rule on a box, accumulating `width` outputs.
    fn apply(&self, bx: &[(f64, f64)], width: usize, f: &(dyn Fn(&[f64]) -> Result<Vec<C64>> + Sync)) -> Result<Vec<C64>> {
        let d = bx.len();
        let q = self.nodes.len();
        let jac: f64 = bx.iter().map(|(a, b)| 0.5 * (b - a)).product();
        let mut acc = vec![C64::new(0.0, 0.0); width];
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        loop {
            let mut w = jac;
            for k in 0..d {
                let (a, b) = bx[k];
                x[k] = 0.5 * (a + b) + 0.5 * (b - a) * self.nodes[idx[k]];
                w *= self.weights[idx[k]];
            }
            let v = f(&x)?;
            if v.len() != width {
                return Err(Error::Dimension(format!("integrand returned {} values, expected {}", v.len(), width)));
            }
            for (a, y) in acc.iter_mut().zip(&v) {
                *a += y * w;
            }
            let mut k = 0;
            loop {
                if k == d {
                    return Ok(acc);
                }
                idx[k] += 1;
                if idx[k] < q {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

fn split(bx: &[(f64, f64)], axis: usize) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let (a, b) = bx[axis];
    let m = 0.5 * (a + b);
    let mut lo = bx.to_vec();
    let mut hi = bx.to_vec();
    lo[axis].1 = m;
    hi[axis].0 = m;
    (lo, hi)
}

/// Collect leaves depth first; returns (leaves, skipped, capped).
fn leaves(bx: &[(f64, f64)], cfg: &QuadConfig, refine: &dyn Fn(&[(f64, f64)]) -> Refine) -> (Vec<Vec<(f64, f64)>>, usize, bool) {
    let d = bx.len();
    let mut out = Vec::new();
    let mut skipped = 0;
    let mut capped = false;
    // uniform start grid
    let mut stack: Vec<(Vec<(f64, f64)>, Vec<u32>)> = vec![(bx.to_vec(), vec![0; d])];
    for _ in 0..cfg.initial_splits {
        for axis in 0..d {
            stack = stack
                .into_iter()
                .flat_map(|(b, mut h)| {
                    h[axis] += 1;
                    let (lo, hi) = split(&b, axis);
                    [(lo, h.clone()), (hi, h)]
                })
                .collect();
        }
    }
    stack.reverse();
    while let Some((b, h)) = stack.pop() {
        match refine(&b) {
            Refine::Skip => skipped += 1,
            Refine::Leaf => out.push(b),
            Refine::Split(want) => {
                let axis = match want {
                    Some(k) => Some(k).filter(|&k| h[k] < cfg.max_halvings),
                    None => (0..d)
                        .filter(|&k| h[k] < cfg.max_halvings)
                        .max_by(|&i, &j| (b[i].1 - b[i].0).total_cmp(&(b[j].1 - b[j].0)).then(j.cmp(&i))),
                };
                match axis {
                    None => {
                        capped = true;
                        out.push(b);
                    }
                    Some(axis) => {
                        let (lo, hi) = split(&b, axis);
                        let mut h2 = h.clone();
                        h2[axis] += 1;
                        stack.push((hi, h2.clone()));
                        stack.push((lo, h2));
                    }
                }
            }
        }
    }
    (out, skipped, capped)
}

/// Integrate `f: ℝ^d → ℂ^width` over `bx`.
pub fn integrate(
    bx: &[(f64, f64)],
    width: usize,
    cfg: &QuadConfig,
    refine: &(dyn Fn(&[(f64, f64)]) -> Refine + Sync),
    f: &(dyn Fn(&[f64]) -> Result<Vec<C64>> + Sync),
) -> Result<QuadResult> {
    cfg.validate()?;
    if bx.is_empty() || bx.iter().any(|(a, b)| !(b > a)) {
        return Err(Error::InvalidInput(format!("degenerate integration box {:?}", bx)));
    }
    let (cells, skipped, capped) = leaves(bx, cfg, refine);
    let hi = Rule::new(cfg.order);
    let lo = Rule::new(cfg.order - 1);
    let parts: Vec<(Vec<C64>, Vec<C64>)> =
        cells.par_iter().map(|c| Ok((hi.apply(c, width, f)?, lo.apply(c, width, f)?))).collect::<Result<_>>()?;
    let mut values = vec![C64::new(0.0, 0.0); width];
    let mut errors = vec![0.0; width];
    for (a, b) in &parts {
        for k in 0..width {
            values[k] += a[k];
            errors[k] += (a[k] - b[k]).norm();
        }
    }
    Ok(QuadResult { values, errors, leaves: cells.len(), skipped, capped })
}
