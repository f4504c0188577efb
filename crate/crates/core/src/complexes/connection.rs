//! Connection matrices on the levels of a complex, and their curvature.

use crate::error::{Error, Result};
use crate::forms::endo::EndForm;
use crate::forms::graded::GradedForm;
use crate::forms::mono::Layout;
use crate::forms::pointwise::{FormJet, FormMat, Mat};
use crate::forms::scalar::{Point, ScalarField};
use crate::jet::JetSpace;

/// Anything that yields the connection matrices `θ_k` (one per level) at a point.
///
/// `theta(pt, order)` returns matrices of one-forms in the chart layout whose
/// coefficient jets carry at least `order` derivatives.
pub trait ConnectionSource: Send + Sync {
    fn nz(&self) -> usize;
    fn ranks(&self) -> &[usize];
    fn theta(&self, pt: &Point, order: u32) -> Result<Vec<FormMat>>;
}

/// Zero connection matrices of the right shapes.
pub fn zero_thetas(nz: usize, ranks: &[usize], order: u32) -> Vec<FormMat> {
    let layout = Layout::chart(nz);
    let space = JetSpace::get(nz, 0, order);
    ranks.iter().map(|&r| FormMat::zeros(layout, space, r, r)).collect()
}

/// Symbolic connection family `θ_0..θ_N` with [`GradedForm`] entries.
#[derive(Clone, Debug)]
pub struct ConnectionFamily {
    nz: usize,
    ranks: Vec<usize>,
    theta: Vec<Mat<GradedForm>>,
}

impl ConnectionFamily {
    /// `d` on every level.
    pub fn trivial(nz: usize, ranks: &[usize]) -> ConnectionFamily {
        let layout = Layout::chart(nz);
        ConnectionFamily {
            nz,
            ranks: ranks.to_vec(),
            theta: ranks.iter().map(|&r| Mat::from_fn(r, r, |_, _| GradedForm::zero(layout))).collect(),
        }
    }

    pub fn new(nz: usize, theta: Vec<Mat<GradedForm>>) -> Result<ConnectionFamily> {
        let layout = Layout::chart(nz);
        let mut ranks = Vec::new();
        for (k, t) in theta.iter().enumerate() {
            if t.rows != t.cols {
                return Err(Error::Dimension(format!("θ_{} is not square", k)));
            }
            for f in &t.data {
                if f.layout() != layout {
                    return Err(Error::Dimension(format!("θ_{} entry is not a form on ℂ^{}", k, nz)));
                }
                if f.terms().any(|(m, _)| m.count_ones() != 1) {
                    return Err(Error::InvalidInput(format!("θ_{} entries must be one-forms", k)));
                }
            }
            ranks.push(t.rows);
        }
        Ok(ConnectionFamily { nz, ranks, theta })
    }

    /// Chern connection `∂h/h` of a metric on a line bundle in a holomorphic frame.
    pub fn line_bundle_metric(nz: usize, h: &ScalarField) -> Result<Mat<GradedForm>> {
        let layout = Layout::chart(nz);
        let inv = h.recip();
        let mut f = GradedForm::zero(layout);
        for i in 0..nz {
            f = f.add(&GradedForm::term(layout, layout.dz(i), h.derivative(i)?.mul(&inv)))?;
        }
        Ok(Mat::from_fn(1, 1, |_, _| f.clone()))
    }

    pub fn level(&self, k: usize) -> &Mat<GradedForm> {
        &self.theta[k]
    }

    /// True when every `θ_k` is of type `(1, 0)`.
    pub fn is_10(&self) -> bool {
        let zmask = Layout::chart(self.nz).z_mask();
        self.theta.iter().all(|t| t.data.iter().all(|f| f.terms().all(|(m, _)| m & !zmask == 0)))
    }

    pub fn as_endform(&self, k: usize) -> EndForm {
        let t = &self.theta[k];
        EndForm::new(k as i32, k as i32, t.rows, t.cols, t.data.clone()).expect("square matrix")
    }
}

impl ConnectionSource for ConnectionFamily {
    fn nz(&self) -> usize {
        self.nz
    }

    fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    fn theta(&self, pt: &Point, order: u32) -> Result<Vec<FormMat>> {
        let layout = Layout::chart(self.nz);
        let space = JetSpace::get(self.nz, 0, order);
        self.theta
            .iter()
            .map(|t| {
                Mat::try_from_fn(t.rows, t.cols, |i, j| {
                    let f = t.get(i, j);
                    if f.is_zero() {
                        Ok(FormJet::zero(layout, space))
                    } else {
                        f.eval(pt, order)
                    }
                })
            })
            .collect()
    }
}

/// `Θ = dθ + θ∧θ` at a point; the jet order drops by one.
pub fn curvature_jet(theta: &FormMat) -> Result<FormMat> {
    let d = theta.d()?;
    Ok(d.add(&theta.wedge(theta)))
}

/// Symbolic curvature `Θ = dθ + θ∧θ` of a connection matrix on one level.
pub fn curvature(theta: &EndForm) -> Result<EndForm> {
    theta.exterior_d()?.add(&theta.wedge(theta)?)
}
