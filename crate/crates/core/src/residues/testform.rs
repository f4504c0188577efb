//! Compactly supported test forms: a plateau bump times a polynomial form factor.

use crate::error::{Error, Result};
use crate::forms::graded::GradedForm;
use crate::forms::mono::Layout;
use crate::forms::pointwise::FormJet;
use crate::forms::scalar::{Point, ScalarField, SmoothFn};
use crate::C64;

#[derive(Clone, Debug)]
pub struct TestForm {
    center: Vec<C64>,
    inner: f64,
    radius: f64,
    form: GradedForm,
    /// Real box `[(lo, hi)]` over `x_1, y_1, x_2, …` containing the support.
    support: Vec<(f64, f64)>,
}

/// `Σ |z_i - c_i|²`.
fn dist2(center: &[C64]) -> ScalarField {
    let terms: Vec<ScalarField> =
        center.iter().enumerate().map(|(i, c)| ScalarField::z(i).sub(&ScalarField::constant(*c)).abs2()).collect();
    ScalarField::sum(&terms)
}

impl TestForm {
    /// Bump equal to 1 on `|z - c| ≤ radius/2` and 0 beyond `radius`.
    pub fn bump(center: Vec<C64>, radius: f64) -> Result<TestForm> {
        TestForm::plateau(center, radius / 2.0, radius)
    }

    /// Bump equal to 1 on `|z - c| ≤ inner` and 0 beyond `radius`.
    pub fn plateau(center: Vec<C64>, inner: f64, radius: f64) -> Result<TestForm> {
        if center.is_empty() {
            return Err(Error::InvalidInput("test form on ℂ^0".into()));
        }
        if !(inner > 0.0 && radius > inner) {
            return Err(Error::InvalidInput(format!("test form radii need 0 < inner < radius, got {} and {}", inner, radius)));
        }
        let n = center.len();
        let field = dist2(&center).smooth(SmoothFn::Plateau { lo: inner * inner, hi: radius * radius });
        let support = center.iter().flat_map(|c| [(c.re - radius, c.re + radius), (c.im - radius, c.im + radius)]).collect();
        Ok(TestForm { center, inner, radius, form: GradedForm::scalar(Layout::chart(n), field), support })
    }

    /// Multiply by a form factor, e.g. [`TestForm::area_form`].
    pub fn with_factor(mut self, factor: &GradedForm) -> Result<TestForm> {
        self.form = self.form.wedge(factor)?;
        Ok(self)
    }

    /// Multiply by a scalar field; the support box is kept.
    pub fn mul_scalar(mut self, g: &ScalarField) -> TestForm {
        self.form = self.form.mul_scalar(g);
        self
    }

    /// `(i/2) dz_i ∧ dz̄_i`, the area form of the `i`-th coordinate line.
    pub fn area_form(nz: usize, i: usize) -> GradedForm {
        let l = Layout::chart(nz);
        GradedForm::term(l, l.dz(i) | l.dzb(i), ScalarField::constant(C64::new(0.0, 0.5)))
    }

    /// `dφ`, with the same support box.
    pub fn d(&self) -> Result<TestForm> {
        Ok(TestForm { form: self.form.exterior_d()?, ..self.clone() })
    }

    pub fn nz(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[C64] {
        &self.center
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.inner, self.radius)
    }

    pub fn form(&self) -> &GradedForm {
        &self.form
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    /// Total form degree, or `None` for the zero form or mixed degrees.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.form.terms().map(|(m, _)| m.count_ones());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn eval(&self, pt: &Point, order: u32) -> Result<FormJet> {
        self.form.eval(pt, order)
    }

    /// Value at a point of a degree-0 test form.
    pub fn value_at(&self, z: &[C64]) -> Result<C64> {
        let pt = Point::chart(z.to_vec());
        Ok(self.eval(&pt, 0)?.value_at(0))
    }

    /// True when `|z - c| ≥ radius` on the whole real box.
    pub fn vanishes_on(&self, bx: &[(f64, f64)]) -> bool {
        let mut d2 = 0.0;
        for (i, c) in self.center.iter().enumerate() {
            for (k, cc) in [c.re, c.im].into_iter().enumerate() {
                let (lo, hi) = bx[2 * i + k];
                let gap = if cc < lo { lo - cc } else if cc > hi { cc - hi } else { 0.0 };
                d2 += gap * gap;
            }
        }
        d2 >= self.radius * self.radius
    }
}
