//! Scalar coefficient fields as immutable expression trees evaluated to jets.

use crate::error::{Error, Result};
use crate::forms::simplex::SimplexRule;
use crate::jet::{Jet, JetSpace, Series};
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

/// A point of `U × Δ_p` together with the regularization parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub z: Vec<C64>,
    pub t: Vec<f64>,
    pub eps: f64,
}

impl Point {
    pub fn chart(z: Vec<C64>) -> Point {
        Point { z, t: Vec::new(), eps: 0.0 }
    }

    pub fn with_t(mut self, t: Vec<f64>) -> Point {
        self.t = t;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Point {
        self.eps = eps;
        self
    }
}

/// Real smooth functions of one real variable used as primitives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmoothFn {
    /// 0 for `u ≤ lo`, 1 for `u ≥ hi`, built from `exp(-1/x)`.
    Step { lo: f64, hi: f64 },
    /// `1 - Step`.
    Plateau { lo: f64, hi: f64 },
    /// `exp(1 - 1/(1-u))` for `u < 1`, 0 otherwise; equals 1 at `u = 0`.
    Bump,
}

fn h_series(x: f64, order: usize) -> Series {
    if x <= 0.0 {
        return Series::constant(0.0, order);
    }
    Series::var(x, order).recip().scale(-1.0).exp()
}

impl SmoothFn {
    /// Taylor coefficients `f^{(k)}(u)/k!` for `k ≤ order`.
    pub fn series(&self, u: f64, order: usize) -> Series {
        match *self {
            SmoothFn::Step { lo, hi } => {
                let x = (u - lo) / (hi - lo);
                if x <= 0.0 {
                    return Series::constant(0.0, order);
                }
                if x >= 1.0 {
                    return Series::constant(1.0, order);
                }
                let a = h_series(x, order);
                let b = h_series(1.0 - x, order);
                // b is a function of 1 - x: flip odd coefficients
                let b = Series(b.0.iter().enumerate().map(|(k, v)| if k % 2 == 1 { -v } else { *v }).collect());
                let s = a.mul(&a.add(&b).recip());
                let scale = 1.0 / (hi - lo);
                Series(s.0.iter().enumerate().map(|(k, v)| v * scale.powi(k as i32)).collect())
            }
            SmoothFn::Plateau { lo, hi } => {
                let s = SmoothFn::Step { lo, hi }.series(u, order);
                s.scale(-1.0).add_const(1.0)
            }
            SmoothFn::Bump => {
                if u >= 1.0 {
                    return Series::constant(0.0, order);
                }
                let one_minus = Series::var(u, order).scale(-1.0).add_const(1.0);
                one_minus.recip().scale(-1.0).add_const(1.0).exp()
            }
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.series(u, 0).0[0]
    }
}

#[derive(Debug)]
pub enum Expr {
    Const(C64),
    Z(usize),
    Zb(usize),
    T(usize),
    Eps,
    Add(Vec<Arc<Expr>>),
    Mul(Vec<Arc<Expr>>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, u32),
    Recip(Arc<Expr>),
    Exp(Arc<Expr>),
    Conj(Arc<Expr>),
    Re(Arc<Expr>),
    Im(Arc<Expr>),
    Smooth(SmoothFn, Arc<Expr>),
    /// Derivative with respect to jet variable `var` (`z_i`, `z̄_i`, `t_j` order).
    Deriv(Arc<Expr>, usize),
    /// `∫_{Δ_p} body dt_1…dt_p`, leaving a function of the chart point.
    SimplexIntegral { body: Arc<Expr>, rule: Arc<SimplexRule> },
}

impl Expr {
    fn eval(&self, pt: &Point, space: &'static JetSpace) -> Result<Jet> {
        Ok(match self {
            Expr::Const(c) => Jet::constant(space, *c),
            Expr::Z(i) => Jet::var(space, space.z_var(*i), pt.z[*i]),
            Expr::Zb(i) => Jet::var(space, space.zbar_var(*i), pt.z[*i].conj()),
            Expr::T(j) => {
                if space.nt() <= *j || pt.t.len() <= *j {
                    return Err(Error::Dimension(format!("simplex coordinate t{} not available", j + 1)));
                }
                Jet::var(space, space.t_var(*j), C64::new(pt.t[*j], 0.0))
            }
            Expr::Eps => Jet::constant(space, C64::new(pt.eps, 0.0)),
            Expr::Add(v) => {
                let mut acc = Jet::zero(space);
                for e in v {
                    acc.add_assign(&e.eval(pt, space)?);
                }
                acc
            }
            Expr::Mul(v) => {
                let mut acc = Jet::constant(space, C64::new(1.0, 0.0));
                for e in v {
                    acc = acc.mul(&e.eval(pt, space)?);
                }
                acc
            }
            Expr::Neg(e) => e.eval(pt, space)?.neg(),
            Expr::Pow(e, k) => {
                let b = e.eval(pt, space)?;
                let mut acc = Jet::constant(space, C64::new(1.0, 0.0));
                for _ in 0..*k {
                    acc = acc.mul(&b);
                }
                acc
            }
            Expr::Recip(e) => {
                let v = e.eval(pt, space)?;
                v.recip().ok_or_else(|| Error::SingularPoint {
                    point: crate::error::fmt_point(&pt.z),
                    reason: format!("reciprocal of vanishing expression {}", e),
                })?
            }
            Expr::Exp(e) => e.eval(pt, space)?.exp(),
            Expr::Conj(e) => e.eval(pt, space)?.conj(),
            Expr::Re(e) => e.eval(pt, space)?.re(),
            Expr::Im(e) => e.eval(pt, space)?.im(),
            Expr::Smooth(f, e) => {
                let v = e.eval(pt, space)?;
                let s = f.series(v.value().re, space.order() as usize);
                v.compose(&s.to_complex())
            }
            Expr::Deriv(e, var) => {
                let up = JetSpace::get(space.nz(), space.nt(), space.order() + 1);
                let v = e.eval(pt, up)?;
                v.deriv(*var).expect("order raised before differentiating")
            }
            Expr::SimplexIntegral { body, rule } => {
                let p = rule.dim();
                let inner = JetSpace::get(space.nz(), p, space.order());
                let mut acc = Jet::zero(space);
                for (t, w) in rule.nodes() {
                    let q = Point { z: pt.z.clone(), t: t.to_vec(), eps: pt.eps };
                    let v = body.eval(&q, inner)?.drop_t();
                    let v = if space.nt() > 0 { v.with_t_vars(space.nt()) } else { v };
                    acc.axpy(C64::new(w, 0.0), &v);
                }
                acc
            }
        })
    }

    /// Derivative depth consumed by the expression.
    fn depth(&self) -> u32 {
        match self {
            Expr::Deriv(e, _) => 1 + e.depth(),
            Expr::Add(v) | Expr::Mul(v) => v.iter().map(|e| e.depth()).max().unwrap_or(0),
            Expr::Neg(e)
            | Expr::Pow(e, _)
            | Expr::Recip(e)
            | Expr::Exp(e)
            | Expr::Conj(e)
            | Expr::Re(e)
            | Expr::Im(e)
            | Expr::Smooth(_, e) => e.depth(),
            Expr::SimplexIntegral { body, .. } => body.depth(),
            _ => 0,
        }
    }

    fn is_const_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.re == 0.0 && c.im == 0.0)
    }

    fn uses(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.uses(pred)),
            Expr::Neg(e)
            | Expr::Pow(e, _)
            | Expr::Recip(e)
            | Expr::Exp(e)
            | Expr::Conj(e)
            | Expr::Re(e)
            | Expr::Im(e)
            | Expr::Smooth(_, e)
            | Expr::Deriv(e, _) => e.uses(pred),
            Expr::SimplexIntegral { body, .. } => body.uses(pred),
            _ => false,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, v: &[Arc<Expr>], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, e) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, "{}", sep)?;
                }
                write!(f, "{}", e)?;
            }
            write!(f, ")")
        };
        match self {
            Expr::Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Expr::Const(c) => write!(f, "({}{:+}*i)", c.re, c.im),
            Expr::Z(i) => write!(f, "z{}", i + 1),
            Expr::Zb(i) => write!(f, "zb{}", i + 1),
            Expr::T(j) => write!(f, "t{}", j + 1),
            Expr::Eps => write!(f, "eps"),
            Expr::Add(v) => list(f, v, " + "),
            Expr::Mul(v) => list(f, v, "*"),
            Expr::Neg(e) => write!(f, "-({})", e),
            Expr::Pow(e, k) => write!(f, "({})^{}", e, k),
            Expr::Recip(e) => write!(f, "1/({})", e),
            Expr::Exp(e) => write!(f, "exp({})", e),
            Expr::Conj(e) => write!(f, "conj({})", e),
            Expr::Re(e) => write!(f, "re({})", e),
            Expr::Im(e) => write!(f, "im({})", e),
            Expr::Smooth(s, e) => write!(f, "{:?}({})", s, e),
            Expr::Deriv(e, v) => write!(f, "D[{}]({})", v, e),
            Expr::SimplexIntegral { body, rule } => write!(f, "int_simplex{}({})", rule.dim(), body),
        }
    }
}

/// Default derivative depth supported by freshly built fields.
pub const DEFAULT_MAX_ORDER: u32 = 8;

/// Immutable complex-valued coefficient function on `U × Δ_p`.
#[derive(Clone, Debug)]
pub struct ScalarField {
    expr: Arc<Expr>,
    max_order: u32,
}

impl ScalarField {
    pub fn from_expr(expr: Expr) -> ScalarField {
        ScalarField { expr: Arc::new(expr), max_order: DEFAULT_MAX_ORDER }
    }

    fn wrap(expr: Arc<Expr>, max_order: u32) -> ScalarField {
        ScalarField { expr, max_order }
    }

    pub fn with_max_order(mut self, max_order: u32) -> ScalarField {
        self.max_order = max_order;
        self
    }

    pub fn expr(&self) -> &Arc<Expr> {
        &self.expr
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn constant(c: C64) -> ScalarField {
        ScalarField::from_expr(Expr::Const(c))
    }

    pub fn real(c: f64) -> ScalarField {
        ScalarField::constant(C64::new(c, 0.0))
    }

    pub fn zero() -> ScalarField {
        ScalarField::real(0.0)
    }

    pub fn one() -> ScalarField {
        ScalarField::real(1.0)
    }

    pub fn z(i: usize) -> ScalarField {
        ScalarField::from_expr(Expr::Z(i))
    }

    pub fn zb(i: usize) -> ScalarField {
        ScalarField::from_expr(Expr::Zb(i))
    }

    pub fn t(j: usize) -> ScalarField {
        ScalarField::from_expr(Expr::T(j))
    }

    pub fn eps() -> ScalarField {
        ScalarField::from_expr(Expr::Eps)
    }

    /// Real coordinate `x_i = re z_i`.
    pub fn x(i: usize) -> ScalarField {
        ScalarField::from_expr(Expr::Re(Arc::new(Expr::Z(i))))
    }

    /// Real coordinate `y_i = im z_i`.
    pub fn y(i: usize) -> ScalarField {
        ScalarField::from_expr(Expr::Im(Arc::new(Expr::Z(i))))
    }

    pub fn is_const_zero(&self) -> bool {
        self.expr.is_const_zero()
    }

    pub fn add(&self, o: &ScalarField) -> ScalarField {
        if self.is_const_zero() {
            return o.clone();
        }
        if o.is_const_zero() {
            return self.clone();
        }
        ScalarField::wrap(
            Arc::new(Expr::Add(vec![self.expr.clone(), o.expr.clone()])),
            self.max_order.min(o.max_order),
        )
    }

    pub fn sum(fields: &[ScalarField]) -> ScalarField {
        let kept: Vec<&ScalarField> = fields.iter().filter(|f| !f.is_const_zero()).collect();
        match kept.len() {
            0 => ScalarField::zero(),
            1 => kept[0].clone(),
            _ => ScalarField::wrap(
                Arc::new(Expr::Add(kept.iter().map(|f| f.expr.clone()).collect())),
                kept.iter().map(|f| f.max_order).min().unwrap_or(DEFAULT_MAX_ORDER),
            ),
        }
    }

    pub fn sub(&self, o: &ScalarField) -> ScalarField {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> ScalarField {
        if self.is_const_zero() {
            return self.clone();
        }
        ScalarField::wrap(Arc::new(Expr::Neg(self.expr.clone())), self.max_order)
    }

    pub fn mul(&self, o: &ScalarField) -> ScalarField {
        if self.is_const_zero() || o.is_const_zero() {
            return ScalarField::zero();
        }
        ScalarField::wrap(
            Arc::new(Expr::Mul(vec![self.expr.clone(), o.expr.clone()])),
            self.max_order.min(o.max_order),
        )
    }

    pub fn scale(&self, c: C64) -> ScalarField {
        ScalarField::constant(c).mul(self)
    }

    pub fn pow(&self, k: u32) -> ScalarField {
        ScalarField::wrap(Arc::new(Expr::Pow(self.expr.clone(), k)), self.max_order)
    }

    pub fn recip(&self) -> ScalarField {
        ScalarField::wrap(Arc::new(Expr::Recip(self.expr.clone())), self.max_order)
    }

    pub fn exp(&self) -> ScalarField {
        ScalarField::wrap(Arc::new(Expr::Exp(self.expr.clone())), self.max_order)
    }

    pub fn conj(&self) -> ScalarField {
        ScalarField::wrap(Arc::new(Expr::Conj(self.expr.clone())), self.max_order)
    }

    pub fn re(&self) -> ScalarField {
        ScalarField::wrap(Arc::new(Expr::Re(self.expr.clone())), self.max_order)
    }

    pub fn im(&self) -> ScalarField {
        ScalarField::wrap(Arc::new(Expr::Im(self.expr.clone())), self.max_order)
    }

    pub fn smooth(&self, f: SmoothFn) -> ScalarField {
        ScalarField::wrap(Arc::new(Expr::Smooth(f, self.expr.clone())), self.max_order)
    }

    /// `|self|²`
    pub fn abs2(&self) -> ScalarField {
        self.mul(&self.conj())
    }

    /// Partial derivative with respect to jet variable `var`.
    pub fn derivative(&self, var: usize) -> Result<ScalarField> {
        if self.max_order == 0 {
            return Err(Error::DerivativeOrderExhausted { coefficient: self.to_string() });
        }
        if self.is_const_zero() {
            return Ok(self.clone());
        }
        Ok(ScalarField::wrap(Arc::new(Expr::Deriv(self.expr.clone(), var)), self.max_order - 1))
    }

    pub(crate) fn simplex_integral(&self, rule: Arc<SimplexRule>) -> ScalarField {
        ScalarField::wrap(Arc::new(Expr::SimplexIntegral { body: self.expr.clone(), rule }), self.max_order)
    }

    /// Jet of the field at `pt` with derivatives up to `order`, in the
    /// variables `z, z̄` and `t_1..t_{pt.t.len()}`.
    pub fn eval(&self, pt: &Point, order: u32) -> Result<Jet> {
        self.eval_in(pt, JetSpace::get(pt.z.len(), pt.t.len(), order))
    }

    pub fn eval_in(&self, pt: &Point, space: &'static JetSpace) -> Result<Jet> {
        if space.order() > self.max_order {
            return Err(Error::DerivativeOrderExhausted { coefficient: self.to_string() });
        }
        self.expr.eval(pt, space)
    }

    pub fn value(&self, pt: &Point) -> Result<C64> {
        Ok(self.eval(pt, 0)?.value())
    }

    /// Derivative depth already consumed by `Deriv` nodes.
    pub fn consumed_order(&self) -> u32 {
        self.expr.depth()
    }

    /// True when no conjugate, real or imaginary part occurs.
    pub fn is_holomorphic_polynomial_syntax(&self) -> bool {
        !self.expr.uses(&|e| {
            matches!(
                e,
                Expr::Zb(_) | Expr::Conj(_) | Expr::Re(_) | Expr::Im(_) | Expr::Smooth(..) | Expr::Exp(_) | Expr::Recip(_)
            )
        })
    }

    pub fn uses_t(&self) -> bool {
        self.expr.uses(&|e| matches!(e, Expr::T(_)))
    }

    pub fn max_z_index(&self) -> Option<usize> {
        let mut m: Option<usize> = None;
        fn walk(e: &Expr, m: &mut Option<usize>) {
            match e {
                Expr::Z(i) | Expr::Zb(i) => *m = Some(m.map_or(*i, |x: usize| x.max(*i))),
                Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|x| walk(x, m)),
                Expr::Neg(x)
                | Expr::Pow(x, _)
                | Expr::Recip(x)
                | Expr::Exp(x)
                | Expr::Conj(x)
                | Expr::Re(x)
                | Expr::Im(x)
                | Expr::Smooth(_, x)
                | Expr::Deriv(x, _) => walk(x, m),
                Expr::SimplexIntegral { body, .. } => walk(body, m),
                _ => {}
            }
        }
        walk(&self.expr, &mut m);
        m
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

/// Rectangular complex interval used to bound polynomial fields over boxes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CInterval {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

fn imul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let p = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    (
        p.iter().copied().fold(f64::INFINITY, f64::min),
        p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

fn isqr(a: (f64, f64)) -> (f64, f64) {
    if a.0 >= 0.0 {
        (a.0 * a.0, a.1 * a.1)
    } else if a.1 <= 0.0 {
        (a.1 * a.1, a.0 * a.0)
    } else {
        (0.0, (a.0 * a.0).max(a.1 * a.1))
    }
}

impl CInterval {
    pub fn point(c: C64) -> CInterval {
        CInterval { re: (c.re, c.re), im: (c.im, c.im) }
    }

    pub fn add(&self, o: &CInterval) -> CInterval {
        CInterval { re: (self.re.0 + o.re.0, self.re.1 + o.re.1), im: (self.im.0 + o.im.0, self.im.1 + o.im.1) }
    }

    pub fn neg(&self) -> CInterval {
        CInterval { re: (-self.re.1, -self.re.0), im: (-self.im.1, -self.im.0) }
    }

    pub fn conj(&self) -> CInterval {
        CInterval { re: self.re, im: (-self.im.1, -self.im.0) }
    }

    pub fn mul(&self, o: &CInterval) -> CInterval {
        let rr = imul(self.re, o.re);
        let ii = imul(self.im, o.im);
        let ri = imul(self.re, o.im);
        let ir = imul(self.im, o.re);
        CInterval { re: (rr.0 - ii.1, rr.1 - ii.0), im: (ri.0 + ir.0, ri.1 + ir.1) }
    }

    /// Bounds of `|c|²` over the interval.
    pub fn abs2(&self) -> (f64, f64) {
        let a = isqr(self.re);
        let b = isqr(self.im);
        (a.0 + b.0, a.1 + b.1)
    }
}

impl ScalarField {
    /// Interval enclosure over the box `re z_i ∈ re[i]`, `im z_i ∈ im[i]`.
    /// Only polynomial expressions (with conjugates) are supported.
    pub fn interval(&self, re: &[(f64, f64)], im: &[(f64, f64)]) -> Option<CInterval> {
        fn go(e: &Expr, re: &[(f64, f64)], im: &[(f64, f64)]) -> Option<CInterval> {
            Some(match e {
                Expr::Const(c) => CInterval::point(*c),
                Expr::Z(i) => CInterval { re: re[*i], im: im[*i] },
                Expr::Zb(i) => CInterval { re: re[*i], im: im[*i] }.conj(),
                Expr::Add(v) => {
                    let mut acc = CInterval::point(C64::new(0.0, 0.0));
                    for x in v {
                        acc = acc.add(&go(x, re, im)?);
                    }
                    acc
                }
                Expr::Mul(v) => {
                    let mut acc = CInterval::point(C64::new(1.0, 0.0));
                    for x in v {
                        acc = acc.mul(&go(x, re, im)?);
                    }
                    acc
                }
                Expr::Neg(x) => go(x, re, im)?.neg(),
                Expr::Conj(x) => go(x, re, im)?.conj(),
                Expr::Pow(x, k) => {
                    let b = go(x, re, im)?;
                    let mut acc = CInterval::point(C64::new(1.0, 0.0));
                    for _ in 0..*k {
                        acc = acc.mul(&b);
                    }
                    acc
                }
                _ => return None,
            })
        }
        go(&self.expr, re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(z: &[(f64, f64)]) -> Point {
        Point::chart(z.iter().map(|&(a, b)| C64::new(a, b)).collect())
    }

    #[test]
    fn polynomial_partials_are_exact() {
        // f = z1^3 zb2 + 2 z2
        let f = ScalarField::z(0).pow(3).mul(&ScalarField::zb(1)).add(&ScalarField::z(1).scale(C64::new(2.0, 0.0)));
        let p = pt(&[(0.3, -0.2), (0.1, 0.7)]);
        let j = f.eval(&p, 3).unwrap();
        let z1 = p.z[0];
        let z2 = p.z[1];
        assert!((j.value() - (z1.powi(3) * z2.conj() + 2.0 * z2)).norm() < 1e-15);
        assert!((j.partial(&[1, 0, 0, 0]) - 3.0 * z1 * z1 * z2.conj()).norm() < 1e-15);
        assert!((j.partial(&[0, 1, 0, 0]) - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((j.partial(&[2, 0, 0, 1]) - 6.0 * z1).norm() < 1e-15);
    }

    #[test]
    fn derivative_nodes_match_jet_coefficients() {
        let f = ScalarField::z(0).mul(&ScalarField::zb(0)).exp();
        let d = f.derivative(1).unwrap();
        let p = pt(&[(0.4, 0.1)]);
        let direct = f.eval(&p, 2).unwrap().deriv(1).unwrap();
        let via = d.eval(&p, 1).unwrap();
        for (a, b) in direct.coeffs().iter().zip(via.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn order_exhaustion_names_the_coefficient() {
        let f = ScalarField::z(0).with_max_order(1);
        let d = f.derivative(0).unwrap();
        match d.derivative(0) {
            Err(Error::DerivativeOrderExhausted { coefficient }) => assert!(coefficient.contains("z1")),
            other => panic!("expected exhaustion, got {:?}", other),
        }
    }

    #[test]
    fn step_series_matches_finite_differences() {
        let s = SmoothFn::Step { lo: 0.5, hi: 2.0 };
        let u = 1.1;
        let ser = s.series(u, 2);
        let h = 1e-5;
        let fd1 = (s.value(u + h) - s.value(u - h)) / (2.0 * h);
        let fd2 = (s.value(u + h) - 2.0 * s.value(u) + s.value(u - h)) / (h * h);
        assert!((ser.0[1] - fd1).abs() < 1e-7);
        assert!((2.0 * ser.0[2] - fd2).abs() < 1e-4);
        assert_eq!(s.value(0.4), 0.0);
        assert_eq!(s.value(2.5), 1.0);
        assert!((s.value(1.25) - 0.5).abs() < 1e-15 || s.value(1.25) > 0.0);
    }

    #[test]
    fn bump_is_one_at_center_and_flat_outside() {
        assert_eq!(SmoothFn::Bump.value(0.0), 1.0);
        assert_eq!(SmoothFn::Bump.series(1.2, 3).0, vec![0.0; 4]);
    }

    #[test]
    fn interval_encloses_samples() {
        let s = ScalarField::z(0).mul(&ScalarField::z(1)).add(&ScalarField::zb(0));
        let re = [(0.1, 0.3), (-0.2, 0.4)];
        let im = [(-0.1, 0.2), (0.0, 0.5)];
        let iv = s.interval(&re, &im).unwrap();
        for k in 0..50 {
            let a = re[0].0 + (re[0].1 - re[0].0) * ((k * 7 % 11) as f64 / 10.0);
            let b = im[0].0 + (im[0].1 - im[0].0) * ((k * 3 % 7) as f64 / 6.0);
            let c = re[1].0 + (re[1].1 - re[1].0) * ((k * 5 % 13) as f64 / 12.0);
            let d = im[1].0 + (im[1].1 - im[1].0) * ((k % 5) as f64 / 4.0);
            let v = s.value(&pt(&[(a, b), (c, d)])).unwrap();
            assert!(v.re >= iv.re.0 - 1e-15 && v.re <= iv.re.1 + 1e-15);
            assert!(v.im >= iv.im.0 - 1e-15 && v.im <= iv.im.1 + 1e-15);
        }
    }
}
