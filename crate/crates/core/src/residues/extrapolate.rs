//! ε-ladders and the fit `P(ε) ≈ P_0 + c ε^a`.

use crate::error::{Error, Result};
use crate::residues::quadrature::QuadConfig;
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsLadder {
    eps: Vec<f64>,
    pub quad: QuadConfig,
}

impl Default for EpsLadder {
    fn default() -> Self {
        EpsLadder::geometric(1e-1, 1e-3, 10f64.sqrt()).expect("valid default ladder")
    }
}

impl EpsLadder {
    pub fn new(eps: Vec<f64>) -> Result<EpsLadder> {
        if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidInput(format!("ε ladder must be positive and finite, got {:?}", eps)));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput(format!("ε ladder must be strictly decreasing, got {:?}", eps)));
        }
        Ok(EpsLadder { eps, quad: QuadConfig::default() })
    }

    /// `hi, hi/ratio, …` down to `lo` (inclusive up to rounding).
    pub fn geometric(hi: f64, lo: f64, ratio: f64) -> Result<EpsLadder> {
        if !(ratio > 1.0 && hi > lo && lo > 0.0) {
            return Err(Error::InvalidInput(format!("geometric ladder needs hi > lo > 0 and ratio > 1, got {} {} {}", hi, lo, ratio)));
        }
        let steps = ((hi / lo).ln() / ratio.ln() + 1e-9).floor() as i32;
        EpsLadder::new((0..=steps).map(|k| hi / ratio.powi(k)).collect())
    }

    pub fn with_quad(mut self, quad: QuadConfig) -> EpsLadder {
        self.quad = quad;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.eps
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Constant,
    PowerLaw,
    /// Ill-conditioned fit: last value with the last difference as error.
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurrentEstimate {
    pub eps: Vec<f64>,
    pub pairings: Vec<C64>,
    pub quad_errors: Vec<f64>,
    pub limit: C64,
    /// Fitted decay exponent `a`.
    pub exponent: Option<f64>,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Largest quadrature error estimate over the ladder.
    pub quad_error: f64,
    /// Error bar of `limit`.
    pub error: f64,
    pub method: FitMethod,
    pub flagged: bool,
}

impl CurrentEstimate {
    /// `|limit_a - limit_b|` against the sum of both error bars.
    pub fn agrees_with(&self, o: &CurrentEstimate) -> bool {
        (self.limit - o.limit).norm() <= self.error + o.error
    }
}

/// Least squares `P_0 + c ε^a` for fixed `a`; returns `(P_0, c, rms)`.
fn fit_fixed(eps: &[f64], p: &[C64], a: f64) -> Option<(C64, C64, f64)> {
    let m = eps.len() as f64;
    let x: Vec<f64> = eps.iter().map(|e| e.powf(a)).collect();
    let (sx, sxx) = (x.iter().sum::<f64>(), x.iter().map(|v| v * v).sum::<f64>());
    let sp: C64 = p.iter().sum();
    let sxp: C64 = x.iter().zip(p).map(|(v, q)| q * *v).sum();
    let det = m * sxx - sx * sx;
    if !(det > 1e-14 * m * sxx) {
        return None;
    }
    let c = (sxp * m - sp * sx) / det;
    let p0 = (sp - c * sx) / m;
    let rms = (x.iter().zip(p).map(|(v, q)| (q - p0 - c * *v).norm_sqr()).sum::<f64>() / m).sqrt();
    Some((p0, c, rms))
}

const A_MIN: f64 = 0.05;
const A_MAX: f64 = 4.0;

/// Fit the ladder and report the `ε → 0` limit. Needs at least 4 points.
pub fn extrapolate(eps: &[f64], pairings: &[C64], quad_errors: &[f64]) -> Result<CurrentEstimate> {
    if eps.len() != pairings.len() || eps.len() != quad_errors.len() {
        return Err(Error::Dimension("ladder, pairings and errors differ in length".into()));
    }
    if eps.len() < 4 {
        return Err(Error::InvalidInput(format!("extrapolation needs at least 4 ladder points, got {}", eps.len())));
    }
    let n = eps.len();
    let last = pairings[n - 1];
    let quad_error = quad_errors.iter().copied().fold(0.0, f64::max);
    let scale = 1.0 + pairings.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let spread = pairings.iter().map(|p| (p - last).norm()).fold(0.0, f64::max);
    let mut est = CurrentEstimate {
        eps: eps.to_vec(),
        pairings: pairings.to_vec(),
        quad_errors: quad_errors.to_vec(),
        limit: last,
        exponent: None,
        residual: 0.0,
        quad_error,
        error: quad_error,
        method: FitMethod::Constant,
        flagged: false,
    };
    if spread <= 1e-12 * scale || spread <= quad_error {
        est.error = quad_error + spread;
        return Ok(est);
    }
    // a ladder whose successive differences change sign beyond the noise is suspect
    let diffs: Vec<C64> = pairings.windows(2).map(|w| w[1] - w[0]).collect();
    let noise = 2.0 * quad_error + 1e-12 * scale;
    let oscillating = diffs.windows(2).any(|w| {
        let s = w[0].re * w[1].re + w[0].im * w[1].im;
        s < 0.0 && w[0].norm() > noise && w[1].norm() > noise
    });
    // coarse scan, then golden-section refinement of the exponent
    let cost = |a: f64| fit_fixed(eps, pairings, a).map(|f| f.2).unwrap_or(f64::INFINITY);
    let grid: Vec<f64> = (0..=395).map(|k| A_MIN + 0.01 * k as f64).collect();
    let best = grid.iter().copied().min_by(|a, b| cost(*a).total_cmp(&cost(*b))).expect("nonempty grid");
    let (mut lo, mut hi) = ((best - 0.01).max(A_MIN), (best + 0.01).min(A_MAX));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if cost(x1) < cost(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let a = 0.5 * (lo + hi);
    let fallback = |mut est: CurrentEstimate| {
        est.method = FitMethod::Fallback;
        est.limit = last;
        est.error = quad_error + (pairings[n - 1] - pairings[n - 2]).norm();
        if oscillating {
            est.flagged = true;
            est.error = est.error.max(spread);
        }
        est
    };
    let Some((p0, c, rms)) = fit_fixed(eps, pairings, a) else {
        return Ok(fallback(est));
    };
    if a <= A_MIN + 1e-3 || a >= A_MAX - 1e-3 || !p0.re.is_finite() || !p0.im.is_finite() {
        return Ok(fallback(est));
    }
    est.method = FitMethod::PowerLaw;
    est.limit = p0;
    est.exponent = Some(a);
    est.residual = rms;
    // the jump past the last rung is only trusted to a tenth
    let jump = (p0 - last).norm();
    est.error = quad_error + 3.0 * rms + 0.1 * jump;
    if oscillating || rms > 0.05 * spread || jump > 10.0 * (c.norm() * eps[n - 1].powf(a) + est.error) {
        est.flagged = true;
        est.error = est.error.max(spread);
    }
    Ok(est)
}
