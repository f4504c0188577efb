//! Finite covers of a box domain in `ℂⁿ` by axis-aligned boxes, their nerves
//! and smooth partitions of unity.

use crate::error::{Error, Result};
use crate::forms::scalar::{Point, ScalarField, SmoothFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Closed box `Π [lo_i, hi_i]` in real coordinates `x_1, y_1, x_2, y_2, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxRegion {
    pub bounds: Vec<(f64, f64)>,
}

impl BoxRegion {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<BoxRegion> {
        if bounds.is_empty() || bounds.len() % 2 != 0 {
            return Err(Error::Dimension(format!("a box in ℂⁿ needs 2n intervals, got {}", bounds.len())));
        }
        if bounds.iter().any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidInput(format!("degenerate box {:?}", bounds)));
        }
        Ok(BoxRegion { bounds })
    }

    /// `[-r, r]^{2n}`.
    pub fn cube(n: usize, r: f64) -> BoxRegion {
        BoxRegion { bounds: vec![(-r, r); 2 * n] }
    }

    pub fn nz(&self) -> usize {
        self.bounds.len() / 2
    }

    pub fn contains(&self, pt: &Point) -> bool {
        pt.z.iter().enumerate().all(|(i, z)| {
            let (x, y) = self.bounds[2 * i];
            let (u, v) = self.bounds[2 * i + 1];
            x <= z.re && z.re <= y && u <= z.im && z.im <= v
        })
    }

    pub fn intersect(&self, o: &BoxRegion) -> Option<BoxRegion> {
        let b: Vec<(f64, f64)> = self.bounds.iter().zip(&o.bounds).map(|(a, b)| (a.0.max(b.0), a.1.min(b.1))).collect();
        if b.iter().all(|(l, h)| l < h) {
            Some(BoxRegion { bounds: b })
        } else {
            None
        }
    }

    /// Deterministic sample points inside the box.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let v: Vec<f64> = self.bounds.iter().map(|&(l, h)| rng.gen_range(l..h)).collect();
                Point::chart((0..self.nz()).map(|i| crate::C64::new(v[2 * i], v[2 * i + 1])).collect())
            })
            .collect()
    }
}

/// Real coordinate `k` (`x_1, y_1, x_2, …`) as a field.
fn coordinate(k: usize) -> ScalarField {
    if k % 2 == 0 {
        ScalarField::x(k / 2)
    } else {
        ScalarField::y(k / 2)
    }
}

/// Cover of a box domain with partition of unity `ψ_α` and membership test.
#[derive(Clone, Debug)]
pub struct Cover {
    domain: BoxRegion,
    boxes: Vec<BoxRegion>,
    psi: Vec<ScalarField>,
}

impl Cover {
    /// Bumps `Π Step(lo, lo+m)·Plateau(hi-m, hi)` over edges interior to the
    /// domain, normalized by their sum. `margin` is the taper width.
    pub fn new(domain: BoxRegion, boxes: Vec<BoxRegion>, margin: f64) -> Result<Cover> {
        if boxes.is_empty() {
            return Err(Error::InvalidInput("a cover needs at least one box".into()));
        }
        let dim = domain.bounds.len();
        if boxes.iter().any(|b| b.bounds.len() != dim) {
            return Err(Error::Dimension("boxes and domain live in different ℂⁿ".into()));
        }
        let mut w = Vec::new();
        for b in &boxes {
            let mut f = ScalarField::one();
            for (k, (&(lo, hi), &(dlo, dhi))) in b.bounds.iter().zip(&domain.bounds).enumerate() {
                if lo > dlo {
                    if hi - lo < 2.0 * margin {
                        return Err(Error::InvalidInput(format!("box {:?} is narrower than twice the taper {}", b.bounds, margin)));
                    }
                    f = f.mul(&coordinate(k).smooth(SmoothFn::Step { lo, hi: lo + margin }));
                }
                if hi < dhi {
                    f = f.mul(&coordinate(k).smooth(SmoothFn::Plateau { lo: hi - margin, hi }));
                }
            }
            w.push(f);
        }
        let psi = if w.len() == 1 {
            vec![ScalarField::one()]
        } else {
            let inv = ScalarField::sum(&w).recip();
            w.iter().map(|f| f.mul(&inv)).collect()
        };
        let cover = Cover { domain, boxes, psi };
        cover.check_covers(200, margin)?;
        Ok(cover)
    }

    /// One box equal to the domain.
    pub fn single(domain: BoxRegion) -> Cover {
        Cover { boxes: vec![domain.clone()], domain, psi: vec![ScalarField::one()] }
    }

    /// `𝒰_1 ∩ 𝒰_2` indexed by pairs `(α, β)` with nonempty intersection,
    /// with `ψ_{(α,β)} = ψ_α ψ_β`. Returns the cover and the index pairs.
    pub fn intersection(a: &Cover, b: &Cover) -> Result<(Cover, Vec<(usize, usize)>)> {
        if a.domain != b.domain {
            return Err(Error::InvalidInput("covers of different domains".into()));
        }
        let mut boxes = Vec::new();
        let mut psi = Vec::new();
        let mut pairs = Vec::new();
        for (i, ba) in a.boxes.iter().enumerate() {
            for (j, bb) in b.boxes.iter().enumerate() {
                if let Some(x) = ba.intersect(bb) {
                    boxes.push(x);
                    psi.push(a.psi[i].mul(&b.psi[j]));
                    pairs.push((i, j));
                }
            }
        }
        Ok((Cover { domain: a.domain.clone(), boxes, psi }, pairs))
    }

    /// `𝒰_1 ⊔ 𝒰_2`: the boxes of `a` followed by those of `b`, with
    /// `ψ = ψ^a/2` and `ψ^b/2`.
    pub fn disjoint_union(a: &Cover, b: &Cover) -> Result<Cover> {
        if a.domain != b.domain {
            return Err(Error::InvalidInput("covers of different domains".into()));
        }
        let half = crate::C64::new(0.5, 0.0);
        let mut boxes = a.boxes.clone();
        boxes.extend(b.boxes.iter().cloned());
        let psi = a.psi.iter().chain(&b.psi).map(|f| f.scale(half)).collect();
        Ok(Cover { domain: a.domain.clone(), boxes, psi })
    }

    fn check_covers(&self, count: usize, margin: f64) -> Result<()> {
        for pt in self.domain.sample(count, 17) {
            let inner = self.boxes.iter().any(|b| {
                pt.z.iter().enumerate().all(|(i, z)| {
                    let ok = |k: usize, v: f64| {
                        let (lo, hi) = b.bounds[k];
                        let (dlo, dhi) = self.domain.bounds[k];
                        (lo <= dlo || v >= lo + margin) && (hi >= dhi || v <= hi - margin)
                    };
                    ok(2 * i, z.re) && ok(2 * i + 1, z.im)
                })
            });
            if !inner {
                return Err(Error::InvalidInput(format!(
                    "boxes do not cover the domain (with taper {}) at {}",
                    margin,
                    crate::error::fmt_point(&pt.z)
                )));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &BoxRegion {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn nz(&self) -> usize {
        self.domain.nz()
    }

    pub fn boxes(&self) -> &[BoxRegion] {
        &self.boxes
    }

    pub fn psi(&self, alpha: usize) -> &ScalarField {
        &self.psi[alpha]
    }

    /// Indices `α` with `pt ∈ U_α`.
    pub fn members(&self, pt: &Point) -> Vec<usize> {
        (0..self.boxes.len()).filter(|&a| self.boxes[a].contains(pt)).collect()
    }

    /// Box `U_Δ` of a simplex, if nonempty.
    pub fn simplex_box(&self, simplex: &[usize]) -> Option<BoxRegion> {
        let mut b = self.boxes[simplex[0]].clone();
        for &a in &simplex[1..] {
            b = b.intersect(&self.boxes[a])?;
        }
        Some(b)
    }

    /// Ordered tuples with repetitions, of Čech degree `≤ max_degree`, whose
    /// boxes intersect.
    pub fn nerve(&self, max_degree: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut layer: Vec<Vec<usize>> = (0..self.len()).map(|a| vec![a]).collect();
        for _ in 0..=max_degree {
            out.extend(layer.iter().cloned());
            let mut next = Vec::new();
            for s in &layer {
                for a in 0..self.len() {
                    let mut t = s.clone();
                    t.push(a);
                    if self.simplex_box(&t).is_some() {
                        next.push(t);
                    }
                }
            }
            layer = next;
        }
        out
    }

    /// Default nerve truncation `min(2ℓ, |I| - 1)`: tuples with a repeated
    /// vertex carry no characteristic data.
    pub fn default_max_degree(&self, ell: usize) -> usize {
        (2 * ell).min(self.len().saturating_sub(1))
    }
}
