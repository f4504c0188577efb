//! Complexes `0 → E_N → … → E_1 → E_0` of trivial bundles with polynomial maps.

use crate::error::{Error, Result};
use crate::forms::parse::{parse_polynomial, ParseOptions};
use crate::forms::pointwise::{JetMat, Mat};
use crate::forms::scalar::{Point, ScalarField};
use crate::jet::JetSpace;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Symbolic matrix of coefficient fields.
pub type FieldMat = Mat<ScalarField>;

impl FieldMat {
    pub fn parse(rows: &[Vec<String>], opts: ParseOptions) -> Result<FieldMat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Mat::try_from_fn(r, c, |i, j| parse_polynomial(&rows[i][j], opts))
    }

    pub fn eval(&self, pt: &Point, space: &'static JetSpace) -> Result<JetMat> {
        Mat::try_from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval_in(pt, space))
    }

    pub fn values(&self, pt: &Point) -> Result<nalgebra::DMatrix<C64>> {
        let m = self.eval(pt, JetSpace::get(pt.z.len(), 0, 0))?;
        Ok(m.values())
    }

    pub fn identity_fields(n: usize) -> FieldMat {
        Mat::from_fn(n, n, |i, j| if i == j { ScalarField::one() } else { ScalarField::zero() })
    }

    pub fn zero_fields(rows: usize, cols: usize) -> FieldMat {
        Mat::from_fn(rows, cols, |_, _| ScalarField::zero())
    }

    pub fn mul_fields(&self, o: &FieldMat) -> FieldMat {
        assert_eq!(self.cols, o.rows);
        Mat::from_fn(self.rows, o.cols, |i, j| {
            ScalarField::sum(&(0..self.cols).map(|k| self.get(i, k).mul(o.get(k, j))).collect::<Vec<_>>())
        })
    }

    /// All `k × k` minors, in lexicographic order of (rows, cols).
    pub fn minors(&self, k: usize) -> Vec<ScalarField> {
        let rs = subsets(self.rows, k);
        let cs = subsets(self.cols, k);
        let mut out = Vec::new();
        for r in &rs {
            for c in &cs {
                out.push(det_fields(&Mat::from_fn(k, k, |i, j| self.get(r[i], c[j]).clone())));
            }
        }
        out
    }
}

/// `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Laplace expansion along the first row.
fn det_fields(m: &FieldMat) -> ScalarField {
    let n = m.rows;
    if n == 0 {
        return ScalarField::one();
    }
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut terms = Vec::new();
    for j in 0..n {
        let minor = Mat::from_fn(n - 1, n - 1, |r, c| m.get(r + 1, if c < j { c } else { c + 1 }).clone());
        let t = m.get(0, j).mul(&det_fields(&minor));
        terms.push(if j % 2 == 0 { t } else { t.neg() });
    }
    ScalarField::sum(&terms)
}

/// Deterministic sample points in the box `[-r, r]^{2n}`.
pub fn sample_points(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Point::chart((0..n).map(|_| C64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))).collect()))
        .collect()
}

/// Numerical rank of a matrix from its singular values.
pub fn numerical_rank(m: &nalgebra::DMatrix<C64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// A complex of trivial bundles `E_k = ℂ^{r_k}` with holomorphic polynomial
/// maps `φ_k: E_k → E_{k-1}` and optional Hermitian metrics.
#[derive(Clone, Debug)]
pub struct BundleComplex {
    n: usize,
    ranks: Vec<usize>,
    phi: Vec<FieldMat>,
    metrics: Vec<Option<FieldMat>>,
    foliation: bool,
    generic_rank: Vec<usize>,
}

impl BundleComplex {
    /// `ranks[k] = r_k` for `k = 0..=N`; `phi[k-1] = φ_k` of shape `r_{k-1} × r_k`.
    pub fn new(n: usize, ranks: Vec<usize>, phi: Vec<FieldMat>) -> Result<BundleComplex> {
        if ranks.is_empty() || phi.len() + 1 != ranks.len() {
            return Err(Error::Dimension(format!("{} levels need {} maps, got {}", ranks.len(), ranks.len().saturating_sub(1), phi.len())));
        }
        for (k, p) in phi.iter().enumerate() {
            if p.shape() != (ranks[k], ranks[k + 1]) {
                return Err(Error::Dimension(format!(
                    "φ_{} has shape {:?}, expected {}x{}",
                    k + 1,
                    p.shape(),
                    ranks[k],
                    ranks[k + 1]
                )));
            }
            for f in &p.data {
                if !f.is_holomorphic_polynomial_syntax() {
                    return Err(Error::InvalidInput(format!("φ_{} entry {} is not a holomorphic polynomial", k + 1, f)));
                }
                if f.max_z_index().is_some_and(|i| i >= n) {
                    return Err(Error::InvalidInput(format!("φ_{} entry {} uses a variable beyond z{}", k + 1, f, n)));
                }
            }
        }
        let mut c = BundleComplex {
            n,
            metrics: vec![None; ranks.len()],
            ranks,
            phi,
            foliation: false,
            generic_rank: Vec::new(),
        };
        c.generic_rank = c.compute_generic_ranks()?;
        c.check_is_complex(100, 1e-10)?;
        Ok(c)
    }

    /// Koszul complex of `(z_1, …, z_n)`, resolving `𝒪/(z_1,…,z_n)`.
    pub fn koszul(n: usize) -> BundleComplex {
        let ranks: Vec<usize> = (0..=n).map(|k| subsets(n, k).len()).collect();
        let mut phi = Vec::new();
        for k in 1..=n {
            let src = subsets(n, k);
            let tgt = subsets(n, k - 1);
            let m = Mat::from_fn(tgt.len(), src.len(), |i, j| {
                let s = &src[j];
                let t = &tgt[i];
                // e_S ↦ Σ_pos (-1)^pos z_{S[pos]} e_{S∖S[pos]}
                for (pos, &v) in s.iter().enumerate() {
                    let mut rest = s.clone();
                    rest.remove(pos);
                    if &rest == t {
                        let z = ScalarField::z(v);
                        return if pos % 2 == 0 { z } else { z.neg() };
                    }
                }
                ScalarField::zero()
            });
            phi.push(m);
        }
        BundleComplex::new(n, ranks, phi).expect("Koszul complex is well formed")
    }

    /// Foliation presentation: `E_0 = TM` in the frame `∂/∂z_i`, `E_1` spanned by the
    /// generators (columns of `φ_1`), optional further syzygies.
    pub fn foliation(n: usize, phi: Vec<FieldMat>) -> Result<BundleComplex> {
        if phi.first().map(|p| p.rows) != Some(n) {
            return Err(Error::InvalidInput(format!("foliation mode needs E_0 = TM of rank {}", n)));
        }
        let mut ranks = vec![n];
        for p in &phi {
            ranks.push(p.cols);
        }
        let mut c = BundleComplex::new(n, ranks, phi)?;
        c.foliation = true;
        Ok(c)
    }

    /// Single vector field `v = Σ v_i ∂/∂z_i`: `0 → 𝒪 →v→ TM`.
    pub fn vector_field(v: Vec<ScalarField>) -> Result<BundleComplex> {
        let n = v.len();
        let m = Mat::from_fn(n, 1, |i, _| v[i].clone());
        BundleComplex::foliation(n, vec![m])
    }

    pub fn with_metric(mut self, level: usize, h: FieldMat) -> Result<BundleComplex> {
        if level >= self.ranks.len() || h.shape() != (self.ranks[level], self.ranks[level]) {
            return Err(Error::Dimension(format!("metric of shape {:?} on level {}", h.shape(), level)));
        }
        for pt in sample_points(self.n, 20, 1.0, 11) {
            let v = h.values(&pt)?;
            let herm = (&v - v.adjoint()).norm();
            if herm > 1e-10 * (1.0 + v.norm()) {
                return Err(Error::InvalidInput(format!("metric on level {} is not Hermitian", level)));
            }
            let eig = nalgebra::DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| (v[(i, j)] + v[(j, i)].conj()) * 0.5)
                .symmetric_eigenvalues();
            if eig.iter().any(|&e| e <= 0.0) {
                return Err(Error::InvalidInput(format!("metric on level {} is not positive definite", level)));
            }
        }
        self.metrics[level] = Some(h);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length `N`.
    pub fn len(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn is_foliation(&self) -> bool {
        self.foliation
    }

    /// `φ_k` for `k = 1..=N`.
    pub fn phi(&self, k: usize) -> &FieldMat {
        &self.phi[k - 1]
    }

    pub fn maps(&self) -> &[FieldMat] {
        &self.phi
    }

    pub fn metric(&self, level: usize) -> Option<&FieldMat> {
        self.metrics[level].as_ref()
    }

    /// Generic rank `ρ_k` of `φ_k`.
    pub fn generic_rank(&self, k: usize) -> usize {
        self.generic_rank[k - 1]
    }

    fn compute_generic_ranks(&self) -> Result<Vec<usize>> {
        let pts = sample_points(self.n, 5, 1.0, 7);
        let mut out = Vec::new();
        for p in &self.phi {
            let mut best = 0;
            for pt in &pts {
                best = best.max(numerical_rank(&p.values(pt)?, 1e-9));
            }
            out.push(best);
        }
        Ok(out)
    }

    fn check_is_complex(&self, count: usize, tol: f64) -> Result<()> {
        for k in 1..self.phi.len() {
            for pt in sample_points(self.n, count, 1.5, 13 + k as u64) {
                let a = self.phi[k - 1].values(&pt)?;
                let b = self.phi[k].values(&pt)?;
                let prod = &a * &b;
                let scale = 1.0 + a.norm() * b.norm();
                if prod.norm() > tol * scale {
                    return Err(Error::InvalidInput(format!("φ_{}∘φ_{} does not vanish at {}", k, k + 1, crate::error::fmt_point(&pt.z))));
                }
            }
        }
        Ok(())
    }

    pub fn eval_maps(&self, pt: &Point, space: &'static JetSpace) -> Result<Vec<JetMat>> {
        self.phi.iter().map(|p| p.eval(pt, space)).collect()
    }

    pub fn eval_metric(&self, level: usize, pt: &Point, space: &'static JetSpace) -> Result<Option<JetMat>> {
        match &self.metrics[level] {
            Some(h) => Ok(Some(h.eval(pt, space)?)),
            None => Ok(None),
        }
    }

    /// Exactness of the complex at levels `≥ 1` at a point (ranks add up).
    pub fn is_pointwise_exact(&self, pt: &Point) -> Result<bool> {
        let mut rk = Vec::new();
        for p in &self.phi {
            rk.push(numerical_rank(&p.values(pt)?, 1e-9));
        }
        for k in 1..=self.len() {
            let next = if k < self.len() { rk[k] } else { 0 };
            if rk[k - 1] + next != self.ranks[k] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Direct sum with an elementary sequence: for each `(k, r)` a block
    /// `ℂ^r →id→ ℂ^r` from level `k` to level `k-1` is appended.
    pub fn padded(&self, pads: &[(usize, usize)]) -> Result<BundleComplex> {
        let mut ranks = self.ranks.clone();
        let top = pads.iter().map(|&(k, _)| k).max().unwrap_or(0);
        if ranks.len() <= top {
            ranks.resize(top + 1, 0);
        }
        for &(k, _) in pads {
            if k == 0 {
                return Err(Error::InvalidInput("an elementary block needs levels k ≥ 1 and k-1".into()));
            }
        }
        // block offsets per level: original entries first, then pads in order
        let mut offset: Vec<usize> = ranks.clone();
        let mut blocks = Vec::new();
        for &(k, r) in pads {
            blocks.push((k, r, offset[k], offset[k - 1]));
            offset[k] += r;
            offset[k - 1] += r;
        }
        let new_ranks = offset;
        let mut phi = Vec::new();
        for k in 1..new_ranks.len() {
            let mut m = FieldMat::zero_fields(new_ranks[k - 1], new_ranks[k]);
            if k <= self.phi.len() {
                let p = &self.phi[k - 1];
                for i in 0..p.rows {
                    for j in 0..p.cols {
                        m.set(i, j, p.get(i, j).clone());
                    }
                }
            }
            for &(bk, r, src, tgt) in &blocks {
                if bk == k {
                    for i in 0..r {
                        m.set(tgt + i, src + i, ScalarField::one());
                    }
                }
            }
            phi.push(m);
        }
        let mut c = BundleComplex::new(self.n, new_ranks.clone(), phi)?;
        c.foliation = self.foliation;
        for (lvl, h) in self.metrics.iter().enumerate() {
            if let Some(h) = h {
                let mut big = FieldMat::identity_fields(new_ranks[lvl]);
                for i in 0..h.rows {
                    for j in 0..h.cols {
                        big.set(i, j, h.get(i, j).clone());
                    }
                }
                c.metrics[lvl] = Some(big);
            }
        }
        Ok(c)
    }
}
