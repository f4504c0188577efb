//! Grundmann–Möller cubature on the standard simplex
//! `Δ_p = {t_1, …, t_p ≥ 0, Σ t_j ≤ 1}` (with `t_0 = 1 - Σ t_j`).

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexRule {
    dim: usize,
    degree: usize,
    nodes: Vec<(Vec<f64>, f64)>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

impl SimplexRule {
    /// Rule on `Δ_dim` exact for polynomials of total degree `≤ degree`
    /// (rounded up to the next odd degree).
    pub fn grundmann_moller(dim: usize, degree: usize) -> SimplexRule {
        if dim == 0 {
            return SimplexRule { dim, degree, nodes: vec![(Vec::new(), 1.0)] };
        }
        let s = degree / 2;
        let mut nodes = Vec::new();
        for i in 0..=s {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let denom = (dim + 2 * s + 1 - 2 * i) as f64;
            let w = sign * 2f64.powi(-2 * s as i32) * denom.powi(2 * s as i32 + 1)
                / (factorial(i) * factorial(dim + 2 * s + 1 - i));
            let mut betas = Vec::new();
            compositions(s - i, dim + 1, &mut Vec::new(), &mut betas);
            for beta in betas {
                // barycentric coordinates; drop t_0
                let t: Vec<f64> = beta[1..].iter().map(|&b| (2 * b + 1) as f64 / denom).collect();
                nodes.push((t, w));
            }
        }
        SimplexRule { dim, degree: 2 * s + 1, nodes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.iter().map(|(t, w)| (t.as_slice(), *w))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes.iter().map(|(t, w)| w * f(t)).sum()
    }
}

/// Exact `∫_{Δ_p} t_0^{a_0} ⋯ t_p^{a_p} = a_0!⋯a_p! / (p + Σa)!`.
pub fn monomial_integral(alpha: &[usize]) -> f64 {
    let p = alpha.len() - 1;
    let num: f64 = alpha.iter().map(|&a| factorial(a)).product();
    num / factorial(p + alpha.iter().sum::<usize>())
}

/// Uniform sample on `Δ_p` from `p` uniform numbers in `[0,1)` (sorted-gaps construction).
pub fn sample_simplex(u: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = u.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut t = Vec::with_capacity(u.len());
    let mut prev = 0.0;
    for x in v {
        t.push(x - prev);
        prev = x;
    }
    t
}
