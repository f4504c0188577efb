//! Basis monomials `dz_I ∧ dz̄_J ∧ dt_K` stored as bitmasks.
//!
//! Bit layout: `dz_1..dz_n` occupy bits `0..n`, `dz̄_1..dz̄_n` bits `n..2n` and
//! `dt_1..dt_p` bits `2n..2n+p`. A mask always denotes the wedge of its
//! one-forms in increasing bit order.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Layout {
    pub nz: usize,
    pub nt: usize,
}

impl Layout {
    pub fn new(nz: usize, nt: usize) -> Layout {
        assert!(2 * nz + nt <= 32, "too many basis one-forms for a u32 mask");
        Layout { nz, nt }
    }

    pub fn chart(nz: usize) -> Layout {
        Layout::new(nz, 0)
    }

    pub fn dz(&self, i: usize) -> u32 {
        debug_assert!(i < self.nz);
        1 << i
    }

    pub fn dzb(&self, i: usize) -> u32 {
        debug_assert!(i < self.nz);
        1 << (self.nz + i)
    }

    pub fn dt(&self, j: usize) -> u32 {
        debug_assert!(j < self.nt);
        1 << (2 * self.nz + j)
    }

    /// Mask of the one-form dual to jet variable `var` (`z_i`, `z̄_i`, `t_j` order).
    pub fn dvar(&self, var: usize) -> u32 {
        1 << var
    }

    pub fn z_mask(&self) -> u32 {
        (1 << self.nz) - 1
    }

    pub fn zb_mask(&self) -> u32 {
        ((1 << self.nz) - 1) << self.nz
    }

    pub fn t_mask(&self) -> u32 {
        ((1u32 << self.nt) - 1) << (2 * self.nz)
    }

    pub fn top_chart(&self) -> u32 {
        self.z_mask() | self.zb_mask()
    }

    /// `(holomorphic, antiholomorphic, simplex)` degrees of a mask.
    pub fn tridegree(&self, m: u32) -> (u32, u32, u32) {
        (
            (m & self.z_mask()).count_ones(),
            (m & self.zb_mask()).count_ones(),
            (m & self.t_mask()).count_ones(),
        )
    }

    pub fn describe(&self, m: u32) -> String {
        if m == 0 {
            return "1".into();
        }
        let mut parts = Vec::new();
        for i in 0..self.nz {
            if m & self.dz(i) != 0 {
                parts.push(format!("dz{}", i + 1));
            }
        }
        for i in 0..self.nz {
            if m & self.dzb(i) != 0 {
                parts.push(format!("dzb{}", i + 1));
            }
        }
        for j in 0..self.nt {
            if m & self.dt(j) != 0 {
                parts.push(format!("dt{}", j + 1));
            }
        }
        parts.join("^")
    }
}

pub fn degree(m: u32) -> u32 {
    m.count_ones()
}

/// Sign of `a ∧ b` relative to the canonical ordering of `a | b`, or `None`
/// when the monomials share a one-form.
pub fn wedge_sign(a: u32, b: u32) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 31 { 0 } else { a >> (j + 1) };
        swaps += above.count_ones();
    }
    Some(if swaps % 2 == 0 { 1.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        let l = Layout::new(2, 1);
        assert_eq!(wedge_sign(l.dz(0), l.dzb(0)), Some(1.0));
        assert_eq!(wedge_sign(l.dzb(0), l.dz(0)), Some(-1.0));
        assert_eq!(wedge_sign(l.dz(0), l.dz(0)), None);
        // (dz1^dz2) ^ dzb1 is canonical; dzb1 ^ (dz1^dz2) needs two swaps
        let a = l.dz(0) | l.dz(1);
        assert_eq!(wedge_sign(l.dzb(0), a), Some(1.0));
        assert_eq!(wedge_sign(l.dt(0), l.dz(1)), Some(-1.0));
    }

    #[test]
    fn graded_commutativity_of_signs() {
        let l = Layout::new(3, 2);
        let full = (1u32 << 8) - 1;
        for a in 0..=full {
            for b in [l.dz(1), l.dzb(2) | l.dt(0), l.dz(0) | l.dzb(1) | l.dt(1)] {
                if let (Some(s1), Some(s2)) = (wedge_sign(a, b), wedge_sign(b, a)) {
                    let k = (degree(a) * degree(b)) % 2;
                    assert_eq!(s1 * s2, if k == 0 { 1.0 } else { -1.0 });
                }
            }
        }
    }
}
