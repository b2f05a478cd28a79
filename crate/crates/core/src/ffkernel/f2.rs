//! Sign kernels over `F_2`: `U(x,y) = (-1)^{q(x+y)}` on `F_2^k` for a
//! quadratic form `q(x) = Σ_{i≤j} a_ij x_i x_j`.
//!
//! `t(G, U)` is `2^{-k·v(G)}` times a quadratic exponential sum over
//! `F_2^{k·v(G)}`, which is evaluated exactly by eliminating variables in
//! pairs (never by enumerating the grid).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use super::FfError;
use crate::exactnum::{int, Rational};
use crate::graphs::Graph;
use crate::kernel::StepKernel;

pub const MAX_F2_K: usize = 6;

/// `q(x) = Σ_{i≤j} a_ij x_i x_j` with the coefficients packed in `bits`;
/// bit `n` belongs to the `n`-th pair in the order `(0,0), (0,1), …,
/// (0,k-1), (1,1), (1,2), …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct F2Form {
    k: usize,
    bits: u64,
}

pub fn form_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect()
}

impl F2Form {
    pub fn new(k: usize, bits: u64) -> Result<Self, FfError> {
        if k == 0 || k > MAX_F2_K {
            return Err(FfError::InvalidSpec("F2 form dimension must be in 1..=6"));
        }
        let n = k * (k + 1) / 2;
        if n < 64 && bits >> n != 0 {
            return Err(FfError::InvalidSpec("F2 form has bits beyond its coefficient list"));
        }
        Ok(F2Form { k, bits })
    }

    /// From an explicit coefficient list in pair order.
    pub fn from_coefficients(k: usize, coeffs: &[u8]) -> Result<Self, FfError> {
        if coeffs.len() != k * (k + 1) / 2 || coeffs.iter().any(|&c| c > 1) {
            return Err(FfError::InvalidSpec("F2 form needs k(k+1)/2 coefficients in {0,1}"));
        }
        let bits = coeffs.iter().enumerate().fold(0u64, |acc, (n, &c)| acc | (c as u64) << n);
        Self::new(k, bits)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn coefficients(&self) -> Vec<u8> {
        (0..self.k * (self.k + 1) / 2).map(|n| (self.bits >> n & 1) as u8).collect()
    }

    /// `q(x)` for `x` given as a bit vector.
    pub fn eval(&self, x: u64) -> u8 {
        let mut acc = 0u8;
        for (n, (i, j)) in form_pairs(self.k).into_iter().enumerate() {
            if self.bits >> n & 1 == 1 {
                acc ^= (x >> i & x >> j & 1) as u8;
            }
        }
        acc
    }

    /// `U` as an explicit `±1` step kernel on `2^k` equal blocks.
    pub fn step_kernel(&self) -> StepKernel {
        let n = 1usize << self.k;
        let values = (0..n)
            .map(|x| (0..n).map(|y| if self.eval((x ^ y) as u64) == 0 { int(1) } else { int(-1) }).collect())
            .collect();
        StepKernel::uniform(values).expect("valid kernel")
    }
}

/// `Q(x) = Σ_{i<j} A_ij x_i x_j + Σ_i b_i x_i + c` over `F_2`, on at most 64
/// variables.
struct QuadForm {
    adj: Vec<u64>,
    lin: u64,
    constant: bool,
}

impl QuadForm {
    fn new(n: usize) -> Self {
        QuadForm { adj: vec![0; n], lin: 0, constant: false }
    }

    fn toggle(&mut self, a: usize, b: usize) {
        if a == b {
            self.lin ^= 1 << a;
        } else {
            self.adj[a] ^= 1 << b;
            self.adj[b] ^= 1 << a;
        }
    }

    /// `Σ_x (-1)^{Q(x)}`, as `(sign, log2 |value|)` or `None` for zero.
    fn exp_sum(mut self) -> Option<(i8, u32)> {
        let n = self.adj.len();
        let mut alive: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
        let mut log2 = 0u32;
        while alive != 0 {
            let x = alive.trailing_zeros() as usize;
            alive &= !(1 << x);
            let nx = self.adj[x] & alive;
            let bx = self.lin >> x & 1 == 1;
            for j in bits_of(nx) {
                self.adj[j] &= !(1 << x);
            }
            log2 += 1;
            if nx == 0 {
                // free variable: 1 + (-1)^{b_x}
                if bx {
                    return None;
                }
                continue;
            }
            // Σ_x (-1)^{x·(L + b_x)} = 2·[L = b_x]: solve for y ∈ N(x)
            let y = nx.trailing_zeros() as usize;
            let rest = nx & !(1 << y);
            alive &= !(1 << y);
            let ny = self.adj[y] & alive;
            let by = self.lin >> y & 1 == 1;
            for j in bits_of(ny) {
                self.adj[j] &= !(1 << y);
            }
            // y = b_x + Σ_{t ∈ rest} y_t
            for j in bits_of(ny) {
                if bx {
                    self.lin ^= 1 << j;
                }
                for t in bits_of(rest) {
                    self.toggle(t, j);
                }
            }
            if by {
                self.constant ^= bx;
                self.lin ^= rest;
            }
        }
        Some((if self.constant { -1 } else { 1 }, log2))
    }
}

fn bits_of(mut m: u64) -> impl Iterator<Item = usize> {
    core::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// Exact `t(G, U)` for the sign kernel of `form`.
pub fn t_f2(g: &Graph, form: &F2Form) -> Result<Rational, FfError> {
    if g.has_isolated_vertex() {
        return Err(FfError::IsolatedVertex);
    }
    let k = form.k;
    let nvars = g.order() * k;
    if nvars > 64 {
        return Err(FfError::TooLarge);
    }
    let mut q = QuadForm::new(nvars);
    let pairs = form_pairs(k);
    for (u, v) in g.edges() {
        for (n, &(i, j)) in pairs.iter().enumerate() {
            if form.bits >> n & 1 == 0 {
                continue;
            }
            if i == j {
                // (x_ui + x_vi)² = x_ui + x_vi
                q.toggle(u * k + i, u * k + i);
                q.toggle(v * k + i, v * k + i);
            } else {
                for a in [u, v] {
                    for b in [u, v] {
                        q.toggle(a * k + i, b * k + j);
                    }
                }
            }
        }
    }
    Ok(match q.exp_sum() {
        None => Rational::from_integer(BigInt::from(0)),
        // every elimination step consumes at least one variable
        Some((sign, log2)) => Rational::new(BigInt::from(sign), BigInt::one() << (nvars as u32 - log2)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn k4_form() {
        let form = F2Form::new(2, 0b111).unwrap();
        assert_eq!(t_f2(&Graph::complete(4), &form).unwrap(), rat(-1, 2));
        assert_eq!(t_f2(&Graph::complete(3), &form).unwrap(), rat(1, 4));
        assert_eq!(t_f2(&Graph::cycle(4), &form).unwrap(), rat(1, 4));
    }

    #[test]
    fn matches_block_sum() {
        for bits in 0..64 {
            let form = F2Form::new(3, bits).unwrap();
            let kernel = form.step_kernel();
            for name in ["K3", "C4", "diamond", "K4", "paw", "C5", "P2"] {
                let g = Graph::named(name).unwrap();
                assert_eq!(t_f2(&g, &form).unwrap(), kernel.t_hom(&g).unwrap(), "{bits} {name}");
            }
        }
    }

    #[test]
    fn coefficient_roundtrip() {
        let form = F2Form::from_coefficients(3, &[1, 0, 1, 1, 0, 1]).unwrap();
        assert_eq!(form.coefficients(), vec![1, 0, 1, 1, 0, 1]);
        assert!(F2Form::from_coefficients(2, &[1, 0]).is_err());
        assert!(F2Form::new(7, 0).is_err());
    }
}
