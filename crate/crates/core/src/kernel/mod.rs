//! Step kernels on `[0,1]²` and their density functionals.
//!
//! A [`StepKernel`] is constant on the blocks `I_i × I_j` of a partition of
//! `[0,1]` into consecutive intervals of rational length. Densities are
//! exact block sums whose cost is `blocks^{v(H)}`; calls exceeding the term
//! budget fail instead of running for hours.

mod density;
mod lazy;

pub use lazy::LazyTensorKernel;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::exactnum::{int, rat, Rational};
use crate::graphs::Graph;
use density::{block_sum, complement_values, hom_density, PairFactor};

/// Default cap on the number of block assignments summed by one call.
pub const DEFAULT_TERM_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("block sum needs {terms} terms, over the budget of {budget}")]
    BlockBudgetExceeded { terms: u64, budget: u64 },
    #[error("pattern graph has an isolated vertex")]
    IsolatedVertex,
    #[error("invalid kernel: {0}")]
    Invalid(String),
}

fn invalid(why: &str) -> KernelError {
    KernelError::Invalid(why.into())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepKernel {
    widths: Vec<Rational>,
    values: Vec<Vec<Rational>>,
}

impl StepKernel {
    pub fn new(widths: Vec<Rational>, values: Vec<Vec<Rational>>) -> Result<Self, KernelError> {
        let n = widths.len();
        if n == 0 {
            return Err(invalid("no blocks"));
        }
        if widths.iter().any(|w| !w.is_positive()) {
            return Err(invalid("block widths must be positive"));
        }
        if widths.iter().sum::<Rational>() != Rational::one() {
            return Err(invalid("block widths must sum to 1"));
        }
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(invalid("value matrix does not match the block count"));
        }
        for i in 0..n {
            for j in 0..i {
                if values[i][j] != values[j][i] {
                    return Err(invalid("value matrix is not symmetric"));
                }
            }
        }
        Ok(StepKernel { widths, values })
    }

    /// `n` equal blocks.
    pub fn uniform(values: Vec<Vec<Rational>>) -> Result<Self, KernelError> {
        let n = values.len() as i64;
        Self::new(vec![rat(1, n.max(1)); n as usize], values)
    }

    pub fn constant(p: Rational) -> Self {
        StepKernel { widths: vec![Rational::one()], values: vec![vec![p]] }
    }

    /// `f(x) f(y)` for the step function `f` with the given block widths
    /// and values.
    pub fn rank_one(widths: Vec<Rational>, f: &[Rational]) -> Result<Self, KernelError> {
        let values = f.iter().map(|a| f.iter().map(|b| a * b).collect()).collect();
        Self::new(widths, values)
    }

    pub fn blocks(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[Rational] {
        &self.widths
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &Rational {
        &self.values[i][j]
    }

    /// Splits block `i` into two consecutive blocks of relative sizes
    /// `frac` and `1 - frac`, leaving the kernel (as a function) unchanged.
    pub fn split_block(&self, i: usize, frac: &Rational) -> Result<Self, KernelError> {
        if i >= self.blocks() || !frac.is_positive() || *frac >= Rational::one() {
            return Err(invalid("split needs a valid block and 0 < frac < 1"));
        }
        let map: Vec<usize> = (0..=self.blocks()).map(|b| if b <= i { b } else { b - 1 }).collect();
        let mut widths = Vec::with_capacity(self.blocks() + 1);
        for (b, w) in self.widths.iter().enumerate() {
            if b == i {
                widths.push(w * frac);
                widths.push(w * (Rational::one() - frac));
            } else {
                widths.push(w.clone());
            }
        }
        let values = map
            .iter()
            .map(|&a| map.iter().map(|&b| self.values[a][b].clone()).collect())
            .collect();
        Ok(StepKernel { widths, values })
    }

    /// Re-expresses both kernels on their common refinement.
    fn refine_pair(&self, other: &Self) -> (Vec<Rational>, Vec<usize>, Vec<usize>) {
        let (mut i, mut j) = (0, 0);
        let mut left_a = self.widths[0].clone();
        let mut left_b = other.widths[0].clone();
        let (mut widths, mut ia, mut ib) = (Vec::new(), Vec::new(), Vec::new());
        loop {
            let step = if left_a < left_b { left_a.clone() } else { left_b.clone() };
            widths.push(step.clone());
            ia.push(i);
            ib.push(j);
            left_a -= &step;
            left_b -= &step;
            if left_a.is_zero() {
                i += 1;
                if i < self.blocks() {
                    left_a = self.widths[i].clone();
                }
            }
            if left_b.is_zero() {
                j += 1;
                if j < other.blocks() {
                    left_b = other.widths[j].clone();
                }
            }
            if i == self.blocks() || j == other.blocks() {
                return (widths, ia, ib);
            }
        }
    }

    /// Pointwise sum, on the common refinement of the two partitions.
    pub fn add(&self, other: &Self) -> Self {
        let (widths, ia, ib) = self.refine_pair(other);
        let n = widths.len();
        let values = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| &self.values[ia[r]][ia[c]] + &other.values[ib[r]][ib[c]])
                    .collect()
            })
            .collect();
        StepKernel { widths, values }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        StepKernel {
            widths: self.widths.clone(),
            values: self.values.iter().map(|r| r.iter().map(|x| x * c).collect()).collect(),
        }
    }

    /// Tensor product: block `(i, j)` has index `i·|other| + j`, width
    /// `w_i w'_j` and value `u(i,k) w'(j,l)` against block `(k, l)`.
    pub fn tensor(&self, other: &Self) -> Self {
        let nb = other.blocks();
        let n = self.blocks() * nb;
        let widths = (0..n).map(|a| &self.widths[a / nb] * &other.widths[a % nb]).collect();
        let values = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| &self.values[a / nb][b / nb] * &other.values[a % nb][b % nb])
                    .collect()
            })
            .collect();
        StepKernel { widths, values }
    }

    /// `t(H, W)`; see [`StepKernel::t_hom_with_budget`].
    pub fn t_hom(&self, h: &Graph) -> Result<Rational, KernelError> {
        self.t_hom_with_budget(h, DEFAULT_TERM_BUDGET)
    }

    /// Homomorphism density `∫ Π_{uv ∈ E(H)} W(x_u, x_v)`.
    pub fn t_hom_with_budget(&self, h: &Graph, budget: u64) -> Result<Rational, KernelError> {
        if h.has_isolated_vertex() {
            return Err(KernelError::IsolatedVertex);
        }
        hom_density(self, h.order(), &h.edges(), budget)
    }

    /// Induced density `∫ Π_{E(F)} W · Π_{non-edges} (1 - W)`.
    pub fn rho_induced(&self, f: &Graph) -> Result<Rational, KernelError> {
        self.rho_induced_with_budget(f, DEFAULT_TERM_BUDGET)
    }

    pub fn rho_induced_with_budget(&self, f: &Graph, budget: u64) -> Result<Rational, KernelError> {
        let m = f.order();
        let mut factors = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for v in 1..m {
            for u in 0..v {
                factors.push(PairFactor { u, v, mat: usize::from(!f.has_edge(u, v)) });
            }
        }
        let comp = complement_values(self);
        block_sum(&self.widths, &[&self.values, &comp], m, &factors, budget)
    }

    pub fn edge_density(&self) -> Rational {
        let mut acc = Rational::zero();
        for (i, wi) in self.widths.iter().enumerate() {
            for (j, wj) in self.widths.iter().enumerate() {
                acc += wi * wj * &self.values[i][j];
            }
        }
        acc
    }

    /// Every block row integrates to zero.
    pub fn is_balanced(&self) -> bool {
        self.values.iter().all(|row| {
            row.iter().zip(&self.widths).map(|(v, w)| v * w).sum::<Rational>().is_zero()
        })
    }

    pub fn range_check(&self, lo: &Rational, hi: &Rational) -> bool {
        self.values.iter().flatten().all(|v| lo <= v && v <= hi)
    }

    pub fn max_abs(&self) -> Rational {
        self.values.iter().flatten().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
    }
}

/// The zero-row-sum kernel on three equal blocks with values
/// `[[2,-1,-1],[-1,1,0],[-1,0,1]]`.
pub fn delta3x3() -> StepKernel {
    let v = |r: [i64; 3]| r.iter().map(|&x| int(x)).collect::<Vec<_>>();
    StepKernel::uniform(vec![v([2, -1, -1]), v([-1, 1, 0]), v([-1, 0, 1])]).expect("valid kernel")
}

/// `B(x,y) = f(x) f(y)` with `f = 1` on `[0,1/3]` and `-1/2` on `(1/3,1]`.
/// It is balanced and `t(H, B) = Π_v ∫ f^{deg v}`.
pub fn balanced_b() -> StepKernel {
    StepKernel::rank_one(vec![rat(1, 3), rat(2, 3)], &[int(1), rat(-1, 2)]).expect("valid kernel")
}

/// `∫ f^d` for the function `f` defining [`balanced_b`].
pub fn balanced_b_moment(d: usize) -> Rational {
    rat(1, 3) + rat(2, 3) * rat(-1, 2).pow(d as i32)
}

/// `t(H, B) = Π_v ∫ f^{deg v}` without a block sum.
pub fn t_balanced_b(h: &Graph) -> Rational {
    (0..h.order()).map(|v| balanced_b_moment(h.degree(v))).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_triangle_density() {
        let d = delta3x3();
        assert_eq!(d.t_hom(&Graph::complete(3)).unwrap(), rat(28, 27));
        assert!(d.is_balanced());
    }

    #[test]
    fn b_values() {
        let b = balanced_b();
        assert!(b.is_balanced());
        assert_eq!(b.t_hom(&Graph::complete(3)).unwrap(), rat(1, 8));
        assert_eq!(b.t_hom(&Graph::cycle(4)).unwrap(), rat(1, 16));
        for name in ["K3", "C4", "diamond", "K4", "C5", "paw"] {
            let h = Graph::named(name).unwrap();
            assert_eq!(b.t_hom(&h).unwrap(), t_balanced_b(&h), "{name}");
        }
    }

    #[test]
    fn constants() {
        let w = StepKernel::constant(rat(1, 2));
        assert_eq!(w.edge_density(), rat(1, 2));
        assert_eq!(w.rho_induced(&Graph::complete(3)).unwrap(), rat(1, 8));
        assert_eq!(w.rho_induced(&Graph::cycle(5)).unwrap(), rat(1, 1024));
        let p = rat(2, 7);
        assert_eq!(StepKernel::constant(p.clone()).t_hom(&Graph::complete(3)).unwrap(), p.pow(3));
        assert!(StepKernel::constant(Rational::zero()).values()[0][0].is_zero());
    }

    #[test]
    fn isolated_vertex_rejected() {
        let h = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(delta3x3().t_hom(&h), Err(KernelError::IsolatedVertex));
    }

    #[test]
    fn budget_enforced() {
        let e = delta3x3().t_hom_with_budget(&Graph::complete(3), 26);
        assert!(matches!(e, Err(KernelError::BlockBudgetExceeded { terms: 27, .. })));
    }

    #[test]
    fn add_refines() {
        let a = StepKernel::new(vec![rat(1, 2), rat(1, 2)], vec![vec![int(1), int(0)], vec![int(0), int(1)]])
            .unwrap();
        let b = delta3x3();
        let s = a.add(&b);
        assert_eq!(s.blocks(), 4);
        assert_eq!(s.edge_density(), a.edge_density() + b.edge_density());
    }

    #[test]
    fn invalid_kernels() {
        assert!(StepKernel::new(vec![rat(1, 2)], vec![vec![int(1)]]).is_err());
        assert!(StepKernel::new(
            vec![rat(1, 2), rat(1, 2)],
            vec![vec![int(1), int(2)], vec![int(3), int(1)]]
        )
        .is_err());
    }
}
