use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{invalid, KernelError, StepKernel};
use crate::exactnum::{QuadValue, Rational};
use crate::graphs::Graph;

/// `scalar · U_1 ⊗ U_2 ⊗ … ⊗ U_r`, kept as its factors.
///
/// A point `x ∈ [0,1]` is mapped to one block per factor by mixed-radix
/// digits: find the block of `x` in `U_1`, rescale `x` inside that block to
/// `[0,1]`, and continue with `U_2`. This is the same block ordering as
/// [`StepKernel::tensor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LazyTensorKernel {
    factors: Vec<StepKernel>,
    scalar: Rational,
}

impl LazyTensorKernel {
    pub fn new(factors: Vec<StepKernel>, scalar: Rational) -> Result<Self, KernelError> {
        if factors.is_empty() {
            return Err(invalid("tensor kernel needs at least one factor"));
        }
        Ok(LazyTensorKernel { factors, scalar })
    }

    pub fn factors(&self) -> &[StepKernel] {
        &self.factors
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    /// Block index of `x` in every factor. Blocks are half-open
    /// `[a, b)` except the last, which contains 1.
    pub fn digits(&self, x: &Rational) -> Vec<usize> {
        let mut x = x.clone();
        let mut out = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let mut start = Rational::zero();
            let last = f.blocks() - 1;
            let mut idx = last;
            for (b, w) in f.widths().iter().enumerate() {
                if b == last || x < &start + w {
                    idx = b;
                    break;
                }
                start += w;
            }
            x = (&x - &start) / &f.widths()[idx];
            out.push(idx);
        }
        out
    }

    /// Kernel value on the product block with the given per-factor indices.
    pub fn value_at(&self, a: &[usize], b: &[usize]) -> Rational {
        self.factors
            .iter()
            .zip(a.iter().zip(b))
            .fold(self.scalar.clone(), |acc, (f, (&i, &j))| acc * f.value(i, j))
    }

    pub fn lazy_eval(&self, x: &Rational, y: &Rational) -> Rational {
        self.value_at(&self.digits(x), &self.digits(y))
    }

    /// `scalar^{e(H)} Π_i t(H, U_i)`, one factor at a time.
    pub fn lazy_t_hom(&self, h: &Graph) -> Result<QuadValue, KernelError> {
        let mut acc = self.scalar.pow(h.edge_count() as i32);
        for f in &self.factors {
            if acc.is_zero() {
                break;
            }
            acc *= f.t_hom(h)?;
        }
        Ok(QuadValue::from_rational(acc))
    }

    /// The explicit product kernel; its block count is the product of the
    /// factor block counts, so this is only for small cases.
    pub fn materialize(&self, max_blocks: usize) -> Result<StepKernel, KernelError> {
        let blocks = self.factors.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.blocks()));
        match blocks {
            Some(b) if b <= max_blocks => {}
            _ => return Err(invalid("materialized tensor kernel exceeds the block limit")),
        }
        let mut k = StepKernel::constant(Rational::one());
        for f in &self.factors {
            k = k.tensor(f);
        }
        Ok(k.scale(&self.scalar))
    }
}
