//! Exact block sums `Σ_blocks Π widths · Π pair values`.
//!
//! Widths and values are brought to common denominators so the inner loop
//! runs over integers: `i128` when a crude magnitude bound says it cannot
//! overflow, `BigInt` otherwise.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{KernelError, StepKernel};
use crate::exactnum::Rational;

/// One factor of the integrand: pair `(u, v)` (with `u < v` in pattern
/// order) reads matrix `mat`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairFactor {
    pub u: usize,
    pub v: usize,
    pub mat: usize,
}

fn common_denominator<'a>(xs: impl Iterator<Item = &'a Rational>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn scaled(x: &Rational, den: &BigInt) -> BigInt {
    x.numer() * (den / x.denom())
}

fn bits(x: &BigInt) -> u64 {
    x.bits()
}

struct Plan<T> {
    n: usize,
    weights: Vec<T>,
    mats: Vec<Vec<T>>,
    // for each pattern vertex d: the factors (earlier vertex, matrix)
    back: Vec<Vec<(usize, usize)>>,
}

impl<T> Plan<T>
where
    T: Clone + Zero + One + for<'a> Mul<&'a T, Output = T> + for<'a> Add<&'a T, Output = T>,
{
    fn run(&self) -> T {
        let mut blocks = vec![0usize; self.back.len()];
        let mut acc = T::zero();
        self.dfs(0, &T::one(), &mut blocks, &mut acc);
        acc
    }

    fn dfs(&self, d: usize, prod: &T, blocks: &mut [usize], acc: &mut T) {
        if d == self.back.len() {
            *acc = acc.clone() + prod;
            return;
        }
        'blocks: for b in 0..self.n {
            let mut p = prod.clone() * &self.weights[b];
            if p.is_zero() {
                continue;
            }
            for &(u, mat) in &self.back[d] {
                p = p * &self.mats[mat][blocks[u] * self.n + b];
                if p.is_zero() {
                    continue 'blocks;
                }
            }
            blocks[d] = b;
            self.dfs(d + 1, &p, blocks, acc);
        }
    }
}

/// Sum over assignments of the `order` pattern vertices to blocks of
/// `Π widths · Π_{factors} mats[mat][b_u][b_v]`, all matrices sharing the
/// block partition `widths`.
pub(crate) fn block_sum(
    widths: &[Rational],
    mats: &[&[Vec<Rational>]],
    order: usize,
    factors: &[PairFactor],
    budget: u64,
) -> Result<Rational, KernelError> {
    let n = widths.len();
    let terms = (n as u64).checked_pow(order as u32).unwrap_or(u64::MAX);
    if terms > budget {
        return Err(KernelError::BlockBudgetExceeded { terms, budget });
    }
    let dw = common_denominator(widths.iter());
    let dv = common_denominator(mats.iter().flat_map(|m| m.iter().flatten()));
    let wi: Vec<BigInt> = widths.iter().map(|w| scaled(w, &dw)).collect();
    let mi: Vec<Vec<BigInt>> = mats
        .iter()
        .map(|m| m.iter().flatten().map(|x| scaled(x, &dv)).collect())
        .collect();
    let mut back = vec![Vec::new(); order];
    for f in factors {
        let (a, b) = if f.u < f.v { (f.u, f.v) } else { (f.v, f.u) };
        back[b].push((a, f.mat));
    }
    let max_w = wi.iter().map(bits).max().unwrap_or(0);
    let max_v = mi.iter().flatten().map(bits).max().unwrap_or(0);
    let bound = max_w * order as u64 + max_v * factors.len() as u64 + 64 - terms.leading_zeros() as u64;
    let numer = if bound < 126 {
        let plan = Plan::<i128> {
            n,
            weights: wi.iter().map(|x| x.to_i128().expect("bounded")).collect(),
            mats: mi
                .iter()
                .map(|m| m.iter().map(|x| x.to_i128().expect("bounded")).collect())
                .collect(),
            back,
        };
        BigInt::from(plan.run())
    } else {
        Plan::<BigInt> { n, weights: wi, mats: mi, back }.run()
    };
    let den = dw.pow(order as u32) * dv.pow(factors.len() as u32);
    Ok(Rational::new(numer, den))
}

/// Homomorphism density of a pattern given as an edge list on `order`
/// vertices.
pub(crate) fn hom_density(
    w: &StepKernel,
    order: usize,
    edges: &[(usize, usize)],
    budget: u64,
) -> Result<Rational, KernelError> {
    let factors: Vec<PairFactor> = edges.iter().map(|&(u, v)| PairFactor { u, v, mat: 0 }).collect();
    block_sum(w.widths(), &[w.values()], order, &factors, budget)
}

pub(crate) fn complement_values(w: &StepKernel) -> Vec<Vec<Rational>> {
    w.values()
        .iter()
        .map(|row| row.iter().map(|x| Rational::one() - x).collect())
        .collect()
}
