//! Quadratic-form kernels over `F_p`, `p` odd:
//! `U(x,y) = cos(2π q(x+y)/p)` on `F_p^k`, `q(x) = s·Σ x_i²`.
//!
//! For each sign vector `σ ∈ {±1}^{E(G)}` let `M^σ = Σ_e σ_e E_e` where
//! `E_e` is the all-ones block on the endpoints of `e`. Diagonalizing
//! `M^σ` by congruence to `diag(d_1..d_r, 0..)` gives
//!
//! `2^{e(G)} t(G,U) = Σ_σ Π_{j≤r} (g(d_j s; p)/p)^k`,
//!
//! and `g(μ;p) = (μ/p)·g(1;p)` with `g(1;p) = √p` (`p ≡ 1 mod 4`) or `i√p`
//! (`p ≡ 3 mod 4`). Each summand depends on `σ` only through the rank `r`
//! and the sign `Π_j (d_j s / p)`, so one pass over the sign vectors
//! yields a [`FpProfile`] that evaluates `t(G, U)` for every `k`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use super::{legendre, mod_inv, FfError};
use crate::exactnum::{rat, QuadValue, Rational};
use crate::graphs::Graph;
use crate::kernel::{StepKernel, DEFAULT_TERM_BUDGET};

/// Largest `v(G)` and `e(G)` accepted by the sign-vector loop.
pub const MAX_FF_ORDER: usize = 9;
pub const MAX_FF_EDGES: usize = 21;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpKernelSpec {
    pub z: u64,
    pub p: u64,
    pub k: u32,
    pub s: u64,
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&s| legendre(s as i64, p) == -1).expect("odd primes have nonresidues")
}

impl FpKernelSpec {
    pub fn new(z: u64, p: u64, k: u32, s: u64) -> Result<Self, FfError> {
        if !is_prime(p) || p == 2 {
            return Err(FfError::NotOddPrime(p));
        }
        if z < 5 || z.is_multiple_of(2) || !(z - 2).is_multiple_of(p) {
            return Err(FfError::InvalidSpec("need odd z >= 5 with p | z-2"));
        }
        if k == 0 {
            return Err(FfError::InvalidSpec("k must be positive"));
        }
        if legendre(s as i64, p) != -1 {
            return Err(FfError::InvalidSpec("s must be a quadratic nonresidue mod p"));
        }
        Ok(FpKernelSpec { z, p, k, s })
    }

    pub fn with_k(&self, k: u32) -> Self {
        FpKernelSpec { k, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatFp {
    p: u64,
    entries: Vec<Vec<u64>>,
}

impl SymMatFp {
    pub fn new(p: u64, entries: Vec<Vec<u64>>) -> Result<Self, FfError> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(FfError::InvalidSpec("matrix must be square"));
        }
        let entries: Vec<Vec<u64>> = entries.into_iter().map(|r| r.into_iter().map(|x| x % p).collect()).collect();
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(FfError::InvalidSpec("matrix must be symmetric"));
                }
            }
        }
        Ok(SymMatFp { p, entries })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        SymMatFp {
            p,
            entries: self.entries.iter().map(|r| r.iter().map(|&x| (p - x) % p).collect()).collect(),
        }
    }
}

/// `M^σ_G`: `σ_{uv}` off the diagonal on edges, `Σ_{e ∋ v} σ_e` on the
/// diagonal, reduced mod `p`. `sigma` follows `G.edges()` order.
pub fn build_m(g: &Graph, sigma: &[i8], p: u64) -> Result<SymMatFp, FfError> {
    let edges = g.edges();
    if sigma.len() != edges.len() {
        return Err(FfError::SignLength { expected: edges.len(), got: sigma.len() });
    }
    let n = g.order();
    let mut m = vec![vec![0u64; n]; n];
    for (&(u, v), &s) in edges.iter().zip(sigma) {
        let x = if s > 0 { 1 } else { p - 1 };
        for (a, b) in [(u, u), (u, v), (v, u), (v, v)] {
            m[a][b] = (m[a][b] + x) % p;
        }
    }
    Ok(SymMatFp { p, entries: m })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    /// Lowest available index first.
    First,
    /// Highest available index first.
    Last,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagResult {
    /// Invertible change of basis with `Cᵀ M C = diag(d)`.
    pub c: Vec<Vec<u64>>,
    /// Diagonal entries: the `rank` nonzero ones first, then zeros.
    pub d: Vec<u64>,
    pub rank: usize,
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).fold(0, |acc, t| (acc + a[i][t] * b[t][j]) % p)).collect())
        .collect()
}

fn transpose(a: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// Symmetric Gaussian elimination. When every remaining diagonal entry is
/// zero but some `a_ij ≠ 0`, adding row/column `j` to row/column `i` makes
/// the new diagonal entry `2 a_ij ≠ 0` (odd characteristic).
/// The result is checked by recomputing `Cᵀ M C`.
pub fn congruence_diagonalize_with(m: &SymMatFp, order: PivotOrder) -> Result<DiagResult, FfError> {
    let p = m.p;
    if p == 2 {
        return Err(FfError::NotOddPrime(2));
    }
    let n = m.order();
    let mut a = m.entries.clone();
    let mut c: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    fn pick<T: Copy>(cands: &[T], order: PivotOrder) -> Option<T> {
        match order {
            PivotOrder::First => cands.first().copied(),
            PivotOrder::Last => cands.last().copied(),
        }
    }
    let mut rank = 0;
    for k in 0..n {
        let diag: Vec<usize> = (k..n).filter(|&i| a[i][i] != 0).collect();
        let mut piv = pick(&diag, order);
        if piv.is_none() {
            let pairs: Vec<(usize, usize)> = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && a[i][j] != 0)
                .collect();
            let Some((i, j)) = pick(&pairs, order) else { break };
            // column/row i += column/row j
            for r in 0..n {
                a[r][i] = (a[r][i] + a[r][j]) % p;
            }
            for t in 0..n {
                a[i][t] = (a[i][t] + a[j][t]) % p;
                c[t][i] = (c[t][i] + c[t][j]) % p;
            }
            piv = Some(i);
        }
        let i = piv.expect("pivot found");
        // move the pivot to position k
        a.swap(i, k);
        for row in a.iter_mut() {
            row.swap(i, k);
        }
        for row in c.iter_mut() {
            row.swap(i, k);
        }
        let inv = mod_inv(a[k][k], p);
        for r in k + 1..n {
            if a[r][k] == 0 {
                continue;
            }
            let f = a[r][k] * inv % p;
            // column r -= f·column k, then row r -= f·row k
            for t in 0..n {
                a[t][r] = (a[t][r] + (p - f) * a[t][k]) % p;
                c[t][r] = (c[t][r] + (p - f) * c[t][k]) % p;
            }
            for t in 0..n {
                a[r][t] = (a[r][t] + (p - f) * a[k][t]) % p;
            }
        }
        rank += 1;
    }
    let d: Vec<u64> = (0..n).map(|i| a[i][i]).collect();
    let check = mat_mul(&mat_mul(&transpose(&c), &m.entries, p), &c, p);
    let diag_ok = (0..n).all(|i| (0..n).all(|j| check[i][j] == if i == j { d[i] } else { 0 }));
    if !diag_ok || d[..rank].contains(&0) || d[rank..].iter().any(|&x| x != 0) {
        return Err(FfError::DiagonalizationCheck);
    }
    Ok(DiagResult { c, d, rank })
}

pub fn congruence_diagonalize(m: &SymMatFp) -> Result<DiagResult, FfError> {
    congruence_diagonalize_with(m, PivotOrder::First)
}

/// For a rank-one `M`, the decomposition `M = d·v vᵀ` with `v` scaled so
/// its first nonzero entry is 1; `d` is returned as the representative in
/// `(-p/2, p/2)`.
pub fn rank_one_normal_form(m: &SymMatFp) -> Option<(i64, Vec<u64>)> {
    let p = m.p;
    let n = m.order();
    let i = (0..n).find(|&i| m.entries[i][i] != 0)?;
    let d = m.entries[i][i];
    let inv = mod_inv(d, p);
    let v: Vec<u64> = (0..n).map(|j| m.entries[i][j] * inv % p).collect();
    let ok = (0..n).all(|a| (0..n).all(|b| m.entries[a][b] == d * v[a] % p * v[b] % p));
    if !ok {
        return None;
    }
    let d = d as i64;
    let half = (p / 2) as i64;
    Some((if d > half { d - p as i64 } else { d }, v))
}

/// Rank and `Π_j (d_j / p)` of a small symmetric matrix, by the same
/// elimination as [`congruence_diagonalize_with`] without tracking `C`.
fn rank_and_sign(a: &mut [[u64; MAX_FF_ORDER]; MAX_FF_ORDER], n: usize, p: u64) -> (usize, i8) {
    let mut rank = 0;
    let mut sign = 1i8;
    for k in 0..n {
        let piv = (k..n).find(|&i| a[i][i] != 0);
        let i = match piv {
            Some(i) => i,
            None => {
                let Some((i, j)) = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| i != j && a[i][j] != 0)
                else {
                    break;
                };
                for r in k..n {
                    a[r][i] = (a[r][i] + a[r][j]) % p;
                }
                for t in k..n {
                    a[i][t] = (a[i][t] + a[j][t]) % p;
                }
                i
            }
        };
        a.swap(i, k);
        for row in a.iter_mut() {
            row.swap(i, k);
        }
        let d = a[k][k];
        sign *= legendre(d as i64, p);
        let inv = mod_inv(d, p);
        for r in k + 1..n {
            if a[r][k] == 0 {
                continue;
            }
            let f = a[r][k] * inv % p;
            // row operations alone leave the (symmetric) Schur complement
            // in the trailing block, which is all that is read later
            for t in k..n {
                a[r][t] = (a[r][t] + (p - f) * a[k][t]) % p;
            }
        }
        rank += 1;
    }
    (rank, sign)
}

fn check_pattern(g: &Graph) -> Result<(), FfError> {
    if g.has_isolated_vertex() {
        return Err(FfError::IsolatedVertex);
    }
    if g.order() > MAX_FF_ORDER || g.edge_count() > MAX_FF_EDGES {
        return Err(FfError::TooLarge);
    }
    Ok(())
}

/// Visits every sign vector with the rank and Legendre sign `Π (d_j/p)` of
/// its matrix.
fn for_each_sigma(g: &Graph, p: u64, mut visit: impl FnMut(u64, usize, i8)) {
    let n = g.order();
    let edges = g.edges();
    for mask in 0..1u64 << edges.len() {
        let mut a = [[0u64; MAX_FF_ORDER]; MAX_FF_ORDER];
        for (idx, &(u, v)) in edges.iter().enumerate() {
            let x = if mask >> idx & 1 == 0 { 1 } else { p - 1 };
            a[u][u] += x;
            a[v][v] += x;
            a[u][v] += x;
            a[v][u] += x;
        }
        for row in a.iter_mut().take(n) {
            for x in row.iter_mut().take(n) {
                *x %= p;
            }
        }
        let (rank, sign) = rank_and_sign(&mut a, n, p);
        visit(mask, rank, sign);
    }
}

/// Sign vector for bit pattern `mask`: bit `i` set means `σ_i = -1`.
fn sigma_of(mask: u64, e: usize) -> Vec<i8> {
    (0..e).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect()
}

/// Number of sign vectors by `(rank, Π_j (d_j s / p))`; independent of `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpProfile {
    pub p: u64,
    pub edges: usize,
    pub counts: BTreeMap<(usize, i8), u64>,
}

pub fn fp_profile(g: &Graph, p: u64, s: u64) -> Result<FpProfile, FfError> {
    check_pattern(g)?;
    if !is_prime(p) || p == 2 {
        return Err(FfError::NotOddPrime(p));
    }
    let ls = legendre(s as i64, p);
    let mut counts = BTreeMap::new();
    for_each_sigma(g, p, |_, rank, sign| {
        let sign = if rank % 2 == 1 { sign * ls } else { sign };
        *counts.entry((rank, sign)).or_insert(0) += 1;
    });
    Ok(FpProfile { p, edges: g.edge_count(), counts })
}

/// `p^{-n/2}` as a tower element.
pub fn p_pow_neg_half(p: u64, n: u64) -> QuadValue {
    let pr = Rational::from_integer(BigInt::from(p));
    if n.is_multiple_of(2) {
        QuadValue::from_rational(pr.pow(-((n / 2) as i32)))
    } else {
        QuadValue::sqrt_times(p, pr.pow(-(n.div_ceil(2) as i32))).expect("p is square-free")
    }
}

/// A value `re + i·im` with both parts in the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexQuad {
    pub re: QuadValue,
    pub im: QuadValue,
}

/// `legendre_sign · (g(1;p)/p)^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussTerm {
    pub p: u64,
    pub power: u32,
    pub legendre_sign: i8,
}

impl GaussTerm {
    pub fn value(&self) -> ComplexQuad {
        let mag = p_pow_neg_half(self.p, self.power as u64);
        let mag = if self.legendre_sign < 0 { mag.neg() } else { mag };
        // phase i^power when p ≡ 3 mod 4
        let quarter = if self.p % 4 == 3 { self.power % 4 } else { 0 };
        let (re, im) = match quarter {
            0 => (mag, QuadValue::zero()),
            1 => (QuadValue::zero(), mag),
            2 => (mag.neg(), QuadValue::zero()),
            _ => (QuadValue::zero(), mag.neg()),
        };
        ComplexQuad { re, im }
    }
}

/// `(g(μ;p)/p)^power`.
pub fn gauss_term(mu: i64, p: u64, power: u32) -> Result<GaussTerm, FfError> {
    let l = legendre(mu, p);
    if l == 0 {
        return Err(FfError::ZeroMu);
    }
    Ok(GaussTerm { p, power, legendre_sign: if l < 0 && power % 2 == 1 { -1 } else { 1 } })
}

impl FpProfile {
    /// `t(G, U)` at exponent `k`.
    pub fn eval(&self, k: u32) -> Result<QuadValue, FfError> {
        let (re, im) = self.sum_where(k, |_| true)?;
        if !im.is_zero() {
            return Err(FfError::ImaginaryResidue);
        }
        Ok(re.scale(&Rational::new(BigInt::one(), BigInt::one() << self.edges)))
    }

    /// Unnormalized sum of the Gauss products over sign vectors whose rank
    /// satisfies `keep`, as `(real, imaginary)`.
    pub fn sum_where(&self, k: u32, keep: impl Fn(usize) -> bool) -> Result<(QuadValue, QuadValue), FfError> {
        let mut re = QuadValue::zero();
        let mut im = QuadValue::zero();
        for (&(rank, sign), &count) in &self.counts {
            if !keep(rank) {
                continue;
            }
            let term = GaussTerm {
                p: self.p,
                power: k * rank as u32,
                legendre_sign: if sign < 0 && k % 2 == 1 { -1 } else { 1 },
            }
            .value();
            let c = Rational::from_integer(BigInt::from(count));
            re = re.checked_add(&term.re.scale(&c))?;
            im = im.checked_add(&term.im.scale(&c))?;
        }
        Ok((re, im))
    }
}

/// Exact `t(G, U)` for the kernel described by `spec`.
pub fn t_ff(g: &Graph, spec: &FpKernelSpec) -> Result<QuadValue, FfError> {
    fp_profile(g, spec.p, spec.s)?.eval(spec.k)
}

/// The kernel as an explicit step function on `3^k` equal blocks; only for
/// `p = 3`, where `cos(2π/3) = -1/2` is rational.
pub fn grid_kernel(spec: &FpKernelSpec) -> Result<StepKernel, FfError> {
    if spec.p != 3 {
        return Err(FfError::UnsupportedPrime(spec.p));
    }
    let n = 3usize.checked_pow(spec.k).filter(|&n| n <= 6561).ok_or(FfError::TooLarge)?;
    let digits = |mut x: usize| {
        let mut out = vec![0u64; spec.k as usize];
        for d in out.iter_mut() {
            *d = (x % 3) as u64;
            x /= 3;
        }
        out
    };
    let q = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum::<u64>() * spec.s % 3;
    let xs: Vec<Vec<u64>> = (0..n).map(digits).collect();
    let values = (0..n)
        .map(|i| (0..n).map(|j| if q(&xs[i], &xs[j]) == 0 { rat(1, 1) } else { rat(-1, 2) }).collect())
        .collect();
    Ok(StepKernel::uniform(values)?)
}

/// `t(G, U)` by direct block summation over the `3^k`-block grid.
pub fn t_grid(g: &Graph, spec: &FpKernelSpec) -> Result<Rational, FfError> {
    t_grid_with_budget(g, spec, DEFAULT_TERM_BUDGET)
}

pub fn t_grid_with_budget(g: &Graph, spec: &FpKernelSpec, budget: u64) -> Result<Rational, FfError> {
    Ok(grid_kernel(spec)?.t_hom_with_budget(g, budget)?)
}

/// All sign vectors with `rank(M^σ_G) = 1`.
pub fn sigma1_set(g: &Graph, p: u64) -> Result<Vec<Vec<i8>>, FfError> {
    check_pattern(g)?;
    let e = g.edge_count();
    let mut out = Vec::new();
    for_each_sigma(g, p, |mask, rank, _| {
        if rank == 1 {
            out.push(sigma_of(mask, e));
        }
    });
    Ok(out)
}

/// Minimum rank of `M^σ_G` over all sign vectors.
pub fn min_rank(g: &Graph, p: u64) -> Result<usize, FfError> {
    check_pattern(g)?;
    let mut best = usize::MAX;
    for_each_sigma(g, p, |_, rank, _| best = best.min(rank));
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    #[test]
    fn gauss_examples() {
        let v = gauss_term(1, 5, 1).unwrap().value();
        assert_eq!(v.re, QuadValue::sqrt_times(5, rat(1, 5)).unwrap());
        assert!(v.im.is_zero());
        let v = gauss_term(1, 3, 1).unwrap().value();
        assert!(v.re.is_zero());
        assert_eq!(v.im, QuadValue::sqrt_times(3, rat(1, 3)).unwrap());
        let v = gauss_term(2, 3, 1).unwrap().value();
        assert_eq!(v.im, QuadValue::sqrt_times(3, rat(-1, 3)).unwrap());
        assert_eq!(gauss_term(3, 3, 1), Err(FfError::ZeroMu));
    }

    #[test]
    fn build_m_examples() {
        let k5 = Graph::complete(5);
        let m = build_m(&k5, &[1; 10], 3).unwrap();
        assert!(m.entries().iter().flatten().all(|&x| x == 1));
        let neg = build_m(&k5, &[-1; 10], 3).unwrap();
        assert_eq!(neg, m.neg());
        let e = build_m(&Graph::complete(2), &[1], 3).unwrap();
        assert_eq!(e.entries(), &[vec![1, 1], vec![1, 1]]);
        assert!(build_m(&k5, &[1; 3], 3).is_err());
    }

    #[test]
    fn diagonalize_examples() {
        let ones = SymMatFp::new(3, vec![vec![1; 5]; 5]).unwrap();
        let d = congruence_diagonalize(&ones).unwrap();
        assert_eq!(d.rank, 1);
        assert_eq!(rank_one_normal_form(&ones).unwrap().0, 1);
        let hyp = SymMatFp::new(3, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let d = congruence_diagonalize(&hyp).unwrap();
        assert_eq!(d.rank, 2);
        let zero = SymMatFp::new(7, vec![vec![0; 4]; 4]).unwrap();
        assert_eq!(congruence_diagonalize(&zero).unwrap().rank, 0);
    }

    #[test]
    fn grid_matches_gauss_sums_at_k1() {
        let spec = FpKernelSpec::new(5, 3, 1, 2).unwrap();
        for name in ["K3", "C4", "diamond", "K4", "K5", "C5"] {
            let g = Graph::named(name).unwrap();
            let exact = t_ff(&g, &spec).unwrap();
            assert_eq!(exact, QuadValue::from_rational(t_grid(&g, &spec).unwrap()), "{name}");
        }
        let c4 = t_grid(&Graph::cycle(4), &spec).unwrap();
        assert!(c4 <= rat(1, 3) && c4 >= rat(-1, 3));
    }

    #[test]
    fn grid_rejects_other_primes() {
        let spec = FpKernelSpec::new(7, 5, 1, 2).unwrap();
        assert_eq!(t_grid(&Graph::complete(3), &spec), Err(FfError::UnsupportedPrime(5)));
    }

    #[test]
    fn sigma1_examples() {
        assert!(sigma1_set(&Graph::cycle(4), 3).unwrap().is_empty());
        let k5 = sigma1_set(&Graph::complete(5), 3).unwrap();
        assert!(k5.contains(&vec![1; 10]) && k5.contains(&vec![-1; 10]));
        assert_eq!(sigma1_set(&Graph::complete(2), 5).unwrap().len(), 2);
    }

    #[test]
    fn spec_validation() {
        assert!(FpKernelSpec::new(5, 3, 2, 2).is_ok());
        assert!(FpKernelSpec::new(5, 3, 2, 1).is_err());
        assert!(FpKernelSpec::new(7, 3, 2, 2).is_err());
        assert!(FpKernelSpec::new(5, 4, 2, 2).is_err());
        assert_eq!(int(0), rat(0, 1));
    }
}
