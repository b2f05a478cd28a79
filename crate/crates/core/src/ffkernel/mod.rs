//! Kernels `U_z` whose clique density `t(K_z, U_z)` is negative and
//! dominates `|t(G, U_z)|` for the non-clique graphs that matter.
//!
//! * `z = 3`: the constant kernel `-α`.
//! * odd `z ≥ 5`: `cos(2π q(x+y)/p)` over `F_p^k` with `p | z-2`
//!   ([`fp`]), evaluated through Gauss sums.
//! * even `z`: a `±1` sign kernel over `F_2^k` ([`f2`]) found by a finite
//!   search over quadratic forms and accepted only after an exact
//!   domination check.

pub mod f2;
pub mod fp;

pub use f2::{t_f2, F2Form};
pub use fp::{
    build_m, congruence_diagonalize, congruence_diagonalize_with, fp_profile, gauss_term, grid_kernel,
    is_prime, min_rank, p_pow_neg_half, rank_one_normal_form, sigma1_set, smallest_nonresidue, t_ff, t_grid,
    t_grid_with_budget, ComplexQuad, DiagResult, FpKernelSpec, FpProfile, GaussTerm, PivotOrder, SymMatFp,
};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::exactnum::{rat, ExactError, QuadValue, Rational};
use crate::graphs::{canonical_form, enumerate_h_min_degree, CanonGraph, Graph, GraphError};
use crate::kernel::{KernelError, StepKernel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FfError {
    #[error("Gauss term needs mu not divisible by p")]
    ZeroMu,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("invalid kernel specification: {0}")]
    InvalidSpec(&'static str),
    #[error("direct grid evaluation needs p = 3, got {0}")]
    UnsupportedPrime(u64),
    #[error("imaginary parts of the Gauss sum did not cancel")]
    ImaginaryResidue,
    #[error("congruence diagonalization failed its C^T M C = D check")]
    DiagonalizationCheck,
    #[error("no F2 quadratic form with k <= 6 dominates for z = {0}")]
    NoValidForm(u64),
    #[error("no admissible k <= {cap} gives clique domination")]
    SearchExhausted { cap: u32 },
    #[error("sign vector has length {got}, expected {expected}")]
    SignLength { expected: usize, got: usize },
    #[error("support does not contain K_{0}")]
    MissingClique(usize),
    #[error("pattern graph has an isolated vertex")]
    IsolatedVertex,
    #[error("pattern graph is too large for this evaluator")]
    TooLarge,
    #[error("z must be at least 3, got {0}")]
    InvalidZ(u64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i8 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if mod_pow(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub(crate) fn mod_pow(b: u64, mut e: u64, p: u64) -> u64 {
    let m = p as u128;
    let mut acc = 1u128;
    let mut b = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

pub(crate) fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

/// The kernel behind `U_z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelHandle {
    Fp(FpKernelSpec),
    F2(F2Form),
    /// `U ≡ -alpha`.
    Const { alpha: Rational },
}

impl KernelHandle {
    /// The exponent `k` (form dimension for `F_2`, `1` for the constant).
    pub fn k(&self) -> u32 {
        match self {
            KernelHandle::Fp(s) => s.k,
            KernelHandle::F2(f) => f.k() as u32,
            KernelHandle::Const { .. } => 1,
        }
    }

    /// The odd prime whose square root may appear in `t` values.
    pub fn prime(&self) -> Option<u64> {
        match self {
            KernelHandle::Fp(s) => Some(s.p),
            _ => None,
        }
    }

    /// The kernel as an explicit step function (`F_p` only for `p = 3`).
    pub fn step_kernel(&self) -> Result<StepKernel, FfError> {
        match self {
            KernelHandle::Fp(s) => grid_kernel(s),
            KernelHandle::F2(f) => Ok(f.step_kernel()),
            KernelHandle::Const { alpha } => Ok(StepKernel::constant(-alpha.clone())),
        }
    }

    pub fn t(&self, g: &Graph) -> Result<QuadValue, FfError> {
        match self {
            KernelHandle::Fp(s) => t_ff(g, s),
            KernelHandle::F2(f) => Ok(QuadValue::from_rational(t_f2(g, f)?)),
            KernelHandle::Const { alpha } => {
                if g.has_isolated_vertex() {
                    return Err(FfError::IsolatedVertex);
                }
                Ok(QuadValue::from_rational((-alpha).pow(g.edge_count() as i32)))
            }
        }
    }
}

fn smallest_odd_prime_factor(n: u64) -> Option<u64> {
    (3..=n).step_by(2).find(|&d| n.is_multiple_of(d) && is_prime(d))
}

/// Smallest admissible `k` for a prime: odd `k` when `p ≡ 1 mod 4`,
/// `k ≡ 2 mod 4` when `p ≡ 3 mod 4`.
pub fn admissible_ks(p: u64, cap: u32) -> impl Iterator<Item = u32> {
    let (start, step) = if p % 4 == 1 { (1, 2) } else { (2, 4) };
    (start..=cap).step_by(step)
}

/// Builds `U_z`; see the module docs. `k_hint` selects the exponent of an
/// `F_p` kernel (default: the smallest admissible one) or the first form
/// dimension tried for even `z`.
pub fn make_uz(z: u64, k_hint: Option<u32>) -> Result<KernelHandle, FfError> {
    make_uz_with_prime(z, k_hint, None)
}

/// As [`make_uz`], with an optional explicit prime `p | z-2` for odd `z`.
pub fn make_uz_with_prime(z: u64, k_hint: Option<u32>, prime: Option<u64>) -> Result<KernelHandle, FfError> {
    match z {
        0..=2 => Err(FfError::InvalidZ(z)),
        3 => Ok(KernelHandle::Const { alpha: rat(1, 2) }),
        _ if z % 2 == 1 => {
            let p = match prime {
                Some(p) => p,
                None => smallest_odd_prime_factor(z - 2).expect("z - 2 is odd and at least 3"),
            };
            let k = k_hint.unwrap_or_else(|| admissible_ks(p, u32::MAX).next().expect("nonempty"));
            Ok(KernelHandle::Fp(FpKernelSpec::new(z, p, k, smallest_nonresidue(p))?))
        }
        _ => search_f2_form(z, k_hint.map_or(2, |k| k as usize)),
    }
}

/// First form (by dimension, then bit pattern) whose sign kernel has
/// `t(K_z) < 0` and `|t(G)| < |t(K_z)|` for every non-clique `G` of
/// minimum degree at least 2 inside `K_z`.
pub fn search_f2_form(z: u64, k_start: usize) -> Result<KernelHandle, FfError> {
    let family: Vec<Graph> = enumerate_h_min_degree(z as usize, 2)?
        .into_iter()
        .filter(|h| !h.is_clique())
        .map(|h| h.to_graph())
        .collect();
    let kz = Graph::complete(z as usize);
    for k in k_start.max(1)..=f2::MAX_F2_K {
        let n = k * (k + 1) / 2;
        'forms: for bits in 0..1u64 << n {
            let form = F2Form::new(k, bits)?;
            let tz = t_f2(&kz, &form)?;
            if !tz.is_negative() {
                continue;
            }
            for g in &family {
                if t_f2(g, &form)?.abs() >= tz.abs() {
                    continue 'forms;
                }
            }
            return Ok(KernelHandle::F2(form));
        }
    }
    Err(FfError::NoValidForm(z))
}

/// Result of [`find_domination_k`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domination {
    pub handle: KernelHandle,
    pub k: u32,
    pub t: BTreeMap<CanonGraph, QuadValue>,
}

fn dominates(t: &BTreeMap<CanonGraph, QuadValue>, km: &CanonGraph) -> Result<bool, FfError> {
    let tk = &t[km];
    if tk.sign() >= 0 {
        return Ok(false);
    }
    let bound = tk.abs();
    for (h, v) in t {
        if !h.is_clique() && v.abs().cmp_value(&bound)? != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest admissible `k ≤ cap` at which `t(K_m, U) < 0` and every
/// non-clique `G` in `support` has `|t(G, U)| < |t(K_m, U)|`. `F_2` and
/// constant handles have a fixed kernel, which is checked as is.
pub fn find_domination_k(
    m: usize,
    support: &[CanonGraph],
    handle: &KernelHandle,
    cap: u32,
) -> Result<Domination, FfError> {
    let km = canonical_form(&Graph::complete(m))?;
    if !support.contains(&km) {
        return Err(FfError::MissingClique(m));
    }
    match handle {
        KernelHandle::Fp(spec) => {
            let profiles: Vec<(CanonGraph, FpProfile)> = support
                .iter()
                .map(|h| Ok((*h, fp_profile(&h.to_graph(), spec.p, spec.s)?)))
                .collect::<Result<_, FfError>>()?;
            for k in admissible_ks(spec.p, cap) {
                let mut t = BTreeMap::new();
                for (h, prof) in &profiles {
                    t.insert(*h, prof.eval(k)?);
                }
                if dominates(&t, &km)? {
                    return Ok(Domination { handle: KernelHandle::Fp(spec.with_k(k)), k, t });
                }
            }
            Err(FfError::SearchExhausted { cap })
        }
        _ => {
            let mut t = BTreeMap::new();
            for h in support {
                t.insert(*h, handle.t(&h.to_graph())?);
            }
            if dominates(&t, &km)? {
                Ok(Domination { handle: handle.clone(), k: handle.k(), t })
            } else {
                Err(FfError::SearchExhausted { cap: handle.k() })
            }
        }
    }
}

/// `-2^{-C(z,2)} p^{-k/2}`, the clique bound for an `F_p` kernel.
pub fn clique_bound(z: usize, p: u64, k: u32) -> QuadValue {
    let e = (z * (z - 1) / 2) as u32;
    let two = Rational::new(BigInt::one(), BigInt::one() << e);
    p_pow_neg_half(p, k as u64).scale(&-two)
}

/// `p^{-k}`, the bound on `|t(G, U)|` for non-cliques of minimum degree 2.
pub fn nonclique_bound(p: u64, k: u32) -> Rational {
    Rational::from_integer(BigInt::from(p)).pow(-(k as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(1, 7), 1);
        assert_eq!(legendre(2, 3), -1);
        assert_eq!(legendre(4, 5), 1);
        assert_eq!(legendre(0, 5), 0);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
    }

    #[test]
    fn make_uz_examples() {
        let u3 = make_uz(3, None).unwrap();
        assert_eq!(u3, KernelHandle::Const { alpha: rat(1, 2) });
        assert_eq!(u3.t(&Graph::complete(3)).unwrap(), QuadValue::from_rational(rat(-1, 8)));
        match make_uz(5, None).unwrap() {
            KernelHandle::Fp(s) => assert_eq!((s.p, s.s, s.k), (3, 2, 2)),
            other => panic!("{other:?}"),
        }
        match make_uz(7, None).unwrap() {
            KernelHandle::Fp(s) => assert_eq!((s.p, s.s, s.k), (5, 2, 1)),
            other => panic!("{other:?}"),
        }
        match make_uz(4, None).unwrap() {
            KernelHandle::F2(f) => {
                assert_eq!(t_f2(&Graph::complete(4), &f).unwrap(), rat(-1, 2));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(make_uz(2, None), Err(FfError::InvalidZ(2)));
    }

    #[test]
    fn constant_handle_domination() {
        let k3 = canonical_form(&Graph::complete(3)).unwrap();
        let d = find_domination_k(3, &[k3], &make_uz(3, None).unwrap(), 40).unwrap();
        assert_eq!(d.k, 1);
        assert_eq!(d.t[&k3], QuadValue::from_rational(rat(-1, 8)));
    }

    #[test]
    fn admissible_sequences() {
        assert_eq!(admissible_ks(3, 14).collect::<Vec<_>>(), [2, 6, 10, 14]);
        assert_eq!(admissible_ks(5, 7).collect::<Vec<_>>(), [1, 3, 5, 7]);
    }
}
