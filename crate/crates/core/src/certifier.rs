//! Certificates that `W_p` is not a local maximizer of `ρ_F`.
//!
//! * [`certify_linear`]: away from the zeros of `S_{K3,F}`, a small
//!   multiple of the 3×3 kernel already beats `rand(F,p)`.
//! * [`certify_full`]: for every `p`, the kernel
//!   `Δ = δ · B ⊗ (λU)^{⊗N} ⊗ W` does, where `U` is the clique-dominated
//!   kernel `U_m` and `N` is even. Only graphs `H` of minimum degree at
//!   least 2 survive (`B` is balanced), `t` is multiplicative under `⊗`,
//!   and the largest `|t(H, λU)|` is attained by a single clique `K_z`,
//!   whose term wins once `N` is large.
//! * [`c5_diagnostic`]: why `C_5` at `p = 1/2` needs the second route.
//!
//! [`validate_certificate`] trusts nothing stored in a certificate: it
//! recomputes every row, re-derives the pipeline's choices and compares.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{int, rat, ExactError, PolyP, QuadValue, Rational};
use crate::expansion::{build_table, rand_density, ExpansionError, ExpansionTable};
use crate::ffkernel::{
    admissible_ks, find_domination_k, fp_profile, make_uz_with_prime, FfError, KernelHandle,
};
use crate::graphs::{canonical_form, CanonGraph, Graph, GraphError};
use crate::kernel::{balanced_b, delta3x3, t_balanced_b, KernelError, LazyTensorKernel, StepKernel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("p is an exceptional point of the linear route (S_(K3,F)(p) = 0); use the full certificate")]
    ExceptionalPoint,
    #[error("K_m has zero coefficient in the support")]
    SupportDegenerate,
    #[error("no even N <= {cap} closes the gap")]
    NCapExceeded { cap: u32 },
    #[error("no admissible epsilon found by halving")]
    EpsilonExhausted,
    #[error("internal: gap is not positive")]
    GapNotPositive,
    #[error(transparent)]
    Ff(#[from] FfError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn check_order(f: &Graph) -> Result<(), CertifyError> {
    if !(3..=7).contains(&f.order()) {
        return Err(CertifyError::Precondition("v(F) must be in 3..=7"));
    }
    Ok(())
}

fn check_p(p: &Rational) -> Result<(), CertifyError> {
    if !p.is_positive() || *p >= Rational::one() {
        return Err(CertifyError::Precondition("p must lie strictly between 0 and 1"));
    }
    Ok(())
}

fn min_side(p: &Rational) -> Rational {
    p.clone().min(Rational::one() - p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCertificate {
    pub f: Graph,
    pub p: Rational,
    pub eps: Rational,
    pub sigma: i8,
    pub kernel: StepKernel,
    /// `ρ_F(W_p + σεΔ) - rand(F,p)`.
    pub gap: Rational,
    /// The gap as a polynomial in the signed step `σε`.
    pub eps_poly: PolyP,
}

/// Perturbs `W_p` by `σεΔ₃ₓ₃` with `σ` the sign of the triangle
/// coefficient, halving `ε` from `min(p,1-p)/2` until the exact gap is
/// positive.
pub fn certify_linear(f: &Graph, p: &Rational) -> Result<LinearCertificate, CertifyError> {
    check_order(f)?;
    check_p(p)?;
    let table = build_table(f)?;
    let k3 = canonical_form(&Graph::complete(3))?;
    let s = table.entry(&k3).ok_or(ExpansionError::UnknownGraph)?.s.eval(p);
    if s.is_zero() {
        return Err(CertifyError::ExceptionalPoint);
    }
    let sigma: i8 = if s.is_positive() { 1 } else { -1 };
    let kernel = delta3x3();
    let eps_poly = table.epsilon_polynomial(p, &kernel)?;
    let wp = StepKernel::constant(p.clone());
    let mut eps = min_side(p) / int(2);
    for _ in 0..256 {
        let step = &eps * int(sigma as i64);
        let w = wp.add(&kernel.scale(&step));
        let gap = eps_poly.eval(&step);
        if w.range_check(&Rational::zero(), &Rational::one()) && gap.is_positive() {
            let direct = w.rho_induced(f)? - rand_density(f, p);
            assert_eq!(direct, gap, "expansion identity broken");
            return Ok(LinearCertificate { f: f.clone(), p: p.clone(), eps, sigma, kernel, gap, eps_poly });
        }
        eps /= int(2);
    }
    Err(CertifyError::EpsilonExhausted)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticStatus {
    /// Lowest nonzero ε-coefficient has even order and is negative.
    EvenNegative,
    /// `D` produced the zero polynomial.
    Degenerate,
    /// Anything else: odd lowest order or a positive coefficient.
    Violation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagnosticRow {
    pub label: String,
    pub t_p2: Rational,
    pub eps_poly: PolyP,
    pub lowest_order: Option<usize>,
    pub lowest_coeff: Option<Rational>,
    pub status: DiagnosticStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C5Diagnostic {
    pub p_p2: Rational,
    pub p_c4: Rational,
    pub rows: Vec<DiagnosticRow>,
}

pub fn diagnose_kernel(
    table: &ExpansionTable,
    p: &Rational,
    label: &str,
    d: &StepKernel,
) -> Result<DiagnosticRow, CertifyError> {
    let eps_poly = table.epsilon_polynomial(p, d)?;
    let t_p2 = d.t_hom(&Graph::path(2))?;
    let lowest = eps_poly.coeffs().iter().position(|c| !c.is_zero());
    let lowest_coeff = lowest.map(|i| eps_poly.coeff(i));
    let status = match (lowest, &lowest_coeff) {
        (None, _) => DiagnosticStatus::Degenerate,
        (Some(i), Some(c)) if i % 2 == 0 && c.is_negative() => DiagnosticStatus::EvenNegative,
        _ => DiagnosticStatus::Violation,
    };
    Ok(DiagnosticRow { label: label.into(), t_p2, eps_poly, lowest_order: lowest, lowest_coeff, status })
}

/// Ten balanced rank-one kernels `f(x)f(y)` with `∫f = 0`, so both
/// `t(K_2, D)` and `t(P_2, D)` vanish.
pub fn diagnostic_battery() -> Vec<(String, StepKernel)> {
    let mut out = Vec::new();
    for a in 1..=6 {
        let w = rat(a, 7);
        let f = [Rational::one() - &w, -w.clone()];
        let d = StepKernel::rank_one(vec![w.clone(), Rational::one() - &w], &f).expect("valid kernel");
        out.push((format!("two-step w={a}/7"), d));
    }
    let quarter = [rat(1, 4), rat(1, 4), rat(1, 2)];
    for f in [[1, 1, -1], [2, 0, -1], [1, -3, 1], [3, 1, -2]] {
        let vals: Vec<Rational> = f.iter().map(|&x| Rational::from_integer(BigInt::from(x)) / int(3)).collect();
        let d = StepKernel::rank_one(quarter.to_vec(), &vals).expect("valid kernel");
        out.push((format!("three-step f={f:?}/3"), d));
    }
    out
}

/// Coefficients `P_{P2,C5}(1/2)`, `P_{C4,C5}(1/2)` and the ε-polynomial of
/// `(C5, 1/2, D)` for the battery, `B`, and `D = 0`.
pub fn c5_diagnostic() -> Result<C5Diagnostic, CertifyError> {
    let table = build_table(&Graph::cycle(5))?;
    let half = rat(1, 2);
    let p_p2 = table.eval_p(&canonical_form(&Graph::path(2))?, &half)?;
    let p_c4 = table.eval_p(&canonical_form(&Graph::cycle(4))?, &half)?;
    let mut rows = Vec::new();
    for (label, d) in diagnostic_battery() {
        rows.push(diagnose_kernel(&table, &half, &label, &d)?);
    }
    rows.push(diagnose_kernel(&table, &half, "B", &balanced_b())?);
    rows.push(diagnose_kernel(&table, &half, "zero", &StepKernel::constant(Rational::zero()))?);
    Ok(C5Diagnostic { p_p2, p_c4, rows })
}

/// What `W` is in `Δ = δ · B ⊗ (λU)^{⊗N} ⊗ W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WChoice {
    Const1,
    Kernel(KernelHandle),
}

impl WChoice {
    fn t(&self, h: &Graph) -> Result<QuadValue, FfError> {
        match self {
            WChoice::Const1 => Ok(QuadValue::one()),
            WChoice::Kernel(k) => k.t(h),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportRow {
    pub h: CanonGraph,
    /// `P_{H,F}(p)`.
    pub p_value: Rational,
    pub t_b: Rational,
    /// `t(H, U)`, without `λ`.
    pub t_u: QuadValue,
    pub t_w: QuadValue,
    /// `P · δ^e · t_B · (λ^e t_U)^N · t_W`.
    pub contribution: QuadValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub f: Graph,
    pub p: Rational,
    pub delta: Rational,
    pub lambda: Rational,
    pub m: usize,
    pub handle_u: KernelHandle,
    pub k: u32,
    pub z: usize,
    pub n: u32,
    pub w: WChoice,
    pub support: Vec<SupportRow>,
    pub gap: QuadValue,
    /// Rational upper bound on `|t(H,λU)| / |t(K_z,λU)|` over `H ≠ K_z`.
    pub gamma: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub k_cap: u32,
    pub n_cap: u32,
    /// Prime for `U_m` when `m` is odd (must divide `m - 2`).
    pub prime: Option<u64>,
    /// Prime for `W = U_z` when `z` is odd.
    pub w_prime: Option<u64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { k_cap: 40, n_cap: 1 << 20, prime: None, w_prime: None }
    }
}

fn pow_u(r: &Rational, e: usize) -> Rational {
    r.pow(e as i32)
}

/// `(H, P_{H,F}(p), t(H,B))` for the min-degree-2 graphs with
/// `P · t_B ≠ 0`.
fn support_of(table: &ExpansionTable, p: &Rational) -> Result<Vec<(CanonGraph, Rational, Rational)>, CertifyError> {
    let mut out = Vec::new();
    for e in table.entries() {
        if e.h.min_degree() < 2 {
            continue;
        }
        let pv = table.eval_p(&e.h, p)?;
        let tb = t_balanced_b(&e.h.to_graph());
        if !(&pv * &tb).is_zero() {
            out.push((e.h, pv, tb));
        }
    }
    Ok(out)
}

/// `λ = 1` when one clique attains `max |t(H,U)|`; otherwise the largest
/// `1 - 2^{-j}` that makes the smallest such clique the strict maximizer of
/// `λ^{e(H)} |t(H,U)|`.
fn choose_lambda(t: &BTreeMap<CanonGraph, QuadValue>) -> Result<(Rational, CanonGraph), CertifyError> {
    let abs: BTreeMap<CanonGraph, QuadValue> = t.iter().map(|(h, v)| (*h, v.abs())).collect();
    let mut top = QuadValue::zero();
    for v in abs.values() {
        if v.cmp_value(&top)? == Ordering::Greater {
            top = v.clone();
        }
    }
    let mut kstar = Vec::new();
    for (h, v) in &abs {
        if v.cmp_value(&top)? == Ordering::Equal {
            debug_assert!(h.is_clique(), "a non-clique ties the maximum despite domination");
            kstar.push(*h);
        }
    }
    let z = *kstar.iter().min_by_key(|h| h.edge_count()).ok_or(CertifyError::SupportDegenerate)?;
    if kstar.len() == 1 {
        return Ok((Rational::one(), z));
    }
    'j: for j in 1..=256u32 {
        let lambda = Rational::one() - Rational::new(BigInt::one(), BigInt::one() << j);
        let zval = abs[&z].scale(&pow_u(&lambda, z.edge_count()));
        for (h, v) in &abs {
            if *h != z && v.scale(&pow_u(&lambda, h.edge_count())).cmp_value(&zval)? != Ordering::Less {
                continue 'j;
            }
        }
        return Ok((lambda, z));
    }
    Err(CertifyError::Precondition("no lambda separates the maximizing cliques"))
}

/// Smallest `n/2^b ≥ v` for `0 ≤ v`.
fn dyadic_ceil(v: &QuadValue, bits: u32) -> Result<Rational, CertifyError> {
    let den = BigInt::one() << bits;
    let ge = |n: &BigInt| -> Result<bool, CertifyError> {
        let q = QuadValue::from_rational(Rational::new(n.clone(), den.clone()));
        Ok(q.cmp_value(v)? != Ordering::Less)
    };
    let mut hi = den.clone();
    while !ge(&hi)? {
        hi <<= 1;
    }
    let mut lo = BigInt::from(-1);
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if ge(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Rational::new(hi, den))
}

/// `max_{H ≠ z} λ^{e(H)}|t(H,U)| / (λ^{e(z)}|t(z,U)|)`, exactly when it is
/// rational and otherwise as a dyadic upper bound (16 bits finer than the
/// first one that is below 1).
fn gamma_bound(t: &BTreeMap<CanonGraph, QuadValue>, lambda: &Rational, z: &CanonGraph) -> Result<Rational, CertifyError> {
    let tz = t[z].abs();
    let mut best: Option<QuadValue> = None;
    for (h, v) in t {
        if h == z {
            continue;
        }
        let ratio = v.abs().scale(&lambda.pow(h.edge_count() as i32 - z.edge_count() as i32)).checked_div(&tz)?;
        best = match best {
            Some(b) if b.cmp_value(&ratio)? != Ordering::Less => Some(b),
            _ => Some(ratio),
        };
    }
    let Some(r) = best else { return Ok(Rational::zero()) };
    if let Some(q) = r.as_rational() {
        return Ok(q);
    }
    let mut bits = 8;
    while dyadic_ceil(&r, bits)? >= Rational::one() {
        bits *= 2;
    }
    dyadic_ceil(&r, bits + 16)
}

/// `U_z` with the smallest admissible `k` for which `t(K_z, W) < 0`.
fn choose_w(z: usize, opts: &CertifyOptions) -> Result<KernelHandle, CertifyError> {
    let kz = Graph::complete(z);
    let h = make_uz_with_prime(z as u64, None, opts.w_prime)?;
    match &h {
        KernelHandle::Fp(spec) => {
            let prof = fp_profile(&kz, spec.p, spec.s)?;
            for k in admissible_ks(spec.p, opts.k_cap) {
                if prof.eval(k)?.sign() < 0 {
                    return Ok(KernelHandle::Fp(spec.with_k(k)));
                }
            }
            Err(FfError::SearchExhausted { cap: opts.k_cap }.into())
        }
        _ if h.t(&kz)?.sign() < 0 => Ok(h),
        _ => Err(FfError::SearchExhausted { cap: h.k() }.into()),
    }
}

/// `a > γ^n · rest`.
fn n_holds(gamma: &Rational, a: &QuadValue, rest: &Rational, n: u32) -> Result<bool, CertifyError> {
    let rhs = QuadValue::from_rational(gamma.pow(n as i32) * rest);
    Ok(a.cmp_value(&rhs)? == Ordering::Greater)
}

/// Smallest even `n ≥ 2` with `a > γ^n · rest`.
fn min_even_n(gamma: &Rational, a: &QuadValue, rest: &Rational, cap: u32) -> Result<u32, CertifyError> {
    if a.sign() <= 0 {
        return Err(CertifyError::GapNotPositive);
    }
    let mut hi = 2u32;
    while !n_holds(gamma, a, rest, hi)? {
        if hi > cap / 2 {
            return Err(CertifyError::NCapExceeded { cap });
        }
        hi *= 2;
    }
    if hi == 2 {
        return Ok(2);
    }
    let mut lo = hi / 2;
    while hi - lo > 2 {
        let mid = (lo / 2 + hi / 2) / 2 * 2;
        if n_holds(gamma, a, rest, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn check_full_pre(f: &Graph, p: &Rational, delta: &Rational) -> Result<(), CertifyError> {
    check_order(f)?;
    check_p(p)?;
    if !delta.is_positive() || *delta > min_side(p) {
        return Err(CertifyError::Precondition("delta must satisfy 0 < delta <= min(p, 1-p)"));
    }
    Ok(())
}

/// The kernel values feeding `Δ` must lie in `[-1, 1]`.
fn handle_in_unit_range(h: &KernelHandle) -> bool {
    match h {
        KernelHandle::Const { alpha } => alpha.is_positive() && *alpha <= Rational::one(),
        _ => true,
    }
}

pub fn certify_full(f: &Graph, p: &Rational, delta: &Rational, opts: &CertifyOptions) -> Result<Certificate, CertifyError> {
    check_full_pre(f, p, delta)?;
    let m = f.order();
    let table = build_table(f)?;
    let support = support_of(&table, p)?;
    let km = canonical_form(&Graph::complete(m))?;
    if !support.iter().any(|(h, _, _)| *h == km) {
        return Err(CertifyError::SupportDegenerate);
    }
    let hs: Vec<CanonGraph> = support.iter().map(|(h, _, _)| *h).collect();

    let u0 = make_uz_with_prime(m as u64, None, opts.prime)?;
    let dom = find_domination_k(m, &hs, &u0, opts.k_cap)?;
    let (lambda, zg) = choose_lambda(&dom.t)?;
    let gamma = gamma_bound(&dom.t, &lambda, &zg)?;

    let coeff = |h: &CanonGraph, pv: &Rational, tb: &Rational| pv * pow_u(delta, h.edge_count()) * tb;
    let (_, pz, tbz) = support.iter().find(|(h, _, _)| *h == zg).expect("z is in the support");
    let cz = coeff(&zg, pz, tbz);
    let w = if cz.is_positive() { WChoice::Const1 } else { WChoice::Kernel(choose_w(zg.order(), opts)?) };

    let mut t_w = BTreeMap::new();
    for h in &hs {
        t_w.insert(*h, w.t(&h.to_graph())?);
    }
    let a = t_w[&zg].scale(&cz);
    let rest: Rational =
        support.iter().filter(|(h, _, _)| *h != zg).map(|(h, pv, tb)| coeff(h, pv, tb).abs()).sum();
    let n = min_even_n(&gamma, &a, &rest, opts.n_cap)?;

    let mut rows = Vec::new();
    let mut gap = QuadValue::zero();
    for (h, pv, tb) in &support {
        let t_u = dom.t[h].clone();
        let scaled = t_u.scale(&pow_u(&lambda, h.edge_count()));
        let contribution = scaled.pow(n)?.checked_mul(&t_w[h])?.scale(&coeff(h, pv, tb));
        gap = gap.checked_add(&contribution)?;
        rows.push(SupportRow {
            h: *h,
            p_value: pv.clone(),
            t_b: tb.clone(),
            t_u,
            t_w: t_w[h].clone(),
            contribution,
        });
    }
    if gap.sign() <= 0 {
        return Err(CertifyError::GapNotPositive);
    }
    Ok(Certificate {
        f: f.clone(),
        p: p.clone(),
        delta: delta.clone(),
        lambda,
        m,
        k: dom.k,
        handle_u: dom.handle,
        z: zg.order(),
        n,
        w,
        support: rows,
        gap,
        gamma,
    })
}

/// The first check a certificate failed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("certificate check failed: {check}")]
pub struct ValidationFailure {
    pub check: &'static str,
}

fn fail(check: &'static str) -> ValidationFailure {
    ValidationFailure { check }
}

fn ensure(ok: bool, check: &'static str) -> Result<(), ValidationFailure> {
    if ok {
        Ok(())
    } else {
        Err(fail(check))
    }
}

/// Recomputes the certificate from `(F, p, δ)` and its recorded primes and
/// checks every stored field and every inequality the argument relies on.
pub fn validate_certificate(c: &Certificate) -> Result<(), ValidationFailure> {
    ensure(check_full_pre(&c.f, &c.p, &c.delta).is_ok(), "preconditions")?;
    ensure(c.m == c.f.order(), "m")?;
    ensure(c.lambda.is_positive() && c.lambda <= Rational::one(), "lambda")?;
    ensure(c.n >= 2 && c.n.is_multiple_of(2), "n_even")?;
    ensure((3..=c.m).contains(&c.z), "z_range")?;
    ensure(c.k == c.handle_u.k(), "k")?;
    ensure(handle_in_unit_range(&c.handle_u), "u_range")?;
    if let WChoice::Kernel(h) = &c.w {
        ensure(handle_in_unit_range(h), "w_range")?;
    }

    let table = build_table(&c.f).map_err(|_| fail("table"))?;
    let support = support_of(&table, &c.p).map_err(|_| fail("support"))?;
    ensure(support.len() == c.support.len(), "support")?;
    let mut gap = QuadValue::zero();
    let mut t_u = BTreeMap::new();
    for ((h, pv, tb), row) in support.iter().zip(&c.support) {
        ensure(*h == row.h, "support")?;
        ensure(*pv == row.p_value, "p_value")?;
        ensure(*tb == row.t_b, "t_b")?;
        let g = h.to_graph();
        let tu = c.handle_u.t(&g).map_err(|_| fail("t_u"))?;
        ensure(tu == row.t_u, "t_u")?;
        let tw = c.w.t(&g).map_err(|_| fail("t_w"))?;
        ensure(tw == row.t_w, "t_w")?;
        let e = h.edge_count();
        let contribution = tu
            .scale(&pow_u(&c.lambda, e))
            .pow(c.n)
            .and_then(|x| x.checked_mul(&tw))
            .map(|x| x.scale(&(pv * pow_u(&c.delta, e) * tb)))
            .map_err(|_| fail("contribution"))?;
        ensure(contribution == row.contribution, "contribution")?;
        gap = gap.checked_add(&contribution).map_err(|_| fail("gap"))?;
        t_u.insert(*h, tu);
    }
    ensure(gap == c.gap, "gap")?;
    ensure(gap.sign() > 0, "gap_sign")?;

    // The bound chain: every other term is at most γ times the K_z term.
    let zg = canonical_form(&Graph::complete(c.z)).map_err(|_| fail("z_range"))?;
    let tz = t_u.get(&zg).ok_or(fail("z_range"))?.abs().scale(&pow_u(&c.lambda, zg.edge_count()));
    ensure(c.gamma < Rational::one() && !c.gamma.is_negative(), "gamma")?;
    for (h, v) in &t_u {
        if *h != zg {
            let lhs = v.abs().scale(&pow_u(&c.lambda, h.edge_count()));
            ensure(lhs.cmp_value(&tz.scale(&c.gamma)).map_err(|_| fail("gamma"))? != Ordering::Greater, "gamma")?;
        }
    }
    let row_z = c.support.iter().find(|r| r.h == zg).ok_or(fail("z_range"))?;
    let cz = &row_z.p_value * pow_u(&c.delta, zg.edge_count()) * &row_z.t_b;
    let a = row_z.t_w.scale(&cz);
    let rest: Rational = c
        .support
        .iter()
        .filter(|r| r.h != zg)
        .map(|r| (&r.p_value * pow_u(&c.delta, r.h.edge_count()) * &r.t_b).abs())
        .sum();
    ensure(n_holds(&c.gamma, &a, &rest, c.n).unwrap_or(false), "n_threshold")?;
    ensure(c.n == 2 || !n_holds(&c.gamma, &a, &rest, c.n - 2).unwrap_or(true), "n_minimal")?;

    // The pipeline's choices (k, λ, z, W, γ) must be the canonical ones.
    let opts = CertifyOptions {
        n_cap: CertifyOptions::default().n_cap.max(c.n),
        prime: c.handle_u.prime(),
        w_prime: match &c.w {
            WChoice::Kernel(h) => h.prime(),
            WChoice::Const1 => None,
        },
        ..CertifyOptions::default()
    };
    let again = certify_full(&c.f, &c.p, &c.delta, &opts).map_err(|_| fail("canonical"))?;
    ensure(again.handle_u == c.handle_u, "handle_u")?;
    ensure(again.lambda == c.lambda, "lambda")?;
    ensure(again.z == c.z, "z")?;
    ensure(again.w == c.w, "w")?;
    ensure(again.gamma == c.gamma, "gamma")?;
    ensure(again.n == c.n, "n")?;
    ensure(again == *c, "canonical")
}

pub fn is_valid(c: &Certificate) -> bool {
    validate_certificate(c).is_ok()
}

pub const MUTATION_KINDS: u64 = 18;

/// `(p+1)/2` when that changes some support coefficient; otherwise (as for
/// `K3`, whose only coefficient is `P_{K3,K3} ≡ 1`) a `p` with `1-p < δ`.
fn shifted_p(c: &Certificate) -> Rational {
    let mid = (&c.p + Rational::one()) / int(2);
    let moves = build_table(&c.f).ok().is_some_and(|t| {
        c.support.iter().any(|r| t.eval_p(&r.h, &mid).map_or(true, |v| v != r.p_value))
    });
    if moves {
        mid
    } else {
        Rational::one() - &c.delta / int(2)
    }
}

/// A copy of `c` with one field changed; `selector` picks the field (and
/// the support row, for row fields).
pub fn mutate_certificate(c: &Certificate, selector: u64) -> Certificate {
    let mut out = c.clone();
    let kind = selector % MUTATION_KINDS;
    let row = (selector / MUTATION_KINDS) as usize % c.support.len().max(1);
    let bump = |q: &QuadValue| if q.is_zero() { QuadValue::one() } else { q.neg() };
    match kind {
        0 => out.p = shifted_p(c),
        1 => out.delta = &c.delta / int(2),
        2 => out.lambda = &c.lambda / int(2),
        3 => out.n = if c.n > 2 { c.n - 2 } else { 4 },
        4 => out.n = c.n + 2,
        5 => out.z = if c.z > 3 { c.z - 1 } else { c.z + 1 },
        6 => out.k = c.k + 4,
        7 => out.gamma = if c.gamma.is_zero() { rat(1, 2) } else { &c.gamma / int(2) },
        8 => out.gap = c.gap.scale(&int(2)),
        9 => out.support[row].t_u = bump(&c.support[row].t_u).scale(&int(2)),
        10 => out.support[row].t_w = c.support[row].t_w.scale(&int(2)),
        11 => out.support[row].contribution = bump(&c.support[row].contribution).scale(&int(3)),
        12 => out.support[row].p_value = &c.support[row].p_value + Rational::one(),
        13 => out.support[row].t_b = &c.support[row].t_b + Rational::one(),
        14 => {
            if c.support.len() > 1 {
                out.support.remove(row);
            } else {
                out.support.push(c.support[0].clone());
            }
        }
        15 => {
            out.w = match &c.w {
                WChoice::Const1 => WChoice::Kernel(KernelHandle::Const { alpha: rat(1, 2) }),
                WChoice::Kernel(_) => WChoice::Const1,
            }
        }
        16 => {
            out.handle_u = match &c.handle_u {
                KernelHandle::Fp(s) => KernelHandle::Fp(s.with_k(s.k + 4)),
                KernelHandle::F2(f) => KernelHandle::F2(
                    crate::ffkernel::F2Form::new(f.k(), f.bits() ^ 1).expect("same dimension"),
                ),
                KernelHandle::Const { alpha } => KernelHandle::Const { alpha: alpha / int(2) },
            }
        }
        _ => out.m = c.m + 1,
    }
    out
}

/// `Σ_H P · δ^e · t_B · (λ^e t_U)^n · t_W` from the stored rows, at an
/// arbitrary even `n` (the gap itself at `n = N`).
pub fn gap_at_n(c: &Certificate, n: u32) -> Result<QuadValue, CertifyError> {
    let mut acc = QuadValue::zero();
    for r in &c.support {
        let e = r.h.edge_count();
        let term = r.t_u.scale(&pow_u(&c.lambda, e)).pow(n)?.checked_mul(&r.t_w)?;
        acc = acc.checked_add(&term.scale(&(&r.p_value * pow_u(&c.delta, e) * &r.t_b)))?;
    }
    Ok(acc)
}

/// `δ · B ⊗ (λU)^{⊗N} ⊗ W` as lazy factors (needs explicit step kernels for
/// `U` and `W`, so `F_p` handles only with `p = 3`).
pub fn delta_kernel(c: &Certificate) -> Result<LazyTensorKernel, CertifyError> {
    let u = c.handle_u.step_kernel()?.scale(&c.lambda);
    let mut factors = vec![balanced_b()];
    factors.extend(core::iter::repeat_n(u, c.n as usize));
    factors.push(match &c.w {
        WChoice::Const1 => StepKernel::constant(Rational::one()),
        WChoice::Kernel(h) => h.step_kernel()?,
    });
    Ok(LazyTensorKernel::new(factors, c.delta.clone())?)
}

/// `ρ_F(W_p + Δ) - rand(F,p)` by a direct block sum over the materialized
/// `Δ`; equals the certificate's gap.
pub fn materialized_gap(c: &Certificate, max_blocks: usize, budget: u64) -> Result<Rational, CertifyError> {
    let d = delta_kernel(c)?.materialize(max_blocks)?;
    let w = StepKernel::constant(c.p.clone()).add(&d);
    Ok(w.rho_induced_with_budget(&c.f, budget)? - rand_density(&c.f, &c.p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DEFAULT_TERM_BUDGET;

    fn full(name: &str, p: Rational) -> Certificate {
        certify_full(&Graph::named(name).unwrap(), &p, &rat(1, 4), &CertifyOptions::default()).unwrap()
    }

    #[test]
    fn linear_route_example() {
        let f = Graph::named("path3+v").unwrap();
        let c = certify_linear(&f, &rat(3, 10)).unwrap();
        assert_eq!(c.sigma, -1);
        assert!(c.gap.is_positive());
        assert!(matches!(certify_linear(&f, &rat(2, 5)), Err(CertifyError::ExceptionalPoint)));
        assert!(matches!(certify_linear(&Graph::cycle(5), &rat(1, 2)), Err(CertifyError::ExceptionalPoint)));
    }

    #[test]
    fn diagnostic_rows() {
        let d = c5_diagnostic().unwrap();
        assert_eq!(d.p_p2, rat(-5, 128));
        assert_eq!(d.p_c4, rat(-5, 64));
        let (zero, rest) = d.rows.split_last().unwrap();
        assert_eq!(zero.status, DiagnosticStatus::Degenerate);
        for r in rest {
            assert_eq!(r.status, DiagnosticStatus::EvenNegative, "{}", r.label);
            assert!(r.t_p2.is_zero());
        }
        let b = &rest[rest.len() - 1];
        assert_eq!(b.lowest_order, Some(4));
        assert_eq!(b.lowest_coeff, Some(rat(-5, 1024)));
    }

    #[test]
    fn triangle_certificate_by_hand() {
        let c = full("K3", rat(1, 2));
        assert_eq!(c.support.len(), 1);
        assert_eq!((c.z, c.n, c.lambda.clone()), (3, 2, Rational::one()));
        // P = 1, δ³ = 1/64, t(K3,B) = (1/2)³, t(K3,U)² = 1/64, W ≡ 1
        assert_eq!(c.gap, QuadValue::from_rational(rat(1, 64) * rat(1, 8) * rat(1, 64)));
        assert!(is_valid(&c));
        assert_eq!(materialized_gap(&c, 64, DEFAULT_TERM_BUDGET).unwrap(), rat(1, 32768));
    }

    #[test]
    fn k4_certificate_materializes_at_small_n() {
        let c = full("K4", rat(1, 2));
        assert!(is_valid(&c));
        assert_eq!(gap_at_n(&c, c.n).unwrap(), c.gap);
        // 4^N blocks are out of reach at N = 12; the same algebra at N = 2
        let mut small = c.clone();
        small.n = 2;
        let direct = materialized_gap(&small, 64, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(QuadValue::from_rational(direct), gap_at_n(&c, 2).unwrap());
    }

    #[test]
    fn c5_certificate() {
        let c = full("C5", rat(1, 2));
        assert_eq!(c.z, 5);
        assert!(matches!(c.w, WChoice::Kernel(_)));
        assert_eq!(c.gap.sign(), 1);
        validate_certificate(&c).unwrap();
        for sel in 0..MUTATION_KINDS * 3 {
            assert!(!is_valid(&mutate_certificate(&c, sel)), "mutation {sel} accepted");
        }
    }

    #[test]
    fn rejects_zero_delta() {
        let r = certify_full(&Graph::cycle(5), &rat(1, 2), &Rational::zero(), &CertifyOptions::default());
        assert!(matches!(r, Err(CertifyError::Precondition(_))));
        let r = certify_full(&Graph::cycle(5), &rat(1, 10), &rat(1, 4), &CertifyOptions::default());
        assert!(matches!(r, Err(CertifyError::Precondition(_))));
    }

    #[test]
    fn dyadic_bound() {
        let v = QuadValue::sqrt_times(2, rat(1, 2)).unwrap();
        let g = dyadic_ceil(&v, 10).unwrap();
        assert!(QuadValue::from_rational(g.clone()).cmp_value(&v).unwrap() == Ordering::Greater);
        assert!(QuadValue::from_rational(g - rat(1, 1024)).cmp_value(&v).unwrap() == Ordering::Less);
    }

    #[test]
    fn minimal_even_n() {
        // 1 > (1/2)^n · 10 first at n = 4
        let n = min_even_n(&rat(1, 2), &QuadValue::one(), &int(10), 1000).unwrap();
        assert_eq!(n, 4);
        let n = min_even_n(&rat(9, 10), &QuadValue::one(), &int(1000), 1000).unwrap();
        assert!(rat(9, 10).pow(n as i32) * int(1000) < Rational::one());
        assert!(rat(9, 10).pow(n as i32 - 2) * int(1000) >= Rational::one());
    }
}
