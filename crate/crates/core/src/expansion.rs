//! The polynomial expansion
//!
//! `ρ_F(W_p + Δ) = rand(F,p) + Σ_H P_{H,F}(p) · t(H, Δ)`,
//!
//! summed over the graphs `H` without isolated vertices that fit in
//! `K_{v(F)}`, with
//!
//! `P_{H,F}(p) = rand(F,p) / (p(1-p))^{e(H)} · S_{H,F}(p)`,
//! `S_{H,F}(p) = Σ_j (1-p)^{e(H)-j} (-p)^j n_j(H,F)`.
//!
//! `P_{H,F}` is a polynomial: each `n_j` term carries `p^{|E|-e(H)+j}
//! (1-p)^{|Ē|-j}` with both exponents nonnegative, and that is how it is
//! stored.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::exactnum::{isolate_real_roots, ExactError, PolyP, QuadValue, Rational, RootInterval};
use crate::graphs::{count_nj, enumerate_h, CanonGraph, Graph, GraphError};
use crate::kernel::{KernelError, StepKernel, DEFAULT_TERM_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpansionError {
    #[error("v(F) = {0} is outside 3..=7")]
    OrderOutOfRange(usize),
    #[error("p must lie strictly between 0 and 1")]
    BoundaryP,
    #[error("S_(K3,F) vanishes identically")]
    IdenticallyZero,
    #[error("graph is not in the expansion table")]
    UnknownGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub const MIN_ORDER: usize = 3;
pub const MAX_ORDER: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub h: CanonGraph,
    pub nj: Vec<u64>,
    /// `S_{H,F}` in `p`.
    pub s: PolyP,
    /// `P_{H,F}` in `p`.
    pub p_poly: PolyP,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionTable {
    f: Graph,
    entries: Vec<TableEntry>,
}

/// `p^a (1-p)^b`.
fn monomial(a: usize, b: usize) -> PolyP {
    &PolyP::x().pow(a as u32) * &PolyP::one_minus_x().pow(b as u32)
}

pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// `rand(F,p) = p^{e(F)} (1-p)^{C(v(F),2) - e(F)}`.
pub fn rand_density(f: &Graph, p: &Rational) -> Rational {
    let e = f.edge_count();
    let ne = pair_count(f.order()) - e;
    p.pow(e as i32) * (Rational::one() - p).pow(ne as i32)
}

pub fn rand_poly(f: &Graph) -> PolyP {
    let e = f.edge_count();
    monomial(e, pair_count(f.order()) - e)
}

/// `S_{H,F}` from the counts `n_j`.
pub fn s_poly(nj: &[u64]) -> PolyP {
    let e = nj.len() - 1;
    let mut acc = PolyP::zero();
    for (j, &n) in nj.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let term = monomial(j, e - j).scale(&Rational::from_integer((sign * n as i64).into()));
        acc = &acc + &term;
    }
    acc
}

fn p_poly(f: &Graph, nj: &[u64]) -> PolyP {
    let e_f = f.edge_count();
    let ne_f = pair_count(f.order()) - e_f;
    let e = nj.len() - 1;
    let mut acc = PolyP::zero();
    for (j, &n) in nj.iter().enumerate() {
        if n == 0 {
            continue;
        }
        // n_j > 0 forces e - j <= e_f and j <= ne_f
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let term = monomial(e_f + j - e, ne_f - j).scale(&Rational::from_integer((sign * n as i64).into()));
        acc = &acc + &term;
    }
    acc
}

fn check_order(f: &Graph) -> Result<(), ExpansionError> {
    if (MIN_ORDER..=MAX_ORDER).contains(&f.order()) {
        Ok(())
    } else {
        Err(ExpansionError::OrderOutOfRange(f.order()))
    }
}

fn check_p(p: &Rational) -> Result<(), ExpansionError> {
    if p.is_positive() && *p < Rational::one() {
        Ok(())
    } else {
        Err(ExpansionError::BoundaryP)
    }
}

pub fn build_table(f: &Graph) -> Result<ExpansionTable, ExpansionError> {
    check_order(f)?;
    let mut entries = Vec::new();
    for h in enumerate_h(f.order())? {
        let nj = count_nj(&h.to_graph(), f)?;
        entries.push(TableEntry { h, s: s_poly(&nj), p_poly: p_poly(f, &nj), nj });
    }
    Ok(ExpansionTable { f: f.clone(), entries })
}

impl ExpansionTable {
    pub fn f(&self) -> &Graph {
        &self.f
    }

    pub fn m(&self) -> usize {
        self.f.order()
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn entry(&self, h: &CanonGraph) -> Option<&TableEntry> {
        self.entries.binary_search_by(|e| e.h.cmp(h)).ok().map(|i| &self.entries[i])
    }

    /// `P_{H,F}(p)`, evaluated through the factored form
    /// `rand · S / (p(1-p))^{e(H)}`.
    pub fn eval_p(&self, h: &CanonGraph, p: &Rational) -> Result<Rational, ExpansionError> {
        check_p(p)?;
        let e = self.entry(h).ok_or(ExpansionError::UnknownGraph)?;
        let pq = p * (Rational::one() - p);
        Ok(rand_density(&self.f, p) * e.s.eval(p) / pq.pow(h.edge_count() as i32))
    }

    /// `Σ_H P_{H,F}(p) · t[H]`; graphs missing from `t` count as zero.
    pub fn expansion_gap(
        &self,
        p: &Rational,
        t: &BTreeMap<CanonGraph, QuadValue>,
    ) -> Result<QuadValue, ExpansionError> {
        check_p(p)?;
        let mut acc = QuadValue::zero();
        for (h, v) in t {
            if v.is_zero() {
                continue;
            }
            let coeff = self.eval_p(h, p)?;
            acc = acc.checked_add(&v.scale(&coeff))?;
        }
        Ok(acc)
    }

    /// `t(H, D)` for every `H` in the table.
    pub fn t_map(&self, d: &StepKernel, budget: u64) -> Result<BTreeMap<CanonGraph, QuadValue>, ExpansionError> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            let t = d.t_hom_with_budget(&e.h.to_graph(), budget)?;
            out.insert(e.h, QuadValue::from_rational(t));
        }
        Ok(out)
    }

    /// `ε ↦ ρ_F(W_p + εD) - rand(F,p) = Σ_H P_{H,F}(p) t(H,D) ε^{e(H)}`.
    pub fn epsilon_polynomial(&self, p: &Rational, d: &StepKernel) -> Result<PolyP, ExpansionError> {
        check_p(p)?;
        let mut coeffs = vec![Rational::zero(); pair_count(self.m()) + 1];
        for e in &self.entries {
            let t = d.t_hom(&e.h.to_graph())?;
            if t.is_zero() {
                continue;
            }
            coeffs[e.h.edge_count()] += self.eval_p(&e.h, p)? * t;
        }
        Ok(PolyP::new(coeffs))
    }
}

/// Checks `ρ_F(W_p + D) = rand(F,p) + Σ_H P_{H,F}(p) t(H,D)` exactly, both
/// sides computed independently.
pub fn verify_expansion_identity(f: &Graph, p: &Rational, d: &StepKernel) -> Result<bool, ExpansionError> {
    let table = build_table(f)?;
    verify_with_table(&table, p, d)
}

pub fn verify_with_table(table: &ExpansionTable, p: &Rational, d: &StepKernel) -> Result<bool, ExpansionError> {
    let direct = StepKernel::constant(p.clone()).add(d).rho_induced(table.f())? - rand_density(table.f(), p);
    let t = table.t_map(d, DEFAULT_TERM_BUDGET)?;
    Ok(table.expansion_gap(p, &t)? == QuadValue::from_rational(direct))
}

pub fn epsilon_polynomial(f: &Graph, p: &Rational, d: &StepKernel) -> Result<PolyP, ExpansionError> {
    build_table(f)?.epsilon_polynomial(p, d)
}

/// `S_{K3,F}`, whose zeros in `(0,1)` are exactly those of `P_{K3,F}`.
pub fn s_k3(f: &Graph) -> Result<PolyP, ExpansionError> {
    if f.order() < 3 {
        return Err(ExpansionError::OrderOutOfRange(f.order()));
    }
    Ok(s_poly(&count_nj(&Graph::complete(3), f)?))
}

/// Densities in `(0,1)` where the triangle coefficient vanishes.
pub fn exceptional_points(f: &Graph) -> Result<Vec<RootInterval>, ExpansionError> {
    let s = s_k3(f)?;
    if s.is_zero() {
        return Err(ExpansionError::IdenticallyZero);
    }
    Ok(isolate_real_roots(&s, &Rational::zero(), &Rational::one())?)
}
