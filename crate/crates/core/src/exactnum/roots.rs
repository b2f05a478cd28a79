use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::PolyP;
use super::rational::{int, rational_sign, Rational};
use super::ExactError;

/// An isolating bracket for one real root of `polynomial`.
///
/// `polynomial` has exactly one distinct root in `[lo, hi]`, of the given
/// multiplicity. When `lo == hi` the root is rational and equals `lo`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub polynomial: PolyP,
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: u32,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Largest absolute value for which rational-root candidates are found by
/// trial division.
const TRIAL_DIVISION_LIMIT: u64 = 1 << 40;

pub fn sturm_chain(q: &PolyP) -> Vec<PolyP> {
    let mut chain = vec![q.clone()];
    if q.is_zero() {
        return chain;
    }
    let mut next = q.derivative();
    while !next.is_zero() {
        chain.push(next);
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        next = -&r;
    }
    chain
}

fn sign_changes(chain: &[PolyP], x: &Rational) -> usize {
    let mut changes = 0;
    let mut prev = 0i8;
    for s in chain {
        let v = rational_sign(&s.eval(x));
        if v == 0 {
            continue;
        }
        if prev != 0 && v != prev {
            changes += 1;
        }
        prev = v;
    }
    changes
}

/// Number of distinct real roots of `q` in `(lo, hi]`, from the Sturm
/// sequence sign-change difference.
pub fn sturm_root_count(q: &PolyP, lo: &Rational, hi: &Rational) -> usize {
    let chain = sturm_chain(q);
    sign_changes(&chain, lo).saturating_sub(sign_changes(&chain, hi))
}

/// Integer polynomial with the same roots as `q` (cleared denominators).
fn integer_coeffs(q: &PolyP) -> Vec<BigInt> {
    let l = q
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    q.coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
        .collect()
}

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > TRIAL_DIVISION_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Some(out)
}

/// Divides out `(x - r)` as often as possible; returns the multiplicity.
fn strip_root(f: &mut PolyP, r: &Rational) -> u32 {
    let lin = PolyP::new(vec![-r.clone(), Rational::one()]);
    let mut mult = 0;
    while f.degree() > 0 && f.eval(r).is_zero() {
        let (q, rem) = f.div_rem(&lin);
        debug_assert!(rem.is_zero());
        *f = q;
        mult += 1;
    }
    mult
}

/// Rational roots by the rational-root theorem. Returns `(root, mult)` for
/// roots strictly inside `(lo, hi)` and strips every rational root found
/// (inside or not) from `f`.
fn extract_rational_roots(f: &mut PolyP, lo: &Rational, hi: &Rational) -> Vec<(Rational, u32)> {
    let mut found = Vec::new();
    let zero = Rational::zero();
    let m0 = strip_root(f, &zero);
    if m0 > 0 && lo < &zero && &zero < hi {
        found.push((zero, m0));
    }
    if f.degree() < 1 {
        return found;
    }
    let ic = integer_coeffs(f);
    let (Some(num), Some(den)) = (divisors(&ic[0]), divisors(ic.last().unwrap())) else {
        return found;
    };
    let mut cands: Vec<Rational> = Vec::new();
    for a in &num {
        for b in &den {
            let r = Rational::new(BigInt::from(*a), BigInt::from(*b));
            cands.push(r.clone());
            cands.push(-r);
        }
    }
    cands.sort();
    cands.dedup();
    for r in cands {
        if f.degree() < 1 {
            break;
        }
        let m = strip_root(f, &r);
        if m > 0 && lo < &r && &r < hi {
            found.push((r, m));
        }
    }
    found
}

/// Yun's square-free decomposition: `f = c · Π g_i^i` with each `g_i`
/// square-free and pairwise coprime. Returns the non-constant `(g_i, i)`.
fn squarefree_decomposition(f: &PolyP) -> Vec<(PolyP, u32)> {
    let mut out = Vec::new();
    if f.degree() < 1 {
        return out;
    }
    let df = f.derivative();
    let a = f.gcd(&df);
    let mut b = f.div_rem(&a).0;
    let c = df.div_rem(&a).0;
    let mut d = &c - &b.derivative();
    let mut i = 1u32;
    loop {
        let g = b.gcd(&d);
        let nb = b.div_rem(&g).0;
        if g.degree() > 0 {
            out.push((g.clone(), i));
        }
        b = nb;
        if b.degree() < 1 {
            break;
        }
        let c = d.div_rem(&g).0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

struct Isolated {
    factor: PolyP,
    lo: Rational,
    hi: Rational,
    mult: u32,
}

fn half(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Shrinks an isolating interval of a square-free factor by one bisection.
fn bisect_once(iv: &mut Isolated) {
    let m = half(&iv.lo, &iv.hi);
    let fm = iv.factor.eval(&m);
    if fm.is_zero() {
        iv.lo = m.clone();
        iv.hi = m;
        return;
    }
    let flo = rational_sign(&iv.factor.eval(&iv.lo));
    if flo * rational_sign(&fm) < 0 {
        iv.hi = m;
    } else {
        iv.lo = m;
    }
}

fn isolate_squarefree(g: &PolyP, mult: u32, lo: &Rational, hi: &Rational, out: &mut Vec<Isolated>) {
    let chain = sturm_chain(g);
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = sign_changes(&chain, &a).saturating_sub(sign_changes(&chain, &b));
        if n == 0 {
            continue;
        }
        if n == 1 {
            if g.degree() == 1 {
                let r = -g.coeff(0) / g.coeff(1);
                out.push(Isolated { factor: g.clone(), lo: r.clone(), hi: r, mult });
            } else {
                out.push(Isolated { factor: g.clone(), lo: a, hi: b, mult });
            }
            continue;
        }
        // split at a point that is not a root, so Sturm counts stay valid
        let mut m = half(&a, &b);
        let mut t = 2i64;
        while g.eval(&m).is_zero() {
            t += 1;
            m = &a + (&b - &a) / int(t);
        }
        stack.push((a, m.clone()));
        stack.push((m, b));
    }
}

/// Isolates every real root of `q` in the open interval `(lo, hi)`.
///
/// Rational roots are found first (rational-root theorem) and returned as
/// exact points; the remaining irrational roots are bracketed by Sturm
/// bisection on the square-free parts. Roots at `lo` or `hi` are excluded.
/// The returned closed brackets are pairwise disjoint and sorted.
pub fn isolate_real_roots(q: &PolyP, lo: &Rational, hi: &Rational) -> Result<Vec<RootInterval>, ExactError> {
    if q.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut f = q.clone();
    let mut items: Vec<Isolated> = Vec::new();
    for (r, m) in extract_rational_roots(&mut f, lo, hi) {
        items.push(Isolated {
            factor: PolyP::new(vec![-r.clone(), Rational::one()]),
            lo: r.clone(),
            hi: r,
            mult: m,
        });
    }
    strip_root(&mut f, lo);
    strip_root(&mut f, hi);
    if lo < hi {
        for (g, mult) in squarefree_decomposition(&f) {
            isolate_squarefree(&g, mult, lo, hi, &mut items);
        }
    }

    // refine until closed brackets are pairwise disjoint
    loop {
        items.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        let clash = (1..items.len()).find(|&i| items[i].lo <= items[i - 1].hi);
        let Some(i) = clash else { break };
        let mut progressed = false;
        for j in [i - 1, i] {
            if items[j].lo != items[j].hi {
                bisect_once(&mut items[j]);
                progressed = true;
            }
        }
        assert!(progressed, "two exact roots cannot coincide");
    }

    Ok(items
        .into_iter()
        .map(|iv| RootInterval {
            polynomial: q.clone(),
            lo: iv.lo,
            hi: iv.hi,
            multiplicity: iv.mult,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn example_cubic() -> PolyP {
        let p = PolyP::x();
        let q = PolyP::one_minus_x();
        let a = (&q.pow(2) * &p).scale(&int(-2));
        let b = (&q * &p.pow(2)).scale(&int(5));
        let c = p.pow(3).scale(&int(-3));
        &(&a + &b) + &c
    }

    #[test]
    fn exceptional_cubic_roots_are_exact() {
        let roots = isolate_real_roots(&example_cubic(), &int(0), &int(1)).unwrap();
        let pts: Vec<_> = roots.iter().map(|r| (r.lo.clone(), r.hi.clone())).collect();
        assert_eq!(pts, vec![(rat(2, 5), rat(2, 5)), (rat(1, 2), rat(1, 2))]);
        assert!(roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn boundary_root_excluded() {
        assert!(isolate_real_roots(&PolyP::x(), &int(0), &int(1)).unwrap().is_empty());
        // (1-x)^2 x: both roots on the boundary
        let f = &PolyP::one_minus_x().pow(2) * &PolyP::x();
        assert!(isolate_real_roots(&f, &int(0), &int(1)).unwrap().is_empty());
    }

    #[test]
    fn irrational_root_bracketed() {
        let f = PolyP::new(vec![rat(-1, 2), int(0), int(1)]);
        let roots = isolate_real_roots(&f, &int(0), &int(1)).unwrap();
        assert_eq!(roots.len(), 1);
        let r = &roots[0];
        assert!(r.lo < r.hi);
        // bisection oracle: 0.7071 lies in the bracket
        assert!(r.lo < rat(7072, 10000) && rat(7071, 10000) < r.hi);
        assert!(rational_sign(&f.eval(&r.lo)) * rational_sign(&f.eval(&r.hi)) < 0);
    }

    #[test]
    fn multiplicities_and_mixed_roots() {
        // (x - 1/3)^2 (x^2 - 1/2) (x - 3/4)
        let a = PolyP::new(vec![rat(-1, 3), int(1)]).pow(2);
        let b = PolyP::new(vec![rat(-1, 2), int(0), int(1)]);
        let c = PolyP::new(vec![rat(-3, 4), int(1)]);
        let f = &(&a * &b) * &c;
        let roots = isolate_real_roots(&f, &int(0), &int(1)).unwrap();
        assert_eq!(roots.len(), 3);
        assert_eq!((roots[0].lo.clone(), roots[0].multiplicity), (rat(1, 3), 2));
        assert!(!roots[1].is_exact());
        assert_eq!(roots[2].lo, rat(3, 4));
        assert!(roots[1].hi < rat(3, 4));
    }

    #[test]
    fn zero_polynomial_is_error() {
        assert_eq!(
            isolate_real_roots(&PolyP::zero(), &int(0), &int(1)),
            Err(ExactError::ZeroPolynomial)
        );
    }

    #[test]
    fn squarefree_parts() {
        let f = &PolyP::from_ints(&[-1, 1]).pow(3) * &PolyP::from_ints(&[2, 0, 1]);
        let parts = squarefree_decomposition(&f);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (PolyP::from_ints(&[2, 0, 1]), 1));
        assert_eq!(parts[1], (PolyP::from_ints(&[-1, 1]), 3));
    }
}
