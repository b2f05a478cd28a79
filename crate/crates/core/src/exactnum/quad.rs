use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{rational_sign, Rational};
use super::ExactError;

/// An exact real number `Σ c_r √r` over square-free radicands `r`, where
/// the radicands (other than 1) span a multiplicative square-class group of
/// rank at most two. In other words an element of `Q(√a, √b)`.
///
/// Internally the value is a sparse sorted list of `(radicand, coeff)` with
/// nonzero coefficients; radicand 1 carries the rational part.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadValue {
    terms: Vec<(u64, Rational)>,
}

pub(crate) fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut d = 2u64;
    let mut m = n;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// `n = s² r` with `r` square-free.
fn split_square(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut r = n;
    let mut d = 2u64;
    while d * d <= r {
        while r.is_multiple_of(d * d) {
            r /= d * d;
            s *= d;
        }
        d += 1;
    }
    (s, r)
}

/// `√r · √t = g √(rt/g²)` for square-free `r`, `t`.
fn mul_radicands(r: u64, t: u64) -> (u64, u64) {
    let g = r.gcd(&t);
    (g, (r / g) * (t / g))
}

/// Square-class basis of a radicand set: `[]`, `[a]` or `[a, b]` with
/// `a < b` the two smallest non-unit classes in the span.
fn basis_of<'a>(rads: impl Iterator<Item = &'a u64>) -> Result<Vec<u64>, ExactError> {
    let mut nonunit: Vec<u64> = rads.copied().filter(|&r| r != 1).collect();
    nonunit.sort_unstable();
    nonunit.dedup();
    match nonunit.len() {
        0 => Ok(Vec::new()),
        1 => Ok(nonunit),
        _ => {
            let (a, b) = (nonunit[0], nonunit[1]);
            let (_, c) = mul_radicands(a, b);
            if nonunit.iter().any(|&r| r != a && r != b && r != c) {
                return Err(ExactError::RadicandOverflow);
            }
            let mut span = [a, b, c];
            span.sort_unstable();
            Ok(vec![span[0], span[1]])
        }
    }
}

fn sign2(x: &Rational, y: &Rational, a: u64) -> i8 {
    let sx = rational_sign(x);
    let sy = rational_sign(y);
    if sy == 0 || sx == sy {
        return if sx == 0 { sy } else { sx };
    }
    if sx == 0 {
        return sy;
    }
    let d = x * x - y * y * Rational::from_integer(BigInt::from(a));
    sx * rational_sign(&d)
}

impl QuadValue {
    pub fn zero() -> Self {
        QuadValue { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        if r.is_zero() {
            Self::zero()
        } else {
            QuadValue { terms: vec![(1, r)] }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `c · √n` for any positive integer `n` (square factors are pulled out).
    pub fn sqrt_times(n: u64, c: Rational) -> Result<Self, ExactError> {
        if n == 0 {
            return Err(ExactError::BadRadicand(0));
        }
        let (s, r) = split_square(n);
        let c = c * Rational::from_integer(BigInt::from(s));
        Self::from_terms(BTreeMap::from([(r, c)]))
    }

    pub fn sqrt(n: u64) -> Result<Self, ExactError> {
        Self::sqrt_times(n, Rational::one())
    }

    /// Builds `c0 + c1√a + c2√b + c3√(ab)` from the serialized layout.
    pub fn from_parts(radicands: &[u64], coords: &[Rational; 4]) -> Result<Self, ExactError> {
        if radicands.len() > 2 {
            return Err(ExactError::RadicandOverflow);
        }
        for &r in radicands {
            if r < 2 || !is_squarefree(r) {
                return Err(ExactError::BadRadicand(r));
            }
        }
        if radicands.len() == 2 && radicands[0] == radicands[1] {
            return Err(ExactError::BadRadicand(radicands[1]));
        }
        let mut acc = Self::from_rational(coords[0].clone());
        let slots: [Option<u64>; 3] = match radicands {
            [] => [None, None, None],
            [a] => [Some(*a), None, None],
            [a, b] => [Some(*a), Some(*b), Some(a * b)],
            _ => unreachable!(),
        };
        for (slot, c) in slots.iter().zip(coords[1..].iter()) {
            match slot {
                Some(n) => acc = acc.checked_add(&Self::sqrt_times(*n, c.clone())?)?,
                None if !c.is_zero() => return Err(ExactError::RadicandOverflow),
                None => {}
            }
        }
        Ok(acc)
    }

    fn from_terms(map: BTreeMap<u64, Rational>) -> Result<Self, ExactError> {
        let terms: Vec<(u64, Rational)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        basis_of(terms.iter().map(|(r, _)| r))?;
        Ok(QuadValue { terms })
    }

    /// Sparse `(radicand, coefficient)` view; radicand 1 is the rational part.
    pub fn terms(&self) -> &[(u64, Rational)] {
        &self.terms
    }

    pub fn coeff_of(&self, radicand: u64) -> Rational {
        self.terms
            .iter()
            .find(|(r, _)| *r == radicand)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Square-free basis radicands (0, 1 or 2 of them, ascending).
    pub fn radicands(&self) -> Vec<u64> {
        basis_of(self.terms.iter().map(|(r, _)| r)).expect("invariant: rank <= 2")
    }

    /// Coordinates `[c0, c1, c2, c3]` in the basis `1, √a, √b, √(ab)` where
    /// `[a, b] = self.radicands()` (missing slots are zero).
    pub fn coords(&self) -> [Rational; 4] {
        let rads = self.radicands();
        let mut out = [
            self.coeff_of(1),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
        ];
        if let Some(&a) = rads.first() {
            out[1] = self.coeff_of(a);
        }
        if let [a, b] = rads[..] {
            out[2] = self.coeff_of(b);
            let (g, c) = mul_radicands(a, b);
            out[3] = self.coeff_of(c) / Rational::from_integer(BigInt::from(g));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match &self.terms[..] {
            [] => Some(Rational::zero()),
            [(1, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        let mut map: BTreeMap<u64, Rational> = self.terms.iter().cloned().collect();
        for (r, c) in &other.terms {
            *map.entry(*r).or_insert_with(Rational::zero) += c;
        }
        Self::from_terms(map)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        let mut map: BTreeMap<u64, Rational> = BTreeMap::new();
        for (r, c) in &self.terms {
            for (t, d) in &other.terms {
                let (g, rt) = mul_radicands(*r, *t);
                let v = c * d * Rational::from_integer(BigInt::from(g));
                *map.entry(rt).or_insert_with(Rational::zero) += v;
            }
        }
        Self::from_terms(map)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QuadValue {
            terms: self.terms.iter().map(|(r, x)| (*r, x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        QuadValue {
            terms: self.terms.iter().map(|(r, x)| (*r, -x)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        if quad_sign(self) < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, mut e: u32) -> Result<Self, ExactError> {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Galois conjugate flipping the sign of `√t` for every radicand `t`
    /// whose square class involves `flip` (with respect to `basis`).
    fn conjugate(&self, basis: &[u64], flip: u64) -> Self {
        let flips = |t: u64| -> bool {
            match basis {
                [a] => t == *a && flip == *a,
                [a, b] => {
                    let (_, c) = mul_radicands(*a, *b);
                    // coordinates of t in the F2 basis (a, b)
                    let (ea, eb) = if t == *a {
                        (true, false)
                    } else if t == *b {
                        (false, true)
                    } else if t == c {
                        (true, true)
                    } else {
                        (false, false)
                    };
                    if flip == *a {
                        ea
                    } else {
                        eb
                    }
                }
                _ => false,
            }
        };
        QuadValue {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| (*r, if flips(*r) { -c } else { c.clone() }))
                .collect(),
        }
    }

    pub fn checked_inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let basis = self.radicands();
        match basis[..] {
            [] => Ok(Self::from_rational(Rational::one() / &self.terms[0].1)),
            [a] => {
                let conj = self.conjugate(&basis, a);
                let norm = self.checked_mul(&conj)?;
                let n = norm.as_rational().expect("norm of Q(√a) element is rational");
                Ok(conj.scale(&(Rational::one() / n)))
            }
            [_, b] => {
                let conj = self.conjugate(&basis, b);
                let w = self.checked_mul(&conj)?;
                Ok(conj.checked_mul(&w.checked_inv()?)?)
            }
            _ => unreachable!(),
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_mul(&other.checked_inv()?)
    }

    pub fn sign(&self) -> i8 {
        quad_sign(self)
    }

    pub fn cmp_value(&self, other: &Self) -> Result<Ordering, ExactError> {
        Ok(match self.checked_sub(other)?.sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }
}

impl From<Rational> for QuadValue {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

/// Exact sign of a tower value, by isolating one radical at a time and
/// squaring. No floating point is involved.
pub fn quad_sign(v: &QuadValue) -> i8 {
    let basis = v.radicands();
    match basis[..] {
        [] => v.terms.first().map_or(0, |(_, c)| rational_sign(c)),
        [a] => sign2(&v.coeff_of(1), &v.coeff_of(a), a),
        [a, b] => {
            let (g, c) = mul_radicands(a, b);
            let g = Rational::from_integer(BigInt::from(g));
            // v = A + B√b with A = x1 + y1√a, B = x2 + y2√a
            let x1 = v.coeff_of(1);
            let y1 = v.coeff_of(a);
            let x2 = v.coeff_of(b);
            let y2 = v.coeff_of(c) / &g;
            let sa = sign2(&x1, &y1, a);
            let sb = sign2(&x2, &y2, a);
            if sb == 0 || sa == sb {
                return if sa == 0 { sb } else { sa };
            }
            if sa == 0 {
                return sb;
            }
            let ar = Rational::from_integer(BigInt::from(a));
            let br = Rational::from_integer(BigInt::from(b));
            // A² - bB²
            let dx = &x1 * &x1 + &ar * &y1 * &y1 - &br * (&x2 * &x2 + &ar * &y2 * &y2);
            let dy = Rational::from_integer(BigInt::from(2)) * (&x1 * &y1 - &br * &x2 * &y2);
            sa * sign2(&dx, &dy, a)
        }
        _ => unreachable!(),
    }
}

impl fmt::Debug for QuadValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuadValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let c = c.abs();
            if *r == 1 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "√{r}")?;
            } else {
                write!(f, "{c}·√{r}")?;
            }
        }
        Ok(())
    }
}
