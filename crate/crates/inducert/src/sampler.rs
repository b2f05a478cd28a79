//! Monte Carlo cross-checks: `W`-random graphs and empirical densities.
//!
//! Randomness is ChaCha8 seeded by `seed_from_u64(seed)`; repetition `r`
//! uses stream `r`, so reports do not depend on the thread count and are
//! bit-identical for a fixed seed. Positions of vertices are drawn as one
//! block index per tensor factor (the mixed-radix digits of a uniform
//! point are independent and uniform within each factor).

use inducert_core::certifier::{Certificate, WChoice};
use inducert_core::exactnum::{QuadValue, Rational};
use inducert_core::ffkernel::KernelHandle;
use inducert_core::kernel::balanced_b;
use inducert_core::{Graph, StepKernel};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{quad_f64, rational_f64};
use crate::json::rational_str;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SamplerError {
    #[error("kernel takes values outside [0, 1]")]
    RangeViolation,
    #[error("invalid sampler arguments: {0}")]
    InvalidArgs(&'static str),
}

/// A kernel that can be evaluated at drawn positions.
pub trait SampleKernel: Sync {
    /// Appends the coordinates of one uniform point of `[0,1]`.
    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut Vec<u32>);
    /// Number of coordinates [`draw`](Self::draw) appends.
    fn arity(&self) -> usize;
    fn value(&self, a: &[u32], b: &[u32]) -> f64;
    /// Whether all values lie in `[0,1]` (decided exactly).
    fn is_graphon(&self) -> bool;
}

#[derive(Clone, Debug)]
pub struct StepSampler {
    cumulative: Vec<f64>,
    values: Vec<Vec<f64>>,
    graphon: bool,
}

impl StepSampler {
    pub fn new(k: &StepKernel) -> Self {
        let mut acc = Rational::zero();
        let mut cumulative = Vec::with_capacity(k.blocks());
        for w in k.widths() {
            acc += w;
            cumulative.push(rational_f64(&acc));
        }
        StepSampler {
            cumulative,
            values: k.values().iter().map(|row| row.iter().map(rational_f64).collect()).collect(),
            graphon: k.range_check(&Rational::zero(), &Rational::one()),
        }
    }

    fn block_of(&self, x: f64) -> u32 {
        let i = self.cumulative.partition_point(|&c| c <= x);
        i.min(self.cumulative.len() - 1) as u32
    }
}

impl SampleKernel for StepSampler {
    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut Vec<u32>) {
        out.push(self.block_of(rng.gen::<f64>()));
    }

    fn arity(&self) -> usize {
        1
    }

    fn value(&self, a: &[u32], b: &[u32]) -> f64 {
        self.values[a[0] as usize][b[0] as usize]
    }

    fn is_graphon(&self) -> bool {
        self.graphon
    }
}

/// One factor of a tensor kernel, on its own coordinates.
#[derive(Clone, Debug)]
enum Factor {
    Step(StepSampler),
    /// `cos(2π s·Σ(x_i+y_i)² / p)` on `F_p^k`.
    Fp { p: u32, k: usize, s: u32, cos: Vec<f64> },
    /// `(-1)^{q(x+y)}` on `F_2^k`.
    F2 { k: usize, form: inducert_core::ffkernel::F2Form },
    Const(f64),
}

impl Factor {
    fn from_handle(h: &KernelHandle) -> Self {
        match h {
            KernelHandle::Fp(s) => {
                let p = s.p as u32;
                let cos = (0..p).map(|r| (2.0 * core::f64::consts::PI * r as f64 / p as f64).cos()).collect();
                Factor::Fp { p, k: s.k as usize, s: s.s as u32, cos }
            }
            KernelHandle::F2(f) => Factor::F2 { k: f.k(), form: f.clone() },
            KernelHandle::Const { alpha } => Factor::Const(-rational_f64(alpha)),
        }
    }

    fn arity(&self) -> usize {
        match self {
            Factor::Step(_) | Factor::F2 { .. } => 1,
            Factor::Fp { k, .. } => *k,
            Factor::Const(_) => 0,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut Vec<u32>) {
        match self {
            Factor::Step(s) => s.draw(rng, out),
            Factor::Fp { p, k, .. } => out.extend((0..*k).map(|_| rng.gen_range(0..*p))),
            Factor::F2 { k, .. } => out.push(rng.gen_range(0..1u32 << k)),
            Factor::Const(_) => {}
        }
    }

    fn value(&self, a: &[u32], b: &[u32]) -> f64 {
        match self {
            Factor::Step(s) => s.value(a, b),
            Factor::Fp { p, s, cos, .. } => {
                let q = a.iter().zip(b).map(|(x, y)| ((x + y) % p) * ((x + y) % p) % p).sum::<u32>() * s % p;
                cos[q as usize]
            }
            Factor::F2 { form, .. } => {
                if form.eval((a[0] ^ b[0]) as u64) == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Factor::Const(c) => *c,
        }
    }
}

/// `shift + scalar · Π_i factor_i`, each factor on its own coordinates.
#[derive(Clone, Debug)]
pub struct TensorSampler {
    shift: f64,
    scalar: f64,
    factors: Vec<Factor>,
    graphon: bool,
}

impl TensorSampler {
    /// `W_p + Δ` with `Δ = δ · B ⊗ (λU)^{⊗N} ⊗ W` from a certificate.
    pub fn from_certificate(c: &Certificate) -> Self {
        let lambda = rational_f64(&c.lambda);
        let mut factors = vec![Factor::Step(StepSampler::new(&balanced_b()))];
        let u = Factor::from_handle(&c.handle_u);
        // λ is folded into the scalar: λ^N
        factors.extend(std::iter::repeat_n(u, c.n as usize));
        if let WChoice::Kernel(h) = &c.w {
            factors.push(Factor::from_handle(h));
        }
        // every factor is bounded by 1 in absolute value and λ ≤ 1, so
        // |Δ| ≤ δ ≤ min(p, 1-p); the constant handle is bounded by α
        let bounded = |h: &KernelHandle| match h {
            KernelHandle::Const { alpha } => alpha.abs() <= Rational::one(),
            _ => true,
        };
        let w_ok = match &c.w {
            WChoice::Const1 => true,
            WChoice::Kernel(h) => bounded(h),
        };
        let graphon = bounded(&c.handle_u)
            && w_ok
            && c.lambda.abs() <= Rational::one()
            && c.delta.abs() <= c.p.clone().min(Rational::one() - &c.p);
        TensorSampler {
            shift: rational_f64(&c.p),
            scalar: rational_f64(&c.delta) * lambda.powi(c.n as i32),
            factors,
            graphon,
        }
    }
}

impl SampleKernel for TensorSampler {
    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut Vec<u32>) {
        for f in &self.factors {
            f.draw(rng, out);
        }
    }

    fn arity(&self) -> usize {
        self.factors.iter().map(Factor::arity).sum()
    }

    fn value(&self, a: &[u32], b: &[u32]) -> f64 {
        let mut prod = self.scalar;
        let mut at = 0;
        for f in &self.factors {
            let w = f.arity();
            prod *= f.value(&a[at..at + w], &b[at..at + w]);
            at += w;
        }
        self.shift + prod
    }

    fn is_graphon(&self) -> bool {
        self.graphon
    }
}

/// Adjacency of a sampled graph as bit rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledGraph {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl SampledGraph {
    fn new(n: usize) -> Self {
        SampledGraph { n, rows: vec![vec![0; n.div_ceil(64)]; n] }
    }

    fn set(&mut self, u: usize, v: usize) {
        self.rows[u][v / 64] |= 1 << (v % 64);
        self.rows[v][u / 64] |= 1 << (u % 64);
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().flatten().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edge_density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.edge_count() as f64 / (self.n * (self.n - 1) / 2) as f64
    }

    /// graph6 text for graphs with at most 62 vertices.
    pub fn to_graph6(&self) -> Option<String> {
        if self.n > 62 {
            return None;
        }
        let mut g = Graph::empty(self.n).ok()?;
        for v in 1..self.n {
            for u in 0..v {
                if self.has_edge(u, v) {
                    g.add_edge(u, v).ok()?;
                }
            }
        }
        Some(inducert_core::graphs::to_graph6(&g))
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_points<K: SampleKernel + ?Sized>(w: &K, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    (0..n)
        .map(|_| {
            let mut p = Vec::with_capacity(w.arity());
            w.draw(rng, &mut p);
            p
        })
        .collect()
}

fn sample_with<K: SampleKernel + ?Sized>(w: &K, n: usize, rng: &mut ChaCha8Rng) -> SampledGraph {
    let pts = draw_points(w, n, rng);
    let mut g = SampledGraph::new(n);
    for v in 1..n {
        for u in 0..v {
            if rng.gen::<f64>() < w.value(&pts[u], &pts[v]) {
                g.set(u, v);
            }
        }
    }
    g
}

/// `G(n, W)`: independent uniform positions, then each pair independently
/// with probability `W(x_u, x_v)`.
pub fn sample_graph<K: SampleKernel + ?Sized>(w: &K, n: usize, seed: u64) -> Result<SampledGraph, SamplerError> {
    if !w.is_graphon() {
        return Err(SamplerError::RangeViolation);
    }
    if n < 2 {
        return Err(SamplerError::InvalidArgs("n must be at least 2"));
    }
    Ok(sample_with(w, n, &mut rng_for(seed, 0)))
}

/// Injective maps examined exactly per sampled graph before switching to
/// random maps.
pub const EXACT_MAP_LIMIT: u64 = 200_000;
pub const RANDOM_MAPS: usize = 20_000;

fn falling(n: usize, k: usize) -> Option<u64> {
    (0..k).try_fold(1u64, |acc, i| acc.checked_mul((n - i) as u64))
}

/// Fraction of injective maps `V(F) → V(G)` that are induced copies of the
/// labeled graph `F`.
fn induced_fraction(f: &Graph, g: &SampledGraph, rng: &mut ChaCha8Rng) -> f64 {
    let k = f.order();
    let total = falling(g.order(), k);
    match total {
        Some(t) if t <= EXACT_MAP_LIMIT => {
            let mut img = vec![0usize; k];
            let mut used = vec![false; g.order()];
            let hits = count_copies(f, g, 0, &mut img, &mut used);
            hits as f64 / t as f64
        }
        _ => {
            let mut hits = 0usize;
            let mut img = Vec::with_capacity(k);
            for _ in 0..RANDOM_MAPS {
                img.clear();
                while img.len() < k {
                    let v = rng.gen_range(0..g.order());
                    if !img.contains(&v) {
                        img.push(v);
                    }
                }
                let ok = (1..k).all(|j| (0..j).all(|i| f.has_edge(i, j) == g.has_edge(img[i], img[j])));
                hits += ok as usize;
            }
            hits as f64 / RANDOM_MAPS as f64
        }
    }
}

fn count_copies(f: &Graph, g: &SampledGraph, i: usize, img: &mut [usize], used: &mut [bool]) -> u64 {
    if i == f.order() {
        return 1;
    }
    let mut acc = 0;
    for v in 0..g.order() {
        if used[v] || !(0..i).all(|j| f.has_edge(j, i) == g.has_edge(img[j], v)) {
            continue;
        }
        used[v] = true;
        img[i] = v;
        acc += count_copies(f, g, i + 1, img, used);
        used[v] = false;
    }
    acc
}

/// An exact value to compare an estimate against.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactTarget {
    pub text: String,
    pub approx: f64,
}

impl From<&Rational> for ExactTarget {
    fn from(r: &Rational) -> Self {
        ExactTarget { text: rational_str(r), approx: rational_f64(r) }
    }
}

impl From<&QuadValue> for ExactTarget {
    fn from(v: &QuadValue) -> Self {
        ExactTarget { text: v.to_string(), approx: quad_f64(v) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub exact_target: Option<String>,
    pub z_score: Option<f64>,
    pub note: Option<String>,
}

impl SampleReport {
    fn build(n: usize, seed: u64, xs: &[f64], target: Option<ExactTarget>) -> Self {
        let (estimate, stderr) = jackknife_mean(xs);
        let z_score = target.as_ref().filter(|_| stderr > 0.0).map(|t| (estimate - t.approx) / stderr);
        SampleReport {
            n,
            reps: xs.len(),
            seed,
            estimate,
            stderr,
            exact_target: target.map(|t| t.text),
            z_score,
            note: None,
        }
    }

    /// Marks the report when `gap` is smaller than five standard errors:
    /// such a run cannot confirm the gap either way.
    pub fn flag_resolution(&mut self, gap: f64) {
        if gap.abs() < 5.0 * self.stderr {
            self.note = Some("gap below statistical resolution".into());
        }
    }
}

/// Mean and jackknife standard error (leave-one-out means).
pub fn jackknife_mean(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sum: f64 = xs.iter().sum();
    let mean = sum / n;
    let ss: f64 = xs.iter().map(|x| ((sum - x) / (n - 1.0) - mean).powi(2)).sum();
    (mean, ((n - 1.0) / n * ss).sqrt())
}

/// Each repetition samples `G(n, W)` and records the induced density of
/// the labeled graph `F` in it (all injective maps when few enough,
/// otherwise [`RANDOM_MAPS`] random ones); both are unbiased for `ρ_F(W)`.
pub fn estimate_induced<K: SampleKernel + ?Sized>(
    f: &Graph,
    w: &K,
    n: usize,
    reps: usize,
    seed: u64,
    target: Option<ExactTarget>,
) -> Result<SampleReport, SamplerError> {
    if !w.is_graphon() {
        return Err(SamplerError::RangeViolation);
    }
    if reps < 2 {
        return Err(SamplerError::InvalidArgs("reps must be at least 2"));
    }
    if n < f.order() {
        return Err(SamplerError::InvalidArgs("n must be at least v(F)"));
    }
    let xs: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(seed, r as u64);
            let g = sample_with(w, n, &mut rng);
            induced_fraction(f, &g, &mut rng)
        })
        .collect();
    Ok(SampleReport::build(n, seed, &xs, target))
}

/// Each repetition samples `G(n, W)` and records its edge density, an
/// unbiased estimate of `t(K_2, W)`.
pub fn estimate_edge_density<K: SampleKernel + ?Sized>(
    w: &K,
    n: usize,
    reps: usize,
    seed: u64,
    target: Option<ExactTarget>,
) -> Result<SampleReport, SamplerError> {
    if !w.is_graphon() {
        return Err(SamplerError::RangeViolation);
    }
    if reps < 2 || n < 2 {
        return Err(SamplerError::InvalidArgs("need reps >= 2 and n >= 2"));
    }
    let xs: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| sample_with(w, n, &mut rng_for(seed, r as u64)).edge_density())
        .collect();
    Ok(SampleReport::build(n, seed, &xs, target))
}

/// Each repetition draws `v(H)` positions and records `Π_{uv ∈ E(H)}
/// W(x_u, x_v)`; `W` may be any kernel.
pub fn estimate_t<K: SampleKernel + ?Sized>(
    h: &Graph,
    w: &K,
    reps: usize,
    seed: u64,
    target: Option<ExactTarget>,
) -> Result<SampleReport, SamplerError> {
    if reps < 2 {
        return Err(SamplerError::InvalidArgs("reps must be at least 2"));
    }
    let edges = h.edges();
    let xs: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(seed, r as u64);
            let pts = draw_points(w, h.order(), &mut rng);
            edges.iter().map(|&(u, v)| w.value(&pts[u], &pts[v])).product()
        })
        .collect();
    Ok(SampleReport::build(h.order(), seed, &xs, target))
}
