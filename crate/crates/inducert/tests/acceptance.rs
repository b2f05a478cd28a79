//! End-to-end acceptance run: one line per criterion.
//!
//! A criterion prints FAIL when a stated constant disagrees with exact
//! arithmetic. Those items are still checked against their exact values,
//! and only a failure of an exact check makes the run exit nonzero.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use inducert::core::certifier::{
    c5_diagnostic, certify_full, certify_linear, is_valid, mutate_certificate, CertifyError, CertifyOptions,
    DiagnosticStatus, MUTATION_KINDS,
};
use inducert::core::exactnum::{quad_sign, rat, QuadValue, Rational};
use inducert::core::expansion::{build_table, exceptional_points, rand_density, verify_with_table};
use inducert::core::ffkernel::{
    build_m, clique_bound, congruence_diagonalize, find_domination_k, make_uz, min_rank, nonclique_bound,
    rank_one_normal_form, t_ff, t_grid, FpKernelSpec,
};
use inducert::core::graphs::{canonical_form, count_nj, enumerate_h_min_degree, to_graph6};
use inducert::core::kernel::delta3x3;
use inducert::core::{Graph, PolyP, StepKernel};
use inducert::sampler::{estimate_induced, estimate_t, ExactTarget, StepSampler};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    /// Every item, stated constants included, holds.
    pass: bool,
    /// Every exactly computed value was confirmed.
    exact_ok: bool,
    detail: String,
}

impl Outcome {
    fn of(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { pass: ok, exact_ok: ok, detail: detail.into() }
    }
}

fn random_graph(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Graph {
    let n = rng.gen_range(lo..=hi);
    let np = n * (n - 1) / 2;
    Graph::from_pair_mask(n, rng.gen_range(0..1u64 << np))
}

fn random_rat(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    rat(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

fn random_kernel(rng: &mut ChaCha8Rng, blocks: usize) -> StepKernel {
    let raw: Vec<i64> = (0..blocks).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    let widths = raw.iter().map(|&w| rat(w, total)).collect();
    let mut values = vec![vec![Rational::default(); blocks]; blocks];
    for i in 0..blocks {
        for j in i..blocks {
            let v = random_rat(rng, 5, 7);
            values[i][j] = v.clone();
            values[j][i] = v;
        }
    }
    StepKernel::new(widths, values).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ps = [rat(1, 3), rat(1, 2), rat(7, 10)];
    let mut tables = BTreeMap::new();
    let mut bad = 0;
    for _ in 0..100 {
        let f = random_graph(&mut rng, 3, 5);
        let p = ps[rng.gen_range(0..3)].clone();
        let d = random_kernel(&mut rng, 4);
        let table = tables.entry((f.order(), f.pair_mask())).or_insert_with(|| build_table(&f).unwrap());
        if !verify_with_table(table, &p, &d).unwrap() {
            bad += 1;
        }
    }
    Outcome::of(bad == 0, format!("{} of 100 random identities exact", 100 - bad))
}

fn p_at(f: &Graph, h: &Graph, p: &Rational) -> Rational {
    build_table(f).unwrap().eval_p(&canonical_form(h).unwrap(), p).unwrap()
}

fn criterion_2() -> Outcome {
    let half = rat(1, 2);
    let c5 = Graph::cycle(5);
    let p3v = Graph::named("path3+v").unwrap();
    let mut exact_ok = true;
    let mut stated_bad = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            exact_ok = false;
            stated_bad.push(format!("{name} wrong"));
        }
    };
    check("t(K3,Δ3x3)", delta3x3().t_hom(&Graph::complete(3)).unwrap() == rat(28, 27));
    check("n_j(K3,path3+v)", count_nj(&Graph::complete(3), &p3v).unwrap() == [0, 2, 5, 3]);
    let roots = exceptional_points(&p3v).unwrap();
    check(
        "roots of path3+v",
        roots.len() == 2 && roots.iter().all(|r| r.is_exact()) && roots[0].lo == rat(2, 5) && roots[1].lo == half,
    );
    check("n_j(P2,C5)", count_nj(&Graph::path(2), &c5).unwrap() == [5, 20, 5]);
    check("P_{P2,C5}(1/2)", p_at(&c5, &Graph::path(2), &half) == rat(-5, 128));

    // Stated values for C4 in C5 that exact counting contradicts: of the 15
    // four-cycles of K5, 5 use one non-edge of C5, 5 use two, 5 use three.
    let nj_c4 = count_nj(&Graph::cycle(4), &c5).unwrap();
    let p_c4 = p_at(&c5, &Graph::cycle(4), &half);
    let mut stated = Vec::new();
    if nj_c4 != [0, 5, 0, 5, 0] {
        let shown: Vec<String> = nj_c4.iter().map(u64::to_string).collect();
        stated.push(format!("stated n_j(C4,C5) = (0,5,0,5,0), exact ({})", shown.join(",")));
    }
    if p_c4 != rat(-5, 32) {
        stated.push(format!("stated P_{{C4,C5}}(1/2) = -5/32, exact {p_c4}"));
    }
    let c4_exact = nj_c4 == [0, 5, 5, 5, 0] && p_c4 == rat(-5, 64);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut clique_ok = true;
    for _ in 0..20 {
        let f = random_graph(&mut rng, 3, 6);
        let m = f.order();
        let table = build_table(&f).unwrap();
        let km = canonical_form(&Graph::complete(m)).unwrap();
        let non_edges = m * (m - 1) / 2 - f.edge_count();
        let sign = if non_edges.is_multiple_of(2) { 1 } else { -1 };
        clique_ok &= table.entry(&km).unwrap().p_poly == PolyP::from_ints(&[sign]);
    }
    check("P_{K_m,F} ≡ ±1", clique_ok);

    let exact_ok = exact_ok && c4_exact;
    let mut detail = stated_bad;
    detail.extend(stated.iter().cloned());
    if detail.is_empty() {
        detail.push("all constants reproduced".into());
    } else if exact_ok {
        detail.push("all other items hold; exact C4 values confirmed".into());
    }
    Outcome { pass: exact_ok && stated.is_empty(), exact_ok, detail: detail.join("; ") }
}

fn criterion_3() -> Outcome {
    let hs = enumerate_h_min_degree(5, 2).unwrap();
    let mut bad = Vec::new();
    for k in [1, 2] {
        let spec = FpKernelSpec::new(5, 3, k, 2).unwrap();
        for h in &hs {
            let g = h.to_graph();
            if t_ff(&g, &spec).unwrap() != QuadValue::from_rational(t_grid(&g, &spec).unwrap()) {
                bad.push(format!("{} at k={k}", to_graph6(&g)));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{} graphs × k ∈ {{1,2}} agree", hs.len())
    } else {
        format!("mismatch: {}", bad.join(", "))
    };
    Outcome::of(bad.is_empty(), detail)
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    let graphs: Vec<Graph> =
        enumerate_h_min_degree(6, 2).unwrap().iter().filter(|h| !h.is_clique()).map(|h| h.to_graph()).collect();
    for p in [3u64, 5, 7] {
        for g in &graphs {
            if min_rank(g, p).unwrap() < 2 {
                bad.push(format!("{} has rank 1 mod {p}", to_graph6(g)));
            }
        }
    }
    let mut cliques = 0;
    for p in [3u64, 5, 7] {
        for z in (3..=9).filter(|z| (z - 2) % p as usize == 0) {
            let g = Graph::complete(z);
            for s in [1i8, -1] {
                let m = build_m(&g, &vec![s; g.edge_count()], p).unwrap();
                let rank = congruence_diagonalize(&m).unwrap().rank;
                let d = rank_one_normal_form(&m).map(|(d, _)| d);
                if rank != 1 || d != Some(s as i64) {
                    bad.push(format!("K{z} mod {p}, σ ≡ {s}: rank {rank}, d {d:?}"));
                }
                cliques += 1;
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{} non-cliques × 3 primes have rank ≥ 2; {cliques} clique sign vectors have rank 1, d = ±1", graphs.len())
    } else {
        bad.join("; ")
    };
    Outcome::of(bad.is_empty(), detail)
}

fn criterion_5() -> Outcome {
    let support = enumerate_h_min_degree(5, 2).unwrap();
    let dom = find_domination_k(5, &support, &make_uz(5, None).unwrap(), 40).unwrap();
    let k5 = canonical_form(&Graph::complete(5)).unwrap();
    let tk = &dom.t[&k5];
    let mut bad = Vec::new();
    if dom.k % 4 != 2 {
        bad.push(format!("k = {} is not 2 mod 4", dom.k));
    }
    if quad_sign(tk) >= 0 {
        bad.push("t(K5) ≥ 0".into());
    }
    if tk.cmp_value(&clique_bound(5, 3, dom.k)).unwrap().is_gt() {
        bad.push("clique bound fails".into());
    }
    let nb = QuadValue::from_rational(nonclique_bound(3, dom.k));
    for (h, v) in &dom.t {
        if h.is_clique() {
            continue;
        }
        if v.abs().cmp_value(&tk.abs()).unwrap().is_ge() {
            bad.push(format!("{} not dominated", to_graph6(&h.to_graph())));
        }
        if v.abs().cmp_value(&nb).unwrap().is_gt() {
            bad.push(format!("{} exceeds 3^-k", to_graph6(&h.to_graph())));
        }
    }
    let detail = if bad.is_empty() {
        format!("k = {}, t(K5,U_k) = {}, {} non-cliques dominated", dom.k, tk.as_rational().unwrap(), dom.t.len() - 1)
    } else {
        bad.join("; ")
    };
    Outcome::of(bad.is_empty(), detail)
}

fn criterion_6() -> Outcome {
    let half = rat(1, 2);
    let cases = [
        ("C5", Graph::cycle(5), half.clone()),
        ("K3", Graph::complete(3), half.clone()),
        ("K4", Graph::complete(4), half.clone()),
        ("path3+v", Graph::named("path3+v").unwrap(), rat(2, 5)),
        ("path3+v", Graph::named("path3+v").unwrap(), half.clone()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut exact_ok = true;
    let mut notes = Vec::new();
    let mut stated = Vec::new();
    for (i, (name, f, p)) in cases.iter().enumerate() {
        let c = match certify_full(f, p, &rat(1, 4), &CertifyOptions::default()) {
            Ok(c) => c,
            Err(e) => {
                exact_ok = false;
                notes.push(format!("{name}@{p}: {e}"));
                continue;
            }
        };
        let mut ok = quad_sign(&c.gap) == 1 && is_valid(&c);
        let mut kinds: Vec<u64> = (0..MUTATION_KINDS).collect();
        kinds.shuffle(&mut rng);
        for &kind in &kinds[..10] {
            let m = mutate_certificate(&c, kind + MUTATION_KINDS * rng.gen_range(0..4));
            ok &= m != c && !is_valid(&m);
        }
        if !ok {
            exact_ok = false;
            notes.push(format!("{name}@{p}: validation"));
        }
        if i >= 2 {
            match certify_linear(f, p) {
                Err(CertifyError::ExceptionalPoint) => {}
                Ok(lin) => {
                    // S_{K3,F}(p) ≠ 0 here, so the linear route applies after all
                    let direct = StepKernel::constant(p.clone())
                        .add(&lin.kernel.scale(&(&lin.eps * rat(lin.sigma as i64, 1))))
                        .rho_induced(f)
                        .unwrap()
                        - rand_density(f, p);
                    exact_ok &= direct == lin.gap && lin.gap > Rational::default();
                    stated.push(format!("{name}@{p} is not exceptional: certify_linear gives gap {}", lin.gap));
                }
                Err(e) => {
                    exact_ok = false;
                    notes.push(format!("{name}@{p} linear: {e}"));
                }
            }
        }
    }
    let mut detail = notes;
    detail.extend(stated.iter().cloned());
    if detail.is_empty() {
        detail.push("5 certificates valid, 50 mutations rejected, 3 exceptional referrals".into());
    } else if exact_ok {
        detail.push("all 5 certificates valid, 50 mutations rejected".into());
    }
    Outcome { pass: exact_ok && stated.is_empty(), exact_ok, detail: detail.join("; ") }
}

fn criterion_7() -> Outcome {
    let f = Graph::named("path3+v").unwrap();
    match certify_linear(&f, &rat(3, 10)) {
        Ok(c) => Outcome::of(
            c.sigma == -1 && c.gap > Rational::default(),
            format!("σ = {}, ε = {}, gap = {}", c.sigma, c.eps, c.gap),
        ),
        Err(e) => Outcome::of(false, e.to_string()),
    }
}

fn criterion_8() -> Outcome {
    let diag = c5_diagnostic().unwrap();
    let battery = &diag.rows[..10];
    let bad: Vec<String> = battery
        .iter()
        .filter(|r| r.status != DiagnosticStatus::EvenNegative || r.t_p2 != Rational::default())
        .map(|r| r.label.clone())
        .collect();
    let detail = if bad.is_empty() {
        let orders: Vec<String> = battery.iter().map(|r| r.lowest_order.unwrap().to_string()).collect();
        format!("10 kernels even-negative (lowest orders {})", orders.join(","))
    } else {
        format!("violations: {}", bad.join(", "))
    };
    Outcome::of(bad.is_empty(), detail)
}

fn criterion_9() -> Outcome {
    let reps = 10_000;
    let d = StepSampler::new(&delta3x3());
    let k3 = Graph::complete(3);
    let t = |seed| estimate_t(&k3, &d, reps, seed, Some(ExactTarget::from(&rat(28, 27)))).unwrap();
    let w = StepSampler::new(&StepKernel::constant(rat(1, 2)));
    let c5 = Graph::cycle(5);
    let ind = |seed| estimate_induced(&c5, &w, 8, reps, seed, Some(ExactTarget::from(&rat(1, 1024)))).unwrap();
    let (a, b) = (t(9), ind(9));
    let za = a.z_score.unwrap();
    let zb = b.z_score.unwrap();
    let repro = a == t(9) && b == ind(9);
    Outcome::of(
        za.abs() <= 5.0 && zb.abs() <= 5.0 && repro,
        format!(
            "t(K3,Δ3x3) ≈ {:.5} (z = {za:.2}); ρ(C5,1/2) ≈ {:.6} (z = {zb:.2}); reproducible: {repro}",
            a.estimate, b.estimate
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut passed = 0;
    let mut exact_failures = 0;
    for (n, run) in criteria {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {verdict} [{:.2}s] {}", start.elapsed().as_secs_f64(), o.detail);
        passed += o.pass as u32;
        exact_failures += !o.exact_ok as u32;
    }
    println!("acceptance: {passed}/9 criteria pass; {exact_failures} exact checks failed");
    if exact_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
