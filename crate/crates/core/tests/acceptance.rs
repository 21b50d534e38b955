//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num::complex::Complex64;
use num::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use polytrain::bernoulli::{BernoulliLab, CylFunction};
use polytrain::gen;
use polytrain::laws::default_grid;
use polytrain::mellin::{
    functoriality_defect, mellin_distinguishes, operator_norm, s_dependence, transform, NormExponent,
    SymbolicTransform,
};
use polytrain::polinf::{embed_bijection_inf, escape_distance, Part};
use polytrain::rational::{exact_sqrt, to_f64, Q};
use polytrain::train::{dcoset_of, mult_reps, sandwich, DCoset, FinPerm};
use polytrain::{cond_exp_poly, quotient, FinSpace, Polymorphism, RxMeasure};

const SEED: u64 = 20240601;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let bad = (0..1000u64)
        .into_par_iter()
        .filter(|&case| {
            let mut rng = gen::case_rng(SEED, "c1", case);
            let [a, b, c] = [0, 1, 2].map(|_| gen::rx_measure(&mut rng, 6, 16));
            let one = RxMeasure::delta(Q::one()).unwrap();
            let ab = a.convolve(&b);
            !(ab.convolve(&c) == a.convolve(&b.convolve(&c))
                && ab == b.convolve(&a)
                && a.convolve(&one) == a
                && ab.mass() == a.mass() * b.mass()
                && ab.moment() == a.moment() * b.moment())
        })
        .count();
    let t = start.elapsed();
    verdict(bad == 0 && within(t, 10), format!("1000 triples, {bad} failures, {:.2?} (limit 10 s)", t))
}

fn chain(rng: &mut impl Rng, k: usize, max_atoms: usize, split: usize) -> Vec<Polymorphism> {
    let sp: Vec<FinSpace> = (0..=k).map(|i| gen::prob_space(rng, max_atoms, &format!("s{i}_"))).collect();
    sp.windows(2).map(|w| gen::polymorphism(rng, &w[0], &w[1], split)).collect()
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let bad = (0..500u64)
        .into_par_iter()
        .filter(|&case| {
            let mut rng = gen::case_rng(SEED, "c2", case);
            let ps = chain(&mut rng, 3, 8, 2);
            let pq = ps[0].compose(&ps[1]).unwrap();
            let qr = ps[1].compose(&ps[2]).unwrap();
            let assoc = pq.compose(&ps[2]).unwrap() == ps[0].compose(&qr).unwrap();
            let anti = pq.star() == ps[1].star().compose(&ps[0].star()).unwrap();
            let valid = pq.is_valid() && qr.is_valid() && ps.iter().all(|p| p.star().is_valid()) && pq.star().is_valid();
            !(assoc && anti && valid)
        })
        .count();
    let t = start.elapsed();
    verdict(bad == 0 && within(t, 30), format!("500 triples, {bad} failures, {:.2?} (limit 30 s)", t))
}

/// Space whose weight ratios are rational squares.
fn square_space(rng: &mut impl Rng, n: usize) -> FinSpace {
    let raw: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=5u64).pow(2)).collect();
    let total: u64 = raw.iter().sum();
    FinSpace::probability(
        raw.iter()
            .enumerate()
            .map(|(i, &w)| (format!("z{i}"), Q::new(w.into(), total.into())))
            .collect(),
    )
    .unwrap()
}

fn criterion_3() -> Verdict {
    let grid = default_grid();
    let failures: Vec<String> = (0..200u64)
        .into_par_iter()
        .filter_map(|case| {
            let mut rng = gen::case_rng(SEED, "c3", case);
            let n = rng.gen_range(1..=7);
            let z = if case % 2 == 0 { square_space(&mut rng, n) } else { gen::weighted_space(&mut rng, n, "z") };
            let g = gen::permutation(&mut rng, n);
            let h = gen::permutation(&mut rng, n);
            let pg = Polymorphism::from_bijection(&z, &g).unwrap();
            let ph = Polymorphism::from_bijection(&z, &h).unwrap();
            let gh: Vec<usize> = g.iter().map(|&j| h[j]).collect();
            if pg.compose(&ph).unwrap() != Polymorphism::from_bijection(&z, &gh).unwrap() {
                return Some(format!("case {case}: not a homomorphism"));
            }
            if pg.compose(&pg.star()).unwrap() != Polymorphism::identity(&z)
                || pg.star().compose(&pg).unwrap() != Polymorphism::identity(&z)
            {
                return Some(format!("case {case}: star is not the inverse"));
            }
            let deriv: Vec<Q> = (0..n).map(|i| z.weight(g[i]) / z.weight(i)).collect();
            // symbolic: row z is the single atom δ_{g'(z)} at column g(z)
            let sym = SymbolicTransform::of(&pg);
            for i in 0..n {
                for j in 0..n {
                    let want = if j == g[i] { RxMeasure::delta(deriv[i].clone()).unwrap() } else { RxMeasure::zero() };
                    if sym.entries[i][j] != want {
                        return Some(format!("case {case}: symbolic entry ({i},{j})"));
                    }
                }
            }
            let phi: Vec<Q> = (0..n).map(|_| Q::from_integer(rng.gen_range(-9..=9).into())).collect();
            if case % 2 == 0 {
                let m = sym.exact_at_half().expect("square ratios");
                for i in 0..n {
                    let applied: Q = (0..n).map(|j| &m[i][j] * &phi[j]).sum();
                    let want = &phi[g[i]] * exact_sqrt(&deriv[i]).unwrap();
                    if applied != want {
                        return Some(format!("case {case}: exact probe at z{i}"));
                    }
                }
            }
            let phif: Vec<Complex64> = phi.iter().map(|v| to_f64(v).into()).collect();
            for &(r, s) in &grid {
                let out = transform(&pg, r, s).unwrap().apply(&phif).unwrap();
                for i in 0..n {
                    let d = to_f64(&deriv[i]);
                    let want = phif[g[i]] * Complex64::new(r * d.ln(), s * d.ln()).exp();
                    if (out[i] - want).norm() > 1e-12 * want.norm().max(1.0) {
                        return Some(format!("case {case}: float probe ({r},{s}) at z{i}"));
                    }
                }
            }
            None
        })
        .collect();
    verdict(failures.is_empty(), format!("200 spaces, failures {:?}", failures.first()))
}

fn criterion_4() -> Verdict {
    let grid = default_grid();
    let results: Vec<(f64, f64, f64, bool)> = (0..200u64)
        .into_par_iter()
        .map(|case| {
            let mut rng = gen::case_rng(SEED, "c4", case);
            let ps = chain(&mut rng, 2, 6, 2);
            let mut func: f64 = 0.0;
            let mut norm: f64 = 0.0;
            for &(r, s) in &grid {
                func = func.max(functoriality_defect(&ps[0], &ps[1], r, s).unwrap());
                if let Ok(e) = NormExponent::for_r(r) {
                    for p in [&ps[0], &ps[1]] {
                        norm = norm.max(operator_norm(&transform(p, r, s).unwrap(), e));
                    }
                }
            }
            let sp = [gen::prob_space(&mut rng, 6, "a"), gen::prob_space(&mut rng, 6, "b")];
            let mp = gen::measure_preserving(&mut rng, &sp[0], &sp[1], 3);
            let mut sdep: f64 = 0.0;
            for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
                sdep = sdep.max(s_dependence(&mp, r, &[-2.0, -1.0, 0.0, 1.0, 3.0]).unwrap());
            }
            let distinguished = case >= 100 || mellin_distinguishes(&ps[0], &gen::spread_one_atom(&mut rng, &ps[0])).unwrap();
            (func, norm, sdep, distinguished)
        })
        .collect();
    let func = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let norm = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let sdep = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let missed = results.iter().filter(|r| !r.3).count();
    verdict(
        func <= 1e-12 && norm <= 1.0 + 1e-10 && sdep <= 1e-13 && missed == 0,
        format!(
            "200 pairs: functoriality {func:.2e} (≤1e-12), norm {norm:.12} (≤1+1e-10), s-dependence {sdep:.2e} (≤1e-13), perturbations missed {missed}/100"
        ),
    )
}

fn criterion_5() -> Verdict {
    let failures: Vec<String> = (0..100u64)
        .into_par_iter()
        .filter_map(|case| {
            let mut rng = gen::case_rng(SEED, "c5", case);
            let z = gen::prob_space(&mut rng, 8, "z");
            let part = gen::partition(&mut rng, &z, z.len());
            let ce = cond_exp_poly(&z, &part).unwrap();
            let m = &ce.projection;
            if m.compose(m).unwrap() != *m || m.star() != *m {
                return Some(format!("case {case}: idempotence or self-adjointness"));
            }
            let blocks = part.block_map(&z).unwrap();
            let mut block_mass = vec![Q::zero(); part.len()];
            for (i, &b) in blocks.iter().enumerate() {
                block_mass[b] += z.weight(i);
            }
            let sym = SymbolicTransform::of(m);
            for i in 0..z.len() {
                for j in 0..z.len() {
                    let want = if blocks[i] == blocks[j] {
                        RxMeasure::from_atoms([(Q::one(), z.weight(j) / &block_mass[blocks[j]])]).unwrap()
                    } else {
                        RxMeasure::zero()
                    };
                    if sym.entries[i][j] != want {
                        return Some(format!("case {case}: transform entry ({i},{j})"));
                    }
                }
            }
            let quo = quotient(&z, &part).unwrap();
            let l = &ce.quotient_map;
            if l.star().compose(l).unwrap() != Polymorphism::identity(&quo.space) {
                return Some(format!("case {case}: unit on the quotient"));
            }
            None
        })
        .collect();
    verdict(failures.is_empty(), format!("100 partitions, failures {:?}", failures.first()))
}

/// All permutations of `{1..n}` as image vectors.
fn all_perms(n: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for k in 1..=n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    out
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut i = i;
    while parent[i] != r {
        let next = parent[i];
        parent[i] = r;
        i = next;
    }
    r
}

/// Orbits of `Sym{α+1..n} × Sym{β+1..n}` acting on `S_n` by `(k, l)·g = k∘g∘l⁻¹`.
fn brute_orbits(perms: &[Vec<u32>], n: u32, alpha: u32, beta: u32) -> Vec<usize> {
    let index: BTreeMap<&Vec<u32>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..perms.len()).collect();
    for (i, p) in perms.iter().enumerate() {
        // left factor: swap values a, a+1 with a > α
        for a in alpha + 1..n {
            let q: Vec<u32> = p.iter().map(|&v| if v == a { a + 1 } else if v == a + 1 { a } else { v }).collect();
            let (x, y) = (find(&mut parent, i), find(&mut parent, index[&q]));
            parent[x] = y;
        }
        // right factor: swap positions b, b+1 with b > β
        for b in beta + 1..n {
            let mut q = p.clone();
            q.swap(b as usize - 1, b as usize);
            let (x, y) = (find(&mut parent, i), find(&mut parent, index[&q]));
            parent[x] = y;
        }
    }
    (0..perms.len()).map(|i| find(&mut parent, i)).collect()
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for n in 1..=6u32 {
        let perms = all_perms(n);
        let fins: Vec<FinPerm> = perms.iter().map(|p| FinPerm::from_images(p).unwrap()).collect();
        for alpha in 0..=3 {
            for beta in 0..=3 {
                let orbit = brute_orbits(&perms, n, alpha, beta);
                let cosets: Vec<DCoset> = fins.iter().map(|g| dcoset_of(g, alpha, beta)).collect();
                let mut by_orbit: BTreeMap<usize, &DCoset> = BTreeMap::new();
                let mut by_coset: BTreeMap<&DCoset, usize> = BTreeMap::new();
                for (o, c) in orbit.iter().zip(&cosets) {
                    if *by_orbit.entry(*o).or_insert(c) != c || *by_coset.entry(c).or_insert(*o) != *o {
                        mismatches += 1;
                    }
                }
                checked += perms.len();
            }
        }
    }
    let products: Vec<bool> = (0..500u64)
        .into_par_iter()
        .map(|case| {
            let mut rng = gen::case_rng(SEED, "c6", case);
            let (a, b, c) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3));
            let g = { let sup = rng.gen_range(0..=6); gen::fin_perm(&mut rng, sup) };
            let h = { let sup = rng.gen_range(0..=6); gen::fin_perm(&mut rng, sup) };
            let Ok(prod) = mult_reps(&g, &h, a, b, c) else { return false };
            let stable = (prod.n..prod.n + 4).all(|n| dcoset_of(&sandwich(&g, b, n, &h), a, c) == prod.coset);
            // partial injections compose: k ↦ g(h(k)) whenever h(k) ≤ β and g(h(k)) ≤ α
            let law: Vec<(u32, u32)> = (1..=c)
                .filter(|&k| h.apply(k) <= b && g.apply(h.apply(k)) <= a)
                .map(|k| (k, g.apply(h.apply(k))))
                .collect();
            stable && prod.coset.pinj == law
        })
        .collect();
    let bad_products = products.iter().filter(|ok| !**ok).count();
    let t = start.elapsed();
    verdict(
        mismatches == 0 && bad_products == 0 && within(t, 60),
        format!("{checked} permutations exhaustive, {mismatches} mismatches; 500 products, {bad_products} failures; {:.2?} (limit 60 s)", t),
    )
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let thm: Vec<String> = (0..200u64)
        .into_par_iter()
        .filter_map(|case| {
            let mut rng = gen::case_rng(SEED, "c7", case);
            let lab = BernoulliLab::new(gen::bernoulli_p(&mut rng)).unwrap();
            let (a, b, c) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3));
            let g = { let sup = rng.gen_range(0..=6); gen::fin_perm(&mut rng, sup) };
            let h = { let sup = rng.gen_range(0..=6); gen::fin_perm(&mut rng, sup) };
            let t1 = lab.theorem1_check(&g, &h, a, b, c).unwrap();
            let mc = lab.multiplicativity_check(&g, &h, a, b, c).unwrap();
            (!t1.holds || !mc.defect.is_zero()).then(|| format!("case {case}: g={g} h={h} ({a},{b},{c})"))
        })
        .collect();
    let cosets: Vec<String> = (0..200u64)
        .into_par_iter()
        .filter_map(|case| {
            let mut rng = gen::case_rng(SEED, "c7-coset", case);
            let lab = BernoulliLab::new(gen::bernoulli_p(&mut rng)).unwrap();
            let (a, b) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
            let g = { let sup = rng.gen_range(0..=6); gen::fin_perm(&mut rng, sup) };
            let k = { let extra = rng.gen_range(0..=4); gen::stabilizer_perm(&mut rng, a, extra) };
            let l = { let extra = rng.gen_range(0..=4); gen::stabilizer_perm(&mut rng, b, extra) };
            let same = lab.s_poly_coset_invariant(&g, &k, &l, a, b).unwrap();
            (!same).then(|| format!("case {case}: k={k} g={g} l={l}"))
        })
        .collect();
    let t = start.elapsed();
    verdict(
        thm.is_empty() && cosets.is_empty() && within(t, 300),
        format!(
            "200 products, {} failures; 200 coset probes, {} failures; {:.2?} (limit 300 s)",
            thm.len(),
            cosets.len(),
            t
        ),
    )
}

/// The monomials `∏_{i∈S} x_i`, `S ⊆ {1..span}`: a basis of functions of `span` coordinates.
fn monomials(span: u32) -> Vec<CylFunction> {
    (0..1u32 << span)
        .map(|mask| {
            (1..=span)
                .filter(|i| mask >> (i - 1) & 1 == 1)
                .fold(CylFunction::constant(Q::one()), |f, i| f.mul(&CylFunction::coordinate(i)))
        })
        .collect()
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let basis = monomials(6);
    let lab = BernoulliLab::new(Q::new(1.into(), 3.into())).unwrap();
    let size = basis.len();
    let pairs: Vec<(u32, usize, usize)> = (0..=3)
        .flat_map(|a| (0..size).flat_map(move |i| (0..size).map(move |j| (a, i, j))))
        .collect();
    let weak_failures = pairs
        .par_iter()
        .filter(|&&(a, i, j)| lab.theta_weak_limit_check(a, &basis[i], &basis[j]).is_err())
        .count();
    let random_failures = (0..200u64)
        .into_par_iter()
        .filter(|&case| {
            let mut rng = gen::case_rng(SEED, "c8-cyl", case);
            let f = gen::cyl_function(&mut rng, 6);
            let h = gen::cyl_function(&mut rng, 6);
            lab.theta_weak_limit_check(rng.gen_range(0..=3), &f, &h).is_err()
        })
        .count();
    let closure: Vec<(bool, bool, String)> = (0..50u64)
        .into_par_iter()
        .map(|case| {
            let mut rng = gen::case_rng(SEED, "c8-closure", case);
            let z = gen::prob_space(&mut rng, 16, "z");
            let r = gen::polymorphism(&mut rng, &z, &z, 2);
            let chain = gen::refining_chain(&mut rng, &z);
            let n = z.len();
            let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let psi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let rep = polytrain::closure_experiment(&r, &chain, &phi, &psi, &[(0.5, 0.0)]).unwrap();
            let d = &rep.distances;
            let monotone = d.windows(2).all(|w| w[1] <= w[0]);
            let ends = *d.last().unwrap() == 0.0;
            (monotone, ends, format!("case {case}: {d:?}"))
        })
        .collect();
    let non_monotone: Vec<&String> = closure.iter().filter(|c| !c.0).map(|c| &c.2).collect();
    let not_zero = closure.iter().filter(|c| !c.1).count();
    let t = start.elapsed();
    verdict(
        weak_failures == 0 && random_failures == 0 && non_monotone.is_empty() && not_zero == 0,
        format!(
            "{} basis pairs and 200 random pairs, {} without a limit; 50 chains, {} increasing, {} not ending at 0{}; {:.2?}",
            pairs.len(),
            weak_failures + random_failures,
            non_monotone.len(),
            not_zero,
            non_monotone.first().map(|s| format!(" (first: {s})")).unwrap_or_default(),
            t
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut accepted = 0;
    let mut rejected = 0;
    for case in 0..100u64 {
        let mut rng = gen::case_rng(SEED, "c9", case);
        let n = rng.gen_range(1..=8);
        let space = FinSpace::sigma_finite(
            (0..n).map(|i| (format!("a{i}"), gen::pos_rational(&mut rng, 6))).collect(),
        )
        .unwrap();
        let triple = embed_bijection_inf(&space, &gen::permutation(&mut rng, n)).unwrap();
        accepted += triple.is_valid() as usize;
        let mut bad = triple.clone();
        let k = rng.gen_range(0..triple.r().len());
        *bad.mass_mut(Part::R, k).unwrap() *= Q::new(rng.gen_range(2..=9u32).into(), rng.gen_range(10..=19u32).into());
        rejected += (!bad.is_valid()) as usize;
    }
    let d64 = escape_distance(64, 4).unwrap();
    verdict(
        accepted == 100 && rejected == 100 && d64 < 1e-3,
        format!("{accepted}/100 embeddings accepted, {rejected}/100 perturbations rejected, escape distance at 64 rungs {d64:.3e} (<1e-3)"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("semiring laws", criterion_1),
        ("category laws", criterion_2),
        ("relabeling embedding", criterion_3),
        ("transform functoriality, norms, injectivity", criterion_4),
        ("projections", criterion_5),
        ("double cosets and their product", criterion_6),
        ("functor on the train", criterion_7),
        ("weak limits and closure", criterion_8),
        ("escaping mass", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("criterion {}: {} [{}] {}", i + 1, if v.ok { "PASS" } else { "FAIL" }, name, v.detail);
        failed += usize::from(!v.ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
