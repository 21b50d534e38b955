//! Randomized law batteries over the semiring, the category of
//! polymorphisms, the embedding of relabelings and the transform.
//!
//! The involution is a parameter so that a deliberately wrong rule can be
//! plugged in and caught.

use std::collections::BTreeMap;

use num::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gen;
use crate::mellin::{functoriality_defect, operator_norm, s_dependence, transform, NormExponent, NORM_TOL};
use crate::poly::{cond_exp_poly, distance, rx_distance, Polymorphism};
use crate::rational::Q;
use crate::rx::RxMeasure;
use crate::space::FinSpace;

pub type StarRule = fn(&Polymorphism) -> Polymorphism;

pub fn standard_star(p: &Polymorphism) -> Polymorphism {
    p.star()
}

/// `(x, y, t, m) ↦ (y, x, 1/t, m/t)`: the wrong mass factor.
pub fn inverted_mass_star(p: &Polymorphism) -> Polymorphism {
    let atoms: BTreeMap<_, _> = p
        .atoms()
        .iter()
        .map(|((x, y, t), m)| ((*y, *x, t.recip()), m / t))
        .collect();
    Polymorphism::unchecked(p.dst().clone(), p.src().clone(), atoms).expect("positive atoms")
}

#[derive(Debug, Clone)]
pub struct LawConfig {
    pub seed: u64,
    pub cases: usize,
    pub tol: f64,
    pub grid: Vec<(f64, f64)>,
    /// Largest number of atoms in a generated space.
    pub max_atoms: usize,
    pub star: StarRule,
}

impl Default for LawConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            cases: 1000,
            tol: 1e-12,
            grid: default_grid(),
            max_atoms: 6,
            star: standard_star,
        }
    }
}

/// `r ∈ {0, 1/4, 1/2, 3/4, 1}` × `s ∈ {-2, -1, 0, 1, 3}`.
pub fn default_grid() -> Vec<(f64, f64)> {
    let mut g = Vec::with_capacity(25);
    for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for s in [-2.0, -1.0, 0.0, 1.0, 3.0] {
            g.push((r, s));
        }
    }
    g
}

/// Outcome of one case.
#[derive(Debug, Clone)]
pub struct Case {
    pub ok: bool,
    pub defect: f64,
    /// Atom count of the inputs, used to pick the smallest counterexample.
    pub size: usize,
    pub witness: String,
}

impl Case {
    fn exact(ok: bool, defect: f64, size: usize, witness: impl FnOnce() -> String) -> Self {
        Self {
            ok,
            defect,
            size,
            witness: if ok { String::new() } else { witness() },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawOutcome {
    pub law: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub max_defect: f64,
    /// Inputs of the smallest failing case, as JSON.
    pub counterexample: Option<String>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type LawFn = fn(&mut ChaCha8Rng, &LawConfig) -> Case;

pub const LAWS: &[(&str, LawFn)] = &[
    ("rx-associativity", rx_assoc),
    ("rx-commutativity", rx_comm),
    ("rx-unit", rx_unit),
    ("rx-mass-multiplicative", rx_mass),
    ("rx-moment-multiplicative", rx_moment),
    ("compose-associativity", poly_assoc),
    ("star-antihomomorphism", star_antihom),
    ("validity-preserved", validity),
    ("star-involution", star_involution),
    ("gms-roundtrip", gms_roundtrip),
    ("projection-idempotent-selfadjoint", projection),
    ("mellin-functoriality", mellin_functor),
    ("mellin-norm-bound", mellin_norm),
    ("mellin-s-independence", mellin_s_independent),
];

pub fn run_law(name: &'static str, law: LawFn, cfg: &LawConfig) -> LawOutcome {
    let cases: Vec<Case> = (0..cfg.cases as u64)
        .into_par_iter()
        .map(|id| law(&mut gen::case_rng(cfg.seed, name, id), cfg))
        .collect();
    let failures: Vec<&Case> = cases.iter().filter(|c| !c.ok).collect();
    LawOutcome {
        law: name,
        cases: cases.len(),
        failures: failures.len(),
        max_defect: cases.iter().map(|c| c.defect).fold(0.0, f64::max),
        counterexample: failures.iter().min_by_key(|c| c.size).map(|c| c.witness.clone()),
    }
}

pub fn run_all(cfg: &LawConfig) -> Vec<LawOutcome> {
    LAWS.iter().map(|&(name, law)| run_law(name, law, cfg)).collect()
}

fn rx_triple(rng: &mut ChaCha8Rng) -> [RxMeasure; 3] {
    [0, 1, 2].map(|_| gen::rx_measure(rng, 6, 16))
}

fn rx_witness(ms: &[&RxMeasure]) -> String {
    format!("[{}]", ms.iter().map(|m| m.to_json()).collect::<Vec<_>>().join(","))
}

fn rx_case(lhs: RxMeasure, rhs: RxMeasure, ms: &[&RxMeasure]) -> Case {
    let size = ms.iter().map(|m| m.len()).sum();
    let ok = lhs == rhs;
    Case::exact(ok, if ok { 0.0 } else { rx_distance(&lhs, &rhs) }, size, || rx_witness(ms))
}

fn rx_assoc(rng: &mut ChaCha8Rng, _: &LawConfig) -> Case {
    let [a, b, c] = rx_triple(rng);
    rx_case(a.convolve(&b).convolve(&c), a.convolve(&b.convolve(&c)), &[&a, &b, &c])
}

fn rx_comm(rng: &mut ChaCha8Rng, _: &LawConfig) -> Case {
    let [a, b, _] = rx_triple(rng);
    rx_case(a.convolve(&b), b.convolve(&a), &[&a, &b])
}

fn rx_unit(rng: &mut ChaCha8Rng, _: &LawConfig) -> Case {
    let [a, _, _] = rx_triple(rng);
    let one = RxMeasure::delta(Q::one()).expect("unit");
    rx_case(a.convolve(&one), a.clone(), &[&a])
}

fn scalar_case(lhs: Q, rhs: Q, ms: &[&RxMeasure]) -> Case {
    let size = ms.iter().map(|m| m.len()).sum();
    let ok = lhs == rhs;
    let defect = if ok { 0.0 } else { crate::rational::to_f64(&(lhs - rhs)).abs() };
    Case::exact(ok, defect, size, || rx_witness(ms))
}

fn rx_mass(rng: &mut ChaCha8Rng, _: &LawConfig) -> Case {
    let [a, b, _] = rx_triple(rng);
    scalar_case(a.convolve(&b).mass(), a.mass() * b.mass(), &[&a, &b])
}

fn rx_moment(rng: &mut ChaCha8Rng, _: &LawConfig) -> Case {
    let [a, b, _] = rx_triple(rng);
    scalar_case(a.convolve(&b).moment(), a.moment() * b.moment(), &[&a, &b])
}

fn spaces(rng: &mut ChaCha8Rng, cfg: &LawConfig, k: usize) -> Vec<FinSpace> {
    (0..k)
        .map(|i| gen::prob_space(rng, cfg.max_atoms.max(1), &format!("s{i}_")))
        .collect()
}

fn chain(rng: &mut ChaCha8Rng, cfg: &LawConfig, k: usize) -> Vec<Polymorphism> {
    let sp = spaces(rng, cfg, k + 1);
    sp.windows(2).map(|w| gen::polymorphism(rng, &w[0], &w[1], 2)).collect()
}

fn poly_witness(ps: &[&Polymorphism]) -> String {
    format!("[{}]", ps.iter().map(|p| p.to_json()).collect::<Vec<_>>().join(","))
}

fn poly_case(lhs: &Polymorphism, rhs: &Polymorphism, ps: &[&Polymorphism]) -> Case {
    let size = ps.iter().map(|p| p.len()).sum();
    let ok = lhs == rhs;
    let defect = if ok { 0.0 } else { distance(lhs, rhs).unwrap_or(f64::INFINITY) };
    Case::exact(ok, defect, size, || poly_witness(ps))
}

fn poly_assoc(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let ps = chain(rng, cfg, 3);
    let lhs = ps[0].compose(&ps[1]).and_then(|pq| pq.compose(&ps[2])).expect("composable");
    let rhs = ps[1].compose(&ps[2]).and_then(|qr| ps[0].compose(&qr)).expect("composable");
    poly_case(&lhs, &rhs, &[&ps[0], &ps[1], &ps[2]])
}

fn star_antihom(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let ps = chain(rng, cfg, 2);
    let star = cfg.star;
    let lhs = star(&ps[0].compose(&ps[1]).expect("composable"));
    let rhs = star(&ps[1]).compose(&star(&ps[0])).expect("composable");
    poly_case(&lhs, &rhs, &[&ps[0], &ps[1]])
}

fn validity(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let ps = chain(rng, cfg, 2);
    let pq = ps[0].compose(&ps[1]).expect("composable");
    let ok = pq.is_valid() && (cfg.star)(&ps[0]).is_valid() && (cfg.star)(&pq).is_valid();
    let size = ps[0].len() + ps[1].len();
    Case::exact(ok, if ok { 0.0 } else { 1.0 }, size, || poly_witness(&[&ps[0], &ps[1]]))
}

fn star_involution(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let ps = chain(rng, cfg, 1);
    let twice = (cfg.star)(&(cfg.star)(&ps[0]));
    poly_case(&twice, &ps[0], &[&ps[0]])
}

/// Relabelings of a weighted space: `g` then `g⋆` is the unit, `g⋆` is the
/// inverse relabeling, and the embedding is multiplicative.
fn gms_roundtrip(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let z = gen::prob_space(rng, cfg.max_atoms.max(1), "z");
    let g = gen::permutation(rng, z.len());
    let h = gen::permutation(rng, z.len());
    let pg = Polymorphism::from_bijection(&z, &g).expect("bijection");
    let ph = Polymorphism::from_bijection(&z, &h).expect("bijection");
    let mut ginv = vec![0; g.len()];
    for (i, &j) in g.iter().enumerate() {
        ginv[j] = i;
    }
    let gh: Vec<usize> = g.iter().map(|&j| h[j]).collect();
    let star_g = (cfg.star)(&pg);
    let unit = pg.compose(&star_g).expect("composable");
    let checks = [
        (unit, Polymorphism::identity(&z)),
        (star_g, Polymorphism::from_bijection(&z, &ginv).expect("bijection")),
        (pg.compose(&ph).expect("composable"), Polymorphism::from_bijection(&z, &gh).expect("bijection")),
    ];
    let bad = checks.iter().find(|(a, b)| a != b);
    let defect = bad.map_or(0.0, |(a, b)| distance(a, b).unwrap_or(f64::INFINITY));
    let witness = || format!("{{\"space\":{},\"g\":{:?},\"h\":{:?}}}", z.to_json(), g, h);
    Case::exact(bad.is_none(), defect, z.len(), witness)
}

fn projection(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let z = gen::prob_space(rng, cfg.max_atoms.max(1), "z");
    let part = gen::partition(rng, &z, z.len());
    let m = cond_exp_poly(&z, &part).expect("partition of z").projection;
    let mm = m.compose(&m).expect("composable");
    let ok = mm == m && (cfg.star)(&m) == m;
    let witness = || format!("{{\"space\":{},\"partition\":{}}}", z.to_json(), part.to_json());
    Case::exact(ok, if ok { 0.0 } else { distance(&mm, &m).unwrap_or(1.0).max(1e-300) }, z.len(), witness)
}

fn float_case(defect: f64, tol: f64, ps: &[&Polymorphism]) -> Case {
    let ok = defect <= tol;
    let size = ps.iter().map(|p| p.len()).sum();
    Case::exact(ok, defect, size, || poly_witness(ps))
}

fn mellin_functor(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let ps = chain(rng, cfg, 2);
    let defect = cfg
        .grid
        .iter()
        .map(|&(r, s)| functoriality_defect(&ps[0], &ps[1], r, s).expect("composable"))
        .fold(0.0, f64::max);
    float_case(defect, cfg.tol, &[&ps[0], &ps[1]])
}

/// Excess of the weighted operator norm over 1 at grid points with `r` in
/// `{0, 1/2, 1}`.
fn mellin_norm(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let ps = chain(rng, cfg, 1);
    let excess = cfg
        .grid
        .iter()
        .filter_map(|&(r, s)| NormExponent::for_r(r).ok().map(|e| (r, s, e)))
        .map(|(r, s, e)| operator_norm(&transform(&ps[0], r, s).expect("grid"), e) - 1.0)
        .fold(0.0, f64::max);
    float_case(excess, NORM_TOL, &[&ps[0]])
}

fn mellin_s_independent(rng: &mut ChaCha8Rng, cfg: &LawConfig) -> Case {
    let sp = spaces(rng, cfg, 2);
    let terms = rng.gen_range(1..=3);
    let p = gen::measure_preserving(rng, &sp[0], &sp[1], terms);
    let mut by_r: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for &(r, s) in &cfg.grid {
        by_r.entry(r.to_bits()).or_default().push(s);
    }
    let defect = by_r
        .iter()
        .map(|(r, ss)| s_dependence(&p, f64::from_bits(*r), ss).expect("grid"))
        .fold(0.0, f64::max);
    float_case(defect, 1e-13, &[&p])
}
