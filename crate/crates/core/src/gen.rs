//! Seeded random inputs. Every case draws from its own ChaCha stream, keyed
//! by the run seed and the case id, so any single case replays on its own.

use std::collections::BTreeMap;

use num::{BigInt, One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bernoulli::CylFunction;
use crate::poly::Polymorphism;
use crate::rational::Q;
use crate::rx::RxMeasure;
use crate::space::{FinSpace, Partition};
use crate::train::FinPerm;

/// The generator of case `case` in stream `label` of a run seeded by `seed`.
pub fn case_rng(seed: u64, label: &str, case: u64) -> ChaCha8Rng {
    let tag = label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag);
    rng.set_stream(case);
    rng
}

/// Positive rational with numerator and denominator in `1..=2^bits`.
pub fn pos_rational<R: Rng>(rng: &mut R, bits: u32) -> Q {
    let top = 1u64 << bits;
    Q::new(BigInt::from(rng.gen_range(1..=top)), BigInt::from(rng.gen_range(1..=top)))
}

/// Up to `max_atoms` atoms with `bits`-bit locations and weights.
pub fn rx_measure<R: Rng>(rng: &mut R, max_atoms: usize, bits: u32) -> RxMeasure {
    let n = rng.gen_range(0..=max_atoms);
    RxMeasure::from_atoms((0..n).map(|_| (pos_rational(rng, bits), pos_rational(rng, bits))))
        .expect("positive atoms")
}

fn small_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    let raw: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=8)).collect();
    let total: u32 = raw.iter().sum();
    raw.into_iter().map(|w| Q::new(w.into(), total.into())).collect()
}

/// Probability space on `1..=max_atoms` atoms with small weights.
pub fn prob_space<R: Rng>(rng: &mut R, max_atoms: usize, tag: &str) -> FinSpace {
    let n = rng.gen_range(1..=max_atoms);
    weighted_space(rng, n, tag)
}

/// Probability space on exactly `n` atoms labeled `{tag}{i}`.
pub fn weighted_space<R: Rng>(rng: &mut R, n: usize, tag: &str) -> FinSpace {
    let atoms = small_weights(rng, n)
        .into_iter()
        .enumerate()
        .map(|(i, w)| (format!("{tag}{i}"), w))
        .collect();
    FinSpace::probability(atoms).expect("normalized")
}

/// A random polymorphism `src ↠ dst`. Cells are sparse, and with
/// `max_split > 1` a cell may carry several `t` values.
pub fn polymorphism<R: Rng>(rng: &mut R, src: &FinSpace, dst: &FinSpace, max_split: usize) -> Polymorphism {
    let (nx, ny) = (src.len(), dst.len());
    let mut a = vec![vec![0u32; ny]; nx];
    for (x, row) in a.iter_mut().enumerate() {
        for cell in row.iter_mut() {
            if rng.gen_bool(0.6) {
                *cell = rng.gen_range(1..=4);
            }
        }
        if row.iter().all(|&c| c == 0) {
            row[x % ny] = 1;
        }
    }
    for y in 0..ny {
        if a.iter().all(|row| row[y] == 0) {
            a[y % nx][y] = 1;
        }
    }
    // (x, y, relative t, m); t is fixed per column afterwards
    let mut pieces = Vec::new();
    for x in 0..nx {
        let row_total: u32 = a[x].iter().sum();
        for y in 0..ny {
            if a[x][y] == 0 {
                continue;
            }
            let m = src.weight(x) * Q::new(a[x][y].into(), row_total.into());
            let k = rng.gen_range(1..=max_split.max(1));
            let parts = small_weights(rng, k);
            for part in parts {
                let rel = Q::new(rng.gen_range(1..=6u32).into(), rng.gen_range(1..=6u32).into());
                pieces.push((x, y, rel, &m * part));
            }
        }
    }
    let mut column = vec![Q::zero(); ny];
    for (_, y, rel, m) in &pieces {
        column[*y] += rel * m;
    }
    let mut atoms = BTreeMap::new();
    for (x, y, rel, m) in pieces {
        let t = rel * dst.weight(y) / &column[y];
        *atoms.entry((x, y, t)).or_insert_with(Q::zero) += m;
    }
    Polymorphism::new(src.clone(), dst.clone(), atoms).expect("balanced by construction")
}

/// A measure-preserving polymorphism `src ↠ dst` (every `t = 1`): a mixture
/// of north-west-corner couplings taken along random atom orders.
pub fn measure_preserving<R: Rng>(rng: &mut R, src: &FinSpace, dst: &FinSpace, terms: usize) -> Polymorphism {
    let weights = small_weights(rng, terms.max(1));
    let mut atoms: BTreeMap<(usize, usize, Q), Q> = BTreeMap::new();
    for lambda in weights {
        let xs = permutation(rng, src.len());
        let ys = permutation(rng, dst.len());
        let mut left: Vec<Q> = xs.iter().map(|&x| src.weight(x).clone()).collect();
        let mut right: Vec<Q> = ys.iter().map(|&y| dst.weight(y).clone()).collect();
        let (mut i, mut j) = (0, 0);
        while i < xs.len() && j < ys.len() {
            let m = left[i].clone().min(right[j].clone());
            *atoms.entry((xs[i], ys[j], Q::one())).or_insert_with(Q::zero) += &lambda * &m;
            left[i] -= &m;
            right[j] -= &m;
            if left[i].is_zero() {
                i += 1;
            }
            if right[j].is_zero() {
                j += 1;
            }
        }
    }
    Polymorphism::new(src.clone(), dst.clone(), atoms).expect("coupling")
}

/// A permutation moving atoms only among atoms of equal weight.
pub fn weight_preserving_perm<R: Rng>(rng: &mut R, space: &FinSpace) -> Vec<usize> {
    let mut groups: BTreeMap<&Q, Vec<usize>> = BTreeMap::new();
    for i in 0..space.len() {
        groups.entry(space.weight(i)).or_default().push(i);
    }
    let mut perm = vec![0; space.len()];
    for members in groups.values() {
        let mut images = members.clone();
        images.shuffle(rng);
        for (&i, &j) in members.iter().zip(&images) {
            perm[i] = j;
        }
    }
    perm
}

pub fn permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// A uniformly random permutation of `{1..support}`.
pub fn fin_perm<R: Rng>(rng: &mut R, support: u32) -> FinPerm {
    let mut images: Vec<u32> = (1..=support).collect();
    images.shuffle(rng);
    FinPerm::from_images(&images).expect("permutation")
}

/// A random element of `K_α` moving points in `α+1..=α+extra`.
pub fn stabilizer_perm<R: Rng>(rng: &mut R, alpha: u32, extra: u32) -> FinPerm {
    let mut images: Vec<u32> = (alpha + 1..=alpha + extra).collect();
    images.shuffle(rng);
    FinPerm::from_pairs((alpha + 1..=alpha + extra).zip(images)).expect("permutation")
}

/// A random partition of the atoms into at most `max_blocks` blocks.
pub fn partition<R: Rng>(rng: &mut R, space: &FinSpace, max_blocks: usize) -> Partition {
    let k = rng.gen_range(1..=max_blocks.clamp(1, space.len()));
    let mut blocks: Vec<Vec<String>> = vec![Vec::new(); k];
    let mut order = permutation(rng, space.len());
    // the first k atoms seed distinct blocks
    for (pos, i) in order.drain(..).enumerate() {
        let b = if pos < k { pos } else { rng.gen_range(0..k) };
        blocks[b].push(space.label(i).to_string());
    }
    Partition::new(blocks).expect("disjoint cover")
}

/// From one block down to singletons, each step splitting one block.
pub fn refining_chain<R: Rng>(rng: &mut R, space: &FinSpace) -> Vec<Partition> {
    let mut current: Vec<Vec<String>> = vec![space.labels().map(str::to_string).collect()];
    let mut chain = vec![Partition::new(current.clone()).expect("one block")];
    while current.iter().any(|b| b.len() > 1) {
        let splittable: Vec<usize> = (0..current.len()).filter(|&b| current[b].len() > 1).collect();
        let b = splittable[rng.gen_range(0..splittable.len())];
        let mut block = current.swap_remove(b);
        block.shuffle(rng);
        let cut = rng.gen_range(1..block.len());
        let rest = block.split_off(cut);
        current.push(block);
        current.push(rest);
        chain.push(Partition::new(current.clone()).expect("disjoint cover"));
    }
    chain
}

/// A cylinder function on a random subset of `{1..span}` with small integer values.
pub fn cyl_function<R: Rng>(rng: &mut R, span: u32) -> CylFunction {
    let coords: Vec<u32> = (1..=span).filter(|_| rng.gen_bool(0.5)).collect();
    let values = (0..1usize << coords.len())
        .map(|_| Q::from_integer(rng.gen_range(-3..=3).into()))
        .collect();
    CylFunction::new(coords, values).expect("shape")
}

/// A mean-preserving spread of one atom: `(t, m)` becomes two atoms with the
/// same total mass and the same total `m·t`, so both marginals survive.
pub fn spread_one_atom<R: Rng>(rng: &mut R, p: &Polymorphism) -> Polymorphism {
    let keys: Vec<_> = p.atoms().keys().cloned().collect();
    let (x, y, t) = keys[rng.gen_range(0..keys.len())].clone();
    let m = p.atoms()[&(x, y, t.clone())].clone();
    let lambda = Q::new(rng.gen_range(1..=3u32).into(), 4u32.into());
    let shrink = Q::new(1u32.into(), rng.gen_range(2..=4u32).into());
    let m1 = &m * &lambda;
    let t1 = &t * &shrink;
    let m2 = &m - &m1;
    let t2 = (&m * &t - &m1 * &t1) / &m2;
    let mut atoms = p.atoms().clone();
    atoms.remove(&(x, y, t));
    *atoms.entry((x, y, t1)).or_insert_with(Q::zero) += m1;
    *atoms.entry((x, y, t2)).or_insert_with(Q::zero) += m2;
    Polymorphism::new(p.src().clone(), p.dst().clone(), atoms).expect("spread keeps both marginals")
}

/// Uniform element of `{1/2, 1/3}`.
pub fn bernoulli_p<R: Rng>(rng: &mut R) -> Q {
    if rng.gen_bool(0.5) {
        Q::new(BigInt::one(), BigInt::from(2))
    } else {
        Q::new(BigInt::one(), BigInt::from(3))
    }
}
