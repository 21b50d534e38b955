//! The symmetric group `S_∞` acting on the i.i.d. Bernoulli(`p`) space
//! `{0,1}^ℕ` by permuting coordinates, computed exactly on cylinder functions.
//!
//! The action is `(g·z)_i = z_{g(i)}`, so `act(g, f) = f∘g` and
//! `act(g∘h) = act(g)∘act(h)`. The quotient of `{0,1}^ℕ` by `K_α` is the cube
//! `{0,1}^α` with its product measure.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mellin::{bilinear_form, operator_norm, MellinMatrix, NormExponent};
use crate::poly::{cond_exp_poly, distance, Polymorphism};
use crate::rational::{format_q, to_f64, Q};
use crate::space::{bernoulli_cube, FinSpace, Partition};
use crate::train::{dcoset_of, mult_reps, theta, FinPerm};

/// A function of finitely many coordinates with exact rational values.
///
/// `values[u]` is the value at the assignment whose bit for `coords[k]` is
/// `(u >> (len - 1 - k)) & 1`; the first coordinate is the most significant.
#[derive(Debug, Clone)]
pub struct CylFunction {
    coords: Vec<u32>,
    values: Vec<Q>,
}

fn bit(u: usize, k: usize, len: usize) -> usize {
    (u >> (len - 1 - k)) & 1
}

impl CylFunction {
    pub fn new(coords: Vec<u32>, values: Vec<Q>) -> Result<Self> {
        if coords.windows(2).any(|w| w[0] >= w[1]) || coords.first() == Some(&0) {
            return Err(Error::ShapeMismatch("coordinates must be increasing and start at 1".into()));
        }
        if values.len() != 1usize << coords.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} coordinates",
                values.len(),
                coords.len()
            )));
        }
        Ok(Self { coords, values })
    }

    pub fn constant(c: Q) -> Self {
        Self {
            coords: Vec::new(),
            values: vec![c],
        }
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(i: u32) -> Self {
        Self {
            coords: vec![i],
            values: vec![Q::zero(), Q::one()],
        }
    }

    /// Indicator of `{x_{coords[k]} = bits of assignment}`.
    pub fn indicator(coords: Vec<u32>, assignment: usize) -> Result<Self> {
        let mut values = vec![Q::zero(); 1 << coords.len()];
        values[assignment] = Q::one();
        Self::new(coords, values)
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// Largest coordinate used, `0` for constants.
    pub fn span(&self) -> u32 {
        self.coords.last().copied().unwrap_or(0)
    }

    /// Value at a point given as a lookup of coordinate bits.
    pub fn eval_with(&self, z: impl Fn(u32) -> usize) -> Q {
        let len = self.coords.len();
        let u = self
            .coords
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &c)| acc | (z(c) << (len - 1 - k)));
        self.values[u].clone()
    }

    /// The same function written over a superset of its coordinates.
    pub fn extend_to(&self, coords: &[u32]) -> Result<Self> {
        let pos: BTreeMap<u32, usize> = coords.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        if self.coords.iter().any(|c| !pos.contains_key(c)) {
            return Err(Error::ShapeMismatch("extension must contain every coordinate".into()));
        }
        let len = coords.len();
        let values = (0..1usize << len)
            .map(|u| self.eval_with(|c| bit(u, pos[&c], len)))
            .collect();
        Self::new(coords.to_vec(), values)
    }

    fn union_coords(&self, other: &Self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.coords.iter().chain(&other.coords).copied().collect();
        set.into_iter().collect()
    }

    /// Equality of the represented functions, whatever coordinate sets carry them.
    pub fn same_function(&self, other: &Self) -> bool {
        let u = self.union_coords(other);
        let a = self.extend_to(&u).expect("union");
        let b = other.extend_to(&u).expect("union");
        a.values == b.values
    }

    /// Drops coordinates the function does not depend on.
    pub fn simplify(&self) -> Self {
        let mut f = self.clone();
        let mut k = 0;
        while k < f.coords.len() {
            let len = f.coords.len();
            let shift = len - 1 - k;
            let independent = (0..1usize << len)
                .filter(|u| (u >> shift) & 1 == 0)
                .all(|u| f.values[u] == f.values[u | (1 << shift)]);
            if independent {
                let values = (0..1usize << len)
                    .filter(|u| (u >> shift) & 1 == 0)
                    .map(|u| f.values[u].clone())
                    .collect();
                let mut coords = f.coords.clone();
                coords.remove(k);
                f = CylFunction { coords, values };
            } else {
                k += 1;
            }
        }
        f
    }

    pub fn mul(&self, other: &Self) -> Self {
        let u = self.union_coords(other);
        let a = self.extend_to(&u).expect("union");
        let b = other.extend_to(&u).expect("union");
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
        CylFunction { coords: u, values }
    }
}

/// `f∘g`: the coordinate `c` of `f` is read at `g(c)`.
pub fn act(g: &FinPerm, f: &CylFunction) -> CylFunction {
    let moved: Vec<u32> = f.coords.iter().map(|&c| g.apply(c)).collect();
    let mut coords = moved.clone();
    coords.sort_unstable();
    let pos: BTreeMap<u32, usize> = coords.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let len = coords.len();
    let values = (0..1usize << len)
        .map(|w| {
            let u = moved
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, c)| acc | (bit(w, pos[c], len) << (len - 1 - k)));
            f.values[u].clone()
        })
        .collect();
    CylFunction { coords, values }
}

/// Exact computations for one Bernoulli parameter.
#[derive(Debug, Clone)]
pub struct BernoulliLab {
    p: Q,
}

/// The matrix of `P_α ∘ act(g)` on functions of `x₁..x_β`, in the indicator
/// bases of the cubes (rows `{0,1}^α`, columns `{0,1}^β`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedOp {
    pub alpha: u32,
    pub beta: u32,
    pub matrix: Vec<Vec<Q>>,
}

impl CompressedOp {
    pub fn mul(&self, other: &CompressedOp) -> Result<CompressedOp> {
        if self.beta != other.alpha {
            return Err(Error::IndexMismatch {
                left: self.beta as usize,
                right: other.alpha as usize,
            });
        }
        let cols = 1usize << other.beta;
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..cols)
                    .map(|w| row.iter().enumerate().map(|(v, a)| a * &other.matrix[v][w]).sum())
                    .collect()
            })
            .collect();
        Ok(CompressedOp {
            alpha: self.alpha,
            beta: other.beta,
            matrix,
        })
    }

    /// Largest `|entry|` of `self - other`.
    pub fn max_defect(&self, other: &CompressedOp) -> Q {
        self.matrix
            .iter()
            .flatten()
            .zip(other.matrix.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Q::zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multiplicativity {
    /// Exact max entry of `C(g)C(h) - C(g⊚h)`; zero when the law holds.
    pub defect: Q,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1 {
    pub holds: bool,
    pub n: u32,
}

impl BernoulliLab {
    pub fn new(p: Q) -> Result<Self> {
        if p <= Q::zero() || p >= Q::one() {
            return Err(Error::BadBernoulli(format_q(&p)));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> &Q {
        &self.p
    }

    fn bit_weight(&self, b: usize) -> Q {
        if b == 1 {
            self.p.clone()
        } else {
            Q::one() - &self.p
        }
    }

    /// Product weight of the assignment `u` over `len` coordinates.
    fn assignment_weight(&self, u: usize, len: usize) -> Q {
        (0..len).map(|k| self.bit_weight(bit(u, k, len))).product()
    }

    pub fn expectation(&self, f: &CylFunction) -> Q {
        let len = f.coords.len();
        f.values
            .iter()
            .enumerate()
            .map(|(u, v)| v * self.assignment_weight(u, len))
            .sum()
    }

    /// `E[f·h]`.
    pub fn inner(&self, f: &CylFunction, h: &CylFunction) -> Q {
        self.expectation(&f.mul(h))
    }

    /// `P_α f`: integrates out every coordinate above `alpha`.
    pub fn cond_expect(&self, f: &CylFunction, alpha: u32) -> CylFunction {
        let keep: Vec<usize> = (0..f.coords.len()).filter(|&k| f.coords[k] <= alpha).collect();
        let len = f.coords.len();
        let klen = keep.len();
        let mut values = vec![Q::zero(); 1 << klen];
        for (u, v) in f.values.iter().enumerate() {
            let mut w = Q::one();
            let mut target = 0usize;
            for k in 0..len {
                let b = bit(u, k, len);
                match keep.iter().position(|&kk| kk == k) {
                    Some(pos) => target |= b << (klen - 1 - pos),
                    None => w *= self.bit_weight(b),
                }
            }
            values[target] += v * w;
        }
        CylFunction {
            coords: keep.iter().map(|&k| f.coords[k]).collect(),
            values,
        }
    }

    /// Invariance under every transposition of `K_α` touching the support.
    pub fn is_k_invariant(f: &CylFunction, alpha: u32) -> bool {
        let fresh = f.span() + 1;
        f.coords
            .iter()
            .filter(|&&c| c > alpha)
            .all(|&c| act(&FinPerm::transposition(c, fresh).expect("valid"), f).same_function(f))
    }

    pub fn compressed_op(&self, g: &FinPerm, alpha: u32, beta: u32) -> CompressedOp {
        let rows = 1usize << alpha;
        let cols = 1usize << beta;
        let src: Vec<u32> = (1..=beta).collect();
        let mut matrix = vec![vec![Q::zero(); cols]; rows];
        for v in 0..cols {
            let e = CylFunction::indicator(src.clone(), v).expect("indicator");
            let image = self.cond_expect(&act(g, &e), alpha);
            for (u, row) in matrix.iter_mut().enumerate() {
                row[v] = image.eval_with(|c| bit(u, c as usize - 1, alpha as usize));
            }
        }
        CompressedOp { alpha, beta, matrix }
    }

    pub fn multiplicativity_check(
        &self,
        g: &FinPerm,
        h: &FinPerm,
        alpha: u32,
        beta: u32,
        gamma: u32,
    ) -> Result<Multiplicativity> {
        let prod = mult_reps(g, h, alpha, beta, gamma)?;
        let lhs = self.compressed_op(g, alpha, beta).mul(&self.compressed_op(h, beta, gamma))?;
        let rhs = self.compressed_op(&prod.representative, alpha, gamma);
        Ok(Multiplicativity {
            defect: lhs.max_defect(&rhs),
            n: prod.n,
        })
    }

    /// `𝒮_{α,β}(g)`: lift `Z_α` into the cube, move by `g`, project to `Z_β`.
    ///
    /// Computed by composing `star(𝔩_α)`, `σ(g)` and `𝔩_β` over the cube on
    /// `{1..max(α, β, supp g)}`.
    pub fn s_poly(&self, g: &FinPerm, alpha: u32, beta: u32) -> Result<Polymorphism> {
        let n = alpha.max(beta).max(g.support_bound()) as usize;
        let cube = bernoulli_cube(n, &self.p)?;
        let sigma = Polymorphism::from_bijection(&cube, &coordinate_perm(g, n))?;
        let lift = self.restriction_map(&cube, n, alpha as usize)?.star();
        let project = self.restriction_map(&cube, n, beta as usize)?;
        lift.compose(&sigma)?.compose(&project)
    }

    /// `𝔩`: the cube on `n` coordinates onto the cube on the first `k`.
    fn restriction_map(&self, cube: &FinSpace, n: usize, k: usize) -> Result<Polymorphism> {
        let target = bernoulli_cube(k, &self.p)?;
        let map: Vec<usize> = (0..cube.len()).map(|z| z >> (n - k)).collect();
        Polymorphism::from_map(cube, &target, &map)
    }

    pub fn theorem1_check(&self, g: &FinPerm, h: &FinPerm, alpha: u32, beta: u32, gamma: u32) -> Result<Theorem1> {
        let prod = mult_reps(g, h, alpha, beta, gamma)?;
        let lhs = self.s_poly(g, alpha, beta)?.compose(&self.s_poly(h, beta, gamma)?)?;
        let rhs = self.s_poly(&prod.representative, alpha, gamma)?;
        Ok(Theorem1 {
            holds: lhs == rhs,
            n: prod.n,
        })
    }

    /// Smallest `j` with `⟨act(θ(α,j), f), h⟩ = ⟨P_α f, P_α h⟩`, holding for
    /// the three following `j` as well.
    pub fn theta_weak_limit_check(&self, alpha: u32, f: &CylFunction, h: &CylFunction) -> Result<u32> {
        let target = self.inner(&self.cond_expect(f, alpha), &self.cond_expect(h, alpha));
        let holds = |j: u32| self.inner(&act(&theta(alpha, j), f), h) == target;
        let cap = f.span().max(h.span()) + 4;
        (1..=cap)
            .find(|&j| (j..j + 4).all(holds))
            .ok_or(Error::NoWeakLimit(cap as usize))
    }

    /// Weighted `L²` operator norm of a compressed operator.
    pub fn l2_norm(&self, op: &CompressedOp) -> Result<f64> {
        let src = bernoulli_cube(op.alpha as usize, &self.p)?;
        let dst = bernoulli_cube(op.beta as usize, &self.p)?;
        let mat = MellinMatrix {
            r: 0.5,
            s: 0.0,
            src_labels: src.labels().map(str::to_string).collect(),
            dst_labels: dst.labels().map(str::to_string).collect(),
            src_weights: src.weights().map(to_f64).collect(),
            dst_weights: dst.weights().map(to_f64).collect(),
            entries: op
                .matrix
                .iter()
                .map(|row| row.iter().map(|v| to_f64(v).into()).collect())
                .collect(),
        };
        Ok(operator_norm(&mat, NormExponent::Two))
    }

    /// The same double coset gives the same `𝒮`.
    pub fn s_poly_coset_invariant(
        &self,
        g: &FinPerm,
        k: &FinPerm,
        l: &FinPerm,
        alpha: u32,
        beta: u32,
    ) -> Result<bool> {
        if !k.in_stabilizer(alpha) || !l.in_stabilizer(beta) {
            return Err(Error::InvalidPermutation("k must lie in K_α and l in K_β".into()));
        }
        let moved = k.compose(g).compose(l);
        debug_assert_eq!(dcoset_of(&moved, alpha, beta), dcoset_of(g, alpha, beta));
        Ok(self.s_poly(&moved, alpha, beta)? == self.s_poly(g, alpha, beta)?)
    }
}

/// Index permutation of the cube `{0,1}^n` realizing `z ↦ g·z`.
fn coordinate_perm(g: &FinPerm, n: usize) -> Vec<usize> {
    (0..1usize << n)
        .map(|z| {
            (1..=n as u32).fold(0usize, |acc, i| {
                let src = g.apply(i) as usize;
                acc | (bit(z, src - 1, n) << (n - i as usize))
            })
        })
        .collect()
}

/// The report of one closure experiment along a refining chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureReport {
    /// `distance(𝔪_k ⋄ r ⋄ 𝔪_k, r)` per chain element.
    pub distances: Vec<f64>,
    /// `(k, r, s, |B[r](P_kφ, P_kψ) - B[r](φ, ψ)|)`.
    pub bilinear_defects: Vec<(usize, f64, f64, f64)>,
    /// Largest `|B[𝔪_k r 𝔪_k](φ,ψ) - B[r](P_kφ, P_kψ)|` seen.
    pub identity_defect: f64,
}

/// Weighted block average of `phi`.
pub fn block_average(space: &FinSpace, part: &Partition, phi: &[f64]) -> Result<Vec<f64>> {
    let map = part.block_map(space)?;
    let mut mass = vec![0.0; part.len()];
    let mut sum = vec![0.0; part.len()];
    for (i, &b) in map.iter().enumerate() {
        let w = to_f64(space.weight(i));
        mass[b] += w;
        sum[b] += w * phi[i];
    }
    Ok(map.iter().map(|&b| sum[b] / mass[b]).collect())
}

/// Compresses `r: Z↠Z` by the conditional expectations of a refining chain.
pub fn closure_experiment(
    r: &Polymorphism,
    chain: &[Partition],
    phi: &[f64],
    psi: &[f64],
    grid: &[(f64, f64)],
) -> Result<ClosureReport> {
    let z = r.src();
    if r.dst() != z {
        return Err(Error::SpaceMismatch("closure experiments need r: Z↠Z".into()));
    }
    for (k, w) in chain.windows(2).enumerate() {
        if !w[1].refines(&w[0])? {
            return Err(Error::NotRefining(k + 1));
        }
    }
    let mut report = ClosureReport {
        distances: Vec::with_capacity(chain.len()),
        bilinear_defects: Vec::new(),
        identity_defect: 0.0,
    };
    for (k, part) in chain.iter().enumerate() {
        let m = cond_exp_poly(z, part)?.projection;
        let squeezed = m.compose(r)?.compose(&m)?;
        report.distances.push(distance(&squeezed, r)?);
        let pphi = block_average(z, part, phi)?;
        let ppsi = block_average(z, part, psi)?;
        for &(re, s) in grid {
            let full = bilinear_form(r, phi, psi, re, s)?;
            let compressed = bilinear_form(r, &pphi, &ppsi, re, s)?;
            let via_poly = bilinear_form(&squeezed, phi, psi, re, s)?;
            report.bilinear_defects.push((k, re, s, (compressed - full).norm()));
            report.identity_defect = report.identity_defect.max((via_poly - compressed).norm());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::mellin::SymbolicTransform;

    fn half() -> BernoulliLab {
        BernoulliLab::new(q(1, 2)).unwrap()
    }

    fn p(s: &str) -> FinPerm {
        s.parse().unwrap()
    }

    #[test]
    fn action_examples() {
        let f = CylFunction::new(vec![1, 3], vec![qi(1), qi(2), qi(3), qi(5)]).unwrap();
        assert!(act(&FinPerm::identity(), &f).same_function(&f));
        let moved = act(&p("(1 2)"), &CylFunction::coordinate(1));
        assert!(moved.same_function(&CylFunction::coordinate(2)));
        // act(g∘h) = act(g)∘act(h)
        let g = p("(1 2 3)");
        let h = p("(3 4)");
        assert!(act(&g.compose(&h), &f).same_function(&act(&g, &act(&h, &f))));
    }

    #[test]
    fn conditional_expectation_examples() {
        let lab = half();
        let x1 = CylFunction::coordinate(1);
        assert!(lab.cond_expect(&x1, 1).same_function(&x1));
        let c = lab.cond_expect(&CylFunction::coordinate(2), 1);
        assert!(c.same_function(&CylFunction::constant(q(1, 2))));
        let third = BernoulliLab::new(q(1, 3)).unwrap();
        assert!(third
            .cond_expect(&CylFunction::coordinate(2), 1)
            .same_function(&CylFunction::constant(q(1, 3))));
    }

    #[test]
    fn padding_and_simplify() {
        let f = CylFunction::coordinate(2);
        let wide = f.extend_to(&[1, 2, 5]).unwrap();
        assert!(wide.same_function(&f));
        let back = wide.simplify();
        assert_eq!(back.coords(), &[2]);
        assert!(f.extend_to(&[1]).is_err());
        assert!(CylFunction::new(vec![2, 1], vec![qi(0); 4]).is_err());
        assert!(CylFunction::new(vec![1], vec![qi(0); 3]).is_err());
    }

    #[test]
    fn weak_limit_examples() {
        let lab = half();
        let x1 = CylFunction::coordinate(1);
        assert_eq!(lab.theta_weak_limit_check(1, &x1, &x1).unwrap(), 1);
        let x2 = CylFunction::coordinate(2);
        assert_eq!(lab.theta_weak_limit_check(1, &x2, &x2).unwrap(), 1);
        assert_eq!(lab.inner(&act(&theta(1, 1), &x2), &x2), q(1, 4));
        let x2x3 = CylFunction::coordinate(2).mul(&CylFunction::coordinate(3));
        let j = lab.theta_weak_limit_check(0, &x2x3, &x2).unwrap();
        assert_eq!(j, 1);
        for jj in j..j + 4 {
            assert_eq!(lab.inner(&act(&theta(0, jj), &x2x3), &x2), q(1, 8));
        }
    }

    #[test]
    fn compressed_examples() {
        let lab = half();
        let id = lab.compressed_op(&FinPerm::identity(), 2, 2);
        for (u, row) in id.matrix.iter().enumerate() {
            for (v, e) in row.iter().enumerate() {
                assert_eq!(*e, if u == v { qi(1) } else { qi(0) });
            }
        }
        let swap = lab.compressed_op(&p("(1 2)"), 1, 1);
        assert!(swap.matrix.iter().flatten().all(|e| *e == q(1, 2)));
        let m = lab.multiplicativity_check(&p("(1 2)"), &p("(1 2)"), 1, 1, 1).unwrap();
        assert!(m.defect.is_zero());
        let id = FinPerm::identity();
        assert!(lab.multiplicativity_check(&id, &id, 2, 2, 2).unwrap().defect.is_zero());
    }

    #[test]
    fn s_poly_examples() {
        let lab = half();
        let diag = lab.s_poly(&FinPerm::identity(), 1, 1).unwrap();
        let atoms = diag.labeled_atoms();
        assert_eq!(atoms.len(), 2);
        assert!(atoms.iter().all(|(u, v, t, m)| u == v && t.is_one() && *m == q(1, 2)));
        let indep = lab.s_poly(&p("(1 2)"), 1, 1).unwrap();
        assert_eq!(indep.len(), 4);
        assert!(indep.atoms().iter().all(|((_, _, t), m)| t.is_one() && *m == q(1, 4)));
        let point = lab.s_poly(&p("(1 3)"), 0, 0).unwrap();
        assert_eq!(point.len(), 1);
        assert!(point.is_valid());
        assert!(lab.theorem1_check(&p("(1 2)"), &p("(1 2)"), 1, 1, 1).unwrap().holds);
        let id = FinPerm::identity();
        assert!(lab.theorem1_check(&id, &id, 1, 1, 1).unwrap().holds);
    }

    #[test]
    fn s_poly_matches_compressed_op() {
        let lab = BernoulliLab::new(q(1, 3)).unwrap();
        let g = p("(1 4 2)(3 5)");
        for (a, b) in [(1, 2), (2, 2), (3, 1), (0, 2)] {
            let s = lab.s_poly(&g, a, b).unwrap();
            let exact = SymbolicTransform::of(&s).exact_at_half().unwrap();
            assert_eq!(exact, lab.compressed_op(&g, a, b).matrix);
        }
    }

    #[test]
    fn hewitt_savage_identification() {
        let lab = half();
        let f = CylFunction::new(vec![1, 2], vec![qi(1), qi(1), qi(4), qi(4)]).unwrap();
        assert!(BernoulliLab::is_k_invariant(&f, 1));
        assert!(lab.cond_expect(&f, 1).same_function(&f));
        let g = CylFunction::new(vec![1, 2], vec![qi(1), qi(2), qi(4), qi(4)]).unwrap();
        assert!(!BernoulliLab::is_k_invariant(&g, 1));
        assert!(!lab.cond_expect(&g, 1).same_function(&g));
    }

    #[test]
    fn closure_distances_can_rise() {
        let z = FinSpace::uniform(3);
        let rows = [[(1, 6), (1, 12), (1, 12)], [(1, 18), (1, 9), (1, 6)], [(1, 9), (5, 36), (1, 12)]];
        let labeled: Vec<(String, String, Q, Q)> = rows
            .iter()
            .enumerate()
            .flat_map(|(x, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(y, &(n, d))| (x.to_string(), y.to_string(), qi(1), q(n, d)))
            })
            .collect();
        let r = Polymorphism::from_labeled(z.clone(), z.clone(), labeled).unwrap();
        let chain = vec![
            Partition::one_block(&z),
            Partition::new(vec![vec!["0", "1"], vec!["2"]]).unwrap(),
            Partition::singletons(&z),
        ];
        let rep = closure_experiment(&r, &chain, &[0.0; 3], &[0.0; 3], &[]).unwrap();
        // twice the largest cell mass defect: 2/18, then 2/16
        assert!((rep.distances[0] - 1.0 / 9.0).abs() < 1e-15);
        assert!((rep.distances[1] - 1.0 / 8.0).abs() < 1e-15);
        assert_eq!(rep.distances[2], 0.0);
    }

    #[test]
    fn closure_examples() {
        let u = FinSpace::uniform(2);
        let id = Polymorphism::identity(&u);
        let chain = vec![Partition::one_block(&u), Partition::singletons(&u)];
        let grid = [(0.5, 0.0), (0.0, 1.0)];
        let rep = closure_experiment(&id, &chain, &[1.0, -1.0], &[2.0, 0.5], &grid).unwrap();
        assert!((rep.distances[0] - 0.5).abs() < 1e-15);
        assert_eq!(rep.distances[1], 0.0);
        assert!(rep.identity_defect < 1e-12);
        let bad = vec![Partition::singletons(&u), Partition::one_block(&u)];
        assert!(matches!(
            closure_experiment(&id, &bad, &[1.0, 1.0], &[1.0, 1.0], &grid),
            Err(Error::NotRefining(1))
        ));
    }
}
