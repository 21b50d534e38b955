//! The Mellin–Markov transform `T_{r+is}` of a polymorphism and the bilinear
//! form `B_{r+is}`.
//!
//! Matrix orientation: rows are source atoms, columns destination atoms. The
//! transform is contravariant, `(Tψ)(x) = Σ_y M(x,y) ψ(y)`, so composing
//! `p: X↠Y` then `q: Y↠Z` multiplies `T(p)·T(q)` in that order.

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::Zero;

use crate::error::{Error, Result};
use crate::rational::{exact_sqrt, to_f64, Q};
use crate::rx::{check_exponent, power, RxMeasure};
use crate::poly::Polymorphism;

/// Relative tolerance for transform identities whose inputs are exact.
pub const TRANSFORM_TOL: f64 = 1e-12;
/// Tolerance for operator norms, whose singular values are iterative.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct MellinMatrix {
    pub r: f64,
    pub s: f64,
    pub src_labels: Vec<String>,
    pub dst_labels: Vec<String>,
    pub src_weights: Vec<f64>,
    pub dst_weights: Vec<f64>,
    /// Row-major, `src_labels.len() × dst_labels.len()`.
    pub entries: Vec<Vec<Complex64>>,
}

/// Weighted `L^p` exponents with a closed-form or spectral operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormExponent {
    One,
    Two,
    Infinity,
}

impl NormExponent {
    /// The exponent `1/r` matching the transform's contraction bound.
    pub fn for_r(r: f64) -> Result<Self> {
        if r == 1.0 {
            Ok(NormExponent::One)
        } else if r == 0.5 {
            Ok(NormExponent::Two)
        } else if r == 0.0 {
            Ok(NormExponent::Infinity)
        } else {
            Err(Error::UnsupportedExponent(format!("1/{r}")))
        }
    }
}

impl std::str::FromStr for NormExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(NormExponent::One),
            "2" => Ok(NormExponent::Two),
            "inf" | "infinity" | "∞" => Ok(NormExponent::Infinity),
            other => Err(Error::UnsupportedExponent(other.to_string())),
        }
    }
}

/// `B_{r+is}[p](φ, ψ) = Σ φ(x) ψ(y) m t^{r+is}` over the atoms of `p`.
pub fn bilinear_form(p: &Polymorphism, phi: &[f64], psi: &[f64], r: f64, s: f64) -> Result<Complex64> {
    check_exponent(r)?;
    if phi.len() != p.src().len() || psi.len() != p.dst().len() {
        return Err(Error::ShapeMismatch(format!(
            "functions of length {}/{} for spaces of size {}/{}",
            phi.len(),
            psi.len(),
            p.src().len(),
            p.dst().len()
        )));
    }
    Ok(p.atoms()
        .iter()
        .map(|((x, y, t), m)| phi[*x] * psi[*y] * to_f64(m) * power(t, r, s))
        .sum())
}

pub fn transform(p: &Polymorphism, r: f64, s: f64) -> Result<MellinMatrix> {
    check_exponent(r)?;
    let (n, k) = (p.src().len(), p.dst().len());
    let mut entries = vec![vec![Complex64::zero(); k]; n];
    let inv: Vec<Q> = p.src().weights().map(|w| w.recip()).collect();
    for ((x, y, t), m) in p.atoms() {
        entries[*x][*y] += to_f64(&(m * &inv[*x])) * power(t, r, s);
    }
    Ok(MellinMatrix {
        r,
        s,
        src_labels: p.src().labels().map(str::to_string).collect(),
        dst_labels: p.dst().labels().map(str::to_string).collect(),
        src_weights: p.src().weights().map(to_f64).collect(),
        dst_weights: p.dst().weights().map(to_f64).collect(),
        entries,
    })
}

impl MellinMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.dst_labels.len()
    }

    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.cols() {
            return Err(Error::ShapeMismatch(format!(
                "function of length {} for {} columns",
                psi.len(),
                self.cols()
            )));
        }
        Ok(self
            .entries
            .iter()
            .map(|row| row.iter().zip(psi).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self · other` for `self: X×Y`, `other: Y×Z`.
    pub fn mul(&self, other: &MellinMatrix) -> Result<MellinMatrix> {
        if self.dst_labels != other.src_labels {
            return Err(Error::SpaceMismatch("inner matrix dimensions differ".into()));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| {
                (0..other.cols())
                    .map(|z| row.iter().enumerate().map(|(y, a)| a * other.entries[y][z]).sum())
                    .collect()
            })
            .collect();
        Ok(MellinMatrix {
            r: self.r,
            s: self.s,
            src_labels: self.src_labels.clone(),
            dst_labels: other.dst_labels.clone(),
            src_weights: self.src_weights.clone(),
            dst_weights: other.dst_weights.clone(),
            entries,
        })
    }

    pub fn max_modulus(&self) -> f64 {
        self.entries.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` over entries.
    pub fn max_abs_diff(&self, other: &MellinMatrix) -> Result<f64> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::ShapeMismatch("matrices of different shape".into()));
        }
        Ok(self
            .entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// One `r,s,x,y,re,im` line per entry.
    pub fn csv_lines(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for (x, row) in self.entries.iter().enumerate() {
            for (y, c) in row.iter().enumerate() {
                out.push(format!(
                    "{},{},{},{},{:.17e},{:.17e}",
                    self.r, self.s, self.src_labels[x], self.dst_labels[y], c.re, c.im
                ));
            }
        }
        out
    }
}

/// Weighted operator norm of `T: L^p(Y, υ) → L^p(X, ξ)`.
pub fn operator_norm(mat: &MellinMatrix, exponent: NormExponent) -> f64 {
    match exponent {
        NormExponent::Infinity => mat
            .entries
            .iter()
            .map(|row| row.iter().map(|c| c.norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormExponent::One => (0..mat.cols())
            .map(|y| {
                let col: f64 = mat
                    .entries
                    .iter()
                    .zip(&mat.src_weights)
                    .map(|(row, w)| w * row[y].norm())
                    .sum();
                col / mat.dst_weights[y]
            })
            .fold(0.0, f64::max),
        NormExponent::Two => {
            let a = DMatrix::from_fn(mat.rows(), mat.cols(), |x, y| {
                mat.entries[x][y] * (mat.src_weights[x] / mat.dst_weights[y]).sqrt()
            });
            if a.is_empty() {
                return 0.0;
            }
            a.singular_values().max()
        }
    }
}

/// Relative defect `max |T(p)T(q) - T(p then q)| / max(1, max |T(p then q)|)`.
pub fn functoriality_defect(p: &Polymorphism, q: &Polymorphism, r: f64, s: f64) -> Result<f64> {
    let pq = p.compose(q)?;
    let lhs = transform(p, r, s)?.mul(&transform(q, r, s)?)?;
    let rhs = transform(&pq, r, s)?;
    Ok(lhs.max_abs_diff(&rhs)? / rhs.max_modulus().max(1.0))
}

/// Largest entry deviation of `T_{r+is}(p)` from `T_{r+i s₀}(p)` over `s` values.
pub fn s_dependence(p: &Polymorphism, r: f64, s_values: &[f64]) -> Result<f64> {
    let Some((&s0, rest)) = s_values.split_first() else {
        return Ok(0.0);
    };
    let base = transform(p, r, s0)?;
    rest.iter().try_fold(0.0f64, |acc, &s| Ok(acc.max(transform(p, r, s)?.max_abs_diff(&base)?)))
}

/// Exact form of the transform: entry `(x, y)` is the measure
/// `(1/ξ(x)) Σ m δ_t`, so `M(x,y) = ∫ t^{r+is}` of it for every `r+is` at once.
///
/// Products of these matrices convolve entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicTransform {
    pub entries: Vec<Vec<RxMeasure>>,
}

impl SymbolicTransform {
    pub fn of(p: &Polymorphism) -> Self {
        let mut entries = vec![vec![RxMeasure::zero(); p.dst().len()]; p.src().len()];
        let inv: Vec<Q> = p.src().weights().map(|w| w.recip()).collect();
        for ((x, y, t), m) in p.atoms() {
            entries[*x][*y].add_atom(t.clone(), m * &inv[*x]);
        }
        Self { entries }
    }

    pub fn mul(&self, other: &SymbolicTransform) -> Result<SymbolicTransform> {
        let inner = other.entries.len();
        if self.entries.first().is_some_and(|r| r.len() != inner) {
            return Err(Error::ShapeMismatch("inner dimensions differ".into()));
        }
        let cols = other.entries.first().map_or(0, Vec::len);
        let entries = self
            .entries
            .iter()
            .map(|row| {
                (0..cols)
                    .map(|z| {
                        row.iter()
                            .enumerate()
                            .fold(RxMeasure::zero(), |acc, (y, a)| acc.add(&a.convolve(&other.entries[y][z])))
                    })
                    .collect()
            })
            .collect();
        Ok(SymbolicTransform { entries })
    }

    pub fn eval(&self, r: f64, s: f64) -> Result<Vec<Vec<Complex64>>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.mellin(r, s)).collect())
            .collect()
    }

    /// The real matrix at `r = 1/2, s = 0` when every `t` is a rational square.
    pub fn exact_at_half(&self) -> Option<Vec<Vec<Q>>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        e.atoms()
                            .map(|(t, w)| exact_sqrt(t).map(|root| root * w))
                            .sum::<Option<Q>>()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Decides whether the transforms of `p` and `q` differ.
///
/// With `k` distinct locations in the union of both atom lists, each entry is
/// an exponential sum in `s` with at most `k` frequencies `ln t`, so agreement
/// at the `k+1` points `s = 0, 1, …, k` (with `r = 1/2`) forces equality:
/// the nodes `e^{i ln t}` are distinct because no ratio of rationals is `e^{2πn}`.
pub fn mellin_distinguishes(p: &Polymorphism, q: &Polymorphism) -> Result<bool> {
    if p.src() != q.src() || p.dst() != q.dst() {
        return Err(Error::SpaceMismatch("transforms of different hom-sets".into()));
    }
    let mut ts = p.distinct_t();
    ts.extend(q.distinct_t());
    ts.sort();
    ts.dedup();
    let yq = crate::poly::reindex(p.dst(), q.dst())?;
    let xq = crate::poly::reindex(p.src(), q.src())?;
    for l in 0..=ts.len() {
        let s = l as f64;
        let a = transform(p, 0.5, s)?;
        let b = transform(q, 0.5, s)?;
        let scale = a.max_modulus().max(b.max_modulus()).max(1.0);
        for x in 0..a.rows() {
            for y in 0..a.cols() {
                if (a.entries[x][y] - b.entries[xq[x]][yq[y]]).norm() > TRANSFORM_TOL * scale {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::cond_exp_poly;
    use crate::rational::{q, qi};
    use crate::space::{FinSpace, Partition};

    fn ab() -> FinSpace {
        FinSpace::probability(vec![("a", q(1, 3)), ("b", q(2, 3))]).unwrap()
    }

    #[test]
    fn bilinear_endpoints() {
        let x = ab();
        let swap = Polymorphism::from_bijection(&x, &[1, 0]).unwrap();
        let ones = [1.0, 1.0];
        let b1 = bilinear_form(&swap, &ones, &ones, 1.0, 0.0).unwrap();
        assert!((bilinear_form(&swap, &ones, &ones, 0.0, 0.0).unwrap().re - 1.0).abs() < 1e-15);
        assert!((b1.re - 1.0).abs() < 1e-15);
        assert!(bilinear_form(&swap, &ones, &[1.0], 0.5, 0.0).is_err());
        assert!(bilinear_form(&swap, &ones, &ones, 1.2, 0.0).is_err());
    }

    #[test]
    fn measure_preserving_is_s_independent() {
        let z = FinSpace::probability(vec![("a", q(1, 4)), ("b", q(1, 4)), ("c", q(1, 2))]).unwrap();
        let part = Partition::new(vec![vec!["a", "b"], vec!["c"]]).unwrap();
        let m = cond_exp_poly(&z, &part).unwrap().projection;
        let phi = [0.3, -1.0, 2.0];
        let psi = [1.5, 0.25, -0.5];
        let base = bilinear_form(&m, &phi, &psi, 0.5, 0.0).unwrap();
        for s in [-2.0, 1.0, 3.0] {
            let v = bilinear_form(&m, &phi, &psi, 0.5, s).unwrap();
            assert!((v - base).norm() < 1e-15);
        }
        assert!(s_dependence(&m, 0.25, &[-2.0, -1.0, 0.0, 1.0, 3.0]).unwrap() < 1e-13);
    }

    #[test]
    fn swap_transform_entries() {
        let x = ab();
        let swap = Polymorphism::from_bijection(&x, &[1, 0]).unwrap();
        let t = transform(&swap, 0.5, 0.0).unwrap();
        let sqrt2 = 2f64.sqrt();
        assert!((t.entries[0][1].re - sqrt2).abs() < 1e-15);
        assert!((t.entries[1][0].re - 1.0 / sqrt2).abs() < 1e-15);
        assert_eq!(t.entries[0][0], Complex64::zero());
        let psi = [Complex64::new(3.0, 0.0), Complex64::new(5.0, 0.0)];
        let out = t.apply(&psi).unwrap();
        assert!((out[0].re - 5.0 * sqrt2).abs() < 1e-14);
        assert!((out[1].re - 3.0 / sqrt2).abs() < 1e-14);
    }

    #[test]
    fn identity_transform() {
        let x = ab();
        let t = transform(&Polymorphism::identity(&x), 0.3, 1.7).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((t.entries[i][j] - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        for e in [NormExponent::One, NormExponent::Two, NormExponent::Infinity] {
            assert!((operator_norm(&t, e) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_is_conditional_expectation() {
        let z = FinSpace::probability(vec![("a", q(1, 4)), ("b", q(1, 4)), ("c", q(1, 2))]).unwrap();
        let part = Partition::new(vec![vec!["a", "b"], vec!["c"]]).unwrap();
        let m = cond_exp_poly(&z, &part).unwrap().projection;
        let exact = SymbolicTransform::of(&m).exact_at_half().unwrap();
        let half = q(1, 2);
        let zero = qi(0);
        assert_eq!(
            exact,
            vec![
                vec![half.clone(), half.clone(), zero.clone()],
                vec![half.clone(), half, zero.clone()],
                vec![zero.clone(), zero, qi(1)],
            ]
        );
        let t = transform(&m, 0.5, 2.0).unwrap();
        assert!((operator_norm(&t, NormExponent::Two) - 1.0).abs() < NORM_TOL);
    }

    #[test]
    fn bijection_norms_and_defects() {
        let x = FinSpace::probability(vec![("a", q(1, 6)), ("b", q(1, 3)), ("c", q(1, 2))]).unwrap();
        let g = Polymorphism::from_bijection(&x, &[1, 2, 0]).unwrap();
        let h = Polymorphism::from_bijection(&x, &[2, 1, 0]).unwrap();
        for (r, s) in [(0.0, 1.0), (0.5, -2.0), (1.0, 3.0), (0.25, 0.5)] {
            assert!(functoriality_defect(&g, &h, r, s).unwrap() <= 1e-13);
        }
        let t = transform(&g, 0.5, 1.3).unwrap();
        assert!((operator_norm(&t, NormExponent::Two) - 1.0).abs() < NORM_TOL);
        assert!(operator_norm(&transform(&g, 1.0, 0.0).unwrap(), NormExponent::One) <= 1.0 + NORM_TOL);
        assert!(operator_norm(&transform(&g, 0.0, 0.0).unwrap(), NormExponent::Infinity) <= 1.0 + NORM_TOL);
    }

    #[test]
    fn symbolic_bijection_is_delta_of_derivative() {
        let x = ab();
        let swap = Polymorphism::from_bijection(&x, &[1, 0]).unwrap();
        let sym = SymbolicTransform::of(&swap);
        assert_eq!(sym.entries[0][1], RxMeasure::delta(qi(2)).unwrap());
        assert_eq!(sym.entries[1][0], RxMeasure::delta(q(1, 2)).unwrap());
        assert!(sym.entries[0][0].is_empty());
        assert!(sym.exact_at_half().is_none());
    }

    #[test]
    fn distinguishes_spread() {
        let x = ab();
        let swap = Polymorphism::from_bijection(&x, &[1, 0]).unwrap();
        // split (a,b,2,1/3) into (1,1/6) and (3,1/6): same mass, same moment
        let mut atoms = swap.atoms().clone();
        atoms.remove(&(0, 1, qi(2)));
        atoms.insert((0, 1, qi(1)), q(1, 6));
        atoms.insert((0, 1, qi(3)), q(1, 6));
        let spread = Polymorphism::new(x.clone(), x, atoms).unwrap();
        assert!(mellin_distinguishes(&swap, &spread).unwrap());
        assert!(!mellin_distinguishes(&swap, &swap.clone()).unwrap());
    }

    #[test]
    fn norm_exponents() {
        assert_eq!(NormExponent::for_r(0.5).unwrap(), NormExponent::Two);
        assert!(NormExponent::for_r(0.3).is_err());
        assert!("3".parse::<NormExponent>().is_err());
        assert_eq!("inf".parse::<NormExponent>().unwrap(), NormExponent::Infinity);
    }
}
