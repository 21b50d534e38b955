//! The convolution semiring of finite atomic measures on the multiplicative
//! group of positive reals, with finite first moment.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, ln_q, parse_q, require_nonnegative, require_positive, to_f64, Q};

/// A finite atomic measure `Σ w·δ_t` on `ℝ×`.
///
/// Stored in normal form: one entry per location `t > 0`, no zero masses.
/// Equality is equality of normal forms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RxMeasure {
    atoms: BTreeMap<Q, Q>,
}

impl RxMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Unit mass at `t`. `delta(1)` is the neutral element of convolution.
    pub fn delta(t: Q) -> Result<Self> {
        require_positive(&t)?;
        let mut atoms = BTreeMap::new();
        atoms.insert(t, Q::from_integer(1.into()));
        Ok(Self { atoms })
    }

    /// Builds a measure from `(t, w)` pairs, merging equal locations.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Q, Q)>,
    {
        let mut out = Self::zero();
        for (t, w) in atoms {
            require_positive(&t)?;
            require_nonnegative(&w)?;
            out.add_atom(t, w);
        }
        Ok(out)
    }

    /// Adds mass `w` at `t` in place. Callers guarantee `t > 0`, `w >= 0`.
    pub(crate) fn add_atom(&mut self, t: Q, w: Q) {
        if w.is_zero() {
            return;
        }
        let slot = self.atoms.entry(t).or_insert_with(Q::zero);
        *slot += w;
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> Q {
        self.atoms.values().sum()
    }

    /// `∫ t dσ`.
    pub fn moment(&self) -> Q {
        self.atoms.iter().map(|(t, w)| t * w).sum()
    }

    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (t1, w1) in &self.atoms {
            for (t2, w2) in &other.atoms {
                out.add_atom(t1 * t2, w1 * w2);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, w) in &other.atoms {
            out.add_atom(t.clone(), w.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Result<Self> {
        require_nonnegative(c)?;
        if c.is_zero() {
            return Ok(Self::zero());
        }
        Ok(Self {
            atoms: self.atoms.iter().map(|(t, w)| (t.clone(), w * c)).collect(),
        })
    }

    /// The measure `t·σ`: `(t, w) ↦ (t, w·t)`.
    pub fn tmul(&self) -> Self {
        Self {
            atoms: self.atoms.iter().map(|(t, w)| (t.clone(), w * t)).collect(),
        }
    }

    /// Pushforward under `t ↦ 1/t`.
    pub fn flip_invert(&self) -> Self {
        Self {
            atoms: self.atoms.iter().map(|(t, w)| (t.recip(), w.clone())).collect(),
        }
    }

    /// `Σ w·t^{r+is}` with the principal real logarithm of `t`.
    pub fn mellin(&self, r: f64, s: f64) -> Result<Complex64> {
        check_exponent(r)?;
        Ok(self
            .atoms
            .iter()
            .map(|(t, w)| to_f64(w) * power(t, r, s))
            .sum())
    }
}

pub(crate) fn check_exponent(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::BadExponent(r))
    }
}

/// `t^{r+is} = exp((r+is)·ln t)`.
pub(crate) fn power(t: &Q, r: f64, s: f64) -> Complex64 {
    let l = ln_q(t);
    Complex64::from_polar((r * l).exp(), s * l)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct AtomJson {
    pub t: String,
    pub w: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct RxMeasureJson {
    pub atoms: Vec<AtomJson>,
}

impl RxMeasure {
    pub fn to_json(&self) -> String {
        let doc = RxMeasureJson {
            atoms: self
                .atoms
                .iter()
                .map(|(t, w)| AtomJson {
                    t: format_q(t),
                    w: format_q(w),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: RxMeasureJson = serde_json::from_str(s)?;
        let atoms = doc
            .atoms
            .iter()
            .map(|a| Ok((parse_q(&a.t)?, parse_q(&a.w)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_atoms(atoms)
    }
}

/// `max(mass, moment)`, the endpoint bound on `|mellin(σ, r, s)|`.
pub fn endpoint_bound(a: &RxMeasure) -> Q {
    let (m, t) = (a.mass(), a.moment());
    if m > t {
        m
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn m(atoms: &[(Q, Q)]) -> RxMeasure {
        RxMeasure::from_atoms(atoms.iter().cloned()).unwrap()
    }

    #[test]
    fn delta_and_group_law() {
        assert_eq!(m(&[(qi(1), qi(1))]), RxMeasure::delta(qi(1)).unwrap());
        let six = RxMeasure::delta(qi(2)).unwrap().convolve(&RxMeasure::delta(qi(3)).unwrap());
        assert_eq!(six, m(&[(qi(6), qi(1))]));
        assert!(RxMeasure::delta(qi(0)).is_err());
        assert!(RxMeasure::delta(qi(-2)).is_err());
    }

    #[test]
    fn convolution_example() {
        let a = m(&[(qi(2), q(1, 2))]);
        let b = m(&[(qi(3), q(1, 4)), (qi(1), q(1, 2))]);
        let c = a.convolve(&b);
        assert_eq!(c, m(&[(qi(6), q(1, 8)), (qi(2), q(1, 4))]));
        assert_eq!(c.mass(), q(3, 8));
        assert_eq!(b.moment(), q(5, 4));
        assert_eq!(c.moment(), q(5, 4));
        assert_eq!(a.convolve(&RxMeasure::delta(qi(1)).unwrap()), a);
    }

    #[test]
    fn linear_structure() {
        let a = m(&[(qi(2), qi(1))]);
        assert_eq!(a.add(&a), m(&[(qi(2), qi(2))]));
        assert!(a.scale(&qi(0)).unwrap().is_empty());
        assert_eq!(m(&[(qi(2), q(1, 2))]).scale(&qi(3)).unwrap(), m(&[(qi(2), q(3, 2))]));
        assert!(a.scale(&qi(-1)).is_err());
        // zero-mass atoms vanish from the normal form
        assert!(m(&[(qi(5), qi(0))]).is_empty());
    }

    #[test]
    fn tmul_and_flip() {
        let a = m(&[(qi(2), q(1, 2)), (q(1, 2), qi(1))]);
        assert_eq!(a.tmul(), m(&[(qi(2), qi(1)), (q(1, 2), q(1, 2))]));
        assert_eq!(a.tmul().mass(), a.moment());
        assert_eq!(RxMeasure::delta(qi(2)).unwrap().flip_invert(), m(&[(q(1, 2), qi(1))]));
        assert_eq!(a.flip_invert().flip_invert(), a);
        let b = m(&[(qi(2), q(1, 2))]);
        assert_eq!(b.tmul().flip_invert().tmul(), m(&[(q(1, 2), q(1, 2))]));
    }

    #[test]
    fn mellin_points() {
        let a = m(&[(qi(2), q(1, 2))]);
        let v = a.mellin(0.5, 0.0).unwrap();
        assert!((v.re - 0.5f64 * 2f64.sqrt()).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
        let b = m(&[(qi(3), q(1, 4)), (qi(1), q(1, 2))]);
        assert!((b.mellin(0.0, 0.0).unwrap().re - 0.75).abs() < 1e-15);
        assert!((b.mellin(1.0, 0.0).unwrap().re - 1.25).abs() < 1e-15);
        assert!(a.mellin(1.5, 0.0).is_err());
        assert!(a.mellin(-0.1, 0.0).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let a = m(&[(qi(2), q(1, 2)), (q(1, 3), q(2, 5))]);
        let s = a.to_json();
        assert!(s.contains("\"t\":\"2/1\""));
        assert_eq!(RxMeasure::from_json(&s).unwrap(), a);
        assert!(RxMeasure::from_json(r#"{"atoms":[{"t":"-1/2","w":"1/1"}]}"#).is_err());
    }
}
