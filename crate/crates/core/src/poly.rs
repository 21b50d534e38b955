//! Polymorphisms of finite atomic measure spaces: measures on `X×Y×ℝ×` whose
//! `X`-marginal is `ξ` and whose `t`-weighted `Y`-marginal is `υ`.
//!
//! Composition is written with explicit `first`/`then` roles: `compose(p, q)`
//! spreads along `p: X↠Y` and then along `q: Y↠Z`. In the multiplicative
//! notation `q ⋄ p` of the literature this is the same element.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dbl::bl_distance;
use crate::error::{Error, Result};
use crate::rational::{format_q, ln_q, parse_q, require_positive, to_f64, Q};
use crate::rx::RxMeasure;
use crate::space::{quotient, FinSpace, Partition, SpaceJson};

/// Key of a polymorphism atom: source index, destination index, `t`.
pub type AtomKey = (usize, usize, Q);

#[derive(Debug, Clone)]
pub struct Polymorphism {
    src: FinSpace,
    dst: FinSpace,
    atoms: BTreeMap<AtomKey, Q>,
}

/// One violated marginal condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `Σ m` over the row at `label` differs from `ξ(label)` by `defect`.
    Row { label: String, defect: Q },
    /// `Σ m·t` over the column at `label` differs from `υ(label)` by `defect`.
    Column { label: String, defect: Q },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Row { label, defect } => {
                write!(f, "condition 1 at {label:?}: defect {}", format_q(defect))
            }
            Violation::Column { label, defect } => {
                write!(f, "condition 2 at {label:?}: defect {}", format_q(defect))
            }
        }
    }
}

impl Polymorphism {
    /// Returns the polymorphism after checking both marginal conditions.
    pub fn new(src: FinSpace, dst: FinSpace, atoms: BTreeMap<AtomKey, Q>) -> Result<Self> {
        let p = Self::unchecked(src, dst, atoms)?;
        let report = p.validate();
        if report.is_empty() {
            Ok(p)
        } else {
            let msg: Vec<String> = report.iter().map(ToString::to_string).collect();
            Err(Error::InvalidPolymorphism(msg.join("; ")))
        }
    }

    /// Builds the atom measure without checking the marginals. Indices must be
    /// in range, locations positive; zero masses are dropped.
    pub fn unchecked(src: FinSpace, dst: FinSpace, atoms: BTreeMap<AtomKey, Q>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for ((x, y, t), m) in atoms {
            if x >= src.len() || y >= dst.len() {
                return Err(Error::InvalidPolymorphism(format!("atom index ({x},{y}) out of range")));
            }
            require_positive(&t)?;
            if m < Q::zero() {
                return Err(Error::Negative(format_q(&m)));
            }
            if !m.is_zero() {
                clean.insert((x, y, t), m);
            }
        }
        Ok(Self { src, dst, atoms: clean })
    }

    /// Builds from labeled atoms `(x, y, t, m)`, merging repeated triples.
    pub fn from_labeled<S: AsRef<str>>(
        src: FinSpace,
        dst: FinSpace,
        atoms: impl IntoIterator<Item = (S, S, Q, Q)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<AtomKey, Q> = BTreeMap::new();
        for (x, y, t, m) in atoms {
            let key = (src.index_of(x.as_ref())?, dst.index_of(y.as_ref())?, t);
            *map.entry(key).or_insert_with(Q::zero) += m;
        }
        Self::unchecked(src, dst, map)
    }

    pub fn src(&self) -> &FinSpace {
        &self.src
    }

    pub fn dst(&self) -> &FinSpace {
        &self.dst
    }

    pub fn atoms(&self) -> &BTreeMap<AtomKey, Q> {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `(x label, y label, t, m)` for every atom.
    pub fn labeled_atoms(&self) -> Vec<(String, String, Q, Q)> {
        self.atoms
            .iter()
            .map(|((x, y, t), m)| {
                (
                    self.src.label(*x).to_string(),
                    self.dst.label(*y).to_string(),
                    t.clone(),
                    m.clone(),
                )
            })
            .collect()
    }

    /// Exact check of both marginal conditions; empty when valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut rows = vec![Q::zero(); self.src.len()];
        let mut cols = vec![Q::zero(); self.dst.len()];
        for ((x, y, t), m) in &self.atoms {
            rows[*x] += m;
            cols[*y] += m * t;
        }
        let mut out = Vec::new();
        for (i, sum) in rows.into_iter().enumerate() {
            let defect = sum - self.src.weight(i);
            if !defect.is_zero() {
                out.push(Violation::Row {
                    label: self.src.label(i).to_string(),
                    defect,
                });
            }
        }
        for (j, sum) in cols.into_iter().enumerate() {
            let defect = sum - self.dst.weight(j);
            if !defect.is_zero() {
                out.push(Violation::Column {
                    label: self.dst.label(j).to_string(),
                    defect,
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn identity(space: &FinSpace) -> Self {
        let atoms = (0..space.len())
            .map(|i| ((i, i, Q::one()), space.weight(i).clone()))
            .collect();
        Self {
            src: space.clone(),
            dst: space.clone(),
            atoms,
        }
    }

    /// Embeds a relabeling `x ↦ q(x)` of the atoms as
    /// `x ↦ (x, q(x), ζ(q(x))/ζ(x))` with mass `ζ(x)`.
    ///
    /// `perm[i]` is the image index of atom `i`.
    pub fn from_bijection(space: &FinSpace, perm: &[usize]) -> Result<Self> {
        check_bijection(perm, space.len())?;
        let atoms = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let w = space.weight(i);
                ((i, j, space.weight(j) / w), w.clone())
            })
            .collect();
        Ok(Self {
            src: space.clone(),
            dst: space.clone(),
            atoms,
        })
    }

    /// Label-based form of [`Polymorphism::from_bijection`].
    pub fn from_bijection_labels(space: &FinSpace, q: &[(&str, &str)]) -> Result<Self> {
        let mut perm = vec![usize::MAX; space.len()];
        for (a, b) in q {
            let i = space.index_of(a)?;
            if perm[i] != usize::MAX {
                return Err(Error::NotBijective(format!("{a:?} mapped twice")));
            }
            perm[i] = space.index_of(b)?;
        }
        Self::from_bijection(space, &perm)
    }

    /// The polymorphism `x ↦ (x, π(x), 1)` of a measure-compatible map.
    ///
    /// `map[i]` is the destination index of source atom `i`.
    pub fn from_map(src: &FinSpace, dst: &FinSpace, map: &[usize]) -> Result<Self> {
        if map.len() != src.len() {
            return Err(Error::ShapeMismatch(format!(
                "map has {} entries for {} atoms",
                map.len(),
                src.len()
            )));
        }
        let mut pre = vec![Q::zero(); dst.len()];
        for (i, &j) in map.iter().enumerate() {
            if j >= dst.len() {
                return Err(Error::ShapeMismatch(format!("map target {j} out of range")));
            }
            pre[j] += src.weight(i);
        }
        for (j, mass) in pre.iter().enumerate() {
            if mass != dst.weight(j) {
                return Err(Error::MeasureIncompatible {
                    label: dst.label(j).to_string(),
                    preimage: format_q(mass),
                    target: format_q(dst.weight(j)),
                });
            }
        }
        let atoms = map
            .iter()
            .enumerate()
            .map(|(i, &j)| ((i, j, Q::one()), src.weight(i).clone()))
            .collect();
        Ok(Self {
            src: src.clone(),
            dst: dst.clone(),
            atoms,
        })
    }

    /// Spreads along `self: X↠Y`, then along `then: Y↠Z`.
    ///
    /// Atom pairs `(x,y,t₁,m₁)`, `(y,z,t₂,m₂)` contribute
    /// `(x, z, t₁t₂, m₁m₂/υ(y))`.
    pub fn compose(&self, then: &Polymorphism) -> Result<Polymorphism> {
        if self.dst != then.src {
            return Err(Error::SpaceMismatch(
                "destination of the first factor differs from the source of the second".into(),
            ));
        }
        // then's rows, re-indexed into self.dst order
        let ymap = reindex(&then.src, &self.dst)?;
        let mut rows: Vec<Vec<(usize, &Q, &Q)>> = vec![Vec::new(); self.dst.len()];
        for ((y, z, t), m) in &then.atoms {
            rows[ymap[*y]].push((*z, t, m));
        }
        let inv: Vec<Q> = self.dst.weights().map(|w| w.recip()).collect();
        let mut atoms: BTreeMap<AtomKey, Q> = BTreeMap::new();
        for ((x, y, t1), m1) in &self.atoms {
            let scaled = m1 * &inv[*y];
            for &(z, t2, m2) in &rows[*y] {
                *atoms.entry((*x, z, t1 * t2)).or_insert_with(Q::zero) += &scaled * m2;
            }
        }
        Ok(Polymorphism {
            src: self.src.clone(),
            dst: then.dst.clone(),
            atoms,
        })
    }

    /// The involution `(x, y, t, m) ↦ (y, x, 1/t, m·t)`.
    pub fn star(&self) -> Polymorphism {
        let atoms = self
            .atoms
            .iter()
            .map(|((x, y, t), m)| ((*y, *x, t.recip()), m * t))
            .collect();
        Polymorphism {
            src: self.dst.clone(),
            dst: self.src.clone(),
            atoms,
        }
    }

    /// Supported on `t = 1`.
    pub fn is_measure_preserving(&self) -> bool {
        self.atoms.keys().all(|(_, _, t)| t.is_one())
    }

    /// The measure on `ℝ×` obtained by projecting the cell `{x}×{y}`.
    pub fn cell(&self, x: usize, y: usize) -> RxMeasure {
        let lo = (x, y, Q::zero());
        let mut out = RxMeasure::zero();
        for ((ax, ay, t), m) in self.atoms.range(lo..) {
            if (*ax, *ay) != (x, y) {
                break;
            }
            out.add_atom(t.clone(), m.clone());
        }
        out
    }

    /// Kernel `s_{x,y}` with `p = s_{x,y} dξ(x) dυ(y)`.
    pub fn kernel(&self, x: usize, y: usize) -> RxMeasure {
        let norm = (self.src.weight(x) * self.dst.weight(y)).recip();
        self.cell(x, y).scale(&norm).expect("positive normaliser")
    }

    /// Distinct values of `t` over all atoms.
    pub fn distinct_t(&self) -> Vec<Q> {
        let mut ts: Vec<Q> = self.atoms.keys().map(|(_, _, t)| t.clone()).collect();
        ts.sort();
        ts.dedup();
        ts
    }

    /// Convex combination `Σ λᵢ pᵢ` of polymorphisms between the same spaces.
    pub fn mixture(parts: &[(Q, Polymorphism)]) -> Result<Polymorphism> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidPolymorphism("empty mixture".into()))?;
        let mut atoms: BTreeMap<AtomKey, Q> = BTreeMap::new();
        let mut total = Q::zero();
        for (lambda, p) in parts {
            if !p.src.same_order(&first.src) || !p.dst.same_order(&first.dst) {
                return Err(Error::SpaceMismatch("mixture of different spaces".into()));
            }
            total += lambda;
            for (k, m) in &p.atoms {
                *atoms.entry(k.clone()).or_insert_with(Q::zero) += lambda * m;
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidPolymorphism("mixture weights must sum to 1".into()));
        }
        Polymorphism::unchecked(first.src.clone(), first.dst.clone(), atoms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(s)?)
    }

    pub(crate) fn to_doc(&self) -> PolyJson {
        PolyJson {
            src: self.src.to_doc(),
            dst: self.dst.to_doc(),
            atoms: self
                .labeled_atoms()
                .into_iter()
                .map(|(x, y, t, m)| PolyAtomJson {
                    x,
                    y,
                    t: format_q(&t),
                    m: format_q(&m),
                })
                .collect(),
        }
    }

    pub(crate) fn from_doc(doc: &PolyJson) -> Result<Self> {
        let src = FinSpace::from_doc(&doc.src)?;
        let dst = FinSpace::from_doc(&doc.dst)?;
        let atoms = doc
            .atoms
            .iter()
            .map(|a| Ok((a.x.clone(), a.y.clone(), parse_q(&a.t)?, parse_q(&a.m)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_labeled(src, dst, atoms)
    }
}

/// Normal-form equality: same spaces and the same labeled atoms.
impl PartialEq for Polymorphism {
    fn eq(&self, other: &Self) -> bool {
        if self.src != other.src || self.dst != other.dst || self.len() != other.len() {
            return false;
        }
        if self.src.same_order(&other.src) && self.dst.same_order(&other.dst) {
            return self.atoms == other.atoms;
        }
        let mut a = self.labeled_atoms();
        let mut b = other.labeled_atoms();
        a.sort();
        b.sort();
        a == b
    }
}

impl Eq for Polymorphism {}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct PolyAtomJson {
    pub x: String,
    pub y: String,
    pub t: String,
    pub m: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct PolyJson {
    pub src: SpaceJson,
    pub dst: SpaceJson,
    pub atoms: Vec<PolyAtomJson>,
}

pub(crate) fn check_bijection(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::NotBijective(format!("{} images for {n} atoms", perm.len())));
    }
    let mut hit = vec![false; n];
    for &j in perm {
        if j >= n || std::mem::replace(&mut hit[j], true) {
            return Err(Error::NotBijective(format!("image {j} repeated or out of range")));
        }
    }
    Ok(())
}

/// The pair `(𝔩, 𝔪)` attached to a partition: the quotient map `Z↠Z_α` and
/// the conditional-expectation polymorphism obtained by applying `𝔩` and then
/// its star.
#[derive(Debug, Clone)]
pub struct CondExp {
    pub quotient_map: Polymorphism,
    pub projection: Polymorphism,
}

pub fn cond_exp_poly(space: &FinSpace, part: &Partition) -> Result<CondExp> {
    let quo = quotient(space, part)?;
    let quotient_map = Polymorphism::from_map(space, &quo.space, &quo.block_map)?;
    let projection = quotient_map.compose(&quotient_map.star())?;
    Ok(CondExp {
        quotient_map,
        projection,
    })
}

/// Bounded-Lipschitz distance in the `log t` coordinate. Masses are merged
/// exactly before leaving rational arithmetic.
pub fn rx_distance(a: &RxMeasure, b: &RxMeasure) -> f64 {
    let mut diff: BTreeMap<&Q, Q> = BTreeMap::new();
    for (t, w) in a.atoms() {
        *diff.entry(t).or_insert_with(Q::zero) += w;
    }
    for (t, w) in b.atoms() {
        *diff.entry(t).or_insert_with(Q::zero) -= w;
    }
    let signed: Vec<(f64, f64)> = diff
        .into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(t, w)| (ln_q(t), to_f64(&w)))
        .collect();
    bl_distance(&signed, &[])
}

/// `max_{x,y} dBL(ν^p_{xy}, ν^q_{xy}) + dBL(t·ν^p_{xy}, t·ν^q_{xy})`.
pub fn distance(p: &Polymorphism, q: &Polymorphism) -> Result<f64> {
    if p.src != q.src || p.dst != q.dst {
        return Err(Error::SpaceMismatch("distance between different hom-sets".into()));
    }
    let xmap = reindex(p.src(), q.src())?;
    let ymap = reindex(p.dst(), q.dst())?;
    let mut worst: f64 = 0.0;
    for x in 0..p.src.len() {
        for y in 0..p.dst.len() {
            let a = p.cell(x, y);
            let b = q.cell(xmap[x], ymap[y]);
            if a.is_empty() && b.is_empty() {
                continue;
            }
            let d = rx_distance(&a, &b) + rx_distance(&a.tmul(), &b.tmul());
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Position in `b` of every atom of `a`.
pub(crate) fn reindex(a: &FinSpace, b: &FinSpace) -> Result<Vec<usize>> {
    if a.same_order(b) {
        return Ok((0..a.len()).collect());
    }
    a.labels().map(|l| b.index_of(l)).collect()
}
