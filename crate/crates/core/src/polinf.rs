//! Triples `(𝔯, 𝔯⁻, 𝔯⁺)` on σ-finite atomic spaces: a measure on `X×Y×ℝ×`
//! together with the mass escaping from each `x` and arriving at each `y`.
//!
//! Only the data model, the balance conditions and the convergence distance
//! live here; there is no product.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{reindex, rx_distance, AtomKey, Polymorphism, Violation};
use crate::rational::{format_q, parse_q, require_positive, Q};
use crate::rx::RxMeasure;
use crate::space::{FinSpace, SpaceJson};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyInfTriple {
    src: FinSpace,
    dst: FinSpace,
    r: BTreeMap<AtomKey, Q>,
    r_minus: BTreeMap<(usize, Q), Q>,
    r_plus: BTreeMap<(usize, Q), Q>,
}

fn insert_mass<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, m: Q) -> Result<()> {
    if m < Q::zero() {
        return Err(Error::Negative(format_q(&m)));
    }
    if !m.is_zero() {
        *map.entry(key).or_insert_with(Q::zero) += m;
    }
    Ok(())
}

impl PolyInfTriple {
    /// Builds a triple from labeled atoms without checking the balances.
    pub fn from_labeled<S: AsRef<str>>(
        src: FinSpace,
        dst: FinSpace,
        r: Vec<(S, S, Q, Q)>,
        r_minus: Vec<(S, Q, Q)>,
        r_plus: Vec<(S, Q, Q)>,
    ) -> Result<Self> {
        let mut out = Self {
            r: BTreeMap::new(),
            r_minus: BTreeMap::new(),
            r_plus: BTreeMap::new(),
            src,
            dst,
        };
        for (x, y, t, m) in r {
            require_positive(&t)?;
            let key = (out.src.index_of(x.as_ref())?, out.dst.index_of(y.as_ref())?, t);
            insert_mass(&mut out.r, key, m)?;
        }
        for (x, t, m) in r_minus {
            require_positive(&t)?;
            let key = (out.src.index_of(x.as_ref())?, t);
            insert_mass(&mut out.r_minus, key, m)?;
        }
        for (y, t, m) in r_plus {
            require_positive(&t)?;
            let key = (out.dst.index_of(y.as_ref())?, t);
            insert_mass(&mut out.r_plus, key, m)?;
        }
        Ok(out)
    }

    /// A finite polymorphism with nothing escaping or arriving.
    pub fn from_poly(p: &Polymorphism) -> Self {
        Self {
            src: p.src().clone(),
            dst: p.dst().clone(),
            r: p.atoms().clone(),
            r_minus: BTreeMap::new(),
            r_plus: BTreeMap::new(),
        }
    }

    pub fn src(&self) -> &FinSpace {
        &self.src
    }

    pub fn dst(&self) -> &FinSpace {
        &self.dst
    }

    pub fn r(&self) -> &BTreeMap<AtomKey, Q> {
        &self.r
    }

    pub fn r_minus(&self) -> &BTreeMap<(usize, Q), Q> {
        &self.r_minus
    }

    pub fn r_plus(&self) -> &BTreeMap<(usize, Q), Q> {
        &self.r_plus
    }

    /// Mutable access to one mass, for building perturbations.
    pub fn mass_mut(&mut self, part: Part, index: usize) -> Option<&mut Q> {
        match part {
            Part::R => self.r.values_mut().nth(index),
            Part::Minus => self.r_minus.values_mut().nth(index),
            Part::Plus => self.r_plus.values_mut().nth(index),
        }
    }

    /// Both balance conditions, reported per violating atom.
    pub fn validate(&self) -> Vec<Violation> {
        let mut rows = vec![Q::zero(); self.src.len()];
        let mut cols = vec![Q::zero(); self.dst.len()];
        for ((x, y, t), m) in &self.r {
            rows[*x] += m;
            cols[*y] += m * t;
        }
        for ((x, _), m) in &self.r_minus {
            rows[*x] += m;
        }
        for ((y, t), m) in &self.r_plus {
            cols[*y] += m * t;
        }
        let mut out = Vec::new();
        for (x, s) in rows.iter().enumerate() {
            if s != self.src.weight(x) {
                out.push(Violation::Row {
                    label: self.src.label(x).to_string(),
                    defect: s - self.src.weight(x),
                });
            }
        }
        for (y, s) in cols.iter().enumerate() {
            if s != self.dst.weight(y) {
                out.push(Violation::Column {
                    label: self.dst.label(y).to_string(),
                    defect: s - self.dst.weight(y),
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Cuts the triple to sub-windows of both spaces. Mass leaving the source
    /// window's rows for outside columns joins `𝔯⁻`; mass entering the
    /// destination window from outside rows joins `𝔯⁺`.
    pub fn restrict(&self, src_window: &[&str], dst_window: &[&str]) -> Result<Self> {
        let src = sub_space(&self.src, src_window)?;
        let dst = sub_space(&self.dst, dst_window)?;
        let xs: BTreeMap<usize, usize> = index_map(&self.src, &src)?;
        let ys: BTreeMap<usize, usize> = index_map(&self.dst, &dst)?;
        let mut out = Self {
            src,
            dst,
            r: BTreeMap::new(),
            r_minus: BTreeMap::new(),
            r_plus: BTreeMap::new(),
        };
        for ((x, y, t), m) in &self.r {
            match (xs.get(x), ys.get(y)) {
                (Some(&i), Some(&j)) => insert_mass(&mut out.r, (i, j, t.clone()), m.clone())?,
                (Some(&i), None) => insert_mass(&mut out.r_minus, (i, t.clone()), m.clone())?,
                (None, Some(&j)) => insert_mass(&mut out.r_plus, (j, t.clone()), m.clone())?,
                (None, None) => {}
            }
        }
        for ((x, t), m) in &self.r_minus {
            if let Some(&i) = xs.get(x) {
                insert_mass(&mut out.r_minus, (i, t.clone()), m.clone())?;
            }
        }
        for ((y, t), m) in &self.r_plus {
            if let Some(&j) = ys.get(y) {
                insert_mass(&mut out.r_plus, (j, t.clone()), m.clone())?;
            }
        }
        Ok(out)
    }

    fn cell(&self, x: usize, y: usize) -> RxMeasure {
        let mut out = RxMeasure::zero();
        for ((_, _, t), m) in self.r.range((x, y, Q::zero())..).take_while(|((a, b, _), _)| (*a, *b) == (x, y)) {
            out.add_atom(t.clone(), m.clone());
        }
        out
    }

    /// `𝔯↓ + 𝔯⁻↓` at the source atom `x`.
    fn row_functional(&self, x: usize) -> RxMeasure {
        let mut out = RxMeasure::zero();
        for ((a, _, t), m) in &self.r {
            if *a == x {
                out.add_atom(t.clone(), m.clone());
            }
        }
        for ((a, t), m) in &self.r_minus {
            if *a == x {
                out.add_atom(t.clone(), m.clone());
            }
        }
        out
    }

    /// `t𝔯↓ + t𝔯⁺↓` at the destination atom `y`.
    fn column_functional(&self, y: usize) -> RxMeasure {
        let mut out = RxMeasure::zero();
        for ((_, b, t), m) in &self.r {
            if *b == y {
                out.add_atom(t.clone(), m * t);
            }
        }
        for ((b, t), m) in &self.r_plus {
            if *b == y {
                out.add_atom(t.clone(), m * t);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = InfJson {
            src: self.src.to_doc(),
            dst: self.dst.to_doc(),
            atoms: self
                .r
                .iter()
                .map(|((x, y, t), m)| InfAtomJson {
                    x: self.src.label(*x).to_string(),
                    y: self.dst.label(*y).to_string(),
                    t: format_q(t),
                    m: format_q(m),
                })
                .collect(),
            r_minus: side_doc(&self.r_minus, &self.src),
            r_plus: side_doc(&self.r_plus, &self.dst),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: InfJson = serde_json::from_str(s)?;
        let parse_side = |side: &[SideAtomJson]| {
            side.iter()
                .map(|a| Ok((a.at.clone(), parse_q(&a.t)?, parse_q(&a.m)?)))
                .collect::<Result<Vec<_>>>()
        };
        let r = doc
            .atoms
            .iter()
            .map(|a| Ok((a.x.clone(), a.y.clone(), parse_q(&a.t)?, parse_q(&a.m)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_labeled(
            FinSpace::from_doc(&doc.src)?,
            FinSpace::from_doc(&doc.dst)?,
            r,
            parse_side(&doc.r_minus)?,
            parse_side(&doc.r_plus)?,
        )
    }
}

/// Which of the three components a mass belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    R,
    Minus,
    Plus,
}

fn sub_space(space: &FinSpace, window: &[&str]) -> Result<FinSpace> {
    let atoms = window
        .iter()
        .map(|l| Ok((l.to_string(), space.weight(space.index_of(l)?).clone())))
        .collect::<Result<Vec<_>>>()?;
    FinSpace::new(atoms, space.flavor())
}

fn index_map(full: &FinSpace, sub: &FinSpace) -> Result<BTreeMap<usize, usize>> {
    sub.labels()
        .enumerate()
        .map(|(j, l)| Ok((full.index_of(l)?, j)))
        .collect()
}

/// The embedding `q ↦ (𝔯_q, 0, 0)` of a bijection of a σ-finite atomic space.
pub fn embed_bijection_inf(space: &FinSpace, perm: &[usize]) -> Result<PolyInfTriple> {
    Ok(PolyInfTriple::from_poly(&Polymorphism::from_bijection(space, perm)?))
}

/// Max over cells of the two cell functionals, and over rows and columns of
/// the combined escaping and arriving functionals.
pub fn distance_inf(p: &PolyInfTriple, q: &PolyInfTriple) -> Result<f64> {
    if p.src != q.src || p.dst != q.dst {
        return Err(Error::SpaceMismatch("distance between triples on different spaces".into()));
    }
    let xmap = reindex(&p.src, &q.src)?;
    let ymap = reindex(&p.dst, &q.dst)?;
    let mut worst: f64 = 0.0;
    for x in 0..p.src.len() {
        for y in 0..p.dst.len() {
            let a = p.cell(x, y);
            let b = q.cell(xmap[x], ymap[y]);
            if a.is_empty() && b.is_empty() {
                continue;
            }
            worst = worst.max(rx_distance(&a, &b) + rx_distance(&a.tmul(), &b.tmul()));
        }
        worst = worst.max(rx_distance(&p.row_functional(x), &q.row_functional(xmap[x])));
    }
    for y in 0..p.dst.len() {
        worst = worst.max(rx_distance(&p.column_functional(y), &q.column_functional(ymap[y])));
    }
    Ok(worst)
}

/// The σ-finite ladder `a1..an` with weights `w_k`.
pub fn ladder(weights: &[Q]) -> Result<FinSpace> {
    FinSpace::sigma_finite(
        weights
            .iter()
            .enumerate()
            .map(|(k, w)| (format!("a{}", k + 1), w.clone()))
            .collect(),
    )
}

/// Ladder with weights `2^(k-1)`.
pub fn geometric_ladder(n: usize) -> Result<FinSpace> {
    ladder(&(0..n).map(|k| Q::from_integer(num::BigInt::from(2u8).pow(k as u32))).collect::<Vec<_>>())
}

/// The averaging polymorphism of a ladder: every pair of rungs exchanges
/// `w_i w_j / W` at `t = 1`, so almost all mass leaves any fixed window.
pub fn spreading_poly(space: &FinSpace) -> Result<Polymorphism> {
    let total = space.total_mass();
    let mut atoms = BTreeMap::new();
    for i in 0..space.len() {
        for j in 0..space.len() {
            atoms.insert((i, j, Q::one()), space.weight(i) * space.weight(j) / &total);
        }
    }
    Polymorphism::new(space.clone(), space.clone(), atoms)
}

/// The limit of windowed spreading: everything in the window escapes at
/// `t = 1` and the same amount arrives.
pub fn pure_escape(window: &FinSpace) -> PolyInfTriple {
    let side: BTreeMap<(usize, Q), Q> = (0..window.len())
        .map(|i| ((i, Q::one()), window.weight(i).clone()))
        .collect();
    PolyInfTriple {
        src: window.clone(),
        dst: window.clone(),
        r: BTreeMap::new(),
        r_minus: side.clone(),
        r_plus: side,
    }
}

/// `distance_inf` between the spreading polymorphism of the `n`-rung
/// geometric ladder cut to its first `window` rungs and the pure escape.
pub fn escape_distance(n: usize, window: usize) -> Result<f64> {
    let space = geometric_ladder(n)?;
    let labels: Vec<String> = space.labels().take(window).map(str::to_string).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let cut = PolyInfTriple::from_poly(&spreading_poly(&space)?).restrict(&refs, &refs)?;
    distance_inf(&cut, &pure_escape(cut.src()))
}

#[derive(Debug, Serialize, Deserialize)]
struct InfAtomJson {
    x: String,
    y: String,
    t: String,
    m: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SideAtomJson {
    at: String,
    t: String,
    m: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct InfJson {
    src: SpaceJson,
    dst: SpaceJson,
    atoms: Vec<InfAtomJson>,
    r_minus: Vec<SideAtomJson>,
    r_plus: Vec<SideAtomJson>,
}

fn side_doc(side: &BTreeMap<(usize, Q), Q>, space: &FinSpace) -> Vec<SideAtomJson> {
    side.iter()
        .map(|((i, t), m)| SideAtomJson {
            at: space.label(*i).to_string(),
            t: format_q(t),
            m: format_q(m),
        })
        .collect()
}
