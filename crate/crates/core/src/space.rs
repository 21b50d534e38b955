//! Finite atomic measure spaces, finite partitions and their quotients.

use std::collections::{BTreeSet, HashMap};

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, require_positive, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Probability,
    SigmaFinite,
}

/// A finite set of labeled atoms with positive rational weights.
///
/// Atom order is kept for stable matrix indexing; equality ignores it.
#[derive(Debug, Clone)]
pub struct FinSpace {
    atoms: Vec<(String, Q)>,
    flavor: Flavor,
    index: HashMap<String, usize>,
}

impl FinSpace {
    pub fn new<S: Into<String>>(atoms: Vec<(S, Q)>, flavor: Flavor) -> Result<Self> {
        let atoms: Vec<(String, Q)> = atoms.into_iter().map(|(l, w)| (l.into(), w)).collect();
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, (label, w)) in atoms.iter().enumerate() {
            require_positive(w)?;
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::InvalidSpace(format!("duplicate label {label:?}")));
            }
        }
        if flavor == Flavor::Probability {
            let total: Q = atoms.iter().map(|(_, w)| w).sum();
            if !total.is_one() {
                return Err(Error::InvalidSpace(format!(
                    "probability weights sum to {}",
                    format_q(&total)
                )));
            }
        }
        Ok(Self { atoms, flavor, index })
    }

    pub fn probability<S: Into<String>>(atoms: Vec<(S, Q)>) -> Result<Self> {
        Self::new(atoms, Flavor::Probability)
    }

    pub fn sigma_finite<S: Into<String>>(atoms: Vec<(S, Q)>) -> Result<Self> {
        Self::new(atoms, Flavor::SigmaFinite)
    }

    /// `n` equal atoms labeled `0..n`.
    pub fn uniform(n: usize) -> Self {
        let w = Q::new(1.into(), (n as i64).into());
        Self::probability((0..n).map(|i| (i.to_string(), w.clone())).collect()).expect("uniform")
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn label(&self, i: usize) -> &str {
        &self.atoms[i].0
    }

    pub fn weight(&self, i: usize) -> &Q {
        &self.atoms[i].1
    }

    pub fn weights(&self) -> impl Iterator<Item = &Q> {
        self.atoms.iter().map(|(_, w)| w)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(|(l, _)| l.as_str())
    }

    pub fn atoms(&self) -> &[(String, Q)] {
        &self.atoms
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn total_mass(&self) -> Q {
        self.weights().sum()
    }

    /// True when both spaces list the atoms in the same order.
    pub fn same_order(&self, other: &Self) -> bool {
        self.flavor == other.flavor && self.atoms == other.atoms
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(s)?)
    }

    pub(crate) fn to_doc(&self) -> SpaceJson {
        SpaceJson {
            flavor: self.flavor,
            atoms: self
                .atoms
                .iter()
                .map(|(label, w)| SpaceAtomJson {
                    label: label.clone(),
                    weight: format_q(w),
                })
                .collect(),
        }
    }

    pub(crate) fn from_doc(doc: &SpaceJson) -> Result<Self> {
        let atoms = doc
            .atoms
            .iter()
            .map(|a| Ok((a.label.clone(), parse_q(&a.weight)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, doc.flavor)
    }
}

impl PartialEq for FinSpace {
    fn eq(&self, other: &Self) -> bool {
        if self.flavor != other.flavor || self.len() != other.len() {
            return false;
        }
        self.atoms
            .iter()
            .all(|(l, w)| other.index.get(l).is_some_and(|&j| &other.atoms[j].1 == w))
    }
}

impl Eq for FinSpace {}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct SpaceAtomJson {
    pub label: String,
    pub weight: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct SpaceJson {
    pub flavor: Flavor,
    pub atoms: Vec<SpaceAtomJson>,
}

/// Disjoint nonempty label blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<String>>,
}

impl Partition {
    pub fn new<S: Into<String>>(blocks: Vec<Vec<S>>) -> Result<Self> {
        let blocks: Vec<Vec<String>> = blocks
            .into_iter()
            .map(|b| b.into_iter().map(Into::into).collect())
            .collect();
        let mut seen = BTreeSet::new();
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for label in block {
                if !seen.insert(label.clone()) {
                    return Err(Error::InvalidPartition(format!("label {label:?} in two blocks")));
                }
            }
        }
        Ok(Self { blocks })
    }

    pub fn singletons(space: &FinSpace) -> Self {
        Self {
            blocks: space.labels().map(|l| vec![l.to_string()]).collect(),
        }
    }

    pub fn one_block(space: &FinSpace) -> Self {
        Self {
            blocks: vec![space.labels().map(str::to_string).collect()],
        }
    }

    /// Groups consecutive atoms of `space` into blocks of the given sizes.
    pub fn consecutive(space: &FinSpace, sizes: &[usize]) -> Result<Self> {
        let mut labels = space.labels();
        let blocks = sizes
            .iter()
            .map(|&k| labels.by_ref().take(k).map(str::to_string).collect::<Vec<_>>())
            .collect();
        let p = Self::new(blocks)?;
        p.block_map(space)?;
        Ok(p)
    }

    pub fn blocks(&self) -> &[Vec<String>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn label_set(&self) -> BTreeSet<&str> {
        self.blocks.iter().flatten().map(String::as_str).collect()
    }

    /// Label of a block's quotient atom, e.g. `{a,b}`.
    pub fn block_label(&self, b: usize) -> String {
        format!("{{{}}}", self.blocks[b].join(","))
    }

    /// Block index of every atom of `space`, in atom order.
    pub fn block_map(&self, space: &FinSpace) -> Result<Vec<usize>> {
        let mut map = vec![usize::MAX; space.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            for label in block {
                let i = space
                    .index_of(label)
                    .map_err(|_| Error::InvalidPartition(format!("label {label:?} not in space")))?;
                map[i] = b;
            }
        }
        if let Some(i) = map.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "atom {:?} not covered",
                space.label(i)
            )));
        }
        Ok(map)
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> Result<bool> {
        if self.label_set() != coarser.label_set() {
            return Err(Error::InvalidPartition("partitions cover different label sets".into()));
        }
        let owner: HashMap<&str, usize> = coarser
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, block)| block.iter().map(move |l| (l.as_str(), b)))
            .collect();
        Ok(self.blocks.iter().all(|block| {
            let b = owner[block[0].as_str()];
            block.iter().all(|l| owner[l.as_str()] == b)
        }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.blocks).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let blocks: Vec<Vec<String>> = serde_json::from_str(s)?;
        Self::new(blocks)
    }
}

/// The quotient space together with the block index of every original atom.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub space: FinSpace,
    pub block_map: Vec<usize>,
}

/// One atom per block carrying the block's total weight.
pub fn quotient(space: &FinSpace, part: &Partition) -> Result<Quotient> {
    let block_map = part.block_map(space)?;
    let mut weights = vec![Q::zero(); part.len()];
    for (i, &b) in block_map.iter().enumerate() {
        weights[b] += space.weight(i);
    }
    let atoms = weights
        .into_iter()
        .enumerate()
        .map(|(b, w)| (part.block_label(b), w))
        .collect();
    Ok(Quotient {
        space: FinSpace::new(atoms, space.flavor())?,
        block_map,
    })
}

/// Label of the cube point `index` in `{0,1}^n`: the first character is `x₁`.
pub fn cube_label(n: usize, index: usize) -> String {
    (0..n)
        .map(|k| if (index >> (n - 1 - k)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// The product Bernoulli(`p`) measure on `{0,1}^n`, atoms in lexicographic order.
///
/// `n = 0` yields the one-point space.
pub fn bernoulli_cube(n: usize, p: &Q) -> Result<FinSpace> {
    if *p <= Q::zero() || *p >= Q::one() {
        return Err(Error::BadBernoulli(format_q(p)));
    }
    let one_minus = Q::one() - p;
    let atoms = (0..1usize << n)
        .map(|i| {
            let ones = i.count_ones() as i32;
            let w = num::pow::pow(p.clone(), ones as usize)
                * num::pow::pow(one_minus.clone(), (n as i32 - ones) as usize);
            (cube_label(n, i), w)
        })
        .collect();
    FinSpace::probability(atoms)
}
