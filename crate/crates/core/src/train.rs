//! Finitely supported permutations of `ℕ = {1, 2, …}`, the pointwise
//! stabilizers `K_α` of `{1..α}`, and the double cosets `K_α\S_∞/K_β` with
//! their θ-stabilized product.
//!
//! Products are ordinary composition: `g.compose(&h)` is `g∘h`, applying `h`
//! first. A double coset `K_α·g·K_β` is canonicalized by the partial injection
//! `{(j, g(j)) : j ≤ β, g(j) ≤ α}` from `{1..β}` to `{1..α}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinPerm {
    /// Non-fixed points only.
    map: BTreeMap<u32, u32>,
}

impl FinPerm {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds from `(i, g(i))` pairs; fixed points may be included.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, j) in pairs {
            if i == 0 || j == 0 {
                return Err(Error::InvalidPermutation("points start at 1".into()));
            }
            if map.insert(i, j).is_some() {
                return Err(Error::InvalidPermutation(format!("{i} mapped twice")));
            }
        }
        let mut images: Vec<u32> = map.values().copied().collect();
        images.sort_unstable();
        images.dedup();
        if images.len() != map.len() || images.iter().any(|j| !map.contains_key(j)) {
            return Err(Error::InvalidPermutation("domain and image of the listed points differ".into()));
        }
        map.retain(|i, j| i != j);
        Ok(Self { map })
    }

    /// `images[k]` is the image of `k + 1`.
    pub fn from_images(images: &[u32]) -> Result<Self> {
        Self::from_pairs(images.iter().enumerate().map(|(k, &j)| (k as u32 + 1, j)))
    }

    pub fn transposition(a: u32, b: u32) -> Result<Self> {
        if a == b {
            return Self::from_pairs([(a, a)]);
        }
        Self::from_pairs([(a, b), (b, a)])
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.map.get(&i).copied().unwrap_or(i)
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &FinPerm) -> FinPerm {
        let mut pts: Vec<u32> = self.map.keys().chain(other.map.keys()).copied().collect();
        pts.sort_unstable();
        pts.dedup();
        let map = pts
            .into_iter()
            .map(|i| (i, self.apply(other.apply(i))))
            .filter(|(i, j)| i != j)
            .collect();
        FinPerm { map }
    }

    pub fn inverse(&self) -> FinPerm {
        FinPerm {
            map: self.map.iter().map(|(&i, &j)| (j, i)).collect(),
        }
    }

    /// Largest moved point, `0` for the identity.
    pub fn support_bound(&self) -> u32 {
        self.map.keys().next_back().copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.map.keys().copied()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Fixes `{1..alpha}` pointwise.
    pub fn in_stabilizer(&self, alpha: u32) -> bool {
        self.map.keys().all(|&i| i > alpha)
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.map.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut cycle = vec![start];
            let mut i = self.apply(start);
            while i != start {
                seen.insert(i);
                cycle.push(i);
                i = self.apply(i);
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for FinPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        for cycle in self.cycles() {
            let body: Vec<String> = cycle.iter().map(u32::to_string).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// Cycle notation, e.g. `(1 2)(3 5 4)`; `()` or the empty string is the identity.
impl FromStr for FinPerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPermutation(format!("cannot parse {s:?}"));
        let mut g = FinPerm::identity();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let end = body.find(')').ok_or_else(bad)?;
            let pts = body[..end]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            if !pts.is_empty() {
                let pairs = pts.iter().enumerate().map(|(k, &i)| (i, pts[(k + 1) % pts.len()]));
                let cycle = FinPerm::from_pairs(pairs)?;
                // disjoint cycles commute; reject overlapping ones
                if cycle.support().any(|i| g.map.contains_key(&i)) {
                    return Err(Error::InvalidPermutation(format!("overlapping cycles in {s:?}")));
                }
                g = g.compose(&cycle);
            }
            rest = body[end + 1..].trim_start();
        }
        Ok(g)
    }
}

/// The involution `α+i ↔ α+N+i` for `1 ≤ i ≤ N`; it lies in `K_α`.
pub fn theta(alpha: u32, n: u32) -> FinPerm {
    let map = (1..=n)
        .flat_map(|i| [(alpha + i, alpha + n + i), (alpha + n + i, alpha + i)])
        .collect();
    FinPerm { map }
}

/// Canonical form of `K_α·g·K_β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DCoset {
    pub alpha: u32,
    pub beta: u32,
    /// Sorted `(j, i)` pairs: `j ≤ β` is sent to `i ≤ α`.
    pub pinj: Vec<(u32, u32)>,
}

impl DCoset {
    pub fn new(alpha: u32, beta: u32, mut pinj: Vec<(u32, u32)>) -> Result<Self> {
        pinj.sort_unstable();
        let mut images: Vec<u32> = pinj.iter().map(|p| p.1).collect();
        images.sort_unstable();
        images.dedup();
        let domain_ok = pinj.windows(2).all(|w| w[0].0 != w[1].0);
        let ranges_ok = pinj.iter().all(|&(j, i)| (1..=beta).contains(&j) && (1..=alpha).contains(&i));
        if !domain_ok || images.len() != pinj.len() || !ranges_ok {
            return Err(Error::InvalidPermutation(format!("{pinj:?} is not a partial injection {beta}→{alpha}")));
        }
        Ok(Self { alpha, beta, pinj })
    }

    pub fn identity(alpha: u32) -> Self {
        Self {
            alpha,
            beta: alpha,
            pinj: (1..=alpha).map(|j| (j, j)).collect(),
        }
    }

    fn lookup(&self, j: u32) -> Option<u32> {
        self.pinj.iter().find(|p| p.0 == j).map(|p| p.1)
    }

    /// `self ∘ other` as partial injections: `other` first.
    pub fn compose_pinj(&self, other: &DCoset) -> Result<DCoset> {
        if self.beta != other.alpha {
            return Err(Error::IndexMismatch {
                left: self.beta as usize,
                right: other.alpha as usize,
            });
        }
        let pinj = other
            .pinj
            .iter()
            .filter_map(|&(k, j)| self.lookup(j).map(|i| (k, i)))
            .collect();
        DCoset::new(self.alpha, other.beta, pinj)
    }

    /// A permutation in this double coset.
    pub fn representative(&self) -> FinPerm {
        let fresh = self.alpha + self.beta;
        let mut map: BTreeMap<u32, u32> = self.pinj.iter().copied().collect();
        let mut next = fresh;
        // unmatched sources leave {1..α}
        for j in 1..=self.beta {
            if !map.contains_key(&j) {
                next += 1;
                map.insert(j, next);
            }
        }
        // unmatched targets arrive from outside {1..β}
        let used: std::collections::BTreeSet<u32> = map.values().copied().collect();
        for i in 1..=self.alpha {
            if !used.contains(&i) {
                next += 1;
                map.insert(next, i);
            }
        }
        // close up: match leftover domain points to leftover image points in order
        let images: std::collections::BTreeSet<u32> = map.values().copied().collect();
        let free_dom: Vec<u32> = (1..=next).filter(|i| !map.contains_key(i)).collect();
        let free_img: Vec<u32> = (1..=next).filter(|i| !images.contains(i)).collect();
        debug_assert_eq!(free_dom.len(), free_img.len());
        map.extend(free_dom.into_iter().zip(free_img));
        FinPerm::from_pairs(map).expect("completion is a permutation")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DCoset = serde_json::from_str(s)?;
        DCoset::new(raw.alpha, raw.beta, raw.pinj)
    }
}

impl fmt::Display for DCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.pinj.iter().map(|(j, i)| format!("{j}→{i}")).collect();
        write!(f, "[{}|{}|{}]", self.alpha, self.beta, body.join(","))
    }
}

pub fn dcoset_of(g: &FinPerm, alpha: u32, beta: u32) -> DCoset {
    let pinj = (1..=beta)
        .map(|j| (j, g.apply(j)))
        .filter(|&(_, i)| i <= alpha)
        .collect();
    DCoset { alpha, beta, pinj }
}

/// The sandwich `g ∘ θ(β, N) ∘ h`.
pub fn sandwich(g: &FinPerm, beta: u32, n: u32, h: &FinPerm) -> FinPerm {
    g.compose(&theta(beta, n)).compose(h)
}

/// An `N` from which the sandwich is guaranteed to have stabilized: every
/// point `h` sends above `β` must be pushed past the support of `g` and past
/// `α`, and every `k ≤ γ` above `β` must be moved at all.
pub fn stabilization_n(g: &FinPerm, h: &FinPerm, alpha: u32, gamma: u32) -> u32 {
    g.support_bound().max(h.support_bound()).max(alpha).max(gamma).max(1)
}

/// Result of a θ-stabilized product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub coset: DCoset,
    pub n: u32,
    pub representative: FinPerm,
}

/// `g ⊚ h` computed from explicit representatives. `g` represents a coset in
/// `K_α\G/K_β`, `h` one in `K_β\G/K_γ`.
pub fn mult_reps(g: &FinPerm, h: &FinPerm, alpha: u32, beta: u32, gamma: u32) -> Result<Product> {
    let n = stabilization_n(g, h, alpha, gamma);
    let rep = sandwich(g, beta, n, h);
    let first = dcoset_of(&rep, alpha, gamma);
    let second = dcoset_of(&sandwich(g, beta, n + 1, h), alpha, gamma);
    if first != second {
        return Err(Error::StabilizationFailure {
            n: n as usize,
            next: n as usize + 1,
            first: first.to_string(),
            second: second.to_string(),
        });
    }
    Ok(Product {
        coset: first,
        n,
        representative: rep,
    })
}

/// `d1 ⊚ d2` for `d1 ∈ K_α\G/K_β`, `d2 ∈ K_β\G/K_γ`.
pub fn mult(d1: &DCoset, d2: &DCoset) -> Result<DCoset> {
    if d1.beta != d2.alpha {
        return Err(Error::IndexMismatch {
            left: d1.beta as usize,
            right: d2.alpha as usize,
        });
    }
    let (g, h) = (d1.representative(), d2.representative());
    Ok(mult_reps(&g, &h, d1.alpha, d1.beta, d2.beta)?.coset)
}
