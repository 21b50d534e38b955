//! Bounded-Lipschitz (Dudley) distance between finite atomic measures on the
//! real line.
//!
//! `d(μ, ν) = sup { ∫ f d(μ - ν) : |f| ≤ 1, Lip(f) ≤ 1 }`.
//!
//! For atomic measures the supremum is a linear program over the values of
//! `f` at the merged support. On the line only adjacent Lipschitz constraints
//! matter, so the program is solved exactly by dynamic programming over
//! concave piecewise-linear value functions.

/// Concave piecewise-linear function on `[-1, 1]`, given by breakpoints
/// sorted by abscissa.
#[derive(Debug, Clone)]
struct Concave {
    pts: Vec<(f64, f64)>,
}

impl Concave {
    fn linear(c: f64) -> Self {
        Self {
            pts: vec![(-1.0, -c), (1.0, c)],
        }
    }

    fn argmax_span(&self) -> (usize, usize) {
        let best = self.pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-15 * best.abs().max(1.0);
        let lo = self.pts.iter().position(|p| p.1 >= best - tol).unwrap();
        let hi = self.pts.iter().rposition(|p| p.1 >= best - tol).unwrap();
        (lo, hi)
    }

    fn max(&self) -> f64 {
        self.pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `v ↦ max_{|u - v| ≤ d} self(u)`, restricted back to `[-1, 1]`.
    fn window_max(&self, d: f64) -> Self {
        let (lo, hi) = self.argmax_span();
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(self.pts.len() + 2);
        pts.extend(self.pts[..=lo].iter().map(|&(x, y)| (x - d, y)));
        pts.extend(self.pts[hi..].iter().map(|&(x, y)| (x + d, y)));
        Self { pts }.clip()
    }

    fn eval(pts: &[(f64, f64)], x: f64) -> f64 {
        let i = pts.partition_point(|p| p.0 < x);
        if i == 0 {
            return pts[0].1;
        }
        if i == pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (x0, y0) = pts[i - 1];
        let (x1, y1) = pts[i];
        if x1 - x0 <= 0.0 {
            return y1.max(y0);
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn clip(self) -> Self {
        let left = Self::eval(&self.pts, -1.0);
        let right = Self::eval(&self.pts, 1.0);
        let mut pts = Vec::with_capacity(self.pts.len() + 2);
        pts.push((-1.0, left));
        pts.extend(self.pts.iter().copied().filter(|p| p.0 > -1.0 && p.0 < 1.0));
        pts.push((1.0, right));
        Self { pts }
    }

    fn add_linear(&mut self, c: f64) {
        for p in &mut self.pts {
            p.1 += c * p.0;
        }
    }
}

/// Exact supremum of `Σ cᵢ f(xᵢ)` over `|f| ≤ 1`, `Lip(f) ≤ 1`.
///
/// `points` are `(location, signed coefficient)` pairs in any order.
pub fn bl_sup(points: &[(f64, f64)]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1 != 0.0).collect();
    if pts.is_empty() {
        return 0.0;
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut value = Concave::linear(pts[0].1);
    for w in pts.windows(2) {
        let gap = w[1].0 - w[0].0;
        value = value.window_max(gap);
        value.add_linear(w[1].1);
    }
    value.max().max(0.0)
}

/// Distance between two measures given as `(location, mass)` lists.
pub fn bl_distance(mu: &[(f64, f64)], nu: &[(f64, f64)]) -> f64 {
    let mut signed: Vec<(f64, f64)> = mu.to_vec();
    signed.extend(nu.iter().map(|&(x, m)| (x, -m)));
    bl_sup(&signed)
}
