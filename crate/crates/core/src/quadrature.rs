//! Gauss–Legendre rules and composite integration on split intervals.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Builds the rule by Newton iteration on the Legendre polynomial roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a Gauss rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Maps the rule onto [a, b], yielding (point, weight) pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panel edges covering `[lo, hi]`, split at every interior break point and
/// each piece divided into `per_piece` equal panels.
pub fn panel_edges(lo: f64, hi: f64, breaks: &[f64], per_piece: usize) -> Vec<f64> {
    let mut pieces = vec![lo];
    for &b in breaks {
        if b > lo && b < hi {
            pieces.push(b);
        }
    }
    pieces.push(hi);
    let mut edges = Vec::with_capacity((pieces.len() - 1) * per_piece + 1);
    edges.push(lo);
    for w in pieces.windows(2) {
        let (a, b) = (w[0], w[1]);
        for k in 1..=per_piece {
            let t = k as f64 / per_piece as f64;
            edges.push(if k == per_piece { b } else { a + (b - a) * t });
        }
    }
    edges
}
