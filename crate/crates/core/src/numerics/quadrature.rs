//! Gauss-Legendre rules on `[-1, 1]`.

use super::NumericsError;

/// Largest supported rule size.
pub const MAX_GAUSS_POINTS: usize = 64;

/// Nodes and weights of an `m`-point Gauss-Legendre rule, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[lo, hi]` with the affinely mapped rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule: `panels` equal sub-intervals of `[lo, hi]`.
    pub fn integrate_composite<F: Fn(f64) -> f64>(
        &self,
        lo: f64,
        hi: f64,
        panels: usize,
        f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (hi - lo) / panels as f64;
        (0..panels)
            .map(|p| {
                let a = lo + h * p as f64;
                self.integrate(a, a + h, &f)
            })
            .sum()
    }
}

/// Legendre polynomial P_m(x) and its derivative, by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=m {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    let dp = m as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// `m`-point Gauss-Legendre rule, `1 <= m <= 64`.
///
/// Roots are found by Newton iteration from the Chebyshev-like initial guess
/// `cos(pi (i - 1/4) / (m + 1/2))`; symmetry fixes the odd middle node at 0.
pub fn gauss_legendre(m: usize) -> Result<GaussRule, NumericsError> {
    if !(1..=MAX_GAUSS_POINTS).contains(&m) {
        return Err(NumericsError::RuleSize {
            requested: m,
            max: MAX_GAUSS_POINTS,
        });
    }
    if m == 1 {
        return Ok(GaussRule {
            nodes: vec![0.0],
            weights: vec![2.0],
        });
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // descending x from the guess; store mirrored
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Ok(GaussRule { nodes, weights })
}
