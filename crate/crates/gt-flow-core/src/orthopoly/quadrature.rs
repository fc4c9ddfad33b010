//! Gauss-Jacobi quadrature on (0,1) for weights x^β (1−x)^α, built from
//! the monic Jacobi three-term recurrence by symmetric tridiagonal
//! eigen-decomposition.

use crate::orthopoly::OrthoError;
use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

/// Nodes and positive weights integrating x^β (1−x)^α · q(x) over (0,1)
/// exactly for polynomials q up to degree 2n−1.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
    beta: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ_i w_i f(x_i), approximating ∫₀¹ x^β (1−x)^α f(x) dx.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Node count used for integrands that are the weight times a polynomial
/// of degree at most `max_degree`, with a safety margin.
pub fn default_order(max_degree: usize) -> usize {
    4 * max_degree + 16
}

/// n-point Gauss rule for ∫₀¹ x^β (1−x)^α f(x) dx via Golub-Welsch:
/// eigenvalues of the tridiagonal Jacobi matrix are the nodes, squared
/// first eigenvector components scaled by the total mass B(β+1, α+1) are
/// the weights.
pub fn gauss_jacobi_rule(alpha: f64, beta: f64, n: usize) -> Result<QuadratureRule, OrthoError> {
    if !(alpha > -1.0 && beta > -1.0) || n == 0 {
        return Err(OrthoError::InvalidParameter(format!(
            "Gauss-Jacobi rule needs α, β > −1 and n ≥ 1, got ({alpha}, {beta}, {n})"
        )));
    }
    let (a, b) = (alpha, beta);
    // monic recurrence coefficients on (−1,1) for (1−t)^α (1+t)^β
    let diag = |k: usize| -> f64 {
        if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            let s = 2.0 * k as f64 + a + b;
            (b * b - a * a) / (s * (s + 2.0))
        }
    };
    let offdiag_sq = |k: usize| -> f64 {
        if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            let kf = k as f64;
            let s = 2.0 * kf + a + b;
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        }
    };
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        // map t ∈ (−1,1) to x = (t+1)/2
        m[(k, k)] = (diag(k) + 1.0) / 2.0;
        if k + 1 < n {
            let e = offdiag_sq(k + 1).sqrt() / 2.0;
            m[(k, k + 1)] = e;
            m[(k + 1, k)] = e;
        }
    }
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 50_000).ok_or(OrthoError::EigenFailed)?;
    let mass = (ln_gamma(b + 1.0) + ln_gamma(a + 1.0) - ln_gamma(a + b + 2.0)).exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (node, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Ok(QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        alpha,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_mass() {
        // ∫₀¹ x²(1−x) dx = B(3,2) = 1/12
        let rule = gauss_jacobi_rule(1.0, 2.0, 6).unwrap();
        assert!((rule.integrate(|_| 1.0) - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn monomial_exactness() {
        let n = 8;
        let rule = gauss_jacobi_rule(0.0, 0.0, n).unwrap();
        for k in 0..2 * n {
            let exact = 1.0 / (k as f64 + 1.0);
            let got = rule.integrate(|x| x.powi(k as i32));
            assert!((got - exact).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn nodes_interior_weights_positive() {
        let rule = gauss_jacobi_rule(2.5, -0.5, 24).unwrap();
        assert!(rule.nodes().iter().all(|&x| 0.0 < x && x < 1.0));
        assert!(rule.weights().iter().all(|&w| w > 0.0));
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi_rule(-1.0, 0.0, 4).is_err());
        assert!(gauss_jacobi_rule(0.0, 0.0, 0).is_err());
    }

    #[test]
    fn default_order_margin() {
        assert_eq!(default_order(0), 16);
        assert_eq!(default_order(10), 56);
    }
}
