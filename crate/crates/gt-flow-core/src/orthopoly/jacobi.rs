//! Jacobi polynomials on the shifted domain (0,1): Jac^n_{α,β}(x) =
//! P_n^{(α,β)}(2x−1), orthogonal against x^β (1−x)^α, together with the
//! orthonormal system j^k and multi-dimensional Jacobi polynomials.

use crate::orthopoly::OrthoError;
use crate::params::ModelParams;
use crate::scalar::{det_small, pochhammer, rat, Rat, Scalar};
use num_traits::Zero;
use statrs::function::gamma::ln_gamma;

/// Terminating series
/// Jac^n(x) = ((α+1)_n/n!) ₂F₁(−n, n+α+β+1; α+1; 1−x),
/// generic over the scalar type.
pub fn jacobi_series<T: Scalar>(alpha: T, beta: T, n: usize, x: T) -> T {
    let mut sum = T::one();
    let mut term = T::one();
    let y = T::one() - x;
    for j in 0..n as i64 {
        let num = T::from_int(j - n as i64)
            * (alpha.clone() + beta.clone() + T::from_int(n as i64 + j + 1));
        if num.is_zero() {
            break;
        }
        let den = (alpha.clone() + T::from_int(j + 1)) * T::from_int(j + 1);
        term = term * num * y.clone() / den;
        sum = sum + term.clone();
    }
    let mut fact = T::one();
    for j in 1..=n as i64 {
        fact = fact * T::from_int(j);
    }
    pochhammer(alpha + T::one(), n) / fact * sum
}

/// Jac^n_{α,β}(x) by the classical three-term recurrence in the degree,
/// evaluated at t = 2x−1.
pub fn jacobi_value(alpha: f64, beta: f64, n: usize, x: f64) -> f64 {
    let (a, b) = (alpha, beta);
    let t = 2.0 * x - 1.0;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 0.5 * ((a + b + 2.0) * t + (a - b));
    for m in 2..=n {
        let m = m as f64;
        let c0 = 2.0 * m * (m + a + b) * (2.0 * m + a + b - 2.0);
        let c1 = (2.0 * m + a + b - 1.0)
            * ((2.0 * m + a + b) * (2.0 * m + a + b - 2.0) * t + a * a - b * b);
        let c2 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * (2.0 * m + a + b);
        let next = (c1 * cur - c2 * prev) / c0;
        prev = cur;
        cur = next;
    }
    cur
}

/// All values Jac^0_{α,β}(x), …, Jac^{n_max}_{α,β}(x) from one pass of the
/// degree recurrence.
pub fn jacobi_values_upto(alpha: f64, beta: f64, n_max: usize, x: f64) -> Vec<f64> {
    let (a, b) = (alpha, beta);
    let t = 2.0 * x - 1.0;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(0.5 * ((a + b + 2.0) * t + (a - b)));
    for m in 2..=n_max {
        let m = m as f64;
        let c0 = 2.0 * m * (m + a + b) * (2.0 * m + a + b - 2.0);
        let c1 = (2.0 * m + a + b - 1.0)
            * ((2.0 * m + a + b) * (2.0 * m + a + b - 2.0) * t + a * a - b * b);
        let c2 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * (2.0 * m + a + b);
        let next = (c1 * out[out.len() - 1] - c2 * out[out.len() - 2]) / c0;
        out.push(next);
    }
    out
}

/// r-th derivative (d/dx)^r Jac^n_{α,β}(x) = (n+α+β+1)_r Jac^{n−r}_{α+r,β+r}(x).
pub fn jacobi_derivative(alpha: f64, beta: f64, n: usize, r: usize, x: f64) -> f64 {
    if r > n {
        return 0.0;
    }
    let shift = pochhammer(alpha + beta + n as f64 + 1.0, r);
    shift * jacobi_value(alpha + r as f64, beta + r as f64, n - r, x)
}

/// Monomial coefficients of Jac^n_{α,β} in x, exact rationals:
/// index r holds the coefficient of x^r.
pub fn jacobi_coeffs(alpha: &Rat, beta: &Rat, n: usize) -> Vec<Rat> {
    // series coefficients in y = 1−x
    let mut c = vec![Rat::zero(); n + 1];
    let mut term = pochhammer(alpha.clone() + rat(1), n) * {
        let mut f = rat(1);
        for j in 2..=n as i64 {
            f *= rat(j);
        }
        f.recip()
    };
    for (j, cj) in c.iter_mut().enumerate() {
        *cj = term.clone();
        let ji = j as i64;
        let num = rat(ji - n as i64) * (alpha.clone() + beta.clone() + rat(n as i64 + ji + 1));
        if num.is_zero() {
            break;
        }
        let den = (alpha.clone() + rat(ji + 1)) * rat(ji + 1);
        term = term * num / den;
    }
    // substitute y = 1−x: coeff of x^r is Σ_j c_j binom(j,r) (−1)^r
    let mut out = vec![Rat::zero(); n + 1];
    for (j, cj) in c.iter().enumerate() {
        let mut binom = rat(1);
        for r in 0..=j {
            let signed = if r % 2 == 0 { binom.clone() } else { -binom.clone() };
            out[r] += cj * signed;
            binom = binom * rat((j - r) as i64) / rat(r as i64 + 1);
        }
    }
    out
}

/// Float Jacobi basis with the squared norms
/// (Jac^k, Jac^k) = Γ(k+α+1)Γ(k+β+1)/((2k+α+β+1)Γ(k+α+β+1)k!)
/// cached up to a fixed maximal degree.
#[derive(Debug, Clone)]
pub struct JacobiBasis {
    alpha: f64,
    beta: f64,
    ln_norms: Vec<f64>,
}

impl JacobiBasis {
    pub fn new(alpha: f64, beta: f64, max_degree: usize) -> Result<Self, OrthoError> {
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(OrthoError::InvalidParameter(format!(
                "Jacobi parameters need α, β > −1, got ({alpha}, {beta})"
            )));
        }
        let ln_norms = (0..=max_degree)
            .map(|k| {
                let kf = k as f64;
                ln_gamma(kf + alpha + 1.0) + ln_gamma(kf + beta + 1.0)
                    - (2.0 * kf + alpha + beta + 1.0).ln()
                    - ln_gamma(kf + alpha + beta + 1.0)
                    - ln_gamma(kf + 1.0)
            })
            .collect();
        Ok(JacobiBasis { alpha, beta, ln_norms })
    }

    /// Basis of the limit regime: α = z'−p, β = w', so the orthogonality
    /// weight is x^{w'}(1−x)^{z'−p}.
    pub fn for_params(params: &ModelParams, max_degree: usize) -> Self {
        JacobiBasis::new(
            params.z_prime() - params.p() as f64,
            params.w_prime(),
            max_degree,
        )
        .expect("model parameter constraints imply α, β > −1")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn max_degree(&self) -> usize {
        self.ln_norms.len() - 1
    }

    pub fn eval(&self, n: usize, x: f64) -> f64 {
        jacobi_value(self.alpha, self.beta, n, x)
    }

    pub fn eval_series(&self, n: usize, x: f64) -> f64 {
        jacobi_series(self.alpha, self.beta, n, x)
    }

    pub fn ln_norm(&self, k: usize) -> Result<f64, OrthoError> {
        self.ln_norms
            .get(k)
            .copied()
            .ok_or(OrthoError::IndexOutOfRange { index: k, max: self.max_degree() })
    }

    pub fn norm(&self, k: usize) -> Result<f64, OrthoError> {
        Ok(self.ln_norm(k)?.exp())
    }

    /// Orthonormal function j^k(x) = Jac^k(x) x^{β/2}(1−x)^{α/2}/√(Jac^k,Jac^k)
    /// against Lebesgue measure on (0,1). Boundary points are admitted only
    /// when the corresponding weight exponent is non-negative.
    pub fn orthonormal_eval(&self, k: usize, x: f64) -> Result<f64, OrthoError> {
        let ln_norm = self.ln_norm(k)?;
        if !(0.0..=1.0).contains(&x)
            || (x == 0.0 && self.beta < 0.0)
            || (x == 1.0 && self.alpha < 0.0)
        {
            return Err(OrthoError::OutsideDomain { x });
        }
        if (x == 0.0 && self.beta > 0.0) || (x == 1.0 && self.alpha > 0.0) {
            return Ok(0.0);
        }
        let mut ln_w = 0.0;
        if self.beta != 0.0 {
            ln_w += self.beta * x.ln();
        }
        if self.alpha != 0.0 {
            ln_w += self.alpha * (1.0 - x).ln();
        }
        Ok(self.eval(k, x) * (0.5 * (ln_w - ln_norm)).exp())
    }

    /// j^0(x), …, j^{n_max}(x) in one recurrence pass; same domain rules as
    /// `orthonormal_eval`.
    pub fn orthonormal_values_upto(&self, n_max: usize, x: f64) -> Result<Vec<f64>, OrthoError> {
        if n_max > self.max_degree() {
            return Err(OrthoError::IndexOutOfRange { index: n_max, max: self.max_degree() });
        }
        if !(0.0..=1.0).contains(&x)
            || (x == 0.0 && self.beta < 0.0)
            || (x == 1.0 && self.alpha < 0.0)
        {
            return Err(OrthoError::OutsideDomain { x });
        }
        if (x == 0.0 && self.beta > 0.0) || (x == 1.0 && self.alpha > 0.0) {
            return Ok(vec![0.0; n_max + 1]);
        }
        let mut ln_w = 0.0;
        if self.beta != 0.0 {
            ln_w += self.beta * x.ln();
        }
        if self.alpha != 0.0 {
            ln_w += self.alpha * (1.0 - x).ln();
        }
        let plain = jacobi_values_upto(self.alpha, self.beta, n_max, x);
        Ok(plain
            .into_iter()
            .enumerate()
            .map(|(k, v)| v * (0.5 * (ln_w - self.ln_norms[k])).exp())
            .collect())
    }
}

/// Multi-dimensional Jacobi polynomial
/// det[Jac^{λ_i+p−i}(x_j)] / ∏_{i>j}(x_i − x_j),
/// a symmetric polynomial of degree |λ| in p variables.
///
/// Point clusters closer than 1e−9 are handled by the confluent limit:
/// repeated columns become derivative columns g^{(r)}(c)/r! and the
/// intra-cluster Vandermonde factors are dropped.
pub fn multidim_jacobi(basis: &JacobiBasis, lambda: &[usize], xs: &[f64]) -> f64 {
    let p = xs.len();
    assert!(lambda.len() <= p, "partition has more parts than variables");
    assert!(
        lambda.windows(2).all(|w| w[0] >= w[1]),
        "partition parts must be non-increasing"
    );
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // cluster representatives and per-column multiplicity ranks
    let mut reps: Vec<f64> = Vec::new();
    let mut col_cluster = Vec::with_capacity(p);
    let mut col_rank = Vec::with_capacity(p);
    for (j, &x) in sorted.iter().enumerate() {
        if j > 0 && (x - sorted[j - 1]).abs() < 1e-9 {
            let c = *col_cluster.last().unwrap();
            let r: usize = *col_rank.last().unwrap();
            col_cluster.push(c);
            col_rank.push(r + 1);
        } else {
            reps.push(x);
            col_cluster.push(reps.len() - 1);
            col_rank.push(0usize);
        }
    }
    let degree = |i: usize| lambda.get(i).copied().unwrap_or(0) + (p - 1 - i);
    let mut mat = vec![vec![0.0; p]; p];
    let mut rank_factorial = vec![1.0; p];
    for j in 0..p {
        if col_rank[j] > 0 {
            rank_factorial[j] = rank_factorial[j - 1] * col_rank[j] as f64;
        }
    }
    for (i, row) in mat.iter_mut().enumerate() {
        for j in 0..p {
            row[j] = jacobi_derivative(
                basis.alpha(),
                basis.beta(),
                degree(i),
                col_rank[j],
                reps[col_cluster[j]],
            ) / rank_factorial[j];
        }
    }
    let mut den = 1.0;
    for j in 0..p {
        for jp in (j + 1)..p {
            if col_cluster[j] != col_cluster[jp] {
                den *= reps[col_cluster[jp]] - reps[col_cluster[j]];
            }
        }
    }
    det_small(&mat) / den
}
