//! Hahn polynomials Q^k_{α,β,M} on {0, …, M}, their weights and squared
//! norms, and the orthonormal system f^k(x) = Q^k(x)√ρ(x)/√(Q^k,Q^k).
//!
//! Both evaluation paths (terminating series, degree recurrence) carry
//! exact rational intermediates. Every finite `f64` parameter is a dyadic
//! rational, so nothing is lost on the way in, and the one rounding on the
//! way out leaves a few ulp of error. Plain `f64` evaluation fails here:
//! the series cancels catastrophically for mid-range arguments and the
//! forward recurrence admits an exponentially growing second solution near
//! x = 0, which reaches 1e17 relative error by M = 60.

use crate::orthopoly::OrthoError;
use crate::params::ModelParams;
use crate::scalar::{factorial, ln_rat, pochhammer, rat, rat_to_f64, Rat, Scalar};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use statrs::function::gamma::ln_gamma;

/// Terminating hypergeometric sum
/// ₃F₂(−k, −x, k+α+β+1; −M, α+1; 1)
/// defining Q^k_{α,β,M}(x) with Q^k(0) = 1.
///
/// Generic over the scalar type: exact rationals and f64 share the series.
pub fn hahn_series<T: Scalar>(alpha: T, beta: T, m: i64, k: usize, x: T) -> T {
    let mut sum = T::one();
    let mut term = T::one();
    for n in 0..k as i64 {
        let num = T::from_int(n - k as i64)
            * (T::from_int(n) - x.clone())
            * (alpha.clone() + beta.clone() + T::from_int(k as i64 + n + 1));
        if num.is_zero() {
            break;
        }
        let den = T::from_int(n - m) * (alpha.clone() + T::from_int(n + 1)) * T::from_int(n + 1);
        term = term * num / den;
        sum = sum + term.clone();
    }
    sum
}

/// Exact series evaluation with the reflection
/// Q^k(x; α,β,M) = (−1)^k (β+1)_k/(α+1)_k · Q^k(M−x; β,α,M)
/// applied for x > M/2, which keeps the series short on both halves.
fn q_series(alpha: &Rat, beta: &Rat, m: i64, k: usize, x: i64) -> Rat {
    if 2 * x <= m {
        hahn_series(alpha.clone(), beta.clone(), m, k, rat(x))
    } else {
        reflection_constant(alpha, beta, k)
            * hahn_series(beta.clone(), alpha.clone(), m, k, rat(m - x))
    }
}

/// Exact evaluation by the three-term recurrence in the degree,
/// −x Q_n = A_n Q_{n+1} − (A_n+C_n) Q_n + C_n Q_{n−1},
/// A_n = (n+α+β+1)(n+α+1)(M−n)/((2n+α+β+1)(2n+α+β+2)),
/// C_n = n(n+α+β+M+1)(n+β)/((2n+α+β)(2n+α+β+1)),
/// reflected for x > M/2 like the series path.
fn q_recurrence(alpha: &Rat, beta: &Rat, m: i64, k: usize, x: i64) -> Rat {
    if 2 * x > m {
        return reflection_constant(alpha, beta, k) * q_recurrence_plain(beta, alpha, m, k, m - x);
    }
    q_recurrence_plain(alpha, beta, m, k, x)
}

fn q_recurrence_plain(alpha: &Rat, beta: &Rat, m: i64, k: usize, x: i64) -> Rat {
    let mut prev = Rat::one();
    if k == 0 {
        return prev;
    }
    let s = alpha + beta;
    let mut cur = Rat::one()
        - (s.clone() + rat(2)) * rat(x) / ((alpha + Rat::one()) * rat(m));
    for n in 1..k as i64 {
        let nn = rat(n);
        let an = (s.clone() + rat(n + 1))
            * (alpha + rat(n + 1))
            * rat(m - n)
            / ((s.clone() + rat(2 * n + 1)) * (s.clone() + rat(2 * n + 2)));
        let cn = nn * (s.clone() + rat(n + m + 1)) * (beta + rat(n))
            / ((s.clone() + rat(2 * n)) * (s.clone() + rat(2 * n + 1)));
        let next = ((an.clone() + cn.clone() - rat(x)) * &cur - cn * &prev) / an;
        prev = cur;
        cur = next;
    }
    cur
}

fn reflection_constant(alpha: &Rat, beta: &Rat, k: usize) -> Rat {
    let c = pochhammer(beta + Rat::one(), k) / pochhammer(alpha + Rat::one(), k);
    if k % 2 == 0 {
        c
    } else {
        -c
    }
}

fn weight_formula(alpha: &Rat, beta: &Rat, m: usize, x: usize) -> Rat {
    let a = pochhammer(alpha + Rat::one(), x) / BigRational::from_integer(factorial(x as u64));
    let b = pochhammer(beta + Rat::one(), m - x)
        / BigRational::from_integer(factorial((m - x) as u64));
    a * b
}

fn norm_formula(alpha: &Rat, beta: &Rat, m: usize, k: usize) -> Rat {
    let s = alpha + beta;
    let num = pochhammer(s.clone() + rat(k as i64 + 1), m + 1)
        * pochhammer(beta + Rat::one(), k)
        * BigRational::from_integer(factorial(k as u64));
    let falling: Rat = BigRational::from_integer(factorial(m as u64))
        / BigRational::from_integer(factorial((m - k) as u64));
    let den = (s + rat(2 * k as i64 + 1))
        * pochhammer(alpha + Rat::one(), k)
        * falling
        * BigRational::from_integer(factorial(m as u64));
    num / den
}

/// Hahn basis with `f64` parameters (α = w', β = z'−p, M = N+p−1 for the
/// level-N lattice). Parameters are mirrored into exact dyadic rationals;
/// weights and norms are cached exactly at construction.
#[derive(Debug, Clone)]
pub struct HahnBasis {
    alpha: f64,
    beta: f64,
    m: usize,
    alpha_r: Rat,
    beta_r: Rat,
    norms: Vec<Rat>,
    weights: Vec<Rat>,
}

impl HahnBasis {
    pub fn new(alpha: f64, beta: f64, m: usize) -> Result<Self, OrthoError> {
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(OrthoError::InvalidParameter(format!(
                "Hahn parameters need α, β > −1, got ({alpha}, {beta})"
            )));
        }
        let alpha_r = BigRational::from_float(alpha).unwrap();
        let beta_r = BigRational::from_float(beta).unwrap();
        let norms = (0..=m).map(|k| norm_formula(&alpha_r, &beta_r, m, k)).collect();
        let weights = (0..=m).map(|x| weight_formula(&alpha_r, &beta_r, m, x)).collect();
        Ok(HahnBasis { alpha, beta, m, alpha_r, beta_r, norms, weights })
    }

    /// Basis attached to level N of the model: α = w', β = z'−p, M = N+p−1.
    pub fn for_level(params: &ModelParams, n_level: usize) -> Self {
        let alpha = params.w_prime();
        let beta = params.z_prime() - params.p() as f64;
        HahnBasis::new(alpha, beta, n_level + params.p() - 1)
            .expect("model parameter constraints imply α, β > −1")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check_index(&self, k: usize) -> Result<(), OrthoError> {
        if k > self.m {
            return Err(OrthoError::IndexOutOfRange { index: k, max: self.m });
        }
        Ok(())
    }

    /// Q^k(x): terminating series for k ≤ 30, degree recurrence above.
    pub fn eval(&self, k: usize, x: usize) -> Result<f64, OrthoError> {
        Ok(rat_to_f64(&self.eval_exact(k, x)?))
    }

    /// Q^k(x) as an exact rational.
    pub fn eval_exact(&self, k: usize, x: usize) -> Result<Rat, OrthoError> {
        self.check_index(k)?;
        self.check_index(x)?;
        if k <= 30 {
            Ok(q_series(&self.alpha_r, &self.beta_r, self.m as i64, k, x as i64))
        } else {
            Ok(q_recurrence(&self.alpha_r, &self.beta_r, self.m as i64, k, x as i64))
        }
    }

    pub fn eval_series(&self, k: usize, x: usize) -> Result<f64, OrthoError> {
        self.check_index(k)?;
        self.check_index(x)?;
        Ok(rat_to_f64(&q_series(&self.alpha_r, &self.beta_r, self.m as i64, k, x as i64)))
    }

    pub fn eval_recurrence(&self, k: usize, x: usize) -> Result<f64, OrthoError> {
        self.check_index(k)?;
        self.check_index(x)?;
        Ok(rat_to_f64(&q_recurrence(&self.alpha_r, &self.beta_r, self.m as i64, k, x as i64)))
    }

    /// Squared norm (Q^k, Q^k) against ρ, exact.
    pub fn norm_exact(&self, k: usize) -> Result<&Rat, OrthoError> {
        self.check_index(k)?;
        Ok(&self.norms[k])
    }

    pub fn norm(&self, k: usize) -> Result<f64, OrthoError> {
        Ok(rat_to_f64(self.norm_exact(k)?))
    }

    pub fn ln_norm(&self, k: usize) -> Result<f64, OrthoError> {
        Ok(ln_rat(self.norm_exact(k)?))
    }

    /// Weight ρ(x) = (α+1)_x/x! · (β+1)_{M−x}/(M−x)!, exact.
    pub fn weight_exact(&self, x: usize) -> Result<&Rat, OrthoError> {
        self.check_index(x)?;
        Ok(&self.weights[x])
    }

    pub fn weight(&self, x: usize) -> Result<f64, OrthoError> {
        Ok(rat_to_f64(self.weight_exact(x)?))
    }

    pub fn ln_weight(&self, x: usize) -> Result<f64, OrthoError> {
        Ok(ln_rat(self.weight_exact(x)?))
    }

    /// ln Γ(α+1)Γ(β+1), the constant relating ρ and its Γ-weighted variant
    /// w_N(x) = Γ(α+1)Γ(β+1)ρ(x).
    pub fn ln_gamma_factor(&self) -> f64 {
        ln_gamma(self.alpha + 1.0) + ln_gamma(self.beta + 1.0)
    }

    /// Orthonormal function f^k(x) = Q^k(x) √ρ(x) / √(Q^k,Q^k);
    /// Σ_x f^k(x) f^l(x) = δ_{kl}. The Γ factors of the w_N convention
    /// cancel between weight and norm, so the classical pair is used.
    /// Computed as sign(Q)·√(Q²ρ/(Q,Q)) with the square exact; the square
    /// is at most 1, so the final rounding is the only error.
    pub fn f_eval(&self, k: usize, x: usize) -> Result<f64, OrthoError> {
        let q = self.eval_exact(k, x)?;
        if q.is_zero() {
            return Ok(0.0);
        }
        let sq = q.clone() * &q * &self.weights[x] / &self.norms[k];
        let v = rat_to_f64(&sq).sqrt();
        Ok(if q.is_negative() { -v } else { v })
    }

    /// Dual sum Σ_k Q^k(x) Q^k(y)/(Q^k,Q^k); equals δ_{xy}/ρ(x).
    pub fn dual_sum(&self, x: usize, y: usize) -> Result<f64, OrthoError> {
        self.check_index(x)?;
        self.check_index(y)?;
        let mut acc = Rat::zero();
        for k in 0..=self.m {
            acc += self.eval_exact(k, x)? * self.eval_exact(k, y)? / &self.norms[k];
        }
        Ok(rat_to_f64(&acc))
    }
}

/// Exact-rational Hahn basis for integer parameters α, β ≥ 0.
#[derive(Debug, Clone)]
pub struct HahnBasisExact {
    alpha: i64,
    beta: i64,
    m: usize,
    alpha_r: Rat,
    beta_r: Rat,
    norms: Vec<Rat>,
}

impl HahnBasisExact {
    pub fn new(alpha: i64, beta: i64, m: usize) -> Result<Self, OrthoError> {
        if alpha < 0 || beta < 0 {
            return Err(OrthoError::InvalidParameter(format!(
                "exact Hahn basis needs integer α, β ≥ 0, got ({alpha}, {beta})"
            )));
        }
        let alpha_r = rat(alpha);
        let beta_r = rat(beta);
        let norms = (0..=m).map(|k| norm_formula(&alpha_r, &beta_r, m, k)).collect();
        Ok(HahnBasisExact { alpha, beta, m, alpha_r, beta_r, norms })
    }

    /// Basis attached to level N: α = w', β = z'−p, M = N+p−1. Requires
    /// integral parameters.
    pub fn for_level(params: &ModelParams, n_level: usize) -> Self {
        let alpha = params.w_int();
        let beta = params.z_int() - params.p() as i64;
        HahnBasisExact::new(alpha, beta, n_level + params.p() - 1)
            .expect("model parameter constraints imply α, β ≥ 0")
    }

    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    pub fn beta(&self) -> i64 {
        self.beta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check_index(&self, k: usize) -> Result<(), OrthoError> {
        if k > self.m {
            return Err(OrthoError::IndexOutOfRange { index: k, max: self.m });
        }
        Ok(())
    }

    pub fn eval(&self, k: usize, x: usize) -> Result<Rat, OrthoError> {
        self.check_index(k)?;
        self.check_index(x)?;
        Ok(q_series(&self.alpha_r, &self.beta_r, self.m as i64, k, x as i64))
    }

    /// Closed-form squared norm
    /// (k+α+β+1)_{M+1} (β+1)_k k! / ((2k+α+β+1)(α+1)_k (M!/(M−k)!) M!).
    pub fn norm(&self, k: usize) -> Result<&Rat, OrthoError> {
        self.check_index(k)?;
        Ok(&self.norms[k])
    }

    /// Direct weighted sum Σ_x ρ(x) Q^k(x) Q^l(x); the independent check of
    /// the closed form and of orthogonality.
    pub fn orthogonality_sum(&self, k: usize, l: usize) -> Result<Rat, OrthoError> {
        self.check_index(k)?;
        self.check_index(l)?;
        let mut acc = Rat::zero();
        for x in 0..=self.m {
            acc += self.weight(x)? * self.eval(k, x)? * self.eval(l, x)?;
        }
        Ok(acc)
    }

    /// ρ(x) = (α+1)_x/x! · (β+1)_{M−x}/(M−x)!.
    pub fn weight(&self, x: usize) -> Result<Rat, OrthoError> {
        self.check_index(x)?;
        Ok(weight_formula(&self.alpha_r, &self.beta_r, self.m, x))
    }

    /// Γ(α+1)Γ(β+1) = α!β!, the constant relating ρ to w_N.
    pub fn gamma_factor(&self) -> Rat {
        BigRational::from_integer(factorial(self.alpha as u64) * factorial(self.beta as u64))
    }

    /// Dual sum Σ_k Q^k(x) Q^k(y)/(Q^k,Q^k); equals δ_{xy}/ρ(x) exactly.
    pub fn dual_sum(&self, x: usize, y: usize) -> Result<Rat, OrthoError> {
        self.check_index(x)?;
        self.check_index(y)?;
        let mut acc = Rat::zero();
        for k in 0..=self.m {
            acc += self.eval(k, x)? * self.eval(k, y)? / &self.norms[k];
        }
        Ok(acc)
    }
}

/// Both sides of the contiguous relation
/// x Q^k(x−1; α,β,M−1) + (M−x) Q^k(x; α,β,M−1) = M Q^k(x; α,β,M),
/// evaluated on the basis at M−1; vanishing boundary terms are dropped
/// before evaluation.
pub fn m_recurrence_pair(
    basis_below: &HahnBasisExact,
    k: usize,
    x: usize,
) -> Result<(Rat, Rat), OrthoError> {
    let m = basis_below.m() + 1;
    let full = HahnBasisExact::new(basis_below.alpha(), basis_below.beta(), m)?;
    let mut lhs = Rat::zero();
    if x > 0 {
        lhs += rat(x as i64) * basis_below.eval(k, x - 1)?;
    }
    if x < m {
        lhs += rat((m - x) as i64) * basis_below.eval(k, x)?;
    }
    let rhs = rat(m as i64) * full.eval(k, x)?;
    Ok((lhs, rhs))
}
