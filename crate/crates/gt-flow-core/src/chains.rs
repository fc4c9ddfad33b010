//! Markov dynamics on the particle configurations: cotransitions p↓,
//! up transitions p↑, the stationary up-down chain, determinantal
//! transition formulas through the two-diagonal matrix v_N, and exact
//! trajectory samplers.

use crate::ensembles::{weight_exact, DiscreteEnsemble, GeneralZWMeasure};
use crate::gt::{
    dim, dim_via_particles, interlaces, particles_interlace, vandermonde, ParticleConfig,
    Signature,
};
use crate::orthopoly::hahn::HahnBasis;
use crate::params::ModelParams;
use crate::scalar::{det_small, pochhammer, rat, Rat};
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Dense kernels are only materialized up to this side length.
pub const MAX_KERNEL_SIDE: usize = 2000;

/// Candidate enumeration in the samplers walks 2^p masks.
const MAX_SAMPLER_P: usize = 16;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("expected consecutive levels, got {lower} and {upper}")]
    LevelMismatch { lower: usize, upper: usize },
    #[error("configuration box ({n}, {p}) incompatible with level {expected_n}, p = {expected_p}")]
    BoxMismatch { n: usize, p: usize, expected_n: usize, expected_p: usize },
    #[error("exact evaluation needs integer z', w'")]
    NotIntegral,
    #[error("kernel of side {side} exceeds the dense materialization bound {bound}")]
    KernelTooLarge { side: usize, bound: usize },
    #[error("signature carries no mass under the lower-level measure")]
    EmptySupport,
    #[error("cannot step down from level zero")]
    AtGroundLevel,
    #[error(transparent)]
    Ortho(#[from] crate::orthopoly::OrthoError),
    #[error(transparent)]
    Ensemble(#[from] crate::ensembles::EnsembleError),
}

fn check_box(x: &ParticleConfig, n: usize, p: usize) -> Result<(), ChainError> {
    if x.level() != n || x.p() != p {
        return Err(ChainError::BoxMismatch { n: x.level(), p: x.p(), expected_n: n, expected_p: p });
    }
    Ok(())
}

/// Cotransition probability p↓(λ|μ) = Dim(λ)/Dim(μ) for λ ≺ μ, else 0.
pub fn cotransition(lower: &Signature, upper: &Signature) -> Result<Rat, ChainError> {
    if upper.level() != lower.level() + 1 {
        return Err(ChainError::LevelMismatch { lower: lower.level(), upper: upper.level() });
    }
    if !interlaces(lower, upper).unwrap_or(false) {
        return Ok(Rat::zero());
    }
    Ok(BigRational::new(dim(lower), dim(upper)))
}

/// p↓ in particle coordinates through the dimension formula; X′ one
/// level below X.
pub fn cotransition_particles(
    x_below: &ParticleConfig,
    x: &ParticleConfig,
) -> Result<Rat, ChainError> {
    if x.level() != x_below.level() + 1 || x.p() != x_below.p() {
        return Err(ChainError::LevelMismatch { lower: x_below.level(), upper: x.level() });
    }
    if !particles_interlace(x_below, x) {
        return Ok(Rat::zero());
    }
    Ok(BigRational::new(dim_via_particles(x_below), dim_via_particles(x)))
}

/// Generic up transition p↑(μ|λ) = (M_{N+1}(μ)/M_N(λ)) · p↓(λ|μ), the
/// definitional form used as a cross-check oracle.
pub fn up_transition_general(
    below: &GeneralZWMeasure,
    above: &GeneralZWMeasure,
    lambda: &Signature,
    mu: &Signature,
) -> Result<Rat, ChainError> {
    let mass_below = below.prob(lambda)?;
    if mass_below.is_zero() {
        return Err(ChainError::EmptySupport);
    }
    Ok(above.prob(mu)? / mass_below * cotransition(lambda, mu)?)
}

/// Up transition in particle coordinates, exact form:
/// Prob(X → X′) = 1/(z'+w'+N+1)_p · V(X′)/V(X) ·
/// ∏_{x′ᵢ=xᵢ}(z'+N−xᵢ) ∏_{x′ᵢ=xᵢ+1}(w'+1+xᵢ) for X ≺ X′, else 0.
pub fn up_transition_exact(
    params: &ModelParams,
    n: usize,
    x: &ParticleConfig,
    x_up: &ParticleConfig,
) -> Result<Rat, ChainError> {
    let p = params.p();
    check_box(x, n, p)?;
    check_box(x_up, n + 1, p)?;
    if !params.is_integral() {
        return Err(ChainError::NotIntegral);
    }
    if !particles_interlace(x, x_up) {
        return Ok(Rat::zero());
    }
    let (z, w, n_i) = (params.z_int(), params.w_int(), n as i64);
    let mut mass = Rat::one() / pochhammer(rat(z + w + n_i + 1), p);
    let pts: Vec<Rat> = x.points().iter().map(|&v| rat(v)).collect();
    let pts_up: Vec<Rat> = x_up.points().iter().map(|&v| rat(v)).collect();
    mass *= vandermonde(&pts_up) / vandermonde(&pts);
    for (&xi, &xi_up) in x.points().iter().zip(x_up.points()) {
        mass *= if xi_up == xi { rat(z + n_i - xi) } else { rat(w + 1 + xi) };
    }
    Ok(mass)
}

/// Up transition, float path.
pub fn up_transition(
    params: &ModelParams,
    n: usize,
    x: &ParticleConfig,
    x_up: &ParticleConfig,
) -> Result<f64, ChainError> {
    let p = params.p();
    check_box(x, n, p)?;
    check_box(x_up, n + 1, p)?;
    if !particles_interlace(x, x_up) {
        return Ok(0.0);
    }
    let (z, w, n_f) = (params.z_prime(), params.w_prime(), n as f64);
    let mut mass = 1.0 / pochhammer(z + w + n_f + 1.0, p);
    let pts: Vec<f64> = x.points().iter().map(|&v| v as f64).collect();
    let pts_up: Vec<f64> = x_up.points().iter().map(|&v| v as f64).collect();
    mass *= vandermonde(&pts_up) / vandermonde(&pts);
    for (&xi, &xi_up) in x.points().iter().zip(x_up.points()) {
        mass *= if xi_up == xi { z + n_f - xi as f64 } else { w + 1.0 + xi as f64 };
    }
    Ok(mass)
}

/// Spectral coefficient c_i^N = √((1 − i/(p+N))(1 + i/(w'+z'+N+1))).
pub fn c_coeff(params: &ModelParams, n: usize, i: usize) -> f64 {
    let (z, w, p) = (params.z_prime(), params.w_prime(), params.p() as f64);
    let (n, i) = (n as f64, i as f64);
    ((1.0 - i / (p + n)) * (1.0 + i / (w + z + n + 1.0))).sqrt()
}

/// (c_i^N)² as an exact rational; needs integer parameters.
pub fn c_coeff_sq_exact(params: &ModelParams, n: usize, i: usize) -> Result<Rat, ChainError> {
    if !params.is_integral() {
        return Err(ChainError::NotIntegral);
    }
    let (z, w, p) = (params.z_int(), params.w_int(), params.p() as i64);
    let (n, i) = (n as i64, i as i64);
    Ok(BigRational::new((p + n - i).into(), (p + n).into())
        * BigRational::new((w + z + n + 1 + i).into(), (w + z + n + 1).into()))
}

/// Entry of the two-diagonal matrix v_N:
/// v(x,x) = √((z'+N−x)(N+p−x)/((N+p)(w'+z'+N+1))),
/// v(x,x+1) = √((w'+x+1)(x+1)/((N+p)(w'+z'+N+1))), 0 otherwise.
pub fn vn_entry(params: &ModelParams, n: usize, x: usize, y: usize) -> f64 {
    let (z, w, p) = (params.z_prime(), params.w_prime(), params.p() as f64);
    let (n_f, x_f) = (n as f64, x as f64);
    let denom = (n_f + p) * (w + z + n_f + 1.0);
    if y == x {
        ((z + n_f - x_f) * (n_f + p - x_f) / denom).sqrt()
    } else if y == x + 1 {
        ((w + x_f + 1.0) * (x_f + 1.0) / denom).sqrt()
    } else {
        0.0
    }
}

/// v_N(x,y)² as an exact rational; zero off the two diagonals.
pub fn vn_entry_sq_exact(
    params: &ModelParams,
    n: usize,
    x: usize,
    y: usize,
) -> Result<Rat, ChainError> {
    if !params.is_integral() {
        return Err(ChainError::NotIntegral);
    }
    let (z, w, p) = (params.z_int(), params.w_int(), params.p() as i64);
    let (n_i, x_i) = (n as i64, x as i64);
    let denom = rat((n_i + p) * (w + z + n_i + 1));
    Ok(if y == x {
        rat((z + n_i - x_i) * (n_i + p - x_i)) / denom
    } else if y == x + 1 {
        rat((w + x_i + 1) * (x_i + 1)) / denom
    } else {
        Rat::zero()
    })
}

/// The full (N+p)×(N+p+1) matrix v_N.
pub fn matrix_vn(params: &ModelParams, n: usize) -> DMatrix<f64> {
    let side = n + params.p();
    DMatrix::from_fn(side, side + 1, |x, y| vn_entry(params, n, x, y))
}

fn ln_prob_ratio_sqrt(
    ens_from: &DiscreteEnsemble,
    ens_to: &DiscreteEnsemble,
    x: &ParticleConfig,
    x_to: &ParticleConfig,
) -> Result<f64, ChainError> {
    Ok(0.5 * (ens_to.ln_prob(x_to)? - ens_from.ln_prob(x)?))
}

/// Up transition through the determinantal form
/// √(P_{N+1}(X′)/P_N(X)) · det[v_N(xᵢ,x′ⱼ)] / ∏_{i<p} c_i^N.
pub fn up_transition_determinantal(
    params: &ModelParams,
    n: usize,
    x: &ParticleConfig,
    x_up: &ParticleConfig,
) -> Result<f64, ChainError> {
    let p = params.p();
    check_box(x, n, p)?;
    check_box(x_up, n + 1, p)?;
    let ens_n = DiscreteEnsemble::new(params.clone(), n);
    let ens_up = DiscreteEnsemble::new(params.clone(), n + 1);
    let ratio = ln_prob_ratio_sqrt(&ens_n, &ens_up, x, x_up)?.exp();
    let sub: Vec<Vec<f64>> = x
        .points()
        .iter()
        .map(|&xi| {
            x_up.points()
                .iter()
                .map(|&yj| vn_entry(params, n, xi as usize, yj as usize))
                .collect()
        })
        .collect();
    let c_prod: f64 = (0..p).map(|i| c_coeff(params, n, i)).product();
    Ok(ratio * det_small(&sub) / c_prod)
}

/// Cotransition through the determinantal form
/// √(P_N(X′)/P_{N+1}(X)) · det[v_N(x′ᵢ,xⱼ)] / ∏_{i<p} c_i^N,
/// with X′ one level below X.
pub fn down_transition_determinantal(
    params: &ModelParams,
    n: usize,
    x_below: &ParticleConfig,
    x: &ParticleConfig,
) -> Result<f64, ChainError> {
    let p = params.p();
    check_box(x_below, n, p)?;
    check_box(x, n + 1, p)?;
    let ens_n = DiscreteEnsemble::new(params.clone(), n);
    let ens_up = DiscreteEnsemble::new(params.clone(), n + 1);
    let ratio = ln_prob_ratio_sqrt(&ens_up, &ens_n, x, x_below)?.exp();
    let sub: Vec<Vec<f64>> = x_below
        .points()
        .iter()
        .map(|&xi| {
            x.points()
                .iter()
                .map(|&yj| vn_entry(params, n, xi as usize, yj as usize))
                .collect()
        })
        .collect();
    let c_prod: f64 = (0..p).map(|i| c_coeff(params, n, i)).product();
    Ok(ratio * det_small(&sub) / c_prod)
}

/// Entry of u_N = v_N v_Nᵀ divided by √(w_N(x)w_N(y)): a rational,
/// tridiagonal expression used for exact one-step checks.
fn u_hat_entry(params: &ModelParams, n: usize, x: i64, y: i64) -> Rat {
    let (z, w, p) = (params.z_int(), params.w_int(), params.p() as i64);
    let n_i = n as i64;
    let zeta = Rat::one() / rat((n_i + p) * (w + z + n_i + 1));
    let rho = |a: i64, b: i64| -> Rat {
        if b == a {
            rat(z + n_i - a)
        } else if b == a + 1 {
            rat(w + 1 + a)
        } else {
            Rat::zero()
        }
    };
    let mut acc = Rat::zero();
    for s in [x, x + 1] {
        if s == y || s == y + 1 {
            let t = rho(x, s) * rho(y, s);
            if !t.is_zero() {
                acc += t / weight_exact(params, n + 1, s as usize);
            }
        }
    }
    acc * zeta
}

/// Exact one-step up-down transition mass, the determinantal form with
/// the square roots cancelled:
/// (V(X′)/V(X)) · ∏ⱼ w_N(x′ⱼ) · det[û(xᵢ,x′ⱼ)] / ∏_{i<p}(c_i^N)².
pub fn updown_step_exact(
    params: &ModelParams,
    n: usize,
    x: &ParticleConfig,
    x_next: &ParticleConfig,
) -> Result<Rat, ChainError> {
    let p = params.p();
    check_box(x, n, p)?;
    check_box(x_next, n, p)?;
    if !params.is_integral() {
        return Err(ChainError::NotIntegral);
    }
    let pts: Vec<Rat> = x.points().iter().map(|&v| rat(v)).collect();
    let pts_next: Vec<Rat> = x_next.points().iter().map(|&v| rat(v)).collect();
    let mut mass = vandermonde(&pts_next) / vandermonde(&pts);
    for &xj in x_next.points() {
        mass *= weight_exact(params, n, xj as usize);
    }
    let sub: Vec<Vec<Rat>> = x
        .points()
        .iter()
        .map(|&xi| x_next.points().iter().map(|&yj| u_hat_entry(params, n, xi, yj)).collect())
        .collect();
    mass *= det_small(&sub);
    for i in 0..p {
        mass /= c_coeff_sq_exact(params, n, i)?;
    }
    Ok(mass)
}

/// Exact k-step up-down transition mass through the spectral form,
/// with ŵ_k(x,y) = Σᵢ (c_i²)^k Q^i(x)Q^i(y)/‖Q^i‖² and the Hahn
/// orthogonality weight replacing the paired square roots.
pub fn updown_k_step_exact(
    params: &ModelParams,
    n: usize,
    k: usize,
    x: &ParticleConfig,
    x_next: &ParticleConfig,
) -> Result<Rat, ChainError> {
    let p = params.p();
    check_box(x, n, p)?;
    check_box(x_next, n, p)?;
    if !params.is_integral() {
        return Err(ChainError::NotIntegral);
    }
    let basis = HahnBasis::for_level(params, n);
    let modes = n + p;
    let c_pows: Vec<Rat> = (0..modes)
        .map(|i| Ok(c_coeff_sq_exact(params, n, i)?.pow(k as i32)))
        .collect::<Result<_, ChainError>>()?;
    let w_hat = |a: usize, b: usize| -> Result<Rat, ChainError> {
        let mut acc = Rat::zero();
        for (i, c_pow) in c_pows.iter().enumerate() {
            let term = basis.eval_exact(i, a)? * basis.eval_exact(i, b)? / basis.norm_exact(i)?;
            acc += c_pow * term;
        }
        Ok(acc)
    };
    let pts: Vec<Rat> = x.points().iter().map(|&v| rat(v)).collect();
    let pts_next: Vec<Rat> = x_next.points().iter().map(|&v| rat(v)).collect();
    let mut mass = vandermonde(&pts_next) / vandermonde(&pts);
    for &xj in x_next.points() {
        mass *= basis.weight_exact(xj as usize)?;
    }
    let mut sub = Vec::with_capacity(p);
    for &xi in x.points() {
        let mut row = Vec::with_capacity(p);
        for &yj in x_next.points() {
            row.push(w_hat(xi as usize, yj as usize)?);
        }
        sub.push(row);
    }
    mass *= det_small(&sub);
    for c_pow in c_pows.iter().take(p) {
        mass /= c_pow.clone();
    }
    Ok(mass)
}

/// Dense k-step kernel of the stationary up-down chain: the matrix
/// w_{N,k}(x,y) = Σᵢ (c_i^N)^{2k} f^i_N(x) f^i_N(y) plus the spectral
/// weights, with transitions
/// Prob(X → X′) = √(P(X′)/P(X)) · det[w_{N,k}(xᵢ,x′ⱼ)] / ∏_{i<p}(c_i)^{2k}.
#[derive(Debug, Clone)]
pub struct UpDownKernel {
    params: ModelParams,
    n: usize,
    k: usize,
    matrix: DMatrix<f64>,
    c_powers: Vec<f64>,
    ensemble: DiscreteEnsemble,
}

impl UpDownKernel {
    /// One-step kernel assembled as u_N = v_N v_Nᵀ.
    pub fn step(params: &ModelParams, n: usize) -> Result<Self, ChainError> {
        let side = n + params.p();
        if side > MAX_KERNEL_SIDE {
            return Err(ChainError::KernelTooLarge { side, bound: MAX_KERNEL_SIDE });
        }
        let v = matrix_vn(params, n);
        let matrix = &v * v.transpose();
        let c_powers = (0..side).map(|i| c_coeff(params, n, i).powi(2)).collect();
        Ok(UpDownKernel {
            params: params.clone(),
            n,
            k: 1,
            matrix,
            c_powers,
            ensemble: DiscreteEnsemble::new(params.clone(), n),
        })
    }

    /// k-step kernel through the diagonal spectral power
    /// F_Nᵀ (C_N C_Nᵀ)^k F_N; k = 0 yields the identity.
    pub fn k_step(params: &ModelParams, n: usize, k: usize) -> Result<Self, ChainError> {
        let side = n + params.p();
        if side > MAX_KERNEL_SIDE {
            return Err(ChainError::KernelTooLarge { side, bound: MAX_KERNEL_SIDE });
        }
        let matrix = if k == 0 {
            DMatrix::identity(side, side)
        } else {
            let basis = HahnBasis::for_level(params, n);
            let mut f = DMatrix::zeros(side, side);
            for i in 0..side {
                for x in 0..side {
                    f[(i, x)] = basis.f_eval(i, x)?;
                }
            }
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(side, |i, _| {
                c_coeff(params, n, i).powi(2 * k as i32)
            }));
            f.transpose() * d * f
        };
        let c_powers = (0..side).map(|i| c_coeff(params, n, i).powi(2 * k as i32)).collect();
        Ok(UpDownKernel {
            params: params.clone(),
            n,
            k,
            matrix,
            c_powers,
            ensemble: DiscreteEnsemble::new(params.clone(), n),
        })
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// The symmetric matrix of w_{N,k} values.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// (c_i^N)^{2k} for i = 0, …, N+p−1.
    pub fn c_powers(&self) -> &[f64] {
        &self.c_powers
    }

    /// Transition probability X → X′ in k steps.
    pub fn transition_prob(
        &self,
        x: &ParticleConfig,
        x_next: &ParticleConfig,
    ) -> Result<f64, ChainError> {
        let p = self.params.p();
        check_box(x, self.n, p)?;
        check_box(x_next, self.n, p)?;
        let ratio =
            (0.5 * (self.ensemble.ln_prob(x_next)? - self.ensemble.ln_prob(x)?)).exp();
        let sub: Vec<Vec<f64>> = x
            .points()
            .iter()
            .map(|&xi| {
                x_next
                    .points()
                    .iter()
                    .map(|&yj| self.matrix[(xi as usize, yj as usize)])
                    .collect()
            })
            .collect();
        let denom: f64 = self.c_powers.iter().take(p).product();
        Ok(ratio * det_small(&sub) / denom)
    }
}

fn draw_candidate<R: Rng + ?Sized>(masses: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut u = rng.gen::<f64>() * total;
    for (idx, &m) in masses.iter().enumerate() {
        u -= m;
        if u <= 0.0 {
            return Some(idx);
        }
    }
    masses.iter().rposition(|&m| m > 0.0)
}

/// One exact draw from p↑(·|X): each particle moves up by 0 or 1, with
/// mass ∝ V(X+ε) ∏ᵢ (z'+N−xᵢ or w'+1+xᵢ). All 2^p candidates are
/// enumerated; invalid ones carry zero mass through V.
pub fn up_step_sample<R: Rng + ?Sized>(
    params: &ModelParams,
    x: &ParticleConfig,
    rng: &mut R,
) -> Result<ParticleConfig, ChainError> {
    let p = x.p();
    assert!(p <= MAX_SAMPLER_P, "candidate enumeration over 2^p masks needs p ≤ {MAX_SAMPLER_P}");
    let n = x.level() as i64;
    let (z, w) = (params.z_prime(), params.w_prime());
    let pts = x.points();
    let mut masses = Vec::with_capacity(1 << p);
    let mut cand = vec![0i64; p];
    let mut chosen = Vec::new();
    for mask in 0..(1usize << p) {
        for (i, &v) in pts.iter().enumerate() {
            cand[i] = v + ((mask >> i) & 1) as i64;
        }
        let valid = cand.windows(2).all(|c| c[0] < c[1]);
        if !valid {
            masses.push(0.0);
            continue;
        }
        let floats: Vec<f64> = cand.iter().map(|&v| v as f64).collect();
        let mut mass: f64 = vandermonde(&floats);
        for (i, &v) in pts.iter().enumerate() {
            mass *= if (mask >> i) & 1 == 0 { z + n as f64 - v as f64 } else { w + 1.0 + v as f64 };
        }
        masses.push(mass);
    }
    let mask = draw_candidate(&masses, rng).ok_or(ChainError::EmptySupport)?;
    for (i, &v) in pts.iter().enumerate() {
        chosen.push(v + ((mask >> i) & 1) as i64);
    }
    ParticleConfig::new(chosen, x.level() + 1, p).map_err(|_| ChainError::EmptySupport)
}

/// One exact draw from p↓(·|X): each particle moves down by 0 or 1,
/// with mass ∝ V(X−ε) ∏ᵢ (N+p−1−xᵢ or xᵢ); parameter free, since p↓
/// is a ratio of dimensions.
pub fn down_step_sample<R: Rng + ?Sized>(
    x: &ParticleConfig,
    rng: &mut R,
) -> Result<ParticleConfig, ChainError> {
    let p = x.p();
    assert!(p <= MAX_SAMPLER_P, "candidate enumeration over 2^p masks needs p ≤ {MAX_SAMPLER_P}");
    let m = x.level();
    if m == 0 {
        return Err(ChainError::AtGroundLevel);
    }
    let top = (m + p - 1) as i64;
    let pts = x.points();
    let mut masses = Vec::with_capacity(1 << p);
    let mut cand = vec![0i64; p];
    for mask in 0..(1usize << p) {
        for (i, &v) in pts.iter().enumerate() {
            cand[i] = v - ((mask >> i) & 1) as i64;
        }
        let valid = cand.windows(2).all(|c| c[0] < c[1]);
        if !valid {
            masses.push(0.0);
            continue;
        }
        let floats: Vec<f64> = cand.iter().map(|&v| v as f64).collect();
        let mut mass: f64 = vandermonde(&floats);
        for (i, &v) in pts.iter().enumerate() {
            mass *= if (mask >> i) & 1 == 0 { (top - v) as f64 } else { v as f64 };
        }
        masses.push(mass);
    }
    let mask = draw_candidate(&masses, rng).ok_or(ChainError::EmptySupport)?;
    let chosen: Vec<i64> =
        pts.iter().enumerate().map(|(i, &v)| v - ((mask >> i) & 1) as i64).collect();
    ParticleConfig::new(chosen, m - 1, p).map_err(|_| ChainError::EmptySupport)
}

/// Samples the up chain from the packed level-0 configuration
/// {0,…,p−1} to the target level; the marginal at level N is P_N.
pub fn sample_up_chain<R: Rng + ?Sized>(
    params: &ModelParams,
    n_target: usize,
    rng: &mut R,
) -> Result<Vec<ParticleConfig>, ChainError> {
    let p = params.p();
    let mut current = ParticleConfig::new((0..p as i64).collect(), 0, p)
        .expect("packed configuration is valid");
    let mut out = Vec::with_capacity(n_target + 1);
    out.push(current.clone());
    for _ in 0..n_target {
        current = up_step_sample(params, &current, rng)?;
        out.push(current.clone());
    }
    Ok(out)
}

/// Samples the stationary up-down trajectory at level N. One step is
/// an up move to level N+1 followed by a down move back. `init = None`
/// draws the start from P_N through the up chain.
pub fn sample_updown_trajectory<R: Rng + ?Sized>(
    params: &ModelParams,
    n: usize,
    steps: usize,
    rng: &mut R,
    init: Option<&ParticleConfig>,
) -> Result<Vec<ParticleConfig>, ChainError> {
    let p = params.p();
    let mut current = match init {
        Some(cfg) => {
            check_box(cfg, n, p)?;
            cfg.clone()
        }
        None => sample_up_chain(params, n, rng)?.pop().expect("nonempty chain"),
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(current.clone());
    for _ in 0..steps {
        let lifted = up_step_sample(params, &current, rng)?;
        current = down_step_sample(&lifted, rng)?;
        out.push(current.clone());
    }
    Ok(out)
}

/// State of one up-down chain trajectory with its own reproducible
/// random stream.
#[derive(Debug, Clone)]
pub struct ChainState {
    config: ParticleConfig,
    time: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl ChainState {
    /// Starts from an exact stationary draw on stream `stream` of the
    /// generator seeded by `seed`.
    pub fn new_stationary(
        params: &ModelParams,
        n: usize,
        seed: u64,
        stream: u64,
    ) -> Result<Self, ChainError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let config = sample_up_chain(params, n, &mut rng)?.pop().expect("nonempty chain");
        Ok(ChainState { config, time: 0, stream, rng })
    }

    /// Starts from a fixed configuration.
    pub fn new_fixed(config: ParticleConfig, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ChainState { config, time: 0, stream, rng }
    }

    pub fn config(&self) -> &ParticleConfig {
        &self.config
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Advances one up-down step in place.
    pub fn step_updown(&mut self, params: &ModelParams) -> Result<(), ChainError> {
        let lifted = up_step_sample(params, &self.config, &mut self.rng)?;
        self.config = down_step_sample(&lifted, &mut self.rng)?;
        self.time += 1;
        Ok(())
    }
}
