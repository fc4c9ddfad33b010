//! Probability measures of the model: the general coherent measures
//! M_N^{z,w,z',w'} on signatures (integer z, w), their particle
//! pushforward P_N with the Hahn weight w_N, and the limiting density
//! ρ_{p,z',w'} on the Weyl chamber.

use crate::gt::{enumerate_signatures, to_particles, vandermonde, ParticleConfig, Signature};
use crate::orthopoly::quadrature::{default_order, gauss_jacobi_rule};
use crate::params::ModelParams;
use crate::scalar::{gamma_int, pochhammer, rat, Rat};
use num_rational::BigRational;
use num_traits::{One, Zero};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("configuration box ({n}, {p}) does not match the ensemble box ({en}, {ep})")]
    BoxMismatch { n: usize, p: usize, en: usize, ep: usize },
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("exact evaluation needs integer z', w'")]
    NotIntegral,
    #[error("coordinates {a} and {b} round to the same lattice site {site}")]
    RoundingCollision { a: f64, b: f64, site: i64 },
    #[error("point outside the open chamber: {0:?}")]
    OutsideChamber(Vec<f64>),
    #[error("signature does not fit the particle box")]
    BadSignature,
}

/// Hahn orthogonality weight
/// w_N(x) = Γ(z'+N−x)Γ(w'+x+1) / (Γ(N+p−x)Γ(x+1)),
/// as an exact rational; needs integer parameters.
pub fn weight_exact(params: &ModelParams, n: usize, x: usize) -> Rat {
    let (z, w, p) = (params.z_int(), params.w_int(), params.p() as i64);
    let (n, x) = (n as i64, x as i64);
    let num = gamma_int(z + n - x) * gamma_int(w + x + 1);
    let den = gamma_int(n + p - x) * gamma_int(x + 1);
    BigRational::new(num, den)
}

/// ln w_N(x) for arbitrary admissible real parameters.
pub fn ln_weight(params: &ModelParams, n: usize, x: usize) -> f64 {
    let (z, w, p) = (params.z_prime(), params.w_prime(), params.p() as f64);
    let (n, x) = (n as f64, x as f64);
    ln_gamma(z + n - x) + ln_gamma(w + x + 1.0) - ln_gamma(n + p - x) - ln_gamma(x + 1.0)
}

/// One-time law of the particle process at level N:
/// P_N(X) = Z_N · V²(X) ∏ᵢ w_N(xᵢ) with the closed-form normalization
/// Z_N = ∏_{i=1}^N (i)_p/(z'+w'+i)_p · ∏_{i=1}^p 1/(Γ(w'+i)Γ(z'−i+1)),
/// symmetric under (w', z'−p) exchange like the weight itself.
#[derive(Debug, Clone)]
pub struct DiscreteEnsemble {
    params: ModelParams,
    n: usize,
    z_exact: Option<Rat>,
    ln_z: f64,
}

impl DiscreteEnsemble {
    pub fn new(params: ModelParams, n: usize) -> Self {
        let z_exact = params.is_integral().then(|| z_closed_form_exact(&params, n));
        let ln_z = ln_z_closed_form(&params, n);
        DiscreteEnsemble { params, n, z_exact, ln_z }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn level(&self) -> usize {
        self.n
    }

    /// Exact normalization constant Z_N.
    pub fn z_exact(&self) -> Result<&Rat, EnsembleError> {
        self.z_exact.as_ref().ok_or(EnsembleError::NotIntegral)
    }

    pub fn ln_z(&self) -> f64 {
        self.ln_z
    }

    fn check_box(&self, x: &ParticleConfig) -> Result<(), EnsembleError> {
        if x.level() != self.n || x.p() != self.params.p() {
            return Err(EnsembleError::BoxMismatch {
                n: x.level(),
                p: x.p(),
                en: self.n,
                ep: self.params.p(),
            });
        }
        Ok(())
    }

    /// Exact mass P_N(X).
    pub fn prob_exact(&self, x: &ParticleConfig) -> Result<Rat, EnsembleError> {
        self.check_box(x)?;
        let z = self.z_exact()?;
        let pts: Vec<Rat> = x.points().iter().map(|&v| rat(v)).collect();
        let v = vandermonde(&pts);
        let mut mass = z.clone() * &v * &v;
        for &pt in x.points() {
            mass *= weight_exact(&self.params, self.n, pt as usize);
        }
        Ok(mass)
    }

    /// ln P_N(X); the float path, safe for N in the hundreds.
    pub fn ln_prob(&self, x: &ParticleConfig) -> Result<f64, EnsembleError> {
        self.check_box(x)?;
        let pts: Vec<f64> = x.points().iter().map(|&v| v as f64).collect();
        let mut ln_v = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                ln_v += (pts[j] - pts[i]).ln();
            }
        }
        let ln_w: f64 = x
            .points()
            .iter()
            .map(|&pt| ln_weight(&self.params, self.n, pt as usize))
            .sum();
        Ok(self.ln_z + 2.0 * ln_v + ln_w)
    }
}

fn z_closed_form_exact(params: &ModelParams, n: usize) -> Rat {
    let p = params.p();
    let (z, w) = (params.z_int(), params.w_int());
    let mut acc = Rat::one();
    for i in 1..=n as i64 {
        acc *= pochhammer(rat(i), p) / pochhammer(rat(z + w + i), p);
    }
    for i in 1..=p as i64 {
        acc /= BigRational::from_integer(gamma_int(w + i) * gamma_int(z - i + 1));
    }
    acc
}

fn ln_z_closed_form(params: &ModelParams, n: usize) -> f64 {
    let p = params.p() as f64;
    let (z, w) = (params.z_prime(), params.w_prime());
    let mut acc = 0.0;
    for i in 1..=n {
        let i = i as f64;
        acc += ln_gamma(i + p) - ln_gamma(i) - ln_gamma(z + w + i + p) + ln_gamma(z + w + i);
    }
    for i in 1..=params.p() {
        let i = i as f64;
        acc -= ln_gamma(w + i) + ln_gamma(z - i + 1.0);
    }
    acc
}

/// General coherent measure M_N^{z,w,z',w'} with integer parameters
/// z = k, w = l, admissible when k+l ≥ 0, z'−k > −1, w'−l > −1:
/// M_N(λ) = S_N⁻¹ Dim²(λ) ∏ᵢ 1/(Γ(k−λᵢ+i)Γ(l+N+1+λᵢ−i)Γ(z'−λᵢ+i)Γ(w'+N+1+λᵢ−i)).
///
/// The support is the box −l ≤ λ_N ≤ … ≤ λ_1 ≤ k.
#[derive(Debug, Clone)]
pub struct GeneralZWMeasure {
    k: i64,
    l: i64,
    z_prime: i64,
    w_prime: i64,
    n: usize,
    s_n: Rat,
}

impl GeneralZWMeasure {
    pub fn new(k: i64, l: i64, z_prime: i64, w_prime: i64, n: usize) -> Result<Self, EnsembleError> {
        if k + l < 0 || z_prime - k <= -1 || w_prime - l <= -1 {
            return Err(EnsembleError::Inadmissible(format!(
                "need k+l ≥ 0, z'−k > −1, w'−l > −1; got (k,l,z',w') = ({k}, {l}, {z_prime}, {w_prime})"
            )));
        }
        let s_n = s_closed_form(k, l, z_prime, w_prime, n);
        Ok(GeneralZWMeasure { k, l, z_prime, w_prime, n, s_n })
    }

    /// The measure attached to the particle model: (z,w) = (p,0).
    pub fn for_params(params: &ModelParams, n: usize) -> Result<Self, EnsembleError> {
        if !params.is_integral() {
            return Err(EnsembleError::NotIntegral);
        }
        GeneralZWMeasure::new(params.p() as i64, 0, params.z_int(), params.w_int(), n)
    }

    pub fn level(&self) -> usize {
        self.n
    }

    /// Normalization constant
    /// S_N = ∏ᵢ₌₁ᴺ Γ(z+w+z'+w'+i)/(Γ(z+w+i)Γ(z+w'+i)Γ(z'+w+i)Γ(z'+w'+i)Γ(i)).
    pub fn normalization(&self) -> &Rat {
        &self.s_n
    }

    /// Exact mass of λ; zero outside the support box by the poles of 1/Γ.
    pub fn prob(&self, lambda: &Signature) -> Result<Rat, EnsembleError> {
        if lambda.level() != self.n {
            return Err(EnsembleError::BoxMismatch {
                n: lambda.level(),
                p: 0,
                en: self.n,
                ep: 0,
            });
        }
        let parts = lambda.parts();
        let in_support = parts.first().map_or(true, |&top| top <= self.k)
            && parts.last().map_or(true, |&bot| bot >= -self.l);
        if !in_support {
            return Ok(Rat::zero());
        }
        let d = crate::gt::dim(lambda);
        let mut mass = BigRational::from_integer(d.clone() * d) / &self.s_n;
        let n = self.n as i64;
        for (idx, &li) in parts.iter().enumerate() {
            let i = idx as i64 + 1;
            let den = gamma_int(self.k - li + i)
                * gamma_int(self.l + n + 1 + li - i)
                * gamma_int(self.z_prime - li + i)
                * gamma_int(self.w_prime + n + 1 + li - i);
            mass /= BigRational::from_integer(den);
        }
        Ok(mass)
    }

    /// All signatures carrying positive mass, sorted.
    pub fn support(&self) -> Vec<Signature> {
        enumerate_signatures(self.n, -self.l, self.k)
    }

    /// The parameter shift (k,l,z',w',λ) ↦ (k+n, l−n, z'+n, w'−n, λ+n)
    /// leaving all masses invariant.
    pub fn shifted(&self, shift: i64) -> GeneralZWMeasure {
        GeneralZWMeasure::new(
            self.k + shift,
            self.l - shift,
            self.z_prime + shift,
            self.w_prime - shift,
            self.n,
        )
        .expect("shift preserves admissibility")
    }
}

fn s_closed_form(k: i64, l: i64, zp: i64, wp: i64, n: usize) -> Rat {
    let mut acc = Rat::one();
    for i in 1..=n as i64 {
        let num = gamma_int(k + l + zp + wp + i);
        let den = gamma_int(k + l + i)
            * gamma_int(k + wp + i)
            * gamma_int(zp + l + i)
            * gamma_int(zp + wp + i)
            * gamma_int(i);
        acc *= BigRational::new(num, den);
    }
    acc
}

/// Limiting ensemble on the chamber 0 < x₁ < … < x_p < 1 with density
/// ρ(X) = B · ∏_{i<j}(x_j−x_i)² ∏ᵢ xᵢ^{w'} (1−xᵢ)^{z'−p}.
///
/// B has no closed form here; it is fixed by tensor Gauss-Jacobi
/// quadrature over the cube divided by p! (the integrand is symmetric).
#[derive(Debug, Clone)]
pub struct LimitEnsemble {
    params: ModelParams,
    b: f64,
}

impl LimitEnsemble {
    pub fn new(params: ModelParams) -> Self {
        let order = default_order(2 * (params.p() - 1));
        let b = 1.0 / chamber_mass(&params, order);
        LimitEnsemble { params, b }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Normalization constant B.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Density at X w.r.t. Lebesgue measure on the ordered chamber;
    /// zero off the chamber.
    pub fn density(&self, xs: &[f64]) -> f64 {
        assert_eq!(xs.len(), self.params.p(), "dimension mismatch");
        let strictly_increasing = xs.windows(2).all(|w| w[0] < w[1]);
        if !strictly_increasing || xs.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return 0.0;
        }
        let v: f64 = vandermonde(xs);
        let a = self.params.z_prime() - self.params.p() as f64;
        let b = self.params.w_prime();
        let w: f64 = xs.iter().map(|&x| x.powf(b) * (1.0 - x).powf(a)).product();
        self.b * v * v * w
    }

    /// Compares the rescaled lattice law with the limit density:
    /// returns ((N+p−1)^p · P_N(round((N+p−1)·X)), ρ(X)).
    ///
    /// Rounding is nearest-integer, half up. Coordinates that collide on
    /// one site or leave the box are rejected.
    pub fn discrete_to_continuum_check(
        &self,
        n: usize,
        xs: &[f64],
    ) -> Result<(f64, f64), EnsembleError> {
        let p = self.params.p();
        assert_eq!(xs.len(), p, "dimension mismatch");
        if !xs.windows(2).all(|w| w[0] < w[1]) || xs.iter().any(|&x| !(0.0 < x && x < 1.0)) {
            return Err(EnsembleError::OutsideChamber(xs.to_vec()));
        }
        let scale = (n + p - 1) as f64;
        let mut sites: Vec<i64> = Vec::with_capacity(p);
        let mut prev_x = f64::NAN;
        for &x in xs {
            let site = (scale * x + 0.5).floor() as i64;
            if sites.last() == Some(&site) {
                return Err(EnsembleError::RoundingCollision { a: prev_x, b: x, site });
            }
            sites.push(site);
            prev_x = x;
        }
        let config = ParticleConfig::new(sites, n, p)
            .map_err(|_| EnsembleError::OutsideChamber(xs.to_vec()))?;
        let discrete = DiscreteEnsemble::new(self.params.clone(), n);
        let lattice = (p as f64 * scale.ln() + discrete.ln_prob(&config)?).exp();
        Ok((lattice, self.density(xs)))
    }
}

/// ∫ over the ordered chamber of V²(X) ∏ᵢ xᵢ^{w'}(1−xᵢ)^{z'−p} dX,
/// via symmetrized tensor quadrature: cube integral divided by p!.
pub fn chamber_mass(params: &ModelParams, order: usize) -> f64 {
    let p = params.p();
    let alpha = params.z_prime() - p as f64;
    let beta = params.w_prime();
    let rule = gauss_jacobi_rule(alpha, beta, order).expect("admissible parameters");
    let mut acc = 0.0;
    let mut idx = vec![0usize; p];
    loop {
        let mut wprod = 1.0;
        for &i in &idx {
            wprod *= rule.weights()[i];
        }
        let xs: Vec<f64> = idx.iter().map(|&i| rule.nodes()[i]).collect();
        let v: f64 = vandermonde(&xs);
        acc += wprod * v * v;
        // odometer over the p-fold tensor grid
        let mut k = 0;
        while k < p {
            idx[k] += 1;
            if idx[k] < rule.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == p {
            break;
        }
    }
    let mut p_fact = 1.0;
    for i in 2..=p {
        p_fact *= i as f64;
    }
    acc / p_fact
}

/// Coherency check data: Σ_μ p↓(λ|μ) M_{N+1}(μ) over the level-(N+1)
/// support, to compare with M_N(λ). The down probability is the
/// dimension ratio Dim(λ)/Dim(μ) for interlacing pairs.
pub fn coherency_sum(
    meas_above: &GeneralZWMeasure,
    lambda: &Signature,
) -> Result<Rat, EnsembleError> {
    let mut acc = Rat::zero();
    for mu in meas_above.support() {
        if crate::gt::interlaces(lambda, &mu).unwrap_or(false) {
            let ratio = BigRational::new(crate::gt::dim(lambda), crate::gt::dim(&mu));
            acc += ratio * meas_above.prob(&mu)?;
        }
    }
    Ok(acc)
}

/// Pushforward identity helper: mass of λ under M_N^{p,0,z',w'} computed
/// through the particle law P_N(X(λ)).
pub fn pushforward_prob(
    ensemble: &DiscreteEnsemble,
    lambda: &Signature,
) -> Result<Rat, EnsembleError> {
    let x = to_particles(lambda, ensemble.params().p()).map_err(|_| EnsembleError::BadSignature)?;
    ensemble.prob_exact(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gt::enumerate_configs;
    use crate::params::ArithmeticMode;
    use crate::scalar::{rat_to_f64, ratio};

    fn params(p: usize, z: f64, w: f64) -> ModelParams {
        ModelParams::new(p, z, w, ArithmeticMode::Exact).unwrap()
    }

    #[test]
    fn unit_weight_case() {
        // p=1, z'=1, w'=0, N=2: w ≡ 1 and the law is uniform 1/3
        let pr = params(1, 1.0, 0.0);
        for x in 0..3 {
            assert_eq!(weight_exact(&pr, 2, x), rat(1));
        }
        let ens = DiscreteEnsemble::new(pr, 2);
        assert_eq!(*ens.z_exact().unwrap(), ratio(1, 3));
        for cfg in enumerate_configs(2, 1) {
            assert_eq!(ens.prob_exact(&cfg).unwrap(), ratio(1, 3));
        }
    }

    #[test]
    fn linear_weight_case() {
        // p=1, z'=2, w'=0, N=2: w(x) = 3−x
        let pr = params(1, 2.0, 0.0);
        for x in 0..3usize {
            assert_eq!(weight_exact(&pr, 2, x), rat(3 - x as i64));
        }
    }

    #[test]
    fn ln_weight_matches_exact() {
        let pr = params(2, 3.0, 1.0);
        for x in 0..6usize {
            let e = rat_to_f64(&weight_exact(&pr, 4, x));
            let f = ln_weight(&pr, 4, x).exp();
            assert!((e - f).abs() / e < 1e-12, "x={x}");
        }
    }

    #[test]
    fn masses_sum_to_one() {
        for (p, z, w, n) in [(1, 1.0, 0.0, 4), (2, 3.0, 1.0, 3), (3, 4.0, 2.0, 2)] {
            let ens = DiscreteEnsemble::new(params(p, z, w), n);
            let total = enumerate_configs(n, p)
                .iter()
                .fold(Rat::zero(), |acc, c| acc + ens.prob_exact(c).unwrap());
            assert_eq!(total, rat(1), "p={p} z'={z} w'={w} N={n}");
        }
    }

    #[test]
    fn z_matches_brute_force() {
        let pr = params(2, 3.0, 1.0);
        let n = 3;
        let ens = DiscreteEnsemble::new(pr.clone(), n);
        let mut brute = Rat::zero();
        for cfg in enumerate_configs(n, 2) {
            let pts: Vec<Rat> = cfg.points().iter().map(|&v| rat(v)).collect();
            let v = vandermonde(&pts);
            let mut term = v.clone() * v;
            for &pt in cfg.points() {
                term *= weight_exact(&pr, n, pt as usize);
            }
            brute += term;
        }
        assert_eq!(z_closed_form_exact(&pr, n) * brute, rat(1));
        assert_eq!(*ens.z_exact().unwrap(), z_closed_form_exact(&pr, n));
    }

    #[test]
    fn general_measure_matches_particle_law() {
        let pr = params(2, 3.0, 1.0);
        let n = 3;
        let ens = DiscreteEnsemble::new(pr.clone(), n);
        let meas = GeneralZWMeasure::for_params(&pr, n).unwrap();
        let mut total = Rat::zero();
        for lambda in meas.support() {
            let direct = meas.prob(&lambda).unwrap();
            let via_particles = pushforward_prob(&ens, &lambda).unwrap();
            assert_eq!(direct, via_particles, "{lambda:?}");
            total += direct;
        }
        assert_eq!(total, rat(1));
    }

    #[test]
    fn shift_invariance() {
        let meas = GeneralZWMeasure::new(2, 0, 3, 1, 3).unwrap();
        for shift in [1i64, 2] {
            let shifted = meas.shifted(shift);
            for lambda in meas.support() {
                let moved: Vec<i64> = lambda.parts().iter().map(|&v| v + shift).collect();
                let moved = Signature::new(moved).unwrap();
                assert_eq!(
                    meas.prob(&lambda).unwrap(),
                    shifted.prob(&moved).unwrap(),
                    "shift={shift} {lambda:?}"
                );
            }
        }
    }

    #[test]
    fn inadmissible_rejected() {
        assert!(GeneralZWMeasure::new(1, -2, 3, 1, 2).is_err());
        assert!(GeneralZWMeasure::new(2, 0, 1, 0, 2).is_err());
        assert!(GeneralZWMeasure::new(2, 0, 3, -1, 2).is_err());
    }

    #[test]
    fn uniform_limit_density() {
        // p=1, z'=1, w'=0: ρ ≡ 1 on (0,1), B = 1
        let lim = LimitEnsemble::new(params(1, 1.0, 0.0));
        assert!((lim.b() - 1.0).abs() < 1e-12);
        for &x in &[0.1, 0.5, 0.9] {
            assert!((lim.density(&[x]) - 1.0).abs() < 1e-12);
        }
        assert_eq!(lim.density(&[1.2]), 0.0);
    }

    #[test]
    fn density_reflection_symmetry() {
        // w' = z'−p makes the weight symmetric under x ↦ 1−x
        let lim = LimitEnsemble::new(params(2, 3.0, 1.0));
        let xs = [0.2, 0.55];
        let reflected = [1.0 - 0.55, 1.0 - 0.2];
        let a = lim.density(&xs);
        let b = lim.density(&reflected);
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn off_chamber_density_zero() {
        let lim = LimitEnsemble::new(params(2, 3.0, 1.0));
        assert_eq!(lim.density(&[0.5, 0.2]), 0.0);
        assert_eq!(lim.density(&[0.3, 0.3]), 0.0);
    }

    #[test]
    fn continuum_check_uniform_ratio() {
        // p=1, z'=1, w'=0: lattice side is exactly N/(N+1)
        let lim = LimitEnsemble::new(params(1, 1.0, 0.0));
        for n in [10usize, 50] {
            let (lattice, limit) = lim.discrete_to_continuum_check(n, &[0.37]).unwrap();
            assert!((lattice - n as f64 / (n as f64 + 1.0)).abs() < 1e-12);
            assert!((limit - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn continuum_check_rejects_collisions() {
        let lim = LimitEnsemble::new(params(2, 3.0, 1.0));
        let r = lim.discrete_to_continuum_check(10, &[0.500, 0.501]);
        assert!(matches!(r, Err(EnsembleError::RoundingCollision { .. })));
    }

    #[test]
    fn coherency_small_case() {
        let meas_above = GeneralZWMeasure::new(2, 0, 3, 1, 3).unwrap();
        let meas = GeneralZWMeasure::new(2, 0, 3, 1, 2).unwrap();
        for lambda in meas.support() {
            assert_eq!(
                coherency_sum(&meas_above, &lambda).unwrap(),
                meas.prob(&lambda).unwrap(),
                "{lambda:?}"
            );
        }
    }
}
