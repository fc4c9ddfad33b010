//! The N→∞ limit: the eigenvalue schedule K(i) of the non-colliding Jacobi
//! diffusion, its heat kernel 𝒥ᵗ and transition density 𝒫ᵗ, multi-time joint
//! densities, the extended space-time correlation kernel, the semigroup
//! action on multi-dimensional Jacobi polynomials, the generator in
//! h-transform and drift form, and the Vandermonde identities behind the
//! Doob interpretation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ensembles::LimitEnsemble;
use crate::orthopoly::jacobi::{
    jacobi_coeffs, jacobi_values_upto, multidim_jacobi, JacobiBasis,
};
use crate::orthopoly::quadrature::gauss_jacobi_rule;
use crate::orthopoly::OrthoError;
use crate::params::ModelParams;
use crate::polycalc::{vandermonde_poly, MultiPoly};
use crate::scalar::{det_small, rat, rat_from_f64, rat_to_f64, ratio, Rat};
use num_traits::Zero;

/// Hard cap on retained series terms per evaluation.
const SERIES_CAP: usize = 2000;
/// Sample count for the empirical sup-norm bounds M_i.
const BOUND_GRID: usize = 48;
/// Default compact margin [δ, 1−δ] for the bounds; widened when evaluation
/// points fall outside.
const INTERIOR_MARGIN: f64 = 0.02;

#[derive(Debug, Error)]
pub enum LimitError {
    #[error("time gap must be positive and finite, got {0}")]
    NonPositiveTime(f64),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("point {0:?} must lie in (0,1) with strictly increasing coordinates")]
    OutsideChamber(Vec<f64>),
    #[error("conditioning configuration has zero stationary density")]
    ZeroDensity,
    #[error("series truncation reached {terms} terms with bound {bound:e} above target {target:e}")]
    Truncation { terms: usize, bound: f64, target: f64 },
    #[error("partition parts must be non-increasing with at most p nonzero entries, got {0:?}")]
    BadPartition(Vec<usize>),
    #[error("times must be strictly increasing and finite, got {0:?}")]
    BadTimes(Vec<f64>),
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("function of {got} variables does not match p = {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("drift form is singular at coincident coordinates for this function")]
    CoincidentSingularity,
    #[error(transparent)]
    Ortho(#[from] OrthoError),
}

/// Eigenvalue schedule K(i) = i(i + w′ + z′ + 1 − p) of the limit dynamics.
#[derive(Debug, Clone)]
pub struct EigenSchedule {
    params: ModelParams,
    shift: f64,
}

impl EigenSchedule {
    pub fn new(params: ModelParams) -> Self {
        let shift = params.w_prime() + params.z_prime() + 1.0 - params.p() as f64;
        EigenSchedule { params, shift }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// K(i).
    pub fn value(&self, i: usize) -> f64 {
        let i = i as f64;
        i * (i + self.shift)
    }

    /// K(i) with the parameters taken at their exact dyadic values.
    pub fn value_exact(&self, i: usize) -> Rat {
        let shift = rat_from_f64(self.params.w_prime()) + rat_from_f64(self.params.z_prime())
            + rat(1)
            - rat(self.params.p() as i64);
        rat(i as i64) * (rat(i as i64) + shift)
    }

    /// Total K = Σ_{i<p} K(i).
    pub fn total(&self) -> f64 {
        (0..self.params.p()).map(|i| self.value(i)).sum()
    }

    pub fn total_exact(&self) -> Rat {
        (0..self.params.p()).fold(Rat::zero(), |acc, i| acc + self.value_exact(i))
    }

    /// Closed form p(p−1)/2 · (−(p−2)/3 + w′ + z′).
    pub fn total_closed_form(&self) -> f64 {
        let p = self.params.p() as f64;
        p * (p - 1.0) / 2.0
            * (-(p - 2.0) / 3.0 + self.params.w_prime() + self.params.z_prime())
    }

    pub fn total_closed_form_exact(&self) -> Rat {
        let p = rat(self.params.p() as i64);
        p.clone() * (p.clone() - rat(1)) / rat(2)
            * (-(p - rat(2)) / rat(3)
                + rat_from_f64(self.params.w_prime())
                + rat_from_f64(self.params.z_prime()))
    }
}

/// K(i) for the given parameters.
pub fn eigen_k(params: &ModelParams, i: usize) -> f64 {
    EigenSchedule::new(params.clone()).value(i)
}

/// Σ_{i<p} K(i).
pub fn total_k(params: &ModelParams) -> f64 {
    EigenSchedule::new(params.clone()).total()
}

/// Partition λ₁ ≥ … ≥ λ_p ≥ 0 indexing multi-dimensional Jacobi
/// polynomials; stored with exactly p parts, padded by zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: &[usize], p: usize) -> Result<Self, LimitError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(LimitError::BadPartition(parts.to_vec()));
        }
        if parts.len() > p && parts[p..].iter().any(|&x| x > 0) {
            return Err(LimitError::BadPartition(parts.to_vec()));
        }
        let mut padded = vec![0usize; p];
        for (slot, &v) in padded.iter_mut().zip(parts) {
            *slot = v;
        }
        Ok(Partition { parts: padded })
    }

    pub fn zero(p: usize) -> Self {
        Partition { parts: vec![0; p] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn p(&self) -> usize {
        self.parts.len()
    }

    /// |λ| = Σ λᵢ.
    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|&x| x == 0)
    }
}

/// Generator eigenvalue c̃(λ) = Σ_{i=1}^p [K(p−i) − K(λᵢ+p−i)].
pub fn generator_eigenvalue(params: &ModelParams, lambda: &Partition) -> f64 {
    rat_to_f64(&generator_eigenvalue_exact(params, lambda))
}

pub fn generator_eigenvalue_exact(params: &ModelParams, lambda: &Partition) -> Rat {
    assert_eq!(lambda.p(), params.p(), "partition length must equal p");
    let sched = EigenSchedule::new(params.clone());
    let p = params.p();
    (0..p).fold(Rat::zero(), |acc, i| {
        acc + sched.value_exact(p - 1 - i) - sched.value_exact(lambda.parts()[i] + p - 1 - i)
    })
}

/// Semigroup eigenvalue c(λ,t) = e^{t·c̃(λ)}.
pub fn semigroup_eigenvalue(params: &ModelParams, lambda: &Partition, t: f64) -> f64 {
    (t * generator_eigenvalue(params, lambda)).exp()
}

fn require_unit_interior(v: f64) -> Result<(), LimitError> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(LimitError::OutsideChamber(vec![v]))
    }
}

fn interior_margin(coords: impl Iterator<Item = f64>) -> (f64, bool) {
    let mut delta = INTERIOR_MARGIN;
    let mut widened = false;
    for c in coords {
        let d = c.min(1.0 - c);
        if d < delta {
            delta = d;
            widened = true;
        }
    }
    (delta, widened)
}

/// max over a [δ, 1−δ] grid of |j^k|, for every degree k ≤ max_deg.
fn orthonormal_bounds(
    basis: &JacobiBasis,
    max_deg: usize,
    delta: f64,
) -> Result<Vec<f64>, OrthoError> {
    let mut bounds = vec![0.0f64; max_deg + 1];
    for k in 0..BOUND_GRID {
        let g = delta + (1.0 - 2.0 * delta) * k as f64 / (BOUND_GRID - 1) as f64;
        for (i, v) in basis.orthonormal_values_upto(max_deg, g)?.iter().enumerate() {
            bounds[i] = bounds[i].max(v.abs());
        }
    }
    Ok(bounds)
}

struct SeriesSum {
    values: Vec<f64>,
    terms: usize,
    tail_bound: f64,
    widened: bool,
}

fn coord_array(
    c: f64,
    basis: &JacobiBasis,
    hi: usize,
    ids: &mut HashMap<u64, usize>,
    arrays: &mut Vec<Vec<f64>>,
) -> Result<usize, OrthoError> {
    if let Some(&id) = ids.get(&c.to_bits()) {
        return Ok(id);
    }
    arrays.push(basis.orthonormal_values_upto(hi, c)?);
    ids.insert(c.to_bits(), arrays.len() - 1);
    Ok(arrays.len() - 1)
}

/// Σ_{i≥start} decay(i)·j^i(x)·j^i(y) for each pair, truncated when the term
/// bound decay(i)·M_i drops below tol·(max partial magnitude + tol).
fn weighted_series(
    basis: &JacobiBasis,
    decay: &dyn Fn(usize) -> f64,
    start: usize,
    pairs: &[(f64, f64)],
    tol: f64,
) -> Result<SeriesSum, LimitError> {
    if !(tol > 0.0) {
        return Err(LimitError::BadTolerance(tol));
    }
    for &(x, y) in pairs {
        require_unit_interior(x)?;
        require_unit_interior(y)?;
    }
    let (delta, widened) = interior_margin(pairs.iter().flat_map(|&(x, y)| [x, y]));
    let cap = (start + SERIES_CAP).min(basis.max_degree());
    let mut hi = (start + 128).min(cap);
    loop {
        let bounds = orthonormal_bounds(basis, hi, delta)?;
        let mut ids = HashMap::new();
        let mut arrays: Vec<Vec<f64>> = Vec::new();
        let mut pair_ids = Vec::with_capacity(pairs.len());
        for &(x, y) in pairs {
            let ix = coord_array(x, basis, hi, &mut ids, &mut arrays)?;
            let iy = coord_array(y, basis, hi, &mut ids, &mut arrays)?;
            pair_ids.push((ix, iy));
        }
        let mut values = vec![0.0f64; pairs.len()];
        let mut reached = None;
        let mut last = (0usize, f64::INFINITY, tol * tol);
        for i in start..=hi {
            let d = decay(i);
            let bound = d.abs() * bounds[i];
            let partial = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            let target = tol * (partial + tol);
            if bound < target {
                reached = Some((i - start, bound));
                break;
            }
            last = (i - start + 1, bound, target);
            for (k, &(ix, iy)) in pair_ids.iter().enumerate() {
                values[k] += d * arrays[ix][i] * arrays[iy][i];
            }
        }
        match reached {
            Some((terms, tail_bound)) => {
                return Ok(SeriesSum { values, terms, tail_bound, widened })
            }
            None if hi == cap => {
                return Err(LimitError::Truncation {
                    terms: last.0,
                    bound: last.1,
                    target: last.2,
                })
            }
            None => {
                let width = hi - start;
                hi = (start + width * 2).min(cap);
            }
        }
    }
}

/// Smallest exclusive end L with decay(L)·M_L < tol; degrees start..L are
/// retained by the caller.
fn series_order_absolute(
    basis: &JacobiBasis,
    decay: &dyn Fn(usize) -> f64,
    start: usize,
    coords: &[f64],
    tol: f64,
) -> Result<usize, LimitError> {
    if !(tol > 0.0) {
        return Err(LimitError::BadTolerance(tol));
    }
    for &c in coords {
        require_unit_interior(c)?;
    }
    let (delta, _) = interior_margin(coords.iter().copied());
    let cap = (start + SERIES_CAP).min(basis.max_degree());
    let mut hi = (start + 128).min(cap);
    loop {
        let bounds = orthonormal_bounds(basis, hi, delta)?;
        for (i, bi) in bounds.iter().enumerate().take(hi + 1).skip(start) {
            if decay(i).abs() * bi < tol {
                return Ok(i);
            }
        }
        if hi == cap {
            let bound = decay(cap).abs() * bounds[cap];
            return Err(LimitError::Truncation { terms: cap - start, bound, target: tol });
        }
        let width = hi - start;
        hi = (start + width * 2).min(cap);
    }
}

/// Batch heat-kernel evaluation sharing one certified truncation order.
#[derive(Debug, Clone)]
pub struct HeatKernelEval {
    pub t: f64,
    /// Number of retained series terms.
    pub truncation: usize,
    /// One value per requested (x, y) pair.
    pub values: Vec<f64>,
    /// Term bound achieved at the stopping index.
    pub tail_bound: f64,
    /// True when points outside [0.02, 0.98] forced a wider bound window.
    pub widened: bool,
}

impl HeatKernelEval {
    pub fn compute(
        params: &ModelParams,
        t: f64,
        pairs: &[(f64, f64)],
        tol: f64,
    ) -> Result<Self, LimitError> {
        let basis = JacobiBasis::for_params(params, SERIES_CAP + params.p() + 8);
        let schedule = EigenSchedule::new(params.clone());
        Self::compute_with(&basis, &schedule, t, pairs, tol)
    }

    fn compute_with(
        basis: &JacobiBasis,
        schedule: &EigenSchedule,
        t: f64,
        pairs: &[(f64, f64)],
        tol: f64,
    ) -> Result<Self, LimitError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(LimitError::NonPositiveTime(t));
        }
        let decay = |i: usize| (-t * schedule.value(i)).exp();
        let sum = weighted_series(basis, &decay, 0, pairs, tol)?;
        Ok(HeatKernelEval {
            t,
            truncation: sum.terms,
            values: sum.values,
            tail_bound: sum.tail_bound,
            widened: sum.widened,
        })
    }
}

/// 𝒥ᵗ(x,y) = Σ_{i≥0} e^{−tK(i)} jⁱ(x) jⁱ(y).
pub fn heat_kernel(
    params: &ModelParams,
    t: f64,
    x: f64,
    y: f64,
    tol: f64,
) -> Result<f64, LimitError> {
    Ok(HeatKernelEval::compute(params, t, &[(x, y)], tol)?.values[0])
}

fn is_open_chamber(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x.is_finite() && x > 0.0 && x < 1.0)
        && xs.windows(2).all(|w| w[0] < w[1])
}

fn require_open_chamber(xs: &[f64]) -> Result<(), LimitError> {
    if is_open_chamber(xs) {
        Ok(())
    } else {
        Err(LimitError::OutsideChamber(xs.to_vec()))
    }
}

/// Σᵢ w′ ln xᵢ + (z′−p) ln(1−xᵢ).
fn ln_weight_product(params: &ModelParams, xs: &[f64]) -> f64 {
    let a = params.z_prime() - params.p() as f64;
    xs.iter()
        .map(|&x| params.w_prime() * x.ln() + a * (1.0 - x).ln())
        .sum()
}

/// ln of V(X)²·∏ xᵢ^{w′}(1−xᵢ)^{z′−p}, the unnormalized stationary density.
fn ln_density_kernel(params: &ModelParams, xs: &[f64]) -> f64 {
    let mut acc = ln_weight_product(params, xs);
    for (i, &xi) in xs.iter().enumerate() {
        for &xj in &xs[i + 1..] {
            acc += 2.0 * (xj - xi).ln();
        }
    }
    acc
}

fn vandermonde_value(xs: &[f64]) -> f64 {
    let mut v = 1.0;
    for (i, &xi) in xs.iter().enumerate() {
        for &xj in &xs[i + 1..] {
            v *= xj - xi;
        }
    }
    v
}

/// Visits all p-subsets of {0, …, n−1} in lexicographic order.
fn for_each_subset(n: usize, p: usize, mut f: impl FnMut(&[usize])) {
    if p == 0 {
        f(&[]);
        return;
    }
    if p > n {
        return;
    }
    let mut s: Vec<usize> = (0..p).collect();
    loop {
        f(&s);
        let mut k = p;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if s[k] < n - p + k {
                break;
            }
        }
        if s[k] == n - p + k {
            return;
        }
        s[k] += 1;
        for j in k + 1..p {
            s[j] = s[j - 1] + 1;
        }
    }
}

/// e^{tK}·det[𝒥ᵗ(xᵢ,yⱼ)] by Cauchy-Binet over retained degree subsets; every
/// subset weight e^{−t(ΣK(S) − K)} is ≤ 1, so the value stays well scaled at
/// every t and the t→∞ limit is exact.
fn scaled_kernel_det(
    basis: &JacobiBasis,
    schedule: &EigenSchedule,
    t: f64,
    xs: &[f64],
    ys: &[f64],
    tol: f64,
) -> Result<f64, LimitError> {
    let p = xs.len();
    let top = schedule.value(p - 1);
    let decay = |i: usize| (-t * (schedule.value(i) - top)).exp();
    let mut coords = xs.to_vec();
    coords.extend_from_slice(ys);
    let l = series_order_absolute(basis, &decay, 0, &coords, tol)?.max(p);
    let jx: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| basis.orthonormal_values_upto(l - 1, x))
        .collect::<Result<_, _>>()?;
    let jy: Vec<Vec<f64>> = ys
        .iter()
        .map(|&y| basis.orthonormal_values_upto(l - 1, y))
        .collect::<Result<_, _>>()?;
    let total = schedule.total();
    let mut minor_x = vec![vec![0.0f64; p]; p];
    let mut minor_y = vec![vec![0.0f64; p]; p];
    let mut acc = 0.0f64;
    for_each_subset(l, p, |s| {
        let k_sum: f64 = s.iter().map(|&i| schedule.value(i)).sum();
        let weight = (-t * (k_sum - total)).exp();
        for (a, &deg) in s.iter().enumerate() {
            for b in 0..p {
                minor_x[a][b] = jx[b][deg];
                minor_y[a][b] = jy[b][deg];
            }
        }
        acc += weight * det_small(&minor_x) * det_small(&minor_y);
    });
    Ok(acc)
}

fn transition_density_with(
    basis: &JacobiBasis,
    schedule: &EigenSchedule,
    t: f64,
    xs: &[f64],
    ys: &[f64],
    tol: f64,
) -> Result<f64, LimitError> {
    let params = schedule.params();
    let p = params.p();
    if !(t > 0.0 && t.is_finite()) {
        return Err(LimitError::NonPositiveTime(t));
    }
    if !(tol > 0.0) {
        return Err(LimitError::BadTolerance(tol));
    }
    if xs.len() != p {
        return Err(LimitError::LengthMismatch { expected: p, got: xs.len() });
    }
    if ys.len() != p {
        return Err(LimitError::LengthMismatch { expected: p, got: ys.len() });
    }
    if !is_open_chamber(xs) {
        return Err(LimitError::ZeroDensity);
    }
    if !is_open_chamber(ys) {
        return Ok(0.0);
    }
    let det = scaled_kernel_det(basis, schedule, t, xs, ys, 0.1 * tol)?;
    let pref = 0.5 * (ln_density_kernel(params, ys) - ln_density_kernel(params, xs));
    Ok(pref.exp() * det)
}

/// 𝒫ᵗ(Y|X) = √(ρ(Y)/ρ(X))·e^{tK}·det[𝒥ᵗ(xᵢ,yⱼ)].
pub fn transition_density(
    params: &ModelParams,
    t: f64,
    xs: &[f64],
    ys: &[f64],
    tol: f64,
) -> Result<f64, LimitError> {
    let basis = JacobiBasis::for_params(params, SERIES_CAP + params.p() + 8);
    let schedule = EigenSchedule::new(params.clone());
    transition_density_with(&basis, &schedule, t, xs, ys, tol)
}

struct KernelModes {
    l: usize,
    decay: Vec<f64>,
    inv_norm: Vec<f64>,
}

/// The limiting non-colliding Jacobi diffusion with cached stationary
/// normalization, Jacobi basis, and eigenvalue schedule.
#[derive(Debug, Clone)]
pub struct LimitProcess {
    ensemble: LimitEnsemble,
    basis: JacobiBasis,
    schedule: EigenSchedule,
}

impl LimitProcess {
    pub fn new(params: ModelParams) -> Self {
        let basis = JacobiBasis::for_params(&params, SERIES_CAP + params.p() + 8);
        let schedule = EigenSchedule::new(params.clone());
        let ensemble = LimitEnsemble::new(params);
        LimitProcess { ensemble, basis, schedule }
    }

    pub fn params(&self) -> &ModelParams {
        self.ensemble.params()
    }

    pub fn schedule(&self) -> &EigenSchedule {
        &self.schedule
    }

    pub fn basis(&self) -> &JacobiBasis {
        &self.basis
    }

    /// Stationary density ρ(X); zero off the open chamber.
    pub fn stationary_density(&self, xs: &[f64]) -> f64 {
        self.ensemble.density(xs)
    }

    pub fn heat_kernel(&self, t: f64, x: f64, y: f64, tol: f64) -> Result<f64, LimitError> {
        Ok(self.heat_kernel_eval(t, &[(x, y)], tol)?.values[0])
    }

    pub fn heat_kernel_eval(
        &self,
        t: f64,
        pairs: &[(f64, f64)],
        tol: f64,
    ) -> Result<HeatKernelEval, LimitError> {
        HeatKernelEval::compute_with(&self.basis, &self.schedule, t, pairs, tol)
    }

    pub fn transition_density(
        &self,
        t: f64,
        xs: &[f64],
        ys: &[f64],
        tol: f64,
    ) -> Result<f64, LimitError> {
        transition_density_with(&self.basis, &self.schedule, t, xs, ys, tol)
    }

    /// √ρ(X¹)·∏ⱼ e^{Δtⱼ·K}·det[𝒥^{Δtⱼ}(xʲᵢ, xʲ⁺¹ₖ)]·√ρ(Xⁿ).
    pub fn multi_time_density(
        &self,
        times: &[f64],
        configs: &[Vec<f64>],
        tol: f64,
    ) -> Result<f64, LimitError> {
        let p = self.params().p();
        if configs.len() != times.len() {
            return Err(LimitError::LengthMismatch {
                expected: times.len(),
                got: configs.len(),
            });
        }
        if times.is_empty()
            || times.iter().any(|t| !t.is_finite())
            || times.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(LimitError::BadTimes(times.to_vec()));
        }
        if !(tol > 0.0) {
            return Err(LimitError::BadTolerance(tol));
        }
        for c in configs {
            if c.len() != p {
                return Err(LimitError::LengthMismatch { expected: p, got: c.len() });
            }
        }
        if configs.iter().any(|c| !is_open_chamber(c)) {
            return Ok(0.0);
        }
        let first = configs.first().expect("nonempty");
        let last = configs.last().expect("nonempty");
        let ln_pref = self.ensemble.b().ln()
            + 0.5 * (ln_density_kernel(self.params(), first)
                + ln_density_kernel(self.params(), last));
        let mut dets = 1.0f64;
        for j in 0..times.len() - 1 {
            let dt = times[j + 1] - times[j];
            dets *= scaled_kernel_det(
                &self.basis,
                &self.schedule,
                dt,
                &configs[j],
                &configs[j + 1],
                0.1 * tol,
            )?;
        }
        Ok(ln_pref.exp() * dets)
    }

    /// Two-branch extended kernel: Σ_{i<p} e^{(t−s)K(i)} jⁱ(x)jⁱ(y) for
    /// t ≥ s, and −Σ_{i≥p} e^{(t−s)K(i)} jⁱ(x)jⁱ(y) for t < s.
    pub fn extended_kernel(
        &self,
        x: f64,
        t: f64,
        y: f64,
        s: f64,
        tol: f64,
    ) -> Result<f64, LimitError> {
        require_unit_interior(x)?;
        require_unit_interior(y)?;
        if !t.is_finite() || !s.is_finite() {
            return Err(LimitError::BadTimes(vec![t, s]));
        }
        let p = self.params().p();
        let u = t - s;
        if u >= 0.0 {
            let jx = self.basis.orthonormal_values_upto(p - 1, x)?;
            let jy = self.basis.orthonormal_values_upto(p - 1, y)?;
            Ok((0..p)
                .map(|i| (u * self.schedule.value(i)).exp() * jx[i] * jy[i])
                .sum())
        } else {
            let decay = |i: usize| (u * self.schedule.value(i)).exp();
            let sum = weighted_series(&self.basis, &decay, p, &[(x, y)], tol)?;
            Ok(-sum.values[0])
        }
    }

    /// ρ_n((x₁,t₁), …, (x_n,t_n)) = det[Ker(xᵢ,tᵢ; xⱼ,tⱼ)].
    pub fn correlation_fn(&self, points: &[(f64, f64)], tol: f64) -> Result<f64, LimitError> {
        let n = points.len();
        let mut m = vec![vec![0.0f64; n]; n];
        for (a, &(xa, ta)) in points.iter().enumerate() {
            for (b, &(xb, tb)) in points.iter().enumerate() {
                m[a][b] = self.extended_kernel(xa, ta, xb, tb, tol)?;
            }
        }
        Ok(det_small(&m))
    }

    fn kernel_modes(&self, t: f64, coords: &[f64], tol: f64, min_l: usize) -> Result<KernelModes, LimitError> {
        let decay_fn = |i: usize| (-t * self.schedule.value(i)).exp();
        let l = series_order_absolute(&self.basis, &decay_fn, 0, coords, tol)?.max(min_l);
        let decay: Vec<f64> = (0..l).map(decay_fn).collect();
        let inv_norm = (0..l)
            .map(|i| Ok((-self.basis.ln_norm(i)?).exp()))
            .collect::<Result<Vec<f64>, OrthoError>>()?;
        Ok(KernelModes { l, decay, inv_norm })
    }

    /// (∫Jac^λ(Y)·𝒫ᵗ(Y|X) dY by symmetrized Gauss-Jacobi quadrature,
    /// c(λ,t)·Jac^λ(X)).
    pub fn semigroup_apply_check(
        &self,
        lambda: &Partition,
        t: f64,
        xs: &[f64],
        tol: f64,
    ) -> Result<(f64, f64), LimitError> {
        let p = self.params().p();
        assert_eq!(lambda.p(), p, "partition length must equal p");
        if !(t > 0.0 && t.is_finite()) {
            return Err(LimitError::NonPositiveTime(t));
        }
        if !(tol > 0.0) {
            return Err(LimitError::BadTolerance(tol));
        }
        if xs.len() != p {
            return Err(LimitError::LengthMismatch { expected: p, got: xs.len() });
        }
        require_open_chamber(xs)?;
        let top = lambda.parts()[0] + p - 1;
        let modes = self.kernel_modes(t, xs, 0.1 * tol, top + 1)?;
        let order = (top + p + modes.l) / 2 + 8;
        let rule = gauss_jacobi_rule(self.basis.alpha(), self.basis.beta(), order)?;
        let maxdeg = (modes.l - 1).max(top);
        let node_vals: Vec<Vec<f64>> = rule
            .nodes()
            .iter()
            .map(|&v| jacobi_values_upto(self.basis.alpha(), self.basis.beta(), maxdeg, v))
            .collect();
        let x_vals: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| jacobi_values_upto(self.basis.alpha(), self.basis.beta(), modes.l - 1, x))
            .collect();
        // Andreief collapse of the p-fold cube integral: the (i,j) Gram entry
        // is ∫ Jac^{dᵢ}(y)·𝒥-column(xⱼ, y) against the weight.
        let mut m = vec![vec![0.0f64; p]; p];
        for (v, nv) in node_vals.iter().enumerate() {
            let wt = rule.weights()[v];
            for j in 0..p {
                let h: f64 = (0..modes.l)
                    .map(|k| modes.decay[k] * modes.inv_norm[k] * x_vals[j][k] * nv[k])
                    .sum();
                for i in 0..p {
                    let d = lambda.parts()[i] + p - 1 - i;
                    m[i][j] += wt * nv[d] * h;
                }
            }
        }
        let lhs = (t * self.schedule.total()).exp() * det_small(&m) / vandermonde_value(xs);
        let rhs = semigroup_eigenvalue(self.params(), lambda, t)
            * multidim_jacobi(&self.basis, lambda.parts(), xs);
        Ok((lhs, rhs))
    }

    /// ∫𝒫ᵗ(Y|X) dY by symmetrized Gauss-Jacobi quadrature.
    pub fn transition_normalization(
        &self,
        t: f64,
        xs: &[f64],
        tol: f64,
    ) -> Result<f64, LimitError> {
        let p = self.params().p();
        if !(t > 0.0 && t.is_finite()) {
            return Err(LimitError::NonPositiveTime(t));
        }
        if !(tol > 0.0) {
            return Err(LimitError::BadTolerance(tol));
        }
        if xs.len() != p {
            return Err(LimitError::LengthMismatch { expected: p, got: xs.len() });
        }
        require_open_chamber(xs)?;
        let modes = self.kernel_modes(t, xs, 0.1 * tol, p)?;
        let order = (p + modes.l) / 2 + 8;
        let rule = gauss_jacobi_rule(self.basis.alpha(), self.basis.beta(), order)?;
        let x_vals: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| jacobi_values_upto(self.basis.alpha(), self.basis.beta(), modes.l - 1, x))
            .collect();
        let mut m = vec![vec![0.0f64; p]; p];
        for (v, &node) in rule.nodes().iter().enumerate() {
            let wt = rule.weights()[v];
            let nv = jacobi_values_upto(self.basis.alpha(), self.basis.beta(), modes.l - 1, node);
            for j in 0..p {
                let h: f64 = (0..modes.l)
                    .map(|k| modes.decay[k] * modes.inv_norm[k] * x_vals[j][k] * nv[k])
                    .sum();
                for (i, row) in m.iter_mut().enumerate() {
                    row[j] += wt * node.powi(i as i32) * h;
                }
            }
        }
        Ok((t * self.schedule.total()).exp() * det_small(&m) / vandermonde_value(xs))
    }

    /// |∫ρ(X)·𝒫ᵗ(Y|X) dX − ρ(Y)| at fixed Y.
    pub fn stationarity_residual(&self, t: f64, ys: &[f64], tol: f64) -> Result<f64, LimitError> {
        let p = self.params().p();
        if !(t > 0.0 && t.is_finite()) {
            return Err(LimitError::NonPositiveTime(t));
        }
        if !(tol > 0.0) {
            return Err(LimitError::BadTolerance(tol));
        }
        if ys.len() != p {
            return Err(LimitError::LengthMismatch { expected: p, got: ys.len() });
        }
        require_open_chamber(ys)?;
        let modes = self.kernel_modes(t, ys, 0.1 * tol, p)?;
        let order = (p + modes.l) / 2 + 8;
        let rule = gauss_jacobi_rule(self.basis.alpha(), self.basis.beta(), order)?;
        let y_vals: Vec<Vec<f64>> = ys
            .iter()
            .map(|&y| jacobi_values_upto(self.basis.alpha(), self.basis.beta(), modes.l - 1, y))
            .collect();
        let mut m = vec![vec![0.0f64; p]; p];
        for (v, &node) in rule.nodes().iter().enumerate() {
            let wt = rule.weights()[v];
            let nv = jacobi_values_upto(self.basis.alpha(), self.basis.beta(), modes.l - 1, node);
            for j in 0..p {
                let h: f64 = (0..modes.l)
                    .map(|k| modes.decay[k] * modes.inv_norm[k] * nv[k] * y_vals[j][k])
                    .sum();
                for (i, row) in m.iter_mut().enumerate() {
                    row[j] += wt * node.powi(i as i32) * h;
                }
            }
        }
        let integral = (t * self.schedule.total()).exp()
            * self.ensemble.b()
            * vandermonde_value(ys)
            * ln_weight_product(self.params(), ys).exp()
            * det_small(&m);
        Ok((integral - self.stationary_density(ys)).abs())
    }
}

/// Extended kernel for ad hoc use; `LimitProcess::extended_kernel` avoids the
/// repeated basis setup.
pub fn extended_kernel(
    params: &ModelParams,
    x: f64,
    t: f64,
    y: f64,
    s: f64,
    tol: f64,
) -> Result<f64, LimitError> {
    LimitProcess::new(params.clone()).extended_kernel(x, t, y, s, tol)
}

/// Multi-dimensional Jacobi polynomial det[Jac^{λᵢ+p−i}(xⱼ)]/∏_{i>j}(xᵢ−xⱼ)
/// with exact rational coefficients.
pub fn multidim_jacobi_poly(params: &ModelParams, lambda: &Partition) -> MultiPoly {
    let p = params.p();
    assert_eq!(lambda.p(), p, "partition length must equal p");
    let alpha = rat_from_f64(params.z_prime()) - rat(p as i64);
    let beta = rat_from_f64(params.w_prime());
    let mat: Vec<Vec<MultiPoly>> = (0..p)
        .map(|i| {
            let coeffs = jacobi_coeffs(&alpha, &beta, lambda.parts()[i] + p - 1 - i);
            (0..p).map(|j| MultiPoly::univariate(p, j, &coeffs)).collect()
        })
        .collect();
    poly_det(&mat)
        .divide_by_vandermonde()
        .expect("alternating determinant is divisible by the Vandermonde")
}

fn poly_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let vars = m[0][0].vars();
    let mut acc = MultiPoly::zero(vars);
    for j in 0..n {
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&poly_det(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// 𝒟 f = Σᵢ xᵢ(1−xᵢ)∂ᵢ²f + (w′+1 − (w′+z′−p+2)xᵢ)∂ᵢf with exact
/// coefficients, over however many variables f has.
pub fn diffusion_operator(params: &ModelParams, f: &MultiPoly) -> MultiPoly {
    let m = f.vars();
    let w = rat_from_f64(params.w_prime());
    let z = rat_from_f64(params.z_prime());
    let lin0 = w.clone() + rat(1);
    let lin1 = w + z - rat(params.p() as i64) + rat(2);
    let mut acc = MultiPoly::zero(m);
    for i in 0..m {
        let xi = MultiPoly::var(m, i);
        let a = xi.mul(&MultiPoly::one(m).sub(&xi));
        let b = MultiPoly::constant(m, lin0.clone()).sub(&xi.scale(&lin1));
        acc = acc
            .add(&a.mul(&f.derive(i).derive(i)))
            .add(&b.mul(&f.derive(i)));
    }
    acc
}

/// Σᵢ (xᵢ² + a·xᵢ + b)∂ᵢ²f + (−(2/3)(m−2)xᵢ + c)∂ᵢf, the harmonicity
/// operator annihilating the Vandermonde for every a, b, c.
pub fn koenig_operator(a: &Rat, b: &Rat, c: &Rat, f: &MultiPoly) -> MultiPoly {
    let m = f.vars();
    let drift_slope = -ratio(2, 3) * (rat(m as i64) - rat(2));
    let mut acc = MultiPoly::zero(m);
    for i in 0..m {
        let xi = MultiPoly::var(m, i);
        let quad = xi.mul(&xi).add(&xi.scale(a)).add(&MultiPoly::constant(m, b.clone()));
        let drift = xi.scale(&drift_slope).add(&MultiPoly::constant(m, c.clone()));
        acc = acc
            .add(&quad.mul(&f.derive(i).derive(i)))
            .add(&drift.mul(&f.derive(i)));
    }
    acc
}

fn drift_form_exact(
    params: &ModelParams,
    f: &MultiPoly,
    point: &[Rat],
) -> Result<Rat, LimitError> {
    let p = f.vars();
    let mut val = diffusion_operator(params, f).eval(point);
    let weighted: Vec<MultiPoly> = (0..p)
        .map(|i| {
            let xi = MultiPoly::var(p, i);
            xi.mul(&MultiPoly::one(p).sub(&xi))
                .mul(&f.derive(i))
                .scale(&rat(2))
        })
        .collect();
    for i in 0..p {
        for j in i + 1..p {
            let nij = weighted[i].sub(&weighted[j]);
            let (q, r) = nij.divide_by_linear(i, j);
            val -= q.eval(point);
            let rv = r.eval(point);
            if !rv.is_zero() {
                let diff = point[i].clone() - point[j].clone();
                if diff.is_zero() {
                    return Err(LimitError::CoincidentSingularity);
                }
                val += rv / diff;
            }
        }
    }
    Ok(val)
}

/// Exact values of the h-transform form V⁻¹𝒟(V·f) + K·f and the drift form
/// 𝒟f + Σᵢ 2xᵢ(1−xᵢ)(Σ_{j≠i} 1/(xᵢ−xⱼ))∂ᵢf at a point with distinct
/// coordinates; the two are equal as rational functions.
pub fn generator_forms_exact(
    params: &ModelParams,
    f: &MultiPoly,
    point: &[Rat],
) -> Result<(Rat, Rat), LimitError> {
    let p = params.p();
    if f.vars() != p {
        return Err(LimitError::ArityMismatch { expected: p, got: f.vars() });
    }
    if point.len() != p {
        return Err(LimitError::LengthMismatch { expected: p, got: point.len() });
    }
    for i in 0..p {
        for j in i + 1..p {
            if point[i] == point[j] {
                return Err(LimitError::CoincidentSingularity);
            }
        }
    }
    let k_total = EigenSchedule::new(params.clone()).total_exact();
    let v = vandermonde_poly(p);
    let vf = v.mul(f);
    let h_poly = diffusion_operator(params, &vf).add(&vf.scale(&k_total));
    let h_val = h_poly.eval(point) / v.eval(point);
    let drift_val = drift_form_exact(params, f, point)?;
    Ok((h_val, drift_val))
}

/// Value of the generator applied to a polynomial at a point.
#[derive(Debug, Clone)]
pub struct GeneratorValue {
    /// Gf at the point, from the drift form in exact rational arithmetic.
    pub value: f64,
    /// h-transform form value; absent at coincident coordinates.
    pub h_transform: Option<f64>,
    /// True when coincident coordinates forced the drift-only path.
    pub coincident: bool,
}

/// G f at X by both generator forms; at coincident coordinates only the
/// drift form is evaluated (and only if its residue terms vanish there).
pub fn generator_apply(
    params: &ModelParams,
    f: &MultiPoly,
    xs: &[f64],
) -> Result<GeneratorValue, LimitError> {
    let p = params.p();
    if f.vars() != p {
        return Err(LimitError::ArityMismatch { expected: p, got: f.vars() });
    }
    if xs.len() != p {
        return Err(LimitError::LengthMismatch { expected: p, got: xs.len() });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(LimitError::OutsideChamber(xs.to_vec()));
    }
    let point: Vec<Rat> = xs.iter().map(|&x| rat_from_f64(x)).collect();
    let coincident = (0..p).any(|i| (i + 1..p).any(|j| point[i] == point[j]));
    if coincident {
        let val = drift_form_exact(params, f, &point)?;
        Ok(GeneratorValue { value: rat_to_f64(&val), h_transform: None, coincident: true })
    } else {
        let (h, d) = generator_forms_exact(params, f, &point)?;
        debug_assert_eq!(h, d, "generator forms must agree at distinct points");
        Ok(GeneratorValue {
            value: rat_to_f64(&d),
            h_transform: Some(rat_to_f64(&h)),
            coincident: false,
        })
    }
}

/// (|𝒟V + K·V|, |G_{a,b,c}V|) at the point, both in exact arithmetic; the
/// a, b, c of the harmonicity operator are drawn from the seeded generator.
pub fn doob_identities_check(params: &ModelParams, xs: &[f64], seed: u64) -> (f64, f64) {
    let p = params.p();
    assert_eq!(xs.len(), p, "point length must equal p");
    let point: Vec<Rat> = xs.iter().map(|&x| rat_from_f64(x)).collect();
    let v = vandermonde_poly(p);
    let k_total = EigenSchedule::new(params.clone()).total_exact();
    let first = diffusion_operator(params, &v).add(&v.scale(&k_total)).eval(&point);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = ratio(rng.gen_range(-32..=32), 16);
    let b = ratio(rng.gen_range(-32..=32), 16);
    let c = ratio(rng.gen_range(-32..=32), 16);
    let second = koenig_operator(&a, &b, &c, &v).eval(&point);
    (rat_to_f64(&first).abs(), rat_to_f64(&second).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::c_coeff;
    use crate::params::ArithmeticMode;
    use crate::scalar::rat_to_f64;

    fn params(p: usize, z: f64, w: f64) -> ModelParams {
        ModelParams::new(p, z, w, ArithmeticMode::Float).expect("valid parameters")
    }

    #[test]
    fn eigen_schedule_frozen_values() {
        let sched = EigenSchedule::new(params(2, 2.0, 0.0));
        assert_eq!(sched.value(0), 0.0);
        assert_eq!(sched.value(1), 2.0);
        assert_eq!(sched.total(), 2.0);
        assert_eq!(sched.total_closed_form(), 2.0);
        assert_eq!(sched.value_exact(1), rat(2));
        for i in 1..8 {
            assert!(sched.value(i + 1) > sched.value(i));
        }
    }

    #[test]
    fn eigen_total_closed_form_matches_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in 1..=6 {
            for _ in 0..10 {
                let z = p as f64 - 1.0 + 0.1 + 3.0 * rng.gen::<f64>();
                let w = -0.9 + 4.0 * rng.gen::<f64>();
                let sched = EigenSchedule::new(params(p, z, w));
                assert_eq!(sched.total_exact(), sched.total_closed_form_exact());
            }
        }
    }

    #[test]
    fn partition_validation_and_padding() {
        let lam = Partition::new(&[2, 1], 2).unwrap();
        assert_eq!(lam.parts(), &[2, 1]);
        assert_eq!(lam.weight(), 3);
        let padded = Partition::new(&[3], 3).unwrap();
        assert_eq!(padded.parts(), &[3, 0, 0]);
        let trimmed = Partition::new(&[1, 0, 0], 2).unwrap();
        assert_eq!(trimmed.parts(), &[1, 0]);
        assert!(matches!(
            Partition::new(&[1, 2], 2),
            Err(LimitError::BadPartition(_))
        ));
        assert!(matches!(
            Partition::new(&[1, 1, 1], 2),
            Err(LimitError::BadPartition(_))
        ));
        assert!(Partition::zero(3).is_zero());
    }

    #[test]
    fn orthonormal_batch_matches_single_evaluations() {
        let basis = JacobiBasis::for_params(&params(2, 2.5, 0.5), 40);
        for &x in &[0.1, 0.3, 0.77] {
            let batch = basis.orthonormal_values_upto(40, x).unwrap();
            for (k, &b) in batch.iter().enumerate() {
                let single = basis.orthonormal_eval(k, x).unwrap();
                assert!((b - single).abs() <= 1e-14 * single.abs().max(1.0));
            }
        }
    }

    #[test]
    fn heat_kernel_symmetry_and_long_time_limit() {
        let pars = params(2, 2.0, 0.0);
        let basis = JacobiBasis::for_params(&pars, 8);
        for &(x, y) in &[(0.3, 0.6), (0.15, 0.85), (0.5, 0.52)] {
            let a = heat_kernel(&pars, 50.0, x, y, 1e-12).unwrap();
            let b = heat_kernel(&pars, 50.0, y, x, 1e-12).unwrap();
            assert_eq!(a, b);
            let j0 = basis.orthonormal_eval(0, x).unwrap() * basis.orthonormal_eval(0, y).unwrap();
            assert!((a - j0).abs() < 1e-10, "t→∞ limit off: {a} vs {j0}");
        }
    }

    #[test]
    fn heat_kernel_semigroup_property() {
        let pars = params(1, 2.0, 0.5);
        let proc = LimitProcess::new(pars);
        let (t, s) = (0.3, 0.2);
        let rule = gauss_jacobi_rule(1.0, 0.5, 60).unwrap();
        for &(x, y) in &[(0.3, 0.7), (0.45, 0.5)] {
            let lhs = rule.integrate(|u| {
                let a = proc.heat_kernel(t, x, u, 1e-12).unwrap();
                let b = proc.heat_kernel(s, u, y, 1e-12).unwrap();
                a * b / (u.powf(0.5) * (1.0 - u))
            });
            let rhs = proc.heat_kernel(t + s, x, y, 1e-12).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "semigroup defect {}", lhs - rhs);
        }
    }

    #[test]
    fn heat_kernel_error_paths() {
        let pars = params(2, 2.0, 0.0);
        assert!(matches!(
            heat_kernel(&pars, 0.0, 0.3, 0.4, 1e-8),
            Err(LimitError::NonPositiveTime(_))
        ));
        assert!(matches!(
            heat_kernel(&pars, -1.0, 0.3, 0.4, 1e-8),
            Err(LimitError::NonPositiveTime(_))
        ));
        assert!(matches!(
            heat_kernel(&pars, 1.0, 1.2, 0.4, 1e-8),
            Err(LimitError::OutsideChamber(_))
        ));
        assert!(matches!(
            heat_kernel(&pars, 1e-9, 0.3, 0.4, 1e-12),
            Err(LimitError::Truncation { .. })
        ));
        let eval = HeatKernelEval::compute(&pars, 0.5, &[(0.005, 0.5)], 1e-10).unwrap();
        assert!(eval.widened);
        assert!(eval.truncation > 0);
        let plain = HeatKernelEval::compute(&pars, 0.5, &[(0.3, 0.5)], 1e-10).unwrap();
        assert!(!plain.widened);
    }

    #[test]
    fn transition_density_specializes_to_heat_kernel() {
        let pars = params(1, 1.0, 0.0);
        let proc = LimitProcess::new(pars);
        for &(x, y) in &[(0.3, 0.6), (0.2, 0.9)] {
            let dens = proc.transition_density(0.4, &[x], &[y], 1e-12).unwrap();
            let hk = proc.heat_kernel(0.4, x, y, 1e-12).unwrap();
            assert!((dens - hk).abs() < 1e-10, "{dens} vs {hk}");
        }
    }

    #[test]
    fn transition_normalization_is_unit() {
        let proc = LimitProcess::new(params(1, 2.0, 0.5));
        for &t in &[0.1, 1.0] {
            let mass = proc.transition_normalization(t, &[0.4], 1e-9).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "t={t}: mass {mass}");
        }
    }

    #[test]
    fn transition_density_long_time_ergodicity() {
        let proc = LimitProcess::new(params(2, 2.0, 0.0));
        let xs = [0.3, 0.6];
        let ys = [0.25, 0.7];
        let dens = proc.transition_density(50.0, &xs, &ys, 1e-10).unwrap();
        let rho = proc.stationary_density(&ys);
        assert!((dens - rho).abs() < 1e-8, "{dens} vs stationary {rho}");
    }

    #[test]
    fn transition_density_edge_cases() {
        let proc = LimitProcess::new(params(2, 3.0, 1.0));
        assert!(matches!(
            proc.transition_density(0.5, &[0.4, 0.4], &[0.3, 0.6], 1e-8),
            Err(LimitError::ZeroDensity)
        ));
        let coincident = proc
            .transition_density(0.5, &[0.3, 0.6], &[0.4, 0.4], 1e-8)
            .unwrap();
        assert_eq!(coincident, 0.0);
        let unsorted = proc
            .transition_density(0.5, &[0.3, 0.6], &[0.7, 0.2], 1e-8)
            .unwrap();
        assert_eq!(unsorted, 0.0);
    }

    #[test]
    fn stationarity_under_transition() {
        let proc = LimitProcess::new(params(2, 3.0, 1.0));
        for ys in [[0.3, 0.6], [0.2, 0.8], [0.45, 0.55]] {
            let res = proc.stationarity_residual(0.7, &ys, 1e-9).unwrap();
            assert!(res < 1e-6, "stationarity residual {res} at {ys:?}");
        }
    }

    #[test]
    fn multi_time_density_reductions() {
        let proc = LimitProcess::new(params(1, 2.0, 0.5));
        let single = proc.multi_time_density(&[0.5], &[vec![0.4]], 1e-10).unwrap();
        assert!((single - proc.stationary_density(&[0.4])).abs() < 1e-12);

        let two = proc
            .multi_time_density(&[0.1, 0.6], &[vec![0.3], vec![0.55]], 1e-10)
            .unwrap();
        let product = proc.stationary_density(&[0.3])
            * proc.transition_density(0.5, &[0.3], &[0.55], 1e-10).unwrap();
        assert!((two - product).abs() < 1e-10 * product.abs().max(1.0));

        let three = proc
            .multi_time_density(
                &[0.1, 0.4, 0.9],
                &[vec![0.3], vec![0.5], vec![0.7]],
                1e-10,
            )
            .unwrap();
        let chain = proc.stationary_density(&[0.3])
            * proc.transition_density(0.3, &[0.3], &[0.5], 1e-10).unwrap()
            * proc.transition_density(0.5, &[0.5], &[0.7], 1e-10).unwrap();
        assert!((three - chain).abs() < 1e-10 * chain.abs().max(1.0));
    }

    #[test]
    fn multi_time_marginalization() {
        let proc = LimitProcess::new(params(1, 2.0, 0.5));
        let rule = gauss_jacobi_rule(1.0, 0.5, 60).unwrap();
        let x = 0.35;
        let integral = rule.integrate(|y| {
            proc.multi_time_density(&[0.2, 0.7], &[vec![x], vec![y]], 1e-10)
                .unwrap()
                / (y.powf(0.5) * (1.0 - y))
        });
        let rho = proc.stationary_density(&[x]);
        assert!((integral - rho).abs() < 1e-7, "{integral} vs {rho}");
    }

    #[test]
    fn multi_time_error_paths() {
        let proc = LimitProcess::new(params(1, 2.0, 0.5));
        assert!(matches!(
            proc.multi_time_density(&[0.5, 0.2], &[vec![0.3], vec![0.4]], 1e-8),
            Err(LimitError::BadTimes(_))
        ));
        assert!(matches!(
            proc.multi_time_density(&[0.5], &[], 1e-8),
            Err(LimitError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn extended_kernel_equal_time_and_trace() {
        let proc = LimitProcess::new(params(2, 3.0, 1.0));
        let basis = proc.basis();
        for &(x, y) in &[(0.3, 0.6), (0.2, 0.5)] {
            let ker = proc.extended_kernel(x, 1.0, y, 1.0, 1e-10).unwrap();
            let direct: f64 = (0..2)
                .map(|i| {
                    basis.orthonormal_eval(i, x).unwrap() * basis.orthonormal_eval(i, y).unwrap()
                })
                .sum();
            assert!((ker - direct).abs() < 1e-14);
        }
        let flat = LimitProcess::new(params(1, 1.0, 0.0));
        let diag = flat.extended_kernel(0.42, 5.0, 0.42, 5.0, 1e-10).unwrap();
        assert!((diag - 1.0).abs() < 1e-14);

        let rule = gauss_jacobi_rule(1.0, 1.0, 30).unwrap();
        let trace = rule.integrate(|x| {
            proc.extended_kernel(x, 2.0, x, 2.0, 1e-10).unwrap() / (x * (1.0 - x))
        });
        assert!((trace - 2.0).abs() < 1e-8, "trace {trace}");
    }

    #[test]
    fn extended_kernel_two_time_matches_markov_structure() {
        let proc = LimitProcess::new(params(1, 2.0, 0.5));
        let (x, t) = (0.6, 0.9);
        let (y, s) = (0.35, 0.4);
        let rho2 = proc.correlation_fn(&[(x, t), (y, s)], 1e-11).unwrap();
        let markov = proc.stationary_density(&[y])
            * proc.transition_density(t - s, &[y], &[x], 1e-11).unwrap();
        assert!((rho2 - markov).abs() < 1e-8, "{rho2} vs {markov}");

        let one = proc.correlation_fn(&[(0.3, 1.0)], 1e-11).unwrap();
        assert!((one - proc.stationary_density(&[0.3])).abs() < 1e-10);
    }

    #[test]
    fn equal_time_correlations_are_repulsive() {
        let proc = LimitProcess::new(params(2, 3.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = 0.05 + 0.9 * rng.gen::<f64>();
            let y = 0.05 + 0.9 * rng.gen::<f64>();
            if (x - y).abs() < 1e-6 {
                continue;
            }
            let det = proc
                .correlation_fn(&[(x, 1.0), (y, 1.0)], 1e-11)
                .unwrap();
            let dx = proc.extended_kernel(x, 1.0, x, 1.0, 1e-11).unwrap();
            let dy = proc.extended_kernel(y, 1.0, y, 1.0, 1e-11).unwrap();
            assert!(det >= -1e-12, "negative pair correlation {det}");
            assert!(det <= dx * dy + 1e-12, "repulsion violated");
        }
    }

    #[test]
    fn semigroup_eigenvalue_specializations() {
        let pars = params(2, 3.0, 1.0);
        assert_eq!(semigroup_eigenvalue(&pars, &Partition::zero(2), 0.7), 1.0);
        let one_particle = params(1, 2.0, 0.5);
        let sched = EigenSchedule::new(one_particle.clone());
        for k in 1..4 {
            let lam = Partition::new(&[k], 1).unwrap();
            let c = generator_eigenvalue(&one_particle, &lam);
            assert!((c + sched.value(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn semigroup_action_on_jacobi_eigenfunctions() {
        let proc = LimitProcess::new(params(2, 3.0, 1.0));
        let lam = Partition::new(&[1, 0], 2).unwrap();
        let (lhs, rhs) = proc
            .semigroup_apply_check(&lam, 0.5, &[0.3, 0.7], 1e-8)
            .unwrap();
        assert!((lhs - rhs).abs() < 1e-6, "lhs {lhs} vs rhs {rhs}");

        let zero = Partition::zero(2);
        let (l0, r0) = proc
            .semigroup_apply_check(&zero, 0.5, &[0.3, 0.7], 1e-8)
            .unwrap();
        assert!((l0 - r0).abs() < 1e-8);
    }

    #[test]
    fn semigroup_sweep_small_partitions() {
        for p in 1..=2usize {
            let proc = LimitProcess::new(params(p, p as f64 + 1.5, 0.75));
            let points: Vec<Vec<f64>> = match p {
                1 => vec![vec![0.3], vec![0.62], vec![0.85]],
                _ => vec![vec![0.25, 0.6], vec![0.4, 0.8], vec![0.15, 0.5]],
            };
            for weight in 0..=3usize {
                for lam in partitions_of_weight(weight, p) {
                    let lam = Partition::new(&lam, p).unwrap();
                    for xs in &points {
                        let (lhs, rhs) = proc
                            .semigroup_apply_check(&lam, 0.5, xs, 1e-8)
                            .unwrap();
                        assert!(
                            (lhs - rhs).abs() < 1e-6 * rhs.abs().max(1.0),
                            "p={p} λ={:?}: {lhs} vs {rhs}",
                            lam.parts()
                        );
                    }
                }
            }
        }
    }

    fn partitions_of_weight(weight: usize, max_len: usize) -> Vec<Vec<usize>> {
        fn rec(remaining: usize, max_part: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if remaining == 0 {
                out.push(cur.clone());
                return;
            }
            if slots == 0 {
                return;
            }
            for part in (1..=remaining.min(max_part)).rev() {
                cur.push(part);
                rec(remaining - part, part, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(weight, weight.max(1), max_len, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn generator_annihilates_constants_and_scales_eigenfunctions() {
        let pars = params(2, 3.0, 1.0);
        let one = MultiPoly::one(2);
        let at = generator_apply(&pars, &one, &[0.3, 0.7]).unwrap();
        assert_eq!(at.value, 0.0);
        assert_eq!(at.h_transform, Some(0.0));

        for parts in [[1usize, 0], [2, 0]] {
            let lam = Partition::new(&parts, 2).unwrap();
            let jac = multidim_jacobi_poly(&pars, &lam);
            let ctilde = generator_eigenvalue_exact(&pars, &lam);
            let point = vec![ratio(1, 4), ratio(2, 3)];
            let (h, d) = generator_forms_exact(&pars, &jac, &point).unwrap();
            let expected = ctilde * jac.eval(&point);
            assert_eq!(h, expected, "λ={parts:?}");
            assert_eq!(d, expected, "λ={parts:?}");
        }

        let dyadic = params(2, 2.5, 0.25);
        let lam = Partition::new(&[1, 0], 2).unwrap();
        let jac = multidim_jacobi_poly(&dyadic, &lam);
        let point = vec![ratio(1, 8), ratio(5, 8)];
        let (h, d) = generator_forms_exact(&dyadic, &jac, &point).unwrap();
        let expected = generator_eigenvalue_exact(&dyadic, &lam) * jac.eval(&point);
        assert_eq!(h, expected);
        assert_eq!(d, expected);
    }

    #[test]
    fn one_dimensional_jacobi_diffusion_eigenrelation() {
        let pars = params(2, 3.5, 0.25);
        let sched = EigenSchedule::new(pars.clone());
        let alpha = rat_from_f64(pars.z_prime()) - rat(2);
        let beta = rat_from_f64(pars.w_prime());
        for i in 0..=6usize {
            let f = MultiPoly::univariate(1, 0, &jacobi_coeffs(&alpha, &beta, i));
            let applied = diffusion_operator(&pars, &f);
            let scaled = f.scale(&-sched.value_exact(i));
            assert!(
                applied.sub(&scaled).is_zero(),
                "D^Jac eigenrelation fails at degree {i}"
            );
        }
    }

    #[test]
    fn generator_forms_agree_on_monomials() {
        for p in 1..=3usize {
            let pars = params(p, p as f64 + 0.5, 0.75);
            let point: Vec<Rat> = [ratio(1, 5), ratio(1, 3), ratio(4, 7)][..p].to_vec();
            let mut exps = vec![0u32; p];
            loop {
                if exps.iter().sum::<u32>() <= 4 {
                    let mut f = MultiPoly::one(p);
                    for (i, &e) in exps.iter().enumerate() {
                        for _ in 0..e {
                            f = f.mul(&MultiPoly::var(p, i));
                        }
                    }
                    let (h, d) = generator_forms_exact(&pars, &f, &point).unwrap();
                    assert_eq!(h, d, "p={p} monomial {exps:?}");
                }
                let mut k = 0;
                loop {
                    if k == p {
                        break;
                    }
                    exps[k] += 1;
                    if exps[k] <= 4 {
                        break;
                    }
                    exps[k] = 0;
                    k += 1;
                }
                if k == p {
                    break;
                }
            }
        }
    }

    #[test]
    fn coincident_coordinates_use_drift_form() {
        let pars = params(2, 3.0, 1.0);
        let sym = MultiPoly::var(2, 0).add(&MultiPoly::var(2, 1));
        let at = generator_apply(&pars, &sym, &[0.4, 0.4]).unwrap();
        assert!(at.coincident);
        assert!(at.h_transform.is_none());
        // 𝒟(x₁+x₂) + pair term 2(a(x₁)−a(x₂))/(x₁−x₂) → 2(1−(x₁+x₂)).
        let w = pars.w_prime();
        let slope = pars.w_prime() + pars.z_prime() - 2.0 + 2.0;
        let expected = 2.0 * (w + 1.0) - slope * 0.8 + 2.0 * (1.0 - 0.8);
        assert!((at.value - expected).abs() < 1e-14);

        let asym = MultiPoly::var(2, 0);
        assert!(matches!(
            generator_apply(&pars, &asym, &[0.4, 0.4]),
            Err(LimitError::CoincidentSingularity)
        ));
    }

    #[test]
    fn doob_identities_hold_exactly() {
        let one = doob_identities_check(&params(1, 2.0, 0.5), &[0.4], 3);
        assert_eq!(one, (0.0, 0.0));
        let three = doob_identities_check(&params(3, 3.5, 0.5), &[0.2, 0.5, 0.7], 7);
        assert_eq!(three, (0.0, 0.0));

        // p = 2, z′ = 2, w′ = 0: 𝒟V = −2V as polynomials.
        let pars = params(2, 2.0, 0.0);
        let v = vandermonde_poly(2);
        let applied = diffusion_operator(&pars, &v);
        assert!(applied.sub(&v.scale(&rat(-2))).is_zero());

        // Harmonicity holds for every a, b, c, not just the sampled ones.
        let v3 = vandermonde_poly(3);
        for (a, b, c) in [
            (rat(0), rat(0), rat(0)),
            (ratio(3, 2), ratio(-1, 4), rat(2)),
            (rat(-1), ratio(7, 16), ratio(-5, 3)),
        ] {
            assert!(koenig_operator(&a, &b, &c, &v3).is_zero());
        }
    }

    #[test]
    fn spectral_gap_is_strictly_negative() {
        for p in 1..=4usize {
            let cases = [
                (p as f64 - 1.0 + 0.25, -0.75),
                (p as f64 + 1.5, 0.0),
                (2.0 * p as f64, 3.25),
            ];
            for (z, w) in cases {
                let pars = params(p, z, w);
                for weight in 1..=6usize {
                    for lam in super::tests::partitions_of_weight(weight, p) {
                        let lam = Partition::new(&lam, p).unwrap();
                        let c = generator_eigenvalue_exact(&pars, &lam);
                        assert!(
                            c < Rat::zero(),
                            "c̃ not negative at p={p}, λ={:?}, (z′,w′)=({z},{w})",
                            lam.parts()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn finite_level_eigenvalues_approach_schedule() {
        let pars = params(2, 2.5, 0.5);
        let sched = EigenSchedule::new(pars.clone());
        let t = 0.5;
        for i in 1..=3usize {
            let mut errs = Vec::new();
            for &n in &[200usize, 400, 800, 1600] {
                let c = c_coeff(&pars, n, i);
                let steps = (t * (n * n) as f64).floor();
                let ratio = (2.0 * steps * c.ln() + t * sched.value(i)).exp();
                errs.push((ratio - 1.0).abs());
            }
            for w in errs.windows(2) {
                let drop = w[1] / w[0];
                assert!(
                    (0.3..0.7).contains(&drop),
                    "error did not halve: {errs:?}"
                );
            }
            assert!(errs[errs.len() - 1] < 0.05, "final error too large: {errs:?}");
        }
    }

    #[test]
    fn multidim_jacobi_poly_matches_numeric_evaluation() {
        let pars = params(2, 3.0, 1.0);
        let basis = JacobiBasis::for_params(&pars, 8);
        for parts in [[0usize, 0], [1, 0], [2, 1]] {
            let lam = Partition::new(&parts, 2).unwrap();
            let poly = multidim_jacobi_poly(&pars, &lam);
            for &(x, y) in &[(0.3, 0.7), (0.2, 0.9)] {
                let exact = rat_to_f64(&poly.eval(&[rat_from_f64(x), rat_from_f64(y)]));
                let numeric = multidim_jacobi(&basis, lam.parts(), &[x, y]);
                assert!(
                    (exact - numeric).abs() < 1e-10 * numeric.abs().max(1.0),
                    "λ={parts:?} at ({x},{y}): {exact} vs {numeric}"
                );
            }
        }
    }
}
