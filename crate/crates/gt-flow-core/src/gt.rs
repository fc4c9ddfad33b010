//! Combinatorics of the Gelfand-Tsetlin graph: signatures, interlacing,
//! path counting, the Weyl dimension, Vandermonde products, and the
//! particle encoding λ ↔ X(λ).

use crate::scalar::{factorial, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GtError {
    #[error("signature parts must be non-increasing: {0:?}")]
    NotMonotone(Vec<i64>),
    #[error("expected levels (N, N+1), got ({lower}, {upper})")]
    LevelMismatch { lower: usize, upper: usize },
    #[error("signature does not fit in a p = {p} particle box: {parts:?}")]
    OutOfBox { p: usize, parts: Vec<i64> },
    #[error("particle configuration is malformed for box (N = {n}, p = {p}): {points:?}")]
    MalformedConfig { n: usize, p: usize, points: Vec<i64> },
    #[error("path enumeration guard exceeded: dim = {dim} > {guard}")]
    GuardExceeded { dim: BigInt, guard: u64 },
}

/// A signature of order N: integers λ_1 ≥ λ_2 ≥ … ≥ λ_N.
///
/// The empty signature (N = 0) is the root of the graph. Signatures are
/// ordered lexicographically, giving deterministic iteration over graph
/// slices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    parts: Vec<i64>,
}

impl Signature {
    pub fn new(parts: Vec<i64>) -> Result<Self, GtError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(GtError::NotMonotone(parts));
        }
        Ok(Signature { parts })
    }

    pub fn empty() -> Self {
        Signature { parts: Vec::new() }
    }

    pub fn level(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }
}

/// Interlacing relation λ ≺ μ between consecutive levels:
/// μ_1 ≥ λ_1 ≥ μ_2 ≥ … ≥ λ_N ≥ μ_{N+1}.
pub fn interlaces(lower: &Signature, upper: &Signature) -> Result<bool, GtError> {
    if upper.level() != lower.level() + 1 {
        return Err(GtError::LevelMismatch {
            lower: lower.level(),
            upper: upper.level(),
        });
    }
    let l = lower.parts();
    let u = upper.parts();
    for i in 0..l.len() {
        if u[i] < l[i] || l[i] < u[i + 1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of monotone paths ∅ → λ in the graph, by Weyl's dimension formula
/// Dim λ = ∏_{i<j} (λ_i − λ_j + j − i)/(j − i).
///
/// The product is accumulated as a rational reduced at every step, so the
/// result is exact for any signature size.
pub fn dim(lambda: &Signature) -> BigInt {
    let parts = lambda.parts();
    let n = parts.len();
    let mut acc = BigRational::one();
    for i in 0..n {
        for j in (i + 1)..n {
            let num = parts[i] - parts[j] + (j as i64 - i as i64);
            let den = j as i64 - i as i64;
            acc *= BigRational::new(BigInt::from(num), BigInt::from(den));
        }
    }
    debug_assert!(acc.is_integer());
    acc.to_integer()
}

/// Enumerate the predecessors μ ≺ λ one level down.
pub fn predecessors(lambda: &Signature) -> Vec<Signature> {
    let parts = lambda.parts();
    let n = parts.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0i64; n - 1];
    fn rec(parts: &[i64], cur: &mut Vec<i64>, idx: usize, out: &mut Vec<Signature>) {
        if idx == cur.len() {
            out.push(Signature {
                parts: cur.clone(),
            });
            return;
        }
        // μ_idx ranges over [λ_{idx+1}, λ_idx]; monotonicity is automatic.
        for v in parts[idx + 1]..=parts[idx] {
            cur[idx] = v;
            rec(parts, cur, idx + 1, out);
        }
    }
    // Descend from the last coordinate so emitted signatures are sorted.
    rec(parts, &mut cur, 0, &mut out);
    out
}

/// Successors μ ≻ λ one level up, with parts confined to [lo, hi].
pub fn successors_bounded(lambda: &Signature, lo: i64, hi: i64) -> Vec<Signature> {
    let parts = lambda.parts();
    let n = parts.len();
    let mut out = Vec::new();
    let mut cur = vec![0i64; n + 1];
    fn rec(
        parts: &[i64],
        cur: &mut Vec<i64>,
        idx: usize,
        lo: i64,
        hi: i64,
        out: &mut Vec<Signature>,
    ) {
        let n = parts.len();
        if idx == n + 1 {
            out.push(Signature { parts: cur.clone() });
            return;
        }
        // μ_1 ≥ λ_1, λ_{i−1} ≥ μ_i ≥ λ_i, μ_{N+1} ≤ λ_N.
        let lower = if idx < n { parts[idx] } else { lo };
        let upper = if idx == 0 { hi } else { parts[idx - 1] };
        for v in lower..=upper {
            cur[idx] = v;
            rec(parts, cur, idx + 1, lo, hi, out);
        }
    }
    rec(parts, &mut cur, 0, lo, hi, &mut out);
    out
}

/// Count paths ∅ → λ by exhaustive recursion over interlacing predecessors.
///
/// Independent of the Weyl formula; guarded so the enumeration stays below
/// `guard` paths (checked against `dim`, which bounds the work exactly).
pub fn count_paths_bruteforce(lambda: &Signature, guard: u64) -> Result<BigInt, GtError> {
    let d = dim(lambda);
    if d > BigInt::from(guard) {
        return Err(GtError::GuardExceeded { dim: d, guard });
    }
    fn rec(lambda: &Signature) -> BigInt {
        if lambda.level() == 0 {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for mu in predecessors(lambda) {
            acc += rec(&mu);
        }
        acc
    }
    Ok(rec(lambda))
}

/// A configuration of p particles on X_{N,p} = {0, …, N+p−1}: strictly
/// increasing positions x_1 < … < x_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParticleConfig {
    points: Vec<i64>,
    n: usize,
    p: usize,
}

impl ParticleConfig {
    pub fn new(points: Vec<i64>, n: usize, p: usize) -> Result<Self, GtError> {
        let ok = points.len() == p
            && points.windows(2).all(|w| w[0] < w[1])
            && points.first().map_or(p == 0, |&x| x >= 0)
            && points
                .last()
                .map_or(p == 0, |&x| x <= (n + p) as i64 - 1);
        if !ok {
            return Err(GtError::MalformedConfig { n, p, points });
        }
        Ok(ParticleConfig { points, n, p })
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    /// Level N of the box (N, p).
    pub fn level(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of lattice sites N + p in the box.
    pub fn sites(&self) -> usize {
        self.n + self.p
    }
}

/// Particle encoding X(λ) = X_{N,p} \ {λ_i − i + N : i = 1..N}.
///
/// Requires p ≥ λ_1 and λ_N ≥ 0 so that the complement has exactly p
/// points inside the box.
pub fn to_particles(lambda: &Signature, p: usize) -> Result<ParticleConfig, GtError> {
    let parts = lambda.parts();
    let n = parts.len();
    if parts.first().map_or(false, |&l| l > p as i64)
        || parts.last().map_or(false, |&l| l < 0)
    {
        return Err(GtError::OutOfBox {
            p,
            parts: parts.to_vec(),
        });
    }
    let total = n + p;
    let mut occupied = vec![false; total];
    for (i, &l) in parts.iter().enumerate() {
        // site λ_i − (i+1) + N, strictly decreasing in i
        let site = l - (i as i64 + 1) + n as i64;
        occupied[site as usize] = true;
    }
    let points: Vec<i64> = (0..total as i64)
        .filter(|&s| !occupied[s as usize])
        .collect();
    ParticleConfig::new(points, n, p)
}

/// Inverse of [`to_particles`]: the unique signature with X(λ) = X.
pub fn from_particles(x: &ParticleConfig) -> Signature {
    let total = x.sites();
    let mut occupied = vec![true; total];
    for &pt in x.points() {
        occupied[pt as usize] = false;
    }
    // Occupied sites, read from the top, are λ_i − i + N for i = 1..N.
    let n = x.level() as i64;
    let mut parts = Vec::with_capacity(x.level());
    let mut i = 1i64;
    for site in (0..total as i64).rev() {
        if occupied[site as usize] {
            parts.push(site + i - n);
            i += 1;
        }
    }
    Signature { parts }
}

/// Interlacing of particle configurations on consecutive levels:
/// X ≺ X′ iff x′_i ∈ {x_i, x_i + 1} for every i.
pub fn particles_interlace(x: &ParticleConfig, x_next: &ParticleConfig) -> bool {
    x.p() == x_next.p()
        && x_next.level() == x.level() + 1
        && x
            .points()
            .iter()
            .zip(x_next.points())
            .all(|(&a, &b)| b == a || b == a + 1)
}

/// Vandermonde product V(X) = ∏_{i<j} (x_j − x_i); empty and singleton
/// inputs give 1.
pub fn vandermonde<T: Scalar>(xs: &[T]) -> T {
    let mut acc = T::one();
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            acc = acc * (xs[j].clone() - xs[i].clone());
        }
    }
    acc
}

/// Weyl dimension in particle coordinates:
/// Dim = V(X) · ∏_i [x_i! (N+p−1−x_i)!]^{-1} · ∏_{i=1}^p (N+i−1)!.
pub fn dim_via_particles(x: &ParticleConfig) -> BigInt {
    let pts = x.points();
    let top = x.sites() as i64 - 1;
    let mut num = BigInt::one();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            num *= BigInt::from(pts[j] - pts[i]);
        }
    }
    for i in 1..=x.p() {
        num *= factorial((x.level() + i - 1) as u64);
    }
    let mut den = BigInt::one();
    for &pt in pts {
        den *= factorial(pt as u64) * factorial((top - pt) as u64);
    }
    let r = BigRational::new(num, den);
    debug_assert!(r.is_integer());
    r.to_integer()
}

/// All particle configurations of the box (N, p), lexicographically sorted.
pub fn enumerate_configs(n: usize, p: usize) -> Vec<ParticleConfig> {
    let total = (n + p) as i64;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(total: i64, p: usize, start: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        let remaining = (p - cur.len()) as i64;
        for s in start..=(total - remaining) {
            cur.push(s);
            rec(total, p, s + 1, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(total, p, 0, &mut cur, &mut raw);
    for points in raw {
        out.push(ParticleConfig { points, n, p });
    }
    out
}

/// All signatures of order `level` with parts in [lo, hi], sorted.
pub fn enumerate_signatures(level: usize, lo: i64, hi: i64) -> Vec<Signature> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; level];
    fn rec(level: usize, lo: i64, hi: i64, idx: usize, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if idx == level {
            out.push(Signature { parts: cur.clone() });
            return;
        }
        let cap = if idx == 0 { hi } else { cur[idx - 1] };
        for v in lo..=cap {
            cur[idx] = v;
            rec(level, lo, hi, idx + 1, cur, out);
        }
    }
    rec(level, lo, hi, 0, &mut cur, &mut out);
    out.sort();
    out
}

/// dim as u64 when it fits (helper for guards and tests).
pub fn dim_u64(lambda: &Signature) -> Option<u64> {
    dim(lambda).to_u64()
}
