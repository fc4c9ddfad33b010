//! Exact multivariate polynomials over rationals: the calculus needed
//! to verify differential-operator identities symbolically, including
//! division by Vandermonde factors with remainder tracking.

use crate::scalar::Rat;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Polynomial in a fixed number of variables, stored as a map from
/// exponent vectors to nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({coeff})")?;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    write!(f, "·x{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl MultiPoly {
    pub fn zero(vars: usize) -> Self {
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars], c);
        }
        MultiPoly { vars, terms }
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, Rat::from_integer(1.into()))
    }

    /// The coordinate polynomial Xᵢ.
    pub fn var(vars: usize, i: usize) -> Self {
        assert!(i < vars, "variable index out of range");
        let mut exps = vec![0; vars];
        exps[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, Rat::from_integer(1.into()));
        MultiPoly { vars, terms }
    }

    /// Σ_k coeffs[k] · Xᵢ^k.
    pub fn univariate(vars: usize, i: usize, coeffs: &[Rat]) -> Self {
        assert!(i < vars, "variable index out of range");
        let mut terms = BTreeMap::new();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut exps = vec![0; vars];
                exps[i] = k as u32;
                terms.insert(exps, c.clone());
            }
        }
        MultiPoly { vars, terms }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rat)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    fn insert(&mut self, exps: Vec<u32>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars);
        }
        let mut out = MultiPoly::zero(self.vars);
        for (e, k) in &self.terms {
            out.terms.insert(e.clone(), k.clone() * c);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(exps, ca.clone() * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> MultiPoly {
        let mut out = MultiPoly::one(self.vars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// ∂/∂Xᵢ.
    pub fn derive(&self, i: usize) -> MultiPoly {
        assert!(i < self.vars, "variable index out of range");
        let mut out = MultiPoly::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[i] -= 1;
            out.terms.insert(exps, c.clone() * Rat::from_integer((e[i] as i64).into()));
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.vars, "point dimension mismatch");
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitutes Xᵢ := Xⱼ.
    pub fn substitute_var(&self, i: usize, j: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars);
        for (e, c) in &self.terms {
            let mut exps = e.clone();
            exps[j] += exps[i];
            exps[i] = 0;
            out.insert(exps, c.clone());
        }
        out
    }

    /// Divides by (Xⱼ − Xᵢ): returns (quotient, remainder) with the
    /// remainder free of ... the division identity
    /// self = q·(Xⱼ − Xᵢ) + r, where r = self|_{Xⱼ:=Xᵢ}.
    pub fn divide_by_linear(&self, i: usize, j: usize) -> (MultiPoly, MultiPoly) {
        assert!(i < self.vars && j < self.vars && i != j, "bad variable pair");
        let mut quotient = MultiPoly::zero(self.vars);
        let mut rem = self.clone();
        loop {
            // highest Xⱼ-degree term still present
            let lead = rem
                .terms
                .iter()
                .filter(|(e, _)| e[j] > 0)
                .max_by_key(|(e, _)| e[j])
                .map(|(e, c)| (e.clone(), c.clone()));
            let Some((exps, coeff)) = lead else { break };
            let mut t_exps = exps.clone();
            t_exps[j] -= 1;
            quotient.insert(t_exps.clone(), coeff.clone());
            // rem −= t·(Xⱼ − Xᵢ)
            rem.insert(exps, -coeff.clone());
            let mut shifted = t_exps;
            shifted[i] += 1;
            rem.insert(shifted, coeff);
        }
        (quotient, rem)
    }

    /// Exact division by ∏_{i<j}(Xⱼ − Xᵢ); None when any factor
    /// leaves a remainder.
    pub fn divide_by_vandermonde(&self) -> Option<MultiPoly> {
        let mut out = self.clone();
        for i in 0..self.vars {
            for j in (i + 1)..self.vars {
                let (q, r) = out.divide_by_linear(i, j);
                if !r.is_zero() {
                    return None;
                }
                out = q;
            }
        }
        Some(out)
    }
}

/// ∏_{i<j}(Xⱼ − Xᵢ) as an exact polynomial.
pub fn vandermonde_poly(vars: usize) -> MultiPoly {
    let mut out = MultiPoly::one(vars);
    for i in 0..vars {
        for j in (i + 1)..vars {
            let factor = MultiPoly::var(vars, j).sub(&MultiPoly::var(vars, i));
            out = out.mul(&factor);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gt::vandermonde;
    use crate::scalar::{rat, ratio};

    #[test]
    fn arithmetic_and_eval() {
        let x0 = MultiPoly::var(2, 0);
        let x1 = MultiPoly::var(2, 1);
        let square = x0.add(&x1).pow(2);
        assert_eq!(square.coefficient(&[2, 0]), rat(1));
        assert_eq!(square.coefficient(&[1, 1]), rat(2));
        assert_eq!(square.coefficient(&[0, 2]), rat(1));
        let point = [ratio(1, 2), ratio(1, 3)];
        assert_eq!(square.eval(&point), ratio(25, 36));
    }

    #[test]
    fn derivative() {
        // ∂₀(x₀³x₁) = 3x₀²x₁
        let p = MultiPoly::var(2, 0).pow(3).mul(&MultiPoly::var(2, 1));
        let d = p.derive(0);
        assert_eq!(d.coefficient(&[2, 1]), rat(3));
        assert_eq!(d.terms().count(), 1);
        assert!(MultiPoly::one(2).derive(1).is_zero());
    }

    #[test]
    fn vandermonde_matches_numeric() {
        let v = vandermonde_poly(3);
        let point = [ratio(1, 5), ratio(1, 2), ratio(7, 3)];
        assert_eq!(v.eval(&point), vandermonde(&point.to_vec()));
        assert_eq!(v.total_degree(), 3);
    }

    #[test]
    fn linear_division() {
        // (x₁² − x₀²) / (x₁ − x₀) = x₁ + x₀
        let p = MultiPoly::var(2, 1).pow(2).sub(&MultiPoly::var(2, 0).pow(2));
        let (q, r) = p.divide_by_linear(0, 1);
        assert!(r.is_zero());
        assert_eq!(q, MultiPoly::var(2, 0).add(&MultiPoly::var(2, 1)));
        // x₀x₁ = x₀(x₁−x₀) + x₀², remainder x₀²
        let p = MultiPoly::var(2, 0).mul(&MultiPoly::var(2, 1));
        let (_, r) = p.divide_by_linear(0, 1);
        assert_eq!(r, MultiPoly::var(2, 0).pow(2));
        assert_eq!(r, p.substitute_var(1, 0));
    }

    #[test]
    fn vandermonde_division_roundtrip() {
        let v = vandermonde_poly(3);
        let f = MultiPoly::var(3, 0)
            .add(&MultiPoly::var(3, 1).pow(2))
            .add(&MultiPoly::constant(3, ratio(5, 7)));
        let recovered = v.mul(&f).divide_by_vandermonde().unwrap();
        assert_eq!(recovered, f);
        // a symmetric non-multiple of V is rejected
        assert!(MultiPoly::one(3).divide_by_vandermonde().is_none());
    }

    #[test]
    fn univariate_matches_jacobi_coeffs() {
        let alpha = ratio(3, 2);
        let beta = ratio(1, 2);
        for n in 0..5usize {
            let coeffs = crate::orthopoly::jacobi::jacobi_coeffs(&alpha, &beta, n);
            let p = MultiPoly::univariate(1, 0, &coeffs);
            let x = ratio(3, 8);
            let series = crate::orthopoly::jacobi::jacobi_series(
                crate::scalar::ratio(3, 2),
                crate::scalar::ratio(1, 2),
                n,
                x.clone(),
            );
            assert_eq!(p.eval(&[x]), series, "n={n}");
        }
    }
}
