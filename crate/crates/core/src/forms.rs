//! Binary forms of fixed degree and the two coefficient-level operations on
//! rational maps: conjugation by a 2×2 matrix and composition.
//!
//! A form of degree `d` is a slice `[c_0, …, c_d]` standing for
//! `c_0 X^d + c_1 X^{d-1} Y + ⋯ + c_d Y^d`; dehomogenized at `Y = 1` this is
//! `c_0 z^d + ⋯ + c_d`. Leading zeros are meaningful.
//!
//! Everything here is generic over [`CoeffRing`] so the same formulas run over
//! Puiseux series and over rational functions of the parameter.

use num::BigRational;

use crate::series::PuiseuxSeries;

pub trait CoeffRing: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_rational(c: &BigRational) -> Self;
}

impl CoeffRing for PuiseuxSeries {
    fn zero() -> Self {
        PuiseuxSeries::zero()
    }
    fn one() -> Self {
        PuiseuxSeries::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(c: &BigRational) -> Self {
        PuiseuxSeries::constant(c.clone())
    }
}

/// Product of two forms; degrees add.
pub fn form_mul<R: CoeffRing>(a: &[R], b: &[R]) -> Vec<R> {
    let mut out = vec![R::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn form_scale<R: CoeffRing>(c: &R, a: &[R]) -> Vec<R> {
    a.iter().map(|x| c.mul(x)).collect()
}

fn form_add<R: CoeffRing>(a: &[R], b: &[R]) -> Vec<R> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn form_sub<R: CoeffRing>(a: &[R], b: &[R]) -> Vec<R> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

/// Powers `x^0, …, x^n` of a form.
fn form_powers<R: CoeffRing>(x: &[R], n: usize) -> Vec<Vec<R>> {
    let mut out = vec![vec![R::one()]];
    for k in 1..=n {
        let next = form_mul(&out[k - 1], x);
        out.push(next);
    }
    out
}

/// `P(X, Y) = Σ_k c_k X^{d-k} Y^k` with forms `X`, `Y` of a common degree `e`
/// substituted; returns a form of degree `d·e`.
pub fn substitute<R: CoeffRing>(c: &[R], x: &[R], y: &[R]) -> Vec<R> {
    let d = c.len() - 1;
    let e = x.len() - 1;
    let xp = form_powers(x, d);
    let yp = form_powers(y, d);
    let mut out = vec![R::zero(); d * e + 1];
    for (k, ck) in c.iter().enumerate() {
        let term = form_scale(ck, &form_mul(&xp[d - k], &yp[k]));
        out = form_add(&out, &term);
    }
    out
}

/// Conjugate `Φ^M = M⁻¹ ∘ Φ ∘ M` of `Φ = P/Q` by `M = [[α, β], [γ, δ]]`,
/// without normalization.
///
/// With `P̂ = P(αz + β, γz + δ)` and `Q̂` likewise, the numerator is
/// `δ·P̂ − β·Q̂` and the denominator `α·Q̂ − γ·P̂`: the leading coefficient of
/// `P̂` is `Σ a_k α^{d-k} γ^k` and its constant term `Σ a_k β^{d-k} δ^k`.
/// The raw resultant picks up exactly `det(M)^{d²+d}`.
pub fn conjugate_forms<R: CoeffRing>(a: &[R], b: &[R], m: [&R; 4]) -> (Vec<R>, Vec<R>) {
    let [alpha, beta, gamma, delta] = m;
    let x = [alpha.clone(), beta.clone()];
    let y = [gamma.clone(), delta.clone()];
    let p_hat = substitute(a, &x, &y);
    let q_hat = substitute(b, &x, &y);
    let num = form_sub(&form_scale(delta, &p_hat), &form_scale(beta, &q_hat));
    let den = form_sub(&form_scale(alpha, &q_hat), &form_scale(gamma, &p_hat));
    (num, den)
}

/// Composition `F ∘ G` of maps given by form pairs `(a, b)` of degree `d` and
/// `(p, q)` of degree `e`; the result has degree `d·e`.
pub fn compose_forms<R: CoeffRing>(a: &[R], b: &[R], p: &[R], q: &[R]) -> (Vec<R>, Vec<R>) {
    (substitute(a, p, q), substitute(b, p, q))
}

/// Sylvester matrix of two forms of the same degree `d`: `2d × 2d`, `d`
/// shifted copies of `a` followed by `d` shifted copies of `b`.
pub fn sylvester_matrix<R: CoeffRing>(a: &[R], b: &[R]) -> Vec<Vec<R>> {
    let d = a.len() - 1;
    let n = 2 * d;
    let mut rows = Vec::with_capacity(n);
    for src in [a, b] {
        for shift in 0..d {
            let mut row = vec![R::zero(); n];
            for (j, c) in src.iter().enumerate() {
                row[shift + j] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}
