//! Rational maps of degree `d` over `K`.
//!
//! A map is stored as `f = (a_0 z^d + ⋯ + a_d) / (b_0 z^d + ⋯ + b_d)` with its
//! coefficients scaled so that the smallest coefficient valuation is zero.
//! In that form `ord_res(f) = v(Res(a, b))`, the additive version of the
//! normalized resultant `|Res(P,Q)| / max(|a_i|, |b_i|)^{2d}`.

use std::fmt;

use num::{BigRational, Zero};

use crate::error::{Error, Result};
use crate::forms::{compose_forms, conjugate_forms, sylvester_matrix};
use crate::poly::{write_poly, Poly};
use crate::series::{Exponent, PuiseuxSeries, Valuation, DEFAULT_RELATIVE_PRECISION};

/// Invertible `[[α, β], [γ, δ]]` over `K`.
#[derive(Clone, Debug)]
pub struct ConjugationMatrix {
    entries: [PuiseuxSeries; 4],
    det: PuiseuxSeries,
}

impl ConjugationMatrix {
    pub fn new(
        alpha: PuiseuxSeries,
        beta: PuiseuxSeries,
        gamma: PuiseuxSeries,
        delta: PuiseuxSeries,
    ) -> Result<Self> {
        let det = &(&alpha * &delta) - &(&beta * &gamma);
        if det.is_zero_below_precision() {
            return Err(Error::SingularMatrix);
        }
        Ok(ConjugationMatrix { entries: [alpha, beta, gamma, delta], det })
    }

    pub fn identity() -> Self {
        Self::diagonal(PuiseuxSeries::one(), PuiseuxSeries::one()).unwrap()
    }

    pub fn diagonal(alpha: PuiseuxSeries, delta: PuiseuxSeries) -> Result<Self> {
        Self::new(alpha, PuiseuxSeries::zero(), PuiseuxSeries::zero(), delta)
    }

    pub fn entries(&self) -> [&PuiseuxSeries; 4] {
        let [a, b, c, d] = &self.entries;
        [a, b, c, d]
    }

    pub fn det(&self) -> &PuiseuxSeries {
        &self.det
    }

    /// `λ·M`
    pub fn scaled(&self, lambda: &PuiseuxSeries) -> Result<Self> {
        let [a, b, c, d] = self.entries();
        Self::new(lambda * a, lambda * b, lambda * c, lambda * d)
    }

    pub fn mul(&self, other: &ConjugationMatrix) -> Result<Self> {
        let [a, b, c, d] = self.entries();
        let [e, f, g, h] = other.entries();
        Self::new(
            &(a * e) + &(b * g),
            &(a * f) + &(b * h),
            &(c * e) + &(d * g),
            &(c * f) + &(d * h),
        )
    }
}

impl fmt::Display for ConjugationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries();
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// Determinant by fraction-free (Bareiss) elimination with pivots of least
/// valuation. Quotients are exact in `ℚ[t^{±1/e}]` for exact entries.
#[allow(clippy::needless_range_loop)]
pub fn determinant(mut m: Vec<Vec<PuiseuxSeries>>, relative: i64) -> Result<PuiseuxSeries> {
    let n = m.len();
    if n == 0 {
        return Ok(PuiseuxSeries::one());
    }
    let mut negate = false;
    let mut prev = PuiseuxSeries::one();
    for k in 0..n {
        let mut best: Option<(usize, usize, Exponent)> = None;
        for i in k..n {
            for j in k..n {
                if let Valuation::Finite(v) = m[i][j].val() {
                    if best.as_ref().is_none_or(|b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else {
            // Remaining block vanishes below its truncation orders.
            let floor = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .filter_map(|(i, j)| m[i][j].precision())
                .min();
            return Ok(match floor {
                None => PuiseuxSeries::zero(),
                Some(tau) => {
                    let size = (n - k) as i64;
                    let prev_v = prev.val().finite().unwrap_or_default();
                    PuiseuxSeries::zero_up_to(tau * size - prev_v * (size - 1))
                }
            });
        };
        if pi != k {
            m.swap(pi, k);
            negate = !negate;
        }
        if pj != k {
            for row in m.iter_mut() {
                row.swap(pj, k);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let cross = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = cross.div_with_precision(&prev, relative)?;
            }
            m[i][k] = PuiseuxSeries::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Resultant of two forms of the same degree: the Sylvester determinant.
pub fn raw_resultant(a: &[PuiseuxSeries], b: &[PuiseuxSeries], relative: i64) -> Result<PuiseuxSeries> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    determinant(sylvester_matrix(a, b), relative)
}

/// Smallest valuation among the coefficients, or `None` if all vanish below
/// truncation. Errors when a truncated zero could hide a smaller valuation.
pub fn min_valuation<'a, I>(coeffs: I) -> Result<Option<Exponent>>
where
    I: IntoIterator<Item = &'a PuiseuxSeries> + Clone,
{
    let min = coeffs.clone().into_iter().filter_map(|c| c.val().finite()).min();
    if let Some(m) = min {
        for c in coeffs {
            if c.is_zero_below_precision() && c.precision().is_some_and(|p| p <= m) {
                return Err(Error::precision("a coefficient is unknown at the minimal valuation"));
            }
        }
    }
    Ok(min)
}

/// A point of `P¹(K)`.
#[derive(Clone, Debug)]
pub enum ProjectivePoint {
    Finite(PuiseuxSeries),
    Infinity,
}

#[derive(Clone, Debug)]
pub struct ValuedRationalMap {
    degree: usize,
    num: Vec<PuiseuxSeries>,
    den: Vec<PuiseuxSeries>,
    resultant: PuiseuxSeries,
    relative: i64,
}

impl ValuedRationalMap {
    /// `num = (a_0, …, a_d)`, `den = (b_0, …, b_d)`, leading coefficients first.
    pub fn new(num: Vec<PuiseuxSeries>, den: Vec<PuiseuxSeries>) -> Result<Self> {
        Self::with_precision(num, den, DEFAULT_RELATIVE_PRECISION)
    }

    /// As [`new`](Self::new), with the relative precision used for quotients
    /// inside the resultant computation.
    pub fn with_precision(num: Vec<PuiseuxSeries>, den: Vec<PuiseuxSeries>, relative: i64) -> Result<Self> {
        if num.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: num.len() });
        }
        if den.len() != num.len() {
            return Err(Error::DimensionMismatch { expected: num.len(), found: den.len() });
        }
        let degree = num.len() - 1;
        let Some(m) = min_valuation(num.iter().chain(&den))? else {
            return Err(Error::AllZero);
        };
        let shift = -m;
        let num: Vec<_> = num.iter().map(|c| c.shift(shift)).collect();
        let den: Vec<_> = den.iter().map(|c| c.shift(shift)).collect();
        let resultant = raw_resultant(&num, &den, relative)?;
        if resultant.is_zero_below_precision() {
            return Err(Error::DegenerateMap);
        }
        Ok(ValuedRationalMap { degree, num, den, resultant, relative })
    }

    /// Builds from integer coefficient lists (handy for tests and examples).
    pub fn from_ints(num: &[i64], den: &[i64]) -> Result<Self> {
        Self::new(
            num.iter().map(|&c| PuiseuxSeries::from_int(c)).collect(),
            den.iter().map(|&c| PuiseuxSeries::from_int(c)).collect(),
        )
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num(&self) -> &[PuiseuxSeries] {
        &self.num
    }

    pub fn den(&self) -> &[PuiseuxSeries] {
        &self.den
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &PuiseuxSeries> + Clone {
        self.num.iter().chain(&self.den)
    }

    pub fn relative_precision(&self) -> i64 {
        self.relative
    }

    /// Resultant of the stored (normalized) coefficient forms.
    pub fn resultant(&self) -> &PuiseuxSeries {
        &self.resultant
    }

    /// `v(Res) − 2d·min v(a_i, b_i)`; zero iff good reduction.
    pub fn ord_res(&self) -> Exponent {
        self.resultant.val().finite().expect("resultant is nonzero by construction")
    }

    /// Unnormalized coefficients of `f^M`.
    pub fn conjugate_raw(&self, m: &ConjugationMatrix) -> (Vec<PuiseuxSeries>, Vec<PuiseuxSeries>) {
        conjugate_forms(&self.num, &self.den, m.entries())
    }

    pub fn conjugate(&self, m: &ConjugationMatrix) -> Result<Self> {
        let (num, den) = self.conjugate_raw(m);
        Self::with_precision(num, den, self.relative)
    }

    /// Coefficientwise reduction to the residue field, common factors cancelled.
    pub fn reduce(&self) -> Result<ResidueMap> {
        let residues = |coeffs: &[PuiseuxSeries]| -> Result<Poly> {
            // a_i is the coefficient of z^{d-i}
            let mut out = Vec::with_capacity(coeffs.len());
            for c in coeffs.iter().rev() {
                out.push(c.residue()?);
            }
            Ok(Poly::new(out))
        };
        ResidueMap::from_forms(self.degree, residues(&self.num)?, residues(&self.den)?)
    }

    /// The reduced map keeps degree exactly `d`.
    pub fn good_reduction(&self) -> Result<bool> {
        Ok(self.reduce()?.degree() == self.degree)
    }

    /// Membership in the good-reduction part of `Rat_d`, tested on the
    /// coordinate functions: every monomial `a^I b^J / ρ` with `|I| + |J| = 2d`
    /// must have valuation `≥ 0`.
    pub fn in_beth(&self) -> bool {
        let vals: Vec<Option<Exponent>> = self.coefficients().map(|c| c.val().finite()).collect();
        let target = self.resultant.val().finite().expect("nonzero resultant");
        // Search for a monomial of total degree 2d whose valuation is below v(ρ).
        fn violates(vals: &[Option<Exponent>], remaining: usize, acc: Exponent, target: Exponent) -> bool {
            if remaining == 0 {
                return acc < target;
            }
            let Some((first, rest)) = vals.split_first() else {
                return false;
            };
            let best_rest = rest.iter().flatten().min().copied();
            for k in (0..=remaining).rev() {
                let Some(acc) = (match first {
                    Some(v) => Some(acc + *v * Exponent::from(k as i64)),
                    None if k == 0 => Some(acc),
                    None => None,
                }) else {
                    continue;
                };
                let left = remaining - k;
                let floor = match (left, best_rest) {
                    (0, _) => Some(acc),
                    (_, Some(b)) => Some(acc + b * Exponent::from(left as i64)),
                    (_, None) => None,
                };
                if floor.is_some_and(|f| f < target) && violates(rest, left, acc, target) {
                    return true;
                }
            }
            false
        }
        !violates(&vals, 2 * self.degree, Exponent::zero(), target)
    }

    /// `f ∘ g`
    pub fn compose(&self, g: &ValuedRationalMap) -> Result<Self> {
        let (num, den) = compose_forms(&self.num, &self.den, &g.num, &g.den);
        Self::with_precision(num, den, self.relative.max(g.relative))
    }

    /// `f^{∘l}` of degree `d^l`. The composed forms of a coprime pair stay
    /// coprime; the nonvanishing resultant is re-verified on construction.
    pub fn iterate(&self, l: u32) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidArgument("iteration count must be positive".into()));
        }
        let mut acc = self.clone();
        for _ in 1..l {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, z: &ProjectivePoint) -> Result<ProjectivePoint> {
        let (p, q) = match z {
            ProjectivePoint::Infinity => (self.num[0].clone(), self.den[0].clone()),
            ProjectivePoint::Finite(z) => {
                let horner = |coeffs: &[PuiseuxSeries]| {
                    coeffs
                        .iter()
                        .fold(PuiseuxSeries::zero(), |acc, c| &(&acc * z) + c)
                };
                (horner(&self.num), horner(&self.den))
            }
        };
        if q.is_exact_zero() {
            return Ok(ProjectivePoint::Infinity);
        }
        if q.is_zero_below_precision() {
            return Err(Error::precision("denominator vanishes below its truncation order"));
        }
        Ok(ProjectivePoint::Finite(p.checked_div(&q)?))
    }

    /// Same map: the coefficient vectors are proportional (below precision).
    pub fn same_map(&self, other: &ValuedRationalMap) -> bool {
        if self.degree != other.degree {
            return false;
        }
        let x: Vec<_> = self.coefficients().collect();
        let y: Vec<_> = other.coefficients().collect();
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                if !(x[i] * y[j]).eq_below_precision(&(x[j] * y[i])) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for ValuedRationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |f: &mut fmt::Formatter<'_>, coeffs: &[PuiseuxSeries]| -> fmt::Result {
            let d = coeffs.len() - 1;
            let mut first = true;
            for (i, c) in coeffs.iter().enumerate() {
                if c.is_exact_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                match d - i {
                    0 => write!(f, "({c})")?,
                    1 => write!(f, "({c})*z")?,
                    k => write!(f, "({c})*z^{k}")?,
                }
            }
            if first {
                write!(f, "0")?;
            }
            Ok(())
        };
        write!(f, "[")?;
        side(f, &self.num)?;
        write!(f, "] / [")?;
        side(f, &self.den)?;
        write!(f, "]")
    }
}

/// Reduction of a normalized map to the residue field ℚ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueMap {
    degree: usize,
    /// Dehomogenized numerator and denominator in `z`, ascending, coprime.
    num: Poly,
    den: Poly,
}

impl ResidueMap {
    /// From dehomogenized residue forms of nominal degree `d`.
    pub fn from_forms(d: usize, num: Poly, den: Poly) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::AllZero);
        }
        if num.is_zero() || den.is_zero() {
            // constant 0 or ∞
            let (num, den) = if num.is_zero() { (Poly::zero(), Poly::one()) } else { (Poly::one(), Poly::zero()) };
            return Ok(ResidueMap { degree: 0, num, den });
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        // common zeros at ∞ lower the degree too
        let (dn, dd) = (num.degree().unwrap(), den.degree().unwrap());
        let at_infinity = (d - g.degree().unwrap() - dn).min(d - g.degree().unwrap() - dd);
        let degree = d - g.degree().unwrap() - at_infinity;
        let lc = den.leading().unwrap().clone();
        let (num, den) = (num.scale(&lc.recip()), den.monic());
        Ok(ResidueMap { degree, num, den })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Value at a rational point; `None` at a pole.
    pub fn eval(&self, z: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(z);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(z) / d)
        }
    }
}

impl fmt::Display for ResidueMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        write_poly(f, &self.num, "z")?;
        write!(f, ")/(")?;
        write_poly(f, &self.den, "z")?;
        write!(f, ")")
    }
}
