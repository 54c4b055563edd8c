//! Truncated Puiseux series over ℚ: the valued field `K = ℚ((t^{1/e}))`.
//!
//! A series stores its exponents as integers over a ramification index `e`
//! together with an absolute truncation order `τ`: every coefficient at an
//! exponent `< τ` is known, nothing at or above `τ` is. `τ = +∞` marks an
//! exact finite sum. Operations propagate the tightest sound `τ`; two series
//! are only ever compared below their common truncation order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::integer::lcm;
use num::rational::Ratio;
use num::{BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;

pub type ExactRational = BigRational;

/// Exponents, valuations and truncation orders.
pub type Exponent = Ratio<i64>;

/// Relative precision (in exponent units past the leading term) used when a
/// quotient of exact series does not terminate.
pub const DEFAULT_RELATIVE_PRECISION: i64 = 64;

/// Additive valuation `v(x)`; `|x| = r^{v(x)}` for a base scale `0 < r < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Exponent),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<Exponent> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PuiseuxSeries {
    ram: u32,
    /// `(k, c)` stands for `c·t^{k/ram}`; strictly increasing in `k`, `c ≠ 0`.
    terms: Vec<(i64, BigRational)>,
    /// Truncation order numerator over `ram`; `None` for exact series.
    prec: Option<i64>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

impl PuiseuxSeries {
    fn from_raw(ram: u32, map: BTreeMap<i64, BigRational>, prec: Option<i64>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(k, c)| !c.is_zero() && prec.is_none_or(|p| *k < p))
            .collect();
        PuiseuxSeries { ram, terms, prec }
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents
    /// are summed. `prec = None` means exact.
    pub fn from_terms<I>(terms: I, prec: Option<Exponent>) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let mut ram = prec.map_or(1, |p| *p.denom());
        for (e, _) in &terms {
            ram = lcm(ram, *e.denom());
        }
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            let k = *e.numer() * (ram / *e.denom());
            *map.entry(k).or_insert_with(BigRational::zero) += c;
        }
        let prec = prec.map(|p| *p.numer() * (ram / *p.denom()));
        Self::from_raw(ram as u32, map, prec)
    }

    pub fn zero() -> Self {
        PuiseuxSeries { ram: 1, terms: Vec::new(), prec: None }
    }

    /// The series known to vanish below `tau`, with nothing known beyond.
    pub fn zero_up_to(tau: Exponent) -> Self {
        Self::from_terms(std::iter::empty(), Some(tau))
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, Exponent::zero())
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn monomial(c: BigRational, exp: Exponent) -> Self {
        Self::from_terms([(exp, c)], None)
    }

    /// `t^exp`
    pub fn t_pow(exp: Exponent) -> Self {
        Self::monomial(BigRational::one(), exp)
    }

    pub fn t() -> Self {
        Self::t_pow(Exponent::one())
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    /// Truncation order; `None` for an exact series.
    pub fn precision(&self) -> Option<Exponent> {
        self.prec.map(|p| Exponent::new(p, self.ram as i64))
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_none()
    }

    /// No known nonzero term (exact zero or zero up to truncation).
    pub fn is_zero_below_precision(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigRational)> + '_ {
        let e = self.ram as i64;
        self.terms.iter().map(move |(k, c)| (Exponent::new(*k, e), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn val(&self) -> Valuation {
        match self.terms.first() {
            Some((k, _)) => Valuation::Finite(Exponent::new(*k, self.ram as i64)),
            None => Valuation::Infinite,
        }
    }

    /// Leading exponent and coefficient.
    pub fn leading(&self) -> Option<(Exponent, &BigRational)> {
        self.terms
            .first()
            .map(|(k, c)| (Exponent::new(*k, self.ram as i64), c))
    }

    /// Coefficient at `exp`. `None` if `exp` lies at or beyond the truncation order.
    pub fn coeff(&self, exp: Exponent) -> Option<BigRational> {
        if let Some(p) = self.precision() {
            if exp >= p {
                return None;
            }
        }
        if (self.ram as i64) % exp.denom() != 0 {
            return Some(BigRational::zero());
        }
        let k = exp.numer() * (self.ram as i64 / exp.denom());
        Some(
            self.terms
                .binary_search_by_key(&k, |(j, _)| *j)
                .map(|i| self.terms[i].1.clone())
                .unwrap_or_else(|_| BigRational::zero()),
        )
    }

    /// A lower bound for the valuation: the leading exponent, or the truncation
    /// order of a truncated zero. `None` stands for the exact zero.
    fn lower_bound(&self) -> Option<i64> {
        match self.terms.first() {
            Some((k, _)) => Some(*k),
            None => self.prec,
        }
    }

    /// Same series over the finer grid `1/e`; `e` must be a multiple of `ram`.
    fn regrid(&self, e: u32) -> PuiseuxSeries {
        if e == self.ram {
            return self.clone();
        }
        let f = (e / self.ram) as i64;
        PuiseuxSeries {
            ram: e,
            terms: self.terms.iter().map(|(k, c)| (k * f, c.clone())).collect(),
            prec: self.prec.map(|p| p * f),
        }
    }

    /// View the series with ramification index `e·m`. The value is unchanged.
    pub fn ramify(&self, m: u32) -> PuiseuxSeries {
        assert!(m > 0, "ramification factor must be positive");
        self.regrid(self.ram * m)
    }

    /// Inverse of [`ramify`](Self::ramify): view over the coarser grid `1/(e/m)`.
    pub fn coarsen(&self, m: u32) -> Result<PuiseuxSeries> {
        let incompatible = Error::IncompatibleRamification { found: self.ram, factor: m };
        if m == 0 || !self.ram.is_multiple_of(m) {
            return Err(incompatible);
        }
        let m64 = m as i64;
        if self.terms.iter().any(|(k, _)| k % m64 != 0) || self.prec.is_some_and(|p| p % m64 != 0) {
            return Err(incompatible);
        }
        Ok(PuiseuxSeries {
            ram: self.ram / m,
            terms: self.terms.iter().map(|(k, c)| (k / m64, c.clone())).collect(),
            prec: self.prec.map(|p| p / m64),
        })
    }

    /// Smallest ramification index able to represent the series.
    pub fn coarsest(&self) -> PuiseuxSeries {
        let mut g = self.ram as i64;
        for (k, _) in &self.terms {
            g = g.gcd(k);
        }
        if let Some(p) = self.prec {
            g = g.gcd(&p);
        }
        self.coarsen(g as u32).expect("gcd divides every exponent")
    }

    /// Forget every term at or beyond `tau`.
    pub fn truncate(&self, tau: Exponent) -> PuiseuxSeries {
        let e = lcm(self.ram as i64, *tau.denom()) as u32;
        let s = self.regrid(e);
        let cut = tau.numer() * (e as i64 / tau.denom());
        let prec = min_opt(s.prec, Some(cut));
        PuiseuxSeries {
            ram: e,
            terms: s.terms.into_iter().filter(|(k, _)| *k < cut).collect(),
            prec,
        }
    }

    /// Coefficient at exponent zero of a series with nonnegative valuation.
    pub fn residue(&self) -> Result<BigRational> {
        if let Valuation::Finite(v) = self.val() {
            if v < Exponent::zero() {
                return Err(Error::NegativeValuation(v));
            }
        }
        self.coeff(Exponent::zero())
            .ok_or_else(|| Error::precision("constant term lies beyond the truncation order"))
    }

    /// `x == y` below the common truncation order.
    pub fn eq_below_precision(&self, other: &PuiseuxSeries) -> bool {
        (self - other).is_zero_below_precision()
    }

    pub fn scale(&self, c: &BigRational) -> PuiseuxSeries {
        if c.is_zero() {
            return PuiseuxSeries::zero();
        }
        PuiseuxSeries {
            ram: self.ram,
            terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by `t^exp`; exact.
    pub fn shift(&self, exp: Exponent) -> PuiseuxSeries {
        let e = lcm(self.ram as i64, *exp.denom()) as u32;
        let s = self.regrid(e);
        let d = exp.numer() * (e as i64 / exp.denom());
        PuiseuxSeries {
            ram: e,
            terms: s.terms.into_iter().map(|(k, c)| (k + d, c)).collect(),
            prec: s.prec.map(|p| p + d),
        }
    }

    pub fn checked_div(&self, rhs: &PuiseuxSeries) -> Result<PuiseuxSeries> {
        self.div_with_precision(rhs, DEFAULT_RELATIVE_PRECISION)
    }

    /// Quotient by lowest-term-first long division. Exact when both operands
    /// are exact and the division terminates; otherwise truncated at the
    /// sound order, or `relative` units past the leading term when both
    /// operands are exact.
    pub fn div_with_precision(&self, rhs: &PuiseuxSeries, relative: i64) -> Result<PuiseuxSeries> {
        if rhs.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        if rhs.terms.is_empty() {
            return Err(Error::precision("divisor vanishes below its truncation order"));
        }
        let e = lcm(self.ram, rhs.ram);
        let (x, y) = (self.regrid(e), rhs.regrid(e));
        let (vy, cy) = (y.terms[0].0, y.terms[0].1.clone());
        let Some(lbx) = x.lower_bound() else {
            return Ok(PuiseuxSeries::zero());
        };
        // q = x/y is known below min(τx, τy + v(x) - v(y)) - v(y)
        let sound = min_opt(x.prec, y.prec.map(|p| p + lbx - vy)).map(|p| p - vy);
        let bound = sound.unwrap_or(lbx - vy + relative * e as i64);
        let mut rem: BTreeMap<i64, BigRational> = x.terms.iter().cloned().collect();
        let mut quot = BTreeMap::new();
        let mut pruned = false;
        while let Some((&er, _)) = rem.iter().next() {
            let qe = er - vy;
            if qe >= bound {
                pruned = true;
                break;
            }
            let cr = rem.remove(&er).unwrap();
            let qc = cr / &cy;
            for (ye, yc) in y.terms.iter().skip(1) {
                let k = qe + ye;
                if k - vy >= bound {
                    pruned = true;
                    break;
                }
                let entry = rem.entry(k).or_insert_with(BigRational::zero);
                *entry -= &qc * yc;
                if entry.is_zero() {
                    rem.remove(&k);
                }
            }
            quot.insert(qe, qc);
        }
        let prec = if sound.is_none() && !pruned { None } else { Some(bound) };
        Ok(PuiseuxSeries::from_raw(e, quot, prec))
    }

    pub fn inv(&self) -> Result<PuiseuxSeries> {
        PuiseuxSeries::one().checked_div(self)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, n: i64) -> Result<PuiseuxSeries> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut sq = base;
        let mut acc = PuiseuxSeries::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Laurent expansion of `p(t)/q(t)` at `t = 0`, known below `tau`.
    ///
    /// A monomial denominator gives an exact result. Without `tau` a
    /// non-monomial quotient is expanded [`DEFAULT_RELATIVE_PRECISION`] units
    /// past its leading term.
    pub fn from_rational_function(p: &Poly, q: &Poly, tau: Option<Exponent>) -> Result<PuiseuxSeries> {
        Self::expand_in_root(p, q, 1, tau)
    }

    /// Expansion of `p(u)/q(u)` with `u = t^{1/e}`.
    pub fn expand_in_root(p: &Poly, q: &Poly, e: u32, tau: Option<Exponent>) -> Result<PuiseuxSeries> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let as_series = |poly: &Poly| PuiseuxSeries {
            ram: e,
            terms: poly
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k as i64, c.clone()))
                .collect(),
            prec: None,
        };
        let (num, den) = (as_series(p), as_series(q));
        let quotient = match tau {
            None => num.checked_div(&den)?,
            Some(tau) => {
                // Relative precision large enough to reach `tau`.
                let lead = match (num.val(), den.val()) {
                    (Valuation::Finite(a), Valuation::Finite(b)) => a - b,
                    _ => return Ok(PuiseuxSeries::zero()),
                };
                let units = ((tau - lead) * Exponent::from(e as i64)).ceil().to_integer();
                let rel = (units + e as i64 - 1).div_euclid(e as i64).max(1);
                num.div_with_precision(&den, rel)?
            }
        };
        Ok(match tau {
            Some(tau) if !quotient.is_exact() => quotient.truncate(tau),
            _ => quotient,
        })
    }

    /// Exact rational value at `t = t0`; only meaningful for exact series with
    /// integral exponents.
    pub fn eval_exact(&self, t0: &BigRational) -> Option<BigRational> {
        if !self.is_exact() {
            return None;
        }
        let s = self.coarsest();
        if s.ram != 1 {
            return None;
        }
        let mut acc = BigRational::zero();
        for (k, c) in &s.terms {
            let k = i32::try_from(*k).ok()?;
            acc += c * num::pow::Pow::pow(t0, k);
        }
        Some(acc)
    }

    fn write_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (exp, c) in self.terms() {
            let (neg, mag) = (c.is_negative(), c.abs());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = format_t_power(exp);
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `t`, `t^k`, or `t^(p/q)` for exponent `exp`; empty for exponent zero.
pub fn format_t_power(exp: Exponent) -> String {
    if exp.is_zero() {
        String::new()
    } else if exp.is_one() {
        "t".to_string()
    } else if exp.is_integer() && exp.is_positive() {
        format!("t^{}", exp.numer())
    } else {
        format!("t^({exp})")
    }
}

impl fmt::Display for PuiseuxSeries {
    /// Exact series print as expressions the family-file grammar accepts;
    /// truncated ones append `+ O(t^τ)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_terms(f)?;
        if let Some(p) = self.precision() {
            let mono = format_t_power(p);
            write!(f, " + O({})", if mono.is_empty() { "1".to_string() } else { mono })?;
        }
        Ok(())
    }
}

impl Add for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        let e = lcm(self.ram, rhs.ram);
        let (x, y) = (self.regrid(e), rhs.regrid(e));
        let mut map: BTreeMap<i64, BigRational> = x.terms.into_iter().collect();
        for (k, c) in y.terms {
            *map.entry(k).or_insert_with(BigRational::zero) += c;
        }
        PuiseuxSeries::from_raw(e, map, min_opt(x.prec, y.prec))
    }
}

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        PuiseuxSeries {
            ram: self.ram,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            prec: self.prec,
        }
    }
}

impl Sub for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self + &(-rhs)
    }
}

impl Mul for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        let e = lcm(self.ram, rhs.ram);
        let (x, y) = (self.regrid(e), rhs.regrid(e));
        let (Some(lx), Some(ly)) = (x.lower_bound(), y.lower_bound()) else {
            return PuiseuxSeries::zero();
        };
        let prec = min_opt(add_opt(x.prec, Some(ly)), add_opt(y.prec, Some(lx)));
        let mut map = BTreeMap::new();
        for (kx, cx) in &x.terms {
            for (ky, cy) in &y.terms {
                let k = kx + ky;
                if prec.is_some_and(|p| k >= p) {
                    break;
                }
                *map.entry(k).or_insert_with(BigRational::zero) += cx * cy;
            }
        }
        PuiseuxSeries::from_raw(e, map, prec)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $m(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ex(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    fn series(terms: &[(i64, i64, i64)], prec: Option<Exponent>) -> PuiseuxSeries {
        PuiseuxSeries::from_terms(terms.iter().map(|&(n, d, c)| (ex(n, d), q(c, 1))), prec)
    }

    #[test]
    fn valuation_of_leading_term() {
        assert_eq!(series(&[(2, 1, 1), (3, 1, 1)], None).val(), Valuation::Finite(ex(2, 1)));
        assert_eq!(PuiseuxSeries::zero().val(), Valuation::Infinite);
        let x = PuiseuxSeries::from_rational_function(
            &Poly::from_ints(&[0, 1, -1]),
            &Poly::from_ints(&[0, 0, 0, 1]),
            None,
        )
        .unwrap();
        assert_eq!(x.val(), Valuation::Finite(ex(-2, 1)));
        assert!(x.is_exact());
    }

    #[test]
    fn telescoping_product() {
        let geometric = PuiseuxSeries::from_rational_function(
            &Poly::one(),
            &Poly::from_ints(&[1, -1]),
            Some(ex(8, 1)),
        )
        .unwrap();
        let one_minus_t = series(&[(0, 1, 1), (1, 1, -1)], None);
        let prod = &one_minus_t * &geometric;
        assert_eq!(prod.precision(), Some(ex(8, 1)));
        assert!(prod.eq_below_precision(&PuiseuxSeries::one()));
        assert_eq!(prod.num_terms(), 1);
    }

    #[test]
    fn inverse_of_laurent_binomial() {
        // 1/(t^-1 + 1) = t - t^2 + t^3 - ...
        let x = series(&[(-1, 1, 1), (0, 1, 1)], None);
        let inv = x.inv().unwrap();
        for k in 1..10 {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(inv.coeff(ex(k, 1)), Some(q(sign, 1)));
        }
        assert!((&inv * &x).eq_below_precision(&PuiseuxSeries::one()));
        assert_eq!(inv.precision(), Some(ex(65, 1)));
    }

    #[test]
    fn fractional_exponents_combine() {
        let a = PuiseuxSeries::t_pow(ex(1, 2));
        let b = PuiseuxSeries::t_pow(ex(1, 3));
        let prod = &a * &b;
        assert_eq!(prod.ramification(), 6);
        assert_eq!(prod.val(), Valuation::Finite(ex(5, 6)));
    }

    #[test]
    fn residues() {
        assert_eq!(series(&[(0, 1, 3), (1, 1, 1)], None).residue().unwrap(), q(3, 1));
        assert_eq!(series(&[(2, 1, 1)], None).residue().unwrap(), q(0, 1));
        let x = PuiseuxSeries::from_rational_function(
            &Poly::from_ints(&[2, 1]),
            &Poly::from_ints(&[1, -1]),
            Some(ex(10, 1)),
        )
        .unwrap();
        assert_eq!(x.residue().unwrap(), q(2, 1));
        assert!(matches!(
            PuiseuxSeries::t_pow(ex(-1, 1)).residue(),
            Err(Error::NegativeValuation(_))
        ));
        assert!(matches!(
            PuiseuxSeries::zero_up_to(ex(-1, 1)).residue(),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn rational_function_expansions() {
        let t = PuiseuxSeries::from_rational_function(&Poly::x(), &Poly::one(), None).unwrap();
        assert!(t.eq_below_precision(&PuiseuxSeries::t()) && t.is_exact());
        let inv_t = PuiseuxSeries::from_rational_function(&Poly::one(), &Poly::x(), None).unwrap();
        assert_eq!(inv_t.val(), Valuation::Finite(ex(-1, 1)));
        assert!(inv_t.is_exact());
        let geo = PuiseuxSeries::from_rational_function(
            &Poly::one(),
            &Poly::from_ints(&[1, -1]),
            Some(ex(4, 1)),
        )
        .unwrap();
        assert_eq!(geo.precision(), Some(ex(4, 1)));
        assert!(geo.eq_below_precision(&series(&[(0, 1, 1), (1, 1, 1), (2, 1, 1), (3, 1, 1)], None)));
        assert!(matches!(
            PuiseuxSeries::from_rational_function(&Poly::one(), &Poly::zero(), None),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn ramify_keeps_value() {
        let t2 = PuiseuxSeries::t().ramify(2);
        assert_eq!(t2.ramification(), 2);
        assert_eq!(t2.terms[0].0, 2);
        assert_eq!(t2.val(), Valuation::Finite(ex(1, 1)));
        let mixed = &t2 + &PuiseuxSeries::t_pow(ex(1, 2));
        assert_eq!(mixed.val(), Valuation::Finite(ex(1, 2)));
        // automatic promotion gives the same series
        let direct = &PuiseuxSeries::t() + &PuiseuxSeries::t_pow(ex(1, 2));
        assert!(mixed.eq_below_precision(&direct));
        assert!(matches!(
            PuiseuxSeries::t_pow(ex(1, 2)).coarsen(2),
            Err(Error::IncompatibleRamification { .. })
        ));
        assert_eq!(t2.coarsen(2).unwrap().ramification(), 1);
    }

    #[test]
    fn division_errors_distinguish_exact_zero() {
        let x = PuiseuxSeries::one();
        assert!(matches!(x.checked_div(&PuiseuxSeries::zero()), Err(Error::DivisionByZero)));
        assert!(matches!(
            x.checked_div(&PuiseuxSeries::zero_up_to(ex(3, 1))),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn exact_division_terminates() {
        // (t^2 - 1)(t + 3) / (t - 1) = (t + 1)(t + 3)
        let a = series(&[(0, 1, -3), (1, 1, -1), (2, 1, 3), (3, 1, 1)], None);
        let b = series(&[(0, 1, -1), (1, 1, 1)], None);
        let quot = a.checked_div(&b).unwrap();
        assert!(quot.is_exact());
        assert!(quot.eq_below_precision(&series(&[(0, 1, 3), (1, 1, 4), (2, 1, 1)], None)));
    }

    #[test]
    fn truncated_multiplication_order() {
        let x = series(&[(1, 1, 1)], Some(ex(5, 1)));
        let y = series(&[(2, 1, 1)], Some(ex(4, 1)));
        assert_eq!((&x * &y).precision(), Some(ex(5, 1)));
        assert_eq!((&x + &y).precision(), Some(ex(4, 1)));
    }

    #[test]
    fn display_round_trips_through_terms() {
        let x = series(&[(-1, 2, -1), (0, 1, 2), (3, 1, 5)], None);
        assert_eq!(x.to_string(), "-t^(-1/2) + 2 + 5*t^3");
        let y = series(&[(1, 1, 1)], Some(ex(4, 1)));
        assert_eq!(y.to_string(), "t + O(t^4)");
    }

    fn arb_series() -> impl Strategy<Value = PuiseuxSeries> {
        (
            prop::collection::vec((-12i64..12, -4i64..5), 0..5),
            prop::sample::select(vec![1i64, 2, 3]),
            prop::option::of(13i64..30),
        )
            .prop_map(|(terms, den, prec)| {
                PuiseuxSeries::from_terms(
                    terms.into_iter().map(|(n, c)| (ex(n, den), q(c, 1))),
                    prec.map(|p| ex(p, den)),
                )
            })
    }

    proptest! {
        #[test]
        fn ultrametric_inequality(x in arb_series(), y in arb_series()) {
            let sum = &x + &y;
            let (vx, vy) = (x.val(), y.val());
            if let Valuation::Finite(_) = sum.val() {
                prop_assert!(sum.val() >= vx.min(vy));
            }
            // strict case, when the smaller valuation is still resolved
            let resolved = sum.precision().is_none_or(|tau| vx.min(vy) < Valuation::Finite(tau));
            if vx != vy && !(vx.min(vy)).is_infinite() && resolved {
                prop_assert_eq!(sum.val(), vx.min(vy));
            }
        }

        #[test]
        fn valuation_is_additive(x in arb_series(), y in arb_series()) {
            if let (Valuation::Finite(a), Valuation::Finite(b)) = (x.val(), y.val()) {
                prop_assert_eq!((&x * &y).val(), Valuation::Finite(a + b));
            }
        }

        #[test]
        fn residue_is_multiplicative(x in arb_series(), y in arb_series()) {
            let nonneg = |s: &PuiseuxSeries| s.val() >= Valuation::Finite(Exponent::zero());
            if nonneg(&x) && nonneg(&y) {
                if let (Ok(rx), Ok(ry)) = (x.residue(), y.residue()) {
                    prop_assert_eq!((&x * &y).residue().unwrap(), rx * ry);
                }
            }
        }

        #[test]
        fn ramify_preserves_valuation(x in arb_series(), m in 1u32..5) {
            let r = x.ramify(m);
            prop_assert_eq!(r.val(), x.val());
            prop_assert_eq!(r.precision(), x.precision());
            prop_assert!(r.coarsen(m).unwrap().eq_below_precision(&x));
        }

        #[test]
        fn rational_function_round_trip(
            p in prop::collection::vec(-5i64..6, 1..5),
            q in prop::collection::vec(-5i64..6, 1..4),
            tau in 1i64..12,
        ) {
            let (p, q) = (Poly::from_ints(&p), Poly::from_ints(&q));
            prop_assume!(!q.is_zero());
            let f = PuiseuxSeries::from_rational_function(&p, &q, Some(ex(tau, 1))).unwrap();
            let exact = |poly: &Poly| PuiseuxSeries::from_rational_function(poly, &Poly::one(), None).unwrap();
            let back = &f * &exact(&q);
            prop_assert!(back.eq_below_precision(&exact(&p)));
        }

        #[test]
        fn quotient_times_divisor(x in arb_series(), y in arb_series()) {
            prop_assume!(!y.is_zero_below_precision());
            let quot = x.checked_div(&y).unwrap();
            prop_assert!((&quot * &y).eq_below_precision(&x));
        }
    }
}
