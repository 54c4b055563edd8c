//! Exact rational functions of the parameter, `p(u)/q(u)` with `u = t^{1/e}`.
//!
//! These are the coefficient entries of a family `f(t)`. They can be expanded
//! at `t = 0` into Puiseux series or sampled exactly at rational `t`.

use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::forms::CoeffRing;
use crate::poly::Poly;
use crate::series::{Exponent, PuiseuxSeries, Valuation};

/// Kept reduced: `gcd(num, den) = 1`, `den` monic, `ram` as small as the
/// exponents allow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    ram: u32,
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly, ram: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if ram == 0 {
            return Err(Error::InvalidArgument("ramification must be positive".into()));
        }
        Ok(Self::reduced(num, den, ram))
    }

    fn reduced(num: Poly, den: Poly, ram: u32) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading().expect("nonzero denominator").clone();
        let inv = BigRational::one() / lead;
        let (num, den) = (num.scale(&inv), den.scale(&inv));
        // Deflate u ↦ u^k when only multiples of k occur.
        let used = |p: &Poly| {
            p.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .fold(0usize, |g, (k, _)| g.gcd(&k))
        };
        let k = (ram as usize).gcd(&used(&num).gcd(&used(&den)));
        if k > 1 {
            let deflate = |p: &Poly| Poly::new(p.coeffs().iter().step_by(k).cloned().collect());
            RatFunc { ram: ram / k as u32, num: deflate(&num), den: deflate(&den) }
        } else {
            RatFunc { ram, num, den }
        }
    }

    pub fn zero() -> Self {
        RatFunc { ram: 1, num: Poly::zero(), den: Poly::one() }
    }

    pub fn constant(c: BigRational) -> Self {
        RatFunc { ram: 1, num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    /// `t^exp` for any rational exponent.
    pub fn t_pow(exp: Exponent) -> Self {
        let ram = *exp.denom() as u32;
        let k = exp.numer().unsigned_abs() as usize;
        let mono = Poly::monomial(BigRational::one(), k);
        if exp.is_negative() {
            RatFunc { ram, num: Poly::one(), den: mono }
        } else {
            RatFunc { ram, num: mono, den: Poly::one() }
        }
    }

    pub fn t() -> Self {
        Self::t_pow(Exponent::one())
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `t`-adic valuation.
    pub fn val(&self) -> Valuation {
        match self.num.low_order() {
            None => Valuation::Infinite,
            Some(k) => {
                let l = self.den.low_order().expect("nonzero denominator");
                Valuation::Finite(Exponent::new(k as i64 - l as i64, self.ram as i64))
            }
        }
    }

    fn promote(&self, ram: u32) -> (Poly, Poly) {
        let m = (ram / self.ram) as usize;
        (self.num.inflate(m), self.den.inflate(m))
    }

    fn common(&self, other: &RatFunc) -> (u32, (Poly, Poly), (Poly, Poly)) {
        let ram = self.ram.lcm(&other.ram);
        (ram, self.promote(ram), other.promote(ram))
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let (ram, (a, b), (c, d)) = self.common(other);
        Self::reduced(&(&a * &d) + &(&c * &b), &b * &d, ram)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { ram: self.ram, num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        let (ram, (a, b), (c, d)) = self.common(other);
        Self::reduced(&a * &c, &b * &d, ram)
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone(), self.ram))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, n: i64) -> Result<RatFunc> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        Ok(Self::reduced(base.num.pow(k), base.den.pow(k), base.ram))
    }

    /// Expansion at `t = 0`, known below `tau` (exact when the denominator is
    /// a monomial).
    pub fn to_series(&self, tau: Option<Exponent>) -> Result<PuiseuxSeries> {
        PuiseuxSeries::expand_in_root(&self.num, &self.den, self.ram, tau)
    }

    /// Expansion carried `relative` units of `t` past the leading term.
    pub fn to_series_relative(&self, relative: i64) -> Result<PuiseuxSeries> {
        match self.val() {
            Valuation::Infinite => Ok(PuiseuxSeries::zero()),
            Valuation::Finite(v) => self.to_series(Some(v + Exponent::from(relative))),
        }
    }

    /// Exact value at `t = t0 > 0`. Needs an exact `ram`-th root of `t0`;
    /// `ZeroDenominator` at a pole.
    pub fn eval_at(&self, t0: &BigRational) -> Result<BigRational> {
        if !t0.is_positive() {
            return Err(Error::InvalidArgument("sample point must be positive".into()));
        }
        let u0 = rational_root(t0, self.ram).ok_or_else(|| {
            Error::InvalidArgument(format!("t0 = {t0} has no rational {}-th root", self.ram))
        })?;
        let d = self.den.eval(&u0);
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.num.eval(&u0) / d)
    }
}

fn rational_root(x: &BigRational, k: u32) -> Option<BigRational> {
    if k == 1 {
        return Some(x.clone());
    }
    let root = |n: &BigInt| {
        let r = n.nth_root(k);
        (num::pow(r.clone(), k as usize) == *n).then_some(r)
    };
    Some(BigRational::new(root(x.numer())?, root(x.denom())?))
}

impl CoeffRing for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::from_int(1)
    }
    fn add(&self, other: &Self) -> Self {
        RatFunc::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RatFunc::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFunc::mul(self, other)
    }
    fn from_rational(c: &BigRational) -> Self {
        RatFunc::constant(c.clone())
    }
}

impl fmt::Display for RatFunc {
    /// An expression in `t` accepted by the family-file parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let as_series = |p: &Poly| {
            PuiseuxSeries::expand_in_root(p, &Poly::one(), self.ram, None).expect("unit denominator")
        };
        let num = as_series(&self.num);
        if self.den == Poly::one() {
            return write!(f, "{num}");
        }
        let den = as_series(&self.den);
        let wrap = |s: &PuiseuxSeries| {
            if s.num_terms() > 1 || s.terms().any(|(_, c)| c.is_negative() || !c.is_integer()) {
                format!("({s})")
            } else {
                s.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&num), wrap(&den))
    }
}
