//! Sparse multivariate polynomials over ℚ, evaluated at points over any
//! [`CoeffRing`]. Used for test functions on the coefficient space of a family.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{BigRational, One, Signed, Zero};

use crate::forms::CoeffRing;

/// Exponent vector → coefficient; no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(nvars, c, vec![0; nvars])
    }

    pub fn monomial(nvars: usize, c: BigRational, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MultiPoly { nvars, terms }
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self::monomial(nvars, BigRational::one(), exps)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// A single term with coefficient `±1`.
    pub fn is_unit_monomial(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().all(|c| c.abs().is_one())
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        MultiPoly { nvars: self.nvars, terms }
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out = out.add(&MultiPoly::monomial(self.nvars, c1 * c2, e));
            }
        }
        out
    }

    /// Value at `x`, with powers computed by repeated multiplication.
    pub fn eval<R: CoeffRing>(&self, x: &[R]) -> R {
        assert_eq!(x.len(), self.nvars, "point dimension");
        let mut acc = R::zero();
        for (e, c) in &self.terms {
            let mut term = R::from_rational(c);
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    term = term.mul(xi);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Exact value at a rational point.
    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.nvars, "point dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                x.iter().zip(e).fold(c.clone(), |acc, (xi, &k)| acc * num::pow(xi.clone(), k as usize))
            })
            .sum()
    }

    /// Resultant of two binary forms of degree `d` as a polynomial in their
    /// coefficients `a_0, …, a_d, b_0, …, b_d` (in that variable order).
    pub fn resultant(d: usize) -> MultiPoly {
        let nvars = 2 * d + 2;
        let n = 2 * d;
        // Sylvester entry (row, col) as a variable index, if nonzero.
        let entry = |row: usize, col: usize| -> Option<usize> {
            let (base, shift) = if row < d { (0, row) } else { (d + 1, row - d) };
            (col >= shift && col - shift <= d).then(|| base + col - shift)
        };
        // Laplace expansion along rows, memoized on the set of free columns.
        fn minor(
            row: usize,
            free: u32,
            n: usize,
            nvars: usize,
            entry: &dyn Fn(usize, usize) -> Option<usize>,
            memo: &mut HashMap<u32, MultiPoly>,
        ) -> MultiPoly {
            if row == n {
                return MultiPoly::constant(nvars, BigRational::one());
            }
            if let Some(p) = memo.get(&free) {
                return p.clone();
            }
            let mut acc = MultiPoly::zero(nvars);
            let mut before = 0;
            for col in 0..n {
                if free & (1 << col) == 0 {
                    continue;
                }
                if let Some(v) = entry(row, col) {
                    let sub = minor(row + 1, free & !(1 << col), n, nvars, entry, memo);
                    let term = MultiPoly::var(nvars, v).mul(&sub);
                    acc = if before % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                before += 1;
            }
            memo.insert(free, acc.clone());
            acc
        }
        let mut memo = HashMap::new();
        minor(0, (1u32 << n) - 1, n, nvars, &entry, &mut memo)
    }
}

/// Variable names for the coefficient space of a degree-`d` family.
pub fn coefficient_names(d: usize) -> Vec<String> {
    (0..=d).map(|i| format!("a{i}")).chain((0..=d).map(|i| format!("b{i}"))).collect()
}

impl fmt::Display for MultiPoly {
    /// Uses the coefficient-space names `a0, …, bd` when the variable count is
    /// even and `x0, x1, …` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = if self.nvars.is_multiple_of(2) && self.nvars >= 4 {
            coefficient_names(self.nvars / 2 - 1)
        } else {
            (0..self.nvars).map(|i| format!("x{i}")).collect()
        };
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (i, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let mono: Vec<String> = e
                .iter()
                .zip(&names)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let mag = c.abs();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}
