//! Families `f(t)` of rational maps, their limits over `K`, and the numeric
//! check that sampled coefficients converge to the limit seminorm.
//!
//! A point over `K` with coordinates `x` gives the evaluation seminorm
//! `P ↦ r^{α·v(P(x))}`. Along the sample sequence `t_n = t₀^n`, the values
//! `|P(f(t_n))|^{1/n}` approach `t₀^{v(P(f))}`, which [`verify_convergence`]
//! measures.

use num::{BigRational, One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::conjugate_forms;
use crate::multipoly::MultiPoly;
use crate::pgr::{minimize_ord_res, PgrReport, SearchConfig, Verdict};
use crate::poly::ln_abs_rational;
use crate::ratfunc::RatFunc;
use crate::ratmap::{ConjugationMatrix, ValuedRationalMap};
use crate::series::{Exponent, PuiseuxSeries, Valuation};

/// The seminorm `P ↦ |P(x)|^α` with `|c| = r^{v(c)}`.
#[derive(Clone, Debug)]
pub struct EvaluationSeminorm {
    pub coords: Vec<PuiseuxSeries>,
    pub r: BigRational,
    pub alpha: Exponent,
}

/// `base^exponent`; `exponent = None` stands for the value `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeminormValue {
    pub base: BigRational,
    pub exponent: Option<Exponent>,
}

impl SeminormValue {
    pub fn mul(&self, other: &SeminormValue) -> Result<SeminormValue> {
        if self.base != other.base {
            return Err(Error::InvalidArgument("values over different bases".into()));
        }
        let exponent = match (self.exponent, other.exponent) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Ok(SeminormValue { base: self.base.clone(), exponent })
    }

    pub fn pow(&self, beta: Exponent) -> SeminormValue {
        SeminormValue { base: self.base.clone(), exponent: self.exponent.map(|e| e * beta) }
    }

    pub fn to_f64(&self) -> f64 {
        match self.exponent {
            None => 0.0,
            Some(e) => (ln_abs_rational(&self.base) * (*e.numer() as f64) / (*e.denom() as f64)).exp(),
        }
    }
}

impl EvaluationSeminorm {
    pub fn new(coords: Vec<PuiseuxSeries>, r: BigRational, alpha: Exponent) -> Result<Self> {
        if !(r.is_positive() && r < BigRational::one()) {
            return Err(Error::InvalidArgument("base scale must lie in (0, 1)".into()));
        }
        if !alpha.is_positive() {
            return Err(Error::InvalidArgument("flow exponent must be positive".into()));
        }
        Ok(EvaluationSeminorm { coords, r, alpha })
    }

    /// The representative with `α = 1` of the flow line through `self`.
    pub fn canonical(&self) -> EvaluationSeminorm {
        EvaluationSeminorm { alpha: Exponent::one(), ..self.clone() }
    }

    /// Same flow line: equal up to `α`.
    pub fn same_trajectory(&self, other: &EvaluationSeminorm) -> bool {
        self.r == other.r
            && self.coords.len() == other.coords.len()
            && self.coords.iter().zip(&other.coords).all(|(a, b)| a.eq_below_precision(b))
    }
}

impl PartialEq for EvaluationSeminorm {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha && self.same_trajectory(other)
    }
}

pub fn seminorm_eval(p: &MultiPoly, sigma: &EvaluationSeminorm) -> Result<SeminormValue> {
    if p.nvars() != sigma.coords.len() {
        return Err(Error::DimensionMismatch { expected: sigma.coords.len(), found: p.nvars() });
    }
    let value = p.eval(&sigma.coords);
    let exponent = match value.val() {
        Valuation::Finite(v) => Some(v * sigma.alpha),
        Valuation::Infinite if value.is_exact() => None,
        Valuation::Infinite => {
            return Err(Error::precision("polynomial vanishes to the working precision"));
        }
    };
    Ok(SeminormValue { base: sigma.r.clone(), exponent })
}

/// `x ↦ x^β`.
pub fn flow(sigma: &EvaluationSeminorm, beta: Exponent) -> Result<EvaluationSeminorm> {
    if !beta.is_positive() {
        return Err(Error::InvalidArgument("flow time must be positive".into()));
    }
    Ok(EvaluationSeminorm { alpha: sigma.alpha * beta, ..sigma.clone() })
}

/// A degree-`d` family with coefficients rational in `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub degree: usize,
    pub num: Vec<RatFunc>,
    pub den: Vec<RatFunc>,
    pub t0: Option<BigRational>,
}

impl FamilySpec {
    pub fn new(degree: usize, num: Vec<RatFunc>, den: Vec<RatFunc>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("degree must be positive".into()));
        }
        for v in [&num, &den] {
            if v.len() != degree + 1 {
                return Err(Error::DimensionMismatch { expected: degree + 1, found: v.len() });
            }
        }
        Ok(FamilySpec { degree, num, den, t0: None })
    }

    pub fn with_t0(mut self, t0: BigRational) -> Self {
        self.t0 = Some(t0);
        self
    }

    /// `a_0, …, a_d, b_0, …, b_d`.
    pub fn coefficients(&self) -> Vec<RatFunc> {
        self.num.iter().chain(&self.den).cloned().collect()
    }

    /// Coefficients at `t = t0`.
    pub fn sample(&self, t0: &BigRational) -> Result<Vec<BigRational>> {
        self.coefficients().iter().map(|c| c.eval_at(t0)).collect()
    }
}

/// The map over `K` obtained by expanding every coefficient at `t = 0`,
/// `relative` units past its leading term.
pub fn family_limit(family: &FamilySpec, relative: i64) -> Result<ValuedRationalMap> {
    let expand = |v: &[RatFunc]| v.iter().map(|c| c.to_series_relative(relative)).collect::<Result<Vec<_>>>();
    ValuedRationalMap::with_precision(expand(&family.num)?, expand(&family.den)?, relative)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyLabel {
    Interior,
    BoundaryPgr,
    BoundaryNoPgr,
}

impl FamilyLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyLabel::Interior => "interior",
            FamilyLabel::BoundaryPgr => "boundary_pgr",
            FamilyLabel::BoundaryNoPgr => "boundary_no_pgr",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilyClassification {
    pub label: FamilyLabel,
    pub limit: ValuedRationalMap,
    pub ord_res: Exponent,
    /// Present for boundary families.
    pub report: Option<PgrReport>,
}

/// Interior when the limit has good reduction; otherwise boundary, split by
/// whether some conjugate of the limit has good reduction.
pub fn classify_family(family: &FamilySpec, cfg: &SearchConfig) -> Result<FamilyClassification> {
    let limit = family_limit(family, cfg.relative_precision)?;
    let ord_res = limit.ord_res();
    if ord_res.is_zero() {
        return Ok(FamilyClassification { label: FamilyLabel::Interior, limit, ord_res, report: None });
    }
    let report = minimize_ord_res(&limit, cfg)?;
    let label = match report.verdict {
        Verdict::Pgr => FamilyLabel::BoundaryPgr,
        Verdict::NoPgr => FamilyLabel::BoundaryNoPgr,
        Verdict::Inconclusive => return Err(Error::Inconclusive(Box::new(report))),
    };
    Ok(FamilyClassification { label, limit, ord_res, report: Some(report) })
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub n: u32,
    pub epsilon: BigRational,
    /// `ε_n · ln |P(f(t_n))|`; `-inf` when the sample vanishes.
    pub measured_log: f64,
    /// `v · ln r`
    pub predicted_log: f64,
    /// `|measured / predicted − 1|`
    pub deviation: f64,
    /// The deviation was decided by exact rational comparison.
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// `v_t(P(f))`
    pub valuation: Valuation,
    pub r: BigRational,
    pub samples: Vec<Sample>,
    /// First sample index of the tail window, `⌈3N/4⌉`.
    pub tail_start: u32,
    pub tail_max_deviation: f64,
    pub final_deviation: f64,
}

impl ConvergenceReport {
    pub fn tail(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(move |s| s.n >= self.tail_start)
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.tail_max_deviation < tolerance
    }
}

/// Samples `|P(f(t₀^n))|^{1/n}` for `n = 1..=samples` against `t₀^{v(P(f))}`.
pub fn verify_convergence(
    family: &FamilySpec,
    p: &MultiPoly,
    t0: &BigRational,
    samples: u32,
) -> Result<ConvergenceReport> {
    if !(t0.is_positive() && *t0 < BigRational::one()) {
        return Err(Error::InvalidArgument("t0 must lie in (0, 1)".into()));
    }
    if samples < 5 {
        return Err(Error::InvalidArgument("at least 5 samples are needed".into()));
    }
    let coeffs = family.coefficients();
    if p.nvars() != coeffs.len() {
        return Err(Error::DimensionMismatch { expected: coeffs.len(), found: p.nvars() });
    }
    let valuation = p.eval(&coeffs).val();
    let ln_r = ln_abs_rational(t0);
    let rows: Vec<Result<Sample>> = (1..=samples)
        .into_par_iter()
        .map(|n| {
            let tn = t0.pow(n as i32);
            let point = family.sample(&tn).map_err(|e| match e {
                Error::ZeroDenominator => Error::SampleUndefined { n },
                other => other,
            })?;
            Ok(sample_row(n, &p.eval_rational(&point), valuation, t0, ln_r))
        })
        .collect();
    let samples_vec = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let tail_start = (3 * samples).div_ceil(4);
    let tail_max_deviation = samples_vec
        .iter()
        .filter(|s| s.n >= tail_start)
        .map(|s| s.deviation)
        .fold(0.0, f64::max);
    let final_deviation = samples_vec.last().map_or(0.0, |s| s.deviation);
    Ok(ConvergenceReport {
        valuation,
        r: t0.clone(),
        samples: samples_vec,
        tail_start,
        tail_max_deviation,
        final_deviation,
    })
}

fn sample_row(n: u32, value: &BigRational, valuation: Valuation, t0: &BigRational, ln_r: f64) -> Sample {
    let epsilon = BigRational::new(1.into(), n.into());
    let measured_log = if value.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_abs_rational(value) / n as f64
    };
    let (predicted_log, deviation, exact) = match valuation.finite() {
        None => (f64::NEG_INFINITY, if value.is_zero() { 0.0 } else { f64::INFINITY }, true),
        Some(_) if value.is_zero() => (0.0, 1.0, true),
        Some(v) => {
            let predicted_log = ln_r * (*v.numer() as f64) / (*v.denom() as f64);
            // |value| = t0^{n v} exactly when n·v is an integer
            let nv = v * Exponent::from(n as i64);
            if nv.is_integer() && value.abs() == t0.pow(nv.to_integer() as i32) {
                (predicted_log, 0.0, true)
            } else {
                (predicted_log, ((measured_log - predicted_log).exp() - 1.0).abs(), false)
            }
        }
    };
    Sample { n, epsilon, measured_log, predicted_log, deviation, exact }
}

/// Limit of the conjugated family `f(t)^{M(t)}`, computed both ways.
#[derive(Clone, Debug)]
pub struct ConjugatedLimit {
    /// Expansion of the exactly conjugated family.
    pub map: ValuedRationalMap,
    /// The limit of `f` conjugated by the limit of `M`.
    pub via_limits: ValuedRationalMap,
    pub orders_agree: bool,
    /// The limit has good reduction, so it lies in the beth locus.
    pub beth_landing: bool,
}

/// `matrix = [α, β, γ, δ]` as functions of `t`.
pub fn conjugated_family_limit(
    family: &FamilySpec,
    matrix: &[RatFunc; 4],
    relative: i64,
) -> Result<ConjugatedLimit> {
    let [a, b, c, d] = matrix;
    let det = a.mul(d).sub(&b.mul(c));
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let (num, den) = conjugate_forms(&family.num, &family.den, [a, b, c, d]);
    let conjugated = FamilySpec { degree: family.degree, num, den, t0: family.t0.clone() };
    let map = family_limit(&conjugated, relative)?;

    let entries = matrix.iter().map(|e| e.to_series_relative(relative)).collect::<Result<Vec<_>>>()?;
    let [ea, eb, ec, ed]: [PuiseuxSeries; 4] = entries.try_into().expect("four entries");
    let m = ConjugationMatrix::new(ea, eb, ec, ed)?;
    let via_limits = family_limit(family, relative)?.conjugate(&m)?;

    let orders_agree = map.same_map(&via_limits);
    let beth_landing = map.good_reduction()?;
    Ok(ConjugatedLimit { map, via_limits, orders_agree, beth_landing })
}
