//! Potential good reduction: minimizing `ord_res` over conjugates.
//!
//! The search space is the set of upper-triangular conjugations
//! `M(s, b) = [[t^s, b·t^{-s}], [0, t^{-s}]]`, i.e. `z ↦ t^{2s} z + b` with
//! determinant one. A tree point `(s, b)` names the closed disk of center `b`
//! and radius `|t|^{2s}`; `(0, 0)` is the Gauss point. Moving `s` down enlarges
//! the disk, moving it up and shifting `b` by `c·t^{2s}` descends into the
//! residue direction `c`.
//!
//! [`minimize_ord_res`] runs a deterministic descent over these moves and
//! only reports `no_pgr` after an independent grid enumeration
//! ([`brute_force_min`]) agrees. Verdicts are relative to shift residues in ℚ:
//! witnesses that need irrational residues are out of reach and surface as
//! `no_pgr` or `inconclusive`.

use std::cmp::Ordering;
use std::fmt;

use num::{BigRational, One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratmap::{min_valuation, ConjugationMatrix, ValuedRationalMap};
use crate::series::{Exponent, PuiseuxSeries};

#[derive(Clone, Debug)]
pub struct TreePoint {
    pub s: Exponent,
    pub shift: PuiseuxSeries,
}

impl TreePoint {
    pub fn new(s: Exponent, shift: PuiseuxSeries) -> Self {
        TreePoint { s, shift }
    }

    /// The Gauss point `(0, 0)`.
    pub fn base() -> Self {
        TreePoint::new(Exponent::zero(), PuiseuxSeries::zero())
    }

    pub fn matrix(&self) -> ConjugationMatrix {
        let up = PuiseuxSeries::t_pow(self.s);
        let down = PuiseuxSeries::t_pow(-self.s);
        let beta = &self.shift * &down;
        ConjugationMatrix::new(up, beta, PuiseuxSeries::zero(), down).expect("determinant is one")
    }

    /// Ramification index needed to write the matrix entries.
    pub fn ramification(&self) -> u32 {
        num::integer::lcm(*self.s.denom() as u32, self.shift.coarsest().ramification())
    }

    /// Same tree point: equal radius and `v(b - b') ≥ 2s`.
    pub fn same_point(&self, other: &TreePoint) -> bool {
        self.s == other.s
            && (&self.shift - &other.shift)
                .val()
                .finite()
                .is_none_or(|v| v >= self.s * 2)
    }
}

impl fmt::Display for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M = {}", self.matrix())
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// `|s| ≤ s_bound`
    pub s_bound: Exponent,
    /// Largest denominator allowed for `s`.
    pub e_max: u32,
    /// Smallest step in `s`.
    pub delta_min: Exponent,
    pub max_probes: usize,
    /// Relative precision handed to resultant computations.
    pub relative_precision: i64,
    /// Step of the confirmation grid in `s`.
    pub grid_step: Exponent,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            s_bound: Exponent::from(4),
            e_max: 12,
            delta_min: Exponent::new(1, 12),
            max_probes: 5000,
            relative_precision: crate::series::DEFAULT_RELATIVE_PRECISION,
            grid_step: Exponent::new(1, 4),
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.s_bound <= Exponent::zero()
            || self.e_max == 0
            || self.delta_min <= Exponent::zero()
            || self.max_probes == 0
            || self.grid_step <= Exponent::zero()
        {
            return Err(Error::InvalidArgument("search bounds must be positive".into()));
        }
        Ok(())
    }

    /// Step sizes: halving from 1 while `≥ δ_min`, then `δ_min` itself.
    pub fn steps(&self) -> Vec<Exponent> {
        let mut steps = Vec::new();
        let mut delta = Exponent::one();
        while delta >= self.delta_min {
            steps.push(delta);
            delta /= 2;
        }
        if !steps.contains(&self.delta_min) {
            steps.push(self.delta_min);
        }
        steps.sort();
        steps
    }

    fn admissible(&self, s: Exponent) -> bool {
        s.abs() <= self.s_bound && *s.denom() as u32 <= self.e_max
    }

    /// `−s_bound, …, s_bound` in steps of `grid_step`.
    pub fn grid_s_values(&self) -> Vec<Exponent> {
        let mut out = Vec::new();
        let mut s = -self.s_bound;
        while s <= self.s_bound {
            out.push(s);
            s += self.grid_step;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pgr,
    NoPgr,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pgr => "pgr",
            Verdict::NoPgr => "no_pgr",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct PgrReport {
    pub verdict: Verdict,
    /// Smallest `ord_res` found.
    pub min_ord_res: Exponent,
    pub witness: TreePoint,
    /// Ramification index of the witness matrix.
    pub ramification: u32,
    pub probes: usize,
    /// For a `pgr` verdict: good reduction of the witness conjugate, recomputed
    /// through the full resultant.
    pub witness_rechecked: Option<bool>,
    /// Grid minimum used to confirm a `no_pgr` verdict.
    pub oracle_min: Option<Exponent>,
}

/// `ord_res(f^{M(s,b)})`.
///
/// `M(s, b)` has determinant one, so the raw resultant of the conjugate equals
/// the resultant of `f`; only the coefficient minimum has to be recomputed.
pub fn ord_res_at(f: &ValuedRationalMap, p: &TreePoint) -> Result<Exponent> {
    let (num, den) = f.conjugate_raw(&p.matrix());
    let min = min_valuation(num.iter().chain(&den))?.ok_or(Error::AllZero)?;
    Ok(f.ord_res() - min * Exponent::from(2 * f.degree() as i64))
}

/// `ord_res_at` through a full conjugation and Sylvester resultant.
pub fn ord_res_at_full(f: &ValuedRationalMap, p: &TreePoint, relative: i64) -> Result<Exponent> {
    let (num, den) = f.conjugate_raw(&p.matrix());
    Ok(ValuedRationalMap::with_precision(num, den, relative)?.ord_res())
}

/// One probe, retried once through the full path with doubled precision.
fn probe(f: &ValuedRationalMap, p: &TreePoint, relative: i64) -> Result<Exponent> {
    match ord_res_at(f, p) {
        Err(Error::PrecisionExhausted(_)) => ord_res_at_full(f, p, relative * 2),
        other => other,
    }
}

/// Rational roots of the reduction of a form, after scaling the form by its
/// own content. `None` if the form cannot be reduced at this precision.
fn reduced_form_roots(form: &[PuiseuxSeries]) -> Option<Vec<BigRational>> {
    let m = min_valuation(form.iter()).ok()??;
    let mut ascending = Vec::with_capacity(form.len());
    for c in form.iter().rev() {
        ascending.push(c.shift(-m).residue().ok()?);
    }
    Some(Poly::new(ascending).rational_roots())
}

/// Residues of the directions at `p` worth descending into: zeros, poles and
/// fixed points of the reduced conjugate, preimages of the fixed residues,
/// and `0, ±1`. Ordered by `(|c|, c)`.
pub fn candidate_residues(f: &ValuedRationalMap, p: &TreePoint) -> Vec<BigRational> {
    let (num, den) = f.conjugate_raw(&p.matrix());
    let mut out = vec![BigRational::zero(), BigRational::one(), -BigRational::one()];
    out.extend(root_residues(&num, &den));
    out.sort_by(residue_order);
    out.dedup();
    out
}

/// Rational residues of zeros, poles, fixed points and preimages of fixed
/// points of the map given by the raw forms.
fn root_residues(num: &[PuiseuxSeries], den: &[PuiseuxSeries]) -> Vec<BigRational> {
    let mut out = Vec::new();
    out.extend(reduced_form_roots(num).unwrap_or_default());
    out.extend(reduced_form_roots(den).unwrap_or_default());
    // z·Q(z) − P(z) as a form of degree d + 1
    let mut fixed = den.to_vec();
    fixed.push(PuiseuxSeries::zero());
    for (i, a) in num.iter().enumerate() {
        fixed[i + 1] = &fixed[i + 1] - a;
    }
    let fixed_roots = reduced_form_roots(&fixed).unwrap_or_default();
    for e in &fixed_roots {
        let c = PuiseuxSeries::constant(e.clone());
        let pre: Vec<_> = num.iter().zip(den).map(|(a, b)| a - &(&c * b)).collect();
        out.extend(reduced_form_roots(&pre).unwrap_or_default());
    }
    out.extend(fixed_roots);
    out.sort_by(residue_order);
    out.dedup();
    out
}

fn residue_order(a: &BigRational, b: &BigRational) -> Ordering {
    a.abs().cmp(&b.abs()).then(a.cmp(b))
}

/// Shift residues from the reduced forms of the conjugate at `p`, without the
/// generic `0, ±1` added by [`candidate_residues`].
pub fn root_residues_at(f: &ValuedRationalMap, p: &TreePoint) -> Vec<BigRational> {
    let (num, den) = f.conjugate_raw(&p.matrix());
    root_residues(&num, &den)
}

/// Finite grid of tree points for [`brute_force_min`].
#[derive(Clone, Debug)]
pub struct Grid {
    pub s_values: Vec<Exponent>,
    pub shifts: Vec<PuiseuxSeries>,
}

impl Grid {
    /// `s` values from the config; shifts `0` and `c·t^{2s'}` for every grid
    /// level `s'` and every root residue `c ≠ 0` of the reduced forms at `(s', 0)`.
    pub fn root_residue_grid(f: &ValuedRationalMap, s_values: Vec<Exponent>) -> Self {
        let mut shifts = vec![PuiseuxSeries::zero()];
        for s in &s_values {
            for c in root_residues_at(f, &TreePoint::new(*s, PuiseuxSeries::zero())) {
                if !c.is_zero() {
                    shifts.push(PuiseuxSeries::monomial(c, *s * 2));
                }
            }
        }
        Grid { s_values, shifts }
    }

    /// Grid points in enumeration order; `(s, b)` with `v(b) > 2s` is the same
    /// point as `(s, 0)` and is skipped.
    pub fn points(&self) -> Vec<TreePoint> {
        let mut out = Vec::new();
        for s in &self.s_values {
            for b in &self.shifts {
                let redundant = b.val().finite().is_some_and(|v| v > *s * 2);
                if !redundant || b.is_exact_zero() {
                    out.push(TreePoint::new(*s, b.clone()));
                }
            }
        }
        out
    }
}

/// Exact minimum of `ord_res_at` over the grid; ties go to the first point in
/// enumeration order.
pub fn brute_force_min(f: &ValuedRationalMap, grid: &Grid) -> Result<(Exponent, TreePoint)> {
    let points = grid.points();
    let values: Vec<Result<Exponent>> = points
        .par_iter()
        .map(|p| probe(f, p, f.relative_precision()))
        .collect();
    let mut best: Option<(Exponent, usize)> = None;
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, i));
        }
    }
    let (v, i) = best.ok_or_else(|| Error::InvalidArgument("empty grid".into()))?;
    Ok((v, points[i].clone()))
}

struct Move {
    point: TreePoint,
    /// Tie-break key: step size, then up before down, then residue order.
    step: Exponent,
    down: bool,
    residue: BigRational,
}

fn moves(f: &ValuedRationalMap, at: &TreePoint, cfg: &SearchConfig) -> Vec<Move> {
    let residues = candidate_residues(f, at);
    let mut out = Vec::new();
    for step in cfg.steps() {
        let up = at.s - step;
        if cfg.admissible(up) {
            out.push(Move {
                point: TreePoint::new(up, at.shift.clone()),
                step,
                down: false,
                residue: BigRational::zero(),
            });
        }
        let down = at.s + step;
        if cfg.admissible(down) {
            for c in &residues {
                let shift = &at.shift + &PuiseuxSeries::monomial(c.clone(), at.s * 2);
                out.push(Move { point: TreePoint::new(down, shift), step, down: true, residue: c.clone() });
            }
        }
    }
    out
}

fn better(a: &(Exponent, &Move), b: &(Exponent, &Move)) -> bool {
    a.0.cmp(&b.0)
        .then(a.1.step.cmp(&b.1.step))
        .then(a.1.down.cmp(&b.1.down))
        .then(residue_order(&a.1.residue, &b.1.residue))
        == Ordering::Less
}

struct Descent<'a> {
    f: &'a ValuedRationalMap,
    cfg: &'a SearchConfig,
    probes: usize,
}

enum DescentEnd {
    LocalMin(Exponent, TreePoint),
    Budget(Exponent, TreePoint),
}

impl Descent<'_> {
    fn run(&mut self, start: TreePoint, start_value: Exponent) -> Result<DescentEnd> {
        let (mut at, mut value) = (start, start_value);
        while !value.is_zero() {
            let mut candidates = moves(self.f, &at, self.cfg);
            let budget = self.cfg.max_probes.saturating_sub(self.probes);
            let exhausted = candidates.len() > budget;
            candidates.truncate(budget);
            let values: Vec<Result<Exponent>> = candidates
                .par_iter()
                .map(|m| probe(self.f, &m.point, self.cfg.relative_precision))
                .collect();
            self.probes += candidates.len();
            let mut best: Option<(Exponent, &Move)> = None;
            for (m, v) in candidates.iter().zip(values) {
                let cand = (v?, m);
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            match best {
                Some((v, m)) if v < value => {
                    at = m.point.clone();
                    value = v;
                }
                _ if exhausted => return Ok(DescentEnd::Budget(value, at)),
                _ => return Ok(DescentEnd::LocalMin(value, at)),
            }
        }
        Ok(DescentEnd::LocalMin(value, at))
    }
}

/// Descent on `ord_res` over tree points, confirmed against the grid oracle.
pub fn minimize_ord_res(f: &ValuedRationalMap, cfg: &SearchConfig) -> Result<PgrReport> {
    cfg.validate()?;
    let mut search = Descent { f, cfg, probes: 1 };
    let mut at = TreePoint::base();
    let mut value = probe(f, &at, cfg.relative_precision)?;
    let mut oracle_min = None;
    loop {
        match search.run(at, value)? {
            DescentEnd::Budget(v, p) => {
                return Ok(report(f, Verdict::Inconclusive, v, p, search.probes, oracle_min, cfg));
            }
            DescentEnd::LocalMin(v, p) if v.is_zero() => {
                return Ok(report(f, Verdict::Pgr, v, p, search.probes, oracle_min, cfg));
            }
            DescentEnd::LocalMin(v, p) => {
                let grid = Grid::root_residue_grid(f, cfg.grid_s_values());
                let size = grid.points().len();
                if search.probes + size > cfg.max_probes {
                    return Ok(report(f, Verdict::Inconclusive, v, p, search.probes, oracle_min, cfg));
                }
                search.probes += size;
                let (grid_v, grid_p) = brute_force_min(f, &grid)?;
                oracle_min = Some(grid_v);
                if grid_v >= v {
                    return Ok(report(f, Verdict::NoPgr, v, p, search.probes, oracle_min, cfg));
                }
                // The grid beat the descent: resume from the better point.
                at = grid_p;
                value = grid_v;
            }
        }
    }
}

fn report(
    f: &ValuedRationalMap,
    verdict: Verdict,
    min_ord_res: Exponent,
    witness: TreePoint,
    probes: usize,
    oracle_min: Option<Exponent>,
    cfg: &SearchConfig,
) -> PgrReport {
    let mut verdict = verdict;
    let witness_rechecked = (verdict == Verdict::Pgr).then(|| {
        f.conjugate(&witness.matrix())
            .and_then(|g| ValuedRationalMap::with_precision(g.num().to_vec(), g.den().to_vec(), cfg.relative_precision))
            .and_then(|g| g.good_reduction())
            .unwrap_or(false)
    });
    if witness_rechecked == Some(false) {
        verdict = Verdict::Inconclusive;
    }
    PgrReport {
        verdict,
        min_ord_res,
        ramification: witness.ramification(),
        witness,
        probes,
        witness_rechecked,
        oracle_min,
    }
}

/// Behaviour of the conjugacy classes `π(f_n)` in the moduli space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientBehavior {
    /// `π(f_n)` subconverges in `M_d`; the group action is not defined at `f`.
    ConvergesInMd,
    /// `π(f_n) → ∞`; `f` survives as a boundary point of the compactified `M_d`.
    DegeneratesInMd,
}

impl QuotientBehavior {
    pub fn as_str(self) -> &'static str {
        match self {
            QuotientBehavior::ConvergesInMd => "converges_in_Md",
            QuotientBehavior::DegeneratesInMd => "degenerates_in_Md",
        }
    }
}

/// For a boundary map (`ord_res > 0`): potential good reduction ⟺ the
/// projected family stays bounded in `M_d`.
pub fn classify_quotient(f: &ValuedRationalMap, cfg: &SearchConfig) -> Result<(QuotientBehavior, PgrReport)> {
    if f.ord_res().is_zero() {
        return Err(Error::InvalidArgument("map has good reduction; not a boundary point".into()));
    }
    let report = minimize_ord_res(f, cfg)?;
    match report.verdict {
        Verdict::Pgr => Ok((QuotientBehavior::ConvergesInMd, report)),
        Verdict::NoPgr => Ok((QuotientBehavior::DegeneratesInMd, report)),
        Verdict::Inconclusive => Err(Error::Inconclusive(Box::new(report))),
    }
}
