//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so every criterion reports even when an earlier one fails.

use std::time::{Duration, Instant};

use num::{BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratdyn_core::forms::conjugate_forms;
use ratdyn_core::hybrid::{
    classify_family, conjugated_family_limit, family_limit, flow, seminorm_eval, verify_convergence,
    EvaluationSeminorm, FamilyLabel, FamilySpec,
};
use ratdyn_core::multipoly::MultiPoly;
use ratdyn_core::pgr::{brute_force_min, minimize_ord_res, Grid, SearchConfig, Verdict};
use ratdyn_core::ratfunc::RatFunc;
use ratdyn_core::ratmap::{raw_resultant, ValuedRationalMap};
use ratdyn_core::{Exponent, PuiseuxSeries, Valuation};

type Outcome = Result<String, String>;
/// `(name, check, time limit)`
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ex(n: i64, d: i64) -> Exponent {
    Exponent::new(n, d)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rf(c: i64) -> RatFunc {
    RatFunc::from_int(c)
}

fn t() -> RatFunc {
    RatFunc::t()
}

/// `c·t^k` with `c ∈ ±{1..=3}`, plus a second term one step higher half the time.
fn random_coeff(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> PuiseuxSeries {
    let term = |rng: &mut ChaCha8Rng, k: i64| {
        let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        PuiseuxSeries::monomial(q(c, 1), Exponent::from(k))
    };
    let k = rng.gen_range(lo..=hi);
    let mut c = term(rng, k);
    if rng.gen_bool(0.5) {
        c = &c + &term(rng, k + 1);
    }
    c
}

fn random_forms(rng: &mut ChaCha8Rng, d: usize, lo: i64, hi: i64, zero_prob: f64) -> (Vec<PuiseuxSeries>, Vec<PuiseuxSeries>) {
    let draw = |rng: &mut ChaCha8Rng| {
        (0..=d)
            .map(|_| if rng.gen_bool(zero_prob) { PuiseuxSeries::zero() } else { random_coeff(rng, lo, hi) })
            .collect::<Vec<_>>()
    };
    (draw(rng), draw(rng))
}

fn random_map(rng: &mut ChaCha8Rng, d: usize, lo: i64, hi: i64, zero_prob: f64) -> ValuedRationalMap {
    loop {
        let (a, b) = random_forms(rng, d, lo, hi, zero_prob);
        if let Ok(f) = ValuedRationalMap::new(a, b) {
            return f;
        }
    }
}

fn mobius_boundary() -> FamilySpec {
    FamilySpec::new(1, vec![rf(1), t().neg()], vec![t().pow(-1).unwrap(), rf(1)]).unwrap()
}

fn quadratic(lead: RatFunc, constant: RatFunc) -> FamilySpec {
    FamilySpec::new(2, vec![lead, rf(0), constant], vec![rf(0), rf(0), rf(1)]).unwrap()
}

/// Random integer-coefficient families of degree 2 with nonzero resultant.
fn integral_controls(seed: u64, count: usize) -> Vec<FamilySpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let mut draw = || (0..3).map(|_| rng.gen_range(-4..=4)).collect::<Vec<i64>>();
        let (a, b) = (draw(), draw());
        if ValuedRationalMap::from_ints(&a, &b).is_ok() {
            out.push(FamilySpec::new(2, a.iter().map(|&c| rf(c)).collect(), b.iter().map(|&c| rf(c)).collect()).unwrap());
        }
    }
    out
}

/// `(name, family, expected label)`
fn corpus() -> Vec<(String, FamilySpec, FamilyLabel)> {
    let mut out = vec![
        ("z^2 + t".to_string(), quadratic(rf(1), t()), FamilyLabel::Interior),
        ("t*z^2".to_string(), quadratic(t(), rf(0)), FamilyLabel::BoundaryPgr),
        ("z^2 + 1/t".to_string(), quadratic(rf(1), t().pow(-1).unwrap()), FamilyLabel::BoundaryNoPgr),
        ("(z - t)/(z/t + 1)".to_string(), mobius_boundary(), FamilyLabel::BoundaryPgr),
    ];
    for (i, f) in integral_controls(7, 2).into_iter().enumerate() {
        out.push((format!("control {}", i + 1), f, FamilyLabel::Interior));
    }
    out
}

fn resultant_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    while checked < 200 {
        let d = rng.gen_range(1..=3usize);
        let (a, b) = random_forms(&mut rng, d, -2, 2, 0.2);
        let entries: Vec<PuiseuxSeries> = (0..4).map(|_| random_coeff(&mut rng, -2, 2)).collect();
        let det = &(&entries[0] * &entries[3]) - &(&entries[1] * &entries[2]);
        // Oracle side: exact symbolic resultant, no division.
        let symbolic = MultiPoly::resultant(d);
        let point: Vec<PuiseuxSeries> = a.iter().chain(&b).cloned().collect();
        let res = symbolic.eval(&point);
        if res.is_exact_zero() || det.is_exact_zero() {
            continue;
        }
        let (ca, cb) = conjugate_forms(&a, &b, [&entries[0], &entries[1], &entries[2], &entries[3]]);
        let conj = raw_resultant(&ca, &cb, 64).map_err(|e| e.to_string())?;
        let (Valuation::Finite(vr), Valuation::Finite(vd)) = (res.val(), det.val()) else {
            return Err("unexpected zero".into());
        };
        let expected = vr + vd * Exponent::from((d * d + d) as i64);
        if conj.val() != Valuation::Finite(expected) {
            return Err(format!("d = {d}: v(Res f^M) = {}, expected {expected}", conj.val()));
        }
        checked += 1;
    }
    Ok(format!("{checked} random (f, M) pairs"))
}

fn mobius_example() -> Outcome {
    let family = mobius_boundary();
    let limit = family_limit(&family, 64).map_err(|e| e.to_string())?;
    if limit.ord_res() != ex(2, 1) {
        return Err(format!("ord_res = {}", limit.ord_res()));
    }
    let report = minimize_ord_res(&limit, &SearchConfig::default()).map_err(|e| e.to_string())?;
    if report.verdict != Verdict::Pgr || report.witness.s != ex(1, 2) || report.witness_rechecked != Some(true) {
        return Err(format!("search: {} at {}", report.verdict, report.witness));
    }
    let m = [RatFunc::t_pow(ex(1, 2)), rf(0), rf(0), RatFunc::t_pow(ex(-1, 2))];
    let out = conjugated_family_limit(&family, &m, 64).map_err(|e| e.to_string())?;
    let reduced = out.map.reduce().map_err(|e| e.to_string())?;
    if reduced.to_string() != "(z - 1)/(z + 1)" || !out.beth_landing || !out.orders_agree {
        return Err(format!("conjugated limit reduces to {reduced}"));
    }
    Ok(format!("ord_res 2, witness {}, conjugate reduces to {reduced}", report.witness))
}

fn corpus_classification() -> Outcome {
    let cfg = SearchConfig::default();
    let mut summary = Vec::new();
    for (name, family, expected) in corpus() {
        let c = classify_family(&family, &cfg).map_err(|e| format!("{name}: {e}"))?;
        if c.label != expected {
            return Err(format!("{name}: {} instead of {}", c.label.as_str(), expected.as_str()));
        }
        // Independent confirmation of each label.
        match c.label {
            FamilyLabel::Interior => {
                if !c.limit.good_reduction().unwrap_or(false) || !c.limit.in_beth() {
                    return Err(format!("{name}: interior limit without good reduction"));
                }
            }
            FamilyLabel::BoundaryPgr => {
                let r = c.report.as_ref().expect("boundary report");
                let g = c.limit.conjugate(&r.witness.matrix()).map_err(|e| e.to_string())?;
                if !g.good_reduction().unwrap_or(false) {
                    return Err(format!("{name}: witness does not give good reduction"));
                }
            }
            FamilyLabel::BoundaryNoPgr => {
                let r = c.report.as_ref().expect("boundary report");
                let grid = Grid::root_residue_grid(&c.limit, cfg.grid_s_values());
                let (oracle, _) = brute_force_min(&c.limit, &grid).map_err(|e| e.to_string())?;
                if oracle < r.min_ord_res || oracle.is_zero() {
                    return Err(format!("{name}: grid minimum {oracle} vs search {}", r.min_ord_res));
                }
            }
        }
        summary.push(format!("{name} -> {}", c.label.as_str()));
    }
    Ok(summary.join("; "))
}

fn descent_matches_oracle() -> Outcome {
    let cfg = SearchConfig {
        s_bound: ex(3, 1),
        e_max: 4,
        delta_min: ex(1, 4),
        max_probes: 1_000_000,
        ..SearchConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut boundary = 0;
    for i in 0..50 {
        let f = random_map(&mut rng, 2, -3, 3, 0.15);
        let report = minimize_ord_res(&f, &cfg).map_err(|e| format!("map {i}: {e}"))?;
        if report.verdict == Verdict::Inconclusive {
            return Err(format!("map {i}: search inconclusive"));
        }
        let grid = Grid::root_residue_grid(&f, cfg.grid_s_values());
        let (oracle, at) = brute_force_min(&f, &grid).map_err(|e| e.to_string())?;
        if oracle != report.min_ord_res {
            return Err(format!(
                "map {i} ({f}): descent {} at {}, grid {oracle} at {at}",
                report.min_ord_res, report.witness
            ));
        }
        if !f.ord_res().is_zero() {
            boundary += 1;
        }
    }
    Ok(format!("50 maps ({boundary} with ord_res > 0)"))
}

fn iteration_coherence() -> Outcome {
    let cfg = SearchConfig::default();
    let mut good = 0;
    for (name, family, _) in corpus() {
        let f = family_limit(&family, 64).map_err(|e| e.to_string())?;
        if f.good_reduction().map_err(|e| e.to_string())? {
            good += 1;
            for l in 2..=3 {
                let g = f.iterate(l).map_err(|e| e.to_string())?;
                if !g.good_reduction().map_err(|e| e.to_string())? {
                    return Err(format!("{name}: iterate {l} lost good reduction"));
                }
            }
        }
        let once = minimize_ord_res(&f, &cfg).map_err(|e| e.to_string())?;
        let f2 = f.iterate(2).map_err(|e| e.to_string())?;
        let twice = minimize_ord_res(&f2, &cfg).map_err(|e| e.to_string())?;
        if once.verdict == Verdict::Inconclusive || twice.verdict == Verdict::Inconclusive {
            return Err(format!("{name}: inconclusive search"));
        }
        if (once.verdict == Verdict::Pgr) != (twice.verdict == Verdict::Pgr) {
            return Err(format!("{name}: {} for f but {} for f^2", once.verdict, twice.verdict));
        }
    }
    Ok(format!("{good} good-reduction maps kept it up to f^3; pgr agrees for f and f^2 on all 6"))
}

fn hybrid_convergence() -> Outcome {
    let family = mobius_boundary();
    let n = 4;
    let var = |i| MultiPoly::var(n, i);
    let probes = vec![
        ("Res".to_string(), MultiPoly::resultant(1)),
        ("a0".to_string(), var(0)),
        ("a1".to_string(), var(1)),
        ("b0".to_string(), var(2)),
        ("b1".to_string(), var(3)),
        ("a1*b0".to_string(), var(1).mul(&var(2))),
    ];
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (name, p) in probes {
        let rep = verify_convergence(&family, &p, &q(1, 2), 30).map_err(|e| e.to_string())?;
        if p.is_unit_monomial() {
            if !rep.samples.iter().all(|s| s.exact && s.deviation == 0.0) {
                failures.push(format!("{name} not exact"));
            }
            summary.push(format!("{name} exact"));
        } else {
            summary.push(format!("{name} tail max {:.4}%", 100.0 * rep.tail_max_deviation));
            if !rep.within(0.02) {
                failures.push(format!(
                    "{name}: tail max deviation {:.4}% (final {:.4}%) exceeds 2%",
                    100.0 * rep.tail_max_deviation,
                    100.0 * rep.final_deviation
                ));
            }
        }
    }
    if failures.is_empty() {
        Ok(summary.join(", "))
    } else {
        Err(failures.join("; "))
    }
}

fn flow_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..100 {
        let n = rng.gen_range(1..=3usize);
        let coords: Vec<_> = (0..n).map(|_| random_coeff(&mut rng, -2, 3)).collect();
        let r = q(1, rng.gen_range(2..=9));
        let alpha = ex(rng.gen_range(1..=6), rng.gen_range(1..=4));
        let beta = ex(rng.gen_range(1..=6), rng.gen_range(1..=4));
        let gamma = ex(rng.gen_range(1..=6), rng.gen_range(1..=4));
        let sigma = EvaluationSeminorm::new(coords, r, alpha).map_err(|e| e.to_string())?;
        let mut p = MultiPoly::zero(n);
        for _ in 0..rng.gen_range(1..=3) {
            let exps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
            p = p.add(&MultiPoly::monomial(n, q(rng.gen_range(1..=5), 1), exps));
        }
        let err = |e: ratdyn_core::Error| e.to_string();
        if flow(&sigma, ex(1, 1)).map_err(err)? != sigma {
            return Err(format!("instance {i}: x^1 != x"));
        }
        let composed = flow(&flow(&sigma, beta).map_err(err)?, gamma).map_err(err)?;
        if composed != flow(&sigma, beta * gamma).map_err(err)? {
            return Err(format!("instance {i}: composition law"));
        }
        let lhs = seminorm_eval(&p, &flow(&sigma, beta).map_err(err)?).map_err(err)?;
        let rhs = seminorm_eval(&p, &sigma).map_err(err)?.pow(beta);
        if lhs != rhs {
            return Err(format!("instance {i}: eval power compatibility"));
        }
    }
    Ok("100 random instances".into())
}

fn beth_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut good, mut bad) = (0, 0);
    for i in 0..200 {
        let d = rng.gen_range(1..=3usize);
        let f = random_map(&mut rng, d, 0, 2, 0.2);
        let gr = f.good_reduction().map_err(|e| format!("map {i}: {e}"))?;
        if f.in_beth() != gr {
            return Err(format!("map {i} ({f}): in_beth {} but good_reduction {gr}", f.in_beth()));
        }
        if gr {
            good += 1;
        } else {
            bad += 1;
        }
    }
    Ok(format!("200 maps ({good} good reduction, {bad} not)"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("resultant transformation law", resultant_law, Duration::from_secs(30)),
        ("Mobius boundary example", mobius_example, Duration::from_secs(5)),
        ("corpus classification", corpus_classification, Duration::from_secs(60)),
        ("descent equals grid oracle", descent_matches_oracle, Duration::from_secs(300)),
        ("iteration coherence", iteration_coherence, Duration::from_secs(120)),
        ("hybrid convergence", hybrid_convergence, Duration::from_secs(30)),
        ("flow laws", flow_laws, Duration::from_secs(5)),
        ("beth locus equals good reduction", beth_equivalence, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(detail) if elapsed <= limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; took {elapsed:.1?}, limit {limit:?}")),
            Err(detail) => ("FAIL", detail),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {} [{status}] {name} ({elapsed:.2?}): {detail}", i + 1);
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
