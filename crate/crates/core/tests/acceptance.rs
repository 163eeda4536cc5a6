//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a nonzero status if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use lprime_core::arith::smallest_nondividing_prime;
use lprime_core::evaluator::{f_factor, f_logderiv, LogDerivMode};
use lprime_core::store::{resume_scan, ResumeOptions};
use lprime_core::theorems::{
    check_left_halfplane, check_zero_free_right, kendall_tau, verify_counting, verify_n, verify_offset_sum,
};
use lprime_core::zerofinder::{littlewood_boundary_sum, round_winding, winding_value, zero_offset_sum};
use lprime_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Reference values computed beforehand with mpmath at 30 digits:
/// Catalan's constant and `pi / (3 sqrt 3)`.
const CATALAN: f64 = 0.915965594177219;
const L1_CHI3: f64 = 0.604599788078073;

const SCAN_T: f64 = 100.0;

type Outcome = std::result::Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn listed(fails: &[String]) -> String {
    if fails.is_empty() {
        String::new()
    } else {
        format!(", failing: {}", fails.join("; "))
    }
}

fn err(e: Error) -> String {
    format!("error: {e}")
}

struct Scan {
    chi: DirichletCharacter,
    db: ZeroDatabase,
}

fn scans(tag: FunctionTag, moduli: &[u64]) -> Vec<Scan> {
    let cfg = ScanConfig::default();
    let chars: Vec<DirichletCharacter> = moduli
        .iter()
        .flat_map(|&q| primitive_characters(q).unwrap())
        .collect();
    chars
        .into_par_iter()
        .map(|chi| {
            let db = Scanner::new(&chi, tag, &cfg).unwrap().scan(SCAN_T).unwrap();
            Scan { chi, db }
        })
        .collect()
}

/// `L'` zeros up to height 100 for every primitive character mod 3, 4, 5.
fn lprime_scans() -> &'static [Scan] {
    static CELL: OnceLock<Vec<Scan>> = OnceLock::new();
    CELL.get_or_init(|| scans(FunctionTag::Lprime, &[3, 4, 5]))
}

/// `L` zeros up to height 100 for every primitive character mod 3, 4, 5, 7, 11.
fn l_scans() -> &'static [Scan] {
    static CELL: OnceLock<Vec<Scan>> = OnceLock::new();
    CELL.get_or_init(|| scans(FunctionTag::L, &[3, 4, 5, 7, 11]))
}

fn incomplete(s: &Scan) -> Option<String> {
    let missing = s.db.missing_below(SCAN_T);
    (!missing.is_empty()).then(|| {
        format!(
            "scan of {} for q={} idx={} incomplete: {missing:?}",
            s.db.function,
            s.chi.modulus(),
            s.chi.index()
        )
    })
}

fn functional_equation() -> Outcome {
    // Left of the strip the evaluator's own bound is a few 1e-9 relative.
    let cfg = EvalConfig::with_target(1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for q in [3u64, 4, 5, 7, 8, 11] {
        for chi in primitive_characters(q).map_err(err)? {
            for _ in 0..100 {
                let sigma = rng.random_range(-2.0..=3.0);
                let t = rng.random_range(2.0..=50.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let s = c(sigma, t);
                let lhs = l_value(&chi, s, 0, &cfg).map_err(err)?.value();
                let rhs = f_factor(&chi, s).map_err(err)?.value()
                    * l_value(&chi.conj(), 1.0 - s, 0, &cfg).map_err(err)?.value();
                worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
                points += 1;
            }
        }
    }
    verdict(worst < 1e-8, format!("max relative residual {worst:.2e} over {points} points (limit 1e-8)"))
}

fn special_values() -> Outcome {
    let cfg = EvalConfig::default();
    let a = l_value(&character(4, 1).map_err(err)?, c(2.0, 0.0), 0, &cfg).map_err(err)?.value();
    let b = l_value(&character(3, 1).map_err(err)?, c(1.0, 0.0), 0, &cfg).map_err(err)?.value();
    let ea = (a - CATALAN).norm();
    let eb = (b - L1_CHI3).norm();
    verdict(
        ea < 1e-10 && eb < 1e-10,
        format!("|L(2,chi_4) - ref| = {ea:.1e}, |L(1,chi_3) - ref| = {eb:.1e} (limit 1e-10)"),
    )
}

fn g1_near_one_right_of_two() -> Outcome {
    let cfg = EvalConfig::default();
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for q in [3u64, 4, 5, 7] {
        let chars = primitive_characters(q).map_err(err)?;
        let m = smallest_nondividing_prime(q) as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(q);
        for i in 0..1000 {
            let chi = &chars[i % chars.len()];
            let sigma = rng.random_range(2.0..=30.0);
            let s = c(sigma, rng.random_range(-50.0..=50.0));
            let bound = 2.0 * (1.0 + 8.0 * m / sigma) * (1.0 + 1.0 / m).powf(-sigma);
            let g = g1_value(chi, s, &cfg).map_err(err)?.value();
            let l = l_value(chi, s, 0, &cfg).map_err(err)?.value();
            for v in [(g - 1.0).norm(), (g / l - 1.0).norm()] {
                worst = worst.max(v / bound);
                if v > bound {
                    violations += 1;
                }
            }
        }
    }
    verdict(
        violations == 0,
        format!("{violations} violations in 8000 checks, largest value/bound {worst:.3}"),
    )
}

fn logderiv_asymptotic() -> Outcome {
    let mut violations = 0;
    let mut points = 0;
    let mut worst: f64 = 0.0;
    for q in [3u64, 5, 7] {
        for chi in primitive_characters(q).map_err(err)? {
            for i in 0..=40 {
                let sigma = -10.0 + 0.25 * i as f64;
                for j in 0..=96 {
                    let t = 2.0 + 0.5 * j as f64;
                    for s in [c(sigma, t), c(sigma, -t)] {
                        let d = f_logderiv(&chi, s, LogDerivMode::Direct).map_err(err)?.value();
                        let a = f_logderiv(&chi, s, LogDerivMode::Asymptotic).map_err(err)?.value();
                        let w = (1.0 - s).norm();
                        let bound = 5.0 / (w * w) + 5.0 * (-PI * t).exp();
                        let gap = (d - a).norm();
                        worst = worst.max(gap / bound);
                        points += 1;
                        if gap > bound {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    verdict(
        violations == 0,
        format!("{violations} violations at {points} grid points, largest gap/bound {worst:.3}"),
    )
}

fn random_rect(rng: &mut ChaCha8Rng) -> Rectangle {
    let sigma = rng.random_range(-2.0..2.5);
    let t = rng.random_range(-40.0..35.0);
    let w = rng.random_range(0.2..3.0);
    let h = rng.random_range(0.5..6.0);
    Rectangle::new(sigma, sigma + w, t, t + h).unwrap()
}

fn integrality() -> Outcome {
    let cfg = EvalConfig::default();
    let results: Vec<std::result::Result<(f64, usize, usize), String>> = [3u64, 4, 5]
        .par_iter()
        .map(|&q| {
            let chars = primitive_characters(q).map_err(err)?;
            let mut rng = ChaCha8Rng::seed_from_u64(100 + q);
            let (mut worst, mut redrawn, mut broken) = (0.0f64, 0usize, 0usize);
            let mut done = 0;
            while done < 500 {
                let chi = &chars[done % chars.len()];
                let target = if done % 2 == 0 { Target::LPrime } else { Target::L };
                let rect = random_rect(&mut rng);
                let split_s = rect.sigma_min + rng.random_range(0.2..0.8) * rect.width();
                let split_t = rect.t_min + rng.random_range(0.2..0.8) * rect.height();
                let mut values = vec![];
                let mut on_path = false;
                for r in std::iter::once(rect).chain(rect.split_at(split_s, split_t)) {
                    match winding_value(target, chi, &r, &cfg) {
                        Ok(v) => values.push(v),
                        Err(Error::ZeroOnPath { .. }) => on_path = true,
                        Err(e) => return Err(err(e)),
                    }
                }
                if on_path {
                    redrawn += 1;
                    continue;
                }
                done += 1;
                for v in &values {
                    worst = worst.max((v - v.round()).abs());
                }
                let counts: Vec<u32> = values.iter().map(|&v| round_winding(v)).collect::<Result<_>>().map_err(err)?;
                if counts[0] != counts[1..].iter().sum::<u32>() {
                    broken += 1;
                }
            }
            Ok((worst, redrawn, broken))
        })
        .collect();
    let mut worst: f64 = 0.0;
    let (mut redrawn, mut broken) = (0, 0);
    for r in results {
        let (w, r, b) = r?;
        worst = worst.max(w);
        redrawn += r;
        broken += b;
    }
    verdict(
        worst < 1e-3 && broken == 0,
        format!(
            "1500 rectangles: max distance to integer {worst:.1e} (limit 1e-3), {broken} additivity failures, {redrawn} redrawn for a zero on the boundary"
        ),
    )
}

fn littlewood() -> Outcome {
    let cfg = ScanConfig::default();
    let cases: Vec<(u64, f64)> = [3u64, 4, 5].iter().flat_map(|&q| [10.0, 20.0, 30.0].map(|t| (q, t))).collect();
    let rows: Vec<std::result::Result<(f64, f64), String>> = cases
        .par_iter()
        .map(|&(q, t)| {
            let chi = primitive_characters(q).map_err(err)?.remove(0);
            let scanner = Scanner::new(&chi, FunctionTag::Lprime, &cfg).map_err(err)?;
            let db = scanner.scan(t).map_err(err)?;
            let level = db.level_at(t).ok_or_else(|| format!("no cut at {t} for q={q}"))?;
            let (smin, smax) = scanner.sigma_range();
            let rect = Rectangle::new(smin, smax, level.lower, level.upper).map_err(err)?;
            let inside: Vec<ZeroRecord> = db.zeros.iter().filter(|z| rect.contains(z.point(), 0.0)).cloned().collect();
            let direct = zero_offset_sum(&inside, smin);
            let boundary = littlewood_boundary_sum(&chi, &rect, &cfg.eval).map_err(err)?;
            Ok(((direct - boundary).abs(), direct))
        })
        .collect();
    let (mut worst, mut largest) = (0.0f64, 0.0f64);
    for r in rows {
        let (gap, direct) = r?;
        worst = worst.max(gap);
        largest = largest.max(direct);
    }
    verdict(
        worst < 1e-5,
        format!("max |direct - boundary| {worst:.2e} over 9 (q, T) cases, sums up to {largest:.3} (limit 1e-5)"),
    )
}

fn prop_counting() -> Outcome {
    let mut fails = vec![];
    let mut worst: f64 = 0.0;
    for s in l_scans() {
        if let Some(msg) = incomplete(s) {
            return Err(msg);
        }
        for t in [50.0, 100.0] {
            let r = verify_n(&s.chi, t, &s.db, Statistic::N.default_c()).map_err(err)?;
            worst = worst.max(r.residual.abs() / r.band);
            if !r.pass {
                fails.push(format!("q={} idx={} T={t}: {:.2}", r.q, r.chi_index, r.residual));
            }
        }
    }
    verdict(
        fails.is_empty(),
        format!("{} characters x 2 heights, largest |residual|/band {worst:.3}{}", l_scans().len(), listed(&fails)),
    )
}

const T_GRID: [f64; 5] = [20.0, 40.0, 60.0, 80.0, 100.0];

fn theorem_counting() -> Outcome {
    let mut fails = vec![];
    let mut taus = vec![];
    for s in lprime_scans() {
        if let Some(msg) = incomplete(s) {
            return Err(msg);
        }
        let mut rel = vec![];
        for t in T_GRID {
            let r = verify_counting(&s.chi, t, &s.db, Statistic::N1.default_c()).map_err(err)?;
            if !r.pass {
                fails.push(format!("q={} idx={} T={t}", r.q, r.chi_index));
            }
            rel.push(r.relative_residual());
        }
        let tau = kendall_tau(&T_GRID, &rel);
        if !(tau < 0.0) {
            fails.push(format!("q={} idx={} tau={tau:.2}", s.chi.modulus(), s.chi.index()));
        }
        taus.push(tau);
    }
    let max_tau = taus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    verdict(
        fails.is_empty(),
        format!("{} characters, largest Kendall tau {max_tau:.2}{}", taus.len(), listed(&fails)),
    )
}

fn theorem_offset_sum() -> Outcome {
    let mut fails = vec![];
    let mut worst: f64 = 0.0;
    for s in lprime_scans() {
        for t in [20.0, 40.0, 60.0] {
            let r = verify_offset_sum(&s.chi, t, &s.db, Statistic::OffsetSum.default_c()).map_err(err)?;
            worst = worst.max(r.residual.abs() / r.band);
            if !r.pass {
                fails.push(format!("q={} idx={} T={t}", r.q, r.chi_index));
            }
        }
    }
    verdict(fails.is_empty(), format!("largest |residual|/band {worst:.3}{}", listed(&fails)))
}

fn zero_free_regions() -> Outcome {
    let cfg = ScanConfig::default();
    let mut notes = vec![];
    let mut ok = true;
    let right_fails = lprime_scans()
        .iter()
        .filter(|s| !check_zero_free_right(&s.chi, &s.db.zeros))
        .count();
    ok &= right_fails == 0;
    notes.push(format!("right bound violated on {right_fails} scans"));

    let chi23 = primitive_characters(23)
        .map_err(err)?
        .into_iter()
        .find(|c| c.kappa() == 1)
        .ok_or("no odd character mod 23")?;
    let left = check_left_halfplane(&chi23, 30.0, &cfg).map_err(err)?;
    ok &= left.pass && left.strip == 0;
    notes.push(format!("q=23 kappa=1 strip count {}", left.strip));

    let boxes: Vec<std::result::Result<u32, String>> = [3u64, 4, 5, 23]
        .iter()
        .flat_map(|&q| primitive_characters(q).unwrap())
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map(|chi| {
            [(6.0, 30.0), (-30.0, -6.0)]
                .into_par_iter()
                .map(move |(lo, hi)| {
                    let rect = Rectangle::new(-3.0, 0.0, lo, hi).map_err(err)?;
                    zerofinder::count_zeros_rect(Target::LPrime, chi, &rect, &cfg.eval).map_err(err)
                })
        })
        .collect();
    let mut nonzero = 0;
    let n_boxes = boxes.len();
    for b in boxes {
        if b? != 0 {
            nonzero += 1;
        }
    }
    ok &= nonzero == 0;
    notes.push(format!("{nonzero} of {n_boxes} left boxes hold zeros"));
    verdict(ok, notes.join(", "))
}

fn grh() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for s in l_scans() {
        for z in &s.db.zeros {
            worst = worst.max((z.beta - 0.5).abs());
            n += 1;
        }
    }
    verdict(worst < 1e-8, format!("{n} L-zeros, max |beta - 1/2| {worst:.1e} (limit 1e-8)"))
}

fn crash_resume() -> Outcome {
    use std::io::Write;
    let cfg = ScanConfig::default();
    let chi = character(3, 1).map_err(err)?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cold = resume_scan(&dir.path().join("cold.jsonl"), &chi, FunctionTag::Lprime, 30.0, &cfg, Default::default())
        .map_err(err)?;

    let path = dir.path().join("warm.jsonl");
    let mut kills = 0;
    for k in [2usize, 3, 4] {
        match resume_scan(&path, &chi, FunctionTag::Lprime, 30.0, &cfg, ResumeOptions { max_bands: Some(k) }) {
            Err(Error::Interrupted { .. }) => kills += 1,
            Err(e) => return Err(err(e)),
            Ok(_) => return Err(format!("scan finished before kill point {k}")),
        }
        // A torn record, as left by a crash during a write.
        let mut f = std::fs::OpenOptions::new().append(true).open(&path).map_err(|e| e.to_string())?;
        f.write_all(b"{\"q\":3,\"chi_index\":1,\"fn\":\"Lpr").map_err(|e| e.to_string())?;
    }
    let warm = resume_scan(&path, &chi, FunctionTag::Lprime, 30.0, &cfg, Default::default()).map_err(err)?;
    let same_len = warm.zeros.len() == cold.zeros.len();
    let worst = warm
        .zeros
        .iter()
        .zip(&cold.zeros)
        .map(|(a, b)| {
            if a.multiplicity != b.multiplicity {
                f64::INFINITY
            } else {
                (a.beta - b.beta).abs().max((a.gamma - b.gamma).abs())
            }
        })
        .fold(0.0, f64::max);
    verdict(
        same_len && worst <= 1e-9 && kills == 3,
        format!(
            "{kills} kills, {} vs {} zeros, max coordinate difference {worst:.1e} (limit 1e-9)",
            warm.zeros.len(),
            cold.zeros.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("functional equation", functional_equation),
        ("special values", special_values),
        ("G1 and G1/L near 1 for sigma >= 2", g1_near_one_right_of_two),
        ("F'/F asymptotic", logderiv_asymptotic),
        ("winding integrality and additivity", integrality),
        ("Littlewood boundary integral", littlewood),
        ("N(T, chi) band", prop_counting),
        ("N1(T, chi) band and trend", theorem_counting),
        ("offset sum band", theorem_offset_sum),
        ("zero-free regions", zero_free_regions),
        ("L-zeros on the critical line", grh),
        ("crash and resume", crash_resume),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id:>2} {tag}  {name}: {detail} [{secs:.1} s]");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
