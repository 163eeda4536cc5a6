//! Band scans of the census rectangle, and the counts `N` and `N1`.
//!
//! The half-plane `t >= 0` is cut at heights `0, h, 2h, ...` and each band
//! is processed together with its mirror image below the real axis. The
//! horizontal edges ("levels") are resolved once and shared by the two bands
//! they separate; when a level passes through a zero it is moved outward by
//! `1e-4 (1 + t)`, then by half of that, and so on.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{round_winding, sort_zeros, FunctionTag, Isolator, Rectangle, ZeroRecord};
use crate::characters::{smallest_nondividing_prime, DirichletCharacter};
use crate::error::{Error, Result};
use crate::evaluator::path::Tracker;
use crate::evaluator::EvalConfig;

/// Left edge of the sliver checked to the left of the scan rectangle.
pub const SLIVER_SIGMA: f64 = -1.0;

/// Above this height the sliver must be free of zeros.
pub const SLIVER_ZERO_FREE_HEIGHT: f64 = 6.0;

const PERTURB_RETRIES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub eval: EvalConfig,
    /// Left edge of the scan rectangle.
    pub delta0: f64,
    pub band_height: f64,
    /// Requested accuracy of zero coordinates.
    pub tol: f64,
    /// Seed of the split-line jitter.
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            eval: EvalConfig::default(),
            delta0: 1e-4,
            band_height: 2.0,
            tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        self.eval.validate()?;
        if !(self.delta0 > 0.0 && self.delta0 < 0.5) {
            return Err(Error::domain(format!("delta0 = {} outside (0, 1/2)", self.delta0)));
        }
        if !(self.band_height > 0.0 && self.band_height.is_finite()) {
            return Err(Error::domain("band height must be positive"));
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(Error::domain(format!("tolerance {} outside (0, 1e-3)", self.tol)));
        }
        Ok(())
    }
}

/// A horizontal cut at nominal height `nominal`, as actually placed above
/// (`upper`) and below (`lower`) the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeLevel {
    pub nominal: f64,
    pub upper: f64,
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandStatus {
    Pending,
    Done,
    Failed(String),
}

/// Outcome of one band `[t_lo, t_hi]` together with its mirror image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub t_lo: f64,
    pub t_hi: f64,
    pub status: BandStatus,
    pub bottom: Option<EdgeLevel>,
    pub top: Option<EdgeLevel>,
    /// Zeros found in both halves, with multiplicity.
    pub zeros: u32,
    /// Zero counts of the sliver `[SLIVER_SIGMA, delta0]` above and below
    /// the axis (`L'` scans only; `None` when unresolved).
    pub sliver: [Option<u32>; 2],
}

impl BandSummary {
    pub fn pending(t_lo: f64, t_hi: f64) -> Self {
        BandSummary {
            t_lo,
            t_hi,
            status: BandStatus::Pending,
            bottom: None,
            top: None,
            zeros: 0,
            sliver: [None, None],
        }
    }

    pub fn is_done(&self) -> bool {
        self.status == BandStatus::Done
    }

    /// Whether the sliver result contradicts the zero-free region
    /// `sigma <= 0, |t| >= 6`.
    pub fn sliver_violation(&self) -> bool {
        self.t_lo >= SLIVER_ZERO_FREE_HEIGHT && self.sliver.iter().any(|c| matches!(c, Some(n) if *n > 0))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Level {
    edge: EdgeLevel,
    inc_upper: f64,
    inc_lower: f64,
    sliver_upper: Option<f64>,
    sliver_lower: Option<f64>,
}

/// A count with the heights of the contour actually used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub count: u64,
    pub t_upper: f64,
    pub t_lower: f64,
}

/// Zeros found by a scan, with the bands that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroDatabase {
    pub q: u64,
    pub chi_index: usize,
    pub function: FunctionTag,
    pub bands: Vec<BandSummary>,
    pub zeros: Vec<ZeroRecord>,
}

impl ZeroDatabase {
    pub fn new(q: u64, chi_index: usize, function: FunctionTag) -> Self {
        ZeroDatabase {
            q,
            chi_index,
            function,
            bands: Vec::new(),
            zeros: Vec::new(),
        }
    }

    /// Height up to which every band from 0 is done.
    pub fn t_done(&self) -> f64 {
        let mut t = 0.0;
        for b in &self.bands {
            if !b.is_done() || b.t_lo > t {
                break;
            }
            t = b.t_hi;
        }
        t
    }

    /// Bands below `t` that are not done, including the uncovered range.
    pub fn missing_below(&self, t: f64) -> Vec<(f64, f64)> {
        let mut missing: Vec<(f64, f64)> = self
            .bands
            .iter()
            .filter(|b| !b.is_done() && b.t_lo < t)
            .map(|b| (b.t_lo, b.t_hi))
            .collect();
        let covered = self.bands.iter().map(|b| b.t_hi).fold(0.0, f64::max);
        if t > covered {
            missing.push((covered, t));
        }
        missing
    }

    /// Zeros with `|gamma| <= t`, provided the scan covers that height.
    pub fn zeros_within(&self, t: f64) -> Result<Vec<ZeroRecord>> {
        if t > self.t_done() {
            return Err(Error::IncompleteScan {
                missing: self.missing_below(t),
            });
        }
        Ok(self.zeros.iter().filter(|z| z.gamma.abs() <= t).cloned().collect())
    }

    /// Number of zeros with `|gamma| <= t`, with multiplicity.
    pub fn count_within(&self, t: f64) -> Result<u64> {
        Ok(self.zeros_within(t)?.iter().map(|z| z.multiplicity as u64).sum())
    }

    /// The cut placed at nominal height `t`, if a completed band ends there.
    pub fn level_at(&self, t: f64) -> Option<EdgeLevel> {
        self.bands
            .iter()
            .filter(|b| b.is_done())
            .flat_map(|b| [b.bottom, b.top])
            .flatten()
            .find(|e| e.nominal == t)
    }

    /// Adds the result of one band, replacing an earlier entry for it.
    pub fn merge_band(&mut self, summary: BandSummary, zeros: Vec<ZeroRecord>) {
        self.bands.retain(|b| b.t_lo != summary.t_lo);
        self.bands.push(summary);
        self.bands.sort_by(|a, b| a.t_lo.total_cmp(&b.t_lo));
        self.zeros.extend(zeros);
        sort_zeros(&mut self.zeros);
    }
}

/// Scans one function of one primitive character.
#[derive(Debug, Clone)]
pub struct Scanner<'a> {
    chi: &'a DirichletCharacter,
    tag: FunctionTag,
    cfg: ScanConfig,
    sigma_min: f64,
    sigma_max: f64,
}

impl<'a> Scanner<'a> {
    pub fn new(chi: &'a DirichletCharacter, tag: FunctionTag, cfg: &ScanConfig) -> Result<Self> {
        cfg.validate()?;
        if !chi.is_primitive() || chi.is_principal() {
            return Err(Error::domain("scans require a primitive nonprincipal character"));
        }
        let sigma_max = match tag {
            FunctionTag::L => 1.5,
            FunctionTag::Lprime => {
                let m = smallest_nondividing_prime(chi.modulus()) as f64;
                1.0 + 1.5 * m
            }
        };
        Ok(Scanner {
            chi,
            tag,
            cfg: *cfg,
            sigma_min: cfg.delta0,
            sigma_max,
        })
    }

    pub fn config(&self) -> &ScanConfig {
        &self.cfg
    }

    pub fn function(&self) -> FunctionTag {
        self.tag
    }

    pub fn character(&self) -> &DirichletCharacter {
        self.chi
    }

    /// `(sigma_min, sigma_max)` of the scan rectangle.
    pub fn sigma_range(&self) -> (f64, f64) {
        (self.sigma_min, self.sigma_max)
    }

    /// Nominal bands covering `[t_from, t_to]`.
    pub fn nominal_bands(&self, t_from: f64, t_to: f64) -> Vec<(f64, f64)> {
        let h = self.cfg.band_height;
        let mut out = Vec::new();
        let mut lo = t_from;
        while lo < t_to {
            let k = (lo / h + 1e-9).floor() + 1.0;
            let hi = (k * h).min(t_to);
            let hi = if t_to - hi < 1e-9 { t_to } else { hi };
            out.push((lo, hi));
            lo = hi;
        }
        out
    }

    fn tracker(&self) -> Tracker<'a> {
        Tracker::new(self.tag.tracked(), self.chi, &self.cfg.eval)
    }

    fn horizontal(&self, tracker: &Tracker<'_>, from: f64, t: f64) -> Result<f64> {
        tracker.polyline(&[Complex64::new(from, t), Complex64::new(self.sigma_max.max(from), t)])
    }

    /// First height in the perturbation sequence whose edge avoids zeros.
    fn place(&self, tracker: &Tracker<'_>, nominal: f64, sign: f64) -> Result<(f64, f64)> {
        let eps = 1e-4 * (1.0 + nominal.abs());
        let mut last = None;
        for k in 0..=PERTURB_RETRIES {
            let shift = if k == 0 { 0.0 } else { eps / f64::powi(2.0, k as i32 - 1) };
            let t = sign * (nominal + shift);
            match self.horizontal(tracker, self.sigma_min, t) {
                Ok(inc) => return Ok((t, inc)),
                Err(e @ Error::ZeroOnPath { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one placement attempt"))
    }

    fn sliver_edge(&self, tracker: &Tracker<'_>, t: f64) -> Option<f64> {
        if self.tag != FunctionTag::Lprime {
            return None;
        }
        tracker
            .polyline(&[Complex64::new(SLIVER_SIGMA, t), Complex64::new(self.sigma_min, t)])
            .ok()
    }

    pub(crate) fn resolve_level(&self, nominal: f64) -> Result<Level> {
        let tracker = self.tracker();
        let (upper, inc_upper) = self.place(&tracker, nominal, 1.0)?;
        let (lower, inc_lower) = if nominal == 0.0 {
            (upper, inc_upper)
        } else {
            self.place(&tracker, nominal, -1.0)?
        };
        let sliver_upper = self.sliver_edge(&tracker, upper);
        let sliver_lower = if lower == upper {
            sliver_upper
        } else {
            self.sliver_edge(&tracker, lower)
        };
        Ok(Level {
            edge: EdgeLevel { nominal, upper, lower },
            inc_upper,
            inc_lower,
            sliver_upper,
            sliver_lower,
        })
    }

    fn band_seed(&self, t_lo: f64, half: u64) -> u64 {
        self.cfg.seed ^ t_lo.to_bits().wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ half
    }

    fn run_band(&self, bottom: &Level, top: &Level) -> Result<(BandSummary, Vec<ZeroRecord>)> {
        let (b, t) = (bottom.edge, top.edge);
        let halves = [
            (b.upper, t.upper, bottom.inc_upper, top.inc_upper, bottom.sliver_upper, top.sliver_upper),
            (t.lower, b.lower, top.inc_lower, bottom.inc_lower, top.sliver_lower, bottom.sliver_lower),
        ];
        let mut zeros = Vec::new();
        let mut sliver = [None, None];
        for (half, (y0, y1, h0, h1, s0, s1)) in halves.into_iter().enumerate() {
            let rect = Rectangle::new(self.sigma_min, self.sigma_max, y0, y1)?;
            let seed = self.band_seed(b.nominal, half as u64);
            let mut iso = Isolator::new(self.tag.tracked(), self.chi, self.cfg.tol, &self.cfg.eval, seed)?;
            let c = rect.corners();
            iso.remember(c[0], c[1], h0);
            iso.remember(c[3], c[2], h1);
            let n = iso.count(&rect)?;
            zeros.extend(iso.isolate(&rect, n)?);
            if let (Some(s0), Some(s1)) = (s0, s1) {
                let inner = iso.increment(c[0], c[3])?;
                let far = self
                    .tracker()
                    .polyline(&[Complex64::new(SLIVER_SIGMA, y0), Complex64::new(SLIVER_SIGMA, y1)]);
                sliver[half] = far
                    .ok()
                    .and_then(|far| round_winding((s0 + inner - s1 - far) / (2.0 * PI)).ok());
            }
        }
        sort_zeros(&mut zeros);
        for z in &zeros {
            z.validate()?;
        }
        let summary = BandSummary {
            t_lo: b.nominal,
            t_hi: t.nominal,
            status: BandStatus::Done,
            bottom: Some(b),
            top: Some(t),
            zeros: zeros.iter().map(|z| z.multiplicity).sum(),
            sliver,
        };
        Ok((summary, zeros))
    }

    /// Processes the band `[t_lo, t_hi]` and its mirror image. Failures are
    /// reported in the summary status.
    pub fn band(&self, t_lo: f64, t_hi: f64) -> (BandSummary, Vec<ZeroRecord>) {
        let levels = self.resolve_level(t_lo).and_then(|b| Ok((b, self.resolve_level(t_hi)?)));
        self.band_from(t_lo, t_hi, levels)
    }

    fn band_from(&self, t_lo: f64, t_hi: f64, levels: Result<(Level, Level)>) -> (BandSummary, Vec<ZeroRecord>) {
        match levels.and_then(|(b, t)| self.run_band(&b, &t)) {
            Ok(out) => out,
            Err(e) => {
                let mut s = BandSummary::pending(t_lo, t_hi);
                s.status = BandStatus::Failed(e.to_string());
                (s, Vec::new())
            }
        }
    }

    /// Processes the given consecutive bands in parallel; each cut is
    /// resolved once.
    pub fn bands(&self, nominal: &[(f64, f64)]) -> Vec<(BandSummary, Vec<ZeroRecord>)> {
        let mut heights: Vec<f64> = nominal.iter().map(|b| b.0).collect();
        if let Some(last) = nominal.last() {
            heights.push(last.1);
        }
        let levels: Vec<Option<Level>> = heights
            .par_iter()
            .map(|&h| self.resolve_level(h).ok())
            .collect();
        nominal
            .par_iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                let pair = match (&levels[i], &levels[i + 1]) {
                    (Some(b), Some(t)) if b.edge.nominal == lo && t.edge.nominal == hi => Ok((*b, *t)),
                    _ => self.resolve_level(lo).and_then(|b| Ok((b, self.resolve_level(hi)?))),
                };
                self.band_from(lo, hi, pair)
            })
            .collect()
    }

    /// Full scan up to height `t_max`.
    pub fn scan(&self, t_max: f64) -> Result<ZeroDatabase> {
        if !(t_max >= 2.0 && t_max.is_finite()) {
            return Err(Error::domain(format!("scan height {t_max} must be at least 2")));
        }
        let mut db = ZeroDatabase::new(self.chi.modulus(), self.chi.index(), self.tag);
        for (summary, zeros) in self.bands(&self.nominal_bands(0.0, t_max)) {
            db.merge_band(summary, zeros);
        }
        Ok(db)
    }

    /// Zero count of the whole rectangle up to height `t`, from a single
    /// contour.
    pub fn count_total(&self, t: f64) -> Result<CountResult> {
        if !(t >= 2.0 && t.is_finite()) {
            return Err(Error::domain(format!("height {t} must be at least 2")));
        }
        let tracker = self.tracker();
        let level = self.resolve_level(t)?;
        let (lo, hi) = (level.edge.lower, level.edge.upper);
        let right = tracker.polyline(&[Complex64::new(self.sigma_max, lo), Complex64::new(self.sigma_max, hi)])?;
        let left = tracker.polyline(&[Complex64::new(self.sigma_min, lo), Complex64::new(self.sigma_min, hi)])?;
        let w = (level.inc_lower + right - level.inc_upper - left) / (2.0 * PI);
        Ok(CountResult {
            count: round_winding(w)? as u64,
            t_upper: hi,
            t_lower: lo,
        })
    }
}

/// All zeros of `L'(s, chi)` with `delta0 < beta < 1 + 3m/2` and `|gamma| <= t`.
pub fn scan_lprime_zeros(chi: &DirichletCharacter, t: f64, cfg: &ScanConfig) -> Result<ZeroDatabase> {
    Scanner::new(chi, FunctionTag::Lprime, cfg)?.scan(t)
}

/// All zeros of `L(s, chi)` in the critical strip with `|gamma| <= t`.
pub fn scan_l_zeros(chi: &DirichletCharacter, t: f64, cfg: &ScanConfig) -> Result<ZeroDatabase> {
    Scanner::new(chi, FunctionTag::L, cfg)?.scan(t)
}

/// `N(t, chi)`: zeros of `L` with `0 < beta < 1`, `|gamma| <= t`.
pub fn count_n(chi: &DirichletCharacter, t: f64, cfg: &ScanConfig) -> Result<CountResult> {
    Scanner::new(chi, FunctionTag::L, cfg)?.count_total(t)
}

/// `N1(t, chi)`: zeros of `L'` with `beta > 0`, `|gamma| <= t`.
pub fn count_n1(chi: &DirichletCharacter, t: f64, cfg: &ScanConfig) -> Result<CountResult> {
    Scanner::new(chi, FunctionTag::Lprime, cfg)?.count_total(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{character, primitive_characters};

    #[test]
    fn banding_arithmetic() {
        let chi = character(3, 1).unwrap();
        let s = Scanner::new(&chi, FunctionTag::Lprime, &ScanConfig::default()).unwrap();
        let bands = s.nominal_bands(0.0, 10.0);
        assert_eq!(bands, vec![(0.0, 2.0), (2.0, 4.0), (4.0, 6.0), (6.0, 8.0), (8.0, 10.0)]);
        assert_eq!(s.nominal_bands(0.0, 3.0), vec![(0.0, 2.0), (2.0, 3.0)]);
        assert_eq!(s.nominal_bands(3.0, 6.5), vec![(3.0, 4.0), (4.0, 6.0), (6.0, 6.5)]);
        assert_eq!(s.sigma_range(), (1e-4, 4.0));
    }

    #[test]
    fn scan_matches_single_contour() {
        let cfg = ScanConfig::default();
        let chi = character(3, 1).unwrap();
        let db = scan_lprime_zeros(&chi, 20.0, &cfg).unwrap();
        assert!(db.bands.iter().all(|b| b.is_done()));
        assert_eq!(db.t_done(), 20.0);
        let total = count_n1(&chi, 20.0, &cfg).unwrap();
        assert_eq!(db.count_within(20.0).unwrap(), total.count);
        let (lo, hi) = Scanner::new(&chi, FunctionTag::Lprime, &cfg).unwrap().sigma_range();
        for z in &db.zeros {
            assert!(z.residual <= 1e-9);
            assert!(z.beta > lo && z.beta < hi);
        }
        assert!(db.bands.iter().all(|b| !b.sliver_violation()));
        assert!(matches!(db.zeros_within(30.0), Err(Error::IncompleteScan { .. })));
    }

    #[test]
    fn real_character_zeros_are_symmetric() {
        let cfg = ScanConfig::default();
        let chi = primitive_characters(5).unwrap().into_iter().find(|c| c.is_real()).unwrap();
        let db = scan_l_zeros(&chi, 16.0, &cfg).unwrap();
        let mut mirrored: Vec<(f64, f64)> = db.zeros.iter().map(|z| (-z.gamma, z.beta)).collect();
        mirrored.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(mirrored.len(), db.zeros.len());
        for (z, m) in db.zeros.iter().zip(&mirrored) {
            assert!((z.gamma - m.0).abs() < 1e-9 && (z.beta - m.1).abs() < 1e-9);
            assert!((z.beta - 0.5).abs() < 1e-8);
        }
        assert_eq!(db.count_within(16.0).unwrap() % 2, 0);
    }
}
