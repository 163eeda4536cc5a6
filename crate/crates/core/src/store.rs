//! Persistent zero databases and report files.
//!
//! A database is a JSONL file with one [`ZeroRecord`] per line, next to a
//! manifest `<file>.manifest.json`. Zero lines are only ever appended, and
//! the manifest records how many bytes of the file belong to completed
//! bands, so a tail written by an interrupted run is discarded on reopening.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::theorems::{verify, ResidualReport, Statistic};
use crate::zerofinder::{sort_zeros, BandStatus, BandSummary, FunctionTag, ScanConfig, Scanner, ZeroDatabase, ZeroRecord};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanManifest {
    pub format_version: u32,
    pub q: u64,
    pub chi_index: usize,
    #[serde(rename = "fn")]
    pub function: FunctionTag,
    #[serde(rename = "T_done")]
    pub t_done: f64,
    pub bands: Vec<BandSummary>,
    pub cfg_hash: String,
    /// Length of the zero file covered by completed bands.
    pub committed_bytes: u64,
}

/// Digest of everything that influences scan results.
pub fn cfg_hash(function: FunctionTag, cfg: &ScanConfig) -> String {
    #[derive(Serialize)]
    struct Hashed<'a> {
        format_version: u32,
        function: FunctionTag,
        cfg: &'a ScanConfig,
        sliver_sigma: f64,
    }
    let payload = serde_json::to_vec(&Hashed {
        format_version: FORMAT_VERSION,
        function,
        cfg,
        sliver_sigma: crate::zerofinder::SLIVER_SIGMA,
    })
    .expect("config serializes");
    hex::encode(Sha256::digest(payload))
}

impl ScanManifest {
    pub fn new(chi: &DirichletCharacter, function: FunctionTag, cfg: &ScanConfig) -> Self {
        ScanManifest {
            format_version: FORMAT_VERSION,
            q: chi.modulus(),
            chi_index: chi.index(),
            function,
            t_done: 0.0,
            bands: Vec::new(),
            cfg_hash: cfg_hash(function, cfg),
            committed_bytes: 0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let m: ScanManifest = serde_json::from_slice(&fs::read(path)?)?;
        if m.format_version != FORMAT_VERSION {
            return Err(Error::domain(format!(
                "unsupported manifest format version {}",
                m.format_version
            )));
        }
        m.check_bands()?;
        Ok(m)
    }

    /// Writes the manifest atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = with_suffix(path, ".tmp");
        {
            let mut f = File::create(&tmp)?;
            f.write_all(&serde_json::to_vec_pretty(self)?)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    fn check_bands(&self) -> Result<()> {
        for pair in self.bands.windows(2) {
            if pair[0].t_hi > pair[1].t_lo {
                return Err(Error::domain("manifest bands overlap or are unsorted"));
            }
        }
        Ok(())
    }

    /// Height up to which every band from 0 is done.
    pub fn contiguous_done(&self) -> f64 {
        let mut db = ZeroDatabase::new(self.q, self.chi_index, self.function);
        db.bands = self.bands.clone();
        db.t_done()
    }

    /// Sub-intervals of `[t_done, t_target]` not covered by done bands.
    pub fn pending_ranges(&self, t_target: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut lo = self.t_done;
        for b in self.bands.iter().filter(|b| b.is_done() && b.t_hi > self.t_done) {
            if b.t_lo >= t_target {
                break;
            }
            if b.t_lo > lo {
                out.push((lo, b.t_lo));
            }
            lo = lo.max(b.t_hi);
        }
        if lo < t_target {
            out.push((lo, t_target));
        }
        out
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn manifest_path(zeros: &Path) -> PathBuf {
    with_suffix(zeros, ".manifest.json")
}

pub fn lock_path(zeros: &Path) -> PathBuf {
    with_suffix(zeros, ".lock")
}

pub fn quarantine_path(zeros: &Path) -> PathBuf {
    with_suffix(zeros, ".quarantine")
}

/// Parses and validates a JSONL zero file.
pub fn read_zeros<R: Read>(reader: R) -> Result<Vec<ZeroRecord>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ZeroRecord = serde_json::from_str(&line).map_err(|e| Error::Corrupt {
            line: i + 1,
            reason: e.to_string(),
        })?;
        rec.validate().map_err(|e| Error::Corrupt {
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Serializes records as JSONL.
pub fn write_zeros<W: Write>(mut writer: W, zeros: &[ZeroRecord]) -> Result<()> {
    for z in zeros {
        serde_json::to_writer(&mut writer, z)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Options of [`ZeroStore::resume`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ResumeOptions {
    /// Stop with [`Error::Interrupted`] after committing this many bands.
    pub max_bands: Option<usize>,
}

/// A zero database opened for writing. Holds an exclusive advisory lock
/// until dropped.
#[derive(Debug)]
pub struct ZeroStore {
    path: PathBuf,
    manifest: ScanManifest,
    _lock: File,
}

impl ZeroStore {
    /// Opens the database at `path`, creating it if needed. Refuses to open
    /// a database written with a different configuration, drops any
    /// uncommitted tail, and quarantines the zero file if a committed line
    /// fails validation.
    pub fn open(path: &Path, chi: &DirichletCharacter, function: FunctionTag, cfg: &ScanConfig) -> Result<Self> {
        let lock = OpenOptions::new().create(true).truncate(false).write(true).open(lock_path(path))?;
        lock.try_lock().map_err(|_| {
            Error::Io(std::io::Error::new(
                std::io::ErrorKind::WouldBlock,
                format!("{} is locked by another writer", path.display()),
            ))
        })?;
        let mpath = manifest_path(path);
        let manifest = if mpath.exists() {
            let m = ScanManifest::load(&mpath)?;
            let current = cfg_hash(function, cfg);
            if m.cfg_hash != current {
                return Err(Error::ConfigMismatch {
                    stored: m.cfg_hash,
                    current,
                });
            }
            if (m.q, m.chi_index, m.function) != (chi.modulus(), chi.index(), function) {
                return Err(Error::domain(format!(
                    "{} holds zeros of {} for q = {}, index {}",
                    path.display(),
                    m.function,
                    m.q,
                    m.chi_index
                )));
            }
            m
        } else {
            let m = ScanManifest::new(chi, function, cfg);
            m.save(&mpath)?;
            m
        };
        let file = OpenOptions::new().create(true).truncate(false).append(true).open(path)?;
        let len = file.metadata()?.len();
        if len < manifest.committed_bytes {
            return Err(Error::Corrupt {
                line: 0,
                reason: format!("zero file has {len} bytes, manifest commits {}", manifest.committed_bytes),
            });
        }
        if len > manifest.committed_bytes {
            file.set_len(manifest.committed_bytes)?;
        }
        let store = ZeroStore {
            path: path.to_path_buf(),
            manifest,
            _lock: lock,
        };
        store.zeros()?;
        Ok(store)
    }

    pub fn manifest(&self) -> &ScanManifest {
        &self.manifest
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Committed zeros. A corrupted line moves the file aside and fails.
    pub fn zeros(&self) -> Result<Vec<ZeroRecord>> {
        let file = File::open(&self.path)?;
        match read_zeros(file.take(self.manifest.committed_bytes)) {
            Ok(z) => Ok(z),
            Err(e @ Error::Corrupt { .. }) => {
                fs::rename(&self.path, quarantine_path(&self.path))?;
                Err(e)
            }
            Err(e) => Err(e),
        }
    }

    pub fn database(&self) -> Result<ZeroDatabase> {
        let mut db = ZeroDatabase::new(self.manifest.q, self.manifest.chi_index, self.manifest.function);
        db.bands = self.manifest.bands.clone();
        db.zeros = self.zeros()?;
        sort_zeros(&mut db.zeros);
        Ok(db)
    }

    fn commit(&mut self, summary: BandSummary, zeros: &[ZeroRecord]) -> Result<()> {
        let mut file = OpenOptions::new().append(true).open(&self.path)?;
        if summary.is_done() {
            let mut buf = Vec::new();
            write_zeros(&mut buf, zeros)?;
            file.write_all(&buf)?;
            file.sync_data()?;
        }
        let m = &mut self.manifest;
        m.committed_bytes = file.metadata()?.len();
        m.bands.retain(|b| b.t_hi <= summary.t_lo || b.t_lo >= summary.t_hi);
        m.bands.push(summary);
        m.bands.sort_by(|a, b| a.t_lo.total_cmp(&b.t_lo));
        m.t_done = m.contiguous_done();
        m.save(&manifest_path(&self.path))
    }

    /// Computes the bands in `(T_done, t_target]` not yet done, committing
    /// each one (zeros first, then the manifest) in height order.
    pub fn resume(&mut self, scanner: &Scanner<'_>, t_target: f64, opts: ResumeOptions) -> Result<&ScanManifest> {
        if cfg_hash(scanner.function(), scanner.config()) != self.manifest.cfg_hash {
            return Err(Error::ConfigMismatch {
                stored: self.manifest.cfg_hash.clone(),
                current: cfg_hash(scanner.function(), scanner.config()),
            });
        }
        if !(t_target >= 2.0 && t_target.is_finite()) {
            return Err(Error::domain(format!("target height {t_target} must be at least 2")));
        }
        let todo: Vec<(f64, f64)> = self
            .manifest
            .pending_ranges(t_target)
            .into_iter()
            .flat_map(|(lo, hi)| scanner.nominal_bands(lo, hi))
            .collect();
        let chunk = rayon::current_num_threads().max(1);
        let mut committed = 0;
        for group in todo.chunks(chunk) {
            for (summary, zeros) in scanner.bands(group) {
                self.commit(summary, &zeros)?;
                committed += 1;
                if opts.max_bands.is_some_and(|k| committed >= k) && committed < todo.len() {
                    return Err(Error::Interrupted { completed: committed });
                }
            }
        }
        Ok(&self.manifest)
    }
}

/// Opens (or creates) the database at `path` and scans it up to `t_target`.
pub fn resume_scan(
    path: &Path,
    chi: &DirichletCharacter,
    function: FunctionTag,
    t_target: f64,
    cfg: &ScanConfig,
    opts: ResumeOptions,
) -> Result<ZeroDatabase> {
    let mut store = ZeroStore::open(path, chi, function, cfg)?;
    let scanner = Scanner::new(chi, function, cfg)?;
    store.resume(&scanner, t_target, opts)?;
    store.database()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

pub const REPORT_COLUMNS: &str = "statistic,q,chi_index,T,measured,main_term,residual,band,pass";

/// 17 significant digits, enough to restore the exact value.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes reports in deterministic `(statistic, q, chi_index, T)` order.
pub fn emit_report<W: Write>(mut out: W, reports: &[ResidualReport], format: ReportFormat) -> Result<()> {
    let mut sorted: Vec<&ResidualReport> = reports.iter().collect();
    sorted.sort_by(|a, b| {
        (a.statistic, a.q, a.chi_index)
            .cmp(&(b.statistic, b.q, b.chi_index))
            .then(a.t.total_cmp(&b.t))
    });
    match format {
        ReportFormat::Csv => {
            writeln!(out, "{REPORT_COLUMNS}")?;
            for r in sorted {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.statistic,
                    r.q,
                    r.chi_index,
                    fmt17(r.t),
                    fmt17(r.measured),
                    fmt17(r.main_term),
                    fmt17(r.residual),
                    fmt17(r.band),
                    r.pass
                )?;
            }
        }
        ReportFormat::Jsonl => {
            for r in sorted {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

/// Parses a report file written by [`emit_report`].
pub fn read_report<R: Read>(reader: R, format: ReportFormat) -> Result<Vec<ResidualReport>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || (format == ReportFormat::Csv && i == 0) {
            if format == ReportFormat::Csv && i == 0 && line.trim() != REPORT_COLUMNS {
                return Err(Error::Corrupt {
                    line: 1,
                    reason: "unexpected header".into(),
                });
            }
            continue;
        }
        let corrupt = |reason: String| Error::Corrupt { line: i + 1, reason };
        match format {
            ReportFormat::Jsonl => out.push(serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?),
            ReportFormat::Csv => {
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 9 {
                    return Err(corrupt(format!("expected 9 fields, found {}", f.len())));
                }
                let num = |s: &str| s.parse::<f64>().map_err(|e| corrupt(e.to_string()));
                out.push(ResidualReport {
                    statistic: f[0].parse().map_err(|e: Error| corrupt(e.to_string()))?,
                    q: f[1].parse().map_err(|e: std::num::ParseIntError| corrupt(e.to_string()))?,
                    chi_index: f[2].parse().map_err(|e: std::num::ParseIntError| corrupt(e.to_string()))?,
                    t: num(f[3])?,
                    measured: num(f[4])?,
                    main_term: num(f[5])?,
                    residual: num(f[6])?,
                    band: num(f[7])?,
                    pass: f[8].parse().map_err(|e: std::str::ParseBoolError| corrupt(e.to_string()))?,
                });
            }
        }
    }
    Ok(out)
}

/// Reports of `statistic` at each height of `grid`.
pub fn plot_rows(
    chi: &DirichletCharacter,
    db: &ZeroDatabase,
    statistic: Statistic,
    grid: &[f64],
    c: f64,
) -> Result<Vec<ResidualReport>> {
    grid.iter().map(|&t| verify(statistic, chi, t, db, c)).collect()
}

/// CSV with columns `T,measured,main,residual`, one row per grid height.
pub fn emit_plotdata<W: Write>(
    mut out: W,
    chi: &DirichletCharacter,
    db: &ZeroDatabase,
    statistic: Statistic,
    grid: &[f64],
) -> Result<()> {
    writeln!(out, "T,measured,main,residual")?;
    for r in plot_rows(chi, db, statistic, grid, statistic.default_c())? {
        writeln!(out, "{},{},{},{}", fmt17(r.t), fmt17(r.measured), fmt17(r.main_term), fmt17(r.residual))?;
    }
    Ok(())
}

/// Loads a database for reading only.
pub fn load_database(path: &Path) -> Result<ZeroDatabase> {
    let manifest = ScanManifest::load(&manifest_path(path))?;
    let file = File::open(path)?;
    let mut db = ZeroDatabase::new(manifest.q, manifest.chi_index, manifest.function);
    db.zeros = read_zeros(file.take(manifest.committed_bytes))?;
    sort_zeros(&mut db.zeros);
    db.bands = manifest.bands;
    Ok(db)
}

impl BandStatus {
    pub fn is_failed(&self) -> bool {
        matches!(self, BandStatus::Failed(_))
    }
}
