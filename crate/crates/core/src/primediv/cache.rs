//! Line-delimited sieve cache.
//!
//! One file per job, named `<fingerprint>-k<k>-<lo>-<hi>.sieve`:
//!
//! ```text
//! kwitness-sieve 1 poly=<sha256 of coefficients> k=<k> lo=<lo> hi=<hi>\n
//! <p>,<divides_p>,<divides_pk>\n
//! ...
//! ```
//!
//! Flags are `0` or `1`. Decoding re-encodes and compares, so only
//! byte-canonical files are accepted.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{sieve, SieveJob, WitnessRecord};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "KWITNESS_CACHE";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cache header does not match the job: expected {expected:?}, found {found:?}")]
    KeyMismatch { expected: String, found: String },
    #[error("malformed cache line {line}: {text:?}")]
    Corrupt { line: usize, text: String },
}

pub fn header(job: &SieveJob) -> String {
    format!(
        "kwitness-sieve 1 poly={} k={} lo={} hi={}",
        job.poly.fingerprint(),
        job.k,
        job.lo,
        job.hi
    )
}

pub fn encode(job: &SieveJob, records: &[WitnessRecord]) -> String {
    let mut out = header(job);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{},{},{}", r.p, r.divides_p as u8, r.divides_pk as u8);
    }
    out
}

fn flag(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

pub fn decode(job: &SieveJob, text: &str) -> Result<Vec<WitnessRecord>, CacheError> {
    let mut lines = text.split_terminator('\n');
    let expected = header(job);
    let found = lines.next().unwrap_or_default();
    if found != expected {
        return Err(CacheError::KeyMismatch {
            expected,
            found: found.to_string(),
        });
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let corrupt = || CacheError::Corrupt {
            line: i + 2,
            text: line.to_string(),
        };
        let mut fields = line.split(',');
        let (Some(p), Some(a), Some(b), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(corrupt());
        };
        records.push(WitnessRecord {
            p: p.parse().map_err(|_| corrupt())?,
            divides_p: flag(a).ok_or_else(corrupt)?,
            divides_pk: flag(b).ok_or_else(corrupt)?,
        });
    }
    if encode(job, &records) != text {
        return Err(CacheError::Corrupt {
            line: 0,
            text: "non-canonical encoding".into(),
        });
    }
    Ok(records)
}

/// Directory of sieve result files.
#[derive(Debug, Clone)]
pub struct SieveCache {
    dir: PathBuf,
}

impl SieveCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SieveCache { dir: dir.into() }
    }

    /// Cache rooted at `$KWITNESS_CACHE`, if set and non-empty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(SieveCache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, job: &SieveJob) -> PathBuf {
        self.dir.join(format!(
            "{}-k{}-{}-{}.sieve",
            job.poly.fingerprint(),
            job.k,
            job.lo,
            job.hi
        ))
    }

    pub fn load(&self, job: &SieveJob) -> Result<Option<Vec<WitnessRecord>>, CacheError> {
        let path = self.path(job);
        match fs::read_to_string(&path) {
            Ok(text) => decode(job, &text).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(source) => Err(CacheError::Io { path, source }),
        }
    }

    pub fn store(&self, job: &SieveJob, records: &[WitnessRecord]) -> Result<(), CacheError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CacheError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let path = self.path(job);
        let tmp = path.with_extension("sieve.tmp");
        fs::write(&tmp, encode(job, records)).map_err(io(&tmp))?;
        fs::rename(&tmp, &path).map_err(io(&path))
    }

    /// Cached records for `job`, computing and storing them on a miss.
    pub fn sieve(
        &self,
        job: &SieveJob,
        workers: Option<usize>,
    ) -> Result<Vec<WitnessRecord>, CacheError> {
        if let Some(hit) = self.load(job)? {
            return Ok(hit);
        }
        let records = sieve(job, workers);
        self.store(job, &records)?;
        Ok(records)
    }
}
