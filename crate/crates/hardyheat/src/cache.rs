//! Append-only evaluation cache.
//!
//! One record per line: `<len:08x> <crc32:08x> <json>\n`, where len and the
//! CRC-32 cover the JSON bytes. Appends take an exclusive lock on the file
//! and go out in a single write; readers skip any line whose framing or
//! checksum does not match, so a torn or corrupted record is dropped and
//! never returned.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hardyheat_core::perturbation::PerturbedTable;
use hardyheat_core::{AccuracyBudget, EvalResult, SeriesControl};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Record {
    /// A point evaluation made under `budget`.
    Eval {
        key: String,
        budget: AccuracyBudget,
        result: EvalResult,
    },
    /// A solved unit-time perturbed table.
    Table { key: String, table: PerturbedTable },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub records: usize,
    pub evals: usize,
    pub tables: usize,
    pub corrupt: usize,
    pub hits: usize,
    pub misses: usize,
    pub bytes: u64,
}

pub struct Cache {
    path: PathBuf,
    evals: HashMap<String, Vec<(AccuracyBudget, EvalResult)>>,
    tables: HashMap<String, PerturbedTable>,
    stats: CacheStats,
}

fn frame(json: &[u8]) -> Vec<u8> {
    let mut out = format!("{:08x} {:08x} ", json.len(), crc32fast::hash(json)).into_bytes();
    out.extend_from_slice(json);
    out.push(b'\n');
    out
}

fn unframe(line: &[u8]) -> Option<&[u8]> {
    if line.len() < 18 || line[8] != b' ' || line[17] != b' ' {
        return None;
    }
    let len = usize::from_str_radix(std::str::from_utf8(&line[..8]).ok()?, 16).ok()?;
    let crc = u32::from_str_radix(std::str::from_utf8(&line[9..17]).ok()?, 16).ok()?;
    let json = &line[18..];
    (json.len() == len && crc32fast::hash(json) == crc).then_some(json)
}

fn ends_mid_line(file: &mut std::fs::File) -> std::io::Result<bool> {
    let len = file.metadata()?.len();
    if len == 0 {
        return Ok(false);
    }
    let mut last = [0u8];
    file.seek(SeekFrom::Start(len - 1))?;
    file.read_exact(&mut last)?;
    Ok(last[0] != b'\n')
}

/// Canonical key of a point evaluation.
#[allow(clippy::too_many_arguments)]
pub fn eval_key(kernel: &str, zeta: f64, alpha: f64, eta: f64, t: f64, r: f64, s: f64, method: &str) -> String {
    format!("{kernel}|{zeta:e}|{alpha:e}|{eta:e}|{t:e}|{r:e}|{s:e}|{method}")
}

/// Canonical key of a perturbed table: parameters and every control field.
pub fn table_key(zeta: f64, alpha: f64, eta: f64, control: &SeriesControl) -> String {
    let g = control.space_grid;
    format!(
        "table|{zeta:e}|{alpha:e}|{eta:e}|{}|{:e}|{:e}|{}|{:e}|{:e}",
        control.max_terms, control.tail_tol, control.picard_tol, control.time_grid, g.half_width, g.step
    )
}

impl Cache {
    /// Opens (creating if needed) and indexes the cache file.
    pub fn open(path: impl AsRef<Path>) -> Result<Cache> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .read(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        file.lock_shared().map_err(|e| Error::io(&path, e))?;
        let mut cache = Cache {
            path: path.clone(),
            evals: HashMap::new(),
            tables: HashMap::new(),
            stats: CacheStats::default(),
        };
        let mut reader = BufReader::new(&file);
        let mut line = Vec::new();
        loop {
            line.clear();
            let n = reader.read_until(b'\n', &mut line).map_err(|e| Error::io(&path, e))?;
            if n == 0 {
                break;
            }
            cache.stats.bytes += n as u64;
            let body = line.strip_suffix(b"\n").unwrap_or(&line);
            match unframe(body).and_then(|json| serde_json::from_slice::<Record>(json).ok()) {
                Some(rec) => cache.index(rec),
                None => {
                    cache.stats.corrupt += 1;
                    log::warn!("{}: skipping corrupted cache record", path.display());
                }
            }
        }
        file.unlock().map_err(|e| Error::io(&path, e))?;
        Ok(cache)
    }

    fn index(&mut self, rec: Record) {
        self.stats.records += 1;
        match rec {
            Record::Eval { key, budget, result } => {
                self.stats.evals += 1;
                self.evals.entry(key).or_default().push((budget, result));
            }
            Record::Table { key, table } => {
                self.stats.tables += 1;
                self.tables.insert(key, table);
            }
        }
    }

    fn append(&mut self, rec: Record) -> Result<()> {
        let json = serde_json::to_vec(&rec)?;
        let mut bytes = frame(&json);
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .read(true)
            .open(&self.path)
            .map_err(|e| Error::io(&self.path, e))?;
        file.lock().map_err(|e| Error::io(&self.path, e))?;
        // a record torn by a crash has no newline; start on a fresh line
        let written = ends_mid_line(&mut file)
            .and_then(|torn| {
                if torn {
                    bytes.insert(0, b'\n');
                }
                file.write_all(&bytes)
            })
            .and_then(|_| file.flush());
        file.unlock().map_err(|e| Error::io(&self.path, e))?;
        written.map_err(|e| Error::io(&self.path, e))?;
        self.stats.bytes += bytes.len() as u64;
        self.index(rec);
        Ok(())
    }

    /// A cached evaluation whose budget is at least as strict as `budget`.
    pub fn get_eval(&mut self, key: &str, budget: &AccuracyBudget) -> Option<EvalResult> {
        let found = self
            .evals
            .get(key)
            .and_then(|v| v.iter().rev().find(|(b, _)| b.covers(budget)).map(|(_, r)| *r));
        self.count(found.is_some());
        found
    }

    pub fn put_eval(&mut self, key: &str, budget: AccuracyBudget, result: EvalResult) -> Result<()> {
        self.append(Record::Eval {
            key: key.to_string(),
            budget,
            result,
        })
    }

    pub fn get_table(&mut self, key: &str) -> Option<PerturbedTable> {
        let found = self.tables.get(key).cloned();
        self.count(found.is_some());
        found
    }

    pub fn put_table(&mut self, key: &str, table: &PerturbedTable) -> Result<()> {
        self.append(Record::Table {
            key: key.to_string(),
            table: table.clone(),
        })
    }

    fn count(&mut self, hit: bool) {
        if hit {
            self.stats.hits += 1;
        } else {
            self.stats.misses += 1;
        }
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Truncates the cache file under the exclusive lock.
    pub fn clear(path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(false)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        file.lock().map_err(|e| Error::io(path, e))?;
        let done = file.set_len(0);
        file.unlock().map_err(|e| Error::io(path, e))?;
        done.map_err(|e| Error::io(path, e))
    }
}
