//! Plumbing for the `symmwave` binary: the plain-text root-system spec
//! format, full-precision CSV emission, atomic output files, and the
//! SYMMWAVE_THREADS-capped worker pool.
//!
//! A spec file holds one `key = value` pair per line with `#` comments:
//!
//!    catalog        = A2            # A1 | BC1 | A2 | A3 | B2 | G2
//!    multiplicities = normal        # normal | complex | hyperbolic <d> | m-list
//!    label          = split A2      # optional display label
//!
//! The same grammar is accepted inline as `CATALOG[:MULTS]` — `A2`,
//! `B2:complex`, `A1:hyperbolic 3`, `BC1:2,1` — so quick queries need no
//! file on disk.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use symmwave_core::rootsys::{build_root_system, Catalog, Multiplicities, RootSystem};

use crate::UsageError;

/// Load a root system from a spec-file path or an inline descriptor.
pub fn load_system(spec: &str) -> Result<RootSystem, UsageError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        parse_system_text(&text)
    } else if spec.contains('=') || spec.to_ascii_lowercase().ends_with(".sys") {
        Err(UsageError(format!("system file {spec} not found")))
    } else {
        parse_inline(spec)
    }
}

fn parse_mults(text: &str) -> Result<Multiplicities, UsageError> {
    let t = text.trim().to_ascii_lowercase();
    if t == "normal" {
        return Ok(Multiplicities::Normal);
    }
    if t == "complex" {
        return Ok(Multiplicities::Complex);
    }
    if let Some(rest) = t.strip_prefix("hyperbolic") {
        let d: u32 = rest.trim().parse().map_err(|_| {
            UsageError(format!(
                "multiplicities `hyperbolic` needs a dimension, got {text:?}"
            ))
        })?;
        return Ok(Multiplicities::RealHyperbolic { d });
    }
    let items: Result<Vec<u32>, _> = t
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(Multiplicities::Explicit(v)),
        _ => Err(UsageError(format!(
            "multiplicities {text:?} is none of normal | complex | hyperbolic <d> | <m list>"
        ))),
    }
}

fn parse_system_text(text: &str) -> Result<RootSystem, UsageError> {
    let mut catalog: Option<Catalog> = None;
    let mut mults = Multiplicities::Normal;
    let mut label: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            UsageError(format!(
                "system file line {}: expected `key = value`, got {line:?}",
                lineno + 1
            ))
        })?;
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "catalog" => {
                catalog = Some(value.parse().map_err(|e| {
                    UsageError(format!("system file line {}: {e}", lineno + 1))
                })?);
            }
            "multiplicities" => mults = parse_mults(value)?,
            "label" => label = Some(value.to_string()),
            other => {
                return Err(UsageError(format!(
                    "system file line {}: unknown key {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    let catalog =
        catalog.ok_or_else(|| UsageError("system file needs a `catalog = …` line".into()))?;
    let mut rs = build_root_system(catalog, mults)?;
    if let Some(l) = label {
        rs.label = l;
    }
    Ok(rs)
}

fn parse_inline(spec: &str) -> Result<RootSystem, UsageError> {
    let (cat, mult) = match spec.split_once(':') {
        Some((c, m)) => (c, Some(m)),
        None => (spec.trim(), None),
    };
    let catalog: Catalog = cat.parse()?;
    let mults = match mult {
        Some(m) => parse_mults(m)?,
        None => Multiplicities::Normal,
    };
    Ok(build_root_system(catalog, mults)?)
}

/// 17 significant digits — enough to round-trip an f64 exactly.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header row and `\n` line endings.
pub fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = String::with_capacity(32 * (rows.len() + 1) * header.len().max(1));
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Write to standard output, or atomically overwrite `--out`: the content
/// lands in a hidden sibling temp file first and is renamed into place, so a
/// rerun never leaves a half-written artifact.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), UsageError> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => atomic_write(path, content),
    }
}

pub fn atomic_write(path: &Path, content: &str) -> Result<(), UsageError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| UsageError(format!("--out {} has no file name", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, content)
        .map_err(|e| UsageError(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        UsageError(format!("cannot replace {}: {e}", path.display()))
    })
}

/// Worker count: SYMMWAVE_THREADS when set (≥ 1), else the machine's
/// available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("SYMMWAVE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Apply `f` to every item on a scoped worker pool and return the results in
/// input order, so threaded sweeps stay byte-deterministic.
pub fn parallel_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    parallel_map_with(thread_cap(), items, f)
}

fn parallel_map_with<T, U, F>(workers: usize, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let workers = workers.min(items.len()).max(1);
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, U)>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                if tx.send((i, f(&items[i]))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
    });
    let mut got: Vec<(usize, U)> = rx.iter().collect();
    got.sort_by_key(|&(i, _)| i);
    got.into_iter().map(|(_, u)| u).collect()
}
