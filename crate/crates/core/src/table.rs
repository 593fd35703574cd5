//! Deterministic CSV emission for the sweeps.
//!
//! Floats are written with 12 significant digits in scientific notation,
//! columns are fixed per table, and rows are sorted by the table's key before
//! writing, so the bytes do not depend on the thread count.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use crate::config::HarnessConfig;
use crate::error::{Error, Result};
use crate::expsum::{kloosterman_sweep, SWEEP_HEADER};
use crate::gaussian::GaussianInt;
use crate::hyp::{GRID_HEADER, WINDOW_SAMPLES};
use crate::kernel::{pgt_partition_report, LABELS};
use crate::zagier::{zagier_sweep, TruncationConfig, ZAGIER_HEADER};

pub const PARTITION_HEADER: &str = "label,count";

/// Tables [`emit_table`] knows how to build.
pub const COMMANDS: [&str; 4] = ["hyp-asym", "partition", "kloosterman", "zagier-l"];

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(k) => k.to_string(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(t) => t.clone(),
        }
    }

    fn cmp_key(&self, other: &Cell) -> Ordering {
        match (self, other) {
            (Cell::Int(a), Cell::Int(b)) => a.cmp(b),
            (Cell::Num(a), Cell::Num(b)) => a.total_cmp(b),
            (a, b) => a.render().cmp(&b.render()),
        }
    }
}

/// 12 significant digits, e.g. `6.07000000000e-4`.
pub fn fmt_num(x: f64) -> String {
    // normalise -0 so equal values print identically
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: String,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Table { header: header.to_string(), rows: Vec::new() }
    }

    /// Sorts rows by the given column indices, lexicographically.
    pub fn sort_by_columns(&mut self, cols: &[usize]) {
        self.rows.sort_by(|a, b| cols.iter().map(|&k| a[k].cmp_key(&b[k])).find(|o| o.is_ne()).unwrap_or(Ordering::Equal));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

fn gi_cells(g: GaussianInt) -> [Cell; 2] {
    [Cell::Int(g.re as i128), Cell::Int(g.im as i128)]
}

pub fn hyp_grid_table(rs: &[f64], xs: &[f64], t: f64, cfg: &HarnessConfig) -> Result<Table> {
    use crate::hyp::{hyp2f1_uniform, spectral_oracle_with, windowed_rel_error_with, SpectralParams};
    let pts: Vec<(f64, f64)> = rs.iter().flat_map(|&r| xs.iter().map(move |&x| (r, x))).collect();
    let rows = crate::par::map(&pts, |&(r, x)| -> Result<Vec<Cell>> {
        let p = SpectralParams::new(r, t)?;
        let asym = hyp2f1_uniform(&p, x, 1)?.value;
        let oracle = spectral_oracle_with(&p, x, cfg.oracle)?;
        let err = windowed_rel_error_with(r, x, t, WINDOW_SAMPLES, cfg.oracle)?;
        Ok(vec![
            Cell::Num(r),
            Cell::Num(x),
            Cell::Num(asym.re),
            Cell::Num(asym.im),
            Cell::Num(oracle.re),
            Cell::Num(oracle.im),
            Cell::Num(err),
        ])
    });
    let mut table = Table::new(GRID_HEADER);
    table.rows = rows.into_iter().collect::<Result<_>>()?;
    table.sort_by_columns(&[0, 1]);
    Ok(table)
}

/// One row per label `N1..N9`, in label order.
pub fn partition_table(l: GaussianInt, t: f64, cfg: &HarnessConfig) -> Result<Table> {
    let report = pgt_partition_report(l, t, &cfg.partition)?;
    let mut table = Table::new(PARTITION_HEADER);
    for lab in LABELS {
        table.rows.push(vec![Cell::Text(format!("{lab:?}")), Cell::Int(report.counts[&lab] as i128)]);
    }
    Ok(table)
}

/// Rows sorted by `(norm, re, im)` of the modulus.
pub fn kloosterman_table(m: GaussianInt, n: GaussianInt, max_norm: u64) -> Result<Table> {
    let mut table = Table::new(SWEEP_HEADER);
    for row in kloosterman_sweep(m, n, max_norm)? {
        let [re, im] = gi_cells(row.c);
        table.rows.push(vec![
            re,
            im,
            Cell::Int(row.norm_c as i128),
            Cell::Num(row.value.re),
            Cell::Num(row.value.im),
            Cell::Num(row.bound),
            Cell::Num(row.ratio),
        ]);
    }
    table.sort_by_columns(&[2, 0, 1]);
    Ok(table)
}

/// Rows sorted by `(disc_norm, re, im)` of `n`.
pub fn zagier_table(l: GaussianInt, n_max_norm: u64, s: Complex64, cfg: TruncationConfig) -> Result<Table> {
    let mut table = Table::new(ZAGIER_HEADER);
    for row in zagier_sweep(l, n_max_norm, s, cfg)? {
        let [re, im] = gi_cells(row.n);
        table.rows.push(vec![
            re,
            im,
            Cell::Int(row.disc_norm as i128),
            Cell::Num(row.value.re),
            Cell::Num(row.value.im),
            Cell::Num(row.tail),
        ]);
    }
    table.sort_by_columns(&[2, 0, 1]);
    Ok(table)
}

/// `key=v1,v2;key2=v3`, e.g. `r=50,100,200;x=0.1,1,10`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridSpec(BTreeMap<String, Vec<String>>);

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("grid entry {part:?} lacks '='")))?;
            let vals: Vec<String> = v.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
            if vals.is_empty() {
                return Err(Error::Parse(format!("grid entry {part:?} has no values")));
            }
            if map.insert(k.trim().to_string(), vals).is_some() {
                return Err(Error::Parse(format!("grid key {:?} repeated", k.trim())));
            }
        }
        Ok(GridSpec(map))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!("unknown grid key {k:?}; expected one of {allowed:?}"))),
            None => Ok(()),
        }
    }

    fn values<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.0
            .get(key)
            .map(|vs| vs.iter().map(|v| v.parse::<T>().map_err(|_| Error::Parse(format!("bad value {v:?} for {key}")))).collect())
            .transpose()
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.values(key)?.ok_or_else(|| Error::Parse(format!("grid needs {key}")))
    }

    fn one<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match self.values(key)? {
            Some(mut v) if v.len() == 1 => Ok(v.remove(0)),
            Some(_) => Err(Error::Parse(format!("grid key {key} takes a single value"))),
            None => default.ok_or_else(|| Error::Parse(format!("grid needs {key}"))),
        }
    }
}

/// Builds the table for `command` over `grid`.
///
/// | command | keys |
/// |---|---|
/// | `hyp-asym` | `r`, `x` (lists), `t` (default 0) |
/// | `partition` | `l`, `T` |
/// | `kloosterman` | `m`, `n`, `max_norm` |
/// | `zagier-l` | `l`, `n_max_norm`, `s_re`, `s_im` (default 0) |
pub fn build_table(command: &str, grid: &GridSpec, cfg: &HarnessConfig) -> Result<Table> {
    match command {
        "hyp-asym" => {
            grid.check_keys(&["r", "x", "t"])?;
            hyp_grid_table(&grid.list("r")?, &grid.list("x")?, grid.one("t", Some(0.0))?, cfg)
        }
        "partition" => {
            grid.check_keys(&["l", "T"])?;
            partition_table(grid.one("l", None)?, grid.one("T", None)?, cfg)
        }
        "kloosterman" => {
            grid.check_keys(&["m", "n", "max_norm"])?;
            kloosterman_table(grid.one("m", None)?, grid.one("n", None)?, grid.one("max_norm", None)?)
        }
        "zagier-l" => {
            grid.check_keys(&["l", "n_max_norm", "s_re", "s_im"])?;
            let s = Complex64::new(grid.one("s_re", None)?, grid.one("s_im", Some(0.0))?);
            zagier_table(grid.one("l", None)?, grid.one("n_max_norm", None)?, s, cfg.truncation)
        }
        other => Err(Error::Parse(format!("no table for {other:?}; expected one of {COMMANDS:?}"))),
    }
}

pub fn emit_table(command: &str, grid_spec: &str, out_path: &Path, cfg: &HarnessConfig) -> Result<Table> {
    let table = build_table(command, &GridSpec::parse(grid_spec)?, cfg)?;
    table.write(out_path)?;
    Ok(table)
}
