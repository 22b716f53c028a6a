//! Parameter-grid censuses of partner counts, with CSV and JSON output.

use std::io::{self, Write};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curve::{curve_new, CurveError, WeierstrassCurve};
use crate::field::P_MAX;
use crate::fm::{FmError, Instance};
use crate::structure::{automorphism_group, StructureError, Tower, M_MAX};

/// First line of every CSV census.
pub const CSV_VERSION_LINE: &str = "#fmc-census-v1";

pub const CSV_HEADER: [&str; 20] = [
    "p",
    "a1",
    "a2",
    "a3",
    "a4",
    "a6",
    "j",
    "supersingular",
    "m",
    "aut_order",
    "aut_label",
    "h_size",
    "h_members",
    "fm_count",
    "representatives",
    "oracle_count",
    "bound_ok",
    "status",
    "field_degree",
    "torsion",
];

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("invalid census configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Domain(#[from] FmError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveSource {
    /// Every smooth model: all long models for `p <= 3`, all short models
    /// `y^2 = x^3 + a4 x + a6` otherwise.
    AllSmoothModels,
    /// One model per automorphism type available at `p`.
    CanonicalPerJ,
    Explicit(Vec<[i64; 5]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    pub primes: Vec<u32>,
    pub curve_source: CurveSource,
    /// May be empty (`m_min > m_max`).
    pub m_range: RangeInclusive<u64>,
    pub verify_oracle: bool,
    pub tower: Tower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    NotFoundWithinTower,
    Unsupported,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::NotFoundWithinTower => "not_found_within_tower",
            RowStatus::Unsupported => "unsupported",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub p: u32,
    pub a1: u32,
    pub a2: u32,
    pub a3: u32,
    pub a4: u32,
    pub a6: u32,
    pub j: u32,
    pub supersingular: bool,
    pub m: u64,
    pub aut_order: Option<usize>,
    pub aut_label: Option<String>,
    pub h_size: Option<usize>,
    pub h_members: Option<Vec<u64>>,
    pub fm_count: Option<u64>,
    pub representatives: Option<Vec<u64>>,
    pub oracle_count: Option<u64>,
    pub bound_ok: Option<bool>,
    pub status: RowStatus,
    /// Extension degree the instance was resolved over.
    pub field_degree: Option<u32>,
    pub torsion: Option<String>,
}

impl CensusRow {
    pub fn oracle_mismatch(&self) -> bool {
        matches!((self.fm_count, self.oracle_count), (Some(a), Some(b)) if a != b)
    }

    fn csv_record(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        fn list(v: &Option<Vec<u64>>) -> String {
            v.as_ref()
                .map(|v| v.iter().map(u64::to_string).collect::<Vec<_>>().join(";"))
                .unwrap_or_default()
        }
        vec![
            self.p.to_string(),
            self.a1.to_string(),
            self.a2.to_string(),
            self.a3.to_string(),
            self.a4.to_string(),
            self.a6.to_string(),
            self.j.to_string(),
            self.supersingular.to_string(),
            self.m.to_string(),
            opt(&self.aut_order),
            opt(&self.aut_label),
            opt(&self.h_size),
            list(&self.h_members),
            opt(&self.fm_count),
            list(&self.representatives),
            opt(&self.oracle_count),
            opt(&self.bound_ok),
            self.status.as_str().to_string(),
            opt(&self.field_degree),
            opt(&self.torsion),
        ]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub rows: usize,
    pub ok: usize,
    pub not_found_within_tower: usize,
    pub unsupported: usize,
    pub oracle_mismatches: usize,
}

impl CensusSummary {
    pub fn of(rows: &[CensusRow]) -> Self {
        let count = |s| rows.iter().filter(|r| r.status == s).count();
        CensusSummary {
            rows: rows.len(),
            ok: count(RowStatus::Ok),
            not_found_within_tower: count(RowStatus::NotFoundWithinTower),
            unsupported: count(RowStatus::Unsupported),
            oracle_mismatches: rows.iter().filter(|r| r.oracle_mismatch()).count(),
        }
    }
}

impl std::fmt::Display for CensusSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "census: {} rows, {} ok, {} not_found_within_tower, {} unsupported, oracle_mismatches {}",
            self.rows, self.ok, self.not_found_within_tower, self.unsupported, self.oracle_mismatches
        )
    }
}

/// The canonical model list for one characteristic.
pub fn canonical_curves(p: u32) -> Vec<WeierstrassCurve> {
    let mk = |a: [i64; 5]| curve_new(p, a[0], a[1], a[2], a[3], a[4]).ok();
    let out: Vec<WeierstrassCurve> = match p {
        2 => vec![
            mk([0, 0, 1, 0, 0]),
            (1..2).find_map(|a6| mk([1, 0, 0, 0, a6])),
        ]
        .into_iter()
        .flatten()
        .collect(),
        3 => mk([0, 0, 0, -1, 0]).into_iter().collect(),
        _ => {
            let generic = (0..p as i64).find_map(|c| {
                mk([0, 0, 0, 1, c]).filter(|e| e.j_invariant() != 0 && e.j_invariant() != 1728 % p)
            });
            [mk([0, 0, 0, 0, 1]), mk([0, 0, 0, 1, 0]), generic]
                .into_iter()
                .flatten()
                .collect()
        }
    };
    sorted(out)
}

/// Every smooth model in the family searched for `p`.
pub fn all_smooth_models(p: u32) -> Vec<WeierstrassCurve> {
    let q = p as i64;
    let mut out = Vec::new();
    if p <= 3 {
        for n in 0..q.pow(5) {
            let d = |i: u32| n / q.pow(i) % q;
            if let Ok(e) = curve_new(p, d(4), d(3), d(2), d(1), d(0)) {
                out.push(e);
            }
        }
    } else {
        for a4 in 0..q {
            for a6 in 0..q {
                if let Ok(e) = curve_new(p, 0, 0, 0, a4, a6) {
                    out.push(e);
                }
            }
        }
    }
    sorted(out)
}

fn sorted(mut v: Vec<WeierstrassCurve>) -> Vec<WeierstrassCurve> {
    v.sort_by_key(|e| e.coefficients());
    v.dedup_by_key(|e| e.coefficients());
    v
}

impl CensusConfig {
    pub fn validate(&self) -> Result<(), CensusError> {
        let bad = |msg: String| Err(CensusError::Config(msg));
        for &p in &self.primes {
            if p > P_MAX || !num_prime::nt_funcs::is_prime64(p as u64) {
                return bad(format!("{p} is not a prime <= {P_MAX}"));
            }
        }
        let (lo, hi) = (*self.m_range.start(), *self.m_range.end());
        if lo <= hi && (lo < 2 || hi > M_MAX) {
            return bad(format!("m range {lo}..={hi} is not inside 2..={M_MAX}"));
        }
        Ok(())
    }

    /// Curves in canonical order: by `p`, then by coefficients.
    pub fn curves(&self) -> Result<Vec<WeierstrassCurve>, CensusError> {
        let mut primes = self.primes.clone();
        primes.sort_unstable();
        primes.dedup();
        let mut out = Vec::new();
        for p in primes {
            match &self.curve_source {
                CurveSource::AllSmoothModels => out.extend(all_smooth_models(p)),
                CurveSource::CanonicalPerJ => out.extend(canonical_curves(p)),
                CurveSource::Explicit(list) => {
                    let mut v = Vec::new();
                    for a in list {
                        v.push(curve_new(p, a[0], a[1], a[2], a[3], a[4])?);
                    }
                    out.extend(sorted(v));
                }
            }
        }
        Ok(out)
    }
}

/// One census row for `(curve, m)`.
pub fn census_row(curve: &WeierstrassCurve, m: u64, verify_oracle: bool, tower: &Tower) -> Result<CensusRow, FmError> {
    let [a1, a2, a3, a4, a6] = curve.coefficients();
    let mut row = CensusRow {
        p: curve.p(),
        a1,
        a2,
        a3,
        a4,
        a6,
        j: curve.j_invariant(),
        supersingular: curve.is_supersingular(),
        m,
        aut_order: None,
        aut_label: None,
        h_size: None,
        h_members: None,
        fm_count: None,
        representatives: None,
        oracle_count: None,
        bound_ok: None,
        status: RowStatus::Ok,
        field_degree: None,
        torsion: None,
    };
    match automorphism_group(curve, tower) {
        Ok(aut) => {
            row.aut_order = Some(aut.order());
            row.aut_label = Some(aut.label.to_string());
        }
        Err(StructureError::NotFoundWithinTower { .. }) => {}
        Err(e) => return Err(e.into()),
    }
    let inst = match Instance::resolve(curve, m, tower) {
        Ok(inst) => inst,
        Err(FmError::Structure(StructureError::NotFoundWithinTower { .. })) => {
            row.status = RowStatus::NotFoundWithinTower;
            return Ok(row);
        }
        Err(FmError::NoPointOfOrder { .. } | FmError::Structure(StructureError::UnsupportedMixedOrder { .. })) => {
            row.status = RowStatus::Unsupported;
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    let report = inst.partners()?;
    row.field_degree = Some(inst.group.degree());
    row.torsion = Some(inst.torsion.structure.to_string());
    row.h_size = Some(report.h.size());
    row.h_members = Some(report.h.members.clone());
    row.fm_count = Some(report.count);
    row.representatives = Some(report.representatives);
    row.bound_ok = Some(report.bound_ok);
    if verify_oracle {
        row.oracle_count = Some(inst.oracle()?);
    }
    Ok(row)
}

/// Runs the census. Rows come back in canonical order whatever the
/// scheduling.
pub fn run_census(config: &CensusConfig) -> Result<Vec<CensusRow>, CensusError> {
    config.validate()?;
    let curves = config.curves()?;
    let jobs: Vec<(&WeierstrassCurve, u64)> = curves
        .iter()
        .flat_map(|e| config.m_range.clone().map(move |m| (e, m)))
        .collect();
    let rows: Result<Vec<CensusRow>, FmError> = jobs
        .par_iter()
        .map(|(e, m)| census_row(e, *m, config.verify_oracle, &config.tower))
        .collect();
    Ok(rows?)
}

pub fn write_csv<W: Write>(rows: &[CensusRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()
}

pub fn write_json<W: Write>(rows: &[CensusRow], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}

pub fn write_rows<W: Write>(rows: &[CensusRow], format: OutputFormat, out: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}
