//! Tabular sweep output.

use std::fmt::Write as _;
use std::path::Path;

use super::cluster::ClusterRow;
use super::smolin::UnlockRow;
use crate::criteria::ClassConvention;
use crate::error::Result;

pub const CLUSTER_HEADER: [&str; 6] = [
    "param1",
    "param2",
    "class",
    "margin_cut1",
    "margin_cut2",
    "margin_cut3",
];
pub const UNLOCK_HEADER: [&str; 6] = [
    "r",
    "var_p",
    "logneg_unlocked",
    "logneg_epr",
    "ratio",
    "admissible",
];

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SweepResult {
    pub fn cluster(rows: &[ClusterRow], convention: ClassConvention) -> Self {
        Self {
            header: CLUSTER_HEADER.iter().map(|s| s.to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| {
                    let mut row = vec![
                        fmt_float(r.kappa),
                        fmt_float(r.temperature),
                        r.class.code(convention).to_string(),
                    ];
                    row.extend(r.margins.iter().map(|&m| fmt_float(m)));
                    row
                })
                .collect(),
        }
    }

    pub fn unlock(rows: &[UnlockRow]) -> Self {
        Self {
            header: UNLOCK_HEADER.iter().map(|s| s.to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_float(r.r),
                        fmt_float(r.var_p),
                        fmt_float(r.logneg_unlocked),
                        fmt_float(r.logneg_epr),
                        fmt_float(r.ratio),
                        r.admissible.to_string(),
                    ]
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}
