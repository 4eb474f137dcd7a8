//! Report assembly and serialisation: spectra and verdict CSVs, and a JSON
//! mirror that can be read back.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::scenario::SolverParams;
use super::CliError;
use crate::isocheck::Verdict;
use crate::sturm::{ConvergenceStudy, SpectrumEstimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub scenario_sha256: String,
    pub solver: SolverParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub pair: String,
    /// The theorem's hypotheses hold but the spectra disagree.
    pub inconsistent: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    pub spectra: Vec<SpectrumEstimate>,
    pub verdicts: Vec<VerdictRecord>,
    pub convergence: Vec<ConvergenceStudy>,
}

impl Report {
    pub fn inconsistent_pairs(&self) -> Vec<&str> {
        self.verdicts
            .iter()
            .filter(|r| r.inconsistent)
            .map(|r| r.pair.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: Some(e.line()),
            field: "report".into(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Twelve significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.11e}")
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory csv flush");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

pub fn spectra_csv(spectra: &[SpectrumEstimate]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["presentation", "index", "lambda_N", "lambda_2N", "extrapolated", "err_est"])
        .expect("csv write");
    for s in spectra {
        for i in 0..s.len() {
            w.write_record([
                s.label.clone(),
                i.to_string(),
                fmt_real(s.coarse[i]),
                fmt_real(s.fine[i]),
                fmt_real(s.extrapolated[i]),
                fmt_real(s.error_estimates[i]),
            ])
            .expect("csv write");
        }
    }
    finish_csv(w)
}

pub fn verdicts_csv(records: &[VerdictRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "pair",
        "metric_ok",
        "codim_ok",
        "qcodim_ok",
        "H_ok",
        "theorem_applies",
        "isospectral",
        "max_rel_gap",
    ])
    .expect("csv write");
    for r in records {
        let v = &r.verdict;
        w.write_record([
            r.pair.clone(),
            v.metric_ok().to_string(),
            v.codim_ok().to_string(),
            v.qcodim_strata_ok().to_string(),
            v.mean_curvature_ok().to_string(),
            v.theorem_applies.to_string(),
            v.isospectral.to_string(),
            fmt_real(v.max_rel_gap),
        ])
        .expect("csv write");
    }
    finish_csv(w)
}

/// One row per (eigenvalue, grid); the ratio column holds the observed
/// convergence ratio starting at that grid, the extrapolated column is
/// filled on the finest grid.
pub fn convergence_csv(studies: &[ConvergenceStudy]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["presentation", "index", "N", "lambda", "ratio", "extrapolated"])
        .expect("csv write");
    for s in studies {
        let k = s.extrapolated.len();
        for i in 0..k {
            for (g, &n) in s.ladder.iter().enumerate() {
                let ratio = s
                    .ratios
                    .get(g)
                    .and_then(|row| row[i])
                    .map(fmt_real)
                    .unwrap_or_default();
                let extrapolated = if g + 1 == s.ladder.len() {
                    fmt_real(s.extrapolated[i])
                } else {
                    String::new()
                };
                w.write_record([
                    s.label.clone(),
                    i.to_string(),
                    n.to_string(),
                    fmt_real(s.eigenvalues[g][i]),
                    ratio,
                    extrapolated,
                ])
                .expect("csv write");
            }
        }
    }
    finish_csv(w)
}
