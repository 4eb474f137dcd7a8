//! Batch execution of scenario documents.

pub mod report;
pub mod scenario;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::error::Error;
use crate::isocheck::{verdict_with_spectra, IsometryDatum};
use crate::sturm::{basic_spectrum, convergence_study, ConvergenceStudy, SpectrumEstimate};
pub use report::{Provenance, Report, VerdictRecord};
pub use scenario::{parse_scenario, ScenarioDocument, SolverParams};

/// Environment variable overriding the worker count.
pub const JOBS_ENV: &str = "LEAFSPEC_JOBS";

pub const SPECTRA_FILE: &str = "spectra.csv";
pub const VERDICTS_FILE: &str = "verdicts.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error{}{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default(), if field.is_empty() { String::new() } else { format!(" ({field})") })]
    Parse {
        line: Option<usize>,
        field: String,
        message: String,
    },

    #[error("unknown presentation {name:?}{}", line.map(|l| format!(" referenced at line {l}")).unwrap_or_default())]
    UnknownPresentation { name: String, line: Option<usize> },

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("{context}: {source}")]
    Solver {
        context: String,
        #[source]
        source: Error,
    },

    #[error("theorem-consistency violation in {}", pairs.join(", "))]
    Inconsistent { pairs: Vec<String> },
}

impl CliError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    fn solver(context: impl Into<String>, source: Error) -> Self {
        CliError::Solver {
            context: context.into(),
            source,
        }
    }

    /// 2 for theorem-consistency violations, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Inconsistent { .. } => 2,
            _ => 1,
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<ScenarioDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scenario(&text)
}

/// Worker count: the environment variable wins over the flag; `None`
/// leaves the choice to the thread pool.
pub fn resolve_jobs(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Parse {
                line: None,
                field: JOBS_ENV.into(),
                message: format!("expected a positive integer, got {v:?}"),
            }),
        },
        Err(_) => Ok(flag.filter(|&n| n > 0)),
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Parse {
            line: None,
            field: "jobs".into(),
            message: e.to_string(),
        })?;
    Ok(pool.install(f))
}

/// Computes every spectrum, verdict and requested convergence study.
/// Theorem-consistency violations are recorded in the report rather than
/// returned as errors.
pub fn execute(doc: &ScenarioDocument, jobs: Option<usize>) -> Result<Report, CliError> {
    with_pool(jobs, || execute_in_pool(doc))?
}

fn execute_in_pool(doc: &ScenarioDocument) -> Result<Report, CliError> {
    let solver = doc.solver;
    let spectra: Vec<SpectrumEstimate> = doc
        .presentations
        .par_iter()
        .map(|p| {
            basic_spectrum(p, solver.grid, solver.eigenvalues)
                .map_err(|e| CliError::solver(format!("spectrum of {:?}", p.name()), e))
        })
        .collect::<Result<_, _>>()?;

    let verdicts: Vec<VerdictRecord> = doc
        .comparisons
        .par_iter()
        .map(|c| {
            let (source, target) = (&doc.presentations[c.source], &doc.presentations[c.target]);
            let iso = IsometryDatum {
                source,
                target,
                map: c.map,
                claimed_codim_preserving: c.claimed_codim_preserving,
            };
            let pair = (spectra[c.source].clone(), spectra[c.target].clone());
            match verdict_with_spectra(&iso, pair, solver.verdict_params()) {
                Ok(verdict) => Ok(VerdictRecord {
                    pair: c.label.clone(),
                    inconsistent: false,
                    verdict,
                }),
                Err(Error::InconsistentTheorem(verdict)) => Ok(VerdictRecord {
                    pair: c.label.clone(),
                    inconsistent: true,
                    verdict: *verdict,
                }),
                Err(e) => Err(CliError::solver(format!("comparison {:?}", c.label), e)),
            }
        })
        .collect::<Result<_, _>>()?;

    let convergence: Vec<ConvergenceStudy> = match &doc.outputs.convergence_ladder {
        Some(ladder) => doc
            .presentations
            .par_iter()
            .map(|p| {
                convergence_study(p, ladder, solver.eigenvalues)
                    .map_err(|e| CliError::solver(format!("convergence study of {:?}", p.name()), e))
            })
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };

    Ok(Report {
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario_sha256: doc.digest.clone(),
            solver,
        },
        spectra,
        verdicts,
        convergence,
    })
}

/// Writes the requested artifacts into `out_dir` and returns their paths.
pub fn write_outputs(doc: &ScenarioDocument, report: &Report, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut files = Vec::new();
    let mut emit = |name: &str, body: String| -> Result<(), CliError> {
        let path = out_dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
        Ok(())
    };
    if doc.outputs.spectra {
        emit(SPECTRA_FILE, report::spectra_csv(&report.spectra))?;
    }
    if doc.outputs.verdicts {
        emit(VERDICTS_FILE, report::verdicts_csv(&report.verdicts))?;
    }
    if !report.convergence.is_empty() {
        emit(CONVERGENCE_FILE, report::convergence_csv(&report.convergence))?;
    }
    if doc.outputs.report {
        emit(REPORT_FILE, report.to_json())?;
    }
    Ok(files)
}

/// `run`: parse, execute, write. Outputs are written before a consistency
/// violation is reported.
pub fn run(scenario: &Path, out_dir: &Path, jobs: Option<usize>) -> Result<Report, CliError> {
    let doc = load_scenario(scenario)?;
    let report = execute(&doc, resolve_jobs(jobs)?)?;
    write_outputs(&doc, &report, out_dir)?;
    let pairs: Vec<String> = report.inconsistent_pairs().into_iter().map(String::from).collect();
    if pairs.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Inconsistent { pairs })
    }
}

fn find<'a>(doc: &'a ScenarioDocument, name: &str) -> Result<&'a crate::profiles::FoliationPresentation, CliError> {
    doc.presentation(name).ok_or_else(|| CliError::UnknownPresentation {
        name: name.into(),
        line: None,
    })
}

/// `converge`: eigenvalues of one presentation along a doubling ladder.
pub fn converge(
    scenario: &Path,
    name: &str,
    ladder: &[usize],
    k: usize,
    jobs: Option<usize>,
) -> Result<ConvergenceStudy, CliError> {
    let doc = load_scenario(scenario)?;
    let p = find(&doc, name)?;
    with_pool(resolve_jobs(jobs)?, || convergence_study(p, ladder, k))?
        .map_err(|e| CliError::solver(format!("convergence study of {name:?}"), e))
}

/// `spectrum`: extrapolated basic spectrum of one presentation.
pub fn spectrum(scenario: &Path, name: &str, n: usize, k: usize, jobs: Option<usize>) -> Result<SpectrumEstimate, CliError> {
    let doc = load_scenario(scenario)?;
    let p = find(&doc, name)?;
    with_pool(resolve_jobs(jobs)?, || basic_spectrum(p, n, k))?
        .map_err(|e| CliError::solver(format!("spectrum of {name:?}"), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENARIO: &str = r#"
[solver]
grid = 64
eigenvalues = 3

[[presentation]]
name = "s2"
family = "sphere_rotation"
n = 2

[[presentation]]
name = "copy"
family = "copy"
of = "s2"

[[comparison]]
source = "s2"
target = "copy"
"#;

    #[test]
    fn execute_produces_rows_in_declaration_order() {
        let doc = parse_scenario(SCENARIO).unwrap();
        let report = execute(&doc, Some(2)).unwrap();
        assert_eq!(report.spectra.len(), 2);
        assert_eq!(report.spectra[0].label, "s2");
        assert_eq!(report.spectra[1].label, "copy");
        assert_eq!(report.verdicts[0].pair, "s2|copy");
        assert!(report.verdicts[0].verdict.isospectral);
        assert!(report.inconsistent_pairs().is_empty());
    }

    #[test]
    fn report_round_trips_through_json() {
        let doc = parse_scenario(SCENARIO).unwrap();
        let report = execute(&doc, Some(1)).unwrap();
        let back = Report::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Inconsistent { pairs: vec![] }.exit_code(), 2);
        let unknown = CliError::UnknownPresentation {
            name: "x".into(),
            line: Some(3),
        };
        assert_eq!(unknown.exit_code(), 1);
        assert_eq!(unknown.to_string(), "unknown presentation \"x\" referenced at line 3");
    }
}
