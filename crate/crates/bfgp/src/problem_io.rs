//! On-disk problem bundles: a directory with one plain-text `.inst` file per
//! instance plus a `manifest.json` recording the domain, the generation
//! parameters, and the instance files in order.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domains::{DomainId, GenParams};
use crate::model::{parse_instance, write_instance, GPProblem};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemManifest {
    pub domain: String,
    pub seed: u64,
    pub count: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub arithmetic_bound: i64,
    pub pointer_names: Vec<String>,
    pub files: Vec<InstanceEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceEntry {
    pub file: String,
    pub label: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("{file}: {message}")]
    Instance { file: String, message: String },
    #[error("manifest names unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("manifest pointer names {found:?} do not match domain `{domain}` ({expected:?})")]
    PointerMismatch { domain: String, found: Vec<String>, expected: Vec<String> },
}

/// Writes `problem` under `dir` (created if missing): numbered `.inst` files
/// plus `manifest.json`. Returns the manifest.
pub fn write_problem_dir(
    problem: &GPProblem,
    domain: DomainId,
    params: GenParams,
    dir: &Path,
) -> Result<ProblemManifest, ProblemIoError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(problem.instances.len());
    for (idx, inst) in problem.instances.iter().enumerate() {
        let file = format!("{idx:05}-{}.inst", inst.label);
        fs::write(dir.join(&file), write_instance(inst, &problem.pointer_names))?;
        files.push(InstanceEntry { file, label: inst.label.clone() });
    }
    let manifest = ProblemManifest {
        domain: domain.name().to_string(),
        seed: params.seed,
        count: params.count,
        min_size: params.min_size,
        max_size: params.max_size,
        arithmetic_bound: params.arithmetic_bound,
        pointer_names: problem.pointer_names.clone(),
        files,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Reads a problem bundle back; the domain named in the manifest supplies
/// the action table.
pub fn read_problem_dir(dir: &Path) -> Result<(GPProblem, ProblemManifest), ProblemIoError> {
    let manifest_text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let manifest: ProblemManifest = serde_json::from_str(&manifest_text)?;
    let domain = DomainId::parse(&manifest.domain)
        .map_err(|_| ProblemIoError::UnknownDomain(manifest.domain.clone()))?;
    let expected: Vec<String> = domain.pointer_names().iter().map(|s| s.to_string()).collect();
    if manifest.pointer_names != expected {
        return Err(ProblemIoError::PointerMismatch {
            domain: manifest.domain.clone(),
            found: manifest.pointer_names.clone(),
            expected,
        });
    }
    let mut instances = Vec::with_capacity(manifest.files.len());
    for entry in &manifest.files {
        let text = fs::read_to_string(dir.join(&entry.file))?;
        let inst = parse_instance(&text, entry.label.clone()).map_err(|e| {
            ProblemIoError::Instance { file: entry.file.clone(), message: e.to_string() }
        })?;
        instances.push(inst);
    }
    let problem =
        GPProblem::new(instances, domain.actions(), expected, manifest.arithmetic_bound);
    Ok((problem, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::make_problem;

    #[test]
    fn problem_bundles_round_trip_through_a_directory() {
        let domain = DomainId::Select;
        let params = GenParams {
            count: 4,
            min_size: 3,
            max_size: 6,
            seed: 99,
            arithmetic_bound: 100,
        };
        let problem = make_problem(domain, params).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_problem_dir(&problem, domain, params, dir.path()).unwrap();
        assert_eq!(manifest.files.len(), 4);

        let (back, manifest2) = read_problem_dir(dir.path()).unwrap();
        assert_eq!(back.instances, problem.instances);
        assert_eq!(back.pointer_names, problem.pointer_names);
        assert_eq!(back.arithmetic_bound, problem.arithmetic_bound);
        assert_eq!(back.actions.len(), problem.actions.len());
        assert_eq!(manifest2.seed, 99);
    }

    #[test]
    fn duplicate_labels_get_distinct_files() {
        // Forty instances over five sizes: labels repeat, filenames may not.
        let params = GenParams {
            count: 40,
            min_size: 2,
            max_size: 6,
            seed: 1,
            arithmetic_bound: 100,
        };
        let problem = make_problem(DomainId::Reverse, params).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_problem_dir(&problem, DomainId::Reverse, params, dir.path()).unwrap();
        let mut files: Vec<_> = manifest.files.iter().map(|e| e.file.clone()).collect();
        files.sort();
        files.dedup();
        assert_eq!(files.len(), 40);
        let (back, _) = read_problem_dir(dir.path()).unwrap();
        assert_eq!(back.instances.len(), 40);
    }

    #[test]
    fn tampered_manifest_reports_errors() {
        let domain = DomainId::Tsum;
        let params = domain.training_params();
        let problem = make_problem(domain, params).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_problem_dir(&problem, domain, params, dir.path()).unwrap();

        let manifest_path = dir.path().join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&manifest_path).unwrap();
        std::fs::write(&manifest_path, text.replace("\"tsum\"", "\"hanoi\"")).unwrap();
        assert!(matches!(
            read_problem_dir(dir.path()),
            Err(ProblemIoError::UnknownDomain(_))
        ));
    }
}
