use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use corelens::analysis::{AnalysisResult, Registry};
use corelens::model::Reactor;
use corelens::nrdf::{self, NrdfError};

use crate::error::{ApiError, ServerError};

/// One NRDF file and the reactors parsed from it.
#[derive(Debug)]
pub struct LoadedFile {
    /// `f0`, `f1`, ... in load order.
    pub id: String,
    pub name: String,
    pub path: PathBuf,
    pub size_bytes: u64,
    pub reactors: Vec<Reactor>,
}

/// Loaded files, the tool registry and the results produced so far.
#[derive(Debug)]
pub struct Session {
    files: Vec<LoadedFile>,
    registry: Registry,
    // ids are `r1`, `r2`, ... assigned under the write lock
    results: RwLock<BTreeMap<u64, AnalysisResult>>,
}

impl Session {
    pub fn load(paths: &[PathBuf]) -> Result<Self, ServerError> {
        let mut files = Vec::with_capacity(paths.len());
        for path in paths {
            let load = |p: &Path| -> Result<Vec<Reactor>, NrdfError> {
                let file = nrdf::read_file(BufReader::new(File::open(p)?))?;
                nrdf::load_reactors(&file)
            };
            let reactors = load(path).map_err(|source| ServerError::Load {
                path: path.clone(),
                source,
            })?;
            let size_bytes = std::fs::metadata(path)?.len();
            files.push((path.clone(), size_bytes, reactors));
        }
        Self::from_reactors(files)
    }

    /// A session over already-parsed files, given as `(path, size, reactors)`.
    pub fn from_reactors(files: Vec<(PathBuf, u64, Vec<Reactor>)>) -> Result<Self, ServerError> {
        let mut seen = std::collections::BTreeSet::new();
        let files = files
            .into_iter()
            .enumerate()
            .map(|(i, (path, size_bytes, reactors))| {
                if !seen.insert(path.clone()) {
                    return Err(ServerError::Duplicate(path.display().to_string()));
                }
                let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into());
                Ok(LoadedFile {
                    id: format!("f{i}"),
                    name,
                    path,
                    size_bytes,
                    reactors,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            files,
            registry: Registry::with_builtins(),
            results: RwLock::new(BTreeMap::new()),
        })
    }

    pub fn files(&self) -> &[LoadedFile] {
        &self.files
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn file(&self, fid: &str) -> Result<&LoadedFile, ApiError> {
        self.files
            .iter()
            .find(|f| f.id == fid)
            .ok_or_else(|| ApiError::not_found(format!("no file {fid:?}")))
    }

    pub fn reactor(&self, fid: &str, name: &str) -> Result<&Reactor, ApiError> {
        self.file(fid)?
            .reactors
            .iter()
            .find(|r| r.name() == name)
            .ok_or_else(|| ApiError::not_found(format!("no reactor {name:?} in file {fid:?}")))
    }

    /// Stores `result` and returns its id.
    pub fn store_result(&self, result: AnalysisResult) -> String {
        let mut map = self.results.write().unwrap_or_else(|e| e.into_inner());
        let id = map.len() as u64 + 1;
        map.insert(id, result);
        format!("r{id}")
    }

    pub fn result(&self, id: &str) -> Option<AnalysisResult> {
        let n: u64 = id.strip_prefix('r')?.parse().ok()?;
        self.results.read().unwrap_or_else(|e| e.into_inner()).get(&n).cloned()
    }

    /// `(id, tool, created_at)` of every stored result, oldest first.
    pub fn result_index(&self) -> Vec<(String, String, String)> {
        self.results
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .iter()
            .map(|(id, r)| (format!("r{id}"), r.tool.clone(), crate::json::timestamp(r)))
            .collect()
    }
}
