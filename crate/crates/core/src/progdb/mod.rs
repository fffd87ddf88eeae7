//! Scored program store with cluster-based reference sampling.
//!
//! Entries persist as JSON lines. Valid entries are grouped by distinct score
//! into clusters; references are drawn by first picking a cluster with
//! geometrically decaying probability, then a member uniformly.

pub mod cluster;

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cluster::{cluster_probs, cluster_scores, kmeans_1d, KMeans1d};

#[derive(Debug, Error)]
pub enum DbError {
    #[error("database has no valid entries")]
    Empty,
    #[error("no geometric distribution over {k} clusters starts at p0={p0}")]
    Infeasible { k: usize, p0: f64 },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DbError + '_ {
    move |source| DbError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramEntry {
    pub id: u64,
    pub source: String,
    pub score: f64,
    pub valid: bool,
    pub parent_ids: Vec<u64>,
    /// Global LLM call index that produced the entry (0 for seeds).
    pub created_round: u64,
    pub process_id: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub k_cluster: usize,
    pub k_ref: usize,
    pub p0: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { k_cluster: 10, k_ref: 2, p0: 0.5 }
    }
}

/// Ordered clusters of entry ids; cluster 0 holds the top score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterPartition {
    pub clusters: Vec<Vec<u64>>,
    /// Highest score in each cluster.
    pub max_scores: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inserted {
    New(u64),
    /// A valid entry with the same source already exists.
    Duplicate(u64),
}

impl Inserted {
    pub fn id(self) -> u64 {
        match self {
            Inserted::New(id) | Inserted::Duplicate(id) => id,
        }
    }
}

#[derive(Debug, Default)]
pub struct Database {
    entries: Vec<ProgramEntry>,
    next_id: u64,
    sink: Option<(PathBuf, File)>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends every later insert to `path`, creating the file if needed.
    /// Entries already held are written first when the file is new.
    pub fn attach(&mut self, path: &Path) -> Result<(), DbError> {
        let fresh = !path.exists();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))?;
        if fresh {
            for e in &self.entries {
                write_line(&mut file, e).map_err(io_err(path))?;
            }
        }
        self.sink = Some((path.to_path_buf(), file));
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, DbError> {
        let file = File::open(path).map_err(io_err(path))?;
        let mut db = Self::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io_err(path))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: ProgramEntry =
                serde_json::from_str(&line).map_err(|source| DbError::Parse { path: path.to_path_buf(), line: i + 1, source })?;
            db.next_id = db.next_id.max(entry.id + 1);
            db.entries.push(entry);
        }
        Ok(db)
    }

    /// Writes all entries to `path`, replacing its contents.
    pub fn persist(&self, path: &Path) -> Result<(), DbError> {
        let mut out = Vec::new();
        for e in &self.entries {
            write_line(&mut out, e).expect("writing to a Vec cannot fail");
        }
        fs::write(path, out).map_err(io_err(path))
    }

    /// Adds an entry under a fresh id (the id field of `entry` is ignored).
    /// Valid entries whose source is already stored are not added again.
    pub fn insert(&mut self, mut entry: ProgramEntry) -> Result<Inserted, DbError> {
        if entry.valid {
            if let Some(e) = self.entries.iter().find(|e| e.valid && e.source == entry.source) {
                return Ok(Inserted::Duplicate(e.id));
            }
        }
        entry.id = self.next_id;
        self.next_id += 1;
        if let Some((path, file)) = &mut self.sink {
            write_line(file, &entry).map_err(io_err(path))?;
        }
        let id = entry.id;
        self.entries.push(entry);
        Ok(Inserted::New(id))
    }

    pub fn entries(&self) -> &[ProgramEntry] {
        &self.entries
    }

    pub fn get(&self, id: u64) -> Option<&ProgramEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sampleable_count(&self) -> usize {
        self.entries.iter().filter(|e| e.valid).count()
    }

    /// Highest-scoring valid entry; the earliest wins ties.
    pub fn best(&self) -> Option<&ProgramEntry> {
        self.entries.iter().filter(|e| e.valid).fold(None, |best: Option<&ProgramEntry>, e| match best {
            Some(b) if b.score >= e.score => Some(b),
            _ => Some(e),
        })
    }

    /// Valid entries sorted by descending score, stable in insertion order.
    pub fn top(&self, k: usize) -> Vec<&ProgramEntry> {
        let mut v: Vec<&ProgramEntry> = self.entries.iter().filter(|e| e.valid).collect();
        v.sort_by(|a, b| b.score.total_cmp(&a.score));
        v.truncate(k);
        v
    }

    pub fn partition(&self, k_cluster: usize) -> Result<ClusterPartition, DbError> {
        let valid: Vec<&ProgramEntry> = self.entries.iter().filter(|e| e.valid).collect();
        if valid.is_empty() {
            return Err(DbError::Empty);
        }
        let mut distinct: Vec<f64> = valid.iter().map(|e| e.score).collect();
        distinct.sort_by(|a, b| b.total_cmp(a));
        distinct.dedup();
        let groups = cluster_scores(&distinct, k_cluster);
        let clusters = groups.iter().map(|g| valid.iter().filter(|e| g.contains(&e.score)).map(|e| e.id).collect()).collect();
        let max_scores = groups.iter().map(|g| g[0]).collect();
        Ok(ClusterPartition { clusters, max_scores })
    }

    /// Draws `cfg.k_ref` references: clusters with replacement, then one
    /// member per drawn cluster uniformly.
    pub fn sample_refs(&self, cfg: &SamplerConfig, rng: &mut impl Rng) -> Result<Vec<ProgramEntry>, DbError> {
        let part = self.partition(cfg.k_cluster)?;
        let probs = cluster_probs(part.clusters.len(), cfg.p0)?;
        let pick = WeightedIndex::new(&probs).map_err(|_| DbError::Infeasible { k: probs.len(), p0: cfg.p0 })?;
        let mut out = Vec::with_capacity(cfg.k_ref);
        for _ in 0..cfg.k_ref {
            let members = &part.clusters[pick.sample(rng)];
            let id = members[rng.random_range(0..members.len())];
            out.push(self.get(id).expect("partition ids come from this database").clone());
        }
        Ok(out)
    }
}

fn write_line(w: &mut impl Write, e: &ProgramEntry) -> io::Result<()> {
    let line = serde_json::to_string(e).map_err(io::Error::other)?;
    writeln!(w, "{line}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn entry(source: &str, score: f64, valid: bool) -> ProgramEntry {
        ProgramEntry { id: 0, source: source.into(), score, valid, parent_ids: vec![], created_round: 0, process_id: 0 }
    }

    #[test]
    fn insert_best_and_invalid() {
        let mut db = Database::new();
        for (i, s) in [1.0, 3.0, 2.0].iter().enumerate() {
            db.insert(entry(&format!("p{i}"), *s, true)).unwrap();
        }
        assert_eq!(db.best().unwrap().score, 3.0);
        let before = db.sampleable_count();
        db.insert(entry("bad", -1e10, false)).unwrap();
        assert_eq!(db.sampleable_count(), before);
        assert_eq!(db.len(), 4);
        assert_eq!(db.insert(entry("p1", 3.0, true)).unwrap(), Inserted::Duplicate(1));
    }

    #[test]
    fn single_entry_refs() {
        let mut db = Database::new();
        db.insert(entry("only", 4.0, true)).unwrap();
        db.insert(entry("junk", -1e10, false)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let refs = db.sample_refs(&SamplerConfig::default(), &mut rng).unwrap();
        assert_eq!(refs.len(), 2);
        assert!(refs.iter().all(|r| r.source == "only"));
        assert!(matches!(Database::new().sample_refs(&SamplerConfig::default(), &mut rng), Err(DbError::Empty)));
    }

    #[test]
    fn equal_scores_share_a_cluster() {
        let mut db = Database::new();
        for i in 0..3 {
            db.insert(entry(&format!("p{i}"), 10.0, true)).unwrap();
        }
        let part = db.partition(10).unwrap();
        assert_eq!(part.clusters, vec![vec![0, 1, 2]]);
    }
}
