//! Batch runs: isomer generation, indices, realization and volume with a
//! persistent cache, Table-1 style summaries, the type-(a) nanotube
//! minimality check and descriptor export.

mod cache;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{Cache, CACHE_DIR_ENV, FORMAT_VERSION};

use crate::graph::{
    canonical_spiral, enumerate_isomers, nanotube_a, parse_planar_code, wind_spiral, FullereneGraph, SpiralCode,
    GraphError, MAX_ENUMERATION_ORDER,
};
use crate::hypfun::dodecahedron_volume_closed_form;
use crate::indices::{IndexError, IndexVector};
use crate::realize::{realize, to_ball, Realization, RealizeError, SolverConfig};
use crate::stats::{distinct_count, format_value, DescriptorTable, StatsError};
use crate::volume::{volume_of_realization, HypVolumeReport, VolumeError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("volume of {id}")]
    Volume { id: String, source: VolumeError },
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("cannot access {}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} has no face spiral")]
    NoSpiral(String),
}

impl PipelineError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// True when the failure is the solver not converging.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            Self::Volume { source: VolumeError::Realize(RealizeError::NoConvergence { .. }), .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// planar_code files; when empty, isomers are generated for the N range.
    pub inputs: Vec<PathBuf>,
    pub n_min: usize,
    pub n_max: usize,
    pub solver: SolverConfig,
    pub output_dir: Option<PathBuf>,
    /// Falls back to `HYPFULL_CACHE_DIR`; no caching when neither is set.
    pub cache_dir: Option<PathBuf>,
    /// Decimal places for distinct-volume counts and presentation.
    pub precision: u32,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    pub long_suite: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            n_min: 20,
            n_max: 40,
            solver: SolverConfig::default(),
            output_dir: None,
            cache_dir: None,
            precision: 6,
            jobs: None,
            long_suite: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if !(self.solver.tolerance > 0.0 && self.solver.tolerance.is_finite()) {
            return bad(format!("tolerance must be positive, got {}", self.solver.tolerance));
        }
        if self.n_min > self.n_max {
            return bad(format!("empty range {}..{}", self.n_min, self.n_max));
        }
        if self.inputs.is_empty() && (self.n_min < 20 || self.n_max > MAX_ENUMERATION_ORDER) {
            return bad(format!(
                "generation supports 20 <= N <= {MAX_ENUMERATION_ORDER}, got {}..{}",
                self.n_min, self.n_max
            ));
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        if self.precision > 12 {
            return bad(format!("precision {} is beyond double precision", self.precision));
        }
        Ok(())
    }

    pub fn cache_location(&self) -> Option<PathBuf> {
        self.cache_dir
            .clone()
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
    }
}

/// Reads a planar_code file, or a text file of spirals (`"N: p1 ... p12"`
/// per line, `#` comments allowed). planar_code always contains zero octets,
/// which never occur in the text format.
pub fn read_graphs(path: &Path) -> Result<Vec<FullereneGraph>, PipelineError> {
    let bytes = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    let source = path.display().to_string();
    if bytes.starts_with(b">>") || bytes.contains(&0) {
        return Ok(parse_planar_code(&bytes, &source)?);
    }
    let text = String::from_utf8_lossy(&bytes);
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let spiral: SpiralCode = line.parse()?;
        out.push(wind_spiral(&spiral)?.with_id(format!("{source}:{}", line_no + 1)));
    }
    Ok(out)
}

/// Everything computed for one isomer. The realization refers to the graph
/// wound from `spiral`, so cached entries do not depend on input labelling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsomerRecord {
    pub id: String,
    pub n_vertices: usize,
    pub spiral: String,
    pub indices: IndexVector,
    pub volume: HypVolumeReport,
    pub realization: Realization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub cache_corrupt: u64,
    pub solver_iterations: u64,
}

pub struct Pipeline {
    cfg: RunConfig,
    cache: Option<Cache>,
    pool: Option<rayon::ThreadPool>,
    hits: AtomicU64,
    misses: AtomicU64,
    iterations: AtomicU64,
}

impl Pipeline {
    pub fn new(cfg: RunConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let cache = match cfg.cache_location() {
            Some(dir) => Some(Cache::new(&dir).map_err(|e| PipelineError::io(&dir, e))?),
            None => None,
        };
        let pool = match cfg.jobs {
            Some(n) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| PipelineError::Config(e.to_string()))?,
            ),
            None => None,
        };
        Ok(Self {
            cfg,
            cache,
            pool,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            iterations: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn stats(&self) -> RunStats {
        RunStats {
            cache_hits: self.hits.load(Ordering::Relaxed),
            cache_misses: self.misses.load(Ordering::Relaxed),
            cache_corrupt: self.cache.as_ref().map_or(0, |c| c.corrupt.load(Ordering::Relaxed)),
            solver_iterations: self.iterations.load(Ordering::Relaxed),
        }
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }

    /// Graphs from the configured inputs, or all isomers in the N range.
    pub fn load_graphs(&self) -> Result<Vec<FullereneGraph>, PipelineError> {
        if self.cfg.inputs.is_empty() {
            let mut out = Vec::new();
            for n in (self.cfg.n_min..=self.cfg.n_max).filter(|n| n % 2 == 0) {
                out.extend(self.install(|| enumerate_isomers(n, None))?);
            }
            return Ok(out);
        }
        let mut out = Vec::new();
        for path in &self.cfg.inputs {
            out.extend(read_graphs(path)?);
        }
        Ok(out)
    }

    /// Indices, realization and volume of one graph, from the cache when
    /// possible.
    pub fn analyze(&self, g: &FullereneGraph) -> Result<IsomerRecord, PipelineError> {
        let report = g.validate();
        if !report.is_valid() {
            return Err(PipelineError::Graph(GraphError::Inconsistent(report.to_string())));
        }
        let spiral = canonical_spiral(g).ok_or_else(|| PipelineError::NoSpiral(g.id().to_string()))?;
        let key = spiral.key();
        if let Some(cache) = &self.cache {
            if let Some(mut rec) = cache.load(&key) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                rec.id = g.id().to_string();
                return Ok(rec);
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let canon = wind_spiral(&spiral)?.with_id(g.id());
        let vol_err = |source| PipelineError::Volume { id: g.id().to_string(), source };
        let realization = realize(&canon, &self.cfg.solver).map_err(|e| vol_err(e.into()))?;
        self.iterations.fetch_add(realization.iterations as u64, Ordering::Relaxed);
        let volume = volume_of_realization(&realization, &canon).map_err(vol_err)?;
        let rec = IsomerRecord {
            id: g.id().to_string(),
            n_vertices: g.n_vertices(),
            spiral: spiral.to_string(),
            indices: IndexVector::compute(&canon)?,
            volume,
            realization,
        };
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.store(&key, &rec) {
                log::warn!("could not write cache entry {key}: {e}");
            }
        }
        Ok(rec)
    }

    /// Records in input order.
    pub fn analyze_all(&self, graphs: &[FullereneGraph]) -> Result<Vec<IsomerRecord>, PipelineError> {
        self.install(|| graphs.par_iter().map(|g| self.analyze(g)).collect())
    }

    /// One summary row per even N in the configured range.
    pub fn run_table1(&self) -> Result<Vec<Table1Row>, PipelineError> {
        let mut rows = Vec::new();
        for n in (self.cfg.n_min..=self.cfg.n_max).filter(|n| n % 2 == 0) {
            let graphs = self.install(|| enumerate_isomers(n, None))?;
            let records = self.analyze_all(&graphs)?;
            rows.push(Table1Row::from_records(n, &records, self.cfg.precision));
            log::info!("N = {n}: {} isomers", graphs.len());
        }
        Ok(rows)
    }

    /// Is the minimum-volume isomer with `n = 10k` vertices the type-(a)
    /// nanotube, with volume `(N/10 - 1) vol(C20)`?
    pub fn check_conjecture_a(&self, n: usize) -> Result<ConjectureReport, PipelineError> {
        if n % 10 != 0 || n < 30 {
            return Err(PipelineError::Config(format!(
                "conjecture check needs N = 10k with N >= 30, got {n}"
            )));
        }
        let graphs = self.install(|| enumerate_isomers(n, None))?;
        let records = self.analyze_all(&graphs)?;
        let (idx, min) = records
            .iter()
            .enumerate()
            .min_by(|a, b| {
                a.1.volume
                    .volume
                    .total_cmp(&b.1.volume.volume)
                    .then_with(|| a.1.id.cmp(&b.1.id))
            })
            .ok_or_else(|| PipelineError::Config(format!("no isomers with {n} vertices")))?;
        let k = n / 10 - 1;
        let tube = nanotube_a(k)?;
        let is_tube = graphs[idx].is_isomorphic(&tube);
        let predicted = k as f64 * dodecahedron_volume_closed_form();
        let observed = min.volume.volume;
        Ok(ConjectureReport {
            n,
            argmin_id: min.id.clone(),
            argmin_spiral: min.spiral.clone(),
            is_type_a_nanotube: is_tube,
            predicted,
            observed,
            verdict: is_tube && (predicted - observed).abs() <= CONJECTURE_TOLERANCE,
        })
    }
}

pub const CONJECTURE_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub argmin_id: String,
    pub argmin_spiral: String,
    pub is_type_a_nanotube: bool,
    pub predicted: f64,
    pub observed: f64,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub isomers: usize,
    pub distinct_volumes: usize,
    pub min_volume: Option<f64>,
    pub max_volume: Option<f64>,
    pub min_id: Option<String>,
    pub max_id: Option<String>,
}

impl Table1Row {
    pub fn from_records(n: usize, records: &[IsomerRecord], precision: u32) -> Self {
        let vols: Vec<f64> = records.iter().map(|r| r.volume.volume).collect();
        let by_volume = |a: &&IsomerRecord, b: &&IsomerRecord| {
            a.volume.volume.total_cmp(&b.volume.volume).then_with(|| a.spiral.cmp(&b.spiral))
        };
        let min = records.iter().min_by(by_volume);
        let max = records.iter().max_by(by_volume);
        Self {
            n,
            isomers: records.len(),
            distinct_volumes: distinct_count(&vols, precision),
            min_volume: min.map(|r| r.volume.volume),
            max_volume: max.map(|r| r.volume.volume),
            min_id: min.map(|r| r.spiral.clone()),
            max_id: max.map(|r| r.spiral.clone()),
        }
    }
}

/// Table rows as CSV with volumes at `precision` decimals.
pub fn write_table1<W: std::io::Write>(writer: W, rows: &[Table1Row], precision: u32) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["N", "isomers", "distinct_volumes", "min_volume", "max_volume", "min_spiral", "max_spiral"])?;
    let p = precision as usize;
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.p$}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.isomers.to_string(),
            r.distinct_volumes.to_string(),
            fmt(r.min_volume),
            fmt(r.max_volume),
            r.min_id.clone().unwrap_or_default(),
            r.max_id.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const INDEX_COLUMNS: [&str; 6] = ["W", "WW", "W5", "Np", "H5", "H6"];

/// One row per record, ordered by (N, spiral) so output is deterministic.
pub fn descriptor_table(records: &[IsomerRecord]) -> DescriptorTable {
    let mut names: Vec<String> = [
        "N",
        "volume",
        "sphericity",
        "lower_bound",
        "upper_bound_atkinson",
        "upper_bound_fullerene",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    names.extend(INDEX_COLUMNS.iter().map(|s| s.to_string()));
    names.extend((0..6).map(|k| format!("p{k}")));
    names.extend((0..7).map(|k| format!("h{k}")));
    names.push("wiener_complexity".into());
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut table = DescriptorTable::new(&name_refs);

    let mut sorted: Vec<&IsomerRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (a.n_vertices, &a.spiral, &a.id).cmp(&(b.n_vertices, &b.spiral, &b.id)));
    for r in sorted {
        let iv = &r.indices;
        let s = &r.volume.sandwich;
        let mut row = vec![
            Some(r.n_vertices as f64),
            Some(r.volume.volume),
            Some(r.volume.sphericity),
            Some(s.lower),
            Some(s.upper_atkinson),
            s.upper_fullerene,
            Some(iv.wiener as f64),
            Some(iv.hyper_wiener as f64),
            Some(iv.w5 as f64),
            Some(iv.np as f64),
            Some(iv.h5 as f64),
            Some(iv.h6 as f64),
        ];
        row.extend(iv.p_signature.iter().map(|&c| Some(c as f64)));
        row.extend(iv.h_signature.iter().map(|&c| Some(c as f64)));
        row.push(Some(iv.wiener_complexity as f64));
        // ids are unique per input set; a duplicate is a caller error
        if let Err(e) = table.push(r.id.clone(), &row) {
            log::warn!("skipping row: {e}");
        }
    }
    table
}

#[derive(Serialize)]
struct RealizationExport<'a> {
    graph_id: &'a str,
    spiral: &'a str,
    residual: f64,
    face_normals: Vec<[f64; 4]>,
    vertices_hyperboloid: Vec<[f64; 4]>,
    vertices_ball: Vec<[f64; 3]>,
    gram: &'a [Vec<f64>],
}

/// Writes `descriptors.csv`, `scatter.csv` (volume against each index, long
/// format) and one realization JSON per isomer under `dir/realizations`,
/// named by canonical spiral key.
pub fn emit_descriptors(records: &[IsomerRecord], dir: &Path) -> Result<(), PipelineError> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |e| PipelineError::Io { path: p, source: e }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let table = descriptor_table(records);

    let desc = dir.join("descriptors.csv");
    let f = fs::File::create(&desc).map_err(io(&desc))?;
    table.write_csv(std::io::BufWriter::new(f))?;

    let scatter = dir.join("scatter.csv");
    let f = fs::File::create(&scatter).map_err(io(&scatter))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(f));
    w.write_record(["id", "N", "index", "value", "volume"]).map_err(StatsError::from)?;
    for (row, id) in table.ids().iter().enumerate() {
        let n = table.value(row, "N")?.unwrap_or_default();
        let vol = table.value(row, "volume")?.unwrap_or_default();
        for name in INDEX_COLUMNS {
            let v = table.value(row, name)?.unwrap_or_default();
            w.write_record([id.clone(), format_value(n), name.to_string(), format_value(v), format_value(vol)])
                .map_err(StatsError::from)?;
        }
    }
    w.flush().map_err(io(&scatter))?;

    let rdir = dir.join("realizations");
    fs::create_dir_all(&rdir).map_err(io(&rdir))?;
    for r in records {
        let real = &r.realization;
        let export = RealizationExport {
            graph_id: &r.id,
            spiral: &r.spiral,
            residual: real.residual,
            face_normals: real.face_normals.iter().map(|e| e.to_array()).collect(),
            vertices_hyperboloid: real.vertex_points.iter().map(|p| p.to_array()).collect(),
            vertices_ball: real.vertex_points.iter().map(|&p| to_ball(p)).collect(),
            gram: &real.gram,
        };
        let key = r.spiral.parse::<SpiralCode>()?.key();
        let path = rdir.join(format!("{key}.json"));
        let text = serde_json::to_string_pretty(&export).expect("export serializes");
        fs::write(&path, text).map_err(io(&path))?;
    }
    Ok(())
}
